//! Problem definitions read from a single JSON file.

use crate::error::{CliError, Result};
use corona_core::coeff::ProbeOptions;
use corona_core::group::{GroupDef, GroupSpec};
use corona_core::opalg::KernelSymbol;
use corona_core::spectra::SpectraOptions;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    EssSpectrum,
    Fredholm,
    Crosscheck,
    VerifyAlgebra,
    VerifyFourier,
}

impl Task {
    pub const ALL: [Task; 5] = [
        Task::EssSpectrum,
        Task::Fredholm,
        Task::Crosscheck,
        Task::VerifyAlgebra,
        Task::VerifyFourier,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::EssSpectrum => "ess-spectrum",
            Task::Fredholm => "fredholm",
            Task::Crosscheck => "crosscheck",
            Task::VerifyAlgebra => "verify-algebra",
            Task::VerifyFourier => "verify-fourier",
        }
    }

    pub fn needs_kernel(self) -> bool {
        !matches!(self, Task::VerifyFourier)
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown task {s:?}"))
    }
}

/// Grids, tolerances and window sizes. Every field has a default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunOptions {
    /// Torus grid points per dimension.
    pub dual_grid: usize,
    /// Window radius for sections; defaults to 200 for `crosscheck` and 8
    /// for `verify-algebra`.
    pub window: Option<usize>,
    /// Extra ring around the window; defaults to the radius the task needs.
    pub margin: Option<usize>,
    /// Neighbourhood and pseudospectrum level for `crosscheck`.
    pub epsilon: f64,
    /// Relative level below which a distance counts as zero.
    pub noise: f64,
    pub pseudo_grid: usize,
    pub bloch_cap: usize,
    pub max_cell: usize,
    pub probe: ProbeOptions,
    /// Random instances drawn by the verification tasks.
    pub samples: usize,
    pub seed: u64,
    /// Largest residual a verification task accepts.
    pub tolerance: f64,
    /// Output directory (the `--out` flag takes precedence).
    pub out: Option<String>,
    /// Embeds the wall-clock time in the SVG; off for reproducible output.
    pub svg_timestamp: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        let s = SpectraOptions::default();
        Self {
            dual_grid: s.dual_grid,
            window: None,
            margin: None,
            epsilon: 1e-3,
            noise: s.noise,
            pseudo_grid: s.pseudo_grid,
            bloch_cap: s.bloch_cap,
            max_cell: s.max_cell,
            probe: s.probe,
            samples: 50,
            seed: 0,
            tolerance: 1e-10,
            out: None,
            svg_timestamp: false,
        }
    }
}

impl RunOptions {
    pub fn spectra(&self) -> SpectraOptions {
        SpectraOptions {
            probe: self.probe.clone(),
            dual_grid: self.dual_grid,
            bloch_cap: self.bloch_cap,
            max_cell: self.max_cell,
            noise: self.noise,
            pseudo_grid: self.pseudo_grid,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub group: GroupDef,
    #[serde(default)]
    pub kernel: Option<KernelSymbol>,
    /// Optional here; must agree with the task given on the command line.
    #[serde(default)]
    pub task: Option<Task>,
    #[serde(default)]
    pub options: RunOptions,
}

/// Command-line overrides applied on top of the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub dual_grid: Option<usize>,
    pub window: Option<usize>,
    pub margin: Option<usize>,
    pub epsilon: Option<f64>,
    pub out: Option<String>,
}

impl ProblemConfig {
    /// Parses JSON, reporting schema errors with a JSON-pointer path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let pointer = if path == "." {
                String::new()
            } else {
                format!("/{}", path.replace('.', "/").replace('[', "/").replace(']', ""))
            };
            CliError::Validation(format!("at {:?}: {}", pointer, e.into_inner()))
        })
    }

    pub fn apply(&mut self, o: &Overrides) {
        let opts = &mut self.options;
        if let Some(v) = o.dual_grid {
            opts.dual_grid = v;
        }
        if let Some(v) = o.window {
            opts.window = Some(v);
        }
        if let Some(v) = o.margin {
            opts.margin = Some(v);
        }
        if let Some(v) = o.epsilon {
            opts.epsilon = v;
        }
        if let Some(v) = &o.out {
            opts.out = Some(v.clone());
        }
    }

    /// Checks task agreement and option ranges, then builds the group.
    pub fn validate(&self, task: Task) -> Result<GroupSpec> {
        if let Some(t) = self.task {
            if t != task {
                return Err(CliError::Validation(format!(
                    "config is for task {t}, command line asks for {task}"
                )));
            }
        }
        let o = &self.options;
        let bad = |m: String| Err(CliError::Validation(m));
        for (name, v) in [("epsilon", o.epsilon), ("noise", o.noise), ("tolerance", o.tolerance)] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("options.{name} must be positive, got {v}"));
            }
        }
        if o.dual_grid < 2 || o.pseudo_grid < 2 {
            return bad("options.dual_grid and options.pseudo_grid must be at least 2".into());
        }
        if o.probe.cluster_grid < 2 {
            return bad("options.probe.cluster_grid must be at least 2".into());
        }
        if o.samples == 0 && matches!(task, Task::VerifyAlgebra | Task::VerifyFourier) {
            return bad("options.samples must be positive".into());
        }
        if o.window == Some(0) && task == Task::Crosscheck {
            return bad("options.window must be positive".into());
        }
        if task.needs_kernel() && self.kernel.is_none() {
            return bad(format!("task {task} needs a kernel"));
        }
        self.group.build().map_err(|e| CliError::Validation(format!("/group: {e}")))
    }

    /// The kernel, checked against the group.
    pub fn kernel(&self, g: &GroupSpec) -> Result<Option<KernelSymbol>> {
        match &self.kernel {
            None => Ok(None),
            Some(k) => {
                k.validate(g)?;
                Ok(Some(k.clone()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LAP: &str = r#"{
        "group": {"kind": "zn", "dim": 1},
        "kernel": [{"coeff": {"kind": "constant", "value": 1},
                    "profile": [{"element": [1], "re": 1}, {"element": [-1], "re": 1}]}]
    }"#;

    #[test]
    fn parses_minimal_config() {
        let c = ProblemConfig::from_json(LAP).unwrap();
        assert_eq!(c.options, RunOptions::default());
        let g = c.validate(Task::EssSpectrum).unwrap();
        assert_eq!(c.kernel(&g).unwrap().unwrap().terms.len(), 1);
    }

    #[test]
    fn schema_errors_carry_a_pointer() {
        let text = LAP.replace(r#""re": 1}, {"#, r#""re": "x"}, {"#);
        let e = ProblemConfig::from_json(&text).unwrap_err().to_string();
        assert!(e.contains("/kernel/0/profile/0/re"), "{e}");
        let e = ProblemConfig::from_json(r#"{"group": {"kind": "zn", "dim": 1}, "options": {"grid": 3}}"#)
            .unwrap_err()
            .to_string();
        assert!(e.contains("/options") && e.contains("grid"), "{e}");
    }

    #[test]
    fn task_mismatch_and_ranges_are_rejected() {
        let mut c = ProblemConfig::from_json(LAP).unwrap();
        c.task = Some(Task::Fredholm);
        assert!(matches!(c.validate(Task::Crosscheck), Err(CliError::Validation(_))));
        c.task = None;
        c.options.epsilon = 0.0;
        assert!(matches!(c.validate(Task::Crosscheck), Err(CliError::Validation(_))));
        c.options.epsilon = 1e-3;
        c.kernel = None;
        assert!(c.validate(Task::Fredholm).is_err());
        assert!(c.validate(Task::VerifyFourier).is_ok());
    }

    #[test]
    fn overrides_take_precedence() {
        let mut c = ProblemConfig::from_json(LAP).unwrap();
        c.apply(&Overrides {
            dual_grid: Some(64),
            window: Some(5),
            epsilon: Some(0.5),
            ..Default::default()
        });
        assert_eq!((c.options.dual_grid, c.options.window, c.options.epsilon), (64, Some(5), 0.5));
    }
}

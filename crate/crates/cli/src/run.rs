//! Task pipelines. Each writes its artifacts plus `manifest.json`.

use crate::artifacts::{eigenvalues_csv, sha256_hex, spectrum_csv, spectrum_svg, ArtifactDir, Manifest};
use crate::config::{ProblemConfig, Task};
use crate::error::Result;
use crate::verify::{verify_algebra, verify_fourier, VerifyReport};
use corona_core::group::GroupSpec;
use corona_core::opalg::KernelSymbol;
use corona_core::spectra::{
    certificate_from, crosscheck_against, essential_spectrum, CrosscheckMode, EssentialSpectrum, SpectralSet, Verdict,
    WitnessStatus,
};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

pub const DEFAULT_OUT: &str = "corona-out";
/// Window radius for `crosscheck` when none is configured.
pub const CROSSCHECK_WINDOW: usize = 200;
/// Window radius for `verify-algebra` and `verify-fourier`.
pub const VERIFY_WINDOW: usize = 8;
/// Number of list entries printed in reports before eliding.
const LIST_CAP: usize = 40;

#[derive(Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub out_dir: PathBuf,
    /// First lines of the report, for the terminal.
    pub summary: String,
}

struct Done {
    exit_code: i32,
    report: String,
    resolutions: BTreeMap<String, f64>,
}

/// Validates the config for `task`, runs it and writes every artifact.
pub fn run(task: Task, cfg: &ProblemConfig, raw: &[u8]) -> Result<Outcome> {
    let g = cfg.validate(task)?;
    let phi = cfg.kernel(&g)?;
    let out = cfg.options.out.clone().unwrap_or_else(|| DEFAULT_OUT.into());
    let mut dir = ArtifactDir::create(&out)?;
    let done = match task {
        Task::EssSpectrum => ess_task(cfg, &g, phi.as_ref().expect("validated"), &mut dir)?,
        Task::Fredholm => fredholm_task(cfg, &g, phi.as_ref().expect("validated"), &mut dir)?,
        Task::Crosscheck => crosscheck_task(cfg, &g, phi.as_ref().expect("validated"), &mut dir)?,
        Task::VerifyAlgebra => {
            let o = &cfg.options;
            let k = phi.as_ref().expect("validated");
            let r = verify_algebra(k, &g, o.window.unwrap_or(VERIFY_WINDOW), o.margin, o.samples, o.seed, o.tolerance)?;
            verify_task(task, r, &mut dir)?
        }
        Task::VerifyFourier => {
            let o = &cfg.options;
            let r = verify_fourier(phi.as_ref(), &g, o.window.unwrap_or(VERIFY_WINDOW), o.samples, o.seed, o.tolerance)?;
            verify_task(task, r, &mut dir)?
        }
    };
    let header = format!("task: {task}\ngroup: {}\nexit code: {}\n", g.describe(), done.exit_code);
    let report = header + &done.report;
    dir.write("report.txt", report.as_bytes())?;
    let mut effective = cfg.clone();
    effective.task = Some(task);
    // Where artifacts go is not an input.
    effective.options.out = None;
    let effective = serde_json::to_vec(&effective).expect("config serializes");
    let digests = dir.digests().clone();
    dir.write_json(
        "manifest.json",
        &Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            core_version: corona_core::VERSION,
            task: task.to_string(),
            exit_code: done.exit_code,
            config_sha256: sha256_hex(raw),
            effective_config_sha256: sha256_hex(&effective),
            resolutions: done.resolutions,
            artifacts: &digests,
        },
    )?;
    Ok(Outcome {
        exit_code: done.exit_code,
        out_dir: dir.path().to_path_buf(),
        summary: report.lines().take(12).collect::<Vec<_>>().join("\n"),
    })
}

fn describe_set(s: &SpectralSet, out: &mut String) {
    if s.is_empty() {
        out.push_str("  (empty)\n");
        return;
    }
    if s.is_real() {
        let comps = s.real_components();
        for (lo, hi) in comps.iter().take(LIST_CAP) {
            if lo == hi {
                let _ = writeln!(out, "  {{{lo:.6}}}");
            } else {
                let _ = writeln!(out, "  [{lo:.6}, {hi:.6}]");
            }
        }
        if comps.len() > LIST_CAP {
            let _ = writeln!(out, "  ... {} more components (see spectrum.csv)", comps.len() - LIST_CAP);
        }
        return;
    }
    if let Some((a, b, c, d)) = s.bounding_box() {
        let _ = writeln!(out, "  bounding box: re [{a:.6}, {b:.6}], im [{c:.6}, {d:.6}]");
    }
    for c in &s.circles {
        let _ = writeln!(out, "  circle: centre {:.6}{:+.6}i, radius {:.6}", c.center.re, c.center.im, c.radius);
    }
    for &(lo, hi) in &s.intervals {
        let _ = writeln!(out, "  segment: [{lo:.6}, {hi:.6}]");
    }
    if !s.points.is_empty() {
        let _ = writeln!(out, "  cloud: {} points (see spectrum.csv)", s.points.len());
    }
}

fn spectrum_section(ess: &EssentialSpectrum, out: &mut String) {
    let _ = writeln!(
        out,
        "essential spectrum: union over {} quasi-orbit(s), Hausdorff resolution {:e} (discretization {:e})",
        ess.records.len(),
        ess.set.resolution,
        ess.discretization
    );
    describe_set(&ess.set, out);
    out.push_str("quasi-orbits:\n");
    for r in ess.records.iter().take(LIST_CAP) {
        let _ = writeln!(
            out,
            "  {} [class {}]: dist(0, sp) = {:.6e} ± {:e}",
            r.label, r.class_id, r.distance_to_zero, r.resolution
        );
    }
    if ess.records.len() > LIST_CAP {
        let _ = writeln!(out, "  ... {} more (see provenance.json)", ess.records.len() - LIST_CAP);
    }
}

#[derive(Serialize)]
struct Provenance<'a> {
    group: String,
    kernel: &'a KernelSymbol,
    resolution: f64,
    component_resolution: f64,
    discretization: f64,
    records: &'a [corona_core::spectra::QuasiOrbitRecord],
}

fn write_spectrum(
    dir: &mut ArtifactDir,
    cfg: &ProblemConfig,
    g: &GroupSpec,
    phi: &KernelSymbol,
    ess: &EssentialSpectrum,
    title: &str,
) -> Result<()> {
    dir.write("spectrum.csv", spectrum_csv(&ess.set).as_bytes())?;
    dir.write("spectrum.svg", spectrum_svg(&ess.set, title, timestamp(cfg)).as_bytes())?;
    dir.write_json(
        "provenance.json",
        &Provenance {
            group: g.describe(),
            kernel: phi,
            resolution: ess.set.resolution,
            component_resolution: ess.component_resolution,
            discretization: ess.discretization,
            records: &ess.records,
        },
    )
}

fn timestamp(cfg: &ProblemConfig) -> Option<u64> {
    cfg.options.svg_timestamp.then(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    })
}

fn spectrum_resolutions(ess: &EssentialSpectrum) -> BTreeMap<String, f64> {
    BTreeMap::from([
        ("spectrum".to_string(), ess.set.resolution),
        ("component".to_string(), ess.component_resolution),
        ("discretization".to_string(), ess.discretization),
    ])
}

fn ess_task(cfg: &ProblemConfig, g: &GroupSpec, phi: &KernelSymbol, dir: &mut ArtifactDir) -> Result<Done> {
    let ess = essential_spectrum(phi, g, &cfg.options.spectra())?;
    write_spectrum(dir, cfg, g, phi, &ess, "essential spectrum")?;
    let mut report = String::new();
    spectrum_section(&ess, &mut report);
    Ok(Done {
        exit_code: 0,
        report,
        resolutions: spectrum_resolutions(&ess),
    })
}

fn fredholm_task(cfg: &ProblemConfig, g: &GroupSpec, phi: &KernelSymbol, dir: &mut ArtifactDir) -> Result<Done> {
    let opts = cfg.options.spectra();
    let ess = essential_spectrum(phi, g, &opts)?;
    let cert = certificate_from(&ess, phi.l1_majorant(), &opts);
    write_spectrum(dir, cfg, g, phi, &ess, "essential spectrum (Fredholm certificate)")?;
    dir.write_json("certificate.json", &cert)?;
    let mut report = String::new();
    let verdict = match cert.verdict {
        Verdict::Fredholm => "Fredholm",
        Verdict::NotFredholm => "not Fredholm",
        Verdict::Inconclusive => "inconclusive (0 lies within the resolution of a limit spectrum)",
    };
    let _ = writeln!(report, "verdict: {verdict}");
    let _ = writeln!(report, "noise level: {:e}", cert.noise);
    report.push_str("witnesses:\n");
    for w in cert.witnesses.iter().take(LIST_CAP) {
        let status = match w.status {
            WitnessStatus::Invertible => "invertible",
            WitnessStatus::NotInvertible => "not invertible",
            WitnessStatus::Inconclusive => "inconclusive",
        };
        let _ = write!(
            report,
            "  {}: {status}, dist(0, sp) = {:.6e}, margin {:e}",
            w.quasiorbit, w.distance_to_zero, w.margin
        );
        if let Some(b) = w.lower_bound {
            let _ = write!(report, ", certified lower bound {b:.6e}");
        }
        if let Some(z) = w.violation_point {
            let _ = write!(report, ", spectrum meets 0 at {:.3e}{:+.3e}i", z.re, z.im);
        }
        report.push('\n');
    }
    if cert.witnesses.len() > LIST_CAP {
        let _ = writeln!(report, "  ... {} more (see certificate.json)", cert.witnesses.len() - LIST_CAP);
    }
    spectrum_section(&ess, &mut report);
    let mut resolutions = spectrum_resolutions(&ess);
    resolutions.insert("noise".into(), cert.noise);
    Ok(Done {
        exit_code: if cert.verdict == Verdict::Inconclusive { 2 } else { 0 },
        report,
        resolutions,
    })
}

fn crosscheck_task(cfg: &ProblemConfig, g: &GroupSpec, phi: &KernelSymbol, dir: &mut ArtifactDir) -> Result<Done> {
    let o = &cfg.options;
    let opts = o.spectra();
    let window = o.window.unwrap_or(CROSSCHECK_WINDOW);
    let ess = essential_spectrum(phi, g, &opts)?;
    let rep = crosscheck_against(phi, g, window, o.epsilon, &ess.set, &opts)?;
    write_spectrum(dir, cfg, g, phi, &ess, "predicted essential spectrum")?;
    dir.write("eigenvalues.csv", eigenvalues_csv(&rep.eigenvalues, &ess.set).as_bytes())?;
    dir.write_json("crosscheck.json", &rep)?;
    let mut report = String::new();
    let mode = match rep.mode {
        CrosscheckMode::Decisive => "decisive (section similar to a self-adjoint matrix)",
        CrosscheckMode::Advisory => "advisory (non-normal section, pseudospectrum comparison)",
    };
    let _ = writeln!(report, "mode: {mode}");
    let _ = writeln!(report, "window radius {window}, section dimension {}", rep.dimension);
    let tol = rep.epsilon + rep.pseudospectrum.as_ref().map_or(0.0, |p| p.resolution);
    let _ = writeln!(
        report,
        "sup over predicted set of distance to section spectrum: {:.6e} (tolerance {:e}, predicted-set resolution {:e}): {}",
        rep.max_distance,
        tol,
        ess.set.resolution,
        if rep.contained { "contained" } else { "NOT contained" }
    );
    let _ = writeln!(
        report,
        "section eigenvalues outside the predicted set (discrete or boundary candidates): {}",
        rep.outliers.len()
    );
    for z in rep.outliers.iter().take(LIST_CAP) {
        let _ = writeln!(report, "  {:.6}{:+.6}i (distance {:.3e})", z.re, z.im, ess.set.distance_to(*z));
    }
    if rep.outliers.len() > LIST_CAP {
        let _ = writeln!(report, "  ... {} more (see eigenvalues.csv)", rep.outliers.len() - LIST_CAP);
    }
    let _ = writeln!(report, "caveat: {}", rep.caveat);
    spectrum_section(&ess, &mut report);
    let mut resolutions = spectrum_resolutions(&ess);
    resolutions.insert("epsilon".into(), rep.epsilon);
    resolutions.insert("max_distance".into(), rep.max_distance);
    if let Some(p) = &rep.pseudospectrum {
        resolutions.insert("pseudospectrum".into(), p.resolution);
    }
    let failed = rep.mode == CrosscheckMode::Decisive && !rep.contained;
    Ok(Done {
        exit_code: if failed { 3 } else { 0 },
        report,
        resolutions,
    })
}

fn verify_task(task: Task, r: VerifyReport, dir: &mut ArtifactDir) -> Result<Done> {
    let name = if task == Task::VerifyAlgebra { "verify-algebra.json" } else { "verify-fourier.json" };
    dir.write_json(name, &r)?;
    let mut report = String::new();
    let _ = writeln!(report, "seed {}, window radius {}, margin {}", r.seed, r.window_radius, r.margin);
    for c in &r.checks {
        let _ = writeln!(
            report,
            "  {}: max residual {:.3e} over {} instance(s), tolerance {:e}: {}",
            c.name,
            c.residual,
            c.instances,
            c.tolerance,
            if c.passed { "pass" } else { "FAIL" }
        );
    }
    let resolutions = r.checks.iter().map(|c| (c.name.clone(), c.residual)).collect();
    Ok(Done {
        exit_code: if r.passed() { 0 } else { 3 },
        report,
        resolutions,
    })
}

//! Probes: computable escaping sequences standing in for corona points, the
//! limit data they induce, and sufficient families per algebra class.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{czero, CoefficientSymbol, SoGenerator};
use crate::error::{Error, Result};
use crate::group::{Element, FactorKind, GroupSpec};
use crate::numeric::{lcm, Dd, TWO_PI};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeOptions {
    /// Samples per probe.
    pub samples: usize,
    /// Samples entering the Cauchy test.
    pub tail: usize,
    pub cauchy_tol: f64,
    /// Plain probes use `x_k ≈ escape_scale · k²`.
    pub escape_scale: f64,
    /// Phase probes search square roots starting near this value.
    pub phase_start: f64,
    /// Accepted phase error of a phase-probe sample.
    pub phase_tol: f64,
    /// Phase grid size for continuum cluster sets.
    pub cluster_grid: usize,
    /// Cap on residue probes emitted for periodic coefficients.
    pub max_residues: usize,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            samples: 64,
            tail: 8,
            cauchy_tol: 1e-9,
            escape_scale: 1e8,
            phase_start: 3e7,
            phase_tol: 1e-10,
            cluster_grid: 4096,
            max_residues: 4096,
        }
    }
}

/// Escaping sequence: along one integer coordinate of one factor, with a
/// fixed residue offset, optionally pinned to a square-root phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub factor: usize,
    /// Global integer coordinate that escapes.
    pub coordinate: usize,
    pub sign: i64,
    pub phase: Option<f64>,
    /// Offset added to every sample (all integer coordinates).
    pub residue: Vec<i64>,
    /// Escape distances are multiples of this (lcm of the periods).
    pub step: i64,
}

/// 2⁵³: beyond this integers stop being exact doubles.
const EXACT_INT: i128 = 1 << 53;

impl Probe {
    /// Sample points `x_1, …, x_K`.
    pub fn points(&self, g: &GroupSpec, opts: &ProbeOptions) -> Result<Vec<Element>> {
        let dists = match self.phase {
            None => (1..=opts.samples as i64)
                .map(|k| {
                    let raw = (k * k) as f64 * opts.escape_scale;
                    (raw / self.step as f64).ceil() as i64 * self.step
                })
                .collect(),
            Some(theta) => self.phase_distances(theta, opts)?,
        };
        let base = Element::new(self.residue.clone(), g.identity().idx);
        Ok(dists
            .into_iter()
            .map(|s| {
                let mut e = base.clone();
                e.ints[self.coordinate] += self.sign * s;
                e
            })
            .collect())
    }

    /// Integers `n` (multiples of `step`) with `√n` within `phase_tol` of
    /// `θ + 2πm` for increasing `m`.
    fn phase_distances(&self, theta: f64, opts: &ProbeOptions) -> Result<Vec<i64>> {
        let mut m = ((opts.phase_start - theta) / TWO_PI.hi).ceil().max(1.0);
        let mut out = Vec::with_capacity(opts.samples);
        let budget = opts.samples as u64 * 200_000 * self.step as u64;
        let step = self.step as i128;
        for _ in 0..budget {
            let t = TWO_PI.mul_f64(m).add(Dd::new(theta));
            let u = t.mul(t).round_i128();
            let n = ((u + step / 2).div_euclid(step)) * step;
            if n >= EXACT_INT {
                break;
            }
            let err = Dd::sqrt_int(n as u128).sub(t).to_f64().abs();
            if err <= opts.phase_tol {
                out.push(n as i64);
                if out.len() == opts.samples {
                    return Ok(out);
                }
            }
            m += 1.0;
        }
        Err(Error::DivergentProbe {
            probe: format!("phase {theta}"),
            leaf: "square-root phase search".into(),
            spread: f64::NAN,
            tolerance: opts.phase_tol,
        })
    }

    pub fn label(&self, grid: usize) -> String {
        let dir = if self.sign > 0 { "+" } else { "-" };
        let mut s = format!("factor {} x{}{dir}inf", self.factor, self.coordinate);
        if let Some(p) = self.phase {
            let j = (p / std::f64::consts::TAU * grid as f64).round() as usize;
            s.push_str(&format!(" phase {j}/{grid}"));
        }
        if self.residue.iter().any(|&r| r != 0) {
            s.push_str(&format!(" residue {:?}", self.residue));
        }
        s
    }
}

/// Verified limit of one slowly oscillating leaf along a probe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeafLimit {
    pub generator: SoGenerator,
    pub factor: usize,
    #[serde(with = "crate::numeric::cx")]
    pub value: Complex64,
    /// Spread of the Cauchy tail.
    pub spread: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiOrbitSpec {
    pub label: String,
    pub probe: Probe,
    /// Probes sharing a class id lie on the same quasi-orbit.
    pub class_id: usize,
    pub limits: Vec<LeafLimit>,
}

/// Cauchy test on the tail of a sample sequence; returns the analytic value
/// when the tail is tight and agrees with it.
fn cauchy(values: &[f64], analytic: f64, opts: &ProbeOptions, probe: &str, leaf: &str) -> Result<(f64, f64)> {
    let tail = &values[values.len().saturating_sub(opts.tail)..];
    let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = hi - lo;
    let last = *tail.last().expect("probe has samples");
    if spread <= opts.cauchy_tol && (last - analytic).abs() <= opts.cauchy_tol {
        Ok((analytic, spread))
    } else {
        Err(Error::DivergentProbe {
            probe: probe.into(),
            leaf: leaf.into(),
            spread: if spread <= opts.cauchy_tol { (last - analytic).abs() } else { spread },
            tolerance: opts.cauchy_tol,
        })
    }
}

fn leaf_name(gen: &SoGenerator, factor: usize) -> String {
    format!("{} on factor {factor}", serde_json::to_string(gen).unwrap_or_default())
}

impl QuasiOrbitSpec {
    pub fn new(
        probe: Probe,
        class_id: usize,
        leaves: &[(SoGenerator, usize)],
        g: &GroupSpec,
        opts: &ProbeOptions,
    ) -> Result<Self> {
        let label = probe.label(opts.cluster_grid);
        let own: Vec<_> = leaves.iter().filter(|(_, f)| *f == probe.factor).copied().collect();
        let limits = if own.is_empty() {
            Vec::new()
        } else {
            let pts = probe.points(g, opts)?;
            own.iter()
                .map(|&(gen, factor)| sample_limit(&probe, &pts, gen, factor, g, opts, &label))
                .collect::<Result<Vec<_>>>()?
        };
        Ok(Self {
            label,
            probe,
            class_id,
            limits,
        })
    }

    /// Limit of a leaf on the escaping factor; cached or freshly sampled.
    pub fn leaf_limit(&self, gen: &SoGenerator, factor: usize, g: &GroupSpec, opts: &ProbeOptions) -> Result<Complex64> {
        if let Some(l) = self.limits.iter().find(|l| l.generator == *gen && l.factor == factor) {
            return Ok(l.value);
        }
        let pts = self.probe.points(g, opts)?;
        Ok(sample_limit(&self.probe, &pts, *gen, factor, g, opts, &self.label)?.value)
    }

    /// Re-samples every stored limit; returns the largest deviation.
    pub fn recheck(&self, g: &GroupSpec, opts: &ProbeOptions) -> Result<f64> {
        if self.limits.is_empty() {
            return Ok(0.0);
        }
        let pts = self.probe.points(g, opts)?;
        let mut worst: f64 = 0.0;
        for l in &self.limits {
            let r = g.factors()[l.factor].int_range();
            let last = l.generator.eval(&pts.last().expect("samples").ints[r]);
            worst = worst.max((last - l.value.re).abs());
        }
        Ok(worst)
    }
}

fn sample_limit(
    probe: &Probe,
    pts: &[Element],
    gen: SoGenerator,
    factor: usize,
    g: &GroupSpec,
    opts: &ProbeOptions,
    label: &str,
) -> Result<LeafLimit> {
    let r = g.factors()[factor].int_range();
    let vals: Vec<f64> = pts.iter().map(|p| gen.eval(&p.ints[r.clone()])).collect();
    let analytic = gen.analytic_limit(probe.sign, probe.phase);
    let (v, spread) = cauchy(&vals, analytic, opts, label, &leaf_name(&gen, factor))?;
    Ok(LeafLimit {
        generator: gen,
        factor,
        value: Complex64::new(v, 0.0),
        spread,
    })
}

/// Replaces leaves by their limits along an escape of `factor` with the
/// given residue; `leaf` supplies limits of slowly oscillating leaves on
/// the escaping factor.
pub(crate) fn limit_tree(
    a: &CoefficientSymbol,
    g: &GroupSpec,
    factor: usize,
    residue: &[i64],
    leaf: &mut dyn FnMut(&SoGenerator, usize) -> Result<Complex64>,
) -> Result<CoefficientSymbol> {
    use CoefficientSymbol::*;
    Ok(match a {
        Constant { .. } => a.clone(),
        Vanishing { .. } => CoefficientSymbol::Constant { value: czero() },
        SlowlyOscillating { generator, factor: f } => {
            if *f == factor {
                CoefficientSymbol::Constant {
                    value: leaf(generator, *f)?,
                }
            } else {
                a.clone()
            }
        }
        // a^ω(q) = lim a(q·x_k) = a(q + residue) since escapes are multiples of the period
        Periodic { .. } => {
            if residue.iter().all(|&r| r == 0) {
                a.clone()
            } else {
                let shift = Element::new(residue.iter().map(|r| -r).collect(), g.identity().idx);
                a.translate(g, &shift)
            }
        }
        Translate { by, child } => Translate {
            by: by.clone(),
            child: Box::new(limit_tree(child, g, factor, residue, leaf)?),
        },
        Sum { children } => Sum {
            children: children
                .iter()
                .map(|c| limit_tree(c, g, factor, residue, leaf))
                .collect::<Result<_>>()?,
        },
        Product { children } => Product {
            children: children
                .iter()
                .map(|c| limit_tree(c, g, factor, residue, leaf))
                .collect::<Result<_>>()?,
        },
        Scale { lambda, child } => Scale {
            lambda: *lambda,
            child: Box::new(limit_tree(child, g, factor, residue, leaf)?),
        },
    })
}

/// The coefficient `q ↦ ã(ϑ_q(ω))` for the corona point probed by `q`.
pub fn asymptotic_coefficient(
    a: &CoefficientSymbol,
    q: &QuasiOrbitSpec,
    g: &GroupSpec,
    opts: &ProbeOptions,
) -> Result<CoefficientSymbol> {
    let mut leaf = |gen: &SoGenerator, f: usize| q.leaf_limit(gen, f, g, opts);
    Ok(limit_tree(a, g, q.probe.factor, &q.probe.residue, &mut leaf)?.simplify(g))
}

pub fn sufficient_family(a: &CoefficientSymbol, g: &GroupSpec, opts: &ProbeOptions) -> Result<Vec<QuasiOrbitSpec>> {
    sufficient_family_for(&[a], g, opts)
}

/// Structure shared by probe families and cluster-set scans.
pub(crate) struct Escapes {
    pub leaves: Vec<(SoGenerator, usize)>,
    /// `(factor, coordinate, signs, uses_phase)` per escaping factor.
    pub factors: Vec<(usize, usize, Vec<i64>, bool)>,
    pub periods: Vec<i64>,
    pub has_periodic: bool,
}

pub(crate) fn escapes(coeffs: &[&CoefficientSymbol], g: &GroupSpec) -> Result<Escapes> {
    for c in coeffs {
        c.validate(g)?;
    }
    let mut leaves: Vec<(SoGenerator, usize)> = Vec::new();
    for c in coeffs {
        for l in c.so_leaves() {
            if !leaves.contains(&l) {
                leaves.push(l);
            }
        }
    }
    let infinite: Vec<usize> = (0..g.factors().len()).filter(|&i| g.factors()[i].is_infinite()).collect();
    let mut so_factors: Vec<usize> = leaves.iter().map(|l| l.1).collect();
    so_factors.sort_unstable();
    so_factors.dedup();
    if !leaves.is_empty() && (so_factors.len() > 1 || infinite.len() > 1) {
        let f = so_factors[0];
        let subtree = coeffs
            .iter()
            .find(|c| c.so_leaves().iter().any(|l| l.1 == f))
            .map(|c| c.key())
            .unwrap_or_default();
        return Err(Error::UnsupportedAlgebraPattern {
            reason: "slowly oscillating leaves need the group to have exactly one infinite factor".into(),
            subtree,
        });
    }
    let mut periods = vec![1i64; g.int_dim()];
    let mut has_periodic = false;
    for c in coeffs {
        for p in c.periods() {
            has_periodic = true;
            for (acc, v) in periods.iter_mut().zip(p) {
                *acc = lcm(*acc, v);
            }
        }
    }
    let escaping = if leaves.is_empty() { infinite } else { so_factors };
    let factors = escaping
        .into_iter()
        .map(|f| {
            let fac = &g.factors()[f];
            let d = match fac.kind {
                FactorKind::Zn(d) => d,
                FactorKind::Finite(_) => 0,
            };
            let own = leaves.iter().filter(|l| l.1 == f);
            let signed = d == 1
                && own.clone().any(|(gen, _)| {
                    matches!(
                        gen,
                        SoGenerator::Arctan {
                            mode: super::ArctanMode::Signed,
                            ..
                        }
                    )
                });
            let phase = own.clone().any(|(gen, _)| gen.uses_sqrt_phase());
            let signs = if signed { vec![1, -1] } else { vec![1] };
            (f, fac.int_offset, signs, phase)
        })
        .collect();
    Ok(Escapes {
        leaves,
        factors,
        periods,
        has_periodic,
    })
}

/// Probes whose quasi-orbits cover the corona of the algebra generated by
/// `coeffs`. Slowly oscillating leaves give one probe per cluster value
/// (per sign and grid phase); periodic-only algebras give one probe per
/// residue, all flagged as the same quasi-orbit; products of groups give
/// one family per infinite factor. Finite groups have an empty corona.
pub fn sufficient_family_for(
    coeffs: &[&CoefficientSymbol],
    g: &GroupSpec,
    opts: &ProbeOptions,
) -> Result<Vec<QuasiOrbitSpec>> {
    let esc = escapes(coeffs, g)?;
    if g.is_finite() {
        return Ok(Vec::new());
    }
    let residues: Vec<Vec<i64>> = if esc.has_periodic && esc.leaves.is_empty() {
        let total: i128 = esc.periods.iter().map(|&p| p as i128).product();
        if total > opts.max_residues as i128 {
            return Err(Error::IncommensurablePeriods(format!(
                "{total} residue classes exceed the cap of {}",
                opts.max_residues
            )));
        }
        let mut out = vec![vec![]];
        for &p in &esc.periods {
            out = out
                .into_iter()
                .flat_map(|r: Vec<i64>| {
                    (0..p).map(move |v| {
                        let mut r = r.clone();
                        r.push(v);
                        r
                    })
                })
                .collect();
        }
        out
    } else {
        vec![vec![0; g.int_dim()]]
    };
    let mut jobs = Vec::new();
    let mut class_id = 0;
    for (f, coord, signs, phase) in &esc.factors {
        let step = esc.periods[*coord];
        let phases: Vec<Option<f64>> = if *phase {
            (0..opts.cluster_grid)
                .map(|j| Some(std::f64::consts::TAU * j as f64 / opts.cluster_grid as f64))
                .collect()
        } else {
            vec![None]
        };
        for &sign in signs {
            for ph in &phases {
                for r in &residues {
                    jobs.push((
                        Probe {
                            factor: *f,
                            coordinate: *coord,
                            sign,
                            phase: *ph,
                            residue: r.clone(),
                            step,
                        },
                        class_id,
                    ));
                }
                class_id += 1;
            }
        }
    }
    jobs.into_par_iter()
        .map(|(p, c)| QuasiOrbitSpec::new(p, c, &esc.leaves, g, opts))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::ArctanMode;
    use crate::group::s3;
    use std::f64::consts::FRAC_PI_2;

    fn z1() -> GroupSpec {
        GroupSpec::zn(1).unwrap()
    }
    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }
    fn small() -> ProbeOptions {
        ProbeOptions {
            cluster_grid: 16,
            ..ProbeOptions::default()
        }
    }

    #[test]
    fn vanishing_dies() {
        let g = z1();
        let v = CoefficientSymbol::support(vec![(Element::zn([0]), re(10.0))]);
        let fam = sufficient_family(&v, &g, &small()).unwrap();
        assert_eq!(fam.len(), 1);
        assert_eq!(asymptotic_coefficient(&v, &fam[0], &g, &small()).unwrap(), CoefficientSymbol::constant(0.0));
    }

    #[test]
    fn arctan_two_probes() {
        let g = z1();
        let a = CoefficientSymbol::arctan(1.0);
        let fam = sufficient_family(&a, &g, &small()).unwrap();
        assert_eq!(fam.len(), 2);
        let mut lims: Vec<f64> = fam
            .iter()
            .map(|q| asymptotic_coefficient(&a, q, &g, &small()).unwrap().as_constant().unwrap().re)
            .collect();
        lims.sort_by(f64::total_cmp);
        assert_eq!(lims, vec![-FRAC_PI_2, FRAC_PI_2]);
        // Independent check of the sampled tail.
        let pts = fam[0].probe.points(&g, &small()).unwrap();
        let last = (pts.last().unwrap().ints[0] as f64).atan();
        assert!((last - FRAC_PI_2).abs() < 1e-9);
        for q in &fam {
            assert!(q.recheck(&g, &small()).unwrap() < 1e-9);
        }
    }

    #[test]
    fn periodic_times_arctan() {
        let g = z1();
        let p = CoefficientSymbol::periodic(vec![2], vec![re(1.0), re(-1.0)]);
        let a = CoefficientSymbol::product(vec![p.clone(), CoefficientSymbol::arctan(1.0)]);
        let fam = sufficient_family(&a, &g, &small()).unwrap();
        let plus = fam.iter().find(|q| q.probe.sign == 1).unwrap();
        assert_eq!(plus.probe.residue, vec![0]);
        let lim = asymptotic_coefficient(&a, plus, &g, &small()).unwrap();
        let expect = CoefficientSymbol::product(vec![p, CoefficientSymbol::constant(FRAC_PI_2)]).simplify(&g);
        assert_eq!(lim, expect);
    }

    #[test]
    fn periodic_residues_are_translates() {
        let g = z1();
        let p = CoefficientSymbol::periodic(vec![3], vec![re(1.0), re(4.0), re(-2.0)]);
        let fam = sufficient_family(&p, &g, &small()).unwrap();
        assert_eq!(fam.len(), 3);
        assert!(fam.iter().all(|q| q.class_id == fam[0].class_id));
        let l0 = asymptotic_coefficient(&p, &fam[0], &g, &small()).unwrap();
        for q in &fam {
            let l = asymptotic_coefficient(&p, q, &g, &small()).unwrap();
            let r = q.probe.residue[0];
            for n in -6..6 {
                assert_eq!(l.evaluate(&g, &Element::zn([n])), l0.evaluate(&g, &Element::zn([n + r])));
            }
        }
    }

    #[test]
    fn constant_has_trivial_family() {
        let g = z1();
        let fam = sufficient_family(&CoefficientSymbol::constant(2.0), &g, &small()).unwrap();
        assert_eq!(fam.len(), 1);
        let fin = GroupSpec::finite(s3());
        assert!(sufficient_family(&CoefficientSymbol::constant(2.0), &fin, &small()).unwrap().is_empty());
    }

    #[test]
    fn sqrt_phase_probes_converge() {
        let g = z1();
        let a = CoefficientSymbol::sum(vec![CoefficientSymbol::constant(2.0), CoefficientSymbol::sin_sqrt()]);
        let fam = sufficient_family(&a, &g, &small()).unwrap();
        assert_eq!(fam.len(), 16);
        for q in &fam {
            let theta = q.probe.phase.unwrap();
            let lim = asymptotic_coefficient(&a, q, &g, &small()).unwrap().as_constant().unwrap();
            assert!((lim.re - (2.0 + theta.sin())).abs() < 1e-15);
            // The sampled tail agrees in plain double arithmetic too.
            let pts = q.probe.points(&g, &small()).unwrap();
            let n = pts.last().unwrap().ints[0] as f64;
            assert!((n.sqrt().sin() - theta.sin()).abs() < 1e-7);
        }
    }

    #[test]
    fn plain_probe_diverges_on_sqrt_leaf() {
        let g = z1();
        let probe = Probe {
            factor: 0,
            coordinate: 0,
            sign: 1,
            phase: None,
            residue: vec![0],
            step: 1,
        };
        let r = QuasiOrbitSpec::new(probe, 0, &[(SoGenerator::SinSqrt, 0)], &g, &small());
        assert!(matches!(r, Err(Error::DivergentProbe { .. })));
    }

    #[test]
    fn radial_arctan_on_plane() {
        let g = GroupSpec::zn(2).unwrap();
        let a = CoefficientSymbol::so(
            SoGenerator::Arctan {
                scale: 5.0,
                mode: ArctanMode::Radial,
            },
            0,
        );
        let fam = sufficient_family(&a, &g, &small()).unwrap();
        assert_eq!(fam.len(), 1);
        let l = asymptotic_coefficient(&a, &fam[0], &g, &small()).unwrap();
        assert_eq!(l, CoefficientSymbol::constant(FRAC_PI_2));
    }

    #[test]
    fn two_infinite_factors() {
        let g = GroupSpec::product(vec![z1(), z1()]).unwrap();
        let p = CoefficientSymbol::periodic(vec![2, 1], vec![re(1.0), re(-1.0)]);
        let fam = sufficient_family(&p, &g, &small()).unwrap();
        // Two families (one per factor), two residues each.
        assert_eq!(fam.len(), 4);
        let a = CoefficientSymbol::arctan(1.0);
        assert!(matches!(
            sufficient_family(&a, &g, &small()),
            Err(Error::UnsupportedAlgebraPattern { .. })
        ));
    }
}

//! Cluster sets (asymptotic ranges) of slowly oscillating coefficients,
//! computed from catalog limit metadata rather than from probes.

use num_complex::Complex64;

use super::probe::{escapes, limit_tree, ProbeOptions};
use super::CoefficientSymbol;
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::spectra::SpectralSet;

/// Limit value of `a` along an escape with the given sign and phase, using
/// closed-form leaf limits.
fn analytic_value(a: &CoefficientSymbol, g: &GroupSpec, factor: usize, sign: i64, phase: Option<f64>) -> Result<Complex64> {
    let zero = vec![0; g.int_dim()];
    let mut leaf = |gen: &super::SoGenerator, _f: usize| Ok(Complex64::new(gen.analytic_limit(sign, phase), 0.0));
    let lim = limit_tree(a, g, factor, &zero, &mut leaf)?.simplify(g);
    lim.as_constant()
        .ok_or_else(|| Error::NotSlowlyOscillating(format!("limit is not constant: {}", lim.key())))
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`.
fn golden_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}

/// The set of limit values of a slowly oscillating coefficient at infinity.
///
/// Square-root leaves sweep their phase over the circle, so a real-valued
/// coefficient yields exact interval components; the extremes are located on
/// a grid of `cluster_grid` phases and refined. The tagged resolution is the
/// phase Lipschitz constant times half the grid step.
pub fn cluster_range(a: &CoefficientSymbol, g: &GroupSpec, opts: &ProbeOptions) -> Result<SpectralSet> {
    a.validate(g)?;
    if !a.class().is_slowly_oscillating() {
        return Err(Error::NotSlowlyOscillating(a.key()));
    }
    let esc = escapes(&[a], g)?;
    if g.is_finite() {
        return Ok(SpectralSet::empty());
    }
    let m = opts.cluster_grid.max(1);
    let h = std::f64::consts::TAU / m as f64;
    let lip = a.phase_lipschitz();
    let mut parts = Vec::new();
    for (factor, _, signs, phase) in &esc.factors {
        for &sign in signs {
            if !*phase {
                parts.push(SpectralSet::point(analytic_value(a, g, *factor, sign, None)?));
                continue;
            }
            let vals = (0..m)
                .map(|j| analytic_value(a, g, *factor, sign, Some(j as f64 * h)))
                .collect::<Result<Vec<_>>>()?;
            let scale = vals.iter().map(|v| v.norm()).fold(1.0, f64::max);
            let resolution = lip * h / 2.0;
            if vals.iter().all(|v| v.im.abs() <= 1e-14 * scale) {
                let f = |t: f64| analytic_value(a, g, *factor, sign, Some(t)).map(|v| v.re).unwrap_or(f64::NAN);
                let neg = |t: f64| -f(t);
                let (jmax, _) = vals
                    .iter()
                    .enumerate()
                    .max_by(|x, y| x.1.re.total_cmp(&y.1.re))
                    .expect("grid is non-empty");
                let (jmin, _) = vals
                    .iter()
                    .enumerate()
                    .min_by(|x, y| x.1.re.total_cmp(&y.1.re))
                    .expect("grid is non-empty");
                let around = |j: usize| ((j as f64 - 1.0) * h, (j as f64 + 1.0) * h);
                let (a0, a1) = around(jmax);
                let hi = golden_max(&f, a0, a1).max(vals[jmax].re);
                let (b0, b1) = around(jmin);
                let lo = (-golden_max(&neg, b0, b1)).min(vals[jmin].re);
                parts.push(SpectralSet::interval(lo, hi, resolution));
            } else {
                parts.push(SpectralSet::from_points(vals, resolution));
            }
        }
    }
    Ok(SpectralSet::union_all(&parts))
}

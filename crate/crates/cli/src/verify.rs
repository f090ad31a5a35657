//! Residual checks of the algebra and Fourier identities on seeded random
//! instances.

use crate::error::Result;
use corona_core::coeff::CoefficientSymbol;
use corona_core::fourier::{fourier, inverse_fourier, op_quantize, partial_fourier, plancherel_norm, DualData};
use corona_core::group::{Element, GroupSpec};
use corona_core::opalg::{diamond, involution, schrodinger_matrix, KernelSymbol, Profile, Term};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub instances: usize,
    /// Largest absolute residual over the instances.
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, instances: usize, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            instances,
            residual,
            tolerance,
            passed: residual < tolerance,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub group: String,
    pub seed: u64,
    pub window_radius: usize,
    pub margin: usize,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn worst(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }
}

fn cx(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Random finitely supported function with integer part in `[-r, r]ⁿ`.
pub fn random_profile(rng: &mut ChaCha8Rng, g: &GroupSpec, r: i64) -> Profile {
    let n = g.finite_order();
    Profile::from_pairs((0..rng.random_range(1..6)).map(|_| {
        let ints = (0..g.int_dim()).map(|_| rng.random_range(-r..=r)).collect();
        (Element::new(ints, g.finite_from_flat(rng.random_range(0..n))), cx(rng))
    }))
}

/// Random kernel with constant or periodic coefficients (period 2 on each
/// integer coordinate, tabulated over the finite part as well).
pub fn random_kernel(rng: &mut ChaCha8Rng, g: &GroupSpec, r: i64) -> KernelSymbol {
    let cells = 2usize.pow(g.int_dim() as u32) * g.finite_order();
    KernelSymbol::new(
        (0..rng.random_range(1..4))
            .map(|_| Term {
                coeff: if rng.random_bool(0.3) {
                    CoefficientSymbol::constant(cx(rng))
                } else {
                    CoefficientSymbol::periodic(vec![2; g.int_dim()], (0..cells).map(|_| cx(rng)).collect())
                },
                profile: random_profile(rng, g, r),
            })
            .collect(),
    )
}

/// `Sch(Φ⋄Ψ) = Sch Φ · Sch Ψ`, `Sch(Φ^⋄) = Sch(Φ)*` and `(Φ^⋄)^⋄ = Φ` for the
/// given kernel against itself and against `samples` random partners.
pub fn verify_algebra(
    phi: &KernelSymbol,
    g: &GroupSpec,
    window: usize,
    margin: Option<usize>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (window, partner_radius) = if g.is_finite() { (0, 0) } else { (window, 3) };
    // Products with Φ itself reach twice its radius.
    let need = if g.is_finite() { 0 } else { phi.radius() + phi.radius().max(partner_radius as usize) };
    let margin = margin.unwrap_or(need).max(need);
    let sch = |k: &KernelSymbol| schrodinger_matrix(k, g, window, margin);
    let a = sch(phi)?;
    let star = involution(phi, g)?;
    let adj = sch(&star)?.interior_max_diff(&a.adjoint());
    let back = sch(&involution(&star, g)?)?.interior_max_diff(&a);

    let mut prod: f64 = 0.0;
    let mut partners = vec![phi.clone(), star.clone()];
    partners.extend((0..samples).map(|_| random_kernel(&mut rng, g, partner_radius)));
    for psi in &partners {
        let lhs = sch(&diamond(phi, psi, g)?)?;
        prod = prod.max(lhs.interior_max_diff(&a.mul(&sch(psi)?)));
    }
    Ok(VerifyReport {
        group: g.describe(),
        seed,
        window_radius: window,
        margin,
        checks: vec![
            Check::new("sch_product", partners.len(), prod, tol),
            Check::new("sch_involution", 1, adj, tol),
            Check::new("involution_twice", 1, back, tol),
        ],
    })
}

/// Plancherel identity, inversion, the convolution law and the commuting
/// triangle `op_quantize ∘ partial_fourier = schrodinger_matrix`.
pub fn verify_fourier(
    phi: Option<&KernelSymbol>,
    g: &GroupSpec,
    window: usize,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dual = DualData::for_group(g)?;
    dual.check(g)?;
    let (mut planch, mut inv, mut conv): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..samples {
        let u = random_profile(&mut rng, g, 3);
        let v = random_profile(&mut rng, g, 3);
        let fu = fourier(g, &dual, &u)?;
        let l2: f64 = u.iter().map(|(_, z)| z.norm_sqr()).sum();
        planch = planch.max((plancherel_norm(&dual, &fu) - l2).abs());
        let back = inverse_fourier(g, &dual, &fu)?;
        for (x, z) in u.iter() {
            inv = inv.max((back.get(x) - z).norm());
        }
        let lhs = fourier(g, &dual, &u.convolve(&v, g))?;
        conv = conv.max(lhs.max_diff(&fourier(g, &dual, &v)?.mul(&fu)));
    }
    let window = if g.is_finite() { 0 } else { window };
    let kernels: Vec<KernelSymbol> = match phi {
        Some(k) => vec![k.clone()],
        None => (0..samples.min(10)).map(|_| random_kernel(&mut rng, g, 2)).collect(),
    };
    let mut tri: f64 = 0.0;
    let mut margin = 0;
    for k in &kernels {
        let m = if g.is_finite() { 0 } else { k.radius() };
        margin = margin.max(m);
        let field = partial_fourier(k, g, &dual)?;
        let q = op_quantize(&field, g, &dual, window, m)?;
        tri = tri.max(q.interior_max_diff(&schrodinger_matrix(k, g, window, m)?));
    }
    Ok(VerifyReport {
        group: g.describe(),
        seed,
        window_radius: window,
        margin,
        checks: vec![
            Check::new("plancherel", samples, planch, tol),
            Check::new("inversion", samples, inv, tol),
            Check::new("convolution_law", samples, conv, tol),
            Check::new("commuting_triangle", kernels.len(), tri, tol),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use corona_core::group::catalog;

    #[test]
    fn identities_hold_on_s3_and_integers() {
        let s3 = GroupSpec::finite(catalog("S3").unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let phi = random_kernel(&mut rng, &s3, 0);
        assert!(verify_algebra(&phi, &s3, 0, None, 10, 2, 1e-10).unwrap().passed());
        assert!(verify_fourier(None, &s3, 0, 20, 3, 1e-10).unwrap().passed());
        let z = GroupSpec::zn(1).unwrap();
        let phi = random_kernel(&mut rng, &z, 2);
        let r = verify_algebra(&phi, &z, 8, None, 10, 4, 1e-10).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(verify_fourier(Some(&phi), &z, 8, 10, 5, 1e-10).unwrap().passed());
    }

    #[test]
    fn tiny_tolerance_fails() {
        let z = GroupSpec::zn(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let phi = random_kernel(&mut rng, &z, 2);
        let r = verify_fourier(Some(&phi), &z, 8, 10, 5, 1e-300).unwrap();
        assert!(!r.passed());
    }
}

#![allow(dead_code)]

use corona_core::coeff::CoefficientSymbol;
use corona_core::group::{Element, GroupSpec};
use corona_core::opalg::{KernelSymbol, Profile, Term};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn cx(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
}

pub fn lap() -> Profile {
    Profile::from_pairs([(Element::zn([1]), re(1.0)), (Element::zn([-1]), re(1.0))])
}

/// Random coefficient on ℤ drawn from every class the algebra supports.
pub fn coeff_z(rng: &mut ChaCha8Rng, depth: usize) -> CoefficientSymbol {
    let pick = rng.random_range(0..if depth == 0 { 5 } else { 7 });
    match pick {
        0 => CoefficientSymbol::constant(cx(rng)),
        1 => {
            let p = rng.random_range(1..4);
            CoefficientSymbol::periodic(vec![p], (0..p).map(|_| cx(rng)).collect())
        }
        2 => CoefficientSymbol::sin_sqrt().scaled(cx(rng)),
        3 => CoefficientSymbol::arctan(rng.random_range(0.5..3.0)),
        4 => CoefficientSymbol::support(
            (0..rng.random_range(1..4))
                .map(|_| (Element::zn([rng.random_range(-5..6)]), cx(rng)))
                .collect(),
        ),
        5 => CoefficientSymbol::sum(vec![coeff_z(rng, depth - 1), coeff_z(rng, depth - 1)]),
        _ => CoefficientSymbol::product(vec![coeff_z(rng, depth - 1), coeff_z(rng, depth - 1)])
            .translated(Element::zn([rng.random_range(-4..5)])),
    }
}

pub fn profile_z(rng: &mut ChaCha8Rng, radius: i64) -> Profile {
    Profile::from_pairs((0..rng.random_range(1..5)).map(|_| (Element::zn([rng.random_range(-radius..=radius)]), cx(rng))))
}

/// Band kernel on ℤ with support radius at most `radius`.
pub fn kernel_z(rng: &mut ChaCha8Rng, radius: i64) -> KernelSymbol {
    KernelSymbol::new(
        (0..rng.random_range(1..4))
            .map(|_| Term {
                coeff: coeff_z(rng, 1),
                profile: profile_z(rng, radius),
            })
            .collect(),
    )
}

/// Kernel on a finite group with tabulated coefficients.
pub fn kernel_finite(rng: &mut ChaCha8Rng, g: &GroupSpec) -> KernelSymbol {
    let n = g.finite_order();
    KernelSymbol::new(
        (0..rng.random_range(1..4))
            .map(|_| Term {
                coeff: if rng.random_bool(0.3) {
                    CoefficientSymbol::constant(cx(rng))
                } else {
                    CoefficientSymbol::periodic(vec![], (0..n).map(|_| cx(rng)).collect())
                },
                profile: Profile::from_pairs(
                    (0..rng.random_range(1..5)).map(|_| (Element::new(vec![], g.finite_from_flat(rng.random_range(0..n))), cx(rng))),
                ),
            })
            .collect(),
    )
}

pub fn random_profile(rng: &mut ChaCha8Rng, g: &GroupSpec, radius: i64) -> Profile {
    let n = g.finite_order();
    Profile::from_pairs((0..rng.random_range(1..7)).map(|_| {
        let ints = (0..g.int_dim()).map(|_| rng.random_range(-radius..=radius)).collect();
        (Element::new(ints, g.finite_from_flat(rng.random_range(0..n))), cx(rng))
    }))
}

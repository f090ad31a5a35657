//! Invariance properties of essential spectra and spectral sets.

mod common;

use common::*;
use corona_core::coeff::CoefficientSymbol;
use corona_core::group::{Element, GroupSpec};
use corona_core::opalg::{KernelSymbol, Profile, Term};
use corona_core::spectra::{essential_spectrum, scaling_formula, sum_formula, SpectraOptions, SpectralSet};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn opts() -> SpectraOptions {
    let mut o = SpectraOptions::default();
    o.dual_grid = 512;
    o.probe.cluster_grid = 256;
    o
}

fn ess_or_skip(phi: &KernelSymbol, g: &GroupSpec) -> Option<corona_core::spectra::EssentialSpectrum> {
    essential_spectrum(phi, g, &opts()).ok()
}

fn random_set(rng: &mut ChaCha8Rng) -> SpectralSet {
    let pts: Vec<Complex64> = (0..rng.random_range(1..6)).map(|_| cx(rng)).collect();
    let lo = rng.random_range(-3.0..0.0);
    SpectralSet::from_points(pts, 0.0).union(&SpectralSet::interval(lo, lo + rng.random_range(0.0..2.0), 0.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn compact_perturbation_leaves_spectrum_unchanged(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = GroupSpec::zn(1).unwrap();
        let phi = kernel_z(&mut rng, 2);
        let Some(base) = ess_or_skip(&phi, &g) else { return Ok(()); };
        let bump = CoefficientSymbol::support(
            (0..3).map(|_| (Element::zn([rng.random_range(-6..7)]), cx(&mut rng))).collect(),
        );
        let perturbed = phi.clone().plus(KernelSymbol::term(bump, profile_z(&mut rng, 2)));
        let other = essential_spectrum(&perturbed, &g, &opts()).unwrap();
        prop_assert_eq!(base.set, other.set);
    }

    #[test]
    fn translating_coefficients_preserves_spectrum(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = GroupSpec::zn(1).unwrap();
        let phi = kernel_z(&mut rng, 2);
        let Some(base) = ess_or_skip(&phi, &g) else { return Ok(()); };
        let y = Element::zn([rng.random_range(-9..10)]);
        let moved = KernelSymbol::new(
            phi.terms
                .iter()
                .map(|t| Term { coeff: t.coeff.translate(&g, &y), profile: t.profile.clone() })
                .collect(),
        );
        let other = essential_spectrum(&moved, &g, &opts()).unwrap();
        let tol = base.set.resolution + other.set.resolution + base.discretization + other.discretization + 1e-9;
        prop_assert!(base.set.hausdorff_distance(&other.set) <= tol);
    }

    #[test]
    fn self_adjoint_kernels_have_real_spectrum(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = GroupSpec::zn(1).unwrap();
        // Real periodic or slowly oscillating diagonal plus a symmetric hop.
        let diag = match rng.random_range(0..3) {
            0 => CoefficientSymbol::periodic(vec![3], (0..3).map(|_| re(rng.random_range(-2.0..2.0))).collect()),
            1 => CoefficientSymbol::sin_sqrt(),
            _ => CoefficientSymbol::arctan(rng.random_range(0.5..2.0)),
        };
        let c = cx(&mut rng);
        let hop = Profile::from_pairs([(Element::zn([1]), c), (Element::zn([-1]), c.conj())]);
        let phi = KernelSymbol::term(diag, Profile::delta(Element::zn([0])))
            .plus(KernelSymbol::convolution(hop));
        prop_assert!(phi.is_symbolically_self_adjoint(&g).unwrap());
        let ess = essential_spectrum(&phi, &g, &opts()).unwrap();
        prop_assert!(ess.set.is_real());
        for r in &ess.records {
            prop_assert!(r.bounding_box.is_none_or(|b| b.2 == 0.0 && b.3 == 0.0));
        }
    }

    #[test]
    fn hausdorff_is_a_symmetric_metric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (random_set(&mut rng), random_set(&mut rng), random_set(&mut rng));
        // Densification error is bounded by the documented slack.
        let slack = 1e-3 * (1.0 + a.max_abs() + b.max_abs() + c.max_abs());
        prop_assert!(a.hausdorff_distance(&a) <= slack);
        let ab = a.hausdorff_distance(&b);
        prop_assert!((ab - b.hausdorff_distance(&a)).abs() <= slack);
        prop_assert!(ab <= a.hausdorff_distance(&c) + c.hausdorff_distance(&b) + slack);
        prop_assert!(a.directed_distance(&b) <= ab + slack);
    }

    #[test]
    fn scale_and_shift_act_pointwise(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_set(&mut rng);
        let lam = cx(&mut rng);
        let w = cx(&mut rng);
        let scaled = a.scale(lam);
        let shifted = a.shift(w);
        for z in a.densify(0.05) {
            prop_assert!(scaled.distance_to(lam * z) <= scaled.resolution + 1e-9 * (1.0 + lam.norm() * z.norm()));
            prop_assert!(shifted.distance_to(z + w) <= shifted.resolution + 1e-9 * (1.0 + z.norm() + w.norm()));
        }
        let sum = a.minkowski_sum(&SpectralSet::point(w));
        prop_assert!(sum.hausdorff_distance(&shifted) <= sum.resolution + shifted.resolution + 1e-9 * (1.0 + a.max_abs() + w.norm()));
    }

    #[test]
    fn scaled_and_summed_families_agree_with_direct_computation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = GroupSpec::zn(1).unwrap();
        let a = match rng.random_range(0..2) {
            0 => CoefficientSymbol::arctan(rng.random_range(0.5..2.0)),
            _ => CoefficientSymbol::sin_sqrt().scaled(cx(&mut rng)),
        };
        let phi = profile_z(&mut rng, 2);
        let o = opts();
        let prod = KernelSymbol::term(a.clone(), phi.clone());
        let direct = essential_spectrum(&prod, &g, &o).unwrap();
        let formula = scaling_formula(&a, &phi, &g, &o).unwrap();
        let tol = direct.set.resolution + formula.resolution + direct.discretization + 1e-9;
        prop_assert!(direct.set.hausdorff_distance(&formula) <= tol, "{} > {}", direct.set.hausdorff_distance(&formula), tol);

        let sum = KernelSymbol::term(a.clone(), Profile::delta(Element::zn([0])))
            .plus(KernelSymbol::convolution(phi.clone()));
        let direct = essential_spectrum(&sum, &g, &o).unwrap();
        let formula = sum_formula(&a, &phi, &g, &o).unwrap();
        let tol = direct.set.resolution + formula.resolution + direct.discretization + 1e-9;
        prop_assert!(direct.set.hausdorff_distance(&formula) <= tol);
    }
}

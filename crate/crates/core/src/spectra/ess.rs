//! Spectra of limit operators, essential-spectrum assembly over a
//! sufficient family, Fredholm certificates and truncation cross-checks.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eigen::{eig_dense, eig_matrix, pseudospectrum, symmetrizable_tridiagonal, Region};
use super::SpectralSet;
use crate::coeff::{cluster_range, sufficient_family_for, CoefficientSymbol, LeafLimit, Probe, ProbeOptions};
use crate::error::{Error, Result};
use crate::fourier::{conv_symbol_range, CLOUD_CAP};
use crate::group::{Element, GroupSpec};
use crate::numeric::lcm;
use crate::opalg::{limit_kernel, schrodinger_matrix, KernelSymbol, Profile};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectraOptions {
    pub probe: ProbeOptions,
    /// Torus grid points per dimension for symbol ranges and Bloch scans.
    pub dual_grid: usize,
    /// Cap on the number of Bloch blocks solved per spectrum.
    pub bloch_cap: usize,
    /// Cap on the Bloch cell size.
    pub max_cell: usize,
    /// Relative level below which a distance counts as zero.
    pub noise: f64,
    /// Pseudospectrum lattice points per axis.
    pub pseudo_grid: usize,
}

impl Default for SpectraOptions {
    fn default() -> Self {
        Self {
            probe: ProbeOptions::default(),
            dual_grid: 4096,
            bloch_cap: 1 << 20,
            max_cell: 4096,
            noise: 1e-9,
            pseudo_grid: 256,
        }
    }
}

/// True when `a` is built from constants and periodic tables only.
fn is_periodic_type(a: &CoefficientSymbol) -> bool {
    let mut ok = true;
    a.visit(&mut |n| {
        if matches!(
            n,
            CoefficientSymbol::Vanishing { .. } | CoefficientSymbol::SlowlyOscillating { .. }
        ) {
            ok = false;
        }
    });
    ok
}

fn check_limit_kernel(k: &KernelSymbol) -> Result<()> {
    match k.terms.iter().find(|t| !is_periodic_type(&t.coeff)) {
        Some(t) => Err(Error::UnsupportedLimitKernel(t.coeff.key())),
        None => Ok(()),
    }
}

/// Spectrum of a limit operator with constant or periodic coefficients.
pub fn asymptotic_spectrum(phi: &KernelSymbol, g: &GroupSpec, opts: &SpectraOptions) -> Result<SpectralSet> {
    let k = phi.normalize(g)?;
    if k.is_zero() {
        return Ok(SpectralSet::point(Complex64::new(0.0, 0.0)));
    }
    check_limit_kernel(&k)?;
    let constant = k.terms.len() == 1 && k.terms[0].coeff == CoefficientSymbol::one();
    if constant && g.is_abelian() {
        return conv_symbol_range(&k.terms[0].profile, g, opts.dual_grid);
    }
    bloch_spectrum(&k, g, opts)
}

/// One entry of the Bloch block: `B(θ)[row, col] += value · e^{iθ·m}`.
struct BlochEntry {
    row: usize,
    col: usize,
    m: Vec<i64>,
    value: Complex64,
}

/// Floquet–Bloch reduction of a periodic limit operator on `ℤⁿ × F` to
/// blocks over one period cell, scanned over a torus grid.
///
/// Self-adjoint operators give one interval per band with resolution `L·h`,
/// where `L` bounds `‖∂B/∂θ‖`; normal blocks give a certified cloud; other
/// blocks give an uncertified cloud (infinite resolution).
pub fn bloch_spectrum(phi: &KernelSymbol, g: &GroupSpec, opts: &SpectraOptions) -> Result<SpectralSet> {
    let k = phi.normalize(g)?;
    if k.is_zero() {
        return Ok(SpectralSet::point(Complex64::new(0.0, 0.0)));
    }
    check_limit_kernel(&k)?;
    let n = g.int_dim();
    let mut period = vec![1i64; n];
    for t in &k.terms {
        for p in t.coeff.periods() {
            for (acc, v) in period.iter_mut().zip(p) {
                *acc = lcm(*acc, v);
            }
        }
    }
    let fo = g.finite_order();
    let cells_z: i128 = period.iter().map(|&p| p as i128).product();
    let size = cells_z * fo as i128;
    if size > opts.max_cell as i128 {
        return Err(Error::IncommensurablePeriods(format!(
            "Bloch cell of {size} sites exceeds the cap of {}",
            opts.max_cell
        )));
    }
    let size = size as usize;
    let cell_of = |ints: &[i64]| -> (usize, Vec<i64>) {
        let mut idx = 0usize;
        let mut m = Vec::with_capacity(n);
        for (&x, &p) in ints.iter().zip(&period) {
            let r = x.rem_euclid(p);
            idx = idx * p as usize + r as usize;
            m.push((x - r) / p);
        }
        (idx, m)
    };
    let cells: Vec<Element> = (0..size)
        .map(|c| {
            let (mut rest, f) = (c / fo, c % fo);
            let mut ints = vec![0i64; n];
            for i in (0..n).rev() {
                ints[i] = (rest % period[i] as usize) as i64;
                rest /= period[i] as usize;
            }
            Element::new(ints, g.finite_from_flat(f))
        })
        .collect();
    let mut entries = Vec::new();
    let mut row_l = vec![0.0; size];
    let mut col_l = vec![0.0; size];
    for (row, q) in cells.iter().enumerate() {
        for t in &k.terms {
            let a = t.coeff.evaluate(g, q);
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (x, v) in t.profile.iter() {
                let y = g.mul(&g.inv(x), q);
                let (zc, m) = cell_of(&y.ints);
                let col = zc * fo + g.finite_flat_index(&y.idx);
                let value = a * v;
                let w = m.iter().map(|c| c.unsigned_abs() as f64).sum::<f64>() * value.norm();
                row_l[row] += w;
                col_l[col] += w;
                entries.push(BlochEntry { row, col, m, value });
            }
        }
    }
    let lip = row_l.iter().chain(&col_l).copied().fold(0.0, f64::max);
    let per_dim = if n == 0 {
        1
    } else {
        let mut m = opts.dual_grid.max(1);
        while (m as f64).powi(n as i32) > opts.bloch_cap as f64 && m > 1 {
            m -= 1;
        }
        m
    };
    let h = std::f64::consts::TAU / per_dim as f64;
    let total = per_dim.pow(n as u32);
    let scale = entries.iter().map(|e| e.value.norm()).sum::<f64>().max(f64::MIN_POSITIVE);
    let block = |flat: usize| -> nalgebra::DMatrix<Complex64> {
        let mut theta = vec![0.0; n];
        let mut r = flat;
        for slot in theta.iter_mut().rev() {
            *slot = (r % per_dim) as f64 * h;
            r /= per_dim;
        }
        let mut b = nalgebra::DMatrix::zeros(size, size);
        for e in &entries {
            let ph: f64 = e.m.iter().zip(&theta).map(|(a, t)| *a as f64 * t).sum();
            b[(e.row, e.col)] += e.value * Complex64::from_polar(1.0, ph);
        }
        b
    };
    struct Solved {
        eig: Vec<Complex64>,
        hermitian: bool,
        normal: bool,
    }
    let solved: Vec<Solved> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let b = block(flat);
            let adj = b.adjoint();
            let tol = 1e-13 * scale;
            let hermitian = (&b - &adj).iter().all(|z| z.norm() <= tol);
            let normal = hermitian || (&b * &adj - &adj * &b).iter().all(|z| z.norm() <= tol * scale);
            let eig = eig_matrix(b, hermitian)?;
            Ok(Solved { eig, hermitian, normal })
        })
        .collect::<Result<_>>()?;
    if n == 0 {
        let s = &solved[0];
        let pts = if s.hermitian {
            s.eig.iter().map(|z| Complex64::new(z.re, 0.0)).collect()
        } else {
            s.eig.clone()
        };
        return Ok(SpectralSet::from_points(pts, 0.0));
    }
    let resolution = lip * h;
    if solved.iter().all(|s| s.hermitian) {
        let mut bands = vec![(f64::INFINITY, f64::NEG_INFINITY); size];
        for s in &solved {
            let mut ev: Vec<f64> = s.eig.iter().map(|z| z.re).collect();
            ev.sort_by(f64::total_cmp);
            for (b, v) in bands.iter_mut().zip(ev) {
                b.0 = b.0.min(v);
                b.1 = b.1.max(v);
            }
        }
        return Ok(SpectralSet::from_intervals(bands, resolution));
    }
    let certified = solved.iter().all(|s| s.normal);
    let pts: Vec<Complex64> = solved.into_iter().flat_map(|s| s.eig).collect();
    let mut s = SpectralSet::from_points(pts, if certified { resolution } else { f64::INFINITY });
    if s.points.len() > CLOUD_CAP {
        s.compact(resolution.max(1e-12) / 2.0);
    }
    Ok(s)
}

/// Provenance of one quasi-orbit in the assembled union.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuasiOrbitRecord {
    pub label: String,
    pub class_id: usize,
    pub probe: Probe,
    pub leaf_limits: Vec<LeafLimit>,
    pub limit_kernel: KernelSymbol,
    /// Bounding box `(re_min, re_max, im_min, im_max)` of the limit spectrum.
    pub bounding_box: Option<(f64, f64, f64, f64)>,
    pub intervals: usize,
    pub points: usize,
    pub circles: usize,
    pub resolution: f64,
    pub distance_to_zero: f64,
    #[serde(with = "opt_cx")]
    pub nearest_to_zero: Option<Complex64>,
}

mod opt_cx {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Complex64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(|z| [z.re, z.im]).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Complex64>, D::Error> {
        Ok(Option::<[f64; 2]>::deserialize(d)?.map(|[a, b]| Complex64::new(a, b)))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EssentialSpectrum {
    pub set: SpectralSet,
    pub records: Vec<QuasiOrbitRecord>,
    /// Largest resolution among the limit spectra.
    pub component_resolution: f64,
    /// Hausdorff bound for the phase grid standing in for a continuum of
    /// quasi-orbits (zero when the family is exact).
    pub discretization: f64,
}

/// Scalar-normalized form of a kernel: `(key, c)` with `k = c · K(key)`.
fn scalar_key(k: &KernelSymbol) -> Option<(String, Complex64, KernelSymbol)> {
    let pivot = *k.terms.first()?.profile.iter().next()?.1;
    let unit = KernelSymbol::new(
        k.terms
            .iter()
            .map(|t| crate::opalg::Term {
                coeff: t.coeff.clone(),
                profile: t.profile.scaled(1.0 / pivot),
            })
            .collect(),
    );
    Some((serde_json::to_string(&unit).ok()?, pivot, unit))
}

/// `sp_ess(Φ) = ∪_i sp(Φ^{ω_i})` over a sufficient family, with one record
/// per quasi-orbit.
pub fn essential_spectrum(phi: &KernelSymbol, g: &GroupSpec, opts: &SpectraOptions) -> Result<EssentialSpectrum> {
    phi.validate(g)?;
    let k = phi.normalize(g)?;
    if g.is_finite() {
        return Ok(EssentialSpectrum {
            set: SpectralSet::empty(),
            records: Vec::new(),
            component_resolution: 0.0,
            discretization: 0.0,
        });
    }
    let family = sufficient_family_for(&k.coefficients(), g, &opts.probe)?;
    // Probes of one class lie on one quasi-orbit and share a spectrum.
    let mut first_of_class: HashMap<usize, usize> = HashMap::new();
    for (i, q) in family.iter().enumerate() {
        first_of_class.entry(q.class_id).or_insert(i);
    }
    let limits: Vec<KernelSymbol> = family
        .par_iter()
        .map(|q| limit_kernel(&k, q, g, &opts.probe))
        .collect::<Result<_>>()?;
    let mut reps: Vec<usize> = first_of_class.values().copied().collect();
    reps.sort_unstable();
    // Limit kernels that are scalar multiples of each other share a computation.
    let mut unique: HashMap<String, KernelSymbol> = HashMap::new();
    let mut rep_key: HashMap<usize, (String, Complex64)> = HashMap::new();
    for &i in &reps {
        match scalar_key(&limits[i]) {
            Some((key, c, unit)) => {
                unique.entry(key.clone()).or_insert(unit);
                rep_key.insert(i, (key, c));
            }
            None => {
                rep_key.insert(i, (String::new(), Complex64::new(1.0, 0.0)));
            }
        }
    }
    let mut keys: Vec<&String> = unique.keys().collect();
    keys.sort();
    let computed: HashMap<String, SpectralSet> = keys
        .par_iter()
        .map(|key| Ok(((*key).clone(), asymptotic_spectrum(&unique[*key], g, opts)?)))
        .collect::<Result<_>>()?;
    let zero = SpectralSet::point(Complex64::new(0.0, 0.0));
    let spectrum_of = |i: usize| -> SpectralSet {
        let (key, c) = &rep_key[&i];
        match computed.get(key) {
            Some(s) => s.scale(*c),
            None => zero.clone(),
        }
    };
    let rep_sets: HashMap<usize, SpectralSet> = reps.par_iter().map(|&i| (i, spectrum_of(i))).collect();

    let uses_phase = family.iter().any(|q| q.probe.phase.is_some());
    let discretization = if uses_phase {
        let normal = k.is_symbolically_self_adjoint(g)?
            || (g.is_abelian() && limits.iter().all(|l| l.terms.len() <= 1 && l.terms.iter().all(|t| t.coeff == CoefficientSymbol::one())));
        if normal {
            let m = opts.probe.cluster_grid.max(1) as f64;
            k.terms
                .iter()
                .map(|t| t.coeff.phase_lipschitz() * t.profile.l1())
                .sum::<f64>()
                * std::f64::consts::PI
                / m
        } else {
            f64::INFINITY
        }
    } else {
        0.0
    };

    let records: Vec<QuasiOrbitRecord> = family
        .iter()
        .zip(&limits)
        .map(|(q, lim)| {
            let s = &rep_sets[&first_of_class[&q.class_id]];
            let origin = Complex64::new(0.0, 0.0);
            QuasiOrbitRecord {
                label: q.label.clone(),
                class_id: q.class_id,
                probe: q.probe.clone(),
                leaf_limits: q.limits.clone(),
                limit_kernel: lim.clone(),
                bounding_box: s.bounding_box(),
                intervals: s.intervals.len(),
                points: s.points.len(),
                circles: s.circles.len(),
                resolution: s.resolution,
                distance_to_zero: s.distance_to(origin),
                nearest_to_zero: s.nearest_point(origin),
            }
        })
        .collect();
    let mut parts: Vec<&SpectralSet> = rep_sets.values().collect();
    parts.sort_by(|a, b| a.bounding_box().partial_cmp(&b.bounding_box()).unwrap_or(std::cmp::Ordering::Equal));
    let mut set = SpectralSet::union_all(parts.iter().copied());
    let component_resolution = set.resolution;
    if set.points.len() > CLOUD_CAP {
        let cell = (set.max_abs() * 1e-4).max(component_resolution);
        set.compact(cell);
    }
    set.resolution += discretization;
    Ok(EssentialSpectrum {
        set,
        records,
        component_resolution,
        discretization,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Fredholm,
    NotFredholm,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessStatus {
    Invertible,
    NotInvertible,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Witness {
    pub quasiorbit: String,
    pub class_id: usize,
    pub status: WitnessStatus,
    pub distance_to_zero: f64,
    /// Margin the distance must exceed: limit-spectrum resolution plus the
    /// family discretization bound.
    pub margin: f64,
    /// `dist(0, sp) − margin` when invertible.
    pub lower_bound: Option<f64>,
    #[serde(with = "opt_cx")]
    pub violation_point: Option<Complex64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FredholmCertificate {
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub noise: f64,
}

/// Fredholm decision: every limit operator must be invertible, decided by
/// `0 ∉ sp(Φ^ω)` with a margin above the certified resolution.
pub fn is_fredholm(phi: &KernelSymbol, g: &GroupSpec, opts: &SpectraOptions) -> Result<FredholmCertificate> {
    let ess = essential_spectrum(phi, g, opts)?;
    Ok(certificate_from(&ess, phi.l1_majorant(), opts))
}

pub fn certificate_from(ess: &EssentialSpectrum, scale: f64, opts: &SpectraOptions) -> FredholmCertificate {
    let noise = opts.noise * scale.max(1.0);
    let witnesses: Vec<Witness> = ess
        .records
        .iter()
        .map(|r| {
            let d = r.distance_to_zero;
            let margin = r.resolution + ess.discretization;
            let status = if d > margin + noise {
                WitnessStatus::Invertible
            } else if d <= noise {
                WitnessStatus::NotInvertible
            } else {
                WitnessStatus::Inconclusive
            };
            Witness {
                quasiorbit: r.label.clone(),
                class_id: r.class_id,
                status,
                distance_to_zero: d,
                margin,
                lower_bound: (status == WitnessStatus::Invertible).then(|| d - margin),
                violation_point: if status == WitnessStatus::NotInvertible {
                    r.nearest_to_zero
                } else {
                    None
                },
            }
        })
        .collect();
    let verdict = if witnesses.iter().any(|w| w.status == WitnessStatus::NotInvertible) {
        Verdict::NotFredholm
    } else if witnesses.iter().any(|w| w.status == WitnessStatus::Inconclusive) {
        Verdict::Inconclusive
    } else {
        Verdict::Fredholm
    };
    FredholmCertificate {
        verdict,
        witnesses,
        noise,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrosscheckMode {
    /// Real-symmetrizable truncation: eigenvalues are decisive.
    Decisive,
    /// Non-normal truncation: pseudospectrum comparison, informational only.
    Advisory,
}

pub const FINITE_SECTION_CAVEAT: &str = "finite sections of band operators can carry eigenvalues outside the \
essential spectrum (discrete eigenvalues or boundary effects); they are listed as candidates and never treated as errors";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub mode: CrosscheckMode,
    pub window_radius: usize,
    pub dimension: usize,
    pub epsilon: f64,
    pub predicted: SpectralSet,
    /// `sup_{z ∈ predicted} dist(z, truncation cloud)`.
    pub max_distance: f64,
    pub contained: bool,
    pub outliers: Vec<Complex64>,
    pub eigenvalues: Vec<Complex64>,
    pub pseudospectrum: Option<SpectralSet>,
    pub caveat: String,
}

/// Compares the predicted essential spectrum with the spectrum of the
/// section on the window of the given radius.
pub fn truncation_crosscheck(
    phi: &KernelSymbol,
    g: &GroupSpec,
    radius: usize,
    eps: f64,
    opts: &SpectraOptions,
) -> Result<CrosscheckReport> {
    let ess = essential_spectrum(phi, g, opts)?;
    crosscheck_against(phi, g, radius, eps, &ess.set, opts)
}

pub fn crosscheck_against(
    phi: &KernelSymbol,
    g: &GroupSpec,
    radius: usize,
    eps: f64,
    predicted: &SpectralSet,
    opts: &SpectraOptions,
) -> Result<CrosscheckReport> {
    if !(eps > 0.0) {
        return Err(Error::Invalid(format!("epsilon must be positive, got {eps}")));
    }
    let margin = if g.is_finite() { 0 } else { phi.radius() };
    let m = schrodinger_matrix(phi, g, radius, margin)?.compress();
    // A tridiagonal section with positive products is diagonally similar to
    // a real symmetric one; zero products (e.g. Jordan blocks) do not count.
    let similar_to_symmetric =
        symmetrizable_tridiagonal(&m).is_some_and(|(_, e)| e.iter().all(|&x| x > 0.0));
    let decisive = m.hermitian || phi.is_symbolically_self_adjoint(g)? || similar_to_symmetric;
    let eigenvalues = eig_dense(&m)?;
    let cloud = SpectralSet::from_points(eigenvalues.clone(), 0.0);
    let outside = |z: &Complex64| predicted.distance_to(*z) > predicted.resolution + eps.min(predicted.resolution.max(1e-9));
    let (max_distance, pseudo) = match decisive {
        true => (predicted.directed_distance(&cloud), None),
        false => {
            let mut pts = eigenvalues.clone();
            if let Some((a, b, c, d)) = predicted.bounding_box() {
                pts.extend([Complex64::new(a, c), Complex64::new(b, d)]);
            }
            let region = Region::padded(&pts, 2.0 * eps);
            let ps = pseudospectrum(&m, eps, region, opts.pseudo_grid)?;
            let d = predicted.directed_distance(&ps);
            (d, Some(ps))
        }
    };
    let outliers: Vec<Complex64> = eigenvalues.iter().filter(|z| outside(z)).copied().collect();
    let tol = match &pseudo {
        Some(ps) => eps + ps.resolution,
        None => eps,
    };
    Ok(CrosscheckReport {
        mode: if decisive { CrosscheckMode::Decisive } else { CrosscheckMode::Advisory },
        window_radius: radius,
        dimension: m.dim(),
        epsilon: eps,
        predicted: predicted.clone(),
        max_distance,
        contained: max_distance <= tol,
        outliers,
        eigenvalues,
        pseudospectrum: pseudo,
        caveat: FINITE_SECTION_CAVEAT.into(),
    })
}

/// `ess(a ⊗ φ) = cluster(a) · sp(Conv φ)` for slowly oscillating `a`.
pub fn scaling_formula(a: &CoefficientSymbol, phi: &Profile, g: &GroupSpec, opts: &SpectraOptions) -> Result<SpectralSet> {
    Ok(cluster_range(a, g, &opts.probe)?.product(&conv_symbol_range(phi, g, opts.dual_grid)?))
}

/// `ess(1 ⊗ φ + a ⊗ δ_e) = sp(Conv φ) + cluster(a)` for slowly oscillating `a`.
pub fn sum_formula(a: &CoefficientSymbol, phi: &Profile, g: &GroupSpec, opts: &SpectraOptions) -> Result<SpectralSet> {
    Ok(conv_symbol_range(phi, g, opts.dual_grid)?.minkowski_sum(&cluster_range(a, g, &opts.probe)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::s3;
    use std::f64::consts::FRAC_PI_2;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }
    fn z1() -> GroupSpec {
        GroupSpec::zn(1).unwrap()
    }
    fn lap() -> Profile {
        Profile::from_pairs([(Element::zn([1]), re(1.0)), (Element::zn([-1]), re(1.0))])
    }
    fn small() -> SpectraOptions {
        SpectraOptions {
            probe: ProbeOptions {
                cluster_grid: 256,
                ..ProbeOptions::default()
            },
            dual_grid: 1024,
            ..SpectraOptions::default()
        }
    }

    #[test]
    fn identity_and_scaled_laplacian() {
        let g = z1();
        let o = small();
        let s = asymptotic_spectrum(&KernelSymbol::identity(&g), &g, &o).unwrap();
        assert_eq!(s, SpectralSet::point(re(1.0)));
        let s = asymptotic_spectrum(&KernelSymbol::convolution(lap().scaled(re(1.5))), &g, &o).unwrap();
        assert_eq!(s.intervals, vec![(-3.0, 3.0)]);
    }

    fn dimer(lambda: f64) -> KernelSymbol {
        KernelSymbol::convolution(lap()).plus(KernelSymbol::term(
            CoefficientSymbol::periodic(vec![2], vec![re(lambda), re(-lambda)]),
            Profile::delta(Element::zn([0])),
        ))
    }

    #[test]
    fn dimer_bands() {
        let g = z1();
        let o = small();
        let lam: f64 = 0.7;
        let s = asymptotic_spectrum(&dimer(lam), &g, &o).unwrap();
        let top = (lam * lam + 4.0).sqrt();
        let expect = SpectralSet::from_intervals(vec![(-top, -lam), (lam, top)], 0.0);
        assert!(s.hausdorff_distance(&expect) <= s.resolution);
        assert!(s.hausdorff_distance(&expect) < 1e-9);
        // Brute-force θ-grid of the 2×2 closed form ±√(λ² + 4cos²θ).
        let brute: Vec<Complex64> = (0..2000)
            .flat_map(|j| {
                let th = std::f64::consts::PI * j as f64 / 1999.0;
                let v = (lam * lam + 4.0 * th.cos().powi(2)).sqrt();
                [re(v), re(-v)]
            })
            .collect();
        assert!(SpectralSet::from_points(brute, 0.0).hausdorff_distance(&s) < 2e-3);
    }

    #[test]
    fn folding_invariance() {
        // Free Laplacian written with a period-2 coefficient of constant value.
        let g = z1();
        let o = small();
        let folded = KernelSymbol::term(CoefficientSymbol::periodic(vec![2], vec![re(1.0), re(1.0)]), lap());
        let k = folded.normalize(&g).unwrap();
        assert_eq!(k, KernelSymbol::convolution(lap()));
        let raw = KernelSymbol::term(
            CoefficientSymbol::sum(vec![
                CoefficientSymbol::periodic(vec![2], vec![re(1.0), re(0.0)]),
                CoefficientSymbol::periodic(vec![2], vec![re(0.0), re(1.0)]),
            ]),
            lap(),
        );
        let s = bloch_spectrum(&raw, &g, &o).unwrap();
        assert!(s.hausdorff_distance(&SpectralSet::interval(-2.0, 2.0, 0.0)) <= s.resolution);
        let p1 = bloch_spectrum(&KernelSymbol::convolution(lap()), &g, &o).unwrap();
        assert!(p1.hausdorff_distance(&conv_symbol_range(&lap(), &g, o.dual_grid).unwrap()) <= p1.resolution);
    }

    #[test]
    fn nonabelian_constant_kernel_uses_blocks() {
        let g = GroupSpec::product(vec![z1(), GroupSpec::finite(s3())]).unwrap();
        let o = small();
        let phi = KernelSymbol::convolution(Profile::from_pairs([
            (Element::new(vec![1], vec![0]), re(1.0)),
            (Element::new(vec![-1], vec![0]), re(1.0)),
            (Element::new(vec![0], vec![3]), re(0.5)),
        ]));
        let s = asymptotic_spectrum(&phi, &g, &o).unwrap();
        // δ on an involution: its Cayley matrix has eigenvalues ±1, so the
        // spectrum is [−2,2] ± 0.5.
        let expect = SpectralSet::from_intervals(vec![(-2.5, 2.5)], 0.0);
        assert!(s.hausdorff_distance(&expect) <= s.resolution + 1e-12);
    }

    #[test]
    fn unsupported_limit_kernel() {
        let k = KernelSymbol::term(CoefficientSymbol::sin_sqrt(), lap());
        assert!(matches!(
            asymptotic_spectrum(&k, &z1(), &small()),
            Err(Error::UnsupportedLimitKernel(_))
        ));
    }

    #[test]
    fn incommensurable_cell() {
        let o = SpectraOptions {
            max_cell: 10,
            ..small()
        };
        let k = KernelSymbol::convolution(lap()).plus(KernelSymbol::term(
            CoefficientSymbol::periodic(vec![11], (0..11).map(|v| re(v as f64)).collect()),
            Profile::delta(Element::zn([0])),
        ));
        assert!(matches!(bloch_spectrum(&k, &z1(), &o), Err(Error::IncommensurablePeriods(_))));
    }

    #[test]
    fn compact_kernel_has_zero_spectrum() {
        let g = z1();
        let v = KernelSymbol::term(CoefficientSymbol::support(vec![(Element::zn([0]), re(10.0))]), lap());
        let e = essential_spectrum(&v, &g, &small()).unwrap();
        assert_eq!(e.set, SpectralSet::point(re(0.0)));
    }

    #[test]
    fn arctan_sum_two_probes() {
        let g = z1();
        let o = small();
        let a = CoefficientSymbol::arctan(1.0);
        let k = KernelSymbol::convolution(lap()).plus(KernelSymbol::term(a.clone(), Profile::delta(Element::zn([0]))));
        let e = essential_spectrum(&k, &g, &o).unwrap();
        assert_eq!(e.records.len(), 2);
        assert_eq!(e.discretization, 0.0);
        let expect = SpectralSet::from_intervals(vec![(-2.0 - FRAC_PI_2, 2.0 - FRAC_PI_2), (-2.0 + FRAC_PI_2, 2.0 + FRAC_PI_2)], 0.0);
        assert!(e.set.hausdorff_distance(&expect) <= e.set.resolution);
        let f = sum_formula(&a, &lap(), &g, &o).unwrap();
        assert!(e.set.hausdorff_distance(&f) <= e.set.resolution + f.resolution);
    }

    #[test]
    fn scaled_laplacian_family() {
        let g = z1();
        let o = small();
        let a = CoefficientSymbol::sum(vec![CoefficientSymbol::constant(2.0), CoefficientSymbol::sin_sqrt()]);
        let k = KernelSymbol::term(a.clone(), lap());
        let e = essential_spectrum(&k, &g, &o).unwrap();
        assert_eq!(e.records.len(), 256);
        assert!(e.discretization > 0.0 && e.discretization.is_finite());
        let f = scaling_formula(&a, &lap(), &g, &o).unwrap();
        assert!(e.set.hausdorff_distance(&SpectralSet::interval(-6.0, 6.0, 0.0)) <= e.set.resolution);
        assert!(e.set.hausdorff_distance(&f) <= e.set.resolution + f.resolution);
    }

    #[test]
    fn fredholm_examples() {
        let g = z1();
        let o = small();
        let id = is_fredholm(&KernelSymbol::identity(&g), &g, &o).unwrap();
        assert_eq!(id.verdict, Verdict::Fredholm);
        assert!(id.witnesses.iter().all(|w| w.status == WitnessStatus::Invertible));
        let l = is_fredholm(&KernelSymbol::convolution(lap()), &g, &o).unwrap();
        assert_eq!(l.verdict, Verdict::NotFredholm);
        assert_eq!(l.witnesses[0].violation_point, Some(re(0.0)));
        let a = CoefficientSymbol::sum(vec![CoefficientSymbol::constant(2.0), CoefficientSymbol::sin_sqrt()]);
        let k = KernelSymbol::term(a, Profile::delta(Element::zn([0])))
            .plus(KernelSymbol::convolution(Profile::delta(Element::zn([0])).scaled(re(5.0))));
        let c = is_fredholm(&k, &g, &o).unwrap();
        assert_eq!(c.verdict, Verdict::Fredholm);
        let e = essential_spectrum(&k, &g, &o).unwrap();
        assert!(e.set.hausdorff_distance(&SpectralSet::interval(6.0, 8.0, 0.0)) <= e.set.resolution);
        let near = KernelSymbol::convolution(lap())
            .plus(KernelSymbol::convolution(Profile::delta(Element::zn([0])).scaled(re(2.0 + 1e-4))));
        assert_eq!(is_fredholm(&near, &g, &o).unwrap().verdict, Verdict::Inconclusive);
        // Finite groups: every operator is Fredholm.
        let f = GroupSpec::finite(s3());
        let c = is_fredholm(&KernelSymbol::convolution(Profile::delta(Element::finite(1))), &f, &o).unwrap();
        assert_eq!(c.verdict, Verdict::Fredholm);
    }

    #[test]
    fn crosscheck_modes() {
        let g = z1();
        let o = small();
        let r = truncation_crosscheck(&KernelSymbol::identity(&g), &g, 20, 1e-6, &o).unwrap();
        assert_eq!(r.mode, CrosscheckMode::Decisive);
        assert!(r.contained && r.outliers.is_empty() && r.max_distance == 0.0);
        let r = truncation_crosscheck(&KernelSymbol::convolution(lap()), &g, 200, 2e-2, &o).unwrap();
        assert!(r.contained && r.max_distance < 1e-2);
        let v = KernelSymbol::convolution(lap()).plus(KernelSymbol::term(
            CoefficientSymbol::support(vec![(Element::zn([0]), re(10.0))]),
            Profile::delta(Element::zn([0])),
        ));
        let r = truncation_crosscheck(&v, &g, 200, 2e-2, &o).unwrap();
        assert_eq!(r.outliers.len(), 1);
        assert!((r.outliers[0].re - (100.0f64 + 4.0).sqrt()).abs() < 1e-9);
        // Non-normal: the shift goes to the pseudospectrum route.
        let s = KernelSymbol::convolution(Profile::delta(Element::zn([1])));
        let o2 = SpectraOptions { pseudo_grid: 48, ..o };
        let r = truncation_crosscheck(&s, &g, 30, 0.05, &o2).unwrap();
        assert_eq!(r.mode, CrosscheckMode::Advisory);
        assert!(r.pseudospectrum.is_some());
    }
}

//! Band kernels `Φ = Σ a_j ⊗ φ_j` with the crossed-product operations, their
//! Schrödinger matrices on truncation windows, and limit kernels.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coeff::{asymptotic_coefficient, CoefficientSymbol, ProbeOptions, QuasiOrbitSpec};
use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec, Window};

/// Default cap on the number of terms a kernel may carry.
pub const DEFAULT_TERM_CAP: usize = 10_000;

/// Finitely supported complex function on the group.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Profile(pub BTreeMap<Element, Complex64>);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileEntry {
    element: Element,
    re: f64,
    #[serde(default)]
    im: f64,
}

impl Serialize for Profile {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|(e, v)| ProfileEntry {
            element: e.clone(),
            re: v.re,
            im: v.im,
        }))
    }
}

impl<'de> Deserialize<'de> for Profile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<ProfileEntry>::deserialize(d)?;
        let mut p = Profile::default();
        for e in entries {
            p.add(e.element, Complex64::new(e.re, e.im));
        }
        Ok(p)
    }
}

impl Profile {
    pub fn delta(x: Element) -> Self {
        Self::from_pairs([(x, Complex64::new(1.0, 0.0))])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Element, Complex64)>) -> Self {
        let mut p = Profile::default();
        for (x, v) in pairs {
            p.add(x, v);
        }
        p
    }

    pub fn add(&mut self, x: Element, v: Complex64) {
        *self.0.entry(x).or_insert(Complex64::new(0.0, 0.0)) += v;
    }

    pub fn get(&self, x: &Element) -> Complex64 {
        self.0.get(x).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Element, &Complex64)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn prune(&mut self) {
        self.0.retain(|_, v| *v != Complex64::new(0.0, 0.0));
    }

    pub fn scaled(&self, c: Complex64) -> Profile {
        let mut p = Profile(self.0.iter().map(|(k, v)| (k.clone(), v * c)).collect());
        p.prune();
        p
    }

    /// `(u * v)(z) = Σ_x u(x) v(x⁻¹z)`.
    pub fn convolve(&self, other: &Profile, g: &GroupSpec) -> Profile {
        let mut p = Profile::default();
        for (x, a) in self.iter() {
            for (y, b) in other.iter() {
                p.add(g.mul(x, y), a * b);
            }
        }
        p.prune();
        p
    }

    /// Sup norm of the integer part over the support.
    pub fn radius(&self) -> usize {
        self.0.keys().map(|x| x.int_radius() as usize).max().unwrap_or(0)
    }

    pub fn l1(&self) -> f64 {
        self.0.values().map(|v| v.norm()).sum()
    }

    /// `Σ |x|₁ |φ(x)|`: Lipschitz bound of the Fourier transform on the torus.
    pub fn gradient_bound(&self) -> f64 {
        self.0.iter().map(|(x, v)| x.int_l1() as f64 * v.norm()).sum()
    }

    /// `φ(x⁻¹) = conj φ(x)` for all `x`.
    pub fn is_self_adjoint(&self, g: &GroupSpec) -> bool {
        self.0.iter().all(|(x, v)| (self.get(&g.inv(x)) - v.conj()).norm() <= 1e-14 * (1.0 + v.norm()))
    }

    pub fn validate(&self, g: &GroupSpec) -> Result<()> {
        for (x, v) in &self.0 {
            g.validate(x)?;
            if !v.is_finite() {
                return Err(Error::Invalid(format!("non-finite profile value at {x}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coeff: CoefficientSymbol,
    pub profile: Profile,
}

/// `Φ(q; x) = Σ_j a_j(q) φ_j(x)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KernelSymbol {
    pub terms: Vec<Term>,
}

impl KernelSymbol {
    pub fn new(terms: Vec<Term>) -> Self {
        Self { terms }
    }

    pub fn term(coeff: CoefficientSymbol, profile: Profile) -> Self {
        Self {
            terms: vec![Term { coeff, profile }],
        }
    }

    /// `1 ⊗ φ`.
    pub fn convolution(profile: Profile) -> Self {
        Self::term(CoefficientSymbol::one(), profile)
    }

    pub fn identity(g: &GroupSpec) -> Self {
        Self::convolution(Profile::delta(g.identity()))
    }

    pub fn plus(mut self, other: KernelSymbol) -> Self {
        self.terms.extend(other.terms);
        self
    }

    /// Validation of user input: non-empty, valid coefficients and profiles.
    pub fn validate(&self, g: &GroupSpec) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::EmptyKernel);
        }
        for t in &self.terms {
            t.coeff.validate(g)?;
            t.profile.validate(g)?;
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.profile.is_empty())
    }

    pub fn radius(&self) -> usize {
        self.terms.iter().map(|t| t.profile.radius()).max().unwrap_or(0)
    }

    /// `Σ_x sup_q |Φ(q;x)|` bounded termwise.
    pub fn l1_majorant(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.sup_bound() * t.profile.l1()).sum()
    }

    pub fn evaluate(&self, g: &GroupSpec, q: &Element, x: &Element) -> Complex64 {
        self.terms
            .iter()
            .map(|t| {
                let p = t.profile.get(x);
                if p == Complex64::new(0.0, 0.0) {
                    p
                } else {
                    t.coeff.evaluate(g, q) * p
                }
            })
            .sum()
    }

    /// Canonical form: coefficients simplified, scalars moved into profiles,
    /// terms with equal coefficients merged, zero terms dropped, sorted.
    pub fn normalize(&self, g: &GroupSpec) -> Result<KernelSymbol> {
        self.normalize_capped(g, DEFAULT_TERM_CAP)
    }

    pub fn normalize_capped(&self, g: &GroupSpec, cap: usize) -> Result<KernelSymbol> {
        let mut merged: BTreeMap<String, (CoefficientSymbol, Profile)> = BTreeMap::new();
        for t in &self.terms {
            let (coeff, c) = match t.coeff.simplify(g) {
                CoefficientSymbol::Constant { value } => (CoefficientSymbol::one(), value),
                CoefficientSymbol::Scale { lambda, child } => (*child, lambda),
                other => (other, Complex64::new(1.0, 0.0)),
            };
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let entry = merged
                .entry(coeff.key())
                .or_insert_with(|| (coeff, Profile::default()));
            for (x, v) in t.profile.iter() {
                entry.1.add(x.clone(), v * c);
            }
        }
        let terms: Vec<Term> = merged
            .into_values()
            .filter_map(|(coeff, mut profile)| {
                profile.prune();
                (!profile.is_empty()).then_some(Term { coeff, profile })
            })
            .collect();
        if terms.len() > cap {
            return Err(Error::TermCapExceeded {
                count: terms.len(),
                cap,
            });
        }
        Ok(KernelSymbol { terms })
    }

    /// True when `Φ = Φ^⋄` after normalization.
    pub fn is_symbolically_self_adjoint(&self, g: &GroupSpec) -> Result<bool> {
        let a = self.normalize(g)?;
        let b = involution(self, g)?;
        if a.terms.len() != b.terms.len() {
            return Ok(false);
        }
        Ok(a.terms.iter().zip(&b.terms).all(|(s, t)| {
            s.coeff == t.coeff
                && s.profile.len() == t.profile.len()
                && s.profile
                    .iter()
                    .all(|(x, v)| (t.profile.get(x) - v).norm() <= 1e-14 * (1.0 + v.norm()))
        }))
    }

    /// All coefficients, for family construction.
    pub fn coefficients(&self) -> Vec<&CoefficientSymbol> {
        self.terms.iter().map(|t| &t.coeff).collect()
    }
}

/// `(Φ⋄Ψ)(q;x) = Σ_y Φ(q;y) Ψ(y⁻¹q; y⁻¹x)`, expanded termwise into
/// `a_j·l_y(b_k) ⊗ φ_j(y)·ψ_k(y⁻¹·)`.
pub fn diamond(phi: &KernelSymbol, psi: &KernelSymbol, g: &GroupSpec) -> Result<KernelSymbol> {
    diamond_capped(phi, psi, g, DEFAULT_TERM_CAP)
}

pub fn diamond_capped(phi: &KernelSymbol, psi: &KernelSymbol, g: &GroupSpec, cap: usize) -> Result<KernelSymbol> {
    let mut terms = Vec::new();
    for a in &phi.terms {
        for (y, &py) in a.profile.iter() {
            for b in &psi.terms {
                let coeff = CoefficientSymbol::product(vec![a.coeff.clone(), b.coeff.translate(g, y)]);
                let profile = Profile::from_pairs(b.profile.iter().map(|(w, &v)| (g.mul(y, w), py * v)));
                terms.push(Term { coeff, profile });
            }
        }
        if terms.len() > cap.saturating_mul(64) {
            // Merge early so the intermediate list stays bounded.
            terms = KernelSymbol { terms }.normalize_capped(g, usize::MAX)?.terms;
        }
    }
    KernelSymbol { terms }.normalize_capped(g, cap)
}

/// `Φ^⋄(q;x) = Δ(x)⁻¹ conj Φ(x⁻¹q; x⁻¹)` with `Δ ≡ 1`.
pub fn involution(phi: &KernelSymbol, g: &GroupSpec) -> Result<KernelSymbol> {
    let mut terms = Vec::new();
    for t in &phi.terms {
        for (z, &v) in t.profile.iter() {
            let zinv = g.inv(z);
            let delta = 1.0 / g.modular_function(&zinv)?;
            terms.push(Term {
                coeff: t.coeff.translate(g, &zinv).conj(),
                profile: Profile::from_pairs([(zinv, v.conj() * delta)]),
            });
        }
    }
    KernelSymbol { terms }.normalize(g)
}

/// Termwise replacement `a_j ⊗ φ_j ↦ a_j^ω ⊗ φ_j`.
pub fn limit_kernel(
    phi: &KernelSymbol,
    q: &QuasiOrbitSpec,
    g: &GroupSpec,
    opts: &ProbeOptions,
) -> Result<KernelSymbol> {
    let terms = phi
        .terms
        .iter()
        .map(|t| {
            Ok(Term {
                coeff: asymptotic_coefficient(&t.coeff, q, g, opts)?,
                profile: t.profile.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    KernelSymbol { terms }.normalize(g)
}

/// Finite section of a band operator, stored by sparse rows over an
/// enlarged window; `interior` marks the rows and columns where products of
/// sections agree with the infinite operator.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub window: Vec<Element>,
    pub interior: Vec<usize>,
    pub rows: Vec<Vec<(usize, Complex64)>>,
    pub hermitian: bool,
}

fn merge_row(mut row: Vec<(usize, Complex64)>) -> Vec<(usize, Complex64)> {
    row.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, Complex64)> = Vec::with_capacity(row.len());
    for (j, v) in row {
        match out.last_mut() {
            Some(l) if l.0 == j => l.1 += v,
            _ => out.push((j, v)),
        }
    }
    out.retain(|e| e.1 != Complex64::new(0.0, 0.0));
    out
}

impl OperatorMatrix {
    pub fn from_rows(window: Vec<Element>, interior: Vec<usize>, rows: Vec<Vec<(usize, Complex64)>>) -> Self {
        let rows: Vec<_> = rows.into_iter().map(merge_row).collect();
        let mut m = Self {
            window,
            interior,
            rows,
            hermitian: false,
        };
        m.hermitian = m.hermitian_defect() < 1e-12;
        m
    }

    pub fn from_dense(window: Vec<Element>, d: &DMatrix<Complex64>) -> Self {
        let n = d.nrows();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| (j, d[(i, j)])).collect())
            .collect();
        Self::from_rows(window, (0..n).collect(), rows)
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let r = &self.rows[i];
        r.binary_search_by_key(&j, |e| e.0).map(|k| r[k].1).unwrap_or_default()
    }

    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                worst = worst.max((v - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut d = DMatrix::zeros(n, n);
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                d[(i, j)] = v;
            }
        }
        d
    }

    /// Compression to the interior, as a matrix whose window is the interior.
    pub fn compress(&self) -> OperatorMatrix {
        let mut pos = vec![usize::MAX; self.dim()];
        for (k, &i) in self.interior.iter().enumerate() {
            pos[i] = k;
        }
        let rows = self
            .interior
            .iter()
            .map(|&i| {
                self.rows[i]
                    .iter()
                    .filter(|e| pos[e.0] != usize::MAX)
                    .map(|&(j, v)| (pos[j], v))
                    .collect()
            })
            .collect();
        let window = self.interior.iter().map(|&i| self.window[i].clone()).collect();
        OperatorMatrix::from_rows(window, (0..self.interior.len()).collect(), rows)
    }

    pub fn adjoint(&self) -> OperatorMatrix {
        let mut rows = vec![Vec::new(); self.dim()];
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                rows[j].push((i, v.conj()));
            }
        }
        OperatorMatrix::from_rows(self.window.clone(), self.interior.clone(), rows)
    }

    /// Product over the common window.
    pub fn mul(&self, other: &OperatorMatrix) -> OperatorMatrix {
        let rows = self
            .rows
            .par_iter()
            .map(|r| {
                let mut acc: Vec<(usize, Complex64)> = Vec::new();
                for &(k, v) in r {
                    for &(j, w) in &other.rows[k] {
                        acc.push((j, v * w));
                    }
                }
                acc
            })
            .collect();
        OperatorMatrix::from_rows(self.window.clone(), self.interior.clone(), rows)
    }

    /// Largest entry of `self − other` on interior rows and columns.
    pub fn interior_max_diff(&self, other: &OperatorMatrix) -> f64 {
        let mut inside = vec![false; self.dim()];
        for &i in &self.interior {
            inside[i] = true;
        }
        let mut worst: f64 = 0.0;
        for &i in &self.interior {
            let (a, b) = (&self.rows[i], &other.rows[i]);
            for &(j, v) in a {
                if inside[j] {
                    worst = worst.max((v - other.get(i, j)).norm());
                }
            }
            for &(j, v) in b {
                if inside[j] {
                    worst = worst.max((v - self.get(i, j)).norm());
                }
            }
        }
        worst
    }

    /// True when every non-zero entry has `|i − j| ≤ 1`.
    pub fn is_tridiagonal(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, r)| r.iter().all(|e| e.0 + 1 >= i && e.0 <= i + 1))
    }

    pub fn max_abs(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| r.iter().map(|e| e.1.norm()))
            .fold(0.0, f64::max)
    }
}

/// Enlarged window of radius `radius + margin` with its interior.
pub(crate) fn build_window(g: &GroupSpec, radius: usize, margin: usize) -> Result<(Window, Vec<usize>)> {
    let elems = g.enumerate_window(radius + margin)?;
    let interior = elems
        .iter()
        .enumerate()
        .filter(|(_, e)| e.int_radius() as usize <= radius)
        .map(|(i, _)| i)
        .collect();
    Ok((Window::new(elems), interior))
}

/// `M[q, y] = Φ(q; q·y⁻¹)` over the window of radius `radius + margin`.
pub fn schrodinger_matrix(phi: &KernelSymbol, g: &GroupSpec, radius: usize, margin: usize) -> Result<OperatorMatrix> {
    let need = if g.is_finite() { 0 } else { phi.radius() };
    if margin < need {
        return Err(Error::MarginTooSmall { margin, required: need });
    }
    let (w, interior) = build_window(g, radius, margin)?;
    // Precompute inverses of support points once.
    let supports: Vec<Vec<(Element, Complex64)>> = phi
        .terms
        .iter()
        .map(|t| t.profile.iter().map(|(x, v)| (g.inv(x), *v)).collect())
        .collect();
    let rows = w
        .elements
        .par_iter()
        .map(|q| {
            let mut row = Vec::new();
            for (t, sup) in phi.terms.iter().zip(&supports) {
                let a = t.coeff.evaluate(g, q);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (xinv, v) in sup {
                    if let Some(j) = w.position(&g.mul(xinv, q)) {
                        row.push((j, a * v));
                    }
                }
            }
            row
        })
        .collect();
    Ok(OperatorMatrix::from_rows(w.elements, interior, rows))
}

/// Convolution operator `u ↦ φ * u`, i.e. the matrix of `1 ⊗ φ`.
pub fn conv_matrix(phi: &Profile, g: &GroupSpec, radius: usize, margin: usize) -> Result<OperatorMatrix> {
    schrodinger_matrix(&KernelSymbol::convolution(phi.clone()), g, radius, margin)
}

/// Multiplication operator by `a` on the same window layout.
pub fn mult_matrix(a: &CoefficientSymbol, g: &GroupSpec, radius: usize, margin: usize) -> Result<OperatorMatrix> {
    schrodinger_matrix(
        &KernelSymbol::term(a.clone(), Profile::delta(g.identity())),
        g,
        radius,
        margin,
    )
}

/// Index of each window element, for callers assembling their own matrices.
pub fn window_index(elems: &[Element]) -> HashMap<Element, usize> {
    elems.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{sufficient_family_for, SoGenerator};
    use crate::group::{q8, s3};

    fn z1() -> GroupSpec {
        GroupSpec::zn(1).unwrap()
    }
    fn n(v: i64) -> Element {
        Element::zn([v])
    }
    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }
    fn lap() -> Profile {
        Profile::from_pairs([(n(1), re(1.0)), (n(-1), re(1.0))])
    }

    #[test]
    fn unit_is_neutral() {
        let g = z1();
        let psi = KernelSymbol::term(CoefficientSymbol::sin_sqrt(), lap());
        let e = KernelSymbol::identity(&g);
        assert_eq!(diamond(&e, &psi, &g).unwrap(), psi.normalize(&g).unwrap());
    }

    #[test]
    fn multiplication_operators_compose() {
        let g = z1();
        let a = CoefficientSymbol::sin_sqrt();
        let b = CoefficientSymbol::periodic(vec![2], vec![re(1.0), re(-1.0)]);
        let ka = KernelSymbol::term(a.clone(), Profile::delta(n(0)));
        let kb = KernelSymbol::term(b.clone(), Profile::delta(n(0)));
        let expect = KernelSymbol::term(CoefficientSymbol::product(vec![a, b]), Profile::delta(n(0)));
        assert_eq!(diamond(&ka, &kb, &g).unwrap(), expect.normalize(&g).unwrap());
    }

    #[test]
    fn shifts_compose() {
        let g = z1();
        let s = KernelSymbol::convolution(Profile::delta(n(1)));
        let d = diamond(&s, &s, &g).unwrap();
        assert_eq!(d, KernelSymbol::convolution(Profile::delta(n(2))));
        assert_eq!(d.terms.len(), 1);
    }

    #[test]
    fn involution_examples() {
        let g = z1();
        let e = KernelSymbol::identity(&g);
        assert_eq!(involution(&e, &g).unwrap(), e);
        let s = KernelSymbol::convolution(Profile::delta(n(1)));
        assert_eq!(involution(&s, &g).unwrap(), KernelSymbol::convolution(Profile::delta(n(-1))));
        let a = KernelSymbol::term(CoefficientSymbol::arctan(2.0), Profile::delta(n(0)));
        assert_eq!(involution(&a, &g).unwrap(), a.normalize(&g).unwrap());
        let k = KernelSymbol::term(
            CoefficientSymbol::sum(vec![CoefficientSymbol::constant(Complex64::new(2.0, 1.0)), CoefficientSymbol::sin_sqrt()]),
            lap(),
        );
        let kk = involution(&involution(&k, &g).unwrap(), &g).unwrap();
        assert_eq!(kk, k.normalize(&g).unwrap());
    }

    #[test]
    fn path_adjacency() {
        let g = z1();
        let m = schrodinger_matrix(&KernelSymbol::convolution(lap()), &g, 3, 1).unwrap().compress();
        let d = m.to_dense();
        for i in 0..7usize {
            for j in 0..7 {
                let expect = if i.abs_diff(j) == 1 { 1.0 } else { 0.0 };
                assert_eq!(d[(i, j)], re(expect));
            }
        }
        assert!(m.hermitian && m.is_tridiagonal());
        let id = conv_matrix(&Profile::delta(n(0)), &g, 4, 0).unwrap().to_dense();
        assert_eq!(id, DMatrix::identity(9, 9));
        let shift = conv_matrix(&Profile::delta(n(1)), &g, 2, 1).unwrap().compress().to_dense();
        // (δ₁ * u)(q) = u(q − 1): row q has its entry in column q − 1.
        for i in 1..5 {
            assert_eq!(shift[(i, i - 1)], re(1.0));
        }
        assert!(schrodinger_matrix(&KernelSymbol::convolution(lap()), &g, 3, 0).is_err());
    }

    #[test]
    fn term_matrix_is_mult_times_conv() {
        let g = z1();
        let a = CoefficientSymbol::sum(vec![CoefficientSymbol::constant(2.0), CoefficientSymbol::sin_sqrt()]);
        let k = KernelSymbol::term(a.clone(), lap());
        let m = schrodinger_matrix(&k, &g, 10, 2).unwrap();
        let prod = mult_matrix(&a, &g, 10, 2).unwrap().mul(&conv_matrix(&lap(), &g, 10, 2).unwrap());
        assert!(m.interior_max_diff(&prod) < 1e-15);
    }

    #[test]
    fn finite_conv_matches_cayley_permutations() {
        let grp = s3();
        let g = GroupSpec::finite(grp.clone());
        let phi = Profile::from_pairs([(Element::finite(1), re(2.0)), (Element::finite(4), Complex64::new(0.5, -1.0))]);
        let m = conv_matrix(&phi, &g, 0, 0).unwrap().to_dense();
        // Σ_x φ(x) P_x with (P_x)[q, y] = 1 iff x·y = q.
        let mut expect = DMatrix::<Complex64>::zeros(6, 6);
        for (x, v) in phi.iter() {
            for y in 0..6 {
                expect[(grp.mul(x.idx[0], y), y)] += v;
            }
        }
        assert_eq!(m, expect);
    }

    #[test]
    fn star_identities_on_q8() {
        let g = GroupSpec::finite(q8());
        let phi = KernelSymbol::term(
            CoefficientSymbol::periodic(vec![], (0..8).map(|k| re(k as f64 - 3.0)).collect()),
            Profile::from_pairs([(Element::finite(2), re(1.0)), (Element::finite(5), Complex64::new(0.0, 2.0))]),
        );
        let psi = KernelSymbol::term(
            CoefficientSymbol::periodic(vec![], (0..8).map(|k| Complex64::new(1.0, k as f64)).collect()),
            Profile::from_pairs([(Element::finite(3), re(-1.5)), (Element::finite(0), re(0.5))]),
        );
        let sp = schrodinger_matrix(&phi, &g, 0, 0).unwrap();
        let ss = schrodinger_matrix(&psi, &g, 0, 0).unwrap();
        let sd = schrodinger_matrix(&diamond(&phi, &psi, &g).unwrap(), &g, 0, 0).unwrap();
        assert!(sd.interior_max_diff(&sp.mul(&ss)) < 1e-12);
        let si = schrodinger_matrix(&involution(&phi, &g).unwrap(), &g, 0, 0).unwrap();
        assert!(si.interior_max_diff(&sp.adjoint()) < 1e-12);
    }

    #[test]
    fn limit_kernels() {
        let g = z1();
        let opts = ProbeOptions {
            cluster_grid: 8,
            ..ProbeOptions::default()
        };
        let conv = KernelSymbol::convolution(lap());
        let fam = sufficient_family_for(&conv.coefficients(), &g, &opts).unwrap();
        assert_eq!(limit_kernel(&conv, &fam[0], &g, &opts).unwrap(), conv);
        let van = KernelSymbol::term(CoefficientSymbol::support(vec![(n(0), re(10.0))]), lap());
        assert!(limit_kernel(&van, &fam[0], &g, &opts).unwrap().is_zero());
        let a = CoefficientSymbol::sum(vec![CoefficientSymbol::constant(2.0), CoefficientSymbol::so(SoGenerator::SinSqrt, 0)]);
        let k = KernelSymbol::term(a.clone(), lap());
        let fam = sufficient_family_for(&k.coefficients(), &g, &opts).unwrap();
        for q in &fam {
            let s = 2.0 + q.probe.phase.unwrap().sin();
            let l = limit_kernel(&k, q, &g, &opts).unwrap();
            assert_eq!(l, KernelSymbol::convolution(lap().scaled(re(s))));
        }
    }

    #[test]
    fn profile_json() {
        let p: Profile = serde_json::from_str(r#"[{"element":[1],"re":1},{"element":[-1],"re":1,"im":0.5}]"#).unwrap();
        assert_eq!(p.get(&n(-1)), Complex64::new(1.0, 0.5));
        let k: KernelSymbol = serde_json::from_str(
            r#"[{"coeff":{"kind":"constant","value":1},"profile":[{"element":[0],"re":2}]}]"#,
        )
        .unwrap();
        assert_eq!(k.terms.len(), 1);
        assert!(matches!(KernelSymbol::default().validate(&z1()), Err(Error::EmptyKernel)));
    }
}

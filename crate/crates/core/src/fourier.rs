//! Fourier analysis on `ℤⁿ × F` with `F` a finite product: unitary duals,
//! operator-valued transforms stored as exact trigonometric polynomials,
//! the partial transform of kernels and the `Op` quantization.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::coeff::CoefficientSymbol;
use crate::error::{Error, Result};
use crate::group::{Element, FiniteGroup, GroupSpec};
use crate::opalg::{build_window, KernelSymbol, OperatorMatrix, Profile};
use crate::spectra::SpectralSet;

/// Cap on the number of torus grid points per character in range extraction.
pub const GRID_POINT_CAP: usize = 1 << 24;

/// Point clouds larger than this are compacted onto a lattice.
pub const CLOUD_CAP: usize = 2_000_000;

const HOM_TOL: f64 = 1e-12;

fn max_entry(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Checks the irreps attached to a finite group: homomorphism, unitarity,
/// irreducibility via the commutant equation, pairwise inequivalence and
/// completeness `Σ d² = |G|`. Products and commutants are tested on the
/// group's generating set, which implies them everywhere.
pub fn validate_irreps(g: &FiniteGroup) -> Result<()> {
    let name = g.name();
    let n = g.order();
    let gens = g.generators();
    let bad = |msg: String| Err(Error::InvalidGroup(format!("{name}: {msg}")));
    if g.irreps().is_empty() {
        return bad("no irreducible representations given".into());
    }
    for (k, ir) in g.irreps().iter().enumerate() {
        let d = ir.dim;
        if d == 0 || ir.matrices.len() != n {
            return bad(format!("irrep {k} has wrong shape"));
        }
        let id = DMatrix::<Complex64>::identity(d, d);
        if max_entry(&(&ir.matrices[g.identity()] - &id)) > HOM_TOL {
            return bad(format!("irrep {k} does not send the identity to I"));
        }
        for a in 0..n {
            let m = &ir.matrices[a];
            if max_entry(&(m * m.adjoint() - &id)) > HOM_TOL {
                return bad(format!("irrep {k} is not unitary at element {a}"));
            }
            for &b in gens {
                let err = max_entry(&(m * &ir.matrices[b] - &ir.matrices[g.mul(a, b)]));
                if err > HOM_TOL {
                    return bad(format!("irrep {k} is not a homomorphism at ({a},{b}): {err:.2e}"));
                }
            }
        }
        if d == 1 {
            continue;
        }
        // X ρ(s) = ρ(s) X for generators s ⇔ (ρ(s)ᵀ ⊗ I − I ⊗ ρ(s)) vec X = 0.
        let mut sys = DMatrix::<Complex64>::zeros(gens.len().max(1) * d * d, d * d);
        for (i, &s) in gens.iter().enumerate() {
            let m = &ir.matrices[s];
            let block = m.transpose().kronecker(&id) - id.kronecker(m);
            sys.view_mut((i * d * d, 0), (d * d, d * d)).copy_from(&block);
        }
        let sv = sys.svd(false, false).singular_values;
        let null = sv.iter().filter(|&&s| s < 1e-8).count();
        if null != 1 {
            return bad(format!("irrep {k} is reducible: commutant has dimension {null}"));
        }
    }
    // Equivalent irreps share a character; distinct characters are
    // orthogonal. Sorting by a fixed projection brings equal characters
    // together, so only near ties need the full inner product.
    let weights: Vec<Complex64> = (0..n)
        .map(|a| Complex64::from_polar(1.0, 2.399_963_229_728_653 * a as f64 + 0.5))
        .collect();
    let chars: Vec<Vec<Complex64>> = g
        .irreps()
        .iter()
        .map(|ir| ir.matrices.iter().map(|m| m.trace()).collect())
        .collect();
    let mut keyed: Vec<(Complex64, usize)> = chars
        .iter()
        .enumerate()
        .map(|(i, ch)| (ch.iter().zip(&weights).map(|(x, w)| x * w).sum(), i))
        .collect();
    keyed.sort_by(|a, b| a.0.re.total_cmp(&b.0.re));
    let tie = 1e-6 * n as f64;
    for x in 0..keyed.len() {
        for y in x + 1..keyed.len() {
            if keyed[y].0.re - keyed[x].0.re > tie {
                break;
            }
            if (keyed[y].0 - keyed[x].0).norm() > tie {
                continue;
            }
            let (i, j) = (keyed[x].1, keyed[y].1);
            let ip: Complex64 = chars[i].iter().zip(&chars[j]).map(|(a, b)| a * b.conj()).sum();
            if ip.norm() / n as f64 > 1e-9 {
                return bad(format!("irreps {} and {} are equivalent", i.min(j), i.max(j)));
            }
        }
    }
    let total: usize = g.irreps().iter().map(|ir| ir.dim * ir.dim).sum();
    if total != n {
        return bad(format!("sum of squared irrep dimensions is {total}, expected {n}"));
    }
    Ok(())
}

/// An irrep of the finite part `F`, indexed by flat finite index.
#[derive(Clone, Debug)]
pub struct DualIrrep {
    pub label: String,
    pub dim: usize,
    pub matrices: Vec<DMatrix<Complex64>>,
    /// Plancherel weight `d / |F|`.
    pub weight: f64,
}

/// Unitary dual of `ℤⁿ × F`: the torus `𝕋ⁿ` times the irreps of `F`, the
/// latter built as Kronecker products over the finite factors.
#[derive(Clone, Debug)]
pub struct DualData {
    pub torus_dim: usize,
    pub finite_order: usize,
    pub irreps: Vec<DualIrrep>,
}

impl DualData {
    pub fn for_group(g: &GroupSpec) -> Result<Self> {
        let factors: Vec<&FiniteGroup> = g.finite_factors().collect();
        for f in &factors {
            validate_irreps(f)?;
        }
        let order = g.finite_order();
        let mut irreps = vec![DualIrrep {
            label: String::new(),
            dim: 1,
            matrices: vec![DMatrix::identity(1, 1); order],
            weight: 0.0,
        }];
        for (fi, f) in factors.iter().enumerate() {
            let mut next = Vec::with_capacity(irreps.len() * f.irreps().len());
            for base in &irreps {
                for (k, ir) in f.irreps().iter().enumerate() {
                    let matrices = if factors.len() == 1 {
                        ir.matrices.clone()
                    } else {
                        (0..order)
                            .map(|flat| {
                                let idx = g.finite_from_flat(flat);
                                base.matrices[flat].kronecker(&ir.matrices[idx[fi]])
                            })
                            .collect()
                    };
                    let label = if base.label.is_empty() {
                        format!("{}:{k}", f.name())
                    } else {
                        format!("{}|{}:{k}", base.label, f.name())
                    };
                    next.push(DualIrrep {
                        label,
                        dim: base.dim * ir.dim,
                        matrices,
                        weight: 0.0,
                    });
                }
            }
            irreps = next;
        }
        for ir in &mut irreps {
            ir.weight = ir.dim as f64 / order as f64;
        }
        Ok(Self {
            torus_dim: g.int_dim(),
            finite_order: order,
            irreps,
        })
    }

    pub fn plancherel_weights(&self) -> Vec<f64> {
        self.irreps.iter().map(|ir| ir.weight).collect()
    }

    pub fn check(&self, g: &GroupSpec) -> Result<()> {
        if self.torus_dim != g.int_dim() || self.finite_order != g.finite_order() {
            return Err(Error::DualMismatch(format!(
                "dual of Z^{} x |F|={} used with {}",
                self.torus_dim,
                self.finite_order,
                g.describe()
            )));
        }
        if self.irreps.iter().any(|ir| ir.matrices.len() != self.finite_order) {
            return Err(Error::DualMismatch("irrep matrix count differs from |F|".into()));
        }
        Ok(())
    }

    fn matrix(&self, k: usize, g: &GroupSpec, x: &Element) -> &DMatrix<Complex64> {
        &self.irreps[k].matrices[g.finite_flat_index(&x.idx)]
    }
}

/// Operator-valued function on the dual: per irrep, a matrix trigonometric
/// polynomial `Σ_m C_m e^{i m·θ}` keyed by frequency `m ∈ ℤⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorField {
    pub torus_dim: usize,
    pub blocks: Vec<BTreeMap<Vec<i64>, DMatrix<Complex64>>>,
}

impl OperatorField {
    pub fn zero(dual: &DualData) -> Self {
        Self {
            torus_dim: dual.torus_dim,
            blocks: vec![BTreeMap::new(); dual.irreps.len()],
        }
    }

    fn accumulate(&mut self, k: usize, freq: Vec<i64>, m: DMatrix<Complex64>) {
        match self.blocks[k].get_mut(&freq) {
            Some(c) => *c += m,
            None => {
                self.blocks[k].insert(freq, m);
            }
        }
    }

    /// Value at the dual point `(θ, ξ_k)`.
    pub fn eval(&self, k: usize, dim: usize, theta: &[f64]) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(dim, dim);
        for (m, c) in &self.blocks[k] {
            let ph: f64 = m.iter().zip(theta).map(|(a, t)| *a as f64 * t).sum();
            out += c * Complex64::from_polar(1.0, ph);
        }
        out
    }

    pub fn add(&self, other: &OperatorField) -> OperatorField {
        let mut out = self.clone();
        for (k, b) in other.blocks.iter().enumerate() {
            for (m, c) in b {
                out.accumulate(k, m.clone(), c.clone());
            }
        }
        out
    }

    /// Pointwise product on the dual: matrix product and polynomial product.
    pub fn mul(&self, other: &OperatorField) -> OperatorField {
        let mut out = OperatorField {
            torus_dim: self.torus_dim,
            blocks: vec![BTreeMap::new(); self.blocks.len()],
        };
        for k in 0..self.blocks.len() {
            for (m1, c1) in &self.blocks[k] {
                for (m2, c2) in &other.blocks[k] {
                    let m = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                    out.accumulate(k, m, c1 * c2);
                }
            }
        }
        out
    }

    /// Largest coefficient-entry difference.
    pub fn max_diff(&self, other: &OperatorField) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            for (m, c) in a {
                worst = worst.max(match b.get(m) {
                    Some(d) => max_entry(&(c - d)),
                    None => max_entry(c),
                });
            }
            for (m, d) in b {
                if !a.contains_key(m) {
                    worst = worst.max(max_entry(d));
                }
            }
        }
        worst
    }

    /// Largest frequency sup norm.
    pub fn radius(&self) -> usize {
        self.blocks
            .iter()
            .flat_map(|b| b.keys())
            .map(|m| m.iter().map(|v| v.unsigned_abs() as usize).max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }
}

/// `û(θ, ξ) = Σ_x u(x) ξ(x_F)* e^{−i x_ℤ·θ}`.
pub fn fourier(g: &GroupSpec, dual: &DualData, u: &Profile) -> Result<OperatorField> {
    dual.check(g)?;
    u.validate(g)?;
    let mut out = OperatorField::zero(dual);
    for (x, v) in u.iter() {
        let freq: Vec<i64> = x.ints.iter().map(|a| -a).collect();
        for k in 0..dual.irreps.len() {
            out.accumulate(k, freq.clone(), dual.matrix(k, g, x).adjoint() * *v);
        }
    }
    Ok(out)
}

/// `Σ_ξ m̂(ξ) ∫ ‖F(θ, ξ)‖²_HS dθ/(2π)ⁿ`, integrated exactly by Parseval.
pub fn plancherel_norm(dual: &DualData, f: &OperatorField) -> f64 {
    dual.irreps
        .iter()
        .zip(&f.blocks)
        .map(|(ir, b)| ir.weight * b.values().map(|c| c.norm_squared()).sum::<f64>())
        .sum()
}

/// Inverse transform: `u(x) = Σ_ξ m̂(ξ) Tr[ξ(x_F) C_{ξ, −x_ℤ}]`.
pub fn inverse_fourier(g: &GroupSpec, dual: &DualData, f: &OperatorField) -> Result<Profile> {
    dual.check(g)?;
    let mut u = Profile::default();
    let freqs: std::collections::BTreeSet<&Vec<i64>> = f.blocks.iter().flat_map(|b| b.keys()).collect();
    for m in freqs {
        for flat in 0..dual.finite_order {
            let x = Element::new(m.iter().map(|a| -a).collect(), g.finite_from_flat(flat));
            let v: Complex64 = dual
                .irreps
                .iter()
                .zip(&f.blocks)
                .filter_map(|(ir, b)| b.get(m).map(|c| (&ir.matrices[flat] * c).trace() * ir.weight))
                .sum();
            u.add(x, v);
        }
    }
    Ok(u)
}

/// Operator-valued symbol `f(x, ξ) = Σ_j a_j(x) F_j(ξ)`.
#[derive(Clone, Debug)]
pub struct SymbolField {
    pub terms: Vec<(CoefficientSymbol, OperatorField)>,
}

impl SymbolField {
    pub fn eval(&self, g: &GroupSpec, dual: &DualData, x: &Element, k: usize, theta: &[f64]) -> DMatrix<Complex64> {
        let d = dual.irreps[k].dim;
        let mut out = DMatrix::zeros(d, d);
        for (a, f) in &self.terms {
            out += f.eval(k, d, theta) * a.evaluate(g, x);
        }
        out
    }

    pub fn add(mut self, other: SymbolField) -> SymbolField {
        self.terms.extend(other.terms);
        self
    }

    pub fn radius(&self) -> usize {
        self.terms.iter().map(|t| t.1.radius()).max().unwrap_or(0)
    }
}

/// `id ⊗ F` applied termwise.
pub fn partial_fourier(phi: &KernelSymbol, g: &GroupSpec, dual: &DualData) -> Result<SymbolField> {
    let terms = phi
        .terms
        .iter()
        .map(|t| Ok((t.coeff.clone(), fourier(g, dual, &t.profile)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SymbolField { terms })
}

/// `[Op(f)u](x) = Σ_y Σ_ξ m̂(ξ) ∫ Tr[ξ(xy⁻¹) f(x, ξ)] e^{iθ·(x−y)} dθ u(y)`,
/// with the torus integral taken exactly on the polynomial coefficients.
pub fn op_quantize(
    f: &SymbolField,
    g: &GroupSpec,
    dual: &DualData,
    radius: usize,
    margin: usize,
) -> Result<OperatorMatrix> {
    dual.check(g)?;
    let need = if g.is_finite() { 0 } else { f.radius() };
    if margin < need {
        return Err(Error::MarginTooSmall { margin, required: need });
    }
    // Per term: the scalar kernel value at each z = x·y⁻¹, recovered from
    // the symbol coefficients.
    let kernels: Vec<Vec<(Element, Complex64)>> = f
        .terms
        .iter()
        .map(|(_, field)| {
            let u = inverse_fourier(g, dual, field)?;
            let scale = u.l1().max(f64::MIN_POSITIVE);
            Ok(u
                .iter()
                .filter(|(_, v)| v.norm() > 1e-14 * scale)
                .map(|(z, v)| (g.inv(z), *v))
                .collect())
        })
        .collect::<Result<_>>()?;
    let (w, interior) = build_window(g, radius, margin)?;
    let rows = w
        .elements
        .par_iter()
        .map(|x| {
            let mut row = Vec::new();
            for ((a, _), ker) in f.terms.iter().zip(&kernels) {
                let av = a.evaluate(g, x);
                if av == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (zinv, v) in ker {
                    if let Some(j) = w.position(&g.mul(zinv, x)) {
                        row.push((j, av * v));
                    }
                }
            }
            row
        })
        .collect();
    Ok(OperatorMatrix::from_rows(w.elements, interior, rows))
}

/// Spectrum of `u ↦ φ * u` on an abelian group: the closure of the range of
/// `φ̂` over the dual, sampled on a grid of `grid` points per torus
/// dimension. The resolution tag is `L·h` with `L = Σ |x|₁ |φ(x)|`.
pub fn conv_symbol_range(phi: &Profile, g: &GroupSpec, grid: usize) -> Result<SpectralSet> {
    if !g.is_abelian() {
        return Err(Error::NonAbelianGroup);
    }
    phi.validate(g)?;
    let dual = DualData::for_group(g)?;
    let n = g.int_dim();
    let mut phi = phi.clone();
    phi.prune();
    if phi.is_empty() {
        return Ok(SpectralSet::point(Complex64::new(0.0, 0.0)));
    }
    // c·δ_x with x_ℤ ≠ 0 sweeps a full circle under every character.
    if phi.len() == 1 && n > 0 {
        let (x, c) = phi.iter().next().expect("one support point");
        if x.int_l1() > 0 {
            return Ok(SpectralSet::circle(Complex64::new(0.0, 0.0), c.norm(), 0.0));
        }
    }
    let real = phi.is_self_adjoint(g);
    if n == 0 {
        let vals: Vec<Complex64> = dual
            .irreps
            .iter()
            .map(|ir| {
                phi.iter()
                    .map(|(x, v)| v * ir.matrices[g.finite_flat_index(&x.idx)][(0, 0)].conj())
                    .sum()
            })
            .collect();
        let vals = if real {
            vals.into_iter().map(|z| Complex64::new(z.re, 0.0)).collect()
        } else {
            vals
        };
        return Ok(SpectralSet::from_points(vals, 0.0));
    }
    let per_dim = {
        let mut m = grid.max(1);
        while n > 1 && (m as f64).powi(n as i32) > GRID_POINT_CAP as f64 {
            m -= 1;
        }
        m
    };
    let h = std::f64::consts::TAU / per_dim as f64;
    let resolution = phi.gradient_bound() * h;
    let total = per_dim.pow(n as u32);
    let twiddle: Vec<Complex64> = (0..per_dim)
        .map(|m| Complex64::from_polar(1.0, -h * m as f64))
        .collect();
    let mut parts = Vec::with_capacity(dual.irreps.len());
    for ir in &dual.irreps {
        let terms: Vec<(Vec<i64>, Complex64)> = phi
            .iter()
            .map(|(x, v)| (x.ints.clone(), v * ir.matrices[g.finite_flat_index(&x.idx)][(0, 0)].conj()))
            .collect();
        let value = |flat: usize| -> Complex64 {
            let mut j = vec![0usize; n];
            let mut r = flat;
            for slot in j.iter_mut().rev() {
                *slot = r % per_dim;
                r /= per_dim;
            }
            terms
                .iter()
                .map(|(x, c)| {
                    let s: i128 = x.iter().zip(&j).map(|(a, b)| *a as i128 * *b as i128).sum();
                    c * twiddle[s.rem_euclid(per_dim as i128) as usize]
                })
                .sum()
        };
        if real {
            let (lo, hi) = (0..total)
                .into_par_iter()
                .map(|k| {
                    let v = value(k).re;
                    (v, v)
                })
                .reduce(|| (f64::INFINITY, f64::NEG_INFINITY), |a, b| (a.0.min(b.0), a.1.max(b.1)));
            parts.push(SpectralSet::interval(lo, hi, resolution));
        } else {
            let pts: Vec<Complex64> = (0..total).into_par_iter().map(value).collect();
            let mut s = SpectralSet::from_points(pts, resolution);
            if s.points.len() > CLOUD_CAP {
                s.compact(resolution / 2.0);
            }
            parts.push(s);
        }
    }
    Ok(SpectralSet::union_all(&parts))
}

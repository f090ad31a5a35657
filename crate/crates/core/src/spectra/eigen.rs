//! Dense and tridiagonal eigensolvers and the pseudospectrum scan.

use nalgebra::{DMatrix, Schur, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use super::SpectralSet;
use crate::error::{Error, Result};
use crate::opalg::OperatorMatrix;

const MAX_SWEEPS: usize = 60;

/// Eigenvalues of the real symmetric tridiagonal matrix with diagonal `d`
/// and off-diagonal `e` (`e.len() == d.len() - 1`), by implicit QL with
/// Wilkinson shifts. Returned ascending.
pub fn tridiagonal_eigenvalues(d: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    let mut d = d.to_vec();
    let mut e: Vec<f64> = e.iter().copied().chain(std::iter::once(0.0)).take(n).collect();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err(Error::EigenNonConvergence(format!(
                    "tridiagonal QL stalled at index {l} of {n}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Real symmetric form of a tridiagonal matrix when one exists: Hermitian
/// tridiagonals after a diagonal phase change, and real tridiagonals with
/// non-negative products `M[i,i+1]·M[i+1,i]` after diagonal similarity.
pub fn symmetrizable_tridiagonal(m: &OperatorMatrix) -> Option<(Vec<f64>, Vec<f64>)> {
    if !m.is_tridiagonal() {
        return None;
    }
    let n = m.dim();
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let tol = 1e-14 * scale;
    let mut d = Vec::with_capacity(n);
    for i in 0..n {
        let v = m.get(i, i);
        if v.im.abs() > tol {
            return None;
        }
        d.push(v.re);
    }
    let mut e = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n.saturating_sub(1) {
        let (b, c) = (m.get(i, i + 1), m.get(i + 1, i));
        if m.hermitian {
            e.push(b.norm());
            continue;
        }
        let p = b * c;
        if p.im.abs() > tol * scale || p.re < -tol * scale {
            return None;
        }
        e.push(p.re.max(0.0).sqrt());
    }
    Some((d, e))
}

/// Upper-triangular matrix unitarily similar to `d` (up to transposition,
/// which preserves eigenvalues and singular values). Triangular input is
/// used directly; otherwise complex Schur, retried on diagonal shifts of
/// the matrix when the QR sweep stalls.
fn triangular_form(d: DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let n = d.nrows();
    let upper = (0..n).all(|i| (0..i).all(|j| d[(i, j)] == Complex64::new(0.0, 0.0)));
    if upper {
        return Ok(d);
    }
    let lower = (0..n).all(|i| (i + 1..n).all(|j| d[(i, j)] == Complex64::new(0.0, 0.0)));
    if lower {
        return Ok(d.transpose());
    }
    let scale = d.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    for shift in [0.0, 0.37, -0.61, 1.13] {
        let s = Complex64::new(shift * scale, 0.5 * shift * scale);
        let mut m = d.clone();
        for i in 0..n {
            m[(i, i)] += s;
        }
        if let Some(schur) = Schur::try_new(m, f64::EPSILON, 100 * n.max(10)) {
            let (_, mut t) = schur.unpack();
            for i in 0..n {
                t[(i, i)] -= s;
            }
            return Ok(t);
        }
    }
    Err(Error::EigenNonConvergence(format!("complex Schur on {n}×{n}")))
}

fn eig_general(d: DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let n = d.nrows();
    let t = triangular_form(d)?;
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

fn sort_complex(v: &mut [Complex64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Full eigenvalue list. Tridiagonal matrices with a real symmetric form
/// use QL; other Hermitian matrices the symmetric dense path; everything
/// else the complex Schur form.
pub fn eig_dense(m: &OperatorMatrix) -> Result<Vec<Complex64>> {
    if m.dim() == 0 {
        return Ok(Vec::new());
    }
    if let Some((d, e)) = symmetrizable_tridiagonal(m) {
        return Ok(tridiagonal_eigenvalues(&d, &e)?
            .into_iter()
            .map(|x| Complex64::new(x, 0.0))
            .collect());
    }
    eig_matrix(m.to_dense(), m.hermitian)
}

/// Eigenvalues of a dense matrix, symmetric path when `hermitian`.
pub fn eig_matrix(d: DMatrix<Complex64>, hermitian: bool) -> Result<Vec<Complex64>> {
    let n = d.nrows();
    if n == 1 {
        return Ok(vec![d[(0, 0)]]);
    }
    let mut out: Vec<Complex64> = if hermitian {
        let sym = SymmetricEigen::try_new(d, f64::EPSILON, 100 * n.max(10))
            .ok_or_else(|| Error::EigenNonConvergence(format!("Hermitian eigensolver on {n}×{n}")))?;
        sym.eigenvalues.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    } else {
        eig_general(d)?
    };
    sort_complex(&mut out);
    Ok(out)
}

/// Axis-aligned region of the complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Region {
    /// Bounding box of `points` padded by `pad` plus a tenth of its extent.
    pub fn padded(points: &[Complex64], pad: f64) -> Region {
        let (mut a, mut b, mut c, mut d) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for z in points {
            a = a.min(z.re);
            b = b.max(z.re);
            c = c.min(z.im);
            d = d.max(z.im);
        }
        if points.is_empty() {
            (a, b, c, d) = (0.0, 0.0, 0.0, 0.0);
        }
        let extra = 0.1 * (b - a).max(d - c) + pad;
        Region {
            re_min: a - extra,
            re_max: b + extra,
            im_min: c - extra,
            im_max: d + extra,
        }
    }
}

/// Solves `(T − z) x = b` in place for upper-triangular row-major `t`.
fn solve_upper(t: &[Complex64], n: usize, z: Complex64, x: &mut [Complex64]) -> bool {
    for i in (0..n).rev() {
        let row = &t[i * n..(i + 1) * n];
        let mut s = x[i];
        for j in i + 1..n {
            s -= row[j] * x[j];
        }
        let p = row[i] - z;
        if p == Complex64::new(0.0, 0.0) {
            return false;
        }
        x[i] = s / p;
    }
    true
}

/// Solves `(T − z)* x = b` in place.
fn solve_upper_adjoint(t: &[Complex64], n: usize, z: Complex64, x: &mut [Complex64]) -> bool {
    for i in 0..n {
        let mut s = x[i];
        for j in 0..i {
            s -= t[j * n + i].conj() * x[j];
        }
        let p = (t[i * n + i] - z).conj();
        if p == Complex64::new(0.0, 0.0) {
            return false;
        }
        x[i] = s / p;
    }
    true
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Decides `σ_min(T − z) ≤ ε` by inverse iteration on `(T−z)*(T−z)`; the
/// Rayleigh estimate of `‖(T−z)⁻¹‖` only grows, so crossing `1/ε` is final.
fn sigma_min_below(t: &[Complex64], n: usize, z: Complex64, eps: f64) -> bool {
    let mut x: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + (i % 7) as f64 * 0.1, (i % 3) as f64 * 0.05))
        .collect();
    let s = norm(&x);
    x.iter_mut().for_each(|v| *v /= s);
    let mut prev = 0.0;
    for _ in 0..30 {
        if !solve_upper_adjoint(t, n, z, &mut x) || !solve_upper(t, n, z, &mut x) {
            return true;
        }
        let est = norm(&x).sqrt();
        if !est.is_finite() || est * eps >= 1.0 {
            return true;
        }
        let s = norm(&x);
        x.iter_mut().for_each(|v| *v /= s);
        if (est - prev).abs() <= 1e-6 * est {
            break;
        }
        prev = est;
    }
    false
}

/// `{z on a grid × grid lattice over `region` : σ_min(M − z) ≤ ε}`. The
/// resolution is half the lattice cell diagonal.
pub fn pseudospectrum(m: &OperatorMatrix, eps: f64, region: Region, grid: usize) -> Result<SpectralSet> {
    if !(eps > 0.0) {
        return Err(Error::Invalid(format!("pseudospectrum level must be positive, got {eps}")));
    }
    if grid < 2 || !(region.re_max > region.re_min) || !(region.im_max > region.im_min) {
        return Err(Error::EmptyBox(format!("{region:?} with grid {grid}")));
    }
    let n = m.dim();
    let t = triangular_form(m.to_dense())?;
    let tr: Vec<Complex64> = (0..n * n).map(|k| t[(k / n, k % n)]).collect();
    let dx = (region.re_max - region.re_min) / (grid - 1) as f64;
    let dy = (region.im_max - region.im_min) / (grid - 1) as f64;
    let pts: Vec<Complex64> = (0..grid * grid)
        .into_par_iter()
        .filter_map(|k| {
            let z = Complex64::new(
                region.re_min + (k % grid) as f64 * dx,
                region.im_min + (k / grid) as f64 * dy,
            );
            sigma_min_below(&tr, n, z, eps).then_some(z)
        })
        .collect();
    Ok(SpectralSet::from_points(pts, dx.hypot(dy) / 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{Element, GroupSpec};
    use crate::opalg::{conv_matrix, Profile};

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn dense(d: DMatrix<Complex64>) -> OperatorMatrix {
        let n = d.nrows();
        OperatorMatrix::from_dense(vec![Element::zn([0]); n], &d)
    }

    #[test]
    fn identity_and_diagonal() {
        let id = eig_dense(&dense(DMatrix::identity(5, 5))).unwrap();
        assert_eq!(id, vec![re(1.0); 5]);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![re(3.0), re(1.0), re(2.0)]));
        assert_eq!(eig_dense(&dense(d)).unwrap(), vec![re(1.0), re(2.0), re(3.0)]);
    }

    #[test]
    fn path_graph_closed_form() {
        let g = GroupSpec::zn(1).unwrap();
        let lap = Profile::from_pairs([(Element::zn([1]), re(1.0)), (Element::zn([-1]), re(1.0))]);
        let m = conv_matrix(&lap, &g, 50, 1).unwrap().compress();
        let n = m.dim();
        let got = eig_dense(&m).unwrap();
        let mut expect: Vec<f64> = (1..=n)
            .map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (n + 1) as f64).cos())
            .collect();
        expect.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&expect) {
            assert!((a.re - b).abs() < 1e-13 && a.im == 0.0);
        }
    }

    #[test]
    fn ql_matches_dense_hermitian() {
        // Hermitian tridiagonal with complex off-diagonal, against the dense solver.
        let n = 40;
        let mut d = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            d[(i, i)] = re((i as f64 * 0.7).sin());
            if i + 1 < n {
                let b = Complex64::new(0.3 + (i as f64).cos(), 0.5 * (i as f64 * 1.3).sin());
                d[(i, i + 1)] = b;
                d[(i + 1, i)] = b.conj();
            }
        }
        let fast = eig_dense(&dense(d.clone())).unwrap();
        let slow = eig_matrix(d, true).unwrap();
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn non_normal_tridiagonal() {
        // Positive products symmetrize; a negative product goes through Schur.
        let mut d = DMatrix::<Complex64>::zeros(3, 3);
        d[(0, 1)] = re(4.0);
        d[(1, 0)] = re(1.0);
        let m = dense(d.clone());
        assert!(symmetrizable_tridiagonal(&m).is_some());
        let ev = eig_dense(&m).unwrap();
        assert!((ev[0].re + 2.0).abs() < 1e-14 && (ev[2].re - 2.0).abs() < 1e-14);
        d[(1, 0)] = re(-1.0);
        let m = dense(d);
        assert!(symmetrizable_tridiagonal(&m).is_none());
        let mut ev = eig_dense(&m).unwrap();
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((ev[0] - Complex64::new(0.0, -2.0)).norm() < 1e-12);
        assert!((ev[2] - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn pseudospectrum_of_zero_is_disk() {
        let m = dense(DMatrix::zeros(4, 4));
        let region = Region::padded(&[re(0.0)], 0.2);
        let s = pseudospectrum(&m, 0.1, region, 81).unwrap();
        assert!(!s.points.is_empty());
        assert!(s.points.iter().all(|z| z.norm() <= 0.1 + 1e-12));
        let disk = SpectralSet::circle(re(0.0), 0.1, 0.0);
        assert!(s.points.iter().map(|z| disk.distance_to(*z)).fold(0.0, f64::max) < 0.1 + 1e-12);
        assert!(matches!(
            pseudospectrum(&m, 0.1, Region { re_min: 1.0, re_max: 1.0, im_min: 0.0, im_max: 1.0 }, 10),
            Err(Error::EmptyBox(_))
        ));
    }

    #[test]
    fn hermitian_pseudospectrum_hugs_eigenvalues() {
        let g = GroupSpec::zn(1).unwrap();
        let lap = Profile::from_pairs([(Element::zn([1]), re(1.0)), (Element::zn([-1]), re(1.0))]);
        let m = conv_matrix(&lap, &g, 10, 1).unwrap().compress();
        let ev = eig_dense(&m).unwrap();
        let eps = 0.05;
        let s = pseudospectrum(&m, eps, Region::padded(&ev, 0.1), 64).unwrap();
        let idx = super::super::PointIndex::new(&ev);
        assert!(s.points.iter().all(|z| idx.nearest(*z) <= eps + 1e-9));
    }

    #[test]
    fn shift_pseudospectrum_fills_disk() {
        // Nilpotent Jordan block: σ_min(S − z) ≈ |z|^N for |z| < 1.
        let g = GroupSpec::zn(1).unwrap();
        let m = conv_matrix(&Profile::delta(Element::zn([1])), &g, 100, 1).unwrap().compress();
        let s = pseudospectrum(&m, 1e-2, Region::padded(&[re(-1.0), re(1.0), Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0)], 0.0), 64).unwrap();
        let inside = s.points.iter().filter(|z| z.norm() < 0.9).count();
        let lattice_in_disk = (0..64 * 64)
            .filter(|k| {
                let step = 2.4 / 63.0;
                Complex64::new(-1.2 + (k % 64) as f64 * step, -1.2 + (k / 64) as f64 * step).norm() < 0.9
            })
            .count();
        assert_eq!(inside, lattice_in_disk);
        assert!(s.points.iter().all(|z| z.norm() < 1.05));
    }
}

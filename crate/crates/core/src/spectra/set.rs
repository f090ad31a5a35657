//! Compact subsets of ℂ: a finite point cloud plus exact real segments and
//! circles, tagged with a Hausdorff resolution.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Imaginary parts below this (relative to magnitude) count as real.
const REAL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
}

/// Compact set `cloud ∪ intervals ∪ circles`. The cloud holds only points
/// not already covered by a primitive; `resolution` bounds the Hausdorff
/// distance to the set being approximated.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectralSet {
    pub points: Vec<Complex64>,
    pub intervals: Vec<(f64, f64)>,
    pub circles: Vec<Circle>,
    pub resolution: f64,
}

fn is_real(z: Complex64) -> bool {
    z.im.abs() <= REAL_TOL * (1.0 + z.re.abs())
}

fn cmp_c(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

impl SpectralSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn point(z: Complex64) -> Self {
        Self::from_points(vec![z], 0.0)
    }

    pub fn from_points(points: Vec<Complex64>, resolution: f64) -> Self {
        let mut s = Self {
            points,
            resolution,
            ..Self::default()
        };
        s.normalize();
        s
    }

    pub fn interval(lo: f64, hi: f64, resolution: f64) -> Self {
        let mut s = Self {
            intervals: vec![(lo.min(hi), lo.max(hi))],
            resolution,
            ..Self::default()
        };
        s.normalize();
        s
    }

    pub fn from_intervals(intervals: Vec<(f64, f64)>, resolution: f64) -> Self {
        let mut s = Self {
            intervals: intervals.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect(),
            resolution,
            ..Self::default()
        };
        s.normalize();
        s
    }

    pub fn circle(center: Complex64, radius: f64, resolution: f64) -> Self {
        let mut s = Self {
            circles: vec![Circle {
                center,
                radius: radius.abs(),
            }],
            resolution,
            ..Self::default()
        };
        s.normalize();
        s
    }

    pub fn with_resolution(mut self, r: f64) -> Self {
        self.resolution = r;
        self
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.intervals.is_empty() && self.circles.is_empty()
    }

    /// True when every component lies on the real axis.
    pub fn is_real(&self) -> bool {
        self.circles.is_empty() && self.points.iter().all(|&z| is_real(z))
    }

    /// Sorts and merges intervals, turns zero-radius circles into points,
    /// drops points covered by a primitive and duplicate points.
    pub fn normalize(&mut self) {
        let mut circles = Vec::with_capacity(self.circles.len());
        for c in self.circles.drain(..) {
            if c.radius == 0.0 {
                self.points.push(c.center);
            } else {
                circles.push(c);
            }
        }
        circles.sort_by(|a, b| cmp_c(&a.center, &b.center).then(a.radius.total_cmp(&b.radius)));
        circles.dedup();
        self.circles = circles;

        self.intervals.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(self.intervals.len());
        for &(lo, hi) in &self.intervals {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        // Degenerate intervals are points.
        let (degenerate, proper): (Vec<_>, Vec<_>) = merged.into_iter().partition(|(a, b)| a == b);
        self.points.extend(degenerate.into_iter().map(|(a, _)| Complex64::new(a, 0.0)));
        self.intervals = proper;

        for z in self.points.iter_mut() {
            if is_real(*z) {
                z.im = 0.0;
            }
        }
        let ivs = &self.intervals;
        let circ = &self.circles;
        self.points.retain(|z| {
            let in_iv = z.im == 0.0 && {
                let k = ivs.partition_point(|iv| iv.1 < z.re);
                k < ivs.len() && ivs[k].0 <= z.re
            };
            let on_circle = circ.iter().any(|c| ((*z - c.center).norm() - c.radius) == 0.0);
            !(in_iv || on_circle)
        });
        self.points.sort_by(cmp_c);
        self.points.dedup();
    }

    pub fn union(&self, other: &SpectralSet) -> SpectralSet {
        let mut s = SpectralSet {
            points: [self.points.as_slice(), other.points.as_slice()].concat(),
            intervals: [self.intervals.as_slice(), other.intervals.as_slice()].concat(),
            circles: [self.circles.as_slice(), other.circles.as_slice()].concat(),
            resolution: self.resolution.max(other.resolution),
        };
        s.normalize();
        s
    }

    pub fn union_all<'a>(sets: impl IntoIterator<Item = &'a SpectralSet>) -> SpectralSet {
        let mut s = SpectralSet::empty();
        for t in sets {
            s.points.extend_from_slice(&t.points);
            s.intervals.extend_from_slice(&t.intervals);
            s.circles.extend_from_slice(&t.circles);
            s.resolution = s.resolution.max(t.resolution);
        }
        s.normalize();
        s
    }

    /// `λ·S`.
    pub fn scale(&self, lambda: Complex64) -> SpectralSet {
        let mut s = SpectralSet {
            points: self.points.iter().map(|z| lambda * z).collect(),
            circles: self
                .circles
                .iter()
                .map(|c| Circle {
                    center: lambda * c.center,
                    radius: lambda.norm() * c.radius,
                })
                .collect(),
            resolution: self.resolution * lambda.norm(),
            ..SpectralSet::default()
        };
        if lambda.im == 0.0 {
            s.intervals = self
                .intervals
                .iter()
                .map(|&(a, b)| {
                    let (x, y) = (lambda.re * a, lambda.re * b);
                    (x.min(y), x.max(y))
                })
                .collect();
        } else {
            // A rotated segment is no longer a real interval.
            let spacing = self.default_spacing();
            for &(a, b) in &self.intervals {
                s.points.extend(densify_segment(a, b, spacing).map(|x| lambda * x));
            }
            s.resolution += lambda.norm() * spacing / 2.0;
        }
        s.normalize();
        s
    }

    /// `S + z`.
    pub fn shift(&self, z: Complex64) -> SpectralSet {
        let mut s = SpectralSet {
            points: self.points.iter().map(|p| p + z).collect(),
            circles: self
                .circles
                .iter()
                .map(|c| Circle {
                    center: c.center + z,
                    radius: c.radius,
                })
                .collect(),
            resolution: self.resolution,
            ..SpectralSet::default()
        };
        if z.im == 0.0 {
            s.intervals = self.intervals.iter().map(|&(a, b)| (a + z.re, b + z.re)).collect();
        } else {
            let spacing = self.default_spacing();
            for &(a, b) in &self.intervals {
                s.points.extend(densify_segment(a, b, spacing).map(|x| x + z));
            }
            s.resolution += spacing / 2.0;
        }
        s.normalize();
        s
    }

    /// `{a + b : a ∈ A, b ∈ B}`.
    pub fn minkowski_sum(&self, other: &SpectralSet) -> SpectralSet {
        if self.is_empty() || other.is_empty() {
            return SpectralSet::empty();
        }
        let res = self.resolution + other.resolution;
        // Exact when one side is a finite point set.
        if other.intervals.is_empty() && other.circles.is_empty() {
            let parts: Vec<_> = other.points.iter().map(|&b| self.shift(b)).collect();
            return SpectralSet::union_all(&parts).with_resolution(res.max(max_res(&parts)));
        }
        if self.intervals.is_empty() && self.circles.is_empty() {
            return other.minkowski_sum(self);
        }
        if self.is_real() && other.is_real() {
            let a = self.real_components();
            let b = other.real_components();
            let ivs = a
                .iter()
                .flat_map(|x| b.iter().map(move |y| (x.0 + y.0, x.1 + y.1)))
                .collect();
            return SpectralSet::from_intervals(ivs, res);
        }
        let spacing = self.default_spacing().max(other.default_spacing());
        let bp = other.densify(spacing);
        let parts: Vec<_> = bp.iter().map(|&b| self.shift(b)).collect();
        SpectralSet::union_all(&parts).with_resolution(res + spacing)
    }

    /// `{a·b : a ∈ A, b ∈ B}`.
    pub fn product(&self, other: &SpectralSet) -> SpectralSet {
        if self.is_empty() || other.is_empty() {
            return SpectralSet::empty();
        }
        let res = self.max_abs() * other.resolution + other.max_abs() * self.resolution;
        if self.is_real() && other.is_real() {
            let a = self.real_components();
            let b = other.real_components();
            let ivs = a
                .iter()
                .flat_map(|x| {
                    b.iter().map(move |y| {
                        let c = [x.0 * y.0, x.0 * y.1, x.1 * y.0, x.1 * y.1];
                        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
                        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                        (lo, hi)
                    })
                })
                .collect();
            return SpectralSet::from_intervals(ivs, res);
        }
        if other.intervals.is_empty() && other.circles.is_empty() {
            let parts: Vec<_> = other.points.iter().map(|&b| self.scale(b)).collect();
            return SpectralSet::union_all(&parts).with_resolution(res.max(max_res(&parts)));
        }
        if self.intervals.is_empty() && self.circles.is_empty() {
            return other.product(self);
        }
        let spacing = self.default_spacing().max(other.default_spacing());
        let bp = other.densify(spacing);
        let parts: Vec<_> = bp.iter().map(|&b| self.scale(b)).collect();
        SpectralSet::union_all(&parts).with_resolution(res + self.max_abs() * spacing)
    }

    /// Components of a real set as closed intervals (points are degenerate).
    pub fn real_components(&self) -> Vec<(f64, f64)> {
        let mut v: Vec<(f64, f64)> = self.intervals.clone();
        v.extend(self.points.iter().map(|z| (z.re, z.re)));
        v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
        for (lo, hi) in v {
            match out.last_mut() {
                Some(l) if lo <= l.1 => l.1 = l.1.max(hi),
                _ => out.push((lo, hi)),
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        let p = self.points.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let i = self.intervals.iter().map(|&(a, b)| a.abs().max(b.abs())).fold(0.0, f64::max);
        let c = self.circles.iter().map(|c| c.center.norm() + c.radius).fold(0.0, f64::max);
        p.max(i).max(c)
    }

    /// `(re_min, re_max, im_min, im_max)`, or `None` when empty.
    pub fn bounding_box(&self) -> Option<(f64, f64, f64, f64)> {
        if self.is_empty() {
            return None;
        }
        let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        let mut add = |re: f64, im: f64| {
            b.0 = b.0.min(re);
            b.1 = b.1.max(re);
            b.2 = b.2.min(im);
            b.3 = b.3.max(im);
        };
        for z in &self.points {
            add(z.re, z.im);
        }
        for &(lo, hi) in &self.intervals {
            add(lo, 0.0);
            add(hi, 0.0);
        }
        for c in &self.circles {
            add(c.center.re - c.radius, c.center.im - c.radius);
            add(c.center.re + c.radius, c.center.im + c.radius);
        }
        Some(b)
    }

    fn default_spacing(&self) -> f64 {
        let extent = self
            .bounding_box()
            .map(|(a, b, c, d)| (b - a).max(d - c))
            .unwrap_or(0.0);
        (extent * 1e-4).max(1e-9)
    }

    /// Points covering the set with gaps at most `spacing`.
    pub fn densify(&self, spacing: f64) -> Vec<Complex64> {
        let mut out = self.points.clone();
        for &(a, b) in &self.intervals {
            out.extend(densify_segment(a, b, spacing));
        }
        for c in &self.circles {
            let n = ((2.0 * std::f64::consts::PI * c.radius / spacing).ceil() as usize).max(8);
            out.extend((0..n).map(|k| {
                c.center + Complex64::from_polar(c.radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64)
            }));
        }
        out
    }

    /// Distance from `z` to the set (infinite when empty).
    pub fn distance_to(&self, z: Complex64) -> f64 {
        let mut d = f64::INFINITY;
        for p in &self.points {
            d = d.min((z - p).norm());
        }
        for &(lo, hi) in &self.intervals {
            let x = z.re.clamp(lo, hi);
            d = d.min(Complex64::new(z.re - x, z.im).norm());
        }
        for c in &self.circles {
            d = d.min(((z - c.center).norm() - c.radius).abs());
        }
        d
    }

    /// Hausdorff distance. Exact for real sets; otherwise primitives are
    /// densified at `1e-4` of the extent and the densification error is
    /// included.
    pub fn hausdorff_distance(&self, other: &SpectralSet) -> f64 {
        match (self.is_empty(), other.is_empty()) {
            (true, true) => return 0.0,
            (true, false) | (false, true) => return f64::INFINITY,
            _ => {}
        }
        if self.is_real() && other.is_real() {
            let a = self.real_components();
            let b = other.real_components();
            return directed_1d(&a, &b).max(directed_1d(&b, &a));
        }
        self.directed_2d(other).max(other.directed_2d(self))
    }

    /// `sup_{x∈self} dist(x, other)`, with the same exactness as
    /// [`SpectralSet::hausdorff_distance`].
    pub fn directed_distance(&self, other: &SpectralSet) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        if other.is_empty() {
            return f64::INFINITY;
        }
        if self.is_real() && other.is_real() {
            return directed_1d(&self.real_components(), &other.real_components());
        }
        self.directed_2d(other)
    }

    /// A point of the set closest to `z`.
    pub fn nearest_point(&self, z: Complex64) -> Option<Complex64> {
        let mut best: Option<(f64, Complex64)> = None;
        let mut offer = |p: Complex64| {
            let d = (p - z).norm();
            if best.is_none_or(|b| d < b.0) {
                best = Some((d, p));
            }
        };
        self.points.iter().for_each(|&p| offer(p));
        for &(lo, hi) in &self.intervals {
            offer(Complex64::new(z.re.clamp(lo, hi), 0.0));
        }
        for c in &self.circles {
            let v = z - c.center;
            let dir = if v.norm() > 0.0 { v / v.norm() } else { Complex64::new(1.0, 0.0) };
            offer(c.center + dir * c.radius);
        }
        best.map(|b| b.1)
    }

    fn directed_2d(&self, other: &SpectralSet) -> f64 {
        let spacing = self.default_spacing();
        let idx = PointIndex::new(&other.points);
        let prim = SpectralSet {
            points: Vec::new(),
            intervals: other.intervals.clone(),
            circles: other.circles.clone(),
            resolution: 0.0,
        };
        let pts = self.densify(spacing);
        let d = pts
            .iter()
            .map(|&z| idx.nearest(z).min(prim.distance_to(z)))
            .fold(0.0, f64::max);
        if self.intervals.is_empty() && self.circles.is_empty() {
            d
        } else {
            d + spacing / 2.0
        }
    }

    /// Merges cloud points closer than `cell` (grid bucketing); the
    /// resolution grows by the cell diagonal.
    pub fn compact(&mut self, cell: f64) {
        if cell <= 0.0 || self.points.len() < 2 {
            return;
        }
        let mut seen = std::collections::HashSet::new();
        self.points.retain(|z| seen.insert(((z.re / cell).floor() as i64, (z.im / cell).floor() as i64)));
        self.resolution += cell * std::f64::consts::SQRT_2;
    }
}

fn max_res(parts: &[SpectralSet]) -> f64 {
    parts.iter().map(|p| p.resolution).fold(0.0, f64::max)
}

fn densify_segment(a: f64, b: f64, spacing: f64) -> impl Iterator<Item = Complex64> {
    let n = (((b - a) / spacing).ceil() as usize).max(1);
    (0..=n).map(move |k| Complex64::new(a + (b - a) * k as f64 / n as f64, 0.0))
}

/// `sup_{x∈A} dist(x, B)` for sorted disjoint interval lists. The distance
/// to `B` is piecewise linear, so the supremum sits at an endpoint of `A` or
/// at the point of `A` closest to the midpoint of a gap of `B`.
fn directed_1d(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let dist = |x: f64| -> f64 {
        let k = b.partition_point(|iv| iv.1 < x);
        let mut d = f64::INFINITY;
        if k < b.len() {
            d = d.min((b[k].0 - x).max(0.0));
        }
        if k > 0 {
            d = d.min(x - b[k - 1].1);
        }
        d
    };
    let mut best: f64 = 0.0;
    for &(lo, hi) in a {
        best = best.max(dist(lo)).max(dist(hi));
        // gaps of B overlapping [lo, hi]
        let start = b.partition_point(|iv| iv.1 < lo).saturating_sub(1);
        for w in b[start..].windows(2) {
            let (g0, g1) = (w[0].1, w[1].0);
            if g0 > hi {
                break;
            }
            let (l, h) = (lo.max(g0), hi.min(g1));
            if l <= h {
                best = best.max(dist((0.5 * (g0 + g1)).clamp(l, h)));
            }
        }
    }
    best
}

/// Nearest-neighbour lookup over a static cloud, sorted by real part.
pub struct PointIndex {
    pts: Vec<Complex64>,
}

impl PointIndex {
    pub fn new(points: &[Complex64]) -> Self {
        let mut pts = points.to_vec();
        pts.sort_by(cmp_c);
        Self { pts }
    }

    pub fn nearest(&self, z: Complex64) -> f64 {
        if self.pts.is_empty() {
            return f64::INFINITY;
        }
        let k = self.pts.partition_point(|p| p.re < z.re);
        let mut best = f64::INFINITY;
        for p in self.pts[k..].iter() {
            if p.re - z.re >= best {
                break;
            }
            best = best.min((p - z).norm());
        }
        for p in self.pts[..k].iter().rev() {
            if z.re - p.re >= best {
                break;
            }
            best = best.min((p - z).norm());
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn scale_interval() {
        let s = SpectralSet::interval(-2.0, 2.0, 0.0).scale(c(3.0));
        assert_eq!(s.intervals, vec![(-6.0, 6.0)]);
        let s = SpectralSet::interval(1.0, 2.0, 0.1).scale(c(-1.0));
        assert_eq!(s.intervals, vec![(-2.0, -1.0)]);
        assert!((s.resolution - 0.1).abs() < 1e-15);
    }

    #[test]
    fn minkowski_with_two_points() {
        let a = SpectralSet::interval(-2.0, 2.0, 0.0);
        let b = SpectralSet::from_points(vec![c(-FRAC_PI_2), c(FRAC_PI_2)], 0.0);
        let s = a.minkowski_sum(&b);
        // The translates overlap since 2 − π/2 > −2 + π/2.
        assert_eq!(s.intervals, vec![(-2.0 - FRAC_PI_2, 2.0 + FRAC_PI_2)]);
        let expect = SpectralSet::from_intervals(
            vec![(-2.0 - FRAC_PI_2, 2.0 - FRAC_PI_2), (-2.0 + FRAC_PI_2, 2.0 + FRAC_PI_2)],
            0.0,
        );
        assert_eq!(s.hausdorff_distance(&expect), 0.0);
    }

    #[test]
    fn hausdorff_basics() {
        let a = SpectralSet::from_intervals(vec![(-3.0, -1.0), (1.0, 3.0)], 0.0);
        assert_eq!(a.hausdorff_distance(&a), 0.0);
        let b = SpectralSet::interval(-3.0, 3.0, 0.0);
        // Gap midpoint 0 is at distance 1 from `a`.
        assert!((a.hausdorff_distance(&b) - 1.0).abs() < 1e-15);
        assert!((b.hausdorff_distance(&a) - 1.0).abs() < 1e-15);
        let p = SpectralSet::point(c(5.0));
        assert!((p.hausdorff_distance(&b) - 8.0).abs() < 1e-15);
        assert!(SpectralSet::empty().hausdorff_distance(&p).is_infinite());
    }

    #[test]
    fn hausdorff_complex() {
        let circ = SpectralSet::circle(Complex64::new(0.0, 0.0), 1.0, 0.0);
        let pts: Vec<_> = (0..4096)
            .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 4096.0))
            .collect();
        let cloud = SpectralSet::from_points(pts, 0.0);
        let d = circ.hausdorff_distance(&cloud);
        assert!(d < 2e-3, "{d}");
        let origin = SpectralSet::point(Complex64::new(0.0, 0.0));
        assert!((circ.hausdorff_distance(&origin) - 1.0).abs() < 1e-3);
        assert!((circ.distance_to(Complex64::new(0.0, 0.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn normalize_absorbs_points() {
        let mut s = SpectralSet::interval(0.0, 1.0, 0.0);
        s.points.push(c(0.5));
        s.points.push(c(2.0));
        s.intervals.push((0.9, 1.5));
        s.normalize();
        assert_eq!(s.intervals, vec![(0.0, 1.5)]);
        assert_eq!(s.points, vec![c(2.0)]);
    }

    #[test]
    fn real_interval_product() {
        let a = SpectralSet::interval(1.0, 3.0, 0.0);
        let b = SpectralSet::interval(-2.0, 2.0, 0.0);
        assert_eq!(a.product(&b).intervals, vec![(-6.0, 6.0)]);
    }

    #[test]
    fn compacting_bounds_error() {
        let pts: Vec<_> = (0..1000).map(|k| Complex64::new(k as f64 * 1e-4, 0.5)).collect();
        let orig = SpectralSet::from_points(pts, 0.0);
        let mut s = orig.clone();
        s.compact(1e-2);
        assert!(s.points.len() < 20);
        assert!(orig.hausdorff_distance(&s) <= s.resolution);
    }
}

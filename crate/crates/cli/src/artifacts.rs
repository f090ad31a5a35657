//! Deterministic CSV, SVG and JSON writers plus the run manifest.

use crate::error::{CliError, Result};
use corona_core::spectra::SpectralSet;
use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Output directory that records the digest of everything written to it.
pub struct ArtifactDir {
    dir: PathBuf,
    digests: BTreeMap<String, String>,
}

impl ArtifactDir {
    pub fn create(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        Ok(Self {
            dir,
            digests: BTreeMap::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let p = self.dir.join(name);
        std::fs::write(&p, bytes).map_err(|e| CliError::io(&p, e))?;
        self.digests.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).expect("artifact values serialize");
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn digests(&self) -> &BTreeMap<String, String> {
        &self.digests
    }
}

/// `re,im,tag,resolution` rows. Intervals contribute their two endpoints;
/// circles contribute their centre and the point at angle zero.
pub fn spectrum_csv(s: &SpectralSet) -> String {
    let mut out = String::from("re,im,tag,resolution\n");
    let mut row = |z: Complex64, tag: &str| {
        let _ = writeln!(out, "{},{},{},{}", z.re, z.im, tag, s.resolution);
    };
    for &(lo, hi) in &s.intervals {
        row(Complex64::new(lo, 0.0), "interval_lo");
        row(Complex64::new(hi, 0.0), "interval_hi");
    }
    for c in &s.circles {
        row(c.center, "circle_center");
        row(c.center + c.radius, "circle_edge");
    }
    for &z in &s.points {
        row(z, "point");
    }
    out
}

/// One eigenvalue per row with its distance to the predicted set.
pub fn eigenvalues_csv(eigs: &[Complex64], predicted: &SpectralSet) -> String {
    let mut out = String::from("re,im,distance_to_predicted\n");
    for z in eigs {
        let _ = writeln!(out, "{},{},{}", z.re, z.im, predicted.distance_to(*z));
    }
    out
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const PAD: f64 = 60.0;
/// Markers closer than this many pixels are drawn once.
const MARKER_CELL: f64 = 1.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - PAD - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * PAD)
    }

    fn scale(&self) -> f64 {
        (WIDTH - 2.0 * PAD) / (self.x1 - self.x0)
    }
}

fn frame_for(s: &SpectralSet) -> Frame {
    let (a, b, c, d) = s.bounding_box().unwrap_or((-1.0, 1.0, 0.0, 0.0));
    let ratio = (HEIGHT - 2.0 * PAD) / (WIDTH - 2.0 * PAD);
    let mut extent = (b - a).max((d - c) / ratio);
    if extent <= 0.0 {
        extent = 1.0;
    }
    let (cx, cy) = ((a + b) / 2.0, (c + d) / 2.0);
    // Equal scale on both axes so circles stay round.
    let half_x = 0.55 * extent;
    let half_y = half_x * ratio;
    Frame {
        x0: cx - half_x,
        x1: cx + half_x,
        y0: cy - half_y,
        y1: cy + half_y,
    }
}

fn num(x: f64) -> String {
    format!("{x:.4}")
}

/// Scatter/interval plot with the resolution in the caption and every gap
/// between real components labelled.
pub fn spectrum_svg(s: &SpectralSet, title: &str, timestamp: Option<u64>) -> String {
    let f = frame_for(s);
    let mut o = String::new();
    let _ = writeln!(
        o,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="monospace" font-size="12">"#
    );
    if let Some(t) = timestamp {
        let _ = writeln!(o, "<!-- generated at unix time {t} -->");
    }
    let _ = writeln!(o, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(o, r#"<text x="{PAD}" y="24" font-size="14">{}</text>"#, escape(title));
    // axes
    let (ya, xa) = (f.py(0.0).clamp(PAD, HEIGHT - PAD), f.px(0.0).clamp(PAD, WIDTH - PAD));
    let _ = writeln!(
        o,
        r##"<line x1="{PAD}" y1="{ya:.2}" x2="{:.2}" y2="{ya:.2}" stroke="#888"/>"##,
        WIDTH - PAD
    );
    let _ = writeln!(
        o,
        r##"<line x1="{xa:.2}" y1="{PAD}" x2="{xa:.2}" y2="{:.2}" stroke="#888"/>"##,
        HEIGHT - PAD
    );
    let _ = writeln!(
        o,
        r#"<text x="{PAD}" y="{:.2}">{}</text><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
        HEIGHT - PAD + 16.0,
        num(f.x0),
        WIDTH - PAD,
        HEIGHT - PAD + 16.0,
        num(f.x1)
    );
    for &(lo, hi) in &s.intervals {
        let (x0, x1) = (f.px(lo), f.px(hi));
        let _ = writeln!(
            o,
            r##"<rect class="interval" x="{x0:.2}" y="{:.2}" width="{:.2}" height="8" fill="#1f5fa8"/>"##,
            f.py(0.0) - 4.0,
            (x1 - x0).max(1.0)
        );
        let _ = writeln!(
            o,
            r#"<text x="{x0:.2}" y="{:.2}" text-anchor="middle">{}</text><text x="{x1:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            f.py(0.0) + 22.0,
            num(lo),
            f.py(0.0) + 22.0,
            num(hi)
        );
    }
    for c in &s.circles {
        let _ = writeln!(
            o,
            r##"<circle class="circle" cx="{:.2}" cy="{:.2}" r="{:.2}" fill="none" stroke="#1f5fa8" stroke-width="2"/>"##,
            f.px(c.center.re),
            f.py(c.center.im),
            c.radius * f.scale()
        );
    }
    let radius = if s.points.len() <= 16 { 4.0 } else { 1.5 };
    let mut seen = std::collections::BTreeSet::new();
    for z in &s.points {
        let (x, y) = (f.px(z.re), f.py(z.im));
        if seen.insert(((x / MARKER_CELL) as i64, (y / MARKER_CELL) as i64)) {
            let _ = writeln!(o, r##"<circle class="point" cx="{x:.2}" cy="{y:.2}" r="{radius}" fill="#c0392b"/>"##);
        }
    }
    if s.is_real() {
        let comps = s.real_components();
        for w in comps.windows(2) {
            let (a, b) = (w[0].1, w[1].0);
            let (x0, x1) = (f.px(a), f.px(b));
            let y = f.py(0.0) - 18.0;
            let _ = writeln!(
                o,
                r##"<line class="gap" x1="{x0:.2}" y1="{y:.2}" x2="{x1:.2}" y2="{y:.2}" stroke="#2c7a3f" stroke-dasharray="4 2"/>"##
            );
            let _ = writeln!(
                o,
                r##"<text x="{:.2}" y="{:.2}" text-anchor="middle" fill="#2c7a3f">gap ({}, {})</text>"##,
                (x0 + x1) / 2.0,
                y - 6.0,
                num(a),
                num(b)
            );
        }
    }
    let _ = writeln!(
        o,
        r#"<text class="resolution" x="{PAD}" y="{:.2}">resolution {:e} (Hausdorff)</text>"#,
        HEIGHT - 16.0,
        s.resolution
    );
    o.push_str("</svg>\n");
    o
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[derive(Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub task: String,
    pub exit_code: i32,
    /// SHA-256 of the config file as read.
    pub config_sha256: String,
    /// SHA-256 of the effective config after command-line overrides.
    pub effective_config_sha256: String,
    pub resolutions: BTreeMap<String, f64>,
    pub artifacts: &'a BTreeMap<String, String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_is_one_marker() {
        let svg = spectrum_svg(&SpectralSet::point(Complex64::new(1.0, 0.0)), "t", None);
        assert_eq!(svg.matches(r#"class="point""#).count(), 1);
        let f = frame_for(&SpectralSet::point(Complex64::new(1.0, 0.0)));
        assert!(svg.contains(&format!(r#"cx="{:.2}" cy="{:.2}""#, f.px(1.0), f.py(0.0))));
    }

    #[test]
    fn interval_is_a_bar_on_the_axis() {
        let svg = spectrum_svg(&SpectralSet::interval(-2.0, 2.0, 0.0), "t", None);
        assert_eq!(svg.matches(r#"class="interval""#).count(), 1);
        assert!(!svg.contains(r#"class="gap""#));
        assert!(svg.contains("-2.0000") && svg.contains("2.0000"));
    }

    #[test]
    fn two_components_have_an_annotated_gap() {
        let s = SpectralSet::from_intervals(vec![(-3.0, -1.0), (1.0, 3.0)], 1e-3);
        let svg = spectrum_svg(&s, "t", None);
        assert_eq!(svg.matches(r#"class="interval""#).count(), 2);
        assert_eq!(svg.matches(r#"class="gap""#).count(), 1);
        assert!(svg.contains("gap (-1.0000, 1.0000)"));
        assert!(svg.contains("resolution 1e-3"));
    }

    #[test]
    fn output_is_deterministic_and_timestamp_is_opt_in() {
        let s = SpectralSet::from_points(vec![Complex64::new(0.5, 1.0), Complex64::new(-1.0, 0.0)], 0.0)
            .union(&SpectralSet::circle(Complex64::new(0.0, 0.0), 1.0, 0.0));
        assert_eq!(spectrum_svg(&s, "t", None), spectrum_svg(&s, "t", None));
        assert!(!spectrum_svg(&s, "t", None).contains("unix time"));
        assert!(spectrum_svg(&s, "t", Some(5)).contains("unix time 5"));
        assert_eq!(spectrum_csv(&s), spectrum_csv(&s));
    }

    #[test]
    fn csv_tags_every_primitive() {
        let s = SpectralSet::interval(-1.0, 1.0, 0.5).union(&SpectralSet::point(Complex64::new(3.0, 1.0)));
        let csv = spectrum_csv(&s);
        assert_eq!(
            csv,
            "re,im,tag,resolution\n-1,0,interval_lo,0.5\n1,0,interval_hi,0.5\n3,1,point,0.5\n"
        );
    }

    #[test]
    fn digest_matches_known_value() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}

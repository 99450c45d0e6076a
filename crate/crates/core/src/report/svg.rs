use std::f64::consts::TAU;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::cloud::CloudEntry;
use super::{ReportError, Result};

/// Advance width of one character, in ems. Used both for layout and by
/// anyone re-deriving boxes from the rendered document.
pub const CHAR_WIDTH_EM: f64 = 0.6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutParams {
    pub width: f64,
    pub height: f64,
    pub min_font: f64,
    pub max_font: f64,
    /// Minimum gap between word boxes, in pixels.
    pub padding: f64,
    /// Spiral positions tried per word before it is dropped.
    pub max_steps: usize,
    pub seed: u64,
    pub font_family: String,
}

impl Default for LayoutParams {
    fn default() -> Self {
        LayoutParams {
            width: 800.0,
            height: 500.0,
            min_font: 12.0,
            max_font: 60.0,
            padding: 2.0,
            max_steps: 6000,
            seed: 0,
            font_family: "sans-serif".into(),
        }
    }
}

/// Axis-aligned box of a placed word, centred on (x, y).
#[derive(Debug, Clone, PartialEq)]
pub struct Placed {
    pub term: String,
    pub x: f64,
    pub y: f64,
    pub font_size: f64,
    pub width: f64,
    pub height: f64,
    pub color: &'static str,
}

impl Placed {
    pub fn overlaps(&self, other: &Placed, gap: f64) -> bool {
        (self.x - other.x).abs() * 2.0 < self.width + other.width + 2.0 * gap
            && (self.y - other.y).abs() * 2.0 < self.height + other.height + 2.0 * gap
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub svg: String,
    pub placed: Vec<Placed>,
    /// Terms that found no free position.
    pub dropped: Vec<String>,
}

pub fn text_box(term: &str, font_size: f64) -> (f64, f64) {
    (CHAR_WIDTH_EM * font_size * term.chars().count() as f64, font_size)
}

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Lays the entries out on an Archimedean spiral from the canvas centre,
/// largest first, and renders them as a standalone SVG document.
///
/// The spiral's starting angle comes from `params.seed`. Words that do not
/// fit are dropped with a warning.
pub fn render_svg(entries: &[CloudEntry], params: &LayoutParams) -> Result<Rendered> {
    if entries.is_empty() {
        return Err(ReportError::EmptyCloud);
    }
    if !(params.width > 0.0 && params.height > 0.0 && params.min_font > 0.0 && params.max_font >= params.min_font) {
        return Err(ReportError::Layout("canvas and font sizes must be positive with max_font >= min_font".into()));
    }
    let mut order: Vec<&CloudEntry> = entries.iter().collect();
    order.sort_by(|a, b| b.size.total_cmp(&a.size).then_with(|| a.term.cmp(&b.term)));

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let start: f64 = rng.random_range(0.0..TAU);
    let (cx, cy) = (params.width / 2.0, params.height / 2.0);
    let aspect = params.height / params.width;

    let mut placed: Vec<Placed> = Vec::new();
    let mut dropped = Vec::new();
    for entry in order {
        let font_size = round2(params.min_font + (params.max_font - params.min_font) * entry.size.clamp(0.0, 1.0));
        let (width, height) = text_box(&entry.term, font_size);
        let mut spot = None;
        for step in 0..params.max_steps {
            let theta = 0.2 * step as f64;
            let r = 2.0 * theta;
            let x = round2(cx + r * (theta + start).cos());
            let y = round2(cy + r * aspect * (theta + start).sin());
            let candidate = Placed { term: entry.term.clone(), x, y, font_size, width, height, color: entry.bucket.color() };
            let inside = x - width / 2.0 >= 0.0 && x + width / 2.0 <= params.width && y - height / 2.0 >= 0.0 && y + height / 2.0 <= params.height;
            if inside && !placed.iter().any(|p| p.overlaps(&candidate, params.padding)) {
                spot = Some(candidate);
                break;
            }
        }
        match spot {
            Some(p) => placed.push(p),
            None => dropped.push(entry.term.clone()),
        }
    }
    if !dropped.is_empty() {
        log::warn!("word cloud full: dropped {} of {} terms", dropped.len(), entries.len());
    }

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = params.width,
        h = params.height
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for p in &placed {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="{:.2}" font-family="{}" fill="{}" text-anchor="middle" dominant-baseline="central">{}</text>"#,
            p.x,
            p.y,
            p.font_size,
            escape(&params.font_family),
            p.color,
            escape(&p.term)
        );
    }
    svg.push_str("</svg>\n");
    Ok(Rendered { svg, placed, dropped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::cloud::{FrequencyBucket, Sign};

    fn entry(term: &str, size: f64) -> CloudEntry {
        CloudEntry { term: term.into(), size, bucket: FrequencyBucket::Moderate, sign: Sign::Positive, effect: size }
    }

    #[test]
    fn single_word_is_centred() {
        let r = render_svg(&[entry("i've", 1.0)], &LayoutParams::default()).unwrap();
        assert_eq!(r.placed.len(), 1);
        assert_eq!((r.placed[0].x, r.placed[0].y), (400.0, 250.0));
        assert!(r.svg.contains("i&apos;ve"));
    }

    #[test]
    fn deterministic_per_seed() {
        let entries: Vec<CloudEntry> = (0..20).map(|i| entry(&format!("w{i}"), 1.0 / (1 + i) as f64)).collect();
        let p = LayoutParams { seed: 4, ..Default::default() };
        assert_eq!(render_svg(&entries, &p).unwrap().svg, render_svg(&entries, &p).unwrap().svg);
        let q = LayoutParams { seed: 5, ..Default::default() };
        assert_ne!(render_svg(&entries, &p).unwrap().svg, render_svg(&entries, &q).unwrap().svg);
    }

    #[test]
    fn overfull_canvas_drops_terms() {
        let entries: Vec<CloudEntry> = (0..40).map(|i| entry(&format!("word{i}"), 1.0)).collect();
        let p = LayoutParams { width: 200.0, height: 120.0, ..Default::default() };
        let r = render_svg(&entries, &p).unwrap();
        assert!(!r.dropped.is_empty());
        assert_eq!(r.placed.len() + r.dropped.len(), 40);
    }

    #[test]
    fn empty_is_an_error() {
        assert!(matches!(render_svg(&[], &LayoutParams::default()), Err(ReportError::EmptyCloud)));
    }
}

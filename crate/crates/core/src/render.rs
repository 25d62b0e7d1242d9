//! Deterministic SVG rendering of layouts.
//!
//! Coordinates stay exact until the last step, where each value is scaled to
//! pixels and printed with 6 significant digits. The y axis is flipped so the
//! layout's bottom edge is at the bottom of the image.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::classify::Windmill;
use crate::error::{Error, Result};
use crate::geometry::{maximal_segments, to_f64, Layout, MaximalSegment, Orientation, Rational};

pub const MIN_WIDTH_PX: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Palette {
    #[default]
    Pastel,
    Gray,
}

impl Palette {
    fn fills(self) -> &'static [&'static str] {
        match self {
            Palette::Pastel => &["#a6cee3", "#b2df8a", "#fdbf6f", "#cab2d6", "#fb9a99", "#ffff99", "#8dd3c7", "#bebada"],
            Palette::Gray => &["#d9d9d9", "#bdbdbd", "#f0f0f0", "#969696"],
        }
    }

    fn accent(self) -> &'static str {
        match self {
            Palette::Pastel => "#d62728",
            Palette::Gray => "#000000",
        }
    }
}

impl std::str::FromStr for Palette {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pastel" => Ok(Palette::Pastel),
            "gray" => Ok(Palette::Gray),
            _ => Err(Error::Input(format!("unknown palette {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Highlight {
    pub rects: BTreeSet<String>,
    /// Indices into `maximal_segments(layout)`.
    pub segments: BTreeSet<usize>,
}

impl Highlight {
    pub fn len(&self) -> usize {
        self.rects.len() + self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The segments of `layout` equal to the given ones.
    pub fn segments_of(layout: &Layout, wanted: &[MaximalSegment]) -> Result<Highlight> {
        let all = maximal_segments(layout)?;
        let segments = all.iter().enumerate().filter(|(_, s)| wanted.contains(s)).map(|(i, _)| i).collect();
        Ok(Highlight { rects: BTreeSet::new(), segments })
    }

    pub fn windmill(layout: &Layout, w: &Windmill) -> Result<Highlight> {
        Self::segments_of(layout, &w.arms)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderOptions {
    pub width_px: u32,
    pub label: bool,
    pub highlight: Option<Highlight>,
    pub palette: Palette,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { width_px: 512, label: false, highlight: None, palette: Palette::default() }
    }
}

/// Decimal with 6 significant digits, trailing zeros dropped.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (5 - mag).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// One `<rect>` per layout rect plus one element per highlight, in a
/// `0 0 width height` viewport.
pub fn render_svg(layout: &Layout, opts: &RenderOptions) -> Result<String> {
    if opts.width_px < MIN_WIDTH_PX {
        return Err(Error::Input(format!("width_px must be at least {MIN_WIDTH_PX}")));
    }
    let bb = layout.bbox();
    let scale = Rational::from_integer(opts.width_px.into()) / bb.width();
    let px = |q: Rational| sig6(to_f64(&(q * &scale)));
    let x = |q: &Rational| px(q - &bb.x0);
    let y = |q: &Rational| px(&bb.y1 - q);
    let w = opts.width_px.to_string();
    let h = px(bb.height());
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let fills = opts.palette.fills();
    for (i, r) in layout.rects().iter().enumerate() {
        let _ = writeln!(
            out,
            r##"<rect id="{}" x="{}" y="{}" width="{}" height="{}" fill="{}" stroke="#333333" stroke-width="1"/>"##,
            escape(&r.id),
            x(&r.x0),
            y(&r.y1),
            px(r.width()),
            px(r.height()),
            fills[i % fills.len()]
        );
    }
    if opts.label {
        for r in layout.rects() {
            let two = Rational::from_integer(2.into());
            let (cx, cy) = ((&r.x0 + &r.x1) / &two, (&r.y0 + &r.y1) / &two);
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" dominant-baseline="middle">{}</text>"#,
                x(&cx),
                y(&cy),
                escape(&r.id)
            );
        }
    }
    if let Some(hl) = &opts.highlight {
        let accent = opts.palette.accent();
        for id in &hl.rects {
            let r = layout.rect(id).ok_or_else(|| Error::Input(format!("unknown rect {id:?} in highlight")))?;
            let _ = writeln!(
                out,
                r#"<rect class="highlight" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="{accent}" stroke-width="3"/>"#,
                x(&r.x0),
                y(&r.y1),
                px(r.width()),
                px(r.height())
            );
        }
        let segs = if hl.segments.is_empty() { vec![] } else { maximal_segments(layout)? };
        for &i in &hl.segments {
            let s = segs.get(i).ok_or_else(|| Error::Input(format!("segment index {i} out of range")))?;
            let (x1, y1, x2, y2) = match s.orientation {
                Orientation::Vertical => (x(&s.axis_coord), y(&s.lo), x(&s.axis_coord), y(&s.hi)),
                Orientation::Horizontal => (x(&s.lo), y(&s.axis_coord), x(&s.hi), y(&s.axis_coord)),
            };
            let _ = writeln!(out, r#"<line class="highlight" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{accent}" stroke-width="4"/>"#);
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::find_windmill;
    use crate::classify::tests::pinwheel_cw;
    use crate::geometry::{validate_layout, Rect};

    fn unit() -> Layout {
        validate_layout(Rect::int("", 0, 0, 1, 1), vec![Rect::int("a", 0, 0, 1, 1)]).unwrap()
    }

    fn elements(svg: &str) -> usize {
        svg.matches("<rect ").count() + svg.matches("<line ").count()
    }

    #[test]
    fn unit_square() {
        let svg = render_svg(&unit(), &RenderOptions::default()).unwrap();
        assert_eq!(svg.matches("<rect ").count(), 1);
        assert!(svg.contains(r#"viewBox="0 0 512 512""#));
    }

    #[test]
    fn pinwheel_with_windmill() {
        let l = pinwheel_cw();
        let w = find_windmill(&l).unwrap();
        let hl = Highlight::windmill(&l, &w).unwrap();
        assert_eq!(hl.len(), 4);
        let svg = render_svg(&l, &RenderOptions { highlight: Some(hl), label: true, ..Default::default() }).unwrap();
        assert_eq!(svg.matches("<rect ").count(), 5);
        assert_eq!(svg.matches("<line ").count(), 4);
        assert_eq!(elements(&svg), 9);
        assert_eq!(svg.matches("<text ").count(), 5);
    }

    #[test]
    fn deterministic() {
        let l = pinwheel_cw();
        let o = RenderOptions { label: true, ..Default::default() };
        assert_eq!(render_svg(&l, &o).unwrap(), render_svg(&l, &o).unwrap());
    }

    #[test]
    fn rect_highlight_and_flip() {
        let l = validate_layout(Rect::int("", 0, 0, 2, 1), vec![Rect::int("lo", 0, 0, 2, 1)]).unwrap();
        let hl = Highlight { rects: ["lo".to_string()].into(), segments: BTreeSet::new() };
        let svg = render_svg(&l, &RenderOptions { width_px: 100, highlight: Some(hl), palette: Palette::Gray, label: false }).unwrap();
        assert!(svg.contains(r#"viewBox="0 0 100 50""#));
        assert_eq!(elements(&svg), 2);
    }

    #[test]
    fn too_narrow() {
        assert!(render_svg(&unit(), &RenderOptions { width_px: 10, ..Default::default() }).is_err());
    }

    #[test]
    fn six_digits() {
        assert_eq!(sig6(1.0 / 3.0), "0.333333");
        assert_eq!(sig6(512.0), "512");
        assert_eq!(sig6(170.6666666), "170.667");
        assert_eq!(sig6(1234567.0), "1234567");
        assert_eq!(sig6(0.0), "0");
    }

    #[test]
    fn palette_names() {
        assert_eq!("gray".parse::<Palette>().unwrap(), Palette::Gray);
        assert!("neon".parse::<Palette>().is_err());
    }
}

//! Exact-rational rectangular layouts and their segment / contact structure.
//!
//! A [`Layout`] is validated once at construction. Every combinatorial
//! question afterwards (segments, contacts, slices) is answered on a
//! [`Grid`]: the sorted distinct x and y coordinates replaced by their ranks.
//! Order and equality of coordinates are all that these questions depend on.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `"3"`, `"-2"` or `"p/q"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::ParseRational(s.to_string());
    let t = s.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| bad())?;
    let d = BigInt::from_str(d).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Lowest-terms text form, `"p"` or `"p/q"`.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Decimal approximation, only for display purposes.
pub fn to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

/// serde adapter storing a rational as a string.
pub mod rational_str {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orientation {
    #[serde(rename = "horizontal")]
    Horizontal,
    #[serde(rename = "vertical")]
    Vertical,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    #[serde(default)]
    pub id: String,
    #[serde(with = "rational_str")]
    pub x0: Rational,
    #[serde(with = "rational_str")]
    pub y0: Rational,
    #[serde(with = "rational_str")]
    pub x1: Rational,
    #[serde(with = "rational_str")]
    pub y1: Rational,
}

impl Rect {
    pub fn new(id: impl Into<String>, x0: Rational, y0: Rational, x1: Rational, y1: Rational) -> Self {
        Rect { id: id.into(), x0, y0, x1, y1 }
    }

    /// Integer-coordinate shorthand, handy in tests and fixtures.
    pub fn int(id: impl Into<String>, x0: i64, y0: i64, x1: i64, y1: i64) -> Self {
        Rect::new(id, int(x0), int(y0), int(x1), int(y1))
    }

    pub fn width(&self) -> Rational {
        &self.x1 - &self.x0
    }

    pub fn height(&self) -> Rational {
        &self.y1 - &self.y0
    }

    /// height / width
    pub fn aspect(&self) -> Rational {
        self.height() / self.width()
    }

    pub fn area(&self) -> Rational {
        self.width() * self.height()
    }
}

/// A side of a rect lying on a maximal segment, with the covered sub-interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SideRef {
    pub rect: String,
    #[serde(with = "rational_str")]
    pub lo: Rational,
    #[serde(with = "rational_str")]
    pub hi: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaximalSegment {
    pub orientation: Orientation,
    #[serde(with = "rational_str")]
    pub axis_coord: Rational,
    #[serde(with = "rational_str")]
    pub lo: Rational,
    #[serde(with = "rational_str")]
    pub hi: Rational,
    /// Rects left of a vertical segment, or below a horizontal one.
    pub left_or_below_sides: Vec<SideRef>,
    pub right_or_above_sides: Vec<SideRef>,
}

/// `a` is left of `b` for a vertical contact, below `b` for a horizontal one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Contact {
    pub a: String,
    pub b: String,
    pub orientation: Orientation,
    #[serde(with = "rational_str")]
    pub lo: Rational,
    #[serde(with = "rational_str")]
    pub hi: Rational,
}

/// Rank-compressed coordinates. `cells[i] = [x0, x1, y0, y1]` as ranks into
/// `xs` / `ys`.
/// (axis, is the high side, cell, lo, hi) for one side of one cell.
type SideEntry = (u32, bool, usize, u32, u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    pub xs: Vec<Rational>,
    pub ys: Vec<Rational>,
    pub cells: Vec<[u32; 4]>,
}

impl Grid {
    fn build(rects: &[Rect]) -> Grid {
        let mut xs: Vec<Rational> = rects.iter().flat_map(|r| [r.x0.clone(), r.x1.clone()]).collect();
        let mut ys: Vec<Rational> = rects.iter().flat_map(|r| [r.y0.clone(), r.y1.clone()]).collect();
        xs.sort();
        xs.dedup();
        ys.sort();
        ys.dedup();
        let rank = |v: &[Rational], q: &Rational| v.binary_search(q).expect("coordinate present") as u32;
        let cells = rects.iter().map(|r| [rank(&xs, &r.x0), rank(&xs, &r.x1), rank(&ys, &r.y0), rank(&ys, &r.y1)]).collect();
        Grid { xs, ys, cells }
    }

    pub fn max_x(&self) -> u32 {
        (self.xs.len() - 1) as u32
    }

    pub fn max_y(&self) -> u32 {
        (self.ys.len() - 1) as u32
    }

    /// Maximal segments, vertical ones first, each group sorted by (axis, lo).
    pub fn segments(&self) -> Vec<GridSegment> {
        let mut out = Vec::new();
        for orient in [Orientation::Vertical, Orientation::Horizontal] {
            let (limit, sides): (u32, Vec<SideEntry>) = match orient {
                Orientation::Vertical => {
                    (self.max_x(), self.cells.iter().enumerate().flat_map(|(i, c)| [(c[1], false, i, c[2], c[3]), (c[0], true, i, c[2], c[3])]).collect())
                }
                Orientation::Horizontal => {
                    (self.max_y(), self.cells.iter().enumerate().flat_map(|(i, c)| [(c[3], false, i, c[0], c[1]), (c[2], true, i, c[0], c[1])]).collect())
                }
            };
            let mut lines: BTreeMap<u32, Vec<(u32, u32, bool, usize)>> = BTreeMap::new();
            for (axis, high, i, lo, hi) in sides {
                if axis == 0 || axis == limit {
                    continue;
                }
                lines.entry(axis).or_default().push((lo, hi, high, i));
            }
            for (axis, mut entries) in lines {
                entries.sort();
                let mut cur: Option<GridSegment> = None;
                for (lo, hi, high, i) in entries {
                    let start_new = match &cur {
                        Some(s) => lo > s.hi,
                        None => true,
                    };
                    if start_new {
                        if let Some(s) = cur.take() {
                            out.push(s);
                        }
                        cur = Some(GridSegment { orientation: orient, axis, lo, hi, low: vec![], high: vec![] });
                    }
                    let s = cur.as_mut().unwrap();
                    s.hi = s.hi.max(hi);
                    if high {
                        s.high.push((i, lo, hi));
                    } else {
                        s.low.push((i, lo, hi));
                    }
                }
                if let Some(s) = cur {
                    out.push(s);
                }
            }
        }
        out
    }

    /// Contacts derived from segments: `(low rect, high rect, orientation, lo, hi)`.
    pub fn contacts(&self) -> Vec<GridContact> {
        let mut out = Vec::new();
        for s in self.segments() {
            let (mut i, mut j) = (0, 0);
            while i < s.low.len() && j < s.high.len() {
                let (a, alo, ahi) = s.low[i];
                let (b, blo, bhi) = s.high[j];
                let lo = alo.max(blo);
                let hi = ahi.min(bhi);
                if lo < hi {
                    out.push(GridContact { a, b, orientation: s.orientation, lo, hi });
                }
                if ahi <= bhi {
                    i += 1;
                } else {
                    j += 1;
                }
            }
        }
        out
    }

    /// Indices of the rects at the bbox corners: bottom-left, bottom-right,
    /// top-right, top-left.
    pub fn corner_cells(&self) -> [usize; 4] {
        let (mx, my) = (self.max_x(), self.max_y());
        let mut out = [usize::MAX; 4];
        for (i, c) in self.cells.iter().enumerate() {
            if c[0] == 0 && c[2] == 0 {
                out[0] = i;
            }
            if c[1] == mx && c[2] == 0 {
                out[1] = i;
            }
            if c[1] == mx && c[3] == my {
                out[2] = i;
            }
            if c[0] == 0 && c[3] == my {
                out[3] = i;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSegment {
    pub orientation: Orientation,
    pub axis: u32,
    pub lo: u32,
    pub hi: u32,
    pub low: Vec<(usize, u32, u32)>,
    pub high: Vec<(usize, u32, u32)>,
}

impl GridSegment {
    /// True if some rect has this whole segment as one of its sides.
    pub fn is_full_side(&self) -> bool {
        self.low.iter().chain(self.high.iter()).any(|&(_, lo, hi)| lo == self.lo && hi == self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridContact {
    pub a: usize,
    pub b: usize,
    pub orientation: Orientation,
    pub lo: u32,
    pub hi: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    bbox: Rect,
    rects: Vec<Rect>,
    generic: bool,
    grid: Grid,
    index: HashMap<String, usize>,
}

/// Validates a subdivision of `bbox` into `rects`.
pub fn validate_layout(bbox: Rect, rects: Vec<Rect>) -> Result<Layout> {
    if rects.is_empty() {
        return Err(Error::EmptyLayout);
    }
    if bbox.x0 >= bbox.x1 || bbox.y0 >= bbox.y1 {
        return Err(Error::DegenerateRect("bbox".into()));
    }
    let mut index = HashMap::with_capacity(rects.len());
    for (i, r) in rects.iter().enumerate() {
        if r.x0 >= r.x1 || r.y0 >= r.y1 {
            return Err(Error::DegenerateRect(r.id.clone()));
        }
        if r.x0 < bbox.x0 || r.x1 > bbox.x1 || r.y0 < bbox.y0 || r.y1 > bbox.y1 {
            return Err(Error::Coverage(format!("rect {} leaves the bounding box", r.id)));
        }
        if index.insert(r.id.clone(), i).is_some() {
            return Err(Error::DuplicateId(r.id.clone()));
        }
    }
    let grid = Grid::build(&rects);
    if grid.xs[0] != bbox.x0 || grid.xs[grid.xs.len() - 1] != bbox.x1 || grid.ys[0] != bbox.y0 || grid.ys[grid.ys.len() - 1] != bbox.y1 {
        return Err(Error::Coverage("rects do not reach every side of the bounding box".into()));
    }
    // sweep over x0 for interior overlaps
    let mut order: Vec<usize> = (0..rects.len()).collect();
    order.sort_by_key(|&i| grid.cells[i][0]);
    for (k, &i) in order.iter().enumerate() {
        let a = grid.cells[i];
        for &j in &order[k + 1..] {
            let b = grid.cells[j];
            if b[0] >= a[1] {
                break;
            }
            if a[2] < b[3] && b[2] < a[3] {
                return Err(Error::Overlap(rects[i].id.clone(), rects[j].id.clone()));
            }
        }
    }
    let total: Rational = rects.iter().map(Rect::area).fold(Rational::zero(), |acc, a| acc + a);
    if total != bbox.area() {
        return Err(Error::Coverage(format!("area {} differs from bbox area {}", format_rational(&total), format_rational(&bbox.area()))));
    }
    let mut corners: HashMap<(u32, u32), u8> = HashMap::new();
    for c in &grid.cells {
        for p in [(c[0], c[2]), (c[1], c[2]), (c[1], c[3]), (c[0], c[3])] {
            *corners.entry(p).or_default() += 1;
        }
    }
    let generic = corners.values().all(|&k| k < 4);
    Ok(Layout { bbox, rects, generic, grid, index })
}

impl Layout {
    pub fn bbox(&self) -> &Rect {
        &self.bbox
    }

    pub fn rects(&self) -> &[Rect] {
        &self.rects
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    pub fn is_generic(&self) -> bool {
        self.generic
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn rect(&self, id: &str) -> Option<&Rect> {
        self.index_of(id).map(|i| &self.rects[i])
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.rects.iter().map(|r| r.id.as_str())
    }

    pub(crate) fn require_generic(&self) -> Result<()> {
        if self.generic {
            Ok(())
        } else {
            Err(Error::Nongeneric)
        }
    }

    /// Translated to the origin and scaled to width 1.
    pub fn normalized(&self) -> Layout {
        let w = self.bbox.width();
        let (ox, oy) = (self.bbox.x0.clone(), self.bbox.y0.clone());
        let f = |r: &Rect| Rect::new(r.id.clone(), (&r.x0 - &ox) / &w, (&r.y0 - &oy) / &w, (&r.x1 - &ox) / &w, (&r.y1 - &oy) / &w);
        let bbox = f(&self.bbox);
        let rects = self.rects.iter().map(f).collect();
        Layout { bbox, rects, generic: self.generic, grid: Grid::build_like(&self.grid, &ox, &oy, &w), index: self.index.clone() }
    }

    /// Mirror across the diagonal x = y. Aspect ratios invert.
    pub fn transposed(&self) -> Layout {
        let t = |r: &Rect| Rect::new(r.id.clone(), r.y0.clone(), r.x0.clone(), r.y1.clone(), r.x1.clone());
        validate_layout(t(&self.bbox), self.rects.iter().map(t).collect()).expect("transpose of a valid layout")
    }

    /// Affine image: each coordinate mapped by `x -> ax * x + bx`, `y -> ay * y + by`
    /// with positive scale factors.
    pub fn affine(&self, ax: &Rational, bx: &Rational, ay: &Rational, by: &Rational) -> Layout {
        debug_assert!(ax.is_positive() && ay.is_positive());
        let f = |r: &Rect| Rect::new(r.id.clone(), ax * &r.x0 + bx, ay * &r.y0 + by, ax * &r.x1 + bx, ay * &r.y1 + by);
        let bbox = f(&self.bbox);
        let rects: Vec<Rect> = self.rects.iter().map(f).collect();
        let grid = Grid::build(&rects);
        Layout { bbox, rects, generic: self.generic, grid, index: self.index.clone() }
    }

    /// Number of bbox corners touched by rect `i`.
    pub fn corner_count(&self, i: usize) -> usize {
        self.grid.corner_cells().iter().filter(|&&c| c == i).count()
    }

    /// Ids of the rects at the corners, ccw from bottom-left.
    pub fn corner_rects(&self) -> [String; 4] {
        self.grid.corner_cells().map(|i| self.rects[i].id.clone())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(LayoutJson::from(self)).expect("layout serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Layout> {
        let j: LayoutJson = serde_json::from_str(s).map_err(|e| Error::Input(e.to_string()))?;
        j.into_layout()
    }
}

impl Grid {
    fn build_like(g: &Grid, ox: &Rational, oy: &Rational, w: &Rational) -> Grid {
        Grid { xs: g.xs.iter().map(|x| (x - ox) / w).collect(), ys: g.ys.iter().map(|y| (y - oy) / w).collect(), cells: g.cells.clone() }
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", serde_json::to_string(&LayoutJson::from(self)).unwrap())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoxJson {
    #[serde(with = "rational_str")]
    pub x0: Rational,
    #[serde(with = "rational_str")]
    pub y0: Rational,
    #[serde(with = "rational_str")]
    pub x1: Rational,
    #[serde(with = "rational_str")]
    pub y1: Rational,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayoutJson {
    pub bbox: BoxJson,
    pub rects: Vec<Rect>,
}

impl From<&Layout> for LayoutJson {
    fn from(l: &Layout) -> Self {
        let b = &l.bbox;
        LayoutJson { bbox: BoxJson { x0: b.x0.clone(), y0: b.y0.clone(), x1: b.x1.clone(), y1: b.y1.clone() }, rects: l.rects.clone() }
    }
}

impl LayoutJson {
    pub fn into_layout(self) -> Result<Layout> {
        let b = self.bbox;
        validate_layout(Rect::new("", b.x0, b.y0, b.x1, b.y1), self.rects)
    }
}

fn seg_to_public(layout: &Layout, s: &GridSegment) -> MaximalSegment {
    let g = &layout.grid;
    let (axis_vals, span_vals) = match s.orientation {
        Orientation::Vertical => (&g.xs, &g.ys),
        Orientation::Horizontal => (&g.ys, &g.xs),
    };
    let side = |v: &[(usize, u32, u32)]| {
        v.iter()
            .map(|&(i, lo, hi)| SideRef { rect: layout.rects[i].id.clone(), lo: span_vals[lo as usize].clone(), hi: span_vals[hi as usize].clone() })
            .collect()
    };
    MaximalSegment {
        orientation: s.orientation,
        axis_coord: axis_vals[s.axis as usize].clone(),
        lo: span_vals[s.lo as usize].clone(),
        hi: span_vals[s.hi as usize].clone(),
        left_or_below_sides: side(&s.low),
        right_or_above_sides: side(&s.high),
    }
}

pub fn maximal_segments(layout: &Layout) -> Result<Vec<MaximalSegment>> {
    layout.require_generic()?;
    Ok(layout.grid.segments().iter().map(|s| seg_to_public(layout, s)).collect())
}

pub(crate) fn contacts_unchecked(layout: &Layout) -> Vec<Contact> {
    let g = &layout.grid;
    g.contacts()
        .into_iter()
        .map(|c| {
            let span = match c.orientation {
                Orientation::Vertical => &g.ys,
                Orientation::Horizontal => &g.xs,
            };
            Contact {
                a: layout.rects[c.a].id.clone(),
                b: layout.rects[c.b].id.clone(),
                orientation: c.orientation,
                lo: span[c.lo as usize].clone(),
                hi: span[c.hi as usize].clone(),
            }
        })
        .collect()
}

pub fn contacts(layout: &Layout) -> Result<Vec<Contact>> {
    layout.require_generic()?;
    Ok(contacts_unchecked(layout))
}

/// Contact pairs as an order-independent set `(min id, max id, orientation)`.
pub fn contact_set(contacts: &[Contact]) -> HashSet<(String, String, Orientation)> {
    contacts.iter().map(|c| if c.a <= c.b { (c.a.clone(), c.b.clone(), c.orientation) } else { (c.b.clone(), c.a.clone(), c.orientation) }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn unit() -> Rect {
        Rect::int("", 0, 0, 1, 1)
    }

    fn half() -> Rational {
        rat(1, 2)
    }

    #[test]
    fn rational_text_roundtrip() {
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert_eq!(format_rational(&rat(3, 2)), "3/2");
        assert_eq!(format_rational(&int(7)), "7");
        assert_eq!(parse_rational(" -2 ").unwrap(), int(-2));
        assert!(parse_rational("x/2").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn single_rect_is_generic() {
        let l = validate_layout(unit(), vec![Rect::int("r1", 0, 0, 1, 1)]).unwrap();
        assert!(l.is_generic());
        assert_eq!(l.len(), 1);
        assert!(maximal_segments(&l).unwrap().is_empty());
    }

    #[test]
    fn vertical_split() {
        let l = validate_layout(unit(), vec![Rect::new("r1", int(0), int(0), half(), int(1)), Rect::new("r2", half(), int(0), int(1), int(1))]).unwrap();
        assert!(l.is_generic());
        let segs = maximal_segments(&l).unwrap();
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].orientation, Orientation::Vertical);
        assert_eq!(segs[0].axis_coord, half());
        let cs = contacts(&l).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!((cs[0].a.as_str(), cs[0].b.as_str(), cs[0].orientation), ("r1", "r2", Orientation::Vertical));
    }

    #[test]
    fn four_quadrants_are_nongeneric() {
        let l = validate_layout(
            unit(),
            vec![
                Rect::new("a", int(0), int(0), half(), half()),
                Rect::new("b", half(), int(0), int(1), half()),
                Rect::new("c", half(), half(), int(1), int(1)),
                Rect::new("d", int(0), half(), half(), int(1)),
            ],
        )
        .unwrap();
        assert!(!l.is_generic());
        assert_eq!(maximal_segments(&l), Err(Error::Nongeneric));
        assert_eq!(contacts(&l), Err(Error::Nongeneric));
    }

    #[test]
    fn validation_errors() {
        let overlap = validate_layout(Rect::int("", 0, 0, 2, 1), vec![Rect::int("a", 0, 0, 2, 1), Rect::int("b", 1, 0, 2, 1)]);
        assert!(matches!(overlap, Err(Error::Overlap(_, _))));
        let gap = validate_layout(Rect::int("", 0, 0, 2, 1), vec![Rect::int("a", 0, 0, 1, 1)]);
        assert!(matches!(gap, Err(Error::Coverage(_))));
        let dup = validate_layout(Rect::int("", 0, 0, 2, 1), vec![Rect::int("a", 0, 0, 1, 1), Rect::int("a", 1, 0, 2, 1)]);
        assert_eq!(dup, Err(Error::DuplicateId("a".into())));
        let hole = validate_layout(
            Rect::int("", 0, 0, 3, 3),
            vec![Rect::int("a", 0, 0, 3, 1), Rect::int("b", 0, 2, 3, 3), Rect::int("c", 0, 1, 1, 2), Rect::int("d", 1, 1, 2, 2)],
        );
        assert!(matches!(hole, Err(Error::Coverage(_))));
        assert_eq!(validate_layout(unit(), vec![]), Err(Error::EmptyLayout));
    }

    #[test]
    fn stack_contacts() {
        let l =
            validate_layout(Rect::int("", 0, 0, 1, 3), vec![Rect::int("r1", 0, 0, 1, 1), Rect::int("r2", 0, 1, 1, 2), Rect::int("r3", 0, 2, 1, 3)]).unwrap();
        let set = contact_set(&contacts(&l).unwrap());
        let expect: HashSet<_> = [("r1".to_string(), "r2".to_string(), Orientation::Horizontal), ("r2".to_string(), "r3".to_string(), Orientation::Horizontal)]
            .into_iter()
            .collect();
        assert_eq!(set, expect);
    }

    #[test]
    fn json_roundtrip_and_normalization() {
        let s = r#"{"bbox":{"x0":"1","y0":"1","x1":"3","y1":"2"},"rects":[{"id":"r1","x0":"1","y0":"1","x1":"2","y1":"2"},{"id":"r2","x0":"2","y0":"1","x1":"3","y1":"2"}]}"#;
        let l = Layout::from_json_str(s).unwrap();
        let n = l.normalized();
        assert_eq!(n.bbox().x1, int(1));
        assert_eq!(n.bbox().y1, half());
        assert_eq!(n.rect("r2").unwrap().x0, half());
        let again = Layout::from_json_str(&l.to_string()).unwrap();
        assert_eq!(again, l);
        assert_eq!(n.grid().cells, l.grid().cells);
    }
}

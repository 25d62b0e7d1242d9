//! Exact realization of aspect-ratio assignments on sliceable layouts, and
//! witness assignments that a layout cannot realize.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::classify::{cells_in, grid_windmills, is_one_sided, slicing_tree, Chirality, Cut, SlicingTree};
use crate::error::{Error, Result};
use crate::geometry::{contact_set, contacts_unchecked, format_rational, int, parse_rational, validate_layout, Layout, Orientation, Rational, Rect};

/// Aspect ratio (height / width) per rect id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AspectAssignment {
    pub ratios: BTreeMap<String, Rational>,
}

#[derive(Serialize, Deserialize)]
struct AssignmentJson {
    ratios: BTreeMap<String, String>,
}

impl Serialize for AspectAssignment {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AssignmentJson { ratios: self.ratios.iter().map(|(k, v)| (k.clone(), format_rational(v))).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for AspectAssignment {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = AssignmentJson::deserialize(d)?;
        let mut ratios = BTreeMap::new();
        for (k, v) in j.ratios {
            let q = parse_rational(&v).map_err(serde::de::Error::custom)?;
            if q <= Rational::zero() {
                return Err(serde::de::Error::custom(format!("ratio for {k} must be positive")));
            }
            ratios.insert(k, q);
        }
        Ok(AspectAssignment { ratios })
    }
}

impl AspectAssignment {
    pub fn new(ratios: impl IntoIterator<Item = (String, Rational)>) -> Self {
        AspectAssignment { ratios: ratios.into_iter().collect() }
    }

    /// The layout's own ratios.
    pub fn of_layout(layout: &Layout) -> Self {
        Self::new(layout.rects().iter().map(|r| (r.id.clone(), r.aspect())))
    }

    pub fn get(&self, id: &str) -> Option<&Rational> {
        self.ratios.get(id)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Input(e.to_string()))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("assignment serializes")
    }
}

enum Node<'a> {
    Leaf(&'a str),
    Inner(Cut, usize, usize),
}

/// Preorder arena so that deep trees need no recursion.
fn flatten(tree: &SlicingTree) -> Vec<Node<'_>> {
    let mut nodes = Vec::new();
    // (tree, slot to patch in parent)
    let mut stack: Vec<(&SlicingTree, Option<(usize, bool)>)> = vec![(tree, None)];
    while let Some((t, parent)) = stack.pop() {
        let id = nodes.len();
        if let Some((p, second)) = parent {
            if let Node::Inner(_, a, b) = &mut nodes[p] {
                if second {
                    *b = id;
                } else {
                    *a = id;
                }
            }
        }
        match t {
            SlicingTree::Leaf { leaf } => nodes.push(Node::Leaf(leaf)),
            SlicingTree::Node { cut, first, second } => {
                nodes.push(Node::Inner(*cut, 0, 0));
                stack.push((second, Some((id, true))));
                stack.push((first, Some((id, false))));
            }
        }
    }
    nodes
}

/// The unique realization of `alpha` with the guillotine structure of
/// `tree`, normalized to width 1 at the origin.
pub fn realize_sliceable(tree: &SlicingTree, alpha: &AspectAssignment) -> Result<Layout> {
    let nodes = flatten(tree);
    let mut size: Vec<(Rational, Rational)> = vec![(Rational::zero(), Rational::zero()); nodes.len()];
    // children come after parents in preorder
    for i in (0..nodes.len()).rev() {
        size[i] = match nodes[i] {
            Node::Leaf(id) => {
                let a = alpha.get(id).ok_or_else(|| Error::Assignment(format!("no ratio for {id}")))?;
                if *a <= Rational::zero() {
                    return Err(Error::Assignment(format!("ratio for {id} must be positive")));
                }
                (Rational::one(), a.clone())
            }
            Node::Inner(Cut::V, a, b) => {
                let s = &size[a].1 / &size[b].1;
                (&size[a].0 + &size[b].0 * &s, size[a].1.clone())
            }
            Node::Inner(Cut::H, a, b) => {
                let s = &size[a].0 / &size[b].0;
                (size[a].0.clone(), &size[a].1 + &size[b].1 * &s)
            }
        };
    }
    let root_scale = Rational::one() / &size[0].0;
    let mut place: Vec<Option<(Rational, Rational, Rational)>> = vec![None; nodes.len()];
    place[0] = Some((Rational::zero(), Rational::zero(), root_scale.clone()));
    let mut rects = Vec::with_capacity(nodes.len() / 2 + 1);
    for i in 0..nodes.len() {
        let (x, y, f) = place[i].take().expect("parent placed first");
        match nodes[i] {
            Node::Leaf(id) => {
                let (w, h) = (&size[i].0 * &f, &size[i].1 * &f);
                rects.push(Rect::new(id, x.clone(), y.clone(), &x + w, &y + h));
            }
            Node::Inner(cut, a, b) => {
                let (bx, by, s) = match cut {
                    Cut::V => (&x + &size[a].0 * &f, y.clone(), &size[a].1 / &size[b].1),
                    Cut::H => (x.clone(), &y + &size[a].1 * &f, &size[a].0 / &size[b].0),
                };
                place[b] = Some((bx, by, &f * s));
                place[a] = Some((x, y, f));
            }
        }
    }
    let bbox = Rect::new("", Rational::zero(), Rational::zero(), Rational::one(), &size[0].1 * &root_scale);
    validate_layout(bbox, rects)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Strong,
    Weak,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Change {
    Gained,
    Lost,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContactDiff {
    pub a: String,
    pub b: String,
    pub orientation: Orientation,
    pub change: Change,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizationReport {
    pub layout: Layout,
    pub mode: Mode,
    pub equivalent: bool,
    pub contact_diffs: Vec<ContactDiff>,
    pub generic: bool,
}

impl RealizationReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "mode": self.mode,
            "equivalent": self.equivalent,
            "generic": self.generic,
            "contact_diffs": self.contact_diffs,
            "layout": self.layout.to_json(),
        })
    }
}

/// Realizes `alpha` on the layout's slicing tree and compares.
///
/// Strong mode compares oriented contacts and requires a generic result.
/// Weak mode only asks for the guillotine structure, which the realization
/// keeps by construction.
pub fn strong_realizability(layout: &Layout, alpha: &AspectAssignment, mode: Mode) -> Result<RealizationReport> {
    let tree = slicing_tree(layout).ok_or(Error::NotSliceable)?;
    for id in layout.ids() {
        if alpha.get(id).is_none() {
            return Err(Error::Assignment(format!("no ratio for {id}")));
        }
    }
    if let Some(extra) = alpha.ratios.keys().find(|k| layout.index_of(k).is_none()) {
        return Err(Error::Assignment(format!("ratio given for unknown rect {extra}")));
    }
    let real = realize_sliceable(&tree, alpha)?;
    let generic = real.is_generic();
    let (equivalent, contact_diffs) = match mode {
        Mode::Weak => (true, vec![]),
        Mode::Strong => {
            let before = contact_set(&contacts_unchecked(layout));
            let after = contact_set(&contacts_unchecked(&real));
            let mut diffs: Vec<ContactDiff> = after
                .difference(&before)
                .map(|(a, b, o)| ContactDiff { a: a.clone(), b: b.clone(), orientation: *o, change: Change::Gained })
                .chain(before.difference(&after).map(|(a, b, o)| ContactDiff { a: a.clone(), b: b.clone(), orientation: *o, change: Change::Lost }))
                .collect();
            diffs.sort_by(|x, y| (&x.a, &x.b, x.change as u8).cmp(&(&y.a, &y.b, y.change as u8)));
            (diffs.is_empty() && generic, diffs)
        }
    };
    Ok(RealizationReport { layout: real, mode, equivalent, contact_diffs, generic })
}

/// Every rect has exactly its assigned ratio.
pub fn ratios_match(layout: &Layout, alpha: &AspectAssignment) -> bool {
    layout.rects().iter().all(|r| alpha.get(&r.id) == Some(&r.aspect()))
}

fn region_aspect(layout: &Layout, ids: &[&str]) -> Rational {
    let rs: Vec<&Rect> = ids.iter().map(|id| layout.rect(id).expect("id in layout")).collect();
    let x0 = rs.iter().map(|r| &r.x0).min().unwrap();
    let x1 = rs.iter().map(|r| &r.x1).max().unwrap();
    let y0 = rs.iter().map(|r| &r.y0).min().unwrap();
    let y1 = rs.iter().map(|r| &r.y1).max().unwrap();
    (y1 - y0) / (x1 - x0)
}

/// Stretches a region vertically so its aspect becomes `target`; every leaf's
/// ratio scales by the same factor.
fn retarget(out: &mut AspectAssignment, layout: &Layout, ids: &[&str], target: &Rational) {
    let k = target / region_aspect(layout, ids);
    for id in ids {
        let q = out.ratios.get_mut(*id).expect("id in assignment");
        *q = &*q * &k;
    }
}

fn rank_box(layout: &Layout, ids: &[&str]) -> [u32; 4] {
    let cells = &layout.grid().cells;
    let mut b = [u32::MAX, 0, u32::MAX, 0];
    for id in ids {
        let c = cells[layout.index_of(id).unwrap()];
        b[0] = b[0].min(c[0]);
        b[1] = b[1].max(c[1]);
        b[2] = b[2].min(c[2]);
        b[3] = b[3].max(c[3]);
    }
    b
}

/// The V node whose cut runs along the vertical segment at rank `x` spanning
/// ranks `y0..y1`; returns the children just left and right of it.
fn regions_at<'a>(layout: &Layout, t: &'a SlicingTree, x: u32, y0: u32, y1: u32) -> Option<(&'a SlicingTree, &'a SlicingTree)> {
    let SlicingTree::Node { cut, first, second } = t else { return None };
    if *cut == Cut::V {
        let fb = rank_box(layout, &first.leaves());
        if fb[1] == x && fb[2] == y0 && fb[3] == y1 {
            let a = *first.multiway_children_or_self(Cut::V).last().unwrap();
            let b = second.multiway_children_or_self(Cut::V)[0];
            return Some((a, b));
        }
    }
    regions_at(layout, first, x, y0, y1).or_else(|| regions_at(layout, second, x, y0, y1))
}

impl SlicingTree {
    fn multiway_children_or_self(&self, cut: Cut) -> Vec<&SlicingTree> {
        match self {
            SlicingTree::Node { cut: c, .. } if *c == cut => self.multiway_children(),
            _ => vec![self],
        }
    }
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn brick_witness_vertical(layout: &Layout, tree: &SlicingTree, seg: &crate::geometry::GridSegment) -> Result<AspectAssignment> {
    let (a, b) =
        regions_at(layout, tree, seg.axis, seg.lo, seg.hi).ok_or_else(|| Error::InternalVerification("violating segment is not a slice of the tree".into()))?;
    let split = |t: &SlicingTree| -> Result<(Vec<String>, Vec<String>)> {
        let ch = t.multiway_children_or_self(Cut::H);
        if ch.len() < 2 {
            return Err(Error::InternalVerification("brick region is not horizontally sliced".into()));
        }
        let bottom = ch[0].leaves().into_iter().map(String::from).collect();
        let top = ch[1..].iter().flat_map(|c| c.leaves()).map(String::from).collect();
        Ok((bottom, top))
    };
    let (ab, at) = split(a)?;
    let (bb, bt) = split(b)?;
    let cut_of = |bottom: &[String]| rank_box(layout, &refs(bottom))[3];
    let (one, two) = (int(1), int(2));
    let targets = if cut_of(&ab) > cut_of(&bb) { [&one, &two, &two, &one] } else { [&two, &one, &one, &two] };
    let mut out = AspectAssignment::of_layout(layout);
    for (ids, t) in [(&ab, targets[0]), (&at, targets[1]), (&bb, targets[2]), (&bt, targets[3])] {
        retarget(&mut out, layout, &refs(ids), t);
    }
    Ok(out)
}

/// For a sliceable layout that is not one-sided: an assignment that turns a
/// two-sided segment into a brick with ratios 2, 1, 1, 2. `None` if the layout
/// is one-sided.
pub fn brick_witness(layout: &Layout) -> Result<Option<AspectAssignment>> {
    layout.require_generic()?;
    let tree = slicing_tree(layout).ok_or(Error::NotSliceable)?;
    if is_one_sided(layout).one_sided {
        return Ok(None);
    }
    let segs = layout.grid().segments();
    let seg = segs.iter().find(|s| !s.is_full_side()).expect("not one-sided");
    if seg.orientation == Orientation::Vertical {
        return brick_witness_vertical(layout, &tree, seg).map(Some);
    }
    let t = layout.transposed();
    let tt = slicing_tree(&t).ok_or(Error::NotSliceable)?;
    let tsegs = t.grid().segments();
    let tseg = tsegs.iter().find(|s| s.orientation == Orientation::Vertical && s.axis == seg.axis && s.lo == seg.lo).expect("transposed segment");
    let w = brick_witness_vertical(&t, &tt, tseg)?;
    Ok(Some(AspectAssignment::new(w.ratios.into_iter().map(|(k, v)| (k, v.recip())))))
}

/// Boxes `[x0, x1, y0, y1]` in ranks that are exactly tiled by a subset of
/// rects, with those rects' indices.
fn tiled_boxes(cells: &[[u32; 4]], within: &[usize]) -> Vec<([u32; 4], Vec<usize>)> {
    let mut out = vec![];
    let area = |c: &[u32; 4]| (c[1] - c[0]) as u64 * (c[3] - c[2]) as u64;
    for &i in within {
        for &j in within {
            let b = [cells[i][0], cells[j][1], cells[i][2], cells[j][3]];
            if b[0] >= b[1] || b[2] >= b[3] {
                continue;
            }
            let inside = cells_in_subset(cells, within, b);
            if inside.iter().map(|&k| area(&cells[k])).sum::<u64>() == area(&b) {
                out.push((b, inside));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn cells_in_subset(cells: &[[u32; 4]], within: &[usize], b: [u32; 4]) -> Vec<usize> {
    within
        .iter()
        .copied()
        .filter(|&k| {
            let c = cells[k];
            c[0] >= b[0] && c[1] <= b[1] && c[2] >= b[2] && c[3] <= b[3]
        })
        .collect()
}

fn sub_layout(layout: &Layout, idx: &[usize]) -> Layout {
    let rects: Vec<Rect> = idx.iter().map(|&i| layout.rects()[i].clone()).collect();
    let x0 = rects.iter().map(|r| r.x0.clone()).min().unwrap();
    let x1 = rects.iter().map(|r| r.x1.clone()).max().unwrap();
    let y0 = rects.iter().map(|r| r.y0.clone()).min().unwrap();
    let y1 = rects.iter().map(|r| r.y1.clone()).max().unwrap();
    validate_layout(Rect::new("", x0, y0, x1, y1), rects).expect("tiled sub-box")
}

/// Assignment in the spirit of the quadrant construction: the windmill
/// center gets 1, the two quadrants its arms sweep into become very tall,
/// the other two very flat, so no layout with the same contacts realizes it.
/// `None` for sliceable layouts.
pub fn windmill_witness(layout: &Layout) -> Result<Option<AspectAssignment>> {
    layout.require_generic()?;
    if slicing_tree(layout).is_some() {
        return Ok(None);
    }
    let cells = &layout.grid().cells;
    let all: Vec<usize> = (0..layout.len()).collect();
    // minimal non-sliceable tiled sub-box
    let mut best: Option<([u32; 4], Vec<usize>)> = None;
    for (b, inside) in tiled_boxes(cells, &all) {
        if best.as_ref().is_some_and(|(_, v)| v.len() <= inside.len()) {
            continue;
        }
        if inside.len() >= 5 && slicing_tree(&sub_layout(layout, &inside)).is_none() {
            best = Some((b, inside));
        }
    }
    let (mbox, members) = best.ok_or_else(|| Error::InternalVerification("no non-sliceable sub-box".into()))?;
    // collapse maximal proper sub-boxes with at least two rects
    let mut proper: Vec<([u32; 4], Vec<usize>)> = tiled_boxes(cells, &members).into_iter().filter(|(b, v)| v.len() >= 2 && *b != mbox).collect();
    proper.sort_by_key(|(b, v)| (std::cmp::Reverse(v.len()), *b));
    let mut taken = vec![false; layout.len()];
    let mut groups: Vec<Vec<usize>> = vec![];
    for (_, v) in proper {
        if v.iter().all(|&k| !taken[k]) {
            v.iter().for_each(|&k| taken[k] = true);
            groups.push(v);
        }
    }
    for &k in &members {
        if !taken[k] {
            groups.push(vec![k]);
        }
    }
    groups.sort();
    let cell_rects: Vec<Rect> = groups
        .iter()
        .enumerate()
        .map(|(gi, g)| {
            let sub = sub_layout(layout, g);
            let b = sub.bbox();
            Rect::new(format!("g{gi}"), b.x0.clone(), b.y0.clone(), b.x1.clone(), b.y1.clone())
        })
        .collect();
    let mb = sub_layout(layout, &members).bbox().clone();
    let reduced = validate_layout(mb, cell_rects)?;
    let cell_alpha = quadrant_assignment(&reduced)?;
    let mut out = AspectAssignment::of_layout(layout);
    for (gi, g) in groups.iter().enumerate() {
        let ids: Vec<&str> = g.iter().map(|&k| layout.rects()[k].id.as_str()).collect();
        retarget(&mut out, layout, &ids, &cell_alpha[gi]);
    }
    Ok(Some(out))
}

/// Ratios per cell of an irreducible non-sliceable layout, in cell order.
fn quadrant_assignment(reduced: &Layout) -> Result<Vec<Rational>> {
    let segs = reduced.grid().segments();
    let cells = &reduced.grid().cells;
    let wm = grid_windmills(&segs)
        .into_iter()
        .find(|w| cells_in(cells, w.region).len() == 1)
        .ok_or_else(|| Error::InternalVerification("reduced layout has no single-cell windmill center".into()))?;
    let n = int(reduced.len() as i64);
    let six_n = int(6) * &n;
    let tall = six_n.clone();
    let flat = (int(6) * &n * &n).recip();
    let h_split = &tall + &flat;
    let v_split = (six_n.recip() + int(6) * &n * &n).recip();
    let mx = reduced.grid().max_x();
    let [cx0, cx1, cy0, cy1] = wm.region;
    // mirror x for counterclockwise windmills so the clockwise rules apply
    let (cx0, cx1) = match wm.chirality {
        Chirality::Clockwise => (cx0, cx1),
        Chirality::Counterclockwise => (mx - cx1, mx - cx0),
    };
    let mut out = vec![];
    for c in cells {
        let (x0, x1) = match wm.chirality {
            Chirality::Clockwise => (c[0], c[1]),
            Chirality::Counterclockwise => (mx - c[1], mx - c[0]),
        };
        let (y0, y1) = (c[2], c[3]);
        if [x0, x1, y0, y1] == [cx0, cx1, cy0, cy1] {
            out.push(Rational::one());
            continue;
        }
        // rays of a clockwise windmill
        let t_ray = y0 < cy1 && cy1 < y1 && x1 > cx0;
        let b_ray = y0 < cy0 && cy0 < y1 && x0 < cx1;
        let r_ray = x0 < cx1 && cx1 < x1 && y0 < cy1;
        let l_ray = x0 < cx0 && cx0 < x1 && y1 > cy0;
        let q = if t_ray || b_ray {
            h_split.clone()
        } else if r_ray || l_ray {
            v_split.clone()
        } else if (x0 >= cx0 && y0 >= cy1) || (x1 <= cx1 && y1 <= cy0) {
            tall.clone()
        } else {
            flat.clone()
        };
        out.push(q);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::tests::{brick, pinwheel_ccw, pinwheel_cw, stack3};
    use crate::geometry::rat;

    fn alpha(pairs: &[(&str, Rational)]) -> AspectAssignment {
        AspectAssignment::new(pairs.iter().map(|(k, v)| (k.to_string(), v.clone())))
    }

    #[test]
    fn single_leaf() {
        let l = realize_sliceable(&SlicingTree::leaf("r"), &alpha(&[("r", rat(3, 2))])).unwrap();
        assert_eq!(l.rects()[0], Rect::new("r", int(0), int(0), int(1), rat(3, 2)));
    }

    #[test]
    fn two_squares() {
        let t = SlicingTree::v(SlicingTree::leaf("r1"), SlicingTree::leaf("r2"));
        let l = realize_sliceable(&t, &alpha(&[("r1", int(1)), ("r2", int(1))])).unwrap();
        assert_eq!(l.bbox().aspect(), rat(1, 2));
        assert_eq!(l.rect("r2").unwrap().x0, rat(1, 2));
    }

    #[test]
    fn association_does_not_matter() {
        let (a, b, c) = (SlicingTree::leaf("a"), SlicingTree::leaf("b"), SlicingTree::leaf("c"));
        let al = alpha(&[("a", int(2)), ("b", rat(1, 3)), ("c", rat(5, 7))]);
        let t1 = SlicingTree::h(a.clone(), SlicingTree::h(b.clone(), c.clone()));
        let t2 = SlicingTree::h(SlicingTree::h(a, b), c);
        assert_eq!(realize_sliceable(&t1, &al).unwrap(), realize_sliceable(&t2, &al).unwrap());
    }

    #[test]
    fn brick_2112_gains_r1_r4() {
        let al = alpha(&[("r1", int(2)), ("r2", int(1)), ("r3", int(1)), ("r4", int(2))]);
        let rep = strong_realizability(&brick(), &al, Mode::Strong).unwrap();
        assert!(!rep.equivalent);
        assert!(ratios_match(&rep.layout, &al));
        assert_eq!(rep.layout.rect("r2").unwrap().y1, rat(1, 3) * rep.layout.bbox().y1.clone());
        assert!(rep.contact_diffs.contains(&ContactDiff { a: "r1".into(), b: "r4".into(), orientation: Orientation::Vertical, change: Change::Gained }));
        let weak = strong_realizability(&brick(), &al, Mode::Weak).unwrap();
        assert!(weak.equivalent && weak.contact_diffs.is_empty());
    }

    #[test]
    fn own_ratios_reproduce_layout() {
        for l in [stack3(), brick()] {
            let rep = strong_realizability(&l, &AspectAssignment::of_layout(&l), Mode::Strong).unwrap();
            assert!(rep.equivalent);
            assert_eq!(rep.layout, l.normalized());
        }
    }

    #[test]
    fn not_sliceable_is_an_error() {
        let al = AspectAssignment::of_layout(&pinwheel_cw());
        assert_eq!(strong_realizability(&pinwheel_cw(), &al, Mode::Strong).unwrap_err(), Error::NotSliceable);
    }

    #[test]
    fn brick_witness_values() {
        let w = brick_witness(&brick()).unwrap().unwrap();
        assert_eq!(w, alpha(&[("r1", int(2)), ("r2", int(1)), ("r3", int(1)), ("r4", int(2))]));
        assert!(brick_witness(&stack3()).unwrap().is_none());
        // same brick lying on its side
        let t = brick().transposed();
        let w = brick_witness(&t).unwrap().unwrap();
        assert!(!strong_realizability(&t, &w, Mode::Strong).unwrap().equivalent);
    }

    #[test]
    fn pinwheel_witness_values() {
        for l in [pinwheel_cw(), pinwheel_ccw()] {
            let w = windmill_witness(&l).unwrap().unwrap();
            assert_eq!(w.get("c"), Some(&int(1)));
            let tall = [w.get("r_t"), w.get("r_b")];
            let flat = [w.get("r_l"), w.get("r_r")];
            let (t, f) = if l == pinwheel_cw() { (tall, flat) } else { (flat, tall) };
            assert!(t.iter().all(|q| *q == Some(&int(30))), "{w:?}");
            assert!(f.iter().all(|q| *q == Some(&rat(1, 150))), "{w:?}");
        }
        assert!(windmill_witness(&stack3()).unwrap().is_none());
    }

    #[test]
    fn outside_rects_keep_ratio() {
        // rects outside the minimal non-sliceable sub-box keep their ratio
        let l = validate_layout(
            Rect::int("", 0, 0, 4, 3),
            vec![
                Rect::int("c", 1, 1, 2, 2),
                Rect::int("r_b", 0, 0, 2, 1),
                Rect::int("r_r", 2, 0, 3, 2),
                Rect::int("r_t", 1, 2, 3, 3),
                Rect::int("r_l", 0, 1, 1, 3),
                Rect::int("x", 3, 0, 4, 3),
            ],
        )
        .unwrap();
        let w = windmill_witness(&l).unwrap().unwrap();
        assert_eq!(w.get("x"), Some(&int(3)));
        assert_eq!(w.get("r_t"), Some(&int(30)));
    }

    #[test]
    fn collapsed_center() {
        let l = validate_layout(
            Rect::int("", 0, 0, 6, 6),
            vec![
                Rect::int("c1", 2, 2, 3, 4),
                Rect::int("c2", 3, 2, 4, 4),
                Rect::int("b", 0, 0, 4, 2),
                Rect::int("r", 4, 0, 6, 4),
                Rect::int("t", 2, 4, 6, 6),
                Rect::int("l", 0, 2, 2, 6),
            ],
        )
        .unwrap();
        let w = windmill_witness(&l).unwrap().unwrap();
        assert_eq!(w.get("c1"), Some(&int(2)));
        assert_eq!(w.get("c2"), Some(&int(2)));
        assert_eq!(w.get("t"), Some(&int(30)));
        assert_eq!(w.get("l"), Some(&rat(1, 150)));
    }

    #[test]
    fn assignment_json() {
        let a = alpha(&[("r1", int(2)), ("r2", rat(1, 3))]);
        let s = a.to_json_string();
        assert_eq!(s, r#"{"ratios":{"r1":"2","r2":"1/3"}}"#);
        assert_eq!(AspectAssignment::from_json_str(&s).unwrap(), a);
        assert!(AspectAssignment::from_json_str(r#"{"ratios":{"a":"-1"}}"#).is_err());
    }
}

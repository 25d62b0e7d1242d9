//! Sliceability, windmills, one-sidedness and the aspect-ratio class.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{maximal_segments, GridSegment, Layout, MaximalSegment, Orientation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Cut {
    /// Vertical line; `first` is the left part.
    V,
    /// Horizontal line; `first` is the bottom part.
    H,
}

impl Cut {
    pub fn other(self) -> Cut {
        match self {
            Cut::V => Cut::H,
            Cut::H => Cut::V,
        }
    }
}

/// Binary guillotine tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SlicingTree {
    Leaf { leaf: String },
    Node { cut: Cut, first: Box<SlicingTree>, second: Box<SlicingTree> },
}

impl SlicingTree {
    pub fn leaf(id: impl Into<String>) -> Self {
        SlicingTree::Leaf { leaf: id.into() }
    }

    pub fn node(cut: Cut, first: SlicingTree, second: SlicingTree) -> Self {
        SlicingTree::Node { cut, first: Box::new(first), second: Box::new(second) }
    }

    pub fn v(first: SlicingTree, second: SlicingTree) -> Self {
        Self::node(Cut::V, first, second)
    }

    pub fn h(first: SlicingTree, second: SlicingTree) -> Self {
        Self::node(Cut::H, first, second)
    }

    /// Leaf ids, left to right / bottom to top.
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                SlicingTree::Leaf { leaf } => out.push(leaf.as_str()),
                SlicingTree::Node { first, second, .. } => {
                    stack.push(second);
                    stack.push(first);
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.leaves().len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Children of the maximal run of same-orientation nodes starting here.
    pub fn multiway_children(&self) -> Vec<&SlicingTree> {
        match self {
            SlicingTree::Leaf { .. } => vec![],
            SlicingTree::Node { cut, .. } => {
                let mut out = vec![];
                let mut stack = vec![self];
                while let Some(t) = stack.pop() {
                    match t {
                        SlicingTree::Node { cut: c, first, second } if c == cut => {
                            stack.push(second);
                            stack.push(first);
                        }
                        other => out.push(other),
                    }
                }
                out
            }
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("tree serializes")
    }
}

impl fmt::Display for SlicingTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlicingTree::Leaf { leaf } => write!(f, "{leaf}"),
            SlicingTree::Node { cut, first, second } => write!(f, "{cut:?}({first},{second})"),
        }
    }
}

/// Smallest rank strictly inside `(lo, hi)` at which no rect of `idx` is cut,
/// along axis 0 (x) or 1 (y).
fn first_cut(cells: &[[u32; 4]], idx: &[usize], lo: u32, axis: usize) -> Option<u32> {
    let mut spans: Vec<(u32, u32)> = idx.iter().map(|&i| (cells[i][2 * axis], cells[i][2 * axis + 1])).collect();
    spans.sort_unstable();
    let mut reach = lo;
    for (a, b) in spans {
        if a > lo && reach <= a {
            return Some(a);
        }
        reach = reach.max(b);
    }
    None
}

fn build(layout: &Layout, idx: Vec<usize>, lo: [u32; 2]) -> Option<SlicingTree> {
    let cells = &layout.grid().cells;
    if idx.len() == 1 {
        return Some(SlicingTree::leaf(&layout.rects()[idx[0]].id));
    }
    for (axis, cut) in [(0usize, Cut::V), (1, Cut::H)] {
        if let Some(at) = first_cut(cells, &idx, lo[axis], axis) {
            let (a, b): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| cells[i][2 * axis + 1] <= at);
            let mut lo2 = lo;
            lo2[axis] = at;
            let first = build(layout, a, lo)?;
            let second = build(layout, b, lo2)?;
            return Some(SlicingTree::node(cut, first, second));
        }
    }
    None
}

/// Guillotine tree by greedy extraction: leftmost vertical slice first, else
/// lowest horizontal slice. Multiway slices nest to the right.
pub fn slicing_tree(layout: &Layout) -> Option<SlicingTree> {
    build(layout, (0..layout.len()).collect(), [0, 0])
}

pub fn is_sliceable(layout: &Layout) -> bool {
    slicing_tree(layout).is_some()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chirality {
    /// Top arm runs to the right, right arm down, and so on.
    Clockwise,
    Counterclockwise,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Windmill {
    /// Rects inside the region enclosed by the arms.
    pub center: Vec<String>,
    /// Bottom, right, top, left.
    pub arms: [MaximalSegment; 4],
    pub chirality: Chirality,
}

/// Grid-level windmill: segment indices bottom, right, top, left and the
/// enclosed region `[x0, x1, y0, y1]` in ranks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct GridWindmill {
    pub arms: [usize; 4],
    pub region: [u32; 4],
    pub chirality: Chirality,
}

/// For every segment, the segment whose interior holds each endpoint
/// (low end, high end); `None` on the bbox.
fn abutments(segs: &[GridSegment]) -> Vec<[Option<usize>; 2]> {
    let mut lines: HashMap<(Orientation, u32), Vec<usize>> = HashMap::new();
    for (i, s) in segs.iter().enumerate() {
        lines.entry((s.orientation, s.axis)).or_default().push(i);
    }
    for v in lines.values_mut() {
        v.sort_by_key(|&i| segs[i].lo);
    }
    let find = |o: Orientation, axis: u32, at: u32| -> Option<usize> {
        let v = lines.get(&(o, axis))?;
        let k = v.partition_point(|&i| segs[i].lo < at);
        // candidate is the last segment starting strictly before `at`
        let i = *v.get(k.checked_sub(1)?)?;
        (segs[i].hi > at).then_some(i)
    };
    segs.iter()
        .map(|s| {
            let o = match s.orientation {
                Orientation::Vertical => Orientation::Horizontal,
                Orientation::Horizontal => Orientation::Vertical,
            };
            [find(o, s.lo, s.axis), find(o, s.hi, s.axis)]
        })
        .collect()
}

pub(crate) fn grid_windmills(segs: &[GridSegment]) -> Vec<GridWindmill> {
    let ab = abutments(segs);
    let mut out = vec![];
    for (t, s) in segs.iter().enumerate() {
        if s.orientation != Orientation::Horizontal {
            continue;
        }
        // clockwise: T.left -> L, L.bottom -> B, B.right -> R, R.top -> T
        let cw = (|| {
            let l = ab[t][0]?;
            let b = ab[l][0]?;
            let r = ab[b][1]?;
            (ab[r][1]? == t).then_some((b, r, l))
        })();
        if let Some((b, r, l)) = cw {
            out.push(GridWindmill { arms: [b, r, t, l], region: [segs[l].axis, segs[r].axis, segs[b].axis, s.axis], chirality: Chirality::Clockwise });
        }
        // counterclockwise: T.right -> R, R.bottom -> B, B.left -> L, L.top -> T
        let ccw = (|| {
            let r = ab[t][1]?;
            let b = ab[r][0]?;
            let l = ab[b][0]?;
            (ab[l][1]? == t).then_some((b, r, l))
        })();
        if let Some((b, r, l)) = ccw {
            out.push(GridWindmill { arms: [b, r, t, l], region: [segs[l].axis, segs[r].axis, segs[b].axis, s.axis], chirality: Chirality::Counterclockwise });
        }
    }
    out
}

pub(crate) fn cells_in(cells: &[[u32; 4]], region: [u32; 4]) -> Vec<usize> {
    (0..cells.len())
        .filter(|&i| {
            let c = cells[i];
            c[0] >= region[0] && c[1] <= region[1] && c[2] >= region[2] && c[3] <= region[3]
        })
        .collect()
}

fn public_windmill(layout: &Layout, publ: &[MaximalSegment], w: &GridWindmill) -> Windmill {
    Windmill {
        center: cells_in(&layout.grid().cells, w.region).into_iter().map(|i| layout.rects()[i].id.clone()).collect(),
        arms: w.arms.map(|i| publ[i].clone()),
        chirality: w.chirality,
    }
}

/// Some windmill, preferring one whose center is a single rect.
pub fn find_windmill(layout: &Layout) -> Option<Windmill> {
    if !layout.is_generic() {
        return None;
    }
    let segs = layout.grid().segments();
    let all = grid_windmills(&segs);
    let cells = &layout.grid().cells;
    let pick = all.iter().find(|w| cells_in(cells, w.region).len() == 1).or(all.first())?;
    let publ = maximal_segments(layout).ok()?;
    Some(public_windmill(layout, &publ, pick))
}

pub fn find_windmills(layout: &Layout) -> Vec<Windmill> {
    if !layout.is_generic() {
        return vec![];
    }
    let segs = layout.grid().segments();
    let publ = maximal_segments(layout).expect("generic");
    grid_windmills(&segs).iter().map(|w| public_windmill(layout, &publ, w)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OneSidedReport {
    pub one_sided: bool,
    pub violating: Vec<MaximalSegment>,
}

/// Every maximal segment is a full side of some rect.
pub fn is_one_sided(layout: &Layout) -> OneSidedReport {
    let segs = layout.grid().segments();
    let bad: Vec<usize> = (0..segs.len()).filter(|&i| !segs[i].is_full_side()).collect();
    let violating = if bad.is_empty() || !layout.is_generic() {
        vec![]
    } else {
        let publ = maximal_segments(layout).expect("generic");
        bad.into_iter().map(|i| publ[i].clone()).collect()
    };
    OneSidedReport { one_sided: segs.iter().all(GridSegment::is_full_side), violating }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AruClass {
    #[serde(rename = "StronglyARU")]
    StronglyAru,
    #[serde(rename = "WeaklyARUOnly")]
    WeaklyAruOnly,
    #[serde(rename = "NotARU")]
    NotAru,
}

pub fn aru_class(layout: &Layout) -> AruClass {
    if !is_sliceable(layout) {
        AruClass::NotAru
    } else if is_one_sided(layout).one_sided {
        AruClass::StronglyAru
    } else {
        AruClass::WeaklyAruOnly
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::geometry::{int, validate_layout, Rect};

    pub(crate) fn stack3() -> Layout {
        validate_layout(Rect::int("", 0, 0, 1, 3), vec![Rect::int("r1", 0, 0, 1, 1), Rect::int("r2", 0, 1, 1, 2), Rect::int("r3", 0, 2, 1, 3)]).unwrap()
    }

    pub(crate) fn brick() -> Layout {
        // left column split at 2/3, right column at 1/3 (scaled by 6)
        validate_layout(
            Rect::int("", 0, 0, 6, 6),
            vec![Rect::int("r2", 0, 0, 3, 4), Rect::int("r1", 0, 4, 3, 6), Rect::int("r4", 3, 0, 6, 2), Rect::int("r3", 3, 2, 6, 6)],
        )
        .unwrap()
    }

    pub(crate) fn pinwheel_cw() -> Layout {
        validate_layout(
            Rect::int("", 0, 0, 3, 3),
            vec![
                Rect::int("c", 1, 1, 2, 2),
                Rect::int("r_b", 0, 0, 2, 1),
                Rect::int("r_r", 2, 0, 3, 2),
                Rect::int("r_t", 1, 2, 3, 3),
                Rect::int("r_l", 0, 1, 1, 3),
            ],
        )
        .unwrap()
    }

    pub(crate) fn pinwheel_ccw() -> Layout {
        validate_layout(
            Rect::int("", 0, 0, 3, 3),
            vec![
                Rect::int("c", 1, 1, 2, 2),
                Rect::int("r_b", 0, 0, 1, 2),
                Rect::int("r_r", 1, 0, 3, 1),
                Rect::int("r_t", 2, 1, 3, 3),
                Rect::int("r_l", 0, 2, 2, 3),
            ],
        )
        .unwrap()
    }

    #[test]
    fn stack_tree() {
        let t = slicing_tree(&stack3()).unwrap();
        assert_eq!(t, SlicingTree::h(SlicingTree::leaf("r1"), SlicingTree::h(SlicingTree::leaf("r2"), SlicingTree::leaf("r3"))));
        assert_eq!(t.leaves(), vec!["r1", "r2", "r3"]);
        assert_eq!(t.multiway_children().len(), 3);
    }

    #[test]
    fn brick_tree() {
        let t = slicing_tree(&brick()).unwrap();
        assert_eq!(
            t.to_json_string(),
            r#"{"cut":"V","first":{"cut":"H","first":{"leaf":"r2"},"second":{"leaf":"r1"}},"second":{"cut":"H","first":{"leaf":"r4"},"second":{"leaf":"r3"}}}"#
        );
        let back: SlicingTree = serde_json::from_str(&t.to_json_string()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn pinwheel_not_sliceable() {
        assert!(slicing_tree(&pinwheel_cw()).is_none());
        let w = find_windmill(&pinwheel_cw()).unwrap();
        assert_eq!(w.center, vec!["c"]);
        assert_eq!(w.chirality, Chirality::Clockwise);
        assert_eq!(w.arms[2].axis_coord, int(2));
        assert_eq!(w.arms[2].hi, int(3));
        let w = find_windmill(&pinwheel_ccw()).unwrap();
        assert_eq!(w.chirality, Chirality::Counterclockwise);
        assert_eq!(find_windmills(&pinwheel_cw()).len(), 1);
    }

    #[test]
    fn windmill_with_split_center() {
        // the pinwheel with its center cut in two: still a windmill, center holds 2 rects
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
        assert!(slicing_tree(&l).is_none());
        let w = find_windmill(&l).unwrap();
        assert_eq!(w.center, vec!["c1", "c2"]);
    }

    #[test]
    fn sliceable_layouts_have_no_windmill() {
        for l in [stack3(), brick()] {
            assert!(find_windmill(&l).is_none());
        }
    }

    #[test]
    fn one_sidedness() {
        assert!(is_one_sided(&pinwheel_cw()).one_sided);
        let b = is_one_sided(&brick());
        assert!(!b.one_sided);
        assert_eq!(b.violating.len(), 1);
        assert_eq!(b.violating[0].orientation, Orientation::Vertical);
        let single = validate_layout(Rect::int("", 0, 0, 1, 1), vec![Rect::int("a", 0, 0, 1, 1)]).unwrap();
        assert!(is_one_sided(&single).one_sided);
    }

    #[test]
    fn classes() {
        assert_eq!(aru_class(&stack3()), AruClass::StronglyAru);
        assert_eq!(aru_class(&brick()), AruClass::WeaklyAruOnly);
        assert_eq!(aru_class(&pinwheel_cw()), AruClass::NotAru);
        assert_eq!(serde_json::to_string(&AruClass::WeaklyAruOnly).unwrap(), "\"WeaklyARUOnly\"");
    }

    #[test]
    fn segment_counts() {
        for l in [stack3(), brick(), pinwheel_cw(), pinwheel_ccw()] {
            assert_eq!(maximal_segments(&l).unwrap().len(), l.len() - 1);
        }
    }
}

//! Recognition of duals of one-sided sliceable layouts.
//!
//! An instance `(G, C, P)` is a near-triangulation `G` with a minimum number
//! of bbox corners `C(v)` per vertex and a list `P` of ordered pairs `(a, b)`
//! whose rects must sit at two ccw-consecutive bbox corners, `a` first. The
//! recursion peels off a cut vertex (split) or a pivot, a rect spanning a full
//! side of the bbox (remove), and rebuilds a layout from the pieces.
//!
//! `split_instance` and `remove_instance` carry `(C, P)` as given. Pairs name
//! rects, not corners, so a rect on two corners can satisfy two pairs through
//! different corners. The search therefore tracks an exact corner pattern
//! instead: four slots, ccw from bottom-left, each a vertex or a wildcard,
//! up to rotation. Every layout returned has been checked against the graph.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::classify::{is_one_sided, slicing_tree, Cut, SlicingTree};
use crate::dualgraph::{articulation_points, components, dual, is_near_triangulation, PlaneGraph};
use crate::error::{Error, Result};
use crate::geometry::{int, Layout};
use crate::realize::{realize_sliceable, AspectAssignment};

/// Stack for the recursion, which can be as deep as the vertex count.
const STACK_BYTES: usize = 512 << 20;
const C_CAP: u8 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: PlaneGraph,
    /// Missing vertices have count 0.
    pub corner_count: BTreeMap<String, u8>,
    pub corner_pairs: Vec<(String, String)>,
}

impl Instance {
    /// `C = 0`, `P` empty.
    pub fn initial(graph: PlaneGraph) -> Result<Self> {
        Self::new(graph, BTreeMap::new(), vec![])
    }

    pub fn new(graph: PlaneGraph, corner_count: BTreeMap<String, u8>, corner_pairs: Vec<(String, String)>) -> Result<Self> {
        if !is_near_triangulation(&graph) {
            return Err(Error::InvalidInstance("graph is not a near-triangulation".into()));
        }
        let outer: BTreeSet<&str> = graph.outer_face_labels().into_iter().collect();
        let mut cc = BTreeMap::new();
        for (v, &c) in &corner_count {
            graph.lookup(v)?;
            if c > 0 {
                if !outer.contains(v.as_str()) {
                    return Err(Error::InvalidInstance(format!("{v} has a corner count but is not on the outer face")));
                }
                cc.insert(v.clone(), c.min(C_CAP));
            }
        }
        for (a, b) in &corner_pairs {
            for x in [a, b] {
                graph.lookup(x)?;
                if !outer.contains(x.as_str()) {
                    return Err(Error::InvalidInstance(format!("pair endpoint {x} is not on the outer face")));
                }
            }
        }
        let mut pairs = corner_pairs;
        dedup_keep_order(&mut pairs);
        Ok(Instance { graph, corner_count: cc, corner_pairs: pairs })
    }

    pub fn count(&self, v: &str) -> u8 {
        self.corner_count.get(v).copied().unwrap_or(0)
    }

    /// `C(V)`.
    pub fn total_count(&self) -> u32 {
        self.corner_count.values().map(|&c| c as u32).sum()
    }

    /// `K = {v : C(v) > 0}`.
    pub fn k(&self) -> BTreeSet<String> {
        self.corner_count.iter().filter(|(_, &c)| c > 0).map(|(v, _)| v.clone()).collect()
    }

    fn sub(&self) -> Sub {
        let g = &self.graph;
        let n = g.vertex_count();
        Sub { ids: (0..n).collect(), rot: g.rotation().to_vec(), outer: (n >= 2).then(|| (g.outer_face()[0], g.outer_face()[1])) }
    }

    /// `C` and `P` over graph indices.
    fn constraints(&self) -> (BTreeMap<usize, u8>, Vec<(usize, usize)>) {
        let idx = |s: &str| self.graph.index_of(s).expect("validated");
        (self.corner_count.iter().map(|(v, &c)| (idx(v), c)).collect(), self.corner_pairs.iter().map(|(a, b)| (idx(a), idx(b))).collect())
    }

    fn from_parts(sub: &Sub, labels: &[String], c: &BTreeMap<usize, u8>, pairs: &[(usize, usize)]) -> Instance {
        let names: Vec<String> = sub.ids.iter().map(|&g| labels[g].clone()).collect();
        let graph = PlaneGraph::from_indices(names, sub.rot.clone(), sub.walk()).expect("sub-instance is a plane graph");
        Instance {
            graph,
            corner_count: c.iter().filter(|(_, &k)| k > 0).map(|(&g, &k)| (labels[g].clone(), k)).collect(),
            corner_pairs: pairs.iter().map(|&(a, b)| (labels[a].clone(), labels[b].clone())).collect(),
        }
    }
}

fn dedup_keep_order<T: PartialEq>(v: &mut Vec<T>) {
    let mut out: Vec<T> = Vec::with_capacity(v.len());
    for x in v.drain(..) {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    *v = out;
}

/// Subgraph over local indices; `ids` (ascending) maps to the input graph.
#[derive(Debug, Clone)]
struct Sub {
    ids: Vec<usize>,
    rot: Vec<Vec<usize>>,
    /// A dart on the outer face, absent for a single vertex.
    outer: Option<(usize, usize)>,
}

/// `G - v` for a vertex on the outer face. `u` and `w` (old local indices)
/// start and end the cw run of neighbors of `v`, i.e. the rects at the ends
/// of the slice along `v`.
struct Peel {
    sub: Sub,
    walk: Vec<usize>,
    at: usize,
    u: usize,
    w: usize,
}

struct Halves {
    subs: [Sub; 2],
    comp: Vec<usize>,
    walk: Vec<usize>,
    /// Per component, old local indices.
    uw: [(usize, usize); 2],
}

enum SplitPeel {
    Done(Box<Halves>),
    NotCut,
    MoreThanTwo,
    /// Not a simple two-sided cut of the outer walk.
    Odd,
}

impl Sub {
    fn n(&self) -> usize {
        self.ids.len()
    }

    fn local(&self, g: usize) -> Option<usize> {
        self.ids.binary_search(&g).ok()
    }

    fn succ(&self, b: usize, a: usize) -> usize {
        let r = &self.rot[b];
        let i = r.iter().position(|&x| x == a).expect("symmetric rotation");
        r[(i + 1) % r.len()]
    }

    /// Outer boundary walk, counterclockwise.
    fn walk(&self) -> Vec<usize> {
        let Some(start) = self.outer else { return vec![0] };
        let mut out = vec![];
        let (mut a, mut b) = start;
        loop {
            out.push(a);
            let c = self.succ(b, a);
            a = b;
            b = c;
            if (a, b) == start {
                break;
            }
        }
        out
    }

    /// Darts that lie on the outer face once `v` is deleted.
    fn outer_candidates(&self, walk: &[usize], v: usize) -> Vec<(usize, usize)> {
        let len = walk.len();
        let outer_angles: Vec<(usize, usize)> = (0..len).filter(|&i| walk[i] == v).map(|i| (walk[(i + len - 1) % len], walk[(i + 1) % len])).collect();
        let r = &self.rot[v];
        let mut out: Vec<(usize, usize)> =
            (0..r.len()).map(|j| (r[j], r[(j + 1) % r.len()])).filter(|&(a, c)| a != c && !outer_angles.contains(&(a, c))).map(|(a, c)| (c, a)).collect();
        out.extend((0..len).map(|i| (walk[i], walk[(i + 1) % len])).filter(|&(a, b)| a != v && b != v));
        out
    }

    fn restrict(&self, keep: &[usize], dart: Option<(usize, usize)>) -> Sub {
        let mut map = vec![usize::MAX; self.n()];
        for (k, &x) in keep.iter().enumerate() {
            map[x] = k;
        }
        Sub {
            ids: keep.iter().map(|&x| self.ids[x]).collect(),
            rot: keep.iter().map(|&x| self.rot[x].iter().filter(|&&y| map[y] != usize::MAX).map(|&y| map[y]).collect()).collect(),
            outer: dart.filter(|_| keep.len() > 1).map(|(a, b)| (map[a], map[b])),
        }
    }

    fn peel(&self, v: usize) -> Option<Peel> {
        let walk = self.walk();
        let len = walk.len();
        let at = walk.iter().position(|&x| x == v)?;
        let (u, w) = (walk[(at + len - 1) % len], walk[(at + 1) % len]);
        let dart = self.outer_candidates(&walk, v).into_iter().next();
        let keep: Vec<usize> = (0..self.n()).filter(|&x| x != v).collect();
        Some(Peel { sub: self.restrict(&keep, dart), walk, at, u, w })
    }

    fn split(&self, v: usize) -> SplitPeel {
        let n = self.n();
        let mut removed = vec![false; n];
        removed[v] = true;
        let comp = components(&self.rot, &removed);
        let count = (0..n).filter(|&x| x != v).map(|x| comp[x]).max().map_or(0, |m| m + 1);
        if count < 2 {
            return SplitPeel::NotCut;
        }
        if count > 2 {
            return SplitPeel::MoreThanTwo;
        }
        let walk = self.walk();
        let len = walk.len();
        let occ: Vec<usize> = (0..len).filter(|&i| walk[i] == v).collect();
        if occ.len() != 2 {
            return SplitPeel::Odd;
        }
        let p = |i: usize| walk[(i + len - 1) % len];
        let q = |i: usize| walk[(i + 1) % len];
        // the cw run of neighbors from p0 ends at q1, and from p1 at q0
        let ends = [(p(occ[0]), q(occ[1])), (p(occ[1]), q(occ[0]))];
        if ends.iter().any(|&(a, b)| comp[a] != comp[b]) {
            return SplitPeel::Odd;
        }
        let mut uw = [(0, 0); 2];
        for e in ends {
            uw[comp[e.0]] = e;
        }
        let cands = self.outer_candidates(&walk, v);
        let half = |ci: usize| {
            let keep: Vec<usize> = (0..n).filter(|&x| x != v && comp[x] == ci).collect();
            let dart = cands.iter().copied().find(|&(a, _)| comp[a] == ci);
            self.restrict(&keep, dart)
        };
        SplitPeel::Done(Box::new(Halves { subs: [half(0), half(1)], comp, walk, uw }))
    }

    /// A chord of the outer cycle, which in a 2-connected near-triangulation
    /// is exactly a separating pair.
    fn chord(&self, walk: &[usize]) -> Option<(usize, usize)> {
        let len = walk.len();
        if len < 4 {
            return None;
        }
        let mut pos = vec![usize::MAX; self.n()];
        for (k, &x) in walk.iter().enumerate() {
            pos[x] = k;
        }
        for &x in walk {
            for &y in &self.rot[x] {
                if pos[y] == usize::MAX {
                    continue;
                }
                let d = (pos[y] + len - pos[x]) % len;
                if d != 1 && d != len - 1 {
                    return Some((x, y));
                }
            }
        }
        None
    }
}

/// Position of each vertex (global id) on a walk of local indices.
fn walk_positions(sub: &Sub, walk: &[usize]) -> HashMap<usize, usize> {
    let mut pos = HashMap::new();
    for (k, &x) in walk.iter().enumerate() {
        pos.entry(sub.ids[x]).or_insert(k);
    }
    pos
}

/// Is walk index `k` strictly inside the ccw path from index `a` to `b`?
fn strictly_inside(len: usize, a: usize, b: usize, k: usize) -> bool {
    let d = |x: usize| (x + len - a) % len;
    k != a && d(k) < d(b)
}

type RemoveConstraints = (Peel, BTreeMap<usize, u8>, Vec<(usize, usize)>);

fn remove_constraints(sub: &Sub, v: usize, c: &BTreeMap<usize, u8>, pairs: &[(usize, usize)]) -> Option<RemoveConstraints> {
    let pl = sub.peel(v)?;
    let (gv, gu, gw) = (sub.ids[v], sub.ids[pl.u], sub.ids[pl.w]);
    let pos = walk_positions(sub, &pl.walk);
    let len = pl.walk.len();
    let mut out = vec![];
    for &(a, b) in pairs {
        if a == gv && b == gv {
            continue;
        }
        if a != gv && b != gv && a != b && strictly_inside(len, pos[&a], pos[&b], pl.at) {
            return None;
        }
        out.push((if a == gv { gw } else { a }, if b == gv { gu } else { b }));
    }
    out.push((gu, gw));
    dedup_keep_order(&mut out);
    let mut cc = c.clone();
    cc.remove(&gv);
    for x in [gu, gw] {
        let e = cc.entry(x).or_insert(0);
        *e = (*e + 1).min(C_CAP);
    }
    Some((pl, cc, out))
}

type SplitConstraints = [(BTreeMap<usize, u8>, Vec<(usize, usize)>); 2];

fn split_constraints(sub: &Sub, v: usize, h: &Halves, c: &BTreeMap<usize, u8>, pairs: &[(usize, usize)]) -> Option<SplitConstraints> {
    let gv = sub.ids[v];
    let comp_of = |g: usize| h.comp[sub.local(g).expect("vertex of sub")];
    let pos = walk_positions(sub, &h.walk);
    let len = h.walk.len();
    let mut out: SplitConstraints = Default::default();
    for &(a, b) in pairs {
        if a == gv || b == gv {
            return None;
        }
        let steps = (pos[&b] + len - pos[&a]) % len;
        let hit = (1..steps).map(|s| (pos[&a] + s) % len).find(|&k| h.walk[k] == v);
        if comp_of(a) == comp_of(b) {
            if hit.is_some() {
                return None;
            }
            out[comp_of(a)].1.push((a, b));
        } else {
            let k = hit?;
            let (x, y) = (sub.ids[h.walk[(k + len - 1) % len]], sub.ids[h.walk[(k + 1) % len]]);
            out[comp_of(a)].1.push((a, x));
            out[comp_of(b)].1.push((y, b));
        }
    }
    for (&g, &k) in c {
        if g == gv && k > 0 {
            return None;
        }
        if g != gv {
            out[comp_of(g)].0.insert(g, k);
        }
    }
    for (ci, (cc, pp)) in out.iter_mut().enumerate() {
        let (u, w) = (sub.ids[h.uw[ci].0], sub.ids[h.uw[ci].1]);
        for x in [u, w] {
            let e = cc.entry(x).or_insert(0);
            *e = (*e + 1).min(C_CAP);
        }
        pp.push((u, w));
        dedup_keep_order(pp);
    }
    Some(out)
}

/// Corner pattern over global ids, ccw from bottom-left, up to rotation.
type Pat = [Option<usize>; 4];
/// Rect ids at the corners, ccw from bottom-left.
type Corners = [usize; 4];

fn rotated(p: &Pat, r: usize) -> Pat {
    [p[r % 4], p[(r + 1) % 4], p[(r + 2) % 4], p[(r + 3) % 4]]
}

fn canon(p: &Pat) -> Pat {
    (0..4).map(|r| rotated(p, r)).min().expect("four rotations")
}

fn count(p: &Pat, g: usize) -> usize {
    p.iter().filter(|&&x| x == Some(g)).count()
}

fn letters(p: &Pat) -> Vec<usize> {
    let mut out: Vec<usize> = p.iter().flatten().copied().collect();
    dedup_keep_order(&mut out);
    out
}

fn consecutive_pairs(p: &Pat) -> Vec<(usize, usize)> {
    (0..4).filter_map(|i| Some((p[i]?, p[(i + 1) % 4]?))).collect()
}

/// Rotation `r` with `p[i]` matching `k[(i + r) % 4]` wherever `p` is set.
fn fit(p: &Pat, k: &Corners) -> Option<usize> {
    (0..4).find(|&r| (0..4).all(|i| p[i].is_none_or(|x| x == k[(i + r) % 4])))
}

/// Patterns whose realizations are exactly those meeting `(C, P)`.
fn patterns_for(c: &BTreeMap<usize, u8>, pairs: &[(usize, usize)], single: bool) -> Vec<Pat> {
    let mut alphabet: Vec<Option<usize>> = vec![None];
    alphabet.extend(c.iter().filter(|(_, &k)| k > 0).map(|(&g, _)| Some(g)));
    alphabet.extend(pairs.iter().flat_map(|&(a, b)| [Some(a), Some(b)]));
    dedup_keep_order(&mut alphabet);
    let max_each = if single { 4 } else { 2 };
    let m = alphabet.len();
    let mut out = vec![];
    for code in 0..m.pow(4) {
        let p: Pat = std::array::from_fn(|i| alphabet[code / m.pow(i as u32) % m]);
        let ok = c.iter().all(|(&g, &k)| count(&p, g) >= k as usize)
            && letters(&p).iter().all(|&g| count(&p, g) <= max_each)
            && pairs.iter().all(|&(a, b)| (0..4).any(|i| p[i] == Some(a) && p[(i + 1) % 4] == Some(b)));
        if ok {
            out.push(canon(&p));
        }
    }
    out.sort_by_key(|p| (p.iter().flatten().count(), *p));
    out.dedup();
    out
}

/// Tree with deferred quarter turns.
#[derive(Debug, Clone)]
enum RTree {
    Leaf(usize),
    Node(Cut, Box<RTree>, Box<RTree>),
    Turn(u8, Box<RTree>),
}

/// Applies `turns` ccw quarter turns; the rect at corner `k` moves to `k + 1`.
fn materialize(t: &RTree, turns: u8, labels: &[String]) -> SlicingTree {
    match t {
        RTree::Leaf(g) => SlicingTree::leaf(&labels[*g]),
        RTree::Turn(s, inner) => materialize(inner, (turns + s) % 4, labels),
        RTree::Node(cut, a, b) => {
            let (a, b) = (materialize(a, turns, labels), materialize(b, turns, labels));
            // one turn: V(a,b) -> H(a,b), H(a,b) -> V(b,a)
            match (turns, cut) {
                (0, c) => SlicingTree::node(*c, a, b),
                (1, Cut::V) => SlicingTree::h(a, b),
                (1, Cut::H) => SlicingTree::v(b, a),
                (2, c) => SlicingTree::node(*c, b, a),
                (_, Cut::V) => SlicingTree::h(b, a),
                (_, Cut::H) => SlicingTree::v(a, b),
            }
        }
    }
}

fn turned(t: RTree, k: Corners, turns: usize) -> (RTree, Corners) {
    let turns = turns % 4;
    if turns == 0 {
        return (t, k);
    }
    let c = std::array::from_fn(|i| k[(i + 4 - turns) % 4]);
    (RTree::Turn(turns as u8, Box::new(t)), c)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RecognizerStats {
    pub calls: usize,
    pub splits: usize,
    pub removes: usize,
    /// Smallest `C(V)` of any instance produced by a split or remove.
    pub min_child_total: Option<usize>,
    /// Children whose `C(V)` was below their parent's.
    pub total_decreases: usize,
    pub step_b: usize,
    pub step_d: usize,
    pub step_e: usize,
    /// Largest number of step-D entries on one root-to-leaf path.
    pub max_step_d_on_path: usize,
}

impl RecognizerStats {
    fn absorb(&mut self, o: &RecognizerStats) {
        self.calls += o.calls;
        self.splits += o.splits;
        self.removes += o.removes;
        self.min_child_total = match (self.min_child_total, o.min_child_total) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.total_decreases += o.total_decreases;
        self.step_b += o.step_b;
        self.step_d += o.step_d;
        self.step_e += o.step_e;
        self.max_step_d_on_path = self.max_step_d_on_path.max(o.max_step_d_on_path);
    }
}

struct Ctx<'a> {
    labels: &'a [String],
    stats: RecognizerStats,
}

type Found = Option<(RTree, Corners)>;

impl Ctx<'_> {
    fn note_child(&mut self, parent: &Pat, child: &Pat) {
        let (p, c) = (parent.iter().flatten().count(), child.iter().flatten().count());
        self.stats.min_child_total = Some(self.stats.min_child_total.map_or(c, |m| m.min(c)));
        if c < p {
            self.stats.total_decreases += 1;
        }
    }

    fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    /// Walk rotated to start at the smallest label.
    fn walk_from_smallest(&self, sub: &Sub) -> Vec<usize> {
        let mut walk = sub.walk();
        let start = (0..walk.len()).min_by_key(|&i| self.label(sub.ids[walk[i]])).unwrap_or(0);
        walk.rotate_left(start);
        walk
    }

    /// Deletes pivot `v`, trying each placement of it the pattern allows.
    fn remove(&mut self, sub: Sub, pat: Pat, v: usize, d: usize) -> Found {
        let gv = sub.ids[v];
        let pl = sub.peel(v)?;
        let (gu, gw) = (sub.ids[pl.u], sub.ids[pl.w]);
        let pos = walk_positions(&sub, &pl.walk);
        let len = pl.walk.len();
        for (a, b) in consecutive_pairs(&pat) {
            if a != gv && b != gv && a != b && strictly_inside(len, pos[&a], pos[&b], pl.at) {
                return None;
            }
        }
        drop(sub);
        let mut options: Vec<(usize, Pat)> = vec![];
        for j in 0..4 {
            let free = |i: usize| pat[i].is_none_or(|x| x == gv);
            if free(j) && free((j + 1) % 4) && (0..4).all(|i| i == j || i == (j + 1) % 4 || pat[i] != Some(gv)) {
                let mut child = pat;
                child[j] = Some(gu);
                child[(j + 1) % 4] = Some(gw);
                if !options.iter().any(|(_, p)| canon(p) == canon(&child)) {
                    options.push((j, child));
                }
            }
        }
        self.stats.removes += 1;
        let mut rest = Some(pl.sub);
        let last = options.len().saturating_sub(1);
        for (n, (j, child)) in options.into_iter().enumerate() {
            self.note_child(&pat, &child);
            let s = if n == last { rest.take().expect("kept for last option") } else { rest.clone().expect("kept") };
            let Some((t, k)) = self.main(s, child, d) else { continue };
            let r = fit(&child, &k).expect("sub-result realizes its pattern");
            let side = (j + r) % 4;
            let mut corners = k;
            corners[side] = gv;
            corners[(side + 1) % 4] = gv;
            let (lv, t) = (Box::new(RTree::Leaf(gv)), Box::new(t));
            let tree = match side {
                0 => RTree::Node(Cut::H, lv, t),
                1 => RTree::Node(Cut::V, t, lv),
                2 => RTree::Node(Cut::H, t, lv),
                _ => RTree::Node(Cut::V, lv, t),
            };
            return Some((tree, corners));
        }
        None
    }

    /// Splits at cut vertex `v` and glues `V(L, V(v, R))`.
    fn split(&mut self, sub: Sub, pat: Pat, v: usize, d: usize) -> Found {
        let SplitPeel::Done(h) = sub.split(v) else { return None };
        let gv = sub.ids[v];
        let comp_of = |g: usize| h.comp[sub.local(g).expect("vertex of sub")];
        let uw = h.uw.map(|(u, w)| (sub.ids[u], sub.ids[w]));
        // (left component, left pattern, right pattern)
        let mut options: Vec<(usize, Pat, Pat)> = vec![];
        for left in 0..2 {
            for r in 0..4 {
                // pat[i] lands on corner (i + r) % 4; corners 0 and 3 are on the left
                let side_of = |corner: usize| if corner == 0 || corner == 3 { left } else { 1 - left };
                if (0..4).any(|i| pat[i].is_some_and(|g| comp_of(g) != side_of((i + r) % 4))) {
                    continue;
                }
                let at = |corner: usize| pat[(corner + 4 - r) % 4];
                let (ul, wl) = uw[left];
                let (ur, wr) = uw[1 - left];
                let pl = [at(0), Some(ul), Some(wl), at(3)];
                let pr = [Some(wr), at(1), at(2), Some(ur)];
                let key = |o: &(usize, Pat, Pat)| if o.0 == 0 { (canon(&o.1), canon(&o.2)) } else { (canon(&o.2), canon(&o.1)) };
                let cand = (left, pl, pr);
                if !options.iter().any(|o| key(o) == key(&cand)) {
                    options.push(cand);
                }
            }
        }
        drop(sub);
        self.stats.splits += 1;
        let mut memo: HashMap<(usize, Pat), Found> = HashMap::new();
        let subs = h.subs;
        for (left, pl, pr) in options {
            self.note_child(&pat, &pl);
            self.note_child(&pat, &pr);
            let mut solve = |ctx: &mut Self, ci: usize, p: Pat| memo.entry((ci, canon(&p))).or_insert_with(|| ctx.main(subs[ci].clone(), p, d)).clone();
            let Some((tl, kl)) = solve(self, left, pl) else { continue };
            let Some((tr, kr)) = solve(self, 1 - left, pr) else { continue };
            let rl = fit(&pl, &kl).expect("sub-result realizes its pattern");
            let rr = fit(&pr, &kr).expect("sub-result realizes its pattern");
            let (tl, kl) = turned(tl, kl, 4 - rl);
            let (tr, kr) = turned(tr, kr, 4 - rr);
            let right = RTree::Node(Cut::V, Box::new(RTree::Leaf(gv)), Box::new(tr));
            return Some((RTree::Node(Cut::V, Box::new(tl), Box::new(right)), [kl[0], kr[1], kr[2], kl[3]]));
        }
        None
    }

    fn main(&mut self, sub: Sub, pat: Pat, d: usize) -> Found {
        self.stats.calls += 1;
        self.stats.max_step_d_on_path = self.stats.max_step_d_on_path.max(d);
        let n = sub.n();
        if n == 1 {
            let g = sub.ids[0];
            return pat.iter().flatten().all(|&x| x == g).then_some((RTree::Leaf(g), [g; 4]));
        }
        let ks = letters(&pat);
        if ks.iter().any(|&g| count(&pat, g) > 2) {
            return None;
        }
        let cuts = articulation_points(&sub.rot);
        if let Some(&v) = cuts.first() {
            // the rect of a cut vertex spans between two opposite sides and
            // touches no corner
            if cuts.iter().any(|&x| ks.contains(&sub.ids[x])) {
                return None;
            }
            return self.split(sub, pat, v, d);
        }
        if let Some(&g) = ks.iter().find(|&&g| count(&pat, g) == 2) {
            let v = sub.local(g)?;
            return self.remove(sub, pat, v, d);
        }
        let pairs = consecutive_pairs(&pat);
        if ks.len() == 2 && pairs.len() == 1 {
            self.stats.step_b += 1;
            let (a, b) = pairs[0];
            let mut tries = vec![sub.local(a)?, sub.local(b)?];
            if let Some((x, y)) = sub.chord(&self.walk_from_smallest(&sub)) {
                tries.extend([x, y]);
            }
            dedup_keep_order(&mut tries);
            return tries.into_iter().find_map(|v| self.remove(sub.clone(), pat, v, d));
        }
        if ks.len() == 3 {
            self.stats.step_d += 1;
            let order: Vec<usize> = self.walk_from_smallest(&sub).into_iter().filter(|&x| ks.contains(&sub.ids[x])).collect();
            return order.into_iter().find_map(|v| self.remove(sub.clone(), pat, v, d + 1));
        }
        if ks.is_empty() {
            self.stats.step_e += 1;
            let mut order = self.walk_from_smallest(&sub);
            dedup_keep_order(&mut order);
            return order.into_iter().find_map(|v| self.remove(sub.clone(), pat, v, d));
        }
        None
    }
}

/// Runs `f` on a thread with a stack large enough for the recursion.
fn with_big_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| {
        std::thread::Builder::new().stack_size(STACK_BYTES).spawn_scoped(s, f).expect("spawn recognizer thread").join().expect("recognizer thread panicked")
    })
}

/// Splits at cut vertex `v`. `Ok(None)` when a corner requirement rules the
/// instance out.
pub fn split_instance(inst: &Instance, v: &str) -> Result<Option<(Instance, Instance)>> {
    let vi = inst.graph.lookup(v)?;
    let sub = inst.sub();
    let h = match sub.split(vi) {
        SplitPeel::NotCut => return Err(Error::NotCutVertex(v.into())),
        SplitPeel::MoreThanTwo => return Err(Error::MoreThanTwoComponents(v.into())),
        SplitPeel::Odd => return Ok(None),
        SplitPeel::Done(h) => h,
    };
    let (c, pairs) = inst.constraints();
    let Some([(c0, p0), (c1, p1)]) = split_constraints(&sub, vi, &h, &c, &pairs) else { return Ok(None) };
    let labels = inst.graph.labels();
    Ok(Some((Instance::from_parts(&h.subs[0], labels, &c0, &p0), Instance::from_parts(&h.subs[1], labels, &c1, &p1))))
}

/// Deletes pivot candidate `v`. `Ok(None)` when a corner pair forbids it.
pub fn remove_instance(inst: &Instance, v: &str) -> Result<Option<Instance>> {
    let vi = inst.graph.lookup(v)?;
    let g = &inst.graph;
    if g.vertex_count() < 2 {
        return Err(Error::InvalidInstance("cannot remove the only vertex".into()));
    }
    if !g.outer_face().contains(&vi) {
        return Err(Error::NotOuter(v.into()));
    }
    if articulation_points(g.rotation()).contains(&vi) {
        return Err(Error::CutVertex(v.into()));
    }
    let (c, pairs) = inst.constraints();
    Ok(remove_constraints(&inst.sub(), vi, &c, &pairs).map(|(pl, cc, pp)| Instance::from_parts(&pl.sub, g.labels(), &cc, &pp)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CornerLabeledLayout {
    pub layout: Layout,
    /// Graph vertex -> rect id.
    pub vertex_map: BTreeMap<String, String>,
    /// Bottom-left, bottom-right, top-right, top-left.
    pub corner_rects: [String; 4],
}

impl CornerLabeledLayout {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "layout": self.layout.to_json(),
            "vertex_map": self.vertex_map,
            "corner_rects": self.corner_rects,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub ok: bool,
    pub problems: Vec<String>,
}

/// Checks a candidate against an instance: bijection, identical adjacency,
/// corner counts, corner pairs, one-sided and sliceable.
pub fn verify_realization(cand: &CornerLabeledLayout, inst: &Instance) -> VerificationReport {
    let mut problems = vec![];
    let g = &inst.graph;
    let l = &cand.layout;
    let keys: BTreeSet<&str> = cand.vertex_map.keys().map(String::as_str).collect();
    let verts: BTreeSet<&str> = g.labels().iter().map(String::as_str).collect();
    let vals: BTreeSet<&str> = cand.vertex_map.values().map(String::as_str).collect();
    let ids: BTreeSet<&str> = l.ids().collect();
    if keys != verts || vals != ids || vals.len() != keys.len() {
        problems.push("vertex_map is not a bijection between graph vertices and rects".to_string());
    }
    if !l.is_generic() {
        problems.push("layout is not generic".to_string());
    }
    if !problems.is_empty() {
        return VerificationReport { ok: false, problems };
    }
    let d = dual(l).expect("generic");
    let back: BTreeMap<&str, &str> = cand.vertex_map.iter().map(|(k, v)| (v.as_str(), k.as_str())).collect();
    let mapped: BTreeSet<(String, String)> = d
        .edge_set()
        .into_iter()
        .map(|(a, b)| {
            let (x, y) = (back[a.as_str()].to_string(), back[b.as_str()].to_string());
            if x < y {
                (x, y)
            } else {
                (y, x)
            }
        })
        .collect();
    if mapped != g.edge_set() {
        problems.push("dual of the layout differs from the graph".to_string());
    }
    let corners = l.corner_rects();
    if corners != cand.corner_rects {
        problems.push("corner_rects do not match the layout".to_string());
    }
    for (v, &c) in &inst.corner_count {
        let r = &cand.vertex_map[v];
        let have = corners.iter().filter(|x| *x == r).count();
        if have < c as usize {
            problems.push(format!("{v} touches {have} corners, needs {c}"));
        }
    }
    for (a, b) in &inst.corner_pairs {
        let (ra, rb) = (&cand.vertex_map[a], &cand.vertex_map[b]);
        if !(0..4).any(|i| &corners[i] == ra && &corners[(i + 1) % 4] == rb) {
            problems.push(format!("({a}, {b}) are not on ccw-consecutive corners"));
        }
    }
    if slicing_tree(l).is_none() {
        problems.push("layout is not sliceable".to_string());
    } else if !is_one_sided(l).one_sided {
        problems.push("layout is not one-sided".to_string());
    }
    VerificationReport { ok: problems.is_empty(), problems }
}

pub fn main_recognize(inst: &Instance) -> Result<Option<CornerLabeledLayout>> {
    main_recognize_with_stats(inst).map(|(r, _)| r)
}

pub fn main_recognize_with_stats(inst: &Instance) -> Result<(Option<CornerLabeledLayout>, RecognizerStats)> {
    with_big_stack(|| recognize_on_big_stack(inst))
}

fn recognize_on_big_stack(inst: &Instance) -> Result<(Option<CornerLabeledLayout>, RecognizerStats)> {
    let labels = inst.graph.labels();
    let (c, pairs) = inst.constraints();
    let pats = patterns_for(&c, &pairs, inst.graph.vertex_count() == 1);
    let sub = inst.sub();
    let (found, stats) = 'search: {
        let mut total = RecognizerStats::default();
        for p in pats {
            let mut ctx = Ctx { labels, stats: RecognizerStats::default() };
            let r = ctx.main(sub.clone(), p, 0);
            total.absorb(&ctx.stats);
            if let Some((t, k)) = r {
                break 'search (Some((materialize(&t, 0, labels), k)), total);
            }
        }
        (None, total)
    };
    let Some((tree, corners)) = found else { return Ok((None, stats)) };
    let ones = AspectAssignment::new(labels.iter().map(|l| (l.clone(), int(1))));
    let layout = realize_sliceable(&tree, &ones)?;
    let cand =
        CornerLabeledLayout { vertex_map: labels.iter().map(|l| (l.clone(), l.clone())).collect(), corner_rects: corners.map(|g| labels[g].clone()), layout };
    let report = verify_realization(&cand, inst);
    if !report.ok {
        return Err(Error::InternalVerification(report.problems.join("; ")));
    }
    Ok((Some(cand), stats))
}

/// Decides whether `g` (with its embedding) is the dual of a one-sided
/// sliceable layout and returns such a layout.
pub fn recognize_dual(g: &PlaneGraph) -> Result<Option<CornerLabeledLayout>> {
    recognize_dual_with_stats(g).map(|(r, _)| r)
}

pub fn recognize_dual_with_stats(g: &PlaneGraph) -> Result<(Option<CornerLabeledLayout>, RecognizerStats)> {
    if !is_near_triangulation(g) {
        return Err(Error::Input("graph is not a near-triangulation".into()));
    }
    main_recognize_with_stats(&Instance::initial(g.clone())?)
}

/// Separating pair of a 2-connected dual, found as an outer-cycle chord.
pub fn chord_two_cut(g: &PlaneGraph) -> Option<(String, String)> {
    if !is_near_triangulation(g) || !articulation_points(g.rotation()).is_empty() {
        return None;
    }
    let sub = Instance::initial(g.clone()).ok()?.sub();
    sub.chord(&sub.walk()).map(|(a, b)| (g.label(a).to_string(), g.label(b).to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::Chirality;
    use crate::dualgraph::tests::{graph, path3, triangle};
    use crate::dualgraph::{find_two_cut, plane_isomorphic};
    use crate::enumerate::{enumerate_slicing_trees, pinwheel, tree_to_layout};

    fn cc(pairs: &[(&str, u8)]) -> BTreeMap<String, u8> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn pp(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    fn bowtie() -> PlaneGraph {
        graph(&[("a", &["v", "b"]), ("b", &["a", "v"]), ("v", &["c", "d", "b", "a"]), ("c", &["d", "v"]), ("d", &["v", "c"])], &["a", "v", "c", "d", "v", "b"])
    }

    fn wheel() -> PlaneGraph {
        dual(&pinwheel(Chirality::Clockwise)).unwrap()
    }

    #[test]
    fn split_two_triangles() {
        let inst = Instance::initial(bowtie()).unwrap();
        let (i1, i2) = split_instance(&inst, "v").unwrap().unwrap();
        assert_eq!(i1.graph.labels(), ["a", "b"]);
        assert_eq!(i1.corner_count, cc(&[("a", 1), ("b", 1)]));
        assert_eq!(i1.corner_pairs.len(), 1);
        assert_eq!(i2.graph.labels(), ["c", "d"]);
        assert_eq!(i2.corner_count, cc(&[("c", 1), ("d", 1)]));
    }

    #[test]
    fn split_path() {
        let inst = Instance::initial(path3()).unwrap();
        let (i1, i2) = split_instance(&inst, "r2").unwrap().unwrap();
        assert_eq!(i1.corner_count, cc(&[("r1", 2)]));
        assert_eq!(i1.corner_pairs, pp(&[("r1", "r1")]));
        assert_eq!(i2.corner_count, cc(&[("r3", 2)]));
        assert_eq!(i2.corner_pairs, pp(&[("r3", "r3")]));
        assert_eq!(split_instance(&inst, "r1"), Err(Error::NotCutVertex("r1".into())));
    }

    #[test]
    fn split_rejects_corner_on_cut_vertex() {
        let inst = Instance::new(path3(), cc(&[("r2", 1)]), vec![]).unwrap();
        assert_eq!(split_instance(&inst, "r2").unwrap(), None);
    }

    #[test]
    fn remove_from_triangle() {
        let inst = Instance::initial(triangle()).unwrap();
        let r = remove_instance(&inst, "c").unwrap().unwrap();
        assert_eq!(r.graph.labels(), ["a", "b"]);
        assert_eq!(r.corner_count, cc(&[("a", 1), ("b", 1)]));
        // the top side of the rest runs from b (top right) to a (top left)
        assert_eq!(r.corner_pairs, pp(&[("b", "a")]));
    }

    #[test]
    fn remove_from_edge() {
        let edge = graph(&[("u", &["w"]), ("w", &["u"])], &["u", "w"]);
        let inst = Instance::new(edge, cc(&[("u", 1), ("w", 1)]), pp(&[("u", "w")])).unwrap();
        let r = remove_instance(&inst, "u").unwrap().unwrap();
        assert_eq!(r.graph.labels(), ["w"]);
        assert_eq!(r.count("w"), 3);
    }

    #[test]
    fn remove_blocked_by_pair() {
        // b lies strictly inside the ccw path from a to c
        let inst = Instance::new(triangle(), cc(&[("a", 1), ("c", 1)]), pp(&[("a", "c")])).unwrap();
        assert_eq!(remove_instance(&inst, "b").unwrap(), None);
        assert!(remove_instance(&inst, "a").unwrap().is_some());
    }

    #[test]
    fn remove_errors() {
        let inst = Instance::initial(path3()).unwrap();
        assert_eq!(remove_instance(&inst, "r2"), Err(Error::CutVertex("r2".into())));
        let inst = Instance::initial(wheel()).unwrap();
        assert_eq!(remove_instance(&inst, "c"), Err(Error::NotOuter("c".into())));
    }

    #[test]
    fn single_vertex() {
        let g = graph(&[("x", &[])], &["x"]);
        let r = recognize_dual(&g).unwrap().unwrap();
        assert_eq!(r.layout.len(), 1);
        assert_eq!(r.corner_rects, ["x", "x", "x", "x"].map(String::from));
    }

    #[test]
    fn small_graphs_recognized() {
        for g in [path3(), triangle(), bowtie(), wheel()] {
            let r = recognize_dual(&g).unwrap().expect("realizable");
            assert!(plane_isomorphic(&dual(&r.layout).unwrap(), &g).unwrap());
            assert!(verify_realization(&r, &Instance::initial(g).unwrap()).ok);
        }
    }

    #[test]
    fn path_gives_stack() {
        let r = recognize_dual(&path3()).unwrap().unwrap();
        let t = crate::enumerate::canonical_of(&slicing_tree(&r.layout).unwrap());
        assert_eq!(t.leaves(), 3);
        assert!(matches!(t, crate::enumerate::CanonicalTree::Node(_, ref ch) if ch.len() == 3));
    }

    #[test]
    fn star_is_rejected() {
        let star = graph(&[("h", &["a", "b", "c"]), ("a", &["h"]), ("b", &["h"]), ("c", &["h"])], &["h", "a", "h", "b", "h", "c"]);
        assert_eq!(recognize_dual(&star).unwrap(), None);
    }

    #[test]
    fn constrained_instances() {
        // a rect spanning a whole side of the triangle layout
        let inst = Instance::new(triangle(), cc(&[("a", 2)]), pp(&[("a", "a")])).unwrap();
        let r = main_recognize(&inst).unwrap().unwrap();
        assert!(verify_realization(&r, &inst).ok);
        // no rect of a triangle layout touches three corners
        let inst = Instance::new(triangle(), cc(&[("a", 3)]), vec![]).unwrap();
        assert_eq!(main_recognize(&inst).unwrap(), None);
        // the middle of a stack is never at a corner
        let inst = Instance::new(path3(), cc(&[("r2", 1)]), vec![]).unwrap();
        assert_eq!(main_recognize(&inst).unwrap(), None);
    }

    #[test]
    fn verification_catches_problems() {
        let inst = Instance::initial(triangle()).unwrap();
        let r = main_recognize(&inst).unwrap().unwrap();
        let lone = r.corner_rects.iter().find(|x| r.corner_rects.iter().filter(|y| y == x).count() == 1).unwrap().clone();
        let demanding = Instance::new(triangle(), cc(&[(&lone, 2)]), vec![]).unwrap();
        let rep = verify_realization(&r, &demanding);
        assert!(!rep.ok);
        assert!(rep.problems[0].contains("corners"));
        let mut broken = r.clone();
        broken.vertex_map.remove("a");
        assert!(!verify_realization(&broken, &inst).ok);
    }

    #[test]
    fn invalid_input() {
        let c4 = graph(&[("a", &["b", "d"]), ("b", &["c", "a"]), ("c", &["d", "b"]), ("d", &["a", "c"])], &["a", "b", "c", "d"]);
        assert!(matches!(recognize_dual(&c4), Err(Error::Input(_))));
    }

    #[test]
    fn chords_match_exhaustive_two_cuts() {
        for n in 3..=6 {
            for t in enumerate_slicing_trees(n).unwrap() {
                let g = dual(&tree_to_layout(&t)).unwrap();
                if !articulation_points(g.rotation()).is_empty() {
                    continue;
                }
                assert_eq!(chord_two_cut(&g).is_some(), find_two_cut(&g).unwrap().is_some(), "{t:?}");
            }
        }
    }

    #[test]
    fn every_sliceable_dual_is_recognized() {
        for n in 1..=6 {
            for t in enumerate_slicing_trees(n).unwrap() {
                let l = tree_to_layout(&t);
                if !is_one_sided(&l).one_sided {
                    continue;
                }
                let g = dual(&l).unwrap();
                assert!(recognize_dual(&g).unwrap().is_some(), "{t:?}");
            }
        }
    }

    #[test]
    fn patterns_cover_constraints() {
        let c: BTreeMap<usize, u8> = [(0, 1), (1, 1)].into();
        let ps = patterns_for(&c, &[(0, 1)], false);
        assert_eq!(ps[0], canon(&[Some(0), Some(1), None, None]));
        assert!(ps.iter().all(|p| consecutive_pairs(p).contains(&(0, 1))));
        assert_eq!(patterns_for(&BTreeMap::new(), &[], false), vec![[None; 4]]);
    }

    #[test]
    fn fit_and_turn() {
        let k = [5, 6, 7, 8];
        assert_eq!(fit(&[Some(7), None, None, None], &k), Some(2));
        let (_, k2) = turned(RTree::Leaf(0), k, 1);
        assert_eq!(k2, [8, 5, 6, 7]);
    }

    #[test]
    fn materialize_turns() {
        let labels: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let t = RTree::Node(Cut::V, Box::new(RTree::Leaf(0)), Box::new(RTree::Leaf(1)));
        assert_eq!(materialize(&t, 1, &labels).to_string(), "H(a,b)");
        assert_eq!(materialize(&t, 2, &labels).to_string(), "V(b,a)");
        assert_eq!(materialize(&t, 3, &labels).to_string(), "H(b,a)");
        let h = RTree::Node(Cut::H, Box::new(RTree::Leaf(0)), Box::new(RTree::Leaf(1)));
        assert_eq!(materialize(&h, 1, &labels).to_string(), "V(b,a)");
        assert_eq!(materialize(&RTree::Turn(3, Box::new(h)), 1, &labels).to_string(), "H(a,b)");
    }
}

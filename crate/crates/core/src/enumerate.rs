//! Brute-force enumeration of sliceable layouts and the catalogs built on it.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::{is_one_sided, Chirality, Cut, SlicingTree};
use crate::dualgraph::{canonical_code, dual, is_connected, PlaneGraph};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{int, validate_layout, Layout, Rational, Rect};

pub const DEFAULT_CAP: usize = 8;

/// Multiway guillotine tree; no node has a child of its own orientation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CanonicalTree {
    Leaf,
    Node(Cut, Vec<CanonicalTree>),
}

impl CanonicalTree {
    pub fn leaves(&self) -> usize {
        match self {
            CanonicalTree::Leaf => 1,
            CanonicalTree::Node(_, ch) => ch.iter().map(CanonicalTree::leaves).sum(),
        }
    }

    pub fn is_canonical(&self) -> bool {
        match self {
            CanonicalTree::Leaf => true,
            CanonicalTree::Node(c, ch) => {
                ch.len() >= 2
                    && ch.iter().all(|k| match k {
                        CanonicalTree::Leaf => true,
                        CanonicalTree::Node(d, _) => d != c && k.is_canonical(),
                    })
            }
        }
    }
}

/// Shape of a binary tree with same-orientation runs merged.
pub fn canonical_of(t: &SlicingTree) -> CanonicalTree {
    match t {
        SlicingTree::Leaf { .. } => CanonicalTree::Leaf,
        SlicingTree::Node { cut, .. } => CanonicalTree::Node(*cut, t.multiway_children().into_iter().map(canonical_of).collect()),
    }
}

fn compositions(n: usize) -> Vec<Vec<usize>> {
    // all compositions of n into at least two positive parts
    let mut out = vec![];
    for mask in 0..(1u32 << (n - 1)) {
        if mask == 0 {
            continue;
        }
        let mut parts = vec![];
        let mut last = 0;
        for i in 0..n - 1 {
            if mask >> i & 1 == 1 {
                parts.push(i + 1 - last);
                last = i + 1;
            }
        }
        parts.push(n - last);
        out.push(parts);
    }
    out
}

fn with_root(n: usize, cut: Cut, memo: &mut HashMap<(usize, Cut), Vec<CanonicalTree>>) -> Vec<CanonicalTree> {
    if let Some(v) = memo.get(&(n, cut)) {
        return v.clone();
    }
    let mut out = vec![];
    for parts in compositions(n) {
        let options: Vec<Vec<CanonicalTree>> =
            parts.iter().map(|&p| if p == 1 { vec![CanonicalTree::Leaf] } else { with_root(p, cut.other(), memo) }).collect();
        product(&options, &mut vec![], &mut |ch| out.push(CanonicalTree::Node(cut, ch.to_vec())));
    }
    memo.insert((n, cut), out.clone());
    out
}

fn product(options: &[Vec<CanonicalTree>], cur: &mut Vec<CanonicalTree>, emit: &mut impl FnMut(&[CanonicalTree])) {
    if cur.len() == options.len() {
        emit(cur);
        return;
    }
    for o in &options[cur.len()] {
        cur.push(o.clone());
        product(options, cur, emit);
        cur.pop();
    }
}

/// All canonical trees with `n` leaves, sorted.
pub fn enumerate_slicing_trees(n: usize) -> Result<Vec<CanonicalTree>> {
    enumerate_slicing_trees_capped(n, DEFAULT_CAP)
}

pub fn enumerate_slicing_trees_capped(n: usize, cap: usize) -> Result<Vec<CanonicalTree>> {
    if n == 0 || n > cap {
        return Err(Error::Cap(n, cap));
    }
    if n == 1 {
        return Ok(vec![CanonicalTree::Leaf]);
    }
    let mut memo = HashMap::new();
    let mut out = with_root(n, Cut::V, &mut memo);
    out.extend(with_root(n, Cut::H, &mut memo));
    out.sort();
    Ok(out)
}

/// Instantiates a tree in the unit square with child sizes proportional to
/// `weights` (consumed in preorder, one per child).
fn instantiate(t: &CanonicalTree, weights: &mut impl FnMut(usize) -> Vec<Rational>) -> Layout {
    let mut rects = vec![];
    let mut counter = 0;
    place(t, [int(0), int(0), int(1), int(1)], weights, &mut counter, &mut rects);
    validate_layout(Rect::int("", 0, 0, 1, 1), rects).expect("tree instantiation is a valid layout")
}

fn place(t: &CanonicalTree, b: [Rational; 4], weights: &mut impl FnMut(usize) -> Vec<Rational>, counter: &mut usize, out: &mut Vec<Rect>) {
    match t {
        CanonicalTree::Leaf => {
            *counter += 1;
            let [x0, y0, x1, y1] = b;
            out.push(Rect::new(format!("r{counter}"), x0, y0, x1, y1));
        }
        CanonicalTree::Node(cut, ch) => {
            let w = weights(ch.len());
            let total: Rational = w.iter().sum();
            let [x0, y0, x1, y1] = b;
            let span = match cut {
                Cut::V => &x1 - &x0,
                Cut::H => &y1 - &y0,
            };
            let mut at = match cut {
                Cut::V => x0.clone(),
                Cut::H => y0.clone(),
            };
            for (i, c) in ch.iter().enumerate() {
                let next = if i + 1 == ch.len() {
                    match cut {
                        Cut::V => x1.clone(),
                        Cut::H => y1.clone(),
                    }
                } else {
                    &at + &span * &w[i] / &total
                };
                let sub = match cut {
                    Cut::V => [at.clone(), y0.clone(), next.clone(), y1.clone()],
                    Cut::H => [x0.clone(), at.clone(), x1.clone(), next.clone()],
                };
                place(c, sub, weights, counter, out);
                at = next;
            }
        }
    }
}

/// Equal splits when that is generic; otherwise seeded integer weights until
/// the result is generic. Rects are named r1.. in leaf order.
pub fn tree_to_layout(t: &CanonicalTree) -> Layout {
    let l = instantiate(t, &mut |k| vec![int(1); k]);
    if l.is_generic() {
        return l;
    }
    for seed in 0u64.. {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_instance(t, &mut rng);
        if l.is_generic() {
            return l;
        }
    }
    unreachable!()
}

/// Split sizes drawn at random (weights 1..=16); may be nongeneric.
pub fn random_instance(t: &CanonicalTree, rng: &mut impl Rng) -> Layout {
    instantiate(t, &mut |k| (0..k).map(|_| int(rng.gen_range(1..=16))).collect())
}

/// Uniform-ish random canonical tree with `n` leaves: random composition at
/// every node.
pub fn random_tree(n: usize, rng: &mut impl Rng) -> CanonicalTree {
    let cut = if rng.gen_bool(0.5) { Cut::V } else { Cut::H };
    random_tree_rooted(n, cut, rng)
}

fn random_tree_rooted(n: usize, cut: Cut, rng: &mut impl Rng) -> CanonicalTree {
    if n == 1 {
        return CanonicalTree::Leaf;
    }
    let mut parts = vec![];
    let mut left = n;
    loop {
        let p = rng.gen_range(1..left);
        parts.push(p);
        left -= p;
        if left == 1 || rng.gen_bool(0.5) {
            parts.push(left);
            break;
        }
    }
    CanonicalTree::Node(cut, parts.into_iter().map(|p| random_tree_rooted(p, cut.other(), rng)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Census {
    pub n: usize,
    pub sliceable: usize,
    pub one_sided_sliceable: usize,
    pub dual_iso_classes: usize,
}

pub fn census(n: usize, exec: Exec) -> Result<Census> {
    let trees = enumerate_slicing_trees(n)?;
    let rows: Vec<Option<Vec<u64>>> = exec.map(&trees, |t| {
        let l = tree_to_layout(t);
        is_one_sided(&l).one_sided.then(|| canonical_code(dual(&l).expect("generic").rotation()).expect("size"))
    });
    let one_sided: Vec<&Vec<u64>> = rows.iter().flatten().collect();
    let mut codes = one_sided.clone();
    codes.sort();
    codes.dedup();
    Ok(Census { n, sliceable: trees.len(), one_sided_sliceable: one_sided.len(), dual_iso_classes: codes.len() })
}

/// Pinwheel on a 3x3 grid; ids c, r_b, r_r, r_t, r_l.
pub fn pinwheel(chirality: Chirality) -> Layout {
    let r = |id: &str, a, b, c, d| Rect::int(id, a, b, c, d);
    let rects = match chirality {
        Chirality::Clockwise => vec![r("c", 1, 1, 2, 2), r("r_b", 0, 0, 2, 1), r("r_r", 2, 0, 3, 2), r("r_t", 1, 2, 3, 3), r("r_l", 0, 1, 1, 3)],
        Chirality::Counterclockwise => vec![r("c", 1, 1, 2, 2), r("r_b", 0, 0, 1, 2), r("r_r", 1, 0, 3, 1), r("r_t", 2, 1, 3, 3), r("r_l", 0, 2, 2, 3)],
    };
    validate_layout(Rect::int("", 0, 0, 3, 3), rects).expect("pinwheel")
}

/// Hand-made non-sliceable layouts with `n` rects: the two pinwheels for
/// n = 5, and for n = 6 every generic way of halving one pinwheel rect.
pub fn nonsliceable_fixtures(n: usize) -> Vec<Layout> {
    let base = [pinwheel(Chirality::Clockwise), pinwheel(Chirality::Counterclockwise)];
    match n {
        5 => base.to_vec(),
        6 => {
            let mut out = vec![];
            for p in &base {
                for i in 0..p.len() {
                    for vertical in [true, false] {
                        let mut rects: Vec<Rect> = p.rects().to_vec();
                        let r = rects.remove(i);
                        let two = int(2);
                        let (a, b) = if vertical {
                            let m = (&r.x0 + &r.x1) / &two;
                            (
                                Rect::new(format!("{}a", r.id), r.x0.clone(), r.y0.clone(), m.clone(), r.y1.clone()),
                                Rect::new(format!("{}b", r.id), m, r.y0.clone(), r.x1.clone(), r.y1.clone()),
                            )
                        } else {
                            let m = (&r.y0 + &r.y1) / &two;
                            (
                                Rect::new(format!("{}a", r.id), r.x0.clone(), r.y0.clone(), r.x1.clone(), m.clone()),
                                Rect::new(format!("{}b", r.id), r.x0.clone(), m, r.x1.clone(), r.y1.clone()),
                            )
                        };
                        rects.push(a);
                        rects.push(b);
                        let l = validate_layout(p.bbox().clone(), rects).expect("split pinwheel");
                        if l.is_generic() {
                            out.push(l);
                        }
                    }
                }
            }
            out
        }
        _ => vec![],
    }
}

#[derive(Debug, Clone)]
pub struct DualCatalog {
    pub n: usize,
    /// Iso-class representatives of duals of one-sided sliceable layouts,
    /// each with a layout realizing it.
    pub positive: Vec<(PlaneGraph, Layout)>,
    /// Duals of other enumerated or fixture layouts not isomorphic to any
    /// positive one.
    pub negative: Vec<(PlaneGraph, Layout)>,
}

pub fn dual_catalog(n: usize, exec: Exec) -> Result<DualCatalog> {
    let trees = enumerate_slicing_trees(n)?;
    let mut layouts: Vec<Layout> = exec.map(&trees, tree_to_layout);
    layouts.extend(nonsliceable_fixtures(n));
    let rows: Vec<(bool, PlaneGraph, Vec<u64>)> = exec.map(&layouts, |l| {
        let g = dual(l).expect("generic");
        let code = canonical_code(g.rotation()).expect("size");
        let good = crate::classify::is_sliceable(l) && is_one_sided(l).one_sided;
        (good, g, code)
    });
    let mut pos: BTreeMap<Vec<u64>, (PlaneGraph, Layout)> = BTreeMap::new();
    let mut neg: BTreeMap<Vec<u64>, (PlaneGraph, Layout)> = BTreeMap::new();
    for ((good, g, code), l) in rows.into_iter().zip(layouts) {
        if good {
            pos.entry(code).or_insert((g, l));
        } else {
            neg.entry(code).or_insert((g, l));
        }
    }
    neg.retain(|k, _| !pos.contains_key(k));
    Ok(DualCatalog { n, positive: pos.into_values().collect(), negative: neg.into_values().collect() })
}

/// Size of a smallest vertex set whose removal disconnects `g`, searched up
/// to size 4. `None` when no such set exists (complete graphs, or every cut is
/// larger than 4).
pub fn min_vertex_cut(g: &PlaneGraph) -> Option<usize> {
    let n = g.vertex_count();
    let adj = g.rotation();
    for k in 0..=4usize.min(n.saturating_sub(2)) {
        let mut chosen = vec![];
        if subsets(n, k, 0, &mut chosen, &mut |set| {
            let mut removed = vec![false; n];
            set.iter().for_each(|&v| removed[v] = true);
            !is_connected(adj, &removed)
        }) {
            return Some(k);
        }
    }
    None
}

fn subsets(n: usize, k: usize, from: usize, cur: &mut Vec<usize>, test: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if cur.len() == k {
        return test(cur);
    }
    for v in from..n {
        cur.push(v);
        if subsets(n, k, v + 1, cur, test) {
            return true;
        }
        cur.pop();
    }
    false
}

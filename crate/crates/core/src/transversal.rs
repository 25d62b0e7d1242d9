//! Transversal structures on extended duals.
//!
//! Red edges point upward (from S towards N), blue edges rightward (from W
//! towards E). Around an inner vertex, read counterclockwise, the incident
//! edges form four nonempty blocks: outgoing red, incoming blue, incoming
//! red, outgoing blue.

use std::collections::{BTreeMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::dualgraph::{extended_dual, ExtendedDual};
use crate::error::{Error, Result};
use crate::geometry::{Layout, Orientation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn other(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }
}

type Edge = (usize, usize);

fn key(a: usize, b: usize) -> Edge {
    (a.min(b), a.max(b))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransversalStructure {
    pub graph: ExtendedDual,
    /// Inner edge (min, max) -> (color, tail).
    labels: BTreeMap<Edge, (Color, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeLabelJson {
    pub u: String,
    pub v: String,
    pub color: Color,
    pub dir: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub at: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternatingCycle {
    pub vertices: [String; 4],
    /// Colors of the edges v0v1, v1v2, v2v3, v3v0.
    pub colors: [Color; 4],
    pub interior_vertices: Vec<String>,
    idx: [usize; 4],
    interior_edges: Vec<Edge>,
}

impl AlternatingCycle {
    pub fn is_empty(&self) -> bool {
        self.interior_vertices.is_empty()
    }

    pub fn interior_edge_count(&self) -> usize {
        self.interior_edges.len()
    }
}

/// Position of an incident edge in the ccw block order.
fn block(color: Color, outgoing: bool) -> u8 {
    match (color, outgoing) {
        (Color::Red, true) => 0,
        (Color::Blue, false) => 1,
        (Color::Red, false) => 2,
        (Color::Blue, true) => 3,
    }
}

fn outer_edges(x: &ExtendedDual) -> HashSet<Edge> {
    let o = x.graph.outer_face();
    (0..o.len()).map(|i| key(o[i], o[(i + 1) % o.len()])).collect()
}

/// Structure read off a generic layout.
pub fn transversal_of(layout: &Layout) -> Result<TransversalStructure> {
    let x = extended_dual(layout)?;
    let [s, w, n, e] = x.boundary;
    let mut labels = BTreeMap::new();
    for c in layout.grid().contacts() {
        let color = match c.orientation {
            Orientation::Horizontal => Color::Red,
            Orientation::Vertical => Color::Blue,
        };
        labels.insert(key(c.a, c.b), (color, c.a));
    }
    let rot = x.graph.rotation();
    for &r in &rot[s] {
        if r != w && r != e {
            labels.insert(key(s, r), (Color::Red, s));
        }
    }
    for &r in &rot[n] {
        if r != w && r != e {
            labels.insert(key(n, r), (Color::Red, r));
        }
    }
    for &r in &rot[w] {
        if r != s && r != n {
            labels.insert(key(w, r), (Color::Blue, w));
        }
    }
    for &r in &rot[e] {
        if r != s && r != n {
            labels.insert(key(e, r), (Color::Blue, r));
        }
    }
    Ok(TransversalStructure { graph: x, labels })
}

impl TransversalStructure {
    pub fn label(&self, a: &str, b: &str) -> Option<(Color, String, String)> {
        let g = &self.graph.graph;
        let (ai, bi) = (g.index_of(a)?, g.index_of(b)?);
        let &(c, t) = self.labels.get(&key(ai, bi))?;
        let h = if t == ai { bi } else { ai };
        Some((c, g.label(t).to_string(), g.label(h).to_string()))
    }

    /// Replaces the label of an inner edge. No validation.
    pub fn with_label(&self, tail: &str, head: &str, color: Color) -> Result<Self> {
        let g = &self.graph.graph;
        let (t, h) = (g.lookup(tail)?, g.lookup(head)?);
        if !self.labels.contains_key(&key(t, h)) {
            return Err(Error::InvalidTransversal(format!("{tail}-{head} is not an inner edge")));
        }
        let mut out = self.clone();
        out.labels.insert(key(t, h), (color, t));
        Ok(out)
    }

    pub fn inner_edge_count(&self) -> usize {
        self.labels.len()
    }

    pub fn to_json(&self) -> Vec<EdgeLabelJson> {
        let g = &self.graph.graph;
        let mut out: Vec<EdgeLabelJson> = self
            .labels
            .iter()
            .map(|(&(a, b), &(color, t))| {
                let (u, v) = if g.label(a) <= g.label(b) { (a, b) } else { (b, a) };
                EdgeLabelJson { u: g.label(u).to_string(), v: g.label(v).to_string(), color, dir: if t == u { "uv".into() } else { "vu".into() } }
            })
            .collect();
        out.sort_by(|x, y| (&x.u, &x.v).cmp(&(&y.u, &y.v)));
        out
    }

    /// Hashable fingerprint of the labelling.
    pub fn fingerprint(&self) -> Vec<(Color, usize)> {
        self.labels.values().copied().collect()
    }

    /// Boundary and four-block conditions.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        let g = &self.graph.graph;
        let [s, w, n, e] = self.graph.boundary;
        let outer = outer_edges(&self.graph);
        let viol = |at: String, reason: &str| Violation { at, reason: reason.to_string() };
        for (v, nb) in g.rotation().iter().enumerate() {
            for &u in nb {
                if !outer.contains(&key(u, v)) && !self.labels.contains_key(&key(u, v)) {
                    return Err(viol(format!("{}-{}", g.label(v), g.label(u)), "unlabelled inner edge"));
                }
            }
        }
        for (b, want_color, want_out) in [(s, Color::Red, true), (w, Color::Blue, true), (n, Color::Red, false), (e, Color::Blue, false)] {
            for &u in &g.rotation()[b] {
                if let Some(&(c, t)) = self.labels.get(&key(b, u)) {
                    if c != want_color || (t == b) != want_out {
                        return Err(viol(format!("{}-{}", g.label(b), g.label(u)), "boundary edge has the wrong color or direction"));
                    }
                }
            }
        }
        for v in 0..g.vertex_count() {
            if self.graph.boundary.contains(&v) {
                continue;
            }
            let types: Vec<u8> = g.rotation()[v]
                .iter()
                .map(|&u| {
                    let (c, t) = self.labels[&key(u, v)];
                    block(c, t == v)
                })
                .collect();
            if !four_blocks(&types) {
                return Err(viol(g.label(v).to_string(), "incident edges do not form the four ccw blocks"));
            }
        }
        Ok(())
    }

    /// Directions recomputed from colors and the embedding alone.
    pub fn derive_directions(&self) -> Result<BTreeMap<Edge, usize>> {
        derive_tails(&self.graph, &self.labels.iter().map(|(&k, &(c, _))| (k, c)).collect())
    }

    pub fn alternating_4cycles(&self) -> Vec<AlternatingCycle> {
        alternating_4cycles(self)
    }
}

fn four_blocks(types: &[u8]) -> bool {
    let k = types.len();
    if k < 4 {
        return false;
    }
    let mut changes = 0;
    for i in 0..k {
        let (a, b) = (types[i], types[(i + 1) % k]);
        if a != b {
            if b != (a + 1) % 4 {
                return false;
            }
            changes += 1;
        }
    }
    changes == 4
}

pub fn validate_ts(ts: &TransversalStructure) -> std::result::Result<(), Violation> {
    ts.validate()
}

/// Propagates edge directions from the four boundary vertices through the
/// block rule.
fn derive_tails(x: &ExtendedDual, colors: &BTreeMap<Edge, Color>) -> Result<BTreeMap<Edge, usize>> {
    let g = &x.graph;
    let [s, w, n, e] = x.boundary;
    let rot = g.rotation();
    let mut tail: BTreeMap<Edge, usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for (b, out) in [(s, true), (w, true), (n, false), (e, false)] {
        for &u in &rot[b] {
            if colors.contains_key(&key(b, u)) {
                tail.insert(key(b, u), if out { b } else { u });
                if !x.boundary.contains(&u) {
                    queue.push_back(u);
                }
            }
        }
    }
    let mut done = vec![false; g.vertex_count()];
    while let Some(v) = queue.pop_front() {
        if done[v] {
            continue;
        }
        let nb = &rot[v];
        let k = nb.len();
        let col: Vec<Color> = nb.iter().map(|&u| colors[&key(u, v)]).collect();
        let Some(start) = (0..k).find(|&i| tail.contains_key(&key(v, nb[i]))) else { continue };
        done[v] = true;
        // block index of the known edge, then walk ccw counting color changes
        let t0 = block(col[start], tail[&key(v, nb[start])] == v);
        let mut t = t0;
        for step in 1..k {
            let i = (start + step) % k;
            if col[i] != col[(i + k - 1) % k] {
                t = (t + 1) % 4;
            }
            let out = matches!(t, 0 | 3);
            let want_color = if t.is_multiple_of(2) { Color::Red } else { Color::Blue };
            if want_color != col[i] {
                return Err(Error::InvalidTransversal(format!("colors around {} violate the block rule", g.label(v))));
            }
            let ed = key(v, nb[i]);
            let tl = if out { v } else { nb[i] };
            match tail.get(&ed) {
                Some(&old) if old != tl => {
                    return Err(Error::InvalidTransversal(format!("inconsistent direction on {}-{}", g.label(v), g.label(nb[i]))));
                }
                Some(_) => {}
                None => {
                    tail.insert(ed, tl);
                    if !done[nb[i]] && !x.boundary.contains(&nb[i]) {
                        queue.push_back(nb[i]);
                    }
                }
            }
        }
    }
    if tail.len() != colors.len() {
        return Err(Error::InvalidTransversal("some edge directions could not be derived".into()));
    }
    Ok(tail)
}

/// Faces strictly inside the 4-cycle, as (vertices, edges).
fn cycle_interior(x: &ExtendedDual, cyc: [usize; 4]) -> (Vec<usize>, Vec<Edge>) {
    let g = &x.graph;
    let on_cycle: HashSet<Edge> = (0..4).map(|i| key(cyc[i], cyc[(i + 1) % 4])).collect();
    let faces = g.faces();
    let mut edge_faces: std::collections::HashMap<Edge, Vec<usize>> = std::collections::HashMap::new();
    let mut outer_face = usize::MAX;
    for (fi, f) in faces.iter().enumerate() {
        if crate::dualgraph::cyclic_eq(f, g.outer_face()) && outer_face == usize::MAX {
            outer_face = fi;
        }
        for i in 0..f.len() {
            edge_faces.entry(key(f[i], f[(i + 1) % f.len()])).or_default().push(fi);
        }
    }
    let mut outside = vec![false; faces.len()];
    outside[outer_face] = true;
    let mut stack = vec![outer_face];
    while let Some(fi) = stack.pop() {
        let f = &faces[fi];
        for i in 0..f.len() {
            let ed = key(f[i], f[(i + 1) % f.len()]);
            if on_cycle.contains(&ed) {
                continue;
            }
            for &o in &edge_faces[&ed] {
                if !outside[o] {
                    outside[o] = true;
                    stack.push(o);
                }
            }
        }
    }
    let mut verts = HashSet::new();
    let mut edges = HashSet::new();
    for (fi, f) in faces.iter().enumerate() {
        if outside[fi] {
            continue;
        }
        for i in 0..f.len() {
            let ed = key(f[i], f[(i + 1) % f.len()]);
            if !on_cycle.contains(&ed) {
                edges.insert(ed);
            }
            if !cyc.contains(&f[i]) {
                verts.insert(f[i]);
            }
        }
    }
    let mut verts: Vec<usize> = verts.into_iter().collect();
    verts.sort();
    let mut edges: Vec<Edge> = edges.into_iter().collect();
    edges.sort();
    (verts, edges)
}

pub fn alternating_4cycles(ts: &TransversalStructure) -> Vec<AlternatingCycle> {
    let g = &ts.graph.graph;
    let rot = g.rotation();
    let color = |a: usize, b: usize| ts.labels.get(&key(a, b)).map(|&(c, _)| c);
    let mut out = vec![];
    for a in 0..g.vertex_count() {
        for &b in &rot[a] {
            for &d in &rot[a] {
                if b <= a || d <= b {
                    continue;
                }
                for &c in &rot[b] {
                    if c <= a || c == d || !rot[d].contains(&c) {
                        continue;
                    }
                    let cyc = [a, b, c, d];
                    let cols: Option<Vec<Color>> = (0..4).map(|i| color(cyc[i], cyc[(i + 1) % 4])).collect();
                    let Some(cols) = cols else { continue };
                    if (0..4).any(|i| cols[i] == cols[(i + 1) % 4]) {
                        continue;
                    }
                    let (verts, edges) = cycle_interior(&ts.graph, cyc);
                    out.push(AlternatingCycle {
                        vertices: cyc.map(|v| g.label(v).to_string()),
                        colors: [cols[0], cols[1], cols[2], cols[3]],
                        interior_vertices: verts.iter().map(|&v| g.label(v).to_string()).collect(),
                        idx: cyc,
                        interior_edges: edges,
                    });
                }
            }
        }
    }
    out
}

/// Recolors the edges strictly inside `c` and re-derives directions.
pub fn flip(ts: &TransversalStructure, c: &AlternatingCycle) -> Result<TransversalStructure> {
    let g = &ts.graph.graph;
    let ok = (0..4).all(|i| {
        let (a, b) = (c.idx[i], c.idx[(i + 1) % 4]);
        a < g.vertex_count() && g.label(a) == c.vertices[i] && ts.labels.get(&key(a, b)).map(|&(col, _)| col) == Some(c.colors[i])
    });
    if !ok || (0..4).any(|i| c.colors[i] == c.colors[(i + 1) % 4]) {
        return Err(Error::InvalidCycle);
    }
    let mut colors: BTreeMap<Edge, Color> = ts.labels.iter().map(|(&k, &(col, _))| (k, col)).collect();
    for ed in &c.interior_edges {
        let col = colors.get_mut(ed).ok_or(Error::InvalidCycle)?;
        *col = col.other();
    }
    let tails = derive_tails(&ts.graph, &colors)?;
    let labels = colors.into_iter().map(|(k, col)| (k, (col, tails[&k]))).collect();
    let out = TransversalStructure { graph: ts.graph.clone(), labels };
    out.validate().map_err(|v| Error::InvalidTransversal(format!("flip produced an invalid structure at {}: {}", v.at, v.reason)))?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureSize {
    Exact(usize),
    ExceedsCap(usize),
}

/// Breadth-first flip closure of the layout's structure.
pub fn flip_closure_size(layout: &Layout, cap: usize) -> Result<ClosureSize> {
    let start = transversal_of(layout)?;
    let mut seen: HashSet<Vec<(Color, usize)>> = HashSet::new();
    seen.insert(start.fingerprint());
    let mut queue = VecDeque::from([start]);
    while let Some(ts) = queue.pop_front() {
        for c in ts.alternating_4cycles() {
            let next = flip(&ts, &c)?;
            if seen.insert(next.fingerprint()) {
                if seen.len() > cap {
                    return Ok(ClosureSize::ExceedsCap(cap));
                }
                queue.push_back(next);
            }
        }
    }
    Ok(ClosureSize::Exact(seen.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::tests::{brick, pinwheel_ccw, pinwheel_cw, stack3};
    use crate::geometry::{validate_layout, Rect};

    fn single() -> Layout {
        validate_layout(Rect::int("", 0, 0, 1, 1), vec![Rect::int("v", 0, 0, 1, 1)]).unwrap()
    }

    #[test]
    fn single_rect_structure() {
        let ts = transversal_of(&single()).unwrap();
        assert_eq!(ts.inner_edge_count(), 4);
        assert_eq!(ts.label("S", "v"), Some((Color::Red, "S".into(), "v".into())));
        assert_eq!(ts.label("v", "N"), Some((Color::Red, "v".into(), "N".into())));
        assert_eq!(ts.label("W", "v"), Some((Color::Blue, "W".into(), "v".into())));
        assert_eq!(ts.label("E", "v"), Some((Color::Blue, "v".into(), "E".into())));
        ts.validate().unwrap();
    }

    #[test]
    fn recolored_edge_is_reported() {
        let ts = transversal_of(&single()).unwrap().with_label("W", "v", Color::Red).unwrap();
        let v = ts.validate().unwrap_err();
        assert!(v.at.contains('W'));
        // with the boundary rule skipped, the vertex rule fails at v
        let types = [block(Color::Red, false), block(Color::Blue, true), block(Color::Red, true), block(Color::Red, false)];
        assert!(!four_blocks(&types));
    }

    #[test]
    fn directions_are_redundant() {
        for l in [single(), stack3(), brick(), pinwheel_cw()] {
            let ts = transversal_of(&l).unwrap();
            ts.validate().unwrap();
            let tails = ts.derive_directions().unwrap();
            for (k, (_, t)) in &ts.labels {
                assert_eq!(tails[k], *t);
            }
        }
    }

    #[test]
    fn stack_has_no_alternating_cycle() {
        let ts = transversal_of(&stack3()).unwrap();
        assert!(ts.alternating_4cycles().is_empty());
        assert_eq!(flip_closure_size(&stack3(), 100).unwrap(), ClosureSize::Exact(1));
    }

    #[test]
    fn brick_empty_cycle_flips_diagonal() {
        let ts = transversal_of(&brick()).unwrap();
        let cycles = ts.alternating_4cycles();
        let empty: Vec<_> = cycles.iter().filter(|c| c.is_empty()).collect();
        assert!(!empty.is_empty());
        let c = empty[0];
        assert_eq!(c.interior_edge_count(), 1);
        let f = flip(&ts, c).unwrap();
        f.validate().unwrap();
        assert_ne!(f, ts);
        let c2 = f.alternating_4cycles().into_iter().find(|d| d.idx == c.idx).expect("cycle survives the flip");
        assert_eq!(flip(&f, &c2).unwrap(), ts);
        match flip_closure_size(&brick(), 100).unwrap() {
            ClosureSize::Exact(k) => assert!(k >= 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pinwheel_flip_gives_other_chirality() {
        let cw = transversal_of(&pinwheel_cw()).unwrap();
        let ccw = transversal_of(&pinwheel_ccw()).unwrap();
        assert_eq!(cw.graph, ccw.graph);
        let cycles = cw.alternating_4cycles();
        let windmill: Vec<_> = cycles.iter().filter(|c| c.interior_vertices == vec!["c"]).collect();
        assert_eq!(windmill.len(), 1);
        assert_eq!(flip(&cw, windmill[0]).unwrap(), ccw);
        assert_eq!(flip_closure_size(&pinwheel_cw(), 100).unwrap(), ClosureSize::Exact(2));
    }

    #[test]
    fn cap_is_reported() {
        assert_eq!(flip_closure_size(&pinwheel_cw(), 1).unwrap(), ClosureSize::ExceedsCap(1));
    }

    #[test]
    fn json_shape() {
        let ts = transversal_of(&single()).unwrap();
        let j = serde_json::to_value(ts.to_json()).unwrap();
        assert_eq!(j[0], serde_json::json!({"u": "E", "v": "v", "color": "blue", "dir": "vu"}));
    }
}

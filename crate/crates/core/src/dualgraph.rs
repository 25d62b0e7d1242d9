//! Combinatorial plane graphs given by a rotation system, plus the dual and
//! extended dual of a layout.
//!
//! Rotations list neighbors counterclockwise. Faces are traced with the rule
//! "arriving at `b` from `a`, leave towards the ccw successor of `a` around
//! `b`"; this walks bounded faces clockwise and the outer face
//! counterclockwise, so the traced outer face coincides with the stored
//! counterclockwise boundary walk.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Layout, Orientation};

/// Equality compares rotations and the outer walk as cyclic sequences.
#[derive(Debug, Clone)]
pub struct PlaneGraph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    rotation: Vec<Vec<usize>>,
    outer: Vec<usize>,
}

impl PartialEq for PlaneGraph {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
            && self.rotation.len() == other.rotation.len()
            && self.rotation.iter().zip(&other.rotation).all(|(a, b)| cyclic_eq(a, b))
            && cyclic_eq(&self.outer, &other.outer)
    }
}

impl Eq for PlaneGraph {}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub rotation: std::collections::BTreeMap<String, Vec<String>>,
    pub outer_face: Vec<String>,
}

/// Position lookup for darts: `pos[(v, u)]` = index of `u` in `rotation[v]`.
pub(crate) fn dart_positions(rotation: &[Vec<usize>]) -> HashMap<(usize, usize), usize> {
    let mut pos = HashMap::with_capacity(rotation.iter().map(Vec::len).sum());
    for (v, nb) in rotation.iter().enumerate() {
        for (i, &u) in nb.iter().enumerate() {
            pos.insert((v, u), i);
        }
    }
    pos
}

/// All faces as vertex cycles.
pub(crate) fn trace_faces(rotation: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let pos = dart_positions(rotation);
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut faces = Vec::new();
    for (a, nb) in rotation.iter().enumerate() {
        for &b in nb {
            if seen.contains(&(a, b)) {
                continue;
            }
            let mut face = Vec::new();
            let (mut x, mut y) = (a, b);
            while seen.insert((x, y)) {
                face.push(x);
                let p = pos[&(y, x)];
                let z = rotation[y][(p + 1) % rotation[y].len()];
                x = y;
                y = z;
            }
            faces.push(face);
        }
    }
    faces
}

pub(crate) fn cyclic_eq(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    (0..b.len()).any(|s| (0..a.len()).all(|i| a[i] == b[(s + i) % b.len()]))
}

pub(crate) fn is_connected(adj: &[Vec<usize>], removed: &[bool]) -> bool {
    let start = match (0..adj.len()).find(|&v| !removed[v]) {
        Some(s) => s,
        None => return true,
    };
    let mut seen = removed.to_vec();
    seen[start] = true;
    let mut stack = vec![start];
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                count += 1;
                stack.push(u);
            }
        }
    }
    count == removed.iter().filter(|&&r| !r).count()
}

/// Articulation points, iterative lowpoint DFS. Graph assumed connected.
pub(crate) fn articulation_points(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    if n <= 2 {
        return vec![];
    }
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut is_cut = vec![false; n];
    let mut time = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        let mut root_children = 0;
        // (vertex, parent, next neighbor slot)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        while let Some(&mut (v, parent, ref mut slot)) = stack.last_mut() {
            if *slot < adj[v].len() {
                let u = adj[v][*slot];
                *slot += 1;
                if u == parent {
                    continue;
                }
                if disc[u] == usize::MAX {
                    disc[u] = time;
                    low[u] = time;
                    time += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((u, v, 0));
                } else {
                    low[v] = low[v].min(disc[u]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                    if p != root && low[v] >= disc[p] {
                        is_cut[p] = true;
                    }
                }
            }
        }
        if root_children > 1 {
            is_cut[root] = true;
        }
    }
    (0..n).filter(|&v| is_cut[v]).collect()
}

impl PlaneGraph {
    /// Builds and validates a plane graph from labelled data.
    pub fn new(vertices: Vec<String>, rotation: &HashMap<String, Vec<String>>, outer_face: &[String]) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate vertex {v}")));
            }
        }
        let look = |s: &String| index.get(s).copied().ok_or_else(|| Error::UnknownVertex(s.clone()));
        let mut rot = vec![Vec::new(); vertices.len()];
        for (v, nb) in rotation {
            let vi = look(v)?;
            rot[vi] = nb.iter().map(look).collect::<Result<_>>()?;
        }
        let outer = outer_face.iter().map(look).collect::<Result<Vec<_>>>()?;
        Self::from_indices(vertices, rot, outer)
    }

    pub(crate) fn from_indices(labels: Vec<String>, rotation: Vec<Vec<usize>>, outer: Vec<usize>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        if rotation.len() != n {
            return Err(Error::InvalidGraph("rotation size mismatch".into()));
        }
        let mut edges = HashSet::new();
        for (v, nb) in rotation.iter().enumerate() {
            let mut local = HashSet::new();
            for &u in nb {
                if u >= n {
                    return Err(Error::InvalidGraph(format!("neighbor index {u} out of range")));
                }
                if u == v {
                    return Err(Error::InvalidGraph(format!("loop at {}", labels[v])));
                }
                if !local.insert(u) {
                    return Err(Error::InvalidGraph(format!("multi-edge {}-{}", labels[v], labels[u])));
                }
                edges.insert((v.min(u), v.max(u)));
            }
        }
        for (v, nb) in rotation.iter().enumerate() {
            for &u in nb {
                if !rotation[u].contains(&v) {
                    return Err(Error::InvalidGraph(format!("asymmetric edge {}-{}", labels[v], labels[u])));
                }
            }
        }
        if !is_connected(&rotation, &vec![false; n]) {
            return Err(Error::Disconnected);
        }
        let faces = trace_faces(&rotation);
        let f = if n == 1 { 1 } else { faces.len() };
        if n as i64 - edges.len() as i64 + f as i64 != 2 {
            return Err(Error::InvalidGraph("rotation system is not planar (Euler check failed)".into()));
        }
        if n == 1 {
            if outer != [0] {
                return Err(Error::InvalidGraph("outer face of a single vertex must be that vertex".into()));
            }
        } else if !faces.iter().any(|fc| cyclic_eq(fc, &outer)) {
            return Err(Error::InvalidGraph("outer_face is not a face of the rotation system".into()));
        }
        let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        Ok(PlaneGraph { labels, index, rotation, outer })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: GraphJson = serde_json::from_str(s).map_err(|e| Error::Input(e.to_string()))?;
        Self::from_json(j)
    }

    pub fn from_json(j: GraphJson) -> Result<Self> {
        let rot: HashMap<String, Vec<String>> = j.rotation.into_iter().collect();
        Self::new(j.vertices, &rot, &j.outer_face)
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self.labels.clone(),
            rotation: self.rotation.iter().enumerate().map(|(v, nb)| (self.labels[v].clone(), nb.iter().map(|&u| self.labels[u].clone()).collect())).collect(),
            outer_face: self.outer.iter().map(|&v| self.labels[v].clone()).collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.rotation.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub(crate) fn lookup(&self, label: &str) -> Result<usize> {
        self.index_of(label).ok_or_else(|| Error::UnknownVertex(label.to_string()))
    }

    pub fn rotation(&self) -> &[Vec<usize>] {
        &self.rotation
    }

    /// Counterclockwise neighbors of `label`.
    pub fn neighbors(&self, label: &str) -> Result<Vec<&str>> {
        let v = self.lookup(label)?;
        Ok(self.rotation[v].iter().map(|&u| self.labels[u].as_str()).collect())
    }

    /// Clockwise neighbors, the reversed rotation.
    pub fn neighbors_cw(&self, label: &str) -> Result<Vec<&str>> {
        let mut v = self.neighbors(label)?;
        v.reverse();
        Ok(v)
    }

    pub fn outer_face(&self) -> &[usize] {
        &self.outer
    }

    pub fn outer_face_labels(&self) -> Vec<&str> {
        self.outer.iter().map(|&v| self.labels[v].as_str()).collect()
    }

    pub fn faces(&self) -> Vec<Vec<usize>> {
        trace_faces(&self.rotation)
    }

    /// Inner faces, that is every traced face except the outer one.
    pub fn inner_faces(&self) -> Vec<Vec<usize>> {
        if self.vertex_count() == 1 {
            return vec![];
        }
        let mut skipped = false;
        self.faces()
            .into_iter()
            .filter(|f| {
                if !skipped && cyclic_eq(f, &self.outer) {
                    skipped = true;
                    false
                } else {
                    true
                }
            })
            .collect()
    }

    /// Undirected edges as sorted label pairs.
    pub fn edge_set(&self) -> BTreeSet<(String, String)> {
        let mut out = BTreeSet::new();
        for (v, nb) in self.rotation.iter().enumerate() {
            for &u in nb {
                let (a, b) = (&self.labels[v], &self.labels[u]);
                if a < b {
                    out.insert((a.clone(), b.clone()));
                }
            }
        }
        out
    }

    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(x), Some(y)) => self.rotation[x].contains(&y),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedDual {
    pub graph: PlaneGraph,
    /// Indices of the boundary vertices S, W, N, E.
    pub boundary: [usize; 4],
}

pub const BOUNDARY_LABELS: [&str; 4] = ["S", "W", "N", "E"];

/// Which side of rect `i` a neighbor sits on, and the sort key along the
/// counterclockwise perimeter walk (bottom, right, top, left).
fn perimeter_key(side: u8, pos: u32) -> (u8, u32) {
    match side {
        0 => (0, pos),
        1 => (1, pos),
        2 => (2, u32::MAX - pos),
        _ => (3, u32::MAX - pos),
    }
}

fn rect_rotations(layout: &Layout) -> Vec<Vec<((u8, u32), usize)>> {
    let g = layout.grid();
    let mut keyed: Vec<Vec<((u8, u32), usize)>> = vec![Vec::new(); layout.len()];
    for c in g.contacts() {
        match c.orientation {
            Orientation::Vertical => {
                keyed[c.a].push((perimeter_key(1, c.lo), c.b));
                keyed[c.b].push((perimeter_key(3, c.lo), c.a));
            }
            Orientation::Horizontal => {
                keyed[c.a].push((perimeter_key(2, c.lo), c.b));
                keyed[c.b].push((perimeter_key(0, c.lo), c.a));
            }
        }
    }
    keyed
}

/// Rects along the bbox boundary in ccw order, consecutive repeats removed.
fn boundary_walk(layout: &Layout) -> Vec<usize> {
    let g = layout.grid();
    let (mx, my) = (g.max_x(), g.max_y());
    let mut bottom: Vec<(u32, usize)> = vec![];
    let mut right = vec![];
    let mut top = vec![];
    let mut left = vec![];
    for (i, c) in g.cells.iter().enumerate() {
        if c[2] == 0 {
            bottom.push((c[0], i));
        }
        if c[1] == mx {
            right.push((c[2], i));
        }
        if c[3] == my {
            top.push((u32::MAX - c[0], i));
        }
        if c[0] == 0 {
            left.push((u32::MAX - c[2], i));
        }
    }
    let mut walk = Vec::new();
    for mut side in [bottom, right, top, left] {
        side.sort();
        for (_, i) in side {
            if walk.last() != Some(&i) {
                walk.push(i);
            }
        }
    }
    while walk.len() > 1 && walk.first() == walk.last() {
        walk.pop();
    }
    walk
}

/// Contact graph of the rects with its geometric embedding.
pub fn dual(layout: &Layout) -> Result<PlaneGraph> {
    layout.require_generic()?;
    let mut keyed = rect_rotations(layout);
    let rotation = keyed
        .iter_mut()
        .map(|k| {
            k.sort();
            k.iter().map(|&(_, u)| u).collect()
        })
        .collect();
    let labels = layout.ids().map(String::from).collect();
    PlaneGraph::from_indices(labels, rotation, boundary_walk(layout))
}

/// Dual plus the four bbox sides as vertices S, W, N, E.
pub fn extended_dual(layout: &Layout) -> Result<ExtendedDual> {
    layout.require_generic()?;
    for id in layout.ids() {
        if BOUNDARY_LABELS.contains(&id) {
            return Err(Error::ReservedId(id.to_string()));
        }
    }
    let n = layout.len();
    let (s, w, nn, e) = (n, n + 1, n + 2, n + 3);
    let g = layout.grid();
    let (mx, my) = (g.max_x(), g.max_y());
    let mut keyed = rect_rotations(layout);
    let mut on_bottom = vec![];
    let mut on_right = vec![];
    let mut on_top = vec![];
    let mut on_left = vec![];
    for (i, c) in g.cells.iter().enumerate() {
        if c[2] == 0 {
            keyed[i].push((perimeter_key(0, 0), s));
            on_bottom.push((c[0], i));
        }
        if c[1] == mx {
            keyed[i].push((perimeter_key(1, 0), e));
            on_right.push((c[2], i));
        }
        if c[3] == my {
            keyed[i].push((perimeter_key(2, 0), nn));
            on_top.push((c[0], i));
        }
        if c[0] == 0 {
            keyed[i].push((perimeter_key(3, 0), w));
            on_left.push((c[2], i));
        }
    }
    let mut rotation: Vec<Vec<usize>> = keyed
        .iter_mut()
        .map(|k| {
            k.sort();
            k.iter().map(|&(_, u)| u).collect()
        })
        .collect();
    for v in [&mut on_bottom, &mut on_right, &mut on_top, &mut on_left] {
        v.sort();
    }
    let ids = |v: &[(u32, usize)]| v.iter().map(|&(_, i)| i).collect::<Vec<_>>();
    // S: E, bottom rects right to left, W
    let mut rs = vec![e];
    rs.extend(ids(&on_bottom).into_iter().rev());
    rs.push(w);
    // W: S, left rects bottom to top, N
    let mut rw = vec![s];
    rw.extend(ids(&on_left));
    rw.push(nn);
    // N: W, top rects left to right, E
    let mut rn = vec![w];
    rn.extend(ids(&on_top));
    rn.push(e);
    // E: N, right rects top to bottom, S
    let mut re = vec![nn];
    re.extend(ids(&on_right).into_iter().rev());
    re.push(s);
    rotation.extend([rs, rw, rn, re]);
    let mut labels: Vec<String> = layout.ids().map(String::from).collect();
    labels.extend(BOUNDARY_LABELS.iter().map(|s| s.to_string()));
    let graph = PlaneGraph::from_indices(labels, rotation, vec![s, e, nn, w])?;
    Ok(ExtendedDual { graph, boundary: [s, w, nn, e] })
}

impl ExtendedDual {
    /// Outer 4-cycle, inner faces all triangles, no separating triangle.
    pub fn check_invariants(&self) -> Result<()> {
        let g = &self.graph;
        if !is_near_triangulation(g) {
            return Err(Error::InvalidGraph("extended dual has a non-triangular inner face".into()));
        }
        let faces: HashSet<Vec<usize>> = g
            .inner_faces()
            .into_iter()
            .map(|mut f| {
                f.sort();
                f
            })
            .collect();
        let rot = g.rotation();
        for a in 0..g.vertex_count() {
            for &b in &rot[a] {
                if b <= a {
                    continue;
                }
                for &c in &rot[b] {
                    if c <= b || !rot[a].contains(&c) {
                        continue;
                    }
                    if !faces.contains(&vec![a, b, c]) {
                        return Err(Error::InvalidGraph(format!("separating triangle {} {} {}", g.label(a), g.label(b), g.label(c))));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Every bounded face is a triangle.
pub fn is_near_triangulation(g: &PlaneGraph) -> bool {
    g.inner_faces().iter().all(|f| f.len() == 3)
}

pub fn cut_vertices(g: &PlaneGraph) -> Result<Vec<String>> {
    let mut v: Vec<String> = articulation_points(g.rotation()).into_iter().map(|i| g.label(i).to_string()).collect();
    v.sort();
    Ok(v)
}

/// Some separating pair of a 2-connected graph, searched among outer-face
/// pairs first and then among all pairs.
pub fn find_two_cut(g: &PlaneGraph) -> Result<Option<(String, String)>> {
    let n = g.vertex_count();
    if !articulation_points(g.rotation()).is_empty() {
        return Err(Error::NotBiconnected);
    }
    if n < 4 {
        return Ok(None);
    }
    let separates = |a: usize, b: usize| {
        let mut removed = vec![false; n];
        removed[a] = true;
        removed[b] = true;
        !is_connected(g.rotation(), &removed)
    };
    let mut outer: Vec<usize> = g.outer_face().to_vec();
    outer.sort();
    outer.dedup();
    for (i, &a) in outer.iter().enumerate() {
        for &b in &outer[i + 1..] {
            if separates(a, b) {
                return Ok(Some((g.label(a).to_string(), g.label(b).to_string())));
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            if separates(a, b) {
                return Ok(Some((g.label(a).to_string(), g.label(b).to_string())));
            }
        }
    }
    Ok(None)
}

pub const ISO_SIZE_LIMIT: usize = 12;

/// Canonical adjacency code of an abstract graph: the lexicographically least
/// adjacency bit matrix over all orderings compatible with a stable colour
/// refinement.
pub fn canonical_code(adj: &[Vec<usize>]) -> Result<Vec<u64>> {
    let n = adj.len();
    if n > ISO_SIZE_LIMIT {
        return Err(Error::SizeLimit(n, ISO_SIZE_LIMIT));
    }
    let mut color: Vec<usize> = adj.iter().map(Vec::len).collect();
    loop {
        let sig: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = adj[v].iter().map(|&u| color[u]).collect();
                nb.sort();
                (color[v], nb)
            })
            .collect();
        let mut distinct: Vec<&(usize, Vec<usize>)> = sig.iter().collect();
        distinct.sort();
        distinct.dedup();
        let next: Vec<usize> = sig.iter().map(|s| distinct.binary_search(&s).unwrap()).collect();
        let classes_before = {
            let mut c = color.clone();
            c.sort();
            c.dedup();
            c.len()
        };
        let stable = distinct.len() == classes_before;
        color = next;
        if stable {
            break;
        }
    }
    let mut classes: Vec<Vec<usize>> = vec![];
    let mut ordered: Vec<usize> = (0..n).collect();
    ordered.sort_by_key(|&v| color[v]);
    for v in ordered {
        match classes.last_mut() {
            Some(c) if color[c[0]] == color[v] => c.push(v),
            _ => classes.push(vec![v]),
        }
    }
    let adjm: Vec<u64> = (0..n).map(|v| adj[v].iter().fold(0u64, |m, &u| m | (1 << u))).collect();
    let mut best: Option<Vec<u64>> = None;
    let mut order = Vec::with_capacity(n);
    fn rec(classes: &[Vec<usize>], ci: usize, used: &mut Vec<bool>, order: &mut Vec<usize>, adjm: &[u64], best: &mut Option<Vec<u64>>) {
        if ci == classes.len() {
            let n = order.len();
            let mut pos = vec![0; n];
            for (i, &v) in order.iter().enumerate() {
                pos[v] = i;
            }
            let code: Vec<u64> = order.iter().map(|&v| (0..n).fold(0u64, |m, u| if adjm[v] >> u & 1 == 1 { m | 1 << pos[u] } else { m })).collect();
            if best.as_ref().is_none_or(|b| code < *b) {
                *best = Some(code);
            }
            return;
        }
        let class = &classes[ci];
        let placed = order.iter().filter(|v| class.contains(v)).count();
        if placed == class.len() {
            rec(classes, ci + 1, used, order, adjm, best);
            return;
        }
        for &v in class {
            if !used[v] {
                used[v] = true;
                order.push(v);
                rec(classes, ci, used, order, adjm, best);
                order.pop();
                used[v] = false;
            }
        }
    }
    rec(&classes, 0, &mut vec![false; n], &mut order, &adjm, &mut best);
    let mut code = best.unwrap_or_default();
    // colour signature makes codes from different refinements incomparable
    code.insert(0, n as u64);
    let mut sizes: Vec<u64> = classes.iter().map(|c| (adj[c[0]].len() as u64) << 32 | c.len() as u64).collect();
    code.append(&mut sizes);
    Ok(code)
}

/// Abstract-graph isomorphism (embeddings ignored).
pub fn plane_isomorphic(g1: &PlaneGraph, g2: &PlaneGraph) -> Result<bool> {
    if g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count() {
        if g1.vertex_count().max(g2.vertex_count()) > ISO_SIZE_LIMIT {
            return Err(Error::SizeLimit(g1.vertex_count().max(g2.vertex_count()), ISO_SIZE_LIMIT));
        }
        return Ok(false);
    }
    Ok(canonical_code(g1.rotation())? == canonical_code(g2.rotation())?)
}

/// Connected components of `g` minus the vertices flagged in `removed`.
pub(crate) fn components(adj: &[Vec<usize>], removed: &[bool]) -> Vec<usize> {
    let n = adj.len();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if removed[s] || comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &u in &adj[v] {
                if !removed[u] && comp[u] == usize::MAX {
                    comp[u] = next;
                    q.push_back(u);
                }
            }
        }
        next += 1;
    }
    comp
}

//! Finite directed multigraphs with a per-vertex cyclic out-edge order.
//!
//! The out-edge order is load-bearing: it defines the rotor successor map
//! `e -> e.next()` and therefore every rotor-router trajectory. It is fixed
//! at construction (order of appearance in the edge list) and never changes.

use std::collections::HashMap;

use thiserror::Error;

pub type Vertex = usize;
pub type EdgeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex index {0} out of range (n = {1})")]
    VertexOutOfRange(usize, usize),
    #[error("edge {0} -> {1} leaves the designated sink")]
    EdgeOutOfSink(usize, usize),
    #[error("graph has no designated sink")]
    NoSink,
    #[error("graph has no global sink")]
    NoGlobalSink,
    #[error("graph is not bidirected-with-sink")]
    NotBidirected,
    #[error("graph is not Eulerian")]
    NotEulerian,
}

/// Immutable multidigraph. Parallel edges and self-loops are allowed.
///
/// Equality is structural: same vertex count, sink, coordinates, and
/// per-vertex out-neighbor sequences. Internal edge numbering does not
/// participate, so a serialize/parse round trip compares equal.
#[derive(Debug, Clone)]
pub struct Digraph {
    n: usize,
    tails: Vec<Vertex>,
    heads: Vec<Vertex>,
    /// Out-edges of each vertex in cyclic rotor order.
    out: Vec<Vec<EdgeId>>,
    sink: Option<Vertex>,
    coords: Vec<Option<(i64, i64)>>,
    // In-edge CSR, used by sweep stabilization and in-degree queries.
    in_start: Vec<usize>,
    in_src: Vec<Vertex>,
}

impl Digraph {
    /// Builds a graph from an ordered edge list. The order of appearance of
    /// the edges at each tail defines that vertex's cyclic out-edge order.
    pub fn new(
        n: usize,
        edges: &[(Vertex, Vertex)],
        sink: Option<Vertex>,
    ) -> Result<Self, GraphError> {
        if let Some(s) = sink {
            if s >= n {
                return Err(GraphError::VertexOutOfRange(s, n));
            }
        }
        let mut tails = Vec::with_capacity(edges.len());
        let mut heads = Vec::with_capacity(edges.len());
        let mut out = vec![Vec::new(); n];
        for (id, &(u, v)) in edges.iter().enumerate() {
            if u >= n {
                return Err(GraphError::VertexOutOfRange(u, n));
            }
            if v >= n {
                return Err(GraphError::VertexOutOfRange(v, n));
            }
            if sink == Some(u) {
                return Err(GraphError::EdgeOutOfSink(u, v));
            }
            tails.push(u);
            heads.push(v);
            out[u].push(id);
        }
        let (in_start, in_src) = build_in_csr(n, &tails, &heads);
        Ok(Digraph {
            n,
            tails,
            heads,
            out,
            sink,
            coords: vec![None; n],
            in_start,
            in_src,
        })
    }

    pub fn with_coords(mut self, coords: Vec<Option<(i64, i64)>>) -> Self {
        assert_eq!(coords.len(), self.n);
        self.coords = coords;
        self
    }

    /// The same graph with all out-edges of `v` deleted and `v` designated
    /// as the sink. Edge identifiers are reassigned; relative order of the
    /// surviving edges is preserved.
    pub fn with_sink_at(&self, v: Vertex) -> Result<Self, GraphError> {
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange(v, self.n));
        }
        let mut edges = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            if u == v {
                continue;
            }
            for &e in &self.out[u] {
                edges.push((u, self.heads[e]));
            }
        }
        Ok(Digraph::new(self.n, &edges, Some(v))?.with_coords(self.coords.clone()))
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.tails.len()
    }

    pub fn tail(&self, e: EdgeId) -> Vertex {
        self.tails[e]
    }

    pub fn head(&self, e: EdgeId) -> Vertex {
        self.heads[e]
    }

    pub fn sink(&self) -> Option<Vertex> {
        self.sink
    }

    pub fn coord(&self, v: Vertex) -> Option<(i64, i64)> {
        self.coords[v]
    }

    pub fn has_coords(&self) -> bool {
        self.coords.iter().any(|c| c.is_some())
    }

    pub fn out_edges(&self, v: Vertex) -> &[EdgeId] {
        &self.out[v]
    }

    pub fn outdeg(&self, v: Vertex) -> usize {
        self.out[v].len()
    }

    pub fn indeg(&self, v: Vertex) -> usize {
        self.in_start[v + 1] - self.in_start[v]
    }

    /// Tails of the edges pointing into `v`, with multiplicity.
    pub fn in_sources(&self, v: Vertex) -> &[Vertex] {
        &self.in_src[self.in_start[v]..self.in_start[v + 1]]
    }

    pub fn is_sink_vertex(&self, v: Vertex) -> bool {
        self.out[v].is_empty()
    }

    /// Position of edge `e` in its tail's cyclic order.
    pub fn edge_position(&self, e: EdgeId) -> usize {
        let v = self.tails[e];
        self.out[v].iter().position(|&x| x == e).expect("edge in out order")
    }

    /// Successor of `e` in the cyclic ordering at its tail.
    pub fn next_edge(&self, e: EdgeId) -> EdgeId {
        let v = self.tails[e];
        let d = self.out[v].len();
        let p = self.edge_position(e);
        self.out[v][(p + 1) % d]
    }

    /// Predecessor of `e` in the cyclic ordering at its tail.
    pub fn prev_edge(&self, e: EdgeId) -> EdgeId {
        let v = self.tails[e];
        let d = self.out[v].len();
        let p = self.edge_position(e);
        self.out[v][(p + d - 1) % d]
    }

    /// Number of edges from `v` to `w`.
    pub fn adjacency_count(&self, v: Vertex, w: Vertex) -> usize {
        self.out[v].iter().filter(|&&e| self.heads[e] == w).count()
    }

    /// True when a designated sink exists, has out-degree zero, and is
    /// reachable from every other vertex.
    pub fn has_global_sink(&self) -> bool {
        let s = match self.sink {
            Some(s) => s,
            None => return false,
        };
        if !self.out[s].is_empty() {
            return false;
        }
        // Reverse reachability from the sink.
        let mut seen = vec![false; self.n];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            for &u in self.in_sources(v) {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.iter().all(|&b| b)
    }

    pub fn require_global_sink(&self) -> Result<Vertex, GraphError> {
        if self.has_global_sink() {
            Ok(self.sink.unwrap())
        } else if self.sink.is_none() {
            Err(GraphError::NoSink)
        } else {
            Err(GraphError::NoGlobalSink)
        }
    }

    pub fn is_sink_free(&self) -> bool {
        (0..self.n).all(|v| !self.out[v].is_empty())
    }

    /// Bidirected-with-sink in the sense of an undirected graph whose edges
    /// were doubled and whose sink out-edges were then deleted: the
    /// adjacency counts are symmetric between every pair of non-sink
    /// vertices.
    pub fn is_bidirected_with_sink(&self) -> bool {
        if !self.has_global_sink() {
            return false;
        }
        let s = self.sink.unwrap();
        let mut diff: HashMap<(Vertex, Vertex), i64> = HashMap::new();
        for e in 0..self.edge_count() {
            let (u, v) = (self.tails[e], self.heads[e]);
            if u == v || u == s || v == s {
                continue;
            }
            let key = if u < v { (u, v) } else { (v, u) };
            *diff.entry(key).or_insert(0) += if u < v { 1 } else { -1 };
        }
        diff.values().all(|&d| d == 0)
    }
}

impl PartialEq for Digraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.sink == other.sink
            && self.coords == other.coords
            && (0..self.n).all(|v| {
                self.out[v].len() == other.out[v].len()
                    && self.out[v]
                        .iter()
                        .zip(&other.out[v])
                        .all(|(&a, &b)| self.heads[a] == other.heads[b])
            })
    }
}

impl Eq for Digraph {}

fn build_in_csr(n: usize, tails: &[Vertex], heads: &[Vertex]) -> (Vec<usize>, Vec<Vertex>) {
    let mut counts = vec![0usize; n + 1];
    for &h in heads {
        counts[h + 1] += 1;
    }
    for i in 0..n {
        counts[i + 1] += counts[i];
    }
    let mut src = vec![0; tails.len()];
    let mut cursor = counts.clone();
    for e in 0..tails.len() {
        let h = heads[e];
        src[cursor[h]] = tails[e];
        cursor[h] += 1;
    }
    (counts, src)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphClassification {
    pub has_global_sink: bool,
    pub strongly_connected: bool,
    pub eulerian: bool,
    pub eulerian_with_sink: bool,
    pub bidirected: bool,
    /// Strongly connected components of `G \ sink` when a sink is set,
    /// of `G` otherwise.
    pub scc_list: Vec<Vec<Vertex>>,
}

/// Structural classification used by the engines' precondition checks.
pub fn classify(g: &Digraph) -> GraphClassification {
    let n = g.vertex_count();
    let has_global_sink = g.has_global_sink();
    let scc_all = strongly_connected_components(g, None);
    let strongly_connected = scc_all.len() == 1 && n >= 1;
    let eulerian = strongly_connected && (0..n).all(|v| g.indeg(v) == g.outdeg(v));
    let eulerian_with_sink = has_global_sink
        && (0..n)
            .filter(|&v| Some(v) != g.sink())
            .all(|v| g.outdeg(v) >= g.indeg(v));
    let bidirected = is_bidirected(g);
    let scc_list = match g.sink() {
        Some(s) => strongly_connected_components(g, Some(s)),
        None => scc_all,
    };
    GraphClassification {
        has_global_sink,
        strongly_connected,
        eulerian,
        eulerian_with_sink,
        bidirected,
        scc_list,
    }
}

fn is_bidirected(g: &Digraph) -> bool {
    let mut diff: HashMap<(Vertex, Vertex), i64> = HashMap::new();
    for e in 0..g.edge_count() {
        let (u, v) = (g.tail(e), g.head(e));
        if u == v {
            continue;
        }
        let key = if u < v { (u, v) } else { (v, u) };
        *diff.entry(key).or_insert(0) += if u < v { 1 } else { -1 };
    }
    diff.values().all(|&d| d == 0)
}

/// Iterative Tarjan SCC; `skip` removes one vertex (and its edges).
pub fn strongly_connected_components(g: &Digraph, skip: Option<Vertex>) -> Vec<Vec<Vertex>> {
    let n = g.vertex_count();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<Vertex> = Vec::new();
    let mut next_index = 0usize;
    let mut comps: Vec<Vec<Vertex>> = Vec::new();

    // Explicit DFS frames: (vertex, next out-edge offset).
    let mut frames: Vec<(Vertex, usize)> = Vec::new();
    for root in 0..n {
        if Some(root) == skip || index[root] != usize::MAX {
            continue;
        }
        frames.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = frames.last_mut() {
            if *i < g.outdeg(v) {
                let e = g.out_edges(v)[*i];
                *i += 1;
                let w = g.head(e);
                if Some(w) == skip {
                    continue;
                }
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&mut (p, _)) = frames.last_mut() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps.sort();
    comps
}

/// Graph Laplacian `D - A`; self-loops cancel on the diagonal.
pub fn laplacian(g: &Digraph) -> crate::intalg::IntMatrix {
    laplacian_with_labels(g, (0..g.vertex_count()).collect())
}

/// Laplacian with the sink row and column deleted.
pub fn reduced_laplacian(g: &Digraph) -> Result<crate::intalg::IntMatrix, GraphError> {
    let s = g.sink().ok_or(GraphError::NoSink)?;
    let labels: Vec<Vertex> = (0..g.vertex_count()).filter(|&v| v != s).collect();
    Ok(laplacian_with_labels(g, labels))
}

fn laplacian_with_labels(g: &Digraph, labels: Vec<Vertex>) -> crate::intalg::IntMatrix {
    use num_bigint::BigInt;
    let dim = labels.len();
    let col_of: HashMap<Vertex, usize> = labels.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut entries = vec![BigInt::from(0); dim * dim];
    for (row, &v) in labels.iter().enumerate() {
        entries[row * dim + row] = BigInt::from(g.outdeg(v) as i64);
        for &e in g.out_edges(v) {
            if let Some(&col) = col_of.get(&g.head(e)) {
                entries[row * dim + col] -= 1;
            }
        }
    }
    crate::intalg::IntMatrix::new(dim, entries, labels)
}

/// Built-in graph families.
///
/// Embedded families (grids, disks, tori) order the out-edges clockwise
/// starting from the +x direction, with the y-axis pointing up; a missing
/// grid neighbor of a wired family is replaced by one edge to the sink in
/// the same slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    GridWired(usize),
    DirectedTorus(usize),
    DiskWired(usize),
    Complete(usize),
    CompleteWithSink(usize),
    Bidirected(Vec<(usize, usize)>),
    PathBidirected(usize),
}

/// Clockwise direction sequence starting from east, y-axis up.
const CLOCKWISE: [(i64, i64); 4] = [(1, 0), (0, -1), (-1, 0), (0, 1)];

pub fn generate(family: &Family) -> Digraph {
    match *family {
        Family::GridWired(l) => grid_wired(l),
        Family::DirectedTorus(l) => directed_torus(l),
        Family::DiskWired(d) => disk_wired(d),
        Family::Complete(k) => complete(k, false),
        Family::CompleteWithSink(k) => complete(k, true),
        Family::Bidirected(ref list) => bidirected(list),
        Family::PathBidirected(l) => path_bidirected(l),
    }
}

fn grid_wired(l: usize) -> Digraph {
    assert!(l >= 1);
    let n = l * l;
    let sink = n;
    let idx = |i: usize, j: usize| i * l + j;
    let mut edges = Vec::with_capacity(4 * n);
    let mut coords = vec![None; n + 1];
    for i in 0..l {
        for j in 0..l {
            let (x, y) = (j as i64, i as i64);
            coords[idx(i, j)] = Some((x, y));
            for (dx, dy) in CLOCKWISE {
                let (nx, ny) = (x + dx, y + dy);
                if nx >= 0 && nx < l as i64 && ny >= 0 && ny < l as i64 {
                    edges.push((idx(i, j), idx(ny as usize, nx as usize)));
                } else {
                    edges.push((idx(i, j), sink));
                }
            }
        }
    }
    Digraph::new(n + 1, &edges, Some(sink))
        .unwrap()
        .with_coords(coords)
}

fn directed_torus(l: usize) -> Digraph {
    assert!(l >= 1);
    let n = l * l;
    let idx = |i: usize, j: usize| i * l + j;
    let mut edges = Vec::new();
    let mut coords = vec![None; n];
    for i in 0..l {
        for j in 0..l {
            coords[idx(i, j)] = Some((j as i64, i as i64));
            if (i, j) == (0, 0) {
                continue; // sink: outgoing edges deleted
            }
            // East, then north: the clockwise order restricted to the two
            // outgoing directions of the torus.
            edges.push((idx(i, j), idx(i, (j + 1) % l)));
            edges.push((idx(i, j), idx((i + 1) % l, j)));
        }
    }
    Digraph::new(n, &edges, Some(0)).unwrap().with_coords(coords)
}

fn disk_wired(diameter: usize) -> Digraph {
    assert!(diameter >= 1);
    let d = diameter as i64;
    let r = (d / 2) + 2;
    let inside = |x: i64, y: i64| 4 * (x * x + y * y) < d * d;
    let mut index: HashMap<(i64, i64), usize> = HashMap::new();
    let mut pts = Vec::new();
    for y in (-r..=r).rev() {
        for x in -r..=r {
            if inside(x, y) {
                index.insert((x, y), pts.len());
                pts.push((x, y));
            }
        }
    }
    let n = pts.len();
    let sink = n;
    let mut edges = Vec::new();
    let mut coords = vec![None; n + 1];
    for (v, &(x, y)) in pts.iter().enumerate() {
        coords[v] = Some((x, y));
        for (dx, dy) in CLOCKWISE {
            match index.get(&(x + dx, y + dy)) {
                Some(&w) => edges.push((v, w)),
                None => edges.push((v, sink)),
            }
        }
    }
    Digraph::new(n + 1, &edges, Some(sink))
        .unwrap()
        .with_coords(coords)
}

fn complete(k: usize, with_sink: bool) -> Digraph {
    assert!(k >= 1);
    let sink = if with_sink { Some(k - 1) } else { None };
    let mut edges = Vec::new();
    for u in 0..k {
        if sink == Some(u) {
            continue;
        }
        for v in 0..k {
            if u != v {
                edges.push((u, v));
            }
        }
    }
    Digraph::new(k, &edges, sink).unwrap()
}

fn bidirected(list: &[(usize, usize)]) -> Digraph {
    let n = list
        .iter()
        .map(|&(u, v)| u.max(v) + 1)
        .max()
        .unwrap_or(0)
        .max(1);
    let mut edges = Vec::with_capacity(2 * list.len());
    for &(u, v) in list {
        edges.push((u, v));
        edges.push((v, u));
    }
    Digraph::new(n, &edges, None).unwrap()
}

fn path_bidirected(l: usize) -> Digraph {
    assert!(l >= 1);
    let sink = l - 1;
    let mut edges = Vec::new();
    let mut coords = vec![None; l];
    for v in 0..l {
        coords[v] = Some((v as i64, 0));
        if v == sink {
            continue;
        }
        // Clockwise from east: the +x neighbor first, then the -x neighbor.
        if v + 1 < l {
            edges.push((v, v + 1));
        }
        if v > 0 {
            edges.push((v, v - 1));
        }
    }
    Digraph::new(l, &edges, Some(sink)).unwrap().with_coords(coords)
}

/// Sink-free bidirected grid with clockwise out-edge order and embedding;
/// the `rows` x `cols` case with 34 directed edges at 3x4 is the standard
/// unicycle-orbit testbed.
pub fn grid_bidirected(rows: usize, cols: usize) -> Digraph {
    assert!(rows >= 1 && cols >= 1);
    let idx = |i: usize, j: usize| i * cols + j;
    let mut edges = Vec::new();
    let mut coords = vec![None; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            coords[idx(i, j)] = Some((j as i64, i as i64));
            for (dx, dy) in CLOCKWISE {
                let (nx, ny) = (j as i64 + dx, i as i64 + dy);
                if nx >= 0 && nx < cols as i64 && ny >= 0 && ny < rows as i64 {
                    edges.push((idx(i, j), idx(ny as usize, nx as usize)));
                }
            }
        }
    }
    Digraph::new(rows * cols, &edges, None)
        .unwrap()
        .with_coords(coords)
}

/// The three-vertex complete graph with one vertex made into a sink:
/// two vertices each with an edge to the other and an edge to the sink.
/// Its sandpile group is cyclic of order 3.
pub fn two_vertex_triangle() -> Digraph {
    generate(&Family::CompleteWithSink(3))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_complete_digraph() {
        let g = generate(&Family::Complete(3));
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 6);
        for v in 0..3 {
            assert_eq!(g.outdeg(v), 2);
            assert_eq!(g.indeg(v), 2);
        }
    }

    #[test]
    fn build_zero_figure_graph() {
        let g = two_vertex_triangle();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.sink(), Some(2));
        assert_eq!(g.outdeg(0), 2);
        assert_eq!(g.outdeg(1), 2);
        assert_eq!(g.outdeg(2), 0);
        assert!(g.has_global_sink());
    }

    #[test]
    fn single_sink_vertex() {
        let g = Digraph::new(1, &[], None).unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 0);
        assert!(g.is_sink_vertex(0));
    }

    #[test]
    fn rejects_bad_indices_and_sink_edges() {
        assert!(matches!(
            Digraph::new(2, &[(0, 5)], None),
            Err(GraphError::VertexOutOfRange(5, 2))
        ));
        assert!(matches!(
            Digraph::new(2, &[(1, 0)], Some(1)),
            Err(GraphError::EdgeOutOfSink(1, 0))
        ));
    }

    #[test]
    fn classify_zero_figure() {
        let c = classify(&two_vertex_triangle());
        assert!(c.has_global_sink);
        assert!(c.eulerian_with_sink);
        assert!(!c.strongly_connected);
        assert!(!c.eulerian);
    }

    #[test]
    fn classify_directed_cycle() {
        let g = Digraph::new(3, &[(0, 1), (1, 2), (2, 0)], None).unwrap();
        let c = classify(&g);
        assert!(c.strongly_connected);
        assert!(c.eulerian);
        assert!(!c.has_global_sink);
        assert_eq!(c.scc_list.len(), 1);
    }

    #[test]
    fn classify_unreachable_sink() {
        let g = Digraph::new(2, &[], Some(1)).unwrap();
        assert!(!classify(&g).has_global_sink);
    }

    #[test]
    fn grid_wired_two() {
        let g = generate(&Family::GridWired(2));
        assert_eq!(g.vertex_count(), 5);
        for v in 0..4 {
            assert_eq!(g.outdeg(v), 4);
            // each corner: two grid neighbors, two sink edges
            let to_sink = g.out_edges(v).iter().filter(|&&e| g.head(e) == 4).count();
            assert_eq!(to_sink, 2);
        }
        assert!(g.has_global_sink());
        assert!(classify(&g).eulerian_with_sink);
    }

    #[test]
    fn torus_two() {
        let g = generate(&Family::DirectedTorus(2));
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.sink(), Some(0));
        for v in 1..4 {
            assert_eq!(g.outdeg(v), 2);
        }
        assert!(g.has_global_sink());
    }

    #[test]
    fn clockwise_out_order_on_grid() {
        // Interior vertex of a 3x3 grid: east, south, west, north.
        let g = generate(&Family::GridWired(3));
        let c = |v: usize| g.coord(v).unwrap();
        let v = 4; // center (i=1, j=1) -> (x=1, y=1)
        let heads: Vec<(i64, i64)> = g.out_edges(v).iter().map(|&e| c(g.head(e))).collect();
        assert_eq!(heads, vec![(2, 1), (1, 0), (0, 1), (1, 2)]);
    }

    #[test]
    fn with_sink_preserves_order() {
        let g = generate(&Family::Complete(3));
        let gs = g.with_sink_at(2).unwrap();
        assert_eq!(gs.sink(), Some(2));
        assert_eq!(gs.edge_count(), 4);
        assert_eq!(gs.outdeg(2), 0);
        let heads: Vec<usize> = gs.out_edges(0).iter().map(|&e| gs.head(e)).collect();
        assert_eq!(heads, vec![1, 2]);
        assert!(gs.is_bidirected_with_sink());
    }

    #[test]
    fn grid_bidirected_edge_count() {
        let g = grid_bidirected(3, 4);
        assert_eq!(g.vertex_count(), 12);
        assert_eq!(g.edge_count(), 34);
        assert!(classify(&g).eulerian);
        assert!(classify(&g).bidirected);
    }

    #[test]
    fn self_loop_counts() {
        let g = Digraph::new(2, &[(0, 0), (0, 1)], Some(1)).unwrap();
        assert_eq!(g.outdeg(0), 2);
        assert_eq!(g.indeg(0), 1);
        assert_eq!(g.adjacency_count(0, 0), 1);
    }

    #[test]
    fn laplacian_zero_figure() {
        use num_bigint::BigInt;
        let lap = reduced_laplacian(&two_vertex_triangle()).unwrap();
        assert_eq!(lap.dim(), 2);
        let want = [[2i64, -1], [-1, 2]];
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(*lap.get(i, j), BigInt::from(want[i][j]));
            }
        }
    }

    #[test]
    fn laplacian_parallel_sink_edges() {
        use num_bigint::BigInt;
        let g = Digraph::new(2, &[(0, 1), (0, 1), (0, 1)], Some(1)).unwrap();
        let lap = reduced_laplacian(&g).unwrap();
        assert_eq!(lap.dim(), 1);
        assert_eq!(*lap.get(0, 0), BigInt::from(3));
    }

    #[test]
    fn laplacian_self_loop_cancels() {
        use num_bigint::BigInt;
        let g = Digraph::new(2, &[(0, 0)], Some(1)).unwrap();
        let lap = laplacian(&g);
        for j in 0..2 {
            assert_eq!(*lap.get(0, j), BigInt::from(0));
        }
    }

    #[test]
    fn laplacian_rows_sum_to_zero() {
        use num_bigint::BigInt;
        use num_traits::Zero;
        for f in [Family::GridWired(3), Family::DirectedTorus(3), Family::Complete(4)] {
            let g = generate(&f);
            let lap = laplacian(&g);
            for i in 0..lap.dim() {
                let sum: BigInt = (0..lap.dim()).map(|j| lap.get(i, j).clone()).sum();
                assert!(sum.is_zero());
            }
        }
    }
}

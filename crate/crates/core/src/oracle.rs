//! Brute-force ground truth, kept independent of the engines it checks.
//!
//! The only engine code shared with the modules under test is the
//! single-vertex `fire` primitive; stabilization, recurrence and
//! superstability are all re-derived here from first principles
//! (exhaustive enumeration, transition graphs, subset search).

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::{self, Digraph, EdgeId, Vertex};
use crate::sandpile::{fire, ChipConfig};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    #[error("graph is not Eulerian")]
    NotEulerian,
    #[error("graph has no global sink")]
    NoGlobalSink,
}

#[derive(Debug, Clone)]
pub struct EnumerationResult<T> {
    pub items: Vec<T>,
}

impl<T> EnumerationResult<T> {
    pub fn count(&self) -> usize {
        self.items.len()
    }
}

/// All oriented spanning trees rooted at `root`: acyclic edge sets in which
/// every non-root vertex has out-degree exactly one. Trees are edge-id
/// sets, sorted.
pub fn enumerate_spanning_trees(
    g: &Digraph,
    root: Vertex,
) -> Result<EnumerationResult<Vec<EdgeId>>, OracleError> {
    let n = g.vertex_count();
    if n > 12 {
        return Err(OracleError::SizeGuard(format!("{} vertices > 12", n)));
    }
    let choosers: Vec<Vertex> = (0..n).filter(|&v| v != root).collect();
    if choosers.iter().any(|&v| g.outdeg(v) == 0) {
        return Ok(EnumerationResult { items: Vec::new() });
    }
    let mut chosen: HashMap<Vertex, Vertex> = HashMap::new(); // v -> head of chosen edge
    let mut picked: Vec<EdgeId> = Vec::new();
    let mut items = Vec::new();
    backtrack_trees(g, root, &choosers, 0, &mut chosen, &mut picked, &mut items);
    Ok(EnumerationResult { items })
}

fn backtrack_trees(
    g: &Digraph,
    root: Vertex,
    choosers: &[Vertex],
    k: usize,
    chosen: &mut HashMap<Vertex, Vertex>,
    picked: &mut Vec<EdgeId>,
    items: &mut Vec<Vec<EdgeId>>,
) {
    if k == choosers.len() {
        let mut t = picked.clone();
        t.sort_unstable();
        items.push(t);
        return;
    }
    let v = choosers[k];
    for &e in g.out_edges(v) {
        let w = g.head(e);
        // Walk the partial functional graph from w; reaching v closes a cycle.
        let mut cur = w;
        let mut cycles = cur == v;
        while !cycles && cur != root {
            #[allow(clippy::map_entry)]
            match chosen.get(&cur) {
                Some(&next) => {
                    cur = next;
                    cycles = cur == v;
                }
                None => break,
            }
        }
        if cycles {
            continue;
        }
        chosen.insert(v, w);
        picked.push(e);
        backtrack_trees(g, root, choosers, k + 1, chosen, picked, items);
        picked.pop();
        chosen.remove(&v);
    }
}

/// Tree count without materializing the trees; same backtracking, same
/// guard.
pub fn count_spanning_trees(g: &Digraph, root: Vertex) -> Result<u64, OracleError> {
    let n = g.vertex_count();
    if n > 12 {
        return Err(OracleError::SizeGuard(format!("{} vertices > 12", n)));
    }
    let choosers: Vec<Vertex> = (0..n).filter(|&v| v != root).collect();
    if choosers.iter().any(|&v| g.outdeg(v) == 0) {
        return Ok(0);
    }
    let mut chosen: HashMap<Vertex, Vertex> = HashMap::new();
    Ok(count_trees_rec(g, root, &choosers, 0, &mut chosen))
}

fn count_trees_rec(
    g: &Digraph,
    root: Vertex,
    choosers: &[Vertex],
    k: usize,
    chosen: &mut HashMap<Vertex, Vertex>,
) -> u64 {
    if k == choosers.len() {
        return 1;
    }
    let v = choosers[k];
    let mut total = 0u64;
    for &e in g.out_edges(v) {
        let w = g.head(e);
        let mut cur = w;
        let mut cycles = cur == v;
        while !cycles && cur != root {
            match chosen.get(&cur) {
                Some(&next) => {
                    cur = next;
                    cycles = cur == v;
                }
                None => break,
            }
        }
        if cycles {
            continue;
        }
        chosen.insert(v, w);
        total += count_trees_rec(g, root, choosers, k + 1, chosen);
        chosen.remove(&v);
    }
    total
}

/// All Eulerian tours starting with the edge `e`, as edge-id sequences.
pub fn enumerate_eulerian_tours(
    g: &Digraph,
    e: EdgeId,
) -> Result<EnumerationResult<Vec<EdgeId>>, OracleError> {
    let m = g.edge_count();
    if m > 16 {
        return Err(OracleError::SizeGuard(format!("{} edges > 16", m)));
    }
    if !graph::classify(g).eulerian {
        return Err(OracleError::NotEulerian);
    }
    let mut used = vec![false; m];
    used[e] = true;
    let mut tour = vec![e];
    let mut items = Vec::new();
    backtrack_tours(g, g.tail(e), g.head(e), &mut used, &mut tour, &mut items);
    Ok(EnumerationResult { items })
}

fn backtrack_tours(
    g: &Digraph,
    start: Vertex,
    at: Vertex,
    used: &mut Vec<bool>,
    tour: &mut Vec<EdgeId>,
    items: &mut Vec<Vec<EdgeId>>,
) {
    if tour.len() == g.edge_count() {
        if at == start {
            items.push(tour.clone());
        }
        return;
    }
    for &e in g.out_edges(at) {
        if used[e] {
            continue;
        }
        used[e] = true;
        tour.push(e);
        backtrack_tours(g, start, g.head(e), used, tour, items);
        tour.pop();
        used[e] = false;
    }
}

/// Tour count without materializing the tours; same guard.
pub fn count_eulerian_tours(g: &Digraph, e: EdgeId) -> Result<u64, OracleError> {
    let m = g.edge_count();
    if m > 16 {
        return Err(OracleError::SizeGuard(format!("{} edges > 16", m)));
    }
    if !graph::classify(g).eulerian {
        return Err(OracleError::NotEulerian);
    }
    let mut used = vec![false; m];
    used[e] = true;
    Ok(count_tours_rec(g, g.tail(e), g.head(e), 1, &mut used))
}

fn count_tours_rec(g: &Digraph, start: Vertex, at: Vertex, len: usize, used: &mut Vec<bool>) -> u64 {
    if len == g.edge_count() {
        return (at == start) as u64;
    }
    let mut total = 0;
    for &e in g.out_edges(at) {
        if used[e] {
            continue;
        }
        used[e] = true;
        total += count_tours_rec(g, start, g.head(e), len + 1, used);
        used[e] = false;
    }
    total
}

/// Oracle stabilization: scan for any active vertex and fire it, one
/// firing at a time. Relies only on the `fire` primitive.
fn naive_stabilize(g: &Digraph, sigma: &ChipConfig) -> ChipConfig {
    let mut cur = sigma.clone();
    'outer: loop {
        for v in 0..g.vertex_count() {
            if Some(v) != g.sink() && g.outdeg(v) > 0 && cur.get(v) >= g.outdeg(v) as u64 {
                cur = fire(g, &cur, v).expect("active vertex fires");
                continue 'outer;
            }
        }
        return cur;
    }
}

fn stable_config_space(g: &Digraph) -> Result<(Vec<Vertex>, Vec<u64>, usize), OracleError> {
    let s = g.sink().ok_or(OracleError::NoGlobalSink)?;
    if !g.has_global_sink() {
        return Err(OracleError::NoGlobalSink);
    }
    let verts: Vec<Vertex> = (0..g.vertex_count()).filter(|&v| v != s).collect();
    let radices: Vec<u64> = verts.iter().map(|&v| g.outdeg(v) as u64).collect();
    let mut total: u128 = 1;
    for &r in &radices {
        total *= r as u128;
        if total > 100_000 {
            return Err(OracleError::SizeGuard(format!(
                "stable configuration space exceeds 1e5"
            )));
        }
    }
    Ok((verts, radices, total as usize))
}

fn decode(verts: &[Vertex], radices: &[u64], n: usize, mut idx: usize, g: &Digraph) -> ChipConfig {
    let mut counts = vec![0u64; n];
    for (i, &v) in verts.iter().enumerate() {
        counts[v] = (idx as u64) % radices[i];
        idx /= radices[i] as usize;
    }
    ChipConfig::from_counts(g, counts).unwrap()
}

fn encode(verts: &[Vertex], radices: &[u64], sigma: &ChipConfig) -> usize {
    let mut idx: u64 = 0;
    for (i, &v) in verts.iter().enumerate().rev() {
        idx = idx * radices[i] + sigma.get(v);
    }
    idx as usize
}

/// The recurrent configurations, computed as the unique terminal strongly
/// connected component of the transition graph over all stable
/// configurations with edges `tau -> (tau + 1_v) stabilized`.
pub fn recurrent_set_oracle(g: &Digraph) -> Result<EnumerationResult<ChipConfig>, OracleError> {
    let (verts, radices, total) = stable_config_space(g)?;
    let n = g.vertex_count();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for idx in 0..total {
        let tau = decode(&verts, &radices, n, idx, g);
        for &v in &verts {
            let mut bumped = tau.clone();
            bumped.add_at(v, 1);
            let next = naive_stabilize(g, &bumped);
            edges.push((idx, encode(&verts, &radices, &next)));
        }
    }
    let trans = Digraph::new(total, &edges, None).expect("transition graph");
    let comps = graph::strongly_connected_components(&trans, None);
    let mut comp_of = vec![usize::MAX; total];
    for (ci, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_of[v] = ci;
        }
    }
    let mut terminal = vec![true; comps.len()];
    for &(u, v) in &edges {
        if comp_of[u] != comp_of[v] {
            terminal[comp_of[u]] = false;
        }
    }
    let terminals: Vec<usize> = (0..comps.len()).filter(|&c| terminal[c]).collect();
    assert_eq!(terminals.len(), 1, "transition graph has a unique terminal SCC");
    let items = comps[terminals[0]]
        .iter()
        .map(|&idx| decode(&verts, &radices, n, idx, g))
        .collect();
    Ok(EnumerationResult { items })
}

/// The superstable configurations, by exhaustive cluster search straight
/// from the definition.
pub fn superstable_set_oracle(g: &Digraph) -> Result<EnumerationResult<ChipConfig>, OracleError> {
    let s = g.sink().ok_or(OracleError::NoGlobalSink)?;
    let non_sink: Vec<Vertex> = (0..g.vertex_count()).filter(|&v| v != s).collect();
    if non_sink.len() > 12 {
        return Err(OracleError::SizeGuard(format!(
            "{} non-sink vertices > 12",
            non_sink.len()
        )));
    }
    let (verts, radices, total) = stable_config_space(g)?;
    let n = g.vertex_count();
    let mut items = Vec::new();
    'config: for idx in 0..total {
        let sigma = decode(&verts, &radices, n, idx, g);
        for mask in 1u32..(1 << non_sink.len()) {
            if cluster_fire_allowed(g, &sigma, &non_sink, mask) {
                continue 'config;
            }
        }
        items.push(sigma);
    }
    Ok(EnumerationResult { items })
}

fn cluster_fire_allowed(g: &Digraph, sigma: &ChipConfig, non_sink: &[Vertex], mask: u32) -> bool {
    let in_cluster = |v: Vertex| {
        non_sink
            .iter()
            .position(|&u| u == v)
            .map(|i| mask & (1 << i) != 0)
            .unwrap_or(false)
    };
    for (i, &v) in non_sink.iter().enumerate() {
        if mask & (1 << i) == 0 {
            continue;
        }
        // sigma(v) - d_v + (edges into v from inside the cluster) >= 0
        let mut delta = sigma.get(v) as i64 - g.outdeg(v) as i64;
        for &u in g.in_sources(v) {
            if in_cluster(u) {
                delta += 1;
            }
        }
        if delta < 0 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, two_vertex_triangle, Family};

    #[test]
    fn trees_of_zero_figure() {
        let g = two_vertex_triangle();
        let trees = enumerate_spanning_trees(&g, 2).unwrap();
        assert_eq!(trees.count(), 3);
    }

    #[test]
    fn trees_of_directed_cycle() {
        let g = Digraph::new(3, &[(0, 1), (1, 2), (2, 0)], None).unwrap();
        for root in 0..3 {
            assert_eq!(enumerate_spanning_trees(&g, root).unwrap().count(), 1);
        }
    }

    #[test]
    fn trees_of_bidirected_k3() {
        let g = generate(&Family::Bidirected(vec![(0, 1), (1, 2), (2, 0)]));
        for root in 0..3 {
            assert_eq!(enumerate_spanning_trees(&g, root).unwrap().count(), 3);
        }
    }

    #[test]
    fn trees_guard() {
        let g = generate(&Family::GridWired(4)); // 17 vertices
        assert!(matches!(
            enumerate_spanning_trees(&g, 16),
            Err(OracleError::SizeGuard(_))
        ));
    }

    #[test]
    fn tours_of_directed_cycle() {
        let g = Digraph::new(3, &[(0, 1), (1, 2), (2, 0)], None).unwrap();
        assert_eq!(enumerate_eulerian_tours(&g, 0).unwrap().count(), 1);
    }

    #[test]
    fn tours_of_bidirected_k3() {
        let g = generate(&Family::Bidirected(vec![(0, 1), (1, 2), (2, 0)]));
        // T(G, w) * prod (d_v - 1)! = 3 * 1
        let tours = enumerate_eulerian_tours(&g, 0).unwrap();
        assert_eq!(tours.count(), 3);
        for t in &tours.items {
            assert_eq!(t.len(), g.edge_count());
            let mut seen = vec![false; g.edge_count()];
            for &e in t {
                assert!(!seen[e]);
                seen[e] = true;
            }
        }
    }

    #[test]
    fn tours_reject_non_eulerian() {
        let g = generate(&Family::PathBidirected(3));
        assert!(matches!(
            enumerate_eulerian_tours(&g, 0),
            Err(OracleError::NotEulerian)
        ));
    }

    #[test]
    fn recurrent_set_zero_figure() {
        let g = two_vertex_triangle();
        let rec = recurrent_set_oracle(&g).unwrap();
        let mut got: Vec<Vec<u64>> = rec.items.iter().map(|c| c.to_counts()).collect();
        got.sort();
        assert_eq!(got, vec![vec![0, 1, 0], vec![1, 0, 0], vec![1, 1, 0]]);
    }

    #[test]
    fn recurrent_set_single_vertex_chain() {
        let g = Digraph::new(2, &[(0, 1), (0, 1), (0, 1)], Some(1)).unwrap();
        let rec = recurrent_set_oracle(&g).unwrap();
        assert_eq!(rec.count(), 3); // all stable configs 0,1,2
    }

    #[test]
    fn superstable_set_zero_figure() {
        let g = two_vertex_triangle();
        let sup = superstable_set_oracle(&g).unwrap();
        let mut got: Vec<Vec<u64>> = sup.items.iter().map(|c| c.to_counts()).collect();
        got.sort();
        assert_eq!(got, vec![vec![0, 0, 0], vec![0, 1, 0], vec![1, 0, 0]]);
    }
}

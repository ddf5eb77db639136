//! Deterministic random and exhaustive instance generation for the
//! property suites. Everything is seeded; reruns see the same instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Digraph, Vertex};
use crate::rotor::RotorConfig;
use crate::sandpile::ChipConfig;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random digraph with a global sink: a reachability skeleton (every
/// vertex points somewhere strictly closer to the sink) plus random extra
/// edges, possibly parallel.
pub fn random_digraph_with_sink(rng: &mut ChaCha8Rng, max_n: usize) -> Digraph {
    let n = rng.gen_range(2..=max_n.max(2));
    let sink = n - 1;
    let mut edges = Vec::new();
    for v in 0..sink {
        edges.push((v, rng.gen_range(v + 1..n)));
    }
    let extra = rng.gen_range(0..=2 * n);
    for _ in 0..extra {
        let u = rng.gen_range(0..sink);
        let w = rng.gen_range(0..n);
        edges.push((u, w));
    }
    shuffle(rng, &mut edges);
    Digraph::new(n, &edges, Some(sink)).unwrap()
}

/// Random strongly connected digraph: a Hamiltonian cycle plus extras.
pub fn random_strongly_connected(rng: &mut ChaCha8Rng, max_n: usize) -> Digraph {
    let n = rng.gen_range(2..=max_n.max(2));
    let mut edges: Vec<(Vertex, Vertex)> = (0..n).map(|v| (v, (v + 1) % n)).collect();
    let extra = rng.gen_range(0..=n);
    for _ in 0..extra {
        let u = rng.gen_range(0..n);
        let w = rng.gen_range(0..n);
        edges.push((u, w));
    }
    shuffle(rng, &mut edges);
    Digraph::new(n, &edges, None).unwrap()
}

/// Random Eulerian digraph: a union of directed cycles, the first of
/// which passes through every vertex.
pub fn random_eulerian(rng: &mut ChaCha8Rng, max_n: usize, max_edges: usize) -> Digraph {
    let n = rng.gen_range(2..=max_n.max(2));
    let mut order: Vec<Vertex> = (0..n).collect();
    shuffle(rng, &mut order);
    let mut edges: Vec<(Vertex, Vertex)> = (0..n)
        .map(|i| (order[i], order[(i + 1) % n]))
        .collect();
    while edges.len() < max_edges && rng.gen_bool(0.6) {
        let len = rng.gen_range(2..=n.min(4));
        let mut cyc: Vec<Vertex> = Vec::new();
        while cyc.len() < len {
            let v = rng.gen_range(0..n);
            if !cyc.contains(&v) {
                cyc.push(v);
            }
        }
        if edges.len() + len > max_edges {
            break;
        }
        for i in 0..len {
            edges.push((cyc[i], cyc[(i + 1) % len]));
        }
    }
    shuffle(rng, &mut edges);
    Digraph::new(n, &edges, None).unwrap()
}

/// Random Eulerian digraph with sink: delete the out-edges of one vertex.
pub fn random_eulerian_with_sink(rng: &mut ChaCha8Rng, max_n: usize, max_edges: usize) -> Digraph {
    let g = random_eulerian(rng, max_n, max_edges);
    let s = rng.gen_range(0..g.vertex_count());
    g.with_sink_at(s).unwrap()
}

/// Random bidirected graph with sink: a random connected undirected graph
/// doubled, sink out-edges deleted.
pub fn random_bidirected_with_sink(rng: &mut ChaCha8Rng, max_n: usize) -> Digraph {
    let n = rng.gen_range(2..=max_n.max(2));
    let mut und: Vec<(usize, usize)> = Vec::new();
    for v in 1..n {
        und.push((rng.gen_range(0..v), v)); // random spanning tree
    }
    let extra = rng.gen_range(0..=n);
    for _ in 0..extra {
        let u = rng.gen_range(0..n);
        let w = rng.gen_range(0..n);
        if u != w {
            und.push((u.min(w), u.max(w)));
        }
    }
    let mut edges = Vec::new();
    for &(u, w) in &und {
        edges.push((u, w));
        edges.push((w, u));
    }
    shuffle(rng, &mut edges);
    let g = Digraph::new(n, &edges, None).unwrap();
    let s = rng.gen_range(0..n);
    g.with_sink_at(s).unwrap()
}

/// Random multidigraph without any structure guarantees; used for
/// matrix-tree cross-checks with an arbitrary root.
pub fn random_multidigraph(rng: &mut ChaCha8Rng, max_n: usize) -> Digraph {
    let n = rng.gen_range(2..=max_n.max(2));
    let m = rng.gen_range(0..=3 * n);
    let edges: Vec<(Vertex, Vertex)> = (0..m)
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
        .collect();
    Digraph::new(n, &edges, None).unwrap()
}

/// Random chip configuration with at most `max_per_vertex` chips per
/// non-sink vertex.
pub fn random_config(rng: &mut ChaCha8Rng, g: &Digraph, max_per_vertex: u64) -> ChipConfig {
    let counts = (0..g.vertex_count())
        .map(|v| {
            if Some(v) == g.sink() {
                0
            } else {
                rng.gen_range(0..=max_per_vertex)
            }
        })
        .collect();
    ChipConfig::from_counts(g, counts).unwrap()
}

/// Random stable configuration.
pub fn random_stable_config(rng: &mut ChaCha8Rng, g: &Digraph) -> ChipConfig {
    let counts = (0..g.vertex_count())
        .map(|v| {
            let d = g.outdeg(v) as u64;
            if Some(v) == g.sink() || d == 0 {
                0
            } else {
                rng.gen_range(0..d)
            }
        })
        .collect();
    ChipConfig::from_counts(g, counts).unwrap()
}

/// Random rotor configuration.
pub fn random_rotor(rng: &mut ChaCha8Rng, g: &Digraph) -> RotorConfig {
    let positions = (0..g.vertex_count())
        .map(|v| {
            let d = g.outdeg(v);
            if d == 0 {
                0
            } else {
                rng.gen_range(0..d)
            }
        })
        .collect();
    RotorConfig::from_positions(g, positions).unwrap()
}

fn shuffle<T>(rng: &mut ChaCha8Rng, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}

/// All stable configurations of a graph with a global sink (product of
/// out-degrees many).
pub fn all_stable_configs(g: &Digraph) -> Vec<ChipConfig> {
    let s = g.sink().expect("sink required");
    let verts: Vec<Vertex> = (0..g.vertex_count()).filter(|&v| v != s).collect();
    let mut configs = vec![ChipConfig::zeros(g)];
    for &v in &verts {
        let d = g.outdeg(v) as u64;
        let mut next = Vec::with_capacity(configs.len() * d.max(1) as usize);
        for c in &configs {
            for k in 0..d.max(1) {
                let mut counts = c.to_counts();
                counts[v] = if d == 0 { 0 } else { k };
                next.push(ChipConfig::from_counts(g, counts).unwrap());
            }
        }
        configs = next;
    }
    configs
}

/// Every sink-free multidigraph with at most `max_edges` edges (self-loops
/// allowed), streamed to the callback as (graph, keep-going) pairs.
/// Out-degree sequences are enumerated recursively so that sinkful
/// candidates are pruned early.
pub fn for_each_sink_free_digraph(max_edges: usize, mut f: impl FnMut(&Digraph)) {
    for n in 1..=max_edges {
        let mut targets: Vec<Vec<Vertex>> = vec![Vec::new(); n];
        fill_vertex(n, max_edges, 0, &mut targets, &mut f);
    }
}

fn fill_vertex(
    n: usize,
    max_edges: usize,
    v: Vertex,
    targets: &mut Vec<Vec<Vertex>>,
    f: &mut impl FnMut(&Digraph),
) {
    if v == n {
        let used: usize = targets.iter().map(|t| t.len()).sum();
        if used <= max_edges {
            let mut edges = Vec::with_capacity(used);
            for (u, ts) in targets.iter().enumerate() {
                for &w in ts {
                    edges.push((u, w));
                }
            }
            let g = Digraph::new(n, &edges, None).unwrap();
            f(&g);
        }
        return;
    }
    let used: usize = targets.iter().map(|t| t.len()).sum();
    let remaining_vertices = n - v;
    let budget = max_edges - used;
    if budget < remaining_vertices {
        return; // every remaining vertex still needs an out-edge
    }
    // out-degree of v between 1 and what the budget allows
    let max_d = budget - (remaining_vertices - 1);
    let mut multiset: Vec<Vertex> = Vec::new();
    fill_targets(n, max_d, 0, &mut multiset, &mut |ts| {
        targets[v] = ts.to_vec();
        fill_vertex(n, max_edges, v + 1, targets, f);
        targets[v].clear();
    });
}

/// Nondecreasing target multisets of size 1..=max_d starting from `from`.
fn fill_targets(
    n: usize,
    max_d: usize,
    from: Vertex,
    multiset: &mut Vec<Vertex>,
    f: &mut impl FnMut(&[Vertex]),
) {
    if !multiset.is_empty() {
        f(multiset);
    }
    if multiset.len() == max_d {
        return;
    }
    for w in from..n {
        multiset.push(w);
        fill_targets(n, max_d, w, multiset, f);
        multiset.pop();
    }
}

/// Every Eulerian-with-sink graph with `non_sink` non-sink vertices and
/// out-degrees in `1..=max_deg` (no self-loops): the sink is the last
/// vertex; graphs must have a globally reachable sink and out-degree at
/// least in-degree off the sink.
pub fn for_each_eulerian_with_sink(non_sink: usize, max_deg: usize, mut f: impl FnMut(&Digraph)) {
    let n = non_sink + 1;
    let mut targets: Vec<Vec<Vertex>> = vec![Vec::new(); non_sink];
    fill_eulerian_vertex(n, max_deg, 0, &mut targets, &mut f);
}

fn fill_eulerian_vertex(
    n: usize,
    max_deg: usize,
    v: Vertex,
    targets: &mut Vec<Vec<Vertex>>,
    f: &mut impl FnMut(&Digraph),
) {
    let non_sink = n - 1;
    if v == non_sink {
        let mut indeg = vec![0usize; n];
        let mut edges = Vec::new();
        for (u, ts) in targets.iter().enumerate() {
            for &w in ts {
                indeg[w] += 1;
                edges.push((u, w));
            }
        }
        // Eulerian-with-sink: outdeg >= indeg off the sink
        if (0..non_sink).any(|u| targets[u].len() < indeg[u]) {
            return;
        }
        let g = Digraph::new(n, &edges, Some(non_sink)).unwrap();
        if g.has_global_sink() {
            f(&g);
        }
        return;
    }
    let mut multiset: Vec<Vertex> = Vec::new();
    fill_eulerian_targets(n, v, max_deg, 0, &mut multiset, &mut |ts| {
        targets[v] = ts.to_vec();
        fill_eulerian_vertex(n, max_deg, v + 1, targets, f);
        targets[v].clear();
    });
}

fn fill_eulerian_targets(
    n: usize,
    v: Vertex,
    max_d: usize,
    from: Vertex,
    multiset: &mut Vec<Vertex>,
    f: &mut impl FnMut(&[Vertex]),
) {
    if !multiset.is_empty() {
        f(multiset);
    }
    if multiset.len() == max_d {
        return;
    }
    for w in from..n {
        if w == v {
            continue; // no self-loops in this enumeration
        }
        multiset.push(w);
        fill_eulerian_targets(n, v, max_d, w, multiset, f);
        multiset.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::classify;

    #[test]
    fn generators_have_claimed_structure() {
        let mut r = rng(1);
        for _ in 0..20 {
            assert!(random_digraph_with_sink(&mut r, 6).has_global_sink());
            assert!(classify(&random_strongly_connected(&mut r, 6)).strongly_connected);
            assert!(classify(&random_eulerian(&mut r, 5, 12)).eulerian);
            let ews = random_eulerian_with_sink(&mut r, 5, 12);
            assert!(classify(&ews).eulerian_with_sink);
            let b = random_bidirected_with_sink(&mut r, 6);
            assert!(b.is_bidirected_with_sink());
        }
    }

    #[test]
    fn stable_configs_count_matches_degree_product() {
        let g = crate::graph::two_vertex_triangle();
        assert_eq!(all_stable_configs(&g).len(), 4);
    }

    #[test]
    fn exhaustive_small_digraphs() {
        let mut count = 0usize;
        let mut with_loops = 0usize;
        for_each_sink_free_digraph(3, |g| {
            count += 1;
            assert!(g.is_sink_free());
            if (0..g.vertex_count()).any(|v| g.adjacency_count(v, v) > 0) {
                with_loops += 1;
            }
        });
        assert!(count > 0);
        assert!(with_loops > 0);
    }

    #[test]
    fn exhaustive_eulerian_with_sink_small() {
        let mut count = 0usize;
        for_each_eulerian_with_sink(2, 2, |g| {
            count += 1;
            assert!(classify(g).eulerian_with_sink);
        });
        assert!(count > 0);
    }
}

//! Cluster-firing, superstability, and superstabilization.
//!
//! A cluster fires all of its vertices simultaneously; it is allowed when
//! no vertex goes negative (internal edges refund chips, so a cluster can
//! be allowed even when no single vertex is). Superstable configurations
//! admit no allowed cluster and are dual to the recurrent ones on Eulerian
//! digraphs with sink.

use super::{
    identity, is_recurrent, stabilize, ChipConfig, EngineError, Policy,
};
use crate::graph::{classify, Digraph, Vertex};

const BRUTE_FORCE_LIMIT: usize = 16;

/// Fires every vertex of `A` once, simultaneously.
pub fn cluster_fire(
    g: &Digraph,
    sigma: &ChipConfig,
    cluster: &[Vertex],
) -> Result<ChipConfig, EngineError> {
    g.require_global_sink()?;
    if cluster.is_empty() || cluster.iter().any(|&v| Some(v) == g.sink()) {
        return Err(EngineError::ClusterNotAllowed);
    }
    let deltas = cluster_deltas(g, sigma, cluster);
    let mut counts = vec![0u64; g.vertex_count()];
    for (v, d) in deltas.iter().enumerate() {
        if *d < 0 {
            return Err(EngineError::ClusterNotAllowed);
        }
        counts[v] = *d as u64;
    }
    ChipConfig::from_counts(g, counts)
}

/// Post-firing chip counts as signed values; negative entries mean the
/// cluster is not allowed.
fn cluster_deltas(g: &Digraph, sigma: &ChipConfig, cluster: &[Vertex]) -> Vec<i64> {
    let n = g.vertex_count();
    let mut in_cluster = vec![false; n];
    for &v in cluster {
        in_cluster[v] = true;
    }
    let mut vals: Vec<i64> = (0..n).map(|v| sigma.get(v) as i64).collect();
    for &v in cluster {
        vals[v] -= g.outdeg(v) as i64;
        for &e in g.out_edges(v) {
            let w = g.head(e);
            if Some(w) != g.sink() {
                vals[w] += 1;
            }
        }
    }
    let _ = in_cluster;
    vals
}

fn cluster_allowed(g: &Digraph, sigma: &ChipConfig, cluster: &[Vertex]) -> bool {
    cluster_deltas(g, sigma, cluster).iter().all(|&d| d >= 0)
}

/// All allowed clusters, by subset search over the non-sink vertices.
pub fn allowed_clusters(
    g: &Digraph,
    sigma: &ChipConfig,
) -> Result<Vec<Vec<Vertex>>, EngineError> {
    let s = g.require_global_sink()?;
    let non_sink: Vec<Vertex> = (0..g.vertex_count()).filter(|&v| v != s).collect();
    if non_sink.len() > BRUTE_FORCE_LIMIT {
        return Err(EngineError::TooLargeForBruteForce(non_sink.len()));
    }
    let mut out = Vec::new();
    for mask in 1u32..(1 << non_sink.len()) {
        let cluster: Vec<Vertex> = non_sink
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &v)| v)
            .collect();
        if cluster_allowed(g, sigma, &cluster) {
            out.push(cluster);
        }
    }
    Ok(out)
}

/// Superstability test. On Eulerian digraphs with sink this uses the
/// duality with recurrence; otherwise it falls back to subset search,
/// which is capped at 16 non-sink vertices.
pub fn is_superstable(g: &Digraph, sigma: &ChipConfig) -> Result<bool, EngineError> {
    let s = g.require_global_sink()?;
    if !sigma.is_stable(g) {
        return Ok(false); // some singleton cluster can fire
    }
    if classify(g).eulerian_with_sink {
        let dual = dual_config(g, sigma);
        return is_recurrent(g, &dual);
    }
    let non_sink: Vec<Vertex> = (0..g.vertex_count()).filter(|&v| v != s).collect();
    if non_sink.len() > BRUTE_FORCE_LIMIT {
        return Err(EngineError::TooLargeForBruteForce(non_sink.len()));
    }
    for mask in 1u32..(1 << non_sink.len()) {
        let cluster: Vec<Vertex> = non_sink
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &v)| v)
            .collect();
        if cluster_allowed(g, sigma, &cluster) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `delta - 1 - sigma` for stable `sigma`.
fn dual_config(g: &Digraph, sigma: &ChipConfig) -> ChipConfig {
    let counts = (0..g.vertex_count())
        .map(|v| {
            if Some(v) == g.sink() {
                0
            } else {
                g.outdeg(v) as u64 - 1 - sigma.get(v)
            }
        })
        .collect();
    ChipConfig::from_counts(g, counts).unwrap()
}

/// The unique superstable configuration equivalent to `sigma`, via
/// `delta - 1 - (delta - 1 - sigma_stabilized + I) stabilized`.
/// Eulerian digraphs with sink only.
pub fn superstabilize(g: &Digraph, sigma: &ChipConfig) -> Result<ChipConfig, EngineError> {
    g.require_global_sink()?;
    if !classify(g).eulerian_with_sink {
        return Err(EngineError::RequiresEulerianSink);
    }
    let (stab, _) = stabilize(g, sigma, Policy::Bulk, None)?;
    let ident = identity(g)?;
    let mut mid = dual_config(g, &stab);
    for v in 0..g.vertex_count() {
        if Some(v) != g.sink() {
            mid.add_at(v, ident.get(v));
        }
    }
    let (mid_stab, _) = stabilize(g, &mid, Policy::Bulk, None)?;
    Ok(dual_config(g, &mid_stab))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::two_vertex_triangle;

    fn cfg(g: &Digraph, v: &[u64]) -> ChipConfig {
        ChipConfig::from_non_sink(g, v).unwrap()
    }

    #[test]
    fn superstable_set_zero_figure() {
        let g = two_vertex_triangle();
        let expect = [(0, 0, true), (0, 1, true), (1, 0, true), (1, 1, false)];
        for (a, b, want) in expect {
            assert_eq!(is_superstable(&g, &cfg(&g, &[a, b])).unwrap(), want);
        }
    }

    #[test]
    fn all_zero_is_superstable() {
        for f in [
            crate::graph::Family::GridWired(2),
            crate::graph::Family::DirectedTorus(2),
            crate::graph::Family::CompleteWithSink(4),
        ] {
            let g = crate::graph::generate(&f);
            assert!(is_superstable(&g, &ChipConfig::zeros(&g)).unwrap());
        }
    }

    #[test]
    fn superstabilize_zero_figure() {
        let g = two_vertex_triangle();
        assert_eq!(superstabilize(&g, &cfg(&g, &[2, 2])).unwrap(), cfg(&g, &[0, 0]));
    }

    #[test]
    fn cluster_fire_pair() {
        // Firing both non-sink vertices of the zero-figure graph from (1,1):
        // each loses 2, each regains 1 from the other.
        let g = two_vertex_triangle();
        let fired = cluster_fire(&g, &cfg(&g, &[1, 1]), &[0, 1]).unwrap();
        assert_eq!(fired, cfg(&g, &[0, 0]));
        assert!(matches!(
            cluster_fire(&g, &cfg(&g, &[0, 0]), &[0, 1]),
            Err(EngineError::ClusterNotAllowed)
        ));
    }

    #[test]
    fn cluster_allowed_without_singletons() {
        // (1,1) is stable (no singleton fires) yet the pair cluster fires.
        let g = two_vertex_triangle();
        let clusters = allowed_clusters(&g, &cfg(&g, &[1, 1])).unwrap();
        assert_eq!(clusters, vec![vec![0, 1]]);
    }
}

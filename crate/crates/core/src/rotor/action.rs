//! The sandpile-group action on acyclic rotor configurations (oriented
//! spanning trees rooted at the sink): evaluation, the inverse solve, and
//! the induced bijection with recurrent chip configurations.

use super::{chip_add_rotor, is_acyclic_rotor, RotorConfig, RotorError};
use crate::graph::{Digraph, Vertex};
use crate::sandpile::{
    inverse, recurrent_representative, recurrent_set, stabilize, ChipConfig, Policy, SignedConfig,
};

/// Applies a chip configuration to a rotor configuration: add `sigma(v)`
/// chips at each `v` and route them all to the sink. The routing order is
/// immaterial; the chips are routed from the stabilization of `sigma`,
/// which reaches the same configuration with fewer walks.
pub fn action(
    g: &Digraph,
    sigma: &ChipConfig,
    rho: &RotorConfig,
) -> Result<RotorConfig, RotorError> {
    g.require_global_sink()?;
    let (stab, _) = stabilize(g, sigma, Policy::Bulk, None)?;
    let mut cur = rho.clone();
    for v in 0..g.vertex_count() {
        for _ in 0..stab.get(v) {
            cur = chip_add_rotor(g, &cur, v)?.0;
        }
    }
    Ok(cur)
}

/// Finds the unique recurrent chip configuration carrying the acyclic
/// rotor configuration `rho` to `rho_target`.
///
/// Construction: let `alpha(v)` count the cyclic positions from `rho(v)`
/// to `rho_target(v)`. Routing each of those chips one step turns `rho`
/// into `rho_target` and leaves a chip remainder `beta`; the answer is the
/// recurrent representative of `alpha + inverse((beta + I) stabilized)`.
pub fn tree_action_solve(
    g: &Digraph,
    rho: &RotorConfig,
    rho_target: &RotorConfig,
) -> Result<ChipConfig, RotorError> {
    g.require_global_sink()?;
    if !is_acyclic_rotor(g, rho) || !is_acyclic_rotor(g, rho_target) {
        return Err(RotorError::NotAcyclic);
    }
    let n = g.vertex_count();
    let mut alpha = vec![0u64; n];
    let mut beta = vec![0u64; n];
    for v in 0..n {
        let d = g.outdeg(v);
        if d == 0 {
            continue;
        }
        let steps = (rho_target.position(v) + d - rho.position(v)) % d;
        alpha[v] = steps as u64;
        for i in 1..=steps {
            let e = g.out_edges(v)[(rho.position(v) + i) % d];
            let w = g.head(e);
            if Some(w) != g.sink() {
                beta[w] += 1;
            }
        }
    }
    let alpha_cfg = ChipConfig::from_counts(g, alpha.clone())?;
    let beta_cfg = ChipConfig::from_counts(g, beta)?;
    let ident = crate::sandpile::identity(g)?;
    let beta_rec = stabilize(g, &crate::sandpile::add_configs(&beta_cfg, &ident), Policy::Bulk, None)?.0;
    let gamma = inverse(g, &beta_rec)?;
    let combined = SignedConfig::new(
        (0..n)
            .map(|v| alpha_cfg.get(v) as i64 + gamma.get(v) as i64)
            .collect(),
    );
    let sigma = recurrent_representative(g, &combined)?;
    Ok(sigma)
}

/// The bijection between recurrent chip configurations and acyclic rotor
/// configurations induced by a base tree: `sigma` maps to `sigma(rho)`.
pub fn tree_bijection(
    g: &Digraph,
    base: &RotorConfig,
) -> Result<Vec<(ChipConfig, RotorConfig)>, RotorError> {
    if !is_acyclic_rotor(g, base) {
        return Err(RotorError::NotAcyclic);
    }
    let recurrents = recurrent_set(g)?;
    let mut pairs = Vec::with_capacity(recurrents.len());
    for sigma in recurrents {
        let image = action(g, &sigma, base)?;
        pairs.push((sigma, image));
    }
    Ok(pairs)
}

/// Acyclic rotor configurations, one per oriented spanning tree; small
/// graphs only (oracle size guard applies).
pub fn acyclic_rotor_configs(g: &Digraph, root: Vertex) -> Result<Vec<RotorConfig>, RotorError> {
    let trees = crate::oracle::enumerate_spanning_trees(g, root)
        .map_err(|_| RotorError::Graph(crate::graph::GraphError::NoGlobalSink))?;
    let mut out = Vec::with_capacity(trees.items.len());
    for tree in &trees.items {
        out.push(RotorConfig::from_edges(g, tree)?);
    }
    Ok(out)
}

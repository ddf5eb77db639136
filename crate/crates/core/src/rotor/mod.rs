//! Rotor configurations and the rotor-router operation.
//!
//! The rule is increment-first: a step at vertex `v` replaces `rho(v)` by
//! its cyclic successor and then moves the chip along the new rotor, so
//! `rho(v)` always records the edge the last chip left through. Every
//! bijection below silently breaks if this order is changed.

mod action;
mod checks;

pub use action::{acyclic_rotor_configs, action, tree_action_solve, tree_bijection};
pub use checks::{
    cycle_reversal_check, hitting_bound_check, noncommutativity_demo, run_to_sink_commutes,
    CycleReversalReport, HittingBoundReport, NoncommuteReport,
};

use thiserror::Error;

use crate::graph::{classify, Digraph, EdgeId, GraphError, Vertex};

#[derive(Debug, Error)]
pub enum RotorError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("chip is at a sink (absorbing state)")]
    AbsorbingState,
    #[error("graph is not sink-free")]
    NotSinkFree,
    #[error("state is not a unicycle")]
    NotUnicycle,
    #[error("rotor configuration is not acyclic")]
    NotAcyclic,
    #[error("orbit cap of {0} steps exceeded; start state is not recurrent")]
    OrbitCapExceeded(u64),
    #[error("rotor walk exceeded the internal step bound")]
    WalkBoundExceeded,
    #[error("rotor position {0} out of range for vertex {1}")]
    PositionOutOfRange(usize, Vertex),
    #[error("vertex sets must satisfy Y subset of Z, reachable from everywhere")]
    BadVertexSets,
    #[error("no reverse edge for cycle reversal at vertex {0}")]
    MissingReverseEdge(Vertex),
    #[error(transparent)]
    Engine(#[from] crate::sandpile::EngineError),
}

/// One out-edge per vertex of positive out-degree, stored as the position
/// of the current rotor within the vertex's cyclic out-edge order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RotorConfig {
    positions: Vec<usize>,
}

impl RotorConfig {
    /// Every rotor on the first out-edge.
    pub fn initial(g: &Digraph) -> Self {
        RotorConfig {
            positions: vec![0; g.vertex_count()],
        }
    }

    pub fn from_positions(g: &Digraph, positions: Vec<usize>) -> Result<Self, RotorError> {
        if positions.len() != g.vertex_count() {
            return Err(RotorError::PositionOutOfRange(positions.len(), 0));
        }
        for (v, &p) in positions.iter().enumerate() {
            let d = g.outdeg(v);
            if d == 0 {
                if p != 0 {
                    return Err(RotorError::PositionOutOfRange(p, v));
                }
            } else if p >= d {
                return Err(RotorError::PositionOutOfRange(p, v));
            }
        }
        Ok(RotorConfig { positions })
    }

    /// Rotor built from explicit edge choices (one out-edge per non-sink
    /// vertex).
    pub fn from_edges(g: &Digraph, edges: &[EdgeId]) -> Result<Self, RotorError> {
        let mut positions = vec![0usize; g.vertex_count()];
        for &e in edges {
            let v = g.tail(e);
            positions[v] = g.edge_position(e);
        }
        RotorConfig::from_positions(g, positions)
    }

    pub fn position(&self, v: Vertex) -> usize {
        self.positions[v]
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    /// The rotor edge at `v`, when `v` has out-edges.
    pub fn edge(&self, g: &Digraph, v: Vertex) -> Option<EdgeId> {
        let d = g.outdeg(v);
        if d == 0 {
            None
        } else {
            Some(g.out_edges(v)[self.positions[v]])
        }
    }

    /// The vertex the rotor at `v` points to.
    pub fn target(&self, g: &Digraph, v: Vertex) -> Option<Vertex> {
        self.edge(g, v).map(|e| g.head(e))
    }

    fn advance(&mut self, g: &Digraph, v: Vertex) {
        let d = g.outdeg(v);
        self.positions[v] = (self.positions[v] + 1) % d;
    }

    fn retreat(&mut self, g: &Digraph, v: Vertex) {
        let d = g.outdeg(v);
        self.positions[v] = (self.positions[v] + d - 1) % d;
    }
}

/// A chip location paired with a rotor configuration.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SingleChipState {
    pub chip: Vertex,
    pub rotors: RotorConfig,
}

impl SingleChipState {
    pub fn new(chip: Vertex, rotors: RotorConfig) -> Self {
        SingleChipState { chip, rotors }
    }
}

/// One application of the rotor-router operation: increment the rotor at
/// the chip, then move the chip along it.
pub fn rotor_step(g: &Digraph, state: &SingleChipState) -> Result<SingleChipState, RotorError> {
    let v = state.chip;
    if g.outdeg(v) == 0 {
        return Err(RotorError::AbsorbingState);
    }
    let mut rotors = state.rotors.clone();
    rotors.advance(g, v);
    let chip = g.head(rotors.edge(g, v).unwrap());
    Ok(SingleChipState { chip, rotors })
}

/// Directed cycles of the rotor functional graph (vertices without
/// out-edges are absorbing). Each cycle is listed in rotor order.
pub fn rotor_cycles(g: &Digraph, rotors: &RotorConfig) -> Vec<Vec<Vertex>> {
    let n = g.vertex_count();
    // 0 = unseen, 1 = in progress at this walk, 2 = finished
    let mut color = vec![0u8; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if color[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut v = start;
        loop {
            if color[v] == 1 {
                // found a new cycle; cut it out of the current path
                let pos = path.iter().position(|&u| u == v).unwrap();
                cycles.push(path[pos..].to_vec());
                break;
            }
            if color[v] == 2 {
                break;
            }
            color[v] = 1;
            path.push(v);
            match rotors.target(g, v) {
                Some(w) => v = w,
                None => break,
            }
        }
        for &u in &path {
            color[u] = 2;
        }
    }
    cycles
}

pub fn is_acyclic_rotor(g: &Digraph, rotors: &RotorConfig) -> bool {
    rotor_cycles(g, rotors).is_empty()
}

/// Unicycle certificate: the unique rotor cycle through the chip, if the
/// state is a unicycle. Requires a sink-free graph.
pub fn unicycle_certificate(
    g: &Digraph,
    state: &SingleChipState,
) -> Result<Option<Vec<Vertex>>, RotorError> {
    if !g.is_sink_free() {
        return Err(RotorError::NotSinkFree);
    }
    let cycles = rotor_cycles(g, &state.rotors);
    if cycles.len() != 1 {
        return Ok(None);
    }
    let cycle = &cycles[0];
    if !cycle.contains(&state.chip) {
        return Ok(None);
    }
    // rotate so the chip comes first
    let pos = cycle.iter().position(|&v| v == state.chip).unwrap();
    let mut rotated = cycle[pos..].to_vec();
    rotated.extend_from_slice(&cycle[..pos]);
    Ok(Some(rotated))
}

pub fn is_unicycle(g: &Digraph, state: &SingleChipState) -> Result<bool, RotorError> {
    Ok(unicycle_certificate(g, state)?.is_some())
}

/// Inverse of the rotor-router operation on unicycles: the chip moves to
/// its cycle predecessor, whose rotor retreats one position.
pub fn rotor_step_inverse(
    g: &Digraph,
    state: &SingleChipState,
) -> Result<SingleChipState, RotorError> {
    let cycle = unicycle_certificate(g, state)?.ok_or(RotorError::NotUnicycle)?;
    let prev = *cycle.last().unwrap(); // cycle starts at the chip
    let mut rotors = state.rotors.clone();
    rotors.retreat(g, prev);
    Ok(SingleChipState { chip: prev, rotors })
}

/// States visited from `start` until the first return, `start` included.
/// Errs after `4 |E| n` steps, which only a non-recurrent start exceeds.
pub fn unicycle_orbit(
    g: &Digraph,
    start: &SingleChipState,
) -> Result<Vec<SingleChipState>, RotorError> {
    if !g.is_sink_free() {
        return Err(RotorError::NotSinkFree);
    }
    let cap = 4 * (g.edge_count() as u64) * (g.vertex_count() as u64) + 4;
    let mut orbit = vec![start.clone()];
    let mut cur = start.clone();
    for _ in 0..cap {
        cur = rotor_step(g, &cur)?;
        if cur == *start {
            return Ok(orbit);
        }
        orbit.push(cur.clone());
    }
    Err(RotorError::OrbitCapExceeded(cap))
}

pub(crate) fn walk_bound(g: &Digraph) -> u64 {
    64 * (g.edge_count() as u64 + 1) * (g.vertex_count() as u64 + 1) + 1024
}

/// The chip addition operator `E_v` with its walk trace: add a chip at
/// `v`, route it until it reaches the sink, return the new rotors and the
/// vertex path.
pub fn chip_add_rotor(
    g: &Digraph,
    rotors: &RotorConfig,
    v: Vertex,
) -> Result<(RotorConfig, Vec<Vertex>), RotorError> {
    let sink = g.require_global_sink()?;
    let mut state = SingleChipState::new(v, rotors.clone());
    let mut trace = vec![v];
    let bound = walk_bound(g);
    let mut steps = 0u64;
    while state.chip != sink {
        state = rotor_step(g, &state)?;
        trace.push(state.chip);
        steps += 1;
        if steps > bound {
            // would contradict global reachability of the sink
            return Err(RotorError::WalkBoundExceeded);
        }
    }
    Ok((state.rotors, trace))
}

/// Eulerian tour by rotor walk: starting from a unicycle whose rotor at
/// `tail(e)` is the cyclic predecessor of `e`, the chip traverses every
/// edge exactly once, beginning with `e`.
pub fn eulerian_tour(
    g: &Digraph,
    state: &SingleChipState,
    e: EdgeId,
) -> Result<Vec<EdgeId>, RotorError> {
    if !classify(g).eulerian {
        return Err(RotorError::Graph(GraphError::NotEulerian));
    }
    let w = g.tail(e);
    if state.chip != w
        || state.rotors.edge(g, w) != Some(g.prev_edge(e))
        || unicycle_certificate(g, state)?.is_none()
    {
        return Err(RotorError::NotUnicycle);
    }
    let mut tour = Vec::with_capacity(g.edge_count());
    let mut cur = state.clone();
    for _ in 0..g.edge_count() {
        let at = cur.chip;
        cur = rotor_step(g, &cur)?;
        tour.push(cur.rotors.edge(g, at).unwrap());
    }
    debug_assert_eq!(tour[0], e);
    debug_assert_eq!(cur, *state);
    Ok(tour)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, grid_bidirected, two_vertex_triangle, Family};

    fn directed_cycle(n: usize) -> Digraph {
        let edges: Vec<(usize, usize)> = (0..n).map(|v| (v, (v + 1) % n)).collect();
        Digraph::new(n, &edges, None).unwrap()
    }

    #[test]
    fn step_on_directed_cycle() {
        let g = directed_cycle(3);
        let s = SingleChipState::new(0, RotorConfig::initial(&g));
        let s2 = rotor_step(&g, &s).unwrap();
        assert_eq!(s2.chip, 1);
        assert_eq!(s2.rotors, s.rotors); // degree-1 rotors never change
    }

    #[test]
    fn step_at_sink_errors() {
        let g = two_vertex_triangle();
        let s = SingleChipState::new(2, RotorConfig::initial(&g));
        assert!(matches!(rotor_step(&g, &s), Err(RotorError::AbsorbingState)));
    }

    #[test]
    fn unicycle_on_directed_cycle() {
        let g = directed_cycle(3);
        for chip in 0..3 {
            let s = SingleChipState::new(chip, RotorConfig::initial(&g));
            let cert = unicycle_certificate(&g, &s).unwrap().unwrap();
            assert_eq!(cert.len(), 3);
            assert_eq!(cert[0], chip);
        }
    }

    #[test]
    fn two_disjoint_cycles_are_not_unicycles() {
        // two 2-cycles
        let g = Digraph::new(4, &[(0, 1), (1, 0), (2, 3), (3, 2)], None).unwrap();
        let s = SingleChipState::new(0, RotorConfig::initial(&g));
        assert!(!is_unicycle(&g, &s).unwrap());
        assert_eq!(rotor_cycles(&g, &s.rotors).len(), 2);
    }

    #[test]
    fn chip_off_cycle_is_not_unicycle() {
        // 0 -> 1 <-> 2: rotor cycle {1,2}, chip at 0
        let g = Digraph::new(3, &[(0, 1), (1, 2), (2, 1)], None).unwrap();
        let s = SingleChipState::new(0, RotorConfig::initial(&g));
        assert!(!is_unicycle(&g, &s).unwrap());
        let on = SingleChipState::new(1, RotorConfig::initial(&g));
        assert!(is_unicycle(&g, &on).unwrap());
    }

    #[test]
    fn inverse_round_trip() {
        let g = grid_bidirected(2, 2);
        // find some unicycle by walking an arbitrary state into its orbit
        let mut s = SingleChipState::new(0, RotorConfig::initial(&g));
        for _ in 0..20 {
            s = rotor_step(&g, &s).unwrap();
        }
        assert!(is_unicycle(&g, &s).unwrap());
        let back = rotor_step_inverse(&g, &s).unwrap();
        assert!(is_unicycle(&g, &back).unwrap());
        assert_eq!(rotor_step(&g, &back).unwrap(), s);
        let fwd = rotor_step(&g, &s).unwrap();
        assert_eq!(rotor_step_inverse(&g, &fwd).unwrap(), s);
    }

    #[test]
    fn inverse_on_directed_cycle_moves_back() {
        let g = directed_cycle(3);
        let s = SingleChipState::new(1, RotorConfig::initial(&g));
        let back = rotor_step_inverse(&g, &s).unwrap();
        assert_eq!(back.chip, 0);
    }

    #[test]
    fn orbit_lengths() {
        let g = directed_cycle(3);
        let s = SingleChipState::new(0, RotorConfig::initial(&g));
        assert_eq!(unicycle_orbit(&g, &s).unwrap().len(), 3);

        let k2 = generate(&Family::Bidirected(vec![(0, 1)]));
        let s = SingleChipState::new(0, RotorConfig::initial(&k2));
        assert_eq!(unicycle_orbit(&k2, &s).unwrap().len(), 2);
    }

    #[test]
    fn orbit_length_34_on_3x4_grid() {
        let g = grid_bidirected(3, 4);
        let mut s = SingleChipState::new(0, RotorConfig::initial(&g));
        // settle into the recurrent orbit first
        for _ in 0..100 {
            s = rotor_step(&g, &s).unwrap();
        }
        assert!(is_unicycle(&g, &s).unwrap());
        let orbit = unicycle_orbit(&g, &s).unwrap();
        assert_eq!(orbit.len(), 34);
        for state in &orbit {
            assert!(is_unicycle(&g, state).unwrap());
        }
    }

    #[test]
    fn chip_add_rotor_path_graph() {
        // single edge v -> s: E_v is the identity on the unique rotor config
        let g = Digraph::new(2, &[(0, 1)], Some(1)).unwrap();
        let rho = RotorConfig::initial(&g);
        let (rho2, trace) = chip_add_rotor(&g, &rho, 0).unwrap();
        assert_eq!(rho2, rho);
        assert_eq!(trace, vec![0, 1]);
    }

    #[test]
    fn chip_add_rotor_commutes() {
        let g = generate(&Family::GridWired(2));
        let rho = RotorConfig::initial(&g);
        let (a, _) = chip_add_rotor(&g, &rho, 0).unwrap();
        let (ab, _) = chip_add_rotor(&g, &a, 3).unwrap();
        let (b, _) = chip_add_rotor(&g, &rho, 3).unwrap();
        let (ba, _) = chip_add_rotor(&g, &b, 0).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn eulerian_tour_unique_on_directed_cycle() {
        let g = directed_cycle(3);
        let s = SingleChipState::new(0, RotorConfig::initial(&g));
        let tour = eulerian_tour(&g, &s, 0).unwrap();
        assert_eq!(tour, vec![0, 1, 2]);
    }

    #[test]
    fn eulerian_tour_grid_3x4() {
        let g = grid_bidirected(3, 4);
        let mut s = SingleChipState::new(0, RotorConfig::initial(&g));
        for _ in 0..100 {
            s = rotor_step(&g, &s).unwrap();
        }
        // starting edge: successor of the current rotor at the chip
        let e = g.next_edge(s.rotors.edge(&g, s.chip).unwrap());
        let tour = eulerian_tour(&g, &s, e).unwrap();
        assert_eq!(tour.len(), 34);
        let mut seen = vec![false; g.edge_count()];
        for &edge in &tour {
            assert!(!seen[edge], "edge repeated in tour");
            seen[edge] = true;
        }
    }

    #[test]
    fn eulerian_tour_rejects_non_eulerian() {
        let g = two_vertex_triangle();
        let s = SingleChipState::new(0, RotorConfig::initial(&g));
        assert!(eulerian_tour(&g, &s, 0).is_err());
    }
}

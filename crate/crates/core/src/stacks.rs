//! Bi-infinite rotor stacks and cycle-popping.
//!
//! Stacks are restricted to periodic representations: a base sequence of
//! out-edges per vertex plus an integer offset, with every out-edge
//! occurring in the base. That makes every configuration infinitive, which
//! is what guarantees the walk reaches the sink and cycle-popping
//! terminates. The stack element `rho_0` is the current rotor; popping a
//! stack shifts it one step forward, a walk step pops and then moves the
//! chip along the new `rho_0`.

use thiserror::Error;

use crate::graph::{Digraph, EdgeId, GraphError, Vertex};
use crate::rotor::RotorConfig;

#[derive(Debug, Error)]
pub enum StackError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("stack at vertex {0} does not contain every out-edge")]
    NotInfinitive(Vertex),
    #[error("rho_0 is not acyclic")]
    CyclicRotor,
    #[error("cycle-popping exceeded the internal iteration cap")]
    PopCapExceeded,
    #[error("stack walk exceeded the internal step bound")]
    WalkBoundExceeded,
    #[error("invalid stack for vertex {0}")]
    BadStack(Vertex),
}

/// Periodic stack configuration: `rho_k(v) = base(v)[(offset(v) + k) mod
/// len(base(v))]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StackConfig {
    bases: Vec<Vec<EdgeId>>,
    offsets: Vec<i64>,
}

impl StackConfig {
    /// Period-`d_v` stacks listing each vertex's out-edges in rotor order,
    /// aligned so that `rho_0` matches the given rotor configuration.
    pub fn from_rotor(g: &Digraph, rho: &RotorConfig) -> Self {
        let bases: Vec<Vec<EdgeId>> = (0..g.vertex_count())
            .map(|v| g.out_edges(v).to_vec())
            .collect();
        let offsets = (0..g.vertex_count())
            .map(|v| rho.position(v) as i64)
            .collect();
        StackConfig { bases, offsets }
    }

    pub fn new(
        g: &Digraph,
        bases: Vec<Vec<EdgeId>>,
        offsets: Vec<i64>,
    ) -> Result<Self, StackError> {
        if bases.len() != g.vertex_count() || offsets.len() != g.vertex_count() {
            return Err(StackError::BadStack(bases.len()));
        }
        for v in 0..g.vertex_count() {
            for &e in &bases[v] {
                if e >= g.edge_count() || g.tail(e) != v {
                    return Err(StackError::BadStack(v));
                }
            }
            // infinitive: every out-edge occurs in the base
            for &e in g.out_edges(v) {
                if !bases[v].contains(&e) {
                    return Err(StackError::NotInfinitive(v));
                }
            }
        }
        Ok(StackConfig { bases, offsets })
    }

    pub fn base(&self, v: Vertex) -> &[EdgeId] {
        &self.bases[v]
    }

    pub fn offset(&self, v: Vertex) -> i64 {
        self.offsets[v]
    }

    /// The stack element `rho_k(v)`.
    pub fn element(&self, v: Vertex, k: i64) -> Option<EdgeId> {
        let len = self.bases[v].len() as i64;
        if len == 0 {
            return None;
        }
        let idx = (self.offsets[v] + k).rem_euclid(len) as usize;
        Some(self.bases[v][idx])
    }

    pub fn rho0(&self, v: Vertex) -> Option<EdgeId> {
        self.element(v, 0)
    }

    /// The rotor configuration defined by the `rho_0` elements.
    pub fn rho0_rotor(&self, g: &Digraph) -> RotorConfig {
        let positions = (0..g.vertex_count())
            .map(|v| match self.rho0(v) {
                Some(e) => g.edge_position(e),
                None => 0,
            })
            .collect();
        RotorConfig::from_positions(g, positions).expect("rho_0 is a rotor configuration")
    }

    fn shift(&mut self, v: Vertex, by: i64) {
        self.offsets[v] += by;
    }
}

/// Pop: shift the stack at `v` one step forward.
pub fn pop(rho: &StackConfig, v: Vertex) -> StackConfig {
    let mut out = rho.clone();
    out.shift(v, 1);
    out
}

/// Reverse pop: shift the stack at `v` one step backward.
pub fn reverse_pop(rho: &StackConfig, v: Vertex) -> StackConfig {
    let mut out = rho.clone();
    out.shift(v, -1);
    out
}

/// Reverse-pops every vertex of `cycle` when `cycle` is a directed cycle
/// in `rho_0`; otherwise returns the configuration unchanged.
pub fn cycle_pop(g: &Digraph, rho: &StackConfig, cycle: &[Vertex]) -> StackConfig {
    if !is_rho0_cycle(g, rho, cycle) {
        return rho.clone();
    }
    let mut out = rho.clone();
    for &v in cycle {
        out.shift(v, -1);
    }
    out
}

fn is_rho0_cycle(g: &Digraph, rho: &StackConfig, cycle: &[Vertex]) -> bool {
    if cycle.is_empty() {
        return false;
    }
    let mut seen = std::collections::HashSet::new();
    for (i, &v) in cycle.iter().enumerate() {
        if !seen.insert(v) {
            return false;
        }
        let next = cycle[(i + 1) % cycle.len()];
        match rho.rho0(v) {
            Some(e) => {
                if g.head(e) != next {
                    return false;
                }
            }
            None => return false,
        }
    }
    true
}

const POP_CAP: u64 = 10_000_000;

/// Pops cycles until `rho_0` is acyclic, returning the normal form and
/// the popped cycles. The cycle found by following `rho_0` from the
/// lowest-indexed vertex is popped each round; the result is
/// selection-independent.
pub fn pop_to_acyclic(
    g: &Digraph,
    rho: &StackConfig,
) -> Result<(StackConfig, Vec<Vec<Vertex>>), StackError> {
    pop_to_acyclic_with(g, rho, |cycles| {
        // lowest-vertex rule: the cycle containing the smallest vertex id
        let mut best = 0;
        let mut best_min = Vertex::MAX;
        for (i, c) in cycles.iter().enumerate() {
            let m = *c.iter().min().unwrap();
            if m < best_min {
                best_min = m;
                best = i;
            }
        }
        best
    })
}

/// Cycle-popping with an explicit cycle selector, used to test that the
/// normal form does not depend on the selection order.
pub fn pop_to_acyclic_with(
    g: &Digraph,
    rho: &StackConfig,
    mut select: impl FnMut(&[Vec<Vertex>]) -> usize,
) -> Result<(StackConfig, Vec<Vec<Vertex>>), StackError> {
    g.require_global_sink()?;
    let mut cur = rho.clone();
    let mut popped = Vec::new();
    for _ in 0..POP_CAP {
        let rotor = cur.rho0_rotor(g);
        let cycles = crate::rotor::rotor_cycles(g, &rotor);
        if cycles.is_empty() {
            return Ok((cur, popped));
        }
        let pick = select(&cycles).min(cycles.len() - 1);
        let cycle = cycles[pick].clone();
        cur = cycle_pop(g, &cur, &cycle);
        popped.push(cycle);
    }
    Err(StackError::PopCapExceeded)
}

/// Chip addition through stacks: add a chip at `v` and walk it to the
/// sink, popping each visited stack. Returns the new configuration and
/// the walk's vertex path.
pub fn stack_chip_add(
    g: &Digraph,
    rho: &StackConfig,
    v: Vertex,
) -> Result<(StackConfig, Vec<Vertex>), StackError> {
    let sink = g.require_global_sink()?;
    let mut cur = rho.clone();
    let mut at = v;
    let mut path = vec![v];
    let mut steps = 0u64;
    let bound = stack_walk_bound(g, rho);
    while at != sink {
        cur.shift(at, 1);
        let e = cur.rho0(at).ok_or(StackError::BadStack(at))?;
        at = g.head(e);
        path.push(at);
        steps += 1;
        if steps > bound {
            return Err(StackError::WalkBoundExceeded);
        }
    }
    Ok((cur, path))
}

fn stack_walk_bound(g: &Digraph, rho: &StackConfig) -> u64 {
    let max_period = rho.bases.iter().map(|b| b.len()).max().unwrap_or(1) as u64;
    64 * max_period * (g.edge_count() as u64 + 1) * (g.vertex_count() as u64 + 1) + 1024
}

/// Constructive inverse of `stack_chip_add` on acyclic configurations:
/// reverse-pop the stacks along the unique `rho_0` path from `v` to the
/// sink, then pop back to acyclic. The resulting configuration's
/// `rho_0`-path from `v` is the loop-erasure of the forward walk.
pub fn stack_chip_add_inverse(
    g: &Digraph,
    rho: &StackConfig,
    v: Vertex,
) -> Result<StackConfig, StackError> {
    let sink = g.require_global_sink()?;
    let rotor = rho.rho0_rotor(g);
    if !crate::rotor::is_acyclic_rotor(g, &rotor) {
        return Err(StackError::CyclicRotor);
    }
    let mut cur = rho.clone();
    let mut at = v;
    while at != sink {
        cur.shift(at, -1);
        at = g.head(rho.rho0(at).ok_or(StackError::BadStack(at))?);
    }
    let (out, _) = pop_to_acyclic(g, &cur)?;
    Ok(out)
}

/// The `rho_0` path from `v` to the sink of an acyclic configuration.
pub fn rho0_path(g: &Digraph, rho: &StackConfig, v: Vertex) -> Result<Vec<Vertex>, StackError> {
    let sink = g.require_global_sink()?;
    let rotor = rho.rho0_rotor(g);
    if !crate::rotor::is_acyclic_rotor(g, &rotor) {
        return Err(StackError::CyclicRotor);
    }
    let mut path = vec![v];
    let mut at = v;
    while at != sink {
        at = g.head(rho.rho0(at).ok_or(StackError::BadStack(at))?);
        path.push(at);
    }
    Ok(path)
}

/// Chronological loop-erasure: each revisit of a vertex erases the loop
/// created since its first visit.
pub fn loop_erase(path: &[Vertex]) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = Vec::new();
    for &v in path {
        if let Some(pos) = out.iter().position(|&u| u == v) {
            out.truncate(pos);
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::two_vertex_triangle;

    #[test]
    fn pop_round_trip() {
        let g = two_vertex_triangle();
        let rho = StackConfig::from_rotor(&g, &RotorConfig::initial(&g));
        assert_eq!(reverse_pop(&pop(&rho, 0), 0), rho);
        assert_eq!(pop(&reverse_pop(&rho, 1), 1), rho);
    }

    #[test]
    fn period_one_stack_pop_is_identity_on_rho0() {
        let g = crate::graph::Digraph::new(2, &[(0, 1)], Some(1)).unwrap();
        let rho = StackConfig::from_rotor(&g, &RotorConfig::initial(&g));
        let popped = pop(&rho, 0);
        assert_eq!(popped.rho0(0), rho.rho0(0));
        assert_ne!(popped.offset(0), rho.offset(0));
    }

    #[test]
    fn period_two_stack_pop_advances() {
        let g = two_vertex_triangle();
        let rho = StackConfig::new(&g, vec![vec![0, 1], vec![2, 3], vec![]], vec![0, 0, 0]).unwrap();
        assert_eq!(rho.rho0(0), Some(0));
        assert_eq!(pop(&rho, 0).rho0(0), Some(1));
    }

    #[test]
    fn non_infinitive_stack_rejected() {
        let g = two_vertex_triangle();
        assert!(matches!(
            StackConfig::new(&g, vec![vec![0], vec![2, 3], vec![]], vec![0, 0, 0]),
            Err(StackError::NotInfinitive(0))
        ));
    }

    #[test]
    fn cycle_pop_no_op_when_not_a_cycle() {
        let g = two_vertex_triangle();
        // rho_0: v0 -> sink, v1 -> sink: no cycle anywhere
        let rho = StackConfig::new(&g, vec![vec![1, 0], vec![3, 2], vec![]], vec![0, 0, 0]).unwrap();
        assert_eq!(cycle_pop(&g, &rho, &[0, 1]), rho);
    }

    #[test]
    fn cycle_pop_decrements_both_offsets() {
        let g = two_vertex_triangle();
        // rho_0: v0 -> v1 (edge 0), v1 -> v0 (edge 2): the 2-cycle
        let rho = StackConfig::from_rotor(&g, &RotorConfig::initial(&g));
        assert_eq!(rho.rho0(0), Some(0));
        assert_eq!(rho.rho0(1), Some(2));
        let out = cycle_pop(&g, &rho, &[0, 1]);
        assert_eq!(out.offset(0), -1);
        assert_eq!(out.offset(1), -1);
    }

    #[test]
    fn pop_to_acyclic_hand_trace() {
        let g = two_vertex_triangle();
        // stacks ordered (other vertex, sink): rho_0 is the mutual 2-cycle,
        // one reverse pop of it points both rotors at the sink.
        let rho = StackConfig::new(&g, vec![vec![0, 1], vec![2, 3], vec![]], vec![0, 0, 0]).unwrap();
        let (out, popped) = pop_to_acyclic(&g, &rho).unwrap();
        assert_eq!(popped, vec![vec![0, 1]]);
        assert_eq!(g.head(out.rho0(0).unwrap()), 2);
        assert_eq!(g.head(out.rho0(1).unwrap()), 2);
    }

    #[test]
    fn pop_to_acyclic_already_acyclic() {
        let g = two_vertex_triangle();
        let rho = StackConfig::new(&g, vec![vec![1, 0], vec![3, 2], vec![]], vec![0, 0, 0]).unwrap();
        let (out, popped) = pop_to_acyclic(&g, &rho).unwrap();
        assert_eq!(out, rho);
        assert!(popped.is_empty());
    }

    #[test]
    fn chip_add_and_inverse_round_trip() {
        let g = two_vertex_triangle();
        let rho = StackConfig::new(&g, vec![vec![1, 0], vec![3, 2], vec![]], vec![0, 0, 0]).unwrap();
        for v in 0..2 {
            let inv = stack_chip_add_inverse(&g, &rho, v).unwrap();
            let (back, _) = stack_chip_add(&g, &inv, v).unwrap();
            assert_eq!(back, rho);
        }
    }

    #[test]
    fn inverse_requires_acyclic() {
        let g = two_vertex_triangle();
        let cyclic = StackConfig::from_rotor(&g, &RotorConfig::initial(&g));
        assert!(matches!(
            stack_chip_add_inverse(&g, &cyclic, 0),
            Err(StackError::CyclicRotor)
        ));
    }

    #[test]
    fn path_graph_inverse_is_reverse_pop() {
        let g = crate::graph::Digraph::new(2, &[(0, 1)], Some(1)).unwrap();
        let rho = StackConfig::from_rotor(&g, &RotorConfig::initial(&g));
        let inv = stack_chip_add_inverse(&g, &rho, 0).unwrap();
        assert_eq!(inv, reverse_pop(&rho, 0));
        let (back, path) = stack_chip_add(&g, &inv, 0).unwrap();
        assert_eq!(back, rho);
        assert_eq!(path, vec![0, 1]);
    }

    #[test]
    fn loop_erasure_cases() {
        assert_eq!(loop_erase(&[0, 1, 2]), vec![0, 1, 2]);
        assert_eq!(loop_erase(&[0, 1, 0, 2]), vec![0, 2]);
        assert_eq!(loop_erase(&[0, 1, 2, 1, 3]), vec![0, 1, 3]);
    }
}

//! Verification-style rotor operations: the Holroyd-Propp hitting bound,
//! clockwise cycle reversal on embedded planar graphs, and the
//! fixed-step non-commutativity exhibit.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{
    rotor_step, unicycle_certificate, walk_bound, RotorConfig, RotorError, SingleChipState,
};
use crate::graph::{Digraph, Family, Vertex};
use crate::intalg::{solve_rational, IntMatrix, Rational};
use crate::sandpile::ChipConfig;

#[derive(Debug, Clone)]
pub struct HittingBoundReport {
    /// Chips stopped in `Y` by the rotor walks.
    pub rotor_hits: u64,
    /// Expected chips stopped in `Y` under the random walk, exact.
    pub expected: Rational,
    pub lhs: Rational,
    pub rhs: Rational,
    pub ok: bool,
}

/// Checks the deviation bound between rotor-router and random-walk hitting
/// counts: `|H_rho(sigma, Y) - H(sigma, Y)| <= sum_e |h(head e) - h(tail e)|`
/// where `h(v)` is the exact probability that a walk from `v` stopped on
/// `Z` stops in `Y`.
pub fn hitting_bound_check(
    g: &Digraph,
    y: &[Vertex],
    z: &[Vertex],
    sigma: &ChipConfig,
    rho: &RotorConfig,
) -> Result<HittingBoundReport, RotorError> {
    let n = g.vertex_count();
    let in_z = mark(n, z);
    let in_y = mark(n, y);
    if y.iter().any(|&v| !in_z[v]) {
        return Err(RotorError::BadVertexSets);
    }
    if !reaches(g, &in_z) {
        return Err(RotorError::BadVertexSets);
    }

    let h = hitting_probabilities(g, &in_y, &in_z)?;

    let expected: Rational = (0..n)
        .map(|v| Rational::from_integer(BigInt::from(sigma.get(v))) * &h[v])
        .sum();

    let rotor_hits = rotor_walk_hits(g, &in_y, &in_z, sigma, rho)?;

    let rhs: Rational = (0..g.edge_count())
        .map(|e| (&h[g.head(e)] - &h[g.tail(e)]).abs())
        .sum();
    let lhs = (Rational::from_integer(BigInt::from(rotor_hits)) - &expected).abs();
    let ok = lhs <= rhs;
    Ok(HittingBoundReport {
        rotor_hits,
        expected,
        lhs,
        rhs,
        ok,
    })
}

fn mark(n: usize, set: &[Vertex]) -> Vec<bool> {
    let mut out = vec![false; n];
    for &v in set {
        out[v] = true;
    }
    out
}

/// Every vertex has a directed path into the marked set.
fn reaches(g: &Digraph, target: &[bool]) -> bool {
    let n = g.vertex_count();
    let mut seen: Vec<bool> = target.to_vec();
    let mut stack: Vec<Vertex> = (0..n).filter(|&v| target[v]).collect();
    while let Some(v) = stack.pop() {
        for &u in g.in_sources(v) {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen.iter().all(|&b| b)
}

/// Exact absorbing-chain solve for `h(v) = P_v(stopped walk ends in Y)`,
/// stepping uniformly over out-edges with multiplicity.
fn hitting_probabilities(
    g: &Digraph,
    in_y: &[bool],
    in_z: &[bool],
) -> Result<Vec<Rational>, RotorError> {
    let n = g.vertex_count();
    let free: Vec<Vertex> = (0..n).filter(|&v| !in_z[v]).collect();
    let index_of: std::collections::HashMap<Vertex, usize> =
        free.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let dim = free.len();
    let mut entries = vec![BigInt::zero(); dim * dim];
    let mut rhs = vec![Rational::zero(); dim];
    for (row, &v) in free.iter().enumerate() {
        entries[row * dim + row] = BigInt::from(g.outdeg(v) as i64);
        for &e in g.out_edges(v) {
            let w = g.head(e);
            if let Some(&col) = index_of.get(&w) {
                entries[row * dim + col] -= 1;
            } else if in_y[w] {
                rhs[row] += Rational::from_integer(BigInt::from(1));
            }
        }
    }
    let m = IntMatrix::new(dim, entries, free.clone());
    let sol = solve_rational(&m, &rhs).map_err(|_| RotorError::BadVertexSets)?;
    let mut h = vec![Rational::zero(); n];
    for v in 0..n {
        if in_z[v] {
            if in_y[v] {
                h[v] = Rational::from_integer(BigInt::from(1));
            }
        } else {
            h[v] = sol[index_of[&v]].clone();
        }
    }
    Ok(h)
}

fn rotor_walk_hits(
    g: &Digraph,
    in_y: &[bool],
    in_z: &[bool],
    sigma: &ChipConfig,
    rho: &RotorConfig,
) -> Result<u64, RotorError> {
    let mut rotors = rho.clone();
    let mut hits = 0u64;
    let bound = walk_bound(g);
    for v in 0..g.vertex_count() {
        for _ in 0..sigma.get(v) {
            let mut at = v;
            let mut steps = 0u64;
            while !in_z[at] {
                rotors.advance(g, at);
                at = g.head(rotors.edge(g, at).unwrap());
                steps += 1;
                if steps > bound {
                    return Err(RotorError::WalkBoundExceeded);
                }
            }
            if in_y[at] {
                hits += 1;
            }
        }
    }
    Ok(hits)
}

#[derive(Debug, Clone)]
pub struct CycleReversalReport {
    /// Steps of the rotor-router operation until the reversed state.
    pub steps: u64,
    /// Every rotor strictly inside the cycle advanced exactly one full
    /// rotation.
    pub internal_full_turn: bool,
    /// Every rotor strictly outside the cycle did not move.
    pub external_untouched: bool,
}

/// Runs a clockwise unicycle on an embedded bidirected planar graph until
/// the cycle reverses to counter-clockwise, and verifies which rotors
/// moved. Out-edge order must be clockwise and the initial cycle clockwise
/// (negative shoelace area, y-axis up).
pub fn cycle_reversal_check(
    g: &Digraph,
    start: &SingleChipState,
) -> Result<CycleReversalReport, RotorError> {
    let n = g.vertex_count();
    if (0..n).any(|v| g.coord(v).is_none()) {
        return Err(RotorError::Graph(crate::graph::GraphError::NotBidirected));
    }
    let cycle = unicycle_certificate(g, start)?.ok_or(RotorError::NotUnicycle)?;
    let poly: Vec<(i64, i64)> = cycle.iter().map(|&v| g.coord(v).unwrap()).collect();
    // A doubled edge is its own reversal and has no orientation to check.
    if cycle.len() > 2 && shoelace_doubled(&poly) >= 0 {
        return Err(RotorError::NotUnicycle); // cycle must start clockwise
    }

    // Target rotors: cycle edges reversed, everything else as started.
    let mut target = start.rotors.clone();
    for i in 0..cycle.len() {
        let v = cycle[(i + 1) % cycle.len()];
        let prev = cycle[i];
        let back = g
            .out_edges(v)
            .iter()
            .copied()
            .find(|&e| g.head(e) == prev)
            .ok_or(RotorError::MissingReverseEdge(v))?;
        target = set_rotor_edge(g, &target, back);
    }

    let on_cycle = mark(n, &cycle);
    let mut advances = vec![0u64; n];
    let mut cur = start.clone();
    let cap = 4 * (g.edge_count() as u64) * (n as u64) + 4;
    let mut steps = 0u64;
    loop {
        advances[cur.chip] += 1;
        cur = rotor_step(g, &cur)?;
        steps += 1;
        if cur.chip == start.chip && cur.rotors == target {
            break;
        }
        if steps > cap {
            return Err(RotorError::OrbitCapExceeded(cap));
        }
    }

    let inside = point_classification(g, &poly, &on_cycle);
    let mut internal_full_turn = true;
    let mut external_untouched = true;
    for v in 0..n {
        if on_cycle[v] {
            continue;
        }
        if inside[v] {
            internal_full_turn &= advances[v] == g.outdeg(v) as u64;
        } else {
            external_untouched &= advances[v] == 0;
        }
    }
    Ok(CycleReversalReport {
        steps,
        internal_full_turn,
        external_untouched,
    })
}

fn set_rotor_edge(g: &Digraph, rotors: &RotorConfig, e: usize) -> RotorConfig {
    let mut positions = rotors.positions().to_vec();
    positions[g.tail(e)] = g.edge_position(e);
    RotorConfig::from_positions(g, positions).unwrap()
}

fn shoelace_doubled(poly: &[(i64, i64)]) -> i64 {
    let mut acc = 0i64;
    for i in 0..poly.len() {
        let (x0, y0) = poly[i];
        let (x1, y1) = poly[(i + 1) % poly.len()];
        acc += x0 * y1 - x1 * y0;
    }
    acc
}

/// For each off-cycle vertex, whether its embedding point lies inside the
/// cycle polygon (integer ray casting toward +x).
fn point_classification(g: &Digraph, poly: &[(i64, i64)], on_cycle: &[bool]) -> Vec<bool> {
    (0..g.vertex_count())
        .map(|v| {
            if on_cycle[v] {
                false
            } else {
                let p = g.coord(v).unwrap();
                point_in_polygon(p, poly)
            }
        })
        .collect()
}

fn point_in_polygon((px, py): (i64, i64), poly: &[(i64, i64)]) -> bool {
    let mut inside = false;
    for i in 0..poly.len() {
        let (ax, ay) = poly[i];
        let (bx, by) = poly[(i + 1) % poly.len()];
        if (ay > py) != (by > py) {
            // x coordinate where the edge crosses the horizontal through p
            let dy = by - ay;
            let lhs = (px - ax) * dy;
            let rhs = (py - ay) * (bx - ax);
            let crosses = if dy > 0 { lhs < rhs } else { lhs > rhs };
            if crosses {
                inside = !inside;
            }
        }
    }
    inside
}

#[derive(Debug, Clone)]
pub struct NoncommuteReport {
    pub graph: Digraph,
    pub rotors: RotorConfig,
    pub chips: (Vertex, Vertex),
    pub steps: usize,
    /// Final chip positions (sorted) and rotors for the two interleavings.
    pub first_then_second: (Vec<Vertex>, RotorConfig),
    pub second_then_first: (Vec<Vertex>, RotorConfig),
    pub differ: bool,
}

/// Exhibits the failure of the abelian property for fixed-step routing:
/// two chips each routed for exactly two steps, where the two orders of
/// processing end in different states. Run-to-sink routing on the same
/// instance commutes.
pub fn noncommutativity_demo() -> Result<NoncommuteReport, RotorError> {
    let g = crate::graph::generate(&Family::CompleteWithSink(3));
    let steps = 2;
    for p0 in 0..g.outdeg(0) {
        for p1 in 0..g.outdeg(1) {
            let rho = RotorConfig::from_positions(&g, vec![p0, p1, 0])?;
            for u in 0..2 {
                for v in 0..2 {
                    let a = fixed_step_route_pair(&g, &rho, u, v, steps)?;
                    let b = fixed_step_route_pair(&g, &rho, v, u, steps)?;
                    if a != b {
                        return Ok(NoncommuteReport {
                            graph: g.clone(),
                            rotors: rho,
                            chips: (u, v),
                            steps,
                            first_then_second: a,
                            second_then_first: b,
                            differ: true,
                        });
                    }
                }
            }
        }
    }
    unreachable!("fixed-step routing fails to commute on the three-vertex example")
}

/// Routes a chip from `first` for `steps` steps, then a chip from
/// `second`; chips freeze at the sink.
fn fixed_step_route_pair(
    g: &Digraph,
    rho: &RotorConfig,
    first: Vertex,
    second: Vertex,
    steps: usize,
) -> Result<(Vec<Vertex>, RotorConfig), RotorError> {
    let mut rotors = rho.clone();
    let mut finals = Vec::new();
    for &start in &[first, second] {
        let mut at = start;
        for _ in 0..steps {
            if g.outdeg(at) == 0 {
                break;
            }
            let next = rotor_step(g, &SingleChipState::new(at, rotors))?;
            at = next.chip;
            rotors = next.rotors;
        }
        finals.push(at);
    }
    finals.sort_unstable();
    Ok((finals, rotors))
}

/// Run-to-sink comparison used alongside the demo: the chip addition
/// operators commute.
pub fn run_to_sink_commutes(
    g: &Digraph,
    rho: &RotorConfig,
    u: Vertex,
    v: Vertex,
) -> Result<bool, RotorError> {
    let (a, _) = super::chip_add_rotor(g, rho, u)?;
    let (ab, _) = super::chip_add_rotor(g, &a, v)?;
    let (b, _) = super::chip_add_rotor(g, rho, v)?;
    let (ba, _) = super::chip_add_rotor(g, &b, u)?;
    Ok(ab == ba)
}

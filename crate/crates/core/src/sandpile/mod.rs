//! Chip configurations and the abelian sandpile engine: firing,
//! stabilization under several policies, chip addition, recurrence tests
//! and the move bound.
//!
//! The abelian property guarantees that the stable result and the odometer
//! do not depend on the firing order, so the queue-based bulk engine, the
//! LIFO/FIFO/random single-firing engines and the synchronous sweep engine
//! are interchangeable; the property suite checks this on random instances.

mod aggregate;
mod cluster;
mod group;

pub use aggregate::{aggregate, aggregate_sequential, AggregateParams, AggregateResult};
#[cfg(feature = "parallel")]
pub use aggregate::aggregate_parallel;
pub use cluster::{allowed_clusters, cluster_fire, is_superstable, superstabilize};
pub use group::{
    equivalent_mod_laplacian, group_add, group_order, group_structure, harmonic_rep, identity,
    inverse, recurrent_representative, recurrent_set,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{classify, Digraph, GraphError, Vertex};
use crate::intalg::Rational;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("vertex {0} is not active")]
    InactiveVertex(Vertex),
    #[error("configuration is not stable")]
    Unstable,
    #[error("stabilization exceeded the step cap of {0}")]
    Nonterminating(u64),
    #[error("graph has no global sink and no step cap was provided")]
    MissingStepCap,
    #[error("counter overflow during stabilization")]
    CounterOverflow,
    #[error("configuration is not recurrent")]
    NotRecurrent,
    #[error("operation requires an Eulerian digraph with sink")]
    RequiresEulerianSink,
    #[error("burning configuration is negative at vertex {0}")]
    NegativeBurningConfig(Vertex),
    #[error("{0} non-sink vertices exceed the brute-force cutoff of 16")]
    TooLargeForBruteForce(usize),
    #[error("cluster is not allowed to fire")]
    ClusterNotAllowed,
    #[error("fired set reached the window boundary at radius {0}; enlarge the window cap")]
    WindowOverflow(usize),
    #[error("configuration length {0} does not match graph order {1}")]
    ConfigMismatch(usize, usize),
}

/// Nonnegative chip counts over all vertices; the sink entry is
/// identically zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChipConfig {
    counts: Vec<u64>,
}

impl ChipConfig {
    pub fn zeros(g: &Digraph) -> Self {
        ChipConfig {
            counts: vec![0; g.vertex_count()],
        }
    }

    pub fn from_counts(g: &Digraph, counts: Vec<u64>) -> Result<Self, EngineError> {
        if counts.len() != g.vertex_count() {
            return Err(EngineError::ConfigMismatch(counts.len(), g.vertex_count()));
        }
        if let Some(s) = g.sink() {
            if counts[s] != 0 {
                return Err(EngineError::ConfigMismatch(s, 0));
            }
        }
        Ok(ChipConfig { counts })
    }

    /// Chips on the non-sink vertices given in vertex order; the sink entry
    /// is filled with zero.
    pub fn from_non_sink(g: &Digraph, values: &[u64]) -> Result<Self, EngineError> {
        let mut counts = vec![0u64; g.vertex_count()];
        let mut it = values.iter();
        for v in 0..g.vertex_count() {
            if Some(v) == g.sink() {
                continue;
            }
            counts[v] = *it.next().ok_or(EngineError::ConfigMismatch(
                values.len(),
                g.vertex_count(),
            ))?;
        }
        if it.next().is_some() {
            return Err(EngineError::ConfigMismatch(values.len(), g.vertex_count()));
        }
        ChipConfig::from_counts(g, counts)
    }

    pub fn get(&self, v: Vertex) -> u64 {
        self.counts[v]
    }

    pub fn add_at(&mut self, v: Vertex, k: u64) {
        self.counts[v] = self.counts[v].checked_add(k).expect("chip counter overflow");
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn to_counts(&self) -> Vec<u64> {
        self.counts.clone()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn is_stable(&self, g: &Digraph) -> bool {
        (0..g.vertex_count()).all(|v| {
            Some(v) == g.sink() || g.outdeg(v) == 0 || self.counts[v] < g.outdeg(v) as u64
        })
    }

    pub fn to_signed(&self) -> SignedConfig {
        SignedConfig {
            values: self.counts.iter().map(|&c| c as i64).collect(),
        }
    }
}

/// Arbitrary integer vector over the vertices, used for equivalence-class
/// arithmetic modulo the reduced Laplacian.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedConfig {
    pub values: Vec<i64>,
}

impl SignedConfig {
    pub fn new(values: Vec<i64>) -> Self {
        SignedConfig { values }
    }
}

/// Per-vertex firing counts of one stabilization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Odometer {
    pub counts: Vec<u64>,
    pub total_chip_moves: u64,
}

impl Odometer {
    fn finish(g: &Digraph, counts: Vec<u64>) -> Result<Self, EngineError> {
        let mut total: u64 = 0;
        for (v, &c) in counts.iter().enumerate() {
            let moves = c
                .checked_mul(g.outdeg(v) as u64)
                .ok_or(EngineError::CounterOverflow)?;
            total = total.checked_add(moves).ok_or(EngineError::CounterOverflow)?;
        }
        Ok(Odometer {
            counts,
            total_chip_moves: total,
        })
    }
}

/// Firing-order policies. All of them produce the same stabilization and
/// odometer; `Bulk` is the work-efficient default and `Sweep` is the
/// synchronous variant that the parallel backend accelerates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    /// FIFO queue, firing each popped vertex `floor(sigma(v)/d_v)` times.
    Bulk,
    /// FIFO queue, one firing per pop.
    Fifo,
    /// LIFO stack, one firing per pop.
    Lifo,
    /// Seeded random choice among active vertices, one firing at a time.
    Random(u64),
    /// Synchronous bulk sweeps over all vertices; runs on the parallel
    /// backend when the `parallel` feature is enabled.
    Sweep,
}

fn is_active(g: &Digraph, counts: &[u64], v: Vertex) -> bool {
    let d = g.outdeg(v);
    d > 0 && Some(v) != g.sink() && counts[v] >= d as u64
}

/// Fires one active vertex: one chip along each out-edge; chips landing on
/// the designated sink vanish.
pub fn fire(g: &Digraph, sigma: &ChipConfig, v: Vertex) -> Result<ChipConfig, EngineError> {
    if !is_active(g, &sigma.counts, v) {
        return Err(EngineError::InactiveVertex(v));
    }
    let mut counts = sigma.counts.clone();
    counts[v] -= g.outdeg(v) as u64;
    for &e in g.out_edges(v) {
        let w = g.head(e);
        if Some(w) != g.sink() {
            counts[w] = counts[w].checked_add(1).ok_or(EngineError::CounterOverflow)?;
        }
    }
    Ok(ChipConfig { counts })
}

/// Stabilizes a configuration, returning the stable result and the
/// odometer. Requires a global sink unless a step cap is given; the cap
/// counts individual vertex firings.
pub fn stabilize(
    g: &Digraph,
    sigma: &ChipConfig,
    policy: Policy,
    step_cap: Option<u64>,
) -> Result<(ChipConfig, Odometer), EngineError> {
    if step_cap.is_none() && !g.has_global_sink() {
        return Err(EngineError::MissingStepCap);
    }
    match policy {
        Policy::Bulk => stabilize_queue(g, sigma, step_cap, true, false, None),
        Policy::Fifo => stabilize_queue(g, sigma, step_cap, false, false, None),
        Policy::Lifo => stabilize_queue(g, sigma, step_cap, false, true, None),
        Policy::Random(seed) => stabilize_queue(g, sigma, step_cap, false, false, Some(seed)),
        Policy::Sweep => {
            #[cfg(feature = "parallel")]
            {
                stabilize_sweep_parallel(g, sigma, step_cap)
            }
            #[cfg(not(feature = "parallel"))]
            {
                stabilize_sweep_sequential(g, sigma, step_cap)
            }
        }
    }
}

fn stabilize_queue(
    g: &Digraph,
    sigma: &ChipConfig,
    step_cap: Option<u64>,
    bulk: bool,
    lifo: bool,
    random_seed: Option<u64>,
) -> Result<(ChipConfig, Odometer), EngineError> {
    let n = g.vertex_count();
    let mut counts = sigma.counts.clone();
    let mut odometer = vec![0u64; n];
    let mut steps: u64 = 0;
    let cap = step_cap.unwrap_or(u64::MAX);

    let mut work: Vec<Vertex> = (0..n).filter(|&v| is_active(g, &counts, v)).collect();
    let mut queued = vec![false; n];
    for &v in &work {
        queued[v] = true;
    }
    let mut rng = random_seed.map(ChaCha8Rng::seed_from_u64);
    let mut head = 0usize; // queue cursor (FIFO modes)

    while head < work.len() {
        let v = match (&mut rng, lifo) {
            (Some(rng), _) => {
                // swap the random pick to the back and pop it
                let i = rng.gen_range(head..work.len());
                let last = work.len() - 1;
                work.swap(i, last);
                work.pop().unwrap()
            }
            (None, true) => work.pop().unwrap(),
            (None, false) => {
                let v = work[head];
                head += 1;
                v
            }
        };
        queued[v] = false;
        let d = g.outdeg(v) as u64;
        if counts[v] < d {
            continue;
        }
        let q = if bulk { counts[v] / d } else { 1 };
        steps = steps.checked_add(q).ok_or(EngineError::CounterOverflow)?;
        if steps > cap {
            return Err(EngineError::Nonterminating(cap));
        }
        counts[v] -= q * d;
        odometer[v] = odometer[v].checked_add(q).ok_or(EngineError::CounterOverflow)?;
        for &e in g.out_edges(v) {
            let w = g.head(e);
            if Some(w) == g.sink() {
                continue;
            }
            counts[w] = counts[w].checked_add(q).ok_or(EngineError::CounterOverflow)?;
            if !queued[w] && is_active(g, &counts, w) {
                queued[w] = true;
                work.push(w);
            }
        }
        if is_active(g, &counts, v) && !queued[v] {
            queued[v] = true;
            work.push(v);
        }
        // Compact the drained prefix occasionally so the vec stays small.
        if head > 1024 && head * 2 > work.len() {
            work.drain(..head);
            head = 0;
        }
    }
    Ok((ChipConfig { counts }, Odometer::finish(g, odometer)?))
}

/// Synchronous sweep stabilization: every active vertex fires in bulk once
/// per sweep. Sequential reference implementation.
pub fn stabilize_sweep_sequential(
    g: &Digraph,
    sigma: &ChipConfig,
    step_cap: Option<u64>,
) -> Result<(ChipConfig, Odometer), EngineError> {
    if step_cap.is_none() && !g.has_global_sink() {
        return Err(EngineError::MissingStepCap);
    }
    let n = g.vertex_count();
    let mut counts = sigma.counts.clone();
    let mut odometer = vec![0u64; n];
    let mut q = vec![0u64; n];
    let mut steps: u64 = 0;
    let cap = step_cap.unwrap_or(u64::MAX);
    loop {
        let mut any = false;
        for v in 0..n {
            q[v] = if is_active(g, &counts, v) {
                any = true;
                counts[v] / g.outdeg(v) as u64
            } else {
                0
            };
        }
        if !any {
            break;
        }
        let mut next = vec![0u64; n];
        for w in 0..n {
            if Some(w) == g.sink() {
                continue;
            }
            let mut c = counts[w] - q[w] * g.outdeg(w) as u64;
            for &u in g.in_sources(w) {
                c = c.checked_add(q[u]).ok_or(EngineError::CounterOverflow)?;
            }
            next[w] = c;
        }
        for v in 0..n {
            steps = steps.checked_add(q[v]).ok_or(EngineError::CounterOverflow)?;
            odometer[v] = odometer[v].checked_add(q[v]).ok_or(EngineError::CounterOverflow)?;
        }
        if steps > cap {
            return Err(EngineError::Nonterminating(cap));
        }
        counts = next;
    }
    Ok((ChipConfig { counts }, Odometer::finish(g, odometer)?))
}

/// Synchronous sweep stabilization on the rayon backend; the per-vertex
/// updates of one sweep are independent.
#[cfg(feature = "parallel")]
pub fn stabilize_sweep_parallel(
    g: &Digraph,
    sigma: &ChipConfig,
    step_cap: Option<u64>,
) -> Result<(ChipConfig, Odometer), EngineError> {
    use rayon::prelude::*;
    if step_cap.is_none() && !g.has_global_sink() {
        return Err(EngineError::MissingStepCap);
    }
    let n = g.vertex_count();
    let mut counts = sigma.counts.clone();
    let mut odometer = vec![0u64; n];
    let mut steps: u64 = 0;
    let cap = step_cap.unwrap_or(u64::MAX);
    loop {
        let q: Vec<u64> = (0..n)
            .into_par_iter()
            .map(|v| {
                if is_active(g, &counts, v) {
                    counts[v] / g.outdeg(v) as u64
                } else {
                    0
                }
            })
            .collect();
        let sweep_total: u64 = q.par_iter().sum();
        if sweep_total == 0 {
            break;
        }
        steps = steps.checked_add(sweep_total).ok_or(EngineError::CounterOverflow)?;
        if steps > cap {
            return Err(EngineError::Nonterminating(cap));
        }
        let next: Vec<u64> = (0..n)
            .into_par_iter()
            .map(|w| {
                if Some(w) == g.sink() {
                    return 0;
                }
                let mut c = counts[w] - q[w] * g.outdeg(w) as u64;
                for &u in g.in_sources(w) {
                    c += q[u];
                }
                c
            })
            .collect();
        for v in 0..n {
            odometer[v] = odometer[v].checked_add(q[v]).ok_or(EngineError::CounterOverflow)?;
        }
        counts = next;
    }
    Ok((ChipConfig { counts }, Odometer::finish(g, odometer)?))
}

/// The chip addition operator `E_v`: add one chip at `v`, then stabilize.
pub fn chip_add(g: &Digraph, sigma: &ChipConfig, v: Vertex) -> Result<ChipConfig, EngineError> {
    g.require_global_sink()?;
    let mut bumped = sigma.clone();
    bumped.add_at(v, 1);
    Ok(stabilize(g, &bumped, Policy::Bulk, None)?.0)
}

/// The configuration with `d_v` chips at each non-sink vertex.
pub fn delta_config(g: &Digraph) -> ChipConfig {
    let counts = (0..g.vertex_count())
        .map(|v| if Some(v) == g.sink() { 0 } else { g.outdeg(v) as u64 })
        .collect();
    ChipConfig { counts }
}

/// One chip at every non-sink vertex.
pub fn ones_config(g: &Digraph) -> ChipConfig {
    let counts = (0..g.vertex_count())
        .map(|v| if Some(v) == g.sink() { 0 } else { 1 })
        .collect();
    ChipConfig { counts }
}

/// The burning configuration `beta(v) = outdeg(v) - indeg(v)`; requires it
/// to be nonnegative, which holds on Eulerian digraphs with sink.
pub fn burning_config(g: &Digraph) -> Result<ChipConfig, EngineError> {
    let mut counts = vec![0u64; g.vertex_count()];
    for v in 0..g.vertex_count() {
        if Some(v) == g.sink() {
            continue;
        }
        let (o, i) = (g.outdeg(v), g.indeg(v));
        if o < i {
            return Err(EngineError::NegativeBurningConfig(v));
        }
        counts[v] = (o - i) as u64;
    }
    Ok(ChipConfig { counts })
}

/// The everywhere-positive configuration `epsilon = 2*delta - (2*delta)`
/// stabilized, used by the recurrence test.
pub fn epsilon_config(g: &Digraph) -> Result<ChipConfig, EngineError> {
    g.require_global_sink()?;
    let two_delta = ChipConfig {
        counts: delta_config(g).counts.iter().map(|&c| 2 * c).collect(),
    };
    let (stab, _) = stabilize(g, &two_delta, Policy::Bulk, None)?;
    let counts: Vec<u64> = two_delta
        .counts
        .iter()
        .zip(&stab.counts)
        .map(|(&a, &b)| a - b)
        .collect();
    for v in 0..g.vertex_count() {
        if Some(v) != g.sink() {
            debug_assert!(counts[v] >= 1, "epsilon is positive off the sink");
        }
    }
    Ok(ChipConfig { counts })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecurrenceTest {
    /// `(sigma + epsilon) stabilized == sigma`; sound and complete on any
    /// digraph with a global sink.
    Epsilon,
    /// Burning test; Eulerian-with-sink only.
    Burning,
    /// Iterated deletion of vertices holding at least their in-degree in
    /// the remaining induced subgraph; Eulerian-with-sink only.
    Peeling,
}

pub fn is_recurrent(g: &Digraph, sigma: &ChipConfig) -> Result<bool, EngineError> {
    is_recurrent_with(g, sigma, RecurrenceTest::Epsilon)
}

pub fn is_recurrent_with(
    g: &Digraph,
    sigma: &ChipConfig,
    test: RecurrenceTest,
) -> Result<bool, EngineError> {
    RecurrenceTester::new(g)?.test(sigma, test)
}

/// Recurrence testing with the per-graph configurations (`epsilon`, the
/// burning configuration, the classification) computed once; use this when
/// testing many configurations on one graph.
pub struct RecurrenceTester<'g> {
    g: &'g Digraph,
    epsilon: ChipConfig,
    eulerian_with_sink: bool,
    beta: Option<ChipConfig>,
}

impl<'g> RecurrenceTester<'g> {
    pub fn new(g: &'g Digraph) -> Result<Self, EngineError> {
        g.require_global_sink()?;
        let epsilon = epsilon_config(g)?;
        let eulerian_with_sink = classify(g).eulerian_with_sink;
        let beta = if eulerian_with_sink {
            Some(burning_config(g)?)
        } else {
            None
        };
        Ok(RecurrenceTester {
            g,
            epsilon,
            eulerian_with_sink,
            beta,
        })
    }

    pub fn test(&self, sigma: &ChipConfig, test: RecurrenceTest) -> Result<bool, EngineError> {
        let g = self.g;
        if !sigma.is_stable(g) {
            return Err(EngineError::Unstable);
        }
        match test {
            RecurrenceTest::Epsilon => {
                let sum = add_configs(sigma, &self.epsilon);
                let (stab, _) = stabilize(g, &sum, Policy::Bulk, None)?;
                Ok(stab == *sigma)
            }
            RecurrenceTest::Burning => {
                let beta = self
                    .beta
                    .as_ref()
                    .ok_or(EngineError::RequiresEulerianSink)?;
                let sum = add_configs(sigma, beta);
                let (stab, od) = stabilize(g, &sum, Policy::Bulk, None)?;
                if stab != *sigma {
                    return Ok(false);
                }
                // Each vertex fires exactly once when sigma is recurrent.
                debug_assert!(
                    (0..g.vertex_count()).all(|v| Some(v) == g.sink() || od.counts[v] == 1)
                );
                Ok(true)
            }
            RecurrenceTest::Peeling => {
                if !self.eulerian_with_sink {
                    return Err(EngineError::RequiresEulerianSink);
                }
                Ok(peels_to_empty(g, sigma))
            }
        }
    }
}

/// Greedy ample-subgraph peeling. The deletion order does not matter: the
/// first deleted vertex of any subgraph witnesses its ampleness.
fn peels_to_empty(g: &Digraph, sigma: &ChipConfig) -> bool {
    let s = g.sink().expect("global sink");
    let mut alive: Vec<bool> = (0..g.vertex_count()).map(|v| v != s).collect();
    let mut remaining = g.vertex_count() - 1;
    loop {
        if remaining == 0 {
            return true;
        }
        let mut deleted_any = false;
        for v in 0..g.vertex_count() {
            if !alive[v] {
                continue;
            }
            let indeg_alive = g.in_sources(v).iter().filter(|&&u| alive[u] && u != v).count()
                + g.adjacency_count(v, v); // self-loops count toward in-degree
            if sigma.get(v) >= indeg_alive as u64 {
                alive[v] = false;
                remaining -= 1;
                deleted_any = true;
            }
        }
        if !deleted_any {
            return false;
        }
    }
}

pub fn add_configs(a: &ChipConfig, b: &ChipConfig) -> ChipConfig {
    assert_eq!(a.counts.len(), b.counts.len());
    ChipConfig {
        counts: a
            .counts
            .iter()
            .zip(&b.counts)
            .map(|(&x, &y)| x.checked_add(y).expect("chip counter overflow"))
            .collect(),
    }
}

#[derive(Debug, Clone)]
pub struct MoveBoundReport {
    pub moves: u64,
    pub bound: Rational,
    pub ok: bool,
}

/// Van den Heuvel's bound: the chip moves of a stabilization on a
/// bidirected graph with sink are at most `2 m |sigma| R_max`, with `m`
/// the number of directed edges after sink deletion.
pub fn move_bound_check(g: &Digraph, sigma: &ChipConfig) -> Result<MoveBoundReport, EngineError> {
    if !g.is_bidirected_with_sink() {
        return Err(EngineError::Graph(GraphError::NotBidirected));
    }
    let (_, od) = stabilize(g, sigma, Policy::Bulk, None)?;
    let r_max = crate::intalg::max_effective_resistance(g)
        .map_err(|_| EngineError::Graph(GraphError::NotBidirected))?;
    let m = BigInt::from(g.edge_count() as u64);
    let total = BigInt::from(sigma.total());
    let bound = BigRational::from_integer(m * total * BigInt::from(2)) * r_max;
    let ok = BigRational::from_integer(BigInt::from(od.total_chip_moves)) <= bound;
    Ok(MoveBoundReport {
        moves: od.total_chip_moves,
        bound,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, two_vertex_triangle, Family};

    fn cfg(g: &Digraph, v: &[u64]) -> ChipConfig {
        ChipConfig::from_non_sink(g, v).unwrap()
    }

    #[test]
    fn fire_complete_three() {
        let g = generate(&Family::Complete(3));
        let sigma = ChipConfig::from_counts(&g, vec![3, 0, 0]).unwrap();
        let fired = fire(&g, &sigma, 0).unwrap();
        assert_eq!(fired.to_counts(), vec![1, 1, 1]);
    }

    #[test]
    fn fire_sends_one_chip_to_sink() {
        let g = two_vertex_triangle();
        let sigma = cfg(&g, &[2, 0]);
        let fired = fire(&g, &sigma, 0).unwrap();
        assert_eq!(fired.to_counts(), vec![0, 1, 0]);
    }

    #[test]
    fn fire_self_loop_fixed_point() {
        let g = Digraph::new(1, &[(0, 0)], None).unwrap();
        let sigma = ChipConfig::from_counts(&g, vec![1]).unwrap();
        let fired = fire(&g, &sigma, 0).unwrap();
        assert_eq!(fired.to_counts(), vec![1]);
    }

    #[test]
    fn fire_inactive_errors() {
        let g = two_vertex_triangle();
        let sigma = cfg(&g, &[1, 0]);
        assert!(matches!(fire(&g, &sigma, 0), Err(EngineError::InactiveVertex(0))));
    }

    #[test]
    fn stabilize_complete_three() {
        let g = generate(&Family::Complete(3));
        let sigma = ChipConfig::from_counts(&g, vec![3, 0, 0]).unwrap();
        let (stab, od) = stabilize(&g, &sigma, Policy::Bulk, Some(1000)).unwrap();
        assert_eq!(stab.to_counts(), vec![1, 1, 1]);
        assert_eq!(od.counts, vec![1, 0, 0]);
    }

    #[test]
    fn stabilize_never_terminates_without_sink() {
        let g = generate(&Family::Complete(3));
        let sigma = ChipConfig::from_counts(&g, vec![4, 0, 0]).unwrap();
        assert!(matches!(
            stabilize(&g, &sigma, Policy::Bulk, Some(1_000_000)),
            Err(EngineError::Nonterminating(_))
        ));
        assert!(matches!(
            stabilize(&g, &sigma, Policy::Bulk, None),
            Err(EngineError::MissingStepCap)
        ));
    }

    #[test]
    fn stabilize_zero_figure_by_hand() {
        let g = two_vertex_triangle();
        let (stab, od) = stabilize(&g, &cfg(&g, &[2, 2]), Policy::Bulk, None).unwrap();
        assert_eq!(stab, cfg(&g, &[1, 1]));
        assert_eq!(od.counts, vec![1, 1, 0]);
    }

    #[test]
    fn policies_agree() {
        let g = generate(&Family::GridWired(3));
        let sigma = ChipConfig::from_counts(&g, {
            let mut v = vec![0; 10];
            v[4] = 37;
            v
        })
        .unwrap();
        let reference = stabilize(&g, &sigma, Policy::Bulk, None).unwrap();
        for policy in [Policy::Fifo, Policy::Lifo, Policy::Random(99), Policy::Sweep] {
            let got = stabilize(&g, &sigma, policy, None).unwrap();
            assert_eq!(got, reference, "{:?}", policy);
        }
        let seq = stabilize_sweep_sequential(&g, &sigma, None).unwrap();
        assert_eq!(seq, reference);
    }

    #[test]
    fn chip_add_traces() {
        let g = two_vertex_triangle();
        // E at the first vertex: (2,1) -> (0,2) -> (1,0)
        assert_eq!(chip_add(&g, &cfg(&g, &[1, 1]), 0).unwrap(), cfg(&g, &[1, 0]));
        // E at the second vertex: (1,2) -> (2,0) -> (0,1)
        assert_eq!(chip_add(&g, &cfg(&g, &[1, 1]), 1).unwrap(), cfg(&g, &[0, 1]));
    }

    #[test]
    fn chip_add_on_stable_low_config() {
        let g = two_vertex_triangle();
        assert_eq!(chip_add(&g, &cfg(&g, &[0, 0]), 0).unwrap(), cfg(&g, &[1, 0]));
    }

    #[test]
    fn canonical_configs_zero_figure() {
        let g = two_vertex_triangle();
        assert_eq!(delta_config(&g), cfg(&g, &[2, 2]));
        assert_eq!(ones_config(&g), cfg(&g, &[1, 1]));
        assert_eq!(burning_config(&g).unwrap(), cfg(&g, &[1, 1]));
        let eps = epsilon_config(&g).unwrap();
        assert!(eps.get(0) >= 1 && eps.get(1) >= 1);
        assert_eq!(delta_config(&g).get(2), 0);
    }

    #[test]
    fn burning_config_negative_entry_errors() {
        // v0 has outdeg 1 < indeg 2
        let g = Digraph::new(3, &[(0, 2), (1, 0), (1, 0), (1, 2)], Some(2)).unwrap();
        assert!(matches!(
            burning_config(&g),
            Err(EngineError::NegativeBurningConfig(0))
        ));
    }

    #[test]
    fn recurrence_zero_figure() {
        let g = two_vertex_triangle();
        assert!(is_recurrent(&g, &cfg(&g, &[1, 1])).unwrap());
        assert!(!is_recurrent(&g, &cfg(&g, &[0, 0])).unwrap());
        for t in [RecurrenceTest::Burning, RecurrenceTest::Peeling] {
            assert!(is_recurrent_with(&g, &cfg(&g, &[1, 1]), t).unwrap());
            assert!(!is_recurrent_with(&g, &cfg(&g, &[0, 0]), t).unwrap());
        }
        assert!(matches!(
            is_recurrent(&g, &cfg(&g, &[5, 0])),
            Err(EngineError::Unstable)
        ));
    }

    #[test]
    fn recurrence_single_vertex_chain() {
        let g = Digraph::new(2, &[(0, 1), (0, 1), (0, 1)], Some(1)).unwrap();
        for k in 0..3 {
            assert!(is_recurrent(&g, &cfg(&g, &[k])).unwrap());
        }
    }

    #[test]
    fn move_bound_path() {
        let g = generate(&Family::PathBidirected(2));
        let sigma = cfg(&g, &[17]);
        let rep = move_bound_check(&g, &sigma).unwrap();
        assert_eq!(rep.moves, 17);
        assert!(rep.ok);
    }

    #[test]
    fn move_bound_zero_config() {
        let g = generate(&Family::GridWired(2));
        let rep = move_bound_check(&g, &ChipConfig::zeros(&g)).unwrap();
        assert_eq!(rep.moves, 0);
        assert!(rep.ok);
    }

    #[test]
    fn move_bound_grid_center() {
        let g = generate(&Family::GridWired(8));
        let mut counts = vec![0u64; g.vertex_count()];
        counts[3 * 8 + 3] = 500;
        let sigma = ChipConfig::from_counts(&g, counts).unwrap();
        assert!(move_bound_check(&g, &sigma).unwrap().ok);
    }
}

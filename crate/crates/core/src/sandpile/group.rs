//! Sandpile-group arithmetic on recurrent configurations: identity,
//! inverses, group addition, class equivalence, and the harmonic-modulo-1
//! representation.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{
    add_configs, chip_add, delta_config, is_recurrent, stabilize, ChipConfig, EngineError, Policy,
    SignedConfig,
};
use crate::graph::{reduced_laplacian, Digraph};
use crate::intalg::{self, GroupStructure, Rational};

/// The identity element `I = (sigma - sigma stabilized) stabilized` for
/// `sigma = 2*delta - 2`.
pub fn identity(g: &Digraph) -> Result<ChipConfig, EngineError> {
    g.require_global_sink()?;
    let start = scaled_delta_minus(g, 2, 2);
    let (stab, _) = stabilize(g, &start, Policy::Bulk, None)?;
    let diff = sub_configs(&start, &stab);
    Ok(stabilize(g, &diff, Policy::Bulk, None)?.0)
}

/// The group inverse of a recurrent configuration, via
/// `(zeta - zeta stabilized - sigma) stabilized` with `zeta = 3*delta - 3`.
pub fn inverse(g: &Digraph, sigma: &ChipConfig) -> Result<ChipConfig, EngineError> {
    if !is_recurrent(g, sigma)? {
        return Err(EngineError::NotRecurrent);
    }
    let zeta = scaled_delta_minus(g, 3, 3);
    let (zeta_stab, _) = stabilize(g, &zeta, Policy::Bulk, None)?;
    let diff = sub_configs(&sub_configs(&zeta, &zeta_stab), sigma);
    Ok(stabilize(g, &diff, Policy::Bulk, None)?.0)
}

/// Group operation on recurrent configurations: add, then stabilize.
pub fn group_add(
    g: &Digraph,
    a: &ChipConfig,
    b: &ChipConfig,
) -> Result<ChipConfig, EngineError> {
    if !is_recurrent(g, a)? || !is_recurrent(g, b)? {
        return Err(EngineError::NotRecurrent);
    }
    Ok(stabilize(g, &add_configs(a, b), Policy::Bulk, None)?.0)
}

/// Order of the sandpile group: the determinant of the reduced Laplacian.
pub fn group_order(g: &Digraph) -> Result<BigInt, EngineError> {
    g.require_global_sink()?;
    Ok(intalg::determinant(&reduced_laplacian(g)?))
}

/// Invariant-factor decomposition of the sandpile group.
pub fn group_structure(g: &Digraph) -> Result<GroupStructure, EngineError> {
    g.require_global_sink()?;
    intalg::smith_normal_form(&reduced_laplacian(g)?)
        .map_err(|_| EngineError::Graph(crate::graph::GraphError::NoGlobalSink))
}

fn non_sink_vector(a: &SignedConfig, labels: &[usize]) -> Vec<Rational> {
    labels
        .iter()
        .map(|&v| Rational::from_integer(BigInt::from(a.values[v])))
        .collect()
}

/// Whether `a` and `b` differ by an integer combination of reduced
/// Laplacian rows. Sink entries are ignored.
pub fn equivalent_mod_laplacian(
    g: &Digraph,
    a: &SignedConfig,
    b: &SignedConfig,
) -> Result<bool, EngineError> {
    g.require_global_sink()?;
    let lap = reduced_laplacian(g)?;
    let labels = lap.labels().to_vec();
    let av = non_sink_vector(a, &labels);
    let bv = non_sink_vector(b, &labels);
    let rhs: Vec<Rational> = av.iter().zip(&bv).map(|(x, y)| x - y).collect();
    // x * Lap' = a - b, i.e. Lap'^T x^T = (a - b)^T
    let x = match intalg::solve_rational(&lap.transpose(), &rhs) {
        Ok(x) => x,
        Err(_) => return Ok(false),
    };
    Ok(x.iter().all(|r| r.is_integer()))
}

/// The unique recurrent configuration equivalent to `a`: shift by a large
/// multiple of the positive vector `delta - delta stabilized`, then
/// stabilize.
pub fn recurrent_representative(
    g: &Digraph,
    a: &SignedConfig,
) -> Result<ChipConfig, EngineError> {
    g.require_global_sink()?;
    let n = g.vertex_count();
    let delta = delta_config(g);
    let (delta_stab, _) = stabilize(g, &delta, Policy::Bulk, None)?;
    let pos = sub_configs(&delta, &delta_stab); // positive off the sink
    let m = (0..n)
        .filter(|&v| Some(v) != g.sink())
        .map(|v| a.values[v])
        .chain(std::iter::once(0))
        .min()
        .unwrap();
    let d_max = (0..n).map(|v| g.outdeg(v)).max().unwrap_or(0) as i64;
    let k = (d_max - m) as u64;
    let mut counts = vec![0u64; n];
    for v in 0..n {
        if Some(v) == g.sink() {
            continue;
        }
        let value = a.values[v] + k as i64 * pos.get(v) as i64;
        debug_assert!(value >= 0);
        counts[v] = value as u64;
    }
    let beta = ChipConfig::from_counts(g, counts)?;
    Ok(stabilize(g, &beta, Policy::Bulk, None)?.0)
}

/// Harmonic-modulo-1 representative of a configuration's group element:
/// the exact rational solve of the reduced-Laplacian system, reduced into
/// `[0, 1)` per entry, listed in non-sink vertex order.
///
/// The system is solved in the transposed (row-action) form, which is the
/// one invariant under firing; on bidirected graphs it coincides with the
/// untransposed solve.
pub fn harmonic_rep(g: &Digraph, sigma: &ChipConfig) -> Result<Vec<Rational>, EngineError> {
    g.require_global_sink()?;
    let lap = reduced_laplacian(g)?;
    let rhs: Vec<Rational> = lap
        .labels()
        .iter()
        .map(|&v| Rational::from_integer(BigInt::from(sigma.get(v))))
        .collect();
    let f = intalg::solve_rational(&lap.transpose(), &rhs)
        .map_err(|_| EngineError::Graph(crate::graph::GraphError::NoGlobalSink))?;
    Ok(f.into_iter().map(mod_one).collect())
}

fn mod_one(x: Rational) -> Rational {
    let floor = x.numer().div_floor(x.denom());
    &x - Rational::from_integer(floor)
}

/// All recurrent configurations, as the closure of the identity under the
/// chip addition operators. Guarded by the group order.
pub fn recurrent_set(g: &Digraph) -> Result<Vec<ChipConfig>, EngineError> {
    let order = group_order(g)?;
    if order > BigInt::from(100_000) {
        return Err(EngineError::TooLargeForBruteForce(g.vertex_count()));
    }
    if order.is_zero() {
        return Err(EngineError::Graph(crate::graph::GraphError::NoGlobalSink));
    }
    let start = identity(g)?;
    let mut seen: HashSet<ChipConfig> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(cur) = queue.pop_front() {
        for v in 0..g.vertex_count() {
            if Some(v) == g.sink() || g.outdeg(v) == 0 {
                continue;
            }
            let next = chip_add(g, &cur, v)?;
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    debug_assert_eq!(BigInt::from(seen.len()), order.abs());
    let mut out: Vec<ChipConfig> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

fn scaled_delta_minus(g: &Digraph, factor: u64, minus: u64) -> ChipConfig {
    let counts = (0..g.vertex_count())
        .map(|v| {
            if Some(v) == g.sink() {
                0
            } else {
                (g.outdeg(v) as u64 * factor).saturating_sub(minus)
            }
        })
        .collect();
    ChipConfig::from_counts(g, counts).unwrap()
}

fn sub_configs(a: &ChipConfig, b: &ChipConfig) -> ChipConfig {
    let counts = a
        .counts()
        .iter()
        .zip(b.counts())
        .map(|(&x, &y)| {
            debug_assert!(x >= y);
            x - y
        })
        .collect();
    ChipConfig { counts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, two_vertex_triangle, Digraph, Family};
    use num_traits::One;

    fn cfg(g: &Digraph, v: &[u64]) -> ChipConfig {
        ChipConfig::from_non_sink(g, v).unwrap()
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn identity_zero_figure() {
        let g = two_vertex_triangle();
        assert_eq!(identity(&g).unwrap(), cfg(&g, &[1, 1]));
    }

    #[test]
    fn identity_single_vertex() {
        let g = Digraph::new(2, &[(0, 1), (0, 1), (0, 1)], Some(1)).unwrap();
        assert_eq!(identity(&g).unwrap(), cfg(&g, &[0]));
    }

    #[test]
    fn identity_is_recurrent_and_idempotent() {
        for f in [Family::GridWired(2), Family::DirectedTorus(3), Family::CompleteWithSink(4)] {
            let g = generate(&f);
            let i = identity(&g).unwrap();
            assert!(is_recurrent(&g, &i).unwrap());
            assert_eq!(group_add(&g, &i, &i).unwrap(), i);
        }
    }

    #[test]
    fn inverse_zero_figure() {
        let g = two_vertex_triangle();
        let i = identity(&g).unwrap();
        assert_eq!(inverse(&g, &i).unwrap(), i);
        assert_eq!(inverse(&g, &cfg(&g, &[0, 1])).unwrap(), cfg(&g, &[1, 0]));
        assert!(matches!(
            inverse(&g, &cfg(&g, &[0, 0])),
            Err(EngineError::NotRecurrent)
        ));
    }

    #[test]
    fn group_order_and_structure_zero_figure() {
        let g = two_vertex_triangle();
        assert_eq!(group_order(&g).unwrap(), BigInt::from(3));
        let s = group_structure(&g).unwrap();
        assert_eq!(s.order, BigInt::from(3));
        assert_eq!(s.invariant_factors, vec![BigInt::from(3)]);
    }

    #[test]
    fn equivalence_zero_figure() {
        let g = two_vertex_triangle();
        let zero = SignedConfig::new(vec![0, 0, 0]);
        let ones = SignedConfig::new(vec![1, 1, 0]);
        assert!(equivalent_mod_laplacian(&g, &zero, &zero).unwrap());
        assert!(equivalent_mod_laplacian(&g, &zero, &ones).unwrap());
        let off = SignedConfig::new(vec![1, 0, 0]);
        assert!(!equivalent_mod_laplacian(&g, &zero, &off).unwrap());
    }

    #[test]
    fn recurrent_representative_zero_figure() {
        let g = two_vertex_triangle();
        let rep = recurrent_representative(&g, &SignedConfig::new(vec![0, 0, 0])).unwrap();
        assert_eq!(rep, cfg(&g, &[1, 1]));
    }

    #[test]
    fn harmonic_zero_figure() {
        let g = two_vertex_triangle();
        let reps = recurrent_set(&g).unwrap();
        let mut harmonics: Vec<Vec<Rational>> = reps
            .iter()
            .map(|s| harmonic_rep(&g, s).unwrap())
            .collect();
        harmonics.sort();
        assert_eq!(
            harmonics,
            vec![
                vec![rat(0, 1), rat(0, 1)],
                vec![rat(1, 3), rat(2, 3)],
                vec![rat(2, 3), rat(1, 3)],
            ]
        );
        assert_eq!(
            harmonic_rep(&g, &identity(&g).unwrap()).unwrap(),
            vec![rat(0, 1), rat(0, 1)]
        );
    }

    #[test]
    fn recurrent_set_matches_order() {
        let g = two_vertex_triangle();
        let set = recurrent_set(&g).unwrap();
        assert_eq!(set.len(), 3);
        let i = identity(&g).unwrap();
        for s in &set {
            assert_eq!(group_add(&g, s, &i).unwrap(), *s);
            let inv = inverse(&g, s).unwrap();
            assert_eq!(group_add(&g, s, &inv).unwrap(), i);
        }
    }

    #[test]
    fn chip_operators_commute() {
        let g = generate(&Family::GridWired(2));
        let sigma = cfg(&g, &[1, 3, 0, 2]);
        let a = chip_add(&g, &chip_add(&g, &sigma, 0).unwrap(), 3).unwrap();
        let b = chip_add(&g, &chip_add(&g, &sigma, 3).unwrap(), 0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn snf_order_is_one_for_tree_graph() {
        let g = generate(&Family::PathBidirected(4));
        let s = group_structure(&g).unwrap();
        assert!(s.order.is_one());
    }
}

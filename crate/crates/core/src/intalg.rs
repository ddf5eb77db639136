//! Exact integer and rational linear algebra: fraction-free determinants,
//! Smith normal form, rational solves, effective resistance.
//!
//! Everything here is exact; grid Laplacian determinants overflow 64-bit
//! integers already at modest sizes, so entries are arbitrary precision
//! throughout. The only floating-point code is the effective-resistance
//! fallback for graphs above the exact-arithmetic cutoff.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::graph::{Digraph, GraphError};

pub type Rational = BigRational;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Dense square matrix of arbitrary-precision integers with row/column
/// labels carrying the originating vertex indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<BigInt>,
    labels: Vec<usize>,
}

impl IntMatrix {
    pub fn new(dim: usize, entries: Vec<BigInt>, labels: Vec<usize>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        assert_eq!(labels.len(), dim);
        IntMatrix { dim, entries, labels }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in rows {
            assert_eq!(r.len(), dim);
            entries.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        IntMatrix::new(dim, entries, (0..dim).collect())
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![BigInt::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = BigInt::one();
        }
        IntMatrix::new(dim, entries, (0..dim).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.dim + j] = v;
    }

    /// The matrix with row and column `k` deleted.
    pub fn minor(&self, k: usize) -> IntMatrix {
        let dim = self.dim - 1;
        let mut entries = Vec::with_capacity(dim * dim);
        let mut labels = Vec::with_capacity(dim);
        for i in 0..self.dim {
            if i == k {
                continue;
            }
            labels.push(self.labels[i]);
            for j in 0..self.dim {
                if j != k {
                    entries.push(self.get(i, j).clone());
                }
            }
        }
        IntMatrix::new(dim, entries, labels)
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut entries = Vec::with_capacity(self.dim * self.dim);
        for j in 0..self.dim {
            for i in 0..self.dim {
                entries.push(self.get(i, j).clone());
            }
        }
        IntMatrix::new(self.dim, entries, self.labels.clone())
    }

    /// Row-vector action `x * M` over plain integers; used for the odometer
    /// conservation identity.
    pub fn left_mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.dim);
        let mut out = vec![BigInt::zero(); self.dim];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for j in 0..self.dim {
                out[j] += xi * self.get(i, j);
            }
        }
        out
    }
}

/// Exact determinant by fraction-free Bareiss elimination.
pub fn determinant(m: &IntMatrix) -> BigInt {
    let n = m.dim;
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<BigInt> = m.entries.clone();
    let mut sign = 1i64;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            match (k + 1..n).find(|&r| !a[r * n + k].is_zero()) {
                Some(r) => {
                    for j in 0..n {
                        a.swap(k * n + j, r * n + j);
                    }
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                a[i * n + j] = num / &prev; // exact by Bareiss
            }
            a[i * n + k] = BigInt::zero();
        }
        prev = a[k * n + k].clone();
    }
    let det = a[(n - 1) * n + (n - 1)].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Cokernel presentation of an integer matrix: the group order together
/// with the invariant factors `d_1 | d_2 | ...` (entries equal to 1 are
/// dropped).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupStructure {
    pub order: BigInt,
    pub invariant_factors: Vec<BigInt>,
}

impl std::fmt::Display for GroupStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "order {}", self.order)?;
        if self.invariant_factors.is_empty() {
            write!(f, " (trivial)")
        } else {
            let parts: Vec<String> = self
                .invariant_factors
                .iter()
                .map(|d| format!("Z/{}", d))
                .collect();
            write!(f, " = {}", parts.join(" x "))
        }
    }
}

/// Smith normal form via repeated gcd row/column reduction with a
/// smallest-pivot rule.
pub fn smith_normal_form(m: &IntMatrix) -> Result<GroupStructure, AlgebraError> {
    let det = determinant(m);
    if det.is_zero() {
        return Err(AlgebraError::Singular);
    }
    let n = m.dim;
    let mut a: Vec<BigInt> = m.entries.clone();
    let at = |a: &Vec<BigInt>, i: usize, j: usize| a[i * n + j].clone();

    for k in 0..n {
        'pivot: loop {
            // Smallest nonzero entry of the trailing block becomes the pivot.
            let mut best: Option<(usize, usize)> = None;
            for i in k..n {
                for j in k..n {
                    if !a[i * n + j].is_zero()
                        && best
                            .map(|(bi, bj)| a[i * n + j].abs() < at(&a, bi, bj).abs())
                            .unwrap_or(true)
                    {
                        best = Some((i, j));
                    }
                }
            }
            let (pi, pj) = best.expect("nonsingular matrix has a pivot");
            if pi != k {
                for j in 0..n {
                    a.swap(k * n + j, pi * n + j);
                }
            }
            if pj != k {
                for i in 0..n {
                    a.swap(i * n + k, i * n + pj);
                }
            }
            if a[k * n + k].is_negative() {
                for j in 0..n {
                    let v = -at(&a, k, j);
                    a[k * n + j] = v;
                }
            }
            let mut clean = true;
            let pivot = at(&a, k, k);
            for i in k + 1..n {
                if !a[i * n + k].is_zero() {
                    let q = at(&a, i, k) / &pivot;
                    for j in 0..n {
                        let v = at(&a, i, j) - &q * at(&a, k, j);
                        a[i * n + j] = v;
                    }
                    if !a[i * n + k].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in k + 1..n {
                if !a[k * n + j].is_zero() {
                    let q = at(&a, k, j) / &pivot;
                    for i in 0..n {
                        let v = at(&a, i, j) - &q * at(&a, i, k);
                        a[i * n + j] = v;
                    }
                    if !a[k * n + j].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue 'pivot;
            }
            // Divisibility normalization: the pivot must divide everything
            // in the trailing block.
            for i in k + 1..n {
                for j in k + 1..n {
                    if !(at(&a, i, j) % &pivot).is_zero() {
                        for jj in 0..n {
                            let v = at(&a, k, jj) + at(&a, i, jj);
                            a[k * n + jj] = v;
                        }
                        continue 'pivot;
                    }
                }
            }
            break;
        }
    }

    let mut factors: Vec<BigInt> = (0..n).map(|k| at(&a, k, k).abs()).collect();
    factors.sort();
    let order: BigInt = factors.iter().product();
    debug_assert_eq!(order, det.abs());
    factors.retain(|d| *d > BigInt::one());
    Ok(GroupStructure {
        order,
        invariant_factors: factors,
    })
}

/// Exact solution of `M x = b` by rational Gaussian elimination.
pub fn solve_rational(m: &IntMatrix, b: &[Rational]) -> Result<Vec<Rational>, AlgebraError> {
    let n = m.dim;
    if b.len() != n {
        return Err(AlgebraError::Dimension(format!(
            "matrix dim {} vs rhs len {}",
            n,
            b.len()
        )));
    }
    let mut a: Vec<Rational> = m
        .entries
        .iter()
        .map(|e| Rational::from_integer(e.clone()))
        .collect();
    let mut rhs: Vec<Rational> = b.to_vec();
    for k in 0..n {
        let pivot_row = (k..n).find(|&r| !a[r * n + k].is_zero());
        let r = pivot_row.ok_or(AlgebraError::Singular)?;
        if r != k {
            for j in 0..n {
                a.swap(k * n + j, r * n + j);
            }
            rhs.swap(k, r);
        }
        let pivot = a[k * n + k].clone();
        for i in k + 1..n {
            if a[i * n + k].is_zero() {
                continue;
            }
            let f = &a[i * n + k] / &pivot;
            for j in k..n {
                let v = &a[i * n + j] - &f * &a[k * n + j];
                a[i * n + j] = v;
            }
            let v = &rhs[i] - &f * &rhs[k];
            rhs[i] = v;
        }
    }
    let mut x = vec![Rational::zero(); n];
    for k in (0..n).rev() {
        let mut acc = rhs[k].clone();
        for j in k + 1..n {
            acc -= &a[k * n + j] * &x[j];
        }
        x[k] = acc / &a[k * n + k];
    }
    Ok(x)
}

/// Exact cutoff for effective resistance; above this a floating solve with
/// a residual margin is used instead.
const RESISTANCE_EXACT_LIMIT: usize = 400;

/// Effective resistance between `v` and the sink of a bidirected graph with
/// sink, with unit conductance per undirected edge.
pub fn effective_resistance(g: &Digraph, v: usize) -> Result<Rational, AlgebraError> {
    if !g.is_bidirected_with_sink() {
        return Err(AlgebraError::Graph(GraphError::NotBidirected));
    }
    let lap = crate::graph::reduced_laplacian(g)?;
    let row = lap
        .labels()
        .iter()
        .position(|&l| l == v)
        .ok_or_else(|| AlgebraError::Dimension(format!("vertex {} is the sink", v)))?;
    if lap.dim() <= RESISTANCE_EXACT_LIMIT {
        let den = determinant(&lap);
        if den.is_zero() {
            return Err(AlgebraError::Singular);
        }
        let num = determinant(&lap.minor(row));
        Ok(Rational::new(num, den))
    } else {
        let diag = grounded_inverse_diagonal_f64(&lap)?;
        Ok(float_to_rational_upper(diag[row]))
    }
}

/// Maximum effective resistance between any vertex and the sink.
pub fn max_effective_resistance(g: &Digraph) -> Result<Rational, AlgebraError> {
    if !g.is_bidirected_with_sink() {
        return Err(AlgebraError::Graph(GraphError::NotBidirected));
    }
    let lap = crate::graph::reduced_laplacian(g)?;
    if lap.dim() == 0 {
        return Ok(Rational::zero());
    }
    if lap.dim() <= RESISTANCE_EXACT_LIMIT {
        let den = determinant(&lap);
        if den.is_zero() {
            return Err(AlgebraError::Singular);
        }
        let mut best = Rational::zero();
        for row in 0..lap.dim() {
            let r = Rational::new(determinant(&lap.minor(row)), den.clone());
            if r > best {
                best = r;
            }
        }
        Ok(best)
    } else {
        let diag = grounded_inverse_diagonal_f64(&lap)?;
        let max = diag.iter().cloned().fold(0.0f64, f64::max);
        Ok(float_to_rational_upper(max))
    }
}

/// Diagonal of the inverse grounded Laplacian by one LU factorization and
/// per-column back-substitution; each entry carries its residual added on
/// top, so the result is only used as an upper bound.
fn grounded_inverse_diagonal_f64(lap: &IntMatrix) -> Result<Vec<f64>, AlgebraError> {
    let n = lap.dim();
    let to_f = |b: &BigInt| -> f64 {
        // Laplacian entries are small; this conversion is exact.
        let s = b.to_string();
        s.parse::<f64>().unwrap()
    };
    let mut a = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = to_f(lap.get(i, j));
        }
    }
    let orig = a.clone();
    // LU with partial pivoting.
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (r, pv) = (k..n)
            .map(|r| (r, a[r * n + k].abs()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pv == 0.0 {
            return Err(AlgebraError::Singular);
        }
        if r != k {
            for j in 0..n {
                a.swap(k * n + j, r * n + j);
            }
            perm.swap(k, r);
        }
        for i in k + 1..n {
            let f = a[i * n + k] / a[k * n + k];
            a[i * n + k] = f;
            for j in k + 1..n {
                a[i * n + j] -= f * a[k * n + j];
            }
        }
    }
    let mut diag = vec![0.0f64; n];
    let mut y = vec![0.0f64; n];
    let mut x = vec![0.0f64; n];
    for col in 0..n {
        for i in 0..n {
            let mut v = if perm[i] == col { 1.0 } else { 0.0 };
            for j in 0..i {
                v -= a[i * n + j] * y[j];
            }
            y[i] = v;
        }
        for i in (0..n).rev() {
            let mut v = y[i];
            for j in i + 1..n {
                v -= a[i * n + j] * x[j];
            }
            x[i] = v / a[i * n + i];
        }
        let mut residual = 0.0f64;
        for i in 0..n {
            let mut v = if i == col { -1.0 } else { 0.0 };
            for j in 0..n {
                v += orig[i * n + j] * x[j];
            }
            residual += v.abs();
        }
        diag[col] = x[col] + residual + 1e-9;
    }
    Ok(diag)
}

fn float_to_rational_upper(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{self, Family};

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn determinant_of_reduced_laplacian() {
        let m = IntMatrix::from_i64(&[&[2, -1], &[-1, 2]]);
        assert_eq!(determinant(&m), BigInt::from(3));
    }

    #[test]
    fn determinant_one_by_one() {
        let m = IntMatrix::from_i64(&[&[7]]);
        assert_eq!(determinant(&m), BigInt::from(7));
    }

    #[test]
    fn determinant_zero_for_unreachable_sink() {
        // Two vertices pointing at each other, sink elsewhere unreachable.
        let g = crate::graph::Digraph::new(3, &[(0, 1), (1, 0)], Some(2)).unwrap();
        let lap = graph::reduced_laplacian(&g).unwrap();
        assert_eq!(determinant(&lap), BigInt::zero());
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let vals: Vec<i64> = (0..16).map(|_| rng.gen_range(-5..=5)).collect();
            let rows: Vec<&[i64]> = vals.chunks(4).collect();
            let m = IntMatrix::from_i64(&rows);
            assert_eq!(determinant(&m), cofactor_det(&m));
        }
    }

    fn cofactor_det(m: &IntMatrix) -> BigInt {
        let n = m.dim();
        if n == 1 {
            return m.get(0, 0).clone();
        }
        let mut acc = BigInt::zero();
        for j in 0..n {
            if m.get(0, j).is_zero() {
                continue;
            }
            // minor of row 0, column j
            let mut entries = Vec::new();
            let mut labels = Vec::new();
            for i in 1..n {
                labels.push(i);
                for jj in 0..n {
                    if jj != j {
                        entries.push(m.get(i, jj).clone());
                    }
                }
            }
            let sub = IntMatrix::new(n - 1, entries, labels);
            let term = m.get(0, j) * cofactor_det(&sub);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    #[test]
    fn snf_zero_figure() {
        let m = IntMatrix::from_i64(&[&[2, -1], &[-1, 2]]);
        let s = smith_normal_form(&m).unwrap();
        assert_eq!(s.order, BigInt::from(3));
        assert_eq!(s.invariant_factors, vec![BigInt::from(3)]);
    }

    #[test]
    fn snf_identity() {
        let s = smith_normal_form(&IntMatrix::identity(3)).unwrap();
        assert_eq!(s.order, BigInt::one());
        assert!(s.invariant_factors.is_empty());
    }

    #[test]
    fn snf_singular_errors() {
        let m = IntMatrix::from_i64(&[&[1, 1], &[1, 1]]);
        assert!(matches!(smith_normal_form(&m), Err(AlgebraError::Singular)));
    }

    #[test]
    fn snf_consistent_with_determinant() {
        let g = graph::generate(&Family::GridWired(2));
        let lap = graph::reduced_laplacian(&g).unwrap();
        let det = determinant(&lap);
        let s = smith_normal_form(&lap).unwrap();
        assert_eq!(s.order, det.abs());
        let prod: BigInt = s.invariant_factors.iter().product();
        assert_eq!(prod, s.order);
    }

    #[test]
    fn solve_rational_hand_example() {
        let m = IntMatrix::from_i64(&[&[2, -1], &[-1, 2]]);
        let b = vec![rat(1, 1), rat(0, 1)];
        let x = solve_rational(&m, &b).unwrap();
        assert_eq!(x, vec![rat(2, 3), rat(1, 3)]);
    }

    #[test]
    fn solve_identity_and_singular() {
        let id = IntMatrix::identity(3);
        let b = vec![rat(5, 2), rat(-1, 3), rat(0, 1)];
        assert_eq!(solve_rational(&id, &b).unwrap(), b);
        let m = IntMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert!(matches!(
            solve_rational(&m, &[rat(1, 1), rat(1, 1)]),
            Err(AlgebraError::Singular)
        ));
    }

    #[test]
    fn solve_substitutes_back_exactly() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let vals: Vec<i64> = (0..9).map(|_| rng.gen_range(-4..=4)).collect();
            let rows: Vec<&[i64]> = vals.chunks(3).collect();
            let m = IntMatrix::from_i64(&rows);
            if determinant(&m).is_zero() {
                continue;
            }
            let b: Vec<Rational> = (0..3).map(|_| rat(rng.gen_range(-9..=9), 1)).collect();
            let x = solve_rational(&m, &b).unwrap();
            for i in 0..3 {
                let mut acc = Rational::zero();
                for j in 0..3 {
                    acc += Rational::from_integer(m.get(i, j).clone()) * &x[j];
                }
                assert_eq!(acc, b[i]);
            }
        }
    }

    #[test]
    fn resistance_single_edge() {
        let g = graph::generate(&Family::PathBidirected(2));
        assert_eq!(effective_resistance(&g, 0).unwrap(), rat(1, 1));
    }

    #[test]
    fn resistance_parallel_edges() {
        // two undirected edges v -- s
        let g = graph::Digraph::new(2, &[(0, 1), (0, 1)], Some(1)).unwrap();
        assert_eq!(effective_resistance(&g, 0).unwrap(), rat(1, 2));
    }

    #[test]
    fn resistance_series_path() {
        let g = graph::generate(&Family::PathBidirected(3));
        assert_eq!(effective_resistance(&g, 0).unwrap(), rat(2, 1));
        assert_eq!(effective_resistance(&g, 1).unwrap(), rat(1, 1));
        assert_eq!(max_effective_resistance(&g).unwrap(), rat(2, 1));
    }

    #[test]
    fn resistance_rejects_directed() {
        let g = graph::generate(&Family::DirectedTorus(3));
        assert!(effective_resistance(&g, 1).is_err());
    }
}

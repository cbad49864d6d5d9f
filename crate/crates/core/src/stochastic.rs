//! Validated row-stochastic matrices and the semi-norm that measures their
//! distance from consensus.
//!
//! The vector semi-norm of `x` is its sup-norm distance to the line of
//! constant vectors, `(max x - min x) / 2`. On stochastic matrices the
//! induced operator semi-norm has the closed form of the coefficient of
//! ergodicity, `delta(A) = max_{i,i'} sum_j |A[i][j] - A[i'][j]| / 2`.

use crate::digraph::{check_permutation, Digraph};
use crate::error::{Error, Result};

/// Row sums must be within this distance of 1 at validation.
pub const DEFAULT_TOL_ROW: f64 = 1e-9;
/// Entries in `[-DEFAULT_TOL_NEG, 0)` are clamped to zero.
pub const DEFAULT_TOL_NEG: f64 = 1e-12;
/// Entries strictly above this count as positive.
pub const DEFAULT_TOL_POS: f64 = 0.0;

/// Numerical tolerances for reading matrices and deciding positivity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub row: f64,
    pub neg: f64,
    pub pos: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            row: DEFAULT_TOL_ROW,
            neg: DEFAULT_TOL_NEG,
            pos: DEFAULT_TOL_POS,
        }
    }
}

impl Tolerances {
    pub fn check(&self) -> Result<()> {
        for t in [self.row, self.neg, self.pos] {
            if !t.is_finite() || t < 0.0 {
                return Err(Error::InvalidTolerance(t));
            }
        }
        Ok(())
    }
}

/// Dense `n x n` matrix with non-negative entries and unit row sums.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticMatrix {
    n: usize,
    data: Vec<f64>,
}

impl StochasticMatrix {
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Ok(Self { n, data })
    }

    /// Every entry `1/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self {
            n,
            data: vec![1.0 / n as f64; n * n],
        })
    }

    /// Permutation matrix with row `i` supported on column `perm[i]`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        check_permutation(perm, n)?;
        let mut data = vec![0.0; n * n];
        for (i, &p) in perm.iter().enumerate() {
            data[i * n + p] = 1.0;
        }
        Ok(Self { n, data })
    }

    /// Validates rows with the default tolerances.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        validate_stochastic(rows, DEFAULT_TOL_ROW, DEFAULT_TOL_NEG)
    }

    /// Validates a row-major buffer of `n * n` entries.
    pub fn from_row_major(n: usize, data: Vec<f64>, tol_row: f64, tol_neg: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        let mut m = Self { n, data };
        m.clean(tol_row, tol_neg)?;
        Ok(m)
    }

    fn clean(&mut self, tol_row: f64, tol_neg: f64) -> Result<()> {
        let n = self.n;
        for (idx, v) in self.data.iter_mut().enumerate() {
            let (row, col) = (idx / n, idx % n);
            if !v.is_finite() {
                return Err(Error::NonFinite { row, col });
            }
            if *v < 0.0 {
                if *v < -tol_neg {
                    return Err(Error::NegativeEntry { row, col, value: *v });
                }
                *v = 0.0;
            }
        }
        for row in 0..n {
            let r = &mut self.data[row * n..(row + 1) * n];
            let sum: f64 = r.iter().sum();
            if sum.is_nan() || (sum - 1.0).abs() > tol_row {
                return Err(Error::RowSum {
                    row,
                    sum,
                    tol: tol_row,
                });
            }
            // Rows already stochastic up to summation rounding are kept
            // as given, so re-validating rendered output is the identity.
            if (sum - 1.0).abs() > 4.0 * n as f64 * f64::EPSILON {
                r.iter_mut().for_each(|v| *v /= sum);
            }
        }
        Ok(())
    }

    /// Rescales rows of a product that is stochastic in exact arithmetic.
    fn renormalized(n: usize, mut data: Vec<f64>) -> Self {
        for r in data.chunks_mut(n) {
            let sum: f64 = r.iter().sum();
            debug_assert!((sum - 1.0).abs() <= DEFAULT_TOL_ROW, "row sum drifted to {sum}");
            if sum != 1.0 && sum > 0.0 {
                r.iter_mut().for_each(|v| *v /= sum);
            }
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.n && j < self.n, "index out of range");
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n)
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    fn check_same_n(&self, found: usize) -> Result<()> {
        if self.n == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.n,
                found,
            })
        }
    }

    /// `self * rhs`.
    pub fn multiply(&self, rhs: &StochasticMatrix) -> Result<StochasticMatrix> {
        self.check_same_n(rhs.n)?;
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            let dst = &mut out[i * n..(i + 1) * n];
            for (m, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (d, &b) in dst.iter_mut().zip(rhs.row(m)) {
                    *d += a * b;
                }
            }
        }
        Ok(Self::renormalized(n, out))
    }

    /// `self` raised to `exp` by repeated squaring.
    pub fn pow(&self, mut exp: u128) -> StochasticMatrix {
        let mut result = Self::identity(self.n).expect("n >= 1");
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                result = base.multiply(&result).expect("same dimension");
            }
            exp >>= 1;
            if exp > 0 {
                base = base.multiply(&base).expect("same dimension");
            }
        }
        result
    }

    /// `A x`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_same_n(x.len())?;
        Ok(self
            .rows()
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `G(A)`: edge `(i, j)` iff `A[i][j] > tol_pos`.
    pub fn digraph(&self, tol_pos: f64) -> Digraph {
        Digraph::from_fn(self.n, |i, j| self.data[i * self.n + j] > tol_pos).expect("n >= 1")
    }

    pub fn min_positive_entry(&self, tol_pos: f64) -> Option<f64> {
        self.data
            .iter()
            .copied()
            .filter(|&v| v > tol_pos)
            .min_by(f64::total_cmp)
    }

    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_positive(&self, tol_pos: f64) -> bool {
        self.data.iter().all(|&v| v > tol_pos)
    }

    /// Coefficient of ergodicity; see [`matrix_seminorm`].
    pub fn seminorm(&self) -> f64 {
        let n = self.n;
        let mut best = 0.0f64;
        for i in 0..n {
            for k in i + 1..n {
                let l1: f64 = self
                    .row(i)
                    .iter()
                    .zip(self.row(k))
                    .map(|(a, b)| (a - b).abs())
                    .sum();
                best = best.max(l1);
            }
        }
        // Rounding can push a disjoint-support pair a hair above 2.
        (0.5 * best).min(1.0)
    }

    /// Largest spread `max_i P[i][j] - min_i P[i][j]` over columns.
    pub fn column_spread(&self) -> f64 {
        (0..self.n)
            .map(|j| {
                let col = (0..self.n).map(|i| self.data[i * self.n + j]);
                let (lo, hi) = col.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v), hi.max(v))
                });
                hi - lo
            })
            .fold(0.0, f64::max)
    }

    /// Column-wise midrange, the centre of the smallest sup-norm ball
    /// containing every row.
    pub fn midrange_row(&self) -> Vec<f64> {
        (0..self.n)
            .map(|j| {
                let col = (0..self.n).map(|i| self.data[i * self.n + j]);
                let (lo, hi) = col.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v), hi.max(v))
                });
                0.5 * (lo + hi)
            })
            .collect()
    }

    /// Relabels index `v` as `perm[v]`, i.e. `Q A Q^T` for the permutation
    /// matrix `Q`.
    pub fn relabel(&self, perm: &[usize]) -> Result<StochasticMatrix> {
        check_permutation(perm, self.n)?;
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[perm[i] * n + perm[j]] = self.data[i * n + j];
            }
        }
        Ok(Self { n, data })
    }
}

/// Checks shape, finiteness, sign and row sums of `raw`, clamping tiny
/// negatives to zero and rescaling each row to sum to 1.
pub fn validate_stochastic<R: AsRef<[f64]>>(
    raw: &[R],
    tol_row: f64,
    tol_neg: f64,
) -> Result<StochasticMatrix> {
    let n = raw.len();
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let mut data = Vec::with_capacity(n * n);
    for (row, r) in raw.iter().enumerate() {
        let r = r.as_ref();
        if r.len() != n {
            return Err(Error::NotSquare {
                row,
                len: r.len(),
                n,
            });
        }
        data.extend_from_slice(r);
    }
    StochasticMatrix::from_row_major(n, data, tol_row, tol_neg)
}

/// Smallest entry above `tol_pos` across all matrices.
pub fn min_positive_entry(matrices: &[StochasticMatrix], tol_pos: f64) -> Option<f64> {
    matrices
        .iter()
        .filter_map(|m| m.min_positive_entry(tol_pos))
        .min_by(f64::total_cmp)
}

/// Sup-norm distance from `x` to the constant vectors: half its spread.
pub fn vector_seminorm(x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::Empty("vector"));
    }
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    Ok(0.5 * (hi - lo))
}

/// Induced semi-norm `sup ||Ax|| / ||x||` of a stochastic matrix, via the
/// closed form `max_{i,i'} sum_j |A[i][j] - A[i'][j]| / 2`.
pub fn matrix_seminorm(a: &StochasticMatrix) -> f64 {
    a.seminorm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> StochasticMatrix {
        StochasticMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn validation_examples() {
        let id = m(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(id, StochasticMatrix::identity(2).unwrap());

        let err = StochasticMatrix::from_rows(&[[0.5, 0.6], [0.5, 0.5]]).unwrap_err();
        assert!(matches!(err, Error::RowSum { row: 0, .. }));

        let clamped = validate_stochastic(&[[1.0, -1e-12], [0.0, 1.0]], 1e-9, 1e-10).unwrap();
        assert_eq!(clamped, id);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            validate_stochastic(&[vec![1.0], vec![0.5, 0.5]], 1e-9, 0.0),
            Err(Error::NotSquare { row: 0, len: 1, n: 2 })
        ));
        assert!(matches!(
            validate_stochastic(&[[1.1, -0.1], [0.0, 1.0]], 1e-9, 1e-10),
            Err(Error::NegativeEntry { row: 0, col: 1, .. })
        ));
        assert!(matches!(
            validate_stochastic(&[[f64::NAN, 1.0], [0.0, 1.0]], 1e-9, 1e-10),
            Err(Error::NonFinite { row: 0, col: 0 })
        ));
        let empty: [[f64; 0]; 0] = [];
        assert_eq!(
            validate_stochastic(&empty, 1e-9, 0.0),
            Err(Error::InvalidDimension(0))
        );
    }

    #[test]
    fn rows_are_renormalized() {
        let a = validate_stochastic(&[[0.5, 0.5 + 1e-10], [0.0, 1.0]], 1e-9, 0.0).unwrap();
        let sum: f64 = a.row(0).iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn multiply_examples() {
        let a = m(&[&[0.25, 0.75], &[0.5, 0.5]]);
        let id = StochasticMatrix::identity(2).unwrap();
        assert_eq!(a.multiply(&id).unwrap(), a);
        let swap = StochasticMatrix::permutation(&[1, 0]).unwrap();
        assert_eq!(swap.multiply(&swap).unwrap(), id);
        let half = m(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert_eq!(half.multiply(&id).unwrap(), half);
        assert!(a.multiply(&StochasticMatrix::identity(3).unwrap()).is_err());
    }

    #[test]
    fn digraph_examples() {
        let id3 = StochasticMatrix::identity(3).unwrap();
        assert_eq!(
            id3.digraph(0.0),
            Digraph::from_edges(3, [(0, 0), (1, 1), (2, 2)]).unwrap()
        );
        assert_eq!(
            m(&[&[0.5, 0.5], &[0.5, 0.5]]).digraph(0.0),
            Digraph::complete(2).unwrap()
        );
        assert_eq!(
            StochasticMatrix::permutation(&[1, 0]).unwrap().digraph(0.0),
            Digraph::from_edges(2, [(0, 1), (1, 0)]).unwrap()
        );
        // configurable threshold
        let noisy = m(&[&[1.0 - 1e-9, 1e-9], &[0.0, 1.0]]);
        assert_eq!(noisy.digraph(1e-6).edge_count(), 2);
    }

    #[test]
    fn min_positive_entry_examples() {
        let id = StochasticMatrix::identity(2).unwrap();
        assert_eq!(min_positive_entry(&[id], 0.0), Some(1.0));
        let a = m(&[&[0.25, 0.75], &[0.5, 0.5]]);
        assert_eq!(min_positive_entry(&[a], 0.0), Some(0.25));
        let b = m(&[&[0.3, 0.7], &[1.0, 0.0]]);
        let c = m(&[&[0.2, 0.8], &[0.0, 1.0]]);
        assert_eq!(min_positive_entry(&[b, c], 0.0), Some(0.2));
        assert_eq!(min_positive_entry(&[], 0.0), None);
    }

    #[test]
    fn vector_seminorm_examples() {
        assert_eq!(vector_seminorm(&[1.0, 1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(vector_seminorm(&[0.0, 2.0]).unwrap(), 1.0);
        assert_eq!(vector_seminorm(&[-1.0, 0.0, 3.0]).unwrap(), 2.0);
        assert_eq!(vector_seminorm(&[]), Err(Error::Empty("vector")));
    }

    #[test]
    fn matrix_seminorm_examples() {
        assert_eq!(matrix_seminorm(&m(&[&[0.3, 0.7], &[0.3, 0.7]])), 0.0);
        assert_eq!(matrix_seminorm(&StochasticMatrix::identity(2).unwrap()), 1.0);
        let a = m(&[&[0.75, 0.25], &[0.25, 0.75]]);
        assert_eq!(matrix_seminorm(&a), 0.5);
        assert!(matrix_seminorm(&a) <= 1.0 - 2.0 * 0.25);
    }

    #[test]
    fn apply_examples() {
        let id = StochasticMatrix::identity(3).unwrap();
        assert_eq!(id.apply(&[1.0, -2.0, 5.0]).unwrap(), vec![1.0, -2.0, 5.0]);
        let rank1 = m(&[&[0.2, 0.8], &[0.2, 0.8]]);
        let y = rank1.apply(&[1.0, 2.0]).unwrap();
        assert_eq!(y[0], y[1]);
        assert!((y[0] - 1.8).abs() < 1e-15);
        let lazy = m(&[&[0.9, 0.1], &[0.1, 0.9]]);
        let y = lazy.apply(&[0.0, 1.0]).unwrap();
        assert!((y[0] - 0.1).abs() < 1e-15 && (y[1] - 0.9).abs() < 1e-15);
        assert!(lazy.apply(&[1.0]).is_err());
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let a = m(&[&[0.6, 0.4, 0.0], &[0.0, 0.5, 0.5], &[0.3, 0.0, 0.7]]);
        let mut direct = StochasticMatrix::identity(3).unwrap();
        for _ in 0..13 {
            direct = a.multiply(&direct).unwrap();
        }
        let fast = a.pow(13);
        for (x, y) in direct.as_slice().iter().zip(fast.as_slice()) {
            assert!((x - y).abs() < 1e-14);
        }
        assert_eq!(a.pow(0), StochasticMatrix::identity(3).unwrap());
    }

    #[test]
    fn relabel_moves_entries() {
        let a = m(&[&[0.6, 0.4, 0.0], &[0.0, 0.5, 0.5], &[0.3, 0.0, 0.7]]);
        let b = a.relabel(&[2, 0, 1]).unwrap();
        assert_eq!(b.get(2, 0), a.get(0, 1));
        assert_eq!(b.digraph(0.0), a.digraph(0.0).relabel(&[2, 0, 1]).unwrap());
    }

    #[test]
    fn spread_and_midrange() {
        let a = m(&[&[0.2, 0.8], &[0.6, 0.4]]);
        assert!((a.column_spread() - 0.4).abs() < 1e-15);
        let mid = a.midrange_row();
        assert!((mid[0] - 0.4).abs() < 1e-15 && (mid[1] - 0.6).abs() < 1e-15);
    }
}

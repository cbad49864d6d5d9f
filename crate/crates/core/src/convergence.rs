//! Backward products `P(k) = A(k) ... A(1)`, their column supports, and the
//! contraction certificate.
//!
//! Under the four hypotheses every entry of `P(k)` eventually stays above
//! `alpha^(n (W(n) + 1))`, where `W(n)` is the Wielandt bound. Once that
//! happens at index `K`, the semi-norm of `P(K)` is at most
//! `1 - n alpha^(n (W(n) + 1))`, and the same holds for every later block of
//! `K` factors, which gives a geometric envelope for `||P(k)||`.

use crate::digraph::wielandt_bound;
use crate::error::{Error, Result};
use crate::hypotheses::{self, AnalysisOptions, MatrixSequence};
use crate::stochastic::{self, StochasticMatrix};

/// Slack on inequalities that hold exactly in real arithmetic.
pub const EXACT_SLACK: f64 = 1e-12;
/// Slack on inequalities compounded over many factors.
pub const COMPOUND_SLACK: f64 = 1e-9;

/// `P(k)` together with its semi-norm.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductState {
    pub k: usize,
    pub product: StochasticMatrix,
    pub seminorm: f64,
}

impl ProductState {
    fn new(k: usize, product: StochasticMatrix) -> Self {
        let seminorm = product.seminorm();
        Self {
            k,
            product,
            seminorm,
        }
    }
}

/// Iterator over `P(0), P(1), ..., P(L)`, each new factor multiplied on the
/// left.
#[derive(Clone, Debug)]
pub struct BackwardProducts<'a> {
    seq: &'a MatrixSequence,
    next: Option<ProductState>,
}

impl Iterator for BackwardProducts<'_> {
    type Item = ProductState;

    fn next(&mut self) -> Option<ProductState> {
        let current = self.next.take()?;
        if current.k < self.seq.len() {
            let factor = &self.seq.as_slice()[current.k];
            let product = factor.multiply(&current.product).expect("shared dimension");
            self.next = Some(ProductState::new(current.k + 1, product));
        }
        Some(current)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self
            .next
            .as_ref()
            .map_or(0, |s| self.seq.len() - s.k + 1);
        (left, Some(left))
    }
}

impl ExactSizeIterator for BackwardProducts<'_> {}

pub fn backward_products(seq: &MatrixSequence) -> BackwardProducts<'_> {
    let identity = StochasticMatrix::identity(seq.n()).expect("n >= 1");
    BackwardProducts {
        seq,
        next: Some(ProductState::new(0, identity)),
    }
}

/// `P(k, l) = A(k) A(k-1) ... A(l+1)`; `P(k, k)` is the identity and
/// `P(k, 0) = P(k)`.
pub fn partial_product(seq: &MatrixSequence, l: usize, k: usize) -> Result<StochasticMatrix> {
    if l > k || k > seq.len() {
        return Err(Error::InvalidRange {
            l,
            k,
            len: seq.len(),
        });
    }
    let mut product = StochasticMatrix::identity(seq.n())?;
    for factor in &seq.as_slice()[l..k] {
        product = factor.multiply(&product)?;
    }
    Ok(product)
}

/// Support of one column of a product.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnSupport {
    /// Rows `i` with `P[i][j] > tol_pos`, ascending.
    pub rows: Vec<usize>,
    /// Smallest entry over `rows`.
    pub min_entry: Option<f64>,
}

impl ColumnSupport {
    pub fn contains(&self, i: usize) -> bool {
        self.rows.binary_search(&i).is_ok()
    }

    pub fn is_subset_of(&self, other: &ColumnSupport) -> bool {
        self.rows.iter().all(|&i| other.contains(i))
    }
}

/// Column supports `S_j` and their minima `mu_j` for a product.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportProfile {
    pub columns: Vec<ColumnSupport>,
}

impl SupportProfile {
    pub fn column(&self, j: usize) -> &ColumnSupport {
        &self.columns[j]
    }
}

pub fn support_profile(p: &StochasticMatrix, tol_pos: f64) -> SupportProfile {
    let n = p.n();
    let columns = (0..n)
        .map(|j| {
            let rows: Vec<usize> = (0..n).filter(|&i| p.get(i, j) > tol_pos).collect();
            let min_entry = rows.iter().map(|&i| p.get(i, j)).min_by(f64::total_cmp);
            ColumnSupport { rows, min_entry }
        })
        .collect();
    SupportProfile { columns }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveAlpha(alpha))
    }
}

/// The guaranteed lower bound `alpha^(n (W(n) + 1))` on every entry of a
/// saturated product.
pub fn entry_floor(alpha: f64, n: usize) -> Result<f64> {
    check_alpha(alpha)?;
    let exponent = n * (wielandt_bound(n)? + 1);
    let floor = match i32::try_from(exponent) {
        Ok(e) => alpha.powi(e),
        Err(_) => (exponent as f64 * alpha.ln()).exp(),
    };
    if !floor.is_normal() && alpha < 1.0 {
        return Err(Error::FloorUnderflow {
            log10: exponent as f64 * alpha.log10(),
        });
    }
    Ok(floor)
}

fn meets_floor(value: f64, floor: f64, tol_pos: f64) -> bool {
    value > tol_pos && value >= floor * (1.0 - EXACT_SLACK)
}

/// Least `K` in `1..=L` such that every entry of `P(K)` reaches the entry
/// floor, or `None` if the prefix never gets there.
pub fn find_saturation_index(
    seq: &MatrixSequence,
    alpha: f64,
    tol_pos: f64,
) -> Result<Option<usize>> {
    let floor = entry_floor(alpha, seq.n())?;
    Ok(backward_products(seq)
        .skip(1)
        .find(|s| s.product.as_slice().iter().all(|&v| meets_floor(v, floor, tol_pos)))
        .map(|s| s.k))
}

/// Geometric envelope for `||P(k)||`: the contraction factor applies once
/// per block of `saturation_index` factors.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceCertificate {
    pub n: usize,
    pub alpha: f64,
    /// `W(n) = n^2 - 2n + 2`.
    pub wielandt: usize,
    /// `K`: every entry of `P(K)` is at least `entry_floor`.
    pub saturation_index: usize,
    pub entry_floor: f64,
    /// `n * entry_floor`, i.e. `1 - contraction`. Kept separately because
    /// the contraction itself rounds to 1.0 for all but the smallest `n`.
    pub contraction_gap: f64,
    /// `||P(K)||` as computed.
    pub measured_seminorm: f64,
}

impl ConvergenceCertificate {
    pub fn contraction(&self) -> f64 {
        1.0 - self.contraction_gap
    }

    /// `ln(contraction)`, accurate even when the contraction rounds to 1.
    pub fn log_contraction(&self) -> f64 {
        (-self.contraction_gap).ln_1p()
    }

    /// Certified upper bound `contraction^floor(k / K)` on `||P(k)||`.
    pub fn envelope(&self, k: u128) -> f64 {
        let blocks = k / self.saturation_index as u128;
        if blocks == 0 {
            return 1.0;
        }
        (blocks as f64 * self.log_contraction()).exp()
    }

    /// Fewest blocks `m` with `contraction^m < target`, if finite.
    pub fn blocks_below(&self, target: f64) -> Option<u128> {
        if target.is_nan() || target <= 0.0 {
            return None;
        }
        if target > 1.0 {
            return Some(0);
        }
        let lc = self.log_contraction();
        if lc >= 0.0 {
            return None;
        }
        let m = (target.ln() / lc).floor() + 1.0;
        if m.is_finite() && m < u128::MAX as f64 {
            Some(m as u128)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CertifyOptions {
    pub analysis: AnalysisOptions,
    /// A lower bound to use instead of the realized smallest positive entry.
    pub alpha: Option<f64>,
}

/// Certifies geometric decay of `||P(k)||`.
///
/// Refuses when a condition that no longer prefix could repair fails
/// (conditions 1, 3 and 4). Returns `Ok(None)` when the hypotheses are not
/// contradicted but the prefix ends before the products saturate, which
/// includes eventual positivity not yet being reached.
pub fn contraction_certificate(
    seq: &MatrixSequence,
    opts: &CertifyOptions,
) -> Result<Option<ConvergenceCertificate>> {
    let report = hypotheses::analyze(seq, &opts.analysis)?;
    let structural: Vec<_> = report
        .verdict
        .violations()
        .iter()
        .filter(|v| !v.is_horizon_limited())
        .cloned()
        .collect();
    if !structural.is_empty() {
        return Err(Error::CertificationRefused {
            violations: structural,
        });
    }
    let actual = report.alpha.expect("condition 1 holds");
    let alpha = match opts.alpha {
        Some(a) => {
            check_alpha(a)?;
            if a > actual {
                return Err(Error::AlphaNotLowerBound { alpha: a, actual });
            }
            a
        }
        None => actual,
    };
    let n = seq.n();
    let tol_pos = opts.analysis.tol_pos;
    let Some(k) = find_saturation_index(seq, alpha, tol_pos)? else {
        return Ok(None);
    };
    let entry_floor = entry_floor(alpha, n)?;
    let contraction_gap = n as f64 * entry_floor;
    let measured = partial_product(seq, 0, k)?.seminorm();
    let contraction = 1.0 - contraction_gap;
    if measured > contraction + EXACT_SLACK {
        return Err(Error::CertificateCheck {
            measured,
            contraction,
        });
    }
    Ok(Some(ConvergenceCertificate {
        n,
        alpha,
        wielandt: wielandt_bound(n)?,
        saturation_index: k,
        entry_floor,
        contraction_gap,
        measured_seminorm: measured,
    }))
}

/// Per-column check of the support-growth induction behind the entry
/// floor: with rows sorted by the first index `k_m` at which they enter the
/// support, `mu_j(k_m) >= alpha^((m - 1)(W(n) + 1))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnInduction {
    pub column: usize,
    /// First `k` with row `i` in the support of column `j`, per row.
    pub first_support: Vec<Option<usize>>,
    /// `(row, k_m, mu_j(k_m), bound)` in support-entry order.
    pub steps: Vec<(usize, usize, f64, f64)>,
    pub holds: bool,
}

pub fn support_induction(
    seq: &MatrixSequence,
    alpha: f64,
    tol_pos: f64,
) -> Result<Vec<ColumnInduction>> {
    check_alpha(alpha)?;
    let n = seq.n();
    let w = wielandt_bound(n)?;
    let profiles: Vec<SupportProfile> = backward_products(seq)
        .map(|s| support_profile(&s.product, tol_pos))
        .collect();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let first_support: Vec<Option<usize>> = (0..n)
            .map(|i| profiles.iter().position(|p| p.column(j).contains(i)))
            .collect();
        let mut order: Vec<(usize, usize)> = first_support
            .iter()
            .enumerate()
            .filter_map(|(i, k)| k.map(|k| (k, i)))
            .collect();
        order.sort_unstable();
        let mut holds = true;
        let steps = order
            .iter()
            .enumerate()
            .map(|(m, &(k, i))| {
                let mu = profiles[k].column(j).min_entry.unwrap_or(0.0);
                let bound = alpha.powf((m * (w + 1)) as f64);
                holds &= mu >= bound * (1.0 - EXACT_SLACK);
                (i, k, mu, bound)
            })
            .collect();
        out.push(ColumnInduction {
            column: j,
            first_support,
            steps,
            holds,
        });
    }
    Ok(out)
}

/// Result of running products until the semi-norm drops to a target.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    /// First `k` with `||P(k)|| <= epsilon`.
    pub reached: Option<usize>,
    /// `P(k*)` on success, otherwise the last product of the prefix.
    pub state: ProductState,
    /// Column midrange of `P(k*)`, within `epsilon` of every row in the
    /// sup norm.
    pub consensus_row: Option<Vec<f64>>,
}

pub fn run_to_tolerance(seq: &MatrixSequence, epsilon: f64) -> Result<RunOutcome> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let mut last = None;
    for state in backward_products(seq) {
        if state.seminorm <= epsilon {
            let consensus_row = Some(state.product.midrange_row());
            return Ok(RunOutcome {
                reached: Some(state.k),
                state,
                consensus_row,
            });
        }
        last = Some(state);
    }
    Ok(RunOutcome {
        reached: None,
        state: last.expect("at least P(0)"),
        consensus_row: None,
    })
}

/// `||P(k)||` for `k = 0..=L`.
pub fn seminorm_trajectory(seq: &MatrixSequence) -> Vec<f64> {
    backward_products(seq).map(|s| s.seminorm).collect()
}

/// `||P(k) x0||` for `k = 0..=L`, iterating `x(k) = A(k) x(k-1)`.
pub fn disagreement_trajectory(seq: &MatrixSequence, x0: &[f64]) -> Result<Vec<f64>> {
    if x0.len() != seq.n() {
        return Err(Error::DimensionMismatch {
            expected: seq.n(),
            found: x0.len(),
        });
    }
    let mut x = x0.to_vec();
    let mut out = Vec::with_capacity(seq.len() + 1);
    out.push(stochastic::vector_seminorm(&x)?);
    for a in seq {
        x = a.apply(&x)?;
        out.push(stochastic::vector_seminorm(&x)?);
    }
    Ok(out)
}

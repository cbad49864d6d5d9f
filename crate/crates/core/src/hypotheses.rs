//! Checks of the four conditions under which backward products of a
//! sequence of stochastic matrices converge to a rank-one limit:
//!
//! 1. positive entries are bounded below (reported as the realized `alpha`),
//! 2. eventual positivity of the running sum of partial products,
//! 3. every factor is completely reducible,
//! 4. an aperiodic, sink-free core digraph is contained in every factor's
//!    digraph.
//!
//! Only a finite prefix is ever seen, so condition 2 is decided within the
//! supplied horizon.

use std::fmt;

use crate::digraph::{self, Digraph};
use crate::error::{Error, Result};
use crate::stochastic::{self, StochasticMatrix};

/// The factors `A(1), ..., A(L)` of a backward product, all `n x n`.
///
/// Factor indices are 1-based throughout this crate's sequence API.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSequence {
    n: usize,
    items: Vec<StochasticMatrix>,
}

impl MatrixSequence {
    pub fn new(items: Vec<StochasticMatrix>) -> Result<Self> {
        let n = items.first().ok_or(Error::NoMatrices)?.n();
        for (record, m) in items.iter().enumerate() {
            if m.n() != n {
                return Err(Error::Record {
                    record,
                    source: Box::new(Error::DimensionMismatch {
                        expected: n,
                        found: m.n(),
                    }),
                });
            }
        }
        Ok(Self { n, items })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// `A(k)` for `1 <= k <= len()`.
    pub fn factor(&self, k: usize) -> Result<&StochasticMatrix> {
        if k == 0 || k > self.items.len() {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: self.items.len(),
            });
        }
        Ok(&self.items[k - 1])
    }

    pub fn as_slice(&self) -> &[StochasticMatrix] {
        &self.items
    }

    pub fn iter(&self) -> std::slice::Iter<'_, StochasticMatrix> {
        self.items.iter()
    }

    pub fn digraphs(&self, tol_pos: f64) -> Vec<Digraph> {
        self.items.iter().map(|m| m.digraph(tol_pos)).collect()
    }

    /// The same sequence with every factor relabelled by `perm`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let items = self
            .items
            .iter()
            .map(|m| m.relabel(perm))
            .collect::<Result<_>>()?;
        Ok(Self { n: self.n, items })
    }

    pub fn into_inner(self) -> Vec<StochasticMatrix> {
        self.items
    }
}

impl<'a> IntoIterator for &'a MatrixSequence {
    type Item = &'a StochasticMatrix;
    type IntoIter = std::slice::Iter<'a, StochasticMatrix>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

/// Complete reducibility of each factor's digraph, index `k - 1` for `A(k)`.
pub fn check_complete_reducibility(seq: &MatrixSequence, tol_pos: f64) -> Vec<bool> {
    seq.iter()
        .map(|m| digraph::is_completely_reducible_pattern(&m.digraph(tol_pos)))
        .collect()
}

/// Outcome of the core search on the common subgraph of all factors.
#[derive(Clone, Debug, PartialEq)]
pub struct CoreSearch {
    /// Intersection of every factor's digraph.
    pub intersection: Digraph,
    /// Period of each node's component in the intersection (0 = no cycle).
    pub node_periods: Vec<usize>,
    /// The intersection restricted to intra-component edges, when every
    /// node sits in a component of period 1.
    pub core: Option<Digraph>,
    /// Nodes whose component has period other than 1.
    pub offending_nodes: Vec<usize>,
}

/// Searches for an aperiodic core contained in every graph.
///
/// Every cycle of a common subgraph lies inside one component of the
/// intersection, so its length is a multiple of that component's period.
/// A core therefore exists exactly when every component of the
/// intersection has period 1, and the intra-component part of the
/// intersection is then the largest one.
pub fn aperiodic_core_of(graphs: &[Digraph]) -> Result<CoreSearch> {
    let common = digraph::intersection(graphs)?;
    let info = digraph::aperiodicity(&common);
    let n = common.n();
    let node_periods: Vec<usize> = (0..n).map(|v| info.node_period(v)).collect();
    let offending_nodes: Vec<usize> = (0..n).filter(|&v| node_periods[v] != 1).collect();
    let core = if offending_nodes.is_empty() {
        let part = &info.partition;
        Some(Digraph::from_edges(
            n,
            common
                .edges()
                .filter(|&(i, j)| part.component_of(i) == part.component_of(j)),
        )?)
    } else {
        None
    };
    Ok(CoreSearch {
        intersection: common,
        node_periods,
        core,
        offending_nodes,
    })
}

pub fn find_aperiodic_core(seq: &MatrixSequence, tol_pos: f64) -> CoreSearch {
    aperiodic_core_of(&seq.digraphs(tol_pos)).expect("sequence is non-empty with shared n")
}

/// Least `K >= k` such that `sum_{k'=k}^{K} A(k') ... A(k)` is entrywise
/// above `tol_pos`, or `None` if the prefix ends first.
pub fn check_eventual_positivity(
    seq: &MatrixSequence,
    k: usize,
    tol_pos: f64,
) -> Result<Option<usize>> {
    let mut term = seq.factor(k)?.clone();
    let mut sum = term.as_slice().to_vec();
    if sum.iter().all(|&v| v > tol_pos) {
        return Ok(Some(k));
    }
    for kk in k + 1..=seq.len() {
        term = seq.factor(kk)?.multiply(&term)?;
        for (s, &t) in sum.iter_mut().zip(term.as_slice()) {
            *s += t;
        }
        if sum.iter().all(|&v| v > tol_pos) {
            return Ok(Some(kk));
        }
    }
    Ok(None)
}

/// Boolean form of [`check_eventual_positivity`]: unions the digraphs of
/// the partial products instead of summing the matrices.
pub fn eventual_positivity_pattern(
    seq: &MatrixSequence,
    k: usize,
    tol_pos: f64,
) -> Result<Option<usize>> {
    let mut term = seq.factor(k)?.digraph(tol_pos);
    let mut union = term.clone();
    for kk in k..=seq.len() {
        if kk > k {
            term = seq.factor(kk)?.digraph(tol_pos).compose(&term)?;
            union = union.union(&term)?;
        }
        if union.is_complete() {
            return Ok(Some(kk));
        }
    }
    Ok(None)
}

/// Start indices at which condition 2 is checked.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum PositivityStarts {
    /// Only `k = 1`.
    #[default]
    First,
    /// Every `k` in `1..=L`.
    All,
    Indices(Vec<usize>),
}

impl PositivityStarts {
    fn resolve(&self, len: usize) -> Vec<usize> {
        match self {
            Self::First => vec![1],
            Self::All => (1..=len).collect(),
            Self::Indices(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AnalysisOptions {
    pub tol_pos: f64,
    pub starts: PositivityStarts,
}

/// A failed condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Condition 1: no entry above the positivity threshold at all.
    NoPositiveEntries,
    /// Condition 2, within the supplied horizon.
    NotEventuallyPositive { starts: Vec<usize> },
    /// Condition 3.
    NotCompletelyReducible { indices: Vec<usize> },
    /// Condition 4.
    NoAperiodicCore { offending_nodes: Vec<usize> },
}

impl Violation {
    pub fn condition(&self) -> u8 {
        match self {
            Self::NoPositiveEntries => 1,
            Self::NotEventuallyPositive { .. } => 2,
            Self::NotCompletelyReducible { .. } => 3,
            Self::NoAperiodicCore { .. } => 4,
        }
    }

    /// Short machine-readable tag.
    pub fn tag(&self) -> &'static str {
        match self {
            Self::NoPositiveEntries => "no-positive-entries",
            Self::NotEventuallyPositive { .. } => "not-eventually-positive-within-horizon",
            Self::NotCompletelyReducible { .. } => "not-completely-reducible",
            Self::NoAperiodicCore { .. } => "no-aperiodic-core",
        }
    }

    /// Whether a longer prefix could remove the violation.
    pub fn is_horizon_limited(&self) -> bool {
        matches!(self, Self::NotEventuallyPositive { .. })
    }
}

fn join_indices(v: &[usize]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition {} {}", self.condition(), self.tag())?;
        match self {
            Self::NoPositiveEntries => Ok(()),
            Self::NotEventuallyPositive { starts } => {
                write!(f, " starts={}", join_indices(starts))
            }
            Self::NotCompletelyReducible { indices } => {
                write!(f, " indices={}", join_indices(indices))
            }
            Self::NoAperiodicCore { offending_nodes } => {
                let nodes: Vec<usize> = offending_nodes.iter().map(|v| v + 1).collect();
                write!(f, " nodes={}", join_indices(&nodes))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    AllConditionsHold,
    ConditionsViolated(Vec<Violation>),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Self::AllConditionsHold)
    }

    pub fn violations(&self) -> &[Violation] {
        match self {
            Self::AllConditionsHold => &[],
            Self::ConditionsViolated(v) => v,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisReport {
    pub n: usize,
    pub len: usize,
    /// Smallest positive entry over the sequence (condition 1).
    pub alpha: Option<f64>,
    /// 1-based indices of factors that are not completely reducible.
    pub reducibility_failures: Vec<usize>,
    pub core: CoreSearch,
    /// `(k, least K)` for each checked start.
    pub eventual_positivity: Vec<(usize, Option<usize>)>,
    pub verdict: Verdict,
}

/// Runs all four checks.
pub fn analyze(seq: &MatrixSequence, opts: &AnalysisOptions) -> Result<HypothesisReport> {
    let tol_pos = opts.tol_pos;
    let alpha = stochastic::min_positive_entry(seq.as_slice(), tol_pos);
    let reducibility_failures: Vec<usize> = check_complete_reducibility(seq, tol_pos)
        .into_iter()
        .enumerate()
        .filter(|(_, ok)| !ok)
        .map(|(i, _)| i + 1)
        .collect();
    let core = find_aperiodic_core(seq, tol_pos);
    let eventual_positivity = opts
        .starts
        .resolve(seq.len())
        .into_iter()
        .map(|k| Ok((k, check_eventual_positivity(seq, k, tol_pos)?)))
        .collect::<Result<Vec<_>>>()?;

    let mut violations = Vec::new();
    if alpha.is_none() {
        violations.push(Violation::NoPositiveEntries);
    }
    let unmet: Vec<usize> = eventual_positivity
        .iter()
        .filter(|(_, big_k)| big_k.is_none())
        .map(|&(k, _)| k)
        .collect();
    if !unmet.is_empty() {
        violations.push(Violation::NotEventuallyPositive { starts: unmet });
    }
    if !reducibility_failures.is_empty() {
        violations.push(Violation::NotCompletelyReducible {
            indices: reducibility_failures.clone(),
        });
    }
    if core.core.is_none() {
        violations.push(Violation::NoAperiodicCore {
            offending_nodes: core.offending_nodes.clone(),
        });
    }
    let verdict = if violations.is_empty() {
        Verdict::AllConditionsHold
    } else {
        Verdict::ConditionsViolated(violations)
    };
    Ok(HypothesisReport {
        n: seq.n(),
        len: seq.len(),
        alpha,
        reducibility_failures,
        core,
        eventual_positivity,
        verdict,
    })
}

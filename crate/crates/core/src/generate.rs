//! Deterministic sequence generators for the regimes the analysis
//! distinguishes.
//!
//! - `positive-diagonal`: every factor has all self-loops and a random
//!   completely reducible pattern; odd-indexed factors are irreducible so
//!   the products mix.
//! - `cycle-core`: every factor contains the `n`-cycle `1 -> 2 -> ... -> n -> 1`
//!   plus the chord `n -> 2` (cycle lengths `n` and `n - 1`).
//! - `wolfowitz-set`: i.i.d. draws from a fixed finite set of primitive
//!   matrices whose products are all ergodic.
//! - `periodic-counterexample`: alternates two permutation matrices whose
//!   joint pattern is bipartite, hence 2-periodic.
//!
//! Generation depends only on the parameters, so equal seeds give
//! byte-identical files.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::digraph::{self, Digraph};
use crate::error::{Error, Result};
use crate::hypotheses::MatrixSequence;
use crate::seqfile::SequenceFile;
use crate::stochastic::{StochasticMatrix, DEFAULT_TOL_NEG, DEFAULT_TOL_ROW};

/// Probability of each optional extra edge.
const EXTRA_EDGE_PROB: f64 = 0.3;
/// Generators in the wolfowitz-set preset.
const WOLFOWITZ_SET_SIZE: usize = 3;
/// Fixed stream for the wolfowitz-set generators, so the set depends on
/// `n` and `alpha` only.
const WOLFOWITZ_SET_SEED: u64 = 0x0005_eed0_f5e7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    PositiveDiagonal,
    CycleCore,
    WolfowitzSet,
    PeriodicCounterexample,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::PositiveDiagonal,
        Preset::CycleCore,
        Preset::WolfowitzSet,
        Preset::PeriodicCounterexample,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::PositiveDiagonal => "positive-diagonal",
            Self::CycleCore => "cycle-core",
            Self::WolfowitzSet => "wolfowitz-set",
            Self::PeriodicCounterexample => "periodic-counterexample",
        }
    }

    /// Shortest length for which the preset's regime is guaranteed.
    pub fn min_length(self, n: usize) -> usize {
        match self {
            Self::PositiveDiagonal => (2 * n).saturating_sub(3).max(1),
            Self::CycleCore => digraph::wielandt_bound(n).unwrap_or(1),
            // any n - 1 irreducible factors with positive diagonals multiply
            // to a positive matrix
            Self::WolfowitzSet => (n - 1).max(1),
            Self::PeriodicCounterexample => 1,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown preset `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenerateParams {
    pub preset: Preset,
    pub n: usize,
    pub length: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl GenerateParams {
    fn check(&self) -> Result<()> {
        let invalid = |m: String| Err(Error::InvalidParameter(m));
        if self.n < 2 || self.n > crate::seqfile::MAX_DIMENSION {
            return invalid(format!("n must be at least 2, got {}", self.n));
        }
        if self.length == 0 {
            return invalid("length must be at least 1".into());
        }
        let max_alpha = 1.0 / self.n as f64;
        if !(self.alpha > 0.0 && self.alpha <= max_alpha * (1.0 + 1e-12)) {
            return invalid(format!(
                "alpha must lie in (0, 1/n] = (0, {max_alpha}], got {}",
                self.alpha
            ));
        }
        let min_len = self.preset.min_length(self.n);
        if self.length < min_len {
            return invalid(format!(
                "{} with n = {} needs length >= {min_len}",
                self.preset, self.n
            ));
        }
        if self.preset == Preset::PeriodicCounterexample && !self.n.is_multiple_of(2) {
            return invalid("periodic-counterexample needs an even n".into());
        }
        Ok(())
    }
}

/// Generated factors plus the metadata written to the file header.
#[derive(Clone, Debug, PartialEq)]
pub struct Generated {
    pub sequence: MatrixSequence,
    pub metadata: Vec<(String, String)>,
}

impl Generated {
    pub fn to_file(&self) -> SequenceFile {
        SequenceFile::from_sequence(&self.sequence, self.metadata.clone())
    }
}

pub fn generate(params: &GenerateParams) -> Result<Generated> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let GenerateParams {
        preset,
        n,
        length,
        alpha,
        seed,
    } = params.clone();
    let mut metadata = vec![
        ("preset".to_string(), preset.to_string()),
        ("length".to_string(), length.to_string()),
        ("alpha".to_string(), alpha.to_string()),
        ("seed".to_string(), seed.to_string()),
    ];
    let items = match preset {
        Preset::PositiveDiagonal => (1..=length)
            .map(|k| {
                let pattern = if k % 2 == 1 {
                    irreducible_with_loops(&mut rng, &(0..n).collect::<Vec<_>>(), n)
                } else {
                    block_pattern_with_loops(&mut rng, n)
                };
                weighted(&mut rng, &pattern, alpha)
            })
            .collect::<Result<Vec<_>>>()?,
        Preset::CycleCore => {
            let core = cycle_with_chord(n)?;
            metadata.push(("core".to_string(), core.to_string()));
            (0..length)
                .map(|_| {
                    let mut pattern = core.clone();
                    add_extra_edges(&mut rng, &mut pattern, None);
                    weighted(&mut rng, &pattern, alpha)
                })
                .collect::<Result<Vec<_>>>()?
        }
        Preset::WolfowitzSet => {
            let set = wolfowitz_generators(n, alpha)?;
            let depth = digraph::wielandt_bound(n)? + 1;
            verify_products_primitive(&set, depth)?;
            metadata.push(("set-size".to_string(), set.len().to_string()));
            metadata.push(("checked-depth".to_string(), depth.to_string()));
            (0..length)
                .map(|_| set[rng.gen_range(0..set.len())].clone())
                .collect()
        }
        Preset::PeriodicCounterexample => {
            let (first, second) = bipartite_permutations(n)?;
            (0..length)
                .map(|k| if k % 2 == 0 { first.clone() } else { second.clone() })
                .collect()
        }
    };
    Ok(Generated {
        sequence: MatrixSequence::new(items)?,
        metadata,
    })
}

/// The `n`-cycle `0 -> 1 -> ... -> n-1 -> 0` plus the chord `n-1 -> 1`.
pub fn cycle_with_chord(n: usize) -> Result<Digraph> {
    let mut g = Digraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))?;
    g.add_edge(n - 1, 1 % n)?;
    Ok(g)
}

/// Random Hamiltonian cycle through `nodes`, self-loops, and extra edges
/// inside `nodes`.
fn irreducible_with_loops(rng: &mut ChaCha8Rng, nodes: &[usize], n: usize) -> Digraph {
    let mut g = Digraph::empty(n).expect("n >= 1");
    add_block(rng, &mut g, nodes);
    g
}

fn add_block(rng: &mut ChaCha8Rng, g: &mut Digraph, nodes: &[usize]) {
    let mut order = nodes.to_vec();
    order.shuffle(rng);
    for (idx, &v) in order.iter().enumerate() {
        g.add_edge(v, v).expect("in range");
        if order.len() > 1 {
            g.add_edge(v, order[(idx + 1) % order.len()]).expect("in range");
        }
    }
    add_extra_edges(rng, g, Some(nodes));
}

/// Random partition of the nodes into irreducible blocks with self-loops
/// and no edges between blocks.
fn block_pattern_with_loops(rng: &mut ChaCha8Rng, n: usize) -> Digraph {
    let blocks = rng.gen_range(1..=n);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); blocks];
    for v in 0..n {
        members[rng.gen_range(0..blocks)].push(v);
    }
    let mut g = Digraph::empty(n).expect("n >= 1");
    for block in members.iter().filter(|b| !b.is_empty()) {
        add_block(rng, &mut g, block);
    }
    g
}

fn add_extra_edges(rng: &mut ChaCha8Rng, g: &mut Digraph, within: Option<&[usize]>) {
    let all: Vec<usize>;
    let nodes = match within {
        Some(nodes) => nodes,
        None => {
            all = (0..g.n()).collect();
            &all
        }
    };
    for &i in nodes {
        for &j in nodes {
            if rng.gen_bool(EXTRA_EDGE_PROB) {
                g.add_edge(i, j).expect("in range");
            }
        }
    }
}

/// Row weights on the pattern: each positive entry is `alpha` plus a random
/// share of the remaining mass.
fn weighted(rng: &mut ChaCha8Rng, pattern: &Digraph, alpha: f64) -> Result<StochasticMatrix> {
    let n = pattern.n();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        let support: Vec<usize> = pattern.successors(i).collect();
        let spare = (1.0 - support.len() as f64 * alpha).max(0.0);
        let shares: Vec<f64> = support.iter().map(|_| rng.gen::<f64>() + 0.05).collect();
        let total: f64 = shares.iter().sum();
        for (&j, s) in support.iter().zip(&shares) {
            data[i * n + j] = alpha + spare * s / total;
        }
    }
    StochasticMatrix::from_row_major(n, data, DEFAULT_TOL_ROW, DEFAULT_TOL_NEG)
}

fn wolfowitz_generators(n: usize, alpha: f64) -> Result<Vec<StochasticMatrix>> {
    let mut rng = ChaCha8Rng::seed_from_u64(WOLFOWITZ_SET_SEED ^ n as u64);
    let nodes: Vec<usize> = (0..n).collect();
    (0..WOLFOWITZ_SET_SIZE)
        .map(|_| {
            let pattern = irreducible_with_loops(&mut rng, &nodes, n);
            weighted(&mut rng, &pattern, alpha)
        })
        .collect()
}

/// Checks that every product of at most `depth` generators has a primitive
/// pattern, walking the distinct boolean patterns breadth first.
fn verify_products_primitive(set: &[StochasticMatrix], depth: usize) -> Result<()> {
    let gens: Vec<Digraph> = set.iter().map(|m| m.digraph(0.0)).collect();
    let mut seen: HashSet<Digraph> = HashSet::new();
    let mut frontier: Vec<Digraph> = Vec::new();
    for g in &gens {
        if seen.insert(g.clone()) {
            frontier.push(g.clone());
        }
    }
    for level in 1..=depth {
        for pattern in &frontier {
            let primitive = digraph::strongly_connected_components(pattern).len() == 1
                && digraph::exact_exponent(pattern)?.is_some();
            if !primitive {
                return Err(Error::InvalidParameter(format!(
                    "generator product of length {level} is not primitive"
                )));
            }
        }
        if level == depth {
            break;
        }
        let mut next = Vec::new();
        for pattern in &frontier {
            for g in &gens {
                let product = g.compose(pattern)?;
                if seen.insert(product.clone()) {
                    next.push(product);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(())
}

/// Two permutations mapping the first half of the nodes onto the second
/// half and back.
fn bipartite_permutations(n: usize) -> Result<(StochasticMatrix, StochasticMatrix)> {
    let h = n / 2;
    let first: Vec<usize> = (0..n).map(|i| if i < h { i + h } else { i - h }).collect();
    let second: Vec<usize> = (0..n)
        .map(|i| if i < h { h + (i + 1) % h } else { i - h })
        .collect();
    Ok((
        StochasticMatrix::permutation(&first)?,
        StochasticMatrix::permutation(&second)?,
    ))
}

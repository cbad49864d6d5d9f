//! Directed graphs on a fixed node set and the handful of algorithms the
//! convergence analysis needs: strongly connected components, periods,
//! sinks, complete reducibility, exponents and time-varying walks.
//!
//! Nodes are `0..n` in the API. The text rendering ([`fmt::Display`])
//! numbers nodes from 1, matching how matrices are read in files.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// A directed graph on the nodes `0..n`, self-loops allowed, no multi-edges.
///
/// Stored as a dense boolean adjacency matrix, so equality is exact edge-set
/// equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    n: usize,
    adj: Vec<bool>,
}

impl Digraph {
    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self {
            n,
            adj: vec![false; n * n],
        })
    }

    /// The complete digraph on `n` nodes, self-loops included.
    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Self::empty(n)?;
        g.adj.fill(true);
        Ok(g)
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(n)?;
        for (i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    pub fn from_fn(n: usize, mut has_edge: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for i in 0..n {
            for j in 0..n {
                g.adj[i * n + j] = has_edge(i, j);
            }
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check_node(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { node: v, n: self.n })
        }
    }

    /// # Panics
    ///
    /// Panics if either node is out of range.
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        assert!(i < self.n && j < self.n, "node out of range");
        self.adj[i * self.n + j]
    }

    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_node(i)?;
        self.check_node(j)?;
        self.adj[i * self.n + j] = true;
        Ok(())
    }

    pub fn remove_edge(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_node(i)?;
        self.check_node(j)?;
        self.adj[i * self.n + j] = false;
        Ok(())
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        self.adj
            .iter()
            .enumerate()
            .filter(|(_, &e)| e)
            .map(move |(idx, _)| (idx / n, idx % n))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&e| e).count()
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let row = &self.adj[i * self.n..(i + 1) * self.n];
        row.iter().enumerate().filter(|(_, &e)| e).map(|(j, _)| j)
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.successors(i).count()
    }

    /// True when every ordered pair is an edge.
    pub fn is_complete(&self) -> bool {
        self.adj.iter().all(|&e| e)
    }

    /// Boolean matrix product: `(i, j)` is an edge iff some `m` has
    /// `(i, m)` in `self` and `(m, j)` in `other`.
    pub fn compose(&self, other: &Digraph) -> Result<Digraph> {
        same_dimension(self, other)?;
        let n = self.n;
        let mut out = Digraph::empty(n)?;
        for i in 0..n {
            for m in self.successors(i) {
                for j in 0..n {
                    if other.adj[m * n + j] {
                        out.adj[i * n + j] = true;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Edge-wise union.
    pub fn union(&self, other: &Digraph) -> Result<Digraph> {
        same_dimension(self, other)?;
        let mut out = self.clone();
        for (a, &b) in out.adj.iter_mut().zip(&other.adj) {
            *a |= b;
        }
        Ok(out)
    }

    /// Relabels node `v` as `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Digraph> {
        check_permutation(perm, self.n)?;
        Digraph::from_edges(self.n, self.edges().map(|(i, j)| (perm[i], perm[j])))
    }
}

impl fmt::Display for Digraph {
    /// Sorted edge list with 1-based nodes, e.g. `1->2 2->1`; `-` when empty.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, j) in self.edges() {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{}->{}", i + 1, j + 1)?;
            first = false;
        }
        if first {
            f.write_str("-")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digraph(n={}, {})", self.n, self)
    }
}

fn same_dimension(a: &Digraph, b: &Digraph) -> Result<()> {
    if a.n == b.n {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: a.n,
            found: b.n,
        })
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: perm.len(),
        });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidParameter(format!(
                "not a permutation of 0..{n}"
            )));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Strongly connected components with their condensation.
///
/// Components are ordered by their smallest node and each component's
/// node list is sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SccPartition {
    components: Vec<Vec<usize>>,
    component_of: Vec<usize>,
    condensation_edges: BTreeSet<(usize, usize)>,
}

impl SccPartition {
    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component_of(&self, v: usize) -> usize {
        self.component_of[v]
    }

    pub fn condensation_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.condensation_edges
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Tarjan's algorithm, iterative so deep graphs do not overflow the stack.
pub fn strongly_connected_components(g: &Digraph) -> SccPartition {
    const UNVISITED: usize = usize::MAX;
    let n = g.n();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::with_capacity(n);
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut counter = 0;

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        // (node, next successor to scan)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&(v, start)) = call.last() {
            let mut descended = false;
            let mut w = start;
            while w < n {
                if g.has_edge(v, w) {
                    if index[w] == UNVISITED {
                        call.last_mut().unwrap().1 = w + 1;
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                        descended = true;
                        break;
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                }
                w += 1;
            }
            if descended {
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let x = stack.pop().expect("tarjan stack underflow");
                    on_stack[x] = false;
                    comp.push(x);
                    if x == v {
                        break;
                    }
                }
                comp.sort_unstable();
                found.push(comp);
            }
        }
    }

    found.sort_by_key(|c| c[0]);
    let mut component_of = vec![0; n];
    for (ci, comp) in found.iter().enumerate() {
        for &v in comp {
            component_of[v] = ci;
        }
    }
    let condensation_edges = g
        .edges()
        .map(|(i, j)| (component_of[i], component_of[j]))
        .filter(|(a, b)| a != b)
        .collect();
    SccPartition {
        components: found,
        component_of,
        condensation_edges,
    }
}

/// Period of `component`, which must be a strongly connected component of
/// `g`: the gcd of the lengths of the cycles inside it, or 0 when it has no
/// cycle (a single node without a self-loop).
pub fn scc_period(g: &Digraph, component: &[usize]) -> Result<usize> {
    for &v in component {
        g.check_node(v)?;
    }
    let mut wanted: Vec<usize> = component.to_vec();
    wanted.sort_unstable();
    wanted.dedup();
    let partition = strongly_connected_components(g);
    if wanted.is_empty() || !partition.components.contains(&wanted) {
        return Err(Error::NotAComponent);
    }
    Ok(component_period(g, &wanted))
}

/// BFS level labelling inside a strongly connected node set; the period is
/// the gcd of `level(u) + 1 - level(v)` over intra-component edges.
fn component_period(g: &Digraph, component: &[usize]) -> usize {
    let n = g.n();
    let mut inside = vec![false; n];
    for &v in component {
        inside[v] = true;
    }
    let mut level = vec![usize::MAX; n];
    let root = component[0];
    level[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for v in g.successors(u) {
            if inside[v] && level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut period = 0;
    for &u in component {
        for v in g.successors(u) {
            if inside[v] {
                period = gcd(period, (level[u] + 1).abs_diff(level[v]));
            }
        }
    }
    period
}

pub(crate) fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Per-component periods of a digraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Aperiodicity {
    pub partition: SccPartition,
    /// `periods[c]` is the period of component `c`; 0 marks a cycle-free
    /// component.
    pub periods: Vec<usize>,
}

impl Aperiodicity {
    /// Every component has period exactly 1. Cycle-free components count
    /// as not aperiodic.
    pub fn is_aperiodic(&self) -> bool {
        self.periods.iter().all(|&p| p == 1)
    }

    pub fn node_period(&self, v: usize) -> usize {
        self.periods[self.partition.component_of(v)]
    }
}

pub fn aperiodicity(g: &Digraph) -> Aperiodicity {
    let partition = strongly_connected_components(g);
    let periods = partition
        .components
        .iter()
        .map(|c| component_period(g, c))
        .collect();
    Aperiodicity { partition, periods }
}

pub fn is_aperiodic(g: &Digraph) -> bool {
    aperiodicity(g).is_aperiodic()
}

/// Nodes without outgoing edges.
pub fn sinks(g: &Digraph) -> Vec<usize> {
    (0..g.n()).filter(|&v| g.out_degree(v) == 0).collect()
}

/// Whether every edge of `h` is an edge of `g`.
pub fn is_subgraph(h: &Digraph, g: &Digraph) -> Result<bool> {
    same_dimension(g, h)?;
    Ok(h.adj.iter().zip(&g.adj).all(|(&a, &b)| !a || b))
}

/// The largest digraph contained in every input.
pub fn intersection(graphs: &[Digraph]) -> Result<Digraph> {
    let (first, rest) = graphs
        .split_first()
        .ok_or(Error::Empty("intersection of no digraphs"))?;
    let mut out = first.clone();
    for g in rest {
        same_dimension(first, g)?;
        for (a, &b) in out.adj.iter_mut().zip(&g.adj) {
            *a &= b;
        }
    }
    Ok(out)
}

/// No edge joins two distinct strongly connected components.
pub fn is_completely_reducible_pattern(g: &Digraph) -> bool {
    strongly_connected_components(g)
        .condensation_edges
        .is_empty()
}

/// Wielandt's bound `n^2 - 2n + 2` on the exponent of a primitive digraph.
pub fn wielandt_bound(n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    Ok((n - 1) * (n - 1) + 1)
}

/// Least `e >= 1` such that walks of every length `>= e` join every
/// ordered pair, or `None` if the graph is periodic.
///
/// Powers are searched up to the Wielandt bound; a strongly connected graph
/// that is not complete by then never will be.
pub fn exact_exponent(g: &Digraph) -> Result<Option<usize>> {
    if strongly_connected_components(g).len() != 1 {
        return Err(Error::NotStronglyConnected);
    }
    let bound = wielandt_bound(g.n())?;
    // In a strongly connected graph every node has a successor, so once a
    // power is complete every later power is too.
    let mut power = g.clone();
    for e in 1..=bound {
        if power.is_complete() {
            return Ok(Some(e));
        }
        power = power.compose(g)?;
    }
    Ok(None)
}

/// Whether a walk `(e_k, ..., e_{l+1})` from `i` to `j` exists with edge
/// `e_m` taken from graph `m`.
///
/// `graphs[0]` is graph `l + 1` and the last element is graph `k`, so the
/// walk leaves `i` through the last graph. An empty list admits only the
/// empty walk, from a node to itself.
pub fn time_varying_walk_exists(
    n: usize,
    graphs: &[Digraph],
    i: usize,
    j: usize,
) -> Result<bool> {
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    for g in graphs {
        if g.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: g.n(),
            });
        }
    }
    for v in [i, j] {
        if v >= n {
            return Err(Error::NodeOutOfRange { node: v, n });
        }
    }
    // Backward reachability: nodes that can still reach j using the
    // graphs processed so far.
    let mut reach = vec![false; n];
    reach[j] = true;
    for g in graphs {
        let next: Vec<bool> = (0..n)
            .map(|u| g.successors(u).any(|v| reach[v]))
            .collect();
        reach = next;
    }
    Ok(reach[i])
}

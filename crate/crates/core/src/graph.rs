//! Interaction graphs and bounds on the pair-sum/edge-sum constant.
//!
//! For a connected graph `G` and a pseudometric `phi`, there is a constant
//! `C` with
//!
//! ```text
//! sum_{i<j} phi(z_i, z_j) <= C * sum_{(i,j) in E} phi(z_i, z_j)
//! ```
//!
//! for every assignment of states to vertices. Coupling thresholds are
//! proportional to `C`, so smaller valid values are better. This module
//! computes two upper bounds: a generic diameter-based bound valid for every
//! connected graph, and the connection-graph bound obtained by choosing a
//! path per vertex pair and maximizing per-edge path loads. Both sides of the
//! inequality sum over unordered pairs; since `phi` is symmetric the constant
//! is unchanged relative to summing both orientations.
//!
//! Vertices are 1-indexed throughout.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use rayon::prelude::*;

use crate::domain::DomainSampler;
use crate::error::{Error, Result};
use crate::pseudometric::Pseudometric;
use crate::rho::RhoSequence;

/// Unordered edge stored as `(i, j)` with `i < j`.
pub type Edge = (usize, usize);

/// Connected simple undirected graph over vertices `1..=n`, `n >= 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
}

impl UndirectedGraph {
    /// Builds and validates a graph. Rejects self-loops, duplicate edges,
    /// out-of-range vertices, and disconnected graphs (listing the vertices
    /// unreachable from vertex 1).
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewVertices(n));
        }
        let mut normalized: Vec<Edge> = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::SelfLoop(a, b));
            }
            if a < 1 || a > n || b < 1 || b > n {
                return Err(Error::VertexOutOfRange(a, b, n));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        for w in normalized.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateEdge(w[0].0, w[0].1));
            }
        }
        let mut adjacency = vec![Vec::new(); n + 1];
        for &(i, j) in &normalized {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let graph = UndirectedGraph { n, edges: normalized, adjacency };
        let dist = graph.bfs_distances(1);
        let unreachable: Vec<usize> = (1..=n).filter(|&v| dist[v] == usize::MAX).collect();
        if !unreachable.is_empty() {
            return Err(Error::Disconnected { unreachable });
        }
        Ok(graph)
    }

    /// Star with center 1 and leaves `2..=n`.
    pub fn star(n: usize) -> Result<Self> {
        Self::new(n, (2..=n).map(|k| (1, k)))
    }

    /// Path `1 - 2 - ... - n`.
    pub fn path(n: usize) -> Result<Self> {
        Self::new(n, (1..n).map(|k| (k, k + 1)))
    }

    /// Cycle on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!(
                "a cycle needs at least 3 vertices, got {n}"
            )));
        }
        Self::new(n, (1..n).map(|k| (k, k + 1)).chain(std::iter::once((1, n))))
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for i in 1..=n {
            for j in (i + 1)..=n {
                edges.push((i, j));
            }
        }
        Self::new(n, edges)
    }

    /// Random connected graph: a random spanning tree plus `extra_edges`
    /// additional random edges (fewer if the graph saturates).
    pub fn random_connected(
        n: usize,
        extra_edges: usize,
        rng: &mut impl rand::Rng,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewVertices(n));
        }
        let mut edges: Vec<Edge> = Vec::new();
        for v in 2..=n {
            let parent = rng.random_range(1..v);
            edges.push((parent, v));
        }
        let mut added = 0;
        let mut attempts = 0;
        while added < extra_edges && attempts < 50 * (extra_edges + 1) {
            attempts += 1;
            let a = rng.random_range(1..=n);
            let b = rng.random_range(1..=n);
            if a == b {
                continue;
            }
            let e = (a.min(b), a.max(b));
            if !edges.contains(&e) {
                edges.push(e);
                added += 1;
            }
        }
        Self::new(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Neighbors of `v`, ascending.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let e = (a.min(b), a.max(b));
        self.edges.binary_search(&e).is_ok()
    }

    /// All unordered vertex pairs `(i, j)`, `i < j`, lexicographic.
    pub fn vertex_pairs(&self) -> Vec<Edge> {
        let mut pairs = Vec::with_capacity(self.n * (self.n - 1) / 2);
        for i in 1..=self.n {
            for j in (i + 1)..=self.n {
                pairs.push((i, j));
            }
        }
        pairs
    }

    /// BFS distances (edge counts) from `source`; `usize::MAX` marks
    /// unreachable vertices (only possible during construction).
    fn bfs_distances(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n + 1];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Graph diameter: the maximum over vertex pairs of the shortest-path
    /// edge count.
    pub fn diameter(&self) -> usize {
        (1..=self.n)
            .map(|v| {
                self.bfs_distances(v)
                    .iter()
                    .skip(1)
                    .copied()
                    .max()
                    .unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }

    /// Serializes as an edge-list text block: first line `n <count>`, then
    /// one `i j` pair per line, 1-indexed.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for (i, j) in &self.edges {
            out.push_str(&format!("{i} {j}\n"));
        }
        out
    }

    /// Parses the edge-list text block produced by [`to_edge_list`].
    ///
    /// [`to_edge_list`]: UndirectedGraph::to_edge_list
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty edge-list block".into()))?;
        let mut tokens = header.split_whitespace();
        match (tokens.next(), tokens.next(), tokens.next()) {
            (Some("n"), Some(count), None) => {
                let n: usize = count
                    .parse()
                    .map_err(|_| Error::Parse(format!("invalid vertex count '{count}'")))?;
                let mut edges = Vec::new();
                for line in lines {
                    let mut it = line.split_whitespace();
                    match (it.next(), it.next(), it.next()) {
                        (Some(a), Some(b), None) => {
                            let i: usize = a
                                .parse()
                                .map_err(|_| Error::Parse(format!("invalid vertex '{a}'")))?;
                            let j: usize = b
                                .parse()
                                .map_err(|_| Error::Parse(format!("invalid vertex '{b}'")))?;
                            edges.push((i, j));
                        }
                        _ => return Err(Error::Parse(format!("malformed edge line '{line}'"))),
                    }
                }
                Self::new(n, edges)
            }
            _ => Err(Error::Parse(format!(
                "expected header 'n <count>', got '{header}'"
            ))),
        }
    }
}

/// Shipped graph families plus explicit edge lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphFamily {
    Star { n: usize },
    Path { n: usize },
    Cycle { n: usize },
    Complete { n: usize },
    Custom { n: usize, edges: Vec<Edge> },
}

/// Builds a validated graph from a family descriptor.
pub fn build_graph(family: &GraphFamily) -> Result<UndirectedGraph> {
    match family {
        GraphFamily::Star { n } => UndirectedGraph::star(*n),
        GraphFamily::Path { n } => UndirectedGraph::path(*n),
        GraphFamily::Cycle { n } => UndirectedGraph::cycle(*n),
        GraphFamily::Complete { n } => UndirectedGraph::complete(*n),
        GraphFamily::Custom { n, edges } => UndirectedGraph::new(*n, edges.iter().copied()),
    }
}

/// One simple path per unordered vertex pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathChoice {
    paths: BTreeMap<Edge, Vec<usize>>,
}

impl PathChoice {
    /// Builds from explicit paths keyed by `(i, j)` with `i < j`; each path
    /// runs from `i` to `j`.
    pub fn from_paths(paths: BTreeMap<Edge, Vec<usize>>) -> Self {
        PathChoice { paths }
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&[usize]> {
        self.paths
            .get(&(i.min(j), i.max(j)))
            .map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Edge, &Vec<usize>)> {
        self.paths.iter()
    }

    /// Checks the path choice against a graph: exactly one entry per vertex
    /// pair, endpoints matching the key, consecutive vertices adjacent, and
    /// no repeated vertex within a path.
    pub fn validate(&self, graph: &UndirectedGraph) -> Result<()> {
        let pairs = graph.vertex_pairs();
        if self.paths.len() != pairs.len() {
            return Err(Error::InvalidPathChoice(format!(
                "expected {} paths (one per vertex pair), got {}",
                pairs.len(),
                self.paths.len()
            )));
        }
        for (i, j) in pairs {
            let path = self.paths.get(&(i, j)).ok_or_else(|| {
                Error::InvalidPathChoice(format!("missing path for pair ({i}, {j})"))
            })?;
            if path.first() != Some(&i) || path.last() != Some(&j) {
                return Err(Error::InvalidPathChoice(format!(
                    "path for pair ({i}, {j}) has endpoints {:?}",
                    (path.first(), path.last())
                )));
            }
            let mut seen = vec![false; graph.n() + 1];
            for &v in path {
                if v < 1 || v > graph.n() || seen[v] {
                    return Err(Error::InvalidPathChoice(format!(
                        "path for pair ({i}, {j}) repeats or exceeds vertices: {path:?}"
                    )));
                }
                seen[v] = true;
            }
            for w in path.windows(2) {
                if !graph.has_edge(w[0], w[1]) {
                    return Err(Error::InvalidPathChoice(format!(
                        "path for pair ({i}, {j}) uses non-edge ({}, {})",
                        w[0], w[1]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Strategy for choosing one path per vertex pair.
#[derive(Debug, Clone)]
pub enum PathStrategy {
    /// Shortest paths with deterministic tie-breaking: among equal-length
    /// shortest paths, the lexicographically smallest vertex sequence.
    BfsMinLength,
    /// Exact minimization of the connection-graph bound over all per-pair
    /// simple-path choices (branch-and-bound; exponential, capped by `cap`).
    ExhaustiveBest { rho: RhoSequence, cap: usize },
}

/// Default vertex cap for the exhaustive search.
pub const EXHAUSTIVE_DEFAULT_CAP: usize = 7;

impl PathStrategy {
    /// Exhaustive search with the default cap.
    pub fn exhaustive(rho: RhoSequence) -> Self {
        PathStrategy::ExhaustiveBest { rho, cap: EXHAUSTIVE_DEFAULT_CAP }
    }
}

/// Chooses one path per unordered vertex pair according to the strategy.
pub fn choose_paths(graph: &UndirectedGraph, strategy: &PathStrategy) -> Result<PathChoice> {
    match strategy {
        PathStrategy::BfsMinLength => Ok(bfs_min_length_paths(graph)),
        PathStrategy::ExhaustiveBest { rho, cap } => {
            if graph.n() > *cap {
                return Err(Error::ExhaustiveCapExceeded { n: graph.n(), cap: *cap });
            }
            Ok(exhaustive_best_paths(graph, rho))
        }
    }
}

fn bfs_min_length_paths(graph: &UndirectedGraph) -> PathChoice {
    let mut paths = BTreeMap::new();
    // Distances from every vertex, computed once.
    let dist: Vec<Vec<usize>> = (0..=graph.n())
        .map(|v| if v == 0 { Vec::new() } else { graph.bfs_distances(v) })
        .collect();
    for (i, j) in graph.vertex_pairs() {
        // Walk from i, always taking the smallest-numbered neighbor that
        // still lies on a shortest path to j. Because all candidate
        // continuations have equal length, the greedy walk yields the
        // lexicographically smallest shortest vertex sequence.
        let dj = &dist[j];
        let mut path = vec![i];
        let mut current = i;
        while current != j {
            let next = graph
                .neighbors(current)
                .iter()
                .copied()
                .find(|&v| dj[v] + 1 == dj[current])
                .expect("connected graph has a descending neighbor");
            path.push(next);
            current = next;
        }
        paths.insert((i, j), path);
    }
    PathChoice::from_paths(paths)
}

/// All simple paths from `i` to `j`, ordered by (length, lexicographic).
fn all_simple_paths(graph: &UndirectedGraph, i: usize, j: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut visited = vec![false; graph.n() + 1];
    let mut stack = vec![i];
    visited[i] = true;
    fn dfs(
        graph: &UndirectedGraph,
        j: usize,
        visited: &mut Vec<bool>,
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let u = *stack.last().expect("stack nonempty");
        if u == j {
            out.push(stack.clone());
            return;
        }
        for &v in graph.neighbors(u) {
            if !visited[v] {
                visited[v] = true;
                stack.push(v);
                dfs(graph, j, visited, stack, out);
                stack.pop();
                visited[v] = false;
            }
        }
    }
    dfs(graph, j, &mut visited, &mut stack, &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn path_edges(path: &[usize]) -> impl Iterator<Item = Edge> + '_ {
    path.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1])))
}

/// Branch-and-bound minimization of `max_e B(e)` over per-pair path choices.
///
/// Loads only grow as paths are assigned, so any partial assignment whose
/// running maximum already reaches the incumbent can be pruned without losing
/// optimality. The BFS min-length choice seeds the incumbent.
fn exhaustive_best_paths(graph: &UndirectedGraph, rho: &RhoSequence) -> PathChoice {
    let edge_index: BTreeMap<Edge, usize> = graph
        .edges()
        .iter()
        .enumerate()
        .map(|(idx, e)| (*e, idx))
        .collect();

    let mut pair_options: Vec<(Edge, Vec<Vec<usize>>)> = graph
        .vertex_pairs()
        .into_iter()
        .map(|(i, j)| ((i, j), all_simple_paths(graph, i, j)))
        .collect();
    // Most constrained pairs first shrinks the search tree.
    pair_options.sort_by(|a, b| {
        a.1.len()
            .cmp(&b.1.len())
            .then_with(|| a.0.cmp(&b.0))
    });

    let seed_choice = bfs_min_length_paths(graph);
    let mut best_c = connection_graph_bound(graph, rho, &seed_choice)
        .expect("seed choice is valid")
        .c_value;
    let mut best: Vec<usize> = Vec::new(); // option index per pair, in pair_options order
    let mut loads = vec![0.0_f64; graph.edge_count()];
    let mut chosen = vec![0_usize; pair_options.len()];

    #[allow(clippy::too_many_arguments)]
    fn search(
        pair_options: &[(Edge, Vec<Vec<usize>>)],
        edge_index: &BTreeMap<Edge, usize>,
        rho: &RhoSequence,
        depth: usize,
        current_max: f64,
        loads: &mut Vec<f64>,
        chosen: &mut Vec<usize>,
        best_c: &mut f64,
        best: &mut Vec<usize>,
    ) {
        if current_max >= *best_c {
            return;
        }
        if depth == pair_options.len() {
            *best_c = current_max;
            *best = chosen.clone();
            return;
        }
        let (_, options) = &pair_options[depth];
        for (opt_idx, path) in options.iter().enumerate() {
            let weight = rho.eval(path.len() - 1);
            let mut new_max = current_max;
            let mut touched: Vec<usize> = Vec::with_capacity(path.len() - 1);
            for e in path_edges(path) {
                let idx = edge_index[&e];
                loads[idx] += weight;
                touched.push(idx);
                new_max = new_max.max(loads[idx]);
            }
            if new_max < *best_c {
                chosen[depth] = opt_idx;
                search(
                    pair_options, edge_index, rho, depth + 1, new_max, loads, chosen, best_c,
                    best,
                );
            }
            for idx in touched {
                loads[idx] -= weight;
            }
        }
    }

    search(
        &pair_options,
        &edge_index,
        rho,
        0,
        0.0,
        &mut loads,
        &mut chosen,
        &mut best_c,
        &mut best,
    );

    if best.is_empty() {
        // Nothing beat the seed choice.
        return seed_choice;
    }
    let mut paths = BTreeMap::new();
    for (slot, (pair, options)) in pair_options.iter().enumerate() {
        paths.insert(*pair, options[best[slot]].clone());
    }
    PathChoice::from_paths(paths)
}

/// How a bound was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMethod {
    Generic,
    ConnectionGraph,
    UserSupplied,
}

impl BoundMethod {
    pub fn label(&self) -> &'static str {
        match self {
            BoundMethod::Generic => "generic",
            BoundMethod::ConnectionGraph => "connection-graph",
            BoundMethod::UserSupplied => "user-supplied",
        }
    }
}

/// A valid upper bound for the pair-sum/edge-sum constant, with the evidence
/// that produced it. The values reported here are upper bounds, not claimed
/// optima.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub c_value: f64,
    pub method: BoundMethod,
    /// Per-edge load `B(e)` (connection-graph method only).
    pub per_edge_load: Option<BTreeMap<Edge, f64>>,
    /// The witnessing path choice (connection-graph method only).
    pub path_choice: Option<PathChoice>,
}

/// Diameter-based bound valid for every connected graph:
/// `C = n(n-1)/2 * delta * rho(delta)` with `delta` the diameter.
pub fn generic_bound(graph: &UndirectedGraph, rho: &RhoSequence) -> BoundReport {
    let n = graph.n() as f64;
    let delta = graph.diameter();
    let c_value = n * (n - 1.0) / 2.0 * delta as f64 * rho.eval(delta.max(1));
    BoundReport {
        c_value,
        method: BoundMethod::Generic,
        per_edge_load: None,
        path_choice: None,
    }
}

/// Connection-graph bound for a given path choice.
///
/// Each edge accumulates the load `B(e) = sum rho(|P|)` over the chosen
/// paths that traverse it; the bound is `max_e B(e)`.
pub fn connection_graph_bound(
    graph: &UndirectedGraph,
    rho: &RhoSequence,
    paths: &PathChoice,
) -> Result<BoundReport> {
    paths.validate(graph)?;
    let mut loads: BTreeMap<Edge, f64> = graph.edges().iter().map(|e| (*e, 0.0)).collect();
    for (_, path) in paths.iter() {
        let weight = rho.eval(path.len() - 1);
        for e in path_edges(path) {
            *loads.get_mut(&e).expect("validated path uses graph edges") += weight;
        }
    }
    let c_value = loads.values().copied().fold(0.0_f64, f64::max);
    Ok(BoundReport {
        c_value,
        method: BoundMethod::ConnectionGraph,
        per_edge_load: Some(loads),
        path_choice: Some(paths.clone()),
    })
}

/// Convenience: choose paths by `strategy`, then apply the connection-graph
/// bound.
pub fn connection_graph_bound_with_strategy(
    graph: &UndirectedGraph,
    rho: &RhoSequence,
    strategy: &PathStrategy,
) -> Result<BoundReport> {
    let paths = choose_paths(graph, strategy)?;
    connection_graph_bound(graph, rho, &paths)
}

/// One sampled violation of the pair-sum/edge-sum inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundViolation {
    pub trial: u64,
    pub pair_sum: f64,
    pub edge_sum: f64,
    /// The sampled states, one row per vertex.
    pub states: Vec<Vec<f64>>,
}

/// Outcome of [`verify_bound_sampled`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundVerification {
    pub trials: usize,
    pub violation_count: usize,
    /// First few violations, capped to keep reports small.
    pub violations: Vec<BoundViolation>,
    /// Largest observed `pair_sum / edge_sum` over trials with a positive
    /// edge sum.
    pub max_ratio: f64,
    pub passed: bool,
}

const VIOLATION_CAP: usize = 16;
const REL_SLACK: f64 = 1e-12;

/// Samples `count` state assignments from `phi`'s domain and checks
/// `sum_{i<j} phi <= c * sum_edges phi` on each, reporting violations and the
/// worst observed ratio.
///
/// A pass supports (but cannot prove) validity of `c`; a single violation
/// refutes it. The comparison carries a relative slack of `1e-12` so exact
/// equality cases (for instance complete graphs with `c = 1`) do not trip on
/// rounding.
pub fn verify_bound_sampled(
    graph: &UndirectedGraph,
    phi: &Pseudometric,
    c: f64,
    sampler: &DomainSampler,
    count: usize,
) -> Result<BoundVerification> {
    if !(c >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "bound constant must be nonnegative, got {c}"
        )));
    }
    if !sampler.compatible_with(phi.domain()) {
        return Err(Error::IncompatibleSampler(format!(
            "sampling region {:?} is not contained in the domain of '{}'",
            sampler.region(),
            phi.name()
        )));
    }
    let n = graph.n();
    let results: Vec<(Option<BoundViolation>, f64)> = (0..count as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = sampler.rng_for(trial);
            let states: Vec<Vec<f64>> = (0..n).map(|_| sampler.draw(&mut rng)).collect();
            let mut pair_sum = 0.0;
            let mut edge_sum = 0.0;
            for i in 1..=n {
                for j in (i + 1)..=n {
                    let value = phi.evaluate_unchecked(&states[i - 1], &states[j - 1]);
                    pair_sum += value;
                    if graph.has_edge(i, j) {
                        edge_sum += value;
                    }
                }
            }
            let bound = c * edge_sum;
            let slack = REL_SLACK * pair_sum.abs().max(bound.abs()).max(1.0);
            let violation = if pair_sum > bound + slack {
                Some(BoundViolation { trial, pair_sum, edge_sum, states })
            } else {
                None
            };
            let ratio = if edge_sum > 0.0 {
                pair_sum / edge_sum
            } else if pair_sum > slack {
                f64::INFINITY
            } else {
                0.0
            };
            (violation, ratio)
        })
        .collect();

    let mut violations = Vec::new();
    let mut violation_count = 0;
    let mut max_ratio = 0.0_f64;
    for (violation, ratio) in results {
        max_ratio = max_ratio.max(ratio);
        if let Some(v) = violation {
            violation_count += 1;
            if violations.len() < VIOLATION_CAP {
                violations.push(v);
            }
        }
    }
    Ok(BoundVerification {
        trials: count,
        violation_count,
        violations,
        max_ratio,
        passed: violation_count == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainDescriptor;
    use crate::pseudometric::power_pseudometric;

    #[test]
    fn star_edges_match_family() {
        let g = UndirectedGraph::star(5).unwrap();
        assert_eq!(g.edges(), &[(1, 2), (1, 3), (1, 4), (1, 5)]);
    }

    #[test]
    fn complete_three() {
        let g = UndirectedGraph::complete(3).unwrap();
        assert_eq!(g.edges(), &[(1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn disconnected_rejected_with_component() {
        let err = UndirectedGraph::new(3, [(1, 2)]).unwrap_err();
        match err {
            Error::Disconnected { unreachable } => assert_eq!(unreachable, vec![3]),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn self_loop_and_duplicate_rejected() {
        assert!(matches!(
            UndirectedGraph::new(3, [(1, 1), (1, 2), (2, 3)]),
            Err(Error::SelfLoop(1, 1))
        ));
        assert!(matches!(
            UndirectedGraph::new(3, [(1, 2), (2, 1), (2, 3)]),
            Err(Error::DuplicateEdge(1, 2))
        ));
    }

    #[test]
    fn diameters() {
        assert_eq!(UndirectedGraph::complete(4).unwrap().diameter(), 1);
        assert_eq!(UndirectedGraph::star(5).unwrap().diameter(), 2);
        assert_eq!(UndirectedGraph::path(4).unwrap().diameter(), 3);
        for n in 3..=8 {
            assert_eq!(UndirectedGraph::complete(n).unwrap().diameter(), 1);
            assert_eq!(UndirectedGraph::path(n).unwrap().diameter(), n - 1);
            assert_eq!(UndirectedGraph::star(n).unwrap().diameter(), 2);
        }
    }

    #[test]
    fn bfs_paths_examples() {
        let star = UndirectedGraph::star(5).unwrap();
        let choice = choose_paths(&star, &PathStrategy::BfsMinLength).unwrap();
        assert_eq!(choice.get(2, 3).unwrap(), &[2, 1, 3]);

        let path = UndirectedGraph::path(4).unwrap();
        let choice = choose_paths(&path, &PathStrategy::BfsMinLength).unwrap();
        assert_eq!(choice.get(1, 4).unwrap(), &[1, 2, 3, 4]);

        let complete = UndirectedGraph::complete(4).unwrap();
        let choice = choose_paths(&complete, &PathStrategy::BfsMinLength).unwrap();
        assert_eq!(choice.get(1, 3).unwrap(), &[1, 3]);
    }

    #[test]
    fn bfs_paths_are_lexicographically_smallest() {
        // Cycle 1-2-3-4-1: pair (2, 4) has two shortest paths, (2,1,4) and
        // (2,3,4); the lexicographically smaller goes through 1.
        let g = UndirectedGraph::cycle(4).unwrap();
        let choice = choose_paths(&g, &PathStrategy::BfsMinLength).unwrap();
        assert_eq!(choice.get(2, 4).unwrap(), &[2, 1, 4]);
    }

    #[test]
    fn generic_bound_examples() {
        let rho_m = RhoSequence::linear();
        assert_eq!(
            generic_bound(&UndirectedGraph::star(5).unwrap(), &rho_m).c_value,
            40.0
        );
        assert_eq!(
            generic_bound(&UndirectedGraph::path(3).unwrap(), &rho_m).c_value,
            12.0
        );
        let rho53 = RhoSequence::power(5.0 / 3.0).unwrap();
        assert_eq!(
            generic_bound(&UndirectedGraph::complete(4).unwrap(), &rho53).c_value,
            6.0
        );
    }

    #[test]
    fn connection_bound_examples() {
        let rho = RhoSequence::linear();
        for n in [3usize, 5, 8] {
            let g = UndirectedGraph::star(n).unwrap();
            let report =
                connection_graph_bound_with_strategy(&g, &rho, &PathStrategy::BfsMinLength)
                    .unwrap();
            assert_eq!(report.c_value, (2 * n - 3) as f64);
        }
        let g = UndirectedGraph::path(3).unwrap();
        let report = connection_graph_bound_with_strategy(&g, &rho, &PathStrategy::BfsMinLength)
            .unwrap();
        assert_eq!(report.c_value, 3.0);
        let loads = report.per_edge_load.unwrap();
        assert_eq!(loads[&(1, 2)], 3.0);
        assert_eq!(loads[&(2, 3)], 3.0);

        let g = UndirectedGraph::complete(4).unwrap();
        let report = connection_graph_bound_with_strategy(&g, &rho, &PathStrategy::BfsMinLength)
            .unwrap();
        assert_eq!(report.c_value, 1.0);
    }

    #[test]
    fn exhaustive_cap_enforced() {
        let g = UndirectedGraph::complete(8).unwrap();
        let strategy = PathStrategy::exhaustive(RhoSequence::linear());
        assert!(matches!(
            choose_paths(&g, &strategy),
            Err(Error::ExhaustiveCapExceeded { n: 8, cap: 7 })
        ));
    }

    #[test]
    fn exhaustive_never_worse_than_bfs() {
        let rho = RhoSequence::linear();
        for g in [
            UndirectedGraph::cycle(5).unwrap(),
            UndirectedGraph::star(5).unwrap(),
            UndirectedGraph::new(5, [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5), (2, 5)]).unwrap(),
        ] {
            let bfs = connection_graph_bound_with_strategy(&g, &rho, &PathStrategy::BfsMinLength)
                .unwrap();
            let best = connection_graph_bound_with_strategy(
                &g,
                &rho,
                &PathStrategy::exhaustive(rho.clone()),
            )
            .unwrap();
            assert!(best.c_value <= bfs.c_value + 1e-12);
        }
    }

    #[test]
    fn edge_list_round_trip() {
        let g = UndirectedGraph::star(4).unwrap();
        let text = g.to_edge_list();
        assert_eq!(text, "n 4\n1 2\n1 3\n1 4\n");
        let parsed = UndirectedGraph::from_edge_list(&text).unwrap();
        assert_eq!(parsed, g);
        assert!(UndirectedGraph::from_edge_list("m 4\n1 2\n").is_err());
    }

    #[test]
    fn sampled_verification_passes_on_complete_graph_with_c_one() {
        let g = UndirectedGraph::complete(4).unwrap();
        let phi = power_pseudometric(1.0).unwrap();
        let region = DomainDescriptor::centered_box(2, 10.0).unwrap();
        let sampler = DomainSampler::new(region, 7).unwrap();
        let report = verify_bound_sampled(&g, &phi, 1.0, &sampler, 1000).unwrap();
        assert!(report.passed, "violations: {:?}", report.violations.first());
        assert!(report.max_ratio <= 1.0 + 1e-9);
    }

    #[test]
    fn sampled_verification_fails_for_zero_constant() {
        let g = UndirectedGraph::path(2).unwrap();
        let phi = power_pseudometric(1.0).unwrap();
        let region = DomainDescriptor::bounded_box(vec![1.0, -1.0], vec![2.0, 1.0]).unwrap();
        let sampler = DomainSampler::new(region, 3).unwrap();
        // With c = 0 any trial with distinct x-coordinates is a witness.
        let report = verify_bound_sampled(&g, &phi, 0.0, &sampler, 1).unwrap();
        assert!(!report.passed);
        assert_eq!(report.violation_count, 1);
        assert!(!report.violations.is_empty());
    }

    #[test]
    fn sampled_verification_star_with_connection_bound() {
        let g = UndirectedGraph::star(5).unwrap();
        let phi = power_pseudometric(1.0).unwrap();
        let region = DomainDescriptor::centered_box(2, 5.0).unwrap();
        let sampler = DomainSampler::new(region, 11).unwrap();
        let report = verify_bound_sampled(&g, &phi, 7.0, &sampler, 1000).unwrap();
        assert!(report.passed);
    }

    #[test]
    fn sampler_domain_compatibility_checked() {
        let g = UndirectedGraph::path(2).unwrap();
        let phi = crate::pseudometric::exp_damped_pseudometric();
        let region = DomainDescriptor::centered_box(3, 1.0).unwrap(); // exceeds the ball
        let sampler = DomainSampler::new(region, 1).unwrap();
        assert!(matches!(
            verify_bound_sampled(&g, &phi, 1.0, &sampler, 10),
            Err(Error::IncompatibleSampler(_))
        ));
    }
}

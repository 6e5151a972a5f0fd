//! Vertex-splitting Maximum Clique solver.
//!
//! A graph larger than the leaf solver's threshold is split on a vertex `v`
//! of minimum degree into the subgraph induced by the neighbours of `v` and
//! the graph without `v`. Optionally each graph is first shrunk with the
//! persistencies of its clique QUBO.

use thiserror::Error;

use crate::graphs::Graph;
use crate::oracle::exact_max_clique;
use crate::persistency::{analyze, PersistencyError};
use crate::probing::probe;
use crate::problems::{clique_qubo, CliqueEncoding};
use crate::Qubo;

pub const DEFAULT_THRESHOLD: usize = 45;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecomposeError {
    #[error("leaf solver threshold must be at least 1")]
    ZeroThreshold,
    #[error("leaf solver returned a non-clique on a graph with {n} vertices")]
    InvalidClique { n: usize },
    #[error(transparent)]
    Persistency(#[from] PersistencyError),
}

/// Solves Maximum Clique on graphs with at most `threshold()` vertices.
pub trait LeafSolver: Sync {
    fn threshold(&self) -> usize;

    /// Vertices of a maximum clique of `g`.
    fn solve(&self, g: &Graph) -> Vec<usize>;
}

/// Exact branch and bound standing in for the target hardware.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactLeafSolver {
    pub threshold: usize,
}

impl Default for ExactLeafSolver {
    fn default() -> Self {
        ExactLeafSolver {
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

impl LeafSolver for ExactLeafSolver {
    fn threshold(&self) -> usize {
        self.threshold
    }

    fn solve(&self, g: &Graph) -> Vec<usize> {
        exact_max_clique(g)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SplitStats {
    /// Leaf solver invocations.
    pub n_calls: u64,
    pub max_depth: usize,
    pub vertices_eliminated_by_persistency: u64,
}

impl SplitStats {
    fn merge(self, other: SplitStats) -> SplitStats {
        SplitStats {
            n_calls: self.n_calls + other.n_calls,
            max_depth: self.max_depth.max(other.max_depth),
            vertices_eliminated_by_persistency: self.vertices_eliminated_by_persistency
                + other.vertices_eliminated_by_persistency,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shrink {
    None,
    Persistency,
    /// Persistency plus probing; much slower.
    Probing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitOptions {
    pub shrink: Shrink,
    /// Subgraphs at least this large solve their two branches in parallel.
    pub parallel_min: usize,
}

impl Default for SplitOptions {
    fn default() -> Self {
        SplitOptions {
            shrink: Shrink::None,
            parallel_min: 64,
        }
    }
}

pub fn max_clique_split(
    g: &Graph,
    solver: &dyn LeafSolver,
    use_persistency: bool,
) -> Result<(Vec<usize>, SplitStats), DecomposeError> {
    let shrink = if use_persistency { Shrink::Persistency } else { Shrink::None };
    max_clique_split_with(
        g,
        solver,
        &SplitOptions {
            shrink,
            ..SplitOptions::default()
        },
    )
}

pub fn max_clique_split_with(
    g: &Graph,
    solver: &dyn LeafSolver,
    options: &SplitOptions,
) -> Result<(Vec<usize>, SplitStats), DecomposeError> {
    if solver.threshold() == 0 {
        return Err(DecomposeError::ZeroThreshold);
    }
    let (mut clique, stats) = split(g, solver, options, 0, true)?;
    clique.sort_unstable();
    Ok((clique, stats))
}

fn leaf(g: &Graph, solver: &dyn LeafSolver, depth: usize) -> Result<(Vec<usize>, SplitStats), DecomposeError> {
    if g.n() == 0 {
        return Ok((Vec::new(), SplitStats { max_depth: depth, ..SplitStats::default() }));
    }
    let c = solver.solve(g);
    if !g.is_clique(&c) {
        return Err(DecomposeError::InvalidClique { n: g.n() });
    }
    Ok((
        c,
        SplitStats {
            n_calls: 1,
            max_depth: depth,
            vertices_eliminated_by_persistency: 0,
        },
    ))
}

/// Returns a maximum clique in the vertex numbering of `g`.
fn split(
    g: &Graph,
    solver: &dyn LeafSolver,
    options: &SplitOptions,
    depth: usize,
    shrink_here: bool,
) -> Result<(Vec<usize>, SplitStats), DecomposeError> {
    if g.n() <= solver.threshold() {
        return leaf(g, solver, depth);
    }
    if shrink_here && options.shrink != Shrink::None {
        let q: Qubo<i64> =
            clique_qubo(g, &CliqueEncoding::complement_penalty()).expect("default weights are valid");
        let fixed = match options.shrink {
            Shrink::Probing => probe(&q, 10)?.fixed().clone(),
            _ => analyze(&q)?.weak().clone(),
        };
        if !fixed.is_empty() {
            let committed: Vec<usize> = fixed.iter().filter(|(_, &b)| b).map(|(&v, _)| v).collect();
            let rest: Vec<usize> = (0..g.n())
                .filter(|v| !fixed.contains_key(v) && committed.iter().all(|&c| g.has_edge(*v, c)))
                .collect();
            let (sub, mut stats) = split(&g.induced(&rest), solver, options, depth + 1, false)?;
            stats.vertices_eliminated_by_persistency += (g.n() - rest.len()) as u64;
            let mut clique = committed;
            clique.extend(sub.iter().map(|&k| rest[k]));
            return Ok((clique, stats));
        }
    }

    let v = (0..g.n()).min_by_key(|&v| (g.degree(v), v)).expect("nonempty graph");
    let nbrs: Vec<usize> = g.neighbors(v).collect();
    let others: Vec<usize> = (0..g.n()).filter(|&u| u != v).collect();
    let g1 = g.induced(&nbrs);
    let g2 = g.induced(&others);
    let (r1, r2) = if g.n() >= options.parallel_min {
        rayon::join(
            || split(&g1, solver, options, depth + 1, true),
            || split(&g2, solver, options, depth + 1, true),
        )
    } else {
        (split(&g1, solver, options, depth + 1, true), split(&g2, solver, options, depth + 1, true))
    };
    let ((c1, s1), (c2, s2)) = (r1?, r2?);
    let stats = s1.merge(s2);
    // C1 ∪ {v} has |C1| + 1 vertices.
    if c1.len() + 1 > c2.len() {
        let mut clique: Vec<usize> = c1.iter().map(|&k| nbrs[k]).collect();
        clique.push(v);
        Ok((clique, stats))
    } else {
        Ok((c2.iter().map(|&k| others[k]).collect(), stats))
    }
}

/// `(index, (n_qpbo − n_no_qpbo) / n_no_qpbo)` per graph, where the two
/// counts are leaf calls with and without persistency shrinking.
pub fn splitting_savings(
    gs: &[Graph],
    solver: &dyn LeafSolver,
) -> Result<Vec<(usize, f64)>, DecomposeError> {
    gs.iter()
        .enumerate()
        .map(|(i, g)| {
            let (_, with) = max_clique_split(g, solver, true)?;
            let (_, without) = max_clique_split(g, solver, false)?;
            Ok((i, savings_ratio(with.n_calls, without.n_calls)))
        })
        .collect()
}

pub fn savings_ratio(n_qpbo: u64, n_no_qpbo: u64) -> f64 {
    if n_no_qpbo == 0 {
        0.0
    } else {
        (n_qpbo as f64 - n_no_qpbo as f64) / n_no_qpbo as f64
    }
}

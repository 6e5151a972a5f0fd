//! Exact reference solvers. None of these share code with the posiform,
//! network or persistency modules.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graphs::Graph;
use crate::model::Qubo;
use crate::persistency::PersistencyResult;
use crate::probing::ProbeOutcome;
use crate::scalar::{lcm_denominators, Rational, Scalar};

/// Largest problem the enumeration oracles accept.
pub const MAX_ENUMERATION_VARS: usize = 25;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{n} variables exceed the enumeration limit of {limit}")]
    SizeGuard { n: usize, limit: usize },
    #[error("coefficient {0} has no exact value")]
    NonFinite(String),
    #[error("coefficients are too large for exact enumeration")]
    Overflow,
}

fn guard(n: usize) -> Result<(), OracleError> {
    if n > MAX_ENUMERATION_VARS {
        Err(OracleError::SizeGuard {
            n,
            limit: MAX_ENUMERATION_VARS,
        })
    } else {
        Ok(())
    }
}

/// Dense integer copy of a QUBO (coefficients times a common denominator).
struct Enumerator {
    n: usize,
    offset: i128,
    linear: Vec<i128>,
    matrix: Vec<i128>,
}

impl Enumerator {
    fn new<T: Scalar>(q: &Qubo<T>) -> Result<Self, OracleError> {
        let n = q.num_vars();
        guard(n)?;
        let exact = |c: &T| c.to_rational().ok_or_else(|| OracleError::NonFinite(format!("{c:?}")));
        let offset = exact(&q.offset())?;
        let linear: Vec<(usize, Rational)> =
            q.linear().iter().map(|(&i, c)| Ok((i, exact(c)?))).collect::<Result<_, OracleError>>()?;
        let quad: Vec<(usize, usize, Rational)> = q
            .quadratic()
            .iter()
            .map(|(&(i, j), c)| Ok((i, j, exact(c)?)))
            .collect::<Result<_, OracleError>>()?;
        let denom = lcm_denominators(
            std::iter::once(&offset)
                .chain(linear.iter().map(|(_, c)| c))
                .chain(quad.iter().map(|(_, _, c)| c)),
        )
        .ok_or(OracleError::Overflow)?;
        let int = |c: &Rational| i128::from(*c.numer()) * i128::from(denom / c.denom());
        let mut e = Enumerator {
            n,
            offset: int(&offset),
            linear: vec![0; n],
            matrix: vec![0; n * n],
        };
        for (i, c) in &linear {
            e.linear[*i] = int(c);
        }
        for (i, j, c) in &quad {
            e.matrix[i * n + j] = int(c);
            e.matrix[j * n + i] = int(c);
        }
        Ok(e)
    }

    /// Visits every assignment in Gray-code order with its scaled energy.
    fn scan(&self, mut visit: impl FnMut(i128, &[bool])) {
        let n = self.n;
        let mut x = vec![false; n];
        let mut field = self.linear.clone();
        let mut energy = self.offset;
        visit(energy, &x);
        for t in 1u64..(1u64 << n) {
            let i = t.trailing_zeros() as usize;
            let on = !x[i];
            x[i] = on;
            let sign = if on { 1 } else { -1 };
            energy += sign * field[i];
            let row = &self.matrix[i * n..(i + 1) * n];
            for (f, &c) in field.iter_mut().zip(row) {
                *f += sign * c;
            }
            visit(energy, &x);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForce<T> {
    pub min_energy: T,
    /// All minimizers when requested, otherwise the first one found.
    pub minimizers: Vec<Vec<bool>>,
}

pub fn brute_force_qubo<T: Scalar>(q: &Qubo<T>, enumerate_all: bool) -> Result<BruteForce<T>, OracleError> {
    let e = Enumerator::new(q)?;
    let mut best = i128::MAX;
    let mut minimizers: Vec<Vec<bool>> = Vec::new();
    e.scan(|energy, x| {
        if energy < best {
            best = energy;
            minimizers.clear();
            minimizers.push(x.to_vec());
        } else if energy == best && enumerate_all {
            minimizers.push(x.to_vec());
        }
    });
    minimizers.sort();
    Ok(BruteForce {
        min_energy: q.energy(&minimizers[0]),
        minimizers,
    })
}

/// A maximum clique by branch and bound with a greedy-colouring bound.
/// Vertices are returned in ascending order.
pub fn exact_max_clique(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let words = n.div_ceil(64);
    let mut adj = vec![0u64; n * words];
    for (a, &u) in order.iter().enumerate() {
        for (b, &v) in order.iter().enumerate() {
            if u != v && g.has_edge(u, v) {
                adj[a * words + b / 64] |= 1 << (b % 64);
            }
        }
    }
    let mut search = CliqueSearch {
        words,
        adj,
        best: Vec::new(),
        nodes: 0,
    };
    let mut all = vec![0u64; words];
    for v in 0..n {
        all[v / 64] |= 1 << (v % 64);
    }
    search.expand(&mut Vec::new(), all);
    log::debug!("max clique search on n={n} visited {} nodes", search.nodes);
    let mut clique: Vec<usize> = search.best.iter().map(|&k| order[k]).collect();
    clique.sort_unstable();
    debug_assert!(g.is_clique(&clique));
    clique
}

struct CliqueSearch {
    words: usize,
    adj: Vec<u64>,
    best: Vec<usize>,
    nodes: u64,
}

impl CliqueSearch {
    fn expand(&mut self, r: &mut Vec<usize>, mut p: Vec<u64>) {
        self.nodes += 1;
        if self.nodes.is_multiple_of(10_000_000) {
            log::info!("clique search: {} nodes, best {}", self.nodes, self.best.len());
        }
        let (verts, colours) = self.colour(&p);
        for idx in (0..verts.len()).rev() {
            if r.len() + colours[idx] <= self.best.len() {
                return;
            }
            let v = verts[idx];
            r.push(v);
            let row = &self.adj[v * self.words..(v + 1) * self.words];
            let next: Vec<u64> = p.iter().zip(row).map(|(a, b)| a & b).collect();
            if next.iter().all(|&w| w == 0) {
                if r.len() > self.best.len() {
                    self.best = r.clone();
                }
            } else {
                self.expand(r, next);
            }
            r.pop();
            p[v / 64] &= !(1 << (v % 64));
        }
    }

    /// Vertices of `p` in non-decreasing colour order with their colour
    /// numbers (1-based).
    fn colour(&self, p: &[u64]) -> (Vec<usize>, Vec<usize>) {
        let mut uncoloured = p.to_vec();
        let mut verts = Vec::new();
        let mut colours = Vec::new();
        let mut k = 0;
        while uncoloured.iter().any(|&w| w != 0) {
            k += 1;
            let mut q = uncoloured.clone();
            while let Some(v) = first_bit(&q) {
                verts.push(v);
                colours.push(k);
                uncoloured[v / 64] &= !(1 << (v % 64));
                q[v / 64] &= !(1 << (v % 64));
                let row = &self.adj[v * self.words..(v + 1) * self.words];
                for (a, b) in q.iter_mut().zip(row) {
                    *a &= !b;
                }
            }
        }
        (verts, colours)
    }
}

fn first_bit(bits: &[u64]) -> Option<usize> {
    bits.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(k, &w)| k * 64 + w.trailing_zeros() as usize)
}

/// A maximum cut by enumeration (vertex 0 kept on side `false`).
pub fn exact_max_cut(g: &Graph) -> Result<(Vec<bool>, usize), OracleError> {
    let n = g.n();
    guard(n)?;
    if n == 0 {
        return Ok((Vec::new(), 0));
    }
    let mut side = vec![false; n];
    let mut best = (side.clone(), 0usize);
    let mut cut: i64 = 0;
    for t in 1u64..(1u64 << (n - 1)) {
        let v = t.trailing_zeros() as usize + 1;
        side[v] = !side[v];
        for u in g.neighbors(v) {
            cut += if side[u] != side[v] { 1 } else { -1 };
        }
        if cut as usize > best.1 {
            best = (side.clone(), cut as usize);
        }
    }
    Ok(best)
}

/// Claims to check against the exact minimizer set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PersistencyClaims {
    /// Must hold in every minimizer.
    pub strong: BTreeMap<usize, bool>,
    /// Must hold, together with `relations`, in at least one minimizer.
    pub weak: BTreeMap<usize, bool>,
    /// `(j, i, complemented)`: `x_j = x_i ⊕ complemented`.
    pub relations: Vec<(usize, usize, bool)>,
}

impl From<&PersistencyResult> for PersistencyClaims {
    fn from(r: &PersistencyResult) -> Self {
        PersistencyClaims {
            strong: r.strong().clone(),
            weak: r.weak().clone(),
            relations: Vec::new(),
        }
    }
}

impl<T: Scalar> From<&ProbeOutcome<T>> for PersistencyClaims {
    fn from(o: &ProbeOutcome<T>) -> Self {
        PersistencyClaims {
            strong: BTreeMap::new(),
            weak: o.fixed().clone(),
            relations: o.relations().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport<T> {
    pub min_energy: T,
    pub num_minimizers: u64,
    /// Strong claims `(var, value)` contradicted by some minimizer.
    pub strong_violations: Vec<(usize, bool)>,
    /// Whether some minimizer satisfies all weak claims and relations.
    pub weak_consistent: bool,
}

impl<T> VerificationReport<T> {
    pub fn is_sound(&self) -> bool {
        self.strong_violations.is_empty() && self.weak_consistent
    }
}

pub fn verify_persistency<T: Scalar>(
    q: &Qubo<T>,
    claims: &PersistencyClaims,
) -> Result<VerificationReport<T>, OracleError> {
    let e = Enumerator::new(q)?;
    let strong: Vec<(usize, bool)> = claims.strong.iter().map(|(&v, &b)| (v, b)).collect();
    let weak: Vec<(usize, bool)> = claims.weak.iter().map(|(&v, &b)| (v, b)).collect();
    let mut best = i128::MAX;
    let mut witness: Vec<bool> = Vec::new();
    let mut count = 0u64;
    let mut violated = vec![false; strong.len()];
    let mut weak_ok = false;
    e.scan(|energy, x| {
        if energy > best {
            return;
        }
        if energy < best {
            best = energy;
            witness = x.to_vec();
            count = 0;
            violated.iter_mut().for_each(|v| *v = false);
            weak_ok = false;
        }
        count += 1;
        for (k, &(v, b)) in strong.iter().enumerate() {
            if x[v] != b {
                violated[k] = true;
            }
        }
        if !weak_ok {
            weak_ok = weak.iter().all(|&(v, b)| x[v] == b)
                && claims.relations.iter().all(|&(j, i, c)| x[j] == (x[i] ^ c));
        }
    });
    Ok(VerificationReport {
        min_energy: q.energy(&witness),
        num_minimizers: count,
        strong_violations: strong
            .iter()
            .zip(&violated)
            .filter(|(_, &bad)| bad)
            .map(|(&s, _)| s)
            .collect(),
        weak_consistent: weak_ok,
    })
}

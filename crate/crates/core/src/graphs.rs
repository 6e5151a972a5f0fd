//! Simple undirected graphs, DIMACS I/O and benchmark generators.
//!
//! Seeded generators use ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64`, so streams are identical across platforms.

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for GraphError {
    fn from(e: std::io::Error) -> Self {
        GraphError::Io(e.to_string())
    }
}

const WORD: usize = 64;

/// Undirected simple graph on vertices `0..n`, stored as adjacency bitsets.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    m: usize,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, m={})", self.n, self.m)
    }
}

impl Graph {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(WORD);
        Graph {
            n,
            words,
            rows: vec![0; n * words],
            m: 0,
        }
    }

    /// Panics on self-loops or out-of-range vertices; duplicates are merged.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        Graph::new(n).complement()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.m
    }

    fn row(&self, u: usize) -> &[u64] {
        &self.rows[u * self.words..(u + 1) * self.words]
    }

    fn set(&mut self, u: usize, v: usize, on: bool) {
        let idx = u * self.words + v / WORD;
        let bit = 1u64 << (v % WORD);
        if on {
            self.rows[idx] |= bit;
        } else {
            self.rows[idx] &= !bit;
        }
    }

    /// Adds `{u, v}`; returns `false` if it was already present.
    #[track_caller]
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        assert!(u < self.n && v < self.n, "vertex out of range");
        assert_ne!(u, v, "self-loops are not allowed");
        if self.has_edge(u, v) {
            return false;
        }
        self.set(u, v, true);
        self.set(v, u, true);
        self.m += 1;
        true
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v || !self.has_edge(u, v) {
            return false;
        }
        self.set(u, v, false);
        self.set(v, u, false);
        self.m -= 1;
        true
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.row(u)[v / WORD] >> (v % WORD) & 1 == 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(v).iter().enumerate().flat_map(|(k, &w)| BitIter(w).map(move |b| k * WORD + b))
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::new(self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    /// Subgraph induced by `vertices`; vertex `k` of the result is
    /// `vertices[k]`.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut g = Graph::new(vertices.len());
        for (a, &u) in vertices.iter().enumerate() {
            for (b, &v) in vertices.iter().enumerate().skip(a + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(a, &u)| {
            u < self.n && vertices[a + 1..].iter().all(|&v| v != u && self.has_edge(u, v))
        })
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for v in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    /// Adjacency rows as bitsets of `words()` 64-bit words each.
    pub fn adjacency_words(&self, v: usize) -> &[u64] {
        self.row(v)
    }

    pub fn words(&self) -> usize {
        self.words
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p edge {} {}\n", self.n, self.m);
        for (u, v) in self.edges() {
            out.push_str(&format!("e {} {}\n", u + 1, v + 1));
        }
        out
    }

    pub fn parse_dimacs<R: BufRead>(reader: R) -> Result<Graph, GraphError> {
        let mut g: Option<Graph> = None;
        let mut declared = 0usize;
        let mut duplicates = 0usize;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let err = |message: String| GraphError::Parse { line: lineno, message };
            let mut tok = line.split_whitespace();
            match tok.next() {
                None | Some("c") => {}
                Some("p") => {
                    if g.is_some() {
                        return Err(err("duplicate problem line".into()));
                    }
                    match tok.next() {
                        Some("edge") | Some("col") => {}
                        other => return Err(err(format!("unsupported format {other:?}"))),
                    }
                    let n: usize = parse_num(tok.next()).ok_or_else(|| err("bad vertex count".into()))?;
                    declared = parse_num(tok.next()).ok_or_else(|| err("bad edge count".into()))?;
                    g = Some(Graph::new(n));
                }
                Some("e") => {
                    let g = g.as_mut().ok_or_else(|| err("edge before problem line".into()))?;
                    let u: usize = parse_num(tok.next()).ok_or_else(|| err("bad edge endpoint".into()))?;
                    let v: usize = parse_num(tok.next()).ok_or_else(|| err("bad edge endpoint".into()))?;
                    for w in [u, v] {
                        if w == 0 || w > g.n {
                            return Err(err(format!("vertex {w} out of range 1..={}", g.n)));
                        }
                    }
                    if u == v {
                        return Err(err(format!("self-loop on vertex {u}")));
                    }
                    if !g.add_edge(u - 1, v - 1) {
                        log::warn!("line {lineno}: duplicate edge {u} {v} ignored");
                        duplicates += 1;
                    }
                }
                Some(other) => return Err(err(format!("unknown line type {other:?}"))),
            }
        }
        let g = g.ok_or(GraphError::Parse {
            line: 0,
            message: "missing problem line".into(),
        })?;
        if g.m + duplicates != declared {
            log::warn!("header declares {declared} edges, found {}", g.m + duplicates);
        }
        Ok(g)
    }
}

fn parse_num(s: Option<&str>) -> Option<usize> {
    s?.parse().ok()
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

pub fn read_dimacs(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
    Graph::parse_dimacs(BufReader::new(fs::File::open(path)?))
}

pub fn write_dimacs(g: &Graph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    Ok(fs::write(path, g.to_dimacs())?)
}

/// Bit strings of length `bits`, adjacent when they differ in at least
/// `d` positions.
pub fn gen_hamming(bits: u32, d: u32) -> Result<Graph, GraphError> {
    if !(1..=16).contains(&bits) || d < 1 || d > bits {
        return Err(GraphError::InvalidParameter(format!(
            "hamming requires 1 ≤ d ≤ bits ≤ 16, got bits={bits}, d={d}"
        )));
    }
    let n = 1usize << bits;
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if (u ^ v).count_ones() >= d {
                g.add_edge(u, v);
            }
        }
    }
    Ok(g)
}

/// c-fat ring graph: `l = max(1, ⌊n / (c·ln n)⌋)` classes of near-equal
/// size (larger classes first) on a ring, each class a clique, joined
/// completely to the two neighbouring classes.
pub fn gen_cfat(n: usize, c: usize) -> Result<Graph, GraphError> {
    if n < 2 || c < 1 {
        return Err(GraphError::InvalidParameter(format!(
            "c-fat requires n ≥ 2 and c ≥ 1, got n={n}, c={c}"
        )));
    }
    let l = ((n as f64 / (c as f64 * (n as f64).ln())).floor() as usize).clamp(1, n);
    let (base, extra) = (n / l, n % l);
    let mut class = Vec::with_capacity(n);
    for k in 0..l {
        let size = base + usize::from(k < extra);
        class.extend(std::iter::repeat_n(k, size));
    }
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            let (a, b) = (class[u], class[v]);
            let gap = b - a;
            if gap == 0 || gap == 1 || gap + 1 == l {
                g.add_edge(u, v);
            }
        }
    }
    Ok(g)
}

fn check_pct(density_pct: f64) -> Result<(), GraphError> {
    if (0.0..=100.0).contains(&density_pct) {
        Ok(())
    } else {
        Err(GraphError::InvalidParameter(format!(
            "density must lie in [0, 100], got {density_pct}"
        )))
    }
}

/// Erdős–Rényi `G(n, p)`: each pair, in lexicographic order, is kept when a
/// uniform draw is below `p`.
pub fn gen_gnp(n: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                g.add_edge(u, v);
            }
        }
    }
    Ok(g)
}

/// `g` graphs: Erdős–Rényi with edge density given in percent.
pub fn gen_g(n: usize, density_pct: f64, seed: u64) -> Result<Graph, GraphError> {
    check_pct(density_pct)?;
    gen_gnp(n, density_pct / 100.0, seed)
}

/// `U` graphs: uniform points in the unit square joined when their distance
/// is at most `r`, with `r` chosen so the edge probability equals
/// `density_pct / 100`.
pub fn gen_u(n: usize, density_pct: f64, seed: u64) -> Result<Graph, GraphError> {
    check_pct(density_pct)?;
    let mut g = Graph::new(n);
    if density_pct == 0.0 {
        return Ok(g);
    }
    let r = unit_square_radius(density_pct / 100.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
    for u in 0..n {
        for v in u + 1..n {
            let (dx, dy) = (pts[u].0 - pts[v].0, pts[u].1 - pts[v].1);
            if dx * dx + dy * dy <= r * r {
                g.add_edge(u, v);
            }
        }
    }
    Ok(g)
}

/// Distribution function of the distance between two uniform points in the
/// unit square.
pub fn unit_square_distance_cdf(d: f64) -> f64 {
    use std::f64::consts::PI;
    if d <= 0.0 {
        0.0
    } else if d <= 1.0 {
        PI * d * d - 8.0 / 3.0 * d.powi(3) + d.powi(4) / 2.0
    } else if d < std::f64::consts::SQRT_2 {
        let d2 = d * d;
        1.0 / 3.0 - 2.0 * d2 - d2 * d2 / 2.0
            + 4.0 / 3.0 * (2.0 * d2 + 1.0) * (d2 - 1.0).sqrt()
            + 2.0 * d2 * ((1.0 / d).asin() - (1.0 / d).acos())
    } else {
        1.0
    }
}

/// Radius at which the distance distribution reaches `p`.
pub fn unit_square_radius(p: f64) -> f64 {
    if p >= 1.0 {
        return std::f64::consts::SQRT_2;
    }
    let (mut lo, mut hi) = (0.0, std::f64::consts::SQRT_2);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if unit_square_distance_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbMode {
    Insert,
    Delete,
}

/// Inserts each non-edge, or deletes each edge, independently with
/// probability `p`. Pairs are visited in lexicographic order.
pub fn perturb(g: &Graph, p: f64, mode: PerturbMode, seed: u64) -> Result<Graph, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = g.clone();
    for u in 0..g.n {
        for v in u + 1..g.n {
            let present = g.has_edge(u, v);
            match mode {
                PerturbMode::Insert if !present && rng.gen::<f64>() < p => {
                    out.add_edge(u, v);
                }
                PerturbMode::Delete if present && rng.gen::<f64>() < p => {
                    out.remove_edge(u, v);
                }
                _ => {}
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamming_edge_counts() {
        assert_eq!(gen_hamming(6, 2).unwrap().num_edges(), 1824);
        assert_eq!(gen_hamming(6, 4).unwrap().num_edges(), 704);
        assert_eq!(gen_hamming(8, 4).unwrap().num_edges(), 20864);
        let k = gen_hamming(4, 1).unwrap();
        assert_eq!(k.num_edges(), 16 * 15 / 2);
        assert!(gen_hamming(4, 5).is_err());
    }

    #[test]
    fn cfat_matches_published_edge_counts() {
        for (n, c, m) in [
            (200, 1, 1534),
            (200, 2, 3235),
            (200, 5, 8473),
            (500, 1, 4459),
            (500, 2, 9139),
            (500, 5, 23191),
            (500, 10, 46627),
        ] {
            let g = gen_cfat(n, c).unwrap();
            assert_eq!(g.num_edges(), m, "c-fat{n}-{c}");
            assert!(g.is_connected());
        }
    }

    #[test]
    fn density_extremes() {
        assert_eq!(gen_g(30, 0.0, 1).unwrap().num_edges(), 0);
        assert_eq!(gen_g(30, 100.0, 1).unwrap().num_edges(), 435);
        assert_eq!(gen_u(30, 0.0, 1).unwrap().num_edges(), 0);
        assert_eq!(gen_u(30, 100.0, 1).unwrap().num_edges(), 435);
        assert!(gen_g(5, 101.0, 0).is_err());
    }

    #[test]
    fn seeded_generators_reproduce() {
        assert_eq!(gen_g(50, 10.0, 7).unwrap(), gen_g(50, 10.0, 7).unwrap());
        assert_ne!(gen_g(50, 10.0, 7).unwrap(), gen_g(50, 10.0, 8).unwrap());
        assert_eq!(gen_u(50, 10.0, 7).unwrap(), gen_u(50, 10.0, 7).unwrap());
    }

    #[test]
    fn distance_cdf_is_continuous_and_normalized() {
        let at_one = std::f64::consts::PI - 13.0 / 6.0;
        assert!((unit_square_distance_cdf(1.0) - at_one).abs() < 1e-12);
        assert!((unit_square_distance_cdf(1.0 + 1e-9) - at_one).abs() < 1e-6);
        assert!((unit_square_distance_cdf(std::f64::consts::SQRT_2 - 1e-12) - 1.0).abs() < 1e-5);
        let r = unit_square_radius(0.05);
        assert!((unit_square_distance_cdf(r) - 0.05).abs() < 1e-12);
    }

    #[test]
    fn distance_cdf_agrees_with_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let trials = 200_000;
        for d in [0.2, 0.7, 1.2] {
            let hits = (0..trials)
                .filter(|_| {
                    let (a, b, c, e): (f64, f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen(), rng.gen());
                    ((a - c).powi(2) + (b - e).powi(2)).sqrt() <= d
                })
                .count();
            let p = unit_square_distance_cdf(d);
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            assert!((hits as f64 / trials as f64 - p).abs() < 4.0 * sigma, "d={d}");
        }
    }

    #[test]
    fn perturb_extremes() {
        let g = gen_hamming(4, 2).unwrap();
        assert_eq!(perturb(&g, 0.0, PerturbMode::Delete, 1).unwrap(), g);
        assert_eq!(perturb(&g, 1.0, PerturbMode::Delete, 1).unwrap().num_edges(), 0);
        assert_eq!(perturb(&g, 1.0, PerturbMode::Insert, 1).unwrap(), Graph::complete(16));
    }

    #[test]
    fn dimacs_round_trip_and_dedupe() {
        let k3 = Graph::complete(3);
        assert_eq!(Graph::parse_dimacs(k3.to_dimacs().as_bytes()).unwrap(), k3);
        let text = "c test\np edge 3 2\ne 1 2\ne 2 1\n";
        let g = Graph::parse_dimacs(text.as_bytes()).unwrap();
        assert_eq!(g.num_edges(), 1);
        assert!(matches!(
            Graph::parse_dimacs("p edge 2 1\ne 1 3\n".as_bytes()),
            Err(GraphError::Parse { line: 2, .. })
        ));
        assert!(Graph::parse_dimacs("p edge 2 1\ne 1 1\n".as_bytes()).is_err());
        assert!(Graph::parse_dimacs("e 1 2\n".as_bytes()).is_err());
    }

    #[test]
    fn complement_and_induced() {
        let g = gen_cfat(30, 1).unwrap();
        assert_eq!(g.complement().complement(), g);
        let h = g.induced(&[0, 1, 2]);
        assert_eq!(h.n(), 3);
        assert_eq!(h.has_edge(0, 1), g.has_edge(0, 1));
        assert!(Graph::complete(4).is_clique(&[0, 1, 2, 3]));
        assert!(!Graph::from_edges(3, [(0, 1), (1, 2)]).is_clique(&[0, 1, 2]));
    }
}

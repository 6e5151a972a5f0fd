//! Experiment drivers. Each returns rows in a deterministic order; rows
//! carry every parameter and seed needed to regenerate them.

use std::time::Instant;

use qubo_persist::decompose::{max_clique_split, savings_ratio, ExactLeafSolver};
use qubo_persist::graphs::{gen_cfat, gen_g, gen_gnp, gen_hamming, gen_u, perturb, Graph, PerturbMode};
use qubo_persist::oracle::exact_max_clique;
use qubo_persist::persistency::analyze;
use qubo_persist::probing::probe;
use qubo_persist::problems::{clique_qubo, dense_size, maxcut_ising, CliqueEncoding};
use qubo_persist::IntQubo;
use rayon::prelude::*;
use serde::Serialize;

use crate::Error;

pub const DEFAULT_PROBE_PASSES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CliqueFamily {
    Cfat,
    Hamming,
}

impl CliqueFamily {
    pub fn build(self, n: usize, q: usize) -> Result<Graph, Error> {
        Ok(match self {
            CliqueFamily::Cfat => gen_cfat(n, q)?,
            CliqueFamily::Hamming => gen_hamming(n as u32, q as u32)?,
        })
    }

    pub fn label(self) -> &'static str {
        match self {
            CliqueFamily::Cfat => "c-fat",
            CliqueFamily::Hamming => "Hamming",
        }
    }
}

fn clique4(g: &Graph) -> IntQubo {
    clique_qubo(g, &CliqueEncoding::complement_penalty()).expect("default weights are positive")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub graph: &'static str,
    pub n: usize,
    pub q: usize,
    pub vertices: usize,
    pub edges: usize,
    pub strong: f64,
    pub weak: f64,
    pub probe: f64,
    pub probe_passes: usize,
    pub seconds: f64,
}

pub const TABLE1: [(CliqueFamily, usize, usize); 8] = [
    (CliqueFamily::Cfat, 200, 1),
    (CliqueFamily::Cfat, 200, 5),
    (CliqueFamily::Cfat, 500, 1),
    (CliqueFamily::Cfat, 500, 5),
    (CliqueFamily::Hamming, 6, 2),
    (CliqueFamily::Hamming, 6, 4),
    (CliqueFamily::Hamming, 8, 2),
    (CliqueFamily::Hamming, 8, 4),
];

pub fn table1_row(family: CliqueFamily, n: usize, q: usize) -> Result<Table1Row, Error> {
    let g = family.build(n, q)?;
    table1_row_for(family.label(), n, q, &g)
}

pub fn table1_row_for(label: &'static str, n: usize, q: usize, g: &Graph) -> Result<Table1Row, Error> {
    let start = Instant::now();
    let qubo = clique4(g);
    let r = analyze(&qubo)?;
    let p = probe(&qubo, DEFAULT_PROBE_PASSES)?;
    Ok(Table1Row {
        graph: label,
        n,
        q,
        vertices: g.n(),
        edges: g.num_edges(),
        strong: r.strong_pct(),
        weak: r.weak_pct(),
        probe: p.probe_pct(),
        probe_passes: p.passes(),
        seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn table1() -> Result<Vec<Table1Row>, Error> {
    TABLE1.iter().map(|&(f, n, q)| table1_row(f, n, q)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table2Row {
    pub graph: &'static str,
    pub n: usize,
    pub param: usize,
    pub formulation: &'static str,
    pub k: Option<usize>,
    pub size: usize,
    pub dense_size: usize,
    pub strong: f64,
    pub weak: f64,
}

pub fn table2() -> Result<Vec<Table2Row>, Error> {
    let mut rows = Vec::new();
    for (family, n, param) in [(CliqueFamily::Hamming, 8, 2), (CliqueFamily::Cfat, 200, 1)] {
        let g = family.build(n, param)?;
        let k = exact_max_clique(&g).len();
        let encodings: [(&'static str, Option<usize>, IntQubo); 2] = [
            ("eq4", None, clique4(&g)),
            (
                "eq5",
                Some(k),
                clique_qubo(&g, &CliqueEncoding::fixed_size(k)).expect("K from the oracle is in range"),
            ),
        ];
        for (formulation, k, q) in encodings {
            let r = analyze(&q)?;
            rows.push(Table2Row {
                graph: family.label(),
                n,
                param,
                formulation,
                k,
                size: q.size(),
                dense_size: dense_size(&q),
                strong: r.strong_pct(),
                weak: r.weak_pct(),
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CutFamily {
    #[serde(rename = "g")]
    G,
    #[serde(rename = "U")]
    U,
}

impl CutFamily {
    pub fn build(self, n: usize, density_pct: f64, seed: u64) -> Result<Graph, Error> {
        Ok(match self {
            CutFamily::G => gen_g(n, density_pct, seed)?,
            CutFamily::U => gen_u(n, density_pct, seed)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table3Config {
    /// `(family, n, density %)`.
    pub rows: Vec<(CutFamily, usize, f64)>,
    pub seeds: Vec<u64>,
    pub probe_passes: usize,
}

impl Table3Config {
    pub fn full(seeds: Vec<u64>) -> Self {
        Table3Config {
            rows: vec![
                (CutFamily::G, 500, 2.5),
                (CutFamily::G, 500, 5.0),
                (CutFamily::G, 500, 10.0),
                (CutFamily::G, 1000, 2.5),
                (CutFamily::G, 1000, 5.0),
                (CutFamily::U, 500, 5.0),
                (CutFamily::U, 500, 10.0),
                (CutFamily::U, 1000, 5.0),
                (CutFamily::U, 1000, 10.0),
            ],
            seeds,
            probe_passes: DEFAULT_PROBE_PASSES,
        }
    }

    /// The full-scale densities on `n` vertices.
    pub fn desk(n: usize, seeds: Vec<u64>) -> Self {
        Table3Config {
            rows: vec![
                (CutFamily::G, n, 2.5),
                (CutFamily::G, n, 5.0),
                (CutFamily::G, n, 10.0),
                (CutFamily::U, n, 5.0),
                (CutFamily::U, n, 10.0),
            ],
            seeds,
            probe_passes: DEFAULT_PROBE_PASSES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table3Row {
    pub graph: CutFamily,
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub edges: usize,
    pub strong: f64,
    pub weak: f64,
    pub probe: f64,
    pub seconds: f64,
}

pub fn table3(cfg: &Table3Config) -> Result<Vec<Table3Row>, Error> {
    let jobs: Vec<(CutFamily, usize, f64, u64)> = cfg
        .rows
        .iter()
        .flat_map(|&(f, n, p)| cfg.seeds.iter().map(move |&s| (f, n, p, s)))
        .collect();
    jobs.par_iter()
        .map(|&(family, n, p, seed)| {
            let start = Instant::now();
            let g = family.build(n, p, seed)?;
            let q = maxcut_ising::<i64>(&g).to_qubo();
            let r = analyze(&q)?;
            let pr = probe(&q, cfg.probe_passes)?;
            Ok(Table3Row {
                graph: family,
                n,
                p,
                seed,
                edges: g.num_edges(),
                strong: r.strong_pct(),
                weak: r.weak_pct(),
                probe: pr.probe_pct(),
                seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Fig2Graph {
    #[serde(rename = "ham8-2")]
    Ham8_2,
    #[serde(rename = "ham8-4")]
    Ham8_4,
    #[serde(rename = "fat500-2")]
    Fat500_2,
}

impl Fig2Graph {
    pub fn build(self) -> Result<Graph, Error> {
        Ok(match self {
            Fig2Graph::Ham8_2 => gen_hamming(8, 2)?,
            Fig2Graph::Ham8_4 => gen_hamming(8, 4)?,
            Fig2Graph::Fat500_2 => gen_cfat(500, 2)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Config {
    pub graph: Fig2Graph,
    pub modes: Vec<PerturbMode>,
    pub grid: Vec<f64>,
    pub seeds: Vec<u64>,
}

impl Fig2Config {
    /// `p = 0, 0.1, …, 1` in both modes.
    pub fn desk(graph: Fig2Graph, seeds: Vec<u64>) -> Self {
        Fig2Config {
            graph,
            modes: vec![PerturbMode::Insert, PerturbMode::Delete],
            grid: (0..=10).map(|i| i as f64 / 10.0).collect(),
            seeds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig2Row {
    pub graph: Fig2Graph,
    pub mode: &'static str,
    pub p: f64,
    pub seed: u64,
    pub edges: usize,
    pub strong: f64,
    pub weak: f64,
}

pub fn fig2(cfg: &Fig2Config) -> Result<Vec<Fig2Row>, Error> {
    let base = cfg.graph.build()?;
    let mut jobs = Vec::new();
    for &mode in &cfg.modes {
        for &p in &cfg.grid {
            for &seed in &cfg.seeds {
                jobs.push((mode, p, seed));
            }
        }
    }
    jobs.par_iter()
        .map(|&(mode, p, seed)| {
            let g = perturb(&base, p, mode, seed)?;
            let r = analyze(&clique4(&g))?;
            Ok(Fig2Row {
                graph: cfg.graph,
                mode: match mode {
                    PerturbMode::Insert => "insert",
                    PerturbMode::Delete => "delete",
                },
                p,
                seed,
                edges: g.num_edges(),
                strong: r.strong_pct(),
                weak: r.weak_pct(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Config {
    pub n: usize,
    pub threshold: usize,
    pub expected_edges: Vec<usize>,
    pub seeds: Vec<u64>,
}

impl Fig3Config {
    pub fn desk(seeds: Vec<u64>) -> Self {
        Fig3Config {
            n: 100,
            threshold: 15,
            expected_edges: (1..=8).map(|k| 400 * k).collect(),
            seeds,
        }
    }

    pub fn full(seeds: Vec<u64>) -> Self {
        Fig3Config {
            n: 500,
            threshold: 45,
            expected_edges: (2..=8).map(|k| 5000 * k).collect(),
            seeds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig3Row {
    pub n: usize,
    pub expected_edges: usize,
    pub p: f64,
    pub seed: u64,
    pub threshold: usize,
    pub edges: usize,
    pub n_qpbo: u64,
    pub n_no_qpbo: u64,
    pub ratio: f64,
    pub clique_size: usize,
    pub eliminated: u64,
    pub seconds: f64,
}

pub fn fig3(cfg: &Fig3Config) -> Result<Vec<Fig3Row>, Error> {
    let pairs = (cfg.n * cfg.n.saturating_sub(1) / 2).max(1);
    let solver = ExactLeafSolver {
        threshold: cfg.threshold,
    };
    let jobs: Vec<(usize, u64)> = cfg
        .expected_edges
        .iter()
        .flat_map(|&m| cfg.seeds.iter().map(move |&s| (m, s)))
        .collect();
    jobs.par_iter()
        .map(|&(m, seed)| {
            let start = Instant::now();
            let p = (m as f64 / pairs as f64).min(1.0);
            let g = gen_gnp(cfg.n, p, seed)?;
            let (c_with, with) = max_clique_split(&g, &solver, true)?;
            let (c_without, without) = max_clique_split(&g, &solver, false)?;
            if c_with.len() != c_without.len() {
                return Err(Error::Validation(format!(
                    "clique sizes differ between modes: {} vs {}",
                    c_with.len(),
                    c_without.len()
                )));
            }
            Ok(Fig3Row {
                n: cfg.n,
                expected_edges: m,
                p,
                seed,
                threshold: cfg.threshold,
                edges: g.num_edges(),
                n_qpbo: with.n_calls,
                n_no_qpbo: without.n_calls,
                ratio: savings_ratio(with.n_calls, without.n_calls),
                clique_size: c_with.len(),
                eliminated: with.vertices_eliminated_by_persistency,
                seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    cov / (vx * vy).sqrt()
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Mean of `value` per distinct key, keys in first-seen order.
pub fn means_by<K: PartialEq + Copy>(items: impl IntoIterator<Item = (K, f64)>) -> Vec<(K, f64)> {
    let mut acc: Vec<(K, f64, usize)> = Vec::new();
    for (k, v) in items {
        match acc.iter_mut().find(|(key, _, _)| *key == k) {
            Some(e) => {
                e.1 += v;
                e.2 += 1;
            }
            None => acc.push((k, v, 1)),
        }
    }
    acc.into_iter().map(|(k, s, c)| (k, s / c as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spearman_of_monotone_and_reversed() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert!((spearman(&x, &[10.0, 20.0, 25.0, 100.0]) - 1.0).abs() < 1e-12);
        assert!((spearman(&x, &[4.0, 3.0, 2.0, 1.0]) + 1.0).abs() < 1e-12);
        assert_eq!(ranks(&[5.0, 1.0, 5.0]), vec![2.5, 1.0, 2.5]);
    }

    #[test]
    fn means_group_in_order() {
        assert_eq!(means_by([(1, 2.0), (2, 4.0), (1, 4.0)]), vec![(1, 3.0), (2, 4.0)]);
    }

    #[test]
    fn small_hamming_row() {
        let r = table1_row(CliqueFamily::Hamming, 6, 2).unwrap();
        assert_eq!((r.strong, r.weak, r.probe), (0.0, 100.0, 100.0));
    }
}

//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any criterion fails.
//!
//! Set `QUBO_PERSIST_DIMACS_DIR` to a directory holding `c-fat200-1.clq`
//! and friends to compare the c-fat generator against the benchmark files.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qubo_persist::decompose::{max_clique_split, ExactLeafSolver};
use qubo_persist::graphs::{gen_cfat, gen_gnp, read_dimacs, Graph};
use qubo_persist::network::roof_dual;
use qubo_persist::oracle::{brute_force_qubo, exact_max_clique, verify_persistency, PersistencyClaims};
use qubo_persist::persistency::{analyze, reduce, ReductionMode};
use qubo_persist::probing::probe;
use qubo_persist::problems::{clique_qubo, maxcut_ising, CliqueEncoding};
use qubo_persist::{IntQubo, Qubo, Rational};
use qubo_persist_cli::experiments::{
    self, fig2, fig3, means_by, spearman, table1_row, table1_row_for, table2, table3, CliqueFamily, CutFamily,
    Fig2Config, Fig2Graph, Fig3Config, Table3Config,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn seeds5() -> Vec<u64> {
    (0..5).collect()
}

fn criterion_1() -> Outcome {
    let mut failures = Vec::new();
    let mut cells = Vec::new();
    for (n, d, want) in [(6, 2, 100.0), (8, 2, 100.0), (6, 4, 0.0), (8, 4, 0.0)] {
        let r = table1_row(CliqueFamily::Hamming, n, d).unwrap();
        cells.push(format!("H({n},{d}) {:.2}/{:.2}/{:.2} in {:.1}s", r.strong, r.weak, r.probe, r.seconds));
        if (r.strong, r.weak, r.probe) != (0.0, want, want) {
            failures.push(format!("H({n},{d}) percentages"));
        }
        if r.seconds >= 60.0 {
            failures.push(format!("H({n},{d}) took {:.1}s", r.seconds));
        }
    }
    outcome(failures.is_empty(), format!("{}{}", cells.join("; "), suffix(&failures)))
}

fn suffix(failures: &[String]) -> String {
    if failures.is_empty() {
        String::new()
    } else {
        format!(" | failed: {}", failures.join(", "))
    }
}

/// Published `(n, c, |E|, ω)` for the benchmark instances.
const CFAT_PUBLISHED: [(usize, usize, usize, usize); 4] =
    [(200, 1, 1534, 12), (200, 5, 8473, 58), (500, 1, 4459, 14), (500, 5, 23191, 64)];

fn criterion_2() -> Outcome {
    let dir = std::env::var_os("QUBO_PERSIST_DIMACS_DIR").map(PathBuf::from);
    let mut failures = Vec::new();
    let mut cells = Vec::new();
    let mut notes = Vec::new();
    for (n, c, m, omega) in CFAT_PUBLISHED {
        let generated = gen_cfat(n, c).unwrap();
        let file = dir.as_ref().map(|d| d.join(format!("c-fat{n}-{c}.clq"))).filter(|p| p.exists());
        let g: Graph = match file {
            Some(path) => {
                let ingested = read_dimacs(&path).unwrap();
                if ingested == generated {
                    notes.push(format!("c-fat{n}-{c}: generator matches file"));
                    generated
                } else {
                    notes.push(format!("c-fat{n}-{c}: generator differs, using file"));
                    ingested
                }
            }
            None => {
                let k = exact_max_clique(&generated).len();
                if generated.num_edges() != m || k != omega {
                    failures.push(format!("c-fat{n}-{c} generator gives |E|={} ω={k}", generated.num_edges()));
                }
                notes.push(format!("c-fat{n}-{c}: no file, generator checked against |E|={m} ω={omega}"));
                generated
            }
        };
        let r = table1_row_for("c-fat", n, c, &g).unwrap();
        cells.push(format!("{n}-{c} {:.2}/{:.2}/{:.2} in {:.1}s", r.strong, r.weak, r.probe, r.seconds));
        if (r.strong, r.weak, r.probe) != (0.0, 0.0, 100.0) {
            failures.push(format!("c-fat{n}-{c} percentages"));
        }
        if r.seconds >= 600.0 {
            failures.push(format!("c-fat{n}-{c} took {:.1}s", r.seconds));
        }
    }
    outcome(
        failures.is_empty(),
        format!("{} [{}]{}", cells.join("; "), notes.join("; "), suffix(&failures)),
    )
}

fn criterion_3() -> Outcome {
    let rows = table2().unwrap();
    let find = |graph: &str, f: &str| rows.iter().find(|r| r.graph == graph && r.formulation == f).unwrap();
    let h4 = find("Hamming", "eq4");
    let h5 = find("Hamming", "eq5");
    let c4 = find("c-fat", "eq4");
    let pass = h4.size == 1280 && h4.weak == 100.0 && h5.strong == 0.0 && h5.weak == 0.0;
    outcome(
        pass,
        format!(
            "H(8,2) eq4 size {} weak {:.2}; eq5 K={} strong {:.2} weak {:.2}; c-fat(200,1) eq4 size {} strong {:.2} weak {:.2} (reported, not asserted)",
            h4.size,
            h4.weak,
            h5.k.unwrap(),
            h5.strong,
            h5.weak,
            c4.size,
            c4.strong,
            c4.weak
        ),
    )
}

fn criterion_4() -> Outcome {
    let rows = table3(&Table3Config::desk(200, seeds5())).unwrap();
    let mut failures = Vec::new();
    let mut cells = Vec::new();
    for ((graph, p), group) in group_rows(&rows) {
        let weak: Vec<f64> = group.iter().map(|r| r.weak).collect();
        cells.push(format!("{graph:?}{p}%: weak {:?}", weak.iter().map(|w| format!("{w:.1}")).collect::<Vec<_>>()));
        let ok = match graph {
            CutFamily::G if p >= 5.0 => group.iter().all(|r| r.weak == 100.0),
            CutFamily::G => group.iter().all(|r| r.weak > 0.0 && r.weak < 100.0 && r.probe > r.weak),
            CutFamily::U => group.iter().all(|r| r.weak <= 5.0 && r.strong == 0.0),
        };
        if !ok {
            failures.push(format!("{graph:?} {p}%"));
        }
    }
    outcome(failures.is_empty(), format!("n=200, 5 seeds: {}{}", cells.join("; "), suffix(&failures)))
}

fn group_rows(rows: &[experiments::Table3Row]) -> Vec<((CutFamily, f64), Vec<&experiments::Table3Row>)> {
    let mut out: Vec<((CutFamily, f64), Vec<&experiments::Table3Row>)> = Vec::new();
    for r in rows {
        match out.iter_mut().find(|(k, _)| *k == (r.graph, r.p)) {
            Some((_, v)) => v.push(r),
            None => out.push(((r.graph, r.p), vec![r])),
        }
    }
    out
}

fn criterion_5() -> Outcome {
    let rows = fig2(&Fig2Config::desk(Fig2Graph::Ham8_2, seeds5())).unwrap();
    let delete: Vec<_> = rows.iter().filter(|r| r.mode == "delete").collect();
    let at_zero = delete.iter().filter(|r| r.p == 0.0).all(|r| r.weak == 100.0);
    let max_after = delete.iter().filter(|r| r.p >= 0.1).map(|r| r.weak).fold(0.0, f64::max);
    let means = means_by(rows.iter().filter(|r| r.mode == "insert").map(|r| (r.p.to_bits(), r.strong)));
    let (ps, strong): (Vec<f64>, Vec<f64>) = means.iter().map(|&(p, s)| (f64::from_bits(p), s)).unzip();
    let rho = spearman(&ps, &strong);
    let curve: Vec<String> = ps.iter().zip(&strong).map(|(p, s)| format!("{p:.1}:{s:.1}")).collect();
    outcome(
        at_zero && max_after < 20.0 && rho > 0.9,
        format!(
            "delete: weak 100 at p=0 {at_zero}, max weak for p>=0.1 {max_after:.2}; insert mean strong {}; spearman {rho:.3} (need > 0.9)",
            curve.join(" ")
        ),
    )
}

fn criterion_6() -> Outcome {
    let rows = fig3(&Fig3Config::desk(seeds5())).unwrap();
    let means = means_by(rows.iter().map(|r| (r.expected_edges, r.ratio)));
    let sparsest = means[0].1;
    let half = means.len() / 2;
    let best = |s: &[(usize, f64)]| s.iter().map(|&(_, r)| -r).fold(f64::MIN, f64::max);
    let (sparse_savings, dense_savings) = (best(&means[..half]), best(&means[half..]));
    let cells: Vec<String> = means.iter().map(|(m, r)| format!("{m}:{r:+.3}")).collect();
    outcome(
        sparsest <= 0.0 && sparse_savings > 0.0 && sparse_savings >= dense_savings,
        format!(
            "mean ratio by expected edges {}; sparsest {sparsest:+.3}; best savings sparse half {sparse_savings:.3}, dense half {dense_savings:.3}",
            cells.join(" ")
        ),
    )
}

fn random_qubo(rng: &mut ChaCha8Rng, max_n: usize, submodular: bool) -> IntQubo {
    let n = rng.gen_range(1..=max_n);
    let density = rng.gen_range(0.1..=1.0);
    let mut q = Qubo::new(n);
    for i in 0..n {
        q.add_linear(i, rng.gen_range(-4..=4));
        for j in i + 1..n {
            if rng.gen_bool(density) {
                q.add_quadratic(i, j, if submodular { rng.gen_range(-4..=0) } else { rng.gen_range(-4..=4) });
            }
        }
    }
    q
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut strong_bad, mut loss, mut bound_bad, mut probe_bad) = (0, 0, 0, 0);
    for _ in 0..500 {
        let q = random_qubo(&mut rng, 14, false);
        let min = brute_force_qubo(&q, false).unwrap().min_energy;
        let r = analyze(&q).unwrap();
        let report = verify_persistency(&q, &PersistencyClaims::from(&r)).unwrap();
        strong_bad += report.strong_violations.len();
        let red = reduce(&q, &r, ReductionMode::Weak).unwrap();
        let weak_min = brute_force_qubo(red.reduced(), false).unwrap().min_energy + red.delta();
        let p = probe(&q, 10).unwrap();
        let pred = p.reduction();
        let probe_min = brute_force_qubo(pred.reduced(), false).unwrap().min_energy + pred.delta();
        if !report.weak_consistent || weak_min != min || probe_min != min {
            loss += 1;
        }
        if roof_dual(&q).unwrap() > Rational::from_integer(min) {
            bound_bad += 1;
        }
        if p.probe_pct() < r.weak_pct() {
            probe_bad += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        strong_bad + loss + bound_bad + probe_bad == 0 && elapsed < Duration::from_secs(300),
        format!(
            "500 QUBOs: strong violations {strong_bad}, optimum losses {loss}, bound violations {bound_bad}, probe < weak {probe_bad}, {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut bad = 0;
    for _ in 0..100 {
        let q = random_qubo(&mut rng, 14, true);
        let min = brute_force_qubo(&q, false).unwrap().min_energy;
        let r = analyze(&q).unwrap();
        if roof_dual(&q).unwrap() != Rational::from_integer(min) || r.weak_pct() != 100.0 {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("100 submodular QUBOs: {bad} not tight"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let solver = ExactLeafSolver { threshold: 12 };
    let (mut runs, mut bad) = (0, 0);
    for i in 0..50 {
        let n = rng.gen_range(1..=40);
        let p = [0.2, 0.5, 0.8][i % 3];
        let g = gen_gnp(n, p, rng.gen()).unwrap();
        let k = exact_max_clique(&g).len();
        for use_persistency in [false, true] {
            runs += 1;
            let (c, _) = max_clique_split(&g, &solver, use_persistency).unwrap();
            if c.len() != k || !g.is_clique(&c) {
                bad += 1;
            }
        }
    }
    outcome(bad == 0, format!("{runs} runs, {bad} mismatches"))
}

/// Exhaustive maximum clique and maximum cut over all vertex subsets.
fn exhaustive_clique_and_cut(g: &Graph) -> (usize, usize) {
    let n = g.n();
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let (mut clique, mut cut) = (0, 0);
    for s in 0u32..1 << n {
        let inside = |v: usize| s >> v & 1 == 1;
        let crossing = edges.iter().filter(|&&(u, v)| inside(u) != inside(v)).count();
        cut = cut.max(crossing);
        let size = s.count_ones() as usize;
        if size > clique && edges.iter().filter(|&&(u, v)| inside(u) && inside(v)).count() == size * (size.max(1) - 1) / 2 {
            clique = size;
        }
    }
    (clique, cut)
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut bad = BTreeMap::new();
    let count = 100;
    for _ in 0..count {
        let n = rng.gen_range(1..=16);
        let g = gen_gnp(n, rng.gen_range(0.1..0.9), rng.gen()).unwrap();
        let (omega, max_cut) = exhaustive_clique_and_cut(&g);
        let q4: IntQubo = clique_qubo(&g, &CliqueEncoding::complement_penalty()).unwrap();
        if -brute_force_qubo(&q4, false).unwrap().min_energy != omega as i64 {
            *bad.entry("clique").or_insert(0) += 1;
        }
        let ising_min = brute_force_qubo(&maxcut_ising::<i64>(&g).to_qubo(), false).unwrap().min_energy;
        if (g.num_edges() as i64 - ising_min) != 2 * max_cut as i64 {
            *bad.entry("cut").or_insert(0) += 1;
        }
    }
    outcome(bad.is_empty(), format!("{count} graphs with n <= 16, mismatches {bad:?}"))
}

fn main() -> ExitCode {
    let criteria: [fn() -> Outcome; 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    let mut failed = 0;
    for (i, f) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !result.pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} - {}",
            i + 1,
            if result.pass { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

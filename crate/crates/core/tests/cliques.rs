use proptest::prelude::*;
use qubo_persist::decompose::{max_clique_split, ExactLeafSolver};
use qubo_persist::graphs::{gen_cfat, gen_g, gen_gnp, gen_hamming, perturb, Graph, PerturbMode};
use qubo_persist::oracle::{brute_force_qubo, exact_max_clique, exact_max_cut};
use qubo_persist::persistency::{analyze, reduce, ReductionMode};
use qubo_persist::problems::{clique_qubo, maxcut_ising, CliqueEncoding};
use qubo_persist::IntQubo;

/// Bron–Kerbosch with pivoting, independent of the colouring search.
fn bron_kerbosch(g: &Graph) -> usize {
    fn rec(g: &Graph, r: usize, p: Vec<usize>, mut x: Vec<usize>, best: &mut usize) {
        if p.is_empty() && x.is_empty() {
            *best = (*best).max(r);
            return;
        }
        let pivot = p
            .iter()
            .chain(&x)
            .copied()
            .max_by_key(|&u| p.iter().filter(|&&v| g.has_edge(u, v)).count())
            .unwrap();
        let mut p_rest = p.clone();
        for v in p.into_iter().filter(|&v| !g.has_edge(pivot, v)) {
            let np = p_rest.iter().copied().filter(|&w| g.has_edge(v, w)).collect();
            let nx = x.iter().copied().filter(|&w| g.has_edge(v, w)).collect();
            rec(g, r + 1, np, nx, best);
            p_rest.retain(|&w| w != v);
            x.push(v);
        }
    }
    let mut best = 0;
    rec(g, 0, (0..g.n()).collect(), Vec::new(), &mut best);
    best
}

fn graph_strategy(max_n: usize, probs: &'static [f64]) -> impl Strategy<Value = Graph> {
    (1..=max_n, prop::sample::select(probs), any::<u64>())
        .prop_map(|(n, p, seed)| gen_gnp(n, p, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn clique_oracles_agree(g in graph_strategy(40, &[0.2, 0.5, 0.8])) {
        let c = exact_max_clique(&g);
        prop_assert!(g.is_clique(&c));
        prop_assert_eq!(c.len(), bron_kerbosch(&g));
    }

    #[test]
    fn complement_penalty_minimum_is_clique_number(g in graph_strategy(16, &[0.3, 0.6, 0.9])) {
        let q: IntQubo = clique_qubo(&g, &CliqueEncoding::complement_penalty()).unwrap();
        let min = brute_force_qubo(&q, false).unwrap().min_energy;
        prop_assert_eq!(-min, exact_max_clique(&g).len() as i64);
    }

    #[test]
    fn ising_minimum_gives_max_cut(g in graph_strategy(14, &[0.3, 0.6])) {
        let q = maxcut_ising::<i64>(&g).to_qubo();
        let min = brute_force_qubo(&q, false).unwrap().min_energy;
        let (side, cut) = exact_max_cut(&g).unwrap();
        prop_assert_eq!((g.num_edges() as i64 - min) / 2, cut as i64);
        prop_assert_eq!(g.edges().filter(|&(u, v)| side[u] != side[v]).count(), cut);
    }

    #[test]
    fn splitting_finds_maximum_cliques(g in graph_strategy(40, &[0.2, 0.5, 0.8])) {
        let solver = ExactLeafSolver { threshold: 12 };
        let k = exact_max_clique(&g).len();
        for use_persistency in [false, true] {
            let (c, stats) = max_clique_split(&g, &solver, use_persistency).unwrap();
            prop_assert!(g.is_clique(&c));
            prop_assert_eq!(c.len(), k);
            prop_assert!(stats.max_depth <= g.n());
        }
    }
}

#[test]
fn fixed_size_encoding_zero_iff_k_clique() {
    for seed in 0..5 {
        let g = gen_gnp(10, 0.5, seed).unwrap();
        let k = exact_max_clique(&g).len();
        let q: IntQubo = clique_qubo(&g, &CliqueEncoding::fixed_size(k)).unwrap();
        let r = brute_force_qubo(&q, true).unwrap();
        assert_eq!(r.min_energy, 0);
        for x in &r.minimizers {
            let support: Vec<usize> = (0..10).filter(|&v| x[v]).collect();
            assert_eq!(support.len(), k);
            assert!(g.is_clique(&support));
        }
    }
}

#[test]
fn cfat_clique_numbers() {
    for (n, c, omega) in [(200, 1, 12), (200, 2, 24), (200, 5, 58)] {
        let g = gen_cfat(n, c).unwrap();
        assert_eq!(exact_max_clique(&g).len(), omega);
        assert_eq!(bron_kerbosch(&g), omega);
    }
}

#[test]
fn hamming_weak_reduction_lifts_to_maximum_clique() {
    let g = gen_hamming(8, 2).unwrap();
    let q: IntQubo = clique_qubo(&g, &CliqueEncoding::complement_penalty()).unwrap();
    let r = analyze(&q).unwrap();
    let red = reduce(&q, &r, ReductionMode::Weak).unwrap();
    assert_eq!(red.reduced().num_vars(), 0);
    let x = red.lift(&[]);
    let clique: Vec<usize> = (0..g.n()).filter(|&v| x[v]).collect();
    assert!(g.is_clique(&clique));
    assert_eq!(clique.len(), 128);
}

#[test]
fn hamming_weak_persistency_collapses_under_deletion() {
    let g = gen_hamming(8, 2).unwrap();
    let h = perturb(&g, 0.05, PerturbMode::Delete, 1).unwrap();
    let q: IntQubo = clique_qubo(&h, &CliqueEncoding::complement_penalty()).unwrap();
    assert!(analyze(&q).unwrap().weak_pct() < 20.0);
}

#[test]
fn g_graph_edge_count_is_binomial() {
    let g = gen_g(500, 5.0, 11).unwrap();
    let pairs = 500.0 * 499.0 / 2.0;
    let sigma = (pairs * 0.05 * 0.95f64).sqrt();
    assert!((g.num_edges() as f64 - pairs * 0.05).abs() < 3.0 * sigma);
}

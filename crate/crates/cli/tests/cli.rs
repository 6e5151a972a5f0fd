use std::fs;
use std::process::{Command, Output};

use qubo_persist::graphs::read_dimacs;
use qubo_persist::RationalQubo;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qubo-persist"))
        .args(args)
        .env_remove("QUBO_PERSIST_OUT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn reduce_writes_a_reduced_qubo() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("q.txt");
    // x0 is forced to 1; the x1 x2 term is left undecided.
    fs::write(&input, "p qubo 3 4\n0 0 -3\n0 1 1\n1 2 -1\n2 2 1/2\n").unwrap();
    let out = dir.path().join("reduced.txt");
    let records = dir.path().join("records.csv");
    let o = run(&[
        "reduce",
        "--input",
        input.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
        "--records",
        records.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("variables: 3"));
    let reduced = RationalQubo::from_text(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(reduced.num_vars() < 3);
    assert!(fs::read_to_string(&records).unwrap().starts_with("var,value,class\n0,1,"));
}

#[test]
fn generate_round_trips_through_dimacs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.clq");
    let o = run(&["generate", "--family", "hamming", "--n", "6", "--param", "2", "-o", path.to_str().unwrap()]);
    assert!(o.status.success());
    let g = read_dimacs(&path).unwrap();
    assert_eq!((g.n(), g.num_edges()), (64, 64 * 57 / 2));

    let o = run(&["reduce", "--graph", path.to_str().unwrap(), "--problem", "clique4", "--probe"]);
    let text = stdout(&o);
    assert!(text.contains("weak: 100.00%") && text.contains("probe: 100.00%"), "{text}");
}

#[test]
fn solve_clique_with_splitting_is_checked() {
    let o = run(&[
        "solve", "clique", "--family", "gnp", "--n", "60", "--param", "0.5", "--seed", "3", "--split", "--threshold",
        "10", "--persistency", "--check",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("graph,n,m,mode,n_calls,clique_size,seconds\ngnp,60,"));
    assert!(text.contains("clique: "));
}

#[test]
fn oracle_verifies_persistencies() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("q.txt");
    fs::write(&input, "p qubo 3 3\n0 0 -1\n0 1 2\n1 2 -3\n").unwrap();
    let o = run(&["oracle", "--input", input.to_str().unwrap(), "--verify", "--probe", "--all"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("sound true"));
}

#[test]
fn exit_codes_distinguish_failures() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.clq");
    fs::write(&bad, "p edge 3 1\ne 1 4\n").unwrap();
    assert_eq!(run(&["generate", "--graph", bad.to_str().unwrap()]).status.code(), Some(2));

    let guard = run(&["solve", "cut", "--family", "gnp", "--n", "40", "--param", "0.2"]);
    assert_eq!(guard.status.code(), Some(3));

    assert_eq!(run(&["reduce"]).status.code(), Some(1));
}

#[test]
fn experiment_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["experiment", "table2", "--json", "--out-dir", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("table2.csv")).unwrap();
    assert!(csv.starts_with("graph,n,param,formulation,k,size,dense_size,strong,weak\n"));
    assert!(csv.contains("Hamming,8,2,eq4,,1280,65536,0.0,100.0"));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("table2.json")).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 4);
}

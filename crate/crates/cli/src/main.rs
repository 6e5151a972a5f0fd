use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qubo_persist::decompose::{max_clique_split_with, ExactLeafSolver, Shrink, SplitOptions, DEFAULT_THRESHOLD};
use qubo_persist::graphs::{read_dimacs, Graph, GraphError};
use qubo_persist::oracle::{brute_force_qubo, exact_max_clique, exact_max_cut, verify_persistency, OracleError, PersistencyClaims};
use qubo_persist::persistency::{analyze, reduce, ReductionMode};
use qubo_persist::probing::probe;
use qubo_persist::problems::{clique_qubo, decode_clique, decode_cut, maxcut_ising, CliqueEncoding};
use qubo_persist::{Assignment, IntQubo, ModelError, Qubo, RationalQubo, Scalar};
use qubo_persist_cli::experiments::{self, Fig2Config, Fig2Graph, Fig3Config, Table3Config};
use qubo_persist_cli::{generate, write_csv, write_json, Error, Family};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "qubo-persist", version, about = "Roof-duality persistencies for QUBO reduction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute persistencies of a QUBO and write the reduced problem.
    Reduce(ReduceArgs),
    /// Regenerate one of the tables or figures as CSV.
    Experiment(ExperimentArgs),
    /// Solve Maximum Clique or Max-Cut on a graph.
    Solve(SolveArgs),
    /// Brute-force a small QUBO, optionally checking its persistencies.
    Oracle(OracleArgs),
    /// Write a generated graph in DIMACS format.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct GraphSource {
    /// DIMACS graph file.
    #[arg(long, conflicts_with = "family")]
    graph: Option<PathBuf>,
    #[arg(long, value_enum)]
    family: Option<Family>,
    /// Vertex count, or word length for Hamming graphs.
    #[arg(long)]
    n: Option<usize>,
    /// c for c-fat, d for Hamming, density % for g and U, edge probability for gnp.
    #[arg(long)]
    param: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl GraphSource {
    fn is_given(&self) -> bool {
        self.graph.is_some() || self.family.is_some()
    }

    fn load(&self) -> Result<Graph> {
        if let Some(path) = &self.graph {
            return read_dimacs(path).with_context(|| format!("reading {}", path.display()));
        }
        let Some(family) = self.family else {
            bail!("give either --graph or --family");
        };
        let (Some(n), Some(param)) = (self.n, self.param) else {
            bail!("--family needs --n and --param");
        };
        Ok(generate(family, n, param, self.seed)?)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProblemKind {
    /// Clique with a complement-edge penalty.
    Clique4,
    /// Clique of fixed size K (K from the exact solver unless --k is given).
    Clique5,
    Maxcut,
}

#[derive(Args)]
struct ReduceArgs {
    /// QUBO in `p qubo` text format.
    #[arg(long, conflicts_with_all = ["graph", "family"])]
    input: Option<PathBuf>,
    #[command(flatten)]
    source: GraphSource,
    #[arg(long, value_enum)]
    problem: Option<ProblemKind>,
    #[arg(long)]
    k: Option<usize>,
    /// Run probing on top of the weak persistencies.
    #[arg(long)]
    probe: bool,
    #[arg(long, default_value_t = 10)]
    passes: usize,
    /// Fix only the strong persistencies.
    #[arg(long, conflicts_with = "probe")]
    strong_only: bool,
    /// Where to write the reduced QUBO.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Where to write per-variable persistency records.
    #[arg(long)]
    records: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExperimentKind {
    Table1,
    Table2,
    Table3,
    Fig2,
    Fig3,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Fig2Choice {
    #[value(name = "ham8-2")]
    Ham8_2,
    #[value(name = "ham8-4")]
    Ham8_4,
    #[value(name = "fat500-2")]
    Fat500_2,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(value_enum)]
    which: ExperimentKind,
    /// Number of random instances per configuration.
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    seed_base: u64,
    /// Vertex count for table3 at desk scale.
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// Run at full instance sizes.
    #[arg(long)]
    paper_scale: bool,
    #[arg(long, value_enum, default_value = "ham8-2")]
    fig2_graph: Fig2Choice,
    #[arg(long, env = "QUBO_PERSIST_OUT", default_value = "results")]
    out_dir: PathBuf,
    /// Also write the rows as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolveKind {
    Clique,
    Cut,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(value_enum)]
    problem: SolveKind,
    #[command(flatten)]
    source: GraphSource,
    /// Split into subgraphs no larger than --threshold.
    #[arg(long)]
    split: bool,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: usize,
    /// Shrink each subgraph with persistencies before splitting.
    #[arg(long)]
    persistency: bool,
    /// Shrink with probing as well (implies --persistency).
    #[arg(long)]
    probing: bool,
    /// Cross-check the clique size against the unsplit exact solver.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    input: PathBuf,
    /// Print every minimizer.
    #[arg(long)]
    all: bool,
    /// Check the computed persistencies against the minimizer set.
    #[arg(long)]
    verify: bool,
    /// With --verify, check probing results too.
    #[arg(long)]
    probe: bool,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Reduce(a) => run_reduce(a),
        Command::Experiment(a) => run_experiment(a),
        Command::Solve(a) => run_solve(a),
        Command::Oracle(a) => run_oracle(a),
        Command::Generate(a) => run_generate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 for malformed input, 3 for size guards, 4 for failed validation.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        let code = if let Some(e) = cause.downcast_ref::<Error>() {
            match e {
                Error::Validation(_) => 4,
                Error::Graph(GraphError::Parse { .. }) | Error::Model(ModelError::Parse { .. }) => 2,
                Error::Oracle(OracleError::SizeGuard { .. }) => 3,
                _ => 0,
            }
        } else if let Some(GraphError::Parse { .. }) = cause.downcast_ref::<GraphError>() {
            2
        } else if let Some(ModelError::Parse { .. }) = cause.downcast_ref::<ModelError>() {
            2
        } else if let Some(OracleError::SizeGuard { .. }) = cause.downcast_ref::<OracleError>() {
            3
        } else {
            0
        };
        if code != 0 {
            return code;
        }
    }
    1
}

fn read_qubo(path: &Path) -> Result<RationalQubo> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Qubo::read(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn run_reduce(a: ReduceArgs) -> Result<()> {
    if let Some(path) = &a.input {
        return reduce_qubo(&read_qubo(path)?, &a);
    }
    if !a.source.is_given() {
        bail!("give --input, --graph or --family");
    }
    let g = a.source.load()?;
    let Some(problem) = a.problem else {
        bail!("--problem is required with a graph");
    };
    let q: IntQubo = match problem {
        ProblemKind::Clique4 => clique_qubo(&g, &CliqueEncoding::complement_penalty())?,
        ProblemKind::Clique5 => {
            let k = a.k.unwrap_or_else(|| exact_max_clique(&g).len());
            println!("K = {k}");
            clique_qubo(&g, &CliqueEncoding::fixed_size(k))?
        }
        ProblemKind::Maxcut => maxcut_ising::<i64>(&g).to_qubo(),
    };
    reduce_qubo(&q, &a)
}

fn reduce_qubo<T: Scalar>(q: &Qubo<T>, a: &ReduceArgs) -> Result<()> {
    let start = Instant::now();
    let r = analyze(q)?;
    println!("variables: {}", q.num_vars());
    println!("terms: {}", q.size());
    println!("roof dual bound: {}", r.bound());
    println!("strong: {:.2}%", r.strong_pct());
    println!("weak: {:.2}%", r.weak_pct());
    let (reduction, records) = if a.probe {
        let p = probe(q, a.passes)?;
        println!("probe: {:.2}% ({} passes)", p.probe_pct(), p.passes());
        (p.reduction().clone(), p.to_records())
    } else {
        let mode = if a.strong_only { ReductionMode::Strong } else { ReductionMode::Weak };
        (reduce(q, &r, mode)?, r.to_records())
    };
    println!("reduced variables: {}", reduction.reduced().num_vars());
    println!("seconds: {:.3}", start.elapsed().as_secs_f64());
    if let Some(path) = &a.records {
        fs::write(path, records).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &a.output {
        let mut text = format!("# constant from fixed variables: {}\n", reduction.delta().to_text());
        text.push_str(&reduction.reduced().to_text());
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn seeds(a: &ExperimentArgs) -> Vec<u64> {
    (a.seed_base..a.seed_base + a.seeds).collect()
}

fn emit<R: Serialize>(a: &ExperimentArgs, name: &str, rows: &[R]) -> Result<()> {
    let csv_path = a.out_dir.join(format!("{name}.csv"));
    write_csv(&csv_path, rows)?;
    println!("wrote {} rows to {}", rows.len(), csv_path.display());
    if a.json {
        let json_path = a.out_dir.join(format!("{name}.json"));
        write_json(&json_path, rows)?;
        println!("wrote {}", json_path.display());
    }
    Ok(())
}

fn run_experiment(a: ExperimentArgs) -> Result<()> {
    match a.which {
        ExperimentKind::Table1 => {
            let rows = experiments::table1()?;
            for r in &rows {
                println!(
                    "{:8} {:4} {:2}  strong {:6.2}  weak {:6.2}  probe {:6.2}  {:.2}s",
                    r.graph, r.n, r.q, r.strong, r.weak, r.probe, r.seconds
                );
            }
            emit(&a, "table1", &rows)
        }
        ExperimentKind::Table2 => {
            let rows = experiments::table2()?;
            for r in &rows {
                println!(
                    "{:8} {:4} {:2} {}  size {:6} (dense {:6})  strong {:6.2}  weak {:6.2}",
                    r.graph, r.n, r.param, r.formulation, r.size, r.dense_size, r.strong, r.weak
                );
            }
            emit(&a, "table2", &rows)
        }
        ExperimentKind::Table3 => {
            let cfg = if a.paper_scale {
                Table3Config::full(seeds(&a))
            } else {
                Table3Config::desk(a.n, seeds(&a))
            };
            let rows = experiments::table3(&cfg)?;
            let means = experiments::means_by(rows.iter().map(|r| ((r.graph, r.n, r.p.to_bits()), r.weak)));
            for ((graph, n, p), weak) in means {
                println!("{graph:?} n={n} p={}%  mean weak {weak:.2}", f64::from_bits(p));
            }
            emit(&a, "table3", &rows)
        }
        ExperimentKind::Fig2 => {
            let graph = match a.fig2_graph {
                Fig2Choice::Ham8_2 => Fig2Graph::Ham8_2,
                Fig2Choice::Ham8_4 => Fig2Graph::Ham8_4,
                Fig2Choice::Fat500_2 => Fig2Graph::Fat500_2,
            };
            let rows = experiments::fig2(&Fig2Config::desk(graph, seeds(&a)))?;
            for mode in ["insert", "delete"] {
                let means = experiments::means_by(
                    rows.iter()
                        .filter(|r| r.mode == mode)
                        .map(|r| (r.p.to_bits(), if mode == "insert" { r.strong } else { r.weak })),
                );
                let (ps, vs): (Vec<f64>, Vec<f64>) = means.iter().map(|&(p, v)| (f64::from_bits(p), v)).unzip();
                let label = if mode == "insert" { "strong" } else { "weak" };
                let cells: Vec<String> = ps.iter().zip(&vs).map(|(p, v)| format!("{p:.1}:{v:.1}")).collect();
                println!("{mode} ({label}): {}", cells.join(" "));
                println!("{mode} spearman: {:.3}", experiments::spearman(&ps, &vs));
            }
            emit(&a, "fig2", &rows)
        }
        ExperimentKind::Fig3 => {
            let cfg = if a.paper_scale {
                Fig3Config::full(seeds(&a))
            } else {
                Fig3Config::desk(seeds(&a))
            };
            let rows = experiments::fig3(&cfg)?;
            for (m, ratio) in experiments::means_by(rows.iter().map(|r| (r.expected_edges, r.ratio))) {
                println!("edges {m:6}  mean ratio {ratio:+.3}");
            }
            emit(&a, "fig3", &rows)
        }
    }
}

#[derive(Serialize)]
struct SolveRow {
    graph: String,
    n: usize,
    m: usize,
    mode: &'static str,
    n_calls: u64,
    clique_size: usize,
    seconds: f64,
}

fn run_solve(a: SolveArgs) -> Result<()> {
    let g = a.source.load()?;
    let name = match (&a.source.graph, a.source.family) {
        (Some(p), _) => p.display().to_string(),
        (None, Some(f)) => format!("{f:?}").to_lowercase(),
        _ => String::new(),
    };
    match a.problem {
        SolveKind::Clique => {
            let start = Instant::now();
            let shrink = if a.probing {
                Shrink::Probing
            } else if a.persistency {
                Shrink::Persistency
            } else {
                Shrink::None
            };
            let (clique, n_calls, mode) = if a.split {
                let solver = ExactLeafSolver { threshold: a.threshold };
                let opts = SplitOptions {
                    shrink,
                    ..SplitOptions::default()
                };
                let (c, stats) = max_clique_split_with(&g, &solver, &opts)?;
                let mode = match shrink {
                    Shrink::None => "split",
                    Shrink::Persistency => "split+persistency",
                    Shrink::Probing => "split+probing",
                };
                (c, stats.n_calls, mode)
            } else {
                (exact_max_clique(&g), u64::from(g.n() > 0), "exact")
            };
            let seconds = start.elapsed().as_secs_f64();
            let mut bits = vec![false; g.n()];
            for &v in &clique {
                bits[v] = true;
            }
            let decoded = decode_clique(&g, &Assignment::from_bools(&bits))?;
            if !decoded.is_clique {
                return Err(Error::Validation("returned vertex set is not a clique".into()).into());
            }
            if a.check {
                let k = exact_max_clique(&g).len();
                if k != clique.len() {
                    return Err(Error::Validation(format!("clique size {} but the exact solver finds {k}", clique.len())).into());
                }
            }
            let row = SolveRow {
                graph: name,
                n: g.n(),
                m: g.num_edges(),
                mode,
                n_calls,
                clique_size: clique.len(),
                seconds,
            };
            let mut w = csv::Writer::from_writer(io::stdout());
            w.serialize(&row)?;
            w.flush()?;
            let list: Vec<String> = clique.iter().map(|v| v.to_string()).collect();
            println!("clique: {}", list.join(" "));
        }
        SolveKind::Cut => {
            let (side, value) = exact_max_cut(&g)?;
            let decoded = decode_cut(&g, &Assignment::from_bools(&side))?;
            if decoded.value != value {
                return Err(Error::Validation(format!("cut value {value} but the partition cuts {}", decoded.value)).into());
            }
            println!("cut value: {value}");
            let s: String = side.iter().map(|&b| if b { '1' } else { '0' }).collect();
            println!("side: {s}");
        }
    }
    Ok(())
}

fn bits(x: &[bool]) -> String {
    x.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn run_oracle(a: OracleArgs) -> Result<()> {
    let q = read_qubo(&a.input)?;
    let bf = brute_force_qubo(&q, a.all)?;
    println!("minimum: {}", bf.min_energy);
    for x in &bf.minimizers {
        println!("minimizer: {}", bits(x));
    }
    if a.verify {
        let r = analyze(&q)?;
        let report = verify_persistency(&q, &PersistencyClaims::from(&r))?;
        println!("minimizers: {}", report.num_minimizers);
        println!(
            "persistency: strong {:.2}% weak {:.2}% sound {}",
            r.strong_pct(),
            r.weak_pct(),
            report.is_sound()
        );
        if !report.is_sound() {
            return Err(Error::Validation(format!("persistencies are not sound: {report:?}")).into());
        }
        if a.probe {
            let p = probe(&q, 10)?;
            let report = verify_persistency(&q, &PersistencyClaims::from(&p))?;
            println!("probing: {:.2}% sound {}", p.probe_pct(), report.is_sound());
            if !report.is_sound() {
                return Err(Error::Validation(format!("probing claims are not sound: {report:?}")).into());
            }
        }
    }
    Ok(())
}

fn run_generate(a: GenerateArgs) -> Result<()> {
    let g = a.source.load()?;
    write_out(a.output.as_deref(), &g.to_dimacs())
}

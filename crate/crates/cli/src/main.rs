//! `grafion` command-line front end.
//!
//! Batch subcommands read the graph from `--graph FILE` (JSON, or the
//! whole-graph CSV format for any other extension) and write it back when
//! they change it. Exit codes: 0 success, 1 user error, 2 internal error.

mod failure;
mod graph_file;
mod render;
mod repl;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use grafion_core::algorithms::{self, Mode, PageRankConfig, WeightSpec};
use grafion_core::engine::Engine;
use grafion_core::io::{self, CsvOptions};
use grafion_core::layout;
use grafion_core::query::{self, ExecContext, Params, Value};
use grafion_core::server::{Credentials, Server, DEFAULT_BIND};
use grafion_core::PropertyGraph;
use serde_json::json;

use failure::Failure;
use graph_file::GraphFile;

#[derive(Parser, Debug)]
#[command(name = "grafion", version, about = "Embedded property-graph database")]
struct Cli {
    /// Graph file: `.json` interchange or whole-graph CSV.
    #[arg(long, global = true)]
    graph: Option<PathBuf>,
    /// Emit one JSON object instead of a table.
    #[arg(long, global = true)]
    json: bool,
    /// Field delimiter for CSV graph files.
    #[arg(long, global = true, default_value = ",")]
    delimiter: char,
    /// Build undirected graphs when the file does not say.
    #[arg(long, global = true)]
    undirected: bool,
    /// Base directory for `file:///` URLs.
    #[arg(long, global = true, env = "GRAFION_IMPORT_DIR")]
    import_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Create one node per row of a headed CSV file.
    ImportCsv {
        file: PathBuf,
        #[arg(long, default_value = "Entity")]
        label: String,
        /// Rows applied per atomic batch.
        #[arg(long, default_value_t = 1000)]
        batch_size: usize,
    },
    /// Write the whole graph as CSV.
    ExportCsv {
        file: PathBuf,
        /// Suffix non-text values with their type.
        #[arg(long)]
        use_types: bool,
    },
    /// Run a graph algorithm.
    Algo {
        name: Algorithm,
        #[arg(long)]
        weight_key: Option<String>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        source: Option<u64>,
        #[arg(long)]
        target: Option<u64>,
    },
    /// Compute node coordinates.
    Layout {
        kind: LayoutKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        iterations: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Serve the graph over TCP.
    Serve {
        #[arg(long, default_value = DEFAULT_BIND)]
        bind: String,
        #[arg(long, default_value = "neo4j")]
        user: String,
        #[arg(long, env = "GRAFION_PASS")]
        pass: String,
    },
    /// Execute one statement.
    Run {
        #[arg(short, long)]
        query: String,
        /// Parameter as NAME=JSON; repeatable.
        #[arg(short, long = "param")]
        params: Vec<String>,
    },
    /// Interactive prompt.
    Repl,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Algorithm {
    Pagerank,
    Degree,
    Closeness,
    Betweenness,
    Eigenvector,
    Louvain,
    Wcc,
    Components,
    Dijkstra,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Raw,
    Normalized,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum LayoutKind {
    Circular,
    Spectral,
    Spring,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let file = GraphFile::new(cli.graph.clone(), cli.delimiter, cli.undirected)?;
    let ctx = ExecContext { import_dir: cli.import_dir.clone() };
    match cli.command {
        Command::ImportCsv { file: rows, label, batch_size } => import_rows(&file, &rows, &label, batch_size, cli.json),
        Command::ExportCsv { file: out, use_types } => {
            let g = file.load()?;
            let options = CsvOptions { delimiter: file.delimiter, use_types, kind: g.kind() };
            let counts = io::export_csv_all(&g, &out, &options)?;
            let doc = json!({"file": out, "nodes": counts.nodes, "relationships": counts.edges});
            print_doc(&doc, cli.json, || format!("exported {} nodes and {} relationships to {}", counts.nodes, counts.edges, out.display()));
            Ok(())
        }
        Command::Algo { name, weight_key, mode, source, target } => {
            let g = file.load()?;
            let args = AlgoArgs { weights: weight_key.map_or_else(WeightSpec::unweighted, WeightSpec::key), mode, source, target };
            let (doc, table) = run_algorithm(&g, name, &args)?;
            if cli.json {
                println!("{doc}");
            } else {
                print!("{table}");
            }
            Ok(())
        }
        Command::Layout { kind, seed, iterations, output } => {
            let g = file.load()?;
            let (name, positions) = match kind {
                LayoutKind::Circular => ("circular", layout::circular_layout(&g)?),
                LayoutKind::Spectral => ("spectral", layout::spectral_layout(&g)?),
                LayoutKind::Spring => ("spring", layout::spring_layout(&g, iterations, seed)?),
            };
            let text = io::layout_json(&g, name, &positions)?;
            std::fs::write(&output, text + "\n").map_err(io::IoError::from)?;
            let doc = json!({"layout": name, "file": output, "nodes": positions.len()});
            print_doc(&doc, cli.json, || format!("wrote {} positions to {}", positions.len(), output.display()));
            Ok(())
        }
        Command::Serve { bind, user, pass } => {
            let engine = Engine::new(file.load_or_empty()?, ctx);
            let server = Server::bind(bind.as_str(), engine, Credentials::new(user, pass))
                .map_err(|e| Failure::user(format!("cannot bind {bind}: {e}")))?;
            eprintln!("listening on {}", server.local_addr().map_err(Failure::internal)?);
            server.serve().map_err(Failure::internal)
        }
        Command::Run { query: text, params } => {
            let params = parse_params(&params)?;
            let mut g = file.load_or_empty()?;
            let stmt = query::parse(&text).map_err(|e| Failure::query(&text, e))?;
            let rs = query::execute(&mut g, &stmt, &params, &ctx).map_err(|e| Failure::query(&text, e))?;
            if stmt.writes() && file.path.is_some() {
                file.save(&g)?;
            }
            if cli.json {
                println!("{}", rs.to_json());
            } else {
                print!("{}", render::rowset(&rs));
            }
            Ok(())
        }
        Command::Repl => repl::run(file, ctx),
    }
}

fn print_doc(doc: &serde_json::Value, as_json: bool, text: impl FnOnce() -> String) {
    if as_json {
        println!("{doc}");
    } else {
        println!("{}", text());
    }
}

fn parse_params(raw: &[String]) -> Result<Params, Failure> {
    let mut params = Params::new();
    for p in raw {
        let (name, value) = p.split_once('=').ok_or_else(|| Failure::user(format!("parameter {p:?} is not NAME=JSON")))?;
        // Bare words that are not JSON pass as text.
        let json = serde_json::from_str(value).unwrap_or_else(|_| serde_json::Value::String(value.to_string()));
        let value = Value::from_json(&json).map_err(|e| Failure::user(format!("parameter {name}: {e}")))?;
        params.insert(name.to_string(), value);
    }
    Ok(params)
}

fn import_rows(file: &GraphFile, rows: &std::path::Path, label: &str, batch_size: usize, as_json: bool) -> Result<(), Failure> {
    if batch_size == 0 {
        return Err(Failure::user("--batch-size must be positive"));
    }
    let path = file.path.as_ref().ok_or_else(|| Failure::user("import-csv needs --graph FILE to write to"))?;
    let mut g = file.load_or_empty()?;
    let records = io::load_csv(rows, file.delimiter)?;
    let mut batches = 0;
    for chunk in records.chunks(batch_size) {
        // Each batch lands whole or not at all.
        let mut work = g.clone();
        for row in chunk {
            work.add_node([label], row.clone());
        }
        g = work;
        batches += 1;
    }
    file.save(&g)?;
    let doc = json!({"file": path, "nodes_created": records.len(), "batches": batches});
    print_doc(&doc, as_json, || format!("created {} {label} nodes in {batches} batches", records.len()));
    Ok(())
}

struct AlgoArgs {
    weights: WeightSpec,
    mode: Option<ModeArg>,
    source: Option<u64>,
    target: Option<u64>,
}

/// The library result as JSON, plus a table for humans.
fn run_algorithm(g: &PropertyGraph, name: Algorithm, args: &AlgoArgs) -> Result<(serde_json::Value, String), Failure> {
    let mode = match args.mode {
        Some(ModeArg::Raw) => Mode::Raw,
        Some(ModeArg::Normalized) | None => Mode::Normalized,
    };
    let scores = |s: algorithms::CentralityScores| {
        let table = render::table(
            &["node", "score"],
            s.iter().map(|(id, v)| vec![id.to_string(), v.to_string()]).collect(),
        );
        (json!(s), table)
    };
    let groups = |gs: Vec<std::collections::BTreeSet<u64>>| {
        let table = render::table(
            &["component", "nodes"],
            gs.iter().enumerate().map(|(i, c)| vec![i.to_string(), join(c.iter())]).collect(),
        );
        (json!(gs), table)
    };
    Ok(match name {
        Algorithm::Pagerank => {
            let config = PageRankConfig { weights: args.weights.key.as_ref().map(|_| args.weights.clone()), ..Default::default() };
            scores(algorithms::pagerank(g, &config)?)
        }
        Algorithm::Degree => scores(algorithms::degree_centrality(g, mode)?),
        Algorithm::Closeness => scores(algorithms::closeness_centrality(g, mode)?),
        Algorithm::Betweenness => scores(algorithms::betweenness_centrality(g, mode)?),
        Algorithm::Eigenvector => scores(algorithms::eigenvector_centrality(g, 1000, 1e-9)?),
        Algorithm::Wcc => groups(algorithms::weakly_connected_components(g)?.communities()),
        Algorithm::Components => groups(algorithms::connected_components(g)?),
        Algorithm::Louvain => {
            let r = algorithms::louvain(g, &args.weights)?;
            let communities = r.partition.communities();
            let mut table = render::table(
                &["community", "nodes"],
                communities.iter().enumerate().map(|(i, c)| vec![i.to_string(), join(c.iter())]).collect(),
            );
            table.push_str(&format!("modularity: {}\n", r.modularity));
            (json!({"communities": communities, "modularity": r.modularity, "levels": r.levels}), table)
        }
        Algorithm::Dijkstra => {
            let (Some(s), Some(t)) = (args.source, args.target) else {
                return Err(Failure::user("dijkstra needs --source and --target"));
            };
            let p = algorithms::dijkstra(g, s, t, &args.weights)?;
            let table = render::table(
                &["node", "cost"],
                p.nodes.iter().zip(&p.cumulative).map(|(n, c)| vec![n.to_string(), c.to_string()]).collect(),
            );
            (json!({"path": p.nodes, "cost": p.cost}), table)
        }
    })
}

fn join<T: ToString>(items: impl Iterator<Item = T>) -> String {
    items.map(|i| i.to_string()).collect::<Vec<_>>().join(", ")
}

//! `atlas`: build, inspect, lay out, search and serve the 8-puzzle state space.
//!
//! Exit codes: 0 success, 1 domain error (bad file, unsolvable state, failed
//! validation), 2 usage error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use atlas_core::export::{write_edgelist, write_positions_csv};
use atlas_core::format::{load_graph, load_positions, save_graph, save_positions};
use atlas_core::layout::{compute_layout, mean_neighbor_chord};
use atlas_core::search::write_trace;
use atlas_core::{
    build_graph, canonical_goal, check_invariants, compute_stats, rank, unrank, LayoutKind, LayoutParams,
    PuzzleState, SearchAlgo, SearchSession, StateGraph,
};
use atlas_service::{ServeConfig, DEFAULT_SESSION_TTL};

#[derive(Parser)]
#[command(name = "atlas", version, about = "8-puzzle state-space atlas")]
struct Cli {
    /// Suppress human-readable output.
    #[arg(long, global = true)]
    quiet: bool,
    /// Print a single JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate all reachable states and write the graph file.
    Build {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "123456780")]
        goal: PuzzleState,
    },
    /// Load a graph file, print its statistics and check every invariant.
    Validate { graph: PathBuf },
    /// Compute a layout and write the position file.
    Layout(LayoutArgs),
    /// Run one search to completion and print the result.
    Search(SearchArgs),
    /// Serve the HTTP API and the explorer assets.
    Serve(ServeArgs),
    /// Export a graph or position file as text.
    Export(ExportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Force,
    Depth,
    Heuristic,
}

impl From<KindArg> for LayoutKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Force => LayoutKind::Force,
            KindArg::Depth => LayoutKind::Depth,
            KindArg::Heuristic => LayoutKind::Heuristic,
        }
    }
}

#[derive(Args)]
struct LayoutArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    iterations: Option<u32>,
    /// Root state for the depth layout (defaults to the graph's goal).
    #[arg(long)]
    root: Option<PuzzleState>,
    #[arg(long)]
    samples: Option<u32>,
    #[arg(long)]
    repulsion: Option<f64>,
    #[arg(long)]
    attraction: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Bfs,
    Dfs,
    Astar,
}

impl From<AlgoArg> for SearchAlgo {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Bfs => SearchAlgo::Bfs,
            AlgoArg::Dfs => SearchAlgo::Dfs,
            AlgoArg::Astar => SearchAlgo::AStar,
        }
    }
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, value_enum)]
    algo: AlgoArg,
    #[arg(long)]
    start: PuzzleState,
    #[arg(long)]
    goal: Option<PuzzleState>,
    /// Graph file; built in memory when omitted.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Write the event stream as JSONL.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Listen address; the ATLAS_BIND environment variable takes precedence.
    #[arg(long, default_value = "127.0.0.1:8080")]
    bind: SocketAddr,
    /// Idle seconds before a search session is dropped.
    #[arg(long, default_value_t = DEFAULT_SESSION_TTL.as_secs())]
    session_ttl: u64,
    /// Directory of explorer assets served at `/`.
    #[arg(long)]
    static_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Edgelist,
    CsvPositions,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long, value_enum)]
    format: ExportFormat,
    /// Graph file (edgelist).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Position file (csv-positions).
    #[arg(long)]
    positions: Option<PathBuf>,
    /// Output path, `-` for stdout.
    #[arg(long, default_value = "-")]
    out: PathBuf,
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<atlas_core::Error> for Failure {
    fn from(e: atlas_core::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

struct Output {
    quiet: bool,
    json: bool,
}

impl Output {
    fn text(&self, line: impl AsRef<str>) {
        if !self.quiet && !self.json {
            println!("{}", line.as_ref());
        }
    }

    fn document(&self, doc: serde_json::Value) {
        if self.json {
            println!("{doc}");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Output { quiet: cli.quiet, json: cli.json };
    let result = match cli.command {
        Command::Build { out: path, goal } => build(&out, &path, &goal),
        Command::Validate { graph } => validate(&out, &graph),
        Command::Layout(args) => layout(&out, args),
        Command::Search(args) => search(&out, args),
        Command::Serve(args) => serve(args),
        Command::Export(args) => export(&out, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn build(out: &Output, path: &Path, goal: &PuzzleState) -> CmdResult {
    let g = build_graph(goal)?;
    save_graph(&g, path)?;
    out.text(format!(
        "wrote {} ({} nodes, {} edges)",
        path.display(),
        g.node_count(),
        g.undirected_edge_count()
    ));
    out.document(json!({
        "path": path,
        "node_count": g.node_count(),
        "undirected_edge_count": g.undirected_edge_count(),
        "directed_entry_count": g.directed_entry_count(),
        "goal_id": g.goal_id(),
    }));
    Ok(())
}

fn validate(out: &Output, path: &Path) -> CmdResult {
    let g = load_graph(path)?;
    let stats = compute_stats(&g);
    let problems = check_invariants(&g);

    out.text(format!("node_count {}", stats.node_count));
    out.text(format!("undirected_edge_count {}", stats.undirected_edge_count));
    out.text(format!("directed_entry_count {}", stats.directed_entry_count));
    let degrees: Vec<String> = stats.degree_histogram.iter().map(|(d, n)| format!("{d}:{n}")).collect();
    out.text(format!("degree_histogram {}", degrees.join(" ")));
    let census: Vec<String> = stats.blank_cell_census.iter().map(u32::to_string).collect();
    out.text(format!("blank_cell_census {}", census.join(" ")));
    out.text(format!("eccentricity_from_goal {}", stats.eccentricity_from_goal));
    out.text(format!("goal {}", unrank(g.goal_id())?));
    for p in &problems {
        eprintln!("invariant violated: {p}");
    }
    out.text(if problems.is_empty() { "ok" } else { "FAILED" });

    let mut doc = serde_json::to_value(&stats).expect("stats serialize");
    doc["ok"] = json!(problems.is_empty());
    doc["problems"] = json!(problems);
    out.document(doc);

    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Domain(format!("{} invariant violations", problems.len())))
    }
}

fn layout(out: &Output, args: LayoutArgs) -> CmdResult {
    let g = load_graph(&args.graph)?;
    let defaults = LayoutParams::default();
    let params = LayoutParams {
        seed: args.seed.unwrap_or(defaults.seed),
        iterations: args.iterations.unwrap_or(defaults.iterations),
        sample_count: args.samples.unwrap_or(defaults.sample_count),
        repulsion_strength: args.repulsion.unwrap_or(defaults.repulsion_strength),
        attraction_strength: args.attraction.unwrap_or(defaults.attraction_strength),
        sphere_radius: args.radius.unwrap_or(defaults.sphere_radius),
        root: args.root.as_ref().map(rank).transpose()?,
        ..defaults
    };
    params.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let kind = LayoutKind::from(args.kind);
    let result = compute_layout(&g, kind, &params)?;
    save_positions(&result, &args.out)?;
    let chord = mean_neighbor_chord(&g, &result.positions);
    out.text(format!("wrote {} layout to {} (mean edge chord {chord:.4})", kind, args.out.display()));
    out.document(json!({
        "kind": kind,
        "out": args.out,
        "node_count": result.positions.len(),
        "seed": result.file_seed(),
        "iterations": params.iterations,
        "mean_neighbor_chord": chord,
    }));
    Ok(())
}

fn search(out: &Output, args: SearchArgs) -> CmdResult {
    let start = rank(&args.start)?;
    let goal_state = args.goal.unwrap_or_else(canonical_goal);
    let goal = rank(&goal_state)?;
    let graph: Arc<StateGraph> = Arc::new(match &args.graph {
        Some(path) => load_graph(path)?,
        None => build_graph(&goal_state)?,
    });
    let algo = SearchAlgo::from(args.algo);
    let mut session = SearchSession::new(graph, algo, start, goal)?;
    let result = match &args.trace {
        Some(path) => {
            let mut events = Vec::new();
            let result = session.run_with(|e| events.push(*e))?;
            write_trace(BufWriter::new(File::create(path)?), &events)?;
            result
        }
        None => session.run_to_completion()?,
    };

    out.text(format!("algo {algo}"));
    out.text(format!("found {}", result.found));
    out.text(format!("path_length {}", result.path.len()));
    if let Some(moves) = result.moves() {
        out.text(format!("moves {moves}"));
    }
    out.text(format!("expanded {}", result.expanded_count));
    out.text(format!("discovered {}", result.discovered_count));
    let states = result.path.iter().map(|&id| unrank(id).map(|s| s.to_string())).collect::<Result<Vec<_>, _>>()?;
    out.text(format!("path {}", states.join(" ")));

    let mut doc = serde_json::to_value(&result).expect("result serializes");
    doc["algo"] = json!(algo);
    doc["start"] = json!(start);
    doc["goal"] = json!(goal);
    doc["path_length"] = json!(result.path.len());
    doc["states"] = json!(states);
    out.document(doc);
    Ok(())
}

fn serve(args: ServeArgs) -> CmdResult {
    let bind = match std::env::var("ATLAS_BIND") {
        Ok(addr) => addr.parse().map_err(|e| Failure::Usage(format!("ATLAS_BIND={addr:?}: {e}")))?,
        Err(_) => args.bind,
    };
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(atlas_service::serve(ServeConfig {
        graph_path: args.graph,
        bind,
        session_ttl: Duration::from_secs(args.session_ttl),
        static_dir: args.static_dir,
    }))?;
    Ok(())
}

fn open_output(path: &Path) -> io::Result<Box<dyn Write>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(BufWriter::new(io::stdout().lock())))
    } else {
        Ok(Box::new(BufWriter::new(File::create(path)?)))
    }
}

fn export(out: &Output, args: ExportArgs) -> CmdResult {
    let (format, lines) = match args.format {
        ExportFormat::Edgelist => {
            let path = args.graph.ok_or_else(|| Failure::Usage("edgelist export needs --graph".into()))?;
            let g = load_graph(path)?;
            ("edgelist", write_edgelist(&g, open_output(&args.out)?)?)
        }
        ExportFormat::CsvPositions => {
            let path = args.positions.ok_or_else(|| Failure::Usage("csv-positions export needs --positions".into()))?;
            let buf = load_positions(path)?;
            ("csv-positions", write_positions_csv(&buf.positions, open_output(&args.out)?)?)
        }
    };
    if args.out.as_os_str() != "-" {
        out.text(format!("wrote {lines} lines to {}", args.out.display()));
        out.document(json!({ "format": format, "out": args.out, "lines": lines }));
    }
    Ok(())
}

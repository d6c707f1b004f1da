//! Command-line front end: `precompute`, `rank`, `bench` and `serve`.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for data errors.

use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{self, BenchConfig, Order};
use crate::dataset::{DerivedFeature, GraphSource};
use crate::error::{Error, Result};
use crate::explorer::{render_json, Explorer, Precision, RankRequest};
use crate::graph::{AttributedGraph, GraphSchema};
use crate::histogram::{build_binnings, BinningFile, MdlBinner};
use crate::profile::{SessionProfile, DEFAULT_COLD_START_VISITS};
use crate::ranking::{precompute_surprise, IndexFile, PrecomputeOptions, RankMode, DEFAULT_CANDIDATE_CAP};
use crate::weights::{BlendWeights, FeatureWeights};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "egorank", version, about = "Rank the neighbors of a focus node by surprise and interest")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bin every feature and store per-node surprise scores.
    Precompute(PrecomputeArgs),
    /// Rank the neighbors of one node from a stored index.
    Rank(RankArgs),
    /// Time ranking calls on synthetic graphs.
    Bench(BenchArgs),
    /// Serve the HTTP/JSON API.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(long, env = "EGORANK_NODES")]
    pub nodes: Option<PathBuf>,
    #[arg(long, env = "EGORANK_EDGES")]
    pub edges: Option<PathBuf>,
    #[arg(long, env = "EGORANK_SCHEMA")]
    pub schema: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PrecomputeArgs {
    #[arg(long)]
    pub nodes: PathBuf,
    #[arg(long)]
    pub edges: PathBuf,
    #[arg(long)]
    pub schema: PathBuf,
    /// Index file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Binnings file to write; defaults to the index path with a
    /// `.binnings.json` suffix.
    #[arg(long)]
    pub binnings: Option<PathBuf>,
    /// Derived numerical features to append: degree, pagerank.
    #[arg(long, value_delimiter = ',', value_parser = parse_derived)]
    pub derive: Vec<DerivedFeature>,
    /// Feature weights as name=weight; unlisted features weigh 1.
    #[arg(long, value_delimiter = ',', value_parser = parse_weight)]
    pub lambda: Vec<(String, f64)>,
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_bins: u32,
    /// Score nodes on all cores.
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Json,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[arg(long)]
    pub index: PathBuf,
    /// Graph files; default to the paths recorded in the index.
    #[command(flatten)]
    pub graph: GraphArgs,
    /// External id of the focus node.
    #[arg(long)]
    pub focus: String,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    #[arg(long, default_value = "combined", value_parser = parse_mode)]
    pub mode: RankMode,
    /// External ids recorded as visits before ranking, in order.
    #[arg(long, value_delimiter = ',')]
    pub visits: Vec<String>,
    /// External ids never to return.
    #[arg(long, value_delimiter = ',')]
    pub exclude: Vec<String>,
    #[arg(long, value_delimiter = ',', value_parser = parse_weight)]
    pub lambda: Vec<(String, f64)>,
    #[arg(long, requires = "w_r")]
    pub w_s: Option<f64>,
    #[arg(long, requires = "w_s")]
    pub w_r: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_CANDIDATE_CAP)]
    pub cap: usize,
    #[arg(long, default_value_t = DEFAULT_COLD_START_VISITS)]
    pub cold_start_visits: usize,
    #[arg(long, value_enum, default_value = "table")]
    pub format: OutputFormat,
    /// Print scores at full precision instead of six decimals.
    #[arg(long)]
    pub full_precision: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Neighborhood sizes and feature counts, each comma separated.
    #[arg(long, num_args = 2, value_names = ["N_LIST", "F_LIST"])]
    pub synthetic: Option<Vec<String>>,
    /// Feature count for the neighborhood-size sweep.
    #[arg(long, default_value_t = 8)]
    pub fixed_f: usize,
    /// Neighborhood size for the feature sweep.
    #[arg(long, default_value_t = 10_000)]
    pub fixed_n: usize,
    #[arg(long, value_delimiter = ',', default_value = "rand,hop", value_parser = parse_order)]
    pub order: Vec<Order>,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
    pub repeats: u32,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_bins: u32,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Index file; computed at startup when absent.
    #[arg(long, env = "EGORANK_INDEX")]
    pub index: Option<PathBuf>,
    /// Derived features for a startup precompute.
    #[arg(long, env = "EGORANK_DERIVE", value_delimiter = ',', value_parser = parse_derived)]
    pub derive: Vec<DerivedFeature>,
    #[arg(long, env = "EGORANK_ADDR", default_value = "127.0.0.1:8080")]
    pub addr: SocketAddr,
    #[arg(long, env = "EGORANK_CAP", default_value_t = DEFAULT_CANDIDATE_CAP)]
    pub cap: usize,
    #[arg(long, env = "EGORANK_COLD_START_VISITS", default_value_t = DEFAULT_COLD_START_VISITS)]
    pub cold_start_visits: usize,
    #[arg(long, env = "EGORANK_MAX_BINS", default_value_t = 64)]
    pub max_bins: usize,
}

fn parse_derived(s: &str) -> std::result::Result<DerivedFeature, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_mode(s: &str) -> std::result::Result<RankMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_order(s: &str) -> std::result::Result<Order, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_weight(s: &str) -> std::result::Result<(String, f64), String> {
    let (name, w) = s.split_once('=').ok_or_else(|| format!("expected name=weight, got {s:?}"))?;
    let w: f64 = w.trim().parse().map_err(|_| format!("invalid weight in {s:?}"))?;
    Ok((name.trim().to_string(), w))
}

fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("invalid list entry {t:?}")))
        })
        .collect()
}

/// Weights over `schema` starting from `base`, with named overrides.
pub fn apply_weights(schema: &GraphSchema, base: &FeatureWeights, overrides: &[(String, f64)]) -> Result<FeatureWeights> {
    let mut w = base.as_slice().to_vec();
    for (name, value) in overrides {
        let j = schema.index_of(name).ok_or_else(|| Error::UnknownFeature(name.clone()))?;
        w[j] = *value;
    }
    FeatureWeights::new(w)
}

fn binnings_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.binnings.json"))
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

pub fn precompute(args: &PrecomputeArgs, out: &mut dyn Write) -> Result<()> {
    let source = GraphSource::new(&args.nodes, &args.edges, &args.schema).with_derived(args.derive.clone());
    let t = Instant::now();
    let (g, report) = source.load()?;
    let load_ms = ms(t);
    writeln!(
        out,
        "loaded {} nodes, {} edges; dropped {} self-loops, {} duplicate edges, {} isolated nodes",
        g.node_count(),
        g.edge_count(),
        report.self_loops,
        report.duplicate_edges,
        report.isolated.len()
    )?;

    let t = Instant::now();
    let binner = MdlBinner {
        max_bins: args.max_bins as usize,
        ..MdlBinner::default()
    };
    let binnings = build_binnings(&g, &binner)?;
    let bin_ms = ms(t);

    let lambda = apply_weights(g.schema(), &FeatureWeights::uniform(g.schema().len()), &args.lambda)?;
    let t = Instant::now();
    let options = PrecomputeOptions {
        parallel: args.parallel,
        ..PrecomputeOptions::default()
    };
    let index = precompute_surprise(&g, &binnings, &lambda, options)?;
    let score_ms = ms(t);

    let t = Instant::now();
    let file = IndexFile::from_index(&index, &g, Some(source.to_index_source()?))?;
    std::fs::write(&args.out, file.to_json()?)?;
    let binnings_out = args.binnings.clone().unwrap_or_else(|| binnings_path(&args.out));
    let bfile = BinningFile::new(g.schema(), index.binnings(), index.globals());
    std::fs::write(&binnings_out, bfile.to_json()?)?;
    let write_ms = ms(t);

    for (b, spec) in index.binnings().iter().zip(g.schema().features()) {
        writeln!(out, "feature {}: {} bins", spec.name, b.bin_count())?;
    }
    writeln!(out, "stage load: {load_ms:.1} ms")?;
    writeln!(out, "stage binning: {bin_ms:.1} ms")?;
    writeln!(out, "stage scoring: {score_ms:.1} ms")?;
    writeln!(out, "stage write: {write_ms:.1} ms")?;
    writeln!(out, "wrote {} and {}", args.out.display(), binnings_out.display())?;
    Ok(())
}

/// Reads an index file and loads the graph it was built from, with any
/// paths in `overrides` replacing the recorded ones.
pub fn load_indexed(index_path: &Path, overrides: &GraphArgs) -> Result<(AttributedGraph, IndexFile)> {
    let file = IndexFile::from_json(&std::fs::read_to_string(index_path)?)?;
    let recorded = file.header.source.as_ref().map(GraphSource::from_index_source).transpose()?;
    let pick = |flag: &Option<PathBuf>, recorded: Option<&PathBuf>, what: &str| -> Result<PathBuf> {
        flag.clone()
            .or_else(|| recorded.cloned())
            .ok_or_else(|| Error::InvalidArgument(format!("index records no {what} path; pass --{what}")))
    };
    let mut source = GraphSource::new(
        pick(&overrides.nodes, recorded.as_ref().map(|s| &s.nodes), "nodes")?,
        pick(&overrides.edges, recorded.as_ref().map(|s| &s.edges), "edges")?,
        pick(&overrides.schema, recorded.as_ref().map(|s| &s.schema), "schema")?,
    );
    if let Some(r) = &recorded {
        source.derive = r.derive.clone();
        source.pagerank = r.pagerank;
    }
    let (g, _) = source.load()?;
    Ok((g, file))
}

fn fmt_score(x: Option<f64>, full: bool) -> String {
    match x {
        Some(x) if full => format!("{x}"),
        Some(x) => format!("{x:.6}"),
        None => "-".into(),
    }
}

pub fn rank(args: &RankArgs, out: &mut dyn Write) -> Result<()> {
    let (g, file) = load_indexed(&args.index, &args.graph)?;
    let index = file.into_index(&g, PrecomputeOptions::default())?;
    let explorer = Explorer::new(g, index)?
        .with_cap(args.cap)?
        .with_cold_start_visits(args.cold_start_visits);
    let g = explorer.graph();

    let mut profile: SessionProfile = explorer.new_session("cli");
    if !args.lambda.is_empty() {
        profile.set_lambda(apply_weights(g.schema(), profile.lambda(), &args.lambda)?)?;
    }
    if let (Some(s), Some(r)) = (args.w_s, args.w_r) {
        profile.set_blend(BlendWeights::new(s, r)?);
    }
    for v in &args.visits {
        explorer.record_visit(&mut profile, g.resolve(v)?)?;
    }
    let request = RankRequest {
        focus: g.resolve(&args.focus)?,
        k: args.k as usize,
        mode: args.mode,
        exclude: args.exclude.iter().map(|e| g.resolve(e)).collect::<Result<_>>()?,
    };
    let view = explorer.rank_view(&profile, &request)?;
    let precision = if args.full_precision { Precision::Full } else { Precision::Rounded };

    match args.format {
        OutputFormat::Json => writeln!(out, "{}", render_json(&view, precision)?)?,
        OutputFormat::Table => {
            writeln!(
                out,
                "focus {} ({}), mode {}{}, {} candidates",
                g.external_id(request.focus),
                g.label(request.focus),
                view.mode_used,
                if view.cold_start { " (cold start)" } else { "" },
                view.candidates
            )?;
            writeln!(out, "rank\tid\tlabel\tdegree\ts\tr\tt")?;
            let full = args.full_precision;
            for (i, n) in view.neighbors.iter().enumerate() {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    i + 1,
                    n.external_id,
                    n.label,
                    n.degree,
                    fmt_score(Some(n.surprise), full),
                    fmt_score(n.interest, full),
                    fmt_score(n.blended, full)
                )?;
            }
        }
    }
    Ok(())
}

pub fn bench_config(args: &BenchArgs) -> Result<BenchConfig> {
    let mut config = BenchConfig {
        fixed_features: args.fixed_f,
        fixed_neighbors: args.fixed_n,
        orders: args.order.clone(),
        repeats: args.repeats as usize,
        seed: args.seed,
        binner: MdlBinner {
            max_bins: args.max_bins as usize,
            ..MdlBinner::default()
        },
        ..BenchConfig::default()
    };
    if let Some(lists) = &args.synthetic {
        config.neighbor_sizes = parse_list(&lists[0])?;
        config.feature_counts = parse_list(&lists[1])?;
    }
    Ok(config)
}

pub fn bench(args: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let report = bench::run(&bench_config(args)?)?;
    write!(out, "{}", report.to_csv()?)?;
    Ok(())
}

/// Loads graph and index for the server: from an index file when given,
/// otherwise by precomputing over the graph files.
pub fn serve_explorer(args: &ServeArgs) -> Result<Explorer> {
    let (g, index) = match &args.index {
        Some(path) => {
            let (g, file) = load_indexed(path, &args.graph)?;
            let index = file.into_index(&g, PrecomputeOptions::default())?;
            (g, index)
        }
        None => {
            let need = |p: &Option<PathBuf>, what: &str| {
                p.clone()
                    .ok_or_else(|| Error::InvalidArgument(format!("--{what} is required without --index")))
            };
            let source = GraphSource::new(
                need(&args.graph.nodes, "nodes")?,
                need(&args.graph.edges, "edges")?,
                need(&args.graph.schema, "schema")?,
            )
            .with_derived(args.derive.clone());
            let (g, _) = source.load()?;
            let binner = MdlBinner {
                max_bins: args.max_bins.max(1),
                ..MdlBinner::default()
            };
            let binnings = build_binnings(&g, &binner)?;
            let lambda = FeatureWeights::uniform(g.schema().len());
            let index = precompute_surprise(&g, &binnings, &lambda, PrecomputeOptions::default())?;
            (g, index)
        }
    };
    Ok(Explorer::new(g, index)?
        .with_cap(args.cap)?
        .with_cold_start_visits(args.cold_start_visits))
}

fn serve(args: &ServeArgs) -> Result<()> {
    let explorer = serve_explorer(args)?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(crate::service::serve(explorer, args.addr))?;
    Ok(())
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Precompute(a) => precompute(a, out),
        Command::Rank(a) => rank(a, out),
        Command::Bench(a) => bench(a, out),
        Command::Serve(a) => serve(a),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DATA
        }
    }
}

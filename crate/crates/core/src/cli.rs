//! The `colexnet` command-line interface.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::analyze::{
    detect_communities_weighted, extract_subgraph, spearman, weighted_degree, AnalyzeError,
    CorrelationResult, DegreeMode, DegreeVector,
};
use crate::bench::{generate_wordlist, run_bench, BenchError, SyntheticSpec};
use crate::export::{
    export_graph, export_graph_named, import_graph_file, ExportError, ExportFormat,
};
use crate::network::{ColexNetwork, NetworkError, NetworkKind, WeightField};
use crate::pipeline::{load_wordlist, run_infer, PipelineError, RunConfig, SUMMARY_HEADER};
use crate::seqrel::Thresholds;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Export(#[from] ExportError),
    #[error(transparent)]
    Analyze(#[from] AnalyzeError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Config(String),
}

impl CliError {
    /// 1 for analysis failures, 2 for i/o, input and configuration problems.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Analyze(_) | CliError::Network(_) => 1,
            CliError::Pipeline(PipelineError::Network(_)) => 1,
            CliError::Export(ExportError::Invalid(_)) => 1,
            CliError::Bench(BenchError::Mismatch { .. }) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "colexnet",
    version,
    about = "Full, affix and overlap colexification networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Infer colexification networks from a wordlist and export them.
    Infer(InferArgs),
    /// Spearman correlations between weighted degree distributions.
    CompareDegrees(CompareArgs),
    /// Detect communities in an undirected network.
    Communities(CommunitiesArgs),
    /// Extract the subgraph induced by a set of concepts.
    Subgraph(SubgraphArgs),
    /// Convert a JSON network export to another format.
    Export(ExportArgs),
    /// Time efficient against naive partial colexification search.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// Affix length threshold (affix must be longer), applied to every partial kind requested.
    #[arg(long)]
    pub affix_threshold: Option<usize>,
    /// Remainder length threshold (rest of the word must be longer).
    #[arg(long)]
    pub remainder_threshold: Option<usize>,
}

impl ThresholdArgs {
    fn apply(&self, base: Thresholds) -> Thresholds {
        Thresholds::new(
            self.affix_threshold.unwrap_or(base.affix),
            self.remainder_threshold.unwrap_or(base.remainder),
        )
    }
}

#[derive(Debug, Args)]
pub struct InferArgs {
    #[arg(long)]
    pub wordlist: PathBuf,
    /// Kinds to infer; repeat for several. Defaults to all three.
    #[arg(long, value_parser = parse_kind)]
    pub kind: Vec<NetworkKind>,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    #[arg(long, default_value_t = 1)]
    pub min_families: usize,
    #[arg(long, default_value_t = 1)]
    pub min_languages: usize,
    #[arg(long, default_value = "language", value_parser = parse_weight)]
    pub weight: WeightField,
    #[arg(long, default_value = "json", value_parser = parse_format)]
    pub format: ExportFormat,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// JSON network exports, in table order; repeat at least twice.
    #[arg(long = "network", required = true, num_args = 1)]
    pub networks: Vec<PathBuf>,
    #[arg(long, default_value = "language", value_parser = parse_weight)]
    pub weight: WeightField,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CommunitiesArgs {
    #[arg(long)]
    pub network: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "language", value_parser = parse_weight)]
    pub weight: WeightField,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SubgraphArgs {
    #[arg(long)]
    pub network: PathBuf,
    /// Comma-separated concept ids.
    #[arg(long, value_delimiter = ',')]
    pub concepts: Vec<String>,
    /// File with one concept id per line.
    #[arg(long)]
    pub concepts_file: Option<PathBuf>,
    #[arg(long, default_value = "json", value_parser = parse_format)]
    pub format: ExportFormat,
    #[arg(long, default_value = "language", value_parser = parse_weight)]
    pub weight: WeightField,
    /// File stem for the written bundle.
    #[arg(long, default_value = "subgraph")]
    pub name: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub network: PathBuf,
    #[arg(long, default_value = "gml", value_parser = parse_format)]
    pub format: ExportFormat,
    #[arg(long, default_value = "language", value_parser = parse_weight)]
    pub weight: WeightField,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true)]
pub struct BenchArgs {
    #[command(subcommand)]
    pub command: Option<BenchCommand>,
    /// Wordlist to time; a synthetic one is generated when absent.
    #[arg(long)]
    pub wordlist: Option<PathBuf>,
    #[arg(long, default_value = "affix", value_parser = parse_kind)]
    pub kind: NetworkKind,
    #[arg(long, default_value_t = 5)]
    pub repetitions: usize,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    #[command(flatten)]
    pub synthetic: SyntheticArgs,
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// Write a synthetic wordlist in the standard TSV format.
    Generate {
        #[command(flatten)]
        synthetic: SyntheticArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SyntheticArgs {
    #[arg(long, default_value_t = 10)]
    pub languages: usize,
    #[arg(long, default_value_t = 1000)]
    pub concepts: usize,
    #[arg(long, default_value_t = 20)]
    pub alphabet: usize,
    #[arg(long, default_value_t = 2)]
    pub min_len: usize,
    #[arg(long, default_value_t = 7)]
    pub max_len: usize,
    #[arg(long, default_value_t = 0.3)]
    pub compound_probability: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SyntheticArgs {
    fn spec(&self) -> SyntheticSpec {
        SyntheticSpec {
            languages: self.languages,
            concepts: self.concepts,
            alphabet_size: self.alphabet,
            min_len: self.min_len,
            max_len: self.max_len,
            compound_probability: self.compound_probability,
            seed: self.seed,
        }
    }
}

fn parse_kind(s: &str) -> Result<NetworkKind, String> {
    s.parse()
}

fn parse_weight(s: &str) -> Result<WeightField, String> {
    s.parse()
}

fn parse_format(s: &str) -> Result<ExportFormat, String> {
    s.parse()
}

/// A named degree distribution, e.g. "Affix Colexification (In-Degree)".
#[derive(Debug, Clone)]
pub struct DegreeSeries {
    pub label: String,
    pub degrees: DegreeVector,
}

fn kind_label(kind: NetworkKind) -> &'static str {
    match kind {
        NetworkKind::Full => "Full Colexification",
        NetworkKind::Affix => "Affix Colexification",
        NetworkKind::Overlap => "Overlap Colexification",
    }
}

/// One series per undirected network, two (in, out) per directed one.
pub fn degree_series(
    networks: &[ColexNetwork],
    weight: WeightField,
) -> Result<Vec<DegreeSeries>, AnalyzeError> {
    let mut out = Vec::new();
    for net in networks {
        let label = kind_label(net.kind);
        if net.directed {
            for (mode, name) in [
                (DegreeMode::In, "In-Degree"),
                (DegreeMode::Out, "Out-Degree"),
            ] {
                out.push(DegreeSeries {
                    label: format!("{label} ({name})"),
                    degrees: weighted_degree(net, mode, weight)?,
                });
            }
        } else {
            out.push(DegreeSeries {
                label: label.to_string(),
                degrees: weighted_degree(net, DegreeMode::All, weight)?,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct CorrelationRow {
    pub type_a: String,
    pub type_b: String,
    pub result: CorrelationResult,
}

/// Every pairing of the series, in input order.
pub fn compare_degrees(series: &[DegreeSeries]) -> Result<Vec<CorrelationRow>, AnalyzeError> {
    let mut rows = Vec::new();
    for (i, a) in series.iter().enumerate() {
        for b in &series[i + 1..] {
            rows.push(CorrelationRow {
                type_a: a.label.clone(),
                type_b: b.label.clone(),
                result: spearman(&a.degrees, &b.degrees)?,
            });
        }
    }
    Ok(rows)
}

pub fn correlation_table(rows: &[CorrelationRow]) -> String {
    let mut out = String::from("type_a\ttype_b\tn\tr\tp_value\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{:.4}\t{:.4e}",
            row.type_a, row.type_b, row.result.n, row.result.r, row.result.p_value
        );
    }
    out
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_infer(args: InferArgs) -> Result<(), CliError> {
    let mut config = RunConfig::new(args.wordlist);
    if !args.kind.is_empty() {
        config.kinds = args.kind;
    }
    config.affix_thresholds = args.thresholds.apply(Thresholds::AFFIX);
    config.overlap_thresholds = args.thresholds.apply(Thresholds::OVERLAP);
    config.min_families = args.min_families;
    config.min_languages = args.min_languages;
    config.weight_field = args.weight;
    config.format = args.format;
    config.seed = args.seed;
    config.jobs = args.jobs;
    config.out = args.out;
    let outcomes = run_infer(&config)?;
    println!("{SUMMARY_HEADER}");
    for o in &outcomes {
        println!("{}", o.summary_line());
    }
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<(), CliError> {
    let networks = args
        .networks
        .iter()
        .map(|p| import_graph_file(p).map(|i| i.network))
        .collect::<Result<Vec<_>, _>>()?;
    let series = degree_series(&networks, args.weight)?;
    if series.len() < 2 {
        return Err(CliError::Config(
            "compare-degrees needs at least two degree distributions".into(),
        ));
    }
    let rows = compare_degrees(&series)?;
    write_or_print(args.out.as_deref(), &correlation_table(&rows))
}

fn cmd_communities(args: CommunitiesArgs) -> Result<(), CliError> {
    let network = import_graph_file(&args.network)?.network;
    let partition = detect_communities_weighted(&network, args.weight, args.seed)?;
    let mut text = format!(
        "# algorithm: {}; seed: {}; weight: {}; communities: {}\nconcept\tcommunity\n",
        partition.algorithm,
        partition.seed,
        args.weight.as_str(),
        partition.community_count()
    );
    for (concept, label) in &partition.labels {
        let _ = writeln!(text, "{concept}\t{label}");
    }
    write_or_print(args.out.as_deref(), &text)
}

fn cmd_subgraph(args: SubgraphArgs) -> Result<(), CliError> {
    let network = import_graph_file(&args.network)?.network;
    let mut concepts = args.concepts;
    if let Some(path) = &args.concepts_file {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        concepts.extend(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_string),
        );
    }
    let sub = extract_subgraph(&network, concepts.iter().map(String::as_str))?;
    export_graph_named(&sub, &args.name, args.format, args.weight).write_to(&args.out)?;
    println!("subgraph\t{}\t{}", sub.node_count(), sub.edge_count());
    Ok(())
}

fn cmd_export(args: ExportArgs) -> Result<(), CliError> {
    let network = import_graph_file(&args.network)?.network;
    export_graph(&network, args.format, args.weight).write_to(&args.out)?;
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    if let Some(BenchCommand::Generate { synthetic, out }) = args.command {
        let wordlist = generate_wordlist(&synthetic.spec())?;
        return write_or_print(Some(&out), &wordlist.to_tsv());
    }
    let wordlist = match &args.wordlist {
        Some(path) => load_wordlist(path)?,
        None => generate_wordlist(&args.synthetic.spec())?,
    };
    let base = args
        .kind
        .default_thresholds()
        .ok_or(BenchError::UnsupportedKind(args.kind))?;
    let report = run_bench(
        &wordlist,
        args.kind,
        args.thresholds.apply(base),
        args.repetitions,
    )?;
    print!("{report}");
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Infer(a) => cmd_infer(a),
        Command::CompareDegrees(a) => cmd_compare(a),
        Command::Communities(a) => cmd_communities(a),
        Command::Subgraph(a) => cmd_subgraph(a),
        Command::Export(a) => cmd_export(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("COLEXNET_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! Command-line front end for the `infoflow` library.

pub mod error;
pub mod report;
pub mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use infoflow::simgen::{epsilon_grid, pearson, sweep_epsilon, Preset, RosslerSpec, SweepRow};
use infoflow::{estimate_flow_matrix, AnalysisConfig, CausalGraph, TimeSeriesPanel};

pub use error::CliError;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(
    name = "infoflow",
    version,
    about = "Information-flow causal analysis of time series"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the flow matrix and causal graph of a panel.
    Analyze(AnalyzeArgs),
    /// Write a benchmark panel as CSV.
    Generate(GenerateArgs),
    /// Sweep the coupling strength of the Rossler benchmark.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    CsvMatrix,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["csv", "preset"])))]
pub struct AnalyzeArgs {
    /// CSV file with a header row and a leading time column.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Benchmark preset to simulate (var6-b1, var6-b100, var6-b100-short, rossler).
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// Sampling interval of the CSV series [default: 1.0].
    #[arg(long)]
    pub dt: Option<f64>,
    /// Differencing stride [default: 2 for rossler, otherwise 1].
    #[arg(long)]
    pub k: Option<usize>,
    /// Permit strides other than 1 and 2.
    #[arg(long)]
    pub allow_any_k: bool,
    #[arg(long, default_value_t = 0.90)]
    pub alpha: f64,
    /// Artifact format; inferred from the `--out` extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Ridge added to the covariance diagonal.
    #[arg(long, default_value_t = 0.0)]
    pub ridge: f64,
    /// Coupling strength (rossler preset only).
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    pub preset: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Coupling strength (rossler preset only).
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0.0)]
    pub eps_from: f64,
    #[arg(long, default_value_t = 0.3)]
    pub eps_to: f64,
    #[arg(long, default_value_t = 13)]
    pub steps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 0.90)]
    pub alpha: f64,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Generate(args) => cmd_generate(&args),
        Command::Sweep(args) => cmd_sweep(&args),
    }
}

fn parse_preset(name: &str) -> Result<Preset, CliError> {
    name.parse().map_err(|_| {
        let known: Vec<&str> = Preset::ALL.iter().map(Preset::name).collect();
        CliError::Usage(format!(
            "unknown preset `{name}` (known: {})",
            known.join(", ")
        ))
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn write_all(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    let io_err = |source| CliError::Io {
        path: path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf),
        source,
    };
    match path {
        Some(p) => {
            let mut w = create(p)?;
            w.write_all(text.as_bytes())
                .and_then(|()| w.flush())
                .map_err(io_err)
        }
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(io_err),
    }
}

fn load_panel(args: &AnalyzeArgs) -> Result<(TimeSeriesPanel, String, usize), CliError> {
    if let Some(path) = &args.csv {
        if args.epsilon.is_some() {
            return Err(CliError::Usage(
                "--epsilon applies to the rossler preset only".into(),
            ));
        }
        let shown = path.display().to_string();
        let file = File::open(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        let table = table::read_table(io::BufReader::new(file), &shown)?;
        let panel = table.into_panel(args.dt.unwrap_or(1.0), &shown)?;
        return Ok((panel, shown, 1));
    }
    let name = args.preset.as_deref().unwrap_or_default();
    let preset = parse_preset(name)?;
    if args.dt.is_some() {
        return Err(CliError::Usage("--dt applies to CSV input only".into()));
    }
    let panel = preset
        .analysis_panel(args.seed, args.epsilon)
        .map_err(|e| CliError::analysis(format!("preset {name}"), e))?;
    Ok((panel, format!("preset {name}"), preset.default_k()))
}

/// Names the most collinear pair of variables, for singular-covariance reports.
fn collinear_pair(panel: &TimeSeriesPanel) -> Option<String> {
    let d = panel.d();
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..d {
        for j in i + 1..d {
            let r = pearson(panel.row(i), panel.row(j));
            if best.is_none_or(|(b, _, _)| r.abs() > b.abs()) {
                best = Some((r, i, j));
            }
        }
    }
    best.map(|(r, i, j)| {
        let labels = panel.labels();
        format!(
            "most collinear pair `{}` and `{}` (r = {r:.6})",
            labels[i], labels[j]
        )
    })
}

fn artifact_format(args: &AnalyzeArgs) -> Option<Format> {
    if args.format.is_some() {
        return args.format;
    }
    let ext = args
        .out
        .as_ref()?
        .extension()?
        .to_str()?
        .to_ascii_lowercase();
    Some(match ext.as_str() {
        "dot" | "gv" => Format::Dot,
        "csv" => Format::CsvMatrix,
        _ => Format::Json,
    })
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let (panel, source, default_k) = load_panel(args)?;
    let k = args.k.unwrap_or(default_k);
    if !(args.allow_any_k || k == 1 || k == 2) {
        return Err(CliError::Usage(format!(
            "--k must be 1 or 2 (got {k}); pass --allow-any-k to override"
        )));
    }
    let config = AnalysisConfig {
        k,
        alpha: args.alpha,
        ridge: args.ridge,
    };
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let fm = estimate_flow_matrix(&panel, &config).map_err(|e| {
        let mut context = format!("analysis of {source}");
        if matches!(e, infoflow::Error::SingularCovariance { .. }) {
            if let Some(pair) = collinear_pair(&panel) {
                context = format!("{context}, {pair}");
            }
        }
        CliError::analysis(context, e)
    })?;
    let graph = CausalGraph::from_flow_matrix(&panel, &fm)
        .map_err(|e| CliError::analysis(format!("analysis of {source}"), e))?;

    let summary = report::summary(&graph);
    match artifact_format(args) {
        None => write_all(None, &summary),
        Some(format) => {
            let text = match format {
                Format::Json => graph.to_json() + "\n",
                Format::Dot => graph.to_dot(),
                Format::CsvMatrix => report::csv_matrix(&graph),
            };
            write_all(args.out.as_deref(), &text)?;
            if args.out.is_some() {
                write_all(None, &summary)
            } else {
                eprint!("{summary}");
                Ok(())
            }
        }
    }
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<(), CliError> {
    let preset = parse_preset(&args.preset)?;
    let panel = preset
        .generate(args.seed, args.epsilon)
        .map_err(|e| CliError::analysis(format!("preset {}", args.preset), e))?;
    let csv_err = |e: csv::Error| CliError::Io {
        path: args
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from("<stdout>")),
        source: e.into(),
    };
    match &args.out {
        Some(path) => table::write_panel(&panel, create(path)?).map_err(csv_err),
        None => table::write_panel(&panel, io::stdout().lock()).map_err(csv_err),
    }
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let grid = epsilon_grid(args.eps_from, args.eps_to, args.steps)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let config = AnalysisConfig {
        k: args.k,
        alpha: args.alpha,
        ridge: 0.0,
    };
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let rows = sweep_epsilon(&RosslerSpec::benchmark(0.0, args.seed), &grid, &config)
        .map_err(|e| CliError::analysis("epsilon sweep", e))?;
    let mut text = SweepRow::csv_header();
    text.push('\n');
    for row in &rows {
        text.push_str(&row.csv_line());
        text.push('\n');
    }
    write_all(args.out.as_deref(), &text)
}

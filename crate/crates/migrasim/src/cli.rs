use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use migrasim_core::dynamics::predict_consensus;
use migrasim_core::engine::{initialize_with, run_prepared, Prepared};
use migrasim_core::graph::laplacian;
use migrasim_core::rng::seeded;
use migrasim_core::spectrum::spectrum;
use migrasim_core::{ScenarioConfig, SocialGraph};
use serde::Serialize;

use crate::config::{load_config, ConfigDoc};
use crate::edgelist::{load_edge_list, write_edge_list};
use crate::error::{Error, Result};
use crate::output::{spectrum_report, write_results, Format};
use crate::sweep::{run_sweep, threads_from_env};

#[derive(Debug, Parser)]
#[command(name = "migrasim", version, about = "Rural-urban migration simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario and write its series and summary.
    Run(RunArgs),
    /// Run every cell of the config's `sweep` grid.
    Sweep(SweepArgs),
    /// Print the Laplacian spectrum and consensus verdict without simulating.
    AnalyzeGraph(AnalyzeArgs),
    /// Parse and validate a config, then exit.
    ValidateConfig(ConfigArg),
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    pub format: Format,
    /// Use this edge list instead of generating the graph. Random draws are
    /// consumed as if the graph had been generated, so an exported graph
    /// reproduces the original run.
    #[arg(long)]
    pub graph: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Base seed for the derived cell seeds; defaults to the config's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Analyze this edge list instead of the generated graph.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Also write the analyzed graph as an edge list.
    #[arg(long)]
    pub export_graph: Option<PathBuf>,
    /// Print JSON instead of the text report.
    #[arg(long)]
    pub json: bool,
}

fn load(path: &Path, seed: Option<u64>) -> Result<ConfigDoc> {
    let mut doc = load_config(path)?;
    if let Some(seed) = seed {
        doc.config.seed = seed;
    }
    Ok(doc)
}

fn loaded_graph(path: &Path, config: &ScenarioConfig) -> Result<SocialGraph> {
    let list = load_edge_list(path)?;
    if list.graph.order() != config.n_workers {
        return Err(Error::EdgeList {
            path: path.to_path_buf(),
            line: 0,
            message: format!(
                "graph has {} vertices but the config has n_workers = {}",
                list.graph.order(),
                config.n_workers
            ),
        });
    }
    Ok(list.graph)
}

fn cmd_run(args: RunArgs, stdout: &mut dyn std::io::Write) -> Result<()> {
    let config = load(&args.config, args.seed)?.config;
    let mut rng = seeded(config.seed);
    let (mut graph, roster, state) = initialize_with(&config, &mut rng)?;
    if let Some(path) = &args.graph {
        graph = loaded_graph(path, &config)?;
    }
    let result = run_prepared(&config, Prepared { graph, roster, state, rng })?;
    write_results(&args.out, &config, &result, args.format)?;
    let _ = writeln!(
        stdout,
        "{}: N_u {} -> {} over {} months, consensus_predicted = {}, diverged = {}",
        match result.status {
            migrasim_core::RunStatus::Completed => "completed".to_string(),
            s => format!("{s:?}"),
        },
        result.summary.initial_urban,
        result.summary.final_urban,
        result.series.len() - 1,
        result.verdict.consensus_predicted,
        result.diverged,
    );
    Ok(())
}

fn cmd_sweep(args: SweepArgs, stdout: &mut dyn std::io::Write) -> Result<()> {
    let doc = load(&args.config, None)?;
    let threads = threads_from_env()?;
    let manifest = run_sweep(&doc, args.seed, &args.out, args.format, threads)?;
    let failed = manifest.failed();
    let _ = writeln!(stdout, "{} cells, {} failed", manifest.cells.len(), failed);
    if failed > 0 {
        return Err(Error::SweepFailures {
            failed,
            total: manifest.cells.len(),
        });
    }
    Ok(())
}

#[derive(Serialize)]
struct AnalysisDoc<'a> {
    vertices: usize,
    arcs: usize,
    a: f64,
    f: f64,
    spectrum: &'a migrasim_core::Spectrum,
    verdict: &'a migrasim_core::ConsensusVerdict,
}

fn cmd_analyze(args: AnalyzeArgs, stdout: &mut dyn std::io::Write) -> Result<()> {
    let config = load(&args.config, args.seed)?.config;
    let graph = match &args.graph {
        Some(path) => load_edge_list(path)?.graph,
        None => initialize_with(&config, &mut seeded(config.seed))?.0,
    };
    let spec = spectrum(&laplacian(&graph), config.zero_tol).map_err(migrasim_core::engine::SimError::from)?;
    let verdict =
        predict_consensus(&graph, &config.dynamics, config.zero_tol).map_err(migrasim_core::engine::SimError::from)?;
    if let Some(path) = &args.export_graph {
        let seed = args.graph.is_none().then_some(config.seed);
        write_edge_list(path, &graph, seed)?;
    }
    let (a, f) = (config.dynamics.a, config.dynamics.f);
    let text = if args.json {
        let doc = AnalysisDoc {
            vertices: graph.order(),
            arcs: graph.arc_count(),
            a,
            f,
            spectrum: &spec,
            verdict: &verdict,
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("analysis serializes");
        s.push('\n');
        s
    } else {
        spectrum_report(graph.order(), graph.arc_count(), &spec, &verdict, a, f)
    };
    let _ = stdout.write_all(text.as_bytes());
    Ok(())
}

fn cmd_validate(args: ConfigArg, stdout: &mut dyn std::io::Write) -> Result<()> {
    let doc = load(&args.config, None)?;
    if doc.sweep.is_some() {
        crate::sweep::expand(&doc, None)?;
    }
    let _ = writeln!(stdout, "ok: {}", args.config.display());
    Ok(())
}

pub fn execute(cli: Cli, stdout: &mut dyn std::io::Write) -> Result<()> {
    match cli.command {
        Command::Run(a) => cmd_run(a, stdout),
        Command::Sweep(a) => cmd_sweep(a, stdout),
        Command::AnalyzeGraph(a) => cmd_analyze(a, stdout),
        Command::ValidateConfig(a) => cmd_validate(a, stdout),
    }
}

/// Parses `args`, runs the command and maps errors to a one-line
/// diagnostic on stderr plus a nonzero exit code.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let first = e
                .to_string()
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ")
                .to_string();
            return report(&Error::Usage(first));
        }
    };
    let mut stdout = std::io::stdout().lock();
    match execute(cli, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}

fn report(e: &Error) -> ExitCode {
    eprintln!("{}", e.diagnostic());
    ExitCode::from(e.exit_code())
}

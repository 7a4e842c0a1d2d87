//! `pairpath`: batch runner for decomposition, gap, dynamics and bound
//! experiments. Every analysis writes one CSV table.

mod analysis;
mod config;
mod error;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use analysis::Report;
use config::{parse_config, Analysis, ExperimentConfig};
use error::CliError;

/// Figure configurations shipped with the repository.
const FIGURES: [(&str, &str); 6] = [
    ("trimer_direct", include_str!("../../../figures/trimer_direct.cfg")),
    ("trimer_stepwise", include_str!("../../../figures/trimer_stepwise.cfg")),
    ("foursite_neg_direct", include_str!("../../../figures/foursite_neg_direct.cfg")),
    ("foursite_neg", include_str!("../../../figures/foursite_neg.cfg")),
    ("foursite_pos_direct", include_str!("../../../figures/foursite_pos_direct.cfg")),
    ("foursite_pos", include_str!("../../../figures/foursite_pos.cfg")),
];

#[derive(Parser)]
#[command(name = "pairpath", version, about = "Two-body decomposition paths for adiabatic state preparation")]
struct Cli {
    /// Experiment file with [model], [path], [analysis] and [output] sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output prefix; tables are written to `<prefix>_<analysis>.csv`.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Seed for randomized analyses.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of uniform samples of s in gap traces.
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the analysis named in the experiment file.
    Run {
        /// Experiment file (alternative to --config).
        file: Option<PathBuf>,
    },
    /// Two-body eigenmodes of the residual.
    Decompose,
    /// Pseudoprojector norm bounds against random and saturating states.
    Bounds(BoundsArgs),
    /// Low-lying spectrum and gap along the path.
    Gap,
    /// Schrödinger evolution along the path.
    Evolve(EvolveArgs),
    /// Integral of the squared path-derivative norm.
    Numerator(NodesArgs),
    /// Sufficient evolution time for a target infidelity.
    Jansen(JansenArgs),
    /// Gap traces for the six shipped figure configurations.
    Figures,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    l_min: Option<usize>,
    #[arg(long)]
    l_max: Option<usize>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Random unit modes per (L, N).
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args)]
struct EvolveArgs {
    /// Total evolution time T.
    #[arg(long)]
    time: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Evenly spaced samples kept in the table.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args)]
struct NodesArgs {
    /// Simpson nodes per smooth piece of the schedule.
    #[arg(long)]
    nodes: Option<usize>,
}

#[derive(Args)]
struct JansenArgs {
    /// Target infidelity.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    nodes: Option<usize>,
}

fn read_config(file: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(file).map_err(|source| CliError::Io { path: file.to_path_buf(), source })?;
    parse_config(&text)
}

/// Starts from the file's analysis block when it has the same kind, else
/// from defaults, then applies command-line overrides.
fn analysis_for(cfg: &ExperimentConfig, command: &Command) -> Result<Analysis, CliError> {
    let name = match command {
        Command::Run { .. } => {
            return cfg.analysis.clone().ok_or_else(|| CliError::Missing("missing [analysis] section".into()));
        }
        Command::Decompose => "decompose",
        Command::Bounds(_) => "bounds",
        Command::Gap => "gap",
        Command::Evolve(_) => "evolve",
        Command::Numerator(_) => "numerator",
        Command::Jansen(_) => "jansen",
        Command::Figures => unreachable!("figures has no single analysis"),
    };
    let mut a = match &cfg.analysis {
        Some(a) if a.name() == name => a.clone(),
        _ => Analysis::default_for(name).expect("known analysis"),
    };
    match (&mut a, command) {
        (Analysis::Bounds { l_min, l_max, n_min, n_max, samples }, Command::Bounds(b)) => {
            *l_min = b.l_min.unwrap_or(*l_min);
            *l_max = b.l_max.unwrap_or(*l_max);
            *n_min = b.n_min.unwrap_or(*n_min);
            *n_max = b.n_max.unwrap_or(*n_max);
            *samples = b.samples.unwrap_or(*samples);
        }
        (Analysis::Evolve { time, steps, samples }, Command::Evolve(e)) => {
            *time = e.time.unwrap_or(*time);
            *steps = e.steps.unwrap_or(*steps);
            *samples = e.samples.unwrap_or(*samples);
        }
        (Analysis::Numerator { nodes }, Command::Numerator(n)) => *nodes = n.nodes.unwrap_or(*nodes),
        (Analysis::Jansen { delta, nodes }, Command::Jansen(j)) => {
            *delta = j.delta.unwrap_or(*delta);
            *nodes = j.nodes.unwrap_or(*nodes);
        }
        _ => {}
    }
    Ok(a)
}

fn apply_flags(cfg: &mut ExperimentConfig, cli: &Cli) -> Result<(), CliError> {
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(g) = cli.grid {
        if g < 3 {
            return Err(CliError::Missing("--grid needs at least 3 points".into()));
        }
        cfg.path.grid = g;
    }
    Ok(())
}

fn print_report(label: &str, r: &Report) {
    println!("{label}: {} -> {}", r.summary, r.file.display());
}

fn figures(cli: &Cli) -> Result<(), CliError> {
    let dir = PathBuf::from(cli.out.as_deref().unwrap_or("figures_out"));
    for (name, text) in FIGURES {
        let mut cfg = parse_config(text)?;
        apply_flags(&mut cfg, cli)?;
        let prefix = dir.join(name).to_string_lossy().into_owned();
        let r = analysis::run(&cfg, &Analysis::Gap, &prefix)?;
        print_report(name, &r);
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    if let Command::Figures = cli.command {
        return figures(cli);
    }
    let file = match &cli.command {
        Command::Run { file: Some(f) } => Some(f.clone()),
        _ => cli.config.clone(),
    };
    let mut cfg = match &file {
        Some(f) => read_config(f)?,
        None if matches!(cli.command, Command::Bounds(_)) => parse_config("")?,
        None => return Err(CliError::Missing("no experiment file given (use --config <file>)".into())),
    };
    apply_flags(&mut cfg, cli)?;
    let analysis = analysis_for(&cfg, &cli.command)?;
    if analysis.needs_model() && cfg.model.is_none() {
        return Err(CliError::Missing("missing [model] section".into()));
    }
    let prefix = cli
        .out
        .clone()
        .or_else(|| cfg.prefix.clone())
        .or_else(|| file.as_ref().and_then(|f| f.file_stem()).map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "pairpath".into());
    let r = analysis::run(&cfg, &analysis, &prefix)?;
    print_report(analysis.name(), &r);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spherecs_cli::commands::{parse_complex, run_identity, run_prepare, run_state, Recipe};
use spherecs_cli::{
    run_figure, run_sweep, CliError, CliResult, FigureId, Grid, Observable, SweepSpec, SweepVar,
};
use spherecs_core::preparation::DEFAULT_G_TAU;
use spherecs_core::{Branch, Complex64, MeasureMode, RootPolicy, StateKind};

#[derive(Parser)]
#[command(
    name = "spherecs",
    version,
    about = "Photon-added and photon-subtracted coherent states on a sphere"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Regenerate one figure panel (or `all`) as CSV, optionally SVG.
    Figure {
        /// 1a 1b 2 3a 3b 4 5a 5b 6a 6b 7a 7b 8a 8b 9a 9b, or all
        id: String,
        #[arg(long, default_value = "figures")]
        out: PathBuf,
        #[arg(long)]
        svg: bool,
    },
    /// Sweep lambda, m or phi and write a CSV table.
    Sweep(SweepArgs),
    /// Synthesize the atomic amplitudes that prepare a state, then verify by simulation.
    Prepare {
        #[command(flatten)]
        recipe: RecipeArgs,
        #[arg(long, default_value_t = DEFAULT_G_TAU)]
        gtau: f64,
        #[arg(long, default_value = "max-success")]
        policy: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Resolution-of-identity diagnostics.
    Identity {
        #[arg(long = "N")]
        cutoff: usize,
        #[arg(long, default_value_t = 0.0)]
        lambda: f64,
        #[arg(long, default_value_t = 0)]
        m: usize,
        /// pacs or pscs
        #[arg(long, default_value = "pacs")]
        kind: String,
        #[arg(long, value_enum, default_value_t = Mode::Flat)]
        mode: Mode,
        #[arg(long, default_value_t = MeasureMode::DEFAULT_BETA)]
        beta: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Dump state amplitudes as CSV.
    State {
        #[command(flatten)]
        recipe: RecipeArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Flat,
    Literal,
}

#[derive(Args)]
struct RecipeArgs {
    /// sphere-cs, flat-cs, pacs or pscs
    #[arg(long)]
    kind: String,
    #[arg(long = "N")]
    cutoff: usize,
    /// RE or RE,IM
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    mu: Complex64,
    #[arg(long, default_value_t = 0)]
    m: usize,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    kind: String,
    #[arg(long = "N")]
    cutoff: usize,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    mu: Complex64,
    /// Comma-separated m values (curves).
    #[arg(long, value_delimiter = ',', default_value = "0")]
    m: Vec<usize>,
    /// Comma-separated lambda values (curves).
    #[arg(long, value_delimiter = ',', default_value = "0")]
    lambda: Vec<f64>,
    #[arg(long)]
    var: String,
    /// a:b:n, a:b:n:log, or a:b:n:log0 (log grid with a leading 0)
    #[arg(long)]
    grid: String,
    /// Comma-separated subset of pdf, mean, mandel, squeezing, s1, s2.
    #[arg(long, value_delimiter = ',')]
    obs: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

fn kind(s: &str) -> CliResult<StateKind> {
    s.parse()
        .map_err(|e: spherecs_core::Error| CliError::Usage(e.to_string()))
}

impl RecipeArgs {
    fn recipe(&self) -> CliResult<Recipe> {
        Ok(Recipe {
            kind: kind(&self.kind)?,
            cutoff: self.cutoff,
            mu: self.mu,
            m: self.m,
            lambda: self.lambda,
        })
    }
}

impl SweepArgs {
    fn spec(&self) -> CliResult<SweepSpec> {
        Ok(SweepSpec {
            kind: kind(&self.kind)?,
            cutoff: self.cutoff,
            mu: self.mu,
            ms: self.m.clone(),
            lambdas: self.lambda.clone(),
            var: self.var.parse::<SweepVar>()?,
            grid: self.grid.parse::<Grid>()?,
            observables: self
                .obs
                .iter()
                .map(|o| o.parse::<Observable>())
                .collect::<CliResult<_>>()?,
        })
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Figure { id, out, svg } => {
            let ids: Vec<FigureId> = if id == "all" {
                FigureId::ALL.to_vec()
            } else {
                vec![id.parse()?]
            };
            for id in ids {
                for path in run_figure(id, &out, svg)? {
                    println!("{}", path.display());
                }
            }
        }
        Command::Sweep(args) => {
            let table = run_sweep(&args.spec()?)?;
            let mut buf = Vec::new();
            table
                .write_csv(&mut buf)
                .and_then(|_| std::fs::write(&args.out, &buf))
                .map_err(|e| CliError::io(args.out.display().to_string(), e))?;
            println!("{} rows -> {}", table.rows.len(), args.out.display());
        }
        Command::Prepare {
            recipe,
            gtau,
            policy,
            out,
        } => {
            let policy: RootPolicy = policy
                .parse()
                .map_err(|e: spherecs_core::Error| CliError::Usage(e.to_string()))?;
            let outcome = run_prepare(&recipe.recipe()?, gtau, policy, &out)?;
            println!("{}", outcome.summary);
        }
        Command::Identity {
            cutoff,
            lambda,
            m,
            kind,
            mode,
            beta,
            tol,
        } => {
            let branch: Branch = kind
                .parse()
                .map_err(|e: spherecs_core::Error| CliError::Usage(e.to_string()))?;
            let mode = match mode {
                Mode::Flat => MeasureMode::FlatExact,
                Mode::Literal => MeasureMode::PaperLiteral { beta },
            };
            println!("{}", run_identity(cutoff, lambda, m, branch, mode, tol)?);
        }
        Command::State { recipe, out } => {
            run_state(&recipe.recipe()?, &out)?;
            println!("{}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

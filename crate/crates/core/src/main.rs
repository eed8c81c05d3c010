use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use seriesdyn::integrator::IntegrationConfig;
use seriesdyn::modelfile::{ModelFile, ModelFileError};
use seriesdyn::report::{self, CommandError, CommandResult};

/// Time-series solutions of polynomial ODE models, checked against
/// closed forms, a Runge-Kutta reference and the phase-plane fixed points.
#[derive(Debug, Parser)]
#[command(name = "seriesdyn", version)]
struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Print 12 significant digits instead of the rounded table1 values.
    #[arg(long, global = true)]
    full_precision: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Tolerances {
    #[arg(long, default_value_t = IntegrationConfig::default().rel_tol)]
    rel_tol: f64,
    #[arg(long, default_value_t = IntegrationConfig::default().abs_tol)]
    abs_tol: f64,
}

impl Tolerances {
    fn config(&self) -> CommandResult<IntegrationConfig> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(CommandError::Input("tolerances must be positive".into()));
        }
        Ok(IntegrationConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            ..IntegrationConfig::default()
        })
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Log-errors of the 4th-order logistic series at t = 0.1..1.0.
    Table1,
    /// Two-species trajectory vs partial sums, as CSV.
    Phase2d {
        /// Series order; repeat for several curves.
        #[arg(short = 'k', long = "order", default_values_t = [4usize, 10])]
        orders: Vec<usize>,
        #[arg(long, default_value_t = 300.0)]
        t_end: f64,
        #[arg(long, default_value_t = 301)]
        samples: usize,
        #[command(flatten)]
        tol: Tolerances,
    },
    /// Spiral model: numerical, exact and series curves, as CSV.
    Spiral {
        #[arg(short = 'k', long = "order", default_value_t = 5)]
        order: usize,
        #[arg(long, default_value_t = 20.0)]
        t_end: f64,
        #[arg(long, default_value_t = 201)]
        samples: usize,
        #[command(flatten)]
        tol: Tolerances,
    },
    /// Convergence-radius estimates from the series coefficients.
    Radius {
        model: PathBuf,
        /// Series order (defaults to the model file's order).
        #[arg(short = 'k', long = "order")]
        order: Option<usize>,
    },
    /// Numerical and series solution of a model file, as CSV.
    Solve {
        model: PathBuf,
        /// Overrides the model file's order.
        #[arg(short = 'k', long = "order")]
        order: Option<usize>,
        #[arg(long)]
        rel_tol: Option<f64>,
        #[arg(long)]
        abs_tol: Option<f64>,
    },
    /// Critical points and their linear stability class.
    FixedPoints { model: PathBuf },
}

fn load(path: &Path) -> CommandResult<ModelFile> {
    ModelFile::load(path).map_err(|e: ModelFileError| CommandError::Input(e.to_string()))
}

fn run(cli: &Cli) -> CommandResult<String> {
    match &cli.command {
        Command::Table1 => Ok(report::render_table1(&report::table1(), cli.full_precision)),
        Command::Phase2d {
            orders,
            t_end,
            samples,
            tol,
        } => Ok(report::phase2d(orders, *t_end, *samples, &tol.config()?)?.to_csv().render()),
        Command::Spiral {
            order,
            t_end,
            samples,
            tol,
        } => Ok(report::spiral(*order, *t_end, *samples, &tol.config()?)?.to_csv().render()),
        Command::Radius { model, order } => {
            let m = load(model)?;
            let order = order.unwrap_or(m.order);
            Ok(report::radius(&m, order)?.render())
        }
        Command::Solve {
            model,
            order,
            rel_tol,
            abs_tol,
        } => {
            let mut m = load(model)?;
            if let Some(k) = order {
                m.order = *k;
            }
            if let Some(r) = rel_tol {
                m.tolerances.rel_tol = *r;
            }
            if let Some(a) = abs_tol {
                m.tolerances.abs_tol = *a;
            }
            if m.order < 1 || !(m.tolerances.rel_tol > 0.0 && m.tolerances.abs_tol > 0.0) {
                return Err(CommandError::Input("order must be >= 1 and tolerances positive".into()));
            }
            Ok(report::solve(&m)?.render())
        }
        Command::FixedPoints { model } => {
            let m = load(model)?;
            Ok(report::render_fixed_points(&report::fixed_point_table(&m)?))
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> CommandResult<()> {
    let res = match path {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    res.map_err(|e| CommandError::Input(format!("cannot write output: {e}")))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SERIESDYN_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(&cli).and_then(|text| emit(cli.output.as_deref(), &text)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

mod check;
mod plot;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use zonosvm::{
    parse_dataset, train_with, write_dataset, zero_margin_mu, BiasStrategy, FeatureMapSpec, Format,
    LabeledDataset, Solver, TrainOptions,
};

use report::{Diagnostics, Failure, InputSummary, Report};

#[derive(Parser)]
#[command(
    name = "zonosvm",
    version,
    about = "Reduced-convex-hull SVM training and separability analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a soft-margin classifier at a given μ.
    Train(TrainArgs),
    /// Find the μ at which the reduced hulls start to touch.
    Separability(SeparabilityArgs),
    /// Expand features with all monomials of a given degree.
    Lift(LiftArgs),
    /// Cross-check the solvers against brute force on random small instances.
    Check(CheckArgs),
    /// Train over a grid of μ values and tabulate margin and support size.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Dataset file (CSV `label,x1,...` or svmlight `label idx:val ...`).
    #[arg(short, long)]
    input: PathBuf,
    /// Input format; guessed from the extension when omitted.
    #[arg(long)]
    format: Option<Format>,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Per-point weight cap, between 1/min(class size) and 1.
    #[arg(long)]
    mu: f64,
    #[arg(long, default_value = "halfway")]
    bias: BiasStrategy,
    #[arg(long, default_value_t = zonosvm::trainer::DEFAULT_EPS)]
    eps: f64,
    #[arg(long, default_value = "ellipsoid")]
    solver: Solver,
    /// Write the report here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write an SVG of the slab and reduced hulls (2D data only).
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct SeparabilityArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = zonosvm::trainer::DEFAULT_EPS)]
    eps: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct LiftArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Monomial degree.
    #[arg(long)]
    degree: u32,
    /// Lifted dataset destination; with it, a report goes to stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Number of random instances.
    #[arg(long, default_value_t = 25)]
    trials: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Number of grid points between the smallest feasible μ and 1.
    #[arg(long, default_value_t = 20)]
    steps: usize,
    /// Lower end of the grid; clamped to the smallest feasible μ.
    #[arg(long)]
    mu_min: Option<f64>,
    #[arg(long, default_value_t = zonosvm::trainer::DEFAULT_EPS)]
    eps: f64,
    #[arg(long, default_value = "ellipsoid")]
    solver: Solver,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Train(a) => cmd_train(a),
        Command::Separability(a) => cmd_separability(a),
        Command::Lift(a) => cmd_lift(a),
        Command::Check(a) => cmd_check(a),
        Command::Sweep(a) => cmd_sweep(a),
    }
}

fn load(args: &InputArgs) -> Result<(LabeledDataset, Format), Failure> {
    let format = args
        .format
        .unwrap_or_else(|| Format::from_path(&args.input));
    let text = fs::read_to_string(&args.input)
        .map_err(|e| Failure::Input(format!("{}: {e}", args.input.display())))?;
    Ok((parse_dataset(&text, format)?, format))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Internal(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(report: &Report<T>, output: Option<&Path>) -> Result<(), Failure> {
    let text = report.to_json()?;
    match output {
        Some(path) => write_text(path, &text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn cmd_train(a: TrainArgs) -> Result<(), Failure> {
    let (ds, _) = load(&a.input)?;
    if a.plot.is_some() && ds.dim() != 2 {
        return Err(Failure::Usage(format!(
            "plots need 2-dimensional data, got dimension {}",
            ds.dim()
        )));
    }
    let opts = TrainOptions::new(a.mu)
        .bias(a.bias)
        .eps(a.eps)
        .solver(a.solver);
    let clf = train_with(&ds, &opts)?;
    if let Some(path) = &a.plot {
        plot::emit_plot_data(&clf, &ds, path)?;
    }
    let diag = &clf.diagnostics;
    let report = Report::new(
        "train",
        Some(InputSummary::of(&ds)),
        &clf,
        Diagnostics {
            iterations: diag.ellipsoid_iterations + diag.nearest_point_iterations,
            solver: solver_name(diag.solver).into(),
            gap: Some(diag.duality_gap),
        },
    );
    emit(&report, a.output.as_deref())
}

fn solver_name(s: Solver) -> &'static str {
    match s {
        Solver::Ellipsoid => "ellipsoid",
        Solver::NearestPoint => "nearest-point",
    }
}

fn cmd_separability(a: SeparabilityArgs) -> Result<(), Failure> {
    let (ds, _) = load(&a.input)?;
    let r = zero_margin_mu(&ds, a.eps)?;
    let solver = serde_json::to_value(r.method)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default();
    let report = Report::new(
        "separability",
        Some(InputSummary::of(&ds)),
        &r,
        Diagnostics {
            iterations: r.iterations,
            solver,
            gap: r.weight_sum_bound.map(|b| (b - r.weight_sum).max(0.0)),
        },
    );
    emit(&report, a.output.as_deref())
}

fn cmd_lift(a: LiftArgs) -> Result<(), Failure> {
    let (ds, format) = load(&a.input)?;
    let map = FeatureMapSpec::new(ds.dim(), a.degree)?;
    let lifted = map.map_dataset(&ds)?;
    let text = write_dataset(&lifted, format);
    let Some(path) = &a.output else {
        print!("{text}");
        return Ok(());
    };
    write_text(path, &text)?;
    let result = json!({
        "degree": map.degree,
        "input_dim": map.input_dim,
        "lifted_dim": map.lifted_dim,
        "output": path.display().to_string(),
    });
    let report = Report::new(
        "lift",
        Some(InputSummary::of(&ds)),
        &result,
        Diagnostics {
            iterations: 0,
            solver: "none".into(),
            gap: None,
        },
    );
    emit(&report, None)
}

fn cmd_check(a: CheckArgs) -> Result<(), Failure> {
    if a.trials == 0 {
        return Err(Failure::Usage("--trials must be positive".into()));
    }
    let seed = check::seed_from_env()?;
    let summary = check::run(seed, a.trials);
    let report = Report::new(
        "check",
        None,
        &summary,
        Diagnostics {
            iterations: summary.trials,
            solver: "reference".into(),
            gap: Some(summary.max_discrepancy),
        },
    );
    emit(&report, a.output.as_deref())?;
    if summary.failed > 0 {
        return Err(Failure::Internal(format!(
            "{} of {} oracle comparisons disagreed",
            summary.failed,
            summary.passed + summary.failed
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepRow {
    mu: f64,
    margin: f64,
    squared_distance: f64,
    support_count: usize,
    iterations: usize,
    duality_gap: f64,
}

#[derive(Serialize)]
struct SweepResult {
    rows: Vec<SweepRow>,
}

fn sweep_grid(lo: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 || lo >= 1.0 {
        return vec![1.0];
    }
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                1.0
            } else {
                lo + (1.0 - lo) * i as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

fn cmd_sweep(a: SweepArgs) -> Result<(), Failure> {
    let (ds, _) = load(&a.input)?;
    if a.steps == 0 {
        return Err(Failure::Usage("--steps must be positive".into()));
    }
    let (np, nm) = ds.class_counts();
    let feasible = 1.0 / np.min(nm).max(1) as f64;
    let lo = a.mu_min.map_or(feasible, |m| m.max(feasible));
    let grid = sweep_grid(lo, a.steps);
    let rows = grid
        .par_iter()
        .map(|&mu| {
            let opts = TrainOptions::new(mu).eps(a.eps).solver(a.solver);
            let clf = train_with(&ds, &opts)?;
            let d = &clf.diagnostics;
            Ok(SweepRow {
                mu,
                margin: clf.margin,
                squared_distance: clf.squared_distance(),
                support_count: clf.support_indices.len(),
                iterations: d.ellipsoid_iterations + d.nearest_point_iterations,
                duality_gap: d.duality_gap,
            })
        })
        .collect::<Result<Vec<_>, zonosvm::Error>>()?;
    let diagnostics = Diagnostics {
        iterations: rows.iter().map(|r| r.iterations).sum(),
        solver: solver_name(a.solver).into(),
        gap: rows.iter().map(|r| r.duality_gap).reduce(f64::max),
    };
    let result = SweepResult { rows };
    let report = Report::new("sweep", Some(InputSummary::of(&ds)), &result, diagnostics);
    emit(&report, a.output.as_deref())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_ends_at_one() {
        let g = sweep_grid(0.25, 4);
        assert_eq!(g, vec![0.25, 0.5, 0.75, 1.0]);
        assert_eq!(sweep_grid(1.0, 5), vec![1.0]);
        assert_eq!(sweep_grid(0.5, 1), vec![1.0]);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}

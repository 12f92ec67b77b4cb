//! `andor`: simulation, verification, discrete solving and figure data for
//! the AND-OR auction equilibrium.
//!
//! Exit codes: 0 success, 1 regime error (v <= 1/2 where a closed form is
//! needed), 2 configuration or I/O error, 3 verification failure.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use andor_core::analytics::{self, FigureId, MonteCarloReport};
use andor_core::distribution::{AndEquilibrium, OrEquilibrium, SharedDistribution};
use andor_core::model::{Auction, BidCap, OrValue, TieBreakRule};
use andor_core::solver::{self, GridMode, TieBreaking};
use andor_core::verifier::{self, VerificationReport};
use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

const VERSION: &str = env!("CARGO_PKG_VERSION");
const DEFAULT_SEED: u64 = 7;

#[derive(Parser, Debug)]
#[command(
    name = "andor",
    version,
    about = "Mixed equilibrium of the two-item first-price AND-OR auction"
)]
struct Cli {
    /// Directory for output files.
    #[arg(long, global = true, env = "ANDOR_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo estimates of equilibrium outcomes against the closed forms.
    Simulate(SimulateArgs),
    /// Best-response gaps and characterization checks for a strategy profile.
    Verify(VerifyArgs),
    /// Solve the auction restricted to a bid grid.
    Solve(SolveArgs),
    /// Tabulate equilibrium quantities over a range of v.
    Figures(FiguresArgs),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// OR's value for the pair of items.
    #[arg(long)]
    v: f64,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Tie rule: a probability that AND wins a tie, 'and-wins' or 'or-wins'.
    #[arg(long, default_value = "0.5")]
    tie: String,
    /// Report path (default: <out-dir>/simulate.<format>).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    v: f64,
    /// Spacing of the deviation grid.
    #[arg(long, default_value_t = 0.001953125)]
    grid_step: f64,
    /// Profile CSV (player,x1,x2,probability); the closed forms when absent.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Largest deviation gain accepted as an epsilon-Nash equilibrium
    /// (default: the grid step).
    #[arg(long)]
    tolerance: Option<f64>,
    /// Tolerance of the characterization checks.
    #[arg(long, default_value_t = 1e-9)]
    char_tolerance: f64,
    #[arg(long, default_value = "0.5")]
    tie: String,
    /// Report path (default: <out-dir>/verify.json).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    v: f64,
    #[arg(long, default_value = "structured")]
    mode: GridMode,
    /// Number of evenly spaced bid levels on [0, H]; 1/2 is added if absent.
    #[arg(long, default_value_t = 51, value_parser = clap::value_parser!(u64).range(2..))]
    grid: u64,
    /// Fictitious play rounds.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    iters: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value = "0.5")]
    tie: String,
    #[arg(long, value_enum, default_value_t = SolverKind::FictitiousPlay)]
    solver: SolverKind,
    /// Tie-breaking among fictitious play best responses.
    #[arg(long, value_enum, default_value_t = FpTies::Random)]
    fp_ties: FpTies,
    /// Largest support size tried by support enumeration.
    #[arg(long, default_value_t = 4)]
    max_support: usize,
    /// List the pure equilibria instead of solving for a mixed one.
    #[arg(long)]
    pure: bool,
    /// Report path (default: <out-dir>/solve.json).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Profile CSV path (default: <out-dir>/profile.csv).
    #[arg(long)]
    profile_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FiguresArgs {
    /// Emit only this series.
    #[arg(long)]
    figure: Option<FigureId>,
    #[arg(long, default_value_t = 0.51)]
    v_min: f64,
    #[arg(long, default_value_t = 10.0)]
    v_max: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum SolverKind {
    FictitiousPlay,
    SupportEnumeration,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FpTies {
    Lowest,
    Random,
}

/// Top-level metadata carried by every JSON report.
#[derive(Serialize)]
struct Meta {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    v: Option<f64>,
    seed: Option<u64>,
}

impl Meta {
    fn new(command: &'static str, v: Option<f64>, seed: Option<u64>) -> Self {
        Self {
            tool: "andor",
            version: VERSION,
            command,
            v,
            seed,
        }
    }
}

enum Outcome {
    Ok,
    NotNash,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => simulate(&cli.out_dir, a),
        Command::Verify(a) => verify(&cli.out_dir, a),
        Command::Solve(a) => solve(&cli.out_dir, a),
        Command::Figures(a) => figures(&cli.out_dir, a),
    };
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::NotNash) => ExitCode::from(3),
        Err(e) => {
            if let Some(andor_core::Error::Regime { .. }) = e.downcast_ref::<andor_core::Error>() {
                eprintln!("error: {e:#}");
                eprintln!("hint: for v <= 1/2 list the pure equilibria with `andor solve --v <v> --pure --tie and-wins`");
                ExitCode::from(1)
            } else {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        }
    }
}

fn output_path(out_dir: &Path, explicit: &Option<PathBuf>, default_name: &str) -> Result<PathBuf> {
    let path = explicit
        .clone()
        .unwrap_or_else(|| out_dir.join(default_name));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    Ok(path)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn parse_tie(spec: &str) -> Result<TieBreakRule> {
    Ok(TieBreakRule::parse(spec)?)
}

#[derive(Serialize)]
struct SimulateReport<'a> {
    meta: Meta,
    simulation: &'a MonteCarloReport,
    closed_form: analytics::AnalyticsReport,
}

fn simulate(out_dir: &Path, a: &SimulateArgs) -> Result<Outcome> {
    let tie = parse_tie(&a.tie)?;
    let closed = analytics::report(a.v)?;
    let samples = usize::try_from(a.samples).context("sample count does not fit in memory size")?;
    let mc = analytics::monte_carlo_report(a.v, samples, &tie, a.seed)?;
    let ext = match a.format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    let path = output_path(out_dir, &a.out, &format!("simulate.{ext}"))?;
    match a.format {
        Format::Json => write_json(
            &path,
            &SimulateReport {
                meta: Meta::new("simulate", Some(a.v), Some(a.seed)),
                simulation: &mc,
                closed_form: closed,
            },
        )?,
        Format::Csv => {
            let mut w = create(&path)?;
            writeln!(
                w,
                "quantity,estimate,standard_error,closed_form,v,seed,samples,version"
            )?;
            let rows = [
                ("p_and_wins", mc.p_and_wins, closed.p_and_wins),
                ("revenue_and", mc.revenue_and, closed.revenue_and),
                ("revenue_or", mc.revenue_or, closed.revenue_or),
                ("revenue_total", mc.revenue_total, closed.revenue_total),
                ("welfare", mc.welfare, closed.welfare),
                ("u_and", mc.u_and, 0.0),
                ("u_or", mc.u_or, a.v - 0.5),
                ("poa", mc.poa, closed.poa),
                ("welfare_loss", mc.welfare_loss, closed.welfare_loss),
            ];
            for (name, est, exact) in rows {
                writeln!(
                    w,
                    "{name},{},{},{},{},{},{},{VERSION}",
                    est.mean, est.se, exact, a.v, a.seed, a.samples
                )?;
            }
            w.flush()?;
        }
    }
    println!(
        "p_and_wins = {:.6} ± {:.6} (closed form {:.6}); wrote {}",
        mc.p_and_wins.mean,
        mc.p_and_wins.se,
        closed.p_and_wins,
        path.display()
    );
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct VerifyReport {
    meta: Meta,
    profile: String,
    tie: String,
    #[serde(flatten)]
    report: VerificationReport,
}

fn verify(out_dir: &Path, a: &VerifyArgs) -> Result<Outcome> {
    let tie = parse_tie(&a.tie)?;
    let value = OrValue::new(a.v)?;
    let (f_and, f_or, source): (SharedDistribution, SharedDistribution, String) = match &a.profile {
        None => (
            Arc::new(AndEquilibrium::new(a.v)?),
            Arc::new(OrEquilibrium::new()),
            "closed-form".into(),
        ),
        Some(path) => {
            let file =
                File::open(path).with_context(|| format!("opening profile {}", path.display()))?;
            let s = solver::read_profile_csv(file)
                .with_context(|| format!("reading profile {}", path.display()))?;
            (Arc::new(s.and), Arc::new(s.or), path.display().to_string())
        }
    };
    let cap = BidCap::default_for(value)
        .get()
        .max(f_and.upper_bound())
        .max(f_or.upper_bound());
    let auction = Auction::new(value)
        .with_tie(tie.clone())
        .with_cap(BidCap::new(cap)?);
    let mut report = verifier::check_equilibrium(
        f_and.as_ref(),
        f_or.as_ref(),
        &auction,
        a.grid_step,
        a.char_tolerance,
    )?;
    if let Some(eps) = a.tolerance {
        anyhow::ensure!(
            eps.is_finite() && eps >= 0.0,
            "tolerance must be nonnegative, got {eps}"
        );
        report.equilibrium = report.equilibrium.with_epsilon(eps);
    }
    let path = output_path(out_dir, &a.out, "verify.json")?;
    let nash = report.equilibrium.is_eps_nash;
    let e = &report.equilibrium;
    println!(
        "eps_and = {:.3e}, eps_or = {:.3e}, epsilon = {:.3e}: {}; characterization {}",
        e.eps_and,
        e.eps_or,
        e.epsilon,
        if nash {
            "epsilon-Nash"
        } else {
            "not epsilon-Nash"
        },
        if report.characterization.holds {
            "holds"
        } else {
            "violated"
        }
    );
    for v in &report.characterization.violations {
        println!(
            "  violation ({}): expected {} got {} at {}",
            v.clause, v.expected, v.actual, v.location
        );
    }
    write_json(
        &path,
        &VerifyReport {
            meta: Meta::new("verify", Some(a.v), None),
            profile: source,
            tie: tie.label().to_string(),
            report,
        },
    )?;
    Ok(if nash { Outcome::Ok } else { Outcome::NotNash })
}

#[derive(Serialize)]
struct GameInfo {
    mode: GridMode,
    levels: usize,
    grid: Vec<f64>,
    tie: String,
    and_strategies: usize,
    or_strategies: usize,
}

#[derive(Serialize)]
struct MixedSummary {
    u_and: f64,
    u_or: f64,
    eps_and: f64,
    eps_or: f64,
    eps: f64,
    comparison: Option<solver::AnalyticComparison>,
}

impl MixedSummary {
    fn new(game: &solver::GridGame, p: &solver::MixedProfile) -> Result<Self> {
        // The closed forms exist only for v > 1/2.
        let comparison = if game.v > 0.5 {
            Some(solver::compare_to_analytic(game, p)?)
        } else {
            None
        };
        Ok(Self {
            u_and: p.u_and,
            u_or: p.u_or,
            eps_and: p.eps_and,
            eps_or: p.eps_or,
            eps: p.eps,
            comparison,
        })
    }
}

#[derive(Serialize)]
#[serde(tag = "solver", rename_all = "kebab-case")]
enum SolveResult {
    Pure {
        equilibria: Vec<solver::PureProfile>,
    },
    FictitiousPlay {
        iterations: usize,
        tie_breaking: TieBreaking,
        profile: MixedSummary,
        trace: Vec<(usize, f64)>,
        profile_file: String,
    },
    SupportEnumeration {
        max_support: usize,
        candidates: usize,
        singular: usize,
        equilibria: Vec<MixedSummary>,
        profile_file: Option<String>,
    },
}

#[derive(Serialize)]
struct SolveReport {
    meta: Meta,
    game: GameInfo,
    result: SolveResult,
}

fn solve(out_dir: &Path, a: &SolveArgs) -> Result<Outcome> {
    let tie = parse_tie(&a.tie)?;
    let levels = usize::try_from(a.grid).context("grid size too large")?;
    let game = solver::build_grid_game(a.v, levels, a.mode, &tie)?;
    let info = GameInfo {
        mode: a.mode,
        levels,
        grid: game.grid.clone(),
        tie: tie.label().to_string(),
        and_strategies: game.and_strategies.len(),
        or_strategies: game.or_strategies.len(),
    };
    let write_profile = |p: &solver::MixedProfile| -> Result<String> {
        let path = output_path(out_dir, &a.profile_out, "profile.csv")?;
        let mut w = create(&path)?;
        solver::write_profile_csv(&game, p, &mut w)?;
        w.flush()?;
        Ok(path.display().to_string())
    };
    let result = if a.pure {
        let equilibria = solver::pure_nash_profiles(&game);
        println!("{} pure equilibria", equilibria.len());
        SolveResult::Pure { equilibria }
    } else {
        match a.solver {
            SolverKind::FictitiousPlay => {
                let tie_breaking = match a.fp_ties {
                    FpTies::Lowest => TieBreaking::LowestIndex,
                    FpTies::Random => TieBreaking::Randomized { seed: a.seed },
                };
                let iterations = usize::try_from(a.iters).context("iteration count too large")?;
                let run = solver::solve_fictitious_play(&game.payoffs, iterations, tie_breaking)?;
                let summary = MixedSummary::new(&game, &run.profile)?;
                print_mixed(&summary);
                SolveResult::FictitiousPlay {
                    iterations,
                    tie_breaking,
                    profile: summary,
                    trace: run.trace,
                    profile_file: write_profile(&run.profile)?,
                }
            }
            SolverKind::SupportEnumeration => {
                let s = solver::solve_support_enumeration(&game.payoffs, a.max_support)?;
                let equilibria = s
                    .equilibria
                    .iter()
                    .map(|e| MixedSummary::new(&game, e))
                    .collect::<Result<Vec<_>>>()?;
                println!(
                    "{} equilibria from {} support pairs ({} singular)",
                    equilibria.len(),
                    s.candidates,
                    s.singular
                );
                if let Some(first) = equilibria.first() {
                    print_mixed(first);
                }
                SolveResult::SupportEnumeration {
                    max_support: a.max_support,
                    candidates: s.candidates,
                    singular: s.singular,
                    equilibria,
                    profile_file: s.equilibria.first().map(write_profile).transpose()?,
                }
            }
        }
    };
    let path = output_path(out_dir, &a.out, "solve.json")?;
    write_json(
        &path,
        &SolveReport {
            meta: Meta::new("solve", Some(a.v), Some(a.seed)),
            game: info,
            result,
        },
    )?;
    Ok(Outcome::Ok)
}

fn print_mixed(s: &MixedSummary) {
    print!("eps = {:.3e}", s.eps);
    if let Some(c) = &s.comparison {
        print!(
            ", KS AND {:.4}/{:.4}, KS OR {:.4}/{:.4}, origin atom deviation {:.4}",
            c.ks_and[0], c.ks_and[1], c.ks_or[0], c.ks_or[1], c.origin_atom_deviation
        );
    }
    println!();
}

/// Value of `v` at which the asymptotic welfare loss is reported.
const LOSS_V: f64 = 1e4;

#[derive(Serialize)]
struct LossConstant {
    v: f64,
    welfare_loss: f64,
    limit: f64,
    abs_error: f64,
}

#[derive(Serialize)]
struct FiguresSummary {
    meta: Meta,
    v_min: f64,
    v_max: f64,
    step: f64,
    files: Vec<String>,
    poa_minima: [analytics::PoaMinimum; 2],
    loss_constant: LossConstant,
}

fn figures(out_dir: &Path, a: &FiguresArgs) -> Result<Outcome> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let ids: Vec<FigureId> = match a.figure {
        Some(id) => vec![id],
        None => FigureId::ALL.to_vec(),
    };
    let mut files = Vec::new();
    for id in &ids {
        let series = analytics::figure_series(*id, a.v_min, a.v_max, a.step)?;
        let path = out_dir.join(format!("{}.csv", id.as_str()));
        let mut w = create(&path)?;
        series.write_csv(&mut w)?;
        w.flush()?;
        println!(
            "{}: {} rows -> {}",
            id.as_str(),
            series.rows.len(),
            path.display()
        );
        files.push(path.display().to_string());
    }
    if a.figure.is_none() {
        let loss = analytics::report(LOSS_V)?.welfare_loss;
        let limit = std::f64::consts::LN_2 - 0.5;
        let summary = FiguresSummary {
            meta: Meta::new("figures", None, None),
            v_min: a.v_min,
            v_max: a.v_max,
            step: a.step,
            files,
            poa_minima: analytics::find_poa_minima()?,
            loss_constant: LossConstant {
                v: LOSS_V,
                welfare_loss: loss,
                limit,
                abs_error: (loss - limit).abs(),
            },
        };
        let path = out_dir.join("summary.json");
        write_json(&path, &summary)?;
        for m in &summary.poa_minima {
            println!("PoA minimum {:.6} at v = {:.6}", m.poa, m.v);
        }
    }
    Ok(Outcome::Ok)
}

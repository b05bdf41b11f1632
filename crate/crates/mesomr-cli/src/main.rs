//! Command-line front end: transition-probability tables, figure data as
//! CSV, cross-backend verification, macrorealism scans, and significance
//! runs. Time is surfaced in units of the particle's proper mean lifetime
//! at every interface; seconds are used internally.

mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use mesomr::gkls::{build_generators, flavor_propagate_exact, gkls_evolve, ExtendedState};
use mesomr::macrorealism::{scan, violation_intervals, Quantity, ScanSeries};
use mesomr::measurement::{joint2, joint2_oracle, joint3, joint3_oracle};
use mesomr::significance::{significance, PseudoConfig};
use mesomr::transition::{oscillation_prob, survival_prob};
use mesomr::{parse_registry, Flavor, MesonParams, Outcome, DEFAULT_REGISTRY};

use output::{fmt_field, outln, CsvWriter};

#[derive(Parser)]
#[command(
    name = "mesomr",
    version,
    about = "Macrorealism tests for oscillating, decaying neutral mesons"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate survival and oscillation probabilities as CSV.
    Probs(ProbsArgs),
    /// Write figure data: LGI, WLGI, and NSIT curves as CSV files.
    Figures(FiguresArgs),
    /// Check the analytic formulas against the GKLS integrator.
    Verify(VerifyArgs),
    /// Scan all macrorealism tests over a time grid.
    Scan(ScanArgs),
    /// Pseudo-experiment significance of the NSIT violation.
    Significance(SignificanceArgs),
}

#[derive(Args)]
struct ParticleArgs {
    /// Particle name from the registry.
    #[arg(long, default_value = "K0")]
    particle: String,
    /// Prepared flavor.
    #[arg(long, value_enum, default_value_t = FlavorArg::Particle)]
    flavor: FlavorArg,
    /// Registry file; the built-in presets are used when omitted.
    #[arg(long)]
    registry: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    /// Grid start, in units of the particle's lifetime.
    #[arg(long, default_value_t = 0.0)]
    tmin: f64,
    /// Grid end, in units of the particle's lifetime.
    #[arg(long, default_value_t = 10.0)]
    tmax: f64,
    /// Number of grid points (endpoints included).
    #[arg(long, default_value_t = 2001)]
    points: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FlavorArg {
    Particle,
    Antiparticle,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Flavor {
        match f {
            FlavorArg::Particle => Flavor::Particle,
            FlavorArg::Antiparticle => Flavor::Antiparticle,
        }
    }
}

#[derive(Args)]
struct ProbsArgs {
    #[command(flatten)]
    particle: ParticleArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Output CSV path.
    #[arg(long, default_value = "probs.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct FiguresArgs {
    /// Particle name(s); the first drives lgi.csv/wlgi.csv/nsit.csv,
    /// each further one adds `nsit_<name>.csv`.
    #[arg(long = "particle", default_value = "K0")]
    particles: Vec<String>,
    /// Prepared flavor.
    #[arg(long, value_enum, default_value_t = FlavorArg::Particle)]
    flavor: FlavorArg,
    /// Registry file; the built-in presets are used when omitted.
    #[arg(long)]
    registry: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    particle: ParticleArgs,
    /// Grid start, in units of the particle's lifetime.
    #[arg(long, default_value_t = 0.0)]
    tmin: f64,
    /// Grid end, in units of the particle's lifetime.
    #[arg(long, default_value_t = 5.0)]
    tmax: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = 20)]
    points: usize,
    /// Oracle step divisor: the integrator step is lifetime / step-div.
    #[arg(long = "step-div", default_value_t = 2000)]
    step_div: u32,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    particle: ParticleArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Output CSV path.
    #[arg(long, default_value = "scan.csv")]
    out: PathBuf,
    /// Violation threshold for the interval summary.
    #[arg(long, default_value_t = 1e-9)]
    threshold: f64,
}

#[derive(Args)]
struct SignificanceArgs {
    #[command(flatten)]
    particle: ParticleArgs,
    /// Protocol time, in units of the particle's lifetime.
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Relative Gaussian error on each measured probability.
    #[arg(long = "rel-sigma", default_value_t = 0.01)]
    rel_sigma: f64,
    /// Number of pseudo-experiments.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// RNG seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

enum CliError {
    Usage(String),
    Verification(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Verification(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Verification(m) | CliError::Io(m) => m,
        }
    }

    fn usage(err: impl std::fmt::Display) -> Self {
        CliError::Usage(err.to_string())
    }

    fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Probs(args) => cmd_probs(args),
        Command::Figures(args) => cmd_figures(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Significance(args) => cmd_significance(args),
    }
}

fn load_particle(registry: &Option<PathBuf>, name: &str) -> Result<MesonParams, CliError> {
    let entries = match registry {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            parse_registry(&text).map_err(CliError::usage)?
        }
        None => parse_registry(DEFAULT_REGISTRY).expect("built-in registry is valid"),
    };
    entries
        .iter()
        .find(|p| p.name == name)
        .cloned()
        .ok_or_else(|| {
            let names: Vec<&str> = entries.iter().map(|p| p.name.as_str()).collect();
            CliError::Usage(format!(
                "unknown particle '{name}'; registry provides: {}",
                names.join(", ")
            ))
        })
}

/// Uniform grid in seconds from lifetime-scaled bounds; `tmin == tmax` is
/// allowed and yields a constant grid.
fn time_grid(
    params: &MesonParams,
    tmin: f64,
    tmax: f64,
    points: usize,
) -> Result<Vec<f64>, CliError> {
    if !(tmin >= 0.0 && tmax >= tmin && points >= 1) {
        return Err(CliError::Usage(format!(
            "invalid grid: tmin = {tmin}, tmax = {tmax}, points = {points}"
        )));
    }
    let tau = params.lifetime_unit;
    if points == 1 || tmax == tmin {
        return Ok(vec![tmin * tau; points]);
    }
    let step = (tmax - tmin) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i + 1 == points {
                tmax * tau
            } else {
                (tmin + step * i as f64) * tau
            }
        })
        .collect())
}

fn cmd_probs(args: ProbsArgs) -> Result<(), CliError> {
    let params = load_particle(&args.particle.registry, &args.particle.particle)?;
    let flavor: Flavor = args.particle.flavor.into();
    let grid = time_grid(&params, args.grid.tmin, args.grid.tmax, args.grid.points)?;
    if args.grid.points < 1 {
        return Err(CliError::Usage("need at least one grid point".into()));
    }

    let mut csv = CsvWriter::create(&args.out)?;
    csv.header(&["t_over_tau", "P_surv", "P_osc_fwd", "P_osc_bwd"])?;
    for t in grid {
        let surv = survival_prob(&params, t).map_err(CliError::usage)?;
        let fwd = oscillation_prob(&params, flavor, t).map_err(CliError::usage)?;
        let bwd = oscillation_prob(&params, flavor.conjugate(), t).map_err(CliError::usage)?;
        csv.row(&[t / params.lifetime_unit, surv, fwd, bwd])?;
    }
    csv.finish()
}

fn cmd_figures(args: FiguresArgs) -> Result<(), CliError> {
    if args.particles.is_empty() {
        return Err(CliError::Usage("need at least one --particle".into()));
    }
    fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    let flavor: Flavor = args.flavor.into();

    for (idx, name) in args.particles.iter().enumerate() {
        let params = load_particle(&args.registry, name)?;
        let series = run_scan(&params, flavor, &args.grid)?;
        let tau = params.lifetime_unit;

        if idx == 0 {
            let mut lgi = CsvWriter::create(&args.out.join("lgi.csv"))?;
            lgi.header(&["t_over_tau", "L1", "L2", "L3", "L4"])?;
            let mut wlgi = CsvWriter::create(&args.out.join("wlgi.csv"))?;
            wlgi.header(&["t_over_tau", "W1", "W2"])?;
            for (t, r) in series.grid.iter().zip(&series.reports) {
                let x = t / tau;
                lgi.row(&[x, r.lgi[0], r.lgi[1], r.lgi[2], r.lgi[3]])?;
                wlgi.row(&[x, r.wlgi[0], r.wlgi[1]])?;
            }
            lgi.finish()?;
            wlgi.finish()?;
        }

        let nsit_name = if idx == 0 {
            "nsit.csv".to_string()
        } else {
            format!("nsit_{name}.csv")
        };
        let mut nsit = CsvWriter::create(&args.out.join(nsit_name))?;
        nsit.header(&["t_over_tau", "N"])?;
        for (t, r) in series.grid.iter().zip(&series.reports) {
            nsit.row(&[t / tau, r.nsit_n])?;
        }
        nsit.finish()?;
    }
    Ok(())
}

fn run_scan(params: &MesonParams, flavor: Flavor, grid: &GridArgs) -> Result<ScanSeries, CliError> {
    let tau = params.lifetime_unit;
    scan(
        params,
        flavor,
        grid.tmin * tau,
        grid.tmax * tau,
        grid.points,
    )
    .map_err(CliError::usage)
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let params = load_particle(&args.particle.registry, &args.particle.particle)?;
    let flavor: Flavor = args.particle.flavor.into();
    if args.step_div == 0 {
        return Err(CliError::Usage("step divisor must be positive".into()));
    }
    let step = params.lifetime_unit / args.step_div as f64;
    let grid = time_grid(&params, args.tmin, args.tmax, args.points)?;

    let gen = build_generators(&params).map_err(CliError::usage)?;
    let initial = ExtendedState::pure_flavor(flavor);

    let mut d_joint2 = 0.0f64;
    let mut d_joint3 = 0.0f64;
    let mut d_flavor = 0.0f64;
    for &t in &grid {
        let a2 = joint2(&params, flavor, t, t).map_err(CliError::usage)?;
        let o2 = joint2_oracle(&params, flavor, t, t, step).map_err(CliError::usage)?;
        let a3 = joint3(&params, flavor, 0.0, t, 2.0 * t).map_err(CliError::usage)?;
        let o3 = joint3_oracle(&params, flavor, 0.0, t, 2.0 * t, step).map_err(CliError::usage)?;
        for x in Outcome::ALL {
            for y in Outcome::ALL {
                d_joint2 = d_joint2.max((a2.prob(x, y) - o2.prob(x, y)).abs());
                for z in Outcome::ALL {
                    d_joint3 = d_joint3.max((a3.prob(x, y, z) - o3.prob(x, y, z)).abs());
                }
            }
        }
        let integrated = gkls_evolve(&gen, &initial, t, step).map_err(CliError::usage)?;
        let exact =
            flavor_propagate_exact(&params, &initial.flavor_block(), t).map_err(CliError::usage)?;
        let block_diff = (integrated.flavor_block() - exact)
            .iter()
            .map(|e| e.norm())
            .fold(0.0, f64::max);
        d_flavor = d_flavor.max(block_diff);
    }

    outln!(
        "joint2 vs oracle:            max |diff| = {}",
        fmt_field(d_joint2)
    );
    outln!(
        "joint3 vs oracle:            max |diff| = {}",
        fmt_field(d_joint3)
    );
    outln!(
        "flavor block exact vs gkls:  max |diff| = {}",
        fmt_field(d_flavor)
    );

    let worst = d_joint2.max(d_joint3).max(d_flavor);
    if worst > 1e-6 {
        return Err(CliError::Verification(format!(
            "backend discrepancy {worst:e} exceeds 1e-6 (step divisor {})",
            args.step_div
        )));
    }
    outln!("verification passed (threshold 1e-6)");
    Ok(())
}

fn cmd_scan(args: ScanArgs) -> Result<(), CliError> {
    let params = load_particle(&args.particle.registry, &args.particle.particle)?;
    let flavor: Flavor = args.particle.flavor.into();
    let series = run_scan(&params, flavor, &args.grid)?;
    let tau = params.lifetime_unit;

    let mut csv = CsvWriter::create(&args.out)?;
    let mut header = vec!["t_over_tau"];
    header.extend(Quantity::ALL.iter().map(|q| q.name()));
    csv.header(&header)?;
    for (t, r) in series.grid.iter().zip(&series.reports) {
        let mut row = vec![t / tau];
        row.extend(Quantity::ALL.iter().map(|q| q.extract(r)));
        csv.row(&row)?;
    }
    csv.finish()?;

    outln!(
        "scan: {} points on [{}, {}] tau, {}",
        series.grid.len(),
        args.grid.tmin,
        args.grid.tmax,
        params.name
    );
    outln!(
        "{:>12}  {:>24}  {:>24}",
        "quantity",
        "min @ t/tau",
        "max @ t/tau"
    );
    for (q, s) in series.summary.iter() {
        outln!(
            "{:>12}  {:>17.10e} @ {:<6.3}  {:>17.10e} @ {:<6.3}",
            q.name(),
            s.min,
            s.argmin / tau,
            s.max,
            s.argmax / tau
        );
    }
    let n_stats = series.summary.get(Quantity::N);
    let peak = if n_stats.max.abs() >= n_stats.min.abs() {
        (n_stats.max, n_stats.argmax)
    } else {
        (n_stats.min, n_stats.argmin)
    };
    outln!("max|N| = {:e} at t/tau = {:.4}", peak.0.abs(), peak.1 / tau);

    for q in [
        Quantity::L1,
        Quantity::L2,
        Quantity::L3,
        Quantity::L4,
        Quantity::W1,
        Quantity::W2,
        Quantity::W3,
        Quantity::N,
    ] {
        let runs = violation_intervals(&series, q, args.threshold).map_err(CliError::usage)?;
        if runs.is_empty() {
            outln!(
                "violations[{}] (threshold {:e}): none",
                q.name(),
                args.threshold
            );
        } else {
            let spans: Vec<String> = runs
                .iter()
                .map(|(lo, hi)| format!("[{:.4}, {:.4}]", lo / tau, hi / tau))
                .collect();
            outln!(
                "violations[{}] (threshold {:e}): {}",
                q.name(),
                args.threshold,
                spans.join(" ")
            );
        }
    }
    Ok(())
}

fn cmd_significance(args: SignificanceArgs) -> Result<(), CliError> {
    let params = load_particle(&args.particle.registry, &args.particle.particle)?;
    let flavor: Flavor = args.particle.flavor.into();
    if args.t < 0.0 {
        return Err(CliError::Usage(format!(
            "t must be non-negative, got {}",
            args.t
        )));
    }
    let cfg = PseudoConfig {
        t: args.t * params.lifetime_unit,
        rel_sigma: args.rel_sigma,
        n_trials: args.trials,
        seed: args.seed,
    };
    let result = significance(&params, flavor, &cfg).map_err(CliError::usage)?;
    let json = serde_json::json!({
        "n_observed": result.n_observed,
        "null_mean": result.null_mean,
        "null_sd": result.null_sd,
        "z_score": result.z_score,
        "n_trials": result.n_trials,
    });
    outln!("{json}");
    Ok(())
}

//! Command-line front end: sweeps, thresholds, Monte-Carlo verification and
//! single-point channel inspection.
//!
//! Exit codes: 0 success, 1 invalid input, 2 verification failure, 3 I/O
//! error.

mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fibercap::dark::{effective_channel, DarkCountParams};
use fibercap::mc::{empirical_threshold, verify_against, PointVerification, ThresholdScan};
use fibercap::sweep::{
    run_sweep, solve_threshold, write_csv, write_json, DistanceScale, SweepConfig,
};
use fibercap::{ErasurePauliChannel, FiberParams, PauliDistribution, PmdRegime};

use config::ConfigValues;

#[derive(Parser)]
#[command(
    name = "fibercap",
    version,
    about = "Capacity bounds for polarization qubits in lossy, PMD-noisy fiber",
    propagate_version = true
)]
struct Cli {
    /// Flat key=value parameter file; command-line flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rate-versus-distance sweep, one curve per dark-count probability.
    Sweep(SweepArgs),
    /// Distance at which the capacity upper bound reaches zero.
    Threshold(ThresholdArgs),
    /// Monte-Carlo verification of the closed forms at sampled points.
    Verify(VerifyArgs),
    /// Channel parameters and capacity bounds at one distance.
    ShowChannel(ShowArgs),
}

#[derive(Args, Clone)]
struct ChannelFlags {
    /// Fiber loss rate, dB/km.
    #[arg(long)]
    alpha: Option<f64>,
    /// Photon bandwidth, GHz.
    #[arg(long)]
    delta_nu: Option<f64>,
    /// PMD coefficient, ps/sqrt(km).
    #[arg(long)]
    d_pmd: Option<f64>,
    /// PMD regime.
    #[arg(long, value_enum)]
    regime: Option<RegimeArg>,
    /// Depolarizing floor probability (depol regime only).
    #[arg(long)]
    p_inf: Option<f64>,
    /// Depolarizing decoherence length in km (depol regime only).
    #[arg(long = "L")]
    decoherence_length: Option<f64>,
    /// Dark-count probability per detection window; repeatable.
    #[arg(long = "p-dc")]
    p_dc: Vec<f64>,
}

#[derive(Args, Clone)]
struct GridFlags {
    /// Shortest distance, km.
    #[arg(long)]
    d_min: Option<f64>,
    /// Longest distance, km.
    #[arg(long)]
    d_max: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    points: Option<usize>,
    /// Log-spaced distance grid instead of linear.
    #[arg(long)]
    log_scale: bool,
}

#[derive(Args, Clone)]
struct OutputFlags {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    channel: ChannelFlags,
    #[command(flatten)]
    grid: GridFlags,
    #[command(flatten)]
    output: OutputFlags,
    /// Channel uses per second; enables the ebits/s column.
    #[arg(long)]
    clock_hz: Option<f64>,
    /// Seed recorded with the sweep (used by verification runs).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ThresholdArgs {
    #[command(flatten)]
    channel: ChannelFlags,
    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    channel: ChannelFlags,
    #[command(flatten)]
    grid: GridFlags,
    /// Monte-Carlo trials per verification point (min 10^4).
    #[arg(long)]
    trials: Option<u64>,
    /// RNG seed; identical seeds give byte-identical reports.
    #[arg(long)]
    seed: Option<u64>,
    /// Machine-readable JSON report path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fault injection for the test harness: bias the analytic reference
    /// transmissivity by this amount so the run must fail.
    #[arg(long, value_name = "BIAS")]
    inject_eta_bias: Option<f64>,
}

#[derive(Args)]
struct ShowArgs {
    /// Fiber distance, km.
    distance_km: f64,
    #[command(flatten)]
    channel: ChannelFlags,
    /// Channel uses per second; adds an ebits/s line.
    #[arg(long)]
    clock_hz: Option<f64>,
    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum RegimeArg {
    Depol,
    Dephase,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

/// Fully resolved parameters: defaults, overridden by the config file,
/// overridden by flags.
struct Settings {
    fiber: FiberParams,
    p_dc: Vec<f64>,
    d_min: f64,
    d_max: f64,
    points: usize,
    log_scale: bool,
    clock_hz: Option<f64>,
    seed: u64,
    trials: u64,
    out: Option<PathBuf>,
    format: FormatArg,
}

enum CliError {
    Input(String),
    Verification(String),
    Io(String),
}

impl From<fibercap::Error> for CliError {
    fn from(e: fibercap::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn resolve(
    cfg: &ConfigValues,
    channel: &ChannelFlags,
    grid: Option<&GridFlags>,
    out: Option<&OutputFlags>,
    clock_hz: Option<f64>,
    seed: Option<u64>,
    trials: Option<u64>,
) -> Result<Settings, CliError> {
    let regime_arg = match (&channel.regime, &cfg.regime) {
        (Some(r), _) => *r,
        (None, Some(s)) => match s.as_str() {
            "depol" => RegimeArg::Depol,
            "dephase" => RegimeArg::Dephase,
            other => {
                return Err(CliError::Input(format!(
                    "config regime '{other}' is neither 'depol' nor 'dephase'"
                )))
            }
        },
        (None, None) => RegimeArg::Dephase,
    };
    let regime = match regime_arg {
        RegimeArg::Dephase => PmdRegime::DephasingDominated,
        RegimeArg::Depol => PmdRegime::DepolarizingDominated {
            decoherence_length_km: channel
                .decoherence_length
                .or(cfg.decoherence_length)
                .unwrap_or(0.05),
            p_inf: channel.p_inf.or(cfg.p_inf).unwrap_or(1.0),
        },
    };
    let fiber = FiberParams::new(
        channel.alpha.or(cfg.alpha).unwrap_or(0.2),
        channel.delta_nu.or(cfg.delta_nu).unwrap_or(100.0),
        channel.d_pmd.or(cfg.d_pmd).unwrap_or(0.1),
        regime,
    )?;
    let p_dc = if !channel.p_dc.is_empty() {
        channel.p_dc.clone()
    } else {
        cfg.p_dc.clone().unwrap_or_else(|| vec![0.0])
    };
    let format = match (out.and_then(|o| o.format), &cfg.format) {
        (Some(f), _) => f,
        (None, Some(s)) => match s.as_str() {
            "csv" => FormatArg::Csv,
            "json" => FormatArg::Json,
            other => {
                return Err(CliError::Input(format!(
                    "config format '{other}' is neither 'csv' nor 'json'"
                )))
            }
        },
        (None, None) => FormatArg::Csv,
    };
    Ok(Settings {
        fiber,
        p_dc,
        d_min: grid.and_then(|g| g.d_min).or(cfg.d_min).unwrap_or(1.0),
        d_max: grid.and_then(|g| g.d_max).or(cfg.d_max).unwrap_or(500.0),
        points: grid.and_then(|g| g.points).or(cfg.points).unwrap_or(100),
        log_scale: grid.map(|g| g.log_scale).unwrap_or(false) || cfg.log_scale.unwrap_or(false),
        clock_hz: clock_hz.or(cfg.clock_hz),
        seed: seed.or(cfg.seed).unwrap_or(7),
        trials: trials.or(cfg.trials).unwrap_or(1_000_000),
        out: out
            .and_then(|o| o.out.clone())
            .or_else(|| cfg.out.as_ref().map(PathBuf::from)),
        format,
    })
}

/// Writes to the configured path, or stdout when none is set.
fn emit(out: &Option<PathBuf>, content: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            std::io::stdout().write_all(content)?;
            Ok(())
        }
    }
}

fn cmd_sweep(cfg: &ConfigValues, args: &SweepArgs) -> Result<(), CliError> {
    let s = resolve(
        cfg,
        &args.channel,
        Some(&args.grid),
        Some(&args.output),
        args.clock_hz,
        args.seed,
        None,
    )?;
    let config = SweepConfig {
        fiber: s.fiber,
        p_dc_values: s.p_dc.clone(),
        d_min_km: s.d_min,
        d_max_km: s.d_max,
        n_points: s.points,
        scale: if s.log_scale {
            DistanceScale::Log
        } else {
            DistanceScale::Linear
        },
        clock_hz: s.clock_hz,
        seed: s.seed,
    };
    let rows = run_sweep(&config)?;
    let mut buf = Vec::new();
    match s.format {
        FormatArg::Csv => write_csv(&rows, &mut buf)?,
        FormatArg::Json => write_json(&rows, &mut buf)?,
    }
    emit(&s.out, &buf)
}

fn cmd_threshold(cfg: &ConfigValues, args: &ThresholdArgs) -> Result<(), CliError> {
    let s = resolve(
        cfg,
        &args.channel,
        None,
        Some(&args.output),
        None,
        None,
        None,
    )?;
    #[derive(serde::Serialize)]
    struct Row {
        p_dc: f64,
        max_distance_km: Option<f64>,
    }
    let mut rows = Vec::new();
    for &p_dc in &s.p_dc {
        let d = solve_threshold(&s.fiber, DarkCountParams::new(p_dc)?)?;
        rows.push(Row {
            p_dc,
            max_distance_km: d.is_finite().then_some(d),
        });
    }
    let mut buf = Vec::new();
    match s.format {
        FormatArg::Csv => {
            for r in &rows {
                match r.max_distance_km {
                    Some(d) => writeln!(buf, "p_dc = {:e}: max distance {d:.9} km", r.p_dc)?,
                    None => writeln!(buf, "p_dc = {:e}: no finite limit", r.p_dc)?,
                }
            }
        }
        FormatArg::Json => {
            serde_json::to_writer_pretty(&mut buf, &rows).map_err(std::io::Error::from)?;
            writeln!(buf)?;
        }
    }
    emit(&s.out, &buf)
}

fn cmd_show(cfg: &ConfigValues, args: &ShowArgs) -> Result<(), CliError> {
    let s = resolve(
        cfg,
        &args.channel,
        None,
        Some(&args.output),
        args.clock_hz,
        None,
        None,
    )?;
    let d = args.distance_km;
    let base = s.fiber.channel_at(d)?;
    #[derive(serde::Serialize)]
    struct Point {
        d_km: f64,
        p_dc: f64,
        eta: f64,
        p: f64,
        eta_prime: f64,
        p_prime: [f64; 4],
        lower_ebits: f64,
        upper_ebits: f64,
        exact: bool,
        zero_capacity: bool,
        rate_per_s: Option<f64>,
    }
    let mut points = Vec::new();
    for &p_dc in &s.p_dc {
        let eff = effective_channel(&base, DarkCountParams::new(p_dc)?);
        let b = eff.capacity_bounds();
        points.push(Point {
            d_km: d,
            p_dc,
            eta: base.eta(),
            p: s.fiber.pauli_probability(d)?,
            eta_prime: eff.eta(),
            p_prime: eff.dist().probs(),
            lower_ebits: b.lower,
            upper_ebits: b.upper,
            exact: b.exact,
            zero_capacity: eff.is_zero_capacity(),
            rate_per_s: s.clock_hz.map(|c| b.upper * c),
        });
    }
    let mut buf = Vec::new();
    match s.format {
        FormatArg::Json => {
            serde_json::to_writer_pretty(&mut buf, &points).map_err(std::io::Error::from)?;
            writeln!(buf)?;
        }
        FormatArg::Csv => {
            for pt in &points {
                writeln!(buf, "d_km          = {}", pt.d_km)?;
                writeln!(buf, "p_dc          = {:e}", pt.p_dc)?;
                writeln!(buf, "eta           = {:.12e}", pt.eta)?;
                writeln!(buf, "p             = {:.12e}", pt.p)?;
                writeln!(buf, "eta_prime     = {:.12e}", pt.eta_prime)?;
                writeln!(
                    buf,
                    "p_prime       = [{:.6e}, {:.6e}, {:.6e}, {:.6e}]",
                    pt.p_prime[0], pt.p_prime[1], pt.p_prime[2], pt.p_prime[3]
                )?;
                writeln!(buf, "lower_ebits   = {:.12e}", pt.lower_ebits)?;
                writeln!(buf, "upper_ebits   = {:.12e}", pt.upper_ebits)?;
                writeln!(buf, "exact         = {}", pt.exact)?;
                writeln!(buf, "zero_capacity = {}", pt.zero_capacity)?;
                if let Some(r) = pt.rate_per_s {
                    writeln!(buf, "rate_per_s    = {r:.6e}")?;
                }
                writeln!(buf)?;
            }
        }
    }
    emit(&s.out, &buf)
}

#[derive(serde::Serialize)]
struct VerifyReport {
    trials: u64,
    seed: u64,
    points: Vec<VerifyPoint>,
    threshold_scans: Vec<ScanOutcome>,
    pass: bool,
}

#[derive(serde::Serialize)]
struct VerifyPoint {
    d_km: f64,
    p_dc: f64,
    verification: PointVerification,
}

#[derive(serde::Serialize)]
struct ScanOutcome {
    family: String,
    estimate: f64,
    expected: f64,
    tolerance: f64,
    pass: bool,
}

fn cmd_verify(cfg: &ConfigValues, args: &VerifyArgs) -> Result<(), CliError> {
    let s = resolve(
        cfg,
        &args.channel,
        Some(&args.grid),
        None,
        None,
        args.seed,
        args.trials,
    )?;
    let out = args
        .out
        .clone()
        .or_else(|| cfg.out.as_ref().map(PathBuf::from));
    let p_dc = s.p_dc.first().copied().unwrap_or(0.0);
    let dc = DarkCountParams::new(p_dc)?;
    let bias = args.inject_eta_bias.unwrap_or(0.0);

    let mut points = Vec::new();
    let distances = [s.d_min, 0.5 * (s.d_min + s.d_max), s.d_max];
    for (i, &d) in distances.iter().enumerate() {
        let truth = s.fiber.channel_at(d)?;
        let claimed = if bias == 0.0 {
            truth
        } else {
            ErasurePauliChannel::new((truth.eta() + bias).clamp(0.0, 1.0), *truth.dist())?
        };
        let v = verify_against(
            &truth,
            &claimed,
            dc,
            s.trials,
            s.seed.wrapping_add(i as u64),
        )?;
        points.push(VerifyPoint {
            d_km: d,
            p_dc,
            verification: v,
        });
    }

    // Distillability thresholds re-derived from samples.
    let n_per_point = (s.trials / 10).max(25_000);
    let mut scans = Vec::new();
    let dephase = empirical_threshold(
        |p| ErasurePauliChannel::new(0.5, PauliDistribution::dephasing(p).unwrap()).unwrap(),
        DarkCountParams::none(),
        &ThresholdScan::new(0.05, 0.5, n_per_point, s.seed),
    )?;
    scans.push(ScanOutcome {
        family: "dephasing scanned in p".into(),
        estimate: dephase,
        expected: 0.5,
        tolerance: 0.02,
        pass: (dephase - 0.5).abs() <= 0.02,
    });
    let depol = empirical_threshold(
        |p| ErasurePauliChannel::new(0.5, PauliDistribution::isotropic(p).unwrap()).unwrap(),
        DarkCountParams::none(),
        &ThresholdScan::new(0.1, 1.0, n_per_point, s.seed),
    )?;
    scans.push(ScanOutcome {
        family: "depolarizing scanned in p".into(),
        estimate: depol,
        expected: 2.0 / 3.0,
        tolerance: 0.02,
        pass: (depol - 2.0 / 3.0).abs() <= 0.02,
    });

    let pass = points.iter().all(|p| p.verification.pass) && scans.iter().all(|s| s.pass);
    let report = VerifyReport {
        trials: s.trials,
        seed: s.seed,
        points,
        threshold_scans: scans,
        pass,
    };

    // Human-readable summary on stdout, machine-readable JSON to --out.
    let mut text = String::new();
    for p in &report.points {
        text.push_str(&format!(
            "point d = {:.3} km, p_dc = {:e}: {}\n",
            p.d_km,
            p.p_dc,
            if p.verification.pass { "pass" } else { "FAIL" }
        ));
        for c in &p.verification.checks {
            text.push_str(&format!(
                "  [{}] {}: observed {:+.6e}, reference {:+.6e}, tolerance {:.3e}\n",
                if c.pass { "ok" } else { "FAIL" },
                c.name,
                c.observed,
                c.reference,
                c.tolerance
            ));
        }
    }
    for sc in &report.threshold_scans {
        text.push_str(&format!(
            "[{}] threshold, {}: estimate {:.4}, expected {:.4} ± {:.2}\n",
            if sc.pass { "ok" } else { "FAIL" },
            sc.family,
            sc.estimate,
            sc.expected,
            sc.tolerance
        ));
    }
    text.push_str(&format!(
        "verify: {} (trials = {}, seed = {})\n",
        if report.pass { "PASS" } else { "FAIL" },
        report.trials,
        report.seed
    ));
    print!("{text}");

    if let Some(path) = &out {
        let json = serde_json::to_string_pretty(&report).map_err(std::io::Error::from)?;
        std::fs::write(path, json.as_bytes())
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }

    if !report.pass {
        let failing = report
            .points
            .iter()
            .flat_map(|p| p.verification.checks.iter())
            .filter(|c| !c.pass)
            .map(|c| c.name.clone())
            .chain(
                report
                    .threshold_scans
                    .iter()
                    .filter(|s| !s.pass)
                    .map(|s| s.family.clone()),
            )
            .collect::<Vec<_>>()
            .join("; ");
        return Err(CliError::Verification(format!("failed checks: {failing}")));
    }
    Ok(())
}

fn run() -> Result<(), CliError> {
    let cli = Cli::try_parse().map_err(|e| {
        // clap's own exit code conventions differ from this tool's; help and
        // version are success, everything else is invalid input.
        use clap::error::ErrorKind;
        if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
            print!("{e}");
            std::process::exit(0);
        }
        let msg = e.to_string();
        CliError::Input(msg.strip_prefix("error: ").unwrap_or(&msg).to_string())
    })?;

    let cfg = match &cli.config {
        Some(path) => config::load(path).map_err(CliError::Input)?,
        None => ConfigValues::default(),
    };

    match &cli.command {
        Command::Sweep(args) => cmd_sweep(&cfg, args),
        Command::Threshold(args) => cmd_threshold(&cfg, args),
        Command::Verify(args) => cmd_verify(&cfg, args),
        Command::ShowChannel(args) => cmd_show(&cfg, args),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("i/o error: {msg}");
            ExitCode::from(3)
        }
    }
}

//! `stbc` — construct, verify, analyze, and simulate low
//! ML-decoding-complexity space-time block codes.
//!
//! Exit codes: 0 success (and verification passed), 1 verification
//! failure, 2 usage error, 3 enumeration budget exceeded.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use stbc_core::design::{
    detect_groups, load_with_pam, save_with_pam, verify_design, Design, Rational,
};
use stbc_core::diversity::{
    find_scalings, is_fully_diverse, DiffMode, ScalingPool, DEFAULT_DIVERSITY_BUDGET,
};
use stbc_core::error::Error;
use stbc_core::fd::{
    build_fd, construct_for_rate, dast_base, default_rotation, puncture_design, realize_base,
    select_base_profile, BaseFamily,
};
use stbc_core::fgd::{build_fgd, puncture_fgd};
use stbc_core::multigroup::{build_ag, stack_phi};
use stbc_core::sim::{ber_curve, render_ber_csv, DecoderKind, SimConfig};
use stbc_core::tables::{
    comparison_rows, exponent_grid, rate_table_rows, render_comparison_csv, render_comparison_text,
    render_exponent_grid_csv, render_exponent_grid_text, render_rate_table_csv,
    render_rate_table_text,
};
use stbc_core::Tolerance;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

/// Default seed used by randomized verbs when --seed is not given.
const DEFAULT_SEED: u64 = 1;

/// Environment variable overriding the default enumeration budget.
const BUDGET_ENV: &str = "STBC_BUDGET";

#[derive(Parser)]
#[command(name = "stbc", version, about = "Space-time block code toolbox")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Ag,
    AgStacked,
    Fgd,
    Fd,
    Dast,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BaseArg {
    Auto,
    Dast,
    Fgd,
    Ag,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PoolArg {
    Integers,
    UnitCircle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DecoderArg {
    Exhaustive,
    Structured,
}

#[derive(Args)]
struct ConstructArgs {
    /// Design family to construct.
    #[arg(long, value_enum)]
    family: Family,
    /// Number of decoding groups (ag, ag-stacked).
    #[arg(long)]
    g: Option<usize>,
    /// Number of transmit antennas.
    #[arg(long, value_name = "N")]
    n: usize,
    /// Target rate as an exact fraction, e.g. 5/4 or 2 (fgd, fd).
    #[arg(long, value_name = "RATE")]
    r: Option<String>,
    /// Base family for --family fd; auto runs the selection search.
    #[arg(long, value_enum, default_value = "auto")]
    base: BaseArg,
    /// Output design file.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Design file to verify.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Number of transmit antennas.
    #[arg(long, value_name = "N")]
    n: usize,
    /// Rate as an exact fraction.
    #[arg(long, value_name = "RATE")]
    r: String,
    /// Optional CSV output path for the profile.
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct TablesArgs {
    /// Which report: 1 (rates), 2 (exponent grid), 3 (comparison).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    which: u8,
    /// Output directory for the .txt and .csv reports.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct DiversifyArgs {
    /// Design file to search scalings for (updated in place).
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// PAM points per real symbol.
    #[arg(long)]
    q: usize,
    /// Candidate pool for the per-symbol scalings.
    #[arg(long, value_enum, default_value = "integers")]
    pool: PoolArg,
    /// Exhaustive enumeration budget (overrides STBC_BUDGET).
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Design file to simulate.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// JSON config file; flags below override its fields.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// PAM points per real symbol (power of two).
    #[arg(long)]
    q: Option<usize>,
    /// Receive antennas.
    #[arg(long)]
    n_rx: Option<usize>,
    /// SNR grid in dB as start:step:end, e.g. 0:2:20.
    #[arg(long, value_name = "GRID")]
    snr: Option<String>,
    /// Monte-Carlo trials per SNR point.
    #[arg(long)]
    trials: Option<u64>,
    /// Seed for the per-trial random streams.
    #[arg(long)]
    seed: Option<u64>,
    /// Decoder used for the simulation.
    #[arg(long, value_enum)]
    decoder: Option<DecoderArg>,
    /// Output CSV path.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a design and write it to a design file.
    Construct(ConstructArgs),
    /// Verify the structural invariants of a design file.
    Verify(VerifyArgs),
    /// Decoding-cost profile of the best construction at (N, R).
    Analyze(AnalyzeArgs),
    /// Emit the comparison reports as text and CSV files.
    Tables(TablesArgs),
    /// Search full-diversity PAM scalings and store them in the file.
    Diversify(DiversifyArgs),
    /// Monte-Carlo bit-error-rate simulation.
    Simulate(SimulateArgs),
}

#[derive(Deserialize, Default)]
struct SimFileConfig {
    q: Option<usize>,
    n_rx: Option<usize>,
    snr_db_grid: Option<Vec<f64>>,
    trials_per_point: Option<u64>,
    seed: Option<u64>,
    decoder: Option<String>,
    distances: Option<Vec<f64>>,
}

fn parse_rate(text: &str) -> Result<Rational, Error> {
    Rational::from_str(text.trim())
        .map_err(|e| Error::InvalidArgument(format!("cannot parse rate '{text}': {e}")))
}

fn default_budget() -> u64 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_DIVERSITY_BUDGET)
}

fn parse_snr_grid(text: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "SNR grid must be start:step:end, got '{text}'"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|e| Error::InvalidArgument(format!("bad SNR component '{p}': {e}")))
        })
        .collect::<Result<_, _>>()?;
    let (start, step, end) = (nums[0], nums[1], nums[2]);
    if step <= 0.0 || end < start {
        return Err(Error::InvalidArgument(
            "SNR grid needs step > 0 and end >= start".into(),
        ));
    }
    let mut grid = Vec::new();
    let mut x = start;
    while x <= end + 1e-9 {
        grid.push(x);
        x += step;
    }
    Ok(grid)
}

fn run_construct(args: ConstructArgs) -> Result<(), Error> {
    let rate = args.r.as_deref().map(parse_rate).transpose()?;
    let design: Design = match args.family {
        Family::Ag => {
            let g = args
                .g
                .ok_or_else(|| Error::InvalidArgument("--family ag requires --g".into()))?;
            build_ag(g, args.n)?
        }
        Family::AgStacked => {
            let g = args
                .g
                .ok_or_else(|| Error::InvalidArgument("--family ag-stacked requires --g".into()))?;
            let base = build_ag(g, g * args.n)?;
            stack_phi(&base, g)?
        }
        Family::Fgd => {
            let full = build_fgd(args.n)?;
            match rate {
                None => full,
                Some(r) if r == full.rate() => full,
                Some(r) => puncture_fgd(&full, r)?,
            }
        }
        Family::Dast => dast_base(args.n, &default_rotation(args.n))?,
        Family::Fd => {
            let r =
                rate.ok_or_else(|| Error::InvalidArgument("--family fd requires --r".into()))?;
            match args.base {
                BaseArg::Auto => construct_for_rate(args.n, r)?.0,
                explicit => {
                    let family = match explicit {
                        BaseArg::Dast => BaseFamily::Dast,
                        BaseArg::Fgd => BaseFamily::Fgd,
                        BaseArg::Ag => BaseFamily::Ag(args.g.ok_or_else(|| {
                            Error::InvalidArgument("--base ag requires --g".into())
                        })?),
                        BaseArg::Auto => unreachable!(),
                    };
                    let base = realize_base(&family, args.n)?;
                    if r > base.rate() {
                        build_fd(&base, r)?
                    } else if r < base.rate() {
                        match family {
                            BaseFamily::Fgd => puncture_fgd(&base, r)?,
                            _ => puncture_design(&base, r)?,
                        }
                    } else {
                        base
                    }
                }
            }
        }
    };
    save_with_pam(&design, None, &args.out)?;
    println!(
        "wrote {} (T={}, N={}, K={}, rate {})",
        args.out.display(),
        design.t(),
        design.n(),
        design.k(),
        design.rate()
    );
    Ok(())
}

fn run_verify(args: VerifyArgs) -> Result<bool, Error> {
    let (design, _) = load_with_pam(&args.input)?;
    let tol = Tolerance::default();
    let report = verify_design(&design, &tol);
    print!("{}", report.render());
    let detected = detect_groups(&design, &tol);
    println!("finest partition: {} groups", detected.num_groups());
    Ok(report.all_ok())
}

fn run_analyze(args: AnalyzeArgs) -> Result<(), Error> {
    let r = parse_rate(&args.r)?;
    let (family, profile) = select_base_profile(args.n, r)?;
    println!(
        "N={} R={}: exponent {} via {} ({}; K={}, K_b={})",
        args.n, r, profile.exponent, family, profile.mode, profile.k, profile.k_b
    );
    for term in &profile.terms {
        println!(
            "  term: {} -> {} * M^{}",
            term.label, term.multiplier, term.exponent
        );
    }
    if let Some(csv) = args.csv {
        let mut out = String::from("N,R_num,R_den,exponent,family,mode,K,K_b\n");
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            args.n,
            r.numer(),
            r.denom(),
            profile.exponent,
            family,
            profile.mode,
            profile.k,
            profile.k_b
        ));
        std::fs::write(&csv, out)?;
        println!("wrote {}", csv.display());
    }
    Ok(())
}

fn run_tables(args: TablesArgs) -> Result<(), Error> {
    std::fs::create_dir_all(&args.out_dir)?;
    let (txt, csv, stem) = match args.which {
        1 => {
            let rows = rate_table_rows()?;
            (
                render_rate_table_text(&rows),
                render_rate_table_csv(&rows),
                "rates",
            )
        }
        2 => {
            let cells = exponent_grid()?;
            (
                render_exponent_grid_text(&cells),
                render_exponent_grid_csv(&cells),
                "exponents",
            )
        }
        _ => {
            let rows = comparison_rows()?;
            (
                render_comparison_text(&rows),
                render_comparison_csv(&rows),
                "comparison",
            )
        }
    };
    let txt_path = args.out_dir.join(format!("table_{stem}.txt"));
    let csv_path = args.out_dir.join(format!("table_{stem}.csv"));
    std::fs::write(&txt_path, &txt)?;
    std::fs::write(&csv_path, &csv)?;
    print!("{txt}");
    println!("wrote {} and {}", txt_path.display(), csv_path.display());
    Ok(())
}

fn run_diversify(args: DiversifyArgs) -> Result<(), Error> {
    let (design, _) = load_with_pam(&args.input)?;
    let pool = match args.pool {
        PoolArg::Integers => ScalingPool::PositiveIntegers,
        PoolArg::UnitCircle => ScalingPool::UnitCircle,
    };
    let budget = args.budget.unwrap_or_else(default_budget);
    let tol = Tolerance::default();
    let spec = find_scalings(&design, args.q, pool, budget, &tol)?;
    let summary = is_fully_diverse(&design, &spec, DiffMode::Exhaustive, budget, &tol)?;
    save_with_pam(&design, Some(&spec), &args.input)?;
    println!(
        "verified {} over {} differences (min size {:.3e}); scalings stored in {}",
        summary.verified,
        summary.total_diffs,
        summary.min_abs_det,
        args.input.display()
    );
    Ok(())
}

fn run_simulate(args: SimulateArgs) -> Result<(), Error> {
    let (design, pam) = load_with_pam(&args.input)?;
    let file_cfg: SimFileConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str(&text).map_err(|e| Error::Malformed(e.to_string()))?
        }
        None => SimFileConfig::default(),
    };
    let decoder = match args.decoder {
        Some(DecoderArg::Exhaustive) => DecoderKind::Exhaustive,
        Some(DecoderArg::Structured) => DecoderKind::Structured,
        None => match file_cfg.decoder.as_deref() {
            None | Some("exhaustive") => DecoderKind::Exhaustive,
            Some("structured") => DecoderKind::Structured,
            Some(other) => {
                return Err(Error::InvalidArgument(format!("unknown decoder '{other}'")))
            }
        },
    };
    let file_pam_distances = pam.and_then(|p| match p.scaling {
        stbc_core::diversity::PamScaling::Distances(d) => Some(d),
        stbc_core::diversity::PamScaling::UnitCircle(_) => None,
    });
    let snr_db_grid = match &args.snr {
        Some(text) => parse_snr_grid(text)?,
        None => file_cfg
            .snr_db_grid
            .unwrap_or_else(|| vec![0.0, 5.0, 10.0, 15.0, 20.0]),
    };
    let cfg = SimConfig {
        q: args.q.or(file_cfg.q).unwrap_or(2),
        distances: file_cfg.distances.or(file_pam_distances),
        n_rx: args.n_rx.or(file_cfg.n_rx).unwrap_or(1),
        snr_db_grid,
        trials_per_point: args.trials.or(file_cfg.trials_per_point).unwrap_or(10_000),
        seed: args.seed.or(file_cfg.seed).unwrap_or(DEFAULT_SEED),
        decoder,
    };
    let points = ber_curve(&design, &cfg)?;
    let csv = render_ber_csv(&points);
    std::fs::write(&args.out, &csv)?;
    for p in &points {
        println!(
            "snr {:5.1} dB: ber {:.3e} ({} bits)",
            p.snr_db, p.ber, p.bits
        );
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::BudgetExceeded { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome: Result<bool, Error> = match cli.command {
        Command::Construct(args) => run_construct(args).map(|_| true),
        Command::Verify(args) => run_verify(args),
        Command::Analyze(args) => run_analyze(args).map(|_| true),
        Command::Tables(args) => run_tables(args).map(|_| true),
        Command::Diversify(args) => run_diversify(args).map(|_| true),
        Command::Simulate(args) => run_simulate(args).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

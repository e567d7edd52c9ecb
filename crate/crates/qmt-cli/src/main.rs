//! qmt: measurement tradeoff quantities from singular-value spectra.
//!
//! Exit codes: 0 success, 2 validation or parse failure, 3 incomplete
//! measurement set, 4 statistical failure in `mc-check`, 1 anything else.

mod input;
mod mc_check;
mod output;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qmt::quantities::{self, OutcomeReport};
use qmt::spectrum::{MeasurementSet, COMPLETENESS_REL_TOL, GROUP_REL_TOL};

use input::{spectra_from_arg, InputError, LabeledSpectra};
use output::{fmt_opt, fmt_sci, print_table, write_csv};

const EXIT_VALIDATION: u8 = 2;
const EXIT_INCOMPLETE: u8 = 3;
const EXIT_STATISTICAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "qmt",
    version,
    about = "Information gain, fidelity, reversibility, and estimation fidelity of quantum measurements, from the singular values of the measurement operator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-outcome report for one or more spectra
    Compute(ComputeArgs),
    /// Sweep the (k ones, l lambdas, zeros) family over a lambda grid
    Sweep(SweepArgs),
    /// Completeness check and outcome averages of a measurement set
    VerifySet(VerifyArgs),
    /// Monte Carlo verification of the closed forms
    McCheck(McCheckArgs),
}

#[derive(Args)]
struct ComputeArgs {
    /// Inline spectrum like "[1, 0.5]" or a path to a spectra document
    spectrum: Option<String>,
    /// Spectra document (TOML with d, spectra, optional labels)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Directory for report.csv (stdout table is always printed)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Accept values above 1 by rescaling the spectrum to unit maximum
    #[arg(long)]
    auto_rescale: bool,
    /// Relative tolerance for merging near-equal squared singular values
    #[arg(long, default_value_t = GROUP_REL_TOL)]
    group_tol: f64,
}

#[derive(Args)]
struct SweepArgs {
    /// Dimension of the system
    #[arg(long)]
    d: usize,
    /// Pairs "k:l,k:l,..."; all valid pairs when omitted
    #[arg(long)]
    pairs: Option<String>,
    /// Number of lambda grid points including both endpoints
    #[arg(long, default_value_t = 101)]
    grid: usize,
    /// Directory receiving the five CSV files
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Spectra document (TOML); positional alternative to --input
    set: Option<String>,
    #[arg(long)]
    input: Option<PathBuf>,
    /// Completeness tolerance on |sum sigma^2 - d| (default 1e-9 * d)
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    auto_rescale: bool,
    #[arg(long, default_value_t = GROUP_REL_TOL)]
    group_tol: f64,
}

#[derive(Args)]
struct McCheckArgs {
    /// Inline spectrum or document path; the built-in suite when omitted
    spectrum: Option<String>,
    #[arg(long)]
    input: Option<PathBuf>,
    /// Samples per estimate
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// Seed for the reproducible sampling streams
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Directory for mc_check.csv
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    auto_rescale: bool,
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(args) => cmd_compute(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::VerifySet(args) => cmd_verify_set(args),
        Command::McCheck(args) => cmd_mc_check(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

/// QMT_THREADS caps the worker pool; 0 or unset means automatic.
fn configure_threads() {
    if let Ok(text) = std::env::var("QMT_THREADS") {
        if let Ok(n) = text.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        } else {
            eprintln!("warning: ignoring non-numeric QMT_THREADS={text:?}");
        }
    }
}

#[derive(Debug)]
enum CliError {
    Input(InputError),
    Io(std::io::Error),
    Incomplete(qmt::Error),
    BadArgs(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Incomplete(e) => write!(f, "{e}"),
            CliError::BadArgs(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Input(_) | CliError::BadArgs(_) => ExitCode::from(EXIT_VALIDATION),
            CliError::Incomplete(_) => ExitCode::from(EXIT_INCOMPLETE),
            CliError::Io(_) => ExitCode::FAILURE,
        }
    }
}

impl From<InputError> for CliError {
    fn from(e: InputError) -> Self {
        CliError::Input(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn load_spectra(
    positional: Option<&str>,
    input: Option<&PathBuf>,
    auto_rescale: bool,
) -> Result<LabeledSpectra, CliError> {
    match (positional, input) {
        (Some(arg), None) => Ok(spectra_from_arg(arg, auto_rescale)?),
        (None, Some(path)) => Ok(input::read_document(path, auto_rescale)?),
        (Some(_), Some(_)) => Err(CliError::BadArgs(
            "give either a positional spectrum or --input, not both".into(),
        )),
        (None, None) => Err(CliError::BadArgs(
            "no input: pass an inline spectrum like \"[1, 0.5]\" or --input PATH".into(),
        )),
    }
}

fn cmd_compute(args: ComputeArgs) -> Result<ExitCode, CliError> {
    let doc = load_spectra(args.spectrum.as_deref(), args.input.as_ref(), args.auto_rescale)?;
    let reports: Vec<OutcomeReport> = doc
        .spectra
        .iter()
        .map(|s| OutcomeReport::with_group_tol(s, args.group_tol))
        .collect();

    let header = [
        "label", "d", "sigma_sq", "tau", "I_bits", "F", "R", "G", "Q", "E_F", "E_R",
    ];
    let rows: Vec<Vec<String>> = doc
        .labels
        .iter()
        .zip(&reports)
        .map(|(label, r)| {
            vec![
                label.clone(),
                r.dim.to_string(),
                format!("{:.6}", r.sigma_sq),
                format!("{:.6}", r.tau),
                format!("{:.6}", r.info_bits),
                format!("{:.6}", r.fidelity),
                format!("{:.6}", r.reversibility),
                format!("{:.6}", r.estimation_fidelity),
                format!("{:.6}", r.subentropy_q),
                r.eff_fidelity.map(|v| format!("{v:.6}")).unwrap_or_default(),
                r.eff_reversibility.map(|v| format!("{v:.6}")).unwrap_or_default(),
            ]
        })
        .collect();
    print_table(&header, &rows);

    if let Some(dir) = args.output {
        std::fs::create_dir_all(&dir)?;
        let csv_rows: Vec<Vec<String>> = doc
            .labels
            .iter()
            .zip(&reports)
            .map(|(label, r)| {
                vec![
                    label.clone(),
                    r.dim.to_string(),
                    fmt_sci(r.sigma_sq),
                    fmt_sci(r.tau),
                    fmt_sci(r.info_bits),
                    fmt_sci(r.fidelity),
                    fmt_sci(r.reversibility),
                    fmt_sci(r.estimation_fidelity),
                    fmt_sci(r.subentropy_q),
                    fmt_opt(r.eff_fidelity),
                    fmt_opt(r.eff_reversibility),
                ]
            })
            .collect();
        let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
        write_csv(&dir.join("report.csv"), &header, &csv_rows)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode, CliError> {
    if args.d < 2 {
        return Err(CliError::BadArgs(format!("--d {} below 2", args.d)));
    }
    if args.grid < 2 {
        return Err(CliError::BadArgs("--grid must be at least 2".into()));
    }
    let pairs = match args.pairs.as_deref() {
        Some(text) => sweep::parse_pairs(text, args.d).map_err(CliError::BadArgs)?,
        None => sweep::all_pairs(args.d),
    };
    let files = sweep::run_sweep(args.d, &pairs, args.grid, &args.output)?;
    for path in files.paths {
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify_set(args: VerifyArgs) -> Result<ExitCode, CliError> {
    let doc = load_spectra(args.set.as_deref(), args.input.as_ref(), args.auto_rescale)?;
    let set = MeasurementSet::new(doc.spectra.clone())
        .map_err(|e| CliError::BadArgs(e.to_string()))?;
    let tolerance = args
        .tol
        .unwrap_or(set.dim() as f64 * COMPLETENESS_REL_TOL);
    let defect = set.completeness_defect();
    println!("dimension           {}", set.dim());
    println!("outcomes            {}", set.outcomes().len());
    println!("completeness defect {}", fmt_sci(defect));
    let probs = set.outcome_probabilities();
    for (label, p) in doc.labels.iter().zip(&probs) {
        println!("p({label}) = {}", fmt_sci(*p));
    }
    let averages = quantities::averages_with(&set, tolerance, args.group_tol)
        .map_err(CliError::Incomplete)?;
    println!("mutual information I = {} bits", fmt_sci(averages.mutual_info_bits));
    println!("mean fidelity      F = {}", fmt_sci(averages.mean_fidelity));
    println!("mean reversibility R = {}", fmt_sci(averages.mean_reversibility));
    println!("mean estimation    G = {}", fmt_sci(averages.mean_estimation));
    Ok(ExitCode::SUCCESS)
}

fn cmd_mc_check(args: McCheckArgs) -> Result<ExitCode, CliError> {
    let rows = match (&args.spectrum, &args.input) {
        (None, None) => mc_check::default_suite(args.samples, args.seed),
        _ => {
            let doc = load_spectra(args.spectrum.as_deref(), args.input.as_ref(), args.auto_rescale)?;
            let mut rows = Vec::new();
            for (label, s) in doc.labels.iter().zip(&doc.spectra) {
                rows.extend(mc_check::check_spectrum(label, s, args.samples, args.seed));
            }
            rows.extend(mc_check::check_constants(doc.dim, args.samples, args.seed));
            rows
        }
    };
    let (table, any_fail) = mc_check::table_rows(&rows);
    let header = [
        "spectrum", "quantity", "target", "estimate", "std_error", "z", "status",
    ];
    print_table(&header, &table);
    if let Some(dir) = args.output {
        std::fs::create_dir_all(&dir)?;
        let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
        write_csv(&dir.join("mc_check.csv"), &header, &table)?;
    }
    if any_fail {
        eprintln!(
            "mc-check: at least one estimate beyond {} standard errors",
            mc_check::Z_LIMIT
        );
        return Ok(ExitCode::from(EXIT_STATISTICAL));
    }
    Ok(ExitCode::SUCCESS)
}

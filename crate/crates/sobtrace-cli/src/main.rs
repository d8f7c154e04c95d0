//! Command-line front end: data ingestion, report persistence, plot-data
//! emission, and batch verification runs.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sobtrace::extend_lmp::{assemble_extension, extension_eval, PiecewiseExtension};
use sobtrace::extend_wmp::wmp_extend;
use sobtrace::finiteness::{deboor_cm_upper, favard_cm, km_lower_experiment};
use sobtrace::functionals::trace_report;
use sobtrace::polycore::{Exponent, SampleSet};
use sobtrace::verify::{run_verify, VerifyOptions};
use sobtrace::whitfield::build_field;

#[derive(Parser)]
#[command(
    name = "sobtrace",
    version,
    about = "Trace functionals and almost-optimal Sobolev extensions for samples on the line"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every admissible trace functional for a dataset, as JSON.
    Analyze {
        /// CSV file with header "x,f".
        #[arg(long)]
        input: PathBuf,
        /// Smoothness order, 1 to 8.
        #[arg(long)]
        m: usize,
        /// Integrability exponent: a number greater than 1, or "inf".
        #[arg(long, value_parser = parse_exponent)]
        p: Exponent,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample an extension and its derivatives as plot-ready CSV.
    Extend {
        /// CSV file with header "x,f".
        #[arg(long)]
        input: PathBuf,
        /// Smoothness order, 1 to 8.
        #[arg(long)]
        m: usize,
        /// Homogeneous-seminorm construction or the compactly supported one.
        #[arg(long, value_enum, default_value_t = Mode::Lmp)]
        mode: Mode,
        /// Uniform sample count (breakpoints are always included).
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the seeded invariant suites and summarize pass counts.
    Verify {
        /// Seed for instance generation.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Instances per (m, p) cell.
        #[arg(long, default_value_t = 25)]
        trials: usize,
        /// Restrict the standard cells to one order.
        #[arg(long)]
        m: Option<usize>,
        /// Restrict the standard cells to one finite exponent.
        #[arg(long, value_parser = parse_finite_p)]
        p: Option<f64>,
        /// Corrupt one extension on purpose; the run must then fail.
        #[arg(long)]
        negative_control: bool,
        /// Write the JSON summary here as well.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the classical interpolation constants and experiment ratios.
    Euler {
        /// Largest order in the table, at most 6.
        #[arg(long, default_value_t = 6)]
        m_max: usize,
        /// Write the rows as JSON here as well.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy)]
enum Mode {
    /// Homogeneous construction: interpolation jets joined across gaps.
    Lmp,
    /// Compactly supported construction: long gaps pinned to zero.
    Wmp,
}

enum CliError {
    Input(String),
    Verification,
}

fn parse_exponent(s: &str) -> Result<Exponent, String> {
    if s == "inf" {
        return Ok(Exponent::Infinity);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 1.0 => Ok(Exponent::Finite(v)),
        _ => Err(String::from("expected a number greater than 1, or \"inf\"")),
    }
}

fn parse_finite_p(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 1.0 => Ok(v),
        _ => Err(String::from("expected a finite number greater than 1")),
    }
}

fn check_order(m: usize) -> Result<(), CliError> {
    if (1..=8).contains(&m) {
        Ok(())
    } else {
        Err(CliError::Input(format!("order m must be 1..=8, got {m}")))
    }
}

/// Loads "x,f" CSV: UTF-8, '.' decimals, rows sorted on load, duplicate
/// abscissas rejected. Errors carry 1-based line numbers.
fn load_csv(path: &Path) -> Result<SampleSet, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut rows: Vec<(f64, f64, usize)> = Vec::new();
    let mut saw_header = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_start_matches('\u{feff}').trim();
        if line.is_empty() {
            continue;
        }
        if !saw_header {
            if line != "x,f" {
                return Err(CliError::Input(format!(
                    "line {}: expected header \"x,f\", got \"{line}\"",
                    i + 1
                )));
            }
            saw_header = true;
            continue;
        }
        let mut fields = line.split(',');
        let (Some(xs), Some(ys), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(CliError::Input(format!("line {}: expected two fields", i + 1)));
        };
        let x: f64 = xs
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("line {}: bad abscissa \"{xs}\"", i + 1)))?;
        let y: f64 = ys
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("line {}: bad value \"{ys}\"", i + 1)))?;
        if !x.is_finite() || !y.is_finite() {
            return Err(CliError::Input(format!("line {}: values must be finite", i + 1)));
        }
        rows.push((x, y, i + 1));
    }
    if !saw_header {
        return Err(CliError::Input(format!("{}: empty input", path.display())));
    }
    if rows.is_empty() {
        return Err(CliError::Input(format!("{}: no data rows", path.display())));
    }
    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for w in rows.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(CliError::Input(format!(
                "line {}: duplicate x = {} (also on line {})",
                w[1].2, w[1].0, w[0].2
            )));
        }
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.1).collect();
    SampleSet::new(xs, ys).map_err(|e| CliError::Input(format!("{e:?}")))
}

/// Prints one stdout line, ending the run quietly if the reader hung up.
fn print_line(line: std::fmt::Arguments) {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout.write_fmt(line).and_then(|_| stdout.write_all(b"\n")) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        panic!("stdout: {e}");
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            // A closed pipe (e.g. `sobtrace ... | head`) ends the run quietly.
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.write_all(b"\n"))
            {
                if e.kind() == std::io::ErrorKind::BrokenPipe {
                    std::process::exit(0);
                }
                return Err(CliError::Input(format!("stdout: {e}")));
            }
            Ok(())
        }
    }
}

fn cmd_analyze(input: &Path, m: usize, p: Exponent, out: Option<&Path>) -> Result<(), CliError> {
    check_order(m)?;
    let e = load_csv(input)?;
    let report = trace_report(&e, m, p);
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Input(format!("serialization: {e}")))?;
    emit(&json, out)
}

fn cmd_extend(
    input: &Path,
    m: usize,
    mode: Mode,
    samples: usize,
    out: Option<&Path>,
) -> Result<(), CliError> {
    check_order(m)?;
    if samples < 2 {
        return Err(CliError::Input(format!("samples must be at least 2, got {samples}")));
    }
    let e = load_csv(input)?;
    let ext: PiecewiseExtension = match mode {
        Mode::Lmp => {
            let field = build_field(&e, m).map_err(|err| CliError::Input(format!("{err:?}")))?;
            assemble_extension(&field).map_err(|err| CliError::Input(format!("{err:?}")))?
        }
        Mode::Wmp => wmp_extend(&e, m).map_err(|err| CliError::Input(format!("{err:?}")))?,
    };
    let delta = 3.0 * (m as f64 + 2.0);
    let lo = e.min_x() - delta;
    let hi = e.max_x() + delta;
    let mut grid: Vec<f64> = (0..samples)
        .map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64)
        .collect();
    grid.extend_from_slice(ext.breaks());
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    let mut csv = String::from("x");
    for k in 0..=m {
        csv.push_str(&format!(",F{k}"));
    }
    csv.push('\n');
    for &x in &grid {
        csv.push_str(&format!("{x}"));
        for k in 0..=m {
            csv.push_str(&format!(",{}", extension_eval(&ext, x, k)));
        }
        csv.push('\n');
    }
    emit(csv.trim_end(), out)
}

fn cmd_verify(
    seed: u64,
    trials: usize,
    m: Option<usize>,
    p: Option<f64>,
    negative_control: bool,
    out: Option<&Path>,
) -> Result<(), CliError> {
    if let Some(order) = m {
        check_order(order)?;
    }
    let tol = match std::env::var("SOBTRACE_TOL") {
        Ok(s) => s
            .parse::<f64>()
            .ok()
            .filter(|t| t.is_finite() && *t > 0.0)
            .ok_or_else(|| CliError::Input(format!("SOBTRACE_TOL: bad tolerance \"{s}\"")))?,
        Err(_) => 1e-9,
    };
    let opts = VerifyOptions {
        seed,
        tol,
        trials,
        negative_control,
        m_filter: m,
        p_filter: p,
    };
    let summary = run_verify(&opts);
    for r in &summary.results {
        print_line(format_args!(
            "INVARIANT {}: pass {}/{} worst {:.3e}{}",
            r.name,
            r.passes,
            r.trials,
            r.worst,
            if r.monitored { " (monitored)" } else { "" }
        ));
    }
    print_line(format_args!(
        "VERIFY: {}",
        if summary.ok { "OK" } else { "FAIL" }
    ));
    if let Some(path) = out {
        let json = serde_json::to_string_pretty(&summary)
            .map_err(|e| CliError::Input(format!("serialization: {e}")))?;
        std::fs::write(path, json)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    if summary.ok {
        Ok(())
    } else {
        Err(CliError::Verification)
    }
}

#[derive(Serialize)]
struct ConstantRow {
    m: usize,
    c_m: f64,
    upper_c_m: f64,
    chain_lower: f64,
    chain_cap: f64,
    experiment_ratio: f64,
}

#[derive(Serialize)]
struct ConstantTable {
    schema_version: u32,
    rows: Vec<ConstantRow>,
}

fn cmd_euler(m_max: usize, out: Option<&Path>) -> Result<(), CliError> {
    if !(1..=6).contains(&m_max) {
        return Err(CliError::Input(format!("m-max must be 1..=6, got {m_max}")));
    }
    let mut rows = Vec::new();
    for m in 1..=m_max {
        let c_m = favard_cm(m).map_err(|e| CliError::Input(format!("{e:?}")))?;
        let upper = deboor_cm_upper(m).map_err(|e| CliError::Input(format!("{e:?}")))?;
        let lower = std::f64::consts::FRAC_PI_2.powi(m as i32 - 1);
        let cap = (m as f64 - 1.0) * 9.0f64.powi(m as i32);
        let ratio = km_lower_experiment(m, 12)
            .map_err(|e| CliError::Input(format!("{e:?}")))?
            .ratio;
        rows.push(ConstantRow {
            m,
            c_m,
            upper_c_m: upper,
            chain_lower: lower,
            chain_cap: cap,
            experiment_ratio: ratio,
        });
    }
    print_line(format_args!(
        "{:>2}  {:>12}  {:>12}  {:>14}  {:>12}  {:>12}",
        "m", "c_m", "C_m", "(pi/2)^(m-1)", "(m-1)9^m", "ratio(n=12)"
    ));
    for r in &rows {
        print_line(format_args!(
            "{:>2}  {:>12.8}  {:>12.6}  {:>14.8}  {:>12}  {:>12.8}",
            r.m, r.c_m, r.upper_c_m, r.chain_lower, r.chain_cap, r.experiment_ratio
        ));
    }
    if let Some(path) = out {
        let table = ConstantTable { schema_version: 1, rows };
        let json = serde_json::to_string_pretty(&table)
            .map_err(|e| CliError::Input(format!("serialization: {e}")))?;
        std::fs::write(path, json)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze { input, m, p, out } => cmd_analyze(&input, m, p, out.as_deref()),
        Command::Extend { input, m, mode, samples, out } => {
            cmd_extend(&input, m, mode, samples, out.as_deref())
        }
        Command::Verify { seed, trials, m, p, negative_control, out } => {
            cmd_verify(seed, trials, m, p, negative_control, out.as_deref())
        }
        Command::Euler { m_max, out } => cmd_euler(m_max, out.as_deref()),
    };
    match outcome {
        Ok(()) => {}
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
        Err(CliError::Verification) => {
            std::process::exit(1);
        }
    }
}

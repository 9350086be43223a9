//! The `tempint` command line.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input or domain error,
//! 3 fit did not converge, 4 fit has a pole warning, 5 table mismatch.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::coeff::{bundled, read_coeff_file, write_coeff_file};
use crate::fit::{bisect_fit, BisectionTol, FitGrid, FitProblem, Weighting};
use crate::grid::GridSpec;
use crate::harness::{compare, models_for_grid, report, Comparison, HarnessError, Subject};
use crate::models::{list_models, ModelError, ModelId};
use crate::oracle::{self, OracleConfig, OracleError};
use crate::point::EvalPoint;
use crate::rational::RationalApproximant;
use crate::tables::{run_tables, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_POLE: i32 = 4;
pub const EXIT_MISMATCH: i32 = 5;

/// General temperature integral: oracle, minimax fitting and model benchmarks.
#[derive(Debug, Parser)]
#[command(name = "tempint", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate g(m, x) and h(m, x) with the reference oracle.
    Oracle(OracleArgs),
    /// Fit a minimax rational approximant of total degree n.
    Fit(FitArgs),
    /// Evaluate one model or coefficient file on a grid.
    Eval(EvalArgs),
    /// Compare models on a grid.
    Compare(CompareArgs),
    /// Regenerate the reference accuracy tables and check them.
    Tables(TablesArgs),
    /// List the available models.
    List(ListArgs),
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(short = 'm', allow_hyphen_values = true)]
    pub m: f64,
    #[arg(short = 'x', allow_hyphen_values = true)]
    pub x: f64,
    /// Also print the asymptotic series with k and k+1 terms.
    #[arg(long, value_name = "K")]
    pub series_terms: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=6))]
    pub degree: u8,
    /// Preset name or `m=lo:hi:step,x=lo:hi:step`.
    #[arg(long, default_value = "paper-eval", allow_hyphen_values = true)]
    pub grid: String,
    #[arg(long, default_value = "relative")]
    pub mode: String,
    /// Relative bisection tolerance: stop once `u+ - u- <= tol * u+`.
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    /// Lower bound imposed on the denominator at every grid point.
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    /// Coefficient file to write; the report goes to `<out>.report`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Model tag, see `tempint list`.
    #[arg(long, conflicts_with = "coeff", required_unless_present = "coeff")]
    pub model: Option<String>,
    /// Coefficient file.
    #[arg(long)]
    pub coeff: Option<PathBuf>,
    #[arg(long, default_value = "paper-eval", allow_hyphen_values = true)]
    pub grid: String,
    /// `text` prints a summary, `csv` one row per point.
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Comma-separated tags, or `all` for every model defined on the grid.
    #[arg(long, default_value = "all")]
    pub models: String,
    #[arg(long, default_value = "paper-eval", allow_hyphen_values = true)]
    pub grid: String,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    /// `csv` also writes approximants.csv, arrhenius.csv and bivariate.csv to `--out-dir`.
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Directory with g1.coeff to g4.coeff replacing the bundled files.
    #[arg(long)]
    pub coeff_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ListArgs {
    /// Only models defined somewhere in `lo:hi`.
    #[arg(long, value_name = "LO:HI", allow_hyphen_values = true)]
    pub m_range: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Self { code: EXIT_INPUT, message: message.to_string() }
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Self { code: EXIT_IO, message: format!("{}: {e}", path.display()) }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        Self::input(e)
    }
}

type Outcome = Result<i32, Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Oracle(a) => cmd_oracle(a, out),
        Command::Fit(a) => cmd_fit(a, out, err),
        Command::Eval(a) => cmd_eval(a, out),
        Command::Compare(a) => cmd_compare(a, out),
        Command::Tables(a) => cmd_tables(a, out),
        Command::List(a) => cmd_list(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn parse_grid(s: &str) -> Result<GridSpec, Failure> {
    s.parse::<GridSpec>().map_err(Failure::input)
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::io(p, e)),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::io(Path::new("<stdout>"), e)),
    }
}

fn cmd_oracle(a: &OracleArgs, out: &mut dyn Write) -> Outcome {
    let point = EvalPoint::new(a.m, a.x).map_err(Failure::input)?;
    let cfg = OracleConfig::default();
    let h = oracle::h(point, &cfg).map_err(|e: OracleError| Failure::input(e))?;
    let mut text = format!("m {}\nx {}\ng {:e}\nh {:e}\n", a.m, a.x, point.prefactor() * h, h);
    if let Some(k) = a.series_terms {
        if k == 0 {
            return Err(Failure::input("--series-terms must be at least 1"));
        }
        let s0 = oracle::h_series(point, k);
        let s1 = oracle::h_series(point, k + 1);
        text.push_str(&format!("series_{k} {s0:e}\nseries_{} {s1:e}\n", k + 1));
    }
    emit(out, None, &text)?;
    Ok(EXIT_OK)
}

fn cmd_fit(a: &FitArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let grid = parse_grid(&a.grid)?;
    let mode: Weighting = a.mode.parse().map_err(Failure::input)?;
    if !(a.tol > 0.0 && a.tol < 1.0) {
        return Err(Failure::input("--tol must lie in (0, 1)"));
    }
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        if !dir.is_dir() {
            return Err(Failure::input(format!("output directory {} does not exist", dir.display())));
        }
    }
    let fit_err = |e: crate::fit::FitError| Failure::input(e);
    let fit_grid = FitGrid::new(grid, OracleConfig::default()).map_err(fit_err)?;
    let problem = FitProblem::new(a.degree as usize, fit_grid)
        .map_err(fit_err)?
        .with_weighting(mode)
        .with_denom_floor(a.delta)
        .map_err(fit_err)?
        .with_bisection_tol(BisectionTol { abs: 1e-12, rel: a.tol })
        .map_err(fit_err)?;
    let result = bisect_fit(&problem).map_err(|e| Failure { code: EXIT_NOT_CONVERGED, message: e.to_string() })?;

    write_coeff_file(&a.out, &result.approximant).map_err(|e| Failure::io(&a.out, e))?;
    let report_path = report_path(&a.out);
    let report = result.report();
    fs::write(&report_path, &report).map_err(|e| Failure::io(&report_path, e))?;
    emit(out, None, &report)?;

    if let Some(w) = &result.pole_warning {
        let _ = writeln!(err, "warning: {w}");
        return Ok(EXIT_POLE);
    }
    if !result.converged {
        let _ = writeln!(err, "warning: bisection stopped after {} steps", result.iterations);
        return Ok(EXIT_NOT_CONVERGED);
    }
    Ok(EXIT_OK)
}

/// `<out>.report` next to the coefficient file.
pub fn report_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".report");
    PathBuf::from(s)
}

fn load_subject(path: &Path) -> Result<Subject, Failure> {
    let approximant = read_coeff_file(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(Subject::Approximant { label, approximant })
}

fn parse_model(tag: &str) -> Result<ModelId, Failure> {
    tag.trim().parse::<ModelId>().map_err(|e: ModelError| Failure::input(e))
}

fn cmd_eval(a: &EvalArgs, out: &mut dyn Write) -> Outcome {
    let grid = parse_grid(&a.grid)?;
    let subject = match (&a.model, &a.coeff) {
        (Some(tag), _) => Subject::Model(parse_model(tag)?),
        (None, Some(path)) => load_subject(path)?,
        (None, None) => return Err(Failure::input("one of --model or --coeff is required")),
    };
    let r = report(&subject, &grid, &OracleConfig::default())?;
    let text = match a.format {
        Format::Csv => r.points_csv(),
        Format::Text => Comparison { grid, rows: vec![r] }.render_text(),
    };
    emit(out, a.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn cmd_compare(a: &CompareArgs, out: &mut dyn Write) -> Outcome {
    let grid = parse_grid(&a.grid)?;
    let subjects: Vec<Subject> = if a.models.trim().eq_ignore_ascii_case("all") {
        models_for_grid(&grid).into_iter().map(Subject::Model).collect()
    } else {
        a.models
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| parse_model(t).map(Subject::Model))
            .collect::<Result<_, _>>()?
    };
    let c = compare(&subjects, &grid, &OracleConfig::default())?;
    let text = match a.format {
        Format::Text => c.render_text(),
        Format::Csv => c.render_csv(),
    };
    emit(out, a.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn cmd_tables(a: &TablesArgs, out: &mut dyn Write) -> Outcome {
    let approximants: [RationalApproximant; 4] = match &a.coeff_dir {
        None => [bundled(1), bundled(2), bundled(3), bundled(4)],
        Some(dir) => {
            let load = |n: usize| {
                let p = dir.join(format!("g{n}.coeff"));
                read_coeff_file(&p).map_err(|e| Failure::input(format!("{}: {e}", p.display())))
            };
            [load(1)?, load(2)?, load(3)?, load(4)?]
        }
    };
    if a.format == Format::Csv && !a.out_dir.is_dir() {
        return Err(Failure::input(format!("output directory {} does not exist", a.out_dir.display())));
    }
    let run = run_tables(&approximants, &OracleConfig::default())?;
    if a.format == Format::Csv {
        for t in Table::ALL {
            let p = a.out_dir.join(format!("{}.csv", t.as_str()));
            fs::write(&p, run.render_csv(t)).map_err(|e| Failure::io(&p, e))?;
        }
    }
    emit(out, None, &run.render_text())?;
    Ok(if run.all_pass() { EXIT_OK } else { EXIT_MISMATCH })
}

fn parse_range(s: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::input(format!("--m-range expects lo:hi, got `{s}`"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn cmd_list(a: &ListArgs, out: &mut dyn Write) -> Outcome {
    let filter = a.m_range.as_deref().map(parse_range).transpose()?;
    let models = list_models(filter);
    let mut text = String::new();
    match a.format {
        Format::Csv => {
            text.push_str("tag,citation,m_domain,univariate\n");
            for i in &models {
                text.push_str(&format!("{},{},{},{}\n", i.id.tag(), i.citation, i.domain, i.univariate));
            }
        }
        Format::Text => {
            text.push_str(&format!("{:<5} {:<18} {}\n", "tag", "m", "source"));
            for i in &models {
                text.push_str(&format!("{:<5} {:<18} {}\n", i.id.tag(), i.domain.to_string(), i.citation));
            }
        }
    }
    emit(out, None, &text)?;
    Ok(EXIT_OK)
}

/// Caps the global thread pool at `TEMPINT_THREADS` when set.
pub fn init_threads() {
    if let Some(n) = std::env::var("TEMPINT_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("tempint").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn oracle_closed_form() {
        let (code, out, _) = call(&["oracle", "-m", "-2", "-x", "10"]);
        assert_eq!(code, 0);
        assert!(out.contains("h 1e0"), "{out}");
    }

    #[test]
    fn oracle_domain_error() {
        let (code, _, err) = call(&["oracle", "-m", "0", "-x", "0"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.starts_with("error:"));
    }

    #[test]
    fn unknown_tag_lists_valid_tags() {
        let (code, out, err) = call(&["compare", "--models", "J,Nope", "--grid", "arrhenius"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(out.is_empty());
        assert!(err.contains("Nope") && err.contains("SY"), "{err}");
    }

    #[test]
    fn bad_grid_and_degree_rejected() {
        assert_eq!(call(&["eval", "--model", "J", "--grid", "m=0:1"]).0, EXIT_INPUT);
        assert_eq!(call(&["fit", "--degree", "7", "--out", "x.coeff"]).0, EXIT_INPUT);
        assert_eq!(call(&["fit", "--degree", "1", "--mode", "odd", "--out", "x.coeff"]).0, EXIT_INPUT);
    }

    #[test]
    fn list_filters() {
        let (code, out, _) = call(&["list", "--m-range", "0:0", "--format", "csv"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 22);
        let (_, out, _) = call(&["list", "--m-range", "3:4", "--format", "csv"]);
        assert!(!out.contains("\nJ,"));
        assert!(out.contains("\nG4,"));
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-1.5:2").unwrap(), (-1.5, 2.0));
        assert!(parse_range("2:1").is_err());
        assert!(parse_range("2").is_err());
    }

    #[test]
    fn report_path_appends() {
        assert_eq!(report_path(Path::new("a/g1.fit")), PathBuf::from("a/g1.fit.report"));
    }
}

//! `slanth`: build, check and verify exact operator sections from the shell.
//!
//! Exit codes: 0 pass, 1 check failed, 2 usage or parse error, 3 window or
//! exactness error.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use slanth::analysis::norm_bound_check;
use slanth::families::build_family_image;
use slanth::structure::{
    characterization_cols, check_characterization, check_extension_conditions,
    check_slant_h_matrix, check_slant_hankel_matrix, check_slant_toeplitz_matrix, extract_symbol,
    Collector,
};
use slanth::suite;
use slanth::{
    build_family, eval_expr, parse_expr, parse_symbol, CheckReport, FamilyKind, IndexWindow,
    LaurentSymbol, SymbolTable, WindowedMatrix,
};

#[derive(Parser)]
#[command(
    name = "slanth",
    version,
    about = "Exact sections of slant H-Toeplitz and related operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a section from a family or an operator expression.
    Build(BuildArgs),
    /// Run a predicate on a matrix and print a report.
    Check(CheckArgs),
    /// Recover the symbol from a slant H-Toeplitz matrix dump.
    Extract(ExtractArgs),
    /// Run named verification suites.
    Verify(VerifyArgs),
    /// Compare a section's spectral norm with the symbol's sup norm.
    Norm(NormArgs),
}

#[derive(Args, Clone)]
struct Source {
    /// Family name, e.g. `slant-h-toeplitz` or `extension-2`.
    #[arg(long, conflicts_with = "expr")]
    family: Option<String>,
    /// Operator expression, e.g. `W . P . M(phi) . K`.
    #[arg(long)]
    expr: Option<String>,
    /// `name=<file|inline>`; repeatable.
    #[arg(long = "symbol", value_name = "NAME=FILE|INLINE")]
    symbols: Vec<String>,
    /// Input (column) window `lo:hi`.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<IndexWindow>,
    #[arg(long, allow_hyphen_values = true)]
    rows: Option<IndexWindow>,
    #[arg(long, allow_hyphen_values = true)]
    cols: Option<IndexWindow>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Matrix,
    Report,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_enum, default_value = "matrix")]
    format: Format,
    #[arg(long, default_value_t = slanth::structure::DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Predicate {
    SlantH,
    SlantToeplitz,
    SlantHankel,
    Characterization,
    Extension,
    Zero,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(value_enum)]
    predicate: Predicate,
    /// Matrix dump to check (instead of --family/--expr).
    #[arg(long, conflicts_with_all = ["family", "expr"])]
    matrix: Option<PathBuf>,
    #[command(flatten)]
    source: Source,
    /// Extension order for the `extension` predicate.
    #[arg(long, default_value_t = 1)]
    m: u32,
    #[arg(long, default_value_t = slanth::structure::DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExtractArgs {
    /// Matrix dump.
    matrix: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run every suite.
    #[arg(long)]
    all: bool,
    /// Suite names.
    names: Vec<String>,
}

#[derive(Args)]
struct NormArgs {
    #[arg(long = "symbol", value_name = "NAME=FILE|INLINE")]
    symbols: Vec<String>,
    #[arg(long, allow_hyphen_values = true, default_value = "0:32")]
    rows: IndexWindow,
    #[arg(long, allow_hyphen_values = true, default_value = "0:129")]
    cols: IndexWindow,
    #[arg(long, default_value_t = slanth::symbol::DEFAULT_GRID)]
    grid: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Lib(slanth::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Lib(e) if e.is_window_error() => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => f.write_str(m),
            Failure::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<slanth::Error> for Failure {
    fn from(e: slanth::Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<bool, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_symbols(specs: &[String]) -> Result<SymbolTable, Failure> {
    let mut table = SymbolTable::new();
    for spec in specs {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--symbol expects name=value, got `{spec}`")))?;
        let path = Path::new(value);
        let phi = if path.is_file() {
            LaurentSymbol::parse_file(&read(path)?)?
        } else {
            parse_symbol(value)?
        };
        table.insert(name.trim().to_string(), phi);
    }
    Ok(table)
}

/// The symbol called `phi`, or the only one supplied.
fn sole_symbol(table: &SymbolTable) -> Result<LaurentSymbol, Failure> {
    if let Some(phi) = table.get("phi") {
        return Ok(phi.clone());
    }
    let mut it = table.values();
    match (it.next(), it.next()) {
        (Some(phi), None) => Ok(phi.clone()),
        _ => Err(Failure::Usage(
            "pass exactly one --symbol (or one named `phi`)".into(),
        )),
    }
}

fn build_matrix(src: &Source) -> Result<WindowedMatrix, Failure> {
    let table = load_symbols(&src.symbols)?;
    let cols = src
        .cols
        .or(src.window)
        .ok_or_else(|| Failure::Usage("give a column window with --window or --cols".into()))?;
    let m = match (&src.family, &src.expr) {
        (Some(name), None) => {
            let kind = FamilyKind::from_name(name)
                .ok_or_else(|| Failure::Usage(format!("unknown family `{name}`")))?;
            let phi = sole_symbol(&table)?;
            match src.rows {
                Some(rows) => return Ok(build_family(kind, &phi, rows, cols)?),
                None => build_family_image(kind, &phi, cols)?,
            }
        }
        (None, Some(text)) => eval_expr(&parse_expr(text)?, cols, &table)?,
        _ => return Err(Failure::Usage("give one of --family or --expr".into())),
    };
    Ok(match src.rows {
        Some(rows) => m.section(rows, cols)?,
        None => m,
    })
}

/// PASS iff every entry is within `tol` of zero.
fn zero_report(m: &WindowedMatrix, tol: f64) -> CheckReport {
    let mut c = Collector::new(tol);
    for i in m.rows().iter() {
        for j in m.cols().iter() {
            c.compare("entry", &[i, j], m.entry(i, j), Default::default());
        }
    }
    c.finish()
}

fn run_build(a: &BuildArgs) -> Outcome {
    let m = build_matrix(&a.source)?;
    match a.format {
        Format::Matrix => {
            emit(&a.out, &m.to_dump_string())?;
            Ok(true)
        }
        Format::Report => {
            let r = zero_report(&m, a.tol);
            emit(&a.out, &r.to_text())?;
            Ok(r.passed)
        }
    }
}

fn run_check(a: &CheckArgs) -> Outcome {
    let m = match &a.matrix {
        Some(p) => WindowedMatrix::parse_dump(&read(p)?)?,
        None => build_matrix(&a.source)?,
    };
    let r = match a.predicate {
        Predicate::SlantH => check_slant_h_matrix(&m, a.tol)?,
        Predicate::SlantToeplitz => check_slant_toeplitz_matrix(&m, a.tol)?,
        Predicate::SlantHankel => check_slant_hankel_matrix(&m, a.tol)?,
        Predicate::Characterization => {
            let cols = characterization_cols(&m).ok_or_else(|| {
                slanth::Error::WindowMismatch(format!(
                    "characterization needs at least 8 columns, have {}",
                    m.cols()
                ))
            })?;
            check_characterization(&m, cols, a.tol)?
        }
        Predicate::Extension => check_extension_conditions(&m, a.m, a.tol)?,
        Predicate::Zero => zero_report(&m, a.tol),
    };
    emit(&a.out, &r.to_text())?;
    Ok(r.passed)
}

fn run_extract(a: &ExtractArgs) -> Outcome {
    let m = WindowedMatrix::parse_dump(&read(&a.matrix)?)?;
    emit(&a.out, &extract_symbol(&m)?.to_file_string())?;
    Ok(true)
}

fn run_verify(a: &VerifyArgs) -> Outcome {
    let names: Vec<String> = if a.all {
        suite::suite_names().into_iter().map(String::from).collect()
    } else if a.names.is_empty() {
        return Err(Failure::Usage(format!(
            "name a suite or pass --all; suites: {}",
            suite::suite_names().join(", ")
        )));
    } else {
        a.names.clone()
    };
    let mut all = true;
    for name in &names {
        let o = suite::run_suite(name)
            .ok_or_else(|| Failure::Usage(format!("unknown suite `{name}`")))?;
        println!("{}", o.line());
        all &= o.passed;
    }
    Ok(all)
}

fn run_norm(a: &NormArgs) -> Outcome {
    let phi = sole_symbol(&load_symbols(&a.symbols)?)?;
    let d = norm_bound_check(&phi, a.rows, a.cols, a.grid)?;
    emit(&a.out, &d.to_text())?;
    Ok(d.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build(a) => run_build(a),
        Command::Check(a) => run_check(a),
        Command::Extract(a) => run_extract(a),
        Command::Verify(a) => run_verify(a),
        Command::Norm(a) => run_norm(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("slanth: {f}");
            ExitCode::from(f.code())
        }
    }
}

//! `hashfam`: bounds, tables, construction and verification for perfect and
//! separating hash families.
//!
//! Exit status: 0 on success or a passing verification, 1 when verification
//! fails or construction hits its resample cap, 2 on usage, parameter, parse or
//! I/O errors.

mod output;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hashfam::bounds::{min_rows_report, FamilySpec, ShfSpec};
use hashfam::cluster_expansion::PhfSpec;
use hashfam::matrix::{format_matrix, parse_matrix};
use hashfam::mt_engine::{construct, BadEventPolicy, MtOptions, MtStats};
use hashfam::oracles::{verify_phf, verify_shf};
use hashfam::tables::{compute_row, published_rows};
use hashfam::{BoundReportF64, Error, WitnessKind};

use output::{write_record, write_table, Format, Record, Value};

/// Seed used by `construct` when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 2024;

#[derive(Debug, Parser)]
#[command(
    name = "hashfam",
    version,
    about = "Bounds, construction and verification of perfect and separating hash families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimal number of rows guaranteed by each bound.
    Bound(FamilyArgs),
    /// Cluster-expansion and expurgation bounds for a grid of perfect hash families.
    Table(TableArgs),
    /// Build a family with Moser-Tardos resampling.
    Construct(ConstructArgs),
    /// Check a matrix file exhaustively.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Phf,
    Shf,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    #[arg(value_enum)]
    family: Family,
    /// Number of columns.
    #[arg(long)]
    n: usize,
    /// Alphabet size.
    #[arg(long)]
    m: u64,
    /// Subset size (perfect families).
    #[arg(long)]
    w: Option<usize>,
    /// Part sizes, comma separated (separating families).
    #[arg(long, value_delimiter = ',')]
    parts: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct TableSource {
    /// The 21 published parameter sets.
    #[arg(long)]
    paper_tables: bool,
    /// CSV file with an `n,m,w` header and one parameter set per line.
    #[arg(long, value_name = "FILE")]
    grid: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[command(flatten)]
    source: TableSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Policy {
    LexFirst,
    Random,
}

#[derive(Debug, Args)]
struct ConstructArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Number of rows; defaults to the cluster-expansion bound.
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Policy::LexFirst)]
    policy: Policy,
    /// Give up after this many resamples (default 100·C(n, w)).
    #[arg(long)]
    max_resamples: Option<u64>,
    /// Matrix file to write; the matrix goes to stdout and statistics to stderr if omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    family: Family,
    /// Subset size to check; defaults to the file header.
    #[arg(long)]
    w: Option<usize>,
    /// Part sizes to check; defaults to the file header.
    #[arg(long, value_delimiter = ',')]
    parts: Option<Vec<usize>>,
    path: PathBuf,
}

/// Outcome of a command that ran to completion.
enum Status {
    Ok,
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Bound(args) => cmd_bound(args, cli.format),
        Command::Table(args) => cmd_table(args, cli.format),
        Command::Construct(args) => cmd_construct(args, cli.format),
        Command::Verify(args) => cmd_verify(args, cli.format),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn family_spec(args: &FamilyArgs) -> Result<FamilySpec, Error> {
    match (args.family, args.w, &args.parts) {
        (Family::Phf, Some(w), None) => Ok(FamilySpec::Phf(PhfSpec::new(args.n, args.m, w)?)),
        (Family::Phf, None, _) => Err(Error::InvalidSpec("phf needs --w".into())),
        (Family::Phf, Some(_), Some(_)) => {
            Err(Error::InvalidSpec("--parts applies to shf only".into()))
        }
        (Family::Shf, w, Some(parts)) => {
            let spec = ShfSpec::new(args.n, args.m, parts.clone())?;
            if let Some(w) = w.filter(|&w| w != spec.w()) {
                return Err(Error::InvalidSpec(format!(
                    "--w {w} disagrees with parts summing to {}",
                    spec.w()
                )));
            }
            Ok(FamilySpec::Shf(spec))
        }
        (Family::Shf, _, None) => Err(Error::InvalidSpec("shf needs --parts".into())),
    }
}

fn parts_text(spec: &FamilySpec) -> Value {
    match spec {
        FamilySpec::Phf(_) => Value::Null,
        FamilySpec::Shf(s) => Value::Text(
            s.parts
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(","),
        ),
    }
}

fn spec_fields(spec: &FamilySpec) -> Record {
    let family = match spec {
        FamilySpec::Phf(_) => "phf",
        FamilySpec::Shf(_) => "shf",
    };
    vec![
        ("family", Value::Text(family.into())),
        ("n", Value::Int(spec.n() as u64)),
        ("m", Value::Int(spec.m())),
        ("w", Value::Int(spec.w() as u64)),
        ("parts", parts_text(spec)),
    ]
}

fn bound_record(report: &BoundReportF64) -> Record {
    let mut record = spec_fields(&report.spec);
    record.extend([
        ("n_clll", Value::Int(report.n_clll)),
        ("n_lll", report.n_lll.into()),
        ("n_expurgation", report.n_expurgation.into()),
        ("a_n", Value::Real(report.a_n)),
        ("d_m", Value::Real(report.d_m)),
        ("log_phi_prime", Value::opt_real(report.log_phi_prime)),
        (
            "phi_prime",
            Value::opt_real(report.log_phi_prime.map(f64::exp)),
        ),
        ("m_w", Value::Text(report.m_w.to_string())),
        ("q", Value::opt_text(report.q.as_ref())),
        ("attained", Value::Bool(report.attained)),
        (
            "sz_max_columns",
            Value::opt_text(report.sz_max_columns.as_ref()),
        ),
        (
            "clll_asymptotic_max_columns",
            Value::opt_text(report.clll_asymptotic_max_columns.as_ref()),
        ),
    ]);
    record
}

fn cmd_bound(args: &FamilyArgs, format: Format) -> Result<Status, Error> {
    let spec = family_spec(args)?;
    let report = min_rows_report::<f64>(&spec)?;
    write_record(&mut io::stdout().lock(), format, &bound_record(&report))?;
    Ok(Status::Ok)
}

const TABLE_HEADER: [&str; 6] = ["n", "m", "w", "theorem", "expurgation", "error"];

fn read_grid(path: &Path) -> Result<Vec<(usize, u64, usize)>, Error> {
    let text = fs::read_to_string(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| grid_error(&e))?.clone();
    if !headers.is_empty() && headers.iter().collect::<Vec<_>>() != ["n", "m", "w"] {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!(
                "grid header must be `n,m,w`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut grid = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| grid_error(&e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize, name: &str| -> Result<u64, Error> {
            let raw = record.get(i).unwrap_or("");
            raw.parse().map_err(|_| Error::Parse {
                line,
                column: i + 1,
                message: format!("expected {name}, found `{raw}`"),
            })
        };
        grid.push((
            field(0, "n")? as usize,
            field(1, "m")?,
            field(2, "w")? as usize,
        ));
    }
    Ok(grid)
}

fn grid_error(e: &csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse {
        line,
        column: 1,
        message: e.to_string(),
    }
}

fn cmd_table(args: &TableArgs, format: Format) -> Result<Status, Error> {
    let grid: Vec<(usize, u64, usize)> = match &args.source.grid {
        Some(path) => read_grid(path)?,
        None => published_rows().map(|r| (r.n, r.m, r.w)).collect(),
    };
    let rows: Vec<Record> = grid
        .iter()
        .map(|&(n, m, w)| {
            let row = compute_row::<f64>(n, m, w);
            let mut errors = Vec::new();
            let mut value = |r: Result<u64, Error>| match r {
                Ok(v) => Value::Int(v),
                Err(e) => {
                    errors.push(e.to_string());
                    Value::Null
                }
            };
            let theorem = value(row.theorem);
            let expurgation = value(row.expurgation);
            errors.dedup();
            vec![
                ("n", Value::Int(n as u64)),
                ("m", Value::Int(m)),
                ("w", Value::Int(w as u64)),
                ("theorem", theorem),
                ("expurgation", expurgation),
                ("error", Value::opt_text(errors.first())),
            ]
        })
        .collect();
    write_table(&mut io::stdout().lock(), format, &TABLE_HEADER, &rows)?;
    Ok(Status::Ok)
}

fn stats_record(
    spec: &FamilySpec,
    rows: usize,
    policy: Policy,
    stats: &MtStats,
    output: Option<&Path>,
) -> Record {
    let mut record = spec_fields(spec);
    record.extend([
        ("rows", Value::Int(rows as u64)),
        ("seed", Value::Int(stats.seed)),
        (
            "policy",
            Value::Text(match policy {
                Policy::LexFirst => "lex-first".into(),
                Policy::Random => "random".into(),
            }),
        ),
        ("succeeded", Value::Bool(stats.succeeded)),
        ("resamples", Value::Int(stats.resamples)),
        ("iterations", Value::Int(stats.iterations)),
        ("events_checked", Value::Int(stats.scans)),
        ("comparisons", Value::Int(stats.comparisons)),
        ("elapsed_seconds", Value::Real(stats.elapsed.as_secs_f64())),
        ("output", Value::opt_text(output.map(|p| p.display()))),
    ]);
    record
}

fn cmd_construct(args: &ConstructArgs, format: Format) -> Result<Status, Error> {
    let spec = family_spec(&args.family)?;
    let rows = match args.rows {
        Some(rows) => rows,
        None => min_rows_report::<f64>(&spec)?.n_clll as usize,
    };
    let options = MtOptions {
        policy: match args.policy {
            Policy::LexFirst => BadEventPolicy::LexFirst,
            Policy::Random => BadEventPolicy::Random,
        },
        max_resamples: args.max_resamples,
        record_transcript: false,
    };
    let (matrix, stats, status) = match construct(&spec, rows, args.seed, &options) {
        Ok(outcome) => (Some(outcome.matrix), outcome.stats, Status::Ok),
        Err(Error::ResampleLimit { limit, stats }) => {
            eprintln!(
                "RESAMPLE_LIMIT: no family after {limit} resamples; try more rows or a larger cap"
            );
            (None, *stats, Status::Failed)
        }
        Err(e) => return Err(e),
    };

    let written = match (&matrix, &args.output) {
        (Some(matrix), Some(path)) => {
            fs::write(path, format_matrix(&spec, matrix))?;
            Some(path.as_path())
        }
        _ => None,
    };
    let record = stats_record(&spec, rows, args.policy, &stats, written);
    if args.output.is_some() {
        write_record(&mut io::stdout().lock(), format, &record)?;
    } else {
        if let Some(matrix) = &matrix {
            io::stdout()
                .lock()
                .write_all(format_matrix(&spec, matrix).as_bytes())?;
        }
        write_record(&mut io::stderr().lock(), format, &record)?;
    }
    Ok(status)
}

fn cmd_verify(args: &VerifyArgs, format: Format) -> Result<Status, Error> {
    let text = fs::read_to_string(&args.path)?;
    let (header, matrix) = parse_matrix(&text)?;
    let spec = match (args.family, &header) {
        (Family::Phf, FamilySpec::Phf(h)) => {
            FamilySpec::Phf(PhfSpec::new(h.n, h.m, args.w.unwrap_or(h.w))?)
        }
        (Family::Shf, FamilySpec::Shf(h)) => FamilySpec::Shf(ShfSpec::new(
            h.n,
            h.m,
            args.parts.clone().unwrap_or_else(|| h.parts.clone()),
        )?),
        (_, header) => {
            return Err(Error::InvalidSpec(format!(
                "file holds a {header}, not the requested family"
            )));
        }
    };
    if args.family == Family::Phf && args.parts.is_some()
        || args.family == Family::Shf && args.w.is_some()
    {
        return Err(Error::InvalidSpec(
            "use --w for phf and --parts for shf".into(),
        ));
    }
    let witness = match &spec {
        FamilySpec::Phf(s) => verify_phf(&matrix, s.w),
        FamilySpec::Shf(s) => verify_shf(&matrix, &s.parts),
    };
    let verdict = if witness.is_some() { "FAIL" } else { "PASS" };
    let mut out = io::stdout().lock();
    match format {
        Format::Text => match &witness {
            None => writeln!(out, "PASS")?,
            Some(w) => {
                let kind = match w.kind {
                    WitnessKind::BadSubset => "no row is injective on",
                    WitnessKind::BadFamily => "no row separates",
                };
                writeln!(out, "FAIL: {kind} {w}")?
            }
        },
        _ => {
            let mut record = spec_fields(&spec);
            record.extend([
                ("rows", Value::Int(matrix.rows() as u64)),
                ("verdict", Value::Text(verdict.into())),
                ("witness", Value::opt_text(witness.as_ref())),
            ]);
            write_record(&mut out, format, &record)?;
        }
    }
    Ok(if witness.is_some() {
        Status::Failed
    } else {
        Status::Ok
    })
}

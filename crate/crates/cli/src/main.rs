//! Command line front end for the feynman-checkers library: emits the
//! amplitude, probability, reversal, asymptote, field, and sublattice tables
//! as CSV or JSON, and runs the verification suite.
//!
//! Exit codes: 0 success, 1 invalid input, 2 a theorem-class verification
//! check failed, 3 I/O error.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use feynman_checkers::field::{
    q_left_series, EdgeField, EdgeMap, FieldMode, FieldRow, P_LEFT_EVEN_LIMIT, P_LEFT_ODD_LIMIT,
    Q_LEFT_LIMIT,
};
use feynman_checkers::reversal::{direct_sweep, reversal_limit, series_sweep};
use feynman_checkers::special::{a1_zero_via_legendre, asymptotic_a1_zero};
use feynman_checkers::verify::{run_all, CheckClass, VerifyConfig};
use feynman_checkers::{AmplitudeRow, Error as LibError, LatticeParams};

#[derive(Parser)]
#[command(
    name = "feynman-checkers",
    version,
    about = "Tables and checks for a one-dimensional discrete-time quantum walk"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Amplitude components (t, x, a1, a2, P) over the support of each slice
    Amplitudes(TableArgs),
    /// Site probabilities (t, x, P) over the support of each slice
    Probabilities(TableArgs),
    /// Direction reversal probability: direct sum, series form, and limit
    Reversal(TableArgs),
    /// Midpoint amplitude a1(0, 2n+2) against its large-n main term
    Asymptote(AsymptoteArgs),
    /// Spin-left mass p_left(t) under an edge field at mass 1
    Field(FieldArgs),
    /// Sublattice series q_left(t) with its conjectured limit
    Blattice(BlatticeArgs),
    /// Run the verification suite and emit its JSON report
    Verify(VerifyArgs),
}

#[derive(Args)]
struct TableArgs {
    /// Mass parameter: a fraction p/q, an integer, or a decimal
    #[arg(long, default_value = "1")]
    mu: String,
    /// Largest time slice to emit
    #[arg(long, default_value_t = 50)]
    t_max: i64,
    /// Arithmetic: exact integer pairs or f64
    #[arg(long, value_enum, default_value_t = ModeArg::Float)]
    mode: ModeArg,
    /// Write the table here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args)]
struct AsymptoteArgs {
    /// Mass parameter; must stay delta away from both 0 and 1
    #[arg(long, default_value = "0.5")]
    mu: String,
    /// Largest time slice; rows cover n = 1 .. t_max/2 - 1
    #[arg(long, default_value_t = 50)]
    t_max: i64,
    /// Half-width of the excluded neighborhoods of mu = 0 and mu = 1
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Write the table here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args)]
struct FieldArgs {
    /// Edge signs: identity, homogeneous, or custom:<path>
    #[arg(long, default_value = "homogeneous")]
    field: String,
    /// Largest time slice to emit
    #[arg(long, default_value_t = 50)]
    t_max: i64,
    /// Arithmetic: exact integer pairs or f64
    #[arg(long, value_enum, default_value_t = ModeArg::Float)]
    mode: ModeArg,
    /// Write the table here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args)]
struct BlatticeArgs {
    /// Largest sublattice time to emit; row t lives at walk time 2t - 1
    #[arg(long, default_value_t = 50)]
    t_max: i64,
    /// Arithmetic: exact integer pairs or f64
    #[arg(long, value_enum, default_value_t = ModeArg::Float)]
    mode: ModeArg,
    /// Write the table here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args)]
struct VerifyArgs {
    /// Shrink sweep ranges for a quick run
    #[arg(long)]
    fast: bool,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

enum CliError {
    Validation(String),
    Io(String),
}

impl From<LibError> for CliError {
    fn from(e: LibError) -> Self {
        match e {
            LibError::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
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
        Ok(code) => code,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cmd: Cmd) -> Result<ExitCode, CliError> {
    match cmd {
        Cmd::Amplitudes(args) => emit_table(&amplitude_table(&args, true)?, &args.out, args.format),
        Cmd::Probabilities(args) => {
            emit_table(&amplitude_table(&args, false)?, &args.out, args.format)
        }
        Cmd::Reversal(args) => emit_table(&reversal_table(&args)?, &args.out, args.format),
        Cmd::Asymptote(args) => emit_table(&asymptote_table(&args)?, &args.out, args.format),
        Cmd::Field(args) => emit_table(&field_table(&args)?, &args.out, args.format),
        Cmd::Blattice(args) => emit_table(&blattice_table(&args)?, &args.out, args.format),
        Cmd::Verify(args) => cmd_verify(&args),
    }
}

// Table assembly. Every command renders through one Table so the CSV and
// JSON encodings cannot drift apart.

enum Cell {
    Int(i64),
    Float(f64),
}

struct Table {
    schema: &'static str,
    columns: &'static [&'static str],
    rows: Vec<Vec<Cell>>,
}

fn emit_table(
    table: &Table,
    out: &Option<PathBuf>,
    format: FormatArg,
) -> Result<ExitCode, CliError> {
    let data = match format {
        FormatArg::Csv => render_csv(table),
        FormatArg::Json => render_json(table),
    };
    emit(out, &data)?;
    Ok(ExitCode::SUCCESS)
}

fn render_csv(table: &Table) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# schema: {}", table.schema);
    let _ = writeln!(s, "{}", table.columns.join(","));
    for row in &table.rows {
        let mut first = true;
        for cell in row {
            if !first {
                s.push(',');
            }
            first = false;
            match cell {
                Cell::Int(v) => {
                    let _ = write!(s, "{v}");
                }
                Cell::Float(v) => {
                    let _ = write!(s, "{v:.16e}");
                }
            }
        }
        s.push('\n');
    }
    s
}

fn render_json(table: &Table) -> String {
    let rows: Vec<serde_json::Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut obj = serde_json::Map::new();
            for (name, cell) in table.columns.iter().zip(row) {
                let value = match cell {
                    Cell::Int(v) => serde_json::json!(v),
                    Cell::Float(v) => serde_json::json!(v),
                };
                obj.insert((*name).to_string(), value);
            }
            serde_json::Value::Object(obj)
        })
        .collect();
    let doc = serde_json::json!({ "schema": table.schema, "rows": rows });
    let mut s = serde_json::to_string_pretty(&doc).expect("tables serialize");
    s.push('\n');
    s
}

fn emit(out: &Option<PathBuf>, data: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, data).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(data.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

// Parameter parsing.

/// Reads mu as "p/q", an integer, or a plain decimal, keeping it rational.
fn parse_mu_parts(s: &str) -> Result<(u64, u64), CliError> {
    let bad = || {
        CliError::Validation(format!(
            "cannot read --mu {s:?} as p/q, integer, or decimal"
        ))
    };
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        return Ok((p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let whole: u64 = if whole.is_empty() {
            0
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let denom = 10u64
            .checked_pow(frac.len() as u32)
            .ok_or_else(|| CliError::Validation(format!("--mu {s:?} has too many digits")))?;
        let fpart: u64 = frac.parse().map_err(|_| bad())?;
        let numer = whole
            .checked_mul(denom)
            .and_then(|w| w.checked_add(fpart))
            .ok_or_else(|| CliError::Validation(format!("--mu {s:?} is too large")))?;
        return Ok((numer, denom));
    }
    let p: u64 = s.parse().map_err(|_| bad())?;
    Ok((p, 1))
}

fn parse_mu_f64(s: &str) -> Result<f64, CliError> {
    if let Ok(v) = s.trim().parse::<f64>() {
        if v.is_finite() && v >= 0.0 {
            return Ok(v);
        }
        return Err(CliError::Validation(format!(
            "--mu must be finite and nonnegative, got {s:?}"
        )));
    }
    let (p, q) = parse_mu_parts(s)?;
    if q == 0 {
        return Err(CliError::Validation("--mu denominator is zero".into()));
    }
    Ok(p as f64 / q as f64)
}

fn lattice_params(mu: &str, mode: ModeArg) -> Result<LatticeParams, CliError> {
    match mode {
        ModeArg::Exact => {
            let (p, q) = parse_mu_parts(mu)?;
            Ok(LatticeParams::exact(p, q)?)
        }
        ModeArg::Float => Ok(LatticeParams::float(parse_mu_f64(mu)?)?),
    }
}

fn field_mode(mode: ModeArg) -> FieldMode {
    match mode {
        ModeArg::Exact => FieldMode::Exact,
        ModeArg::Float => FieldMode::Float,
    }
}

fn check_t_max(t_max: i64) -> Result<(), CliError> {
    if t_max < 1 {
        return Err(CliError::Validation(format!(
            "--t-max must be at least 1, got {t_max}"
        )));
    }
    Ok(())
}

fn check_unit_interval(mu: f64) -> Result<(), CliError> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(CliError::Validation(format!(
            "--mu must lie in [0, 1] for this command, got {mu}"
        )));
    }
    Ok(())
}

fn parse_field(spec: &str) -> Result<EdgeField, CliError> {
    match spec {
        "identity" => Ok(EdgeField::Identity),
        "homogeneous" => Ok(EdgeField::HomogeneousMagnetic),
        other => match other.strip_prefix("custom:") {
            Some(path) if !path.is_empty() => {
                let map = EdgeMap::from_file(path).map_err(|e| match e {
                    LibError::Io(io) => CliError::Io(format!("{path}: {io}")),
                    other => CliError::Validation(other.to_string()),
                })?;
                Ok(EdgeField::Custom(map))
            }
            _ => Err(CliError::Validation(format!(
                "--field must be identity, homogeneous, or custom:<path>, got {spec:?}"
            ))),
        },
    }
}

// Commands.

fn amplitude_table(args: &TableArgs, with_components: bool) -> Result<Table, CliError> {
    check_t_max(args.t_max)?;
    let params = lattice_params(&args.mu, args.mode)?;
    let mut rows = Vec::new();
    let mut row = AmplitudeRow::initial(&params);
    loop {
        let t = row.t();
        for x in row.support() {
            if with_components {
                let a = row.amplitude_at(x);
                rows.push(vec![
                    Cell::Int(t),
                    Cell::Int(x),
                    Cell::Float(a.a1),
                    Cell::Float(a.a2),
                    Cell::Float(row.probability_at(x)),
                ]);
            } else {
                rows.push(vec![
                    Cell::Int(t),
                    Cell::Int(x),
                    Cell::Float(row.probability_at(x)),
                ]);
            }
        }
        if t == args.t_max {
            break;
        }
        row = row.evolve(&params)?;
    }
    Ok(if with_components {
        Table {
            schema: "amplitudes-v1",
            columns: &["t", "x", "a1", "a2", "P"],
            rows,
        }
    } else {
        Table {
            schema: "probabilities-v1",
            columns: &["t", "x", "P"],
            rows,
        }
    })
}

fn reversal_table(args: &TableArgs) -> Result<Table, CliError> {
    check_t_max(args.t_max)?;
    let mu = parse_mu_f64(&args.mu)?;
    check_unit_interval(mu)?;
    let params = lattice_params(&args.mu, args.mode)?;
    let direct = direct_sweep(args.t_max, &params)?;
    let series = series_sweep(args.t_max, mu)?;
    let limit = reversal_limit(mu)?;
    let rows = (1..=args.t_max)
        .map(|t| {
            let s1 = direct.s1[(t - 1) as usize];
            vec![
                Cell::Int(t),
                Cell::Float(s1),
                Cell::Float(series.s1[(t - 1) as usize]),
                Cell::Float(limit),
                Cell::Float((s1 - limit).abs() * (t as f64).sqrt()),
            ]
        })
        .collect();
    Ok(Table {
        schema: "reversal-v1",
        columns: &["t", "s1_direct", "s1_series", "limit", "scaled_deviation"],
        rows,
    })
}

fn asymptote_table(args: &AsymptoteArgs) -> Result<Table, CliError> {
    let mu = parse_mu_f64(&args.mu)?;
    check_unit_interval(mu)?;
    if args.t_max < 4 {
        return Err(CliError::Validation(format!(
            "--t-max must be at least 4 to fit one row (n = 1, t = 4), got {}",
            args.t_max
        )));
    }
    let n_max = args.t_max / 2 - 1;
    let mut rows = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let a1 = a1_zero_via_legendre(n as u32, mu);
        let main = asymptotic_a1_zero(n as u32, mu, args.delta)?;
        rows.push(vec![
            Cell::Int(n),
            Cell::Int(2 * n + 2),
            Cell::Float(a1),
            Cell::Float(main),
            Cell::Float((a1 - main).abs() * (n as f64).powf(1.5)),
        ]);
    }
    Ok(Table {
        schema: "asymptote-v1",
        columns: &["n", "t", "a1", "main_term", "scaled_residual"],
        rows,
    })
}

fn field_table(args: &FieldArgs) -> Result<Table, CliError> {
    check_t_max(args.t_max)?;
    let u = parse_field(&args.field)?;
    let homogeneous = u == EdgeField::HomogeneousMagnetic;
    let mut rows = Vec::with_capacity(args.t_max as usize);
    let mut row = FieldRow::initial(field_mode(args.mode));
    loop {
        let t = row.t();
        let p_left = row.component_sums().0;
        let mut cells = vec![Cell::Int(t), Cell::Float(p_left)];
        if homogeneous {
            cells.push(Cell::Float(P_LEFT_EVEN_LIMIT));
            cells.push(Cell::Float(P_LEFT_ODD_LIMIT));
        }
        rows.push(cells);
        if t == args.t_max {
            break;
        }
        row = row.evolve(&u)?;
    }
    Ok(if homogeneous {
        Table {
            schema: "field-homogeneous-v1",
            columns: &["t", "p_left", "even_ref", "odd_ref"],
            rows,
        }
    } else {
        Table {
            schema: "field-v1",
            columns: &["t", "p_left"],
            rows,
        }
    })
}

fn blattice_table(args: &BlatticeArgs) -> Result<Table, CliError> {
    check_t_max(args.t_max)?;
    let mut rows = Vec::with_capacity(args.t_max as usize);
    match args.mode {
        ModeArg::Float => {
            for (i, q) in q_left_series(args.t_max)?.iter().enumerate() {
                rows.push(vec![
                    Cell::Int(i as i64 + 1),
                    Cell::Float(*q),
                    Cell::Float(Q_LEFT_LIMIT),
                ]);
            }
        }
        ModeArg::Exact => {
            let u = EdgeField::HomogeneousMagnetic;
            let mut row = FieldRow::initial(FieldMode::Exact);
            loop {
                let t = row.t();
                if t % 2 == 1 {
                    let k = (t + 1) / 2;
                    rows.push(vec![
                        Cell::Int(k),
                        Cell::Float(row.component_sums().0),
                        Cell::Float(Q_LEFT_LIMIT),
                    ]);
                    if k == args.t_max {
                        break;
                    }
                }
                row = row.evolve(&u)?;
            }
        }
    }
    Ok(Table {
        schema: "blattice-v1",
        columns: &["t", "q_left", "ref_limit"],
        rows,
    })
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode, CliError> {
    let report = run_all(&VerifyConfig { fast: args.fast });
    let mut theorems = (0usize, 0usize);
    let mut conjectures = (0usize, 0usize);
    let mut observations = (0usize, 0usize);
    for r in &report.results {
        let (label, bucket) = match r.class {
            CheckClass::Theorem => ("theorem", &mut theorems),
            CheckClass::Conjecture => ("conjecture", &mut conjectures),
            CheckClass::Observation => ("observation", &mut observations),
        };
        bucket.0 += 1;
        if !r.passed {
            bucket.1 += 1;
        }
        eprintln!(
            "{} {:11} {:28} {:6}ms  {}",
            if r.passed { "PASS" } else { "FAIL" },
            label,
            r.id,
            r.millis,
            r.details
        );
    }
    eprintln!(
        "{} checks: {} theorems ({} failed), {} conjectures ({} failed), {} observations ({} failed)",
        report.results.len(),
        theorems.0,
        theorems.1,
        conjectures.0,
        conjectures.1,
        observations.0,
        observations.1
    );
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    emit(&args.out, &json)?;
    Ok(if report.theorems_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

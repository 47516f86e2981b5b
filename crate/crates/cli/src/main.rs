use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use hecke_core::euler::{euler_p1_detailed, euler_p2_detailed, prime_log_sum_detailed, DEFAULT_REL_EPS};
use hecke_core::{
    dedekind_zeta, emit_csv, emit_report, fe_residual, gauss_sum_bruteforce, gauss_sum_closed, l_value, parse_config,
    primary_normalize, root_number_check, run, sweep, symbol, symbol_fast, Character, Error, FieldId, Format, QuadInt,
    RunConfig,
};
use num_complex::Complex64 as C;

mod selftest;

#[derive(Parser)]
#[command(name = "hecke", version, about = "Quadratic Hecke L-functions over imaginary quadratic fields of class number one")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quadratic residue symbol (a/n), or its exhaustive self-test.
    Symbol(SymbolArgs),
    /// Primary normalization.
    Primary {
        #[command(subcommand)]
        command: PrimaryCommand,
    },
    /// Gauss-sum checks.
    Gauss {
        #[command(subcommand)]
        command: GaussCommand,
    },
    /// Hecke L-value L(s, χ^(c_K c)).
    Lvalue(LvalueArgs),
    /// Euler products P1(w), P2(w, z) and the prime sum S(r) with their tail budgets.
    Products(ProductArgs),
    /// One moment experiment, written as a JSON (or CSV) report.
    Moment(MomentArgs),
    /// A moment experiment over an X grid, written as CSV.
    Sweep(MomentArgs),
    /// Quick consistency checks over all nine fields.
    Selftest,
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct SymbolArgs {
    #[command(subcommand)]
    command: Option<SymbolCommand>,
    /// Numerator, written `a+b*w@d` (the `@d` may be left to `--field`).
    #[arg(allow_hyphen_values = true)]
    a: Option<String>,
    /// Odd modulus.
    #[arg(allow_hyphen_values = true)]
    n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    field: Option<i64>,
}

#[derive(Subcommand)]
enum SymbolCommand {
    /// Checks reciprocity, both supplements and the fast path on all primary pairs.
    Selftest {
        #[arg(long, default_value_t = 100)]
        maxnorm: i64,
        /// Restrict to one field.
        #[arg(long, allow_hyphen_values = true)]
        field: Option<i64>,
    },
}

#[derive(Subcommand)]
enum PrimaryCommand {
    /// Prints the unit u and the primary associate u·n.
    Normalize {
        #[arg(allow_hyphen_values = true)]
        n: String,
        #[arg(long, allow_hyphen_values = true)]
        field: Option<i64>,
    },
}

#[derive(Subcommand)]
enum GaussCommand {
    /// CSV of closed form against brute force for odd square-free primary n.
    Check {
        #[arg(long, allow_hyphen_values = true)]
        field: i64,
        #[arg(long, default_value_t = 200)]
        maxnorm: i64,
    },
}

#[derive(Args)]
struct LvalueArgs {
    #[arg(long, allow_hyphen_values = true)]
    field: Option<i64>,
    /// Conductor parameter c (odd, square-free, primary).
    #[arg(long, required_unless_present = "batch")]
    c: Option<String>,
    /// Point s, written `re,im` or `re+imi`.
    #[arg(long, allow_hyphen_values = true, default_value = "0.5,0")]
    s: String,
    #[arg(long, default_value_t = 1e-12)]
    eps: f64,
    /// CSV file with columns `c,s_re,s_im`; one output row per input row.
    #[arg(long, conflicts_with = "c")]
    batch: Option<PathBuf>,
}

#[derive(Args)]
struct ProductArgs {
    #[arg(long, allow_hyphen_values = true)]
    field: i64,
    #[arg(long, allow_hyphen_values = true)]
    w: String,
    /// Also evaluate P2(w, z).
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    /// Also evaluate S(r).
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    #[arg(long, default_value_t = DEFAULT_REL_EPS)]
    eps: f64,
    /// Prime-norm bound; chosen from `eps` when absent.
    #[arg(long)]
    bound: Option<u64>,
}

/// Flags override the config file key of the same name.
#[derive(Args)]
struct MomentArgs {
    /// `key=value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Field list, e.g. `-1` or `-1,-7`.
    #[arg(long, allow_hyphen_values = true)]
    field: Option<String>,
    /// `first`, `ratios` or `logderiv`.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    #[arg(long = "X")]
    x: Option<String>,
    #[arg(long = "X-grid")]
    x_grid: Option<String>,
    /// `bump` or `gamma`.
    #[arg(long)]
    weight: Option<String>,
    #[arg(long)]
    l_eps: Option<String>,
    #[arg(long)]
    euler_eps: Option<String>,
    /// 0 uses every core; results do not depend on it.
    #[arg(long)]
    workers: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    csv: Option<String>,
    /// `json` or `csv` (moment only).
    #[arg(long, default_value = "json")]
    format: String,
    /// Any other config key, as `key=value`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0} check(s) failed")]
    Checks(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Budget(_)) => 3,
            CliError::Checks(_) => 1,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Symbol(args) => match args.command {
            Some(SymbolCommand::Selftest { maxnorm, field }) => {
                let fields = match field {
                    Some(d) => vec![FieldId::new(d)?],
                    None => FieldId::all().collect(),
                };
                selftest::report(selftest::symbol_laws(&fields, maxnorm)?)
            }
            None => {
                let (Some(a), Some(n)) = (args.a, args.n) else {
                    return Err(CliError::Usage("symbol needs <a> <n> or `selftest`".into()));
                };
                let a = parse_elem(&a, args.field)?;
                let n = parse_elem(&n, args.field)?;
                println!("{}", symbol(&a, &n)?);
                Ok(())
            }
        },
        Command::Primary { command: PrimaryCommand::Normalize { n, field } } => {
            let n = parse_elem(&n, field)?;
            let (u, p) = primary_normalize(&n)?;
            println!("u = {u}\nn' = {p}");
            Ok(())
        }
        Command::Gauss { command: GaussCommand::Check { field, maxnorm } } => gauss_check(FieldId::new(field)?, maxnorm),
        Command::Lvalue(args) => lvalue(args),
        Command::Products(args) => products(args),
        Command::Moment(args) => moment(args),
        Command::Sweep(args) => sweep_cmd(args),
        Command::Selftest => selftest::report(selftest::all()?),
    }
}

/// Accepts `a+b*w@d`, or `a+b*w` / a bare integer when `--field` is given.
fn parse_elem(text: &str, field: Option<i64>) -> Result<QuadInt> {
    let text = text.trim();
    let elem = match (text.contains('@'), field) {
        (true, _) => QuadInt::from_str(text)?,
        (false, Some(d)) => {
            let k = FieldId::new(d)?;
            match text.parse::<i64>() {
                Ok(a) => k.elem(a, 0),
                Err(_) => QuadInt::from_str(&format!("{text}@{d}"))?,
            }
        }
        (false, None) => return Err(CliError::Usage(format!("{text:?}: give the field as `@d` or with --field"))),
    };
    if let Some(d) = field {
        if elem.field.d() != d {
            return Err(Error::FieldMismatch(elem.field.d(), d).into());
        }
    }
    Ok(elem)
}

/// `re,im`, `re` or `re+imi`.
fn parse_complex(text: &str) -> Result<C> {
    let bad = || CliError::Usage(format!("cannot parse {text:?} as a complex number"));
    let t = text.trim().replace(' ', "");
    if let Some((re, im)) = t.split_once(',') {
        return Ok(C::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?));
    }
    C::from_str(&t).map_err(|_| bad())
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|source| CliError::Io { path: p.to_owned(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn csv_bytes<F: FnOnce(&mut csv::Writer<Vec<u8>>) -> std::result::Result<(), csv::Error>>(f: F) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    f(&mut w).map_err(|e| CliError::Usage(e.to_string()))?;
    w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
}

fn gauss_check(k: FieldId, maxnorm: i64) -> Result<()> {
    let mut rows = Vec::new();
    for n in hecke_core::enumerate_c(k, 0.0, maxnorm as f64) {
        let closed = gauss_sum_closed(&n)?;
        let brute = gauss_sum_bruteforce(&k.one(), &Character::lower(&n)?, &n)?;
        rows.push((n, closed, brute));
    }
    let bytes = csv_bytes(|w| {
        w.write_record(["n", "norm", "closed_re", "closed_im", "brute_re", "brute_im", "abs_diff"])?;
        for (n, a, b) in &rows {
            w.write_record([
                n.to_string(),
                n.norm().to_string(),
                format!("{:.16e}", a.re),
                format!("{:.16e}", a.im),
                format!("{:.16e}", b.re),
                format!("{:.16e}", b.im),
                format!("{:.3e}", (a - b).norm()),
            ])?;
        }
        Ok(())
    })?;
    write_output(None, &bytes)
}

fn lvalue(args: LvalueArgs) -> Result<()> {
    let jobs: Vec<(String, C)> = match &args.batch {
        Some(path) => {
            let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let mut jobs = Vec::new();
            for rec in rdr.records() {
                let rec = rec.map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                let get = |i: usize| rec.get(i).unwrap_or("").to_string();
                jobs.push((get(0), parse_complex(&format!("{},{}", get(1), get(2)))?));
            }
            jobs
        }
        None => vec![(args.c.clone().unwrap_or_default(), parse_complex(&args.s)?)],
    };
    let mut rows = Vec::new();
    for (c, s) in jobs {
        let c = parse_elem(&c, args.field)?;
        rows.push((c, l_value(s, &c, args.eps)?));
    }
    let bytes = csv_bytes(|w| {
        w.write_record(["c", "s_re", "s_im", "value_re", "value_im", "abs_error_estimate", "terms_used"])?;
        for (c, v) in &rows {
            w.write_record([
                c.to_string(),
                v.s.re.to_string(),
                v.s.im.to_string(),
                format!("{:.16e}", v.value.re),
                format!("{:.16e}", v.value.im),
                format!("{:.3e}", v.abs_error_estimate),
                v.terms_used.to_string(),
            ])?;
        }
        Ok(())
    })?;
    write_output(None, &bytes)
}

fn products(args: ProductArgs) -> Result<()> {
    let k = FieldId::new(args.field)?;
    let w = parse_complex(&args.w)?;
    let mut out = serde_json::Map::new();
    out.insert("field".into(), k.d().into());
    out.insert("eps".into(), args.eps.into());
    let to_json = |v| serde_json::to_value(v).expect("serializable");
    out.insert("P1".into(), to_json(euler_p1_detailed(w, k, args.eps, args.bound)?));
    if let Some(z) = &args.z {
        let z = parse_complex(z)?;
        out.insert("P2".into(), to_json(euler_p2_detailed(w, z, k, args.eps, args.bound)?));
    }
    if let Some(r) = &args.r {
        let r = parse_complex(r)?;
        out.insert("S".into(), to_json(prime_log_sum_detailed(r, k, args.eps, args.bound)?));
    }
    let mut bytes = serde_json::to_vec_pretty(&out).expect("serializable");
    bytes.push(b'\n');
    write_output(None, &bytes)
}

/// Config file first, then each flag as a later `key=value` line.
fn load_config(args: &MomentArgs) -> Result<RunConfig> {
    let mut text = match &args.config {
        Some(p) => std::fs::read_to_string(p).map_err(|source| CliError::Io { path: p.clone(), source })?,
        None => String::new(),
    };
    let flags = [
        ("field", &args.field),
        ("mode", &args.mode),
        ("alpha", &args.alpha),
        ("beta", &args.beta),
        ("r", &args.r),
        ("X", &args.x),
        ("X_grid", &args.x_grid),
        ("weight", &args.weight),
        ("l_eps", &args.l_eps),
        ("euler_eps", &args.euler_eps),
        ("workers", &args.workers),
        ("out", &args.out),
        ("csv", &args.csv),
    ];
    text.push('\n');
    for (key, value) in flags {
        if let Some(v) = value {
            text.push_str(&format!("{key}={v}\n"));
        }
    }
    for kv in &args.set {
        if !kv.contains('=') {
            return Err(CliError::Usage(format!("--set expects key=value, got {kv:?}")));
        }
        text.push_str(kv);
        text.push('\n');
    }
    Ok(parse_config(&text)?)
}

/// With several fields, each file name gets a `_d<d>` suffix.
fn path_for(base: Option<&Path>, k: FieldId, several: bool) -> Option<PathBuf> {
    let base = base?;
    if !several {
        return Some(base.to_owned());
    }
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    let name = match base.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_d{}.{ext}", k.d()),
        None => format!("{stem}_d{}", k.d()),
    };
    Some(base.with_file_name(name))
}

fn moment(args: MomentArgs) -> Result<()> {
    let cfg = load_config(&args)?;
    let format = match args.format.as_str() {
        "json" => Format::Json,
        "csv" => Format::Csv,
        other => return Err(CliError::Usage(format!("unknown format {other:?}"))),
    };
    let several = cfg.fields.len() > 1;
    for &k in &cfg.fields {
        let report = run(&cfg.request(k, cfg.x), cfg.workers)?;
        write_output(path_for(cfg.out.as_deref(), k, several).as_deref(), &emit_report(&report, format)?)?;
        if let Some(p) = path_for(cfg.csv.as_deref(), k, several) {
            write_output(Some(&p), &emit_report(&report, Format::Csv)?)?;
        }
    }
    Ok(())
}

fn sweep_cmd(args: MomentArgs) -> Result<()> {
    let cfg = load_config(&args)?;
    let several = cfg.fields.len() > 1;
    for &k in &cfg.fields {
        let rows = sweep(&cfg.request(k, cfg.x_grid[0]), &cfg.x_grid, cfg.workers)?;
        let bytes = emit_csv(&rows)?;
        let target = cfg.csv.as_deref().or(cfg.out.as_deref());
        write_output(path_for(target, k, several).as_deref(), &bytes)?;
    }
    Ok(())
}

/// Shared by `selftest` and its per-topic variants.
pub(crate) fn root_number_error(k: FieldId, maxnorm: i64) -> hecke_core::Result<f64> {
    let mut worst = 0.0f64;
    for c in hecke_core::enumerate_c(k, 0.0, maxnorm as f64) {
        let want = ((k.c_k() * c).norm() as f64).sqrt();
        worst = worst.max((root_number_check(&c)? - want).norm() / want);
    }
    Ok(worst)
}

pub(crate) fn fe_error(k: FieldId, maxnorm: i64) -> hecke_core::Result<f64> {
    let mut worst = 0.0f64;
    for c in hecke_core::enumerate_c(k, 0.0, maxnorm as f64).into_iter().take(4) {
        for s in [C::new(0.5, 0.0), C::new(0.6, 0.7), C::new(2.0, 0.0)] {
            worst = worst.max(fe_residual(s, &c)?);
        }
    }
    Ok(worst)
}

pub(crate) fn zeta_gaussian_error() -> hecke_core::Result<f64> {
    const CATALAN: f64 = 0.915_965_594_177_219_015_054_603_514_932_384;
    let z = dedekind_zeta(C::new(2.0, 0.0), FieldId::new(-1)?, false)?;
    Ok((z.re - std::f64::consts::PI.powi(2) / 6.0 * CATALAN).abs() + z.im.abs())
}

pub(crate) fn fast_matches(m: &QuadInt, n: &QuadInt, reference: i8) -> hecke_core::Result<bool> {
    Ok(!m.field.is_norm_euclidean() || symbol_fast(m, n)? == reference)
}

//! Command-line front end: classification sweeps, measure recovery, table
//! and moment dumps, λ-limit diagnostics, and the embedding-residual check.
//!
//! Exit codes: 0 = consistent / success, 1 = violation certificate (or a
//! failed recovery / residual over budget), 2 = input or domain error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stieltjes::classify::{
    check_cm, check_condition_b, check_condition_c, exp_kernel_limit, kernel_embedding_residual,
    limit_checks, pick_property_check, Grid, PickGrid,
};
use stieltjes::expr::FunctionSpec;
use stieltjes::hausdorff::{base_point_consistency, moment_sequence_at, recover_measure};
use stieltjes::measure::MeasureSpec;
use stieltjes::operators::f_table;
use stieltjes::real::{Ext, Real};
use stieltjes::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "stieltjes",
    version,
    about = "Classify generalized Stieltjes functions and recover representing measures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a sign-condition sweep (derivative family, diagonal family,
    /// complete monotonicity, or the complex half-plane check)
    Classify(ClassifyArgs),
    /// Recover the representing measure from Hausdorff moments at a base point
    Recover(RecoverArgs),
    /// Dump the F table at one point
    Table(TableArgs),
    /// Dump the normalized moment sequence at one point
    Moments(MomentsArgs),
    /// Evaluate the large-λ and small-λ limit identities
    Limits(LimitsArgs),
    /// Verify the order-embedding kernel identity by quadrature
    VerifyKernel(VerifyKernelArgs),
}

#[derive(Args, Debug)]
struct FunctionArgs {
    /// Inline expression in x, e.g. "1/(x+1)"
    #[arg(long, allow_hyphen_values = true)]
    expr: Option<String>,
    /// Path to a measure JSON file, e.g. {"C":0,"atoms":[[1,1]],"pieces":[]}
    #[arg(long)]
    measure: Option<PathBuf>,
}

impl FunctionArgs {
    fn load(&self, lambda: Option<f64>) -> Result<FunctionSpec> {
        match (&self.expr, &self.measure) {
            (Some(src), None) => FunctionSpec::from_expr(src),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                    msg: format!("{}: {e}", path.display()),
                })?;
                let m = MeasureSpec::from_json(&text)?;
                let lambda = lambda.ok_or_else(|| Error::BadSpec {
                    msg: "--lambda is required with --measure".into(),
                })?;
                FunctionSpec::from_measure(m, lambda)
            }
            _ => Err(Error::BadSpec {
                msg: "exactly one of --expr or --measure is required".into(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PrecisionMode {
    F64,
    Extended,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    /// The full F table must be nonnegative
    B,
    /// Widder's diagonal family F_{0,0}, F_{k-1,k} (order 1)
    C,
    /// Complete monotonicity of f itself
    Cm,
    /// Im f <= 0 on the upper half-plane and f >= 0 on the ray (order 1)
    Pick,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    function: FunctionArgs,
    /// Order λ of the family (and of the measure when --measure is given)
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, value_enum, default_value_t = CheckKind::B)]
    check: CheckKind,
    /// Evaluation grid lo:hi:count, log-spaced (for pick: the real axis, linear)
    #[arg(long)]
    grid: Option<String>,
    /// Imaginary axis lo:hi:count for the pick rectangle, linear
    #[arg(long)]
    im_grid: Option<String>,
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long)]
    kmax: Option<usize>,
    /// Relative tolerance multiplying each entry's cancellation scale
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum)]
    precision: Option<PrecisionMode>,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct RecoverArgs {
    #[command(flatten)]
    function: FunctionArgs,
    #[arg(long)]
    lambda: f64,
    /// Base point x > 0 whose moment sequence drives the reconstruction
    #[arg(long)]
    x: f64,
    /// Second base point: recover there too and compare the induced functions
    #[arg(long)]
    x2: Option<f64>,
    /// Hausdorff depth (number of finite differences)
    #[arg(long = "K")]
    depth: Option<usize>,
    #[arg(long, value_enum)]
    precision: Option<PrecisionMode>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[command(flatten)]
    function: FunctionArgs,
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    x: f64,
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long, value_enum)]
    precision: Option<PrecisionMode>,
    /// Write values here; CSV scales go to a .scales.csv companion
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct MomentsArgs {
    #[command(flatten)]
    function: FunctionArgs,
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    x: f64,
    /// Highest moment index
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long, value_enum)]
    precision: Option<PrecisionMode>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct LimitsArgs {
    #[command(flatten)]
    function: FunctionArgs,
    /// Representation order, only needed with --measure
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    x: f64,
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Comma-separated λ values to sweep
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000")]
    lambdas: Vec<f64>,
    #[arg(long, value_enum)]
    precision: Option<PrecisionMode>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct VerifyKernelArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    lambda_prime: f64,
    /// Single x instead of the default sweep {0.5, 1, 10}
    #[arg(long)]
    x: Option<f64>,
    /// Single t instead of the default sweep {0, 1, 10}
    #[arg(long)]
    t: Option<f64>,
    /// Also evaluate the scaled-kernel exponential limit at these λ (comma list)
    #[arg(long, value_delimiter = ',')]
    exp_lambdas: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Flag beats the STIELTJES_PRECISION env var beats the auto default.
/// The bool reports whether the mode was requested explicitly.
fn resolve_precision(
    flag: Option<PrecisionMode>,
    auto_extended: bool,
) -> Result<(PrecisionMode, bool)> {
    if let Some(p) = flag {
        return Ok((p, true));
    }
    if let Ok(v) = std::env::var("STIELTJES_PRECISION") {
        let p = match v.to_ascii_lowercase().as_str() {
            "f64" => PrecisionMode::F64,
            "extended" => PrecisionMode::Extended,
            other => {
                return Err(Error::BadSpec {
                    msg: format!("STIELTJES_PRECISION must be f64 or extended, got '{other}'"),
                })
            }
        };
        return Ok((p, true));
    }
    Ok((
        if auto_extended {
            PrecisionMode::Extended
        } else {
            PrecisionMode::F64
        },
        false,
    ))
}

fn default_size(mode: PrecisionMode) -> usize {
    match mode {
        PrecisionMode::F64 => 8,
        PrecisionMode::Extended => 16,
    }
}

fn default_tol(mode: PrecisionMode) -> f64 {
    match mode {
        PrecisionMode::F64 => 1e-8,
        PrecisionMode::Extended => 1e-30,
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|e| Error::Io {
            msg: format!("{}: {e}", path.display()),
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn parse_axis(src: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = src.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::BadSpec {
            msg: format!("axis spec '{src}' is not lo:hi:count"),
        });
    }
    let lo: f64 = parts[0].parse().map_err(|_| Error::BadSpec {
        msg: format!("bad axis lower bound '{}'", parts[0]),
    })?;
    let hi: f64 = parts[1].parse().map_err(|_| Error::BadSpec {
        msg: format!("bad axis upper bound '{}'", parts[1]),
    })?;
    let count: usize = parts[2].parse().map_err(|_| Error::BadSpec {
        msg: format!("bad axis count '{}'", parts[2]),
    })?;
    Ok((lo, hi, count))
}

fn require_order_one(lambda: Option<f64>, what: &str) -> Result<()> {
    if let Some(l) = lambda {
        if (l - 1.0).abs() >= 1e-12 {
            return Err(Error::BadSpec {
                msg: format!("the {what} check applies to order λ = 1 only, got λ = {l}"),
            });
        }
    }
    Ok(())
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Classify(args) => run_classify(args),
        Command::Recover(args) => run_recover(args),
        Command::Table(args) => run_table(args),
        Command::Moments(args) => run_moments(args),
        Command::Limits(args) => run_limits(args),
        Command::VerifyKernel(args) => run_verify_kernel(args),
    }
}

fn classify_b<R: Real>(
    f: &FunctionSpec,
    lambda: f64,
    grid: &Grid,
    n_max: usize,
    k_max: usize,
    tol: f64,
) -> Result<(bool, String, String)> {
    let rep = check_condition_b::<R>(f, lambda, grid, n_max, k_max, tol)?;
    Ok((rep.consistent, rep.to_json(), rep.to_csv()))
}

fn classify_c<R: Real>(
    f: &FunctionSpec,
    grid: &Grid,
    k_max: usize,
    tol: f64,
) -> Result<(bool, String, String)> {
    let rep = check_condition_c::<R>(f, grid, k_max, tol)?;
    Ok((rep.consistent, rep.to_json(), rep.to_csv()))
}

fn classify_cm<R: Real>(
    f: &FunctionSpec,
    grid: &Grid,
    n_max: usize,
    tol: f64,
) -> Result<(bool, String, String)> {
    let rep = check_cm::<R>(f, grid, n_max, tol)?;
    Ok((rep.consistent, rep.to_json(), rep.to_csv()))
}

fn run_classify(args: ClassifyArgs) -> Result<u8> {
    if args.check == CheckKind::Pick {
        return run_pick(args);
    }
    let grid = match &args.grid {
        Some(src) => Grid::parse(src)?,
        None => Grid::default(),
    };
    // an explicitly requested table deeper than n+k = 10 defaults to the
    // extended mode; the stock 8x8 binary64 sweep stays in hardware floats
    let auto_ext = match args.check {
        CheckKind::B => {
            (args.nmax.is_some() || args.kmax.is_some())
                && args.nmax.unwrap_or(8) + args.kmax.unwrap_or(8) > 10
        }
        CheckKind::C => args.kmax.is_some_and(|k| 2 * k > 11),
        CheckKind::Cm => args.nmax.is_some_and(|n| n > 10),
        CheckKind::Pick => unreachable!(),
    };
    let (mode, _) = resolve_precision(args.precision, auto_ext)?;
    let tol = args.tol.unwrap_or_else(|| default_tol(mode));
    let (consistent, json, csv) = match args.check {
        CheckKind::B => {
            let lambda = args.lambda.ok_or_else(|| Error::BadSpec {
                msg: "--lambda is required for the b check".into(),
            })?;
            let f = args.function.load(Some(lambda))?;
            let n_max = args.nmax.unwrap_or_else(|| default_size(mode));
            let k_max = args.kmax.unwrap_or_else(|| default_size(mode));
            match mode {
                PrecisionMode::F64 => classify_b::<f64>(&f, lambda, &grid, n_max, k_max, tol)?,
                PrecisionMode::Extended => {
                    classify_b::<Ext>(&f, lambda, &grid, n_max, k_max, tol)?
                }
            }
        }
        CheckKind::C => {
            if args.function.expr.is_some() {
                require_order_one(args.lambda, "diagonal")?;
            }
            let f = args.function.load(args.lambda)?;
            let k_max = args.kmax.unwrap_or_else(|| default_size(mode));
            match mode {
                PrecisionMode::F64 => classify_c::<f64>(&f, &grid, k_max, tol)?,
                PrecisionMode::Extended => classify_c::<Ext>(&f, &grid, k_max, tol)?,
            }
        }
        CheckKind::Cm => {
            let f = args.function.load(args.lambda)?;
            let n_max = args.nmax.unwrap_or_else(|| default_size(mode));
            match mode {
                PrecisionMode::F64 => classify_cm::<f64>(&f, &grid, n_max, tol)?,
                PrecisionMode::Extended => classify_cm::<Ext>(&f, &grid, n_max, tol)?,
            }
        }
        CheckKind::Pick => unreachable!(),
    };
    match args.format {
        Format::Json => emit(&args.out, &format!("{json}\n"))?,
        Format::Csv => emit(&args.out, &csv)?,
    }
    Ok(if consistent { 0 } else { 1 })
}

fn run_pick(args: ClassifyArgs) -> Result<u8> {
    if args.function.expr.is_some() {
        require_order_one(args.lambda, "pick")?;
    } else if let Some(l) = args.lambda {
        if (l - 1.0).abs() >= 1e-12 {
            return Err(Error::BadSpec {
                msg: format!("the pick check applies to order λ = 1 only, got λ = {l}"),
            });
        }
    }
    let f = args.function.load(args.lambda.or(Some(1.0)))?;
    let (re_lo, re_hi, n_re) = match &args.grid {
        Some(src) => parse_axis(src)?,
        None => (0.1, 10.0, 20),
    };
    let (im_lo, im_hi, n_im) = match &args.im_grid {
        Some(src) => parse_axis(src)?,
        None => (0.1, 10.0, 20),
    };
    let grid = PickGrid::new(re_lo, re_hi, im_lo, im_hi, n_re, n_im)?;
    let tol = args.tol.unwrap_or(1e-12);
    let rep = pick_property_check(&f, &grid, tol)?;
    match args.format {
        Format::Json => emit(&args.out, &format!("{}\n", rep.to_json()))?,
        Format::Csv => {
            let mut csv = String::from("re,im,value\n");
            for v in &rep.violations {
                csv.push_str(&format!(
                    "{},{},{}\n",
                    v.re.fmt_sci(),
                    v.im.fmt_sci(),
                    v.value.fmt_sci()
                ));
            }
            emit(&args.out, &csv)?;
        }
    }
    Ok(if rep.consistent { 0 } else { 1 })
}

enum RecoverOutcome {
    Done(String, String),
    /// Moment test failed at (n, k) with the offending value.
    Refused(usize, usize, f64),
}

fn recover_generic<R: Real>(
    f: &FunctionSpec,
    lambda: f64,
    x: f64,
    x2: Option<f64>,
    depth: usize,
) -> Result<RecoverOutcome> {
    let xr = R::from_f64(x);
    let outcome = match x2 {
        None => recover_measure::<R>(f, lambda, &xr, depth).map(|rec| {
            let mut csv = format!("# C={}\n# sup_error={}\nt,w\n", rec.c_hat.fmt_sci(), rec.sup_error.fmt_sci());
            for (t, w) in &rec.atoms {
                csv.push_str(&format!("{},{}\n", t.fmt_sci(), w.fmt_sci()));
            }
            RecoverOutcome::Done(rec.to_json(), csv)
        }),
        Some(x2) => {
            let x2r = R::from_f64(x2);
            base_point_consistency::<R>(f, lambda, &xr, &x2r, depth).map(|rep| {
                let csv = format!(
                    "x1,x2,sup_diff,c_diff\n{},{},{},{}\n",
                    x.fmt_sci(),
                    x2.fmt_sci(),
                    rep.sup_diff.fmt_sci(),
                    rep.c_diff.fmt_sci()
                );
                RecoverOutcome::Done(rep.to_json(), csv)
            })
        }
    };
    match outcome {
        Ok(done) => Ok(done),
        Err(Error::NotCompletelyMonotone { n, k, value }) => {
            Ok(RecoverOutcome::Refused(n, k, value))
        }
        Err(e) => Err(e),
    }
}

fn run_recover(args: RecoverArgs) -> Result<u8> {
    let f = args.function.load(Some(args.lambda))?;
    let depth = args.depth.unwrap_or(64);
    let (mode, explicit) = resolve_precision(args.precision, depth > 20)?;
    if mode == PrecisionMode::F64 && depth > 20 {
        if explicit {
            return Err(Error::Precision {
                msg: format!(
                    "depth K = {depth} needs extended precision (binomials near 2^K swamp binary64); pass --precision extended or K <= 20"
                ),
            });
        }
    }
    let outcome = match mode {
        PrecisionMode::F64 => recover_generic::<f64>(&f, args.lambda, args.x, args.x2, depth)?,
        PrecisionMode::Extended => recover_generic::<Ext>(&f, args.lambda, args.x, args.x2, depth)?,
    };
    match outcome {
        RecoverOutcome::Done(json, csv) => {
            match args.format {
                Format::Json => emit(&args.out, &format!("{json}\n"))?,
                Format::Csv => emit(&args.out, &csv)?,
            }
            Ok(0)
        }
        RecoverOutcome::Refused(n, k, value) => {
            let doc = format!(
                "{{\"error\":\"not completely monotone\",\"function\":\"{}\",\"lambda\":{},\"x\":{},\"depth\":{},\"n\":{},\"k\":{},\"value\":{}}}\n",
                f.describe().replace('\\', "\\\\").replace('"', "\\\""),
                args.lambda.fmt_sci(),
                args.x.fmt_sci(),
                depth,
                n,
                k,
                value.fmt_sci()
            );
            emit(&args.out, &doc)?;
            Ok(1)
        }
    }
}

fn table_strings<R: Real>(
    f: &FunctionSpec,
    lambda: f64,
    x: f64,
    n_max: usize,
    k_max: usize,
) -> Result<(String, String, String)> {
    let xr = R::from_f64(x);
    let table = f_table::<R>(f, lambda, &xr, n_max, k_max)?;
    let mut json = format!(
        "{{\"function\":\"{}\",\"lambda\":{},\"x\":{},\"n_max\":{},\"k_max\":{},\"values\":[",
        f.describe().replace('\\', "\\\\").replace('"', "\\\""),
        lambda.fmt_sci(),
        x.fmt_sci(),
        n_max,
        k_max
    );
    for (n, row) in table.values.iter().enumerate() {
        if n > 0 {
            json.push(',');
        }
        json.push('[');
        for (k, v) in row.iter().enumerate() {
            if k > 0 {
                json.push(',');
            }
            json.push_str(&v.fmt_sci());
        }
        json.push(']');
    }
    json.push_str("],\"scales\":[");
    for (n, row) in table.scales.iter().enumerate() {
        if n > 0 {
            json.push(',');
        }
        json.push('[');
        for (k, v) in row.iter().enumerate() {
            if k > 0 {
                json.push(',');
            }
            json.push_str(&v.fmt_sci());
        }
        json.push(']');
    }
    json.push_str("]}");
    Ok((json, table.to_csv(), table.scales_csv()))
}

fn run_table(args: TableArgs) -> Result<u8> {
    let f = args.function.load(Some(args.lambda))?;
    let auto_ext = (args.nmax.is_some() || args.kmax.is_some())
        && args.nmax.unwrap_or(8) + args.kmax.unwrap_or(8) > 10;
    let (mode, _) = resolve_precision(args.precision, auto_ext)?;
    let n_max = args.nmax.unwrap_or_else(|| default_size(mode));
    let k_max = args.kmax.unwrap_or_else(|| default_size(mode));
    let (json, values_csv, scales_csv) = match mode {
        PrecisionMode::F64 => table_strings::<f64>(&f, args.lambda, args.x, n_max, k_max)?,
        PrecisionMode::Extended => table_strings::<Ext>(&f, args.lambda, args.x, n_max, k_max)?,
    };
    match args.format {
        Format::Json => emit(&args.out, &format!("{json}\n"))?,
        Format::Csv => match &args.out {
            Some(path) => {
                emit(&args.out, &values_csv)?;
                let companion = path.with_extension("scales.csv");
                std::fs::write(&companion, scales_csv).map_err(|e| Error::Io {
                    msg: format!("{}: {e}", companion.display()),
                })?;
            }
            None => {
                print!("{values_csv}# scales\n{scales_csv}");
            }
        },
    }
    Ok(0)
}

fn moments_strings<R: Real>(
    f: &FunctionSpec,
    lambda: f64,
    x: f64,
    n_max: usize,
) -> Result<(String, String)> {
    let xr = R::from_f64(x);
    let c = moment_sequence_at::<R>(f, lambda, &xr, n_max)?;
    let mut json = format!(
        "{{\"function\":\"{}\",\"lambda\":{},\"x\":{},\"n_max\":{},\"moments\":[",
        f.describe().replace('\\', "\\\\").replace('"', "\\\""),
        lambda.fmt_sci(),
        x.fmt_sci(),
        n_max
    );
    let mut csv = String::from("n,c_n\n");
    for (n, v) in c.as_slice().iter().enumerate() {
        if n > 0 {
            json.push(',');
        }
        json.push_str(&v.fmt_sci());
        csv.push_str(&format!("{n},{}\n", v.fmt_sci()));
    }
    json.push_str("]}");
    Ok((json, csv))
}

fn run_moments(args: MomentsArgs) -> Result<u8> {
    let f = args.function.load(Some(args.lambda))?;
    let auto_ext = args.nmax.is_some_and(|n| n > 10);
    let (mode, _) = resolve_precision(args.precision, auto_ext)?;
    let n_max = args.nmax.unwrap_or_else(|| default_size(mode));
    let (json, csv) = match mode {
        PrecisionMode::F64 => moments_strings::<f64>(&f, args.lambda, args.x, n_max)?,
        PrecisionMode::Extended => moments_strings::<Ext>(&f, args.lambda, args.x, n_max)?,
    };
    match args.format {
        Format::Json => emit(&args.out, &format!("{json}\n"))?,
        Format::Csv => emit(&args.out, &csv)?,
    }
    Ok(0)
}

fn run_limits(args: LimitsArgs) -> Result<u8> {
    if args.lambdas.is_empty() {
        return Err(Error::BadSpec {
            msg: "--lambdas needs at least one value".into(),
        });
    }
    let f = args.function.load(args.lambda)?;
    let auto_ext = args.n + args.k > 10;
    let (mode, _) = resolve_precision(args.precision, auto_ext)?;
    let rep = match mode {
        PrecisionMode::F64 => {
            limit_checks::<f64>(&f, &args.x, args.n, args.k, &args.lambdas)?
        }
        PrecisionMode::Extended => limit_checks::<Ext>(
            &f,
            &Ext::from_f64(args.x),
            args.n,
            args.k,
            &args.lambdas,
        )?,
    };
    match args.format {
        Format::Json => emit(&args.out, &format!("{}\n", rep.to_json()))?,
        Format::Csv => {
            let mut csv =
                String::from("lambda,f_value,normalized,gap_large,f01,gap_01,f10,gap_10\n");
            for r in &rep.rows {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.lambda.fmt_sci(),
                    r.f_value.fmt_sci(),
                    r.normalized.fmt_sci(),
                    r.gap_large.fmt_sci(),
                    r.f01.fmt_sci(),
                    r.gap_01.fmt_sci(),
                    r.f10.fmt_sci(),
                    r.gap_10.fmt_sci()
                ));
            }
            emit(&args.out, &csv)?;
        }
    }
    Ok(0)
}

const KERNEL_RESIDUAL_BUDGET: f64 = 1e-8;

fn run_verify_kernel(args: VerifyKernelArgs) -> Result<u8> {
    let xs = match args.x {
        Some(x) => vec![x],
        None => vec![0.5, 1.0, 10.0],
    };
    let ts = match args.t {
        Some(t) => vec![t],
        None => vec![0.0, 1.0, 10.0],
    };
    let mut rows = String::from("[");
    let mut csv = String::from("x,t,closed,quadrature,residual\n");
    let mut max_residual = 0.0f64;
    let mut first = true;
    for &x in &xs {
        for &t in &ts {
            let c = kernel_embedding_residual(args.lambda, args.lambda_prime, x, t)?;
            if c.residual.abs() > max_residual {
                max_residual = c.residual.abs();
            }
            if !first {
                rows.push(',');
            }
            first = false;
            rows.push_str(&format!(
                "{{\"x\":{},\"t\":{},\"closed\":{},\"quadrature\":{},\"residual\":{}}}",
                x.fmt_sci(),
                t.fmt_sci(),
                c.closed.fmt_sci(),
                c.quadrature.fmt_sci(),
                c.residual.fmt_sci()
            ));
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                x.fmt_sci(),
                t.fmt_sci(),
                c.closed.fmt_sci(),
                c.quadrature.fmt_sci(),
                c.residual.fmt_sci()
            ));
        }
    }
    rows.push(']');
    let mut exp_rows = String::from("[");
    for (i, &l) in args.exp_lambdas.iter().enumerate() {
        let c = exp_kernel_limit(xs[0], if ts[0] > 0.0 { ts[0] } else { 1.0 }, l)?;
        if i > 0 {
            exp_rows.push(',');
        }
        exp_rows.push_str(&format!(
            "{{\"lambda\":{},\"value\":{},\"target\":{},\"gap\":{}}}",
            l.fmt_sci(),
            c.value.fmt_sci(),
            c.target.fmt_sci(),
            c.gap.fmt_sci()
        ));
    }
    exp_rows.push(']');
    let json = format!(
        "{{\"lambda\":{},\"lambda_prime\":{},\"max_residual\":{},\"budget\":{},\"rows\":{},\"exp_kernel\":{}}}\n",
        args.lambda.fmt_sci(),
        args.lambda_prime.fmt_sci(),
        max_residual.fmt_sci(),
        KERNEL_RESIDUAL_BUDGET.fmt_sci(),
        rows,
        exp_rows
    );
    match args.format {
        Format::Json => emit(&args.out, &json)?,
        Format::Csv => emit(&args.out, &csv)?,
    }
    Ok(if max_residual > KERNEL_RESIDUAL_BUDGET { 1 } else { 0 })
}

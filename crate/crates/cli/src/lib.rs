//! Command-line front end: estimate, compile, eval, certify and bench.

pub mod audit;
pub mod compile;
pub mod targets;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use gdn_approx::{
    certify_efficient, depth_estimate, efficient_complexity, EstimateRequest, Modulus, ModulusEstimate, Polynomial,
};
use gdn_manifold::{distance, exp_map, log_map, resolve_manifold, Error, Result};
use gdn_nn::{ActivationClass, GdnModel};
use serde::{Deserialize, Serialize};

use compile::{compile_gdn, CompileConfig, DEFAULT_AUDIT_POINTS};

pub const THREADS_ENV: &str = "GDN_THREADS";

#[derive(Debug, Parser)]
#[command(name = "gdn", version, about = "Geometric deep network toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Depth, width and parameter orders for a target class.
    Estimate(EstimateArgs),
    /// Compile a registered target into a GDN and audit it.
    Compile(CompileArgs),
    /// Evaluate a GDN file or a single manifold operation.
    Eval(EvalArgs),
    /// Check normalizability and efficiency of a dataset.
    Certify(CertifyArgs),
    /// Run compile audits over a list of eps values and report CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// smooth, poly, continuous or pwl.
    #[arg(long)]
    pub class: Option<String>,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Lipschitz constant of the target in charts.
    #[arg(long, conflicts_with = "modulus_file")]
    pub lip: Option<f64>,
    /// JSON modulus estimate `{knots, values, kind}`.
    #[arg(long)]
    pub modulus_file: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub kappa1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub kappa2: f64,
    /// Constant of the continuous and piecewise-linear rows.
    #[arg(long = "B")]
    pub b: Option<f64>,
    /// Lipschitz constant of the activation for the continuous rows.
    #[arg(long, default_value_t = 1.0)]
    pub activation_lip: f64,
    /// Lipschitz constant of a readout map.
    #[arg(long)]
    pub readout_lip: Option<f64>,
    /// Report the efficient-dataset complexity of this order instead.
    #[arg(long)]
    pub efficient_n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    #[arg(long)]
    pub target: String,
    #[arg(long)]
    pub domain: String,
    /// Defaults to the domain.
    #[arg(long)]
    pub codomain: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub base_x: String,
    #[arg(long, allow_hyphen_values = true)]
    pub base_y: Option<String>,
    #[arg(long)]
    pub radius: f64,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value = "exp")]
    pub activation: String,
    /// Where to write the GDN JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_AUDIT_POINTS)]
    pub audit_points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Rebuild the core as a deep narrow net.
    #[arg(long)]
    pub verticalize: bool,
    #[arg(long, default_value_t = 1e-3)]
    pub lambda: f64,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// GDN JSON file.
    #[arg(long, conflicts_with = "manifold")]
    pub model: Option<PathBuf>,
    /// CSV of input points, one per row.
    #[arg(long)]
    pub points: Option<PathBuf>,
    #[arg(long)]
    pub manifold: Option<String>,
    /// exp, log or distance.
    #[arg(long)]
    pub op: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<String>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub values: PathBuf,
    #[arg(long)]
    pub domain: String,
    #[arg(long)]
    pub codomain: String,
    #[arg(long, allow_hyphen_values = true)]
    pub base_x: String,
    #[arg(long, allow_hyphen_values = true)]
    pub base_y: String,
    /// JSON list with one list of polynomials per data point.
    #[arg(long)]
    pub candidates: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Fill the wall-time column.
    #[arg(long)]
    pub timing: bool,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub domain: String,
    pub codomain: String,
    pub base_x: Vec<f64>,
    #[serde(default)]
    pub base_y: Option<Vec<f64>>,
    pub target: String,
    pub radius: f64,
    pub eps: Vec<f64>,
    pub activation: String,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_grid() -> usize {
    DEFAULT_AUDIT_POINTS
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub target: String,
    pub eps: String,
    pub measured_error: String,
    pub width: usize,
    pub depth: usize,
    pub param_count: usize,
    pub depth_order: String,
    pub wall_time_s: String,
}

/// Fixed 17-significant-digit scientific format.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn parse_vec(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{t}' in '{s}'"))))
        .collect()
}

/// Rows of comma-separated numbers; `#` starts a comment line.
pub fn read_points(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::Parse(format!("{} line {line}: {e}", path.display()))
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("{} line {line}: bad number '{f}'", path.display())))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse(format!("{} has no data rows", path.display())));
    }
    Ok(rows)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn io_err(e: std::io::Error) -> Error {
    Error::Numeric(format!("output failed: {e}"))
}

fn print_json<T: Serialize>(out: &mut dyn Write, v: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(v).map_err(|e| Error::Numeric(e.to_string()))?;
    writeln!(out, "{s}").map_err(io_err)
}

/// Runs one command, writing its report to `out`; returns the exit code on success.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Estimate(a) => cmd_estimate(&a, out),
        Command::Compile(a) => cmd_compile(&a, out),
        Command::Eval(a) => cmd_eval(&a, out),
        Command::Certify(a) => cmd_certify(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
    }
}

pub fn cmd_estimate(a: &EstimateArgs, out: &mut dyn Write) -> Result<i32> {
    if let Some(n) = a.efficient_n {
        print_json(out, &efficient_complexity(a.p, a.m, n, a.eps)?)?;
        return Ok(0);
    }
    let class = ActivationClass::parse(a.class.as_deref().ok_or_else(|| {
        Error::validation("--class is required unless --efficient-n is given")
    })?)?;
    let delta = a.delta.ok_or_else(|| Error::validation("--delta is required"))?;
    let modulus = match (&a.lip, &a.modulus_file) {
        (Some(l), None) => Modulus::Lipschitz(*l),
        (None, Some(path)) => Modulus::from(read_json::<ModulusEstimate>(path)?),
        _ => return Err(Error::validation("give exactly one of --lip and --modulus-file")),
    };
    let continuous = matches!(class, ActivationClass::ContinuousNonpoly | ActivationClass::PiecewiseLinear);
    if continuous && a.b.is_none() {
        return Err(Error::validation("--B is required for the continuous and piecewise-linear classes"));
    }
    let mut req = EstimateRequest::new(class, a.p, a.m, a.eps, delta, modulus);
    req.kappa1 = a.kappa1;
    req.kappa2 = a.kappa2;
    req.b = a.b;
    if continuous {
        req.activation_modulus = Some(Modulus::Lipschitz(a.activation_lip));
    }
    req.readout_modulus = a.readout_lip.map(Modulus::Lipschitz);
    print_json(out, &depth_estimate(&req)?)?;
    Ok(0)
}

pub fn cmd_compile(a: &CompileArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = CompileConfig {
        domain: a.domain.clone(),
        codomain: a.codomain.clone().unwrap_or_else(|| a.domain.clone()),
        base_x: parse_vec(&a.base_x)?,
        base_y: a.base_y.as_deref().map(parse_vec).transpose()?,
        target: a.target.clone(),
        radius: a.radius,
        eps: a.eps,
        activation: a.activation.clone(),
        audit_points: a.audit_points,
        seed: a.seed,
        verticalize_lambda: a.verticalize.then_some(a.lambda),
    };
    let compiled = compile_gdn(&cfg)?;
    if let Some(path) = &a.out {
        std::fs::write(path, compiled.model.to_json()).map_err(io_err)?;
    }
    print_json(out, &compiled.report)?;
    Ok(if compiled.report.success { 0 } else { 1 })
}

pub fn cmd_eval(a: &EvalArgs, out: &mut dyn Write) -> Result<i32> {
    if let Some(path) = &a.model {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        let model = GdnModel::from_json(&text)?;
        let points = match (&a.points, &a.x) {
            (Some(p), None) => read_points(p)?,
            (None, Some(x)) => vec![parse_vec(x)?],
            _ => return Err(Error::validation("give exactly one of --points and --x")),
        };
        for x in &points {
            let y = model.eval(x)?;
            let row: Vec<String> = y.iter().map(|v| fmt_num(*v)).collect();
            writeln!(out, "{}", row.join(",")).map_err(io_err)?;
        }
        return Ok(0);
    }
    let id = a.manifold.as_deref().ok_or_else(|| Error::validation("give --model or --manifold"))?;
    let spec = resolve_manifold(id)?;
    let x = parse_vec(a.x.as_deref().ok_or_else(|| Error::validation("--x is required"))?)?;
    let y = parse_vec(a.y.as_deref().ok_or_else(|| Error::validation("--y is required"))?)?;
    let values = match a.op.as_deref() {
        Some("exp") => exp_map(&spec, &x, &y)?,
        Some("log") => log_map(&spec, &x, &y)?,
        Some("distance") => vec![distance(&spec, &x, &y)?],
        other => return Err(Error::validation(format!("--op must be exp, log or distance, got {other:?}"))),
    };
    let row: Vec<String> = values.iter().map(|v| fmt_num(*v)).collect();
    writeln!(out, "{}", row.join(",")).map_err(io_err)?;
    Ok(0)
}

pub fn cmd_certify(a: &CertifyArgs, out: &mut dyn Write) -> Result<i32> {
    let domain = resolve_manifold(&a.domain)?;
    let codomain = resolve_manifold(&a.codomain)?;
    let points = read_points(&a.dataset)?;
    let values = read_points(&a.values)?;
    let candidates: Option<Vec<Vec<Polynomial>>> = a.candidates.as_deref().map(read_json).transpose()?;
    let cert = certify_efficient(
        &points,
        &values,
        &domain,
        &codomain,
        &parse_vec(&a.base_x)?,
        &parse_vec(&a.base_y)?,
        candidates.as_deref(),
        a.n,
    )?;
    print_json(out, &cert)?;
    Ok(0)
}

pub fn bench_rows(cfg: &BenchConfig, timing: bool) -> Result<Vec<BenchRow>> {
    if cfg.eps.is_empty() {
        return Err(Error::validation("bench config has no eps values"));
    }
    cfg.eps
        .iter()
        .map(|&eps| {
            let start = Instant::now();
            let compiled = compile_gdn(&CompileConfig {
                domain: cfg.domain.clone(),
                codomain: cfg.codomain.clone(),
                base_x: cfg.base_x.clone(),
                base_y: cfg.base_y.clone(),
                target: cfg.target.clone(),
                radius: cfg.radius,
                eps,
                activation: cfg.activation.clone(),
                audit_points: cfg.grid,
                seed: cfg.seed,
                verticalize_lambda: None,
            })?;
            let r = compiled.report;
            Ok(BenchRow {
                target: cfg.target.clone(),
                eps: fmt_num(eps),
                measured_error: fmt_num(r.measured_error),
                width: r.width,
                depth: r.depth,
                param_count: r.param_count,
                depth_order: r.depth_order.map(fmt_num).unwrap_or_default(),
                wall_time_s: if timing { fmt_num(start.elapsed().as_secs_f64()) } else { String::new() },
            })
        })
        .collect()
}

pub fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg: BenchConfig = read_json(&a.config)?;
    let rows = bench_rows(&cfg, a.timing)?;
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for row in &rows {
            w.serialize(row).map_err(|e| Error::Numeric(e.to_string()))?;
        }
        w.flush().map_err(io_err)?;
    }
    match &a.out {
        Some(path) => std::fs::write(path, &buf).map_err(io_err)?,
        None => out.write_all(&buf).map_err(io_err)?,
    }
    Ok(0)
}

/// Configures the global worker pool from `GDN_THREADS`.
pub fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::validation(format!("{THREADS_ENV} must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Numeric(format!("thread pool: {e}")))
}

/// Exit code for a failed command: 2 for usage and validation, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_usage() {
        2
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_num(-2.0), "-2.0000000000000000e0");
        assert_eq!(parse_vec("1, -2.5").unwrap(), vec![1.0, -2.5]);
        assert!(parse_vec("1,a").is_err());
    }

    #[test]
    fn csv_errors_name_the_line() {
        let dir = std::env::temp_dir().join(format!("gdn-cli-unit-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.csv");
        std::fs::write(&path, "0.1,0.2\n0.3,zz\n").unwrap();
        let e = read_points(&path).unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        assert_eq!(exit_code(&e), 2);
        std::fs::write(&path, "# header\n0.5\n1.0\n").unwrap();
        assert_eq!(read_points(&path).unwrap(), vec![vec![0.5], vec![1.0]]);
    }
}

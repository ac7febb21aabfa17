//! Command-line front end: argument and config-file parsing, dispatch, emission.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand as ClapSubcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::{lookup, REGISTRY};
use crate::harness::{
    convergence_sweep_with, format_value, plot_data, plot_to_csv, run_table_with, sweep_to_csv, table_to_csv,
    Precision, DEFAULT_DOMAIN, DEFAULT_POINTS, DEFAULT_RATES,
};
use crate::kernel::{default_sup_moment, kernel_zeta, sup_moment, KernelProfile, DEFAULT_MOMENT_RESOLUTION};
use crate::sampling::{max_product_apply, SamplingScheme, DEFAULT_QUADRATURE_NODES};
use crate::weighted::{
    op_norm_bound_thm1, op_norm_bound_thm1_stated, rate_bound_thm3, voronovskaja_probe, weight, weighted_norm,
    GridSpec, WeightContext,
};

const HELP_FOOTER: &str = "\
Kernel ids: name:key=value[,key=value...] with lowercase keys and decimal values
  bspline:n=<int>=2..>               centered B-spline of order n
  fejer:beta=<>=1>[,t=<real>]        Mellin-Fejer kernel
  jackson:beta=<>=1>,n=<int>=1..>[,t=<real>]  Mellin-Jackson kernel
Functions: h1 = exp(-z)cos(2 pi z), h2 = ln(1+z), h3 = sin(z)/(1+z^2),
  one, zero, log (ln z), logsq1 (1+ln^2 z), const:<c>
Exit status: 0 ok, 2 configuration, 3 numeric failure, 4 bound inapplicable";

#[derive(Parser, Debug)]
#[command(name = "expsampling", version, about = "Max-product Kantorovich exponential sampling toolkit", after_help = HELP_FOOTER)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(ClapSubcommand, Debug)]
enum Command {
    /// Weighted error table of the max-product operator
    Table(Flags),
    /// Grid supremum of the weighted error per rate
    Sweep(Flags),
    /// Discrete absolute moments of a kernel
    Moments(Flags),
    /// Operator-norm and rate bounds against measured errors
    Bound(Flags),
    /// Voronovskaja expansion probe
    Voronovskaja(Flags),
    /// Kernel catalog with admissibility constants
    Kernels(Flags),
}

#[derive(Args, Debug, Default)]
#[command(after_help = HELP_FOOTER)]
struct Flags {
    /// JSON config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    kernel: Option<String>,
    #[arg(long = "fn")]
    function: Option<String>,
    /// Comma-separated sampling rates
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<f64>>,
    /// Comma-separated evaluation points
    #[arg(long, value_delimiter = ',')]
    z: Option<Vec<f64>>,
    /// Log-uniform grid min:max:count
    #[arg(long = "z-grid")]
    z_grid: Option<String>,
    /// Interval a:b
    #[arg(long)]
    domain: Option<String>,
    /// Gauss-Legendre nodes per cell
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, value_enum)]
    precision: Option<PrecisionArg>,
    /// Comma-separated moment orders (moments)
    #[arg(long, value_delimiter = ',')]
    nu: Option<Vec<f64>>,
    /// Expansion order n (voronovskaja)
    #[arg(long)]
    order: Option<u32>,
    /// Append raw-scale columns (table)
    #[arg(long)]
    raw: bool,
    /// Emit long-format plot data instead of a table (table)
    #[arg(long)]
    plot: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PrecisionArg {
    #[value(name = "paper4dp")]
    Paper4dp,
    Full,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Paper4dp => Precision::Paper4dp,
            PrecisionArg::Full => Precision::Full,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subcommand {
    Table,
    Sweep,
    Moments,
    Bound,
    Voronovskaja,
    Kernels,
}

/// JSON config file. Every key is optional; unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    kernel: Option<String>,
    #[serde(rename = "fn")]
    function: Option<String>,
    m: Option<Vec<f64>>,
    z: Option<Vec<f64>>,
    z_grid: Option<GridSpec>,
    domain: Option<[f64; 2]>,
    nodes: Option<usize>,
    out: Option<PathBuf>,
    format: Option<Format>,
    precision: Option<Precision>,
    nu: Option<Vec<f64>>,
    order: Option<u32>,
    raw: Option<bool>,
    plot: Option<bool>,
}

/// Fully validated run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub kernel_id: Option<String>,
    pub function: Option<String>,
    pub m_list: Vec<f64>,
    pub z_list: Vec<f64>,
    pub z_grid: Option<GridSpec>,
    pub domain: (f64, f64),
    pub quadrature_nodes: usize,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub precision: Precision,
    pub nu_list: Vec<f64>,
    pub order: u32,
    pub raw: bool,
    pub plot: bool,
}

/// Result of argument parsing.
#[derive(Debug, Clone, PartialEq)]
pub enum Parsed {
    Run(Box<RunConfig>),
    /// `--help` or `--version` text, to be printed with exit status 0.
    Info(String),
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("{what} must look like a:b, got '{s}'")))?;
    let a = a.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad {what} start '{a}'")))?;
    let b = b.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad {what} end '{b}'")))?;
    Ok((a, b))
}

fn parse_grid(s: &str) -> Result<GridSpec> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!("--z-grid must look like min:max:count, got '{s}'")));
    }
    let min = parts[0].parse::<f64>().map_err(|_| Error::Config(format!("bad grid min '{}'", parts[0])))?;
    let max = parts[1].parse::<f64>().map_err(|_| Error::Config(format!("bad grid max '{}'", parts[1])))?;
    let count = parts[2].parse::<usize>().map_err(|_| Error::Config(format!("bad grid count '{}'", parts[2])))?;
    GridSpec::new(min, max, count).map_err(|e| Error::Config(e.to_string()))
}

fn validate_kernel(id: &str) -> Result<KernelProfile> {
    KernelProfile::from_id(id).map_err(|e| match e {
        Error::Config(_) => e,
        other => Error::Config(format!("kernel '{id}': {other}")),
    })
}

/// Parses command-line arguments (without the program name) and an optional
/// JSON config. When `config_json` is `None` the file named by `--config`, if
/// any, is read instead.
pub fn parse_config(args: &[String], config_json: Option<&str>) -> Result<Parsed> {
    let argv = std::iter::once("expsampling".to_string()).chain(args.iter().cloned());
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(Parsed::Info(e.render().to_string())),
                _ => Err(Error::Config(e.render().to_string())),
            };
        }
    };
    let (subcommand, flags) = match cli.command {
        Command::Table(f) => (Subcommand::Table, f),
        Command::Sweep(f) => (Subcommand::Sweep, f),
        Command::Moments(f) => (Subcommand::Moments, f),
        Command::Bound(f) => (Subcommand::Bound, f),
        Command::Voronovskaja(f) => (Subcommand::Voronovskaja, f),
        Command::Kernels(f) => (Subcommand::Kernels, f),
    };
    let file_text = match (config_json, &flags.config) {
        (Some(text), _) => Some(text.to_string()),
        (None, Some(path)) => Some(
            std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?,
        ),
        (None, None) => None,
    };
    let file: ConfigFile = match file_text {
        Some(text) => serde_json::from_str(&text).map_err(|e| Error::Config(format!("config file: {e}")))?,
        None => ConfigFile::default(),
    };
    build_config(subcommand, flags, file)
}

fn build_config(subcommand: Subcommand, flags: Flags, file: ConfigFile) -> Result<Parsed> {
    let kernel_id = flags.kernel.or(file.kernel);
    let function = flags.function.or(file.function);
    let m_list = flags.m.or(file.m).unwrap_or_else(|| DEFAULT_RATES.to_vec());
    let z_grid = match flags.z_grid {
        Some(s) => Some(parse_grid(&s)?),
        None => match file.z_grid {
            Some(g) => Some(GridSpec::new(g.min, g.max, g.count).map_err(|e| Error::Config(e.to_string()))?),
            None => None,
        },
    };
    let z_list = flags.z.or(file.z).unwrap_or_else(|| DEFAULT_POINTS.to_vec());
    let domain = match flags.domain {
        Some(s) => parse_pair(&s, "--domain")?,
        None => file.domain.map(|[a, b]| (a, b)).unwrap_or(DEFAULT_DOMAIN),
    };
    let quadrature_nodes = flags.nodes.or(file.nodes).unwrap_or(DEFAULT_QUADRATURE_NODES);
    let output_path = flags.out.or(file.out);
    let format = flags.format.or(file.format).unwrap_or(Format::Csv);
    let precision = flags.precision.map(Precision::from).or(file.precision).unwrap_or(Precision::Full);
    let nu_list = flags.nu.or(file.nu).unwrap_or_else(|| vec![0.0, 1.0, 2.0]);
    let order = flags.order.or(file.order).unwrap_or(1);
    let raw = flags.raw || file.raw.unwrap_or(false);
    let plot = flags.plot || file.plot.unwrap_or(false);

    let needs_kernel = subcommand != Subcommand::Kernels;
    let needs_function = matches!(
        subcommand,
        Subcommand::Table | Subcommand::Sweep | Subcommand::Bound | Subcommand::Voronovskaja
    );
    match &kernel_id {
        Some(id) => {
            validate_kernel(id)?;
        }
        None if needs_kernel => return Err(Error::Config("--kernel is required".into())),
        None => {}
    }
    match &function {
        Some(f) => {
            lookup(f)?;
        }
        None if needs_function => return Err(Error::Config("--fn is required".into())),
        None => {}
    }
    if m_list.is_empty() {
        return Err(Error::Config("--m must list at least one rate".into()));
    }
    if let Some(m) = m_list.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
        return Err(Error::Config(format!("rates must be positive, got {m}")));
    }
    let (a, b) = domain;
    if !(a > 0.0 && a < b && b.is_finite()) {
        return Err(Error::Config(format!("domain needs 0 < a < b, got {a}:{b}")));
    }
    if z_list.is_empty() {
        return Err(Error::Config("--z must list at least one point".into()));
    }
    if let Some(z) = z_list.iter().find(|z| !(**z >= a && **z <= b)) {
        return Err(Error::Config(format!("evaluation point {z} lies outside [{a}, {b}]")));
    }
    if let Some(g) = &z_grid {
        if g.min < a || g.max > b {
            return Err(Error::Config(format!("z grid {}:{} leaves the domain [{a}, {b}]", g.min, g.max)));
        }
    }
    if quadrature_nodes < 2 {
        return Err(Error::Config(format!("--nodes must be at least 2, got {quadrature_nodes}")));
    }
    if nu_list.is_empty() || nu_list.iter().any(|nu| !(*nu >= 0.0 && nu.is_finite())) {
        return Err(Error::Config("--nu needs nonnegative orders".into()));
    }
    if !(1..=3).contains(&order) {
        return Err(Error::Config(format!("--order must be 1..=3, got {order}")));
    }
    if plot && z_grid.is_none() {
        return Err(Error::Config("--plot needs --z-grid".into()));
    }
    for m in &m_list {
        SamplingScheme::compact(*m, a, b, quadrature_nodes).map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(Parsed::Run(Box::new(RunConfig {
        subcommand,
        kernel_id,
        function,
        m_list,
        z_list,
        z_grid,
        domain,
        quadrature_nodes,
        output_path,
        format,
        precision,
        nu_list,
        order,
        raw,
        plot,
    })))
}

/// Run manifest written next to the output file.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub library_version: &'static str,
    pub config: RunConfig,
    pub weight_context: WeightContext,
    pub moment_grid_resolution: usize,
    pub wall_clock_seconds: f64,
    pub timestamp_unix: u64,
}

/// Rendered output of one run.
#[derive(Debug, Clone)]
pub struct Output {
    pub body: String,
    pub manifest: Manifest,
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::NumericFailure(format!("json: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn default_grid(cfg: &RunConfig) -> GridSpec {
    cfg.z_grid.unwrap_or(GridSpec { min: cfg.domain.0, max: cfg.domain.1, count: 257 })
}

#[derive(Serialize)]
struct MomentRow {
    nu: f64,
    value: f64,
    diverged: bool,
    truncation_radius: f64,
    grid_resolution: usize,
}

#[derive(Serialize)]
struct BoundRow {
    m: f64,
    thm1_bound: f64,
    thm1_bound_stated: f64,
    thm3_bound: f64,
    measured_sup_weighted_error: f64,
    weighted_norm_ratio: f64,
}

#[derive(Serialize)]
struct KernelRow {
    id: String,
    support_radius: Option<f64>,
    decay_exponent: Option<f64>,
    zeta: Option<f64>,
    max_abs: f64,
    m0: f64,
    m1: f64,
    m2: f64,
    m5: f64,
}

/// Dispatches a validated configuration and renders its output.
pub fn execute(cfg: &RunConfig) -> Result<Output> {
    let started = Instant::now();
    let ctx = WeightContext::default();
    let p = cfg.precision;
    let body = match cfg.subcommand {
        Subcommand::Table => {
            let k = validate_kernel(cfg.kernel_id.as_deref().unwrap_or_default())?;
            let h = lookup(cfg.function.as_deref().unwrap_or_default())?;
            if cfg.plot {
                let pts = plot_data(&k, &h, &cfg.m_list, cfg.domain, default_grid(cfg), cfg.quadrature_nodes)?;
                match cfg.format {
                    Format::Csv => plot_to_csv(&pts, p),
                    Format::Json => to_json(&pts)?,
                }
            } else {
                let zs = cfg.z_grid.map(|g| g.points()).unwrap_or_else(|| cfg.z_list.clone());
                let mut table = run_table_with(&k, &h, &cfg.m_list, &zs, cfg.domain, cfg.quadrature_nodes)?;
                table.metadata.z_grid = cfg.z_grid;
                match cfg.format {
                    Format::Csv => table_to_csv(&table, p, cfg.raw),
                    Format::Json => to_json(&table)?,
                }
            }
        }
        Subcommand::Sweep => {
            let k = validate_kernel(cfg.kernel_id.as_deref().unwrap_or_default())?;
            let h = lookup(cfg.function.as_deref().unwrap_or_default())?;
            let sweep = convergence_sweep_with(&k, &h, &cfg.m_list, cfg.domain, default_grid(cfg), cfg.quadrature_nodes)?;
            match cfg.format {
                Format::Csv => sweep_to_csv(&sweep, p),
                Format::Json => to_json(&sweep)?,
            }
        }
        Subcommand::Moments => {
            let k = validate_kernel(cfg.kernel_id.as_deref().unwrap_or_default())?;
            let radius = k.default_moment_radius();
            let rows = cfg
                .nu_list
                .iter()
                .map(|&nu| {
                    let e = sup_moment(&k, nu, radius, DEFAULT_MOMENT_RESOLUTION)?;
                    Ok(MomentRow {
                        nu,
                        value: e.value,
                        diverged: e.diverged,
                        truncation_radius: e.truncation_radius,
                        grid_resolution: e.grid_resolution,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            match cfg.format {
                Format::Csv => {
                    let mut s = String::from("nu,value,diverged,truncation_radius,grid_resolution\n");
                    for r in &rows {
                        let v = if r.diverged { "inf".to_string() } else { format_value(r.value, p) };
                        let _ = writeln!(s, "{},{},{},{},{}", r.nu, v, r.diverged, r.truncation_radius, r.grid_resolution);
                    }
                    s
                }
                Format::Json => to_json(&rows)?,
            }
        }
        Subcommand::Bound => {
            let k = validate_kernel(cfg.kernel_id.as_deref().unwrap_or_default())?;
            let h = lookup(cfg.function.as_deref().unwrap_or_default())?;
            let zs = default_grid(cfg).points();
            let h_norm = weighted_norm(&h, &ctx)?;
            let rows = cfg
                .m_list
                .iter()
                .map(|&m| {
                    let thm3_bound = rate_bound_thm3(&h, m, &k, &ctx)?;
                    let s = SamplingScheme::compact(m, cfg.domain.0, cfg.domain.1, cfg.quadrature_nodes)?;
                    let mut err = 0.0f64;
                    let mut norm = 0.0f64;
                    for &z in &zs {
                        let w = weight(z)?;
                        let v = max_product_apply(&k, &h, &s, z)?;
                        err = err.max(w * (v - h.eval(z)).abs());
                        norm = norm.max(w * v.abs());
                    }
                    Ok(BoundRow {
                        m,
                        thm1_bound: op_norm_bound_thm1(m, &k)?,
                        thm1_bound_stated: op_norm_bound_thm1_stated(m, &k)?,
                        thm3_bound,
                        measured_sup_weighted_error: err,
                        weighted_norm_ratio: if h_norm > 0.0 { norm / h_norm } else { 0.0 },
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            match cfg.format {
                Format::Csv => {
                    let mut s = String::from(
                        "m,thm1_bound,thm1_bound_stated,thm3_bound,measured_sup_weighted_error,weighted_norm_ratio\n",
                    );
                    for r in &rows {
                        let _ = writeln!(
                            s,
                            "{},{},{},{},{},{}",
                            r.m,
                            format_value(r.thm1_bound, p),
                            format_value(r.thm1_bound_stated, p),
                            format_value(r.thm3_bound, p),
                            format_value(r.measured_sup_weighted_error, p),
                            format_value(r.weighted_norm_ratio, p)
                        );
                    }
                    s
                }
                Format::Json => to_json(&rows)?,
            }
        }
        Subcommand::Voronovskaja => {
            let k = validate_kernel(cfg.kernel_id.as_deref().unwrap_or_default())?;
            let h = lookup(cfg.function.as_deref().unwrap_or_default())?;
            let mut reports = Vec::new();
            for &m in &cfg.m_list {
                let s = SamplingScheme::compact(m, cfg.domain.0, cfg.domain.1, cfg.quadrature_nodes)?;
                for &z in &cfg.z_list {
                    reports.push(voronovskaja_probe(&h, &k, &s, z, cfg.order, &ctx)?);
                }
            }
            match cfg.format {
                Format::Csv => {
                    let mut s = String::from(
                        "m,z,n,lhs,lhs_a0,correction,correction_full,residual,residual_a0,residual_full,a0,thm4_bound,kappa3_pointwise\n",
                    );
                    for r in &reports {
                        let _ = writeln!(
                            s,
                            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                            r.m,
                            r.z,
                            r.n,
                            format_value(r.lhs, p),
                            format_value(r.lhs_a0, p),
                            format_value(r.correction, p),
                            format_value(r.correction_full, p),
                            format_value(r.residual, p),
                            format_value(r.residual_a0, p),
                            format_value(r.residual_full, p),
                            format_value(r.algebraic_moments[0], p),
                            format_value(r.thm4_bound, p),
                            r.kappa3_pointwise
                        );
                    }
                    s
                }
                Format::Json => to_json(&reports)?,
            }
        }
        Subcommand::Kernels => {
            let ids: Vec<String> = match &cfg.kernel_id {
                Some(id) => vec![id.clone()],
                None => ["bspline:n=3", "fejer:beta=1,t=0", "jackson:beta=1,n=3,t=0"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
            };
            let rows = ids
                .iter()
                .map(|id| {
                    let k = validate_kernel(id)?;
                    let m = |nu: f64| default_sup_moment(&k, nu).map(|e| e.value);
                    Ok(KernelRow {
                        id: k.name().to_string(),
                        support_radius: k.support_radius(),
                        decay_exponent: k.decay_exponent(),
                        zeta: kernel_zeta(&k).ok(),
                        max_abs: k.max_abs(),
                        m0: m(0.0)?,
                        m1: m(1.0)?,
                        m2: m(2.0)?,
                        m5: m(5.0)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            match cfg.format {
                Format::Csv => {
                    let opt = |v: Option<f64>| v.map(|x| format_value(x, p)).unwrap_or_default();
                    let num = |x: f64| if x.is_finite() { format_value(x, p) } else { "inf".into() };
                    let mut s = String::from("id,support_radius,decay_exponent,zeta,max_abs,m0,m1,m2,m5\n");
                    for r in &rows {
                        let _ = writeln!(
                            s,
                            "{},{},{},{},{},{},{},{},{}",
                            csv_field(&r.id),
                            opt(r.support_radius),
                            opt(r.decay_exponent),
                            opt(r.zeta),
                            num(r.max_abs),
                            num(r.m0),
                            num(r.m1),
                            num(r.m2),
                            num(r.m5)
                        );
                    }
                    s
                }
                Format::Json => to_json(&rows)?,
            }
        }
    };
    let timestamp_unix = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Ok(Output {
        body,
        manifest: Manifest {
            library_version: env!("CARGO_PKG_VERSION"),
            config: cfg.clone(),
            weight_context: ctx,
            moment_grid_resolution: DEFAULT_MOMENT_RESOLUTION,
            wall_clock_seconds: started.elapsed().as_secs_f64(),
            timestamp_unix,
        },
    })
}

/// Path of the manifest written next to `out`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Full program: parse, execute, write. Returns the process exit status.
pub fn run(args: &[String]) -> i32 {
    let cfg = match parse_config(args, None) {
        Ok(Parsed::Run(cfg)) => cfg,
        Ok(Parsed::Info(text)) => {
            print!("{text}");
            return 0;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let output = match execute(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match &cfg.output_path {
        Some(path) => {
            let manifest = match to_json(&output.manifest) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: {e}");
                    return e.exit_code();
                }
            };
            if let Err(e) = std::fs::write(path, &output.body)
                .and_then(|_| std::fs::write(manifest_path(path), manifest))
            {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 2;
            }
        }
        None => print!("{}", output.body),
    }
    0
}

/// Registry listing used by `--help`.
pub fn function_registry_help() -> String {
    REGISTRY.iter().map(|(n, d)| format!("{n}: {d}")).collect::<Vec<_>>().join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &[&str]) -> Vec<String> {
        s.iter().map(|x| x.to_string()).collect()
    }

    fn parse(s: &[&str]) -> Result<RunConfig> {
        match parse_config(&args(s), None)? {
            Parsed::Run(c) => Ok(*c),
            Parsed::Info(t) => panic!("unexpected info: {t}"),
        }
    }

    #[test]
    fn table_two_configuration() {
        let c = parse(&["table", "--kernel", "fejer:beta=1,t=0", "--fn", "h2", "--m", "20,50,100", "--z", "0.5,1,2,4,8"]).unwrap();
        assert_eq!(c.subcommand, Subcommand::Table);
        assert_eq!(c.kernel_id.as_deref(), Some("fejer:beta=1,t=0"));
        assert_eq!(c.function.as_deref(), Some("h2"));
        assert_eq!(c.m_list, vec![20.0, 50.0, 100.0]);
        assert_eq!(c.z_list, vec![0.5, 1.0, 2.0, 4.0, 8.0]);
        assert_eq!(c.domain, (0.1, 10.0));
        assert_eq!(c.quadrature_nodes, 8);
    }

    #[test]
    fn usage_errors() {
        let e = parse(&["table", "--kernel", "bspline:n=1"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = parse(&[]).unwrap_err();
        assert!(e.to_string().contains("table") && e.to_string().contains("voronovskaja"));
        assert_eq!(e.exit_code(), 2);
        assert!(parse(&["table", "--kernel", "bspline:n=3", "--fn", "h2", "--bogus"]).is_err());
        assert!(parse(&["table", "--kernel", "bspline:n=3", "--fn", "h2", "--domain", "5:1"]).is_err());
        assert!(parse(&["table", "--kernel", "bspline:n=3", "--fn", "h2", "--m", ""]).is_err());
        assert!(parse(&["table", "--kernel", "bspline:n=3", "--fn", "h2", "--z", "20"]).is_err());
        assert!(parse(&["table", "--kernel", "bspline:n=3"]).is_err());
    }

    #[test]
    fn help_lists_grammar_and_registry() {
        match parse_config(&args(&["--help"]), None).unwrap() {
            Parsed::Info(t) => {
                assert!(t.contains("bspline:n="));
                assert!(t.contains("h3"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn flags_override_file() {
        let json = r#"{"kernel": "bspline:n=3", "fn": "h1", "m": [10], "domain": [0.2, 5]}"#;
        let c = match parse_config(&args(&["table", "--fn", "h2", "--z", "1"]), Some(json)).unwrap() {
            Parsed::Run(c) => *c,
            _ => unreachable!(),
        };
        assert_eq!(c.kernel_id.as_deref(), Some("bspline:n=3"));
        assert_eq!(c.function.as_deref(), Some("h2"));
        assert_eq!(c.m_list, vec![10.0]);
        assert_eq!(c.domain, (0.2, 5.0));
    }

    #[test]
    fn file_unknown_keys_rejected() {
        let json = r#"{"kernel": "bspline:n=3", "colour": 1}"#;
        assert!(parse_config(&args(&["moments"]), Some(json)).is_err());
        let json = r#"{"m": []}"#;
        assert!(parse_config(&args(&["moments", "--kernel", "bspline:n=3"]), Some(json)).is_err());
    }

    #[test]
    fn manifest_path_appends_suffix() {
        assert_eq!(manifest_path(Path::new("/tmp/t2.csv")), PathBuf::from("/tmp/t2.csv.manifest.json"));
    }
}

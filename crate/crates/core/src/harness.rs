//! Error tables, convergence sweeps and plot data for the max-product operator.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functions::{lookup, TestFunction};
use crate::kernel::KernelProfile;
use crate::sampling::{max_product_apply, SamplingScheme, DEFAULT_QUADRATURE_NODES};
use crate::weighted::{weight, GridSpec};

/// Domain used by the reference tables.
pub const DEFAULT_DOMAIN: (f64, f64) = (0.1, 10.0);
pub const DEFAULT_RATES: [f64; 3] = [20.0, 50.0, 100.0];
pub const DEFAULT_POINTS: [f64; 5] = [0.5, 1.0, 2.0, 4.0, 8.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// Values rounded half-to-even to four decimals at emission.
    #[serde(rename = "paper4dp")]
    Paper4dp,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableCell {
    pub m: f64,
    pub approx_raw: f64,
    pub approx_weighted: f64,
    pub error_weighted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub z: f64,
    pub exact_raw: f64,
    pub exact_weighted: f64,
    pub cells: Vec<TableCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableMetadata {
    pub domain_a: f64,
    pub domain_b: f64,
    pub quadrature_nodes: usize,
    pub z_grid: Option<GridSpec>,
    pub timestamp_unix: u64,
}

/// Weighted exact values, approximations and errors per `(z, m)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorTable {
    pub kernel_id: String,
    pub function_name: String,
    pub m_values: Vec<f64>,
    pub rows: Vec<TableRow>,
    pub metadata: TableMetadata,
}

fn now_unix() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn resolve(kernel_id: &str, fn_name: &str) -> Result<(KernelProfile, TestFunction)> {
    let k = KernelProfile::from_id(kernel_id).map_err(|e| match e {
        Error::Config(_) => e,
        other => Error::Config(format!("kernel '{kernel_id}': {other}")),
    })?;
    Ok((k, lookup(fn_name)?))
}

fn check_rates(ms: &[f64]) -> Result<()> {
    if ms.is_empty() {
        return Err(Error::Config("list of sampling rates is empty".into()));
    }
    if let Some(m) = ms.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
        return Err(Error::Config(format!("sampling rate must be positive, got {m}")));
    }
    Ok(())
}

/// Builds an [`ErrorTable`] from catalog ids.
pub fn run_table(kernel_id: &str, fn_name: &str, ms: &[f64], zs: &[f64], domain: (f64, f64)) -> Result<ErrorTable> {
    let (k, h) = resolve(kernel_id, fn_name)?;
    run_table_with(&k, &h, ms, zs, domain, DEFAULT_QUADRATURE_NODES)
}

pub fn run_table_with(
    k: &KernelProfile,
    h: &TestFunction,
    ms: &[f64],
    zs: &[f64],
    domain: (f64, f64),
    nodes: usize,
) -> Result<ErrorTable> {
    check_rates(ms)?;
    let (a, b) = domain;
    let schemes = ms
        .iter()
        .map(|&m| SamplingScheme::compact(m, a, b, nodes))
        .collect::<Result<Vec<_>>>()?;
    let rows = zs
        .par_iter()
        .map(|&z| {
            let w = weight(z)?;
            let exact_raw = h.eval(z);
            let exact_weighted = w * exact_raw;
            let cells = schemes
                .iter()
                .map(|s| {
                    let approx_raw = max_product_apply(k, h, s, z)?;
                    let approx_weighted = w * approx_raw;
                    Ok(TableCell {
                        m: s.m(),
                        approx_raw,
                        approx_weighted,
                        error_weighted: (approx_weighted - exact_weighted).abs(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(TableRow { z, exact_raw, exact_weighted, cells })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorTable {
        kernel_id: k.name().to_string(),
        function_name: h.name().to_string(),
        m_values: ms.to_vec(),
        rows,
        metadata: TableMetadata {
            domain_a: a,
            domain_b: b,
            quadrature_nodes: nodes,
            z_grid: None,
            timestamp_unix: now_unix(),
        },
    })
}

/// Grid supremum of `w(z)·|M_m h(z) − h(z)|` for each rate.
pub fn convergence_sweep(
    kernel_id: &str,
    fn_name: &str,
    ms: &[f64],
    domain: (f64, f64),
    z_grid: GridSpec,
) -> Result<Vec<(f64, f64)>> {
    let (k, h) = resolve(kernel_id, fn_name)?;
    convergence_sweep_with(&k, &h, ms, domain, z_grid, DEFAULT_QUADRATURE_NODES)
}

pub fn convergence_sweep_with(
    k: &KernelProfile,
    h: &TestFunction,
    ms: &[f64],
    domain: (f64, f64),
    z_grid: GridSpec,
    nodes: usize,
) -> Result<Vec<(f64, f64)>> {
    check_rates(ms)?;
    let zs = z_grid.points();
    ms.iter()
        .map(|&m| {
            let s = SamplingScheme::compact(m, domain.0, domain.1, nodes)?;
            let errors = zs
                .par_iter()
                .map(|&z| Ok(weight(z)? * (max_product_apply(k, h, &s, z)? - h.eval(z)).abs()))
                .collect::<Result<Vec<f64>>>()?;
            Ok((m, errors.into_iter().fold(0.0, f64::max)))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlotPoint {
    pub m: f64,
    pub z: f64,
    pub exact: f64,
    pub approx: f64,
}

/// Dense `(z, h(z), M_m h(z))` triples per rate, raw scale.
pub fn plot_data(
    k: &KernelProfile,
    h: &TestFunction,
    ms: &[f64],
    domain: (f64, f64),
    z_grid: GridSpec,
    nodes: usize,
) -> Result<Vec<PlotPoint>> {
    check_rates(ms)?;
    let zs = z_grid.points();
    let mut out = Vec::with_capacity(ms.len() * zs.len());
    for &m in ms {
        let s = SamplingScheme::compact(m, domain.0, domain.1, nodes)?;
        let approx = zs
            .par_iter()
            .map(|&z| max_product_apply(k, h, &s, z))
            .collect::<Result<Vec<_>>>()?;
        out.extend(zs.iter().zip(approx).map(|(&z, a)| PlotPoint { m, z, exact: h.eval(z), approx: a }));
    }
    Ok(out)
}

/// Rounds half-to-even at four decimals.
pub fn round_4dp(x: f64) -> f64 {
    let r = (x * 1e4).round_ties_even() / 1e4;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Formats a value for CSV emission.
pub fn format_value(x: f64, precision: Precision) -> String {
    match precision {
        Precision::Paper4dp => format!("{:.4}", round_4dp(x)),
        Precision::Full => format!("{x}"),
    }
}

/// Evaluation point label: two decimals in 4dp mode when exact, shortest round-trip otherwise.
pub fn format_point(z: f64, precision: Precision) -> String {
    match precision {
        Precision::Paper4dp if (z * 100.0).fract() == 0.0 => format!("{z:.2}"),
        _ => format!("{z}"),
    }
}

/// `20` for integral rates, the shortest round-trip form otherwise.
pub fn rate_label(m: f64) -> String {
    if m.fract() == 0.0 && m.abs() < 1e15 {
        format!("{}", m as i64)
    } else {
        format!("{m}")
    }
}

/// CSV with header `z,exact,approx_m{M},err_m{M},…`; weighted scale, LF line
/// endings. `raw` appends `exact_raw,approx_raw_m{M},…`.
pub fn table_to_csv(table: &ErrorTable, precision: Precision, raw: bool) -> String {
    let mut out = String::from("z,exact");
    for m in &table.m_values {
        let l = rate_label(*m);
        let _ = write!(out, ",approx_m{l},err_m{l}");
    }
    if raw {
        out.push_str(",exact_raw");
        for m in &table.m_values {
            let _ = write!(out, ",approx_raw_m{}", rate_label(*m));
        }
    }
    out.push('\n');
    for row in &table.rows {
        let _ = write!(
            out,
            "{},{}",
            format_point(row.z, precision),
            format_value(row.exact_weighted, precision)
        );
        for c in &row.cells {
            let _ = write!(
                out,
                ",{},{}",
                format_value(c.approx_weighted, precision),
                format_value(c.error_weighted, precision)
            );
        }
        if raw {
            let _ = write!(out, ",{}", format_value(row.exact_raw, precision));
            for c in &row.cells {
                let _ = write!(out, ",{}", format_value(c.approx_raw, precision));
            }
        }
        out.push('\n');
    }
    out
}

pub fn sweep_to_csv(sweep: &[(f64, f64)], precision: Precision) -> String {
    let mut out = String::from("m,sup_weighted_error\n");
    for (m, e) in sweep {
        let _ = writeln!(out, "{},{}", m, format_value(*e, precision));
    }
    out
}

pub fn plot_to_csv(points: &[PlotPoint], precision: Precision) -> String {
    let mut out = String::from("m,z,exact,approx\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            p.m,
            p.z,
            format_value(p.exact, precision),
            format_value(p.approx, precision)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_half_to_even() {
        assert_eq!(round_4dp(0.00485), 0.0048);
        assert_eq!(round_4dp(0.00495), 0.005);
        assert_eq!(round_4dp(0.12344), 0.1234);
        assert_eq!(round_4dp(-0.00001), 0.0);
        assert_eq!(format_value(-0.00001, Precision::Paper4dp), "0.0000");
        assert_eq!(format_value(0.25, Precision::Full), "0.25");
    }

    #[test]
    fn rate_labels() {
        assert_eq!(rate_label(20.0), "20");
        assert_eq!(rate_label(2.5), "2.5");
    }

    #[test]
    fn constant_function_has_zero_error() {
        for id in ["bspline:n=3", "fejer:beta=1,t=0", "jackson:beta=1,n=3,t=0"] {
            let t = run_table(id, "one", &DEFAULT_RATES, &DEFAULT_POINTS, DEFAULT_DOMAIN).unwrap();
            for row in &t.rows {
                for c in &row.cells {
                    assert!(c.error_weighted <= 1e-12, "{id}");
                }
            }
        }
    }

    #[test]
    fn unresolvable_ids_are_config_errors() {
        assert!(matches!(run_table("bogus:n=1", "h2", &[20.0], &[1.0], DEFAULT_DOMAIN), Err(Error::Config(_))));
        assert!(matches!(run_table("bspline:n=1", "h2", &[20.0], &[1.0], DEFAULT_DOMAIN), Err(Error::Config(_))));
        assert!(matches!(run_table("bspline:n=3", "nope", &[20.0], &[1.0], DEFAULT_DOMAIN), Err(Error::Config(_))));
        assert!(matches!(run_table("bspline:n=3", "h2", &[], &[1.0], DEFAULT_DOMAIN), Err(Error::Config(_))));
    }

    #[test]
    fn csv_layout() {
        let t = run_table("bspline:n=3", "h2", &[20.0, 50.0], &[1.0, 2.0], DEFAULT_DOMAIN).unwrap();
        let csv = table_to_csv(&t, Precision::Paper4dp, false);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "z,exact,approx_m20,err_m20,approx_m50,err_m50");
        assert!(lines.next().unwrap().starts_with("1.00,0.6931,"));
        assert!(!csv.contains('\r'));
        let raw = table_to_csv(&t, Precision::Full, true);
        assert!(raw.lines().next().unwrap().ends_with(",exact_raw,approx_raw_m20,approx_raw_m50"));
    }

    #[test]
    fn sweep_of_constant_is_zero() {
        let g = GridSpec::new(0.2, 8.0, 33).unwrap();
        for (_, e) in convergence_sweep("fejer:beta=1,t=0", "const:2", &[20.0, 50.0], DEFAULT_DOMAIN, g).unwrap() {
            assert!(e <= 1e-12);
        }
    }
}

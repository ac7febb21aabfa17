//! Exponential sampling operators: the classical formula, the generalized and
//! Kantorovich series, and the max-product Kantorovich operator.

use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functions::TestFunction;
use crate::kernel::{required_truncation_radius, sinc, tail_remainder, KernelProfile};
use crate::quadrature::GaussLegendre;

pub const DEFAULT_QUADRATURE_NODES: usize = 8;
pub const DEFAULT_TRUNCATION_RADIUS: f64 = 64.0;
/// Relative size of the discarded kernel tail accepted for whole-line windows.
pub const TRUNCATION_REL_TOL: f64 = 1e-12;
pub const DEFAULT_CLASSICAL_WINDOW: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Compact { a: f64, b: f64 },
    WholeLine,
}

/// Rate, domain, truncation and quadrature settings for one operator family member.
#[derive(Debug, Clone)]
pub struct SamplingScheme {
    m: f64,
    domain: Domain,
    truncation_radius: f64,
    rule: GaussLegendre,
}

impl SamplingScheme {
    /// Scheme on `[a, b]` with the exact index set. Fails when the index set is empty.
    pub fn compact(m: f64, a: f64, b: f64, quadrature_nodes: usize) -> Result<Self> {
        check_rate(m)?;
        index_set(m, a, b)?;
        Ok(Self {
            m,
            domain: Domain::Compact { a, b },
            truncation_radius: DEFAULT_TRUNCATION_RADIUS,
            rule: make_rule(quadrature_nodes)?,
        })
    }

    /// Whole-line scheme with window `|j − m ln z| ≤ radius`. The radius must
    /// leave a kernel tail of at most `1e−12·max|φ|`.
    pub fn whole_line(k: &KernelProfile, m: f64, radius: f64, quadrature_nodes: usize) -> Result<Self> {
        check_rate(m)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("truncation radius must be positive, got {radius}")));
        }
        let tail = tail_remainder(k, m, radius / m)?;
        if tail > TRUNCATION_REL_TOL * k.max_abs() {
            return Err(Error::InvalidParameter(format!(
                "truncation radius {radius} leaves a kernel tail of {tail:e} for {}",
                k.name()
            )));
        }
        Ok(Self {
            m,
            domain: Domain::WholeLine,
            truncation_radius: radius,
            rule: make_rule(quadrature_nodes)?,
        })
    }

    /// Whole-line scheme with the smallest admissible radius for `k`.
    pub fn whole_line_auto(k: &KernelProfile, m: f64, quadrature_nodes: usize) -> Result<Self> {
        let radius = required_truncation_radius(k, TRUNCATION_REL_TOL)?;
        Self::whole_line(k, m, radius, quadrature_nodes)
    }

    /// Overrides the truncation radius without validation. It has no effect on
    /// compact schemes.
    pub fn with_truncation_radius(mut self, radius: f64) -> Self {
        self.truncation_radius = radius;
        self
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn truncation_radius(&self) -> f64 {
        self.truncation_radius
    }

    pub fn quadrature_nodes(&self) -> usize {
        self.rule.len()
    }

    /// Same settings at a different rate.
    pub fn with_rate(&self, m: f64) -> Result<Self> {
        check_rate(m)?;
        if let Domain::Compact { a, b } = self.domain {
            index_set(m, a, b)?;
        }
        Ok(Self { m, ..self.clone() })
    }

    /// Indices contributing at `z`.
    pub fn window(&self, z: f64) -> Result<RangeInclusive<i64>> {
        check_point(z)?;
        match self.domain {
            Domain::Compact { a, b } => {
                if z < a || z > b {
                    return Err(Error::Domain(format!("z = {z} lies outside [{a}, {b}]")));
                }
                index_set(self.m, a, b)
            }
            Domain::WholeLine => {
                let center = self.m * z.ln();
                let lo = (center - self.truncation_radius).ceil() as i64;
                let hi = (center + self.truncation_radius).floor() as i64;
                Ok(lo..=hi)
            }
        }
    }

    /// `m·∫_{j/m}^{(j+1)/m} h(e^v) dv` with this scheme's rule.
    pub fn cell_average(&self, h: &TestFunction, j: i64) -> Result<f64> {
        cell_average_with(&self.rule, h, j, self.m)
    }
}

fn check_rate(m: f64) -> Result<()> {
    if m > 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("sampling rate must be positive, got {m}")))
    }
}

fn check_point(z: f64) -> Result<()> {
    if z > 0.0 && z.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("z must be positive, got {z}")))
    }
}

fn make_rule(nodes: usize) -> Result<GaussLegendre> {
    if nodes < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 quadrature nodes, got {nodes}")));
    }
    GaussLegendre::new(nodes)
}

/// `{⌈m ln a⌉, …, ⌊m ln b⌋ − 1}`.
pub fn index_set(m: f64, a: f64, b: f64) -> Result<RangeInclusive<i64>> {
    if !(a > 0.0 && a < b && b.is_finite()) {
        return Err(Error::Domain(format!("need 0 < a < b, got a = {a}, b = {b}")));
    }
    let lo = (m * a.ln()).ceil() as i64;
    let hi = (m * b.ln()).floor() as i64 - 1;
    if hi < lo {
        return Err(Error::DegenerateInterval { m, a, b });
    }
    Ok(lo..=hi)
}

/// Cell average `m·∫_{j/m}^{(j+1)/m} h(e^v) dv` by `nodes`-point Gauss–Legendre.
pub fn cell_average(h: &TestFunction, j: i64, m: f64, nodes: usize) -> Result<f64> {
    check_rate(m)?;
    cell_average_with(&make_rule(nodes)?, h, j, m)
}

fn cell_average_with(rule: &GaussLegendre, h: &TestFunction, j: i64, m: f64) -> Result<f64> {
    if let Some(c) = h.constant_value() {
        return Ok(c);
    }
    let lo = j as f64 / m;
    let half = 0.5 / m;
    let mid = lo + half;
    let mut acc = 0.0;
    for (x, w) in rule.nodes().iter().zip(rule.weights()) {
        acc += w * h.eval((mid + half * x).exp());
    }
    // m · (half · Σ wᵢ fᵢ) = Σ wᵢ fᵢ / 2
    let avg = 0.5 * acc;
    if avg.is_finite() {
        Ok(avg)
    } else {
        Err(Error::NumericFailure(format!(
            "non-finite cell average of {} at j = {j}, m = {m}",
            h.name()
        )))
    }
}

/// Numerator and denominator suprema of the max-product operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxProductParts {
    pub numerator: f64,
    pub denominator: f64,
    /// `⋁_j (φ_j / denominator)·avg_j`, equal to `numerator / denominator`
    /// and exact on constants.
    pub ratio: f64,
}

impl MaxProductParts {
    pub fn value(&self) -> f64 {
        self.ratio
    }
}

pub fn max_product_parts(k: &KernelProfile, h: &TestFunction, s: &SamplingScheme, z: f64) -> Result<MaxProductParts> {
    let window = s.window(z)?;
    let x = s.m * z.ln();
    let den = window.clone().map(|j| k.eval(x - j as f64)).fold(f64::NEG_INFINITY, f64::max);
    if !(den > 0.0) {
        return Err(Error::KernelInadmissible(format!(
            "kernel {} vanishes on every index at z = {z}, m = {}",
            k.name(),
            s.m
        )));
    }
    let mut num = f64::NEG_INFINITY;
    let mut ratio = f64::NEG_INFINITY;
    for j in window {
        let p = k.eval(x - j as f64);
        let c = s.cell_average(h, j)?;
        num = num.max(p * c);
        ratio = ratio.max(p / den * c);
    }
    Ok(MaxProductParts { numerator: num, denominator: den, ratio })
}

/// Max-product Kantorovich exponential sampling operator
/// `⋁_j φ(m ln z − j)·avg_j(h) / ⋁_j φ(m ln z − j)`.
pub fn max_product_apply(k: &KernelProfile, h: &TestFunction, s: &SamplingScheme, z: f64) -> Result<f64> {
    max_product_parts(k, h, s, z).map(|p| p.value())
}

/// Kantorovich exponential sampling series `Σ_j φ(m ln z − j)·avg_j(h)`.
pub fn linear_kantorovich_apply(k: &KernelProfile, h: &TestFunction, s: &SamplingScheme, z: f64) -> Result<f64> {
    let window = s.window(z)?;
    let x = s.m * z.ln();
    let mut acc = 0.0;
    for j in window {
        let p = k.eval(x - j as f64);
        if p != 0.0 {
            acc += p * s.cell_average(h, j)?;
        }
    }
    Ok(acc)
}

/// Generalized exponential sampling series `Σ_j φ(m ln z − j)·h(e^{j/m})`.
pub fn generalized_apply(k: &KernelProfile, h: &TestFunction, s: &SamplingScheme, z: f64) -> Result<f64> {
    let window = s.window(z)?;
    let x = s.m * z.ln();
    let mut acc = 0.0;
    for j in window {
        let p = k.eval(x - j as f64);
        if p != 0.0 {
            let v = h.eval((j as f64 / s.m).exp());
            if !v.is_finite() {
                return Err(Error::NumericFailure(format!(
                    "non-finite sample of {} at j = {j}, m = {}",
                    h.name(),
                    s.m
                )));
            }
            acc += p * v;
        }
    }
    Ok(acc)
}

/// `lin_l(z) = z^{−l}·sinc(ln z)`, equal to 1 at `z = 1`.
pub fn lin_kernel(l: f64, z: f64) -> f64 {
    lin_kernel_log(l, z.ln())
}

fn lin_kernel_log(l: f64, log_z: f64) -> f64 {
    (-l * log_z).exp() * sinc(log_z)
}

/// Classical exponential sampling formula
/// `Σ_j lin_{l/P}(e^{−j} z^P)·h(e^{j/P})`, truncated to `|j − P ln z| ≤ window`.
///
/// `samples(j)` must return `h(e^{j/P})`.
pub fn classical_exp_sampling<F>(l: f64, p: f64, samples: F, z: f64, window: usize) -> Result<f64>
where
    F: Fn(i64) -> f64,
{
    check_point(z)?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("P must be positive, got {p}")));
    }
    if window < 1 {
        return Err(Error::InvalidParameter("window must be at least 1".into()));
    }
    let x = p * z.ln();
    // Nodes, up to rounding in P·ln z: the kernel is 1 there and 0 at every other integer.
    let nearest = x.round();
    if (x - nearest).abs() <= 8.0 * f64::EPSILON * x.abs().max(1.0) {
        return Ok(samples(nearest as i64));
    }
    let w = window as f64;
    let lo = (x - w).ceil() as i64;
    let hi = (x + w).floor() as i64;
    let order = l / p;
    let mut acc = 0.0;
    for j in lo..=hi {
        acc += lin_kernel_log(order, x - j as f64) * samples(j);
    }
    Ok(acc)
}

/// Evaluates the max-product operator at every point, in parallel, preserving order.
pub fn max_product_grid(k: &KernelProfile, h: &TestFunction, s: &SamplingScheme, zs: &[f64]) -> Result<Vec<f64>> {
    zs.par_iter().map(|&z| max_product_apply(k, h, s, z)).collect()
}

//! Weighted analysis: the logarithmic weight, weighted norms, the weighted
//! logarithmic modulus of continuity, the operator-norm and rate bounds, Mellin
//! derivatives and the Voronovskaja probe.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::TestFunction;
use crate::kernel::{algebraic_sup_moment_log, default_sup_moment, kernel_zeta, KernelProfile, MomentEstimate};
use crate::sampling::{max_product_parts, SamplingScheme};

/// Log-uniform grid `min … max` with `count` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min > 0.0 && min <= max && max.is_finite()) || count == 0 || (count == 1 && min != max) {
            return Err(Error::InvalidParameter(format!(
                "grid needs 0 < min <= max and count >= 1 (count >= 2 when min < max), got {min}:{max}:{count}"
            )));
        }
        Ok(Self { min, max, count })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let (lo, hi) = (self.min.ln(), self.max.ln());
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| match i {
                0 => self.min,
                i if i == self.count - 1 => self.max,
                i => (lo + (hi - lo) * i as f64 / last).exp(),
            })
            .collect()
    }
}

pub const DEFAULT_U_POINTS: usize = 129;

/// Evaluation grids for weighted suprema.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightContext {
    pub eval_grid: GridSpec,
    /// Points of the symmetric `ln u` grid used by the modulus of continuity.
    pub u_points: usize,
}

impl Default for WeightContext {
    fn default() -> Self {
        Self { eval_grid: GridSpec { min: 1e-3, max: 1e3, count: 2049 }, u_points: DEFAULT_U_POINTS }
    }
}

impl WeightContext {
    pub fn new(eval_grid: GridSpec, u_points: usize) -> Result<Self> {
        if u_points < 3 || u_points.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "u grid needs an odd point count of at least 3, got {u_points}"
            )));
        }
        Ok(Self { eval_grid, u_points })
    }

    /// Same grids with twice as many points, each old point kept.
    pub fn refined(&self) -> Self {
        Self {
            eval_grid: GridSpec { count: 2 * self.eval_grid.count - 1, ..self.eval_grid },
            u_points: 2 * self.u_points - 1,
        }
    }

    pub fn weight(&self, z: f64) -> Result<f64> {
        weight(z)
    }

    pub fn inverse_weight(&self, z: f64) -> Result<f64> {
        inverse_weight(z)
    }
}

/// `w(z) = 1/(1 + ln²z)`.
pub fn weight(z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("weight needs z > 0, got {z}")));
    }
    let l = z.ln();
    Ok(1.0 / (1.0 + l * l))
}

/// `Φ(z) = 1/w(z) = 1 + ln²z`.
pub fn inverse_weight(z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("inverse weight needs z > 0, got {z}")));
    }
    let l = z.ln();
    Ok(1.0 + l * l)
}

/// Grid supremum of `w(z)·|h(z)|`; a lower bound of `‖h‖_w`.
pub fn weighted_norm(h: &TestFunction, ctx: &WeightContext) -> Result<f64> {
    let mut sup = 0.0f64;
    for z in ctx.eval_grid.points() {
        let v = h.eval(z);
        if !v.is_finite() {
            return Err(Error::NumericFailure(format!("{} is not finite at z = {z}", h.name())));
        }
        sup = sup.max(weight(z)? * v.abs());
    }
    Ok(sup)
}

/// Grid estimate of the weighted logarithmic modulus of continuity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModulusEstimate {
    pub rho: f64,
    pub value: f64,
    pub z_grid_size: usize,
    pub u_grid_size: usize,
}

/// `Υ(h, ρ) = sup_{|ln u| ≤ ρ, z > 0} |h(uz) − h(z)| / ((1 + ln²z)(1 + ln²u))`
/// on the context's `z` grid and a symmetric `ln u` grid over `[−ρ, ρ]`.
pub fn log_modulus(h: &TestFunction, rho: f64, ctx: &WeightContext) -> Result<ModulusEstimate> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
    }
    let zs = ctx.eval_grid.points();
    let half = (ctx.u_points - 1) / 2;
    let log_us: Vec<f64> = (1..=half).flat_map(|i| {
        let t = rho * i as f64 / half as f64;
        [t, -t]
    }).collect();
    let mut sup = 0.0f64;
    for &z in &zs {
        let lz = z.ln();
        let hz = h.eval(z);
        let wz = 1.0 + lz * lz;
        for &lu in &log_us {
            let d = (h.eval((lz + lu).exp()) - hz).abs();
            let v = d / (wz * (1.0 + lu * lu));
            if v.is_nan() {
                return Err(Error::NumericFailure(format!(
                    "modulus of {} is not finite near z = {z}",
                    h.name()
                )));
            }
            sup = sup.max(v);
        }
    }
    Ok(ModulusEstimate { rho, value: sup, z_grid_size: zs.len(), u_grid_size: ctx.u_points })
}

fn finite_moment(k: &KernelProfile, nu: f64) -> Result<MomentEstimate> {
    let est = default_sup_moment(k, nu)?;
    if est.diverged {
        return Err(Error::BoundInapplicable(format!(
            "moment m_{nu} of {} diverges",
            k.name()
        )));
    }
    Ok(est)
}

/// Rate bound `(256·Υ(h, 1/m)/ζ)·(m₀ + 4·m₅)` on `‖M_m h − h‖_w`.
pub fn rate_bound_thm3(h: &TestFunction, m: f64, k: &KernelProfile, ctx: &WeightContext) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::InvalidParameter(format!("m must be positive, got {m}")));
    }
    let m5 = finite_moment(k, 5.0)?.value;
    let m0 = finite_moment(k, 0.0)?.value;
    let zeta = kernel_zeta(k)?;
    let upsilon = log_modulus(h, 1.0 / m, ctx)?.value;
    Ok(256.0 * upsilon / zeta * (m0 + 4.0 * m5))
}

fn op_norm_bracket(m: f64, k: &KernelProfile) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::InvalidParameter(format!("m must be positive, got {m}")));
    }
    let m2 = finite_moment(k, 2.0)?.value;
    let m1 = finite_moment(k, 1.0)?.value;
    let m0 = finite_moment(k, 0.0)?.value;
    let inv = 1.0 / m;
    Ok(m0 * (1.0 + inv + inv * inv / 3.0) + (inv + inv * inv) * m1 + inv * inv * m2)
}

/// Operator-norm bound on the weighted space with prefactor `1/ζ`.
pub fn op_norm_bound_thm1(m: f64, k: &KernelProfile) -> Result<f64> {
    Ok(op_norm_bracket(m, k)? / kernel_zeta(k)?)
}

/// Same bracket with the `1/ζ²` prefactor as originally stated.
pub fn op_norm_bound_thm1_stated(m: f64, k: &KernelProfile) -> Result<f64> {
    let zeta = kernel_zeta(k)?;
    Ok(op_norm_bracket(m, k)? / (zeta * zeta))
}

/// Steps in `ln z` for the finite-difference Mellin derivatives of order 1, 2, 3.
pub const MELLIN_FD_STEPS: [f64; 3] = [1e-4, 1e-3, 1e-2];

/// `θ^r h(z)` with `θh(z) = z·h′(z)`, `1 ≤ r ≤ 3`. Uses the closed form when
/// the function carries one.
pub fn mellin_derivative(h: &TestFunction, r: usize, z: f64) -> Result<f64> {
    if let Some(d) = h.analytic_mellin_derivative(r) {
        if !(z > 0.0) {
            return Err(Error::Domain(format!("z must be positive, got {z}")));
        }
        return Ok(d(z));
    }
    mellin_derivative_fd(h, r, z)
}

/// Central differences in `t = ln z` with one Richardson step (δ and δ/2).
pub fn mellin_derivative_fd(h: &TestFunction, r: usize, z: f64) -> Result<f64> {
    if !(1..=3).contains(&r) {
        return Err(Error::InvalidParameter(format!("Mellin derivative order must be 1..=3, got {r}")));
    }
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::Domain(format!("z must be positive, got {z}")));
    }
    let t = z.ln();
    let g = |s: f64| h.eval((t + s).exp());
    let diff = |d: f64| match r {
        1 => (g(d) - g(-d)) / (2.0 * d),
        2 => (g(d) - 2.0 * g(0.0) + g(-d)) / (d * d),
        _ => (g(2.0 * d) - 2.0 * g(d) + 2.0 * g(-d) - g(-2.0 * d)) / (2.0 * d * d * d),
    };
    let step = MELLIN_FD_STEPS[r - 1];
    let coarse = diff(step);
    let fine = diff(0.5 * step);
    let value = (4.0 * fine - coarse) / 3.0;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NumericFailure(format!(
            "difference quotient of order {r} for {} is not finite at z = {z}",
            h.name()
        )))
    }
}

/// `θ^r h` as a standalone function (closed form when available).
pub fn mellin_derivative_fn(h: &TestFunction, r: usize) -> Result<TestFunction> {
    if !(1..=3).contains(&r) {
        return Err(Error::InvalidParameter(format!("Mellin derivative order must be 1..=3, got {r}")));
    }
    let name = format!("theta^{r} {}", h.name());
    if let Some(d) = h.analytic_mellin_derivative(r) {
        let d = d.clone();
        return Ok(TestFunction::new(name, move |z| d(z)));
    }
    let inner = h.clone();
    Ok(TestFunction::new(name, move |z| {
        mellin_derivative_fd(&inner, r, z).unwrap_or(f64::NAN)
    }))
}

/// Output of the Voronovskaja probe at one `(m, z)`.
///
/// `𝒜_l` is evaluated at `s = z^m` rather than assumed constant, so every
/// report has `kappa3_pointwise = true`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoronovskajaReport {
    pub m: f64,
    pub z: f64,
    pub n: u32,
    /// `m·(M(h,z) − h(z))` with the operator's own denominator.
    pub lhs: f64,
    /// Same with the denominator replaced by `𝒜₀(κ, z^m)`.
    pub lhs_a0: f64,
    /// Expansion term with the inner sum over `l = 1..=r`.
    pub correction: f64,
    /// Expansion term with the inner sum over `l = 0..=r` (cell-offset term kept).
    pub correction_full: f64,
    pub residual: f64,
    pub residual_a0: f64,
    pub residual_full: f64,
    /// `𝒜_0 … 𝒜_n` at `s = z^m`.
    pub algebraic_moments: Vec<f64>,
    pub thm4_bound: f64,
    pub kappa3_pointwise: bool,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Compares `m·(M_m h(z) − h(z))` with the moment expansion of order `n` and
/// evaluates the quantitative remainder bound.
pub fn voronovskaja_probe(
    h: &TestFunction,
    k: &KernelProfile,
    scheme: &SamplingScheme,
    z: f64,
    n: u32,
    ctx: &WeightContext,
) -> Result<VoronovskajaReport> {
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidParameter(format!("expansion order must be 1..=3, got {n}")));
    }
    let m = scheme.m();
    let m0 = finite_moment(k, 0.0)?.value;
    let mn = finite_moment(k, f64::from(n))?.value;
    let mn5 = finite_moment(k, f64::from(n + 5))?.value;

    let parts = max_product_parts(k, h, scheme, z)?;
    let hz = h.eval(z);
    let log_s = m * z.ln();
    let radius = k.default_moment_radius();
    let moments = (0..=n)
        .map(|l| algebraic_sup_moment_log(k, l, log_s, radius))
        .collect::<Result<Vec<_>>>()?;
    let a0 = moments[0];
    if !(a0 > 0.0) {
        return Err(Error::KernelInadmissible(format!(
            "algebraic moment of order 0 vanishes at z = {z}, m = {m}"
        )));
    }

    let mut correction = 0.0;
    let mut correction_full = 0.0;
    for r in 1..=n {
        let theta = mellin_derivative(h, r as usize, z)?;
        let pre = theta / (factorial(r) * m.powi(r as i32 - 1));
        let inner: f64 = (1..=r)
            .map(|l| binomial(r, l) * moments[l as usize] / f64::from(r - l + 1))
            .sum();
        let offset = moments[0] / f64::from(r + 1);
        correction += pre * inner;
        correction_full += pre * (inner + offset);
    }
    correction /= a0;
    correction_full /= a0;

    let lhs = m * (parts.value() - hz);
    let lhs_a0 = m * (parts.numerator / a0 - hz);

    let theta_n = mellin_derivative_fn(h, n as usize)?;
    let upsilon = log_modulus(&theta_n, 1.0 / m, ctx)?.value;
    let lz = z.ln();
    let thm4_bound = 2f64.powi(n as i32 + 5) / (a0 * m.powi(n as i32 - 1) * factorial(n))
        * (1.0 + lz * lz)
        * upsilon
        * (m0 / f64::from(n + 1) + 32.0 * m0 / f64::from(n + 6) + mn + 32.0 * mn5);

    Ok(VoronovskajaReport {
        m,
        z,
        n,
        lhs,
        lhs_a0,
        correction,
        correction_full,
        residual: (lhs - correction).abs(),
        residual_a0: (lhs_a0 - correction).abs(),
        residual_full: (lhs - correction_full).abs(),
        algebraic_moments: moments,
        thm4_bound,
        kappa3_pointwise: true,
    })
}

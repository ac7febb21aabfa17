//! Kernel profiles in the logarithmic domain and their admissibility constants.
//!
//! A Mellin kernel `κ` on the positive half-line is stored through its profile
//! `φ(x) = κ(e^x)`, so `κ(e^{-j} z^m)` is evaluated as `φ(m·ln z − j)`. This keeps
//! large shifts `j` away from overflow and makes the discrete moments
//! one-dimensional suprema.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_integrate, GaussLegendre};

/// Shared, thread-safe profile function `x ↦ φ(x)`.
pub type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Grid size used for the infimum over `[0, 1]`.
pub const ZETA_GRID_POINTS: usize = 4097;
/// Values of the infimum at or below this are treated as zero.
pub const ZETA_TOLERANCE: f64 = 1e-10;
/// Grid density (points per unit length) used when a caller does not choose one.
pub const DEFAULT_MOMENT_RESOLUTION: usize = 256;

/// How the profile behaves away from the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extent {
    /// `φ(x) = 0` for `|x| > radius`.
    Compact { radius: f64 },
    /// `|φ(x)| ≤ C·|x|^(−exponent)` for large `|x|`.
    Decaying { exponent: f64 },
    /// No power-law decay on at least one side (an exponential tilt `e^{−t x}`, `t ≠ 0`).
    Unbounded,
}

/// Kernel-specific parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelParams {
    BSpline { order: u32 },
    Fejer { beta: f64, t: f64 },
    Jackson { beta: f64, n: u32, t: f64, normalization: f64 },
    Custom,
}

#[derive(Clone)]
pub struct KernelProfile {
    name: String,
    profile: ProfileFn,
    extent: Extent,
    params: KernelParams,
    zeta: Option<f64>,
    max_abs: f64,
}

impl fmt::Debug for KernelProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelProfile")
            .field("name", &self.name)
            .field("extent", &self.extent)
            .field("params", &self.params)
            .field("zeta", &self.zeta)
            .field("max_abs", &self.max_abs)
            .finish()
    }
}

impl KernelProfile {
    /// Wraps an arbitrary profile. `zeta` and the peak value are computed here
    /// and stay fixed for the lifetime of the profile.
    pub fn custom<F>(name: impl Into<String>, profile: F, extent: Extent) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::build(name.into(), Arc::new(profile), extent, KernelParams::Custom)
    }

    fn build(name: String, profile: ProfileFn, extent: Extent, params: KernelParams) -> Result<Self> {
        match extent {
            Extent::Compact { radius } if !(radius >= 0.0 && radius.is_finite()) => {
                return Err(Error::InvalidParameter(format!(
                    "support radius must be a finite nonnegative number, got {radius}"
                )))
            }
            Extent::Decaying { exponent } if !(exponent > 0.0) => {
                return Err(Error::InvalidParameter(format!(
                    "decay exponent must be positive, got {exponent}"
                )))
            }
            _ => {}
        }
        let zeta = compute_zeta(profile.as_ref());
        let max_abs = compute_max_abs(profile.as_ref(), extent);
        Ok(Self { name, profile, extent, params, zeta, max_abs })
    }

    /// Evaluates `φ(x)`.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.profile)(x)
    }

    /// Evaluates the Mellin kernel `κ(u) = φ(ln u)` for `u > 0`.
    pub fn eval_mellin(&self, u: f64) -> f64 {
        self.eval(u.ln())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> KernelParams {
        self.params
    }

    pub fn extent(&self) -> Extent {
        self.extent
    }

    pub fn support_radius(&self) -> Option<f64> {
        match self.extent {
            Extent::Compact { radius } => Some(radius),
            _ => None,
        }
    }

    pub fn decay_exponent(&self) -> Option<f64> {
        match self.extent {
            Extent::Decaying { exponent } => Some(exponent),
            _ => None,
        }
    }

    /// Grid estimate of `max |φ|`, fixed at construction.
    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    /// Radius used for moment searches when the caller has no preference.
    pub fn default_moment_radius(&self) -> f64 {
        match self.extent {
            Extent::Compact { radius } => radius.max(1.0),
            _ => 256.0,
        }
    }

    /// Returns a copy with the profile multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {c}")));
        }
        let inner = self.profile.clone();
        Self::build(
            format!("{}*{}", self.name, c),
            Arc::new(move |x| c * inner(x)),
            self.extent,
            self.params,
        )
    }

    /// Parses a catalog id such as `bspline:n=3`, `fejer:beta=1,t=0` or
    /// `jackson:beta=1,n=3,t=0`. `t` defaults to 0 when omitted.
    pub fn from_id(id: &str) -> Result<Self> {
        let spec = KernelId::parse(id)?;
        spec.build()
    }
}

/// Parsed form of a kernel catalog id.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelId {
    BSpline { n: u32 },
    Fejer { beta: f64, t: f64 },
    Jackson { beta: f64, n: u32, t: f64 },
}

impl KernelId {
    pub fn parse(id: &str) -> Result<Self> {
        let bad = |msg: String| Error::Config(format!("malformed kernel id '{id}': {msg}"));
        let (name, rest) = id.split_once(':').ok_or_else(|| bad("expected name:key=value,...".into()))?;
        let mut pairs: Vec<(&str, f64)> = Vec::new();
        for item in rest.split(',') {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got '{item}'")))?;
            if key.is_empty() || key.chars().any(|c| !c.is_ascii_lowercase()) {
                return Err(bad(format!("keys must be lowercase letters, got '{key}'")));
            }
            if pairs.iter().any(|(k, _)| *k == key) {
                return Err(bad(format!("duplicate key '{key}'")));
            }
            let value: f64 = value
                .parse()
                .map_err(|_| bad(format!("value for '{key}' is not a decimal number")))?;
            if !value.is_finite() {
                return Err(bad(format!("value for '{key}' is not finite")));
            }
            pairs.push((key, value));
        }
        let allowed: &[&str] = match name {
            "bspline" => &["n"],
            "fejer" => &["beta", "t"],
            "jackson" => &["beta", "n", "t"],
            _ => return Err(bad(format!("unknown kernel '{name}'"))),
        };
        if let Some((k, _)) = pairs.iter().find(|(k, _)| !allowed.contains(k)) {
            return Err(bad(format!("unknown key '{k}' for {name}")));
        }
        let get = |key: &str| pairs.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
        let require = |key: &str| get(key).ok_or_else(|| bad(format!("missing key '{key}'")));
        let integer = |key: &str, v: f64| -> Result<u32> {
            if v.fract() != 0.0 || v < 0.0 || v > u32::MAX as f64 {
                Err(bad(format!("'{key}' must be a nonnegative integer")))
            } else {
                Ok(v as u32)
            }
        };
        Ok(match name {
            "bspline" => KernelId::BSpline { n: integer("n", require("n")?)? },
            "fejer" => KernelId::Fejer { beta: require("beta")?, t: get("t").unwrap_or(0.0) },
            _ => KernelId::Jackson {
                beta: require("beta")?,
                n: integer("n", require("n")?)?,
                t: get("t").unwrap_or(0.0),
            },
        })
    }

    pub fn build(self) -> Result<KernelProfile> {
        match self {
            KernelId::BSpline { n } => make_bspline(n),
            KernelId::Fejer { beta, t } => make_fejer(beta, t),
            KernelId::Jackson { beta, n, t } => make_jackson(beta, n, t),
        }
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelId::BSpline { n } => write!(f, "bspline:n={n}"),
            KernelId::Fejer { beta, t } => write!(f, "fejer:beta={beta},t={t}"),
            KernelId::Jackson { beta, n, t } => write!(f, "jackson:beta={beta},n={n},t={t}"),
        }
    }
}

/// Normalized sinc, `sin(πu)/(πu)` with value 1 at the origin.
pub fn sinc(u: f64) -> f64 {
    let x = PI * u;
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Centered B-spline of order `n` (degree `n − 1`), supported on `[−n/2, n/2]`.
pub fn make_bspline(n: u32) -> Result<KernelProfile> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("B-spline order must be at least 2, got {n}")));
    }
    let half = f64::from(n) / 2.0;
    let inv_fact = 1.0 / factorial(n - 1);
    let coeffs: Vec<f64> = (0..=n)
        .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } * binomial(n, k))
        .collect();
    let degree = (n - 1) as i32;
    let profile = move |x: f64| {
        if !(x.abs() < half) {
            return 0.0;
        }
        let mut acc = 0.0;
        for (k, c) in coeffs.iter().enumerate() {
            let t = half + x - k as f64;
            if t > 0.0 {
                acc += c * t.powi(degree);
            }
        }
        (acc * inv_fact).max(0.0)
    };
    KernelProfile::build(
        KernelId::BSpline { n }.to_string(),
        Arc::new(profile),
        Extent::Compact { radius: half },
        KernelParams::BSpline { order: n },
    )
}

/// Mellin–Fejér profile `(β/2π)·e^{−t x}·sinc²(βx/2π)`.
pub fn make_fejer(beta: f64, t: f64) -> Result<KernelProfile> {
    if !(beta >= 1.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("Fejér beta must be at least 1, got {beta}")));
    }
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("Fejér t must be finite, got {t}")));
    }
    let scale = beta / (2.0 * PI);
    let profile = move |x: f64| {
        let s = sinc(beta * x / (2.0 * PI));
        let tilt = if t == 0.0 { 1.0 } else { (-t * x).exp() };
        scale * tilt * s * s
    };
    let extent = if t == 0.0 { Extent::Decaying { exponent: 2.0 } } else { Extent::Unbounded };
    KernelProfile::build(
        KernelId::Fejer { beta, t }.to_string(),
        Arc::new(profile),
        extent,
        KernelParams::Fejer { beta, t },
    )
}

/// Mellin–Jackson profile `C_{β,n}·e^{−t x}·sinc(x/(2βπn))^{2n}`; the constant
/// normalizes the untilted profile to unit integral over the real line.
pub fn make_jackson(beta: f64, n: u32, t: f64) -> Result<KernelProfile> {
    if !(beta >= 1.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("Jackson beta must be at least 1, got {beta}")));
    }
    if n < 1 {
        return Err(Error::InvalidParameter("Jackson n must be at least 1".into()));
    }
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("Jackson t must be finite, got {t}")));
    }
    let normalization = 1.0 / jackson_normalization_inverse(beta, n)?;
    let width = 2.0 * beta * PI * f64::from(n);
    let power = (2 * n) as i32;
    let profile = move |x: f64| {
        let tilt = if t == 0.0 { 1.0 } else { (-t * x).exp() };
        normalization * tilt * sinc(x / width).powi(power)
    };
    let extent = if t == 0.0 {
        Extent::Decaying { exponent: f64::from(2 * n) }
    } else {
        Extent::Unbounded
    };
    KernelProfile::build(
        KernelId::Jackson { beta, n, t }.to_string(),
        Arc::new(profile),
        extent,
        KernelParams::Jackson { beta, n, t, normalization },
    )
}

/// Number of full sinc periods integrated numerically before the analytic tail.
const JACKSON_PERIODS: usize = 4096;

/// `∫_ℝ sinc(x/(2βπn))^{2n} dx`, the reciprocal of the Jackson constant.
///
/// The integrand vanishes at every multiple of `c = 2βπn`; each period
/// `[kc, (k+1)c]` is integrated adaptively, and the remainder beyond
/// `K·c` is replaced by its mean-value asymptote, whose relative error is
/// `O((Kc)^{-2})` because the oscillating part integrates from a zero.
pub fn jackson_normalization_inverse(beta: f64, n: u32) -> Result<f64> {
    let c = 2.0 * beta * PI * f64::from(n);
    let power = (2 * n) as i32;
    let f = move |x: f64| sinc(x / c).powi(power);
    let rule = GaussLegendre::new(16)?;
    let mut half = 0.0;
    for k in 0..JACKSON_PERIODS {
        let a = k as f64 * c;
        half += adaptive_integrate(&rule, &f, a, a + c, 1e-15 * c, 30)?;
    }
    let x0 = JACKSON_PERIODS as f64 * c;
    let mean = binomial(2 * n, n) / 4f64.powi(n as i32);
    let p = f64::from(2 * n);
    let tail = mean * (c / PI).powi(power) * x0.powf(1.0 - p) / (p - 1.0);
    let total = 2.0 * (half + tail);
    if !total.is_finite() || total <= 0.0 {
        return Err(Error::NumericFailure(format!(
            "Jackson normalization did not converge (beta={beta}, n={n})"
        )));
    }
    Ok(total)
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    // Minimizes f on [lo, hi].
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn compute_zeta(profile: &(dyn Fn(f64) -> f64 + Send + Sync)) -> Option<f64> {
    let last = (ZETA_GRID_POINTS - 1) as f64;
    let (mut best_i, mut best) = (0usize, f64::INFINITY);
    for i in 0..ZETA_GRID_POINTS {
        let v = profile(i as f64 / last);
        if !v.is_finite() {
            return None;
        }
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let lo = (best_i.saturating_sub(1)) as f64 / last;
    let hi = ((best_i + 1).min(ZETA_GRID_POINTS - 1)) as f64 / last;
    let (_, refined) = golden_section(profile, lo, hi, 60);
    let zeta = best.min(refined);
    (zeta > ZETA_TOLERANCE).then_some(zeta)
}

fn compute_max_abs(profile: &(dyn Fn(f64) -> f64 + Send + Sync), extent: Extent) -> f64 {
    let radius = match extent {
        Extent::Compact { radius } => radius,
        _ => 64.0,
    };
    let res = 256.0;
    let steps = (radius * res).ceil() as i64;
    (-steps..=steps)
        .map(|i| profile((i as f64 / res).clamp(-radius, radius)).abs())
        .fold(0.0, f64::max)
}

/// `ζ = inf_{x∈[0,1]} φ(x)`, the lower bound of the kernel on `z ∈ [1, e]`.
pub fn kernel_zeta(k: &KernelProfile) -> Result<f64> {
    k.zeta.ok_or_else(|| {
        Error::KernelInadmissible(format!(
            "infimum of {} on [1, e] is not positive",
            k.name()
        ))
    })
}

/// Estimate of the discrete absolute moment `m_ν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub order: f64,
    /// `+∞` when `diverged` is set.
    pub value: f64,
    pub truncation_radius: f64,
    /// Grid points per unit length.
    pub grid_resolution: usize,
    pub diverged: bool,
}

impl MomentEstimate {
    pub fn finite(&self) -> Option<f64> {
        (!self.diverged).then_some(self.value)
    }
}

/// `m_ν = sup_x |φ(x)|·|x|^ν` over `|x| ≤ radius`, with `resolution` grid
/// points per unit length and a golden-section polish around the best point.
///
/// Shifts `j − ln s` cover every residue mod 1, so the sup over `s` and `j`
/// collapses to a sup over the real line. The moment diverges exactly when
/// the profile decays more slowly than `|x|^{−ν}`.
pub fn sup_moment(k: &KernelProfile, nu: f64, radius: f64, resolution: usize) -> Result<MomentEstimate> {
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(Error::InvalidParameter(format!("moment order must be nonnegative, got {nu}")));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
    }
    if resolution < 64 {
        return Err(Error::InvalidParameter(format!(
            "moment grid resolution must be at least 64, got {resolution}"
        )));
    }
    let diverged = match k.extent() {
        Extent::Compact { .. } => false,
        Extent::Decaying { exponent } => exponent < nu,
        Extent::Unbounded => true,
    };
    if diverged {
        return Ok(MomentEstimate {
            order: nu,
            value: f64::INFINITY,
            truncation_radius: radius,
            grid_resolution: resolution,
            diverged: true,
        });
    }
    let weighted = |x: f64| {
        let ax = x.abs();
        let p = if nu == 0.0 { 1.0 } else { ax.powf(nu) };
        k.eval(x).abs() * p
    };
    let res = resolution as f64;
    let steps = (radius * res).floor() as i64;
    let mut best = (0.0, f64::NEG_INFINITY);
    let mut consider = |x: f64| {
        let v = weighted(x);
        if v > best.1 {
            best = (x, v);
        }
    };
    for i in -steps..=steps {
        consider(i as f64 / res);
    }
    consider(-radius);
    consider(radius);
    let (x_best, grid_best) = best;
    if !grid_best.is_finite() {
        return Err(Error::NumericFailure(format!(
            "non-finite moment integrand for {} at order {nu}",
            k.name()
        )));
    }
    let lo = (x_best - 1.0 / res).max(-radius);
    let hi = (x_best + 1.0 / res).min(radius);
    let (_, neg) = golden_section(|x| -weighted(x), lo, hi, 80);
    Ok(MomentEstimate {
        order: nu,
        value: grid_best.max(-neg),
        truncation_radius: radius,
        grid_resolution: resolution,
        diverged: false,
    })
}

/// Convenience wrapper over [`sup_moment`] with the kernel's default radius and resolution.
pub fn default_sup_moment(k: &KernelProfile, nu: f64) -> Result<MomentEstimate> {
    sup_moment(k, nu, k.default_moment_radius(), DEFAULT_MOMENT_RESOLUTION)
}

/// Signed algebraic moment `𝒜_order(κ, s) = ⋁_j κ(e^{−j}s)·(j − ln s)^order`
/// over the window `|j − ln s| ≤ radius`.
pub fn algebraic_sup_moment(k: &KernelProfile, order: u32, s: f64, radius: f64) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("s must be positive, got {s}")));
    }
    algebraic_sup_moment_log(k, order, s.ln(), radius)
}

/// Same as [`algebraic_sup_moment`] but takes `ln s` directly, which avoids
/// overflow when `s = z^m` for large `m`.
pub fn algebraic_sup_moment_log(k: &KernelProfile, order: u32, log_s: f64, radius: f64) -> Result<f64> {
    if !(radius >= 0.0) || !log_s.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "invalid window: ln s = {log_s}, radius = {radius}"
        )));
    }
    let lo = (log_s - radius).ceil() as i64;
    let hi = (log_s + radius).floor() as i64;
    if lo > hi {
        return Err(Error::InvalidParameter(format!(
            "empty index window around ln s = {log_s} with radius {radius}"
        )));
    }
    let value = (lo..=hi)
        .map(|j| {
            let d = j as f64 - log_s;
            k.eval(log_s - j as f64) * d.powi(order as i32)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(value)
}

const TAIL_OFFSETS: usize = 256;

/// `sup_s ⋁_{|j − ln s| > mρ} |κ(e^{−j}s)|`, with `ln s mod 1` on a uniform grid.
pub fn tail_remainder(k: &KernelProfile, m: f64, rho: f64) -> Result<f64> {
    if !(m > 0.0 && rho > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tail remainder needs m > 0 and rho > 0, got m={m}, rho={rho}"
        )));
    }
    let cut = m * rho;
    let far = match k.extent() {
        Extent::Compact { radius } => {
            if radius <= cut {
                return Ok(0.0);
            }
            radius
        }
        _ => cut + cut.max(128.0),
    };
    let mut sup = 0.0f64;
    for i in 0..TAIL_OFFSETS {
        let u = i as f64 / TAIL_OFFSETS as f64;
        // |j − u| > cut on both sides, up to the scan limit.
        let j_right = (u + cut).floor() as i64 + 1;
        let j_left = (u - cut).ceil() as i64 - 1;
        let mut j = j_right;
        while (j as f64 - u) <= far {
            sup = sup.max(k.eval(u - j as f64).abs());
            j += 1;
        }
        let mut j = j_left;
        while (u - j as f64) <= far {
            sup = sup.max(k.eval(u - j as f64).abs());
            j -= 1;
        }
    }
    Ok(sup)
}

/// Smallest window radius `R` (on a doubling-then-bisection search) with
/// `sup_{|x|>R} |φ(x)| ≤ rel_tol·max|φ|`.
pub fn required_truncation_radius(k: &KernelProfile, rel_tol: f64) -> Result<f64> {
    let target = rel_tol * k.max_abs();
    match k.extent() {
        Extent::Compact { radius } => Ok(radius.max(1.0)),
        Extent::Unbounded => Err(Error::KernelInadmissible(format!(
            "{} has no decaying tail; a whole-line window cannot be truncated",
            k.name()
        ))),
        Extent::Decaying { .. } => {
            let mut hi = 1.0;
            while tail_remainder(k, 1.0, hi)? > target {
                hi *= 2.0;
                if hi > 1e12 {
                    return Err(Error::NumericFailure(format!(
                        "tail of {} does not fall below {rel_tol} of its peak",
                        k.name()
                    )));
                }
            }
            let mut lo = hi / 2.0;
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                if tail_remainder(k, 1.0, mid)? > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(hi.ceil())
        }
    }
}

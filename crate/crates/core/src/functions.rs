//! Test functions on the positive half-line.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A named function `h: (0, ∞) → ℝ`, optionally carrying closed forms of its
/// Mellin derivatives `θh, θ²h, …` where `θh(z) = z·h′(z)`.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    eval: RealFn,
    mellin_derivs: Vec<RealFn>,
    nonneg: bool,
    constant: Option<f64>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("analytic_mellin_derivs", &self.mellin_derivs.len())
            .field("nonneg", &self.nonneg)
            .finish()
    }
}

impl TestFunction {
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self { name: name.into(), eval: Arc::new(f), mellin_derivs: Vec::new(), nonneg: false, constant: None }
    }

    /// Marks the function as nonnegative on the half-line.
    pub fn nonneg(mut self) -> Self {
        self.nonneg = true;
        self
    }

    /// Attaches closed forms for `θh, θ²h, …` in that order.
    pub fn with_mellin_derivs(mut self, derivs: Vec<RealFn>) -> Self {
        self.mellin_derivs = derivs;
        self
    }

    pub fn constant(c: f64) -> Self {
        let mut f = Self::new(format!("const:{c}"), move |_| c);
        f.nonneg = c >= 0.0;
        f.mellin_derivs = (0..3).map(|_| Arc::new(|_: f64| 0.0) as RealFn).collect();
        f.constant = Some(c);
        f
    }

    /// The value of a function built with [`TestFunction::constant`].
    pub fn constant_value(&self) -> Option<f64> {
        self.constant
    }

    #[inline]
    pub fn eval(&self, z: f64) -> f64 {
        (self.eval)(z)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_nonneg(&self) -> bool {
        self.nonneg
    }

    /// Closed-form `θ^r h`, if one was supplied (`r ≥ 1`).
    pub fn analytic_mellin_derivative(&self, r: usize) -> Option<&RealFn> {
        r.checked_sub(1).and_then(|i| self.mellin_derivs.get(i))
    }

    pub fn as_fn(&self) -> RealFn {
        self.eval.clone()
    }

    /// Pointwise map `z ↦ g(h(z))`; analytic derivatives are dropped.
    pub fn map<G>(&self, name: impl Into<String>, g: G) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let inner = self.eval.clone();
        Self::new(name, move |z| g(inner(z)))
    }
}

/// `e^{−z}·cos(2πz)`, sign-changing.
pub fn h1() -> TestFunction {
    TestFunction::new("h1", |z: f64| (-z).exp() * (2.0 * PI * z).cos())
}

/// `ln(1 + z)`, nonnegative, with closed-form Mellin derivatives up to order 3.
pub fn h2() -> TestFunction {
    TestFunction::new("h2", |z: f64| z.ln_1p())
        .nonneg()
        .with_mellin_derivs(vec![
            Arc::new(|z: f64| z / (1.0 + z)),
            Arc::new(|z: f64| z / (1.0 + z).powi(2)),
            Arc::new(|z: f64| z * (1.0 - z) / (1.0 + z).powi(3)),
        ])
}

/// `sin(z)/(1 + z²)`.
pub fn h3() -> TestFunction {
    TestFunction::new("h3", |z: f64| z.sin() / (1.0 + z * z))
}

/// Names accepted by [`lookup`], with a one-line description each.
pub const REGISTRY: &[(&str, &str)] = &[
    ("h1", "exp(-z)*cos(2*pi*z)"),
    ("h2", "ln(1+z)"),
    ("h3", "sin(z)/(1+z^2)"),
    ("one", "constant 1"),
    ("zero", "constant 0"),
    ("log", "ln z"),
    ("logsq1", "1+(ln z)^2"),
    ("const:<c>", "constant c"),
];

/// Resolves a registry name to a function.
pub fn lookup(name: &str) -> Result<TestFunction> {
    Ok(match name {
        "h1" => h1(),
        "h2" => h2(),
        "h3" => h3(),
        "one" => TestFunction::constant(1.0),
        "zero" => TestFunction::constant(0.0),
        "log" => TestFunction::new("log", f64::ln).with_mellin_derivs(vec![
            Arc::new(|_: f64| 1.0),
            Arc::new(|_: f64| 0.0),
            Arc::new(|_: f64| 0.0),
        ]),
        "logsq1" => TestFunction::new("logsq1", |z: f64| 1.0 + z.ln().powi(2))
            .nonneg()
            .with_mellin_derivs(vec![
                Arc::new(|z: f64| 2.0 * z.ln()),
                Arc::new(|_: f64| 2.0),
                Arc::new(|_: f64| 0.0),
            ]),
        other => {
            let c = other
                .strip_prefix("const:")
                .and_then(|v| v.parse::<f64>().ok())
                .filter(|c| c.is_finite())
                .ok_or_else(|| Error::Config(format!("unknown function '{other}'")))?;
            TestFunction::constant(c)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_resolves_every_listed_name() {
        for (name, _) in REGISTRY {
            let name = if *name == "const:<c>" { "const:2.5" } else { name };
            let f = lookup(name).unwrap();
            for i in -60..=60 {
                let z = 10f64.powf(i as f64 / 10.0);
                assert!(f.eval(z).is_finite(), "{name} at {z}");
            }
        }
        assert!(lookup("h4").is_err());
        assert!(lookup("const:abc").is_err());
    }

    #[test]
    fn builtin_functions() {
        assert!((h1().eval(0.5) + (-0.5f64).exp()).abs() < 1e-15);
        assert!((h2().eval(1.0) - 2f64.ln()).abs() < 1e-15);
        assert!((h3().eval(1.0) - 1f64.sin() / 2.0).abs() < 1e-15);
        assert!(h2().is_nonneg());
        assert!(!h1().is_nonneg());
    }
}

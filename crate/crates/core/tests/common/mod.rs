#![allow(dead_code)]

use expsampling::kernel::{make_bspline, make_fejer, make_jackson};
use expsampling::{KernelProfile, TestFunction};
use rand::Rng;

pub fn standard_kernels() -> Vec<KernelProfile> {
    vec![
        make_bspline(3).unwrap(),
        make_fejer(1.0, 0.0).unwrap(),
        make_jackson(1.0, 3, 0.0).unwrap(),
    ]
}

/// Nonnegative piecewise function of `ln z`: linear between knots, or steps.
#[derive(Debug, Clone)]
pub struct Piecewise {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
    pub steps: bool,
}

impl Piecewise {
    pub fn random<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Self {
        let k = rng.gen_range(2..12);
        let mut knots: Vec<f64> = (0..k).map(|_| rng.gen_range(lo..hi)).collect();
        knots.push(lo);
        knots.push(hi);
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let values = knots.iter().map(|_| rng.gen_range(0.0..5.0)).collect();
        Self { knots, values, steps: rng.gen_bool(0.3) }
    }

    pub fn eval_log(&self, t: f64) -> f64 {
        let n = self.knots.len();
        if t <= self.knots[0] {
            return self.values[0];
        }
        if t >= self.knots[n - 1] {
            return self.values[n - 1];
        }
        let i = self.knots.partition_point(|&k| k <= t) - 1;
        if self.steps {
            return self.values[i];
        }
        let (k0, k1) = (self.knots[i], self.knots[i + 1]);
        let r = (t - k0) / (k1 - k0);
        self.values[i] * (1.0 - r) + self.values[i + 1] * r
    }

    pub fn to_fn(&self, name: &str) -> TestFunction {
        let p = self.clone();
        TestFunction::new(name, move |z: f64| p.eval_log(z.ln())).nonneg()
    }
}

/// Functions built pointwise from two others.
pub fn combine<F>(h: &TestFunction, g: &TestFunction, name: &str, f: F) -> TestFunction
where
    F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
{
    let (h, g) = (h.as_fn(), g.as_fn());
    TestFunction::new(name, move |z: f64| f(h(z), g(z)))
}

pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    expsampling::weighted::GridSpec::new(a, b, n).unwrap().points()
}

/// Largest violation of the four max-product order properties at one point,
/// relative to the magnitudes involved.
pub fn order_property_excess(
    k: &KernelProfile,
    h: &TestFunction,
    g: &TestFunction,
    lambda: f64,
    s: &expsampling::SamplingScheme,
    z: f64,
) -> f64 {
    use expsampling::sampling::max_product_apply as mp;
    let mh = mp(k, h, s, z).unwrap();
    let mg = mp(k, g, s, z).unwrap();
    let hi = combine(h, g, "max", f64::max);
    let sum = combine(h, g, "sum", |a, b| a + b);
    let diff = combine(h, g, "absdiff", |a, b| (a - b).abs());
    let scaled = h.map("scaled", move |v| lambda * v);
    let m_hi = mp(k, &hi, s, z).unwrap();
    let m_sum = mp(k, &sum, s, z).unwrap();
    let m_diff = mp(k, &diff, s, z).unwrap();
    let m_scaled = mp(k, &scaled, s, z).unwrap();
    let scale = 1.0 + mh.abs() + mg.abs();
    let monotone = (mh - m_hi).max(0.0) / scale;
    let subadditive = (m_sum - mh - mg).max(0.0) / scale;
    let lipschitz = ((mh - mg).abs() - m_diff).max(0.0) / scale;
    let homogeneous = (m_scaled - lambda * mh).abs() / (lambda * mh.abs()).max(1e-300);
    let homogeneous = if mh == 0.0 { m_scaled.abs() } else { homogeneous };
    monotone.max(subadditive).max(lipschitz).max(homogeneous)
}

/// Log-point at fraction `u ∈ [0,1]` of `[ln a, ln b − 2/m]`, where every
/// standard kernel has a nonzero term in the compact index set.
pub fn interior_log(a: f64, b: f64, m: f64, u: f64) -> f64 {
    let (lo, hi) = (a.ln(), b.ln() - 2.0 / m);
    lo + (hi - lo) * u
}

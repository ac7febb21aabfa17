//! Max-product Kantorovich exponential sampling.
//!
//! The operator approximates `h: (0, ∞) → ℝ` from local log-averages on the
//! cells `[e^{j/m}, e^{(j+1)/m}]`:
//!
//! ```text
//! M_m h(z) = ⋁_j κ(e^{−j} z^m)·m∫_{j/m}^{(j+1)/m} h(e^v) dv  /  ⋁_j κ(e^{−j} z^m)
//! ```
//!
//! Modules:
//! - [`kernel`]: log-domain kernel profiles (B-spline, Mellin–Fejér, Mellin–Jackson),
//!   admissibility constants and discrete moments.
//! - [`sampling`]: the max-product operator and its linear relatives.
//! - [`weighted`]: weight `1/(1 + ln²z)`, weighted norms and moduli, error bounds,
//!   Mellin derivatives, Voronovskaja probe.
//! - [`harness`]: error tables, convergence sweeps, CSV emission.
//! - [`cli`]: the `expsampling` command-line front end.
//!
//! ```
//! use expsampling::{functions, kernel, sampling};
//!
//! let k = kernel::make_fejer(1.0, 0.0).unwrap();
//! let h = functions::h2();
//! let s = sampling::SamplingScheme::compact(50.0, 0.1, 10.0, 8).unwrap();
//! let approx = sampling::max_product_apply(&k, &h, &s, 1.0).unwrap();
//! assert!((approx - 2f64.ln()).abs() < 0.01);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod functions;
pub mod harness;
pub mod kernel;
pub mod quadrature;
pub mod sampling;
pub mod weighted;

pub use error::{Error, Result};
pub use functions::TestFunction;
pub use kernel::{KernelProfile, MomentEstimate};
pub use sampling::SamplingScheme;

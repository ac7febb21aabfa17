mod common;

use common::{interior_log, order_property_excess, log_grid, standard_kernels, Piecewise};
use expsampling::functions::{h1, h2, h3};
use expsampling::kernel::{kernel_zeta, make_bspline, sup_moment, tail_remainder};
use expsampling::sampling::{cell_average, max_product_apply, SamplingScheme};
use expsampling::TestFunction;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn kernel_strategy() -> impl Strategy<Value = usize> {
    0usize..3
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constants_reproduced(ki in kernel_strategy(), m in 5.0f64..120.0, u in 0.0f64..=1.0, c in 0.01f64..100.0) {
        let k = &standard_kernels()[ki];
        let s = SamplingScheme::compact(m, 0.1, 10.0, 8).unwrap();
        let z = interior_log(0.1, 10.0, m, u).exp();
        let one = max_product_apply(k, &TestFunction::constant(1.0), &s, z).unwrap();
        prop_assert!((one - 1.0).abs() <= 1e-12);
        let v = max_product_apply(k, &TestFunction::constant(c), &s, z).unwrap();
        prop_assert!((v - c).abs() <= 1e-12 * c);
    }

    #[test]
    fn kernel_scale_invariance(ki in kernel_strategy(), m in 5.0f64..80.0, u in 0.0f64..=1.0, c in 1e-3f64..1e3) {
        let k = &standard_kernels()[ki];
        let kc = k.scaled(c).unwrap();
        let s = SamplingScheme::compact(m, 0.1, 10.0, 8).unwrap();
        let z = interior_log(0.1, 10.0, m, u).exp();
        for h in [h1(), h2(), h3()] {
            let a = max_product_apply(k, &h, &s, z).unwrap();
            let b = max_product_apply(&kc, &h, &s, z).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300) || a == b, "{a} vs {b}");
        }
    }

    #[test]
    fn order_properties(seed in any::<u64>(), ki in kernel_strategy(), m in 5.0f64..60.0, lambda in 1e-2f64..1e2, u in 0.0f64..=1.0) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (lo, hi) = (0.1f64.ln(), 10f64.ln());
        let h = Piecewise::random(&mut rng, lo, hi).to_fn("h");
        let g = Piecewise::random(&mut rng, lo, hi).to_fn("g");
        let k = &standard_kernels()[ki];
        let s = SamplingScheme::compact(m, 0.1, 10.0, 8).unwrap();
        prop_assert!(order_property_excess(k, &h, &g, lambda, &s, interior_log(0.1, 10.0, m, u).exp()) <= 1e-10);
    }

    #[test]
    fn result_within_cell_average_range(ki in kernel_strategy(), m in 5.0f64..60.0, u in 0.0f64..=1.0) {
        let k = &standard_kernels()[ki];
        let s = SamplingScheme::compact(m, 0.1, 10.0, 8).unwrap();
        let h = h3();
        let (lo, hi) = (expsampling::sampling::index_set(m, 0.1, 10.0).unwrap().into_inner().0,
                        expsampling::sampling::index_set(m, 0.1, 10.0).unwrap().into_inner().1);
        let avgs: Vec<f64> = (lo..=hi).map(|j| cell_average(&h, j, m, 8).unwrap()).collect();
        let min = avgs.iter().copied().fold(f64::INFINITY, f64::min);
        let max = avgs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let v = max_product_apply(k, &h, &s, interior_log(0.1, 10.0, m, u).exp()).unwrap();
        prop_assert!(v >= min - 1e-12 && v <= max + 1e-12);
    }

    #[test]
    fn tail_within_moment_bound(ki in kernel_strategy(), m in 2.0f64..64.0, rho in 0.1f64..2.0) {
        let k = &standard_kernels()[ki];
        for nu in [0.0, 1.0, 2.0] {
            let est = sup_moment(k, nu, k.default_moment_radius(), 256).unwrap();
            let tail = tail_remainder(k, m, rho).unwrap();
            prop_assert!(tail * (m * rho).powf(nu) <= est.value + 1e-9, "nu={nu} tail={tail}");
        }
    }
}

#[test]
fn moments_monotone_in_resolution() {
    let k = make_bspline(4).unwrap();
    let coarse = sup_moment(&k, 1.5, 2.0, 64).unwrap().value;
    let fine = sup_moment(&k, 1.5, 2.0, 512).unwrap().value;
    assert!(fine >= coarse - 1e-12, "{fine} {coarse}");
}

#[test]
fn zeta_below_profile_on_unit_interval() {
    for k in standard_kernels() {
        let zeta = kernel_zeta(&k).unwrap();
        for x in log_grid(1e-3, 1.0, 200) {
            assert!(k.eval(x) >= zeta - 1e-12);
        }
    }
}

mod common;

use common::{log_grid, standard_kernels};
use expsampling::functions::{h1, h2, h3};
use expsampling::harness::{run_table, table_to_csv, Precision, DEFAULT_POINTS, DEFAULT_RATES};
use expsampling::kernel::default_sup_moment;
use expsampling::sampling::{max_product_apply, max_product_grid, SamplingScheme};

#[test]
fn parallel_grid_matches_sequential_bitwise() {
    let zs = log_grid(0.1, 10.0, 97);
    for k in standard_kernels() {
        for h in [h1(), h2(), h3()] {
            let s = SamplingScheme::compact(37.0, 0.1, 10.0, 8).unwrap();
            let par = max_product_grid(&k, &h, &s, &zs).unwrap();
            let seq: Vec<f64> = zs.iter().map(|&z| max_product_apply(&k, &h, &s, z).unwrap()).collect();
            assert_eq!(
                par.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                seq.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
            );
        }
    }
}

#[test]
fn repeated_tables_are_byte_identical() {
    let a = run_table("fejer:beta=1,t=0", "h2", &DEFAULT_RATES, &DEFAULT_POINTS, (0.1, 10.0)).unwrap();
    let b = run_table("fejer:beta=1,t=0", "h2", &DEFAULT_RATES, &DEFAULT_POINTS, (0.1, 10.0)).unwrap();
    for p in [Precision::Full, Precision::Paper4dp] {
        assert_eq!(table_to_csv(&a, p, true), table_to_csv(&b, p, true));
    }
}

#[test]
fn moments_are_bitwise_reproducible() {
    for k in standard_kernels() {
        for nu in [0.0, 1.0, 2.0] {
            let a = default_sup_moment(&k, nu).unwrap();
            let b = default_sup_moment(&k, nu).unwrap();
            assert_eq!(a.value.to_bits(), b.value.to_bits());
        }
    }
}

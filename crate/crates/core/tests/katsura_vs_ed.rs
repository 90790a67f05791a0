//! The infinite-ring heat capacity against exact diagonalization of finite
//! rings. Decides between the `f²` and single-`f` integrands.

use heatwit_core::analytic::{katsura_heat_capacity, katsura_heat_capacity_linear_f};
use heatwit_core::diag::spectrum;
use heatwit_core::thermo::geometric_grid;
use heatwit_core::ModelSpec;

fn sup_relative_error(n: usize, b: f64, model: fn(f64, f64) -> heatwit_core::Result<f64>) -> f64 {
    let s = spectrum(&ModelSpec::ising(n, 1.0, b)).unwrap();
    geometric_grid(0.5, 5.0, 31)
        .unwrap()
        .into_iter()
        .map(|t| {
            let exact = model(b, t).unwrap();
            ((s.point(t).unwrap().c_per_site - exact) / exact).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn squared_dispersion_converges_with_ring_size() {
    for b in [0.5, 1.0, 2.0] {
        let e: Vec<f64> = [8, 10, 12].iter().map(|&n| sup_relative_error(n, b, katsura_heat_capacity)).collect();
        assert!(e[0] > e[1] && e[1] > e[2], "B={b}: {e:?}");
    }
    // away from the ordered phase the ring is already close at N = 12
    assert!(sup_relative_error(12, 2.0, katsura_heat_capacity) < 1e-3);
}

#[test]
fn linear_dispersion_does_not_converge() {
    for b in [1.0, 2.0] {
        let e: Vec<f64> = [8, 10, 12]
            .iter()
            .map(|&n| sup_relative_error(n, b, katsura_heat_capacity_linear_f))
            .collect();
        assert!(e.iter().all(|&x| x > 0.4), "B={b}: {e:?}");
        let squared = sup_relative_error(12, b, katsura_heat_capacity);
        assert!(squared < e[2] / 5.0);
    }
}

/// Fig.-3-style check: at B = 2 the N = 12 curve and the infinite-ring curve
/// cross the period-2 bound at nearly the same temperature.
#[test]
fn field_two_crossing_matches_finite_ring() {
    use heatwit_core::witness::{variance_witness, KatsuraCurve};
    let grid = geometric_grid(0.2, 5.0, 200).unwrap();
    let infinite = variance_witness(0.4197, &KatsuraCurve::new(2.0), &grid).unwrap();
    let ring = spectrum(&ModelSpec::ising(12, 1.0, 2.0)).unwrap();
    let finite = variance_witness(0.4197, &ring, &grid).unwrap();
    let (a, b) = (infinite.critical_temperature.unwrap(), finite.critical_temperature.unwrap());
    assert!(a > 0.0 && a < 5.0);
    assert!(((a - b) / a).abs() < 0.02, "{a} vs {b}");
}

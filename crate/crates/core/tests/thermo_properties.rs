use heatwit_core::diag::spectrum;
use heatwit_core::thermo::{geometric_grid, thermo_from_spectrum, thermal_variance};
use heatwit_core::{ModelSpec, Spectrum, Spin};

fn models() -> Vec<ModelSpec> {
    vec![
        ModelSpec::ising(6, 1.0, 0.5),
        ModelSpec::ising(8, 1.0, 2.0),
        ModelSpec::xxx(8, 1.0, Spin::Half),
        ModelSpec::xxx(4, 1.0, Spin::One),
        ModelSpec::xx(8, 1.0),
    ]
}

#[test]
fn heat_capacity_nonnegative_and_shift_invariant() {
    let grid = geometric_grid(0.01, 100.0, 120).unwrap();
    for m in models() {
        let s = spectrum(&m).unwrap();
        let a = thermo_from_spectrum(&s, &grid).unwrap();
        let b = thermo_from_spectrum(&s.shifted(-41.5), &grid).unwrap();
        for k in 0..grid.len() {
            assert!(a.c_per_site[k] >= 0.0);
            assert!((a.c_per_site[k] - b.c_per_site[k]).abs() <= 1e-10 * a.c_per_site[k] + 1e-15);
            let du = a.u_per_site[k] - b.u_per_site[k];
            assert!((du - 41.5 / m.n_sites as f64).abs() < 1e-9);
        }
    }
}

#[test]
fn temperature_limits() {
    for m in models() {
        let s = spectrum(&m).unwrap();
        let n = m.n_sites as f64;
        let e = s.energies();
        let mean = e.iter().sum::<f64>() / e.len() as f64;
        // T → ∞: U → mean level, log Z → ln dim
        let hot = s.point(1e6).unwrap();
        assert!((hot.u_per_site - mean / n).abs() < 1e-5);
        assert!((hot.log_z_per_site - (e.len() as f64).ln() / n).abs() < 1e-5);
        // T → 0: U → E₀, C → 0
        let gap = s.gap(1e-9).unwrap();
        let cold = s.point(gap / 80.0).unwrap();
        assert!((cold.u_per_site - s.ground_energy() / n).abs() < 1e-12);
        assert!(cold.c_per_site < 1e-20);
    }
}

/// `C = Var/T²` against the pairwise form `Σ_{i<j} wᵢwⱼ(Eᵢ−Eⱼ)²/T²`, which
/// has no cancellation between `⟨E²⟩` and `⟨E⟩²`.
#[test]
fn variance_matches_pairwise_oracle() {
    let s = spectrum(&ModelSpec::ising(10, 1.0, 2.0)).unwrap();
    let t = 0.5;
    let e = s.energies();
    let e0 = s.ground_energy();
    let raw: Vec<f64> = e.iter().map(|x| (-(x - e0) / t).exp()).collect();
    let z: f64 = raw.iter().sum();
    let w: Vec<f64> = raw.iter().map(|x| x / z).collect();
    let mut pair = 0.0;
    for i in 0..e.len() {
        let mut row = 0.0;
        for j in (i + 1)..e.len() {
            row += w[j] * (e[i] - e[j]) * (e[i] - e[j]);
        }
        pair += w[i] * row;
    }
    let var = thermal_variance(&s, t).unwrap();
    assert!(((var - pair) / pair).abs() < 1e-11, "{var} vs {pair}");
}

#[test]
fn derivative_route_agrees_with_variance_route() {
    let s = spectrum(&ModelSpec::ising(8, 1.0, 2.0)).unwrap();
    for t in geometric_grid(0.2, 20.0, 30).unwrap() {
        let h = 1e-4 * t;
        let du = (s.point(t + h).unwrap().u_per_site - s.point(t - h).unwrap().u_per_site) / (2.0 * h);
        let c = s.point(t).unwrap().c_per_site;
        assert!(((du - c) / c).abs() < 1e-6, "T={t}");
    }
}

#[test]
fn degenerate_levels_and_tiny_temperatures() {
    let s = Spectrum::new(vec![-3.0, -3.0, 5.0, 1e3], 2).unwrap();
    let p = s.point(1e-3).unwrap();
    assert_eq!(p.c_per_site, 0.0);
    assert!((p.log_z_per_site - (3.0 / 1e-3 + 2f64.ln()) / 2.0).abs() < 1e-9);
}

//! Separable-state bounds: the smallest Hamiltonian variance and the smallest
//! energy reachable by product states.
//!
//! Mixing product states can only raise the variance (the mixture variance is
//! the weighted mean of the component variances plus the spread of their
//! means), so minimizing over pure product states bounds every separable
//! state. [`convexity_check`] verifies that inequality numerically.
//!
//! The variance search follows the periodic ansatz `(|ψ₁⟩…|ψ_p⟩)^{⊗N/p}` with
//! Bloch vectors in the xz-plane. For a product state on a ring of `N ≥ 3`
//! sites the transverse-Ising variance is
//!
//! ```text
//! Var H = J² Σᵢ (1 − zᵢ²zᵢ₊₁²) + 2J² Σᵢ zᵢzᵢ₊₂(1 − zᵢ₊₁²)
//!       − 2JB Σᵢ zᵢzᵢ₊₁(xᵢ + xᵢ₊₁) + B² Σᵢ (1 − xᵢ²)
//! ```
//!
//! which for period 2 reduces to the per-site closed form in
//! [`ising_period2_variance`].

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::optimize::{grid_scan, nelder_mead, NelderMeadOptions};
use crate::spin_model::{build_hamiltonian, product_state, BlochAngles, ModelKind, ModelSpec};
use crate::{Error, Result};

/// A product state repeating a `period`-site pattern around the ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductAnsatz {
    pub period: usize,
    pub angles: Vec<BlochAngles>,
    /// When set, every `φ` is zero (`⟨σʸ⟩ = 0` on all sites).
    pub restrict_xz: bool,
}

impl ProductAnsatz {
    pub fn new(angles: Vec<BlochAngles>) -> Self {
        let restrict_xz = angles.iter().all(|a| a.phi == 0.0);
        Self {
            period: angles.len(),
            angles,
            restrict_xz,
        }
    }

    /// xz-plane ansatz from polar angles alone.
    pub fn xz(thetas: &[f64]) -> Self {
        Self {
            period: thetas.len(),
            angles: thetas.iter().map(|&t| BlochAngles::xz(t)).collect(),
            restrict_xz: true,
        }
    }

    pub fn validate_for(&self, n_sites: usize) -> Result<()> {
        if self.period == 0 || self.angles.len() != self.period {
            return Err(Error::InvalidArgument(format!(
                "ansatz period {} does not match {} angle pairs",
                self.period,
                self.angles.len()
            )));
        }
        if n_sites % self.period != 0 {
            return Err(Error::InvalidArgument(format!(
                "period {} does not divide {} sites",
                self.period, n_sites
            )));
        }
        if self.restrict_xz && self.angles.iter().any(|a| a.phi != 0.0) {
            return Err(Error::InvalidArgument(
                "xz-restricted ansatz has nonzero phi".into(),
            ));
        }
        Ok(())
    }

    /// Angles of all `n_sites` sites.
    pub fn tile(&self, n_sites: usize) -> Vec<BlochAngles> {
        (0..n_sites).map(|i| self.angles[i % self.period]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    VarianceMin,
    EnergyMin,
}

/// Start point and converged value of one local refinement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartRecord {
    pub start: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableBound {
    pub kind: BoundKind,
    pub value_per_site: f64,
    pub ansatz: ProductAnsatz,
    pub optimizer_trace: Vec<RestartRecord>,
    /// False when the winning refinement hit its iteration limit.
    pub converged: bool,
}

/// Per-site variance of the transverse Ising ring for the period-2 xz
/// ansatz, `J = 1`:
/// `(1 + z₁² + z₂² − 3z₁²z₂²) − 2B z₁z₂(x₁ + x₂) + (B²/2)(2 − x₁² − x₂²)`.
pub fn ising_period2_variance(field: f64, theta1: f64, theta2: f64) -> f64 {
    ising_period2_variance_j(1.0, field, theta1, theta2)
}

fn ising_period2_variance_j(j: f64, b: f64, theta1: f64, theta2: f64) -> f64 {
    let (x1, z1) = theta1.sin_cos();
    let (x2, z2) = theta2.sin_cos();
    let (z1s, z2s) = (z1 * z1, z2 * z2);
    j * j * (1.0 + z1s + z2s - 3.0 * z1s * z2s) - 2.0 * j * b * z1 * z2 * (x1 + x2)
        + 0.5 * b * b * (2.0 - x1 * x1 - x2 * x2)
}

/// Whole-ring transverse-Ising variance of a product state, `N ≥ 3`.
fn ising_product_variance(j: f64, b: f64, sites: &[BlochAngles]) -> f64 {
    let n = sites.len();
    let v: Vec<[f64; 3]> = sites.iter().map(BlochAngles::bloch_vector).collect();
    let (x, z) = (|i: usize| v[i % n][0], |i: usize| v[i % n][2]);
    let mut bonds = 0.0;
    let mut overlaps = 0.0;
    let mut cross = 0.0;
    let mut field = 0.0;
    for i in 0..n {
        let (zi, zj, zk) = (z(i), z(i + 1), z(i + 2));
        bonds += 1.0 - zi * zi * zj * zj;
        overlaps += zi * zk * (1.0 - zj * zj);
        cross += zi * zj * (x(i) + x(i + 1));
        field += 1.0 - x(i) * x(i);
    }
    j * j * (bonds + 2.0 * overlaps) - 2.0 * j * b * cross + b * b * field
}

fn require_ising(spec: &ModelSpec) -> Result<()> {
    spec.validate()?;
    if spec.kind != ModelKind::TransverseIsing {
        return Err(Error::InvalidModel(format!(
            "variance bounds are implemented for the transverse Ising ring, not {}",
            spec.kind
        )));
    }
    Ok(())
}

/// Per-site Hamiltonian variance `Δ²(H)/N` of a product ansatz.
///
/// Period-2 xz ansätze use the closed form; other ansätze use the general
/// product-state covariance sum. Both need `N ≥ 3` (a 2-ring has a doubled
/// bond); 2-rings are evaluated on the dense matrix.
pub fn variance_product_state(spec: &ModelSpec, ansatz: &ProductAnsatz) -> Result<f64> {
    require_ising(spec)?;
    ansatz.validate_for(spec.n_sites)?;
    if spec.n_sites < 3 {
        return variance_product_state_dense(spec, ansatz);
    }
    if ansatz.period == 2 && ansatz.restrict_xz {
        return Ok(ising_period2_variance_j(
            spec.coupling,
            spec.field,
            ansatz.angles[0].theta,
            ansatz.angles[1].theta,
        ));
    }
    let sites = ansatz.tile(spec.n_sites);
    Ok(ising_product_variance(spec.coupling, spec.field, &sites) / spec.n_sites as f64)
}

/// Same quantity as [`variance_product_state`] computed as
/// `⟨ψ|H²|ψ⟩ − ⟨ψ|H|ψ⟩²` with the dense Hamiltonian.
pub fn variance_product_state_dense(spec: &ModelSpec, ansatz: &ProductAnsatz) -> Result<f64> {
    spec.validate()?;
    ansatz.validate_for(spec.n_sites)?;
    let h = build_hamiltonian(spec)?;
    let psi = product_state(&ansatz.tile(spec.n_sites), spec.spin);
    let (mean, second) = h.moments(&psi);
    Ok((second - mean * mean) / spec.n_sites as f64)
}

/// Search settings for [`minimize_variance_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceSearch {
    pub period: usize,
    /// Number of best grid cells refined by Nelder–Mead.
    pub restarts: usize,
    pub restrict_xz: bool,
    /// Grid points per angle.
    pub grid_points: usize,
    pub simplex: NelderMeadOptions,
}

impl VarianceSearch {
    pub fn new(period: usize, restarts: usize) -> Self {
        Self {
            period,
            restarts,
            restrict_xz: true,
            grid_points: if period <= 2 { 48 } else { 16 },
            simplex: NelderMeadOptions {
                initial_step: TAU / 48.0,
                ..NelderMeadOptions::default()
            },
        }
    }
}

/// Minimal per-site variance over period-`period` xz product states.
pub fn minimize_variance(spec: &ModelSpec, period: usize, restarts: usize) -> Result<SeparableBound> {
    minimize_variance_with(spec, &VarianceSearch::new(period, restarts))
}

pub fn minimize_variance_with(spec: &ModelSpec, search: &VarianceSearch) -> Result<SeparableBound> {
    require_ising(spec)?;
    let p = search.period;
    if !matches!(p, 1 | 2 | 4) {
        return Err(Error::InvalidArgument(format!(
            "variance search supports periods 1, 2 and 4, got {p}"
        )));
    }
    if search.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    if spec.n_sites % p != 0 || spec.n_sites < 3 {
        return Err(Error::InvalidArgument(format!(
            "period {p} needs a ring of at least 3 sites divisible by {p}, got {}",
            spec.n_sites
        )));
    }

    let xz = search.restrict_xz;
    let decode = |x: &[f64]| -> ProductAnsatz {
        if xz {
            ProductAnsatz::xz(x)
        } else {
            ProductAnsatz {
                period: p,
                angles: x.chunks(2).map(|c| BlochAngles::new(c[0], c[1])).collect(),
                restrict_xz: false,
            }
        }
    };
    let objective = |x: &[f64]| {
        variance_product_state(spec, &decode(x)).unwrap_or(f64::INFINITY)
    };

    // Seeds: best cells of a θ-grid (φ = 0), plus the period-2 optimum when
    // searching period 4 so that the larger ansatz never does worse.
    let theta_objective = |t: &[f64]| variance_product_state(spec, &ProductAnsatz::xz(t)).unwrap_or(f64::INFINITY);
    let mut seeds: Vec<Vec<f64>> = grid_scan(theta_objective, p, search.grid_points, 0.0, TAU, search.restarts)
        .into_iter()
        .map(|(t, _)| t)
        .collect();
    if p == 4 {
        let mut inner = *search;
        inner.period = 2;
        inner.grid_points = 48;
        let two = minimize_variance_with(spec, &inner)?;
        let t: Vec<f64> = two.ansatz.angles.iter().map(|a| a.theta).collect();
        seeds.push(vec![t[0], t[1], t[0], t[1]]);
    }
    let seeds: Vec<Vec<f64>> = seeds
        .into_iter()
        .map(|t| {
            if xz {
                t
            } else {
                t.iter().flat_map(|&th| [th, 0.0]).collect()
            }
        })
        .collect();

    let mut trace = Vec::with_capacity(seeds.len());
    let mut candidates = Vec::with_capacity(seeds.len());
    for seed in seeds {
        let m = nelder_mead(objective, &seed, &search.simplex);
        trace.push(RestartRecord {
            start: seed,
            value: m.value,
        });
        candidates.push((canonical(&decode(&m.x), xz), m.value, m.converged));
    }
    let (ansatz, value, converged) = pick_best(candidates);
    Ok(SeparableBound {
        kind: BoundKind::VarianceMin,
        value_per_site: value,
        ansatz,
        optimizer_trace: trace,
        converged,
    })
}

/// Candidates within this of the minimum count as ties.
const TIE_TOLERANCE: f64 = 1e-10;

fn pick_best(candidates: Vec<(ProductAnsatz, f64, bool)>) -> (ProductAnsatz, f64, bool) {
    let best = candidates
        .iter()
        .map(|c| c.1)
        .fold(f64::INFINITY, f64::min);
    candidates
        .into_iter()
        .filter(|c| c.1 <= best + TIE_TOLERANCE)
        .min_by(|a, b| angle_key(&a.0).partial_cmp(&angle_key(&b.0)).unwrap_or(std::cmp::Ordering::Equal))
        .expect("at least one candidate")
}

fn angle_key(a: &ProductAnsatz) -> Vec<f64> {
    // Rounded so that optimizer noise does not decide the order.
    a.angles
        .iter()
        .flat_map(|x| [x.theta, x.phi])
        .map(|v| (v * 1e6).round() / 1e6)
        .collect()
}

fn wrap(angle: f64) -> f64 {
    let w = angle.rem_euclid(TAU);
    if w >= TAU - 1e-12 {
        0.0
    } else {
        w
    }
}

/// Lexicographically smallest representative among the symmetry images of
/// the ansatz: cyclic shifts, reversal, and the global flip `z → −z`.
fn canonical(ansatz: &ProductAnsatz, xz: bool) -> ProductAnsatz {
    let base: Vec<BlochAngles> = ansatz
        .angles
        .iter()
        .map(|a| normalize(*a, xz))
        .collect();
    let p = base.len();
    let mut best: Option<ProductAnsatz> = None;
    for flip in [false, true] {
        for reverse in [false, true] {
            for shift in 0..p {
                let angles: Vec<BlochAngles> = (0..p)
                    .map(|i| {
                        let k = if reverse { (p + shift - i) % p } else { (i + shift) % p };
                        let mut a = base[k];
                        if flip {
                            a = normalize(BlochAngles::new(PI - a.theta, a.phi), xz);
                        }
                        a
                    })
                    .collect();
                let candidate = ProductAnsatz {
                    period: p,
                    angles,
                    restrict_xz: ansatz.restrict_xz,
                };
                let better = match &best {
                    None => true,
                    Some(b) => angle_key(&candidate) < angle_key(b),
                };
                if better {
                    best = Some(candidate);
                }
            }
        }
    }
    best.expect("period is nonzero")
}

fn normalize(a: BlochAngles, xz: bool) -> BlochAngles {
    if xz {
        return BlochAngles::xz(wrap(a.theta));
    }
    let theta = wrap(a.theta);
    if theta > PI {
        BlochAngles::new(TAU - theta, wrap(a.phi + PI))
    } else {
        BlochAngles::new(theta, wrap(a.phi))
    }
}

/// Per-site energy `⟨ψ|H|ψ⟩/N` of a site-wise product of spin coherent states.
pub fn product_energy_per_site(spec: &ModelSpec, sites: &[BlochAngles]) -> Result<f64> {
    spec.validate()?;
    if sites.len() != spec.n_sites {
        return Err(Error::InvalidArgument(format!(
            "expected {} site angles, got {}",
            spec.n_sites,
            sites.len()
        )));
    }
    let n = spec.n_sites;
    let v: Vec<[f64; 3]> = sites.iter().map(BlochAngles::bloch_vector).collect();
    let j = spec.coupling;
    let s = spec.spin.magnitude();
    let mut e = 0.0;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        e += match spec.kind {
            ModelKind::TransverseIsing => j * a[2] * b[2] + spec.field * a[0],
            ModelKind::HeisenbergXxx => j * s * s * (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]),
            ModelKind::Xx => j * (a[0] * b[0] + a[1] * b[1]),
        };
    }
    Ok(e / n as f64)
}

/// Dense-matrix route for [`product_energy_per_site`].
pub fn product_energy_dense(spec: &ModelSpec, sites: &[BlochAngles]) -> Result<f64> {
    let h = build_hamiltonian(spec)?;
    let psi = product_state(sites, spec.spin);
    Ok(h.moments(&psi).0 / spec.n_sites as f64)
}

/// Fixed seed for the random starts of [`minimize_energy`].
const ENERGY_SEED: u64 = 0x5eb0_0d5e;

/// Minimal per-site energy over site-wise product states (no translation
/// restriction). Starts are drawn from a fixed-seed generator.
pub fn minimize_energy(spec: &ModelSpec, restarts: usize) -> Result<SeparableBound> {
    spec.validate()?;
    if restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    let n = spec.n_sites;
    let decode = |x: &[f64]| -> Vec<BlochAngles> {
        x.chunks(2).map(|c| BlochAngles::new(c[0], c[1])).collect()
    };
    let objective = |x: &[f64]| product_energy_per_site(spec, &decode(x)).unwrap_or(f64::INFINITY);
    let opts = NelderMeadOptions {
        f_tol: 1e-12,
        initial_step: 0.5,
        max_iterations: 2000 * n,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(ENERGY_SEED);
    let mut trace = Vec::with_capacity(restarts);
    let mut candidates = Vec::with_capacity(restarts);
    for _ in 0..restarts {
        let start: Vec<f64> = (0..n)
            .flat_map(|_| [(1.0 - 2.0 * rng.gen::<f64>()).acos(), TAU * rng.gen::<f64>()])
            .collect();
        let m = nelder_mead(objective, &start, &opts);
        trace.push(RestartRecord {
            start,
            value: m.value,
        });
        let ansatz = ProductAnsatz {
            period: n,
            angles: decode(&m.x).into_iter().map(|a| normalize(a, false)).collect(),
            restrict_xz: false,
        };
        candidates.push((ansatz, m.value, m.converged));
    }
    let (ansatz, value, converged) = pick_best(candidates);
    Ok(SeparableBound {
        kind: BoundKind::EnergyMin,
        value_per_site: value,
        ansatz,
        optimizer_trace: trace,
        converged,
    })
}

/// Both sides of the mixing inequality `Var_mix(H) ≥ Σ wᵢ Varᵢ(H)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvexityCheck {
    pub mixture_variance: f64,
    pub weighted_variance: f64,
    pub holds: bool,
}

/// Checks the mixing inequality for a mixture of product states on the
/// dense Hamiltonian (whole-system variances).
pub fn convexity_check(
    states: &[ProductAnsatz],
    weights: &[f64],
    spec: &ModelSpec,
) -> Result<ConvexityCheck> {
    if states.is_empty() || states.len() != weights.len() {
        return Err(Error::InvalidArgument(
            "need one weight per state and at least one state".into(),
        ));
    }
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|w| *w < 0.0 || !w.is_finite()) || (sum - 1.0).abs() > 1e-12 {
        return Err(Error::WeightNormalization { sum });
    }
    let h = build_hamiltonian(spec)?;
    let mut mean = 0.0;
    let mut second = 0.0;
    let mut weighted = 0.0;
    for (state, &w) in states.iter().zip(weights) {
        state.validate_for(spec.n_sites)?;
        let psi = product_state(&state.tile(spec.n_sites), spec.spin);
        let (m1, m2) = h.moments(&psi);
        mean += w * m1;
        second += w * m2;
        weighted += w * (m2 - m1 * m1);
    }
    let mixture = second - mean * mean;
    let slack = 1e-12 * second.abs().max(1.0);
    Ok(ConvexityCheck {
        mixture_variance: mixture,
        weighted_variance: weighted,
        holds: mixture >= weighted - slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_model::Spin;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    #[test]
    fn neel_state_at_zero_field() {
        assert_eq!(ising_period2_variance(0.0, 0.0, PI), 0.0);
        let spec = ModelSpec::ising(4, 1.0, 0.0);
        let v = variance_product_state_dense(&spec, &ProductAnsatz::xz(&[0.0, PI])).unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn field_aligned_state_has_unit_variance() {
        for b in [0.0, 1.0, 10.0, 1e3] {
            assert_abs_diff_eq!(ising_period2_variance(b, PI / 2.0, PI / 2.0), 1.0, epsilon = 1e-9 * b.max(1.0).powi(2));
        }
    }

    #[test]
    fn closed_form_general_and_dense_routes_agree() {
        let thetas = [(0.3, 2.1), (1.0, -0.4), (PI / 2.0, 0.2), (5.5, 3.9)];
        for n in [4, 6, 8] {
            for b in [0.0, 0.7, 2.0] {
                let spec = ModelSpec::ising(n, 1.0, b);
                for &(t1, t2) in &thetas {
                    let ansatz = ProductAnsatz::xz(&[t1, t2]);
                    let closed = variance_product_state(&spec, &ansatz).unwrap();
                    let general = ising_product_variance(1.0, b, &ansatz.tile(n)) / n as f64;
                    let dense = variance_product_state_dense(&spec, &ansatz).unwrap();
                    let scale = closed.abs().max(1e-3);
                    assert!((closed - dense).abs() <= 1e-9 * scale, "N={n} B={b}: {closed} vs {dense}");
                    assert!((closed - general).abs() <= 1e-9 * scale);
                    // per-site value independent of N
                    assert_relative_eq!(closed, ising_period2_variance(b, t1, t2), max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn general_formula_matches_dense_with_tilted_states() {
        let spec = ModelSpec::ising(5, 0.8, 1.3);
        let angles: Vec<BlochAngles> = (0..5)
            .map(|i| BlochAngles::new(0.4 + 0.9 * i as f64, 0.3 * i as f64 - 0.5))
            .collect();
        let ansatz = ProductAnsatz::new(angles);
        let general = variance_product_state(&spec, &ansatz).unwrap();
        let dense = variance_product_state_dense(&spec, &ansatz).unwrap();
        assert_relative_eq!(general, dense, max_relative = 1e-10);
    }

    #[test]
    fn two_ring_falls_back_to_dense() {
        let spec = ModelSpec::ising(2, 1.0, 0.5);
        let a = ProductAnsatz::xz(&[0.3, 1.2]);
        assert_eq!(
            variance_product_state(&spec, &a).unwrap(),
            variance_product_state_dense(&spec, &a).unwrap()
        );
    }

    #[test]
    fn rejects_wrong_model_and_period() {
        let a = ProductAnsatz::xz(&[0.0, 1.0]);
        assert!(matches!(
            variance_product_state(&ModelSpec::xx(4, 1.0), &a),
            Err(Error::InvalidModel(_))
        ));
        assert!(variance_product_state(&ModelSpec::ising(5, 1.0, 1.0), &a).is_err());
        assert!(minimize_variance(&ModelSpec::ising(6, 1.0, 1.0), 4, 4).is_err());
        assert!(minimize_variance(&ModelSpec::ising(4, 1.0, 1.0), 2, 0).is_err());
    }

    /// 1° grid over (θ₁, θ₂), the brute-force oracle for the period-2 search.
    fn grid_oracle(b: f64) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..360 {
            for j in 0..360 {
                let v = ising_period2_variance(b, (i as f64).to_radians(), (j as f64).to_radians());
                best = best.min(v);
            }
        }
        best
    }

    #[test]
    fn minimization_values() {
        let spec = |b| ModelSpec::ising(4, 1.0, b);
        let zero = minimize_variance(&spec(0.0), 2, 8).unwrap();
        assert!(zero.value_per_site.abs() <= 1e-9);
        let two = minimize_variance(&spec(2.0), 2, 8).unwrap();
        assert!((two.value_per_site - 0.4197).abs() <= 5e-4, "{}", two.value_per_site);
        assert!(two.converged);
        // the search must not lose to the 1° grid
        for b in [0.5, 2.0, 6.0] {
            let found = minimize_variance(&spec(b), 2, 8).unwrap().value_per_site;
            let oracle = grid_oracle(b);
            assert!(found <= oracle + 1e-9, "B={b}: {found} > grid {oracle}");
            assert!(oracle - found < 1e-3);
        }
        let six = minimize_variance(&spec(6.0), 2, 8).unwrap();
        assert_abs_diff_eq!(six.value_per_site, 1.0, epsilon = 1e-3);
        assert_eq!(two.optimizer_trace.len(), 8);
    }

    #[test]
    fn reported_angles_reproduce_value_and_are_canonical() {
        let spec = ModelSpec::ising(4, 1.0, 2.0);
        let bound = minimize_variance(&spec, 2, 8).unwrap();
        let again = variance_product_state(&spec, &bound.ansatz).unwrap();
        assert_relative_eq!(again, bound.value_per_site, max_relative = 1e-12);
        let c = canonical(&bound.ansatz, true);
        assert_eq!(angle_key(&c), angle_key(&bound.ansatz));
        // deterministic
        assert_eq!(bound, minimize_variance(&spec, 2, 8).unwrap());
    }

    #[test]
    fn period_four_not_worse_than_period_two() {
        for b in [0.5, 2.0] {
            let spec = ModelSpec::ising(4, 1.0, b);
            let two = minimize_variance(&spec, 2, 8).unwrap().value_per_site;
            let four = minimize_variance(&spec, 4, 8).unwrap().value_per_site;
            assert!(four <= two + 1e-12);
            assert!(two - four < 1e-4);
        }
    }

    #[test]
    fn tilted_search_matches_xz_search() {
        let spec = ModelSpec::ising(4, 1.0, 1.5);
        let xz = minimize_variance(&spec, 2, 8).unwrap().value_per_site;
        let mut search = VarianceSearch::new(2, 8);
        search.restrict_xz = false;
        let full = minimize_variance_with(&spec, &search).unwrap();
        assert!(!full.ansatz.restrict_xz);
        assert!((full.value_per_site - xz).abs() < 1e-6);
    }

    #[test]
    fn energy_bounds() {
        let xxx = minimize_energy(&ModelSpec::xxx(4, 1.0, Spin::Half), 4).unwrap();
        assert_abs_diff_eq!(xxx.value_per_site, -0.25, epsilon = 1e-6);
        let xxx1 = minimize_energy(&ModelSpec::xxx(4, 1.0, Spin::One), 4).unwrap();
        assert_abs_diff_eq!(xxx1.value_per_site, -1.0, epsilon = 1e-6);
        let xx = minimize_energy(&ModelSpec::xx(4, 1.0), 4).unwrap();
        assert_abs_diff_eq!(xx.value_per_site, -1.0, epsilon = 1e-6);
        assert_eq!(xx.kind, BoundKind::EnergyMin);
    }

    #[test]
    fn product_energy_routes_agree() {
        let sites: Vec<BlochAngles> = (0..4).map(|i| BlochAngles::new(0.7 * i as f64 + 0.2, 1.1 * i as f64)).collect();
        for spec in [
            ModelSpec::xxx(4, 1.0, Spin::Half),
            ModelSpec::xxx(4, 0.7, Spin::One),
            ModelSpec::xx(4, 1.0),
            ModelSpec::ising(4, 1.0, 0.9),
        ] {
            let a = product_energy_per_site(&spec, &sites).unwrap();
            let b = product_energy_dense(&spec, &sites).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-12, epsilon = 1e-14);
        }
    }

    #[test]
    fn convexity_examples() {
        let spec = ModelSpec::ising(4, 1.0, 1.0);
        let s1 = ProductAnsatz::xz(&[0.3, 2.0]);
        let s2 = ProductAnsatz::xz(&[1.7, 0.1]);
        let single = convexity_check(&[s1.clone()], &[1.0], &spec).unwrap();
        assert_abs_diff_eq!(single.mixture_variance, single.weighted_variance, epsilon = 1e-12);
        let pair = convexity_check(&[s1, s2], &[0.5, 0.5], &spec).unwrap();
        assert!(pair.holds);
        assert!(pair.mixture_variance > pair.weighted_variance + 1e-6);
        assert!(matches!(
            convexity_check(&[ProductAnsatz::xz(&[0.0])], &[0.9], &spec),
            Err(Error::WeightNormalization { .. })
        ));
    }

    fn random_state(n: usize) -> impl Strategy<Value = ProductAnsatz> {
        prop::collection::vec((0.0..PI, 0.0..TAU), n)
            .prop_map(|v| ProductAnsatz::new(v.into_iter().map(|(t, p)| BlochAngles::new(t, p)).collect()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn random_product_states_stay_above_bound(state in random_state(6)) {
            let spec = ModelSpec::ising(6, 1.0, 2.0);
            let v = variance_product_state(&spec, &state).unwrap();
            prop_assert!(v >= 0.419_724_375_227 - 1e-6);
        }

        #[test]
        fn xxx_product_energy_above_classical_bound(state in random_state(6)) {
            let spec = ModelSpec::xxx(6, 1.0, Spin::Half);
            let e = product_energy_per_site(&spec, &state.angles).unwrap();
            prop_assert!(e >= -0.25 - 1e-9);
        }
    }
}

//! Numerical search for product states inside eigenspaces of qubit
//! Hamiltonians.
//!
//! For an eigenspace with projector `P` the largest value of `⟨ψ|P|ψ⟩` over
//! product states `|ψ⟩ = ⊗ᵢ |φᵢ⟩` equals 1 exactly when the eigenspace
//! contains a product state. The maximization alternates over sites: with
//! all other factors fixed the objective is a 2×2 Hermitian form in `φᵢ`,
//! maximized by its top eigenvector, so no sweep can lower it.
//!
//! A verdict of "no product eigenstate" is evidence from a bounded number of
//! restarts, not a proof.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diag::eigensystem;
use crate::spin_model::{build_hamiltonian, ModelSpec, OperatorMatrix};
use crate::{Error, Result};

/// Tolerance for idempotence, hermiticity and orthonormality checks.
pub const PROJECTOR_TOL: f64 = 1e-10;
/// An overlap at or above `1 − PRODUCT_TOL` counts as a product eigenstate.
pub const PRODUCT_TOL: f64 = 1e-6;
pub const DEFAULT_RESTARTS: usize = 64;
pub const DEFAULT_SEED: u64 = 0xe16e_c4ec;

const MAX_SWEEPS: usize = 500;
const SWEEP_TOL: f64 = 1e-13;
/// Sweeps may lose this much to rounding without counting as a decrease.
const MONOTONE_SLACK: f64 = 1e-12;

/// Orthogonal projector onto the span of orthonormal vectors.
#[derive(Debug, Clone)]
pub struct Projector {
    dim: usize,
    basis: Vec<Vec<Complex64>>,
}

impl Projector {
    /// Takes an orthonormal set; fails with [`Error::NotAProjector`] otherwise.
    pub fn from_basis(basis: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = basis
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidArgument("empty projector basis".into()))?;
        if basis.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidArgument("basis vectors differ in length".into()));
        }
        let mut defect: f64 = 0.0;
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate().skip(i) {
                let g: Complex64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((g - target).norm());
            }
        }
        if defect > PROJECTOR_TOL {
            return Err(Error::NotAProjector { defect });
        }
        Ok(Self { dim, basis })
    }

    pub fn from_real_basis(basis: &[&[f64]]) -> Result<Self> {
        Self::from_basis(
            basis
                .iter()
                .map(|v| v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    /// Checks `P² = P` and `P = Pᵀ`, then extracts the range of `P`.
    pub fn from_matrix(p: &OperatorMatrix) -> Result<Self> {
        let n = p.dim();
        let mut defect = p.hermiticity_defect();
        for i in 0..n {
            for j in 0..n {
                let sq: f64 = (0..n).map(|k| p.get(i, k) * p.get(k, j)).sum();
                defect = defect.max((sq - p.get(i, j)).abs());
            }
        }
        if defect > PROJECTOR_TOL {
            return Err(Error::NotAProjector { defect });
        }
        let es = eigensystem(p)?;
        let range: Vec<&[f64]> = (0..n)
            .filter(|&k| es.values[k] > 0.5)
            .map(|k| es.vector(k))
            .collect();
        if range.is_empty() {
            return Err(Error::InvalidArgument("zero projector".into()));
        }
        Self::from_real_basis(&range)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// `⟨ψ|P|ψ⟩ = Σ_k |⟨w_k|ψ⟩|²`.
    pub fn expectation(&self, psi: &[Complex64]) -> f64 {
        self.basis
            .iter()
            .map(|w| w.iter().zip(psi).map(|(a, b)| a.conj() * b).sum::<Complex64>().norm_sqr())
            .sum()
    }
}

/// Best product state found for one projector.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapResult {
    pub overlap: f64,
    /// Normalized single-site factors, site 0 first.
    pub factors: Vec<[Complex64; 2]>,
    /// Objective after every sweep of the winning restart.
    pub history: Vec<f64>,
    /// Number of sweeps, over all restarts, that lowered the objective by
    /// more than rounding slack. Always zero unless something is broken.
    pub monotonicity_violations: usize,
}

fn random_factor(rng: &mut ChaCha8Rng) -> [Complex64; 2] {
    let cos_theta: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let half = 0.5 * cos_theta.clamp(-1.0, 1.0).acos();
    [
        Complex64::new(half.cos(), 0.0),
        Complex64::from_polar(half.sin(), phi),
    ]
}

fn product_vector(factors: &[[Complex64; 2]]) -> Vec<Complex64> {
    let mut psi = vec![Complex64::new(1.0, 0.0)];
    for f in factors {
        psi = psi.iter().flat_map(|&a| [a * f[0], a * f[1]]).collect();
    }
    psi
}

/// Top eigenvector of the 2×2 Hermitian matrix `[[a, b], [b̄, d]]`.
fn top_eigenvector(a: f64, b: Complex64, d: f64) -> [Complex64; 2] {
    let half_diff = 0.5 * (a - d);
    let r = (half_diff * half_diff + b.norm_sqr()).sqrt();
    if r == 0.0 {
        return [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    }
    let lambda = 0.5 * (a + d) + r;
    // (A − λ) v = 0 with rows (a−λ, b) and (b̄, d−λ); the null vector built
    // from the row with the larger gap |λ − diagonal| is the stable one.
    let v = if half_diff <= 0.0 {
        [b, Complex64::new(lambda - a, 0.0)]
    } else {
        [Complex64::new(lambda - d, 0.0), b.conj()]
    };
    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / norm, v[1] / norm]
}

/// Environment of site `i`: `g_k[a] = Σ conj(w_k[x,a,y]) l[x] r[y]` with the
/// other factors contracted into `l` (sites before `i`) and `r` (after).
fn site_update(projector: &Projector, factors: &mut [[Complex64; 2]], i: usize) -> f64 {
    let n = factors.len();
    let left = product_vector(&factors[..i]);
    let right = product_vector(&factors[i + 1..]);
    let r_len = 1usize << (n - i - 1);
    let mut m00 = 0.0;
    let mut m11 = 0.0;
    let mut m01 = Complex64::new(0.0, 0.0);
    for w in &projector.basis {
        let mut g = [Complex64::new(0.0, 0.0); 2];
        for (x, &lx) in left.iter().enumerate() {
            for (a, ga) in g.iter_mut().enumerate() {
                let offset = (2 * x + a) * r_len;
                let inner: Complex64 = w[offset..offset + r_len]
                    .iter()
                    .zip(&right)
                    .map(|(wv, ry)| wv.conj() * ry)
                    .sum();
                *ga += lx * inner;
            }
        }
        // objective = Σ_k |g_k·φ|² = φ† M φ, M_ab = conj(g_k[a]) g_k[b]
        m00 += g[0].norm_sqr();
        m11 += g[1].norm_sqr();
        m01 += g[0].conj() * g[1];
    }
    factors[i] = top_eigenvector(m00, m01, m11);
    let half_diff = 0.5 * (m00 - m11);
    0.5 * (m00 + m11) + (half_diff * half_diff + m01.norm_sqr()).sqrt()
}

/// Maximizes `⟨ψ|P|ψ⟩` over product states of `n_sites` qubits with
/// `restarts` random starts drawn from a ChaCha stream seeded by `seed`.
pub fn max_product_overlap(
    projector: &Projector,
    n_sites: usize,
    restarts: usize,
    seed: u64,
) -> Result<OverlapResult> {
    if n_sites == 0 || n_sites >= usize::BITS as usize || projector.dim() != 1usize << n_sites {
        return Err(Error::InvalidArgument(format!(
            "projector dimension {} is not 2^{n_sites}",
            projector.dim()
        )));
    }
    if restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<OverlapResult> = None;
    let mut violations = 0;
    for _ in 0..restarts {
        let mut factors: Vec<[Complex64; 2]> = (0..n_sites).map(|_| random_factor(&mut rng)).collect();
        let mut history = vec![projector.expectation(&product_vector(&factors))];
        for _ in 0..MAX_SWEEPS {
            let mut value = 0.0;
            for i in 0..n_sites {
                value = site_update(projector, &mut factors, i);
            }
            let last = *history.last().expect("history starts non-empty");
            if value < last - MONOTONE_SLACK {
                violations += 1;
            }
            history.push(value);
            if (value - last).abs() <= SWEEP_TOL {
                break;
            }
        }
        let overlap = projector.expectation(&product_vector(&factors)).min(1.0);
        if best.as_ref().map_or(true, |b| overlap > b.overlap) {
            best = Some(OverlapResult {
                overlap,
                factors,
                history,
                monotonicity_violations: 0,
            });
        }
        if overlap >= 1.0 - 1e-12 {
            break;
        }
    }
    let mut best = best.expect("at least one restart");
    best.monotonicity_violations = violations;
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigencheckOptions {
    /// Absolute tolerance for grouping eigenvalues; `None` uses `1e-9·‖H‖`.
    pub degeneracy_tol: Option<f64>,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for EigencheckOptions {
    fn default() -> Self {
        Self {
            degeneracy_tol: None,
            restarts: DEFAULT_RESTARTS,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelReport {
    pub energy: f64,
    pub degeneracy: usize,
    pub max_product_overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigencheckReport {
    pub n_sites: usize,
    pub field: f64,
    pub degeneracy_tol: f64,
    pub restarts: usize,
    pub levels: Vec<LevelReport>,
    /// True when every eigenspace stays below `1 − PRODUCT_TOL`.
    pub verdict: bool,
    pub monotonicity_violations: usize,
}

impl EigencheckReport {
    pub fn max_overlap(&self) -> f64 {
        self.levels.iter().map(|l| l.max_product_overlap).fold(0.0, f64::max)
    }
}

/// Groups ascending eigenvalues into runs whose neighbours differ by at most `tol`.
pub fn group_levels(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || values[k] - values[k - 1] > tol {
            groups.push(start..k);
            start = k;
        }
    }
    groups
}

/// Checks every eigenspace of the `n_sites` transverse Ising ring (`J = 1`)
/// for product states.
pub fn eigencheck_ising(n_sites: usize, field: f64, opts: &EigencheckOptions) -> Result<EigencheckReport> {
    if !(2..=12).contains(&n_sites) {
        return Err(Error::InvalidArgument(format!(
            "eigencheck supports 2 to 12 sites, got {n_sites}"
        )));
    }
    let spec = ModelSpec::ising(n_sites, 1.0, field);
    let h = build_hamiltonian(&spec)?;
    let es = eigensystem(&h)?;
    let norm = es.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = opts.degeneracy_tol.unwrap_or(1e-9 * norm.max(1.0));
    let groups = group_levels(&es.values, tol);

    let results: Vec<Result<(LevelReport, usize)>> = groups
        .par_iter()
        .enumerate()
        .map(|(level, range)| {
            let vectors: Vec<&[f64]> = range.clone().map(|k| es.vector(k)).collect();
            let projector = Projector::from_real_basis(&vectors)?;
            let seed = opts.seed.wrapping_add(level as u64);
            let best = max_product_overlap(&projector, n_sites, opts.restarts, seed)?;
            let energy = range.clone().map(|k| es.values[k]).sum::<f64>() / range.len() as f64;
            Ok((
                LevelReport {
                    energy,
                    degeneracy: range.len(),
                    max_product_overlap: best.overlap,
                },
                best.monotonicity_violations,
            ))
        })
        .collect();
    let mut levels = Vec::with_capacity(results.len());
    let mut violations = 0;
    for r in results {
        let (level, v) = r?;
        violations += v;
        levels.push(level);
    }
    let verdict = levels.iter().all(|l| l.max_product_overlap < 1.0 - PRODUCT_TOL);
    Ok(EigencheckReport {
        n_sites,
        field,
        degeneracy_tol: tol,
        restarts: opts.restarts,
        levels,
        verdict,
        monotonicity_violations: violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_model::{product_state, BlochAngles, Spin};
    use approx::assert_abs_diff_eq;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn product_projector_has_overlap_one() {
        let mut v = vec![c(0.0); 16];
        v[0] = c(1.0);
        let p = Projector::from_basis(vec![v]).unwrap();
        let r = max_product_overlap(&p, 4, 8, 1).unwrap();
        assert_abs_diff_eq!(r.overlap, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bell_state_overlap_is_half() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let p = Projector::from_basis(vec![vec![c(s), c(0.0), c(0.0), c(s)]]).unwrap();
        let r = max_product_overlap(&p, 2, 16, 2).unwrap();
        assert_abs_diff_eq!(r.overlap, 0.5, epsilon = 1e-10);
    }

    #[test]
    fn rejects_non_projectors() {
        let bad = vec![vec![c(1.0), c(0.1)]];
        assert!(matches!(Projector::from_basis(bad), Err(Error::NotAProjector { .. })));
        let m = OperatorMatrix::from_row_major(2, vec![1.0, 0.0, 0.0, 0.5]).unwrap();
        assert!(matches!(Projector::from_matrix(&m), Err(Error::NotAProjector { .. })));
        let ok = OperatorMatrix::from_row_major(2, vec![0.5, 0.5, 0.5, 0.5]).unwrap();
        assert_eq!(Projector::from_matrix(&ok).unwrap().rank(), 1);
    }

    #[test]
    fn sweeps_never_decrease() {
        let spec = ModelSpec::ising(5, 1.0, 0.7);
        let es = eigensystem(&build_hamiltonian(&spec).unwrap()).unwrap();
        for k in [0, 7, 19] {
            let p = Projector::from_real_basis(&[es.vector(k)]).unwrap();
            let r = max_product_overlap(&p, 5, 16, k as u64).unwrap();
            assert_eq!(r.monotonicity_violations, 0);
            for w in r.history.windows(2) {
                assert!(w[1] >= w[0] - MONOTONE_SLACK);
            }
        }
    }

    /// Dense grid over all Bloch angles for N = 2, 3: the alternating search
    /// must reach at least the grid maximum.
    #[test]
    fn matches_grid_search_on_small_rings() {
        for (n, b) in [(2usize, 1.0), (3, 1.0), (3, 0.4)] {
            let spec = ModelSpec::ising(n, 1.0, b);
            let es = eigensystem(&build_hamiltonian(&spec).unwrap()).unwrap();
            let groups = group_levels(&es.values, 1e-9);
            let steps: usize = if n == 2 { 24 } else { 10 };
            for range in groups {
                let vectors: Vec<&[f64]> = range.clone().map(|k| es.vector(k)).collect();
                let p = Projector::from_real_basis(&vectors).unwrap();
                let found = max_product_overlap(&p, n, 64, 3).unwrap().overlap;
                let mut grid_best: f64 = 0.0;
                let total = (steps * steps).pow(n as u32);
                for idx in 0..total {
                    let mut rem = idx;
                    let angles: Vec<BlochAngles> = (0..n)
                        .map(|_| {
                            let t = rem % steps;
                            rem /= steps;
                            let f = rem % steps;
                            rem /= steps;
                            BlochAngles::new(
                                std::f64::consts::PI * t as f64 / (steps - 1) as f64,
                                std::f64::consts::TAU * f as f64 / steps as f64,
                            )
                        })
                        .collect();
                    grid_best = grid_best.max(p.expectation(&product_state(&angles, Spin::Half)));
                }
                assert!(found >= grid_best - 1e-9, "n={n} B={b}: {found} < {grid_best}");
                assert!(found <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn zero_field_has_product_eigenstates() {
        let report = eigencheck_ising(4, 0.0, &EigencheckOptions::default()).unwrap();
        assert!(!report.verdict);
        assert!(report.levels.iter().all(|l| l.max_product_overlap > 1.0 - 1e-9));
    }

    #[test]
    fn nonzero_field_has_none() {
        let report = eigencheck_ising(4, 1.0, &EigencheckOptions::default()).unwrap();
        assert!(report.verdict);
        assert_eq!(report.monotonicity_violations, 0);
        assert!(report.max_overlap() < 1.0 - PRODUCT_TOL);
    }

    #[test]
    fn eigenspaces_are_complete() {
        let spec = ModelSpec::ising(4, 1.0, 1.0);
        let es = eigensystem(&build_hamiltonian(&spec).unwrap()).unwrap();
        let report = eigencheck_ising(4, 1.0, &EigencheckOptions { restarts: 4, ..Default::default() }).unwrap();
        assert_eq!(report.levels.iter().map(|l| l.degeneracy).sum::<usize>(), 16);
        // Σ over eigenspace projectors = identity
        for i in 0..16 {
            for j in 0..16 {
                let s: f64 = (0..16).map(|k| es.vector(k)[i] * es.vector(k)[j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((s - target).abs() < 1e-9);
            }
        }
    }

    /// Grouped with a tolerance wider than the field-induced splitting, the
    /// eigenspaces approach the classical ones and contain near-product states.
    #[test]
    fn coarse_eigenspaces_approach_product_states_as_field_vanishes() {
        let opts = EigencheckOptions {
            degeneracy_tol: Some(0.5),
            restarts: 16,
            ..Default::default()
        };
        // the lowest group is the Néel doublet, split only at order B²
        let gap = |b: f64| {
            let r = eigencheck_ising(4, b, &opts).unwrap();
            assert_eq!(r.levels[0].degeneracy, 2);
            1.0 - r.levels[0].max_product_overlap
        };
        let (g1, g2, g3) = (gap(0.2), gap(0.05), gap(0.01));
        assert!(g1 > g2 && g2 > g3, "{g1} {g2} {g3}");
        assert!(g3 < 1e-3);
    }

    /// Resolved levels at small field are parity cat states, which stay
    /// entangled however small the field is.
    #[test]
    fn resolved_levels_stay_entangled_at_small_field() {
        let opts = EigencheckOptions { restarts: 16, ..Default::default() };
        for b in [0.1, 0.01] {
            let r = eigencheck_ising(4, b, &opts).unwrap();
            assert!(r.verdict);
            assert!(1.0 - r.max_overlap() > 0.2);
        }
    }

    /// Roots of `−B x² − 4x + B = 0`, the ratio condition a product
    /// eigenstate would have to satisfy.
    #[test]
    fn ratio_equation_has_no_unit_root() {
        for b in [0.5f64, 1.0, 2.0] {
            let disc = (16.0 + 4.0 * b * b).sqrt();
            let x1 = (4.0 + disc) / (-2.0 * b);
            let x2 = (4.0 - disc) / (-2.0 * b);
            for x in [x1, x2] {
                assert!((-b * x * x - 4.0 * x + b).abs() < 1e-12);
            }
            assert_abs_diff_eq!(x1 * x2, -1.0, epsilon = 1e-12);
            // x = ±1 would need −B ∓ 4 + B = 0
            for x in [1.0f64, -1.0] {
                assert!((-b * x * x - 4.0 * x + b).abs() == 4.0);
            }
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(eigencheck_ising(1, 1.0, &EigencheckOptions::default()).is_err());
        assert!(eigencheck_ising(13, 1.0, &EigencheckOptions::default()).is_err());
    }
}

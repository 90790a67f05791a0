//! Hamiltonians of spin rings with periodic boundary (`N + i ≡ i`).
//!
//! Three models are supported:
//!
//! - transverse Ising: `H = J Σ σᶻᵢσᶻᵢ₊₁ + B Σ σˣᵢ`
//! - Heisenberg XXX: `H = J Σ Sᵢ·Sᵢ₊₁` with spin operators of magnitude `s`
//!   (so `S = σ/2` at `s = 1/2`)
//! - XX in Pauli form: `H = J Σ (σˣᵢσˣᵢ₊₁ + σʸᵢσʸᵢ₊₁)`
//!
//! Computational basis: local state `0` is the highest `m` (σᶻ = +1 for
//! spin-1/2), and site 0 is the most significant digit of the basis index.
//! Every bond `(i, i+1 mod N)` is summed, so a 2-ring carries two bonds.
//!
//! All three Hamiltonians are real symmetric in this basis, so matrices are
//! stored as `f64`.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest Hilbert dimension accepted by default (N = 14 at spin-1/2).
pub const DEFAULT_DIM_CAP: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    TransverseIsing,
    HeisenbergXxx,
    Xx,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::TransverseIsing => "ising",
            ModelKind::HeisenbergXxx => "xxx",
            ModelKind::Xx => "xx",
        })
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ising" | "transverse_ising" | "tfim" => Ok(ModelKind::TransverseIsing),
            "xxx" | "heisenberg" | "heisenberg_xxx" => Ok(ModelKind::HeisenbergXxx),
            "xx" => Ok(ModelKind::Xx),
            other => Err(Error::InvalidModel(format!("unknown model '{other}'"))),
        }
    }
}

/// Local spin magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spin {
    #[serde(rename = "1/2")]
    Half,
    #[serde(rename = "1")]
    One,
}

impl Spin {
    pub fn magnitude(self) -> f64 {
        match self {
            Spin::Half => 0.5,
            Spin::One => 1.0,
        }
    }

    /// `2s + 1`.
    pub fn local_dim(self) -> usize {
        match self {
            Spin::Half => 2,
            Spin::One => 3,
        }
    }

    /// `m` quantum number of local basis state `digit`.
    fn m(self, digit: usize) -> f64 {
        self.magnitude() - digit as f64
    }
}

impl std::str::FromStr for Spin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1/2" | "0.5" | "half" => Ok(Spin::Half),
            "1" | "1.0" | "one" => Ok(Spin::One),
            other => Err(Error::InvalidModel(format!("unsupported spin '{other}'"))),
        }
    }
}

/// Which chain, how many sites, and its couplings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub n_sites: usize,
    /// Exchange coupling `J`.
    pub coupling: f64,
    /// Transverse field `B`; ignored unless `kind` is `TransverseIsing`.
    pub field: f64,
    pub spin: Spin,
}

impl ModelSpec {
    pub fn ising(n_sites: usize, coupling: f64, field: f64) -> Self {
        Self {
            kind: ModelKind::TransverseIsing,
            n_sites,
            coupling,
            field,
            spin: Spin::Half,
        }
    }

    pub fn xxx(n_sites: usize, coupling: f64, spin: Spin) -> Self {
        Self {
            kind: ModelKind::HeisenbergXxx,
            n_sites,
            coupling,
            field: 0.0,
            spin,
        }
    }

    pub fn xx(n_sites: usize, coupling: f64) -> Self {
        Self {
            kind: ModelKind::Xx,
            n_sites,
            coupling,
            field: 0.0,
            spin: Spin::Half,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::InvalidModel(format!(
                "a ring needs at least 2 sites, got {}",
                self.n_sites
            )));
        }
        if !self.coupling.is_finite() || !self.field.is_finite() {
            return Err(Error::InvalidModel("couplings must be finite".into()));
        }
        if self.kind != ModelKind::HeisenbergXxx && self.spin != Spin::Half {
            return Err(Error::InvalidModel(format!(
                "the {} model is defined for spin-1/2 only",
                self.kind
            )));
        }
        Ok(())
    }

    /// Field actually entering the Hamiltonian.
    pub fn effective_field(&self) -> f64 {
        match self.kind {
            ModelKind::TransverseIsing => self.field,
            _ => 0.0,
        }
    }

    /// Hilbert dimension `(2s+1)^N`, rejected above `cap`.
    pub fn dim_with_cap(&self, cap: usize) -> Result<usize> {
        self.validate()?;
        let d = self.spin.local_dim() as u128;
        let mut dim: u128 = 1;
        for _ in 0..self.n_sites {
            dim = dim.saturating_mul(d);
            if dim > cap as u128 {
                return Err(Error::DimensionOverflow { dim, cap });
            }
        }
        Ok(dim as usize)
    }

    pub fn dim(&self) -> Result<usize> {
        self.dim_with_cap(DEFAULT_DIM_CAP)
    }

    /// Calls `emit(row, value)` for every nonzero of column `state`, i.e.
    /// `H|state⟩ = Σ value |row⟩`. Rows may repeat; callers accumulate.
    pub(crate) fn for_each_element(&self, state: usize, mut emit: impl FnMut(usize, f64)) {
        let n = self.n_sites;
        let d = self.spin.local_dim();
        let j = self.coupling;
        let weights = place_values(n, d);
        let digit = |site: usize| (state / weights[site]) % d;

        match self.kind {
            ModelKind::TransverseIsing => {
                let z = |site: usize| if digit(site) == 0 { 1.0 } else { -1.0 };
                let diag: f64 = (0..n).map(|i| z(i) * z((i + 1) % n)).sum();
                emit(state, j * diag);
                let b = self.field;
                if b != 0.0 {
                    for (site, &w) in weights.iter().enumerate() {
                        let flipped = if digit(site) == 0 { state + w } else { state - w };
                        emit(flipped, b);
                    }
                }
            }
            ModelKind::HeisenbergXxx => {
                let spin = self.spin;
                let s = spin.magnitude();
                let mut diag = 0.0;
                for a in 0..n {
                    let b = (a + 1) % n;
                    let (da, db) = (digit(a), digit(b));
                    let (ma, mb) = (spin.m(da), spin.m(db));
                    diag += ma * mb;
                    // S⁺ₐS⁻_b / 2: raise a (digit - 1), lower b (digit + 1)
                    if da > 0 && db + 1 < d {
                        let amp = ladder(s, ma, 1.0) * ladder(s, mb, -1.0);
                        emit(state - weights[a] + weights[b], 0.5 * j * amp);
                    }
                    if da + 1 < d && db > 0 {
                        let amp = ladder(s, ma, -1.0) * ladder(s, mb, 1.0);
                        emit(state + weights[a] - weights[b], 0.5 * j * amp);
                    }
                }
                emit(state, j * diag);
            }
            ModelKind::Xx => {
                // σˣσˣ + σʸσʸ = 2(σ⁺σ⁻ + σ⁻σ⁺): swaps antiparallel neighbours.
                emit(state, 0.0);
                for a in 0..n {
                    let b = (a + 1) % n;
                    match (digit(a), digit(b)) {
                        (0, 1) => emit(state + weights[a] - weights[b], 2.0 * j),
                        (1, 0) => emit(state - weights[a] + weights[b], 2.0 * j),
                        _ => {}
                    }
                }
            }
        }
    }
}

/// `√(s(s+1) − m(m±1))`, the matrix element of `S^±` on `|m⟩`.
fn ladder(s: f64, m: f64, sign: f64) -> f64 {
    (s * (s + 1.0) - m * (m + sign)).max(0.0).sqrt()
}

/// `d^(N-1-i)` for each site `i`.
pub(crate) fn place_values(n_sites: usize, local_dim: usize) -> Vec<usize> {
    let mut w = vec![1usize; n_sites];
    for i in (0..n_sites.saturating_sub(1)).rev() {
        w[i] = w[i + 1] * local_dim;
    }
    w
}

/// Dense real symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    pub(crate) fn add(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.dim + col] += value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `max |H − Hᵀ|` entrywise.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "vector length must match matrix dimension");
        (0..self.dim)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(h, _)| **h != 0.0)
                    .map(|(h, x)| x * *h)
                    .sum()
            })
            .collect()
    }

    /// `⟨ψ|A|ψ⟩` and `⟨ψ|A²|ψ⟩` for a normalized `ψ`.
    pub fn moments(&self, psi: &[Complex64]) -> (f64, f64) {
        let a_psi = self.apply(psi);
        let first: Complex64 = psi.iter().zip(&a_psi).map(|(p, q)| p.conj() * q).sum();
        let second: f64 = a_psi.iter().map(|q| q.norm_sqr()).sum();
        (first.re, second)
    }
}

/// Dense Hamiltonian with the default dimension cap.
pub fn build_hamiltonian(spec: &ModelSpec) -> Result<OperatorMatrix> {
    build_hamiltonian_with_cap(spec, DEFAULT_DIM_CAP)
}

pub fn build_hamiltonian_with_cap(spec: &ModelSpec, cap: usize) -> Result<OperatorMatrix> {
    let dim = spec.dim_with_cap(cap)?;
    let mut h = OperatorMatrix::zeros(dim);
    for col in 0..dim {
        spec.for_each_element(col, |row, value| h.add(row, col, value));
    }
    Ok(h)
}

/// Bloch-sphere angles of one site.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BlochAngles {
    pub theta: f64,
    pub phi: f64,
}

impl BlochAngles {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    /// An xz-plane state (`φ = 0`).
    pub fn xz(theta: f64) -> Self {
        Self { theta, phi: 0.0 }
    }

    /// Unit Bloch vector `(sinθ cosφ, sinθ sinφ, cosθ)`.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Spin coherent state pointing along the Bloch vector.
    pub fn local_state(&self, spin: Spin) -> Vec<Complex64> {
        let (s, c) = (0.5 * self.theta).sin_cos();
        let phase = Complex64::from_polar(1.0, self.phi);
        match spin {
            Spin::Half => vec![Complex64::new(c, 0.0), phase * s],
            Spin::One => vec![
                Complex64::new(c * c, 0.0),
                phase * (SQRT_2 * c * s),
                phase * phase * (s * s),
            ],
        }
    }
}

/// Single-site Pauli expectations `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)` for each site.
pub fn local_expectations(angles: &[BlochAngles]) -> Vec<[f64; 3]> {
    angles.iter().map(BlochAngles::bloch_vector).collect()
}

/// Tensor product of per-site coherent states, site 0 most significant.
pub fn product_state(angles: &[BlochAngles], spin: Spin) -> Vec<Complex64> {
    let mut psi = vec![Complex64::new(1.0, 0.0)];
    for a in angles {
        let local = a.local_state(spin);
        psi = psi
            .iter()
            .flat_map(|p| local.iter().map(move |l| p * l))
            .collect();
    }
    psi
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn sorted_eigs(h: &OperatorMatrix) -> Vec<f64> {
        crate::diag::eigenvalues(h).unwrap()
    }

    /// Permutation moving the state of site i to site i+1.
    fn shift(h: &OperatorMatrix, spec: &ModelSpec) -> OperatorMatrix {
        let d = spec.spin.local_dim();
        let n = spec.n_sites;
        let w = place_values(n, d);
        let mut s = OperatorMatrix::zeros(h.dim());
        for state in 0..h.dim() {
            let mut target = 0;
            for site in 0..n {
                let digit = (state / w[site]) % d;
                target += digit * w[(site + 1) % n];
            }
            s.add(target, state, 1.0);
        }
        s
    }

    fn matmul(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
        let n = a.dim();
        let mut c = OperatorMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = a.get(i, k);
                if aik != 0.0 {
                    for j in 0..n {
                        c.add(i, j, aik * b.get(k, j));
                    }
                }
            }
        }
        c
    }

    #[test]
    fn ising_two_sites_zero_field() {
        let h = build_hamiltonian(&ModelSpec::ising(2, 1.0, 0.0)).unwrap();
        assert_eq!(h.dim(), 4);
        let diag: Vec<f64> = (0..4).map(|i| h.get(i, i)).collect();
        assert_eq!(diag, vec![2.0, -2.0, -2.0, 2.0]);
        assert_eq!(h.hermiticity_defect(), 0.0);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(h.get(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn xxx_two_sites_hand_diagonalization() {
        // 2 s¹·s² on a 2-ring: singlet −3/2, triplet +1/2.
        let h = build_hamiltonian(&ModelSpec::xxx(2, 1.0, Spin::Half)).unwrap();
        let e = sorted_eigs(&h);
        assert_abs_diff_eq!(e[0], -1.5, epsilon = 1e-12);
        for &x in &e[1..] {
            assert_abs_diff_eq!(x, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn spin_one_dimer_levels() {
        // 2 S¹·S² = (S_tot² − 4)·1 with S_tot ∈ {0,1,2}: −4, −2 (x3), +2 (x5).
        let h = build_hamiltonian(&ModelSpec::xxx(2, 1.0, Spin::One)).unwrap();
        let e = sorted_eigs(&h);
        let expected = [-4.0, -2.0, -2.0, -2.0, 2.0, 2.0, 2.0, 2.0, 2.0];
        for (a, b) in e.iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn xx_pauli_form_pair() {
        // σˣσˣ + σʸσʸ on |01⟩,|10⟩ is 2·σˣ in that block; two bonds double it.
        let h = build_hamiltonian(&ModelSpec::xx(2, 1.0)).unwrap();
        assert_eq!(h.get(1, 2), 4.0);
        assert_eq!(h.get(2, 1), 4.0);
        assert_eq!(h.get(0, 0), 0.0);
    }

    #[test]
    fn symmetries_and_trace() {
        let specs = [
            ModelSpec::ising(5, 1.0, 0.7),
            ModelSpec::ising(6, -0.8, 1.3),
            ModelSpec::xxx(5, 1.0, Spin::Half),
            ModelSpec::xxx(4, 1.0, Spin::One),
            ModelSpec::xx(6, 1.0),
        ];
        for spec in specs {
            let h = build_hamiltonian(&spec).unwrap();
            assert!(h.hermiticity_defect() <= 1e-12, "{spec:?}");
            assert_abs_diff_eq!(h.trace(), 0.0, epsilon = 1e-10);
            let s = shift(&h, &spec);
            let hs = matmul(&h, &s);
            let sh = matmul(&s, &h);
            let comm = hs
                .as_slice()
                .iter()
                .zip(sh.as_slice())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(comm <= 1e-10, "{spec:?}: ‖[H,S]‖ = {comm}");
        }
    }

    #[test]
    fn ising_field_sign_flip_isospectral() {
        for n in [3, 4, 6] {
            let plus = sorted_eigs(&build_hamiltonian(&ModelSpec::ising(n, 1.0, 0.9)).unwrap());
            let minus = sorted_eigs(&build_hamiltonian(&ModelSpec::ising(n, 1.0, -0.9)).unwrap());
            for (a, b) in plus.iter().zip(&minus) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn dimension_cap_and_validation() {
        let big = ModelSpec::ising(15, 1.0, 1.0);
        assert!(matches!(big.dim(), Err(Error::DimensionOverflow { .. })));
        assert_eq!(big.dim_with_cap(1 << 15).unwrap(), 1 << 15);
        assert!(ModelSpec::ising(1, 1.0, 1.0).validate().is_err());
        let mut bad = ModelSpec::xx(4, 1.0);
        bad.spin = Spin::One;
        assert!(bad.validate().is_err());
        assert_eq!(ModelSpec::xxx(8, 1.0, Spin::One).dim().unwrap(), 6561);
        assert!(ModelSpec::xxx(9, 1.0, Spin::One).dim().is_err());
    }

    #[test]
    fn local_expectations_on_sphere() {
        let e = local_expectations(&[
            BlochAngles::xz(0.0),
            BlochAngles::xz(PI / 2.0),
            BlochAngles::xz(PI / 3.0),
        ]);
        assert_abs_diff_eq!(e[0][2], 1.0);
        assert_abs_diff_eq!(e[0][0], 0.0);
        assert_abs_diff_eq!(e[1][0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e[1][2], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e[2][0], 3f64.sqrt() / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e[2][1], 0.0);
        assert_abs_diff_eq!(e[2][2], 0.5, epsilon = 1e-15);
        // angles wrap
        let w = local_expectations(&[BlochAngles::new(PI / 3.0 + 2.0 * PI, 2.0 * PI)]);
        for k in 0..3 {
            assert_abs_diff_eq!(w[0][k], e[2][k], epsilon = 1e-12);
        }
    }

    #[test]
    fn coherent_states_match_bloch_vectors() {
        // ⟨σ⟩ from the state vector must equal the Bloch vector.
        let a = BlochAngles::new(1.1, 0.4);
        let psi = a.local_state(Spin::Half);
        let sx = 2.0 * (psi[0].conj() * psi[1]).re;
        let sy = 2.0 * (psi[0].conj() * psi[1]).im;
        let sz = psi[0].norm_sqr() - psi[1].norm_sqr();
        let b = a.bloch_vector();
        assert_abs_diff_eq!(sx, b[0], epsilon = 1e-14);
        assert_abs_diff_eq!(sy, b[1], epsilon = 1e-14);
        assert_abs_diff_eq!(sz, b[2], epsilon = 1e-14);

        let one = a.local_state(Spin::One);
        let norm: f64 = one.iter().map(|c| c.norm_sqr()).sum();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-14);
        let mz = one[0].norm_sqr() - one[2].norm_sqr();
        assert_abs_diff_eq!(mz, b[2], epsilon = 1e-14);
    }
}

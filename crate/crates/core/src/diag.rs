//! Exact diagonalization.
//!
//! Full spectra are assembled from dense diagonal blocks of conserved
//! quantities: the spin-flip parity `Π σˣ` for the transverse Ising ring and
//! total `Sᶻ` for the XXX and XX rings. Every block is an ordinary dense
//! symmetric eigenproblem; no sparse or iterative methods are involved.

use faer::{Mat, Side};

use crate::spin_model::{ModelKind, ModelSpec, OperatorMatrix, DEFAULT_DIM_CAP};
use crate::thermo::Spectrum;
use crate::{Error, Result};

fn to_faer(dim: usize, data: &[f64]) -> Mat<f64> {
    Mat::from_fn(dim, dim, |i, j| data[i * dim + j])
}

fn symmetric_eigenvalues(dim: usize, data: &[f64]) -> Result<Vec<f64>> {
    if dim == 0 {
        return Ok(Vec::new());
    }
    if dim == 1 {
        return Ok(vec![data[0]]);
    }
    to_faer(dim, data)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::Eigensolver)
}

/// Ascending eigenvalues of a dense symmetric matrix.
pub fn eigenvalues(h: &OperatorMatrix) -> Result<Vec<f64>> {
    symmetric_eigenvalues(h.dim(), h.as_slice())
}

/// Eigenvalues with orthonormal eigenvectors (column `k` belongs to `values[k]`).
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    dim: usize,
    /// Column-major.
    vectors: Vec<f64>,
}

impl Eigensystem {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }
}

pub fn eigensystem(h: &OperatorMatrix) -> Result<Eigensystem> {
    let dim = h.dim();
    let evd = to_faer(dim, h.as_slice())
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::Eigensolver)?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let values = (0..dim).map(|k| s[k]).collect();
    let mut vectors = Vec::with_capacity(dim * dim);
    for k in 0..dim {
        vectors.extend((0..dim).map(|i| u[(i, k)]));
    }
    Ok(Eigensystem {
        values,
        dim,
        vectors,
    })
}

/// Dense block of `H` restricted to a basis of sector states.
struct Block {
    dim: usize,
    data: Vec<f64>,
}

impl Block {
    fn new(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }
}

/// Total-`Sᶻ` sectors, labelled by the digit sum of the basis index.
fn magnetization_blocks(spec: &ModelSpec, dim: usize) -> Vec<Block> {
    let d = spec.spin.local_dim();
    let n = spec.n_sites;
    let charge = |mut state: usize| {
        let mut q = 0;
        for _ in 0..n {
            q += state % d;
            state /= d;
        }
        q
    };
    let sectors = n * (d - 1) + 1;
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); sectors];
    let mut position = vec![0usize; dim];
    for state in 0..dim {
        let q = charge(state);
        position[state] = members[q].len();
        members[q].push(state);
    }
    members
        .iter()
        .filter(|m| !m.is_empty())
        .map(|states| {
            let mut block = Block::new(states.len());
            for (col, &state) in states.iter().enumerate() {
                spec.for_each_element(state, |row_state, value| {
                    block.data[position[row_state] * block.dim + col] += value;
                });
            }
            block
        })
        .collect()
}

/// Even and odd sectors of the spin-flip parity `Π σˣ` (spin-1/2 only).
///
/// Sector basis: `(|r⟩ ± |r̄⟩)/√2` for representatives `r` with site 0 in
/// state `0`, where `r̄` flips every spin.
fn parity_blocks(spec: &ModelSpec, dim: usize) -> Vec<Block> {
    let all = dim - 1;
    let half = dim / 2;
    // Representatives are exactly the indices below dim/2 (site 0 is the top bit).
    [1.0, -1.0]
        .into_iter()
        .map(|sign| {
            let mut block = Block::new(half);
            for col in 0..half {
                spec.for_each_element(col, |row_state, value| {
                    let (row, factor) = if row_state < half {
                        (row_state, 1.0)
                    } else {
                        (row_state ^ all, sign)
                    };
                    block.data[row * half + col] += factor * value;
                });
            }
            block
        })
        .collect()
}

/// Full spectrum of the model from its symmetry blocks.
pub fn spectrum(spec: &ModelSpec) -> Result<Spectrum> {
    spectrum_with_cap(spec, DEFAULT_DIM_CAP)
}

pub fn spectrum_with_cap(spec: &ModelSpec, cap: usize) -> Result<Spectrum> {
    let dim = spec.dim_with_cap(cap)?;
    let blocks = match spec.kind {
        ModelKind::TransverseIsing => parity_blocks(spec, dim),
        ModelKind::HeisenbergXxx | ModelKind::Xx => magnetization_blocks(spec, dim),
    };
    let mut energies = Vec::with_capacity(dim);
    for block in &blocks {
        energies.extend(symmetric_eigenvalues(block.dim, &block.data)?);
    }
    Spectrum::new(energies, spec.n_sites)
}

/// Spectrum from the unreduced dense matrix; slower, used for cross-checks.
pub fn spectrum_dense(spec: &ModelSpec) -> Result<Spectrum> {
    let h = crate::spin_model::build_hamiltonian(spec)?;
    Spectrum::new(eigenvalues(&h)?, spec.n_sites)
}

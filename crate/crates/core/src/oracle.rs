//! Dense reference implementation used to cross-check the structured path.
//!
//! Everything here works on the full n_x n_y lattice: the coupling matrix is
//! assembled entrywise from its definition and V^{±1/2} come from one full
//! symmetric eigendecomposition. Nothing is shared with the structured route
//! beyond the model definition and the entropy functional, so agreement
//! between the two is a real check, not a tautology.

use nalgebra::DMatrix;

use crate::correlations::DENSE_SIZE_CAP;
use crate::entropy::{entropy_from_mu, EntropyResult};
use crate::error::{Error, Result};
use crate::linalg::{product_eigenvalues, symmetrize};
use crate::model::{ChainCouplings, Geometry};
use crate::spectral::build_toeplitz;

/// Dense V^{1/2} and V^{-1/2} on the flat lattice (index i = y n_x + x).
#[derive(Debug, Clone)]
pub struct DenseCorrelations {
    vhalf: DMatrix<f64>,
    vinvhalf: DMatrix<f64>,
    geometry: Geometry,
}

impl DenseCorrelations {
    pub fn vhalf(&self) -> &DMatrix<f64> {
        &self.vhalf
    }

    pub fn vinvhalf(&self) -> &DMatrix<f64> {
        &self.vinvhalf
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }
}

/// Builds V = Z^2 / n_y densely and takes its square roots through a full
/// eigendecomposition. Capped at DENSE_SIZE_CAP sites.
pub fn dense_ground_state(
    couplings: &ChainCouplings,
    geometry: &Geometry,
) -> Result<DenseCorrelations> {
    let n = geometry.sites();
    if n > DENSE_SIZE_CAP {
        return Err(Error::SizeCap {
            requested: n,
            cap: DENSE_SIZE_CAP,
        });
    }
    let n_x = geometry.n_x();
    let lam = build_toeplitz(couplings.lambda(), n_x);
    let q = build_toeplitz(couplings.q(), n_x);
    // Z carries Lambda inside each chain and Q between every pair of chains.
    let z = DMatrix::from_fn(n, n, |i, j| {
        let (y, x) = (i / n_x, i % n_x);
        let (yp, xp) = (j / n_x, j % n_x);
        if y == yp {
            lam[(x, xp)]
        } else {
            q[(x, xp)]
        }
    });
    let v = &z * &z / geometry.n_y() as f64;
    let eig = v.symmetric_eigen();
    if let Some(bad) = eig.eigenvalues.iter().find(|ev| **ev <= 0.0) {
        return Err(Error::NotPositiveDefinite(format!(
            "dense V has eigenvalue {bad:e}"
        )));
    }
    let basis = &eig.eigenvectors;
    let roots = eig.eigenvalues.map(f64::sqrt);
    let mut vhalf = basis * DMatrix::from_diagonal(&roots) * basis.transpose();
    let mut vinvhalf = basis * DMatrix::from_diagonal(&roots.map(|r| 1.0 / r)) * basis.transpose();
    symmetrize(&mut vhalf);
    symmetrize(&mut vinvhalf);
    Ok(DenseCorrelations {
        vhalf,
        vinvhalf,
        geometry: *geometry,
    })
}

fn check_indices(indices: &[usize], len: usize) -> Result<()> {
    if indices.is_empty() {
        return Err(Error::InvalidInput("index subset must be non-empty".into()));
    }
    for &i in indices {
        if i >= len {
            return Err(Error::IndexOutOfRange { index: i, len });
        }
    }
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("index subset contains duplicates".into()));
    }
    Ok(())
}

fn submatrix(m: &DMatrix<f64>, indices: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(indices.len(), indices.len(), |i, j| {
        m[(indices[i], indices[j])]
    })
}

/// Product spectrum of an arbitrary site subset: eigenvalues of
/// V^{-1/2}|_S * V^{1/2}|_S, sorted ascending.
pub fn dense_block_spectrum(dense: &DenseCorrelations, indices: &[usize]) -> Result<Vec<f64>> {
    check_indices(indices, dense.geometry.sites())?;
    let a = submatrix(&dense.vinvhalf, indices);
    let d = submatrix(&dense.vhalf, indices);
    product_eigenvalues(&a, &d, "dense subset A")
}

/// Entanglement entropy of an arbitrary site subset on the dense path.
/// The sector split does not exist here, so only S is reported.
pub fn dense_entropy(dense: &DenseCorrelations, indices: &[usize]) -> Result<EntropyResult> {
    let mu = dense_block_spectrum(dense, indices)?;
    let (s, clamp_count) = entropy_from_mu(&mu)?;
    Ok(EntropyResult {
        s,
        s1: None,
        s2: None,
        clamp_count,
    })
}

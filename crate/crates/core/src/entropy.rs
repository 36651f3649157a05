//! Entanglement entropy from the product spectrum of a block.
//!
//! The reduced state of a block is Gaussian; its entropy is sum f(sqrt(mu_k))
//! over the eigenvalues mu of A * D, where A and D are the block windows of
//! V^{-1/2} and V^{1/2}. The chain-uniform structure splits that product into
//! an (l_y - 1)-fold degenerate sector, eig(A0 D0), and a single collective
//! sector, so only l_x x l_x problems are ever solved.

use crate::correlations::BlockPair;
use crate::error::{Error, Result};
use crate::linalg::product_eigenvalues;

/// Lower tolerance on the product eigenvalues: mu >= 1 - MU_TOLERANCE is
/// required, and mu in [1 - MU_TOLERANCE, 1) is treated as a rounded 1.
pub const MU_TOLERANCE: f64 = 1e-9;

/// Width of the band just below 1 absorbed silently as pure-state rounding.
/// Exact pure directions (full blocks) yield mu = 1 up to a few ulps with no
/// sign preference; counting those as clamps would report noise. Only values
/// below this band, yet above 1 - MU_TOLERANCE, are counted.
const SNAP_BAND: f64 = 1e-12;

/// Product spectrum of one block, split by sector. Both sets are sorted
/// ascending and have length l_x; the degenerate set carries multiplicity
/// l_y - 1.
#[derive(Debug, Clone)]
pub struct BlockSpectrum {
    degenerate: Vec<f64>,
    uniform: Vec<f64>,
    l_y: usize,
}

impl BlockSpectrum {
    /// Validates the symplectic lower bound on every eigenvalue.
    pub fn new(degenerate: Vec<f64>, uniform: Vec<f64>, l_y: usize) -> Result<Self> {
        for &mu in degenerate.iter().chain(uniform.iter()) {
            if !(mu >= 1.0 - MU_TOLERANCE) {
                return Err(Error::DomainError { x: mu });
            }
        }
        Ok(Self {
            degenerate,
            uniform,
            l_y,
        })
    }

    /// Eigenvalues of A0 D0, each entering the spectrum l_y - 1 times.
    pub fn degenerate(&self) -> &[f64] {
        &self.degenerate
    }

    /// Eigenvalues of the collective-sector operator.
    pub fn uniform(&self) -> &[f64] {
        &self.uniform
    }

    pub fn l_y(&self) -> usize {
        self.l_y
    }
}

/// Computes the sector spectra of a block.
///
/// The collective operator A0 D0 + l_y A0 D1 + (l_y/n_y)(A1-A0) D0
/// + (l_y^2/n_y)(A1-A0) D1 factors exactly as
/// [(1 - l_y/n_y) A0 + (l_y/n_y) A1] * [D0 + l_y D1], a product of a
/// positive definite and a symmetric factor, so both sectors reduce to
/// symmetric eigenproblems through the Cholesky congruence.
pub fn block_spectrum(bp: &BlockPair) -> Result<BlockSpectrum> {
    let degenerate = product_eigenvalues(bp.a0(), bp.d0(), "block window A0")?;
    let rho = bp.l_y() as f64 / bp.n_y() as f64;
    let a_mix = bp.a0() * (1.0 - rho) + bp.a1() * rho;
    let d_mix = bp.d0() + bp.d1() * bp.l_y() as f64;
    let uniform = product_eigenvalues(&a_mix, &d_mix, "collective-sector window")?;
    BlockSpectrum::new(degenerate, uniform, bp.l_y())
}

/// f(x) = ((x+1)/2) ln((x+1)/2) - ((x-1)/2) ln((x-1)/2), the entropy of one
/// Gaussian mode with symplectic eigenvalue x. The second term is
/// short-circuited to its limit 0 when x - 1 < 1e-15.
pub fn entropy_function(x: f64) -> Result<f64> {
    if !(x >= 1.0 - MU_TOLERANCE) {
        return Err(Error::DomainError { x });
    }
    let plus = 0.5 * (x + 1.0);
    let first = plus * plus.ln();
    let second = if x - 1.0 < 1e-15 {
        0.0
    } else {
        let minus = 0.5 * (x - 1.0);
        minus * minus.ln()
    };
    Ok(first - second)
}

/// Entropy of a block, split into the degenerate-sector share S1 and the
/// collective share S2. S = S1 + S2 holds exactly by construction.
#[derive(Debug, Clone, Copy)]
pub struct EntropyResult {
    pub s: f64,
    /// Degenerate-sector entropy; absent on the dense path.
    pub s1: Option<f64>,
    /// Collective-sector entropy; absent on the dense path.
    pub s2: Option<f64>,
    /// Eigenvalue instances (counted with multiplicity) clamped to 1 from
    /// inside [1 - MU_TOLERANCE, 1 - SNAP_BAND).
    pub clamp_count: usize,
}

/// Clamps a validated eigenvalue to the admissible domain [1, inf).
/// Values inside the snap band are rounded pure directions and not counted.
pub(crate) fn clamp_mu(mu: f64, clamps: &mut usize) -> f64 {
    if mu >= 1.0 {
        mu
    } else if mu >= 1.0 - SNAP_BAND {
        1.0
    } else {
        *clamps += 1;
        1.0
    }
}

/// Entropy of a validated eigenvalue list; shared by the structured and the
/// dense paths. Returns the f-sum and the clamp count.
pub(crate) fn entropy_from_mu(mu: &[f64]) -> Result<(f64, usize)> {
    let mut clamps = 0usize;
    let mut sum = 0.0;
    for &m in mu {
        if !(m >= 1.0 - MU_TOLERANCE) {
            return Err(Error::DomainError { x: m });
        }
        sum += entropy_function(clamp_mu(m, &mut clamps).sqrt())?;
    }
    Ok((sum, clamps))
}

/// Entanglement entropy from the sector spectra: S1 weights the degenerate
/// set by its multiplicity l_y - 1, S2 is the collective sum.
pub fn entanglement_entropy(spectrum: &BlockSpectrum) -> Result<EntropyResult> {
    let weight = spectrum.l_y() - 1;
    let (deg_sum, deg_clamps) = entropy_from_mu(spectrum.degenerate())?;
    let (uni_sum, uni_clamps) = entropy_from_mu(spectrum.uniform())?;
    let s1 = weight as f64 * deg_sum;
    let s2 = uni_sum;
    Ok(EntropyResult {
        s: s1 + s2,
        s1: Some(s1),
        s2: Some(s2),
        clamp_count: weight * deg_clamps + uni_clamps,
    })
}

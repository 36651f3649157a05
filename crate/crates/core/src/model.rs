//! Model definition and validity checks.
//!
//! The system is an n_y x n_x array of coupled oscillators: each of the n_y
//! chains carries the intra-chain coupling sequence Lambda, and every pair of
//! distinct chains is coupled through the same collective sequence Q. The
//! ground state exists iff Lambda - Q and Lambda + (n_y - 1) Q are positive,
//! which is checked on the spectral functions.

use crate::error::{Error, Result};
use crate::linalg::sym_eigenvalues;
use crate::spectral::{build_toeplitz, ToeplitzCoeffs, DEFAULT_QUADRATURE_POINTS};

/// Intra-chain (Lambda) and inter-chain (Q) coupling sequences.
#[derive(Debug, Clone)]
pub struct ChainCouplings {
    lambda: ToeplitzCoeffs,
    q: ToeplitzCoeffs,
}

impl ChainCouplings {
    pub fn new(lambda: ToeplitzCoeffs, q: ToeplitzCoeffs) -> Self {
        Self { lambda, q }
    }

    pub fn lambda(&self) -> &ToeplitzCoeffs {
        &self.lambda
    }

    pub fn q(&self) -> &ToeplitzCoeffs {
        &self.q
    }

    /// Lambda - Q, the sequence of the (n_y - 1)-fold degenerate sector.
    pub fn gap_coeffs(&self) -> ToeplitzCoeffs {
        self.lambda.add_scaled(&self.q, -1.0)
    }

    /// Lambda + (n_y - 1) Q, the sequence of the collective sector.
    pub fn collective_coeffs(&self, n_y: usize) -> ToeplitzCoeffs {
        self.lambda.add_scaled(&self.q, n_y as f64 - 1.0)
    }
}

/// Lattice extents: n_x oscillators per chain, n_y >= 2 chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Geometry {
    n_x: usize,
    n_y: usize,
}

impl Geometry {
    pub fn new(n_x: usize, n_y: usize) -> Result<Self> {
        if n_x < 1 {
            return Err(Error::InvalidInput("n_x must be at least 1".into()));
        }
        if n_y < 2 {
            return Err(Error::InvalidInput(
                "n_y must be at least 2; a single chain has no collective coupling".into(),
            ));
        }
        Ok(Self { n_x, n_y })
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    /// Total number of sites n_x * n_y.
    pub fn sites(&self) -> usize {
        self.n_x * self.n_y
    }
}

/// Where the l_x window sits inside a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    Corner,
    Centered,
    Offset(usize),
}

impl Placement {
    /// First x index of the window; errors if the window does not fit.
    pub fn x_start(&self, l_x: usize, n_x: usize) -> Result<usize> {
        if l_x > n_x {
            return Err(Error::BlockOutOfRange(format!(
                "window of width {l_x} does not fit a chain of {n_x} oscillators"
            )));
        }
        let start = match self {
            Placement::Corner => 0,
            Placement::Centered => (n_x - l_x) / 2,
            Placement::Offset(k) => *k,
        };
        if start + l_x > n_x {
            return Err(Error::BlockOutOfRange(format!(
                "window [{start}, {}) exceeds chain length {n_x}",
                start + l_x
            )));
        }
        Ok(start)
    }
}

/// A block of l_y chains, each restricted to the same window of l_x sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSpec {
    l_x: usize,
    l_y: usize,
    placement: Placement,
}

impl BlockSpec {
    pub fn new(l_x: usize, l_y: usize, placement: Placement) -> Result<Self> {
        if l_x < 1 || l_y < 1 {
            return Err(Error::InvalidInput(
                "block extents must be at least 1".into(),
            ));
        }
        Ok(Self {
            l_x,
            l_y,
            placement,
        })
    }

    pub fn l_x(&self) -> usize {
        self.l_x
    }

    pub fn l_y(&self) -> usize {
        self.l_y
    }

    pub fn placement(&self) -> Placement {
        self.placement
    }

    /// Checks the block against a lattice and resolves the window start.
    pub fn resolve(&self, geometry: &Geometry) -> Result<usize> {
        if self.l_y > geometry.n_y() {
            return Err(Error::BlockOutOfRange(format!(
                "block of {} chains does not fit a lattice of {} chains",
                self.l_y,
                geometry.n_y()
            )));
        }
        self.placement.x_start(self.l_x, geometry.n_x())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationMode {
    /// Lambda, Q and Lambda - Q must all be positive.
    Strict,
    /// Only Lambda - Q > 0 and Q >= 0 are required.
    Permissive,
}

/// Minima of the three spectral functions plus the verdict.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub mode: ValidationMode,
    pub min_lambda: f64,
    pub min_q: f64,
    pub min_gap: f64,
    pub messages: Vec<String>,
    pub pass: bool,
}

/// Slack for q(theta) >= 0 in permissive mode; an exact zero polished a hair
/// below the axis must not fail the check.
const PERMISSIVE_Q_SLACK: f64 = 1e-12;

/// Positivity check of the model in the chosen mode, evaluated on the
/// default quadrature grid with extremum polishing.
pub fn validate(couplings: &ChainCouplings, mode: ValidationMode) -> ValidationReport {
    validate_with(couplings, mode, DEFAULT_QUADRATURE_POINTS)
}

/// Same check on a caller-chosen scan grid.
pub fn validate_with(
    couplings: &ChainCouplings,
    mode: ValidationMode,
    points: usize,
) -> ValidationReport {
    let (_, min_lambda) = couplings
        .lambda()
        .spectral_function()
        .min_on_circle(points);
    let (_, min_q) = couplings.q().spectral_function().min_on_circle(points);
    let (_, min_gap) = couplings
        .gap_coeffs()
        .spectral_function()
        .min_on_circle(points);

    let mut messages = Vec::new();
    if min_gap <= 0.0 {
        messages.push(format!(
            "min(lambda-q)={min_gap:e} must be positive for the ground state to exist"
        ));
    }
    match mode {
        ValidationMode::Strict => {
            if min_lambda <= 0.0 {
                messages.push(format!("min(lambda)={min_lambda:e} must be positive in strict mode"));
            }
            if min_q <= 0.0 {
                messages.push(format!("min(q)={min_q:e} must be positive in strict mode"));
            }
        }
        ValidationMode::Permissive => {
            if min_q < -PERMISSIVE_Q_SLACK {
                messages.push(format!("min(q)={min_q:e} must be non-negative"));
            }
        }
    }
    let pass = messages.is_empty();
    ValidationReport {
        mode,
        min_lambda,
        min_q,
        min_gap,
        messages,
        pass,
    }
}

/// Extreme normal-mode frequencies of the finite lattice.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumGap {
    pub min_freq: f64,
    pub max_freq: f64,
}

/// Frequency window of the lattice: the normal modes split into the
/// (n_y - 1)-fold degenerate sector (Lambda - Q) and the collective sector
/// (Lambda + (n_y - 1) Q), both scaled by 1/sqrt(n_y). The scaled minimum
/// min_freq * sqrt(n_y) is therefore exactly independent of n_y, closing the
/// gap as the chain count grows.
pub fn spectrum_gap(
    couplings: &ChainCouplings,
    geometry: &Geometry,
    mode: ValidationMode,
) -> Result<SpectrumGap> {
    let report = validate(couplings, mode);
    if !report.pass {
        return Err(Error::ValidationFailed(report.messages.join("; ")));
    }
    let scale = (geometry.n_y() as f64).sqrt();
    let degenerate = sym_eigenvalues(&build_toeplitz(&couplings.gap_coeffs(), geometry.n_x()));
    let collective = sym_eigenvalues(&build_toeplitz(
        &couplings.collective_coeffs(geometry.n_y()),
        geometry.n_x(),
    ));
    // Sorted ascending: first/last entries are the sector extremes.
    let min = degenerate[0].min(collective[0]);
    let max = degenerate[degenerate.len() - 1].max(collective[collective.len() - 1]);
    Ok(SpectrumGap {
        min_freq: min / scale,
        max_freq: max / scale,
    })
}

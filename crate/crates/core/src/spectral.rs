//! Symmetric banded Toeplitz matrices and their spectral functions.
//!
//! A finite coupling sequence {c_0, ..., c_{R-1}} plays two roles: it fills
//! the band of the matrix T[i][j] = c_{|i-j|}, and it defines the 2pi-periodic
//! symbol g(theta) = c_0 + 2 sum_{k>=1} c_k cos(k theta). The range of g
//! encloses the spectrum of every finite section, which is what all
//! positivity checks in this crate lean on.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Default number of quadrature nodes on [0, 2pi).
pub const DEFAULT_QUADRATURE_POINTS: usize = 4096;

/// Default number of Fourier coefficients kept in the Szego correction sum.
pub const DEFAULT_FOURIER_CUTOFF: usize = 512;

/// Finite symmetric Toeplitz coupling sequence {c_0, ..., c_{R-1}}.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzCoeffs {
    coeffs: Vec<f64>,
}

impl ToeplitzCoeffs {
    /// Validates that the sequence is non-empty and finite.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput(
                "coupling sequence must contain at least c_0".into(),
            ));
        }
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "coupling sequence contains non-finite entry {bad}"
            )));
        }
        Ok(Self { coeffs })
    }

    /// Interaction range R: c_k = 0 for k >= R.
    pub fn range(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// c_k, zero outside the band.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// Coefficient-wise `self + factor * other`, padded to the longer range.
    pub fn add_scaled(&self, other: &ToeplitzCoeffs, factor: f64) -> ToeplitzCoeffs {
        let range = self.range().max(other.range());
        let coeffs = (0..range)
            .map(|k| self.coeff(k) + factor * other.coeff(k))
            .collect();
        ToeplitzCoeffs { coeffs }
    }

    pub fn spectral_function(&self) -> SpectralFunction {
        SpectralFunction {
            coeffs: self.clone(),
        }
    }
}

/// Builds the n x n symmetric banded Toeplitz matrix of a coupling sequence.
pub fn build_toeplitz(c: &ToeplitzCoeffs, n: usize) -> DMatrix<f64> {
    assert!(n >= 1, "Toeplitz dimension must be at least 1");
    DMatrix::from_fn(n, n, |i, j| c.coeff(i.abs_diff(j)))
}

/// The symbol g(theta) = c_0 + 2 sum_{k>=1} c_k cos(k theta).
#[derive(Debug, Clone)]
pub struct SpectralFunction {
    coeffs: ToeplitzCoeffs,
}

impl SpectralFunction {
    pub fn eval(&self, theta: f64) -> f64 {
        let c = self.coeffs.coeffs();
        let mut g = c[0];
        for (k, ck) in c.iter().enumerate().skip(1) {
            g += 2.0 * ck * (k as f64 * theta).cos();
        }
        g
    }

    fn deriv(&self, theta: f64) -> f64 {
        let c = self.coeffs.coeffs();
        let mut d = 0.0;
        for (k, ck) in c.iter().enumerate().skip(1) {
            let k = k as f64;
            d -= 2.0 * k * ck * (k * theta).sin();
        }
        d
    }

    fn deriv2(&self, theta: f64) -> f64 {
        let c = self.coeffs.coeffs();
        let mut d = 0.0;
        for (k, ck) in c.iter().enumerate().skip(1) {
            let k = k as f64;
            d -= 2.0 * k * k * ck * (k * theta).cos();
        }
        d
    }

    /// Global minimum of g over [0, 2pi): grid scan over `points` nodes
    /// followed by a safeguarded Newton polish on the closed-form derivative,
    /// so extrema falling between nodes are still resolved to full precision.
    pub fn min_on_circle(&self, points: usize) -> (f64, f64) {
        let (theta, value) = negated_max(self, points, 1.0);
        (theta, value)
    }

    /// Global maximum of g over [0, 2pi).
    pub fn max_on_circle(&self, points: usize) -> (f64, f64) {
        let (theta, value) = negated_max(self, points, -1.0);
        (theta, -value)
    }
}

/// Minimum of sign*g; `sign = -1` turns it into a maximum search.
fn negated_max(g: &SpectralFunction, points: usize, sign: f64) -> (f64, f64) {
    let points = points.max(16);
    let step = 2.0 * std::f64::consts::PI / points as f64;
    let mut best_j = 0usize;
    let mut best = f64::INFINITY;
    for j in 0..points {
        let v = sign * g.eval(step * j as f64);
        if v < best {
            best = v;
            best_j = j;
        }
    }
    let center = step * best_j as f64;
    let (lo, hi) = (center - step, center + step);
    let mut theta = center;
    for _ in 0..12 {
        let d1 = sign * g.deriv(theta);
        let d2 = sign * g.deriv2(theta);
        // Newton only inside a locally convex bracket around the best node.
        if !(d2 > 0.0) {
            break;
        }
        let next = (theta - d1 / d2).clamp(lo, hi);
        if (next - theta).abs() < 1e-15 {
            theta = next;
            break;
        }
        theta = next;
    }
    let polished = sign * g.eval(theta);
    if polished < best {
        (theta.rem_euclid(2.0 * std::f64::consts::PI), polished)
    } else {
        (center, best)
    }
}

/// Mean of q/(lambda - q) over the unit circle; the bulk limit of
/// tr(A0 D1)/l_x for interior windows. Trapezoidal quadrature on a uniform
/// grid, spectrally accurate for these smooth periodic integrands.
pub fn trace_ratio_constant(
    lambda: &ToeplitzCoeffs,
    q: &ToeplitzCoeffs,
    points: usize,
) -> Result<f64> {
    let points = points.max(16);
    let gap = lambda.add_scaled(q, -1.0).spectral_function();
    let (theta, value) = gap.min_on_circle(points);
    if value <= 0.0 {
        return Err(Error::NonPositiveGap { theta, value });
    }
    let gq = q.spectral_function();
    let step = 2.0 * std::f64::consts::PI / points as f64;
    let mut sum = 0.0;
    for j in 0..points {
        let theta = step * j as f64;
        sum += gq.eval(theta) / gap.eval(theta);
    }
    Ok(sum / points as f64)
}

/// Two-term Szego approximation of ln det T_n(g).
#[derive(Debug, Clone, Copy)]
pub struct SzegoEstimate {
    /// Extensive part g_0 * n, with g_0 the mean of ln g.
    pub leading: f64,
    /// Constant tail sum_{k>=1} k * (ln g)_k^2.
    pub correction: f64,
}

impl SzegoEstimate {
    pub fn value(&self) -> f64 {
        self.leading + self.correction
    }
}

/// Szego log-determinant estimate with the crate's default resolution.
pub fn szego_logdet(g: &SpectralFunction, n: usize) -> Result<SzegoEstimate> {
    szego_logdet_with(g, n, DEFAULT_QUADRATURE_POINTS, DEFAULT_FOURIER_CUTOFF)
}

/// Szego estimate with explicit quadrature grid and Fourier cutoff.
pub fn szego_logdet_with(
    g: &SpectralFunction,
    n: usize,
    points: usize,
    cutoff: usize,
) -> Result<SzegoEstimate> {
    let points = points.max(16);
    let (theta, value) = g.min_on_circle(points);
    if value <= 0.0 {
        return Err(Error::NonPositiveSymbol { theta, value });
    }
    let step = 2.0 * std::f64::consts::PI / points as f64;
    let logs: Vec<f64> = (0..points).map(|j| g.eval(step * j as f64).ln()).collect();
    let g0 = logs.iter().sum::<f64>() / points as f64;
    // Coefficients beyond points/2 alias; the defaults keep a wide margin.
    let cutoff = cutoff.min(points / 2);
    let mut correction = 0.0;
    for k in 1..=cutoff {
        let mut gk = 0.0;
        for (j, lg) in logs.iter().enumerate() {
            gk += lg * (k as f64 * step * j as f64).cos();
        }
        gk /= points as f64;
        correction += k as f64 * gk * gk;
    }
    Ok(SzegoEstimate {
        leading: g0 * n as f64,
        correction,
    })
}

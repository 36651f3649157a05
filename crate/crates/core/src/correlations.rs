//! Structured ground-state correlation matrices.
//!
//! Because every pair of chains is coupled identically, V^{1/2} and V^{-1/2}
//! are each determined by two n_x x n_x generators: a chain-diagonal part X0
//! and a uniform part X1 spread over all chain pairs with weight 1/n_y. The
//! lattice matrices are never formed on the fast path; dense forms exist only
//! for cross-checks against the oracle.
//!
//! Flat site index convention throughout: i = y * n_x + x.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{spd_inverse, symmetrize};
use crate::model::{BlockSpec, ChainCouplings, Geometry, ValidationMode};
use crate::spectral::build_toeplitz;

/// Largest dense matrix dimension this crate will materialize.
pub const DENSE_SIZE_CAP: usize = 4096;

/// A lattice matrix of the form `X0 (x) 1 + X1 (x) U/n_y`, with U the
/// all-ones coupling pattern over chains: element ((x,y),(x',y')) equals
/// `X0[x][x'] * delta_{y,y'} + X1[x][x'] / n_y`.
#[derive(Debug, Clone)]
pub struct StructuredCorrelation {
    x0: DMatrix<f64>,
    x1: DMatrix<f64>,
    n_y: usize,
}

impl StructuredCorrelation {
    pub(crate) fn new(mut x0: DMatrix<f64>, mut x1: DMatrix<f64>, n_y: usize) -> Self {
        assert_eq!(x0.nrows(), x0.ncols());
        assert_eq!(x0.shape(), x1.shape());
        symmetrize(&mut x0);
        symmetrize(&mut x1);
        Self { x0, x1, n_y }
    }

    pub fn n_x(&self) -> usize {
        self.x0.nrows()
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    /// Chain-diagonal generator.
    pub fn x0(&self) -> &DMatrix<f64> {
        &self.x0
    }

    /// Uniform generator; enters every chain pair with weight 1/n_y.
    pub fn x1(&self) -> &DMatrix<f64> {
        &self.x1
    }

    /// Dense form over the first l_y chains. The uniform weight stays 1/n_y
    /// even when l_y < n_y: truncating chains does not renormalize the
    /// collective pattern.
    pub fn materialize(&self, l_y: usize) -> Result<DMatrix<f64>> {
        let n_x = self.n_x();
        let size = n_x * l_y;
        if size > DENSE_SIZE_CAP {
            return Err(Error::SizeCap {
                requested: size,
                cap: DENSE_SIZE_CAP,
            });
        }
        let w = 1.0 / self.n_y as f64;
        Ok(DMatrix::from_fn(size, size, |i, j| {
            let (y, x) = (i / n_x, i % n_x);
            let (yp, xp) = (j / n_x, j % n_x);
            let uniform = w * self.x1[(x, xp)];
            if y == yp {
                self.x0[(x, xp)] + uniform
            } else {
                uniform
            }
        }))
    }
}

/// The pair (V^{1/2}, V^{-1/2}) of a validated model, plus the cached
/// n_x x n_x building blocks every block extraction windows into.
/// Immutable after construction, safe to share across threads.
#[derive(Debug, Clone)]
pub struct GroundStateCorrelations {
    vhalf: StructuredCorrelation,
    vinvhalf: StructuredCorrelation,
    geometry: Geometry,
    gap: DMatrix<f64>,            // T(lambda - q)
    coupling: DMatrix<f64>,       // T(q)
    gap_inv: DMatrix<f64>,        // T(lambda - q)^{-1}
    collective_inv: DMatrix<f64>, // (T(lambda - q) + n_y T(q))^{-1}
}

impl GroundStateCorrelations {
    pub fn vhalf(&self) -> &StructuredCorrelation {
        &self.vhalf
    }

    pub fn vinvhalf(&self) -> &StructuredCorrelation {
        &self.vinvhalf
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }
}

/// Computes the structured ground-state correlations. The model is validated
/// in the chosen mode first; the two Cholesky inversions at n_x are the only
/// cubic-cost step and are done exactly once per (model, n_y).
pub fn ground_state_correlations(
    couplings: &ChainCouplings,
    geometry: &Geometry,
    mode: ValidationMode,
) -> Result<GroundStateCorrelations> {
    let report = crate::model::validate(couplings, mode);
    if !report.pass {
        return Err(Error::ValidationFailed(report.messages.join("; ")));
    }
    let n_x = geometry.n_x();
    let n_y = geometry.n_y() as f64;
    let scale = n_y.sqrt();

    let gap = build_toeplitz(&couplings.gap_coeffs(), n_x);
    let coupling = build_toeplitz(couplings.q(), n_x);
    let collective = &gap + &coupling * n_y;
    let gap_inv = spd_inverse(&gap, "lambda - q")?;
    let collective_inv = spd_inverse(&collective, "lambda + (n_y - 1) q")?;

    // V^{1/2} = [ (L-Q) (x) 1 + n_y Q (x) U/n_y ] / sqrt(n_y)
    let vhalf = StructuredCorrelation::new(&gap / scale, &coupling * scale, geometry.n_y());
    // V^{-1/2} = sqrt(n_y) [ (L-Q)^{-1} (x) 1 + ((L-Q+n_y Q)^{-1} - (L-Q)^{-1}) (x) U/n_y ]
    let vinvhalf = StructuredCorrelation::new(
        &gap_inv * scale,
        (&collective_inv - &gap_inv) * scale,
        geometry.n_y(),
    );

    Ok(GroundStateCorrelations {
        vhalf,
        vinvhalf,
        geometry: *geometry,
        gap,
        coupling,
        gap_inv,
        collective_inv,
    })
}

/// The four l_x x l_x windows that determine a block's reduced state:
/// A0, A1 from the inverse pair, D0, D1 from the couplings themselves.
#[derive(Debug, Clone)]
pub struct BlockPair {
    pub(crate) a0: DMatrix<f64>,
    pub(crate) a1: DMatrix<f64>,
    pub(crate) d0: DMatrix<f64>,
    pub(crate) d1: DMatrix<f64>,
    l_x: usize,
    l_y: usize,
    n_y: usize,
}

impl BlockPair {
    pub fn l_x(&self) -> usize {
        self.l_x
    }

    pub fn l_y(&self) -> usize {
        self.l_y
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    pub fn a0(&self) -> &DMatrix<f64> {
        &self.a0
    }

    pub fn a1(&self) -> &DMatrix<f64> {
        &self.a1
    }

    pub fn d0(&self) -> &DMatrix<f64> {
        &self.d0
    }

    pub fn d1(&self) -> &DMatrix<f64> {
        &self.d1
    }

    /// tr(A0 D1) / l_x; for bulk windows this approaches the circle average
    /// of q/(lambda - q).
    pub fn trace_average(&self) -> f64 {
        let mut tr = 0.0;
        for i in 0..self.l_x {
            for j in 0..self.l_x {
                tr += self.a0[(i, j)] * self.d1[(j, i)];
            }
        }
        tr / self.l_x as f64
    }

    /// Dense block of V^{-1/2}: sqrt(n_y) [ A0 (x) 1 + (A1 - A0) (x) U/n_y ].
    pub fn materialize_a(&self) -> Result<DMatrix<f64>> {
        let scale = (self.n_y as f64).sqrt();
        let w = 1.0 / self.n_y as f64;
        let diff = &self.a1 - &self.a0;
        self.materialize_with(|x0, x1| scale * (x0 + w * x1), &self.a0, diff)
    }

    /// Dense block of V^{1/2}: [ D0 (x) 1 + n_y D1 (x) U/n_y ] / sqrt(n_y).
    pub fn materialize_d(&self) -> Result<DMatrix<f64>> {
        let scale = (self.n_y as f64).sqrt();
        self.materialize_with(|x0, x1| (x0 + x1) / scale, &self.d0, self.d1.clone())
    }

    fn materialize_with(
        &self,
        combine: impl Fn(f64, f64) -> f64,
        diag: &DMatrix<f64>,
        uniform: DMatrix<f64>,
    ) -> Result<DMatrix<f64>> {
        let size = self.l_x * self.l_y;
        if size > DENSE_SIZE_CAP {
            return Err(Error::SizeCap {
                requested: size,
                cap: DENSE_SIZE_CAP,
            });
        }
        let l_x = self.l_x;
        Ok(DMatrix::from_fn(size, size, |i, j| {
            let (y, x) = (i / l_x, i % l_x);
            let (yp, xp) = (j / l_x, j % l_x);
            let d = if y == yp { diag[(x, xp)] } else { 0.0 };
            combine(d, uniform[(x, xp)])
        }))
    }
}

/// Windows the cached correlation blocks for one subsystem. Cheap: four
/// l_x x l_x copies, no factorization.
pub fn extract_block(
    corr: &GroundStateCorrelations,
    spec: &BlockSpec,
) -> Result<BlockPair> {
    let x0 = spec.resolve(&corr.geometry)?;
    let l = spec.l_x();
    let window = |m: &DMatrix<f64>| m.view((x0, x0), (l, l)).into_owned();
    Ok(BlockPair {
        a0: window(&corr.gap_inv),
        a1: window(&corr.collective_inv),
        d0: window(&corr.gap),
        d1: window(&corr.coupling),
        l_x: l,
        l_y: spec.l_y(),
        n_y: corr.geometry.n_y(),
    })
}

//! Block-size sweeps, the scaling-law fit, and the asymptotic consistency
//! checks built on top of the structured correlation path.

use std::fmt::Write as _;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use crate::correlations::{
    extract_block, ground_state_correlations, BlockPair, GroundStateCorrelations,
};
use crate::entropy::{block_spectrum, entanglement_entropy, entropy_from_mu};
use crate::error::{Error, Result};
use crate::linalg::product_eigenvalues;
use crate::model::{BlockSpec, ChainCouplings, Geometry, Placement, ValidationMode};
use crate::spectral::trace_ratio_constant;

const CSV_HEADER: &str = "l_x,l_y,S,S1,S2,wall_ms";

/// One sweep grid point. Wall time is measured per block; the CSV writer
/// zeroes it unless timings are requested, keeping default output
/// reproducible byte for byte.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub l_x: usize,
    pub l_y: usize,
    pub s: f64,
    pub s1: f64,
    pub s2: f64,
    pub wall_ms: u64,
}

/// Entropy table over a block-size grid, tagged with the inputs that
/// generated it.
#[derive(Debug, Clone)]
pub struct SweepTable {
    rows: Vec<SweepRow>,
    fingerprint: String,
}

impl SweepTable {
    /// Rows must be unique per (l_x, l_y) and carry finite, non-negative
    /// entropies.
    pub fn new(rows: Vec<SweepRow>, fingerprint: String) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput("sweep table has no rows".into()));
        }
        let mut keys: Vec<(usize, usize)> = rows.iter().map(|r| (r.l_x, r.l_y)).collect();
        keys.sort_unstable();
        if keys.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(
                "sweep table has duplicate (l_x, l_y) rows".into(),
            ));
        }
        for r in &rows {
            if !(r.s.is_finite() && r.s >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "row (l_x={}, l_y={}) has invalid entropy {}",
                    r.l_x, r.l_y, r.s
                )));
            }
        }
        Ok(Self { rows, fingerprint })
    }

    pub fn rows(&self) -> &[SweepRow] {
        &self.rows
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// Fixed schema, 17 significant digits so rows round-trip losslessly.
    /// wall_ms is written as 0 unless timings are requested.
    pub fn to_csv(&self, include_timings: bool) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let ms = if include_timings { r.wall_ms } else { 0 };
            let _ = writeln!(
                out,
                "{},{},{:.16e},{:.16e},{:.16e},{}",
                r.l_x, r.l_y, r.s, r.s1, r.s2, ms
            );
        }
        out
    }

    /// Parses text produced by to_csv (or hand-written in the same schema).
    /// The fingerprint is not part of the schema and comes back empty.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty CSV input".into()))?;
        if header.trim() != CSV_HEADER {
            return Err(Error::InvalidInput(format!(
                "unexpected CSV header {header:?}, want {CSV_HEADER:?}"
            )));
        }
        let mut rows = Vec::new();
        for (idx, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 2;
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 6 {
                return Err(Error::InvalidInput(format!(
                    "line {lineno}: expected 6 fields, got {}",
                    fields.len()
                )));
            }
            let field = |i: usize, name: &str| -> Result<f64> {
                fields[i].parse().map_err(|_| {
                    Error::InvalidInput(format!("line {lineno}: bad {name} value {:?}", fields[i]))
                })
            };
            let index = |i: usize, name: &str| -> Result<usize> {
                fields[i].parse().map_err(|_| {
                    Error::InvalidInput(format!("line {lineno}: bad {name} value {:?}", fields[i]))
                })
            };
            rows.push(SweepRow {
                l_x: index(0, "l_x")?,
                l_y: index(1, "l_y")?,
                s: field(2, "S")?,
                s1: field(3, "S1")?,
                s2: field(4, "S2")?,
                wall_ms: index(5, "wall_ms")? as u64,
            });
        }
        Self::new(rows, String::new())
    }
}

fn fingerprint(
    couplings: &ChainCouplings,
    geometry: &Geometry,
    mode: ValidationMode,
    placement: Placement,
) -> String {
    format!(
        "lambda={:?};q={:?};n_x={};n_y={};mode={:?};placement={:?}",
        couplings.lambda().coeffs(),
        couplings.q().coeffs(),
        geometry.n_x(),
        geometry.n_y(),
        mode,
        placement
    )
}

/// Computes one entropy row per (l_x, l_y) grid point via the structured
/// path. The correlation inverses are built once and windowed per block, so
/// the grid cost is one n_x-sized factorization plus one l_x-sized
/// eigenproblem pair per row.
pub fn sweep(
    couplings: &ChainCouplings,
    geometry: &Geometry,
    mode: ValidationMode,
    placement: Placement,
    lx_grid: &[usize],
    ly_grid: &[usize],
) -> Result<SweepTable> {
    if lx_grid.is_empty() || ly_grid.is_empty() {
        return Err(Error::InvalidInput("sweep grid must be non-empty".into()));
    }
    let corr = ground_state_correlations(couplings, geometry, mode)?;
    let mut rows = Vec::with_capacity(lx_grid.len() * ly_grid.len());
    for &l_x in lx_grid {
        for &l_y in ly_grid {
            let start = Instant::now();
            let spec = BlockSpec::new(l_x, l_y, placement)?;
            let bp = extract_block(&corr, &spec)?;
            let result = entanglement_entropy(&block_spectrum(&bp)?)?;
            rows.push(SweepRow {
                l_x,
                l_y,
                s: result.s,
                s1: result.s1.unwrap_or(0.0),
                s2: result.s2.unwrap_or(0.0),
                wall_ms: start.elapsed().as_millis() as u64,
            });
        }
    }
    SweepTable::new(rows, fingerprint(couplings, geometry, mode, placement))
}

/// Coefficients of the least-squares model
/// S = b l_x ln(l_y) + a1 l_x + a2 l_y + a0.
#[derive(Debug, Clone, Copy)]
pub struct ScalingFit {
    pub b: f64,
    pub a1: f64,
    pub a2: f64,
    pub a0: f64,
    pub rms_residual: f64,
}

/// Fits the scaling law to a sweep table. Needs at least 8 rows spanning
/// 2 distinct l_x and 3 distinct l_y, otherwise the design is degenerate.
pub fn scaling_fit(table: &SweepTable) -> Result<ScalingFit> {
    let rows = table.rows();
    let (nx_distinct, ny_distinct) = distinct_extents(rows);
    if rows.len() < 8 || nx_distinct < 2 || ny_distinct < 3 {
        return Err(Error::DegenerateDesign(format!(
            "scaling fit needs >= 8 rows over >= 2 l_x and >= 3 l_y values, \
             got {} rows over {} and {}",
            rows.len(),
            nx_distinct,
            ny_distinct
        )));
    }
    let features = DMatrix::from_fn(rows.len(), 4, |i, j| {
        let (lx, ly) = (rows[i].l_x as f64, rows[i].l_y as f64);
        match j {
            0 => lx * ly.ln(),
            1 => lx,
            2 => ly,
            _ => 1.0,
        }
    });
    let targets: Vec<f64> = rows.iter().map(|r| r.s).collect();
    let c = least_squares(&features, &targets)?;
    let rms = rms_residual(&features, &c, &targets);
    Ok(ScalingFit {
        b: c[0],
        a1: c[1],
        a2: c[2],
        a0: c[3],
        rms_residual: rms,
    })
}

/// Linear fit of the residual R = S - (l_x/2) ln(l_y) against {l_x, l_y, 1}.
/// r_squared close to 1 means the residual is captured by linear terms, the
/// form shared by the upper and lower entropy bounds.
#[derive(Debug, Clone, Copy)]
pub struct ResidualFit {
    pub c1: f64,
    pub c2: f64,
    pub c0: f64,
    pub r_squared: f64,
}

pub fn bounds_residual(table: &SweepTable) -> Result<ResidualFit> {
    let rows = table.rows();
    let (nx_distinct, ny_distinct) = distinct_extents(rows);
    if rows.len() < 4 || nx_distinct < 2 || ny_distinct < 2 {
        return Err(Error::DegenerateDesign(format!(
            "residual fit needs >= 4 rows over >= 2 l_x and >= 2 l_y values, \
             got {} rows over {} and {}",
            rows.len(),
            nx_distinct,
            ny_distinct
        )));
    }
    let features = DMatrix::from_fn(rows.len(), 3, |i, j| match j {
        0 => rows[i].l_x as f64,
        1 => rows[i].l_y as f64,
        _ => 1.0,
    });
    let targets: Vec<f64> = rows
        .iter()
        .map(|r| r.s - 0.5 * r.l_x as f64 * (r.l_y as f64).ln())
        .collect();
    let c = least_squares(&features, &targets)?;

    let mean = targets.iter().sum::<f64>() / targets.len() as f64;
    let ss_tot: f64 = targets.iter().map(|t| (t - mean).powi(2)).sum();
    let ss_res: f64 = (0..targets.len())
        .map(|i| {
            let fit = c[0] * features[(i, 0)] + c[1] * features[(i, 1)] + c[2];
            (targets[i] - fit).powi(2)
        })
        .sum();
    // Constant residuals make ss_tot vanish; the fit is then exact iff
    // ss_res vanishes too.
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res <= 1e-20 {
        1.0
    } else {
        0.0
    };
    Ok(ResidualFit {
        c1: c[0],
        c2: c[1],
        c0: c[2],
        r_squared,
    })
}

fn distinct_extents(rows: &[SweepRow]) -> (usize, usize) {
    let mut lx: Vec<usize> = rows.iter().map(|r| r.l_x).collect();
    let mut ly: Vec<usize> = rows.iter().map(|r| r.l_y).collect();
    lx.sort_unstable();
    lx.dedup();
    ly.sort_unstable();
    ly.dedup();
    (lx.len(), ly.len())
}

/// Per-chain entropy of the gapped sector as a function of window length,
/// windows anchored at the chain end. For l_y >= 2 this equals
/// S1 / (l_y - 1); it saturates as the window outgrows the correlation
/// length.
pub fn saturation_curve(
    couplings: &ChainCouplings,
    geometry: &Geometry,
    mode: ValidationMode,
    l_y: usize,
    lx_grid: &[usize],
) -> Result<Vec<(usize, f64)>> {
    if lx_grid.is_empty() {
        return Err(Error::InvalidInput("window grid must be non-empty".into()));
    }
    let corr = ground_state_correlations(couplings, geometry, mode)?;
    let mut curve = Vec::with_capacity(lx_grid.len());
    for &l_x in lx_grid {
        let spec = BlockSpec::new(l_x, l_y, Placement::Corner)?;
        let bp = extract_block(&corr, &spec)?;
        let spectrum = block_spectrum(&bp)?;
        let (per_chain, _) = entropy_from_mu(spectrum.degenerate())?;
        curve.push((l_x, per_chain));
    }
    Ok(curve)
}

/// One chain-count probe of the eigenvalue-shift bound.
#[derive(Debug, Clone, Copy)]
pub struct LidskiiRow {
    pub l_y: usize,
    /// max_k |alpha_k(A0 D0 + l_y A0 D1) - l_y alpha_k(A0 D1)|, both sides
    /// sorted ascending.
    pub max_deviation: f64,
    /// Relative error of sum_k alpha_k against tr(A0 D0) + l_y tr(A0 D1).
    pub trace_error: f64,
}

#[derive(Debug, Clone)]
pub struct LidskiiReport {
    bound: f64,
    rows: Vec<LidskiiRow>,
}

impl LidskiiReport {
    /// lambda_max(A0 D0), the shift budget every deviation must respect.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn rows(&self) -> &[LidskiiRow] {
        &self.rows
    }

    pub fn all_within_bound(&self) -> bool {
        // Tiny slack: equality is attained when D1 = 0 and eigenvalue
        // rounding can land either side of it.
        let limit = self.bound * (1.0 + 1e-9) + 1e-12;
        self.rows.iter().all(|r| r.max_deviation <= limit)
    }
}

/// Checks that adding the gapped-sector window shifts each eigenvalue of
/// l_y A0 D1 by no more than lambda_max(A0 D0), for every l_y in the grid.
/// A0 is positive definite, so all spectra come from the same symmetric
/// congruence and sorted pairing is the right one.
pub fn lidskii_check(bp: &BlockPair, ly_grid: &[usize]) -> Result<LidskiiReport> {
    if ly_grid.is_empty() {
        return Err(Error::InvalidInput("l_y grid must be non-empty".into()));
    }
    let base = product_eigenvalues(bp.a0(), bp.d0(), "gapped window A0")?;
    let bound = *base.last().expect("window is non-empty");
    let collective = product_eigenvalues(bp.a0(), bp.d1(), "coupling window A0")?;
    let tr_d0 = (bp.a0() * bp.d0()).trace();
    let tr_d1 = (bp.a0() * bp.d1()).trace();

    let mut rows = Vec::with_capacity(ly_grid.len());
    for &l_y in ly_grid {
        let shifted = bp.d0() + bp.d1() * l_y as f64;
        let alphas = product_eigenvalues(bp.a0(), &shifted, "shifted window A0")?;
        let max_deviation = alphas
            .iter()
            .zip(collective.iter())
            .map(|(a, c)| (a - l_y as f64 * c).abs())
            .fold(0.0, f64::max);
        let sum: f64 = alphas.iter().sum();
        let expect = tr_d0 + l_y as f64 * tr_d1;
        let trace_error = (sum - expect).abs() / expect.abs().max(1.0);
        rows.push(LidskiiRow {
            l_y,
            max_deviation,
            trace_error,
        });
    }
    Ok(LidskiiReport { bound, rows })
}

/// One window-length probe of the trace average.
#[derive(Debug, Clone, Copy)]
pub struct TraceRatioRow {
    pub l_x: usize,
    pub average: f64,
    /// Deviation from the circle average, relative to it; absolute when the
    /// average vanishes (decoupled chains).
    pub deviation: f64,
}

#[derive(Debug, Clone)]
pub struct TraceRatioReport {
    constant: f64,
    rows: Vec<TraceRatioRow>,
}

impl TraceRatioReport {
    /// The circle average of q/(lambda - q).
    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn rows(&self) -> &[TraceRatioRow] {
        &self.rows
    }
}

/// Compares tr(A0 D1)/l_x for growing windows against the circle average of
/// q/(lambda - q). Interior windows converge to it as l_x grows.
pub fn szego_consequence_check(
    corr: &GroundStateCorrelations,
    couplings: &ChainCouplings,
    lx_grid: &[usize],
    placement: Placement,
    points: usize,
) -> Result<TraceRatioReport> {
    if lx_grid.is_empty() {
        return Err(Error::InvalidInput("window grid must be non-empty".into()));
    }
    let constant = trace_ratio_constant(couplings.lambda(), couplings.q(), points)?;
    let mut rows = Vec::with_capacity(lx_grid.len());
    for &l_x in lx_grid {
        let spec = BlockSpec::new(l_x, 1, placement)?;
        let bp = extract_block(corr, &spec)?;
        let average = bp.trace_average();
        let deviation = if constant != 0.0 {
            (average - constant).abs() / constant.abs()
        } else {
            average.abs()
        };
        rows.push(TraceRatioRow {
            l_x,
            average,
            deviation,
        });
    }
    Ok(TraceRatioReport { constant, rows })
}

/// Least squares via normal equations after scaling each feature column to
/// unit max-norm; a small pivot after scaling means collinear features.
fn least_squares(features: &DMatrix<f64>, targets: &[f64]) -> Result<Vec<f64>> {
    let cols = features.ncols();
    let mut scale = vec![0.0; cols];
    for j in 0..cols {
        let m = features.column(j).amax();
        if m == 0.0 {
            return Err(Error::DegenerateDesign(format!(
                "feature column {j} is identically zero"
            )));
        }
        scale[j] = 1.0 / m;
    }
    let scaled = DMatrix::from_fn(features.nrows(), cols, |i, j| features[(i, j)] * scale[j]);
    let gram = scaled.transpose() * &scaled;
    let rhs = scaled.transpose() * DVector::from_column_slice(targets);
    let chol = gram.cholesky().ok_or_else(|| {
        Error::DegenerateDesign("normal equations are not positive definite".into())
    })?;
    let l = chol.l_dirty();
    let mut dmin = f64::INFINITY;
    let mut dmax = 0.0f64;
    for j in 0..cols {
        dmin = dmin.min(l[(j, j)]);
        dmax = dmax.max(l[(j, j)]);
    }
    if dmin < 1e-6 * dmax {
        return Err(Error::DegenerateDesign(format!(
            "features are nearly collinear (pivot ratio {:e})",
            dmin / dmax
        )));
    }
    let sol = chol.solve(&rhs);
    Ok((0..cols).map(|j| sol[j] * scale[j]).collect())
}

fn rms_residual(features: &DMatrix<f64>, coeffs: &[f64], targets: &[f64]) -> f64 {
    let n = targets.len();
    let mut ss = 0.0;
    for i in 0..n {
        let fit: f64 = (0..coeffs.len()).map(|j| coeffs[j] * features[(i, j)]).sum();
        ss += (targets[i] - fit).powi(2);
    }
    (ss / n as f64).sqrt()
}

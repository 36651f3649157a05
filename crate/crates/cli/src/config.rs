//! TOML run configuration: sections [model], [geometry], [block], [run].
//! Unknown keys are rejected so typos fail loudly instead of being ignored.

use std::path::{Path, PathBuf};

use chainent::model::{ChainCouplings, Geometry, Placement, ValidationMode};
use chainent::spectral::{ToeplitzCoeffs, DEFAULT_QUADRATURE_POINTS};
use serde::Deserialize;

use crate::commands::Failure;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: ModelSection,
    pub geometry: GeometrySection,
    pub block: Option<BlockSection>,
    pub run: Option<RunSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub lambda: Vec<f64>,
    pub q: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub n_x: usize,
    pub n_y: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSection {
    pub l_x: usize,
    pub l_y: usize,
    pub placement: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub mode: Option<String>,
    pub grid: Option<String>,
    pub points: Option<usize>,
    pub out: Option<PathBuf>,
    pub bits: Option<bool>,
    pub timings: Option<bool>,
    /// Mismatch tolerance for the oracle-check and spectrum subcommands.
    pub tolerance: Option<f64>,
    /// Accepted for completeness; only `true` is valid, output is always
    /// reproducible.
    pub deterministic: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
        let config: FileConfig = toml::from_str(&text)
            .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
        if let Some(run) = &config.run {
            if run.deterministic == Some(false) {
                return Err(Failure::config(
                    "run.deterministic = false is not supported; output is always deterministic"
                        .into(),
                ));
            }
        }
        Ok(config)
    }
}

pub fn parse_mode(text: &str) -> Result<ValidationMode, Failure> {
    match text {
        "strict" => Ok(ValidationMode::Strict),
        "permissive" => Ok(ValidationMode::Permissive),
        other => Err(Failure::config(format!(
            "unknown mode {other:?}, expected strict or permissive"
        ))),
    }
}

pub fn parse_placement(text: &str) -> Result<Placement, Failure> {
    if text == "corner" {
        return Ok(Placement::Corner);
    }
    if text == "centered" {
        return Ok(Placement::Centered);
    }
    if let Some(offset) = text.strip_prefix("offset=") {
        let k: usize = offset.parse().map_err(|_| {
            Failure::config(format!("bad placement offset {offset:?}, expected an integer"))
        })?;
        return Ok(Placement::Offset(k));
    }
    Err(Failure::config(format!(
        "unknown placement {text:?}, expected corner, centered, or offset=<k>"
    )))
}

/// Parses a grid like "lx=2,4,8;ly=16,32,64" (axis order free).
pub fn parse_grid(text: &str) -> Result<(Vec<usize>, Vec<usize>), Failure> {
    let mut lx = None;
    let mut ly = None;
    for part in text.split(';') {
        let (name, values) = part.split_once('=').ok_or_else(|| {
            Failure::config(format!("bad grid part {part:?}, expected lx=... or ly=..."))
        })?;
        let parsed: Result<Vec<usize>, _> =
            values.split(',').map(|v| v.trim().parse::<usize>()).collect();
        let parsed = parsed
            .map_err(|_| Failure::config(format!("bad grid values {values:?} for {name}")))?;
        if parsed.is_empty() {
            return Err(Failure::config(format!("empty grid axis {name}")));
        }
        match name.trim() {
            "lx" if lx.is_none() => lx = Some(parsed),
            "ly" if ly.is_none() => ly = Some(parsed),
            "lx" | "ly" => {
                return Err(Failure::config(format!("grid axis {name} given twice")))
            }
            other => {
                return Err(Failure::config(format!(
                    "unknown grid axis {other:?}, expected lx and ly"
                )))
            }
        }
    }
    match (lx, ly) {
        (Some(lx), Some(ly)) => Ok((lx, ly)),
        _ => Err(Failure::config(
            "grid must specify both lx=... and ly=...".into(),
        )),
    }
}

/// Config after merging CLI overrides; CLI flags win over file values.
pub struct Resolved {
    pub couplings: ChainCouplings,
    pub geometry: Geometry,
    pub mode: ValidationMode,
    pub placement: Placement,
    pub block: Option<(usize, usize)>,
    pub grid: Option<(Vec<usize>, Vec<usize>)>,
    pub points: usize,
    pub out: Option<PathBuf>,
    pub bits: bool,
    pub timings: bool,
    pub tolerance: f64,
}

pub struct Overrides<'a> {
    pub mode: Option<&'a str>,
    pub placement: Option<&'a str>,
    pub grid: Option<&'a str>,
    pub out: Option<&'a Path>,
    pub bits: bool,
    pub timings: bool,
}

pub fn resolve(path: &Path, overrides: &Overrides) -> Result<Resolved, Failure> {
    let file = FileConfig::load(path)?;
    let lambda = ToeplitzCoeffs::new(file.model.lambda).map_err(Failure::in_config)?;
    let q = ToeplitzCoeffs::new(file.model.q).map_err(Failure::in_config)?;
    let couplings = ChainCouplings::new(lambda, q);
    let geometry =
        Geometry::new(file.geometry.n_x, file.geometry.n_y).map_err(Failure::in_config)?;

    let run = file.run.unwrap_or_default();
    let mode_text = overrides
        .mode
        .map(str::to_owned)
        .or(run.mode)
        .unwrap_or_else(|| "strict".into());
    let placement_text = overrides
        .placement
        .map(str::to_owned)
        .or_else(|| file.block.as_ref().and_then(|b| b.placement.clone()))
        .unwrap_or_else(|| "corner".into());
    let grid_text = overrides.grid.map(str::to_owned).or(run.grid);

    Ok(Resolved {
        couplings,
        geometry,
        mode: parse_mode(&mode_text)?,
        placement: parse_placement(&placement_text)?,
        block: file.block.map(|b| (b.l_x, b.l_y)),
        grid: grid_text.as_deref().map(parse_grid).transpose()?,
        points: run.points.unwrap_or(DEFAULT_QUADRATURE_POINTS),
        out: overrides.out.map(Path::to_path_buf).or(run.out),
        bits: overrides.bits || run.bits.unwrap_or(false),
        timings: overrides.timings || run.timings.unwrap_or(false),
        tolerance: run.tolerance.unwrap_or(1e-8),
    })
}

//! Grid scans of scalar observables in a transverse plane.
//!
//! Nodes sit at cell centres and are evaluated independently (in parallel
//! over rows). Normalization happens after every node is done, so the output
//! does not depend on evaluation order.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beam::{
    sample_field, Backend, BeamError, BeamSpec, DerivativeOrder, FieldComponents, FieldSample,
    FieldSource,
};
use crate::coupling::{
    averaged_strength, Convention, CouplingError, Geometry, StrengthFunctional, TransitionSpec,
};
use crate::motion::{
    sideband_from_sample, sideband_term_magnitude, Branch, LambDicke, MotionError, SidebandRequest,
    TrapMode, TrapSpec,
};

/// Node values smaller than this fraction of the summed moduli of the terms
/// that produced them are at the rounding level of the field evaluation and
/// are stored as exact zeros.
pub const ROUNDOFF_FLOOR: f64 = 1e-14;

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScanError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("invalid observable: {0}")]
    Observable(String),
    #[error(transparent)]
    Beam(#[from] BeamError),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
    #[error(transparent)]
    Motion(#[from] MotionError),
    #[error("non-finite value at x = {x:e} m, y = {y:e} m")]
    NonFinite { x: f64, y: f64 },
    #[error("grids differ: {0}")]
    GridMismatch(String),
}

impl ScanError {
    /// True for failures of the numerics rather than of the configuration.
    pub fn is_numerical(&self) -> bool {
        matches!(self, ScanError::NonFinite { .. })
    }
}

/// Rectangular grid in the plane `z`, all lengths in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    #[serde(default)]
    pub z: f64,
}

impl Grid {
    /// Square grid over `[-half_extent, half_extent]^2`.
    pub fn square(half_extent: f64, n: usize, z: f64) -> Self {
        Grid {
            x_min: -half_extent,
            x_max: half_extent,
            y_min: -half_extent,
            y_max: half_extent,
            nx: n,
            ny: n,
            z,
        }
    }

    pub fn validate(&self) -> Result<(), ScanError> {
        if self.nx < 2 || self.ny < 2 {
            return Err(ScanError::Grid(format!(
                "resolution must be at least 2x2, got {}x{}",
                self.nx, self.ny
            )));
        }
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max, self.z]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(ScanError::Grid("extent must be finite".into()));
        }
        if !(self.x_max > self.x_min) || !(self.y_max > self.y_min) {
            return Err(ScanError::Grid(
                "extent must satisfy x_max > x_min and y_max > y_min".into(),
            ));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / self.ny as f64
    }

    /// Node coordinates are measured from the middle of the range, so an odd
    /// node count puts a node exactly on the centre and symmetric ranges give
    /// exactly mirrored coordinates.
    pub fn x(&self, i: usize) -> f64 {
        centred(self.x_min, self.x_max, self.nx, i)
    }

    pub fn y(&self, j: usize) -> f64 {
        centred(self.y_min, self.y_max, self.ny, j)
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny).map(|j| self.y(j)).collect()
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major index of node `(i, j)`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    #[serde(rename = "Ez")]
    Ez,
    #[serde(rename = "sigma+")]
    SigmaPlus,
    #[serde(rename = "sigma-")]
    SigmaMinus,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::Ez, Component::SigmaPlus, Component::SigmaMinus];

    pub fn pick(self, c: &FieldComponents) -> Complex64 {
        match self {
            Component::Ez => c.ez,
            Component::SigmaPlus => c.sigma_plus,
            Component::SigmaMinus => c.sigma_minus,
        }
    }

    /// Short label suitable for file names.
    pub fn label(self) -> &'static str {
        match self {
            Component::Ez => "Ez",
            Component::SigmaPlus => "Esigma+1",
            Component::SigmaMinus => "Esigma-1",
        }
    }
}

impl std::str::FromStr for Component {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ez" | "z" => Ok(Component::Ez),
            "sigma+" | "sigma+1" | "s+" | "+1" | "1" | "plus" | "esigma+1" => {
                Ok(Component::SigmaPlus)
            }
            "sigma-" | "sigma-1" | "s-" | "-1" | "minus" | "esigma-1" => Ok(Component::SigmaMinus),
            other => Err(format!(
                "unknown field component '{other}' (expected Ez, sigma+ or sigma-)"
            )),
        }
    }
}

fn centred(min: f64, max: f64, n: usize, i: usize) -> f64 {
    let offset = i as f64 - (n as f64 - 1.0) / 2.0;
    0.5 * (min + max) + offset * ((max - min) / n as f64)
}

/// Quantity evaluated at every grid node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Observable {
    Field {
        component: Component,
    },
    Strength {
        transition: TransitionSpec,
        #[serde(default)]
        geometry: Geometry,
        #[serde(default)]
        convention: Convention,
    },
    AveragedStrength {
        transition: TransitionSpec,
        #[serde(default)]
        geometry: Geometry,
        #[serde(default)]
        convention: Convention,
        widths_m: [f64; 3],
        quadrature_order: usize,
    },
    /// Carrier or first-order sideband with the trap centred on each node
    /// (the trap's own centre is ignored). With `rescale`, sidebands are
    /// divided by the Lamb-Dicke parameter of their mode: `k x0` for `Z`
    /// and `sqrt2 x0 / w0` for `X` and `Y`.
    Sideband {
        transition: TransitionSpec,
        #[serde(default)]
        geometry: Geometry,
        #[serde(default)]
        convention: Convention,
        trap: TrapSpec,
        request: SidebandRequest,
        #[serde(default)]
        rescale: bool,
    },
}

impl Observable {
    fn validate(&self) -> Result<(), ScanError> {
        match self {
            Observable::AveragedStrength {
                widths_m,
                quadrature_order,
                ..
            } => {
                if !widths_m.iter().all(|w| w.is_finite() && *w > 0.0) {
                    return Err(ScanError::Observable(format!(
                        "widths must be positive, got {widths_m:?}"
                    )));
                }
                if *quadrature_order < 1 {
                    return Err(ScanError::Observable(
                        "quadrature order must be at least 1".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn field_order(&self) -> DerivativeOrder {
        match self {
            Observable::Field { .. } => DerivativeOrder::Value,
            Observable::Strength { transition, .. } => transition.multipole().field_order(),
            Observable::AveragedStrength { .. } => DerivativeOrder::Value,
            Observable::Sideband {
                transition,
                request,
                ..
            } => match request.branch {
                Branch::Carrier => transition.multipole().field_order(),
                _ => transition.multipole().derivative_field_order(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub grid: Grid,
    pub beam: BeamSpec,
    pub observable: Observable,
    #[serde(default)]
    pub backend: Backend,
    /// Keep the complex values alongside the moduli.
    #[serde(default)]
    pub keep_complex: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl Provenance {
    pub fn now() -> Self {
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Provenance {
            tool_version: TOOL_VERSION.to_string(),
            timestamp,
        }
    }
}

/// Scan result: normalized moduli in row-major order (`y` outer, `x` inner).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapDataset {
    pub values: Vec<f64>,
    /// Raw complex values, when requested.
    pub complex: Option<Vec<Complex64>>,
    /// Global maximum of the raw moduli; zero for an identically zero map.
    pub scale_factor: f64,
    pub config: ScanConfig,
    pub provenance: Provenance,
}

impl MapDataset {
    pub fn grid(&self) -> &Grid {
        &self.config.grid
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.config.grid.index(i, j)]
    }

    /// Raw (un-normalized) modulus at node `(i, j)`.
    pub fn raw(&self, i: usize, j: usize) -> f64 {
        self.value(i, j) * self.scale_factor
    }

    /// Grid indices of the largest normalized value (first in row-major order).
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (k, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = k;
            }
        }
        (best % self.config.grid.nx, best / self.config.grid.nx)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapDifference {
    pub max_abs_diff: f64,
    pub rms_diff: f64,
}

/// Difference statistics of the normalized values of two maps on the same grid.
pub fn compare_maps(a: &MapDataset, b: &MapDataset) -> Result<MapDifference, ScanError> {
    let (ga, gb) = (a.grid(), b.grid());
    if ga != gb {
        return Err(ScanError::GridMismatch(format!("{ga:?} vs {gb:?}")));
    }
    Ok(compare_values(&a.values, &b.values))
}

/// Elementwise difference statistics of two equally long value arrays.
pub fn compare_values(a: &[f64], b: &[f64]) -> MapDifference {
    assert_eq!(a.len(), b.len(), "value arrays differ in length");
    let mut max_abs_diff: f64 = 0.0;
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = (x - y).abs();
        max_abs_diff = max_abs_diff.max(d);
        sum += d * d;
    }
    let rms_diff = if a.is_empty() {
        0.0
    } else {
        (sum / a.len() as f64).sqrt()
    };
    MapDifference {
        max_abs_diff,
        rms_diff,
    }
}

/// Observable with its coefficient contraction precomputed.
enum Prepared<'a> {
    Field(Component),
    Strength(StrengthFunctional),
    Averaged {
        obs: &'a Observable,
    },
    Sideband {
        functional: StrengthFunctional,
        trap: TrapSpec,
        request: SidebandRequest,
        scale: f64,
    },
}

fn prepare<'a>(obs: &'a Observable, beam: &BeamSpec) -> Result<Prepared<'a>, ScanError> {
    obs.validate()?;
    Ok(match obs {
        Observable::Field { component } => Prepared::Field(*component),
        Observable::Strength {
            transition,
            geometry,
            convention,
        } => Prepared::Strength(StrengthFunctional::new(transition, geometry, *convention)),
        Observable::AveragedStrength { .. } => Prepared::Averaged { obs },
        Observable::Sideband {
            transition,
            geometry,
            convention,
            trap,
            request,
            rescale,
        } => {
            let scale = if *rescale && request.branch != Branch::Carrier {
                let omega = trap.frequencies()[request.mode.index()];
                let kind = match request.mode {
                    TrapMode::Z => LambDicke::Longitudinal {
                        wavenumber: beam.wavenumber(),
                    },
                    _ => LambDicke::Transverse {
                        waist: beam.waist(),
                    },
                };
                1.0 / kind.eta(trap.mass(), omega)?
            } else {
                1.0
            };
            Prepared::Sideband {
                functional: StrengthFunctional::new(transition, geometry, *convention),
                trap: *trap,
                request: *request,
                scale,
            }
        }
    })
}

impl Prepared<'_> {
    fn evaluate<S: FieldSource + ?Sized>(
        &self,
        source: &S,
        sample: &FieldSample,
        point: [f64; 3],
        backend: Backend,
    ) -> Result<Complex64, ScanError> {
        let (value, magnitude) = match self {
            Prepared::Field(c) => {
                let v = c.pick(&FieldComponents::from_field(&sample.e));
                (v, sample.e.iter().map(|e| e.norm()).sum::<f64>())
            }
            Prepared::Strength(f) => (f.evaluate(sample), f.term_magnitude(sample)),
            Prepared::Averaged { obs } => match obs {
                Observable::AveragedStrength {
                    transition,
                    geometry,
                    convention,
                    widths_m,
                    quadrature_order,
                } => {
                    let v = averaged_strength(
                        source,
                        point,
                        *widths_m,
                        transition,
                        geometry,
                        *quadrature_order,
                        *convention,
                        backend,
                    )?;
                    (v, 0.0)
                }
                _ => unreachable!("prepared from an averaged observable"),
            },
            Prepared::Sideband {
                functional,
                trap,
                request,
                scale,
            } => {
                let trap = trap.with_center(point);
                let v = sideband_from_sample(functional, sample, &trap, request) * *scale;
                (
                    v,
                    sideband_term_magnitude(functional, sample, &trap, request) * scale.abs(),
                )
            }
        };
        Ok(apply_floor(value, magnitude))
    }
}

/// Replace a value at the rounding level of its own terms by an exact zero.
pub fn apply_floor(value: Complex64, term_magnitude: f64) -> Complex64 {
    if value.norm() <= ROUNDOFF_FLOOR * term_magnitude {
        Complex64::new(0.0, 0.0)
    } else {
        value
    }
}

fn finish(
    raw: Vec<Complex64>,
    config: ScanConfig,
    provenance: Provenance,
) -> Result<MapDataset, ScanError> {
    let grid = config.grid;
    for (k, v) in raw.iter().enumerate() {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(ScanError::NonFinite {
                x: grid.x(k % grid.nx),
                y: grid.y(k / grid.nx),
            });
        }
    }
    let moduli: Vec<f64> = raw.iter().map(|v| v.norm()).collect();
    let scale_factor = moduli.iter().copied().fold(0.0, f64::max);
    let values = if scale_factor > 0.0 {
        moduli.iter().map(|m| m / scale_factor).collect()
    } else {
        vec![0.0; moduli.len()]
    };
    let complex = config.keep_complex.then_some(raw);
    Ok(MapDataset {
        values,
        complex,
        scale_factor,
        config,
        provenance,
    })
}

/// Evaluate several observables of one beam on one grid, sharing the field
/// samples between them. Results come back in the order of `observables`.
pub fn run_scans(
    grid: &Grid,
    beam: &BeamSpec,
    observables: &[Observable],
    backend: Backend,
    keep_complex: bool,
) -> Result<Vec<MapDataset>, ScanError> {
    grid.validate()?;
    let prepared = observables
        .iter()
        .map(|o| prepare(o, beam))
        .collect::<Result<Vec<_>, _>>()?;
    if backend == Backend::Analytic
        && beam
            .analytic_sample([0.0; 3], DerivativeOrder::Value)
            .is_none()
    {
        return Err(BeamError::AnalyticUnsupported.into());
    }
    let order = observables
        .iter()
        .map(Observable::field_order)
        .max()
        .unwrap_or(DerivativeOrder::Value);
    let n_obs = observables.len();

    let rows: Vec<Vec<Vec<Complex64>>> = (0..grid.ny)
        .into_par_iter()
        .map(|j| {
            let y = grid.y(j);
            let mut row = vec![Vec::with_capacity(grid.nx); n_obs];
            for i in 0..grid.nx {
                let point = [grid.x(i), y, grid.z];
                let sample = sample_field(beam, point, order, backend)?;
                for (k, p) in prepared.iter().enumerate() {
                    row[k].push(p.evaluate(beam, &sample, point, backend)?);
                }
            }
            Ok(row)
        })
        .collect::<Result<_, ScanError>>()?;

    let provenance = Provenance::now();
    let mut out = Vec::with_capacity(n_obs);
    for (k, obs) in observables.iter().enumerate() {
        let raw: Vec<Complex64> = rows.iter().flat_map(|r| r[k].iter().copied()).collect();
        let config = ScanConfig {
            grid: *grid,
            beam: beam.clone(),
            observable: obs.clone(),
            backend,
            keep_complex,
        };
        out.push(finish(raw, config, provenance.clone())?);
    }
    Ok(out)
}

pub fn run_scan(config: &ScanConfig) -> Result<MapDataset, ScanError> {
    let mut maps = run_scans(
        &config.grid,
        &config.beam,
        std::slice::from_ref(&config.observable),
        config.backend,
        config.keep_complex,
    )?;
    Ok(maps.remove(0))
}

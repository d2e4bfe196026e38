//! Declarative run files (TOML or JSON). Unknown keys are rejected and every
//! physical quantity carries its unit in the key name.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use structlight::beam::{Backend, BeamPreset, BeamSpec, Sigma};
use structlight::coupling::{Convention, Geometry, Multipole, TransitionSpec};
use structlight::motion::{Branch, SidebandRequest, TrapMode, TrapSpec, ATOMIC_MASS_UNIT};
use structlight::scan::{Component, Grid, Observable};
use structlight::special::HalfInt;

use super::CliError;

const UM: f64 = 1e-6;

fn default_output_dir() -> PathBuf {
    PathBuf::from(".")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunFile {
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub backend: Backend,
    #[serde(default)]
    pub keep_complex: bool,
    #[serde(default)]
    pub grid: GridSection,
    pub beams: Vec<BeamEntry>,
    #[serde(default)]
    pub transition: TransitionSection,
    #[serde(default)]
    pub geometry: GeometrySection,
    #[serde(default)]
    pub trap: TrapSection,
    pub observables: Vec<ObservableEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub nx: usize,
    pub ny: usize,
    pub x_range_um: [f64; 2],
    pub y_range_um: [f64; 2],
    pub z_um: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            nx: 256,
            ny: 256,
            x_range_um: [-2.0, 2.0],
            y_range_um: [-2.0, 2.0],
            z_um: 0.0,
        }
    }
}

impl GridSection {
    pub fn to_grid(&self) -> Grid {
        Grid {
            x_min: self.x_range_um[0] * UM,
            x_max: self.x_range_um[1] * UM,
            y_min: self.y_range_um[0] * UM,
            y_max: self.y_range_um[1] * UM,
            nx: self.nx,
            ny: self.ny,
            z: self.z_um * UM,
        }
    }
}

fn default_sigma() -> i64 {
    1
}
fn default_waist_um() -> f64 {
    1.0
}
fn default_wavelength_um() -> f64 {
    0.729
}
fn default_amplitude() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamEntry {
    /// Used in output file names; derived from the beam when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// `gaussian`, `lg:l,p`, `hg:m,n`, `radial` or `azimuthal`.
    pub beam: String,
    #[serde(default = "default_sigma")]
    pub sigma: i64,
    #[serde(default = "default_waist_um")]
    pub waist_um: f64,
    #[serde(default = "default_wavelength_um")]
    pub wavelength_um: f64,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
}

impl BeamEntry {
    pub fn preset(&self) -> Result<BeamPreset, CliError> {
        self.beam
            .parse::<BeamPreset>()
            .map_err(|e| CliError::Config(format!("beams.beam: {e}")))
    }

    pub fn build(&self) -> Result<BeamSpec, CliError> {
        let sigma = Sigma::try_from(self.sigma)
            .map_err(|e| CliError::Config(format!("beams.sigma: {e}")))?;
        let spec = self
            .preset()?
            .build(sigma, self.wavelength_um * UM, self.waist_um * UM)
            .and_then(|b| b.with_amplitude(self.amplitude))
            .map_err(|e| CliError::Config(format!("beams: {e}")))?;
        Ok(spec)
    }

    pub fn label(&self) -> Result<String, CliError> {
        if let Some(name) = &self.name {
            return Ok(sanitize(name));
        }
        let preset = self.preset()?;
        let base = sanitize(&preset.to_string());
        Ok(if preset.is_vector_beam() {
            base
        } else {
            format!("{base}_s{:+}", self.sigma)
        })
    }
}

/// Keep file names portable: letters, digits, `+`, `-`, `_`, `.`.
pub fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "+-_.".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransitionSection {
    pub j1: HalfInt,
    pub m1: HalfInt,
    pub j2: HalfInt,
    pub multipole: Multipole,
}

impl Default for TransitionSection {
    fn default() -> Self {
        TransitionSection {
            j1: HalfInt::from_twice(1),
            m1: HalfInt::from_twice(1),
            j2: HalfInt::from_twice(5),
            multipole: Multipole::E2DeltaJ2,
        }
    }
}

impl TransitionSection {
    pub fn m2(&self, dm: i32) -> HalfInt {
        self.m1 + HalfInt::from_int(dm)
    }

    pub fn with_dm(&self, dm: i32) -> Result<TransitionSpec, CliError> {
        TransitionSpec::new(self.j1, self.m1, self.j2, self.m2(dm), self.multipole)
            .map_err(|e| CliError::Config(format!("transition (dm = {dm:+}): {e}")))
    }

    /// Every `dm` within the tensor rank whose final projection exists.
    pub fn allowed_dms(&self) -> Vec<i32> {
        let r = self.multipole.rank() as i32;
        (-r..=r)
            .filter(|&dm| self.m2(dm).check_projection_of(self.j2).is_ok())
            .collect()
    }
}

fn default_axis() -> [f64; 3] {
    [0.0, 1.0, 0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    #[serde(default)]
    pub theta_deg: f64,
    #[serde(default = "default_axis")]
    pub axis: [f64; 3],
    #[serde(default)]
    pub convention: Convention,
}

impl Default for GeometrySection {
    fn default() -> Self {
        GeometrySection {
            theta_deg: 0.0,
            axis: default_axis(),
            convention: Convention::Covariant,
        }
    }
}

impl GeometrySection {
    pub fn geometry(&self, theta_override: Option<f64>) -> Result<Geometry, CliError> {
        let theta = theta_override.unwrap_or(self.theta_deg);
        Geometry::new(theta.to_radians(), self.axis)
            .map_err(|e| CliError::Config(format!("geometry: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrapSection {
    pub mass_u: f64,
    /// Trap frequencies `omega / 2 pi` of modes X, Y, Z.
    pub frequencies_mhz: [f64; 3],
    pub axes: [[f64; 3]; 3],
}

impl Default for TrapSection {
    fn default() -> Self {
        TrapSection {
            mass_u: 40.0,
            frequencies_mhz: [1.0; 3],
            axes: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }
}

impl TrapSection {
    pub fn trap(&self) -> Result<TrapSpec, CliError> {
        let omegas = self.frequencies_mhz.map(|f| 2.0 * PI * f * 1e6);
        TrapSpec::new(self.mass_u * ATOMIC_MASS_UNIT, omegas, self.axes, [0.0; 3])
            .map_err(|e| CliError::Config(format!("trap: {e}")))
    }
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObservableEntry {
    Field {
        component: Component,
    },
    Strength {
        dm: i32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta_deg: Option<f64>,
    },
    AveragedStrength {
        dm: i32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta_deg: Option<f64>,
        widths_nm: [f64; 3],
        quadrature_order: usize,
    },
    Sideband {
        dm: i32,
        mode: TrapMode,
        branch: Branch,
        #[serde(default)]
        n: u32,
        #[serde(default = "yes")]
        rescale: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta_deg: Option<f64>,
    },
}

fn signed(v: i32) -> String {
    format!("{v:+}")
}

fn theta_suffix(theta: Option<f64>) -> String {
    match theta {
        Some(t) => format!("_theta{}", sanitize(&t.to_string())),
        None => String::new(),
    }
}

impl ObservableEntry {
    pub fn label(&self) -> String {
        match self {
            ObservableEntry::Field { component } => component.label().to_string(),
            ObservableEntry::Strength { dm, theta_deg } => {
                format!("mu_dm{}{}", signed(*dm), theta_suffix(*theta_deg))
            }
            ObservableEntry::AveragedStrength { dm, theta_deg, .. } => {
                format!("mubar_dm{}{}", signed(*dm), theta_suffix(*theta_deg))
            }
            ObservableEntry::Sideband {
                dm,
                mode,
                branch,
                n,
                theta_deg,
                ..
            } => {
                let b = match branch {
                    Branch::Carrier => "carrier".to_string(),
                    Branch::Bsb => format!("bsb{mode:?}_n{n}"),
                    Branch::Rsb => format!("rsb{mode:?}_n{n}"),
                };
                format!("{b}_dm{}{}", signed(*dm), theta_suffix(*theta_deg))
            }
        }
    }

    pub fn resolve(&self, run: &RunFile) -> Result<Observable, CliError> {
        let convention = run.geometry.convention;
        Ok(match self {
            ObservableEntry::Field { component } => Observable::Field {
                component: *component,
            },
            ObservableEntry::Strength { dm, theta_deg } => Observable::Strength {
                transition: run.transition.with_dm(*dm)?,
                geometry: run.geometry.geometry(*theta_deg)?,
                convention,
            },
            ObservableEntry::AveragedStrength {
                dm,
                theta_deg,
                widths_nm,
                quadrature_order,
            } => Observable::AveragedStrength {
                transition: run.transition.with_dm(*dm)?,
                geometry: run.geometry.geometry(*theta_deg)?,
                convention,
                widths_m: widths_nm.map(|w| w * 1e-9),
                quadrature_order: *quadrature_order,
            },
            ObservableEntry::Sideband {
                dm,
                mode,
                branch,
                n,
                rescale,
                theta_deg,
            } => Observable::Sideband {
                transition: run.transition.with_dm(*dm)?,
                geometry: run.geometry.geometry(*theta_deg)?,
                convention,
                trap: run.trap.trap()?,
                request: SidebandRequest {
                    mode: *mode,
                    n: *n,
                    branch: *branch,
                },
                rescale: *rescale,
            },
        })
    }
}

impl RunFile {
    /// Parse TOML or JSON; a JSON sidecar written by this tool is accepted
    /// through its `run` key.
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"))
            || text.trim_start().starts_with('{');
        if is_json {
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let run = match value.get("run") {
                Some(inner) if value.get("scale_factor").is_some() => inner.clone(),
                _ => value,
            };
            if run.is_null() {
                return Err(CliError::Config(format!(
                    "{}: sidecar carries no run description",
                    path.display()
                )));
            }
            serde_json::from_value(run)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        } else {
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.beams.is_empty() {
            return Err(CliError::Config(
                "beams: at least one beam is required".into(),
            ));
        }
        if self.observables.is_empty() {
            return Err(CliError::Config(
                "observables: at least one observable is required".into(),
            ));
        }
        self.grid
            .to_grid()
            .validate()
            .map_err(|e| CliError::Config(format!("grid: {e}")))?;
        let mut labels = Vec::new();
        for beam in &self.beams {
            beam.build()?;
            labels.push(beam.label()?);
        }
        let n = labels.len();
        labels.sort();
        labels.dedup();
        if labels.len() != n {
            return Err(CliError::Config("beams: names must be unique".into()));
        }
        for obs in &self.observables {
            obs.resolve(self)?;
        }
        Ok(())
    }
}

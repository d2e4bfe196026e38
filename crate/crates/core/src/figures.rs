//! Panel definitions for the four focal-plane figure sets and a batched
//! driver that evaluates every panel of one beam from a single pass of field
//! samples.
//!
//! 1. `|E_z|`, `|E_{sigma=+1}|`, `|E_{sigma=-1}|` for each beam.
//! 2. `|mu|` of the `dJ = 2` quadrupole line from `m1 = +1/2` for `dm = -2..=2`.
//! 3. `|mu|` for `dm = 0` with the quantization axis tilted by
//!    `theta in {0, 30, 45, 90}` degrees about `y`.
//! 4. `dm = +1` carrier and blue sidebands of modes `X`, `Y`, `Z` from the
//!    motional ground state, sidebands divided by their Lamb-Dicke parameter.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::beam::{Backend, BeamPreset, BeamSpec, Sigma};
use crate::coupling::{Convention, Geometry, Multipole, TransitionSpec};
use crate::motion::{Branch, SidebandRequest, TrapMode, TrapSpec, ATOMIC_MASS_UNIT};
use crate::scan::{run_scans, Component, Grid, MapDataset, Observable, ScanError};
use crate::special::HalfInt;

pub const TILT_ANGLES_DEG: [f64; 4] = [0.0, 30.0, 45.0, 90.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureSettings {
    pub waist_m: f64,
    pub wavelength_m: f64,
    pub grid: Grid,
    pub mass_kg: f64,
    /// Angular trap frequencies of modes X, Y, Z.
    pub trap_angular_frequencies: [f64; 3],
    #[serde(default)]
    pub backend: Backend,
}

impl Default for FigureSettings {
    fn default() -> Self {
        let waist = 1e-6;
        FigureSettings {
            waist_m: waist,
            wavelength_m: 0.729e-6,
            grid: Grid::square(2.0 * waist, 256, 0.0),
            mass_kg: 40.0 * ATOMIC_MASS_UNIT,
            trap_angular_frequencies: [2.0 * PI * 1e6; 3],
            backend: Backend::Auto,
        }
    }
}

/// One map of one figure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    pub figure: u8,
    /// File-name friendly identifier, unique across all figures.
    pub id: String,
    pub beam_label: String,
    pub beam: BeamSpec,
    pub observable: Observable,
}

/// The six beams shown in every figure: label, preset, polarization.
pub fn figure_beams() -> Vec<(&'static str, BeamPreset, Sigma)> {
    vec![
        ("gaussian", BeamPreset::Gaussian, Sigma::Plus),
        ("hg10", BeamPreset::Hg { m: 1, n: 0 }, Sigma::Plus),
        ("lg10_s+1", BeamPreset::Lg { l: 1, p: 0 }, Sigma::Plus),
        ("lg10_s-1", BeamPreset::Lg { l: 1, p: 0 }, Sigma::Minus),
        ("radial", BeamPreset::Radial, Sigma::Plus),
        ("azimuthal", BeamPreset::Azimuthal, Sigma::Plus),
    ]
}

/// `J1 = 1/2, m1 = +1/2 -> J2 = 5/2, m2 = m1 + dm` on the quadrupole line.
pub fn default_transition(dm: i32) -> Result<TransitionSpec, ScanError> {
    Ok(TransitionSpec::new(
        HalfInt::from_twice(1),
        HalfInt::from_twice(1),
        HalfInt::from_twice(5),
        HalfInt::from_twice(1 + 2 * dm),
        Multipole::E2DeltaJ2,
    )?)
}

fn signed(v: i32) -> String {
    if v >= 0 {
        format!("+{v}")
    } else {
        v.to_string()
    }
}

pub fn panels(settings: &FigureSettings) -> Result<Vec<Panel>, ScanError> {
    let trap = TrapSpec::aligned(
        settings.mass_kg,
        settings.trap_angular_frequencies,
        [0.0; 3],
    )?;
    let mut out = Vec::new();
    for (label, preset, sigma) in figure_beams() {
        let beam = preset.build(sigma, settings.wavelength_m, settings.waist_m)?;
        let mut push = |figure: u8, suffix: String, observable: Observable| {
            out.push(Panel {
                figure,
                id: format!("fig{figure}_{label}_{suffix}"),
                beam_label: label.to_string(),
                beam: beam.clone(),
                observable,
            })
        };
        for c in Component::ALL {
            push(1, c.label().to_string(), Observable::Field { component: c });
        }
        for dm in (-2..=2).rev() {
            let observable = Observable::Strength {
                transition: default_transition(dm)?,
                geometry: Geometry::default(),
                convention: Convention::Covariant,
            };
            push(2, format!("dm{}", signed(dm)), observable);
        }
        for deg in TILT_ANGLES_DEG {
            let observable = Observable::Strength {
                transition: default_transition(0)?,
                geometry: Geometry::about_y(deg.to_radians()),
                convention: Convention::Covariant,
            };
            push(3, format!("theta{deg:.0}"), observable);
        }
        let requests = [
            (
                "carrier",
                SidebandRequest {
                    mode: TrapMode::X,
                    n: 0,
                    branch: Branch::Carrier,
                },
            ),
            (
                "bsbX",
                SidebandRequest {
                    mode: TrapMode::X,
                    n: 0,
                    branch: Branch::Bsb,
                },
            ),
            (
                "bsbY",
                SidebandRequest {
                    mode: TrapMode::Y,
                    n: 0,
                    branch: Branch::Bsb,
                },
            ),
            (
                "bsbZ",
                SidebandRequest {
                    mode: TrapMode::Z,
                    n: 0,
                    branch: Branch::Bsb,
                },
            ),
        ];
        for (name, request) in requests {
            let observable = Observable::Sideband {
                transition: default_transition(1)?,
                geometry: Geometry::default(),
                convention: Convention::Covariant,
                trap,
                request,
                rescale: true,
            };
            push(4, name.to_string(), observable);
        }
    }
    Ok(out)
}

/// Evaluate the panels of the selected figures (all when `figures` is empty),
/// one batched scan per beam. Output order follows [`panels`].
pub fn reproduce(
    settings: &FigureSettings,
    figures: &[u8],
) -> Result<Vec<(Panel, MapDataset)>, ScanError> {
    let selected: Vec<Panel> = panels(settings)?
        .into_iter()
        .filter(|p| figures.is_empty() || figures.contains(&p.figure))
        .collect();
    let mut out = Vec::with_capacity(selected.len());
    let mut start = 0;
    while start < selected.len() {
        let label = &selected[start].beam_label;
        let end = start
            + selected[start..]
                .iter()
                .take_while(|p| &p.beam_label == label)
                .count();
        let group = &selected[start..end];
        let observables: Vec<Observable> = group.iter().map(|p| p.observable.clone()).collect();
        let maps = run_scans(
            &settings.grid,
            &group[0].beam,
            &observables,
            settings.backend,
            false,
        )?;
        out.extend(group.iter().cloned().zip(maps));
        start = end;
    }
    Ok(out)
}

//! First-order motional sidebands of a single harmonically trapped atom.
//!
//! The bare strength is expanded to first order about the trap centre. A
//! sideband on mode `p` picks up `d_p mu * x0_p * sqrt(n + 1)` (blue) or
//! `sqrt(n)` (red), with `x0_p = sqrt(hbar / 2 m w_p)` the zero-point length.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beam::{sample_field, Backend, FieldSample, FieldSource};
use crate::coupling::{Convention, CouplingError, Geometry, StrengthFunctional, TransitionSpec};

/// Reduced Planck constant, J s (CODATA 2018).
pub const HBAR: f64 = 1.054571817e-34;
/// Unified atomic mass unit, kg (CODATA 2018).
pub const ATOMIC_MASS_UNIT: f64 = 1.66053906660e-27;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MotionError {
    #[error("mass must be positive and finite, got {0}")]
    Mass(f64),
    #[error("trap frequency must be positive and finite, got {0}")]
    Frequency(f64),
    #[error("length scale must be positive and finite, got {0}")]
    Length(f64),
    #[error("trap axes must be orthonormal")]
    Axes,
    #[error("derivative direction must be a unit vector, |direction| = {0}")]
    Direction(f64),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
}

impl From<crate::beam::BeamError> for MotionError {
    fn from(e: crate::beam::BeamError) -> Self {
        MotionError::Coupling(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrapMode {
    X,
    Y,
    Z,
}

impl TrapMode {
    pub const ALL: [TrapMode; 3] = [TrapMode::X, TrapMode::Y, TrapMode::Z];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl std::str::FromStr for TrapMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(TrapMode::X),
            "y" => Ok(TrapMode::Y),
            "z" => Ok(TrapMode::Z),
            other => Err(format!("unknown trap mode '{other}' (expected X, Y or Z)")),
        }
    }
}

/// Single-atom harmonic trap. `frequencies` are angular (rad/s) and
/// `axes[q]` is the unit direction of mode `q` in the beam frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TrapRepr", into = "TrapRepr")]
pub struct TrapSpec {
    mass: f64,
    frequencies: [f64; 3],
    axes: [[f64; 3]; 3],
    center: [f64; 3],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrapRepr {
    mass_kg: f64,
    angular_frequencies_rad_s: [f64; 3],
    #[serde(default = "identity_axes")]
    axes: [[f64; 3]; 3],
    #[serde(default)]
    center_m: [f64; 3],
}

fn identity_axes() -> [[f64; 3]; 3] {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

impl TryFrom<TrapRepr> for TrapSpec {
    type Error = MotionError;
    fn try_from(r: TrapRepr) -> Result<Self, MotionError> {
        TrapSpec::new(r.mass_kg, r.angular_frequencies_rad_s, r.axes, r.center_m)
    }
}

impl From<TrapSpec> for TrapRepr {
    fn from(t: TrapSpec) -> Self {
        TrapRepr {
            mass_kg: t.mass,
            angular_frequencies_rad_s: t.frequencies,
            axes: t.axes,
            center_m: t.center,
        }
    }
}

fn check_positive(v: f64, err: fn(f64) -> MotionError) -> Result<(), MotionError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(err(v))
    }
}

impl TrapSpec {
    pub fn new(
        mass: f64,
        frequencies: [f64; 3],
        axes: [[f64; 3]; 3],
        center: [f64; 3],
    ) -> Result<Self, MotionError> {
        check_positive(mass, MotionError::Mass)?;
        for w in frequencies {
            check_positive(w, MotionError::Frequency)?;
        }
        for a in 0..3 {
            for b in 0..3 {
                let dot: f64 = (0..3).map(|k| axes[a][k] * axes[b][k]).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                if !((dot - want).abs() <= 1e-12) {
                    return Err(MotionError::Axes);
                }
            }
        }
        if !center.iter().all(|c| c.is_finite()) {
            return Err(MotionError::Length(f64::NAN));
        }
        Ok(TrapSpec {
            mass,
            frequencies,
            axes,
            center,
        })
    }

    /// Trap with mode axes along the beam-frame axes.
    pub fn aligned(
        mass: f64,
        frequencies: [f64; 3],
        center: [f64; 3],
    ) -> Result<Self, MotionError> {
        Self::new(mass, frequencies, identity_axes(), center)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn frequencies(&self) -> [f64; 3] {
        self.frequencies
    }
    pub fn axes(&self) -> [[f64; 3]; 3] {
        self.axes
    }
    pub fn center(&self) -> [f64; 3] {
        self.center
    }

    pub fn with_center(mut self, center: [f64; 3]) -> Self {
        self.center = center;
        self
    }

    pub fn zero_point_length(&self, mode: TrapMode) -> f64 {
        (HBAR / (2.0 * self.mass * self.frequencies[mode.index()])).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Carrier,
    Bsb,
    Rsb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SidebandRequest {
    pub mode: TrapMode,
    pub n: u32,
    pub branch: Branch,
}

impl SidebandRequest {
    /// Motional matrix-element factor multiplying `x0 * d_p mu`.
    pub fn ladder_factor(&self) -> f64 {
        match self.branch {
            Branch::Carrier => 1.0,
            Branch::Bsb => f64::from(self.n + 1).sqrt(),
            Branch::Rsb => f64::from(self.n).sqrt(),
        }
    }
}

/// `sqrt(hbar / (2 m w))`.
pub fn zero_point_length(mass: f64, omega: f64) -> Result<f64, MotionError> {
    check_positive(mass, MotionError::Mass)?;
    check_positive(omega, MotionError::Frequency)?;
    Ok((HBAR / (2.0 * mass * omega)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambDicke {
    /// Along the beam: the scale is the wavenumber `k`.
    Longitudinal { wavenumber: f64 },
    /// Across the beam: the scale is `sqrt(2) / w0`.
    Transverse { waist: f64 },
}

impl LambDicke {
    pub fn eta(self, mass: f64, omega: f64) -> Result<f64, MotionError> {
        let x0 = zero_point_length(mass, omega)?;
        match self {
            LambDicke::Longitudinal { wavenumber } => {
                check_positive(wavenumber, MotionError::Length)?;
                Ok(wavenumber * x0)
            }
            LambDicke::Transverse { waist } => {
                check_positive(waist, MotionError::Length)?;
                Ok(std::f64::consts::SQRT_2 / waist * x0)
            }
        }
    }
}

pub fn lamb_dicke(kind: LambDicke, mass: f64, omega: f64) -> Result<f64, MotionError> {
    kind.eta(mass, omega)
}

fn check_direction(d: [f64; 3]) -> Result<(), MotionError> {
    let n = d.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (n - 1.0).abs() <= 1e-12 {
        Ok(())
    } else {
        Err(MotionError::Direction(n))
    }
}

/// Directional derivative of the strength at `r0`, from field second derivatives.
pub fn mu_derivative<S: FieldSource + ?Sized>(
    source: &S,
    r0: [f64; 3],
    direction: [f64; 3],
    trans: &TransitionSpec,
    geom: &Geometry,
    backend: Backend,
) -> Result<Complex64, MotionError> {
    check_direction(direction)?;
    let functional = StrengthFunctional::new(trans, geom, Convention::Covariant);
    let sample = sample_field(
        source,
        r0,
        trans.multipole().derivative_field_order(),
        backend,
    )?;
    Ok(functional.evaluate_derivative(&sample, direction))
}

/// Sideband strength from an already evaluated sample at the trap centre.
/// The sample must carry one derivative order beyond what the multipole
/// consumes when `req` is not a carrier.
pub fn sideband_from_sample(
    functional: &StrengthFunctional,
    sample: &FieldSample,
    trap: &TrapSpec,
    req: &SidebandRequest,
) -> Complex64 {
    match req.branch {
        Branch::Carrier => functional.evaluate(sample),
        _ => {
            let factor = req.ladder_factor();
            if factor == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let d = functional.evaluate_derivative(sample, trap.axes[req.mode.index()]);
            d * (trap.zero_point_length(req.mode) * factor)
        }
    }
}

/// Scale of the rounding error of [`sideband_from_sample`].
pub fn sideband_term_magnitude(
    functional: &StrengthFunctional,
    sample: &FieldSample,
    trap: &TrapSpec,
    req: &SidebandRequest,
) -> f64 {
    match req.branch {
        Branch::Carrier => functional.term_magnitude(sample),
        _ => {
            functional.derivative_term_magnitude(sample, trap.axes[req.mode.index()])
                * trap.zero_point_length(req.mode)
                * req.ladder_factor()
        }
    }
}

/// Carrier or first-order sideband strength at the trap centre.
pub fn sideband_strength<S: FieldSource + ?Sized>(
    source: &S,
    trap: &TrapSpec,
    req: &SidebandRequest,
    trans: &TransitionSpec,
    geom: &Geometry,
    backend: Backend,
) -> Result<Complex64, MotionError> {
    let functional = StrengthFunctional::new(trans, geom, Convention::Covariant);
    let order = match req.branch {
        Branch::Carrier => trans.multipole().field_order(),
        _ => trans.multipole().derivative_field_order(),
    };
    let sample = sample_field(source, trap.center, order, backend)?;
    Ok(sideband_from_sample(&functional, &sample, trap, req))
}

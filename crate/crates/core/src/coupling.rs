//! Relative electronic transition strengths from the spherical-tensor
//! decomposition of the multipole interaction.
//!
//! The dipole term couples the field value, the quadrupole terms couple the
//! field gradient `G_ij = d_i E_j`. For a tensor rank `k` each channel
//! `dm = -k..=k` is a linear functional on the field sample (a
//! [`Contraction`]); the relative strength of `|J1 m1> -> |J2 m2>` is the
//! Clebsch-Gordan weighted sum of the channels. Common radial prefactors and
//! reduced matrix elements are dropped.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beam::{sample_field, Backend, BeamError, DerivativeOrder, FieldSample, FieldSource};
use crate::special::{
    clebsch_gordan, gauss_hermite, wigner_big_d_matrix, AngularMomentumError, HalfInt,
};

const CZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CouplingError {
    #[error(transparent)]
    AngularMomentum(#[from] AngularMomentumError),
    #[error("J2 = {j2} is not reachable from J1 = {j1} with a rank-{rank} operator")]
    Triangle { j1: HalfInt, j2: HalfInt, rank: u32 },
    #[error("rotation axis must be a unit vector, |axis| = {0}")]
    AxisNotUnit(f64),
    #[error("rotation angle must be finite")]
    Angle,
    #[error("wavefunction widths must be positive, got {0:?}")]
    Width([f64; 3]),
    #[error("quadrature order must be at least 1")]
    QuadratureOrder,
    #[error(transparent)]
    Beam(#[from] BeamError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Multipole {
    #[serde(rename = "e1")]
    E1,
    #[serde(rename = "e2-dj1")]
    E2DeltaJ1,
    #[serde(rename = "e2-dj2")]
    E2DeltaJ2,
}

impl Multipole {
    /// Tensor rank, equal to the angular momentum transferred.
    pub fn rank(self) -> u32 {
        match self {
            Multipole::E1 | Multipole::E2DeltaJ1 => 1,
            Multipole::E2DeltaJ2 => 2,
        }
    }

    /// Derivative order of the field consumed by the bare strength.
    pub fn field_order(self) -> DerivativeOrder {
        match self {
            Multipole::E1 => DerivativeOrder::Value,
            _ => DerivativeOrder::First,
        }
    }

    /// Derivative order needed for the first spatial derivative of the strength.
    pub fn derivative_field_order(self) -> DerivativeOrder {
        match self {
            Multipole::E1 => DerivativeOrder::First,
            _ => DerivativeOrder::Second,
        }
    }
}

impl std::str::FromStr for Multipole {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "e1" => Ok(Multipole::E1),
            "e2-dj1" | "e2dj1" => Ok(Multipole::E2DeltaJ1),
            "e2-dj2" | "e2dj2" | "e2" => Ok(Multipole::E2DeltaJ2),
            other => Err(format!(
                "unknown multipole '{other}' (expected e1, e2-dj1, e2-dj2)"
            )),
        }
    }
}

/// Phase and normalization convention of the coefficient tables.
///
/// `Literal` is the textbook table with the plain operator products read off
/// term by term. Its `dm = +1` rows carry the opposite sign to a
/// Condon-Shortley tensor (for E2 `dJ = 1` it is the `dm = -1` row), and its
/// E2 `dm = 0` row has the opposite sign on the transverse diagonal
/// gradients, so the table does not transform under rotations as a spherical
/// tensor. `Covariant` fixes exactly those entries and is used by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Covariant,
    Literal,
}

/// A linear functional on a field sample: `sum_j value_j E_j + sum_ij gradient_ij d_i E_j`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Contraction {
    pub value: [Complex64; 3],
    pub gradient: [[Complex64; 3]; 3],
}

impl Contraction {
    pub fn apply(&self, s: &FieldSample) -> Complex64 {
        let mut acc = CZERO;
        for j in 0..3 {
            acc += self.value[j] * s.e[j];
            for i in 0..3 {
                acc += self.gradient[i][j] * s.jacobian[i][j];
            }
        }
        acc
    }

    /// Derivative of [`Self::apply`] along coordinate axis `p`.
    pub fn apply_derivative(&self, s: &FieldSample, p: usize) -> Complex64 {
        let mut acc = CZERO;
        for j in 0..3 {
            acc += self.value[j] * s.jacobian[p][j];
            for i in 0..3 {
                acc += self.gradient[i][j] * s.hessian[p][i][j];
            }
        }
        acc
    }

    /// Sum of the moduli of the individual terms of [`Self::apply`]; the
    /// rounding error of the contraction and of the field it reads scales
    /// with this.
    pub fn term_magnitude(&self, s: &FieldSample) -> f64 {
        let mut acc = 0.0;
        for j in 0..3 {
            acc += self.value[j].norm() * s.e[j].norm();
            for i in 0..3 {
                acc += self.gradient[i][j].norm() * s.jacobian[i][j].norm();
            }
        }
        acc
    }

    pub fn derivative_term_magnitude(&self, s: &FieldSample, p: usize) -> f64 {
        let mut acc = 0.0;
        for j in 0..3 {
            acc += self.value[j].norm() * s.jacobian[p][j].norm();
            for i in 0..3 {
                acc += self.gradient[i][j].norm() * s.hessian[p][i][j].norm();
            }
        }
        acc
    }

    fn scaled_add(&mut self, c: Complex64, other: &Contraction) {
        for j in 0..3 {
            self.value[j] += c * other.value[j];
            for i in 0..3 {
                self.gradient[i][j] += c * other.gradient[i][j];
            }
        }
    }

    fn scale(mut self, c: Complex64) -> Self {
        for j in 0..3 {
            self.value[j] *= c;
            for i in 0..3 {
                self.gradient[i][j] *= c;
            }
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.value.iter().all(|c| *c == CZERO)
            && self.gradient.iter().flatten().all(|c| *c == CZERO)
    }
}

/// Slot of a coefficient: a field component or a gradient `d_i E_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Field(usize),
    Gradient(usize, usize),
}

/// Coefficient tables for every channel `dm = -rank..=rank`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingCoefficients {
    pub multipole: Multipole,
    pub convention: Convention,
    channels: Vec<Contraction>,
}

impl CouplingCoefficients {
    pub fn rank(&self) -> u32 {
        self.multipole.rank()
    }

    pub fn channel(&self, dm: i32) -> Option<&Contraction> {
        let r = self.rank() as i32;
        if dm.abs() > r {
            return None;
        }
        self.channels.get((dm + r) as usize)
    }

    /// Non-zero entries of one channel.
    pub fn entries(&self, dm: i32) -> Vec<(Slot, Complex64)> {
        let Some(c) = self.channel(dm) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for j in 0..3 {
            if c.value[j] != CZERO {
                out.push((Slot::Field(j), c.value[j]));
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                if c.gradient[i][j] != CZERO {
                    out.push((Slot::Gradient(i, j), c.gradient[i][j]));
                }
            }
        }
        out
    }

    /// Channel values `dm -> contraction(sample)` ordered `dm = -rank..=rank`.
    pub fn channel_values(&self, s: &FieldSample) -> Vec<Complex64> {
        self.channels.iter().map(|c| c.apply(s)).collect()
    }
}

fn field(entries: &[(usize, Complex64)]) -> Contraction {
    let mut c = Contraction::default();
    for &(j, v) in entries {
        c.value[j] = v;
    }
    c
}

fn grad(entries: &[(usize, usize, Complex64)]) -> Contraction {
    let mut c = Contraction::default();
    for &(i, j, v) in entries {
        c.gradient[i][j] = v;
    }
    c
}

const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;

/// Static coefficient table for a multipole (common prefactors dropped).
///
/// The scalar rank-0 part of the quadrupole operator is absent: it couples
/// to the divergence of the field.
pub fn coefficients_for(multipole: Multipole, convention: Convention) -> CouplingCoefficients {
    let lit = convention == Convention::Literal;
    // Rows whose sign differs between the two conventions.
    let flip = if lit { ONE } else { -ONE };
    let channels = match multipole {
        Multipole::E1 => vec![
            field(&[(X, ONE), (Y, I)]),
            field(&[(Z, Complex64::new(SQRT_2, 0.0))]),
            field(&[(X, ONE), (Y, -I)]).scale(flip),
        ],
        Multipole::E2DeltaJ1 => vec![
            grad(&[(Z, X, ONE), (X, Z, -ONE), (Y, Z, -I), (Z, Y, I)]).scale(flip),
            grad(&[(X, Y, ONE), (Y, X, -ONE)]).scale(Complex64::new(0.0, 2.0 / SQRT_2)),
            grad(&[(X, Z, ONE), (Z, X, -ONE), (Y, Z, -I), (Z, Y, I)]),
        ],
        Multipole::E2DeltaJ2 => {
            let transverse = if lit { ONE } else { -ONE };
            vec![
                grad(&[(X, X, ONE), (Y, Y, -ONE), (X, Y, I), (Y, X, I)]),
                grad(&[(X, Z, ONE), (Z, X, ONE), (Y, Z, I), (Z, Y, I)]),
                grad(&[
                    (X, X, transverse),
                    (Y, Y, transverse),
                    (Z, Z, Complex64::new(2.0, 0.0)),
                ])
                .scale(Complex64::new((2.0f64 / 3.0).sqrt(), 0.0)),
                grad(&[(X, Z, ONE), (Z, X, ONE), (Y, Z, -I), (Z, Y, -I)]).scale(flip),
                grad(&[(X, X, ONE), (Y, Y, -ONE), (X, Y, -I), (Y, X, -I)]),
            ]
        }
    };
    CouplingCoefficients {
        multipole,
        convention,
        channels,
    }
}

/// Orientation of the quantization axis relative to the beam frame: the
/// beam-frame z axis rotated by `theta` about `axis`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeometryRepr", into = "GeometryRepr")]
pub struct Geometry {
    theta: f64,
    axis: [f64; 3],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometryRepr {
    theta_rad: f64,
    axis: [f64; 3],
}

impl TryFrom<GeometryRepr> for Geometry {
    type Error = CouplingError;
    fn try_from(r: GeometryRepr) -> Result<Self, CouplingError> {
        Geometry::new(r.theta_rad, r.axis)
    }
}

impl From<Geometry> for GeometryRepr {
    fn from(g: Geometry) -> Self {
        GeometryRepr {
            theta_rad: g.theta,
            axis: g.axis,
        }
    }
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry {
            theta: 0.0,
            axis: [0.0, 1.0, 0.0],
        }
    }
}

impl Geometry {
    pub fn new(theta: f64, axis: [f64; 3]) -> Result<Self, CouplingError> {
        if !theta.is_finite() {
            return Err(CouplingError::Angle);
        }
        let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !((norm - 1.0).abs() <= 1e-12) {
            return Err(CouplingError::AxisNotUnit(norm));
        }
        Ok(Geometry { theta, axis })
    }

    /// Rotation about the beam-frame y axis.
    pub fn about_y(theta: f64) -> Self {
        Geometry {
            theta,
            axis: [0.0, 1.0, 0.0],
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    pub fn is_identity(&self) -> bool {
        self.theta == 0.0
    }

    /// Active rotation matrix (Rodrigues); its columns are the rotated basis vectors.
    pub fn rotation_matrix(&self) -> [[f64; 3]; 3] {
        let [x, y, z] = self.axis;
        let (s, c) = self.theta.sin_cos();
        let t = 1.0 - c;
        [
            [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
            [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
            [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
        ]
    }
}

/// Coefficients of the rotated tensors `T~_q = sum_q' D_{q q'} T_q'`, i.e.
/// channel `q'` becomes `sum_q conj(D_{q q'}) c_q` where `D` is the rotation
/// matrix of the tensor rank for `geom`.
pub fn rotate_coefficients(coeffs: &CouplingCoefficients, geom: &Geometry) -> CouplingCoefficients {
    if geom.is_identity() {
        return coeffs.clone();
    }
    let rank = coeffs.rank();
    let d = wigner_big_d_matrix(HalfInt::from_int(rank as i32), geom.axis, geom.theta)
        .expect("integer tensor rank is always a valid angular momentum");
    let n = coeffs.channels.len();
    let channels = (0..n)
        .map(|qp| {
            let mut acc = Contraction::default();
            for (q, c) in coeffs.channels.iter().enumerate() {
                let w = d[q][qp].conj();
                if w != CZERO {
                    acc.scaled_add(w, c);
                }
            }
            acc
        })
        .collect();
    CouplingCoefficients {
        multipole: coeffs.multipole,
        convention: coeffs.convention,
        channels,
    }
}

/// Electronic sub-transition `|J1 m1> -> |J2 m2>` driven by a multipole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TransitionRepr", into = "TransitionRepr")]
pub struct TransitionSpec {
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    multipole: Multipole,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionRepr {
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    multipole: Multipole,
}

impl TryFrom<TransitionRepr> for TransitionSpec {
    type Error = CouplingError;
    fn try_from(r: TransitionRepr) -> Result<Self, CouplingError> {
        TransitionSpec::new(r.j1, r.m1, r.j2, r.m2, r.multipole)
    }
}

impl From<TransitionSpec> for TransitionRepr {
    fn from(t: TransitionSpec) -> Self {
        TransitionRepr {
            j1: t.j1,
            m1: t.m1,
            j2: t.j2,
            m2: t.m2,
            multipole: t.multipole,
        }
    }
}

impl TransitionSpec {
    pub fn new(
        j1: HalfInt,
        m1: HalfInt,
        j2: HalfInt,
        m2: HalfInt,
        multipole: Multipole,
    ) -> Result<Self, CouplingError> {
        m1.check_projection_of(j1)?;
        m2.check_projection_of(j2)?;
        let rank = 2 * multipole.rank() as i32;
        let (t1, t2) = (j1.twice(), j2.twice());
        if t2 > t1 + rank || t2 < (t1 - rank).abs() || (t1 + t2) % 2 != 0 {
            return Err(CouplingError::Triangle {
                j1,
                j2,
                rank: multipole.rank(),
            });
        }
        Ok(TransitionSpec {
            j1,
            m1,
            j2,
            m2,
            multipole,
        })
    }

    pub fn j1(&self) -> HalfInt {
        self.j1
    }
    pub fn m1(&self) -> HalfInt {
        self.m1
    }
    pub fn j2(&self) -> HalfInt {
        self.j2
    }
    pub fn m2(&self) -> HalfInt {
        self.m2
    }
    pub fn multipole(&self) -> Multipole {
        self.multipole
    }

    /// `m2 - m1` as an integer.
    pub fn delta_m(&self) -> i32 {
        (self.m2 - self.m1).twice() / 2
    }

    /// The same transition with a different final projection.
    pub fn with_m2(&self, m2: HalfInt) -> Result<Self, CouplingError> {
        TransitionSpec::new(self.j1, self.m1, self.j2, m2, self.multipole)
    }

    /// Clebsch-Gordan weight `<J1 m1; k q | J2 m2>` of channel `q`.
    pub fn channel_weight(&self, q: i32) -> f64 {
        let k = HalfInt::from_int(self.multipole.rank() as i32);
        let q = HalfInt::from_int(q);
        if q.check_projection_of(k).is_err() {
            return 0.0;
        }
        clebsch_gordan(self.j1, self.m1, k, q, self.j2, self.m2).expect("validated quantum numbers")
    }
}

/// Precomputed functional for one transition and geometry:
/// `mu = sum_q CG_q c~_q(sample)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthFunctional {
    contraction: Contraction,
    forbidden: bool,
}

impl StrengthFunctional {
    pub fn new(trans: &TransitionSpec, geom: &Geometry, convention: Convention) -> Self {
        let coeffs = rotate_coefficients(&coefficients_for(trans.multipole, convention), geom);
        Self::from_coefficients(trans, &coeffs)
    }

    pub fn from_coefficients(trans: &TransitionSpec, coeffs: &CouplingCoefficients) -> Self {
        debug_assert_eq!(coeffs.multipole, trans.multipole);
        let rank = coeffs.rank() as i32;
        let mut contraction = Contraction::default();
        let mut forbidden = true;
        for q in -rank..=rank {
            let w = trans.channel_weight(q);
            if w != 0.0 {
                forbidden = false;
                contraction.scaled_add(
                    Complex64::new(w, 0.0),
                    coeffs.channel(q).expect("q within rank"),
                );
            }
        }
        StrengthFunctional {
            contraction,
            forbidden,
        }
    }

    /// True when every Clebsch-Gordan weight vanishes.
    pub fn is_forbidden(&self) -> bool {
        self.forbidden
    }

    pub fn contraction(&self) -> &Contraction {
        &self.contraction
    }

    pub fn evaluate(&self, s: &FieldSample) -> Complex64 {
        if self.forbidden {
            return CZERO;
        }
        self.contraction.apply(s)
    }

    /// Scale of the rounding error of [`Self::evaluate`].
    pub fn term_magnitude(&self, s: &FieldSample) -> f64 {
        if self.forbidden {
            return 0.0;
        }
        self.contraction.term_magnitude(s)
    }

    pub fn derivative_term_magnitude(&self, s: &FieldSample, direction: [f64; 3]) -> f64 {
        if self.forbidden {
            return 0.0;
        }
        (0..3)
            .map(|p| direction[p].abs() * self.contraction.derivative_term_magnitude(s, p))
            .sum()
    }

    /// Derivative of the strength along a unit `direction`, from the field's
    /// second derivatives.
    pub fn evaluate_derivative(&self, s: &FieldSample, direction: [f64; 3]) -> Complex64 {
        if self.forbidden {
            return CZERO;
        }
        (0..3)
            .filter(|&p| direction[p] != 0.0)
            .map(|p| direction[p] * self.contraction.apply_derivative(s, p))
            .sum()
    }
}

/// Relative transition strength `mu` for a field sample (covariant tables).
pub fn relative_strength(
    sample: &FieldSample,
    trans: &TransitionSpec,
    geom: &Geometry,
) -> Complex64 {
    StrengthFunctional::new(trans, geom, Convention::Covariant).evaluate(sample)
}

fn check_widths(widths: [f64; 3], order: usize) -> Result<(), CouplingError> {
    if !widths.iter().all(|w| w.is_finite() && *w > 0.0) {
        return Err(CouplingError::Width(widths));
    }
    if order < 1 {
        return Err(CouplingError::QuadratureOrder);
    }
    Ok(())
}

/// Visit the tensor-product Gauss-Hermite nodes of a separable Gaussian
/// probability density with per-axis RMS `widths` centred on `r0`.
fn for_each_node(
    r0: [f64; 3],
    widths: [f64; 3],
    order: usize,
    mut f: impl FnMut([f64; 3], f64) -> Result<(), CouplingError>,
) -> Result<(), CouplingError> {
    let (x, w) = gauss_hermite(order);
    let norm = PI.powf(-1.5);
    for (xa, wa) in x.iter().zip(&w) {
        for (xb, wb) in x.iter().zip(&w) {
            for (xc, wc) in x.iter().zip(&w) {
                let p = [
                    r0[0] + SQRT_2 * widths[0] * xa,
                    r0[1] + SQRT_2 * widths[1] * xb,
                    r0[2] + SQRT_2 * widths[2] * xc,
                ];
                f(p, wa * wb * wc * norm)?;
            }
        }
    }
    Ok(())
}

/// Strength averaged over the probability density of a separable Gaussian
/// ground-state wavefunction: `int mu(r0 + R) |psi(R)|^2 d^3R`.
#[allow(clippy::too_many_arguments)]
pub fn averaged_strength<S: FieldSource + ?Sized>(
    source: &S,
    r0: [f64; 3],
    widths: [f64; 3],
    trans: &TransitionSpec,
    geom: &Geometry,
    quadrature_order: usize,
    convention: Convention,
    backend: Backend,
) -> Result<Complex64, CouplingError> {
    check_widths(widths, quadrature_order)?;
    let functional = StrengthFunctional::new(trans, geom, convention);
    if functional.is_forbidden() {
        return Ok(CZERO);
    }
    let order = trans.multipole.field_order();
    let mut acc = CZERO;
    for_each_node(r0, widths, quadrature_order, |p, w| {
        let s = sample_field(source, p, order, backend)?;
        acc += w * functional.evaluate(&s);
        Ok(())
    })?;
    Ok(acc)
}

/// Position-averaged excitation `int |mu(r0 + R)|^2 |psi(R)|^2 d^3R`.
#[allow(clippy::too_many_arguments)]
pub fn averaged_excitation<S: FieldSource + ?Sized>(
    source: &S,
    r0: [f64; 3],
    widths: [f64; 3],
    trans: &TransitionSpec,
    geom: &Geometry,
    quadrature_order: usize,
    convention: Convention,
    backend: Backend,
) -> Result<f64, CouplingError> {
    check_widths(widths, quadrature_order)?;
    let functional = StrengthFunctional::new(trans, geom, convention);
    if functional.is_forbidden() {
        return Ok(0.0);
    }
    let order = trans.multipole.field_order();
    let mut acc = 0.0;
    for_each_node(r0, widths, quadrature_order, |p, w| {
        let s = sample_field(source, p, order, backend)?;
        acc += w * functional.evaluate(&s).norm_sqr();
        Ok(())
    })?;
    Ok(acc)
}


#[cfg(test)]
mod rotation_props {
    use super::*;
    use proptest::prelude::*;

    fn sample_from(v: &[f64]) -> FieldSample {
        let mut s = FieldSample::zero(DerivativeOrder::First);
        for j in 0..3 {
            s.e[j] = Complex64::new(v[2 * j], v[2 * j + 1]);
            for i in 0..3 {
                let k = 6 + 2 * (3 * i + j);
                s.jacobian[i][j] = Complex64::new(v[k], v[k + 1]);
            }
        }
        s
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    const ALL: [Multipole; 3] = [Multipole::E1, Multipole::E2DeltaJ1, Multipole::E2DeltaJ2];

    #[test]
    fn literal_tables_are_not_rotation_covariant() {
        let v: Vec<f64> = (0..24).map(|k| (0.37 * k as f64 + 0.3).sin()).collect();
        let s = sample_from(&v);
        let g = Geometry::about_y(0.7);
        for m in ALL {
            let c = coefficients_for(m, Convention::Literal);
            let a = rotate_coefficients(&c, &g).channel_values(&s);
            let b = c.channel_values(&s.in_rotated_frame(&g.rotation_matrix()));
            assert!(max_diff(&a, &b) > 0.1, "{m:?}");
        }
    }

    proptest! {
        #[test]
        fn covariant_rotation_matches_rotated_field(
            v in proptest::collection::vec(-1.0f64..1.0, 24),
            theta in -PI..PI,
            ax in proptest::collection::vec(-1.0f64..1.0, 3),
        ) {
            let n = (ax[0] * ax[0] + ax[1] * ax[1] + ax[2] * ax[2]).sqrt();
            prop_assume!(n > 1e-3);
            let g = Geometry::new(theta, [ax[0] / n, ax[1] / n, ax[2] / n]).unwrap();
            let s = sample_from(&v);
            for m in ALL {
                let c = coefficients_for(m, Convention::Covariant);
                let a = rotate_coefficients(&c, &g).channel_values(&s);
                let b = c.channel_values(&s.in_rotated_frame(&g.rotation_matrix()));
                prop_assert!(max_diff(&a, &b) < 1e-12, "{:?}", m);
            }
        }

        #[test]
        fn strength_is_linear_in_the_field(
            v in proptest::collection::vec(-1.0f64..1.0, 24),
            w in proptest::collection::vec(-1.0f64..1.0, 24),
            a in -2.0f64..2.0, b in -2.0f64..2.0, theta in -PI..PI,
        ) {
            let (s, t) = (sample_from(&v), sample_from(&w));
            let (ca, cb) = (Complex64::new(a, 0.3), Complex64::new(-0.2, b));
            let sum = s.combine(ca, &t, cb);
            let tr = TransitionSpec::new(HalfInt::from_twice(1), HalfInt::from_twice(1),
                HalfInt::from_twice(5), HalfInt::from_twice(3), Multipole::E2DeltaJ2).unwrap();
            let f = StrengthFunctional::new(&tr, &Geometry::about_y(theta), Convention::Covariant);
            let lhs = f.evaluate(&sum);
            let rhs = ca * f.evaluate(&s) + cb * f.evaluate(&t);
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn pure_trace_gradient_is_invisible_to_rank_two(c in -5.0f64..5.0, theta in -PI..PI) {
            let mut s = FieldSample::zero(DerivativeOrder::First);
            for i in 0..3 { s.jacobian[i][i] = Complex64::new(c, -c); }
            let co = rotate_coefficients(&coefficients_for(Multipole::E2DeltaJ2, Convention::Covariant), &Geometry::about_y(theta));
            for v in co.channel_values(&s) { prop_assert!(v.norm() < 1e-12); }
        }

        #[test]
        fn symmetric_gradient_is_invisible_to_dj1(v in proptest::collection::vec(-1.0f64..1.0, 12), theta in -PI..PI) {
            let mut s = FieldSample::zero(DerivativeOrder::First);
            let mut k = 0;
            for i in 0..3 { for j in i..3 {
                let z = Complex64::new(v[k], v[k + 1]);
                s.jacobian[i][j] = z; s.jacobian[j][i] = z; k += 2;
            } }
            for conv in [Convention::Covariant, Convention::Literal] {
                let co = rotate_coefficients(&coefficients_for(Multipole::E2DeltaJ1, conv), &Geometry::about_y(theta));
                for v in co.channel_values(&s) { prop_assert!(v.norm() < 1e-12); }
            }
        }
    }
}

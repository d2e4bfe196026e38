//! Non-paraxial vector beams: Laguerre-Gauss, Hermite-Gauss and their
//! superpositions (radially and azimuthally polarized beams).
//!
//! Each mode term contributes
//!
//! ```text
//! (E0/sqrt2) [ (e_x + i s e_y) f + (i/k)(d_x f + i s d_y f) e_z ] exp(i k z)
//! ```
//!
//! where `f` is the scalar mode function (without the plane-wave factor) and
//! `s` the polarization index. The time factor is dropped.
//!
//! Field values and their first and second spatial derivatives are produced
//! either analytically, by evaluating the closed-form mode functions on
//! Taylor jets, or by fourth-order central finite differences of the
//! elementary scalar formulas. The two routes share no code beyond the
//! polynomial helpers, so each serves as the oracle of the other.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jet::Jet;
use crate::special::{hermite, laguerre};

pub type CVec3 = [Complex64; 3];
/// `m[i][j] = d_i E_j`.
pub type CMat3 = [[Complex64; 3]; 3];
/// `t[p][i][j] = d_p d_i E_j`.
pub type CTensor3 = [[[Complex64; 3]; 3]; 3];

const CZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Finite-difference step as a fraction of the wavelength.
pub const FD_STEP_WAVELENGTHS: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BeamError {
    #[error("wavelength must be positive and finite, got {0}")]
    Wavelength(f64),
    #[error("beam waist must be positive and finite, got {0}")]
    Waist(f64),
    #[error("amplitude must be finite, got {0}")]
    Amplitude(f64),
    #[error("a beam needs at least one mode term")]
    NoTerms,
    #[error("all superposition weights are zero")]
    ZeroWeights,
    #[error("polarization index must be -1, 0 or +1, got {0}")]
    Sigma(i64),
    #[error("analytic derivatives are not available for this field source")]
    AnalyticUnsupported,
}

/// Polarization index of a mode term: `+1`/`-1` circular, `0` linear along x.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub enum Sigma {
    Minus,
    Linear,
    Plus,
}

impl Sigma {
    pub fn value(self) -> f64 {
        match self {
            Sigma::Minus => -1.0,
            Sigma::Linear => 0.0,
            Sigma::Plus => 1.0,
        }
    }
}

impl TryFrom<i64> for Sigma {
    type Error = BeamError;
    fn try_from(v: i64) -> Result<Self, BeamError> {
        match v {
            -1 => Ok(Sigma::Minus),
            0 => Ok(Sigma::Linear),
            1 => Ok(Sigma::Plus),
            other => Err(BeamError::Sigma(other)),
        }
    }
}

impl From<Sigma> for i64 {
    fn from(s: Sigma) -> i64 {
        match s {
            Sigma::Minus => -1,
            Sigma::Linear => 0,
            Sigma::Plus => 1,
        }
    }
}

impl std::fmt::Display for Sigma {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:+}", i64::from(*self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModeFamily {
    Lg { l: i32, p: u32 },
    Hg { m: u32, n: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "ModeTermRepr", into = "ModeTermRepr")]
pub struct ModeTerm {
    pub family: ModeFamily,
    pub sigma: Sigma,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
enum ModeTermRepr {
    Lg { l: i32, p: u32, sigma: Sigma },
    Hg { m: u32, n: u32, sigma: Sigma },
}

impl From<ModeTermRepr> for ModeTerm {
    fn from(r: ModeTermRepr) -> Self {
        match r {
            ModeTermRepr::Lg { l, p, sigma } => ModeTerm {
                family: ModeFamily::Lg { l, p },
                sigma,
            },
            ModeTermRepr::Hg { m, n, sigma } => ModeTerm {
                family: ModeFamily::Hg { m, n },
                sigma,
            },
        }
    }
}

impl From<ModeTerm> for ModeTermRepr {
    fn from(t: ModeTerm) -> Self {
        match t.family {
            ModeFamily::Lg { l, p } => ModeTermRepr::Lg {
                l,
                p,
                sigma: t.sigma,
            },
            ModeFamily::Hg { m, n } => ModeTermRepr::Hg {
                m,
                n,
                sigma: t.sigma,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamTerm {
    pub weight: Complex64,
    pub mode: ModeTerm,
}

/// Declarative, validated description of a (superposition of) vector beam(s).
///
/// Lengths are in metres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BeamSpecRepr", into = "BeamSpecRepr")]
pub struct BeamSpec {
    terms: Vec<BeamTerm>,
    wavelength: f64,
    waist: f64,
    amplitude: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BeamSpecRepr {
    terms: Vec<BeamTerm>,
    wavelength_m: f64,
    waist_m: f64,
    #[serde(default = "unit_amplitude")]
    amplitude: f64,
}

fn unit_amplitude() -> f64 {
    1.0
}

impl TryFrom<BeamSpecRepr> for BeamSpec {
    type Error = BeamError;
    fn try_from(r: BeamSpecRepr) -> Result<Self, BeamError> {
        BeamSpec::new(r.terms, r.wavelength_m, r.waist_m)?.with_amplitude(r.amplitude)
    }
}

impl From<BeamSpec> for BeamSpecRepr {
    fn from(b: BeamSpec) -> Self {
        BeamSpecRepr {
            terms: b.terms,
            wavelength_m: b.wavelength,
            waist_m: b.waist,
            amplitude: b.amplitude,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VectorBeamKind {
    Radial,
    Azimuthal,
}

impl BeamSpec {
    pub fn new(terms: Vec<BeamTerm>, wavelength: f64, waist: f64) -> Result<Self, BeamError> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(BeamError::Wavelength(wavelength));
        }
        if !(waist.is_finite() && waist > 0.0) {
            return Err(BeamError::Waist(waist));
        }
        if terms.is_empty() {
            return Err(BeamError::NoTerms);
        }
        if terms.iter().all(|t| t.weight.norm() == 0.0) {
            return Err(BeamError::ZeroWeights);
        }
        Ok(BeamSpec {
            terms,
            wavelength,
            waist,
            amplitude: 1.0,
        })
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Result<Self, BeamError> {
        if !amplitude.is_finite() {
            return Err(BeamError::Amplitude(amplitude));
        }
        self.amplitude = amplitude;
        Ok(self)
    }

    pub fn single(mode: ModeTerm, wavelength: f64, waist: f64) -> Result<Self, BeamError> {
        Self::new(
            vec![BeamTerm {
                weight: Complex64::new(1.0, 0.0),
                mode,
            }],
            wavelength,
            waist,
        )
    }

    pub fn lg(
        l: i32,
        p: u32,
        sigma: Sigma,
        wavelength: f64,
        waist: f64,
    ) -> Result<Self, BeamError> {
        Self::single(
            ModeTerm {
                family: ModeFamily::Lg { l, p },
                sigma,
            },
            wavelength,
            waist,
        )
    }

    pub fn hg(
        m: u32,
        n: u32,
        sigma: Sigma,
        wavelength: f64,
        waist: f64,
    ) -> Result<Self, BeamError> {
        Self::single(
            ModeTerm {
                family: ModeFamily::Hg { m, n },
                sigma,
            },
            wavelength,
            waist,
        )
    }

    pub fn terms(&self) -> &[BeamTerm] {
        &self.terms
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn waist(&self) -> f64 {
        self.waist
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    pub fn rayleigh_length(&self) -> f64 {
        0.5 * self.wavenumber() * self.waist * self.waist
    }
}

/// Radially or azimuthally polarized beam built from the two anti-aligned
/// `|l| = 1` Laguerre-Gauss modes with weights `(1/sqrt2, +-1/sqrt2)`.
pub fn make_radial_azimuthal(
    kind: VectorBeamKind,
    waist: f64,
    wavelength: f64,
) -> Result<BeamSpec, BeamError> {
    let second = match kind {
        VectorBeamKind::Radial => FRAC_1_SQRT_2,
        VectorBeamKind::Azimuthal => -FRAC_1_SQRT_2,
    };
    let terms = vec![
        BeamTerm {
            weight: Complex64::new(FRAC_1_SQRT_2, 0.0),
            mode: ModeTerm {
                family: ModeFamily::Lg { l: 1, p: 0 },
                sigma: Sigma::Minus,
            },
        },
        BeamTerm {
            weight: Complex64::new(second, 0.0),
            mode: ModeTerm {
                family: ModeFamily::Lg { l: -1, p: 0 },
                sigma: Sigma::Plus,
            },
        },
    ];
    BeamSpec::new(terms, wavelength, waist)
}

/// Named beam families used on the command line: `gaussian`, `lg:l,p`,
/// `hg:m,n`, `radial`, `azimuthal`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", deny_unknown_fields)]
pub enum BeamPreset {
    Gaussian,
    Lg { l: i32, p: u32 },
    Hg { m: u32, n: u32 },
    Radial,
    Azimuthal,
}

impl BeamPreset {
    /// Build the beam. `sigma` is ignored for the vector beams, whose
    /// polarization is fixed by construction.
    pub fn build(self, sigma: Sigma, wavelength: f64, waist: f64) -> Result<BeamSpec, BeamError> {
        match self {
            BeamPreset::Gaussian => BeamSpec::lg(0, 0, sigma, wavelength, waist),
            BeamPreset::Lg { l, p } => BeamSpec::lg(l, p, sigma, wavelength, waist),
            BeamPreset::Hg { m, n } => BeamSpec::hg(m, n, sigma, wavelength, waist),
            BeamPreset::Radial => make_radial_azimuthal(VectorBeamKind::Radial, waist, wavelength),
            BeamPreset::Azimuthal => {
                make_radial_azimuthal(VectorBeamKind::Azimuthal, waist, wavelength)
            }
        }
    }

    pub fn is_vector_beam(self) -> bool {
        matches!(self, BeamPreset::Radial | BeamPreset::Azimuthal)
    }
}

impl std::fmt::Display for BeamPreset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BeamPreset::Gaussian => write!(f, "gaussian"),
            BeamPreset::Lg { l, p } => write!(f, "lg:{l},{p}"),
            BeamPreset::Hg { m, n } => write!(f, "hg:{m},{n}"),
            BeamPreset::Radial => write!(f, "radial"),
            BeamPreset::Azimuthal => write!(f, "azimuthal"),
        }
    }
}

impl std::str::FromStr for BeamPreset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim().to_ascii_lowercase();
        let pair = |rest: &str| -> Result<(String, String), String> {
            let (a, b) = rest
                .split_once(',')
                .ok_or_else(|| format!("expected two comma-separated indices in '{s}'"))?;
            Ok((a.trim().to_string(), b.trim().to_string()))
        };
        let bad = |what: &str| format!("invalid {what} in beam '{s}'");
        match s.as_str() {
            "gaussian" | "gauss" => Ok(BeamPreset::Gaussian),
            "radial" => Ok(BeamPreset::Radial),
            "azimuthal" => Ok(BeamPreset::Azimuthal),
            _ => {
                if let Some(rest) = s.strip_prefix("lg:") {
                    let (l, p) = pair(rest)?;
                    Ok(BeamPreset::Lg {
                        l: l.trim_start_matches('+').parse().map_err(|_| bad("l"))?,
                        p: p.parse().map_err(|_| bad("p"))?,
                    })
                } else if let Some(rest) = s.strip_prefix("hg:") {
                    let (m, n) = pair(rest)?;
                    Ok(BeamPreset::Hg {
                        m: m.parse().map_err(|_| bad("m"))?,
                        n: n.parse().map_err(|_| bad("n"))?,
                    })
                } else {
                    Err(format!("unknown beam '{s}' (expected gaussian, lg:l,p, hg:m,n, radial or azimuthal)"))
                }
            }
        }
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn lg_normalization(l: i32, p: u32) -> f64 {
    (2.0 * factorial(p) / (PI * factorial(p + l.unsigned_abs()))).sqrt()
}

fn hg_normalization(m: u32, n: u32) -> f64 {
    (2.0 / (PI * 2f64.powi((m + n) as i32) * factorial(m) * factorial(n))).sqrt()
}

/// Laguerre-Gauss mode function (without the plane-wave factor `exp(ikz)`).
pub fn lg_mode(l: i32, p: u32, w0: f64, k: f64, point: [f64; 3]) -> Complex64 {
    let [x, y, z] = point;
    let al = l.unsigned_abs();
    let zr = 0.5 * k * w0 * w0;
    let w = w0 * (1.0 + (z / zr).powi(2)).sqrt();
    let inv_r = z / (z * z + zr * zr);
    let gouy = -f64::from(2 * p + al + 1) * (z / zr).atan();
    let rho2 = x * x + y * y;
    let rho = rho2.sqrt();
    let phi = y.atan2(x);
    let radial = lg_normalization(l, p)
        * (w0 / w)
        * (rho * SQRT_2 / w).powi(al as i32)
        * laguerre(p, al, 2.0 * rho2 / (w * w));
    let exponent = Complex64::new(
        -rho2 / (w * w),
        f64::from(l) * phi + 0.5 * k * rho2 * inv_r + gouy,
    );
    radial * exponent.exp()
}

/// Hermite-Gauss mode function (without the plane-wave factor `exp(ikz)`),
/// normalized so that `m = n = 0` coincides with the fundamental LG mode.
pub fn hg_mode(m: u32, n: u32, w0: f64, k: f64, point: [f64; 3]) -> Complex64 {
    let [x, y, z] = point;
    let zr = 0.5 * k * w0 * w0;
    let w = w0 * (1.0 + (z / zr).powi(2)).sqrt();
    let inv_r = z / (z * z + zr * zr);
    let gouy = -f64::from(m + n + 1) * (z / zr).atan();
    let rho2 = x * x + y * y;
    let amp =
        hg_normalization(m, n) * (w0 / w) * hermite(m, SQRT_2 * x / w) * hermite(n, SQRT_2 * y / w);
    amp * Complex64::new(-rho2 / (w * w), 0.5 * k * rho2 * inv_r + gouy).exp()
}

fn laguerre_jet(p: u32, alpha: u32, x: Jet) -> Jet {
    let a = f64::from(alpha);
    let mut prev = Jet::real(1.0);
    if p == 0 {
        return prev;
    }
    let mut cur = -x + (1.0 + a);
    for k in 1..p {
        let kf = f64::from(k);
        let next = ((-x + (2.0 * kf + 1.0 + a)) * cur - prev * (kf + a)) * (1.0 / (kf + 1.0));
        prev = cur;
        cur = next;
    }
    cur
}

fn hermite_jet(n: u32, x: Jet) -> Jet {
    let mut prev = Jet::real(1.0);
    if n == 0 {
        return prev;
    }
    let mut cur = x * 2.0;
    for k in 1..n {
        let next = x * cur * 2.0 - prev * (2.0 * f64::from(k));
        prev = cur;
        cur = next;
    }
    cur
}

struct JetCoords {
    x: Jet,
    y: Jet,
    rho2: Jet,
    /// `1 / (1 + i z/z_R)`: amplitude `w0/w` with one unit of Gouy phase.
    g: Jet,
    /// `1 + (z/z_R)^2 = (w/w0)^2`.
    spread: Jet,
    /// `exp(-rho^2/w^2 + i k rho^2 / 2R)`.
    envelope: Jet,
}

impl JetCoords {
    fn new(point: [f64; 3], w0: f64, k: f64) -> Self {
        let zr = 0.5 * k * w0 * w0;
        let x = Jet::variable(0, point[0]);
        let y = Jet::variable(1, point[1]);
        let z = Jet::variable(2, point[2]);
        let zeta = z * (1.0 / zr);
        let rho2 = x * x + y * y;
        let g = (zeta * I + 1.0).recip();
        let spread = zeta * zeta + 1.0;
        // -rho^2/w^2 + i k rho^2/(2R) = i k rho^2 / (2 (z - i z_R))
        let q = z + Complex64::new(0.0, -zr);
        let envelope = (rho2 * (q * 2.0).recip() * Complex64::new(0.0, k)).exp();
        JetCoords {
            x,
            y,
            rho2,
            g,
            spread,
            envelope,
        }
    }
}

fn lg_jet(l: i32, p: u32, w0: f64, coords: &JetCoords) -> Jet {
    let al = l.unsigned_abs();
    let sign = if l < 0 { -1.0 } else { 1.0 };
    let u = coords.x + coords.y * Complex64::new(0.0, sign);
    // (1 + zeta^2) g^2 = (1 - i zeta) / (1 + i zeta) = exp(-2 i atan zeta)
    let h = coords.spread * coords.g * coords.g;
    let arg = coords.rho2 * coords.spread.recip() * (2.0 / (w0 * w0));
    let prefactor = lg_normalization(l, p) * (SQRT_2 / w0).powi(al as i32);
    u.powi(al)
        * laguerre_jet(p, al, arg)
        * coords.g.powi(al + 1)
        * h.powi(p)
        * coords.envelope
        * prefactor
}

fn hg_jet(m: u32, n: u32, w0: f64, coords: &JetCoords) -> Jet {
    let s = coords.spread.sqrt();
    let inv_w = s.recip() * (SQRT_2 / w0);
    let phase = coords.g * s; // exp(-i atan zeta)
    hermite_jet(m, coords.x * inv_w)
        * hermite_jet(n, coords.y * inv_w)
        * coords.g
        * phase.powi(m + n)
        * coords.envelope
        * hg_normalization(m, n)
}

/// How many derivative orders a [`FieldSample`] must carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DerivativeOrder {
    Value,
    First,
    Second,
}

/// Field value, Jacobian `d_i E_j` and second derivatives `d_p d_i E_j` at one point.
///
/// Entries beyond `order` are zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub e: CVec3,
    pub jacobian: CMat3,
    pub hessian: CTensor3,
    pub order: DerivativeOrder,
}

impl FieldSample {
    pub fn zero(order: DerivativeOrder) -> Self {
        FieldSample {
            e: [CZERO; 3],
            jacobian: [[CZERO; 3]; 3],
            hessian: [[[CZERO; 3]; 3]; 3],
            order,
        }
    }

    pub fn divergence(&self) -> Complex64 {
        self.jacobian[0][0] + self.jacobian[1][1] + self.jacobian[2][2]
    }

    pub fn is_finite(&self) -> bool {
        let fin = |c: &Complex64| c.re.is_finite() && c.im.is_finite();
        self.e.iter().all(fin)
            && self.jacobian.iter().flatten().all(fin)
            && self.hessian.iter().flatten().flatten().all(fin)
    }

    /// Same sample expressed in a frame whose basis vectors are the columns
    /// of the orthogonal matrix `rot`: `E' = R^T E`, `G' = R^T G R`, and so on.
    pub fn in_rotated_frame(&self, rot: &[[f64; 3]; 3]) -> FieldSample {
        let mut out = FieldSample::zero(self.order);
        for a in 0..3 {
            for b in 0..3 {
                out.e[a] += rot[b][a] * self.e[b];
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = CZERO;
                for a in 0..3 {
                    for b in 0..3 {
                        acc += rot[a][i] * rot[b][j] * self.jacobian[a][b];
                    }
                }
                out.jacobian[i][j] = acc;
            }
        }
        for p in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let mut acc = CZERO;
                    for a in 0..3 {
                        for b in 0..3 {
                            for c in 0..3 {
                                acc += rot[a][p] * rot[b][i] * rot[c][j] * self.hessian[a][b][c];
                            }
                        }
                    }
                    out.hessian[p][i][j] = acc;
                }
            }
        }
        out
    }

    /// Linear combination `a * self + b * other`.
    pub fn combine(&self, a: Complex64, other: &FieldSample, b: Complex64) -> FieldSample {
        let mut out = *self;
        out.order = self.order.min(other.order);
        for j in 0..3 {
            out.e[j] = a * self.e[j] + b * other.e[j];
            for i in 0..3 {
                out.jacobian[i][j] = a * self.jacobian[i][j] + b * other.jacobian[i][j];
                for p in 0..3 {
                    out.hessian[p][i][j] = a * self.hessian[p][i][j] + b * other.hessian[p][i][j];
                }
            }
        }
        out
    }
}

/// Anything that can produce an electric field.
pub trait FieldSource: Sync {
    /// Field value by the elementary (non-jet) route.
    fn field(&self, point: [f64; 3]) -> CVec3;

    /// Exact derivatives, when the source has a closed form.
    fn analytic_sample(&self, _point: [f64; 3], _order: DerivativeOrder) -> Option<FieldSample> {
        None
    }

    /// Length that sets the finite-difference step.
    fn wavelength(&self) -> f64;
}

impl BeamSpec {
    fn mode_value(&self, mode: &ModeTerm, point: [f64; 3]) -> Complex64 {
        let k = self.wavenumber();
        match mode.family {
            ModeFamily::Lg { l, p } => lg_mode(l, p, self.waist, k, point),
            ModeFamily::Hg { m, n } => hg_mode(m, n, self.waist, k, point),
        }
    }

    fn jets(&self, point: [f64; 3]) -> [Jet; 3] {
        let k = self.wavenumber();
        let coords = JetCoords::new(point, self.waist, k);
        let mut e = [Jet::real(0.0); 3];
        for term in &self.terms {
            if term.weight.norm() == 0.0 {
                continue;
            }
            let f = match term.mode.family {
                ModeFamily::Lg { l, p } => lg_jet(l, p, self.waist, &coords),
                ModeFamily::Hg { m, n } => hg_jet(m, n, self.waist, &coords),
            };
            let a = term.weight * (self.amplitude * FRAC_1_SQRT_2);
            let is = I * term.mode.sigma.value();
            e[0] += f * a;
            e[1] += f * (a * is);
            e[2] += (f.partial(0) + f.partial(1) * is) * (a * I / k);
        }
        let z = Jet::variable(2, point[2]);
        let plane = (z * Complex64::new(0.0, k)).exp();
        e.map(|c| c * plane)
    }
}

impl FieldSource for BeamSpec {
    fn field(&self, point: [f64; 3]) -> CVec3 {
        let k = self.wavenumber();
        let h = FD_STEP_WAVELENGTHS * self.wavelength;
        let mut e = [CZERO; 3];
        for term in &self.terms {
            if term.weight.norm() == 0.0 {
                continue;
            }
            let f = |p: [f64; 3]| self.mode_value(&term.mode, p);
            let grad = [0, 1].map(|axis| central_difference(&f, point, axis, h));
            let a = term.weight * (self.amplitude * FRAC_1_SQRT_2);
            let is = I * term.mode.sigma.value();
            let f0 = f(point);
            e[0] += a * f0;
            e[1] += a * is * f0;
            e[2] += a * I / k * (grad[0] + is * grad[1]);
        }
        let plane = Complex64::new(0.0, k * point[2]).exp();
        e.map(|c| c * plane)
    }

    fn analytic_sample(&self, point: [f64; 3], order: DerivativeOrder) -> Option<FieldSample> {
        let jets = self.jets(point);
        let mut s = FieldSample::zero(order);
        for j in 0..3 {
            s.e[j] = jets[j].value();
            if order >= DerivativeOrder::First {
                for i in 0..3 {
                    s.jacobian[i][j] = jets[j].d1(i);
                }
            }
            if order >= DerivativeOrder::Second {
                for p in 0..3 {
                    for i in 0..3 {
                        s.hessian[p][i][j] = jets[j].d2(p, i);
                    }
                }
            }
        }
        Some(s)
    }

    fn wavelength(&self) -> f64 {
        self.wavelength
    }
}

/// Field defined by an arbitrary closure; derivatives come from finite differences.
pub struct FnField<F> {
    f: F,
    wavelength: f64,
}

impl<F: Fn([f64; 3]) -> CVec3 + Sync> FnField<F> {
    pub fn new(f: F, wavelength: f64) -> Self {
        FnField { f, wavelength }
    }
}

impl<F: Fn([f64; 3]) -> CVec3 + Sync> FieldSource for FnField<F> {
    fn field(&self, point: [f64; 3]) -> CVec3 {
        (self.f)(point)
    }

    fn wavelength(&self) -> f64 {
        self.wavelength
    }
}

/// Differentiation route for field derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Analytic when the source supports it, finite differences otherwise.
    #[default]
    Auto,
    Analytic,
    #[serde(rename = "fd")]
    FiniteDifference,
}

/// Fourth-order central difference of `f` along `axis`.
pub fn central_difference<T, F>(f: &F, point: [f64; 3], axis: usize, h: f64) -> T
where
    F: Fn([f64; 3]) -> T,
    T: FdValue,
{
    let at = |offset: f64| {
        let mut p = point;
        p[axis] += offset;
        f(p)
    };
    T::stencil(at(-2.0 * h), at(-h), at(h), at(2.0 * h), h)
}

/// Values that can be combined by the five-point stencil.
pub trait FdValue: Sized {
    fn stencil(m2: Self, m1: Self, p1: Self, p2: Self, h: f64) -> Self;
}

impl FdValue for Complex64 {
    fn stencil(m2: Self, m1: Self, p1: Self, p2: Self, h: f64) -> Self {
        (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h)
    }
}

impl FdValue for CVec3 {
    fn stencil(m2: Self, m1: Self, p1: Self, p2: Self, h: f64) -> Self {
        std::array::from_fn(|j| Complex64::stencil(m2[j], m1[j], p1[j], p2[j], h))
    }
}

impl FdValue for CMat3 {
    fn stencil(m2: Self, m1: Self, p1: Self, p2: Self, h: f64) -> Self {
        std::array::from_fn(|i| CVec3::stencil(m2[i], m1[i], p1[i], p2[i], h))
    }
}

/// `d_i E_j` by central differences of the field values.
pub fn fd_jacobian<S: FieldSource + ?Sized>(source: &S, point: [f64; 3], h: f64) -> CMat3 {
    let f = |p: [f64; 3]| source.field(p);
    std::array::from_fn(|i| central_difference(&f, point, i, h))
}

/// `d_p d_i E_j` by nested central differences.
pub fn fd_hessian<S: FieldSource + ?Sized>(source: &S, point: [f64; 3], h: f64) -> CTensor3 {
    let jac = |p: [f64; 3]| fd_jacobian(source, p, h);
    std::array::from_fn(|p| central_difference(&jac, point, p, h))
}

/// Field sample with derivatives up to `order`, by the requested backend.
pub fn sample_field<S: FieldSource + ?Sized>(
    source: &S,
    point: [f64; 3],
    order: DerivativeOrder,
    backend: Backend,
) -> Result<FieldSample, BeamError> {
    match backend {
        Backend::Analytic => source
            .analytic_sample(point, order)
            .ok_or(BeamError::AnalyticUnsupported),
        Backend::Auto => Ok(source
            .analytic_sample(point, order)
            .unwrap_or_else(|| fd_sample(source, point, order))),
        Backend::FiniteDifference => Ok(fd_sample(source, point, order)),
    }
}

fn fd_sample<S: FieldSource + ?Sized>(
    source: &S,
    point: [f64; 3],
    order: DerivativeOrder,
) -> FieldSample {
    let h = FD_STEP_WAVELENGTHS * source.wavelength();
    let mut s = FieldSample::zero(order);
    s.e = source.field(point);
    if order >= DerivativeOrder::First {
        s.jacobian = fd_jacobian(source, point, h);
    }
    if order >= DerivativeOrder::Second {
        s.hessian = fd_hessian(source, point, h);
    }
    s
}

/// Positive-frequency field `E(+)` at `point` (analytic route).
pub fn vector_field(spec: &BeamSpec, point: [f64; 3]) -> CVec3 {
    let jets = spec.jets(point);
    jets.map(|j| j.value())
}

/// Longitudinal and circular projections of a field value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldComponents {
    pub ez: Complex64,
    pub sigma_plus: Complex64,
    pub sigma_minus: Complex64,
}

impl FieldComponents {
    /// `E_z` and `E_s = <e_x + i s e_y, E> = E_x - i s E_y`.
    pub fn from_field(e: &CVec3) -> Self {
        FieldComponents {
            ez: e[2],
            sigma_plus: e[0] - I * e[1],
            sigma_minus: e[0] + I * e[1],
        }
    }
}

pub fn field_components(spec: &BeamSpec, point: [f64; 3]) -> FieldComponents {
    FieldComponents::from_field(&vector_field(spec, point))
}

pub fn field_jacobian<S: FieldSource + ?Sized>(
    source: &S,
    point: [f64; 3],
    backend: Backend,
) -> Result<CMat3, BeamError> {
    sample_field(source, point, DerivativeOrder::First, backend).map(|s| s.jacobian)
}

pub fn field_hessian<S: FieldSource + ?Sized>(
    source: &S,
    point: [f64; 3],
    backend: Backend,
) -> Result<CTensor3, BeamError> {
    sample_field(source, point, DerivativeOrder::Second, backend).map(|s| s.hessian)
}

#[cfg(test)]
mod tests {
    use super::*;

    const W0: f64 = 1e-6;
    const LAMBDA: f64 = 0.729e-6;

    fn k() -> f64 {
        2.0 * PI / LAMBDA
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn lg_mode_spot_values() {
        let origin = lg_mode(0, 0, W0, k(), [0.0; 3]);
        assert!(rel(origin, Complex64::new(0.797_884_560_802_865_4, 0.0)) < 1e-14);
        assert_eq!(lg_mode(1, 0, W0, k(), [0.0, 0.0, 0.3e-6]).norm(), 0.0);
        let at_waist = lg_mode(0, 0, W0, k(), [W0, 0.0, 0.0]);
        assert!(rel(at_waist, Complex64::new(0.293_525_326_347_479_8, 0.0)) < 1e-14);
    }

    #[test]
    fn hg_mode_spot_values() {
        for p in [
            [0.0, 0.0, 0.0],
            [0.3e-6, -0.7e-6, 0.2e-6],
            [1.1e-6, 0.4e-6, -0.9e-6],
        ] {
            let a = hg_mode(0, 0, W0, k(), p);
            let b = lg_mode(0, 0, W0, k(), p);
            assert!(rel(a, b) < 1e-12);
        }
        assert_eq!(hg_mode(1, 0, W0, k(), [0.0, 0.4e-6, 0.1e-6]).norm(), 0.0);
        let v = hg_mode(1, 0, W0, k(), [W0 / 2.0, 0.0, 0.0]);
        assert!(rel(v, Complex64::new(0.621_393_120_753_855_5, 0.0)) < 1e-14);
    }

    #[test]
    fn jets_reproduce_scalar_modes() {
        let pts = [
            [0.0, 0.0, 0.0],
            [0.31e-6, -0.52e-6, 0.17e-6],
            [-1.2e-6, 0.8e-6, -0.6e-6],
        ];
        let kk = k();
        for p in pts {
            let coords = JetCoords::new(p, W0, kk);
            for (l, pp) in [(0, 0), (1, 0), (-1, 0), (2, 1), (-3, 2)] {
                let a = lg_jet(l, pp, W0, &coords).value();
                let b = lg_mode(l, pp, W0, kk, p);
                assert!((a - b).norm() < 1e-13, "lg({l},{pp}) at {p:?}: {a} vs {b}");
            }
            for (m, n) in [(0, 0), (1, 0), (2, 3)] {
                let a = hg_jet(m, n, W0, &coords).value();
                let b = hg_mode(m, n, W0, kk, p);
                assert!((a - b).norm() < 1e-13, "hg({m},{n}) at {p:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn preset_parsing() {
        assert_eq!(
            "lg:1,0".parse::<BeamPreset>(),
            Ok(BeamPreset::Lg { l: 1, p: 0 })
        );
        assert_eq!(
            "LG:-2, 1".parse::<BeamPreset>(),
            Ok(BeamPreset::Lg { l: -2, p: 1 })
        );
        assert_eq!(
            "hg:1,0".parse::<BeamPreset>(),
            Ok(BeamPreset::Hg { m: 1, n: 0 })
        );
        assert_eq!("azimuthal".parse::<BeamPreset>(), Ok(BeamPreset::Azimuthal));
        assert!("hg:-1,0".parse::<BeamPreset>().is_err());
        assert!("lg:1".parse::<BeamPreset>().is_err());
        assert!("bessel".parse::<BeamPreset>().is_err());
        for p in [
            BeamPreset::Gaussian,
            BeamPreset::Lg { l: -1, p: 2 },
            BeamPreset::Hg { m: 0, n: 3 },
            BeamPreset::Radial,
        ] {
            assert_eq!(p.to_string().parse::<BeamPreset>(), Ok(p));
        }
    }

    #[test]
    fn spec_validation() {
        assert_eq!(
            BeamSpec::lg(0, 0, Sigma::Plus, 0.0, W0),
            Err(BeamError::Wavelength(0.0))
        );
        assert_eq!(
            BeamSpec::lg(0, 0, Sigma::Plus, LAMBDA, -1.0),
            Err(BeamError::Waist(-1.0))
        );
        assert_eq!(BeamSpec::new(vec![], LAMBDA, W0), Err(BeamError::NoTerms));
        let t = BeamTerm {
            weight: Complex64::new(0.0, 0.0),
            mode: ModeTerm {
                family: ModeFamily::Lg { l: 0, p: 0 },
                sigma: Sigma::Plus,
            },
        };
        assert_eq!(
            BeamSpec::new(vec![t], LAMBDA, W0),
            Err(BeamError::ZeroWeights)
        );
        assert!(Sigma::try_from(2).is_err());
    }

    #[test]
    fn spec_serde_is_strict() {
        let b = make_radial_azimuthal(VectorBeamKind::Radial, W0, LAMBDA).unwrap();
        let s = serde_json::to_string(&b).unwrap();
        let back: BeamSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(b, back);
        let bad = s.replace("\"waist_m\"", "\"waist\"");
        assert!(serde_json::from_str::<BeamSpec>(&bad).is_err());
        let bad_sigma = s.replacen("\"sigma\":-1", "\"sigma\":3", 1);
        assert!(serde_json::from_str::<BeamSpec>(&bad_sigma).is_err());
    }

    #[test]
    fn radial_azimuthal_weights() {
        let r = make_radial_azimuthal(VectorBeamKind::Radial, W0, LAMBDA).unwrap();
        let a = make_radial_azimuthal(VectorBeamKind::Azimuthal, W0, LAMBDA).unwrap();
        assert_eq!(r.terms()[0].weight.re, FRAC_1_SQRT_2);
        assert_eq!(r.terms()[1].weight.re, FRAC_1_SQRT_2);
        assert_eq!(a.terms()[0].weight.re, FRAC_1_SQRT_2);
        assert_eq!(a.terms()[1].weight.re, -FRAC_1_SQRT_2);
    }

    #[test]
    fn analytic_backend_rejects_closure_fields() {
        let src = FnField::new(|_p| [CZERO; 3], LAMBDA);
        assert_eq!(
            sample_field(&src, [0.0; 3], DerivativeOrder::First, Backend::Analytic),
            Err(BeamError::AnalyticUnsupported)
        );
        assert!(sample_field(&src, [0.0; 3], DerivativeOrder::First, Backend::Auto).is_ok());
    }

    #[test]
    fn circular_projections() {
        let b = BeamSpec::lg(1, 0, Sigma::Plus, LAMBDA, W0).unwrap();
        let p = [0.4e-6, 0.3e-6, 0.0];
        let c = field_components(&b, p);
        assert_eq!(c.sigma_minus.norm(), 0.0);
        let e = vector_field(&b, p);
        assert!((c.sigma_plus + c.sigma_minus - 2.0 * e[0]).norm() < 1e-15);
    }
}

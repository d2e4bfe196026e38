//! Polynomial and angular-momentum special functions.
//!
//! Angular momenta are carried as [`HalfInt`] (twice the value stored as an
//! integer) so that selection rules are decided in exact integer arithmetic.
//! Clebsch-Gordan coefficients and Wigner d-matrix elements use the
//! Condon-Shortley phase convention throughout.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AngularMomentumError {
    #[error("negative angular momentum j = {0}")]
    NegativeJ(HalfInt),
    #[error("projection m = {m} is not a valid projection of j = {j}")]
    InvalidProjection { j: HalfInt, m: HalfInt },
    #[error("angular momentum {0} exceeds the supported factorial range")]
    OutOfRange(HalfInt),
    #[error("cannot parse '{0}' as an integer or half-integer")]
    Parse(String),
}

/// Integer or half-integer quantum number, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(n: i32) -> Self {
        HalfInt(2 * n)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    /// Checks that `self` is a valid projection of the total angular momentum `j`.
    pub fn check_projection_of(self, j: HalfInt) -> Result<(), AngularMomentumError> {
        if j.0 < 0 {
            return Err(AngularMomentumError::NegativeJ(j));
        }
        if self.0.abs() > j.0 || (j.0 - self.0) % 2 != 0 {
            return Err(AngularMomentumError::InvalidProjection { j, m: self });
        }
        Ok(())
    }

    /// All projections `-j, -j+1, ..., j`.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> {
        let j = self.0;
        (-j..=j).step_by(2).map(HalfInt)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = AngularMomentumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let err = || AngularMomentumError::Parse(s.to_string());
        if let Some((num, den)) = t.split_once('/') {
            let num: i32 = num
                .trim()
                .trim_start_matches('+')
                .parse()
                .map_err(|_| err())?;
            match den.trim() {
                "2" => Ok(HalfInt(num)),
                "1" => Ok(HalfInt(2 * num)),
                _ => Err(err()),
            }
        } else if let Ok(n) = t.trim_start_matches('+').parse::<i32>() {
            Ok(HalfInt(2 * n))
        } else {
            let v: f64 = t.parse().map_err(|_| err())?;
            HalfInt::try_from(v).map_err(|_| err())
        }
    }
}

impl TryFrom<f64> for HalfInt {
    type Error = AngularMomentumError;

    fn try_from(v: f64) -> Result<Self, Self::Error> {
        let twice = 2.0 * v;
        if twice.is_finite() && twice == twice.round() && twice.abs() < 1e6 {
            Ok(HalfInt(twice as i32))
        } else {
            Err(AngularMomentumError::Parse(v.to_string()))
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Float(f64),
            Str(String),
        }
        let parsed = match Repr::deserialize(d)? {
            Repr::Int(n) => i32::try_from(n)
                .map(HalfInt::from_int)
                .map_err(|_| AngularMomentumError::Parse(n.to_string())),
            Repr::Float(v) => HalfInt::try_from(v),
            Repr::Str(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// Generalized Laguerre polynomial `L_p^alpha(x)` by the three-term recurrence.
pub fn laguerre(p: u32, alpha: u32, x: f64) -> f64 {
    let a = f64::from(alpha);
    let mut prev = 1.0;
    if p == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for k in 1..p {
        let kf = f64::from(k);
        let next = ((2.0 * kf + 1.0 + a - x) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Physicists' Hermite polynomial `H_n(x)`.
pub fn hermite(n: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * f64::from(k) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

const MAX_FACTORIAL: usize = 34;

const fn factorial_table() -> [u128; MAX_FACTORIAL + 1] {
    let mut t = [1u128; MAX_FACTORIAL + 1];
    let mut i = 1;
    while i <= MAX_FACTORIAL {
        t[i] = t[i - 1] * i as u128;
        i += 1;
    }
    t
}

/// `n!` held exactly for `n <= 34`.
static FACTORIALS: [u128; MAX_FACTORIAL + 1] = factorial_table();

fn fact(n: i32) -> f64 {
    debug_assert!(n >= 0 && (n as usize) <= MAX_FACTORIAL);
    FACTORIALS[n as usize] as f64
}

/// Clebsch-Gordan coefficient `<j1 m1; j2 m2 | j m>` (Condon-Shortley).
///
/// Returns exactly `0.0` when `m != m1 + m2` or the triangle rule fails.
/// Invalid `(j, m)` pairs are a domain error.
pub fn clebsch_gordan(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
) -> Result<f64, AngularMomentumError> {
    m1.check_projection_of(j1)?;
    m2.check_projection_of(j2)?;
    m.check_projection_of(j)?;
    let (tj1, tm1, tj2, tm2, tj, tm) = (j1.0, m1.0, j2.0, m2.0, j.0, m.0);
    if tm1 + tm2 != tm {
        return Ok(0.0);
    }
    if tj > tj1 + tj2 || tj < (tj1 - tj2).abs() || (tj1 + tj2 + tj) % 2 != 0 {
        return Ok(0.0);
    }
    let top = (tj1 + tj2 + tj) / 2 + 1;
    if top as usize > MAX_FACTORIAL {
        return Err(AngularMomentumError::OutOfRange(j1 + j2 + j));
    }

    // Every argument below is a non-negative integer once the triangle and
    // parity conditions hold.
    let a = (tj1 + tj2 - tj) / 2;
    let b = (tj1 - tj2 + tj) / 2;
    let c = (-tj1 + tj2 + tj) / 2;
    let triangle = fact(a) * fact(b) * fact(c) / fact(top);
    let projections = fact((tj1 + tm1) / 2)
        * fact((tj1 - tm1) / 2)
        * fact((tj2 + tm2) / 2)
        * fact((tj2 - tm2) / 2)
        * fact((tj + tm) / 2)
        * fact((tj - tm) / 2);
    let prefactor = (f64::from(tj + 1) * triangle * projections).sqrt();

    let j1_minus_m1 = (tj1 - tm1) / 2;
    let j2_plus_m2 = (tj2 + tm2) / 2;
    let s1 = (tj - tj2 + tm1) / 2;
    let s2 = (tj - tj1 - tm2) / 2;
    let k_min = 0.max(-s1).max(-s2);
    let k_max = a.min(j1_minus_m1).min(j2_plus_m2);
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let denom = fact(k)
            * fact(a - k)
            * fact(j1_minus_m1 - k)
            * fact(j2_plus_m2 - k)
            * fact(s1 + k)
            * fact(s2 + k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / denom;
    }
    Ok(prefactor * sum)
}

/// Wigner small-d element `d^j_{m_out, m_in}(theta) = <j m_out| exp(-i theta J_y) |j m_in>`.
pub fn wigner_small_d(
    j: HalfInt,
    m_out: HalfInt,
    m_in: HalfInt,
    theta: f64,
) -> Result<f64, AngularMomentumError> {
    m_out.check_projection_of(j)?;
    m_in.check_projection_of(j)?;
    if j.0 as usize > MAX_FACTORIAL {
        return Err(AngularMomentumError::OutOfRange(j));
    }
    let (tj, tmp, tm) = (j.0, m_out.0, m_in.0);
    let j_plus_mp = (tj + tmp) / 2;
    let j_minus_mp = (tj - tmp) / 2;
    let j_plus_m = (tj + tm) / 2;
    let j_minus_m = (tj - tm) / 2;
    let shift = (tmp - tm) / 2;
    let norm = (fact(j_plus_mp) * fact(j_minus_mp) * fact(j_plus_m) * fact(j_minus_m)).sqrt();
    let (s, c) = (theta / 2.0).sin_cos();
    let k_min = 0.max(-shift);
    let k_max = j_plus_m.min(j_minus_mp);
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let sign = if (k + shift) % 2 == 0 { 1.0 } else { -1.0 };
        let denom = fact(j_plus_m - k) * fact(k) * fact(j_minus_mp - k) * fact(k + shift);
        let cos_pow = tj - 2 * k - shift;
        let sin_pow = 2 * k + shift;
        sum += sign * c.powi(cos_pow) * s.powi(sin_pow) / denom;
    }
    Ok(norm * sum)
}

/// Full small-d matrix, rows and columns ordered `m = -j ..= j`.
pub fn wigner_small_d_matrix(
    j: HalfInt,
    theta: f64,
) -> Result<Vec<Vec<f64>>, AngularMomentumError> {
    j.projections()
        .map(|mo| {
            j.projections()
                .map(|mi| wigner_small_d(j, mo, mi, theta))
                .collect()
        })
        .collect()
}

/// Rotation matrix `D^j_{m_out, m_in}(R) = <j m_out| U(R) |j m_in>` for the
/// active rotation by `theta` about the unit vector `axis`,
/// `U = exp(-i theta axis.J)`. Rows and columns ordered `m = -j ..= j`.
///
/// Rotations about the coordinate y axis reduce to the small-d matrix
/// without further floating-point work.
pub fn wigner_big_d_matrix(
    j: HalfInt,
    axis: [f64; 3],
    theta: f64,
) -> Result<Vec<Vec<Complex64>>, AngularMomentumError> {
    let [ax, ay, az] = axis;
    let real = |m: Vec<Vec<f64>>| -> Vec<Vec<Complex64>> {
        m.into_iter()
            .map(|row| row.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
            .collect()
    };
    if ax == 0.0 && az == 0.0 {
        let t = if ay < 0.0 { -theta } else { theta };
        return Ok(real(wigner_small_d_matrix(j, t)?));
    }
    if ax == 0.0 && ay == 0.0 {
        let t = if az < 0.0 { -theta } else { theta };
        return Ok(z_phase_matrix(j, t));
    }
    // R(n, theta) = Rz(phi) Ry(pol) Rz(theta) Ry(-pol) Rz(-phi) with (pol, phi)
    // the polar angles of n.
    let pol = az.clamp(-1.0, 1.0).acos();
    let phi = ay.atan2(ax);
    let factors = [
        z_phase_matrix(j, phi),
        real(wigner_small_d_matrix(j, pol)?),
        z_phase_matrix(j, theta),
        real(wigner_small_d_matrix(j, -pol)?),
        z_phase_matrix(j, -phi),
    ];
    let mut acc = factors[0].clone();
    for f in &factors[1..] {
        acc = cmatmul(&acc, f);
    }
    Ok(acc)
}

fn z_phase_matrix(j: HalfInt, angle: f64) -> Vec<Vec<Complex64>> {
    let dim = (j.0 + 1) as usize;
    let mut out = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for (i, m) in j.projections().enumerate() {
        out[i][i] = Complex64::from_polar(1.0, -m.value() * angle);
    }
    out
}

fn cmatmul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = a.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

/// Gauss-Hermite nodes and weights for `int f(x) exp(-x^2) dx`.
///
/// Newton iteration on the orthonormal Hermite recurrence; nodes are returned
/// in ascending order and are exactly antisymmetric.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Hermite order must be at least 1");
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let half = n.div_ceil(2);
    let mut z = 0.0;
    for i in 0..half {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = orthonormal_hermite(n, z, pim4);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                let (_, d) = orthonormal_hermite(n, z, pim4);
                dp = d;
                break;
            }
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (dp * dp);
        weights[n - 1 - i] = weights[i];
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

/// Value and derivative of the orthonormal Hermite function of degree `n` at `z`.
fn orthonormal_hermite(n: usize, z: f64, pim4: f64) -> (f64, f64) {
    let mut p1 = pim4;
    let mut p2 = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
    }
    (p1, (2.0 * n as f64).sqrt() * p2)
}

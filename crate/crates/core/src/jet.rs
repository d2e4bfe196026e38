//! Truncated third-order Taylor polynomials in three variables.
//!
//! A [`Jet`] holds the Taylor coefficients of a complex function of `(x, y, z)`
//! about an expansion point. Arithmetic propagates the product and chain rules
//! exactly, so evaluating a closed-form mode function on jets yields its
//! analytic first, second and third partial derivatives.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

pub(crate) const ORDER: usize = 3;
pub(crate) const LEN: usize = 20;

const fn monomials() -> [[u8; 3]; LEN] {
    let mut out = [[0u8; 3]; LEN];
    let mut idx = 0;
    let mut deg = 0;
    while deg <= ORDER {
        let mut a = deg;
        loop {
            let mut b = deg - a;
            loop {
                out[idx] = [a as u8, b as u8, (deg - a - b) as u8];
                idx += 1;
                if b == 0 {
                    break;
                }
                b -= 1;
            }
            if a == 0 {
                break;
            }
            a -= 1;
        }
        deg += 1;
    }
    out
}

const MONOMIALS: [[u8; 3]; LEN] = monomials();

const fn degree(e: [u8; 3]) -> usize {
    (e[0] + e[1] + e[2]) as usize
}

const fn index_of(e: [u8; 3]) -> usize {
    let mut i = 0;
    while i < LEN {
        let m = MONOMIALS[i];
        if m[0] == e[0] && m[1] == e[1] && m[2] == e[2] {
            return i;
        }
        i += 1;
    }
    panic!("monomial out of range");
}

const PAIR_COUNT: usize = 84;

const fn product_pairs() -> [(u8, u8, u8); PAIR_COUNT] {
    let mut out = [(0u8, 0u8, 0u8); PAIR_COUNT];
    let mut n = 0;
    let mut i = 0;
    while i < LEN {
        let mut j = 0;
        while j < LEN {
            let a = MONOMIALS[i];
            let b = MONOMIALS[j];
            if degree(a) + degree(b) <= ORDER {
                let k = index_of([a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
                out[n] = (i as u8, j as u8, k as u8);
                n += 1;
            }
            j += 1;
        }
        i += 1;
    }
    assert!(n == PAIR_COUNT);
    out
}

const PAIRS: [(u8, u8, u8); PAIR_COUNT] = product_pairs();

/// For each axis and monomial: (index of the monomial after differentiation, power factor).
const fn partial_table() -> [[(u8, u8); LEN]; 3] {
    let mut out = [[(0u8, 0u8); LEN]; 3];
    let mut axis = 0;
    while axis < 3 {
        let mut i = 0;
        while i < LEN {
            let e = MONOMIALS[i];
            if e[axis] > 0 {
                let mut lowered = e;
                lowered[axis] -= 1;
                out[axis][i] = (index_of(lowered) as u8, e[axis]);
            }
            i += 1;
        }
        axis += 1;
    }
    out
}

const PARTIALS: [[(u8, u8); LEN]; 3] = partial_table();

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Jet {
    c: [Complex64; LEN],
}

impl Jet {
    pub fn constant(v: Complex64) -> Self {
        let mut c = [ZERO; LEN];
        c[0] = v;
        Jet { c }
    }

    pub fn real(v: f64) -> Self {
        Self::constant(Complex64::new(v, 0.0))
    }

    /// The coordinate function `axis` expanded about `at`.
    pub fn variable(axis: usize, at: f64) -> Self {
        let mut j = Self::real(at);
        j.c[1 + axis] = Complex64::new(1.0, 0.0);
        j
    }

    pub fn value(&self) -> Complex64 {
        self.c[0]
    }

    /// `d/d axis` at the expansion point.
    pub fn d1(&self, axis: usize) -> Complex64 {
        self.c[1 + axis]
    }

    /// `d^2 / (d a d b)` at the expansion point.
    pub fn d2(&self, a: usize, b: usize) -> Complex64 {
        let mut e = [0u8; 3];
        e[a] += 1;
        e[b] += 1;
        let factor = if a == b { 2.0 } else { 1.0 };
        self.c[index_of(e)] * factor
    }

    /// Exact partial derivative; the result is valid through order two.
    pub fn partial(&self, axis: usize) -> Self {
        let mut out = [ZERO; LEN];
        for (i, &(target, power)) in PARTIALS[axis].iter().enumerate() {
            if power > 0 {
                out[target as usize] += self.c[i] * f64::from(power);
            }
        }
        Jet { c: out }
    }

    /// Apply a scalar function given its value and first three derivatives at
    /// the constant term.
    pub fn compose(&self, d: [Complex64; 4]) -> Self {
        let mut h = *self;
        h.c[0] = ZERO;
        let h2 = h * h;
        let h3 = h2 * h;
        let mut out = Jet::constant(d[0]);
        for i in 1..LEN {
            out.c[i] = d[1] * h.c[i] + d[2] * 0.5 * h2.c[i] + d[3] / 6.0 * h3.c[i];
        }
        out
    }

    pub fn exp(&self) -> Self {
        let e = self.c[0].exp();
        self.compose([e, e, e, e])
    }

    pub fn recip(&self) -> Self {
        let r = self.c[0].inv();
        let r2 = r * r;
        self.compose([r, -r2, 2.0 * r2 * r, -6.0 * r2 * r2])
    }

    /// Principal square root; the expansion point must be away from the branch cut.
    pub fn sqrt(&self) -> Self {
        let s = self.c[0].sqrt();
        let inv = s.inv();
        let inv3 = inv * inv * inv;
        self.compose([s, 0.5 * inv, -0.25 * inv3, 0.375 * inv3 * inv * inv])
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut out = Jet::real(1.0);
        for _ in 0..n {
            out = out * *self;
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        for v in out.c.iter_mut() {
            *v *= s;
        }
        out
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        for (a, b) in self.c.iter_mut().zip(rhs.c) {
            *a += b;
        }
        self
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        for (a, b) in self.c.iter_mut().zip(rhs.c) {
            *a += b;
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        for (a, b) in self.c.iter_mut().zip(rhs.c) {
            *a -= b;
        }
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for a in self.c.iter_mut() {
            *a = -*a;
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut out = [ZERO; LEN];
        for &(i, j, k) in PAIRS.iter() {
            out[k as usize] += self.c[i as usize] * rhs.c[j as usize];
        }
        Jet { c: out }
    }
}

impl Mul<Complex64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: Complex64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        for a in self.c.iter_mut() {
            *a *= rhs;
        }
        self
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Add<Complex64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Complex64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn monomial_layout() {
        assert_eq!(MONOMIALS[0], [0, 0, 0]);
        assert_eq!(MONOMIALS[1], [1, 0, 0]);
        assert_eq!(MONOMIALS[2], [0, 1, 0]);
        assert_eq!(MONOMIALS[3], [0, 0, 1]);
        assert_eq!(degree(MONOMIALS[LEN - 1]), 3);
    }

    #[test]
    fn polynomial_derivatives() {
        // f = x^2 y + 3 z at (1, 2, -1)
        let (x, y, z) = (
            Jet::variable(0, 1.0),
            Jet::variable(1, 2.0),
            Jet::variable(2, -1.0),
        );
        let f = x * x * y + z * 3.0;
        assert_eq!(f.value(), c(-1.0));
        assert_eq!(f.d1(0), c(4.0));
        assert_eq!(f.d1(1), c(1.0));
        assert_eq!(f.d1(2), c(3.0));
        assert_eq!(f.d2(0, 0), c(4.0));
        assert_eq!(f.d2(0, 1), c(2.0));
        assert_eq!(f.d2(1, 0), c(2.0));
        assert_eq!(f.d2(2, 2), c(0.0));
        // d/dx f = 2xy: second derivatives 2y at (xx), 2x at (xy)
        let fx = f.partial(0);
        assert_eq!(fx.value(), c(4.0));
        assert_eq!(fx.d1(0), c(4.0));
        assert_eq!(fx.d1(1), c(2.0));
        assert_eq!(fx.d2(0, 1), c(2.0));
    }

    #[test]
    fn transcendental_chain_rule() {
        // g = exp(x y) / (1 + z^2) at (0.3, -0.5, 0.2)
        let (x0, y0, z0) = (0.3, -0.5, 0.2);
        let (x, y, z) = (
            Jet::variable(0, x0),
            Jet::variable(1, y0),
            Jet::variable(2, z0),
        );
        let g = (x * y).exp() * (z * z + 1.0).recip();
        let e = (x0 * y0).exp();
        let q = 1.0 / (1.0 + z0 * z0);
        assert!((g.value() - c(e * q)).norm() < 1e-15);
        assert!((g.d1(0) - c(y0 * e * q)).norm() < 1e-15);
        assert!((g.d2(0, 1) - c((1.0 + x0 * y0) * e * q)).norm() < 1e-15);
        let dq = -2.0 * z0 * q * q;
        assert!((g.d1(2) - c(e * dq)).norm() < 1e-15);
        // third derivative d^3/dx^3 = y^3 e q, read through partial
        let gxx = g.partial(0).partial(0);
        assert!((gxx.d1(0) - c(y0.powi(3) * e * q)).norm() < 1e-14);
    }

    #[test]
    fn sqrt_and_powi() {
        let x = Jet::variable(0, 4.0);
        let s = x.sqrt();
        assert!((s.value() - c(2.0)).norm() < 1e-15);
        assert!((s.d1(0) - c(0.25)).norm() < 1e-15);
        assert!((s.d2(0, 0) - c(-1.0 / 32.0)).norm() < 1e-15);
        let p = x.powi(3);
        assert_eq!(p.d2(0, 0), c(24.0));
        assert_eq!(p.partial(0).partial(0).d1(0), c(6.0));
    }
}

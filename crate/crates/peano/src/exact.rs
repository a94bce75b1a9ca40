//! Exact points in cyclotomic lattices.
//!
//! Every vertex the substitution systems produce is an element of
//! `Z[ζ_n][1/den]` for a small `n`. Storing the power-basis coefficients
//! over a positive integer denominator, reduced to lowest terms, makes
//! coincidence detection an integer comparison.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

const MAX_DEG: usize = 4;

/// Coefficients of the cyclotomic polynomial Φ_n without the leading 1,
/// lowest degree first: x^d = -(c0 + c1 x + ... ).
fn cyclotomic_tail(n: u8) -> &'static [i64] {
    match n {
        3 => &[1, 1],
        4 => &[1, 0],
        5 => &[1, 1, 1, 1],
        8 => &[1, 0, 0, 0],
        _ => panic!("unsupported cyclotomic order {n}"),
    }
}

fn degree(n: u8) -> usize {
    cyclotomic_tail(n).len()
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// An element of `Z[ζ_n]` divided by a positive integer, in lowest terms.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExactPoint {
    n: u8,
    c: [i64; MAX_DEG],
    den: i64,
}

impl ExactPoint {
    pub fn zero(n: u8) -> Self {
        let _ = degree(n);
        ExactPoint { n, c: [0; MAX_DEG], den: 1 }
    }

    pub fn from_int(n: u8, v: i64) -> Self {
        let mut p = Self::zero(n);
        p.c[0] = v;
        p
    }

    /// `ζ_n^k` for any integer `k`.
    pub fn zeta(n: u8, k: i64) -> Self {
        let k = k.rem_euclid(n as i64) as usize;
        let mut poly = vec![0i64; k + 1];
        poly[k] = 1;
        Self::from_poly(n, &poly, 1)
    }

    /// Builds `(Σ coeffs[j] ζ^j) / den`, reducing modulo Φ_n.
    pub fn from_poly(n: u8, coeffs: &[i64], den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let tail = cyclotomic_tail(n);
        let d = tail.len();
        let mut work: Vec<i64> = coeffs.to_vec();
        for top in (d..work.len()).rev() {
            let lead = work[top];
            if lead == 0 {
                continue;
            }
            work[top] = 0;
            for (j, t) in tail.iter().enumerate() {
                work[top - d + j] -= lead * t;
            }
        }
        let mut c = [0i64; MAX_DEG];
        for (j, v) in work.iter().take(d).enumerate() {
            c[j] = *v;
        }
        let mut p = ExactPoint { n, c, den };
        p.normalize();
        p
    }

    /// Gaussian-integer point `(x + y i) / den`, used for the square grids.
    pub fn gaussian(x: i64, y: i64, den: i64) -> Self {
        Self::from_poly(4, &[x, y], den)
    }

    fn normalize(&mut self) {
        if self.den < 0 {
            self.den = -self.den;
            for v in self.c.iter_mut() {
                *v = -*v;
            }
        }
        let g = self.c.iter().fold(self.den, |g, &v| gcd(g, v));
        if g > 1 {
            self.den /= g;
            for v in self.c.iter_mut() {
                *v /= g;
            }
        }
    }

    pub fn order(&self) -> u8 {
        self.n
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.c[..degree(self.n)]
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    /// Divides by a nonzero integer.
    pub fn div_int(self, k: i64) -> Self {
        let mut p = self;
        p.den *= k;
        p.normalize();
        p
    }

    pub fn scale_int(self, k: i64) -> Self {
        let mut p = self;
        for v in p.c.iter_mut() {
            *v *= k;
        }
        p.normalize();
        p
    }

    /// Complex conjugation, `ζ^j ↦ ζ^{-j}`.
    pub fn conj(self) -> Self {
        let mut acc = Self::zero(self.n);
        for (j, &v) in self.coefficients().iter().enumerate() {
            if v != 0 {
                acc = acc + Self::zeta(self.n, -(j as i64)).scale_int(v);
            }
        }
        acc.div_int(self.den)
    }

    /// Projection to the real plane.
    pub fn to_xy(&self) -> (f64, f64) {
        let mut x = 0.0;
        let mut y = 0.0;
        for (j, &v) in self.coefficients().iter().enumerate() {
            let a = std::f64::consts::TAU * j as f64 / self.n as f64;
            x += v as f64 * a.cos();
            y += v as f64 * a.sin();
        }
        (x / self.den as f64, y / self.den as f64)
    }

    fn check_same(&self, o: &Self) {
        assert_eq!(self.n, o.n, "mixing cyclotomic orders {} and {}", self.n, o.n);
    }
}

impl Add for ExactPoint {
    type Output = ExactPoint;
    fn add(self, o: ExactPoint) -> ExactPoint {
        self.check_same(&o);
        let g = gcd(self.den, o.den);
        let (fa, fb) = (o.den / g, self.den / g);
        let mut c = [0i64; MAX_DEG];
        for (j, slot) in c.iter_mut().enumerate() {
            *slot = self.c[j] * fa + o.c[j] * fb;
        }
        let mut p = ExactPoint { n: self.n, c, den: self.den * fa };
        p.normalize();
        p
    }
}

impl Neg for ExactPoint {
    type Output = ExactPoint;
    fn neg(self) -> ExactPoint {
        self.scale_int(-1)
    }
}

impl Sub for ExactPoint {
    type Output = ExactPoint;
    fn sub(self, o: ExactPoint) -> ExactPoint {
        self + (-o)
    }
}

impl Mul for ExactPoint {
    type Output = ExactPoint;
    fn mul(self, o: ExactPoint) -> ExactPoint {
        self.check_same(&o);
        let d = degree(self.n);
        let mut prod = vec![0i64; 2 * d - 1];
        for i in 0..d {
            for j in 0..d {
                prod[i + j] += self.c[i] * o.c[j];
            }
        }
        Self::from_poly(self.n, &prod, self.den * o.den)
    }
}

impl fmt::Debug for ExactPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z[ζ{}]{:?}/{}", self.n, self.coefficients(), self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_powers_wrap() {
        for n in [3u8, 4, 5, 8] {
            let z = ExactPoint::zeta(n, 1);
            let mut acc = ExactPoint::from_int(n, 1);
            for _ in 0..n {
                acc = acc * z;
            }
            assert_eq!(acc, ExactPoint::from_int(n, 1), "ζ_{n}^{n} != 1");
        }
    }

    #[test]
    fn sum_of_roots_vanishes() {
        for n in [3u8, 5] {
            let s = (0..n as i64).fold(ExactPoint::zero(n), |a, k| a + ExactPoint::zeta(n, k));
            assert_eq!(s, ExactPoint::zero(n));
        }
    }

    #[test]
    fn golden_ratio_identity() {
        // ζ + ζ⁴ = 2cos(72°) = (√5 - 1)/2 satisfies x² + x - 1 = 0.
        let x = ExactPoint::zeta(5, 1) + ExactPoint::zeta(5, 4);
        let one = ExactPoint::from_int(5, 1);
        assert_eq!(x * x + x - one, ExactPoint::zero(5));
    }

    #[test]
    fn sqrt2_in_z_zeta8() {
        let r2 = ExactPoint::zeta(8, 1) - ExactPoint::zeta(8, 3);
        assert_eq!(r2 * r2, ExactPoint::from_int(8, 2));
        let (x, y) = r2.to_xy();
        assert!((x - 2f64.sqrt()).abs() < 1e-15 && y.abs() < 1e-15);
    }

    #[test]
    fn equality_ignores_representation() {
        let a = ExactPoint::gaussian(2, 4, 6);
        let b = ExactPoint::gaussian(1, 2, 3);
        assert_eq!(a, b);
        assert_eq!(a.denominator(), 3);
    }

    #[test]
    fn conjugation_is_involutive_and_matches_projection() {
        let p = ExactPoint::from_poly(8, &[3, -1, 2, 5], 7);
        assert_eq!(p.conj().conj(), p);
        let (x, y) = p.to_xy();
        let (cx, cy) = p.conj().to_xy();
        assert!((x - cx).abs() < 1e-12 && (y + cy).abs() < 1e-12);
    }
}

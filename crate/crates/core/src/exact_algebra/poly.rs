use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{format_rational, rat_int, to_f64, Rational};

/// Dense univariate polynomial with rational coefficients; `coeffs[k]` is the
/// coefficient of `H^k`. Trailing zeros are always trimmed, so the zero
/// polynomial has no coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HPoly {
    coeffs: Vec<Rational>,
}

impl HPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c * H^k`.
    pub fn monomial(k: usize, c: Rational) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    /// The identity polynomial `H`.
    pub fn var() -> Self {
        Self::monomial(1, Rational::one())
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| rat_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `H^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Exact Horner evaluation.
    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rat_int(k as i64))
                .collect(),
        )
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Composition `self(q(H))`.
    pub fn compose(&self, q: &HPoly) -> Self {
        self.coeffs.iter().rev().fold(Self::zero(), |acc, c| {
            &(&acc * q) + &Self::constant(c.clone())
        })
    }

    /// Coefficients reversed: `H^d p(1/H)` for `d = degree`.
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::from_coeffs(c)
    }

    /// Euclidean division, `self = q * divisor + r`.
    pub fn div_rem(&self, divisor: &HPoly) -> (HPoly, HPoly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1;
            let c = &rem[k] / &lead;
            if !c.is_zero() {
                for (j, dc) in divisor.coeffs.iter().enumerate() {
                    rem[k - dd + j] -= &c * dc;
                }
                quot[k - dd] = c;
            }
            rem.pop();
        }
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(&(Rational::one() / l)),
            None => Self::zero(),
        }
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &HPoly) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Unique polynomial of degree `< points.len()` through the given nodes.
    pub fn interpolate(points: &[(Rational, Rational)]) -> Self {
        let mut acc = Self::zero();
        for (i, (xi, yi)) in points.iter().enumerate() {
            if yi.is_zero() {
                continue;
            }
            let mut basis = Self::one();
            let mut denom = Rational::one();
            for (j, (xj, _)) in points.iter().enumerate() {
                if i != j {
                    basis = &basis * &Self::from_coeffs(vec![-xj.clone(), Rational::one()]);
                    denom *= xi - xj;
                }
            }
            acc = &acc + &basis.scale(&(yi / denom));
        }
        acc
    }
}

impl Add for &HPoly {
    type Output = HPoly;
    fn add(self, rhs: &HPoly) -> HPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        HPoly::from_coeffs((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &HPoly {
    type Output = HPoly;
    fn sub(self, rhs: &HPoly) -> HPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        HPoly::from_coeffs((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &HPoly {
    type Output = HPoly;
    fn mul(self, rhs: &HPoly) -> HPoly {
        if self.is_zero() || rhs.is_zero() {
            return HPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        HPoly::from_coeffs(out)
    }
}

impl Neg for &HPoly {
    type Output = HPoly;
    fn neg(self) -> HPoly {
        HPoly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Add for HPoly {
    type Output = HPoly;
    fn add(self, rhs: HPoly) -> HPoly {
        &self + &rhs
    }
}

impl Sub for HPoly {
    type Output = HPoly;
    fn sub(self, rhs: HPoly) -> HPoly {
        &self - &rhs
    }
}

impl Mul for HPoly {
    type Output = HPoly;
    fn mul(self, rhs: HPoly) -> HPoly {
        &self * &rhs
    }
}

impl fmt::Display for HPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.coeffs.iter().map(format_rational).collect();
        write!(f, "[{}]", items.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::rat;
    use proptest::prelude::*;

    #[test]
    fn arithmetic_examples() {
        let p = HPoly::from_ints(&[1, 2]);
        let q = HPoly::from_ints(&[0, 0, 3]);
        assert_eq!(&p + &q, HPoly::from_ints(&[1, 2, 3]));
        let h = HPoly::from_ints(&[0, 1]);
        assert_eq!(&h * &h, HPoly::from_ints(&[0, 0, 1]));
        assert_eq!(
            HPoly::from_ints(&[2, -4]).scale(&rat(1, 2)),
            HPoly::from_ints(&[1, -2])
        );
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(
            HPoly::from_ints(&[1, -5, 7, -3]).eval(&rat_int(1)),
            rat_int(0)
        );
        assert_eq!(HPoly::zero().eval(&rat_int(7)), rat_int(0));
        assert_eq!(HPoly::from_ints(&[0, 0, 1]).eval(&rat(3, 2)), rat(9, 4));
    }

    #[test]
    fn trims_and_reports_degree() {
        let p = HPoly::from_ints(&[1, 0, 0]);
        assert_eq!(p.degree(), Some(0));
        assert_eq!(HPoly::from_ints(&[0, 0]).degree(), None);
        assert!(HPoly::from_ints(&[1, 1]).scale(&rat_int(0)).is_zero());
    }

    #[test]
    fn gcd_and_interpolation() {
        // (H-1)(H-2) and (H-1)(H+3)
        let a = HPoly::from_ints(&[2, -3, 1]);
        let b = HPoly::from_ints(&[-3, 2, 1]);
        assert_eq!(a.gcd(&b), HPoly::from_ints(&[-1, 1]));
        let pts: Vec<_> = (0..4).map(|x| (rat_int(x), a.eval(&rat_int(x)))).collect();
        assert_eq!(HPoly::interpolate(&pts), a);
    }

    #[test]
    fn composition_and_division() {
        let p = HPoly::from_ints(&[1, 0, 1]);
        let q = HPoly::from_ints(&[1, 2]);
        assert_eq!(p.compose(&q), HPoly::from_ints(&[2, 4, 4]));
        let (quo, rem) = HPoly::from_ints(&[5, 0, 1]).div_rem(&HPoly::from_ints(&[1, 1]));
        assert_eq!(quo, HPoly::from_ints(&[-1, 1]));
        assert_eq!(rem, HPoly::from_ints(&[6]));
    }

    fn small_poly() -> impl Strategy<Value = HPoly> {
        prop::collection::vec((-20i64..20, 1i64..6), 0..6)
            .prop_map(|v| HPoly::from_coeffs(v.into_iter().map(|(n, d)| rat(n, d)).collect()))
    }

    proptest! {
        #[test]
        fn eval_is_multiplicative(p in small_poly(), q in small_poly(), n in -30i64..30, d in 1i64..9) {
            let x = rat(n, d);
            prop_assert_eq!((&p * &q).eval(&x), p.eval(&x) * q.eval(&x));
        }

        #[test]
        fn product_degree_adds(p in small_poly(), q in small_poly()) {
            if let (Some(dp), Some(dq)) = (p.degree(), q.degree()) {
                prop_assert_eq!((&p * &q).degree(), Some(dp + dq));
            }
        }

        #[test]
        fn rational_field_laws(a in (-50i64..50, 1i64..20), b in (-50i64..50, 1i64..20), c in (-50i64..50, 1i64..20)) {
            let (a, b, c) = (rat(a.0, a.1), rat(b.0, b.1), rat(c.0, c.1));
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
        }
    }
}

//! The nilpotent algebra `Q[α]/α^{n+1}`.

use std::fmt;

use num_traits::{One, Zero};

use super::rational::Rational;
use crate::error::{Error, Result};

/// An element `sum_k c_k α^k` of `Q[α]/α^{n+1}`; `coeffs[k]` is the α^k part.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlphaPoly {
    coeffs: Vec<Rational>,
}

impl AlphaPoly {
    pub fn zero(n: usize) -> Self {
        AlphaPoly {
            coeffs: vec![Rational::zero(); n + 1],
        }
    }

    pub fn one(n: usize) -> Self {
        let mut p = Self::zero(n);
        p.coeffs[0] = Rational::one();
        p
    }

    /// From explicit coefficients; `n` is `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "AlphaPoly needs at least one coefficient");
        AlphaPoly { coeffs }
    }

    pub fn from_integers(n: usize, values: &[i64]) -> Self {
        let mut p = Self::zero(n);
        for (k, &v) in values.iter().enumerate().take(n + 1) {
            p.coeffs[k] = Rational::from_integer(v.into());
        }
        p
    }

    /// `c + α` truncated at degree `n`.
    pub fn shifted_alpha(n: usize, c: Rational) -> Self {
        let mut p = Self::zero(n);
        p.coeffs[0] = c;
        if n >= 1 {
            p.coeffs[1] = Rational::one();
        }
        p
    }

    pub fn n(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &Rational {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_unit(&self) -> bool {
        !self.coeffs[0].is_zero()
    }

    pub fn is_unipotent(&self) -> bool {
        self.coeffs[0].is_one()
    }

    fn check_n(&self, other: &AlphaPoly) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::MismatchedAlpha {
                left: self.n(),
                right: other.n(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &AlphaPoly) -> Result<AlphaPoly> {
        self.check_n(other)?;
        Ok(AlphaPoly {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Truncated convolution: terms of α-degree above `n` are dropped.
    pub fn mul(&self, other: &AlphaPoly) -> Result<AlphaPoly> {
        self.check_n(other)?;
        let n = self.n();
        let mut out = AlphaPoly::zero(n);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    out.coeffs[i + j] += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> AlphaPoly {
        let mut acc = AlphaPoly::one(self.n());
        for _ in 0..e {
            acc = acc.mul(self).expect("same n");
        }
        acc
    }

    /// Inverse of a unit, by the recursion `b_k = -(1/a_0) sum_{i=1}^k a_i b_{k-i}`.
    pub fn inverse(&self) -> Result<AlphaPoly> {
        if !self.is_unit() {
            return Err(Error::NonUnit);
        }
        let n = self.n();
        let inv0 = self.coeffs[0].recip();
        let mut out = AlphaPoly::zero(n);
        out.coeffs[0] = inv0.clone();
        for k in 1..=n {
            let mut s = Rational::zero();
            for i in 1..=k {
                s += &self.coeffs[i] * &out.coeffs[k - i];
            }
            out.coeffs[k] = -(s * &inv0);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> AlphaPoly {
        AlphaPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }
}

/// Standalone forms matching the operation names used elsewhere.
pub fn alpha_mul(a: &AlphaPoly, b: &AlphaPoly) -> Result<AlphaPoly> {
    a.mul(b)
}

pub fn alpha_inverse(a: &AlphaPoly) -> Result<AlphaPoly> {
    a.inverse()
}

impl fmt::Display for AlphaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rational::rat;

    fn ap(values: &[i64]) -> AlphaPoly {
        AlphaPoly::from_integers(values.len() - 1, values)
    }

    /// Plain polynomial product with no truncation.
    fn full_product(a: &[i64], b: &[i64]) -> Vec<i64> {
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    #[test]
    fn unit_times_unit() {
        assert_eq!(ap(&[1, 0]).mul(&ap(&[1, 0])).unwrap(), ap(&[1, 0]));
    }

    #[test]
    fn square_drops_alpha_squared() {
        assert_eq!(ap(&[1, 1]).mul(&ap(&[1, 1])).unwrap(), ap(&[1, 2]));
    }

    #[test]
    fn product_matches_truncated_full_product() {
        let full = full_product(&[2, 3, 1], &[1, -1, 0]);
        let expected = ap(&full[..3]);
        assert_eq!(expected, ap(&[2, 1, -2]));
        assert_eq!(ap(&[2, 3, 1]).mul(&ap(&[1, -1, 0])).unwrap(), expected);
    }

    #[test]
    fn mismatched_orders_are_rejected() {
        assert!(matches!(
            ap(&[1, 1]).mul(&ap(&[1, 1, 1])),
            Err(Error::MismatchedAlpha { left: 1, right: 2 })
        ));
    }

    #[test]
    fn inverses() {
        assert_eq!(ap(&[1, 0, 0]).inverse().unwrap(), ap(&[1, 0, 0]));
        assert_eq!(ap(&[1, 1]).inverse().unwrap(), ap(&[1, -1]));
        let inv = ap(&[2, 3, 1]).inverse().unwrap();
        assert_eq!(
            inv,
            AlphaPoly::from_coeffs(vec![rat(1, 2), rat(-3, 4), rat(7, 8)])
        );
        assert_eq!(inv.mul(&ap(&[2, 3, 1])).unwrap(), AlphaPoly::one(2));
    }

    #[test]
    fn non_units_have_no_inverse() {
        assert!(matches!(ap(&[0, 1, 2]).inverse(), Err(Error::NonUnit)));
    }
}

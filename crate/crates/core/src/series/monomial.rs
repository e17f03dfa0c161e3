//! Packed exponent vectors.
//!
//! A monomial in up to [`MAX_VARS`] variables is packed into a single `u64`:
//! byte `i` holds the exponent of variable `i` and the top byte holds the total
//! degree. Integer order therefore sorts first by total degree, which the
//! truncated products in [`super::TPoly`] rely on for early exit.

use std::fmt;

/// Largest supported number of variables.
pub const MAX_VARS: usize = 7;
/// Largest supported total degree (and hence per-variable exponent).
pub const MAX_DEGREE: u32 = 255;

const DEGREE_SHIFT: u32 = 56;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    /// The monomial `x_i`.
    pub fn var(i: usize) -> Monomial {
        assert!(i < MAX_VARS, "variable index {i} out of range");
        Monomial((1u64 << (8 * i as u32)) | (1u64 << DEGREE_SHIFT))
    }

    /// Builds a monomial from an exponent slice; `None` if it does not fit.
    pub fn from_exponents(exps: &[u32]) -> Option<Monomial> {
        if exps.len() > MAX_VARS {
            return None;
        }
        let mut packed = 0u64;
        let mut degree = 0u32;
        for (i, &e) in exps.iter().enumerate() {
            if e > MAX_DEGREE {
                return None;
            }
            degree += e;
            packed |= (e as u64) << (8 * i as u32);
        }
        if degree > MAX_DEGREE {
            return None;
        }
        Some(Monomial(packed | ((degree as u64) << DEGREE_SHIFT)))
    }

    #[inline]
    pub fn degree(self) -> u32 {
        (self.0 >> DEGREE_SHIFT) as u32
    }

    #[inline]
    pub fn exponent(self, i: usize) -> u32 {
        ((self.0 >> (8 * i as u32)) & 0xff) as u32
    }

    pub fn exponents(self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|i| self.exponent(i)).collect()
    }

    /// Product of monomials. The caller guarantees the total degree stays
    /// within [`MAX_DEGREE`] (truncated arithmetic never exceeds it).
    #[inline]
    pub fn mul(self, other: Monomial) -> Monomial {
        debug_assert!(self.degree() + other.degree() <= MAX_DEGREE);
        Monomial(self.0 + other.0)
    }

    /// Divides by `x_i`, or `None` when the exponent of `x_i` is zero.
    #[inline]
    pub fn div_var(self, i: usize) -> Option<Monomial> {
        if self.exponent(i) == 0 {
            None
        } else {
            Some(Monomial(self.0 - Monomial::var(i).0))
        }
    }

    /// True when the exponent of every variable at index `>= nvars` is zero.
    pub fn fits(self, nvars: usize) -> bool {
        (nvars..MAX_VARS).all(|i| self.exponent(i) == 0)
    }

    /// `prod_i e_i!`, the divided-power normalisation of this monomial.
    pub fn factorial_product(self, nvars: usize) -> num_bigint::BigInt {
        (0..nvars)
            .map(|i| super::rational::factorial(self.exponent(i)))
            .product()
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let exps: Vec<u32> = (0..MAX_VARS).map(|i| self.exponent(i)).collect();
        let last = exps.iter().rposition(|&e| e != 0).map_or(0, |p| p + 1);
        write!(f, "{:?}", &exps[..last])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing_round_trips() {
        let m = Monomial::from_exponents(&[2, 0, 5, 1]).unwrap();
        assert_eq!(m.degree(), 8);
        assert_eq!(m.exponents(4), vec![2, 0, 5, 1]);
        assert!(m.fits(4));
        assert!(!m.fits(3));
    }

    #[test]
    fn product_adds_exponents_and_degree() {
        let a = Monomial::from_exponents(&[1, 2]).unwrap();
        let b = Monomial::from_exponents(&[3, 0, 1]).unwrap();
        let p = a.mul(b);
        assert_eq!(p.exponents(3), vec![4, 2, 1]);
        assert_eq!(p.degree(), 7);
        assert_eq!(p.div_var(2).unwrap().exponents(3), vec![4, 2, 0]);
        assert_eq!(a.div_var(2), None);
    }

    #[test]
    fn order_is_graded() {
        let low = Monomial::from_exponents(&[0, 0, 0, 0, 0, 0, 2]).unwrap();
        let high = Monomial::from_exponents(&[3]).unwrap();
        assert!(low < high);
    }

    #[test]
    fn oversized_exponents_are_rejected() {
        assert!(Monomial::from_exponents(&[256]).is_none());
        assert!(Monomial::from_exponents(&[200, 100]).is_none());
        assert!(Monomial::from_exponents(&[0; 8]).is_none());
    }
}

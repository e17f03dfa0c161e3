//! Multivariate polynomials over Q truncated at a total degree.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::monomial::{Monomial, MAX_DEGREE, MAX_VARS};
use super::rational::Rational;
use crate::error::{Error, Result};

/// A polynomial in `nvars` variables with every stored term of total degree
/// at most `max_degree`. Products silently drop terms above that degree and
/// zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TPoly {
    nvars: usize,
    max_degree: u32,
    terms: BTreeMap<Monomial, Rational>,
}

impl TPoly {
    pub fn zero(nvars: usize, max_degree: u32) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables are supported");
        assert!(max_degree <= MAX_DEGREE, "truncation degree {max_degree} too large");
        TPoly {
            nvars,
            max_degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, max_degree: u32, c: Rational) -> Self {
        Self::monomial(nvars, max_degree, Monomial::ONE, c)
    }

    pub fn one(nvars: usize, max_degree: u32) -> Self {
        Self::constant(nvars, max_degree, Rational::one())
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, max_degree: u32, i: usize) -> Self {
        assert!(i < nvars, "variable {i} out of range for {nvars} variables");
        Self::monomial(nvars, max_degree, Monomial::var(i), Rational::one())
    }

    pub fn monomial(nvars: usize, max_degree: u32, m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(nvars, max_degree);
        p.add_term(m, c);
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; terms above
    /// the truncation degree are dropped.
    pub fn from_terms<I>(nvars: usize, max_degree: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Self::zero(nvars, max_degree);
        for (exps, c) in terms {
            assert_eq!(exps.len(), nvars, "exponent vector has wrong length");
            let m = Monomial::from_exponents(&exps).expect("exponents fit");
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in graded order.
    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &Rational)> + '_ {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn coeff(&self, m: Monomial) -> Option<&Rational> {
        self.terms.get(&m)
    }

    /// Coefficient of the monomial with the given exponents (zero if absent).
    pub fn coeff_of(&self, exps: &[u32]) -> Rational {
        Monomial::from_exponents(exps)
            .and_then(|m| self.terms.get(&m).cloned())
            .unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Monomial::ONE)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Lowest total degree carrying a nonzero coefficient.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(|m| m.degree())
    }

    pub fn top_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.degree())
    }

    pub fn compatible(&self, other: &TPoly) -> Result<()> {
        if self.nvars != other.nvars || self.max_degree != other.max_degree {
            return Err(Error::MismatchedTruncation(format!(
                "({} vars, degree {}) vs ({} vars, degree {})",
                self.nvars, self.max_degree, other.nvars, other.max_degree
            )));
        }
        Ok(())
    }

    /// Adds `c * m`, ignoring terms above the truncation degree.
    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        debug_assert!(m.fits(self.nvars));
        if m.degree() > self.max_degree || c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &TPoly, c: &Rational) {
        debug_assert!(self.compatible(other).is_ok());
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(*m, v * c);
        }
    }

    pub fn add_assign_poly(&mut self, other: &TPoly) {
        debug_assert!(self.compatible(other).is_ok());
        for (m, v) in &other.terms {
            self.add_term(*m, v.clone());
        }
    }

    pub fn try_add(&self, other: &TPoly) -> Result<TPoly> {
        self.compatible(other)?;
        let mut out = self.clone();
        out.add_assign_poly(other);
        Ok(out)
    }

    pub fn try_sub(&self, other: &TPoly) -> Result<TPoly> {
        self.compatible(other)?;
        let mut out = self.clone();
        out.add_scaled(other, &-Rational::one());
        Ok(out)
    }

    pub fn try_mul(&self, other: &TPoly) -> Result<TPoly> {
        self.compatible(other)?;
        Ok(self.mul_up_to(other, self.max_degree))
    }

    /// Product keeping only terms of total degree `<= limit`.
    pub fn mul_up_to(&self, other: &TPoly, limit: u32) -> TPoly {
        let limit = limit.min(self.max_degree);
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            if da > limit {
                break;
            }
            let room = limit - da;
            for (mb, cb) in &other.terms {
                if mb.degree() > room {
                    break;
                }
                let prod = ca * cb;
                match acc.entry(ma.mul(*mb)) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(prod);
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        *o.get_mut() += prod;
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        TPoly {
            nvars: self.nvars,
            max_degree: self.max_degree,
            terms: acc,
        }
    }

    pub fn scale(&self, c: &Rational) -> TPoly {
        if c.is_zero() {
            return TPoly::zero(self.nvars, self.max_degree);
        }
        TPoly {
            nvars: self.nvars,
            max_degree: self.max_degree,
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    /// `c * m * self`, truncated.
    pub fn mul_monomial(&self, m: Monomial, c: &Rational) -> TPoly {
        let mut out = TPoly::zero(self.nvars, self.max_degree);
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.terms {
            if k.degree() + m.degree() > self.max_degree {
                break;
            }
            out.terms.insert(k.mul(m), v * c);
        }
        out
    }

    /// `∂/∂x_var`. The result keeps the same truncation metadata; it is only
    /// meaningful up to degree `max_degree - 1`.
    pub fn partial(&self, var: usize) -> TPoly {
        assert!(var < self.nvars, "variable {var} out of range");
        let mut out = TPoly::zero(self.nvars, self.max_degree);
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            if let Some(q) = m.div_var(var) {
                out.terms.insert(q, c * Rational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    /// `exp(self)` for a series without constant term.
    pub fn exp(&self) -> Result<TPoly> {
        if !self.constant_term().is_zero() {
            return Err(Error::NonZeroConstant);
        }
        let mut out = TPoly::one(self.nvars, self.max_degree);
        let mut power = TPoly::one(self.nvars, self.max_degree);
        for r in 1..=self.max_degree {
            power = power.mul_up_to(self, self.max_degree);
            if power.is_zero() {
                break;
            }
            power = power.scale(&Rational::new(BigInt::one(), BigInt::from(r)));
            out.add_assign_poly(&power);
        }
        Ok(out)
    }

    /// The part of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> TPoly {
        TPoly {
            nvars: self.nvars,
            max_degree: self.max_degree,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Same polynomial re-tagged with a different truncation degree; terms
    /// above the new degree are dropped.
    pub fn with_max_degree(&self, d: u32) -> TPoly {
        assert!(d <= MAX_DEGREE);
        TPoly {
            nvars: self.nvars,
            max_degree: d,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= d)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Drops every term of total degree above `d`, keeping the metadata.
    pub fn truncated(&self, d: u32) -> TPoly {
        TPoly {
            nvars: self.nvars,
            max_degree: self.max_degree,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= d)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Sets every variable outside `keep` to zero.
    pub fn restrict_to(&self, keep: &[usize]) -> TPoly {
        TPoly {
            nvars: self.nvars,
            max_degree: self.max_degree,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| (0..self.nvars).all(|i| keep.contains(&i) || m.exponent(i) == 0))
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// First monomial (in graded order) of degree `<= up_to` where the two
    /// polynomials differ.
    pub fn first_difference(&self, other: &TPoly, up_to: u32) -> Option<(Monomial, Rational, Rational)> {
        let zero = Rational::zero();
        let keys: std::collections::BTreeSet<Monomial> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .filter(|m| m.degree() <= up_to)
            .copied()
            .collect();
        keys.into_iter().find_map(|m| {
            let a = self.terms.get(&m).unwrap_or(&zero);
            let b = other.terms.get(&m).unwrap_or(&zero);
            (a != b).then(|| (m, a.clone(), b.clone()))
        })
    }

    /// True when `self` and `other` agree on every term of degree `<= up_to`.
    pub fn agrees_up_to(&self, other: &TPoly, up_to: u32) -> bool {
        self.first_difference(other, up_to).is_none()
    }

    /// Renders with variables named `{prefix}0, {prefix}1, ...`.
    pub fn display_with(&self, prefix: &str) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let mut factors = Vec::new();
            for v in 0..self.nvars {
                match m.exponent(v) {
                    0 => {}
                    1 => factors.push(format!("{prefix}{v}")),
                    e => factors.push(format!("{prefix}{v}^{e}")),
                }
            }
            let negative = c < &Rational::zero();
            let mag = if negative { -c.clone() } else { c.clone() };
            let body = match (factors.is_empty(), mag.is_one()) {
                (true, _) => mag.to_string(),
                (false, true) => factors.join("*"),
                (false, false) => format!("{}*{}", mag, factors.join("*")),
            };
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }
}

impl fmt::Display for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("t"))
    }
}

impl Add for &TPoly {
    type Output = TPoly;
    fn add(self, rhs: &TPoly) -> TPoly {
        self.try_add(rhs).expect("TPoly addition with mismatched truncation")
    }
}

impl Sub for &TPoly {
    type Output = TPoly;
    fn sub(self, rhs: &TPoly) -> TPoly {
        self.try_sub(rhs).expect("TPoly subtraction with mismatched truncation")
    }
}

impl Mul for &TPoly {
    type Output = TPoly;
    fn mul(self, rhs: &TPoly) -> TPoly {
        self.try_mul(rhs).expect("TPoly product with mismatched truncation")
    }
}

impl Neg for &TPoly {
    type Output = TPoly;
    fn neg(self) -> TPoly {
        self.scale(&-Rational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rational::{int, rat};

    fn t(nvars: usize, d: u32, i: usize) -> TPoly {
        TPoly::var(nvars, d, i)
    }

    #[test]
    fn difference_of_squares() {
        let one = TPoly::one(3, 4);
        let a = &one + &t(3, 4, 1);
        let b = &one - &t(3, 4, 1);
        let expected = &one - &(&t(3, 4, 1) * &t(3, 4, 1));
        assert_eq!(&a * &b, expected);
    }

    #[test]
    fn products_truncate() {
        let x = t(2, 1, 1);
        assert!((&x * &x).is_zero());
    }

    #[test]
    fn derivative_lowers_degree() {
        let p = TPoly::from_terms(3, 5, [(vec![0, 2, 1], int(1))]);
        let expected = TPoly::from_terms(3, 5, [(vec![0, 1, 1], int(2))]);
        assert_eq!(p.partial(1), expected);
        assert!(p.partial(0).is_zero());
    }

    #[test]
    fn mismatched_metadata_is_an_error() {
        let a = TPoly::one(2, 3);
        let b = TPoly::one(2, 4);
        assert!(matches!(a.try_mul(&b), Err(Error::MismatchedTruncation(_))));
        assert!(matches!(a.try_add(&TPoly::one(3, 3)), Err(Error::MismatchedTruncation(_))));
    }

    #[test]
    fn exp_of_zero_is_one() {
        assert_eq!(TPoly::zero(2, 5).exp().unwrap(), TPoly::one(2, 5));
    }

    #[test]
    fn exp_of_single_variable() {
        let e = t(1, 3, 0).exp().unwrap();
        let expected = TPoly::from_terms(
            1,
            3,
            [
                (vec![0], int(1)),
                (vec![1], int(1)),
                (vec![2], rat(1, 2)),
                (vec![3], rat(1, 6)),
            ],
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn exp_of_sum_matches_multinomial_expansion() {
        // exp(t1 + t2) up to degree 2; the oracle sums (t1 + t2)^r / r! with
        // binomial coefficients spelled out.
        let s = &t(3, 2, 1) + &t(3, 2, 2);
        let mut oracle = TPoly::zero(3, 2);
        for r in 0..=2u32 {
            for a in 0..=r {
                let coeff = Rational::new(
                    crate::series::rational::binomial(r, a),
                    crate::series::rational::factorial(r),
                );
                oracle.add_term(Monomial::from_exponents(&[0, a, r - a]).unwrap(), coeff);
            }
        }
        assert_eq!(s.exp().unwrap(), oracle);
        assert_eq!(oracle.coeff_of(&[0, 1, 1]), int(1));
        assert_eq!(oracle.coeff_of(&[0, 2, 0]), rat(1, 2));
    }

    #[test]
    fn exp_rejects_constant_term() {
        assert!(matches!(TPoly::one(1, 3).exp(), Err(Error::NonZeroConstant)));
    }

    #[test]
    fn display_is_readable() {
        let p = TPoly::from_terms(2, 3, [(vec![0, 0], int(1)), (vec![0, 2], rat(-1, 2)), (vec![1, 1], int(3))]);
        assert_eq!(p.to_string(), "1 + 3*t0*t1 - 1/2*t1^2");
    }
}

//! Elements of the period space in the trivialized frame.
//!
//! An [`HVec`] stands for `ℏ^{-(n+1)α} · Σ_{k,j} α^k ℏ^j c_{k,j}(t)`; only the
//! `c_{k,j}` are stored, for `0 <= k <= n` and `j` inside an [`HbarWindow`].
//! Writing above the window top is an error. Data falling below the bottom is
//! dropped, and [`HVec::exact_from`] records from which ℏ-degree upwards the
//! stored coefficients are still complete.

use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::alpha::AlphaPoly;
use super::coord::Substitution;
use super::monomial::Monomial;
use super::rational::Rational;
use super::tpoly::TPoly;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HbarWindow {
    pub j_min: i32,
    pub j_max: i32,
}

impl HbarWindow {
    pub fn new(j_min: i32, j_max: i32) -> Self {
        assert!(j_min <= j_max, "empty window [{j_min}, {j_max}]");
        HbarWindow { j_min, j_max }
    }

    pub fn width(&self) -> usize {
        (self.j_max - self.j_min + 1) as usize
    }

    pub fn contains(&self, j: i32) -> bool {
        self.j_min <= j && j <= self.j_max
    }

    pub fn covers(&self, other: &HbarWindow) -> bool {
        self.j_min <= other.j_min && other.j_max <= self.j_max
    }

    pub fn degrees(&self) -> impl DoubleEndedIterator<Item = i32> {
        self.j_min..=self.j_max
    }
}

impl fmt::Display for HbarWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.j_min, self.j_max)
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct HVec {
    n: usize,
    nvars: usize,
    max_degree: u32,
    window: HbarWindow,
    exact_from: i32,
    coeffs: Vec<TPoly>,
}

/// Where two [`HVec`]s first differ.
#[derive(Clone, Debug, PartialEq)]
pub struct SlotDifference {
    pub k: usize,
    pub j: i32,
    pub monomial: Vec<u32>,
    pub left: Rational,
    pub right: Rational,
}

impl fmt::Display for SlotDifference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "slot (k={}, j={}) monomial {:?}: {} vs {}",
            self.k, self.j, self.monomial, self.left, self.right
        )
    }
}

impl HVec {
    pub fn zero(n: usize, nvars: usize, max_degree: u32, window: HbarWindow) -> Self {
        let empty = TPoly::zero(nvars, max_degree);
        HVec {
            n,
            nvars,
            max_degree,
            window,
            exact_from: window.j_min,
            coeffs: vec![empty; (n + 1) * window.width()],
        }
    }

    /// Builds a t-independent element from `(k, j, value)` triples.
    pub fn from_scalars<I>(n: usize, nvars: usize, max_degree: u32, window: HbarWindow, slots: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, i32, Rational)>,
    {
        let mut v = HVec::zero(n, nvars, max_degree, window);
        for (k, j, c) in slots {
            v.add_scaled_at(k, j, &TPoly::one(nvars, max_degree), &c)?;
        }
        Ok(v)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn window(&self) -> HbarWindow {
        self.window
    }

    /// Lowest ℏ-degree from which the stored coefficients are complete.
    pub fn exact_from(&self) -> i32 {
        self.exact_from
    }

    pub fn set_exact_from(&mut self, j: i32) {
        self.exact_from = j.clamp(self.window.j_min, self.window.j_max + 1);
    }

    #[inline]
    fn index(&self, k: usize, j: i32) -> usize {
        k * self.window.width() + (j - self.window.j_min) as usize
    }

    /// The coefficient of `α^k ℏ^j`, or `None` outside the window.
    pub fn coeff(&self, k: usize, j: i32) -> Option<&TPoly> {
        (k <= self.n && self.window.contains(j)).then(|| &self.coeffs[self.index(k, j)])
    }

    /// The coefficient of `α^k ℏ^j`; zero outside the window.
    pub fn coeff_or_zero(&self, k: usize, j: i32) -> TPoly {
        self.coeff(k, j)
            .cloned()
            .unwrap_or_else(|| TPoly::zero(self.nvars, self.max_degree))
    }

    pub fn coeff_mut(&mut self, k: usize, j: i32) -> Option<&mut TPoly> {
        if k <= self.n && self.window.contains(j) {
            let idx = self.index(k, j);
            Some(&mut self.coeffs[idx])
        } else {
            None
        }
    }

    fn overflow(&self, k: usize, j: i32) -> Error {
        Error::WindowOverflow {
            k,
            j,
            j_max: self.window.j_max,
        }
    }

    /// Overwrites a slot. Zero writes outside the window are ignored, nonzero
    /// writes above it fail and nonzero writes below it are dropped.
    pub fn set(&mut self, k: usize, j: i32, p: TPoly) -> Result<()> {
        debug_assert!(p.compatible(&TPoly::zero(self.nvars, self.max_degree)).is_ok());
        assert!(k <= self.n, "alpha degree {k} exceeds n={}", self.n);
        if j > self.window.j_max {
            return if p.is_zero() { Ok(()) } else { Err(self.overflow(k, j)) };
        }
        if let Some(slot) = self.coeff_mut(k, j) {
            *slot = p;
        }
        Ok(())
    }

    /// `slot(k,j) += c * p`, with the same edge rules as [`HVec::set`].
    pub fn add_scaled_at(&mut self, k: usize, j: i32, p: &TPoly, c: &Rational) -> Result<()> {
        if k > self.n || p.is_zero() || c.is_zero() {
            return Ok(());
        }
        if j > self.window.j_max {
            return Err(self.overflow(k, j));
        }
        if let Some(slot) = self.coeff_mut(k, j) {
            slot.add_scaled(p, c);
        }
        Ok(())
    }

    /// Nonzero slots as `(k, j, coefficient)`, ordered by `k` then `j`.
    pub fn slots(&self) -> impl Iterator<Item = (usize, i32, &TPoly)> + '_ {
        let w = self.window.width();
        let j_min = self.window.j_min;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(move |(idx, p)| (idx / w, j_min + (idx % w) as i32, p))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(TPoly::is_zero)
    }

    /// Highest ℏ-degree carrying a nonzero coefficient.
    pub fn top_degree(&self) -> Option<i32> {
        self.slots().map(|(_, j, _)| j).max()
    }

    fn check_compatible(&self, other: &HVec) -> Result<()> {
        if self.n != other.n {
            return Err(Error::MismatchedAlpha {
                left: self.n,
                right: other.n,
            });
        }
        if self.nvars != other.nvars || self.max_degree != other.max_degree || self.window != other.window {
            return Err(Error::MismatchedTruncation(format!(
                "HVec ({} vars, degree {}, window {}) vs ({} vars, degree {}, window {})",
                self.nvars, self.max_degree, self.window, other.nvars, other.max_degree, other.window
            )));
        }
        Ok(())
    }

    fn map_slots<F>(&self, f: F) -> HVec
    where
        F: Fn(&TPoly) -> TPoly + Sync + Send,
    {
        HVec {
            coeffs: self.coeffs.par_iter().map(f).collect(),
            ..self.clone_meta()
        }
    }

    fn clone_meta(&self) -> HVec {
        HVec {
            n: self.n,
            nvars: self.nvars,
            max_degree: self.max_degree,
            window: self.window,
            exact_from: self.exact_from,
            coeffs: Vec::new(),
        }
    }

    pub fn add(&self, other: &HVec) -> Result<HVec> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            a.add_assign_poly(b);
        }
        out.exact_from = self.exact_from.max(other.exact_from);
        Ok(out)
    }

    pub fn sub(&self, other: &HVec) -> Result<HVec> {
        self.add(&other.scale_rational(&-Rational::from_integer(1.into())))
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &HVec, c: &Rational) -> Result<()> {
        self.check_compatible(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            a.add_scaled(b, c);
        }
        self.exact_from = self.exact_from.max(other.exact_from);
        Ok(())
    }

    pub fn scale_rational(&self, c: &Rational) -> HVec {
        self.map_slots(|p| p.scale(c))
    }

    /// Multiplies every coefficient by the series `p`.
    pub fn scale(&self, p: &TPoly) -> Result<HVec> {
        p.compatible(&TPoly::zero(self.nvars, self.max_degree))?;
        Ok(self.map_slots(|c| c.mul_up_to(p, self.max_degree)))
    }

    /// Multiplies every coefficient by `p`, keeping only t-degrees `<= limit`.
    pub fn scale_up_to(&self, p: &TPoly, limit: u32) -> Result<HVec> {
        p.compatible(&TPoly::zero(self.nvars, self.max_degree))?;
        Ok(self.map_slots(|c| c.mul_up_to(p, limit)))
    }

    /// Multiplication by `ℏ^m`: slot `(k, j)` moves to `(k, j + m)`.
    pub fn shift_hbar(&self, m: i32) -> Result<HVec> {
        if m > 0 {
            for (k, j, _) in self.slots() {
                if j + m > self.window.j_max {
                    return Err(self.overflow(k, j + m));
                }
            }
        }
        let mut out = HVec::zero(self.n, self.nvars, self.max_degree, self.window);
        for (k, j, p) in self.slots() {
            if let Some(slot) = out.coeff_mut(k, j + m) {
                *slot = p.clone();
            }
        }
        out.set_exact_from(self.exact_from + m);
        Ok(out)
    }

    /// Multiplication by α: slot `(k, j)` moves to `(k + 1, j)`, `k = n` drops.
    pub fn apply_alpha(&self) -> HVec {
        let mut out = HVec::zero(self.n, self.nvars, self.max_degree, self.window);
        for (k, j, p) in self.slots() {
            if k < self.n {
                *out.coeff_mut(k + 1, j).expect("inside window") = p.clone();
            }
        }
        out.exact_from = self.exact_from;
        out
    }

    /// Multiplication by a constant element of `Q[α]/α^{n+1}`.
    pub fn mul_alpha_poly(&self, c: &AlphaPoly) -> Result<HVec> {
        if c.n() != self.n {
            return Err(Error::MismatchedAlpha {
                left: self.n,
                right: c.n(),
            });
        }
        let mut out = HVec::zero(self.n, self.nvars, self.max_degree, self.window);
        out.exact_from = self.exact_from;
        for (k, j, p) in self.slots() {
            for (i, ci) in c.coeffs().iter().enumerate().take(self.n + 1 - k) {
                out.add_scaled_at(k + i, j, p, ci)?;
            }
        }
        Ok(out)
    }

    /// Widens the window, filling new slots with zeros.
    pub fn embed(&self, window: HbarWindow) -> Result<HVec> {
        if !window.covers(&self.window) {
            return Err(Error::MismatchedTruncation(format!(
                "cannot embed window {} into the narrower {}",
                self.window, window
            )));
        }
        let mut out = HVec::zero(self.n, self.nvars, self.max_degree, window);
        for (k, j, p) in self.slots() {
            *out.coeff_mut(k, j).expect("inside window") = p.clone();
        }
        out.exact_from = self.exact_from;
        Ok(out)
    }

    /// Restricts to a narrower window. Fails if something nonzero sits above
    /// the new top.
    pub fn restrict(&self, window: HbarWindow) -> Result<HVec> {
        let mut out = HVec::zero(self.n, self.nvars, self.max_degree, window);
        for (k, j, p) in self.slots() {
            out.set(k, j, p.clone())?;
        }
        out.set_exact_from(self.exact_from.max(window.j_min));
        Ok(out)
    }

    /// `∂/∂x_var` applied slot-wise.
    pub fn partial(&self, var: usize) -> HVec {
        self.map_slots(|p| p.partial(var))
    }

    /// Substitutes new coordinates into every coefficient.
    pub fn compose(&self, sub: &Substitution) -> Result<HVec> {
        let target = sub.target_nvars();
        let coeffs: Result<Vec<TPoly>> = self.coeffs.par_iter().map(|p| sub.apply(p)).collect();
        Ok(HVec {
            nvars: target,
            coeffs: coeffs?,
            ..self.clone_meta()
        })
    }

    /// Drops every t-term of total degree above `d` (metadata unchanged).
    pub fn truncated(&self, d: u32) -> HVec {
        self.map_slots(|p| p.truncated(d))
    }

    /// The part of total t-degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> HVec {
        self.map_slots(|p| p.homogeneous_part(d))
    }

    /// The value at `t = 0`.
    pub fn at_origin(&self) -> HVec {
        self.homogeneous_part(0)
    }

    /// First slot in `j_range` where the two elements differ on t-terms of
    /// degree `<= up_to`. Slots outside either window count as zero.
    pub fn first_difference(&self, other: &HVec, j_range: (i32, i32), up_to: u32) -> Option<SlotDifference> {
        let zero = TPoly::zero(self.nvars, self.max_degree);
        let zero_other = TPoly::zero(other.nvars, other.max_degree);
        for j in (j_range.0..=j_range.1).rev() {
            for k in 0..=self.n.max(other.n) {
                let a = self.coeff(k, j).unwrap_or(&zero);
                let b = other.coeff(k, j).unwrap_or(&zero_other);
                if let Some((m, l, r)) = a.first_difference(b, up_to) {
                    return Some(SlotDifference {
                        k,
                        j,
                        monomial: m.exponents(self.nvars),
                        left: l,
                        right: r,
                    });
                }
            }
        }
        None
    }

    /// Coefficient of a single t-monomial at slot `(k, j)`.
    pub fn coefficient(&self, k: usize, j: i32, m: Monomial) -> Rational {
        self.coeff(k, j)
            .and_then(|p| p.coeff(m).cloned())
            .unwrap_or_else(Rational::zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rational::int;

    fn sample(n: usize) -> HVec {
        let w = HbarWindow::new(-6, 4);
        let mut v = HVec::zero(n, 2, 3, w);
        v.set(0, -3, TPoly::var(2, 3, 1)).unwrap();
        v.set(n, 1, TPoly::one(2, 3)).unwrap();
        v.set(0, 0, &TPoly::one(2, 3) + &TPoly::var(2, 3, 0)).unwrap();
        v
    }

    #[test]
    fn shift_by_zero_is_identity() {
        let v = sample(2);
        assert_eq!(v.shift_hbar(0).unwrap(), v);
    }

    #[test]
    fn shift_moves_slots() {
        let v = sample(2);
        let s = v.shift_hbar(2).unwrap();
        assert_eq!(s.coeff(0, -1).unwrap(), &TPoly::var(2, 3, 1));
        assert!(s.coeff(0, -3).unwrap().is_zero());
        assert_eq!(s.exact_from(), -4);
    }

    #[test]
    fn shift_past_top_overflows() {
        let v = sample(1);
        assert!(matches!(
            v.shift_hbar(4),
            Err(Error::WindowOverflow { k: 1, j: 5, j_max: 4 })
        ));
    }

    #[test]
    fn alpha_is_nilpotent() {
        let v = sample(1);
        assert!(v.apply_alpha().apply_alpha().is_zero());
        assert!(!v.apply_alpha().is_zero());
    }

    #[test]
    fn alpha_poly_multiplication_matches_apply_alpha() {
        let v = sample(2);
        let c = AlphaPoly::from_integers(2, &[1, 3, -2]);
        let direct = v.mul_alpha_poly(&c).unwrap();
        let by_hand = v
            .add(&v.apply_alpha().scale_rational(&int(3)))
            .unwrap()
            .add(&v.apply_alpha().apply_alpha().scale_rational(&int(-2)))
            .unwrap();
        assert_eq!(direct, by_hand);
    }

    #[test]
    fn embed_widens_with_zeros() {
        let v = sample(2);
        let e = v.embed(HbarWindow::new(-10, 8)).unwrap();
        assert_eq!(e.coeff(0, -3), v.coeff(0, -3));
        assert!(e.coeff(1, 7).unwrap().is_zero());
        assert!(v.embed(HbarWindow::new(-5, 8)).is_err());
    }

    #[test]
    fn bottom_loss_is_recorded() {
        let v = sample(2).shift_hbar(-4).unwrap();
        assert_eq!(v.exact_from(), -6);
        let back = v.shift_hbar(4).unwrap();
        assert_eq!(back.exact_from(), -2);
        assert!(back.coeff(0, -3).unwrap().is_zero());
    }

    #[test]
    fn differences_are_located() {
        let a = sample(2);
        let mut b = a.clone();
        b.add_scaled_at(1, -2, &TPoly::var(2, 3, 0), &int(5)).unwrap();
        let d = a.first_difference(&b, (-6, 4), 3).unwrap();
        assert_eq!((d.k, d.j, d.monomial.clone()), (1, -2, vec![1, 0]));
        assert_eq!(d.right, int(5));
        assert!(a.first_difference(&b, (-1, 4), 3).is_none());
    }
}

//! Coordinate changes: substitution into truncated series and formal
//! inversion of maps with invertible linear part.

use std::collections::HashMap;

use num_traits::Zero;
use rayon::prelude::*;

use super::monomial::Monomial;
use super::rational::Rational;
use super::tpoly::TPoly;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// A substitution `x_v ↦ images[v]`, with the images of every monomial up
/// to the truncation degree cached.
#[derive(Clone, Debug)]
pub struct Substitution {
    images: Vec<TPoly>,
    max_degree: u32,
    cache: HashMap<Monomial, TPoly>,
}

impl Substitution {
    /// All images must share metadata and have zero constant term, so the
    /// image of a degree-`e` monomial starts in degree `e`.
    pub fn new(images: Vec<TPoly>) -> Result<Self> {
        let first = images.first().expect("at least one variable");
        let (target, max_degree) = (first.nvars(), first.max_degree());
        for img in &images {
            img.compatible(first)?;
            if !img.constant_term().is_zero() {
                return Err(Error::NonZeroConstant);
            }
        }
        let source = images.len();
        let mut cache = HashMap::new();
        let one = TPoly::one(target, max_degree);
        cache.insert(Monomial::ONE, one);
        let mut layer: Vec<Monomial> = vec![Monomial::ONE];
        for _deg in 1..=max_degree {
            // Each monomial of the new degree is (its lowest variable) times
            // a cached monomial of the previous degree.
            let mut next: Vec<(Monomial, Monomial, usize)> = Vec::new();
            for &m in &layer {
                let lowest = (0..source).find(|&v| m.exponent(v) > 0).unwrap_or(source);
                for v in 0..source.min(lowest + 1) {
                    next.push((m.mul(Monomial::var(v)), m, v));
                }
            }
            let computed: Vec<(Monomial, TPoly)> = next
                .par_iter()
                .map(|(m, base, v)| (*m, cache[base].mul_up_to(&images[*v], max_degree)))
                .collect();
            layer = computed.iter().map(|(m, _)| *m).collect();
            for (m, p) in computed {
                cache.insert(m, p);
            }
        }
        Ok(Substitution {
            images,
            max_degree,
            cache,
        })
    }

    pub fn source_nvars(&self) -> usize {
        self.images.len()
    }

    pub fn target_nvars(&self) -> usize {
        self.images[0].nvars()
    }

    pub fn images(&self) -> &[TPoly] {
        &self.images
    }

    /// `p(images)`, truncated at the images' degree.
    pub fn apply(&self, p: &TPoly) -> Result<TPoly> {
        if p.nvars() != self.source_nvars() {
            return Err(Error::MismatchedTruncation(format!(
                "substituting {} images into a series in {} variables",
                self.source_nvars(),
                p.nvars()
            )));
        }
        let mut out = TPoly::zero(self.target_nvars(), self.max_degree);
        for (m, c) in p.terms() {
            if m.degree() > self.max_degree {
                break;
            }
            out.add_scaled(&self.cache[&m], c);
        }
        Ok(out)
    }
}

/// A polynomial coordinate map `x ↦ (images[0](x), …, images[N-1](x))`
/// fixing the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordMap {
    images: Vec<TPoly>,
}

impl CoordMap {
    pub fn new(images: Vec<TPoly>) -> Result<Self> {
        let first = images.first().ok_or_else(|| Error::Config("empty coordinate map".into()))?;
        if first.nvars() != images.len() {
            return Err(Error::MismatchedTruncation(format!(
                "{} components in {} variables",
                images.len(),
                first.nvars()
            )));
        }
        for img in &images {
            img.compatible(first)?;
            if !img.constant_term().is_zero() {
                return Err(Error::NonZeroConstant);
            }
        }
        Ok(CoordMap { images })
    }

    pub fn identity(nvars: usize, max_degree: u32) -> Self {
        CoordMap {
            images: (0..nvars).map(|v| TPoly::var(nvars, max_degree, v)).collect(),
        }
    }

    pub fn images(&self) -> &[TPoly] {
        &self.images
    }

    pub fn component(&self, k: usize) -> &TPoly {
        &self.images[k]
    }

    pub fn nvars(&self) -> usize {
        self.images.len()
    }

    pub fn max_degree(&self) -> u32 {
        self.images[0].max_degree()
    }

    /// `L[k][v]` = coefficient of `x_v` in component `k`.
    pub fn linear_part(&self) -> Matrix {
        let n = self.nvars();
        self.images
            .iter()
            .map(|img| (0..n).map(|v| img.coeff(Monomial::var(v)).cloned().unwrap_or_else(Rational::zero)).collect())
            .collect()
    }

    pub fn substitution(&self) -> Result<Substitution> {
        Substitution::new(self.images.clone())
    }

    /// `self ∘ inner`: substitutes `inner` into every component of `self`.
    pub fn compose(&self, inner: &CoordMap) -> Result<CoordMap> {
        let sub = inner.substitution()?;
        let images = self.images.iter().map(|p| sub.apply(p)).collect::<Result<_>>()?;
        Ok(CoordMap { images })
    }
}

/// The inverse map, exact up to the truncation degree.
///
/// Writing `y = L t + N(t)` with `N` of order two, iterates
/// `t ← L⁻¹ (y − N(t))`; each pass fixes one more degree.
pub fn invert_coord_map(map: &CoordMap) -> Result<CoordMap> {
    let n = map.nvars();
    let d = map.max_degree();
    let lin_inv = linalg::inverse(&map.linear_part()).ok_or(Error::SingularLinearPart)?;
    let nonlinear: Vec<TPoly> = map
        .images
        .iter()
        .map(|img| {
            let mut p = img.clone();
            for v in 0..n {
                if let Some(c) = img.coeff(Monomial::var(v)) {
                    p.add_term(Monomial::var(v), -c.clone());
                }
            }
            p
        })
        .collect();
    let apply_inverse = |rhs: &[TPoly]| -> Vec<TPoly> {
        (0..n)
            .map(|v| {
                let mut acc = TPoly::zero(n, d);
                for (k, r) in rhs.iter().enumerate() {
                    acc.add_scaled(r, &lin_inv[v][k]);
                }
                acc
            })
            .collect()
    };
    let ys: Vec<TPoly> = (0..n).map(|k| TPoly::var(n, d, k)).collect();
    let mut t = apply_inverse(&ys);
    for _ in 1..d {
        let sub = Substitution::new(t.clone())?;
        let rhs: Vec<TPoly> = ys
            .iter()
            .zip(&nonlinear)
            .map(|(y, nl)| sub.apply(nl).map(|v| y - &v))
            .collect::<Result<_>>()?;
        t = apply_inverse(&rhs);
    }
    Ok(CoordMap { images: t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rational::int;

    #[test]
    fn identity_inverts_to_identity() {
        let id = CoordMap::identity(3, 5);
        assert_eq!(invert_coord_map(&id).unwrap(), id);
    }

    #[test]
    fn linear_scaling() {
        let y = CoordMap::new(vec![TPoly::var(2, 3, 0), TPoly::var(2, 3, 1).scale(&int(2))]).unwrap();
        let t = invert_coord_map(&y).unwrap();
        assert_eq!(t.component(1), &TPoly::var(2, 3, 1).scale(&crate::series::rational::rat(1, 2)));
    }

    #[test]
    fn catalan_reversion() {
        // y = t + t^2; the oracle iterates t <- y - t^2 four times.
        let t1 = TPoly::var(1, 4, 0);
        let y = CoordMap::new(vec![&t1 + &(&t1 * &t1)]).unwrap();
        let inv = invert_coord_map(&y).unwrap();
        let mut oracle = TPoly::zero(1, 4);
        for _ in 0..4 {
            oracle = &t1 - &(&oracle * &oracle);
        }
        assert_eq!(inv.component(0), &oracle);
        let expected = TPoly::from_terms(
            1,
            4,
            [(vec![1], int(1)), (vec![2], int(-1)), (vec![3], int(2)), (vec![4], int(-5))],
        );
        assert_eq!(inv.component(0), &expected);
    }

    #[test]
    fn singular_linear_part_is_rejected() {
        let y = CoordMap::new(vec![TPoly::var(2, 3, 0), TPoly::var(2, 3, 0)]).unwrap();
        assert!(matches!(invert_coord_map(&y), Err(Error::SingularLinearPart)));
    }

    #[test]
    fn substitution_matches_naive_powers() {
        let x = TPoly::var(2, 4, 0);
        let y = TPoly::var(2, 4, 1);
        let sub = Substitution::new(vec![&x + &y, &x - &(&y * &y)]).unwrap();
        let p = TPoly::from_terms(2, 4, [(vec![2, 1], int(3)), (vec![0, 1], int(1))]);
        let a = &x + &y;
        let b = &x - &(&y * &y);
        let naive = &(&(&a * &a) * &b).scale(&int(3)) + &b;
        assert_eq!(sub.apply(&p).unwrap(), naive);
    }
}

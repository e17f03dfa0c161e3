use num_traits::Zero;

use super::{monomial_label, ConnectionData};
use crate::check::CheckOutcome;
use crate::error::Result;
use crate::periods::hbar_derivative;
use crate::series::{HVec, Monomial, Rational, TPoly};

/// An affine vector field `Σ_k (w_k y^k + c_k) ∂_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerField {
    pub weights: Vec<Rational>,
    pub constants: Vec<Rational>,
}

impl EulerField {
    /// `Σ (k−1) y^k ∂_k − (n+1) ∂_1`, the field generating the ℏ-dependence
    /// of Ψ.
    pub fn standard(n: usize) -> Self {
        let weights = (0..=n).map(|k| Rational::from_integer((k as i64 - 1).into())).collect();
        let mut constants = vec![Rational::zero(); n + 1];
        constants[1] = Rational::from_integer((-(n as i64 + 1)).into());
        EulerField { weights, constants }
    }

    pub fn negated(&self) -> Self {
        EulerField {
            weights: self.weights.iter().map(|w| -w.clone()).collect(),
            constants: self.constants.iter().map(|c| -c.clone()).collect(),
        }
    }

    /// The component `E^k(y)` as a series.
    pub fn component(&self, k: usize, nvars: usize, max_degree: u32) -> TPoly {
        let mut p = TPoly::var(nvars, max_degree, k).scale(&self.weights[k]);
        p.add_term(Monomial::ONE, self.constants[k].clone());
        p
    }

    /// `E(p)`, the derivative of `p` along the field.
    pub fn apply(&self, p: &TPoly) -> TPoly {
        let mut out = TPoly::zero(p.nvars(), p.max_degree());
        for (m, c) in p.terms() {
            let mut weight = Rational::zero();
            for (k, w) in self.weights.iter().enumerate() {
                weight += w * Rational::from_integer(m.exponent(k).into());
            }
            out.add_term(m, c * weight);
        }
        for (k, c) in self.constants.iter().enumerate() {
            if !c.is_zero() {
                out.add_scaled(&p.partial(k), c);
            }
        }
        out
    }
}

/// The ℏ-derivative identity `D_ℏ Ψ = ℏ^{-1} Σ_a E^a ∂_a Ψ` and the
/// conformality constraints on `A` and `g`.
///
/// The constraints use the opposite field `E' = −E`, under which
/// `E'(A^c_{ab}) = (a + b − c) A^c_{ab}` and `g_{ab}` has weight
/// `(1−a) + (1−b) = 2 − n`.
pub fn euler_checks(psi_y: &HVec, cd: &ConnectionData) -> Result<Vec<CheckOutcome>> {
    let n = psi_y.n();
    let m = n + 1;
    let d = psi_y.max_degree();
    let e = &cd.euler;

    let lhs = hbar_derivative(psi_y);
    let mut sum = HVec::zero(n, m, d, psi_y.window());
    for a in 0..m {
        let comp = e.component(a, m, d);
        if comp.is_zero() {
            continue;
        }
        sum = sum.add(&psi_y.partial(a).scale_up_to(&comp, d)?)?;
    }
    sum.set_exact_from(psi_y.exact_from());
    let rhs = sum.shift_hbar(-1)?;
    let from = lhs.exact_from().max(rhs.exact_from());
    let op = CheckOutcome::from_witness(
        "euler-operator",
        lhs.first_difference(&rhs, (from, psi_y.window().j_max), d.saturating_sub(1)),
    );

    let conf = e.negated();
    let valid = cd.valid_degree.saturating_sub(1);
    let mut a_witness = None;
    'outer: for a in 0..m {
        for b in a..m {
            for c in 0..m {
                let p = cd.a(a, b, c);
                let lhs = conf.apply(p);
                let rhs = p.scale(&Rational::from_integer((a as i64 + b as i64 - c as i64).into()));
                if let Some((mono, l, r)) = lhs.first_difference(&rhs, valid) {
                    a_witness = Some(format!(
                        "E(A^{c}_{a}{b}) vs ({a}+{b}−{c})A at {}: {l} vs {r}",
                        monomial_label(mono, m)
                    ));
                    break 'outer;
                }
            }
        }
    }
    let grading = CheckOutcome::from_witness("euler-grading-a", a_witness);

    let mut g_witness = None;
    for a in 0..m {
        for b in 0..m {
            let g = &cd.g[a][b];
            let lhs = (conf.weights[a].clone() + &conf.weights[b]) * g;
            let rhs = g * Rational::from_integer((2 - n as i64).into());
            if lhs != rhs {
                g_witness.get_or_insert(format!("g_{a}{b}: weight {lhs} vs (2−n)g = {rhs}"));
            }
        }
    }
    let metric = CheckOutcome::from_witness("euler-grading-g", g_witness);
    Ok(vec![op, grading, metric])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rational::int;

    #[test]
    fn standard_field_constant_part() {
        let e = EulerField::standard(2);
        let origin = (0..3)
            .map(|k| e.component(k, 3, 2).constant_term())
            .collect::<Vec<_>>();
        assert_eq!(origin, vec![int(0), int(-3), int(0)]);
    }

    #[test]
    fn field_acts_as_derivation() {
        let e = EulerField::standard(2).negated();
        // E'(y2) = −y2, E'(e^{y1}) = 3 e^{y1}
        let y2 = TPoly::var(3, 4, 2);
        assert_eq!(e.apply(&y2), y2.scale(&int(-1)));
        let q = TPoly::var(3, 4, 1).exp().unwrap();
        assert!(e.apply(&q).agrees_up_to(&q.scale(&int(3)), 3));
    }
}

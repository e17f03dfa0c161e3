//! The Frobenius structure carried by the normalized period: connection
//! matrices, metric, Euler and identity fields, and the potential.

mod euler;
mod potential;

pub use euler::{euler_checks, EulerField};
pub use crate::pipeline::frame_invariance_test;
pub use potential::{
    classical_cubic, lower_index, potential_from_tensor, sigma_extract, wdvv_check, Potential, SigmaReport, SigmaTable,
    Tensor3,
};

use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::check::CheckOutcome;
use crate::error::Result;
use crate::linalg::Matrix;
use crate::normalization::{Part, S0Grading};
use crate::series::{HVec, Monomial, Rational, TPoly};

/// Structure constants `A^c_{ab}(y)`, metric and Euler field.
#[derive(Clone, Debug)]
pub struct ConnectionData {
    pub n: usize,
    /// `A^c_{ab}` at index `(a·(n+1) + b)·(n+1) + c`.
    a: Vec<TPoly>,
    pub g: Matrix,
    pub euler: EulerField,
    pub e_index: usize,
    /// A-coefficients are valid through this t-degree.
    pub valid_degree: u32,
    pub residuals: Vec<CheckOutcome>,
}

impl ConnectionData {
    pub fn from_matrices(n: usize, a: Vec<TPoly>, valid_degree: u32) -> Self {
        assert_eq!(a.len(), (n + 1).pow(3));
        ConnectionData {
            n,
            a,
            g: flat_metric(n),
            euler: EulerField::standard(n),
            e_index: 0,
            valid_degree,
            residuals: Vec::new(),
        }
    }

    #[inline]
    fn idx(&self, a: usize, b: usize, c: usize) -> usize {
        (a * (self.n + 1) + b) * (self.n + 1) + c
    }

    /// `A^c_{ab}`.
    pub fn a(&self, a: usize, b: usize, c: usize) -> &TPoly {
        &self.a[self.idx(a, b, c)]
    }

    pub fn a_mut(&mut self, a: usize, b: usize, c: usize) -> &mut TPoly {
        let i = self.idx(a, b, c);
        &mut self.a[i]
    }

    /// `A(0)` as a table `[a][b][c]` of constants.
    pub fn at_origin(&self) -> Vec<Vec<Vec<Rational>>> {
        let m = self.n + 1;
        (0..m)
            .map(|a| {
                (0..m)
                    .map(|b| (0..m).map(|c| self.a(a, b, c).constant_term()).collect())
                    .collect()
            })
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|r| r.passed)
    }
}

/// `g_{ab} = δ_{a+b,n}`.
pub fn flat_metric(n: usize) -> Matrix {
    (0..=n)
        .map(|a| {
            (0..=n)
                .map(|b| if a + b == n { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect()
}

pub(crate) fn monomial_label(m: Monomial, nvars: usize) -> String {
    format!("{:?}", m.exponents(nvars))
}

/// First coefficient of `p` of degree `<= up_to` that is nonzero.
pub(crate) fn first_nonzero(p: &TPoly, up_to: u32) -> Option<(Monomial, Rational)> {
    p.terms()
        .take_while(|(m, _)| m.degree() <= up_to)
        .next()
        .map(|(m, c)| (m, c.clone()))
}

/// Reads `A^c_{ab}` off the `ℏ^{-1}S₀`-classes of `ℏ ∂_a∂_b Ψ` and checks the
/// full Picard–Fuchs identity `ℏ ∂_a∂_b Ψ = Σ_c A^c_{ab} ∂_c Ψ`.
pub fn connection_from_period(psi_y: &HVec) -> Result<ConnectionData> {
    let n = psi_y.n();
    let m = n + 1;
    let d = psi_y.max_degree();
    let valid = d.saturating_sub(2);
    let grading = S0Grading { n };
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (a..m).map(move |b| (a, b))).collect();
    let first: Vec<Result<(usize, usize, HVec)>> = pairs
        .par_iter()
        .map(|&(a, b)| Ok((a, b, psi_y.partial(a).partial(b).shift_hbar(1)?)))
        .collect();
    let mut v_ab = Vec::new();
    for r in first {
        v_ab.push(r?);
    }
    let top = psi_y.window().j_max;

    let mut t_part_witness = None;
    let mut a_mats = vec![TPoly::zero(m, d); m * m * m];
    for (a, b, v) in &v_ab {
        let from = v.exact_from();
        for (k, j, p) in v.slots() {
            if j < from || grading.part(k, j) != Part::T {
                continue;
            }
            if let Some((mono, c)) = first_nonzero(p, valid) {
                t_part_witness.get_or_insert(format!(
                    "T-slot (k={k}, j={j}) of ℏ∂{a}∂{b}Ψ has {c} at {}",
                    monomial_label(mono, m)
                ));
            }
        }
        for c in 0..m {
            let coeff = v.coeff_or_zero(c, c as i32 - 1).truncated(valid);
            a_mats[(a * m + b) * m + c] = coeff.clone();
            a_mats[(b * m + a) * m + c] = coeff;
        }
    }
    let mut cd = ConnectionData::from_matrices(n, a_mats, valid);
    cd.residuals
        .push(CheckOutcome::from_witness("pf-t-part", t_part_witness));

    let partials: Vec<HVec> = (0..m).map(|c| psi_y.partial(c)).collect();
    let residual_witness = v_ab
        .par_iter()
        .map(|(a, b, v)| -> Result<Option<String>> {
            let mut acc = v.clone();
            for (c, dc) in partials.iter().enumerate() {
                let coeff = cd.a(*a, *b, c);
                if coeff.is_zero() {
                    continue;
                }
                let term = dc.scale_up_to(coeff, valid)?;
                acc.add_scaled(&term, &-Rational::one())?;
            }
            let from = acc.exact_from();
            let zero = HVec::zero(n, m, d, acc.window());
            Ok(acc
                .first_difference(&zero, (from, top), valid)
                .map(|diff| format!("ℏ∂{a}∂{b}Ψ − Σ A ∂Ψ at {diff}")))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .next();
    cd.residuals
        .push(CheckOutcome::from_witness("pf-residual", residual_witness));
    Ok(cd)
}

/// `∂_d A^c_{ab} = ∂_a A^c_{db}` and `Σ_e A^e_{ab} A^c_{ed} = Σ_e A^e_{db} A^c_{ea}`.
pub fn verify_flatness(cd: &ConnectionData) -> Vec<CheckOutcome> {
    let m = cd.n + 1;
    let valid = cd.valid_degree;
    let mut d_witness: Option<String> = None;
    let mut comm_witness: Option<String> = None;
    'outer: for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    if d_witness.is_none() {
                        let lhs = cd.a(a, b, c).partial(d);
                        let rhs = cd.a(d, b, c).partial(a);
                        if let Some((mono, l, r)) = lhs.first_difference(&rhs, valid.saturating_sub(1)) {
                            d_witness = Some(format!(
                                "∂{d} A^{c}_{a}{b} vs ∂{a} A^{c}_{d}{b} at {}: {l} vs {r}",
                                monomial_label(mono, m)
                            ));
                        }
                    }
                    if comm_witness.is_none() {
                        let mut lhs = TPoly::zero(m, cd.a(0, 0, 0).max_degree());
                        let mut rhs = lhs.clone();
                        for e in 0..m {
                            lhs.add_assign_poly(&cd.a(a, b, e).mul_up_to(cd.a(e, d, c), valid));
                            rhs.add_assign_poly(&cd.a(d, b, e).mul_up_to(cd.a(e, a, c), valid));
                        }
                        if let Some((mono, l, r)) = lhs.first_difference(&rhs, valid) {
                            comm_witness = Some(format!(
                                "[A,A] for (a,b,c,d)=({a},{b},{c},{d}) at {}: {l} vs {r}",
                                monomial_label(mono, m)
                            ));
                        }
                    }
                    if d_witness.is_some() && comm_witness.is_some() {
                        break 'outer;
                    }
                }
            }
        }
    }
    vec![
        CheckOutcome::from_witness("flatness-dA", d_witness),
        CheckOutcome::from_witness("flatness-commutator", comm_witness),
    ]
}

/// `ℏ^{-1}Ψ = ∂_0Ψ`, plus its consequence `A^c_{0b} = δ^c_b`.
pub fn identity_check(psi_y: &HVec, cd: Option<&ConnectionData>) -> Result<Vec<CheckOutcome>> {
    let lhs = psi_y.shift_hbar(-1)?;
    let rhs = psi_y.partial(0);
    let from = lhs.exact_from().max(rhs.exact_from());
    let top = psi_y.window().j_max;
    let d = psi_y.max_degree().saturating_sub(1);
    let mut out = vec![CheckOutcome::from_witness(
        "identity-field",
        lhs.first_difference(&rhs, (from, top), d),
    )];
    if let Some(cd) = cd {
        let m = cd.n + 1;
        let mut witness = None;
        for b in 0..m {
            for c in 0..m {
                let expected = if b == c {
                    TPoly::one(m, cd.a(0, b, c).max_degree())
                } else {
                    TPoly::zero(m, cd.a(0, b, c).max_degree())
                };
                if let Some((mono, l, r)) = cd.a(0, b, c).first_difference(&expected, cd.valid_degree) {
                    witness.get_or_insert(format!("A^{c}_0{b} at {}: {l} vs {r}", monomial_label(mono, m)));
                }
            }
        }
        out.push(CheckOutcome::from_witness("identity-structure-constants", witness));
    }
    Ok(out)
}

/// `A^c_{ab}(0) = δ_{(a+b−c) mod (n+1), 0}`.
pub fn origin_structure_check(cd: &ConnectionData) -> CheckOutcome {
    let m = cd.n + 1;
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                let expected = if (a + b + m - c).is_multiple_of(m) {
                    Rational::one()
                } else {
                    Rational::zero()
                };
                let got = cd.a(a, b, c).constant_term();
                if got != expected {
                    return CheckOutcome::fail("a-at-origin", format!("A^{c}_{a}{b}(0) = {got}, expected {expected}"));
                }
            }
        }
    }
    CheckOutcome::pass("a-at-origin")
}

/// Along the line `y = (0, y¹, 0, …)`, `p∘…∘p` (n+1 factors, `p = ∂_1`)
/// equals `e^{y¹}` times the identity, through `(y¹)^through`.
pub fn small_quantum_check(cd: &ConnectionData, through: u32) -> CheckOutcome {
    let name = "small-quantum-cohomology";
    let m = cd.n + 1;
    let nvars = m;
    let d = cd.a(0, 0, 0).max_degree();
    if through > cd.valid_degree {
        return CheckOutcome::fail(name, format!("A is only valid through degree {}", cd.valid_degree));
    }
    let line = |p: &TPoly| p.restrict_to(&[1]).truncated(through);
    // Start from p itself, i.e. the vector ∂_1, and multiply by p n times.
    let mut vec: Vec<TPoly> = (0..m)
        .map(|c| if c == 1 { TPoly::one(nvars, d) } else { TPoly::zero(nvars, d) })
        .collect();
    for _ in 0..cd.n {
        let mut next = vec![TPoly::zero(nvars, d); m];
        for (c, coeff) in vec.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            for (e, slot) in next.iter_mut().enumerate() {
                let a = line(cd.a(c, 1, e));
                slot.add_assign_poly(&coeff.mul_up_to(&a, through));
            }
        }
        vec = next;
    }
    let exp = TPoly::var(nvars, d, 1).exp().expect("no constant term").truncated(through);
    for (e, coeff) in vec.iter().enumerate() {
        let expected = if e == 0 { exp.clone() } else { TPoly::zero(nvars, d) };
        if let Some((mono, l, r)) = coeff.first_difference(&expected, through) {
            return CheckOutcome::fail(
                name,
                format!("component ∂{e} at {}: {l} vs {r}", monomial_label(mono, nvars)),
            );
        }
    }
    CheckOutcome::pass(name)
}

impl fmt::Display for ConnectionData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.n + 1;
        for a in 0..m {
            for b in a..m {
                for c in 0..m {
                    let p = self.a(a, b, c);
                    if !p.is_zero() {
                        writeln!(f, "A^{c}_{a}{b} = {}", p.display_with("y"))?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rational::int;

    /// Structure constants of `Q[p]/(p^{n+1} − q)` with `q = e^{y1}` and no
    /// dependence on the other coordinates: a flat, commutative model.
    fn small_model(n: usize, d: u32) -> ConnectionData {
        let m = n + 1;
        let q = TPoly::var(m, d, 1).exp().unwrap();
        let mut a = vec![TPoly::zero(m, d); m * m * m];
        for x in 0..m {
            for y in 0..m {
                let s = x + y;
                let (c, coeff) = if s < m { (s, TPoly::one(m, d)) } else { (s - m, q.clone()) };
                a[(x * m + y) * m + c] = coeff;
            }
        }
        ConnectionData::from_matrices(n, a, d)
    }

    #[test]
    fn cyclic_model_at_origin() {
        for n in 1..=3 {
            assert!(origin_structure_check(&small_model(n, 3)).passed);
        }
    }

    #[test]
    fn commutator_vanishes_at_origin() {
        let cd = small_model(2, 0);
        let checks = verify_flatness(&cd);
        assert!(checks[1].passed, "{:?}", checks[1]);
    }

    #[test]
    fn small_quantum_on_model() {
        let cd = small_model(2, 6);
        assert!(small_quantum_check(&cd, 5).passed);
    }

    #[test]
    fn perturbed_connection_fails_flatness() {
        let mut cd = small_model(2, 0);
        let bump = TPoly::one(3, 0).scale(&int(1));
        cd.a_mut(1, 2, 0).add_assign_poly(&bump);
        cd.a_mut(2, 1, 0).add_assign_poly(&bump);
        assert!(!verify_flatness(&cd)[1].passed);
        assert!(!origin_structure_check(&cd).passed);
    }
}

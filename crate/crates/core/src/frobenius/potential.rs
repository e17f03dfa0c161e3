use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{monomial_label, ConnectionData};
use crate::check::CheckOutcome;
use crate::error::{Error, Result};
use crate::series::rational::factorial;
use crate::series::{Monomial, Rational, TPoly};

/// A 3-tensor of series `T_{abc}(y)`, valid through `valid_degree`.
#[derive(Clone, Debug)]
pub struct Tensor3 {
    pub n: usize,
    pub valid_degree: u32,
    entries: Vec<TPoly>,
}

impl Tensor3 {
    pub fn new(n: usize, valid_degree: u32, entries: Vec<TPoly>) -> Self {
        assert_eq!(entries.len(), (n + 1).pow(3));
        Tensor3 {
            n,
            valid_degree,
            entries,
        }
    }

    /// The tensor `δ_{a+b+c,n}`.
    pub fn classical(n: usize, max_degree: u32) -> Self {
        let m = n + 1;
        let mut entries = vec![TPoly::zero(m, max_degree); m * m * m];
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    if a + b + c == n {
                        entries[(a * m + b) * m + c] = TPoly::one(m, max_degree);
                    }
                }
            }
        }
        Tensor3::new(n, max_degree, entries)
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> &TPoly {
        let m = self.n + 1;
        &self.entries[(a * m + b) * m + c]
    }

    /// First index triple and monomial where the tensor is not totally
    /// symmetric.
    pub fn asymmetry(&self) -> Option<String> {
        let m = self.n + 1;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let base = self.get(a, b, c);
                    for (x, y, z) in [(b, a, c), (a, c, b), (c, b, a)] {
                        if let Some((mono, l, r)) = base.first_difference(self.get(x, y, z), self.valid_degree) {
                            return Some(format!(
                                "T_{a}{b}{c} vs T_{x}{y}{z} at {}: {l} vs {r}",
                                monomial_label(mono, m)
                            ));
                        }
                    }
                }
            }
        }
        None
    }
}

/// `A_{abc} = A^{n−c}_{ab}` (lowering with `g_{ab} = δ_{a+b,n}`), and the
/// check that it is totally symmetric.
pub fn lower_index(cd: &ConnectionData) -> (Tensor3, CheckOutcome) {
    let n = cd.n;
    let m = n + 1;
    let mut entries = Vec::with_capacity(m * m * m);
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                entries.push(cd.a(a, b, n - c).clone());
            }
        }
    }
    let t = Tensor3::new(n, cd.valid_degree, entries);
    let check = CheckOutcome::from_witness("a-total-symmetry", t.asymmetry());
    (t, check)
}

/// A potential `Φ(y)` without terms of degree `<= 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    pub n: usize,
    pub phi: TPoly,
}

impl Potential {
    pub fn max_degree(&self) -> u32 {
        self.phi.max_degree()
    }

    /// `∂_a∂_b∂_c Φ`.
    pub fn third_derivative(&self, a: usize, b: usize, c: usize) -> TPoly {
        self.phi.partial(a).partial(b).partial(c)
    }

    /// Coefficients as `(exponents, value)` in graded order.
    pub fn coefficients(&self) -> Vec<(Vec<u32>, Rational)> {
        self.phi
            .terms()
            .map(|(m, c)| (m.exponents(self.n + 1), c.clone()))
            .collect()
    }
}

/// `(1/6) Σ_{i+j+k=n} y^i y^j y^k`.
pub fn classical_cubic(n: usize, max_degree: u32) -> TPoly {
    let m = n + 1;
    let mut p = TPoly::zero(m, max_degree);
    let sixth = Rational::new(BigInt::one(), BigInt::from(6));
    for i in 0..m {
        for j in 0..m {
            if i + j <= n {
                let k = n - i - j;
                let mono = Monomial::var(i).mul(Monomial::var(j)).mul(Monomial::var(k));
                p.add_term(mono, sixth.clone());
            }
        }
    }
    p
}

/// Integrates a symmetric, integrable tensor to a potential truncated at
/// `max_degree` (which may exceed `T`'s own degree by up to three).
pub fn potential_from_tensor(t: &Tensor3, max_degree: u32) -> Result<Potential> {
    let n = t.n;
    let m = n + 1;
    if let Some(w) = t.asymmetry() {
        return Err(Error::Integrability(format!("not symmetric: {w}")));
    }
    let check_to = t.valid_degree.saturating_sub(1);
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    let lhs = t.get(a, b, c).partial(d);
                    let rhs = t.get(d, b, c).partial(a);
                    if let Some((mono, l, r)) = lhs.first_difference(&rhs, check_to) {
                        return Err(Error::Integrability(format!(
                            "∂{d} T_{a}{b}{c} vs ∂{a} T_{d}{b}{c} at {}: {l} vs {r}",
                            monomial_label(mono, m)
                        )));
                    }
                }
            }
        }
    }
    let top = max_degree.min(t.valid_degree + 3);
    let mut phi = TPoly::zero(m, max_degree);
    for big_n in 3..=top {
        let denom = Rational::from_integer(BigInt::from(big_n * (big_n - 1) * (big_n - 2)));
        let inv = denom.recip();
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let part = t.get(a, b, c).homogeneous_part(big_n - 3);
                    if part.is_zero() {
                        continue;
                    }
                    let cube = Monomial::var(a).mul(Monomial::var(b)).mul(Monomial::var(c));
                    for (mono, coeff) in part.terms() {
                        phi.add_term(mono.mul(cube), coeff * &inv);
                    }
                }
            }
        }
    }
    Ok(Potential { n, phi })
}

/// All WDVV equations `Σ_e Φ_{abe} Φ_{(n−e)cd} = Σ_e Φ_{ade} Φ_{(n−e)bc}`
/// through degree `deg Φ − 3`.
pub fn wdvv_check(phi: &Potential) -> CheckOutcome {
    let n = phi.n;
    let m = n + 1;
    let valid = phi.max_degree().saturating_sub(3);
    let mut third: BTreeMap<(usize, usize, usize), TPoly> = BTreeMap::new();
    let key = |a: usize, b: usize, c: usize| {
        let mut v = [a, b, c];
        v.sort_unstable();
        (v[0], v[1], v[2])
    };
    for a in 0..m {
        for b in a..m {
            for c in b..m {
                third.insert((a, b, c), phi.third_derivative(a, b, c).truncated(valid));
            }
        }
    }
    let f = |a, b, c| &third[&key(a, b, c)];
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    let mut lhs = TPoly::zero(m, phi.max_degree());
                    let mut rhs = lhs.clone();
                    for e in 0..m {
                        lhs.add_assign_poly(&f(a, b, e).mul_up_to(f(n - e, c, d), valid));
                        rhs.add_assign_poly(&f(a, d, e).mul_up_to(f(n - e, b, c), valid));
                    }
                    if let Some((mono, l, r)) = lhs.first_difference(&rhs, valid) {
                        return CheckOutcome::fail(
                            "wdvv",
                            format!("(a,b,c,d)=({a},{b},{c},{d}) at {}: {l} vs {r}", monomial_label(mono, m)),
                        );
                    }
                }
            }
        }
    }
    CheckOutcome::pass("wdvv")
}

/// `σ(m_1, …, m_n)`: coefficient of `Π (y^k)^{m_k}` in Φ times `Π m_k!`.
pub type SigmaTable = BTreeMap<Vec<u32>, Rational>;

#[derive(Clone, Debug)]
pub struct SigmaReport {
    pub table: SigmaTable,
    pub checks: Vec<CheckOutcome>,
    /// `(d, (m_2, …, m_n)) → N`.
    pub gw: BTreeMap<(u32, Vec<u32>), Rational>,
}

fn for_each_exponent(nvars: usize, max_total: u32, f: &mut dyn FnMut(&[u32])) {
    fn rec(cur: &mut Vec<u32>, nvars: usize, budget: u32, f: &mut dyn FnMut(&[u32])) {
        if cur.len() == nvars {
            f(cur);
            return;
        }
        for e in 0..=budget {
            cur.push(e);
            rec(cur, nvars, budget - e, f);
            cur.pop();
        }
    }
    rec(&mut Vec::new(), nvars, max_total, f);
}

/// Weighted degree `3 − n + Σ_{k≥2} (k−1) m_k` of a y⁰-free exponent
/// `(m_1, …, m_n)`; the instanton degree is this divided by `n + 1`.
fn weight(n: usize, m: &[u32]) -> i64 {
    3 - n as i64
        + m.iter()
            .enumerate()
            .skip(1)
            .map(|(idx, &e)| idx as i64 * e as i64)
            .sum::<i64>()
}

/// Reads the σ table off Φ, checks the divisor recursion, the vanishing
/// rule and the classical y⁰-part, and converts to invariants `N(d; m)`.
pub fn sigma_extract(phi: &Potential) -> SigmaReport {
    let n = phi.n;
    let m = n + 1;
    let d_top = phi.max_degree();
    let sigma_of = |exps: &[u32]| -> Rational {
        let mut full = vec![0u32];
        full.extend_from_slice(exps);
        let c = phi.phi.coeff_of(&full);
        let fac: BigInt = exps.iter().map(|&e| factorial(e)).product();
        c * Rational::from_integer(fac)
    };
    let mut table = SigmaTable::new();
    for_each_exponent(n, d_top, &mut |e| {
        let s = sigma_of(e);
        if !s.is_zero() {
            table.insert(e.to_vec(), s);
        }
    });
    let np1 = n as i64 + 1;

    let mut rec_witness = None;
    let mut van_witness = None;
    for_each_exponent(n, d_top, &mut |e| {
        let total: u32 = e.iter().sum();
        if total < 3 {
            return;
        }
        let w = weight(n, e);
        let s = sigma_of(e);
        if w.rem_euclid(np1) != 0 && !s.is_zero() && van_witness.is_none() {
            van_witness = Some(format!("σ{e:?} = {s} but its degree {w}/{np1} is not integral"));
        }
        if total < d_top && rec_witness.is_none() {
            let mut up = e.to_vec();
            up[0] += 1;
            let lhs = sigma_of(&up) * Rational::from_integer(np1.into());
            let rhs = s * Rational::from_integer(w.into());
            if lhs != rhs {
                rec_witness = Some(format!("(n+1)σ{up:?} = {lhs} but {w}·σ{e:?} = {rhs}"));
            }
        }
    });

    let classical = classical_cubic(n, d_top);
    let mut classical_witness = None;
    let keys: std::collections::BTreeSet<Monomial> = phi
        .phi
        .terms()
        .chain(classical.terms())
        .map(|(k, _)| k)
        .filter(|k| k.exponent(0) > 0)
        .collect();
    for k in keys {
        let a = phi.phi.coeff(k).cloned().unwrap_or_else(Rational::zero);
        let b = classical.coeff(k).cloned().unwrap_or_else(Rational::zero);
        if a != b {
            classical_witness = Some(format!("y⁰-term {}: {a} vs classical {b}", monomial_label(k, m)));
            break;
        }
    }

    let mut gw = BTreeMap::new();
    for_each_exponent(n - 1, d_top, &mut |rest| {
        let mut e = vec![0u32];
        e.extend_from_slice(rest);
        let w = weight(n, &e);
        if w <= 0 || w % np1 != 0 {
            return;
        }
        let d = (w / np1) as u32;
        let size: u32 = rest.iter().sum();
        let m1 = 3u32.saturating_sub(size);
        if size + m1 > d_top {
            return;
        }
        e[0] = m1;
        let value = sigma_of(&e) / Rational::from_integer(BigInt::from(d).pow(m1));
        gw.insert((d, rest.to_vec()), value);
    });

    SigmaReport {
        table,
        checks: vec![
            CheckOutcome::from_witness("sigma-recursion", rec_witness),
            CheckOutcome::from_witness("sigma-vanishing", van_witness),
            CheckOutcome::from_witness("sigma-classical-part", classical_witness),
        ],
        gw,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rational::{int, rat};

    #[test]
    fn classical_tensor_integrates_to_classical_cubic() {
        for n in 1..=3 {
            let t = Tensor3::classical(n, 4);
            let phi = potential_from_tensor(&t, 6).unwrap();
            assert_eq!(phi.phi, classical_cubic(n, 6));
        }
        let c = classical_cubic(1, 3);
        assert_eq!(c.coeff_of(&[2, 1]), rat(1, 2));
        assert_eq!(c.len(), 1);
        let c2 = classical_cubic(2, 3);
        assert_eq!(c2.coeff_of(&[1, 2, 0]), rat(1, 2));
        assert_eq!(c2.coeff_of(&[2, 0, 1]), rat(1, 2));
    }

    #[test]
    fn zero_tensor_gives_zero_potential() {
        let t = Tensor3::new(2, 4, vec![TPoly::zero(3, 4); 27]);
        assert!(potential_from_tensor(&t, 6).unwrap().phi.is_zero());
    }

    #[test]
    fn asymmetric_tensor_is_rejected() {
        let mut entries = vec![TPoly::zero(2, 3); 8];
        entries[1] = TPoly::one(2, 3);
        let t = Tensor3::new(1, 3, entries);
        assert!(matches!(potential_from_tensor(&t, 4), Err(Error::Integrability(_))));
    }

    #[test]
    fn classical_potential_satisfies_wdvv() {
        for n in 1..=3 {
            let phi = Potential {
                n,
                phi: classical_cubic(n, 6),
            };
            assert!(wdvv_check(&phi).passed);
        }
    }

    #[test]
    fn perturbed_potential_fails_wdvv() {
        let mut p = classical_cubic(2, 6);
        p.add_term(Monomial::from_exponents(&[0, 0, 4]).unwrap(), int(1));
        let out = wdvv_check(&Potential { n: 2, phi: p });
        assert!(!out.passed);
    }

    #[test]
    fn sigma_reads_lines_through_two_points() {
        // Φ for CP² through the d=1 term: classical + y1 (y2)^2/2 + (y1)^2 (y2)^2/4 + ...
        let n = 2;
        let d = 5;
        let q = TPoly::var(3, d, 1).exp().unwrap();
        let y2sq = TPoly::from_terms(3, d, [(vec![0, 0, 2], rat(1, 2))]);
        let mut inst = q.mul_up_to(&y2sq, d);
        inst.add_term(Monomial::from_exponents(&[0, 0, 2]).unwrap(), rat(-1, 2));
        // N(2) (y2)^5/5! e^{2 y1}
        let q2 = TPoly::var(3, d, 1).scale(&int(2)).exp().unwrap();
        let y25 = TPoly::from_terms(3, d, [(vec![0, 0, 5], rat(1, 120))]);
        inst.add_assign_poly(&q2.mul_up_to(&y25, d));
        let phi = Potential {
            n,
            phi: &classical_cubic(n, d) + &inst,
        };
        let rep = sigma_extract(&phi);
        assert!(rep.checks.iter().all(|c| c.passed), "{:?}", rep.checks);
        assert_eq!(rep.gw[&(1, vec![2])], int(1));
        assert_eq!(rep.gw[&(2, vec![5])], int(1));
        // σ(1, 2) / σ(0, 2)-type ratio is the degree.
        assert_eq!(rep.table[&vec![2, 2]].clone() / rep.table[&vec![1, 2]].clone(), int(1));
        // σ(0, m2) vanishes unless m2 ≡ 2 mod 3.
        for e in rep.table.keys() {
            if e[0] == 0 {
                assert_eq!(e[1] % 3, 2);
            }
        }
    }

    #[test]
    fn broken_recursion_is_reported() {
        let n = 2;
        let d = 5;
        let mut p = classical_cubic(n, d);
        p.add_term(Monomial::from_exponents(&[0, 1, 2]).unwrap(), rat(1, 2));
        let rep = sigma_extract(&Potential { n, phi: p });
        assert!(!rep.checks[0].passed);
    }
}

//! Genus-0 Gromov–Witten invariants of CPⁿ by WDVV reconstruction.
//!
//! The potential is written as
//!
//! ```text
//! F = (1/6) Σ_{i+j+k=n} y^i y^j y^k + Σ_{d≥1} Σ_m N(d; m) e^{d y¹} Π_{k≥2} (y^k)^{m_k} / m_k!
//! ```
//!
//! and the associativity equations are solved degree by degree in `d`.
//! Everything here works on this divided-power ansatz directly and shares
//! only arithmetic helpers with the rest of the crate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::check::CheckOutcome;
use crate::error::{Error, Result};
use crate::frobenius::Potential;
use crate::linalg::{solve, Solution};
use crate::series::rational::{binomial, factorial};
use crate::series::{Monomial, Rational, TPoly};

/// `(d, (m_2, …, m_n)) → N(d; m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GWTable {
    pub n: usize,
    pub entries: BTreeMap<(u32, Vec<u32>), Rational>,
}

impl GWTable {
    pub fn get(&self, d: u32, m: &[u32]) -> Option<&Rational> {
        self.entries.get(&(d, m.to_vec()))
    }

    pub fn max_degree(&self) -> u32 {
        self.entries.keys().map(|(d, _)| *d).max().unwrap_or(0)
    }

    /// The keys satisfying `Σ (k−1) m_k = (n+1) d + n − 3`.
    pub fn admissible_keys(n: usize, d: u32) -> Vec<Vec<u32>> {
        let target = (n as i64 + 1) * d as i64 + n as i64 - 3;
        let mut out = Vec::new();
        if target < 0 {
            return out;
        }
        if n == 1 {
            if target == 0 {
                out.push(Vec::new());
            }
            return out;
        }
        fn rec(k: usize, n: usize, left: i64, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if k > n {
                if left == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            let w = k as i64 - 1;
            let mut e = 0;
            while e * w <= left {
                cur.push(e as u32);
                rec(k + 1, n, left - e * w, cur, out);
                cur.pop();
                e += 1;
            }
        }
        rec(2, n, target, &mut Vec::new(), &mut out);
        out
    }

    /// Every key obeys the dimension constraint, and the seed is present.
    pub fn invariants(&self) -> CheckOutcome {
        for (d, m) in self.entries.keys() {
            if !Self::admissible_keys(self.n, *d).contains(m) {
                return CheckOutcome::fail("gw-dimension-constraint", format!("key d={d} m={m:?}"));
            }
        }
        let seed = seed_key(self.n);
        match self.entries.get(&seed) {
            Some(v) if v.is_one() => CheckOutcome::pass("gw-dimension-constraint"),
            other => CheckOutcome::fail("gw-dimension-constraint", format!("seed {seed:?} = {other:?}")),
        }
    }

    /// All values are non-negative integers.
    pub fn integrality(&self) -> CheckOutcome {
        for ((d, m), v) in &self.entries {
            if !v.is_integer() || v.is_negative() {
                return CheckOutcome::fail("gw-nonnegative-integers", format!("N({d}; {m:?}) = {v}"));
            }
        }
        CheckOutcome::pass("gw-nonnegative-integers")
    }
}

fn seed_key(n: usize) -> (u32, Vec<u32>) {
    if n == 1 {
        return (1, Vec::new());
    }
    let mut m = vec![0u32; n - 1];
    m[n - 2] = 2;
    (1, m)
}

/// Third-derivative coefficients `(m, value)` per index triple, for one degree.
type Layer = BTreeMap<[usize; 3], Vec<(Vec<u32>, Rational)>>;

/// A linear form in the unknowns of one degree, plus a constant.
#[derive(Clone, Debug, Default)]
struct Affine {
    constant: Rational,
    coeffs: BTreeMap<usize, Rational>,
}

impl Affine {
    fn add_const(&mut self, c: Rational) {
        self.constant += c;
    }

    fn add_unknown(&mut self, idx: usize, c: Rational) {
        let e = self.coeffs.entry(idx).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&idx);
        }
    }
}

/// The instanton part of `F_{abc}` restricted to one degree `d`:
/// terms `(unknown, m, c)` standing for `c·N_unknown e^{d y¹} y^m / m!`.
fn third_derivative_terms(d: u32, keys: &[Vec<u32>], abc: [usize; 3]) -> Vec<(usize, Vec<u32>, Rational)> {
    let mut out = Vec::new();
    if abc.contains(&0) {
        return out;
    }
    let ones = abc.iter().filter(|&&x| x == 1).count() as u32;
    let factor = Rational::from_integer(BigInt::from(d).pow(ones));
    'keys: for (idx, m) in keys.iter().enumerate() {
        let mut m = m.clone();
        for &x in &abc {
            if x >= 2 {
                let slot = &mut m[x - 2];
                if *slot == 0 {
                    continue 'keys;
                }
                *slot -= 1;
            }
        }
        out.push((idx, m, factor.clone()));
    }
    out
}

fn divided_product(a: &[u32], b: &[u32]) -> (Vec<u32>, Rational) {
    let mut c = Rational::one();
    let sum = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| {
            c *= Rational::from_integer(binomial(x + y, x));
            x + y
        })
        .collect();
    (sum, c)
}

/// Solves WDVV for all invariants of degree `<= d_max`, seeded by
/// `N(1; 0, …, 0, 2) = 1`.
pub fn reconstruct(n: usize, d_max: u32) -> Result<GWTable> {
    if n == 0 || d_max == 0 {
        return Err(Error::Config("reconstruction needs n >= 1 and d_max >= 1".into()));
    }
    let m = n + 1;
    let classical = |a: usize, b: usize, c: usize| a + b + c == n;
    let mut table = GWTable {
        n,
        entries: BTreeMap::new(),
    };
    // Known third derivatives per degree: [abc] → list of (m, value).
    let mut known: Vec<Layer> = vec![Layer::new()];
    let triples: Vec<[usize; 3]> = (1..m)
        .flat_map(|a| (1..m).flat_map(move |b| (1..m).map(move |c| [a, b, c])))
        .collect();

    for d in 1..=d_max {
        let keys = GWTable::admissible_keys(n, d);
        if keys.is_empty() {
            known.push(Layer::new());
            continue;
        }
        let symbolic: BTreeMap<_, _> = triples
            .iter()
            .map(|&t| (t, third_derivative_terms(d, &keys, t)))
            .collect();
        let empty_sym = Vec::new();
        let sym = |t: [usize; 3]| symbolic.get(&t).unwrap_or(&empty_sym);
        let empty_known = Vec::new();

        // Equation index (a,b,c,d') and monomial → affine form.
        let mut equations: BTreeMap<([usize; 4], Vec<u32>), Affine> = BTreeMap::new();
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for dd in 0..m {
                        for e in 0..m {
                            let f = n - e;
                            for (sign, p, q) in [
                                (Rational::one(), [a, b, e], [f, c, dd]),
                                (-Rational::one(), [a, dd, e], [f, b, c]),
                            ] {
                                // classical × degree d
                                if classical(p[0], p[1], p[2]) {
                                    for (idx, mono, coef) in sym(q) {
                                        equations
                                            .entry(([a, b, c, dd], mono.clone()))
                                            .or_default()
                                            .add_unknown(*idx, &sign * coef);
                                    }
                                }
                                if classical(q[0], q[1], q[2]) {
                                    for (idx, mono, coef) in sym(p) {
                                        equations
                                            .entry(([a, b, c, dd], mono.clone()))
                                            .or_default()
                                            .add_unknown(*idx, &sign * coef);
                                    }
                                }
                                // lower × lower
                                for d1 in 1..d {
                                    let d2 = d - d1;
                                    let lp = known[d1 as usize].get(&p).unwrap_or(&empty_known);
                                    let lq = known[d2 as usize].get(&q).unwrap_or(&empty_known);
                                    for (m1, v1) in lp {
                                        for (m2, v2) in lq {
                                            let (mono, binom) = divided_product(m1, m2);
                                            equations
                                                .entry(([a, b, c, dd], mono))
                                                .or_default()
                                                .add_const(&sign * v1 * v2 * binom);
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }

        let mut rows: Vec<Vec<Rational>> = Vec::new();
        let mut rhs: Vec<Rational> = Vec::new();
        let mut labels: Vec<String> = Vec::new();
        let mut seen = BTreeSet::new();
        for ((idx, mono), form) in &equations {
            if form.coeffs.is_empty() {
                if !form.constant.is_zero() {
                    return Err(Error::Oracle {
                        degree: d,
                        detail: format!("WDVV {idx:?} at y^{mono:?} leaves constant {}", form.constant),
                    });
                }
                continue;
            }
            let mut row = vec![Rational::zero(); keys.len()];
            for (i, c) in &form.coeffs {
                row[*i] = c.clone();
            }
            let value = -form.constant.clone();
            let lead = form.coeffs.values().next().cloned().unwrap_or_else(Rational::one);
            let normal: Vec<Rational> = row.iter().chain(std::iter::once(&value)).map(|x| x / &lead).collect();
            if !seen.insert(normal) {
                continue;
            }
            rows.push(row);
            rhs.push(value);
            labels.push(format!("WDVV (a,b,c,d)={idx:?} at y^{mono:?}"));
        }
        if d == 1 {
            let seed = seed_key(n);
            let pos = keys.iter().position(|k| *k == seed.1).expect("seed is admissible");
            let mut row = vec![Rational::zero(); keys.len()];
            row[pos] = Rational::one();
            rows.push(row);
            rhs.push(Rational::one());
            labels.push(format!("seed N(1; {:?}) = 1", seed.1));
        }
        let values = match solve(&rows, &rhs, keys.len()) {
            Solution::Unique(x) => x,
            Solution::Underdetermined { free, .. } => {
                return Err(Error::Oracle {
                    degree: d,
                    detail: format!("undetermined invariants {:?}", free.iter().map(|&i| &keys[i]).collect::<Vec<_>>()),
                })
            }
            Solution::Inconsistent { equation } => {
                return Err(Error::Oracle {
                    degree: d,
                    detail: format!("inconsistent: {}", labels[equation]),
                })
            }
        };
        let mut layer = Layer::new();
        for (t, terms) in &symbolic {
            let list = terms
                .iter()
                .filter(|(idx, _, _)| !values[*idx].is_zero())
                .map(|(idx, mono, coef)| (mono.clone(), coef * &values[*idx]))
                .collect();
            layer.insert(*t, list);
        }
        known.push(layer);
        for (k, v) in keys.into_iter().zip(values) {
            table.entries.insert((d, k), v);
        }
    }
    Ok(table)
}

/// `N_d` for CP² from the single associativity equation
/// `F₂₂₂ = F₁₁₂² − F₁₁₁ F₁₂₂`, which on the ansatz
/// `F = … + Σ N_d e^{d y¹} (y²)^{3d−1}/(3d−1)!` gives
///
/// ```text
/// N_d = Σ_{d₁+d₂=d} N_{d₁} N_{d₂} d₁² d₂ [ d₂ C(3d−4, 3d₁−2) − d₁ C(3d−4, 3d₁−1) ].
/// ```
pub fn kontsevich_cp2(d_max: u32) -> BTreeMap<u32, Rational> {
    let mut nd: BTreeMap<u32, BigInt> = BTreeMap::new();
    if d_max >= 1 {
        nd.insert(1, BigInt::one());
    }
    for d in 2..=d_max {
        let mut s = BigInt::zero();
        for d1 in 1..d {
            let d2 = d - d1;
            let a = BigInt::from(d1);
            let b = BigInt::from(d2);
            let term = &b * binomial(3 * d - 4, 3 * d1 - 2) - &a * binomial(3 * d - 4, 3 * d1 - 1);
            s += &nd[&d1] * &nd[&d2] * &a * &a * &b * term;
        }
        nd.insert(d, s);
    }
    nd.into_iter().map(|(d, v)| (d, Rational::from_integer(v))).collect()
}

/// Expands the ansatz to a power series truncated at total degree
/// `max_degree`, dropping terms of degree `<= 2`.
pub fn oracle_potential(table: &GWTable, max_degree: u32) -> Result<Potential> {
    let n = table.n;
    let nv = n + 1;
    for d in 1.. {
        let keys = GWTable::admissible_keys(n, d);
        let reachable: Vec<&Vec<u32>> = keys.iter().filter(|m| m.iter().sum::<u32>() <= max_degree).collect();
        if reachable.is_empty() {
            // Key sizes grow with d, so no higher degree can contribute.
            if keys.iter().all(|m| m.iter().sum::<u32>() > max_degree) && (n > 1 || d > 1) {
                break;
            }
            continue;
        }
        for m in reachable {
            if table.get(d, m).is_none() {
                return Err(Error::MissingEntry { d, m: m.clone() });
            }
        }
    }
    let mut phi = TPoly::zero(nv, max_degree);
    let sixth = Rational::new(BigInt::one(), BigInt::from(6));
    for i in 0..nv {
        for j in 0..nv {
            for k in 0..nv {
                if i + j + k == n {
                    let mut e = vec![0u32; nv];
                    e[i] += 1;
                    e[j] += 1;
                    e[k] += 1;
                    phi.add_term(Monomial::from_exponents(&e).expect("small exponents"), sixth.clone());
                }
            }
        }
    }
    for ((d, m), value) in &table.entries {
        let size: u32 = m.iter().sum();
        if size > max_degree {
            continue;
        }
        let denom: BigInt = m.iter().map(|&e| factorial(e)).product();
        let base = value / Rational::from_integer(denom);
        for j in 0..=(max_degree - size) {
            if size + j <= 2 {
                continue;
            }
            let mut e = vec![0u32; nv];
            e[1] = j;
            for (idx, &mk) in m.iter().enumerate() {
                e[idx + 2] = mk;
            }
            let c = &base * Rational::new(BigInt::from(*d).pow(j), factorial(j));
            phi.add_term(Monomial::from_exponents(&e).expect("small exponents"), c);
        }
    }
    Ok(Potential { n, phi })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub monomial: Vec<u32>,
    pub mirror: String,
    pub oracle: String,
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^{:?}: mirror {} vs oracle {}", self.monomial, self.mirror, self.oracle)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub compared_through: u32,
    pub discrepancies: Vec<Discrepancy>,
}

impl Comparison {
    pub fn equal(&self) -> bool {
        self.discrepancies.is_empty()
    }

    pub fn outcome(&self) -> CheckOutcome {
        let witness = match self.discrepancies.len() {
            0 => None,
            1 => Some(self.discrepancies[0].to_string()),
            k => Some(format!("{} (and {} more)", self.discrepancies[0], k - 1)),
        };
        CheckOutcome::from_witness("mirror-equals-oracle", witness)
    }
}

/// Coefficient-by-coefficient comparison through the smaller truncation.
pub fn compare(mirror: &Potential, oracle: &Potential) -> Comparison {
    let through = mirror.max_degree().min(oracle.max_degree());
    let nv = mirror.n + 1;
    let keys: BTreeSet<Monomial> = mirror
        .phi
        .terms()
        .chain(oracle.phi.terms())
        .map(|(k, _)| k)
        .filter(|k| k.degree() <= through)
        .collect();
    let discrepancies = keys
        .into_iter()
        .filter_map(|k| {
            let a = mirror.phi.coeff(k).cloned().unwrap_or_else(Rational::zero);
            let b = oracle.phi.coeff(k).cloned().unwrap_or_else(Rational::zero);
            (a != b).then(|| Discrepancy {
                monomial: k.exponents(nv),
                mirror: a.to_string(),
                oracle: b.to_string(),
            })
        })
        .collect();
    Comparison {
        compared_through: through,
        discrepancies,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::wdvv_check;
    use crate::series::rational::{int, rat};

    #[test]
    fn admissible_keys_examples() {
        assert_eq!(GWTable::admissible_keys(2, 1), vec![vec![2]]);
        assert_eq!(GWTable::admissible_keys(2, 4), vec![vec![11]]);
        assert_eq!(GWTable::admissible_keys(1, 1), vec![Vec::<u32>::new()]);
        assert!(GWTable::admissible_keys(1, 2).is_empty());
        let mut k = GWTable::admissible_keys(3, 1);
        k.sort();
        assert_eq!(k, vec![vec![0, 2], vec![2, 1], vec![4, 0]]);
    }

    #[test]
    fn cp2_numbers() {
        let t = reconstruct(2, 5).unwrap();
        let got: Vec<Rational> = (1..=5).map(|d| t.get(d, &[3 * d - 1]).unwrap().clone()).collect();
        assert_eq!(got, vec![int(1), int(1), int(12), int(620), int(87304)]);
        let k = kontsevich_cp2(5);
        for d in 1..=5 {
            assert_eq!(&k[&d], t.get(d, &[3 * d - 1]).unwrap());
        }
        assert!(t.invariants().passed);
        assert!(t.integrality().passed);
    }

    #[test]
    fn cp3_lines() {
        let t = reconstruct(3, 1).unwrap();
        assert_eq!(t.get(1, &[0, 2]), Some(&int(1)));
        assert_eq!(t.get(1, &[2, 1]), Some(&int(1)));
        assert_eq!(t.get(1, &[4, 0]), Some(&int(2)));
    }

    #[test]
    fn cp3_conics_are_integers() {
        let t = reconstruct(3, 2).unwrap();
        assert!(t.integrality().passed);
        assert!(t.invariants().passed);
        // No conic meets four general points; 92 conics meet eight lines.
        assert_eq!(t.get(2, &[0, 4]), Some(&int(0)));
        assert_eq!(t.get(2, &[8, 0]), Some(&int(92)));
    }

    #[test]
    fn cp1_has_only_degree_one() {
        let t = reconstruct(1, 3).unwrap();
        assert_eq!(t.entries.len(), 1);
        assert_eq!(t.get(1, &[]), Some(&int(1)));
    }

    #[test]
    fn oracle_potential_coefficients() {
        let empty = GWTable {
            n: 1,
            entries: BTreeMap::new(),
        };
        let p = oracle_potential(&empty, 4);
        assert!(matches!(p, Err(Error::MissingEntry { d: 1, .. })));

        let t = reconstruct(2, 3).unwrap();
        let p = oracle_potential(&t, 8).unwrap();
        assert_eq!(p.phi.coeff_of(&[0, 0, 8]), rat(12, 40320));
        assert_eq!(p.phi.coeff_of(&[0, 1, 5]), rat(2, 120));
        assert_eq!(p.phi.coeff_of(&[1, 2, 0]), rat(1, 2));
        assert_eq!(p.phi.coeff_of(&[0, 0, 2]), int(0));
        assert!(wdvv_check(&p).passed);
    }

    #[test]
    fn cp1_potential() {
        let t = reconstruct(1, 1).unwrap();
        let p = oracle_potential(&t, 6).unwrap();
        assert_eq!(p.phi.coeff_of(&[2, 1]), rat(1, 2));
        for j in 3..=6u32 {
            assert_eq!(p.phi.coeff_of(&[0, j]), Rational::new(BigInt::one(), factorial(j)));
        }
        assert_eq!(p.phi.len(), 5);
    }

    #[test]
    fn perturbed_oracle_has_one_discrepancy() {
        let t = reconstruct(2, 3).unwrap();
        let p = oracle_potential(&t, 8).unwrap();
        let mut q = p.clone();
        q.phi.add_term(Monomial::from_exponents(&[0, 0, 8]).unwrap(), int(1));
        let cmp = compare(&p, &q);
        assert_eq!(cmp.discrepancies.len(), 1);
        assert!(!cmp.outcome().passed);
        assert!(compare(&p, &p).equal());
    }
}

//! The opposite subspace S₀, the splitting of the period space against it,
//! and the normalized period Ψ(t) with its flat coordinates.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::check::CheckOutcome;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::periods::{s_coefficients, PeriodTable, ThetaFamily};
use crate::series::{invert_coord_map, CoordMap, HVec, HbarWindow, Rational, TPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    S0,
    T,
}

/// Slot `(k, j)` belongs to S₀ iff `j <= k − 1`; the rest is the T-part,
/// where L(0) has its leading terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct S0Grading {
    pub n: usize,
}

impl S0Grading {
    pub fn part(&self, k: usize, j: i32) -> Part {
        if j < k as i32 {
            Part::S0
        } else {
            Part::T
        }
    }

    /// Membership in `ℏ^{-1} S₀`.
    pub fn in_lowered(&self, k: usize, j: i32) -> bool {
        j <= k as i32 - 2
    }
}

/// Keeps only the slots of the requested part.
pub fn project(v: &HVec, part: Part) -> HVec {
    let g = S0Grading { n: v.n() };
    let mut out = HVec::zero(v.n(), v.nvars(), v.max_degree(), v.window());
    for (k, j, p) in v.slots() {
        if g.part(k, j) == part {
            out.set(k, j, p.clone()).expect("inside window");
        }
    }
    out.set_exact_from(v.exact_from());
    out
}

/// A generator `ℏ^i φ^j` hitting its leading T-slot.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeadingTerm {
    pub column: usize,
    pub hbar_power: i32,
    pub slot: (usize, i32),
    #[serde(with = "crate::series::rational::serde_string")]
    pub coefficient: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransversalityReport {
    pub passed: bool,
    /// `(J, rank, size)`: rank of the block of generators with top degree `J`.
    pub rank_profile: Vec<(i32, usize, usize)>,
    pub leading: Vec<LeadingTerm>,
    pub witness: Option<String>,
}

impl TransversalityReport {
    pub fn outcome(&self) -> CheckOutcome {
        CheckOutcome::from_witness("transversality", self.witness.clone())
    }
}

/// Block `J` of the t = 0 generators: entry `[k][j]` is the `α^k ℏ^J`
/// coefficient of `ℏ^{J−j} φ^j`, for `k, j <= min(n, J)`.
fn generator_block<F: Fn(usize, usize, i32) -> Rational>(size: usize, phi: F) -> Matrix {
    (0..size)
        .map(|k| (0..size).map(|j| phi(j, k, j as i32)).collect())
        .collect()
}

/// Checks that `{ℏ^i φ^j : i >= 0, j <= n}` projects onto the T-part of the
/// window with invertible blocks, top degree by top degree.
pub fn transversality_check(theta: &ThetaFamily) -> TransversalityReport {
    let n = theta.n;
    let origin: Vec<HVec> = theta.columns.iter().take(n + 1).map(HVec::at_origin).collect();
    let phi = |l: usize, k: usize, j: i32| -> Rational {
        origin
            .get(l)
            .and_then(|c| c.coeff(k, j))
            .map(TPoly::constant_term)
            .unwrap_or_else(Rational::zero)
    };
    let mut witness = None;
    if origin.len() < n + 1 {
        witness = Some(format!("only {} columns, need {}", origin.len(), n + 1));
    }
    // No generator may reach above its own top degree.
    for (j, col) in origin.iter().enumerate() {
        if let Some((k, jj, _)) = col.slots().find(|(_, jj, _)| *jj > j as i32) {
            witness.get_or_insert(format!("column {j} has support above degree {j} at (k={k}, j={jj})"));
        }
    }
    let mut rank_profile = Vec::new();
    let mut leading = Vec::new();
    for big_j in 0..=theta.window.j_max {
        let size = (n as i32).min(big_j) as usize + 1;
        let block = generator_block(size, phi);
        let rank = linalg::rank(&block);
        rank_profile.push((big_j, rank, size));
        if rank < size && witness.is_none() {
            witness = Some(format!("generator block at degree {big_j} has rank {rank} < {size}"));
        }
        for j in 0..size {
            leading.push(LeadingTerm {
                column: j,
                hbar_power: big_j - j as i32,
                slot: (j, big_j),
                coefficient: block[j][j].clone(),
            });
        }
    }
    TransversalityReport {
        passed: witness.is_none(),
        rank_profile,
        leading,
        witness,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub window: HbarWindow,
    pub table_bottom: i32,
    pub i_max: i32,
    /// Largest ℏ-power used in `u`.
    pub u_top: i32,
    /// Largest top degree `l + p` among the terms assembling Ψ.
    pub psi_term_top: i32,
    /// Ψ is complete from this ℏ-degree upwards.
    pub exact_from: i32,
    /// Rank of every generator block used by the solver.
    pub solver_ranks: Vec<usize>,
}

/// Ψ(t) together with how it was obtained.
#[derive(Clone, Debug)]
pub struct NormalizedPeriod {
    pub n: usize,
    pub psi: HVec,
    pub omega0: HVec,
    /// `Ψ = Σ u[(j, i)] ℏ^i θ_j`.
    pub u: BTreeMap<(usize, i32), TPoly>,
    pub y_of_t: CoordMap,
    pub t_of_y: CoordMap,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SolveOptions {
    /// Largest ℏ-power allowed in `u`; `None` means `j_max − n`.
    pub i_max: Option<i32>,
}

/// Solves `π_T(Σ u_{j,i} ℏ^i θ_j − Ω₀) = 0` degree by degree in `t`.
///
/// Writing the combination as `Σ_l w_l(t, ℏ) φ^l`, each t-degree only
/// involves the t = 0 generator blocks; `table` supplies the scalar periods
/// (it must be the table `theta` was built from).
pub fn solve_normalized_period(theta: &ThetaFamily, table: &PeriodTable, opts: &SolveOptions) -> Result<NormalizedPeriod> {
    let report = transversality_check(theta);
    if !report.passed {
        return Err(Error::Transversality(report.witness.unwrap_or_default()));
    }
    let n = theta.n;
    let d_max = theta.max_degree;
    let window = theta.window;
    let nvars = n + 1;
    let i_max = opts.i_max.unwrap_or(window.j_max - n as i32);
    let s = s_coefficients(n, d_max, n * d_max as usize);
    if table.l_max() < n + n * d_max as usize {
        return Err(Error::WindowTooShallow(format!(
            "period table stops at l={} but the solve needs l={}",
            table.l_max(),
            n + n * d_max as usize
        )));
    }

    let blocks: Vec<Matrix> = (1..=n + 1)
        .map(|size| generator_block(size, |l, k, j| table.get(l, k, j).clone()))
        .collect();
    let inverses: Vec<Matrix> = blocks
        .iter()
        .map(|b| linalg::inverse(b).ok_or_else(|| Error::Transversality("singular generator block".into())))
        .collect::<Result<_>>()?;
    let solver_ranks = blocks.iter().map(|b| linalg::rank(b)).collect();

    let mut u: BTreeMap<(usize, i32), TPoly> = BTreeMap::new();
    let mut w: BTreeMap<(usize, i32), TPoly> = BTreeMap::new();
    let add_to_w = |w: &mut BTreeMap<(usize, i32), TPoly>, j: usize, i: i32, x: &TPoly, from_degree: u32| {
        for r in 0..=(d_max - from_degree) {
            for lp in 0..=(n * r as usize) {
                let sp = s.get(lp, r).expect("in range");
                if sp.is_zero() {
                    continue;
                }
                let term = x.mul_up_to(sp, d_max);
                if term.is_zero() {
                    continue;
                }
                w.entry((j + lp, i - r as i32))
                    .or_insert_with(|| TPoly::zero(nvars, d_max))
                    .add_assign_poly(&term);
            }
        }
    };
    let one = TPoly::one(nvars, d_max);
    u.insert((0, 0), one.clone());
    add_to_w(&mut w, 0, 0, &one, 0);

    let grading = S0Grading { n };
    let t_slots: Vec<(usize, i32)> = (0..=n)
        .flat_map(|k| (k as i32..=window.j_max).map(move |j| (k, j)))
        .collect();

    for d in 1..=d_max {
        let wd: Vec<((usize, i32), TPoly)> = w
            .iter()
            .map(|(key, p)| (*key, p.homogeneous_part(d)))
            .filter(|(_, p)| !p.is_zero())
            .collect();
        for ((l, p), _) in &wd {
            if *l as i32 + p > window.j_max {
                return Err(Error::WindowOverflow {
                    k: 0,
                    j: *l as i32 + p,
                    j_max: window.j_max,
                });
            }
        }
        let mut residual: BTreeMap<(usize, i32), TPoly> = t_slots
            .par_iter()
            .map(|&(k, big_j)| {
                let mut acc = TPoly::zero(nvars, d_max);
                for ((l, p), poly) in &wd {
                    let c = table.get(*l, k, big_j - p);
                    if !c.is_zero() {
                        acc.add_scaled(poly, c);
                    }
                }
                ((k, big_j), acc)
            })
            .filter(|(_, acc)| !acc.is_zero())
            .collect();

        let mut new_u: Vec<(usize, i32, TPoly)> = Vec::new();
        for big_j in (0..=window.j_max).rev() {
            let size = (n as i32).min(big_j) as usize + 1;
            let rhs: Vec<TPoly> = (0..size)
                .map(|k| residual.remove(&(k, big_j)).unwrap_or_else(|| TPoly::zero(nvars, d_max)))
                .collect();
            if rhs.iter().all(TPoly::is_zero) {
                continue;
            }
            let inv = &inverses[size - 1];
            for j in 0..size {
                let mut x = TPoly::zero(nvars, d_max);
                for (k, r) in rhs.iter().enumerate() {
                    x.add_scaled(r, &-inv[j][k].clone());
                }
                if x.is_zero() {
                    continue;
                }
                let i = big_j - j as i32;
                if i > i_max {
                    return Err(Error::WindowOverflow {
                        k: j,
                        j: i,
                        j_max: i_max,
                    });
                }
                // Remove this generator's contribution below degree J.
                for k in 0..=n {
                    for (jj, c) in table.support(j, k) {
                        let target = jj + i;
                        if grading.part(k, target) == Part::S0 {
                            break;
                        }
                        if target >= big_j {
                            continue;
                        }
                        residual
                            .entry((k, target))
                            .or_insert_with(|| TPoly::zero(nvars, d_max))
                            .add_scaled(&x, c);
                    }
                }
                new_u.push((j, i, x));
            }
            residual.retain(|_, p| !p.is_zero());
        }
        if let Some(((k, j), _)) = residual.iter().next() {
            return Err(Error::SingularStep {
                degree: d,
                detail: format!("residual left at slot (k={k}, j={j})"),
            });
        }
        for (j, i, x) in new_u {
            add_to_w(&mut w, j, i, &x, d);
            u.entry((j, i))
                .or_insert_with(|| TPoly::zero(nvars, d_max))
                .add_assign_poly(&x);
        }
    }
    u.retain(|_, p| !p.is_zero());
    w.retain(|_, p| !p.is_zero());

    let psi_term_top = w.keys().map(|(l, p)| *l as i32 + p).max().unwrap_or(0);
    if psi_term_top > window.j_max {
        return Err(Error::WindowOverflow {
            k: 0,
            j: psi_term_top,
            j_max: window.j_max,
        });
    }
    let exact_from = w
        .keys()
        .map(|(l, p)| table.exact_from(*l) + p)
        .max()
        .unwrap_or(window.j_min)
        .max(window.j_min);

    let slots: Vec<(usize, i32)> = (0..=n).flat_map(|k| window.degrees().map(move |j| (k, j))).collect();
    let values: Vec<((usize, i32), TPoly)> = slots
        .par_iter()
        .map(|&(k, big_j)| {
            let mut acc = TPoly::zero(nvars, d_max);
            for ((l, p), poly) in &w {
                let c = table.get(*l, k, big_j - p);
                if !c.is_zero() {
                    acc.add_scaled(poly, c);
                }
            }
            ((k, big_j), acc)
        })
        .collect();
    let mut psi = HVec::zero(n, nvars, d_max, window);
    for ((k, j), p) in values {
        psi.set(k, j, p)?;
    }
    psi.set_exact_from(exact_from);

    let mut omega0 = table.to_hvec(0, nvars, d_max, window)?;
    omega0.set_exact_from(exact_from);

    let y_of_t = extract_mirror_coordinates(&psi)?;
    let t_of_y = invert_coord_map(&y_of_t)?;
    let u_top = u.keys().map(|(_, i)| *i).max().unwrap_or(0);
    Ok(NormalizedPeriod {
        n,
        psi,
        omega0,
        u,
        y_of_t,
        t_of_y,
        diagnostics: Diagnostics {
            window,
            table_bottom: table.lo(),
            i_max,
            u_top,
            psi_term_top,
            exact_from,
            solver_ranks,
        },
    })
}

/// `y^k(t)`: the slot-`(k, k−1)` coefficient of `Ψ − Ω₀`.
pub fn extract_mirror_coordinates(psi: &HVec) -> Result<CoordMap> {
    let n = psi.n();
    let images = (0..=n)
        .map(|k| {
            let mut p = psi.coeff_or_zero(k, k as i32 - 1);
            let c = p.constant_term();
            p.add_term(crate::series::Monomial::ONE, -c);
            p
        })
        .collect();
    CoordMap::new(images)
}

/// Ψ in flat coordinates, `Ψ(t(y))`.
pub fn reparametrize(np: &NormalizedPeriod) -> Result<HVec> {
    np.psi.compose(&np.t_of_y.substitution()?)
}

/// `Σ u_{j,i} ℏ^i θ_j` computed directly from the columns.
pub fn psi_from_theta(u: &BTreeMap<(usize, i32), TPoly>, theta: &ThetaFamily) -> Result<HVec> {
    let first = theta.column(0);
    let mut acc = HVec::zero(first.n(), first.nvars(), first.max_degree(), first.window());
    acc.set_exact_from(first.exact_from());
    for ((j, i), p) in u {
        let col = theta
            .columns
            .get(*j)
            .ok_or_else(|| Error::Config(format!("no column {j}")))?;
        let term = col.shift_hbar(*i)?.scale(p)?;
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// First T-slot where `Ψ − Ω₀` is nonzero.
pub fn normalization_defect(np: &NormalizedPeriod) -> Option<NormalizationDefect> {
    let diff = np.psi.sub(&np.omega0).ok()?;
    let g = S0Grading { n: np.n };
    let found = diff
        .slots()
        .find(|(k, j, _)| g.part(*k, *j) == Part::T)
        .map(|(k, j, p)| NormalizationDefect {
            k,
            j,
            value: p.to_string(),
        });
    found
}

#[derive(Clone, Debug)]
pub struct NormalizationDefect {
    pub k: usize,
    pub j: i32,
    pub value: String,
}

impl fmt::Display for NormalizationDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T-slot (k={}, j={}) of Ψ−Ω₀ is {}", self.k, self.j, self.value)
    }
}

/// `Ψ|_{t=0} = Ω₀`.
pub fn origin_check(np: &NormalizedPeriod) -> CheckOutcome {
    let from = np.psi.exact_from();
    let top = np.psi.window().j_max;
    CheckOutcome::from_witness(
        "psi-at-origin",
        np.psi.at_origin().first_difference(&np.omega0, (from, top), 0),
    )
}

/// After reparametrization the `(k, k−1)` slots of `Ψ − Ω₀` are exactly `y^k`.
pub fn flat_coordinate_check(psi_y: &HVec, omega0: &HVec) -> CheckOutcome {
    let n = psi_y.n();
    let nvars = psi_y.nvars();
    let d = psi_y.max_degree();
    for k in 0..=n {
        let got = psi_y.coeff_or_zero(k, k as i32 - 1);
        let base = omega0.coeff_or_zero(k, k as i32 - 1);
        let mut expected = TPoly::var(nvars, d, k);
        expected.add_assign_poly(&base);
        if let Some((m, a, b)) = got.first_difference(&expected, d) {
            return CheckOutcome::fail(
                "flat-coordinates",
                format!("slot (k={k}, j={}) monomial {:?}: {a} vs {b}", k as i32 - 1, m.exponents(nvars)),
            );
        }
    }
    CheckOutcome::pass("flat-coordinates")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periods::{theta_columns, PeriodTable};
    use crate::series::rational::int;
    use crate::series::{AlphaPoly, Monomial};

    fn setup(n: usize, d: u32) -> (PeriodTable, ThetaFamily) {
        let j_max = 2 * n as i32 + d as i32 * (n as i32 - 1) + 2;
        let j_min = -((n as i32 + 1) * (d as i32 + 2) + 2);
        let lo = j_min - j_max - 2 * (n as i32 + 1);
        let l_max = n * d as usize + 2 * n;
        let table = PeriodTable::new(n, l_max, lo).unwrap();
        let theta = theta_columns(&table, d, HbarWindow::new(j_min, j_max), 2 * n).unwrap();
        (table, theta)
    }

    #[test]
    fn projection_examples() {
        let (table, theta) = setup(1, 3);
        let xi = table.to_hvec(0, 2, 3, theta.window).unwrap();
        let t = project(&xi, Part::T);
        assert_eq!(t.slots().count(), 1);
        assert_eq!(t.coefficient(0, 0, Monomial::ONE), int(1));
        assert_eq!(project(&xi, Part::S0).add(&t).unwrap(), xi);

        let w = HbarWindow::new(-4, 4);
        for k in 0..=2usize {
            let gen = HVec::from_scalars(2, 3, 1, w, [(k, k as i32 - 1, int(1))]).unwrap();
            assert_eq!(project(&gen, Part::S0), gen);
            let top = HVec::from_scalars(2, 3, 1, w, [(k, k as i32, int(1))]).unwrap();
            assert!(project(&top, Part::S0).is_zero());
        }
    }

    #[test]
    fn transversality_leading_terms_n1() {
        let (_, theta) = setup(1, 2);
        let rep = transversality_check(&theta);
        assert!(rep.passed);
        let find = |col: usize, i: i32| {
            rep.leading
                .iter()
                .find(|l| l.column == col && l.hbar_power == i)
                .map(|l| (l.slot, l.coefficient.clone()))
                .unwrap()
        };
        assert_eq!(find(0, 0), ((0, 0), int(1)));
        assert_eq!(find(1, 0), ((1, 1), int(2)));
        assert_eq!(find(0, 1), ((0, 1), int(1)));
        assert_eq!(find(1, 1), ((1, 2), int(2)));
    }

    #[test]
    fn corrupted_family_fails_transversality() {
        let (_, mut theta) = setup(2, 2);
        let w = theta.window;
        theta.columns[2] = HVec::zero(2, 3, 2, w);
        let rep = transversality_check(&theta);
        assert!(!rep.passed);
        assert!(rep.witness.unwrap().contains("rank"));
    }

    #[test]
    fn normalized_period_n1() {
        let (table, theta) = setup(1, 4);
        let np = solve_normalized_period(&theta, &table, &SolveOptions::default()).unwrap();
        assert!(normalization_defect(&np).is_none());
        assert!(origin_check(&np).passed);
        // Degree one: Ψ = ξ + ℏ^{-1}(t0 φ^0 + t1 φ^1), no correction.
        let lin = np.psi.homogeneous_part(1);
        let expected = theta.column(0).homogeneous_part(1);
        assert!(lin.first_difference(&expected, (np.psi.exact_from(), 4), 4).is_none());
        // y^1 = 2 t^1 + ...
        assert_eq!(np.y_of_t.component(1).coeff_of(&[0, 1]), int(2));
        assert_eq!(np.y_of_t.component(0).coeff_of(&[1, 0]), int(1));
        // Ψ agrees with the direct θ-combination.
        let direct = psi_from_theta(&np.u, &theta).unwrap();
        let from = np.psi.exact_from().max(direct.exact_from());
        assert!(np.psi.first_difference(&direct, (from, theta.window.j_max), 4).is_none());
    }

    #[test]
    fn normalized_period_n2_matches_theta_route() {
        let (table, theta) = setup(2, 4);
        let np = solve_normalized_period(&theta, &table, &SolveOptions::default()).unwrap();
        assert!(normalization_defect(&np).is_none());
        let direct = psi_from_theta(&np.u, &theta).unwrap();
        let from = np.psi.exact_from().max(direct.exact_from());
        assert!(np.psi.first_difference(&direct, (from, theta.window.j_max), 4).is_none());
        for k in 0..=2usize {
            let mut e = vec![0u32; 3];
            e[k] = 1;
            assert_eq!(np.y_of_t.component(k).coeff_of(&e), int(3i64.pow(k as u32)));
        }
        let psi_y = reparametrize(&np).unwrap();
        assert!(flat_coordinate_check(&psi_y, &np.omega0).passed);
    }

    #[test]
    fn raising_i_max_changes_nothing() {
        let (table, theta) = setup(2, 3);
        let a = solve_normalized_period(&theta, &table, &SolveOptions::default()).unwrap();
        let b = solve_normalized_period(&theta, &table, &SolveOptions { i_max: Some(40) }).unwrap();
        assert_eq!(a.psi, b.psi);
        assert_eq!(a.u, b.u);
    }

    #[test]
    fn framed_solve_keeps_coordinates() {
        let n = 2;
        let d = 3;
        let (table, theta) = setup(n, d);
        let base = solve_normalized_period(&theta, &table, &SolveOptions::default()).unwrap();
        let c = AlphaPoly::from_coeffs(vec![int(1), int(3), crate::series::rational::rat(-1, 2)]);
        let framed_table = PeriodTable::with_frame(n, table.l_max(), table.lo(), &c).unwrap();
        let framed_theta = theta_columns(&framed_table, d, theta.window, 2 * n).unwrap();
        let framed = solve_normalized_period(&framed_theta, &framed_table, &SolveOptions::default()).unwrap();
        assert_eq!(base.y_of_t, framed.y_of_t);
    }
}

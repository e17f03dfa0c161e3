//! Period series of the mirror family: ξ, the f-periods φ^l = M^l ξ, and the
//! columns θ_j(t, ℏ).
//!
//! The stored ξ omits the constant unit Γ(α+1)^{-(n+1)}; everything
//! downstream is insensitive to constant unipotent frame changes, which is
//! what [`PeriodTable::with_frame`] exercises.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::series::monomial::Monomial;
use crate::series::rational::{factorial, Rational};
use crate::series::{AlphaPoly, HVec, HbarWindow, TPoly};

/// A t-independent element of the period space (ξ or one of its f-periods).
/// The underlying [`HVec`] has `n + 1` variables and truncation degree 0.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodSeries {
    pub value: HVec,
}

impl PeriodSeries {
    pub fn n(&self) -> usize {
        self.value.n()
    }

    /// The scalar coefficient at `α^k ℏ^j`.
    pub fn get(&self, k: usize, j: i32) -> Rational {
        self.value
            .coeff(k, j)
            .map(TPoly::constant_term)
            .unwrap_or_else(Rational::zero)
    }

    /// The same element viewed as a series in `nvars` variables truncated
    /// at degree `max_degree`.
    pub fn lift(&self, nvars: usize, max_degree: u32) -> HVec {
        lift_scalars(&self.value, nvars, max_degree)
    }
}

fn lift_scalars(v: &HVec, nvars: usize, max_degree: u32) -> HVec {
    let mut out = HVec::zero(v.n(), nvars, max_degree, v.window());
    let one = TPoly::one(nvars, max_degree);
    for (k, j, p) in v.slots() {
        out.add_scaled_at(k, j, &one, &p.constant_term())
            .expect("same window");
    }
    out.set_exact_from(v.exact_from());
    out
}

/// `∏_{i=1}^{d} (α+i)^{-(n+1)}` in `Q[α]/α^{n+1}`.
pub fn instanton_factor(n: usize, d: u32) -> AlphaPoly {
    let mut acc = AlphaPoly::one(n);
    for i in 1..=d {
        let inv = AlphaPoly::shifted_alpha(n, Rational::from_integer(i.into()))
            .inverse()
            .expect("α + i is a unit");
        acc = acc.mul(&inv.pow(n as u32 + 1)).expect("same n");
    }
    acc
}

/// ξ with its first `depth` instanton terms: `Σ_{d=0}^{depth} ℏ^{-(n+1)d} ∏_{i≤d}(α+i)^{-(n+1)}`.
pub fn xi_series(n: usize, depth: u32, window: HbarWindow) -> Result<PeriodSeries> {
    if n == 0 {
        return Err(Error::Config("n must be at least 1".into()));
    }
    if depth == 0 {
        return Err(Error::Config("xi needs at least one instanton term".into()));
    }
    let lowest = -((n as i32 + 1) * depth as i32);
    if window.j_min > lowest {
        return Err(Error::WindowTooShallow(format!(
            "window bottom {} cannot hold {} instanton terms (needs {})",
            window.j_min, depth, lowest
        )));
    }
    if window.j_max < 0 {
        return Err(Error::WindowOverflow {
            k: 0,
            j: 0,
            j_max: window.j_max,
        });
    }
    let mut v = HVec::zero(n, n + 1, 0, window);
    let one = TPoly::one(n + 1, 0);
    let mut factor = AlphaPoly::one(n);
    for d in 0..=depth {
        if d > 0 {
            let inv = AlphaPoly::shifted_alpha(n, Rational::from_integer(d.into()))
                .inverse()
                .expect("unit");
            factor = factor.mul(&inv.pow(n as u32 + 1))?;
        }
        let j = -((n as i32 + 1) * d as i32);
        for (k, c) in factor.coeffs().iter().enumerate() {
            v.add_scaled_at(k, j, &one, c)?;
        }
    }
    v.set_exact_from(lowest - n as i32);
    Ok(PeriodSeries { value: v })
}

/// The operator `M = (n+1)αℏ − ℏ²∂_ℏ`, multiplication by f in the
/// trivialized frame.
pub fn mult_by_f(v: &HVec) -> Result<HVec> {
    let n = v.n();
    let mut out = HVec::zero(n, v.nvars(), v.max_degree(), v.window());
    let scale = Rational::from_integer((n as i64 + 1).into());
    for (k, j, p) in v.slots() {
        out.add_scaled_at(k, j + 1, p, &Rational::from_integer((-j).into()))?;
        if k < n {
            out.add_scaled_at(k + 1, j + 1, p, &scale)?;
        }
    }
    out.set_exact_from(v.exact_from() + 1);
    Ok(out)
}

/// `φ^0 = ξ, …, φ^{l_max}`.
pub fn f_periods(n: usize, l_max: usize, depth: u32, window: HbarWindow) -> Result<Vec<PeriodSeries>> {
    let mut out = vec![xi_series(n, depth, window)?];
    for _ in 0..l_max {
        let next = mult_by_f(&out.last().expect("nonempty").value)?;
        out.push(PeriodSeries { value: next });
    }
    Ok(out)
}

/// `∂_ℏ − (n+1)αℏ^{-1}` in the trivialized frame.
pub fn hbar_derivative(v: &HVec) -> HVec {
    let n = v.n();
    let mut out = HVec::zero(n, v.nvars(), v.max_degree(), v.window());
    let scale = Rational::from_integer((-(n as i64 + 1)).into());
    for (k, j, p) in v.slots() {
        out.add_scaled_at(k, j - 1, p, &Rational::from_integer(j.into()))
            .expect("lowering never overflows");
        if k < n {
            out.add_scaled_at(k + 1, j - 1, p, &scale)
                .expect("lowering never overflows");
        }
    }
    out.set_exact_from(v.exact_from() - 1);
    out
}

/// `D★ = α − ℏ∂_ℏ/(n+1)`: on a coefficient at `(k, j)` it is α-multiplication
/// plus the scalar `−j/(n+1)`.
pub fn d_star(v: &HVec) -> HVec {
    let n = v.n();
    let mut out = v.apply_alpha();
    for (k, j, p) in v.slots() {
        let c = Rational::new(BigInt::from(-j), BigInt::from(n + 1));
        out.add_scaled_at(k, j, p, &c).expect("same slot");
    }
    out.set_exact_from(v.exact_from());
    out
}

/// Scalar coefficients of `φ^l = M^l(c·ξ)` for `0 <= l <= l_max`, stored
/// densely for `lo <= j <= l_max`. Row `l` is exact from `lo + l` upwards.
#[derive(Clone, Debug)]
pub struct PeriodTable {
    n: usize,
    lo: i32,
    hi: i32,
    frame: AlphaPoly,
    rows: Vec<Vec<Vec<Rational>>>,
    zero: Rational,
}

impl PeriodTable {
    pub fn new(n: usize, l_max: usize, lo: i32) -> Result<Self> {
        Self::with_frame(n, l_max, lo, &AlphaPoly::one(n))
    }

    /// As [`PeriodTable::new`] with ξ replaced by `frame · ξ`.
    pub fn with_frame(n: usize, l_max: usize, lo: i32, frame: &AlphaPoly) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if frame.n() != n {
            return Err(Error::MismatchedAlpha {
                left: n,
                right: frame.n(),
            });
        }
        if !frame.is_unit() {
            return Err(Error::NonUnit);
        }
        if lo > -(n as i32 + 1) {
            return Err(Error::WindowTooShallow(format!("table bottom {lo} is above the first instanton term")));
        }
        let hi = l_max as i32;
        let width = (hi - lo + 1) as usize;
        let idx = |j: i32| (j - lo) as usize;
        let mut xi = vec![vec![Rational::zero(); width]; n + 1];
        let mut factor = frame.clone();
        let mut d = 0u32;
        loop {
            let j = -((n as i32 + 1) * d as i32);
            if j < lo {
                break;
            }
            for (k, c) in factor.coeffs().iter().enumerate() {
                xi[k][idx(j)] = c.clone();
            }
            d += 1;
            let inv = AlphaPoly::shifted_alpha(n, Rational::from_integer(d.into()))
                .inverse()
                .expect("unit");
            factor = factor.mul(&inv.pow(n as u32 + 1))?;
        }
        let mut rows = vec![xi];
        let np1 = Rational::from_integer((n as i64 + 1).into());
        for _ in 0..l_max {
            let prev = rows.last().expect("nonempty");
            let mut next = vec![vec![Rational::zero(); width]; n + 1];
            for k in 0..=n {
                for j in lo..hi {
                    let c = &prev[k][idx(j)];
                    if c.is_zero() {
                        continue;
                    }
                    next[k][idx(j + 1)] -= c * Rational::from_integer(j.into());
                    if k < n {
                        next[k + 1][idx(j + 1)] += c * &np1;
                    }
                }
            }
            rows.push(next);
        }
        Ok(PeriodTable {
            n,
            lo,
            hi,
            frame: frame.clone(),
            rows,
            zero: Rational::zero(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l_max(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn frame(&self) -> &AlphaPoly {
        &self.frame
    }

    /// Lowest ℏ-degree at which row `l` is complete.
    pub fn exact_from(&self, l: usize) -> i32 {
        self.lo + l as i32
    }

    /// Coefficient of `α^k ℏ^j` in `φ^l`; zero outside the stored range.
    #[inline]
    pub fn get(&self, l: usize, k: usize, j: i32) -> &Rational {
        if j < self.lo || j > self.hi || l >= self.rows.len() || k > self.n {
            return &self.zero;
        }
        &self.rows[l][k][(j - self.lo) as usize]
    }

    /// Nonzero `(j, value)` entries of row `l` at α-degree `k`, top first.
    pub fn support(&self, l: usize, k: usize) -> impl Iterator<Item = (i32, &Rational)> + '_ {
        let lo = self.lo;
        self.rows[l][k]
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (lo + i as i32, c))
    }

    /// `φ^l` as a series element on `window`, lifted to `nvars` variables.
    pub fn to_hvec(&self, l: usize, nvars: usize, max_degree: u32, window: HbarWindow) -> Result<HVec> {
        let mut v = HVec::zero(self.n, nvars, max_degree, window);
        let one = TPoly::one(nvars, max_degree);
        for k in 0..=self.n {
            for (j, c) in self.support(l, k) {
                v.add_scaled_at(k, j, &one, c)?;
            }
        }
        v.set_exact_from(self.exact_from(l).max(window.j_min));
        Ok(v)
    }
}

/// `s[l][r]`: the coefficient of `ℏ^{-r} f^l` in `exp(Σ_m t^m f^m / ℏ)`, a
/// homogeneous polynomial of degree `r` in `t`.
#[derive(Clone, Debug)]
pub struct SCoefficients {
    n: usize,
    max_degree: u32,
    table: Vec<Vec<TPoly>>,
}

impl SCoefficients {
    pub fn get(&self, l: usize, r: u32) -> Option<&TPoly> {
        self.table.get(l).and_then(|row| row.get(r as usize))
    }

    pub fn l_max(&self) -> usize {
        self.table.len() - 1
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `s^l(t, ℏ)` as a map from ℏ-degree `−r` to its coefficient.
    pub fn series(&self, l: usize) -> Vec<(i32, TPoly)> {
        self.table[l]
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(r, p)| (-(r as i32), p.clone()))
            .collect()
    }
}

/// Coefficients of `exp(Σ_{m=0}^{n} t^m f^m / ℏ) = Σ_l s^l f^l`, truncated at
/// t-degree `max_degree`.
pub fn s_coefficients(n: usize, max_degree: u32, l_max: usize) -> SCoefficients {
    let nvars = n + 1;
    let mut table = vec![vec![TPoly::zero(nvars, max_degree); max_degree as usize + 1]; l_max + 1];
    let mut exps = vec![0u32; nvars];
    fill_s(&mut table, &mut exps, 0, max_degree, nvars);
    SCoefficients { n, max_degree, table }
}

fn fill_s(table: &mut [Vec<TPoly>], exps: &mut Vec<u32>, var: usize, budget: u32, nvars: usize) {
    if var == nvars {
        let r: u32 = exps.iter().sum();
        let l: usize = exps.iter().enumerate().map(|(m, &e)| m * e as usize).sum();
        if l < table.len() {
            let denom: BigInt = exps.iter().map(|&e| factorial(e)).product();
            let m = Monomial::from_exponents(exps).expect("fits");
            table[l][r as usize].add_term(m, Rational::new(BigInt::one(), denom));
        }
        return;
    }
    for e in 0..=budget {
        exps[var] = e;
        fill_s(table, exps, var + 1, budget - e, nvars);
    }
    exps[var] = 0;
}

/// The columns `θ_0 … θ_{J_max}` of the deformed period matrix, with
/// `θ_j = Σ_{l≥0} s^l(t,ℏ) φ^{l+j}`.
#[derive(Clone, Debug)]
pub struct ThetaFamily {
    pub n: usize,
    pub max_degree: u32,
    pub window: HbarWindow,
    pub columns: Vec<HVec>,
}

impl ThetaFamily {
    pub fn j_max(&self) -> usize {
        self.columns.len() - 1
    }

    pub fn column(&self, j: usize) -> &HVec {
        &self.columns[j]
    }

    /// The t = 0 slice of every column.
    pub fn at_origin(&self) -> Vec<HVec> {
        self.columns.iter().map(HVec::at_origin).collect()
    }
}

/// Builds `θ_0 … θ_{j_cols}` on `window` at t-degree `max_degree`.
///
/// The table must reach `l = j_cols + n·max_degree` and be exact on the
/// window for every term used.
pub fn theta_columns(table: &PeriodTable, max_degree: u32, window: HbarWindow, j_cols: usize) -> Result<ThetaFamily> {
    let n = table.n();
    if j_cols < n {
        return Err(Error::Config(format!("need at least {n} extra columns, got {j_cols}")));
    }
    let needed_l = j_cols + n * max_degree as usize;
    if table.l_max() < needed_l {
        return Err(Error::WindowTooShallow(format!(
            "period table stops at l={} but θ needs l={needed_l}",
            table.l_max()
        )));
    }
    let s = s_coefficients(n, max_degree, n * max_degree as usize);
    let nvars = n + 1;
    let columns: Result<Vec<HVec>> = (0..=j_cols)
        .into_par_iter()
        .map(|j| {
            let mut col = HVec::zero(n, nvars, max_degree, window);
            let mut exact_from = window.j_min;
            for r in 0..=max_degree {
                for lp in 0..=(n * r as usize) {
                    let Some(sp) = s.get(lp, r) else { continue };
                    if sp.is_zero() {
                        continue;
                    }
                    let l = lp + j;
                    exact_from = exact_from.max(table.exact_from(l) - r as i32);
                    for k in 0..=n {
                        for (jj, c) in table.support(l, k) {
                            let target = jj - r as i32;
                            if target < window.j_min {
                                break;
                            }
                            col.add_scaled_at(k, target, sp, c)?;
                        }
                    }
                }
            }
            col.set_exact_from(exact_from);
            Ok(col)
        })
        .collect();
    Ok(ThetaFamily {
        n,
        max_degree,
        window,
        columns: columns?,
    })
}

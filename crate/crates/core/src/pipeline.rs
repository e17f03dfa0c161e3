//! End-to-end run: periods → normalized period → connection → potential,
//! with the verification suite attached.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::check::CheckOutcome;
use crate::error::{Error, Result};
use crate::frobenius::{
    classical_cubic, connection_from_period, euler_checks, identity_check, lower_index, origin_structure_check,
    potential_from_tensor, sigma_extract, small_quantum_check, verify_flatness, wdvv_check, ConnectionData, Potential,
    SigmaReport,
};
use crate::normalization::{
    flat_coordinate_check, normalization_defect, origin_check, reparametrize, solve_normalized_period,
    transversality_check, NormalizedPeriod, SolveOptions, TransversalityReport,
};
use crate::periods::{d_star, theta_columns, PeriodTable, ThetaFamily};
use crate::series::{AlphaPoly, HVec, HbarWindow, Monomial, Rational};

/// Families of checks that can be switched on and off.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckGroup {
    Pf,
    Flatness,
    Euler,
    Identity,
    Wdvv,
    Sigma,
    Frame,
    Stability,
}

impl CheckGroup {
    pub const ALL: [CheckGroup; 8] = [
        CheckGroup::Pf,
        CheckGroup::Flatness,
        CheckGroup::Euler,
        CheckGroup::Identity,
        CheckGroup::Wdvv,
        CheckGroup::Sigma,
        CheckGroup::Frame,
        CheckGroup::Stability,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckGroup::Pf => "pf",
            CheckGroup::Flatness => "flatness",
            CheckGroup::Euler => "euler",
            CheckGroup::Identity => "identity",
            CheckGroup::Wdvv => "wdvv",
            CheckGroup::Sigma => "sigma",
            CheckGroup::Frame => "frame",
            CheckGroup::Stability => "stability",
        }
    }
}

impl fmt::Display for CheckGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckGroup::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown check group '{s}'")))
    }
}

/// Deliberate corruption used to exercise the failure paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaultInjection {
    /// Adds `y¹` to `A^0_{1,n}` (and its mirror entry) after extraction.
    PerturbConnection,
    /// Adds `(y^n)^3` to Φ after integration.
    PerturbPotential,
}

impl FromStr for FaultInjection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "perturb-connection" => Ok(FaultInjection::PerturbConnection),
            "perturb-potential" => Ok(FaultInjection::PerturbPotential),
            _ => Err(Error::Config(format!("unknown fault '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub n: usize,
    pub degree: u32,
    /// Number of instanton terms of ξ the window must hold (default
    /// `degree + 2`); the window bottom is `−((n+1)·depth + 2)`.
    pub hbar_depth: Option<i32>,
    /// Overrides the window top `j_max`.
    pub window_top: Option<i32>,
    /// Multiplies ξ by this unit of `Q[α]/α^{n+1}`.
    pub frame: Option<AlphaPoly>,
    pub fault: Option<FaultInjection>,
}

impl PipelineConfig {
    pub fn new(n: usize, degree: u32) -> Self {
        PipelineConfig {
            n,
            degree,
            hbar_depth: None,
            window_top: None,
            frame: None,
            fault: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if self.degree < 3 {
            return Err(Error::Config(format!("degree must be at least 3, got {}", self.degree)));
        }
        if self.n > 8 {
            return Err(Error::Config("n above 8 is not supported".into()));
        }
        if let Some(f) = &self.frame {
            if f.n() != self.n || !f.is_unit() {
                return Err(Error::Config("frame must be a unit of Q[α]/α^{n+1}".into()));
            }
        }
        let w = self.window();
        if self.depth() < 1 || w.j_max < self.n as i32 {
            return Err(Error::Config(format!("window {w} is degenerate")));
        }
        Ok(())
    }

    pub fn default_window(n: usize, degree: u32) -> HbarWindow {
        let n = n as i32;
        let d = degree as i32;
        HbarWindow::new(-((n + 1) * (d + 2) + 2), 2 * n + d * (n - 1) + 2)
    }

    pub fn depth(&self) -> i32 {
        self.hbar_depth.unwrap_or(self.degree as i32 + 2)
    }

    pub fn window(&self) -> HbarWindow {
        let def = Self::default_window(self.n, self.degree);
        HbarWindow::new(
            -((self.n as i32 + 1) * self.depth() + 2),
            self.window_top.unwrap_or(def.j_max),
        )
    }

    /// Lowest ℏ-degree stored in the period table.
    pub fn table_bottom(&self) -> i32 {
        let w = self.window();
        w.j_min - w.j_max - 2 * (self.n as i32 + 1)
    }

    pub fn table_rows(&self) -> usize {
        self.n * self.degree as usize + 2 * self.n
    }

    /// The same run with half again as many instanton terms and the window
    /// top raised by `n + 1`.
    pub fn deepened(&self) -> Self {
        let depth = self.depth();
        let mut c = self.clone();
        c.hbar_depth = Some(depth + (depth + 1) / 2);
        c.window_top = Some(self.window().j_max + self.n as i32 + 1);
        c
    }
}

/// Everything a run produces.
#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub config: PipelineConfig,
    pub theta: ThetaFamily,
    pub transversality: TransversalityReport,
    pub normalized: NormalizedPeriod,
    pub psi_y: HVec,
    pub connection: ConnectionData,
    pub potential: Potential,
    pub sigma: SigmaReport,
    pub checks: Vec<(CheckGroup, CheckOutcome)>,
    pub timings_ms: Vec<(String, u128)>,
    table: PeriodTable,
}

impl PipelineResult {
    pub fn checks_in(&self, groups: &[CheckGroup]) -> Vec<CheckOutcome> {
        self.checks
            .iter()
            .filter(|(g, _)| groups.contains(g))
            .map(|(_, c)| c.clone())
            .collect()
    }

    pub fn table(&self) -> &PeriodTable {
        &self.table
    }
}

struct Timer {
    last: Instant,
    laps: Vec<(String, u128)>,
}

impl Timer {
    fn new() -> Self {
        Timer {
            last: Instant::now(),
            laps: Vec::new(),
        }
    }

    fn lap(&mut self, name: &str) {
        let now = Instant::now();
        self.laps.push((name.to_string(), (now - self.last).as_millis()));
        self.last = now;
    }
}

/// Runs every stage and the checks of all groups except `frame` and
/// `stability`, which need extra runs (see [`property_suite`]).
pub fn run(config: &PipelineConfig) -> Result<PipelineResult> {
    config.validate()?;
    let n = config.n;
    let d = config.degree;
    let window = config.window();
    let mut timer = Timer::new();

    let frame = config.frame.clone().unwrap_or_else(|| AlphaPoly::one(n));
    let table = PeriodTable::with_frame(n, config.table_rows(), config.table_bottom(), &frame)?;
    let theta = theta_columns(&table, d, window, 2 * n)?;
    timer.lap("periods");

    let transversality = transversality_check(&theta);
    let normalized = solve_normalized_period(&theta, &table, &SolveOptions::default())?;
    let psi_y = reparametrize(&normalized)?;
    timer.lap("normalization");

    let mut connection = connection_from_period(&psi_y)?;
    if config.fault == Some(FaultInjection::PerturbConnection) {
        let bump = crate::series::TPoly::var(n + 1, d, 1);
        connection.a_mut(1, n, 0).add_assign_poly(&bump);
        if n != 1 {
            connection.a_mut(n, 1, 0).add_assign_poly(&bump);
        }
    }
    let (tensor, symmetry) = lower_index(&connection);
    let mut potential = potential_from_tensor(&tensor, d)?;
    if config.fault == Some(FaultInjection::PerturbPotential) {
        let mut e = vec![0u32; n + 1];
        e[n] = 3;
        potential
            .phi
            .add_term(Monomial::from_exponents(&e).expect("small"), Rational::from_integer(1.into()));
    }
    timer.lap("frobenius");
    let sigma = sigma_extract(&potential);
    timer.lap("sigma");

    let mut checks: Vec<(CheckGroup, CheckOutcome)> = Vec::new();
    let mut push = |g: CheckGroup, c: CheckOutcome| checks.push((g, c));
    use CheckGroup::*;

    push(Pf, xi_picard_fuchs(&table));
    push(Pf, griffiths_check(&theta));
    push(Pf, transversality.outcome());
    push(
        Pf,
        CheckOutcome::from_witness("normalization-t-part", normalization_defect(&normalized)),
    );
    push(Pf, origin_check(&normalized));
    push(Pf, flat_coordinate_check(&psi_y, &normalized.omega0));
    for r in &connection.residuals {
        push(Pf, r.clone());
    }
    push(Pf, origin_structure_check(&connection));
    push(Pf, small_quantum_check(&connection, connection.valid_degree));

    for c in verify_flatness(&connection) {
        push(Flatness, c);
    }
    push(Flatness, symmetry);

    for c in euler_checks(&psi_y, &connection)? {
        push(Euler, c);
    }
    for c in identity_check(&psi_y, Some(&connection))? {
        push(Identity, c);
    }
    push(Identity, instanton_y0_free(&potential));
    push(Wdvv, wdvv_check(&potential));
    for c in &sigma.checks {
        push(Sigma, c.clone());
    }
    timer.lap("checks");

    Ok(PipelineResult {
        config: config.clone(),
        theta,
        transversality,
        normalized,
        psi_y,
        connection,
        potential,
        sigma,
        checks,
        timings_ms: timer.laps,
        table,
    })
}

/// `(D★)^{n+1} ξ = ℏ^{-(n+1)} ξ` with `D★ = α − ℏ∂_ℏ/(n+1)`.
pub fn xi_picard_fuchs(table: &PeriodTable) -> CheckOutcome {
    let n = table.n();
    let window = HbarWindow::new(table.lo(), 0);
    let xi = match table.to_hvec(0, n + 1, 0, window) {
        Ok(v) => v,
        Err(e) => return CheckOutcome::fail("pf-xi", e.to_string()),
    };
    let mut lhs = xi.clone();
    for _ in 0..=n {
        lhs = d_star(&lhs);
    }
    let rhs = match xi.shift_hbar(-(n as i32 + 1)) {
        Ok(v) => v,
        Err(e) => return CheckOutcome::fail("pf-xi", e.to_string()),
    };
    let from = lhs.exact_from().max(rhs.exact_from());
    CheckOutcome::from_witness("pf-xi", lhs.first_difference(&rhs, (from, 0), 0))
}

/// `∂θ_j/∂t^a = ℏ^{-1} θ_{j+a}` for every available pair.
pub fn griffiths_check(theta: &ThetaFamily) -> CheckOutcome {
    let n = theta.n;
    let top = theta.window.j_max;
    let up_to = theta.max_degree.saturating_sub(1);
    for j in 0..theta.columns.len() {
        for a in 0..=n {
            let Some(target) = theta.columns.get(j + a) else { continue };
            let lhs = theta.column(j).partial(a);
            let rhs = match target.shift_hbar(-1) {
                Ok(v) => v,
                Err(e) => return CheckOutcome::fail("griffiths", e.to_string()),
            };
            let from = lhs.exact_from().max(rhs.exact_from());
            if let Some(diff) = lhs.first_difference(&rhs, (from, top), up_to) {
                return CheckOutcome::fail("griffiths", format!("∂{a}θ_{j} vs ℏ^-1 θ_{}: {diff}", j + a));
            }
        }
    }
    CheckOutcome::pass("griffiths")
}

/// `∂_0 (Φ − classical) = 0`.
pub fn instanton_y0_free(phi: &Potential) -> CheckOutcome {
    let classical = classical_cubic(phi.n, phi.max_degree());
    let inst = &phi.phi - &classical;
    let witness = inst
        .partial(0)
        .terms()
        .next()
        .map(|(m, c)| format!("∂0 of the instanton part has {c} at {:?}", m.exponents(phi.n + 1)));
    CheckOutcome::from_witness("instanton-y0-free", witness)
}

fn alpha_label(c: &AlphaPoly) -> String {
    let mut out = String::new();
    for (k, x) in c.coeffs().iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let sign = if x.is_negative() { "-" } else { "+" };
        let mag = x.abs();
        if out.is_empty() {
            out.push_str(if x.is_negative() { "-" } else { "" });
        } else {
            out.push_str(&format!(" {sign} "));
        }
        let coeff = if mag.is_one() && k > 0 { String::new() } else { mag.to_string() };
        match k {
            0 => out.push_str(&coeff),
            1 => out.push_str(&format!("{coeff}α")),
            _ => out.push_str(&format!("{coeff}α^{k}")),
        }
    }
    out
}

/// Reruns with ξ replaced by `c·ξ` and asserts `y(t)`, `A` and Φ are unchanged.
pub fn frame_invariance_test(config: &PipelineConfig, c: &AlphaPoly) -> Result<CheckOutcome> {
    if !c.is_unipotent() {
        return Err(Error::Config("frame change must have constant term 1".into()));
    }
    let base = run(&PipelineConfig {
        frame: None,
        ..config.clone()
    })?;
    let framed = run(&PipelineConfig {
        frame: Some(c.clone()),
        ..config.clone()
    })?;
    Ok(compare_runs(&format!("frame-invariance [{}]", alpha_label(c)), &base, &framed, false))
}

fn compare_runs(name: &str, a: &PipelineResult, b: &PipelineResult, compare_psi: bool) -> CheckOutcome {
    if a.normalized.y_of_t != b.normalized.y_of_t {
        for k in 0..=a.config.n {
            let (p, q) = (a.normalized.y_of_t.component(k), b.normalized.y_of_t.component(k));
            if let Some((m, l, r)) = p.first_difference(q, p.max_degree()) {
                return CheckOutcome::fail(name, format!("y^{k}(t) at {:?}: {l} vs {r}", m.exponents(a.config.n + 1)));
            }
        }
        return CheckOutcome::fail(name, "y(t) differs");
    }
    let m = a.config.n + 1;
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                let (p, q) = (a.connection.a(x, y, z), b.connection.a(x, y, z));
                if p != q {
                    let w = p
                        .first_difference(q, p.max_degree().max(q.max_degree()))
                        .map(|(mono, l, r)| format!("{:?}: {l} vs {r}", mono.exponents(m)))
                        .unwrap_or_else(|| "truncation metadata".into());
                    return CheckOutcome::fail(name, format!("A^{z}_{x}{y} at {w}"));
                }
            }
        }
    }
    if a.potential != b.potential {
        let w = a
            .potential
            .phi
            .first_difference(&b.potential.phi, a.potential.max_degree())
            .map(|(mono, l, r)| format!("{:?}: {l} vs {r}", mono.exponents(m)))
            .unwrap_or_else(|| "truncation metadata".into());
        return CheckOutcome::fail(name, format!("Φ at {w}"));
    }
    if compare_psi {
        let (pa, pb) = (&a.psi_y, &b.psi_y);
        let from = pa.exact_from().max(pb.exact_from());
        let top = pa.window().j_max.min(pb.window().j_max);
        if let Some(diff) = pa.first_difference(pb, (from, top), pa.max_degree()) {
            return CheckOutcome::fail(name, format!("Ψ(y) at {diff}"));
        }
    }
    CheckOutcome::pass(name)
}

/// A random unipotent `1 + c_1 α + … + c_n α^n` with small rational entries.
pub fn random_unipotent(n: usize, rng: &mut impl Rng) -> AlphaPoly {
    let mut coeffs = vec![Rational::from_integer(1.into())];
    for _ in 0..n {
        let num: i64 = rng.gen_range(-5..=5);
        let den: i64 = rng.gen_range(1..=4);
        coeffs.push(Rational::new(BigInt::from(num), BigInt::from(den)));
    }
    AlphaPoly::from_coeffs(coeffs)
}

/// The window-stability rerun: a deeper window must reproduce `y(t)`, `A`,
/// Φ and `Ψ(y)` on the common region.
pub fn stability_check(base: &PipelineResult) -> Result<CheckOutcome> {
    let deeper = run(&base.config.deepened())?;
    Ok(compare_runs("window-stability", base, &deeper, true))
}

/// Checks from `base` in the requested groups, plus the frame-invariance
/// (three seeded random frames) and stability reruns when requested.
pub fn property_suite(base: &PipelineResult, groups: &[CheckGroup], seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut out = base.checks_in(groups);
    if groups.contains(&CheckGroup::Frame) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut framed: Vec<AlphaPoly> = Vec::new();
        while framed.len() < 3 {
            let c = random_unipotent(base.config.n, &mut rng);
            if c != AlphaPoly::one(base.config.n) && !framed.contains(&c) {
                framed.push(c);
            }
        }
        for c in framed {
            let run_framed = run(&PipelineConfig {
                frame: Some(c.clone()),
                ..base.config.clone()
            })?;
            out.push(compare_runs(
                &format!("frame-invariance [{}]", alpha_label(&c)),
                base,
                &run_framed,
                false,
            ));
        }
    }
    if groups.contains(&CheckGroup::Stability) {
        out.push(stability_check(base)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rational::{int, rat};

    #[test]
    fn config_validation() {
        assert!(PipelineConfig::new(2, 2).validate().is_err());
        assert!(PipelineConfig::new(0, 4).validate().is_err());
        assert!(PipelineConfig::new(2, 3).validate().is_ok());
        let w = PipelineConfig::new(2, 11).window();
        assert_eq!((w.j_min, w.j_max), (-41, 17));
    }

    #[test]
    fn cp1_run_passes_every_check() {
        let r = run(&PipelineConfig::new(1, 5)).unwrap();
        for (g, c) in &r.checks {
            assert!(c.passed, "{g}: {c}");
        }
        assert_eq!(r.sigma.gw[&(1, vec![])], int(1));
    }

    #[test]
    fn cp2_lines_and_conics() {
        let r = run(&PipelineConfig::new(2, 5)).unwrap();
        for (g, c) in &r.checks {
            assert!(c.passed, "{g}: {c}");
        }
        assert_eq!(r.sigma.gw[&(1, vec![2])], int(1));
        assert_eq!(r.sigma.gw[&(2, vec![5])], int(1));
    }

    #[test]
    fn frame_change_is_invisible() {
        let cfg = PipelineConfig::new(2, 4);
        let c = AlphaPoly::from_coeffs(vec![int(1), int(3), rat(-1, 2)]);
        assert!(frame_invariance_test(&cfg, &c).unwrap().passed);
        assert!(frame_invariance_test(&cfg, &AlphaPoly::one(2)).unwrap().passed);
        assert!(frame_invariance_test(&cfg, &AlphaPoly::from_integers(2, &[2, 1, 0])).is_err());
    }

    #[test]
    fn faults_surface_as_failures() {
        let mut cfg = PipelineConfig::new(2, 4);
        cfg.fault = Some(FaultInjection::PerturbPotential);
        let r = run(&cfg).unwrap();
        let failed: Vec<_> = r.checks.iter().filter(|(_, c)| !c.passed).map(|(_, c)| c.name.clone()).collect();
        assert!(failed.contains(&"wdvv".to_string()), "{failed:?}");

        cfg.fault = Some(FaultInjection::PerturbConnection);
        match run(&cfg) {
            Ok(r) => assert!(r.checks.iter().any(|(_, c)| !c.passed)),
            Err(e) => assert!(matches!(e, Error::Integrability(_))),
        }
    }

    #[test]
    fn small_window_overflows() {
        let mut cfg = PipelineConfig::new(2, 5);
        cfg.window_top = Some(4);
        let err = run(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 3, "{err}");
    }
}

//! Run configuration, JSON/CSV reports and the three commands behind the
//! binary.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::check::CheckOutcome;
use crate::error::{Error, Result};
use crate::oracle::{compare, kontsevich_cp2, oracle_potential, reconstruct, GWTable};
use crate::frobenius::wdvv_check;
use crate::pipeline::{property_suite, run, CheckGroup, FaultInjection, PipelineConfig};
use crate::series::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Compute,
    Gw,
    Verify,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    pub degree: u32,
    pub dmax: Option<u32>,
    pub hbar_depth: Option<i32>,
    pub window_top: Option<i32>,
    pub checks: Vec<CheckGroup>,
    pub compare_oracle: bool,
    pub seed: u64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub timings: bool,
    pub fault: Option<FaultInjection>,
}

impl RunConfig {
    pub fn new(command: Command, n: usize, degree: u32) -> Self {
        RunConfig {
            command,
            n,
            degree,
            dmax: None,
            hbar_depth: None,
            window_top: None,
            checks: CheckGroup::ALL.to_vec(),
            compare_oracle: false,
            seed: 0,
            format: OutputFormat::Json,
            out: None,
            timings: false,
            fault: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::Config("--n must be at least 1".into()));
        }
        match self.command {
            Command::Gw => {
                if self.dmax.unwrap_or(1) < 1 {
                    return Err(Error::Config("--dmax must be at least 1".into()));
                }
                Ok(())
            }
            _ => self.pipeline().validate(),
        }
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            hbar_depth: self.hbar_depth,
            window_top: self.window_top,
            fault: self.fault,
            ..PipelineConfig::new(self.n, self.degree)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowEcho {
    pub j_min: i32,
    pub j_max: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub command: Command,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub degree: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dmax: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub window: Option<WindowEcho>,
    pub checks: Vec<CheckGroup>,
    pub compare_oracle: bool,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GwEntry {
    pub d: u32,
    pub m: Vec<u32>,
    #[serde(rename = "N", with = "crate::series::rational::serde_string")]
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
}

impl From<&CheckOutcome> for CheckRecord {
    fn from(c: &CheckOutcome) -> Self {
        CheckRecord {
            name: c.name.clone(),
            status: if c.passed { Status::Pass } else { Status::Fail },
            witness: c.witness.clone(),
        }
    }
}

/// Window actually used, how far Ψ is exact, and the rerun window when the
/// stability check ran.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stability {
    pub window: WindowEcho,
    pub table_bottom: i32,
    pub psi_exact_from: i32,
    pub psi_term_top: i32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rerun_window: Option<WindowEcho>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub config: ConfigEcho,
    pub gw: Vec<GwEntry>,
    pub checks: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub phi_coefficients: Option<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stability: Option<Stability>,
    pub timings_ms: BTreeMap<String, u128>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// Header `d,m_2,…,m_n,N`, one row per invariant.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["d".to_string()];
        header.extend((2..=self.config.n).map(|k| format!("m_{k}")));
        header.push("N".into());
        w.write_record(&header)?;
        for e in &self.gw {
            let mut row = vec![e.d.to_string()];
            row.extend(e.m.iter().map(u32::to_string));
            row.push(e.value.to_string());
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }

    /// Writes to `path`, or to stdout when `None`.
    pub fn write(&self, format: OutputFormat, path: Option<&PathBuf>) -> Result<()> {
        let text = self.render(format)?;
        match path {
            Some(p) => std::fs::write(p, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn gw_entries(map: &BTreeMap<(u32, Vec<u32>), Rational>) -> Vec<GwEntry> {
    map.iter()
        .map(|((d, m), v)| GwEntry {
            d: *d,
            m: m.clone(),
            value: v.clone(),
        })
        .collect()
}

fn echo(cfg: &RunConfig) -> ConfigEcho {
    let pipeline = cfg.command != Command::Gw;
    let window = pipeline.then(|| {
        let w = cfg.pipeline().window();
        WindowEcho {
            j_min: w.j_min,
            j_max: w.j_max,
        }
    });
    ConfigEcho {
        command: cfg.command,
        n: cfg.n,
        degree: pipeline.then_some(cfg.degree),
        dmax: if pipeline { None } else { Some(cfg.dmax.unwrap_or(1)) },
        window,
        checks: if pipeline { cfg.checks.clone() } else { Vec::new() },
        compare_oracle: cfg.compare_oracle,
        seed: cfg.seed,
    }
}

/// Largest instanton degree whose invariants can appear at t-degree `degree`.
pub fn reachable_degree(n: usize, degree: u32) -> u32 {
    // Keys at degree d have Σ m_k >= ((n+1)d + n − 3)/(n−1) for n >= 2.
    if n == 1 {
        return 1;
    }
    let mut d = 1;
    while GWTable::admissible_keys(n, d + 1).iter().any(|m| m.iter().sum::<u32>() <= degree) {
        d += 1;
    }
    d
}

fn oracle_checks(cfg: &RunConfig, mirror: &crate::frobenius::Potential) -> Result<Vec<CheckOutcome>> {
    let d_max = reachable_degree(cfg.n, cfg.degree);
    let table = reconstruct(cfg.n, d_max)?;
    let oracle = oracle_potential(&table, cfg.degree)?;
    let mut out = vec![table.invariants(), compare(mirror, &oracle).outcome()];
    let mut w = wdvv_check(&oracle);
    w.name = "oracle-wdvv".into();
    out.push(w);
    Ok(out)
}

/// Mirror pipeline, requested checks, and optionally the oracle comparison.
pub fn cmd_compute(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let base = run(&cfg.pipeline())?;
    let mut checks = property_suite(&base, &cfg.checks, cfg.seed)?;
    if cfg.compare_oracle {
        checks.extend(oracle_checks(cfg, &base.potential)?);
    }
    let nv = cfg.n + 1;
    let phi = base
        .potential
        .phi
        .terms()
        .map(|(m, c)| {
            let key = m.exponents(nv).iter().map(u32::to_string).collect::<Vec<_>>().join(",");
            (key, c.to_string())
        })
        .collect();
    let w = base.normalized.diagnostics.window;
    let rerun_window = cfg.checks.contains(&CheckGroup::Stability).then(|| {
        let d = base.config.deepened().window();
        WindowEcho {
            j_min: d.j_min,
            j_max: d.j_max,
        }
    });
    Ok(Report {
        config: echo(cfg),
        gw: gw_entries(&base.sigma.gw),
        checks: checks.iter().map(CheckRecord::from).collect(),
        phi_coefficients: Some(phi),
        stability: Some(Stability {
            window: WindowEcho {
                j_min: w.j_min,
                j_max: w.j_max,
            },
            table_bottom: base.normalized.diagnostics.table_bottom,
            psi_exact_from: base.normalized.diagnostics.exact_from,
            psi_term_top: base.normalized.diagnostics.psi_term_top,
            rerun_window,
        }),
        timings_ms: if cfg.timings {
            base.timings_ms.iter().cloned().collect()
        } else {
            BTreeMap::new()
        },
    })
}

/// Oracle only: the reconstructed invariants through `dmax`.
pub fn cmd_gw(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let start = std::time::Instant::now();
    let d_max = cfg.dmax.unwrap_or(1);
    let table = reconstruct(cfg.n, d_max)?;
    let mut checks = vec![table.invariants(), table.integrality()];
    if cfg.n == 2 {
        let k = kontsevich_cp2(d_max);
        let witness = (1..=d_max).find_map(|d| {
            let a = table.get(d, &[3 * d - 1]);
            (a != k.get(&d)).then(|| format!("d={d}: WDVV {a:?} vs recursion {:?}", k.get(&d)))
        });
        checks.push(CheckOutcome::from_witness("kontsevich-cp2-agreement", witness));
    }
    let mut timings = BTreeMap::new();
    if cfg.timings {
        timings.insert("reconstruct".into(), start.elapsed().as_millis());
    }
    Ok(Report {
        config: echo(cfg),
        gw: gw_entries(&table.entries),
        checks: checks.iter().map(CheckRecord::from).collect(),
        phi_coefficients: None,
        stability: None,
        timings_ms: timings,
    })
}

/// Full property suite plus the oracle comparison.
pub fn cmd_verify(cfg: &RunConfig) -> Result<Report> {
    let mut cfg = cfg.clone();
    cfg.compare_oracle = true;
    let mut report = cmd_compute(&cfg)?;
    report.phi_coefficients = None;
    report.config.command = Command::Verify;
    if cfg.n == 2 {
        let table = reconstruct(2, 5)?;
        let k = kontsevich_cp2(5);
        let agree = (1..=5u32).all(|d| table.get(d, &[3 * d - 1]) == k.get(&d));
        report.checks.push(CheckRecord::from(&CheckOutcome::from_witness(
            "kontsevich-cp2-agreement",
            (!agree).then_some("reconstruct(2, 5) differs from the CP² recursion"),
        )));
    }
    Ok(report)
}

pub fn execute(cfg: &RunConfig) -> Result<Report> {
    match cfg.command {
        Command::Compute => cmd_compute(cfg),
        Command::Gw => cmd_gw(cfg),
        Command::Verify => cmd_verify(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gw_csv_rows() {
        let mut cfg = RunConfig::new(Command::Gw, 2, 3);
        cfg.dmax = Some(4);
        let r = cmd_gw(&cfg).unwrap();
        assert!(r.passed());
        let csv = r.to_csv().unwrap();
        assert_eq!(csv, "d,m_2,N\n1,2,1\n2,5,1\n3,8,12\n4,11,620\n");

        let mut cfg1 = RunConfig::new(Command::Gw, 1, 3);
        cfg1.dmax = Some(3);
        assert_eq!(cmd_gw(&cfg1).unwrap().to_csv().unwrap(), "d,N\n1,1\n");
    }

    #[test]
    fn json_round_trip() {
        let mut cfg = RunConfig::new(Command::Compute, 1, 4);
        cfg.checks = vec![CheckGroup::Wdvv, CheckGroup::Sigma];
        cfg.compare_oracle = true;
        let r = cmd_compute(&cfg).unwrap();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        let text = r.to_json().unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert!(text.contains("\"timings_ms\": {}"));
        assert!(text.contains("\"N\": \"1\""));
    }

    #[test]
    fn degree_below_three_is_a_config_error() {
        let cfg = RunConfig::new(Command::Compute, 2, 2);
        let err = cmd_compute(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn reachable_degrees() {
        assert_eq!(reachable_degree(2, 11), 4);
        assert_eq!(reachable_degree(2, 10), 3);
        assert_eq!(reachable_degree(3, 5), 2);
        assert_eq!(reachable_degree(1, 6), 1);
    }
}

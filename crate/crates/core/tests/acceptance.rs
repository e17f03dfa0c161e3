//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::process::ExitCode;
use std::time::Instant;

use cpn_mirror::frobenius::{origin_structure_check, small_quantum_check, wdvv_check};
use cpn_mirror::oracle::{compare, kontsevich_cp2, oracle_potential, reconstruct};
use cpn_mirror::pipeline::{property_suite, run, CheckGroup, PipelineConfig, PipelineResult};
use cpn_mirror::report::reachable_degree;
use cpn_mirror::series::rational::int;
use cpn_mirror::Result;

struct Line {
    id: &'static str,
    passed: bool,
    detail: String,
}

fn line(id: &'static str, outcome: Result<(bool, String)>) -> Line {
    match outcome {
        Ok((passed, detail)) => Line { id, passed, detail },
        Err(e) => Line {
            id,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn against_oracle(r: &PipelineResult) -> Result<(bool, String)> {
    let n = r.config.n;
    let d = r.config.degree;
    let table = reconstruct(n, reachable_degree(n, d))?;
    let oracle = oracle_potential(&table, d)?;
    let cmp = compare(&r.potential, &oracle);
    let terms = r.potential.phi.len();
    Ok(match cmp.discrepancies.first() {
        None => (true, format!("Φ equals the oracle through degree {d} ({terms} coefficients)")),
        Some(x) => (false, format!("{} discrepancies, first {x}", cmp.discrepancies.len())),
    })
}

fn expect_gw(r: &PipelineResult, expected: &[((u32, Vec<u32>), i64)]) -> (bool, String) {
    let mut parts = Vec::new();
    let mut ok = true;
    for ((d, m), v) in expected {
        let got = r.sigma.gw.get(&(*d, m.clone()));
        ok &= got == Some(&int(*v));
        parts.push(format!(
            "N({d};{m:?})={}",
            got.map_or("missing".to_string(), |g| g.to_string())
        ));
    }
    (ok, parts.join(" "))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let configs = [(1usize, 6u32), (2, 11), (2, 14), (3, 5)];
    let runs: Vec<Result<PipelineResult>> = std::thread::scope(|s| {
        let handles: Vec<_> = configs
            .iter()
            .map(|&(n, d)| s.spawn(move || run(&PipelineConfig::new(n, d))))
            .collect();
        handles.into_iter().map(|h| h.join().expect("run thread")).collect()
    });
    let get = |i: usize| runs[i].as_ref().map_err(|e| cpn_mirror::Error::Config(e.to_string()));

    let mut lines = Vec::new();

    lines.push(line("1 CP^1 n=1 D=6", get(0).and_then(against_oracle)));

    lines.push(line(
        "2 CP^2 n=2 D=11",
        get(1).and_then(|r| {
            let (ok, gw) = expect_gw(
                r,
                &[((1, vec![2]), 1), ((2, vec![5]), 1), ((3, vec![8]), 12), ((4, vec![11]), 620)],
            );
            let (eq, detail) = against_oracle(r)?;
            Ok((ok && eq, format!("{gw}; {detail}")))
        }),
    ));

    lines.push(line(
        "3 CP^2 n=2 D=14",
        get(2).and_then(|r| {
            let (ok, gw) = expect_gw(r, &[((5, vec![14]), 87304)]);
            let (eq, detail) = against_oracle(r)?;
            Ok((ok && eq, format!("{gw}; {detail}")))
        }),
    ));

    lines.push(line(
        "4 CP^3 n=3 D=5",
        get(3).and_then(|r| {
            let (ok, gw) = expect_gw(
                r,
                &[((1, vec![0, 2]), 1), ((1, vec![2, 1]), 1), ((1, vec![4, 0]), 2)],
            );
            let (eq, detail) = against_oracle(r)?;
            Ok((ok && eq, format!("{gw}; {detail}")))
        }),
    ));

    lines.push(line(
        "5 A(0) for n=1,2,3",
        (|| {
            let mut parts = Vec::new();
            let mut ok = true;
            for i in [0, 1, 3] {
                let r = get(i)?;
                let c = origin_structure_check(&r.connection);
                ok &= c.passed;
                parts.push(format!("n={}: {}", r.config.n, c));
            }
            Ok((ok, parts.join("; ")))
        })(),
    ));

    lines.push(line(
        "6 small quantum cohomology n=2",
        get(1).map(|r| {
            let c = small_quantum_check(&r.connection, 5);
            (c.passed, format!("p∘p∘p = e^(y1) through (y1)^5: {c}"))
        }),
    ));

    lines.push(line(
        "7 property suite",
        (|| {
            let suites: Vec<Result<Vec<_>>> = std::thread::scope(|s| {
                let handles: Vec<_> = (0..configs.len())
                    .map(|i| {
                        let r = get(i);
                        s.spawn(move || property_suite(r?, &CheckGroup::ALL, 7 + i as u64))
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("suite thread")).collect()
            });
            let mut total = 0;
            let mut failures = Vec::new();
            for ((n, d), checks) in configs.iter().zip(suites) {
                let checks = checks?;
                total += checks.len();
                for c in checks.into_iter().filter(|c| !c.passed) {
                    failures.push(format!("(n={n}, D={d}) {c}"));
                }
            }
            Ok(match failures.first() {
                None => (true, format!("{total} checks over {} configurations", configs.len())),
                Some(f) => (false, format!("{} failures, first {f}", failures.len())),
            })
        })(),
    ));

    lines.push(line(
        "8 oracle self-consistency",
        (|| {
            let table = reconstruct(2, 5)?;
            let k = kontsevich_cp2(5);
            let agree = (1..=5u32).all(|d| table.get(d, &[3 * d - 1]) == k.get(&d));
            let w2 = wdvv_check(&oracle_potential(&table, 14)?);
            let w3 = wdvv_check(&oracle_potential(&reconstruct(3, reachable_degree(3, 6))?, 6)?);
            Ok((
                agree && w2.passed && w3.passed,
                format!(
                    "reconstruct(2,5) = kontsevich_cp2(5): {agree}; WDVV on oracle CP^2 D=14: {}; CP^3 D=6: {}",
                    w2.passed, w3.passed
                ),
            ))
        })(),
    ));

    let mut all = true;
    for l in &lines {
        all &= l.passed;
        println!("{} criterion {}: {}", if l.passed { "PASS" } else { "FAIL" }, l.id, l.detail);
    }
    println!("acceptance finished in {:.1}s", start.elapsed().as_secs_f64());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Genus-0 invariants of the projective plane from the mirror side.
//!
//! `cargo run --release --example cp2_invariants -- 11`

use cpn_mirror::pipeline::{run, PipelineConfig};

fn main() -> anyhow::Result<()> {
    let degree: u32 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(8);
    let result = run(&PipelineConfig::new(2, degree))?;
    println!("CP^2 through t-degree {degree}");
    for ((d, m), value) in &result.sigma.gw {
        println!("  N({d}; m_2={}) = {value}", m[0]);
    }
    let failed: Vec<_> = result.checks.iter().filter(|(_, c)| !c.passed).collect();
    println!("{} checks, {} failed", result.checks.len(), failed.len());
    for (group, check) in failed {
        println!("  [{group}] {check}");
    }
    for (stage, ms) in &result.timings_ms {
        println!("  {stage}: {ms} ms");
    }
    Ok(())
}

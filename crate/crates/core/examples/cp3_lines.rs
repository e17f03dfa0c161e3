//! Lines and conics in CP³ from the mirror side.

use cpn_mirror::pipeline::{run, PipelineConfig};

fn main() -> anyhow::Result<()> {
    let result = run(&PipelineConfig::new(3, 5))?;
    println!("CP^3 invariants reachable at t-degree 5 (m_2 lines, m_3 points):");
    for ((d, m), value) in &result.sigma.gw {
        println!("  N({d}; m_2={}, m_3={}) = {value}", m[0], m[1]);
    }
    let failed = result.checks.iter().filter(|(_, c)| !c.passed).count();
    println!("{} checks, {failed} failed", result.checks.len());
    Ok(())
}

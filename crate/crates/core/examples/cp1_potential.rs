//! The potential of the projective line, compared with the oracle.

use cpn_mirror::oracle::{compare, oracle_potential, reconstruct};
use cpn_mirror::pipeline::{run, PipelineConfig};

fn main() -> anyhow::Result<()> {
    let degree = 6;
    let result = run(&PipelineConfig::new(1, degree))?;
    println!("Φ(y) for CP^1 through degree {degree}:");
    println!("  {}", result.potential.phi.display_with("y"));
    println!("mirror map y(t):");
    for k in 0..=1 {
        println!("  y{k} = {}", result.normalized.y_of_t.component(k));
    }
    let oracle = oracle_potential(&reconstruct(1, 1)?, degree)?;
    let cmp = compare(&result.potential, &oracle);
    println!("equal to the WDVV oracle: {}", cmp.equal());
    Ok(())
}

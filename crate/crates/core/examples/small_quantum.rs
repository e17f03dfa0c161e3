//! Structure constants of CP² restricted to the line y = (0, y¹, 0): the
//! class p satisfies p∘p∘p = e^{y¹}.

use cpn_mirror::frobenius::{connection_from_period, origin_structure_check, small_quantum_check};
use cpn_mirror::pipeline::{run, PipelineConfig};

fn main() -> anyhow::Result<()> {
    let result = run(&PipelineConfig::new(2, 7))?;
    let cd = connection_from_period(&result.psi_y)?;
    println!("{}", origin_structure_check(&cd));
    for c in 0..=2 {
        for b in 0..=2 {
            let line = cd.a(1, b, c).restrict_to(&[1]);
            if !line.is_zero() {
                println!("A^{c}_1{b} on the y1-line = {}", line.display_with("y"));
            }
        }
    }
    println!("{}", small_quantum_check(&cd, 5));
    Ok(())
}

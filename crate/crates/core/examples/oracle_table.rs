//! Invariants reconstructed from the associativity equations alone.

use cpn_mirror::oracle::{kontsevich_cp2, reconstruct};

fn main() -> anyhow::Result<()> {
    let cp2 = reconstruct(2, 6)?;
    let recursion = kontsevich_cp2(6);
    println!("CP^2: N_d from WDVV, and from the one-variable recursion");
    for d in 1..=6u32 {
        println!("  d={d}: {} {}", cp2.get(d, &[3 * d - 1]).unwrap(), recursion[&d]);
    }
    let cp3 = reconstruct(3, 2)?;
    println!("CP^3 (d; m_2, m_3):");
    for ((d, m), v) in &cp3.entries {
        println!("  N({d}; {}, {}) = {v}", m[0], m[1]);
    }
    Ok(())
}

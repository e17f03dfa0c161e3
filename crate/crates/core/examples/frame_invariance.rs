//! Rescaling ξ by a unipotent element of Q[α]/α^{n+1} leaves the mirror
//! map, the structure constants and the potential untouched.

use cpn_mirror::frobenius::frame_invariance_test;
use cpn_mirror::pipeline::{random_unipotent, PipelineConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> anyhow::Result<()> {
    let config = PipelineConfig::new(2, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..3 {
        let c = random_unipotent(2, &mut rng);
        println!("{}", frame_invariance_test(&config, &c)?);
    }
    Ok(())
}

//! Builds the JSON report the binary writes for `compute --compare-oracle`.

use cpn_mirror::pipeline::CheckGroup;
use cpn_mirror::report::{cmd_compute, Command, RunConfig};

fn main() -> anyhow::Result<()> {
    let mut cfg = RunConfig::new(Command::Compute, 2, 5);
    cfg.checks = vec![CheckGroup::Wdvv, CheckGroup::Sigma, CheckGroup::Stability];
    cfg.compare_oracle = true;
    let report = cmd_compute(&cfg)?;
    print!("{}", report.to_json()?);
    Ok(())
}

//! Success counts of MIHT over outer and inner threshold ranks.

use miht::bench::{run_st_grid, Experiment, ExperimentSpec};
use miht::RngSeed;

fn main() -> miht::Result<()> {
    let mut spec = ExperimentSpec::new(Experiment::StGrid, RngSeed(1));
    spec.trials = 5;
    print!("{}", run_st_grid(&spec)?.to_csv());
    Ok(())
}

//! Success counts against the number of measurements for each algorithm.

use miht::bench::{run_phase, Experiment, ExperimentSpec};
use miht::RngSeed;

fn main() -> miht::Result<()> {
    let mut spec = ExperimentSpec::new(Experiment::Phase, RngSeed(2));
    spec.trials = 5;
    print!("{}", run_phase(&spec)?.to_csv());
    Ok(())
}

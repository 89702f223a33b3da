//! Wall time and iterations against the dimension, at m = 8 r N.

use miht::bench::{run_timing, Experiment, ExperimentSpec};
use miht::RngSeed;

fn main() -> miht::Result<()> {
    let spec = ExperimentSpec::new(Experiment::Timing, RngSeed(4));
    print!("{}", run_timing(&spec)?.to_csv());
    Ok(())
}

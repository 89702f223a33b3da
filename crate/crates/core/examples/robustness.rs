//! Median and worst recovery error over a grid of noise levels.

use miht::bench::{run_robustness, Algorithm, Experiment, ExperimentSpec};
use miht::RngSeed;

fn main() -> miht::Result<()> {
    let mut spec = ExperimentSpec::new(Experiment::Robustness, RngSeed(3));
    spec.trials = 5;
    spec.max_iter = 200;
    spec.algorithms = vec![Algorithm::MihtDefault, Algorithm::Niht];
    print!("{}", run_robustness(&spec)?.to_csv());
    Ok(())
}

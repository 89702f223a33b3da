use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use miht::bench::{self, Experiment, ExperimentSpec, PlantedInstance};
use miht::recover::StepsizePolicy;
use miht::{miht, DenseMatrix, Error, InnerThreshold, MeasurementMap, MihtConfig, RngSeed};

#[derive(Parser)]
#[command(name = "miht", version, about = "Low-rank recovery from rank-one measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recover one matrix, planted or loaded from files.
    Recover(RecoverArgs),
    /// Success counts over the (s, t) grid.
    StGrid(ExperimentArgs),
    /// Success counts against the number of measurements.
    Phase(ExperimentArgs),
    /// Recovery error against the l1 norm of the noise.
    Robustness(ExperimentArgs),
    /// Wall time against the dimension.
    Timing(ExperimentArgs),
    /// Estimated RRIP constants of dense maps against m.
    RripCurve(ExperimentArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    /// Flat key=value file; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    n1: Option<String>,
    #[arg(long)]
    n2: Option<String>,
    /// Sets both N1 and N2.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    r: Option<String>,
    /// Comma-separated grid.
    #[arg(long = "m-values", alias = "m")]
    m_values: Option<String>,
    #[arg(long)]
    n_values: Option<String>,
    #[arg(long)]
    sampling_factor: Option<String>,
    #[arg(long)]
    s_values: Option<String>,
    /// Comma-separated ranks or ALL.
    #[arg(long)]
    t_values: Option<String>,
    #[arg(long)]
    noise_l1_values: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    success_threshold: Option<String>,
    #[arg(long)]
    algorithms: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    max_iter: Option<String>,
    #[arg(long)]
    iht_mu: Option<String>,
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    workers: Option<String>,
}

impl ExperimentArgs {
    fn overrides(&self) -> Vec<(&'static str, &String)> {
        let fields = [
            ("n1", &self.n1),
            ("n2", &self.n2),
            ("n", &self.n),
            ("r", &self.r),
            ("m_values", &self.m_values),
            ("n_values", &self.n_values),
            ("sampling_factor", &self.sampling_factor),
            ("s_values", &self.s_values),
            ("t_values", &self.t_values),
            ("noise_l1_values", &self.noise_l1_values),
            ("trials", &self.trials),
            ("success_threshold", &self.success_threshold),
            ("algorithms", &self.algorithms),
            ("gamma", &self.gamma),
            ("max_iter", &self.max_iter),
            ("iht_mu", &self.iht_mu),
            ("dist", &self.dist),
            ("samples", &self.samples),
            ("workers", &self.workers),
        ];
        fields.into_iter().filter_map(|(k, v)| v.as_ref().map(|v| (k, v))).collect()
    }

    fn spec(&self, experiment: Experiment) -> Result<ExperimentSpec, Error> {
        let mut spec = ExperimentSpec::new(experiment, RngSeed(0));
        let mut seeded = false;
        if let Some(path) = &self.config {
            let pairs = bench::parse_config(&std::fs::read_to_string(path)?)?;
            seeded = pairs.iter().any(|(k, _)| k == "seed");
            for (k, v) in pairs {
                spec.set(&k, &v)?;
            }
        }
        for (k, v) in self.overrides() {
            spec.set(k, v)?;
        }
        if let Some(seed) = self.seed {
            spec.seed = RngSeed(seed);
            seeded = true;
        }
        if !seeded {
            return Err(Error::Parameter(String::from("--seed is required")));
        }
        if let Some(out) = &self.out {
            spec.output_path = Some(out.clone());
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Args)]
struct RecoverArgs {
    /// Seed of the planted instance.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 20)]
    n1: usize,
    #[arg(long, default_value_t = 20)]
    n2: usize,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long, default_value_t = 400)]
    m: usize,
    /// l1 norm of the planted measurement error.
    #[arg(long, default_value_t = 0.0)]
    noise_l1: f64,
    /// Load the measurement map instead of planting one.
    #[arg(long, requires = "y")]
    map: Option<PathBuf>,
    /// Measurements, one value per line.
    #[arg(long, requires = "map")]
    y: Option<PathBuf>,
    #[arg(long)]
    s: Option<usize>,
    /// Inner threshold rank or ALL.
    #[arg(long, default_value = "ALL")]
    t: InnerThreshold,
    #[arg(long, default_value_t = miht::recover::DEFAULT_GAMMA)]
    gamma: f64,
    /// Use the fixed stepsize ||r||_1 / beta^2.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = miht::recover::DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Stop when the sufficient condition on the final direction holds.
    #[arg(long)]
    condsri_stop: bool,
    /// Trace CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Final iterate as CSV.
    #[arg(long)]
    estimate: Option<PathBuf>,
    /// Save the planted map in text form.
    #[arg(long)]
    save_map: Option<PathBuf>,
}

fn recover(args: &RecoverArgs) -> Result<(), Error> {
    let (map, y, truth) = match (&args.map, &args.y) {
        (Some(map_path), Some(y_path)) => {
            let map = MeasurementMap::read(map_path)?;
            let y = DenseMatrix::read_csv(y_path)?.row_major();
            (map, y, None)
        }
        _ => {
            let seed = args.seed.ok_or_else(|| Error::Parameter(String::from("--seed is required for a planted instance")))?;
            let inst = PlantedInstance::new(args.n1, args.n2, args.r, args.m, RngSeed(seed))?;
            let y = inst.measurements(args.noise_l1);
            (inst.map, y, Some(inst.truth))
        }
    };
    if let Some(path) = &args.save_map {
        map.write(path)?;
    }
    let mut cfg = MihtConfig::new(args.r)
        .with_s(args.s.unwrap_or(args.r))
        .with_t(args.t)
        .with_gamma(args.gamma)
        .with_max_iter(args.max_iter)
        .with_condsri_stop(args.condsri_stop);
    if let Some(beta) = args.beta {
        cfg.stepsize_policy = StepsizePolicy::Fixed { beta };
    }
    let result = miht(&map, &y, &cfg, truth.as_ref())?;
    println!("stop_reason={} iterations={}", result.stop_reason, result.iterations_used);
    if let Some(truth) = &truth {
        println!("relative_error={:e}", result.relative_error(truth));
    }
    if let Some(path) = &args.out {
        result.write_trace_csv(path)?;
    }
    if let Some(path) = &args.estimate {
        result.final_iterate.write_csv(path)?;
    }
    Ok(())
}

fn experiment(args: &ExperimentArgs, kind: Experiment) -> Result<(), Error> {
    let spec = args.spec(kind)?;
    let table = bench::run(&spec)?;
    match &spec.output_path {
        Some(path) => table.write(path)?,
        None => print!("{}", table.to_csv()),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Recover(args) => recover(args),
        Command::StGrid(args) => experiment(args, Experiment::StGrid),
        Command::Phase(args) => experiment(args, Experiment::Phase),
        Command::Robustness(args) => experiment(args, Experiment::Robustness),
        Command::Timing(args) => experiment(args, Experiment::Timing),
        Command::RripCurve(args) => experiment(args, Experiment::Rrip),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

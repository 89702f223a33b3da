use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::measure::Distribution;
use crate::recover::{InnerThreshold, DEFAULT_GAMMA, DEFAULT_MAX_ITER};
use crate::rng::RngSeed;

/// Relative Frobenius error at or below which a recovery counts as exact.
pub const DEFAULT_SUCCESS_THRESHOLD: f64 = 1e-4;

/// Generous sampling rate `m = 8 r N` for runs meant to succeed.
pub const DEFAULT_SAMPLING_FACTOR: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    StGrid,
    Phase,
    Timing,
    Robustness,
    Rrip,
}

impl Experiment {
    pub fn label(self) -> &'static str {
        match self {
            Experiment::StGrid => "st_grid",
            Experiment::Phase => "phase",
            Experiment::Timing => "timing",
            Experiment::Robustness => "robustness",
            Experiment::Rrip => "rrip",
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().replace('-', "_").as_str() {
            "st_grid" => Ok(Experiment::StGrid),
            "phase" => Ok(Experiment::Phase),
            "timing" => Ok(Experiment::Timing),
            "robustness" => Ok(Experiment::Robustness),
            "rrip" | "rrip_curve" => Ok(Experiment::Rrip),
            other => Err(Error::param(format!("unknown experiment {other:?}"))),
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// MIHT with `s = r`, `t = ALL`.
    MihtDefault,
    /// MIHT with `s = r`, `t = 2r`.
    MihtR2r,
    /// Classical IHT with a fixed stepsize.
    Iht,
    /// Normalized IHT.
    Niht,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::MihtDefault, Algorithm::MihtR2r, Algorithm::Iht, Algorithm::Niht];

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::MihtDefault => "miht_default",
            Algorithm::MihtR2r => "miht_r_2r",
            Algorithm::Iht => "iht",
            Algorithm::Niht => "niht",
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.label() == s.trim())
            .ok_or_else(|| Error::param(format!("unknown algorithm {s:?}")))
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Every knob of an experiment. Fields irrelevant to the chosen experiment
/// are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    pub n1: usize,
    pub n2: usize,
    pub r: usize,
    pub m_values: Vec<usize>,
    /// Dimension grid `N = N1 = N2` of the timing experiment.
    pub n_values: Vec<usize>,
    /// Timing runs use `m = sampling_factor · r · N`.
    pub sampling_factor: usize,
    pub s_values: Vec<usize>,
    pub t_values: Vec<InnerThreshold>,
    pub noise_l1_values: Vec<f64>,
    pub trials: usize,
    pub seed: RngSeed,
    pub success_threshold: f64,
    pub algorithms: Vec<Algorithm>,
    pub gamma: f64,
    pub max_iter: usize,
    /// Fixed stepsize of classical IHT; `None` means `1/m`, the natural
    /// scale for rank-one projections.
    pub iht_mu: Option<f64>,
    /// Distribution of the dense maps in the RRIP experiment.
    pub dist: Distribution,
    /// Monte-Carlo draws per RRIP estimate.
    pub samples: usize,
    /// Worker threads; 0 lets the pool decide.
    pub workers: usize,
    pub output_path: Option<PathBuf>,
}

impl ExperimentSpec {
    /// Desk-scale defaults for `experiment`.
    pub fn new(experiment: Experiment, seed: RngSeed) -> Self {
        let mut spec = ExperimentSpec {
            experiment,
            n1: 20,
            n2: 20,
            r: 2,
            m_values: vec![320],
            n_values: vec![10, 20, 40],
            sampling_factor: DEFAULT_SAMPLING_FACTOR,
            s_values: vec![2, 3, 4],
            t_values: vec![InnerThreshold::Rank(4), InnerThreshold::Rank(8), InnerThreshold::All],
            noise_l1_values: vec![0.01, 0.02, 0.04, 0.08],
            trials: 25,
            seed,
            success_threshold: DEFAULT_SUCCESS_THRESHOLD,
            algorithms: vec![Algorithm::MihtDefault, Algorithm::MihtR2r, Algorithm::Niht],
            gamma: DEFAULT_GAMMA,
            max_iter: DEFAULT_MAX_ITER,
            iht_mu: None,
            dist: Distribution::Gaussian,
            samples: 500,
            workers: 0,
            output_path: None,
        };
        match experiment {
            Experiment::StGrid => spec.algorithms = vec![Algorithm::MihtDefault],
            Experiment::Phase => spec.m_values = vec![80, 160, 240, 320, 400],
            Experiment::Robustness => spec.m_values = vec![400],
            Experiment::Timing => spec.trials = 5,
            Experiment::Rrip => {
                spec.n1 = 15;
                spec.n2 = 15;
                spec.r = 1;
                spec.m_values = vec![30, 60, 120, 240];
                spec.trials = 10;
            }
        }
        spec
    }

    pub fn min_dim(&self) -> usize {
        self.n1.min(self.n2)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 == 0 || self.n2 == 0 {
            return Err(Error::param("N1 and N2 must be positive"));
        }
        if self.r == 0 || self.r > self.min_dim() {
            return Err(Error::param(format!("need 1 <= r <= min(N1, N2), got r={}", self.r)));
        }
        if self.trials == 0 {
            return Err(Error::param("trials must be >= 1"));
        }
        if !(self.success_threshold > 0.0) {
            return Err(Error::param("success_threshold must be > 0"));
        }
        if !(self.gamma >= 1.0) {
            return Err(Error::param("gamma must be >= 1"));
        }
        if self.max_iter == 0 {
            return Err(Error::param("max_iter must be positive"));
        }
        let nonempty = |name: &str, len: usize| {
            if len == 0 {
                Err(Error::param(format!("{name} grid must be nonempty")))
            } else {
                Ok(())
            }
        };
        let n = self.min_dim();
        match self.experiment {
            Experiment::StGrid => {
                nonempty("m", self.m_values.len())?;
                nonempty("s", self.s_values.len())?;
                nonempty("t", self.t_values.len())?;
                if let Some(&s) = self.s_values.iter().find(|&&s| s < self.r || s > n) {
                    return Err(Error::param(format!("s={s} outside r..=min(N1, N2)")));
                }
                for t in &self.t_values {
                    if let InnerThreshold::Rank(t) = *t {
                        if t == 0 || t > n {
                            return Err(Error::param(format!("t={t} outside 1..=min(N1, N2)")));
                        }
                    }
                }
            }
            Experiment::Phase | Experiment::Robustness => {
                nonempty("m", self.m_values.len())?;
                nonempty("algorithm", self.algorithms.len())?;
                if self.experiment == Experiment::Robustness {
                    nonempty("noise", self.noise_l1_values.len())?;
                    if self.noise_l1_values.iter().any(|e| !(*e >= 0.0)) {
                        return Err(Error::param("noise levels must be >= 0"));
                    }
                }
            }
            Experiment::Timing => {
                nonempty("N", self.n_values.len())?;
                nonempty("algorithm", self.algorithms.len())?;
                if self.n_values.iter().any(|&v| v < 2 * self.r) {
                    return Err(Error::param("every N must be at least 2r"));
                }
                if self.sampling_factor == 0 {
                    return Err(Error::param("sampling_factor must be positive"));
                }
            }
            Experiment::Rrip => {
                nonempty("m", self.m_values.len())?;
                if self.samples < 2 {
                    return Err(Error::param("samples must be >= 2"));
                }
            }
        }
        if self.m_values.contains(&0) {
            return Err(Error::param("measurement counts must be positive"));
        }
        if let Some(mu) = self.iht_mu {
            if !(mu > 0.0) {
                return Err(Error::param("iht_mu must be > 0"));
            }
        }
        Ok(())
    }

    /// Applies one `key=value` setting. Keys match the CLI flag names with
    /// `_` in place of `-`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        match key.as_str() {
            "experiment" => self.experiment = value.parse()?,
            "n1" => self.n1 = parse_num(&key, value)?,
            "n2" => self.n2 = parse_num(&key, value)?,
            "n" => {
                self.n1 = parse_num(&key, value)?;
                self.n2 = self.n1;
            }
            "r" => self.r = parse_num(&key, value)?,
            "m" | "m_values" => self.m_values = parse_list(&key, value)?,
            "n_values" => self.n_values = parse_list(&key, value)?,
            "sampling_factor" => self.sampling_factor = parse_num(&key, value)?,
            "s_values" => self.s_values = parse_list(&key, value)?,
            "t_values" => self.t_values = parse_list(&key, value)?,
            "noise_l1_values" => self.noise_l1_values = parse_list(&key, value)?,
            "trials" => self.trials = parse_num(&key, value)?,
            "seed" => self.seed = RngSeed(parse_num(&key, value)?),
            "success_threshold" => self.success_threshold = parse_num(&key, value)?,
            "algorithms" => self.algorithms = parse_list(&key, value)?,
            "gamma" => self.gamma = parse_num(&key, value)?,
            "max_iter" => self.max_iter = parse_num(&key, value)?,
            "iht_mu" => self.iht_mu = Some(parse_num(&key, value)?),
            "dist" => self.dist = value.parse()?,
            "samples" => self.samples = parse_num(&key, value)?,
            "workers" => self.workers = parse_num(&key, value)?,
            "out" | "output_path" => self.output_path = Some(PathBuf::from(value)),
            other => return Err(Error::param(format!("unknown setting {other:?}"))),
        }
        Ok(())
    }

    /// Applies the settings of a flat `key=value` text: one or more pairs
    /// per line, `#` starts a comment line.
    pub fn apply_config(&mut self, text: &str) -> Result<()> {
        for (key, value) in parse_config(text)? {
            self.set(&key, &value)?;
        }
        Ok(())
    }

    /// Single-line `key=value` description of every setting.
    pub fn describe(&self) -> String {
        let join = |v: &[String]| v.join(",");
        let mut parts = vec![
            format!("experiment={}", self.experiment),
            format!("n1={}", self.n1),
            format!("n2={}", self.n2),
            format!("r={}", self.r),
            format!("m_values={}", join(&strings(&self.m_values))),
            format!("n_values={}", join(&strings(&self.n_values))),
            format!("sampling_factor={}", self.sampling_factor),
            format!("s_values={}", join(&strings(&self.s_values))),
            format!("t_values={}", join(&strings(&self.t_values))),
            format!("noise_l1_values={}", join(&strings(&self.noise_l1_values))),
            format!("trials={}", self.trials),
            format!("seed={}", self.seed),
            format!("success_threshold={}", self.success_threshold),
            format!("algorithms={}", join(&strings(&self.algorithms))),
            format!("gamma={}", self.gamma),
            format!("max_iter={}", self.max_iter),
            format!("dist={}", self.dist),
            format!("samples={}", self.samples),
        ];
        if let Some(mu) = self.iht_mu {
            parts.push(format!("iht_mu={mu}"));
        }
        format!("miht {}", parts.join(" "))
    }
}

fn strings<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::param(format!("invalid value {value:?} for {key}")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split([',', ';'])
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_num(key, s.trim()))
        .collect()
}

/// Splits a flat config text into `(key, value)` pairs in file order.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for token in line.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| Error::parse(idx + 1, format!("expected key=value, got {token:?}")))?;
            if key.is_empty() {
                return Err(Error::parse(idx + 1, "empty key"));
            }
            pairs.push((key.to_string(), value.to_string()));
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip_through_describe() {
        let mut spec = ExperimentSpec::new(Experiment::Phase, RngSeed(5));
        spec.set("m-values", "80,400").unwrap();
        spec.set("algorithms", "miht_default,niht").unwrap();
        spec.set("iht_mu", "0.5").unwrap();
        let line = spec.describe();
        let mut other = ExperimentSpec::new(Experiment::StGrid, RngSeed(0));
        other.apply_config(line.trim_start_matches("miht ")).unwrap();
        assert_eq!(other, spec);
    }

    #[test]
    fn config_errors() {
        let mut spec = ExperimentSpec::new(Experiment::Phase, RngSeed(5));
        assert!(spec.apply_config("bogus=1").is_err());
        assert!(spec.apply_config("trials").is_err());
        assert!(spec.apply_config("trials=x").is_err());
        assert!(spec.apply_config("# comment\n\ntrials=3").is_ok());
        assert_eq!(spec.trials, 3);
    }

    #[test]
    fn validation_rejects_bad_grids() {
        let mut spec = ExperimentSpec::new(Experiment::StGrid, RngSeed(1));
        spec.validate().unwrap();
        spec.s_values = vec![21];
        assert!(spec.validate().is_err());
        spec.s_values = vec![2];
        spec.t_values = vec![InnerThreshold::Rank(30)];
        assert!(spec.validate().is_err());
        spec.t_values = vec![];
        assert!(spec.validate().is_err());

        let mut spec = ExperimentSpec::new(Experiment::Phase, RngSeed(1));
        spec.trials = 0;
        assert!(spec.validate().is_err());
        spec.trials = 1;
        spec.success_threshold = 0.0;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn labels_parse_back() {
        for a in Algorithm::ALL {
            assert_eq!(a.label().parse::<Algorithm>().unwrap(), a);
        }
        assert_eq!("rrip-curve".parse::<Experiment>().unwrap(), Experiment::Rrip);
        assert_eq!("st-grid".parse::<Experiment>().unwrap(), Experiment::StGrid);
    }
}

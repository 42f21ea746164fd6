//! `key = value` experiment configuration.

use std::path::{Path, PathBuf};

use super::moments::MomentOrder;
use crate::distribution::SubspaceDistribution;
use crate::error::{Error, Result};
use crate::linalg::SeededRng;

const KEYS: [&str; 11] = [
    "dimension",
    "subspace_dim",
    "distribution",
    "x_true",
    "x0",
    "trials",
    "iterations",
    "s_list",
    "seed",
    "epsilon",
    "output",
];

/// Ground-truth signal.
#[derive(Debug, Clone, PartialEq)]
pub enum VectorSpec {
    Explicit(Vec<f64>),
    Ones,
    Zero,
    /// Uniform on the sphere, drawn from a dedicated stream of the seed.
    UnitRandom,
}

impl VectorSpec {
    pub fn parse(value: &str) -> Result<Self> {
        match value.trim() {
            "ones" => Ok(Self::Ones),
            "zero" | "zeros" => Ok(Self::Zero),
            "unit-random" => Ok(Self::UnitRandom),
            list => list
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::Config(format!("bad vector entry '{t}'")))
                })
                .collect::<Result<Vec<_>>>()
                .and_then(|v| {
                    if v.is_empty() {
                        Err(Error::Config("empty vector".into()))
                    } else {
                        Ok(Self::Explicit(v))
                    }
                }),
        }
    }

    pub fn resolve(&self, d: usize, seed: u64) -> Result<Vec<f64>> {
        match self {
            Self::Ones => Ok(vec![1.0; d]),
            Self::Zero => Ok(vec![0.0; d]),
            Self::UnitRandom => Ok(SeededRng::new(seed, u64::MAX).unit_vector(d)),
            Self::Explicit(v) if v.len() == d => Ok(v.clone()),
            Self::Explicit(v) => Err(Error::Config(format!(
                "vector has {} entries, dimension is {d}",
                v.len()
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dimension: usize,
    pub subspace_dim: Option<usize>,
    /// Distribution argument as given (builtin name or file path).
    pub distribution_spec: String,
    pub distribution: SubspaceDistribution,
    pub x_true: VectorSpec,
    pub x0: VectorSpec,
    pub trials: usize,
    pub iterations: usize,
    pub orders: Vec<MomentOrder>,
    pub seed: u64,
    pub epsilon: f64,
    pub output: Option<PathBuf>,
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse '{value}'")))
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(&str, &str)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", i + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(Error::Config(format!("line {}: unknown key '{key}'", i + 1)));
            }
            if entries.iter().any(|(k, _)| *k == key) {
                return Err(Error::Config(format!("line {}: duplicate key '{key}'", i + 1)));
            }
            entries.push((key, value));
        }
        let get = |key: &str| entries.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
        let require = |key: &str| get(key).ok_or_else(|| Error::Config(format!("missing key '{key}'")));

        let distribution_spec = require("distribution")?.to_string();
        let distribution = SubspaceDistribution::from_spec(&distribution_spec).map_err(|e| match e {
            Error::Config(m) => Error::Config(m),
            other => Error::Config(format!("distribution '{distribution_spec}': {other}")),
        })?;
        let dimension = match get("dimension") {
            Some(v) => parse_num("dimension", v)?,
            None => distribution.ambient_dim(),
        };
        if dimension != distribution.ambient_dim() {
            return Err(Error::Config(format!(
                "dimension {dimension} does not match the distribution (d = {})",
                distribution.ambient_dim()
            )));
        }
        let subspace_dim = get("subspace_dim").map(|v| parse_num("subspace_dim", v)).transpose()?;
        if let Some(k) = subspace_dim {
            if distribution.subspace_dim() != Some(k) {
                return Err(Error::Config(format!(
                    "subspace_dim {k} does not match the distribution"
                )));
            }
        }
        let trials: usize = parse_num("trials", require("trials")?)?;
        if trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        let epsilon: f64 = get("epsilon").map(|v| parse_num("epsilon", v)).transpose()?.unwrap_or(0.0);
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(Error::Config(format!("epsilon must be >= 0, got {epsilon}")));
        }
        let cfg = Self {
            dimension,
            subspace_dim,
            distribution_spec,
            distribution,
            x_true: VectorSpec::parse(get("x_true").unwrap_or("ones"))?,
            x0: VectorSpec::parse(get("x0").unwrap_or("zero"))?,
            trials,
            iterations: parse_num("iterations", require("iterations")?)?,
            orders: MomentOrder::parse_list(require("s_list")?)?,
            seed: get("seed").map(|v| parse_num("seed", v)).transpose()?.unwrap_or(0),
            epsilon,
            output: get("output").map(PathBuf::from),
        };
        cfg.x_true_vector()?;
        cfg.x0_vector()?;
        Ok(cfg)
    }

    pub fn x_true_vector(&self) -> Result<Vec<f64>> {
        self.x_true.resolve(self.dimension, self.seed)
    }

    pub fn x0_vector(&self) -> Result<Vec<f64>> {
        self.x0.resolve(self.dimension, self.seed ^ 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let cfg = ExperimentConfig::parse(
            "# circle\n\
             dimension = 2\n\
             subspace_dim = 1\n\
             distribution = invariant:1:2\n\
             x_true = 0.2296, 0.9361\n\
             trials = 10   # few\n\
             iterations = 5\n\
             s_list = 2,1,0.5,log\n\
             seed = 7\n\
             output = out.csv\n",
        )
        .unwrap();
        assert_eq!(cfg.dimension, 2);
        assert_eq!(cfg.x_true_vector().unwrap(), vec![0.2296, 0.9361]);
        assert_eq!(cfg.x0_vector().unwrap(), vec![0.0, 0.0]);
        assert_eq!(cfg.orders.len(), 4);
        assert_eq!(cfg.epsilon, 0.0);
        assert_eq!(cfg.output, Some(PathBuf::from("out.csv")));
    }

    #[test]
    fn rejects_bad_configs() {
        let base = "distribution = ronb:3\ntrials = 5\niterations = 2\ns_list = 1\n";
        assert!(ExperimentConfig::parse(base).is_ok());
        for extra in [
            "dimension = 4\n",
            "subspace_dim = 2\n",
            "colour = red\n",
            "trials = 3\n",
            "x_true = 1,2\n",
            "epsilon = -1\n",
            "no equals sign\n",
        ] {
            let r = ExperimentConfig::parse(&format!("{base}{extra}"));
            assert!(matches!(r, Err(Error::Config(_))), "{extra}");
        }
        assert!(ExperimentConfig::parse("distribution = ronb:3\n").is_err());
        assert!(matches!(
            ExperimentConfig::parse("distribution = nope.txt\ntrials=1\niterations=1\ns_list=1\n"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn unit_random_is_seeded() {
        let a = VectorSpec::UnitRandom.resolve(4, 3).unwrap();
        assert_eq!(a, VectorSpec::UnitRandom.resolve(4, 3).unwrap());
        assert!((crate::linalg::norm_sq(&a) - 1.0).abs() < 1e-12);
    }
}

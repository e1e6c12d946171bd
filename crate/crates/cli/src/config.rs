//! Scenario configuration from flat `key = value` pairs.
//!
//! Pairs come from an optional config file and from command-line flags;
//! later sources override earlier ones. Every key is checked against
//! [`KEYS`] so a typo is reported instead of silently ignored.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ztnd_core::aoa::{self, DEFAULT_MARGIN};
use ztnd_core::{
    AdaptiveCoefficientSpec, FeedbackForm, IntegratorConfig, Method, ModelKind, ModelSpec, NoiseModel, Station,
    Trajectory, Vector,
};

use crate::error::{CliError, CliResult};

/// Environment variable that supplies the default seed.
pub const SEED_ENV: &str = "ZTND_SEED";
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_OUTPUT: &str = "ztnd-out";

pub const KEYS: &[&str] = &[
    "scenario",
    "dim",
    "model",
    "models",
    "gamma",
    "xi.exponent",
    "xi.offset",
    "kappa.form",
    "kappa.base",
    "kappa.exponent",
    "kappa.offset",
    "t_c",
    "saturation",
    "noise.kind",
    "noise.level",
    "noise.slope",
    "noise.lower",
    "noise.upper",
    "noise.seed",
    "method",
    "step",
    "horizon",
    "record_every",
    "seed",
    "init",
    "output",
    "threshold",
    "tail_fraction",
    "aoa.stations",
    "aoa.trajectory",
    "aoa.margin",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    Example1,
    Aoa,
    ConstantProblem,
}

impl FromStr for ScenarioKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "example1" => Ok(ScenarioKind::Example1),
            "aoa" => Ok(ScenarioKind::Aoa),
            "constant_problem" => Ok(ScenarioKind::ConstantProblem),
            _ => Err(format!(
                "unknown scenario '{s}' (expected example1, aoa or constant_problem)"
            )),
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioKind::Example1 => "example1",
            ScenarioKind::Aoa => "aoa",
            ScenarioKind::ConstantProblem => "constant_problem",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    None,
    Constant,
    Linear,
    Random,
}

impl FromStr for NoiseKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(NoiseKind::None),
            "constant" => Ok(NoiseKind::Constant),
            "linear" => Ok(NoiseKind::Linear),
            "random" => Ok(NoiseKind::Random),
            _ => Err(format!(
                "unknown noise kind '{s}' (expected none, constant, linear or random)"
            )),
        }
    }
}

/// Noise settings before the residual dimension is known. Scalar levels
/// and slopes are broadcast to every component.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseConfig {
    pub kind: NoiseKind,
    pub level: Vec<f64>,
    pub slope: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
    pub seed: Option<u64>,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            kind: NoiseKind::None,
            level: vec![5.0],
            slope: vec![0.4],
            lower: 0.5,
            upper: 3.0,
            seed: None,
        }
    }
}

fn broadcast(values: &[f64], n: usize, key: &str) -> CliResult<Vector> {
    match values.len() {
        1 => Ok(Vector::filled(n, values[0])),
        len if len == n => Ok(Vector::new(values.to_vec())),
        len => Err(CliError::config(format!("{key}: expected 1 or {n} values, got {len}"))),
    }
}

impl NoiseConfig {
    /// Builds the noise model for an `n`-dimensional residual.
    pub fn model(&self, n: usize, default_seed: u64) -> CliResult<NoiseModel> {
        let nm = match self.kind {
            NoiseKind::None => NoiseModel::None,
            NoiseKind::Constant => NoiseModel::Constant(broadcast(&self.level, n, "noise.level")?),
            NoiseKind::Linear => NoiseModel::Linear(broadcast(&self.slope, n, "noise.slope")?),
            NoiseKind::Random => NoiseModel::bounded_random(self.lower, self.upper, self.seed.unwrap_or(default_seed))
                .map_err(|e| CliError::core("noise", e))?,
        };
        nm.validate().map_err(|e| CliError::core("noise", e))?;
        Ok(nm)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AoaConfig {
    pub stations: Vec<Station>,
    pub trajectory: Trajectory,
    pub margin: f64,
}

impl Default for AoaConfig {
    fn default() -> Self {
        AoaConfig {
            stations: aoa::default_stations(),
            trajectory: Trajectory::default(),
            margin: DEFAULT_MARGIN,
        }
    }
}

/// Figure-eight used by `aoa.trajectory = lissajous`.
pub fn lissajous() -> Trajectory {
    Trajectory::Lissajous {
        center: (0.0, 2.0),
        amplitude: (2.0, 1.0),
        frequency: (0.5, 1.0),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    /// Dimension of the constant problem.
    pub dim: usize,
    pub model: ModelSpec,
    /// Models for `compare`; empty means not given.
    pub models: Vec<ModelKind>,
    pub noise: NoiseConfig,
    pub integrator: IntegratorConfig,
    pub seed: u64,
    /// Explicit initial state; drawn from `seed` when absent.
    pub init: Option<Vec<f64>>,
    pub output: PathBuf,
    pub threshold: f64,
    pub tail_fraction: f64,
    pub aoa: AoaConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            scenario: ScenarioKind::Example1,
            dim: 2,
            model: ModelSpec::new(ModelKind::Aztnd),
            models: Vec::new(),
            noise: NoiseConfig::default(),
            integrator: IntegratorConfig::default(),
            seed: DEFAULT_SEED,
            init: None,
            output: PathBuf::from(DEFAULT_OUTPUT),
            threshold: ztnd_core::metrics::DEFAULT_THRESHOLD,
            tail_fraction: ztnd_core::metrics::DEFAULT_TAIL_FRACTION,
            aoa: AoaConfig::default(),
        }
    }
}

/// Ordered key/value pairs; inserting an existing key overrides it.
pub type Pairs = BTreeMap<String, String>;

/// Parses a flat config file: `key = value` per line, `#` starts a comment.
pub fn parse_pairs(text: &str, origin: &Path) -> CliResult<Pairs> {
    let mut pairs = Pairs::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::config(format!(
                "{}:{}: expected 'key = value', got '{line}'",
                origin.display(),
                lineno + 1
            )));
        };
        pairs.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(pairs)
}

pub fn read_pairs(path: &Path) -> CliResult<Pairs> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_pairs(&text, path)
}

/// Splits `key=value`, as given to `--set`.
pub fn split_assignment(s: &str) -> CliResult<(String, String)> {
    match s.split_once('=') {
        Some((k, v)) => Ok((k.trim().to_string(), v.trim().to_string())),
        None => Err(CliError::config(format!("expected key=value, got '{s}'"))),
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> CliResult<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::config(format!("{key} = '{value}': {e}")))
}

fn parse_list(key: &str, value: &str) -> CliResult<Vec<f64>> {
    value.split(',').map(|v| parse(key, v.trim())).collect()
}

fn parse_stations(value: &str) -> CliResult<Vec<Station>> {
    value
        .split(';')
        .map(|s| match parse_list("aoa.stations", s)?.as_slice() {
            &[x, y] => Ok(Station::new(x, y)),
            _ => Err(CliError::config(format!(
                "aoa.stations: expected 'x,y' per station, got '{s}'"
            ))),
        })
        .collect()
}

impl ScenarioConfig {
    /// Builds a config from pairs. `env_seed` is the value of
    /// [`SEED_ENV`], used when no `seed` key is present.
    pub fn from_pairs(pairs: &Pairs, env_seed: Option<&str>) -> CliResult<Self> {
        if let Some(unknown) = pairs.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(CliError::config(format!("unknown config key '{unknown}'")));
        }
        let mut cfg = ScenarioConfig::default();
        if let Some(s) = env_seed {
            cfg.seed = parse(SEED_ENV, s)?;
        }
        let mut adaptive = AdaptiveCoefficientSpec::default();
        let mut kappa_form = "exp".to_string();
        let mut kappa_base = 5.0;
        let mut kappa_exponent = 2.0;

        for (key, value) in pairs {
            let v = value.as_str();
            match key.as_str() {
                "scenario" => cfg.scenario = parse(key, v)?,
                "dim" => cfg.dim = parse(key, v)?,
                "model" => cfg.model.kind = parse(key, v)?,
                "models" => cfg.models = v.split(',').map(|m| parse(key, m.trim())).collect::<CliResult<_>>()?,
                "gamma" => cfg.model.gamma = parse(key, v)?,
                "xi.exponent" => adaptive.scale_exponent = parse(key, v)?,
                "xi.offset" => adaptive.scale_offset = parse(key, v)?,
                "kappa.form" => kappa_form = v.to_string(),
                "kappa.base" => kappa_base = parse(key, v)?,
                "kappa.exponent" => kappa_exponent = parse(key, v)?,
                "kappa.offset" => adaptive.feedback_offset = parse(key, v)?,
                "t_c" => cfg.model.t_c = parse(key, v)?,
                "saturation" => cfg.model.saturation_bound = parse(key, v)?,
                "noise.kind" => cfg.noise.kind = parse(key, v)?,
                "noise.level" => cfg.noise.level = parse_list(key, v)?,
                "noise.slope" => cfg.noise.slope = parse_list(key, v)?,
                "noise.lower" => cfg.noise.lower = parse(key, v)?,
                "noise.upper" => cfg.noise.upper = parse(key, v)?,
                "noise.seed" => cfg.noise.seed = Some(parse(key, v)?),
                "method" => cfg.integrator.method = parse::<Method>(key, v)?,
                "step" => cfg.integrator.step = parse(key, v)?,
                "horizon" => cfg.integrator.horizon = parse(key, v)?,
                "record_every" => cfg.integrator.record_every = parse(key, v)?,
                "seed" => cfg.seed = parse(key, v)?,
                "init" => cfg.init = Some(parse_list(key, v)?),
                "output" => cfg.output = PathBuf::from(v),
                "threshold" => cfg.threshold = parse(key, v)?,
                "tail_fraction" => cfg.tail_fraction = parse(key, v)?,
                "aoa.stations" => cfg.aoa.stations = parse_stations(v)?,
                "aoa.trajectory" => {
                    cfg.aoa.trajectory = match v {
                        "circle" => Trajectory::default(),
                        "lissajous" => lissajous(),
                        _ => {
                            return Err(CliError::config(format!(
                                "aoa.trajectory = '{v}': expected circle or lissajous"
                            )))
                        }
                    }
                }
                "aoa.margin" => cfg.aoa.margin = parse(key, v)?,
                _ => unreachable!("key list and match arms disagree on '{key}'"),
            }
        }

        adaptive.feedback_form = match kappa_form.as_str() {
            "exp" => FeedbackForm::Exponential { base: kappa_base },
            "power" => FeedbackForm::Power {
                exponent: kappa_exponent,
            },
            other => {
                return Err(CliError::config(format!(
                    "kappa.form = '{other}': expected exp or power"
                )))
            }
        };
        cfg.model.adaptive = adaptive;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        self.integrator
            .validate()
            .map_err(|e| CliError::core("integrator", e))?;
        if self.dim == 0 {
            return Err(CliError::config("dim must be positive"));
        }
        if !(self.threshold > 0.0) {
            return Err(CliError::config(format!(
                "threshold must be > 0, got {}",
                self.threshold
            )));
        }
        if !(self.tail_fraction > 0.0 && self.tail_fraction < 1.0) {
            return Err(CliError::config(format!(
                "tail_fraction must lie in (0, 1), got {}",
                self.tail_fraction
            )));
        }
        for kind in std::iter::once(self.model.kind).chain(self.models.iter().copied()) {
            ModelSpec { kind, ..self.model }
                .validate()
                .map_err(|e| CliError::core(format!("model {kind}"), e))?;
        }
        Ok(())
    }

    /// Model spec for `kind` sharing this config's parameters.
    pub fn spec_for(&self, kind: ModelKind) -> ModelSpec {
        ModelSpec { kind, ..self.model }
    }

    pub fn noise_seed(&self) -> u64 {
        self.noise.seed.unwrap_or(self.seed)
    }
}

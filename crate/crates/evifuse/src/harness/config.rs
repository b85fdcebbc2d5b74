//! Flat `section.key = value` configuration files.
//!
//! Lines are `key = value`; `#` starts a comment; blank lines are ignored;
//! later assignments win. Unknown keys are rejected by name. The full key
//! list is documented in the CLI's long help and in the README.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::fusion::FusionStrategy;
use crate::mapping::MappingStrategy;
use crate::toymodel::{PipelineConfig, SyntheticConfig};

/// External per-view CSV paths (used instead of the synthetic generator
/// when set).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExternalPaths {
    pub view_a: Option<PathBuf>,
    pub view_b: Option<PathBuf>,
    pub meta: Option<PathBuf>,
    pub test_view_a: Option<PathBuf>,
    pub test_view_b: Option<PathBuf>,
    pub test_meta: Option<PathBuf>,
}

impl ExternalPaths {
    pub fn train_set(&self) -> Option<(&PathBuf, &PathBuf)> {
        match (&self.view_a, &self.view_b) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        }
    }

    pub fn test_set(&self) -> Option<(&PathBuf, &PathBuf)> {
        match (&self.test_view_a, &self.test_view_b) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        }
    }
}

/// Everything an experiment run needs, resolved from defaults plus an
/// optional config file plus CLI overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n_features: usize,
    pub samples_per_class: usize,
    pub test_samples_per_class: usize,
    pub noise_sigma: [f64; 2],
    pub conflict_rate: f64,
    pub seed: u64,
    pub external: ExternalPaths,

    pub learning_rate: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub fusion: FusionStrategy,
    pub mapping: MappingStrategy,

    pub strategies: Vec<FusionStrategy>,
    pub density_bins: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_features: 8,
            samples_per_class: 40,
            test_samples_per_class: 25,
            noise_sigma: [1.0, 1.0],
            conflict_rate: 0.3,
            seed: 7,
            external: ExternalPaths::default(),
            learning_rate: 0.1,
            momentum: 0.9,
            weight_decay: 0.0,
            epochs: 200,
            batch_size: 0,
            fusion: FusionStrategy::Cmam,
            mapping: MappingStrategy::Uniform,
            strategies: vec![FusionStrategy::Cmam, FusionStrategy::AverageEvidence],
            density_bins: 20,
        }
    }
}

impl ExperimentConfig {
    /// Parses config text over the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply(text)?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    fn apply(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`, got `{raw}`", lineno + 1))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        self.validate()
    }

    /// Applies a single `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "dataset.n_features" => self.n_features = parse_num(key, value)?,
            "dataset.samples_per_class" => self.samples_per_class = parse_num(key, value)?,
            "dataset.test_samples_per_class" => {
                self.test_samples_per_class = parse_num(key, value)?
            }
            "dataset.noise_sigma" => {
                let s = parse_num(key, value)?;
                self.noise_sigma = [s, s];
            }
            "dataset.noise_sigma_a" => self.noise_sigma[0] = parse_num(key, value)?,
            "dataset.noise_sigma_b" => self.noise_sigma[1] = parse_num(key, value)?,
            "dataset.conflict_rate" => self.conflict_rate = parse_num(key, value)?,
            "dataset.seed" => self.seed = parse_num(key, value)?,
            "dataset.view_a_csv" => self.external.view_a = Some(value.into()),
            "dataset.view_b_csv" => self.external.view_b = Some(value.into()),
            "dataset.meta_csv" => self.external.meta = Some(value.into()),
            "dataset.test_view_a_csv" => self.external.test_view_a = Some(value.into()),
            "dataset.test_view_b_csv" => self.external.test_view_b = Some(value.into()),
            "dataset.test_meta_csv" => self.external.test_meta = Some(value.into()),
            "pipeline.learning_rate" => self.learning_rate = parse_num(key, value)?,
            "pipeline.momentum" => self.momentum = parse_num(key, value)?,
            "pipeline.weight_decay" => self.weight_decay = parse_num(key, value)?,
            "pipeline.epochs" => self.epochs = parse_num(key, value)?,
            "pipeline.batch_size" => self.batch_size = parse_num(key, value)?,
            "pipeline.fusion" => self.fusion = value.parse()?,
            "mapping.strategy" => self.mapping = value.parse()?,
            "experiment.strategies" => {
                let strategies: Vec<FusionStrategy> = value
                    .split(',')
                    .map(|s| s.trim().parse())
                    .collect::<Result<_>>()?;
                if strategies.is_empty() {
                    return Err(Error::Config(
                        "experiment.strategies must name at least one strategy".into(),
                    ));
                }
                self.strategies = strategies;
            }
            "report.density_bins" => self.density_bins = parse_num(key, value)?,
            other => {
                return Err(Error::Config(format!("unknown config key `{other}`")));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.synthetic_config(self.seed, self.samples_per_class).validate()?;
        self.pipeline_config().validate()?;
        if self.test_samples_per_class == 0 {
            return Err(Error::Config(
                "dataset.test_samples_per_class must be > 0".into(),
            ));
        }
        if self.density_bins == 0 {
            return Err(Error::Config("report.density_bins must be > 0".into()));
        }
        let mut seen = Vec::new();
        for s in &self.strategies {
            if seen.contains(s) {
                return Err(Error::Config(format!(
                    "experiment.strategies lists `{s}` twice"
                )));
            }
            seen.push(*s);
        }
        Ok(())
    }

    pub fn synthetic_config(&self, seed: u64, samples_per_class: usize) -> SyntheticConfig {
        SyntheticConfig {
            n_features: self.n_features,
            samples_per_class,
            noise_sigma: self.noise_sigma,
            conflict_rate: self.conflict_rate,
            seed,
        }
    }

    /// Train-split generator settings (seeded by `dataset.seed`).
    pub fn train_synthetic(&self) -> SyntheticConfig {
        self.synthetic_config(self.seed, self.samples_per_class)
    }

    /// Test-split generator settings, seeded independently of the train
    /// split by a fixed offset.
    pub fn test_synthetic(&self) -> SyntheticConfig {
        self.synthetic_config(self.seed.wrapping_add(1), self.test_samples_per_class)
    }

    pub fn pipeline_config(&self) -> PipelineConfig {
        PipelineConfig {
            learning_rate: self.learning_rate,
            momentum: self.momentum,
            weight_decay: self.weight_decay,
            epochs: self.epochs,
            batch_size: self.batch_size,
            fusion: self.fusion,
            mapping: self.mapping,
            seed: self.seed,
        }
    }

    /// The resolved configuration as config-file text (used to echo the
    /// effective settings into the experiment directory).
    pub fn to_config_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let _ = writeln!(out, "dataset.n_features = {}", self.n_features);
        let _ = writeln!(out, "dataset.samples_per_class = {}", self.samples_per_class);
        let _ = writeln!(
            out,
            "dataset.test_samples_per_class = {}",
            self.test_samples_per_class
        );
        let _ = writeln!(out, "dataset.noise_sigma_a = {}", self.noise_sigma[0]);
        let _ = writeln!(out, "dataset.noise_sigma_b = {}", self.noise_sigma[1]);
        let _ = writeln!(out, "dataset.conflict_rate = {}", self.conflict_rate);
        let _ = writeln!(out, "dataset.seed = {}", self.seed);
        for (key, path) in [
            ("dataset.view_a_csv", &self.external.view_a),
            ("dataset.view_b_csv", &self.external.view_b),
            ("dataset.meta_csv", &self.external.meta),
            ("dataset.test_view_a_csv", &self.external.test_view_a),
            ("dataset.test_view_b_csv", &self.external.test_view_b),
            ("dataset.test_meta_csv", &self.external.test_meta),
        ] {
            if let Some(p) = path {
                let _ = writeln!(out, "{key} = {}", p.display());
            }
        }
        let _ = writeln!(out, "pipeline.learning_rate = {}", self.learning_rate);
        let _ = writeln!(out, "pipeline.momentum = {}", self.momentum);
        let _ = writeln!(out, "pipeline.weight_decay = {}", self.weight_decay);
        let _ = writeln!(out, "pipeline.epochs = {}", self.epochs);
        let _ = writeln!(out, "pipeline.batch_size = {}", self.batch_size);
        let _ = writeln!(out, "pipeline.fusion = {}", self.fusion);
        let _ = writeln!(out, "mapping.strategy = {}", self.mapping);
        let strategies: Vec<&str> = self.strategies.iter().map(|s| s.name()).collect();
        let _ = writeln!(out, "experiment.strategies = {}", strategies.join(","));
        let _ = writeln!(out, "report.density_bins = {}", self.density_bins);
        out
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("key `{key}`: cannot parse `{value}`")))
}

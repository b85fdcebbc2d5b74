//! Synthetic two-view dataset generator.
//!
//! Each of the five fine classes owns a Gaussian cluster. View A means sit
//! on simplex vertices scaled by 2.0 (one vertex per fine class), so view A
//! separates all five classes. View B means depend only on the coarse class
//! (W / NREM / REM), so view B carries coarse structure only — an honest
//! easier task for the coarse heads. A configurable fraction of samples gets
//! one view resampled from a different class, producing genuinely
//! conflicting views while the label stays truthful.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::mapping::{coarse_class_of, FINE_CLASSES};

/// Number of fine classes; fixed by the class hierarchy.
pub const N_CLASSES: usize = FINE_CLASSES;

/// Scale applied to the simplex-vertex class means.
const MEAN_SCALE: f64 = 2.0;

/// Which raw view a conflict injection resampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum View {
    A,
    B,
}

impl View {
    pub fn name(&self) -> &'static str {
        match self {
            View::A => "a",
            View::B => "b",
        }
    }
}

/// Generator settings. `noise_sigma` is per view (A, B).
#[derive(Debug, Clone)]
pub struct SyntheticConfig {
    pub n_features: usize,
    pub samples_per_class: usize,
    pub noise_sigma: [f64; 2],
    pub conflict_rate: f64,
    pub seed: u64,
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_features < N_CLASSES {
            return Err(Error::Config(format!(
                "dataset.n_features must be >= {N_CLASSES} so every class gets its own simplex vertex, got {}",
                self.n_features
            )));
        }
        if self.samples_per_class == 0 {
            return Err(Error::Config("dataset.samples_per_class must be > 0".into()));
        }
        for (v, s) in ["a", "b"].iter().zip(self.noise_sigma) {
            if !s.is_finite() || s < 0.0 {
                return Err(Error::Config(format!(
                    "dataset.noise_sigma_{v} must be finite and >= 0, got {s}"
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.conflict_rate) {
            return Err(Error::Config(format!(
                "dataset.conflict_rate must lie in [0, 1], got {}",
                self.conflict_rate
            )));
        }
        Ok(())
    }
}

/// Per-sample conflict-injection metadata.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleMeta {
    pub conflicted: bool,
    pub view: Option<View>,
    pub resampled_class: Option<usize>,
}

impl SampleMeta {
    fn clean() -> Self {
        Self {
            conflicted: false,
            view: None,
            resampled_class: None,
        }
    }
}

/// Two aligned feature views with fine labels and conflict metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiViewDataset {
    pub view_a: Vec<Vec<f64>>,
    pub view_b: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub meta: Vec<SampleMeta>,
    pub n_features: usize,
}

impl MultiViewDataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// View A and view B features concatenated, the input of the multi-view
    /// heads.
    pub fn concat_features(&self, i: usize) -> Vec<f64> {
        let mut x = Vec::with_capacity(2 * self.n_features);
        x.extend_from_slice(&self.view_a[i]);
        x.extend_from_slice(&self.view_b[i]);
        x
    }

    /// Histogram of fine labels.
    pub fn class_counts(&self) -> [u64; N_CLASSES] {
        let mut counts = [0u64; N_CLASSES];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    pub fn conflicted_count(&self) -> usize {
        self.meta.iter().filter(|m| m.conflicted).count()
    }
}

fn view_a_mean(class: usize, d: usize) -> Vec<f64> {
    let mut m = vec![0.0; d];
    m[class] = MEAN_SCALE;
    m
}

fn view_b_mean(class: usize, d: usize) -> Vec<f64> {
    let mut m = vec![0.0; d];
    m[coarse_class_of(class)] = MEAN_SCALE;
    m
}

fn gaussian(rng: &mut ChaCha8Rng, mean: &[f64], sigma: f64) -> Vec<f64> {
    mean.iter()
        .map(|&m| {
            let n: f64 = rng.sample(StandardNormal);
            m + sigma * n
        })
        .collect()
}

/// Generates a dataset deterministically from the config seed. Exactly
/// `floor(conflict_rate * n)` samples are marked conflicting; each one has a
/// single view resampled from a uniformly chosen different class.
pub fn generate_dataset(cfg: &SyntheticConfig) -> Result<MultiViewDataset> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.samples_per_class * N_CLASSES;
    let d = cfg.n_features;
    let [sigma_a, sigma_b] = cfg.noise_sigma;

    let mut view_a = Vec::with_capacity(n);
    let mut view_b = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for class in 0..N_CLASSES {
        for _ in 0..cfg.samples_per_class {
            view_a.push(gaussian(&mut rng, &view_a_mean(class, d), sigma_a));
            view_b.push(gaussian(&mut rng, &view_b_mean(class, d), sigma_b));
            labels.push(class);
        }
    }

    let mut meta = vec![SampleMeta::clean(); n];
    let n_conflicted = (cfg.conflict_rate * n as f64).floor() as usize;
    // partial Fisher-Yates: the first n_conflicted entries are the selection
    let mut indices: Vec<usize> = (0..n).collect();
    for i in 0..n_conflicted {
        let j = rng.random_range(i..n);
        indices.swap(i, j);
    }
    let mut selected = indices[..n_conflicted].to_vec();
    selected.sort_unstable();

    for &s in &selected {
        let view = if rng.random_range(0..2u32) == 0 {
            View::A
        } else {
            View::B
        };
        let draw = rng.random_range(0..N_CLASSES - 1);
        let wrong = if draw >= labels[s] { draw + 1 } else { draw };
        match view {
            View::A => view_a[s] = gaussian(&mut rng, &view_a_mean(wrong, d), sigma_a),
            View::B => view_b[s] = gaussian(&mut rng, &view_b_mean(wrong, d), sigma_b),
        }
        meta[s] = SampleMeta {
            conflicted: true,
            view: Some(view),
            resampled_class: Some(wrong),
        };
    }

    Ok(MultiViewDataset {
        view_a,
        view_b,
        labels,
        meta,
        n_features: d,
    })
}

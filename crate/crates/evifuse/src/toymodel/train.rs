//! Linear softplus evidence heads and a deterministic gradient-descent
//! trainer, standing in for the deep extractors of a full system.
//!
//! Four heads share the two raw views: `f1` reads view A at fine (K=5)
//! granularity, `f2` reads the A+B concatenation at fine granularity, `f3`
//! reads view B at coarse (K=3) granularity, and `f4` reads the
//! concatenation at coarse granularity. Coarse heads train against coarse
//! labels (N1/N2/N3 collapsed to NREM); the mapping matrix enters only at
//! fusion time.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::fusion::{
    average_fuse, cmam_fuse_many, conflict_degree, harmonic_reference_fuse_many, predicted_class,
    FusionStrategy,
};
use crate::loss::{annealing, l_acc, l_kl, loss_gradient, LabelEncoding, LossReport};
use crate::mapping::{coarse_class_of, MappingMatrix, MappingStrategy, COARSE_CLASSES, FINE_CLASSES};
use crate::opinion::{dirichlet_to_opinion, evidence_to_dirichlet, Evidence, Opinion};
use crate::toymodel::data::MultiViewDataset;

pub const N_VIEWS: usize = 4;

/// Index pairs of the six view combinations reported by inference.
pub const VIEW_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// `ln(1 + e^z)`, evaluated stably.
pub fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Logistic function, the derivative of [`softplus`].
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Linear map plus softplus: `e = softplus(W x + b)`, elementwise
/// non-negative by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceHead {
    weights: Vec<f64>, // classes x in_dim, row-major
    bias: Vec<f64>,
    in_dim: usize,
    classes: usize,
}

impl EvidenceHead {
    /// Small seeded Gaussian init (sigma = 0.1).
    pub fn init(in_dim: usize, classes: usize, rng: &mut ChaCha8Rng) -> Self {
        let weights = (0..classes * in_dim)
            .map(|_| 0.1 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let bias = (0..classes)
            .map(|_| 0.1 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        Self {
            weights,
            bias,
            in_dim,
            classes,
        }
    }

    pub fn from_parts(in_dim: usize, classes: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        if weights.len() != classes * in_dim || bias.len() != classes {
            return Err(Error::Data(format!(
                "head parameter lengths do not match in_dim {in_dim} x classes {classes}"
            )));
        }
        Ok(Self {
            weights,
            bias,
            in_dim,
            classes,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    fn pre_activation(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.in_dim {
            return Err(Error::DimensionMismatch {
                expected: self.in_dim,
                got: x.len(),
            });
        }
        Ok((0..self.classes)
            .map(|k| {
                let row = &self.weights[k * self.in_dim..(k + 1) * self.in_dim];
                row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + self.bias[k]
            })
            .collect())
    }

    /// Evidence for one feature vector.
    pub fn forward(&self, x: &[f64]) -> Result<Evidence> {
        let z = self.pre_activation(x)?;
        Evidence::new(z.into_iter().map(softplus).collect())
    }
}

/// Trainer and pipeline settings.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    /// Decoupled L2 weight decay applied to the weight matrices (not the
    /// biases) at every update. Keeps weight norms bounded so that far
    /// off-distribution inputs cannot manufacture unbounded evidence
    /// through the linear map.
    pub weight_decay: f64,
    pub epochs: usize,
    /// 0 means full batch.
    pub batch_size: usize,
    pub fusion: FusionStrategy,
    pub mapping: MappingStrategy,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            momentum: 0.9,
            weight_decay: 0.0,
            epochs: 200,
            batch_size: 0,
            fusion: FusionStrategy::Cmam,
            mapping: MappingStrategy::Uniform,
            seed: 7,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(Error::Config(format!(
                "pipeline.learning_rate must be finite and >= 0, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Config(format!(
                "pipeline.momentum must lie in [0, 1), got {}",
                self.momentum
            )));
        }
        if !self.weight_decay.is_finite() || !(0.0..1.0).contains(&self.weight_decay) {
            return Err(Error::Config(format!(
                "pipeline.weight_decay must lie in [0, 1), got {}",
                self.weight_decay
            )));
        }
        Ok(())
    }
}

/// The four trained heads plus the fusion-time configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Pipeline {
    pub heads: [EvidenceHead; N_VIEWS],
    pub mapping: MappingMatrix,
    pub fusion: FusionStrategy,
}

/// Mean per-view losses over one training epoch.
#[derive(Debug, Clone, Copy)]
pub struct EpochTrace {
    pub epoch: usize,
    pub lambda: f64,
    pub per_view: [LossReport; N_VIEWS],
    pub total: f64,
}

/// Everything inference derives for one sample. The per-view opinions are
/// all at fine granularity (coarse evidence is mapped before conversion);
/// `pair_conflicts` follows [`VIEW_PAIRS`] order.
#[derive(Debug, Clone)]
pub struct Inference {
    pub per_view: [Opinion; N_VIEWS],
    pub joint: Opinion,
    pub predicted: usize,
    pub pair_conflicts: [f64; 6],
    pub mean_conflict: f64,
}

fn head_input<'d>(data: &'d MultiViewDataset, concat: &'d [Vec<f64>], view: usize, i: usize) -> &'d [f64] {
    match view {
        0 => &data.view_a[i],
        1 => &concat[i],
        2 => &data.view_b[i],
        3 => &concat[i],
        _ => unreachable!(),
    }
}

fn head_label(label: usize, view: usize) -> Result<LabelEncoding> {
    match view {
        0 | 1 => LabelEncoding::new(label, FINE_CLASSES),
        _ => LabelEncoding::new(coarse_class_of(label), COARSE_CLASSES),
    }
}

/// Trains the four heads jointly with deterministic (seeded) gradient
/// descent with momentum and returns the pipeline plus the per-epoch loss
/// trace. Aborts with a diagnostic if any loss turns non-finite.
pub fn train(cfg: &PipelineConfig, data: &MultiViewDataset) -> Result<(Pipeline, Vec<EpochTrace>)> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyInput("training needs at least one sample"));
    }
    let n = data.len();
    let d = data.n_features;
    let concat: Vec<Vec<f64>> = (0..n).map(|i| data.concat_features(i)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut heads = [
        EvidenceHead::init(d, FINE_CLASSES, &mut rng),
        EvidenceHead::init(2 * d, FINE_CLASSES, &mut rng),
        EvidenceHead::init(d, COARSE_CLASSES, &mut rng),
        EvidenceHead::init(2 * d, COARSE_CLASSES, &mut rng),
    ];
    let mut vel_w: Vec<Vec<f64>> = heads.iter().map(|h| vec![0.0; h.weights.len()]).collect();
    let mut vel_b: Vec<Vec<f64>> = heads.iter().map(|h| vec![0.0; h.bias.len()]).collect();

    let labels: Vec<[LabelEncoding; N_VIEWS]> = data
        .labels
        .iter()
        .map(|&l| {
            Ok([
                head_label(l, 0)?,
                head_label(l, 1)?,
                head_label(l, 2)?,
                head_label(l, 3)?,
            ])
        })
        .collect::<Result<_>>()?;

    let batch_size = if cfg.batch_size == 0 || cfg.batch_size > n {
        n
    } else {
        cfg.batch_size
    };

    let mut trace = Vec::with_capacity(cfg.epochs);
    let mut order: Vec<usize> = (0..n).collect();
    for epoch in 0..cfg.epochs {
        let lambda = annealing(epoch);
        if batch_size < n {
            // fresh seeded shuffle each epoch
            for i in (1..n).rev() {
                let j = rng.random_range(0..=i);
                order.swap(i, j);
            }
        }

        let mut sum_acc = [0.0; N_VIEWS];
        let mut sum_kl = [0.0; N_VIEWS];
        for batch in order.chunks(batch_size) {
            let scale = 1.0 / batch.len() as f64;
            for (v, head) in heads.iter_mut().enumerate() {
                let mut grad_w = vec![0.0; head.weights.len()];
                let mut grad_b = vec![0.0; head.bias.len()];
                for &i in batch {
                    let x = head_input(data, &concat, v, i);
                    let z = head.pre_activation(x)?;
                    let e = Evidence::new(z.iter().copied().map(softplus).collect())?;
                    let y = &labels[i][v];
                    sum_acc[v] += l_acc(&e, y)?;
                    sum_kl[v] += l_kl(&e, y)?;
                    let g_e = loss_gradient(&e, y, epoch)?;
                    for k in 0..head.classes {
                        let g_z = g_e[k] * sigmoid(z[k]);
                        grad_b[k] += g_z;
                        let row = &mut grad_w[k * head.in_dim..(k + 1) * head.in_dim];
                        for (gw, xi) in row.iter_mut().zip(x) {
                            *gw += g_z * xi;
                        }
                    }
                }
                for (idx, g) in grad_w.iter().enumerate() {
                    let vw = &mut vel_w[v][idx];
                    *vw = cfg.momentum * *vw - cfg.learning_rate * g * scale;
                    head.weights[idx] =
                        (1.0 - cfg.learning_rate * cfg.weight_decay) * head.weights[idx] + *vw;
                }
                for (idx, g) in grad_b.iter().enumerate() {
                    let vb = &mut vel_b[v][idx];
                    *vb = cfg.momentum * *vb - cfg.learning_rate * g * scale;
                    head.bias[idx] += *vb;
                }
            }
        }

        let mut per_view = [LossReport {
            l_acc: 0.0,
            l_kl: 0.0,
            lambda_t: lambda,
            total: 0.0,
        }; N_VIEWS];
        let mut total = 0.0;
        for v in 0..N_VIEWS {
            let mean_acc = sum_acc[v] / n as f64;
            let mean_kl = sum_kl[v] / n as f64;
            let view_total = mean_acc + lambda * mean_kl;
            if !view_total.is_finite() {
                return Err(Error::Numerical(format!(
                    "non-finite loss at epoch {epoch}, view f{} (l_acc {mean_acc}, l_kl {mean_kl})",
                    v + 1
                )));
            }
            per_view[v] = LossReport {
                l_acc: mean_acc,
                l_kl: mean_kl,
                lambda_t: lambda,
                total: view_total,
            };
            total += view_total;
        }
        trace.push(EpochTrace {
            epoch,
            lambda,
            per_view,
            total,
        });
    }

    let mapping = match cfg.mapping {
        MappingStrategy::Uniform => MappingMatrix::uniform(),
        MappingStrategy::DataDriven => MappingMatrix::data_driven(&data.class_counts()),
    };
    Ok((
        Pipeline {
            heads,
            mapping,
            fusion: cfg.fusion,
        },
        trace,
    ))
}

impl Pipeline {
    /// Runs the four heads on one sample, maps the coarse evidence to fine
    /// granularity, and fuses with the configured strategy.
    pub fn infer_sample(&self, view_a: &[f64], view_b: &[f64]) -> Result<Inference> {
        let mut concat = Vec::with_capacity(view_a.len() + view_b.len());
        concat.extend_from_slice(view_a);
        concat.extend_from_slice(view_b);

        let e1 = self.heads[0].forward(view_a)?;
        let e2 = self.heads[1].forward(&concat)?;
        let e3 = self.mapping.map_evidence(&self.heads[2].forward(view_b)?)?;
        let e4 = self.mapping.map_evidence(&self.heads[3].forward(&concat)?)?;
        let evidences = [e1, e2, e3, e4];

        let per_view: [Opinion; N_VIEWS] = [
            dirichlet_to_opinion(&evidence_to_dirichlet(&evidences[0])),
            dirichlet_to_opinion(&evidence_to_dirichlet(&evidences[1])),
            dirichlet_to_opinion(&evidence_to_dirichlet(&evidences[2])),
            dirichlet_to_opinion(&evidence_to_dirichlet(&evidences[3])),
        ];

        let mut pair_conflicts = [0.0; 6];
        for (slot, &(i, j)) in VIEW_PAIRS.iter().enumerate() {
            pair_conflicts[slot] = conflict_degree(&per_view[i], &per_view[j])?.value();
        }
        let mean_conflict = pair_conflicts.iter().sum::<f64>() / pair_conflicts.len() as f64;

        let joint = match self.fusion {
            FusionStrategy::Cmam => cmam_fuse_many(&per_view)?,
            FusionStrategy::AverageEvidence => average_fuse(&evidences)?,
            FusionStrategy::HarmonicReference => harmonic_reference_fuse_many(&per_view)?,
        };
        let predicted = predicted_class(&joint);
        Ok(Inference {
            per_view,
            joint,
            predicted,
            pair_conflicts,
            mean_conflict,
        })
    }

    /// [`Pipeline::infer_sample`] over every sample of a dataset.
    pub fn infer_dataset(&self, data: &MultiViewDataset) -> Result<Vec<Inference>> {
        (0..data.len())
            .map(|i| self.infer_sample(&data.view_a[i], &data.view_b[i]))
            .collect()
    }

    /// Same pipeline with a different fusion strategy; the trained heads and
    /// the mapping matrix are shared.
    pub fn with_fusion(&self, fusion: FusionStrategy) -> Pipeline {
        Pipeline {
            heads: self.heads.clone(),
            mapping: self.mapping.clone(),
            fusion,
        }
    }
}

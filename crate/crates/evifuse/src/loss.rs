//! Evidential training losses, the annealing schedule, and analytic
//! gradients with respect to the evidence.
//!
//! With `S = sum_k (e_k + 1)` and a one-hot label `y`:
//!
//! * accuracy term: `L_acc = sum_i y_i [psi(S) - psi(e_i + 1)]`, which drives
//!   the true-class evidence toward the total evidence;
//! * regularizer: `L_kl = KL[Dir(e~ + 1) || Dir(1)]` with
//!   `e~ = (1 - y) .* e`, the misleading evidence only, pulling wrong-class
//!   evidence toward zero;
//! * total per view: `L_acc + lambda_t * L_kl` with the annealing schedule
//!   `lambda_t = min(1, t/10)` over zero-based training epochs.

use crate::error::{Error, Result};
use crate::opinion::Evidence;
use crate::specfn::{digamma, log_gamma, trigamma};

/// One-hot class label over `K` classes, stored as the hot index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelEncoding {
    class_index: usize,
    class_count: usize,
}

impl LabelEncoding {
    pub fn new(class_index: usize, class_count: usize) -> Result<Self> {
        if class_count < 2 {
            return Err(Error::InvalidEvidence(format!(
                "need at least 2 classes, got {class_count}"
            )));
        }
        if class_index >= class_count {
            return Err(Error::Data(format!(
                "label {class_index} out of range for {class_count} classes"
            )));
        }
        Ok(Self {
            class_index,
            class_count,
        })
    }

    pub fn class_index(&self) -> usize {
        self.class_index
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn one_hot(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.class_count];
        v[self.class_index] = 1.0;
        v
    }
}

/// Per-view loss terms for one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossReport {
    pub l_acc: f64,
    pub l_kl: f64,
    pub lambda_t: f64,
    pub total: f64,
}

fn check_dims(e: &Evidence, y: &LabelEncoding) -> Result<()> {
    if e.class_count() != y.class_count() {
        return Err(Error::DimensionMismatch {
            expected: y.class_count(),
            got: e.class_count(),
        });
    }
    Ok(())
}

/// Accuracy loss `psi(S) - psi(e_true + 1)`. Non-negative; zero only in the
/// limit of all evidence on the true class.
pub fn l_acc(e: &Evidence, y: &LabelEncoding) -> Result<f64> {
    check_dims(e, y)?;
    let k = e.class_count() as f64;
    let s = e.total() + k;
    Ok(digamma(s)? - digamma(e.values()[y.class_index()] + 1.0)?)
}

/// KL divergence from the uniform Dirichlet of the Dirichlet parameterized
/// by the misleading evidence `e~ = (1 - y) .* e`:
///
/// `log[Gamma(S~) / (Gamma(K) prod_k Gamma(e~_k + 1))]
///  + sum_k e~_k [psi(e~_k + 1) - psi(S~)]`
///
/// with `S~ = sum_k (e~_k + 1)`. Non-negative, and exactly zero when the
/// misleading evidence vanishes.
pub fn l_kl(e: &Evidence, y: &LabelEncoding) -> Result<f64> {
    check_dims(e, y)?;
    let k = e.class_count();
    let masked = masked_evidence(e, y);
    let s: f64 = masked.iter().sum::<f64>() + k as f64;
    let mut value = log_gamma(s)? - log_gamma(k as f64)?;
    for &m in &masked {
        // components with m = 0 contribute log Gamma(1) = 0 exactly, so the
        // all-zero case returns a bit-exact 0
        if m > 0.0 {
            value -= log_gamma(m + 1.0)?;
            value += m * (digamma(m + 1.0)? - digamma(s)?);
        }
    }
    Ok(value)
}

fn masked_evidence(e: &Evidence, y: &LabelEncoding) -> Vec<f64> {
    let mut masked = e.values().to_vec();
    masked[y.class_index()] = 0.0;
    masked
}

/// Annealing coefficient `lambda_t = min(1, t/10)` over zero-based epochs.
pub fn annealing(epoch: usize) -> f64 {
    (epoch as f64 / 10.0).min(1.0)
}

/// Both loss terms of one view at epoch `t`, with
/// `total = l_acc + lambda_t * l_kl`.
pub fn view_loss(e: &Evidence, y: &LabelEncoding, epoch: usize) -> Result<LossReport> {
    let l_acc = l_acc(e, y)?;
    let l_kl = l_kl(e, y)?;
    let lambda_t = annealing(epoch);
    Ok(LossReport {
        l_acc,
        l_kl,
        lambda_t,
        total: l_acc + lambda_t * l_kl,
    })
}

/// Per-view loss reports and their sum across views. Views may carry
/// different class counts; each label must match its view's evidence.
pub fn joint_loss(
    evidences: &[Evidence],
    labels: &[LabelEncoding],
    epoch: usize,
) -> Result<(Vec<LossReport>, f64)> {
    if evidences.is_empty() {
        return Err(Error::EmptyInput("joint loss needs at least one view"));
    }
    if evidences.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: evidences.len(),
            got: labels.len(),
        });
    }
    let mut reports = Vec::with_capacity(evidences.len());
    let mut total = 0.0;
    for (e, y) in evidences.iter().zip(labels) {
        let r = view_loss(e, y, epoch)?;
        total += r.total;
        reports.push(r);
    }
    Ok((reports, total))
}

/// Analytic gradient of `l_acc + lambda_t * l_kl` with respect to the
/// evidence components. With `S = sum e + K` and `S~ = sum e~ + K`:
///
/// * `d L_acc / d e_k = psi'(S) - [k = true] psi'(e_k + 1)`
/// * `d L_kl / d e_k = e~_k psi'(e~_k + 1) - (S~ - K) psi'(S~)` for
///   `k != true`, and zero for the true class (the mask removes it).
pub fn loss_gradient(e: &Evidence, y: &LabelEncoding, epoch: usize) -> Result<Vec<f64>> {
    check_dims(e, y)?;
    let k = e.class_count();
    let s = e.total() + k as f64;
    let lambda_t = annealing(epoch);
    let trigamma_s = trigamma(s)?;

    let masked = masked_evidence(e, y);
    let masked_total: f64 = masked.iter().sum();
    let s_masked = masked_total + k as f64;
    let trigamma_s_masked = trigamma(s_masked)?;

    let mut grad = Vec::with_capacity(k);
    for (i, &ei) in e.values().iter().enumerate() {
        let mut g = trigamma_s;
        if i == y.class_index() {
            g -= trigamma(ei + 1.0)?;
        } else {
            g += lambda_t * (masked[i] * trigamma(masked[i] + 1.0)? - masked_total * trigamma_s_masked);
        }
        grad.push(g);
    }
    Ok(grad)
}

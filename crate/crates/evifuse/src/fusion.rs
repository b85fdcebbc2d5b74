//! Conflict-degree metric and conflict-aware aggregation of opinions, plus
//! the baseline fusion strategies used for ablation runs.
//!
//! The pairwise combination interpolates between two uncertainty rules by
//! the measured conflict `C` between the operands: fully consistent opinions
//! multiply their uncertainties (confidence compounds), fully conflicting
//! ones take the harmonic mean (confidence stalls). Belief masses are mixed
//! with the partner's uncertainty as the weight, so a confident operand
//! dominates an uncertain one.

use crate::error::{Error, Result};
use crate::opinion::{dirichlet_to_opinion, evidence_to_dirichlet, Evidence, Opinion};

/// Degree of conflict between two opinions, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ConflictDegree(f64);

impl ConflictDegree {
    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Selectable fusion strategies.
///
/// `Cmam` is the conflict-aware operator. `AverageEvidence` replaces fusion
/// with an arithmetic mean in evidence space. `HarmonicReference` always
/// applies the harmonic-mean uncertainty rule (the conflict formula pinned
/// at `C = 1`), kept as a reference point for how a conflict-blind
/// uncertainty rule inflates the uncertainty of consistent operands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FusionStrategy {
    Cmam,
    AverageEvidence,
    HarmonicReference,
}

impl FusionStrategy {
    pub const ALL: [FusionStrategy; 3] = [
        FusionStrategy::Cmam,
        FusionStrategy::AverageEvidence,
        FusionStrategy::HarmonicReference,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FusionStrategy::Cmam => "cmam",
            FusionStrategy::AverageEvidence => "average_evidence",
            FusionStrategy::HarmonicReference => "harmonic_reference",
        }
    }
}

impl std::fmt::Display for FusionStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FusionStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cmam" => Ok(FusionStrategy::Cmam),
            "average_evidence" => Ok(FusionStrategy::AverageEvidence),
            "harmonic_reference" => Ok(FusionStrategy::HarmonicReference),
            other => Err(Error::Config(format!(
                "unknown fusion strategy `{other}` (expected cmam, average_evidence, or harmonic_reference)"
            ))),
        }
    }
}

fn check_same_k(a: &Opinion, b: &Opinion) -> Result<()> {
    if a.class_count() != b.class_count() {
        return Err(Error::DimensionMismatch {
            expected: a.class_count(),
            got: b.class_count(),
        });
    }
    Ok(())
}

/// `C = 1 - (sum_k b_k^a b_k^b) / (sum_i b_i^a * sum_j b_j^b)`, clamped into
/// `[0, 1]` against floating-point drift.
///
/// A fully vacuous operand (all beliefs zero) asserts nothing and cannot
/// conflict, so `C = 0` there; this also makes the vacuous opinion a neutral
/// element of the pairwise combination.
pub fn conflict_degree(a: &Opinion, b: &Opinion) -> Result<ConflictDegree> {
    check_same_k(a, b)?;
    let sum_a: f64 = a.belief().iter().sum();
    let sum_b: f64 = b.belief().iter().sum();
    if sum_a == 0.0 || sum_b == 0.0 {
        return Ok(ConflictDegree(0.0));
    }
    let dot: f64 = a
        .belief()
        .iter()
        .zip(b.belief())
        .map(|(x, y)| x * y)
        .sum();
    let c = 1.0 - dot / (sum_a * sum_b);
    Ok(ConflictDegree(c.clamp(0.0, 1.0)))
}

/// Combined uncertainty at conflict `c`:
/// `u = c * 2 u_a u_b / (u_a + u_b) + (1 - c) * u_a u_b`.
///
/// Monotone non-decreasing in `c`, bounded by the product below and the
/// harmonic mean above.
pub fn fused_uncertainty(u_a: f64, u_b: f64, c: f64) -> f64 {
    c * (2.0 * u_a * u_b / (u_a + u_b)) + (1.0 - c) * u_a * u_b
}

fn fused_beliefs(a: &Opinion, b: &Opinion, c: f64) -> Vec<f64> {
    let (u_a, u_b) = (a.uncertainty(), b.uncertainty());
    let denom = u_a + u_b;
    a.belief()
        .iter()
        .zip(b.belief())
        .map(|(&ba, &bb)| (u_a * bb + u_b * ba + (1.0 - c) * u_a * u_b * (ba + bb)) / denom)
        .collect()
}

/// Conflict-aware pairwise combination. The result satisfies the
/// subjective-logic constraint `sum_k b_k + u = 1` algebraically.
pub fn cmam_fuse_pair(a: &Opinion, b: &Opinion) -> Result<Opinion> {
    let c = conflict_degree(a, b)?.value();
    let u = fused_uncertainty(a.uncertainty(), b.uncertainty(), c);
    Opinion::new(fused_beliefs(a, b, c), u)
}

/// Strict left fold of [`cmam_fuse_pair`] in the given order. The operator is
/// not associative: the first combination reshapes the belief masses, which
/// changes the conflict measured against later operands. Callers fix the
/// order; the pipeline introduces views in a fixed documented order so that
/// results stay deterministic.
pub fn cmam_fuse_many(opinions: &[Opinion]) -> Result<Opinion> {
    fold_pairwise(opinions, cmam_fuse_pair)
}

/// Pairwise combination with the uncertainty rule pinned at `C = 1`
/// (harmonic mean), irrespective of the measured conflict.
pub fn harmonic_reference_fuse_pair(a: &Opinion, b: &Opinion) -> Result<Opinion> {
    check_same_k(a, b)?;
    let (u_a, u_b) = (a.uncertainty(), b.uncertainty());
    let u = 2.0 * u_a * u_b / (u_a + u_b);
    Opinion::new(fused_beliefs(a, b, 1.0), u)
}

/// Strict left fold of [`harmonic_reference_fuse_pair`].
pub fn harmonic_reference_fuse_many(opinions: &[Opinion]) -> Result<Opinion> {
    fold_pairwise(opinions, harmonic_reference_fuse_pair)
}

fn fold_pairwise(
    opinions: &[Opinion],
    pair: fn(&Opinion, &Opinion) -> Result<Opinion>,
) -> Result<Opinion> {
    let (first, rest) = opinions
        .split_first()
        .ok_or(Error::EmptyInput("fusion needs at least one opinion"))?;
    let mut acc = first.clone();
    for o in rest {
        acc = pair(&acc, o)?;
    }
    Ok(acc)
}

/// Baseline strategy: elementwise arithmetic mean of the evidence vectors,
/// then the usual evidence-to-opinion normalization.
pub fn average_fuse(evidences: &[Evidence]) -> Result<Opinion> {
    let (first, rest) = evidences
        .split_first()
        .ok_or(Error::EmptyInput("average fusion needs at least one evidence vector"))?;
    let k = first.class_count();
    let mut mean: Vec<f64> = first.values().to_vec();
    for e in rest {
        if e.class_count() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: e.class_count(),
            });
        }
        for (m, v) in mean.iter_mut().zip(e.values()) {
            *m += v;
        }
    }
    let n = evidences.len() as f64;
    for m in &mut mean {
        *m /= n;
    }
    Ok(dirichlet_to_opinion(&evidence_to_dirichlet(&Evidence::new(
        mean,
    )?)))
}

/// [`average_fuse`] on opinions: each operand is mapped back to evidence
/// (`alpha - 1`) first. Useful where only opinions are available, e.g. the
/// C API.
pub fn average_fuse_opinions(opinions: &[Opinion]) -> Result<Opinion> {
    let evidences: Vec<Evidence> = opinions
        .iter()
        .map(|o| {
            let d = crate::opinion::opinion_to_dirichlet(o);
            Evidence::new(d.alpha().iter().map(|a| a - 1.0).collect())
        })
        .collect::<Result<_>>()?;
    average_fuse(&evidences)
}

/// Decision rule: argmax over the projected probabilities `b_k + u/K`,
/// ties broken by the lowest class index.
pub fn predicted_class(o: &Opinion) -> usize {
    let p = o.projected_probabilities();
    let mut best = 0;
    for (k, &v) in p.iter().enumerate().skip(1) {
        if v > p[best] {
            best = k;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_hot_opinion(k: usize, class: usize, belief_mass: f64) -> Opinion {
        let mut b = vec![0.0; k];
        b[class] = belief_mass;
        Opinion::new(b, 1.0 - belief_mass).unwrap()
    }

    fn sum_to_one(o: &Opinion) -> f64 {
        o.belief().iter().sum::<f64>() + o.uncertainty()
    }

    #[test]
    fn conflict_degree_examples() {
        let a = one_hot_opinion(5, 0, 0.9);
        assert_eq!(conflict_degree(&a, &a).unwrap().value(), 0.0);

        let b = one_hot_opinion(5, 1, 0.9);
        assert_eq!(conflict_degree(&a, &b).unwrap().value(), 1.0);

        let a = Opinion::new(vec![0.5, 0.3, 0.0, 0.0, 0.0], 0.2).unwrap();
        let b = Opinion::new(vec![0.2, 0.6, 0.0, 0.0, 0.0], 0.2).unwrap();
        let c = conflict_degree(&a, &b).unwrap().value();
        assert!((c - 0.5625).abs() < 1e-12);
    }

    #[test]
    fn conflict_degree_is_symmetric_and_bounded() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let a = random_opinion(&mut rng, 5);
            let b = random_opinion(&mut rng, 5);
            let cab = conflict_degree(&a, &b).unwrap().value();
            let cba = conflict_degree(&b, &a).unwrap().value();
            assert!((cab - cba).abs() < 1e-15);
            assert!((0.0..=1.0).contains(&cab));
        }
    }

    #[test]
    fn vacuous_operand_has_zero_conflict() {
        let v = Opinion::vacuous(5).unwrap();
        let a = one_hot_opinion(5, 2, 0.8);
        assert_eq!(conflict_degree(&v, &a).unwrap().value(), 0.0);
        assert_eq!(conflict_degree(&a, &v).unwrap().value(), 0.0);
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let a = Opinion::vacuous(5).unwrap();
        let b = Opinion::vacuous(3).unwrap();
        assert!(conflict_degree(&a, &b).is_err());
        assert!(cmam_fuse_pair(&a, &b).is_err());
    }

    #[test]
    fn consistent_pair_multiplies_uncertainty() {
        // Aligned one-hot beliefs with u = 0.3 and u = 0.8: conflict is zero
        // and the combined uncertainty is the product 0.24, not the 0.436 the
        // harmonic reference rule yields on the same inputs.
        let a = one_hot_opinion(5, 0, 0.7);
        let b = one_hot_opinion(5, 0, 0.2);
        let fused = cmam_fuse_pair(&a, &b).unwrap();
        assert!((fused.uncertainty() - 0.24).abs() < 1e-15);
        assert!((sum_to_one(&fused) - 1.0).abs() < 1e-12);

        let reference = harmonic_reference_fuse_pair(&a, &b).unwrap();
        assert!((reference.uncertainty() - 0.436).abs() < 1e-3);
        assert!((reference.uncertainty() - 0.48 / 1.1).abs() < 1e-15);
        assert!((sum_to_one(&reference) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vacuous_is_neutral_element() {
        let v = Opinion::vacuous(5).unwrap();
        let b = Opinion::new(vec![0.1, 0.3, 0.0, 0.2, 0.0], 0.4).unwrap();
        for fused in [cmam_fuse_pair(&v, &b).unwrap(), cmam_fuse_pair(&b, &v).unwrap()] {
            for (x, y) in fused.belief().iter().zip(b.belief()) {
                assert!((x - y).abs() < 1e-12);
            }
            assert!((fused.uncertainty() - b.uncertainty()).abs() < 1e-12);
        }
    }

    #[test]
    fn fully_conflicting_pair_splits_beliefs() {
        let a = one_hot_opinion(5, 0, 0.5);
        let b = one_hot_opinion(5, 1, 0.5);
        let fused = cmam_fuse_pair(&a, &b).unwrap();
        assert!((fused.uncertainty() - 0.5).abs() < 1e-15);
        assert!((fused.belief()[0] - 0.25).abs() < 1e-15);
        assert!((fused.belief()[1] - 0.25).abs() < 1e-15);
        assert!((sum_to_one(&fused) - 1.0).abs() < 1e-12);
    }

    fn random_opinion(rng: &mut rand_chacha::ChaCha8Rng, k: usize) -> Opinion {
        use rand::Rng;
        let u: f64 = rng.random_range(0.01..0.99);
        let mut b: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0)).collect();
        let sum: f64 = b.iter().sum();
        for x in &mut b {
            *x *= (1.0 - u) / sum;
        }
        Opinion::new(b, u).unwrap()
    }

    #[test]
    fn pair_fusion_preserves_sum_to_one() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10_000 {
            let k = if rng.random_range(0..2) == 0 { 3 } else { 5 };
            let a = random_opinion(&mut rng, k);
            let b = random_opinion(&mut rng, k);
            let fused = cmam_fuse_pair(&a, &b).unwrap();
            assert!((sum_to_one(&fused) - 1.0).abs() < 1e-9);
            assert!(fused.belief().iter().all(|&x| x >= 0.0));
            assert!(fused.uncertainty() >= 0.0);
        }
    }

    #[test]
    fn pair_fusion_commutes() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        for _ in 0..1000 {
            let a = random_opinion(&mut rng, 5);
            let b = random_opinion(&mut rng, 5);
            let ab = cmam_fuse_pair(&a, &b).unwrap();
            let ba = cmam_fuse_pair(&b, &a).unwrap();
            for (x, y) in ab.belief().iter().zip(ba.belief()) {
                assert!((x - y).abs() < 1e-12);
            }
            assert!((ab.uncertainty() - ba.uncertainty()).abs() < 1e-12);
        }
    }

    #[test]
    fn consistency_lowers_uncertainty() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..1000 {
            let u_a: f64 = rng.random_range(0.05..0.95);
            let u_b: f64 = rng.random_range(0.05..0.95);
            let class = rng.random_range(0..5);
            let a = one_hot_opinion(5, class, 1.0 - u_a);
            let b = one_hot_opinion(5, class, 1.0 - u_b);
            assert!(conflict_degree(&a, &b).unwrap().value() < 1e-6);
            let fused = cmam_fuse_pair(&a, &b).unwrap();
            assert!(fused.uncertainty() < u_a.min(u_b));
        }
    }

    #[test]
    fn conflict_raises_uncertainty() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(37);
        for _ in 0..1000 {
            let u_o: f64 = rng.random_range(0.05..0.90);
            let u_b: f64 = rng.random_range(u_o..0.95);
            let o = one_hot_opinion(5, 0, 1.0 - u_o);
            let b = one_hot_opinion(5, 1, 1.0 - u_b);
            assert!(conflict_degree(&o, &b).unwrap().value() > 1.0 - 1e-6);
            let fused = cmam_fuse_pair(&o, &b).unwrap();
            assert!(fused.uncertainty() > u_o);
        }
    }

    #[test]
    fn fused_uncertainty_monotone_in_conflict_with_bounds() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..100 {
            let u_a: f64 = rng.random_range(0.01..0.99);
            let u_b: f64 = rng.random_range(0.01..0.99);
            let product = u_a * u_b;
            let harmonic = 2.0 * u_a * u_b / (u_a + u_b);
            let mut prev = f64::NEG_INFINITY;
            for i in 0..=100 {
                let c = i as f64 / 100.0;
                let u = fused_uncertainty(u_a, u_b, c);
                assert!(u >= prev, "not monotone at c = {c}");
                assert!(u >= product - 1e-12 && u <= harmonic + 1e-12);
                prev = u;
            }
            assert!((fused_uncertainty(u_a, u_b, 0.0) - product).abs() < 1e-12);
            assert!((fused_uncertainty(u_a, u_b, 1.0) - harmonic).abs() < 1e-12);
        }
    }

    #[test]
    fn fuse_many_folds_left() {
        let a = one_hot_opinion(5, 0, 0.6);
        assert_eq!(cmam_fuse_many(std::slice::from_ref(&a)).unwrap(), a);

        let b = one_hot_opinion(5, 1, 0.5);
        let pair = cmam_fuse_pair(&a, &b).unwrap();
        let many = cmam_fuse_many(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(pair, many);

        assert!(cmam_fuse_many(&[]).is_err());
    }

    #[test]
    fn fold_order_changes_result_for_conflicting_triples() {
        // The pairwise operator is not associative. This documents the effect
        // on a concrete conflicting triple; both orders still satisfy the
        // subjective-logic constraint.
        let m1 = one_hot_opinion(5, 0, 0.8);
        let m2 = one_hot_opinion(5, 1, 0.7);
        let m3 = one_hot_opinion(5, 2, 0.6);
        let fwd = cmam_fuse_many(&[m1.clone(), m2.clone(), m3.clone()]).unwrap();
        let rev = cmam_fuse_many(&[m3, m2, m1]).unwrap();
        let diff = fwd
            .belief()
            .iter()
            .zip(rev.belief())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max);
        assert!(diff > 1e-6, "expected order dependence, max diff {diff:e}");
        assert!((sum_to_one(&fwd) - 1.0).abs() < 1e-9);
        assert!((sum_to_one(&rev) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn average_fuse_examples() {
        let e1 = Evidence::new(vec![4.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let e2 = Evidence::new(vec![0.0, 4.0, 0.0, 0.0, 0.0]).unwrap();
        let o = average_fuse(&[e1.clone(), e2]).unwrap();
        assert!((o.belief()[0] - 2.0 / 9.0).abs() < 1e-15);
        assert!((o.belief()[1] - 2.0 / 9.0).abs() < 1e-15);
        assert!((o.uncertainty() - 5.0 / 9.0).abs() < 1e-15);

        // Identical inputs average to any single one of them.
        let single = average_fuse(std::slice::from_ref(&e1)).unwrap();
        let repeated = average_fuse(&[e1.clone(), e1.clone(), e1]).unwrap();
        assert_eq!(single, repeated);

        let vac = average_fuse(&[Evidence::zeros(5).unwrap()]).unwrap();
        assert_eq!(vac.uncertainty(), 1.0);

        assert!(average_fuse(&[]).is_err());
    }

    #[test]
    fn average_fuse_opinions_matches_evidence_route() {
        let e1 = Evidence::new(vec![3.0, 1.0, 0.0, 0.5, 0.0]).unwrap();
        let e2 = Evidence::new(vec![0.0, 2.0, 2.0, 0.0, 1.0]).unwrap();
        let o1 = dirichlet_to_opinion(&evidence_to_dirichlet(&e1));
        let o2 = dirichlet_to_opinion(&evidence_to_dirichlet(&e2));
        let via_e = average_fuse(&[e1, e2]).unwrap();
        let via_o = average_fuse_opinions(&[o1, o2]).unwrap();
        for (x, y) in via_e.belief().iter().zip(via_o.belief()) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((via_e.uncertainty() - via_o.uncertainty()).abs() < 1e-12);
    }

    #[test]
    fn predicted_class_examples() {
        let o = Opinion::new(vec![4.0 / 9.0, 0.0, 0.0, 0.0, 0.0], 5.0 / 9.0).unwrap();
        assert_eq!(predicted_class(&o), 0);

        assert_eq!(predicted_class(&Opinion::vacuous(5).unwrap()), 0);

        let o = Opinion::new(vec![0.0, 0.3, 0.3, 0.0, 0.0], 0.4).unwrap();
        assert_eq!(predicted_class(&o), 1);
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in FusionStrategy::ALL {
            assert_eq!(s.name().parse::<FusionStrategy>().unwrap(), s);
        }
        assert!("ecml".parse::<FusionStrategy>().is_err());
    }
}

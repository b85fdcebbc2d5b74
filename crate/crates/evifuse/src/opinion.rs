//! Core domain types: evidence vectors, Dirichlet parameters, and
//! subjective-logic opinions, with the conversions between them.
//!
//! Evidence is non-negative per-class support mass. Adding one to each
//! component parameterizes a Dirichlet distribution; normalizing by the
//! Dirichlet strength `S` yields an opinion `(b, u)` with belief masses
//! `b_k = (alpha_k - 1) / S` and uncertainty mass `u = K / S`, which sum
//! to one by construction.

use crate::error::{Error, Result};
use crate::specfn;

/// Tolerance for sum-to-one and simplex checks.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Stored opinions never carry zero uncertainty; pairwise fusion divides by
/// `u^a + u^b`. Finite evidence always yields `u > 0`, so the clamp only
/// guards user-constructed opinions.
pub const MIN_UNCERTAINTY: f64 = 1e-12;

/// Non-negative per-class support mass of length `K >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Evidence {
    values: Vec<f64>,
}

impl Evidence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidEvidence(format!(
                "need at least 2 classes, got {}",
                values.len()
            )));
        }
        for (k, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidEvidence(format!(
                    "component {k} is {v}; evidence must be finite and >= 0"
                )));
            }
        }
        Ok(Self { values })
    }

    /// All-zero evidence over `k` classes.
    pub fn zeros(k: usize) -> Result<Self> {
        Self::new(vec![0.0; k])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of classes `K`.
    pub fn class_count(&self) -> usize {
        self.values.len()
    }

    /// Total support mass.
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Dirichlet concentration parameters with every component >= 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletParams {
    alpha: Vec<f64>,
}

impl DirichletParams {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() < 2 {
            return Err(Error::InvalidEvidence(format!(
                "need at least 2 classes, got {}",
                alpha.len()
            )));
        }
        for (k, &a) in alpha.iter().enumerate() {
            if !a.is_finite() || a < 1.0 {
                return Err(Error::InvalidEvidence(format!(
                    "alpha component {k} is {a}; must be finite and >= 1"
                )));
            }
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn class_count(&self) -> usize {
        self.alpha.len()
    }

    /// Dirichlet strength `S = sum_k alpha_k`, recomputed on every call so it
    /// can never go stale.
    pub fn strength(&self) -> f64 {
        self.alpha.iter().sum()
    }

    /// Log density of the distribution at a point `p` on the unit simplex:
    /// `-log B(alpha) + sum_k (alpha_k - 1) log p_k`.
    ///
    /// Components with `alpha_k = 1` contribute zero regardless of `p_k`;
    /// a zero `p_k` against `alpha_k > 1` sends the log density to negative
    /// infinity (zero density).
    pub fn log_pdf(&self, p: &[f64]) -> Result<f64> {
        if p.len() != self.alpha.len() {
            return Err(Error::DimensionMismatch {
                expected: self.alpha.len(),
                got: p.len(),
            });
        }
        let mut sum = 0.0;
        for (k, &pk) in p.iter().enumerate() {
            if !pk.is_finite() || pk < 0.0 || pk > 1.0 {
                return Err(Error::SimplexViolation(format!(
                    "component {k} is {pk}; must lie in [0, 1]"
                )));
            }
            sum += pk;
        }
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::SimplexViolation(format!(
                "components sum to {sum}, not 1"
            )));
        }
        let mut log_density = -specfn::log_multinomial_beta(&self.alpha)?;
        for (&a, &pk) in self.alpha.iter().zip(p) {
            if a > 1.0 {
                if pk == 0.0 {
                    return Ok(f64::NEG_INFINITY);
                }
                log_density += (a - 1.0) * pk.ln();
            }
        }
        Ok(log_density)
    }
}

/// Subjective-logic opinion: per-class belief masses plus an uncertainty
/// mass, summing to one. No base rates are carried.
#[derive(Debug, Clone, PartialEq)]
pub struct Opinion {
    belief: Vec<f64>,
    uncertainty: f64,
}

impl Opinion {
    /// Validates the subjective-logic constraints and clamps the uncertainty
    /// to [`MIN_UNCERTAINTY`], rescaling the beliefs when it does.
    pub fn new(belief: Vec<f64>, uncertainty: f64) -> Result<Self> {
        if belief.len() < 2 {
            return Err(Error::InvalidOpinion(format!(
                "need at least 2 classes, got {}",
                belief.len()
            )));
        }
        let mut sum = 0.0;
        for (k, &b) in belief.iter().enumerate() {
            if !b.is_finite() || b < 0.0 {
                return Err(Error::InvalidOpinion(format!(
                    "belief component {k} is {b}; must be finite and >= 0"
                )));
            }
            sum += b;
        }
        if !uncertainty.is_finite() || uncertainty < 0.0 {
            return Err(Error::InvalidOpinion(format!(
                "uncertainty is {uncertainty}; must be finite and >= 0"
            )));
        }
        if (sum + uncertainty - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidOpinion(format!(
                "belief + uncertainty sums to {}, not 1",
                sum + uncertainty
            )));
        }
        let mut belief = belief;
        let mut uncertainty = uncertainty;
        if uncertainty < MIN_UNCERTAINTY {
            uncertainty = MIN_UNCERTAINTY;
            let scale = (1.0 - uncertainty) / sum;
            for b in &mut belief {
                *b *= scale;
            }
        }
        Ok(Self {
            belief,
            uncertainty,
        })
    }

    /// The fully uncertain opinion: all belief mass zero, `u = 1`.
    pub fn vacuous(k: usize) -> Result<Self> {
        Self::new(vec![0.0; k], 1.0)
    }

    pub fn belief(&self) -> &[f64] {
        &self.belief
    }

    pub fn uncertainty(&self) -> f64 {
        self.uncertainty
    }

    pub fn class_count(&self) -> usize {
        self.belief.len()
    }

    /// Projected probabilities `p_k = b_k + u / K`, the Dirichlet mean.
    pub fn projected_probabilities(&self) -> Vec<f64> {
        let share = self.uncertainty / self.belief.len() as f64;
        self.belief.iter().map(|b| b + share).collect()
    }
}

/// Adds one to every evidence component: `alpha = e + 1`.
pub fn evidence_to_dirichlet(e: &Evidence) -> DirichletParams {
    DirichletParams {
        alpha: e.values().iter().map(|v| v + 1.0).collect(),
    }
}

/// Normalizes Dirichlet parameters into an opinion:
/// `b_k = (alpha_k - 1) / S`, `u = K / S`.
pub fn dirichlet_to_opinion(d: &DirichletParams) -> Opinion {
    let s = d.strength();
    let k = d.class_count() as f64;
    let belief: Vec<f64> = d.alpha().iter().map(|a| (a - 1.0) / s).collect();
    // S >= K, so b_k in [0,1], u in (0,1] and the sum is S/S = 1 up to
    // rounding; the constructor cannot fail here.
    Opinion::new(belief, k / s).expect("normalized Dirichlet is a valid opinion")
}

/// Inverse of [`dirichlet_to_opinion`]: `S = K / u`, `alpha_k = b_k * S + 1`.
/// Stored opinions always carry `u > 0`, so the strength is finite.
pub fn opinion_to_dirichlet(o: &Opinion) -> DirichletParams {
    let s = o.class_count() as f64 / o.uncertainty();
    DirichletParams {
        alpha: o.belief().iter().map(|b| b * s + 1.0).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_close(got: f64, want: f64, tol: f64) {
        assert!((got - want).abs() < tol, "got {got}, want {want}");
    }

    #[test]
    fn evidence_to_dirichlet_examples() {
        let d = evidence_to_dirichlet(&Evidence::zeros(5).unwrap());
        assert_eq!(d.alpha(), &[1.0; 5]);
        assert_eq!(d.strength(), 5.0);

        let d = evidence_to_dirichlet(&Evidence::new(vec![4.0, 0.0, 0.0, 0.0, 0.0]).unwrap());
        assert_eq!(d.alpha(), &[5.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(d.strength(), 9.0);

        let d = evidence_to_dirichlet(&Evidence::new(vec![1.0; 5]).unwrap());
        assert_eq!(d.alpha(), &[2.0; 5]);
        assert_eq!(d.strength(), 10.0);
    }

    #[test]
    fn evidence_rejects_bad_input() {
        assert!(Evidence::new(vec![1.0]).is_err());
        assert!(Evidence::new(vec![1.0, -0.1]).is_err());
        assert!(Evidence::new(vec![1.0, f64::NAN]).is_err());
        assert!(Evidence::new(vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn dirichlet_to_opinion_examples() {
        let o = dirichlet_to_opinion(&DirichletParams::new(vec![1.0; 5]).unwrap());
        assert_eq!(o.belief(), &[0.0; 5]);
        assert_eq!(o.uncertainty(), 1.0);

        let o = dirichlet_to_opinion(&DirichletParams::new(vec![5.0, 1.0, 1.0, 1.0, 1.0]).unwrap());
        assert_close(o.belief()[0], 4.0 / 9.0, 1e-15);
        assert_close(o.uncertainty(), 5.0 / 9.0, 1e-15);
        assert_close(o.belief().iter().sum::<f64>() + o.uncertainty(), 1.0, 1e-15);

        let o = dirichlet_to_opinion(&DirichletParams::new(vec![2.0; 5]).unwrap());
        for &b in o.belief() {
            assert_close(b, 0.1, 1e-15);
        }
        assert_close(o.uncertainty(), 0.5, 1e-15);
    }

    #[test]
    fn opinion_to_dirichlet_inverts() {
        let d = opinion_to_dirichlet(&Opinion::vacuous(5).unwrap());
        for &a in d.alpha() {
            assert_close(a, 1.0, 1e-9);
        }

        let o = Opinion::new(vec![4.0 / 9.0, 0.0, 0.0, 0.0, 0.0], 5.0 / 9.0).unwrap();
        let d = opinion_to_dirichlet(&o);
        let want = [5.0, 1.0, 1.0, 1.0, 1.0];
        for (a, w) in d.alpha().iter().zip(want) {
            assert_close(*a, w, 1e-12);
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let k = if rng.random_range(0..2) == 0 { 3 } else { 5 };
            let u: f64 = rng.random_range(0.01..1.0);
            let mut b: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0)).collect();
            let sum: f64 = b.iter().sum();
            for x in &mut b {
                *x *= (1.0 - u) / sum;
            }
            let o = Opinion::new(b, u).unwrap();
            let back = dirichlet_to_opinion(&opinion_to_dirichlet(&o));
            for (x, y) in back.belief().iter().zip(o.belief()) {
                assert_close(*x, *y, 1e-9);
            }
            assert_close(back.uncertainty(), o.uncertainty(), 1e-9);
        }
    }

    #[test]
    fn evidence_chain_sums_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let k = if rng.random_range(0..2) == 0 { 3 } else { 5 };
            let e: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..50.0)).collect();
            let o = dirichlet_to_opinion(&evidence_to_dirichlet(&Evidence::new(e).unwrap()));
            let total = o.belief().iter().sum::<f64>() + o.uncertainty();
            assert_close(total, 1.0, 1e-9);
            assert!(o.uncertainty() > 0.0);
        }
    }

    #[test]
    fn belief_monotone_in_evidence() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let e: Vec<f64> = (0..5).map(|_| rng.random_range(0.0..10.0)).collect();
            let k = rng.random_range(0..5);
            let o1 = dirichlet_to_opinion(&evidence_to_dirichlet(
                &Evidence::new(e.clone()).unwrap(),
            ));
            let mut bumped = e;
            bumped[k] += 0.5;
            let o2 = dirichlet_to_opinion(&evidence_to_dirichlet(&Evidence::new(bumped).unwrap()));
            assert!(o2.belief()[k] > o1.belief()[k]);
            assert!(o2.uncertainty() < o1.uncertainty());
        }
    }

    #[test]
    fn constructor_clamps_zero_uncertainty() {
        let o = Opinion::new(vec![0.5, 0.5], 0.0).unwrap();
        assert_eq!(o.uncertainty(), MIN_UNCERTAINTY);
        assert_close(o.belief().iter().sum::<f64>() + o.uncertainty(), 1.0, 1e-15);
    }

    #[test]
    fn opinion_rejects_bad_input() {
        assert!(Opinion::new(vec![0.5, 0.6], 0.0).is_err()); // sums to 1.1
        assert!(Opinion::new(vec![-0.1, 0.6], 0.5).is_err());
        assert!(Opinion::new(vec![0.5, 0.5], -0.1).is_err());
        assert!(Opinion::new(vec![0.4], 0.6).is_err());
    }

    #[test]
    fn log_pdf_examples() {
        // Uniform Dirichlet: constant density Gamma(K) over the simplex.
        let d = DirichletParams::new(vec![1.0; 5]).unwrap();
        let lp = d.log_pdf(&[0.2, 0.2, 0.2, 0.2, 0.2]).unwrap();
        assert_close(lp, (24.0f64).ln(), 1e-12);
        let lp = d.log_pdf(&[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_close(lp, (24.0f64).ln(), 1e-12);

        let d = DirichletParams::new(vec![2.0, 1.0, 1.0, 1.0, 1.0]).unwrap();
        let lp = d.log_pdf(&[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_close(lp, (120.0f64).ln(), 1e-12);

        // Zero probability against alpha > 1: zero density.
        let lp = d.log_pdf(&[0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(lp, f64::NEG_INFINITY);
    }

    #[test]
    fn log_pdf_rejects_off_simplex() {
        let d = DirichletParams::new(vec![1.0; 5]).unwrap();
        assert!(matches!(
            d.log_pdf(&[0.2, 0.2, 0.2, 0.2, 0.1]),
            Err(Error::SimplexViolation(_))
        ));
        assert!(matches!(
            d.log_pdf(&[1.2, -0.2, 0.0, 0.0, 0.0]),
            Err(Error::SimplexViolation(_))
        ));
        assert!(matches!(
            d.log_pdf(&[0.5, 0.5]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn beta_case_log_pdf_integrates_to_one() {
        // K = 2 reduces to a Beta distribution; Simpson quadrature of
        // exp(log_pdf) over p in [0,1] must return 1.
        for alpha in [[1.0, 1.0], [2.0, 3.0], [5.0, 1.0], [2.5, 4.5]] {
            let d = DirichletParams::new(alpha.to_vec()).unwrap();
            let n = 100_000usize;
            let h = 1.0 / n as f64;
            let f = |p: f64| d.log_pdf(&[p, 1.0 - p]).unwrap().exp();
            let mut s = f(0.0) + f(1.0);
            for i in 1..n {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                s += w * f(i as f64 * h);
            }
            let integral = s * h / 3.0;
            assert_close(integral, 1.0, 1e-6);
        }
    }
}

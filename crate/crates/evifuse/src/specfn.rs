//! Log-gamma, digamma, and trigamma, plus the log multinomial beta function.
//!
//! All three functions share the same scheme: shift the argument upward with
//! the exact recurrences until it clears a threshold, then evaluate the
//! Bernoulli asymptotic series at the shifted argument. With the default
//! threshold of 6 and eight series terms the truncation error of the series
//! is below 1e-13 for every function, which leaves headroom under the
//! advertised tolerances (1e-12 for log-gamma, 1e-10 for digamma, 1e-9 for
//! trigamma, all at x >= 1).

use crate::error::{Error, Result};

/// Bernoulli numbers B_2, B_4, ..., B_16.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Tuning knobs for the asymptotic-series evaluation.
///
/// `recurrence_threshold` is the argument below which the upward recurrence
/// keeps shifting; `series_terms` is how many Bernoulli terms the series
/// keeps. The defaults meet every stated tolerance; the threshold may only
/// be raised, never lowered below 6, because the series diverges too early
/// for small arguments.
#[derive(Debug, Clone, Copy)]
pub struct SpecFnConfig {
    recurrence_threshold: f64,
    series_terms: usize,
}

impl Default for SpecFnConfig {
    fn default() -> Self {
        Self {
            recurrence_threshold: 6.0,
            series_terms: BERNOULLI.len(),
        }
    }
}

impl SpecFnConfig {
    pub fn new(recurrence_threshold: f64, series_terms: usize) -> Result<Self> {
        if !(recurrence_threshold >= 6.0) {
            return Err(Error::Domain(format!(
                "recurrence threshold must be >= 6, got {recurrence_threshold}"
            )));
        }
        if series_terms == 0 || series_terms > BERNOULLI.len() {
            return Err(Error::Domain(format!(
                "series_terms must be in 1..={}, got {series_terms}",
                BERNOULLI.len()
            )));
        }
        Ok(Self {
            recurrence_threshold,
            series_terms,
        })
    }

    pub fn recurrence_threshold(&self) -> f64 {
        self.recurrence_threshold
    }

    pub fn series_terms(&self) -> usize {
        self.series_terms
    }

    /// Natural log of the gamma function for x > 0.
    pub fn log_gamma(&self, x: f64) -> Result<f64> {
        check_positive(x, "log_gamma")?;
        // log Gamma(x) = log Gamma(x+1) - log x
        let mut shift = 0.0;
        let mut z = x;
        while z < self.recurrence_threshold {
            shift -= z.ln();
            z += 1.0;
        }
        // Stirling series at the shifted argument.
        let ln_two_pi = (2.0 * std::f64::consts::PI).ln();
        let z2 = z * z;
        let mut zpow = z; // z^(2n-1)
        let mut series = 0.0;
        for (n, b) in BERNOULLI.iter().take(self.series_terms).enumerate() {
            let two_n = 2.0 * (n + 1) as f64;
            series += b / (two_n * (two_n - 1.0) * zpow);
            zpow *= z2;
        }
        Ok(shift + (z - 0.5) * z.ln() - z + 0.5 * ln_two_pi + series)
    }

    /// Digamma function psi(x) for x > 0.
    pub fn digamma(&self, x: f64) -> Result<f64> {
        check_positive(x, "digamma")?;
        // psi(x) = psi(x+1) - 1/x
        let mut shift = 0.0;
        let mut z = x;
        while z < self.recurrence_threshold {
            shift -= 1.0 / z;
            z += 1.0;
        }
        let z2 = z * z;
        let mut zpow = z2; // z^(2n)
        let mut series = 0.0;
        for (n, b) in BERNOULLI.iter().take(self.series_terms).enumerate() {
            let two_n = 2.0 * (n + 1) as f64;
            series += b / (two_n * zpow);
            zpow *= z2;
        }
        Ok(shift + z.ln() - 0.5 / z - series)
    }

    /// Trigamma function psi'(x) for x > 0.
    pub fn trigamma(&self, x: f64) -> Result<f64> {
        check_positive(x, "trigamma")?;
        // psi'(x) = psi'(x+1) + 1/x^2
        let mut shift = 0.0;
        let mut z = x;
        while z < self.recurrence_threshold {
            shift += 1.0 / (z * z);
            z += 1.0;
        }
        let z2 = z * z;
        let mut zpow = z * z2; // z^(2n+1)
        let mut series = 0.0;
        for b in BERNOULLI.iter().take(self.series_terms) {
            series += b / zpow;
            zpow *= z2;
        }
        Ok(shift + 1.0 / z + 0.5 / z2 + series)
    }
}

fn check_positive(x: f64, name: &str) -> Result<()> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!(
            "{name} requires a finite x > 0, got {x}"
        )));
    }
    Ok(())
}

/// `log Gamma(x)` with the default configuration.
pub fn log_gamma(x: f64) -> Result<f64> {
    SpecFnConfig::default().log_gamma(x)
}

/// `psi(x)` with the default configuration.
pub fn digamma(x: f64) -> Result<f64> {
    SpecFnConfig::default().digamma(x)
}

/// `psi'(x)` with the default configuration.
pub fn trigamma(x: f64) -> Result<f64> {
    SpecFnConfig::default().trigamma(x)
}

/// Log of the multinomial beta function:
/// `log B(alpha) = sum_k log Gamma(alpha_k) - log Gamma(sum_k alpha_k)`.
pub fn log_multinomial_beta(alpha: &[f64]) -> Result<f64> {
    if alpha.is_empty() {
        return Err(Error::EmptyInput("log_multinomial_beta needs components"));
    }
    let mut sum_log = 0.0;
    let mut total = 0.0;
    for &a in alpha {
        sum_log += log_gamma(a)?;
        total += a;
    }
    Ok(sum_log - log_gamma(total)?)
}

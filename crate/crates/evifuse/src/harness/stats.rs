//! Conflict-by-interval statistics and uncertainty density histograms.

use crate::error::{Error, Result};

pub const BUCKET_LABELS: [&str; 3] = ["low", "middle", "high"];

/// Bucketed conflict report. Buckets are half-open — low `[0, 0.3)`,
/// middle `[0.3, 0.6)` — with the high bucket closed at 1: `[0.6, 1]`.
/// `crosstab[bucket]` splits each bucket into `[clean, injected]` counts.
#[derive(Debug, Clone, PartialEq)]
pub struct ConflictStatistics {
    pub counts: [usize; 3],
    pub percentages: [f64; 3],
    pub mean: f64,
    pub crosstab: [[usize; 2]; 3],
    pub n: usize,
}

fn bucket_of(c: f64) -> usize {
    if c < 0.3 {
        0
    } else if c < 0.6 {
        1
    } else {
        2
    }
}

/// Buckets per-sample mean conflict degrees and cross-tabulates each bucket
/// against the conflict-injection flag.
pub fn conflict_statistics(conflicts: &[f64], injected: &[bool]) -> Result<ConflictStatistics> {
    if conflicts.is_empty() {
        return Err(Error::EmptyInput("conflict statistics need samples"));
    }
    if conflicts.len() != injected.len() {
        return Err(Error::DimensionMismatch {
            expected: conflicts.len(),
            got: injected.len(),
        });
    }
    let mut counts = [0usize; 3];
    let mut crosstab = [[0usize; 2]; 3];
    let mut sum = 0.0;
    for (&c, &flag) in conflicts.iter().zip(injected) {
        if !c.is_finite() || !(0.0..=1.0).contains(&c) {
            return Err(Error::Data(format!(
                "conflict degree {c} outside [0, 1]"
            )));
        }
        let b = bucket_of(c);
        counts[b] += 1;
        crosstab[b][usize::from(flag)] += 1;
        sum += c;
    }
    let n = conflicts.len();
    let percentages = counts.map(|c| 100.0 * c as f64 / n as f64);
    Ok(ConflictStatistics {
        counts,
        percentages,
        mean: sum / n as f64,
        crosstab,
        n,
    })
}

/// One histogram row: the center of an equal-width bin over `[0, 1]` and its
/// normalized density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityRow {
    pub bin_center: f64,
    pub density: f64,
}

/// Normalized histogram over `[0, 1]`: `sum(density) * bin_width = 1`.
/// Values must lie in `[0, 1]`; the value 1 falls into the last bin.
pub fn uncertainty_density(values: &[f64], n_bins: usize) -> Result<Vec<DensityRow>> {
    if values.is_empty() {
        return Err(Error::EmptyInput("density needs at least one value"));
    }
    if n_bins == 0 {
        return Err(Error::Config("density needs at least one bin".into()));
    }
    let mut counts = vec![0usize; n_bins];
    for &v in values {
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            return Err(Error::Data(format!("value {v} outside [0, 1]")));
        }
        let bin = ((v * n_bins as f64) as usize).min(n_bins - 1);
        counts[bin] += 1;
    }
    let width = 1.0 / n_bins as f64;
    let n = values.len() as f64;
    Ok(counts
        .iter()
        .enumerate()
        .map(|(i, &c)| DensityRow {
            bin_center: (i as f64 + 0.5) * width,
            density: c as f64 / (n * width),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_zero_conflicts() {
        let s = conflict_statistics(&[0.0; 4], &[false; 4]).unwrap();
        assert_eq!(s.counts, [4, 0, 0]);
        assert_eq!(s.percentages[0], 100.0);
        assert_eq!(s.mean, 0.0);
    }

    #[test]
    fn one_per_bucket() {
        let s = conflict_statistics(&[0.1, 0.4, 0.9], &[false, true, true]).unwrap();
        assert_eq!(s.counts, [1, 1, 1]);
        assert!((s.mean - 1.4 / 3.0).abs() < 1e-12);
        assert_eq!(s.crosstab, [[1, 0], [0, 1], [0, 1]]);
    }

    #[test]
    fn boundary_convention() {
        let s = conflict_statistics(&[0.3, 0.6, 1.0, 0.0], &[false; 4]).unwrap();
        // 0.3 -> middle, 0.6 -> high, 1.0 -> high, 0.0 -> low
        assert_eq!(s.counts, [1, 1, 2]);
    }

    #[test]
    fn bucket_counts_sum_to_sample_count() {
        let conflicts: Vec<f64> = (0..101).map(|i| i as f64 / 100.0).collect();
        let flags = vec![false; conflicts.len()];
        let s = conflict_statistics(&conflicts, &flags).unwrap();
        assert_eq!(s.counts.iter().sum::<usize>(), conflicts.len());
    }

    #[test]
    fn conflict_statistics_rejects_bad_input() {
        assert!(conflict_statistics(&[], &[]).is_err());
        assert!(conflict_statistics(&[0.5], &[]).is_err());
        assert!(conflict_statistics(&[1.5], &[false]).is_err());
    }

    #[test]
    fn point_mass_density() {
        let rows = uncertainty_density(&[0.5; 7], 10).unwrap();
        assert_eq!(rows.len(), 10);
        for (i, r) in rows.iter().enumerate() {
            if i == 5 {
                assert!((r.density - 10.0).abs() < 1e-12);
            } else {
                assert_eq!(r.density, 0.0);
            }
        }
    }

    #[test]
    fn density_integrates_to_one() {
        let values: Vec<f64> = (0..500).map(|i| (i as f64 * 0.618) % 1.0).collect();
        for bins in [1, 7, 20] {
            let rows = uncertainty_density(&values, bins).unwrap();
            assert_eq!(rows.len(), bins);
            let integral: f64 = rows.iter().map(|r| r.density / bins as f64).sum();
            assert!((integral - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn value_one_lands_in_last_bin() {
        let rows = uncertainty_density(&[1.0], 4).unwrap();
        assert!((rows[3].density - 4.0).abs() < 1e-12);
    }

    #[test]
    fn density_rejects_bad_input() {
        assert!(uncertainty_density(&[], 10).is_err());
        assert!(uncertainty_density(&[0.5], 0).is_err());
        assert!(uncertainty_density(&[-0.1], 10).is_err());
        assert!(uncertainty_density(&[1.1], 10).is_err());
    }
}

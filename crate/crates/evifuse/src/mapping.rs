//! Coarse-to-fine evidence redistribution for the sleep-stage hierarchy.
//!
//! Coarse classes are `(W, NREM, REM)`, fine classes `(W, N1, N2, N3, REM)`.
//! A row-stochastic 3x5 matrix redistributes coarse evidence onto the fine
//! classes: `W` and `REM` map to themselves, and `NREM` mass is split over
//! `N1`, `N2`, `N3` — evenly by default, or proportionally to observed fine
//! class frequencies.

use crate::error::{Error, Result};
use crate::opinion::Evidence;

pub const COARSE_CLASSES: usize = 3;
pub const FINE_CLASSES: usize = 5;

pub const COARSE_LABELS: [&str; COARSE_CLASSES] = ["W", "NREM", "REM"];
pub const FINE_LABELS: [&str; FINE_CLASSES] = ["W", "N1", "N2", "N3", "REM"];

/// Row-sum tolerance for the mapping matrix.
const ROW_TOLERANCE: f64 = 1e-12;

/// Coarse class of a fine class: `W -> W`, `N1/N2/N3 -> NREM`, `REM -> REM`.
///
/// Panics if `fine >= 5`.
pub fn coarse_class_of(fine: usize) -> usize {
    match fine {
        0 => 0,
        1..=3 => 1,
        4 => 2,
        _ => panic!("fine class index {fine} out of range"),
    }
}

/// How the NREM row of the mapping matrix is filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MappingStrategy {
    Uniform,
    DataDriven,
}

impl MappingStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            MappingStrategy::Uniform => "uniform",
            MappingStrategy::DataDriven => "data_driven",
        }
    }
}

impl std::fmt::Display for MappingStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MappingStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(MappingStrategy::Uniform),
            "data_driven" => Ok(MappingStrategy::DataDriven),
            other => Err(Error::Config(format!(
                "unknown mapping strategy `{other}` (expected uniform or data_driven)"
            ))),
        }
    }
}

/// Row-stochastic coarse-to-fine evidence redistribution matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingMatrix {
    entries: [[f64; FINE_CLASSES]; COARSE_CLASSES],
    strategy: MappingStrategy,
}

impl MappingMatrix {
    /// NREM evidence split evenly over `N1`, `N2`, `N3`.
    pub fn uniform() -> Self {
        let third = 1.0 / 3.0;
        Self {
            entries: [
                [1.0, 0.0, 0.0, 0.0, 0.0],
                [0.0, third, third, third, 0.0],
                [0.0, 0.0, 0.0, 0.0, 1.0],
            ],
            strategy: MappingStrategy::Uniform,
        }
    }

    /// NREM evidence split proportionally to the fine-class counts of `N1`,
    /// `N2`, `N3` (indices 1..=3 of the per-fine-class histogram). Falls back
    /// to the uniform split, with a warning, when those counts are all zero.
    pub fn data_driven(class_counts: &[u64; FINE_CLASSES]) -> Self {
        let total: u64 = class_counts[1] + class_counts[2] + class_counts[3];
        if total == 0 {
            log::warn!("all NREM class counts are zero; falling back to the uniform mapping");
            return Self::uniform();
        }
        let mut nrem_row = [0.0; FINE_CLASSES];
        for i in 1..=3 {
            nrem_row[i] = class_counts[i] as f64 / total as f64;
        }
        Self {
            entries: [
                [1.0, 0.0, 0.0, 0.0, 0.0],
                nrem_row,
                [0.0, 0.0, 0.0, 0.0, 1.0],
            ],
            strategy: MappingStrategy::DataDriven,
        }
    }

    /// Rebuilds a matrix from a stored NREM row (model deserialization).
    pub fn from_nrem_row(nrem_row: [f64; FINE_CLASSES], strategy: MappingStrategy) -> Result<Self> {
        if nrem_row[0] != 0.0 || nrem_row[4] != 0.0 {
            return Err(Error::Data(
                "NREM row may only carry mass on N1, N2, N3".into(),
            ));
        }
        let sum: f64 = nrem_row.iter().sum();
        if nrem_row.iter().any(|&x| !x.is_finite() || x < 0.0) || (sum - 1.0).abs() > ROW_TOLERANCE
        {
            return Err(Error::Data(format!(
                "NREM row must be non-negative and sum to 1, got sum {sum}"
            )));
        }
        Ok(Self {
            entries: [
                [1.0, 0.0, 0.0, 0.0, 0.0],
                nrem_row,
                [0.0, 0.0, 0.0, 0.0, 1.0],
            ],
            strategy,
        })
    }

    pub fn entries(&self) -> &[[f64; FINE_CLASSES]; COARSE_CLASSES] {
        &self.entries
    }

    pub fn strategy(&self) -> MappingStrategy {
        self.strategy
    }

    pub fn nrem_row(&self) -> &[f64; FINE_CLASSES] {
        &self.entries[1]
    }

    /// Maps a length-3 coarse evidence vector `(W, NREM, REM)` onto the five
    /// fine classes via the vector-matrix product. Total evidence is
    /// conserved because every row sums to one.
    pub fn map_evidence(&self, coarse: &Evidence) -> Result<Evidence> {
        if coarse.class_count() != COARSE_CLASSES {
            return Err(Error::DimensionMismatch {
                expected: COARSE_CLASSES,
                got: coarse.class_count(),
            });
        }
        let mut fine = [0.0; FINE_CLASSES];
        for (i, &e) in coarse.values().iter().enumerate() {
            for (j, out) in fine.iter_mut().enumerate() {
                *out += e * self.entries[i][j];
            }
        }
        Evidence::new(fine.to_vec())
    }
}

//! Versioned text serialization for trained pipelines.
//!
//! Format (line oriented, space separated, floats in shortest round-trip
//! notation so loading restores the exact bits):
//!
//! ```text
//! evifuse-model v1
//! mapping <uniform|data_driven>
//! nrem_row <5 floats>
//! heads 4
//! head <index> in_dim <d> classes <k>
//! bias <k floats>
//! row <class> <d floats>      (k lines per head)
//! ```
//!
//! The fusion strategy is an evaluation-time choice and is not stored.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fusion::FusionStrategy;
use crate::mapping::{MappingMatrix, MappingStrategy, FINE_CLASSES};
use crate::toymodel::train::{EvidenceHead, Pipeline, N_VIEWS};

const MAGIC: &str = "evifuse-model v1";

impl Pipeline {
    pub fn to_model_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(out, "mapping {}", self.mapping.strategy());
        let row = self
            .mapping
            .nrem_row()
            .iter()
            .map(|x| format!("{x}"))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(out, "nrem_row {row}");
        let _ = writeln!(out, "heads {N_VIEWS}");
        for (i, head) in self.heads.iter().enumerate() {
            let _ = writeln!(
                out,
                "head {i} in_dim {} classes {}",
                head.in_dim(),
                head.classes()
            );
            let bias = head
                .bias()
                .iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(" ");
            let _ = writeln!(out, "bias {bias}");
            for k in 0..head.classes() {
                let row = head.weights()[k * head.in_dim()..(k + 1) * head.in_dim()]
                    .iter()
                    .map(|x| format!("{x}"))
                    .collect::<Vec<_>>()
                    .join(" ");
                let _ = writeln!(out, "row {k} {row}");
            }
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_model_text())?;
        Ok(())
    }

    pub fn from_model_text(text: &str) -> Result<Pipeline> {
        let mut lines = text.lines();
        let bad = |msg: &str| Error::Data(format!("model file: {msg}"));

        if lines.next() != Some(MAGIC) {
            return Err(bad(&format!("expected header `{MAGIC}`")));
        }
        let strategy: MappingStrategy = expect_fields(lines.next(), "mapping", 1)?[0].parse()?;
        let row_fields = expect_fields(lines.next(), "nrem_row", FINE_CLASSES)?;
        let mut nrem_row = [0.0; FINE_CLASSES];
        for (slot, f) in nrem_row.iter_mut().zip(&row_fields) {
            *slot = parse_f64(f)?;
        }
        let mapping = MappingMatrix::from_nrem_row(nrem_row, strategy)?;

        let n_heads: usize = expect_fields(lines.next(), "heads", 1)?[0]
            .parse()
            .map_err(|_| bad("bad head count"))?;
        if n_heads != N_VIEWS {
            return Err(bad(&format!("expected {N_VIEWS} heads, got {n_heads}")));
        }

        let mut heads = Vec::with_capacity(N_VIEWS);
        for i in 0..N_VIEWS {
            let fields = expect_fields(lines.next(), "head", 5)?;
            if fields[0] != i.to_string() || fields[1] != "in_dim" || fields[3] != "classes" {
                return Err(bad(&format!("malformed head {i} header")));
            }
            let in_dim: usize = fields[2].parse().map_err(|_| bad("bad in_dim"))?;
            let classes: usize = fields[4].parse().map_err(|_| bad("bad class count"))?;

            let bias_fields = expect_fields(lines.next(), "bias", classes)?;
            let bias = bias_fields
                .iter()
                .map(|f| parse_f64(f))
                .collect::<Result<Vec<f64>>>()?;

            let mut weights = Vec::with_capacity(classes * in_dim);
            for k in 0..classes {
                let mut row_fields = expect_fields(lines.next(), "row", in_dim + 1)?;
                if row_fields[0] != k.to_string() {
                    return Err(bad(&format!("expected row {k} of head {i}")));
                }
                for f in row_fields.drain(1..) {
                    weights.push(parse_f64(&f)?);
                }
            }
            heads.push(EvidenceHead::from_parts(in_dim, classes, weights, bias)?);
        }
        if lines.next().is_some() {
            return Err(bad("trailing content after last head"));
        }

        let heads: [EvidenceHead; N_VIEWS] = heads
            .try_into()
            .map_err(|_| bad("wrong number of heads"))?;
        Ok(Pipeline {
            heads,
            mapping,
            fusion: FusionStrategy::Cmam,
        })
    }

    pub fn load(path: &Path) -> Result<Pipeline> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Data(format!("cannot read model file {}: {e}", path.display()))
        })?;
        Self::from_model_text(&text)
    }
}

fn expect_fields(line: Option<&str>, keyword: &str, n_values: usize) -> Result<Vec<String>> {
    let line = line.ok_or_else(|| Error::Data(format!("model file: missing `{keyword}` line")))?;
    let mut parts = line.split_whitespace();
    if parts.next() != Some(keyword) {
        return Err(Error::Data(format!(
            "model file: expected `{keyword}` line, got `{line}`"
        )));
    }
    let values: Vec<String> = parts.map(str::to_string).collect();
    if values.len() != n_values {
        return Err(Error::Data(format!(
            "model file: `{keyword}` line needs {n_values} values, got {}",
            values.len()
        )));
    }
    Ok(values)
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::Data(format!("model file: `{s}` is not a number")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toymodel::data::{generate_dataset, SyntheticConfig};
    use crate::toymodel::train::{train, PipelineConfig};

    #[test]
    fn model_round_trips_bit_exact() {
        let data = generate_dataset(&SyntheticConfig {
            n_features: 6,
            samples_per_class: 6,
            noise_sigma: [1.0, 1.0],
            conflict_rate: 0.2,
            seed: 21,
        })
        .unwrap();
        let (pipeline, _) = train(
            &PipelineConfig {
                epochs: 12,
                mapping: MappingStrategy::DataDriven,
                ..Default::default()
            },
            &data,
        )
        .unwrap();
        let text = pipeline.to_model_text();
        let loaded = Pipeline::from_model_text(&text).unwrap();
        assert_eq!(loaded.heads, pipeline.heads);
        assert_eq!(loaded.mapping, pipeline.mapping);
        // and serialization is stable
        assert_eq!(loaded.to_model_text(), text);
    }

    #[test]
    fn rejects_malformed_models() {
        assert!(Pipeline::from_model_text("not a model").is_err());
        assert!(Pipeline::from_model_text("evifuse-model v1\nmapping nonsense\n").is_err());
        let truncated = "evifuse-model v1\nmapping uniform\nnrem_row 0 0.5 0.25 0.25 0\nheads 4\n";
        assert!(Pipeline::from_model_text(truncated).is_err());
    }
}

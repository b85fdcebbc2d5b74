//! CSV ingestion and export for feature views and conflict metadata.
//!
//! View files carry a header naming the feature columns plus a `label`
//! column; rows align across views by position. Feature values are written
//! in shortest round-trip notation so that export followed by ingestion
//! reproduces the dataset exactly.

use std::path::Path;

use crate::error::{Error, Result};
use crate::toymodel::{MultiViewDataset, SampleMeta, View, N_CLASSES};

/// One parsed view file.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewTable {
    pub feature_names: Vec<String>,
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

fn data_err(path: &Path, detail: String) -> Error {
    Error::Data(format!("{}: {detail}", path.display()))
}

/// Reads one view CSV. Labels must be integers in `[0, n_classes)`.
pub fn read_view_csv(path: &Path, n_classes: usize) -> Result<ViewTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| data_err(path, format!("cannot open: {e}")))?;
    let headers = reader
        .headers()
        .map_err(|e| data_err(path, format!("bad header row: {e}")))?
        .clone();
    let label_col = headers
        .iter()
        .position(|h| h == "label")
        .ok_or_else(|| data_err(path, "missing `label` column".into()))?;
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != label_col)
        .map(|(_, h)| h.to_string())
        .collect();

    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let row = row_idx + 2; // 1-based, after the header
        let record = record.map_err(|e| data_err(path, format!("row {row}: {e}")))?;
        if record.len() != headers.len() {
            return Err(data_err(
                path,
                format!(
                    "row {row}: expected {} fields, got {}",
                    headers.len(),
                    record.len()
                ),
            ));
        }
        let mut feat = Vec::with_capacity(feature_names.len());
        for (col, field) in record.iter().enumerate() {
            if col == label_col {
                let label: i64 = field.parse().map_err(|_| {
                    data_err(path, format!("row {row}, column `label`: `{field}` is not an integer"))
                })?;
                if label < 0 || label as usize >= n_classes {
                    return Err(data_err(
                        path,
                        format!(
                            "row {row}, column `label`: {label} out of range [0, {n_classes})"
                        ),
                    ));
                }
                labels.push(label as usize);
            } else {
                let value: f64 = field.parse().map_err(|_| {
                    data_err(
                        path,
                        format!(
                            "row {row}, column `{}`: `{field}` is not a number",
                            &headers[col]
                        ),
                    )
                })?;
                if !value.is_finite() {
                    return Err(data_err(
                        path,
                        format!("row {row}, column `{}`: non-finite value", &headers[col]),
                    ));
                }
                feat.push(value);
            }
        }
        features.push(feat);
    }
    Ok(ViewTable {
        feature_names,
        features,
        labels,
    })
}

/// Reads every view file and validates cross-view alignment: equal row
/// counts and identical label columns.
pub fn ingest_features(paths: &[&Path], n_classes: usize) -> Result<Vec<ViewTable>> {
    if paths.is_empty() {
        return Err(Error::EmptyInput("ingestion needs at least one view file"));
    }
    let tables: Vec<ViewTable> = paths
        .iter()
        .map(|p| read_view_csv(p, n_classes))
        .collect::<Result<_>>()?;
    let first = &tables[0];
    for (table, path) in tables.iter().zip(paths).skip(1) {
        if table.labels.len() != first.labels.len() {
            return Err(Error::Data(format!(
                "{} has {} rows but {} has {} rows",
                paths[0].display(),
                first.labels.len(),
                path.display(),
                table.labels.len()
            )));
        }
        if let Some(i) = first
            .labels
            .iter()
            .zip(&table.labels)
            .position(|(a, b)| a != b)
        {
            return Err(Error::Data(format!(
                "label mismatch at row {} between {} and {}",
                i + 2,
                paths[0].display(),
                path.display()
            )));
        }
    }
    Ok(tables)
}

/// Assembles the two-view dataset the pipeline consumes. Conflict flags are
/// taken from a metadata file when one is supplied, otherwise all samples
/// count as clean.
pub fn dataset_from_tables(
    view_a: ViewTable,
    view_b: ViewTable,
    meta: Option<Vec<SampleMeta>>,
) -> Result<MultiViewDataset> {
    let n = view_a.labels.len();
    if n == 0 {
        return Err(Error::Data("dataset has no rows".into()));
    }
    let d = view_a.features[0].len();
    for (i, f) in view_a.features.iter().chain(&view_b.features).enumerate() {
        if f.len() != d {
            return Err(Error::Data(format!(
                "inconsistent feature width at row {} (expected {d}, got {})",
                (i % n) + 2,
                f.len()
            )));
        }
    }
    let meta = match meta {
        Some(m) => {
            if m.len() != n {
                return Err(Error::Data(format!(
                    "metadata has {} rows but views have {n}",
                    m.len()
                )));
            }
            m
        }
        None => vec![
            SampleMeta {
                conflicted: false,
                view: None,
                resampled_class: None,
            };
            n
        ],
    };
    Ok(MultiViewDataset {
        view_a: view_a.features,
        view_b: view_b.features,
        labels: view_a.labels,
        meta,
        n_features: d,
    })
}

/// Writes one view of a dataset: feature columns `f0..f{d-1}` plus `label`.
pub fn write_view_csv(path: &Path, features: &[Vec<f64>], labels: &[usize]) -> Result<()> {
    let d = features.first().map_or(0, Vec::len);
    let mut out = String::new();
    for j in 0..d {
        out.push_str(&format!("f{j},"));
    }
    out.push_str("label\n");
    for (row, &label) in features.iter().zip(labels) {
        for v in row {
            out.push_str(&format!("{v},"));
        }
        out.push_str(&format!("{label}\n"));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Writes the conflict metadata: `index,label,conflicted,view,resampled_class`.
pub fn write_meta_csv(path: &Path, labels: &[usize], meta: &[SampleMeta]) -> Result<()> {
    let mut out = String::from("index,label,conflicted,view,resampled_class\n");
    for (i, (label, m)) in labels.iter().zip(meta).enumerate() {
        let view = m.view.map_or("", |v| v.name());
        let resampled = m
            .resampled_class
            .map_or(String::new(), |c| c.to_string());
        out.push_str(&format!(
            "{i},{label},{},{view},{resampled}\n",
            u8::from(m.conflicted)
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads conflict metadata written by [`write_meta_csv`].
pub fn read_meta_csv(path: &Path) -> Result<Vec<SampleMeta>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| data_err(path, format!("cannot open: {e}")))?;
    let mut meta = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let row = row_idx + 2;
        let record = record.map_err(|e| data_err(path, format!("row {row}: {e}")))?;
        if record.len() != 5 {
            return Err(data_err(path, format!("row {row}: expected 5 fields")));
        }
        let conflicted = match &record[2] {
            "0" => false,
            "1" => true,
            other => {
                return Err(data_err(
                    path,
                    format!("row {row}, column `conflicted`: `{other}` is not 0/1"),
                ))
            }
        };
        let view = match &record[3] {
            "" => None,
            "a" => Some(View::A),
            "b" => Some(View::B),
            other => {
                return Err(data_err(
                    path,
                    format!("row {row}, column `view`: unknown view `{other}`"),
                ))
            }
        };
        let resampled_class = if record[4].is_empty() {
            None
        } else {
            Some(record[4].parse().map_err(|_| {
                data_err(path, format!("row {row}, column `resampled_class`: not an integer"))
            })?)
        };
        meta.push(SampleMeta {
            conflicted,
            view,
            resampled_class,
        });
    }
    Ok(meta)
}

/// Writes both views plus metadata under a prefix (`<prefix>_view_a.csv`,
/// `<prefix>_view_b.csv`, `<prefix>_meta.csv`) and returns the file names.
pub fn export_dataset(dir: &Path, prefix: &str, data: &MultiViewDataset) -> Result<[String; 3]> {
    let names = [
        format!("{prefix}_view_a.csv"),
        format!("{prefix}_view_b.csv"),
        format!("{prefix}_meta.csv"),
    ];
    write_view_csv(&dir.join(&names[0]), &data.view_a, &data.labels)?;
    write_view_csv(&dir.join(&names[1]), &data.view_b, &data.labels)?;
    write_meta_csv(&dir.join(&names[2]), &data.labels, &data.meta)?;
    Ok(names)
}

/// Loads a two-view dataset previously written by [`export_dataset`] (or any
/// pair of aligned view CSVs), with `n_classes` fixed by the pipeline.
pub fn load_dataset(
    view_a: &Path,
    view_b: &Path,
    meta: Option<&Path>,
) -> Result<MultiViewDataset> {
    let mut tables = ingest_features(&[view_a, view_b], N_CLASSES)?;
    let table_b = tables.pop().expect("two tables");
    let table_a = tables.pop().expect("two tables");
    let meta = meta.map(read_meta_csv).transpose()?;
    dataset_from_tables(table_a, table_b, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toymodel::{generate_dataset, SyntheticConfig};

    fn sample_dataset() -> MultiViewDataset {
        generate_dataset(&SyntheticConfig {
            n_features: 6,
            samples_per_class: 4,
            noise_sigma: [1.0, 0.5],
            conflict_rate: 0.25,
            seed: 33,
        })
        .unwrap()
    }

    #[test]
    fn export_then_ingest_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        let data = sample_dataset();
        export_dataset(dir.path(), "train", &data).unwrap();
        let loaded = load_dataset(
            &dir.path().join("train_view_a.csv"),
            &dir.path().join("train_view_b.csv"),
            Some(&dir.path().join("train_meta.csv")),
        )
        .unwrap();
        assert_eq!(loaded, data);
    }

    #[test]
    fn ingest_accepts_consistent_views() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        std::fs::write(&a, "f0,f1,label\n1.0,2.0,0\n3.0,4.0,1\n").unwrap();
        std::fs::write(&b, "g0,label\n9.0,0\n8.0,1\n").unwrap();
        let tables = ingest_features(&[&a, &b], 5).unwrap();
        assert_eq!(tables[0].features.len(), 2);
        assert_eq!(tables[1].feature_names, vec!["g0"]);
    }

    #[test]
    fn row_count_mismatch_names_both_counts() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        std::fs::write(&a, "f0,label\n1.0,0\n2.0,1\n3.0,0\n4.0,1\n").unwrap();
        std::fs::write(&b, "g0,label\n1.0,0\n2.0,1\n3.0,0\n4.0,1\n5.0,0\n").unwrap();
        let err = ingest_features(&[&a, &b], 5).unwrap_err().to_string();
        assert!(err.contains("4 rows") && err.contains("5 rows"), "{err}");
        assert!(err.contains("a.csv") && err.contains("b.csv"), "{err}");
    }

    #[test]
    fn label_out_of_range_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        std::fs::write(&a, "f0,label\n1.0,7\n").unwrap();
        let err = read_view_csv(&a, 5).unwrap_err().to_string();
        assert!(err.contains("row 2") && err.contains("7"), "{err}");
    }

    #[test]
    fn non_numeric_cell_names_location() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        std::fs::write(&a, "f0,f1,label\n1.0,oops,0\n").unwrap();
        let err = read_view_csv(&a, 5).unwrap_err().to_string();
        assert!(err.contains("row 2") && err.contains("`f1`"), "{err}");
    }

    #[test]
    fn missing_label_column_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        std::fs::write(&a, "f0,f1\n1.0,2.0\n").unwrap();
        let err = read_view_csv(&a, 5).unwrap_err().to_string();
        assert!(err.contains("label"), "{err}");
    }

    #[test]
    fn label_disagreement_across_views_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        std::fs::write(&a, "f0,label\n1.0,0\n2.0,1\n").unwrap();
        std::fs::write(&b, "g0,label\n1.0,0\n2.0,2\n").unwrap();
        let err = ingest_features(&[&a, &b], 5).unwrap_err().to_string();
        assert!(err.contains("label mismatch at row 3"), "{err}");
    }
}

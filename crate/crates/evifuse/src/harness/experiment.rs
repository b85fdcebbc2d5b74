//! End-to-end experiment runner: train once, evaluate every configured
//! fusion strategy on the same trained heads, and write a reproducible
//! report bundle.
//!
//! Output files (all deterministic byte-for-byte for a fixed config):
//!
//! * `config_resolved.txt` — the effective configuration
//! * `model.txt` — trained heads and mapping matrix
//! * `loss_trace.csv` — per-epoch per-view training losses
//! * `metrics.json` — accuracy / macro-F1 / per-class F1 per strategy
//! * `confusion_<strategy>.csv` — confusion counts per strategy
//! * `uncertainty_density_<strategy>.csv` — joint-uncertainty histograms
//! * `conflict_stats.csv` — conflict buckets vs injection flags
//! * `predictions.csv` — per-sample predictions and uncertainties

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::fusion::FusionStrategy;
use crate::harness::config::ExperimentConfig;
use crate::harness::csvio::load_dataset;
use crate::harness::fmt::g9;
use crate::harness::metrics::{compute_metrics, MetricsReport};
use crate::harness::stats::{conflict_statistics, uncertainty_density, ConflictStatistics, BUCKET_LABELS};
use crate::mapping::FINE_LABELS;
use crate::toymodel::{generate_dataset, train, EpochTrace, Inference, MultiViewDataset, N_CLASSES};

/// In-memory results of one experiment run.
#[derive(Debug)]
pub struct ExperimentOutcome {
    pub strategy_metrics: Vec<(FusionStrategy, MetricsReport)>,
    pub mean_joint_uncertainty: Vec<(FusionStrategy, f64)>,
    pub conflict_stats: ConflictStatistics,
    pub files: Vec<String>,
}

impl ExperimentOutcome {
    pub fn metrics_for(&self, strategy: FusionStrategy) -> Option<&MetricsReport> {
        self.strategy_metrics
            .iter()
            .find(|(s, _)| *s == strategy)
            .map(|(_, m)| m)
    }
}

fn materialize(cfg: &ExperimentConfig) -> Result<(MultiViewDataset, MultiViewDataset)> {
    let train_ds = match cfg.external.train_set() {
        Some((a, b)) => load_dataset(a, b, cfg.external.meta.as_deref())?,
        None => generate_dataset(&cfg.train_synthetic())?,
    };
    let test_ds = match cfg.external.test_set() {
        Some((a, b)) => load_dataset(a, b, cfg.external.test_meta.as_deref())?,
        None => generate_dataset(&cfg.test_synthetic())?,
    };
    Ok((train_ds, test_ds))
}

/// Trains on the train split, evaluates every configured strategy on the
/// test split using the same trained heads, and writes the report bundle.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let mut files = Vec::new();
    let track = |name: &str, out: &mut Vec<String>| out.push(name.to_string());

    std::fs::write(out_dir.join("config_resolved.txt"), cfg.to_config_text())?;
    track("config_resolved.txt", &mut files);

    let (train_ds, test_ds) = materialize(cfg)?;
    let (pipeline, trace) = train(&cfg.pipeline_config(), &train_ds)?;

    pipeline.save(&out_dir.join("model.txt"))?;
    track("model.txt", &mut files);

    write_loss_trace(&out_dir.join("loss_trace.csv"), &trace)?;
    track("loss_trace.csv", &mut files);

    // evaluate each strategy on the shared trained heads
    let mut strategy_metrics = Vec::new();
    let mut mean_joint_uncertainty = Vec::new();
    let mut per_strategy_inferences: Vec<(FusionStrategy, Vec<Inference>)> = Vec::new();
    for &strategy in &cfg.strategies {
        let evaluator = pipeline.with_fusion(strategy);
        let inferences = evaluator.infer_dataset(&test_ds)?;
        let predictions: Vec<usize> = inferences.iter().map(|i| i.predicted).collect();
        let metrics = compute_metrics(&predictions, &test_ds.labels, N_CLASSES)?;
        strategy_metrics.push((strategy, metrics));

        let uncertainties: Vec<f64> = inferences.iter().map(|i| i.joint.uncertainty()).collect();
        mean_joint_uncertainty.push((
            strategy,
            uncertainties.iter().sum::<f64>() / uncertainties.len() as f64,
        ));

        let name = format!("confusion_{strategy}.csv");
        write_confusion(
            &out_dir.join(&name),
            &strategy_metrics.last().unwrap().1,
        )?;
        track(&name, &mut files);

        let name = format!("uncertainty_density_{strategy}.csv");
        write_density(&out_dir.join(&name), &uncertainties, cfg.density_bins)?;
        track(&name, &mut files);

        per_strategy_inferences.push((strategy, inferences));
    }

    // conflict statistics are strategy independent (per-view opinions are
    // shared); use the first strategy's inferences
    let first = &per_strategy_inferences[0].1;
    let conflicts: Vec<f64> = first.iter().map(|i| i.mean_conflict).collect();
    let flags: Vec<bool> = test_ds.meta.iter().map(|m| m.conflicted).collect();
    let conflict_stats = conflict_statistics(&conflicts, &flags)?;
    write_conflict_stats(&out_dir.join("conflict_stats.csv"), &conflict_stats)?;
    track("conflict_stats.csv", &mut files);

    write_predictions(
        &out_dir.join("predictions.csv"),
        &test_ds,
        &conflicts,
        &per_strategy_inferences,
    )?;
    track("predictions.csv", &mut files);

    write_metrics_json(&out_dir.join("metrics.json"), &strategy_metrics)?;
    track("metrics.json", &mut files);

    Ok(ExperimentOutcome {
        strategy_metrics,
        mean_joint_uncertainty,
        conflict_stats,
        files,
    })
}

fn write_loss_trace(path: &Path, trace: &[EpochTrace]) -> Result<()> {
    let mut out = String::from("epoch,lambda");
    for v in 1..=4 {
        let _ = write!(out, ",l_acc_f{v},l_kl_f{v}");
    }
    out.push_str(",total\n");
    for t in trace {
        let _ = write!(out, "{},{}", t.epoch, g9(t.lambda));
        for r in &t.per_view {
            let _ = write!(out, ",{},{}", g9(r.l_acc), g9(r.l_kl));
        }
        let _ = writeln!(out, ",{}", g9(t.total));
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn write_confusion(path: &Path, metrics: &MetricsReport) -> Result<()> {
    let mut out = String::from("true_class");
    for label in FINE_LABELS {
        let _ = write!(out, ",pred_{label}");
    }
    out.push('\n');
    for (c, row) in metrics.confusion.iter().enumerate() {
        let _ = write!(out, "{}", FINE_LABELS[c]);
        for count in row {
            let _ = write!(out, ",{count}");
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn write_density(path: &Path, values: &[f64], bins: usize) -> Result<()> {
    let rows = uncertainty_density(values, bins)?;
    let mut out = String::from("bin_center,density\n");
    for r in rows {
        let _ = writeln!(out, "{},{}", g9(r.bin_center), g9(r.density));
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn write_conflict_stats(path: &Path, stats: &ConflictStatistics) -> Result<()> {
    let mut out = String::from("bucket,count,percent,n_clean,n_injected,mean_conflict\n");
    for (i, label) in BUCKET_LABELS.iter().enumerate() {
        let _ = writeln!(
            out,
            "{label},{},{},{},{},",
            stats.counts[i],
            g9(stats.percentages[i]),
            stats.crosstab[i][0],
            stats.crosstab[i][1],
        );
    }
    let clean: usize = stats.crosstab.iter().map(|r| r[0]).sum();
    let injected: usize = stats.crosstab.iter().map(|r| r[1]).sum();
    let _ = writeln!(
        out,
        "overall,{},100,{clean},{injected},{}",
        stats.n,
        g9(stats.mean)
    );
    std::fs::write(path, out)?;
    Ok(())
}

fn write_predictions(
    path: &Path,
    test_ds: &MultiViewDataset,
    conflicts: &[f64],
    per_strategy: &[(FusionStrategy, Vec<Inference>)],
) -> Result<()> {
    let mut out = String::from("index,label,conflicted,mean_conflict");
    for (s, _) in per_strategy {
        let _ = write!(out, ",pred_{s},uncertainty_{s}");
    }
    out.push('\n');
    for i in 0..test_ds.len() {
        let _ = write!(
            out,
            "{i},{},{},{}",
            test_ds.labels[i],
            u8::from(test_ds.meta[i].conflicted),
            g9(conflicts[i])
        );
        for (_, inferences) in per_strategy {
            let _ = write!(
                out,
                ",{},{}",
                inferences[i].predicted,
                g9(inferences[i].joint.uncertainty())
            );
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn write_metrics_json(
    path: &Path,
    strategy_metrics: &[(FusionStrategy, MetricsReport)],
) -> Result<()> {
    let mut out = String::from("{\n");
    for (i, (strategy, m)) in strategy_metrics.iter().enumerate() {
        let f1s: Vec<String> = m.per_class_f1.iter().map(|&x| g9(x)).collect();
        let _ = write!(
            out,
            "  \"{strategy}\": {{\n    \"acc\": {},\n    \"mf1\": {},\n    \"per_class_f1\": [{}],\n    \"n_samples\": {}\n  }}",
            g9(m.accuracy),
            g9(m.macro_f1),
            f1s.join(", "),
            m.n_samples
        );
        out.push_str(if i + 1 < strategy_metrics.len() { ",\n" } else { "\n" });
    }
    out.push_str("}\n");
    std::fs::write(path, out)?;
    Ok(())
}

/// Human-readable summary printed by the CLI after a run.
pub fn format_summary(outcome: &ExperimentOutcome) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "strategy              acc        mf1");
    for (s, m) in &outcome.strategy_metrics {
        let _ = writeln!(out, "{:<20} {:<10} {}", s.name(), g9(m.accuracy), g9(m.macro_f1));
    }
    let _ = writeln!(
        out,
        "mean joint uncertainty: {}",
        outcome
            .mean_joint_uncertainty
            .iter()
            .map(|(s, u)| format!("{s}={}", g9(*u)))
            .collect::<Vec<_>>()
            .join(", ")
    );
    let cs = &outcome.conflict_stats;
    let _ = writeln!(
        out,
        "conflict buckets (low/middle/high): {}/{}/{}  mean {}",
        cs.counts[0],
        cs.counts[1],
        cs.counts[2],
        g9(cs.mean)
    );
    let _ = writeln!(out, "files: {}", outcome.files.join(", "));
    out
}

/// The canonical report-bundle file list for a configured strategy set.
pub fn expected_files(strategies: &[FusionStrategy]) -> Vec<String> {
    let mut files = vec![
        "config_resolved.txt".to_string(),
        "model.txt".to_string(),
        "loss_trace.csv".to_string(),
    ];
    for s in strategies {
        files.push(format!("confusion_{s}.csv"));
        files.push(format!("uncertainty_density_{s}.csv"));
    }
    files.push("conflict_stats.csv".to_string());
    files.push("predictions.csv".to_string());
    files.push("metrics.json".to_string());
    files
}

/// Re-evaluates a saved pipeline against a dataset (the `eval` subcommand).
pub fn evaluate_model(
    model_path: &Path,
    cfg: &ExperimentConfig,
    out_dir: &Path,
) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let pipeline = crate::toymodel::Pipeline::load(model_path)?;
    let test_ds = match cfg.external.test_set() {
        Some((a, b)) => load_dataset(a, b, cfg.external.test_meta.as_deref())?,
        None => generate_dataset(&cfg.test_synthetic())?,
    };

    let mut files = Vec::new();
    let mut strategy_metrics = Vec::new();
    let mut mean_joint_uncertainty = Vec::new();
    let mut per_strategy_inferences = Vec::new();
    for &strategy in &cfg.strategies {
        let evaluator = pipeline.with_fusion(strategy);
        let inferences = evaluator.infer_dataset(&test_ds)?;
        let predictions: Vec<usize> = inferences.iter().map(|i| i.predicted).collect();
        let metrics = compute_metrics(&predictions, &test_ds.labels, N_CLASSES)?;
        let uncertainties: Vec<f64> = inferences.iter().map(|i| i.joint.uncertainty()).collect();
        mean_joint_uncertainty.push((
            strategy,
            uncertainties.iter().sum::<f64>() / uncertainties.len() as f64,
        ));
        let name = format!("confusion_{strategy}.csv");
        write_confusion(&out_dir.join(&name), &metrics)?;
        files.push(name);
        strategy_metrics.push((strategy, metrics));
        per_strategy_inferences.push((strategy, inferences));
    }

    let first = &per_strategy_inferences[0].1;
    let conflicts: Vec<f64> = first.iter().map(|i| i.mean_conflict).collect();
    let flags: Vec<bool> = test_ds.meta.iter().map(|m| m.conflicted).collect();
    let conflict_stats = conflict_statistics(&conflicts, &flags)?;

    write_metrics_json(&out_dir.join("metrics.json"), &strategy_metrics)?;
    files.push("metrics.json".to_string());

    Ok(ExperimentOutcome {
        strategy_metrics,
        mean_joint_uncertainty,
        conflict_stats,
        files,
    })
}

/// Writes dataset CSVs for the `gen` subcommand and returns the file names.
pub fn generate_to_dir(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<String>> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let train_ds = generate_dataset(&cfg.train_synthetic())?;
    let test_ds = generate_dataset(&cfg.test_synthetic())?;
    let mut files = Vec::new();
    files.extend(crate::harness::csvio::export_dataset(out_dir, "train", &train_ds)?);
    files.extend(crate::harness::csvio::export_dataset(out_dir, "test", &test_ds)?);
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_config() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.set("dataset.samples_per_class", "8").unwrap();
        cfg.set("dataset.test_samples_per_class", "6").unwrap();
        cfg.set("dataset.n_features", "6").unwrap();
        cfg.set("pipeline.epochs", "25").unwrap();
        cfg
    }

    #[test]
    fn writes_exactly_the_documented_file_set() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = quick_config();
        let outcome = run_experiment(&cfg, dir.path()).unwrap();
        let mut expected = expected_files(&cfg.strategies);
        expected.sort();
        let mut got: Vec<String> = std::fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        got.sort();
        assert_eq!(got, expected);
        let mut reported = outcome.files.clone();
        reported.sort();
        assert_eq!(reported, expected);
    }

    #[test]
    fn strategies_share_one_training_run() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = quick_config();
        let outcome = run_experiment(&cfg, dir.path()).unwrap();
        assert_eq!(outcome.strategy_metrics.len(), 2);
        // identical trained heads: evaluating the saved model reproduces the
        // metrics of the run that trained it
        let eval_dir = tempfile::tempdir().unwrap();
        let re = evaluate_model(&dir.path().join("model.txt"), &cfg, eval_dir.path()).unwrap();
        for ((s1, m1), (s2, m2)) in outcome.strategy_metrics.iter().zip(&re.strategy_metrics) {
            assert_eq!(s1, s2);
            assert_eq!(m1, m2);
        }
    }

    #[test]
    fn reruns_are_byte_identical() {
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        let cfg = quick_config();
        run_experiment(&cfg, d1.path()).unwrap();
        run_experiment(&cfg, d2.path()).unwrap();
        for name in expected_files(&cfg.strategies) {
            let a = std::fs::read(d1.path().join(&name)).unwrap();
            let b = std::fs::read(d2.path().join(&name)).unwrap();
            assert_eq!(a, b, "{name} differs between runs");
        }
    }

    #[test]
    fn metrics_json_is_valid_shape() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = quick_config();
        run_experiment(&cfg, dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("metrics.json")).unwrap();
        assert!(text.starts_with("{\n"));
        assert!(text.contains("\"cmam\""));
        assert!(text.contains("\"average_evidence\""));
        assert!(text.contains("\"acc\""));
        assert!(text.contains("\"per_class_f1\""));
        // crude balance check
        assert_eq!(text.matches('{').count(), text.matches('}').count());
    }

    #[test]
    fn external_csv_round_trip_matches_synthetic_run() {
        let data_dir = tempfile::tempdir().unwrap();
        let cfg = quick_config();
        generate_to_dir(&cfg, data_dir.path()).unwrap();

        let mut ext_cfg = cfg.clone();
        for (key, name) in [
            ("dataset.view_a_csv", "train_view_a.csv"),
            ("dataset.view_b_csv", "train_view_b.csv"),
            ("dataset.meta_csv", "train_meta.csv"),
            ("dataset.test_view_a_csv", "test_view_a.csv"),
            ("dataset.test_view_b_csv", "test_view_b.csv"),
            ("dataset.test_meta_csv", "test_meta.csv"),
        ] {
            ext_cfg
                .set(key, data_dir.path().join(name).to_str().unwrap())
                .unwrap();
        }

        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        let synth = run_experiment(&cfg, d1.path()).unwrap();
        let external = run_experiment(&ext_cfg, d2.path()).unwrap();
        for ((s1, m1), (s2, m2)) in synth
            .strategy_metrics
            .iter()
            .zip(&external.strategy_metrics)
        {
            assert_eq!(s1, s2);
            assert_eq!(m1, m2);
        }
    }
}

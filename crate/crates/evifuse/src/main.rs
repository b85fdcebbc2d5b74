//! `evifuse` — CLI for the conflict-aware evidential fusion library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use evifuse::error::Error;
use evifuse::fusion::{
    average_fuse, cmam_fuse_many, conflict_degree, harmonic_reference_fuse_many, predicted_class,
    FusionStrategy,
};
use evifuse::harness::config::ExperimentConfig;
use evifuse::harness::experiment::{
    evaluate_model, format_summary, generate_to_dir, run_experiment,
};
use evifuse::harness::fmt::g9;
use evifuse::harness::stats::uncertainty_density;
use evifuse::mapping::{MappingMatrix, COARSE_CLASSES, FINE_CLASSES};
use evifuse::opinion::{dirichlet_to_opinion, evidence_to_dirichlet, Evidence, Opinion};

const CONFIG_KEY_HELP: &str = "\
Config file format: one `section.key = value` per line; `#` starts a comment.

  dataset.n_features            features per view (default 8, min 5)
  dataset.samples_per_class     train samples per class (default 40)
  dataset.test_samples_per_class  test samples per class (default 25)
  dataset.noise_sigma           Gaussian noise sigma, both views (default 1.0)
  dataset.noise_sigma_a         per-view override for view A
  dataset.noise_sigma_b         per-view override for view B
  dataset.conflict_rate         fraction of samples with one view resampled
                                from a wrong class (default 0.3)
  dataset.seed                  RNG seed (default 7; --seed overrides)
  dataset.view_a_csv            external train view A (skips the generator)
  dataset.view_b_csv            external train view B
  dataset.meta_csv              optional conflict metadata for the train set
  dataset.test_view_a_csv       external test view A
  dataset.test_view_b_csv       external test view B
  dataset.test_meta_csv         optional conflict metadata for the test set
  pipeline.learning_rate        gradient-descent step size (default 0.1)
  pipeline.momentum             momentum coefficient (default 0.9)
  pipeline.weight_decay         decoupled L2 decay on weights (default 0.0)
  pipeline.epochs               training epochs (default 200)
  pipeline.batch_size           minibatch size; 0 = full batch (default 0)
  pipeline.fusion               cmam | average_evidence | harmonic_reference
  mapping.strategy              uniform | data_driven (default uniform)
  experiment.strategies         comma list evaluated by `report`/`eval`
                                (default cmam,average_evidence)
  report.density_bins           uncertainty histogram bins (default 20)

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.";

#[derive(Parser)]
#[command(
    name = "evifuse",
    version,
    about = "Conflict-aware evidential fusion: train, fuse, and report",
    after_long_help = CONFIG_KEY_HELP
)]
struct Cli {
    /// Configuration file (`section.key = value` lines)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Overrides `dataset.seed`
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Output directory
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic train/test datasets and write them as CSV
    Gen,
    /// Train the four evidence heads; write model.txt and loss_trace.csv
    Train,
    /// Evaluate a saved model with the configured fusion strategies
    Eval {
        /// Model file (default: <out>/model.txt)
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
    },
    /// Fuse evidence vectors given inline or from a CSV file
    Fuse {
        /// Comma-separated evidence vector; repeat per view. Length-3
        /// vectors are coarse (W,NREM,REM) and are mapped to the five fine
        /// classes before fusion when mixed with length-5 vectors.
        #[arg(long = "evidence", value_name = "V1,V2,...")]
        evidence: Vec<String>,
        /// Headerless CSV of evidence vectors, one per row
        #[arg(long, value_name = "PATH")]
        file: Option<PathBuf>,
        /// cmam | average_evidence | harmonic_reference
        #[arg(long, default_value = "cmam")]
        strategy: String,
    },
    /// Normalized histogram of values in [0,1], one per input line
    Density {
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
        #[arg(long, default_value_t = 20)]
        bins: usize,
    },
    /// Run the full experiment (train + evaluate every strategy + reports)
    Report,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) => 1,
        Error::Numerical(_) | Error::Domain(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Error> {
    let cfg = load_config(&cli)?;
    match &cli.command {
        Command::Gen => {
            let files = generate_to_dir(&cfg, &cli.out)?;
            println!("wrote {} to {}", files.join(", "), cli.out.display());
        }
        Command::Train => {
            let outcome = run_train(&cfg, &cli)?;
            println!("{outcome}");
        }
        Command::Eval { model } => {
            let model_path = model.clone().unwrap_or_else(|| cli.out.join("model.txt"));
            let outcome = evaluate_model(&model_path, &cfg, &cli.out)?;
            print!("{}", format_summary(&outcome));
        }
        Command::Fuse {
            evidence,
            file,
            strategy,
        } => {
            let strategy: FusionStrategy = strategy.parse()?;
            let vectors = collect_evidence(evidence, file.as_deref())?;
            run_fuse(&vectors, strategy)?;
        }
        Command::Density { input, bins } => {
            let values = read_values(input)?;
            let rows = uncertainty_density(&values, *bins)?;
            println!("bin_center,density");
            for r in rows {
                println!("{},{}", g9(r.bin_center), g9(r.density));
            }
        }
        Command::Report => {
            let outcome = run_experiment(&cfg, &cli.out)?;
            print!("{}", format_summary(&outcome));
        }
    }
    Ok(())
}

fn run_train(cfg: &ExperimentConfig, cli: &Cli) -> Result<String, Error> {
    use evifuse::harness::csvio::load_dataset;
    use evifuse::toymodel::{generate_dataset, train};
    std::fs::create_dir_all(&cli.out)?;
    let train_ds = match cfg.external.train_set() {
        Some((a, b)) => load_dataset(a, b, cfg.external.meta.as_deref())?,
        None => generate_dataset(&cfg.train_synthetic())?,
    };
    let (pipeline, trace) = train(&cfg.pipeline_config(), &train_ds)?;
    pipeline.save(&cli.out.join("model.txt"))?;
    let mut out = String::from("epoch,lambda,total\n");
    for t in &trace {
        out.push_str(&format!("{},{},{}\n", t.epoch, g9(t.lambda), g9(t.total)));
    }
    // full per-view trace comes from `report`; `train` keeps the short form
    std::fs::write(cli.out.join("loss_trace.csv"), out)?;
    let last = trace.last().map(|t| t.total).unwrap_or(f64::NAN);
    Ok(format!(
        "trained {} epochs on {} samples; final loss {}; wrote model.txt, loss_trace.csv to {}",
        trace.len(),
        train_ds.len(),
        g9(last),
        cli.out.display()
    ))
}

fn parse_inline_vector(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("--evidence: `{t}` is not a number")))
        })
        .collect()
}

fn collect_evidence(inline: &[String], file: Option<&std::path::Path>) -> Result<Vec<Evidence>, Error> {
    let mut raw: Vec<Vec<f64>> = Vec::new();
    for s in inline {
        raw.push(parse_inline_vector(s)?);
    }
    if let Some(path) = file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            raw.push(parse_inline_vector(line).map_err(|_| {
                Error::Data(format!("{}: row {} is not numeric", path.display(), i + 1))
            })?);
        }
    }
    if raw.is_empty() {
        return Err(Error::Config(
            "fuse needs at least one --evidence vector or --file".into(),
        ));
    }
    // map coarse vectors onto the fine classes when granularities are mixed
    let has_fine = raw.iter().any(|v| v.len() == FINE_CLASSES);
    let mapping = MappingMatrix::uniform();
    raw.into_iter()
        .map(|v| {
            let e = Evidence::new(v)?;
            if has_fine && e.class_count() == COARSE_CLASSES {
                mapping.map_evidence(&e)
            } else {
                Ok(e)
            }
        })
        .collect()
}

fn run_fuse(evidences: &[Evidence], strategy: FusionStrategy) -> Result<(), Error> {
    let opinions: Vec<Opinion> = evidences
        .iter()
        .map(|e| dirichlet_to_opinion(&evidence_to_dirichlet(e)))
        .collect();
    for (i, o) in opinions.iter().enumerate() {
        println!(
            "view {}: belief [{}], uncertainty {}",
            i + 1,
            o.belief().iter().map(|&b| g9(b)).collect::<Vec<_>>().join(", "),
            g9(o.uncertainty())
        );
    }
    if opinions.len() > 1 {
        let mut pairs = Vec::new();
        for i in 0..opinions.len() {
            for j in i + 1..opinions.len() {
                let c = conflict_degree(&opinions[i], &opinions[j])?.value();
                pairs.push(format!("({},{})={}", i + 1, j + 1, g9(c)));
            }
        }
        println!("pairwise conflict: {}", pairs.join(" "));
    }
    let joint = match strategy {
        FusionStrategy::Cmam => cmam_fuse_many(&opinions)?,
        FusionStrategy::AverageEvidence => average_fuse(evidences)?,
        FusionStrategy::HarmonicReference => harmonic_reference_fuse_many(&opinions)?,
    };
    println!(
        "joint ({strategy}): belief [{}], uncertainty {}",
        joint.belief().iter().map(|&b| g9(b)).collect::<Vec<_>>().join(", "),
        g9(joint.uncertainty())
    );
    let probs = joint.projected_probabilities();
    println!(
        "projected probabilities: [{}]",
        probs.iter().map(|&p| g9(p)).collect::<Vec<_>>().join(", ")
    );
    println!("predicted class: {}", predicted_class(&joint));
    Ok(())
}

fn read_values(path: &std::path::Path) -> Result<Vec<f64>, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        values.push(line.parse::<f64>().map_err(|_| {
            Error::Data(format!(
                "{}: line {}: `{line}` is not a number",
                path.display(),
                i + 1
            ))
        })?);
    }
    Ok(values)
}

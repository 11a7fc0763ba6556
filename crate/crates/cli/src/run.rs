//! The experiments behind each subcommand.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, ensure, Context};
use ffp::data::idx::load_mnist;
use ffp::data::{
    generate_spirals, generate_xor, write_samples_csv, LabelScheme, LabeledSample, SPIRAL_NOISE_SD,
    SPIRAL_POINTS_PER_CLASS, SPIRAL_TURNS,
};
use ffp::persist::{load_model, save_adam, save_model};
use ffp::train::{
    evaluate, render_classification_map, EpochMetrics, EvalReport, TrainConfig, Trainer,
    METRICS_CSV_HEADER,
};
use ffp::{AdamState, PerceptronModel};

use crate::image::write_map_image;

pub const MODEL_FILE: &str = "model.ffp";
pub const ADAM_FILE: &str = "adam.state";
pub const METRICS_FILE: &str = "metrics.csv";
pub const MAP_FILE: &str = "map.ppm";
pub const DATA_FILE: &str = "data.csv";

pub const XOR_EXTENT: f64 = 1.5;
pub const SPIRAL_EXTENT: f64 = 1.2;
pub const DEFAULT_MAP_RESOLUTION: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XorData {
    pub per_combination: usize,
    pub jitter_radius: f64,
}

impl Default for XorData {
    fn default() -> Self {
        Self {
            per_combination: 1,
            jitter_radius: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpiralData {
    pub points_per_class: usize,
    pub test_points_per_class: usize,
    pub turns: f64,
    pub noise_sd: f64,
}

impl Default for SpiralData {
    fn default() -> Self {
        Self {
            points_per_class: SPIRAL_POINTS_PER_CLASS,
            test_points_per_class: SPIRAL_POINTS_PER_CLASS,
            turns: SPIRAL_TURNS,
            noise_sd: SPIRAL_NOISE_SD,
        }
    }
}

impl SpiralData {
    /// Training and held-out sets; they come from different seeds.
    pub fn generate(&self, seed: u64) -> anyhow::Result<(Vec<LabeledSample>, Vec<LabeledSample>)> {
        let train = generate_spirals(
            self.points_per_class,
            self.turns,
            self.noise_sd,
            seed.wrapping_mul(2),
        )?;
        let test = generate_spirals(
            self.test_points_per_class,
            self.turns,
            self.noise_sd,
            seed.wrapping_mul(2).wrapping_add(1),
        )?;
        Ok((train, test))
    }
}

pub const TRAIN_IMAGES: &str = "train-images-idx3-ubyte";
pub const TRAIN_LABELS: &str = "train-labels-idx1-ubyte";
pub const TEST_IMAGES: &str = "t10k-images-idx3-ubyte";
pub const TEST_LABELS: &str = "t10k-labels-idx1-ubyte";

#[derive(Debug, Clone, PartialEq)]
pub struct MnistPaths {
    pub train_images: PathBuf,
    pub train_labels: PathBuf,
    pub test_images: PathBuf,
    pub test_labels: PathBuf,
}

impl MnistPaths {
    /// The standard file names inside `dir`.
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            train_images: dir.join(TRAIN_IMAGES),
            train_labels: dir.join(TRAIN_LABELS),
            test_images: dir.join(TEST_IMAGES),
            test_labels: dir.join(TEST_LABELS),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalData {
    /// The four exact XOR corners.
    Xor,
    /// A held-out spiral set for the given seed.
    Spiral {
        data: SpiralData,
        seed: u64,
    },
    Mnist {
        images: PathBuf,
        labels: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Xor(XorData),
    Spiral(SpiralData),
    Mnist(MnistPaths),
    ClassifyMap {
        model: PathBuf,
        x_range: (f64, f64),
        y_range: (f64, f64),
    },
    Eval {
        model: PathBuf,
        data: EvalData,
    },
}

/// Everything one invocation needs. For `ClassifyMap` and `Eval` only the
/// classification fields of `config` matter (classes, label scheme, goodness).
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub command: Command,
    pub config: TrainConfig,
    pub output_dir: PathBuf,
    /// Save model, optimizer state and metrics every this many epochs.
    pub checkpoint_every: Option<usize>,
    pub map_resolution: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub parameters: usize,
    pub metrics: Vec<EpochMetrics>,
    /// Final evaluation on the held-out set (the corners for XOR).
    pub report: Option<EvalReport>,
    pub artifacts: Vec<PathBuf>,
}

impl RunSummary {
    pub fn best_test_error(&self) -> Option<f64> {
        self.metrics
            .iter()
            .filter_map(|m| m.test_error)
            .min_by(f64::total_cmp)
    }
}

pub fn run(spec: &RunSpec, log: &mut dyn Write) -> anyhow::Result<RunSummary> {
    match &spec.command {
        Command::Xor(data) => run_xor(spec, data, log),
        Command::Spiral(data) => run_spiral(spec, data, log),
        Command::Mnist(paths) => run_mnist(spec, paths, log),
        Command::ClassifyMap {
            model,
            x_range,
            y_range,
        } => classify_map(spec, model, *x_range, *y_range),
        Command::Eval { model, data } => run_eval(spec, model, data, log),
    }
}

fn prepare_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))
}

fn write_metrics(path: &Path, metrics: &[EpochMetrics]) -> anyhow::Result<()> {
    let mut text = String::from(METRICS_CSV_HEADER);
    text.push('\n');
    for m in metrics {
        text.push_str(&m.csv_row());
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

struct Fitted {
    model: PerceptronModel,
    metrics: Vec<EpochMetrics>,
    report: EvalReport,
    artifacts: Vec<PathBuf>,
}

fn save_state(
    dir: &Path,
    model: &PerceptronModel,
    adam: &AdamState,
    metrics: &[EpochMetrics],
) -> anyhow::Result<Vec<PathBuf>> {
    let (m, a, c) = (
        dir.join(MODEL_FILE),
        dir.join(ADAM_FILE),
        dir.join(METRICS_FILE),
    );
    save_model(model, &m).with_context(|| format!("writing {}", m.display()))?;
    save_adam(adam, &a).with_context(|| format!("writing {}", a.display()))?;
    write_metrics(&c, metrics)?;
    Ok(vec![m, a, c])
}

/// Trains from a fresh model, evaluating `test` after every epoch.
fn fit(
    spec: &RunSpec,
    train: &[LabeledSample],
    test: &[LabeledSample],
    log: &mut dyn Write,
) -> anyhow::Result<Fitted> {
    let cfg = &spec.config;
    let feature_len = train
        .first()
        .context("training set is empty")?
        .features
        .len();
    prepare_dir(&spec.output_dir)?;
    let mut trainer = Trainer::new(cfg.clone())?;
    let mut model = trainer.init_model(feature_len)?;
    let mut adam = AdamState::for_model(&model);
    writeln!(log, "parameters: {}", model.parameter_count())?;
    writeln!(
        log,
        "training on {} samples, {} held out; {} outputs, {} activation, theta {}, lr {}, batch {}",
        train.len(),
        test.len(),
        cfg.outputs,
        cfg.activation.name(),
        cfg.theta,
        cfg.adam.learning_rate,
        cfg.batch_size
    )?;

    let log_every = if train.len() >= 10_000 {
        1
    } else {
        (cfg.epochs / 10).max(1)
    };
    let start = Instant::now();
    let mut metrics = Vec::with_capacity(cfg.epochs);
    let mut report = None;
    for epoch in 1..=cfg.epochs {
        let mut m = trainer.run_epoch(&mut model, &mut adam, train)?;
        let r = evaluate(
            &model,
            test,
            cfg.num_classes,
            &cfg.label_scheme,
            cfg.goodness_mode,
        )?;
        m.test_error = Some(r.error_rate);
        if epoch % log_every == 0 || epoch == cfg.epochs {
            writeln!(
                log,
                "epoch {epoch}/{}: steps {} loss {:.4} train_acc {:.4} test_err {:.4} ({:.1}s)",
                cfg.epochs,
                m.steps,
                m.mean_loss,
                m.train_accuracy,
                r.error_rate,
                start.elapsed().as_secs_f64()
            )?;
        }
        metrics.push(m);
        report = Some(r);
        if let Some(k) = spec.checkpoint_every.filter(|&k| k > 0) {
            if epoch % k == 0 && epoch < cfg.epochs {
                save_state(&spec.output_dir, &model, &adam, &metrics)?;
            }
        }
    }
    let artifacts = save_state(&spec.output_dir, &model, &adam, &metrics)?;
    let report = report.expect("epochs >= 1");
    let best = metrics
        .iter()
        .filter_map(|m| m.test_error)
        .min_by(f64::total_cmp);
    writeln!(
        log,
        "final test error {:.4}, best {:.4}",
        report.error_rate,
        best.unwrap_or(report.error_rate)
    )?;
    Ok(Fitted {
        model,
        metrics,
        report,
        artifacts,
    })
}

fn write_map(
    spec: &RunSpec,
    model: &PerceptronModel,
    extent: f64,
    artifacts: &mut Vec<PathBuf>,
) -> anyhow::Result<()> {
    let cfg = &spec.config;
    let map = render_classification_map(
        model,
        cfg.num_classes,
        &cfg.label_scheme,
        cfg.goodness_mode,
        (-extent, extent),
        (-extent, extent),
        spec.map_resolution,
    )?;
    let path = spec.output_dir.join(MAP_FILE);
    write_map_image(&map, &path)?;
    artifacts.push(path);
    Ok(())
}

fn write_data(
    dir: &Path,
    data: &[LabeledSample],
    artifacts: &mut Vec<PathBuf>,
) -> anyhow::Result<()> {
    let path = dir.join(DATA_FILE);
    let file = fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
    write_samples_csv(data, std::io::BufWriter::new(file))?;
    artifacts.push(path);
    Ok(())
}

fn two_dimensional(spec: &RunSpec) -> anyhow::Result<()> {
    ensure!(
        spec.config.num_classes == 2,
        "this experiment has 2 classes, got {}",
        spec.config.num_classes
    );
    Ok(())
}

/// Trains on the XOR corners (optionally jittered clouds) and maps
/// `[-1.5, 1.5]²`. The held-out set is the four exact corners.
pub fn run_xor(spec: &RunSpec, data: &XorData, log: &mut dyn Write) -> anyhow::Result<RunSummary> {
    two_dimensional(spec)?;
    let train = generate_xor(data.per_combination, data.jitter_radius, spec.config.seed)?;
    let corners = generate_xor(1, 0.0, 0)?;
    let mut fitted = fit(spec, &train, &corners, log)?;
    let correct: usize = (0..2).map(|k| fitted.report.confusion[k][k]).sum();
    writeln!(log, "corners correct: {correct}/4")?;
    write_map(spec, &fitted.model, XOR_EXTENT, &mut fitted.artifacts)?;
    write_data(&spec.output_dir, &train, &mut fitted.artifacts)?;
    Ok(summary(fitted))
}

/// Trains on one spiral set, reports accuracy on a second, and maps `[-1.2, 1.2]²`.
pub fn run_spiral(
    spec: &RunSpec,
    data: &SpiralData,
    log: &mut dyn Write,
) -> anyhow::Result<RunSummary> {
    two_dimensional(spec)?;
    let (train, test) = data.generate(spec.config.seed)?;
    let mut fitted = fit(spec, &train, &test, log)?;
    writeln!(log, "held-out accuracy: {:.4}", fitted.report.accuracy)?;
    write_map(spec, &fitted.model, SPIRAL_EXTENT, &mut fitted.artifacts)?;
    write_data(&spec.output_dir, &train, &mut fitted.artifacts)?;
    Ok(summary(fitted))
}

pub fn run_mnist(
    spec: &RunSpec,
    paths: &MnistPaths,
    log: &mut dyn Write,
) -> anyhow::Result<RunSummary> {
    let train = load_mnist(&paths.train_images, &paths.train_labels)?;
    let test = load_mnist(&paths.test_images, &paths.test_labels)?;
    writeln!(
        log,
        "steps per epoch: {}",
        train.len().div_ceil(spec.config.batch_size)
    )?;
    Ok(summary(fit(spec, &train, &test, log)?))
}

fn summary(f: Fitted) -> RunSummary {
    RunSummary {
        parameters: f.model.parameter_count(),
        metrics: f.metrics,
        report: Some(f.report),
        artifacts: f.artifacts,
    }
}

fn load(path: &Path) -> anyhow::Result<PerceptronModel> {
    load_model(path).with_context(|| format!("loading model {}", path.display()))
}

/// Renders the decision regions of a saved two-feature model.
pub fn classify_map(
    spec: &RunSpec,
    model_path: &Path,
    x_range: (f64, f64),
    y_range: (f64, f64),
) -> anyhow::Result<RunSummary> {
    let model = load(model_path)?;
    let cfg = &spec.config;
    prepare_dir(&spec.output_dir)?;
    let map = render_classification_map(
        &model,
        cfg.num_classes,
        &cfg.label_scheme,
        cfg.goodness_mode,
        x_range,
        y_range,
        spec.map_resolution,
    )?;
    let path = spec.output_dir.join(MAP_FILE);
    write_map_image(&map, &path)?;
    Ok(RunSummary {
        parameters: model.parameter_count(),
        metrics: Vec::new(),
        report: None,
        artifacts: vec![path],
    })
}

/// Evaluates a saved model and prints accuracy and the confusion matrix.
pub fn run_eval(
    spec: &RunSpec,
    model_path: &Path,
    data: &EvalData,
    log: &mut dyn Write,
) -> anyhow::Result<RunSummary> {
    let model = load(model_path)?;
    let cfg = &spec.config;
    let samples = match data {
        EvalData::Xor => generate_xor(1, 0.0, 0)?,
        EvalData::Spiral { data, seed } => data.generate(*seed)?.1,
        EvalData::Mnist { images, labels } => load_mnist(images, labels)?,
    };
    let feature_len = samples[0].features.len();
    if feature_len + cfg.label_scheme.extra_inputs() != model.inputs() {
        bail!(
            "model expects {} inputs but the data gives {feature_len} features plus {} label inputs",
            model.inputs(),
            cfg.label_scheme.extra_inputs()
        );
    }
    let report = evaluate(
        &model,
        &samples,
        cfg.num_classes,
        &cfg.label_scheme,
        cfg.goodness_mode,
    )?;
    writeln!(log, "samples: {}", report.total())?;
    writeln!(log, "accuracy: {:.4}", report.accuracy)?;
    writeln!(log, "error: {:.4}", report.error_rate)?;
    writeln!(log, "confusion (rows: true label, columns: predicted):")?;
    for row in &report.confusion {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:>6}")).collect();
        writeln!(log, "{}", cells.join(""))?;
    }
    Ok(RunSummary {
        parameters: model.parameter_count(),
        metrics: Vec::new(),
        report: Some(report),
        artifacts: Vec::new(),
    })
}

/// Label scheme matching a saved model with two features.
pub fn scheme_for_map(model_inputs: usize, hot_value: f64) -> anyhow::Result<(LabelScheme, usize)> {
    match model_inputs {
        0..=2 => bail!("a two-feature model has at least 3 inputs, got {model_inputs}"),
        3 => Ok((LabelScheme::Scalar, 2)),
        n => Ok((
            LabelScheme::OneHot {
                num_classes: n - 2,
                hot_value,
            },
            n - 2,
        )),
    }
}

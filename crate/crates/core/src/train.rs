//! Forward-Forward training, goodness-argmax classification and evaluation.
//!
//! Every mini-batch presents each sample twice: once with its true label
//! (good data) and once with a freshly drawn wrong label (bad data). The
//! gradients of all `2 · batch` loss terms are averaged and drive exactly one
//! Adam step.
//!
//! Both the trainer and [`classify`] exploit the fact that the label block is
//! appended after the features: `W [f; l] + b = (W_f f + b) + W_l l`, so the
//! feature part of the pre-activation is computed once per sample and reused
//! for every candidate label.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::data::{
    jitter_pixels, sample_wrong_label, LabelScheme, LabeledSample, IMAGE_PIXELS, MAX_JITTER,
};
use crate::linalg::Vector;
use crate::model::{
    ActivationKind, ForwardPass, GoodnessMode, Gradients, PerceptronModel, Polarity,
};
use crate::optim::{AdamConfig, AdamState};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Optimizer settings, including the learning rate.
    pub adam: AdamConfig,
    /// Goodness threshold inside the logistic loss.
    pub theta: f64,
    pub goodness_mode: GoodnessMode,
    pub batch_size: usize,
    pub epochs: usize,
    pub label_scheme: LabelScheme,
    pub num_classes: usize,
    /// Jitter 28×28 images by up to two pixels before each presentation.
    pub augment: bool,
    pub seed: u64,
    pub outputs: usize,
    pub activation: ActivationKind,
    /// Present bad data. Disabling it is only useful for diagnostics.
    pub bad_pass: bool,
}

impl TrainConfig {
    /// Four leaky-ReLU outputs, scalar label, summed goodness with θ = 32, lr 0.01.
    pub fn xor() -> Self {
        Self {
            adam: AdamConfig::with_learning_rate(0.01),
            theta: 32.0,
            goodness_mode: GoodnessMode::SumSquares,
            batch_size: 4,
            epochs: 1000,
            label_scheme: LabelScheme::Scalar,
            num_classes: 2,
            augment: false,
            seed: 0,
            outputs: 4,
            activation: ActivationKind::leaky(),
            bad_pass: true,
        }
    }

    /// 32 leaky-ReLU outputs on three inputs (x₁, x₂, label).
    pub fn spiral() -> Self {
        Self {
            batch_size: 10,
            epochs: 1000,
            outputs: 32,
            ..Self::xor()
        }
    }

    /// Label value used for the one-hot block of the MNIST preset.
    pub const MNIST_HOT_VALUE: f64 = 10.0;

    /// One-hot labels, ReLU, mean goodness with θ = 10, lr 3e-4, batches of 10.
    pub fn mnist(outputs: usize, epochs: usize) -> Self {
        Self {
            adam: AdamConfig::with_learning_rate(AdamConfig::MNIST_LEARNING_RATE),
            theta: 10.0,
            goodness_mode: GoodnessMode::MeanSquares,
            batch_size: 10,
            epochs,
            label_scheme: LabelScheme::OneHot {
                num_classes: 10,
                hot_value: Self::MNIST_HOT_VALUE,
            },
            num_classes: 10,
            augment: false,
            seed: 0,
            outputs,
            activation: ActivationKind::Relu,
            bad_pass: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.adam.validate()?;
        self.activation.validate()?;
        self.label_scheme.validate()?;
        let invalid = |msg: String| Err(Error::InvalidConfig(msg));
        if self.batch_size == 0 {
            return invalid("batch size must be >= 1".into());
        }
        if self.epochs == 0 {
            return invalid("epochs must be >= 1".into());
        }
        if self.outputs == 0 {
            return invalid("outputs must be >= 1".into());
        }
        if !self.theta.is_finite() {
            return invalid(format!("theta must be finite, got {}", self.theta));
        }
        if self.num_classes < 2 {
            return invalid(format!("need at least 2 classes, got {}", self.num_classes));
        }
        if let LabelScheme::OneHot { num_classes, .. } = self.label_scheme {
            if num_classes != self.num_classes {
                return invalid(format!(
                    "one-hot block has {num_classes} classes but the task has {}",
                    self.num_classes
                ));
            }
        }
        Ok(())
    }

    /// Model input dimension for features of length `feature_len`.
    pub fn input_dim(&self, feature_len: usize) -> usize {
        feature_len + self.label_scheme.extra_inputs()
    }
}

/// Statistics for one training epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochMetrics {
    /// 1-based.
    pub epoch: usize,
    pub steps: usize,
    /// Loss terms behind each optimizer step, in step order.
    pub terms_per_step: Vec<usize>,
    pub mean_loss: f64,
    /// Goodness-argmax accuracy on the samples as presented during the
    /// epoch, measured with the parameters before each batch's update.
    pub train_accuracy: f64,
    pub mean_good_goodness: f64,
    pub mean_bad_goodness: f64,
    /// Filled in by callers that evaluate a held-out set after the epoch.
    pub test_error: Option<f64>,
}

pub const METRICS_CSV_HEADER: &str =
    "epoch,mean_loss,train_accuracy,test_error,mean_good_goodness,mean_bad_goodness";

impl EpochMetrics {
    /// One CSV row matching [`METRICS_CSV_HEADER`]; a missing test error is an empty field.
    pub fn csv_row(&self) -> String {
        let test = self.test_error.map(|e| e.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{}",
            self.epoch,
            self.mean_loss,
            self.train_accuracy,
            test,
            self.mean_good_goodness,
            self.mean_bad_goodness
        )
    }
}

/// Drives training epoch by epoch with a seeded random stream for shuffling,
/// wrong-label draws and jitter.
#[derive(Debug)]
pub struct Trainer {
    cfg: TrainConfig,
    rng: ChaCha8Rng,
    epoch: usize,
}

impl Trainer {
    pub fn new(cfg: TrainConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(1);
        Ok(Self { cfg, rng, epoch: 0 })
    }

    pub fn config(&self) -> &TrainConfig {
        &self.cfg
    }

    pub fn epochs_run(&self) -> usize {
        self.epoch
    }

    /// A freshly initialized model for features of length `feature_len`,
    /// drawn from the seed's initialization stream.
    pub fn init_model(&self, feature_len: usize) -> Result<PerceptronModel> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        PerceptronModel::init_uniform(
            self.cfg.outputs,
            self.cfg.input_dim(feature_len),
            self.cfg.activation,
            &mut rng,
        )
    }

    fn check(
        &self,
        model: &PerceptronModel,
        optimizer: &AdamState,
        data: &[LabeledSample],
    ) -> Result<usize> {
        let first = data
            .first()
            .ok_or_else(|| Error::InvalidConfig("training set is empty".into()))?;
        let n = first.features.len();
        for s in data {
            if s.features.len() != n {
                return Err(Error::DimensionMismatch {
                    op: "train (feature length)",
                    expected: n,
                    found: s.features.len(),
                });
            }
            if s.label >= self.cfg.num_classes {
                return Err(Error::LabelOutOfRange {
                    label: s.label,
                    num_classes: self.cfg.num_classes,
                });
            }
        }
        if model.inputs() != self.cfg.input_dim(n) {
            return Err(Error::DimensionMismatch {
                op: "train (model inputs)",
                expected: self.cfg.input_dim(n),
                found: model.inputs(),
            });
        }
        if optimizer.shape() != (model.outputs(), model.inputs()) {
            return Err(Error::DimensionMismatch {
                op: "train (optimizer state)",
                expected: model.parameter_count(),
                found: optimizer.parameter_count(),
            });
        }
        if self.cfg.augment && n != IMAGE_PIXELS {
            return Err(Error::DimensionMismatch {
                op: "train (augmentation needs 28x28 images)",
                expected: IMAGE_PIXELS,
                found: n,
            });
        }
        Ok(n)
    }

    /// One pass over `data` in a freshly shuffled order.
    pub fn run_epoch(
        &mut self,
        model: &mut PerceptronModel,
        optimizer: &mut AdamState,
        data: &[LabeledSample],
    ) -> Result<EpochMetrics> {
        let feature_len = self.check(model, optimizer, data)?;
        let cfg = self.cfg.clone();
        let mut order: Vec<usize> = (0..data.len()).collect();
        order.shuffle(&mut self.rng);

        let mut grads = Gradients::zeros_like(model);
        let mut scratch = Scratch::new(model.outputs());
        let mut terms_per_step = Vec::with_capacity(data.len().div_ceil(cfg.batch_size));
        let (mut loss_sum, mut good_sum, mut bad_sum) = (0.0, 0.0, 0.0);
        let mut correct = 0usize;

        for batch in order.chunks(cfg.batch_size) {
            grads.clear();
            let terms = if cfg.bad_pass {
                2 * batch.len()
            } else {
                batch.len()
            };
            let scale = 1.0 / terms as f64;
            for &idx in batch {
                let sample = &data[idx];
                let jittered;
                let features: &[f64] = if cfg.augment {
                    let dx = self.rng.random_range(-MAX_JITTER..=MAX_JITTER);
                    let dy = self.rng.random_range(-MAX_JITTER..=MAX_JITTER);
                    jittered = jitter_pixels(&sample.features, dx, dy)?;
                    &jittered
                } else {
                    &sample.features
                };
                let wrong = if cfg.bad_pass {
                    Some(sample_wrong_label(
                        sample.label,
                        cfg.num_classes,
                        &mut self.rng,
                    )?)
                } else {
                    None
                };

                scratch.load(model, features);
                let (predicted, _) = scratch.argmax_label(
                    model,
                    &cfg.label_scheme,
                    cfg.num_classes,
                    cfg.goodness_mode,
                    feature_len,
                )?;
                if predicted == sample.label {
                    correct += 1;
                }

                let (loss, g) = scratch.accumulate(
                    model,
                    &cfg,
                    feature_len,
                    sample.label,
                    Polarity::Good,
                    scale,
                    &mut grads,
                )?;
                loss_sum += loss;
                good_sum += g;
                if let Some(wrong) = wrong {
                    let (loss, g) = scratch.accumulate(
                        model,
                        &cfg,
                        feature_len,
                        wrong,
                        Polarity::Bad,
                        scale,
                        &mut grads,
                    )?;
                    loss_sum += loss;
                    bad_sum += g;
                }
            }
            optimizer.step(model, &grads, &cfg.adam)?;
            terms_per_step.push(terms);
        }

        self.epoch += 1;
        let n = data.len() as f64;
        let total_terms: usize = terms_per_step.iter().sum();
        Ok(EpochMetrics {
            epoch: self.epoch,
            steps: terms_per_step.len(),
            terms_per_step,
            mean_loss: loss_sum / total_terms as f64,
            train_accuracy: correct as f64 / n,
            mean_good_goodness: good_sum / n,
            mean_bad_goodness: if cfg.bad_pass { bad_sum / n } else { f64::NAN },
            test_error: None,
        })
    }
}

/// Per-sample workspace: the label-independent part of the pre-activation
/// and the indices of non-zero features.
struct Scratch {
    base: Vec<f64>,
    nonzero: Vec<usize>,
    features: Vec<f64>,
    delta: Vec<f64>,
}

impl Scratch {
    fn new(outputs: usize) -> Self {
        Self {
            base: Vec::with_capacity(outputs),
            nonzero: Vec::new(),
            features: Vec::new(),
            delta: vec![0.0; outputs],
        }
    }

    fn load(&mut self, model: &PerceptronModel, features: &[f64]) {
        self.base = model.prefix_pre_activation(features);
        self.features.clear();
        self.features.extend_from_slice(features);
        self.nonzero.clear();
        self.nonzero
            .extend((0..features.len()).filter(|&j| features[j] != 0.0));
    }

    fn pass(
        &self,
        model: &PerceptronModel,
        scheme: &LabelScheme,
        feature_len: usize,
        label: usize,
    ) -> Result<(ForwardPass, usize, f64)> {
        let (offset, value) = scheme.label_entry(label)?;
        let col = feature_len + offset;
        let z: Vec<f64> = self
            .base
            .iter()
            .enumerate()
            .map(|(i, b)| b + model.weights[(i, col)] * value)
            .collect();
        Ok((model.activate(z), col, value))
    }

    fn goodness_of(
        &self,
        model: &PerceptronModel,
        scheme: &LabelScheme,
        feature_len: usize,
        label: usize,
        mode: GoodnessMode,
    ) -> Result<f64> {
        let (offset, value) = scheme.label_entry(label)?;
        let col = feature_len + offset;
        let sum: f64 = self
            .base
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let y = model.activation.apply(b + model.weights[(i, col)] * value);
                y * y
            })
            .sum();
        Ok(mode.reduce(sum, self.base.len()))
    }

    fn argmax_label(
        &self,
        model: &PerceptronModel,
        scheme: &LabelScheme,
        num_classes: usize,
        mode: GoodnessMode,
        feature_len: usize,
    ) -> Result<(usize, Vec<f64>)> {
        let per_label = (0..num_classes)
            .map(|k| self.goodness_of(model, scheme, feature_len, k, mode))
            .collect::<Result<Vec<_>>>()?;
        Ok((argmax_first(&per_label), per_label))
    }

    #[allow(clippy::too_many_arguments)]
    fn accumulate(
        &mut self,
        model: &PerceptronModel,
        cfg: &TrainConfig,
        feature_len: usize,
        label: usize,
        polarity: Polarity,
        scale: f64,
        grads: &mut Gradients,
    ) -> Result<(f64, f64)> {
        let (pass, col, value) = self.pass(model, &cfg.label_scheme, feature_len, label)?;
        let (loss, g) = model.output_deltas(
            &pass,
            cfg.theta,
            cfg.goodness_mode,
            polarity,
            &mut self.delta,
        );
        for (i, &d) in self.delta.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            let s = scale * d;
            grads.d_bias[i] += s;
            let row = grads.d_weights.row_mut(i);
            for &j in &self.nonzero {
                row[j] += s * self.features[j];
            }
            if value != 0.0 {
                row[col] += s * value;
            }
        }
        Ok((loss, g))
    }
}

/// Index of the largest value; ties go to the smallest index.
fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = k;
        }
    }
    best
}

/// Runs `cfg.epochs` epochs starting from `model` and `optimizer`.
pub fn train(
    model: &mut PerceptronModel,
    data: &[LabeledSample],
    cfg: &TrainConfig,
    optimizer: &mut AdamState,
) -> Result<Vec<EpochMetrics>> {
    let mut trainer = Trainer::new(cfg.clone())?;
    (0..cfg.epochs)
        .map(|_| trainer.run_epoch(model, optimizer, data))
        .collect()
}

fn check_classify_shape(
    model: &PerceptronModel,
    feature_len: usize,
    num_classes: usize,
    scheme: &LabelScheme,
) -> Result<()> {
    if feature_len + scheme.extra_inputs() != model.inputs() {
        return Err(Error::DimensionMismatch {
            op: "classify",
            expected: model.inputs(),
            found: feature_len + scheme.extra_inputs(),
        });
    }
    if num_classes == 0 {
        return Err(Error::InvalidConfig("num_classes must be >= 1".into()));
    }
    if let LabelScheme::OneHot { num_classes: n, .. } = *scheme {
        if num_classes > n {
            return Err(Error::LabelOutOfRange {
                label: num_classes - 1,
                num_classes: n,
            });
        }
    }
    Ok(())
}

/// Tries every label in `0..num_classes` and returns the one with the highest
/// goodness (smallest index on ties) together with all goodness values.
pub fn classify(
    model: &PerceptronModel,
    features: &[f64],
    num_classes: usize,
    scheme: &LabelScheme,
    mode: GoodnessMode,
) -> Result<(usize, Vector)> {
    check_classify_shape(model, features.len(), num_classes, scheme)?;
    let mut scratch = Scratch::new(model.outputs());
    scratch.load(model, features);
    let (label, per_label) =
        scratch.argmax_label(model, scheme, num_classes, mode, features.len())?;
    Ok((label, Vector::new(per_label)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    pub error_rate: f64,
    /// `confusion[true][predicted]` counts.
    pub confusion: Vec<Vec<usize>>,
    /// Mean goodness with the true label appended.
    pub mean_good_goodness: f64,
    /// Mean over samples of the average goodness across all wrong labels.
    pub mean_bad_goodness: f64,
}

impl EvalReport {
    pub fn total(&self) -> usize {
        self.confusion.iter().flatten().sum()
    }
}

/// Goodness-argmax accuracy, confusion matrix and goodness statistics.
///
/// Samples are classified in parallel; the reduction runs in sample order so
/// the result does not depend on the thread count.
pub fn evaluate(
    model: &PerceptronModel,
    data: &[LabeledSample],
    num_classes: usize,
    scheme: &LabelScheme,
    mode: GoodnessMode,
) -> Result<EvalReport> {
    if data.is_empty() {
        return Err(Error::InvalidConfig(
            "cannot evaluate an empty dataset".into(),
        ));
    }
    if num_classes < 2 {
        return Err(Error::InvalidConfig(format!(
            "evaluation needs at least 2 classes, got {num_classes}"
        )));
    }
    let results = data
        .par_iter()
        .map(|s| {
            if s.label >= num_classes {
                return Err(Error::LabelOutOfRange {
                    label: s.label,
                    num_classes,
                });
            }
            classify(model, &s.features, num_classes, scheme, mode).map(|(p, g)| (s.label, p, g))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut confusion = vec![vec![0usize; num_classes]; num_classes];
    let (mut good, mut bad) = (0.0, 0.0);
    for (truth, predicted, g) in &results {
        confusion[*truth][*predicted] += 1;
        good += g[*truth];
        let wrong: f64 = g
            .iter()
            .enumerate()
            .filter(|(k, _)| k != truth)
            .map(|(_, v)| v)
            .sum();
        bad += wrong / (num_classes - 1) as f64;
    }
    let n = data.len() as f64;
    let correct: usize = (0..num_classes).map(|k| confusion[k][k]).sum();
    let accuracy = correct as f64 / n;
    Ok(EvalReport {
        accuracy,
        error_rate: 1.0 - accuracy,
        confusion,
        mean_good_goodness: good / n,
        mean_bad_goodness: bad / n,
    })
}

/// Predicted labels on a regular grid over a two-dimensional feature space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassMap {
    pub width: usize,
    pub height: usize,
    /// Row-major; row 0 is the top edge (largest x₂), column 0 the left edge.
    pub labels: Vec<usize>,
}

impl ClassMap {
    pub fn get(&self, col: usize, row: usize) -> usize {
        self.labels[row * self.width + col]
    }
}

/// Classifies each point of a `resolution × resolution` grid spanning
/// `x_range × y_range`, edges included.
pub fn render_classification_map(
    model: &PerceptronModel,
    num_classes: usize,
    scheme: &LabelScheme,
    mode: GoodnessMode,
    x_range: (f64, f64),
    y_range: (f64, f64),
    resolution: usize,
) -> Result<ClassMap> {
    if resolution < 2 {
        return Err(Error::InvalidConfig(format!(
            "map resolution must be >= 2, got {resolution}"
        )));
    }
    let feature_len = model.inputs().checked_sub(scheme.extra_inputs());
    if feature_len != Some(2) {
        return Err(Error::DimensionMismatch {
            op: "render_classification_map (feature dimension)",
            expected: 2,
            found: feature_len.unwrap_or(0),
        });
    }
    let step = |(lo, hi): (f64, f64), i: usize| lo + (hi - lo) * i as f64 / (resolution - 1) as f64;
    let rows = (0..resolution)
        .into_par_iter()
        .map(|r| {
            let x2 = step(y_range, resolution - 1 - r);
            (0..resolution)
                .map(|c| {
                    classify(model, &[step(x_range, c), x2], num_classes, scheme, mode)
                        .map(|(l, _)| l)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassMap {
        width: resolution,
        height: resolution,
        labels: rows.concat(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{embed_label, generate_xor};
    use crate::linalg::Matrix;
    use crate::model::goodness;

    fn reference_classify(
        model: &PerceptronModel,
        features: &[f64],
        num_classes: usize,
        scheme: LabelScheme,
        mode: GoodnessMode,
    ) -> (usize, Vec<f64>) {
        let g: Vec<f64> = (0..num_classes)
            .map(|k| {
                let x = embed_label(features, k, scheme).unwrap();
                goodness(&model.forward(&x).unwrap(), mode)
            })
            .collect();
        let mut best = 0;
        for k in 1..g.len() {
            if g[k] > g[best] {
                best = k;
            }
        }
        (best, g)
    }

    #[test]
    fn classify_matches_embedding_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (scheme, n_feat, classes) in [
            (LabelScheme::Scalar, 2, 2),
            (LabelScheme::Scalar, 3, 4),
            (
                LabelScheme::OneHot {
                    num_classes: 5,
                    hot_value: 0.7,
                },
                6,
                5,
            ),
        ] {
            let m = PerceptronModel::init_uniform(
                7,
                n_feat + scheme.extra_inputs(),
                ActivationKind::Tanh,
                &mut rng,
            )
            .unwrap();
            for _ in 0..20 {
                let f: Vec<f64> = (0..n_feat).map(|_| rng.random_range(-1.0..1.0)).collect();
                for mode in [GoodnessMode::SumSquares, GoodnessMode::MeanSquares] {
                    let (label, g) = classify(&m, &f, classes, &scheme, mode).unwrap();
                    let (ref_label, ref_g) = reference_classify(&m, &f, classes, scheme, mode);
                    assert_eq!(label, ref_label);
                    for (a, b) in g.iter().zip(&ref_g) {
                        assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
                    }
                }
            }
        }
    }

    #[test]
    fn zero_model_ties_to_label_zero() {
        let m = PerceptronModel::zeros(3, 3, ActivationKind::Relu).unwrap();
        let (label, g) = classify(
            &m,
            &[0.2, 0.9],
            2,
            &LabelScheme::Scalar,
            GoodnessMode::SumSquares,
        )
        .unwrap();
        assert_eq!(label, 0);
        assert_eq!(g.len(), 2);
        assert!(classify(
            &m,
            &[0.2],
            2,
            &LabelScheme::Scalar,
            GoodnessMode::SumSquares
        )
        .is_err());
    }

    #[test]
    fn evaluate_zero_model_on_balanced_data() {
        let m = PerceptronModel::zeros(2, 3, ActivationKind::Relu).unwrap();
        let data = generate_xor(5, 0.0, 0).unwrap();
        let r = evaluate(&m, &data, 2, &LabelScheme::Scalar, GoodnessMode::SumSquares).unwrap();
        assert_eq!(r.accuracy, 0.5);
        assert_eq!(r.error_rate, 0.5);
        assert_eq!(r.confusion, vec![vec![10, 0], vec![10, 0]]);
        assert!(evaluate(&m, &[], 2, &LabelScheme::Scalar, GoodnessMode::SumSquares).is_err());
    }

    #[test]
    fn hand_built_xor_solution_is_perfect() {
        // relu(x₁+x₂-3l), relu(-x₁-x₂-3l), relu(x₁-x₂+3l-3), relu(-x₁+x₂+3l-3):
        // on the corners the true label gives goodness 4 and the wrong label 0.
        let w = Matrix::from_rows(&[
            vec![1.0, 1.0, -3.0],
            vec![-1.0, -1.0, -3.0],
            vec![1.0, -1.0, 3.0],
            vec![-1.0, 1.0, 3.0],
        ])
        .unwrap();
        let m = PerceptronModel::new(
            w,
            Vector::new(vec![0.0, 0.0, -3.0, -3.0]).unwrap(),
            ActivationKind::Relu,
        )
        .unwrap();
        let data = generate_xor(1, 0.0, 0).unwrap();
        let r = evaluate(&m, &data, 2, &LabelScheme::Scalar, GoodnessMode::SumSquares).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.error_rate, 0.0);
        assert_eq!(r.total(), 4);
        assert_eq!(r.mean_good_goodness, 4.0);
        assert_eq!(r.mean_bad_goodness, 0.0);
    }

    #[test]
    fn map_shape_and_constant_model() {
        let m = PerceptronModel::zeros(2, 3, ActivationKind::Relu).unwrap();
        let map = render_classification_map(
            &m,
            2,
            &LabelScheme::Scalar,
            GoodnessMode::SumSquares,
            (-1.5, 1.5),
            (-1.5, 1.5),
            256,
        )
        .unwrap();
        assert_eq!(map.labels.len(), 256 * 256);
        assert!(map.labels.iter().all(|&l| l == 0));

        let m4 = PerceptronModel::zeros(2, 4, ActivationKind::Relu).unwrap();
        assert!(render_classification_map(
            &m4,
            2,
            &LabelScheme::Scalar,
            GoodnessMode::SumSquares,
            (-1.0, 1.0),
            (-1.0, 1.0),
            8,
        )
        .is_err());
        assert!(render_classification_map(
            &m,
            2,
            &LabelScheme::Scalar,
            GoodnessMode::SumSquares,
            (-1.0, 1.0),
            (-1.0, 1.0),
            1,
        )
        .is_err());
    }

    #[test]
    fn one_step_per_batch() {
        let data = generate_xor(1, 0.0, 0).unwrap();
        let cfg = TrainConfig {
            epochs: 1,
            ..TrainConfig::xor()
        };
        let mut trainer = Trainer::new(cfg).unwrap();
        let mut model = trainer.init_model(2).unwrap();
        let mut opt = AdamState::for_model(&model);
        let m = trainer.run_epoch(&mut model, &mut opt, &data).unwrap();
        assert_eq!(m.steps, 1);
        assert_eq!(m.terms_per_step, vec![8]);
        assert_eq!(opt.steps(), 1);

        let cfg = TrainConfig {
            batch_size: 3,
            ..TrainConfig::xor()
        };
        let mut trainer = Trainer::new(cfg).unwrap();
        let m = trainer.run_epoch(&mut model, &mut opt, &data).unwrap();
        assert_eq!(m.terms_per_step, vec![6, 2]);
    }

    #[test]
    fn rejects_bad_inputs_before_updating() {
        let data = generate_xor(1, 0.0, 0).unwrap();
        let mut trainer = Trainer::new(TrainConfig::xor()).unwrap();
        let mut model = PerceptronModel::zeros(4, 4, ActivationKind::Relu).unwrap();
        let before = model.clone();
        let mut opt = AdamState::for_model(&model);
        assert!(trainer.run_epoch(&mut model, &mut opt, &data).is_err());
        assert_eq!(model, before);
        assert_eq!(opt.steps(), 0);

        let cfg = TrainConfig {
            augment: true,
            ..TrainConfig::xor()
        };
        let mut trainer = Trainer::new(cfg).unwrap();
        let mut model = trainer.init_model(2).unwrap();
        let mut opt = AdamState::for_model(&model);
        assert!(trainer.run_epoch(&mut model, &mut opt, &data).is_err());

        assert!(Trainer::new(TrainConfig {
            epochs: 0,
            ..TrainConfig::xor()
        })
        .is_err());
        assert!(Trainer::new(TrainConfig {
            batch_size: 0,
            ..TrainConfig::xor()
        })
        .is_err());
    }

    #[test]
    fn csv_row_layout() {
        let m = EpochMetrics {
            epoch: 3,
            steps: 1,
            terms_per_step: vec![2],
            mean_loss: 0.5,
            train_accuracy: 1.0,
            mean_good_goodness: 2.0,
            mean_bad_goodness: 0.25,
            test_error: None,
        };
        assert_eq!(m.csv_row(), "3,0.5,1,,2,0.25");
        assert_eq!(
            METRICS_CSV_HEADER.split(',').count(),
            m.csv_row().split(',').count()
        );
    }
}

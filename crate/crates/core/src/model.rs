//! The Forward-Forward perceptron: `y = act(W x + b)`, its goodness, the
//! logistic loss on goodness minus a threshold, and analytic gradients.
//!
//! Training pushes goodness above the threshold `theta` for correctly labelled
//! inputs ([`Polarity::Good`]) and below it for incorrectly labelled ones
//! ([`Polarity::Bad`]). There is no backpropagation between layers because
//! there is only one layer.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::linalg::{dot, matvec, Matrix, Vector};
use crate::{Error, Result};

/// Default negative-side slope for [`ActivationKind::LeakyRelu`].
pub const DEFAULT_LEAKY_SLOPE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ActivationKind {
    Identity,
    Relu,
    /// `z` for `z >= 0`, `slope · z` otherwise; `slope` in (0, 1).
    LeakyRelu {
        slope: f64,
    },
    Tanh,
}

impl ActivationKind {
    pub fn leaky() -> Self {
        Self::LeakyRelu {
            slope: DEFAULT_LEAKY_SLOPE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Self::LeakyRelu { slope } = *self {
            if !(slope > 0.0 && slope < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "leaky ReLU slope must lie in (0, 1), got {slope}"
                )));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn apply(&self, z: f64) -> f64 {
        match *self {
            Self::Identity => z,
            Self::Relu => z.max(0.0),
            Self::LeakyRelu { slope } => {
                if z >= 0.0 {
                    z
                } else {
                    slope * z
                }
            }
            Self::Tanh => z.tanh(),
        }
    }

    /// Derivative at `z`. At the kink ReLU uses 0 and leaky ReLU uses its slope.
    #[inline]
    pub fn derivative(&self, z: f64) -> f64 {
        match *self {
            Self::Identity => 1.0,
            Self::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Self::LeakyRelu { slope } => {
                if z > 0.0 {
                    1.0
                } else {
                    slope
                }
            }
            Self::Tanh => {
                let t = z.tanh();
                1.0 - t * t
            }
        }
    }

    /// Whether `z` sits at a point where the activation is not differentiable.
    pub fn has_kink_near(&self, z: f64, margin: f64) -> bool {
        matches!(self, Self::Relu | Self::LeakyRelu { .. }) && z.abs() < margin
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::Relu => "relu",
            Self::LeakyRelu { .. } => "leaky",
            Self::Tanh => "tanh",
        }
    }

    pub fn slope(&self) -> f64 {
        match *self {
            Self::LeakyRelu { slope } => slope,
            _ => 0.0,
        }
    }

    /// Builds an activation from its `name()` and a slope (ignored unless leaky).
    pub fn from_name(name: &str, slope: f64) -> Result<Self> {
        let kind = match name {
            "identity" => Self::Identity,
            "relu" => Self::Relu,
            "leaky" => Self::LeakyRelu { slope },
            "tanh" => Self::Tanh,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown activation '{other}'"
                )))
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

/// How squared outputs are reduced to a goodness value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GoodnessMode {
    SumSquares,
    MeanSquares,
}

impl GoodnessMode {
    /// Factor applied to the sum of squares for `len` outputs.
    #[inline]
    pub fn scale(&self, len: usize) -> f64 {
        match self {
            Self::SumSquares => 1.0,
            Self::MeanSquares => 1.0 / len as f64,
        }
    }

    /// Goodness from a sum of squares over `len` outputs.
    #[inline]
    pub fn reduce(&self, sum_squares: f64, len: usize) -> f64 {
        match self {
            Self::SumSquares => sum_squares,
            Self::MeanSquares => sum_squares / len as f64,
        }
    }
}

impl FromStr for GoodnessMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(Self::SumSquares),
            "mean" => Ok(Self::MeanSquares),
            other => Err(Error::InvalidConfig(format!(
                "unknown goodness mode '{other}' (expected sum or mean)"
            ))),
        }
    }
}

impl fmt::Display for GoodnessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::SumSquares => "sum",
            Self::MeanSquares => "mean",
        })
    }
}

/// Whether an input carries its correct label (good) or a wrong one (bad).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Good,
    Bad,
}

impl Polarity {
    /// `-1` for good data, `+1` for bad data.
    #[inline]
    pub fn sign(&self) -> f64 {
        match self {
            Self::Good => -1.0,
            Self::Bad => 1.0,
        }
    }
}

/// Sum or mean of squared elements of `y`.
pub fn goodness(y: &[f64], mode: GoodnessMode) -> f64 {
    debug_assert!(!y.is_empty());
    mode.reduce(y.iter().map(|v| v * v).sum(), y.len())
}

/// `ln(1 + e^t)` without overflow.
#[inline]
pub fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

#[inline]
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Logistic loss on `g - theta`: `softplus(-(g - theta))` for good data,
/// `softplus(g - theta)` for bad data.
#[inline]
pub fn ff_loss(g: f64, theta: f64, polarity: Polarity) -> f64 {
    softplus(polarity.sign() * (g - theta))
}

/// `σ(g - theta)`, the probability that an input is good.
#[inline]
pub fn goodness_probability(g: f64, theta: f64) -> f64 {
    sigmoid(g - theta)
}

/// Derivative of [`ff_loss`] with respect to `g`.
#[inline]
pub fn ff_loss_slope(g: f64, theta: f64, polarity: Polarity) -> f64 {
    let s = polarity.sign();
    s * sigmoid(s * (g - theta))
}

/// Gradients shaped like a [`PerceptronModel`]'s parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub d_weights: Matrix,
    pub d_bias: Vector,
}

impl Gradients {
    pub fn zeros_like(model: &PerceptronModel) -> Self {
        Self {
            d_weights: Matrix::zeros(model.outputs(), model.inputs())
                .expect("model shape is non-empty"),
            d_bias: Vector::zeros(model.outputs()),
        }
    }

    pub fn clear(&mut self) {
        self.d_weights.fill(0.0);
        self.d_bias.fill(0.0);
    }

    pub fn scale(&mut self, factor: f64) {
        self.d_weights
            .as_mut_slice()
            .iter_mut()
            .for_each(|g| *g *= factor);
        self.d_bias.iter_mut().for_each(|g| *g *= factor);
    }
}

/// A single-layer perceptron: weights (outputs × inputs), bias, activation.
#[derive(Debug, Clone, PartialEq)]
pub struct PerceptronModel {
    pub weights: Matrix,
    pub bias: Vector,
    pub activation: ActivationKind,
}

/// Per-output state of one forward pass, kept for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    pub pre_activation: Vec<f64>,
    pub output: Vec<f64>,
}

impl PerceptronModel {
    pub fn new(weights: Matrix, bias: Vector, activation: ActivationKind) -> Result<Self> {
        if weights.rows() != bias.len() {
            return Err(Error::DimensionMismatch {
                op: "PerceptronModel::new",
                expected: weights.rows(),
                found: bias.len(),
            });
        }
        activation.validate()?;
        Ok(Self {
            weights,
            bias,
            activation,
        })
    }

    pub fn zeros(outputs: usize, inputs: usize, activation: ActivationKind) -> Result<Self> {
        Self::new(
            Matrix::zeros(outputs, inputs)?,
            Vector::zeros(outputs),
            activation,
        )
    }

    /// Weights uniform in `[-1/√inputs, 1/√inputs]`, biases zero.
    pub fn init_uniform<R: Rng + ?Sized>(
        outputs: usize,
        inputs: usize,
        activation: ActivationKind,
        rng: &mut R,
    ) -> Result<Self> {
        let mut model = Self::zeros(outputs, inputs, activation)?;
        let limit = 1.0 / (inputs as f64).sqrt();
        for w in model.weights.as_mut_slice() {
            *w = rng.random_range(-limit..=limit);
        }
        Ok(model)
    }

    pub fn outputs(&self) -> usize {
        self.weights.rows()
    }

    pub fn inputs(&self) -> usize {
        self.weights.cols()
    }

    /// `outputs · inputs + outputs`.
    pub fn parameter_count(&self) -> usize {
        self.outputs() * self.inputs() + self.outputs()
    }

    pub fn is_finite(&self) -> bool {
        self.weights.as_slice().iter().all(|w| w.is_finite())
            && self.bias.iter().all(|b| b.is_finite())
    }

    fn check_input(&self, op: &'static str, x: &[f64]) -> Result<()> {
        if x.len() != self.inputs() {
            return Err(Error::DimensionMismatch {
                op,
                expected: self.inputs(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `W x + b`.
    pub fn pre_activation(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input("pre_activation", x)?;
        let mut z = matvec(&self.weights, x)?.into_inner();
        z.iter_mut()
            .zip(self.bias.iter())
            .for_each(|(z, b)| *z += b);
        Ok(z)
    }

    /// `act(W x + b)`.
    pub fn forward(&self, x: &[f64]) -> Result<Vector> {
        self.forward_pass(x)?.output.try_into()
    }

    pub fn forward_pass(&self, x: &[f64]) -> Result<ForwardPass> {
        let z = self.pre_activation(x)?;
        Ok(self.activate(z))
    }

    pub(crate) fn activate(&self, pre_activation: Vec<f64>) -> ForwardPass {
        let output = pre_activation
            .iter()
            .map(|&z| self.activation.apply(z))
            .collect();
        ForwardPass {
            pre_activation,
            output,
        }
    }

    /// Loss and exact gradients for one input of the given polarity.
    pub fn backward(
        &self,
        x: &[f64],
        theta: f64,
        mode: GoodnessMode,
        polarity: Polarity,
    ) -> Result<(f64, Gradients)> {
        let mut grads = Gradients::zeros_like(self);
        let loss = self.accumulate_gradients(x, theta, mode, polarity, 1.0, &mut grads)?;
        Ok((loss, grads))
    }

    /// Adds `scale · ∂loss/∂params` for one input into `grads`; returns the loss.
    pub fn accumulate_gradients(
        &self,
        x: &[f64],
        theta: f64,
        mode: GoodnessMode,
        polarity: Polarity,
        scale: f64,
        grads: &mut Gradients,
    ) -> Result<f64> {
        self.check_input("backward", x)?;
        let pass = self.forward_pass(x)?;
        let mut delta = vec![0.0; self.outputs()];
        let (loss, _) = self.output_deltas(&pass, theta, mode, polarity, &mut delta);
        self.accumulate_outer(&delta, x, scale, grads);
        Ok(loss)
    }

    /// Computes `∂loss/∂z` into `delta`; returns `(loss, goodness)`.
    pub(crate) fn output_deltas(
        &self,
        pass: &ForwardPass,
        theta: f64,
        mode: GoodnessMode,
        polarity: Polarity,
        delta: &mut [f64],
    ) -> (f64, f64) {
        let c = mode.scale(pass.output.len());
        let g = goodness(&pass.output, mode);
        let loss = ff_loss(g, theta, polarity);
        let slope = ff_loss_slope(g, theta, polarity);
        for ((d, &y), &z) in delta.iter_mut().zip(&pass.output).zip(&pass.pre_activation) {
            *d = slope * c * 2.0 * y * self.activation.derivative(z);
        }
        (loss, g)
    }

    /// `grads.W += scale · delta xᵀ`, `grads.b += scale · delta`.
    ///
    /// Zero inputs are skipped; their contribution is exactly zero.
    pub(crate) fn accumulate_outer(
        &self,
        delta: &[f64],
        x: &[f64],
        scale: f64,
        grads: &mut Gradients,
    ) {
        let nonzero: Vec<usize> = (0..x.len()).filter(|&j| x[j] != 0.0).collect();
        for (i, &d) in delta.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            let s = scale * d;
            grads.d_bias[i] += s;
            let row = grads.d_weights.row_mut(i);
            for &j in &nonzero {
                row[j] += s * x[j];
            }
        }
    }

    /// `W[:, ..prefix.len()] · prefix + b`, the part of the pre-activation
    /// that does not depend on the label block appended after `prefix`.
    pub(crate) fn prefix_pre_activation(&self, prefix: &[f64]) -> Vec<f64> {
        let n = prefix.len();
        (0..self.outputs())
            .map(|i| dot(&self.weights.row(i)[..n], prefix) + self.bias[i])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn model(rows: &[Vec<f64>], bias: &[f64], act: ActivationKind) -> PerceptronModel {
        PerceptronModel::new(
            Matrix::from_rows(rows).unwrap(),
            Vector::new(bias.to_vec()).unwrap(),
            act,
        )
        .unwrap()
    }

    #[test]
    fn forward_examples() {
        let eye = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let m = model(&eye, &[0.0, 0.0], ActivationKind::Identity);
        assert_eq!(m.forward(&[0.5, -0.5]).unwrap().as_slice(), &[0.5, -0.5]);

        let m = model(&eye, &[0.0, 0.0], ActivationKind::Relu);
        assert_eq!(m.forward(&[-1.0, 2.0]).unwrap().as_slice(), &[0.0, 2.0]);

        let m = model(
            &eye,
            &[-2.0, 0.0],
            ActivationKind::LeakyRelu { slope: 0.01 },
        );
        assert_eq!(m.forward(&[1.0, 1.0]).unwrap().as_slice(), &[-0.01, 1.0]);

        assert!(matches!(
            m.forward(&[1.0]),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 1,
                ..
            })
        ));
    }

    #[test]
    fn goodness_examples() {
        for mode in [GoodnessMode::SumSquares, GoodnessMode::MeanSquares] {
            assert_eq!(goodness(&[0.0, 0.0, 0.0], mode), 0.0);
        }
        assert_eq!(goodness(&[1.0, 2.0, 2.0], GoodnessMode::SumSquares), 9.0);
        assert_eq!(goodness(&[1.0, 2.0, 2.0], GoodnessMode::MeanSquares), 3.0);
    }

    #[test]
    fn ff_loss_examples() {
        let ln2 = std::f64::consts::LN_2;
        for p in [Polarity::Good, Polarity::Bad] {
            assert!((ff_loss(3.5, 3.5, p) - ln2).abs() < 1e-12);
        }
        assert_eq!(ff_loss(1e6, 0.0, Polarity::Good), 0.0);
        // ln(1 + e^-2), evaluated directly.
        let direct = (1.0 + (-2.0f64).exp()).ln();
        assert!((ff_loss(12.0, 10.0, Polarity::Good) - direct).abs() < 1e-15);
        assert!((direct - 0.126928).abs() < 1e-6);
    }

    #[test]
    fn ff_loss_is_stable_for_large_margins() {
        for t in [-1e4, -700.0, 700.0, 1e4] {
            for p in [Polarity::Good, Polarity::Bad] {
                let l = ff_loss(t, 0.0, p);
                assert!(l.is_finite() && l >= 0.0, "t={t} p={p:?} -> {l}");
            }
        }
        assert_eq!(ff_loss(-1e4, 0.0, Polarity::Good), 1e4);
    }

    #[test]
    fn goodness_probability_examples() {
        assert_eq!(goodness_probability(2.0, 2.0), 0.5);
        assert_eq!(goodness_probability(-1e4, 0.0), 0.0);
        assert!((goodness_probability(3f64.ln(), 0.0) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn dead_relu_unit_has_zero_gradient() {
        let m = PerceptronModel::zeros(3, 4, ActivationKind::Relu).unwrap();
        for p in [Polarity::Good, Polarity::Bad] {
            let (loss, g) = m
                .backward(&[0.3, -1.0, 2.0, 0.5], 1.0, GoodnessMode::SumSquares, p)
                .unwrap();
            assert!((loss - ff_loss(0.0, 1.0, p)).abs() < 1e-15);
            assert!(g.d_weights.as_slice().iter().all(|&v| v == 0.0));
            assert!(g.d_bias.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn polarity_delta_ratio() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = PerceptronModel::init_uniform(5, 3, ActivationKind::Tanh, &mut rng).unwrap();
        let x = [0.4, -0.7, 1.0];
        let theta = 0.8;
        let (_, good) = m
            .backward(&x, theta, GoodnessMode::SumSquares, Polarity::Good)
            .unwrap();
        let (_, bad) = m
            .backward(&x, theta, GoodnessMode::SumSquares, Polarity::Bad)
            .unwrap();
        let g = goodness(m.forward(&x).unwrap().as_slice(), GoodnessMode::SumSquares);
        let expected = -sigmoid(-(g - theta)) / sigmoid(g - theta);
        for (a, b) in good.d_bias.iter().zip(bad.d_bias.iter()) {
            assert!((a / b - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn activation_validation() {
        assert!(ActivationKind::LeakyRelu { slope: 0.0 }.validate().is_err());
        assert!(ActivationKind::LeakyRelu { slope: 1.0 }.validate().is_err());
        assert!(ActivationKind::from_name("leaky", 0.2).is_ok());
        assert!(ActivationKind::from_name("sigmoid", 0.0).is_err());
        assert_eq!(ActivationKind::Relu.derivative(0.0), 0.0);
        assert_eq!(ActivationKind::leaky().derivative(0.0), DEFAULT_LEAKY_SLOPE);
    }

    #[test]
    fn parameter_count_of_spiral_model() {
        let m = PerceptronModel::zeros(32, 3, ActivationKind::leaky()).unwrap();
        assert_eq!(m.parameter_count(), 128);
    }
}

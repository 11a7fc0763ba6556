//! Adam with bias-corrected moment estimates.
//!
//! Weights and biases are viewed as one flat parameter vector: the weight
//! matrix in row-major order followed by the bias vector.

use crate::model::{Gradients, PerceptronModel};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamConfig {
    /// Learning rate used for the MNIST runs.
    pub const MNIST_LEARNING_RATE: f64 = 3e-4;

    pub fn with_learning_rate(learning_rate: f64) -> Self {
        Self {
            learning_rate,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.learning_rate > 0.0
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.epsilon > 0.0;
        if !ok {
            return Err(Error::InvalidConfig(format!(
                "Adam requires lr > 0, 0 <= beta1, beta2 < 1 and epsilon > 0; got {self:?}"
            )));
        }
        Ok(())
    }
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: Self::MNIST_LEARNING_RATE,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// First and second moment estimates plus the step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    outputs: usize,
    inputs: usize,
    pub(crate) m: Vec<f64>,
    pub(crate) v: Vec<f64>,
    pub(crate) t: u64,
}

impl AdamState {
    pub fn new(outputs: usize, inputs: usize) -> Self {
        let n = outputs * inputs + outputs;
        Self {
            outputs,
            inputs,
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    pub fn for_model(model: &PerceptronModel) -> Self {
        Self::new(model.outputs(), model.inputs())
    }

    pub(crate) fn from_parts(
        outputs: usize,
        inputs: usize,
        m: Vec<f64>,
        v: Vec<f64>,
        t: u64,
    ) -> Self {
        Self {
            outputs,
            inputs,
            m,
            v,
            t,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.outputs, self.inputs)
    }

    pub fn parameter_count(&self) -> usize {
        self.m.len()
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn first_moments(&self) -> &[f64] {
        &self.m
    }

    pub fn second_moments(&self) -> &[f64] {
        &self.v
    }

    /// One Adam update of `model` using `grads`.
    pub fn step(
        &mut self,
        model: &mut PerceptronModel,
        grads: &Gradients,
        cfg: &AdamConfig,
    ) -> Result<()> {
        let shape = (model.outputs(), model.inputs());
        let grad_shape = (grads.d_weights.rows(), grads.d_weights.cols());
        for (op, found) in [
            ("adam_step (model)", shape),
            ("adam_step (gradients)", grad_shape),
        ] {
            if found != self.shape() {
                return Err(Error::DimensionMismatch {
                    op,
                    expected: self.parameter_count(),
                    found: found.0 * found.1 + found.0,
                });
            }
        }
        if grads.d_bias.len() != self.outputs {
            return Err(Error::DimensionMismatch {
                op: "adam_step (bias gradient)",
                expected: self.outputs,
                found: grads.d_bias.len(),
            });
        }

        self.t += 1;
        let t = self.t as i32;
        let bc1 = 1.0 - cfg.beta1.powi(t);
        let bc2 = 1.0 - cfg.beta2.powi(t);

        let params = model
            .weights
            .as_mut_slice()
            .iter_mut()
            .chain(model.bias.iter_mut());
        let gs = grads.d_weights.as_slice().iter().chain(grads.d_bias.iter());
        for (((p, &g), m), v) in params.zip(gs).zip(&mut self.m).zip(&mut self.v) {
            *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g;
            *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *p -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Matrix, Vector};
    use crate::model::ActivationKind;

    fn grads(w: Vec<f64>, rows: usize, cols: usize, b: Vec<f64>) -> Gradients {
        Gradients {
            d_weights: Matrix::from_vec(rows, cols, w).unwrap(),
            d_bias: Vector::new(b).unwrap(),
        }
    }

    #[test]
    fn init_sizes() {
        let s = AdamState::new(2, 3);
        assert_eq!(s.parameter_count(), 8);
        assert!(s.m.iter().chain(&s.v).all(|&x| x == 0.0));
        assert_eq!(s.steps(), 0);
        assert_eq!(AdamState::new(1, 1).parameter_count(), 2);
        assert_eq!(AdamState::new(8000, 794).parameter_count(), 6_360_000);
    }

    #[test]
    fn zero_gradient_leaves_model_unchanged() {
        let mut model = PerceptronModel::zeros(2, 2, ActivationKind::Relu).unwrap();
        model.weights[(0, 1)] = 0.25;
        let before = model.clone();
        let mut s = AdamState::for_model(&model);
        let g = Gradients::zeros_like(&model);
        s.step(&mut model, &g, &AdamConfig::default()).unwrap();
        assert_eq!(model, before);
        assert_eq!(s.steps(), 1);
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        let cfg = AdamConfig::with_learning_rate(1e-3);
        let mut model = PerceptronModel::zeros(1, 2, ActivationKind::Identity).unwrap();
        let mut s = AdamState::for_model(&model);
        let g = grads(vec![0.5, -3.0], 1, 2, vec![1e-3]);
        s.step(&mut model, &g, &cfg).unwrap();
        // m̂ = g, v̂ = g², update = lr · g / (|g| + eps)
        for (p, gi) in [
            (model.weights[(0, 0)], 0.5),
            (model.weights[(0, 1)], -3.0),
            (model.bias[0], 1e-3),
        ] {
            let expected = -1e-3 * gi / (f64::abs(gi) + 1e-8);
            assert!((p - expected).abs() < 1e-15, "{p} vs {expected}");
        }
    }

    #[test]
    fn constant_gradient_descends_by_lr_each_step() {
        let cfg = AdamConfig::with_learning_rate(0.01);
        let mut model = PerceptronModel::zeros(1, 1, ActivationKind::Identity).unwrap();
        let mut s = AdamState::for_model(&model);
        let g = grads(vec![2.0], 1, 1, vec![2.0]);
        let mut prev = 0.0;
        for _ in 0..2 {
            s.step(&mut model, &g, &cfg).unwrap();
            let w = model.weights[(0, 0)];
            assert!(w < prev);
            assert!(((prev - w) - 0.01).abs() < 1e-9);
            prev = w;
        }
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let mut model = PerceptronModel::zeros(2, 2, ActivationKind::Relu).unwrap();
        let mut s = AdamState::new(2, 3);
        let g = Gradients::zeros_like(&model);
        assert!(s.step(&mut model, &g, &AdamConfig::default()).is_err());
        assert_eq!(s.steps(), 0);
    }

    #[test]
    fn invalid_config() {
        assert!(AdamConfig::with_learning_rate(0.0).validate().is_err());
        assert!(AdamConfig {
            beta1: 1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(AdamConfig {
            epsilon: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(AdamConfig::default().validate().is_ok());
    }
}

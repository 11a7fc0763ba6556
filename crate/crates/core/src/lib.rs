//! A single multi-output perceptron trained with the Forward-Forward procedure.
//!
//! The model is one matrix multiplication followed by an element-wise
//! activation, `y = act(W x + b)`. Its *goodness* is the sum (or mean) of the
//! squared outputs. The class label is part of the input: training raises the
//! goodness of correctly labelled inputs above a threshold and lowers that of
//! incorrectly labelled ones, and classification picks the label that yields
//! the highest goodness.
//!
//! ```
//! use ffp::data::{generate_xor, LabelScheme};
//! use ffp::optim::AdamState;
//! use ffp::train::{evaluate, TrainConfig, Trainer};
//!
//! # fn main() -> ffp::Result<()> {
//! let data = generate_xor(1, 0.0, 0)?;
//! let cfg = TrainConfig { seed: 1, ..TrainConfig::xor() };
//! let mut trainer = Trainer::new(cfg.clone())?;
//! let mut model = trainer.init_model(2)?;
//! let mut adam = AdamState::for_model(&model);
//! for _ in 0..cfg.epochs {
//!     trainer.run_epoch(&mut model, &mut adam, &data)?;
//! }
//! let report = evaluate(&model, &data, 2, &LabelScheme::Scalar, cfg.goodness_mode)?;
//! assert_eq!(report.accuracy, 1.0);
//! # Ok(())
//! # }
//! ```
//!
//! The guide in `book/` walks through the concepts; its code listings are
//! compiled and run as doc-tests of this crate.

pub mod data;
mod error;
pub mod linalg;
pub mod model;
pub mod optim;
pub mod persist;
pub mod train;

pub use error::{Error, IdxError, Result};
pub use linalg::{Matrix, Vector};
pub use model::{ActivationKind, GoodnessMode, Gradients, PerceptronModel, Polarity};
pub use optim::{AdamConfig, AdamState};
pub use train::{classify, evaluate, train, EvalReport, TrainConfig, Trainer};

// Runs the book's code listings as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/goodness.md")]
    mod goodness {}
    #[doc = include_str!("../../../book/src/labels.md")]
    mod labels {}
    #[doc = include_str!("../../../book/src/training.md")]
    mod training {}
    #[doc = include_str!("../../../book/src/classify.md")]
    mod classify {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/formats.md")]
    mod formats {}
}

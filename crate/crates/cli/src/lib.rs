//! Command-line front end for the `ffp` crate: the XOR, two-spirals and
//! MNIST experiments, map rendering and evaluation of saved models.

pub mod cli;
pub mod image;
pub mod run;

pub use cli::Cli;
pub use image::{encode_ppm, write_map_image, PALETTE};
pub use run::{run, Command, RunSpec, RunSummary};

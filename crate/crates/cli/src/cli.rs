//! Command-line arguments.
//!
//! Every tunable flag says whether its default is the paper's value
//! (`[paper]`) or a choice made here (`[default-choice]`).

use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use ffp::data::LabelScheme;
use ffp::model::DEFAULT_LEAKY_SLOPE;
use ffp::train::TrainConfig;
use ffp::{ActivationKind, AdamConfig, GoodnessMode};

use crate::run::{
    scheme_for_map, Command, EvalData, MnistPaths, RunSpec, SpiralData, XorData,
    DEFAULT_MAP_RESOLUTION, SPIRAL_EXTENT, XOR_EXTENT,
};

#[derive(Debug, Parser)]
#[command(
    name = "ffp",
    version,
    about = "Forward-Forward training of a single multi-output perceptron"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,

    /// Worker threads for evaluation and maps; 0 uses every core. Results do
    /// not depend on this. [default-choice]
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Learn XOR from the four corners of the square and draw its classification map.
    Xor(XorArgs),
    /// Learn two interleaved spirals and draw the classification map.
    Spiral(SpiralArgs),
    /// Train on MNIST IDX files and report test error every epoch.
    Mnist(MnistArgs),
    /// Draw the classification map of a saved two-feature model.
    ClassifyMap(MapArgs),
    /// Evaluate a saved model.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ActivationArg {
    Relu,
    Leaky,
    Tanh,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GoodnessArg {
    /// Sum of squared outputs.
    Sum,
    /// Mean of squared outputs.
    Mean,
}

impl From<GoodnessArg> for GoodnessMode {
    fn from(g: GoodnessArg) -> Self {
        match g {
            GoodnessArg::Sum => GoodnessMode::SumSquares,
            GoodnessArg::Mean => GoodnessMode::MeanSquares,
        }
    }
}

fn activation(kind: ActivationArg, slope: f64) -> ActivationKind {
    match kind {
        ActivationArg::Relu => ActivationKind::Relu,
        ActivationArg::Leaky => ActivationKind::LeakyRelu { slope },
        ActivationArg::Tanh => ActivationKind::Tanh,
        ActivationArg::Identity => ActivationKind::Identity,
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Directory for the model, optimizer state, metrics and images. [default-choice: runs/<command>]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,

    /// Also save model, optimizer state and metrics every N epochs. [default-choice: only at the end]
    #[arg(long, value_name = "N")]
    pub checkpoint_every: Option<usize>,

    /// Seed for initialization, shuffling, wrong labels, jitter and generated data. [default-choice]
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl OutputArgs {
    fn dir(&self, command: &str) -> PathBuf {
        self.out_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("runs").join(command))
    }
}

#[derive(Debug, Clone, Args)]
pub struct XorArgs {
    /// Output units; any number above one can solve XOR. [default-choice]
    #[arg(long, default_value_t = 4)]
    pub outputs: usize,
    /// [default-choice]
    #[arg(long, default_value_t = 1000)]
    pub epochs: usize,
    /// Adam learning rate. [default-choice]
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,
    /// Goodness threshold. [default-choice]
    #[arg(long, default_value_t = 32.0)]
    pub theta: f64,
    /// [paper: summed squares]
    #[arg(long, value_enum, default_value_t = GoodnessArg::Sum)]
    pub goodness: GoodnessArg,
    /// [default-choice]
    #[arg(long, value_enum, default_value_t = ActivationArg::Leaky)]
    pub activation: ActivationArg,
    /// Negative-side slope of the leaky ReLU. [default-choice]
    #[arg(long, default_value_t = DEFAULT_LEAKY_SLOPE)]
    pub slope: f64,
    /// [default-choice: all four corners in one batch]
    #[arg(long, default_value_t = 4)]
    pub batch_size: usize,
    /// Training samples around each corner. [default-choice]
    #[arg(long, default_value_t = 1)]
    pub per_combination: usize,
    /// Uniform jitter of each coordinate around the corners. [default-choice: exact corners]
    #[arg(long, default_value_t = 0.0)]
    pub jitter: f64,
    /// Pixels per side of the map over [-1.5, 1.5]². [default-choice]
    #[arg(long, default_value_t = DEFAULT_MAP_RESOLUTION)]
    pub map_resolution: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SpiralArgs {
    /// [paper: 32]
    #[arg(long, default_value_t = 32)]
    pub outputs: usize,
    /// [default-choice]
    #[arg(long, default_value_t = 1000)]
    pub epochs: usize,
    /// Adam learning rate. [default-choice]
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,
    /// Goodness threshold. [default-choice]
    #[arg(long, default_value_t = 32.0)]
    pub theta: f64,
    /// [paper: summed squares]
    #[arg(long, value_enum, default_value_t = GoodnessArg::Sum)]
    pub goodness: GoodnessArg,
    /// [paper: leaky ReLU]
    #[arg(long, value_enum, default_value_t = ActivationArg::Leaky)]
    pub activation: ActivationArg,
    /// Negative-side slope of the leaky ReLU. [default-choice]
    #[arg(long, default_value_t = DEFAULT_LEAKY_SLOPE)]
    pub slope: f64,
    /// [default-choice]
    #[arg(long, default_value_t = 10)]
    pub batch_size: usize,
    /// Training points per arm. [default-choice]
    #[arg(long, default_value_t = SpiralData::default().points_per_class)]
    pub points: usize,
    /// Held-out points per arm. [default-choice]
    #[arg(long, default_value_t = SpiralData::default().test_points_per_class)]
    pub test_points: usize,
    /// Turns of each arm. [default-choice]
    #[arg(long, default_value_t = SpiralData::default().turns)]
    pub turns: f64,
    /// Standard deviation of the Gaussian noise around the arms. [default-choice]
    #[arg(long, default_value_t = SpiralData::default().noise_sd)]
    pub noise: f64,
    /// Pixels per side of the map over [-1.2, 1.2]². [default-choice]
    #[arg(long, default_value_t = DEFAULT_MAP_RESOLUTION)]
    pub map_resolution: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct MnistFiles {
    /// Directory holding the four standard IDX files.
    #[arg(long, env = "FFP_DATA_DIR", default_value = "data/mnist")]
    pub data_dir: PathBuf,
    /// [default: <data-dir>/train-images-idx3-ubyte]
    #[arg(long)]
    pub train_images: Option<PathBuf>,
    /// [default: <data-dir>/train-labels-idx1-ubyte]
    #[arg(long)]
    pub train_labels: Option<PathBuf>,
    /// [default: <data-dir>/t10k-images-idx3-ubyte]
    #[arg(long)]
    pub test_images: Option<PathBuf>,
    /// [default: <data-dir>/t10k-labels-idx1-ubyte]
    #[arg(long)]
    pub test_labels: Option<PathBuf>,
}

impl MnistFiles {
    pub fn paths(&self) -> MnistPaths {
        let d = MnistPaths::in_dir(&self.data_dir);
        MnistPaths {
            train_images: self.train_images.clone().unwrap_or(d.train_images),
            train_labels: self.train_labels.clone().unwrap_or(d.train_labels),
            test_images: self.test_images.clone().unwrap_or(d.test_images),
            test_labels: self.test_labels.clone().unwrap_or(d.test_labels),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct MnistArgs {
    /// [paper: 125, 500 or 8000]
    #[arg(long, default_value_t = 125)]
    pub outputs: usize,
    /// [paper: 80 for 125 outputs]
    #[arg(long, default_value_t = 80)]
    pub epochs: usize,
    /// Adam learning rate. [paper]
    #[arg(long, default_value_t = AdamConfig::MNIST_LEARNING_RATE)]
    pub lr: f64,
    /// Goodness threshold. [paper]
    #[arg(long, default_value_t = 10.0)]
    pub theta: f64,
    /// [paper: mean of squares]
    #[arg(long, value_enum, default_value_t = GoodnessArg::Mean)]
    pub goodness: GoodnessArg,
    /// [paper: ReLU]
    #[arg(long, value_enum, default_value_t = ActivationArg::Relu)]
    pub activation: ActivationArg,
    /// Negative-side slope if --activation leaky. [default-choice]
    #[arg(long, default_value_t = DEFAULT_LEAKY_SLOPE)]
    pub slope: f64,
    /// [paper]
    #[arg(long, default_value_t = 10)]
    pub batch_size: usize,
    /// Shift each training image by up to two pixels per presentation. [paper: off for the 125-output row]
    #[arg(long)]
    pub augment: bool,
    /// Value at the label's position in the one-hot block. [default-choice]
    #[arg(long, default_value_t = TrainConfig::MNIST_HOT_VALUE)]
    pub hot_value: f64,
    #[command(flatten)]
    pub files: MnistFiles,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Framing {
    /// [-1.5, 1.5]²
    Xor,
    /// [-1.2, 1.2]²
    Spiral,
}

#[derive(Debug, Clone, Args)]
pub struct MapArgs {
    /// Saved model file.
    #[arg(long)]
    pub model: PathBuf,
    /// Plotted square.
    #[arg(long, value_enum, default_value_t = Framing::Xor)]
    pub range: Framing,
    /// Goodness used for classification; must match training.
    #[arg(long, value_enum, default_value_t = GoodnessArg::Sum)]
    pub goodness: GoodnessArg,
    /// One-hot label value, for models with more than one label input.
    #[arg(long, default_value_t = 1.0)]
    pub hot_value: f64,
    #[arg(long, default_value_t = DEFAULT_MAP_RESOLUTION)]
    pub map_resolution: usize,
    /// Directory for map.ppm. [default: runs/classify-map]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dataset {
    Xor,
    Spiral,
    Mnist,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Saved model file.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, value_enum)]
    pub dataset: Dataset,
    /// Goodness used for classification. [default: mean for mnist, sum otherwise]
    #[arg(long, value_enum)]
    pub goodness: Option<GoodnessArg>,
    /// One-hot label value for mnist models.
    #[arg(long, default_value_t = TrainConfig::MNIST_HOT_VALUE)]
    pub hot_value: f64,
    /// Seed whose held-out spiral set is used.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = SpiralData::default().turns)]
    pub turns: f64,
    #[arg(long, default_value_t = SpiralData::default().noise_sd)]
    pub noise: f64,
    #[arg(long, default_value_t = SpiralData::default().test_points_per_class)]
    pub test_points: usize,
    #[command(flatten)]
    pub files: MnistFiles,
}

impl XorArgs {
    pub fn spec(&self) -> RunSpec {
        RunSpec {
            command: Command::Xor(XorData {
                per_combination: self.per_combination,
                jitter_radius: self.jitter,
            }),
            config: TrainConfig {
                adam: AdamConfig::with_learning_rate(self.lr),
                theta: self.theta,
                goodness_mode: self.goodness.into(),
                batch_size: self.batch_size,
                epochs: self.epochs,
                seed: self.output.seed,
                outputs: self.outputs,
                activation: activation(self.activation, self.slope),
                ..TrainConfig::xor()
            },
            output_dir: self.output.dir("xor"),
            checkpoint_every: self.output.checkpoint_every,
            map_resolution: self.map_resolution,
        }
    }
}

impl SpiralArgs {
    pub fn spec(&self) -> RunSpec {
        RunSpec {
            command: Command::Spiral(SpiralData {
                points_per_class: self.points,
                test_points_per_class: self.test_points,
                turns: self.turns,
                noise_sd: self.noise,
            }),
            config: TrainConfig {
                adam: AdamConfig::with_learning_rate(self.lr),
                theta: self.theta,
                goodness_mode: self.goodness.into(),
                batch_size: self.batch_size,
                epochs: self.epochs,
                seed: self.output.seed,
                outputs: self.outputs,
                activation: activation(self.activation, self.slope),
                ..TrainConfig::spiral()
            },
            output_dir: self.output.dir("spiral"),
            checkpoint_every: self.output.checkpoint_every,
            map_resolution: self.map_resolution,
        }
    }
}

impl MnistArgs {
    pub fn spec(&self) -> RunSpec {
        RunSpec {
            command: Command::Mnist(self.files.paths()),
            config: TrainConfig {
                adam: AdamConfig::with_learning_rate(self.lr),
                theta: self.theta,
                goodness_mode: self.goodness.into(),
                batch_size: self.batch_size,
                augment: self.augment,
                seed: self.output.seed,
                activation: activation(self.activation, self.slope),
                label_scheme: LabelScheme::OneHot {
                    num_classes: 10,
                    hot_value: self.hot_value,
                },
                ..TrainConfig::mnist(self.outputs, self.epochs)
            },
            output_dir: self.output.dir("mnist"),
            checkpoint_every: self.output.checkpoint_every,
            map_resolution: DEFAULT_MAP_RESOLUTION,
        }
    }
}

impl MapArgs {
    pub fn spec(&self) -> anyhow::Result<RunSpec> {
        let model = ffp::persist::load_model(&self.model)
            .with_context(|| format!("loading model {}", self.model.display()))?;
        let (label_scheme, num_classes) = scheme_for_map(model.inputs(), self.hot_value)?;
        let e = match self.range {
            Framing::Xor => XOR_EXTENT,
            Framing::Spiral => SPIRAL_EXTENT,
        };
        Ok(RunSpec {
            command: Command::ClassifyMap {
                model: self.model.clone(),
                x_range: (-e, e),
                y_range: (-e, e),
            },
            config: TrainConfig {
                goodness_mode: self.goodness.into(),
                label_scheme,
                num_classes,
                ..TrainConfig::xor()
            },
            output_dir: self
                .out_dir
                .clone()
                .unwrap_or_else(|| PathBuf::from("runs/classify-map")),
            checkpoint_every: None,
            map_resolution: self.map_resolution,
        })
    }
}

impl EvalArgs {
    pub fn spec(&self) -> RunSpec {
        let (data, base) = match self.dataset {
            Dataset::Xor => (EvalData::Xor, TrainConfig::xor()),
            Dataset::Spiral => (
                EvalData::Spiral {
                    data: SpiralData {
                        test_points_per_class: self.test_points,
                        turns: self.turns,
                        noise_sd: self.noise,
                        ..SpiralData::default()
                    },
                    seed: self.seed,
                },
                TrainConfig::spiral(),
            ),
            Dataset::Mnist => {
                let p = self.files.paths();
                (
                    EvalData::Mnist {
                        images: p.test_images,
                        labels: p.test_labels,
                    },
                    TrainConfig {
                        label_scheme: LabelScheme::OneHot {
                            num_classes: 10,
                            hot_value: self.hot_value,
                        },
                        ..TrainConfig::mnist(1, 1)
                    },
                )
            }
        };
        RunSpec {
            command: Command::Eval {
                model: self.model.clone(),
                data,
            },
            config: TrainConfig {
                goodness_mode: self.goodness.map(Into::into).unwrap_or(base.goodness_mode),
                ..base
            },
            output_dir: PathBuf::from("."),
            checkpoint_every: None,
            map_resolution: DEFAULT_MAP_RESOLUTION,
        }
    }
}

impl Cli {
    pub fn spec(&self) -> anyhow::Result<RunSpec> {
        Ok(match &self.command {
            CliCommand::Xor(a) => a.spec(),
            CliCommand::Spiral(a) => a.spec(),
            CliCommand::Mnist(a) => a.spec(),
            CliCommand::ClassifyMap(a) => a.spec()?,
            CliCommand::Eval(a) => a.spec(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunSpec {
        let mut full = vec!["ffp"];
        full.extend_from_slice(args);
        Cli::try_parse_from(full).unwrap().spec().unwrap()
    }

    #[test]
    fn defaults_match_presets() {
        let xor = parse(&["xor"]);
        assert_eq!(xor.config, TrainConfig::xor());
        assert_eq!(xor.output_dir, PathBuf::from("runs/xor"));
        assert_eq!(xor.command, Command::Xor(XorData::default()));

        let spiral = parse(&["spiral"]);
        assert_eq!(spiral.config, TrainConfig::spiral());
        assert_eq!(spiral.command, Command::Spiral(SpiralData::default()));

        let mnist = parse(&["mnist", "--data-dir", "/d"]);
        assert_eq!(mnist.config, TrainConfig::mnist(125, 80));
        assert_eq!(
            mnist.command,
            Command::Mnist(MnistPaths::in_dir(std::path::Path::new("/d")))
        );
    }

    #[test]
    fn flags_override_presets() {
        let s = parse(&[
            "xor",
            "--outputs",
            "1",
            "--lr",
            "0.5",
            "--theta",
            "2",
            "--goodness",
            "mean",
            "--activation",
            "tanh",
            "--seed",
            "7",
            "--out-dir",
            "o",
            "--checkpoint-every",
            "3",
        ]);
        assert_eq!(s.config.outputs, 1);
        assert_eq!(s.config.adam.learning_rate, 0.5);
        assert_eq!(s.config.theta, 2.0);
        assert_eq!(s.config.goodness_mode, GoodnessMode::MeanSquares);
        assert_eq!(s.config.activation, ActivationKind::Tanh);
        assert_eq!(s.config.seed, 7);
        assert_eq!(s.output_dir, PathBuf::from("o"));
        assert_eq!(s.checkpoint_every, Some(3));

        let m = parse(&[
            "mnist",
            "--augment",
            "--outputs",
            "500",
            "--epochs",
            "260",
            "--test-labels",
            "/x",
        ]);
        assert!(m.config.augment);
        assert_eq!((m.config.outputs, m.config.epochs), (500, 260));
        let Command::Mnist(p) = m.command else {
            panic!()
        };
        assert_eq!(p.test_labels, PathBuf::from("/x"));
    }

    #[test]
    fn help_marks_every_default() {
        use clap::CommandFactory;
        let cmd = Cli::command();
        for name in ["xor", "spiral", "mnist"] {
            let sub = cmd.find_subcommand(name).unwrap();
            for arg in sub.get_arguments() {
                let id = arg.get_id().as_str();
                if matches!(id, "help" | "version" | "threads")
                    || id.ends_with("images")
                    || id.ends_with("labels")
                    || id == "data_dir"
                {
                    continue;
                }
                let help = arg.get_help().map(|h| h.to_string()).unwrap_or_default();
                assert!(
                    help.contains("[paper") || help.contains("[default-choice"),
                    "{name} --{id}: {help}"
                );
            }
        }
    }

    #[test]
    fn rejects_unknown_values() {
        assert!(Cli::try_parse_from(["ffp", "xor", "--goodness", "max"]).is_err());
        assert!(Cli::try_parse_from(["ffp", "xor", "--activation", "gelu"]).is_err());
        assert!(Cli::try_parse_from(["ffp", "mnist", "--epochs", "-1"]).is_err());
    }
}

//! Datasets and label embedding.
//!
//! A [`LabeledSample`] holds the raw signal. The class label only becomes part
//! of the model input when [`LabelScheme::embed`] appends it, either as one
//! scalar input or as a one-hot block.

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::linalg::Vector;
use crate::{Error, Result};

pub mod idx;

pub use idx::{load_mnist, load_mnist_images, load_mnist_labels, pair_samples};

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub features: Vector,
    pub label: usize,
}

impl LabeledSample {
    pub fn new(features: Vec<f64>, label: usize) -> Result<Self> {
        Ok(Self {
            features: Vector::new(features)?,
            label,
        })
    }
}

/// How a class label is appended to the feature vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LabelScheme {
    /// One extra input carrying the label value itself.
    Scalar,
    /// `num_classes` extra inputs, `hot_value` at the label's position.
    OneHot { num_classes: usize, hot_value: f64 },
}

impl LabelScheme {
    pub fn one_hot(num_classes: usize) -> Self {
        Self::OneHot {
            num_classes,
            hot_value: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Self::OneHot {
            num_classes,
            hot_value,
        } = *self
        {
            if num_classes < 2 {
                return Err(Error::InvalidConfig(format!(
                    "one-hot labels need at least 2 classes, got {num_classes}"
                )));
            }
            if hot_value == 0.0 || !hot_value.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "one-hot value must be finite and non-zero, got {hot_value}"
                )));
            }
        }
        Ok(())
    }

    /// Number of inputs the label occupies.
    pub fn extra_inputs(&self) -> usize {
        match *self {
            Self::Scalar => 1,
            Self::OneHot { num_classes, .. } => num_classes,
        }
    }

    fn check_label(&self, label: usize) -> Result<()> {
        match *self {
            Self::OneHot { num_classes, .. } if label >= num_classes => {
                Err(Error::LabelOutOfRange { label, num_classes })
            }
            _ => Ok(()),
        }
    }

    /// The single non-zero entry of the label block, as `(offset, value)`.
    ///
    /// For the scalar scheme with label 0 the value is zero.
    pub fn label_entry(&self, label: usize) -> Result<(usize, f64)> {
        self.check_label(label)?;
        Ok(match *self {
            Self::Scalar => (0, label as f64),
            Self::OneHot { hot_value, .. } => (label, hot_value),
        })
    }

    /// `features ++ label block`.
    pub fn embed(&self, features: &[f64], label: usize) -> Result<Vector> {
        let (offset, value) = self.label_entry(label)?;
        let mut out = Vec::with_capacity(features.len() + self.extra_inputs());
        out.extend_from_slice(features);
        out.resize(features.len() + self.extra_inputs(), 0.0);
        out[features.len() + offset] = value;
        Vector::new(out)
    }
}

/// Free-function form of [`LabelScheme::embed`].
pub fn embed_label(features: &[f64], label: usize, scheme: LabelScheme) -> Result<Vector> {
    scheme.embed(features, label)
}

/// Uniform draw from the `num_classes - 1` labels other than `true_label`.
pub fn sample_wrong_label<R: Rng + ?Sized>(
    true_label: usize,
    num_classes: usize,
    rng: &mut R,
) -> Result<usize> {
    if num_classes < 2 {
        return Err(Error::InvalidConfig(format!(
            "a wrong label needs at least 2 classes, got {num_classes}"
        )));
    }
    if true_label >= num_classes {
        return Err(Error::LabelOutOfRange {
            label: true_label,
            num_classes,
        });
    }
    let r = rng.random_range(0..num_classes - 1);
    Ok(if r >= true_label { r + 1 } else { r })
}

/// Corners of the XOR square with their labels: 0 for equal inputs, 1 otherwise.
pub const XOR_CORNERS: [([f64; 2], usize); 4] = [
    ([-1.0, -1.0], 0),
    ([1.0, 1.0], 0),
    ([-1.0, 1.0], 1),
    ([1.0, -1.0], 1),
];

/// `per_combination` samples around each corner of `(±1, ±1)`, each coordinate
/// jittered uniformly within `±jitter_radius`.
pub fn generate_xor(
    per_combination: usize,
    jitter_radius: f64,
    seed: u64,
) -> Result<Vec<LabeledSample>> {
    if per_combination == 0 {
        return Err(Error::InvalidConfig("per_combination must be >= 1".into()));
    }
    if !(0.0..1.0).contains(&jitter_radius) {
        return Err(Error::InvalidConfig(format!(
            "jitter radius must lie in [0, 1), got {jitter_radius}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jitter = |c: f64| {
        if jitter_radius == 0.0 {
            c
        } else {
            c + rng.random_range(-jitter_radius..=jitter_radius)
        }
    };
    let mut out = Vec::with_capacity(4 * per_combination);
    for ([x1, x2], label) in XOR_CORNERS {
        for _ in 0..per_combination {
            out.push(LabeledSample::new(vec![jitter(x1), jitter(x2)], label)?);
        }
    }
    Ok(out)
}

pub const SPIRAL_POINTS_PER_CLASS: usize = 1000;
pub const SPIRAL_TURNS: f64 = 2.0;
pub const SPIRAL_NOISE_SD: f64 = 0.02;

/// Noise-free point of spiral arm `class` (0 or 1) at parameter `t` in [0, 1].
///
/// Arm 0 is `t · (cos 2π·turns·t, sin 2π·turns·t)`; arm 1 is arm 0 rotated by π.
pub fn spiral_point(t: f64, turns: f64, class: usize) -> [f64; 2] {
    let phi = 2.0 * PI * turns * t;
    let p = [t * phi.cos(), t * phi.sin()];
    if class == 0 {
        p
    } else {
        [-p[0], -p[1]]
    }
}

/// Two interleaved spiral arms, `points_per_class` each, with isotropic
/// Gaussian noise of standard deviation `noise_sd`. Labels are 0 and 1.
pub fn generate_spirals(
    points_per_class: usize,
    turns: f64,
    noise_sd: f64,
    seed: u64,
) -> Result<Vec<LabeledSample>> {
    if points_per_class == 0
        || !turns.is_finite()
        || turns <= 0.0
        || !noise_sd.is_finite()
        || noise_sd < 0.0
    {
        return Err(Error::InvalidConfig(format!(
            "spirals need points_per_class >= 1, turns > 0 and noise_sd >= 0; \
             got {points_per_class}, {turns}, {noise_sd}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, noise_sd).expect("noise_sd is finite and non-negative");
    let mut out = Vec::with_capacity(2 * points_per_class);
    for class in 0..2 {
        for _ in 0..points_per_class {
            let t: f64 = rng.random_range(0.0..=1.0);
            let [x1, x2] = spiral_point(t, turns, class);
            let (n1, n2) = (noise.sample(&mut rng), noise.sample(&mut rng));
            out.push(LabeledSample::new(vec![x1 + n1, x2 + n2], class)?);
        }
    }
    Ok(out)
}

/// Writes two-dimensional samples as CSV with header `x1,x2,label`.
pub fn write_samples_csv<W: Write>(samples: &[LabeledSample], mut out: W) -> Result<()> {
    writeln!(out, "x1,x2,label")?;
    for s in samples {
        if s.features.len() != 2 {
            return Err(Error::DimensionMismatch {
                op: "write_samples_csv",
                expected: 2,
                found: s.features.len(),
            });
        }
        writeln!(out, "{},{},{}", s.features[0], s.features[1], s.label)?;
    }
    Ok(())
}

pub const IMAGE_WIDTH: usize = 28;
pub const IMAGE_HEIGHT: usize = 28;
pub const IMAGE_PIXELS: usize = IMAGE_WIDTH * IMAGE_HEIGHT;
/// Largest jitter shift along either axis.
pub const MAX_JITTER: i32 = 2;

/// A 28×28 row-major grayscale image with pixels in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    pixels: Vec<f64>,
}

impl ImageGrid {
    pub fn new(pixels: Vec<f64>) -> Result<Self> {
        if pixels.len() != IMAGE_PIXELS {
            return Err(Error::DimensionMismatch {
                op: "ImageGrid::new",
                expected: IMAGE_PIXELS,
                found: pixels.len(),
            });
        }
        if let Some(p) = pixels.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidConfig(format!(
                "pixel value {p} outside [0, 1]"
            )));
        }
        Ok(Self { pixels })
    }

    pub fn zeros() -> Self {
        Self {
            pixels: vec![0.0; IMAGE_PIXELS],
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Self::new(bytes.iter().map(|&b| f64::from(b) / 255.0).collect())
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    /// Pixel at column `x`, row `y`.
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * IMAGE_WIDTH + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.pixels[y * IMAGE_WIDTH + x] = value;
    }
}

/// Translates `img` by `dx` columns and `dy` rows. Pixels pushed past the
/// border are dropped; vacated pixels become 0.
pub fn jitter_image(img: &ImageGrid, dx: i32, dy: i32) -> Result<ImageGrid> {
    Ok(ImageGrid {
        pixels: jitter_pixels(img.pixels(), dx, dy)?,
    })
}

pub(crate) fn jitter_pixels(src: &[f64], dx: i32, dy: i32) -> Result<Vec<f64>> {
    if dx.abs() > MAX_JITTER || dy.abs() > MAX_JITTER {
        return Err(Error::ShiftTooLarge {
            dx,
            dy,
            max: MAX_JITTER,
        });
    }
    if src.len() != IMAGE_PIXELS {
        return Err(Error::DimensionMismatch {
            op: "jitter_image",
            expected: IMAGE_PIXELS,
            found: src.len(),
        });
    }
    let mut out = vec![0.0; IMAGE_PIXELS];
    let (w, h) = (IMAGE_WIDTH as i32, IMAGE_HEIGHT as i32);
    for y in 0..h {
        let sy = y - dy;
        if !(0..h).contains(&sy) {
            continue;
        }
        for x in 0..w {
            let sx = x - dx;
            if (0..w).contains(&sx) {
                out[(y * w + x) as usize] = src[(sy * w + sx) as usize];
            }
        }
    }
    Ok(out)
}

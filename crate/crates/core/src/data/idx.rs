//! MNIST IDX containers.
//!
//! Both files start with a big-endian `u32` magic number followed by one
//! big-endian `u32` per dimension, then unsigned bytes:
//!
//! | file   | magic        | dimensions        |
//! |--------|--------------|-------------------|
//! | images | `0x00000803` | count, 28, 28     |
//! | labels | `0x00000801` | count             |

use std::path::Path;

use super::{ImageGrid, LabeledSample, IMAGE_HEIGHT, IMAGE_WIDTH};
use crate::error::IdxError;
use crate::{Error, Result};

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;
pub const NUM_DIGITS: usize = 10;

struct Cursor<'a> {
    bytes: &'a [u8],
    offset: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], IdxError> {
        let available = self.bytes.len() - self.offset;
        if available < n {
            return Err(IdxError::Truncated {
                offset: self.offset,
                needed: n,
                available,
            });
        }
        let out = &self.bytes[self.offset..self.offset + n];
        self.offset += n;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32, IdxError> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn magic(&mut self, expected: u32) -> Result<(), IdxError> {
        let found = self.u32()?;
        if found != expected {
            return Err(IdxError::BadMagic { expected, found });
        }
        Ok(())
    }

    fn dimension(&mut self, expected: usize) -> Result<(), IdxError> {
        let offset = self.offset;
        let found = self.u32()?;
        if found as usize != expected {
            return Err(IdxError::BadDimension {
                offset,
                expected: expected as u32,
                found,
            });
        }
        Ok(())
    }

    fn finish(&self) -> Result<(), IdxError> {
        let trailing = self.bytes.len() - self.offset;
        if trailing > 0 {
            return Err(IdxError::TrailingBytes {
                offset: self.offset,
                trailing,
            });
        }
        Ok(())
    }
}

/// Decodes an IDX3 image file; pixels are scaled to [0, 1] by dividing by 255.
pub fn parse_images(bytes: &[u8]) -> Result<Vec<ImageGrid>, IdxError> {
    let mut cur = Cursor { bytes, offset: 0 };
    cur.magic(IMAGES_MAGIC)?;
    let count = cur.u32()? as usize;
    cur.dimension(IMAGE_HEIGHT)?;
    cur.dimension(IMAGE_WIDTH)?;
    let body = cur.take(count * IMAGE_WIDTH * IMAGE_HEIGHT)?;
    cur.finish()?;
    Ok(body
        .chunks_exact(IMAGE_WIDTH * IMAGE_HEIGHT)
        .map(|c| ImageGrid::from_bytes(c).expect("chunk has 784 bytes in [0, 255]"))
        .collect())
}

/// Decodes an IDX1 label file; every label must be a digit.
pub fn parse_labels(bytes: &[u8]) -> Result<Vec<usize>, IdxError> {
    let mut cur = Cursor { bytes, offset: 0 };
    cur.magic(LABELS_MAGIC)?;
    let count = cur.u32()? as usize;
    let start = cur.offset;
    let body = cur.take(count)?;
    cur.finish()?;
    body.iter()
        .enumerate()
        .map(|(i, &label)| {
            if (label as usize) < NUM_DIGITS {
                Ok(label as usize)
            } else {
                Err(IdxError::BadLabel {
                    offset: start + i,
                    label,
                })
            }
        })
        .collect()
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn with_path<T>(path: &Path, r: Result<T, IdxError>) -> Result<T> {
    r.map_err(|source| Error::Idx {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_mnist_images(path: impl AsRef<Path>) -> Result<Vec<ImageGrid>> {
    let path = path.as_ref();
    with_path(path, parse_images(&read(path)?))
}

pub fn load_mnist_labels(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    let path = path.as_ref();
    with_path(path, parse_labels(&read(path)?))
}

/// Zips images with labels; the counts must agree.
pub fn pair_samples(
    images: Vec<ImageGrid>,
    labels: &[usize],
) -> Result<Vec<LabeledSample>, IdxError> {
    if images.len() != labels.len() {
        return Err(IdxError::CountMismatch {
            images: images.len(),
            labels: labels.len(),
        });
    }
    Ok(images
        .into_iter()
        .zip(labels)
        .map(|(img, &label)| LabeledSample {
            features: img.into_pixels().try_into().expect("784 pixels"),
            label,
        })
        .collect())
}

/// Loads an image file and its label file as labelled samples.
pub fn load_mnist(
    images: impl AsRef<Path>,
    labels: impl AsRef<Path>,
) -> Result<Vec<LabeledSample>> {
    let imgs = load_mnist_images(&images)?;
    let labs = load_mnist_labels(&labels)?;
    with_path(labels.as_ref(), pair_samples(imgs, &labs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(magic: u32, dims: &[u32]) -> Vec<u8> {
        let mut out = magic.to_be_bytes().to_vec();
        for d in dims {
            out.extend_from_slice(&d.to_be_bytes());
        }
        out
    }

    #[test]
    fn magic_bytes_are_big_endian() {
        assert_eq!(IMAGES_MAGIC.to_be_bytes(), [0, 0, 8, 3]);
        assert_eq!(LABELS_MAGIC.to_be_bytes(), [0, 0, 8, 1]);
        assert_eq!(IMAGES_MAGIC, 2051);
        assert_eq!(LABELS_MAGIC, 2049);
    }

    #[test]
    fn parses_images() {
        let mut bytes = header(IMAGES_MAGIC, &[2, 28, 28]);
        bytes.extend((0..2 * 784).map(|i| (i % 256) as u8));
        let imgs = parse_images(&bytes).unwrap();
        assert_eq!(imgs.len(), 2);
        assert_eq!(imgs[0].pixels()[255], 1.0);
        assert_eq!(imgs[1].pixels()[0], (784 % 256) as f64 / 255.0);
    }

    #[test]
    fn rejects_wrong_magic() {
        let bytes = header(LABELS_MAGIC, &[0, 28, 28]);
        assert_eq!(
            parse_images(&bytes),
            Err(IdxError::BadMagic {
                expected: IMAGES_MAGIC,
                found: LABELS_MAGIC
            })
        );
        // Little-endian magic is a different number.
        let bytes = [1u8, 8, 0, 0, 0, 0, 0, 0];
        assert!(matches!(
            parse_labels(&bytes),
            Err(IdxError::BadMagic { .. })
        ));
    }

    #[test]
    fn rejects_wrong_dimensions() {
        let bytes = header(IMAGES_MAGIC, &[1, 28, 27]);
        assert_eq!(
            parse_images(&bytes),
            Err(IdxError::BadDimension {
                offset: 12,
                expected: 28,
                found: 27
            })
        );
    }

    #[test]
    fn rejects_truncation() {
        let mut bytes = header(IMAGES_MAGIC, &[2, 28, 28]);
        bytes.extend(vec![0u8; 784 + 100]);
        assert_eq!(
            parse_images(&bytes),
            Err(IdxError::Truncated {
                offset: 16,
                needed: 2 * 784,
                available: 884
            })
        );
        assert_eq!(
            parse_labels(&[0, 0, 8]),
            Err(IdxError::Truncated {
                offset: 0,
                needed: 4,
                available: 3
            })
        );
    }

    #[test]
    fn rejects_bad_labels_and_trailing_bytes() {
        let mut bytes = header(LABELS_MAGIC, &[3]);
        bytes.extend([1, 12, 3]);
        assert_eq!(
            parse_labels(&bytes),
            Err(IdxError::BadLabel {
                offset: 9,
                label: 12
            })
        );
        let mut bytes = header(LABELS_MAGIC, &[1]);
        bytes.extend([1, 2]);
        assert!(matches!(
            parse_labels(&bytes),
            Err(IdxError::TrailingBytes {
                offset: 9,
                trailing: 1
            })
        ));
    }

    #[test]
    fn pairing_requires_equal_counts() {
        let imgs = vec![ImageGrid::zeros(); 3];
        assert_eq!(
            pair_samples(imgs, &[1, 2]),
            Err(IdxError::CountMismatch {
                images: 3,
                labels: 2
            })
        );
    }
}

//! Binary PPM (P6) rendering of classification maps.

use std::io::Write;
use std::path::Path;

use anyhow::{ensure, Context};
use ffp::train::ClassMap;

/// One color per class; class 0 is blue and class 1 red, as in the usual
/// two-class plots.
pub const PALETTE: [[u8; 3]; 16] = [
    [31, 119, 180],
    [214, 39, 40],
    [44, 160, 44],
    [255, 127, 14],
    [148, 103, 189],
    [140, 86, 75],
    [227, 119, 194],
    [127, 127, 127],
    [188, 189, 34],
    [23, 190, 207],
    [0, 0, 0],
    [255, 255, 255],
    [255, 215, 0],
    [0, 128, 128],
    [128, 0, 0],
    [0, 0, 128],
];

/// Encodes `map` as a P6 image, row 0 at the top.
pub fn encode_ppm(map: &ClassMap) -> anyhow::Result<Vec<u8>> {
    let mut out = format!("P6 {} {} 255\n", map.width, map.height).into_bytes();
    out.reserve(map.labels.len() * 3);
    for &label in &map.labels {
        ensure!(
            label < PALETTE.len(),
            "class {label} has no palette color (at most {} classes)",
            PALETTE.len()
        );
        out.extend_from_slice(&PALETTE[label]);
    }
    Ok(out)
}

pub fn write_map_image(map: &ClassMap, path: &Path) -> anyhow::Result<()> {
    let bytes = encode_ppm(map)?;
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(&bytes))
        .with_context(|| format!("writing {}", path.display()))
}

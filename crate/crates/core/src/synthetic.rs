//! Deterministic synthetic test images standing in for real modality scans.

use crate::image::ImageBuffer;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform value in `[0, 1)` keyed by `(seed, row, col)`.
fn noise(seed: u64, r: usize, c: usize) -> f64 {
    let h = splitmix64(seed ^ splitmix64(((r as u64) << 32) | c as u64));
    (h >> 11) as f64 / (1u64 << 53) as f64
}

/// Smooth oscillating pattern plus per-pixel noise, spanning most of
/// `[0, 255]`.
pub fn textured(width: usize, height: usize, seed: u64) -> ImageBuffer {
    let phase = (seed % 97) as f64 * 0.37;
    ImageBuffer::from_fn(width, height, |r, c| {
        let (y, x) = (r as f64, c as f64);
        let smooth = 70.0 * (0.21 * x + phase).sin() * (0.17 * y - phase).cos()
            + 30.0 * (0.05 * (x + 2.0 * y) + 0.5 * phase).sin();
        (127.5 + smooth + 50.0 * (noise(seed, r, c) - 0.5)).clamp(0.0, 255.0)
    })
    .expect("dimensions and range are valid")
}

/// Dim, nearly flat image: a faint blob over a dark background.
pub fn low_contrast(width: usize, height: usize, seed: u64) -> ImageBuffer {
    let (cx, cy) = (width as f64 / 2.0, height as f64 / 2.0);
    let radius = width.min(height) as f64 / 3.0;
    ImageBuffer::from_fn(width, height, |r, c| {
        let d = ((r as f64 - cy).powi(2) + (c as f64 - cx).powi(2)).sqrt() / radius;
        40.0 + 12.0 * (-d * d).exp() + 4.0 * noise(seed, r, c)
    })
    .expect("dimensions and range are valid")
}

/// Bright, high-contrast structure: hard-edged rings and bars.
pub fn high_contrast(width: usize, height: usize, seed: u64) -> ImageBuffer {
    let (cx, cy) = (width as f64 / 2.0, height as f64 / 2.0);
    ImageBuffer::from_fn(width, height, |r, c| {
        let d = ((r as f64 - cy).powi(2) + (c as f64 - cx).powi(2)).sqrt();
        let ring = ((d / 6.0).floor() as i64) % 2 == 0;
        let bar = (c / 8) % 3 == 0;
        let base = if ring ^ bar { 235.0 } else { 15.0 };
        base + 10.0 * (noise(seed, r, c) - 0.5)
    })
    .expect("dimensions and range are valid")
}

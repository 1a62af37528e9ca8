//! Planar real-valued raster used throughout the pipeline.

use crate::error::{Error, Result};

/// Smallest width or height that still admits a two-level decomposition.
pub const MIN_DIM: usize = 4;

/// Largest representable 8-bit intensity.
pub const MAX_INTENSITY: f64 = 255.0;

/// A 2D raster with one or three channels of real-valued samples.
///
/// Samples are stored plane by plane, each plane in row-major order. Images
/// built with [`ImageBuffer::new`] hold intensities in `[0, 255]`; transform
/// reconstructions built with [`ImageBuffer::unclamped`] may leave that range
/// until [`ImageBuffer::clamped`] is applied.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    channels: usize,
    samples: Vec<f64>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, channels: usize, samples: Vec<f64>) -> Result<Self> {
        let img = Self::unclamped(width, height, channels, samples)?;
        if let Some(s) = img
            .samples
            .iter()
            .find(|s| !(0.0..=MAX_INTENSITY).contains(*s))
        {
            return Err(Error::InvalidImage(format!(
                "sample {s} outside [0, {MAX_INTENSITY}]"
            )));
        }
        Ok(img)
    }

    /// Builds a buffer without the intensity range check. Samples must still
    /// be finite.
    pub fn unclamped(
        width: usize,
        height: usize,
        channels: usize,
        samples: Vec<f64>,
    ) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidImage(format!(
                "channel count must be 1 or 3, got {channels}"
            )));
        }
        if width < MIN_DIM || height < MIN_DIM {
            return Err(Error::ImageTooSmall {
                width,
                height,
                min: MIN_DIM,
            });
        }
        if samples.len() != width * height * channels {
            return Err(Error::InvalidImage(format!(
                "expected {} samples for {width}x{height}x{channels}, got {}",
                width * height * channels,
                samples.len()
            )));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidImage("non-finite sample".into()));
        }
        Ok(Self {
            width,
            height,
            channels,
            samples,
        })
    }

    pub fn gray(width: usize, height: usize, samples: Vec<f64>) -> Result<Self> {
        Self::new(width, height, 1, samples)
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: f64) -> Result<Self> {
        Self::new(width, height, channels, vec![value; width * height * channels])
    }

    /// Builds a single-channel image by evaluating `f(row, col)`.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut samples = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                samples.push(f(r, c));
            }
        }
        Self::new(width, height, 1, samples)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn plane_len(&self) -> usize {
        self.width * self.height
    }

    pub fn plane(&self, channel: usize) -> &[f64] {
        let n = self.plane_len();
        &self.samples[channel * n..(channel + 1) * n]
    }

    pub fn get(&self, channel: usize, row: usize, col: usize) -> f64 {
        self.samples[channel * self.plane_len() + row * self.width + col]
    }

    /// `(width, height, channels)`.
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.width, self.height, self.channels)
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.shape() == other.shape()
    }

    pub fn is_in_range(&self) -> bool {
        self.samples.iter().all(|s| (0.0..=MAX_INTENSITY).contains(s))
    }

    pub fn clamped(mut self) -> Self {
        for s in &mut self.samples {
            *s = s.clamp(0.0, MAX_INTENSITY);
        }
        self
    }

    /// Applies `f` to every sample. The result is not range checked.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::unclamped(
            self.width,
            self.height,
            self.channels,
            self.samples.iter().map(|&s| f(s)).collect(),
        )
    }

    /// Circularly shifts every plane by `(dy, dx)` pixels.
    pub fn circular_shift(&self, dy: isize, dx: isize) -> Self {
        let (w, h) = (self.width as isize, self.height as isize);
        let n = self.plane_len();
        let mut out = vec![0.0; self.samples.len()];
        for ch in 0..self.channels {
            for r in 0..h {
                for c in 0..w {
                    let nr = (r + dy).rem_euclid(h) as usize;
                    let nc = (c + dx).rem_euclid(w) as usize;
                    out[ch * n + nr * self.width + nc] =
                        self.samples[ch * n + r as usize * self.width + c as usize];
                }
            }
        }
        Self {
            samples: out,
            ..self.clone()
        }
    }

    /// Swaps rows and columns of every plane.
    pub fn transposed(&self) -> Self {
        let n = self.plane_len();
        let mut out = vec![0.0; self.samples.len()];
        for ch in 0..self.channels {
            for r in 0..self.height {
                for c in 0..self.width {
                    out[ch * n + c * self.height + r] = self.samples[ch * n + r * self.width + c];
                }
            }
        }
        Self {
            width: self.height,
            height: self.width,
            channels: self.channels,
            samples: out,
        }
    }

    pub(crate) fn require_gray(&self) -> Result<()> {
        if self.channels != 1 {
            return Err(Error::NotGrayscale(self.channels));
        }
        Ok(())
    }
}

/// Quantizes a sample to an 8-bit level: clamp to `[0, 255]`, then round
/// half away from zero.
pub fn quantize(s: f64) -> u8 {
    s.clamp(0.0, MAX_INTENSITY).round() as u8
}

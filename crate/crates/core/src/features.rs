//! Subband statistics feeding the weight optimizer.

use crate::error::{Error, Result};
use crate::wavelet::{BandKind, Decomposition, Subband};

pub const STATS_PER_BAND: usize = 10;
pub const FEATURE_BANDS: [BandKind; 4] = [BandKind::LL, BandKind::LH, BandKind::HL, BandKind::HH];
pub const FEATURE_LEN: usize = STATS_PER_BAND * FEATURE_BANDS.len();

/// 40 statistics: `[median, stddev, variance, hu1..hu7]` for each of the
/// level-2 bands LL, LH, HL, HH, in that order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector([f64; FEATURE_LEN]);

impl FeatureVector {
    pub fn new(values: [f64; FEATURE_LEN]) -> Self {
        Self(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// The 10 statistics of band block `i` (0 = LL2 .. 3 = HH2).
    pub fn block(&self, i: usize) -> &[f64] {
        &self.0[i * STATS_PER_BAND..(i + 1) * STATS_PER_BAND]
    }
}

impl TryFrom<&[f64]> for FeatureVector {
    type Error = Error;

    fn try_from(v: &[f64]) -> Result<Self> {
        let arr: [f64; FEATURE_LEN] = v
            .try_into()
            .map_err(|_| Error::LengthMismatch(v.len(), FEATURE_LEN))?;
        Ok(Self(arr))
    }
}

/// Median (mean of the middle pair for even counts), population standard
/// deviation, variance, and the seven Hu invariants of a band.
pub fn band_statistics(band: &Subband) -> Result<[f64; STATS_PER_BAND]> {
    let c = &band.coeffs;
    if c.is_empty() {
        return Err(Error::EmptyBand);
    }
    let n = c.len() as f64;
    let mean = c.iter().sum::<f64>() / n;
    let variance = c.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let stddev = variance.sqrt();

    let mut out = [0.0; STATS_PER_BAND];
    out[0] = median(c);
    out[1] = stddev;
    out[2] = stddev * stddev;
    out[3..].copy_from_slice(&hu_moments(band));
    Ok(out)
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Hu's seven invariants of the band treated as a density over
/// `(x = column, y = row)`, after shifting by the band minimum. A band with
/// zero mass after the shift yields all zeros.
pub fn hu_moments(band: &Subband) -> [f64; 7] {
    let min = band.coeffs.iter().copied().fold(f64::INFINITY, f64::min);
    let density = |r: usize, c: usize| band.get(r, c) - min;

    let (mut m00, mut m10, mut m01) = (0.0, 0.0, 0.0);
    for r in 0..band.height {
        for c in 0..band.width {
            let v = density(r, c);
            m00 += v;
            m10 += c as f64 * v;
            m01 += r as f64 * v;
        }
    }
    if m00 <= 0.0 {
        return [0.0; 7];
    }
    let (xc, yc) = (m10 / m00, m01 / m00);

    // central moments mu[p][q] for p + q <= 3
    let mut mu = [[0.0f64; 4]; 4];
    for r in 0..band.height {
        let dy = r as f64 - yc;
        for c in 0..band.width {
            let dx = c as f64 - xc;
            let v = density(r, c);
            let mut xp = 1.0;
            for (p, row) in mu.iter_mut().enumerate() {
                let mut yq = 1.0;
                for cell in &mut row[..4 - p] {
                    *cell += xp * yq * v;
                    yq *= dy;
                }
                xp *= dx;
            }
        }
    }
    let eta = |p: usize, q: usize| mu[p][q] / m00.powf(1.0 + (p + q) as f64 / 2.0);
    let (n20, n02, n11) = (eta(2, 0), eta(0, 2), eta(1, 1));
    let (n30, n03, n21, n12) = (eta(3, 0), eta(0, 3), eta(2, 1), eta(1, 2));

    let a = n30 + n12;
    let b = n21 + n03;
    let hu1 = n20 + n02;
    let hu2 = (n20 - n02).powi(2) + 4.0 * n11 * n11;
    let hu3 = (n30 - 3.0 * n12).powi(2) + (3.0 * n21 - n03).powi(2);
    let hu4 = a * a + b * b;
    let hu5 = (n30 - 3.0 * n12) * a * (a * a - 3.0 * b * b)
        + (3.0 * n21 - n03) * b * (3.0 * a * a - b * b);
    let hu6 = (n20 - n02) * (a * a - b * b) + 4.0 * n11 * a * b;
    let hu7 = (3.0 * n21 - n03) * a * (a * a - 3.0 * b * b)
        - (n30 - 3.0 * n12) * b * (3.0 * a * a - b * b);
    [hu1, hu2, hu3, hu4, hu5, hu6, hu7]
}

/// Concatenates [`band_statistics`] over the four level-2 bands.
pub fn extract_features(d: &Decomposition) -> Result<FeatureVector> {
    let mut values = [0.0; FEATURE_LEN];
    for (i, kind) in FEATURE_BANDS.iter().enumerate() {
        let band = d
            .band(*kind, 2)
            .ok_or_else(|| Error::ShapeMismatch(format!("missing {kind:?}2 band")))?;
        values[i * STATS_PER_BAND..(i + 1) * STATS_PER_BAND]
            .copy_from_slice(&band_statistics(band)?);
    }
    Ok(FeatureVector(values))
}

//! Two-level Haar (db1) transforms: decimated (DWT) and undecimated à trous
//! (UDWT).
//!
//! Bands are named by the filter applied along rows first and along columns
//! second: `HL` is high-pass across columns (responds to vertical edges),
//! `LH` is high-pass across rows.
//!
//! The DWT uses half-sample symmetric extension, so odd sizes produce
//! ceil-sized subbands and the inverse crops back to the source size. The
//! UDWT uses periodic extension and keeps every band at full size.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::ImageBuffer;

pub const LEVELS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Decimated,
    Undecimated,
}

impl TransformKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Decimated => "decimated",
            Self::Undecimated => "undecimated",
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BandKind {
    LL,
    LH,
    HL,
    HH,
}

impl BandKind {
    pub fn is_detail(self) -> bool {
        self != BandKind::LL
    }
}

/// One coefficient matrix of a decomposition, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Subband {
    pub kind: BandKind,
    pub level: usize,
    pub width: usize,
    pub height: usize,
    pub coeffs: Vec<f64>,
}

impl Subband {
    pub fn new(
        kind: BandKind,
        level: usize,
        width: usize,
        height: usize,
        coeffs: Vec<f64>,
    ) -> Result<Self> {
        if coeffs.len() != width * height {
            return Err(Error::ShapeMismatch(format!(
                "band {kind:?}{level}: {} coefficients for {width}x{height}",
                coeffs.len()
            )));
        }
        Ok(Self {
            kind,
            level,
            width,
            height,
            coeffs,
        })
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.coeffs[row * self.width + col]
    }

    pub fn transposed(&self) -> Self {
        let mut out = vec![0.0; self.coeffs.len()];
        for r in 0..self.height {
            for c in 0..self.width {
                out[c * self.height + r] = self.coeffs[r * self.width + c];
            }
        }
        Self {
            width: self.height,
            height: self.width,
            coeffs: out,
            ..self.clone()
        }
    }

    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }
}

/// Order of the seven bands inside a [`Decomposition`].
pub const BAND_ORDER: [(BandKind, usize); 7] = [
    (BandKind::LL, 2),
    (BandKind::LH, 2),
    (BandKind::HL, 2),
    (BandKind::HH, 2),
    (BandKind::LH, 1),
    (BandKind::HL, 1),
    (BandKind::HH, 1),
];

/// A two-level decomposition: LL2, LH2, HL2, HH2, LH1, HL1, HH1.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    transform: TransformKind,
    source_width: usize,
    source_height: usize,
    bands: Vec<Subband>,
}

impl Decomposition {
    /// Assembles a decomposition, checking band order and dimensions against
    /// the transform kind.
    pub fn new(
        transform: TransformKind,
        source_width: usize,
        source_height: usize,
        bands: Vec<Subband>,
    ) -> Result<Self> {
        if bands.len() != BAND_ORDER.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected 7 bands, got {}",
                bands.len()
            )));
        }
        for (band, &(kind, level)) in bands.iter().zip(&BAND_ORDER) {
            if band.kind != kind || band.level != level {
                return Err(Error::ShapeMismatch(format!(
                    "band order: expected {kind:?}{level}, got {:?}{}",
                    band.kind, band.level
                )));
            }
            let (w, h) = band_dims(transform, source_width, source_height, level);
            if band.width != w || band.height != h {
                return Err(Error::ShapeMismatch(format!(
                    "band {kind:?}{level}: {}x{} but {transform} transform of \
                     {source_width}x{source_height} needs {w}x{h}",
                    band.width, band.height
                )));
            }
        }
        Ok(Self {
            transform,
            source_width,
            source_height,
            bands,
        })
    }

    pub fn transform(&self) -> TransformKind {
        self.transform
    }

    pub fn source_width(&self) -> usize {
        self.source_width
    }

    pub fn source_height(&self) -> usize {
        self.source_height
    }

    pub fn bands(&self) -> &[Subband] {
        &self.bands
    }

    pub fn band(&self, kind: BandKind, level: usize) -> Option<&Subband> {
        self.bands
            .iter()
            .find(|b| b.kind == kind && b.level == level)
    }

    pub fn energy(&self) -> f64 {
        self.bands.iter().map(Subband::energy).sum()
    }

    /// Combines two decompositions of identical layout coefficient-wise;
    /// `f` receives the band being combined and the pair of coefficients.
    pub(crate) fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&Subband, f64, f64) -> f64,
    ) -> Result<Self> {
        if self.transform != other.transform {
            return Err(Error::TransformMismatch);
        }
        if (self.source_width, self.source_height) != (other.source_width, other.source_height) {
            return Err(Error::ShapeMismatch(format!(
                "decompositions of {}x{} and {}x{}",
                self.source_width, self.source_height, other.source_width, other.source_height
            )));
        }
        let bands = self
            .bands
            .iter()
            .zip(&other.bands)
            .map(|(a, b)| Subband {
                coeffs: a
                    .coeffs
                    .iter()
                    .zip(&b.coeffs)
                    .map(|(&x, &y)| f(a, x, y))
                    .collect(),
                ..a.clone()
            })
            .collect();
        Ok(Self {
            bands,
            ..self.clone()
        })
    }
}

/// Subband `(width, height)` at `level` for a source of the given size.
pub fn band_dims(
    transform: TransformKind,
    width: usize,
    height: usize,
    level: usize,
) -> (usize, usize) {
    match transform {
        TransformKind::Undecimated => (width, height),
        TransformKind::Decimated => {
            let (mut w, mut h) = (width, height);
            for _ in 0..level {
                w = w.div_ceil(2);
                h = h.div_ceil(2);
            }
            (w, h)
        }
    }
}

/// Row-major plane used internally between filter stages.
#[derive(Clone)]
struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.width..(r + 1) * self.width]
    }

    fn column(&self, c: usize) -> Vec<f64> {
        (0..self.height)
            .map(|r| self.data[r * self.width + c])
            .collect()
    }

    fn into_band(self, kind: BandKind, level: usize) -> Subband {
        Subband {
            kind,
            level,
            width: self.width,
            height: self.height,
            coeffs: self.data,
        }
    }

    fn from_band(b: &Subband) -> Self {
        Self {
            width: b.width,
            height: b.height,
            data: b.coeffs.clone(),
        }
    }
}

/// One-dimensional analysis/synthesis pair for a filter bank.
trait FilterBank1d {
    /// Length of each output band for an input of length `n`.
    fn band_len(&self, n: usize) -> usize;
    fn analyze(&self, x: &[f64], lo: &mut [f64], hi: &mut [f64]);
    /// Reconstructs `out.len()` samples from the two bands.
    fn synthesize(&self, lo: &[f64], hi: &[f64], out: &mut [f64]);
}

/// Decimated Haar with half-sample symmetric extension of odd lengths.
struct DecimatedHaar;

impl FilterBank1d for DecimatedHaar {
    fn band_len(&self, n: usize) -> usize {
        n.div_ceil(2)
    }

    fn analyze(&self, x: &[f64], lo: &mut [f64], hi: &mut [f64]) {
        let n = x.len();
        for k in 0..lo.len() {
            let a = x[2 * k];
            // mirror the last sample when the length is odd
            let b = if 2 * k + 1 < n { x[2 * k + 1] } else { x[n - 1] };
            lo[k] = (a + b) * FRAC_1_SQRT_2;
            hi[k] = (a - b) * FRAC_1_SQRT_2;
        }
    }

    fn synthesize(&self, lo: &[f64], hi: &[f64], out: &mut [f64]) {
        let n = out.len();
        for k in 0..lo.len() {
            out[2 * k] = (lo[k] + hi[k]) * FRAC_1_SQRT_2;
            if 2 * k + 1 < n {
                out[2 * k + 1] = (lo[k] - hi[k]) * FRAC_1_SQRT_2;
            }
        }
    }
}

/// À trous Haar: taps `step` samples apart, periodic extension, no
/// downsampling. Synthesis averages the two redundant branches.
struct AtrousHaar {
    step: usize,
}

impl FilterBank1d for AtrousHaar {
    fn band_len(&self, n: usize) -> usize {
        n
    }

    fn analyze(&self, x: &[f64], lo: &mut [f64], hi: &mut [f64]) {
        let n = x.len();
        for i in 0..n {
            let a = x[i];
            let b = x[(i + self.step) % n];
            lo[i] = (a + b) * FRAC_1_SQRT_2;
            hi[i] = (a - b) * FRAC_1_SQRT_2;
        }
    }

    fn synthesize(&self, lo: &[f64], hi: &[f64], out: &mut [f64]) {
        let n = out.len();
        for i in 0..n {
            let j = (i + n - self.step % n) % n;
            let direct = (lo[i] + hi[i]) * FRAC_1_SQRT_2;
            let shifted = (lo[j] - hi[j]) * FRAC_1_SQRT_2;
            out[i] = 0.5 * (direct + shifted);
        }
    }
}

/// Separable one-level 2D analysis: rows first, then columns.
/// Returns `[LL, LH, HL, HH]`.
fn analyze_2d(bank: &impl FilterBank1d, x: &Plane) -> [Plane; 4] {
    let bw = bank.band_len(x.width);
    let bh = bank.band_len(x.height);

    let mut row_lo = Plane {
        width: bw,
        height: x.height,
        data: vec![0.0; bw * x.height],
    };
    let mut row_hi = row_lo.clone();
    for r in 0..x.height {
        let (lo, hi) = (
            &mut row_lo.data[r * bw..(r + 1) * bw],
            &mut row_hi.data[r * bw..(r + 1) * bw],
        );
        bank.analyze(x.row(r), lo, hi);
    }

    let columns = |p: &Plane| {
        let mut lo = Plane {
            width: bw,
            height: bh,
            data: vec![0.0; bw * bh],
        };
        let mut hi = lo.clone();
        let (mut clo, mut chi) = (vec![0.0; bh], vec![0.0; bh]);
        for c in 0..bw {
            bank.analyze(&p.column(c), &mut clo, &mut chi);
            for r in 0..bh {
                lo.data[r * bw + c] = clo[r];
                hi.data[r * bw + c] = chi[r];
            }
        }
        (lo, hi)
    };
    let (ll, lh) = columns(&row_lo);
    let (hl, hh) = columns(&row_hi);
    [ll, lh, hl, hh]
}

/// Inverse of [`analyze_2d`], producing a `width` x `height` plane.
fn synthesize_2d(
    bank: &impl FilterBank1d,
    [ll, lh, hl, hh]: [&Plane; 4],
    width: usize,
    height: usize,
) -> Plane {
    let bw = ll.width;
    let columns = |lo: &Plane, hi: &Plane| {
        let mut out = Plane {
            width: bw,
            height,
            data: vec![0.0; bw * height],
        };
        let mut col = vec![0.0; height];
        for c in 0..bw {
            bank.synthesize(&lo.column(c), &hi.column(c), &mut col);
            for (r, v) in col.iter().enumerate() {
                out.data[r * bw + c] = *v;
            }
        }
        out
    };
    let row_lo = columns(ll, lh);
    let row_hi = columns(hl, hh);

    let mut out = Plane {
        width,
        height,
        data: vec![0.0; width * height],
    };
    for r in 0..height {
        bank.synthesize(
            row_lo.row(r),
            row_hi.row(r),
            &mut out.data[r * width..(r + 1) * width],
        );
    }
    out
}

fn forward(img: &ImageBuffer, transform: TransformKind) -> Result<Decomposition> {
    img.require_gray()?;
    let (w, h) = (img.width(), img.height());
    let level0 = Plane {
        width: w,
        height: h,
        data: img.samples().to_vec(),
    };
    let (l1, l2) = match transform {
        TransformKind::Decimated => {
            let l1 = analyze_2d(&DecimatedHaar, &level0);
            let l2 = analyze_2d(&DecimatedHaar, &l1[0]);
            (l1, l2)
        }
        TransformKind::Undecimated => {
            let l1 = analyze_2d(&AtrousHaar { step: 1 }, &level0);
            let l2 = analyze_2d(&AtrousHaar { step: 2 }, &l1[0]);
            (l1, l2)
        }
    };
    let [ll2, lh2, hl2, hh2] = l2;
    let [_, lh1, hl1, hh1] = l1;
    Decomposition::new(
        transform,
        w,
        h,
        vec![
            ll2.into_band(BandKind::LL, 2),
            lh2.into_band(BandKind::LH, 2),
            hl2.into_band(BandKind::HL, 2),
            hh2.into_band(BandKind::HH, 2),
            lh1.into_band(BandKind::LH, 1),
            hl1.into_band(BandKind::HL, 1),
            hh1.into_band(BandKind::HH, 1),
        ],
    )
}

fn inverse(d: &Decomposition, expected: TransformKind) -> Result<ImageBuffer> {
    if d.transform != expected {
        return Err(Error::WrongTransformKind {
            expected: expected.name(),
            actual: d.transform.name(),
        });
    }
    let p: Vec<Plane> = d.bands.iter().map(Plane::from_band).collect();
    let (w, h) = (d.source_width, d.source_height);
    let (w1, h1) = band_dims(d.transform, w, h, 1);
    let out = match d.transform {
        TransformKind::Decimated => {
            let ll1 = synthesize_2d(&DecimatedHaar, [&p[0], &p[1], &p[2], &p[3]], w1, h1);
            synthesize_2d(&DecimatedHaar, [&ll1, &p[4], &p[5], &p[6]], w, h)
        }
        TransformKind::Undecimated => {
            let ll1 = synthesize_2d(
                &AtrousHaar { step: 2 },
                [&p[0], &p[1], &p[2], &p[3]],
                w1,
                h1,
            );
            synthesize_2d(&AtrousHaar { step: 1 }, [&ll1, &p[4], &p[5], &p[6]], w, h)
        }
    };
    ImageBuffer::unclamped(w, h, 1, out.data)
}

/// Two-level decimated Haar decomposition of a single-channel image.
pub fn dwt_forward(img: &ImageBuffer) -> Result<Decomposition> {
    forward(img, TransformKind::Decimated)
}

/// Reconstructs the image from a decimated decomposition. The output is not
/// clamped.
pub fn dwt_inverse(d: &Decomposition) -> Result<ImageBuffer> {
    inverse(d, TransformKind::Decimated)
}

/// Two-level undecimated (à trous) Haar decomposition; every band keeps the
/// source size.
pub fn udwt_forward(img: &ImageBuffer) -> Result<Decomposition> {
    forward(img, TransformKind::Undecimated)
}

pub fn udwt_inverse(d: &Decomposition) -> Result<ImageBuffer> {
    inverse(d, TransformKind::Undecimated)
}

pub fn forward_transform(img: &ImageBuffer, transform: TransformKind) -> Result<Decomposition> {
    forward(img, transform)
}

pub fn inverse_transform(d: &Decomposition) -> Result<ImageBuffer> {
    inverse(d, d.transform)
}

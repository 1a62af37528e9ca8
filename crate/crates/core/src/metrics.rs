//! Objective fusion-quality metrics for a `(V, T, F)` triple: two sources
//! and the fused image.
//!
//! Entropy and mutual information histogram 8-bit levels obtained with
//! [`quantize`]; the remaining metrics use the samples as given.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::image::{quantize, ImageBuffer, MAX_INTENSITY};
use crate::imgio::split_channels;

pub const LEVELS: usize = 256;

/// Marginal (256 bins) or joint (256 x 256 bins) intensity counts.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    counts: Vec<u64>,
    total: u64,
}

impl Histogram {
    pub fn marginal(img: &[f64]) -> Self {
        let mut counts = vec![0u64; LEVELS];
        for &s in img {
            counts[quantize(s) as usize] += 1;
        }
        Self {
            counts,
            total: img.len() as u64,
        }
    }

    /// Joint counts indexed `[level_x * 256 + level_y]`.
    pub fn joint(x: &[f64], y: &[f64]) -> Self {
        let mut counts = vec![0u64; LEVELS * LEVELS];
        for (&a, &b) in x.iter().zip(y) {
            counts[quantize(a) as usize * LEVELS + quantize(b) as usize] += 1;
        }
        Self {
            counts,
            total: x.len().min(y.len()) as u64,
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn probabilities(&self) -> Vec<f64> {
        if self.total == 0 {
            return vec![0.0; self.counts.len()];
        }
        let n = self.total as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }
}

fn require_gray(imgs: &[&ImageBuffer]) -> Result<()> {
    for img in imgs {
        if img.channels() != 1 {
            return Err(Error::NotGrayscale(img.channels()));
        }
    }
    Ok(())
}

fn require_same_shape(v: &ImageBuffer, t: &ImageBuffer, f: &ImageBuffer) -> Result<()> {
    require_gray(&[v, t, f])?;
    if !(v.same_shape(f) && t.same_shape(f)) {
        return Err(Error::ShapeMismatch(format!(
            "metric triple {:?}, {:?}, {:?}",
            v.shape(),
            t.shape(),
            f.shape()
        )));
    }
    Ok(())
}

/// Shannon entropy of the 256-level histogram, in bits.
pub fn entropy(img: &ImageBuffer) -> Result<f64> {
    require_gray(&[img])?;
    Ok(entropy_of(img.samples()))
}

fn entropy_of(samples: &[f64]) -> f64 {
    let h = Histogram::marginal(samples);
    let n = h.total() as f64;
    -h.counts()
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * p.log2()
        })
        .sum::<f64>()
}

/// Mutual information in bits between two equally sized sample sets.
fn pairwise_mi(x: &[f64], y: &[f64]) -> f64 {
    let joint = Histogram::joint(x, y);
    let hx = Histogram::marginal(x);
    let hy = Histogram::marginal(y);
    let n = joint.total() as f64;
    let mut mi = 0.0;
    for (idx, &c) in joint.counts().iter().enumerate() {
        if c == 0 {
            continue;
        }
        let cx = hx.counts()[idx / LEVELS] as f64;
        let cy = hy.counts()[idx % LEVELS] as f64;
        let c = c as f64;
        mi += c / n * (c * n / (cx * cy)).log2();
    }
    mi.max(0.0)
}

/// `I(F; V) + I(F; T)`.
pub fn mutual_information(v: &ImageBuffer, t: &ImageBuffer, f: &ImageBuffer) -> Result<f64> {
    require_same_shape(v, t, f)?;
    Ok(mi_of(v.samples(), t.samples(), f.samples()))
}

fn mi_of(v: &[f64], t: &[f64], f: &[f64]) -> f64 {
    pairwise_mi(f, v) + pairwise_mi(f, t)
}

fn mean_sq_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
}

/// Mean of the two root-mean-square errors of `f` against each source.
pub fn rmse(v: &ImageBuffer, t: &ImageBuffer, f: &ImageBuffer) -> Result<f64> {
    require_same_shape(v, t, f)?;
    Ok(rmse_of(v.samples(), t.samples(), f.samples()))
}

fn rmse_of(v: &[f64], t: &[f64], f: &[f64]) -> f64 {
    0.5 * (mean_sq_diff(f, v).sqrt() + mean_sq_diff(f, t).sqrt())
}

/// `10 log10(255^2 / MSE)` with `MSE` the mean of both sources' MSE;
/// `f64::INFINITY` when the error is zero.
pub fn psnr(v: &ImageBuffer, t: &ImageBuffer, f: &ImageBuffer) -> Result<f64> {
    require_same_shape(v, t, f)?;
    Ok(psnr_of(v.samples(), t.samples(), f.samples()))
}

fn psnr_of(v: &[f64], t: &[f64], f: &[f64]) -> f64 {
    let mse = 0.5 * (mean_sq_diff(f, v) + mean_sq_diff(f, t));
    psnr_from_mse(mse)
}

pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (MAX_INTENSITY * MAX_INTENSITY / mse).log10()
    }
}

/// Global Wang–Bovik index of `x` against `y`, with `N - 1` sample
/// statistics: correlation x luminance x contrast.
pub fn wang_bovik_index(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::ShapeMismatch(format!("{} vs {} samples", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::DegenerateInput("need at least 2 samples".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    let (vx, vy, cxy) = (sxx / (n - 1.0), syy / (n - 1.0), sxy / (n - 1.0));
    if vx == 0.0 || vy == 0.0 {
        return Err(Error::DegenerateInput(
            "zero variance in quality index argument".into(),
        ));
    }
    if mx * mx + my * my == 0.0 {
        return Err(Error::DegenerateInput("zero mean in quality index arguments".into()));
    }
    let (sx, sy) = (vx.sqrt(), vy.sqrt());
    let correlation = cxy / (sx * sy);
    let luminance = 2.0 * mx * my / (mx * mx + my * my);
    let contrast = 2.0 * sx * sy / (vx + vy);
    Ok(correlation * luminance * contrast)
}

/// Mean of `Q(V, F)` and `Q(T, F)`.
pub fn quality_index(v: &ImageBuffer, t: &ImageBuffer, f: &ImageBuffer) -> Result<f64> {
    require_same_shape(v, t, f)?;
    qi_of(v.samples(), t.samples(), f.samples())
}

fn qi_of(v: &[f64], t: &[f64], f: &[f64]) -> Result<f64> {
    Ok(0.5 * (wang_bovik_index(v, f)? + wang_bovik_index(t, f)?))
}

/// Row and column activity `(RF, CF)`. Both sums are divided by `M * N`.
pub fn row_column_frequency(f: &ImageBuffer) -> Result<(f64, f64)> {
    require_gray(&[f])?;
    rc_of(f.samples(), f.width(), f.height())
}

fn rc_of(s: &[f64], w: usize, h: usize) -> Result<(f64, f64)> {
    if w < 2 || h < 2 {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            min: 2,
        });
    }
    let mn = (w * h) as f64;
    let (mut row, mut col) = (0.0, 0.0);
    for r in 0..h {
        for c in 0..w {
            let v = s[r * w + c];
            if c > 0 {
                let d = v - s[r * w + c - 1];
                row += d * d;
            }
            if r > 0 {
                let d = v - s[(r - 1) * w + c];
                col += d * d;
            }
        }
    }
    Ok(((row / mn).sqrt(), (col / mn).sqrt()))
}

pub fn spatial_frequency(f: &ImageBuffer) -> Result<f64> {
    let (rf, cf) = row_column_frequency(f)?;
    Ok(rf.hypot(cf))
}

/// The six metrics for one `(V, T, F)` triple.
///
/// `psnr` is `f64::INFINITY` for a perfect match; `qi` is `None` when a
/// quality-index argument has zero variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub ie: f64,
    pub mi: f64,
    pub rmse: f64,
    pub psnr: f64,
    pub qi: Option<f64>,
    pub sf: f64,
}

pub const CSV_HEADER: &str = "ie,mi,rmse,psnr,qi,sf";
pub const QI_DEGENERATE: &str = "degenerate";

/// A metric value as written to JSON: a number, or a marker string for
/// `inf` / degenerate cases.
enum Cell {
    Num(f64),
    Text(&'static str),
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Num(v) => s.serialize_f64(*v),
            Cell::Text(t) => s.serialize_str(t),
        }
    }
}

fn psnr_cell(v: f64) -> Cell {
    if v == f64::INFINITY {
        Cell::Text("inf")
    } else {
        Cell::Num(v)
    }
}

fn qi_cell(v: Option<f64>) -> Cell {
    v.map_or(Cell::Text(QI_DEGENERATE), Cell::Num)
}

impl Serialize for MetricReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("MetricReport", 6)?;
        st.serialize_field("ie", &self.ie)?;
        st.serialize_field("mi", &self.mi)?;
        st.serialize_field("rmse", &self.rmse)?;
        st.serialize_field("psnr", &psnr_cell(self.psnr))?;
        st.serialize_field("qi", &qi_cell(self.qi))?;
        st.serialize_field("sf", &self.sf)?;
        st.end()
    }
}

impl MetricReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// One CSV data row matching [`CSV_HEADER`].
    pub fn to_csv_row(&self) -> String {
        let num = |v: f64| format!("{v}");
        let psnr = if self.psnr == f64::INFINITY {
            "inf".to_string()
        } else {
            num(self.psnr)
        };
        let qi = self.qi.map_or(QI_DEGENERATE.to_string(), num);
        format!(
            "{},{},{},{},{},{}",
            num(self.ie),
            num(self.mi),
            num(self.rmse),
            psnr,
            qi,
            num(self.sf)
        )
    }

    pub fn to_csv(&self) -> String {
        format!("{CSV_HEADER}\n{}\n", self.to_csv_row())
    }
}

/// All six metrics. Multi-channel triples are evaluated per channel and
/// averaged; `qi` is degenerate if any channel is.
pub fn full_report(v: &ImageBuffer, t: &ImageBuffer, f: &ImageBuffer) -> Result<MetricReport> {
    if !(v.same_shape(f) && t.same_shape(f)) {
        return Err(Error::ShapeMismatch(format!(
            "metric triple {:?}, {:?}, {:?}",
            v.shape(),
            t.shape(),
            f.shape()
        )));
    }
    let (vs, ts, fs) = (split_channels(v), split_channels(t), split_channels(f));
    let k = fs.len() as f64;
    let mut acc = MetricReport {
        ie: 0.0,
        mi: 0.0,
        rmse: 0.0,
        psnr: 0.0,
        qi: Some(0.0),
        sf: 0.0,
    };
    let mut mse = 0.0;
    for ((vc, tc), fc) in vs.iter().zip(&ts).zip(&fs) {
        let (v, t, f) = (vc.samples(), tc.samples(), fc.samples());
        acc.ie += entropy_of(f);
        acc.mi += mi_of(v, t, f);
        acc.rmse += rmse_of(v, t, f);
        mse += 0.5 * (mean_sq_diff(f, v) + mean_sq_diff(f, t));
        acc.qi = match (acc.qi, qi_of(v, t, f)) {
            (Some(sum), Ok(q)) => Some(sum + q),
            (_, Err(Error::DegenerateInput(_))) | (None, _) => None,
            (_, Err(e)) => return Err(e),
        };
        let (rf, cf) = rc_of(f, fc.width(), fc.height())?;
        acc.sf += rf.hypot(cf);
    }
    acc.ie /= k;
    acc.mi /= k;
    acc.rmse /= k;
    acc.qi = acc.qi.map(|q| q / k);
    acc.sf /= k;
    // averaging per-channel dB values would break the zero-error sentinel;
    // the channel MSEs are averaged instead
    acc.psnr = psnr_from_mse(mse / k);
    Ok(acc)
}

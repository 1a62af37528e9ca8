//! The four fusion pipelines: DWT and UDWT each with the max-magnitude rule
//! or with optimizer-weighted additive fusion.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::extract_features;
use crate::image::ImageBuffer;
use crate::imgio::{merge_channels, split_channels};
use crate::optimizer::{optimize_weights, GaConfig, GaTrace, WeightPair};
use crate::wavelet::{forward_transform, inverse_transform, BandKind, Decomposition, TransformKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionRule {
    MaxRule,
    GaWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FusionMethod {
    /// A1
    #[serde(rename = "dwt")]
    Dwt,
    /// A2
    #[serde(rename = "udwt")]
    Udwt,
    /// A3
    #[serde(rename = "dwt-ga")]
    DwtGa,
    /// A4
    #[serde(rename = "udwt-ga")]
    UdwtGa,
}

impl FusionMethod {
    pub const ALL: [FusionMethod; 4] = [Self::Dwt, Self::Udwt, Self::DwtGa, Self::UdwtGa];

    pub fn new(transform: TransformKind, rule: FusionRule) -> Self {
        match (transform, rule) {
            (TransformKind::Decimated, FusionRule::MaxRule) => Self::Dwt,
            (TransformKind::Undecimated, FusionRule::MaxRule) => Self::Udwt,
            (TransformKind::Decimated, FusionRule::GaWeighted) => Self::DwtGa,
            (TransformKind::Undecimated, FusionRule::GaWeighted) => Self::UdwtGa,
        }
    }

    pub fn transform(self) -> TransformKind {
        match self {
            Self::Dwt | Self::DwtGa => TransformKind::Decimated,
            Self::Udwt | Self::UdwtGa => TransformKind::Undecimated,
        }
    }

    pub fn rule(self) -> FusionRule {
        match self {
            Self::Dwt | Self::Udwt => FusionRule::MaxRule,
            Self::DwtGa | Self::UdwtGa => FusionRule::GaWeighted,
        }
    }

    /// CLI name: `dwt`, `udwt`, `dwt-ga`, `udwt-ga`.
    pub fn name(self) -> &'static str {
        match self {
            Self::Dwt => "dwt",
            Self::Udwt => "udwt",
            Self::DwtGa => "dwt-ga",
            Self::UdwtGa => "udwt-ga",
        }
    }

    /// Short label used in reports: `A1`..`A4`.
    pub fn label(self) -> &'static str {
        match self {
            Self::Dwt => "A1",
            Self::Udwt => "A2",
            Self::DwtGa => "A3",
            Self::UdwtGa => "A4",
        }
    }
}

impl fmt::Display for FusionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FusionMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown fusion method {s:?} (expected dwt, udwt, dwt-ga or udwt-ga)"))
    }
}

/// Weights chosen for a GA method: one pair per channel plus their mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelWeights {
    pub mean: WeightPair,
    pub per_channel: Vec<WeightPair>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FusionResult {
    pub fused: ImageBuffer,
    pub weights: Option<ChannelWeights>,
    pub traces: Option<Vec<GaTrace>>,
}

/// Max-magnitude selection on detail bands (ties keep `da`), arithmetic mean
/// on the approximation band.
pub fn fuse_bands_max(da: &Decomposition, db: &Decomposition) -> Result<Decomposition> {
    da.zip_with(db, |band, a, b| match band.kind {
        BandKind::LL => 0.5 * (a + b),
        _ if a.abs() >= b.abs() => a,
        _ => b,
    })
}

/// `wv * a + wt * b` on every coefficient of every band.
pub fn fuse_bands_weighted(
    da: &Decomposition,
    db: &Decomposition,
    w: WeightPair,
) -> Result<Decomposition> {
    da.zip_with(db, |_, a, b| w.wv * a + w.wt * b)
}

struct ChannelOutcome {
    plane: ImageBuffer,
    weight: Option<(WeightPair, GaTrace)>,
}

fn fuse_channel(
    a: &ImageBuffer,
    b: &ImageBuffer,
    method: FusionMethod,
    cfg: &GaConfig,
) -> Result<ChannelOutcome> {
    let da = forward_transform(a, method.transform())?;
    let db = forward_transform(b, method.transform())?;
    let (fused, weight) = match method.rule() {
        FusionRule::MaxRule => (fuse_bands_max(&da, &db)?, None),
        FusionRule::GaWeighted => {
            let fa = extract_features(&da)?;
            let fb = extract_features(&db)?;
            let (w, trace) = optimize_weights(fa.as_slice(), fb.as_slice(), cfg)?;
            (fuse_bands_weighted(&da, &db, w)?, Some((w, trace)))
        }
    };
    Ok(ChannelOutcome {
        plane: inverse_transform(&fused)?,
        weight,
    })
}

/// Runs `method` on a registered pair, channel by channel. Samples are
/// clamped to `[0, 255]` only when the channels are merged back.
pub fn fuse(
    a: &ImageBuffer,
    b: &ImageBuffer,
    method: FusionMethod,
    cfg: &GaConfig,
) -> Result<FusionResult> {
    let fused = fuse_unclamped(a, b, method, cfg)?;
    Ok(FusionResult {
        fused: fused.fused.clamped(),
        ..fused
    })
}

/// [`fuse`] without the final clamp.
pub fn fuse_unclamped(
    a: &ImageBuffer,
    b: &ImageBuffer,
    method: FusionMethod,
    cfg: &GaConfig,
) -> Result<FusionResult> {
    if !a.same_shape(b) {
        return Err(Error::ShapeMismatch(format!(
            "unregistered pair: {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    if method.rule() == FusionRule::GaWeighted {
        cfg.validate()?;
    }
    let pa = split_channels(a);
    let pb = split_channels(b);
    let outcomes = pa
        .par_iter()
        .zip(&pb)
        .map(|(x, y)| fuse_channel(x, y, method, cfg))
        .collect::<Result<Vec<_>>>()?;

    let planes: Vec<ImageBuffer> = outcomes.iter().map(|o| o.plane.clone()).collect();
    let fused = merge_channels(&planes)?;
    let (weights, traces) = match method.rule() {
        FusionRule::MaxRule => (None, None),
        FusionRule::GaWeighted => {
            let (per_channel, traces): (Vec<_>, Vec<_>) = outcomes
                .into_iter()
                .map(|o| o.weight.expect("GA channel carries weights"))
                .unzip();
            let mean = WeightPair::mean(&per_channel).expect("at least one channel");
            (Some(ChannelWeights { mean, per_channel }), Some(traces))
        }
    };
    Ok(FusionResult {
        fused,
        weights,
        traces,
    })
}

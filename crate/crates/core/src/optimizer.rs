//! Deterministic coarse-to-fine search for the fusion weight pair.
//!
//! Each generation evaluates `n` trial weights spaced `diff` apart starting
//! from a base `wv` (with `wt = 1 - wv`). The fitness is the feature-space
//! MSE between a max-magnitude selection of the weighted feature vectors and
//! each source vector. After a generation the scan re-centres on the best
//! trial (`base = wv_best - diff / 2`) and refines `diff` tenfold, until the
//! two smallest MSEs of a generation differ by less than the termination
//! epsilon or the generation budget runs out.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fusion weights for the first (`wv`) and second (`wt`) source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightPair {
    pub wv: f64,
    pub wt: f64,
}

impl WeightPair {
    /// Pair `(wv, 1 - wv)` with `wv` clamped to `[0, 1]`.
    pub fn from_wv(wv: f64) -> Self {
        let wv = wv.clamp(0.0, 1.0);
        Self { wv, wt: 1.0 - wv }
    }

    pub fn new(wv: f64, wt: f64) -> Result<Self> {
        let ok = (0.0..=1.0).contains(&wv) && (0.0..=1.0).contains(&wt) && (wv + wt - 1.0).abs() <= 1e-12;
        if !ok {
            return Err(Error::InvalidConfig(format!(
                "weights ({wv}, {wt}) must lie in [0, 1] and sum to 1"
            )));
        }
        Ok(Self { wv, wt })
    }

    pub fn swapped(self) -> Self {
        Self {
            wv: self.wt,
            wt: self.wv,
        }
    }

    /// Mean of several pairs (each component averaged, then renormalized so
    /// the components sum to 1).
    pub fn mean(pairs: &[WeightPair]) -> Option<Self> {
        if pairs.is_empty() {
            return None;
        }
        let wv = pairs.iter().map(|p| p.wv).sum::<f64>() / pairs.len() as f64;
        Some(Self::from_wv(wv))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub initial_diff: f64,
    pub trials_per_generation: usize,
    pub max_generations: usize,
    pub termination_epsilon: f64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            initial_diff: 0.1,
            trials_per_generation: 10,
            max_generations: 100,
            termination_epsilon: 1e-4,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials_per_generation < 2 {
            return Err(Error::InvalidConfig(
                "trials_per_generation must be at least 2".into(),
            ));
        }
        if !(self.initial_diff > 0.0 && self.initial_diff.is_finite()) {
            return Err(Error::InvalidConfig("initial_diff must be positive".into()));
        }
        if !(self.termination_epsilon > 0.0 && self.termination_epsilon.is_finite()) {
            return Err(Error::InvalidConfig(
                "termination_epsilon must be positive".into(),
            ));
        }
        if self.max_generations == 0 {
            return Err(Error::InvalidConfig(
                "max_generations must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    Epsilon,
    MaxGenerations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub diff: f64,
    pub trial_wv: Vec<f64>,
    pub trial_mse: Vec<f64>,
    /// `wv` of this generation's lowest-MSE trial.
    pub chosen_wv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaTrace {
    pub generations: Vec<GenerationRecord>,
    pub generations_run: usize,
    pub termination_reason: TerminationReason,
}

/// Feature-space fitness of a weight pair.
///
/// `m1 = wv * f1`, `m2 = wt * f2`; the combined vector takes `m1[i]` where
/// `|m1[i]| >= |m2[i]|` and `m2[i]` otherwise. Returns the mean of the two
/// MSEs between the combined vector and each source.
pub fn fitness_mse(f1: &[f64], f2: &[f64], w: WeightPair) -> Result<f64> {
    if f1.len() != f2.len() {
        return Err(Error::LengthMismatch(f1.len(), f2.len()));
    }
    if f1.is_empty() {
        return Err(Error::LengthMismatch(0, 0));
    }
    let (mut e1, mut e2) = (0.0, 0.0);
    for (&a, &b) in f1.iter().zip(f2) {
        let m1 = w.wv * a;
        let m2 = w.wt * b;
        let f3 = if m1.abs() >= m2.abs() { m1 } else { m2 };
        e1 += (f3 - a) * (f3 - a);
        e2 += (f3 - b) * (f3 - b);
    }
    let d = f1.len() as f64;
    Ok(0.5 * (e1 / d + e2 / d))
}

/// Runs the coarse-to-fine weight search and returns the globally best pair
/// along with the full per-generation trace.
pub fn optimize_weights(f1: &[f64], f2: &[f64], cfg: &GaConfig) -> Result<(WeightPair, GaTrace)> {
    cfg.validate()?;
    if f1.len() != f2.len() || f1.is_empty() {
        return Err(Error::LengthMismatch(f1.len(), f2.len()));
    }

    let n = cfg.trials_per_generation;
    let mut base_wv = 0.0;
    let mut best: Option<(f64, WeightPair)> = None;
    let mut generations = Vec::new();
    let mut termination_reason = TerminationReason::MaxGenerations;

    for g in 0..cfg.max_generations {
        let diff = cfg.initial_diff / 10f64.powi(g as i32);
        let mut trial_wv = Vec::with_capacity(n);
        let mut trial_mse = Vec::with_capacity(n);

        let mut wv = base_wv;
        for _ in 0..n {
            let w = WeightPair::from_wv(wv);
            debug_assert!((w.wv + w.wt - 1.0).abs() <= 1e-12);
            let mse = fitness_mse(f1, f2, w)?;
            if best.is_none_or(|(b, _)| mse < b) {
                best = Some((mse, w));
            }
            trial_wv.push(w.wv);
            trial_mse.push(mse);
            wv += diff;
        }

        // stable sort: equal MSEs keep evaluation order
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| trial_mse[a].total_cmp(&trial_mse[b]));
        let chosen_wv = trial_wv[order[0]];
        let gap = trial_mse[order[1]] - trial_mse[order[0]];

        generations.push(GenerationRecord {
            diff,
            trial_wv,
            trial_mse,
            chosen_wv,
        });
        if gap < cfg.termination_epsilon {
            termination_reason = TerminationReason::Epsilon;
            break;
        }
        base_wv = chosen_wv - diff / 2.0;
    }

    let (_, pair) = best.expect("at least one trial is evaluated");
    let generations_run = generations.len();
    Ok((
        pair,
        GaTrace {
            generations,
            generations_run,
            termination_reason,
        },
    ))
}

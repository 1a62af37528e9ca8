//! Dataset x method benchmark and its report renderings.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{BenchmarkConfig, DatasetEntry};
use crate::error::Result;
use crate::fusion::{fuse, ChannelWeights, FusionMethod, FusionRule};
use crate::imgio::{load_image, register_pair, save_image};
use crate::metrics::{full_report, MetricReport};
use crate::optimizer::GaConfig;

#[derive(Debug, Clone, Serialize)]
pub struct MethodOutcome {
    pub method: FusionMethod,
    pub metrics: MetricReport,
    pub weights: Option<ChannelWeights>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetOutcome {
    pub name: String,
    /// Set when the dataset could not be loaded or processed.
    pub error: Option<String>,
    pub results: Vec<MethodOutcome>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkReport {
    pub methods: Vec<FusionMethod>,
    pub ga: GaConfig,
    pub datasets: Vec<DatasetOutcome>,
}

impl BenchmarkReport {
    pub fn failed(&self) -> bool {
        self.datasets.iter().any(|d| d.error.is_some())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Text tables: metrics as rows with one sub-row per method and one
    /// column per dataset, then the chosen weights of the GA methods.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let legend: Vec<String> = self
            .methods
            .iter()
            .map(|m| format!("{}={}", m.label(), m.name()))
            .collect();
        writeln!(out, "# wavefuse benchmark report").unwrap();
        writeln!(out, "# methods: {}", legend.join(" ")).unwrap();
        writeln!(
            out,
            "# ga: initial_diff={} trials_per_generation={} max_generations={} termination_epsilon={}",
            self.ga.initial_diff,
            self.ga.trials_per_generation,
            self.ga.max_generations,
            self.ga.termination_epsilon
        )
        .unwrap();

        let header = |out: &mut String, first: &str, second: &str| {
            write!(out, "{first:<8}{second:<8}").unwrap();
            for d in &self.datasets {
                write!(out, "{:>14}", d.name).unwrap();
            }
            out.push('\n');
        };

        writeln!(out, "\n## objective metrics").unwrap();
        header(&mut out, "metric", "method");
        let rows: [(&str, CellFormat); 6] = [
            ("IE", |r| fmt_num(r.ie)),
            ("MI", |r| fmt_num(r.mi)),
            ("RMSE", |r| fmt_num(r.rmse)),
            ("PSNR", |r| {
                if r.psnr == f64::INFINITY {
                    "inf".into()
                } else {
                    fmt_num(r.psnr)
                }
            }),
            ("QI", |r| r.qi.map_or("degenerate".into(), fmt_num)),
            ("SF", |r| fmt_num(r.sf)),
        ];
        for (name, cell) in rows {
            for (i, m) in self.methods.iter().enumerate() {
                let first = if i == 0 { name } else { "" };
                write!(out, "{first:<8}{:<8}", m.label()).unwrap();
                for d in &self.datasets {
                    let v = d
                        .result(*m)
                        .map_or_else(|| "error".to_string(), |o| cell(&o.metrics));
                    write!(out, "{v:>14}").unwrap();
                }
                out.push('\n');
            }
        }

        let ga_methods: Vec<_> = self
            .methods
            .iter()
            .filter(|m| m.rule() == FusionRule::GaWeighted)
            .collect();
        if !ga_methods.is_empty() {
            writeln!(out, "\n## optimal weights (channel mean)").unwrap();
            header(&mut out, "method", "weight");
            for m in ga_methods {
                for (i, which) in ["wv", "wt"].into_iter().enumerate() {
                    let first = if i == 0 { m.label() } else { "" };
                    write!(out, "{first:<8}{which:<8}").unwrap();
                    for d in &self.datasets {
                        let v = d
                            .result(*m)
                            .and_then(|o| o.weights.as_ref())
                            .map_or_else(
                                || "error".to_string(),
                                |w| fmt_num(if i == 0 { w.mean.wv } else { w.mean.wt }),
                            );
                        write!(out, "{v:>14}").unwrap();
                    }
                    out.push('\n');
                }
            }
        }

        let failures: Vec<_> = self
            .datasets
            .iter()
            .filter_map(|d| d.error.as_ref().map(|e| (&d.name, e)))
            .collect();
        if !failures.is_empty() {
            writeln!(out, "\n## failures").unwrap();
            for (name, e) in failures {
                writeln!(out, "{name}: {e}").unwrap();
            }
        }
        out
    }
}

impl DatasetOutcome {
    fn result(&self, m: FusionMethod) -> Option<&MethodOutcome> {
        self.results.iter().find(|o| o.method == m)
    }
}

type CellFormat = fn(&MetricReport) -> String;

fn fmt_num(v: f64) -> String {
    format!("{v:.6}")
}

fn run_dataset(d: &DatasetEntry, cfg: &BenchmarkConfig) -> Result<Vec<MethodOutcome>> {
    let a = load_image(&d.src1)?;
    let b = load_image(&d.src2)?;
    let (a, b) = register_pair(&a, &b)?;
    let mut results = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let fused = fuse(&a, &b, method, &cfg.ga)?;
        if let Some(dir) = &cfg.fused_dir {
            std::fs::create_dir_all(dir)?;
            save_image(
                &fused.fused,
                dir.join(format!("{}_{}.png", d.name, method.name())),
            )?;
        }
        results.push(MethodOutcome {
            method,
            metrics: full_report(&a, &b, &fused.fused)?,
            weights: fused.weights,
        });
    }
    Ok(results)
}

/// Runs every dataset (concurrently) and assembles the report in config
/// order.
pub fn run_benchmark(cfg: &BenchmarkConfig) -> BenchmarkReport {
    let datasets = cfg
        .datasets
        .par_iter()
        .map(|d| {
            let outcome = match run_dataset(d, cfg) {
                Ok(results) => DatasetOutcome {
                    name: d.name.clone(),
                    error: None,
                    results,
                },
                Err(e) => DatasetOutcome {
                    name: d.name.clone(),
                    error: Some(e.to_string()),
                    results: Vec::new(),
                },
            };
            match &outcome.error {
                None => eprintln!("dataset {}: ok", d.name),
                Some(e) => eprintln!("dataset {}: failed: {e}", d.name),
            }
            outcome
        })
        .collect();
    BenchmarkReport {
        methods: cfg.methods.clone(),
        ga: cfg.ga,
        datasets,
    }
}

//! Comparison runs, parameter sweeps, and their CSV outputs.

use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::dataset::{OrderingSummary, TrajectoryDataset};
use crate::dimred::{spc_timeline, SpcConfig};
use crate::error::{Error, Result};
use crate::methods::Method;
use crate::metrics::{
    evaluate, ksdi_with_neighbors, kste, MetricSeries, NeighborSpec,
};
use crate::neighbors::k_nearest;
use rayon::prelude::*;

/// A dataset source plus the methods and metric settings of one run.
#[derive(Clone, Debug)]
pub struct ExperimentPlan {
    pub methods: Vec<Method>,
    pub neighbor_spec: NeighborSpec,
    pub seed: u64,
}

/// Result of one method within a comparison.
#[derive(Debug)]
pub struct ComparisonRow {
    pub method: String,
    pub tag: String,
    /// Wall-clock seconds spent computing the ordering only (no ingestion,
    /// metrics, or rendering).
    pub ordering_seconds: f64,
    pub ordering: Option<OrderingSummary>,
    pub metrics: Vec<MetricSeries>,
    pub error: Option<String>,
}

#[derive(Debug)]
pub struct ComparisonResult {
    pub rows: Vec<ComparisonRow>,
}

/// Run every method of the plan on one dataset. Individual method failures
/// are recorded in their row; the run continues.
pub fn run_comparison(ds: &TrajectoryDataset, plan: &ExperimentPlan) -> Result<ComparisonResult> {
    let mut rows = Vec::with_capacity(plan.methods.len());
    for method in &plan.methods {
        let started = Instant::now();
        let computed = method.compute(ds, plan.seed);
        let ordering_seconds = started.elapsed().as_secs_f64();
        match computed {
            Ok(ordering) => {
                let metrics = evaluate(ds, &ordering, plan.neighbor_spec)?;
                rows.push(ComparisonRow {
                    method: method.name().into(),
                    tag: ordering.method_tag().into(),
                    ordering_seconds,
                    ordering: Some(ordering),
                    metrics,
                    error: None,
                });
            }
            Err(e) => rows.push(ComparisonRow {
                method: method.name().into(),
                tag: method.tag(plan.seed),
                ordering_seconds,
                ordering: None,
                metrics: Vec::new(),
                error: Some(e.to_string()),
            }),
        }
    }
    Ok(ComparisonResult { rows })
}

impl ComparisonResult {
    /// Summary table: one row per (method, metric) with mean/max/min/stddev.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("method,metric,mean,max,min,stddev\n");
        for row in &self.rows {
            if let Some(err) = &row.error {
                out.push_str(&format!("{},error,{:?},,,\n", row.tag, err));
                continue;
            }
            for s in &row.metrics {
                match s.summary {
                    Some(sm) => out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        row.tag, s.name, sm.mean, sm.max, sm.min, sm.stddev
                    )),
                    None => out.push_str(&format!("{},{},,,,\n", row.tag, s.name)),
                }
            }
        }
        out
    }

    /// Trade-off scatter data: mean KSdi against mean and max KSte.
    pub fn tradeoff_csv(&self) -> String {
        let mut out = String::from("method,mean_ksdi,mean_kste,max_kste\n");
        for row in &self.rows {
            if row.error.is_some() {
                continue;
            }
            let get = |name: &str| {
                row.metrics
                    .iter()
                    .find(|s| s.name == name)
                    .and_then(|s| s.summary)
            };
            if let (Some(di), Some(te)) = (get("ksdi"), get("kste")) {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    row.tag, di.mean, te.mean, te.max
                ));
            }
        }
        out
    }

    /// Wall-clock ordering times; inherently run-dependent, kept out of the
    /// deterministic outputs.
    pub fn timings_csv(&self) -> String {
        let mut out = String::from("method,ordering_seconds\n");
        for row in &self.rows {
            out.push_str(&format!("{},{:.6}\n", row.tag, row.ordering_seconds));
        }
        out
    }

    /// Per-frame metric series of one method as `frame,metric,value` rows.
    /// Stability metrics are indexed by the transition's target frame.
    pub fn series_csv(&self, row: &ComparisonRow) -> String {
        let mut out = String::from("frame,metric,value\n");
        for s in &row.metrics {
            let offset = if crate::metrics::STABILITY_METRICS.contains(&s.name.as_str()) {
                1
            } else {
                0
            };
            for (i, v) in s.values.iter().enumerate() {
                out.push_str(&format!("{},{},{}\n", i + offset, s.name, v));
            }
        }
        out
    }
}

/// One row of a sigma sweep.
#[derive(Clone, Copy, Debug)]
pub struct SweepRow {
    pub sigma: f64,
    pub mean_ksdi: f64,
    pub mean_kste: f64,
    pub max_kste: f64,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Largest grid sigma below which every ordering equals the lowest
    /// sigma's ordering.
    pub low_cutoff: f64,
    /// Smallest grid sigma above which every ordering equals the highest
    /// sigma's ordering.
    pub high_cutoff: f64,
}

impl SweepResult {
    pub fn csv(&self) -> String {
        let mut out = String::from("sigma,mean_ksdi,mean_kste,max_kste\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.sigma, r.mean_ksdi, r.mean_kste, r.max_kste
            ));
        }
        out
    }
}

/// The canonical 101-value sigma grid 0.00, 0.01, ..., 1.00.
pub fn default_sigma_grid() -> Vec<f64> {
    (0..=100).map(|i| i as f64 / 100.0).collect()
}

/// Sweep the SPC stretch threshold over `sigmas` (ascending), reporting mean
/// KSdi, mean KSte, and max KSte per value plus the cut-off thresholds
/// beyond which the rank arrays stop changing. Spatial neighborhoods are
/// computed once and shared across the sweep.
pub fn run_sweep(
    ds: &TrajectoryDataset,
    sigmas: &[f64],
    spec: NeighborSpec,
) -> Result<SweepResult> {
    if sigmas.is_empty() {
        return Err(Error::Validation("sweep needs at least one sigma".into()));
    }
    let mut sorted = sigmas.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite sigmas"));
    for &s in &sorted {
        SpcConfig::new(s)?;
    }

    let k = spec.effective_k(ds.entity_count());
    let knn: Vec<Vec<Vec<usize>>> = ds
        .frames()
        .par_iter()
        .map(|frame| k_nearest(frame, k))
        .collect();

    let per_sigma: Vec<(SweepRow, Vec<Vec<usize>>)> = sorted
        .par_iter()
        .map(|&sigma| {
            let cfg = SpcConfig::new(sigma).expect("validated above");
            let tl = spc_timeline(ds, cfg);
            let coords: Vec<Vec<f64>> = ds
                .frames()
                .iter()
                .zip(&tl.pv)
                .map(|(frame, &v)| frame.iter().map(|p| p.dot(v)).collect())
                .collect();
            let ord = OrderingSummary::from_coords(coords, "sweep")?;

            let mut ksdi_sum = 0.0;
            for t in 0..ds.frame_count() {
                ksdi_sum += ksdi_with_neighbors(ds.frame(t), &knn[t], ord.ranks_at(t))?;
            }
            let mean_ksdi = ksdi_sum / ds.frame_count() as f64;

            let (mut kste_sum, mut kste_max) = (0.0f64, f64::NEG_INFINITY);
            for t in 1..ds.frame_count() {
                let v = kste(ord.ranks_at(t - 1), ord.ranks_at(t), spec)?;
                kste_sum += v;
                kste_max = kste_max.max(v);
            }
            let transitions = (ds.frame_count() - 1).max(1) as f64;
            let row = SweepRow {
                sigma,
                mean_ksdi,
                mean_kste: kste_sum / transitions,
                max_kste: if kste_max.is_finite() { kste_max } else { 0.0 },
            };
            Ok((row, ord.ranks().to_vec()))
        })
        .collect::<Result<Vec<_>>>()?;

    // Adjacent rank arrays compared for exact equality.
    let equal_next: Vec<bool> = per_sigma
        .windows(2)
        .map(|w| w[0].1 == w[1].1)
        .collect();
    let first_change = equal_next.iter().position(|&e| !e);
    let last_change = equal_next.iter().rposition(|&e| !e);
    let (low_cutoff, high_cutoff) = match (first_change, last_change) {
        (Some(f), Some(l)) => (sorted[f], sorted[l + 1]),
        _ => (*sorted.last().unwrap(), sorted[0]),
    };

    Ok(SweepResult {
        rows: per_sigma.into_iter().map(|(r, _)| r).collect(),
        low_cutoff,
        high_cutoff,
    })
}

/// Write a string to `dir/name`, creating the directory if needed.
pub fn write_output(dir: &Path, name: &str, content: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, content)?;
    Ok(path)
}

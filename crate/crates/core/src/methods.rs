//! Unified dispatch over every ordering method.
//!
//! Per-frame methods (curves, trees, clusterings) run frames in parallel;
//! timeline methods (spc, cpc, warm-started embeddings) respect their frame
//! order internally. Method tags record parameters and, where randomness is
//! involved, the seed.

use rayon::prelude::*;

use crate::cluster::{clc_tree, optimal_leaf_order, snn_tree};
use crate::dataset::{OrderingSummary, TrajectoryDataset};
use crate::dimred::{
    cpc_order, sammon_embed, spc_order, tsne_embed, InitMode, SpcConfig, TsneConfig,
};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::spatial::{hilbert_order, quadtree_order, rtree_order, zorder_order, GridDiscretization};

/// One ordering method with its parameters.
#[derive(Clone, Debug)]
pub enum Method {
    Fxd,
    Hil { bits: u32 },
    Zor { bits: u32 },
    Pqr,
    Rtr { capacity: usize },
    Clc,
    Snn { k: usize },
    Sam { iterations: usize },
    Samp { iterations: usize },
    Sne(TsneConfig),
    Snep(TsneConfig),
    Spc { sigma: f64 },
    Cpc { sigma: f64, cut_factor: f64 },
}

/// Shared knobs a plan or CLI can hand to [`Method::parse`].
#[derive(Clone, Debug)]
pub struct MethodDefaults {
    pub bits: u32,
    pub rtree_capacity: usize,
    pub snn_k: usize,
    pub cut_factor: f64,
    pub sam_iterations: usize,
    pub tsne: TsneConfig,
    pub sigma: f64,
}

impl Default for MethodDefaults {
    fn default() -> Self {
        MethodDefaults {
            bits: crate::spatial::DEFAULT_CURVE_BITS,
            rtree_capacity: crate::spatial::DEFAULT_RTREE_CAPACITY,
            snn_k: crate::cluster::DEFAULT_SNN_K,
            cut_factor: crate::cluster::DEFAULT_CUT_FACTOR,
            sam_iterations: crate::dimred::DEFAULT_SAMMON_ITERATIONS,
            tsne: TsneConfig::default(),
            sigma: 0.5,
        }
    }
}

impl Method {
    /// Parse `"name"` or `"name:param"` method tags: `spc:0.5`, `cpc:0.5`,
    /// `hil:16`, `zor:16`, `rtr:8`, `snn:10`, `sam:500`, `sne:1000`, plus
    /// `fxd`, `pqr`, `clc`, `samp`, `snep` variants.
    pub fn parse(tag: &str, defaults: &MethodDefaults) -> Result<Method> {
        let (name, param) = match tag.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (tag.trim(), None),
        };
        let bad_param = |what: &str| {
            Error::Validation(format!("invalid parameter for {name}: {what:?}"))
        };
        let float = |p: &str| p.parse::<f64>().map_err(|_| bad_param(p));
        let int = |p: &str| p.parse::<usize>().map_err(|_| bad_param(p));
        let sigma_of = |p: Option<&str>| -> Result<f64> {
            let sigma = match p {
                Some(p) => float(p)?,
                None => defaults.sigma,
            };
            SpcConfig::new(sigma)?;
            Ok(sigma)
        };
        Ok(match name {
            "fxd" => Method::Fxd,
            "hil" => Method::Hil {
                bits: param.map(int).transpose()?.unwrap_or(defaults.bits as usize) as u32,
            },
            "zor" => Method::Zor {
                bits: param.map(int).transpose()?.unwrap_or(defaults.bits as usize) as u32,
            },
            "pqr" => Method::Pqr,
            "rtr" => Method::Rtr {
                capacity: param
                    .map(|p| int(p))
                    .transpose()?
                    .unwrap_or(defaults.rtree_capacity),
            },
            "clc" => Method::Clc,
            "snn" => Method::Snn {
                k: param.map(int).transpose()?.unwrap_or(defaults.snn_k),
            },
            "sam" => Method::Sam {
                iterations: param
                    .map(|p| int(p))
                    .transpose()?
                    .unwrap_or(defaults.sam_iterations),
            },
            "samp" => Method::Samp {
                iterations: param
                    .map(|p| int(p))
                    .transpose()?
                    .unwrap_or(defaults.sam_iterations),
            },
            "sne" => {
                let mut cfg = defaults.tsne.clone();
                if let Some(p) = param {
                    cfg.iterations = int(p)?;
                }
                Method::Sne(cfg)
            }
            "snep" => {
                let mut cfg = defaults.tsne.clone();
                if let Some(p) = param {
                    cfg.iterations = int(p)?;
                }
                Method::Snep(cfg)
            }
            "spc" => Method::Spc {
                sigma: sigma_of(param)?,
            },
            "cpc" => Method::Cpc {
                sigma: sigma_of(param)?,
                cut_factor: defaults.cut_factor,
            },
            other => {
                return Err(Error::Validation(format!(
                    "unknown method {other:?}; expected one of fxd, hil, zor, pqr, rtr, \
                     clc, snn, sam, samp, sne, snep, spc, cpc"
                )))
            }
        })
    }

    /// Stable identifier including parameters (and seed where applicable).
    pub fn tag(&self, seed: u64) -> String {
        match self {
            Method::Fxd => "fxd".into(),
            Method::Hil { bits } => format!("hil(bits={bits})"),
            Method::Zor { bits } => format!("zor(bits={bits})"),
            Method::Pqr => "pqr".into(),
            Method::Rtr { capacity } => format!("rtr(capacity={capacity})"),
            Method::Clc => "clc".into(),
            Method::Snn { k } => format!("snn(k={k})"),
            Method::Sam { iterations } => format!("sam(iters={iterations},seed={seed})"),
            Method::Samp { iterations } => format!("samp(iters={iterations},seed={seed})"),
            Method::Sne(cfg) => format!(
                "sne(iters={},perplexity={},seed={seed})",
                cfg.iterations, cfg.perplexity
            ),
            Method::Snep(cfg) => format!(
                "snep(iters={},perplexity={},seed={seed})",
                cfg.iterations, cfg.perplexity
            ),
            Method::Spc { sigma } => format!("spc(sigma={sigma})"),
            Method::Cpc { sigma, cut_factor } => {
                format!("cpc(sigma={sigma},cut={cut_factor})")
            }
        }
    }

    /// Short name without parameters (the table row label).
    pub fn name(&self) -> &'static str {
        match self {
            Method::Fxd => "fxd",
            Method::Hil { .. } => "hil",
            Method::Zor { .. } => "zor",
            Method::Pqr => "pqr",
            Method::Rtr { .. } => "rtr",
            Method::Clc => "clc",
            Method::Snn { .. } => "snn",
            Method::Sam { .. } => "sam",
            Method::Samp { .. } => "samp",
            Method::Sne(_) => "sne",
            Method::Snep(_) => "snep",
            Method::Spc { .. } => "spc",
            Method::Cpc { .. } => "cpc",
        }
    }

    /// Compute the ordering of `ds` with this method. `seed` feeds the
    /// randomized embeddings; deterministic methods ignore it.
    pub fn compute(&self, ds: &TrajectoryDataset, seed: u64) -> Result<OrderingSummary> {
        let tag = self.tag(seed);
        match self {
            Method::Fxd => Ok(ds.fxd_order()),
            Method::Hil { bits } => {
                let bits = *bits;
                per_frame_ranks(ds, tag, move |frame| {
                    let disc = GridDiscretization::for_frame(bits, frame)?;
                    Ok(hilbert_order(frame, &disc))
                })
            }
            Method::Zor { bits } => {
                let bits = *bits;
                per_frame_ranks(ds, tag, move |frame| {
                    let disc = GridDiscretization::for_frame(bits, frame)?;
                    Ok(zorder_order(frame, &disc))
                })
            }
            Method::Pqr => per_frame_ranks(ds, tag, |frame| Ok(quadtree_order(frame))),
            Method::Rtr { capacity } => {
                let capacity = *capacity;
                if capacity < 2 {
                    return Err(Error::Validation(
                        "R-tree capacity must be at least 2".into(),
                    ));
                }
                per_frame_ranks(ds, tag, move |frame| Ok(rtree_order(frame, capacity)))
            }
            Method::Clc => per_frame_ranks(ds, tag, |frame| {
                Ok(optimal_leaf_order(&clc_tree(frame), frame))
            }),
            Method::Snn { k } => {
                let k = *k;
                if k == 0 {
                    return Err(Error::Validation(
                        "SNN neighborhood size must be positive".into(),
                    ));
                }
                per_frame_ranks(ds, tag, move |frame| {
                    Ok(optimal_leaf_order(&snn_tree(frame, k), frame))
                })
            }
            Method::Sam { iterations } => {
                let emb = sammon_embed(ds, *iterations, seed, InitMode::Random)?;
                Ok(OrderingSummary::from_coords(emb.coords, tag)?)
            }
            Method::Samp { iterations } => {
                let emb = sammon_embed(ds, *iterations, seed, InitMode::PreviousFrame)?;
                Ok(OrderingSummary::from_coords(emb.coords, tag)?)
            }
            Method::Sne(cfg) => {
                let mut cfg = cfg.clone();
                cfg.seed = seed;
                let emb = tsne_embed(ds, &cfg, InitMode::Random)?;
                Ok(OrderingSummary::from_coords(emb.coords, tag)?)
            }
            Method::Snep(cfg) => {
                let mut cfg = cfg.clone();
                cfg.seed = seed;
                let emb = tsne_embed(ds, &cfg, InitMode::PreviousFrame)?;
                Ok(OrderingSummary::from_coords(emb.coords, tag)?)
            }
            Method::Spc { sigma } => {
                Ok(spc_order(ds, SpcConfig::new(*sigma)?)?.with_method_tag(tag))
            }
            Method::Cpc { sigma, cut_factor } => {
                Ok(cpc_order(ds, SpcConfig::new(*sigma)?, *cut_factor)?.with_method_tag(tag))
            }
        }
    }
}

fn per_frame_ranks<F>(ds: &TrajectoryDataset, tag: String, rank_frame: F) -> Result<OrderingSummary>
where
    F: Fn(&[Point]) -> Result<Vec<usize>> + Sync,
{
    let ranks: Vec<Vec<usize>> = ds
        .frames()
        .par_iter()
        .map(|frame| rank_frame(frame))
        .collect::<Result<Vec<_>>>()?;
    OrderingSummary::from_ranks(ranks, tag)
}

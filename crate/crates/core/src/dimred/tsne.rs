//! Exact t-SNE to one dimension.
//!
//! High-dimensional affinities are Gaussian conditionals whose per-point
//! bandwidths are found by binary search on the target perplexity, then
//! symmetrized as `P_ij = (P_{j|i} + P_{i|j}) / 2n`. Low-dimensional
//! affinities use the Student t kernel. The Kullback-Leibler divergence is
//! minimized by momentum gradient descent with exact gradients; no tree or
//! sampling approximations are used anywhere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{Embedding1D, InitMode};
use crate::dataset::TrajectoryDataset;
use crate::error::{Error, Result};
use crate::geom::Point;

/// Gradient-descent and affinity parameters.
#[derive(Clone, Debug)]
pub struct TsneConfig {
    /// Target perplexity (effective neighborhood size).
    pub perplexity: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    pub momentum_initial: f64,
    pub momentum_final: f64,
    /// Iteration at which the momentum switches to its final value.
    pub momentum_switch: usize,
    /// Early-exaggeration factor applied to `P` at the start of random-init
    /// runs.
    pub exaggeration: f64,
    pub exaggeration_iters: usize,
    pub seed: u64,
}

impl Default for TsneConfig {
    fn default() -> Self {
        TsneConfig {
            perplexity: 40.0,
            iterations: 1000,
            learning_rate: 200.0,
            momentum_initial: 0.5,
            momentum_final: 0.8,
            momentum_switch: 250,
            exaggeration: 4.0,
            exaggeration_iters: 100,
            seed: 0,
        }
    }
}

impl TsneConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.perplexity >= 2.0) {
            return Err(Error::Validation(format!(
                "perplexity must be at least 2, got {}",
                self.perplexity
            )));
        }
        if self.iterations == 0 {
            return Err(Error::Validation("iterations must be positive".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::Validation("learning rate must be positive".into()));
        }
        if !(self.momentum_initial > 0.0 && self.momentum_initial < 1.0)
            || !(self.momentum_final > 0.0 && self.momentum_final < 1.0)
        {
            return Err(Error::Validation("momenta must lie in (0, 1)".into()));
        }
        if !(self.exaggeration >= 1.0) {
            return Err(Error::Validation(
                "exaggeration factor must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Symmetric affinities of one frame plus bandwidth-search diagnostics.
pub struct TsneAffinities {
    /// Row-major `n x n` symmetric matrix with zero diagonal; sums to 1.
    pub p: Vec<f64>,
    pub n: usize,
    /// Row-major conditional distributions `P_{j|i}` before symmetrization.
    pub conditional: Vec<f64>,
    /// Perplexity actually realized per point.
    pub realized_perplexity: Vec<f64>,
    /// Points whose bandwidth search hit the step limit.
    pub warnings: Vec<String>,
}

impl TsneAffinities {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.n + j]
    }

    pub fn conditional_at(&self, i: usize, j: usize) -> f64 {
        self.conditional[i * self.n + j]
    }
}

/// Conditional-affinity bandwidths by binary search: for each point, find
/// `beta = 1/(2 sigma^2)` so the conditional distribution's perplexity
/// matches `kappa` within 1e-3, in at most 100 steps. Rows that cannot
/// converge (a point with a single neighbor, many coincident points) keep
/// the closest bandwidth and are reported in `warnings`.
pub fn tsne_affinities(frame: &[Point], kappa: f64) -> Result<TsneAffinities> {
    let n = frame.len();
    if n < 2 {
        return Err(Error::Validation(
            "affinities need at least two entities".into(),
        ));
    }

    let mut dsq = vec![0.0f64; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = frame[i].dist_sq(frame[j]);
            dsq[i * n + j] = d;
            dsq[j * n + i] = d;
        }
    }

    let mut conditional = vec![0.0f64; n * n];
    let mut realized = vec![0.0f64; n];
    let mut warnings = Vec::new();
    let tol = 1e-3;

    for i in 0..n {
        let row = &dsq[i * n..(i + 1) * n];
        let shift = row
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, &d)| d)
            .fold(f64::INFINITY, f64::min);

        let mut beta = 1.0f64;
        let (mut beta_min, mut beta_max) = (f64::NEG_INFINITY, f64::INFINITY);
        let mut perp = 0.0;
        let mut converged = false;
        for _step in 0..100 {
            // Weights with the nearest neighbor normalized to 1.
            let mut sum = 0.0;
            let mut weighted_d = 0.0;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let w = (-beta * (row[j] - shift)).exp();
                sum += w;
                weighted_d += w * (row[j] - shift);
            }
            let entropy = sum.ln() + beta * weighted_d / sum;
            perp = entropy.exp();
            if (perp - kappa).abs() <= tol {
                converged = true;
                break;
            }
            if perp > kappa {
                beta_min = beta;
                beta = if beta_max.is_infinite() {
                    beta * 2.0
                } else {
                    0.5 * (beta + beta_max)
                };
            } else {
                beta_max = beta;
                beta = if beta_min.is_infinite() {
                    beta * 0.5
                } else {
                    0.5 * (beta + beta_min)
                };
            }
        }
        if !converged {
            warnings.push(format!(
                "bandwidth search for point {i} stopped at perplexity {perp:.6} (target {kappa})"
            ));
        }
        realized[i] = perp;

        let mut sum = 0.0;
        for j in 0..n {
            if j == i {
                continue;
            }
            let w = (-beta * (row[j] - shift)).exp();
            conditional[i * n + j] = w;
            sum += w;
        }
        for j in 0..n {
            conditional[i * n + j] /= sum;
        }
    }

    // Symmetrize: P_ij = (P_{j|i} + P_{i|j}) / 2n, zero diagonal.
    let mut p = vec![0.0f64; n * n];
    let scale = 1.0 / (2.0 * n as f64);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                p[i * n + j] = (conditional[i * n + j] + conditional[j * n + i]) * scale;
            }
        }
    }

    Ok(TsneAffinities {
        p,
        n,
        conditional,
        realized_perplexity: realized,
        warnings,
    })
}

struct FrameResult {
    coords: Vec<f64>,
    iterations: usize,
    cost: f64,
    warnings: Vec<String>,
}

fn embed_frame(
    frame: &[Point],
    cfg: &TsneConfig,
    init: &[f64],
    exaggerate: bool,
    frame_idx: usize,
) -> Result<FrameResult> {
    let n = frame.len();
    let aff = tsne_affinities(frame, cfg.perplexity)?;
    let mut warnings = aff.warnings.clone();
    for w in &mut warnings {
        *w = format!("frame {frame_idx}: {w}");
    }

    let mut x = init.to_vec();
    let mut velocity = vec![0.0f64; n];
    let mut gains = vec![1.0f64; n];
    let mut w = vec![0.0f64; n * n];

    for iter in 0..cfg.iterations {
        let momentum = if iter < cfg.momentum_switch {
            cfg.momentum_initial
        } else {
            cfg.momentum_final
        };
        let p_scale = if exaggerate && iter < cfg.exaggeration_iters {
            cfg.exaggeration
        } else {
            1.0
        };

        // Student-t kernel weights and their total.
        let mut z = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let diff = x[i] - x[j];
                let wij = 1.0 / (1.0 + diff * diff);
                w[i * n + j] = wij;
                w[j * n + i] = wij;
                z += 2.0 * wij;
            }
        }

        for i in 0..n {
            let mut grad = 0.0f64;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let wij = w[i * n + j];
                let qij = wij / z;
                grad += (p_scale * aff.at(i, j) - qij) * wij * (x[i] - x[j]);
            }
            grad *= 4.0;
            // Adaptive per-coordinate gains, as in the reference descent:
            // grow while the gradient fights the velocity, shrink otherwise.
            gains[i] = if grad.signum() != velocity[i].signum() {
                gains[i] + 0.2
            } else {
                (gains[i] * 0.8).max(0.01)
            };
            velocity[i] = momentum * velocity[i] - cfg.learning_rate * gains[i] * grad;
        }
        let mut mean = 0.0;
        for i in 0..n {
            x[i] += velocity[i];
            mean += x[i];
        }
        mean /= n as f64;
        for xi in &mut x {
            *xi -= mean;
            if !xi.is_finite() {
                return Err(Error::Numerical {
                    frame: frame_idx,
                    msg: "t-SNE coordinates diverged to NaN/inf".into(),
                });
            }
        }
    }

    // Final KL divergence against the unexaggerated affinities.
    let mut z = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let diff = x[i] - x[j];
            let wij = 1.0 / (1.0 + diff * diff);
            w[i * n + j] = wij;
            w[j * n + i] = wij;
            z += 2.0 * wij;
        }
    }
    let mut cost = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let pij = aff.at(i, j);
            if pij > 0.0 {
                cost += pij * (pij / (w[i * n + j] / z)).ln();
            }
        }
    }
    if cost.is_nan() {
        return Err(Error::Numerical {
            frame: frame_idx,
            msg: "t-SNE cost is NaN".into(),
        });
    }

    Ok(FrameResult {
        coords: x,
        iterations: cfg.iterations,
        cost,
        warnings,
    })
}

fn random_init(n: usize, seed: u64, t: usize) -> Vec<f64> {
    let mut rng =
        ChaCha8Rng::seed_from_u64(seed ^ (t as u64).wrapping_mul(0x517cc1b727220a95));
    (0..n)
        .map(|_| 1e-2 * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Embed every frame of `ds` into 1D by t-SNE.
///
/// Random initialization embeds frames independently (and in parallel);
/// `InitMode::PreviousFrame` warm-starts each frame from the previous
/// solution sequentially and skips early exaggeration.
pub fn tsne_embed(
    ds: &TrajectoryDataset,
    cfg: &TsneConfig,
    init: InitMode,
) -> Result<Embedding1D> {
    cfg.validate()?;
    let n = ds.entity_count();
    if n < 3 {
        return Err(Error::Validation(
            "t-SNE needs at least three entities".into(),
        ));
    }
    if !(cfg.perplexity < n as f64) {
        return Err(Error::Validation(format!(
            "perplexity {} must be smaller than the number of entities {n}",
            cfg.perplexity
        )));
    }

    let results: Vec<FrameResult> = match init {
        InitMode::Random => (0..ds.frame_count())
            .into_par_iter()
            .map(|t| {
                let start = random_init(n, cfg.seed, t);
                embed_frame(ds.frame(t), cfg, &start, true, t)
            })
            .collect::<Result<Vec<_>>>()?,
        InitMode::PreviousFrame => {
            let mut out: Vec<FrameResult> = Vec::with_capacity(ds.frame_count());
            for t in 0..ds.frame_count() {
                let start = if t == 0 {
                    random_init(n, cfg.seed, 0)
                } else {
                    out[t - 1].coords.clone()
                };
                out.push(embed_frame(ds.frame(t), cfg, &start, false, t)?);
            }
            out
        }
    };

    let mut coords = Vec::with_capacity(results.len());
    let mut iterations_used = Vec::with_capacity(results.len());
    let mut final_cost = Vec::with_capacity(results.len());
    let mut warnings = Vec::new();
    for r in results {
        coords.push(r.coords);
        iterations_used.push(r.iterations);
        final_cost.push(r.cost);
        warnings.extend(r.warnings);
    }
    Ok(Embedding1D {
        coords,
        iterations_used,
        final_cost,
        warnings,
    })
}

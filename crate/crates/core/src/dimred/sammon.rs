//! Sammon mapping to one dimension.
//!
//! Minimizes `C = (1/sum d_ij) * sum (d_ij - delta_ij)^2 / d_ij` over 1D
//! coordinates, where `d_ij` are the input Euclidean distances and
//! `delta_ij = |x_i - x_j|`. Each frame is optimized by a damped diagonal
//! Newton descent (step factor 0.3, halved whenever a step would increase
//! the cost), so the cost is non-increasing across accepted steps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Embedding1D, InitMode};
use crate::dataset::TrajectoryDataset;
use crate::error::{Error, Result};
use crate::geom::Point;

pub const DEFAULT_SAMMON_ITERATIONS: usize = 500;

/// Descent step factor; halved on cost increases.
const STEP_FACTOR: f64 = 0.3;

/// Condensed pairwise distances (`i < j`) of one frame.
struct PairDistances {
    n: usize,
    d: Vec<f64>,
    total: f64,
}

impl PairDistances {
    fn build(points: &[Point]) -> PairDistances {
        let n = points.len();
        let mut d = Vec::with_capacity(n * (n - 1) / 2);
        let mut total = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let dist = points[i].dist(points[j]);
                d.push(dist);
                total += dist;
            }
        }
        PairDistances { n, d, total }
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < j);
        // Row-major upper triangle.
        let idx = i * self.n - i * (i + 1) / 2 + (j - i - 1);
        self.d[idx]
    }

    fn has_zero(&self) -> bool {
        self.d.contains(&0.0)
    }
}

/// Sammon stress of 1D coordinates against pairwise input distances.
pub fn sammon_cost(points: &[Point], coords: &[f64]) -> f64 {
    let pd = PairDistances::build(points);
    cost_of(&pd, coords)
}

fn cost_of(pd: &PairDistances, coords: &[f64]) -> f64 {
    let mut sum = 0.0;
    for i in 0..pd.n {
        for j in (i + 1)..pd.n {
            let d = pd.at(i, j);
            let delta = (coords[i] - coords[j]).abs();
            sum += (d - delta) * (d - delta) / d;
        }
    }
    sum / pd.total
}

/// Analytic gradient of the Sammon cost with respect to each coordinate.
pub fn sammon_gradient(points: &[Point], coords: &[f64]) -> Vec<f64> {
    let pd = PairDistances::build(points);
    gradient_of(&pd, coords)
}

fn gradient_of(pd: &PairDistances, coords: &[f64]) -> Vec<f64> {
    let n = pd.n;
    let mut grad = vec![0.0f64; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = pd.at(i, j);
            let diff = coords[i] - coords[j];
            let delta = diff.abs();
            let s = if diff > 0.0 {
                1.0
            } else if diff < 0.0 {
                -1.0
            } else {
                0.0
            };
            let g = -2.0 * (d - delta) / d * s;
            grad[i] += g;
            grad[j] -= g;
        }
    }
    for g in &mut grad {
        *g /= pd.total;
    }
    grad
}

/// Diagonal of the second derivative (independent of the coordinates for the
/// 1D cost): `2/total * sum_j 1/d_ij`.
fn hessian_diag(pd: &PairDistances) -> Vec<f64> {
    let n = pd.n;
    let mut h = vec![0.0f64; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let inv = 2.0 / pd.at(i, j);
            h[i] += inv;
            h[j] += inv;
        }
    }
    for v in &mut h {
        *v /= pd.total;
    }
    h
}

/// Embed every frame of `ds` into 1D by Sammon mapping.
///
/// `InitMode::PreviousFrame` warm-starts each frame with the previous
/// frame's solution (frame 0 is random). Coincident points are separated by
/// a seeded jitter of relative magnitude 1e-9 before the distances are
/// taken. Exhausting the iteration budget is not an error.
pub fn sammon_embed(
    ds: &TrajectoryDataset,
    iterations: usize,
    seed: u64,
    init: InitMode,
) -> Result<Embedding1D> {
    let n = ds.entity_count();
    if n < 2 {
        return Err(Error::Validation(
            "sammon mapping needs at least two entities".into(),
        ));
    }
    let results: Vec<(Vec<f64>, usize, f64)> = match init {
        InitMode::Random => (0..ds.frame_count())
            .into_par_iter()
            .map(|t| {
                let mut rng = frame_rng(seed, t);
                let points = prepare_points(ds.frame(t), &mut rng);
                let pd = PairDistances::build(&points);
                let mut x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
                let (iters, cost) = descend(&pd, &mut x, iterations, t)?;
                Ok((x, iters, cost))
            })
            .collect::<Result<Vec<_>>>()?,
        InitMode::PreviousFrame => {
            let mut out: Vec<(Vec<f64>, usize, f64)> = Vec::with_capacity(ds.frame_count());
            for t in 0..ds.frame_count() {
                let mut rng = frame_rng(seed, t);
                let points = prepare_points(ds.frame(t), &mut rng);
                let pd = PairDistances::build(&points);
                let mut x: Vec<f64> = if t > 0 {
                    out[t - 1].0.clone()
                } else {
                    (0..n).map(|_| rng.gen::<f64>() - 0.5).collect()
                };
                let (iters, cost) = descend(&pd, &mut x, iterations, t)?;
                out.push((x, iters, cost));
            }
            out
        }
    };

    let mut coords = Vec::with_capacity(results.len());
    let mut iterations_used = Vec::with_capacity(results.len());
    let mut final_cost = Vec::with_capacity(results.len());
    for (x, iters, cost) in results {
        coords.push(x);
        iterations_used.push(iters);
        final_cost.push(cost);
    }
    Ok(Embedding1D {
        coords,
        iterations_used,
        final_cost,
        warnings: Vec::new(),
    })
}

fn frame_rng(seed: u64, t: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (t as u64).wrapping_mul(0x9e3779b97f4a7c15))
}

/// Jitter coincident points apart so all pairwise distances are positive.
fn prepare_points(frame: &[Point], rng: &mut ChaCha8Rng) -> Vec<Point> {
    let mut points = frame.to_vec();
    let diameter = crate::geom::Bounds::from_points(points.iter().copied())
        .map(|b| b.diameter())
        .unwrap_or(0.0);
    let magnitude = 1e-9 * diameter.max(1.0);
    for _attempt in 0..100 {
        if !PairDistances::build(&points).has_zero() {
            break;
        }
        let mut coincident = vec![false; points.len()];
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points[i] == points[j] {
                    coincident[i] = true;
                    coincident[j] = true;
                }
            }
        }
        for (i, flag) in coincident.iter().enumerate() {
            if *flag {
                points[i] = points[i]
                    + Point::new(
                        (rng.gen::<f64>() - 0.5) * magnitude,
                        (rng.gen::<f64>() - 0.5) * magnitude,
                    );
            }
        }
    }
    points
}

fn descend(
    pd: &PairDistances,
    x: &mut Vec<f64>,
    budget: usize,
    frame: usize,
) -> Result<(usize, f64)> {
    let hess = hessian_diag(pd);
    let mut step = STEP_FACTOR;
    let mut cost = cost_of(pd, x);
    if cost.is_nan() {
        return Err(Error::Numerical {
            frame,
            msg: "sammon cost is NaN".into(),
        });
    }
    let mut used = 0usize;
    for _ in 0..budget {
        let grad = gradient_of(pd, x);
        let direction: Vec<f64> = grad
            .iter()
            .zip(&hess)
            .map(|(g, h)| g / h.max(1e-300))
            .collect();
        // Halve the step until the cost stops increasing.
        let mut accepted = false;
        while step > 1e-16 {
            let trial: Vec<f64> = x
                .iter()
                .zip(&direction)
                .map(|(xi, di)| xi - step * di)
                .collect();
            let trial_cost = cost_of(pd, &trial);
            if trial_cost.is_nan() {
                return Err(Error::Numerical {
                    frame,
                    msg: "sammon cost became NaN during descent".into(),
                });
            }
            if trial_cost <= cost {
                let improvement = cost - trial_cost;
                *x = trial;
                cost = trial_cost;
                used += 1;
                accepted = true;
                if improvement <= 1e-15 * cost.max(1e-300) {
                    return Ok((used, cost));
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok((used, cost))
}

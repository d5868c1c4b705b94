//! Dimensionality-reduction orderings: stabilized PCA projections and
//! gradient-descent embeddings.
//!
//! The workhorse is `spc_timeline`: per frame, project onto the first
//! principal component whenever the point set is stretched (eigenvalue ratio
//! `v2/v1 <= sigma`), and linearly interpolate the projection vector's
//! orientation across runs of unstretched frames. `cpc_order` applies the
//! same idea per cluster. `sammon` and `tsne` embed each frame by gradient
//! descent, optionally warm-started from the previous frame's solution.

mod sammon;
mod tsne;

pub use sammon::{sammon_cost, sammon_embed, sammon_gradient, DEFAULT_SAMMON_ITERATIONS};
pub use tsne::{tsne_affinities, tsne_embed, TsneAffinities, TsneConfig};

use crate::cluster::{clc_tree, cut_clusters};
use crate::dataset::{OrderingSummary, TrajectoryDataset};
use crate::error::{Error, Result};
use crate::geom::Point;

/// Stretch threshold for the stable principal component method.
#[derive(Clone, Copy, Debug)]
pub struct SpcConfig {
    sigma: f64,
}

impl SpcConfig {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&sigma) || sigma.is_nan() {
            return Err(Error::Validation(format!(
                "sigma must lie in [0, 1], got {sigma}"
            )));
        }
        Ok(SpcConfig { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Per-frame projection vectors with their eigenvalue pairs.
#[derive(Clone, Debug)]
pub struct ProjectionTimeline {
    /// Unit projection vector per frame.
    pub pv: Vec<Point>,
    /// `(v1, v2)` covariance eigenvalues per frame, `v1 >= v2 >= 0`.
    pub eigen: Vec<(f64, f64)>,
    /// Frames whose vector was produced by interpolation.
    pub interpolated: Vec<bool>,
}

impl ProjectionTimeline {
    pub fn len(&self) -> usize {
        self.pv.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pv.is_empty()
    }
}

/// First principal component of one frame.
///
/// Returns the unit eigenvector of the population (1/n) covariance matrix for
/// the larger eigenvalue `v1`, plus `(v1, v2)`. The sign is canonicalized to
/// the upper half-plane (`y > 0`, or `x > 0` when `y == 0`). An isotropic
/// frame (`v1 == v2`, including a single point) yields `(1, 0)`.
pub fn pca_frame(frame: &[Point]) -> (Point, f64, f64) {
    assert!(!frame.is_empty(), "PCA needs at least one point");
    let n = frame.len() as f64;
    let mut mean = Point::zero();
    for p in frame {
        mean = mean + *p;
    }
    mean = mean * (1.0 / n);

    let (mut sxx, mut syy, mut sxy) = (0.0f64, 0.0f64, 0.0f64);
    for p in frame {
        let d = *p - mean;
        sxx += d.x * d.x;
        syy += d.y * d.y;
        sxy += d.x * d.y;
    }
    sxx /= n;
    syy /= n;
    sxy /= n;

    let half_trace = 0.5 * (sxx + syy);
    let disc = (0.25 * (sxx - syy) * (sxx - syy) + sxy * sxy).sqrt();
    let v1 = half_trace + disc;
    let v2 = (half_trace - disc).max(0.0);

    let pv = if disc == 0.0 {
        Point::new(1.0, 0.0)
    } else if sxy == 0.0 {
        if sxx >= syy {
            Point::new(1.0, 0.0)
        } else {
            Point::new(0.0, 1.0)
        }
    } else {
        // (A - v1 I) has rank 1; pick the larger of the two kernel spanners.
        let c1 = Point::new(sxy, v1 - sxx);
        let c2 = Point::new(v1 - syy, sxy);
        let v = if c1.norm_sq() >= c2.norm_sq() { c1 } else { c2 };
        v.normalized()
    };
    (canonical_sign(pv), v1, v2)
}

fn canonical_sign(v: Point) -> Point {
    if v.y < 0.0 || (v.y == 0.0 && v.x < 0.0) {
        -v
    } else {
        v
    }
}

/// Eigenvalue ratio used by the stretch test; 0 when `v1 == 0`.
fn stretch_ratio(v1: f64, v2: f64) -> f64 {
    if v1 > 0.0 {
        v2 / v1
    } else {
        0.0
    }
}

/// The consistent per-frame principal components: each frame's PC flipped to
/// maximize the dot product with the previous frame's, with isotropic frames
/// inheriting the previous vector entirely.
fn consistent_pcs(frames: &[Vec<Point>]) -> (Vec<Point>, Vec<(f64, f64)>) {
    let mut pcs: Vec<Point> = Vec::with_capacity(frames.len());
    let mut eigen = Vec::with_capacity(frames.len());
    for (t, frame) in frames.iter().enumerate() {
        let (pc, v1, v2) = pca_frame(frame);
        let isotropic = v1 == v2;
        let chosen = if t == 0 {
            pc
        } else {
            let prev = pcs[t - 1];
            if isotropic {
                // Direction undefined; keep the previous vector.
                prev
            } else if pc.dot(prev) < 0.0 {
                -pc
            } else {
                pc
            }
        };
        pcs.push(chosen);
        eigen.push((v1, v2));
    }
    (pcs, eigen)
}

/// Stable principal component projection vectors for a whole dataset.
///
/// Frame 0 uses its first principal component. Every later frame's component
/// is sign-matched against the previous frame and the signed rotation angle
/// accumulated. When a frame is stretched (`v2/v1 <= sigma`) or the data
/// ends, the vectors of the unstretched frames in between are back-filled by
/// rotating the anchor vector through proportional shares of the accumulated
/// angle. Runs in O(nT).
pub fn spc_timeline(ds: &TrajectoryDataset, cfg: SpcConfig) -> ProjectionTimeline {
    let frames = ds.frames();
    let t_len = frames.len();
    let (pcs, eigen) = consistent_pcs(frames);

    let mut pv = pcs.clone();
    let mut interpolated = vec![false; t_len];
    let mut anchor = 0usize;
    let mut alpha = 0.0f64;
    for t in 1..t_len {
        alpha += pcs[t - 1].signed_angle_to(pcs[t]);
        let (v1, v2) = eigen[t];
        if stretch_ratio(v1, v2) <= cfg.sigma() || t == t_len - 1 {
            let span = (t - anchor) as f64;
            for ts in (anchor + 1)..t {
                let share = alpha * (ts - anchor) as f64 / span;
                pv[ts] = pv[anchor].rotated(share);
                interpolated[ts] = true;
            }
            anchor = t;
            alpha = 0.0;
        }
    }

    ProjectionTimeline {
        pv,
        eigen,
        interpolated,
    }
}

/// Project every frame onto its timeline vector; ranks ascending by
/// coordinate, ties by entity index.
pub fn project_order(ds: &TrajectoryDataset, tl: &ProjectionTimeline) -> Result<OrderingSummary> {
    if tl.len() != ds.frame_count() {
        return Err(Error::Contract(format!(
            "timeline covers {} frames, dataset has {}",
            tl.len(),
            ds.frame_count()
        )));
    }
    let coords: Vec<Vec<f64>> = ds
        .frames()
        .iter()
        .zip(&tl.pv)
        .map(|(frame, &v)| frame.iter().map(|p| p.dot(v)).collect())
        .collect();
    OrderingSummary::from_coords(coords, "projection")
}

/// SPC ordering in one call.
pub fn spc_order(ds: &TrajectoryDataset, cfg: SpcConfig) -> Result<OrderingSummary> {
    let tl = spc_timeline(ds, cfg);
    Ok(project_order(ds, &tl)?.with_method_tag(format!("spc(sigma={})", cfg.sigma())))
}

// ---------------------------------------------------------------------------
// Clustered principal component
// ---------------------------------------------------------------------------

/// State of one cluster's SPC run while its composition persists.
struct ClusterState {
    /// Frame of the current interpolation anchor.
    anchor_t: usize,
    /// Raw (non-interpolated) vector at the anchor frame.
    anchor_pv: Point,
    /// Signed angle accumulated since the anchor.
    alpha: f64,
    /// Consistent raw component at the last processed frame.
    last_raw: Point,
    /// `(frame, cluster slot)` entries since the anchor, anchor included.
    window: Vec<(usize, usize)>,
    last_t: usize,
}

/// Clustered stable principal component ordering.
///
/// Per frame the point set is partitioned by complete-linkage clustering with
/// the doubling-rule cut; each cluster that keeps exactly the same entity set
/// continues its own SPC run. A cluster's interpolation window is closed
/// retroactively when its composition changes (its last frame acts as the
/// final time step), and a newly composed cluster takes its projection sign
/// from the vector used by the majority of its points in the previous frame.
/// Cluster centers projected onto the whole set's first principal component
/// order the clusters; entities never interleave across clusters.
pub fn cpc_order(
    ds: &TrajectoryDataset,
    cfg: SpcConfig,
    cut_factor: f64,
) -> Result<OrderingSummary> {
    let t_len = ds.frame_count();
    let n = ds.entity_count();

    // Pass 1: partitions and finalized per-cluster projection vectors.
    let mut partitions: Vec<Vec<Vec<usize>>> = Vec::with_capacity(t_len);
    let mut cluster_pv: Vec<Vec<Point>> = Vec::with_capacity(t_len);

    let mut states: Vec<(Vec<usize>, ClusterState)> = Vec::new();
    // Previous frame bookkeeping for the majority sign rule.
    let mut prev_cluster_of: Vec<usize> = vec![0; n];
    let mut prev_raw: Vec<Point> = Vec::new();

    for t in 0..t_len {
        let frame = ds.frame(t);
        let parts = cut_clusters(&clc_tree(frame), cut_factor);
        cluster_pv.push(vec![Point::zero(); parts.len()]);

        // Close windows of clusters that no longer exist with this exact
        // composition, treating their last frame as the end of time.
        let mut surviving: Vec<(Vec<usize>, ClusterState)> = Vec::new();
        for (members, mut st) in states.drain(..) {
            if parts.contains(&members) {
                surviving.push((members, st));
            } else {
                let end = st.last_t;
                flush_window(&mut st, end, &mut cluster_pv);
            }
        }
        states = surviving;

        let mut new_prev_cluster_of = vec![0usize; n];
        let mut new_prev_raw = vec![Point::zero(); parts.len()];

        for (slot, members) in parts.iter().enumerate() {
            for &e in members {
                new_prev_cluster_of[e] = slot;
            }
            let cluster_points: Vec<Point> = members.iter().map(|&e| frame[e]).collect();
            let (pc, v1, v2) = pca_frame(&cluster_points);
            let isotropic = v1 == v2;

            let state_idx = states.iter().position(|(m, _)| m == members);
            match state_idx {
                Some(idx) => {
                    let st = &mut states[idx].1;
                    let raw = if isotropic {
                        st.last_raw
                    } else if pc.dot(st.last_raw) < 0.0 {
                        -pc
                    } else {
                        pc
                    };
                    st.alpha += st.last_raw.signed_angle_to(raw);
                    st.last_raw = raw;
                    st.last_t = t;
                    st.window.push((t, slot));
                    cluster_pv[t][slot] = raw;
                    if stretch_ratio(v1, v2) <= cfg.sigma() || t == t_len - 1 {
                        flush_window(st, t, &mut cluster_pv);
                    }
                }
                None => {
                    // New composition: majority of the members' previous
                    // vectors decides the sign.
                    let raw = if t == 0 || isotropic {
                        pc
                    } else {
                        let reference = majority_previous_vector(
                            members,
                            &prev_cluster_of,
                            &prev_raw,
                        );
                        if pc.dot(reference) < 0.0 {
                            -pc
                        } else {
                            pc
                        }
                    };
                    cluster_pv[t][slot] = raw;
                    let st = ClusterState {
                        anchor_t: t,
                        anchor_pv: raw,
                        alpha: 0.0,
                        last_raw: raw,
                        window: vec![(t, slot)],
                        last_t: t,
                    };
                    let mut st = st;
                    if stretch_ratio(v1, v2) <= cfg.sigma() || t == t_len - 1 {
                        flush_window(&mut st, t, &mut cluster_pv);
                    }
                    states.push((members.clone(), st));
                }
            }
            new_prev_raw[slot] = states
                .iter()
                .find(|(m, _)| m == members)
                .map(|(_, s)| s.last_raw)
                .expect("state registered above");
        }

        partitions.push(parts);
        prev_cluster_of = new_prev_cluster_of;
        prev_raw = new_prev_raw;
    }

    // Any still-open windows end at the final frame.
    for (_, st) in states.iter_mut() {
        let end = st.last_t;
        flush_window(st, end, &mut cluster_pv);
    }

    // Pass 2: whole-set component chain, cluster ranks, final coordinates.
    let (whole_pcs, _) = consistent_pcs(ds.frames());
    let mut coords = vec![vec![0.0f64; n]; t_len];
    for t in 0..t_len {
        let frame = ds.frame(t);
        let parts = &partitions[t];
        struct Placed {
            slot: usize,
            center_coord: f64,
            min_entity: usize,
        }
        let mut placed: Vec<Placed> = parts
            .iter()
            .enumerate()
            .map(|(slot, members)| {
                let mut center = Point::zero();
                for &e in members {
                    center = center + frame[e];
                }
                center = center * (1.0 / members.len() as f64);
                Placed {
                    slot,
                    center_coord: center.dot(whole_pcs[t]),
                    min_entity: members[0],
                }
            })
            .collect();
        placed.sort_by(|a, b| {
            a.center_coord
                .partial_cmp(&b.center_coord)
                .expect("finite projections")
                .then(a.min_entity.cmp(&b.min_entity))
        });

        // Each cluster's points sit around its center's global projection;
        // overlapping clusters are shifted apart so the eventual ordering
        // keeps clusters contiguous.
        let span_guard = 1e-12
            * placed
                .iter()
                .map(|p| p.center_coord.abs())
                .fold(1.0f64, f64::max);
        let mut prev_max = f64::NEG_INFINITY;
        for p in &placed {
            let members = &parts[p.slot];
            let pv = cluster_pv[t][p.slot];
            let mut center = Point::zero();
            for &e in members {
                center = center + frame[e];
            }
            center = center * (1.0 / members.len() as f64);
            let center_local = center.dot(pv);
            let local: Vec<f64> = members
                .iter()
                .map(|&e| p.center_coord + (frame[e].dot(pv) - center_local))
                .collect();
            let lo = local.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = local.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let shift = if prev_max == f64::NEG_INFINITY || lo > prev_max {
                0.0
            } else {
                prev_max - lo + span_guard
            };
            for (&e, &c) in members.iter().zip(&local) {
                coords[t][e] = c + shift;
            }
            prev_max = hi + shift;
        }
    }

    Ok(OrderingSummary::from_coords(coords, "cpc")?
        .with_method_tag(format!("cpc(sigma={},cut={})", cfg.sigma(), cut_factor)))
}

/// Back-fill the interpolated vectors of a window ending at `end`, then
/// restart the window there.
fn flush_window(st: &mut ClusterState, end: usize, cluster_pv: &mut [Vec<Point>]) {
    if end > st.anchor_t {
        let span = (end - st.anchor_t) as f64;
        for &(ts, slot) in &st.window {
            if ts > st.anchor_t && ts < end {
                let share = st.alpha * (ts - st.anchor_t) as f64 / span;
                cluster_pv[ts][slot] = st.anchor_pv.rotated(share);
            }
        }
    }
    let end_entry = st.window.iter().find(|(ts, _)| *ts == end).copied();
    st.anchor_t = end;
    st.anchor_pv = match end_entry {
        Some((ts, slot)) => cluster_pv[ts][slot],
        None => st.last_raw,
    };
    st.alpha = 0.0;
    st.window.retain(|(ts, _)| *ts == end);
}

/// The raw vector used at the previous frame by the cluster contributing the
/// most members; ties go to the group containing the smallest entity index.
fn majority_previous_vector(
    members: &[usize],
    prev_cluster_of: &[usize],
    prev_raw: &[Point],
) -> Point {
    use std::collections::HashMap;
    let mut counts: HashMap<usize, (usize, usize)> = HashMap::new();
    for &e in members {
        let slot = prev_cluster_of[e];
        let entry = counts.entry(slot).or_insert((0, e));
        entry.0 += 1;
        entry.1 = entry.1.min(e);
    }
    let (&slot, _) = counts
        .iter()
        .max_by(|(_, (ca, ma)), (_, (cb, mb))| ca.cmp(cb).then(mb.cmp(ma)))
        .expect("cluster is nonempty");
    prev_raw[slot]
}

/// Initialization mode for the gradient-descent embeddings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitMode {
    /// Fresh random coordinates every frame.
    Random,
    /// Warm start from the previous frame's solution; frame 0 is random.
    PreviousFrame,
}

impl InitMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(InitMode::Random),
            "prev" | "previous" | "previous_frame" => Ok(InitMode::PreviousFrame),
            other => Err(Error::Validation(format!(
                "unknown init mode {other:?}; expected random or prev"
            ))),
        }
    }
}

/// Per-frame 1D embedding produced by gradient descent.
#[derive(Clone, Debug)]
pub struct Embedding1D {
    /// `coords[t][i]` is the 1D coordinate of entity `i` at frame `t`.
    pub coords: Vec<Vec<f64>>,
    /// Gradient-descent iterations actually spent per frame.
    pub iterations_used: Vec<usize>,
    /// Final cost value per frame.
    pub final_cost: Vec<f64>,
    /// Non-fatal issues encountered (e.g. bandwidth searches hitting their
    /// step limit).
    pub warnings: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::TrajectoryDataset;

    fn ds_from_frames(frames: Vec<Vec<Point>>) -> TrajectoryDataset {
        let n = frames[0].len();
        let ids = (0..n).map(|i| format!("e{i}")).collect();
        TrajectoryDataset::new(ids, frames, None).unwrap()
    }

    fn lcg(seed: u64) -> impl FnMut() -> f64 {
        let mut state = seed.wrapping_add(0x9e3779b97f4a7c15);
        move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        }
    }

    #[test]
    fn pca_of_axis_aligned_cross() {
        let frame = vec![
            Point::new(-1.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, -2.0),
            Point::new(0.0, 2.0),
        ];
        let (pv, v1, v2) = pca_frame(&frame);
        assert!((v1 - 2.0).abs() < 1e-12);
        assert!((v2 - 0.5).abs() < 1e-12);
        assert!((pv.x.abs() - 0.0).abs() < 1e-12);
        assert!((pv.y.abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pca_of_collinear_diagonal_points() {
        let frame: Vec<Point> = (0..5).map(|i| Point::new(i as f64, i as f64)).collect();
        let (pv, _, v2) = pca_frame(&frame);
        let expect = std::f64::consts::FRAC_1_SQRT_2;
        assert!((pv.x - expect).abs() < 1e-12);
        assert!((pv.y - expect).abs() < 1e-12);
        assert!(v2.abs() < 1e-12);
    }

    #[test]
    fn pca_single_point_is_isotropic() {
        let (pv, v1, v2) = pca_frame(&[Point::new(3.0, 4.0)]);
        assert_eq!((v1, v2), (0.0, 0.0));
        assert_eq!(pv, Point::new(1.0, 0.0));
    }

    /// Independent oracle: the covariance's principal direction found by the
    /// half-angle formula, with variances measured directly on the points.
    #[test]
    fn pca_matches_angle_based_oracle() {
        let mut rng = lcg(99);
        for _ in 0..30 {
            let frame: Vec<Point> = (0..20)
                .map(|_| Point::new(rng() * 4.0 - 2.0, rng() * 4.0 - 2.0))
                .collect();
            let (pv, v1, v2) = pca_frame(&frame);

            let nf = frame.len() as f64;
            let mut mean = Point::zero();
            for p in &frame {
                mean = mean + *p;
            }
            mean = mean * (1.0 / nf);
            let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
            for p in &frame {
                let d = *p - mean;
                sxx += d.x * d.x / nf;
                syy += d.y * d.y / nf;
                sxy += d.x * d.y / nf;
            }
            let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
            let cand = Point::new(theta.cos(), theta.sin());
            let var_along = |v: Point| {
                frame
                    .iter()
                    .map(|p| {
                        let d = (*p - mean).dot(v);
                        d * d
                    })
                    .sum::<f64>()
                    / nf
            };
            let (va, vb) = (var_along(cand), var_along(Point::new(-cand.y, cand.x)));
            let (ov1, ov2, ovec) = if va >= vb {
                (va, vb, cand)
            } else {
                (vb, va, Point::new(-cand.y, cand.x))
            };
            assert!((v1 - ov1).abs() < 1e-9);
            assert!((v2 - ov2).abs() < 1e-9);
            assert!((pv.dot(ovec).abs() - 1.0).abs() < 1e-9);
        }
    }

    /// An ellipse-like four-point set with eigenvalue ratio (b/a)^2, rotated
    /// by `angle`.
    fn rotated_cross(a: f64, b: f64, angle: f64) -> Vec<Point> {
        [
            Point::new(a, 0.0),
            Point::new(-a, 0.0),
            Point::new(0.0, b),
            Point::new(0.0, -b),
        ]
        .iter()
        .map(|p| p.rotated(angle))
        .collect()
    }

    #[test]
    fn spc_sigma_one_never_interpolates_and_matches_per_frame_pca() {
        let mut rng = lcg(5);
        let frames: Vec<Vec<Point>> = (0..40)
            .map(|_| {
                (0..12)
                    .map(|_| Point::new(rng() * 3.0, rng() * 3.0))
                    .collect()
            })
            .collect();
        let ds = ds_from_frames(frames.clone());
        let tl = spc_timeline(&ds, SpcConfig::new(1.0).unwrap());
        assert!(tl.interpolated.iter().all(|&b| !b));

        // Independent sign-consistency chain over per-frame components.
        let mut prev: Option<Point> = None;
        for (t, frame) in frames.iter().enumerate() {
            let (mut pc, _, _) = pca_frame(frame);
            if let Some(p) = prev {
                if pc.dot(p) < 0.0 {
                    pc = -pc;
                }
            }
            assert!(
                (tl.pv[t] - pc).norm() < 1e-12,
                "frame {t}: {:?} vs {:?}",
                tl.pv[t],
                pc
            );
            prev = Some(pc);
        }
    }

    #[test]
    fn spc_sigma_zero_interpolates_every_interior_frame() {
        let mut rng = lcg(6);
        let frames: Vec<Vec<Point>> = (0..25)
            .map(|_| {
                (0..10)
                    .map(|_| Point::new(rng() * 3.0, rng() * 3.0))
                    .collect()
            })
            .collect();
        let ds = ds_from_frames(frames);
        let tl = spc_timeline(&ds, SpcConfig::new(0.0).unwrap());
        assert!(!tl.interpolated[0]);
        assert!(!tl.interpolated[24]);
        for t in 1..24 {
            assert!(tl.interpolated[t], "frame {t} should be interpolated");
        }
    }

    #[test]
    fn spc_uniform_rotation_is_a_fixed_point_of_interpolation() {
        // First PC rotates exactly 10 degrees per frame over 4 frames;
        // frames 0 and 3 are stretched (ratio 0.25), frames 1 and 2 are not
        // (ratio 0.64 > sigma 0.5). Interpolated vectors at 10 and 20 degrees
        // coincide with the true components.
        let deg = std::f64::consts::PI / 18.0;
        let frames = vec![
            rotated_cross(2.0, 1.0, 0.0),
            rotated_cross(1.0, 0.8, deg),
            rotated_cross(1.0, 0.8, 2.0 * deg),
            rotated_cross(2.0, 1.0, 3.0 * deg),
        ];
        let ds = ds_from_frames(frames);
        let tl = spc_timeline(&ds, SpcConfig::new(0.5).unwrap());
        assert_eq!(tl.interpolated, vec![false, true, true, false]);
        for (t, expect_angle) in [(1usize, deg), (2, 2.0 * deg)] {
            let expect = Point::new(1.0, 0.0).rotated(expect_angle);
            assert!(
                (tl.pv[t] - expect).norm() < 1e-9,
                "frame {t}: {:?} vs {:?}",
                tl.pv[t],
                expect
            );
        }
    }

    #[test]
    fn interpolation_window_rotation_is_monotone_and_exact() {
        let mut rng = lcg(17);
        let frames: Vec<Vec<Point>> = (0..60)
            .map(|_| {
                (0..15)
                    .map(|_| Point::new(rng() * 2.0, rng() * 2.0))
                    .collect()
            })
            .collect();
        let ds = ds_from_frames(frames.clone());
        let cfg = SpcConfig::new(0.4).unwrap();
        let tl = spc_timeline(&ds, cfg);
        let (pcs, _) = consistent_pcs(ds.frames());

        // Recover windows from the interpolation flags.
        let mut t = 0;
        while t < tl.len() {
            if tl.interpolated[t] {
                let start = t - 1;
                let mut end = t;
                while tl.interpolated[end] {
                    end += 1;
                }
                // Total signed angle across the window.
                let alpha: f64 = (start + 1..=end)
                    .map(|s| pcs[s - 1].signed_angle_to(pcs[s]))
                    .sum();
                // Rotating the anchor by the full angle lands on the end PC.
                let landed = tl.pv[start].rotated(alpha);
                assert!((landed - pcs[end]).norm() < 1e-9);
                // Shares are monotone in angle.
                let span = (end - start) as f64;
                for s in (start + 1)..end {
                    let share = alpha * (s - start) as f64 / span;
                    let expect = tl.pv[start].rotated(share);
                    assert!((tl.pv[s] - expect).norm() < 1e-9);
                }
                t = end;
            } else {
                t += 1;
            }
        }
    }

    #[test]
    fn projection_examples() {
        let ds = ds_from_frames(vec![vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(2.0, 0.0),
        ]]);
        let tl = ProjectionTimeline {
            pv: vec![Point::new(1.0, 0.0)],
            eigen: vec![(1.0, 0.0)],
            interpolated: vec![false],
        };
        let ord = project_order(&ds, &tl).unwrap();
        assert_eq!(ord.ranks_at(0), &[0, 1, 2]);

        let tl_neg = ProjectionTimeline {
            pv: vec![Point::new(-1.0, 0.0)],
            eigen: vec![(1.0, 0.0)],
            interpolated: vec![false],
        };
        let ord2 = project_order(&ds, &tl_neg).unwrap();
        assert_eq!(ord2.ranks_at(0), &[2, 1, 0]);

        // Rigid translation leaves the ranking unchanged.
        let shifted = ds_from_frames(vec![vec![
            Point::new(5.0, -3.0),
            Point::new(6.0, -3.0),
            Point::new(7.0, -3.0),
        ]]);
        let ord3 = project_order(&shifted, &tl).unwrap();
        assert_eq!(ord3.ranks_at(0), ord.ranks_at(0));
    }

    #[test]
    fn spc_ranks_invariant_under_similarity_transforms() {
        let mut rng = lcg(23);
        let frames: Vec<Vec<Point>> = (0..20)
            .map(|_| {
                (0..14)
                    .map(|_| Point::new(rng() * 2.0, rng() * 2.0))
                    .collect()
            })
            .collect();
        let transformed: Vec<Vec<Point>> = frames
            .iter()
            .map(|f| {
                f.iter()
                    .map(|p| Point::new(p.x * 37.5 + 1000.0, p.y * 37.5 - 55.0))
                    .collect()
            })
            .collect();
        let cfg = SpcConfig::new(0.6).unwrap();
        let a = spc_order(&ds_from_frames(frames), cfg).unwrap();
        let b = spc_order(&ds_from_frames(transformed), cfg).unwrap();
        assert_eq!(a.ranks(), b.ranks());
    }

    #[test]
    fn cpc_on_single_persistent_cluster_equals_spc() {
        // A drifting blob with a cut factor that never triggers, so the
        // whole set stays one persistent cluster and the per-cluster run
        // must coincide with plain spc.
        let mut rng = lcg(31);
        let mut frames = Vec::new();
        let mut center = Point::new(0.0, 0.0);
        let offsets: Vec<Point> = (0..12)
            .map(|_| Point::new(rng() - 0.5, (rng() - 0.5) * 0.4))
            .collect();
        for _ in 0..30 {
            center = center + Point::new(0.05, 0.02);
            frames.push(offsets.iter().map(|&o| center + o).collect());
        }
        let ds = ds_from_frames(frames);
        let never_cut = 1e18;
        for t in 0..ds.frame_count() {
            let parts = cut_clusters(&clc_tree(ds.frame(t)), never_cut);
            assert_eq!(parts.len(), 1, "frame {t} should stay one cluster");
        }
        let cfg = SpcConfig::new(0.5).unwrap();
        let spc = spc_order(&ds, cfg).unwrap();
        let cpc = cpc_order(&ds, cfg, never_cut).unwrap();
        assert_eq!(spc.ranks(), cpc.ranks());
    }

    #[test]
    fn cpc_separated_static_clusters_never_interleave() {
        let left: Vec<Point> = (0..5).map(|i| Point::new(i as f64 * 0.1, 0.0)).collect();
        let right: Vec<Point> = (0..5)
            .map(|i| Point::new(100.0 + i as f64 * 0.1, 0.0))
            .collect();
        let frame: Vec<Point> = left.iter().chain(right.iter()).copied().collect();
        let ds = ds_from_frames(vec![frame.clone(), frame]);
        let ord = cpc_order(&ds, SpcConfig::new(0.5).unwrap(), 2.0).unwrap();
        for t in 0..2 {
            let ranks = ord.ranks_at(t);
            let max_left = (0..5).map(|e| ranks[e]).max().unwrap();
            let min_right = (5..10).map(|e| ranks[e]).min().unwrap();
            assert!(max_left < min_right);
        }
    }

    #[test]
    fn cpc_keeps_cut_clusters_contiguous() {
        // Three drifting blobs; contiguity of every cut cluster in the
        // ranking is checked structurally against an independent re-cut.
        let mut rng = lcg(77);
        let centers = [
            Point::new(0.0, 0.0),
            Point::new(50.0, 5.0),
            Point::new(25.0, 60.0),
        ];
        let offsets: Vec<Vec<Point>> = (0..3)
            .map(|_| {
                (0..6)
                    .map(|_| Point::new(rng() * 4.0 - 2.0, rng() * 4.0 - 2.0))
                    .collect()
            })
            .collect();
        let frames: Vec<Vec<Point>> = (0..25)
            .map(|t| {
                let drift = Point::new(t as f64 * 0.3, (t as f64 * 0.17).sin());
                (0..3)
                    .flat_map(|c| {
                        offsets[c]
                            .iter()
                            .map(move |&o| centers[c] + o + drift * ((c + 1) as f64))
                    })
                    .collect()
            })
            .collect();
        let ds = ds_from_frames(frames);
        let ord = cpc_order(&ds, SpcConfig::new(0.5).unwrap(), 2.0).unwrap();
        for t in 0..ds.frame_count() {
            let parts = cut_clusters(&clc_tree(ds.frame(t)), 2.0);
            let ranks = ord.ranks_at(t);
            for part in &parts {
                let mut rs: Vec<usize> = part.iter().map(|&e| ranks[e]).collect();
                rs.sort_unstable();
                for w in rs.windows(2) {
                    assert_eq!(w[1], w[0] + 1, "cluster not contiguous at frame {t}");
                }
            }
        }
    }
}

//! Spatial-quality and stability metrics for per-frame orderings.
//!
//! Spatial quality asks how well one frame's ordering preserves the frame's
//! 2D nearest-neighbor structure (KSra, KSdi); stability asks how much two
//! consecutive orderings differ (JMP, CRS, KSte). All Keys Similarity
//! variants share the tie-aware rank value: both neighbors at rank
//! difference `d` count as `2d - 1`, so no arbitrary tie-breaking is needed.
//! Lower is better for every metric here.

use crate::dataset::{invert_permutation, OrderingSummary, TrajectoryDataset};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::neighbors::k_nearest;
use rayon::prelude::*;

/// Neighborhood size for the Keys Similarity metrics.
#[derive(Clone, Copy, Debug)]
pub struct NeighborSpec {
    pub k: usize,
}

pub const DEFAULT_NEIGHBOR_K: usize = 10;

impl Default for NeighborSpec {
    fn default() -> Self {
        NeighborSpec {
            k: DEFAULT_NEIGHBOR_K,
        }
    }
}

impl NeighborSpec {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Validation("neighbor count must be positive".into()));
        }
        Ok(NeighborSpec { k })
    }

    /// `k` clamped to `n - 1` usable neighbors.
    pub fn effective_k(&self, n: usize) -> usize {
        self.k.min(n.saturating_sub(1))
    }
}

/// Tie-aware rank value: both nodes at rank difference `d` are worth
/// `2d - 1`.
pub fn tie_rank_value(d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::Validation(
            "rank difference 0 is a point paired with itself".into(),
        ));
    }
    Ok((2 * d - 1) as f64)
}

fn tie_value(d: usize) -> f64 {
    debug_assert!(d >= 1);
    (2 * d - 1) as f64
}

fn harmonic(k: usize) -> f64 {
    (1..=k).map(|j| 1.0 / j as f64).sum()
}

/// Rank-weighted Keys Similarity: neighbor `j` of each point weighs `1/j`,
/// its value is the tie rank of the rank difference; normalized by `n * H_k`.
pub fn ksra(frame: &[Point], ranking: &[usize], spec: NeighborSpec) -> Result<f64> {
    let knn = k_nearest(frame, spec.effective_k(frame.len()));
    ksra_with_neighbors(&knn, ranking)
}

pub(crate) fn ksra_with_neighbors(knn: &[Vec<usize>], ranking: &[usize]) -> Result<f64> {
    let n = knn.len();
    if n < 2 {
        return Err(Error::Validation("metrics need at least two entities".into()));
    }
    let k = knn[0].len();
    let mut numerator = 0.0;
    for (i, nbs) in knn.iter().enumerate() {
        for (j0, &nb) in nbs.iter().enumerate() {
            let d = ranking[i].abs_diff(ranking[nb]);
            numerator += tie_value(d) / (j0 + 1) as f64;
        }
    }
    Ok(numerator / (n as f64 * harmonic(k)))
}

/// Distance-weighted Keys Similarity: neighbor weights are inverse Euclidean
/// distances; coincident neighbors are capped at `1 / (1e-12 * diameter)`.
pub fn ksdi(frame: &[Point], ranking: &[usize], spec: NeighborSpec) -> Result<f64> {
    let knn = k_nearest(frame, spec.effective_k(frame.len()));
    ksdi_with_neighbors(frame, &knn, ranking)
}

pub(crate) fn ksdi_with_neighbors(
    frame: &[Point],
    knn: &[Vec<usize>],
    ranking: &[usize],
) -> Result<f64> {
    let n = knn.len();
    if n < 2 {
        return Err(Error::Validation("metrics need at least two entities".into()));
    }
    let cap = zero_distance_cap(frame);
    let (mut numerator, mut denominator) = (0.0, 0.0);
    for (i, nbs) in knn.iter().enumerate() {
        for &nb in nbs {
            let dist = frame[i].dist(frame[nb]);
            let w = if dist > 0.0 { (1.0 / dist).min(cap) } else { cap };
            let d = ranking[i].abs_diff(ranking[nb]);
            numerator += w * tie_value(d);
            denominator += w;
        }
    }
    Ok(numerator / denominator)
}

fn zero_distance_cap(frame: &[Point]) -> f64 {
    let diameter = crate::geom::Bounds::from_points(frame.iter().copied())
        .map(|b| b.diameter())
        .unwrap_or(0.0);
    if diameter > 0.0 {
        1.0 / (1e-12 * diameter)
    } else {
        1.0
    }
}

/// Per-entity share of the frame's KSdi value; the shares sum to the metric.
pub fn ksdi_contributions(
    frame: &[Point],
    ranking: &[usize],
    spec: NeighborSpec,
) -> Result<Vec<f64>> {
    let knn = k_nearest(frame, spec.effective_k(frame.len()));
    let n = knn.len();
    if n < 2 {
        return Err(Error::Validation("metrics need at least two entities".into()));
    }
    let cap = zero_distance_cap(frame);
    let mut weights_total = 0.0;
    let mut per_entity = vec![0.0f64; n];
    for (i, nbs) in knn.iter().enumerate() {
        for &nb in nbs {
            let dist = frame[i].dist(frame[nb]);
            let w = if dist > 0.0 { (1.0 / dist).min(cap) } else { cap };
            let d = ranking[i].abs_diff(ranking[nb]);
            per_entity[i] += w * tie_value(d);
            weights_total += w;
        }
    }
    for v in &mut per_entity {
        *v /= weights_total;
    }
    Ok(per_entity)
}

/// Sum over entities of the absolute rank change between two orderings.
pub fn jmp(prev: &[usize], next: &[usize]) -> Result<u64> {
    check_pair(prev, next)?;
    Ok(prev
        .iter()
        .zip(next)
        .map(|(&a, &b)| a.abs_diff(b) as u64)
        .sum())
}

/// Number of entity pairs ordered oppositely in the two orderings, counted
/// by merge sort in O(n log n).
pub fn crs(prev: &[usize], next: &[usize]) -> Result<u64> {
    check_pair(prev, next)?;
    // Walk entities by prev rank; inversions in their next ranks are
    // exactly the crossing pairs.
    let by_prev = invert_permutation(prev);
    let mut seq: Vec<usize> = by_prev.into_iter().map(|e| next[e]).collect();
    let mut buf = vec![0usize; seq.len()];
    Ok(merge_count(&mut seq, &mut buf))
}

fn merge_count(seq: &mut [usize], buf: &mut [usize]) -> u64 {
    let n = seq.len();
    if n <= 1 {
        return 0;
    }
    let mid = n / 2;
    let (left, right) = seq.split_at_mut(mid);
    let mut inv = merge_count(left, &mut buf[..mid]) + merge_count(right, &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0usize, 0usize, 0usize);
    while i < left.len() && j < right.len() {
        if left[i] <= right[j] {
            buf[k] = left[i];
            i += 1;
        } else {
            buf[k] = right[j];
            inv += (left.len() - i) as u64;
            j += 1;
        }
        k += 1;
    }
    while i < left.len() {
        buf[k] = left[i];
        i += 1;
        k += 1;
    }
    while j < right.len() {
        buf[k] = right[j];
        j += 1;
        k += 1;
    }
    seq.copy_from_slice(&buf[..n]);
    inv
}

/// Kendall's tau: `1 - 2 * CRS / (n(n-1)/2)`.
pub fn kendall_tau(prev: &[usize], next: &[usize]) -> Result<f64> {
    let n = prev.len();
    if n < 2 {
        return Err(Error::Validation(
            "kendall tau needs at least two entities".into(),
        ));
    }
    let crossings = crs(prev, next)? as f64;
    let max_pairs = (n * (n - 1) / 2) as f64;
    Ok(1.0 - 2.0 * crossings / max_pairs)
}

fn check_pair(prev: &[usize], next: &[usize]) -> Result<()> {
    if prev.len() != next.len() || prev.is_empty() {
        return Err(Error::Validation(format!(
            "orderings cover different entity sets ({} vs {})",
            prev.len(),
            next.len()
        )));
    }
    Ok(())
}

/// Rank-space neighbors of each entity in the `prev` order: entities at rank
/// difference 1, 2, ... in both directions (lower rank first within a
/// difference), truncated at `k`.
fn rank_neighbors(prev: &[usize], k: usize) -> Vec<Vec<(usize, usize)>> {
    let n = prev.len();
    let order = invert_permutation(prev);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let rho = prev[i];
        let mut nbs: Vec<(usize, usize)> = Vec::with_capacity(k);
        let mut d = 1usize;
        while nbs.len() < k && d < n {
            if rho >= d {
                nbs.push((order[rho - d], d));
            }
            if nbs.len() < k && rho + d < n {
                nbs.push((order[rho + d], d));
            }
            d += 1;
        }
        out.push(nbs);
    }
    out
}

/// Temporal Keys Similarity between two orderings: neighborhoods are taken
/// in rank space of `prev`, weighted by inverse tie rank there, and valued
/// by the tie rank of the same pair in `next`. Ties are never broken; both
/// members of a rank-difference pair carry the same weight and value.
pub fn kste(prev: &[usize], next: &[usize], spec: NeighborSpec) -> Result<f64> {
    check_pair(prev, next)?;
    let n = prev.len();
    if n < 2 {
        return Err(Error::Validation("metrics need at least two entities".into()));
    }
    let k = spec.effective_k(n);
    let (mut numerator, mut denominator) = (0.0, 0.0);
    for (i, nbs) in rank_neighbors(prev, k).iter().enumerate() {
        for &(nb, d_prev) in nbs {
            let w = 1.0 / tie_value(d_prev);
            let d_next = next[i].abs_diff(next[nb]);
            numerator += w * tie_value(d_next);
            denominator += w;
        }
    }
    Ok(numerator / denominator)
}

/// Per-entity excess of KSte over its perfectly stable value (the value each
/// neighborhood would score if `next` equaled `prev`); zero when nothing
/// moved. Shares can be slightly negative for individual entities whose
/// neighborhoods tightened; the total excess equals
/// `KSte(prev, next) - KSte(prev, prev)` scaled per entity.
pub fn kste_excess_contributions(
    prev: &[usize],
    next: &[usize],
    spec: NeighborSpec,
) -> Result<Vec<f64>> {
    check_pair(prev, next)?;
    let n = prev.len();
    let k = spec.effective_k(n);
    let mut weights_total = 0.0;
    let mut per_entity = vec![0.0f64; n];
    for (i, nbs) in rank_neighbors(prev, k).iter().enumerate() {
        for &(nb, d_prev) in nbs {
            let w = 1.0 / tie_value(d_prev);
            let d_next = next[i].abs_diff(next[nb]);
            per_entity[i] += w * (tie_value(d_next) - tie_value(d_prev));
            weights_total += w;
        }
    }
    for v in &mut per_entity {
        *v /= weights_total;
    }
    Ok(per_entity)
}

/// Summary statistics of a metric series; stddev is the population form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub max: f64,
    pub min: f64,
    pub stddev: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Some(Summary {
            mean,
            max,
            min,
            stddev: var.sqrt(),
        })
    }
}

/// A named per-frame (spatial) or per-transition (stability) series.
#[derive(Clone, Debug)]
pub struct MetricSeries {
    pub name: String,
    /// One value per frame for spatial metrics, per consecutive transition
    /// for stability metrics.
    pub values: Vec<f64>,
    pub summary: Option<Summary>,
}

impl MetricSeries {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> MetricSeries {
        let summary = Summary::of(&values);
        MetricSeries {
            name: name.into(),
            values,
            summary,
        }
    }
}

pub const SPATIAL_METRICS: [&str; 2] = ["ksra", "ksdi"];
pub const STABILITY_METRICS: [&str; 3] = ["jmp", "crs", "kste"];

/// Evaluate every metric for an ordering of a dataset: KSra and KSdi per
/// frame, JMP, CRS, and KSte per consecutive transition, each with summary
/// statistics. A single-frame dataset yields empty stability series.
pub fn evaluate(
    ds: &TrajectoryDataset,
    ord: &OrderingSummary,
    spec: NeighborSpec,
) -> Result<Vec<MetricSeries>> {
    if ord.frame_count() != ds.frame_count() || ord.entity_count() != ds.entity_count() {
        return Err(Error::Contract(format!(
            "ordering shape ({} frames, {} entities) does not match dataset ({}, {})",
            ord.frame_count(),
            ord.entity_count(),
            ds.frame_count(),
            ds.entity_count()
        )));
    }
    let t_len = ds.frame_count();

    let spatial: Vec<(f64, f64)> = (0..t_len)
        .into_par_iter()
        .map(|t| {
            let frame = ds.frame(t);
            let knn = k_nearest(frame, spec.effective_k(frame.len()));
            let ra = ksra_with_neighbors(&knn, ord.ranks_at(t))?;
            let di = ksdi_with_neighbors(frame, &knn, ord.ranks_at(t))?;
            Ok((ra, di))
        })
        .collect::<Result<Vec<_>>>()?;

    let stability: Vec<(f64, f64, f64)> = (1..t_len)
        .into_par_iter()
        .map(|t| {
            let prev = ord.ranks_at(t - 1);
            let next = ord.ranks_at(t);
            Ok((
                jmp(prev, next)? as f64,
                crs(prev, next)? as f64,
                kste(prev, next, spec)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(vec![
        MetricSeries::new("ksra", spatial.iter().map(|v| v.0).collect()),
        MetricSeries::new("ksdi", spatial.iter().map(|v| v.1).collect()),
        MetricSeries::new("jmp", stability.iter().map(|v| v.0).collect()),
        MetricSeries::new("crs", stability.iter().map(|v| v.1).collect()),
        MetricSeries::new("kste", stability.iter().map(|v| v.2).collect()),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> Vec<Point> {
        xs.iter().map(|&x| Point::new(x, 0.0)).collect()
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

    fn random_permutation(n: usize, rng: &mut impl FnMut() -> f64) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = (rng() * (i + 1) as f64) as usize;
            perm.swap(i, j.min(i));
        }
        perm
    }

    #[test]
    fn tie_rank_values() {
        assert_eq!(tie_rank_value(1).unwrap(), 1.0);
        assert_eq!(tie_rank_value(2).unwrap(), 3.0);
        assert_eq!(tie_rank_value(5).unwrap(), 9.0);
        assert!(tie_rank_value(0).is_err());
    }

    #[test]
    fn ksra_hand_value_on_collinear_triple() {
        let frame = line(&[0.0, 1.0, 3.0]);
        let identity = vec![0, 1, 2];
        let v = ksra(&frame, &identity, NeighborSpec { k: 2 }).unwrap();
        assert!((v - 13.0 / 9.0).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn ksdi_hand_value_on_collinear_triple() {
        let frame = line(&[0.0, 1.0, 3.0]);
        let identity = vec![0, 1, 2];
        let v = ksdi(&frame, &identity, NeighborSpec { k: 2 }).unwrap();
        assert!((v - 15.0 / 11.0).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn perfect_line_order_scores_one_at_k1() {
        let frame = line(&[0.0, 1.0, 2.5, 4.0, 6.0]);
        let identity = vec![0, 1, 2, 3, 4];
        let spec = NeighborSpec { k: 1 };
        assert!((ksra(&frame, &identity, spec).unwrap() - 1.0).abs() < 1e-12);
        assert!((ksdi(&frame, &identity, spec).unwrap() - 1.0).abs() < 1e-12);
    }

    /// Independent direct-sum oracle: literal formula evaluation with its own
    /// neighbor search over the full distance matrix.
    fn ks_oracle(frame: &[Point], ranking: &[usize], k: usize, by_rank: bool) -> f64 {
        let n = frame.len();
        let k = k.min(n - 1);
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..n {
            let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            order.sort_by(|&a, &b| {
                frame[i]
                    .dist(frame[a])
                    .partial_cmp(&frame[i].dist(frame[b]))
                    .unwrap()
                    .then(a.cmp(&b))
            });
            for j in 1..=k {
                let nb = order[j - 1];
                let r = (2 * ranking[i].abs_diff(ranking[nb]) - 1) as f64;
                let w = if by_rank {
                    1.0 / j as f64
                } else {
                    1.0 / frame[i].dist(frame[nb])
                };
                num += w * r;
                den += w;
            }
        }
        num / den
    }

    #[test]
    fn ks_metrics_match_direct_sum_oracle() {
        let mut rng = lcg(12);
        for _ in 0..25 {
            let frame: Vec<Point> = (0..7)
                .map(|_| Point::new(rng() * 5.0, rng() * 5.0))
                .collect();
            let ranking = random_permutation(7, &mut rng);
            for k in [1usize, 2, 3, 6] {
                let spec = NeighborSpec { k };
                let ra = ksra(&frame, &ranking, spec).unwrap();
                let di = ksdi(&frame, &ranking, spec).unwrap();
                assert!((ra - ks_oracle(&frame, &ranking, k, true)).abs() < 1e-12);
                assert!((di - ks_oracle(&frame, &ranking, k, false)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ks_invariances() {
        let mut rng = lcg(13);
        let frame: Vec<Point> = (0..9)
            .map(|_| Point::new(rng() * 5.0, rng() * 5.0))
            .collect();
        let ranking = random_permutation(9, &mut rng);
        let spec = NeighborSpec { k: 4 };
        let shifted: Vec<Point> = frame
            .iter()
            .map(|p| *p + Point::new(123.0, -55.5))
            .collect();
        let scaled: Vec<Point> = frame.iter().map(|p| *p * 17.0).collect();
        assert!(
            (ksra(&frame, &ranking, spec).unwrap() - ksra(&shifted, &ranking, spec).unwrap())
                .abs()
                < 1e-12
        );
        assert!(
            (ksdi(&frame, &ranking, spec).unwrap() - ksdi(&shifted, &ranking, spec).unwrap())
                .abs()
                < 1e-12
        );
        assert!(
            (ksdi(&frame, &ranking, spec).unwrap() - ksdi(&scaled, &ranking, spec).unwrap())
                .abs()
                < 1e-9
        );
    }

    #[test]
    fn jmp_examples() {
        assert_eq!(jmp(&[0, 1, 2, 3], &[0, 1, 2, 3]).unwrap(), 0);
        assert_eq!(jmp(&[0, 1, 2, 3], &[1, 0, 3, 2]).unwrap(), 4);
        // Full reversal of n = 4 sums to 8 (the literal formula).
        assert_eq!(jmp(&[0, 1, 2, 3], &[3, 2, 1, 0]).unwrap(), 8);
        assert!(jmp(&[0, 1], &[0, 1, 2]).is_err());
    }

    #[test]
    fn crs_examples_and_brute_force() {
        assert_eq!(crs(&[0, 1, 2, 3], &[0, 1, 2, 3]).unwrap(), 0);
        assert_eq!(crs(&[0, 1, 2, 3], &[3, 2, 1, 0]).unwrap(), 6);

        let brute = |prev: &[usize], next: &[usize]| -> u64 {
            let n = prev.len();
            let mut count = 0u64;
            for i in 0..n {
                for j in (i + 1)..n {
                    let before = prev[i] < prev[j];
                    let after = next[i] < next[j];
                    if before != after {
                        count += 1;
                    }
                }
            }
            count
        };
        let mut rng = lcg(14);
        for _ in 0..50 {
            let n = 2 + (rng() * 39.0) as usize;
            let prev = random_permutation(n, &mut rng);
            let next = random_permutation(n, &mut rng);
            assert_eq!(crs(&prev, &next).unwrap(), brute(&prev, &next));
            // CRS is symmetric and bounded by n(n-1)/2.
            assert_eq!(crs(&prev, &next).unwrap(), crs(&next, &prev).unwrap());
            assert!(crs(&prev, &next).unwrap() <= (n * (n - 1) / 2) as u64);
        }
    }

    #[test]
    fn crs_zero_implies_jmp_zero() {
        let mut rng = lcg(15);
        for _ in 0..50 {
            let n = 2 + (rng() * 20.0) as usize;
            let prev = random_permutation(n, &mut rng);
            let next = random_permutation(n, &mut rng);
            let c = crs(&prev, &next).unwrap();
            let j = jmp(&prev, &next).unwrap();
            if c == 0 {
                assert_eq!(j, 0);
            }
            if j == 0 {
                assert_eq!(c, 0);
            }
        }
    }

    #[test]
    fn kendall_tau_relation() {
        assert_eq!(kendall_tau(&[0, 1, 2, 3], &[0, 1, 2, 3]).unwrap(), 1.0);
        assert_eq!(kendall_tau(&[0, 1, 2, 3], &[3, 2, 1, 0]).unwrap(), -1.0);
        // CRS = 3 out of 6 pairs -> tau = 0.
        let prev = vec![0, 1, 2, 3];
        let next = vec![1, 3, 0, 2];
        assert_eq!(crs(&prev, &next).unwrap(), 3);
        assert_eq!(kendall_tau(&prev, &next).unwrap(), 0.0);
        assert!(kendall_tau(&[0], &[0]).is_err());
    }

    #[test]
    fn kste_hand_value_identical_orders_n3_k2() {
        let id = vec![0, 1, 2];
        let v = kste(&id, &id, NeighborSpec { k: 2 }).unwrap();
        assert!((v - 9.0 / 7.0).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn kste_identical_orders_attain_brute_force_minimum() {
        fn all_perms(n: usize) -> Vec<Vec<usize>> {
            let mut items: Vec<usize> = (0..n).collect();
            let mut out = Vec::new();
            fn heap(k: usize, items: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
                if k == 1 {
                    out.push(items.clone());
                    return;
                }
                for i in 0..k {
                    heap(k - 1, items, out);
                    if k % 2 == 0 {
                        items.swap(i, k - 1);
                    } else {
                        items.swap(0, k - 1);
                    }
                }
            }
            heap(n, &mut items, &mut out);
            out
        }

        for n in 2..=6usize {
            for k in [1usize, 2, 3, 5] {
                let spec = NeighborSpec { k };
                let id: Vec<usize> = (0..n).collect();
                let at_identity = kste(&id, &id, spec).unwrap();
                let min_over_perms = all_perms(n)
                    .into_iter()
                    .map(|next| kste(&id, &next, spec).unwrap())
                    .fold(f64::INFINITY, f64::min);
                assert!(
                    (at_identity - min_over_perms).abs() < 1e-12,
                    "n={n} k={k}: identity {at_identity} vs min {min_over_perms}"
                );
            }
        }
    }

    #[test]
    fn kste_of_full_reversal_equals_identity_value() {
        for n in [3usize, 5, 8] {
            let id: Vec<usize> = (0..n).collect();
            let rev: Vec<usize> = (0..n).rev().collect();
            let spec = NeighborSpec { k: 3 };
            let a = kste(&id, &id, spec).unwrap();
            let b = kste(&id, &rev, spec).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn kste_excess_is_zero_for_identical_orders() {
        let id: Vec<usize> = (0..7).collect();
        let exc = kste_excess_contributions(&id, &id, NeighborSpec { k: 3 }).unwrap();
        assert!(exc.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn evaluate_fxd_is_perfectly_stable() {
        let mut rng = lcg(16);
        let frames: Vec<Vec<Point>> = (0..6)
            .map(|_| (0..8).map(|_| Point::new(rng() * 3.0, rng() * 3.0)).collect())
            .collect();
        let ds = TrajectoryDataset::new(
            (0..8).map(|i| format!("e{i}")).collect(),
            frames,
            None,
        )
        .unwrap();
        let ord = ds.fxd_order();
        let series = evaluate(&ds, &ord, NeighborSpec { k: 3 }).unwrap();
        let by_name = |n: &str| series.iter().find(|s| s.name == n).unwrap();
        assert!(by_name("jmp").values.iter().all(|&v| v == 0.0));
        assert!(by_name("crs").values.iter().all(|&v| v == 0.0));
        // KSte of identical orders is constant at its minimum.
        let kste_vals = &by_name("kste").values;
        assert!(kste_vals.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-12));
    }

    #[test]
    fn evaluate_single_frame_has_empty_stability_series() {
        let ds = TrajectoryDataset::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![line(&[0.0, 1.0, 2.0])],
            None,
        )
        .unwrap();
        let series = evaluate(&ds, &ds.fxd_order(), NeighborSpec { k: 2 }).unwrap();
        let by_name = |n: &str| series.iter().find(|s| s.name == n).unwrap();
        assert_eq!(by_name("ksra").values.len(), 1);
        assert!(by_name("jmp").values.is_empty());
        assert!(by_name("jmp").summary.is_none());
    }

    #[test]
    fn summary_mean_is_exact_arithmetic_mean() {
        let values = vec![1.5, 2.25, -3.0, 8.125];
        let s = Summary::of(&values).unwrap();
        let mean = values.iter().sum::<f64>() / 4.0;
        assert_eq!(s.mean, mean);
        assert_eq!(s.max, 8.125);
        assert_eq!(s.min, -3.0);
    }
}

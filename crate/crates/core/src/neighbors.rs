//! Shared k-nearest-neighbor machinery.

use crate::geom::Point;

/// For every point, its `k` nearest neighbors by Euclidean distance,
/// ascending, ties broken by entity index ascending. `k` is clamped to
/// `n - 1`; the point itself is never its own neighbor.
pub fn k_nearest(frame: &[Point], k: usize) -> Vec<Vec<usize>> {
    let n = frame.len();
    let k = k.min(n.saturating_sub(1));
    let mut result = Vec::with_capacity(n);
    let mut others: Vec<usize> = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n {
        others.clear();
        others.extend((0..n).filter(|&j| j != i));
        others.sort_by(|&a, &b| {
            frame[i]
                .dist_sq(frame[a])
                .partial_cmp(&frame[i].dist_sq(frame[b]))
                .expect("finite coordinates")
                .then(a.cmp(&b))
        });
        others.truncate(k);
        result.push(others.clone());
    }
    result
}

//! Core data model: moving-point datasets and per-frame orderings.
//!
//! A [`TrajectoryDataset`] holds the positions of `n` entities over `T`
//! frames; every entity is present in every frame. An [`OrderingSummary`]
//! holds one permutation of the entities per frame, optionally backed by the
//! real-valued 1D coordinates that produced it.

use crate::error::{Error, Result};
use crate::geom::{Bounds, Point};

/// `n` entities sampled at `T` consecutive frames of 2D positions.
#[derive(Clone, Debug)]
pub struct TrajectoryDataset {
    entity_ids: Vec<String>,
    /// `frames[t][i]` is the position of entity `i` at frame `t`.
    frames: Vec<Vec<Point>>,
    frame_rate: Option<f64>,
    bounds: Bounds,
}

impl TrajectoryDataset {
    /// Build a dataset, validating shape and finiteness and computing the
    /// global bounding box.
    pub fn new(
        entity_ids: Vec<String>,
        frames: Vec<Vec<Point>>,
        frame_rate: Option<f64>,
    ) -> Result<Self> {
        let n = entity_ids.len();
        if n == 0 {
            return Err(Error::Validation("dataset needs at least one entity".into()));
        }
        if frames.is_empty() {
            return Err(Error::Validation("dataset needs at least one frame".into()));
        }
        let mut bounds: Option<Bounds> = None;
        for (t, frame) in frames.iter().enumerate() {
            if frame.len() != n {
                return Err(Error::Integrity(format!(
                    "frame {t} has {} positions, expected {n}",
                    frame.len()
                )));
            }
            for (i, p) in frame.iter().enumerate() {
                if !p.is_finite() {
                    return Err(Error::Validation(format!(
                        "non-finite coordinate for entity {:?} at frame {t}",
                        entity_ids[i]
                    )));
                }
                match &mut bounds {
                    Some(b) => b.expand(*p),
                    None => bounds = Some(Bounds::new(*p, *p)),
                }
            }
        }
        Ok(TrajectoryDataset {
            entity_ids,
            frames,
            frame_rate,
            bounds: bounds.expect("nonempty frames"),
        })
    }

    /// Number of entities `n`.
    pub fn entity_count(&self) -> usize {
        self.entity_ids.len()
    }

    /// Number of frames `T`.
    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    pub fn entity_ids(&self) -> &[String] {
        &self.entity_ids
    }

    pub fn frame(&self, t: usize) -> &[Point] {
        &self.frames[t]
    }

    pub fn frames(&self) -> &[Vec<Point>] {
        &self.frames
    }

    pub fn position(&self, t: usize, entity: usize) -> Point {
        self.frames[t][entity]
    }

    pub fn frame_rate(&self) -> Option<f64> {
        self.frame_rate
    }

    /// Global axis-aligned bounding box over all frames.
    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    /// Affinely map all positions so the global bounding box fits `[0,1]^2`
    /// with the aspect ratio preserved and the shorter axis centered.
    ///
    /// Scale- and translation-invariant ordering methods produce the same
    /// ranking on the normalized set as on the original.
    pub fn normalize(&self) -> Result<TrajectoryDataset> {
        let b = self.bounds;
        let (w, h) = (b.width(), b.height());
        let extent = w.max(h);
        if extent <= 0.0 {
            return Err(Error::DegenerateInput(
                "all positions identical; bounding box has zero extent in both axes".into(),
            ));
        }
        let scale = 1.0 / extent;
        let off_x = (1.0 - w * scale) * 0.5;
        let off_y = (1.0 - h * scale) * 0.5;
        let frames = self
            .frames
            .iter()
            .map(|frame| {
                frame
                    .iter()
                    .map(|p| {
                        Point::new(
                            (p.x - b.min.x) * scale + off_x,
                            (p.y - b.min.y) * scale + off_y,
                        )
                    })
                    .collect()
            })
            .collect();
        TrajectoryDataset::new(self.entity_ids.clone(), frames, self.frame_rate)
    }

    /// The baseline fixed ordering: every frame keeps the entity input order.
    pub fn fxd_order(&self) -> OrderingSummary {
        let n = self.entity_count();
        let ranks = vec![(0..n).collect::<Vec<_>>(); self.frame_count()];
        OrderingSummary::from_ranks(ranks, "fxd").expect("identity is a permutation")
    }
}

/// Per-frame permutations of the entities, optionally with the 1D coordinates
/// that generated them.
#[derive(Clone, Debug)]
pub struct OrderingSummary {
    /// `ranks[t][i]` is the rank of entity `i` at frame `t`, in `[0, n)`.
    ranks: Vec<Vec<usize>>,
    /// `coords[t][i]` is the 1D coordinate of entity `i` at frame `t`.
    coords: Option<Vec<Vec<f64>>>,
    method_tag: String,
}

impl OrderingSummary {
    /// Build from explicit rank arrays; every frame must be a permutation.
    pub fn from_ranks(ranks: Vec<Vec<usize>>, method_tag: impl Into<String>) -> Result<Self> {
        if ranks.is_empty() {
            return Err(Error::Validation("ordering needs at least one frame".into()));
        }
        let n = ranks[0].len();
        for (t, frame) in ranks.iter().enumerate() {
            if frame.len() != n {
                return Err(Error::Integrity(format!(
                    "rank frame {t} has length {}, expected {n}",
                    frame.len()
                )));
            }
            if !is_permutation(frame) {
                return Err(Error::Integrity(format!(
                    "rank frame {t} is not a permutation of 0..{n}"
                )));
            }
        }
        Ok(OrderingSummary {
            ranks,
            coords: None,
            method_tag: method_tag.into(),
        })
    }

    /// Build from per-frame 1D coordinates. Ranks follow ascending
    /// coordinate; ties are broken by entity index ascending.
    pub fn from_coords(coords: Vec<Vec<f64>>, method_tag: impl Into<String>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Validation("ordering needs at least one frame".into()));
        }
        let n = coords[0].len();
        let mut ranks = Vec::with_capacity(coords.len());
        for (t, frame) in coords.iter().enumerate() {
            if frame.len() != n {
                return Err(Error::Integrity(format!(
                    "coordinate frame {t} has length {}, expected {n}",
                    frame.len()
                )));
            }
            if let Some(i) = frame.iter().position(|c| !c.is_finite()) {
                return Err(Error::Numerical {
                    frame: t,
                    msg: format!("non-finite 1D coordinate for entity {i}"),
                });
            }
            ranks.push(rank_by_coord(frame));
        }
        Ok(OrderingSummary {
            ranks,
            coords: Some(coords),
            method_tag: method_tag.into(),
        })
    }

    pub fn with_method_tag(mut self, tag: impl Into<String>) -> Self {
        self.method_tag = tag.into();
        self
    }

    pub fn entity_count(&self) -> usize {
        self.ranks[0].len()
    }

    pub fn frame_count(&self) -> usize {
        self.ranks.len()
    }

    pub fn method_tag(&self) -> &str {
        &self.method_tag
    }

    /// Rank of entity `i` at frame `t`.
    pub fn rank(&self, t: usize, entity: usize) -> usize {
        self.ranks[t][entity]
    }

    /// Rank array of frame `t`, indexed by entity.
    pub fn ranks_at(&self, t: usize) -> &[usize] {
        &self.ranks[t]
    }

    pub fn ranks(&self) -> &[Vec<usize>] {
        &self.ranks
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    /// Entities of frame `t` listed in rank order (the inverse permutation).
    pub fn order_at(&self, t: usize) -> Vec<usize> {
        invert_permutation(&self.ranks[t])
    }
}

/// Ranks for one frame of 1D coordinates: ascending coordinate, ties broken
/// by entity index ascending.
pub fn rank_by_coord(coords: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..coords.len()).collect();
    order.sort_by(|&a, &b| {
        coords[a]
            .partial_cmp(&coords[b])
            .expect("finite coordinates")
            .then(a.cmp(&b))
    });
    invert_permutation(&order)
}

/// `out[perm[i]] = i`; works both directions between rank and order arrays.
pub fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0usize; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

fn is_permutation(ranks: &[usize]) -> bool {
    let n = ranks.len();
    let mut seen = vec![false; n];
    for &r in ranks {
        if r >= n || seen[r] {
            return false;
        }
        seen[r] = true;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_dataset() -> TrajectoryDataset {
        TrajectoryDataset::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0)],
                vec![Point::new(0.0, 1.0), Point::new(1.0, 1.0), Point::new(2.0, 1.0)],
            ],
            None,
        )
        .unwrap()
    }

    #[test]
    fn fxd_is_identity_every_frame() {
        let ds = toy_dataset();
        let ord = ds.fxd_order();
        assert_eq!(ord.ranks_at(0), &[0, 1, 2]);
        assert_eq!(ord.ranks_at(1), &[0, 1, 2]);
        assert!(ord.coords().is_none());
    }

    #[test]
    fn normalize_centers_shorter_axis() {
        // Points spanning [0,10] x [0,5] map into [0,1] x [0.25,0.75].
        let ds = TrajectoryDataset::new(
            vec!["a".into(), "b".into()],
            vec![vec![Point::new(0.0, 0.0), Point::new(10.0, 5.0)]],
            None,
        )
        .unwrap();
        let norm = ds.normalize().unwrap();
        let b = norm.bounds();
        assert!((b.min.x - 0.0).abs() < 1e-12);
        assert!((b.max.x - 1.0).abs() < 1e-12);
        assert!((b.min.y - 0.25).abs() < 1e-12);
        assert!((b.max.y - 0.75).abs() < 1e-12);
    }

    #[test]
    fn normalize_is_idempotent() {
        let ds = TrajectoryDataset::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![
                Point::new(-3.0, 2.0),
                Point::new(7.5, 4.0),
                Point::new(1.0, -8.0),
            ]],
            None,
        )
        .unwrap();
        let once = ds.normalize().unwrap();
        let twice = once.normalize().unwrap();
        for t in 0..once.frame_count() {
            for i in 0..once.entity_count() {
                let d = once.position(t, i) - twice.position(t, i);
                assert!(d.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn normalize_rejects_degenerate_input() {
        let ds = TrajectoryDataset::new(
            vec!["a".into(), "b".into()],
            vec![vec![Point::new(2.0, 2.0), Point::new(2.0, 2.0)]],
            None,
        )
        .unwrap();
        assert!(matches!(ds.normalize(), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn coords_reproduce_ranks_with_entity_tie_break() {
        let ord = OrderingSummary::from_coords(vec![vec![0.5, 0.5, -1.0]], "t").unwrap();
        // Entity 2 first, then ties 0 and 1 broken by entity index.
        assert_eq!(ord.ranks_at(0), &[1, 2, 0]);
        assert_eq!(ord.order_at(0), vec![2, 0, 1]);
    }

    #[test]
    fn from_ranks_rejects_non_permutation() {
        assert!(OrderingSummary::from_ranks(vec![vec![0, 0, 2]], "t").is_err());
        assert!(OrderingSummary::from_ranks(vec![vec![0, 3, 1]], "t").is_err());
    }

    #[test]
    fn rejects_non_finite_positions() {
        let r = TrajectoryDataset::new(
            vec!["a".into()],
            vec![vec![Point::new(f64::NAN, 0.0)]],
            None,
        );
        assert!(matches!(r, Err(Error::Validation(_))));
    }
}

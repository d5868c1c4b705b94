//! Orderings from spatial subdivisions and space-filling curves.
//!
//! All four methods are per-frame pure functions on a point set: Hilbert and
//! Z-order curves over a quantization grid, a point quadtree, and a Guttman
//! R-tree, each linearized by a depth-first traversal. Coordinates follow
//! the data convention (y grows north); image-space flipping is a rendering
//! concern.

use crate::dataset::rank_by_coord;
use crate::error::{Error, Result};
use crate::geom::{Bounds, Point};

/// Quantization grid for the curve-based orderings: `2^bits x 2^bits` cells
/// covering `frame_box`.
#[derive(Clone, Copy, Debug)]
pub struct GridDiscretization {
    bits: u32,
    frame_box: Bounds,
}

pub const DEFAULT_CURVE_BITS: u32 = 16;

impl GridDiscretization {
    pub fn new(bits: u32, frame_box: Bounds) -> Result<Self> {
        if !(1..=31).contains(&bits) {
            return Err(Error::Validation(format!(
                "grid resolution exponent must be in [1, 31], got {bits}"
            )));
        }
        Ok(GridDiscretization { bits, frame_box })
    }

    /// Grid covering the frame's own bounding box.
    pub fn for_frame(bits: u32, frame: &[Point]) -> Result<Self> {
        let frame_box = Bounds::from_points(frame.iter().copied())
            .ok_or_else(|| Error::Validation("empty frame".into()))?;
        Self::new(bits, frame_box)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Cell coordinates of a point, clamped to the grid.
    pub fn quantize(&self, p: Point) -> (u32, u32) {
        let cells = 1u64 << self.bits;
        let axis = |v: f64, min: f64, extent: f64| -> u32 {
            if extent <= 0.0 {
                return 0;
            }
            let raw = ((v - min) / extent * cells as f64).floor();
            raw.clamp(0.0, (cells - 1) as f64) as u32
        };
        (
            axis(p.x, self.frame_box.min.x, self.frame_box.width()),
            axis(p.y, self.frame_box.min.y, self.frame_box.height()),
        )
    }
}

/// Hilbert curve index of a grid cell. The base orientation visits the four
/// order-1 quadrants as SW, NW, NE, SE (with y up).
pub fn hilbert_index(mut x: u32, mut y: u32, bits: u32) -> u64 {
    let mut d: u64 = 0;
    let mut s = 1u32 << (bits - 1);
    while s > 0 {
        let rx = u32::from(x & s > 0);
        let ry = u32::from(y & s > 0);
        d += (s as u64) * (s as u64) * ((3 * rx) ^ ry) as u64;
        // Keep the within-quadrant bits, then rotate/flip the quadrant.
        x &= s - 1;
        y &= s - 1;
        if ry == 0 {
            if rx == 1 {
                x = s - 1 - x;
                y = s - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        s >>= 1;
    }
    d
}

/// Morton (Z-order) index of a grid cell with quadrant order NW, NE, SW, SE:
/// the north half (larger y) gets the smaller index, so the row bit is taken
/// from the flipped y coordinate and interleaved above the column bit.
pub fn zorder_index(x: u32, y: u32, bits: u32) -> u64 {
    let flipped_y = ((1u64 << bits) - 1) as u32 - y;
    let mut d: u64 = 0;
    for level in (0..bits).rev() {
        let row = (flipped_y >> level) & 1;
        let col = (x >> level) & 1;
        d = (d << 2) | ((row as u64) << 1) | col as u64;
    }
    d
}

/// Ranking of a frame by Hilbert curve position; ties (same cell) broken by
/// entity index. Returns `ranks[i]` = rank of entity `i`.
pub fn hilbert_order(frame: &[Point], disc: &GridDiscretization) -> Vec<usize> {
    rank_by_curve(frame, |p| {
        let (x, y) = disc.quantize(p);
        hilbert_index(x, y, disc.bits())
    })
}

/// Ranking of a frame by Z-order curve position; ties broken by entity index.
pub fn zorder_order(frame: &[Point], disc: &GridDiscretization) -> Vec<usize> {
    rank_by_curve(frame, |p| {
        let (x, y) = disc.quantize(p);
        zorder_index(x, y, disc.bits())
    })
}

fn rank_by_curve(frame: &[Point], index_of: impl Fn(Point) -> u64) -> Vec<usize> {
    let keys: Vec<f64> = frame.iter().map(|&p| index_of(p) as f64).collect();
    rank_by_coord(&keys)
}

// ---------------------------------------------------------------------------
// Point quadtree
// ---------------------------------------------------------------------------

// Quadrant indices in traversal order.
const NW: usize = 0;
const NE: usize = 1;
const SW: usize = 2;
const SE: usize = 3;

struct QuadNode {
    entity: usize,
    children: [Option<Box<QuadNode>>; 4],
}

fn quadrant(split: Point, p: Point) -> usize {
    let west = p.x < split.x;
    let north = p.y > split.y;
    match (north, west) {
        (true, true) => NW,
        (true, false) => NE,
        (false, true) => SW,
        (false, false) => SE,
    }
}

/// Ranking by depth-first traversal of a point quadtree built by inserting
/// points in entity order; every inserted point becomes a split node. Each
/// node is emitted before its children; children in NW, NE, SW, SE order.
pub fn quadtree_order(frame: &[Point]) -> Vec<usize> {
    assert!(!frame.is_empty(), "quadtree ordering needs a nonempty frame");
    let mut root = Box::new(QuadNode {
        entity: 0,
        children: [None, None, None, None],
    });
    for (entity, &p) in frame.iter().enumerate().skip(1) {
        let mut node = &mut root;
        loop {
            let q = quadrant(frame[node.entity], p);
            if node.children[q].is_some() {
                node = node.children[q].as_mut().unwrap();
            } else {
                node.children[q] = Some(Box::new(QuadNode {
                    entity,
                    children: [None, None, None, None],
                }));
                break;
            }
        }
    }

    let mut order = Vec::with_capacity(frame.len());
    let mut stack = vec![&root];
    while let Some(node) = stack.pop() {
        order.push(node.entity);
        // Push reversed so NW is visited first.
        for q in [SE, SW, NE, NW] {
            if let Some(child) = &node.children[q] {
                stack.push(child);
            }
        }
    }
    crate::dataset::invert_permutation(&order)
}

// ---------------------------------------------------------------------------
// R-tree (Guttman, quadratic split, no reinsertion)
// ---------------------------------------------------------------------------

pub const DEFAULT_RTREE_CAPACITY: usize = 8;

pub(crate) enum RNode {
    Leaf { entries: Vec<usize> },
    Internal { children: Vec<RChild> },
}

pub(crate) struct RChild {
    pub bounds: Bounds,
    pub node: Box<RNode>,
}

pub(crate) struct RTree<'a> {
    frame: &'a [Point],
    capacity: usize,
    min_fill: usize,
    pub root: RChild,
}

impl<'a> RTree<'a> {
    pub fn build(frame: &'a [Point], capacity: usize) -> RTree<'a> {
        assert!(capacity >= 2, "R-tree capacity must be at least 2");
        assert!(!frame.is_empty(), "R-tree ordering needs a nonempty frame");
        let min_fill = (capacity / 2).max(1);
        let mut tree = RTree {
            frame,
            capacity,
            min_fill,
            root: RChild {
                bounds: Bounds::new(frame[0], frame[0]),
                node: Box::new(RNode::Leaf { entries: vec![] }),
            },
        };
        for entity in 0..frame.len() {
            tree.insert(entity);
        }
        tree
    }

    fn insert(&mut self, entity: usize) {
        let p = self.frame[entity];
        let capacity = self.capacity;
        let min_fill = self.min_fill;
        let split = insert_rec(&mut self.root, p, entity, self.frame, capacity, min_fill);
        if let Some(sibling) = split {
            // Root split: grow the tree by one level.
            let old_root = std::mem::replace(
                &mut self.root,
                RChild {
                    bounds: Bounds::new(p, p),
                    node: Box::new(RNode::Leaf { entries: vec![] }),
                },
            );
            let bounds = old_root.bounds.union(sibling.bounds);
            self.root = RChild {
                bounds,
                node: Box::new(RNode::Internal {
                    children: vec![old_root, sibling],
                }),
            };
        }
    }

    /// Entities in depth-first order: child nodes visited by ascending MBR
    /// center (x, then y); points within a leaf in insertion order.
    pub fn dfs_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.frame.len());
        dfs(&self.root, &mut order);
        order
    }
}

fn insert_rec(
    child: &mut RChild,
    p: Point,
    entity: usize,
    frame: &[Point],
    capacity: usize,
    min_fill: usize,
) -> Option<RChild> {
    child.bounds.expand(p);
    match child.node.as_mut() {
        RNode::Leaf { entries } => {
            entries.push(entity);
            if entries.len() <= capacity {
                return None;
            }
            let items = std::mem::take(entries);
            let bounds_of = |e: &usize| Bounds::new(frame[*e], frame[*e]);
            let (g1, g2) = quadratic_split(items, bounds_of, min_fill);
            let make = |group: Vec<usize>| {
                let bounds = group
                    .iter()
                    .map(|&e| frame[e])
                    .fold(None::<Bounds>, |acc, p| {
                        Some(match acc {
                            Some(mut b) => {
                                b.expand(p);
                                b
                            }
                            None => Bounds::new(p, p),
                        })
                    })
                    .expect("split groups are nonempty");
                RChild {
                    bounds,
                    node: Box::new(RNode::Leaf { entries: group }),
                }
            };
            let first = make(g1);
            let second = make(g2);
            *child = first;
            Some(second)
        }
        RNode::Internal { children } => {
            let idx = choose_subtree(children, p);
            let split = insert_rec(&mut children[idx], p, entity, frame, capacity, min_fill);
            if let Some(sibling) = split {
                children.push(sibling);
                if children.len() <= capacity {
                    return None;
                }
                let items = std::mem::take(children);
                let (g1, g2) = quadratic_split(items, |c: &RChild| c.bounds, min_fill);
                let make = |group: Vec<RChild>| {
                    let bounds = group
                        .iter()
                        .map(|c| c.bounds)
                        .reduce(Bounds::union)
                        .expect("split groups are nonempty");
                    RChild {
                        bounds,
                        node: Box::new(RNode::Internal { children: group }),
                    }
                };
                let first = make(g1);
                let second = make(g2);
                *child = first;
                return Some(second);
            }
            None
        }
    }
}

/// Guttman's ChooseLeaf criterion: least area enlargement, then smallest
/// area, then lowest child index.
fn choose_subtree(children: &[RChild], p: Point) -> usize {
    let mut best = 0;
    let mut best_enlargement = f64::INFINITY;
    let mut best_area = f64::INFINITY;
    for (i, c) in children.iter().enumerate() {
        let mut grown = c.bounds;
        grown.expand(p);
        let enlargement = grown.area() - c.bounds.area();
        let area = c.bounds.area();
        if enlargement < best_enlargement
            || (enlargement == best_enlargement && area < best_area)
        {
            best = i;
            best_enlargement = enlargement;
            best_area = area;
        }
    }
    best
}

/// Guttman's quadratic split over any items with bounds.
fn quadratic_split<T>(
    items: Vec<T>,
    bounds_of: impl Fn(&T) -> Bounds,
    min_fill: usize,
) -> (Vec<T>, Vec<T>) {
    debug_assert!(items.len() >= 2);
    // PickSeeds: the pair wasting the most area, ties by lowest indices.
    let (mut seed1, mut seed2, mut worst) = (0usize, 1usize, f64::NEG_INFINITY);
    for i in 0..items.len() {
        for j in (i + 1)..items.len() {
            let (bi, bj) = (bounds_of(&items[i]), bounds_of(&items[j]));
            let waste = bi.union(bj).area() - bi.area() - bj.area();
            if waste > worst {
                worst = waste;
                seed1 = i;
                seed2 = j;
            }
        }
    }

    let mut remaining: Vec<Option<T>> = items.into_iter().map(Some).collect();
    let total = remaining.len();
    let mut g1: Vec<T> = vec![remaining[seed1].take().unwrap()];
    let mut g2: Vec<T> = vec![remaining[seed2].take().unwrap()];
    let mut b1 = bounds_of(&g1[0]);
    let mut b2 = bounds_of(&g2[0]);

    let mut assigned = 2;
    while assigned < total {
        let left = total - assigned;
        // If one group must take everything left to reach min fill, dump.
        if g1.len() + left <= min_fill {
            for slot in remaining.iter_mut() {
                if let Some(item) = slot.take() {
                    b1 = b1.union(bounds_of(&item));
                    g1.push(item);
                }
            }
            break;
        }
        if g2.len() + left <= min_fill {
            for slot in remaining.iter_mut() {
                if let Some(item) = slot.take() {
                    b2 = b2.union(bounds_of(&item));
                    g2.push(item);
                }
            }
            break;
        }
        // PickNext: entry with the strongest group preference.
        let (mut pick, mut pick_diff) = (usize::MAX, f64::NEG_INFINITY);
        for (i, slot) in remaining.iter().enumerate() {
            if let Some(item) = slot {
                let b = bounds_of(item);
                let d1 = b1.union(b).area() - b1.area();
                let d2 = b2.union(b).area() - b2.area();
                let diff = (d1 - d2).abs();
                if diff > pick_diff {
                    pick_diff = diff;
                    pick = i;
                }
            }
        }
        let item = remaining[pick].take().unwrap();
        let b = bounds_of(&item);
        let d1 = b1.union(b).area() - b1.area();
        let d2 = b2.union(b).area() - b2.area();
        // Prefer less enlargement, then smaller area, then fewer entries,
        // then group 1.
        let to_first = if d1 != d2 {
            d1 < d2
        } else if b1.area() != b2.area() {
            b1.area() < b2.area()
        } else {
            g1.len() <= g2.len()
        };
        if to_first {
            b1 = b1.union(b);
            g1.push(item);
        } else {
            b2 = b2.union(b);
            g2.push(item);
        }
        assigned += 1;
    }
    (g1, g2)
}

fn dfs(child: &RChild, order: &mut Vec<usize>) {
    match child.node.as_ref() {
        RNode::Leaf { entries } => order.extend_from_slice(entries),
        RNode::Internal { children } => {
            let mut idx: Vec<usize> = (0..children.len()).collect();
            idx.sort_by(|&a, &b| {
                let (ca, cb) = (children[a].bounds.center(), children[b].bounds.center());
                ca.x.partial_cmp(&cb.x)
                    .expect("finite bounds")
                    .then(ca.y.partial_cmp(&cb.y).expect("finite bounds"))
                    .then(a.cmp(&b))
            });
            for i in idx {
                dfs(&children[i], order);
            }
        }
    }
}

/// Ranking by depth-first traversal of an R-tree with the given node
/// capacity; points are inserted in entity order with quadratic splits.
pub fn rtree_order(frame: &[Point], capacity: usize) -> Vec<usize> {
    let tree = RTree::build(frame, capacity);
    crate::dataset::invert_permutation(&tree.dfs_order())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box() -> Bounds {
        Bounds::new(Point::new(0.0, 0.0), Point::new(1.0, 1.0))
    }

    /// Independent order-1 Hilbert oracle: the four cells in visit order.
    #[test]
    fn hilbert_order1_visits_sw_nw_ne_se() {
        let visit: Vec<(u32, u32)> = {
            let mut cells = vec![(0, 0), (0, 1), (1, 0), (1, 1)];
            cells.sort_by_key(|&(x, y)| hilbert_index(x, y, 1));
            cells
        };
        // SW, NW, NE, SE with y up.
        assert_eq!(visit, vec![(0, 0), (0, 1), (1, 1), (1, 0)]);

        let disc = GridDiscretization::new(1, unit_box()).unwrap();
        let frame = vec![
            Point::new(0.75, 0.25), // SE
            Point::new(0.25, 0.25), // SW
            Point::new(0.25, 0.75), // NW
            Point::new(0.75, 0.75), // NE
        ];
        let ranks = hilbert_order(&frame, &disc);
        // Visit order SW, NW, NE, SE -> entities 1, 2, 3, 0.
        assert_eq!(ranks, vec![3, 0, 1, 2]);
    }

    #[test]
    fn zorder_order1_visits_nw_ne_sw_se() {
        let disc = GridDiscretization::new(1, unit_box()).unwrap();
        let frame = vec![
            Point::new(0.25, 0.75), // NW
            Point::new(0.75, 0.75), // NE
            Point::new(0.25, 0.25), // SW
            Point::new(0.75, 0.25), // SE
        ];
        let ranks = zorder_order(&frame, &disc);
        assert_eq!(ranks, vec![0, 1, 2, 3]);
    }

    #[test]
    fn curve_indices_are_bijections_up_to_b5() {
        for bits in 1..=5u32 {
            let cells = 1u64 << bits;
            let total = (cells * cells) as usize;
            let mut seen_h = vec![false; total];
            let mut seen_z = vec![false; total];
            for x in 0..cells as u32 {
                for y in 0..cells as u32 {
                    let h = hilbert_index(x, y, bits) as usize;
                    let z = zorder_index(x, y, bits) as usize;
                    assert!(h < total && !seen_h[h], "hilbert collision at b={bits}");
                    assert!(z < total && !seen_z[z], "zorder collision at b={bits}");
                    seen_h[h] = true;
                    seen_z[z] = true;
                }
            }
        }
    }

    #[test]
    fn hilbert_consecutive_cells_are_grid_adjacent_at_b5() {
        let bits = 5;
        let cells = 1u32 << bits;
        let mut by_index = vec![(0u32, 0u32); (cells as usize) * (cells as usize)];
        for x in 0..cells {
            for y in 0..cells {
                by_index[hilbert_index(x, y, bits) as usize] = (x, y);
            }
        }
        for pair in by_index.windows(2) {
            let (x0, y0) = pair[0];
            let (x1, y1) = pair[1];
            let manhattan = x0.abs_diff(x1) + y0.abs_diff(y1);
            assert_eq!(manhattan, 1, "jump between {:?} and {:?}", pair[0], pair[1]);
        }
    }

    #[test]
    fn hilbert_locality_beats_zorder_at_b5() {
        let bits = 5;
        let cells = 1u32 << bits;
        let mean_step = |index_of: &dyn Fn(u32, u32) -> u64| -> f64 {
            let mut by_index = vec![(0u32, 0u32); (cells as usize) * (cells as usize)];
            for x in 0..cells {
                for y in 0..cells {
                    by_index[index_of(x, y) as usize] = (x, y);
                }
            }
            let total: f64 = by_index
                .windows(2)
                .map(|p| {
                    let dx = p[0].0.abs_diff(p[1].0) as f64;
                    let dy = p[0].1.abs_diff(p[1].1) as f64;
                    (dx * dx + dy * dy).sqrt()
                })
                .sum();
            total / (by_index.len() - 1) as f64
        };
        let h = mean_step(&|x, y| hilbert_index(x, y, bits));
        let z = mean_step(&|x, y| zorder_index(x, y, bits));
        assert!(h < z, "hilbert mean step {h} should beat zorder {z}");
    }

    #[test]
    fn same_cell_points_tie_break_by_entity_index() {
        let disc = GridDiscretization::new(1, unit_box()).unwrap();
        let frame = vec![Point::new(0.2, 0.2), Point::new(0.21, 0.21)];
        assert_eq!(zorder_order(&frame, &disc), vec![0, 1]);
        assert_eq!(hilbert_order(&frame, &disc), vec![0, 1]);
    }

    #[test]
    fn quadtree_singleton() {
        assert_eq!(quadtree_order(&[Point::new(3.0, 4.0)]), vec![0]);
    }

    /// Hand-traced insertion oracle for three collinear increasing points:
    /// 1 goes SE of 0 (x >= 0.x, y <= 0.y on the diagonal? here strictly
    /// increasing in both axes -> NE), 2 goes NE of 0 then NE of 1; the DFS
    /// emits each node before its subtree.
    #[test]
    fn quadtree_collinear_parent_before_subtree() {
        let frame = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(2.0, 2.0),
        ];
        let ranks = quadtree_order(&frame);
        // Chain 0 -> 1 -> 2, so the DFS order is exactly 0, 1, 2.
        assert_eq!(ranks, vec![0, 1, 2]);

        // Permuted insertion yields a different tree; only permutation
        // validity is guaranteed.
        let permuted = vec![frame[2], frame[0], frame[1]];
        let ranks2 = quadtree_order(&permuted);
        let mut sorted = ranks2.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2]);
    }

    #[test]
    fn rtree_without_split_keeps_insertion_order() {
        let frame = vec![
            Point::new(5.0, 0.0),
            Point::new(1.0, 2.0),
            Point::new(3.0, -1.0),
        ];
        assert_eq!(rtree_order(&frame, 8), vec![0, 1, 2]);
    }

    #[test]
    fn rtree_overflow_forces_one_split_with_nonempty_groups() {
        let frame: Vec<Point> = (0..5).map(|i| Point::new(i as f64, 0.0)).collect();
        let tree = RTree::build(&frame, 4);
        match tree.root.node.as_ref() {
            RNode::Internal { children } => {
                assert_eq!(children.len(), 2);
                for c in children {
                    match c.node.as_ref() {
                        RNode::Leaf { entries } => assert!(!entries.is_empty()),
                        _ => panic!("expected leaves under the root"),
                    }
                }
            }
            _ => panic!("expected a root split"),
        }
    }

    /// Structural oracle: every node's MBR contains all points beneath it.
    #[test]
    fn rtree_mbrs_contain_their_subtrees() {
        fn check(frame: &[Point], child: &RChild) {
            match child.node.as_ref() {
                RNode::Leaf { entries } => {
                    for &e in entries {
                        assert!(child.bounds.contains(frame[e]));
                    }
                }
                RNode::Internal { children } => {
                    for c in children {
                        assert!(child.bounds.contains(c.bounds.min));
                        assert!(child.bounds.contains(c.bounds.max));
                        check(frame, c);
                    }
                }
            }
        }
        let mut state = 0xdeadbeefu64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let frame: Vec<Point> = (0..50).map(|_| Point::new(next() * 10.0, next() * 10.0)).collect();
        let tree = RTree::build(&frame, 4);
        check(&frame, &tree.root);
        let ranks = rtree_order(&frame, 4);
        let mut sorted = ranks.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
    }
}

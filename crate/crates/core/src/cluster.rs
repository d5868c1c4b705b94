//! Hierarchical-clustering orderings and the cluster-cut heuristic.
//!
//! Both clustering methods agglomerate bottom-up under complete linkage: the
//! distance between two clusters is the largest pairwise dissimilarity across
//! them. CLC uses Euclidean distance between points; SNN uses the shared-
//! nearest-neighbor dissimilarity `1/(x+1)` with complete-linkage Euclidean
//! distance as tie-breaker. A dendrogram is linearized by the optimal leaf
//! ordering of Bar-Joseph et al.: among all orders reachable by flipping the
//! children of internal nodes, the one minimizing the total length of the
//! path visiting the points.

use std::collections::HashMap;

use crate::geom::Point;
use crate::neighbors::k_nearest;

pub const DEFAULT_SNN_K: usize = 10;
pub const DEFAULT_CUT_FACTOR: f64 = 2.0;

/// Binary agglomeration tree. Leaves are numbered `0..n` and carry entity
/// indices; internal nodes follow in merge order, so for complete linkage
/// their merge distances are non-decreasing.
#[derive(Clone, Debug)]
pub struct ClusterTree {
    nodes: Vec<TreeNode>,
    root: usize,
}

#[derive(Clone, Debug)]
pub enum TreeNode {
    Leaf {
        entity: usize,
    },
    Internal {
        left: usize,
        right: usize,
        merge_distance: f64,
    },
}

impl ClusterTree {
    pub fn leaf_count(&self) -> usize {
        (self.nodes.len() + 1) / 2
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node(&self, idx: usize) -> &TreeNode {
        &self.nodes[idx]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Internal nodes in merge order as `(left, right, merge_distance)`.
    pub fn merges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            TreeNode::Internal {
                left,
                right,
                merge_distance,
            } => Some((*left, *right, *merge_distance)),
            TreeNode::Leaf { .. } => None,
        })
    }

    /// Entities under `node` in left-to-right tree order.
    pub fn leaves_under(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(v) = stack.pop() {
            match &self.nodes[v] {
                TreeNode::Leaf { entity } => out.push(*entity),
                TreeNode::Internal { left, right, .. } => {
                    stack.push(*right);
                    stack.push(*left);
                }
            }
        }
        out
    }
}

/// Pairwise dissimilarity with an explicit tie-breaking component; compared
/// lexicographically, combined by complete linkage componentwise.
#[derive(Clone, Copy, Debug, PartialEq)]
struct DistKey {
    primary: f64,
    secondary: f64,
}

impl DistKey {
    fn combine_max(self, other: DistKey) -> DistKey {
        DistKey {
            primary: self.primary.max(other.primary),
            secondary: self.secondary.max(other.secondary),
        }
    }

    fn lex_less(&self, other: &DistKey) -> bool {
        (self.primary, self.secondary) < (other.primary, other.secondary)
    }
}

struct ActiveCluster {
    node: usize,
    min_entity: usize,
}

/// Generic complete-linkage agglomeration over an initial pairwise key
/// matrix. Candidate ties are broken by the smallest min entity index of the
/// lower cluster, then of the other cluster.
fn agglomerate(n: usize, mut dist: Vec<Vec<DistKey>>) -> ClusterTree {
    let mut nodes: Vec<TreeNode> = (0..n).map(|entity| TreeNode::Leaf { entity }).collect();
    if n == 1 {
        return ClusterTree { nodes, root: 0 };
    }
    let mut active: Vec<ActiveCluster> = (0..n)
        .map(|i| ActiveCluster {
            node: i,
            min_entity: i,
        })
        .collect();

    while active.len() > 1 {
        // Globally closest pair under (key, min entity of A, min entity of B).
        let (mut bi, mut bj) = (0usize, 1usize);
        for i in 0..active.len() {
            for j in (i + 1)..active.len() {
                if i == bi && j == bj {
                    continue;
                }
                let better = {
                    let cand = &dist[i][j];
                    let best = &dist[bi][bj];
                    if cand.lex_less(best) {
                        true
                    } else if best.lex_less(cand) {
                        false
                    } else {
                        let (ca, cb) = ordered_mins(&active, i, j);
                        let (ba, bb) = ordered_mins(&active, bi, bj);
                        (ca, cb) < (ba, bb)
                    }
                };
                if better {
                    bi = i;
                    bj = j;
                }
            }
        }

        let key = dist[bi][bj];
        // Left child is the cluster containing the smaller entity index.
        let (left_pos, right_pos) = if active[bi].min_entity <= active[bj].min_entity {
            (bi, bj)
        } else {
            (bj, bi)
        };
        let new_node = nodes.len();
        nodes.push(TreeNode::Internal {
            left: active[left_pos].node,
            right: active[right_pos].node,
            merge_distance: key.primary,
        });

        // Merge bj into bi, then drop bj via swap-remove.
        for c in 0..active.len() {
            if c != bi && c != bj {
                let combined = dist[bi][c].combine_max(dist[bj][c]);
                dist[bi][c] = combined;
                dist[c][bi] = combined;
            }
        }
        active[bi] = ActiveCluster {
            node: new_node,
            min_entity: active[bi].min_entity.min(active[bj].min_entity),
        };
        active.swap_remove(bj);
        dist.swap_remove(bj);
        for row in dist.iter_mut() {
            row.swap_remove(bj);
        }
    }

    let root = active[0].node;
    ClusterTree { nodes, root }
}

fn ordered_mins(active: &[ActiveCluster], i: usize, j: usize) -> (usize, usize) {
    let (a, b) = (active[i].min_entity, active[j].min_entity);
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Complete-linkage clustering on Euclidean distances.
pub fn clc_tree(frame: &[Point]) -> ClusterTree {
    assert!(!frame.is_empty(), "clustering needs a nonempty frame");
    let n = frame.len();
    let dist = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| DistKey {
                    primary: frame[i].dist(frame[j]),
                    secondary: 0.0,
                })
                .collect()
        })
        .collect();
    agglomerate(n, dist)
}

/// Shared-nearest-neighbor dissimilarity `1/(x+1)` between every pair of
/// points, where `x` counts common members of the two k-nearest-neighbor
/// sets. `k` is clamped to `n - 1`.
pub(crate) fn snn_dissimilarity(frame: &[Point], k: usize) -> Vec<Vec<f64>> {
    let n = frame.len();
    let knn = k_nearest(frame, k);
    let mut is_neighbor = vec![vec![false; n]; n];
    for (i, nbs) in knn.iter().enumerate() {
        for &j in nbs {
            is_neighbor[i][j] = true;
        }
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let shared = (0..n)
                        .filter(|&r| is_neighbor[i][r] && is_neighbor[j][r])
                        .count();
                    1.0 / (shared as f64 + 1.0)
                })
                .collect()
        })
        .collect()
}

/// Complete-linkage clustering on SNN dissimilarity; Euclidean distance
/// (also under complete linkage) breaks SNN ties, entity indices break any
/// remaining ties.
pub fn snn_tree(frame: &[Point], k: usize) -> ClusterTree {
    assert!(!frame.is_empty(), "clustering needs a nonempty frame");
    assert!(k >= 1, "SNN neighborhood size must be at least 1");
    let n = frame.len();
    let snn = snn_dissimilarity(frame, k);
    let dist = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| DistKey {
                    primary: snn[i][j],
                    secondary: frame[i].dist(frame[j]),
                })
                .collect()
        })
        .collect();
    agglomerate(n, dist)
}

/// Cut a dendrogram into flat clusters: replay merges in order and stop
/// before the first merge whose distance exceeds `factor` times the previous
/// merge's distance. The first merge never triggers the stop. Returns the
/// partition as entity lists, each sorted ascending, ordered by smallest
/// member.
pub fn cut_clusters(tree: &ClusterTree, factor: f64) -> Vec<Vec<usize>> {
    let n = tree.leaf_count();
    let merges: Vec<(usize, usize, f64)> = tree.merges().collect();

    let mut applied = merges.len();
    for (i, m) in merges.iter().enumerate() {
        if i >= 1 && m.2 > factor * merges[i - 1].2 {
            applied = i;
            break;
        }
    }

    // Leftmost leaf of every node as a union-find handle; children always
    // precede parents in the node array.
    let mut leftmost = vec![0usize; tree.node_count()];
    for idx in 0..tree.node_count() {
        leftmost[idx] = match tree.node(idx) {
            TreeNode::Leaf { entity } => *entity,
            TreeNode::Internal { left, .. } => leftmost[*left],
        };
    }

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut internal_seen = 0usize;
    for idx in 0..tree.node_count() {
        if let TreeNode::Internal { left, right, .. } = tree.node(idx) {
            if internal_seen == applied {
                break;
            }
            internal_seen += 1;
            let (a, b) = (leftmost[*left], leftmost[*right]);
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }

    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for e in 0..n {
        let r = find(&mut parent, e);
        groups.entry(r).or_default().push(e);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    for g in &mut out {
        g.sort_unstable();
    }
    out.sort_by_key(|g| g[0]);
    out
}

// ---------------------------------------------------------------------------
// Optimal leaf ordering (Bar-Joseph et al.)
// ---------------------------------------------------------------------------

/// Leaf order reachable by child flips only, minimizing the Euclidean length
/// of the path visiting the points in that order. Ties are resolved to the
/// lexicographically smallest entity sequence. Returns `ranks[i]` = rank of
/// entity `i`.
pub fn optimal_leaf_order(tree: &ClusterTree, frame: &[Point]) -> Vec<usize> {
    let seq = optimal_leaf_sequence(tree, frame);
    crate::dataset::invert_permutation(&seq)
}

/// The optimal leaf sequence itself (entities in visit order).
pub fn optimal_leaf_sequence(tree: &ClusterTree, frame: &[Point]) -> Vec<usize> {
    let n = tree.leaf_count();
    if n == 1 {
        return tree.leaves_under(tree.root());
    }
    let solver = OloSolver::new(tree, frame);
    solver.solve()
}

struct NodeTable {
    /// Entities of this subtree in tree order.
    leaves: Vec<usize>,
    /// Position of each entity within `leaves`.
    local: HashMap<usize, usize>,
    /// `cost[l][r]`: minimal path length over flip-consistent arrangements
    /// with endpoints `leaves[l]`, `leaves[r]`; `INFINITY` when no
    /// arrangement has those endpoints. Exactly symmetric by construction,
    /// which keeps reversal-tied optima float-identical.
    cost: Vec<Vec<f64>>,
}

struct OloSolver<'a> {
    tree: &'a ClusterTree,
    dist: Vec<Vec<f64>>,
    tables: Vec<Option<NodeTable>>,
}

impl<'a> OloSolver<'a> {
    fn new(tree: &'a ClusterTree, frame: &[Point]) -> Self {
        let n = frame.len();
        let dist = (0..n)
            .map(|i| (0..n).map(|j| frame[i].dist(frame[j])).collect())
            .collect();
        let mut solver = OloSolver {
            tree,
            dist,
            tables: (0..tree.node_count()).map(|_| None).collect(),
        };
        for idx in 0..tree.node_count() {
            solver.build_table(idx);
        }
        solver
    }

    fn build_table(&mut self, idx: usize) {
        let table = match self.tree.node(idx) {
            TreeNode::Leaf { entity } => NodeTable {
                leaves: vec![*entity],
                local: HashMap::from([(*entity, 0)]),
                cost: vec![vec![0.0]],
            },
            TreeNode::Internal { left, right, .. } => {
                let (a, b) = (
                    self.tables[*left].as_ref().expect("children built first"),
                    self.tables[*right].as_ref().expect("children built first"),
                );
                let leaves: Vec<usize> =
                    a.leaves.iter().chain(b.leaves.iter()).copied().collect();
                let local: HashMap<usize, usize> =
                    leaves.iter().enumerate().map(|(p, &e)| (e, p)).collect();
                let sz = leaves.len();
                let mut cost = vec![vec![f64::INFINITY; sz]; sz];
                let offset = a.leaves.len();

                // For each endpoint l in A: bridge[y] = min over x in A of
                // cost_A(l, x) + d(x, y), for every y in B; then the minimum
                // over y of bridge[y] + cost_B(y, r) closes the pair (l, r).
                for la in 0..a.leaves.len() {
                    let mut bridge = vec![f64::INFINITY; b.leaves.len()];
                    for (xa, &x_entity) in a.leaves.iter().enumerate() {
                        let base = a.cost[la][xa];
                        if !base.is_finite() {
                            continue;
                        }
                        for (yb, &y_entity) in b.leaves.iter().enumerate() {
                            let c = base + self.dist[x_entity][y_entity];
                            if c < bridge[yb] {
                                bridge[yb] = c;
                            }
                        }
                    }
                    for rb in 0..b.leaves.len() {
                        let mut best = f64::INFINITY;
                        for yb in 0..b.leaves.len() {
                            let c = bridge[yb] + b.cost[yb][rb];
                            if c < best {
                                best = c;
                            }
                        }
                        let (gl, gr) = (la, offset + rb);
                        cost[gl][gr] = best;
                        cost[gr][gl] = best;
                    }
                }
                NodeTable {
                    leaves,
                    local,
                    cost,
                }
            }
        };
        self.tables[idx] = Some(table);
    }

    fn solve(&self) -> Vec<usize> {
        let root = self.tree.root();
        let table = self.tables[root].as_ref().unwrap();
        let sz = table.leaves.len();
        let mut best = f64::INFINITY;
        for l in 0..sz {
            for r in 0..sz {
                if table.cost[l][r] < best {
                    best = table.cost[l][r];
                }
            }
        }
        // Among cost-tied endpoint pairs (including both traversal
        // directions), pick the lexicographically smallest sequence.
        let mut winner: Option<Vec<usize>> = None;
        for l in 0..sz {
            for r in 0..sz {
                if table.cost[l][r] == best {
                    let seq = self.realize(root, table.leaves[l], table.leaves[r]);
                    if winner.as_ref().map_or(true, |w| seq < *w) {
                        winner = Some(seq);
                    }
                }
            }
        }
        winner.expect("root table has at least one finite entry")
    }

    /// Lexicographically smallest optimal arrangement of `idx`'s subtree
    /// that starts at entity `l` and ends at entity `r`.
    fn realize(&self, idx: usize, l: usize, r: usize) -> Vec<usize> {
        match self.tree.node(idx) {
            TreeNode::Leaf { entity } => vec![*entity],
            TreeNode::Internal { left, right, .. } => {
                let table = self.tables[idx].as_ref().unwrap();
                let target = table.cost[table.local[&l]][table.local[&r]];
                let a = self.tables[*left].as_ref().unwrap();
                let b = self.tables[*right].as_ref().unwrap();
                // Candidate costs must reproduce build_table's exact float
                // bracketing, (a_cost + d) + b_cost, in either traversal
                // direction; the cost tables are symmetric, so only the
                // realized sequence depends on which endpoint sits in which
                // child.
                let l_in_a = a.local.contains_key(&l);
                let (a_end, b_end) = if l_in_a { (l, r) } else { (r, l) };
                let la = a.local[&a_end];
                let lb = b.local[&b_end];
                let mut best: Option<(Vec<usize>, Vec<usize>)> = None;
                for (xa, &x_entity) in a.leaves.iter().enumerate() {
                    let head = a.cost[la][xa];
                    if !head.is_finite() {
                        continue;
                    }
                    for (yb, &y_entity) in b.leaves.iter().enumerate() {
                        let total = (head + self.dist[x_entity][y_entity]) + b.cost[yb][lb];
                        if total == target {
                            let cand = if l_in_a {
                                (
                                    self.realize(*left, l, x_entity),
                                    self.realize(*right, y_entity, r),
                                )
                            } else {
                                (
                                    self.realize(*right, l, y_entity),
                                    self.realize(*left, x_entity, r),
                                )
                            };
                            if best.as_ref().map_or(true, |b| cand < *b) {
                                best = Some(cand);
                            }
                        }
                    }
                }
                let (mut s1, s2) = best.expect("target cost is achievable");
                s1.extend(s2);
                s1
            }
        }
    }
}

/// Euclidean length of the path visiting `order` (entities) left to right.
pub fn path_length(frame: &[Point], order: &[usize]) -> f64 {
    order
        .windows(2)
        .map(|w| frame[w[0]].dist(frame[w[1]]))
        .sum()
}

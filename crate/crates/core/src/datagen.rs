//! Seeded synthetic trajectory generators.
//!
//! `gen_reynolds_clusters` runs a force-based boids simulation: separation,
//! alignment, and cohesion act within each cluster, while across clusters
//! only separation (repulsion) applies, keeping the clusters apart.
//! `gen_flocking` runs a heading-based variant: constant speed, one steering
//! rule per tick (separate, or align-and-cohere), each capped by a maximum
//! turn angle. Both use reflecting, non-wrapping walls and are bit-for-bit
//! deterministic for a fixed seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::TrajectoryDataset;
use crate::error::{Error, Result};
use crate::geom::{Bounds, Point};

/// Perception radii of the steering rules. `inter_cluster` governs the
/// repulsion-only interaction between different clusters.
#[derive(Clone, Copy, Debug)]
pub struct PerceptionRadii {
    pub separation: f64,
    pub alignment: f64,
    pub cohesion: f64,
    pub inter_cluster: f64,
}

/// Force weights of the steering rules.
#[derive(Clone, Copy, Debug)]
pub struct RuleWeights {
    pub separation: f64,
    pub alignment: f64,
    pub cohesion: f64,
}

/// Maximum turn angles (degrees per tick) for the heading-based flocking
/// model.
#[derive(Clone, Copy, Debug)]
pub struct TurnCaps {
    pub separate_deg: f64,
    pub align_deg: f64,
    pub cohere_deg: f64,
}

#[derive(Clone, Debug)]
pub struct BoidsConfig {
    pub clusters: usize,
    pub boids_per_cluster: usize,
    pub frames: usize,
    pub arena: Bounds,
    pub radii: PerceptionRadii,
    pub weights: RuleWeights,
    pub max_speed: f64,
    pub max_force: f64,
    pub inter_cluster_repulsion: f64,
    pub turn_caps: TurnCaps,
    pub seed: u64,
}

impl Default for BoidsConfig {
    fn default() -> Self {
        BoidsConfig {
            clusters: 3,
            boids_per_cluster: 50,
            frames: 1000,
            arena: Bounds::new(Point::new(0.0, 0.0), Point::new(1400.0, 1000.0)),
            radii: PerceptionRadii {
                separation: 25.0,
                alignment: 60.0,
                cohesion: 150.0,
                inter_cluster: 350.0,
            },
            weights: RuleWeights {
                separation: 2.0,
                alignment: 1.0,
                cohesion: 0.9,
            },
            max_speed: 2.0,
            max_force: 0.25,
            inter_cluster_repulsion: 3.0,
            turn_caps: TurnCaps {
                separate_deg: 1.5,
                align_deg: 5.0,
                cohere_deg: 3.0,
            },
            seed: 0,
        }
    }
}

impl BoidsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.clusters == 0 || self.boids_per_cluster == 0 || self.frames == 0 {
            return Err(Error::Validation(
                "clusters, boids per cluster, and frames must be positive".into(),
            ));
        }
        if self.arena.width() <= 0.0 || self.arena.height() <= 0.0 {
            return Err(Error::Validation("arena must have positive area".into()));
        }
        let radii_ok = self.radii.separation > 0.0
            && self.radii.alignment > 0.0
            && self.radii.cohesion > 0.0
            && self.radii.inter_cluster > 0.0;
        if !radii_ok {
            return Err(Error::Validation("perception radii must be positive".into()));
        }
        if !(self.max_speed > 0.0) || !(self.max_force > 0.0) {
            return Err(Error::Validation(
                "max speed and max force must be positive".into(),
            ));
        }
        if self.weights.separation < 0.0
            || self.weights.alignment < 0.0
            || self.weights.cohesion < 0.0
            || self.inter_cluster_repulsion < 0.0
        {
            return Err(Error::Validation("weights must be nonnegative".into()));
        }
        if self.turn_caps.separate_deg < 0.0
            || self.turn_caps.align_deg < 0.0
            || self.turn_caps.cohere_deg < 0.0
        {
            return Err(Error::Validation("turn caps must be nonnegative".into()));
        }
        Ok(())
    }
}

struct Boid {
    pos: Point,
    vel: Point,
    cluster: usize,
}

fn spawn(cfg: &BoidsConfig, rng: &mut ChaCha8Rng) -> Vec<Boid> {
    let center = cfg.arena.center();
    let ring = 0.33 * cfg.arena.width().min(cfg.arena.height());
    let spawn_radius = 0.07 * cfg.arena.width().min(cfg.arena.height());
    let mut boids = Vec::with_capacity(cfg.clusters * cfg.boids_per_cluster);
    for c in 0..cfg.clusters {
        let spawn_center = if cfg.clusters == 1 {
            center
        } else {
            let angle = 2.0 * std::f64::consts::PI * c as f64 / cfg.clusters as f64;
            center + Point::new(angle.cos(), angle.sin()) * ring
        };
        // Keep spawns apart so the first frames have no near-coincident
        // pairs; rejection sampling with a shrinking requirement always
        // terminates.
        let mut min_spacing = 0.45 * cfg.radii.separation;
        let cluster_start = boids.len();
        for _ in 0..cfg.boids_per_cluster {
            let mut pos;
            let mut attempts = 0;
            loop {
                let angle = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
                let radius = spawn_radius * rng.gen::<f64>().sqrt();
                pos = spawn_center + Point::new(angle.cos(), angle.sin()) * radius;
                let ok = boids[cluster_start..]
                    .iter()
                    .all(|b: &Boid| b.pos.dist(pos) >= min_spacing);
                if ok {
                    break;
                }
                attempts += 1;
                if attempts % 64 == 0 {
                    min_spacing *= 0.8;
                }
            }
            let vel_angle = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
            let speed = 0.5 * cfg.max_speed * (0.5 + 0.5 * rng.gen::<f64>());
            boids.push(Boid {
                pos: clamp_into(pos, &cfg.arena),
                vel: Point::new(vel_angle.cos(), vel_angle.sin()) * speed,
                cluster: c,
            });
        }
    }
    boids
}

fn clamp_into(p: Point, arena: &Bounds) -> Point {
    Point::new(
        p.x.clamp(arena.min.x, arena.max.x),
        p.y.clamp(arena.min.y, arena.max.y),
    )
}

/// Reflect a position that stepped outside the arena, flipping the matching
/// velocity component. One reflection per axis suffices for speeds far below
/// the arena size.
fn reflect(pos: &mut Point, vel: &mut Point, arena: &Bounds) {
    if pos.x < arena.min.x {
        pos.x = arena.min.x + (arena.min.x - pos.x);
        vel.x = -vel.x;
    } else if pos.x > arena.max.x {
        pos.x = arena.max.x - (pos.x - arena.max.x);
        vel.x = -vel.x;
    }
    if pos.y < arena.min.y {
        pos.y = arena.min.y + (arena.min.y - pos.y);
        vel.y = -vel.y;
    } else if pos.y > arena.max.y {
        pos.y = arena.max.y - (pos.y - arena.max.y);
        vel.y = -vel.y;
    }
    *pos = clamp_into(*pos, arena);
}

/// Force-based boids with intra-cluster separation/alignment/cohesion and
/// repulsion-only coupling across clusters.
pub fn gen_reynolds_clusters(cfg: &BoidsConfig) -> Result<TrajectoryDataset> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut boids = spawn(cfg, &mut rng);
    let n = boids.len();

    let mut frames: Vec<Vec<Point>> = Vec::with_capacity(cfg.frames);
    frames.push(boids.iter().map(|b| b.pos).collect());

    for _ in 1..cfg.frames {
        let mut accels = vec![Point::zero(); n];
        for i in 0..n {
            let me = &boids[i];
            let mut sep = Point::zero();
            let mut sep_count = 0usize;
            let mut ali = Point::zero();
            let mut ali_count = 0usize;
            let mut coh = Point::zero();
            let mut coh_count = 0usize;
            let mut rep = Point::zero();
            let mut rep_count = 0usize;

            for j in 0..n {
                if i == j {
                    continue;
                }
                let other = &boids[j];
                let d = me.pos.dist(other.pos);
                if other.cluster == me.cluster {
                    if d < cfg.radii.separation && d > 0.0 {
                        sep = sep + (me.pos - other.pos).normalized() * (1.0 / d);
                        sep_count += 1;
                    }
                    if d < cfg.radii.alignment {
                        ali = ali + other.vel;
                        ali_count += 1;
                    }
                    if d < cfg.radii.cohesion {
                        coh = coh + other.pos;
                        coh_count += 1;
                    }
                } else if d < cfg.radii.inter_cluster && d > 0.0 {
                    rep = rep + (me.pos - other.pos).normalized() * (1.0 / d);
                    rep_count += 1;
                }
            }

            let steer_to = |desired: Point, vel: Point| -> Point {
                (desired.normalized() * cfg.max_speed - vel).limited(cfg.max_force)
            };
            let mut acc = Point::zero();
            if sep_count > 0 {
                acc = acc + steer_to(sep, me.vel) * cfg.weights.separation;
            }
            if ali_count > 0 {
                acc = acc + steer_to(ali, me.vel) * cfg.weights.alignment;
            }
            if coh_count > 0 {
                let target = coh * (1.0 / coh_count as f64) - me.pos;
                if target.norm() > 0.0 {
                    acc = acc + steer_to(target, me.vel) * cfg.weights.cohesion;
                }
            }
            if rep_count > 0 {
                acc = acc + steer_to(rep, me.vel) * cfg.inter_cluster_repulsion;
            }
            accels[i] = acc;
        }

        for (b, acc) in boids.iter_mut().zip(&accels) {
            b.vel = (b.vel + *acc).limited(cfg.max_speed);
            b.pos = b.pos + b.vel;
            reflect(&mut b.pos, &mut b.vel, &cfg.arena);
        }
        frames.push(boids.iter().map(|b| b.pos).collect());
    }

    let ids = boids
        .iter()
        .enumerate()
        .map(|(i, b)| format!("c{}_{}", b.cluster, i % cfg.boids_per_cluster))
        .collect();
    TrajectoryDataset::new(ids, frames, None)
}

/// Heading-based flocking: constant speed, per-tick turns capped per rule.
/// If the nearest flockmate is too close the boid turns away from it,
/// otherwise it aligns with the mean heading and coheres toward the
/// neighborhood centroid. Requires `clusters == 1`.
pub fn gen_flocking(cfg: &BoidsConfig) -> Result<TrajectoryDataset> {
    cfg.validate()?;
    if cfg.clusters != 1 {
        return Err(Error::Validation(
            "the flocking model simulates a single flock; set clusters = 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let boids = spawn(cfg, &mut rng);
    let n = boids.len();
    let mut pos: Vec<Point> = boids.iter().map(|b| b.pos).collect();
    let mut heading: Vec<f64> = boids.iter().map(|b| b.vel.y.atan2(b.vel.x)).collect();
    let speed = cfg.max_speed;

    let sep_cap = cfg.turn_caps.separate_deg.to_radians();
    let ali_cap = cfg.turn_caps.align_deg.to_radians();
    let coh_cap = cfg.turn_caps.cohere_deg.to_radians();

    let mut frames: Vec<Vec<Point>> = Vec::with_capacity(cfg.frames);
    frames.push(pos.clone());

    for _ in 1..cfg.frames {
        let mut new_heading = heading.clone();
        for i in 0..n {
            // Flockmates within the vision (alignment) radius.
            let mut nearest: Option<(usize, f64)> = None;
            let mut heading_sum = Point::zero();
            let mut centroid = Point::zero();
            let mut count = 0usize;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = pos[i].dist(pos[j]);
                if d < cfg.radii.alignment {
                    count += 1;
                    heading_sum =
                        heading_sum + Point::new(heading[j].cos(), heading[j].sin());
                    centroid = centroid + pos[j];
                    if nearest.map_or(true, |(_, nd)| d < nd) {
                        nearest = Some((j, d));
                    }
                }
            }
            if count == 0 {
                continue;
            }
            let mut theta = heading[i];
            if let Some((j, d)) = nearest {
                if d < cfg.radii.separation {
                    // Turn away from the nearest flockmate.
                    let away = (pos[i] - pos[j]).y.atan2((pos[i] - pos[j]).x);
                    theta = turn_toward(theta, away, sep_cap);
                    new_heading[i] = theta;
                    continue;
                }
            }
            let mean_heading = heading_sum.y.atan2(heading_sum.x);
            theta = turn_toward(theta, mean_heading, ali_cap);
            let toward = centroid * (1.0 / count as f64) - pos[i];
            if toward.norm() > 0.0 {
                let target = toward.y.atan2(toward.x);
                theta = turn_toward(theta, target, coh_cap);
            }
            new_heading[i] = theta;
        }
        heading = new_heading;

        for i in 0..n {
            let mut p = pos[i] + Point::new(heading[i].cos(), heading[i].sin()) * speed;
            let mut v = Point::new(heading[i].cos(), heading[i].sin()) * speed;
            reflect(&mut p, &mut v, &cfg.arena);
            pos[i] = p;
            heading[i] = v.y.atan2(v.x);
        }
        frames.push(pos.clone());
    }

    let ids = (0..n).map(|i| format!("b{i}")).collect();
    TrajectoryDataset::new(ids, frames, None)
}

/// Rotate `theta` toward `target` by at most `cap` radians.
fn turn_toward(theta: f64, target: f64, cap: f64) -> f64 {
    let mut delta = target - theta;
    while delta > std::f64::consts::PI {
        delta -= 2.0 * std::f64::consts::PI;
    }
    while delta <= -std::f64::consts::PI {
        delta += 2.0 * std::f64::consts::PI;
    }
    theta + delta.clamp(-cap, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{clc_tree, cut_clusters};

    #[test]
    fn reynolds_three_clusters_stay_detectable() {
        let cfg = BoidsConfig {
            frames: 1000,
            seed: 7,
            ..BoidsConfig::default()
        };
        let ds = gen_reynolds_clusters(&cfg).unwrap();
        assert_eq!(ds.entity_count(), 150);
        assert_eq!(ds.frame_count(), 1000);
        let hits = (0..ds.frame_count())
            .filter(|&t| cut_clusters(&clc_tree(ds.frame(t)), 2.0).len() == 3)
            .count();
        let fraction = hits as f64 / ds.frame_count() as f64;
        assert!(
            fraction >= 0.90,
            "only {fraction:.2} of frames resolved 3 clusters"
        );
    }

    #[test]
    fn reynolds_single_cluster_runs_clean() {
        let cfg = BoidsConfig {
            clusters: 1,
            boids_per_cluster: 40,
            frames: 300,
            seed: 3,
            ..BoidsConfig::default()
        };
        let ds = gen_reynolds_clusters(&cfg).unwrap();
        for t in 0..ds.frame_count() {
            for p in ds.frame(t) {
                assert!(p.is_finite());
                assert!(cfg.arena.contains(*p));
            }
        }
    }

    #[test]
    fn reynolds_same_seed_is_bit_identical() {
        let cfg = BoidsConfig {
            clusters: 2,
            boids_per_cluster: 10,
            frames: 50,
            seed: 99,
            ..BoidsConfig::default()
        };
        let a = gen_reynolds_clusters(&cfg).unwrap();
        let b = gen_reynolds_clusters(&cfg).unwrap();
        for t in 0..a.frame_count() {
            for i in 0..a.entity_count() {
                let (pa, pb) = (a.position(t, i), b.position(t, i));
                assert_eq!(pa.x.to_bits(), pb.x.to_bits());
                assert_eq!(pa.y.to_bits(), pb.y.to_bits());
            }
        }
    }

    #[test]
    fn reynolds_speed_never_exceeds_cap() {
        let cfg = BoidsConfig {
            clusters: 2,
            boids_per_cluster: 15,
            frames: 200,
            seed: 5,
            ..BoidsConfig::default()
        };
        let ds = gen_reynolds_clusters(&cfg).unwrap();
        for t in 1..ds.frame_count() {
            for i in 0..ds.entity_count() {
                let step = ds.position(t, i).dist(ds.position(t - 1, i));
                // A wall reflection preserves speed, so the step length is
                // bounded by the speed cap either way.
                assert!(step <= cfg.max_speed + 1e-9, "step {step} at frame {t}");
            }
        }
    }

    #[test]
    fn flocking_stays_in_arena() {
        let cfg = BoidsConfig {
            clusters: 1,
            boids_per_cluster: 100,
            frames: 500,
            seed: 11,
            ..BoidsConfig::default()
        };
        let ds = gen_flocking(&cfg).unwrap();
        assert_eq!(ds.entity_count(), 100);
        for t in 0..ds.frame_count() {
            for p in ds.frame(t) {
                assert!(cfg.arena.contains(*p), "escaped at frame {t}: {p:?}");
            }
        }
    }

    #[test]
    fn flocking_zero_turn_caps_move_straight_until_walls() {
        let cfg = BoidsConfig {
            clusters: 1,
            boids_per_cluster: 12,
            frames: 60,
            seed: 2,
            turn_caps: TurnCaps {
                separate_deg: 0.0,
                align_deg: 0.0,
                cohere_deg: 0.0,
            },
            ..BoidsConfig::default()
        };
        let ds = gen_flocking(&cfg).unwrap();
        // Between reflections every step vector is constant; verify each
        // boid's step repeats unless a wall was hit (step direction flips).
        for i in 0..ds.entity_count() {
            for t in 2..ds.frame_count() {
                let s1 = ds.position(t - 1, i) - ds.position(t - 2, i);
                let s2 = ds.position(t, i) - ds.position(t - 1, i);
                let same = (s2 - s1).norm() < 1e-9;
                let reflected_x = (s2.x + s1.x).abs() < 1e-9
                    && (s2.y - s1.y).abs() < 1e-9;
                let reflected_y = (s2.y + s1.y).abs() < 1e-9
                    && (s2.x - s1.x).abs() < 1e-9;
                let reflected_both = (s2.x + s1.x).abs() < 1e-9
                    && (s2.y + s1.y).abs() < 1e-9;
                assert!(
                    same || reflected_x || reflected_y || reflected_both,
                    "boid {i} turned without a wall at frame {t}: {s1:?} -> {s2:?}"
                );
            }
        }
    }

    #[test]
    fn flocking_same_seed_is_bit_identical() {
        let cfg = BoidsConfig {
            clusters: 1,
            boids_per_cluster: 20,
            frames: 40,
            seed: 123,
            ..BoidsConfig::default()
        };
        let a = gen_flocking(&cfg).unwrap();
        let b = gen_flocking(&cfg).unwrap();
        for t in 0..a.frame_count() {
            for i in 0..a.entity_count() {
                assert_eq!(a.position(t, i), b.position(t, i));
            }
        }
    }

    #[test]
    fn flocking_requires_single_cluster() {
        let cfg = BoidsConfig {
            clusters: 2,
            ..BoidsConfig::default()
        };
        assert!(gen_flocking(&cfg).is_err());
    }
}

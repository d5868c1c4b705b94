//! Wall-time scaling of the stable-component timeline: doubling n should
//! roughly double the runtime (linear in n per frame).

use std::time::Instant;

use shoal_core::dataset::TrajectoryDataset;
use shoal_core::dimred::{spc_timeline, SpcConfig};
use shoal_core::geom::Point;

fn dataset(n: usize, t: usize, seed: u64) -> TrajectoryDataset {
    let mut state = seed.wrapping_add(0x9e3779b97f4a7c15);
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let frames = (0..t)
        .map(|_| (0..n).map(|_| Point::new(next() * 100.0, next() * 100.0)).collect())
        .collect();
    TrajectoryDataset::new((0..n).map(|i| i.to_string()).collect(), frames, None).unwrap()
}

fn time_spc(ds: &TrajectoryDataset) -> f64 {
    let cfg = SpcConfig::new(0.5).unwrap();
    // Warm up once, then take the fastest of three runs to damp scheduler
    // noise.
    let _ = spc_timeline(ds, cfg);
    (0..3)
        .map(|_| {
            let started = Instant::now();
            let tl = spc_timeline(ds, cfg);
            assert_eq!(tl.len(), ds.frame_count());
            started.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn spc_wall_time_grows_linearly_in_n() {
    let t = 60;
    let small = dataset(10_000, t, 1);
    let large = dataset(20_000, t, 2);
    let time_small = time_spc(&small);
    let time_large = time_spc(&large);
    let ratio = time_large / time_small;
    assert!(
        (1.2..=3.5).contains(&ratio),
        "time(2n)/time(n) = {ratio:.2} ({time_small:.4}s vs {time_large:.4}s)"
    );
}

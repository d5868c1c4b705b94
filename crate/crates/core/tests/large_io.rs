//! Ingestion at the scale of the real tracking excerpts: 151 entities over
//! 2000 frames load cleanly through the CSV path.

use shoal_core::datagen::{gen_flocking, BoidsConfig};
use shoal_core::io::{load_csv, save_csv, CsvSchema};

#[test]
fn synthetic_151_entities_2000_frames_round_trips() {
    let cfg = BoidsConfig {
        clusters: 1,
        boids_per_cluster: 151,
        frames: 2000,
        seed: 4242,
        ..BoidsConfig::default()
    };
    let ds = gen_flocking(&cfg).unwrap();
    assert_eq!(ds.entity_count(), 151);
    assert_eq!(ds.frame_count(), 2000);

    let path = std::env::temp_dir().join(format!("shoal_large_{}.csv", std::process::id()));
    save_csv(&ds, &path).unwrap();
    let back = load_csv(&path, &CsvSchema::default()).unwrap();
    std::fs::remove_file(&path).ok();

    assert_eq!(back.entity_count(), 151);
    assert_eq!(back.frame_count(), 2000);
    assert_eq!(back.entity_ids(), ds.entity_ids());
    for t in (0..2000).step_by(97) {
        for i in 0..151 {
            assert_eq!(
                ds.position(t, i).x.to_bits(),
                back.position(t, i).x.to_bits()
            );
            assert_eq!(
                ds.position(t, i).y.to_bits(),
                back.position(t, i).y.to_bits()
            );
        }
    }
}

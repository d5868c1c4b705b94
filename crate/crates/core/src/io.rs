//! CSV ingestion and export.
//!
//! Trajectory files carry one row per `(frame, entity)` sample with columns
//! `frame,id,x,y` by default. Frame indices must be contiguous after sorting
//! but need not start at zero; entity order is fixed by first appearance in
//! the file. Orderings are exported as `frame,rank,id` and coordinates as
//! `frame,id,coord`.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use crate::dataset::{OrderingSummary, TrajectoryDataset};
use crate::error::{Error, Result};
use crate::geom::Point;

/// Column names used when reading a trajectory CSV.
#[derive(Clone, Debug)]
pub struct CsvSchema {
    pub frame: String,
    pub id: String,
    pub x: String,
    pub y: String,
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            frame: "frame".into(),
            id: "id".into(),
            x: "x".into(),
            y: "y".into(),
        }
    }
}

impl CsvSchema {
    /// Parse `"frame,id,x,y"`-style column lists.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        if parts.len() != 4 || parts.iter().any(|p| p.is_empty()) {
            return Err(Error::Validation(format!(
                "column spec {spec:?} must list four names: frame,id,x,y"
            )));
        }
        Ok(CsvSchema {
            frame: parts[0].into(),
            id: parts[1].into(),
            x: parts[2].into(),
            y: parts[3].into(),
        })
    }
}

/// Load a trajectory dataset from CSV.
pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<TrajectoryDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path.as_ref())?;

    let headers = reader.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse {
                line: 1,
                msg: format!("missing column {name:?} in header"),
            })
    };
    let (c_frame, c_id, c_x, c_y) = (
        col(&schema.frame)?,
        col(&schema.id)?,
        col(&schema.x)?,
        col(&schema.y)?,
    );

    // Entities in first-seen order; this fixes the FXD baseline order.
    let mut entity_ids: Vec<String> = Vec::new();
    let mut entity_index: HashMap<String, usize> = HashMap::new();
    // frame index -> entity -> position
    let mut samples: HashMap<i64, HashMap<usize, Point>> = HashMap::new();

    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |idx: usize| -> Result<&str> {
            record.get(idx).ok_or_else(|| Error::Parse {
                line,
                msg: format!("row has only {} fields", record.len()),
            })
        };
        let frame: i64 = field(c_frame)?.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("invalid frame index {:?}", field(c_frame).unwrap_or("")),
        })?;
        let id = field(c_id)?.to_string();
        let parse_coord = |idx: usize, name: &str| -> Result<f64> {
            let raw = field(idx)?;
            raw.parse::<f64>().map_err(|_| Error::Parse {
                line,
                msg: format!("invalid {name} coordinate {raw:?}"),
            })
        };
        let x = parse_coord(c_x, "x")?;
        let y = parse_coord(c_y, "y")?;
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::Validation(format!(
                "non-finite coordinate at line {line} (frame {frame}, entity {id:?})"
            )));
        }

        let next = entity_ids.len();
        let e = *entity_index.entry(id.clone()).or_insert_with(|| {
            entity_ids.push(id.clone());
            next
        });
        let frame_map = samples.entry(frame).or_default();
        if frame_map.insert(e, Point::new(x, y)).is_some() {
            return Err(Error::Integrity(format!(
                "duplicate sample for frame {frame}, entity {id:?} (line {line})"
            )));
        }
    }

    if samples.is_empty() {
        return Err(Error::Integrity("file contains no samples".into()));
    }

    let mut frame_keys: Vec<i64> = samples.keys().copied().collect();
    frame_keys.sort_unstable();
    for pair in frame_keys.windows(2) {
        if pair[1] != pair[0] + 1 {
            return Err(Error::Integrity(format!(
                "frame indices are not contiguous: gap between {} and {}",
                pair[0], pair[1]
            )));
        }
    }

    let n = entity_ids.len();
    let mut frames = Vec::with_capacity(frame_keys.len());
    for &key in &frame_keys {
        let frame_map = &samples[&key];
        let mut frame = Vec::with_capacity(n);
        for (e, id) in entity_ids.iter().enumerate() {
            match frame_map.get(&e) {
                Some(p) => frame.push(*p),
                None => {
                    return Err(Error::Integrity(format!(
                        "entity {id:?} is missing at frame {key}"
                    )))
                }
            }
        }
        if frame_map.len() != n {
            return Err(Error::Integrity(format!(
                "frame {key} has {} samples, expected {n}",
                frame_map.len()
            )));
        }
        frames.push(frame);
    }

    TrajectoryDataset::new(entity_ids, frames, None)
}

/// Write a dataset back to the input CSV format. Frame indices are renumbered
/// from zero; coordinate serialization round-trips `f64` exactly.
pub fn save_csv(ds: &TrajectoryDataset, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    w.write_record(["frame", "id", "x", "y"])?;
    for t in 0..ds.frame_count() {
        for (i, id) in ds.entity_ids().iter().enumerate() {
            let p = ds.position(t, i);
            w.write_record([
                t.to_string(),
                id.clone(),
                format_f64(p.x),
                format_f64(p.y),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Shortest decimal representation that parses back to the identical `f64`.
fn format_f64(v: f64) -> String {
    let mut s = format!("{v}");
    // Keep a decimal point so the column is unambiguously floating point.
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str(".0");
    }
    s
}

/// Export an ordering as `frame,rank,id` rows.
pub fn save_ordering_csv(
    ord: &OrderingSummary,
    entity_ids: &[String],
    path: impl AsRef<Path>,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    w.write_record(["frame", "rank", "id"])?;
    for t in 0..ord.frame_count() {
        for (rank, entity) in ord.order_at(t).into_iter().enumerate() {
            w.write_record([t.to_string(), rank.to_string(), entity_ids[entity].clone()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Export per-frame 1D coordinates as `frame,id,coord` rows.
pub fn save_coords_csv(
    ord: &OrderingSummary,
    entity_ids: &[String],
    path: impl AsRef<Path>,
) -> Result<()> {
    let coords = ord.coords().ok_or_else(|| {
        Error::Contract(
            "this ordering has no 1D coordinates; use a coordinate-producing method \
             (spc, cpc, sam, samp, sne, snep)"
                .into(),
        )
    })?;
    let mut w = csv::Writer::from_path(path.as_ref())?;
    w.write_record(["frame", "id", "coord"])?;
    for (t, frame) in coords.iter().enumerate() {
        for (i, c) in frame.iter().enumerate() {
            w.write_record([t.to_string(), entity_ids[i].clone(), format_f64(*c)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Read an ordering exported by [`save_ordering_csv`], resolving entity ids
/// against `ds`.
pub fn load_ordering_csv(
    path: impl AsRef<Path>,
    ds: &TrajectoryDataset,
) -> Result<OrderingSummary> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path.as_ref())?;
    let index: HashMap<&str, usize> = ds
        .entity_ids()
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();

    let n = ds.entity_count();
    let mut ranks: Vec<Vec<Option<usize>>> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let get = |i: usize| record.get(i).unwrap_or("");
        let t: usize = get(0).parse().map_err(|_| Error::Parse {
            line,
            msg: format!("invalid frame index {:?}", get(0)),
        })?;
        let rank: usize = get(1).parse().map_err(|_| Error::Parse {
            line,
            msg: format!("invalid rank {:?}", get(1)),
        })?;
        let entity = *index.get(get(2)).ok_or_else(|| Error::Integrity(format!(
            "ordering references unknown entity {:?} (line {line})",
            get(2)
        )))?;
        if t >= ranks.len() {
            ranks.resize(t + 1, vec![None; n]);
        }
        if rank >= n {
            return Err(Error::Integrity(format!(
                "rank {rank} out of range for {n} entities (line {line})"
            )));
        }
        if ranks[t][entity].replace(rank).is_some() {
            return Err(Error::Integrity(format!(
                "duplicate rank row for frame {t}, entity {:?} (line {line})",
                get(2)
            )));
        }
    }
    if ranks.len() != ds.frame_count() {
        return Err(Error::Integrity(format!(
            "ordering covers {} frames, dataset has {}",
            ranks.len(),
            ds.frame_count()
        )));
    }
    let ranks: Vec<Vec<usize>> = ranks
        .into_iter()
        .enumerate()
        .map(|(t, frame)| {
            frame
                .into_iter()
                .enumerate()
                .map(|(i, r)| {
                    r.ok_or_else(|| Error::Integrity(format!(
                        "entity {:?} has no rank at frame {t}",
                        ds.entity_ids()[i]
                    )))
                })
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    OrderingSummary::from_ranks(ranks, "loaded")
}

/// Read per-frame coordinates exported by [`save_coords_csv`] back into an
/// ordering (ranks derived from the coordinates).
pub fn load_coords_csv(
    path: impl AsRef<Path>,
    ds: &TrajectoryDataset,
) -> Result<OrderingSummary> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path.as_ref())?;
    let index: HashMap<&str, usize> = ds
        .entity_ids()
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let n = ds.entity_count();
    let mut coords: Vec<Vec<Option<f64>>> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let get = |i: usize| record.get(i).unwrap_or("");
        let t: usize = get(0).parse().map_err(|_| Error::Parse {
            line,
            msg: format!("invalid frame index {:?}", get(0)),
        })?;
        let entity = *index.get(get(1)).ok_or_else(|| Error::Integrity(format!(
            "coordinates reference unknown entity {:?} (line {line})",
            get(1)
        )))?;
        let c: f64 = get(2).parse().map_err(|_| Error::Parse {
            line,
            msg: format!("invalid coordinate {:?}", get(2)),
        })?;
        if t >= coords.len() {
            coords.resize(t + 1, vec![None; n]);
        }
        if coords[t][entity].replace(c).is_some() {
            return Err(Error::Integrity(format!(
                "duplicate coordinate row for frame {t}, entity {:?} (line {line})",
                get(1)
            )));
        }
    }
    if coords.len() != ds.frame_count() {
        return Err(Error::Integrity(format!(
            "coordinates cover {} frames, dataset has {}",
            coords.len(),
            ds.frame_count()
        )));
    }
    let coords: Vec<Vec<f64>> = coords
        .into_iter()
        .enumerate()
        .map(|(t, frame)| {
            frame
                .into_iter()
                .enumerate()
                .map(|(i, c)| {
                    c.ok_or_else(|| Error::Integrity(format!(
                        "entity {:?} has no coordinate at frame {t}",
                        ds.entity_ids()[i]
                    )))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    OrderingSummary::from_coords(coords, "loaded")
}

/// Convenience writer for small text files created atomically enough for
/// our purposes (write then flush).
pub fn write_text(path: impl AsRef<Path>, content: &str) -> Result<()> {
    let mut f = std::fs::File::create(path.as_ref())?;
    f.write_all(content.as_bytes())?;
    f.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(content: &str) -> std::path::PathBuf {
        use std::sync::atomic::{AtomicU64, Ordering};
        static COUNTER: AtomicU64 = AtomicU64::new(0);
        let path = std::env::temp_dir().join(format!(
            "shoal_io_test_{}_{}.csv",
            std::process::id(),
            COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        std::fs::write(&path, content).unwrap();
        path
    }

    #[test]
    fn loads_minimal_complete_file() {
        let p = write_tmp(
            "frame,id,x,y\n0,a,0.0,0.0\n0,b,1.0,0.5\n1,a,0.1,0.0\n1,b,1.1,0.5\n2,a,0.2,0.0\n2,b,1.2,0.5\n",
        );
        let ds = load_csv(&p, &CsvSchema::default()).unwrap();
        assert_eq!(ds.entity_count(), 2);
        assert_eq!(ds.frame_count(), 3);
        assert_eq!(ds.entity_ids(), &["a".to_string(), "b".to_string()]);
        std::fs::remove_file(p).ok();
    }

    #[test]
    fn missing_entity_is_an_integrity_error_naming_frame_and_entity() {
        let p = write_tmp(
            "frame,id,x,y\n4,a,0.0,0.0\n4,b,1.0,0.5\n5,a,0.1,0.0\n6,a,0.2,0.0\n6,b,1.2,0.5\n",
        );
        let err = load_csv(&p, &CsvSchema::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("frame 5"), "message was: {msg}");
        assert!(msg.contains("\"b\""), "message was: {msg}");
        std::fs::remove_file(p).ok();
    }

    #[test]
    fn malformed_row_reports_line_number() {
        let p = write_tmp("frame,id,x,y\n0,a,0.0,0.0\n0,b,oops,0.5\n");
        let err = load_csv(&p, &CsvSchema::default()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        std::fs::remove_file(p).ok();
    }

    #[test]
    fn non_contiguous_frames_rejected() {
        let p = write_tmp("frame,id,x,y\n0,a,0.0,0.0\n2,a,0.1,0.0\n");
        assert!(matches!(
            load_csv(&p, &CsvSchema::default()),
            Err(Error::Integrity(_))
        ));
        std::fs::remove_file(p).ok();
    }

    #[test]
    fn duplicate_sample_rejected() {
        let p = write_tmp("frame,id,x,y\n0,a,0.0,0.0\n0,a,0.5,0.0\n");
        assert!(matches!(
            load_csv(&p, &CsvSchema::default()),
            Err(Error::Integrity(_))
        ));
        std::fs::remove_file(p).ok();
    }

    #[test]
    fn save_load_round_trips_values_exactly() {
        let ds = TrajectoryDataset::new(
            vec!["a".into(), "b".into()],
            vec![
                vec![
                    Point::new(0.1234567890123456789, -1e300),
                    Point::new(2.2250738585072014e-308, 0.0),
                ],
                vec![Point::new(-0.0, 1.0 / 3.0), Point::new(1e16, -7.5)],
            ],
            None,
        )
        .unwrap();
        let p = write_tmp("");
        save_csv(&ds, &p).unwrap();
        let back = load_csv(&p, &CsvSchema::default()).unwrap();
        assert_eq!(back.entity_ids(), ds.entity_ids());
        for t in 0..ds.frame_count() {
            for i in 0..ds.entity_count() {
                let (a, b) = (ds.position(t, i), back.position(t, i));
                assert_eq!(a.x.to_bits(), b.x.to_bits());
                assert_eq!(a.y.to_bits(), b.y.to_bits());
            }
        }
        // Saving the reloaded dataset reproduces the same bytes.
        let p2 = write_tmp("");
        save_csv(&back, &p2).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(&p2).unwrap());
        std::fs::remove_file(p).ok();
        std::fs::remove_file(p2).ok();
    }

    #[test]
    fn ordering_round_trip() {
        let ds = TrajectoryDataset::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0)],
                vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0)],
            ],
            None,
        )
        .unwrap();
        let ord = OrderingSummary::from_ranks(vec![vec![2, 0, 1], vec![0, 1, 2]], "t").unwrap();
        let p = write_tmp("");
        save_ordering_csv(&ord, ds.entity_ids(), &p).unwrap();
        let back = load_ordering_csv(&p, &ds).unwrap();
        assert_eq!(back.ranks(), ord.ranks());
        std::fs::remove_file(p).ok();
    }
}

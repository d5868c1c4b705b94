//! Raster summaries: rugs, metric strips, per-point heat rugs, and motion
//! lines.
//!
//! A rug devotes one pixel column (times `scale`) to each frame and one
//! pixel row to each rank; the cell at (frame, rank) takes the color of the
//! entity holding that rank, from a bilinear blend of four corner colors
//! over a reference box. Data coordinates have y growing north; image rows
//! grow south, so rank 0 and north sit at the top of the image.

use std::io::BufWriter;
use std::path::Path;

use crate::dataset::{OrderingSummary, TrajectoryDataset};
use crate::error::{Error, Result};
use crate::geom::{Bounds, Point};
use crate::metrics::MetricSeries;

pub type Rgb = [u8; 3];

/// Display caps used in the metric strips.
pub const DEFAULT_KSDI_CAP: f64 = 37.5;
pub const DEFAULT_KSTE_CAP: f64 = 6.25;

/// Which 2D position feeds the colormap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColorMode {
    /// The entity's position at the frame being drawn.
    CurrentFrame,
    /// The entity's position at a fixed reference frame.
    ReferenceFrame(usize),
}

/// Bilinear four-corner colormap over a reference box.
#[derive(Clone, Copy, Debug)]
pub struct Colormap2D {
    pub nw: Rgb,
    pub ne: Rgb,
    pub sw: Rgb,
    pub se: Rgb,
    pub reference_box: Bounds,
    pub mode: ColorMode,
}

pub const DEFAULT_NW: Rgb = [0, 128, 128];
pub const DEFAULT_NE: Rgb = [255, 220, 0];
pub const DEFAULT_SW: Rgb = [30, 60, 255];
pub const DEFAULT_SE: Rgb = [220, 40, 40];

impl Colormap2D {
    /// Default anchors over the dataset's global bounding box, coloring by
    /// per-frame position.
    pub fn for_dataset(ds: &TrajectoryDataset) -> Result<Colormap2D> {
        Self::new(ds.bounds(), ColorMode::CurrentFrame)
    }

    pub fn new(reference_box: Bounds, mode: ColorMode) -> Result<Colormap2D> {
        if !(reference_box.width() > 0.0) && !(reference_box.height() > 0.0) {
            return Err(Error::Validation(
                "colormap reference box must have positive extent".into(),
            ));
        }
        Ok(Colormap2D {
            nw: DEFAULT_NW,
            ne: DEFAULT_NE,
            sw: DEFAULT_SW,
            se: DEFAULT_SE,
            reference_box,
            mode,
        })
    }

    pub fn with_corners(mut self, nw: Rgb, ne: Rgb, sw: Rgb, se: Rgb) -> Colormap2D {
        self.nw = nw;
        self.ne = ne;
        self.sw = sw;
        self.se = se;
        self
    }
}

/// Bilinear blend of the four corner anchors at a position, clamped to the
/// reference box.
pub fn colormap2d(pos: Point, cm: &Colormap2D) -> Rgb {
    let b = cm.reference_box;
    let u = if b.width() > 0.0 {
        ((pos.x - b.min.x) / b.width()).clamp(0.0, 1.0)
    } else {
        0.5
    };
    let v = if b.height() > 0.0 {
        ((pos.y - b.min.y) / b.height()).clamp(0.0, 1.0)
    } else {
        0.5
    };
    let mut out = [0u8; 3];
    for c in 0..3 {
        let south = cm.sw[c] as f64 * (1.0 - u) + cm.se[c] as f64 * u;
        let north = cm.nw[c] as f64 * (1.0 - u) + cm.ne[c] as f64 * u;
        let val = south * (1.0 - v) + north * v;
        out[c] = val.round().clamp(0.0, 255.0) as u8;
    }
    out
}

/// Plain RGB8 raster with deterministic PNG encoding.
#[derive(Clone, Debug, PartialEq)]
pub struct RgbBuffer {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl RgbBuffer {
    pub fn new(width: u32, height: u32, fill: Rgb) -> RgbBuffer {
        let mut data = Vec::with_capacity(width as usize * height as usize * 3);
        for _ in 0..(width as usize * height as usize) {
            data.extend_from_slice(&fill);
        }
        RgbBuffer {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn set(&mut self, x: u32, y: u32, color: Rgb) {
        if x < self.width && y < self.height {
            let idx = (y as usize * self.width as usize + x as usize) * 3;
            self.data[idx..idx + 3].copy_from_slice(&color);
        }
    }

    pub fn get(&self, x: u32, y: u32) -> Rgb {
        let idx = (y as usize * self.width as usize + x as usize) * 3;
        [self.data[idx], self.data[idx + 1], self.data[idx + 2]]
    }

    pub fn fill_rect(&mut self, x0: u32, y0: u32, w: u32, h: u32, color: Rgb) {
        for y in y0..(y0 + h).min(self.height) {
            for x in x0..(x0 + w).min(self.width) {
                self.set(x, y, color);
            }
        }
    }

    /// Encode as 8-bit RGB PNG; `metadata` becomes tEXt chunks.
    pub fn encode_png(&self, metadata: &[(String, String)]) -> Result<Vec<u8>> {
        let mut bytes = Vec::new();
        {
            let w = BufWriter::new(&mut bytes);
            let mut encoder = png::Encoder::new(w, self.width, self.height);
            encoder.set_color(png::ColorType::Rgb);
            encoder.set_depth(png::BitDepth::Eight);
            for (k, v) in metadata {
                encoder
                    .add_text_chunk(k.clone(), v.clone())
                    .map_err(|e| Error::Png(e.to_string()))?;
            }
            let mut writer = encoder.write_header()?;
            writer.write_image_data(&self.data)?;
        }
        Ok(bytes)
    }

    pub fn save_png(&self, path: impl AsRef<Path>, metadata: &[(String, String)]) -> Result<()> {
        let bytes = self.encode_png(metadata)?;
        std::fs::write(path.as_ref(), bytes)?;
        Ok(())
    }
}

fn color_of(ds: &TrajectoryDataset, cm: &Colormap2D, t: usize, entity: usize) -> Rgb {
    let pos = match cm.mode {
        ColorMode::CurrentFrame => ds.position(t, entity),
        ColorMode::ReferenceFrame(f) => ds.position(f.min(ds.frame_count() - 1), entity),
    };
    colormap2d(pos, cm)
}

fn checked_dims(columns: usize, rows: usize, scale: u32) -> Result<(u32, u32)> {
    let width = (columns as u64) * scale as u64;
    let height = (rows as u64) * scale as u64;
    const MAX_PIXELS: u64 = 1 << 30; // ~1 G pixels, 3 GB RGB
    if width == 0 || height == 0 {
        return Err(Error::ImageSize("image would be empty".into()));
    }
    if width > u32::MAX as u64 || height > u32::MAX as u64 || width * height > MAX_PIXELS {
        return Err(Error::ImageSize(format!(
            "{width}x{height} pixels exceeds the raster budget; reduce --scale"
        )));
    }
    Ok((width as u32, height as u32))
}

/// Dense rug: column block per frame, row block per rank, colored by the 2D
/// position of the entity at that rank. Output is exactly
/// `(T*scale) x (n*scale)` pixels.
pub fn render_rug(
    ds: &TrajectoryDataset,
    ord: &OrderingSummary,
    cm: &Colormap2D,
    scale: u32,
) -> Result<RgbBuffer> {
    check_match(ds, ord)?;
    let (t_len, n) = (ds.frame_count(), ds.entity_count());
    let (width, height) = checked_dims(t_len, n, scale)?;
    let mut img = RgbBuffer::new(width, height, [0, 0, 0]);
    for t in 0..t_len {
        for (rank, entity) in ord.order_at(t).into_iter().enumerate() {
            let color = color_of(ds, cm, t, entity);
            img.fill_rect(t as u32 * scale, rank as u32 * scale, scale, scale, color);
        }
    }
    Ok(img)
}

/// Bar strip under a rug: one bar per series value, height proportional to
/// `min(value, cap)`. `columns` is the rug's frame count; a series shorter
/// than `columns` (a per-transition series) is right-aligned so bar `i`
/// sits under frame `i + 1`. White background, baseline row at the bottom.
pub fn render_metric_strip(
    series: &MetricSeries,
    cap: f64,
    height: u32,
    columns: usize,
    scale: u32,
    color: Rgb,
) -> Result<RgbBuffer> {
    if series.values.is_empty() {
        return Err(Error::Validation("metric series is empty".into()));
    }
    if series.values.len() > columns {
        return Err(Error::Contract(format!(
            "series has {} values but the rug spans {columns} frames",
            series.values.len()
        )));
    }
    if !(cap > 0.0) {
        return Err(Error::Validation("display cap must be positive".into()));
    }
    let (width, _) = checked_dims(columns, 1, scale.max(1))?;
    let mut img = RgbBuffer::new(width, height.max(2), [255, 255, 255]);
    let offset = columns - series.values.len();
    let baseline = img.height() - 1;
    for (i, &v) in series.values.iter().enumerate() {
        let frac = (v.max(0.0) / cap).min(1.0);
        // A full bar reaches the top row; zero draws nothing.
        let bar = (frac * baseline as f64).round() as u32;
        let x0 = (i + offset) as u32 * scale;
        for dx in 0..scale {
            for dy in 1..=bar {
                img.set(x0 + dx, baseline - dy, color);
            }
        }
    }
    // Baseline.
    for x in 0..img.width() {
        img.set(x, baseline, [120, 120, 120]);
    }
    Ok(img)
}

/// Heat rug: cell brightness encodes each entity's contribution to a metric,
/// ramped linearly from zero to the 99th-percentile contribution. Cells
/// follow rug layout (column = frame, row = rank).
pub fn render_heat_rug(
    ds: &TrajectoryDataset,
    ord: &OrderingSummary,
    contributions: &[Vec<f64>],
    scale: u32,
    base: Rgb,
) -> Result<RgbBuffer> {
    check_match(ds, ord)?;
    let (t_len, n) = (ds.frame_count(), ds.entity_count());
    if contributions.len() != t_len || contributions.iter().any(|c| c.len() != n) {
        return Err(Error::Contract(format!(
            "contributions must be shaped {t_len} x {n}"
        )));
    }
    let mut all: Vec<f64> = contributions
        .iter()
        .flatten()
        .copied()
        .filter(|v| v.is_finite())
        .collect();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let p99 = if all.is_empty() {
        0.0
    } else {
        all[((all.len() - 1) as f64 * 0.99).round() as usize]
    };

    let (width, height) = checked_dims(t_len, n, scale)?;
    let mut img = RgbBuffer::new(width, height, [0, 0, 0]);
    for t in 0..t_len {
        for (rank, entity) in ord.order_at(t).into_iter().enumerate() {
            let v = contributions[t][entity];
            let ramp = if p99 > 0.0 {
                (v / p99).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let color = [
                (base[0] as f64 * ramp).round() as u8,
                (base[1] as f64 * ramp).round() as u8,
                (base[2] as f64 * ramp).round() as u8,
            ];
            img.fill_rect(t as u32 * scale, rank as u32 * scale, scale, scale, color);
        }
    }
    Ok(img)
}

/// Vertical pixel positions of one frame's 1D coordinates: per-frame min and
/// max map to fixed margins, larger coordinates sit higher (smaller row).
pub fn motionlines_rows(coords: &[f64], height: u32) -> Vec<u32> {
    let margin = (height / 20).max(2);
    let usable = height.saturating_sub(2 * margin).max(1) as f64;
    let lo = coords.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = coords.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    coords
        .iter()
        .map(|&c| {
            let frac = if hi > lo { (c - lo) / (hi - lo) } else { 0.5 };
            // Large coordinate -> top of the image.
            let row = margin as f64 + (1.0 - frac) * usable;
            (row.round() as u32).min(height - 1)
        })
        .collect()
}

/// Motion lines: each entity's 1D coordinates across frames joined by a
/// polyline colored via the colormap; black background. Requires an ordering
/// that carries coordinates.
pub fn render_motionlines(
    ds: &TrajectoryDataset,
    ord: &OrderingSummary,
    cm: &Colormap2D,
    height: u32,
    scale: u32,
) -> Result<RgbBuffer> {
    check_match(ds, ord)?;
    let coords = ord.coords().ok_or_else(|| {
        Error::Contract(
            "this ordering has no 1D coordinates; use a coordinate-producing method \
             (spc, cpc, sam, samp, sne, snep)"
                .into(),
        )
    })?;
    let t_len = ds.frame_count();
    let (width, _) = checked_dims(t_len, height as usize, scale)?;
    let mut img = RgbBuffer::new(width, height, [0, 0, 0]);

    let rows: Vec<Vec<u32>> = coords.iter().map(|c| motionlines_rows(c, height)).collect();
    let col_center = |t: usize| t as u32 * scale + scale / 2;
    for i in 0..ds.entity_count() {
        for t in 0..t_len {
            let x0 = col_center(t);
            let y0 = rows[t][i];
            let color = color_of(ds, cm, t, i);
            if t + 1 < t_len {
                let x1 = col_center(t + 1);
                let y1 = rows[t + 1][i];
                draw_line(&mut img, x0, y0, x1, y1, color);
            } else {
                img.set(x0, y0, color);
            }
        }
    }
    Ok(img)
}

fn draw_line(img: &mut RgbBuffer, x0: u32, y0: u32, x1: u32, y1: u32, color: Rgb) {
    let (mut x0, mut y0) = (x0 as i64, y0 as i64);
    let (x1, y1) = (x1 as i64, y1 as i64);
    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        if x0 >= 0 && y0 >= 0 {
            img.set(x0 as u32, y0 as u32, color);
        }
        if x0 == x1 && y0 == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x0 += sx;
        }
        if e2 <= dx {
            err += dx;
            y0 += sy;
        }
    }
}

fn check_match(ds: &TrajectoryDataset, ord: &OrderingSummary) -> Result<()> {
    if ord.frame_count() != ds.frame_count() || ord.entity_count() != ds.entity_count() {
        return Err(Error::Contract(format!(
            "ordering shape ({} frames, {} entities) does not match dataset ({}, {})",
            ord.frame_count(),
            ord.entity_count(),
            ds.frame_count(),
            ds.entity_count()
        )));
    }
    Ok(())
}

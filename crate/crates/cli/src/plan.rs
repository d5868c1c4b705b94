//! Plan files and the pipeline command.
//!
//! A plan is a flat `key = value` file ('#' starts a comment):
//!
//! ```text
//! # dataset: either a CSV path or a generator
//! input = data.csv
//! # model = reynolds
//! # clusters = 3
//! # boids = 50
//! # frames = 1000
//! # arena = 1400x1000
//! # gen-seed = 7
//!
//! methods = fxd, spc:1.0, spc:0.5, cpc:0.5, hil
//! k = 10
//! seed = 7
//! output = out
//! render = rug, strips
//! scale = 2
//! ```
//!
//! The pipeline loads or generates the dataset, runs every method, scores
//! it, and writes orderings, metric series, summary and trade-off tables,
//! timings, optional rugs and strips, and a manifest into the output
//! directory. Everything except timings.csv is byte-stable for a fixed
//! seed.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use shoal_core::datagen::{gen_flocking, gen_reynolds_clusters, BoidsConfig};
use shoal_core::dataset::TrajectoryDataset;
use shoal_core::experiment::{run_comparison, ExperimentPlan};
use shoal_core::io;
use shoal_core::methods::{Method, MethodDefaults};
use shoal_core::metrics::NeighborSpec;
use shoal_core::render::{
    render_metric_strip, render_rug, Colormap2D, DEFAULT_KSDI_CAP, DEFAULT_KSTE_CAP,
};

use crate::manifest::Manifest;

pub struct PlanFile {
    entries: BTreeMap<String, String>,
}

impl PlanFile {
    pub fn parse(text: &str) -> anyhow::Result<PlanFile> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                anyhow::anyhow!("plan line {} is not `key = value`: {raw:?}", lineno + 1)
            })?;
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(PlanFile { entries })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn parse_value<T: std::str::FromStr>(&self, key: &str) -> anyhow::Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| anyhow::anyhow!("plan key {key}: cannot parse {v:?}")),
        }
    }
}

fn slug(tag: &str) -> String {
    let mut out = String::with_capacity(tag.len());
    for c in tag.chars() {
        if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
            out.push(c);
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

pub fn cmd_pipeline(config: PathBuf, output_override: Option<PathBuf>) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(&config)
        .map_err(|e| anyhow::anyhow!("cannot read plan {}: {e}", config.display()))?;
    let plan = PlanFile::parse(&text)?;

    let out_dir = output_override
        .or_else(|| plan.get("output").map(PathBuf::from))
        .ok_or_else(|| anyhow::anyhow!("plan needs `output = <dir>` (or pass --output)"))?;
    std::fs::create_dir_all(&out_dir)?;

    let seed: u64 = plan.parse_value("seed")?.unwrap_or(0);
    let k: usize = plan.parse_value("k")?.unwrap_or(10);

    // Dataset: an input CSV wins over a generator block.
    let mut generated_path: Option<PathBuf> = None;
    let ds: TrajectoryDataset = if let Some(input) = plan.get("input") {
        io::load_csv(input, &io::CsvSchema::default())?
    } else if let Some(model) = plan.get("model") {
        let cfg = BoidsConfig {
            clusters: plan.parse_value("clusters")?.unwrap_or(3),
            boids_per_cluster: plan.parse_value("boids")?.unwrap_or(50),
            frames: plan.parse_value("frames")?.unwrap_or(1000),
            arena: match plan.get("arena") {
                Some(spec) => crate::parse_arena(spec)?,
                None => BoidsConfig::default().arena,
            },
            seed: plan.parse_value("gen-seed")?.unwrap_or(seed),
            ..BoidsConfig::default()
        };
        let ds = match model {
            "reynolds" => gen_reynolds_clusters(&cfg)?,
            "flocking" => gen_flocking(&cfg)?,
            other => anyhow::bail!("unknown model {other:?}; expected reynolds or flocking"),
        };
        let path = out_dir.join("data.csv");
        io::save_csv(&ds, &path)?;
        generated_path = Some(path);
        ds
    } else {
        anyhow::bail!("plan needs either `input = <csv>` or `model = reynolds|flocking`");
    };

    let defaults = MethodDefaults {
        snn_k: plan.parse_value("snn-k")?.unwrap_or(10),
        cut_factor: plan.parse_value("cut-factor")?.unwrap_or(2.0),
        ..MethodDefaults::default()
    };
    let methods_spec = plan
        .get("methods")
        .ok_or_else(|| anyhow::anyhow!("plan needs `methods = tag, tag, ...`"))?;
    let methods: Vec<Method> = methods_spec
        .split(',')
        .map(|tag| Method::parse(tag.trim(), &defaults).map_err(anyhow::Error::from))
        .collect::<anyhow::Result<_>>()?;

    let experiment = ExperimentPlan {
        methods,
        neighbor_spec: NeighborSpec::new(k)?,
        seed,
    };
    let result = run_comparison(&ds, &experiment)?;

    // Tables.
    let summary_path = out_dir.join("summary.csv");
    io::write_text(&summary_path, &result.summary_csv())?;
    let tradeoff_path = out_dir.join("tradeoff.csv");
    io::write_text(&tradeoff_path, &result.tradeoff_csv())?;
    io::write_text(&out_dir.join("timings.csv"), &result.timings_csv())?;

    // Per-method artifacts.
    let render_kinds: Vec<&str> = plan
        .get("render")
        .map(|v| v.split(',').map(str::trim).collect())
        .unwrap_or_default();
    let scale: u32 = plan.parse_value("scale")?.unwrap_or(2);
    let cm = Colormap2D::for_dataset(&ds)?;
    let mut manifest = Manifest::new("pipeline", seed)
        .param("plan", config.display().to_string())
        .param("methods", methods_spec)
        .param("k", k as u64)
        .input_file(&config)?;
    if let Some(input) = plan.get("input") {
        manifest = manifest.input_file(Path::new(input))?;
    }
    if let Some(p) = &generated_path {
        manifest = manifest.output_file(p)?;
    }
    manifest = manifest
        .output_file(&summary_path)?
        .output_file(&tradeoff_path)?;

    for row in &result.rows {
        let name = slug(&row.tag);
        if let Some(err) = &row.error {
            eprintln!("method {} failed: {err}", row.tag);
            continue;
        }
        let ord = row.ordering.as_ref().expect("no error, so ordering exists");

        let ord_path = out_dir.join(format!("ord_{name}.csv"));
        io::save_ordering_csv(ord, ds.entity_ids(), &ord_path)?;
        manifest = manifest.output_file(&ord_path)?;
        if ord.coords().is_some() {
            let coords_path = out_dir.join(format!("coords_{name}.csv"));
            io::save_coords_csv(ord, ds.entity_ids(), &coords_path)?;
            manifest = manifest.output_file(&coords_path)?;
        }

        let series_path = out_dir.join(format!("series_{name}.csv"));
        io::write_text(&series_path, &result.series_csv(row))?;
        manifest = manifest.output_file(&series_path)?;

        if render_kinds.contains(&"rug") {
            let rug = render_rug(&ds, ord, &cm, scale)?;
            let rug_path = out_dir.join(format!("rug_{name}.png"));
            rug.save_png(&rug_path, &[("method".into(), row.tag.clone())])?;
            manifest = manifest.output_file(&rug_path)?;
        }
        if render_kinds.contains(&"strips") {
            let cap_ksdi: f64 = plan.parse_value("cap-ksdi")?.unwrap_or(DEFAULT_KSDI_CAP);
            let cap_kste: f64 = plan.parse_value("cap-kste")?.unwrap_or(DEFAULT_KSTE_CAP);
            for (metric, cap, color) in [
                ("ksdi", cap_ksdi, [235u8, 200, 35]),
                ("kste", cap_kste, [45u8, 95, 225]),
            ] {
                let series = row
                    .metrics
                    .iter()
                    .find(|s| s.name == metric)
                    .expect("evaluate emits ksdi and kste");
                if series.values.is_empty() {
                    continue;
                }
                let strip = render_metric_strip(
                    series,
                    cap,
                    12 * scale.max(1),
                    ds.frame_count(),
                    scale,
                    color,
                )?;
                let strip_path = out_dir.join(format!("strip_{name}_{metric}.png"));
                strip.save_png(&strip_path, &[])?;
                manifest = manifest.output_file(&strip_path)?;
            }
        }
    }

    manifest.write_into(&out_dir)?;
    println!("pipeline -> {}", out_dir.display());
    Ok(())
}

//! `shoal` — compute, score, and render 1D orderings of 2D motion data.

mod manifest;
mod plan;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use shoal_core::datagen::{gen_flocking, gen_reynolds_clusters, BoidsConfig};
use shoal_core::dataset::TrajectoryDataset;
use shoal_core::dimred::TsneConfig;
use shoal_core::error::Error as CoreError;
use shoal_core::experiment::{
    default_sigma_grid, run_sweep, ExperimentPlan,
};
use shoal_core::geom::{Bounds, Point};
use shoal_core::io;
use shoal_core::methods::{Method, MethodDefaults};
use shoal_core::metrics::{
    ksdi_contributions, kste_excess_contributions, MetricSeries, NeighborSpec,
};
use shoal_core::render::{
    render_heat_rug, render_metric_strip, render_motionlines, render_rug, ColorMode,
    Colormap2D, DEFAULT_KSDI_CAP, DEFAULT_KSTE_CAP,
};

use manifest::Manifest;

#[derive(Parser)]
#[command(
    name = "shoal",
    version,
    about = "Stable 1D orderings and visual summaries for 2D motion data"
)]
struct Cli {
    /// Bound worker parallelism (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic trajectory dataset.
    Generate(GenerateArgs),
    /// Compute one ordering of a dataset.
    Order(OrderArgs),
    /// Score an ordering with the spatial-quality and stability metrics.
    Evaluate(EvaluateArgs),
    /// Sweep the SPC stretch threshold over a sigma grid.
    Sweep(SweepArgs),
    /// Render rugs, metric strips, heat rugs, or motion lines.
    #[command(subcommand)]
    Render(RenderCommand),
    /// Run a full comparison pipeline from a plan file.
    Pipeline(PipelineArgs),
    /// Measure ordering runtimes (computation only, no I/O).
    Bench(BenchArgs),
}

fn parse_sigma(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .parse()
        .map_err(|_| format!("{s:?} is not a number; sigma must lie in [0,1]"))?;
    if !(0.0..=1.0).contains(&v) || v.is_nan() {
        return Err(format!("sigma {v} is outside the valid range [0,1]"));
    }
    Ok(v)
}

#[derive(Clone, Copy, ValueEnum)]
enum GenModel {
    Reynolds,
    Flocking,
}

#[derive(Args)]
struct GenerateArgs {
    /// Generator model.
    #[arg(long, value_enum)]
    model: GenModel,
    /// Number of clusters (reynolds; flocking requires 1).
    #[arg(long, default_value_t = 3)]
    clusters: usize,
    /// Boids per cluster.
    #[arg(long, default_value_t = 50)]
    boids_per_cluster: usize,
    #[arg(long, default_value_t = 1000)]
    frames: usize,
    /// Arena size as WIDTHxHEIGHT.
    #[arg(long, default_value = "1400x1000")]
    arena: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct MethodParams {
    /// Grid resolution exponent for hil/zor.
    #[arg(long, default_value_t = 16)]
    bits: u32,
    /// Node capacity for rtr.
    #[arg(long, default_value_t = 8)]
    rtree_capacity: usize,
    /// Neighborhood size for snn.
    #[arg(long, default_value_t = 10)]
    snn_k: usize,
    /// Cluster-cut threshold factor for cpc.
    #[arg(long, default_value_t = 2.0)]
    cut_factor: f64,
    /// Gradient-descent iterations for sam/samp.
    #[arg(long, default_value_t = 500)]
    sam_iters: usize,
    /// Perplexity for sne/snep.
    #[arg(long, default_value_t = 40.0)]
    tsne_perplexity: f64,
    /// Gradient-descent iterations for sne/snep.
    #[arg(long, default_value_t = 1000)]
    tsne_iters: usize,
    /// Stretch threshold for spc/cpc.
    #[arg(long, value_parser = parse_sigma, default_value_t = 0.5)]
    sigma: f64,
}

impl MethodParams {
    fn defaults(&self) -> MethodDefaults {
        MethodDefaults {
            bits: self.bits,
            rtree_capacity: self.rtree_capacity,
            snn_k: self.snn_k,
            cut_factor: self.cut_factor,
            sam_iterations: self.sam_iters,
            tsne: TsneConfig {
                perplexity: self.tsne_perplexity,
                iterations: self.tsne_iters,
                ..TsneConfig::default()
            },
            sigma: self.sigma,
        }
    }
}

#[derive(Args)]
struct OrderArgs {
    /// Input trajectory CSV.
    #[arg(short, long)]
    input: PathBuf,
    /// Column names as frame,id,x,y.
    #[arg(long, default_value = "frame,id,x,y")]
    columns: String,
    /// Ordering method: fxd|hil|zor|pqr|rtr|clc|snn|sam|samp|sne|snep|spc|cpc.
    #[arg(long)]
    method: String,
    /// Initialization for sam/sne (random or prev selects samp/snep
    /// behavior when the method itself allows it).
    #[arg(long, default_value = "random")]
    init: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Normalize the dataset into the unit box first.
    #[arg(long)]
    normalize: bool,
    #[command(flatten)]
    params: MethodParams,
    /// Output ordering CSV (frame,rank,id).
    #[arg(short, long)]
    output: PathBuf,
    /// Also write 1D coordinates (frame,id,coord) when the method has them.
    #[arg(long)]
    coords_out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, default_value = "frame,id,x,y")]
    columns: String,
    /// Ordering CSV produced by `shoal order`.
    #[arg(long)]
    ordering: PathBuf,
    /// Neighborhood size for the Keys Similarity metrics.
    #[arg(short, long, default_value_t = 10)]
    k: usize,
    /// Output directory for metrics.csv and summary.csv.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, default_value = "frame,id,x,y")]
    columns: String,
    /// Sigma grid step (grid runs 0..=1).
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    #[arg(short, long, default_value_t = 10)]
    k: usize,
    /// Output CSV path.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ColorModeArg {
    Frame,
    Reference,
}

#[derive(Args)]
struct RugCommonArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, default_value = "frame,id,x,y")]
    columns: String,
    /// Ordering CSV produced by `shoal order`.
    #[arg(long)]
    ordering: PathBuf,
    /// Pixels per cell.
    #[arg(long, default_value_t = 2)]
    scale: u32,
    /// Color entities by their current-frame or reference-frame position.
    #[arg(long, value_enum, default_value_t = ColorModeArg::Frame)]
    color_mode: ColorModeArg,
    /// Reference frame index for --color-mode reference.
    #[arg(long, default_value_t = 0)]
    ref_frame: usize,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Subcommand)]
enum RenderCommand {
    /// Dense rug image of an ordering.
    Rug(RugCommonArgs),
    /// Bar strip of one metric series from an evaluate run.
    Strip(StripArgs),
    /// Per-entity metric-contribution heat rug.
    Heat(HeatArgs),
    /// Motion lines from a coordinates file.
    Lines(LinesArgs),
}

#[derive(Args)]
struct StripArgs {
    /// metrics.csv from `shoal evaluate`.
    #[arg(long)]
    metrics: PathBuf,
    /// Metric name to draw (ksra|ksdi|jmp|crs|kste).
    #[arg(long)]
    metric: String,
    /// Display ceiling; defaults to 37.5 for ksdi and 6.25 for kste.
    #[arg(long)]
    cap: Option<f64>,
    /// Ceiling used when drawing ksdi (overridden by --cap).
    #[arg(long, default_value_t = DEFAULT_KSDI_CAP)]
    cap_ksdi: f64,
    /// Ceiling used when drawing kste (overridden by --cap).
    #[arg(long, default_value_t = DEFAULT_KSTE_CAP)]
    cap_kste: f64,
    #[arg(long, default_value_t = 40)]
    height: u32,
    #[arg(long, default_value_t = 2)]
    scale: u32,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct HeatArgs {
    #[command(flatten)]
    common: RugCommonArgs,
    /// Which contribution to draw: ksdi or kste.
    #[arg(long)]
    metric: String,
    #[arg(short, long, default_value_t = 10)]
    k: usize,
}

#[derive(Args)]
struct LinesArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, default_value = "frame,id,x,y")]
    columns: String,
    /// Coordinates CSV (frame,id,coord) from `shoal order --coords-out`.
    #[arg(long)]
    coords: PathBuf,
    #[arg(long, default_value_t = 400)]
    height: u32,
    #[arg(long, default_value_t = 2)]
    scale: u32,
    #[arg(long, value_enum, default_value_t = ColorModeArg::Frame)]
    color_mode: ColorModeArg,
    #[arg(long, default_value_t = 0)]
    ref_frame: usize,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct PipelineArgs {
    /// Plan file (key = value lines).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the plan's `output`).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, default_value = "frame,id,x,y")]
    columns: String,
    /// Comma-separated method tags, e.g. spc:0.5,hil,zor.
    #[arg(long)]
    methods: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    params: MethodParams,
    /// Output directory for timings.csv.
    #[arg(short, long)]
    output: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage problems exit 1; --help/--version are not errors.
            use clap::error::ErrorKind::*;
            let code = match e.kind() {
                DisplayHelp | DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }

    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Generate(args) => cmd_generate(args),
        Command::Order(args) => cmd_order(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Render(args) => cmd_render(args),
        Command::Pipeline(args) => plan::cmd_pipeline(args.config, args.output),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn load_dataset(path: &Path, columns: &str) -> anyhow::Result<TrajectoryDataset> {
    let schema = io::CsvSchema::from_spec(columns)?;
    Ok(io::load_csv(path, &schema)?)
}

fn parse_arena(spec: &str) -> anyhow::Result<Bounds> {
    let (w, h) = spec
        .split_once(['x', 'X'])
        .ok_or_else(|| anyhow::anyhow!("arena must be WIDTHxHEIGHT, got {spec:?}"))?;
    let (w, h): (f64, f64) = (w.trim().parse()?, h.trim().parse()?);
    if !(w > 0.0 && h > 0.0) {
        anyhow::bail!("arena must have positive area, got {spec:?}");
    }
    Ok(Bounds::new(Point::new(0.0, 0.0), Point::new(w, h)))
}

fn cmd_generate(args: GenerateArgs) -> anyhow::Result<()> {
    let cfg = BoidsConfig {
        clusters: args.clusters,
        boids_per_cluster: args.boids_per_cluster,
        frames: args.frames,
        arena: parse_arena(&args.arena)?,
        seed: args.seed,
        ..BoidsConfig::default()
    };
    let ds = match args.model {
        GenModel::Reynolds => gen_reynolds_clusters(&cfg)?,
        GenModel::Flocking => gen_flocking(&cfg)?,
    };
    io::save_csv(&ds, &args.output)?;
    Manifest::new("generate", args.seed)
        .param("model", match args.model {
            GenModel::Reynolds => "reynolds",
            GenModel::Flocking => "flocking",
        })
        .param("clusters", args.clusters)
        .param("boids_per_cluster", args.boids_per_cluster)
        .param("frames", args.frames)
        .param("arena", args.arena.as_str())
        .output_file(&args.output)?
        .write_next_to(&args.output)?;
    println!(
        "generated {} entities x {} frames -> {}",
        ds.entity_count(),
        ds.frame_count(),
        args.output.display()
    );
    Ok(())
}

/// Map `--method`/`--init` to a concrete method, honoring `--init prev` for
/// the embedding methods.
fn resolve_method(name: &str, init: &str, params: &MethodParams) -> anyhow::Result<Method> {
    let defaults = params.defaults();
    let mut method = Method::parse(name, &defaults).map_err(usage_error)?;
    let prev = matches!(init, "prev" | "previous" | "previous_frame");
    method = match (method, prev) {
        (Method::Sam { iterations }, true) => Method::Samp { iterations },
        (Method::Sne(cfg), true) => Method::Snep(cfg),
        (m, _) => m,
    };
    Ok(method)
}

/// Parameter-domain problems are usage errors: print the message and the
/// usage pointer, exit 1.
fn usage_error(e: CoreError) -> anyhow::Error {
    eprintln!("error: {e}");
    eprintln!("run with --help for usage");
    std::process::exit(1);
}

fn cmd_order(args: OrderArgs) -> anyhow::Result<()> {
    let method = resolve_method(&args.method, &args.init, &args.params)?;
    let mut ds = load_dataset(&args.input, &args.columns)?;
    if args.normalize {
        ds = ds.normalize()?;
    }
    let ord = method.compute(&ds, args.seed)?;
    io::save_ordering_csv(&ord, ds.entity_ids(), &args.output)?;
    if let Some(coords_path) = &args.coords_out {
        io::save_coords_csv(&ord, ds.entity_ids(), coords_path)?;
    }
    Manifest::new("order", args.seed)
        .param("method", ord.method_tag())
        .param("normalize", args.normalize)
        .input_file(&args.input)?
        .output_file(&args.output)?
        .write_next_to(&args.output)?;
    println!(
        "{} over {} frames -> {}",
        ord.method_tag(),
        ord.frame_count(),
        args.output.display()
    );
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> anyhow::Result<()> {
    let ds = load_dataset(&args.input, &args.columns)?;
    let ord = io::load_ordering_csv(&args.ordering, &ds)?;
    let spec = NeighborSpec::new(args.k).map_err(usage_error)?;
    if args.k + 1 > ds.entity_count() {
        eprintln!(
            "note: k = {} exceeds n - 1 = {}; clamping",
            args.k,
            ds.entity_count() - 1
        );
    }
    let series = shoal_core::metrics::evaluate(&ds, &ord, spec)?;

    std::fs::create_dir_all(&args.output)?;
    let mut metrics_csv = String::from("frame,metric,value\n");
    for s in &series {
        let offset = usize::from(shoal_core::metrics::STABILITY_METRICS.contains(&s.name.as_str()));
        for (i, v) in s.values.iter().enumerate() {
            metrics_csv.push_str(&format!("{},{},{}\n", i + offset, s.name, v));
        }
    }
    let mut summary_csv = String::from("metric,mean,max,min,stddev\n");
    for s in &series {
        match s.summary {
            Some(sm) => summary_csv.push_str(&format!(
                "{},{},{},{},{}\n",
                s.name, sm.mean, sm.max, sm.min, sm.stddev
            )),
            None => summary_csv.push_str(&format!("{},,,,\n", s.name)),
        }
    }
    let metrics_path = args.output.join("metrics.csv");
    let summary_path = args.output.join("summary.csv");
    io::write_text(&metrics_path, &metrics_csv)?;
    io::write_text(&summary_path, &summary_csv)?;
    Manifest::new("evaluate", 0)
        .param("k", args.k)
        .input_file(&args.input)?
        .input_file(&args.ordering)?
        .output_file(&metrics_path)?
        .output_file(&summary_path)?
        .write_into(&args.output)?;
    println!("metrics -> {}", args.output.display());
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> anyhow::Result<()> {
    if !(args.step > 0.0 && args.step <= 1.0) {
        return Err(usage_error(CoreError::Validation(format!(
            "sweep step must lie in (0, 1], got {}",
            args.step
        ))));
    }
    let ds = load_dataset(&args.input, &args.columns)?;
    let spec = NeighborSpec::new(args.k).map_err(usage_error)?;
    let sigmas: Vec<f64> = if (args.step - 0.01).abs() < 1e-12 {
        default_sigma_grid()
    } else {
        let mut v = Vec::new();
        let mut s = 0.0f64;
        while s < 1.0 + 1e-12 {
            v.push(s.min(1.0));
            s += args.step;
        }
        v
    };
    let sweep = run_sweep(&ds, &sigmas, spec)?;
    io::write_text(&args.output, &sweep.csv())?;
    Manifest::new("sweep", 0)
        .param("k", args.k)
        .param("step", args.step)
        .param("rows", sweep.rows.len())
        .param("low_cutoff", sweep.low_cutoff)
        .param("high_cutoff", sweep.high_cutoff)
        .input_file(&args.input)?
        .output_file(&args.output)?
        .write_next_to(&args.output)?;
    println!(
        "{} rows -> {} (cutoffs: low {}, high {})",
        sweep.rows.len(),
        args.output.display(),
        sweep.low_cutoff,
        sweep.high_cutoff
    );
    Ok(())
}

fn color_mode(mode: ColorModeArg, ref_frame: usize) -> ColorMode {
    match mode {
        ColorModeArg::Frame => ColorMode::CurrentFrame,
        ColorModeArg::Reference => ColorMode::ReferenceFrame(ref_frame),
    }
}

fn cmd_render(cmd: RenderCommand) -> anyhow::Result<()> {
    match cmd {
        RenderCommand::Rug(args) => {
            let ds = load_dataset(&args.input, &args.columns)?;
            let ord = io::load_ordering_csv(&args.ordering, &ds)?;
            let cm = Colormap2D::for_dataset(&ds)?;
            let cm = Colormap2D {
                mode: color_mode(args.color_mode, args.ref_frame),
                ..cm
            };
            let img = render_rug(&ds, &ord, &cm, args.scale)?;
            img.save_png(&args.output, &render_metadata(&cm))?;
            Manifest::new("render-rug", 0)
                .param("scale", args.scale)
                .input_file(&args.input)?
                .input_file(&args.ordering)?
                .output_file(&args.output)?
                .write_next_to(&args.output)?;
            println!(
                "{}x{} rug -> {}",
                img.width(),
                img.height(),
                args.output.display()
            );
        }
        RenderCommand::Strip(args) => {
            let (values, columns) = read_metric_series(&args.metrics, &args.metric)?;
            let cap = args.cap.unwrap_or(match args.metric.as_str() {
                "ksdi" => args.cap_ksdi,
                "kste" => args.cap_kste,
                _ => {
                    let max = values.iter().cloned().fold(f64::MIN, f64::max);
                    if max > 0.0 {
                        max
                    } else {
                        1.0
                    }
                }
            });
            let color = match args.metric.as_str() {
                "ksdi" | "ksra" => [235, 200, 35],
                _ => [45, 95, 225],
            };
            let series = MetricSeries::new(args.metric.clone(), values);
            let img =
                render_metric_strip(&series, cap, args.height, columns, args.scale, color)?;
            img.save_png(&args.output, &[])?;
            Manifest::new("render-strip", 0)
                .param("metric", args.metric.as_str())
                .param("cap", cap)
                .input_file(&args.metrics)?
                .output_file(&args.output)?
                .write_next_to(&args.output)?;
            println!("strip -> {}", args.output.display());
        }
        RenderCommand::Heat(args) => {
            let ds = load_dataset(&args.common.input, &args.common.columns)?;
            let ord = io::load_ordering_csv(&args.common.ordering, &ds)?;
            let spec = NeighborSpec::new(args.k).map_err(usage_error)?;
            let t_len = ds.frame_count();
            let n = ds.entity_count();
            let (contributions, base): (Vec<Vec<f64>>, _) = match args.metric.as_str() {
                "ksdi" => (
                    (0..t_len)
                        .map(|t| ksdi_contributions(ds.frame(t), ord.ranks_at(t), spec))
                        .collect::<Result<_, _>>()?,
                    [255, 220, 0],
                ),
                "kste" => {
                    let mut c = vec![vec![0.0; n]];
                    for t in 1..t_len {
                        c.push(kste_excess_contributions(
                            ord.ranks_at(t - 1),
                            ord.ranks_at(t),
                            spec,
                        )?);
                    }
                    (c, [40, 90, 220])
                }
                other => {
                    return Err(usage_error(CoreError::Validation(format!(
                        "heat rugs support ksdi or kste, got {other:?}"
                    ))))
                }
            };
            let img = render_heat_rug(&ds, &ord, &contributions, args.common.scale, base)?;
            img.save_png(&args.common.output, &[])?;
            Manifest::new("render-heat", 0)
                .param("metric", args.metric.as_str())
                .param("k", args.k)
                .input_file(&args.common.input)?
                .input_file(&args.common.ordering)?
                .output_file(&args.common.output)?
                .write_next_to(&args.common.output)?;
            println!("heat rug -> {}", args.common.output.display());
        }
        RenderCommand::Lines(args) => {
            let ds = load_dataset(&args.input, &args.columns)?;
            let ord = io::load_coords_csv(&args.coords, &ds)?;
            let cm = Colormap2D::for_dataset(&ds)?;
            let cm = Colormap2D {
                mode: color_mode(args.color_mode, args.ref_frame),
                ..cm
            };
            let img = render_motionlines(&ds, &ord, &cm, args.height, args.scale)?;
            img.save_png(&args.output, &render_metadata(&cm))?;
            Manifest::new("render-lines", 0)
                .param("height", args.height)
                .param("scale", args.scale)
                .input_file(&args.input)?
                .input_file(&args.coords)?
                .output_file(&args.output)?
                .write_next_to(&args.output)?;
            println!("motion lines -> {}", args.output.display());
        }
    }
    Ok(())
}

fn render_metadata(cm: &Colormap2D) -> Vec<(String, String)> {
    vec![
        (
            "colormap-anchors".into(),
            format!(
                "nw={:?} ne={:?} sw={:?} se={:?}",
                cm.nw, cm.ne, cm.sw, cm.se
            ),
        ),
        (
            "colormap-box".into(),
            format!(
                "[{}, {}] x [{}, {}]",
                cm.reference_box.min.x,
                cm.reference_box.max.x,
                cm.reference_box.min.y,
                cm.reference_box.max.y
            ),
        ),
    ]
}

/// Read one metric's values from a metrics.csv; returns the series and the
/// total frame count seen in the file (for strip alignment).
fn read_metric_series(path: &Path, metric: &str) -> anyhow::Result<(Vec<f64>, usize)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)?;
    let mut values: Vec<(usize, f64)> = Vec::new();
    let mut max_frame = 0usize;
    for record in reader.records() {
        let record = record?;
        let frame: usize = record.get(0).unwrap_or("").parse()?;
        max_frame = max_frame.max(frame);
        if record.get(1) == Some(metric) {
            values.push((frame, record.get(2).unwrap_or("").parse()?));
        }
    }
    if values.is_empty() {
        anyhow::bail!("metric {metric:?} not found in {}", path.display());
    }
    values.sort_by_key(|v| v.0);
    Ok((values.into_iter().map(|v| v.1).collect(), max_frame + 1))
}

fn cmd_bench(args: BenchArgs) -> anyhow::Result<()> {
    let ds = load_dataset(&args.input, &args.columns)?;
    let defaults = args.params.defaults();
    let methods: Vec<Method> = args
        .methods
        .split(',')
        .map(|tag| Method::parse(tag.trim(), &defaults).map_err(usage_error))
        .collect::<anyhow::Result<_>>()?;
    let plan = ExperimentPlan {
        methods,
        neighbor_spec: NeighborSpec::default(),
        seed: args.seed,
    };
    // Time orderings only; metrics are not part of a bench run.
    let mut timings = String::from("method,ordering_seconds\n");
    for method in &plan.methods {
        let started = std::time::Instant::now();
        let result = method.compute(&ds, plan.seed);
        let secs = started.elapsed().as_secs_f64();
        match result {
            Ok(ord) => {
                timings.push_str(&format!("{},{:.6}\n", ord.method_tag(), secs));
                println!("{:<28} {:>10.3} s", ord.method_tag(), secs);
            }
            Err(e) => {
                timings.push_str(&format!("{},error: {e}\n", method.tag(plan.seed)));
                println!("{:<28} failed: {e}", method.tag(plan.seed));
            }
        }
    }
    std::fs::create_dir_all(&args.output)?;
    let timings_path = args.output.join("timings.csv");
    io::write_text(&timings_path, &timings)?;
    Manifest::new("bench", args.seed)
        .param("methods", args.methods.as_str())
        .input_file(&args.input)?
        .output_file(&timings_path)?
        .write_into(&args.output)?;
    Ok(())
}

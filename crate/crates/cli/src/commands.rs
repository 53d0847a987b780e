//! Implementations of the `warp`, `maps`, `eval`, and `inspect` commands.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use paw_core::eval::{repeated_auc, roc_curve, score_pairs, EmbeddingSet, Similarity};
use paw_core::image::normalize_image;
use paw_core::maskops;
use paw_core::overlay;
use paw_core::pnm;
use paw_core::warp::{warp_pipeline, PipelineTrace};
use paw_core::{BinaryMask, Image, Point};
use rayon::prelude::*;

use crate::config::{ConfigArgs, MapMode, PipelineConfig};
use crate::manifest::{read_manifest, ManifestRow};

/// Landmark point sets indexed by file, then by image id.
type LandmarkTable = HashMap<PathBuf, HashMap<String, Vec<Point>>>;

#[derive(Args, Debug)]
pub struct WarpArgs {
    /// CSV manifest of input rows.
    #[arg(long, value_name = "FILE")]
    manifest: PathBuf,
    /// Directory receiving one canvas per row.
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,
    /// Abort on the first failing row instead of continuing.
    #[arg(long)]
    strict: bool,
    /// Also write every pipeline stage under <OUT_DIR>/<image_id>/.
    #[arg(long)]
    dump_stages: bool,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args, Debug)]
pub struct MapsArgs {
    /// CSV manifest of input rows.
    #[arg(long, value_name = "FILE")]
    manifest: PathBuf,
    /// Directory receiving one combined mask per row.
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,
    /// Abort on the first failing row instead of continuing.
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// JSON-lines embeddings: {"subject_id", "image_id", "embedding"}.
    #[arg(long, value_name = "FILE")]
    embeddings: PathBuf,
    /// Output report JSON file.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Repeated impostor-subsampling trials.
    #[arg(long, default_value_t = 5)]
    trials: u32,
    /// Impostor pairs scored per trial; all pairs when omitted.
    #[arg(long, value_name = "N")]
    impostor_cap: Option<u64>,
    /// Base seed for the per-trial subsampling generator.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Pair similarity function.
    #[arg(long, value_enum, default_value_t = SimilarityArg::Dot)]
    similarity: SimilarityArg,
    /// Optional ROC curve CSV (fpr,tpr) over all pairs.
    #[arg(long, value_name = "FILE")]
    roc_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct InspectArgs {
    /// Input image (P5/P6; PNG when built with the png feature).
    #[arg(long, value_name = "FILE")]
    image: PathBuf,
    /// Segmentation mask image.
    #[arg(long, value_name = "FILE")]
    seg_mask: Option<PathBuf>,
    /// Landmark JSON-lines file.
    #[arg(long, value_name = "FILE")]
    landmarks: Option<PathBuf>,
    /// Id used for landmark lookup and output naming [default: image stem].
    #[arg(long, value_name = "ID")]
    image_id: Option<String>,
    /// Directory receiving the stage dump.
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum SimilarityArg {
    /// Raw dot product.
    Dot,
    /// Dot product of length-normalized vectors.
    Cosine,
}

impl From<SimilarityArg> for Similarity {
    fn from(arg: SimilarityArg) -> Self {
        match arg {
            SimilarityArg::Dot => Similarity::Dot,
            SimilarityArg::Cosine => Similarity::Cosine,
        }
    }
}

/// Builds the worker pool, capped by the `PAW_THREADS` env var when set.
fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var("PAW_THREADS") {
        let threads: usize = value
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| anyhow!("PAW_THREADS must be a positive integer, got `{value}`"))?;
        builder = builder.num_threads(threads);
    }
    builder.build().context("building worker pool")
}

/// Rejects the run up front when the mode needs a column some row lacks.
fn require_inputs(rows: &[ManifestRow], mode: MapMode) -> Result<()> {
    let (need_seg, need_landmarks) = match mode {
        MapMode::Segmentation => (true, false),
        MapMode::Landmark => (false, true),
        MapMode::Union | MapMode::Intersection => (true, true),
        MapMode::None => (false, false),
    };
    for (i, row) in rows.iter().enumerate() {
        if need_seg && row.seg_mask_path.is_none() {
            bail!(
                "map_mode {} requires seg_mask_path, missing in row {} ({})",
                mode.name(),
                i + 1,
                row.image_id
            );
        }
        if need_landmarks && row.landmark_path.is_none() {
            bail!(
                "map_mode {} requires landmark_path, missing in row {} ({})",
                mode.name(),
                i + 1,
                row.image_id
            );
        }
    }
    Ok(())
}

/// Loads each distinct landmark file once, keyed by image id.
fn load_landmark_tables(rows: &[ManifestRow]) -> Result<LandmarkTable> {
    let mut tables = LandmarkTable::new();
    for row in rows {
        let Some(path) = &row.landmark_path else {
            continue;
        };
        if tables.contains_key(path) {
            continue;
        }
        let records = maskops::read_landmark_file(path)
            .with_context(|| format!("reading landmarks `{}`", path.display()))?;
        let table = records
            .into_iter()
            .map(|r| {
                let points = r.points.iter().map(|&[x, y]| Point::new(x, y)).collect();
                (r.image_id, points)
            })
            .collect();
        tables.insert(path.clone(), table);
    }
    Ok(tables)
}

/// Produces the region mask for one row under the configured map mode.
///
/// Single-source masks stay in the source frame; union and intersection are
/// taken after both sides are normalized, and an empty combination is an
/// EmptyMask error.
fn region_mask(
    row: &ManifestRow,
    cfg: &PipelineConfig,
    image: &Image,
    landmarks: &LandmarkTable,
) -> Result<BinaryMask> {
    let seg = || -> Result<BinaryMask> {
        let path = row
            .seg_mask_path
            .as_ref()
            .expect("checked by require_inputs");
        let mask_image =
            pnm::read_auto(path).with_context(|| format!("reading mask `{}`", path.display()))?;
        Ok(maskops::binarize(&mask_image, cfg.threshold)?)
    };
    let landmark = || -> Result<BinaryMask> {
        let path = row
            .landmark_path
            .as_ref()
            .expect("checked by require_inputs");
        let points = landmarks
            .get(path)
            .and_then(|table| table.get(&row.image_id))
            .ok_or_else(|| {
                anyhow!(
                    "no landmark record for `{}` in `{}`",
                    row.image_id,
                    path.display()
                )
            })?;
        Ok(maskops::landmarks_to_mask(
            points,
            image.width(),
            image.height(),
        )?)
    };

    match cfg.map_mode {
        MapMode::Segmentation => seg(),
        MapMode::Landmark => landmark(),
        MapMode::None => bail!("map_mode none produces no region mask"),
        mode @ (MapMode::Union | MapMode::Intersection) => {
            let a = maskops::normalize_mask(&seg()?).context("segmentation map")?;
            let b = maskops::normalize_mask(&landmark()?).context("landmark map")?;
            let combined = if mode == MapMode::Union {
                maskops::union(&a, &b)?
            } else {
                maskops::intersect(&a, &b)?
            };
            if combined.count_true() == 0 {
                return Err(paw_core::Error::EmptyMask.into());
            }
            Ok(combined)
        }
    }
}

fn write_image(image: &Image, path: &Path) -> Result<()> {
    pnm::write(image, path).with_context(|| format!("writing `{}`", path.display()))
}

fn canvas_path(out_dir: &Path, image_id: &str, channels: usize) -> PathBuf {
    let ext = if channels == 1 { "pgm" } else { "ppm" };
    out_dir.join(format!("{image_id}.canvas.{ext}"))
}

/// Writes every intermediate stage under `<out_dir>/<image_id>/`.
fn dump_stages(out_dir: &Path, image_id: &str, trace: &PipelineTrace) -> Result<PathBuf> {
    let dir = out_dir.join(image_id);
    fs::create_dir_all(&dir).with_context(|| format!("creating `{}`", dir.display()))?;
    let stage = |name: &str, img: &Image| -> Result<()> {
        let ext = if img.channels() == 1 { "pgm" } else { "ppm" };
        write_image(img, &dir.join(format!("{image_id}.{name}.{ext}")))
    };
    stage("normalized", &trace.normalized)?;
    stage("mask", &trace.mask.to_image())?;
    stage("component", &trace.component.to_image())?;
    stage(
        "hull",
        &overlay::hull_overlay(&trace.normalized, &trace.hull),
    )?;
    stage(
        "anchors",
        &overlay::anchor_overlay(&trace.normalized, &trace.fan),
    )?;
    stage(
        "fan",
        &overlay::pipeline_overlay(&trace.normalized, &trace.hull, &trace.fan),
    )?;
    for (k, patch) in trace.patches.iter().enumerate() {
        stage(&format!("patch{k:02}"), patch)?;
    }
    stage("canvas", &trace.canvas)?;
    Ok(dir)
}

/// Runs one manifest row through the pipeline and writes its canvas.
fn warp_row(
    row: &ManifestRow,
    cfg: &PipelineConfig,
    out_dir: &Path,
    dump: bool,
    landmarks: &LandmarkTable,
) -> Result<PathBuf> {
    let image = pnm::read_auto(&row.image_path)
        .with_context(|| format!("reading image `{}`", row.image_path.display()))?;

    if cfg.map_mode == MapMode::None {
        let resized = normalize_image(&image, cfg.canvas, cfg.canvas)?;
        let path = canvas_path(out_dir, &row.image_id, resized.channels());
        write_image(&resized, &path)?;
        return Ok(path);
    }

    let mask = region_mask(row, cfg, &image, landmarks)?;
    let trace = warp_pipeline(&image, &mask, &cfg.warp_config())?;
    let path = canvas_path(out_dir, &row.image_id, trace.canvas.channels());
    write_image(&trace.canvas, &path)?;
    if dump {
        dump_stages(out_dir, &row.image_id, &trace)?;
    }
    Ok(path)
}

/// Runs rows either serially (strict: abort on first failure) or in the
/// worker pool; results come back in manifest order either way.
fn run_rows<F>(
    pool: &rayon::ThreadPool,
    rows: &[ManifestRow],
    strict: bool,
    job: F,
) -> Vec<(usize, Result<PathBuf>)>
where
    F: Fn(&ManifestRow) -> Result<PathBuf> + Sync,
{
    if strict {
        pool.install(|| {
            let mut out = Vec::new();
            for (i, row) in rows.iter().enumerate() {
                let result = job(row);
                let failed = result.is_err();
                out.push((i, result));
                if failed {
                    break;
                }
            }
            out
        })
    } else {
        pool.install(|| {
            rows.par_iter()
                .enumerate()
                .map(|(i, row)| (i, job(row)))
                .collect()
        })
    }
}

pub fn warp(args: WarpArgs) -> Result<ExitCode> {
    let cfg = args.config.resolve()?;
    let rows = read_manifest(&args.manifest)?;
    require_inputs(&rows, cfg.map_mode)?;
    let landmarks = load_landmark_tables(&rows)?;
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating `{}`", args.out_dir.display()))?;
    let pool = thread_pool()?;

    let reports = run_rows(&pool, &rows, args.strict, |row| {
        warp_row(row, &cfg, &args.out_dir, args.dump_stages, &landmarks)
    });

    let mut failures = 0;
    for (i, result) in &reports {
        let id = &rows[*i].image_id;
        match result {
            Ok(path) => eprintln!("[warp] row {} ({id}): wrote {}", i + 1, path.display()),
            Err(e) => {
                failures += 1;
                eprintln!("[warp] row {} ({id}): FAILED: {e:#}", i + 1);
            }
        }
    }
    eprintln!(
        "[warp] {} of {} rows succeeded",
        reports.len() - failures,
        rows.len()
    );
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

pub fn maps(args: MapsArgs) -> Result<ExitCode> {
    let cfg = args.config.resolve()?;
    if cfg.map_mode == MapMode::None {
        bail!(
            "maps requires a mask-producing map_mode (segmentation, landmark, union, intersection)"
        );
    }
    let rows = read_manifest(&args.manifest)?;
    require_inputs(&rows, cfg.map_mode)?;
    let landmarks = load_landmark_tables(&rows)?;
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating `{}`", args.out_dir.display()))?;
    let pool = thread_pool()?;

    let reports = run_rows(&pool, &rows, args.strict, |row| {
        let image = pnm::read_auto(&row.image_path)
            .with_context(|| format!("reading image `{}`", row.image_path.display()))?;
        let mask = region_mask(row, &cfg, &image, &landmarks)?;
        let normalized = maskops::normalize_mask(&mask)?;
        let path = args.out_dir.join(format!("{}.mask.pgm", row.image_id));
        write_image(&normalized.to_image(), &path)?;
        Ok(path)
    });

    let mut failures = 0;
    for (i, result) in &reports {
        let id = &rows[*i].image_id;
        match result {
            Ok(path) => eprintln!("[maps] row {} ({id}): wrote {}", i + 1, path.display()),
            Err(e) if is_empty_mask(e) => {
                eprintln!("[maps] row {} ({id}): skipped: {e:#}", i + 1);
            }
            Err(e) => {
                failures += 1;
                eprintln!("[maps] row {} ({id}): FAILED: {e:#}", i + 1);
            }
        }
    }
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

/// True when the error chain bottoms out in EmptyMask (a skippable row for
/// `maps`: the combination simply has no pixels).
fn is_empty_mask(err: &anyhow::Error) -> bool {
    matches!(
        err.downcast_ref::<paw_core::Error>(),
        Some(paw_core::Error::EmptyMask)
    )
}

pub fn eval(args: EvalArgs) -> Result<ExitCode> {
    let set = EmbeddingSet::from_jsonl(&args.embeddings)
        .with_context(|| format!("loading embeddings `{}`", args.embeddings.display()))?;
    let sim: Similarity = args.similarity.into();
    let report = repeated_auc(&set, sim, args.trials, args.impostor_cap, args.seed)?;

    let json = serde_json::to_string_pretty(&report)?;
    fs::write(&args.out, json + "\n")
        .with_context(|| format!("writing `{}`", args.out.display()))?;

    eprintln!(
        "[eval] subjects={} images={} genuine_pairs={} impostor_pairs={}",
        set.subject_count(),
        set.image_count(),
        report.genuine_pairs,
        report.impostor_pairs
    );
    eprintln!(
        "[eval] auc mean={:.6} half_width={:.6} trials={} seed={}",
        report.mean, report.half_width, report.trials, report.seed
    );
    eprintln!("[eval] wrote {}", args.out.display());

    if let Some(path) = &args.roc_csv {
        let (genuine, impostor) = score_pairs(&set, sim);
        let curve = roc_curve(&genuine, &impostor)?;
        let mut csv = String::from("fpr,tpr\n");
        for (fpr, tpr) in curve {
            csv.push_str(&format!("{fpr},{tpr}\n"));
        }
        fs::write(path, csv).with_context(|| format!("writing `{}`", path.display()))?;
        eprintln!("[eval] wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

pub fn inspect(args: InspectArgs) -> Result<ExitCode> {
    let cfg = args.config.resolve()?;
    if cfg.map_mode == MapMode::None {
        bail!(
            "inspect requires a mask-producing map_mode (the plain-resize baseline has no stages)"
        );
    }
    let image_id = args.image_id.clone().unwrap_or_else(|| {
        args.image
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "image".into())
    });
    let row = ManifestRow {
        image_id: image_id.clone(),
        image_path: args.image.clone(),
        seg_mask_path: args.seg_mask.clone(),
        landmark_path: args.landmarks.clone(),
        subject_id: None,
    };
    require_inputs(std::slice::from_ref(&row), cfg.map_mode)?;
    let landmarks = load_landmark_tables(std::slice::from_ref(&row))?;

    let image = pnm::read_auto(&row.image_path)
        .with_context(|| format!("reading image `{}`", row.image_path.display()))?;
    let mask = region_mask(&row, &cfg, &image, &landmarks)?;
    let pool = thread_pool()?;
    let trace = pool.install(|| warp_pipeline(&image, &mask, &cfg.warp_config()))?;

    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating `{}`", args.out_dir.display()))?;
    let dir = dump_stages(&args.out_dir, &image_id, &trace)?;

    println!(
        "image: {} ({}x{}, {} channel(s))",
        row.image_path.display(),
        image.width(),
        image.height(),
        image.channels()
    );
    println!("boundary pixels: {}", trace.contour.points().len());
    println!("hull vertices: {}", trace.hull.len());
    println!(
        "anchors: {} around centroid ({:.3}, {:.3})",
        trace.fan.anchors().len(),
        trace.fan.centroid().x,
        trace.fan.centroid().y
    );
    println!("canvas: {}x{}", trace.canvas.width(), trace.canvas.height());
    println!("stage dump: {}", dir.display());
    Ok(ExitCode::SUCCESS)
}

//! Command-line front end: scenario generation and evaluation as
//! reproducible, scriptable runs.
//!
//! Exit codes are a stable contract: 0 success, 1 runtime/data error,
//! 2 usage error. Every successful run writes a JSON manifest recording
//! the resolved configuration, the seed, and the produced files.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{ArgAction, Args, Parser, Subcommand};
use nalgebra::Point3;
use serde::Serialize;

use crate::hill::{bounded_ic, cw_closed_form, inclined_bounded_ic, OrbitParams, Trajectory};
use crate::mesh::{
    build_bvh, c2m_signed, export_heatmap, icp_refine, load_mesh, sample_surface, umeyama_align,
    SimilarityTransform, TriangleMesh,
};
use crate::metrics::batch_eval;
use crate::scenario::{export_ground_truth, export_transforms, ScenarioConfigFile};
use crate::stats::{Direction, DistanceReport, Histogram};

#[derive(Debug, Parser)]
#[command(
    name = "flyaround",
    version,
    about = "Relative-orbit fly-around dataset generation and mesh/image evaluation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate a bounded relative orbit and write it as CSV.
    GenOrbit(GenOrbitArgs),
    /// Generate a camera dataset (transforms JSON + ground-truth CSV).
    GenDataset(GenDatasetArgs),
    /// Signed cloud-to-mesh evaluation of a reconstruction against a reference.
    EvalMesh(EvalMeshArgs),
    /// PSNR/SSIM over paired PNG directories.
    EvalImages(EvalImagesArgs),
}

#[derive(Debug, Args)]
pub struct GenOrbitArgs {
    /// Initial radial offset (m).
    #[arg(long, default_value_t = 40.0, allow_negative_numbers = true)]
    pub x0: f64,
    /// Chief circular-orbit altitude (km).
    #[arg(long, default_value_t = 500.0)]
    pub altitude_km: f64,
    /// Propagation length: seconds, or "period" for one orbital period.
    #[arg(long, default_value = "period")]
    pub duration: String,
    /// Sample spacing (s).
    #[arg(long, default_value_t = 10.0)]
    pub dt: f64,
    /// In-plane 2:1 ellipse instead of the default inclined orbit.
    #[arg(long, conflicts_with = "inclined")]
    pub planar: bool,
    /// Out-of-plane orbit inclined 45 degrees (the default).
    #[arg(long)]
    pub inclined: bool,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenDatasetArgs {
    /// TOML config file; flags below override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub altitude_km: Option<f64>,
    #[arg(long)]
    pub frames: Option<usize>,
    #[arg(long)]
    pub tumble_rate_deg_s: Option<f64>,
    /// "x" | "y" | "z" or a comma-separated 3-vector.
    #[arg(long)]
    pub tumble_axis: Option<String>,
    /// Seconds, or "period".
    #[arg(long)]
    pub duration: Option<String>,
    #[arg(long)]
    pub fov_deg: Option<f64>,
    #[arg(long)]
    pub width: Option<u32>,
    #[arg(long)]
    pub height: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalMeshArgs {
    /// Reconstructed mesh (OBJ or PLY).
    #[arg(long)]
    pub recon: PathBuf,
    /// Reference mesh (OBJ or PLY).
    #[arg(long = "ref")]
    pub reference: PathBuf,
    /// Surface samples per direction.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Also compute the reference-to-reconstruction direction.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub both_directions: bool,
    /// none | umeyama:<correspondence csv> | icp
    #[arg(long, default_value = "none")]
    pub align: String,
    /// gaussian | weibull | both
    #[arg(long, default_value = "gaussian")]
    pub fit: String,
    /// Missing-part cutoff in meters, or "auto" (1% of reference diagonal).
    #[arg(long, default_value = "auto")]
    pub missing_threshold: String,
    /// Divide all distances by the reference bounding-box diagonal.
    #[arg(long)]
    pub normalize_by_diagonal: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalImagesArgs {
    /// Directory of rendered PNGs.
    #[arg(long)]
    pub rendered: PathBuf,
    /// Directory of ground-truth PNGs.
    #[arg(long)]
    pub gt: PathBuf,
    /// Output metrics CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

/// Record of one successful run; enough to reproduce its outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub version: String,
    pub outputs: Vec<String>,
    pub duration_seconds: f64,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flag values or combinations; exit code 2.
    Usage(String),
    /// Data or I/O failures at run time; exit code 1.
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Runtime(e) => write!(f, "error: {e:#}"),
        }
    }
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Runtime(e.into())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Dispatches a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let started = Instant::now();
    let result = match cli.command {
        Command::GenOrbit(args) => cmd_gen_orbit(&args, started),
        Command::GenDataset(args) => cmd_gen_dataset(&args, started),
        Command::EvalMesh(args) => cmd_eval_mesh(&args, started),
        Command::EvalImages(args) => cmd_eval_images(&args, started),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn write_manifest(path: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(manifest).map_err(anyhow::Error::from)?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("writing {}: {e}", path.display())))
}

/// Manifest path for a single-file output: `<out>.manifest.json` next to it.
fn sibling_manifest(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn parse_duration(text: &str, orbit: &OrbitParams) -> Result<f64, CliError> {
    if text == "period" {
        return Ok(orbit.period());
    }
    let seconds: f64 = text
        .parse()
        .map_err(|_| usage(format!("--duration: expected seconds or \"period\", got {text:?}")))?;
    if !(seconds > 0.0) {
        return Err(usage(format!("--duration must be positive, got {seconds}")));
    }
    Ok(seconds)
}

fn cmd_gen_orbit(args: &GenOrbitArgs, started: Instant) -> Result<(), CliError> {
    if args.x0 < 0.0 {
        return Err(usage(format!("--x0 must be >= 0, got {}", args.x0)));
    }
    if !(args.dt > 0.0) {
        return Err(usage(format!("--dt must be positive, got {}", args.dt)));
    }
    let params = OrbitParams::from_altitude_km(args.altitude_km)
        .map_err(|e| usage(format!("--altitude-km: {e}")))?;
    let duration = parse_duration(&args.duration, &params)?;

    let n = params.mean_motion;
    let ic = if args.planar { bounded_ic(args.x0, n) } else { inclined_bounded_ic(args.x0, n) };
    let steps = (duration / args.dt).floor() as usize;
    let samples = (0..=steps).map(|k| cw_closed_form(&ic, n, k as f64 * args.dt)).collect();
    let trajectory = Trajectory { samples, params };

    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(anyhow::Error::from)?;
        }
    }
    trajectory
        .write_csv(&args.out)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("writing {}: {e}", args.out.display())))?;

    let manifest = RunManifest {
        command: "gen-orbit".into(),
        config: serde_json::json!({
            "x0": args.x0,
            "altitude_km": args.altitude_km,
            "duration": duration,
            "dt": args.dt,
            "geometry": if args.planar { "planar" } else { "inclined" },
            "orbit": params,
        }),
        seed: 0,
        version: env!("CARGO_PKG_VERSION").into(),
        outputs: vec![args.out.display().to_string()],
        duration_seconds: started.elapsed().as_secs_f64(),
    };
    write_manifest(&sibling_manifest(&args.out), &manifest)
}

fn cmd_gen_dataset(args: &GenDatasetArgs, started: Instant) -> Result<(), CliError> {
    let mut file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Runtime(anyhow::anyhow!("reading {}: {e}", path.display())))?;
            ScenarioConfigFile::parse(&text)
                .map_err(|e| CliError::Runtime(anyhow::anyhow!("{}: {e}", path.display())))?
        }
        None => ScenarioConfigFile::default(),
    };
    // flags override file keys
    if args.x0.is_some() {
        file.x0 = args.x0;
    }
    if args.altitude_km.is_some() {
        file.altitude_km = args.altitude_km;
    }
    if args.frames.is_some() {
        file.frame_count = args.frames;
    }
    if args.tumble_rate_deg_s.is_some() {
        file.tumble_rate_deg_s = args.tumble_rate_deg_s;
    }
    if args.tumble_axis.is_some() {
        file.tumble_axis = args.tumble_axis.clone();
    }
    if let Some(d) = &args.duration {
        file.duration = Some(match d.parse::<f64>() {
            Ok(v) => toml::Value::Float(v),
            Err(_) => toml::Value::String(d.clone()),
        });
    }
    if args.fov_deg.is_some() {
        file.fov_deg = args.fov_deg;
    }
    if args.width.is_some() {
        file.width = args.width;
    }
    if args.height.is_some() {
        file.height = args.height;
    }
    if args.seed.is_some() {
        file.seed = args.seed;
    }
    let config = file.resolve().map_err(|e| usage(e.to_string()))?;

    std::fs::create_dir_all(&args.out_dir).map_err(anyhow::Error::from)?;
    let dataset = crate::scenario::build_scenario(&config).map_err(anyhow::Error::from)?;
    let transforms_path = args.out_dir.join("transforms.json");
    let gt_path = args.out_dir.join("ground_truth.csv");
    export_transforms(&dataset, &transforms_path).map_err(anyhow::Error::from)?;
    export_ground_truth(&dataset, &gt_path).map_err(anyhow::Error::from)?;

    let manifest = RunManifest {
        command: "gen-dataset".into(),
        config: serde_json::to_value(&config).map_err(anyhow::Error::from)?,
        seed: config.seed,
        version: env!("CARGO_PKG_VERSION").into(),
        outputs: vec![
            transforms_path.display().to_string(),
            gt_path.display().to_string(),
        ],
        duration_seconds: started.elapsed().as_secs_f64(),
    };
    write_manifest(&args.out_dir.join("manifest.json"), &manifest)
}

#[derive(Debug, Clone, PartialEq)]
enum AlignMode {
    None,
    Umeyama(PathBuf),
    Icp,
}

fn parse_align(text: &str) -> Result<AlignMode, CliError> {
    match text {
        "none" => Ok(AlignMode::None),
        "icp" => Ok(AlignMode::Icp),
        other => match other.strip_prefix("umeyama:") {
            Some(path) if !path.is_empty() => Ok(AlignMode::Umeyama(PathBuf::from(path))),
            _ => Err(usage(format!(
                "--align: expected none, icp, or umeyama:<file>, got {other:?}"
            ))),
        },
    }
}

/// Correspondence CSV: one `sx,sy,sz,dx,dy,dz` row per pair; `#` comments
/// and a non-numeric header row are skipped.
fn load_correspondences(path: &Path) -> Result<(Vec<Point3<f64>>, Vec<Point3<f64>>), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("reading {}: {e}", path.display())))?;
    let mut src = Vec::new();
    let mut dst = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 6 {
            return Err(CliError::Runtime(anyhow::anyhow!(
                "{}:{}: expected 6 comma-separated values, got {}",
                path.display(),
                lineno + 1,
                fields.len()
            )));
        }
        let mut v = [0.0f64; 6];
        let mut numeric = true;
        for (i, f) in fields.iter().enumerate() {
            match f.parse() {
                Ok(x) => v[i] = x,
                Err(_) => {
                    numeric = false;
                    break;
                }
            }
        }
        if !numeric {
            if lineno == 0 {
                continue; // header row
            }
            return Err(CliError::Runtime(anyhow::anyhow!(
                "{}:{}: non-numeric field",
                path.display(),
                lineno + 1
            )));
        }
        src.push(Point3::new(v[0], v[1], v[2]));
        dst.push(Point3::new(v[3], v[4], v[5]));
    }
    Ok((src, dst))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FitChoice {
    Gaussian,
    Weibull,
    Both,
}

fn parse_fit(text: &str) -> Result<FitChoice, CliError> {
    match text {
        "gaussian" => Ok(FitChoice::Gaussian),
        "weibull" => Ok(FitChoice::Weibull),
        "both" => Ok(FitChoice::Both),
        other => Err(usage(format!("--fit: expected gaussian, weibull, or both, got {other:?}"))),
    }
}

fn apply_fits(report: DistanceReport, fit: FitChoice) -> Result<DistanceReport, CliError> {
    let report = match fit {
        FitChoice::Gaussian | FitChoice::Both => report.with_gaussian_fit().map_err(anyhow::Error::from)?,
        FitChoice::Weibull => report,
    };
    Ok(match fit {
        FitChoice::Weibull | FitChoice::Both => report.with_weibull_fit().map_err(anyhow::Error::from)?,
        FitChoice::Gaussian => report,
    })
}

/// Applies the requested alignment and returns the transformed
/// reconstruction plus the transform for the manifest.
fn align_recon(
    recon: &TriangleMesh,
    reference: &TriangleMesh,
    mode: &AlignMode,
    samples: usize,
    seed: u64,
) -> Result<(TriangleMesh, SimilarityTransform), CliError> {
    match mode {
        AlignMode::None => Ok((recon.clone(), SimilarityTransform::identity())),
        AlignMode::Umeyama(path) => {
            let (src, dst) = load_correspondences(path)?;
            let transform = umeyama_align(&src, &dst, true).map_err(anyhow::Error::from)?;
            Ok((recon.transformed(&transform), transform))
        }
        AlignMode::Icp => {
            let accel = build_bvh(reference);
            // a few thousand points suffice for a rigid refinement
            let cloud = sample_surface(recon, samples.clamp(1, 20_000), seed)
                .map_err(anyhow::Error::from)?;
            let result = icp_refine(
                &cloud.points,
                reference,
                &accel,
                SimilarityTransform::identity(),
                50,
                0.1,
            )
            .map_err(anyhow::Error::from)?;
            Ok((recon.transformed(&result.transform), result.transform))
        }
    }
}

fn histogram_csv_rows(out: &mut String, direction: &str, h: &Histogram) {
    use std::fmt::Write as _;
    for (i, &count) in h.counts.iter().enumerate() {
        let _ = writeln!(out, "{},{},{},{}", direction, h.edges[i], h.edges[i + 1], count);
    }
}

fn cmd_eval_mesh(args: &EvalMeshArgs, started: Instant) -> Result<(), CliError> {
    if args.samples == 0 {
        return Err(usage("--samples must be >= 1"));
    }
    let align_mode = parse_align(&args.align)?;
    let fit = parse_fit(&args.fit)?;
    let missing_threshold = match args.missing_threshold.as_str() {
        "auto" => None,
        text => {
            let v: f64 = text.parse().map_err(|_| {
                usage(format!("--missing-threshold: expected meters or \"auto\", got {text:?}"))
            })?;
            if !(v > 0.0) {
                return Err(usage(format!("--missing-threshold must be positive, got {v}")));
            }
            Some(v)
        }
    };

    let (recon_raw, recon_stats) = load_mesh(&args.recon).map_err(anyhow::Error::from)?;
    let (reference, ref_stats) = load_mesh(&args.reference).map_err(anyhow::Error::from)?;
    let (recon, transform) =
        align_recon(&recon_raw, &reference, &align_mode, args.samples, args.seed)?;
    let diagonal = reference.bounding_box_diagonal();

    std::fs::create_dir_all(&args.out_dir).map_err(anyhow::Error::from)?;

    let normalize = |r: DistanceReport| -> Result<DistanceReport, CliError> {
        if args.normalize_by_diagonal {
            Ok(r.normalized_by(diagonal).map_err(anyhow::Error::from)?)
        } else {
            Ok(r)
        }
    };

    let (recon_to_ref, ref_to_recon, coverage, recon_cloud_points) = if args.both_directions {
        let report = crate::mesh::bidirectional_report(
            &recon,
            &reference,
            args.samples,
            missing_threshold,
            args.seed,
        )
        .map_err(anyhow::Error::from)?;
        (
            report.recon_to_ref,
            Some(report.ref_to_recon),
            Some(report.coverage),
            report.recon_cloud.points,
        )
    } else {
        let accel = build_bvh(&reference);
        let cloud = sample_surface(&recon, args.samples, args.seed).map_err(anyhow::Error::from)?;
        let report = c2m_signed(&cloud.points, &reference, &accel, Direction::ReconToRef)
            .map_err(anyhow::Error::from)?;
        (report, None, None, cloud.points)
    };

    let recon_to_ref = normalize(apply_fits(recon_to_ref, fit)?)?;
    let ref_to_recon = match ref_to_recon {
        Some(r) => Some(normalize(apply_fits(r, fit)?)?),
        None => None,
    };

    // heatmap uses un-normalized geometry with the (possibly normalized)
    // report's distances: positions must stay in mesh coordinates
    let heatmap_path = args.out_dir.join("heatmap.ply");
    export_heatmap(&recon_cloud_points, &recon_to_ref.signed_distances, &heatmap_path)
        .map_err(anyhow::Error::from)?;

    let report_path = args.out_dir.join("report.json");
    let report_json = serde_json::json!({
        "recon": args.recon.display().to_string(),
        "reference": args.reference.display().to_string(),
        "samples_per_direction": args.samples,
        "alignment": match &align_mode {
            AlignMode::None => serde_json::Value::Null,
            _ => serde_json::to_value(transform).map_err(anyhow::Error::from)?,
        },
        "normalized_by_diagonal": if args.normalize_by_diagonal {
            Some(diagonal)
        } else {
            None
        },
        "recon_to_ref": recon_to_ref,
        "ref_to_recon": ref_to_recon,
        "coverage": coverage,
    });
    let mut report_text = serde_json::to_string_pretty(&report_json).map_err(anyhow::Error::from)?;
    report_text.push('\n');
    std::fs::write(&report_path, report_text).map_err(anyhow::Error::from)?;

    let histogram_path = args.out_dir.join("histogram.csv");
    let mut csv = String::from("direction,bin_lo,bin_hi,count\n");
    histogram_csv_rows(&mut csv, "recon->ref", &recon_to_ref.histogram);
    if let Some(r) = &ref_to_recon {
        histogram_csv_rows(&mut csv, "ref->recon", &r.histogram);
    }
    std::fs::write(&histogram_path, csv).map_err(anyhow::Error::from)?;

    let manifest = RunManifest {
        command: "eval-mesh".into(),
        config: serde_json::json!({
            "recon": args.recon.display().to_string(),
            "ref": args.reference.display().to_string(),
            "recon_loaded": { "vertices": recon_stats.vertices, "triangles": recon_stats.triangles },
            "ref_loaded": { "vertices": ref_stats.vertices, "triangles": ref_stats.triangles },
            "samples": args.samples,
            "both_directions": args.both_directions,
            "align": args.align,
            "fit": args.fit,
            "missing_threshold": args.missing_threshold,
            "normalize_by_diagonal": args.normalize_by_diagonal,
        }),
        seed: args.seed,
        version: env!("CARGO_PKG_VERSION").into(),
        outputs: vec![
            report_path.display().to_string(),
            heatmap_path.display().to_string(),
            histogram_path.display().to_string(),
        ],
        duration_seconds: started.elapsed().as_secs_f64(),
    };
    write_manifest(&args.out_dir.join("manifest.json"), &manifest)
}

fn cmd_eval_images(args: &EvalImagesArgs, started: Instant) -> Result<(), CliError> {
    let report = batch_eval(&args.rendered, &args.gt).map_err(anyhow::Error::from)?;
    for name in &report.unmatched {
        eprintln!("warning: unmatched file skipped: {name}");
    }
    for (name, reason) in &report.failures {
        eprintln!("warning: pair {name} failed: {reason}");
    }
    if !report.failures.is_empty() {
        eprintln!("summary: {} pair(s) failed, {} evaluated", report.failures.len(), report.rows.len());
    }
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(anyhow::Error::from)?;
        }
    }
    std::fs::write(&args.out, report.to_csv())
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("writing {}: {e}", args.out.display())))?;

    let manifest = RunManifest {
        command: "eval-images".into(),
        config: serde_json::json!({
            "rendered": args.rendered.display().to_string(),
            "gt": args.gt.display().to_string(),
            "pairs": report.rows.len(),
            "unmatched": report.unmatched.len(),
            "failures": report.failures.len(),
        }),
        seed: 0,
        version: env!("CARGO_PKG_VERSION").into(),
        outputs: vec![args.out.display().to_string()],
        duration_seconds: started.elapsed().as_secs_f64(),
    };
    write_manifest(&sibling_manifest(&args.out), &manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn align_spec_parses() {
        assert_eq!(parse_align("none").unwrap(), AlignMode::None);
        assert_eq!(parse_align("icp").unwrap(), AlignMode::Icp);
        assert_eq!(
            parse_align("umeyama:pairs.csv").unwrap(),
            AlignMode::Umeyama(PathBuf::from("pairs.csv"))
        );
        assert!(matches!(parse_align("umeyama:"), Err(CliError::Usage(_))));
        assert!(matches!(parse_align("ransac"), Err(CliError::Usage(_))));
    }

    #[test]
    fn manifest_sits_next_to_single_file_output() {
        assert_eq!(
            sibling_manifest(Path::new("runs/orbit.csv")),
            PathBuf::from("runs/orbit.csv.manifest.json")
        );
    }

    #[test]
    fn correspondence_file_with_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pairs.csv");
        std::fs::write(&path, "sx,sy,sz,dx,dy,dz\n# comment\n0,0,0,1,0,0\n1,0,0,2,0,0\n")
            .unwrap();
        let (src, dst) = load_correspondences(&path).unwrap();
        assert_eq!(src.len(), 2);
        assert_eq!(dst[0], Point3::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn correspondence_bad_width_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pairs.csv");
        std::fs::write(&path, "0,0,0,1\n").unwrap();
        assert!(load_correspondences(&path).is_err());
    }

    #[test]
    fn cli_parses_eval_mesh_ref_flag() {
        let cli = Cli::try_parse_from([
            "flyaround",
            "eval-mesh",
            "--recon",
            "a.ply",
            "--ref",
            "b.ply",
            "--out-dir",
            "out",
            "--both-directions",
            "false",
        ])
        .unwrap();
        match cli.command {
            Command::EvalMesh(args) => {
                assert_eq!(args.reference, PathBuf::from("b.ply"));
                assert!(!args.both_directions);
                assert_eq!(args.samples, 100_000);
            }
            _ => panic!("wrong subcommand"),
        }
    }
}

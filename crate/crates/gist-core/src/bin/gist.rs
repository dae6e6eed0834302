//! Command-line front end.
//!
//! Two modes share one flag set: a single stylization (`--content`,
//! `--style`, `--out`) and a batch run over a manifest (`--manifest`,
//! `--report`).  A TOML config file supplies defaults for any flag of the
//! same name; explicit flags win.  `GIST_LOG` picks the log level.

use clap::Parser;
use gist_core::error::GistError;
use gist_core::etf::EtfParams;
use gist_core::harness;
use gist_core::image::{ImageTensor, RegionMask};
use gist_core::io::{load_image, load_mask, save_image};
use gist_core::pipeline::{
    build_transform, stylize, stylize_interpolated, BlendWeights, RenderMode, StyleJobConfig,
    TransformKind,
};
use gist_core::tensor::Tensor;
use gist_core::wavelet::WaveletFamily;
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser, Debug)]
#[command(
    name = "gist",
    about = "Training-free style transfer over multiscale geometric representations",
    disable_help_subcommand = true
)]
struct Args {
    /// Content image (PNG or PPM)
    #[arg(long)]
    content: Option<PathBuf>,
    /// Style image; repeat for interpolation between several styles
    #[arg(long = "style")]
    styles: Vec<PathBuf>,
    /// Output image path (.png or .ppm)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Multiscale representation: dwt, swt, or contourlet
    #[arg(long)]
    transform: Option<String>,
    /// Wavelet family: haar or db2
    #[arg(long)]
    wavelet: Option<String>,
    /// Number of scales
    #[arg(long)]
    levels: Option<usize>,
    /// Directional band counts per scale, finest first (contourlet)
    #[arg(long, value_delimiter = ',')]
    directions: Option<Vec<usize>>,
    /// Covariance regularizer for the transport maps
    #[arg(long)]
    eps: Option<f64>,
    /// Rendering mode: photo or artistic
    #[arg(long)]
    mode: Option<String>,
    /// Blend weights; the first value is the content weight, a lone value
    /// spreads the remainder evenly over the styles
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<f64>>,
    /// Label mask for the content image (8-bit grayscale PNG)
    #[arg(long)]
    content_mask: Option<PathBuf>,
    /// Label mask for the style image
    #[arg(long)]
    style_mask: Option<PathBuf>,
    /// Neighborhood radius for the edge tangent flow
    #[arg(long)]
    etf_radius: Option<usize>,
    /// Smoothing iterations for the edge tangent flow
    #[arg(long)]
    etf_iters: Option<usize>,
    /// Seed for the artistic-mode style crop
    #[arg(long)]
    seed: Option<u64>,
    /// CSV report path
    #[arg(long)]
    report: Option<PathBuf>,
    /// Worker threads for batch runs (0 = one per core)
    #[arg(long)]
    jobs: Option<usize>,
    /// Resize all inputs to WxH before processing
    #[arg(long)]
    resize: Option<String>,
    /// Dump the content image's subband planes into a directory
    #[arg(long)]
    dump_subbands: Option<PathBuf>,
    /// Manifest of content/style pairs for a batch run
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// TOML config file; explicit flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    transform: Option<String>,
    wavelet: Option<String>,
    levels: Option<usize>,
    directions: Option<Vec<usize>>,
    eps: Option<f64>,
    mode: Option<String>,
    lambda: Option<Vec<f64>>,
    etf_radius: Option<usize>,
    etf_iters: Option<usize>,
    seed: Option<u64>,
    jobs: Option<usize>,
    resize: Option<String>,
}

enum CliError {
    Usage(String),
    Run(String),
}

impl From<GistError> for CliError {
    fn from(e: GistError) -> Self {
        let hint = match &e {
            GistError::Dimension(_) => {
                "\nhint: --resize WxH can bring inputs to compatible dimensions"
            }
            _ => "",
        };
        CliError::Run(format!("{e}{hint}"))
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("GIST_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let args = Args::parse();
    match run(args) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\nrun with --help for usage");
            ExitCode::from(2)
        }
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn parse_resize(spec: &str) -> Result<(usize, usize), CliError> {
    let (w, h) = spec
        .split_once(['x', 'X'])
        .ok_or_else(|| usage(format!("--resize wants WxH, got {spec:?}")))?;
    let parse = |s: &str| {
        s.parse::<usize>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| usage(format!("--resize wants positive dimensions, got {spec:?}")))
    };
    Ok((parse(w)?, parse(h)?))
}

struct RunSettings {
    cfg: StyleJobConfig,
    resize: Option<(usize, usize)>,
    jobs: usize,
}

fn build_config(args: &Args, file: &FileConfig) -> Result<RunSettings, CliError> {
    let pick = |flag: &Option<String>, file_val: &Option<String>| {
        flag.clone().or_else(|| file_val.clone())
    };
    let mut cfg = StyleJobConfig::default();
    if let Some(t) = pick(&args.transform, &file.transform) {
        cfg.transform = TransformKind::from_str(&t).map_err(|e| usage(e.to_string()))?;
    }
    if let Some(w) = pick(&args.wavelet, &file.wavelet) {
        cfg.wavelet = WaveletFamily::parse(&w).map_err(|e| usage(e.to_string()))?;
    }
    if let Some(l) = args.levels.or(file.levels) {
        cfg.levels = l;
    }
    if let Some(d) = args.directions.clone().or_else(|| file.directions.clone()) {
        cfg.directions = d;
    }
    if let Some(e) = args.eps.or(file.eps) {
        cfg.eps = e;
    }
    if let Some(m) = pick(&args.mode, &file.mode) {
        cfg.mode = RenderMode::from_str(&m).map_err(|e| usage(e.to_string()))?;
    }
    let mut etf = EtfParams::default();
    if let Some(r) = args.etf_radius.or(file.etf_radius) {
        etf.radius = r;
    }
    if let Some(n) = args.etf_iters.or(file.etf_iters) {
        etf.iterations = n;
    }
    cfg.etf = etf;
    if let Some(s) = args.seed.or(file.seed) {
        cfg.seed = s;
    }
    let resize = match args.resize.clone().or_else(|| file.resize.clone()) {
        Some(spec) => Some(parse_resize(&spec)?),
        None => None,
    };
    let jobs = args.jobs.or(file.jobs).unwrap_or(0);
    Ok(RunSettings { cfg, resize, jobs })
}

fn lambda_weights(lambda: &[f64], styles: usize) -> Result<BlendWeights, CliError> {
    match lambda {
        [] => Err(usage("--lambda needs at least one value")),
        [l0] => Ok(BlendWeights::uniform(*l0, styles)),
        [l0, rest @ ..] => Ok(BlendWeights {
            lambda0: *l0,
            lambdas: rest.to_vec(),
        }),
    }
}

fn load_resized(path: &Path, resize: Option<(usize, usize)>) -> Result<ImageTensor, CliError> {
    let img = load_image(path)?;
    Ok(match resize {
        Some((w, h)) => img.resize_bilinear(w, h)?,
        None => img,
    })
}

fn load_mask_resized(path: &Path, resize: Option<(usize, usize)>) -> Result<RegionMask, CliError> {
    let mask = load_mask(path)?;
    Ok(match resize {
        Some((w, h)) => mask.resize_nearest(w, h)?,
        None => mask,
    })
}

/// Writes each subband of the content's decomposition as a PNG, min-max
/// normalized per plane for visibility.
fn dump_subbands(dir: &Path, img: &ImageTensor, cfg: &StyleJobConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| GistError::io(dir, e))?;
    let t = build_transform(cfg)?;
    let mut cur = Tensor::from_image(img);
    for level in 1..=cfg.levels {
        let (approx, details) = t.analyze_level(&cur, level)?;
        for (k, band) in std::iter::once(&approx).chain(details.iter()).enumerate() {
            let name = if k == 0 {
                format!("level{level}_approx.png")
            } else {
                format!("level{level}_detail{k}.png")
            };
            let mut plane = band.clone();
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &v in &plane.data {
                lo = lo.min(v);
                hi = hi.max(v);
            }
            let span = (hi - lo).max(1e-12);
            for v in &mut plane.data {
                *v = (*v - lo) / span;
            }
            save_image(dir.join(name), &plane.to_image()?)?;
        }
        cur = approx;
    }
    Ok(())
}

fn run(args: Args) -> Result<ExitCode, CliError> {
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| GistError::io(path, e))?;
            toml::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    let RunSettings {
        mut cfg,
        resize,
        jobs,
    } = build_config(&args, &file)?;

    if args.manifest.is_some() && (args.content.is_some() || !args.styles.is_empty()) {
        return Err(usage(
            "--manifest and --content/--style are mutually exclusive",
        ));
    }

    if let Some(manifest) = &args.manifest {
        let report = args
            .report
            .as_ref()
            .ok_or_else(|| usage("--manifest needs --report for the CSV output"))?;
        if resize.is_some() {
            return Err(usage("--resize is not supported in manifest mode"));
        }
        let entries = harness::read_manifest(manifest)?;
        let outcomes = harness::run_corpus(&entries, &cfg, jobs)?;
        harness::write_csv(report, &outcomes)?;
        let failed = outcomes.iter().filter(|o| o.result.is_err()).count();
        for o in &outcomes {
            if let Err(e) = &o.result {
                eprintln!("pair {}: {e}", o.entry.id);
            }
        }
        println!(
            "{} pairs, {} failed, report at {}",
            outcomes.len(),
            failed,
            report.display()
        );
        return Ok(if failed == 0 {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        });
    }

    let content_path = args
        .content
        .as_ref()
        .ok_or_else(|| usage("--content is required"))?;
    let content = load_resized(content_path, resize)?;
    if let Some(dir) = &args.dump_subbands {
        dump_subbands(dir, &content, &cfg)?;
        // dumping alone is a complete run; stylize only if an output is asked for
        if args.out.is_none() && args.styles.is_empty() {
            return Ok(ExitCode::SUCCESS);
        }
    }
    if args.styles.is_empty() {
        return Err(usage("at least one --style is required"));
    }
    let out_path = args
        .out
        .as_ref()
        .ok_or_else(|| usage("--out is required"))?;
    if let Some(p) = &args.content_mask {
        cfg.content_mask = Some(load_mask_resized(p, resize)?);
    }
    if let Some(p) = &args.style_mask {
        cfg.style_mask = Some(load_mask_resized(p, resize)?);
    }

    let lambda = args.lambda.clone().or_else(|| file.lambda.clone());
    let output = if let Some(lambda) = lambda {
        cfg.blend = Some(lambda_weights(&lambda, args.styles.len())?);
        let styles = args
            .styles
            .iter()
            .map(|p| load_resized(p, resize))
            .collect::<Result<Vec<_>, _>>()?;
        stylize_interpolated(&content, &styles, &cfg)?
    } else {
        if args.styles.len() > 1 {
            return Err(usage("several --style inputs need --lambda weights"));
        }
        let style = load_resized(&args.styles[0], resize)?;
        if let Some(report) = &args.report {
            let id = content_path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("pair");
            let (out, job) = harness::run_pair(&content, &style, id, &cfg)?;
            let outcome = harness::PairOutcome {
                index: 0,
                entry: harness::ManifestEntry {
                    id: job.id.clone(),
                    content: content_path.clone(),
                    style: args.styles[0].clone(),
                },
                result: Ok(job),
            };
            harness::write_csv(report, &[outcome])?;
            save_image(out_path, &out)?;
            return Ok(ExitCode::SUCCESS);
        }
        stylize(&content, &style, &cfg)?
    };
    save_image(out_path, &output)?;
    Ok(ExitCode::SUCCESS)
}

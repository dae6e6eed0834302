//! Corpus running and CSV reporting.
//!
//! A manifest is a TOML file listing content/style pairs:
//!
//! ```toml
//! [[pair]]
//! content = "images/c0.png"
//! style = "images/s0.png"
//! id = "alps"        # optional, defaults to the zero-based index
//! ```
//!
//! Relative paths are resolved against the manifest's directory.  Pairs run
//! on a worker pool; per-pair failures are recorded and the run continues.
//!
//! The CSV report has the fixed column set
//! `index,id,content,style,status,ssim,w2_residuals,seconds,config,error`.
//! `w2_residuals` packs the per-scale squared transport residuals remaining
//! after alignment: scales joined by `;` (finest first), subbands within a
//! scale joined by `|` (approximation first).  Two summary rows labeled
//! `mean` and `std` (population) over the successful pairs' `ssim` and
//! `seconds` close the file.  Rows appear in manifest order, and repeated
//! runs with the same inputs differ only in the `seconds` column.  The
//! style-distance diagnostic is a plain subband-transport residual; its
//! numbers are not comparable to perceptual metrics from the literature.

use crate::error::{GistError, Result};
use crate::image::ImageTensor;
use crate::io::load_image;
use crate::metrics::ssim;
use crate::pipeline::{stylize_with_diagnostics, StyleJobConfig, TransformKind};
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub id: String,
    pub content: PathBuf,
    pub style: PathBuf,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFile {
    #[serde(default)]
    pair: Vec<RawPair>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    content: PathBuf,
    style: PathBuf,
    id: Option<String>,
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| GistError::io(path, e))?;
    let file: ManifestFile =
        toml::from_str(&text).map_err(|e| GistError::decode(path, e.to_string()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let resolve = |p: PathBuf| if p.is_relative() { base.join(p) } else { p };
    Ok(file
        .pair
        .into_iter()
        .enumerate()
        .map(|(i, raw)| ManifestEntry {
            id: raw.id.unwrap_or_else(|| format!("{i:02}")),
            content: resolve(raw.content),
            style: resolve(raw.style),
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct JobReport {
    pub id: String,
    pub ssim: f64,
    pub residuals: Vec<Vec<f64>>,
    pub seconds: f64,
    pub config: String,
}

/// One line summarizing the job configuration, echoed into every CSV row.
pub fn config_echo(cfg: &StyleJobConfig) -> String {
    let transform = match cfg.transform {
        TransformKind::Dwt => "dwt",
        TransformKind::Swt => "swt",
        TransformKind::Contourlet => "contourlet",
    };
    let mut s = format!(
        "transform={transform} wavelet={:?} levels={} eps={:e} mode={:?} seed={}",
        cfg.wavelet, cfg.levels, cfg.eps, cfg.mode, cfg.seed
    )
    .to_lowercase();
    if !cfg.directions.is_empty() {
        let dirs: Vec<String> = cfg.directions.iter().map(|d| d.to_string()).collect();
        s.push_str(&format!(" directions={}", dirs.join(",")));
    }
    if let Some(b) = &cfg.blend {
        s.push_str(&format!(" lambda0={}", b.lambda0));
    }
    if !cfg.align_details {
        s.push_str(" align_details=false");
    }
    s
}

/// Stylizes one pair and measures it; the clock covers the stylize call
/// only, not I/O or the SSIM computation.
pub fn run_pair(
    content: &ImageTensor,
    style: &ImageTensor,
    id: &str,
    cfg: &StyleJobConfig,
) -> Result<(ImageTensor, JobReport)> {
    let start = Instant::now();
    let (out, diags) = stylize_with_diagnostics(content, style, cfg)?;
    let seconds = start.elapsed().as_secs_f64();
    let report = JobReport {
        id: id.to_string(),
        ssim: ssim(&out, content)?,
        residuals: diags.per_scale,
        seconds,
        config: config_echo(cfg),
    };
    debug_assert!((-1.0..=1.0).contains(&report.ssim));
    debug_assert!(report.seconds > 0.0);
    Ok((out, report))
}

#[derive(Debug, Clone)]
pub struct PairOutcome {
    pub index: usize,
    pub entry: ManifestEntry,
    pub result: std::result::Result<JobReport, String>,
}

/// Runs every manifest pair on a pool of `jobs` workers (0 picks the rayon
/// default).  Outcomes come back in manifest order no matter the schedule.
pub fn run_corpus(
    entries: &[ManifestEntry],
    cfg: &StyleJobConfig,
    jobs: usize,
) -> Result<Vec<PairOutcome>> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| GistError::Argument(format!("worker pool: {e}")))?;
    let outcomes = pool.install(|| {
        entries
            .par_iter()
            .enumerate()
            .map(|(index, entry)| {
                let result = load_image(&entry.content)
                    .and_then(|c| Ok((c, load_image(&entry.style)?)))
                    .and_then(|(c, s)| run_pair(&c, &s, &entry.id, cfg))
                    .map(|(_, report)| report)
                    .map_err(|e| e.to_string());
                match &result {
                    Ok(r) => {
                        log::info!("pair {}: ssim {:.4} in {:.3}s", entry.id, r.ssim, r.seconds)
                    }
                    Err(e) => log::warn!("pair {}: {e}", entry.id),
                }
                PairOutcome {
                    index,
                    entry: entry.clone(),
                    result,
                }
            })
            .collect()
    });
    Ok(outcomes)
}

pub const CSV_HEADER: [&str; 10] = [
    "index",
    "id",
    "content",
    "style",
    "status",
    "ssim",
    "w2_residuals",
    "seconds",
    "config",
    "error",
];

fn residuals_field(residuals: &[Vec<f64>]) -> String {
    residuals
        .iter()
        .map(|scale| {
            scale
                .iter()
                .map(|r| format!("{r:.6e}"))
                .collect::<Vec<_>>()
                .join("|")
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn write_csv(path: impl AsRef<Path>, outcomes: &[PairOutcome]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| GistError::encode(path, e.to_string()))?;
    let mut record = |fields: [String; 10]| -> Result<()> {
        w.write_record(&fields)
            .map_err(|e| GistError::encode(path, e.to_string()))
    };
    record(CSV_HEADER.map(String::from))?;
    for o in outcomes {
        let [status, ssim, residuals, seconds, config, error] = match &o.result {
            Ok(r) => [
                "ok".into(),
                format!("{:.6}", r.ssim),
                residuals_field(&r.residuals),
                format!("{:.6}", r.seconds),
                r.config.clone(),
                String::new(),
            ],
            Err(e) => [
                "failed".into(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                e.clone(),
            ],
        };
        record([
            o.index.to_string(),
            o.entry.id.clone(),
            o.entry.content.display().to_string(),
            o.entry.style.display().to_string(),
            status,
            ssim,
            residuals,
            seconds,
            config,
            error,
        ])?;
    }
    if !outcomes.is_empty() {
        let ok: Vec<&JobReport> = outcomes
            .iter()
            .filter_map(|o| o.result.as_ref().ok())
            .collect();
        let ssims: Vec<f64> = ok.iter().map(|r| r.ssim).collect();
        let secs: Vec<f64> = ok.iter().map(|r| r.seconds).collect();
        let (ms, ds) = mean_std(&ssims);
        let (mt, dt) = mean_std(&secs);
        for (label, s, t) in [("mean", ms, mt), ("std", ds, dt)] {
            record([
                String::new(),
                label.into(),
                String::new(),
                String::new(),
                "summary".into(),
                format!("{s:.6}"),
                String::new(),
                format!("{t:.6}"),
                String::new(),
                String::new(),
            ])?;
        }
    }
    w.flush().map_err(|e| GistError::io(path, e))
}

/// Reads back a report written by [`write_csv`].
pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<Vec<String>>> {
    let path = path.as_ref();
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| GistError::decode(path, e.to_string()))?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| GistError::decode(path, e.to_string()))?;
        rows.push(rec.iter().map(String::from).collect());
    }
    Ok(rows)
}

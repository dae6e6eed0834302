//! The stylization pipeline: analyze content and style into multiscale
//! stacks, align channel statistics scale by scale, and resynthesize.
//!
//! The loop runs coarse to fine.  The stylized approximation starts as the
//! content's coarsest approximation; at each scale it is joined by the
//! content's detail subbands, every subband is aligned onto the style's
//! per-subband statistics by a closed-form Gaussian transport map, and one
//! synthesis step produces the approximation for the next finer scale.  The
//! final synthesis yields the stylized image at content resolution.
//!
//! Variants share the same loop:
//! * blended targets mix the current subband with several styles' subbands
//!   under convex weights before the target statistics are taken;
//! * masked runs restrict statistics and transport to matching label
//!   regions, label by label;
//! * artistic mode swaps detail alignment for an element-wise maximum
//!   against the detail subbands of an edge-tangent-flow rendering of a
//!   seeded random style crop, while approximations still ride transport.

use crate::contourlet::ContourletTransform;
use crate::error::{GistError, Result};
use crate::etf::{self, EtfParams};
use crate::image::{ImageTensor, RegionMask};
use crate::tensor::Tensor;
use crate::transform::MultiscaleTransform;
use crate::transport::{
    apply_map, apply_map_masked, compute_stats, compute_stats_masked, optimal_map, w2_sq,
    ChannelStats,
};
use crate::wavelet::{WaveletFamily, WaveletTransform};
use log::warn;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    Dwt,
    Swt,
    Contourlet,
}

impl FromStr for TransformKind {
    type Err = GistError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dwt" => Ok(TransformKind::Dwt),
            "swt" => Ok(TransformKind::Swt),
            "contourlet" => Ok(TransformKind::Contourlet),
            other => Err(GistError::Argument(format!(
                "unknown transform '{other}' (expected dwt, swt, or contourlet)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderMode {
    Photo,
    Artistic,
}

impl FromStr for RenderMode {
    type Err = GistError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "photo" => Ok(RenderMode::Photo),
            "artistic" => Ok(RenderMode::Artistic),
            other => Err(GistError::Argument(format!(
                "unknown mode '{other}' (expected photo or artistic)"
            ))),
        }
    }
}

/// Convex blending weights: `lambda0` keeps the content, `lambdas[r]`
/// weighs style `r`.
#[derive(Debug, Clone)]
pub struct BlendWeights {
    pub lambda0: f64,
    pub lambdas: Vec<f64>,
}

impl BlendWeights {
    /// Splits the non-content weight evenly across `styles` styles.
    pub fn uniform(lambda0: f64, styles: usize) -> Self {
        let rest = if styles > 0 {
            (1.0 - lambda0) / styles as f64
        } else {
            0.0
        };
        BlendWeights {
            lambda0,
            lambdas: vec![rest; styles],
        }
    }

    pub fn validate(&self, styles: usize) -> Result<()> {
        if self.lambdas.len() != styles {
            return Err(GistError::Argument(format!(
                "{} blend weights for {} styles",
                self.lambdas.len(),
                styles
            )));
        }
        let all = std::iter::once(self.lambda0).chain(self.lambdas.iter().copied());
        for v in all {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(GistError::Argument(format!(
                    "blend weight {v} outside [0,1]"
                )));
            }
        }
        let sum: f64 = self.lambda0 + self.lambdas.iter().sum::<f64>();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(GistError::Argument(format!(
                "blend weights sum to {sum}, expected 1"
            )));
        }
        Ok(())
    }
}

/// Everything a stylization run needs besides the images themselves.
#[derive(Debug, Clone)]
pub struct StyleJobConfig {
    pub transform: TransformKind,
    pub wavelet: WaveletFamily,
    pub levels: usize,
    /// Directional subband counts per scale (contourlet only); empty picks
    /// one undirected coarsest scale and four directions elsewhere.
    pub directions: Vec<usize>,
    /// Covariance regularizer added to both sides of each transport map.
    pub eps: f64,
    pub mode: RenderMode,
    pub blend: Option<BlendWeights>,
    pub content_mask: Option<RegionMask>,
    pub style_mask: Option<RegionMask>,
    /// Seeds the artistic-mode style crop.
    pub seed: u64,
    pub etf: EtfParams,
    /// When false, detail subbands pass through unaligned and only
    /// approximations are transported.
    pub align_details: bool,
}

impl Default for StyleJobConfig {
    fn default() -> Self {
        StyleJobConfig {
            transform: TransformKind::Swt,
            wavelet: WaveletFamily::Db2,
            levels: 3,
            directions: Vec::new(),
            eps: 1e-5,
            mode: RenderMode::Photo,
            blend: None,
            content_mask: None,
            style_mask: None,
            seed: 0,
            etf: EtfParams::default(),
            align_details: true,
        }
    }
}

/// Builds the multiscale transform described by the config.
pub fn build_transform(cfg: &StyleJobConfig) -> Result<Box<dyn MultiscaleTransform>> {
    if cfg.levels == 0 {
        return Err(GistError::Argument("need at least one scale".into()));
    }
    match cfg.transform {
        TransformKind::Dwt => Ok(Box::new(WaveletTransform::new(
            cfg.wavelet,
            cfg.levels,
            true,
        )?)),
        TransformKind::Swt => Ok(Box::new(WaveletTransform::new(
            cfg.wavelet,
            cfg.levels,
            false,
        )?)),
        TransformKind::Contourlet => {
            let dirs = if cfg.directions.is_empty() {
                let mut d = vec![4; cfg.levels];
                d[0] = 1;
                d
            } else {
                cfg.directions.clone()
            };
            if dirs.len() != cfg.levels {
                return Err(GistError::Argument(format!(
                    "{} direction counts for {} scales",
                    dirs.len(),
                    cfg.levels
                )));
            }
            Ok(Box::new(ContourletTransform::new(dirs)?))
        }
    }
}

/// Per-subband squared transport residuals remaining after alignment,
/// grouped by scale (approximation first, then details), plus the energy of
/// the detail subbands entering the final synthesis step.
#[derive(Debug, Clone, Default)]
pub struct StylizeDiagnostics {
    pub per_scale: Vec<Vec<f64>>,
    pub finest_detail_energy: f64,
}

struct LevelData {
    approx: Tensor,
    details: Vec<Tensor>,
}

fn analyze_levels(t: &dyn MultiscaleTransform, img: &Tensor) -> Result<Vec<LevelData>> {
    let mut cur = img.clone();
    let mut out = Vec::with_capacity(t.levels());
    for l in 1..=t.levels() {
        let (a, d) = t.analyze_level(&cur, l)?;
        out.push(LevelData {
            approx: a.clone(),
            details: d,
        });
        cur = a;
    }
    Ok(out)
}

fn image_tensor(img: &ImageTensor) -> Tensor {
    Tensor::from_image(img)
}

fn replicate_channels(gray: &ImageTensor, channels: usize) -> Tensor {
    let mut t = Tensor::zeros(channels, gray.width(), gray.height());
    let src: Vec<f64> = gray.plane(0).iter().map(|&v| v as f64).collect();
    for c in 0..channels {
        t.plane_mut(c).copy_from_slice(&src);
    }
    t
}

/// Per-level mask set for a masked run.
struct MaskedLevel {
    content_approx: RegionMask,
    style_approx: RegionMask,
    content_details: Vec<RegionMask>,
    style_details: Vec<RegionMask>,
}

enum Strategy<'a> {
    Single {
        style: &'a [LevelData],
    },
    Blend {
        weights: &'a BlendWeights,
        styles: &'a [Vec<LevelData>],
    },
    Masked {
        style: &'a [LevelData],
        levels: Vec<MaskedLevel>,
        shared: Vec<u32>,
    },
}

enum DetailMode<'a> {
    Aligned,
    Passthrough,
    Fused(&'a [LevelData]),
}

fn align_to_stats(x: &Tensor, target: &ChannelStats, eps: f64) -> Result<(Tensor, f64)> {
    let source = compute_stats(x)?;
    let map = optimal_map(&source, target, eps)?;
    let mapped = apply_map(&map, x);
    let after = compute_stats(&mapped)?;
    Ok((mapped, w2_sq(&after, target)))
}

/// Label-wise transport: each label of the content mask is mapped onto the
/// statistics of the same label in the style mask; labels the style lacks
/// (or whose region is empty) use the style's global statistics.
fn align_masked(
    x: &Tensor,
    style_sub: &Tensor,
    xmask: &RegionMask,
    smask: &RegionMask,
    shared: &[u32],
    eps: f64,
) -> Result<(Tensor, f64)> {
    let global = compute_stats(style_sub)?;
    let mut out = x.clone();
    let mut residual = 0.0;
    let mut weight = 0.0;
    for label in xmask.label_set() {
        let target = if shared.contains(&label) {
            match compute_stats_masked(style_sub, smask, label) {
                Ok(s) => s,
                Err(GistError::EmptyRegion(_)) => {
                    warn!("label {label} region is empty in the style at this scale; using global style statistics");
                    global.clone()
                }
                Err(e) => return Err(e),
            }
        } else {
            global.clone()
        };
        let source = compute_stats_masked(x, xmask, label)?;
        let map = optimal_map(&source, &target, eps)?;
        out = apply_map_masked(&map, &out, xmask, label)?;
        let after = compute_stats_masked(&out, xmask, label)?;
        let n = source.count as f64;
        residual += n * w2_sq(&after, &target);
        weight += n;
    }
    Ok((out, if weight > 0.0 { residual / weight } else { 0.0 }))
}

fn align_subband(
    x: &Tensor,
    level: usize,
    slot: usize,
    strategy: &Strategy,
    eps: f64,
) -> Result<(Tensor, f64)> {
    match strategy {
        Strategy::Single { style } => {
            let sub = style_subband(&style[level - 1], slot);
            let target = compute_stats(sub)?;
            align_to_stats(x, &target, eps)
        }
        Strategy::Blend { weights, styles } => {
            let mut target_tensor = x.clone();
            target_tensor.scale(weights.lambda0);
            for (s, &lr) in styles.iter().zip(&weights.lambdas) {
                let sub = style_subband(&s[level - 1], slot);
                target_tensor = target_tensor.lin_comb(1.0, sub, lr);
            }
            let target = compute_stats(&target_tensor)?;
            align_to_stats(x, &target, eps)
        }
        Strategy::Masked {
            style,
            levels,
            shared,
        } => {
            let ml = &levels[level - 1];
            let sub = style_subband(&style[level - 1], slot);
            let (cm, sm) = if slot == 0 {
                (&ml.content_approx, &ml.style_approx)
            } else {
                (&ml.content_details[slot - 1], &ml.style_details[slot - 1])
            };
            align_masked(x, sub, cm, sm, shared, eps)
        }
    }
}

fn style_subband(ld: &LevelData, slot: usize) -> &Tensor {
    if slot == 0 {
        &ld.approx
    } else {
        &ld.details[slot - 1]
    }
}

fn run_loop(
    t: &dyn MultiscaleTransform,
    content: &[LevelData],
    strategy: &Strategy,
    detail_mode: &DetailMode,
    eps: f64,
) -> Result<(Tensor, StylizeDiagnostics)> {
    let levels = content.len();
    let mut cs = content[levels - 1].approx.clone();
    let mut diags = StylizeDiagnostics {
        per_scale: vec![Vec::new(); levels],
        finest_detail_energy: 0.0,
    };
    for l in (1..=levels).rev() {
        let cl = &content[l - 1];
        let (approx, r) = align_subband(&cs, l, 0, strategy, eps)?;
        diags.per_scale[l - 1].push(r);
        let mut details = Vec::with_capacity(cl.details.len());
        for (k, d) in cl.details.iter().enumerate() {
            let (mapped, r) = match detail_mode {
                DetailMode::Aligned => align_subband(d, l, k + 1, strategy, eps)?,
                DetailMode::Passthrough => (d.clone(), 0.0),
                DetailMode::Fused(etf_levels) => {
                    (etf::fuse_details(d, &etf_levels[l - 1].details[k])?, 0.0)
                }
            };
            diags.per_scale[l - 1].push(r);
            details.push(mapped);
        }
        if l == 1 {
            diags.finest_detail_energy = details.iter().map(Tensor::energy).sum();
        }
        cs = t.synthesize_level(&approx, &details, l)?;
    }
    cs.check_finite("stylized output")?;
    Ok((cs, diags))
}

fn clamp_unit(t: &mut Tensor) {
    for v in &mut t.data {
        *v = v.clamp(0.0, 1.0);
    }
}

fn prepare_etf_levels(
    t: &dyn MultiscaleTransform,
    content: &ImageTensor,
    etf_source: &ImageTensor,
    cfg: &StyleJobConfig,
) -> Result<Vec<LevelData>> {
    if cfg.transform == TransformKind::Contourlet {
        return Err(GistError::Argument(
            "artistic mode needs a wavelet transform (dwt or swt)".into(),
        ));
    }
    let rect = etf::seeded_crop_rect(etf_source.width(), etf_source.height(), cfg.seed);
    let patch = etf_source
        .crop(rect)?
        .resize_bilinear(content.width(), content.height())?;
    let gray = patch.to_grayscale()?;
    let field = etf::compute_etf(&gray, &cfg.etf)?;
    let rendering = etf::etf_to_grayscale(&field);
    let replicated = replicate_channels(&rendering, content.channels());
    analyze_levels(t, &replicated)
}

fn dim_context(prefix: &str, e: GistError) -> GistError {
    match e {
        GistError::Dimension(m) => GistError::Dimension(format!("{prefix}: {m}")),
        other => other,
    }
}

fn check_pair(content: &ImageTensor, style: &ImageTensor) -> Result<()> {
    if content.channels() != style.channels() {
        return Err(GistError::Argument(format!(
            "content has {} channels but style has {}",
            content.channels(),
            style.channels()
        )));
    }
    Ok(())
}

fn masked_levels(
    t: &dyn MultiscaleTransform,
    cmask: &RegionMask,
    smask: &RegionMask,
) -> Result<Vec<MaskedLevel>> {
    (1..=t.levels())
        .map(|l| {
            Ok(MaskedLevel {
                content_approx: t.mask_to_level(cmask, l)?,
                style_approx: t.mask_to_level(smask, l)?,
                content_details: t.detail_masks(cmask, l)?,
                style_details: t.detail_masks(smask, l)?,
            })
        })
        .collect()
}

/// Stylizes `content` toward `style` under `cfg`; output has the content's
/// shape with values in [0, 1].
pub fn stylize(
    content: &ImageTensor,
    style: &ImageTensor,
    cfg: &StyleJobConfig,
) -> Result<ImageTensor> {
    stylize_with_diagnostics(content, style, cfg).map(|(img, _)| img)
}

/// Like [`stylize`], also reporting per-scale transport residuals.
pub fn stylize_with_diagnostics(
    content: &ImageTensor,
    style: &ImageTensor,
    cfg: &StyleJobConfig,
) -> Result<(ImageTensor, StylizeDiagnostics)> {
    if cfg.blend.is_some() {
        return Err(GistError::Argument(
            "blending takes the multi-style entry point".into(),
        ));
    }
    check_pair(content, style)?;
    let t = build_transform(cfg)?;
    t.check_dims(content.width(), content.height())
        .map_err(|e| dim_context("content", e))?;
    t.check_dims(style.width(), style.height())
        .map_err(|e| dim_context("style", e))?;
    let content_t = image_tensor(content);
    let style_t = image_tensor(style);
    let content_levels = analyze_levels(&*t, &content_t)?;
    let style_levels = analyze_levels(&*t, &style_t)?;

    let masks = match (&cfg.content_mask, &cfg.style_mask) {
        (Some(cm), Some(sm)) => {
            if cm.width() != content.width() || cm.height() != content.height() {
                return Err(GistError::Dimension(
                    "content mask does not match content dims".into(),
                ));
            }
            if sm.width() != style.width() || sm.height() != style.height() {
                return Err(GistError::Dimension(
                    "style mask does not match style dims".into(),
                ));
            }
            Some((cm, sm))
        }
        (None, None) => None,
        _ => {
            return Err(GistError::Argument(
                "masked stylization needs both a content mask and a style mask".into(),
            ))
        }
    };

    let strategy = match masks {
        Some((cm, sm)) => {
            let shared: Vec<u32> = cm
                .label_set()
                .into_iter()
                .filter(|l| sm.label_set().contains(l))
                .collect();
            if shared.is_empty() {
                warn!(
                    "content and style masks share no labels; falling back to global stylization"
                );
                Strategy::Single {
                    style: &style_levels,
                }
            } else {
                Strategy::Masked {
                    style: &style_levels,
                    levels: masked_levels(&*t, cm, sm)?,
                    shared,
                }
            }
        }
        None => Strategy::Single {
            style: &style_levels,
        },
    };

    let etf_levels;
    let detail_mode = match cfg.mode {
        RenderMode::Artistic => {
            etf_levels = prepare_etf_levels(&*t, content, style, cfg)?;
            DetailMode::Fused(&etf_levels)
        }
        RenderMode::Photo if cfg.align_details => DetailMode::Aligned,
        RenderMode::Photo => DetailMode::Passthrough,
    };

    let (mut out, diags) = run_loop(&*t, &content_levels, &strategy, &detail_mode, cfg.eps)?;
    clamp_unit(&mut out);
    Ok((out.to_image()?, diags))
}

/// Multi-style stylization: every subband's transport target is the convex
/// combination of the current subband and the styles' subbands under
/// `cfg.blend`.  Styles are resized to the content's shape first.
pub fn stylize_interpolated(
    content: &ImageTensor,
    styles: &[ImageTensor],
    cfg: &StyleJobConfig,
) -> Result<ImageTensor> {
    let weights = cfg.blend.as_ref().ok_or_else(|| {
        GistError::Argument("blend weights are required for interpolation".into())
    })?;
    weights.validate(styles.len())?;
    if styles.is_empty() {
        return Err(GistError::Argument("need at least one style".into()));
    }
    if cfg.content_mask.is_some() || cfg.style_mask.is_some() {
        return Err(GistError::Argument(
            "blending and masked stylization cannot be combined".into(),
        ));
    }
    for s in styles {
        check_pair(content, s)?;
    }
    let t = build_transform(cfg)?;
    t.check_dims(content.width(), content.height())
        .map_err(|e| dim_context("content", e))?;
    let content_t = image_tensor(content);
    let content_levels = analyze_levels(&*t, &content_t)?;
    let mut style_levels = Vec::with_capacity(styles.len());
    for s in styles {
        let resized = s.resize_bilinear(content.width(), content.height())?;
        style_levels.push(analyze_levels(&*t, &image_tensor(&resized))?);
    }
    let strategy = Strategy::Blend {
        weights,
        styles: &style_levels,
    };
    let etf_levels;
    let detail_mode = match cfg.mode {
        RenderMode::Artistic => {
            etf_levels = prepare_etf_levels(&*t, content, &styles[0], cfg)?;
            DetailMode::Fused(&etf_levels)
        }
        RenderMode::Photo if cfg.align_details => DetailMode::Aligned,
        RenderMode::Photo => DetailMode::Passthrough,
    };
    let (mut out, _) = run_loop(&*t, &content_levels, &strategy, &detail_mode, cfg.eps)?;
    clamp_unit(&mut out);
    out.to_image()
}

//! Common interface over the multiscale transforms.
//!
//! A transform turns an image into a pyramid of [`SubbandStack`]s: one stack
//! per scale holding that scale's detail subbands, plus the coarsest
//! approximation kept only at the deepest scale.  Scale 1 is the finest.
//! Every transform here reconstructs its input exactly (up to floating-point
//! round-off), and every analysis step is linear.

use crate::error::{GistError, Result};
use crate::image::RegionMask;
use crate::tensor::Tensor;

/// Detail subbands of one scale; `approx` is populated only on the coarsest
/// stack of a [`MultiscaleRep`] (and on stacks returned by single-level
/// analysis helpers).
#[derive(Debug, Clone)]
pub struct SubbandStack {
    pub level: usize,
    pub approx: Option<Tensor>,
    pub details: Vec<Tensor>,
}

/// Full multiscale decomposition, finest scale first.
#[derive(Debug, Clone)]
pub struct MultiscaleRep {
    pub stacks: Vec<SubbandStack>,
}

impl MultiscaleRep {
    pub fn levels(&self) -> usize {
        self.stacks.len()
    }

    pub fn stack(&self, level: usize) -> &SubbandStack {
        &self.stacks[level - 1]
    }

    /// The coarsest approximation band.
    pub fn coarse_approx(&self) -> &Tensor {
        self.stacks
            .last()
            .and_then(|s| s.approx.as_ref())
            .expect("multiscale rep holds the coarsest approximation")
    }

    /// Total coefficient count across all subbands and the approximation.
    pub fn coeff_count(&self) -> usize {
        let mut n = 0;
        for s in &self.stacks {
            if let Some(a) = &s.approx {
                n += a.data.len();
            }
            for d in &s.details {
                n += d.data.len();
            }
        }
        n
    }
}

/// One scale step of a multiscale transform, plus the bookkeeping needed to
/// carry region masks along with the coefficients.
pub trait MultiscaleTransform {
    fn levels(&self) -> usize;

    /// Number of detail subbands produced at `level`.
    fn num_details(&self, level: usize) -> usize;

    /// Validates that a `width x height` input can be decomposed to the full
    /// depth.
    fn check_dims(&self, width: usize, height: usize) -> Result<()>;

    /// Splits the approximation of `level - 1` into the level-`level`
    /// approximation and detail subbands.
    fn analyze_level(&self, approx: &Tensor, level: usize) -> Result<(Tensor, Vec<Tensor>)>;

    /// Inverse of [`analyze_level`](Self::analyze_level).
    fn synthesize_level(&self, approx: &Tensor, details: &[Tensor], level: usize)
        -> Result<Tensor>;

    /// Tracks a label mask from the original image grid to the approximation
    /// grid after `level` analysis steps (`level = 0` returns it unchanged).
    fn mask_to_level(&self, mask: &RegionMask, level: usize) -> Result<RegionMask>;

    /// Label masks matching each detail subband of `level`, given the mask on
    /// the original image grid.
    fn detail_masks(&self, mask: &RegionMask, level: usize) -> Result<Vec<RegionMask>>;
}

/// Full analysis: repeated [`MultiscaleTransform::analyze_level`] with the
/// coarsest approximation retained on the last stack.
pub fn analyze(transform: &dyn MultiscaleTransform, img: &Tensor) -> Result<MultiscaleRep> {
    transform.check_dims(img.width, img.height)?;
    img.check_finite("analysis input")?;
    let mut stacks = Vec::with_capacity(transform.levels());
    let mut approx = img.clone();
    for level in 1..=transform.levels() {
        let (coarser, details) = transform.analyze_level(&approx, level)?;
        approx = coarser;
        stacks.push(SubbandStack {
            level,
            approx: None,
            details,
        });
    }
    if let Some(last) = stacks.last_mut() {
        last.approx = Some(approx);
    }
    Ok(MultiscaleRep { stacks })
}

/// Full synthesis from a [`MultiscaleRep`].
pub fn synthesize(transform: &dyn MultiscaleTransform, rep: &MultiscaleRep) -> Result<Tensor> {
    if rep.levels() != transform.levels() {
        return Err(GistError::Dimension(format!(
            "rep has {} levels, transform expects {}",
            rep.levels(),
            transform.levels()
        )));
    }
    let mut approx = rep.coarse_approx().clone();
    for level in (1..=transform.levels()).rev() {
        approx = transform.synthesize_level(&approx, &rep.stack(level).details, level)?;
    }
    Ok(approx)
}

//! Closed-form optimal transport between Gaussian summaries of subbands.
//!
//! A subband with `C` channels is summarized by its per-channel mean vector
//! and `C x C` covariance (population normalization, `1/N`).  The squared
//! 2-Wasserstein distance between two such Gaussians is
//! `|mx - my|^2 + B^2(Sx, Sy)` with the squared Bures metric
//! `B^2 = tr(Sx) + tr(Sy) - 2 tr((Sy^{1/2} Sx Sy^{1/2})^{1/2})`, and the
//! optimal map is affine, `T(x) = A (x - mx) + my` with
//! `A = Sx^{-1/2} (Sx^{1/2} Sy Sx^{1/2})^{1/2} Sx^{-1/2}`.
//!
//! Matrix roots come from a symmetric eigendecomposition with eigenvalues
//! clamped at a small relative floor, and an `eps` ridge may be added to both
//! covariances before mapping to keep near-singular subbands stable.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{GistError, Result};
use crate::image::RegionMask;
use crate::tensor::Tensor;
use crate::transform::SubbandStack;

/// Relative eigenvalue floor used by the matrix square roots.
const EIG_CLAMP_REL: f64 = 1e-12;

/// First and second moments of one subband's channel samples.
#[derive(Debug, Clone)]
pub struct ChannelStats {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
    pub count: usize,
}

/// Affine transport map `T(x) = A x + b`.
#[derive(Debug, Clone)]
pub struct TransportMap {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

/// Moments over every sample of the tensor.
pub fn compute_stats(t: &Tensor) -> Result<ChannelStats> {
    stats_filtered(t, |_| true)
}

/// Moments over the samples whose mask label equals `label`; the mask must
/// match the tensor's spatial dims.
pub fn compute_stats_masked(t: &Tensor, mask: &RegionMask, label: u32) -> Result<ChannelStats> {
    if mask.width() != t.width || mask.height() != t.height {
        return Err(GistError::Dimension(format!(
            "mask {}x{} does not match subband {}x{}",
            mask.width(),
            mask.height(),
            t.width,
            t.height
        )));
    }
    let labels = mask.labels();
    stats_filtered(t, |i| labels[i] == label)
}

fn stats_filtered(t: &Tensor, keep: impl Fn(usize) -> bool) -> Result<ChannelStats> {
    let c = t.channels;
    let n_pix = t.width * t.height;
    let mut mean = DVector::zeros(c);
    let mut count = 0usize;
    for i in 0..n_pix {
        if keep(i) {
            count += 1;
            for ch in 0..c {
                mean[ch] += t.plane(ch)[i];
            }
        }
    }
    if count == 0 {
        return Err(GistError::EmptyRegion(
            "no samples selected for statistics".into(),
        ));
    }
    mean.scale_mut(1.0 / count as f64);
    let mut cov = DMatrix::zeros(c, c);
    for i in 0..n_pix {
        if keep(i) {
            for a in 0..c {
                let da = t.plane(a)[i] - mean[a];
                for b in a..c {
                    let db = t.plane(b)[i] - mean[b];
                    cov[(a, b)] += da * db;
                }
            }
        }
    }
    for a in 0..c {
        for b in a..c {
            let v = cov[(a, b)] / count as f64;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
    if !mean.iter().all(|v: &f64| v.is_finite()) || !cov.iter().all(|v: &f64| v.is_finite()) {
        return Err(GistError::NonFinite("subband statistics".into()));
    }
    Ok(ChannelStats { mean, cov, count })
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Eigendecomposition with the relative eigenvalue clamp applied.
fn clamped_eigen(m: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>) {
    let eig = SymmetricEigen::new(symmetrize(m));
    let max = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b));
    let floor = max * EIG_CLAMP_REL;
    let vals = eig.eigenvalues.map(|v| v.max(floor).max(0.0));
    (eig.eigenvectors, vals)
}

/// Principal square root of a symmetric positive semi-definite matrix.
pub fn sqrtm_spd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (vecs, vals) = clamped_eigen(m);
    let sq = DMatrix::from_diagonal(&vals.map(f64::sqrt));
    symmetrize(&(&vecs * sq * vecs.transpose()))
}

/// Inverse square root, with the same eigenvalue clamp guarding tiny modes.
fn inv_sqrtm_spd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (vecs, vals) = clamped_eigen(m);
    let inv = DMatrix::from_diagonal(&vals.map(|v| if v > 0.0 { 1.0 / v.sqrt() } else { 0.0 }));
    symmetrize(&(&vecs * inv * vecs.transpose()))
}

/// Squared Bures metric between two covariance matrices.
pub fn bures_sq(cx: &DMatrix<f64>, cy: &DMatrix<f64>) -> f64 {
    let ry = sqrtm_spd(cy);
    let inner = sqrtm_spd(&symmetrize(&(&ry * cx * &ry)));
    let b2 = cx.trace() + cy.trace() - 2.0 * inner.trace();
    // round-off can push an exact zero slightly negative
    b2.max(0.0)
}

/// Squared 2-Wasserstein distance between the Gaussian summaries.
pub fn w2_sq(sx: &ChannelStats, sy: &ChannelStats) -> f64 {
    let dm = &sx.mean - &sy.mean;
    dm.norm_squared() + bures_sq(&sx.cov, &sy.cov)
}

/// Closed-form optimal map from `sx` onto `sy`; `eps >= 0` is a ridge added
/// to both covariances.
pub fn optimal_map(sx: &ChannelStats, sy: &ChannelStats, eps: f64) -> Result<TransportMap> {
    if eps < 0.0 || !eps.is_finite() {
        return Err(GistError::Argument(format!(
            "eps must be finite and >= 0, got {eps}"
        )));
    }
    if sx.mean.len() != sy.mean.len() {
        return Err(GistError::Dimension(format!(
            "channel count mismatch: {} vs {}",
            sx.mean.len(),
            sy.mean.len()
        )));
    }
    let c = sx.mean.len();
    let ident = DMatrix::identity(c, c);
    let cx = &sx.cov + &ident * eps;
    let cy = &sy.cov + &ident * eps;
    let rx = sqrtm_spd(&cx);
    let rx_inv = inv_sqrtm_spd(&cx);
    let mid = sqrtm_spd(&symmetrize(&(&rx * cy * &rx)));
    let a = symmetrize(&(&rx_inv * mid * &rx_inv));
    let b = &sy.mean - &a * &sx.mean;
    Ok(TransportMap { a, b })
}

/// Applies `T(x) = A x + b` to every sample.
pub fn apply_map(map: &TransportMap, t: &Tensor) -> Tensor {
    let mut out = t.clone();
    apply_map_filtered(map, t, &mut out, |_| true);
    out
}

/// Applies the map only at samples whose label matches, leaving others as in
/// `t`.
pub fn apply_map_masked(
    map: &TransportMap,
    t: &Tensor,
    mask: &RegionMask,
    label: u32,
) -> Result<Tensor> {
    if mask.width() != t.width || mask.height() != t.height {
        return Err(GistError::Dimension(
            "mask does not match subband dims".into(),
        ));
    }
    let mut out = t.clone();
    let labels = mask.labels();
    apply_map_filtered(map, t, &mut out, |i| labels[i] == label);
    Ok(out)
}

fn apply_map_filtered(
    map: &TransportMap,
    src: &Tensor,
    dst: &mut Tensor,
    keep: impl Fn(usize) -> bool,
) {
    let c = src.channels;
    debug_assert_eq!(map.a.nrows(), c);
    let n_pix = src.width * src.height;
    let mut x = vec![0.0f64; c];
    for i in 0..n_pix {
        if !keep(i) {
            continue;
        }
        for (ch, slot) in x.iter_mut().enumerate() {
            *slot = src.plane(ch)[i];
        }
        for row in 0..c {
            let mut acc = map.b[row];
            for (col, &xv) in x.iter().enumerate() {
                acc += map.a[(row, col)] * xv;
            }
            dst.plane_mut(row)[i] = acc;
        }
    }
}

/// Result of aligning one stack against style statistics: the mapped stack
/// and the per-subband squared transport residuals that remain afterwards
/// (approximation first, then details).
#[derive(Debug, Clone)]
pub struct AlignedStack {
    pub stack: SubbandStack,
    pub residuals: Vec<f64>,
}

/// Aligns every subband of `stack` (the approximation, and the details when
/// `align_details` is set) onto the matching subband statistics of `style`.
pub fn align_stack(
    stack: &SubbandStack,
    style: &SubbandStack,
    eps: f64,
    align_details: bool,
) -> Result<AlignedStack> {
    if stack.details.len() != style.details.len() {
        return Err(GistError::Dimension(format!(
            "detail count mismatch: {} vs {}",
            stack.details.len(),
            style.details.len()
        )));
    }
    let mut residuals = Vec::new();
    let align_one = |x: &Tensor, s: &Tensor| -> Result<(Tensor, f64)> {
        let target = compute_stats(s)?;
        let source = compute_stats(x)?;
        let map = optimal_map(&source, &target, eps)?;
        let mapped = apply_map(&map, x);
        let after = compute_stats(&mapped)?;
        Ok((mapped, w2_sq(&after, &target)))
    };
    let approx = match (&stack.approx, &style.approx) {
        (Some(x), Some(s)) => {
            let (mapped, r) = align_one(x, s)?;
            residuals.push(r);
            Some(mapped)
        }
        (None, None) => None,
        _ => {
            return Err(GistError::Dimension(
                "approximation present on one stack but not the other".into(),
            ))
        }
    };
    let mut details = Vec::with_capacity(stack.details.len());
    for (x, s) in stack.details.iter().zip(&style.details) {
        if align_details {
            let (mapped, r) = align_one(x, s)?;
            residuals.push(r);
            details.push(mapped);
        } else {
            details.push(x.clone());
        }
    }
    Ok(AlignedStack {
        stack: SubbandStack {
            level: stack.level,
            approx,
            details,
        },
        residuals,
    })
}

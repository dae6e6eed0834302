//! Edge tangent flow: a smoothed per-pixel tangent field used by the
//! artistic mode.
//!
//! The field is seeded from Sobel gradients (tangent = rotated gradient,
//! magnitude = gradient magnitude normalized to [0,1]) and refined by a
//! weighted neighborhood vote: each pass replaces a pixel's tangent with the
//! sign-aligned average of its disk neighbors, weighted by magnitude
//! difference and directional agreement, then renormalizes.  Flat pixels
//! carry the zero vector and stay zero.

use crate::error::{GistError, Result};
use crate::image::{ImageTensor, Rect};
use crate::tensor::Tensor;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub struct EtfParams {
    /// Disk radius of the smoothing neighborhood, in pixels.
    pub radius: usize,
    /// Number of refinement passes.
    pub iterations: usize,
}

impl Default for EtfParams {
    fn default() -> Self {
        EtfParams {
            radius: 5,
            iterations: 3,
        }
    }
}

/// Tangent directions and normalized gradient magnitudes for one image.
#[derive(Debug, Clone)]
pub struct EtfField {
    width: usize,
    height: usize,
    vx: Vec<f64>,
    vy: Vec<f64>,
    mag: Vec<f64>,
}

impl EtfField {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Unit tangent at a pixel, or (0, 0) in flat regions.
    pub fn tangent(&self, x: usize, y: usize) -> (f64, f64) {
        let i = y * self.width + x;
        (self.vx[i], self.vy[i])
    }

    /// Normalized gradient magnitude in [0, 1].
    pub fn magnitude(&self, x: usize, y: usize) -> f64 {
        self.mag[y * self.width + x]
    }
}

#[inline]
fn clampi(v: isize, hi: usize) -> usize {
    v.clamp(0, hi as isize - 1) as usize
}

/// Builds the initial field from Sobel gradients of a single-channel image;
/// border pixels replicate their neighbors.
pub fn init_etf(gray: &ImageTensor) -> Result<EtfField> {
    if gray.channels() != 1 {
        return Err(GistError::Argument(format!(
            "edge tangent flow wants a single channel, got {}",
            gray.channels()
        )));
    }
    let (w, h) = (gray.width(), gray.height());
    let p = gray.plane(0);
    let at = |x: isize, y: isize| p[clampi(y, h) * w + clampi(x, w)] as f64;
    let mut vx = vec![0.0; w * h];
    let mut vy = vec![0.0; w * h];
    let mut mag = vec![0.0; w * h];
    let mut max_mag = 0.0f64;
    for y in 0..h as isize {
        for x in 0..w as isize {
            let gx = -at(x - 1, y - 1) + at(x + 1, y - 1) - 2.0 * at(x - 1, y) + 2.0 * at(x + 1, y)
                - at(x - 1, y + 1)
                + at(x + 1, y + 1);
            let gy = -at(x - 1, y - 1) - 2.0 * at(x, y - 1) - at(x + 1, y - 1)
                + at(x - 1, y + 1)
                + 2.0 * at(x, y + 1)
                + at(x + 1, y + 1);
            let g = (gx * gx + gy * gy).sqrt();
            let i = (y as usize) * w + x as usize;
            if g >= 1e-8 {
                vx[i] = -gy / g;
                vy[i] = gx / g;
            }
            mag[i] = g;
            max_mag = max_mag.max(g);
        }
    }
    if max_mag > 0.0 {
        for m in &mut mag {
            *m /= max_mag;
        }
    }
    Ok(EtfField {
        width: w,
        height: h,
        vx,
        vy,
        mag,
    })
}

/// One refinement pass: sign-aligned, weighted average over the disk
/// neighborhood, renormalized to unit length.  Double-buffered, so the
/// update order is immaterial.
pub fn refine_etf(field: &EtfField, params: &EtfParams) -> EtfField {
    let (w, h) = (field.width, field.height);
    let r = params.radius as isize;
    let mut offsets = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy < r * r {
                offsets.push((dx, dy));
            }
        }
    }
    let mut out = field.clone();
    for y in 0..h as isize {
        for x in 0..w as isize {
            let i = (y as usize) * w + x as usize;
            let (ex, ey) = (field.vx[i], field.vy[i]);
            let gx = field.mag[i];
            let mut sx = 0.0;
            let mut sy = 0.0;
            let mut tau = 0usize;
            for &(dx, dy) in &offsets {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = (ny as usize) * w + nx as usize;
                tau += 1;
                let dot = ex * field.vx[j] + ey * field.vy[j];
                let phi = if dot < 0.0 { -1.0 } else { 1.0 };
                let wm = (field.mag[j] - gx + 1.0) / 2.0;
                let wd = dot.abs();
                let wgt = phi * wm * wd;
                sx += wgt * field.vx[j];
                sy += wgt * field.vy[j];
            }
            if tau > 0 {
                sx /= tau as f64;
                sy /= tau as f64;
            }
            let norm = (sx * sx + sy * sy).sqrt();
            if norm >= 1e-12 {
                out.vx[i] = sx / norm;
                out.vy[i] = sy / norm;
            } else {
                out.vx[i] = 0.0;
                out.vy[i] = 0.0;
            }
        }
    }
    out
}

/// Initializes and refines in one call.
pub fn compute_etf(gray: &ImageTensor, params: &EtfParams) -> Result<EtfField> {
    let mut field = init_etf(gray)?;
    for _ in 0..params.iterations {
        field = refine_etf(&field, params);
    }
    Ok(field)
}

/// Renders the field as its magnitude channel: bright along strong edges,
/// dark in flat regions, always within [0, 1].
pub fn etf_to_grayscale(field: &EtfField) -> ImageTensor {
    let data: Vec<f32> = field.mag.iter().map(|&m| m as f32).collect();
    ImageTensor::from_vec(1, field.width, field.height, data)
        .expect("magnitudes are finite by construction")
}

/// Element-wise maximum of two equally shaped subband tensors.
pub fn fuse_details(content: &Tensor, etf: &Tensor) -> Result<Tensor> {
    if !content.same_shape(etf) {
        return Err(GistError::Argument(format!(
            "fusion needs equal shapes, got {}x{}x{} vs {}x{}x{}",
            content.channels, content.width, content.height, etf.channels, etf.width, etf.height
        )));
    }
    let mut out = content.clone();
    for (o, &e) in out.data.iter_mut().zip(&etf.data) {
        *o = o.max(e);
    }
    Ok(out)
}

/// Deterministic random square crop: side uniform in
/// [min(w,h)/2, min(w,h)], position uniform over valid offsets.
pub fn seeded_crop_rect(width: usize, height: usize, seed: u64) -> Rect {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = width.min(height);
    let lo = (m / 2).max(1);
    let side = rng.random_range(lo..=m);
    let x = rng.random_range(0..=width - side);
    let y = rng.random_range(0..=height - side);
    Rect {
        x,
        y,
        w: side,
        h: side,
    }
}

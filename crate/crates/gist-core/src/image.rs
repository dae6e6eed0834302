//! Planar image container and basic geometry ops.
//!
//! Pixel data is stored channel-major: one contiguous `width * height` plane
//! per channel, rows inside a plane.  Sample values are nominally in `[0, 1]`
//! but are not clamped until an image is written to disk, so intermediate
//! results may overshoot.

use crate::error::{GistError, Result};

/// Axis-aligned crop window, in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

/// Planar single-precision image, `channels` planes of `width * height`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageTensor {
    channels: usize,
    width: usize,
    height: usize,
    data: Vec<f32>,
}

impl ImageTensor {
    pub fn zeros(channels: usize, width: usize, height: usize) -> Self {
        ImageTensor {
            channels,
            width,
            height,
            data: vec![0.0; channels * width * height],
        }
    }

    /// Wraps raw planar data. Rejects length mismatches and non-finite samples.
    pub fn from_vec(channels: usize, width: usize, height: usize, data: Vec<f32>) -> Result<Self> {
        if data.len() != channels * width * height {
            return Err(GistError::Dimension(format!(
                "expected {} samples for {}x{}x{}, got {}",
                channels * width * height,
                channels,
                width,
                height,
                data.len()
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(GistError::NonFinite("image sample".into()));
        }
        Ok(ImageTensor {
            channels,
            width,
            height,
            data,
        })
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn plane(&self, c: usize) -> &[f32] {
        let n = self.width * self.height;
        &self.data[c * n..(c + 1) * n]
    }

    pub fn plane_mut(&mut self, c: usize) -> &mut [f32] {
        let n = self.width * self.height;
        &mut self.data[c * n..(c + 1) * n]
    }

    #[inline]
    pub fn get(&self, c: usize, x: usize, y: usize) -> f32 {
        self.data[(c * self.height + y) * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, c: usize, x: usize, y: usize, v: f32) {
        self.data[(c * self.height + y) * self.width + x] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Luma conversion with BT.601 weights; single-channel input is cloned.
    pub fn to_grayscale(&self) -> Result<Self> {
        match self.channels {
            1 => Ok(self.clone()),
            3 => {
                let n = self.width * self.height;
                let (r, g, b) = (self.plane(0), self.plane(1), self.plane(2));
                let mut out = Vec::with_capacity(n);
                for i in 0..n {
                    let y = 0.299 * r[i] as f64 + 0.587 * g[i] as f64 + 0.114 * b[i] as f64;
                    out.push(y as f32);
                }
                ImageTensor::from_vec(1, self.width, self.height, out)
            }
            c => Err(GistError::Argument(format!(
                "grayscale conversion needs 1 or 3 channels, got {c}"
            ))),
        }
    }

    /// Bilinear resize with half-pixel-centered sampling and edge clamping.
    /// A same-size resize reproduces the input exactly.
    pub fn resize_bilinear(&self, new_w: usize, new_h: usize) -> Result<Self> {
        if new_w == 0 || new_h == 0 {
            return Err(GistError::Dimension(
                "resize target must be non-empty".into(),
            ));
        }
        let sx = self.width as f64 / new_w as f64;
        let sy = self.height as f64 / new_h as f64;
        let mut out = ImageTensor::zeros(self.channels, new_w, new_h);
        for c in 0..self.channels {
            let src = self.plane(c);
            for y in 0..new_h {
                let fy = ((y as f64 + 0.5) * sy - 0.5).clamp(0.0, (self.height - 1) as f64);
                let y0 = fy.floor() as usize;
                let y1 = (y0 + 1).min(self.height - 1);
                let wy = fy - y0 as f64;
                for x in 0..new_w {
                    let fx = ((x as f64 + 0.5) * sx - 0.5).clamp(0.0, (self.width - 1) as f64);
                    let x0 = fx.floor() as usize;
                    let x1 = (x0 + 1).min(self.width - 1);
                    let wx = fx - x0 as f64;
                    let v00 = src[y0 * self.width + x0] as f64;
                    let v01 = src[y0 * self.width + x1] as f64;
                    let v10 = src[y1 * self.width + x0] as f64;
                    let v11 = src[y1 * self.width + x1] as f64;
                    let top = v00 + (v01 - v00) * wx;
                    let bot = v10 + (v11 - v10) * wx;
                    out.set(c, x, y, (top + (bot - top) * wy) as f32);
                }
            }
        }
        Ok(out)
    }

    /// Extracts `rect`; the window must lie inside the image.
    pub fn crop(&self, rect: Rect) -> Result<Self> {
        if rect.w == 0 || rect.h == 0 {
            return Err(GistError::Dimension("empty crop rect".into()));
        }
        if rect.x + rect.w > self.width || rect.y + rect.h > self.height {
            return Err(GistError::Dimension(format!(
                "crop {}x{}+{}+{} exceeds image {}x{}",
                rect.w, rect.h, rect.x, rect.y, self.width, self.height
            )));
        }
        let mut out = ImageTensor::zeros(self.channels, rect.w, rect.h);
        for c in 0..self.channels {
            for y in 0..rect.h {
                for x in 0..rect.w {
                    out.set(c, x, y, self.get(c, rect.x + x, rect.y + y));
                }
            }
        }
        Ok(out)
    }

    /// Largest absolute sample difference between two same-shape images.
    pub fn max_abs_diff(&self, other: &ImageTensor) -> f32 {
        assert_eq!(self.data.len(), other.data.len(), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f32::max)
    }
}

/// Integer label map aligned with an image; label 0 reads as "unlabeled" but
/// participates in region statistics like any other value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionMask {
    width: usize,
    height: usize,
    labels: Vec<u32>,
}

impl RegionMask {
    pub fn from_labels(width: usize, height: usize, labels: Vec<u32>) -> Result<Self> {
        if labels.len() != width * height {
            return Err(GistError::Dimension(format!(
                "expected {} labels for {}x{}, got {}",
                width * height,
                width,
                height,
                labels.len()
            )));
        }
        Ok(RegionMask {
            width,
            height,
            labels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    /// Distinct labels, ascending.
    pub fn label_set(&self) -> Vec<u32> {
        let mut set: Vec<u32> = self.labels.clone();
        set.sort_unstable();
        set.dedup();
        set
    }

    /// Nearest-neighbor decimation by 2 (top-left sample wins).
    pub fn downsample2(&self) -> Result<Self> {
        if !self.width.is_multiple_of(2) || !self.height.is_multiple_of(2) {
            return Err(GistError::Dimension(format!(
                "mask {}x{} not divisible by 2",
                self.width, self.height
            )));
        }
        let (w, h) = (self.width / 2, self.height / 2);
        let mut labels = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                labels.push(self.get(2 * x, 2 * y));
            }
        }
        RegionMask::from_labels(w, h, labels)
    }

    /// Nearest-neighbor resize, for aligning a mask with a resized image.
    pub fn resize_nearest(&self, new_w: usize, new_h: usize) -> Result<Self> {
        if new_w == 0 || new_h == 0 {
            return Err(GistError::Dimension(
                "resize target must be non-empty".into(),
            ));
        }
        let sx = self.width as f64 / new_w as f64;
        let sy = self.height as f64 / new_h as f64;
        let mut labels = Vec::with_capacity(new_w * new_h);
        for y in 0..new_h {
            let fy = ((y as f64 + 0.5) * sy - 0.5)
                .round()
                .clamp(0.0, (self.height - 1) as f64);
            for x in 0..new_w {
                let fx = ((x as f64 + 0.5) * sx - 0.5)
                    .round()
                    .clamp(0.0, (self.width - 1) as f64);
                labels.push(self.get(fx as usize, fy as usize));
            }
        }
        RegionMask::from_labels(new_w, new_h, labels)
    }
}

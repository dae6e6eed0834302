//! Double-precision planar tensor used by the transforms and statistics.
//!
//! Same channel-major layout as [`crate::image::ImageTensor`]; images are
//! promoted to `f64` on the way in and demoted on the way out, so all
//! subband arithmetic runs in double precision.

use crate::error::{GistError, Result};
use crate::image::ImageTensor;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub channels: usize,
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(channels: usize, width: usize, height: usize) -> Self {
        Tensor {
            channels,
            width,
            height,
            data: vec![0.0; channels * width * height],
        }
    }

    pub fn from_image(img: &ImageTensor) -> Self {
        Tensor {
            channels: img.channels(),
            width: img.width(),
            height: img.height(),
            data: img.data().iter().map(|&v| v as f64).collect(),
        }
    }

    pub fn to_image(&self) -> Result<ImageTensor> {
        let data: Vec<f32> = self.data.iter().map(|&v| v as f32).collect();
        ImageTensor::from_vec(self.channels, self.width, self.height, data)
    }

    #[inline]
    pub fn plane(&self, c: usize) -> &[f64] {
        let n = self.width * self.height;
        &self.data[c * n..(c + 1) * n]
    }

    #[inline]
    pub fn plane_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.width * self.height;
        &mut self.data[c * n..(c + 1) * n]
    }

    #[inline]
    pub fn get(&self, c: usize, x: usize, y: usize) -> f64 {
        self.data[(c * self.height + y) * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, c: usize, x: usize, y: usize, v: f64) {
        self.data[(c * self.height + y) * self.width + x] = v;
    }

    pub fn same_shape(&self, other: &Tensor) -> bool {
        self.channels == other.channels && self.width == other.width && self.height == other.height
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn check_finite(&self, what: &str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(GistError::NonFinite(what.into()))
        }
    }

    pub fn max_abs_diff(&self, other: &Tensor) -> f64 {
        assert!(self.same_shape(other), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Sum of squared samples over all channels.
    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// `self * a + other * b`, element-wise; shapes must match.
    pub fn lin_comb(&self, a: f64, other: &Tensor, b: f64) -> Tensor {
        assert!(self.same_shape(other), "shape mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| x * a + y * b)
            .collect();
        Tensor {
            channels: self.channels,
            width: self.width,
            height: self.height,
            data,
        }
    }

    /// Per-sample scaling in place.
    pub fn scale(&mut self, a: f64) {
        for v in &mut self.data {
            *v *= a;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn image_round_trip_is_exact() {
        let data: Vec<f32> = (0..24).map(|i| i as f32 / 23.0).collect();
        let img = ImageTensor::from_vec(2, 4, 3, data).unwrap();
        let t = Tensor::from_image(&img);
        let back = t.to_image().unwrap();
        assert_eq!(img, back);
    }

    #[test]
    fn lin_comb_and_energy() {
        let a = Tensor {
            channels: 1,
            width: 2,
            height: 1,
            data: vec![1.0, 2.0],
        };
        let b = Tensor {
            channels: 1,
            width: 2,
            height: 1,
            data: vec![3.0, -1.0],
        };
        let c = a.lin_comb(2.0, &b, 0.5);
        assert_eq!(c.data, vec![3.5, 3.5]);
        assert_eq!(a.energy(), 5.0);
    }
}

//! Decimated (DWT) and stationary (SWT) 2-D wavelet transforms.
//!
//! Both transforms are separable, use circular boundary handling, and come in
//! orthonormal families (`haar`, `db2`).  Analysis convolves rows and columns
//! with the filter pair and, in the decimated case, keeps even phases; the
//! stationary variant keeps every phase and instead upsamples the filter taps
//! by `2^(level-1)` (holes between taps).  Synthesis applies the adjoint,
//! which for an orthonormal family is the exact inverse; the stationary
//! inverse averages the even and odd phase reconstructions, which is the
//! adjoint scaled by 1/2 per axis.
//!
//! Subbands are ordered `(a, v, h, d)`: `v` is low-pass along rows and
//! high-pass along columns, `h` the opposite, `d` high-pass in both.

use crate::error::{GistError, Result};
use crate::image::RegionMask;
use crate::tensor::Tensor;
use crate::transform::MultiscaleTransform;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveletFamily {
    Haar,
    Db2,
}

impl WaveletFamily {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "haar" => Ok(WaveletFamily::Haar),
            "db2" => Ok(WaveletFamily::Db2),
            other => Err(GistError::Argument(format!(
                "unknown wavelet {other:?} (want haar or db2)"
            ))),
        }
    }
}

/// Analysis pair `(h0, h1)` and synthesis pair `(g0, g1)`.  For the
/// orthonormal families here the synthesis taps are the reversed analysis
/// taps.
#[derive(Debug, Clone)]
pub struct WaveletFilters {
    pub h0: Vec<f64>,
    pub h1: Vec<f64>,
    pub g0: Vec<f64>,
    pub g1: Vec<f64>,
}

/// Builds the filter bank for a family.  The high-pass is the alternating-
/// sign reversal of the low-pass, so the pair is conjugate-quadrature.
pub fn make_filters(family: WaveletFamily) -> WaveletFilters {
    let h0: Vec<f64> = match family {
        WaveletFamily::Haar => {
            let r = 1.0 / 2f64.sqrt();
            vec![r, r]
        }
        WaveletFamily::Db2 => {
            let s3 = 3f64.sqrt();
            let d = 4.0 * 2f64.sqrt();
            vec![
                (1.0 + s3) / d,
                (3.0 + s3) / d,
                (3.0 - s3) / d,
                (1.0 - s3) / d,
            ]
        }
    };
    let k = h0.len();
    let h1: Vec<f64> = (0..k)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * h0[k - 1 - i]
        })
        .collect();
    let g0: Vec<f64> = h0.iter().rev().copied().collect();
    let g1: Vec<f64> = h1.iter().rev().copied().collect();
    WaveletFilters { h0, h1, g0, g1 }
}

/// Circular convolution of one axis with the pair `(h0, h1)`, decimated to
/// even phases.  `axis` 0 filters along x (columns index), 1 along y.
fn conv_down_axis(src: &Tensor, h0: &[f64], h1: &[f64], axis: usize) -> (Tensor, Tensor) {
    let k = h0.len();
    let (w, h) = (src.width, src.height);
    let (ow, oh) = if axis == 0 { (w / 2, h) } else { (w, h / 2) };
    let mut lo = Tensor::zeros(src.channels, ow, oh);
    let mut hi = Tensor::zeros(src.channels, ow, oh);
    let n = if axis == 0 { w } else { h };
    let lines = if axis == 0 { h } else { w };
    for c in 0..src.channels {
        let plane = src.plane(c);
        let lo_p = lo.plane_mut(c);
        let hi_p = hi.plane_mut(c);
        // gather along the filtered axis for every line of the other axis
        for line in 0..lines {
            for out_i in 0..n / 2 {
                let mut acc0 = 0.0;
                let mut acc1 = 0.0;
                for t in 0..k {
                    let mut idx = 2 * out_i as isize - t as isize;
                    while idx < 0 {
                        idx += n as isize;
                    }
                    let idx = idx as usize % n;
                    let v = if axis == 0 {
                        plane[line * w + idx]
                    } else {
                        plane[idx * w + line]
                    };
                    acc0 += h0[t] * v;
                    acc1 += h1[t] * v;
                }
                let out_idx = if axis == 0 {
                    line * ow + out_i
                } else {
                    out_i * ow + line
                };
                lo_p[out_idx] = acc0;
                hi_p[out_idx] = acc1;
            }
        }
    }
    (lo, hi)
}

/// Adjoint of [`conv_down_axis`]: upsample both inputs and convolve with the
/// synthesis taps, accumulating into one axis-doubled output.
fn up_conv_axis(lo: &Tensor, hi: &Tensor, g0: &[f64], g1: &[f64], axis: usize) -> Tensor {
    let k = g0.len();
    let (ow, oh) = if axis == 0 {
        (lo.width * 2, lo.height)
    } else {
        (lo.width, lo.height * 2)
    };
    let mut out = Tensor::zeros(lo.channels, ow, oh);
    let n = if axis == 0 { ow } else { oh };
    let lines = if axis == 0 { oh } else { ow };
    for c in 0..lo.channels {
        let lo_p = lo.plane(c);
        let hi_p = hi.plane(c);
        let out_p = out.plane_mut(c);
        for line in 0..lines {
            for in_i in 0..n / 2 {
                let (lv, hv) = {
                    let idx = if axis == 0 {
                        line * lo.width + in_i
                    } else {
                        in_i * lo.width + line
                    };
                    (lo_p[idx], hi_p[idx])
                };
                // scatter: sample in_i contributes to outputs (2*in_i - t) mod n,
                // written via the reversed synthesis taps
                for t in 0..k {
                    let mut idx = 2 * in_i as isize - (k - 1 - t) as isize;
                    while idx < 0 {
                        idx += n as isize;
                    }
                    let idx = idx as usize % n;
                    let out_idx = if axis == 0 {
                        line * ow + idx
                    } else {
                        idx * ow + line
                    };
                    out_p[out_idx] += g0[t] * lv + g1[t] * hv;
                }
            }
        }
    }
    out
}

/// À-trous convolution along one axis with taps spread by `step`; no
/// decimation.
fn atrous_conv_axis(
    src: &Tensor,
    h0: &[f64],
    h1: &[f64],
    step: usize,
    axis: usize,
) -> (Tensor, Tensor) {
    let k = h0.len();
    let (w, h) = (src.width, src.height);
    let mut lo = Tensor::zeros(src.channels, w, h);
    let mut hi = Tensor::zeros(src.channels, w, h);
    let n = if axis == 0 { w } else { h };
    let lines = if axis == 0 { h } else { w };
    let offs: Vec<usize> = (0..k).map(|t| (t * step) % n).collect();
    for c in 0..src.channels {
        let plane = src.plane(c);
        let lo_p = lo.plane_mut(c);
        let hi_p = hi.plane_mut(c);
        for line in 0..lines {
            for i in 0..n {
                let mut acc0 = 0.0;
                let mut acc1 = 0.0;
                for t in 0..k {
                    let idx = if i >= offs[t] {
                        i - offs[t]
                    } else {
                        i + n - offs[t]
                    };
                    let v = if axis == 0 {
                        plane[line * w + idx]
                    } else {
                        plane[idx * w + line]
                    };
                    acc0 += h0[t] * v;
                    acc1 += h1[t] * v;
                }
                let out_idx = if axis == 0 {
                    line * w + i
                } else {
                    i * w + line
                };
                lo_p[out_idx] = acc0;
                hi_p[out_idx] = acc1;
            }
        }
    }
    (lo, hi)
}

/// Inverse of [`atrous_conv_axis`]: the scaled adjoint, equivalent to
/// averaging the even- and odd-phase decimated reconstructions.
fn atrous_inv_axis(
    lo: &Tensor,
    hi: &Tensor,
    h0: &[f64],
    h1: &[f64],
    step: usize,
    axis: usize,
) -> Tensor {
    let k = h0.len();
    let (w, h) = (lo.width, lo.height);
    let mut out = Tensor::zeros(lo.channels, w, h);
    let n = if axis == 0 { w } else { h };
    let lines = if axis == 0 { h } else { w };
    let offs: Vec<usize> = (0..k).map(|t| (t * step) % n).collect();
    for c in 0..lo.channels {
        let lo_p = lo.plane(c);
        let hi_p = hi.plane(c);
        let out_p = out.plane_mut(c);
        for line in 0..lines {
            for i in 0..n {
                let mut acc = 0.0;
                for t in 0..k {
                    let idx = if i + offs[t] < n {
                        i + offs[t]
                    } else {
                        i + offs[t] - n
                    };
                    let v_idx = if axis == 0 {
                        line * w + idx
                    } else {
                        idx * w + line
                    };
                    acc += h0[t] * lo_p[v_idx] + h1[t] * hi_p[v_idx];
                }
                let out_idx = if axis == 0 {
                    line * w + i
                } else {
                    i * w + line
                };
                out_p[out_idx] = 0.5 * acc;
            }
        }
    }
    out
}

/// Wavelet transform configuration; `decimated` selects DWT over SWT.
#[derive(Debug, Clone)]
pub struct WaveletTransform {
    pub family: WaveletFamily,
    pub levels: usize,
    pub decimated: bool,
    filters: WaveletFilters,
}

impl WaveletTransform {
    pub fn new(family: WaveletFamily, levels: usize, decimated: bool) -> Result<Self> {
        if levels == 0 {
            return Err(GistError::Argument("levels must be >= 1".into()));
        }
        Ok(WaveletTransform {
            family,
            levels,
            decimated,
            filters: make_filters(family),
        })
    }

    pub fn filters(&self) -> &WaveletFilters {
        &self.filters
    }
}

impl MultiscaleTransform for WaveletTransform {
    fn levels(&self) -> usize {
        self.levels
    }

    fn num_details(&self, _level: usize) -> usize {
        3
    }

    fn check_dims(&self, width: usize, height: usize) -> Result<()> {
        let div = 1usize << self.levels;
        if !width.is_multiple_of(div) || !height.is_multiple_of(div) {
            return Err(GistError::Dimension(format!(
                "dims {width}x{height} not divisible by 2^{} = {div}; resize the input first",
                self.levels
            )));
        }
        Ok(())
    }

    fn analyze_level(&self, approx: &Tensor, level: usize) -> Result<(Tensor, Vec<Tensor>)> {
        if level == 0 || level > self.levels {
            return Err(GistError::Argument(format!("level {level} out of range")));
        }
        let f = &self.filters;
        if self.decimated {
            if !approx.width.is_multiple_of(2) || !approx.height.is_multiple_of(2) {
                return Err(GistError::Dimension(format!(
                    "level {level} input {}x{} must have even dims",
                    approx.width, approx.height
                )));
            }
            let (lo_x, hi_x) = conv_down_axis(approx, &f.h0, &f.h1, 0);
            let (a, hh) = conv_down_axis(&lo_x, &f.h0, &f.h1, 1);
            let (v, d) = conv_down_axis(&hi_x, &f.h0, &f.h1, 1);
            Ok((a, vec![v, hh, d]))
        } else {
            let step = 1usize << (level - 1);
            if !approx.width.is_multiple_of(2 * step) || !approx.height.is_multiple_of(2 * step) {
                return Err(GistError::Dimension(format!(
                    "level {level} stationary step {step} incompatible with {}x{}",
                    approx.width, approx.height
                )));
            }
            let (lo_x, hi_x) = atrous_conv_axis(approx, &f.h0, &f.h1, step, 0);
            let (a, hh) = atrous_conv_axis(&lo_x, &f.h0, &f.h1, step, 1);
            let (v, d) = atrous_conv_axis(&hi_x, &f.h0, &f.h1, step, 1);
            Ok((a, vec![v, hh, d]))
        }
    }

    fn synthesize_level(
        &self,
        approx: &Tensor,
        details: &[Tensor],
        level: usize,
    ) -> Result<Tensor> {
        if details.len() != 3 {
            return Err(GistError::Dimension(format!(
                "wavelet synthesis wants 3 detail subbands, got {}",
                details.len()
            )));
        }
        let (v, hh, d) = (&details[0], &details[1], &details[2]);
        for band in [v, hh, d] {
            if !band.same_shape(approx) {
                return Err(GistError::Dimension("subband shape mismatch".into()));
            }
        }
        let f = &self.filters;
        if self.decimated {
            let lo_x = up_conv_axis(approx, hh, &f.g0, &f.g1, 1);
            let hi_x = up_conv_axis(v, d, &f.g0, &f.g1, 1);
            Ok(up_conv_axis(&lo_x, &hi_x, &f.g0, &f.g1, 0))
        } else {
            let step = 1usize << (level - 1);
            let lo_x = atrous_inv_axis(approx, hh, &f.h0, &f.h1, step, 1);
            let hi_x = atrous_inv_axis(v, d, &f.h0, &f.h1, step, 1);
            Ok(atrous_inv_axis(&lo_x, &hi_x, &f.h0, &f.h1, step, 0))
        }
    }

    fn mask_to_level(&self, mask: &RegionMask, level: usize) -> Result<RegionMask> {
        if !self.decimated {
            return Ok(mask.clone());
        }
        let mut m = mask.clone();
        for _ in 0..level {
            m = m.downsample2()?;
        }
        Ok(m)
    }

    fn detail_masks(&self, mask: &RegionMask, level: usize) -> Result<Vec<RegionMask>> {
        let m = self.mask_to_level(mask, level)?;
        Ok(vec![m.clone(), m.clone(), m])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{analyze, synthesize};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_tensor(rng: &mut ChaCha8Rng, c: usize, w: usize, h: usize) -> Tensor {
        let data = (0..c * w * h).map(|_| rng.random::<f64>()).collect();
        Tensor {
            channels: c,
            width: w,
            height: h,
            data,
        }
    }

    #[test]
    fn filter_identities_hold() {
        for family in [WaveletFamily::Haar, WaveletFamily::Db2] {
            let f = make_filters(family);
            let k = f.h0.len();
            let sum: f64 = f.h0.iter().sum();
            assert!((sum - 2f64.sqrt()).abs() < 1e-12, "dc gain");
            let norm: f64 = f.h0.iter().map(|v| v * v).sum();
            assert!((norm - 1.0).abs() < 1e-12, "unit norm");
            if k >= 4 {
                let lag2: f64 = (0..k - 2).map(|i| f.h0[i] * f.h0[i + 2]).sum();
                assert!(lag2.abs() < 1e-12, "shift-2 orthogonality");
            }
            let hsum: f64 = f.h1.iter().sum();
            assert!(hsum.abs() < 1e-12, "high-pass kills constants");
            // cross-orthogonality at even lags
            for lag in [0i32, 2, -2] {
                let mut acc = 0.0;
                for i in 0..k as i32 {
                    let j = i + lag;
                    if j >= 0 && (j as usize) < k {
                        acc += f.h0[i as usize] * f.h1[j as usize];
                    }
                }
                assert!(acc.abs() < 1e-12, "cross lag {lag}");
            }
            let rev: Vec<f64> = f.h0.iter().rev().copied().collect();
            assert_eq!(f.g0, rev, "synthesis low = reversed analysis low");
            let rev: Vec<f64> = f.h1.iter().rev().copied().collect();
            assert_eq!(f.g1, rev, "synthesis high = reversed analysis high");
        }
    }

    #[test]
    fn db2_taps_match_frozen_values() {
        let f = make_filters(WaveletFamily::Db2);
        let want = [
            0.48296291314453416,
            0.8365163037378079,
            0.22414386804201336,
            -0.12940952255126037,
        ];
        for (got, want) in f.h0.iter().zip(want) {
            assert!((got - want).abs() < 1e-15, "{got} vs {want}");
        }
        // second vanishing moment: linear ramps go entirely to the low band
        let m1: f64 = f.h1.iter().enumerate().map(|(i, v)| i as f64 * v).sum();
        assert!(m1.abs() < 1e-12);
    }

    #[test]
    fn constant_image_concentrates_in_approx() {
        let c = 0.4;
        let img = Tensor {
            channels: 1,
            width: 8,
            height: 8,
            data: vec![c; 64],
        };
        let t = WaveletTransform::new(WaveletFamily::Db2, 1, true).unwrap();
        let (a, details) = t.analyze_level(&img, 1).unwrap();
        for v in &a.data {
            assert!((v - 2.0 * c).abs() < 1e-12, "approx gains 2 per level");
        }
        for band in &details {
            for v in &band.data {
                assert!(v.abs() < 1e-12);
            }
        }
        // and the stationary variant behaves identically for constants
        let t = WaveletTransform::new(WaveletFamily::Db2, 1, false).unwrap();
        let (a, details) = t.analyze_level(&img, 1).unwrap();
        for v in &a.data {
            assert!((v - 2.0 * c).abs() < 1e-12);
        }
        for band in &details {
            for v in &band.data {
                assert!(v.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn approx_only_stack_synthesizes_constant() {
        let c = 0.25;
        let t = WaveletTransform::new(WaveletFamily::Db2, 1, true).unwrap();
        let approx = Tensor {
            channels: 1,
            width: 4,
            height: 4,
            data: vec![2.0 * c; 16],
        };
        let zeros = Tensor::zeros(1, 4, 4);
        let img = t
            .synthesize_level(&approx, &[zeros.clone(), zeros.clone(), zeros], 1)
            .unwrap();
        for v in &img.data {
            assert!((v - c).abs() < 1e-12);
        }
    }

    #[test]
    fn dwt_perfect_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for family in [WaveletFamily::Haar, WaveletFamily::Db2] {
            let img = random_tensor(&mut rng, 3, 16, 16);
            let t = WaveletTransform::new(family, 2, true).unwrap();
            let rep = analyze(&t, &img).unwrap();
            let back = synthesize(&t, &rep).unwrap();
            assert!(img.max_abs_diff(&back) < 1e-10, "{family:?}");
        }
    }

    #[test]
    fn swt_perfect_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for family in [WaveletFamily::Haar, WaveletFamily::Db2] {
            let img = random_tensor(&mut rng, 3, 16, 16);
            let t = WaveletTransform::new(family, 3, false).unwrap();
            let rep = analyze(&t, &img).unwrap();
            let back = synthesize(&t, &rep).unwrap();
            assert!(img.max_abs_diff(&back) < 1e-10, "{family:?}");
        }
    }

    #[test]
    fn tiny_coarse_levels_still_reconstruct() {
        // at 2x2 the wrapped db2 filters degenerate but stay orthonormal
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let img = random_tensor(&mut rng, 1, 8, 8);
        for decimated in [true, false] {
            let t = WaveletTransform::new(WaveletFamily::Db2, 3, decimated).unwrap();
            let rep = analyze(&t, &img).unwrap();
            let back = synthesize(&t, &rep).unwrap();
            assert!(img.max_abs_diff(&back) < 1e-10, "decimated={decimated}");
        }
    }

    #[test]
    fn dwt_conserves_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let img = random_tensor(&mut rng, 3, 32, 32);
        let t = WaveletTransform::new(WaveletFamily::Db2, 3, true).unwrap();
        let rep = analyze(&t, &img).unwrap();
        let mut coeff_energy = 0.0;
        for s in &rep.stacks {
            if let Some(a) = &s.approx {
                coeff_energy += a.energy();
            }
            for d in &s.details {
                coeff_energy += d.energy();
            }
        }
        let rel = (coeff_energy - img.energy()).abs() / img.energy();
        assert!(rel < 1e-12, "relative energy drift {rel}");
    }

    #[test]
    fn dwt_subband_dims_halve_per_level() {
        let img = Tensor::zeros(3, 64, 32);
        let t = WaveletTransform::new(WaveletFamily::Haar, 3, true).unwrap();
        let rep = analyze(&t, &img).unwrap();
        for (i, s) in rep.stacks.iter().enumerate() {
            let div = 1 << (i + 1);
            for d in &s.details {
                assert_eq!((d.width, d.height), (64 / div, 32 / div));
            }
        }
        assert_eq!(rep.coeff_count(), 3 * 64 * 32);
    }

    #[test]
    fn swt_level1_matches_dwt_even_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let img = random_tensor(&mut rng, 1, 8, 8);
        let dwt = WaveletTransform::new(WaveletFamily::Db2, 1, true).unwrap();
        let swt = WaveletTransform::new(WaveletFamily::Db2, 1, false).unwrap();
        let (a_d, det_d) = dwt.analyze_level(&img, 1).unwrap();
        let (a_s, det_s) = swt.analyze_level(&img, 1).unwrap();
        let check = |dec: &Tensor, full: &Tensor| {
            for y in 0..dec.height {
                for x in 0..dec.width {
                    let diff = (dec.get(0, x, y) - full.get(0, 2 * x, 2 * y)).abs();
                    assert!(diff < 1e-12);
                }
            }
        };
        check(&a_d, &a_s);
        for (d, s) in det_d.iter().zip(&det_s) {
            check(d, s);
        }
    }

    #[test]
    fn swt_is_shift_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let img = random_tensor(&mut rng, 1, 16, 16);
        let (sx, sy) = (5usize, 3usize);
        let mut shifted = Tensor::zeros(1, 16, 16);
        for y in 0..16 {
            for x in 0..16 {
                shifted.set(0, (x + sx) % 16, (y + sy) % 16, img.get(0, x, y));
            }
        }
        let t = WaveletTransform::new(WaveletFamily::Db2, 2, false).unwrap();
        let rep = analyze(&t, &img).unwrap();
        let rep_shifted = analyze(&t, &shifted).unwrap();
        for (s, ss) in rep.stacks.iter().zip(&rep_shifted.stacks) {
            for (d, ds) in s.details.iter().zip(&ss.details) {
                for y in 0..16 {
                    for x in 0..16 {
                        let diff = (d.get(0, x, y) - ds.get(0, (x + sx) % 16, (y + sy) % 16)).abs();
                        assert!(diff < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn analysis_matrix_is_orthonormal_1d_oracle() {
        // build the level-1 decimated analysis matrix for N=8 straight from
        // the definition and check W W^T = I, which is what makes the
        // adjoint synthesis an exact inverse
        let f = make_filters(WaveletFamily::Db2);
        let n = 8usize;
        let k = f.h0.len();
        let mut w = vec![vec![0.0f64; n]; n];
        for row in 0..n / 2 {
            for t in 0..k {
                let idx = ((2 * row + n) as isize - t as isize) as usize % n;
                w[row][idx] += f.h0[t];
                w[row + n / 2][idx] += f.h1[t];
            }
        }
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|m| w[i][m] * w[j][m]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12, "W W^T at ({i},{j}) = {dot}");
            }
        }
    }

    #[test]
    fn linearity_of_analysis() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let x = random_tensor(&mut rng, 1, 8, 8);
        let y = random_tensor(&mut rng, 1, 8, 8);
        let mix = x.lin_comb(0.7, &y, -1.3);
        for decimated in [true, false] {
            let t = WaveletTransform::new(WaveletFamily::Db2, 1, decimated).unwrap();
            let (ax, dx) = t.analyze_level(&x, 1).unwrap();
            let (ay, dy) = t.analyze_level(&y, 1).unwrap();
            let (am, dm) = t.analyze_level(&mix, 1).unwrap();
            assert!(am.max_abs_diff(&ax.lin_comb(0.7, &ay, -1.3)) < 1e-12);
            for i in 0..3 {
                assert!(dm[i].max_abs_diff(&dx[i].lin_comb(0.7, &dy[i], -1.3)) < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_indivisible_dims() {
        let t = WaveletTransform::new(WaveletFamily::Haar, 3, true).unwrap();
        assert!(t.check_dims(60, 64).is_err());
        assert!(t.check_dims(64, 64).is_ok());
    }
}

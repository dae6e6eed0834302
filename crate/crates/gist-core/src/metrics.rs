//! Image quality metrics: SSIM and PSNR.
//!
//! SSIM follows the standard windowed formulation: an 11x11 Gaussian window
//! (sigma 1.5) slides over every fully-interior position, local means,
//! variances and covariance feed the usual two-term formula with K1 = 0.01,
//! K2 = 0.03 on a dynamic range of 1.0, and channels are averaged.  Images
//! smaller than the window fall back to a single global window with uniform
//! weights.

use crate::error::{GistError, Result};
use crate::image::ImageTensor;

const WINDOW: usize = 11;
const SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;
const RANGE: f64 = 1.0;

fn gaussian_window() -> [f64; WINDOW] {
    let mut w = [0.0; WINDOW];
    let half = (WINDOW / 2) as isize;
    let mut sum = 0.0;
    for (i, slot) in w.iter_mut().enumerate() {
        let d = (i as isize - half) as f64;
        *slot = (-d * d / (2.0 * SIGMA * SIGMA)).exp();
        sum += *slot;
    }
    for slot in &mut w {
        *slot /= sum;
    }
    w
}

#[inline]
fn ssim_value(mx: f64, my: f64, vx: f64, vy: f64, cxy: f64) -> f64 {
    let c1 = (K1 * RANGE) * (K1 * RANGE);
    let c2 = (K2 * RANGE) * (K2 * RANGE);
    ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2))
}

/// Valid-region separable filtering: rows then columns, output shrinks by
/// `WINDOW - 1` in each axis.
fn valid_filter(src: &[f64], w: usize, h: usize, win: &[f64; WINDOW]) -> Vec<f64> {
    let ow = w - (WINDOW - 1);
    let oh = h - (WINDOW - 1);
    let mut rows = vec![0.0; ow * h];
    for y in 0..h {
        for x in 0..ow {
            let mut acc = 0.0;
            for (k, &g) in win.iter().enumerate() {
                acc += g * src[y * w + x + k];
            }
            rows[y * ow + x] = acc;
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            let mut acc = 0.0;
            for (k, &g) in win.iter().enumerate() {
                acc += g * rows[(y + k) * ow + x];
            }
            out[y * ow + x] = acc;
        }
    }
    out
}

fn ssim_plane(a: &[f64], b: &[f64], w: usize, h: usize) -> f64 {
    if w < WINDOW || h < WINDOW {
        let n = (w * h) as f64;
        let mx = a.iter().sum::<f64>() / n;
        let my = b.iter().sum::<f64>() / n;
        let mut vx = 0.0;
        let mut vy = 0.0;
        let mut cxy = 0.0;
        for (&x, &y) in a.iter().zip(b) {
            vx += (x - mx) * (x - mx);
            vy += (y - my) * (y - my);
            cxy += (x - mx) * (y - my);
        }
        return ssim_value(mx, my, vx / n, vy / n, cxy / n);
    }
    let win = gaussian_window();
    let aa: Vec<f64> = a.iter().map(|v| v * v).collect();
    let bb: Vec<f64> = b.iter().map(|v| v * v).collect();
    let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    let mu_a = valid_filter(a, w, h, &win);
    let mu_b = valid_filter(b, w, h, &win);
    let m_aa = valid_filter(&aa, w, h, &win);
    let m_bb = valid_filter(&bb, w, h, &win);
    let m_ab = valid_filter(&ab, w, h, &win);
    let mut total = 0.0;
    for i in 0..mu_a.len() {
        let (mx, my) = (mu_a[i], mu_b[i]);
        let vx = m_aa[i] - mx * mx;
        let vy = m_bb[i] - my * my;
        let cxy = m_ab[i] - mx * my;
        total += ssim_value(mx, my, vx, vy, cxy);
    }
    total / mu_a.len() as f64
}

/// Mean structural similarity between two images, channels averaged.
pub fn ssim(a: &ImageTensor, b: &ImageTensor) -> Result<f64> {
    if a.channels() != b.channels() || a.width() != b.width() || a.height() != b.height() {
        return Err(GistError::Argument(format!(
            "ssim needs equal shapes, got {}x{}x{} vs {}x{}x{}",
            a.channels(),
            a.width(),
            a.height(),
            b.channels(),
            b.width(),
            b.height()
        )));
    }
    let mut sum = 0.0;
    for c in 0..a.channels() {
        let pa: Vec<f64> = a.plane(c).iter().map(|&v| v as f64).collect();
        let pb: Vec<f64> = b.plane(c).iter().map(|&v| v as f64).collect();
        sum += ssim_plane(&pa, &pb, a.width(), a.height());
    }
    Ok(sum / a.channels() as f64)
}

/// Mean squared error over all channels.
pub fn mse(a: &ImageTensor, b: &ImageTensor) -> Result<f64> {
    if a.channels() != b.channels() || a.width() != b.width() || a.height() != b.height() {
        return Err(GistError::Argument("mse needs equal shapes".into()));
    }
    let mut sum = 0.0;
    let mut n = 0usize;
    for c in 0..a.channels() {
        for (&x, &y) in a.plane(c).iter().zip(b.plane(c)) {
            let d = x as f64 - y as f64;
            sum += d * d;
            n += 1;
        }
    }
    Ok(sum / n as f64)
}

/// Peak signal-to-noise ratio in dB for unit dynamic range; infinite for
/// identical images.
pub fn psnr(a: &ImageTensor, b: &ImageTensor) -> Result<f64> {
    let e = mse(a, b)?;
    if e == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (RANGE * RANGE / e).log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_image(rng: &mut ChaCha8Rng, c: usize, w: usize, h: usize) -> ImageTensor {
        let data = (0..c * w * h).map(|_| rng.random::<f32>()).collect();
        ImageTensor::from_vec(c, w, h, data).unwrap()
    }

    fn perturbed(img: &ImageTensor, rng: &mut ChaCha8Rng, amp: f32) -> ImageTensor {
        let mut out = img.clone();
        for c in 0..img.channels() {
            for v in out.plane_mut(c) {
                *v = (*v + amp * (rng.random::<f32>() - 0.5)).clamp(0.0, 1.0);
            }
        }
        out
    }

    #[test]
    fn window_is_normalized_and_symmetric() {
        let w = gaussian_window();
        let sum: f64 = w.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        for i in 0..WINDOW {
            assert_eq!(w[i], w[WINDOW - 1 - i]);
        }
        // tap ratio follows the Gaussian profile
        let expect = (-25.0 / (2.0 * SIGMA * SIGMA)).exp();
        assert!((w[0] / w[5] - expect).abs() < 1e-12);
    }

    #[test]
    fn identical_images_score_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let img = random_image(&mut rng, 3, 32, 24);
        let s = ssim(&img, &img).unwrap();
        assert!((s - 1.0).abs() < 1e-9, "got {s}");
    }

    #[test]
    fn ssim_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let a = random_image(&mut rng, 3, 20, 20);
        let b = random_image(&mut rng, 3, 20, 20);
        let ab = ssim(&a, &b).unwrap();
        let ba = ssim(&b, &a).unwrap();
        assert!((ab - ba).abs() < 1e-12);
    }

    #[test]
    fn windowed_path_matches_direct_evaluation() {
        // independent oracle: explicit window sums at every valid position
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let a = random_image(&mut rng, 1, 16, 16);
        let b = perturbed(&a, &mut rng, 0.3);
        let pa: Vec<f64> = a.plane(0).iter().map(|&v| v as f64).collect();
        let pb: Vec<f64> = b.plane(0).iter().map(|&v| v as f64).collect();
        let win = gaussian_window();
        let (w, h) = (16usize, 16usize);
        let mut total = 0.0;
        let mut count = 0;
        for oy in 0..h - 10 {
            for ox in 0..w - 10 {
                let (mut mx, mut my) = (0.0, 0.0);
                for dy in 0..11 {
                    for dx in 0..11 {
                        let g = win[dy] * win[dx];
                        mx += g * pa[(oy + dy) * w + ox + dx];
                        my += g * pb[(oy + dy) * w + ox + dx];
                    }
                }
                let (mut vx, mut vy, mut cxy) = (0.0, 0.0, 0.0);
                for dy in 0..11 {
                    for dx in 0..11 {
                        let g = win[dy] * win[dx];
                        let x = pa[(oy + dy) * w + ox + dx];
                        let y = pb[(oy + dy) * w + ox + dx];
                        vx += g * (x - mx) * (x - mx);
                        vy += g * (y - my) * (y - my);
                        cxy += g * (x - mx) * (y - my);
                    }
                }
                total += ssim_value(mx, my, vx, vy, cxy);
                count += 1;
            }
        }
        let oracle = total / count as f64;
        let got = ssim(&a, &b).unwrap();
        assert!((got - oracle).abs() < 1e-9, "got {got}, oracle {oracle}");
    }

    #[test]
    fn small_images_use_a_single_global_window() {
        // independent oracle: direct arithmetic on an 8x8 pair
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let a = random_image(&mut rng, 1, 8, 8);
        let b = perturbed(&a, &mut rng, 0.4);
        let pa: Vec<f64> = a.plane(0).iter().map(|&v| v as f64).collect();
        let pb: Vec<f64> = b.plane(0).iter().map(|&v| v as f64).collect();
        let n = 64.0;
        let mx = pa.iter().sum::<f64>() / n;
        let my = pb.iter().sum::<f64>() / n;
        let vx = pa.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>() / n;
        let vy = pb.iter().map(|y| (y - my) * (y - my)).sum::<f64>() / n;
        let cxy = pa
            .iter()
            .zip(&pb)
            .map(|(x, y)| (x - mx) * (y - my))
            .sum::<f64>()
            / n;
        let c1 = 1e-4;
        let c2 = 9e-4;
        let oracle =
            ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
        let got = ssim(&a, &b).unwrap();
        assert!((got - oracle).abs() < 1e-6, "got {got}, oracle {oracle}");
    }

    #[test]
    fn inverted_binary_image_scores_low() {
        let mut data = vec![0.0f32; 32 * 32];
        for y in 0..32 {
            for x in 0..32 {
                if (x / 4 + y / 4) % 2 == 0 {
                    data[y * 32 + x] = 1.0;
                }
            }
        }
        let a = ImageTensor::from_vec(1, 32, 32, data.clone()).unwrap();
        let inverted: Vec<f32> = data.iter().map(|v| 1.0 - v).collect();
        let b = ImageTensor::from_vec(1, 32, 32, inverted).unwrap();
        let s = ssim(&a, &b).unwrap();
        assert!(s < 0.2, "anti-correlated structure, got {s}");
    }

    #[test]
    fn heavier_noise_scores_lower() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let img = random_image(&mut rng, 3, 48, 48);
        let light = perturbed(&img, &mut rng, 0.05);
        let heavy = perturbed(&img, &mut rng, 0.5);
        let sl = ssim(&img, &light).unwrap();
        let sh = ssim(&img, &heavy).unwrap();
        assert!(sl > sh, "light {sl} vs heavy {sh}");
        assert!((-1.0..=1.0).contains(&sl) && (-1.0..=1.0).contains(&sh));
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let a = ImageTensor::zeros(1, 8, 8);
        let b = ImageTensor::zeros(1, 8, 9);
        assert!(ssim(&a, &b).is_err());
        assert!(mse(&a, &b).is_err());
    }

    #[test]
    fn psnr_tracks_error_energy() {
        let a = ImageTensor::zeros(1, 8, 8);
        assert!(psnr(&a, &a).unwrap().is_infinite());
        let mut b = a.clone();
        b.plane_mut(0).iter_mut().for_each(|v| *v = 0.01);
        // mse = 1e-4, psnr = 40 dB
        let p = psnr(&a, &b).unwrap();
        assert!((p - 40.0).abs() < 1e-6, "got {p}");
    }
}

//! Deterministic procedural test images.
//!
//! The mini-corpus is twenty content/style pairs of 256x256 RGB images
//! assembled from seeded value noise, geometric overlays, and random
//! palettes.  Every image is a pure function of its seed, so test runs and
//! benchmark numbers are reproducible without binary assets in the tree.

use crate::error::Result;
use crate::image::ImageTensor;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};

pub const CORPUS_PAIRS: usize = 20;
pub const CORPUS_SIZE: usize = 256;

fn smoothstep(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

/// Lattice value noise: a `cells` x `cells` grid of random values sampled
/// with smoothstep bilinear interpolation, tiling at the image edge.
fn value_noise(rng: &mut ChaCha8Rng, w: usize, h: usize, cells: usize) -> Vec<f64> {
    let grid: Vec<f64> = (0..cells * cells).map(|_| rng.random::<f64>()).collect();
    let at = |gx: usize, gy: usize| grid[(gy % cells) * cells + (gx % cells)];
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        let fy = y as f64 / h as f64 * cells as f64;
        let gy = fy.floor() as usize;
        let ty = smoothstep(fy - gy as f64);
        for x in 0..w {
            let fx = x as f64 / w as f64 * cells as f64;
            let gx = fx.floor() as usize;
            let tx = smoothstep(fx - gx as f64);
            let top = at(gx, gy) * (1.0 - tx) + at(gx + 1, gy) * tx;
            let bot = at(gx, gy + 1) * (1.0 - tx) + at(gx + 1, gy + 1) * tx;
            out[y * w + x] = top * (1.0 - ty) + bot * ty;
        }
    }
    out
}

/// Octave sum of value noise, normalized to [0, 1].
fn fractal(rng: &mut ChaCha8Rng, w: usize, h: usize, octaves: usize, persistence: f64) -> Vec<f64> {
    let mut out = vec![0.0; w * h];
    let mut amp = 1.0;
    let mut total = 0.0;
    for o in 0..octaves {
        let layer = value_noise(rng, w, h, 2 << o);
        for (dst, src) in out.iter_mut().zip(&layer) {
            *dst += amp * src;
        }
        total += amp;
        amp *= persistence;
    }
    for v in &mut out {
        *v /= total;
    }
    out
}

fn add_disk(field: &mut [f64], w: usize, h: usize, cx: f64, cy: f64, r: f64, gain: f64) {
    for y in 0..h {
        for x in 0..w {
            let d = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
            let t = ((r - d) / (0.25 * r)).clamp(0.0, 1.0);
            field[y * w + x] += gain * smoothstep(t);
        }
    }
}

fn add_bands(field: &mut [f64], w: usize, h: usize, angle: f64, freq: f64, gain: f64) {
    let (s, c) = angle.sin_cos();
    for y in 0..h {
        for x in 0..w {
            let u = c * x as f64 + s * y as f64;
            field[y * w + x] += gain * (freq * u).sin();
        }
    }
}

fn add_rings(field: &mut [f64], w: usize, h: usize, cx: f64, cy: f64, freq: f64, gain: f64) {
    for y in 0..h {
        for x in 0..w {
            let d = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
            field[y * w + x] += gain * (freq * d).sin();
        }
    }
}

fn quantize_blocks(field: &mut [f64], steps: f64) {
    for v in field.iter_mut() {
        *v = (*v * steps).floor() / steps;
    }
}

fn normalize(field: &mut [f64]) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in field.iter() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let span = (hi - lo).max(1e-12);
    for v in field.iter_mut() {
        *v = (*v - lo) / span;
    }
}

/// Maps a scalar field through a random three-anchor palette.
fn colorize(rng: &mut ChaCha8Rng, field: &[f64], w: usize, h: usize) -> ImageTensor {
    let anchor = |rng: &mut ChaCha8Rng| -> [f64; 3] { [rng.random(), rng.random(), rng.random()] };
    let (a, b, c) = (anchor(rng), anchor(rng), anchor(rng));
    let mut img = ImageTensor::zeros(3, w, h);
    for ch in 0..3 {
        let plane = img.plane_mut(ch);
        for (dst, &t) in plane.iter_mut().zip(field) {
            let v = if t < 0.5 {
                let u = t * 2.0;
                a[ch] * (1.0 - u) + b[ch] * u
            } else {
                let u = t * 2.0 - 1.0;
                b[ch] * (1.0 - u) + c[ch] * u
            };
            *dst = v as f32;
        }
    }
    // Independent chroma grain per channel keeps every subband's channel
    // covariance full rank, the way sensor noise does in a real photograph.
    // Without it the palette mapping above would pin all three channels to a
    // curve and leave the statistics singular.
    for ch in 0..3 {
        let plane = img.plane_mut(ch);
        for dst in plane.iter_mut() {
            let noisy = *dst as f64 + 0.04 * (rng.random::<f64>() - 0.5);
            *dst = noisy.clamp(0.0, 1.0) as f32;
        }
    }
    img
}

/// Blends in pixel-scale noise so every local window carries variance of
/// its own rather than riding the stabilized luminance term.
fn add_grain(rng: &mut ChaCha8Rng, field: &mut [f64], w: usize, h: usize, gain: f64) {
    let grain = value_noise(rng, w, h, w.min(h));
    for (dst, src) in field.iter_mut().zip(&grain) {
        *dst = (1.0 - gain) * *dst + gain * src;
    }
}

fn content_field(rng: &mut ChaCha8Rng, w: usize, h: usize, archetype: usize) -> Vec<f64> {
    let mut f = fractal(rng, w, h, 5, 0.55);
    match archetype {
        0 => {}
        1 => {
            let cx = rng.random::<f64>() * w as f64;
            let cy = rng.random::<f64>() * h as f64;
            let r = (0.15 + 0.2 * rng.random::<f64>()) * w as f64;
            add_disk(&mut f, w, h, cx, cy, r, 0.8);
        }
        2 => {
            let angle = rng.random::<f64>() * std::f64::consts::PI;
            add_bands(&mut f, w, h, angle, 0.06 + 0.04 * rng.random::<f64>(), 0.3);
        }
        _ => {
            let mut blocks = fractal(rng, w, h, 3, 0.6);
            quantize_blocks(&mut blocks, 5.0);
            for (dst, src) in f.iter_mut().zip(&blocks) {
                *dst = 0.55 * *dst + 0.45 * src;
            }
        }
    }
    add_grain(rng, &mut f, w, h, 0.18);
    normalize(&mut f);
    f
}

fn style_field(rng: &mut ChaCha8Rng, w: usize, h: usize, archetype: usize) -> Vec<f64> {
    let mut f = match archetype {
        0 => {
            let mut f = fractal(rng, w, h, 5, 0.55);
            for v in &mut f {
                *v = (*v - 0.5) * 2.2 + 0.5;
            }
            f
        }
        1 => {
            let mut f = fractal(rng, w, h, 4, 0.5);
            let angle = rng.random::<f64>() * std::f64::consts::PI;
            add_bands(&mut f, w, h, angle, 0.12 + 0.08 * rng.random::<f64>(), 0.6);
            f
        }
        2 => {
            let mut f = fractal(rng, w, h, 3, 0.5);
            let cx = rng.random::<f64>() * w as f64;
            let cy = rng.random::<f64>() * h as f64;
            add_rings(&mut f, w, h, cx, cy, 0.08 + 0.05 * rng.random::<f64>(), 0.5);
            f
        }
        3 => fractal(rng, w, h, 2, 0.8),
        _ => {
            let mut f = fractal(rng, w, h, 6, 0.85);
            for v in &mut f {
                *v = (*v - 0.5) * 1.6 + 0.5;
            }
            f
        }
    };
    // oscillatory washes spanning wavelengths of 8 to 64 pixels keep the
    // style's detail statistics far from any content image at every scale
    for lambda in [8.0, 16.0, 32.0, 64.0] {
        let angle = rng.random::<f64>() * std::f64::consts::PI;
        let freq = 2.0 * std::f64::consts::PI / lambda;
        add_bands(&mut f, w, h, angle, freq, 0.25 + 0.15 * rng.random::<f64>());
    }
    add_grain(rng, &mut f, w, h, 0.2);
    normalize(&mut f);
    f
}

/// The i-th content image of the mini-corpus.
pub fn corpus_content(i: usize) -> ImageTensor {
    assert!(i < CORPUS_PAIRS);
    let mut rng = ChaCha8Rng::seed_from_u64(0x1000 + i as u64);
    let field = content_field(&mut rng, CORPUS_SIZE, CORPUS_SIZE, i % 4);
    colorize(&mut rng, &field, CORPUS_SIZE, CORPUS_SIZE)
}

/// The i-th style image of the mini-corpus.
pub fn corpus_style(i: usize) -> ImageTensor {
    assert!(i < CORPUS_PAIRS);
    let mut rng = ChaCha8Rng::seed_from_u64(0x2000 + i as u64);
    let field = style_field(&mut rng, CORPUS_SIZE, CORPUS_SIZE, i % 5);
    colorize(&mut rng, &field, CORPUS_SIZE, CORPUS_SIZE)
}

/// A general-purpose seeded test image at an arbitrary size.
pub fn synthetic_image(seed: u64, w: usize, h: usize) -> ImageTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = content_field(&mut rng, w, h, (seed % 4) as usize);
    colorize(&mut rng, &field, w, h)
}

/// Writes the corpus as PNG pairs into `dir` and returns the paths.
pub fn write_corpus(dir: impl AsRef<Path>) -> Result<Vec<(PathBuf, PathBuf)>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| crate::error::GistError::io(dir, e))?;
    let mut pairs = Vec::with_capacity(CORPUS_PAIRS);
    for i in 0..CORPUS_PAIRS {
        let cp = dir.join(format!("content_{i:02}.png"));
        let sp = dir.join(format!("style_{i:02}.png"));
        crate::io::save_image(&cp, &corpus_content(i))?;
        crate::io::save_image(&sp, &corpus_style(i))?;
        pairs.push((cp, sp));
    }
    Ok(pairs)
}

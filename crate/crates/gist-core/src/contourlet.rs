//! Contourlet transform: Laplacian pyramid + directional filter bank.
//!
//! Each scale peels off a bandpass residual with a Laplacian pyramid step
//! (9-tap symmetric lowpass, unit DC gain, circular boundary), then slices
//! the residual into `K` directional subbands with a binary tree of
//! two-channel ladder filter banks built on quincunx cosets.  Every stage is
//! a lifting structure, so synthesis inverts analysis exactly by
//! construction, and the subbands stay critically sampled: the coefficient
//! count always equals the pixel count.
//!
//! With `K = 4` the four bands settle on the four canonical orientations:
//! the first tree stage separates axis-aligned content (the diamond-shaped
//! low region of the quincunx lattice) from diagonal content (the corner
//! region), the second stage splits each in two.  Deeper trees keep perfect
//! reconstruction but refine directions only coarsely.
//!
//! A mask can ride along the decomposition: every subband sample traces back
//! to a unique source pixel through the tree's permutations, and
//! [`ContourletTransform::detail_masks`] resamples a label map through that
//! trace.

use crate::error::{GistError, Result};
use crate::image::RegionMask;
use crate::tensor::Tensor;
use crate::transform::MultiscaleTransform;

/// 9-tap symmetric pyramid lowpass, DC gain 1, zero at Nyquist so both
/// polyphases sum to 1/2.
const LP_TAPS: [f64; 9] = [
    0.026748757411,
    -0.016864118443,
    -0.078223266529,
    0.266864118443,
    0.602949018236,
    0.266864118443,
    -0.078223266529,
    -0.016864118443,
    0.026748757411,
];

/// Half-sample symmetric ladder kernel; `w[k]` weights offset `k - T` with
/// `w[k] = w[2T-1-k]`, mirroring the 12-tap interpolator commonly used in
/// ladder-based directional filter banks.
const LADDER_HALF: [f64; 6] = [0.6300, -0.1930, 0.0972, -0.0526, 0.0272, -0.0144];

fn ladder_kernel() -> Vec<f64> {
    let t = LADDER_HALF.len();
    let mut w = vec![0.0; 2 * t];
    for k in 0..t {
        w[t + k] = LADDER_HALF[k];
        w[t - 1 - k] = LADDER_HALF[k];
    }
    w
}

/// One image plane in double precision.
#[derive(Debug, Clone)]
struct Plane {
    w: usize,
    h: usize,
    v: Vec<f64>,
}

impl Plane {
    fn zeros(w: usize, h: usize) -> Self {
        Plane {
            w,
            h,
            v: vec![0.0; w * h],
        }
    }
    #[inline]
    fn at(&self, y: usize, x: usize) -> f64 {
        self.v[y * self.w + x]
    }
    #[inline]
    fn set(&mut self, y: usize, x: usize, val: f64) {
        self.v[y * self.w + x] = val;
    }
}

fn tensor_planes(t: &Tensor) -> Vec<Plane> {
    (0..t.channels)
        .map(|c| Plane {
            w: t.width,
            h: t.height,
            v: t.plane(c).to_vec(),
        })
        .collect()
}

fn planes_tensor(planes: &[Plane]) -> Tensor {
    let (w, h) = (planes[0].w, planes[0].h);
    let mut t = Tensor::zeros(planes.len(), w, h);
    for (c, p) in planes.iter().enumerate() {
        t.plane_mut(c).copy_from_slice(&p.v);
    }
    t
}

// ---------------------------------------------------------------------------
// Laplacian pyramid
// ---------------------------------------------------------------------------

/// Separable circular convolution with `taps` (odd length, centered).
fn sep_filter(p: &Plane, taps: &[f64]) -> Plane {
    let half = taps.len() / 2;
    let (w, h) = (p.w, p.h);
    let mut tmp = Plane::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &t) in taps.iter().enumerate() {
                let xx = (x + w + k - half) % w;
                acc += t * p.at(y, xx);
            }
            tmp.set(y, x, acc);
        }
    }
    let mut out = Plane::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &t) in taps.iter().enumerate() {
                let yy = (y + h + k - half) % h;
                acc += t * tmp.at(yy, x);
            }
            out.set(y, x, acc);
        }
    }
    out
}

/// Lowpass, decimate by 2 in both axes.
fn lp_reduce(p: &Plane) -> Plane {
    let low = sep_filter(p, &LP_TAPS);
    let mut out = Plane::zeros(p.w / 2, p.h / 2);
    for y in 0..out.h {
        for x in 0..out.w {
            out.set(y, x, low.at(2 * y, 2 * x));
        }
    }
    out
}

/// Zero-stuff by 2 and interpolate with the doubled lowpass.
fn lp_expand(p: &Plane) -> Plane {
    let mut up = Plane::zeros(p.w * 2, p.h * 2);
    for y in 0..p.h {
        for x in 0..p.w {
            up.set(2 * y, 2 * x, p.at(y, x));
        }
    }
    let doubled: Vec<f64> = LP_TAPS.iter().map(|t| 2.0 * t).collect();
    sep_filter(&up, &doubled)
}

// ---------------------------------------------------------------------------
// Directional filter bank: ladder stages on quincunx cosets
// ---------------------------------------------------------------------------

/// Predicts samples of parity `target` (of `i+j`) from the opposite coset
/// with the rotated-separable kernel: offsets `(1+p+q, p-q)` weighted
/// `w[p] w[q]`.  Returns a full plane holding predictions at target-parity
/// sites (other sites zero).
fn predict_coset(p: &Plane, kernel: &[f64], target: usize) -> Plane {
    let t = kernel.len() / 2;
    let (w, h) = (p.w, p.h);
    // pass 1 along the (1,-1) diagonal at source-parity sites
    let mut g = Plane::zeros(w, h);
    let src = 1 - target;
    for y in 0..h {
        for x in 0..w {
            if (y + x) % 2 != src {
                continue;
            }
            let mut acc = 0.0;
            for (k, &wk) in kernel.iter().enumerate() {
                let q = k as isize - t as isize;
                let yy = (y as isize + q).rem_euclid(h as isize) as usize;
                let xx = (x as isize - q).rem_euclid(w as isize) as usize;
                acc += wk * p.at(yy, xx);
            }
            g.set(y, x, acc);
        }
    }
    // pass 2 along the (1,1) diagonal at target-parity sites
    let mut out = Plane::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            if (y + x) % 2 != target {
                continue;
            }
            let mut acc = 0.0;
            for (k, &wk) in kernel.iter().enumerate() {
                let pp = k as isize - t as isize;
                let yy = (y as isize + 1 + pp).rem_euclid(h as isize) as usize;
                let xx = (x as isize + pp).rem_euclid(w as isize) as usize;
                acc += wk * g.at(yy, xx);
            }
            out.set(y, x, acc);
        }
    }
    out
}

/// Quincunx ladder analysis over the full lattice.  Output plane holds
/// `y0` at even sites (corner-ish residual) and `y1` at odd sites
/// (interior content, scaled).
fn quincunx_split(p: &Plane, kernel: &[f64]) -> Plane {
    let s2 = 2f64.sqrt();
    let (w, h) = (p.w, p.h);
    let mut out = p.clone();
    let pred_even = predict_coset(p, kernel, 0);
    for y in 0..h {
        for x in 0..w {
            if (y + x) % 2 == 0 {
                out.set(y, x, (p.at(y, x) - pred_even.at(y, x)) / s2);
            }
        }
    }
    let pred_odd = predict_coset(&out, kernel, 1);
    for y in 0..h {
        for x in 0..w {
            if (y + x) % 2 == 1 {
                out.set(y, x, -s2 * p.at(y, x) - pred_odd.at(y, x));
            }
        }
    }
    out
}

fn quincunx_merge(mix: &Plane, kernel: &[f64]) -> Plane {
    let s2 = 2f64.sqrt();
    let (w, h) = (mix.w, mix.h);
    let mut out = mix.clone();
    let pred_odd = predict_coset(mix, kernel, 1);
    for y in 0..h {
        for x in 0..w {
            if (y + x) % 2 == 1 {
                out.set(y, x, -(mix.at(y, x) + pred_odd.at(y, x)) / s2);
            }
        }
    }
    let pred_even = predict_coset(&out, kernel, 0);
    for y in 0..h {
        for x in 0..w {
            if (y + x) % 2 == 0 {
                out.set(y, x, s2 * mix.at(y, x) + pred_even.at(y, x));
            }
        }
    }
    out
}

/// Compacts the even coset, row `i` reading columns `i + 2u`: `r[i,u] =
/// p[i, (i+2u) mod w]`.
fn rect_even(p: &Plane) -> Plane {
    let mut out = Plane::zeros(p.w / 2, p.h);
    for y in 0..p.h {
        for u in 0..p.w / 2 {
            out.set(y, u, p.at(y, (y + 2 * u) % p.w));
        }
    }
    out
}

fn rect_even_inv(r: &Plane, into: &mut Plane) {
    for y in 0..r.h {
        for u in 0..r.w {
            into.set(y, (y + 2 * u) % into.w, r.at(y, u));
        }
    }
}

/// Compacts the odd coset column-wise: `r[u,j] = p[(j+2u+1) mod h, j]`.
fn rect_odd(p: &Plane) -> Plane {
    let mut out = Plane::zeros(p.w, p.h / 2);
    for u in 0..p.h / 2 {
        for x in 0..p.w {
            out.set(u, x, p.at((x + 2 * u + 1) % p.h, x));
        }
    }
    out
}

fn rect_odd_inv(r: &Plane, into: &mut Plane) {
    for u in 0..r.h {
        for x in 0..r.w {
            into.set((x + 2 * u + 1) % into.h, x, r.at(u, x));
        }
    }
}

/// 1-D ladder split across row parity; the kernel interpolates at half
/// offsets along the row axis.  Children are the even-row and odd-row
/// halves.
fn row_split(p: &Plane, kernel: &[f64]) -> (Plane, Plane) {
    let s2 = 2f64.sqrt();
    let t = kernel.len() / 2;
    let hh = p.h / 2;
    let mut y0 = Plane::zeros(p.w, hh);
    let mut y1 = Plane::zeros(p.w, hh);
    for a in 0..hh {
        for x in 0..p.w {
            let mut acc = 0.0;
            for (k, &wk) in kernel.iter().enumerate() {
                let pp = k as isize - t as isize;
                let row = (a as isize + pp).rem_euclid(hh as isize) as usize;
                acc += wk * p.at(2 * row + 1, x);
            }
            y0.set(a, x, (p.at(2 * a, x) - acc) / s2);
        }
    }
    for a in 0..hh {
        for x in 0..p.w {
            let mut acc = 0.0;
            for (k, &wk) in kernel.iter().enumerate() {
                let pp = k as isize - t as isize;
                let row = (a as isize + 1 + pp).rem_euclid(hh as isize) as usize;
                acc += wk * y0.at(row, x);
            }
            y1.set(a, x, -s2 * p.at(2 * a + 1, x) - acc);
        }
    }
    (y0, y1)
}

fn row_merge(y0: &Plane, y1: &Plane, kernel: &[f64]) -> Plane {
    let s2 = 2f64.sqrt();
    let t = kernel.len() / 2;
    let hh = y0.h;
    let mut out = Plane::zeros(y0.w, hh * 2);
    for a in 0..hh {
        for x in 0..y0.w {
            let mut acc = 0.0;
            for (k, &wk) in kernel.iter().enumerate() {
                let pp = k as isize - t as isize;
                let row = (a as isize + 1 + pp).rem_euclid(hh as isize) as usize;
                acc += wk * y0.at(row, x);
            }
            out.set(2 * a + 1, x, -(y1.at(a, x) + acc) / s2);
        }
    }
    for a in 0..hh {
        for x in 0..y0.w {
            let mut acc = 0.0;
            for (k, &wk) in kernel.iter().enumerate() {
                let pp = k as isize - t as isize;
                let row = (a as isize + pp).rem_euclid(hh as isize) as usize;
                acc += wk * out.at(2 * row + 1, x);
            }
            out.set(2 * a, x, s2 * y0.at(a, x) + acc);
        }
    }
    out
}

/// Checkerboard modulation `(-1)^(i+u)` used around the corner-channel
/// second stage; self-inverse.
fn modulate_checker(p: &mut Plane) {
    for y in 0..p.h {
        for x in 0..p.w {
            if (y + x) % 2 == 1 {
                let v = p.at(y, x);
                p.set(y, x, -v);
            }
        }
    }
}

/// Second-stage predictor on the compacted corner array: source rows of the
/// opposite parity, skewed columns `u - p + q`, separable weights.
fn predict_skew(p: &Plane, kernel: &[f64], target_row_parity: usize) -> Plane {
    let t = kernel.len() / 2;
    let (w, h) = (p.w, p.h);
    // pass 1 along columns at source-parity rows
    let mut g = Plane::zeros(w, h);
    for y in (1 - target_row_parity..h).step_by(2) {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &wk) in kernel.iter().enumerate() {
                let q = k as isize - t as isize;
                let xx = (x as isize + q).rem_euclid(w as isize) as usize;
                acc += wk * p.at(y, xx);
            }
            g.set(y, x, acc);
        }
    }
    // pass 2 across rows with the skew
    let mut out = Plane::zeros(w, h);
    for y in (target_row_parity..h).step_by(2) {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &wk) in kernel.iter().enumerate() {
                let pp = k as isize - t as isize;
                let yy = (y as isize + 1 + 2 * pp).rem_euclid(h as isize) as usize;
                let xx = (x as isize - pp).rem_euclid(w as isize) as usize;
                acc += wk * g.at(yy, xx);
            }
            out.set(y, x, acc);
        }
    }
    out
}

/// Corner-channel second stage: modulate, ladder across row parity with the
/// skewed predictor, demodulate, split rows.  Separates the two diagonal
/// orientations.
fn corner_split(r: &Plane, kernel: &[f64]) -> (Plane, Plane) {
    let s2 = 2f64.sqrt();
    let mut m = r.clone();
    modulate_checker(&mut m);
    let mut mix = m.clone();
    let pred0 = predict_skew(&m, kernel, 0);
    for y in (0..r.h).step_by(2) {
        for x in 0..r.w {
            mix.set(y, x, (m.at(y, x) - pred0.at(y, x)) / s2);
        }
    }
    let pred1 = predict_skew(&mix, kernel, 1);
    for y in (1..r.h).step_by(2) {
        for x in 0..r.w {
            mix.set(y, x, -s2 * m.at(y, x) - pred1.at(y, x));
        }
    }
    let mut c0 = Plane::zeros(r.w, r.h / 2);
    let mut c1 = Plane::zeros(r.w, r.h / 2);
    for a in 0..r.h / 2 {
        for x in 0..r.w {
            c0.set(a, x, mix.at(2 * a, x));
            c1.set(a, x, mix.at(2 * a + 1, x));
        }
    }
    (c0, c1)
}

fn corner_merge(c0: &Plane, c1: &Plane, kernel: &[f64]) -> Plane {
    let s2 = 2f64.sqrt();
    let (w, h) = (c0.w, c0.h * 2);
    let mut mix = Plane::zeros(w, h);
    for a in 0..c0.h {
        for x in 0..w {
            mix.set(2 * a, x, c0.at(a, x));
            mix.set(2 * a + 1, x, c1.at(a, x));
        }
    }
    let mut m = mix.clone();
    let pred1 = predict_skew(&mix, kernel, 1);
    for y in (1..h).step_by(2) {
        for x in 0..w {
            m.set(y, x, -(mix.at(y, x) + pred1.at(y, x)) / s2);
        }
    }
    let pred0 = predict_skew(&m, kernel, 0);
    for y in (0..h).step_by(2) {
        for x in 0..w {
            m.set(y, x, s2 * mix.at(y, x) + pred0.at(y, x));
        }
    }
    modulate_checker(&mut m);
    m
}

/// Column split by parity via transpose-free indexing: same ladder as
/// [`row_split`] along the column axis.
fn col_split(p: &Plane, kernel: &[f64]) -> (Plane, Plane) {
    let s2 = 2f64.sqrt();
    let t = kernel.len() / 2;
    let wh = p.w / 2;
    let mut y0 = Plane::zeros(wh, p.h);
    let mut y1 = Plane::zeros(wh, p.h);
    for y in 0..p.h {
        for a in 0..wh {
            let mut acc = 0.0;
            for (k, &wk) in kernel.iter().enumerate() {
                let pp = k as isize - t as isize;
                let col = (a as isize + pp).rem_euclid(wh as isize) as usize;
                acc += wk * p.at(y, 2 * col + 1);
            }
            y0.set(y, a, (p.at(y, 2 * a) - acc) / s2);
        }
    }
    for y in 0..p.h {
        for a in 0..wh {
            let mut acc = 0.0;
            for (k, &wk) in kernel.iter().enumerate() {
                let pp = k as isize - t as isize;
                let col = (a as isize + 1 + pp).rem_euclid(wh as isize) as usize;
                acc += wk * y0.at(y, col);
            }
            y1.set(y, a, -s2 * p.at(y, 2 * a + 1) - acc);
        }
    }
    (y0, y1)
}

fn col_merge(y0: &Plane, y1: &Plane, kernel: &[f64]) -> Plane {
    let s2 = 2f64.sqrt();
    let t = kernel.len() / 2;
    let wh = y0.w;
    let mut out = Plane::zeros(wh * 2, y0.h);
    for y in 0..y0.h {
        for a in 0..wh {
            let mut acc = 0.0;
            for (k, &wk) in kernel.iter().enumerate() {
                let pp = k as isize - t as isize;
                let col = (a as isize + 1 + pp).rem_euclid(wh as isize) as usize;
                acc += wk * y0.at(y, col);
            }
            out.set(y, 2 * a + 1, -(y1.at(y, a) + acc) / s2);
        }
    }
    for y in 0..y0.h {
        for a in 0..wh {
            let mut acc = 0.0;
            for (k, &wk) in kernel.iter().enumerate() {
                let pp = k as isize - t as isize;
                let col = (a as isize + pp).rem_euclid(wh as isize) as usize;
                acc += wk * out.at(y, 2 * col + 1);
            }
            out.set(y, 2 * a, s2 * y0.at(y, a) + acc);
        }
    }
    out
}

/// Directional decomposition of one plane into `2^depth` subbands.
fn dfb_analyze_plane(p: &Plane, depth: usize, kernel: &[f64]) -> Vec<Plane> {
    if depth == 0 {
        return vec![p.clone()];
    }
    let mix = quincunx_split(p, kernel);
    let corner = rect_even(&mix); // y0 on even sites: diagonal content
    let interior = rect_odd(&mix); // y1 on odd sites: axis-aligned content
    if depth == 1 {
        return vec![interior, corner];
    }
    // band 0 favors horizontal stripes, band 1 vertical, bands 2 and 3 the
    // two diagonals (measured on oriented test patterns)
    let (i_horiz, i_vert) = row_split(&interior, kernel);
    let (c_diff, c_sum) = corner_split(&corner, kernel);
    let mut bands = vec![i_horiz, i_vert, c_diff, c_sum];
    // deeper levels refine by alternating separable parity splits; these keep
    // perfect reconstruction and critical sampling but only coarse direction
    for extra in 0..depth.saturating_sub(2) {
        let mut next = Vec::with_capacity(bands.len() * 2);
        for band in &bands {
            let (a, b) = if extra % 2 == 0 {
                col_split(band, kernel)
            } else {
                row_split(band, kernel)
            };
            next.push(a);
            next.push(b);
        }
        bands = next;
    }
    bands
}

fn dfb_synthesize_plane(bands: &[Plane], depth: usize, kernel: &[f64]) -> Plane {
    if depth == 0 {
        return bands[0].clone();
    }
    let mut bands: Vec<Plane> = bands.to_vec();
    for extra in (0..depth.saturating_sub(2)).rev() {
        let mut prev = Vec::with_capacity(bands.len() / 2);
        for pair in bands.chunks(2) {
            let merged = if extra % 2 == 0 {
                col_merge(&pair[0], &pair[1], kernel)
            } else {
                row_merge(&pair[0], &pair[1], kernel)
            };
            prev.push(merged);
        }
        bands = prev;
    }
    let (interior, corner) = if depth == 1 {
        (bands[0].clone(), bands[1].clone())
    } else {
        (
            row_merge(&bands[0], &bands[1], kernel),
            corner_merge(&bands[2], &bands[3], kernel),
        )
    };
    // reassemble the full-lattice mixture: corner back to even sites,
    // interior back to odd sites
    let (w, h) = (corner.w * 2, corner.h);
    debug_assert_eq!(interior.w, w);
    debug_assert_eq!(interior.h, h / 2);
    let mut mix = Plane::zeros(w, h);
    rect_even_inv(&corner, &mut mix);
    rect_odd_inv(&interior, &mut mix);
    quincunx_merge(&mix, kernel)
}

/// Subband dims plus the source (y, x) of every sample, row-major.
type SubbandTrace = (usize, usize, Vec<(usize, usize)>);

/// Source coordinate of every subband sample: the same tree as
/// [`dfb_analyze_plane`] run on coordinates (ladder steps do not move
/// samples, so only the permutations matter).
fn dfb_trace(w: usize, h: usize, depth: usize) -> Vec<SubbandTrace> {
    #[derive(Clone)]
    struct Grid {
        w: usize,
        h: usize,
        src: Vec<(usize, usize)>, // (y, x) per sample, row-major
    }
    let full = Grid {
        w,
        h,
        src: (0..w * h).map(|i| (i / w, i % w)).collect(),
    };
    if depth == 0 {
        return vec![(full.w, full.h, full.src)];
    }
    let rect_even_g = |g: &Grid| -> Grid {
        let mut src = Vec::with_capacity(g.w / 2 * g.h);
        for y in 0..g.h {
            for u in 0..g.w / 2 {
                src.push(g.src[y * g.w + (y + 2 * u) % g.w]);
            }
        }
        Grid {
            w: g.w / 2,
            h: g.h,
            src,
        }
    };
    let rect_odd_g = |g: &Grid| -> Grid {
        let mut src = Vec::with_capacity(g.w * g.h / 2);
        for u in 0..g.h / 2 {
            for x in 0..g.w {
                src.push(g.src[((x + 2 * u + 1) % g.h) * g.w + x]);
            }
        }
        Grid {
            w: g.w,
            h: g.h / 2,
            src,
        }
    };
    let row_split_g = |g: &Grid| -> (Grid, Grid) {
        let hh = g.h / 2;
        let mut a = Vec::with_capacity(g.w * hh);
        let mut b = Vec::with_capacity(g.w * hh);
        for r in 0..hh {
            for x in 0..g.w {
                a.push(g.src[(2 * r) * g.w + x]);
                b.push(g.src[(2 * r + 1) * g.w + x]);
            }
        }
        (
            Grid {
                w: g.w,
                h: hh,
                src: a,
            },
            Grid {
                w: g.w,
                h: hh,
                src: b,
            },
        )
    };
    let col_split_g = |g: &Grid| -> (Grid, Grid) {
        let wh = g.w / 2;
        let mut a = Vec::with_capacity(wh * g.h);
        let mut b = Vec::with_capacity(wh * g.h);
        for r in 0..g.h {
            for x in 0..wh {
                a.push(g.src[r * g.w + 2 * x]);
                b.push(g.src[r * g.w + 2 * x + 1]);
            }
        }
        (
            Grid {
                w: wh,
                h: g.h,
                src: a,
            },
            Grid {
                w: wh,
                h: g.h,
                src: b,
            },
        )
    };
    let corner = rect_even_g(&full);
    let interior = rect_odd_g(&full);
    let mut grids = if depth == 1 {
        vec![interior, corner]
    } else {
        let (i_low, i_high) = row_split_g(&interior);
        let (c_a, c_b) = row_split_g(&corner);
        vec![i_low, i_high, c_a, c_b]
    };
    if depth >= 2 {
        for extra in 0..depth - 2 {
            let mut next = Vec::with_capacity(grids.len() * 2);
            for g in &grids {
                let (a, b) = if extra % 2 == 0 {
                    col_split_g(g)
                } else {
                    row_split_g(g)
                };
                next.push(a);
                next.push(b);
            }
            grids = next;
        }
    }
    grids.into_iter().map(|g| (g.w, g.h, g.src)).collect()
}

// ---------------------------------------------------------------------------
// The multiscale transform
// ---------------------------------------------------------------------------

/// Contourlet configuration: `directions[l-1]` is the subband count at scale
/// `l`, each a power of two (1 keeps the bandpass whole).
#[derive(Debug, Clone)]
pub struct ContourletTransform {
    pub levels: usize,
    pub directions: Vec<usize>,
    kernel: Vec<f64>,
}

impl ContourletTransform {
    pub fn new(directions: Vec<usize>) -> Result<Self> {
        if directions.is_empty() {
            return Err(GistError::Argument("need at least one scale".into()));
        }
        for &k in &directions {
            if k == 0 || (k & (k - 1)) != 0 {
                return Err(GistError::Argument(format!(
                    "directional subband counts must be powers of two, got {k}"
                )));
            }
        }
        Ok(ContourletTransform {
            levels: directions.len(),
            directions,
            kernel: ladder_kernel(),
        })
    }

    fn depth(&self, level: usize) -> usize {
        self.directions[level - 1].trailing_zeros() as usize
    }
}

impl MultiscaleTransform for ContourletTransform {
    fn levels(&self) -> usize {
        self.levels
    }

    fn num_details(&self, level: usize) -> usize {
        self.directions[level - 1]
    }

    fn check_dims(&self, width: usize, height: usize) -> Result<()> {
        let (mut w, mut h) = (width, height);
        for level in 1..=self.levels {
            let need = (1usize << self.depth(level)).max(2);
            if w % need != 0 || h % need != 0 || w % 2 != 0 || h % 2 != 0 {
                return Err(GistError::Dimension(format!(
                    "scale {level} input {w}x{h} must be divisible by {need} for {} directions",
                    self.directions[level - 1]
                )));
            }
            w /= 2;
            h /= 2;
        }
        Ok(())
    }

    fn analyze_level(&self, approx: &Tensor, level: usize) -> Result<(Tensor, Vec<Tensor>)> {
        if level == 0 || level > self.levels {
            return Err(GistError::Argument(format!("level {level} out of range")));
        }
        if !approx.width.is_multiple_of(2) || !approx.height.is_multiple_of(2) {
            return Err(GistError::Dimension(format!(
                "scale {level} input {}x{} must have even dims",
                approx.width, approx.height
            )));
        }
        let depth = self.depth(level);
        let planes = tensor_planes(approx);
        let mut coarse_planes = Vec::with_capacity(planes.len());
        let mut band_planes: Vec<Vec<Plane>> = vec![Vec::new(); 1 << depth];
        for p in &planes {
            let coarse = lp_reduce(p);
            let pred = lp_expand(&coarse);
            let mut band = p.clone();
            for i in 0..band.v.len() {
                band.v[i] -= pred.v[i];
            }
            coarse_planes.push(coarse);
            for (b, sub) in dfb_analyze_plane(&band, depth, &self.kernel)
                .into_iter()
                .enumerate()
            {
                band_planes[b].push(sub);
            }
        }
        let coarse = planes_tensor(&coarse_planes);
        let details = band_planes.iter().map(|b| planes_tensor(b)).collect();
        Ok((coarse, details))
    }

    fn synthesize_level(
        &self,
        approx: &Tensor,
        details: &[Tensor],
        level: usize,
    ) -> Result<Tensor> {
        let depth = self.depth(level);
        if details.len() != (1 << depth) {
            return Err(GistError::Dimension(format!(
                "scale {level} wants {} directional subbands, got {}",
                1 << depth,
                details.len()
            )));
        }
        let coarse_planes = tensor_planes(approx);
        let detail_planes: Vec<Vec<Plane>> = details.iter().map(tensor_planes).collect();
        let mut out_planes = Vec::with_capacity(coarse_planes.len());
        for (c, coarse) in coarse_planes.iter().enumerate() {
            let bands: Vec<Plane> = detail_planes.iter().map(|d| d[c].clone()).collect();
            let band = dfb_synthesize_plane(&bands, depth, &self.kernel);
            let pred = lp_expand(coarse);
            let mut img = pred;
            for i in 0..img.v.len() {
                img.v[i] += band.v[i];
            }
            out_planes.push(img);
        }
        Ok(planes_tensor(&out_planes))
    }

    fn mask_to_level(&self, mask: &RegionMask, level: usize) -> Result<RegionMask> {
        let mut m = mask.clone();
        for _ in 0..level {
            m = m.downsample2()?;
        }
        Ok(m)
    }

    fn detail_masks(&self, mask: &RegionMask, level: usize) -> Result<Vec<RegionMask>> {
        let depth = self.depth(level);
        // the level's bandpass lives on the approximation grid one step up
        let mask = self.mask_to_level(mask, level - 1)?;
        if mask.width() % 2 != 0 || mask.height() % 2 != 0 {
            return Err(GistError::Dimension("mask dims must be even".into()));
        }
        let traces = dfb_trace(mask.width(), mask.height(), depth);
        traces
            .into_iter()
            .map(|(w, h, src)| {
                let labels = src.iter().map(|&(y, x)| mask.get(x, y)).collect();
                RegionMask::from_labels(w, h, labels)
            })
            .collect()
    }
}

//! Image and mask file I/O.
//!
//! Supported formats: 8-bit PNG (RGB or grayscale) and binary PPM (P6,
//! maxval 255).  The format is detected from the file's magic bytes on read
//! and from the extension on write.  Bytes map to samples as `v = b / 255`;
//! on write samples are clamped to `[0, 1]` and quantized with
//! `round(v * 255)` (halves round up).

use std::fs;
use std::path::Path;

use image::{DynamicImage, ImageFormat};

use crate::error::{GistError, Result};
use crate::image::{ImageTensor, RegionMask};

const PNG_MAGIC: &[u8] = &[0x89, b'P', b'N', b'G'];

pub fn load_image(path: impl AsRef<Path>) -> Result<ImageTensor> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| GistError::io(path, e))?;
    if bytes.starts_with(PNG_MAGIC) {
        decode_png(path, &bytes)
    } else if bytes.starts_with(b"P6") {
        decode_ppm(path, &bytes)
    } else if bytes.starts_with(b"P5") || bytes.starts_with(b"P3") || bytes.starts_with(b"P2") {
        Err(GistError::decode(
            path,
            "only binary P6 is supported among the netpbm formats",
        ))
    } else {
        Err(GistError::decode(
            path,
            "unrecognized format (want PNG or P6 PPM)",
        ))
    }
}

fn decode_png(path: &Path, bytes: &[u8]) -> Result<ImageTensor> {
    let img = image::load_from_memory_with_format(bytes, ImageFormat::Png)
        .map_err(|e| GistError::decode(path, e.to_string()))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    match img {
        DynamicImage::ImageLuma8(buf) => {
            let data = buf.as_raw().iter().map(|&b| b as f32 / 255.0).collect();
            ImageTensor::from_vec(1, w, h, data)
        }
        DynamicImage::ImageRgb8(buf) => {
            let raw = buf.as_raw();
            let n = w * h;
            let mut data = vec![0.0f32; 3 * n];
            for i in 0..n {
                for c in 0..3 {
                    data[c * n + i] = raw[3 * i + c] as f32 / 255.0;
                }
            }
            ImageTensor::from_vec(3, w, h, data)
        }
        other => Err(GistError::decode(
            path,
            format!(
                "unsupported PNG color type {:?}; want 8-bit RGB or grayscale",
                other.color()
            ),
        )),
    }
}

/// Parses one netpbm header token, skipping whitespace and `#` comments.
fn ppm_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    (*pos > start).then(|| &bytes[start..*pos])
}

fn decode_ppm(path: &Path, bytes: &[u8]) -> Result<ImageTensor> {
    let mut pos = 2usize; // past "P6"
    let mut field = |name: &str| -> Result<usize> {
        ppm_token(bytes, &mut pos)
            .and_then(|t| std::str::from_utf8(t).ok()?.parse().ok())
            .ok_or_else(|| GistError::decode(path, format!("bad or missing {name}")))
    };
    let w = field("width")?;
    let h = field("height")?;
    let maxval = field("maxval")?;
    if maxval != 255 {
        return Err(GistError::decode(
            path,
            format!("maxval {maxval} (want 255)"),
        ));
    }
    pos += 1; // single whitespace after maxval
    let need = 3 * w * h;
    let raw = bytes
        .get(pos..pos + need)
        .ok_or_else(|| GistError::decode(path, "truncated pixel data"))?;
    let n = w * h;
    let mut data = vec![0.0f32; 3 * n];
    for i in 0..n {
        for c in 0..3 {
            data[c * n + i] = raw[3 * i + c] as f32 / 255.0;
        }
    }
    ImageTensor::from_vec(3, w, h, data)
}

#[inline]
pub fn quantize(v: f32) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

fn interleave_bytes(img: &ImageTensor) -> Vec<u8> {
    let n = img.width() * img.height();
    let c = img.channels();
    let mut out = vec![0u8; c * n];
    for ch in 0..c {
        let plane = img.plane(ch);
        for i in 0..n {
            out[c * i + ch] = quantize(plane[i]);
        }
    }
    out
}

pub fn save_image(path: impl AsRef<Path>, img: &ImageTensor) -> Result<()> {
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    match ext.as_str() {
        "png" => save_png(path, img),
        "ppm" => save_ppm(path, img),
        other => Err(GistError::encode(
            path,
            format!("unsupported output extension {other:?} (want png or ppm)"),
        )),
    }
}

fn save_png(path: &Path, img: &ImageTensor) -> Result<()> {
    let (w, h) = (img.width() as u32, img.height() as u32);
    let bytes = interleave_bytes(img);
    let dynimg = match img.channels() {
        1 => {
            DynamicImage::ImageLuma8(image::GrayImage::from_raw(w, h, bytes).expect("sized buffer"))
        }
        3 => DynamicImage::ImageRgb8(image::RgbImage::from_raw(w, h, bytes).expect("sized buffer")),
        c => {
            return Err(GistError::encode(
                path,
                format!("PNG output needs 1 or 3 channels, got {c}"),
            ))
        }
    };
    dynimg
        .save_with_format(path, ImageFormat::Png)
        .map_err(|e| GistError::encode(path, e.to_string()))
}

fn save_ppm(path: &Path, img: &ImageTensor) -> Result<()> {
    if img.channels() != 3 {
        return Err(GistError::encode(
            path,
            format!("PPM output needs 3 channels, got {}", img.channels()),
        ));
    }
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(interleave_bytes(img));
    fs::write(path, out).map_err(|e| GistError::io(path, e))
}

/// Loads a label mask from an 8-bit single-channel PNG; the raw pixel value
/// is the label id.
pub fn load_mask(path: impl AsRef<Path>) -> Result<RegionMask> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| GistError::io(path, e))?;
    if !bytes.starts_with(PNG_MAGIC) {
        return Err(GistError::decode(path, "masks must be PNG"));
    }
    let img = image::load_from_memory_with_format(&bytes, ImageFormat::Png)
        .map_err(|e| GistError::decode(path, e.to_string()))?;
    match img {
        DynamicImage::ImageLuma8(buf) => {
            let (w, h) = (buf.width() as usize, buf.height() as usize);
            let labels = buf.as_raw().iter().map(|&b| b as u32).collect();
            RegionMask::from_labels(w, h, labels)
        }
        other => Err(GistError::decode(
            path,
            format!(
                "masks must be 8-bit single-channel PNG, got {:?}",
                other.color()
            ),
        )),
    }
}

/// Writes a mask as an 8-bit grayscale PNG; labels above 255 are rejected.
pub fn save_mask(path: impl AsRef<Path>, mask: &RegionMask) -> Result<()> {
    let path = path.as_ref();
    let mut bytes = Vec::with_capacity(mask.labels().len());
    for &l in mask.labels() {
        if l > 255 {
            return Err(GistError::encode(
                path,
                format!("label {l} exceeds 8-bit range"),
            ));
        }
        bytes.push(l as u8);
    }
    let buf = image::GrayImage::from_raw(mask.width() as u32, mask.height() as u32, bytes)
        .expect("sized buffer");
    DynamicImage::ImageLuma8(buf)
        .save_with_format(path, ImageFormat::Png)
        .map_err(|e| GistError::encode(path, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn tmp(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join("gist-io-tests");
        fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn ppm_decode_known_bytes() {
        // hand-assembled 2x1 P6 with a comment in the header
        let mut bytes = b"P6\n# tiny\n2 1\n255\n".to_vec();
        bytes.extend([0u8, 128, 255, 51, 102, 204]);
        let path = tmp("known.ppm");
        fs::write(&path, &bytes).unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!((img.channels(), img.width(), img.height()), (3, 2, 1));
        let want = [0.0, 51.0, 128.0, 102.0, 255.0, 204.0]; // planar r r g g b b
        for (got, want) in img.data().iter().zip(want) {
            assert!((got - want / 255.0).abs() < 1e-7);
        }
    }

    #[test]
    fn quantize_rounds_halves_up() {
        assert_eq!(quantize(0.0), 0);
        assert_eq!(quantize(1.0), 255);
        assert_eq!(quantize(-0.2), 0);
        assert_eq!(quantize(1.7), 255);
        // 127.5/255 is exactly between bytes 127 and 128
        assert_eq!(quantize(127.5 / 255.0), 128);
        assert_eq!(quantize(0.499 * 2.0 / 2.0), 127);
    }

    #[test]
    fn ppm_round_trip_is_byte_exact() {
        let data: Vec<f32> = (0..48).map(|i| (i * 5 % 256) as f32 / 255.0).collect();
        let img = ImageTensor::from_vec(3, 4, 4, data).unwrap();
        let path = tmp("roundtrip.ppm");
        save_image(&path, &img).unwrap();
        let back = load_image(&path).unwrap();
        assert_eq!(img.max_abs_diff(&back), 0.0);
        save_image(&path, &back).unwrap();
        let twice = fs::read(&path).unwrap();
        save_image(tmp("roundtrip2.ppm"), &back).unwrap();
        assert_eq!(twice, fs::read(tmp("roundtrip2.ppm")).unwrap());
    }

    #[test]
    fn png_round_trip_rgb_and_gray() {
        for channels in [1usize, 3] {
            let n = 6 * 5 * channels;
            let data: Vec<f32> = (0..n).map(|i| (i * 31 % 256) as f32 / 255.0).collect();
            let img = ImageTensor::from_vec(channels, 6, 5, data).unwrap();
            let path = tmp(&format!("rt{channels}.png"));
            save_image(&path, &img).unwrap();
            let back = load_image(&path).unwrap();
            assert_eq!(back.channels(), channels);
            assert_eq!(img.max_abs_diff(&back), 0.0);
        }
    }

    #[test]
    fn save_clamps_out_of_range() {
        let img = ImageTensor::from_vec(3, 1, 1, vec![-0.5, 0.5, 1.5]).unwrap();
        let path = tmp("clamp.ppm");
        save_image(&path, &img).unwrap();
        let back = load_image(&path).unwrap();
        let want = [0.0, 128.0 / 255.0, 1.0];
        for (got, want) in back.data().iter().zip(want) {
            assert!((got - want).abs() < 1e-7);
        }
    }

    #[test]
    fn rejects_rgba_png_and_p5() {
        let rgba = image::RgbaImage::from_pixel(2, 2, image::Rgba([1, 2, 3, 4]));
        let path = tmp("rgba.png");
        DynamicImage::ImageRgba8(rgba).save(&path).unwrap();
        let err = load_image(&path).unwrap_err();
        assert!(err.to_string().contains("unsupported PNG color type"));

        let p5 = tmp("gray.pgm");
        fs::write(&p5, b"P5\n2 1\n255\n\x00\xff").unwrap();
        assert!(load_image(&p5).is_err());
    }

    #[test]
    fn rejects_wrong_maxval_and_truncation() {
        let path = tmp("maxval.ppm");
        fs::write(&path, b"P6\n1 1\n65535\n\x00\x00\x00\x00\x00\x00").unwrap();
        assert!(load_image(&path)
            .unwrap_err()
            .to_string()
            .contains("maxval"));
        let path = tmp("trunc.ppm");
        fs::write(&path, b"P6\n2 2\n255\n\x00\x01").unwrap();
        assert!(load_image(&path)
            .unwrap_err()
            .to_string()
            .contains("truncated"));
    }

    #[test]
    fn mask_round_trip_preserves_labels() {
        let mask = RegionMask::from_labels(3, 2, vec![0, 1, 2, 254, 255, 7]).unwrap();
        let path = tmp("mask.png");
        save_mask(&path, &mask).unwrap();
        let back = load_mask(&path).unwrap();
        assert_eq!(mask, back);
    }
}

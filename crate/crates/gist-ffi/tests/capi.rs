//! Drives the C ABI the way a foreign caller would: raw pointers, status
//! codes, explicit frees.

use gist_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe {
        CStr::from_ptr(gist_last_error_message())
            .to_string_lossy()
            .into_owned()
    }
}

fn gradient_image(channels: usize, width: usize, height: usize) -> *mut GistImage {
    let mut data = Vec::with_capacity(channels * width * height);
    for ch in 0..channels {
        for y in 0..height {
            for x in 0..width {
                let v = (x + y + ch * 3) as f32 / (width + height + 6) as f32;
                data.push(0.1 + 0.8 * (v + 0.07 * ((x * 31 + y * 17) % 13) as f32 / 13.0).fract());
            }
        }
    }
    let mut img = ptr::null_mut();
    let status =
        unsafe { gist_image_from_planes(data.as_ptr(), channels, width, height, &mut img) };
    assert_eq!(status, GistStatus::Ok, "{}", last_error());
    img
}

#[test]
fn version_is_exposed() {
    let version = unsafe { CStr::from_ptr(gist_version()) }.to_str().unwrap();
    assert!(!version.is_empty());
    assert!(version.split('.').count() >= 2);
}

#[test]
fn image_accessors_round_trip() {
    let img = gradient_image(3, 8, 6);
    unsafe {
        assert_eq!(gist_image_channels(img), 3);
        assert_eq!(gist_image_width(img), 8);
        assert_eq!(gist_image_height(img), 6);
        let data = gist_image_data(img);
        assert!(!data.is_null());
        let values = std::slice::from_raw_parts(data, 3 * 8 * 6);
        assert!(values.iter().all(|v| v.is_finite()));
        gist_image_free(img);
    }
    unsafe {
        assert_eq!(gist_image_channels(ptr::null()), 0);
        assert!(gist_image_data(ptr::null()).is_null());
    }
}

#[test]
fn null_arguments_are_rejected() {
    let mut out = ptr::null_mut();
    let status = unsafe { gist_image_load(ptr::null(), &mut out) };
    assert_eq!(status, GistStatus::NullArgument);
    assert!(last_error().contains("path"));

    let cfg = gist_config_new();
    let status = unsafe { gist_stylize(ptr::null(), ptr::null(), cfg, &mut out) };
    assert_eq!(status, GistStatus::NullArgument);
    unsafe { gist_config_free(cfg) };
}

#[test]
fn bad_names_report_argument_errors() {
    let cfg = gist_config_new();
    let name = c("curvelet");
    let status = unsafe { gist_config_set_transform(cfg, name.as_ptr()) };
    assert_eq!(status, GistStatus::Argument);
    assert!(last_error().contains("curvelet"), "{}", last_error());

    let name = c("db9");
    let status = unsafe { gist_config_set_wavelet(cfg, name.as_ptr()) };
    assert_eq!(status, GistStatus::Argument);

    let name = c("cubist");
    let status = unsafe { gist_config_set_mode(cfg, name.as_ptr()) };
    assert_eq!(status, GistStatus::Argument);
    unsafe { gist_config_free(cfg) };
}

#[test]
fn stylize_produces_matching_dimensions() {
    let content = gradient_image(3, 32, 32);
    let style = gradient_image(3, 32, 32);
    let cfg = gist_config_new();
    let mut out = ptr::null_mut();
    let status = unsafe { gist_stylize(content, style, cfg, &mut out) };
    assert_eq!(status, GistStatus::Ok, "{}", last_error());
    unsafe {
        assert_eq!(gist_image_channels(out), 3);
        assert_eq!(gist_image_width(out), 32);
        assert_eq!(gist_image_height(out), 32);
        let values = std::slice::from_raw_parts(gist_image_data(out), 3 * 32 * 32);
        assert!(values.iter().all(|&v| (0.0..=1.0).contains(&v)));
        gist_image_free(out);
        gist_image_free(content);
        gist_image_free(style);
        gist_config_free(cfg);
    }
}

#[test]
fn indivisible_dimensions_report_dimension_error() {
    let content = gradient_image(3, 30, 30);
    let style = gradient_image(3, 32, 32);
    let cfg = gist_config_new();
    let mut out = ptr::null_mut();
    let status = unsafe { gist_stylize(content, style, cfg, &mut out) };
    assert_eq!(status, GistStatus::Dimension);
    assert!(out.is_null());
    assert!(!last_error().is_empty());
    unsafe {
        gist_image_free(content);
        gist_image_free(style);
        gist_config_free(cfg);
    }
}

#[test]
fn full_content_blend_reproduces_content() {
    let content = gradient_image(3, 32, 32);
    let style = gradient_image(3, 32, 32);
    let cfg = gist_config_new();
    let lambdas = [0.0f64];
    let status = unsafe { gist_config_set_blend(cfg, 1.0, lambdas.as_ptr(), 1) };
    assert_eq!(status, GistStatus::Ok);

    let styles = [style as *const GistImage];
    let mut out = ptr::null_mut();
    let status = unsafe { gist_stylize_multi(content, styles.as_ptr(), 1, cfg, &mut out) };
    assert_eq!(status, GistStatus::Ok, "{}", last_error());
    unsafe {
        let got = std::slice::from_raw_parts(gist_image_data(out), 3 * 32 * 32);
        let want = std::slice::from_raw_parts(gist_image_data(content), 3 * 32 * 32);
        let max_diff = got
            .iter()
            .zip(want)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f32, f32::max);
        assert!(max_diff <= 1e-6, "blend identity off by {max_diff}");
        gist_image_free(out);
        gist_image_free(content);
        gist_image_free(style);
        gist_config_free(cfg);
    }
}

#[test]
fn config_options_apply_cleanly() {
    let cfg = gist_config_new();
    unsafe {
        let name = c("contourlet");
        assert_eq!(
            gist_config_set_transform(cfg, name.as_ptr()),
            GistStatus::Ok
        );
        assert_eq!(gist_config_set_levels(cfg, 2), GistStatus::Ok);
        let dirs = [1usize, 4];
        assert_eq!(
            gist_config_set_directions(cfg, dirs.as_ptr(), 2),
            GistStatus::Ok
        );
        assert_eq!(gist_config_set_eps(cfg, 1e-4), GistStatus::Ok);
        assert_eq!(gist_config_set_seed(cfg, 9), GistStatus::Ok);
        assert_eq!(gist_config_set_align_details(cfg, false), GistStatus::Ok);

        let content = gradient_image(3, 32, 32);
        let style = gradient_image(3, 32, 32);
        let mut out = ptr::null_mut();
        let status = gist_stylize(content, style, cfg, &mut out);
        assert_eq!(status, GistStatus::Ok, "{}", last_error());
        gist_image_free(out);
        gist_image_free(content);
        gist_image_free(style);
        gist_config_free(cfg);
    }
}

#[test]
fn artistic_mode_runs_through_the_abi() {
    let cfg = gist_config_new();
    unsafe {
        let name = c("artistic");
        assert_eq!(gist_config_set_mode(cfg, name.as_ptr()), GistStatus::Ok);
        assert_eq!(gist_config_set_etf(cfg, 3, 2), GistStatus::Ok);
        assert_eq!(gist_config_set_seed(cfg, 4), GistStatus::Ok);
        let content = gradient_image(3, 32, 32);
        let style = gradient_image(3, 32, 32);
        let mut out = ptr::null_mut();
        let status = gist_stylize(content, style, cfg, &mut out);
        assert_eq!(status, GistStatus::Ok, "{}", last_error());
        gist_image_free(out);
        gist_image_free(content);
        gist_image_free(style);
        gist_config_free(cfg);
    }
}

#[test]
fn file_round_trip_through_the_abi() {
    let dir = std::env::temp_dir().join("gist-capi-io");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("round_trip.png");
    let cpath = c(path.to_str().unwrap());

    let img = gradient_image(3, 12, 9);
    unsafe {
        assert_eq!(gist_image_save(img, cpath.as_ptr()), GistStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(gist_image_load(cpath.as_ptr(), &mut back), GistStatus::Ok);
        assert_eq!(gist_image_width(back), 12);
        assert_eq!(gist_image_height(back), 9);
        let a = std::slice::from_raw_parts(gist_image_data(img), 3 * 12 * 9);
        let b = std::slice::from_raw_parts(gist_image_data(back), 3 * 12 * 9);
        let max_diff = a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f32, f32::max);
        assert!(
            max_diff <= 0.5 / 255.0 + 1e-6,
            "quantization drift {max_diff}"
        );
        gist_image_free(back);
        gist_image_free(img);
    }

    let missing = c(dir.join("absent.png").to_str().unwrap());
    let mut out = ptr::null_mut();
    let status = unsafe { gist_image_load(missing.as_ptr(), &mut out) };
    assert_eq!(status, GistStatus::Io);
    assert!(last_error().contains("absent.png"));
}

#[test]
fn mask_paths_load_into_the_config() {
    let dir = std::env::temp_dir().join("gist-capi-masks");
    std::fs::create_dir_all(&dir).unwrap();
    let mask_path = dir.join("halves.png");
    let labels: Vec<u32> = (0..32 * 32)
        .map(|i| if i % 32 < 16 { 1 } else { 2 })
        .collect();
    let mask = gist_core::image::RegionMask::from_labels(32, 32, labels).unwrap();
    gist_core::io::save_mask(&mask_path, &mask).unwrap();

    let cfg = gist_config_new();
    let cpath = c(mask_path.to_str().unwrap());
    unsafe {
        let status = gist_config_set_masks(cfg, cpath.as_ptr(), cpath.as_ptr());
        assert_eq!(status, GistStatus::Ok, "{}", last_error());

        let content = gradient_image(3, 32, 32);
        let style = gradient_image(3, 32, 32);
        let mut out = ptr::null_mut();
        let status = gist_stylize(content, style, cfg, &mut out);
        assert_eq!(status, GistStatus::Ok, "{}", last_error());
        gist_image_free(out);

        assert_eq!(
            gist_config_set_masks(cfg, ptr::null(), ptr::null()),
            GistStatus::Ok
        );
        let mut out = ptr::null_mut();
        let status = gist_stylize(content, style, cfg, &mut out);
        assert_eq!(status, GistStatus::Ok, "{}", last_error());
        gist_image_free(out);
        gist_image_free(content);
        gist_image_free(style);
        gist_config_free(cfg);
    }
}

#[test]
fn generated_header_exists() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/gist.h");
    let text = std::fs::read_to_string(header).unwrap();
    for needle in [
        "GistStatus",
        "typedef struct GistImage GistImage;",
        "typedef struct GistConfig GistConfig;",
        "gist_stylize",
        "gist_last_error_message",
    ] {
        assert!(text.contains(needle), "header lost {needle}");
    }
}

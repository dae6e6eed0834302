//! C ABI for the gist style-transfer library.
//!
//! Every object crossing the boundary is an opaque handle owned by the
//! library; callers release handles with the matching `*_free` function.
//! Functions report a [`GistStatus`]; on anything other than `Ok` a
//! human-readable message is available from [`gist_last_error_message`]
//! until the next failing call on the same thread.

use gist_core::error::GistError;
use gist_core::etf::EtfParams;
use gist_core::image::ImageTensor;
use gist_core::pipeline::{
    stylize, stylize_interpolated, BlendWeights, RenderMode, StyleJobConfig, TransformKind,
};
use gist_core::wavelet::WaveletFamily;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::slice;

/// Result code returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GistStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    Io = 3,
    Decode = 4,
    Encode = 5,
    /// Bad configuration: unknown names, invalid weights, flag combinations.
    Argument = 6,
    /// Shape constraint violated: divisibility, mismatched sizes.
    Dimension = 7,
    /// A masked statistic was requested over zero pixels.
    EmptyRegion = 8,
    /// Non-finite values where finite data is required.
    NonFinite = 9,
    /// The library caught an internal panic instead of unwinding into C.
    Panic = 10,
}

/// Planar float image, channel-major, values in [0, 1].
pub struct GistImage {
    inner: ImageTensor,
}

/// Stylization options; create with defaults and adjust through the setters.
pub struct GistConfig {
    inner: StyleJobConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &GistError) -> GistStatus {
    match err {
        GistError::Io { .. } => GistStatus::Io,
        GistError::Decode { .. } => GistStatus::Decode,
        GistError::Encode { .. } => GistStatus::Encode,
        GistError::Argument(_) => GistStatus::Argument,
        GistError::Dimension(_) => GistStatus::Dimension,
        GistError::EmptyRegion(_) => GistStatus::EmptyRegion,
        GistError::NonFinite(_) => GistStatus::NonFinite,
    }
}

fn run(body: impl FnOnce() -> Result<(), GistStatus>) -> GistStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => GistStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .map(String::as_str)
                .or_else(|| payload.downcast_ref::<&str>().copied())
                .unwrap_or("internal panic");
            set_error(msg);
            GistStatus::Panic
        }
    }
}

fn fail(err: GistError) -> GistStatus {
    set_error(&err.to_string());
    status_of(&err)
}

unsafe fn required<'a, T>(ptr: *const T, name: &str) -> Result<&'a T, GistStatus> {
    if ptr.is_null() {
        set_error(&format!("{name} must not be null"));
        Err(GistStatus::NullArgument)
    } else {
        Ok(&*ptr)
    }
}

unsafe fn required_mut<'a, T>(ptr: *mut T, name: &str) -> Result<&'a mut T, GistStatus> {
    if ptr.is_null() {
        set_error(&format!("{name} must not be null"));
        Err(GistStatus::NullArgument)
    } else {
        Ok(&mut *ptr)
    }
}

unsafe fn required_str<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, GistStatus> {
    if ptr.is_null() {
        set_error(&format!("{name} must not be null"));
        return Err(GistStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error(&format!("{name} is not valid utf-8"));
        GistStatus::InvalidUtf8
    })
}

fn emit<T>(out: *mut *mut T, value: T) -> Result<(), GistStatus> {
    if out.is_null() {
        set_error("out must not be null");
        return Err(GistStatus::NullArgument);
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

/// Message for the most recent failure on this thread.  The pointer stays
/// valid until the next failing call on the same thread; never free it.
#[no_mangle]
pub extern "C" fn gist_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static string; never free it.
#[no_mangle]
pub extern "C" fn gist_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Decodes an image file (PNG or PPM) into a new handle.
///
/// # Safety
/// `path` must be null or a NUL-terminated string valid for reads; `out`
/// must be a valid location to store a pointer.
#[no_mangle]
pub unsafe extern "C" fn gist_image_load(
    path: *const c_char,
    out: *mut *mut GistImage,
) -> GistStatus {
    run(|| {
        let path = required_str(path, "path")?;
        let inner = gist_core::io::load_image(PathBuf::from(path)).map_err(fail)?;
        emit(out, GistImage { inner })
    })
}

/// Encodes an image to a file; the format follows the extension (.png, .ppm).
///
/// # Safety
/// `image` must be null or a live handle from this library; `path` must be
/// null or a NUL-terminated string valid for reads.
#[no_mangle]
pub unsafe extern "C" fn gist_image_save(
    image: *const GistImage,
    path: *const c_char,
) -> GistStatus {
    run(|| {
        let image = required(image, "image")?;
        let path = required_str(path, "path")?;
        gist_core::io::save_image(PathBuf::from(path), &image.inner).map_err(fail)?;
        Ok(())
    })
}

/// Builds an image from planar channel-major float data (channel, then row,
/// then column), `channels * width * height` values in [0, 1].
///
/// # Safety
/// `data` must be null or point to `channels * width * height` readable
/// floats; `out` must be a valid location to store a pointer.
#[no_mangle]
pub unsafe extern "C" fn gist_image_from_planes(
    data: *const f32,
    channels: usize,
    width: usize,
    height: usize,
    out: *mut *mut GistImage,
) -> GistStatus {
    run(|| {
        if data.is_null() {
            set_error("data must not be null");
            return Err(GistStatus::NullArgument);
        }
        let len = channels
            .checked_mul(width)
            .and_then(|n| n.checked_mul(height))
            .ok_or_else(|| {
                set_error("image dimensions overflow");
                GistStatus::Dimension
            })?;
        let values = slice::from_raw_parts(data, len).to_vec();
        let inner = ImageTensor::from_vec(channels, width, height, values).map_err(fail)?;
        emit(out, GistImage { inner })
    })
}

/// Channel count, or 0 for a null handle.
///
/// # Safety
/// `image` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn gist_image_channels(image: *const GistImage) -> usize {
    image.as_ref().map_or(0, |i| i.inner.channels())
}

/// Width in pixels, or 0 for a null handle.
///
/// # Safety
/// `image` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn gist_image_width(image: *const GistImage) -> usize {
    image.as_ref().map_or(0, |i| i.inner.width())
}

/// Height in pixels, or 0 for a null handle.
///
/// # Safety
/// `image` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn gist_image_height(image: *const GistImage) -> usize {
    image.as_ref().map_or(0, |i| i.inner.height())
}

/// Borrow of the image's planar data; valid while the handle lives.
///
/// # Safety
/// `image` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn gist_image_data(image: *const GistImage) -> *const f32 {
    image
        .as_ref()
        .map_or(std::ptr::null(), |i| i.inner.data().as_ptr())
}

/// Releases an image handle; null is a no-op.
///
/// # Safety
/// `image` must be null or a handle from this library not yet freed; any
/// data pointer taken from it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn gist_image_free(image: *mut GistImage) {
    if !image.is_null() {
        drop(Box::from_raw(image));
    }
}

/// New configuration with the library defaults: stationary db2 wavelets,
/// three scales, photographic mode.
#[no_mangle]
pub extern "C" fn gist_config_new() -> *mut GistConfig {
    Box::into_raw(Box::new(GistConfig {
        inner: StyleJobConfig::default(),
    }))
}

/// Releases a configuration handle; null is a no-op.
///
/// # Safety
/// `config` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gist_config_free(config: *mut GistConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Selects the multiscale representation: "dwt", "swt", or "contourlet".
///
/// # Safety
/// `config` must be null or a live handle from this library; `name` must be
/// null or a NUL-terminated string valid for reads.
#[no_mangle]
pub unsafe extern "C" fn gist_config_set_transform(
    config: *mut GistConfig,
    name: *const c_char,
) -> GistStatus {
    run(|| {
        let config = required_mut(config, "config")?;
        let name = required_str(name, "name")?;
        config.inner.transform = name.parse::<TransformKind>().map_err(fail)?;
        Ok(())
    })
}

/// Selects the wavelet family: "haar" or "db2".
///
/// # Safety
/// `config` must be null or a live handle from this library; `name` must be
/// null or a NUL-terminated string valid for reads.
#[no_mangle]
pub unsafe extern "C" fn gist_config_set_wavelet(
    config: *mut GistConfig,
    name: *const c_char,
) -> GistStatus {
    run(|| {
        let config = required_mut(config, "config")?;
        let name = required_str(name, "name")?;
        config.inner.wavelet = WaveletFamily::parse(name).map_err(fail)?;
        Ok(())
    })
}

/// Selects the rendering mode: "photo" or "artistic".
///
/// # Safety
/// `config` must be null or a live handle from this library; `name` must be
/// null or a NUL-terminated string valid for reads.
#[no_mangle]
pub unsafe extern "C" fn gist_config_set_mode(
    config: *mut GistConfig,
    name: *const c_char,
) -> GistStatus {
    run(|| {
        let config = required_mut(config, "config")?;
        let name = required_str(name, "name")?;
        config.inner.mode = name.parse::<RenderMode>().map_err(fail)?;
        Ok(())
    })
}

/// Sets the number of scales.
///
/// # Safety
/// `config` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn gist_config_set_levels(
    config: *mut GistConfig,
    levels: usize,
) -> GistStatus {
    run(|| {
        let config = required_mut(config, "config")?;
        config.inner.levels = levels;
        Ok(())
    })
}

/// Directional subband counts per contourlet scale, finest first; each
/// entry must be a power of two.  Ignored by the wavelet transforms.
///
/// # Safety
/// `config` must be null or a live handle from this library; `directions`
/// must point to `count` readable values when `count > 0`.
#[no_mangle]
pub unsafe extern "C" fn gist_config_set_directions(
    config: *mut GistConfig,
    directions: *const usize,
    count: usize,
) -> GistStatus {
    run(|| {
        let config = required_mut(config, "config")?;
        if directions.is_null() && count > 0 {
            set_error("directions must not be null when count > 0");
            return Err(GistStatus::NullArgument);
        }
        config.inner.directions = if count == 0 {
            Vec::new()
        } else {
            slice::from_raw_parts(directions, count).to_vec()
        };
        Ok(())
    })
}

/// Sets the covariance regularizer used when building transport maps.
///
/// # Safety
/// `config` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn gist_config_set_eps(config: *mut GistConfig, eps: f64) -> GistStatus {
    run(|| {
        let config = required_mut(config, "config")?;
        config.inner.eps = eps;
        Ok(())
    })
}

/// Sets the seed for the artistic-mode style crop.
///
/// # Safety
/// `config` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn gist_config_set_seed(config: *mut GistConfig, seed: u64) -> GistStatus {
    run(|| {
        let config = required_mut(config, "config")?;
        config.inner.seed = seed;
        Ok(())
    })
}

/// Kernel radius and smoothing pass count for the edge tangent flow used by
/// artistic mode.
///
/// # Safety
/// `config` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn gist_config_set_etf(
    config: *mut GistConfig,
    radius: usize,
    iterations: usize,
) -> GistStatus {
    run(|| {
        let config = required_mut(config, "config")?;
        config.inner.etf = EtfParams { radius, iterations };
        Ok(())
    })
}

/// Toggles statistical alignment of detail subbands; approximations are
/// always aligned.
///
/// # Safety
/// `config` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn gist_config_set_align_details(
    config: *mut GistConfig,
    align: bool,
) -> GistStatus {
    run(|| {
        let config = required_mut(config, "config")?;
        config.inner.align_details = align;
        Ok(())
    })
}

/// Interpolation weights for multi-style runs: `lambda0` is the content
/// weight, `lambdas` the per-style weights; all in [0, 1], summing to 1 with
/// `lambda0`.  Pass a null `lambdas` with count 0 to clear.
///
/// # Safety
/// `config` must be null or a live handle from this library; `lambdas` must
/// point to `count` readable values when `count > 0`.
#[no_mangle]
pub unsafe extern "C" fn gist_config_set_blend(
    config: *mut GistConfig,
    lambda0: f64,
    lambdas: *const f64,
    count: usize,
) -> GistStatus {
    run(|| {
        let config = required_mut(config, "config")?;
        if lambdas.is_null() && count > 0 {
            set_error("lambdas must not be null when count > 0");
            return Err(GistStatus::NullArgument);
        }
        config.inner.blend = if count == 0 {
            None
        } else {
            Some(BlendWeights {
                lambda0,
                lambdas: slice::from_raw_parts(lambdas, count).to_vec(),
            })
        };
        Ok(())
    })
}

/// Loads label masks for region-wise stylization; pass two null paths to
/// clear.  Masks must both be present or both absent, matching their images'
/// dimensions.
///
/// # Safety
/// `config` must be null or a live handle from this library; each path must
/// be null or a NUL-terminated string valid for reads.
#[no_mangle]
pub unsafe extern "C" fn gist_config_set_masks(
    config: *mut GistConfig,
    content_mask_path: *const c_char,
    style_mask_path: *const c_char,
) -> GistStatus {
    run(|| {
        let config = required_mut(config, "config")?;
        if content_mask_path.is_null() && style_mask_path.is_null() {
            config.inner.content_mask = None;
            config.inner.style_mask = None;
            return Ok(());
        }
        let cpath = required_str(content_mask_path, "content_mask_path")?;
        let spath = required_str(style_mask_path, "style_mask_path")?;
        config.inner.content_mask =
            Some(gist_core::io::load_mask(PathBuf::from(cpath)).map_err(fail)?);
        config.inner.style_mask =
            Some(gist_core::io::load_mask(PathBuf::from(spath)).map_err(fail)?);
        Ok(())
    })
}

/// Stylizes `content` with one style image.
///
/// # Safety
/// `content`, `style`, and `config` must be null or live handles from this
/// library; `out` must be a valid location to store a pointer.
#[no_mangle]
pub unsafe extern "C" fn gist_stylize(
    content: *const GistImage,
    style: *const GistImage,
    config: *const GistConfig,
    out: *mut *mut GistImage,
) -> GistStatus {
    run(|| {
        let content = required(content, "content")?;
        let style = required(style, "style")?;
        let config = required(config, "config")?;
        let inner = stylize(&content.inner, &style.inner, &config.inner).map_err(fail)?;
        emit(out, GistImage { inner })
    })
}

/// Stylizes `content` with several styles under the configured interpolation
/// weights.
///
/// # Safety
/// `content` and `config` must be null or live handles from this library;
/// `styles` must point to `style_count` readable handle pointers, each null
/// or live; `out` must be a valid location to store a pointer.
#[no_mangle]
pub unsafe extern "C" fn gist_stylize_multi(
    content: *const GistImage,
    styles: *const *const GistImage,
    style_count: usize,
    config: *const GistConfig,
    out: *mut *mut GistImage,
) -> GistStatus {
    run(|| {
        let content = required(content, "content")?;
        let config = required(config, "config")?;
        if styles.is_null() || style_count == 0 {
            set_error("styles must hold at least one image");
            return Err(GistStatus::NullArgument);
        }
        let handles = slice::from_raw_parts(styles, style_count);
        let mut images = Vec::with_capacity(style_count);
        for (i, handle) in handles.iter().enumerate() {
            let img = required(*handle, &format!("styles[{i}]"))?;
            images.push(img.inner.clone());
        }
        let inner = stylize_interpolated(&content.inner, &images, &config.inner).map_err(fail)?;
        emit(out, GistImage { inner })
    })
}

/* C interface for the gist style-transfer library. */

#ifndef GIST_H
#define GIST_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code returned by every fallible entry point.
 */
typedef enum GistStatus {
  GIST_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  GIST_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  GIST_STATUS_INVALID_UTF8 = 2,
  GIST_STATUS_IO = 3,
  GIST_STATUS_DECODE = 4,
  GIST_STATUS_ENCODE = 5,
  /**
   * Bad configuration: unknown names, invalid weights, flag combinations.
   */
  GIST_STATUS_ARGUMENT = 6,
  /**
   * Shape constraint violated: divisibility, mismatched sizes.
   */
  GIST_STATUS_DIMENSION = 7,
  /**
   * A masked statistic was requested over zero pixels.
   */
  GIST_STATUS_EMPTY_REGION = 8,
  /**
   * Non-finite values where finite data is required.
   */
  GIST_STATUS_NON_FINITE = 9,
  /**
   * The library caught an internal panic instead of unwinding into C.
   */
  GIST_STATUS_PANIC = 10,
} GistStatus;

/**
 * Stylization options; create with defaults and adjust through the setters.
 */
typedef struct GistConfig GistConfig;

/**
 * Planar float image, channel-major, values in [0, 1].
 */
typedef struct GistImage GistImage;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread.  The pointer stays
 * valid until the next failing call on the same thread; never free it.
 */
const char *gist_last_error_message(void);

/**
 * Library version as a static string; never free it.
 */
const char *gist_version(void);

/**
 * Decodes an image file (PNG or PPM) into a new handle.
 *
 * # Safety
 * `path` must be null or a NUL-terminated string valid for reads; `out`
 * must be a valid location to store a pointer.
 */
enum GistStatus gist_image_load(const char *path, struct GistImage **out);

/**
 * Encodes an image to a file; the format follows the extension (.png, .ppm).
 *
 * # Safety
 * `image` must be null or a live handle from this library; `path` must be
 * null or a NUL-terminated string valid for reads.
 */
enum GistStatus gist_image_save(const struct GistImage *image, const char *path);

/**
 * Builds an image from planar channel-major float data (channel, then row,
 * then column), `channels * width * height` values in [0, 1].
 *
 * # Safety
 * `data` must be null or point to `channels * width * height` readable
 * floats; `out` must be a valid location to store a pointer.
 */
enum GistStatus gist_image_from_planes(const float *data,
                                       size_t channels,
                                       size_t width,
                                       size_t height,
                                       struct GistImage **out);

/**
 * Channel count, or 0 for a null handle.
 *
 * # Safety
 * `image` must be null or a live handle from this library.
 */
size_t gist_image_channels(const struct GistImage *image);

/**
 * Width in pixels, or 0 for a null handle.
 *
 * # Safety
 * `image` must be null or a live handle from this library.
 */
size_t gist_image_width(const struct GistImage *image);

/**
 * Height in pixels, or 0 for a null handle.
 *
 * # Safety
 * `image` must be null or a live handle from this library.
 */
size_t gist_image_height(const struct GistImage *image);

/**
 * Borrow of the image's planar data; valid while the handle lives.
 *
 * # Safety
 * `image` must be null or a live handle from this library.
 */
const float *gist_image_data(const struct GistImage *image);

/**
 * Releases an image handle; null is a no-op.
 *
 * # Safety
 * `image` must be null or a handle from this library not yet freed; any
 * data pointer taken from it is invalid afterwards.
 */
void gist_image_free(struct GistImage *image);

/**
 * New configuration with the library defaults: stationary db2 wavelets,
 * three scales, photographic mode.
 */
struct GistConfig *gist_config_new(void);

/**
 * Releases a configuration handle; null is a no-op.
 *
 * # Safety
 * `config` must be null or a handle from this library not yet freed.
 */
void gist_config_free(struct GistConfig *config);

/**
 * Selects the multiscale representation: "dwt", "swt", or "contourlet".
 *
 * # Safety
 * `config` must be null or a live handle from this library; `name` must be
 * null or a NUL-terminated string valid for reads.
 */
enum GistStatus gist_config_set_transform(struct GistConfig *config, const char *name);

/**
 * Selects the wavelet family: "haar" or "db2".
 *
 * # Safety
 * `config` must be null or a live handle from this library; `name` must be
 * null or a NUL-terminated string valid for reads.
 */
enum GistStatus gist_config_set_wavelet(struct GistConfig *config, const char *name);

/**
 * Selects the rendering mode: "photo" or "artistic".
 *
 * # Safety
 * `config` must be null or a live handle from this library; `name` must be
 * null or a NUL-terminated string valid for reads.
 */
enum GistStatus gist_config_set_mode(struct GistConfig *config, const char *name);

/**
 * Sets the number of scales.
 *
 * # Safety
 * `config` must be null or a live handle from this library.
 */
enum GistStatus gist_config_set_levels(struct GistConfig *config, size_t levels);

/**
 * Directional subband counts per contourlet scale, finest first; each
 * entry must be a power of two.  Ignored by the wavelet transforms.
 *
 * # Safety
 * `config` must be null or a live handle from this library; `directions`
 * must point to `count` readable values when `count > 0`.
 */
enum GistStatus gist_config_set_directions(struct GistConfig *config,
                                           const size_t *directions,
                                           size_t count);

/**
 * Sets the covariance regularizer used when building transport maps.
 *
 * # Safety
 * `config` must be null or a live handle from this library.
 */
enum GistStatus gist_config_set_eps(struct GistConfig *config, double eps);

/**
 * Sets the seed for the artistic-mode style crop.
 *
 * # Safety
 * `config` must be null or a live handle from this library.
 */
enum GistStatus gist_config_set_seed(struct GistConfig *config, uint64_t seed);

/**
 * Kernel radius and smoothing pass count for the edge tangent flow used by
 * artistic mode.
 *
 * # Safety
 * `config` must be null or a live handle from this library.
 */
enum GistStatus gist_config_set_etf(struct GistConfig *config, size_t radius, size_t iterations);

/**
 * Toggles statistical alignment of detail subbands; approximations are
 * always aligned.
 *
 * # Safety
 * `config` must be null or a live handle from this library.
 */
enum GistStatus gist_config_set_align_details(struct GistConfig *config, bool align);

/**
 * Interpolation weights for multi-style runs: `lambda0` is the content
 * weight, `lambdas` the per-style weights; all in [0, 1], summing to 1 with
 * `lambda0`.  Pass a null `lambdas` with count 0 to clear.
 *
 * # Safety
 * `config` must be null or a live handle from this library; `lambdas` must
 * point to `count` readable values when `count > 0`.
 */
enum GistStatus gist_config_set_blend(struct GistConfig *config,
                                      double lambda0,
                                      const double *lambdas,
                                      size_t count);

/**
 * Loads label masks for region-wise stylization; pass two null paths to
 * clear.  Masks must both be present or both absent, matching their images'
 * dimensions.
 *
 * # Safety
 * `config` must be null or a live handle from this library; each path must
 * be null or a NUL-terminated string valid for reads.
 */
enum GistStatus gist_config_set_masks(struct GistConfig *config,
                                      const char *content_mask_path,
                                      const char *style_mask_path);

/**
 * Stylizes `content` with one style image.
 *
 * # Safety
 * `content`, `style`, and `config` must be null or live handles from this
 * library; `out` must be a valid location to store a pointer.
 */
enum GistStatus gist_stylize(const struct GistImage *content,
                             const struct GistImage *style,
                             const struct GistConfig *config,
                             struct GistImage **out);

/**
 * Stylizes `content` with several styles under the configured interpolation
 * weights.
 *
 * # Safety
 * `content` and `config` must be null or live handles from this library;
 * `styles` must point to `style_count` readable handle pointers, each null
 * or live; `out` must be a valid location to store a pointer.
 */
enum GistStatus gist_stylize_multi(const struct GistImage *content,
                                   const struct GistImage *const *styles,
                                   size_t style_count,
                                   const struct GistConfig *config,
                                   struct GistImage **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* GIST_H */

//! Training-free style transfer over multiscale geometric representations.
//!
//! Images are decomposed into subbands with a decimated or stationary wavelet
//! transform, or with a contourlet transform (Laplacian pyramid plus a
//! directional filter bank).  Per-subband channel statistics of the content
//! are moved onto those of the style with the closed-form optimal transport
//! map between Gaussians, and the stylized image is synthesized back from the
//! aligned subbands.  An edge tangent flow mode replaces detail alignment
//! with stroke-like detail fusion for artistic styles.
//!
//! The crate is organized bottom-up:
//!
//! * [`image`] / [`io`]: planar image tensors, PNG/PPM codecs, masks.
//! * [`tensor`] / [`transform`]: double-precision subband containers and the
//!   common multiscale transform interface.
//! * [`wavelet`], [`contourlet`]: the two transform families.
//! * [`transport`]: Gaussian optimal transport in closed form.
//! * [`pipeline`]: the stylization loop (single style, blends, masks).
//! * [`etf`]: edge tangent flow and the artistic mode.
//! * [`metrics`], [`harness`], [`fixtures`]: SSIM, batch runs with CSV
//!   reports, and deterministic sample data.

pub mod contourlet;
pub mod error;
pub mod etf;
pub mod fixtures;
pub mod harness;
pub mod image;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod tensor;
pub mod transform;
pub mod transport;
pub mod wavelet;

pub use error::{GistError, Result};

//! Spherical microphone array processing.
//!
//! The crate covers the full chain from a rigid-sphere microphone array to
//! per-bin direction-of-arrival estimates:
//!
//! * [`sh`] — complex spherical harmonics and ACN-indexed coefficient vectors.
//! * [`special`] — spherical Bessel/Hankel functions and rigid-sphere radial
//!   functions.
//! * [`geometry`] / [`encoder`] — array descriptions and regularized
//!   plane-wave-decomposition encoding with its noise-gain/distortion
//!   diagnostics.
//! * [`room`] — image-method simulation of a single source in a shoebox room,
//!   SNR-controlled noise injection and per-bin direct-to-reverberant labels.
//! * [`stft`] / [`covariance`] — time-frequency analysis and local
//!   autocorrelation matrices with their singular values.
//! * [`nn`] / [`dpd`] — direct-path-dominance decisions: the classical
//!   singular-value ratio test, a small trainable classifier, the
//!   distortion-informed weight and top-bin selection.
//! * [`doa`] — subspace (MUSIC) spectra over a spherical steering grid and the
//!   aggregate DOA error metric.
//! * [`pipeline`] — batch orchestration: dataset generation, training,
//!   regularization-sweep evaluation and CSV report emission.

pub mod covariance;
pub mod doa;
pub mod dpd;
pub mod encoder;
pub mod error;
mod fft_util;
pub mod geometry;
pub mod nn;
pub mod pipeline;
pub mod room;
pub mod sh;
pub mod signal;
pub mod special;
pub mod stft;
pub mod wav;

pub use error::{Error, Result};

/// Speed of sound in air, m/s.
pub const SPEED_OF_SOUND: f64 = 343.0;

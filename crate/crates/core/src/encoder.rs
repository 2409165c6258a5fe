//! Regularized plane-wave-decomposition encoding.
//!
//! The microphone model is `p = Y B a + n`; encoding inverts it per frequency
//! as `â = C (YB)† p` with a diagonal regularization matrix `C`. Because `B`
//! is diagonal and free of zeros for a rigid sphere, `(YB)† = B⁻¹ Y†`, so the
//! direction-dependent pseudo-inverse `Y†` is computed once per geometry and
//! reused across frequencies.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::sh::{sh_matrix, Direction, ShIndex, ShVector};
use crate::special::{radial_rigid, RadialFunctions};
use crate::SPEED_OF_SOUND;

/// Relative singular-value floor below which the steering matrix is treated
/// as rank-deficient.
const COND_LIMIT: f64 = 1e-8;

/// Regularization profile for the encoding matrix `C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegularizationProfile {
    /// Tikhonov gains `c_n = |b_n|²/(|b_n|² + λ²)`.
    Tikhonov { lambda: f64 },
}

impl RegularizationProfile {
    pub fn tikhonov(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "regularization lambda must be >= 0, got {lambda}"
            )));
        }
        Ok(Self::Tikhonov { lambda })
    }

    pub fn lambda(&self) -> f64 {
        match self {
            Self::Tikhonov { lambda } => *lambda,
        }
    }

    /// Per-order gains `c_n` for `n = 0..=radial.order()`.
    pub fn order_gains(&self, radial: &RadialFunctions) -> Vec<f64> {
        match self {
            Self::Tikhonov { lambda } => tikhonov_gains(radial, *lambda),
        }
    }
}

/// Tikhonov gains `c_n = |b_n|²/(|b_n|² + λ²)`, one per order.
pub fn tikhonov_gains(radial: &RadialFunctions, lambda: f64) -> Vec<f64> {
    radial
        .values()
        .iter()
        .map(|b| {
            let mag2 = b.norm_sqr();
            mag2 / (mag2 + lambda * lambda)
        })
        .collect()
}

/// The per-frequency encoding matrix `C (YB)†` together with its diagnostics.
#[derive(Debug, Clone)]
pub struct EncodingOperator {
    frequency: f64,
    order: u32,
    matrix: DMatrix<Complex64>,
    gains: Vec<f64>,
    dist_pw: f64,
    noise_gain: f64,
}

impl EncodingOperator {
    /// Assemble an operator from an explicit matrix and per-order gains; the
    /// diagnostics are derived. Mostly useful for tests and synthetic cases.
    pub fn from_parts(
        frequency: f64,
        order: u32,
        matrix: DMatrix<Complex64>,
        gains: Vec<f64>,
    ) -> Result<Self> {
        if matrix.nrows() != ShIndex::count(order) {
            return Err(Error::Dimension(format!(
                "operator matrix has {} rows, order {order} needs {}",
                matrix.nrows(),
                ShIndex::count(order)
            )));
        }
        if gains.len() != order as usize + 1 {
            return Err(Error::Dimension(format!(
                "got {} gains for order {order}",
                gains.len()
            )));
        }
        let dist_pw = plane_wave_distortion(&gains);
        let noise_gain = matrix.norm_squared() / matrix.ncols() as f64;
        Ok(Self {
            frequency,
            order,
            matrix,
            gains,
            dist_pw,
            noise_gain,
        })
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// `(N+1)² × Q` encoding matrix `C (YB)†`.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Regularization gains `c_n`, one per order `0..=N`.
    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    /// Direction-independent distortion of a unit plane wave at this
    /// frequency and regularization.
    pub fn dist_pw(&self) -> f64 {
        self.dist_pw
    }

    /// White-noise amplification `E‖C(YB)†n‖² / E‖n‖² = ‖C(YB)†‖²_F / Q`.
    pub fn noise_gain(&self) -> f64 {
        self.noise_gain
    }

    /// Encode one microphone frame into Ambisonics coefficients.
    pub fn encode(&self, mic_frame: &[Complex64]) -> Result<ShVector> {
        if mic_frame.len() != self.matrix.ncols() {
            return Err(Error::Dimension(format!(
                "frame has {} channels, operator expects {}",
                mic_frame.len(),
                self.matrix.ncols()
            )));
        }
        let p = DVector::from_column_slice(mic_frame);
        let a = &self.matrix * p;
        ShVector::from_coeffs(self.order, a.iter().copied().collect())
    }
}

/// Per-geometry encoder: holds the steering matrix `Y` and its SVD-based
/// pseudo-inverse, and mints per-frequency [`EncodingOperator`]s.
#[derive(Debug, Clone)]
pub struct PwdEncoder {
    geom: ArrayGeometry,
    order: u32,
    sound_speed: f64,
    steering: DMatrix<Complex64>,
    steering_pinv: DMatrix<Complex64>,
}

impl PwdEncoder {
    pub fn new(geom: ArrayGeometry, order: u32) -> Result<Self> {
        Self::with_sound_speed(geom, order, SPEED_OF_SOUND)
    }

    pub fn with_sound_speed(geom: ArrayGeometry, order: u32, sound_speed: f64) -> Result<Self> {
        if !geom.supports_order(order) {
            return Err(Error::InvalidInput(format!(
                "{} microphones cannot resolve order {order} ({} harmonics)",
                geom.num_mics(),
                ShIndex::count(order)
            )));
        }
        let y = sh_matrix(geom.mic_dirs(), order)?;
        let svd = y.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if !(smin > COND_LIMIT * smax) {
            return Err(Error::IllConditioned {
                ratio: smin / smax,
                limit: COND_LIMIT,
            });
        }
        let u = svd.u.as_ref().expect("svd with u");
        let v_t = svd.v_t.as_ref().expect("svd with v_t");
        let sigma_inv = DMatrix::<Complex64>::from_diagonal(
            &svd.singular_values.map(|s| Complex64::new(1.0 / s, 0.0)),
        );
        let pinv = v_t.adjoint() * sigma_inv * u.adjoint();
        Ok(Self {
            geom,
            order,
            sound_speed,
            steering: y,
            steering_pinv: pinv,
        })
    }

    pub fn geometry(&self) -> &ArrayGeometry {
        &self.geom
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Microphone steering matrix `Y`, shape `Q × (N+1)²`.
    pub fn steering(&self) -> &DMatrix<Complex64> {
        &self.steering
    }

    /// Radial functions at a frequency, microphones flush on the sphere
    /// surface (`kr = kr_s`).
    pub fn radial_at(&self, frequency: f64) -> Result<RadialFunctions> {
        let kr = 2.0 * std::f64::consts::PI * frequency * self.geom.radius() / self.sound_speed;
        radial_rigid(self.order, kr, kr)
    }

    /// Build the encoding operator `C B⁻¹ Y†` for one frequency.
    pub fn operator_at(
        &self,
        frequency: f64,
        reg: RegularizationProfile,
    ) -> Result<EncodingOperator> {
        if !(frequency > 0.0 && frequency.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "frequency must be positive, got {frequency}"
            )));
        }
        let radial = self.radial_at(frequency)?;
        let gains = reg.order_gains(&radial);
        let mut matrix = self.steering_pinv.clone();
        for acn in 0..matrix.nrows() {
            let n = ShIndex::from_acn(acn).order();
            let scale = Complex64::new(gains[n as usize], 0.0) / radial.get(n);
            for q in 0..matrix.ncols() {
                matrix[(acn, q)] *= scale;
            }
        }
        EncodingOperator::from_parts(frequency, self.order, matrix, gains)
    }
}

/// One-shot operator construction; prefer [`PwdEncoder`] when several
/// frequencies share a geometry.
pub fn build_encoder(
    geom: &ArrayGeometry,
    order: u32,
    frequency: f64,
    reg: RegularizationProfile,
) -> Result<EncodingOperator> {
    PwdEncoder::new(geom.clone(), order)?.operator_at(frequency, reg)
}

/// Encoding distortion `‖(C − I)a‖² / ‖a‖²` for per-order gains `c_n`.
pub fn distortion(gains: &[f64], a: &ShVector) -> Result<f64> {
    if gains.len() != a.order() as usize + 1 {
        return Err(Error::Dimension(format!(
            "{} gains vs coefficient order {}",
            gains.len(),
            a.order()
        )));
    }
    let denom = a.norm_sq();
    if denom == 0.0 {
        return Err(Error::InvalidInput(
            "distortion undefined for zero coefficient vector".into(),
        ));
    }
    let mut num = 0.0;
    for (acn, c) in a.coeffs().iter().enumerate() {
        let n = ShIndex::from_acn(acn).order() as usize;
        let g = gains[n] - 1.0;
        num += g * g * c.norm_sqr();
    }
    Ok(num / denom)
}

/// Distortion of a unit plane wave, which the addition theorem makes
/// direction-independent: `Σ_n (2n+1)(1 − c_n)² / (N+1)²`.
pub fn plane_wave_distortion(gains: &[f64]) -> f64 {
    let count: f64 = gains
        .iter()
        .enumerate()
        .map(|(n, _)| 2.0 * n as f64 + 1.0)
        .sum();
    let num: f64 = gains
        .iter()
        .enumerate()
        .map(|(n, c)| (2.0 * n as f64 + 1.0) * (1.0 - c) * (1.0 - c))
        .sum();
    num / count
}

/// SNR anchors for the λ map: (SNR dB, λ).
const LAMBDA_ANCHORS: [(f64, f64); 3] = [(5.0, 1.5), (10.0, 0.5), (20.0, 0.05)];

/// Largest λ the map will return.
const LAMBDA_CAP: f64 = 3.0;

/// Regularization level for a given data SNR: piecewise log-linear
/// interpolation through the anchor points, extrapolated with the end
/// segments and capped to `[0, 3]`.
pub fn lambda_for_snr(snr_db: f64) -> f64 {
    let pick = |a: (f64, f64), b: (f64, f64)| -> f64 {
        let t = (snr_db - a.0) / (b.0 - a.0);
        (a.1.ln() + t * (b.1.ln() - a.1.ln())).exp()
    };
    let lam = if snr_db <= LAMBDA_ANCHORS[1].0 {
        pick(LAMBDA_ANCHORS[0], LAMBDA_ANCHORS[1])
    } else {
        pick(LAMBDA_ANCHORS[1], LAMBDA_ANCHORS[2])
    };
    lam.clamp(0.0, LAMBDA_CAP)
}

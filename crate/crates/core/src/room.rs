//! Image-method simulation of a single source in a shoebox room captured by
//! a rigid-sphere array, with SNR-controlled noise injection and per-bin
//! direct-to-reverberant labels.
//!
//! Each image source is treated as a far-field plane wave with a `1/d`
//! spherical spreading loss and an exact frequency-domain delay; the
//! microphone pressure per frequency is `Σ_nm Y_n^m(Ω_q) b_n(kr) [Y_n^m(Ω_i)]*`
//! per image, synthesized over the FFT grid of the whole signal.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft_util::{irfft, rfft};
use crate::geometry::ArrayGeometry;
use crate::sh::{sh_matrix, sh_row, Direction, ShIndex};
use crate::special::radial_rigid;
use crate::stft::{ChannelKind, StftConfig};
use crate::SPEED_OF_SOUND;

/// Largest simulation order the radial functions are validated for.
const MAX_SIM_ORDER: u32 = 8;

/// Shoebox room with a target reverberation time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoomSpec {
    dims: [f64; 3],
    t60: f64,
    max_image_order: u32,
}

impl RoomSpec {
    pub fn new(dims: [f64; 3], t60: f64, max_image_order: u32) -> Result<Self> {
        if dims.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::InvalidInput(format!(
                "room dimensions must be positive, got {dims:?}"
            )));
        }
        if !(t60.is_finite() && t60 > 0.0) {
            return Err(Error::InvalidInput(format!("T60 must be positive, got {t60}")));
        }
        Ok(Self {
            dims,
            t60,
            max_image_order,
        })
    }

    pub fn dims(&self) -> [f64; 3] {
        self.dims
    }

    pub fn t60(&self) -> f64 {
        self.t60
    }

    pub fn max_image_order(&self) -> u32 {
        self.max_image_order
    }

    pub fn volume(&self) -> f64 {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn surface_area(&self) -> f64 {
        let [x, y, z] = self.dims;
        2.0 * (x * y + x * z + y * z)
    }

    pub fn contains(&self, p: [f64; 3]) -> bool {
        p.iter()
            .zip(&self.dims)
            .all(|(v, d)| *v > 0.0 && *v < *d)
    }
}

/// Mono source at a position inside the room.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    pub position: [f64; 3],
    pub signal: Vec<f64>,
}

impl SourceSpec {
    pub fn new(position: [f64; 3], signal: Vec<f64>) -> Result<Self> {
        if signal.is_empty() {
            return Err(Error::InvalidInput("source signal is empty".into()));
        }
        if signal.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("source signal has non-finite samples".into()));
        }
        Ok(Self { position, signal })
    }
}

/// One mirrored copy of the source.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageSource {
    pub position: [f64; 3],
    pub reflection_order: u32,
    pub amplitude: f64,
    pub direction_from_array: Direction,
    pub distance: f64,
}

/// Uniform wall reflection coefficient from Sabine's formula:
/// `α = 0.161 V / (S T60)`, reflection `= √(1 − α)`.
pub fn t60_to_reflection(room: &RoomSpec) -> Result<f64> {
    let alpha = 0.161 * room.volume() / (room.surface_area() * room.t60());
    if alpha >= 1.0 {
        return Err(Error::InvalidInput(format!(
            "T60 = {} s is unreachable in this room (implied absorption {alpha:.3} >= 1)",
            room.t60()
        )));
    }
    Ok((1.0 - alpha).sqrt())
}

/// All image sources up to `room.max_image_order()` total reflections,
/// sorted by distance from the array center. With `reflection == 0` only the
/// order-0 (true source) image remains.
pub fn image_sources(
    room: &RoomSpec,
    reflection: f64,
    source: [f64; 3],
    array_center: [f64; 3],
) -> Result<Vec<ImageSource>> {
    if !room.contains(source) {
        return Err(Error::InvalidInput(format!(
            "source {source:?} is not strictly inside the room"
        )));
    }
    if !room.contains(array_center) {
        return Err(Error::InvalidInput(format!(
            "array center {array_center:?} is not strictly inside the room"
        )));
    }
    if !(0.0..=1.0).contains(&reflection) {
        return Err(Error::InvalidInput(format!(
            "reflection coefficient {reflection} outside [0, 1]"
        )));
    }
    let k = room.max_image_order() as i64;
    // Mirror positions along one axis: even index u puts the image at
    // s + u·L, odd u at (u+1)·L − s; either way |u| wall reflections.
    let axis_pos = |u: i64, s: f64, l: f64| -> f64 {
        if u.rem_euclid(2) == 0 {
            s + u as f64 * l
        } else {
            (u + 1) as f64 * l - s
        }
    };
    let mut images = Vec::new();
    for u in -k..=k {
        for v in -(k - u.abs())..=(k - u.abs()) {
            let rem = k - u.abs() - v.abs();
            for w in -rem..=rem {
                let order = (u.abs() + v.abs() + w.abs()) as u32;
                let amplitude = reflection.powi(order as i32);
                if amplitude == 0.0 && order > 0 {
                    continue;
                }
                let pos = [
                    axis_pos(u, source[0], room.dims()[0]),
                    axis_pos(v, source[1], room.dims()[1]),
                    axis_pos(w, source[2], room.dims()[2]),
                ];
                let delta = [
                    pos[0] - array_center[0],
                    pos[1] - array_center[1],
                    pos[2] - array_center[2],
                ];
                let distance =
                    (delta[0] * delta[0] + delta[1] * delta[1] + delta[2] * delta[2]).sqrt();
                let direction_from_array = Direction::from_vector(delta)?;
                images.push(ImageSource {
                    position: pos,
                    reflection_order: order,
                    amplitude,
                    direction_from_array,
                    distance,
                });
            }
        }
    }
    images.sort_by(|a, b| {
        a.distance
            .partial_cmp(&b.distance)
            .unwrap()
            .then(a.reflection_order.cmp(&b.reflection_order))
            .then(a.position.partial_cmp(&b.position).unwrap())
    });
    Ok(images)
}

/// Rendered microphone signals plus the ground-truth byproducts used for
/// labeling and evaluation.
#[derive(Debug, Clone)]
pub struct SimOutput {
    /// Q channels of microphone pressure.
    pub mic_signals: Vec<Vec<f64>>,
    /// Same, rendered from the order-0 image alone.
    pub direct_mic_signals: Vec<Vec<f64>>,
    /// Omnidirectional (order-0 Ambisonics) channel of the full field.
    pub omni_total: Vec<f64>,
    /// Omnidirectional channel of the direct field alone.
    pub omni_direct: Vec<f64>,
    /// Direction from the array center to the true source.
    pub true_doa: Direction,
    /// SNR this output was rendered/noised at; `f64::INFINITY` = noiseless.
    pub snr_db: f64,
    pub sample_rate: u32,
}

impl SimOutput {
    pub fn num_mics(&self) -> usize {
        self.mic_signals.len()
    }

    pub fn len(&self) -> usize {
        self.mic_signals.first().map_or(0, |c| c.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Frequency-domain rendering of the image set over the FFT grid of the full
/// signal. `sim_order` should exceed the later analysis order to keep
/// truncation error out of the inverse path.
pub fn render_mic_signals(
    images: &[ImageSource],
    src_signal: &[f64],
    geom: &ArrayGeometry,
    sim_order: u32,
    sample_rate: u32,
) -> Result<SimOutput> {
    if images.is_empty() {
        return Err(Error::InvalidInput("no image sources".into()));
    }
    if src_signal.is_empty() {
        return Err(Error::InvalidInput("empty source signal".into()));
    }
    if sim_order > MAX_SIM_ORDER {
        return Err(Error::InvalidInput(format!(
            "simulation order {sim_order} above validated limit {MAX_SIM_ORDER}"
        )));
    }
    let fs = sample_rate as f64;
    let kr_nyquist = std::f64::consts::PI * fs * geom.radius() / SPEED_OF_SOUND;
    if kr_nyquist > 50.0 {
        return Err(Error::InvalidInput(format!(
            "kr = {kr_nyquist:.1} at Nyquist exceeds the stable special-function range"
        )));
    }
    let direct = images
        .iter()
        .filter(|i| i.reflection_order == 0)
        .collect::<Vec<_>>();
    if direct.len() != 1 {
        return Err(Error::InvalidInput(format!(
            "expected exactly one order-0 image, found {}",
            direct.len()
        )));
    }
    let direct = direct[0];

    let max_dist = images.iter().map(|i| i.distance).fold(0.0, f64::max);
    let max_delay = (max_dist / SPEED_OF_SOUND * fs).ceil() as usize;
    let out_len = src_signal.len() + max_delay + 512;
    let fft_len = out_len.next_multiple_of(4096);

    let mut padded = vec![0.0; fft_len];
    padded[..src_signal.len()].copy_from_slice(src_signal);
    let src_spec = rfft(&padded);

    let q = geom.num_mics();
    let n_coeffs = ShIndex::count(sim_order);
    let y_mic = sh_matrix(geom.mic_dirs(), sim_order)?;
    // Conjugated steering per image, flattened image-major.
    let y_img: Vec<Complex64> = images
        .iter()
        .flat_map(|img| {
            sh_row(sim_order, &img.direction_from_array)
                .into_iter()
                .map(|y| y.conj())
        })
        .collect();
    let y_direct: Vec<Complex64> = sh_row(sim_order, &direct.direction_from_array)
        .into_iter()
        .map(|y| y.conj())
        .collect();

    let n_bins = fft_len / 2 + 1;
    // Per bin: (Q mic pressures, Q direct pressures, omni total, omni direct).
    let per_bin: Vec<(Vec<Complex64>, Vec<Complex64>, Complex64, Complex64)> = (0..n_bins)
        .into_par_iter()
        .map(|bin| {
            if bin == 0 || src_spec[bin] == Complex64::ZERO {
                return (
                    vec![Complex64::ZERO; q],
                    vec![Complex64::ZERO; q],
                    Complex64::ZERO,
                    Complex64::ZERO,
                );
            }
            let f = bin as f64 * fs / fft_len as f64;
            let kr = 2.0 * std::f64::consts::PI * f * geom.radius() / SPEED_OF_SOUND;
            let radial = radial_rigid(sim_order, kr, kr).expect("kr > 0");
            // Plane-wave density coefficients of the full and direct fields.
            let mut w = vec![Complex64::ZERO; n_coeffs];
            for (i, img) in images.iter().enumerate() {
                let phase = -2.0 * std::f64::consts::PI * f * img.distance / SPEED_OF_SOUND;
                let g = Complex64::from_polar(img.amplitude / img.distance, phase);
                let row = &y_img[i * n_coeffs..(i + 1) * n_coeffs];
                for (acc, y) in w.iter_mut().zip(row) {
                    *acc += g * y;
                }
            }
            let phase_d = -2.0 * std::f64::consts::PI * f * direct.distance / SPEED_OF_SOUND;
            let g_d = Complex64::from_polar(direct.amplitude / direct.distance, phase_d);

            let s = src_spec[bin];
            let omni_total = s * w[0];
            let omni_direct = s * g_d * y_direct[0];

            // Fold in the radial functions, then project onto microphones.
            for (acn, v) in w.iter_mut().enumerate() {
                let n = ShIndex::from_acn(acn).order();
                *v *= radial.get(n);
            }
            let mut mic = vec![Complex64::ZERO; q];
            for (qq, m) in mic.iter_mut().enumerate() {
                let mut acc = Complex64::ZERO;
                for (acn, v) in w.iter().enumerate() {
                    acc += y_mic[(qq, acn)] * v;
                }
                *m = s * acc;
            }
            let mut mic_direct = vec![Complex64::ZERO; q];
            for (qq, m) in mic_direct.iter_mut().enumerate() {
                let mut acc = Complex64::ZERO;
                for (acn, y) in y_direct.iter().enumerate() {
                    let n = ShIndex::from_acn(acn).order();
                    acc += y_mic[(qq, acn)] * radial.get(n) * g_d * y;
                }
                *m = s * acc;
            }
            (mic, mic_direct, omni_total, omni_direct)
        })
        .collect();

    // Assemble per-channel spectra and inverse-transform.
    let assemble = |pick: &dyn Fn(usize) -> Complex64| -> Vec<f64> {
        let spec: Vec<Complex64> = (0..n_bins).map(pick).collect();
        let mut t = irfft(&spec, fft_len);
        t.truncate(out_len);
        t
    };
    let mic_signals: Vec<Vec<f64>> = (0..q)
        .map(|qq| assemble(&|bin| per_bin[bin].0[qq]))
        .collect();
    let direct_mic_signals: Vec<Vec<f64>> = (0..q)
        .map(|qq| assemble(&|bin| per_bin[bin].1[qq]))
        .collect();
    let omni_total = assemble(&|bin| per_bin[bin].2);
    let omni_direct = assemble(&|bin| per_bin[bin].3);

    Ok(SimOutput {
        mic_signals,
        direct_mic_signals,
        omni_total,
        omni_direct,
        true_doa: direct.direction_from_array,
        snr_db: f64::INFINITY,
        sample_rate,
    })
}

/// Add i.i.d. Gaussian noise to the microphone channels so that the mean
/// per-channel signal power over noise power hits `snr_db`. Deterministic
/// given `seed`; `f64::INFINITY` returns the input unchanged.
pub fn add_noise_snr(sim: &SimOutput, snr_db: f64, seed: u64) -> Result<SimOutput> {
    if snr_db == f64::INFINITY {
        return Ok(sim.clone());
    }
    let q = sim.num_mics();
    let len = sim.len();
    let total_energy: f64 = sim
        .mic_signals
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>())
        .sum();
    if total_energy == 0.0 {
        return Err(Error::InvalidInput("cannot set an SNR on silent signals".into()));
    }
    let mean_power = total_energy / (q * len) as f64;
    let noise_var = mean_power / 10f64.powf(snr_db / 10.0);
    let sigma = noise_var.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = move || -> f64 {
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let mut out = sim.clone();
    for ch in &mut out.mic_signals {
        for v in ch.iter_mut() {
            *v += sigma * gauss();
        }
    }
    out.snr_db = snr_db;
    Ok(out)
}

/// Per-bin direct-path labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinLabels {
    frames: usize,
    bins: usize,
    data: Vec<bool>,
}

impl BinLabels {
    pub fn new(frames: usize, bins: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != frames * bins {
            return Err(Error::Dimension(format!(
                "{} labels for {frames}x{bins} grid",
                data.len()
            )));
        }
        Ok(Self {
            frames,
            bins,
            data,
        })
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn get(&self, frame: usize, bin: usize) -> bool {
        self.data[frame * self.bins + bin]
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn count_positive(&self) -> usize {
        self.data.iter().filter(|v| **v).count()
    }
}

/// DRR threshold above which a bin counts as direct-path dominated
/// (linear energy ratio).
pub const DRR_THRESHOLD: f64 = 0.7;

/// Per-bin direct-to-reverberant labels on the omnidirectional ground-truth
/// channel: `DRR = |D|² / |T − D|²` per STFT bin, label 1 iff
/// `DRR > 0.7`. Bins with zero reverberant but nonzero direct energy label 1
/// (infinite DRR); fully silent bins label 0.
pub fn drr_labels(sim: &SimOutput, cfg: &StftConfig) -> Result<BinLabels> {
    let total = crate::stft::stft(
        &[sim.omni_total.clone()],
        cfg,
        ChannelKind::Ambisonics,
    )?;
    let direct = crate::stft::stft(
        &[sim.omni_direct.clone()],
        cfg,
        ChannelKind::Ambisonics,
    )?;
    let frames = total.frames();
    let bins = total.bins();
    let mut data = Vec::with_capacity(frames * bins);
    for f in 0..frames {
        for b in 0..bins {
            let d = direct.get(f, b, 0);
            let t = total.get(f, b, 0);
            let e_dir = d.norm_sqr();
            let e_rev = (t - d).norm_sqr();
            data.push(e_dir > DRR_THRESHOLD * e_rev);
        }
    }
    BinLabels::new(frames, bins, data)
}

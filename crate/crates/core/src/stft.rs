//! Short-time Fourier analysis with a constant-overlap-add window, the
//! time-frequency tensor type, and frequency-band selection.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// STFT framing parameters. The analysis window is a periodic Hann, which
/// satisfies constant overlap-add whenever `hop` divides `window_len` and
/// `hop ≤ window_len/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StftConfig {
    window_len: usize,
    hop: usize,
    sample_rate: u32,
}

impl StftConfig {
    pub fn new(window_len: usize, hop: usize, sample_rate: u32) -> Result<Self> {
        if window_len == 0 || window_len % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "window length must be even and positive, got {window_len}"
            )));
        }
        if hop == 0 || hop > window_len / 2 || window_len % hop != 0 {
            return Err(Error::InvalidInput(format!(
                "hop {hop} breaks constant overlap-add for window {window_len}"
            )));
        }
        if sample_rate == 0 {
            return Err(Error::InvalidInput("sample rate must be positive".into()));
        }
        Ok(Self {
            window_len,
            hop,
            sample_rate,
        })
    }

    /// 512-sample window, 50% overlap, 16 kHz.
    pub fn default_16k() -> Self {
        Self {
            window_len: 512,
            hop: 256,
            sample_rate: 16_000,
        }
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    /// Number of non-negative frequency bins: `window_len/2 + 1`.
    pub fn bins(&self) -> usize {
        self.window_len / 2 + 1
    }

    /// Center frequency of an absolute bin index.
    pub fn bin_hz(&self, bin: usize) -> f64 {
        bin as f64 * self.sample_rate as f64 / self.window_len as f64
    }

    /// Periodic Hann analysis window.
    pub fn window(&self) -> Vec<f64> {
        let n = self.window_len as f64;
        (0..self.window_len)
            .map(|i| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / n).cos()))
            .collect()
    }

    /// Constant value of the shifted-window sum at this hop.
    pub fn cola_gain(&self) -> f64 {
        self.window_len as f64 / (2.0 * self.hop as f64)
    }
}

/// What the channel axis of a [`TfTensor`] means.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    /// Raw microphone channels.
    Mic,
    /// ACN-ordered Ambisonics channels.
    Ambisonics,
}

/// STFT-domain data: `frames × bins × channels` complex values with the
/// mapping back to absolute frequency. `bin_offset` is the absolute STFT bin
/// index of local bin 0, so band-limited tensors keep their frequency axis.
#[derive(Debug, Clone)]
pub struct TfTensor {
    cfg: StftConfig,
    kind: ChannelKind,
    frames: usize,
    bins: usize,
    channels: usize,
    bin_offset: usize,
    data: Vec<Complex64>,
}

impl TfTensor {
    pub(crate) fn zeros(
        cfg: StftConfig,
        kind: ChannelKind,
        frames: usize,
        bins: usize,
        channels: usize,
        bin_offset: usize,
    ) -> Self {
        Self {
            cfg,
            kind,
            frames,
            bins,
            channels,
            bin_offset,
            data: vec![Complex64::ZERO; frames * bins * channels],
        }
    }

    #[inline]
    fn index(&self, frame: usize, bin: usize, channel: usize) -> usize {
        (frame * self.bins + bin) * self.channels + channel
    }

    pub fn get(&self, frame: usize, bin: usize, channel: usize) -> Complex64 {
        self.data[self.index(frame, bin, channel)]
    }

    pub(crate) fn set(&mut self, frame: usize, bin: usize, channel: usize, v: Complex64) {
        let i = self.index(frame, bin, channel);
        self.data[i] = v;
    }

    /// All channels of one time-frequency bin, contiguous.
    pub fn snapshot(&self, frame: usize, bin: usize) -> &[Complex64] {
        let start = self.index(frame, bin, 0);
        &self.data[start..start + self.channels]
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn bin_offset(&self) -> usize {
        self.bin_offset
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn config(&self) -> &StftConfig {
        &self.cfg
    }

    /// Center frequency of a local bin index.
    pub fn bin_hz(&self, local_bin: usize) -> f64 {
        self.cfg.bin_hz(local_bin + self.bin_offset)
    }
}

/// Multi-channel STFT. All channels must share the same length, at least one
/// window long.
pub fn stft(signals: &[Vec<f64>], cfg: &StftConfig, kind: ChannelKind) -> Result<TfTensor> {
    if signals.is_empty() {
        return Err(Error::InvalidInput("no channels".into()));
    }
    let len = signals[0].len();
    if signals.iter().any(|s| s.len() != len) {
        return Err(Error::Dimension("channels differ in length".into()));
    }
    if len < cfg.window_len() {
        return Err(Error::InvalidInput(format!(
            "signal length {len} shorter than window {}",
            cfg.window_len()
        )));
    }
    let frames = (len - cfg.window_len()) / cfg.hop() + 1;
    let bins = cfg.bins();
    let window = cfg.window();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(cfg.window_len());
    let mut out = TfTensor::zeros(*cfg, kind, frames, bins, signals.len(), 0);
    let mut buf = vec![Complex64::ZERO; cfg.window_len()];
    for (ch, signal) in signals.iter().enumerate() {
        for frame in 0..frames {
            let start = frame * cfg.hop();
            for (i, w) in window.iter().enumerate() {
                buf[i] = Complex64::new(signal[start + i] * w, 0.0);
            }
            fft.process(&mut buf);
            for (bin, v) in buf[..bins].iter().enumerate() {
                out.set(frame, bin, ch, *v);
            }
        }
    }
    Ok(out)
}

/// Inverse STFT by plain overlap-add, valid because the analysis window is
/// constant-overlap-add. Exact (to rounding) for samples covered by a full
/// set of overlapping windows; the first and last `window_len − hop` samples
/// are attenuated edge regions.
pub fn istft(t: &TfTensor) -> Result<Vec<Vec<f64>>> {
    let cfg = t.config();
    if t.bin_offset() != 0 || t.bins() != cfg.bins() {
        return Err(Error::InvalidInput(
            "inverse STFT needs the full, unbanded bin range".into(),
        ));
    }
    let n = cfg.window_len();
    let len = (t.frames() - 1) * cfg.hop() + n;
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(n);
    let scale = 1.0 / (n as f64 * cfg.cola_gain());
    let mut out = vec![vec![0.0; len]; t.channels()];
    let mut buf = vec![Complex64::ZERO; n];
    for ch in 0..t.channels() {
        for frame in 0..t.frames() {
            for bin in 0..t.bins() {
                buf[bin] = t.get(frame, bin, ch);
            }
            for k in 1..n / 2 {
                buf[n - k] = t.get(frame, k, ch).conj();
            }
            fft.process(&mut buf);
            let start = frame * cfg.hop();
            for (i, v) in buf.iter().enumerate() {
                out[ch][start + i] += v.re * scale;
            }
        }
    }
    Ok(out)
}

/// Restrict a tensor to bins whose center frequency lies in `[lo_hz, hi_hz]`.
pub fn band_select(t: &TfTensor, lo_hz: f64, hi_hz: f64) -> Result<TfTensor> {
    let cfg = t.config();
    let nyquist = cfg.sample_rate() as f64 / 2.0;
    if !(lo_hz < hi_hz) || lo_hz < 0.0 || hi_hz > nyquist {
        return Err(Error::InvalidInput(format!(
            "band [{lo_hz}, {hi_hz}] is not an increasing range within Nyquist {nyquist}"
        )));
    }
    let step = cfg.sample_rate() as f64 / cfg.window_len() as f64;
    let lo_bin = (lo_hz / step).ceil() as usize;
    let hi_bin = (hi_hz / step).floor() as usize;
    let lo_bin = lo_bin.max(t.bin_offset());
    let hi_bin = hi_bin.min(t.bin_offset() + t.bins() - 1);
    if lo_bin > hi_bin {
        return Err(Error::InvalidInput(format!(
            "band [{lo_hz}, {hi_hz}] contains no bins of this tensor"
        )));
    }
    let bins = hi_bin - lo_bin + 1;
    let mut out = TfTensor::zeros(*cfg, t.kind(), t.frames(), bins, t.channels(), lo_bin);
    for frame in 0..t.frames() {
        for bin in 0..bins {
            for ch in 0..t.channels() {
                out.set(
                    frame,
                    bin,
                    ch,
                    t.get(frame, bin + lo_bin - t.bin_offset(), ch),
                );
            }
        }
    }
    Ok(out)
}

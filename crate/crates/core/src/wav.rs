//! Multichannel WAV I/O: 16-bit PCM and 32-bit float.

use std::io::Cursor;
use std::path::Path;

use crate::error::{Error, Result};

/// Decoded audio: per-channel sample vectors in `[-1, 1]` nominal range.
#[derive(Debug, Clone, PartialEq)]
pub struct WavData {
    pub sample_rate: u32,
    pub channels: Vec<Vec<f64>>,
}

impl WavData {
    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn len(&self) -> usize {
        self.channels.first().map_or(0, |c| c.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn read_from_reader<R: std::io::Read>(reader: hound::WavReader<R>) -> Result<WavData> {
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if channels == 0 {
        return Err(Error::InvalidInput("wav has zero channels".into()));
    }
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(|v| v as f64))
            .collect::<std::result::Result<_, _>>()?,
        (hound::SampleFormat::Int, 16) => reader
            .into_samples::<i16>()
            .map(|s| s.map(|v| v as f64 / 32768.0))
            .collect::<std::result::Result<_, _>>()?,
        (fmt, bits) => {
            return Err(Error::InvalidInput(format!(
                "unsupported wav format: {bits}-bit {fmt:?}; expected 16-bit PCM or 32-bit float"
            )));
        }
    };
    let frames = interleaved.len() / channels;
    let mut out = vec![Vec::with_capacity(frames); channels];
    for (i, s) in interleaved.into_iter().enumerate() {
        out[i % channels].push(s);
    }
    Ok(WavData {
        sample_rate: spec.sample_rate,
        channels: out,
    })
}

pub fn read_wav<P: AsRef<Path>>(path: P) -> Result<WavData> {
    read_from_reader(hound::WavReader::open(path)?)
}

/// Decode a WAV from an in-memory byte buffer.
pub fn read_wav_bytes(bytes: &[u8]) -> Result<WavData> {
    read_from_reader(hound::WavReader::new(Cursor::new(bytes))?)
}

/// Write channels as 32-bit float WAV. All channels must share a length.
pub fn write_wav_f32<P: AsRef<Path>>(
    path: P,
    channels: &[Vec<f64>],
    sample_rate: u32,
) -> Result<()> {
    if channels.is_empty() {
        return Err(Error::InvalidInput("no channels to write".into()));
    }
    let len = channels[0].len();
    if channels.iter().any(|c| c.len() != len) {
        return Err(Error::Dimension("channels differ in length".into()));
    }
    let spec = hound::WavSpec {
        channels: channels.len() as u16,
        sample_rate,
        bits_per_sample: 32,
        sample_format: hound::SampleFormat::Float,
    };
    let mut writer = hound::WavWriter::create(path, spec)?;
    for i in 0..len {
        for ch in channels {
            writer.write_sample(ch[i] as f32)?;
        }
    }
    writer.finalize()?;
    Ok(())
}

/// Write channels as 16-bit PCM WAV, clipping to full scale.
pub fn write_wav_i16<P: AsRef<Path>>(
    path: P,
    channels: &[Vec<f64>],
    sample_rate: u32,
) -> Result<()> {
    if channels.is_empty() {
        return Err(Error::InvalidInput("no channels to write".into()));
    }
    let len = channels[0].len();
    if channels.iter().any(|c| c.len() != len) {
        return Err(Error::Dimension("channels differ in length".into()));
    }
    let spec = hound::WavSpec {
        channels: channels.len() as u16,
        sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec)?;
    for i in 0..len {
        for ch in channels {
            let v = (ch[i] * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
            writer.write_sample(v)?;
        }
    }
    writer.finalize()?;
    Ok(())
}

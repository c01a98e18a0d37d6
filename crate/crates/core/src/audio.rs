//! WAV decoding and conversion to mono 16 kHz floating-point clips.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sample rate every clip is converted to before analysis.
pub const TARGET_RATE: u32 = 16_000;

/// Zero crossings of the interpolation kernel kept on each side of the centre.
const SINC_ZERO_CROSSINGS: usize = 32;
const KAISER_BETA: f64 = 8.6;

/// Mono PCM signal with amplitudes in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioClip {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl AudioClip {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Self {
        Self {
            samples,
            sample_rate,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, s| m.max(s.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleFormat {
    Pcm16,
    Float32,
}

/// Decoded WAV contents before downmixing: one sample vector per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct WavData {
    pub channels: Vec<Vec<f64>>,
    pub sample_rate: u32,
    pub format: SampleFormat,
}

impl WavData {
    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn frames(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }
}

const WAVE_FORMAT_PCM: u16 = 0x0001;
const WAVE_FORMAT_IEEE_FLOAT: u16 = 0x0003;
const WAVE_FORMAT_EXTENSIBLE: u16 = 0xFFFE;

fn codec_name(tag: u16) -> String {
    match tag {
        0x0001 => "PCM".into(),
        0x0002 => "MS ADPCM".into(),
        0x0003 => "IEEE float".into(),
        0x0006 => "A-law".into(),
        0x0007 => "mu-law".into(),
        0x0011 => "IMA ADPCM".into(),
        0x0055 => "MPEG layer 3".into(),
        other => format!("format tag 0x{other:04X}"),
    }
}

fn read_u16(bytes: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([bytes[at], bytes[at + 1]])
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]])
}

struct FmtChunk {
    tag: u16,
    channels: u16,
    sample_rate: u32,
    block_align: u16,
    bits: u16,
}

fn parse_fmt(body: &[u8]) -> Result<FmtChunk> {
    if body.len() < 16 {
        return Err(Error::Format(format!(
            "fmt chunk is {} bytes, expected at least 16",
            body.len()
        )));
    }
    let mut tag = read_u16(body, 0);
    if tag == WAVE_FORMAT_EXTENSIBLE {
        if body.len() < 26 {
            return Err(Error::Format("truncated WAVE_FORMAT_EXTENSIBLE header".into()));
        }
        // First two bytes of the sub-format GUID carry the real codec tag.
        tag = read_u16(body, 24);
    }
    Ok(FmtChunk {
        tag,
        channels: read_u16(body, 2),
        sample_rate: read_u32(body, 4),
        block_align: read_u16(body, 12),
        bits: read_u16(body, 14),
    })
}

/// Decodes a RIFF/WAVE byte buffer holding 16-bit PCM or 32-bit float samples.
///
/// 16-bit samples are divided by 32768. Channels are kept separate; see
/// [`downmix_mono`].
pub fn decode_wav(bytes: &[u8]) -> Result<WavData> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(Error::Format("missing RIFF/WAVE header".into()));
    }

    let mut pos = 12;
    let mut fmt: Option<FmtChunk> = None;
    let mut data: Option<&[u8]> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = read_u32(bytes, pos + 4) as usize;
        let start = pos + 8;
        let end = start
            .checked_add(size)
            .filter(|&e| e <= bytes.len())
            .ok_or_else(|| {
                Error::Format(format!(
                    "chunk {:?} declares {size} bytes but only {} remain",
                    String::from_utf8_lossy(id),
                    bytes.len() - start
                ))
            })?;
        match id {
            b"fmt " => fmt = Some(parse_fmt(&bytes[start..end])?),
            b"data" => {
                data = Some(&bytes[start..end]);
                break;
            }
            _ => {}
        }
        pos = end + (size & 1);
    }

    let fmt = fmt.ok_or_else(|| Error::Format("no fmt chunk before data".into()))?;
    let data = data.ok_or_else(|| Error::Format("no data chunk".into()))?;

    let format = match (fmt.tag, fmt.bits) {
        (WAVE_FORMAT_PCM, 16) => SampleFormat::Pcm16,
        (WAVE_FORMAT_IEEE_FLOAT, 32) => SampleFormat::Float32,
        (tag @ (WAVE_FORMAT_PCM | WAVE_FORMAT_IEEE_FLOAT), bits) => {
            return Err(Error::UnsupportedFormat(format!(
                "{} {bits}-bit",
                codec_name(tag)
            )))
        }
        (tag, _) => return Err(Error::UnsupportedFormat(codec_name(tag))),
    };
    if fmt.channels == 0 {
        return Err(Error::Format("zero channels".into()));
    }
    if fmt.sample_rate == 0 {
        return Err(Error::Format("zero sample rate".into()));
    }
    let channels = fmt.channels as usize;
    let width = (fmt.bits / 8) as usize;
    if fmt.block_align as usize != width * channels {
        return Err(Error::Format(format!(
            "block align {} inconsistent with {channels} x {}-bit samples",
            fmt.block_align, fmt.bits
        )));
    }
    let frame_bytes = width * channels;
    if data.len() % frame_bytes != 0 {
        return Err(Error::Format(format!(
            "data chunk of {} bytes ends mid-frame (frame is {frame_bytes} bytes)",
            data.len()
        )));
    }

    let frames = data.len() / frame_bytes;
    let mut out = vec![Vec::with_capacity(frames); channels];
    for frame in data.chunks_exact(frame_bytes) {
        for (ch, raw) in frame.chunks_exact(width).enumerate() {
            let value = match format {
                SampleFormat::Pcm16 => i16::from_le_bytes([raw[0], raw[1]]) as f64 / 32768.0,
                SampleFormat::Float32 => {
                    let v = f32::from_le_bytes([raw[0], raw[1], raw[2], raw[3]]) as f64;
                    if !v.is_finite() {
                        return Err(Error::Format("non-finite float sample".into()));
                    }
                    v.clamp(-1.0, 1.0)
                }
            };
            out[ch].push(value);
        }
    }

    Ok(WavData {
        channels: out,
        sample_rate: fmt.sample_rate,
        format,
    })
}

pub fn read_wav_file(path: impl AsRef<Path>) -> Result<WavData> {
    decode_wav(&fs::read(path)?)
}

/// Per-sample mean of the channels. Mono input is returned unchanged.
pub fn downmix_mono(wav: &WavData) -> Result<AudioClip> {
    let samples = match wav.channels.as_slice() {
        [mono] => mono.clone(),
        [left, right] => left
            .iter()
            .zip(right)
            .map(|(l, r)| 0.5 * (l + r))
            .collect(),
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "{} channels (at most 2 supported)",
                other.len()
            )))
        }
    };
    Ok(AudioClip::new(samples, wav.sample_rate))
}

fn bessel_i0(x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..64 {
        term *= (half / k as f64) * (half / k as f64);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Band-limited resampling with a Kaiser-windowed sinc kernel.
///
/// The cutoff sits at the lower of the two Nyquist frequencies. Output length
/// is `round(n * target / source)`. Equal rates return an identical copy.
pub fn resample(clip: &AudioClip, target_rate: u32) -> Result<AudioClip> {
    if target_rate == 0 || clip.sample_rate == 0 {
        return Err(Error::InvalidInput("sample rates must be positive".into()));
    }
    if clip.is_empty() {
        return Err(Error::InvalidInput("cannot resample an empty clip".into()));
    }
    if target_rate == clip.sample_rate {
        return Ok(clip.clone());
    }

    let src = clip.sample_rate as f64;
    let dst = target_rate as f64;
    let step = src / dst;
    // Cutoff as a fraction of the input Nyquist frequency.
    let cutoff = (dst / src).min(1.0);
    let half_width = SINC_ZERO_CROSSINGS as f64 / cutoff;
    let norm = bessel_i0(KAISER_BETA);

    let n_in = clip.len();
    let n_out = ((n_in as f64) * dst / src).round().max(1.0) as usize;
    let x = &clip.samples;

    let samples = (0..n_out)
        .map(|j| {
            let centre = j as f64 * step;
            let lo = (centre - half_width).ceil().max(0.0) as usize;
            let hi = ((centre + half_width).floor() as usize).min(n_in - 1);
            let mut acc = 0.0;
            for (i, &s) in x.iter().enumerate().take(hi + 1).skip(lo) {
                let offset = i as f64 - centre;
                let r = offset / half_width;
                let window = if r.abs() >= 1.0 {
                    0.0
                } else {
                    bessel_i0(KAISER_BETA * (1.0 - r * r).sqrt()) / norm
                };
                acc += s * cutoff * sinc(cutoff * offset) * window;
            }
            acc.clamp(-1.0, 1.0)
        })
        .collect();

    Ok(AudioClip::new(samples, target_rate))
}

/// Full input conversion: downmix to mono and resample to [`TARGET_RATE`].
pub fn standardize(wav: &WavData) -> Result<AudioClip> {
    let mono = downmix_mono(wav)?;
    if mono.is_empty() {
        return Ok(AudioClip::new(Vec::new(), TARGET_RATE));
    }
    resample(&mono, TARGET_RATE)
}

pub fn load_standardized(path: impl AsRef<Path>) -> Result<AudioClip> {
    standardize(&read_wav_file(path)?)
}

/// Encodes a clip as a mono 16-bit PCM WAV file.
pub fn encode_wav_pcm16(clip: &AudioClip) -> Vec<u8> {
    let data_len = clip.len() * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&WAVE_FORMAT_PCM.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&clip.sample_rate.to_le_bytes());
    out.extend_from_slice(&(clip.sample_rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &s in &clip.samples {
        let q = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        out.extend_from_slice(&q.to_le_bytes());
    }
    out
}

pub fn write_wav_file(path: impl AsRef<Path>, clip: &AudioClip) -> Result<()> {
    fs::write(path, encode_wav_pcm16(clip))?;
    Ok(())
}

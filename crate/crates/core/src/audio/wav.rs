//! RIFF/WAVE container support: little-endian PCM16 and FLOAT32, mono or
//! stereo. Multi-channel input is averaged to mono per frame.

use super::{AudioClip, AudioError};

const FORMAT_PCM: u16 = 1;
const FORMAT_IEEE_FLOAT: u16 = 3;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

/// Side information from decoding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecodeStats {
    /// Samples hard-clipped to [-1, 1] after mono mixdown.
    pub clipped_samples: usize,
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], AudioError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| AudioError::Format("truncated file".to_string()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn tag(&mut self) -> Result<[u8; 4], AudioError> {
        let b = self.take(4)?;
        Ok([b[0], b[1], b[2], b[3]])
    }

    fn u32(&mut self) -> Result<u32, AudioError> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn u16(&mut self) -> Result<u16, AudioError> {
        let b = self.take(2)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }
}

struct FmtChunk {
    format: u16,
    channels: u16,
    sample_rate: u32,
    bits_per_sample: u16,
}

/// Decode a WAV file into a mono clip, averaging channels and scaling
/// samples to [-1, 1]. See [`decode_wav_stats`] for the clipping counter.
pub fn decode_wav(bytes: &[u8]) -> Result<AudioClip, AudioError> {
    decode_wav_stats(bytes).map(|(clip, _)| clip)
}

/// Decode a WAV file, also reporting decode statistics.
pub fn decode_wav_stats(bytes: &[u8]) -> Result<(AudioClip, DecodeStats), AudioError> {
    let mut r = Reader { bytes, pos: 0 };
    if r.tag()? != *b"RIFF" {
        return Err(AudioError::Format("missing RIFF magic".to_string()));
    }
    let _riff_size = r.u32()?;
    if r.tag()? != *b"WAVE" {
        return Err(AudioError::Format("missing WAVE form type".to_string()));
    }

    let mut fmt: Option<FmtChunk> = None;
    let mut data: Option<&[u8]> = None;
    while r.pos < bytes.len() {
        // A trailing odd byte is the pad of the previous chunk.
        if bytes.len() - r.pos < 8 {
            break;
        }
        let id = r.tag()?;
        let size = r.u32()? as usize;
        match &id {
            b"fmt " => {
                if size < 16 {
                    return Err(AudioError::Format("fmt chunk shorter than 16 bytes".to_string()));
                }
                let body = r.take(size)?;
                let mut fr = Reader { bytes: body, pos: 0 };
                fmt = Some(FmtChunk {
                    format: fr.u16()?,
                    channels: fr.u16()?,
                    sample_rate: fr.u32()?,
                    bits_per_sample: {
                        let _byte_rate = fr.u32()?;
                        let _block_align = fr.u16()?;
                        fr.u16()?
                    },
                });
            }
            b"data" => {
                data = Some(r.take(size)?);
            }
            _ => {
                r.take(size)?;
            }
        }
        if size % 2 == 1 && r.pos < bytes.len() {
            r.take(1)?;
        }
    }

    let fmt = fmt.ok_or_else(|| AudioError::Format("missing fmt chunk".to_string()))?;
    let data = data.ok_or_else(|| AudioError::Format("missing data chunk".to_string()))?;

    if fmt.format == FORMAT_EXTENSIBLE {
        return Err(AudioError::Unsupported("WAVE_FORMAT_EXTENSIBLE".to_string()));
    }
    if !(1..=2).contains(&fmt.channels) {
        return Err(AudioError::Unsupported(format!("{} channels", fmt.channels)));
    }
    if fmt.sample_rate == 0 {
        return Err(AudioError::Format("zero sample rate".to_string()));
    }
    let channels = usize::from(fmt.channels);

    let samples: Vec<f32> = match (fmt.format, fmt.bits_per_sample) {
        (FORMAT_PCM, 16) => {
            let frame_bytes = 2 * channels;
            if data.len() % frame_bytes != 0 {
                return Err(AudioError::Format("data chunk not frame-aligned".to_string()));
            }
            data.chunks_exact(frame_bytes)
                .map(|frame| {
                    let sum: f32 = frame
                        .chunks_exact(2)
                        .map(|b| f32::from(i16::from_le_bytes([b[0], b[1]])) / 32768.0)
                        .sum();
                    sum / channels as f32
                })
                .collect()
        }
        (FORMAT_IEEE_FLOAT, 32) => {
            let frame_bytes = 4 * channels;
            if data.len() % frame_bytes != 0 {
                return Err(AudioError::Format("data chunk not frame-aligned".to_string()));
            }
            data.chunks_exact(frame_bytes)
                .map(|frame| {
                    let sum: f32 = frame
                        .chunks_exact(4)
                        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
                        .sum();
                    sum / channels as f32
                })
                .collect()
        }
        (FORMAT_PCM, bits) => {
            return Err(AudioError::Unsupported(format!("{bits}-bit PCM")));
        }
        (FORMAT_IEEE_FLOAT, bits) => {
            return Err(AudioError::Unsupported(format!("{bits}-bit IEEE float")));
        }
        (code, _) => {
            return Err(AudioError::Unsupported(format!("format code {code}")));
        }
    };

    let (clip, clipped) = AudioClip::new_counting_clipped(samples, fmt.sample_rate)?;
    Ok((
        clip,
        DecodeStats {
            clipped_samples: clipped,
        },
    ))
}

/// Encode a clip as 16-bit PCM mono WAV. The decode/encode round trip is
/// exact to one quantization step (2^-15) per sample.
pub fn encode_wav(clip: &AudioClip) -> Vec<u8> {
    let data_len = clip.len() * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&FORMAT_PCM.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&clip.sample_rate().to_le_bytes());
    out.extend_from_slice(&(clip.sample_rate() * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &s in clip.samples() {
        let q = (f64::from(s) * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        out.extend_from_slice(&q.to_le_bytes());
    }
    out
}

//! Frame and temporal-map file I/O.
//!
//! Two frame sources are supported:
//!
//! * a directory of numbered PNG files (`000000.png`, `000001.png`, ...),
//!   read in numeric order; greyscale images load as one channel, colour
//!   images as three;
//! * a raw planar stream: a little-endian header (`width: u32`,
//!   `height: u32`, `channels: u8`) followed by whole frames of 8-bit
//!   channel-major planes until end of file.
//!
//! Frame indices are assigned from stream position, starting at zero.

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use image::{DynamicImage, GrayImage, RgbImage};

use crate::error::{Error, Result};
use crate::imaging::frame::Frame;
use crate::imaging::ssim::TemporalMap;

fn interleaved_to_planar(bytes: &[u8], w: usize, h: usize, ch: usize) -> Vec<f64> {
    let n = w * h;
    let mut data = vec![0.0; n * ch];
    for i in 0..n {
        for c in 0..ch {
            data[c * n + i] = f64::from(bytes[i * ch + c]);
        }
    }
    data
}

fn load_png(path: &Path, index: u64) -> Result<Frame> {
    let img = image::open(path).map_err(|e| Error::corrupt(path, e.to_string()))?;
    let (data, w, h, ch) = match img {
        DynamicImage::ImageLuma8(g) => {
            let (w, h) = (g.width() as usize, g.height() as usize);
            (interleaved_to_planar(g.as_raw(), w, h, 1), w, h, 1)
        }
        other if other.color().has_color() => {
            let rgb = other.to_rgb8();
            let (w, h) = (rgb.width() as usize, rgb.height() as usize);
            (interleaved_to_planar(rgb.as_raw(), w, h, 3), w, h, 3)
        }
        other => {
            let g = other.to_luma8();
            let (w, h) = (g.width() as usize, g.height() as usize);
            (interleaved_to_planar(g.as_raw(), w, h, 1), w, h, 1)
        }
    };
    Frame::new(index, w, h, ch, data)
}

/// Reads a directory of numbered PNG frames in numeric order.
pub fn read_frames_dir(dir: impl AsRef<Path>) -> Result<Vec<Frame>> {
    let dir = dir.as_ref();
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut numbered: Vec<(u64, PathBuf)> = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()) != Some("png") {
            continue;
        }
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        let number: u64 = stem.parse().map_err(|_| {
            Error::corrupt(&path, "frame files must have numeric names like 000042.png")
        })?;
        numbered.push((number, path));
    }
    if numbered.is_empty() {
        return Err(Error::invalid(format!("no PNG frames found in {}", dir.display())));
    }
    numbered.sort_by_key(|(n, _)| *n);
    for pair in numbered.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(Error::corrupt(
                &pair[1].1,
                format!("duplicate frame number {}", pair[1].0),
            ));
        }
    }
    let mut frames = Vec::with_capacity(numbered.len());
    for (i, (_, path)) in numbered.iter().enumerate() {
        let frame = load_png(path, i as u64)?;
        if let Some(first) = frames.first() {
            let first: &Frame = first;
            if frame.shape() != first.shape() {
                return Err(Error::corrupt(
                    path,
                    format!(
                        "frame shape {:?} differs from first frame {:?}",
                        frame.shape(),
                        first.shape()
                    ),
                ));
            }
        }
        frames.push(frame);
    }
    Ok(frames)
}

/// Reads a raw planar 8-bit frame stream.
pub fn read_raw_frames(path: impl AsRef<Path>) -> Result<Vec<Frame>> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut header = [0u8; 9];
    reader
        .read_exact(&mut header)
        .map_err(|_| Error::corrupt(path, "missing stream header"))?;
    let w = u32::from_le_bytes(header[0..4].try_into().unwrap()) as usize;
    let h = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let ch = header[8] as usize;
    if w == 0 || h == 0 || ch == 0 {
        return Err(Error::corrupt(path, format!("invalid dimensions {w}x{h}x{ch}")));
    }
    let frame_len = w * h * ch;
    let mut body = Vec::new();
    reader.read_to_end(&mut body).map_err(|e| Error::io(path, e))?;
    if body.is_empty() {
        return Err(Error::corrupt(path, "stream holds no frames"));
    }
    if body.len() % frame_len != 0 {
        return Err(Error::corrupt(
            path,
            format!(
                "truncated stream: {} trailing bytes after {} whole frames of {frame_len} bytes",
                body.len() % frame_len,
                body.len() / frame_len
            ),
        ));
    }
    body.chunks_exact(frame_len)
        .enumerate()
        .map(|(i, chunk)| Frame::from_u8(i as u64, w, h, ch, chunk))
        .collect()
}

/// Writes frames as a raw planar 8-bit stream (values rounded).
pub fn write_raw_frames(path: impl AsRef<Path>, frames: &[Frame]) -> Result<()> {
    let path = path.as_ref();
    let first = frames
        .first()
        .ok_or_else(|| Error::invalid("cannot write an empty frame stream"))?;
    let (w, h, ch) = first.shape();
    if ch > u8::MAX as usize {
        return Err(Error::invalid(format!("too many channels for raw stream: {ch}")));
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    writer
        .write_all(&(w as u32).to_le_bytes())
        .and_then(|_| writer.write_all(&(h as u32).to_le_bytes()))
        .and_then(|_| writer.write_all(&[ch as u8]))
        .map_err(|e| Error::io(path, e))?;
    for frame in frames {
        if frame.shape() != first.shape() {
            return Err(Error::invalid(format!(
                "frame {} shape {:?} differs from first frame {:?}",
                frame.index,
                frame.shape(),
                first.shape()
            )));
        }
        let bytes: Vec<u8> = frame.data().iter().map(|&v| v.round().clamp(0.0, 255.0) as u8).collect();
        writer.write_all(&bytes).map_err(|e| Error::io(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

/// Loads frames from either a PNG directory or a raw stream file.
pub fn load_frames(path: impl AsRef<Path>) -> Result<Vec<Frame>> {
    let path = path.as_ref();
    if path.is_dir() {
        read_frames_dir(path)
    } else {
        read_raw_frames(path)
    }
}

/// Writes an 8-bit frame as PNG (one channel as greyscale, three as RGB).
pub fn write_frame_png(path: impl AsRef<Path>, frame: &Frame) -> Result<()> {
    let path = path.as_ref();
    let (w, h, ch) = frame.shape();
    let quantise = |v: f64| v.round().clamp(0.0, 255.0) as u8;
    match ch {
        1 => {
            let bytes: Vec<u8> = frame.plane(0).iter().copied().map(quantise).collect();
            let img = GrayImage::from_raw(w as u32, h as u32, bytes).expect("sized buffer");
            img.save(path).map_err(|e| Error::corrupt(path, e.to_string()))
        }
        3 => {
            let n = w * h;
            let mut bytes = Vec::with_capacity(n * 3);
            for i in 0..n {
                for c in 0..3 {
                    bytes.push(quantise(frame.plane(c)[i]));
                }
            }
            let img = RgbImage::from_raw(w as u32, h as u32, bytes).expect("sized buffer");
            img.save(path).map_err(|e| Error::corrupt(path, e.to_string()))
        }
        other => Err(Error::invalid(format!(
            "PNG export supports 1 or 3 channels, frame has {other}"
        ))),
    }
}

/// Writes a row-major map plane as a greyscale PNG, encoding a value `v` in
/// `[-1, 1]` as `round((v + 1) * 127.5)`.
pub fn write_map_plane_png(path: impl AsRef<Path>, plane: &[f64], w: usize, h: usize) -> Result<()> {
    let path = path.as_ref();
    if plane.len() != w * h {
        return Err(Error::invalid(format!(
            "map plane holds {} values, expected {w}x{h}",
            plane.len()
        )));
    }
    let bytes: Vec<u8> = plane
        .iter()
        .map(|&v| ((v + 1.0) * 127.5).round().clamp(0.0, 255.0) as u8)
        .collect();
    let img = GrayImage::from_raw(w as u32, h as u32, bytes).expect("sized buffer");
    img.save(path).map_err(|e| Error::corrupt(path, e.to_string()))
}

/// Writes one channel of a temporal map as a greyscale PNG, with the
/// encoding of [`write_map_plane_png`].
pub fn write_map_png(path: impl AsRef<Path>, map: &TemporalMap, channel: usize) -> Result<()> {
    if channel >= map.channels() {
        return Err(Error::invalid(format!(
            "map has {} channels, requested {channel}",
            map.channels()
        )));
    }
    write_map_plane_png(path, map.plane(channel), map.width(), map.height())
}

/// Encodes map planes with the same transform as [`write_map_png`]; used by
/// callers that assemble multi-plane previews themselves.
pub fn encode_map_plane(map: &TemporalMap, channel: usize) -> Vec<u8> {
    map.plane(channel)
        .iter()
        .map(|&v| ((v + 1.0) * 127.5).round().clamp(0.0, 255.0) as u8)
        .collect()
}

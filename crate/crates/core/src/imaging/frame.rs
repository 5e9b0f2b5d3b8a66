//! Frame container and one-pixel shifts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single video frame with planar (channel-major) `f64` pixel storage.
///
/// Pixel values live in `[0, L]` where `L` is the dynamic range of the
/// source data (255 for 8-bit video). Planes are row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    /// Position of the frame in its stream.
    pub index: u64,
    width: usize,
    height: usize,
    channels: usize,
    range: f64,
    data: Vec<f64>,
}

impl Frame {
    /// Builds a frame from planar pixel data with dynamic range 255.
    ///
    /// `data` holds `channels` planes of `width * height` row-major values.
    pub fn new(index: u64, width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        Self::with_range(index, width, height, channels, 255.0, data)
    }

    /// Builds a frame with an explicit dynamic range `range` (`L`).
    pub fn with_range(
        index: u64,
        width: usize,
        height: usize,
        channels: usize,
        range: f64,
        data: Vec<f64>,
    ) -> Result<Self> {
        if width == 0 || height == 0 || channels == 0 {
            return Err(Error::invalid(format!(
                "frame {index}: dimensions must be nonzero, got {width}x{height}x{channels}"
            )));
        }
        if !(range > 0.0) || !range.is_finite() {
            return Err(Error::invalid(format!(
                "frame {index}: dynamic range must be finite and positive, got {range}"
            )));
        }
        let expected = width * height * channels;
        if data.len() != expected {
            return Err(Error::invalid(format!(
                "frame {index}: expected {expected} pixel values ({width}x{height}x{channels}), got {}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite() || **v < 0.0 || **v > range) {
            return Err(Error::invalid(format!(
                "frame {index}: pixel value {bad} outside [0, {range}]"
            )));
        }
        Ok(Frame {
            index,
            width,
            height,
            channels,
            range,
            data,
        })
    }

    /// Builds a frame from planar 8-bit data.
    pub fn from_u8(index: u64, width: usize, height: usize, channels: usize, bytes: &[u8]) -> Result<Self> {
        let data = bytes.iter().map(|&b| f64::from(b)).collect();
        Self::new(index, width, height, channels, data)
    }

    /// Builds a constant-valued frame (useful in tests).
    pub fn constant(index: u64, width: usize, height: usize, channels: usize, value: f64) -> Result<Self> {
        Self::new(index, width, height, channels, vec![value; width * height * channels])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Dynamic range `L` of the pixel values.
    pub fn range(&self) -> f64 {
        self.range
    }

    /// `(width, height, channels)` for shape comparisons.
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.width, self.height, self.channels)
    }

    /// Row-major plane for channel `c`.
    pub fn plane(&self, c: usize) -> &[f64] {
        let n = self.width * self.height;
        &self.data[c * n..(c + 1) * n]
    }

    /// Pixel accessor; panics on out-of-range coordinates (test helper).
    pub fn get(&self, c: usize, x: usize, y: usize) -> f64 {
        assert!(c < self.channels && x < self.width && y < self.height);
        self.data[c * self.width * self.height + y * self.width + x]
    }

    /// All planes, channel-major.
    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// An integer pixel shift `(dx, dy)`.
///
/// Shifting a frame by `(dx, dy)` moves its content `dx` pixels right and
/// `dy` pixels down; vacated borders replicate the nearest source pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShiftDirection {
    pub dx: i32,
    pub dy: i32,
}

impl ShiftDirection {
    pub const IDENTITY: ShiftDirection = ShiftDirection { dx: 0, dy: 0 };

    pub fn new(dx: i32, dy: i32) -> Self {
        ShiftDirection { dx, dy }
    }

    pub fn is_identity(&self) -> bool {
        self.dx == 0 && self.dy == 0
    }
}

impl std::fmt::Display for ShiftDirection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.dx, self.dy)
    }
}

#[inline]
pub(crate) fn clamp_coord(v: i64, len: usize) -> usize {
    v.clamp(0, len as i64 - 1) as usize
}

/// Returns a copy of `frame` translated by `d` with edge replication.
///
/// The output pixel at `(x, y)` takes the source value at
/// `(x - d.dx, y - d.dy)`, clamped to the frame bounds, so content moves in
/// the `+d` direction and the trailing border repeats the outermost pixels.
pub fn shift_frame(frame: &Frame, d: ShiftDirection) -> Frame {
    let (w, h, ch) = frame.shape();
    let mut data = Vec::with_capacity(w * h * ch);
    for c in 0..ch {
        let plane = frame.plane(c);
        for y in 0..h {
            let sy = clamp_coord(y as i64 - i64::from(d.dy), h);
            let row = &plane[sy * w..sy * w + w];
            for x in 0..w {
                let sx = clamp_coord(x as i64 - i64::from(d.dx), w);
                data.push(row[sx]);
            }
        }
    }
    Frame {
        index: frame.index,
        width: w,
        height: h,
        channels: ch,
        range: frame.range,
        data,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_validates_shape_and_range() {
        assert!(Frame::new(0, 2, 2, 1, vec![0.0; 4]).is_ok());
        assert!(Frame::new(0, 2, 2, 1, vec![0.0; 3]).is_err());
        assert!(Frame::new(0, 0, 2, 1, vec![]).is_err());
        assert!(Frame::new(0, 2, 2, 1, vec![0.0, 1.0, 2.0, 256.0]).is_err());
        assert!(Frame::new(0, 2, 2, 1, vec![0.0, 1.0, 2.0, -0.5]).is_err());
        assert!(Frame::new(0, 2, 2, 1, vec![0.0, 1.0, 2.0, f64::NAN]).is_err());
        assert!(Frame::with_range(0, 1, 1, 1, 1.0, vec![0.5]).is_ok());
        assert!(Frame::with_range(0, 1, 1, 1, 1.0, vec![1.5]).is_err());
    }

    #[test]
    fn shift_moves_content_and_replicates_edges() {
        // 3x3 single-channel frame:
        //   0 1 2
        //   3 4 5
        //   6 7 8
        let f = Frame::new(0, 3, 3, 1, (0..9).map(f64::from).collect()).unwrap();

        // Shift right by one: column 0 is replicated.
        let right = shift_frame(&f, ShiftDirection::new(1, 0));
        assert_eq!(right.plane(0), &[0.0, 0.0, 1.0, 3.0, 3.0, 4.0, 6.0, 6.0, 7.0]);

        // Shift down by one: row 0 is replicated.
        let down = shift_frame(&f, ShiftDirection::new(0, 1));
        assert_eq!(down.plane(0), &[0.0, 1.0, 2.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);

        // Identity is a no-op.
        let same = shift_frame(&f, ShiftDirection::IDENTITY);
        assert_eq!(same.plane(0), f.plane(0));
    }

    #[test]
    fn shift_round_trip_matches_interior() {
        let f = Frame::new(0, 4, 4, 1, (0..16).map(f64::from).collect()).unwrap();
        let there = shift_frame(&f, ShiftDirection::new(1, 1));
        let back = shift_frame(&there, ShiftDirection::new(-1, -1));
        // Interior pixels survive the round trip; borders are replicated.
        for y in 0..3 {
            for x in 0..3 {
                assert_eq!(back.get(0, x, y), f.get(0, x, y));
            }
        }
    }
}

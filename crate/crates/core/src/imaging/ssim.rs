//! Dense structural-similarity maps over sliding local windows.

use crate::error::{Error, Result};
use crate::imaging::frame::{clamp_coord, Frame, ShiftDirection};

/// Default luminance stabilisation factor: `C1 = (K1 * L)^2`.
pub const K1: f64 = 0.01;
/// Default contrast stabilisation factor: `C2 = (K2 * L)^2`.
pub const K2: f64 = 0.03;

/// Parameters of the local-window structural similarity measure.
///
/// Every output pixel compares `window x window` neighbourhoods (odd side,
/// edge-replicated at the borders) through
///
/// ```text
/// s = (2*mu_a*mu_b + C1) * (2*cov_ab + C2)
///     -------------------------------------
///     (mu_a^2 + mu_b^2 + C1) * (var_a + var_b + C2)
/// ```
///
/// with unweighted window means, unbiased sample variances/covariance, and
/// `C1 = (K1*L)^2`, `C2 = (K2*L)^2` for dynamic range `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct SsimParams {
    window: usize,
    c1: f64,
    c2: f64,
    range: f64,
}

impl SsimParams {
    /// Window side `window` (odd, >= 3) and dynamic range `range`;
    /// stabilisation constants derive from the range.
    pub fn new(window: usize, range: f64) -> Result<Self> {
        if window < 3 || window % 2 == 0 {
            return Err(Error::invalid(format!(
                "ssim window must be odd and >= 3, got {window}"
            )));
        }
        if !(range > 0.0) || !range.is_finite() {
            return Err(Error::invalid(format!(
                "ssim dynamic range must be finite and positive, got {range}"
            )));
        }
        Ok(SsimParams {
            window,
            c1: (K1 * range) * (K1 * range),
            c2: (K2 * range) * (K2 * range),
            range,
        })
    }

    /// Overrides the stabilisation constants directly.
    pub fn with_constants(window: usize, c1: f64, c2: f64) -> Result<Self> {
        let mut p = SsimParams::new(window, 255.0)?;
        if !(c1 > 0.0) || !(c2 > 0.0) {
            return Err(Error::invalid(format!(
                "ssim constants must be positive, got c1={c1} c2={c2}"
            )));
        }
        p.c1 = c1;
        p.c2 = c2;
        Ok(p)
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn range(&self) -> f64 {
        self.range
    }
}

impl Default for SsimParams {
    /// 7x7 window over 8-bit data.
    fn default() -> Self {
        SsimParams::new(7, 255.0).expect("default parameters are valid")
    }
}

/// A dense per-pixel, per-channel temporal map, stored like [`Frame`] planes.
///
/// Similarity maps hold values in `[-1, 1]`; dissimilarity maps in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalMap {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
}

impl TemporalMap {
    pub(crate) fn from_parts(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height * channels);
        TemporalMap {
            width,
            height,
            channels,
            data,
        }
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

    /// Row-major plane for channel `c`.
    pub fn plane(&self, c: usize) -> &[f64] {
        let n = self.width * self.height;
        &self.data[c * n..(c + 1) * n]
    }

    pub fn get(&self, c: usize, x: usize, y: usize) -> f64 {
        assert!(c < self.channels && x < self.width && y < self.height);
        self.data[c * self.width * self.height + y * self.width + x]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Mean over all pixels and channels.
    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Elementwise transform (used for similarity -> dissimilarity).
    pub(crate) fn map_values(mut self, f: impl Fn(f64) -> f64) -> Self {
        for v in &mut self.data {
            *v = f(*v);
        }
        self
    }
}

/// Fills `out` with `plane` translated by `shift` and then padded by `r` on
/// each side, both edge-replicated; `shift = (0,0)` is a plain pad. The two
/// clamps compose per axis, which reproduces pad(shift(plane)) exactly
/// without materialising the shifted copy. `col_idx` is scratch for the
/// per-column source indices (they do not depend on the row).
fn fill_padded_shifted(
    plane: &[f64],
    w: usize,
    h: usize,
    r: usize,
    shift: ShiftDirection,
    col_idx: &mut Vec<usize>,
    out: &mut Vec<f64>,
) {
    let pw = w + 2 * r;
    let ph = h + 2 * r;
    col_idx.clear();
    col_idx.extend((0..pw).map(|px| {
        let rx = clamp_coord(px as i64 - r as i64, w);
        clamp_coord(rx as i64 - i64::from(shift.dx), w)
    }));
    out.clear();
    out.reserve(pw * ph);
    for py in 0..ph {
        let ry = clamp_coord(py as i64 - r as i64, h);
        let sy = clamp_coord(ry as i64 - i64::from(shift.dy), h);
        let row = &plane[sy * w..sy * w + w];
        out.extend(col_idx.iter().map(|&sx| row[sx]));
    }
}

/// Pads `plane` by `r` on each side with edge replication, after first
/// translating it by `shift` (also edge-replicated).
fn pad_shifted_plane(plane: &[f64], w: usize, h: usize, r: usize, shift: ShiftDirection) -> Vec<f64> {
    let mut out = Vec::new();
    let mut col_idx = Vec::new();
    fill_padded_shifted(plane, w, h, r, shift, &mut col_idx, &mut out);
    out
}

/// Sliding-window moment accumulator over a pair of padded planes.
///
/// Window sums are maintained with O(1) per-pixel updates: per-column sums
/// over the vertical window slide down one row at a time, and horizontal
/// window sums come from a running prefix over those column sums.
struct MomentWindows {
    pw: usize,
    col_a: Vec<f64>,
    col_b: Vec<f64>,
    col_aa: Vec<f64>,
    col_bb: Vec<f64>,
    col_ab: Vec<f64>,
    pref_a: Vec<f64>,
    pref_b: Vec<f64>,
    pref_aa: Vec<f64>,
    pref_bb: Vec<f64>,
    pref_ab: Vec<f64>,
}

impl MomentWindows {
    fn new(pa: &[f64], pb: &[f64], pw: usize, win: usize) -> Self {
        let mut mw = MomentWindows {
            pw,
            col_a: vec![0.0; pw],
            col_b: vec![0.0; pw],
            col_aa: vec![0.0; pw],
            col_bb: vec![0.0; pw],
            col_ab: vec![0.0; pw],
            pref_a: vec![0.0; pw + 1],
            pref_b: vec![0.0; pw + 1],
            pref_aa: vec![0.0; pw + 1],
            pref_bb: vec![0.0; pw + 1],
            pref_ab: vec![0.0; pw + 1],
        };
        for row in 0..win {
            let ra = &pa[row * pw..row * pw + pw];
            let rb = &pb[row * pw..row * pw + pw];
            for x in 0..pw {
                let a = ra[x];
                let b = rb[x];
                mw.col_a[x] += a;
                mw.col_b[x] += b;
                mw.col_aa[x] += a * a;
                mw.col_bb[x] += b * b;
                mw.col_ab[x] += a * b;
            }
        }
        mw
    }

    /// Moves the vertical window down one row: `drop` leaves, `add` enters.
    #[inline]
    fn slide(&mut self, pa: &[f64], pb: &[f64], drop: usize, add: usize) {
        let pw = self.pw;
        let da = &pa[drop * pw..drop * pw + pw];
        let db = &pb[drop * pw..drop * pw + pw];
        let na = &pa[add * pw..add * pw + pw];
        let nb = &pb[add * pw..add * pw + pw];
        for x in 0..pw {
            let ao = da[x];
            let bo = db[x];
            let an = na[x];
            let bn = nb[x];
            self.col_a[x] += an - ao;
            self.col_b[x] += bn - bo;
            self.col_aa[x] += an * an - ao * ao;
            self.col_bb[x] += bn * bn - bo * bo;
            self.col_ab[x] += an * bn - ao * bo;
        }
    }

    /// Rebuilds the prefix sums for the current vertical window.
    #[inline]
    fn refresh_prefixes(&mut self) {
        let mut acc_a = 0.0;
        let mut acc_b = 0.0;
        let mut acc_aa = 0.0;
        let mut acc_bb = 0.0;
        let mut acc_ab = 0.0;
        self.pref_a[0] = 0.0;
        self.pref_b[0] = 0.0;
        self.pref_aa[0] = 0.0;
        self.pref_bb[0] = 0.0;
        self.pref_ab[0] = 0.0;
        for x in 0..self.pw {
            acc_a += self.col_a[x];
            acc_b += self.col_b[x];
            acc_aa += self.col_aa[x];
            acc_bb += self.col_bb[x];
            acc_ab += self.col_ab[x];
            self.pref_a[x + 1] = acc_a;
            self.pref_b[x + 1] = acc_b;
            self.pref_aa[x + 1] = acc_aa;
            self.pref_bb[x + 1] = acc_bb;
            self.pref_ab[x + 1] = acc_ab;
        }
    }
}

/// The similarity value for one window given its moment sums.
#[inline(always)]
fn ssim_value(
    sa: f64,
    sb: f64,
    saa: f64,
    sbb: f64,
    sab: f64,
    inv_n: f64,
    inv_nm1: f64,
    c1: f64,
    c2: f64,
) -> f64 {
    let mu_a = sa * inv_n;
    let mu_b = sb * inv_n;
    let var_a = (saa - sa * mu_a) * inv_nm1;
    let var_b = (sbb - sb * mu_b) * inv_nm1;
    let cov = (sab - sa * mu_b) * inv_nm1;
    let num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
    let den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
    (num / den).clamp(-1.0, 1.0)
}

/// Writes one output row of similarity values from the current vertical
/// window's prefix sums. Iterations are independent, so the loop vectorises.
#[inline]
fn ssim_row(mw: &MomentWindows, win: usize, inv_n: f64, inv_nm1: f64, c1: f64, c2: f64, row: &mut [f64]) {
    let len = row.len() + win;
    let pref_a = &mw.pref_a[..len];
    let pref_b = &mw.pref_b[..len];
    let pref_aa = &mw.pref_aa[..len];
    let pref_bb = &mw.pref_bb[..len];
    let pref_ab = &mw.pref_ab[..len];
    for (x, o) in row.iter_mut().enumerate() {
        let hi = x + win;
        *o = ssim_value(
            pref_a[hi] - pref_a[x],
            pref_b[hi] - pref_b[x],
            pref_aa[hi] - pref_aa[x],
            pref_bb[hi] - pref_bb[x],
            pref_ab[hi] - pref_ab[x],
            inv_n,
            inv_nm1,
            c1,
            c2,
        );
    }
}

/// Computes one channel of the similarity map from padded planes.
fn ssim_channel_map(pa: &[f64], pb: &[f64], w: usize, h: usize, params: &SsimParams, out: &mut [f64]) {
    let win = params.window;
    let pw = w + win - 1;
    let n = (win * win) as f64;
    let inv_n = 1.0 / n;
    let inv_nm1 = 1.0 / (n - 1.0);

    let mut mw = MomentWindows::new(pa, pb, pw, win);
    for y in 0..h {
        mw.refresh_prefixes();
        ssim_row(&mw, win, inv_n, inv_nm1, params.c1, params.c2, &mut out[y * w..y * w + w]);
        if y + 1 < h {
            mw.slide(pa, pb, y, y + win);
        }
    }
}

/// Folds one channel's similarity values into the running sum `acc` without
/// storing the map. Values land in `acc` in row-major pixel order — the same
/// addition sequence as [`TemporalMap::mean`] over a stored map — so means
/// computed this way match the full-map path bit for bit. `scratch` must
/// hold one output row.
fn ssim_channel_sum(
    pa: &[f64],
    pb: &[f64],
    w: usize,
    h: usize,
    params: &SsimParams,
    scratch: &mut [f64],
    mut acc: f64,
) -> f64 {
    let win = params.window;
    let pw = w + win - 1;
    let n = (win * win) as f64;
    let inv_n = 1.0 / n;
    let inv_nm1 = 1.0 / (n - 1.0);

    let mut mw = MomentWindows::new(pa, pb, pw, win);
    for y in 0..h {
        mw.refresh_prefixes();
        ssim_row(&mw, win, inv_n, inv_nm1, params.c1, params.c2, scratch);
        for &s in scratch.iter() {
            acc += s;
        }
        if y + 1 < h {
            mw.slide(pa, pb, y, y + win);
        }
    }
    acc
}

/// Internal entry point shared by [`ssim_map`] and candidate selection:
/// compares `shift_frame(a, shift)` against `b` without materialising the
/// shifted frame.
pub(crate) fn ssim_map_shifted(
    a: &Frame,
    b: &Frame,
    shift: ShiftDirection,
    params: &SsimParams,
) -> Result<TemporalMap> {
    if a.shape() != b.shape() {
        return Err(Error::invalid(format!(
            "ssim operands must share a shape, got {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let (w, h, ch) = a.shape();
    let r = params.window / 2;
    let mut data = vec![0.0; w * h * ch];
    let mut pa = Vec::new();
    let mut pb = Vec::new();
    let mut col_idx = Vec::new();
    for c in 0..ch {
        fill_padded_shifted(a.plane(c), w, h, r, shift, &mut col_idx, &mut pa);
        fill_padded_shifted(b.plane(c), w, h, r, ShiftDirection::IDENTITY, &mut col_idx, &mut pb);
        ssim_channel_map(&pa, &pb, w, h, params, &mut data[c * w * h..(c + 1) * w * h]);
    }
    Ok(TemporalMap::from_parts(w, h, ch, data))
}

/// Mean similarity of `shift_frame(a, shift)` against `b` for each shift,
/// without materialising the shifted frames or their maps. The second
/// operand's padded planes and all scratch buffers are shared across shifts.
///
/// Each returned mean equals the corresponding full map's
/// [`TemporalMap::mean`] bit for bit: the per-pixel values are identical and
/// are accumulated in the same order.
pub(crate) fn ssim_means_for_shifts(
    a: &Frame,
    b: &Frame,
    shifts: &[ShiftDirection],
    params: &SsimParams,
) -> Result<Vec<f64>> {
    if a.shape() != b.shape() {
        return Err(Error::invalid(format!(
            "ssim operands must share a shape, got {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let (w, h, ch) = a.shape();
    let r = params.window / 2;
    let padded_b = pad_planes(b, r);
    let mut pa = Vec::new();
    let mut col_idx = Vec::new();
    let mut scratch = vec![0.0; w];
    let len = (w * h * ch) as f64;
    let mut means = Vec::with_capacity(shifts.len());
    for &shift in shifts {
        let mut acc = 0.0;
        for c in 0..ch {
            fill_padded_shifted(a.plane(c), w, h, r, shift, &mut col_idx, &mut pa);
            acc = ssim_channel_sum(&pa, &padded_b[c], w, h, params, &mut scratch, acc);
        }
        means.push(acc / len);
    }
    Ok(means)
}

pub(crate) fn pad_planes(frame: &Frame, r: usize) -> Vec<Vec<f64>> {
    let (w, h, ch) = frame.shape();
    (0..ch)
        .map(|c| pad_shifted_plane(frame.plane(c), w, h, r, ShiftDirection::IDENTITY))
        .collect()
}

/// Dense per-pixel, per-channel structural similarity between two frames of
/// identical shape. Values are clamped to `[-1, 1]`.
///
/// Windows that overhang the frame border are filled by edge replication, so
/// the output has the same spatial size as the inputs.
pub fn ssim_map(a: &Frame, b: &Frame, params: &SsimParams) -> Result<TemporalMap> {
    ssim_map_shifted(a, b, ShiftDirection::IDENTITY, params)
}

/// Dense structural dissimilarity: `(1 - s) / 2` per pixel, in `[0, 1]`.
pub fn dsim_map(a: &Frame, b: &Frame, params: &SsimParams) -> Result<TemporalMap> {
    Ok(ssim_map(a, b, params)?.map_values(|v| (1.0 - v) / 2.0))
}

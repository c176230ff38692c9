//! Fold-accuracy scoring: HSV segmentation, IoU, translation alignment and
//! completion time.

use image::RgbImage;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::log::{DemonstrationLog, EventKind};
use crate::mask::Mask;

/// Default alignment search radius in pixels for 256-pixel grids.
pub const DEFAULT_ALIGN_RADIUS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScoreError {
    #[error("image is empty")]
    EmptyImage,
    #[error("mask dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("invalid HSV range: {0}")]
    InvalidRange(String),
    #[error("log contains no session_start")]
    NoSessionStart,
    #[error("log contains no fold_complete")]
    NoFoldCompleted,
}

/// Hue interval in degrees is half-open, `[lo, hi)`, and wraps through 0
/// when `lo > hi`; saturation and value intervals are closed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HsvRange {
    pub hue: [f64; 2],
    pub saturation: [f64; 2],
    pub value: [f64; 2],
}

impl HsvRange {
    pub fn new(hue: [f64; 2], saturation: [f64; 2], value: [f64; 2]) -> Result<Self, ScoreError> {
        let r = Self {
            hue,
            saturation,
            value,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<(), ScoreError> {
        let [h0, h1] = self.hue;
        if !(0.0..=360.0).contains(&h0) || !(0.0..=360.0).contains(&h1) {
            return Err(ScoreError::InvalidRange("hue bounds must lie in [0, 360]".into()));
        }
        for (name, [lo, hi]) in [("saturation", self.saturation), ("value", self.value)] {
            if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
                return Err(ScoreError::InvalidRange(format!("{name} bounds must be ordered within [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn contains(&self, (h, s, v): (f64, f64, f64)) -> bool {
        let [h0, h1] = self.hue;
        let hue_ok = if h0 <= h1 { h >= h0 && h < h1 } else { h >= h0 || h < h1 };
        hue_ok
            && s >= self.saturation[0]
            && s <= self.saturation[1]
            && v >= self.value[0]
            && v <= self.value[1]
    }
}

/// Standard hexcone conversion; hue in [0, 360), saturation and value in
/// [0, 1]. Achromatic pixels get hue 0.
pub fn rgb_to_hsv(rgb: [u8; 3]) -> (f64, f64, f64) {
    let [r, g, b] = rgb.map(|c| c as f64 / 255.0);
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let chroma = max - min;
    let hue = if chroma == 0.0 {
        0.0
    } else if max == r {
        60.0 * ((g - b) / chroma).rem_euclid(6.0)
    } else if max == g {
        60.0 * ((b - r) / chroma + 2.0)
    } else {
        60.0 * ((r - g) / chroma + 4.0)
    };
    let hue = if hue >= 360.0 { hue - 360.0 } else { hue };
    let sat = if max == 0.0 { 0.0 } else { chroma / max };
    (hue, sat, max)
}

pub fn segment_hsv(image: &RgbImage, range: &HsvRange) -> Result<Mask, ScoreError> {
    if image.width() == 0 || image.height() == 0 {
        return Err(ScoreError::EmptyImage);
    }
    let (w, h) = (image.width() as usize, image.height() as usize);
    Ok(Mask::from_fn(w, h, |c, r| {
        range.contains(rgb_to_hsv(image.get_pixel(c as u32, r as u32).0))
    }))
}

fn check_dims(a: &Mask, b: &Mask) -> Result<(), ScoreError> {
    if a.same_dims(b) {
        Ok(())
    } else {
        Err(ScoreError::DimensionMismatch(a.width(), a.height(), b.width(), b.height()))
    }
}

/// |a ∧ b| / |a ∨ b|, with two empty masks scoring 1.
pub fn iou(a: &Mask, b: &Mask) -> Result<f64, ScoreError> {
    check_dims(a, b)?;
    let (mut inter, mut union) = (0usize, 0usize);
    for (x, y) in a.bits().iter().zip(b.bits()) {
        inter += (*x && *y) as usize;
        union += (*x || *y) as usize;
    }
    Ok(ratio(inter, union))
}

fn ratio(inter: usize, union: usize) -> f64 {
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Alignment {
    /// Translation applied to the second mask, in (columns, rows).
    pub offset: (i64, i64),
    pub iou: f64,
}

/// Packed rows, bit `c % 64` of word `c / 64` holding column `c`.
struct BitRows {
    words: usize,
    rows: Vec<u64>,
}

impl BitRows {
    fn new(m: &Mask) -> Self {
        let words = m.width().div_ceil(64);
        let mut rows = vec![0u64; words * m.height()];
        for r in 0..m.height() {
            for c in 0..m.width() {
                if m.get(c, r) {
                    rows[r * words + c / 64] |= 1 << (c % 64);
                }
            }
        }
        Self { words, rows }
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.rows[r * self.words..(r + 1) * self.words]
    }
}

/// Shifts every row of `src` by `dx` columns, dropping bits past `width`.
fn shift_columns(src: &BitRows, height: usize, width: usize, dx: i64) -> BitRows {
    let words = src.words;
    let mut out = vec![0u64; src.rows.len()];
    let tail_mask = if width.is_multiple_of(64) { u64::MAX } else { (1u64 << (width % 64)) - 1 };
    let (wshift, bshift) = ((dx.unsigned_abs() / 64) as usize, (dx.unsigned_abs() % 64) as u32);
    for r in 0..height {
        let row = src.row(r);
        let dst = &mut out[r * words..(r + 1) * words];
        for (k, slot) in dst.iter_mut().enumerate() {
            *slot = if dx >= 0 {
                // column c moves to c + dx: bits move toward higher significance
                let lo = k.checked_sub(wshift).map(|j| row[j]).unwrap_or(0);
                let carry = k.checked_sub(wshift + 1).map(|j| row[j]).unwrap_or(0);
                if bshift == 0 {
                    lo
                } else {
                    (lo << bshift) | (carry >> (64 - bshift))
                }
            } else {
                let hi = row.get(k + wshift).copied().unwrap_or(0);
                let carry = row.get(k + wshift + 1).copied().unwrap_or(0);
                if bshift == 0 {
                    hi
                } else {
                    (hi >> bshift) | (carry << (64 - bshift))
                }
            };
        }
        dst[words - 1] &= tail_mask;
    }
    BitRows { words, rows: out }
}

/// Exhaustive search over translations `(dx, dy)` of `b` with
/// `|dx|, |dy| <= radius`, maximizing IoU against `a`. Ties go to the
/// smallest Euclidean offset, then to the lexicographically smallest.
pub fn align(a: &Mask, b: &Mask, radius: usize) -> Result<Alignment, ScoreError> {
    check_dims(a, b)?;
    let (w, h) = (a.width(), a.height());
    let a_bits = BitRows::new(a);
    let b_bits = BitRows::new(b);
    let a_count = a.count();
    let r = radius as i64;

    // best as (inter, union, dx, dy)
    let mut best: Option<(usize, usize, i64, i64)> = None;
    for dx in -r..=r {
        let shifted = shift_columns(&b_bits, h, w, dx);
        for dy in -r..=r {
            let (mut inter, mut kept) = (0usize, 0usize);
            for row in 0..h {
                let src = row as i64 - dy;
                if src < 0 || src >= h as i64 {
                    continue;
                }
                let (ra, rb) = (a_bits.row(row), shifted.row(src as usize));
                for (x, y) in ra.iter().zip(rb) {
                    inter += (x & y).count_ones() as usize;
                    kept += y.count_ones() as usize;
                }
            }
            let union = a_count + kept - inter;
            let better = match best {
                None => true,
                Some((bi, bu, bdx, bdy)) => match cmp_ratio(inter, union, bi, bu) {
                    std::cmp::Ordering::Greater => true,
                    std::cmp::Ordering::Less => false,
                    std::cmp::Ordering::Equal => (dx * dx + dy * dy, dx, dy) < (bdx * bdx + bdy * bdy, bdx, bdy),
                },
            };
            if better {
                best = Some((inter, union, dx, dy));
            }
        }
    }
    let (inter, union, dx, dy) = best.expect("the search always includes offset (0, 0)");
    Ok(Alignment {
        offset: (dx, dy),
        iou: ratio(inter, union),
    })
}

/// Compares i1/u1 with i2/u2 exactly, treating 0/0 as 1.
fn cmp_ratio(i1: usize, u1: usize, i2: usize, u2: usize) -> std::cmp::Ordering {
    let (i1, u1) = if u1 == 0 { (1, 1) } else { (i1, u1) };
    let (i2, u2) = if u2 == 0 { (1, 1) } else { (i2, u2) };
    (i1 as u128 * u2 as u128).cmp(&(i2 as u128 * u1 as u128))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialScore {
    pub iou: f64,
    pub offset: (i64, i64),
    /// Seconds from session start to the last completed fold, if known.
    pub completion_time: Option<f64>,
}

pub fn score_trial(result: &Mask, goal: &Mask, radius: usize) -> Result<TrialScore, ScoreError> {
    let al = align(result, goal, radius)?;
    Ok(TrialScore {
        iou: al.iou,
        offset: al.offset,
        completion_time: None,
    })
}

/// Seconds between `session_start` and the last `fold_complete`.
pub fn completion_time(log: &DemonstrationLog) -> Result<f64, ScoreError> {
    let start = log
        .events
        .iter()
        .find(|e| e.event == EventKind::SessionStart)
        .ok_or(ScoreError::NoSessionStart)?;
    let done = log
        .events
        .iter()
        .rev()
        .find(|e| e.event == EventKind::FoldComplete)
        .ok_or(ScoreError::NoFoldCompleted)?;
    Ok(done.t_ms.saturating_sub(start.t_ms) as f64 / 1000.0)
}

//! Binary occupancy grids.

use serde::{Deserialize, Serialize};

/// Row-major binary image; row 0 is the top (north) row.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl std::fmt::Debug for Mask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Mask({}x{}, {} set)", self.width, self.height, self.count())
    }
}

impl Mask {
    /// All-zero mask.
    ///
    /// Panics if either dimension is zero.
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width >= 1 && height >= 1, "mask dimensions must be positive");
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Option<Self> {
        (width >= 1 && height >= 1 && bits.len() == width * height).then_some(Self { width, height, bits })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::new(width, height);
        for row in 0..height {
            for col in 0..width {
                m.bits[row * width + col] = f(col, row);
            }
        }
        m
    }

    /// Axis-aligned filled rectangle covering columns `c0..c1` and rows `r0..r1`.
    pub fn rect(width: usize, height: usize, c0: usize, r0: usize, c1: usize, r1: usize) -> Self {
        Self::from_fn(width, height, |c, r| (c0..c1).contains(&c) && (r0..r1).contains(&r))
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, col: usize, row: usize) -> bool {
        self.bits[row * self.width + col]
    }

    pub fn set(&mut self, col: usize, row: usize, value: bool) {
        self.bits[row * self.width + col] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn same_dims(&self, other: &Mask) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Inclusive (col0, row0, col1, row1) of the set pixels.
    pub fn bounding_box(&self) -> Option<(usize, usize, usize, usize)> {
        let mut bb: Option<(usize, usize, usize, usize)> = None;
        for row in 0..self.height {
            for col in 0..self.width {
                if self.get(col, row) {
                    bb = Some(match bb {
                        None => (col, row, col, row),
                        Some((c0, r0, c1, r1)) => (c0.min(col), r0.min(row), c1.max(col), r1.max(row)),
                    });
                }
            }
        }
        bb
    }

    /// Shifts content by `dx` columns and `dy` rows; pixels leaving the frame
    /// are dropped and vacated pixels are cleared.
    pub fn translate(&self, dx: i64, dy: i64) -> Mask {
        let (w, h) = (self.width as i64, self.height as i64);
        Mask::from_fn(self.width, self.height, |c, r| {
            let (sc, sr) = (c as i64 - dx, r as i64 - dy);
            (0..w).contains(&sc) && (0..h).contains(&sr) && self.get(sc as usize, sr as usize)
        })
    }

    /// Nearest-neighbor upsampling by an integer factor.
    pub fn upsample(&self, factor: usize) -> Mask {
        assert!(factor >= 1);
        Mask::from_fn(self.width * factor, self.height * factor, |c, r| {
            self.get(c / factor, r / factor)
        })
    }

    pub fn and(&self, other: &Mask) -> Mask {
        assert!(self.same_dims(other));
        Mask {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| *a && *b).collect(),
        }
    }

    pub fn or(&self, other: &Mask) -> Mask {
        assert!(self.same_dims(other));
        Mask {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| *a || *b).collect(),
        }
    }

    /// Run lengths over the row-major bits, alternating clear and set runs
    /// and starting with a (possibly empty) clear run.
    pub fn to_runs(&self) -> Vec<usize> {
        let mut runs = Vec::new();
        let mut current = false;
        let mut len = 0;
        for &b in &self.bits {
            if b == current {
                len += 1;
            } else {
                runs.push(len);
                current = b;
                len = 1;
            }
        }
        runs.push(len);
        runs
    }

    pub fn from_runs(width: usize, height: usize, runs: &[usize]) -> Option<Self> {
        let mut bits = Vec::with_capacity(width * height);
        for (k, &len) in runs.iter().enumerate() {
            bits.extend(std::iter::repeat_n(k % 2 == 1, len));
        }
        Self::from_bits(width, height, bits)
    }

    /// Crude text rendering, handy when eyeballing simulated shapes.
    pub fn to_ascii(&self, step: usize) -> String {
        let step = step.max(1);
        let mut out = String::new();
        for row in (0..self.height).step_by(step) {
            for col in (0..self.width).step_by(step) {
                out.push(if self.get(col, row) { '#' } else { '.' });
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn translate_drops_and_clears() {
        let m = Mask::rect(4, 4, 0, 0, 2, 2);
        let t = m.translate(3, -1);
        assert_eq!(t.count(), 1);
        assert!(t.get(3, 0));
        assert_eq!(m.translate(0, 0), m);
    }

    #[test]
    fn bounding_box_of_rect() {
        let m = Mask::rect(10, 8, 2, 3, 5, 7);
        assert_eq!(m.bounding_box(), Some((2, 3, 4, 6)));
        assert_eq!(Mask::new(3, 3).bounding_box(), None);
    }

    #[test]
    fn run_length_round_trip() {
        let m = Mask::rect(5, 3, 1, 1, 3, 2);
        assert_eq!(m.to_runs(), vec![6, 2, 7]);
        assert_eq!(Mask::from_runs(5, 3, &m.to_runs()).unwrap(), m);
        let full = Mask::rect(2, 2, 0, 0, 2, 2);
        assert_eq!(full.to_runs(), vec![0, 4]);
        assert_eq!(Mask::from_runs(2, 2, &[0, 4]).unwrap(), full);
        assert!(Mask::from_runs(2, 2, &[1, 1]).is_none());
    }

    #[test]
    fn from_bits_checks_length() {
        assert!(Mask::from_bits(2, 2, vec![true; 3]).is_none());
        assert!(Mask::from_bits(0, 2, vec![]).is_none());
        assert!(Mask::from_bits(2, 1, vec![true, false]).is_some());
    }
}

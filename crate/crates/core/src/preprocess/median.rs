//! Rank-order median filter over square or disc neighborhoods.
//!
//! Each output row slides a window histogram along the row. The histogram is
//! two-level (coarse blocks over fine bins) so that locating the next occupied
//! bin stays cheap for 16-bit data. Rows are independent and processed in
//! parallel; the result does not depend on scheduling.

use rayon::prelude::*;

use crate::raster::GrayImage;
use crate::scalar::Intensity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum NeighborhoodShape {
    #[default]
    Square,
    /// Pixels with `dx² + dy² <= radius²`.
    Disc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FilterParams {
    /// Neighborhood radius in pixels; 0 is the identity filter.
    pub radius: usize,
    pub shape: NeighborhoodShape,
}

impl Default for FilterParams {
    fn default() -> Self {
        Self {
            radius: 10,
            shape: NeighborhoodShape::Square,
        }
    }
}

impl FilterParams {
    pub fn square(radius: usize) -> Self {
        Self {
            radius,
            shape: NeighborhoodShape::Square,
        }
    }

    pub fn disc(radius: usize) -> Self {
        Self {
            radius,
            shape: NeighborhoodShape::Disc,
        }
    }

    /// Horizontal half-width of the neighborhood for each row offset
    /// `dy = -radius..=radius`.
    pub fn half_widths(&self) -> Vec<usize> {
        let r = self.radius as i64;
        (-r..=r)
            .map(|dy| match self.shape {
                NeighborhoodShape::Square => self.radius,
                NeighborhoodShape::Disc => isqrt((r * r - dy * dy) as u64) as usize,
            })
            .collect()
    }

    /// Offsets `(dx, dy)` of the full (untruncated) neighborhood.
    pub fn offsets(&self) -> Vec<(i64, i64)> {
        let r = self.radius as i64;
        self.half_widths()
            .into_iter()
            .zip(-r..=r)
            .flat_map(|(hw, dy)| {
                let hw = hw as i64;
                (-hw..=hw).map(move |dx| (dx, dy))
            })
            .collect()
    }
}

fn isqrt(n: u64) -> u64 {
    let mut x = (n as f64).sqrt() as u64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Median of the in-bounds neighborhood of every pixel.
///
/// Border pixels use the truncated neighborhood. When the neighborhood holds
/// an even number of pixels the lower median is taken.
pub fn median_filter<P: Intensity>(img: &GrayImage<P>, params: &FilterParams) -> GrayImage<P> {
    let (width, height) = img.dimensions();
    if params.radius == 0 || width == 0 || height == 0 {
        return img.clone();
    }
    let half_widths = params.half_widths();
    let mut out = vec![P::zero(); width * height];
    out.par_chunks_mut(width).enumerate().for_each_init(
        || WindowHistogram::new(P::BIT_DEPTH),
        |hist, (y, row)| filter_row(img, y, &half_widths, params.radius, hist, row),
    );
    GrayImage::new(width, height, out).expect("output has input dimensions")
}

fn filter_row<P: Intensity>(
    img: &GrayImage<P>,
    y: usize,
    half_widths: &[usize],
    radius: usize,
    hist: &mut WindowHistogram,
    out: &mut [P],
) {
    let (width, height) = img.dimensions();
    let y_lo = y.saturating_sub(radius);
    let y_hi = (y + radius).min(height - 1);
    let rows: Vec<(&[P], usize)> = (y_lo..=y_hi)
        .map(|yy| (img.row(yy), half_widths[yy + radius - y]))
        .collect();

    for &(src, hw) in &rows {
        for &v in &src[..=hw.min(width - 1)] {
            hist.insert(v.bin());
        }
    }
    hist.settle();
    out[0] = P::from_bin(hist.median);

    for x in 1..width {
        for &(src, hw) in &rows {
            if x > hw {
                hist.remove(src[x - 1 - hw].bin());
            }
            if x + hw < width {
                hist.insert(src[x + hw].bin());
            }
        }
        hist.settle();
        out[x] = P::from_bin(hist.median);
    }

    let last = width - 1;
    for &(src, hw) in &rows {
        for &v in &src[last.saturating_sub(hw)..] {
            hist.remove(v.bin());
        }
    }
    debug_assert_eq!(hist.count, 0);
    hist.median = 0;
    hist.below = 0;
}

/// Histogram of the pixels currently inside the window, tracking the lower
/// median `median` and the number of samples strictly below it.
struct WindowHistogram {
    fine: Vec<u32>,
    coarse: Vec<u32>,
    shift: u32,
    count: usize,
    median: usize,
    below: usize,
}

impl WindowHistogram {
    fn new(bit_depth: u32) -> Self {
        let shift = bit_depth / 2;
        Self {
            fine: vec![0; 1 << bit_depth],
            coarse: vec![0; 1 << (bit_depth - shift)],
            shift,
            count: 0,
            median: 0,
            below: 0,
        }
    }

    #[inline]
    fn insert(&mut self, v: usize) {
        self.fine[v] += 1;
        self.coarse[v >> self.shift] += 1;
        self.count += 1;
        if v < self.median {
            self.below += 1;
        }
    }

    #[inline]
    fn remove(&mut self, v: usize) {
        self.fine[v] -= 1;
        self.coarse[v >> self.shift] -= 1;
        self.count -= 1;
        if v < self.median {
            self.below -= 1;
        }
    }

    /// Moves `median` until `below <= rank < below + fine[median]`.
    fn settle(&mut self) {
        let rank = (self.count - 1) / 2;
        while self.below > rank {
            let v = self.prev_occupied(self.median);
            self.below -= self.fine[v] as usize;
            self.median = v;
        }
        while self.below + self.fine[self.median] as usize <= rank {
            self.below += self.fine[self.median] as usize;
            self.median = self.next_occupied(self.median);
        }
    }

    /// Largest occupied bin `< v`. Only called when one exists.
    fn prev_occupied(&self, v: usize) -> usize {
        let block = v >> self.shift;
        let start = block << self.shift;
        if let Some(b) = (start..v).rev().find(|&b| self.fine[b] > 0) {
            return b;
        }
        let cb = (0..block)
            .rev()
            .find(|&c| self.coarse[c] > 0)
            .expect("occupied bin below median");
        let lo = cb << self.shift;
        (lo..lo + (1 << self.shift))
            .rev()
            .find(|&b| self.fine[b] > 0)
            .expect("coarse count matches fine bins")
    }

    /// Smallest occupied bin `> v`. Only called when one exists.
    fn next_occupied(&self, v: usize) -> usize {
        let block = v >> self.shift;
        let end = (block + 1) << self.shift;
        if let Some(b) = (v + 1..end).find(|&b| self.fine[b] > 0) {
            return b;
        }
        let cb = (block + 1..self.coarse.len())
            .find(|&c| self.coarse[c] > 0)
            .expect("occupied bin above median");
        let lo = cb << self.shift;
        (lo..lo + (1 << self.shift))
            .find(|&b| self.fine[b] > 0)
            .expect("coarse count matches fine bins")
    }
}

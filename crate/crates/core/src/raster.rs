//! Raster containers: grayscale images, binary masks and z-stacks.
//!
//! All rasters are row-major with `(x, y) = (column, row)` addressing and the
//! origin at the top-left pixel.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Intensity;

/// A single-channel raster of `P` intensities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage<P> {
    width: usize,
    height: usize,
    pixels: Vec<P>,
}

impl<P: Intensity> GrayImage<P> {
    pub fn new(width: usize, height: usize, pixels: Vec<P>) -> Result<Self> {
        check_len(width, height, pixels.len())?;
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: P) -> Self {
        Self {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> P) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self { width, height, pixels }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn bit_depth(&self) -> u32 {
        P::BIT_DEPTH
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> P {
        self.pixels[y * self.width + x]
    }

    pub fn pixels(&self) -> &[P] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<P> {
        self.pixels
    }

    pub fn row(&self, y: usize) -> &[P] {
        &self.pixels[y * self.width..(y + 1) * self.width]
    }

    /// Smallest and largest intensity, `None` for an image without pixels.
    pub fn min_max(&self) -> Option<(P, P)> {
        let first = *self.pixels.first()?;
        Some(
            self.pixels
                .iter()
                .fold((first, first), |(lo, hi), &p| (lo.min(p), hi.max(p))),
        )
    }

    /// Intensity histogram with one bin per value `0..=max`.
    pub fn histogram(&self) -> Vec<u64> {
        let top = self.min_max().map_or(0, |(_, hi)| hi.bin());
        let mut hist = vec![0u64; top + 1];
        for &p in &self.pixels {
            hist[p.bin()] += 1;
        }
        hist
    }
}

/// Foreground/background mask. `true` marks foreground.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    foreground: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, foreground: Vec<bool>) -> Result<Self> {
        check_len(width, height, foreground.len())?;
        Ok(Self {
            width,
            height,
            foreground,
        })
    }

    /// All-background mask.
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            foreground: vec![false; width * height],
        }
    }

    pub fn full(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            foreground: vec![true; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut foreground = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                foreground.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            foreground,
        }
    }

    /// Mask with exactly the listed `(x, y)` pixels set.
    pub fn from_points(width: usize, height: usize, points: &[(usize, usize)]) -> Self {
        let mut mask = Self::empty(width, height);
        for &(x, y) in points {
            mask.set(x, y, true);
        }
        mask
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.foreground[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.foreground[y * self.width + x] = value;
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.foreground
    }

    pub fn foreground_count(&self) -> usize {
        self.foreground.iter().filter(|&&f| f).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.foreground.iter().any(|&f| f)
    }

    /// `(x, y)` of every foreground pixel in raster order.
    pub fn foreground_pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.foreground
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(move |(i, _)| (i % w, i / w))
    }

    pub fn ensure_same_dimensions(&self, other: &BinaryImage) -> Result<()> {
        if self.dimensions() != other.dimensions() {
            return Err(Error::DimensionMismatch {
                left: self.dimensions(),
                right: other.dimensions(),
            });
        }
        Ok(())
    }

    pub fn is_subset_of(&self, other: &BinaryImage) -> Result<bool> {
        self.ensure_same_dimensions(other)?;
        Ok(self.foreground.iter().zip(&other.foreground).all(|(&a, &b)| !a || b))
    }

    /// Number of pixels foreground in both masks.
    pub fn intersection_count(&self, other: &BinaryImage) -> Result<usize> {
        self.ensure_same_dimensions(other)?;
        Ok(self
            .foreground
            .iter()
            .zip(&other.foreground)
            .filter(|(&a, &b)| a && b)
            .count())
    }

    /// Number of pixels foreground here but not in `other`.
    pub fn difference_count(&self, other: &BinaryImage) -> Result<usize> {
        self.ensure_same_dimensions(other)?;
        Ok(self
            .foreground
            .iter()
            .zip(&other.foreground)
            .filter(|(&a, &b)| a && !b)
            .count())
    }

    pub fn union(&self, other: &BinaryImage) -> Result<BinaryImage> {
        self.ensure_same_dimensions(other)?;
        let foreground = self
            .foreground
            .iter()
            .zip(&other.foreground)
            .map(|(&a, &b)| a || b)
            .collect();
        Ok(BinaryImage {
            width: self.width,
            height: self.height,
            foreground,
        })
    }

    pub fn transpose(&self) -> BinaryImage {
        BinaryImage::from_fn(self.height, self.width, |x, y| self.get(y, x))
    }
}

/// Number of foreground pixels of `img`.
pub fn foreground_count(img: &BinaryImage) -> usize {
    img.foreground_count()
}

/// Ordered sequence of optical sections, slice 1 first.
#[derive(Debug, Clone, PartialEq)]
pub struct ZStack<P> {
    slices: Vec<GrayImage<P>>,
    /// Distance between planes in micrometres, carried as metadata only.
    spacing_um: Option<f64>,
}

impl<P: Intensity> ZStack<P> {
    pub fn new(slices: Vec<GrayImage<P>>) -> Result<Self> {
        let first = slices.first().ok_or(Error::EmptyStack)?;
        let expected = first.dimensions();
        for (i, s) in slices.iter().enumerate().skip(1) {
            if s.dimensions() != expected {
                return Err(Error::SliceDimensions {
                    slice: i + 1,
                    expected,
                    found: s.dimensions(),
                });
            }
        }
        Ok(Self {
            slices,
            spacing_um: None,
        })
    }

    pub fn with_spacing(mut self, spacing_um: f64) -> Self {
        self.spacing_um = Some(spacing_um);
        self
    }

    pub fn spacing_um(&self) -> Option<f64> {
        self.spacing_um
    }

    /// Number of slices `m`.
    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn slices(&self) -> &[GrayImage<P>] {
        &self.slices
    }

    pub fn dimensions(&self) -> (usize, usize) {
        self.slices[0].dimensions()
    }

    pub fn reversed(&self) -> Self {
        let mut slices = self.slices.clone();
        slices.reverse();
        Self {
            slices,
            spacing_um: self.spacing_um,
        }
    }

    pub fn max_projection(&self) -> GrayImage<P> {
        max_projection(self)
    }
}

/// Per-pixel maximum over every slice of `stack`.
pub fn max_projection<P: Intensity>(stack: &ZStack<P>) -> GrayImage<P> {
    let (width, height) = stack.dimensions();
    let mut pixels = stack.slices[0].pixels.clone();
    if width > 0 {
        pixels.par_chunks_mut(width).enumerate().for_each(|(y, row)| {
            for slice in &stack.slices[1..] {
                for (acc, &v) in row.iter_mut().zip(slice.row(y)) {
                    if v > *acc {
                        *acc = v;
                    }
                }
            }
        });
    }
    GrayImage { width, height, pixels }
}

fn check_len(width: usize, height: usize, actual: usize) -> Result<()> {
    let expected = width * height;
    if actual != expected {
        return Err(Error::BufferSize {
            width,
            height,
            expected,
            actual,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gray(width: usize, height: usize, px: &[u8]) -> GrayImage<u8> {
        GrayImage::new(width, height, px.to_vec()).unwrap()
    }

    #[test]
    fn buffer_length_is_checked() {
        let err = GrayImage::<u8>::new(3, 2, vec![0; 5]).unwrap_err();
        assert!(matches!(
            err,
            Error::BufferSize {
                expected: 6,
                actual: 5,
                ..
            }
        ));
        assert!(BinaryImage::new(2, 2, vec![true; 3]).is_err());
    }

    #[test]
    fn single_slice_projection_is_identity() {
        let s = gray(3, 2, &[1, 2, 3, 4, 5, 6]);
        let stack = ZStack::new(vec![s.clone()]).unwrap();
        assert_eq!(max_projection(&stack), s);
    }

    #[test]
    fn two_slice_projection() {
        let stack = ZStack::new(vec![gray(2, 1, &[5, 0]), gray(2, 1, &[3, 9])]).unwrap();
        assert_eq!(max_projection(&stack).pixels(), &[5, 9]);
    }

    #[test]
    fn mismatched_slice_names_its_index() {
        let err = ZStack::new(vec![gray(2, 2, &[0; 4]), gray(2, 2, &[0; 4]), gray(3, 1, &[0; 3])]).unwrap_err();
        assert_eq!(
            err,
            Error::SliceDimensions {
                slice: 3,
                expected: (2, 2),
                found: (3, 1)
            }
        );
        assert!(err.to_string().contains("slice 3"));
        assert_eq!(ZStack::<u8>::new(vec![]).unwrap_err(), Error::EmptyStack);
    }

    #[test]
    fn foreground_counts() {
        assert_eq!(foreground_count(&BinaryImage::empty(3, 3)), 0);
        assert_eq!(foreground_count(&BinaryImage::full(3, 3)), 9);
        assert_eq!(foreground_count(&BinaryImage::from_points(3, 3, &[(0, 0), (2, 1)])), 2);
    }

    #[test]
    fn histogram_covers_up_to_max() {
        let img = GrayImage::<u16>::new(2, 2, vec![0, 3, 3, 1]).unwrap();
        assert_eq!(img.histogram(), vec![1, 1, 0, 2]);
        assert_eq!(img.bit_depth(), 16);
    }

    fn stack_strategy() -> impl Strategy<Value = Vec<Vec<u16>>> {
        (1usize..6).prop_flat_map(|m| prop::collection::vec(prop::collection::vec(any::<u16>(), 12), m))
    }

    proptest! {
        #[test]
        fn projection_bounds_every_slice(slices in stack_strategy()) {
            let stack = ZStack::new(slices.iter().map(|p| GrayImage::new(4, 3, p.clone()).unwrap()).collect()).unwrap();
            let proj = max_projection(&stack);
            for s in stack.slices() {
                for (a, b) in proj.pixels().iter().zip(s.pixels()) {
                    prop_assert!(a >= b);
                }
            }
            let rev = max_projection(&stack.reversed());
            prop_assert_eq!(&rev, &proj);
        }

        #[test]
        fn projection_of_identical_slices(px in prop::collection::vec(any::<u8>(), 20), m in 1usize..5) {
            let s = GrayImage::new(5, 4, px).unwrap();
            let stack = ZStack::new(vec![s.clone(); m]).unwrap();
            prop_assert_eq!(max_projection(&stack), s);
        }
    }
}

//! Salt-and-pepper removal: median filtering followed by binarization.

mod huang;
mod median;

use rayon::prelude::*;

pub use huang::{huang_threshold, huang_threshold_histogram, membership_entropy, ThresholdResult};
pub use median::{median_filter, FilterParams, NeighborhoodShape};

use crate::error::{Error, Result};
use crate::raster::{max_projection, BinaryImage, GrayImage, ZStack};
use crate::scalar::{FuzzyScalar, Intensity};

/// Foreground iff the pixel value is strictly greater than `level`.
pub fn binarize<P: Intensity>(img: &GrayImage<P>, level: P) -> BinaryImage {
    let fg = img.pixels().iter().map(|&v| v > level).collect();
    BinaryImage::new(img.width(), img.height(), fg).expect("mask has image dimensions")
}

/// How each preprocessed image is binarized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdMode {
    /// Per-image Huang level.
    #[default]
    Huang,
    /// The same level for every image. Levels above the pixel range give an
    /// empty mask.
    Fixed(u64),
}

/// One image after filtering and thresholding.
#[derive(Debug, Clone, PartialEq)]
pub struct Binarized<P, F> {
    pub filtered: GrayImage<P>,
    pub level: P,
    /// `None` for fixed thresholds.
    pub fuzziness: Option<F>,
    pub mask: BinaryImage,
}

pub fn preprocess_image<P: Intensity, F: FuzzyScalar>(
    img: &GrayImage<P>,
    params: &FilterParams,
    mode: ThresholdMode,
) -> Result<Binarized<P, F>> {
    let filtered = median_filter(img, params);
    let (level, fuzziness) = match mode {
        ThresholdMode::Huang => {
            let t = huang_threshold::<P, F>(&filtered)?;
            (t.level, Some(t.fuzziness))
        }
        ThresholdMode::Fixed(level) => {
            let level = usize::try_from(level)
                .ok()
                .and_then(P::from_usize)
                .unwrap_or_else(P::max_value);
            (level, None)
        }
    };
    let mask = binarize(&filtered, level);
    Ok(Binarized {
        filtered,
        level,
        fuzziness,
        mask,
    })
}

/// The maximum projection and every slice, each filtered and binarized on
/// its own.
#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessedStack<P, F> {
    pub projection_raw: GrayImage<P>,
    pub projection: Binarized<P, F>,
    /// In stack order.
    pub slices: Vec<Binarized<P, F>>,
}

impl<P: Intensity, F: FuzzyScalar> PreprocessedStack<P, F> {
    pub fn projection_mask(&self) -> &BinaryImage {
        &self.projection.mask
    }

    pub fn slice_masks(&self) -> Vec<&BinaryImage> {
        self.slices.iter().map(|s| &s.mask).collect()
    }

    pub fn slice_levels(&self) -> Vec<P> {
        self.slices.iter().map(|s| s.level).collect()
    }
}

pub fn preprocess_stack<P: Intensity, F: FuzzyScalar>(
    stack: &ZStack<P>,
    params: &FilterParams,
) -> Result<PreprocessedStack<P, F>> {
    preprocess_stack_with(stack, params, ThresholdMode::Huang)
}

/// Projection errors are reported first; otherwise the error of the first
/// failing slice in stack order.
pub fn preprocess_stack_with<P: Intensity, F: FuzzyScalar>(
    stack: &ZStack<P>,
    params: &FilterParams,
    mode: ThresholdMode,
) -> Result<PreprocessedStack<P, F>> {
    let projection_raw = max_projection(stack);
    let projection =
        preprocess_image(&projection_raw, params, mode).map_err(|e| Error::InProjection { source: Box::new(e) });
    let slices: Vec<Result<Binarized<P, F>>> = stack
        .slices()
        .par_iter()
        .enumerate()
        .map(|(i, s)| preprocess_image(s, params, mode).map_err(|e| Error::in_slice(i + 1, e)))
        .collect();
    let projection = projection?;
    let slices = slices.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(PreprocessedStack {
        projection_raw,
        projection,
        slices,
    })
}

/// Per-slice errors for every slice, in stack order. Used to report all
/// degenerate slices at once.
pub fn slice_errors<P: Intensity, F: FuzzyScalar>(
    stack: &ZStack<P>,
    params: &FilterParams,
    mode: ThresholdMode,
) -> Vec<Error> {
    stack
        .slices()
        .par_iter()
        .enumerate()
        .filter_map(|(i, s)| {
            preprocess_image::<P, F>(s, params, mode)
                .err()
                .map(|e| Error::in_slice(i + 1, e))
        })
        .collect()
}

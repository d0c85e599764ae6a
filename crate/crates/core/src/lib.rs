//! Extraction of the persistent structure of a microscopy z-stack.
//!
//! The maximum-intensity projection and every slice are median filtered and
//! binarized. The projection mask is then filtered level by level against
//! the slices: a projection component survives one more level for each
//! consecutive slice it touches. Components touching every slice form the
//! persistent structure (the neuron); the rest are transient. The
//! 0-dimensional barcode records when each component is born.
//!
//! Image types are generic over the pixel type ([`Intensity`]) and the
//! fuzziness measure of the automatic threshold over a float type
//! ([`FuzzyScalar`]). Percentages in [`metrics`] are exact rationals.

pub mod error;
pub mod labeling;
pub mod metrics;
pub mod persistence;
pub mod preprocess;
pub mod raster;
pub mod scalar;

pub use error::{Error, Result};
pub use labeling::{component_intersects, component_mask, label_components, ComponentStats, Connectivity, LabelImage};
pub use metrics::{compare_tracings, Percent, TracingComparison};
pub use persistence::{
    build_filtration, compute_barcode, compute_barcode_with, extract_persistent_structure, levels_equal,
    nested_levels_equal, persistence_color_map, Barcode, BarcodeStrategy, ColorMap, Filtration, Interval,
    PersistentStructure, Warning,
};
pub use preprocess::{
    binarize, huang_threshold, median_filter, preprocess_stack, preprocess_stack_with, FilterParams, NeighborhoodShape,
    ThresholdMode, ThresholdResult,
};
pub use raster::{foreground_count, max_projection, BinaryImage, GrayImage, ZStack};
pub use scalar::{FuzzyScalar, Intensity};

/// 8-bit grayscale image.
pub type Gray8 = GrayImage<u8>;
/// 16-bit grayscale image.
pub type Gray16 = GrayImage<u16>;
pub type Stack8 = ZStack<u8>;
pub type Stack16 = ZStack<u16>;
/// Huang threshold of an 8-bit image with double-precision fuzziness.
pub type Threshold8 = ThresholdResult<u8, f64>;
pub type Threshold16 = ThresholdResult<u16, f64>;
pub type Preprocessed8 = preprocess::PreprocessedStack<u8, f64>;
pub type Preprocessed16 = preprocess::PreprocessedStack<u16, f64>;

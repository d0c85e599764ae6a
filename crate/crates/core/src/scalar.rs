//! Scalar traits the pipeline is generic over.
//!
//! Pixel storage is any unsigned integer type implementing [`Intensity`]
//! (`u8` and `u16` are provided). Fuzziness scores used by the Huang
//! threshold are computed in any [`FuzzyScalar`] (`f32` or `f64`).

use std::fmt::Debug;
use std::hash::Hash;

use num_traits::{AsPrimitive, Float, FromPrimitive, PrimInt, Unsigned};

/// Unsigned integer pixel intensity.
pub trait Intensity:
    PrimInt + Unsigned + AsPrimitive<usize> + FromPrimitive + Hash + Debug + Default + Send + Sync + 'static
{
    /// Number of bits per sample.
    const BIT_DEPTH: u32;

    /// Converts a histogram bin index back into an intensity.
    ///
    /// Bins are always produced from pixel values, so the index fits.
    fn from_bin(bin: usize) -> Self {
        Self::from_usize(bin).expect("histogram bin exceeds pixel range")
    }

    fn bin(self) -> usize {
        self.as_()
    }
}

impl Intensity for u8 {
    const BIT_DEPTH: u32 = 8;
}

impl Intensity for u16 {
    const BIT_DEPTH: u32 = 16;
}

/// Floating-point type used for fuzziness measures.
pub trait FuzzyScalar: Float + FromPrimitive + Debug + Send + Sync + 'static {
    fn from_count(count: u64) -> Self {
        Self::from_u64(count).expect("count representable as float")
    }
}

impl FuzzyScalar for f32 {}
impl FuzzyScalar for f64 {}

//! Comparison of an automatic tracing against a manual reference mask.
//!
//! Three percentages are reported: branch count ratio, recall of the manual
//! area, and spill of the automatic tracing into the manual complement. All
//! of them are exact ratios of pixel (or branch) counts.

mod percent;
mod thinning;

pub use percent::Percent;
pub use thinning::{endpoints, thin};

use crate::error::Result;
use crate::raster::BinaryImage;

/// `100 * auto / manual`.
pub fn branch_percentage(auto_count: usize, manual_count: usize) -> Result<Percent> {
    Percent::of(auto_count as u64, manual_count as u64, "manual tracing has no branches")
}

/// `100 * |auto ∩ manual| / |manual|`.
pub fn area_recall(auto: &BinaryImage, manual: &BinaryImage) -> Result<Percent> {
    let inter = auto.intersection_count(manual)?;
    Percent::of(
        inter as u64,
        manual.foreground_count() as u64,
        "manual tracing is empty",
    )
}

/// `100 * |auto \ manual| / |complement of manual|`.
pub fn area_spill(auto: &BinaryImage, manual: &BinaryImage) -> Result<Percent> {
    let spill = auto.difference_count(manual)?;
    let complement = manual.width() * manual.height() - manual.foreground_count();
    Percent::of(spill as u64, complement as u64, "manual tracing covers the whole image")
}

/// Branch count of a tracing: endpoints of its thinned skeleton.
pub fn count_branches(mask: &BinaryImage) -> usize {
    endpoints(&thin(mask)).len()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RawCounts {
    pub auto_branches: usize,
    pub manual_branches: usize,
    pub area_auto: usize,
    pub area_intersection: usize,
    pub area_manual: usize,
    pub area_spill: usize,
    pub area_manual_complement: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TracingComparison {
    pub branch_pct: Percent,
    pub area_recall_pct: Percent,
    pub area_spill_pct: Percent,
    pub raw: RawCounts,
}

pub fn compare_tracings(auto: &BinaryImage, manual: &BinaryImage) -> Result<TracingComparison> {
    auto.ensure_same_dimensions(manual)?;
    let raw = RawCounts {
        auto_branches: count_branches(auto),
        manual_branches: count_branches(manual),
        area_auto: auto.foreground_count(),
        area_intersection: auto.intersection_count(manual)?,
        area_manual: manual.foreground_count(),
        area_spill: auto.difference_count(manual)?,
        area_manual_complement: manual.width() * manual.height() - manual.foreground_count(),
    };
    debug_assert_eq!(raw.area_auto, raw.area_intersection + raw.area_spill);
    Ok(TracingComparison {
        branch_pct: branch_percentage(raw.auto_branches, raw.manual_branches)?,
        area_recall_pct: area_recall(auto, manual)?,
        area_spill_pct: area_spill(auto, manual)?,
        raw,
    })
}

/// Mean of each metric over several comparisons.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeanComparison {
    pub count: usize,
    pub branch_pct: Percent,
    pub area_recall_pct: Percent,
    pub area_spill_pct: Percent,
}

pub fn mean_comparison(items: &[TracingComparison]) -> Option<MeanComparison> {
    Some(MeanComparison {
        count: items.len(),
        branch_pct: Percent::mean(items.iter().map(|c| &c.branch_pct))?,
        area_recall_pct: Percent::mean(items.iter().map(|c| &c.area_recall_pct))?,
        area_spill_pct: Percent::mean(items.iter().map(|c| &c.area_spill_pct))?,
    })
}

//! Accuracy of automatic tracings against manual reference masks.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use persistack_core::metrics::{mean_comparison, MeanComparison, RawCounts};
use persistack_core::{compare_tracings, Percent, TracingComparison};
use serde::Serialize;

use crate::error::{CliError, Result, Stage, StageExt};
use crate::io::{load_mask, write_json};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PercentValue {
    /// Rounded half up to two decimals.
    pub rounded: String,
    /// Exact value as `numerator/denominator`.
    pub exact: String,
}

impl From<&Percent> for PercentValue {
    fn from(p: &Percent) -> Self {
        Self {
            rounded: p.to_string(),
            exact: p.ratio().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RawRecord {
    pub auto_branches: usize,
    pub manual_branches: usize,
    pub area_auto: usize,
    pub area_intersection: usize,
    pub area_manual: usize,
    pub area_spill: usize,
    pub area_manual_complement: usize,
}

impl From<RawCounts> for RawRecord {
    fn from(r: RawCounts) -> Self {
        Self {
            auto_branches: r.auto_branches,
            manual_branches: r.manual_branches,
            area_auto: r.area_auto,
            area_intersection: r.area_intersection,
            area_manual: r.area_manual,
            area_spill: r.area_spill,
            area_manual_complement: r.area_manual_complement,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairRecord {
    pub name: String,
    pub auto: PathBuf,
    pub manual: PathBuf,
    /// (1) automatic branches as a percentage of manual branches.
    pub branches: PercentValue,
    /// (2) manual area recovered.
    pub area_recall: PercentValue,
    /// (3) automatic area outside the manual tracing.
    pub area_spill: PercentValue,
    pub raw: RawRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeanRecord {
    pub count: usize,
    pub branches: PercentValue,
    pub area_recall: PercentValue,
    pub area_spill: PercentValue,
}

impl From<&MeanComparison> for MeanRecord {
    fn from(m: &MeanComparison) -> Self {
        Self {
            count: m.count,
            branches: (&m.branch_pct).into(),
            area_recall: (&m.area_recall_pct).into(),
            area_spill: (&m.area_spill_pct).into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonReport {
    pub pairs: Vec<PairRecord>,
    pub mean: Option<MeanRecord>,
    #[serde(skip)]
    pub comparisons: Vec<TracingComparison>,
}

/// An automatic/manual mask pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskPair {
    pub name: String,
    pub auto: PathBuf,
    pub manual: PathBuf,
}

impl MaskPair {
    pub fn new(auto: impl Into<PathBuf>, manual: impl Into<PathBuf>) -> Self {
        let auto = auto.into();
        let name = auto
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self {
            name,
            auto,
            manual: manual.into(),
        }
    }
}

/// Pairs `dir/auto/<name>` with `dir/manual/<name>` for every file in
/// `dir/auto`, sorted by name.
pub fn dataset_pairs(dir: &Path) -> Result<Vec<MaskPair>> {
    let auto_dir = dir.join("auto");
    let manual_dir = dir.join("manual");
    let mut names: Vec<_> = std::fs::read_dir(&auto_dir)
        .map_err(|e| CliError::io(&auto_dir, e))?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_file())
        .map(|e| e.file_name())
        .collect();
    names.sort();
    if names.is_empty() {
        return Err(CliError::NoInput(auto_dir.display().to_string()));
    }
    names
        .into_iter()
        .map(|name| {
            let manual = manual_dir.join(&name);
            if !manual.is_file() {
                return Err(CliError::Config(format!(
                    "{} has no manual counterpart {}",
                    auto_dir.join(&name).display(),
                    manual.display()
                )));
            }
            Ok(MaskPair::new(auto_dir.join(&name), manual))
        })
        .collect()
}

pub fn compare_pairs(pairs: &[MaskPair]) -> Result<ComparisonReport> {
    let mut records = Vec::with_capacity(pairs.len());
    let mut comparisons = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let auto = load_mask(&pair.auto).stage(Stage::Load)?;
        let manual = load_mask(&pair.manual).stage(Stage::Load)?;
        let c = compare_tracings(&auto, &manual)
            .map_err(|e| CliError::decode(&pair.auto, None, format!("against {}: {e}", pair.manual.display())))
            .stage(Stage::Compare)?;
        records.push(PairRecord {
            name: pair.name.clone(),
            auto: pair.auto.clone(),
            manual: pair.manual.clone(),
            branches: (&c.branch_pct).into(),
            area_recall: (&c.area_recall_pct).into(),
            area_spill: (&c.area_spill_pct).into(),
            raw: c.raw.into(),
        });
        comparisons.push(c);
    }
    let mean = mean_comparison(&comparisons).map(|m| MeanRecord::from(&m));
    Ok(ComparisonReport {
        pairs: records,
        mean,
        comparisons,
    })
}

/// Aligned table with columns (1), (2), (3), one row per pair and a mean
/// row when there is more than one pair.
pub fn format_table(report: &ComparisonReport) -> String {
    let mut rows: Vec<[String; 4]> = vec![[String::new(), "(1)".into(), "(2)".into(), "(3)".into()]];
    for p in &report.pairs {
        rows.push([
            p.name.clone(),
            format!("{}%", p.branches.rounded),
            format!("{}%", p.area_recall.rounded),
            format!("{}%", p.area_spill.rounded),
        ]);
    }
    if let Some(m) = report.mean.as_ref().filter(|_| report.pairs.len() > 1) {
        rows.push([
            "mean".into(),
            format!("{}%", m.branches.rounded),
            format!("{}%", m.area_recall.rounded),
            format!("{}%", m.area_spill.rounded),
        ]);
    }
    let mut widths = [0usize; 4];
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    for row in &rows {
        let _ = write!(out, "{:<w$}", row[0], w = widths[0]);
        for (cell, w) in row[1..].iter().zip(&widths[1..]) {
            let _ = write!(out, "  {cell:>w$}");
        }
        out.push('\n');
    }
    out.push_str("(1) branches found, (2) manual area recovered, (3) area outside the manual tracing\n");
    out
}

/// Writes `comparison.json` and `comparison.txt` into `out_dir`.
pub fn write_comparison(report: &ComparisonReport, out_dir: &Path) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let json = out_dir.join("comparison.json");
    write_json(&json, report)?;
    let table = out_dir.join("comparison.txt");
    std::fs::write(&table, format_table(report)).map_err(|e| CliError::io(&table, e))?;
    Ok((json, table))
}

pub fn compare_command(auto: &Path, manual: &Path, out_dir: &Path) -> Result<ComparisonReport> {
    let report = compare_pairs(&[MaskPair::new(auto, manual)])?;
    write_comparison(&report, out_dir).stage(Stage::Write)?;
    Ok(report)
}

pub fn compare_dataset(dir: &Path, out_dir: &Path) -> Result<ComparisonReport> {
    let pairs = dataset_pairs(dir).stage(Stage::Load)?;
    let report = compare_pairs(&pairs)?;
    write_comparison(&report, out_dir).stage(Stage::Write)?;
    Ok(report)
}

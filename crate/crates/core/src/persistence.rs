//! Filtration of the binarized maximum projection and its 0-dimensional
//! persistence barcode.
//!
//! The top level `D^m` is the projection mask. Level `D^(m-n)` keeps the
//! components of `D^(m-n+1)` that intersect slice `n`. Components never
//! split or merge between levels, so the whole filtration is stored as one
//! labeling of `D^m` plus, per component, its survival depth: the number of
//! leading slices `1..=n` it intersects. A component of depth `d` is born at
//! level `m - d` and lives until `m`.

use std::borrow::Borrow;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::labeling::{label_components, Connectivity, LabelImage};
use crate::raster::BinaryImage;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtration {
    levels: usize,
    connectivity: Connectivity,
    top: LabelImage,
    /// Indexed by `id - 1`.
    survival: Vec<usize>,
    areas: Vec<usize>,
}

/// Builds the filtration of `projection_mask` against `slice_masks`, slice 1
/// first.
pub fn build_filtration<M>(
    projection_mask: &BinaryImage,
    slice_masks: &[M],
    connectivity: Connectivity,
) -> Result<Filtration>
where
    M: Borrow<BinaryImage> + Sync,
{
    if slice_masks.is_empty() {
        return Err(Error::NoSliceMasks);
    }
    for s in slice_masks {
        projection_mask.ensure_same_dimensions(s.borrow())?;
    }
    let top = label_components(projection_mask, connectivity);
    let k = top.component_count() as usize;

    // hits[n][c]: component c+1 meets slice n+1.
    let hits: Vec<Vec<bool>> = slice_masks
        .par_iter()
        .map(|s| {
            let mut hit = vec![false; k];
            for (&l, &f) in top.labels().iter().zip(s.borrow().as_slice()) {
                if f && l > 0 {
                    hit[l as usize - 1] = true;
                }
            }
            hit
        })
        .collect();

    let survival = (0..k).map(|c| hits.iter().take_while(|h| h[c]).count()).collect();
    let areas = top.areas();
    Ok(Filtration {
        levels: slice_masks.len(),
        connectivity,
        top,
        survival,
        areas,
    })
}

impl Filtration {
    /// `m`, the number of slices; levels run `0..=m`.
    pub fn level_count(&self) -> usize {
        self.levels
    }

    pub fn connectivity(&self) -> Connectivity {
        self.connectivity
    }

    /// Labeling of `D^m`.
    pub fn top(&self) -> &LabelImage {
        &self.top
    }

    pub fn component_count(&self) -> u32 {
        self.top.component_count()
    }

    pub fn survival_depths(&self) -> &[usize] {
        &self.survival
    }

    pub fn survival_depth(&self, id: u32) -> Result<usize> {
        self.index(id).map(|i| self.survival[i])
    }

    pub fn born_level(&self, id: u32) -> Result<usize> {
        self.survival_depth(id).map(|d| self.levels - d)
    }

    pub fn area(&self, id: u32) -> Result<usize> {
        self.index(id).map(|i| self.areas[i])
    }

    fn index(&self, id: u32) -> Result<usize> {
        if id == 0 || id > self.component_count() {
            return Err(Error::UnknownComponent {
                id,
                count: self.component_count(),
            });
        }
        Ok(id as usize - 1)
    }

    fn check_level(&self, level: usize) -> Result<()> {
        if level > self.levels {
            return Err(Error::LevelOutOfRange {
                level,
                max: self.levels,
            });
        }
        Ok(())
    }

    /// The binary image `D^level`.
    pub fn materialize(&self, level: usize) -> Result<BinaryImage> {
        self.check_level(level)?;
        let m = self.levels;
        Ok(self.top.select(|l| m - self.survival[l as usize - 1] <= level))
    }

    /// Foreground count of `D^level`, without materializing it.
    pub fn level_area(&self, level: usize) -> Result<usize> {
        self.check_level(level)?;
        Ok(self
            .survival
            .iter()
            .zip(&self.areas)
            .filter(|(&d, _)| self.levels - d <= level)
            .map(|(_, &a)| a)
            .sum())
    }

    /// Largest level `s` with `D^j = D^s` for every `j < s`.
    pub fn stable_level(&self) -> usize {
        let m = self.levels;
        let first_positive_birth = self.survival.iter().map(|&d| m - d).filter(|&b| b > 0).min();
        first_positive_birth.map_or(m, |b| b - 1)
    }
}

/// Whether two masks have identical foreground sets, compared by SHA-256
/// digest of their canonical encoding.
pub fn levels_equal(a: &BinaryImage, b: &BinaryImage) -> Result<bool> {
    a.ensure_same_dimensions(b)?;
    Ok(mask_digest(a) == mask_digest(b))
}

/// Equality test for nested masks (`a ⊆ b`): they are equal iff their
/// foreground counts agree. The caller guarantees nesting.
pub fn nested_levels_equal(a: &BinaryImage, b: &BinaryImage) -> Result<bool> {
    a.ensure_same_dimensions(b)?;
    debug_assert!(a.is_subset_of(b)?);
    Ok(a.foreground_count() == b.foreground_count())
}

/// Digest over width, height (little-endian `u64`) and the foreground bits
/// packed MSB-first in raster order.
pub fn mask_digest(mask: &BinaryImage) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update((mask.width() as u64).to_le_bytes());
    hasher.update((mask.height() as u64).to_le_bytes());
    for chunk in mask.as_slice().chunks(8) {
        let byte = chunk
            .iter()
            .enumerate()
            .fold(0u8, |acc, (i, &f)| acc | ((f as u8) << (7 - i)));
        hasher.update([byte]);
    }
    hasher.finalize().into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    /// Component id in the labeling of `D^m`.
    pub id: u32,
    pub birth: usize,
    pub death: usize,
    pub area: usize,
}

impl Interval {
    pub fn persistence(&self) -> usize {
        self.death - self.birth
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Barcode {
    pub levels: usize,
    pub connectivity: Connectivity,
    /// Sorted by `(birth, id)`.
    pub intervals: Vec<Interval>,
}

impl Barcode {
    /// Number of intervals born at each level `0..=m`.
    pub fn births_histogram(&self) -> Vec<usize> {
        let mut hist = vec![0; self.levels + 1];
        for iv in &self.intervals {
            hist[iv.birth] += 1;
        }
        hist
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BarcodeStrategy {
    /// Walk the levels, skipping any level equal to the one below it.
    #[default]
    Incremental,
    /// Materialize and label every level, matching components by pixel
    /// containment.
    Naive,
}

pub fn compute_barcode(filtration: &Filtration) -> Barcode {
    compute_barcode_with(filtration, BarcodeStrategy::Incremental)
}

pub fn compute_barcode_with(filtration: &Filtration, strategy: BarcodeStrategy) -> Barcode {
    let mut intervals = match strategy {
        BarcodeStrategy::Incremental => incremental_intervals(filtration),
        BarcodeStrategy::Naive => naive_intervals(filtration),
    };
    intervals.sort_by_key(|iv| (iv.birth, iv.id));
    Barcode {
        levels: filtration.levels,
        connectivity: filtration.connectivity,
        intervals,
    }
}

fn incremental_intervals(f: &Filtration) -> Vec<Interval> {
    let m = f.levels;
    let mut born_at: Vec<Vec<u32>> = vec![Vec::new(); m + 1];
    let mut area_at = vec![0usize; m + 1];
    for (c, (&d, &a)) in f.survival.iter().zip(&f.areas).enumerate() {
        born_at[m - d].push(c as u32 + 1);
        area_at[m - d] += a;
    }

    let mut intervals = Vec::with_capacity(f.survival.len());
    let mut level_area = 0usize;
    for (level, ids) in born_at.into_iter().enumerate() {
        let previous = level_area;
        level_area += area_at[level];
        // D^(level-1) ⊆ D^level, so equal areas mean equal levels.
        if level > 0 && previous == level_area {
            continue;
        }
        intervals.extend(ids.into_iter().map(|id| Interval {
            id,
            birth: level,
            death: m,
            area: f.areas[id as usize - 1],
        }));
    }
    intervals
}

fn naive_intervals(f: &Filtration) -> Vec<Interval> {
    let m = f.levels;
    let top = f.top.labels();
    let mut intervals = Vec::new();
    let mut previous: Option<BinaryImage> = None;
    for level in 0..=m {
        let current = f.materialize(level).expect("level in range");
        let labels = label_components(&current, f.connectivity);
        let mut seen_before = vec![false; labels.component_count() as usize];
        let mut area = vec![0usize; labels.component_count() as usize];
        let mut top_id = vec![0u32; labels.component_count() as usize];
        for (i, &l) in labels.labels().iter().enumerate() {
            if l == 0 {
                continue;
            }
            let c = l as usize - 1;
            area[c] += 1;
            top_id[c] = top[i];
            if previous.as_ref().is_some_and(|p| p.as_slice()[i]) {
                seen_before[c] = true;
            }
        }
        for c in 0..labels.component_count() as usize {
            if !seen_before[c] {
                intervals.push(Interval {
                    id: top_id[c],
                    birth: level,
                    death: m,
                    area: area[c],
                });
            }
        }
        previous = Some(current);
    }
    intervals
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Warning {
    /// No projection component intersects every slice.
    NoPersistentStructure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PersistentStructure {
    /// `D^0`.
    pub mask: BinaryImage,
    /// Ids (in `D^m`) of the components making up the structure.
    pub component_ids: Vec<u32>,
    pub warning: Option<Warning>,
}

/// The components alive over the whole filtration, i.e. `D^0`.
pub fn extract_persistent_structure(filtration: &Filtration) -> PersistentStructure {
    let m = filtration.levels;
    let component_ids: Vec<u32> = filtration
        .survival
        .iter()
        .enumerate()
        .filter(|(_, &d)| d == m)
        .map(|(c, _)| c as u32 + 1)
        .collect();
    let mask = filtration.materialize(0).expect("level 0 exists");
    let warning = component_ids.is_empty().then_some(Warning::NoPersistentStructure);
    PersistentStructure {
        mask,
        component_ids,
        warning,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PaletteEntry {
    pub depth: usize,
    pub rgb: [u8; 3],
}

/// Components colored by survival depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorMap {
    pub width: usize,
    pub height: usize,
    /// 0 for background, `depth + 1` for component pixels.
    pub indices: Vec<u16>,
    /// One entry per depth `0..=m`; palette index `i + 1` is `palette[i]`.
    pub palette: Vec<PaletteEntry>,
}

impl ColorMap {
    pub fn depth_at(&self, x: usize, y: usize) -> Option<usize> {
        match self.indices[y * self.width + x] {
            0 => None,
            i => Some(i as usize - 1),
        }
    }
}

pub const GRAY: [u8; 3] = [128, 128, 128];
pub const GREEN: [u8; 3] = [0, 200, 0];
pub const ORANGE: [u8; 3] = [255, 140, 0];
pub const YELLOW: [u8; 3] = [255, 230, 0];
pub const RED: [u8; 3] = [220, 0, 0];
pub const BLUE: [u8; 3] = [0, 64, 255];

/// Colors for depths `0..=m`: depth `m` blue, depths 1 to 4 green, orange,
/// yellow and red, depths between 4 and `m` blended from red toward blue,
/// and projection-only components (depth 0) gray.
pub fn persistence_palette(levels: usize) -> Vec<PaletteEntry> {
    (0..=levels)
        .map(|depth| {
            let rgb = match depth {
                d if d == levels => BLUE,
                0 => GRAY,
                1 => GREEN,
                2 => ORANGE,
                3 => YELLOW,
                4 => RED,
                d => {
                    let t = (d - 4) as f64 / (levels - 4) as f64;
                    let mix = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * t).round() as u8;
                    [mix(RED[0], BLUE[0]), mix(RED[1], BLUE[1]), mix(RED[2], BLUE[2])]
                }
            };
            PaletteEntry { depth, rgb }
        })
        .collect()
}

pub fn persistence_color_map(filtration: &Filtration) -> ColorMap {
    let top = &filtration.top;
    let indices = top
        .labels()
        .iter()
        .map(|&l| match l {
            0 => 0,
            l => filtration.survival[l as usize - 1] as u16 + 1,
        })
        .collect();
    ColorMap {
        width: top.width(),
        height: top.height(),
        indices,
        palette: persistence_palette(filtration.levels),
    }
}

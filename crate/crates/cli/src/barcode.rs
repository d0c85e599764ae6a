//! Barcode JSON document and bar-chart rendering.

use std::path::Path;

use image::{Rgb, RgbImage};
use persistack_core::persistence::persistence_palette;
use persistack_core::{Barcode, Connectivity, Interval};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::io::write_json;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalRecord {
    pub id: u32,
    pub birth: usize,
    pub death: usize,
    pub persistence: usize,
    pub area: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarcodeDocument {
    pub levels: usize,
    pub connectivity: u32,
    pub intervals: Vec<IntervalRecord>,
}

impl From<&Barcode> for BarcodeDocument {
    fn from(b: &Barcode) -> Self {
        Self {
            levels: b.levels,
            connectivity: b.connectivity.neighbors(),
            intervals: b
                .intervals
                .iter()
                .map(|iv| IntervalRecord {
                    id: iv.id,
                    birth: iv.birth,
                    death: iv.death,
                    persistence: iv.persistence(),
                    area: iv.area,
                })
                .collect(),
        }
    }
}

impl BarcodeDocument {
    /// Checks the document's internal consistency and converts it back.
    pub fn to_barcode(&self) -> std::result::Result<Barcode, String> {
        let connectivity = Connectivity::try_from(self.connectivity).map_err(|e| e.to_string())?;
        let mut intervals = Vec::with_capacity(self.intervals.len());
        for (i, r) in self.intervals.iter().enumerate() {
            if r.birth > r.death || r.death > self.levels {
                return Err(format!(
                    "interval {i}: birth {} and death {} outside 0..={}",
                    r.birth, r.death, self.levels
                ));
            }
            if r.persistence != r.death - r.birth {
                return Err(format!("interval {i}: persistence {} != death - birth", r.persistence));
            }
            intervals.push(Interval {
                id: r.id,
                birth: r.birth,
                death: r.death,
                area: r.area,
            });
        }
        intervals.sort_by_key(|iv| (iv.birth, iv.id));
        Ok(Barcode {
            levels: self.levels,
            connectivity,
            intervals,
        })
    }
}

pub fn export_barcode(barcode: &Barcode, path: &Path) -> Result<()> {
    write_json(path, &BarcodeDocument::from(barcode))
}

pub fn read_barcode(path: &Path) -> Result<Barcode> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let doc: BarcodeDocument = serde_json::from_str(&text).map_err(|e| CliError::Schema {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    doc.to_barcode().map_err(|message| CliError::Schema {
        path: path.to_path_buf(),
        message,
    })
}

const LEVEL_WIDTH: u32 = 48;
const BAR_HEIGHT: u32 = 4;
const BAR_GAP: u32 = 2;
const MARGIN: u32 = 8;

/// One horizontal bar per interval, from birth to death, colored by its
/// survival depth. The last level is at the right edge.
pub fn render_barcode(barcode: &Barcode) -> RgbImage {
    let palette = persistence_palette(barcode.levels);
    let n = barcode.intervals.len() as u32;
    let width = 2 * MARGIN + LEVEL_WIDTH * barcode.levels.max(1) as u32;
    let height = 2 * MARGIN + n * (BAR_HEIGHT + BAR_GAP);
    let mut img = RgbImage::from_pixel(width, height, Rgb([255, 255, 255]));
    for (row, iv) in barcode.intervals.iter().enumerate() {
        let color = Rgb(palette[barcode.levels - iv.birth].rgb);
        let x0 = MARGIN + iv.birth as u32 * LEVEL_WIDTH;
        // Zero-length bars still get one pixel.
        let x1 = (MARGIN + iv.death as u32 * LEVEL_WIDTH).max(x0 + 1);
        let y0 = MARGIN + row as u32 * (BAR_HEIGHT + BAR_GAP);
        for y in y0..y0 + BAR_HEIGHT {
            for x in x0..x1 {
                img.put_pixel(x, y, color);
            }
        }
    }
    img
}

pub fn save_barcode_image(barcode: &Barcode, path: &Path) -> Result<()> {
    render_barcode(barcode)
        .save(path)
        .map_err(|e| CliError::decode(path, None, e))
}

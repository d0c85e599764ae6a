//! Image stack decoding and artifact encoding.
//!
//! Inputs: multi-page TIFF (8/16-bit grayscale, uncompressed, deflate or
//! LZW), PNG and PGM (P2/P5). Masks are written as single-page 8-bit images
//! with foreground 255 and background 0.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use image::{DynamicImage, ImageBuffer, ImageReader, Luma};
use persistack_core::{BinaryImage, ColorMap, GrayImage, Intensity, ZStack};
use serde::{Deserialize, Serialize};
use tiff::decoder::{Decoder, DecodingResult};
use tiff::encoder::{colortype, Compression, TiffEncoder};

use crate::error::{CliError, Result};

const IMAGE_EXTENSIONS: &[&str] = &["tif", "tiff", "png", "pgm"];

/// Where slices come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StackSource {
    /// One multi-page container; page order is slice order.
    Container(PathBuf),
    /// Ordered per-slice files.
    Files(Vec<PathBuf>),
}

impl StackSource {
    /// Interprets `input` as a glob pattern, a directory of slice images or a
    /// single file. Glob and directory matches are sorted by path.
    pub fn resolve(input: &str) -> Result<Self> {
        if input.contains(['*', '?', '[']) {
            let paths = glob::glob(input).map_err(|e| CliError::Config(format!("bad glob {input}: {e}")))?;
            let mut files = Vec::new();
            for p in paths {
                files.push(p.map_err(|e| CliError::io(e.path().to_path_buf(), e.into()))?);
            }
            files.retain(|p| p.is_file());
            files.sort();
            if files.is_empty() {
                return Err(CliError::NoInput(input.to_string()));
            }
            return Ok(StackSource::Files(files));
        }
        let path = PathBuf::from(input);
        if path.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(&path)
                .map_err(|e| CliError::io(&path, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && has_image_extension(p))
                .collect();
            files.sort();
            if files.is_empty() {
                return Err(CliError::NoInput(input.to_string()));
            }
            return Ok(StackSource::Files(files));
        }
        if is_tiff(&path) {
            Ok(StackSource::Container(path))
        } else {
            Ok(StackSource::Files(vec![path]))
        }
    }
}

fn extension(path: &Path) -> String {
    path.extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default()
}

fn has_image_extension(path: &Path) -> bool {
    IMAGE_EXTENSIONS.contains(&extension(path).as_str())
}

fn is_tiff(path: &Path) -> bool {
    matches!(extension(path).as_str(), "tif" | "tiff")
}

/// A decoded grayscale page of either supported depth.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyImage {
    Eight(GrayImage<u8>),
    Sixteen(GrayImage<u16>),
}

impl AnyImage {
    pub fn dimensions(&self) -> (usize, usize) {
        match self {
            AnyImage::Eight(i) => i.dimensions(),
            AnyImage::Sixteen(i) => i.dimensions(),
        }
    }

    pub fn bit_depth(&self) -> u32 {
        match self {
            AnyImage::Eight(_) => 8,
            AnyImage::Sixteen(_) => 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnyStack {
    Eight(ZStack<u8>),
    Sixteen(ZStack<u16>),
}

impl AnyStack {
    pub fn len(&self) -> usize {
        match self {
            AnyStack::Eight(s) => s.len(),
            AnyStack::Sixteen(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn bit_depth(&self) -> u32 {
        match self {
            AnyStack::Eight(_) => 8,
            AnyStack::Sixteen(_) => 16,
        }
    }

    pub fn dimensions(&self) -> (usize, usize) {
        match self {
            AnyStack::Eight(s) => s.dimensions(),
            AnyStack::Sixteen(s) => s.dimensions(),
        }
    }
}

impl From<ZStack<u8>> for AnyStack {
    fn from(s: ZStack<u8>) -> Self {
        AnyStack::Eight(s)
    }
}

impl From<ZStack<u16>> for AnyStack {
    fn from(s: ZStack<u16>) -> Self {
        AnyStack::Sixteen(s)
    }
}

/// Decodes every page of a TIFF file.
pub fn read_tiff_pages(path: &Path) -> Result<Vec<AnyImage>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut decoder = Decoder::new(BufReader::new(file)).map_err(|e| CliError::decode(path, None, e))?;
    let mut pages = Vec::new();
    loop {
        let page = pages.len() + 1;
        let err = |e: tiff::TiffError| CliError::decode(path, Some(page), e);
        let color = decoder.colortype().map_err(err)?;
        let (w, h) = decoder.dimensions().map_err(err)?;
        let (w, h) = (w as usize, h as usize);
        let image = match (color, decoder.read_image().map_err(err)?) {
            (tiff::ColorType::Gray(8), DecodingResult::U8(px)) => {
                AnyImage::Eight(GrayImage::new(w, h, px).map_err(|e| CliError::decode(path, Some(page), e))?)
            }
            (tiff::ColorType::Gray(16), DecodingResult::U16(px)) => {
                AnyImage::Sixteen(GrayImage::new(w, h, px).map_err(|e| CliError::decode(path, Some(page), e))?)
            }
            (other, _) => {
                return Err(CliError::decode(
                    path,
                    Some(page),
                    format!("unsupported pixel layout {other:?}; expected 8- or 16-bit grayscale"),
                ))
            }
        };
        pages.push(image);
        if !decoder.more_images() {
            return Ok(pages);
        }
        decoder
            .next_image()
            .map_err(|e| CliError::decode(path, Some(page + 1), e))?;
    }
}

/// Decodes a single PNG or PGM image.
pub fn read_image(path: &Path) -> Result<AnyImage> {
    if is_tiff(path) {
        return read_tiff_pages(path)?
            .into_iter()
            .next()
            .ok_or_else(|| CliError::decode(path, Some(1), "no pages"));
    }
    let decoded = ImageReader::open(path)
        .map_err(|e| CliError::io(path, e))?
        .with_guessed_format()
        .map_err(|e| CliError::io(path, e))?
        .decode()
        .map_err(|e| CliError::decode(path, None, e))?;
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    let wrap = |e: persistack_core::Error| CliError::decode(path, None, e);
    match decoded {
        DynamicImage::ImageLuma8(buf) => Ok(AnyImage::Eight(GrayImage::new(w, h, buf.into_raw()).map_err(wrap)?)),
        DynamicImage::ImageLuma16(buf) => Ok(AnyImage::Sixteen(GrayImage::new(w, h, buf.into_raw()).map_err(wrap)?)),
        other => Err(CliError::decode(
            path,
            None,
            format!(
                "unsupported pixel layout {:?}; expected 8- or 16-bit grayscale",
                other.color()
            ),
        )),
    }
}

/// Loads all slices of `source` in order.
pub fn load_stack(source: &StackSource) -> Result<AnyStack> {
    let mut pages: Vec<(PathBuf, Option<usize>, AnyImage)> = Vec::new();
    let files = match source {
        StackSource::Container(p) => vec![p.clone()],
        StackSource::Files(f) => f.clone(),
    };
    for path in files {
        if is_tiff(&path) {
            for (i, img) in read_tiff_pages(&path)?.into_iter().enumerate() {
                pages.push((path.clone(), Some(i + 1), img));
            }
        } else {
            let img = read_image(&path)?;
            pages.push((path, None, img));
        }
    }
    let Some((_, _, first)) = pages.first() else {
        return Err(CliError::Core(persistack_core::Error::EmptyStack));
    };
    let (expected, depth) = (first.dimensions(), first.bit_depth());
    for (path, page, img) in &pages {
        if img.bit_depth() != depth {
            return Err(CliError::MixedBitDepth {
                path: path.clone(),
                page: *page,
                expected: depth,
                found: img.bit_depth(),
            });
        }
        if img.dimensions() != expected {
            return Err(CliError::SliceMismatch {
                path: path.clone(),
                page: *page,
                expected,
                found: img.dimensions(),
            });
        }
    }
    let stack = if depth == 8 {
        let slices = pages
            .into_iter()
            .map(|(_, _, i)| match i {
                AnyImage::Eight(i) => i,
                AnyImage::Sixteen(_) => unreachable!("bit depth checked"),
            })
            .collect();
        AnyStack::Eight(ZStack::new(slices)?)
    } else {
        let slices = pages
            .into_iter()
            .map(|(_, _, i)| match i {
                AnyImage::Sixteen(i) => i,
                AnyImage::Eight(_) => unreachable!("bit depth checked"),
            })
            .collect();
        AnyStack::Sixteen(ZStack::new(slices)?)
    };
    Ok(stack)
}

/// Writes a multi-page grayscale TIFF, one page per slice.
pub fn write_tiff_stack(path: &Path, stack: &AnyStack, deflate: bool) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut encoder = TiffEncoder::new(BufWriter::new(file)).map_err(|e| CliError::decode(path, None, e))?;
    if deflate {
        encoder = encoder.with_compression(Compression::Deflate(Default::default()));
    }
    let err = |e: tiff::TiffError| CliError::decode(path, None, e);
    match stack {
        AnyStack::Eight(s) => {
            for slice in s.slices() {
                let (w, h) = slice.dimensions();
                encoder
                    .write_image::<colortype::Gray8>(w as u32, h as u32, slice.pixels())
                    .map_err(err)?;
            }
        }
        AnyStack::Sixteen(s) => {
            for slice in s.slices() {
                let (w, h) = slice.dimensions();
                encoder
                    .write_image::<colortype::Gray16>(w as u32, h as u32, slice.pixels())
                    .map_err(err)?;
            }
        }
    }
    Ok(())
}

/// Any nonzero pixel is foreground.
pub fn load_mask(path: &Path) -> Result<BinaryImage> {
    let (w, h, fg): (usize, usize, Vec<bool>) = match read_image(path)? {
        AnyImage::Eight(i) => (i.width(), i.height(), i.pixels().iter().map(|&p| p > 0).collect()),
        AnyImage::Sixteen(i) => (i.width(), i.height(), i.pixels().iter().map(|&p| p > 0).collect()),
    };
    Ok(BinaryImage::new(w, h, fg)?)
}

pub fn save_mask(path: &Path, mask: &BinaryImage) -> Result<()> {
    let bytes: Vec<u8> = mask.as_slice().iter().map(|&f| if f { 255 } else { 0 }).collect();
    save_gray8(path, mask.width(), mask.height(), bytes)
}

fn save_gray8(path: &Path, width: usize, height: usize, bytes: Vec<u8>) -> Result<()> {
    if extension(path) == "pgm" {
        return write_pgm(path, width, height, &bytes);
    }
    let buf: ImageBuffer<Luma<u8>, Vec<u8>> =
        ImageBuffer::from_raw(width as u32, height as u32, bytes).expect("buffer matches dimensions");
    buf.save(path).map_err(|e| CliError::decode(path, None, e))
}

/// Binary (P5) 8-bit PGM.
fn write_pgm(path: &Path, width: usize, height: usize, bytes: &[u8]) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    write!(w, "P5\n{width} {height}\n255\n")
        .and_then(|_| w.write_all(bytes))
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(path, e))
}

/// Saves a grayscale image at its native bit depth as PNG.
pub fn save_gray<P: Intensity>(path: &Path, img: &GrayImage<P>) -> Result<()> {
    let (w, h) = (img.width() as u32, img.height() as u32);
    let result = if P::BIT_DEPTH == 8 {
        let px: Vec<u8> = img.pixels().iter().map(|p| p.bin() as u8).collect();
        ImageBuffer::<Luma<u8>, _>::from_raw(w, h, px)
            .expect("dimensions")
            .save(path)
    } else {
        let px: Vec<u16> = img.pixels().iter().map(|p| p.bin() as u16).collect();
        ImageBuffer::<Luma<u16>, _>::from_raw(w, h, px)
            .expect("dimensions")
            .save(path)
    };
    result.map_err(|e| CliError::decode(path, None, e))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaletteRecord {
    pub index: u16,
    /// `None` for the background entry.
    pub depth: Option<usize>,
    pub rgb: [u8; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaletteTable {
    pub levels: usize,
    pub entries: Vec<PaletteRecord>,
}

impl PaletteTable {
    pub fn for_color_map(map: &ColorMap) -> Self {
        let mut entries = vec![PaletteRecord {
            index: 0,
            depth: None,
            rgb: [0, 0, 0],
        }];
        entries.extend(map.palette.iter().enumerate().map(|(i, e)| PaletteRecord {
            index: i as u16 + 1,
            depth: Some(e.depth),
            rgb: e.rgb,
        }));
        Self {
            levels: map.palette.len() - 1,
            entries,
        }
    }
}

/// Writes the color map as an 8-bit indexed PNG and its palette as a JSON
/// sidecar next to it (`<stem>.palette.json`).
pub fn save_color_map(path: &Path, map: &ColorMap) -> Result<PathBuf> {
    let table = PaletteTable::for_color_map(map);
    if table.entries.len() > 256 {
        return Err(CliError::Config(format!(
            "color map needs {} palette entries; indexed PNG holds 256",
            table.entries.len()
        )));
    }
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), map.width as u32, map.height as u32);
    encoder.set_color(png::ColorType::Indexed);
    encoder.set_depth(png::BitDepth::Eight);
    encoder.set_palette(table.entries.iter().flat_map(|e| e.rgb).collect::<Vec<u8>>());
    let png_err = |e: png::EncodingError| CliError::decode(path, None, e);
    let mut writer = encoder.write_header().map_err(png_err)?;
    let data: Vec<u8> = map.indices.iter().map(|&i| i as u8).collect();
    writer.write_image_data(&data).map_err(png_err)?;
    writer.finish().map_err(png_err)?;

    let sidecar = path.with_extension("palette.json");
    write_json(&sidecar, &table)?;
    Ok(sidecar)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

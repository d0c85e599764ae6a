//! Connected-component labeling of binary masks.
//!
//! Two raster passes: the first assigns provisional labels and records
//! equivalences in a union-find forest, the second resolves every pixel to a
//! dense id. Ids are assigned in raster order of each component's first
//! pixel, so labeling is deterministic.

use crate::error::{Error, Result};
use crate::raster::BinaryImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl Connectivity {
    pub fn neighbors(self) -> u32 {
        match self {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
        }
    }
}

impl TryFrom<u32> for Connectivity {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        match n {
            4 => Ok(Connectivity::Four),
            8 => Ok(Connectivity::Eight),
            other => Err(Error::InvalidConnectivity(other)),
        }
    }
}

/// Per-pixel component ids; 0 is background, components are `1..=count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelImage {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    count: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComponentStats {
    pub id: u32,
    pub area: usize,
    /// `(x_min, y_min, x_max, y_max)`, inclusive.
    pub bounding_box: (usize, usize, usize, usize),
}

impl LabelImage {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn component_count(&self) -> u32 {
        self.count
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Pixel count of each component, indexed by `id - 1`.
    pub fn areas(&self) -> Vec<usize> {
        let mut areas = vec![0usize; self.count as usize];
        for &l in &self.labels {
            if l > 0 {
                areas[l as usize - 1] += 1;
            }
        }
        areas
    }

    pub fn stats(&self) -> Vec<ComponentStats> {
        let mut stats: Vec<ComponentStats> = (1..=self.count)
            .map(|id| ComponentStats {
                id,
                area: 0,
                bounding_box: (usize::MAX, usize::MAX, 0, 0),
            })
            .collect();
        for (i, &l) in self.labels.iter().enumerate() {
            if l == 0 {
                continue;
            }
            let (x, y) = (i % self.width, i / self.width);
            let s = &mut stats[l as usize - 1];
            s.area += 1;
            let (x0, y0, x1, y1) = s.bounding_box;
            s.bounding_box = (x0.min(x), y0.min(y), x1.max(x), y1.max(y));
        }
        stats
    }

    fn check_id(&self, id: u32) -> Result<()> {
        if id == 0 || id > self.count {
            return Err(Error::UnknownComponent { id, count: self.count });
        }
        Ok(())
    }

    /// Mask of every pixel whose label satisfies `keep`.
    pub fn select(&self, mut keep: impl FnMut(u32) -> bool) -> BinaryImage {
        let fg = self.labels.iter().map(|&l| l > 0 && keep(l)).collect();
        BinaryImage::new(self.width, self.height, fg).expect("label image dimensions")
    }

    /// Foreground mask of the whole labeling.
    pub fn to_mask(&self) -> BinaryImage {
        self.select(|_| true)
    }
}

/// Labels the connected foreground components of `img`.
pub fn label_components(img: &BinaryImage, connectivity: Connectivity) -> LabelImage {
    let (width, height) = img.dimensions();
    let fg = img.as_slice();
    let mut provisional = vec![0u32; width * height];
    let mut forest = UnionFind::new();

    for y in 0..height {
        for x in 0..width {
            let i = y * width + x;
            if !fg[i] {
                continue;
            }
            // Already-visited neighbors: W, and NW, N, NE for the row above.
            let mut neighbors = [0u32; 4];
            let mut n = 0;
            if x > 0 && provisional[i - 1] != 0 {
                neighbors[n] = provisional[i - 1];
                n += 1;
            }
            if y > 0 {
                let up = i - width;
                if provisional[up] != 0 {
                    neighbors[n] = provisional[up];
                    n += 1;
                }
                if connectivity == Connectivity::Eight {
                    if x > 0 && provisional[up - 1] != 0 {
                        neighbors[n] = provisional[up - 1];
                        n += 1;
                    }
                    if x + 1 < width && provisional[up + 1] != 0 {
                        neighbors[n] = provisional[up + 1];
                        n += 1;
                    }
                }
            }
            provisional[i] = match neighbors[..n].iter().min() {
                None => forest.make_set(),
                Some(&label) => {
                    for &other in &neighbors[..n] {
                        forest.union(label, other);
                    }
                    label
                }
            };
        }
    }

    let mut dense = vec![0u32; forest.len() + 1];
    let mut count = 0u32;
    for l in provisional.iter_mut() {
        if *l == 0 {
            continue;
        }
        let root = forest.find(*l) as usize;
        if dense[root] == 0 {
            count += 1;
            dense[root] = count;
        }
        *l = dense[root];
    }

    LabelImage {
        width,
        height,
        labels: provisional,
        count,
    }
}

/// Mask containing exactly the pixels of component `id`.
pub fn component_mask(labels: &LabelImage, id: u32) -> Result<BinaryImage> {
    labels.check_id(id)?;
    Ok(labels.select(|l| l == id))
}

/// Whether component `id` shares at least one pixel with `probe`.
pub fn component_intersects(labels: &LabelImage, id: u32, probe: &BinaryImage) -> Result<bool> {
    labels.check_id(id)?;
    if labels.dimensions() != probe.dimensions() {
        return Err(Error::DimensionMismatch {
            left: labels.dimensions(),
            right: probe.dimensions(),
        });
    }
    Ok(labels.labels.iter().zip(probe.as_slice()).any(|(&l, &p)| p && l == id))
}

/// Union-find over provisional labels `1..=len`, with path halving. The
/// smaller label always becomes the root.
struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new() -> Self {
        Self { parent: vec![0] }
    }

    fn len(&self) -> usize {
        self.parent.len() - 1
    }

    fn make_set(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi as usize] = lo;
        }
    }
}

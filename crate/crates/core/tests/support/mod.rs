//! Brute-force oracles and random generators shared by the integration and
//! acceptance suites. Nothing here calls into the code paths it checks.

#![allow(dead_code)]

use std::collections::VecDeque;

use persistack_core::{BinaryImage, FilterParams, GrayImage, Intensity, NeighborhoodShape};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_mask(rng: &mut impl Rng, width: usize, height: usize, density: f64) -> BinaryImage {
    BinaryImage::from_fn(width, height, |_, _| rng.gen_bool(density))
}

pub fn random_gray<P: Intensity>(rng: &mut impl Rng, width: usize, height: usize, max: usize) -> GrayImage<P> {
    GrayImage::from_fn(width, height, |_, _| P::from_usize(rng.gen_range(0..=max)).unwrap())
}

fn neighbor_offsets(eight: bool) -> &'static [(i64, i64)] {
    const FOUR: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
    const EIGHT: [(i64, i64); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];
    if eight {
        &EIGHT
    } else {
        &FOUR
    }
}

/// Breadth-first flood fill from each unvisited foreground pixel in raster
/// order; ids are assigned in that order.
pub fn flood_fill(mask: &BinaryImage, eight: bool) -> (Vec<u32>, u32) {
    let (w, h) = mask.dimensions();
    let mut labels = vec![0u32; w * h];
    let mut next = 0u32;
    for start in 0..w * h {
        if !mask.as_slice()[start] || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let (x, y) = ((i % w) as i64, (i / w) as i64);
            for &(dx, dy) in neighbor_offsets(eight) {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if mask.as_slice()[j] && labels[j] == 0 {
                    labels[j] = next;
                    queue.push_back(j);
                }
            }
        }
    }
    (labels, next)
}

/// Sorts the in-bounds neighborhood and takes the lower median.
pub fn median_oracle<P: Intensity>(img: &GrayImage<P>, radius: usize, shape: NeighborhoodShape) -> GrayImage<P> {
    let r = radius as i64;
    let (w, h) = (img.width() as i64, img.height() as i64);
    GrayImage::from_fn(img.width(), img.height(), |x, y| {
        let mut values = Vec::new();
        for dy in -r..=r {
            for dx in -r..=r {
                if shape == NeighborhoodShape::Disc && dx * dx + dy * dy > r * r {
                    continue;
                }
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if nx >= 0 && ny >= 0 && nx < w && ny < h {
                    values.push(img.get(nx as usize, ny as usize));
                }
            }
        }
        values.sort();
        values[(values.len() - 1) / 2]
    })
}

pub fn median_oracle_params<P: Intensity>(img: &GrayImage<P>, params: &FilterParams) -> GrayImage<P> {
    median_oracle(img, params.radius, params.shape)
}

fn entropy(mu: f64) -> f64 {
    let t = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
    t(mu) + t(1.0 - mu)
}

/// Fuzziness of every level `t` in `g_min..g_max`, evaluated bin by bin.
pub fn huang_fuzziness_scan(hist: &[u64]) -> Vec<(usize, f64)> {
    let g_min = hist.iter().position(|&h| h > 0).unwrap();
    let g_max = hist.iter().rposition(|&h| h > 0).unwrap();
    let c = (g_max - g_min) as f64;
    let mut out = Vec::new();
    for t in g_min..g_max {
        let (mut n0, mut s0, mut n1, mut s1) = (0u64, 0u128, 0u64, 0u128);
        for (g, &h) in hist.iter().enumerate() {
            if g <= t {
                n0 += h;
                s0 += g as u128 * h as u128;
            } else {
                n1 += h;
                s1 += g as u128 * h as u128;
            }
        }
        let (m0, m1) = (s0 as f64 / n0 as f64, s1 as f64 / n1 as f64);
        let (mut e0, mut e1) = (0.0f64, 0.0f64);
        for (g, &h) in hist.iter().enumerate() {
            if h == 0 {
                continue;
            }
            let mean = if g <= t { m0 } else { m1 };
            let mu = 1.0 / (1.0 + (g as f64 - mean).abs() / c);
            if g <= t {
                e0 += h as f64 * entropy(mu);
            } else {
                e1 += h as f64 * entropy(mu);
            }
        }
        out.push((t, e0 + e1));
    }
    out
}

/// Argmin of the fuzziness scan, smallest level on ties.
pub fn huang_oracle(hist: &[u64]) -> usize {
    let scan = huang_fuzziness_scan(hist);
    let mut best = scan[0];
    for &(t, e) in &scan[1..] {
        if e < best.1 {
            best = (t, e);
        }
    }
    best.0
}

/// Histogram of a two-component Gaussian mixture over `0..bins`.
pub fn gaussian_mixture_histogram(rng: &mut impl Rng, bins: usize) -> Vec<u64> {
    let b = bins as f64;
    let (mu0, mu1) = (rng.gen_range(0.1..0.45) * b, rng.gen_range(0.55..0.9) * b);
    let (sd0, sd1) = (rng.gen_range(0.02..0.12) * b, rng.gen_range(0.02..0.12) * b);
    let (w0, w1) = (rng.gen_range(200.0..5000.0), rng.gen_range(200.0..5000.0));
    (0..bins)
        .map(|g| {
            let g = g as f64;
            let d0 = (g - mu0) / sd0;
            let d1 = (g - mu1) / sd1;
            (w0 * (-0.5 * d0 * d0).exp() + w1 * (-0.5 * d1 * d1).exp() + rng.gen_range(0.0..3.0)).floor() as u64
        })
        .collect()
}

/// Every level `D^0..=D^m`, each obtained by relabeling the level above and
/// keeping the components that meet slice `n`.
pub fn materialize_levels(projection: &BinaryImage, slices: &[BinaryImage], eight: bool) -> Vec<BinaryImage> {
    let m = slices.len();
    let mut levels = vec![projection.clone(); m + 1];
    for n in 1..=m {
        let above = &levels[m - n + 1];
        let (labels, k) = flood_fill(above, eight);
        let mut keep = vec![false; k as usize + 1];
        for (i, &l) in labels.iter().enumerate() {
            if l > 0 && slices[n - 1].as_slice()[i] {
                keep[l as usize] = true;
            }
        }
        let (w, h) = projection.dimensions();
        let next = BinaryImage::new(w, h, labels.iter().map(|&l| l > 0 && keep[l as usize]).collect()).unwrap();
        levels[m - n] = next;
    }
    levels
}

/// `(id, birth, death, area)` for every class, ids taken from the flood-fill
/// labeling of the top level, sorted by `(birth, id)`.
pub fn naive_barcode(levels: &[BinaryImage], eight: bool) -> Vec<(u32, usize, usize, usize)> {
    let m = levels.len() - 1;
    let (top, _) = flood_fill(&levels[m], eight);
    let mut out = Vec::new();
    for i in 0..=m {
        let (labels, k) = flood_fill(&levels[i], eight);
        for c in 1..=k {
            let pixels: Vec<usize> = (0..labels.len()).filter(|&p| labels[p] == c).collect();
            let existed = i > 0 && pixels.iter().any(|&p| levels[i - 1].as_slice()[p]);
            if !existed {
                out.push((top[pixels[0]], i, m, pixels.len()));
            }
        }
    }
    out.sort_by_key(|&(id, b, _, _)| (b, id));
    out
}

/// Mask of the projection components (flood fill) meeting every slice.
pub fn intersects_all_slices(projection: &BinaryImage, slices: &[BinaryImage], eight: bool) -> BinaryImage {
    let (labels, k) = flood_fill(projection, eight);
    let keep: Vec<bool> = (0..=k)
        .map(|c| {
            c > 0
                && slices
                    .iter()
                    .all(|s| labels.iter().zip(s.as_slice()).any(|(&l, &f)| f && l == c))
        })
        .collect();
    let (w, h) = projection.dimensions();
    BinaryImage::new(w, h, labels.iter().map(|&l| keep[l as usize]).collect()).unwrap()
}

/// Random filtration input: a blobby projection mask and slice masks that
/// keep pixels of it at per-slice densities, plus stray pixels.
pub fn random_filtration_input(
    rng: &mut impl Rng,
    width: usize,
    height: usize,
    m: usize,
) -> (BinaryImage, Vec<BinaryImage>) {
    let density = rng.gen_range(0.05..0.5);
    let seeds = random_mask(rng, width, height, density);
    let projection = BinaryImage::from_fn(width, height, |x, y| {
        seeds.get(x, y) || (x + 1 < width && seeds.get(x + 1, y) && rng.gen_bool(0.5))
    });
    let slices = (0..m)
        .map(|_| {
            let keep = rng.gen_range(0.0..0.6);
            let stray = rng.gen_range(0.0..0.05);
            BinaryImage::from_fn(width, height, |x, y| {
                if projection.get(x, y) {
                    rng.gen_bool(keep)
                } else {
                    rng.gen_bool(stray)
                }
            })
        })
        .collect();
    (projection, slices)
}

/// Rasterized cross centred in the image with arms of the given half-width.
pub fn cross(width: usize, height: usize, arm: usize, half_width: usize) -> BinaryImage {
    let (cx, cy) = (width as i64 / 2, height as i64 / 2);
    BinaryImage::from_fn(width, height, |x, y| {
        let (dx, dy) = ((x as i64 - cx).abs(), (y as i64 - cy).abs());
        (dx <= half_width as i64 && dy <= arm as i64) || (dy <= half_width as i64 && dx <= arm as i64)
    })
}

pub struct PlantedStack {
    pub slices: Vec<GrayImage<u8>>,
    pub structure: BinaryImage,
    /// Centre, radius and the slices each transient blob appears in.
    pub blobs: Vec<((i64, i64), i64, Vec<bool>)>,
}

/// An 8-bit stack of `m` slices: `structure` bright in every slice, `blobs`
/// separated transient discs each missing from at least one slice, dim textured
/// background, then salt-and-pepper noise replacing `noise` of the pixels.
pub fn planted_stack(rng: &mut impl Rng, structure: &BinaryImage, m: usize, blobs: usize, noise: f64) -> PlantedStack {
    let (w, h) = structure.dimensions();
    let clear = 16i64;
    let near = |cx: i64, cy: i64, r: i64| {
        let reach = r + clear;
        (-reach..=reach).any(|dy| {
            (-reach..=reach).any(|dx| {
                let (x, y) = (cx + dx, cy + dy);
                dx * dx + dy * dy <= reach * reach
                    && x >= 0
                    && y >= 0
                    && (x as usize) < w
                    && (y as usize) < h
                    && structure.get(x as usize, y as usize)
            })
        })
    };
    // Blobs stay apart too: overlapping blobs missing from different slices
    // would together be present in every slice.
    let apart = |placed: &[((i64, i64), i64, Vec<bool>)], cx: i64, cy: i64, r: i64| {
        placed.iter().all(|&((bx, by), br, _)| {
            let d = br + r + clear;
            (bx - cx).pow(2) + (by - cy).pow(2) > d * d
        })
    };
    let mut placed = Vec::new();
    let mut attempts = 0;
    while placed.len() < blobs {
        attempts += 1;
        assert!(attempts < 100_000, "no room for {blobs} blobs");
        let r = rng.gen_range(10..13i64);
        let cx = rng.gen_range(r..w as i64 - r);
        let cy = rng.gen_range(r..h as i64 - r);
        if !apart(&placed, cx, cy, r) || near(cx, cy, r) {
            continue;
        }
        let mut present: Vec<bool> = (0..m).map(|_| rng.gen_bool(0.6)).collect();
        let gap = rng.gen_range(0..m);
        present[gap] = false;
        placed.push(((cx, cy), r, present));
    }
    let slices = (0..m)
        .map(|n| {
            GrayImage::from_fn(w, h, |x, y| {
                if rng.gen_bool(noise) {
                    return if rng.gen_bool(0.5) { 255 } else { 0 };
                }
                let in_blob = placed.iter().any(|&((cx, cy), r, ref present)| {
                    let (dx, dy) = (x as i64 - cx, y as i64 - cy);
                    present[n] && dx * dx + dy * dy <= r * r
                });
                if structure.get(x, y) || in_blob {
                    rng.gen_range(170..=210)
                } else {
                    rng.gen_range(10..=40)
                }
            })
        })
        .collect();
    PlantedStack {
        slices,
        structure: structure.clone(),
        blobs: placed,
    }
}

/// A 16-bit stack whose values span `bits` bits: bright dendrite-like lines
/// over a noisy background.
pub fn synthetic_stack_16(rng: &mut impl Rng, width: usize, height: usize, m: usize, bits: u32) -> Vec<GrayImage<u16>> {
    let top = (1u32 << bits) - 1;
    let lines: Vec<(f64, f64, f64)> = (0..12)
        .map(|_| {
            let angle = rng.gen_range(0.0..std::f64::consts::PI);
            let (s, c) = angle.sin_cos();
            let offset = rng.gen_range(0.2..0.8) * (width.min(height) as f64);
            (c, s, offset)
        })
        .collect();
    (0..m)
        .map(|_| {
            GrayImage::from_fn(width, height, |x, y| {
                let on_line = lines
                    .iter()
                    .any(|&(c, s, off)| (x as f64 * c + y as f64 * s - off).abs() < 6.0);
                let v = if on_line {
                    rng.gen_range(top / 2..=top)
                } else {
                    rng.gen_range(0..=top / 5)
                };
                v as u16
            })
        })
        .collect()
}

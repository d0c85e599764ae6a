//! Zhang–Suen thinning and skeleton endpoints.

use crate::raster::BinaryImage;

/// Neighbor offsets P2..P9, clockwise from north.
const RING: [(i64, i64); 8] = [(0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1)];

fn ring(mask: &BinaryImage, x: usize, y: usize) -> [bool; 8] {
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    RING.map(|(dx, dy)| {
        let (nx, ny) = (x as i64 + dx, y as i64 + dy);
        nx >= 0 && ny >= 0 && nx < w && ny < h && mask.get(nx as usize, ny as usize)
    })
}

/// Thins `mask` to a one-pixel-wide skeleton, preserving 8-connectivity.
/// Pixels outside the image count as background.
pub fn thin(mask: &BinaryImage) -> BinaryImage {
    let mut img = mask.clone();
    let mut doomed = Vec::new();
    loop {
        let mut changed = false;
        for step in 0..2 {
            doomed.clear();
            for (x, y) in img.foreground_pixels() {
                let p = ring(&img, x, y);
                let neighbors = p.iter().filter(|&&b| b).count();
                if !(2..=6).contains(&neighbors) {
                    continue;
                }
                let transitions = (0..8).filter(|&i| !p[i] && p[(i + 1) % 8]).count();
                if transitions != 1 {
                    continue;
                }
                // p[0]=N, p[2]=E, p[4]=S, p[6]=W
                let keep = if step == 0 {
                    (p[0] && p[2] && p[4]) || (p[2] && p[4] && p[6])
                } else {
                    (p[0] && p[2] && p[6]) || (p[0] && p[4] && p[6])
                };
                if !keep {
                    doomed.push((x, y));
                }
            }
            for &(x, y) in &doomed {
                img.set(x, y, false);
            }
            changed |= !doomed.is_empty();
        }
        if !changed {
            return img;
        }
    }
}

/// Skeleton pixels with exactly one 8-connected skeleton neighbor.
pub fn endpoints(skeleton: &BinaryImage) -> Vec<(usize, usize)> {
    skeleton
        .foreground_pixels()
        .filter(|&(x, y)| ring(skeleton, x, y).iter().filter(|&&b| b).count() == 1)
        .collect()
}

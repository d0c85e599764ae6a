//! Huang–Wang fuzzy thresholding.
//!
//! For a candidate level `t` pixels `<= t` form the background class and
//! pixels `> t` the foreground class. A pixel of value `g` has membership
//! `1 / (1 + |g - mean_of_its_class| / C)` with `C = g_max - g_min`, and the
//! level minimizing the histogram-weighted Shannon entropy of the memberships
//! is selected.

use crate::error::{Error, Result};
use crate::raster::GrayImage;
use crate::scalar::{FuzzyScalar, Intensity};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdResult<P, F> {
    /// Pixels strictly above `level` are foreground.
    pub level: P,
    /// Total fuzziness of the selected level divided by the pixel count.
    pub fuzziness: F,
}

/// Shannon entropy of a membership value, with `0 ln 0 = 0`.
#[inline]
pub fn membership_entropy<F: FuzzyScalar>(mu: F) -> F {
    let one = F::one();
    let term = |p: F| if p > F::zero() { -p * p.ln() } else { F::zero() };
    term(mu) + term(one - mu)
}

/// Huang threshold of `img` computed over its intensity histogram.
pub fn huang_threshold<P: Intensity, F: FuzzyScalar>(img: &GrayImage<P>) -> Result<ThresholdResult<P, F>> {
    let (bin, fuzziness) = huang_threshold_histogram::<F>(&img.histogram())?;
    Ok(ThresholdResult {
        level: P::from_bin(bin),
        fuzziness,
    })
}

/// Huang threshold of a histogram indexed by intensity.
///
/// Returns the selected bin and its normalized fuzziness. Only occupied bins
/// are candidates: every level between two occupied bins induces the same
/// partition as the lower one, which is also the smallest such level.
pub fn huang_threshold_histogram<F: FuzzyScalar>(hist: &[u64]) -> Result<(usize, F)> {
    let occupied: Vec<(usize, u64)> = hist
        .iter()
        .enumerate()
        .filter(|(_, &h)| h > 0)
        .map(|(g, &h)| (g, h))
        .collect();
    let (first, last) = match (occupied.first(), occupied.last()) {
        (Some(&(lo, _)), Some(&(hi, _))) if lo != hi => (lo, hi),
        (Some(&(lo, _)), _) => return Err(Error::DegenerateHistogram { value: lo }),
        _ => return Err(Error::DegenerateHistogram { value: 0 }),
    };
    let span = F::from_usize(last - first).expect("intensity span fits float");

    let total_count: u64 = occupied.iter().map(|&(_, h)| h).sum();
    let total_mass: u128 = occupied.iter().map(|&(g, h)| g as u128 * h as u128).sum();

    let mut best: Option<(usize, F)> = None;
    let mut count_below = 0u64;
    let mut mass_below = 0u128;
    for (k, &(t, h)) in occupied[..occupied.len() - 1].iter().enumerate() {
        count_below += h;
        mass_below += t as u128 * h as u128;
        let mean_bg = class_mean::<F>(mass_below, count_below);
        let mean_fg = class_mean::<F>(total_mass - mass_below, total_count - count_below);

        let class_fuzziness = |bins: &[(usize, u64)], mean: F| {
            bins.iter().fold(F::zero(), |acc, &(g, h)| {
                let g = F::from_usize(g).expect("intensity fits float");
                let mu = F::one() / (F::one() + (g - mean).abs() / span);
                acc + F::from_count(h) * membership_entropy(mu)
            })
        };
        let fuzziness = class_fuzziness(&occupied[..=k], mean_bg) + class_fuzziness(&occupied[k + 1..], mean_fg);

        if best.is_none_or(|(_, e)| fuzziness < e) {
            best = Some((t, fuzziness));
        }
    }
    let (level, fuzziness) = best.expect("at least two occupied bins");
    Ok((level, fuzziness / F::from_count(total_count)))
}

fn class_mean<F: FuzzyScalar>(mass: u128, count: u64) -> F {
    F::from_u128(mass).expect("mass fits float") / F::from_count(count)
}

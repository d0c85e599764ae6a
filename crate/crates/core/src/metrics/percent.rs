//! Exact percentages over pixel counts.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational percentage.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Percent(Ratio<BigUint>);

impl Percent {
    /// `100 * numerator / denominator`.
    pub fn of(numerator: u64, denominator: u64, what: &'static str) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::UndefinedRatio(what));
        }
        Ok(Self(Ratio::new(
            BigUint::from(numerator) * 100u32,
            BigUint::from(denominator),
        )))
    }

    pub fn from_integer(value: u64) -> Self {
        Self(Ratio::from_integer(BigUint::from(value)))
    }

    pub fn ratio(&self) -> &Ratio<BigUint> {
        &self.0
    }

    /// Arithmetic mean, `None` for an empty input.
    pub fn mean<'a>(values: impl IntoIterator<Item = &'a Percent>) -> Option<Percent> {
        let (sum, n) = values
            .into_iter()
            .fold((Ratio::zero(), 0u64), |(s, n), v| (s + &v.0, n + 1));
        (n > 0).then(|| Percent(sum / BigUint::from(n)))
    }

    /// Value in hundredths of a percent, rounded half up.
    pub fn hundredths(&self) -> u64 {
        let scaled = self.0.numer() * 200u32 + self.0.denom();
        let (q, _) = scaled.div_rem(&(self.0.denom() * 2u32));
        q.to_u64().expect("percentage fits u64 hundredths")
    }

    /// Nearest `f64`, unrounded.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().expect("finite ratio")
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = self.hundredths();
        write!(f, "{}.{:02}", h / 100, h % 100)
    }
}

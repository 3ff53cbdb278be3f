use std::fmt;

use serde::{Deserialize, Serialize};

use super::centrality::CentralityVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Low,
    Mid,
    High,
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Band::Low => "low",
            Band::Mid => "mid",
            Band::High => "high",
        })
    }
}

/// Tercile banding by nearest-rank quantiles.
///
/// A node's upper rank is the number of values `<=` its own. It is `Low`
/// when that count is at most ⌈N/3⌉, `Mid` when at most ⌈2N/3⌉, otherwise
/// `High`. Tied values share the upper rank, so ties resolve upward.
pub fn tercile_bands(c: &CentralityVector) -> Result<Vec<Band>> {
    bands_of(&c.values)
}

pub fn bands_of(values: &[f64]) -> Result<Vec<Band>> {
    let n = values.len();
    if n < 3 {
        return Err(Error::TooFewNodes { needed: 3, got: n });
    }
    let low_cut = n.div_ceil(3);
    let mid_cut = (2 * n).div_ceil(3);
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(values
        .iter()
        .map(|v| {
            let upper_rank = sorted.partition_point(|s| s.total_cmp(v).is_le());
            if upper_rank <= low_cut {
                Band::Low
            } else if upper_rank <= mid_cut {
                Band::Mid
            } else {
                Band::High
            }
        })
        .collect())
}

//! Average (mid-) ranks.
//!
//! Tied values share the mean of the 1-based positions they occupy. The mean
//! of consecutive integers is always a multiple of 1/2, so every rank (and
//! every rank centred at `(n + 1) / 2`) is exactly representable, and sums of
//! their products stay exact in `f64` for any practical `n`. The permutation
//! tests rely on this to compare permuted statistics against the observed one
//! without rounding noise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankVector {
    ranks: Vec<f64>,
}

impl RankVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.ranks
    }

    /// Ranks minus their mean `(n + 1) / 2`. Entries are exact multiples of 1/2.
    pub fn centered(&self) -> Vec<f64> {
        let mid = (self.ranks.len() as f64 + 1.0) / 2.0;
        self.ranks.iter().map(|r| r - mid).collect()
    }

    /// True when at least two entries share a rank.
    pub fn has_ties(&self) -> bool {
        let mut sorted = self.ranks.clone();
        sorted.sort_by(f64::total_cmp);
        sorted.windows(2).any(|w| w[0] == w[1])
    }

    /// True when every entry is the same (a constant margin).
    pub fn is_constant(&self) -> bool {
        self.ranks.windows(2).all(|w| w[0] == w[1])
    }
}

pub fn average_ranks(values: &[f64]) -> Result<RankVector> {
    let n = values.len();
    if n < 2 {
        return Err(Error::invalid(format!("ranking needs at least 2 values, got {n}")));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("non-finite value at index {i}")));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));

    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let v = values[order[start]];
        let mut end = start + 1;
        // -0.0 and 0.0 compare equal and are treated as a tie.
        while end < n && values[order[end]] == v {
            end += 1;
        }
        // positions start+1 ..= end, mean = (start + 1 + end) / 2
        let rank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    Ok(RankVector { ranks })
}

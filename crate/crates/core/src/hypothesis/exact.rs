//! Full enumeration of the permutation distribution for small samples.

use super::permutation::{evaluate, exceeds, PermutationNull};
use super::{Alternative, PermutationStatistic};
use crate::correlation::RankPairing;
use crate::error::{Error, Result};
use crate::sample::PairedSample;

/// Largest sample size enumerated (8! = 40,320 pairings).
pub const MAX_EXACT_N: usize = 8;

/// Visits every permutation of `v` once (Heap's algorithm, iterative).
fn for_each_permutation(v: &mut [f64], mut visit: impl FnMut(&[f64])) {
    let n = v.len();
    let mut c = vec![0usize; n];
    visit(v);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                v.swap(0, i);
            } else {
                v.swap(c[i], i);
            }
            visit(v);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// All `n!` permuted statistics; the observed pairing is among them.
pub fn exact_permutation_null(sample: &PairedSample, stat: PermutationStatistic) -> Result<PermutationNull> {
    if sample.len() > MAX_EXACT_N {
        return Err(Error::invalid(format!(
            "exact enumeration is limited to n <= {MAX_EXACT_N}, got {}; use a sampled test",
            sample.len()
        )));
    }
    let pairing = RankPairing::new(sample)?;
    let observed = evaluate(&pairing, stat, pairing.y_centered());
    let mut b = pairing.y_centered().to_vec();
    let mut values = Vec::with_capacity((1..=sample.len()).product());
    for_each_permutation(&mut b, |perm| values.push(evaluate(&pairing, stat, perm)));
    Ok(PermutationNull { values, observed })
}

/// Exact permutation p-value with the same strict-exceedance convention as the
/// sampled tests.
pub fn exact_permutation_pvalue(sample: &PairedSample, stat: PermutationStatistic, alt: Alternative) -> Result<f64> {
    let null = exact_permutation_null(sample, stat)?;
    let count = null.values.iter().filter(|&&v| exceeds(v, null.observed, alt)).count();
    Ok(count as f64 / null.len() as f64)
}

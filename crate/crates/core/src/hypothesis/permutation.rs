//! Sampled permutation tests.
//!
//! The centred rank vectors are computed once. Permutation `k` copies the
//! observed y ranks, shuffles them with the generator on stream `k` of the
//! test's seed and re-evaluates the statistic, so the outcome of each
//! permutation depends only on `(seed, k)`. The p-value counts strict
//! exceedances: `R^k > R` for `greater`, `R^k < R` for `less`, and
//! `|R^k| >= |R|` for `two-sided`.

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_n, Alternative, Method, PValueConvention, PermutationStatistic, TestConfig, TestResult};
use crate::correlation::RankPairing;
use crate::error::{Error, Result};
use crate::rng::PermutationStreams;
use crate::sample::PairedSample;

/// Below this many rank products per test the permutations run on one thread.
const PARALLEL_WORK: u64 = 1 << 21;
const CHUNK: u64 = 256;

/// Sampled permutation distribution of a statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationNull {
    pub values: Vec<f64>,
    pub observed: f64,
}

impl PermutationNull {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn exceedances(&self, alt: Alternative) -> u64 {
        self.values.iter().filter(|&&v| exceeds(v, self.observed, alt)).count() as u64
    }

    pub fn p_value(&self, alt: Alternative, convention: PValueConvention) -> f64 {
        convention.p_value(self.exceedances(alt), self.values.len() as u64)
    }
}

/// Products of index bounds drawn from one 64-bit word stay below this, which
/// keeps the rejection probability under 2^-16.
const BATCH_LIMIT: u64 = 1 << 48;
const MAX_BATCH: usize = 8;

/// Durstenfeld's Fisher-Yates shuffle.
///
/// Swap indices are drawn several at a time: one 64-bit word is multiplied
/// successively by the bounds `i, i - 1, ...`, taking the high halves as the
/// indices and rejecting when the final low half falls below `2^64 mod P`,
/// where `P` is the product of the bounds. This is Lemire's unbiased bounded
/// draw on `0..P` decoded in mixed radix.
#[inline]
pub(crate) fn shuffle<T, R: RngCore>(v: &mut [T], rng: &mut R) {
    let mut i = v.len() as u64;
    let mut idx = [0u64; MAX_BATCH];
    while i > 1 {
        let mut k = 0;
        let mut prod = 1u64;
        while k < MAX_BATCH && i - k as u64 > 1 && prod * (i - k as u64) <= BATCH_LIMIT {
            prod *= i - k as u64;
            k += 1;
        }
        loop {
            let mut low = rng.next_u64();
            for (t, slot) in idx[..k].iter_mut().enumerate() {
                let m = u128::from(low) * u128::from(i - t as u64);
                *slot = (m >> 64) as u64;
                low = m as u64;
            }
            if low >= prod || low >= prod.wrapping_neg() % prod {
                break;
            }
        }
        for (t, &j) in idx[..k].iter().enumerate() {
            v.swap((i - 1 - t as u64) as usize, j as usize);
        }
        i -= k as u64;
    }
}

#[inline]
pub(crate) fn exceeds(permuted: f64, observed: f64, alt: Alternative) -> bool {
    match alt {
        Alternative::Greater => permuted > observed,
        Alternative::Less => permuted < observed,
        Alternative::TwoSided => permuted.abs() >= observed.abs(),
    }
}

#[inline]
pub(crate) fn evaluate(pairing: &RankPairing, stat: PermutationStatistic, b: &[f64]) -> f64 {
    match stat {
        PermutationStatistic::PlainRs => pairing.rs_from_cross(pairing.cross(b)),
        PermutationStatistic::StuRs => pairing.studentized_from_sums(pairing.sums(b)),
    }
}

fn count_range(
    pairing: &RankPairing,
    stat: PermutationStatistic,
    alt: Alternative,
    observed: f64,
    streams: &PermutationStreams,
    range: std::ops::Range<u64>,
) -> u64 {
    let original = pairing.y_centered();
    let mut buf = original.to_vec();
    let mut count = 0;
    for k in range {
        buf.copy_from_slice(original);
        shuffle(buf.as_mut_slice(), &mut streams.stream(k));
        if exceeds(evaluate(pairing, stat, &buf), observed, alt) {
            count += 1;
        }
    }
    count
}

pub(crate) fn from_pairing(
    pairing: &RankPairing,
    stat: PermutationStatistic,
    alt: Alternative,
    config: &TestConfig,
    allow_parallel: bool,
) -> TestResult {
    let b = config.permutations;
    let observed = evaluate(pairing, stat, pairing.y_centered());
    let streams = PermutationStreams::new(config.seed);
    let work = b.saturating_mul(pairing.len() as u64);
    let count = if allow_parallel && work >= PARALLEL_WORK {
        (0..b.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let range = c * CHUNK..((c + 1) * CHUNK).min(b);
                count_range(pairing, stat, alt, observed, &streams, range)
            })
            .sum()
    } else {
        count_range(pairing, stat, alt, observed, &streams, 0..b)
    };
    TestResult {
        method: match stat {
            PermutationStatistic::PlainRs => Method::NaivePermute,
            PermutationStatistic::StuRs => Method::StuPermute,
        },
        statistic: observed,
        p_value: config.convention.p_value(count, b),
        estimate: pairing.spearman(),
        n: pairing.len(),
        alternative: alt,
        permutations: Some(b),
        seed: Some(config.seed),
        degenerate: false,
    }
}

/// Permutation test with an explicit statistic and p-value convention.
pub fn permutation_test(
    sample: &PairedSample,
    stat: PermutationStatistic,
    alt: Alternative,
    permutations: u64,
    seed: u64,
    convention: PValueConvention,
) -> Result<TestResult> {
    let method = match stat {
        PermutationStatistic::PlainRs => Method::NaivePermute,
        PermutationStatistic::StuRs => Method::StuPermute,
    };
    check_n(method, sample.len())?;
    if permutations < 1 {
        return Err(Error::invalid("number of permutations must be at least 1"));
    }
    let pairing = RankPairing::new(sample)?;
    let config = TestConfig {
        permutations,
        seed,
        convention,
    };
    Ok(from_pairing(&pairing, stat, alt, &config, true))
}

/// Permutation test of the plain r_s.
pub fn naive_permutation_test(
    sample: &PairedSample,
    alt: Alternative,
    permutations: u64,
    seed: u64,
) -> Result<TestResult> {
    permutation_test(
        sample,
        PermutationStatistic::PlainRs,
        alt,
        permutations,
        seed,
        PValueConvention::Plain,
    )
}

/// Studentized permutation test: both r_s and tau_hat are recomputed on every
/// permuted pairing of the ranks.
pub fn studentized_permutation_test(
    sample: &PairedSample,
    alt: Alternative,
    permutations: u64,
    seed: u64,
) -> Result<TestResult> {
    permutation_test(
        sample,
        PermutationStatistic::StuRs,
        alt,
        permutations,
        seed,
        PValueConvention::Plain,
    )
}

/// The `B` permuted statistics themselves, in permutation order.
pub fn permutation_null(
    sample: &PairedSample,
    stat: PermutationStatistic,
    permutations: u64,
    seed: u64,
) -> Result<PermutationNull> {
    if permutations < 1 {
        return Err(Error::invalid("number of permutations must be at least 1"));
    }
    let pairing = RankPairing::new(sample)?;
    let streams = PermutationStreams::new(seed);
    let original = pairing.y_centered();
    let values = (0..permutations)
        .into_par_iter()
        .map_init(
            || original.to_vec(),
            |buf, k| {
                buf.copy_from_slice(original);
                shuffle(buf, &mut streams.stream(k));
                evaluate(&pairing, stat, buf)
            },
        )
        .collect();
    Ok(PermutationNull {
        values,
        observed: evaluate(&pairing, stat, original),
    })
}

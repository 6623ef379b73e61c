//! Tests of `H0: rho_s = 0` sharing one result contract.
//!
//! | method         | statistic                              | reference          |
//! |----------------|----------------------------------------|--------------------|
//! | `t`            | `r_s sqrt((n-2)/(1-r_s^2))`            | Student t, n-2 df  |
//! | `fisher-z`     | `atanh(r_s) / sqrt(1.06/(n-3))`        | N(0, 1)            |
//! | `fisher-yates` | t statistic of Pearson r on normal scores | Student t, n-2 df |
//! | `asymp-norm`   | `sqrt(n) r_s / sqrt(v_hat)` (delta method) | N(0, 1)        |
//! | `permute`      | `r_s`                                  | B random re-pairings |
//! | `stu-permute`  | `r_s / tau_hat`                        | B random re-pairings |

mod exact;
mod parametric;
mod permutation;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::correlation::RankPairing;
use crate::error::{Error, Result};
use crate::sample::PairedSample;

pub use exact::{exact_permutation_null, exact_permutation_pvalue, MAX_EXACT_N};
pub use parametric::{asymptotic_normal_test, fisher_yates_test, fisher_z_test, t_test};
pub use permutation::{
    naive_permutation_test, permutation_null, permutation_test, studentized_permutation_test, PermutationNull,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alternative {
    Greater,
    Less,
    TwoSided,
}

impl Alternative {
    pub fn as_str(&self) -> &'static str {
        match self {
            Alternative::Greater => "greater",
            Alternative::Less => "less",
            Alternative::TwoSided => "two-sided",
        }
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Alternative {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greater" => Ok(Alternative::Greater),
            "less" => Ok(Alternative::Less),
            "two-sided" => Ok(Alternative::TwoSided),
            other => Err(Error::invalid(format!("unknown alternative '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "t")]
    TTest,
    #[serde(rename = "fisher-z")]
    FisherZ,
    #[serde(rename = "fisher-yates")]
    FisherYates,
    #[serde(rename = "asymp-norm")]
    AsympNorm,
    #[serde(rename = "permute")]
    NaivePermute,
    #[serde(rename = "stu-permute")]
    StuPermute,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::TTest,
        Method::FisherZ,
        Method::FisherYates,
        Method::AsympNorm,
        Method::NaivePermute,
        Method::StuPermute,
    ];

    /// Stable identifier used on the command line and in output files.
    pub fn id(&self) -> &'static str {
        match self {
            Method::TTest => "t",
            Method::FisherZ => "fisher-z",
            Method::FisherYates => "fisher-yates",
            Method::AsympNorm => "asymp-norm",
            Method::NaivePermute => "permute",
            Method::StuPermute => "stu-permute",
        }
    }

    pub fn is_permutation(&self) -> bool {
        matches!(self, Method::NaivePermute | Method::StuPermute)
    }

    /// Smallest sample size the method accepts.
    pub fn min_n(&self) -> usize {
        match self {
            Method::TTest | Method::FisherYates | Method::StuPermute => 3,
            Method::FisherZ | Method::AsympNorm => 4,
            Method::NaivePermute => 2,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.id() == s)
            .ok_or_else(|| Error::invalid(format!("unknown method '{s}'")))
    }
}

/// How a permutation p-value turns exceedance counts into a probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PValueConvention {
    /// `count / B`; may be exactly zero.
    #[default]
    Plain,
    /// `(count + 1) / (B + 1)`.
    AddOne,
}

impl PValueConvention {
    pub fn p_value(&self, count: u64, b: u64) -> f64 {
        match self {
            PValueConvention::Plain => count as f64 / b as f64,
            PValueConvention::AddOne => (count + 1) as f64 / (b + 1) as f64,
        }
    }
}

/// The statistic whose permutation distribution is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PermutationStatistic {
    /// Spearman's r_s.
    PlainRs,
    /// r_s / tau_hat on the permuted rank pairs.
    StuRs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: Method,
    pub statistic: f64,
    pub p_value: f64,
    /// Spearman's r_s of the sample.
    pub estimate: f64,
    pub n: usize,
    pub alternative: Alternative,
    #[serde(rename = "B")]
    pub permutations: Option<u64>,
    pub seed: Option<u64>,
    /// Set when the statistic is infinite (|r| = 1) and the p-value is 0 or 1 by sign.
    #[serde(default)]
    pub degenerate: bool,
}

/// Knobs for [`run_method`]; the parametric tests ignore all of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestConfig {
    pub permutations: u64,
    pub seed: u64,
    pub convention: PValueConvention,
}

impl Default for TestConfig {
    fn default() -> Self {
        Self {
            permutations: 1_000,
            seed: 0,
            convention: PValueConvention::Plain,
        }
    }
}

/// Runs any of the six tests.
pub fn run_method(method: Method, sample: &PairedSample, alt: Alternative, config: &TestConfig) -> Result<TestResult> {
    check_n(method, sample.len())?;
    let pairing = RankPairing::new(sample)?;
    run_on_pairing(method, &pairing, alt, config, true)
}

pub(crate) fn check_n(method: Method, n: usize) -> Result<()> {
    if n < method.min_n() {
        return Err(Error::invalid(format!(
            "{} needs n >= {}, got {n}",
            method.id(),
            method.min_n()
        )));
    }
    Ok(())
}

/// Entry point for callers that rank once and run several tests.
pub(crate) fn run_on_pairing(
    method: Method,
    pairing: &RankPairing,
    alt: Alternative,
    config: &TestConfig,
    allow_parallel: bool,
) -> Result<TestResult> {
    check_n(method, pairing.len())?;
    match method {
        Method::TTest => Ok(parametric::t_from_pairing(pairing, alt)),
        Method::FisherZ => Ok(parametric::fisher_z_from_pairing(pairing, alt)),
        Method::FisherYates => Ok(parametric::fisher_yates_from_pairing(pairing, alt)),
        Method::AsympNorm => Ok(parametric::asymp_from_pairing(pairing, alt)),
        Method::NaivePermute | Method::StuPermute => {
            if config.permutations < 1 {
                return Err(Error::invalid("number of permutations must be at least 1"));
            }
            let stat = if method == Method::StuPermute {
                PermutationStatistic::StuRs
            } else {
                PermutationStatistic::PlainRs
            };
            Ok(permutation::from_pairing(pairing, stat, alt, config, allow_parallel))
        }
    }
}

/// Tail probability for an observed statistic under a continuous symmetric
/// reference with survival function `sf`. Two-sided doubles the smaller tail.
pub(crate) fn continuous_p(statistic: f64, alt: Alternative, sf: impl Fn(f64) -> f64) -> f64 {
    let p = match alt {
        Alternative::Greater => sf(statistic),
        Alternative::Less => sf(-statistic),
        Alternative::TwoSided => 2.0 * sf(statistic.abs()),
    };
    p.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.id().parse::<Method>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{}\"", m.id()));
        }
        for a in [Alternative::Greater, Alternative::Less, Alternative::TwoSided] {
            assert_eq!(a.as_str().parse::<Alternative>().unwrap(), a);
        }
        assert!("bogus".parse::<Method>().is_err());
    }

    #[test]
    fn add_one_never_zero() {
        assert_eq!(PValueConvention::Plain.p_value(0, 1000), 0.0);
        assert_eq!(PValueConvention::AddOne.p_value(0, 999), 0.001);
    }
}

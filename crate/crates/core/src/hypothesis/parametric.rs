use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use super::{check_n, continuous_p, Alternative, Method, TestResult};
use crate::correlation::RankPairing;
use crate::error::Result;
use crate::sample::PairedSample;

/// Variance of Fisher's z for Spearman's r_s is taken as `1.06 / (n - 3)`.
pub const FISHER_Z_VARIANCE: f64 = 1.06;

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

fn normal_sf(z: f64) -> f64 {
    std_normal().sf(z)
}

fn student_sf(t: f64, df: f64) -> f64 {
    StudentsT::new(0.0, 1.0, df).expect("df > 0").sf(t)
}

/// p-value for a statistic that is +/- infinity because |r| = 1.
fn degenerate_p(r: f64, alt: Alternative) -> f64 {
    match alt {
        Alternative::Greater => {
            if r > 0.0 {
                0.0
            } else {
                1.0
            }
        }
        Alternative::Less => {
            if r < 0.0 {
                0.0
            } else {
                1.0
            }
        }
        Alternative::TwoSided => 0.0,
    }
}

fn result(method: Method, statistic: f64, p_value: f64, estimate: f64, n: usize, alt: Alternative) -> TestResult {
    TestResult {
        method,
        statistic,
        p_value,
        estimate,
        n,
        alternative: alt,
        permutations: None,
        seed: None,
        degenerate: statistic.is_infinite(),
    }
}

/// `r sqrt((n - 2) / (1 - r^2))` against Student t with `n - 2` df.
fn t_statistic_p(r: f64, n: usize, alt: Alternative) -> (f64, f64) {
    if r.abs() >= 1.0 {
        return (f64::INFINITY.copysign(r), degenerate_p(r, alt));
    }
    let df = (n - 2) as f64;
    let t = r * (df / (1.0 - r * r)).sqrt();
    (t, continuous_p(t, alt, |s| student_sf(s, df)))
}

pub(crate) fn t_from_pairing(p: &RankPairing, alt: Alternative) -> TestResult {
    let rs = p.spearman();
    let (t, pv) = t_statistic_p(rs, p.len(), alt);
    result(Method::TTest, t, pv, rs, p.len(), alt)
}

pub(crate) fn fisher_z_from_pairing(p: &RankPairing, alt: Alternative) -> TestResult {
    let rs = p.spearman();
    let n = p.len();
    if rs.abs() >= 1.0 {
        return result(
            Method::FisherZ,
            f64::INFINITY.copysign(rs),
            degenerate_p(rs, alt),
            rs,
            n,
            alt,
        );
    }
    let z = rs.atanh() / (FISHER_Z_VARIANCE / (n - 3) as f64).sqrt();
    result(Method::FisherZ, z, continuous_p(z, alt, normal_sf), rs, n, alt)
}

/// Normal scores `Phi^-1(rank / (n + 1))` of one margin's centred ranks.
pub(crate) fn normal_scores(centered: &[f64]) -> Vec<f64> {
    let n1 = centered.len() as f64 + 1.0;
    let normal = std_normal();
    centered
        .iter()
        .map(|c| normal.inverse_cdf((c + n1 / 2.0) / n1))
        .collect()
}

fn pearson_slices(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

pub(crate) fn fisher_yates_from_pairing(p: &RankPairing, alt: Alternative) -> TestResult {
    let sx = normal_scores(p.x_centered());
    let sy = normal_scores(p.y_centered());
    let r_scores = pearson_slices(&sx, &sy);
    let (t, pv) = t_statistic_p(r_scores, p.len(), alt);
    result(Method::FisherYates, t, pv, p.spearman(), p.len(), alt)
}

pub(crate) fn asymp_from_pairing(p: &RankPairing, alt: Alternative) -> TestResult {
    let n = p.len();
    let rs = p.spearman();
    let var = p.delta_variance();
    if var == 0.0 {
        // every influence term vanishes: |r_s| = 1, or r_s = 0 on disjoint supports
        if rs == 0.0 {
            return result(Method::AsympNorm, 0.0, continuous_p(0.0, alt, normal_sf), rs, n, alt);
        }
        return result(
            Method::AsympNorm,
            f64::INFINITY.copysign(rs),
            degenerate_p(rs, alt),
            rs,
            n,
            alt,
        );
    }
    let stat = (n as f64).sqrt() * rs / var.sqrt();
    result(Method::AsympNorm, stat, continuous_p(stat, alt, normal_sf), rs, n, alt)
}

fn with_pairing(
    method: Method,
    sample: &PairedSample,
    f: impl FnOnce(&RankPairing) -> TestResult,
) -> Result<TestResult> {
    check_n(method, sample.len())?;
    Ok(f(&RankPairing::new(sample)?))
}

/// Student t test on Spearman's r_s with `n - 2` degrees of freedom.
pub fn t_test(sample: &PairedSample, alt: Alternative) -> Result<TestResult> {
    with_pairing(Method::TTest, sample, |p| t_from_pairing(p, alt))
}

/// Fisher's z transform of r_s, standardised with variance `1.06 / (n - 3)`.
pub fn fisher_z_test(sample: &PairedSample, alt: Alternative) -> Result<TestResult> {
    with_pairing(Method::FisherZ, sample, |p| fisher_z_from_pairing(p, alt))
}

/// Pearson correlation of normal scores, referred to Student t with `n - 2` df.
/// The reported estimate is still r_s.
pub fn fisher_yates_test(sample: &PairedSample, alt: Alternative) -> Result<TestResult> {
    with_pairing(Method::FisherYates, sample, |p| fisher_yates_from_pairing(p, alt))
}

/// Large-sample normal test of `sqrt(n) r_s / sqrt(v_hat)`, with `v_hat` the
/// delta-method variance of Pearson's r evaluated on the ranks.
pub fn asymptotic_normal_test(sample: &PairedSample, alt: Alternative) -> Result<TestResult> {
    with_pairing(Method::AsympNorm, sample, |p| asymp_from_pairing(p, alt))
}

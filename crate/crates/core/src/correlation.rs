//! Correlation estimators and the central product moments behind the
//! studentized Spearman statistic.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rank::{average_ranks, RankVector};
use crate::sample::PairedSample;

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn clamp_unit(r: f64) -> f64 {
    r.clamp(-1.0, 1.0)
}

/// Sample Pearson correlation, the ratio of the centred cross product to the
/// root of the two centred sums of squares.
pub fn pearson_r(sample: &PairedSample) -> Result<f64> {
    let (xs, ys) = (sample.xs(), sample.ys());
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::degenerate("a margin has zero variance"));
    }
    Ok(clamp_unit(sxy / (sxx * syy).sqrt()))
}

/// Spearman's r_s: Pearson correlation of the average ranks.
///
/// The `1 - 6 sum(d^2) / (n (n^2 - 1))` shortcut is only valid without ties
/// and is deliberately not used here.
pub fn spearman_rs(sample: &PairedSample) -> Result<f64> {
    Ok(RankPairing::new(sample)?.spearman())
}

/// A central product moment estimate `mu_pq` with divisor `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub p: u32,
    pub q: u32,
    pub value: f64,
}

pub fn central_moment_pq(sample: &PairedSample, p: u32, q: u32) -> MomentEstimate {
    let (xs, ys) = (sample.xs(), sample.ys());
    let (mx, my) = (mean(xs), mean(ys));
    let sum: f64 = xs.iter().zip(ys).map(|(&x, &y)| pow(x - mx, p) * pow(y - my, q)).sum();
    MomentEstimate {
        p,
        q,
        value: sum / xs.len() as f64,
    }
}

fn pow(base: f64, exp: u32) -> f64 {
    // powi(0) is 1 even for a zero deviation.
    base.powi(exp as i32)
}

/// `sqrt(mu_22 / (mu_20 * mu_02))`, the scale estimate that studentizes a
/// correlation coefficient.
pub fn tau_hat(sample: &PairedSample) -> Result<f64> {
    let m20 = central_moment_pq(sample, 2, 0).value;
    let m02 = central_moment_pq(sample, 0, 2).value;
    if m20 == 0.0 || m02 == 0.0 {
        return Err(Error::degenerate("a margin has zero variance"));
    }
    let m22 = central_moment_pq(sample, 2, 2).value;
    Ok((m22 / (m20 * m02)).sqrt())
}

/// `r_s / tau_hat`, with `tau_hat` evaluated on the rank pairs, not the raw data.
pub fn studentized_spearman(sample: &PairedSample) -> Result<f64> {
    let ranks = PairedSample::new(
        average_ranks(sample.xs())?.into_vec(),
        average_ranks(sample.ys())?.into_vec(),
    )?;
    let rs = clamp_unit(pearson_r(&ranks)?);
    let tau = tau_hat(&ranks)?;
    if tau == 0.0 {
        // Only possible when the centred rank supports are disjoint, which
        // forces r_s = 0 as well.
        return Ok(0.0);
    }
    Ok(rs / tau)
}

/// Moran's expectation of r_s under bivariate normality with Pearson
/// correlation `rho`: `6 / (pi (n + 1)) * (asin(rho) + (n - 2) asin(rho / 2))`.
pub fn moran_expected_rs(rho: f64, n: usize) -> Result<f64> {
    if !rho.is_finite() || rho.abs() > 1.0 {
        return Err(Error::invalid(format!("rho must lie in [-1, 1], got {rho}")));
    }
    if n < 2 {
        return Err(Error::invalid(format!("n must be at least 2, got {n}")));
    }
    let n = n as f64;
    Ok(6.0 / (PI * (n + 1.0)) * (rho.asin() + (n - 2.0) * (rho / 2.0).asin()))
}

const LANES: usize = 4;

/// Centred ranks of both margins, fixed once per sample.
///
/// Every statistic the rank tests need is a function of two sums over the
/// pairing `(a_i, b_{pi(i)})`: the cross product `sum a b` and the fourth-order
/// term `sum a^2 b^2`. Both are exact because centred ranks are multiples of
/// 1/2, so a permuted statistic that equals the observed one mathematically
/// also equals it bit for bit.
#[derive(Debug, Clone)]
pub struct RankPairing {
    a: Vec<f64>,
    b: Vec<f64>,
    a_sq: Vec<f64>,
    saa: f64,
    sbb: f64,
}

/// The two pairing-dependent sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingSums {
    pub cross: f64,
    pub fourth: f64,
}

impl RankPairing {
    pub fn new(sample: &PairedSample) -> Result<Self> {
        Self::from_ranks(&average_ranks(sample.xs())?, &average_ranks(sample.ys())?)
    }

    pub fn from_ranks(x_ranks: &RankVector, y_ranks: &RankVector) -> Result<Self> {
        if x_ranks.len() != y_ranks.len() {
            return Err(Error::invalid("rank vectors differ in length"));
        }
        if x_ranks.is_constant() || y_ranks.is_constant() {
            return Err(Error::degenerate("a margin is constant (all values tied)"));
        }
        let a = x_ranks.centered();
        let b = y_ranks.centered();
        let a_sq: Vec<f64> = a.iter().map(|v| v * v).collect();
        let saa = a_sq.iter().sum();
        let sbb = b.iter().map(|v| v * v).sum();
        Ok(Self { a, b, a_sq, saa, sbb })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Centred y ranks in observed order; shuffle a copy of this to permute.
    pub fn y_centered(&self) -> &[f64] {
        &self.b
    }

    pub fn x_centered(&self) -> &[f64] {
        &self.a
    }

    /// Both sums are exact, so the lanes below may be added in any order.
    #[inline]
    pub fn sums(&self, b: &[f64]) -> PairingSums {
        debug_assert_eq!(b.len(), self.a.len());
        let mut cross = [0.0; LANES];
        let mut fourth = [0.0; LANES];
        let a = self.a.chunks_exact(LANES);
        let a2 = self.a_sq.chunks_exact(LANES);
        let bs = b.chunks_exact(LANES);
        let tail = (a.remainder(), a2.remainder(), bs.remainder());
        for ((a, a2), b) in a.zip(a2).zip(bs) {
            for l in 0..LANES {
                cross[l] += a[l] * b[l];
                fourth[l] += a2[l] * (b[l] * b[l]);
            }
        }
        for ((&a, &a2), &b) in tail.0.iter().zip(tail.1).zip(tail.2) {
            cross[0] += a * b;
            fourth[0] += a2 * (b * b);
        }
        PairingSums {
            cross: cross.iter().sum(),
            fourth: fourth.iter().sum(),
        }
    }

    #[inline]
    pub fn cross(&self, b: &[f64]) -> f64 {
        let mut acc = [0.0; LANES];
        let a = self.a.chunks_exact(LANES);
        let bs = b.chunks_exact(LANES);
        let tail: f64 = a.remainder().iter().zip(bs.remainder()).map(|(a, b)| a * b).sum();
        for (a, b) in a.zip(bs) {
            for l in 0..LANES {
                acc[l] += a[l] * b[l];
            }
        }
        acc.iter().sum::<f64>() + tail
    }

    #[inline]
    pub fn rs_from_cross(&self, cross: f64) -> f64 {
        clamp_unit(cross / (self.saa * self.sbb).sqrt())
    }

    /// `R_s = r_s / tau_hat`, which reduces to `cross / sqrt(n * fourth)`.
    #[inline]
    pub fn studentized_from_sums(&self, sums: PairingSums) -> f64 {
        if sums.fourth == 0.0 {
            return 0.0;
        }
        sums.cross / (self.a.len() as f64 * sums.fourth).sqrt()
    }

    pub fn spearman(&self) -> f64 {
        self.rs_from_cross(self.cross(&self.b))
    }

    pub fn studentized(&self) -> f64 {
        self.studentized_from_sums(self.sums(&self.b))
    }

    /// Plug-in delta-method variance of `sqrt(n) (r_s - rho_s)` on the ranks:
    /// the mean of `(u v - r_s (u^2 + v^2) / 2)^2` over the standardized rank
    /// pairs `(u, v)`. Equals `tau_hat^2` when `r_s = 0`.
    pub fn delta_variance(&self) -> f64 {
        let n = self.a.len() as f64;
        let (sx, sy) = ((self.saa / n).sqrt(), (self.sbb / n).sqrt());
        let r = self.spearman();
        let total: f64 = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(&a, &b)| {
                let (u, v) = (a / sx, b / sy);
                let inf = u * v - r * (u * u + v * v) / 2.0;
                inf * inf
            })
            .sum();
        total / n
    }

    /// `tau_hat` on the observed rank pairs.
    pub fn tau(&self) -> f64 {
        let n = self.a.len() as f64;
        let fourth = self.sums(&self.b).fourth;
        ((fourth / n) / ((self.saa / n) * (self.sbb / n))).sqrt()
    }
}

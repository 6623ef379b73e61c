//! Bivariate null scenarios: every law here has Spearman's rho_s = 0, most of
//! them with dependent margins.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Exp1, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::correlation::spearman_rs;
use crate::error::{Error, Result};
use crate::rng::RngState;
use crate::sample::PairedSample;

/// Degrees of freedom of the t margins in the sum/difference scenario.
pub const T_SUM_DIFF_DF: f64 = 4.1;
/// Degrees of freedom of the bivariate t scenario.
pub const MVT_DF: f64 = 5.0;
/// Component centres of the four-component mixture sit at `(+-5, +-5)`.
pub const MIX4_OFFSET: f64 = 5.0;
/// Correlations of the two-component mixture grid.
pub const MIX2_GRID: [f64; 4] = [0.1, 0.3, 0.6, 0.9];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioSpec {
    /// Standard bivariate normal, independent margins.
    Mvn,
    /// `r * (sqrt(2) u1, u2)` with `r ~ Exp(1)` and `u` uniform on the unit circle.
    ExponentialRadial,
    /// Uniform on the unit circle.
    Circular,
    /// `(W + Z, W - Z)` with `W, Z` iid t on 4.1 degrees of freedom.
    TSumDiff,
    /// Bivariate t on 5 degrees of freedom, identity scale.
    Mvt5,
    /// Equal mixture of bivariate normals with correlations `rho` and `-rho`.
    MvnMix2 { rho: f64 },
    /// Equal mixture of four unit normals centred at `(+-5, +-5)`.
    MvnMix4,
}

impl ScenarioSpec {
    /// The ten scenarios of the reference Type I error table, in table order.
    pub fn canonical() -> Vec<ScenarioSpec> {
        let mut v = vec![
            ScenarioSpec::Mvn,
            ScenarioSpec::ExponentialRadial,
            ScenarioSpec::TSumDiff,
            ScenarioSpec::Circular,
            ScenarioSpec::Mvt5,
        ];
        v.extend(MIX2_GRID.iter().map(|&rho| ScenarioSpec::MvnMix2 { rho }));
        v.push(ScenarioSpec::MvnMix4);
        v
    }

    pub fn validate(&self) -> Result<()> {
        if let ScenarioSpec::MvnMix2 { rho } = *self {
            if !(rho.is_finite() && rho.abs() < 1.0) {
                return Err(Error::invalid(format!("mixture rho must lie in (-1, 1), got {rho}")));
            }
        }
        Ok(())
    }

    /// Stable command-line identifier, e.g. `t4.1` or `mvnmix-0.9`.
    pub fn id(&self) -> String {
        match self {
            ScenarioSpec::Mvn => "mvn".into(),
            ScenarioSpec::ExponentialRadial => "exp".into(),
            ScenarioSpec::Circular => "circular".into(),
            ScenarioSpec::TSumDiff => "t4.1".into(),
            ScenarioSpec::Mvt5 => "mvt5".into(),
            ScenarioSpec::MvnMix2 { rho } => format!("mvnmix-{rho}"),
            ScenarioSpec::MvnMix4 => "mvnmix4".into(),
        }
    }

    /// Row label as printed in the reference table.
    pub fn label(&self) -> String {
        match self {
            ScenarioSpec::Mvn => "MVN".into(),
            ScenarioSpec::ExponentialRadial => "Exponential".into(),
            ScenarioSpec::Circular => "Circular".into(),
            ScenarioSpec::TSumDiff => "t4.1".into(),
            ScenarioSpec::Mvt5 => "MVT".into(),
            ScenarioSpec::MvnMix2 { rho } => format!("MVN {}", (rho * 10.0).round()),
            ScenarioSpec::MvnMix4 => "MVN 45".into(),
        }
    }

    /// 16-bit key used when deriving random streams. Mixture correlations are
    /// quantised to 1e-4, so two mixtures closer than that share streams.
    pub fn stream_code(&self) -> u16 {
        match *self {
            ScenarioSpec::Mvn => 0,
            ScenarioSpec::ExponentialRadial => 1,
            ScenarioSpec::Circular => 2,
            ScenarioSpec::TSumDiff => 3,
            ScenarioSpec::Mvt5 => 4,
            ScenarioSpec::MvnMix4 => 5,
            ScenarioSpec::MvnMix2 { rho } => 0x8000 | ((rho + 1.0) * 10_000.0).round() as u16,
        }
    }

    /// One draw `(x, y)` from the scenario's joint law.
    pub fn draw_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        match *self {
            ScenarioSpec::Mvn => (rng.sample(StandardNormal), rng.sample(StandardNormal)),
            ScenarioSpec::ExponentialRadial => {
                let r: f64 = rng.sample(Exp1);
                let theta = rng.random::<f64>() * 2.0 * PI;
                (r * SQRT_2 * theta.cos(), r * theta.sin())
            }
            ScenarioSpec::Circular => {
                let theta = rng.random::<f64>() * 2.0 * PI;
                (theta.cos(), theta.sin())
            }
            ScenarioSpec::TSumDiff => {
                let t = StudentT::new(T_SUM_DIFF_DF).expect("df > 0");
                let (w, z): (f64, f64) = (t.sample(rng), t.sample(rng));
                (w + z, w - z)
            }
            ScenarioSpec::Mvt5 => {
                let chi = ChiSquared::new(MVT_DF).expect("df > 0");
                let (z1, z2): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
                let scale = (MVT_DF / chi.sample(rng)).sqrt();
                (z1 * scale, z2 * scale)
            }
            ScenarioSpec::MvnMix2 { rho } => {
                let first = rng.random::<bool>();
                let (z1, z2): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
                let r = if first { rho } else { -rho };
                (z1, r * z1 + (1.0 - r * r).sqrt() * z2)
            }
            ScenarioSpec::MvnMix4 => {
                let k: u8 = rng.random_range(0..4);
                let mx = if k < 2 { MIX4_OFFSET } else { -MIX4_OFFSET };
                let my = if k % 2 == 0 { MIX4_OFFSET } else { -MIX4_OFFSET };
                let (z1, z2): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
                (mx + z1, my + z2)
            }
        }
    }

    /// `n >= 1` draws as separate margins.
    pub fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
        (0..n).map(|_| self.draw_pair(rng)).unzip()
    }
}

impl fmt::Display for ScenarioSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for ScenarioSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let spec = match s {
            "mvn" => ScenarioSpec::Mvn,
            "exp" => ScenarioSpec::ExponentialRadial,
            "circular" => ScenarioSpec::Circular,
            "t4.1" => ScenarioSpec::TSumDiff,
            "mvt5" => ScenarioSpec::Mvt5,
            "mvnmix4" => ScenarioSpec::MvnMix4,
            other => {
                let rho = other
                    .strip_prefix("mvnmix-")
                    .and_then(|r| r.parse::<f64>().ok())
                    .ok_or_else(|| Error::invalid(format!("unknown scenario '{other}'")))?;
                ScenarioSpec::MvnMix2 { rho }
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// `n` i.i.d. pairs drawn on the stream `rng`.
pub fn sample_scenario(spec: &ScenarioSpec, n: usize, rng: RngState) -> Result<PairedSample> {
    spec.validate()?;
    if n < 2 {
        return Err(Error::invalid(format!("a paired sample needs n >= 2, got {n}")));
    }
    let (xs, ys) = spec.draw(n, &mut rng.rng());
    PairedSample::new(xs, ys)
}

/// r_s over one large draw; a statistical check that the scenario is null.
pub fn null_spearman_check(spec: &ScenarioSpec, draws: usize, rng: RngState) -> Result<f64> {
    if draws < 100_000 {
        return Err(Error::invalid(format!("use at least 100000 draws, got {draws}")));
    }
    spearman_rs(&sample_scenario(spec, draws, rng)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for spec in ScenarioSpec::canonical() {
            assert_eq!(spec.id().parse::<ScenarioSpec>().unwrap(), spec);
        }
        let ids: Vec<String> = ScenarioSpec::canonical().iter().map(|s| s.id()).collect();
        assert_eq!(
            ids,
            [
                "mvn",
                "exp",
                "t4.1",
                "circular",
                "mvt5",
                "mvnmix-0.1",
                "mvnmix-0.3",
                "mvnmix-0.6",
                "mvnmix-0.9",
                "mvnmix4"
            ]
        );
        assert!("mvnmix-1.5".parse::<ScenarioSpec>().is_err());
        assert!("normal".parse::<ScenarioSpec>().is_err());
        assert_eq!(ScenarioSpec::MvnMix2 { rho: 0.6 }.label(), "MVN 6");
    }

    #[test]
    fn stream_codes_distinct() {
        let mut codes: Vec<u16> = ScenarioSpec::canonical().iter().map(|s| s.stream_code()).collect();
        codes.sort();
        codes.dedup();
        assert_eq!(codes.len(), 10);
    }

    #[test]
    fn circle_draws_on_circle() {
        let (xs, ys) = ScenarioSpec::Circular.draw(10_000, &mut RngState::new(1, 0).rng());
        for (x, y) in xs.iter().zip(&ys) {
            assert!((x * x + y * y - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_given_state() {
        for spec in ScenarioSpec::canonical() {
            let a = sample_scenario(&spec, 50, RngState::new(9, 4)).unwrap();
            let b = sample_scenario(&spec, 50, RngState::new(9, 4)).unwrap();
            assert_eq!(a, b);
            let c = sample_scenario(&spec, 50, RngState::new(9, 5)).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn rejects_bad_requests() {
        assert!(sample_scenario(&ScenarioSpec::Mvn, 1, RngState::new(0, 0)).is_err());
        assert!(sample_scenario(&ScenarioSpec::MvnMix2 { rho: 1.0 }, 5, RngState::new(0, 0)).is_err());
        assert!(null_spearman_check(&ScenarioSpec::Mvn, 1_000, RngState::new(0, 0)).is_err());
    }
}

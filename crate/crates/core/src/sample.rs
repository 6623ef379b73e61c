use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n >= 2` finite paired observations `(x_i, y_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSample {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PairedSample {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::invalid(format!(
                "margins differ in length ({} vs {})",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::invalid(format!("need at least 2 pairs, got {}", xs.len())));
        }
        if let Some(i) = xs.iter().chain(ys.iter()).position(|v| !v.is_finite()) {
            let (margin, idx) = if i < xs.len() { ("x", i) } else { ("y", i - xs.len()) };
            return Err(Error::invalid(format!("non-finite {margin} value at index {idx}")));
        }
        Ok(Self { xs, ys })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let (xs, ys) = pairs.iter().copied().unzip();
        Self::new(xs, ys)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    /// Always false: construction rejects fewer than two pairs.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    /// The sample with margins exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            xs: self.ys.clone(),
            ys: self.xs.clone(),
        }
    }

    /// Applies `f` to the y margin. Fails if `f` produces a non-finite value.
    pub fn map_y(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.xs.clone(), self.ys.iter().map(|&y| f(y)).collect())
    }

    /// Applies `f` to the x margin. Fails if `f` produces a non-finite value.
    pub fn map_x(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.xs.iter().map(|&x| f(x)).collect(), self.ys.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_short_mismatched_and_non_finite() {
        assert!(PairedSample::new(vec![1.0], vec![1.0]).is_err());
        assert!(PairedSample::new(vec![1.0, 2.0], vec![1.0]).is_err());
        assert!(PairedSample::new(vec![1.0, f64::NAN], vec![1.0, 2.0]).is_err());
        assert!(PairedSample::new(vec![1.0, 2.0], vec![f64::INFINITY, 2.0]).is_err());
        assert!(PairedSample::new(vec![1.0, 2.0], vec![2.0, 1.0]).is_ok());
    }

    #[test]
    fn map_rejects_non_finite_result() {
        let s = PairedSample::new(vec![1.0, 2.0], vec![0.0, 1.0]).unwrap();
        assert!(s.map_y(f64::ln).is_err());
        assert_eq!(s.map_y(|y| -y).unwrap().ys(), &[-0.0, -1.0]);
    }
}

use serde::{Deserialize, Serialize};

use crate::{vecops, Error, Result, Scalar};

/// A joint parameter vector `y = (θ, α)`.
///
/// Coordinates `[0, split)` belong to the minimizing player, `[split, len)`
/// to the maximizing player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point<T> {
    values: Vec<T>,
    split: usize,
}

impl<T: Scalar> Point<T> {
    pub fn new(values: Vec<T>, split: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidConfig("point dimension must be at least 1".into()));
        }
        if split > values.len() {
            return Err(Error::InvalidConfig(format!(
                "split {split} exceeds dimension {}",
                values.len()
            )));
        }
        if !vecops::all_finite(&values) {
            return Err(Error::InvalidConfig("point has non-finite entries".into()));
        }
        Ok(Self { values, split })
    }

    pub fn zeros(dim: usize, split: usize) -> Result<Self> {
        Self::new(vec![T::zero(); dim], split)
    }

    /// Builds a point without validation; used on hot paths where the caller
    /// checks finiteness separately.
    pub(crate) fn from_raw(values: Vec<T>, split: usize) -> Self {
        debug_assert!(split <= values.len());
        Self { values, split }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn split(&self) -> usize {
        self.split
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Minimization block θ.
    pub fn theta(&self) -> &[T] {
        &self.values[..self.split]
    }

    /// Maximization block α.
    pub fn alpha(&self) -> &[T] {
        &self.values[self.split..]
    }

    pub fn norm(&self) -> T {
        vecops::norm2(&self.values)
    }

    pub fn is_finite(&self) -> bool {
        vecops::all_finite(&self.values)
    }

    /// `self - scale * dir`, elementwise.
    pub fn step_along(&self, scale: T, dir: &[T]) -> Self {
        debug_assert_eq!(dir.len(), self.values.len());
        let values = self
            .values
            .iter()
            .zip(dir)
            .map(|(&x, &d)| x - scale * d)
            .collect();
        Self::from_raw(values, self.split)
    }

    pub fn distance(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b))
            .sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_split_and_non_finite() {
        assert!(Point::<f64>::new(vec![1.0], 2).is_err());
        assert!(Point::<f64>::new(vec![], 0).is_err());
        assert!(Point::new(vec![f64::NAN, 0.0], 1).is_err());
        assert!(Point::new(vec![1.0, 2.0], 2).is_ok());
    }

    #[test]
    fn blocks() {
        let p = Point::new(vec![1.0f32, 2.0, 3.0], 1).unwrap();
        assert_eq!(p.theta(), &[1.0]);
        assert_eq!(p.alpha(), &[2.0, 3.0]);
    }
}

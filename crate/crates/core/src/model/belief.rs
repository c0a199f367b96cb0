use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance for accepting a caller-supplied probability vector.
pub const INPUT_SIMPLEX_TOL: f64 = 1e-9;
/// Tolerance that internally renormalized vectors are held to.
pub const INTERNAL_SIMPLEX_TOL: f64 = 1e-12;

/// A posterior over user types.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Belief {
    probs: Vec<f64>,
}

/// Outcome of classifying a belief against a concentration threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Concentration {
    ConcentratedOn(usize),
    Unconcentrated,
}

impl Belief {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_simplex(&probs, INPUT_SIMPLEX_TOL).map_err(Error::InvalidBelief)?;
        Ok(Belief { probs })
    }

    pub fn uniform(num_types: usize) -> Self {
        assert!(num_types > 0, "belief over zero types");
        Belief {
            probs: vec![1.0 / num_types as f64; num_types],
        }
    }

    /// The point mass on `type_index`.
    pub fn vertex(num_types: usize, type_index: usize) -> Self {
        assert!(type_index < num_types, "vertex index out of range");
        let mut probs = vec![0.0; num_types];
        probs[type_index] = 1.0;
        Belief { probs }
    }

    /// Normalizes nonnegative weights. Fails when the weights sum to zero.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidBelief(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidBelief("weights sum to zero".into()));
        }
        Ok(Belief::from_normalized_unchecked(
            weights.iter().map(|w| w / total).collect(),
        ))
    }

    /// Wraps a vector already known to lie on the simplex. Drift is removed by one more
    /// normalization pass.
    pub(crate) fn from_normalized_unchecked(mut probs: Vec<f64>) -> Self {
        renormalize(&mut probs);
        Belief { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }

    pub fn get(&self, type_index: usize) -> f64 {
        self.probs[type_index]
    }

    /// Most likely type; lowest index on ties.
    pub fn mode(&self) -> usize {
        argmax(&self.probs)
    }

    pub fn l1_distance(&self, other: &Belief) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    /// l1-distance to the vertex `e_m`, i.e. `2 (1 - b(m))`.
    pub fn distance_to_vertex(&self, type_index: usize) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(m, p)| if m == type_index { (1.0 - p).abs() } else { p.abs() })
            .sum()
    }

    /// `b` is (delta, m)-concentrated when `b(m) > 1 - delta`.
    pub fn is_concentrated_on(&self, type_index: usize, delta: f64) -> bool {
        self.probs[type_index] > 1.0 - delta
    }

    /// `b` is delta-unconcentrated when `b(m) < 1 - delta` for every type.
    pub fn is_unconcentrated(&self, delta: f64) -> bool {
        self.probs.iter().all(|p| *p < 1.0 - delta)
    }

    pub fn concentration(&self, delta: f64) -> Result<Concentration> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "concentration threshold must lie in (0, 1), got {delta}"
            )));
        }
        // For delta <= 1/2 at most one type can clear the threshold; above that the mode is
        // the only sensible answer.
        let m = self.mode();
        Ok(if self.is_concentrated_on(m, delta) {
            Concentration::ConcentratedOn(m)
        } else {
            Concentration::Unconcentrated
        })
    }
}

pub(crate) fn check_simplex(v: &[f64], tol: f64) -> std::result::Result<(), String> {
    if v.is_empty() {
        return Err("probability vector is empty".into());
    }
    if let Some((i, p)) = v.iter().enumerate().find(|(_, p)| !p.is_finite() || **p < 0.0) {
        return Err(format!("entry {i} is {p}, expected a finite nonnegative value"));
    }
    let total: f64 = v.iter().sum();
    if (total - 1.0).abs() > tol {
        return Err(format!("entries sum to {total}, expected 1 within {tol:e}"));
    }
    Ok(())
}

pub(crate) fn renormalize(v: &mut [f64]) {
    let total: f64 = v.iter().sum();
    if total > 0.0 {
        v.iter_mut().for_each(|p| *p /= total);
    }
}

/// First index of the maximum. NaNs never win.
pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate().skip(1) {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_off_simplex_vectors() {
        assert!(Belief::new(vec![0.5, 0.6]).is_err());
        assert!(Belief::new(vec![-0.1, 1.1]).is_err());
        assert!(Belief::new(vec![]).is_err());
        assert!(Belief::new(vec![0.5, 0.5 + 5e-10]).is_ok());
    }

    #[test]
    fn concentration_examples() {
        let b = Belief::new(vec![0.99, 0.01]).unwrap();
        assert_eq!(b.concentration(0.05).unwrap(), Concentration::ConcentratedOn(0));

        let b = Belief::uniform(2);
        assert_eq!(b.concentration(0.4).unwrap(), Concentration::Unconcentrated);

        let c: f64 = 0.02;
        let b = Belief::new(vec![0.96, 0.04]).unwrap();
        assert_eq!(b.concentration(c * c / 4.0).unwrap(), Concentration::Unconcentrated);

        assert!(b.concentration(0.0).is_err());
        assert!(b.concentration(1.0).is_err());
    }

    #[test]
    fn vertex_distance() {
        let b = Belief::new(vec![0.25, 0.5, 0.25]).unwrap();
        assert!((b.distance_to_vertex(1) - 1.0).abs() < 1e-15);
        assert_eq!(Belief::vertex(3, 2).distance_to_vertex(2), 0.0);
    }
}

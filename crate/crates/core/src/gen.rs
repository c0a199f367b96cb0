//! Random instances from latent-vector similarities.
//!
//! Each type and category gets a standard-normal latent vector; the preference for
//! `(k, m)` is the negated cosine distance between the two, min-max normalized over the
//! whole matrix and clipped. The prior is a softmax of normal logits. The stream comes from
//! ChaCha8 seeded with `seed`, so a config always maps to the same instance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Instance;

pub use crate::fixtures::by_name as paper_fixture;

const MAX_RESAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub num_types: usize,
    pub num_categories: usize,
    pub latent_dim: usize,
    pub seed: u64,
    pub clip_low: f64,
    pub clip_high: f64,
    pub prior_logit_std: f64,
}

impl GenConfig {
    pub fn new(num_types: usize, num_categories: usize, seed: u64) -> Self {
        GenConfig {
            num_types,
            num_categories,
            latent_dim: 8,
            seed,
            clip_low: 0.01,
            clip_high: 0.99,
            prior_logit_std: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.num_types == 0 || self.num_categories == 0 {
            return bad("need at least one type and one category".into());
        }
        if self.latent_dim < 2 {
            return bad(format!("latent_dim must be at least 2, got {}", self.latent_dim));
        }
        if !(0.0 < self.clip_low && self.clip_low < self.clip_high && self.clip_high < 1.0) {
            return bad(format!(
                "clip bounds must satisfy 0 < low < high < 1, got [{}, {}]",
                self.clip_low, self.clip_high
            ));
        }
        if !(self.prior_logit_std >= 0.0 && self.prior_logit_std.is_finite()) {
            return bad(format!("prior_logit_std must be non-negative, got {}", self.prior_logit_std));
        }
        Ok(())
    }
}

fn latent(rng: &mut ChaCha8Rng, dim: usize) -> Result<Vec<f64>> {
    for _ in 0..MAX_RESAMPLES {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return Ok(v.into_iter().map(|x| x / norm).collect());
        }
    }
    Err(Error::DegenerateLatents(MAX_RESAMPLES))
}

pub fn generate(config: &GenConfig) -> Result<Instance> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let types = (0..config.num_types)
        .map(|_| latent(&mut rng, config.latent_dim))
        .collect::<Result<Vec<_>>>()?;
    let categories = (0..config.num_categories)
        .map(|_| latent(&mut rng, config.latent_dim))
        .collect::<Result<Vec<_>>>()?;

    // cos - 1 is the negated cosine distance
    let mut prefs: Vec<Vec<f64>> = categories
        .iter()
        .map(|c| {
            types
                .iter()
                .map(|t| c.iter().zip(t).map(|(a, b)| a * b).sum::<f64>() - 1.0)
                .collect()
        })
        .collect();
    let (lo, hi) = prefs
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    for x in prefs.iter_mut().flatten() {
        let unit = if hi > lo { (*x - lo) / (hi - lo) } else { 0.5 };
        *x = unit.clamp(config.clip_low, config.clip_high);
    }

    let normal = Normal::new(0.0, config.prior_logit_std)
        .map_err(|e| Error::InvalidArgument(format!("prior logits: {e}")))?;
    let logits: Vec<f64> = (0..config.num_types).map(|_| rng.sample(normal)).collect();
    let top = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logits.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    let prior = weights.iter().map(|w| w / total).collect();
    Instance::new(prior, prefs)
}

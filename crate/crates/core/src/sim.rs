//! Monte-Carlo sessions: a user type is drawn from the prior and the session runs until
//! the first dislike.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Instance;
use crate::value::{value_extended, ExtendedPolicy};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionStats {
    pub sessions: u64,
    pub mean_likes: f64,
    /// Standard error of `mean_likes` from the sample variance.
    pub std_error: f64,
    pub per_type_mean: Vec<f64>,
    pub per_type_std_error: Vec<f64>,
    pub per_type_count: Vec<u64>,
    /// Sessions by number of likes before the dislike.
    pub churn_step_histogram: BTreeMap<u64, u64>,
}

impl SessionStats {
    pub fn max_length(&self) -> u64 {
        self.churn_step_histogram.keys().next_back().copied().unwrap_or(0)
    }

    /// `key<TAB>value` summary, one per line, with per-type rows.
    pub fn to_tsv(&self, instance: &Instance) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "sessions\t{}", self.sessions);
        let _ = writeln!(out, "mean_likes\t{}", self.mean_likes);
        let _ = writeln!(out, "std_error\t{}", self.std_error);
        let _ = writeln!(out, "max_length\t{}", self.max_length());
        for (m, name) in instance.type_names().iter().enumerate() {
            let _ = writeln!(
                out,
                "type_mean:{name}\t{}\t{}\t{}",
                self.per_type_mean[m], self.per_type_std_error[m], self.per_type_count[m]
            );
        }
        out
    }

    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("length,count\n");
        for (len, count) in &self.churn_step_histogram {
            let _ = writeln!(out, "{len},{count}");
        }
        out
    }
}

#[derive(Default, Clone, Copy)]
struct Moments {
    n: u64,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn add(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn mean(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sum / self.n as f64
        }
    }

    fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let var = ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

/// Runs `sessions` independent sessions. Session `i` draws from its own ChaCha8 stream
/// (`seed`, stream `i`), so results do not depend on how sessions are scheduled.
pub fn simulate(instance: &Instance, policy: &ExtendedPolicy, sessions: u64, seed: u64) -> Result<SessionStats> {
    policy.validate(instance)?;
    if sessions == 0 {
        return Err(Error::InvalidArgument("sessions must be at least 1".into()));
    }
    let types = WeightedIndex::new(instance.prior())
        .map_err(|e| Error::InvalidInstance(format!("prior: {e}")))?;
    let nm = instance.num_types();
    let mut all = Moments::default();
    let mut per_type = vec![Moments::default(); nm];
    let mut histogram = BTreeMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for i in 0..sessions {
        rng.set_stream(i);
        rng.set_word_pos(0);
        let m = types.sample(&mut rng);
        let mut likes = 0u64;
        loop {
            let k = policy.action_at(likes as usize);
            if !rng.gen_bool(instance.pref(k, m)) {
                break;
            }
            likes += 1;
        }
        all.add(likes as f64);
        per_type[m].add(likes as f64);
        *histogram.entry(likes).or_insert(0) += 1;
    }

    Ok(SessionStats {
        sessions,
        mean_likes: all.mean(),
        std_error: all.std_error(),
        per_type_mean: per_type.iter().map(Moments::mean).collect(),
        per_type_std_error: per_type.iter().map(Moments::std_error).collect(),
        per_type_count: per_type.iter().map(|s| s.n).collect(),
        churn_step_histogram: histogram,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueCheck {
    pub passed: bool,
    pub simulated: f64,
    pub std_error: f64,
    pub analytic: f64,
}

/// Simulates and compares the mean against the exact value of `policy` (3 standard errors).
pub fn simulate_policy_value_check(
    instance: &Instance,
    policy: &ExtendedPolicy,
    sessions: u64,
    seed: u64,
) -> Result<ValueCheck> {
    let analytic = value_extended(instance, &instance.prior_belief(), policy)?;
    check_against(instance, policy, sessions, seed, analytic)
}

/// Same comparison against a caller-supplied value.
pub fn check_against(
    instance: &Instance,
    policy: &ExtendedPolicy,
    sessions: u64,
    seed: u64,
    analytic: f64,
) -> Result<ValueCheck> {
    if sessions < 1000 {
        return Err(Error::InvalidArgument(format!(
            "a value check needs at least 1000 sessions, got {sessions}"
        )));
    }
    let stats = simulate(instance, policy, sessions, seed)?;
    Ok(ValueCheck {
        passed: (stats.mean_likes - analytic).abs() <= 3.0 * stats.std_error,
        simulated: stats.mean_likes,
        std_error: stats.std_error,
        analytic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::value::PolicyPrefix;

    #[test]
    fn zero_row_churns_immediately() {
        let inst = Instance::new(vec![0.5, 0.5], vec![vec![0.0, 0.0], vec![0.9, 0.9]]).unwrap();
        let stats = simulate(&inst, &ExtendedPolicy::fixed(0), 1000, 1).unwrap();
        assert_eq!(stats.mean_likes, 0.0);
        assert_eq!(stats.churn_step_histogram.get(&0), Some(&1000));
    }

    #[test]
    fn example1_fixed_policies() {
        let inst = fixtures::example1();
        for k in 0..2 {
            let check = simulate_policy_value_check(&inst, &ExtendedPolicy::fixed(k), 100_000, 42).unwrap();
            assert!(check.passed, "{check:?}");
        }
        let check = simulate_policy_value_check(&inst, &ExtendedPolicy::fixed(1), 100_000, 42).unwrap();
        assert!((check.analytic - 4.0125).abs() < 1e-4);
    }

    #[test]
    fn negative_control() {
        let inst = fixtures::example1();
        let policy = ExtendedPolicy::fixed(1);
        let v = value_extended(&inst, &inst.prior_belief(), &policy).unwrap();
        assert!(!check_against(&inst, &policy, 100_000, 42, v + 1.0).unwrap().passed);
    }

    #[test]
    fn histogram_and_types_add_up() {
        let inst = fixtures::appendix(2).unwrap();
        let policy = ExtendedPolicy::new(PolicyPrefix::new(vec![1, 0]), 2);
        let stats = simulate(&inst, &policy, 5000, 3).unwrap();
        assert_eq!(stats.churn_step_histogram.values().sum::<u64>(), 5000);
        assert_eq!(stats.per_type_count.iter().sum::<u64>(), 5000);
        let weighted: f64 = stats
            .per_type_mean
            .iter()
            .zip(&stats.per_type_count)
            .map(|(m, &n)| m * n as f64)
            .sum::<f64>()
            / 5000.0;
        assert!((weighted - stats.mean_likes).abs() < 1e-9);
        assert!(stats.histogram_csv().starts_with("length,count\n"));
    }

    #[test]
    fn deterministic_per_seed() {
        let inst = fixtures::example1();
        let a = simulate(&inst, &ExtendedPolicy::fixed(0), 2000, 9).unwrap();
        let b = simulate(&inst, &ExtendedPolicy::fixed(0), 2000, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn small_checks_are_rejected() {
        let inst = fixtures::example1();
        assert!(simulate_policy_value_check(&inst, &ExtendedPolicy::fixed(0), 999, 1).is_err());
        assert!(simulate(&inst, &ExtendedPolicy::fixed(0), 0, 1).is_err());
    }
}

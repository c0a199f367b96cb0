//! Policy evaluation and the value bounds used by the solvers.
//!
//! Values are expected numbers of likes in a session. For a policy `pi` and belief `b`,
//! `V(b) = sum_m b(m) sum_t prod_{j<=t} P(pi_j, m)`. Every closed form here accumulates per
//! type like that; the walk-product route (`value_finite_horizon_walk`) is kept as an
//! independent cross-check.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Belief, Instance};

/// A finite recommendation sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct PolicyPrefix(Vec<usize>);

impl PolicyPrefix {
    pub fn new(actions: Vec<usize>) -> Self {
        PolicyPrefix(actions)
    }

    pub fn empty() -> Self {
        PolicyPrefix(Vec::new())
    }

    pub fn repeat(category: usize, times: usize) -> Self {
        PolicyPrefix(vec![category; times])
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn push(&mut self, category: usize) {
        self.0.push(category);
    }

    pub fn validate(&self, instance: &Instance) -> Result<()> {
        self.0.iter().try_for_each(|&k| instance.check_category(k))
    }

    pub fn names(&self, instance: &Instance) -> Vec<String> {
        self.0
            .iter()
            .map(|&k| instance.category_name(k).to_string())
            .collect()
    }
}

impl From<Vec<usize>> for PolicyPrefix {
    fn from(v: Vec<usize>) -> Self {
        PolicyPrefix(v)
    }
}

/// A prefix followed by one category repeated forever.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtendedPolicy {
    pub prefix: PolicyPrefix,
    pub tail_category: usize,
}

impl ExtendedPolicy {
    pub fn new(prefix: PolicyPrefix, tail_category: usize) -> Self {
        ExtendedPolicy {
            prefix,
            tail_category,
        }
    }

    pub fn fixed(category: usize) -> Self {
        ExtendedPolicy::new(PolicyPrefix::empty(), category)
    }

    /// Category recommended at round `t` (0-based).
    pub fn action_at(&self, t: usize) -> usize {
        self.prefix.0.get(t).copied().unwrap_or(self.tail_category)
    }

    pub fn validate(&self, instance: &Instance) -> Result<()> {
        self.prefix.validate(instance)?;
        instance.check_category(self.tail_category)
    }
}

/// Bounds on the best value among policies that start with a given prefix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrefixBounds {
    pub lower: f64,
    pub upper: f64,
    /// Probability the session survives the whole prefix.
    pub survival: f64,
    /// Expected likes collected during the prefix.
    pub prefix_reward: f64,
    /// Best fixed category at the post-prefix belief; playing it forever attains `lower`.
    pub lower_tail: usize,
}

/// Relative margin within which two values count as tied; ties go to the lowest index.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[inline]
pub(crate) fn beats(candidate: f64, incumbent: f64) -> bool {
    candidate > incumbent + TIE_TOLERANCE * incumbent.abs().max(1.0)
}

#[inline]
pub(crate) fn geometric_ratio(p: f64) -> f64 {
    p / (1.0 - p)
}

/// Per-entry `P/(1-P)` and per-type best ratio, precomputed once per instance.
#[derive(Debug, Clone)]
pub(crate) struct RatioTable {
    num_types: usize,
    ratios: Vec<f64>,
    best: Vec<f64>,
}

impl RatioTable {
    pub(crate) fn new(instance: &Instance) -> Self {
        let nm = instance.num_types();
        let ratios: Vec<f64> = instance.rows().flatten().map(|&p| geometric_ratio(p)).collect();
        let best = (0..nm)
            .map(|m| {
                (0..instance.num_categories())
                    .map(|k| ratios[k * nm + m])
                    .fold(0.0, f64::max)
            })
            .collect();
        RatioTable {
            num_types: nm,
            ratios,
            best,
        }
    }

    #[inline]
    pub(crate) fn fixed(&self, b: &[f64], k: usize) -> f64 {
        let row = &self.ratios[k * self.num_types..(k + 1) * self.num_types];
        row.iter().zip(b).map(|(r, w)| r * w).sum()
    }

    #[inline]
    pub(crate) fn upper(&self, b: &[f64]) -> f64 {
        self.best.iter().zip(b).map(|(r, w)| r * w).sum()
    }

    /// Best fixed-category value and its category (lowest index on ties).
    #[inline]
    pub(crate) fn lower(&self, b: &[f64]) -> (f64, usize) {
        let num_categories = self.ratios.len() / self.num_types;
        let mut best = (self.fixed(b, 0), 0);
        for k in 1..num_categories {
            let v = self.fixed(b, k);
            if beats(v, best.0) {
                best = (v, k);
            }
        }
        best
    }
}

/// Value of recommending `k` forever: `sum_m b(m) P(k,m) / (1 - P(k,m))`.
pub fn value_fixed(instance: &Instance, belief: &Belief, k: usize) -> Result<f64> {
    instance.check_belief(belief)?;
    instance.check_category(k)?;
    Ok(instance
        .row(k)
        .iter()
        .zip(belief.as_slice())
        .map(|(p, w)| w * geometric_ratio(*p))
        .sum())
}

/// Exact value of a prefix followed by a fixed tail.
pub fn value_extended(instance: &Instance, belief: &Belief, policy: &ExtendedPolicy) -> Result<f64> {
    instance.check_belief(belief)?;
    policy.validate(instance)?;
    let mut total = 0.0;
    for (m, w) in belief.as_slice().iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        let (mut survival, mut likes) = (1.0, 0.0);
        for &k in policy.prefix.as_slice() {
            survival *= instance.pref(k, m);
            likes += survival;
        }
        likes += survival * geometric_ratio(instance.pref(policy.tail_category, m));
        total += w * likes;
    }
    Ok(total)
}

/// Expected likes within the first `prefix.len()` rounds, accumulated per type.
pub fn value_finite_horizon(instance: &Instance, belief: &Belief, prefix: &PolicyPrefix) -> Result<f64> {
    instance.check_belief(belief)?;
    prefix.validate(instance)?;
    let mut total = 0.0;
    for (m, w) in belief.as_slice().iter().enumerate() {
        let (mut survival, mut likes) = (1.0, 0.0);
        for &k in prefix.as_slice() {
            survival *= instance.pref(k, m);
            likes += survival;
        }
        total += w * likes;
    }
    Ok(total)
}

/// Same quantity as [`value_finite_horizon`], summed as `sum_t prod_j p_{pi_j}(b_j)` along the
/// belief walk. Kept for cross-checking the per-type form.
pub fn value_finite_horizon_walk(instance: &Instance, belief: &Belief, prefix: &PolicyPrefix) -> Result<f64> {
    instance.check_belief(belief)?;
    prefix.validate(instance)?;
    let mut b = belief.as_slice().to_vec();
    let (mut survival, mut likes) = (1.0, 0.0);
    for &k in prefix.as_slice() {
        match instance.update_raw(&mut b, k) {
            Some(p) => {
                survival *= p;
                likes += survival;
            }
            // the session ends with certainty; nothing more accrues
            None => break,
        }
    }
    Ok(likes)
}

/// Smallest horizon whose truncation loses at most `epsilon`:
/// `ceil(log_{p_max}(epsilon (1 - p_max) / p_max))`, never below 1.
pub fn horizon_for_epsilon(instance: &Instance, epsilon: f64) -> Result<usize> {
    horizon_for_pmax(instance.p_max(), epsilon)
}

pub fn horizon_for_pmax(p_max: f64, epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(0.0..1.0).contains(&p_max) {
        return Err(Error::InvalidArgument(format!("p_max must lie in [0, 1), got {p_max}")));
    }
    if p_max == 0.0 {
        return Ok(1);
    }
    let tail = geometric_ratio(p_max);
    let arg = epsilon / tail;
    if arg >= 1.0 {
        return Ok(1);
    }
    let mut h = (arg.ln() / p_max.ln()).ceil().max(1.0) as usize;
    // guard against the logarithm landing a hair under an integer
    while p_max.powi(h as i32) * tail > epsilon {
        h += 1;
    }
    Ok(h)
}

/// Clairvoyant bound `sum_m b(m) max_k P(k,m)/(1-P(k,m))`.
pub fn upper_bound(instance: &Instance, belief: &Belief) -> Result<f64> {
    instance.check_belief(belief)?;
    Ok(RatioTable::new(instance).upper(belief.as_slice()))
}

/// Best fixed-category value and its category (lowest index on ties).
pub fn lower_bound(instance: &Instance, belief: &Belief) -> Result<(f64, usize)> {
    instance.check_belief(belief)?;
    Ok(RatioTable::new(instance).lower(belief.as_slice()))
}

/// Splits the value of any policy starting with `prefix` into the likes collected along the
/// prefix and a continuation, then bounds the continuation from both sides.
pub fn prefix_bounds(instance: &Instance, belief: &Belief, prefix: &PolicyPrefix) -> Result<PrefixBounds> {
    instance.check_belief(belief)?;
    prefix.validate(instance)?;
    let table = RatioTable::new(instance);
    let mut b = belief.as_slice().to_vec();
    let (mut survival, mut prefix_reward) = (1.0, 0.0);
    for (step, &k) in prefix.as_slice().iter().enumerate() {
        let p = instance
            .update_raw(&mut b, k)
            .ok_or(Error::ZeroLikelihood { step, category: k })?;
        survival *= p;
        prefix_reward += survival;
    }
    let (lower_cont, lower_tail) = table.lower(&b);
    Ok(PrefixBounds {
        lower: prefix_reward + survival * lower_cont,
        upper: prefix_reward + survival * table.upper(&b),
        survival,
        prefix_reward,
        lower_tail,
    })
}

/// Parses `k1,k2,k1|k1`: comma-separated categories for the prefix, then `|` and the tail.
/// Categories are given by name or by 0-based index; names take precedence.
pub fn parse_policy(instance: &Instance, text: &str) -> Result<ExtendedPolicy> {
    let parse_err = |column: usize, message: String| Error::Parse {
        line: 1,
        column,
        message,
    };
    let text = text.trim_end_matches(['\n', '\r']);
    let bar = text
        .find('|')
        .ok_or_else(|| parse_err(text.len() + 1, "expected `|` before the tail category".into()))?;
    if let Some(extra) = text[bar + 1..].find('|') {
        return Err(parse_err(bar + extra + 2, "only one `|` is allowed".into()));
    }

    let resolve = |token: &str, offset: usize| -> Result<usize> {
        let lead = token.len() - token.trim_start().len();
        let column = offset + lead + 1;
        let name = token.trim();
        if name.is_empty() {
            return Err(parse_err(column, "empty category".into()));
        }
        if let Some(k) = instance.category_index(name) {
            return Ok(k);
        }
        match name.parse::<usize>() {
            Ok(k) if k < instance.num_categories() => Ok(k),
            Ok(k) => Err(parse_err(
                column,
                format!("category index {k} out of range (0..{})", instance.num_categories()),
            )),
            Err(_) => Err(parse_err(column, format!("unknown category `{name}`"))),
        }
    };

    let head = &text[..bar];
    let mut prefix = Vec::new();
    if !head.trim().is_empty() {
        let mut offset = 0;
        for token in head.split(',') {
            prefix.push(resolve(token, offset)?);
            offset += token.len() + 1;
        }
    }
    let tail = resolve(&text[bar + 1..], bar + 1)?;
    Ok(ExtendedPolicy::new(PolicyPrefix(prefix), tail))
}

/// Inverse of [`parse_policy`], using category names.
pub fn format_policy(instance: &Instance, policy: &ExtendedPolicy) -> String {
    format!(
        "{}|{}",
        policy.prefix.names(instance).join(","),
        instance.category_name(policy.tail_category)
    )
}

impl fmt::Display for PolicyPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    /// Horizon-`n` truncated sum, used as an independent oracle for the geometric tails.
    fn brute_sum(instance: &Instance, belief: &Belief, policy: &ExtendedPolicy, n: usize) -> f64 {
        let mut total = 0.0;
        for (m, w) in belief.as_slice().iter().enumerate() {
            let mut s = 1.0;
            for t in 0..n {
                s *= instance.pref(policy.action_at(t), m);
                total += w * s;
            }
        }
        total
    }

    #[test]
    fn fixed_values_example1() {
        let inst = fixtures::example1();
        let q = inst.prior_belief();
        // 0.5 * 0.79/0.21 + 0.5 * 0.81/0.19
        assert!(close(value_fixed(&inst, &q, 1).unwrap(), 4.012531, 1e-6));
        // 0.5 * 19 + 0.5 / 9
        assert!(close(value_fixed(&inst, &q, 0).unwrap(), 9.555556, 1e-6));
        let e2 = Belief::vertex(2, 1);
        assert!(close(value_fixed(&inst, &e2, 1).unwrap(), 0.81 / 0.19, 1e-12));
    }

    #[test]
    fn extended_values() {
        let inst = fixtures::example1();
        let q = inst.prior_belief();
        let fixed = value_fixed(&inst, &q, 0).unwrap();
        assert_eq!(value_extended(&inst, &q, &ExtendedPolicy::fixed(0)).unwrap(), fixed);

        let pol = ExtendedPolicy::new(PolicyPrefix::new(vec![0]), 0);
        let v = value_extended(&inst, &q, &pol).unwrap();
        assert!(close(v, fixed, 1e-12));
        assert!(close(v, brute_sum(&inst, &q, &pol, 2000), 1e-9));

        let prop = fixtures::prop1(10.0);
        let v = value_extended(&prop, &prop.prior_belief(), &ExtendedPolicy::fixed(0)).unwrap();
        assert!(close(v, 40.0, 1e-9));

        let mixed = ExtendedPolicy::new(PolicyPrefix::new(vec![1, 0, 1]), 0);
        let v = value_extended(&inst, &q, &mixed).unwrap();
        assert!(close(v, brute_sum(&inst, &q, &mixed, 2000), 1e-9));
    }

    #[test]
    fn finite_horizon_values() {
        let inst = fixtures::example1();
        let q = inst.prior_belief();
        let one = value_finite_horizon(&inst, &q, &PolicyPrefix::new(vec![1])).unwrap();
        assert!(close(one, inst.immediate_reward(&q, 1).unwrap(), 1e-15));

        let two = PolicyPrefix::new(vec![1, 1]);
        // 0.8 + 0.5 * 0.79^2 + 0.5 * 0.81^2
        assert!(close(value_finite_horizon(&inst, &q, &two).unwrap(), 1.4401, 1e-12));
        assert!(close(value_finite_horizon_walk(&inst, &q, &two).unwrap(), 1.4401, 1e-12));
        for tail in 0..2 {
            let ext = ExtendedPolicy::new(two.clone(), tail);
            assert!(value_finite_horizon(&inst, &q, &two).unwrap() <= value_extended(&inst, &q, &ext).unwrap());
        }
    }

    #[test]
    fn horizons() {
        assert_eq!(horizon_for_pmax(0.95, 0.01).unwrap(), 148);
        assert_eq!(horizon_for_pmax(0.5, 1.0).unwrap(), 1);
        assert_eq!(horizon_for_pmax(0.9, 1e6).unwrap(), 1);
        assert_eq!(horizon_for_pmax(0.0, 1e-3).unwrap(), 1);
        assert!(horizon_for_pmax(0.9, 0.0).is_err());
        assert!(horizon_for_pmax(0.9, -1.0).is_err());
        for &(p, eps) in &[(0.99, 1e-6), (0.5, 1e-3), (0.3, 0.2), (0.9, 1e-9)] {
            let h = horizon_for_pmax(p, eps).unwrap();
            assert!(p.powi(h as i32) * p / (1.0 - p) <= eps);
            if h > 1 {
                assert!(p.powi(h as i32 - 1) * p / (1.0 - p) > eps, "{p} {eps} not minimal");
            }
        }
    }

    #[test]
    fn bounds_example1() {
        let inst = fixtures::example1();
        let q = inst.prior_belief();
        // 0.5 * 19 + 0.5 * 0.81/0.19
        assert!(close(upper_bound(&inst, &q).unwrap(), 11.631579, 1e-6));
        let (v, k) = lower_bound(&inst, &q).unwrap();
        assert!(close(v, 9.555556, 1e-6));
        assert_eq!(k, 0);
        for m in 0..2 {
            let e = Belief::vertex(2, m);
            assert!(close(upper_bound(&inst, &e).unwrap(), lower_bound(&inst, &e).unwrap().0, 1e-12));
        }
    }

    #[test]
    fn identical_rows_collapse_bounds() {
        let inst = Instance::new(vec![0.4, 0.6], vec![vec![0.3, 0.7], vec![0.3, 0.7]]).unwrap();
        let q = inst.prior_belief();
        assert!(close(upper_bound(&inst, &q).unwrap(), lower_bound(&inst, &q).unwrap().0, 1e-12));
    }

    #[test]
    fn lower_bound_tie_goes_to_lowest_index() {
        let inst = fixtures::prop1(1.0);
        let (v, k) = lower_bound(&inst, &inst.prior_belief()).unwrap();
        assert!(close(v, 4.0, 1e-9));
        // both fixed policies are worth exactly 4; rounding must not decide
        assert_eq!(k, 0);
    }

    #[test]
    fn prefix_bounds_cases() {
        let inst = fixtures::example1();
        let q = inst.prior_belief();
        let empty = prefix_bounds(&inst, &q, &PolicyPrefix::empty()).unwrap();
        assert_eq!(empty.survival, 1.0);
        assert_eq!(empty.prefix_reward, 0.0);
        assert!(close(empty.lower, lower_bound(&inst, &q).unwrap().0, 1e-15));
        assert!(close(empty.upper, upper_bound(&inst, &q).unwrap(), 1e-15));

        let one = prefix_bounds(&inst, &q, &PolicyPrefix::new(vec![0])).unwrap();
        assert!(one.lower > 9.0 && one.lower <= one.upper);
        assert!(close(one.survival, 0.525, 1e-15));
        let attained = value_extended(
            &inst,
            &q,
            &ExtendedPolicy::new(PolicyPrefix::new(vec![0]), one.lower_tail),
        )
        .unwrap();
        assert!(close(one.lower, attained, 1e-10));

        let p = inst.p_max();
        for prefix in [vec![1], vec![0, 1, 0], vec![1, 1, 1, 1]] {
            let n = prefix.len() as i32;
            let b = prefix_bounds(&inst, &q, &PolicyPrefix::new(prefix)).unwrap();
            assert!(b.upper - b.lower <= p.powi(n) * p / (1.0 - p) + 1e-12);
        }
    }

    #[test]
    fn prefix_bounds_zero_likelihood() {
        let inst = fixtures::prop1(1.0);
        let e2 = Belief::vertex(2, 1);
        assert_eq!(
            prefix_bounds(&inst, &e2, &PolicyPrefix::new(vec![1, 0])),
            Err(Error::ZeroLikelihood { step: 1, category: 0 })
        );
    }

    #[test]
    fn policy_text_format() {
        let inst = fixtures::appendix(1).unwrap();
        let p = parse_policy(&inst, "k1,k2,k1|k1").unwrap();
        assert_eq!(p.prefix.as_slice(), &[0, 1, 0]);
        assert_eq!(p.tail_category, 0);
        assert_eq!(parse_policy(&inst, "|k3").unwrap(), ExtendedPolicy::fixed(2));
        assert_eq!(parse_policy(&inst, " 0, 2 | 1 ").unwrap().prefix.as_slice(), &[0, 2]);
        assert_eq!(format_policy(&inst, &p), "k1,k2,k1|k1");

        let err = |s: &str| match parse_policy(&inst, s) {
            Err(Error::Parse { column, .. }) => column,
            other => panic!("{s}: {other:?}"),
        };
        assert_eq!(err("k1,k9|k1"), 4);
        assert_eq!(err("k1,k2"), 6);
        assert_eq!(err("k1|k2|k3"), 6);
        assert_eq!(err("k1,,k2|k1"), 4);
        assert_eq!(err("k1|"), 4);
        assert_eq!(err("k1|7"), 4);
    }
}

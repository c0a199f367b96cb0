use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Belief, Instance};
use crate::solvers::solve_bb_from;
use crate::value::ExtendedPolicy;

use super::{condition_holds, myopic_threshold, visit_bound};

/// One round of a belief walk: the belief before acting and what happened next, assuming
/// the recommendation was liked.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkRecord {
    pub step: usize,
    pub belief: Belief,
    pub action: usize,
    /// Like probability of `action` under `belief`.
    pub reward: f64,
    /// Probability of liking every recommendation up to and including this one.
    pub survival: f64,
    /// l1 distance from `belief` to the terminal vertex, once that vertex is known.
    pub uncertainty: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkTrace {
    pub records: Vec<WalkRecord>,
    /// Belief after the last recorded action was liked.
    pub end: Belief,
}

impl WalkTrace {
    fn start(belief: &Belief) -> Self {
        WalkTrace {
            records: Vec::new(),
            end: belief.clone(),
        }
    }

    fn step(&mut self, instance: &Instance, action: usize) -> Result<()> {
        let step = self.records.len();
        let mut next = self.end.as_slice().to_vec();
        let reward = instance
            .update_raw(&mut next, action)
            .ok_or(Error::ZeroLikelihood { step, category: action })?;
        let survival = self.records.last().map_or(1.0, |r| r.survival) * reward;
        let belief = std::mem::replace(&mut self.end, Belief::from_normalized_unchecked(next));
        self.records.push(WalkRecord {
            step,
            belief,
            action,
            reward,
            survival,
            uncertainty: None,
        });
        Ok(())
    }

    fn set_terminal(&mut self, m: usize) {
        for r in &mut self.records {
            r.uncertainty = Some(r.belief.distance_to_vertex(m));
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn actions(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.action).collect()
    }

    /// Tabular export with one row per step; `metadata` is appended as `# key=value` lines.
    pub fn to_csv(&self, instance: &Instance, metadata: &[(&str, String)]) -> String {
        let mut out = String::from("step,action,reward,survival,uncertainty");
        for m in 0..instance.num_types() {
            let _ = write!(out, ",belief_{m}");
        }
        out.push('\n');
        for r in &self.records {
            let _ = write!(
                out,
                "{},{},{},{},",
                r.step,
                instance.category_name(r.action),
                r.reward,
                r.survival
            );
            if let Some(u) = r.uncertainty {
                let _ = write!(out, "{u}");
            }
            for w in r.belief.as_slice() {
                let _ = write!(out, ",{w}");
            }
            out.push('\n');
        }
        for (key, value) in metadata {
            let _ = writeln!(out, "# {key}={value}");
        }
        out
    }
}

/// Result of following the optimal policy until its action provably stops changing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub converged: bool,
    /// Index of the first walk belief that is concentrated and satisfies the convergence
    /// condition.
    pub convergence_time: Option<usize>,
    pub terminal_type: Option<usize>,
    pub terminal_category: Option<usize>,
    pub walk: WalkTrace,
    /// Beliefs in the walk that are `c^2/4`-unconcentrated.
    pub visited_unconcentrated: u64,
    /// Bound on that count; absent when the instance is not well separated.
    pub theoretical_visit_bound: Option<u64>,
    pub separator: f64,
}

impl ConvergenceReport {
    pub fn metadata(&self, instance: &Instance) -> Vec<(&'static str, String)> {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "none".into());
        vec![
            ("converged", self.converged.to_string()),
            ("convergence_time", opt(self.convergence_time.map(|t| t.to_string()))),
            (
                "terminal_type",
                opt(self.terminal_type.map(|m| instance.type_names()[m].clone())),
            ),
            (
                "terminal_category",
                opt(self.terminal_category.map(|k| instance.category_name(k).to_string())),
            ),
            ("visited_unconcentrated", self.visited_unconcentrated.to_string()),
            (
                "theoretical_visit_bound",
                opt(self.theoretical_visit_bound.map(|h| h.to_string())),
            ),
            ("separator", self.separator.to_string()),
        ]
    }
}

fn memo_key(b: &[f64]) -> Vec<i64> {
    b.iter().map(|w| (w * 1e12).round() as i64).collect()
}

/// Walks along the optimal policy from the prior, assuming every recommendation is liked.
///
/// Each step re-solves with branch and bound at the current belief and plays its first
/// action. The walk stops with convergence at the first belief that is `(c^2/4, m)`
/// concentrated and satisfies the convergence condition for `m`; that record's action is
/// the favorite category of `m`, which is optimal from there on. Otherwise it stops after
/// `max_steps` records.
pub fn optimal_walk(instance: &Instance, epsilon: f64, max_steps: usize) -> Result<ConvergenceReport> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let c = instance.separator().separator;
    let delta = myopic_threshold(c);
    let mut walk = WalkTrace::start(&instance.prior_belief());
    let mut memo: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut terminal = None;
    let mut unconcentrated = 0u64;

    while walk.len() < max_steps {
        let b = walk.end.clone();
        if c > 0.0 && b.is_unconcentrated(delta) {
            unconcentrated += 1;
        }
        if c > 0.0 {
            let concentrated = (0..instance.num_types()).find(|&m| b.is_concentrated_on(m, delta));
            if let Some(m) = concentrated.filter(|&m| condition_holds(instance, b.as_slice(), m)) {
                terminal = Some((walk.len(), m));
                walk.step(instance, instance.favorite_category(m))?;
                break;
            }
        }
        let key = memo_key(b.as_slice());
        let action = match memo.get(&key) {
            Some(&k) => k,
            None => {
                let res = solve_bb_from(instance, &b, epsilon)?;
                let k = res.prefix.first().unwrap_or(res.tail_category);
                memo.insert(key, k);
                k
            }
        };
        walk.step(instance, action)?;
    }

    if let Some((_, m)) = terminal {
        walk.set_terminal(m);
    }
    Ok(ConvergenceReport {
        converged: terminal.is_some(),
        convergence_time: terminal.map(|(t, _)| t),
        terminal_type: terminal.map(|(_, m)| m),
        terminal_category: terminal.map(|(_, m)| instance.favorite_category(m)),
        walk,
        visited_unconcentrated: unconcentrated,
        theoretical_visit_bound: if c > 0.0 { visit_bound(c, delta).ok() } else { None },
        separator: c,
    })
}

/// Walk of a fixed policy for `steps` rounds; uncertainty is measured to the vertex of
/// the most likely type at the end of the walk.
pub fn trace_policy(instance: &Instance, belief: &Belief, policy: &ExtendedPolicy, steps: usize) -> Result<WalkTrace> {
    instance.check_belief(belief)?;
    policy.validate(instance)?;
    let mut walk = WalkTrace::start(belief);
    for t in 0..steps {
        walk.step(instance, policy.action_at(t))?;
    }
    let m = walk.end.mode();
    walk.set_terminal(m);
    Ok(walk)
}

/// `(step, distance to the terminal vertex)` along a converged walk.
pub fn uncertainty_curve(report: &ConvergenceReport) -> Result<Vec<(usize, f64)>> {
    let m = report.terminal_type.ok_or(Error::NotConverged)?;
    Ok(report
        .walk
        .records
        .iter()
        .map(|r| (r.step, r.belief.distance_to_vertex(m)))
        .collect())
}

/// Uncertainty curve of a converged walk, continued with the terminal category until it
/// has `length` entries (or cut to `length`).
pub fn extend_walk(instance: &Instance, report: &ConvergenceReport, length: usize) -> Result<Vec<f64>> {
    let (m, k) = match (report.terminal_type, report.terminal_category) {
        (Some(m), Some(k)) => (m, k),
        _ => return Err(Error::NotConverged),
    };
    let mut curve: Vec<f64> = uncertainty_curve(report)?.into_iter().map(|(_, u)| u).collect();
    curve.truncate(length);
    let mut b = report.walk.end.as_slice().to_vec();
    while curve.len() < length {
        curve.push(Belief::from_normalized_unchecked(b.clone()).distance_to_vertex(m));
        let step = curve.len();
        instance
            .update_raw(&mut b, k)
            .ok_or(Error::ZeroLikelihood { step, category: k })?;
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn example1_converges_on_m1() {
        let inst = fixtures::example1();
        let rep = optimal_walk(&inst, 1e-6, 100).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.terminal_type, Some(0));
        assert_eq!(rep.terminal_category, Some(0));
        // odds grow by 9.5 per like; b(m1) first exceeds 1 - 1e-4 after five likes
        assert_eq!(rep.convergence_time, Some(5));
        assert!(rep.walk.actions().iter().all(|&k| k == 0));
        let curve = uncertainty_curve(&rep).unwrap();
        for (t, u) in &curve {
            let odds = 9.5f64.powi(*t as i32);
            assert!((u - 2.0 / (1.0 + odds)).abs() < 1e-12);
        }
        assert!(curve.windows(2).all(|w| w[1].1 < w[0].1));
        assert!(rep.visited_unconcentrated <= rep.theoretical_visit_bound.unwrap());
    }

    #[test]
    fn survival_is_the_running_product() {
        let inst = fixtures::appendix(2).unwrap();
        let rep = optimal_walk(&inst, 1e-4, 30).unwrap();
        let mut s = 1.0;
        for r in &rep.walk.records {
            s *= r.reward;
            assert!((r.survival - s).abs() < 1e-14);
        }
    }

    #[test]
    fn not_converged_without_uncertainty() {
        let inst = fixtures::example1();
        let rep = optimal_walk(&inst, 1e-6, 3).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.walk.len(), 3);
        assert!(matches!(uncertainty_curve(&rep), Err(Error::NotConverged)));
        assert!(rep.walk.records.iter().all(|r| r.uncertainty.is_none()));
    }

    #[test]
    fn unseparated_instance_never_converges() {
        let inst = Instance::new(vec![0.5, 0.5], vec![vec![0.5, 0.5], vec![0.2, 0.7]]).unwrap();
        let rep = optimal_walk(&inst, 1e-4, 20).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.theoretical_visit_bound, None);
    }

    #[test]
    fn extended_curve_has_requested_length() {
        let inst = fixtures::example1();
        let rep = optimal_walk(&inst, 1e-6, 100).unwrap();
        let curve = extend_walk(&inst, &rep, 12).unwrap();
        assert_eq!(curve.len(), 12);
        for (t, u) in curve.iter().enumerate() {
            assert!((u - 2.0 / (1.0 + 9.5f64.powi(t as i32))).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_layout() {
        let inst = fixtures::example1();
        let rep = optimal_walk(&inst, 1e-6, 100).unwrap();
        let csv = rep.walk.to_csv(&inst, &rep.metadata(&inst));
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("step,action,reward,survival,uncertainty,belief_0,belief_1"));
        assert!(lines.next().unwrap().starts_with("0,k1,"));
        assert!(csv.contains("# converged=true\n"));
        assert!(csv.contains("# terminal_type=m1\n"));
    }

    #[test]
    fn myopic_trace_on_appendix1_heads_to_m1() {
        let inst = fixtures::appendix(1).unwrap();
        let prefix = crate::solvers::myopic_prefix(&inst, &inst.prior_belief(), 30).unwrap();
        let tail = prefix.as_slice()[29];
        let walk = trace_policy(&inst, &inst.prior_belief(), &ExtendedPolicy::new(prefix, tail), 30).unwrap();
        assert_eq!(walk.end.mode(), 0);
    }
}

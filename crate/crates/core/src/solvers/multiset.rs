use crate::error::{Error, Result};
use crate::model::Instance;
use crate::value::{beats, PolicyPrefix};

use super::compositions::{count, CompositionIndex};
use super::MAX_ENUMERATION;

/// Finite-horizon optimum from the prior by backward induction over multisets of played
/// categories.
///
/// Bayesian updates commute, so the posterior after `s` likes depends only on how often
/// each category was played. States at depth `s` are the multisets of size `s`, and
/// `V(mu) = max_k p_k(b_mu) (1 + V(mu + e_k))` with `V = 0` at depth `horizon`.
pub fn solve_multiset_dp(instance: &Instance, horizon: usize) -> Result<(f64, PolicyPrefix)> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let (nk, nm) = (instance.num_categories(), instance.num_types());
    let states: u128 = (0..=horizon).fold(0u128, |acc, s| acc.saturating_add(count(s, nk)));
    if states > MAX_ENUMERATION {
        return Err(Error::BudgetExceeded {
            what: "multiset states",
            required: states,
            limit: MAX_ENUMERATION,
        });
    }

    let index = CompositionIndex::new(nk, horizon);
    let log_prior: Vec<f64> = instance.prior().iter().map(|q| q.ln()).collect();
    let log_pref: Vec<f64> = instance.rows().flatten().map(|p| p.ln()).collect();

    // decisions[s][rank] = best category at the multiset of size s
    let mut decisions: Vec<Vec<u32>> = vec![Vec::new(); horizon];
    let mut next_values = vec![0.0; index.count(horizon)];
    let mut belief = vec![0.0; nm];
    let mut child = vec![0u32; nk];

    for depth in (0..horizon).rev() {
        let mut values = vec![0.0; index.count(depth)];
        let mut choice = vec![0u32; values.len()];
        let mut slot = 0;
        index.for_each(depth, |counts| {
            if multiset_belief(&log_prior, &log_pref, nm, counts, &mut belief) {
                child.copy_from_slice(counts);
                let mut best: Option<(f64, usize)> = None;
                for k in 0..nk {
                    let like = instance.reward_raw(&belief, k);
                    child[k] += 1;
                    let v = like * (1.0 + next_values[index.rank(&child)]);
                    child[k] -= 1;
                    if best.map_or(true, |(bv, _)| beats(v, bv)) {
                        best = Some((v, k));
                    }
                }
                let (v, k) = best.expect("at least one category");
                values[slot] = v;
                choice[slot] = k as u32;
            }
            // unreachable multisets (zero probability of getting here) keep value 0
            slot += 1;
        });
        decisions[depth] = choice;
        next_values = values;
    }

    let mut counts = vec![0u32; nk];
    let mut prefix = Vec::with_capacity(horizon);
    for choice in &decisions {
        let k = choice[index.rank(&counts)] as usize;
        prefix.push(k);
        counts[k] += 1;
    }
    Ok((next_values[0], PolicyPrefix::new(prefix)))
}

/// Posterior after playing each category `counts[k]` times, computed in log space.
/// Returns false when the multiset has zero probability.
fn multiset_belief(log_prior: &[f64], log_pref: &[f64], nm: usize, counts: &[u32], out: &mut [f64]) -> bool {
    for m in 0..nm {
        let mut lw = log_prior[m];
        for (k, &c) in counts.iter().enumerate() {
            if c > 0 {
                lw += c as f64 * log_pref[k * nm + m];
            }
        }
        out[m] = lw;
    }
    let top = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return false;
    }
    let mut total = 0.0;
    for w in out.iter_mut() {
        *w = (*w - top).exp();
        total += *w;
    }
    out.iter_mut().for_each(|w| *w /= total);
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::solvers::solve_brute_force;
    use crate::value::value_finite_horizon;

    #[test]
    fn two_categories_depth_three_has_four_multisets() {
        let idx = CompositionIndex::new(2, 3);
        assert_eq!(idx.count(3), 4);
    }

    #[test]
    fn matches_brute_force_on_fixtures() {
        let mut instances = vec![fixtures::example1(), fixtures::prop1(2.0), fixtures::prop1(0.5)];
        instances.extend((1..=4).map(|i| fixtures::appendix(i).unwrap()));
        for inst in &instances {
            let q = inst.prior_belief();
            for h in 1..=7 {
                let (dp, prefix) = solve_multiset_dp(inst, h).unwrap();
                let (bf, _) = solve_brute_force(inst, &q, h).unwrap();
                assert!((dp - bf).abs() < 1e-9, "h={h}: {dp} vs {bf}");
                let achieved = value_finite_horizon(inst, &q, &prefix).unwrap();
                assert!((achieved - dp).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn example1_horizon8_matches_brute_force() {
        let inst = fixtures::example1();
        let (dp, _) = solve_multiset_dp(&inst, 8).unwrap();
        let (bf, _) = solve_brute_force(&inst, &inst.prior_belief(), 8).unwrap();
        assert!((dp - bf).abs() < 1e-9);
    }

    #[test]
    fn zero_probability_multisets_are_harmless() {
        // playing k1 rules out the second type entirely
        let inst = fixtures::prop1(1.0);
        let (dp, _) = solve_multiset_dp(&inst, 6).unwrap();
        let (bf, _) = solve_brute_force(&inst, &inst.prior_belief(), 6).unwrap();
        assert!((dp - bf).abs() < 1e-9);
    }

    #[test]
    fn budget_guard() {
        let inst = crate::model::Instance::new(vec![1.0], vec![vec![0.5]; 10]).unwrap();
        assert!(matches!(
            solve_multiset_dp(&inst, 60),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}

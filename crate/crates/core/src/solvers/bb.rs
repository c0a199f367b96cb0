use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::model::{Belief, Instance};
use crate::value::{PolicyPrefix, RatioTable};

use super::{SolveResult, SolveStats};

/// Order in which open prefixes are expanded.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum QueueOrder {
    /// First in, first out: breadth-first by prefix length.
    #[default]
    Fifo,
    /// Largest upper bound first.
    BestFirst,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BbOptions {
    pub order: QueueOrder,
    /// Keep every incumbent value in [`SolveResult::history`].
    pub record_history: bool,
}

/// Branch and bound over policy prefixes from the prior, FIFO order.
pub fn solve_bb(instance: &Instance, epsilon: f64) -> Result<SolveResult> {
    solve_bb_with(instance, &instance.prior_belief(), epsilon, &BbOptions::default())
}

/// Same as [`solve_bb`] from an arbitrary starting belief.
pub fn solve_bb_from(instance: &Instance, belief: &Belief, epsilon: f64) -> Result<SolveResult> {
    solve_bb_with(instance, belief, epsilon, &BbOptions::default())
}

struct Node {
    parent: u32,
    action: u32,
    depth: u32,
}

struct Open {
    node: u32,
    belief: Vec<f64>,
    survival: f64,
    reward: f64,
    upper: f64,
    seq: u64,
}

impl PartialEq for Open {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Open {}
impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Open {
    // max-heap on the upper bound, earlier insertion first among equals
    fn cmp(&self, other: &Self) -> Ordering {
        self.upper
            .total_cmp(&other.upper)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

enum Frontier {
    Fifo(VecDeque<Open>),
    Best(BinaryHeap<Open>),
}

impl Frontier {
    fn push(&mut self, item: Open) {
        match self {
            Frontier::Fifo(q) => q.push_back(item),
            Frontier::Best(h) => h.push(item),
        }
    }

    fn pop(&mut self) -> Option<Open> {
        match self {
            Frontier::Fifo(q) => q.pop_front(),
            Frontier::Best(h) => h.pop(),
        }
    }
}

/// Branch and bound with explicit options.
///
/// The incumbent starts as the best fixed category at `belief`. A popped prefix replaces
/// the incumbent when its lower bound (prefix likes plus the best fixed tail) is strictly
/// larger; a child prefix is queued only when its upper bound exceeds the incumbent by
/// more than `epsilon`. The returned value is attained by the returned prefix and tail.
pub fn solve_bb_with(instance: &Instance, belief: &Belief, epsilon: f64, options: &BbOptions) -> Result<SolveResult> {
    instance.check_belief(belief)?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let start = Instant::now();
    let table = RatioTable::new(instance);
    let nk = instance.num_categories();

    let (root_lower, root_tail) = table.lower(belief.as_slice());
    let mut best_value = root_lower;
    let mut best_node: u32 = 0;
    let mut best_tail = root_tail;
    let mut history = Vec::new();
    if options.record_history {
        history.push(best_value);
    }

    let mut nodes = vec![Node {
        parent: u32::MAX,
        action: 0,
        depth: 0,
    }];
    let mut stats = SolveStats::default();
    let mut seq = 0u64;
    let mut frontier = match options.order {
        QueueOrder::Fifo => Frontier::Fifo(VecDeque::new()),
        QueueOrder::BestFirst => Frontier::Best(BinaryHeap::new()),
    };
    frontier.push(Open {
        node: 0,
        belief: belief.as_slice().to_vec(),
        survival: 1.0,
        reward: 0.0,
        upper: table.upper(belief.as_slice()),
        seq,
    });

    while let Some(open) = frontier.pop() {
        stats.nodes_expanded += 1;
        let (cont, tail) = table.lower(&open.belief);
        let lower = open.reward + open.survival * cont;
        if best_value < lower {
            best_value = lower;
            best_node = open.node;
            best_tail = tail;
            if options.record_history {
                history.push(best_value);
            }
        }
        let depth = nodes[open.node as usize].depth;
        for k in 0..nk {
            let mut child = open.belief.clone();
            let Some(p) = instance.update_raw(&mut child, k) else {
                // the session ends surely; no continuation can add value
                stats.nodes_pruned += 1;
                continue;
            };
            let survival = open.survival * p;
            let reward = open.reward + survival;
            let upper = reward + survival * table.upper(&child);
            if upper - best_value > epsilon {
                nodes.push(Node {
                    parent: open.node,
                    action: k as u32,
                    depth: depth + 1,
                });
                stats.max_depth = stats.max_depth.max(depth as usize + 1);
                seq += 1;
                frontier.push(Open {
                    node: (nodes.len() - 1) as u32,
                    belief: child,
                    survival,
                    reward,
                    upper,
                    seq,
                });
            } else {
                stats.nodes_pruned += 1;
            }
        }
    }

    let mut prefix = Vec::with_capacity(nodes[best_node as usize].depth as usize);
    let mut at = best_node;
    while at != 0 {
        let node = &nodes[at as usize];
        prefix.push(node.action as usize);
        at = node.parent;
    }
    prefix.reverse();
    stats.elapsed = start.elapsed();
    Ok(SolveResult {
        value: best_value,
        prefix: PolicyPrefix::new(prefix),
        tail_category: best_tail,
        epsilon,
        stats,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::solvers::solve_multiset_dp;
    use crate::value::{horizon_for_epsilon, prefix_bounds, value_extended};

    #[test]
    fn example1_value() {
        let inst = fixtures::example1();
        let res = solve_bb(&inst, 1e-6).unwrap();
        assert!((res.value - 9.5556).abs() < 1e-4, "{}", res.value);
        let attained = value_extended(&inst, &inst.prior_belief(), &res.policy()).unwrap();
        assert!((attained - res.value).abs() < 1e-10);
    }

    #[test]
    fn prop1_value_is_four_d() {
        for d in [1.0, 10.0, 100.0] {
            let inst = fixtures::prop1(d);
            let res = solve_bb(&inst, 1e-6).unwrap();
            assert!((res.value - 4.0 * d).abs() < 1e-6, "d={d}: {}", res.value);
        }
    }

    #[test]
    fn value_matches_prefix_lower_bound() {
        for i in 1..=4 {
            let inst = fixtures::appendix(i).unwrap();
            let res = solve_bb(&inst, 1e-3).unwrap();
            let q = inst.prior_belief();
            let b = prefix_bounds(&inst, &q, &res.prefix).unwrap();
            assert!((b.lower - res.value).abs() < 1e-10);
            assert_eq!(b.lower_tail, res.tail_category);
            assert!(res.stats.max_depth <= horizon_for_epsilon(&inst, 1e-3).unwrap());
        }
    }

    #[test]
    fn within_epsilon_of_the_truncated_optimum() {
        let inst = fixtures::appendix(2).unwrap();
        let eps = 0.05;
        let h = horizon_for_epsilon(&inst, eps).unwrap();
        let (dp, _) = solve_multiset_dp(&inst, h).unwrap();
        let res = solve_bb(&inst, eps).unwrap();
        assert!(res.value <= dp + eps + 1e-9 && res.value >= dp - eps - 1e-9, "{} vs {dp}", res.value);
    }

    #[test]
    fn history_is_non_decreasing() {
        let inst = fixtures::appendix(3).unwrap();
        let opts = BbOptions {
            record_history: true,
            ..Default::default()
        };
        let res = solve_bb_with(&inst, &inst.prior_belief(), 1e-4, &opts).unwrap();
        assert!(!res.history.is_empty());
        assert!(res.history.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*res.history.last().unwrap(), res.value);
    }

    #[test]
    fn best_first_reaches_the_same_guarantee() {
        let inst = fixtures::example1();
        let fifo = solve_bb(&inst, 1e-6).unwrap();
        let opts = BbOptions {
            order: QueueOrder::BestFirst,
            ..Default::default()
        };
        let best = solve_bb_with(&inst, &inst.prior_belief(), 1e-6, &opts).unwrap();
        assert!((fifo.value - best.value).abs() <= 1e-6);
    }

    #[test]
    fn rejects_bad_epsilon() {
        let inst = fixtures::example1();
        assert!(solve_bb(&inst, 0.0).is_err());
        assert!(solve_bb(&inst, f64::NAN).is_err());
    }
}

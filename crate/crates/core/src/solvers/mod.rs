//! Exact and approximate planners.

mod bb;
mod brute;
mod compositions;
mod grid;
mod heuristics;
mod multiset;

use std::time::Duration;

use serde::{Serialize, Serializer};

use crate::model::Instance;
use crate::value::PolicyPrefix;

pub use bb::{solve_bb, solve_bb_from, solve_bb_with, BbOptions, QueueOrder};
pub use brute::solve_brute_force;
pub use grid::{grid_error_bound, grid_resolution_for_epsilon, projection_error, solve_grid_dp, GridDPConfig};
pub use heuristics::{best_fixed_prefix, myopic_prefix};
pub use multiset::solve_multiset_dp;

/// Upper limit on enumerated states/leaves for the exhaustive solvers.
pub const MAX_ENUMERATION: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SolveStats {
    pub nodes_expanded: u64,
    pub nodes_pruned: u64,
    pub max_depth: usize,
    #[serde(rename = "millis", serialize_with = "as_millis")]
    pub elapsed: Duration,
}

fn as_millis<S: Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

/// Outcome of the branch-and-bound search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    /// Value attained by `prefix` followed by `tail_category` forever; within `epsilon` of optimal.
    pub value: f64,
    pub prefix: PolicyPrefix,
    pub tail_category: usize,
    pub epsilon: f64,
    pub stats: SolveStats,
    /// Incumbent values in the order they were adopted (empty unless requested).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub history: Vec<f64>,
}

impl SolveResult {
    pub fn policy(&self) -> crate::value::ExtendedPolicy {
        crate::value::ExtendedPolicy::new(self.prefix.clone(), self.tail_category)
    }

    /// JSON object with category names instead of indices.
    pub fn to_json(&self, instance: &Instance) -> serde_json::Value {
        serde_json::json!({
            "value": self.value,
            "epsilon": self.epsilon,
            "prefix": self.prefix.names(instance),
            "tail": instance.category_name(self.tail_category),
            "stats": self.stats,
        })
    }
}

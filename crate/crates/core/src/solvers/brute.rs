use crate::error::{Error, Result};
use crate::model::{Belief, Instance};
use crate::value::{beats, PolicyPrefix};

use super::MAX_ENUMERATION;

/// Exhaustive search over all `|K|^horizon` sequences for the best truncated value.
///
/// Values are accumulated per type (unnormalized survival weights), independent of the
/// belief-walk arithmetic the other solvers use. Among maximizers the lexicographically
/// smallest sequence is returned.
pub fn solve_brute_force(instance: &Instance, belief: &Belief, horizon: usize) -> Result<(f64, PolicyPrefix)> {
    instance.check_belief(belief)?;
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let nk = instance.num_categories();
    let leaves = (nk as u128).checked_pow(horizon as u32).unwrap_or(u128::MAX);
    if leaves > MAX_ENUMERATION {
        return Err(Error::BudgetExceeded {
            what: "brute-force leaf evaluations",
            required: leaves,
            limit: MAX_ENUMERATION,
        });
    }

    let nm = instance.num_types();
    let mut search = Search {
        instance,
        horizon,
        weights: vec![0.0; (horizon + 1) * nm],
        path: Vec::with_capacity(horizon),
        best: None,
    };
    search.weights[..nm].copy_from_slice(belief.as_slice());
    search.descend(0, 0.0);
    let (value, prefix) = search.best.expect("at least one leaf");
    Ok((value, PolicyPrefix::new(prefix)))
}

struct Search<'a> {
    instance: &'a Instance,
    horizon: usize,
    // one row of per-type survival weights per depth
    weights: Vec<f64>,
    path: Vec<usize>,
    best: Option<(f64, Vec<usize>)>,
}

impl Search<'_> {
    fn descend(&mut self, depth: usize, acc: f64) {
        if depth == self.horizon {
            let improved = match &self.best {
                None => true,
                Some((v, _)) => beats(acc, *v),
            };
            if improved {
                self.best = Some((acc, self.path.clone()));
            }
            return;
        }
        let nm = self.instance.num_types();
        for k in 0..self.instance.num_categories() {
            let (head, tail) = self.weights.split_at_mut((depth + 1) * nm);
            let parent = &head[depth * nm..];
            let child = &mut tail[..nm];
            let mut alive = 0.0;
            for ((c, w), p) in child.iter_mut().zip(parent).zip(self.instance.row(k)) {
                *c = w * p;
                alive += *c;
            }
            self.path.push(k);
            self.descend(depth + 1, acc + alive);
            self.path.pop();
        }
    }
}

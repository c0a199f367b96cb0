use crate::error::{Error, Result};
use crate::model::{Belief, Instance};
use crate::value::{beats, PolicyPrefix, RatioTable};

fn check_steps(steps: usize) -> Result<()> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    Ok(())
}

/// Greedy prefix: at each step the category with the highest immediate like probability
/// under the current belief (lowest index on ties), then update as if it was liked.
pub fn myopic_prefix(instance: &Instance, belief: &Belief, steps: usize) -> Result<PolicyPrefix> {
    instance.check_belief(belief)?;
    check_steps(steps)?;
    let mut b = belief.as_slice().to_vec();
    let mut prefix = PolicyPrefix::empty();
    for step in 0..steps {
        let mut best = (instance.reward_raw(&b, 0), 0);
        for k in 1..instance.num_categories() {
            let r = instance.reward_raw(&b, k);
            if beats(r, best.0) {
                best = (r, k);
            }
        }
        let k = best.1;
        prefix.push(k);
        if step + 1 < steps {
            instance
                .update_raw(&mut b, k)
                .ok_or(Error::ZeroLikelihood { step, category: k })?;
        }
    }
    Ok(prefix)
}

/// `steps` copies of the best fixed category at `belief`.
pub fn best_fixed_prefix(instance: &Instance, belief: &Belief, steps: usize) -> Result<PolicyPrefix> {
    instance.check_belief(belief)?;
    check_steps(steps)?;
    let (_, k) = RatioTable::new(instance).lower(belief.as_slice());
    Ok(PolicyPrefix::repeat(k, steps))
}

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Instance;
use crate::value::{beats, PolicyPrefix};

use super::compositions::{count, CompositionIndex};
use super::MAX_ENUMERATION;

/// Settings for value iteration over a regular simplex lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridDPConfig {
    /// Target spacing; the lattice uses the largest `1/n <= resolution` (with `n >= 2`).
    pub resolution: f64,
    pub horizon: usize,
}

impl GridDPConfig {
    pub fn new(resolution: f64, horizon: usize) -> Result<Self> {
        let cfg = GridDPConfig { resolution, horizon };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "grid resolution must be positive, got {}",
                self.resolution
            )));
        }
        if self.horizon == 0 {
            return Err(Error::InvalidArgument("horizon must be at least 1".into()));
        }
        Ok(())
    }

    /// Lattice denominator `n`: points are `x = c / n` with integer `c` summing to `n`.
    /// Resolutions of 1 or more still get the midpoints (`n = 2`).
    pub fn divisions(&self) -> usize {
        let n = (1.0 / self.resolution.min(1.0) - 1e-9).ceil();
        (n as usize).max(2)
    }
}

/// Spacing used when the grid is chosen from an accuracy target: `epsilon (1 - p_max)^2`.
pub fn grid_resolution_for_epsilon(instance: &Instance, epsilon: f64) -> f64 {
    let slack = 1.0 - instance.p_max();
    (epsilon * slack * slack).min(1.0)
}

/// Lattice nearest (in l1) to `x`: floors plus one extra unit for the coordinates with the
/// largest fractional parts. Equal fractional parts favour later coordinates, which gives
/// the lexicographically smallest nearest point.
pub(crate) fn project(x: &[f64], divisions: usize, out: &mut [u32], order: &mut Vec<usize>) {
    let n = divisions as f64;
    let mut floor_sum = 0usize;
    order.clear();
    for (i, xi) in x.iter().enumerate() {
        let y = (xi * n).max(0.0);
        let f = y.floor();
        out[i] = f as u32;
        floor_sum += f as usize;
        order.push(i);
    }
    let deficit = divisions.saturating_sub(floor_sum);
    let frac = |i: usize| x[i] * n - out[i] as f64;
    order.sort_by(|&a, &b| frac(b).total_cmp(&frac(a)).then(b.cmp(&a)));
    for &i in order.iter().take(deficit) {
        out[i] += 1;
    }
    // rounding can overshoot by one unit when the floors already reach n
    let mut total: usize = out.iter().map(|&c| c as usize).sum();
    let mut j = order.len();
    while total > divisions && j > 0 {
        j -= 1;
        let i = order[j];
        if out[i] > 0 {
            out[i] -= 1;
            total -= 1;
        }
    }
}

/// Worst-case l1 distance between a point of the simplex and its projection onto the lattice.
pub fn projection_error(num_types: usize, divisions: usize) -> f64 {
    let (lo, hi) = (num_types / 2, num_types.div_ceil(2));
    2.0 * (lo * hi) as f64 / (num_types as f64 * divisions as f64)
}

/// Bound on the value error the projections can introduce over the horizon, from the
/// Lipschitz constant `(1 - c) / c` of the optimal value.
pub fn grid_error_bound(instance: &Instance, config: &GridDPConfig) -> Result<f64> {
    config.validate()?;
    let c = instance.separator().separator;
    if c <= 0.0 {
        return Err(Error::NotWellSeparated);
    }
    let lipschitz = (1.0 - c) / c;
    let e = projection_error(instance.num_types(), config.divisions());
    let p = instance.p_max();
    let discount: f64 = (0..config.horizon).map(|t| p.powi(t as i32 + 1)).sum();
    Ok(lipschitz * e * discount)
}

/// Finite-horizon value iteration on a simplex lattice.
///
/// `V_s(g) = max_k p_k(g) (1 + V_{s-1}(proj(tau(g, k))))` with `V_0 = 0`. Returns `V_H` at
/// the projected prior and the prefix obtained by following the lattice decisions along
/// the exact all-likes walk from the prior.
pub fn solve_grid_dp(instance: &Instance, config: &GridDPConfig) -> Result<(f64, PolicyPrefix)> {
    config.validate()?;
    let (nk, nm) = (instance.num_categories(), instance.num_types());
    let n = config.divisions();
    let points = count(n, nm);
    if points > MAX_ENUMERATION {
        return Err(Error::BudgetExceeded {
            what: "grid points",
            required: points,
            limit: MAX_ENUMERATION,
        });
    }
    let transitions = points * nk as u128;
    if transitions > 5 * MAX_ENUMERATION {
        return Err(Error::BudgetExceeded {
            what: "grid transitions",
            required: transitions,
            limit: 5 * MAX_ENUMERATION,
        });
    }
    let points = points as usize;
    let index = CompositionIndex::new(nm, n);

    // likes[g * nk + k] and successor[g * nk + k]
    let mut likes = vec![0.0; points * nk];
    let mut successor = vec![0u32; points * nk];
    let mut x = vec![0.0; nm];
    let mut posterior = vec![0.0; nm];
    let mut lattice = vec![0u32; nm];
    let mut order = Vec::with_capacity(nm);
    let mut g = 0;
    index.for_each(n, |counts| {
        for (xi, &c) in x.iter_mut().zip(counts) {
            *xi = c as f64 / n as f64;
        }
        for k in 0..nk {
            posterior.copy_from_slice(&x);
            if let Some(p) = instance.update_raw(&mut posterior, k) {
                likes[g * nk + k] = p;
                project(&posterior, n, &mut lattice, &mut order);
                successor[g * nk + k] = index.rank(&lattice) as u32;
            }
        }
        g += 1;
    });

    let mut values = vec![0.0; points];
    let mut decisions: Vec<Vec<u32>> = Vec::with_capacity(config.horizon);
    for _ in 0..config.horizon {
        let mut next = vec![0.0; points];
        let mut choice = vec![0u32; points];
        for g in 0..points {
            let mut best: Option<(f64, usize)> = None;
            for k in 0..nk {
                let p = likes[g * nk + k];
                let v = if p > 0.0 {
                    p * (1.0 + values[successor[g * nk + k] as usize])
                } else {
                    0.0
                };
                if best.map_or(true, |(bv, _)| beats(v, bv)) {
                    best = Some((v, k));
                }
            }
            let (v, k) = best.expect("at least one category");
            next[g] = v;
            choice[g] = k as u32;
        }
        values = next;
        decisions.push(choice);
    }

    project(instance.prior(), n, &mut lattice, &mut order);
    let value = values[index.rank(&lattice)];

    let mut belief = instance.prior().to_vec();
    let mut prefix = Vec::with_capacity(config.horizon);
    for (step, remaining) in (1..=config.horizon).rev().enumerate() {
        project(&belief, n, &mut lattice, &mut order);
        let k = decisions[remaining - 1][index.rank(&lattice)] as usize;
        prefix.push(k);
        if step + 1 < config.horizon {
            instance
                .update_raw(&mut belief, k)
                .ok_or(Error::ZeroLikelihood { step, category: k })?;
        }
    }
    Ok((value, PolicyPrefix::new(prefix)))
}

//! Convergence analysis for well-separated instances.
//!
//! Everything here is parameterized by the separator `c` of the instance; most bounds are
//! only meaningful when `c > 0`.

mod fit;
mod svg;
mod walk;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Belief, Instance};

pub use fit::{average_curves, fit_exponential, ExponentialFit};
pub use svg::ternary_svg;
pub use walk::{
    extend_walk, optimal_walk, trace_policy, uncertainty_curve, ConvergenceReport, WalkRecord, WalkTrace,
};

/// Threshold under which a type is considered outside the belief's support.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

/// Concentration level `c^2 / 4` at which optimal play becomes myopic.
pub fn myopic_threshold(c: f64) -> f64 {
    c * c / 4.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapBound {
    pub value: f64,
    /// Set when the separator is 0 and the bound carries no information.
    pub degenerate: bool,
}

/// Lower bound `delta (1 - delta) c^2 / (1 - c)` on the value increase from one step of
/// the optimal walk out of a `delta`-unconcentrated belief.
pub fn gap_lower_bound(instance: &Instance, delta: f64) -> Result<GapBound> {
    let c = instance.separator().separator;
    Ok(GapBound {
        value: gap_bound(c, delta)?,
        degenerate: c == 0.0,
    })
}

pub fn gap_bound(c: f64, delta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidArgument(format!("delta must lie in [0, 1], got {delta}")));
    }
    check_separator_below_one(c)?;
    if c <= 0.0 {
        return Ok(0.0);
    }
    Ok(delta * (1.0 - delta) * c * c / (1.0 - c))
}

/// Number of `delta`-unconcentrated beliefs an optimal walk can visit:
/// `ceil((1 - c)^2 / (delta (1 - delta) c^3))`.
pub fn unconcentrated_visit_bound(instance: &Instance, delta: f64) -> Result<u64> {
    visit_bound(instance.separator().separator, delta)
}

pub fn visit_bound(c: f64, delta: f64) -> Result<u64> {
    check_open_unit(delta)?;
    let c = positive_separator(c)?;
    let x = (1.0 - c).powi(2) / (delta * (1.0 - delta) * c.powi(3));
    // values that are integers up to rounding should not be bumped to the next integer
    let r = x.round();
    let h = if (x - r).abs() <= 1e-9 * r.max(1.0) { r } else { x.ceil() };
    if h >= u64::MAX as f64 {
        return Ok(u64::MAX);
    }
    Ok(h as u64)
}

/// Lipschitz constant `(1 - c) / c` of the optimal value in l1.
pub fn lipschitz_constant(instance: &Instance) -> Result<f64> {
    lipschitz_from_separator(instance.separator().separator)
}

pub fn lipschitz_from_separator(c: f64) -> Result<f64> {
    let c = positive_separator(c)?;
    Ok((1.0 - c) / c)
}

/// If `belief` is `(c^2/4, m)`-concentrated, the favorite category of `m`, which is then
/// the optimal first action.
pub fn myopic_region_check(instance: &Instance, belief: &Belief) -> Result<Option<usize>> {
    instance.check_belief(belief)?;
    let c = positive_separator(instance.separator().separator)?;
    let delta = myopic_threshold(c);
    Ok((0..instance.num_types())
        .find(|&m| belief.is_concentrated_on(m, delta))
        .map(|m| instance.favorite_category(m)))
}

/// Whether a belief concentrated on `m` stays concentrated forever: `m` must maximize
/// `P(k, .)` over the support of `belief`, where `k` is the favorite category of `m`.
pub fn convergence_condition(instance: &Instance, belief: &Belief, m: usize) -> Result<bool> {
    instance.check_belief(belief)?;
    instance.check_type(m)?;
    let c = positive_separator(instance.separator().separator)?;
    let delta = myopic_threshold(c);
    if !belief.is_concentrated_on(m, delta) {
        return Err(Error::NotConcentrated { delta, type_index: m });
    }
    Ok(condition_holds(instance, belief.as_slice(), m))
}

pub(crate) fn condition_holds(instance: &Instance, b: &[f64], m: usize) -> bool {
    let row = instance.row(instance.favorite_category(m));
    b.iter()
        .enumerate()
        .filter(|(_, &w)| w > SUPPORT_THRESHOLD)
        .all(|(j, _)| row[j] <= row[m])
}

fn check_open_unit(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

fn check_separator_below_one(c: f64) -> Result<()> {
    if !(c < 1.0) {
        return Err(Error::InvalidArgument(format!("separator must be below 1, got {c}")));
    }
    Ok(())
}

fn positive_separator(c: f64) -> Result<f64> {
    check_separator_below_one(c)?;
    if c <= 0.0 {
        return Err(Error::NotWellSeparated);
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn gap_bound_values() {
        assert!((gap_bound(0.02, 0.5).unwrap() - 1.0204081632653e-4).abs() < 1e-15);
        assert_eq!(gap_bound(0.3, 0.0).unwrap(), 0.0);
        assert_eq!(gap_bound(0.3, 1.0).unwrap(), 0.0);
        assert_eq!(gap_bound(0.0, 0.5).unwrap(), 0.0);
        assert!(gap_bound(0.3, 1.5).is_err());
        let inst = Instance::new(vec![0.5, 0.5], vec![vec![0.5, 0.5]]).unwrap();
        let g = gap_lower_bound(&inst, 0.5).unwrap();
        assert!(g.degenerate && g.value == 0.0);
    }

    #[test]
    fn visit_bound_values() {
        assert_eq!(visit_bound(0.5, 0.5).unwrap(), 8);
        assert_eq!(visit_bound(0.02, 0.5).unwrap(), 480_200);
        assert!(matches!(visit_bound(0.0, 0.5), Err(Error::NotWellSeparated)));
        assert!(visit_bound(1.0, 0.5).is_err());
        assert!(visit_bound(0.5, 0.0).is_err());
    }

    #[test]
    fn lipschitz_values() {
        assert!((lipschitz_from_separator(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((lipschitz_from_separator(0.02).unwrap() - 49.0).abs() < 1e-12);
        assert!(lipschitz_from_separator(0.999999).unwrap() < 1e-5);
        assert!(lipschitz_from_separator(0.0).is_err());
    }

    #[test]
    fn myopic_region() {
        let inst = fixtures::example1();
        assert_eq!(myopic_region_check(&inst, &Belief::vertex(2, 1)).unwrap(), Some(1));
        assert_eq!(myopic_region_check(&inst, &Belief::uniform(2)).unwrap(), None);
        let b = Belief::new(vec![0.99999, 0.00001]).unwrap();
        assert_eq!(myopic_region_check(&inst, &b).unwrap(), Some(0));
    }

    #[test]
    fn convergence_condition_cases() {
        let inst = fixtures::example1();
        assert!(convergence_condition(&inst, &Belief::vertex(2, 0), 0).unwrap());
        let b = Belief::new(vec![0.9999999, 0.0000001]).unwrap();
        assert!(convergence_condition(&inst, &b, 0).unwrap());
        assert!(matches!(
            convergence_condition(&inst, &Belief::uniform(2), 0),
            Err(Error::NotConcentrated { .. })
        ));
        // m1's favorite k1 is liked even more by m2
        let inst = Instance::new(vec![0.5, 0.5], vec![vec![0.6, 0.9], vec![0.3, 0.2]]).unwrap();
        let b = Belief::new(vec![1.0 - 1e-9, 1e-9]).unwrap();
        assert!(!convergence_condition(&inst, &b, 0).unwrap());
    }
}

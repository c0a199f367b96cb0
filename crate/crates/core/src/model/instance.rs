use crate::error::{Error, Result};
use crate::model::belief::{check_simplex, Belief, INPUT_SIMPLEX_TOL};

/// A planning instance: a prior over user types and a category-by-type matrix of like
/// probabilities.
///
/// Rows of `prefs` are categories, columns are user types. The prior is strictly positive
/// and every like probability is strictly below one, otherwise the expected session length
/// is unbounded.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    num_types: usize,
    num_categories: usize,
    prior: Vec<f64>,
    // row-major, num_categories x num_types
    prefs: Vec<f64>,
    type_names: Vec<String>,
    category_names: Vec<String>,
    p_max: f64,
}

impl Instance {
    pub fn new(prior: Vec<f64>, prefs: Vec<Vec<f64>>) -> Result<Self> {
        let num_types = prior.len();
        let num_categories = prefs.len();
        let type_names = (1..=num_types).map(|i| format!("m{i}")).collect();
        let category_names = (1..=num_categories).map(|i| format!("k{i}")).collect();
        Self::with_names(prior, prefs, type_names, category_names)
    }

    pub fn with_names(
        prior: Vec<f64>,
        prefs: Vec<Vec<f64>>,
        type_names: Vec<String>,
        category_names: Vec<String>,
    ) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidInstance(msg));
        let num_types = prior.len();
        let num_categories = prefs.len();
        if num_types == 0 {
            return invalid("at least one user type is required".into());
        }
        if num_categories == 0 {
            return invalid("at least one category is required".into());
        }
        check_simplex(&prior, INPUT_SIMPLEX_TOL).map_err(|e| Error::InvalidInstance(format!("prior: {e}")))?;
        if let Some(m) = prior.iter().position(|q| *q <= 0.0) {
            return invalid(format!("prior entry {m} is not strictly positive"));
        }
        let mut flat = Vec::with_capacity(num_types * num_categories);
        for (k, row) in prefs.iter().enumerate() {
            if row.len() != num_types {
                return invalid(format!(
                    "preference row {k} has {} entries, expected {num_types}",
                    row.len()
                ));
            }
            for (m, p) in row.iter().enumerate() {
                if !(p.is_finite() && (0.0..=1.0).contains(p)) {
                    return invalid(format!("preference ({k}, {m}) = {p} is outside [0, 1]"));
                }
            }
            flat.extend_from_slice(row);
        }
        let p_max = flat.iter().copied().fold(0.0, f64::max);
        if p_max >= 1.0 {
            return invalid(format!(
                "largest like probability is {p_max}; it must be below 1 for finite values"
            ));
        }
        if type_names.len() != num_types {
            return invalid(format!("{} type names for {num_types} types", type_names.len()));
        }
        if category_names.len() != num_categories {
            return invalid(format!(
                "{} category names for {num_categories} categories",
                category_names.len()
            ));
        }
        for names in [&type_names, &category_names] {
            let mut sorted: Vec<&String> = names.iter().collect();
            sorted.sort();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return invalid("labels must be unique".into());
            }
        }
        Ok(Instance {
            num_types,
            num_categories,
            prior,
            prefs: flat,
            type_names,
            category_names,
            p_max,
        })
    }

    pub fn num_types(&self) -> usize {
        self.num_types
    }

    pub fn num_categories(&self) -> usize {
        self.num_categories
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn prior_belief(&self) -> Belief {
        Belief::from_normalized_unchecked(self.prior.clone())
    }

    /// Like probability of category `k` for user type `m`.
    #[inline]
    pub fn pref(&self, k: usize, m: usize) -> f64 {
        self.prefs[k * self.num_types + m]
    }

    #[inline]
    pub fn row(&self, k: usize) -> &[f64] {
        &self.prefs[k * self.num_types..(k + 1) * self.num_types]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.prefs.chunks(self.num_types)
    }

    pub fn column(&self, m: usize) -> Vec<f64> {
        (0..self.num_categories).map(|k| self.pref(k, m)).collect()
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn type_names(&self) -> &[String] {
        &self.type_names
    }

    pub fn category_names(&self) -> &[String] {
        &self.category_names
    }

    pub fn category_name(&self, k: usize) -> &str {
        &self.category_names[k]
    }

    pub fn category_index(&self, name: &str) -> Option<usize> {
        self.category_names.iter().position(|n| n == name)
    }

    /// Favorite category of type `m` (lowest index on ties).
    pub fn favorite_category(&self, m: usize) -> usize {
        let mut best = 0;
        for k in 1..self.num_categories {
            if self.pref(k, m) > self.pref(best, m) {
                best = k;
            }
        }
        best
    }

    pub fn check_category(&self, k: usize) -> Result<()> {
        if k < self.num_categories {
            Ok(())
        } else {
            Err(Error::CategoryOutOfRange {
                index: k,
                len: self.num_categories,
            })
        }
    }

    pub fn check_type(&self, m: usize) -> Result<()> {
        if m < self.num_types {
            Ok(())
        } else {
            Err(Error::TypeOutOfRange {
                index: m,
                len: self.num_types,
            })
        }
    }

    pub fn check_belief(&self, belief: &Belief) -> Result<()> {
        if belief.len() != self.num_types {
            return Err(Error::InvalidBelief(format!(
                "belief has {} entries, instance has {} types",
                belief.len(),
                self.num_types
            )));
        }
        Ok(())
    }

    /// Expected immediate reward `p_k(b) = sum_m b(m) P(k, m)`.
    pub fn immediate_reward(&self, belief: &Belief, k: usize) -> Result<f64> {
        self.check_belief(belief)?;
        self.check_category(k)?;
        Ok(self.reward_raw(belief.as_slice(), k))
    }

    /// Posterior after a like on category `k`.
    pub fn update_belief(&self, belief: &Belief, k: usize) -> Result<Belief> {
        self.check_belief(belief)?;
        self.check_category(k)?;
        let mut next = belief.as_slice().to_vec();
        self.update_raw(&mut next, k)
            .ok_or(Error::ZeroLikelihood { step: 0, category: k })?;
        Ok(Belief::from_normalized_unchecked(next))
    }

    /// Beliefs `b_1 = belief, b_{t+1} = tau(b_t, a_t)` along `actions`; length `actions.len() + 1`.
    pub fn belief_walk(&self, belief: &Belief, actions: &[usize]) -> Result<Vec<Belief>> {
        self.check_belief(belief)?;
        let mut walk = Vec::with_capacity(actions.len() + 1);
        walk.push(belief.clone());
        let mut current = belief.as_slice().to_vec();
        for (step, &k) in actions.iter().enumerate() {
            self.check_category(k)?;
            self.update_raw(&mut current, k)
                .ok_or(Error::ZeroLikelihood { step, category: k })?;
            walk.push(Belief::from_normalized_unchecked(current.clone()));
        }
        Ok(walk)
    }

    #[inline]
    pub(crate) fn reward_raw(&self, b: &[f64], k: usize) -> f64 {
        self.row(k).iter().zip(b).map(|(p, w)| p * w).sum()
    }

    /// In-place Bayesian update. Returns the likelihood of the like, or `None` when it is
    /// zero (the vector is left untouched in that case).
    #[inline]
    pub(crate) fn update_raw(&self, b: &mut [f64], k: usize) -> Option<f64> {
        let like = self.reward_raw(b, k);
        if like <= 0.0 {
            return None;
        }
        let row = self.row(k);
        let mut total = 0.0;
        for (w, p) in b.iter_mut().zip(row) {
            *w = *w * p / like;
            total += *w;
        }
        b.iter_mut().for_each(|w| *w /= total);
        Some(like)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn rejects_bad_instances() {
        assert!(Instance::new(vec![], vec![]).is_err());
        assert!(Instance::new(vec![1.0], vec![]).is_err());
        assert!(Instance::new(vec![0.5, 0.5], vec![vec![0.5]]).is_err());
        assert!(Instance::new(vec![1.0, 0.0], vec![vec![0.5, 0.5]]).is_err());
        assert!(Instance::new(vec![0.5, 0.5], vec![vec![0.5, 1.2]]).is_err());
        // p_max = 1 makes the value unbounded
        assert!(Instance::new(vec![0.5, 0.5], vec![vec![1.0, 0.2]]).is_err());
        assert!(Instance::new(vec![0.5, 0.5], vec![vec![0.99, 0.2]]).is_ok());
    }

    #[test]
    fn immediate_reward_examples() {
        let inst = fixtures::example1();
        let q = inst.prior_belief();
        assert!((inst.immediate_reward(&q, 1).unwrap() - 0.8).abs() < 1e-12);
        assert!((inst.immediate_reward(&q, 0).unwrap() - 0.525).abs() < 1e-12);
        let e2 = Belief::vertex(2, 1);
        assert_eq!(inst.immediate_reward(&e2, 1).unwrap(), 0.81);
        assert!(matches!(
            inst.immediate_reward(&q, 2),
            Err(Error::CategoryOutOfRange { index: 2, len: 2 })
        ));
    }

    #[test]
    fn update_examples() {
        let inst = fixtures::example1();
        let q = inst.prior_belief();
        let b = inst.update_belief(&q, 0).unwrap();
        // 0.475 / 0.525 and 0.05 / 0.525
        assert!((b.get(0) - 0.904762).abs() < 1e-6);
        assert!((b.get(1) - 0.095238).abs() < 1e-6);

        let prop = fixtures::prop1(3.0);
        let b = prop.update_belief(&prop.prior_belief(), 1).unwrap();
        assert!(b.l1_distance(&prop.prior_belief()) < 1e-15);

        let e1 = Belief::vertex(2, 0);
        assert_eq!(inst.update_belief(&e1, 1).unwrap(), e1);
    }

    #[test]
    fn zero_likelihood_is_reported_with_step() {
        let inst = fixtures::prop1(1.0);
        let e2 = Belief::vertex(2, 1);
        assert_eq!(
            inst.update_belief(&e2, 0),
            Err(Error::ZeroLikelihood { step: 0, category: 0 })
        );
        assert_eq!(
            inst.belief_walk(&e2, &[1, 1, 0]),
            Err(Error::ZeroLikelihood { step: 2, category: 0 })
        );
    }

    #[test]
    fn walk_examples() {
        let inst = fixtures::example1();
        let q = inst.prior_belief();
        assert_eq!(inst.belief_walk(&q, &[]).unwrap(), vec![q.clone()]);
        let walk = inst.belief_walk(&q, &[0, 0]).unwrap();
        assert_eq!(walk.len(), 3);
        assert!((walk[1].get(0) - 0.904762).abs() < 1e-6);
        // odds 1 : 1 scaled by (0.95 / 0.1)^2 = 90.25
        assert!((walk[2].get(0) - 90.25 / 91.25).abs() < 1e-12);
        assert!((walk[2].get(1) - 1.0 / 91.25).abs() < 1e-12);
    }
}

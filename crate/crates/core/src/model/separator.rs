use serde::Serialize;

use crate::model::Instance;

/// The three separation margins of an instance and their minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparatorReport {
    /// Smallest `|P(k, m) - P(k, m')|` over categories and distinct type pairs.
    pub cross_type_gap: f64,
    /// Smallest gap between the largest and second-largest entry of a column.
    pub top_two_gap: f64,
    pub one_minus_pmax: f64,
    pub separator: f64,
}

impl SeparatorReport {
    pub fn is_well_separated(&self) -> bool {
        self.separator > 0.0
    }
}

impl Instance {
    /// Separation margins. Vacuous minima (a single type, or a single category) are 1.
    pub fn separator(&self) -> SeparatorReport {
        let (nk, nm) = (self.num_categories(), self.num_types());

        let mut cross_type_gap: f64 = 1.0;
        for row in self.rows() {
            for i in 0..nm {
                for j in (i + 1)..nm {
                    cross_type_gap = cross_type_gap.min((row[i] - row[j]).abs());
                }
            }
        }

        let mut top_two_gap: f64 = 1.0;
        if nk > 1 {
            for m in 0..nm {
                let (mut first, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
                for k in 0..nk {
                    let p = self.pref(k, m);
                    if p > first {
                        second = first;
                        first = p;
                    } else if p > second {
                        second = p;
                    }
                }
                top_two_gap = top_two_gap.min(first - second);
            }
        }

        let one_minus_pmax = 1.0 - self.p_max();
        SeparatorReport {
            cross_type_gap,
            top_two_gap,
            one_minus_pmax,
            separator: cross_type_gap.min(top_two_gap).min(one_minus_pmax),
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::fixtures;
    use crate::model::Instance;

    #[test]
    fn example1_margins() {
        let r = fixtures::example1().separator();
        assert!((r.cross_type_gap - 0.02).abs() < 1e-12);
        assert!((r.top_two_gap - 0.16).abs() < 1e-12);
        assert!((r.one_minus_pmax - 0.05).abs() < 1e-12);
        assert!((r.separator - 0.02).abs() < 1e-12);
        assert!(r.is_well_separated());
    }

    #[test]
    fn duplicate_columns_are_not_separated() {
        let inst = Instance::new(
            vec![0.3, 0.3, 0.4],
            vec![vec![0.2, 0.2, 0.7], vec![0.5, 0.5, 0.1]],
        )
        .unwrap();
        let r = inst.separator();
        assert_eq!(r.cross_type_gap, 0.0);
        assert_eq!(r.separator, 0.0);
        assert!(!r.is_well_separated());
    }

    #[test]
    fn single_type_uses_vacuous_cross_gap() {
        let inst = Instance::new(vec![1.0], vec![vec![0.9], vec![0.6], vec![0.3]]).unwrap();
        let r = inst.separator();
        assert_eq!(r.cross_type_gap, 1.0);
        assert!((r.top_two_gap - 0.3).abs() < 1e-12);
        assert!((r.separator - 0.1).abs() < 1e-12);
    }

    #[test]
    fn single_category_uses_vacuous_top_two_gap() {
        let inst = Instance::new(vec![0.5, 0.5], vec![vec![0.2, 0.6]]).unwrap();
        let r = inst.separator();
        assert_eq!(r.top_two_gap, 1.0);
        assert!((r.separator - 0.4).abs() < 1e-12);
    }

    #[test]
    fn tied_column_maximum_gives_zero() {
        let inst = Instance::new(vec![0.5, 0.5], vec![vec![0.7, 0.1], vec![0.7, 0.3]]).unwrap();
        assert_eq!(inst.separator().top_two_gap, 0.0);
    }
}

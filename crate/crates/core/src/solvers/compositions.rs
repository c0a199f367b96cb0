//! Ranking of weak compositions (count vectors with a fixed sum).
//!
//! Both the multiset DP (category counts summing to the depth) and the simplex lattice
//! (grid coordinates summing to the resolution) index their states this way. Order is
//! lexicographic in the count vector, first coordinate slowest.

/// Saturating binomial coefficients `C(n, r)` for `n <= max_n`, `r <= max_r`.
#[derive(Debug, Clone)]
pub(crate) struct Binomials {
    max_r: usize,
    table: Vec<u128>,
}

impl Binomials {
    pub(crate) fn new(max_n: usize, max_r: usize) -> Self {
        let width = max_r + 1;
        let mut table = vec![0u128; (max_n + 1) * width];
        for n in 0..=max_n {
            table[n * width] = 1;
            for r in 1..=max_r.min(n) {
                let above = table[(n - 1) * width + r - 1];
                let left = if r <= n - 1 { table[(n - 1) * width + r] } else { 0 };
                table[n * width + r] = above.saturating_add(left);
            }
        }
        Binomials { max_r, table }
    }

    #[inline]
    pub(crate) fn get(&self, n: usize, r: usize) -> u128 {
        if r > n {
            return 0;
        }
        self.table[n * (self.max_r + 1) + r]
    }
}

/// Number of weak compositions of `total` into `parts` parts, `C(total + parts - 1, parts - 1)`,
/// saturating at `u128::MAX`.
pub(crate) fn count(total: usize, parts: usize) -> u128 {
    if parts == 0 {
        return u128::from(total == 0);
    }
    let (n, r) = (total + parts - 1, parts - 1);
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        // exact: acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Rank/enumerate compositions into `parts` parts with a sum of at most `max_total`.
#[derive(Debug, Clone)]
pub(crate) struct CompositionIndex {
    parts: usize,
    binom: Binomials,
}

impl CompositionIndex {
    pub(crate) fn new(parts: usize, max_total: usize) -> Self {
        assert!(parts > 0);
        CompositionIndex {
            parts,
            binom: Binomials::new(max_total + parts, parts),
        }
    }

    /// Number of compositions of `total` (must not exceed the index's `max_total`).
    pub(crate) fn count(&self, total: usize) -> usize {
        self.binom.get(total + self.parts - 1, self.parts - 1) as usize
    }

    /// Position of `counts` among compositions with the same sum.
    ///
    /// Compositions whose first coordinate is smaller come first. Skipping every
    /// composition with `c_i < counts[i]` collapses, by the hockey-stick identity, into
    /// `C(r + p, p) - C(r - c + p, p)` for remaining sum `r` and `p` trailing parts.
    pub(crate) fn rank(&self, counts: &[u32]) -> usize {
        debug_assert_eq!(counts.len(), self.parts);
        let mut remaining: usize = counts.iter().map(|&c| c as usize).sum();
        let mut rank: u128 = 0;
        for (i, &c) in counts.iter().enumerate().take(self.parts - 1) {
            let c = c as usize;
            let p = self.parts - 1 - i;
            rank += self.binom.get(remaining + p, p) - self.binom.get(remaining - c + p, p);
            remaining -= c;
        }
        rank as usize
    }

    /// Visits every composition of `total` in rank order.
    pub(crate) fn for_each(&self, total: usize, mut f: impl FnMut(&[u32])) {
        let mut counts = vec![0u32; self.parts];
        if self.parts == 1 {
            counts[0] = total as u32;
            f(&counts);
            return;
        }
        fill(&mut counts, 0, total, &mut f);
    }
}

fn fill(counts: &mut [u32], i: usize, remaining: usize, f: &mut impl FnMut(&[u32])) {
    if i + 1 == counts.len() {
        counts[i] = remaining as u32;
        f(counts);
        return;
    }
    for c in 0..=remaining {
        counts[i] = c as u32;
        fill(counts, i + 1, remaining - c, f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_stars_and_bars() {
        assert_eq!(count(3, 2), 4);
        assert_eq!(count(0, 5), 1);
        assert_eq!(count(10, 3), 66);
        assert_eq!(count(7, 1), 1);
        assert_eq!(count(1000, 40), u128::MAX);
    }

    #[test]
    fn rank_is_a_bijection_in_enumeration_order() {
        for parts in 1..=4 {
            let idx = CompositionIndex::new(parts, 7);
            for total in 0..=7 {
                let mut seen = 0;
                idx.for_each(total, |c| {
                    assert_eq!(idx.rank(c), seen, "{c:?}");
                    seen += 1;
                });
                assert_eq!(seen, idx.count(total));
                assert_eq!(seen as u128, count(total, parts));
            }
        }
    }
}

//! Size-`r` multisets over `{0, …, n-1}` as nondecreasing index tuples, in
//! colexicographic order.

#[derive(Clone, Debug)]
pub struct Multisets {
    n: usize,
    idx: Vec<usize>,
    fresh: bool,
}

impl Multisets {
    pub fn new(n: usize, r: usize) -> Self {
        Self {
            n,
            idx: vec![0; r],
            fresh: n > 0 || r == 0,
        }
    }

    pub fn current(&self) -> &[usize] {
        &self.idx
    }

    /// Steps to the colex successor and returns the highest position that
    /// changed (positions below it are reset to 0), or `None` at the end.
    pub fn advance(&mut self) -> Option<usize> {
        let r = self.idx.len();
        let j = (0..r).find(|&j| {
            if j + 1 < r {
                self.idx[j] < self.idx[j + 1]
            } else {
                self.idx[j] + 1 < self.n
            }
        })?;
        self.idx[j] += 1;
        for x in &mut self.idx[..j] {
            *x = 0;
        }
        Some(j)
    }

    /// The multiset with the given position in colex order.
    pub fn nth(n: usize, r: usize, ordinal: u64) -> Option<Vec<usize>> {
        let mut it = Self::new(n, r);
        if !it.fresh {
            return None;
        }
        for _ in 0..ordinal {
            it.advance()?;
        }
        Some(it.idx)
    }
}

impl Iterator for Multisets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.fresh {
            self.fresh = false;
            return Some(self.idx.clone());
        }
        self.advance()?;
        Some(self.idx.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::multiset_count;

    #[test]
    fn counts_and_order() {
        for (n, r) in [(1, 3), (4, 3), (7, 2), (5, 5), (13, 3)] {
            let all: Vec<_> = Multisets::new(n, r).collect();
            assert_eq!(all.len() as u128, multiset_count(n as u64, r as u64));
            for m in &all {
                assert!(m.windows(2).all(|w| w[0] <= w[1]));
            }
            // colex: compare reversed tuples
            for w in all.windows(2) {
                let a: Vec<_> = w[0].iter().rev().collect();
                let b: Vec<_> = w[1].iter().rev().collect();
                assert!(a < b);
            }
        }
        assert_eq!(Multisets::new(0, 2).count(), 0);
        assert_eq!(Multisets::nth(4, 2, 5), Some(vec![2, 2]));
    }
}

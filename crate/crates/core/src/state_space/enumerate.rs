use alloc::vec;
use alloc::vec::Vec;

use super::height::HeightMatrix;
use crate::error::{Error, Result};

/// Default largest `n` for exhaustive enumeration (`A_7 = 218348` states).
pub const DEFAULT_STATE_CAP: usize = 7;

/// All domain-wall states for `n`, in lexicographic order by rows.
///
/// Fails with [`Error::Resource`] when `n > cap`.
pub fn enumerate_states(n: usize, cap: usize) -> Result<StateIter> {
    if n > cap {
        return Err(Error::Resource { n, cap });
    }
    StateIter::new(n)
}

/// Streaming enumerator of height matrices by row-major backtracking.
///
/// Each interior cell takes the values compatible with its upper and left
/// neighbours, smaller value first; cells next to the right or bottom boundary
/// are additionally pinned by it.
#[derive(Debug, Clone)]
pub struct StateIter {
    n: usize,
    h: Vec<i32>,
    cells: Vec<(usize, usize)>,
    chosen: Vec<Option<usize>>,
    depth: usize,
    started: bool,
    done: bool,
}

impl StateIter {
    pub fn new(n: usize) -> Result<Self> {
        Self::build(n, None)
    }

    /// The states whose ASM has its first-row `1` in column `k` (1-based),
    /// i.e. whose second height row is `1, 2, …, k, k−1, k, …, n−1`.
    /// The `n` partitions for `k = 1..=n` cover the state space disjointly.
    pub fn with_first_row_one_at(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::domain(alloc::format!("column {k} outside 1..={n}")));
        }
        Self::build(n, Some(k))
    }

    fn build(n: usize, peak: Option<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("n must be at least 1"));
        }
        let m = n + 1;
        let mut h = vec![0i32; m * m];
        for k in 0..m {
            h[k] = k as i32;
            h[k * m] = k as i32;
            h[n * m + k] = (n - k) as i32;
            h[k * m + n] = (n - k) as i32;
        }
        let mut first_free_row = 1;
        if let Some(k) = peak {
            if n >= 2 {
                for j in 1..n {
                    h[m + j] = if j < k {
                        j as i32 + 1
                    } else if j == k {
                        k as i32 - 1
                    } else {
                        j as i32 - 1
                    };
                }
                first_free_row = 2;
            }
        }
        let cells: Vec<(usize, usize)> = (first_free_row..n)
            .flat_map(|i| (1..n).map(move |j| (i, j)))
            .collect();
        let len = cells.len();
        Ok(StateIter {
            n,
            h,
            cells,
            chosen: vec![None; len],
            depth: 0,
            started: false,
            done: false,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The candidate value with index `idx ∈ {0, 1}` at cell `(i, j)`, if valid.
    fn candidate(&self, i: usize, j: usize, idx: usize) -> Option<i32> {
        let m = self.n + 1;
        let n = self.n as i32;
        let above = self.h[(i - 1) * m + j];
        let left = self.h[i * m + j - 1];
        let v = if idx == 0 { above - 1 } else { above + 1 };
        if (v - left).abs() != 1 {
            return None;
        }
        let (ii, jj) = (i as i32, j as i32);
        // Lipschitz reachability of the right column and bottom row.
        if (v - (n - ii)).abs() > n - jj || (v - (n - jj)).abs() > n - ii {
            return None;
        }
        Some(v)
    }
}

impl Iterator for StateIter {
    type Item = HeightMatrix;

    fn next(&mut self) -> Option<HeightMatrix> {
        if self.done {
            return None;
        }
        let len = self.cells.len();
        if len == 0 {
            self.done = true;
            return Some(HeightMatrix::from_raw(self.n, self.h.clone()));
        }
        if !self.started {
            self.started = true;
            self.depth = 0;
            self.chosen[0] = None;
        } else {
            self.depth = len - 1;
        }
        let m = self.n + 1;
        loop {
            let (i, j) = self.cells[self.depth];
            let start = self.chosen[self.depth].map_or(0, |c| c + 1);
            let found = (start..2).find_map(|idx| self.candidate(i, j, idx).map(|v| (idx, v)));
            match found {
                Some((idx, v)) => {
                    self.chosen[self.depth] = Some(idx);
                    self.h[i * m + j] = v;
                    if self.depth + 1 == len {
                        return Some(HeightMatrix::from_raw(self.n, self.h.clone()));
                    }
                    self.depth += 1;
                    self.chosen[self.depth] = None;
                }
                None => {
                    self.chosen[self.depth] = None;
                    if self.depth == 0 {
                        self.done = true;
                        return None;
                    }
                    self.depth -= 1;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state_space::a_n;
    use alloc::collections::BTreeSet;

    /// Brute-force oracle: every matrix with the right boundary and interior
    /// entries in `0..=n` of parity `i+j`, filtered by the adjacency rule.
    fn oracle_count(n: usize) -> usize {
        let m = n + 1;
        let interior: Vec<(usize, usize)> =
            (1..n).flat_map(|i| (1..n).map(move |j| (i, j))).collect();
        let choices = n as u64 / 2 + 1;
        let mut count = 0;
        let total = choices.pow(interior.len() as u32);
        for code in 0..total {
            let mut rows = vec![vec![0i32; m]; m];
            for k in 0..m {
                rows[0][k] = k as i32;
                rows[k][0] = k as i32;
                rows[n][k] = (n - k) as i32;
                rows[k][n] = (n - k) as i32;
            }
            let mut c = code;
            for &(i, j) in &interior {
                rows[i][j] = ((i + j) % 2) as i32 + 2 * (c % choices) as i32;
                c /= choices;
            }
            let refs: Vec<&[i32]> = rows.iter().map(|r| r.as_slice()).collect();
            if HeightMatrix::from_rows(&refs).is_ok() {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn counts_match_product_formula() {
        for n in 1..=6 {
            let count = StateIter::new(n).unwrap().count() as u64;
            assert_eq!(count, u64::try_from(a_n(n)).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn counts_match_exhaustive_oracle() {
        for n in 1..=4 {
            assert_eq!(
                StateIter::new(n).unwrap().count(),
                oracle_count(n),
                "n = {n}"
            );
        }
    }

    #[test]
    fn n1_and_n2_states() {
        let s: Vec<_> = StateIter::new(1).unwrap().collect();
        assert_eq!(s, [HeightMatrix::from_rows(&[&[0, 1], &[1, 0]]).unwrap()]);
        let s: Vec<_> = StateIter::new(2).unwrap().collect();
        assert_eq!(
            s,
            [
                HeightMatrix::from_rows(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]).unwrap(),
                HeightMatrix::from_rows(&[&[0, 1, 2], &[1, 2, 1], &[2, 1, 0]]).unwrap(),
            ]
        );
    }

    #[test]
    fn lexicographic_and_distinct() {
        let s: Vec<_> = StateIter::new(5).unwrap().collect();
        for w in s.windows(2) {
            assert!(w[0].entries() < w[1].entries());
        }
        let set: BTreeSet<Vec<i32>> = s.iter().map(|h| h.entries().to_vec()).collect();
        assert_eq!(set.len(), s.len());
    }

    #[test]
    fn partitions_cover_state_space() {
        for n in 1..=5 {
            let all: Vec<_> = StateIter::new(n).unwrap().collect();
            let mut parts = Vec::new();
            for k in 1..=n {
                for h in StateIter::with_first_row_one_at(n, k).unwrap() {
                    assert_eq!(h.second_row_peak(), Some(k));
                    parts.push(h);
                }
            }
            assert_eq!(parts, all, "n = {n}");
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            enumerate_states(8, DEFAULT_STATE_CAP),
            Err(Error::Resource { n: 8, cap: 7 })
        ));
        assert!(enumerate_states(3, DEFAULT_STATE_CAP).is_ok());
        assert!(enumerate_states(0, DEFAULT_STATE_CAP).is_err());
    }
}

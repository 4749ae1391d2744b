use alloc::vec::Vec;

use super::height::{BlockKind, HeightMatrix};

/// A block `(a b; c d)` at ASM position `(row, col)`, zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Block {
    pub row: usize,
    pub col: usize,
    pub a: i32,
    pub b: i32,
    pub c: i32,
    pub d: i32,
    pub kind: BlockKind,
}

/// Counts extracted from one state in a single pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateStatistics {
    /// Number of −1 entries of the ASM.
    pub n_minus: usize,
    /// `k_i`: height entries congruent to `i` mod 3, over all `(n+1)²` entries.
    pub k_mod3: [usize; 3],
    /// `m_i`: blocks with `a+b+c+d ≡ 2i` mod 8.
    pub m_mod8: [usize; 4],
    /// Number of blocks of each [`BlockKind`], indexed by [`BlockKind::index`].
    pub kind_counts: [usize; 6],
    pub blocks: Vec<Block>,
}

impl StateStatistics {
    pub fn of(h: &HeightMatrix) -> Self {
        let n = h.n();
        let mut k_mod3 = [0usize; 3];
        for &v in h.entries() {
            k_mod3[v.rem_euclid(3) as usize] += 1;
        }
        let mut m_mod8 = [0usize; 4];
        let mut kind_counts = [0usize; 6];
        let mut n_minus = 0;
        let mut blocks = Vec::with_capacity(n * n);
        for row in 0..n {
            for col in 0..n {
                let (a, b, c, d) = h.block(row, col);
                let kind = h.block_kind(row, col);
                let s = a + b + c + d;
                debug_assert!(s % 2 == 0);
                m_mod8[(s.rem_euclid(8) / 2) as usize] += 1;
                kind_counts[kind.index()] += 1;
                if kind == BlockKind::MinusPlusPlusMinus {
                    n_minus += 1;
                }
                blocks.push(Block {
                    row,
                    col,
                    a,
                    b,
                    c,
                    d,
                    kind,
                });
            }
        }
        StateStatistics {
            n_minus,
            k_mod3,
            m_mod8,
            kind_counts,
            blocks,
        }
    }

    pub fn count(&self, kind: BlockKind) -> usize {
        self.kind_counts[kind.index()]
    }
}

impl HeightMatrix {
    pub fn statistics(&self) -> StateStatistics {
        StateStatistics::of(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state_space::{AlternatingSignMatrix, StateIter};

    #[test]
    fn single_state_n1() {
        let h = StateIter::new(1).unwrap().next().unwrap();
        let s = h.statistics();
        assert_eq!(s.n_minus, 0);
        assert_eq!(s.k_mod3, [2, 2, 0]);
        assert_eq!(s.m_mod8, [0, 1, 0, 0]);
        assert_eq!(s.blocks.len(), 1);
        assert_eq!(s.blocks[0].kind, BlockKind::PlusMinusMinusPlus);
    }

    #[test]
    fn n2_states_match_asms() {
        let states: Vec<_> = StateIter::new(2).unwrap().collect();
        let id = AlternatingSignMatrix::from_rows(&[&[1, 0], &[0, 1]]).unwrap();
        let anti = AlternatingSignMatrix::from_rows(&[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(states[0].to_asm(), id);
        assert_eq!(states[1].to_asm(), anti);
        for h in &states {
            let s = h.statistics();
            assert_eq!(s.n_minus, 0);
            assert_eq!(s.k_mod3.iter().sum::<usize>(), 9);
        }
    }

    #[test]
    fn structural_invariants_hold_for_all_states() {
        for n in 1..=6 {
            for h in StateIter::new(n).unwrap() {
                let s = h.statistics();
                let asm = h.to_asm();
                assert_eq!(s.n_minus, asm.count_minus());
                assert_eq!(s.k_mod3.iter().sum::<usize>(), (n + 1) * (n + 1));
                assert_eq!(s.m_mod8.iter().sum::<usize>(), n * n);
                assert!(s.n_minus < n * n);
                // parity interlacing: h(i, j) ≡ i + j (mod 2)
                for i in 0..=n {
                    for j in 0..=n {
                        assert_eq!((h.get(i, j) - (i + j) as i32).rem_euclid(2), 0);
                    }
                }
                assert_eq!(
                    s.count(BlockKind::PlusMinusPlusMinus),
                    s.count(BlockKind::MinusPlusMinusPlus)
                );
                // one more +1 than −1 per row: n + N blocks carry +1
                assert_eq!(s.count(BlockKind::PlusMinusMinusPlus), n + s.n_minus);
                assert!(h.second_row_peak().is_some());
            }
        }
    }

    #[test]
    fn bijection_round_trip() {
        for n in 1..=5 {
            for h in StateIter::new(n).unwrap() {
                let asm = h.to_asm();
                let again =
                    AlternatingSignMatrix::new(n, asm.entries().to_vec()).expect("valid ASM");
                assert_eq!(again.to_height(), h);
            }
        }
    }

    #[test]
    fn invalid_asm_rejected() {
        assert!(AlternatingSignMatrix::from_rows(&[&[1, 1], &[0, 0]]).is_err());
        assert!(AlternatingSignMatrix::from_rows(&[&[0, 1, 0], &[1, -1, 1], &[0, 1, -1]]).is_err());
        assert!(AlternatingSignMatrix::from_rows(&[&[-1, 1], &[1, 0]]).is_err());
        assert!(AlternatingSignMatrix::from_rows(&[&[0, 1, 0], &[1, -1, 1], &[0, 1, 0]]).is_ok());
    }

    #[test]
    fn invalid_height_rejected() {
        assert!(HeightMatrix::from_rows(&[&[0, 1], &[1, 2]]).is_err());
        assert!(HeightMatrix::from_rows(&[&[0, 1, 2], &[1, 1, 1], &[2, 1, 0]]).is_err());
    }
}

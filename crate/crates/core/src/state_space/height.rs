use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use super::asm::AlternatingSignMatrix;
use crate::error::{Error, Result};

/// An `(n+1)×(n+1)` height matrix with the domain wall boundary:
/// first row and column `0..n`, last row and column `n..0`, and every pair of
/// adjacent entries differing by exactly one.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HeightMatrix {
    n: usize,
    entries: Vec<i32>,
}

/// The six local configurations of a block `(a b; c d)`, labelled by the
/// weight `R^{b−a, d−b}_{d−c, c−a}` they carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockKind {
    /// `R^{++}_{++}`: `(a, a+1; a+1, a+2)`.
    UpUp,
    /// `R^{−−}_{−−}`: `(a, a−1; a−1, a−2)`.
    DownDown,
    /// `R^{+−}_{+−}`: `(a, a+1; a−1, a)`.
    PlusMinusPlusMinus,
    /// `R^{−+}_{−+}`: `(a, a−1; a+1, a)`.
    MinusPlusMinusPlus,
    /// `R^{−+}_{+−}`: `(a, a−1; a−1, a)`, an ASM entry −1.
    MinusPlusPlusMinus,
    /// `R^{+−}_{−+}`: `(a, a+1; a+1, a)`, an ASM entry +1.
    PlusMinusMinusPlus,
}

impl BlockKind {
    /// Classifies a block; `None` if it violates the ±1 adjacency rule.
    pub fn classify(a: i32, b: i32, c: i32, d: i32) -> Option<BlockKind> {
        let (top, right, bottom, left) = (b - a, d - b, d - c, c - a);
        if ![top, right, bottom, left].iter().all(|s| s.abs() == 1) {
            return None;
        }
        Some(match (top, right, bottom, left) {
            (1, 1, 1, 1) => BlockKind::UpUp,
            (-1, -1, -1, -1) => BlockKind::DownDown,
            (1, -1, 1, -1) => BlockKind::PlusMinusPlusMinus,
            (-1, 1, -1, 1) => BlockKind::MinusPlusMinusPlus,
            (-1, 1, 1, -1) => BlockKind::MinusPlusPlusMinus,
            (1, -1, -1, 1) => BlockKind::PlusMinusMinusPlus,
            _ => return None,
        })
    }

    /// The ASM entry `(b+c−a−d)/2` carried by this kind of block.
    pub fn asm_entry(self) -> i8 {
        match self {
            BlockKind::MinusPlusPlusMinus => -1,
            BlockKind::PlusMinusMinusPlus => 1,
            _ => 0,
        }
    }

    pub const ALL: [BlockKind; 6] = [
        BlockKind::UpUp,
        BlockKind::DownDown,
        BlockKind::PlusMinusPlusMinus,
        BlockKind::MinusPlusMinusPlus,
        BlockKind::MinusPlusPlusMinus,
        BlockKind::PlusMinusMinusPlus,
    ];

    pub fn index(self) -> usize {
        match self {
            BlockKind::UpUp => 0,
            BlockKind::DownDown => 1,
            BlockKind::PlusMinusPlusMinus => 2,
            BlockKind::MinusPlusMinusPlus => 3,
            BlockKind::MinusPlusPlusMinus => 4,
            BlockKind::PlusMinusMinusPlus => 5,
        }
    }
}

impl HeightMatrix {
    /// Validates a row-major `(n+1)²` entry list.
    pub fn new(n: usize, entries: Vec<i32>) -> Result<Self> {
        let h = HeightMatrix { n, entries };
        h.validate()?;
        Ok(h)
    }

    pub(crate) fn from_raw(n: usize, entries: Vec<i32>) -> Self {
        debug_assert!(HeightMatrix {
            n,
            entries: entries.clone()
        }
        .validate()
        .is_ok());
        HeightMatrix { n, entries }
    }

    /// Builds the matrix from rows.
    pub fn from_rows(rows: &[&[i32]]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Validation("empty height matrix".into()));
        }
        let n = rows.len() - 1;
        let mut entries = Vec::with_capacity((n + 1) * (n + 1));
        for r in rows {
            if r.len() != n + 1 {
                return Err(Error::Validation("height matrix must be square".into()));
            }
            entries.extend_from_slice(r);
        }
        Self::new(n, entries)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        let m = n + 1;
        if n == 0 || self.entries.len() != m * m {
            return Err(Error::Validation(format!(
                "expected {} entries for n = {n}, got {}",
                m * m,
                self.entries.len()
            )));
        }
        for k in 0..=n {
            let k32 = k as i32;
            let n32 = n as i32;
            if self.get(0, k) != k32
                || self.get(k, 0) != k32
                || self.get(n, k) != n32 - k32
                || self.get(k, n) != n32 - k32
            {
                return Err(Error::Validation(
                    "boundary is not the domain wall boundary".into(),
                ));
            }
        }
        for i in 0..=n {
            for j in 0..=n {
                if j < n && (self.get(i, j) - self.get(i, j + 1)).abs() != 1 {
                    return Err(Error::Validation(format!(
                        "entries ({i},{j}) and ({i},{}) differ by ≠ 1",
                        j + 1
                    )));
                }
                if i < n && (self.get(i, j) - self.get(i + 1, j)).abs() != 1 {
                    return Err(Error::Validation(format!(
                        "entries ({i},{j}) and ({},{j}) differ by ≠ 1",
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Size `n` of the lattice (the matrix is `(n+1)×(n+1)`).
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i32 {
        self.entries[i * (self.n + 1) + j]
    }

    pub fn entries(&self) -> &[i32] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[i32] {
        let m = self.n + 1;
        &self.entries[i * m..(i + 1) * m]
    }

    /// The block with top-left corner `(i, j)` as `(a, b, c, d)`, `0 ≤ i, j < n`.
    #[inline]
    pub fn block(&self, i: usize, j: usize) -> (i32, i32, i32, i32) {
        (
            self.get(i, j),
            self.get(i, j + 1),
            self.get(i + 1, j),
            self.get(i + 1, j + 1),
        )
    }

    pub fn block_kind(&self, i: usize, j: usize) -> BlockKind {
        let (a, b, c, d) = self.block(i, j);
        BlockKind::classify(a, b, c, d).expect("valid height matrix")
    }

    /// Replaces each block `(a b; c d)` by `(b+c−a−d)/2`.
    pub fn to_asm(&self) -> AlternatingSignMatrix {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let (a, b, c, d) = self.block(i, j);
                entries.push(((b + c - a - d) / 2) as i8);
            }
        }
        AlternatingSignMatrix::from_raw(n, entries)
    }

    /// The unique `k ∈ 1..=n` for which the second row reads
    /// `1, 2, …, k, k−1, k, …, n−1`.
    pub fn second_row_peak(&self) -> Option<usize> {
        let n = self.n;
        (1..=n).find(|&k| {
            (0..=n).all(|j| {
                let expect = if j < k {
                    j as i32 + 1
                } else if j == k {
                    k as i32 - 1
                } else {
                    j as i32 - 1
                };
                self.get(1, j) == expect
            })
        })
    }
}

impl fmt::Debug for HeightMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("HeightMatrix[")?;
        for i in 0..=self.n {
            if i > 0 {
                f.write_str("; ")?;
            }
            for (j, v) in self.row(i).iter().enumerate() {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{v}")?;
            }
        }
        f.write_str("]")
    }
}

/// Converts an ASM to its height matrix; see [`AlternatingSignMatrix::to_height`].
impl From<&AlternatingSignMatrix> for HeightMatrix {
    fn from(a: &AlternatingSignMatrix) -> Self {
        a.to_height()
    }
}

use alloc::format;
use alloc::vec::Vec;

use super::height::HeightMatrix;
use crate::error::{Error, Result};

/// An `n×n` alternating sign matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlternatingSignMatrix {
    n: usize,
    entries: Vec<i8>,
}

impl AlternatingSignMatrix {
    /// Validates entries in `{−1, 0, 1}` whose nonzero entries alternate
    /// `1, −1, …, 1` along every row and column.
    pub fn new(n: usize, entries: Vec<i8>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::Validation(format!(
                "expected {} entries for n = {n}",
                n * n
            )));
        }
        let a = AlternatingSignMatrix { n, entries };
        for line in 0..n {
            a.check_line(line, |k| a.get(line, k), "row")?;
            a.check_line(line, |k| a.get(k, line), "column")?;
        }
        Ok(a)
    }

    pub(crate) fn from_raw(n: usize, entries: Vec<i8>) -> Self {
        AlternatingSignMatrix { n, entries }
    }

    pub fn from_rows(rows: &[&[i8]]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::Validation("ASM must be square".into()));
            }
            entries.extend_from_slice(r);
        }
        Self::new(n, entries)
    }

    fn check_line(&self, line: usize, at: impl Fn(usize) -> i8, what: &str) -> Result<()> {
        let mut partial = 0i32;
        for k in 0..self.n {
            let v = at(k);
            if !(-1..=1).contains(&v) {
                return Err(Error::Validation(format!(
                    "{what} {line}: entry {v} not in {{-1,0,1}}"
                )));
            }
            partial += v as i32;
            if !(0..=1).contains(&partial) {
                return Err(Error::Validation(format!(
                    "{what} {line}: signs do not alternate"
                )));
            }
        }
        if partial != 1 {
            return Err(Error::Validation(format!(
                "{what} {line}: sums to {partial}, not 1"
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    /// Number of entries equal to −1.
    pub fn count_minus(&self) -> usize {
        self.entries.iter().filter(|&&v| v == -1).count()
    }

    /// `h(i, j) = i + j − 2 Σ_{i'<i, j'<j} A(i', j')`.
    pub fn to_height(&self) -> HeightMatrix {
        let n = self.n;
        let m = n + 1;
        // corner[i][j] = sum of A over rows < i, columns < j
        let mut corner = alloc::vec![0i32; m * m];
        for i in 1..m {
            for j in 1..m {
                corner[i * m + j] =
                    self.get(i - 1, j - 1) as i32 + corner[(i - 1) * m + j] + corner[i * m + j - 1]
                        - corner[(i - 1) * m + j - 1];
            }
        }
        let entries = (0..m * m)
            .map(|idx| {
                let (i, j) = (idx / m, idx % m);
                (i + j) as i32 - 2 * corner[idx]
            })
            .collect();
        HeightMatrix::from_raw(n, entries)
    }
}

impl From<&HeightMatrix> for AlternatingSignMatrix {
    fn from(h: &HeightMatrix) -> Self {
        h.to_asm()
    }
}

//! JSON-lines export of states with their ASM and statistics.

use std::io::{self, Write};

use serde::Serialize;
use sosdw_core::state_space::{enumerate_states, HeightMatrix};

use crate::io::SCHEMA;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateLine {
    pub schema: &'static str,
    pub n: usize,
    /// Row-major ASM entries.
    pub asm: Vec<Vec<i8>>,
    /// Row-major heights, `(n+1) × (n+1)`.
    pub heights: Vec<Vec<i32>>,
    /// Number of −1 entries.
    pub n_minus: usize,
    /// Heights congruent to 0, 1, 2 mod 3.
    pub k: [usize; 3],
    /// Blocks with corner sum congruent to 0, 2, 4, 6 mod 8.
    pub m: [usize; 4],
}

impl StateLine {
    pub fn of(h: &HeightMatrix) -> Self {
        let n = h.n();
        let asm = h.to_asm();
        let s = h.statistics();
        StateLine {
            schema: SCHEMA,
            n,
            asm: (0..n)
                .map(|i| (0..n).map(|j| asm.get(i, j)).collect())
                .collect(),
            heights: (0..=n).map(|i| h.row(i).to_vec()).collect(),
            n_minus: s.n_minus,
            k: s.k_mod3,
            m: s.m_mod8,
        }
    }
}

/// Writes one line per state in enumeration order; returns the count.
pub fn export(n: usize, cap: usize, w: &mut dyn Write) -> Result<u64, ExportError> {
    let mut count = 0;
    for h in enumerate_states(n, cap)? {
        serde_json::to_writer(&mut *w, &StateLine::of(&h)).map_err(io::Error::from)?;
        writeln!(w)?;
        count += 1;
    }
    Ok(count)
}

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error(transparent)]
    Core(#[from] sosdw_core::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_states_at_n_two() {
        let mut buf = Vec::new();
        assert_eq!(export(2, 7, &mut buf).unwrap(), 2);
        let lines: Vec<serde_json::Value> = String::from_utf8(buf)
            .unwrap()
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        let asms: Vec<&serde_json::Value> = lines.iter().map(|l| &l["asm"]).collect();
        assert!(asms.contains(&&serde_json::json!([[1, 0], [0, 1]])));
        assert!(asms.contains(&&serde_json::json!([[0, 1], [1, 0]])));
        for l in &lines {
            assert_eq!(l["n_minus"], 0);
            assert_eq!(
                l["k"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|v| v.as_u64().unwrap())
                    .sum::<u64>(),
                9
            );
        }
    }
}

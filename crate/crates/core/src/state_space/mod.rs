//! Domain-wall height matrices, their bijection with alternating sign
//! matrices, and the per-state statistics consumed by the specializations.

mod asm;
mod counts;
mod enumerate;
mod height;
mod stats;

pub use asm::AlternatingSignMatrix;
pub use counts::{a_n, c_n};
pub use enumerate::{enumerate_states, StateIter, DEFAULT_STATE_CAP};
pub use height::{BlockKind, HeightMatrix};
pub use stats::{Block, StateStatistics};

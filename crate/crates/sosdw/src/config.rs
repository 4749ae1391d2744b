//! Worker pool sizing, seeded random streams and argument parsing helpers.

use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sosdw_core::C64;

/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "SOSDW_THREADS";

/// Builds the verification worker pool. `SOSDW_THREADS` sets its size; the
/// default is one worker per core.
pub fn thread_pool() -> Result<rayon::ThreadPool, String> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw
            .trim()
            .parse()
            .map_err(|_| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
        if n == 0 {
            return Err(format!("{THREADS_ENV} must be a positive integer, got 0"));
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| e.to_string())
}

/// The random stream for one task. Distinct `stream` values give independent
/// sequences from the same seed, so draws never depend on scheduling.
pub fn task_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Parses `1.5`, `-2i`, `0.3-0.1i` and the like.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let t = s.trim();
    C64::from_str(t).map_err(|_| format!("not a complex number: {s:?}"))
}

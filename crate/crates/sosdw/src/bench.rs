//! Wall-clock comparison of the evaluators on shared parameters.

use std::io::{self, Write};
use std::time::{Duration, Instant};

use serde::Serialize;
use sosdw_core::partition::{
    z_bruteforce_capped, z_factored_sum, z_ik_sum, z_root_of_unity, z_weightfunction,
    AdditiveParams, DeterminantPath, ParamSampler, RootGamma,
};
use sosdw_core::state_space::a_n;
use sosdw_core::theta::ThetaContext;
use sosdw_core::C64;

use crate::config::task_rng;
use crate::evaluate::EvalMethod;
use crate::io::{ComplexRecord, SCHEMA};

/// The permutation sum is skipped above this size.
pub const WEIGHT_FUNCTION_MAX_N: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub n_min: usize,
    pub n_max: usize,
    /// Timed repetitions per method and size; the median is reported.
    pub repetitions: usize,
    pub seed: u64,
    pub ctx: ThetaContext,
    /// When set, `root` is benchmarked with this `N`; `ctx` must have `η = 1/N`.
    pub root: Option<usize>,
    /// Restrict to one method.
    pub method: Option<EvalMethod>,
    pub state_cap: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub method: &'static str,
    /// `A_n`, the number of states at this size.
    pub states: String,
    /// Number of addends the method sums.
    pub terms: String,
    pub repetitions: usize,
    pub median_us: f64,
    pub min_us: f64,
    pub value: ComplexRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub schema: &'static str,
    pub seed: u64,
    pub p: ComplexRecord,
    pub eta: ComplexRecord,
    pub rows: Vec<BenchRow>,
}

/// Median and minimum of `reps` timed calls, plus the last value.
pub fn time_it<F>(reps: usize, mut f: F) -> sosdw_core::Result<(Duration, Duration, C64)>
where
    F: FnMut() -> sosdw_core::Result<C64>,
{
    let mut times = Vec::with_capacity(reps.max(1));
    let mut value = C64::new(0.0, 0.0);
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        value = std::hint::black_box(f()?);
        times.push(start.elapsed());
    }
    times.sort();
    Ok((times[times.len() / 2], times[0], value))
}

fn methods(cfg: &BenchConfig, n: usize) -> Vec<EvalMethod> {
    let mut all = Vec::new();
    if n <= cfg.state_cap {
        all.push(EvalMethod::Brute);
    }
    if n <= WEIGHT_FUNCTION_MAX_N {
        all.push(EvalMethod::WeightFunction);
    }
    all.extend([EvalMethod::Ik, EvalMethod::Factored]);
    if cfg.root.is_some() {
        all.push(EvalMethod::Root);
    }
    match cfg.method {
        Some(m) => all.into_iter().filter(|&x| x == m).collect(),
        None => all,
    }
}

fn terms(method: EvalMethod, n: usize, root: Option<usize>) -> String {
    match method {
        EvalMethod::Brute => a_n(n).to_string(),
        EvalMethod::WeightFunction => (1..=n as u128).product::<u128>().to_string(),
        EvalMethod::Root => root.unwrap_or(0).to_string(),
        _ => (1u128 << n).to_string(),
    }
}

/// One parameter point per size, shared by all methods at that size.
pub fn bench_params(cfg: &BenchConfig, n: usize) -> sosdw_core::Result<AdditiveParams> {
    ParamSampler::default().sample(n, &cfg.ctx, &mut task_rng(cfg.seed, n as u64))
}

pub fn run(cfg: &BenchConfig) -> sosdw_core::Result<BenchReport> {
    let ctx = &cfg.ctx;
    let mut rows = Vec::new();
    for n in cfg.n_min..=cfg.n_max {
        let params = bench_params(cfg, n)?;
        let mult = params.to_multiplicative(ctx);
        for method in methods(cfg, n) {
            let (median, min, value) = match method {
                EvalMethod::Brute => time_it(cfg.repetitions, || {
                    z_bruteforce_capped(&params, ctx, cfg.state_cap)
                })?,
                EvalMethod::WeightFunction => {
                    time_it(cfg.repetitions, || z_weightfunction(&params, ctx))?
                }
                EvalMethod::Ik => time_it(cfg.repetitions, || {
                    z_ik_sum(&params, ctx, DeterminantPath::Direct)
                })?,
                EvalMethod::Factored => time_it(cfg.repetitions, || z_factored_sum(&params, ctx))?,
                EvalMethod::Root => {
                    let big_n = cfg.root.expect("root benchmarked only when N is set");
                    let gamma = RootGamma::Value(mult.gamma()?);
                    time_it(cfg.repetitions, || {
                        z_root_of_unity(&mult, big_n, gamma, ctx)
                    })?
                }
                _ => continue,
            };
            rows.push(BenchRow {
                n,
                method: method.name(),
                states: a_n(n).to_string(),
                terms: terms(method, n, cfg.root),
                repetitions: cfg.repetitions.max(1),
                median_us: median.as_secs_f64() * 1e6,
                min_us: min.as_secs_f64() * 1e6,
                value: value.into(),
            });
        }
    }
    Ok(BenchReport {
        schema: SCHEMA,
        seed: cfg.seed,
        p: ctx.p().into(),
        eta: ctx.eta().into(),
        rows,
    })
}

pub fn write_csv(report: &BenchReport, w: &mut dyn Write) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "n",
        "method",
        "states",
        "terms",
        "repetitions",
        "median_us",
        "min_us",
        "value_re",
        "value_im",
    ])?;
    for r in &report.rows {
        out.write_record([
            r.n.to_string(),
            r.method.to_string(),
            r.states.clone(),
            r.terms.clone(),
            r.repetitions.to_string(),
            format!("{:.3}", r.median_us),
            format!("{:.3}", r.min_us),
            r.value.re.to_string(),
            r.value.im.to_string(),
        ])?;
    }
    out.flush()
}

pub fn write_text(report: &BenchReport, w: &mut dyn Write) -> io::Result<()> {
    writeln!(
        w,
        "{:>3} {:<10} {:>10} {:>10} {:>14} {:>14}",
        "n", "method", "states", "terms", "median µs", "min µs"
    )?;
    for r in &report.rows {
        writeln!(
            w,
            "{:>3} {:<10} {:>10} {:>10} {:>14.2} {:>14.2}",
            r.n, r.method, r.states, r.terms, r.median_us, r.min_us
        )?;
    }
    Ok(())
}

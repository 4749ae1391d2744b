//! Verification families run by `sosdw verify`.
//!
//! Each family expands into independent tasks, one per system size where
//! that makes sense. Tasks own a random stream derived from the seed and the
//! task key, run on a worker pool, and are merged back in task order, so the
//! report does not depend on the number of workers.

use std::fmt;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use sosdw_core::enumeration::{
    colour_counts, colour_deviation, colour_probabilities, constraint_check, dynamical_closed_form,
    dynamical_constant_term, dynamical_enumerate, dynamical_identity, elliptic_xy_probe,
    kuperberg_limit_det, kuperberg_specialize, third_power_scaled, three_colour_identity,
    two_enumeration, two_enumeration_moments, two_enumeration_moments_closed,
    xy_trigonometric_limit, Cyclotomic, ZOmega, ZI,
};
use sosdw_core::partition::{
    lambda_structure_check, recursion_check, spectral_structure_check, z_bruteforce_tracked,
    z_free_fermion, z_ik_sum, z_ik_sum_tracked, z_laurent, z_root_of_unity_tracked, z_sixvertex_ik,
    z_tilde_tracked, z_weightfunction, DeterminantPath, Method, ParamSampler, Recursion, RootGamma,
    TrackedSum,
};
use sosdw_core::scalar::{binom2, c, e2pi, epi, rel_diff, ONE, RESOLVABLE_CONDITION};
use sosdw_core::state_space::{a_n, c_n, enumerate_states};
use sosdw_core::theta::{
    addition_residual, frobenius_det, ramanujan_closed_form, ramanujan_partial,
    theta_decompose_residual, Convention, ThetaContext,
};
use sosdw_core::{Error, C64};

use crate::config::task_rng;
use crate::io::SCHEMA;

/// Default relative tolerance for numeric identities.
pub const TOLERANCE: f64 = 1e-8;
/// The six-vertex limit is only reached up to `|q^λ|`.
pub const SIX_VERTEX_TOLERANCE: f64 = 1e-6;
pub const FREE_FERMION_TOLERANCE: f64 = 1e-9;
pub const FROBENIUS_TOLERANCE: f64 = 1e-9;
pub const KUPERBERG_TOLERANCE: f64 = 1e-9;
/// Mismatch allowed when the fitted pair predicts a third sample.
pub const XY_FIT_TOLERANCE: f64 = 1e-7;
/// Distance of the probe at `p = 1e−7` from its trigonometric limit.
pub const XY_LIMIT_TOLERANCE: f64 = 1e-5;
/// Upper bound asserted for `|p_i − 1/3| n^{5/3}` over `n ≤ 200`.
pub const DEVIATION_BOUND: f64 = 1.0;
/// Truncation order of the Laurent expansion.
pub const LAURENT_TERMS: usize = 40;
/// Nome used by the Laurent family unless one is given.
pub const LAURENT_NOME: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    ThetaKernel,
    Addition,
    Frobenius,
    Decomposition,
    States,
    Agreement,
    RootOfUnity,
    Laurent,
    Recursion,
    Symmetry,
    OrderNorm,
    SixVertex,
    Kuperberg,
    Dynamical,
    ThreeColour,
    ColourProbabilities,
    TwoEnumeration,
    LimitDeterminant,
    XyProbe,
}

impl Family {
    pub const ALL: [Family; 19] = [
        Family::ThetaKernel,
        Family::Addition,
        Family::Frobenius,
        Family::Decomposition,
        Family::States,
        Family::Agreement,
        Family::RootOfUnity,
        Family::Laurent,
        Family::Recursion,
        Family::Symmetry,
        Family::OrderNorm,
        Family::SixVertex,
        Family::Kuperberg,
        Family::Dynamical,
        Family::ThreeColour,
        Family::ColourProbabilities,
        Family::TwoEnumeration,
        Family::LimitDeterminant,
        Family::XyProbe,
    ];

    /// Structural checks on the kernel and on `Z_n` as a function.
    pub const STRUCTURAL: [Family; 7] = [
        Family::Addition,
        Family::Frobenius,
        Family::Decomposition,
        Family::Recursion,
        Family::Symmetry,
        Family::OrderNorm,
        Family::SixVertex,
    ];

    /// Families whose verdicts come from exact arithmetic.
    pub const EXACT: [Family; 6] = [
        Family::States,
        Family::Dynamical,
        Family::ThreeColour,
        Family::ColourProbabilities,
        Family::TwoEnumeration,
        Family::LimitDeterminant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::ThetaKernel => "theta-kernel",
            Family::Addition => "addition",
            Family::Frobenius => "frobenius",
            Family::Decomposition => "decomposition",
            Family::States => "states",
            Family::Agreement => "agreement",
            Family::RootOfUnity => "root-of-unity",
            Family::Laurent => "laurent",
            Family::Recursion => "recursion",
            Family::Symmetry => "symmetry",
            Family::OrderNorm => "order-norm",
            Family::SixVertex => "six-vertex",
            Family::Kuperberg => "kuperberg",
            Family::Dynamical => "dynamical",
            Family::ThreeColour => "three-colour",
            Family::ColourProbabilities => "colour-probabilities",
            Family::TwoEnumeration => "two-enumeration",
            Family::LimitDeterminant => "limit-det",
            Family::XyProbe => "xy-probe",
        }
    }

    fn index(self) -> u64 {
        Family::ALL.iter().position(|&f| f == self).expect("listed") as u64
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses a comma-separated list of family names and the groups `all`,
/// `structural`, `exact`. The result follows [`Family::ALL`] order.
pub fn parse_suites(list: &str) -> Result<Vec<Family>, String> {
    let mut chosen = Vec::new();
    for word in list.split(',').map(str::trim).filter(|w| !w.is_empty()) {
        match word {
            "all" => chosen.extend(Family::ALL),
            "structural" => chosen.extend(Family::STRUCTURAL),
            "exact" => chosen.extend(Family::EXACT),
            _ => match Family::ALL.iter().find(|f| f.name() == word) {
                Some(&f) => chosen.push(f),
                None => {
                    let names: Vec<&str> = Family::ALL.iter().map(|f| f.name()).collect();
                    return Err(format!(
                        "unknown suite {word:?}; expected all, structural, exact or one of {}",
                        names.join(", ")
                    ));
                }
            },
        }
    }
    if chosen.is_empty() {
        return Err("no suite selected".into());
    }
    chosen.sort();
    chosen.dedup();
    Ok(chosen)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    /// Run every size-indexed family at this single `n`.
    pub n: Option<usize>,
    pub n_max: usize,
    /// Random points per identity and size.
    pub trials: usize,
    pub seed: u64,
    /// Fixed nome; drawn per point with `|p| ≤ 0.5` when absent.
    pub p: Option<C64>,
    /// Fixed crossing parameter; drawn per point when absent.
    pub eta: Option<C64>,
    /// `N` values for the root-of-unity family.
    pub roots: Vec<usize>,
    /// Replaces every numeric tolerance.
    pub tolerance: Option<f64>,
    /// Largest `n` checked in exact arithmetic.
    pub exact_max: usize,
    pub state_cap: usize,
    /// Record runtimes. Off gives byte-identical reports for equal configs.
    pub timing: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n: None,
            n_max: 3,
            trials: 20,
            seed: 42,
            p: None,
            eta: None,
            roots: vec![2, 3, 4],
            tolerance: None,
            exact_max: 5,
            state_cap: sosdw_core::state_space::DEFAULT_STATE_CAP,
            timing: true,
        }
    }
}

impl SuiteConfig {
    fn sizes(&self, hi: usize) -> Vec<Option<usize>> {
        match self.n {
            Some(n) => vec![Some(n)],
            None => (1..=hi).map(Some).collect(),
        }
    }

    fn tol(&self, default: f64) -> f64 {
        self.tolerance.unwrap_or(default)
    }

    /// The sizes each family runs at.
    pub fn tasks(&self, family: Family) -> Vec<Option<usize>> {
        let exact = self.n_max.min(self.exact_max);
        match family {
            Family::ThetaKernel | Family::Addition | Family::Decomposition => vec![None],
            Family::Frobenius => self.sizes(self.n_max.max(6)),
            Family::LimitDeterminant => self.sizes(self.n_max.max(20)),
            Family::ThreeColour => self.sizes(exact),
            Family::ColourProbabilities => {
                let mut v = self.sizes(exact);
                v.push(None);
                v
            }
            Family::TwoEnumeration => self.sizes(self.n_max.max(6).min(self.state_cap)),
            _ => self.sizes(self.n_max),
        }
    }
}

/// How an identity was judged.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Verdict {
    /// Worst relative error over `samples` random points.
    Numeric {
        samples: usize,
        max_relative_error: f64,
        tolerance: f64,
    },
    /// A boolean property tested at `samples` random points.
    Property {
        samples: usize,
        failures: usize,
        tolerance: f64,
    },
    /// Exact equality of integers, rationals or polynomials.
    Exact { holds: bool, detail: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityRecord {
    pub family: &'static str,
    pub identity: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub parameters: String,
    #[serde(flatten)]
    pub verdict: Verdict,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub schema: &'static str,
    pub seed: u64,
    pub n_max: usize,
    pub trials: usize,
    pub suites: Vec<&'static str>,
    pub records: Vec<IdentityRecord>,
    pub total: usize,
    pub failed: usize,
    pub passed: bool,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &IdentityRecord> {
        self.records.iter().filter(|r| !r.passed)
    }
}

impl IdentityRecord {
    /// One-line summary of the verdict.
    pub fn verdict_text(&self) -> String {
        match &self.verdict {
            Verdict::Numeric {
                samples,
                max_relative_error,
                tolerance,
            } => format!(
                "max rel err {max_relative_error:.2e} (tol {tolerance:.0e}, {samples} points)"
            ),
            Verdict::Property {
                samples,
                failures,
                tolerance,
            } => format!("{failures}/{samples} points fail (tol {tolerance:.0e})"),
            Verdict::Exact { holds, detail } => {
                format!(
                    "exact {}: {detail}",
                    if *holds { "equal" } else { "DIFFERENT" }
                )
            }
        }
    }
}

/// Human-readable report, one line per record and a summary line.
pub fn write_text(report: &VerifyReport, w: &mut dyn std::io::Write) -> std::io::Result<()> {
    for r in &report.records {
        let n = r.n.map_or("-".to_string(), |n| n.to_string());
        write!(
            w,
            "{} {:<21} n={:<3} {:<42} {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.family,
            n,
            r.identity,
            r.verdict_text()
        )?;
        if let Some(e) = &r.error {
            write!(w, " error: {e}")?;
        }
        if let Some(ms) = r.runtime_ms {
            write!(w, " [{ms:.1} ms]")?;
        }
        writeln!(w, " | {}", r.parameters)?;
    }
    writeln!(
        w,
        "{} of {} identity checks passed across {} families (seed {})",
        report.total - report.failed,
        report.total,
        report.suites.len(),
        report.seed
    )
}

/// Flat CSV, one row per record.
pub fn write_csv(report: &VerifyReport, w: &mut dyn std::io::Write) -> std::io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "family",
        "identity",
        "n",
        "mode",
        "max_relative_error",
        "tolerance",
        "samples",
        "failures",
        "holds",
        "passed",
        "detail",
        "parameters",
        "runtime_ms",
    ])?;
    let blank = String::new;
    for r in &report.records {
        let (mode, err, tol, samples, failures, holds, detail) = match &r.verdict {
            Verdict::Numeric {
                samples,
                max_relative_error,
                tolerance,
            } => (
                "numeric",
                max_relative_error.to_string(),
                tolerance.to_string(),
                samples.to_string(),
                blank(),
                blank(),
                blank(),
            ),
            Verdict::Property {
                samples,
                failures,
                tolerance,
            } => (
                "property",
                blank(),
                tolerance.to_string(),
                samples.to_string(),
                failures.to_string(),
                blank(),
                blank(),
            ),
            Verdict::Exact { holds, detail } => (
                "exact",
                blank(),
                blank(),
                blank(),
                blank(),
                holds.to_string(),
                detail.clone(),
            ),
        };
        let detail = match &r.error {
            Some(e) => format!("{detail} {e}").trim().to_string(),
            None => detail,
        };
        out.write_record([
            r.family.to_string(),
            r.identity.to_string(),
            r.n.map_or(blank(), |n| n.to_string()),
            mode.to_string(),
            err,
            tol,
            samples,
            failures,
            holds,
            r.passed.to_string(),
            detail,
            r.parameters.clone(),
            r.runtime_ms.map_or(blank(), |ms| format!("{ms:.3}")),
        ])?;
    }
    out.flush()
}

/// Runs `families` on `pool` and merges the records by task order.
pub fn run(families: &[Family], cfg: &SuiteConfig, pool: &rayon::ThreadPool) -> VerifyReport {
    let tasks: Vec<(Family, Option<usize>)> = families
        .iter()
        .flat_map(|&f| cfg.tasks(f).into_iter().map(move |n| (f, n)))
        .collect();
    let records: Vec<IdentityRecord> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(family, n)| run_task(family, n, cfg))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    });
    let failed = records.iter().filter(|r| !r.passed).count();
    VerifyReport {
        schema: SCHEMA,
        seed: cfg.seed,
        n_max: cfg.n_max,
        trials: cfg.trials,
        suites: families.iter().map(|f| f.name()).collect(),
        total: records.len(),
        failed,
        passed: failed == 0,
        records,
    }
}

/// Runs one family at one size with its own random stream.
pub fn run_task(family: Family, n: Option<usize>, cfg: &SuiteConfig) -> Vec<IdentityRecord> {
    let stream = family.index() << 32 | n.unwrap_or(0) as u64;
    let mut t = Task {
        family,
        cfg,
        rng: task_rng(cfg.seed, stream),
        records: Vec::new(),
    };
    match (family, n) {
        (Family::ThetaKernel, _) => t.theta_kernel(),
        (Family::Addition, _) => t.addition(),
        (Family::Decomposition, _) => t.decomposition(),
        (Family::ColourProbabilities, None) => t.colour_asymptotics(),
        (_, None) => unreachable!("{family} is indexed by n"),
        (Family::Frobenius, Some(n)) => t.frobenius(n),
        (Family::States, Some(n)) => t.states(n),
        (Family::Agreement, Some(n)) => t.agreement(n),
        (Family::RootOfUnity, Some(n)) => t.root_of_unity(n),
        (Family::Laurent, Some(n)) => t.laurent(n),
        (Family::Recursion, Some(n)) => t.recursion(n),
        (Family::Symmetry, Some(n)) => t.symmetry(n),
        (Family::OrderNorm, Some(n)) => t.order_norm(n),
        (Family::SixVertex, Some(n)) => t.six_vertex(n),
        (Family::Kuperberg, Some(n)) => t.kuperberg(n),
        (Family::Dynamical, Some(n)) => t.dynamical(n),
        (Family::ThreeColour, Some(n)) => t.three_colour(n),
        (Family::ColourProbabilities, Some(n)) => t.colour_probabilities(n),
        (Family::TwoEnumeration, Some(n)) => t.two_enumeration(n),
        (Family::LimitDeterminant, Some(n)) => t.limit_det(n),
        (Family::XyProbe, Some(n)) => t.xy_probe(n),
    }
    t.records
}

type Outcome<T> = sosdw_core::Result<T>;

struct Task<'a> {
    family: Family,
    cfg: &'a SuiteConfig,
    rng: ChaCha8Rng,
    records: Vec<IdentityRecord>,
}

fn point<R: Rng + ?Sized>(rng: &mut R, r: f64) -> C64 {
    c(rng.gen_range(-r..=r), rng.gen_range(-r..=r))
}

fn fmt_c(z: C64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

impl Task<'_> {
    fn push(
        &mut self,
        identity: &'static str,
        n: Option<usize>,
        parameters: String,
        start: Instant,
        outcome: Outcome<(Verdict, bool)>,
    ) {
        let runtime_ms = crate::io::runtime_ms(start.elapsed(), self.cfg.timing);
        let (verdict, passed, error) = match outcome {
            Ok((v, ok)) => (v, ok, None),
            Err(e) => (
                Verdict::Exact {
                    holds: false,
                    detail: "evaluation failed".into(),
                },
                false,
                Some(e.to_string()),
            ),
        };
        self.records.push(IdentityRecord {
            family: self.family.name(),
            identity,
            n,
            parameters,
            verdict,
            passed,
            error,
            runtime_ms,
        });
    }

    /// Runs `f` once per trial and records the worst relative error.
    fn numeric(
        &mut self,
        identity: &'static str,
        n: Option<usize>,
        parameters: String,
        tolerance: f64,
        mut f: impl FnMut(&mut ChaCha8Rng) -> Outcome<f64>,
    ) {
        let start = Instant::now();
        let trials = self.cfg.trials;
        let outcome = (|| {
            let mut worst: f64 = 0.0;
            for _ in 0..trials {
                let e = f(&mut self.rng)?;
                worst = if e.is_nan() { f64::NAN } else { worst.max(e) };
            }
            let ok = worst <= tolerance;
            Ok((
                Verdict::Numeric {
                    samples: trials,
                    max_relative_error: worst,
                    tolerance,
                },
                ok,
            ))
        })();
        self.push(identity, n, parameters, start, outcome);
    }

    /// Runs `f` once per trial and counts points where the property fails.
    fn property(
        &mut self,
        identity: &'static str,
        n: Option<usize>,
        parameters: String,
        tolerance: f64,
        mut f: impl FnMut(&mut ChaCha8Rng) -> Outcome<bool>,
    ) {
        let start = Instant::now();
        let trials = self.cfg.trials;
        let outcome = (|| {
            let mut failures = 0;
            for _ in 0..trials {
                if !f(&mut self.rng)? {
                    failures += 1;
                }
            }
            Ok((
                Verdict::Property {
                    samples: trials,
                    failures,
                    tolerance,
                },
                failures == 0,
            ))
        })();
        self.push(identity, n, parameters, start, outcome);
    }

    fn exact(
        &mut self,
        identity: &'static str,
        n: Option<usize>,
        parameters: String,
        f: impl FnOnce() -> Outcome<(bool, String)>,
    ) {
        let start = Instant::now();
        let outcome = f().map(|(holds, detail)| (Verdict::Exact { holds, detail }, holds));
        self.push(identity, n, parameters, start, outcome);
    }

    fn context_desc(&self) -> String {
        let p = self.cfg.p.map_or("random |p| ≤ 0.5".to_string(), fmt_c);
        let eta = self.cfg.eta.map_or("random".to_string(), fmt_c);
        format!("p = {p}, η = {eta}")
    }

    fn points_desc(&self) -> String {
        format!("{}, {} points", self.context_desc(), self.cfg.trials)
    }

    // -- theta kernel -----------------------------------------------------

    fn theta_kernel(&mut self) {
        let cfg = self.cfg;
        let tol = cfg.tol(TOLERANCE);
        let params = self.points_desc();
        self.numeric("bracket is odd", None, params.clone(), tol, |rng| {
            let ctx = context(cfg, rng)?;
            let x = point(rng, 2.0);
            let (a, b) = (ctx.bracket(x)?, ctx.bracket(-x)?);
            Ok((a + b).norm() / a.norm().max(f64::MIN_POSITIVE))
        });
        self.numeric("bracket quasi-periods", None, params, tol, |rng| {
            let ctx = context(cfg, rng)?;
            let eta = ctx.eta();
            let x = point(rng, 1.0);
            let fx = ctx.bracket(x)?;
            let mut e = rel_diff(ctx.bracket(x + ONE / eta)?, -fx);
            if let Some(tau) = ctx.tau() {
                let factor = -e2pi(-eta * x) * epi(-tau);
                e = e.max(rel_diff(ctx.bracket(x + tau / eta)?, factor * fx));
            }
            Ok(e)
        });
        let desc = format!("p = 0, η = {}", cfg.eta.map_or("random".into(), fmt_c));
        self.numeric(
            "trigonometric bracket is −2i sin(πηx)",
            None,
            desc,
            tol,
            |rng| {
                let eta = cfg.eta.unwrap_or_else(|| random_eta(rng));
                let ctx = ThetaContext::trigonometric(eta)?;
                let x = point(rng, 2.0);
                let sine = c(0.0, -2.0) * (eta * x * std::f64::consts::PI).sin();
                Ok(rel_diff(ctx.bracket(x)?, sine))
            },
        );
    }

    fn addition(&mut self) {
        let cfg = self.cfg;
        let params = self.points_desc();
        self.numeric(
            "addition formula",
            None,
            params,
            cfg.tol(TOLERANCE),
            |rng| {
                let ctx = context(cfg, rng)?;
                let [x, y, u, v] = [0; 4].map(|_| point(rng, 1.0));
                Ok(addition_residual(x, y, u, v, &ctx)?.relative())
            },
        );
    }

    fn frobenius(&mut self, n: usize) {
        let cfg = self.cfg;
        let params = format!(
            "{}, t = γ, both conventions, condition ≤ {RESOLVABLE_CONDITION:e}",
            self.points_desc()
        );
        self.numeric(
            "Frobenius determinant",
            Some(n),
            params,
            cfg.tol(FROBENIUS_TOLERANCE),
            |rng| loop {
                let ctx = context(cfg, rng)?;
                let p = ParamSampler::default().sample(n, &ctx, rng)?;
                let add = frobenius_det(&p.x, &p.y, p.gamma()?, &ctx, Convention::Additive)?;
                let m = p.to_multiplicative(&ctx);
                let mul = frobenius_det(&m.x, &m.y, m.gamma()?, &ctx, Convention::Multiplicative)?;
                // Points where the determinant nearly cancels are resampled.
                if add.condition().max(mul.condition()) <= RESOLVABLE_CONDITION {
                    break Ok(add.relative_error().max(mul.relative_error()));
                }
            },
        );
    }

    fn decomposition(&mut self) {
        let cfg = self.cfg;
        let tol = cfg.tol(TOLERANCE);
        for big_n in 2..=5u32 {
            let params = format!("{}, N = {big_n}", self.points_desc());
            self.numeric("theta decomposition over p^N", None, params, tol, |rng| {
                loop {
                    let ctx = context(cfg, rng)?;
                    let (a, x) = (point(rng, 1.5), point(rng, 1.5));
                    if a.norm() < 0.05 || x.norm() < 0.05 {
                        continue;
                    }
                    match theta_decompose_residual(a, x, big_n, &ctx) {
                        Ok(r) => break Ok(r.relative()),
                        Err(Error::Pole { .. }) => continue,
                        Err(e) => break Err(e),
                    }
                }
            });
        }
        let params = format!("{}, |x| = √|p|, K = 400", self.points_desc());
        self.numeric("bilateral geometric sum", None, params, tol, |rng| {
            let ctx = context(cfg, rng)?;
            let r = ctx.p().norm().max(1e-4).sqrt();
            let x = C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU));
            let a = point(rng, 1.5);
            Ok(rel_diff(
                ramanujan_partial(a, x, &ctx, 400)?,
                ramanujan_closed_form(a, x, &ctx)?,
            ))
        });
    }

    // -- states -------------------------------------------------------------

    fn states(&mut self, n: usize) {
        let cap = self.cfg.state_cap;
        self.exact("state count is A_n", Some(n), "enumeration".into(), || {
            let want = a_n(n);
            let mut count = 0u64;
            let mut round_trip = true;
            for h in enumerate_states(n, cap)? {
                count += 1;
                let asm = h.to_asm();
                round_trip &= asm.to_height() == h && asm.count_minus() == h.statistics().n_minus;
            }
            Ok((
                want == count.into() && round_trip,
                format!(
                    "{count} states, A_n = {want}, ASM round trip {}",
                    ok_word(round_trip)
                ),
            ))
        });
    }

    // -- evaluators -----------------------------------------------------------

    fn agreement(&mut self, n: usize) {
        let cfg = self.cfg;
        let tol = cfg.tol(TOLERANCE);
        let params = format!(
            "{}, brute/weightfn/ik/ik-frobenius/factored",
            self.points_desc()
        );
        self.numeric("evaluators agree pairwise", Some(n), params, tol, |rng| {
            resolvable(rng, |rng| {
                let ctx = context(cfg, rng)?;
                let p = ParamSampler::default().sample(n, &ctx, rng)?;
                let sums = [
                    z_bruteforce_tracked(&p, &ctx, cfg.state_cap)?,
                    Method::WeightFunction.evaluate_tracked(&p, &ctx)?,
                    Method::IkSum(DeterminantPath::Direct).evaluate_tracked(&p, &ctx)?,
                    Method::IkSum(DeterminantPath::Frobenius).evaluate_tracked(&p, &ctx)?,
                    Method::Factored.evaluate_tracked(&p, &ctx)?,
                ];
                let mut worst: f64 = 0.0;
                for i in 0..sums.len() {
                    for j in i + 1..sums.len() {
                        worst = worst.max(rel_diff(sums[i].value, sums[j].value));
                    }
                }
                Ok((worst, worst_condition(&sums)))
            })
        });
        let params = format!("{}, two draws of γ", self.points_desc());
        self.numeric(
            "determinant sum is independent of γ",
            Some(n),
            params,
            tol,
            |rng| {
                resolvable(rng, |rng| {
                    let ctx = context(cfg, rng)?;
                    let s = ParamSampler::default();
                    let p = s.sample(n, &ctx, rng)?;
                    let other = s.resample_gamma(&p, &ctx, rng)?;
                    let sums = [
                        z_ik_sum_tracked(&p, &ctx, DeterminantPath::Direct)?,
                        z_ik_sum_tracked(&other, &ctx, DeterminantPath::Direct)?,
                    ];
                    Ok((
                        rel_diff(sums[0].value, sums[1].value),
                        worst_condition(&sums),
                    ))
                })
            },
        );
    }

    fn root_of_unity(&mut self, n: usize) {
        let cfg = self.cfg;
        for &big_n in &cfg.roots {
            let p_desc = cfg.p.map_or("random |p| ≤ 0.5".to_string(), fmt_c);
            let params = format!("p = {p_desc}, η = 1/{big_n}, {} points", cfg.trials);
            let eta = c(1.0 / big_n as f64, 0.0);
            self.numeric(
                "root-of-unity reduction",
                Some(n),
                params.clone(),
                cfg.tol(TOLERANCE),
                |rng| {
                    resolvable(rng, |rng| {
                        let ctx =
                            ThetaContext::new(cfg.p.unwrap_or_else(|| random_nome(rng)), eta)?;
                        let m = ParamSampler::default()
                            .sample(n, &ctx, rng)?
                            .to_multiplicative(&ctx);
                        let want = z_tilde_tracked(&m, &ctx, cfg.state_cap)?;
                        let full =
                            z_root_of_unity_tracked(&m, big_n, RootGamma::Value(m.gamma()?), &ctx)?;
                        let k0 = if ctx.p().norm() == 0.0 {
                            0
                        } else {
                            rng.gen_range(-2..=2)
                        };
                        let short =
                            z_root_of_unity_tracked(&m, big_n, RootGamma::Vanishing(k0), &ctx)?;
                        let err =
                            rel_diff(full.value, want.value).max(rel_diff(short.value, want.value));
                        Ok((
                            err,
                            want.condition()
                                .max(full.condition())
                                .max(short.condition()),
                        ))
                    })
                },
            );
            if big_n == 2 {
                let tol = cfg.tol(FREE_FERMION_TOLERANCE);
                let params = format!("{params}, against the N = 2 reduction");
                self.numeric("free-fermion product", Some(n), params, tol, |rng| {
                    resolvable(rng, |rng| {
                        let ctx =
                            ThetaContext::new(cfg.p.unwrap_or_else(|| random_nome(rng)), eta)?;
                        let m = ParamSampler::default()
                            .sample(n, &ctx, rng)?
                            .to_multiplicative(&ctx);
                        let reduced =
                            z_root_of_unity_tracked(&m, 2, RootGamma::Value(m.gamma()?), &ctx)?;
                        let err = rel_diff(z_free_fermion(&m, &ctx)?, reduced.value);
                        Ok((err, reduced.condition()))
                    })
                });
            }
        }
    }

    fn laurent(&mut self, n: usize) {
        let cfg = self.cfg;
        let p = match cfg.p {
            Some(p) if p.norm() >= 1e-3 => p,
            _ => c(LAURENT_NOME, 0.0),
        };
        let eta_desc = cfg.eta.map_or("random real".to_string(), fmt_c);
        let params = format!(
            "p = {}, η = {eta_desc}, K = {LAURENT_TERMS}, {} points",
            fmt_c(p),
            cfg.trials
        );
        self.numeric(
            "Laurent expansion",
            Some(n),
            params,
            cfg.tol(TOLERANCE),
            |rng| {
                let (ctx, m, want) = resolvable(rng, |rng| {
                    let eta = cfg.eta.unwrap_or_else(|| c(rng.gen_range(0.1..0.45), 0.0));
                    let ctx = ThetaContext::new(p, eta)?;
                    let mut m = ParamSampler::default()
                        .sample(n, &ctx, rng)?
                        .to_multiplicative(&ctx);
                    // centre |λq^k|, k = 0..=n, on the annulus |p| < r < 1 in log scale
                    let log_q = ctx.q().norm().ln();
                    let radius = (0.5 * p.norm().ln() - 0.5 * n as f64 * log_q).exp();
                    m.lambda = C64::from_polar(radius, rng.gen_range(0.0..std::f64::consts::TAU));
                    let sum = z_tilde_tracked(&m, &ctx, cfg.state_cap)?;
                    Ok(((ctx, m, sum.value), sum.condition()))
                })?;
                Ok(rel_diff(
                    z_laurent(&m, m.gamma()?, &ctx, LAURENT_TERMS)?,
                    want,
                ))
            },
        );
    }

    // -- structure of Z_n -------------------------------------------------------

    fn recursion(&mut self, n: usize) {
        let cfg = self.cfg;
        for (which, identity) in [
            (Recursion::ShiftedDiagonal, "reduction at x₁ + 1 = y₁"),
            (Recursion::Diagonal, "reduction at x₁ = y₁"),
        ] {
            self.numeric(
                identity,
                Some(n),
                self.points_desc(),
                cfg.tol(TOLERANCE),
                |rng| {
                    resolvable(rng, |rng| {
                        let ctx = context(cfg, rng)?;
                        let p = ParamSampler::default().sample(n, &ctx, rng)?;
                        let sides = recursion_check(&p, &ctx, which, Method::Brute)?;
                        Ok((sides.relative_error(), sides.condition))
                    })
                },
            );
        }
    }

    fn symmetry(&mut self, n: usize) {
        let cfg = self.cfg;
        let params = format!("{}, random permutations of x and of y", self.points_desc());
        self.numeric(
            "symmetric in x and in y",
            Some(n),
            params,
            cfg.tol(TOLERANCE),
            |rng| {
                // each ordering is a different state sum, so all three must resolve
                resolvable(rng, |rng| {
                    let ctx = context(cfg, rng)?;
                    let p = ParamSampler::default().sample(n, &ctx, rng)?;
                    let mut by_x = p.clone();
                    by_x.x.shuffle(rng);
                    let mut by_y = p.clone();
                    by_y.y.shuffle(rng);
                    let base = z_bruteforce_tracked(&p, &ctx, cfg.state_cap)?;
                    let mut err: f64 = 0.0;
                    let mut condition = base.condition();
                    for moved in [by_x, by_y] {
                        let z = z_bruteforce_tracked(&moved, &ctx, cfg.state_cap)?;
                        err = err.max(rel_diff(z.value, base.value));
                        condition = condition.max(z.condition());
                    }
                    Ok((err, condition))
                })
            },
        );
    }

    fn order_norm(&mut self, n: usize) {
        let cfg = self.cfg;
        let tol = cfg.tol(TOLERANCE);
        let params = format!("{}, 3 quasi-period samples per point", self.points_desc());
        self.property(
            "order and norm in x₁ and in y₁",
            Some(n),
            params.clone(),
            tol,
            |rng| {
                resolvable(rng, |rng| {
                    let ctx = context(cfg, rng)?;
                    let p = ParamSampler::default().sample(n, &ctx, rng)?;
                    judged(spectral_structure_check(
                        &p,
                        &ctx,
                        Method::Factored,
                        3,
                        tol,
                        rng,
                    ))
                })
            },
        );
        self.property("order and norm in λ", Some(n), params, tol, |rng| {
            resolvable(rng, |rng| {
                let ctx = context(cfg, rng)?;
                let p = ParamSampler::default().sample(n, &ctx, rng)?;
                judged(
                    lambda_structure_check(&p, &ctx, Method::Factored, 3, tol, rng)
                        .map(|s| s.general),
                )
            })
        });
        for big_n in 2..=n {
            let p_desc = cfg.p.map_or("random |p| ≤ 0.5".to_string(), fmt_c);
            let params = format!("p = {p_desc}, η = 1/{big_n}, {} points", cfg.trials);
            let eta = c(1.0 / big_n as f64, 0.0);
            self.property(
                "reduced order in λ at η = 1/N",
                Some(n),
                params,
                tol,
                |rng| {
                    resolvable(rng, |rng| {
                        let ctx =
                            ThetaContext::new(cfg.p.unwrap_or_else(|| random_nome(rng)), eta)?;
                        let p = ParamSampler::default().sample(n, &ctx, rng)?;
                        judged(
                            lambda_structure_check(&p, &ctx, Method::Factored, 3, tol, rng)
                                .map(|s| s.general && s.root_of_unity == Some(true)),
                        )
                    })
                },
            );
        }
    }

    fn six_vertex(&mut self, n: usize) {
        let cfg = self.cfg;
        let eta_desc = cfg.eta.map_or("random".to_string(), fmt_c);
        let params = format!("p = 0, η = {eta_desc}, Im(ηλ) = 4, {} points", cfg.trials);
        self.numeric(
            "six-vertex determinant limit",
            Some(n),
            params,
            cfg.tol(SIX_VERTEX_TOLERANCE),
            |rng| {
                let ctx = ThetaContext::trigonometric(cfg.eta.unwrap_or_else(|| random_eta(rng)))?;
                let mut p = ParamSampler::default().sample(n, &ctx, rng)?;
                p.lambda = (c(rng.gen_range(-0.5..0.5), 0.0) + c(0.0, 4.0)) / ctx.eta();
                let limit = z_sixvertex_ik(&p, &ctx)?;
                Ok(rel_diff(limit, z_weightfunction(&p, &ctx)?).max(rel_diff(
                    limit,
                    z_ik_sum(&p, &ctx, DeterminantPath::Direct)?,
                )))
            },
        );
    }

    // -- specializations ----------------------------------------------------

    fn kuperberg(&mut self, n: usize) {
        let cfg = self.cfg;
        let params = format!("{}, s = ±e^{{πiη}}", self.points_desc());
        self.numeric(
            "inhomogeneous specialization",
            Some(n),
            params,
            cfg.tol(KUPERBERG_TOLERANCE),
            |rng| {
                let ctx = context(cfg, rng)?;
                let s = epi(ctx.eta()) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                let lambda = point(rng, 0.5);
                Ok(kuperberg_specialize(n, &ctx, lambda, s, cfg.state_cap)?.relative_error())
            },
        );
    }

    fn dynamical(&mut self, n: usize) {
        let cfg = self.cfg;
        if n <= cfg.exact_max {
            self.exact(
                "dynamical enumeration at q = ω",
                Some(n),
                "p = 0, exact over Z[ω]".into(),
                || {
                    let id = dynamical_identity(n, cfg.state_cap)?;
                    let constant = id.constant_term_is(&dynamical_constant_term(n));
                    Ok((
                        id.holds() && constant,
                        format!(
                            "cleared by (1 − λ³)^{}, degree {}, λ = 0 gives ω^C(n+1,2) A_n {}",
                            id.cleared_by,
                            id.lhs.degree().unwrap_or(0),
                            ok_word(constant)
                        ),
                    ))
                },
            );
        } else {
            let params = format!("p = 0, random λ, {} points", cfg.trials);
            let closed = dynamical_closed_form(n);
            self.numeric(
                "dynamical enumeration at q = ω",
                Some(n),
                params,
                cfg.tol(TOLERANCE),
                |rng| {
                    let lambda = point(rng, 0.6);
                    Ok(rel_diff(
                        dynamical_enumerate(n, lambda)?,
                        closed.eval(lambda)?,
                    ))
                },
            );
        }
    }

    fn three_colour(&mut self, n: usize) {
        let cap = self.cfg.state_cap;
        self.exact(
            "three-colouring generating function",
            Some(n),
            "exact over Z[ω]".into(),
            || {
                let id = three_colour_identity(n, cap)?;
                let an = ZOmega::from_int(BigInt::from(a_n(n)));
                let constant = id.lhs.coeff(0) == an;
                Ok((
                    id.holds() && constant,
                    format!(
                        "cleared by (1 − λ³)^{}, degree {}, λ = 0 gives A_n {}",
                        id.cleared_by,
                        id.lhs.degree().unwrap_or(0),
                        ok_word(constant)
                    ),
                ))
            },
        );
    }

    fn colour_probabilities(&mut self, n: usize) {
        let cap = self.cfg.state_cap;
        self.exact(
            "colour probabilities",
            Some(n),
            "closed form vs enumeration".into(),
            || {
                let report = colour_probabilities(n);
                let counted = colour_counts(n, cap)?;
                let matches = (0..3).all(|i| report.k[i] == BigInt::from(counted[i].clone()));
                let mut detail = format!("K = ({}, {}, {})", report.k[0], report.k[1], report.k[2]);
                let mut holds = matches;
                if n == 1 {
                    let half = BigRational::new(BigInt::one(), BigInt::from(2));
                    let want = [half.clone(), half, BigRational::zero()];
                    let first = report.p == want;
                    holds &= first;
                    detail.push_str(&format!(", p = (1/2, 1/2, 0) {}", ok_word(first)));
                }
                Ok((holds, detail))
            },
        );
    }

    fn colour_asymptotics(&mut self) {
        let cfg = self.cfg;
        self.exact(
            "bounded |p_i − 1/3| n^{5/3}",
            None,
            "closed forms, n ≤ 200".into(),
            || {
                let worst = (1..=200).map(colour_deviation).fold(0.0, f64::max);
                Ok((
                    worst <= DEVIATION_BOUND,
                    format!("max {worst:.6} (bound {DEVIATION_BOUND})"),
                ))
            },
        );
        let params = format!("random λ, t, {} points", cfg.trials);
        self.numeric(
            "colour weight constraint",
            None,
            params,
            cfg.tol(TOLERANCE),
            |rng| Ok(constraint_check(point(rng, 0.6), point(rng, 2.0)).relative()),
        );
    }

    fn two_enumeration(&mut self, n: usize) {
        let cfg = self.cfg;
        if n <= cfg.n_max.min(cfg.exact_max) || cfg.n == Some(n) {
            self.exact(
                "dynamical 2-enumeration",
                Some(n),
                "exact over Z[i]".into(),
                || {
                    let id = two_enumeration(n, cfg.state_cap)?;
                    let want = ZI::from_int(BigInt::one() << binom2(n));
                    let constant = id.lhs.coeff(0) == want;
                    Ok((
                        id.holds() && constant,
                        format!(
                            "degree {}, λ = 0 gives 2^C(n,2) {}",
                            id.lhs.degree().unwrap_or(0),
                            ok_word(constant)
                        ),
                    ))
                },
            );
        }
        self.exact(
            "2-enumeration moments",
            Some(n),
            "enumeration vs closed values".into(),
            || {
                let got = two_enumeration_moments(n, cfg.state_cap)?;
                let want = two_enumeration_moments_closed(n);
                Ok((got == want, format!("({}, {})", got.0, got.1)))
            },
        );
    }

    fn limit_det(&mut self, n: usize) {
        self.exact(
            "trigonometric limit determinant",
            Some(n),
            "(k, l) = (1, 3), (2, 3)".into(),
            || {
                let a = kuperberg_limit_det(n, 1, 3)?;
                let cn = kuperberg_limit_det(n, 2, 3)?;
                let ok_a = a == third_power_scaled(n, a_n(n));
                let ok_c = cn == third_power_scaled(n, c_n(n));
                Ok((
                    ok_a && ok_c,
                    format!("A_n {}, C_n {}", ok_word(ok_a), ok_word(ok_c)),
                ))
            },
        );
    }

    fn xy_probe(&mut self, n: usize) {
        let cfg = self.cfg;
        let cap = cfg.state_cap;
        self.exact(
            "elliptic coefficients at p → 0",
            Some(n),
            "q = ω, p = 1e−7".into(),
            || {
                let probe = elliptic_xy_probe(n, c(1e-7, 0.0), cap)?;
                let (x0, y0) = xy_trigonometric_limit(n);
                let e = rel_diff(probe.x, x0).max(rel_diff(probe.y, y0));
                let tol = cfg.tol(XY_LIMIT_TOLERANCE);
                Ok((
                    e <= tol,
                    format!("relative distance {e:.3e} (tolerance {tol:.0e})"),
                ))
            },
        );
        let p_desc = cfg.p.map_or("random |p| ≤ 0.5".to_string(), fmt_c);
        let params = format!("q = ω, p = {p_desc}, {} points", cfg.trials);
        self.numeric(
            "elliptic coefficients are λ-independent",
            Some(n),
            params,
            cfg.tol(XY_FIT_TOLERANCE),
            |rng| {
                let p = cfg.p.unwrap_or_else(|| random_nome(rng));
                Ok(elliptic_xy_probe(n, p, cap)?.check)
            },
        );
    }
}

fn ok_word(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "MISMATCH"
    }
}

fn random_nome<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let r = 0.5 * rng.gen_range(0.0f64..1.0).sqrt();
    C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

fn random_eta<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.gen_range(0.1..0.45), rng.gen_range(-0.05..0.05))
}

/// Draws until the reported cancellation factor is at most
/// [`RESOLVABLE_CONDITION`]. Near zeros of `Z_n`, or where a formula's terms
/// cancel, rounding eats every digit a relative comparison would look at.
fn resolvable<R, T, F>(rng: &mut R, mut draw: F) -> sosdw_core::Result<T>
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> sosdw_core::Result<(T, f64)>,
{
    const ATTEMPTS: usize = 1000;
    for _ in 0..ATTEMPTS {
        let (point, condition) = draw(rng)?;
        if condition <= RESOLVABLE_CONDITION {
            return Ok(point);
        }
    }
    Err(Error::Numeric(format!(
        "no point with cancellation below {RESOLVABLE_CONDITION:e} in {ATTEMPTS} draws"
    )))
}

/// A structure check's verdict paired with its conditioning, for
/// [`resolvable`]: an unresolved check is a draw to reject.
fn judged(verdict: sosdw_core::Result<bool>) -> sosdw_core::Result<(bool, f64)> {
    match verdict {
        Ok(holds) => Ok((holds, 0.0)),
        Err(Error::Unresolved { condition }) => Ok((false, condition)),
        Err(e) => Err(e),
    }
}

fn worst_condition(sums: &[TrackedSum]) -> f64 {
    sums.iter().map(TrackedSum::condition).fold(0.0, f64::max)
}

/// The configured context, with missing parts drawn at random.
fn context<R: Rng + ?Sized>(cfg: &SuiteConfig, rng: &mut R) -> sosdw_core::Result<ThetaContext> {
    let p = cfg.p.unwrap_or_else(|| random_nome(rng));
    let eta = cfg.eta.unwrap_or_else(|| random_eta(rng));
    ThetaContext::new(p, eta)
}

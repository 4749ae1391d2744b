use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sosdw::bench::{self, BenchConfig};
use sosdw::config::{parse_complex, thread_pool};
use sosdw::evaluate::{evaluate, EvalMethod, EvalRequest};
use sosdw::io::{complex_text, sink, write_json, Format};
use sosdw::states;
use sosdw::suites::{self, parse_suites, SuiteConfig};
use sosdw::tables::{self, IdentityKind};
use sosdw_core::partition::AdditiveParams;
use sosdw_core::state_space::DEFAULT_STATE_CAP;
use sosdw_core::theta::ThetaContext;
use sosdw_core::{Error, C64};

/// `γ` used by the determinant methods when none is given; any generic
/// value gives the same `Z_n`.
const DEFAULT_GAMMA: C64 = C64 {
    re: 0.3712,
    im: 0.1931,
};

#[derive(Parser)]
#[command(
    name = "sosdw",
    version,
    about = "Partition function of the dynamical eight-vertex (8VSOS) model with domain wall boundary conditions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run identity suites; exits 1 if any identity fails.
    Verify(VerifyArgs),
    /// Evaluate Z_n at given parameters with one method.
    Evaluate(EvaluateArgs),
    /// Emit A_n, C_n, K_i and p_i for a range of n.
    Tables(TablesArgs),
    /// Time the evaluators against each other.
    Bench(BenchArgs),
    /// Export all states of size n as JSON lines.
    States(StatesArgs),
    /// Emit both sides of an exact polynomial identity as JSON.
    Identity(IdentityArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Output format; the default depends on the subcommand.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit runtime fields so equal inputs give byte-identical output.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct ModelArgs {
    /// Elliptic nome p, |p| < 0.9; 0 is the trigonometric case.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    p: Option<C64>,
    /// Crossing parameter η, with q = e^{2πiη}.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    eta: Option<C64>,
    /// Set η = 1/N, so that q is a primitive N-th root of unity.
    #[arg(long, value_name = "N")]
    root_of_unity: Option<usize>,
}

impl ModelArgs {
    fn eta(&self) -> Result<Option<C64>, Failure> {
        let Some(big_n) = self.root_of_unity else {
            return Ok(self.eta);
        };
        if big_n < 2 {
            return Err(Failure::Usage("--root-of-unity needs N ≥ 2".into()));
        }
        let eta = C64::new(1.0 / big_n as f64, 0.0);
        match self.eta {
            Some(e) if (e - eta).norm() > 1e-12 => Err(Failure::Usage(format!(
                "--eta {e} contradicts --root-of-unity {big_n}"
            ))),
            _ => Ok(Some(eta)),
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated families, or the groups all, structural, exact.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Check only this n.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 3)]
    n_max: usize,
    /// Random points per identity and size.
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    model: ModelArgs,
    /// Replace every numeric tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Check exact identities in exact arithmetic up to the state cap
    /// instead of n ≤ 5.
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    state_cap: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long, value_enum, default_value_t = EvalMethod::Ik)]
    method: EvalMethod,
    /// Expected size; must match the number of x and y values.
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated spectral parameters x_1..x_n.
    #[arg(long, required = true, allow_hyphen_values = true, value_delimiter = ',', value_parser = parse_complex)]
    x: Vec<C64>,
    /// Comma-separated spectral parameters y_1..y_n.
    #[arg(long, required = true, allow_hyphen_values = true, value_delimiter = ',', value_parser = parse_complex)]
    y: Vec<C64>,
    /// Dynamical parameter.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    lambda: C64,
    /// Auxiliary parameter of the determinant formulas.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    gamma: Option<C64>,
    #[command(flatten)]
    model: ModelArgs,
    /// Truncation K of the Laurent expansion.
    #[arg(long, default_value_t = 40)]
    laurent_terms: usize,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    state_cap: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TablesArgs {
    /// Emit only this n.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 10)]
    n_max: usize,
    /// Recount K_i from the states for every n within the state cap.
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    state_cap: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct BenchArgs {
    /// Benchmark only this n.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 6)]
    n_max: usize,
    /// Timed repetitions per method and size.
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    model: ModelArgs,
    /// Benchmark a single method.
    #[arg(long, value_enum)]
    method: Option<EvalMethod>,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    state_cap: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct StatesArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    state_cap: usize,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IdentityArgs {
    /// Which identity.
    #[arg(long, value_enum)]
    suite: IdentityKind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    state_cap: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug)]
enum Failure {
    /// Bad arguments or parameters outside the domain; exit 2.
    Usage(String),
    /// An identity did not hold or a computation failed; exit 1.
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Numeric(_) | Error::Unresolved { .. } => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Check(format!("output: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Check(format!("output: {e}"))
    }
}

fn check_cap(what: &str, n: usize, cap: usize) -> Result<(), Failure> {
    if n > cap {
        return Err(Failure::Usage(format!(
            "{what} = {n} exceeds the state cap {cap}; raise it with --state-cap"
        )));
    }
    Ok(())
}

fn check_size(what: &str, n: usize) -> Result<(), Failure> {
    if n == 0 {
        return Err(Failure::Usage(format!("{what} must be at least 1")));
    }
    Ok(())
}

fn context(p: C64, eta: C64) -> Result<ThetaContext, Failure> {
    ThetaContext::new(p, eta).map_err(|e| Failure::Usage(e.to_string()))
}

fn cmd_verify(a: VerifyArgs) -> Result<(), Failure> {
    let families = parse_suites(&a.suite).map_err(Failure::Usage)?;
    check_size("--n-max", a.n_max)?;
    check_size("--trials", a.trials)?;
    if let Some(n) = a.n {
        check_size("--n", n)?;
        check_cap("--n", n, a.state_cap)?;
    } else {
        check_cap("--n-max", a.n_max, a.state_cap)?;
    }
    if let Some(t) = a.tolerance {
        if t.is_nan() || t <= 0.0 {
            return Err(Failure::Usage("--tolerance must be positive".into()));
        }
    }
    let roots = match a.model.root_of_unity {
        Some(n) if n < 2 => return Err(Failure::Usage("--root-of-unity needs N ≥ 2".into())),
        Some(n) => vec![n],
        None => vec![2, 3, 4],
    };
    let cfg = SuiteConfig {
        n: a.n,
        n_max: a.n_max,
        trials: a.trials,
        seed: a.seed,
        p: a.model.p,
        eta: a.model.eta,
        roots,
        tolerance: a.tolerance,
        exact_max: if a.exact { a.state_cap } else { 5 },
        state_cap: a.state_cap,
        timing: !a.output.no_timing,
    };
    // reject a bad nome or η before any work starts
    context(
        cfg.p.unwrap_or_default(),
        cfg.eta.unwrap_or(C64::new(0.25, 0.0)),
    )?;
    let pool = thread_pool().map_err(Failure::Usage)?;
    let report = suites::run(&families, &cfg, &pool);
    let mut w = sink(a.output.out.as_deref())?;
    match a.output.format.unwrap_or(Format::Text) {
        Format::Json => write_json(&mut w, &report)?,
        Format::Csv => suites::write_csv(&report, &mut w)?,
        Format::Text => suites::write_text(&report, &mut w)?,
    }
    w.flush()?;
    if report.passed {
        Ok(())
    } else {
        let names: Vec<String> = report
            .failures()
            .map(|r| {
                format!(
                    "{}/{}{}",
                    r.family,
                    r.identity,
                    r.n.map_or(String::new(), |n| format!(" (n={n})"))
                )
            })
            .collect();
        Err(Failure::Check(format!(
            "{} identity checks failed: {}",
            names.len(),
            names.join("; ")
        )))
    }
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<(), Failure> {
    if a.x.len() != a.y.len() {
        return Err(Failure::Usage(format!(
            "{} x values but {} y values",
            a.x.len(),
            a.y.len()
        )));
    }
    let n = a.x.len();
    if let Some(want) = a.n {
        if want != n {
            return Err(Failure::Usage(format!(
                "--n {want} but {n} spectral parameters given"
            )));
        }
    }
    if a.method == EvalMethod::Brute {
        check_cap("n", n, a.state_cap)?;
    }
    let eta = a
        .model
        .eta()?
        .ok_or_else(|| Failure::Usage("one of --eta or --root-of-unity is required".into()))?;
    let ctx = context(a.model.p.unwrap_or_default(), eta)?;
    let mut params = AdditiveParams::new(a.x, a.y, a.lambda)?;
    match a.gamma {
        Some(g) => params = params.with_gamma(g),
        None if a.method.uses_gamma() && a.method != EvalMethod::Root => {
            params = params.with_gamma(DEFAULT_GAMMA)
        }
        None => {}
    }
    let req = EvalRequest {
        method: a.method,
        ctx,
        params,
        root: a.model.root_of_unity,
        laurent_terms: a.laurent_terms,
        state_cap: a.state_cap,
    };
    let record = evaluate(&req, !a.output.no_timing)?;
    let mut w = sink(a.output.out.as_deref())?;
    let value = C64::new(record.value.re, record.value.im);
    let tilde = C64::new(record.value_tilde.re, record.value_tilde.im);
    match a.output.format.unwrap_or(Format::Json) {
        Format::Json => write_json(&mut w, &record)?,
        Format::Csv => {
            let mut out = csv::Writer::from_writer(&mut w);
            out.write_record([
                "method",
                "n",
                "value_re",
                "value_im",
                "value_tilde_re",
                "value_tilde_im",
                "runtime_ms",
            ])?;
            out.write_record([
                record.method.to_string(),
                n.to_string(),
                value.re.to_string(),
                value.im.to_string(),
                tilde.re.to_string(),
                tilde.im.to_string(),
                record.runtime_ms.map_or(String::new(), |ms| ms.to_string()),
            ])?;
            out.flush()?;
        }
        Format::Text => {
            writeln!(w, "method  {}\nn       {n}", record.method)?;
            writeln!(
                w,
                "Z_n     {}\nZ~_n    {}",
                complex_text(value),
                complex_text(tilde)
            )?;
            if let Some(ms) = record.runtime_ms {
                writeln!(w, "time    {ms:.3} ms")?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_tables(a: TablesArgs) -> Result<(), Failure> {
    let range = match a.n {
        Some(n) => n..=n,
        None => 1..=a.n_max,
    };
    check_size("n", *range.start())?;
    let rows = tables::colour_rows(range, a.exact.then_some(a.state_cap))?;
    let mut w = sink(a.output.out.as_deref())?;
    match a.output.format.unwrap_or(Format::Csv) {
        Format::Json => write_json(&mut w, &tables::to_json(&rows))?,
        Format::Csv => tables::write_csv(&rows, &mut w)?,
        Format::Text => tables::write_text(&rows, &mut w)?,
    }
    w.flush()?;
    if rows.iter().any(|r| r.enumerated == Some(false)) {
        return Err(Failure::Check(
            "enumerated K_i differ from the closed forms".into(),
        ));
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<(), Failure> {
    let (n_min, n_max) = match a.n {
        Some(n) => (n, n),
        None => (1, a.n_max),
    };
    check_size("n", n_min)?;
    if a.method == Some(EvalMethod::Brute) {
        check_cap("n", n_max, a.state_cap)?;
    }
    if matches!(
        a.method,
        Some(EvalMethod::Laurent | EvalMethod::FreeFermion | EvalMethod::IkFrobenius)
    ) {
        return Err(Failure::Usage(
            "bench covers brute, weightfn, ik, factored and root".into(),
        ));
    }
    if a.method == Some(EvalMethod::Root) && a.model.root_of_unity.is_none() {
        return Err(Failure::Usage(
            "--method root needs --root-of-unity N".into(),
        ));
    }
    let eta = a.model.eta()?.unwrap_or(C64::new(0.23, 0.02));
    let cfg = BenchConfig {
        n_min,
        n_max,
        repetitions: a.trials.max(1),
        seed: a.seed,
        ctx: context(a.model.p.unwrap_or(C64::new(0.1, 0.0)), eta)?,
        root: a.model.root_of_unity,
        method: a.method,
        state_cap: a.state_cap,
    };
    let report = bench::run(&cfg)?;
    let mut w = sink(a.output.out.as_deref())?;
    match a.output.format.unwrap_or(Format::Text) {
        Format::Json => write_json(&mut w, &report)?,
        Format::Csv => bench::write_csv(&report, &mut w)?,
        Format::Text => bench::write_text(&report, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn cmd_states(a: StatesArgs) -> Result<(), Failure> {
    check_cap("--n", a.n, a.state_cap)?;
    let mut w = sink(a.out.as_deref())?;
    states::export(a.n, a.state_cap, &mut w).map_err(|e| match e {
        states::ExportError::Core(e) => Failure::from(e),
        states::ExportError::Io(e) => Failure::from(e),
    })?;
    w.flush()?;
    Ok(())
}

fn cmd_identity(a: IdentityArgs) -> Result<(), Failure> {
    check_size("--n", a.n)?;
    check_cap("--n", a.n, a.state_cap)?;
    let doc = tables::identity_document(a.suite, a.n, a.state_cap)?;
    let mut w = sink(a.output.out.as_deref())?;
    match a.output.format.unwrap_or(Format::Json) {
        Format::Json => write_json(&mut w, &doc)?,
        Format::Text => {
            let degree = doc.lhs.as_array().map_or(0, |c| c.len().saturating_sub(1));
            writeln!(
                w,
                "{} n={} over {}: degree {degree}, sides {}",
                doc.identity,
                doc.n,
                doc.ring,
                if doc.holds { "equal" } else { "DIFFERENT" }
            )?;
        }
        Format::Csv => return Err(Failure::Usage("identity output is json or text".into())),
    }
    w.flush()?;
    if doc.holds {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "{} identity fails at n = {}",
            doc.identity, doc.n
        )))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = match cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Tables(a) => cmd_tables(a),
        Command::Bench(a) => cmd_bench(a),
        Command::States(a) => cmd_states(a),
        Command::Identity(a) => cmd_identity(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("failed: {msg}");
            ExitCode::from(1)
        }
    }
}

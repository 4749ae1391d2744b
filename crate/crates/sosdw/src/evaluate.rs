//! Single evaluations of `Z_n` and `Z̃_n` by a chosen method.

use std::time::Instant;

use serde::Serialize;
use sosdw_core::partition::{
    reciprocal_integer_eta, tilde_factor, z_free_fermion, z_laurent, z_root_of_unity,
    AdditiveParams, DeterminantPath, Method, RootGamma,
};
use sosdw_core::theta::ThetaContext;
use sosdw_core::{Error, C64};

use crate::io::{runtime_ms, ComplexRecord, SCHEMA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum EvalMethod {
    /// Sum over all states.
    Brute,
    /// Sum over permutations.
    #[value(name = "weightfn")]
    WeightFunction,
    /// Sum of 2ⁿ determinants.
    Ik,
    /// Sum of 2ⁿ determinants, each by its closed product.
    IkFrobenius,
    /// Sum of 2ⁿ factored terms.
    Factored,
    /// N determinants at η = 1/N.
    #[value(name = "root", alias = "rootN")]
    Root,
    /// Truncated Laurent expansion in λ.
    Laurent,
    /// Product formula at q = −1.
    #[value(name = "freefermion", alias = "free-fermion")]
    FreeFermion,
}

impl EvalMethod {
    pub fn name(self) -> &'static str {
        match self {
            EvalMethod::Brute => "brute",
            EvalMethod::WeightFunction => "weightfn",
            EvalMethod::Ik => "ik",
            EvalMethod::IkFrobenius => "ik-frobenius",
            EvalMethod::Factored => "factored",
            EvalMethod::Root => "root",
            EvalMethod::Laurent => "laurent",
            EvalMethod::FreeFermion => "freefermion",
        }
    }

    /// The additive evaluator behind this method, if it is one.
    pub fn additive(self) -> Option<Method> {
        match self {
            EvalMethod::Brute => Some(Method::Brute),
            EvalMethod::WeightFunction => Some(Method::WeightFunction),
            EvalMethod::Ik => Some(Method::IkSum(DeterminantPath::Direct)),
            EvalMethod::IkFrobenius => Some(Method::IkSum(DeterminantPath::Frobenius)),
            EvalMethod::Factored => Some(Method::Factored),
            _ => None,
        }
    }

    /// True for the determinant methods, whose formulas involve `γ`.
    pub fn uses_gamma(self) -> bool {
        !matches!(
            self,
            EvalMethod::Brute | EvalMethod::WeightFunction | EvalMethod::FreeFermion
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRequest {
    pub method: EvalMethod,
    pub ctx: ThetaContext,
    pub params: AdditiveParams,
    /// `N` for [`EvalMethod::Root`]; inferred from `η` when absent.
    pub root: Option<usize>,
    pub laurent_terms: usize,
    pub state_cap: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamsRecord {
    pub p: ComplexRecord,
    pub eta: ComplexRecord,
    pub x: Vec<ComplexRecord>,
    pub y: Vec<ComplexRecord>,
    pub lambda: ComplexRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<ComplexRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRecord {
    pub schema: &'static str,
    pub method: &'static str,
    pub n: usize,
    pub params: ParamsRecord,
    /// `Z_n` in the additive normalization.
    pub value: ComplexRecord,
    /// `Z̃_n = e^{πiηn(|x|+|y|)} Z_n`.
    pub value_tilde: ComplexRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

/// Evaluates the request. Multiplicative methods compute `Z̃_n` and the
/// additive value follows from the normalizing factor.
pub fn evaluate(req: &EvalRequest, timing: bool) -> sosdw_core::Result<EvalRecord> {
    let ctx = &req.ctx;
    let params = &req.params;
    let factor = tilde_factor(params, ctx);
    let start = Instant::now();
    let (value, value_tilde) = match req.method.additive() {
        Some(Method::Brute) => {
            let z = sosdw_core::partition::z_bruteforce_capped(params, ctx, req.state_cap)?;
            (z, factor * z)
        }
        Some(m) => {
            let z = m.evaluate(params, ctx)?;
            (z, factor * z)
        }
        None => {
            let m = params.to_multiplicative(ctx);
            let zt = match req.method {
                EvalMethod::Root => {
                    let big_n = match req.root.or_else(|| reciprocal_integer_eta(ctx)) {
                        Some(n) => n,
                        None => {
                            return Err(Error::Domain(
                                "the root method needs η = 1/N; pass --root-of-unity N".into(),
                            ))
                        }
                    };
                    let gamma = match params.gamma {
                        Some(_) => RootGamma::Value(m.gamma()?),
                        None => RootGamma::Vanishing(0),
                    };
                    z_root_of_unity(&m, big_n, gamma, ctx)?
                }
                EvalMethod::Laurent => z_laurent(&m, m.gamma()?, ctx, req.laurent_terms)?,
                EvalMethod::FreeFermion => z_free_fermion(&m, ctx)?,
                _ => unreachable!("additive methods handled above"),
            };
            (zt / factor, zt)
        }
    };
    let elapsed = start.elapsed();
    Ok(EvalRecord {
        schema: SCHEMA,
        method: req.method.name(),
        n: params.n(),
        params: ParamsRecord {
            p: ctx.p().into(),
            eta: ctx.eta().into(),
            x: params.x.iter().map(|&z| z.into()).collect(),
            y: params.y.iter().map(|&z| z.into()).collect(),
            lambda: params.lambda.into(),
            gamma: params.gamma.map(C64::into),
        },
        value: value.into(),
        value_tilde: value_tilde.into(),
        runtime_ms: runtime_ms(elapsed, timing),
    })
}

//! `Z_n` and `Z̃_n` by state enumeration and by every closed formula, plus the
//! structural checks (recursions, symmetry, theta structure) relating them.

mod brute;
mod checks;
mod determinant;
mod params;
mod reductions;
mod weight_function;
mod weights;

pub use brute::{
    tilde_factor, z_bruteforce, z_bruteforce_capped, z_bruteforce_tracked, z_tilde, z_tilde_capped,
    z_tilde_from_additive, z_tilde_tracked,
};
pub use checks::{
    lambda_structure_check, reciprocal_integer_eta, recursion_check, spectral_structure_check,
    symmetry_check, LambdaStructure, Recursion, RecursionSides,
};
pub use determinant::{
    factored_terms, z_factored_sum, z_factored_sum_tracked, z_ik_sum, z_ik_sum_tracked,
    z_sixvertex_ik, DeterminantPath, FactoredTerm,
};
pub use params::{is_generic, AdditiveParams, MultiplicativeParams, ParamSampler};
pub use reductions::{
    z_free_fermion, z_laurent, z_root_of_unity, z_root_of_unity_tracked, RootGamma,
};
pub use weight_function::{z_tilde_weightfunction, z_weightfunction, z_weightfunction_tracked};
pub use weights::{
    additive_weights, boltzmann_weight, multiplicative_weights, TrackedSum, WeightTable,
};

use crate::error::Result;
use crate::scalar::C64;
use crate::theta::ThetaContext;

/// The evaluators of `Z_n` that take additive parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Sum over all states.
    Brute,
    /// The `n!`-term weight function.
    WeightFunction,
    /// The `2^n`-determinant sum.
    IkSum(DeterminantPath),
    /// The `2^n` explicitly factored terms.
    Factored,
}

impl Method {
    pub fn evaluate(self, params: &AdditiveParams, ctx: &ThetaContext) -> Result<C64> {
        match self {
            Method::Brute => z_bruteforce(params, ctx),
            Method::WeightFunction => z_weightfunction(params, ctx),
            Method::IkSum(path) => z_ik_sum(params, ctx, path),
            Method::Factored => z_factored_sum(params, ctx),
        }
    }

    /// Like [`Method::evaluate`], with the magnitude of the summed terms.
    pub fn evaluate_tracked(
        self,
        params: &AdditiveParams,
        ctx: &ThetaContext,
    ) -> Result<TrackedSum> {
        match self {
            Method::Brute => {
                z_bruteforce_tracked(params, ctx, crate::state_space::DEFAULT_STATE_CAP)
            }
            Method::WeightFunction => z_weightfunction_tracked(params, ctx),
            Method::IkSum(path) => z_ik_sum_tracked(params, ctx, path),
            Method::Factored => z_factored_sum_tracked(params, ctx),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::WeightFunction => "weightfn",
            Method::IkSum(DeterminantPath::Direct) => "ik",
            Method::IkSum(DeterminantPath::Frobenius) => "ik-frobenius",
            Method::Factored => "factored",
        }
    }
}

//! Root-of-unity specializations: exact dynamical enumeration of alternating
//! sign matrices over `Z[ω]`, three-colouring statistics, and the dynamical
//! 2-enumeration over `Z[i]`.

mod colouring;
mod dynamical;
mod poly;
mod ring;
mod two_enumeration;

pub use colouring::{
    cn_over_an, colour_counts, colour_deviation, colour_probabilities, colour_probabilities_closed,
    constraint_check, rational_to_f64, three_colour_identity, ColourReport, ThreeColourIdentity,
};
pub use dynamical::{
    dynamical_closed_form, dynamical_constant_term, dynamical_enumerate, dynamical_identity,
    elliptic_xy_probe, kuperberg_limit_det, kuperberg_specialize, kuperberg_t, third_power_scaled,
    xy_trigonometric_limit, ClearedIdentity, KuperbergSides, XYProbe, XY_PROBE_LAMBDAS,
};
pub use poly::{CyclotomicPoly, RationalFunction};
pub use ring::{Cyclotomic, ZOmega, ZI};
pub use two_enumeration::{
    two_enumeration, two_enumeration_closed, two_enumeration_moments,
    two_enumeration_moments_closed, TwoEnumeration,
};

/// Largest `n` for which the exact identities are evaluated by default.
pub const EXACT_STATE_CAP: usize = 6;

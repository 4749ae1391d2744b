//! Theta functions in additive (`[x]`) and multiplicative (`θ(x;p)`) form.
//!
//! Infinite products are truncated at the smallest `K` with `|p|^K` below the
//! context tolerance. `q^x` always means `e^{2πiηx}` computed from the additive
//! exponent, never a complex power of a stored `q`.

mod identities;
pub mod linalg;

pub use identities::{
    addition_residual, frobenius_closed_additive, frobenius_det, frobenius_det_multiplicative,
    order_norm_check, order_norm_check_sampled, ramanujan_closed_form, ramanujan_partial,
    theta_decompose_residual, FrobeniusSides,
};

use alloc::format;
use alloc::vec::Vec;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::scalar::{c, check_finite, e2pi, epi, log_2pi_i, C64, ONE, POLE_EPS, ZERO};

/// Largest admissible `|p|`.
pub const MAX_NOME_MODULUS: f64 = 0.9;
/// Default truncation tolerance for the infinite products.
pub const DEFAULT_TRUNCATION_TOLERANCE: f64 = 1e-17;

/// An elliptic nome `p` together with the number of product factors kept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nome {
    p: C64,
    terms: usize,
    tolerance: f64,
}

impl Nome {
    pub fn new(p: C64) -> Result<Self> {
        Self::with_tolerance(p, DEFAULT_TRUNCATION_TOLERANCE)
    }

    pub fn with_tolerance(p: C64, tolerance: f64) -> Result<Self> {
        let r = p.norm();
        if !r.is_finite() || r >= 1.0 {
            return Err(Error::domain(format!("nome |p| = {r} must be < 1")));
        }
        if r > MAX_NOME_MODULUS {
            return Err(Error::domain(format!(
                "nome |p| = {r} exceeds the supported cap {MAX_NOME_MODULUS}"
            )));
        }
        if !(tolerance > 0.0 && tolerance < 1.0) {
            return Err(Error::domain(format!(
                "tolerance {tolerance} must lie in (0, 1)"
            )));
        }
        Ok(Nome {
            p,
            terms: truncation_for(r, tolerance),
            tolerance,
        })
    }

    #[inline]
    pub fn p(&self) -> C64 {
        self.p
    }

    /// Number of factors `K` kept in each infinite product.
    #[inline]
    pub fn terms(&self) -> usize {
        self.terms
    }

    #[inline]
    pub fn is_trigonometric(&self) -> bool {
        self.p == ZERO
    }

    /// The nome `p^n`, with the truncation recomputed for the new modulus.
    pub fn pow(&self, n: u32) -> Nome {
        let p = self.p.powu(n);
        Nome {
            p,
            terms: truncation_for(p.norm(), self.tolerance),
            tolerance: self.tolerance,
        }
    }

    /// `θ(x;p) = ∏_{j≥0} (1 - p^j x)(1 - p^{j+1}/x)`.
    ///
    /// At `p = 0` this is `1 - x`, which is also defined at `x = 0`.
    pub fn theta(&self, x: C64) -> Result<C64> {
        if self.is_trigonometric() {
            return check_finite(ONE - x, "θ(x;0)");
        }
        if x == ZERO {
            return Err(Error::domain("θ(x;p) is singular at x = 0"));
        }
        let inv = ONE / x;
        let mut acc = ONE;
        let mut pj = ONE;
        for _ in 0..self.terms {
            let next = pj * self.p;
            acc *= (ONE - pj * x) * (ONE - next * inv);
            pj = next;
        }
        check_finite(acc, "θ(x;p)")
    }

    /// Product of `θ` over several arguments.
    pub fn theta_product(&self, xs: &[C64]) -> Result<C64> {
        xs.iter().try_fold(ONE, |acc, &x| Ok(acc * self.theta(x)?))
    }

    /// `(p;p)_∞ = ∏_{j≥1} (1 - p^j)`.
    pub fn euler(&self) -> C64 {
        let mut acc = ONE;
        let mut pj = ONE;
        for _ in 0..self.terms {
            pj *= self.p;
            acc *= ONE - pj;
        }
        acc
    }
}

/// Which form an identity is stated in: brackets `[x]` of additive variables,
/// or `θ(x;p)` of multiplicative variables `x = q^{x_add}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Convention {
    Additive,
    Multiplicative,
}

/// Smallest `K` with `r^K < tolerance` (1 when `r = 0`).
fn truncation_for(r: f64, tolerance: f64) -> usize {
    if r == 0.0 {
        1
    } else {
        (Float::floor(Float::ln(tolerance) / Float::ln(r)) as usize + 1).max(1)
    }
}

/// The fixed modular and crossing parameters `(p, η)`.
///
/// `τ` is kept when the context was built from it; otherwise the principal
/// `log(p)/(2πi)` is used where a `τ` is needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaContext {
    nome: Nome,
    eta: C64,
    tau: Option<C64>,
}

impl ThetaContext {
    /// Builds a context from a nome `p` and the additive crossing parameter `η`.
    pub fn new(p: C64, eta: C64) -> Result<Self> {
        Self::build(Nome::new(p)?, eta, None)
    }

    /// Builds a context from `τ` (with `Im τ > 0`) and `η`.
    pub fn from_tau(tau: C64, eta: C64) -> Result<Self> {
        if tau.im.is_nan() || tau.im <= 0.0 {
            return Err(Error::domain(format!("Im τ = {} must be positive", tau.im)));
        }
        Self::build(Nome::new(e2pi(tau))?, eta, Some(tau))
    }

    /// The trigonometric degeneration `p = 0`.
    pub fn trigonometric(eta: C64) -> Result<Self> {
        Self::new(ZERO, eta)
    }

    pub fn with_tolerance(self, tolerance: f64) -> Result<Self> {
        Self::build(
            Nome::with_tolerance(self.nome.p, tolerance)?,
            self.eta,
            self.tau,
        )
    }

    fn build(nome: Nome, eta: C64, tau: Option<C64>) -> Result<Self> {
        if !(eta.re.is_finite() && eta.im.is_finite()) {
            return Err(Error::domain("η must be finite"));
        }
        let ctx = ThetaContext { nome, eta, tau };
        // η ∈ Z + τZ exactly when q lies in p^Z, i.e. when θ(q) = 0.
        let q = ctx.q();
        if q == ZERO || nome.theta(q)?.norm() <= POLE_EPS {
            return Err(Error::domain("η lies on the lattice Z + τZ"));
        }
        Ok(ctx)
    }

    #[inline]
    pub fn nome(&self) -> &Nome {
        &self.nome
    }

    #[inline]
    pub fn p(&self) -> C64 {
        self.nome.p
    }

    #[inline]
    pub fn eta(&self) -> C64 {
        self.eta
    }

    /// `τ` with `p = e^{2πiτ}`; `None` in the trigonometric case.
    pub fn tau(&self) -> Option<C64> {
        match self.tau {
            Some(t) => Some(t),
            None if self.nome.is_trigonometric() => None,
            None => Some(log_2pi_i(self.nome.p)),
        }
    }

    #[inline]
    pub fn truncation_bound(&self) -> usize {
        self.nome.terms
    }

    /// `q = e^{2πiη}`.
    #[inline]
    pub fn q(&self) -> C64 {
        e2pi(self.eta)
    }

    /// `q^x = e^{2πiηx}`.
    #[inline]
    pub fn q_pow(&self, x: C64) -> C64 {
        e2pi(self.eta * x)
    }

    /// `θ(x;p)`.
    #[inline]
    pub fn theta(&self, x: C64) -> Result<C64> {
        self.nome.theta(x)
    }

    /// `[x] = q^{-x/2} θ(q^x;p)`.
    pub fn bracket(&self, x: C64) -> Result<C64> {
        let ex = self.eta * x;
        let qx = e2pi(ex);
        let pre = epi(-ex);
        if qx == ZERO || !crate::scalar::is_finite(qx) || !crate::scalar::is_finite(pre) {
            return Err(Error::Numeric(format!("[x] overflows at x = {x}")));
        }
        check_finite(pre * self.nome.theta(qx)?, "[x]")
    }

    /// `[x_1, ..., x_n] = [x_1]⋯[x_n]`; the empty product is 1.
    pub fn bracket_product(&self, xs: &[C64]) -> Result<C64> {
        xs.iter()
            .try_fold(ONE, |acc, &x| Ok(acc * self.bracket(x)?))
    }

    /// Real-valued bracket argument convenience.
    #[inline]
    pub fn bracket_re(&self, x: f64) -> Result<C64> {
        self.bracket(c(x, 0.0))
    }

    /// `[x]` evaluated at several points.
    pub fn brackets(&self, xs: &[C64]) -> Result<Vec<C64>> {
        xs.iter().map(|&x| self.bracket(x)).collect()
    }
}

/// `θ(x;p)` for the context's nome.
pub fn theta_mul(x: C64, ctx: &ThetaContext) -> Result<C64> {
    ctx.theta(x)
}

/// `[x]` for the context's parameters.
pub fn bracket(x: C64, ctx: &ThetaContext) -> Result<C64> {
    ctx.bracket(x)
}

/// `[x_1, ..., x_n]`.
pub fn bracket_product(xs: &[C64], ctx: &ThetaContext) -> Result<C64> {
    ctx.bracket_product(xs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rel_diff;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rc(rng: &mut ChaCha8Rng, r: f64) -> C64 {
        c(rng.gen_range(-r..r), rng.gen_range(-r..r))
    }

    #[test]
    fn theta_vanishes_at_one_and_at_p() {
        let ctx = ThetaContext::new(c(0.2, 0.1), c(0.17, 0.0)).unwrap();
        assert_eq!(ctx.theta(ONE).unwrap(), ZERO);
        assert!(ctx.theta(ctx.p()).unwrap().norm() < 1e-16);
    }

    #[test]
    fn theta_at_zero_nome_is_linear() {
        let nome = Nome::new(ZERO).unwrap();
        for x in [c(0.3, 0.2), c(-2.0, 1.0), c(5.0, 0.0)] {
            assert_eq!(nome.theta(x).unwrap(), ONE - x);
        }
        assert_eq!(nome.terms(), 1);
    }

    #[test]
    fn theta_rejects_zero_argument() {
        let nome = Nome::new(c(0.3, 0.0)).unwrap();
        assert!(matches!(nome.theta(ZERO), Err(Error::Domain(_))));
    }

    #[test]
    fn nome_bounds() {
        assert!(Nome::new(c(1.0, 0.0)).is_err());
        assert!(Nome::new(c(0.95, 0.0)).is_err());
        let n = Nome::new(c(0.5, 0.0)).unwrap();
        assert!(0.5f64.powi(n.terms() as i32) < 1e-17);
        assert!(0.5f64.powi(n.terms() as i32 - 1) >= 1e-17);
    }

    #[test]
    fn eta_on_lattice_is_rejected() {
        assert!(ThetaContext::new(c(0.2, 0.0), c(1.0, 0.0)).is_err());
        assert!(ThetaContext::new(ZERO, c(2.0, 0.0)).is_err());
        let tau = c(0.1, 0.8);
        assert!(ThetaContext::from_tau(tau, tau + c(1.0, 0.0)).is_err());
    }

    #[test]
    fn bracket_trigonometric_hand_values() {
        let ctx = ThetaContext::trigonometric(c(1.0 / 6.0, 0.0)).unwrap();
        let b3 = ctx.bracket_re(3.0).unwrap();
        assert!((b3 - c(0.0, -2.0)).norm() < 1e-14, "{b3}");
        let b11 = ctx.bracket_product(&[ONE, ONE]).unwrap();
        assert!((b11 - c(-1.0, 0.0)).norm() < 1e-14, "{b11}");
        assert_eq!(ctx.bracket_product(&[]).unwrap(), ONE);
        assert_eq!(ctx.bracket(ZERO).unwrap(), ZERO);
    }

    #[test]
    fn bracket_is_odd() {
        let ctx = ThetaContext::new(c(0.0, 0.3), c(0.17, 0.02)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let x = rc(&mut rng, 2.0);
            let a = ctx.bracket(x).unwrap();
            let b = ctx.bracket(-x).unwrap();
            assert!(rel_diff(a, -b) < 1e-13);
            let pair = ctx.bracket_product(&[x, -x]).unwrap();
            assert!(rel_diff(pair, -a * a) < 1e-13);
        }
    }

    #[test]
    fn bracket_quasi_periodicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let tau = c(rng.gen_range(-0.5..0.5), rng.gen_range(0.12..0.6));
            let eta = c(rng.gen_range(0.1..0.4), rng.gen_range(-0.05..0.05));
            let ctx = ThetaContext::from_tau(tau, eta).unwrap();
            assert!(ctx.p().norm() <= 0.5);
            for _ in 0..20 {
                let x = rc(&mut rng, 1.5);
                let b = ctx.bracket(x).unwrap();
                let shifted = ctx.bracket(x + ONE / eta).unwrap();
                assert!(rel_diff(shifted, -b) < 1e-9);
                let shifted = ctx.bracket(x + tau / eta).unwrap();
                let factor = -e2pi(-eta * x) * epi(-tau);
                assert!(rel_diff(shifted, factor * b) < 1e-9);
            }
        }
    }

    #[test]
    fn trigonometric_bracket_is_proportional_to_sine() {
        let eta = c(0.23, 0.0);
        let ctx = ThetaContext::trigonometric(eta).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x = rc(&mut rng, 2.0);
            let s = (c(core::f64::consts::PI, 0.0) * eta * x).sin();
            let ratio = ctx.bracket(x).unwrap() / s;
            assert!((ratio - c(0.0, -2.0)).norm() < 1e-12, "{ratio}");
        }
    }

    #[test]
    fn overflow_is_reported() {
        let ctx = ThetaContext::new(c(0.3, 0.0), c(0.2, 0.0)).unwrap();
        let r = ctx.bracket(c(0.0, 1e4));
        assert!(matches!(r, Err(Error::Numeric(_))), "{r:?}");
    }

    #[test]
    fn euler_product_at_zero() {
        assert_eq!(Nome::new(ZERO).unwrap().euler(), ONE);
        let n = Nome::new(c(0.1, 0.0)).unwrap();
        // (p;p)_∞ via the pentagonal number series 1 - p - p^2 + p^5 + p^7 - ...
        let p = 0.1f64;
        let series = 1.0 - p - p.powi(2) + p.powi(5) + p.powi(7) - p.powi(12) - p.powi(15);
        assert!((n.euler().re - series).abs() < 1e-15);
    }
}

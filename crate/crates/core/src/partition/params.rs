use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{c, log_2pi_i, C64, ZERO};
use crate::theta::ThetaContext;

/// Spectral parameters in the additive convention: `Z_n(x; y; λ)`, with the
/// auxiliary `γ` used by the determinant-sum formulas.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveParams {
    pub x: Vec<C64>,
    pub y: Vec<C64>,
    pub lambda: C64,
    pub gamma: Option<C64>,
}

/// Spectral parameters in the multiplicative convention `x ↦ q^x`:
/// arguments of `Z̃_n(x; y; λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicativeParams {
    pub x: Vec<C64>,
    pub y: Vec<C64>,
    pub lambda: C64,
    pub gamma: Option<C64>,
}

fn check_lengths(x: &[C64], y: &[C64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Validation(format!(
            "x has {} entries but y has {}",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

impl AdditiveParams {
    pub fn new(x: Vec<C64>, y: Vec<C64>, lambda: C64) -> Result<Self> {
        check_lengths(&x, &y)?;
        Ok(AdditiveParams {
            x,
            y,
            lambda,
            gamma: None,
        })
    }

    pub fn with_gamma(mut self, gamma: C64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// `|x| = x_1 + ⋯ + x_n`.
    pub fn x_sum(&self) -> C64 {
        self.x.iter().sum()
    }

    /// `|y| = y_1 + ⋯ + y_n`.
    pub fn y_sum(&self) -> C64 {
        self.y.iter().sum()
    }

    pub fn gamma(&self) -> Result<C64> {
        self.gamma
            .ok_or_else(|| Error::domain("this formula needs the auxiliary parameter γ"))
    }

    /// `x ↦ q^x` on every variable, `γ` included.
    pub fn to_multiplicative(&self, ctx: &ThetaContext) -> MultiplicativeParams {
        MultiplicativeParams {
            x: self.x.iter().map(|&v| ctx.q_pow(v)).collect(),
            y: self.y.iter().map(|&v| ctx.q_pow(v)).collect(),
            lambda: ctx.q_pow(self.lambda),
            gamma: self.gamma.map(|g| ctx.q_pow(g)),
        }
    }

    /// Drops `x_1` and `y_1`.
    pub fn tail(&self) -> AdditiveParams {
        AdditiveParams {
            x: self.x[1..].to_vec(),
            y: self.y[1..].to_vec(),
            lambda: self.lambda,
            gamma: self.gamma,
        }
    }
}

impl MultiplicativeParams {
    pub fn new(x: Vec<C64>, y: Vec<C64>, lambda: C64) -> Result<Self> {
        check_lengths(&x, &y)?;
        if x.iter().chain(y.iter()).any(|&v| v == ZERO) {
            return Err(Error::domain("multiplicative x and y must be nonzero"));
        }
        Ok(MultiplicativeParams {
            x,
            y,
            lambda,
            gamma: None,
        })
    }

    pub fn with_gamma(mut self, gamma: C64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// `X = x_1 ⋯ x_n`.
    pub fn x_prod(&self) -> C64 {
        self.x.iter().product()
    }

    /// `Y = y_1 ⋯ y_n`.
    pub fn y_prod(&self) -> C64 {
        self.y.iter().product()
    }

    pub fn gamma(&self) -> Result<C64> {
        self.gamma
            .ok_or_else(|| Error::domain("this formula needs the auxiliary parameter γ"))
    }

    /// The principal additive preimage `log(·)/(2πiη)`.
    pub fn to_additive(&self, ctx: &ThetaContext) -> Result<AdditiveParams> {
        let pre = |v: C64, what: &str| -> Result<C64> {
            if v == ZERO {
                return Err(Error::domain(format!(
                    "{what} = 0 has no additive preimage"
                )));
            }
            Ok(log_2pi_i(v) / ctx.eta())
        };
        Ok(AdditiveParams {
            x: self.x.iter().map(|&v| pre(v, "x")).collect::<Result<_>>()?,
            y: self.y.iter().map(|&v| pre(v, "y")).collect::<Result<_>>()?,
            lambda: pre(self.lambda, "λ")?,
            gamma: self.gamma.map(|g| pre(g, "γ")).transpose()?,
        })
    }
}

/// Draws additive parameters uniformly from a box in `C` and rejects draws
/// that come close to the pole divisor of any evaluator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSampler {
    /// Real parts lie in `[−re_radius, re_radius]`.
    pub re_radius: f64,
    /// Imaginary parts lie in `[−im_radius, im_radius]`.
    pub im_radius: f64,
    /// Smallest admissible modulus of a precondition bracket.
    pub margin: f64,
    pub max_attempts: usize,
}

impl Default for ParamSampler {
    fn default() -> Self {
        ParamSampler {
            re_radius: 1.0,
            im_radius: 0.5,
            margin: 1e-6,
            max_attempts: 10_000,
        }
    }
}

impl ParamSampler {
    fn point<R: Rng + ?Sized>(&self, rng: &mut R) -> C64 {
        c(
            rng.gen_range(-self.re_radius..=self.re_radius),
            rng.gen_range(-self.im_radius..=self.im_radius),
        )
    }

    /// Samples `x, y ∈ C^n`, `λ` and `γ` off the pole divisor.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        n: usize,
        ctx: &ThetaContext,
        rng: &mut R,
    ) -> Result<AdditiveParams> {
        for _ in 0..self.max_attempts {
            let x = (0..n).map(|_| self.point(rng)).collect();
            let y = (0..n).map(|_| self.point(rng)).collect();
            let params = AdditiveParams::new(x, y, self.point(rng))?.with_gamma(self.point(rng));
            if is_generic(&params, ctx, self.margin) {
                return Ok(params);
            }
        }
        Err(Error::Numeric(format!(
            "no generic parameter point found in {} attempts",
            self.max_attempts
        )))
    }

    /// Resamples only `γ` for fixed `x, y, λ`.
    pub fn resample_gamma<R: Rng + ?Sized>(
        &self,
        params: &AdditiveParams,
        ctx: &ThetaContext,
        rng: &mut R,
    ) -> Result<AdditiveParams> {
        for _ in 0..self.max_attempts {
            let candidate = params.clone().with_gamma(self.point(rng));
            if is_generic(&candidate, ctx, self.margin) {
                return Ok(candidate);
            }
        }
        Err(Error::Numeric("no generic γ found".into()))
    }
}

/// True when every bracket that appears in a denominator of some evaluator has
/// modulus at least `margin`.
pub fn is_generic(params: &AdditiveParams, ctx: &ThetaContext, margin: f64) -> bool {
    let ok = |z: C64| ctx.bracket(z).map(|b| b.norm() >= margin).unwrap_or(false);
    let n = params.n();
    let one = c(1.0, 0.0);
    if !ok(one) {
        return false;
    }
    for k in -1..=(2 * n as i64 + 1) {
        if !ok(params.lambda + c(k as f64, 0.0)) {
            return false;
        }
    }
    for i in 0..n {
        for j in 0..n {
            for s in [-1.0, 0.0, 1.0] {
                if !ok(params.x[i] - params.y[j] + c(s, 0.0)) {
                    return false;
                }
                if i != j
                    && (!ok(params.x[i] - params.x[j] + c(s, 0.0))
                        || !ok(params.y[i] - params.y[j] + c(s, 0.0)))
                {
                    return false;
                }
            }
        }
    }
    if let Some(g) = params.gamma {
        let shift = params.x_sum() - params.y_sum() + params.lambda + g + c(n as f64, 0.0);
        if !ok(g) || !ok(shift) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rel_diff;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn conversion_round_trip() {
        let ctx = ThetaContext::new(c(0.1, 0.1), c(0.2, 0.01)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = ParamSampler::default().sample(3, &ctx, &mut rng).unwrap();
        let m = a.to_multiplicative(&ctx);
        let back = m.to_additive(&ctx).unwrap().to_multiplicative(&ctx);
        for (u, v) in m.x.iter().zip(&back.x) {
            assert!(rel_diff(*u, *v) < 1e-13);
        }
        assert!(rel_diff(m.lambda, back.lambda) < 1e-13);
    }

    #[test]
    fn mismatched_lengths_rejected() {
        assert!(AdditiveParams::new(alloc::vec![ZERO], alloc::vec![], ZERO).is_err());
        assert!(
            MultiplicativeParams::new(alloc::vec![ZERO], alloc::vec![c(1.0, 0.0)], ZERO).is_err()
        );
    }

    #[test]
    fn sampler_respects_margin() {
        let ctx = ThetaContext::new(c(0.3, 0.0), c(0.25, 0.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let s = ParamSampler::default();
        for _ in 0..10 {
            let p = s.sample(3, &ctx, &mut rng).unwrap();
            assert!(is_generic(&p, &ctx, s.margin));
        }
    }
}

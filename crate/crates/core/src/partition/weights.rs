use alloc::format;
use alloc::vec::Vec;

use super::params::{AdditiveParams, MultiplicativeParams};
use crate::error::{Error, Result};
use crate::scalar::{c, checked_div, checked_div_by, C64, ONE, RESOLVABLE_CONDITION, ZERO};
use crate::state_space::{BlockKind, HeightMatrix, StateIter};
use crate::theta::ThetaContext;

/// The local weight `R^{..}_{..}(λ, u)` for one kind of block, with the
/// dynamical parameter already shifted by the block's corner height.
pub fn boltzmann_weight(kind: BlockKind, lambda: C64, u: C64, ctx: &ThetaContext) -> Result<C64> {
    let one = ctx.bracket(ONE)?;
    let lam = ctx.bracket(lambda)?;
    let name_lam = || format!("[λ + a] at λ + a = {lambda}");
    Ok(match kind {
        BlockKind::UpUp | BlockKind::DownDown => checked_div(ctx.bracket(u + 1.0)?, one, "[1]")?,
        BlockKind::PlusMinusPlusMinus => checked_div_by(
            ctx.bracket(u)? * ctx.bracket(lambda + 1.0)?,
            &[one, lam],
            &name_lam(),
        )?,
        BlockKind::MinusPlusMinusPlus => checked_div_by(
            ctx.bracket(u)? * ctx.bracket(lambda - 1.0)?,
            &[one, lam],
            &name_lam(),
        )?,
        BlockKind::MinusPlusPlusMinus => checked_div(ctx.bracket(lambda + u)?, lam, &name_lam())?,
        BlockKind::PlusMinusMinusPlus => checked_div(ctx.bracket(lambda - u)?, lam, &name_lam())?,
    })
}

/// Precomputed local weights for every block position, block kind and
/// corner height `0..=n`. Entries whose denominator vanishes are stored as
/// errors and only reported if a state actually uses them.
#[derive(Debug, Clone)]
pub struct WeightTable {
    n: usize,
    entries: Vec<Result<C64>>,
    scale: C64,
}

/// A sum together with the sum of the moduli of its terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackedSum {
    pub value: C64,
    pub magnitude: f64,
}

impl TrackedSum {
    /// A value with no cancellation behind it.
    pub fn exact(value: C64) -> Self {
        TrackedSum {
            value,
            magnitude: value.norm(),
        }
    }

    /// Sums `terms`, tracking their moduli.
    pub fn of(terms: impl IntoIterator<Item = C64>) -> Self {
        terms
            .into_iter()
            .fold(TrackedSum::exact(ZERO), |acc, t| TrackedSum {
                value: acc.value + t,
                magnitude: acc.magnitude + t.norm(),
            })
    }

    /// `scale · sum`, with `|scale| · magnitude` as the magnitude.
    pub fn scaled(scale: C64, sum: C64, magnitude: f64) -> Self {
        TrackedSum {
            value: scale * sum,
            magnitude: scale.norm() * magnitude,
        }
    }

    /// `Σ |w| / |Σ w|`: the factor by which rounding in the terms is amplified.
    pub fn condition(&self) -> f64 {
        self.magnitude / self.value.norm()
    }

    /// The value, or [`Error::Unresolved`] past [`RESOLVABLE_CONDITION`].
    pub fn resolved(&self) -> Result<C64> {
        let condition = self.condition();
        if condition <= RESOLVABLE_CONDITION {
            Ok(self.value)
        } else {
            Err(Error::Unresolved { condition })
        }
    }
}

impl WeightTable {
    /// Builds the table from `f(i, j, kind, a)`; the state sum is multiplied
    /// by `scale`.
    pub fn build(
        n: usize,
        scale: C64,
        mut f: impl FnMut(usize, usize, BlockKind, usize) -> Result<C64>,
    ) -> Self {
        let mut entries = Vec::with_capacity(n * n * 6 * (n + 1));
        for i in 0..n {
            for j in 0..n {
                for kind in BlockKind::ALL {
                    for a in 0..=n {
                        entries.push(f(i, j, kind, a));
                    }
                }
            }
        }
        WeightTable { n, entries, scale }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize, kind: BlockKind, a: usize) -> usize {
        ((i * self.n + j) * 6 + kind.index()) * (self.n + 1) + a
    }

    pub fn get(&self, i: usize, j: usize, kind: BlockKind, a: usize) -> Result<C64> {
        self.entries[self.slot(i, j, kind, a)].clone()
    }

    /// Product of the local weights of one state (without the overall scale).
    pub fn state_weight(&self, h: &HeightMatrix) -> Result<C64> {
        let mut w = ONE;
        for i in 0..self.n {
            for j in 0..self.n {
                let a = h.get(i, j) as usize;
                match &self.entries[self.slot(i, j, h.block_kind(i, j), a)] {
                    Ok(v) => w *= v,
                    Err(e) => return Err(e.clone()),
                }
            }
        }
        Ok(w)
    }

    /// Scaled sum of state weights over an arbitrary collection of states.
    pub fn sum<I: IntoIterator<Item = HeightMatrix>>(&self, states: I) -> Result<C64> {
        Ok(self.sum_tracked(states)?.value)
    }

    /// Like [`WeightTable::sum`], also accumulating `Σ |weight|`.
    pub fn sum_tracked<I: IntoIterator<Item = HeightMatrix>>(
        &self,
        states: I,
    ) -> Result<TrackedSum> {
        let mut acc = c(0.0, 0.0);
        let mut magnitude = 0.0;
        for h in states {
            let w = self.state_weight(&h)?;
            acc += w;
            magnitude += w.norm();
        }
        Ok(TrackedSum::scaled(self.scale, acc, magnitude))
    }

    /// Sum over all states; `Z_0 = 1` by convention.
    pub fn sum_all(&self) -> Result<C64> {
        Ok(self.sum_all_tracked()?.value)
    }

    pub fn sum_all_tracked(&self) -> Result<TrackedSum> {
        if self.n == 0 {
            return Ok(TrackedSum::exact(self.scale));
        }
        self.sum_tracked(StateIter::new(self.n)?)
    }

    /// Sum over the states whose first ASM row has its `1` in column `k`
    /// (1-based). The `n` partial sums add up to [`WeightTable::sum_all`].
    pub fn sum_partition(&self, k: usize) -> Result<C64> {
        self.sum(StateIter::with_first_row_one_at(self.n, k)?)
    }
}

/// Weights of `Z_n(x; y; λ)`: block `(i, j)` with corner `a` carries
/// `R(λ + a, x_i − y_j)`.
pub fn additive_weights(params: &AdditiveParams, ctx: &ThetaContext) -> Result<WeightTable> {
    let n = params.n();
    let one = ctx.bracket(ONE)?;
    let lam: Vec<C64> = (-1..=n as i64 + 1)
        .map(|a| ctx.bracket(params.lambda + a as f64))
        .collect::<Result<_>>()?;
    let lam_at = |a: i64| lam[(a + 1) as usize];
    let mut u = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let d = params.x[i] - params.y[j];
            u.push((d, ctx.bracket(d)?, ctx.bracket(d + 1.0)?));
        }
    }
    let mut plus_u = Vec::with_capacity(n * n * (n + 1));
    let mut minus_u = Vec::with_capacity(n * n * (n + 1));
    for &(d, _, _) in &u {
        for a in 0..=n {
            plus_u.push(ctx.bracket(params.lambda + a as f64 + d)?);
            minus_u.push(ctx.bracket(params.lambda + a as f64 - d)?);
        }
    }
    Ok(WeightTable::build(n, ONE, |i, j, kind, a| {
        let (_, bu, bu1) = u[i * n + j];
        let la = lam_at(a as i64);
        let lam_name = || format!("[λ + {a}]");
        match kind {
            BlockKind::UpUp | BlockKind::DownDown => checked_div(bu1, one, "[1]"),
            BlockKind::PlusMinusPlusMinus => {
                checked_div_by(bu * lam_at(a as i64 + 1), &[one, la], &lam_name())
            }
            BlockKind::MinusPlusMinusPlus => {
                checked_div_by(bu * lam_at(a as i64 - 1), &[one, la], &lam_name())
            }
            BlockKind::MinusPlusPlusMinus => {
                checked_div(plus_u[(i * n + j) * (n + 1) + a], la, &lam_name())
            }
            BlockKind::PlusMinusMinusPlus => {
                checked_div(minus_u[(i * n + j) * (n + 1) + a], la, &lam_name())
            }
        }
    }))
}

/// Weights of `Z̃_n(x; y; λ)` in multiplicative variables. With `U = x_i/y_j`
/// and `Λ = λq^a` the six kinds carry
/// `θ(qU)/θ(q)`, `θ(U)θ(qΛ)/(θ(q)θ(Λ))`, `qθ(U)θ(Λ/q)/(θ(q)θ(Λ))`,
/// `θ(ΛU)/θ(Λ)` and `Uθ(Λ/U)/θ(Λ)`; the state sum is scaled by `Y^n`.
/// These are the additive weights times `q^{(x_i+y_j)/2}`, regrouped so
/// that no square root of `q` is needed.
pub fn multiplicative_weights(
    params: &MultiplicativeParams,
    ctx: &ThetaContext,
) -> Result<WeightTable> {
    let n = params.n();
    let q = ctx.q();
    let th_q = ctx.theta(q)?;
    let lam: Vec<C64> = (-1..=n as i64 + 1)
        .map(|a| params.lambda * ctx.q_pow(c(a as f64, 0.0)))
        .collect();
    let lam_at = |a: i64| lam[(a + 1) as usize];
    let th_lam: Vec<Result<C64>> = lam.iter().map(|&l| ctx.theta(l)).collect();
    let th_lam_at = |a: i64| th_lam[(a + 1) as usize].clone();
    let mut ratio = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let r = params.x[i] / params.y[j];
            ratio.push((r, ctx.theta(r)?, ctx.theta(q * r)?));
        }
    }
    let scale = crate::scalar::powi(params.y_prod(), n as i64);
    Ok(WeightTable::build(n, scale, |i, j, kind, a| {
        let (r, th_r, th_qr) = ratio[i * n + j];
        let a = a as i64;
        let lam_name = || format!("θ(λq^{a})");
        match kind {
            BlockKind::UpUp | BlockKind::DownDown => checked_div(th_qr, th_q, "θ(q)"),
            BlockKind::PlusMinusPlusMinus => checked_div_by(
                th_r * th_lam_at(a + 1)?,
                &[th_q, th_lam_at(a)?],
                &lam_name(),
            ),
            BlockKind::MinusPlusMinusPlus => checked_div_by(
                q * th_r * th_lam_at(a - 1)?,
                &[th_q, th_lam_at(a)?],
                &lam_name(),
            ),
            BlockKind::MinusPlusPlusMinus => {
                checked_div(ctx.theta(lam_at(a) * r)?, th_lam_at(a)?, &lam_name())
            }
            BlockKind::PlusMinusMinusPlus => {
                checked_div(r * ctx.theta(lam_at(a) / r)?, th_lam_at(a)?, &lam_name())
            }
        }
    }))
}

//! Spectral norm `||S||_σ = max |<S, u>|` over unit simple tensors and the
//! tuple norm `[S]_α`. Lower bounds come from a monotone multistart ascent
//! and carry a unit simple witness; upper bounds come from single-mode
//! flattenings, which are sound because a unit simple tensor flattens to a
//! unit rank-one matrix.

mod ascent;
mod brute;
mod config;
mod exponent;

pub use brute::{brute_force_spectral, brute_force_spectral_converged, BRUTE_FORCE_MAX_DIM};
pub use config::{NormBracket, SolverConfig, UpperMethod, Witness, BRACKET_SLACK};
pub use exponent::Exponent;

pub(crate) use ascent::{ascend, mode_matrix};

use crate::error::{Error, Result};
use crate::linalg::sigma_max;
use crate::tensor::{DenseTensor, SimpleTensor, TensorTuple, C64};

/// Lower end of a spectral or `[·]_α` bracket.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLower {
    pub value: f64,
    /// Unit simple maximizer; `None` for the zero tensor.
    pub witness: Option<SimpleTensor>,
    pub iterations: usize,
    pub converged: bool,
    /// Objective per sweep of the winning start.
    pub trace: Vec<f64>,
}

impl SpectralLower {
    fn zero() -> Self {
        Self { value: 0.0, witness: None, iterations: 0, converged: true, trace: vec![0.0] }
    }
}

fn lower_from_members(members: &[DenseTensor], alpha: Exponent, cfg: &SolverConfig) -> Result<SpectralLower> {
    if members.iter().all(DenseTensor::is_zero) {
        return Ok(SpectralLower::zero());
    }
    let best = ascent::best_of(members, alpha, cfg)?;
    let space = members[0].space().clone();
    let mut u = SimpleTensor::unit_from_factors(space, best.factors)?;
    if members.len() == 1 {
        let ip = u.inner_with(&members[0])?;
        if ip.norm() > 0.0 {
            let phase = u.phase() * (ip / ip.norm());
            u = u.with_phase(phase);
        }
    }
    Ok(SpectralLower {
        value: best.value,
        witness: Some(u),
        iterations: best.iterations,
        converged: best.converged,
        trace: best.trace,
    })
}

/// Best ascent value over all starts, with its unit simple witness `u`;
/// `<S, u>` is real and nonnegative.
pub fn spectral_lower(s: &DenseTensor, cfg: &SolverConfig) -> Result<SpectralLower> {
    cfg.validate()?;
    lower_from_members(std::slice::from_ref(s), Exponent::TWO, cfg)
}

/// Largest singular value of every single-mode flattening, in mode order.
/// For `d = 1` this is the Frobenius norm.
pub fn mode_upper_bounds(s: &DenseTensor) -> Vec<f64> {
    if s.space().order() == 1 {
        return vec![s.norm()];
    }
    (0..s.space().order()).map(|e| sigma_max(&mode_matrix(s, e))).collect()
}

/// Minimum over single-mode flattenings of the largest singular value.
pub fn spectral_upper(s: &DenseTensor) -> f64 {
    mode_upper_bounds(s).into_iter().fold(f64::INFINITY, f64::min)
}

pub fn spectral_bracket(s: &DenseTensor, cfg: &SolverConfig) -> Result<NormBracket> {
    let lo = spectral_lower(s, cfg)?;
    let upper = spectral_upper(s);
    Ok(NormBracket {
        lower: lo.value.min(upper),
        upper,
        lower_witness: lo.witness.map(Witness::Simple),
        upper_method: if s.is_zero() { UpperMethod::Exact } else { UpperMethod::Flattening },
        iterations: lo.iterations,
        converged: lo.converged,
    }
    .checked())
}

/// `(sum_i |<S_i, u>|^α)^(1/α)` at a unit simple `u`.
pub fn tuple_alpha_value(s: &TensorTuple, u: &SimpleTensor, alpha: Exponent) -> Result<f64> {
    let vals: Vec<C64> = s.members().iter().map(|m| u.inner_with(m)).collect::<Result<_>>()?;
    Ok(alpha.norm_c(&vals) * u.scale())
}

/// Lower end of `[S]_α`. For `α = ∞` this is the best member spectral lower.
pub fn tuple_alpha_lower(s: &TensorTuple, cfg: &SolverConfig) -> Result<SpectralLower> {
    let alpha = cfg.resolved_alpha()?;
    if alpha.is_infinite() && s.len() > 1 {
        let mut best: Option<SpectralLower> = None;
        for m in s.members() {
            let lo = spectral_lower(m, cfg)?;
            if best.as_ref().is_none_or(|b| lo.value > b.value) {
                best = Some(lo);
            }
        }
        return Ok(best.expect("tuples are nonempty"));
    }
    lower_from_members(s.members(), alpha, cfg)
}

/// `(sum_i spectral_upper(S_i)^α)^(1/α)`, or the max for `α = ∞`.
pub fn tuple_alpha_upper(s: &TensorTuple, alpha: Exponent) -> f64 {
    let ups: Vec<f64> = s.members().iter().map(spectral_upper).collect();
    alpha.norm(&ups)
}

/// Per-mode Hölder bounds `U_e = ||(σ_e(S_i))_i||_α`; each is ≥ `[S]_α`.
pub fn tuple_alpha_mode_uppers(s: &TensorTuple, alpha: Exponent) -> Vec<f64> {
    let per: Vec<Vec<f64>> = s.members().iter().map(mode_upper_bounds).collect();
    (0..per[0].len())
        .map(|e| alpha.norm(&per.iter().map(|p| p[e]).collect::<Vec<_>>()))
        .collect()
}

pub fn tuple_alpha(s: &TensorTuple, cfg: &SolverConfig) -> Result<NormBracket> {
    let alpha = cfg.resolved_alpha()?;
    let lo = tuple_alpha_lower(s, cfg)?;
    let upper = tuple_alpha_upper(s, alpha);
    let method = if s.is_zero() {
        UpperMethod::Exact
    } else if s.len() == 1 {
        UpperMethod::Flattening
    } else {
        UpperMethod::HolderFlattening
    };
    Ok(NormBracket {
        lower: lo.value.min(upper),
        upper,
        lower_witness: lo.witness.map(Witness::Simple),
        upper_method: method,
        iterations: lo.iterations,
        converged: lo.converged,
    }
    .checked())
}

pub(crate) fn ensure_nonzero(t: &TensorTuple) -> Result<()> {
    if t.is_zero() {
        Err(Error::ZeroWitness)
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests;

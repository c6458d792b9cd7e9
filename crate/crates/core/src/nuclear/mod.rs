//! Nuclear norm `||S||★` and the tuple norm `[S]_β★`: upper bounds from
//! explicit atomic decompositions, lower bounds from dual witnesses
//! `|<S, W>| / upper(W)`, and the witnesses that make the `[·]_α` / `[·]_β★`
//! duality tight.

mod certificate;
mod decomposition;
mod prox;
mod solver;

pub use certificate::{check_certificate, AtomRecord, Certificate, CertificateCheck, NormKind};
pub use decomposition::{caratheodory_max_atoms, nuclear_envelope, Decomposition, TupleDecomposition};

use crate::error::{Error, Result};
use crate::spectral::{spectral_upper, tuple_alpha_upper, Exponent, NormBracket, SolverConfig, UpperMethod, Witness};
use crate::tensor::{DenseTensor, Field, SimpleTensor, TensorTuple, C64};

/// Result of a nuclear or `[·]_β★` solve: the bracket and the decomposition
/// certifying its upper end.
#[derive(Debug, Clone)]
pub struct NuclearSolution {
    pub bracket: NormBracket,
    pub decomposition: TupleDecomposition,
    /// Penalized objective per oracle step, one list per penalty round.
    pub trace: Vec<Vec<f64>>,
}

fn bracket_of(s: solver::Solved) -> NuclearSolution {
    let upper = s.decomposition.upper();
    let exact = s.decomposition.is_empty();
    NuclearSolution {
        bracket: NormBracket {
            lower: s.lower.min(upper),
            upper,
            lower_witness: s.witness.map(Witness::Dual),
            upper_method: if exact { UpperMethod::Exact } else { UpperMethod::Decomposition },
            iterations: s.iterations,
            converged: s.converged,
        }
        .checked(),
        decomposition: s.decomposition,
        trace: s.trace,
    }
}

pub fn nuclear_bracket(s: &DenseTensor, cfg: &SolverConfig) -> Result<NuclearSolution> {
    cfg.validate()?;
    Ok(bracket_of(solver::solve(&TensorTuple::single(s.clone()), Exponent::ONE, cfg)?))
}

/// Certified upper bound `cost + envelope(residual)` with its decomposition.
pub fn nuclear_upper(s: &DenseTensor, cfg: &SolverConfig) -> Result<(f64, Decomposition)> {
    let sol = nuclear_bracket(s, cfg)?;
    Ok((sol.bracket.upper, Decomposition::from(sol.decomposition)))
}

/// `|<S, T>| / spectral_upper(T)`, with `T = S` by default.
pub fn nuclear_lower(s: &DenseTensor, witness: Option<&DenseTensor>) -> Result<f64> {
    let t = witness.unwrap_or(s);
    s.space().ensure_same(t.space())?;
    if t.is_zero() {
        return if witness.is_none() { Ok(0.0) } else { Err(Error::ZeroWitness) };
    }
    Ok(s.inner(t)?.norm() / spectral_upper(t))
}

pub fn tuple_beta_star(s: &TensorTuple, cfg: &SolverConfig) -> Result<NuclearSolution> {
    let beta = cfg.resolved_beta()?;
    Ok(bracket_of(solver::solve(s, beta, cfg)?))
}

pub fn tuple_beta_star_upper(s: &TensorTuple, cfg: &SolverConfig) -> Result<(f64, TupleDecomposition)> {
    let sol = tuple_beta_star(s, cfg)?;
    Ok((sol.bracket.upper, sol.decomposition))
}

/// `|sum_i <S_i, T_i>| / upper([T]_α)` for the conjugate `α` of `β`.
pub fn tuple_beta_star_lower(s: &TensorTuple, witness: &TensorTuple, cfg: &SolverConfig) -> Result<f64> {
    let alpha = cfg.resolved_alpha()?;
    if witness.len() != s.len() {
        return Err(Error::DimensionMismatch(format!(
            "witness has {} members, tuple has {}",
            witness.len(),
            s.len()
        )));
    }
    crate::spectral::ensure_nonzero(witness)?;
    Ok(s.inner(witness)?.norm() / tuple_alpha_upper(witness, alpha))
}

fn phase_of(x: C64) -> C64 {
    if x.norm() == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        x / x.norm()
    }
}

/// Coefficients `k_i` of the dual tuple `T_i = k_i u` attaining
/// `<S, T> = [S]_α [T]_β★` at a maximizer `u`, with `a_i = <S_i, u>`:
/// `k_i = |a_i|^(α-2) a_i` for `1 < α < ∞`, the phase of `a_i` for `α = 1`,
/// and `a_k` on the first largest `|a_k|` for `α = ∞`.
fn witness_coefficients(a: &[C64], alpha: Exponent) -> Vec<C64> {
    if alpha == Exponent::ONE {
        return a.iter().map(|&x| phase_of(x)).collect();
    }
    if alpha.is_infinite() {
        let mut k = 0;
        for (i, x) in a.iter().enumerate() {
            if x.norm() > a[k].norm() {
                k = i;
            }
        }
        let mut out = vec![C64::new(0.0, 0.0); a.len()];
        out[k] = a[k];
        return out;
    }
    a.iter()
        .map(|&x| if x.norm() == 0.0 { x } else { x * x.norm().powf(alpha.value() - 2.0) })
        .collect()
}

/// The dual tuple `T_i = k_i u` with `<S_i, T_i> = |<S_i, u>|^α` real and
/// nonnegative for finite `α`, so that `<S, T> = f(u) · f(u)^(α-1)`.
pub fn duality_witness_construct(s: &TensorTuple, u: &SimpleTensor, alpha: Exponent) -> Result<TensorTuple> {
    Ok(duality_witness_decomposition(s, u, alpha)?.reconstruct_tuple())
}

/// The same witness as a one-atom decomposition; its cost is
/// `f(u)^(α-1)` (`max_i |<S_i, u>|` for `α = ∞`, 1 for `α = 1`).
pub fn duality_witness_decomposition(s: &TensorTuple, u: &SimpleTensor, alpha: Exponent) -> Result<TupleDecomposition> {
    if !u.is_unit() {
        return Err(Error::NotUnit(format!("witness direction has scale {}", u.scale())));
    }
    s.space().ensure_same(u.space())?;
    let a: Vec<C64> = s.members().iter().map(|m| u.inner_with(m)).collect::<Result<_>>()?;
    let mut k = witness_coefficients(&a, alpha);
    if s.space().field() == Field::Real {
        k.iter_mut().for_each(|x| x.im = 0.0);
    }
    let mut d = TupleDecomposition::empty(s.space().clone(), s.len(), alpha.conjugate());
    d.push_column(u.clone(), k);
    Ok(d)
}

impl TupleDecomposition {
    /// The tuple `(sum_j l_{i,j} a_j)_i` represented by the atoms.
    pub fn reconstruct_tuple(&self) -> TensorTuple {
        TensorTuple::new(self.reconstruct()).expect("at least one member")
    }
}

#[cfg(test)]
mod tests;

//! Block ascent for `max over unit u = u(1) ⊗ ... ⊗ u(d) of ||(<S_i, u>)_i||_alpha`.
//!
//! Each sweep fixes the Hölder-dual weights `w` of the current values
//! `a_i = <S_i, u>`, so that `Re sum_i w_i <S_i, u>` touches the objective at
//! `u` and lies below it everywhere else. Maximizing that linear functional
//! one factor at a time has the closed form `u_e = c / ||c||` with `c` the
//! mode-e contraction of `sum_i w_i S_i`. Each step can only raise the
//! objective, so the sequence is monotone for every alpha.

use super::{Exponent, SolverConfig};
use crate::error::Result;
use crate::exec;
use crate::linalg::{svd, Mat};
use crate::tensor::{contract_all, contract_except, mix_seed, random_factor, vec_norm, DenseTensor, C64, ZERO};

pub(crate) struct Ascent {
    pub value: f64,
    pub factors: Vec<Vec<C64>>,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after every sweep, starting with the initial point.
    pub trace: Vec<f64>,
}

fn values(members: &[DenseTensor], factors: &[Vec<C64>]) -> Vec<C64> {
    members.iter().map(|s| contract_all(s, factors)).collect()
}

fn normalized(mut factors: Vec<Vec<C64>>) -> Vec<Vec<C64>> {
    for f in &mut factors {
        let n = vec_norm(f);
        if n > 0.0 && n.is_finite() {
            f.iter_mut().for_each(|x| *x /= n);
        } else {
            f.iter_mut().for_each(|x| *x = ZERO);
            f[0] = C64::new(1.0, 0.0);
        }
    }
    factors
}

pub(crate) fn ascend(
    members: &[DenseTensor],
    alpha: Exponent,
    start: Vec<Vec<C64>>,
    max_iters: usize,
    rel_tol: f64,
) -> Ascent {
    let mut u = normalized(start);
    let d = u.len();
    let mut a = values(members, &u);
    let mut value = alpha.norm_c(&a);
    let mut trace = vec![value];
    let mut iterations = 0;
    let mut converged = false;
    let mut combined = DenseTensor::zeros(members[0].space().clone());
    for it in 1..=max_iters {
        let c: &DenseTensor = if members.len() == 1 {
            &members[0]
        } else {
            let w = alpha.holder_dual(&a);
            combined.scale_mut(ZERO);
            for (wi, s) in w.iter().zip(members) {
                if *wi != ZERO {
                    combined.axpy(*wi, s);
                }
            }
            &combined
        };
        for e in 0..d {
            let g = contract_except(c, &u, e);
            let n = vec_norm(&g);
            if n > 0.0 {
                u[e] = g.into_iter().map(|x| x / n).collect();
            }
        }
        a = values(members, &u);
        let next = alpha.norm_c(&a);
        debug_assert!(
            next >= value - 1e-12 * (1.0 + value),
            "ascent decreased: {value} -> {next}"
        );
        iterations = it;
        let done = (next - value).abs() <= rel_tol * next.max(f64::MIN_POSITIVE);
        value = next.max(value);
        trace.push(next);
        if done {
            converged = true;
            break;
        }
    }
    Ascent { value: alpha.norm_c(&a), factors: u, iterations, converged, trace }
}

/// Mode-e flattening of `s` as an `n_e x (N / n_e)` matrix; a column for `d = 1`.
pub(crate) fn mode_matrix(s: &DenseTensor, e: usize) -> Mat {
    let dims = s.space().dims();
    if dims.len() == 1 {
        return Mat::from_rows(dims[0], 1, s.data().to_vec());
    }
    let flat = s.flatten(&[e]).expect("single mode is a proper subset");
    Mat::from_tensor(&flat).expect("flattening is order 2")
}

/// Leading left singular vectors of the concatenated mode flattenings.
pub(crate) fn structured_start(members: &[DenseTensor]) -> Vec<Vec<C64>> {
    let dims = members[0].space().dims().to_vec();
    (0..dims.len())
        .map(|e| {
            let mut cols = Vec::new();
            for s in members {
                let m = mode_matrix(s, e);
                cols.extend((0..m.cols()).map(|j| m.column(j)));
            }
            svd(&Mat::from_columns(dims[e], &cols)).u.swap_remove(0)
        })
        .collect()
}

/// All starts in their fixed order: seeded gaussian, structured, then warm.
pub(crate) fn starts(members: &[DenseTensor], cfg: &SolverConfig) -> Result<Vec<Vec<Vec<C64>>>> {
    let space = members[0].space();
    let mut out: Vec<Vec<Vec<C64>>> = (0..cfg.num_starts)
        .map(|k| random_factor(space, mix_seed(cfg.base_seed, k as u64)))
        .collect();
    out.push(structured_start(members));
    for w in &cfg.warm_starts {
        space.ensure_same(w.space())?;
        out.push(w.factors().to_vec());
    }
    Ok(out)
}

/// Run every start and keep the first maximizer in start order.
pub(crate) fn best_of(members: &[DenseTensor], alpha: Exponent, cfg: &SolverConfig) -> Result<Ascent> {
    let list = starts(members, cfg)?;
    let runs = exec::map_slice(&list, cfg.parallel, |st| ascend(members, alpha, st.clone(), cfg.max_iters, cfg.rel_tol));
    let mut best: Option<Ascent> = None;
    for run in runs {
        if best.as_ref().is_none_or(|b| run.value > b.value) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least the structured start runs"))
}

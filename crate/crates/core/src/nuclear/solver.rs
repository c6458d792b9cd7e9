//! Penalized conditional gradient for `[S]_β★` (and `||S||★` at `r = 1`).
//!
//! For a decreasing sequence of penalties `mu` the solver minimizes
//! `F = sum_j ||l_{·j}||_β + (1 / 2mu) sum_i ||R_i||²` over atoms and
//! coefficients. New atoms come from the `[·]_α` oracle on the residual;
//! between additions every column gets a proximal coordinate update and a
//! short ascent refresh of its atom, kept only when `F` drops. The final
//! certificate never depends on `mu`: the residual is absorbed into fiber
//! atoms and the column count is cut to the Carathéodory bound.

use super::decomposition::{caratheodory_max_atoms, TupleDecomposition};
use super::prox::prox;
use crate::error::Result;
use crate::linalg::{lstsq, Mat};
use crate::spectral::{ascend, tuple_alpha_lower, tuple_alpha_upper, Exponent, SolverConfig};
use crate::tensor::{DenseTensor, Field, SimpleTensor, TensorTuple, C64, ZERO};

const PRUNE_TOL: f64 = 1e-12;
/// Relative slack in the oracle stopping test `LMO(R) <= mu`.
const LMO_SLACK: f64 = 1e-6;
const POLISH_SWEEPS: usize = 50;
const REFRESH_PASSES: usize = 4;
const REFRESH_ITERS: usize = 8;

pub(crate) struct Solved {
    pub decomposition: TupleDecomposition,
    pub lower: f64,
    /// Dual witness `W`, normalized so that `[W]_α` upper is 1 and `<S, W> >= 0`.
    pub witness: Option<TensorTuple>,
    pub iterations: usize,
    pub converged: bool,
    /// Penalized objective after every oracle step, per penalty round.
    pub trace: Vec<Vec<f64>>,
}

struct State<'a> {
    s: &'a TensorTuple,
    alpha: Exponent,
    beta: Exponent,
    atoms: Vec<SimpleTensor>,
    assembled: Vec<DenseTensor>,
    /// Column-major: `cols[j][i]`.
    cols: Vec<Vec<C64>>,
    residual: Vec<DenseTensor>,
}

impl<'a> State<'a> {
    fn new(s: &'a TensorTuple, alpha: Exponent, beta: Exponent) -> Self {
        Self {
            s,
            alpha,
            beta,
            atoms: Vec::new(),
            assembled: Vec::new(),
            cols: Vec::new(),
            residual: s.members().to_vec(),
        }
    }

    fn cost(&self) -> f64 {
        self.cols.iter().map(|c| self.beta.norm_c(c)).sum()
    }

    fn objective(&self, mu: f64) -> f64 {
        self.cost() + self.residual.iter().map(DenseTensor::norm_sqr).sum::<f64>() / (2.0 * mu)
    }

    fn set_column(&mut self, j: usize, new: Vec<C64>) {
        for (i, r) in self.residual.iter_mut().enumerate() {
            let delta = new[i] - self.cols[j][i];
            if delta != ZERO {
                r.axpy(-delta, &self.assembled[j]);
            }
        }
        self.cols[j] = new;
    }

    fn projections(&self, j: usize) -> Vec<C64> {
        self.residual
            .iter()
            .zip(&self.cols[j])
            .map(|(r, l)| l + r.inner(&self.assembled[j]).expect("same space"))
            .collect()
    }

    fn add_atom(&mut self, atom: SimpleTensor, mu: f64) -> bool {
        let a = atom.assemble();
        let c: Vec<C64> = self.residual.iter().map(|r| r.inner(&a).expect("same space")).collect();
        let l = prox(&c, mu, self.beta);
        if l.iter().all(|x| *x == ZERO) {
            return false;
        }
        self.atoms.push(atom);
        self.assembled.push(a);
        self.cols.push(vec![ZERO; self.s.len()]);
        self.set_column(self.atoms.len() - 1, l);
        true
    }

    fn prune(&mut self) {
        let mut j = 0;
        while j < self.atoms.len() {
            if self.cols[j].iter().all(|x| x.norm() < PRUNE_TOL) {
                self.set_column(j, vec![ZERO; self.s.len()]);
                self.atoms.remove(j);
                self.assembled.remove(j);
                self.cols.remove(j);
            } else {
                j += 1;
            }
        }
    }

    /// Replace atom `j` by a short ascent from it on `G = R + l_j a_j`, with
    /// its coefficients re-proxed; kept only if `F` decreases.
    fn refresh(&mut self, j: usize, mu: f64) {
        let g: Vec<DenseTensor> = self
            .residual
            .iter()
            .zip(&self.cols[j])
            .map(|(r, l)| {
                let mut t = r.clone();
                t.axpy(*l, &self.assembled[j]);
                t
            })
            .collect();
        if g.iter().all(DenseTensor::is_zero) {
            return;
        }
        let run = ascend(&g, self.alpha, self.atoms[j].factors().to_vec(), REFRESH_ITERS, 1e-12);
        let Ok(atom) = SimpleTensor::unit_from_factors(self.s.space().clone(), run.factors) else {
            return;
        };
        let a = atom.assemble();
        let c_old = self.projections(j);
        let c_new: Vec<C64> = g.iter().map(|t| t.inner(&a).expect("same space")).collect();
        let l_new = prox(&c_new, mu, self.beta);
        let fit = |c: &[C64], l: &[C64]| -> f64 {
            c.iter().zip(l).map(|(c, l)| (c - l).norm_sqr() - c.norm_sqr()).sum::<f64>() / (2.0 * mu)
        };
        let before = self.beta.norm_c(&self.cols[j]) + fit(&c_old, &self.cols[j]);
        let after = self.beta.norm_c(&l_new) + fit(&c_new, &l_new);
        if after < before - 1e-15 * (1.0 + before.abs()) {
            self.residual = g;
            for (r, l) in self.residual.iter_mut().zip(&l_new) {
                r.axpy(-l, &a);
            }
            self.atoms[j] = atom;
            self.assembled[j] = a;
            self.cols[j] = l_new;
        }
    }

    /// Proximal coordinate sweeps to convergence, then one atom refresh
    /// pass; repeated while refreshing still lowers the objective.
    fn polish(&mut self, mu: f64) {
        for _ in 0..REFRESH_PASSES {
            let mut f = self.objective(mu);
            for _ in 0..POLISH_SWEEPS {
                for j in 0..self.atoms.len() {
                    let c = self.projections(j);
                    let l = prox(&c, mu, self.beta);
                    self.set_column(j, l);
                }
                let next = self.objective(mu);
                let done = f - next <= 1e-13 * f.abs();
                f = next;
                if done {
                    break;
                }
            }
            self.prune();
            let before = self.objective(mu);
            for j in 0..self.atoms.len() {
                self.refresh(j, mu);
            }
            if before - self.objective(mu) <= 1e-10 * before.abs() {
                break;
            }
        }
    }

    fn decomposition(&self) -> TupleDecomposition {
        let r = self.s.len();
        let coefficients = (0..r).map(|i| self.cols.iter().map(|c| c[i]).collect()).collect();
        TupleDecomposition::with_residuals(self.s, self.atoms.clone(), coefficients, self.beta)
            .expect("shapes match")
    }
}

fn lmo(residual: &[DenseTensor], cfg: &SolverConfig) -> Result<(f64, Option<SimpleTensor>)> {
    let t = TensorTuple::new(residual.to_vec())?;
    let lo = tuple_alpha_lower(&t, cfg)?;
    Ok((lo.value, lo.witness))
}

/// Least-squares refit of all coefficients with the atoms held fixed.
fn refit(s: &TensorTuple, d: &TupleDecomposition) -> TupleDecomposition {
    if d.is_empty() {
        return d.clone();
    }
    let n = s.space().total_dim();
    let cols: Vec<Vec<C64>> = d.atoms.iter().map(|a| a.assemble().into_data()).collect();
    let a = Mat::from_columns(n, &cols);
    let real = s.space().field() == Field::Real;
    let coefficients = s
        .members()
        .iter()
        .map(|m| {
            let mut x = lstsq(&a, m.data(), 1e-12);
            if real {
                x.iter_mut().for_each(|v| v.im = 0.0);
            }
            x
        })
        .collect();
    TupleDecomposition::with_residuals(s, d.atoms.clone(), coefficients, d.beta).expect("shapes match")
}

fn finalize(s: &TensorTuple, mut d: TupleDecomposition) -> TupleDecomposition {
    d.prune(PRUNE_TOL);
    d.refresh_residuals(s);
    d.absorb_residuals(s);
    d.reduce(s);
    d
}

/// Normalize `W` so that `<S, W>` is real nonnegative and its `[·]_α` upper
/// bound is 1; returns the certified lower bound `|<S, W>| / [W]_α upper`.
pub(crate) fn dual_bound(s: &TensorTuple, w: &TensorTuple, alpha: Exponent) -> Option<(f64, TensorTuple)> {
    let up = tuple_alpha_upper(w, alpha);
    if !(up > 0.0) || !up.is_finite() {
        return None;
    }
    let ip = s.inner(w).ok()?;
    let value = ip.norm() / up;
    let phase = if ip.norm() > 0.0 { ip / ip.norm() } else { C64::new(1.0, 0.0) };
    Some((value, w.scaled(phase / up)))
}

/// `W_i in span{a_j}` with `<a_j, W_i> = h_{ij}`, `h_{·j}` the Hölder dual of
/// column `j`, so that `<S - R, W>` equals the decomposition cost.
fn interpolating_witness(d: &TupleDecomposition) -> Option<TensorTuple> {
    if d.is_empty() {
        return None;
    }
    let m = d.len();
    let assembled: Vec<DenseTensor> = d.atoms.iter().map(SimpleTensor::assemble).collect();
    let mut gram = Vec::with_capacity(m * m);
    for a in &assembled {
        for b in &assembled {
            gram.push(a.inner(b).ok()?);
        }
    }
    let gram = Mat::from_rows(m, m, gram);
    let h: Vec<Vec<C64>> = (0..m).map(|j| d.beta.holder_dual(&d.column(j))).collect();
    let real = d.space.field() == Field::Real;
    let members = (0..d.members())
        .map(|i| {
            let target: Vec<C64> = h.iter().map(|col| col[i]).collect();
            let xc = lstsq(&gram, &target, 1e-10);
            let mut w = DenseTensor::zeros(d.space.clone());
            for (x, a) in xc.iter().zip(&assembled) {
                let coef = if real { C64::new(x.re, 0.0) } else { x.conj() };
                w.axpy(coef, a);
            }
            w
        })
        .collect();
    TensorTuple::new(members).ok()
}

pub(crate) fn solve(s: &TensorTuple, beta: Exponent, cfg: &SolverConfig) -> Result<Solved> {
    let alpha = beta.conjugate();
    let lmo_cfg = cfg.clone().with_beta(beta);
    if s.is_zero() {
        return Ok(Solved {
            decomposition: TupleDecomposition::empty(s.space().clone(), s.len(), beta),
            lower: 0.0,
            witness: None,
            iterations: 0,
            converged: true,
            trace: Vec::new(),
        });
    }
    let budget = cfg.max_atoms.min(caratheodory_max_atoms(s.space(), s.len())).max(1);
    let mut state = State::new(s, alpha, beta);
    let (v0, u0) = lmo(&state.residual, &lmo_cfg)?;
    let mut mu = 0.1 * v0;
    if let Some(u) = u0 {
        state.add_atom(u, mu);
    }
    let mut iterations = 1;
    let mut converged = false;
    let mut trace = Vec::new();
    let mut last_mu = mu;
    for _ in 0..cfg.penalty_rounds.max(1) {
        let mut round = vec![state.objective(mu)];
        converged = false;
        for _ in 0..4 * budget {
            state.polish(mu);
            let f = state.objective(mu);
            let stalled = round.len() > 1 && round[round.len() - 1] - f <= 1e-10 * f;
            round.push(f);
            if stalled {
                break;
            }
            if state.atoms.len() >= budget {
                break;
            }
            let (v, u) = lmo(&state.residual, &lmo_cfg)?;
            iterations += 1;
            if v <= mu * (1.0 + LMO_SLACK) {
                converged = true;
                break;
            }
            if !u.is_some_and(|u| state.add_atom(u, mu)) {
                break;
            }
        }
        trace.push(round);
        last_mu = mu;
        mu /= cfg.penalty_decay;
    }

    let penalized = state.decomposition();
    let candidates = [finalize(s, penalized.clone()), finalize(s, refit(s, &penalized))];
    let mut best = 0;
    for (k, c) in candidates.iter().enumerate() {
        if c.upper() < candidates[best].upper() {
            best = k;
        }
    }
    let decomposition = candidates[best].clone();

    let mut duals = vec![s.clone()];
    if let Ok(r) = TensorTuple::new(state.residual.iter().map(|r| r.scaled(C64::new(1.0 / last_mu, 0.0))).collect()) {
        duals.push(r);
    }
    duals.extend(interpolating_witness(&penalized));
    duals.extend(interpolating_witness(&decomposition));
    let mut lower = 0.0;
    let mut witness = None;
    for w in &duals {
        if let Some((v, wn)) = dual_bound(s, w, alpha) {
            if v > lower {
                lower = v;
                witness = Some(wn);
            }
        }
    }
    let upper = decomposition.upper();
    debug_assert!(lower <= upper + 1e-9 * (1.0 + upper), "nuclear bracket out of order: [{lower}, {upper}]");
    debug_assert!(decomposition.len() <= caratheodory_max_atoms(s.space(), s.len()));
    Ok(Solved { decomposition, lower, witness, iterations, converged, trace })
}

//! Exhaustive grid oracle for the real spectral norm of small tensors.
//!
//! Modes `0..d-1` are sampled on a hyperspherical angle grid; the last mode is
//! maximized exactly (its best factor is the normalized contraction), so the
//! search space has one fewer mode. The grid is nested in the resolution,
//! and the best grid points are refined by a pattern search in angle space.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::tensor::{contract_except, vec_norm, DenseTensor, Field, C64};

/// Largest `total_dim` the oracle accepts.
pub const BRUTE_FORCE_MAX_DIM: usize = 64;
const MAX_GRID_POINTS: usize = 1 << 22;
const MAX_REFINE_EVALS: usize = 200_000;
const REFINE_STARTS: usize = 4;
const MIN_STEP: f64 = 1e-10;

fn sphere_point(angles: &[f64]) -> Vec<C64> {
    let n = angles.len() + 1;
    let mut x = Vec::with_capacity(n);
    let mut sin_prod = 1.0;
    for &t in angles {
        x.push(C64::new(sin_prod * t.cos(), 0.0));
        sin_prod *= t.sin();
    }
    x.push(C64::new(sin_prod, 0.0));
    x
}

/// Angle grid for the unit sphere in R^n: the last angle covers `[0, π)`
/// because `u` and `-u` give the same objective.
fn angle_grid(n: usize, res: usize) -> Vec<Vec<f64>> {
    let mut grid = vec![Vec::new()];
    for k in 0..n.saturating_sub(1) {
        let last = k + 2 == n;
        let count = if last { res } else { res + 1 };
        let mut next = Vec::with_capacity(grid.len() * count);
        for g in &grid {
            for j in 0..count {
                let mut h = g.clone();
                h.push(j as f64 * PI / res as f64);
                next.push(h);
            }
        }
        grid = next;
    }
    grid
}

struct Problem<'a> {
    s: &'a DenseTensor,
    dims: Vec<usize>,
}

impl Problem<'_> {
    /// Objective for angles of modes `0..d-1`, concatenated.
    fn eval(&self, angles: &[f64]) -> f64 {
        let d = self.dims.len();
        let mut factors = Vec::with_capacity(d);
        let mut at = 0;
        for &n in &self.dims[..d - 1] {
            factors.push(sphere_point(&angles[at..at + n - 1]));
            at += n - 1;
        }
        factors.push(vec![C64::new(0.0, 0.0); self.dims[d - 1]]);
        vec_norm(&contract_except(self.s, &factors, d - 1))
    }

    fn refine(&self, mut angles: Vec<f64>, mut value: f64, res: usize, budget: &mut usize) -> f64 {
        let mut h = PI / res as f64;
        while h >= MIN_STEP && *budget > 0 {
            let mut improved = false;
            for k in 0..angles.len() {
                for sign in [1.0, -1.0] {
                    if *budget == 0 {
                        return value;
                    }
                    *budget -= 1;
                    let old = angles[k];
                    angles[k] = old + sign * h;
                    let v = self.eval(&angles);
                    if v > value {
                        value = v;
                        improved = true;
                    } else {
                        angles[k] = old;
                    }
                }
            }
            if !improved {
                h *= 0.5;
            }
        }
        value
    }
}

/// Max of `|<S, u>|` over a grid of `resolution` steps per angle on every
/// mode but the last, followed by local refinement. Real field only.
pub fn brute_force_spectral(s: &DenseTensor, resolution: usize) -> Result<f64> {
    let space = s.space();
    if space.field() != Field::Real {
        return Err(Error::BruteForceGuard("complex field is not supported".into()));
    }
    if space.total_dim() > BRUTE_FORCE_MAX_DIM {
        return Err(Error::BruteForceGuard(format!(
            "total dimension {} exceeds {BRUTE_FORCE_MAX_DIM}",
            space.total_dim()
        )));
    }
    if resolution == 0 {
        return Err(Error::BruteForceGuard("resolution must be positive".into()));
    }
    let dims = space.dims().to_vec();
    let d = dims.len();
    if d == 1 {
        return Ok(s.norm());
    }
    let grids: Vec<Vec<Vec<f64>>> = dims[..d - 1].iter().map(|&n| angle_grid(n, resolution)).collect();
    let total = grids.iter().try_fold(1usize, |acc, g| acc.checked_mul(g.len()));
    if total.is_none_or(|t| t > MAX_GRID_POINTS) {
        return Err(Error::BruteForceGuard(format!("grid at resolution {resolution} is too large")));
    }
    let problem = Problem { s, dims };
    let mut top: Vec<(f64, Vec<f64>)> = Vec::with_capacity(REFINE_STARTS + 1);
    let mut idx = vec![0usize; grids.len()];
    loop {
        let angles: Vec<f64> = idx.iter().zip(&grids).flat_map(|(&i, g)| g[i].iter().copied()).collect();
        let v = problem.eval(&angles);
        if top.len() < REFINE_STARTS || v > top[top.len() - 1].0 {
            let pos = top.iter().position(|(w, _)| v > *w).unwrap_or(top.len());
            top.insert(pos, (v, angles));
            top.truncate(REFINE_STARTS);
        }
        let mut e = grids.len();
        loop {
            if e == 0 {
                let mut budget = MAX_REFINE_EVALS;
                let best = top
                    .into_iter()
                    .map(|(v, a)| problem.refine(a, v, resolution, &mut budget))
                    .fold(0.0, f64::max);
                return Ok(best);
            }
            e -= 1;
            idx[e] += 1;
            if idx[e] < grids[e].len() {
                break;
            }
            idx[e] = 0;
        }
    }
}

/// Double the resolution from 16 until successive values agree to `1e-12`
/// relative (or the grid gets too large). Returns the value and the final
/// resolution.
pub fn brute_force_spectral_converged(s: &DenseTensor) -> Result<(f64, usize)> {
    let mut res = 16;
    let mut prev = brute_force_spectral(s, res)?;
    loop {
        let next_res = res * 2;
        let next = match brute_force_spectral(s, next_res) {
            Ok(v) => v,
            Err(Error::BruteForceGuard(_)) => return Ok((prev, res)),
            Err(e) => return Err(e),
        };
        let agreed = (next - prev).abs() <= 1e-12 * (1.0 + next);
        prev = prev.max(next);
        res = next_res;
        if agreed || res >= 1024 {
            return Ok((prev, res));
        }
    }
}

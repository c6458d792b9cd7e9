//! Small dense complex linear algebra: one-sided Jacobi SVD and the helpers
//! built on it (least squares, real null vectors).

use crate::error::{Error, Result};
use crate::tensor::{DenseTensor, C64, ZERO};

/// Row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<C64>]) -> Self {
        let cols = columns.len();
        let mut m = Self::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, &x) in c.iter().enumerate() {
                m.data[i * cols + j] = x;
            }
        }
        m
    }

    pub fn from_tensor(t: &DenseTensor) -> Result<Self> {
        let dims = t.space().dims();
        if dims.len() != 2 {
            return Err(Error::DimensionMismatch(format!("expected an order-2 tensor, got order {}", dims.len())));
        }
        Ok(Self::from_rows(dims[0], dims[1], t.data().to_vec()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn conj_transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        out
    }

    fn columns(&self) -> Vec<Vec<C64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }
}

/// Thin SVD `M = U diag(s) V^H` with `s` nonincreasing.
#[derive(Debug, Clone)]
pub struct Svd {
    pub s: Vec<f64>,
    /// Left singular vectors, one per singular value.
    pub u: Vec<Vec<C64>>,
    /// Right singular vectors, one per singular value.
    pub v: Vec<Vec<C64>>,
}

const JACOBI_EPS: f64 = 1e-15;
const JACOBI_MAX_SWEEPS: usize = 80;

/// Hestenes one-sided Jacobi on the columns of `a`: returns `(W, V)` with
/// `a V = W`, `V` unitary (n x n, stored by columns) and the columns of `W`
/// mutually orthogonal.
fn one_sided_jacobi(a: &Mat) -> (Vec<Vec<C64>>, Vec<Vec<C64>>) {
    let n = a.cols;
    let mut w = a.columns();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut c = vec![ZERO; n];
            c[j] = C64::new(1.0, 0.0);
            c
        })
        .collect();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = w[p].iter().map(|x| x.norm_sqr()).sum();
                let beta: f64 = w[q].iter().map(|x| x.norm_sqr()).sum();
                let gamma: C64 = w[p].iter().zip(&w[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= JACOBI_EPS * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Rotate column q by the phase of gamma so the cross term is real.
                let ph = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for cols in [&mut w, &mut v] {
                    let (left, right) = cols.split_at_mut(q);
                    let (cp, cq) = (&mut left[p], &mut right[0]);
                    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                        let yq = *y * ph;
                        let xp = *x;
                        *x = xp * c - yq * s;
                        *y = xp * s + yq * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (w, v)
}

/// Thin SVD via one-sided Jacobi on whichever orientation has fewer columns.
pub fn svd(m: &Mat) -> Svd {
    if m.rows < m.cols {
        let t = svd(&m.conj_transpose());
        return Svd { s: t.s, u: t.v, v: t.u };
    }
    let (w, v) = one_sided_jacobi(m);
    let mut order: Vec<(f64, usize)> = w
        .iter()
        .enumerate()
        .map(|(j, c)| (c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt(), j))
        .collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let k = m.cols.min(m.rows);
    let mut out = Svd { s: Vec::with_capacity(k), u: Vec::with_capacity(k), v: Vec::with_capacity(k) };
    for &(sigma, j) in order.iter().take(k) {
        out.s.push(sigma);
        let u = if sigma > 0.0 {
            w[j].iter().map(|x| x / sigma).collect()
        } else {
            // Any unit vector completes the factorization for a zero singular value.
            let mut e = vec![ZERO; m.rows];
            e[j.min(m.rows - 1)] = C64::new(1.0, 0.0);
            e
        };
        out.u.push(u);
        out.v.push(v[j].clone());
    }
    out
}

/// Singular values of an order-2 tensor, nonincreasing.
pub fn svd_matrix_oracle(m: &DenseTensor) -> Result<Vec<f64>> {
    Ok(svd(&Mat::from_tensor(m)?).s)
}

/// Largest singular value (0 for an empty or zero matrix).
pub fn sigma_max(m: &Mat) -> f64 {
    svd(m).s.first().copied().unwrap_or(0.0)
}

/// Minimum-norm least-squares solution of `A x ≈ b`, discarding singular
/// values below `rcond * s_max`.
pub fn lstsq(a: &Mat, b: &[C64], rcond: f64) -> Vec<C64> {
    let d = svd(a);
    let smax = d.s.first().copied().unwrap_or(0.0);
    let mut x = vec![ZERO; a.cols];
    for ((sigma, u), v) in d.s.iter().zip(&d.u).zip(&d.v) {
        if *sigma <= rcond * smax || *sigma == 0.0 {
            continue;
        }
        let coef: C64 = u.iter().zip(b).map(|(ui, bi)| ui.conj() * bi).sum::<C64>() / *sigma;
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi += coef * vi;
        }
    }
    x
}

/// A unit vector `c` with `sum_j c_j * columns[j] = 0`, found by Gaussian
/// elimination with complete pivoting; `None` when the columns are
/// numerically independent.
pub fn real_null_vector(columns: &[Vec<f64>], rows: usize) -> Option<Vec<f64>> {
    let m = columns.len();
    let mut a: Vec<Vec<f64>> = (0..rows).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
    let scale = a.iter().flatten().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
    let mut col_of: Vec<usize> = (0..m).collect();
    let mut rank = 0;
    while rank < rows.min(m) {
        let (mut pi, mut pj, mut best) = (rank, rank, 0.0);
        for (i, row) in a.iter().enumerate().skip(rank) {
            for (j, x) in row.iter().enumerate().skip(rank) {
                if x.abs() > best {
                    best = x.abs();
                    pi = i;
                    pj = j;
                }
            }
        }
        if best <= tol {
            break;
        }
        a.swap(rank, pi);
        for row in a.iter_mut() {
            row.swap(rank, pj);
        }
        col_of.swap(rank, pj);
        let pivot_row = a[rank].clone();
        for row in a.iter_mut().skip(rank + 1) {
            let f = row[rank] / pivot_row[rank];
            if f != 0.0 {
                for (x, p) in row.iter_mut().zip(&pivot_row).skip(rank) {
                    *x -= f * p;
                }
            }
        }
        rank += 1;
    }
    if rank == m {
        return None;
    }
    // Free variable `rank` set to 1, the other free ones to 0.
    let mut x = vec![0.0; m];
    x[rank] = 1.0;
    for i in (0..rank).rev() {
        let s: f64 = (i + 1..=rank).map(|j| a[i][j] * x[j]).sum();
        x[i] = -s / a[i][i];
    }
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut out = vec![0.0; m];
    for (k, &j) in col_of.iter().enumerate() {
        out[j] = x[k] / n;
    }
    Some(out)
}

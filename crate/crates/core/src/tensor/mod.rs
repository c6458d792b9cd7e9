//! Dense tensors over a tensor product space, pure tensors, tuples, and the
//! two ways of combining spaces: the vertical (Kronecker) product and the
//! direct sum.
//!
//! Entries are stored row-major (last index fastest) as complex numbers; a
//! real-field tensor keeps every imaginary part exactly zero. The vertical
//! product places `S[i] * T[j]` at composite index `k_e = i_e * m_e + j_e` in
//! every mode, which is the classical matrix Kronecker layout for order 2.

mod dense;
pub mod io;
mod random;
mod simple;
mod space;
mod tuple;

pub use dense::DenseTensor;
pub use random::{mix_seed, random_factor, Distribution};
pub use simple::SimpleTensor;
pub use space::{Field, TensorSpace};
pub use tuple::TensorTuple;

pub use num_complex::Complex64 as C64;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Visit every multi-index of `dims` in row-major order.
pub(crate) fn for_each_index(dims: &[usize], mut f: impl FnMut(usize, &[usize])) {
    let total: usize = dims.iter().product();
    let mut idx = vec![0usize; dims.len()];
    for flat in 0..total {
        f(flat, &idx);
        for e in (0..dims.len()).rev() {
            idx[e] += 1;
            if idx[e] < dims[e] {
                break;
            }
            idx[e] = 0;
        }
    }
}

/// Euclidean norm of a complex vector.
pub(crate) fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `c[i_mode] = sum over the other indices of S[idx] * prod_{f != mode} conj(u_f[i_f])`.
///
/// This is the gradient of `<S, u>` with respect to `conj(u_mode)`.
pub(crate) fn contract_except(s: &DenseTensor, factors: &[Vec<C64>], mode: usize) -> Vec<C64> {
    let dims = s.space().dims();
    let mut out = vec![ZERO; dims[mode]];
    let data = s.data();
    for_each_index(dims, |flat, idx| {
        let x = data[flat];
        if x == ZERO {
            return;
        }
        let mut w = x;
        for (f, &i) in idx.iter().enumerate() {
            if f != mode {
                w *= factors[f][i].conj();
            }
        }
        out[idx[mode]] += w;
    });
    out
}

/// `sum_idx S[idx] * prod_e conj(u_e[i_e])`, i.e. `<S, u_1 ⊗ ... ⊗ u_d>`.
pub(crate) fn contract_all(s: &DenseTensor, factors: &[Vec<C64>]) -> C64 {
    let last = factors.len() - 1;
    let c = contract_except(s, factors, last);
    c.iter().zip(&factors[last]).map(|(a, b)| a * b.conj()).sum()
}

/// Outer product of factor vectors, row-major.
pub(crate) fn outer(factors: &[Vec<C64>]) -> Vec<C64> {
    let mut out = vec![ONE];
    for f in factors {
        let mut next = Vec::with_capacity(out.len() * f.len());
        for &a in &out {
            for &b in f {
                next.push(a * b);
            }
        }
        out = next;
    }
    out
}

/// Kronecker product of two vectors, `k = i * len(b) + j`.
pub(crate) fn vec_kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

use crate::error::{Error, Result};

use super::{for_each_index, Field, TensorSpace, C64, ZERO};

/// A coordinate tensor with explicit entries in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    space: TensorSpace,
    data: Vec<C64>,
}

impl DenseTensor {
    pub fn new(space: TensorSpace, data: Vec<C64>) -> Result<Self> {
        if data.len() != space.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for space {}",
                data.len(),
                space
            )));
        }
        if space.field() == Field::Real {
            if let Some(pos) = data.iter().position(|x| x.im != 0.0) {
                return Err(Error::ComplexEntryInRealTensor(pos));
            }
        }
        Ok(Self { space, data })
    }

    /// Real-field tensor from real entries.
    pub fn from_real(dims: &[usize], data: &[f64]) -> Result<Self> {
        let space = TensorSpace::real(dims)?;
        Self::new(space, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(space: TensorSpace) -> Self {
        let n = space.total_dim();
        Self { space, data: vec![ZERO; n] }
    }

    /// `n x n` identity matrix.
    pub fn identity(n: usize, field: Field) -> Self {
        let space = TensorSpace::new(vec![n, n], field).expect("n >= 1");
        let mut t = Self::zeros(space);
        for i in 0..n {
            t.data[i * n + i] = C64::new(1.0, 0.0);
        }
        t
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn get(&self, idx: &[usize]) -> C64 {
        let strides = self.space.strides();
        let flat: usize = idx.iter().zip(&strides).map(|(i, s)| i * s).sum();
        self.data[flat]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| *x == ZERO)
    }

    /// Frobenius inner product `sum S[idx] * conj(T[idx])`, conjugate-linear
    /// in the second argument.
    pub fn inner(&self, other: &DenseTensor) -> Result<C64> {
        self.space.ensure_same(&other.space)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b.conj()).sum())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Multiply every entry by `c`. A real tensor must be scaled by a real.
    pub fn scaled(&self, c: C64) -> DenseTensor {
        let mut out = self.clone();
        out.scale_mut(c);
        out
    }

    pub(crate) fn scale_mut(&mut self, c: C64) {
        let real = self.space.field() == Field::Real;
        for x in &mut self.data {
            *x *= c;
            if real {
                x.im = 0.0;
            }
        }
    }

    /// `self += c * other` over a matching space.
    pub(crate) fn axpy(&mut self, c: C64, other: &DenseTensor) {
        debug_assert_eq!(self.space, other.space);
        let real = self.space.field() == Field::Real;
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += c * y;
            if real {
                x.im = 0.0;
            }
        }
    }

    pub fn add(&self, other: &DenseTensor) -> Result<DenseTensor> {
        self.space.ensure_same(&other.space)?;
        let mut out = self.clone();
        out.axpy(C64::new(1.0, 0.0), other);
        Ok(out)
    }

    pub fn sub(&self, other: &DenseTensor) -> Result<DenseTensor> {
        self.space.ensure_same(&other.space)?;
        let mut out = self.clone();
        out.axpy(C64::new(-1.0, 0.0), other);
        Ok(out)
    }

    /// Vertical tensor product `S ⊠ T`: dims `n_e * m_e`, entry at
    /// `k_e = i_e * m_e + j_e` equal to `S[i] * T[j]`.
    pub fn kron(&self, other: &DenseTensor) -> Result<DenseTensor> {
        let space = self.space.kron(&other.space)?;
        let strides = space.strides();
        let m = other.space.dims();
        let left = offsets(self.space.dims(), |e, i| i * m[e] * strides[e]);
        let right = offsets(other.space.dims(), |e, j| j * strides[e]);
        let mut data = vec![ZERO; space.total_dim()];
        for (a, &oa) in self.data.iter().zip(&left) {
            for (b, &ob) in other.data.iter().zip(&right) {
                data[oa + ob] = a * b;
            }
        }
        DenseTensor::new(space, data)
    }

    /// Direct sum `S ⊕ T`: `S` in the leading block `[0, n_e)` of every mode,
    /// `T` in the trailing block `[n_e, n_e + m_e)`, zeros elsewhere.
    pub fn direct_sum(&self, other: &DenseTensor) -> Result<DenseTensor> {
        let space = self.space.direct_sum(&other.space)?;
        let strides = space.strides();
        let n = self.space.dims();
        let mut data = vec![ZERO; space.total_dim()];
        let left = offsets(self.space.dims(), |e, i| i * strides[e]);
        let right = offsets(other.space.dims(), |e, j| (n[e] + j) * strides[e]);
        for (a, &o) in self.data.iter().zip(&left) {
            data[o] = *a;
        }
        for (b, &o) in other.data.iter().zip(&right) {
            data[o] = *b;
        }
        DenseTensor::new(space, data)
    }

    /// Matricization: rows indexed by `row_modes` (row-major over those modes
    /// in their original order), columns by the remaining modes.
    pub fn flatten(&self, row_modes: &[usize]) -> Result<DenseTensor> {
        let d = self.space.order();
        let mut is_row = vec![false; d];
        for &e in row_modes {
            if e >= d {
                return Err(Error::InvalidModes(format!("mode {e} out of range for order {d}")));
            }
            if is_row[e] {
                return Err(Error::InvalidModes(format!("mode {e} repeated")));
            }
            is_row[e] = true;
        }
        if row_modes.is_empty() || row_modes.len() == d {
            return Err(Error::InvalidModes(
                "row modes must be a nonempty proper subset".into(),
            ));
        }
        let dims = self.space.dims();
        let rows: usize = (0..d).filter(|&e| is_row[e]).map(|e| dims[e]).product();
        let cols: usize = (0..d).filter(|&e| !is_row[e]).map(|e| dims[e]).product();
        let mut data = vec![ZERO; rows * cols];
        for_each_index(dims, |flat, idx| {
            let (mut r, mut c) = (0usize, 0usize);
            for e in 0..d {
                if is_row[e] {
                    r = r * dims[e] + idx[e];
                } else {
                    c = c * dims[e] + idx[e];
                }
            }
            data[r * cols + c] = self.data[flat];
        });
        DenseTensor::new(TensorSpace::new(vec![rows, cols], self.space.field())?, data)
    }
}

/// Linear offsets of every row-major multi-index of `dims` under `map(mode, index)`.
fn offsets(dims: &[usize], map: impl Fn(usize, usize) -> usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(dims.iter().product());
    for_each_index(dims, |_, idx| {
        out.push(idx.iter().enumerate().map(|(e, &i)| map(e, i)).sum());
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Distribution;
    use approx::assert_relative_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn rejects_bad_entries() {
        let space = TensorSpace::real(&[2]).unwrap();
        assert!(DenseTensor::new(space.clone(), vec![c(1.0)]).is_err());
        assert!(matches!(
            DenseTensor::new(space, vec![c(1.0), C64::new(0.0, 1.0)]),
            Err(Error::ComplexEntryInRealTensor(1))
        ));
    }

    #[test]
    fn identity_inner_products() {
        let i2 = DenseTensor::identity(2, Field::Real);
        assert_eq!(i2.inner(&i2).unwrap(), c(2.0));
        assert_relative_eq!(i2.norm(), 2f64.sqrt());
        let e11 = DenseTensor::from_real(&[2, 2], &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let e12 = DenseTensor::from_real(&[2, 2], &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(e11.inner(&e12).unwrap(), c(0.0));
        assert_eq!(DenseTensor::zeros(i2.space().clone()).norm(), 0.0);
    }

    #[test]
    fn inner_is_conjugate_linear_in_second_argument() {
        let space = TensorSpace::complex(&[2]).unwrap();
        let s = DenseTensor::new(space.clone(), vec![c(1.0), C64::new(0.0, 1.0)]).unwrap();
        let t = s.scaled(C64::new(0.0, 1.0));
        // <S, iS> = -i <S, S>
        assert_eq!(s.inner(&t).unwrap(), C64::new(0.0, -2.0));
        assert_eq!(t.inner(&s).unwrap(), C64::new(0.0, 2.0));
    }

    #[test]
    fn inner_self_is_norm_squared() {
        let space = TensorSpace::complex(&[2, 3, 2]).unwrap();
        let s = DenseTensor::random(&space, 11, Distribution::Gaussian);
        let ip = s.inner(&s).unwrap();
        assert_relative_eq!(ip.re, s.norm_sqr(), max_relative = 1e-14);
        assert_eq!(ip.im, 0.0);
    }

    #[test]
    fn kron_order_one() {
        let a = DenseTensor::from_real(&[2], &[1.0, 0.0]).unwrap();
        let b = DenseTensor::from_real(&[2], &[0.0, 1.0]).unwrap();
        let k = a.kron(&b).unwrap();
        assert_eq!(k.data(), &[c(0.0), c(1.0), c(0.0), c(0.0)]);
    }

    #[test]
    fn kron_matches_matrix_kronecker() {
        let a = DenseTensor::from_real(&[2, 2], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = DenseTensor::from_real(&[2, 3], &[0.0, 5.0, 6.0, 7.0, 8.0, 9.0]).unwrap();
        let k = a.kron(&b).unwrap();
        assert_eq!(k.space().dims(), &[4, 6]);
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..2 {
                    for q in 0..3 {
                        assert_eq!(
                            k.get(&[i * 2 + p, j * 3 + q]),
                            a.get(&[i, j]) * b.get(&[p, q])
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn kron_rejects_mismatch() {
        let a = DenseTensor::from_real(&[2, 2], &[1.0; 4]).unwrap();
        let b = DenseTensor::from_real(&[2], &[1.0; 2]).unwrap();
        assert!(matches!(a.kron(&b), Err(Error::OrderMismatch(2, 1))));
        let c = DenseTensor::identity(2, Field::Complex);
        assert!(matches!(a.kron(&c), Err(Error::FieldMismatch)));
    }

    #[test]
    fn kron_frobenius_multiplicative() {
        let space = TensorSpace::real(&[2, 2, 2]).unwrap();
        let s = DenseTensor::random(&space, 3, Distribution::Gaussian);
        let t = DenseTensor::random(&space, 4, Distribution::Gaussian);
        let k = s.kron(&t).unwrap();
        assert_relative_eq!(k.norm(), s.norm() * t.norm(), max_relative = 1e-12);
    }

    #[test]
    fn direct_sum_examples() {
        let one = DenseTensor::from_real(&[1], &[1.0]).unwrap();
        assert_eq!(one.direct_sum(&one).unwrap().data(), &[c(1.0), c(1.0)]);
        let i1 = DenseTensor::identity(1, Field::Real);
        assert_eq!(i1.direct_sum(&i1).unwrap(), DenseTensor::identity(2, Field::Real));
    }

    #[test]
    fn direct_sum_blocks() {
        let space_s = TensorSpace::complex(&[2, 1, 2]).unwrap();
        let space_t = TensorSpace::complex(&[1, 2, 2]).unwrap();
        let s = DenseTensor::random(&space_s, 1, Distribution::Gaussian);
        let t = DenseTensor::random(&space_t, 2, Distribution::Gaussian);
        let sum = s.direct_sum(&t).unwrap();
        assert_eq!(sum.space().dims(), &[3, 3, 4]);
        assert_relative_eq!(sum.norm_sqr(), s.norm_sqr() + t.norm_sqr(), max_relative = 1e-14);
        for_each_index(sum.space().dims(), |flat, idx| {
            let in_s = idx[0] < 2 && idx[1] < 1 && idx[2] < 2;
            let in_t = idx[0] >= 2 && idx[1] >= 1 && idx[2] >= 2;
            let x = sum.data()[flat];
            if in_s {
                assert_eq!(x, s.get(idx));
            } else if in_t {
                assert_eq!(x, t.get(&[idx[0] - 2, idx[1] - 1, idx[2] - 2]));
            } else {
                assert_eq!(x, ZERO);
            }
        });
    }

    #[test]
    fn flatten_shapes_and_errors() {
        let m = DenseTensor::from_real(&[2, 2], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let f = m.flatten(&[0]).unwrap();
        assert_eq!(f, m);
        let space = TensorSpace::real(&[2, 2, 2]).unwrap();
        let t = DenseTensor::random(&space, 5, Distribution::Gaussian);
        let f0 = t.flatten(&[0]).unwrap();
        assert_eq!(f0.space().dims(), &[2, 4]);
        let f1 = t.flatten(&[1]).unwrap();
        assert_eq!(f1.get(&[1, 2]), t.get(&[1, 1, 0]));
        let f02 = t.flatten(&[0, 2]).unwrap();
        assert_eq!(f02.get(&[3, 0]), t.get(&[1, 0, 1]));
        assert!(t.flatten(&[]).is_err());
        assert!(t.flatten(&[0, 1, 2]).is_err());
        assert!(t.flatten(&[3]).is_err());
        assert!(t.flatten(&[1, 1]).is_err());
    }
}

use crate::error::{Error, Result};

use super::{mix_seed, DenseTensor, Distribution, TensorSpace, C64, ZERO};

/// An ordered r-tuple `(S_1, ..., S_r)` of tensors from one space.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorTuple {
    space: TensorSpace,
    members: Vec<DenseTensor>,
}

impl TensorTuple {
    pub fn new(members: Vec<DenseTensor>) -> Result<Self> {
        let first = members.first().ok_or(Error::EmptyTuple)?;
        let space = first.space().clone();
        for m in &members[1..] {
            space.ensure_same(m.space())?;
        }
        Ok(Self { space, members })
    }

    pub fn single(s: DenseTensor) -> Self {
        Self { space: s.space().clone(), members: vec![s] }
    }

    pub fn zeros(space: TensorSpace, r: usize) -> Result<Self> {
        Self::new(vec![DenseTensor::zeros(space); r])
    }

    /// `r` independent draws; member `i` uses seed `mix_seed(seed, i)`.
    pub fn random(space: &TensorSpace, r: usize, seed: u64, dist: Distribution) -> Result<Self> {
        Self::new((0..r).map(|i| DenseTensor::random(space, mix_seed(seed, i as u64), dist)).collect())
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn members(&self) -> &[DenseTensor] {
        &self.members
    }

    pub fn into_members(self) -> Vec<DenseTensor> {
        self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.members.iter().all(DenseTensor::is_zero)
    }

    /// `<S, T> = sum_i <S_i, T_i>`.
    pub fn inner(&self, other: &TensorTuple) -> Result<C64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(format!(
                "tuples of length {} and {}",
                self.len(),
                other.len()
            )));
        }
        let mut acc = ZERO;
        for (a, b) in self.members.iter().zip(&other.members) {
            acc += a.inner(b)?;
        }
        Ok(acc)
    }

    pub fn norm(&self) -> f64 {
        self.members.iter().map(DenseTensor::norm_sqr).sum::<f64>().sqrt()
    }

    /// `(S_i ⊠ T_j | 1 <= i <= r, 1 <= j <= s)`, ordered with `i` outermost.
    pub fn kron(&self, other: &TensorTuple) -> Result<TensorTuple> {
        let mut out = Vec::with_capacity(self.len() * other.len());
        for s in &self.members {
            for t in &other.members {
                out.push(s.kron(t)?);
            }
        }
        TensorTuple::new(out)
    }

    pub fn scaled(&self, c: C64) -> TensorTuple {
        TensorTuple {
            space: self.space.clone(),
            members: self.members.iter().map(|m| m.scaled(c)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Field;

    #[test]
    fn rejects_empty_and_mixed() {
        assert!(matches!(TensorTuple::new(vec![]), Err(Error::EmptyTuple)));
        let a = DenseTensor::identity(2, Field::Real);
        let b = DenseTensor::identity(3, Field::Real);
        assert!(matches!(TensorTuple::new(vec![a, b]), Err(Error::SpaceMismatch { .. })));
    }

    #[test]
    fn kron_ordering() {
        let space = TensorSpace::real(&[2, 2]).unwrap();
        let s = TensorTuple::random(&space, 2, 1, Distribution::Gaussian).unwrap();
        let t = TensorTuple::random(&space, 3, 2, Distribution::Gaussian).unwrap();
        let p = s.kron(&t).unwrap();
        assert_eq!(p.len(), 6);
        assert_eq!(p.members()[4], s.members()[1].kron(&t.members()[1]).unwrap());
    }

    #[test]
    fn inner_factorizes_over_kron() {
        let space = TensorSpace::complex(&[2, 2]).unwrap();
        let s = TensorTuple::random(&space, 2, 3, Distribution::Gaussian).unwrap();
        let s2 = TensorTuple::random(&space, 2, 4, Distribution::Gaussian).unwrap();
        let t = TensorTuple::random(&space, 2, 5, Distribution::Gaussian).unwrap();
        let t2 = TensorTuple::random(&space, 2, 6, Distribution::Gaussian).unwrap();
        let lhs = s.kron(&t).unwrap().inner(&s2.kron(&t2).unwrap()).unwrap();
        // sum_{i,j} <S_i,S'_i><T_j,T'_j> = (sum_i <S_i,S'_i>)(sum_j <T_j,T'_j>)
        let rhs = s.inner(&s2).unwrap() * t.inner(&t2).unwrap();
        assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
    }
}

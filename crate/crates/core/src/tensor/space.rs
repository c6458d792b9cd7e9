use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalar field of a tensor product space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    /// Real dimension of one scalar.
    pub fn real_dim(self) -> usize {
        match self {
            Field::Real => 1,
            Field::Complex => 2,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Real => write!(f, "real"),
            Field::Complex => write!(f, "complex"),
        }
    }
}

/// A d-th order tensor product space `U(1) ⊗ ... ⊗ U(d)` given by its mode
/// dimensions and scalar field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TensorSpace {
    dims: Vec<usize>,
    field: Field,
}

impl TensorSpace {
    pub fn new(dims: Vec<usize>, field: Field) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidSpace("order must be at least 1".into()));
        }
        if dims.iter().any(|&n| n == 0) {
            return Err(Error::InvalidSpace(format!(
                "mode dimensions must be positive, got {dims:?}"
            )));
        }
        Ok(Self { dims, field })
    }

    pub fn real(dims: &[usize]) -> Result<Self> {
        Self::new(dims.to_vec(), Field::Real)
    }

    pub fn complex(dims: &[usize]) -> Result<Self> {
        Self::new(dims.to_vec(), Field::Complex)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Dimension of the space as a real vector space.
    pub fn real_dim(&self) -> usize {
        self.total_dim() * self.field.real_dim()
    }

    /// Row-major strides.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for e in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[e] = strides[e + 1] * self.dims[e + 1];
        }
        strides
    }

    fn check_compatible(&self, other: &TensorSpace) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch(self.order(), other.order()));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    /// `U ⊠ V`: mode dimensions multiply.
    pub fn kron(&self, other: &TensorSpace) -> Result<TensorSpace> {
        self.check_compatible(other)?;
        let dims = self.dims.iter().zip(&other.dims).map(|(a, b)| a * b).collect();
        TensorSpace::new(dims, self.field)
    }

    /// `U ⊕ V`: mode dimensions add.
    pub fn direct_sum(&self, other: &TensorSpace) -> Result<TensorSpace> {
        self.check_compatible(other)?;
        let dims = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        TensorSpace::new(dims, self.field)
    }

    pub(crate) fn ensure_same(&self, other: &TensorSpace) -> Result<()> {
        if self != other {
            return Err(Error::SpaceMismatch {
                left: self.to_string(),
                right: other.to_string(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for TensorSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<String> = self.dims.iter().map(|n| n.to_string()).collect();
        write!(f, "{} ({})", dims.join("x"), self.field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_spaces() {
        assert!(TensorSpace::real(&[]).is_err());
        assert!(TensorSpace::real(&[2, 0]).is_err());
    }

    #[test]
    fn dimensions() {
        let s = TensorSpace::complex(&[2, 3, 4]).unwrap();
        assert_eq!(s.total_dim(), 24);
        assert_eq!(s.real_dim(), 48);
        assert_eq!(s.strides(), vec![12, 4, 1]);
        assert_eq!(s.to_string(), "2x3x4 (complex)");
    }

    #[test]
    fn combined_spaces() {
        let u = TensorSpace::real(&[2, 3]).unwrap();
        let v = TensorSpace::real(&[4, 1]).unwrap();
        assert_eq!(u.kron(&v).unwrap().dims(), &[8, 3]);
        assert_eq!(u.direct_sum(&v).unwrap().dims(), &[6, 4]);
        let w = TensorSpace::real(&[2]).unwrap();
        assert!(matches!(u.kron(&w), Err(Error::OrderMismatch(2, 1))));
        let c = TensorSpace::complex(&[2, 2]).unwrap();
        assert!(matches!(u.direct_sum(&c), Err(Error::FieldMismatch)));
    }
}

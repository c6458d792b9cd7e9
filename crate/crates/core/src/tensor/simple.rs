use crate::error::{Error, Result};

use super::{contract_all, outer, vec_kron, vec_norm, DenseTensor, Field, TensorSpace, C64, ONE, ZERO};

/// Tolerance on factor and phase moduli for the unit-length invariants.
pub const UNIT_TOL: f64 = 1e-12;

/// A pure tensor `scale * phase * v(1) ⊗ ... ⊗ v(d)` with unit-norm factors,
/// nonnegative scale and unit-modulus phase (`±1` over the reals).
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleTensor {
    space: TensorSpace,
    factors: Vec<Vec<C64>>,
    scale: f64,
    phase: C64,
}

impl SimpleTensor {
    /// Build from already-normalized parts, validating every invariant.
    pub fn new(space: TensorSpace, factors: Vec<Vec<C64>>, scale: f64, phase: C64) -> Result<Self> {
        check_shape(&space, &factors)?;
        for (e, f) in factors.iter().enumerate() {
            let n = vec_norm(f);
            if (n - 1.0).abs() > UNIT_TOL {
                return Err(Error::NotUnit(format!("factor {e} has norm {n}")));
            }
        }
        if !(scale >= 0.0 && scale.is_finite()) {
            return Err(Error::NotUnit(format!("scale {scale} must be finite and nonnegative")));
        }
        if (phase.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit(format!("phase {phase} is not unit modulus")));
        }
        if space.field() == Field::Real && phase.im != 0.0 {
            return Err(Error::NotUnit("real-field phase must be +1 or -1".into()));
        }
        Ok(Self { space, factors, scale, phase })
    }

    /// Canonical form of `v(1) ⊗ ... ⊗ v(d)` for arbitrary factor vectors:
    /// factor norms go into `scale`, and each factor is rotated so that its
    /// largest-modulus entry is real positive, with the rotation collected in
    /// `phase`. A zero factor yields scale 0.
    pub fn from_factors(space: TensorSpace, factors: Vec<Vec<C64>>) -> Result<Self> {
        check_shape(&space, &factors)?;
        let mut scale = 1.0;
        let mut phase = ONE;
        let mut out = Vec::with_capacity(factors.len());
        for f in factors {
            let n = vec_norm(&f);
            if n == 0.0 || !n.is_finite() {
                scale = 0.0;
                let mut e0 = vec![ZERO; f.len()];
                e0[0] = ONE;
                out.push(e0);
                continue;
            }
            let mut g: Vec<C64> = f.iter().map(|x| x / n).collect();
            let pivot = argmax_modulus(&g);
            let ph = g[pivot] / g[pivot].norm();
            for x in &mut g {
                *x *= ph.conj();
            }
            g[pivot].im = 0.0;
            scale *= n;
            phase *= ph;
            out.push(g);
        }
        if space.field() == Field::Real {
            phase = C64::new(phase.re.signum(), 0.0);
        } else {
            phase /= phase.norm();
        }
        if scale == 0.0 {
            phase = ONE;
        }
        Self::new(space, out, scale, phase)
    }

    /// Unit simple tensor (scale 1) along the direction of the given factors.
    pub fn unit_from_factors(space: TensorSpace, factors: Vec<Vec<C64>>) -> Result<Self> {
        let v = Self::from_factors(space, factors)?;
        if v.scale == 0.0 {
            return Err(Error::NotUnit("a factor is zero".into()));
        }
        Ok(Self { scale: 1.0, ..v })
    }

    /// Standard basis pure tensor `e_{i_1} ⊗ ... ⊗ e_{i_d}`.
    pub fn basis(space: TensorSpace, idx: &[usize]) -> Result<Self> {
        let factors = space
            .dims()
            .iter()
            .zip(idx)
            .map(|(&n, &i)| {
                let mut f = vec![ZERO; n];
                f[i] = ONE;
                f
            })
            .collect();
        Self::new(space, factors, 1.0, ONE)
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn factors(&self) -> &[Vec<C64>] {
        &self.factors
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn phase(&self) -> C64 {
        self.phase
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale.max(0.0);
        self
    }

    /// Replace the phase; over the reals only the sign of `phase.re` is kept.
    pub fn with_phase(mut self, phase: C64) -> Self {
        self.phase = match self.space.field() {
            Field::Real => C64::new(if phase.re < 0.0 { -1.0 } else { 1.0 }, 0.0),
            Field::Complex if phase.norm() > 0.0 => phase / phase.norm(),
            Field::Complex => ONE,
        };
        self
    }

    /// "Unit simple tensor": scale 1, any unit phase.
    pub fn is_unit(&self) -> bool {
        (self.scale - 1.0).abs() <= UNIT_TOL
    }

    /// Entry `(i_1, ..., i_d)` equals `scale * phase * prod_e factor_e[i_e]`.
    pub fn assemble(&self) -> DenseTensor {
        let c = self.phase * self.scale;
        let mut data = outer(&self.factors);
        for x in &mut data {
            *x *= c;
        }
        if self.space.field() == Field::Real {
            for x in &mut data {
                x.im = 0.0;
            }
        }
        DenseTensor::new(self.space.clone(), data).expect("shape checked at construction")
    }

    /// `<S, v>` computed by contraction, without assembling `v`.
    pub fn inner_with(&self, s: &DenseTensor) -> Result<C64> {
        self.space.ensure_same(s.space())?;
        Ok(contract_all(s, &self.factors) * self.phase.conj() * self.scale)
    }

    /// `v ⊠ w`: mode-wise Kronecker of the factors; scales and phases multiply.
    pub fn kron(&self, other: &SimpleTensor) -> Result<SimpleTensor> {
        let space = self.space.kron(&other.space)?;
        let factors = self.factors.iter().zip(&other.factors).map(|(a, b)| vec_kron(a, b)).collect();
        Ok(SimpleTensor {
            space,
            factors,
            scale: self.scale * other.scale,
            phase: self.phase * other.phase,
        })
    }

    /// Embed into `self.space ⊕ other_space` (leading block) or
    /// `other_space ⊕ self.space` (trailing block) by zero padding.
    pub fn embed_direct_sum(&self, other_space: &TensorSpace, leading: bool) -> Result<SimpleTensor> {
        let space = if leading {
            self.space.direct_sum(other_space)?
        } else {
            other_space.direct_sum(&self.space)?
        };
        let factors = self
            .factors
            .iter()
            .zip(other_space.dims())
            .map(|(f, &m)| {
                let pad = vec![ZERO; m];
                if leading {
                    f.iter().copied().chain(pad).collect()
                } else {
                    pad.into_iter().chain(f.iter().copied()).collect()
                }
            })
            .collect();
        Ok(SimpleTensor { space, factors, scale: self.scale, phase: self.phase })
    }
}

fn check_shape(space: &TensorSpace, factors: &[Vec<C64>]) -> Result<()> {
    if factors.len() != space.order() {
        return Err(Error::DimensionMismatch(format!(
            "{} factors for a space of order {}",
            factors.len(),
            space.order()
        )));
    }
    for (e, (f, &n)) in factors.iter().zip(space.dims()).enumerate() {
        if f.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "factor {e} has length {} but mode dimension is {n}",
                f.len()
            )));
        }
        if space.field() == Field::Real && f.iter().any(|x| x.im != 0.0) {
            return Err(Error::ComplexEntryInRealTensor(e));
        }
    }
    Ok(())
}

fn argmax_modulus(v: &[C64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.norm() > v[best].norm() {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Distribution;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn outer_product_of_basis_vectors() {
        let space = TensorSpace::real(&[2, 2]).unwrap();
        let v = SimpleTensor::new(space, vec![vec![r(1.0), r(0.0)], vec![r(0.0), r(1.0)]], 1.0, ONE)
            .unwrap();
        let m = v.assemble();
        assert_eq!(m.data(), &[r(0.0), r(1.0), r(0.0), r(0.0)]);
    }

    #[test]
    fn zero_scale_assembles_to_zero() {
        let space = TensorSpace::real(&[2, 3]).unwrap();
        let v = SimpleTensor::basis(space, &[1, 2]).unwrap().with_scale(0.0);
        assert!(v.assemble().is_zero());
    }

    #[test]
    fn scaled_assembly() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let space = TensorSpace::real(&[2, 2]).unwrap();
        let v = SimpleTensor::new(space, vec![vec![r(h), r(h)], vec![r(1.0), r(0.0)]], 2.0, ONE).unwrap();
        let m = v.assemble();
        let s2 = 2f64.sqrt();
        for (got, want) in m.data().iter().zip([s2, 0.0, s2, 0.0]) {
            assert!((got.re - want).abs() < 1e-15);
        }
        assert!((m.norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_unit_factors() {
        let space = TensorSpace::real(&[2]).unwrap();
        assert!(SimpleTensor::new(space.clone(), vec![vec![r(1.0), r(1.0)]], 1.0, ONE).is_err());
        assert!(SimpleTensor::new(space.clone(), vec![vec![r(1.0)]], 1.0, ONE).is_err());
        assert!(SimpleTensor::new(space, vec![vec![r(1.0), r(0.0)]], 1.0, C64::new(0.0, 1.0)).is_err());
    }

    #[test]
    fn canonicalization_moves_norms_and_signs() {
        let space = TensorSpace::real(&[2, 2]).unwrap();
        let raw = vec![vec![r(0.0), r(-3.0)], vec![r(4.0), r(0.0)]];
        let v = SimpleTensor::from_factors(space.clone(), raw.clone()).unwrap();
        assert_eq!(v.scale(), 12.0);
        assert_eq!(v.phase(), r(-1.0));
        assert_eq!(v.factors()[0], vec![r(0.0), r(1.0)]);
        let direct = DenseTensor::new(space, crate::tensor::outer(&raw)).unwrap();
        assert_eq!(v.assemble(), direct);
    }

    #[test]
    fn complex_canonicalization_reproduces_tensor() {
        let space = TensorSpace::complex(&[2, 3]).unwrap();
        let raw = crate::tensor::random_factor(&space, 77);
        let v = SimpleTensor::from_factors(space.clone(), raw.clone()).unwrap();
        let direct = DenseTensor::new(space, crate::tensor::outer(&raw)).unwrap();
        let diff = v.assemble().sub(&direct).unwrap().norm();
        assert!(diff < 1e-14, "{diff}");
        assert!((v.assemble().norm() - v.scale()).abs() < 1e-12);
    }

    #[test]
    fn inner_with_matches_assembled_inner() {
        let space = TensorSpace::complex(&[2, 2, 3]).unwrap();
        let s = DenseTensor::random(&space, 1, Distribution::Gaussian);
        let v = SimpleTensor::from_factors(space.clone(), crate::tensor::random_factor(&space, 2)).unwrap();
        let a = v.inner_with(&s).unwrap();
        let b = s.inner(&v.assemble()).unwrap();
        assert!((a - b).norm() < 1e-13);
    }

    #[test]
    fn kron_of_simple_is_kron_of_assemblies() {
        let su = TensorSpace::complex(&[2, 2, 2]).unwrap();
        let sv = TensorSpace::complex(&[2, 3, 1]).unwrap();
        let v = SimpleTensor::from_factors(su.clone(), crate::tensor::random_factor(&su, 3)).unwrap();
        let w = SimpleTensor::from_factors(sv.clone(), crate::tensor::random_factor(&sv, 4)).unwrap();
        let lhs = v.kron(&w).unwrap().assemble();
        let rhs = v.assemble().kron(&w.assemble()).unwrap();
        assert!(lhs.sub(&rhs).unwrap().norm() < 1e-12);
    }

    #[test]
    fn embedding_preserves_inner_products() {
        let su = TensorSpace::real(&[2, 2]).unwrap();
        let sv = TensorSpace::real(&[1, 3]).unwrap();
        let a = DenseTensor::random(&su, 1, Distribution::Gaussian);
        let b = DenseTensor::random(&sv, 2, Distribution::Gaussian);
        let u = SimpleTensor::unit_from_factors(su.clone(), crate::tensor::random_factor(&su, 5)).unwrap();
        let w = SimpleTensor::unit_from_factors(sv.clone(), crate::tensor::random_factor(&sv, 6)).unwrap();
        let sum = a.direct_sum(&b).unwrap();
        let eu = u.embed_direct_sum(&sv, true).unwrap();
        let ew = w.embed_direct_sum(&su, false).unwrap();
        assert!(eu.is_unit() && ew.is_unit());
        assert!((eu.inner_with(&sum).unwrap() - u.inner_with(&a).unwrap()).norm() < 1e-14);
        assert!((ew.inner_with(&sum).unwrap() - w.inner_with(&b).unwrap()).norm() < 1e-14);
    }
}

use crate::error::{Error, Result};
use crate::spectral::Exponent;
use crate::tensor::{for_each_index, DenseTensor, SimpleTensor, TensorSpace, TensorTuple, C64, ONE, ZERO};

/// `sqrt(prod_{e != e*} n_e) * ||R||` with `e*` the largest mode: expanding `R`
/// into its fibers along `e*` gives a decomposition of at most this cost.
pub fn nuclear_envelope(r: &DenseTensor) -> f64 {
    let dims = r.space().dims();
    let (_, star) = largest_mode(dims);
    let others = r.space().total_dim() / dims[star];
    (others as f64).sqrt() * r.norm()
}

/// `(n_e*, e*)` with `e*` the first mode of largest dimension.
pub(crate) fn largest_mode(dims: &[usize]) -> (usize, usize) {
    let mut star = 0;
    for (e, &n) in dims.iter().enumerate() {
        if n > dims[star] {
            star = e;
        }
    }
    (dims[star], star)
}

/// Real dimension of `U^r` plus one.
pub fn caratheodory_max_atoms(space: &TensorSpace, r: usize) -> usize {
    r * space.real_dim() + 1
}

/// `S_i = sum_j coefficients[i][j] * atoms[j] + residuals[i]` with unit simple
/// atoms; the cost is `sum_j ||coefficients[·][j]||_β`.
#[derive(Debug, Clone, PartialEq)]
pub struct TupleDecomposition {
    pub space: TensorSpace,
    pub atoms: Vec<SimpleTensor>,
    /// `r x m`, one row per tuple member.
    pub coefficients: Vec<Vec<C64>>,
    pub residuals: Vec<DenseTensor>,
    pub beta: Exponent,
}

impl TupleDecomposition {
    pub fn empty(space: TensorSpace, r: usize, beta: Exponent) -> Self {
        let residuals = vec![DenseTensor::zeros(space.clone()); r];
        Self { space, atoms: Vec::new(), coefficients: vec![Vec::new(); r], residuals, beta }
    }

    /// Build from atoms and coefficients, computing residuals against `s`.
    pub fn with_residuals(
        s: &TensorTuple,
        atoms: Vec<SimpleTensor>,
        coefficients: Vec<Vec<C64>>,
        beta: Exponent,
    ) -> Result<Self> {
        if coefficients.len() != s.len() || coefficients.iter().any(|row| row.len() != atoms.len()) {
            return Err(Error::DimensionMismatch("coefficient matrix must be r x m".into()));
        }
        for a in &atoms {
            s.space().ensure_same(a.space())?;
        }
        let mut d = Self {
            space: s.space().clone(),
            atoms,
            coefficients,
            residuals: s.members().to_vec(),
            beta,
        };
        let assembled: Vec<DenseTensor> = d.atoms.iter().map(SimpleTensor::assemble).collect();
        for (row, r) in d.coefficients.iter().zip(&mut d.residuals) {
            for (c, a) in row.iter().zip(&assembled) {
                r.axpy(-c, a);
            }
        }
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn members(&self) -> usize {
        self.coefficients.len()
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        self.coefficients.iter().map(|row| row[j]).collect()
    }

    pub fn column_cost(&self, j: usize) -> f64 {
        self.beta.norm_c(&self.column(j))
    }

    pub fn cost(&self) -> f64 {
        (0..self.len()).map(|j| self.column_cost(j)).sum()
    }

    pub fn residual_norm(&self) -> f64 {
        self.residuals.iter().map(DenseTensor::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn envelope(&self) -> f64 {
        self.residuals.iter().map(nuclear_envelope).sum()
    }

    /// Certified upper bound on `[S]_β★`.
    pub fn upper(&self) -> f64 {
        self.cost() + self.envelope()
    }

    /// `sum_j coefficients[i][j] * atoms[j]` for every member.
    pub fn reconstruct(&self) -> Vec<DenseTensor> {
        let assembled: Vec<DenseTensor> = self.atoms.iter().map(SimpleTensor::assemble).collect();
        self.coefficients
            .iter()
            .map(|row| {
                let mut t = DenseTensor::zeros(self.space.clone());
                for (c, a) in row.iter().zip(&assembled) {
                    t.axpy(*c, a);
                }
                t
            })
            .collect()
    }

    /// Largest entrywise deviation of `sum + residual` from `s`.
    pub fn max_deviation(&self, s: &TensorTuple) -> Result<f64> {
        if s.len() != self.members() {
            return Err(Error::DimensionMismatch("tuple length differs".into()));
        }
        let mut worst: f64 = 0.0;
        for ((rec, r), m) in self.reconstruct().iter().zip(&self.residuals).zip(s.members()) {
            m.space().ensure_same(rec.space())?;
            for ((a, b), c) in rec.data().iter().zip(r.data()).zip(m.data()) {
                worst = worst.max((a + b - c).norm());
            }
        }
        Ok(worst)
    }

    /// Product decomposition of `S ⊠ T`: atoms `u_j ⊠ v_l` (j-major),
    /// coefficients `l_{i,j} * m_{k,l}` on member `(i, k)` (i-major).
    /// Residuals are recomputed against the supplied product tuple.
    pub fn kron(&self, other: &TupleDecomposition, product: &TensorTuple) -> Result<TupleDecomposition> {
        if self.beta != other.beta {
            return Err(Error::InvalidCase("product of decompositions with different β".into()));
        }
        let mut atoms = Vec::with_capacity(self.len() * other.len());
        for u in &self.atoms {
            for v in &other.atoms {
                atoms.push(u.kron(v)?);
            }
        }
        let mut coefficients = Vec::with_capacity(self.members() * other.members());
        for row_s in &self.coefficients {
            for row_t in &other.coefficients {
                coefficients.push(row_s.iter().flat_map(|a| row_t.iter().map(move |b| a * b)).collect());
            }
        }
        TupleDecomposition::with_residuals(product, atoms, coefficients, self.beta)
    }

    /// Concatenated decomposition of `S ⊕ T` (member-wise direct sums).
    pub fn direct_sum(&self, other: &TupleDecomposition) -> Result<TupleDecomposition> {
        if self.members() != other.members() || self.beta != other.beta {
            return Err(Error::InvalidCase("direct sum needs matching tuple length and β".into()));
        }
        let mut atoms = Vec::with_capacity(self.len() + other.len());
        for a in &self.atoms {
            atoms.push(a.embed_direct_sum(&other.space, true)?);
        }
        for a in &other.atoms {
            atoms.push(a.embed_direct_sum(&self.space, false)?);
        }
        let coefficients = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| a.iter().chain(b).copied().collect())
            .collect();
        let residuals = self
            .residuals
            .iter()
            .zip(&other.residuals)
            .map(|(a, b)| a.direct_sum(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(TupleDecomposition {
            space: self.space.direct_sum(&other.space)?,
            atoms,
            coefficients,
            residuals,
            beta: self.beta,
        })
    }

    pub(crate) fn push_column(&mut self, atom: SimpleTensor, column: Vec<C64>) {
        self.atoms.push(atom);
        for (row, c) in self.coefficients.iter_mut().zip(column) {
            row.push(c);
        }
    }

    pub(crate) fn remove_column(&mut self, j: usize) {
        self.atoms.remove(j);
        for row in &mut self.coefficients {
            row.remove(j);
        }
    }

    /// Drop columns whose coefficients are all below `tol` in modulus.
    pub(crate) fn prune(&mut self, tol: f64) {
        let mut j = 0;
        while j < self.len() {
            if self.column(j).iter().all(|c| c.norm() <= tol) {
                self.remove_column(j);
            } else {
                j += 1;
            }
        }
    }

    /// Recompute residuals from `s`, keeping atoms and coefficients.
    pub(crate) fn refresh_residuals(&mut self, s: &TensorTuple) {
        let fresh = Self::with_residuals(s, self.atoms.clone(), self.coefficients.clone(), self.beta)
            .expect("shapes are preserved");
        self.residuals = fresh.residuals;
    }

    /// Move every residual into fiber atoms along the largest mode. Each
    /// fiber `f` becomes one atom of cost `||f||`, and the total added cost
    /// is at most the envelope of the residuals.
    pub(crate) fn absorb_residuals(&mut self, s: &TensorTuple) {
        let dims = self.space.dims().to_vec();
        let (n_star, star) = largest_mode(&dims);
        let mut reduced = dims.clone();
        reduced[star] = 1;
        let strides = self.space.strides();
        let r = self.members();
        for i in 0..r {
            let res = self.residuals[i].clone();
            let data = res.data();
            for_each_index(&reduced, |_, idx| {
                let base: usize = idx.iter().zip(&strides).map(|(a, b)| a * b).sum();
                let fiber: Vec<C64> = (0..n_star).map(|k| data[base + k * strides[star]]).collect();
                let norm = fiber.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return;
                }
                let factors = dims
                    .iter()
                    .enumerate()
                    .map(|(e, &n)| {
                        if e == star {
                            fiber.clone()
                        } else {
                            let mut f = vec![ZERO; n];
                            f[idx[e]] = ONE;
                            f
                        }
                    })
                    .collect();
                let Ok(atom) = SimpleTensor::from_factors(self.space.clone(), factors) else {
                    return;
                };
                let weight = C64::new(atom.scale(), 0.0);
                let mut column = vec![ZERO; r];
                column[i] = weight;
                self.push_column(atom.with_scale(1.0), column);
            });
        }
        self.refresh_residuals(s);
    }

    /// Conic Carathéodory reduction: while the columns, viewed as points of
    /// the real space `U^r`, are linearly dependent, move along a null
    /// direction that does not raise the cost until one column vanishes.
    pub(crate) fn reduce(&mut self, s: &TensorTuple) {
        let real_dim = self.members() * self.space.real_dim();
        let complex = self.space.field() == crate::tensor::Field::Complex;
        while self.len() > real_dim {
            let assembled: Vec<DenseTensor> = self.atoms.iter().map(SimpleTensor::assemble).collect();
            let points: Vec<Vec<f64>> = (0..self.len())
                .map(|j| {
                    let mut p = Vec::with_capacity(real_dim);
                    for row in &self.coefficients {
                        for x in assembled[j].data() {
                            let v = row[j] * x;
                            p.push(v.re);
                            if complex {
                                p.push(v.im);
                            }
                        }
                    }
                    p
                })
                .collect();
            let Some(mut c) = crate::linalg::real_null_vector(&points, real_dim) else {
                break;
            };
            let costs: Vec<f64> = (0..self.len()).map(|j| self.column_cost(j)).collect();
            let slope: f64 = c.iter().zip(&costs).map(|(a, b)| a * b).sum();
            if slope < 0.0 || (slope == 0.0 && c.iter().all(|&x| x <= 0.0)) {
                c.iter_mut().for_each(|x| *x = -*x);
            }
            let mut t = f64::INFINITY;
            let mut gone = 0;
            for (j, &cj) in c.iter().enumerate() {
                if cj > 0.0 && 1.0 / cj < t {
                    t = 1.0 / cj;
                    gone = j;
                }
            }
            if !t.is_finite() {
                break;
            }
            for (j, &cj) in c.iter().enumerate() {
                let f = (1.0 - t * cj).max(0.0);
                for row in &mut self.coefficients {
                    row[j] *= f;
                }
            }
            self.remove_column(gone);
            self.prune(0.0);
        }
        self.refresh_residuals(s);
    }
}

/// Nuclear-norm decomposition `S = sum_j weights[j] * atoms[j] + residual`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub atoms: Vec<SimpleTensor>,
    pub weights: Vec<C64>,
    pub residual: DenseTensor,
}

impl Decomposition {
    pub fn cost(&self) -> f64 {
        self.weights.iter().map(|w| w.norm()).sum()
    }

    pub fn envelope(&self) -> f64 {
        nuclear_envelope(&self.residual)
    }

    pub fn upper(&self) -> f64 {
        self.cost() + self.envelope()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn to_tuple(&self) -> TupleDecomposition {
        TupleDecomposition {
            space: self.residual.space().clone(),
            atoms: self.atoms.clone(),
            coefficients: vec![self.weights.clone()],
            residuals: vec![self.residual.clone()],
            beta: Exponent::ONE,
        }
    }

    /// Largest entrywise deviation of `sum + residual` from `s`.
    pub fn max_deviation(&self, s: &DenseTensor) -> Result<f64> {
        self.to_tuple().max_deviation(&TensorTuple::single(s.clone()))
    }

    /// The product decomposition `{w_j * w'_l, u_j ⊠ v_l}` of `S ⊠ T`.
    pub fn kron(&self, other: &Decomposition, product: &DenseTensor) -> Result<Decomposition> {
        let t = self.to_tuple().kron(&other.to_tuple(), &TensorTuple::single(product.clone()))?;
        Ok(Decomposition::from(t))
    }

    pub fn direct_sum(&self, other: &Decomposition) -> Result<Decomposition> {
        Ok(Decomposition::from(self.to_tuple().direct_sum(&other.to_tuple())?))
    }
}

impl From<TupleDecomposition> for Decomposition {
    /// Keeps the first member; meant for `r = 1`.
    fn from(t: TupleDecomposition) -> Self {
        Decomposition {
            atoms: t.atoms,
            weights: t.coefficients.into_iter().next().unwrap_or_default(),
            residual: t.residuals.into_iter().next().expect("at least one member"),
        }
    }
}

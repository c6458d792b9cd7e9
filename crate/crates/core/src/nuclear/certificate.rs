//! Self-contained certificates: everything needed to re-verify a bracket
//! from the tensor file alone, without running any optimization.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::decomposition::{nuclear_envelope, TupleDecomposition};
use crate::error::{Error, Result};
use crate::spectral::{tuple_alpha_upper, Exponent, NormBracket, Witness};
use crate::tensor::io::{Scalar, TensorFile};
use crate::tensor::{DenseTensor, Field, SimpleTensor, TensorSpace, TensorTuple, C64};

const CHECK_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    Frobenius,
    Spectral,
    Nuclear,
    Alpha,
    BetaStar,
}

impl NormKind {
    pub fn name(self) -> &'static str {
        match self {
            NormKind::Frobenius => "frobenius",
            NormKind::Spectral => "spectral",
            NormKind::Nuclear => "nuclear",
            NormKind::Alpha => "alpha",
            NormKind::BetaStar => "beta-star",
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [NormKind::Frobenius, NormKind::Spectral, NormKind::Nuclear, NormKind::Alpha, NormKind::BetaStar]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidCase(format!("unknown norm `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomRecord {
    pub factors: Vec<Vec<Scalar>>,
    pub scale: f64,
    pub phase: Scalar,
}

impl AtomRecord {
    fn encode(a: &SimpleTensor) -> Self {
        let field = a.space().field();
        AtomRecord {
            factors: a.factors().iter().map(|f| f.iter().map(|&x| Scalar::encode(x, field)).collect()).collect(),
            scale: a.scale(),
            phase: Scalar::encode(a.phase(), field),
        }
    }

    fn decode(&self, space: &TensorSpace) -> Result<SimpleTensor> {
        let field = space.field();
        let factors = self
            .factors
            .iter()
            .map(|f| f.iter().map(|s| s.decode(field)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        SimpleTensor::new(space.clone(), factors, self.scale, self.phase.decode(field)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub norm: NormKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<Exponent>,
    pub shape: Vec<usize>,
    pub field: Field,
    pub members: usize,
    pub lower: f64,
    pub upper: f64,
    pub atoms: Vec<AtomRecord>,
    #[serde(default)]
    pub weights: Vec<Scalar>,
    #[serde(default)]
    pub coefficients: Vec<Vec<Scalar>>,
    pub residual_norm: f64,
    pub envelope: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<TensorFile>>,
    pub config_digest: String,
}

impl Certificate {
    fn base(norm: NormKind, exponent: Option<Exponent>, s: &TensorTuple, lower: f64, upper: f64, digest: &str) -> Self {
        Certificate {
            norm,
            exponent,
            shape: s.space().dims().to_vec(),
            field: s.space().field(),
            members: s.len(),
            lower,
            upper,
            atoms: Vec::new(),
            weights: Vec::new(),
            coefficients: Vec::new(),
            residual_norm: 0.0,
            envelope: 0.0,
            witness: None,
            config_digest: digest.to_string(),
        }
    }

    pub fn frobenius(s: &TensorTuple, digest: &str) -> Self {
        let n = s.norm();
        Self::base(NormKind::Frobenius, None, s, n, n, digest)
    }

    /// Spectral or `[·]_α` bracket: the witness `u` is stored as the only atom.
    pub fn spectral(norm: NormKind, alpha: Option<Exponent>, s: &TensorTuple, b: &NormBracket, digest: &str) -> Self {
        let mut c = Self::base(norm, alpha, s, b.lower, b.upper, digest);
        if let Some(Witness::Simple(u)) = &b.lower_witness {
            c.atoms.push(AtomRecord::encode(u));
        }
        c
    }

    /// Nuclear or `[·]_β★` bracket with its decomposition and dual witness.
    pub fn decomposition(
        norm: NormKind,
        beta: Option<Exponent>,
        s: &TensorTuple,
        b: &NormBracket,
        d: &TupleDecomposition,
        digest: &str,
    ) -> Self {
        let field = s.space().field();
        let mut c = Self::base(norm, beta, s, b.lower, b.upper, digest);
        c.atoms = d.atoms.iter().map(AtomRecord::encode).collect();
        c.coefficients = d
            .coefficients
            .iter()
            .map(|row| row.iter().map(|&x| Scalar::encode(x, field)).collect())
            .collect();
        if norm == NormKind::Nuclear {
            c.weights = c.coefficients.first().cloned().unwrap_or_default();
        }
        c.residual_norm = d.residual_norm();
        c.envelope = d.envelope();
        if let Some(Witness::Dual(w)) = &b.lower_witness {
            c.witness = Some(w.members().iter().map(TensorFile::from).collect());
        }
        c
    }
}

/// Outcome of [`check_certificate`]: every violated invariant, by name.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CertificateCheck {
    pub failures: Vec<String>,
}

impl CertificateCheck {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

fn at_most(a: f64, b: f64) -> bool {
    a <= b + CHECK_TOL * (1.0 + b.abs())
}

fn alpha_of(c: &Certificate) -> Result<Exponent> {
    Ok(match c.norm {
        NormKind::Spectral => Exponent::TWO,
        NormKind::Nuclear => Exponent::INF,
        NormKind::Alpha => c.exponent.ok_or(Error::MissingExponent("alpha"))?,
        NormKind::BetaStar => c.exponent.ok_or(Error::MissingExponent("beta"))?.conjugate(),
        NormKind::Frobenius => Exponent::TWO,
    })
}

/// Re-verify a certificate against the tuple it claims to describe. Shape or
/// format problems are errors; violated invariants are listed in the result.
pub fn check_certificate(c: &Certificate, s: &TensorTuple) -> Result<CertificateCheck> {
    let space = TensorSpace::new(c.shape.clone(), c.field)?;
    space.ensure_same(s.space())?;
    if c.members != s.len() {
        return Err(Error::DimensionMismatch(format!("certificate has {} members, got {}", c.members, s.len())));
    }
    let alpha = alpha_of(c)?;
    let mut out = CertificateCheck::default();
    out.require(c.lower >= 0.0 && c.lower.is_finite(), || format!("lower bound {} is not a nonnegative number", c.lower));
    out.require(at_most(c.lower, c.upper), || format!("lower {} exceeds upper {}", c.lower, c.upper));

    let mut atoms = Vec::with_capacity(c.atoms.len());
    for (j, a) in c.atoms.iter().enumerate() {
        match a.decode(&space) {
            Ok(v) => atoms.push(v),
            Err(e) => out.failures.push(format!("atom {j}: {e}")),
        }
    }
    if !out.is_valid() {
        return Ok(out);
    }

    match c.norm {
        NormKind::Frobenius => {
            let n = s.norm();
            let close = |x: f64| (x - n).abs() <= CHECK_TOL * (1.0 + n);
            out.require(close(c.lower) && close(c.upper), || format!("Frobenius norm is {n}"));
        }
        NormKind::Spectral | NormKind::Alpha => {
            out.require(atoms.len() <= 1, || "spectral certificates carry at most one atom".into());
            let attained = match atoms.first() {
                Some(u) => {
                    out.require(u.is_unit(), || "witness is not a unit simple tensor".into());
                    let vals: Vec<C64> = s.members().iter().map(|m| u.inner_with(m)).collect::<Result<_>>()?;
                    alpha.norm_c(&vals)
                }
                None => 0.0,
            };
            out.require(at_most(c.lower, attained), || format!("lower {} exceeds the witness value {attained}", c.lower));
            let flat = tuple_alpha_upper(s, alpha);
            out.require(at_most(flat, c.upper), || format!("upper {} is below the flattening bound {flat}", c.upper));
        }
        NormKind::Nuclear | NormKind::BetaStar => {
            let field = space.field();
            let rows: Vec<Vec<C64>> = if c.coefficients.is_empty() && c.members == 1 {
                vec![c.weights.iter().map(|x| x.decode(field)).collect::<Result<_>>()?]
            } else {
                c.coefficients
                    .iter()
                    .map(|row| row.iter().map(|x| x.decode(field)).collect::<Result<Vec<_>>>())
                    .collect::<Result<_>>()?
            };
            if c.norm == NormKind::Nuclear && !c.weights.is_empty() && !c.coefficients.is_empty() {
                out.require(c.coefficients.first() == Some(&c.weights), || "weights differ from coefficients".into());
            }
            for a in &atoms {
                out.require(a.is_unit(), || "atoms must have unit scale".into());
            }
            let beta = alpha.conjugate();
            let d = match TupleDecomposition::with_residuals(s, atoms, rows, beta) {
                Ok(d) => d,
                Err(e) => {
                    out.failures.push(format!("decomposition: {e}"));
                    return Ok(out);
                }
            };
            let scale = 1.0 + s.norm();
            let rn = d.residual_norm();
            out.require((rn - c.residual_norm).abs() <= RESIDUAL_TOL * scale, || {
                format!("recomputed residual norm {rn} differs from recorded {}", c.residual_norm)
            });
            let env: f64 = d.residuals.iter().map(nuclear_envelope).sum();
            out.require((env - c.envelope).abs() <= RESIDUAL_TOL * scale, || {
                format!("recomputed envelope {env} differs from recorded {}", c.envelope)
            });
            let bound = d.cost() + env;
            out.require(at_most(bound, c.upper), || format!("upper {} is below cost + envelope = {bound}", c.upper));

            let dual_value = match &c.witness {
                Some(files) => {
                    let w = files
                        .iter()
                        .map(|f| DenseTensor::try_from(f.clone()))
                        .collect::<Result<Vec<_>>>()?;
                    let w = TensorTuple::new(w)?;
                    if w.len() != s.len() {
                        return Err(Error::DimensionMismatch("witness tuple length differs".into()));
                    }
                    s.space().ensure_same(w.space())?;
                    if w.is_zero() {
                        0.0
                    } else {
                        s.inner(&w)?.norm() / tuple_alpha_upper(&w, alpha)
                    }
                }
                None if s.is_zero() => 0.0,
                None => s.inner(s)?.norm() / tuple_alpha_upper(s, alpha),
            };
            out.require(at_most(c.lower, dual_value), || {
                format!("lower {} exceeds the dual witness bound {dual_value}", c.lower)
            });
        }
    }
    Ok(out)
}

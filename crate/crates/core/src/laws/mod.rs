//! Executable catalogue of the norm identities: each law is checked as a
//! chain of inequalities between certified brackets on seeded instances,
//! plus the exact algebraic identities that make the chain close.
//!
//! Flattening bounds are only multiplicative (and max-additive under `⊕`)
//! mode by mode, so wherever a law compares a product or sum against its
//! factors, the comparison is made per mode and then minimized or
//! maximized over modes. The plain interval intersection is checked too.

mod catalogue;
mod report;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use report::{Check, CheckKind, Failure, LawReport, LawSummary, Quantity, SuiteReport, Summary};

use crate::error::{Error, Result};
use crate::exec;
use crate::spectral::Exponent;
use crate::tensor::io::TensorFile;
use crate::tensor::{mix_seed, DenseTensor, Distribution, Field, TensorSpace, TensorTuple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LawId {
    /// `||S ⊠ T|| = ||S|| ||T||`.
    FrobMult,
    /// `[S ⊠ T]_α = [S]_α [T]_α`.
    SpecMult,
    /// `||S ⊠ T||★ = ||S||★ ||T||★`.
    NucMult,
    /// `[S ⊠ T]_β★ = [S]_β★ [T]_β★`.
    BetaMult,
    /// `|<S, T>| <= [S]_α [T]_β★`.
    DualIneq,
    /// Equality in the above for the constructed dual witness.
    DualTight,
    /// `||S ⊠ T||_X >= ||S||_X ||T||_X` for the dual-norm lower bounds.
    CrossDual,
    /// `||S ⊕ T||★ = ||S||★ + ||T||★`.
    DirsumNuc,
    /// `||A ⊕ B||_σ = max(||A||_σ, ||B||_σ)`.
    DirsumSpec,
    /// Decompositions need at most `dim_R U^r + 1` atoms.
    CaraBound,
}

impl LawId {
    pub const ALL: [LawId; 10] = [
        LawId::FrobMult,
        LawId::SpecMult,
        LawId::NucMult,
        LawId::BetaMult,
        LawId::DualIneq,
        LawId::DualTight,
        LawId::CrossDual,
        LawId::DirsumNuc,
        LawId::DirsumSpec,
        LawId::CaraBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LawId::FrobMult => "FROB_MULT",
            LawId::SpecMult => "SPEC_MULT",
            LawId::NucMult => "NUC_MULT",
            LawId::BetaMult => "BETA_MULT",
            LawId::DualIneq => "DUAL_INEQ",
            LawId::DualTight => "DUAL_TIGHT",
            LawId::CrossDual => "CROSS_DUAL",
            LawId::DirsumNuc => "DIRSUM_NUC",
            LawId::DirsumSpec => "DIRSUM_SPEC",
            LawId::CaraBound => "CARA_BOUND",
        }
    }

    /// Uses `⊠`, so the case needs a right-hand space of the same order.
    pub fn is_product(self) -> bool {
        matches!(self, LawId::FrobMult | LawId::SpecMult | LawId::NucMult | LawId::BetaMult | LawId::CrossDual)
    }

    pub fn is_direct_sum(self) -> bool {
        matches!(self, LawId::DirsumNuc | LawId::DirsumSpec)
    }

    /// Acts on single tensors rather than tuples.
    pub fn is_single(self) -> bool {
        matches!(self, LawId::FrobMult | LawId::NucMult | LawId::DirsumNuc | LawId::DirsumSpec)
    }

    /// Needs an `α` / `β` pair.
    pub fn uses_exponent(self) -> bool {
        matches!(
            self,
            LawId::SpecMult | LawId::BetaMult | LawId::DualIneq | LawId::DualTight | LawId::CrossDual | LawId::CaraBound
        )
    }
}

impl fmt::Display for LawId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LawId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LawId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidCase(format!("unknown law id {s:?}")))
    }
}

fn one() -> usize {
    1
}
fn default_abs_tol() -> f64 {
    1e-9
}
fn default_identity_tol() -> f64 {
    1e-12
}
fn default_gap_tol() -> f64 {
    1e-3
}

/// One seeded instance of a law. Tensors are drawn from `left` / `right`
/// with the case seed unless given explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawCase {
    pub law_id: LawId,
    pub left: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<Vec<usize>>,
    pub field: Field,
    pub seed: u64,
    /// Tuple length `r` of the left operand.
    #[serde(default = "one")]
    pub members: usize,
    /// Tuple length `s` of the right operand.
    #[serde(default = "one")]
    pub right_members: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Exponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Exponent>,
    /// Slack of every inequality.
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    /// Relative tolerance of exact algebraic identities.
    #[serde(default = "default_identity_tol")]
    pub identity_tol: f64,
    /// Relative slack when intersecting brackets.
    #[serde(default = "default_gap_tol")]
    pub bracket_gap_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left_tensors: Option<Vec<TensorFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_tensors: Option<Vec<TensorFile>>,
}

impl LawCase {
    pub fn new(law_id: LawId, left: &[usize], right: Option<&[usize]>, field: Field, seed: u64) -> Self {
        LawCase {
            law_id,
            left: left.to_vec(),
            right: right.map(<[usize]>::to_vec),
            field,
            seed,
            members: 1,
            right_members: 1,
            alpha: None,
            beta: None,
            abs_tol: default_abs_tol(),
            identity_tol: default_identity_tol(),
            bracket_gap_tol: default_gap_tol(),
            left_tensors: None,
            right_tensors: None,
        }
    }

    pub fn with_members(mut self, r: usize, s: usize) -> Self {
        self.members = r;
        self.right_members = s;
        self
    }

    pub fn with_alpha(mut self, alpha: Exponent) -> Self {
        self.alpha = Some(alpha);
        self.beta = Some(alpha.conjugate());
        self
    }

    pub fn with_beta(self, beta: Exponent) -> Self {
        self.with_alpha(beta.conjugate())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Every tolerance set to `tol` (zero makes the case fail by design).
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.abs_tol = tol;
        self.identity_tol = tol;
        self.bracket_gap_tol = tol;
        self
    }

    pub fn with_gap_tol(mut self, tol: f64) -> Self {
        self.bracket_gap_tol = tol;
        self
    }

    /// Explicit operands; dims, field and tuple lengths are taken from them.
    pub fn with_tensors(mut self, left: &[DenseTensor], right: Option<&[DenseTensor]>) -> Self {
        self.left = left[0].space().dims().to_vec();
        self.field = left[0].space().field();
        self.members = left.len();
        self.left_tensors = Some(left.iter().map(TensorFile::from).collect());
        if let Some(right) = right {
            self.right = Some(right[0].space().dims().to_vec());
            self.right_members = right.len();
            self.right_tensors = Some(right.iter().map(TensorFile::from).collect());
        }
        self
    }

    /// `α` from the case, or the conjugate of `β`, or 2.
    pub fn alpha(&self) -> Exponent {
        self.alpha.or(self.beta.map(Exponent::conjugate)).unwrap_or(Exponent::TWO)
    }

    pub fn beta(&self) -> Exponent {
        self.alpha().conjugate()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidCase(format!("{}: {m}", self.law_id)));
        if let (Some(a), Some(b)) = (self.alpha, self.beta) {
            if !a.is_conjugate_of(b) {
                return bad(format!("α = {a} and β = {b} are not Hölder conjugates"));
            }
        }
        for (name, t) in [("abs_tol", self.abs_tol), ("identity_tol", self.identity_tol), ("bracket_gap_tol", self.bracket_gap_tol)] {
            if !(t >= 0.0 && t.is_finite()) {
                return bad(format!("{name} must be finite and nonnegative"));
            }
        }
        if self.members == 0 || self.right_members == 0 {
            return bad("tuples need at least one member".into());
        }
        if self.law_id.is_single() && (self.members != 1 || self.right_members != 1) {
            return bad("this law acts on single tensors".into());
        }
        TensorSpace::new(self.left.clone(), self.field).map_err(|e| Error::InvalidCase(e.to_string()))?;
        let binary = self.law_id.is_product() || self.law_id.is_direct_sum();
        match (&self.right, binary) {
            (None, true) => return bad("needs a right-hand space".into()),
            (Some(r), true) => {
                TensorSpace::new(r.clone(), self.field).map_err(|e| Error::InvalidCase(e.to_string()))?;
                if r.len() != self.left.len() {
                    return bad(format!("orders differ: {} vs {}", self.left.len(), r.len()));
                }
            }
            (Some(r), false) if *r != self.left => return bad("the right-hand space must equal the left".into()),
            _ => {}
        }
        if self.law_id.is_direct_sum() && self.left.len() < 2 {
            return bad("direct-sum laws need order >= 2 (for vectors ⊕ is concatenation)".into());
        }
        if self.law_id == LawId::DualIneq && self.right_members != self.members {
            return bad("paired tuples need equal lengths".into());
        }
        Ok(())
    }

    fn explicit(&self, files: &Option<Vec<TensorFile>>, dims: &[usize], r: usize) -> Result<Option<TensorTuple>> {
        let Some(files) = files else { return Ok(None) };
        let members = files
            .iter()
            .cloned()
            .map(DenseTensor::try_from)
            .collect::<Result<Vec<_>>>()?;
        let t = TensorTuple::new(members).map_err(|e| Error::InvalidCase(e.to_string()))?;
        if t.len() != r || t.space().dims() != dims || t.space().field() != self.field {
            return Err(Error::InvalidCase(format!(
                "{}: explicit tensors do not match the declared dims, field or tuple length",
                self.law_id
            )));
        }
        Ok(Some(t))
    }

    /// The left and right operands (the right one drawn in the left space
    /// when the law has no right-hand space).
    pub fn operands(&self) -> Result<(TensorTuple, TensorTuple)> {
        let left_space = TensorSpace::new(self.left.clone(), self.field)?;
        let right_dims = self.right.clone().unwrap_or_else(|| self.left.clone());
        let right_space = TensorSpace::new(right_dims.clone(), self.field)?;
        let s = match self.explicit(&self.left_tensors, &self.left, self.members)? {
            Some(t) => t,
            None => TensorTuple::random(&left_space, self.members, mix_seed(self.seed, 1), Distribution::Gaussian)?,
        };
        let t = match self.explicit(&self.right_tensors, &right_dims, self.right_members)? {
            Some(t) => t,
            None => TensorTuple::random(&right_space, self.right_members, mix_seed(self.seed, 2), Distribution::Gaussian)?,
        };
        Ok((s, t))
    }
}

/// Run one law. Only malformed cases are errors; a law that does not hold
/// is a report with `pass == false`.
pub fn run_law(case: &LawCase) -> Result<LawReport> {
    case.validate()?;
    let start = Instant::now();
    let rec = catalogue::run(case)?;
    Ok(rec.finish(case, start.elapsed()))
}

/// Run every case `repetitions` times. Repetition `k` of a case runs with
/// seed `mix_seed(mix_seed(base_seed, k), case.seed)`; reports come back in
/// (repetition, case) order whatever the thread schedule, and failing
/// reports carry the exact case that reproduces them.
pub fn run_suite(cases: &[LawCase], repetitions: usize, base_seed: u64) -> SuiteReport {
    let expanded: Vec<LawCase> = (0..repetitions)
        .flat_map(|k| {
            let rep_seed = mix_seed(base_seed, k as u64);
            cases.iter().map(move |c| c.clone().with_seed(mix_seed(rep_seed, c.seed)))
        })
        .collect();
    let reports = exec::map_slice(&expanded, true, |case| {
        let start = Instant::now();
        run_law(case).unwrap_or_else(|e| LawReport::failed(case, e.to_string(), start.elapsed()))
    });
    SuiteReport::assemble(reports, expanded)
}

/// Every law on both fields at three seeds. Seed index `k` picks the shapes
/// (2×2×2, 2×3×2 or matrices up to 4×4) and the exponent (1, 2, ∞).
pub fn default_suite() -> Vec<LawCase> {
    let exps = [Exponent::ONE, Exponent::TWO, Exponent::INF];
    let mut out = Vec::new();
    for law in LawId::ALL {
        for field in [Field::Real, Field::Complex] {
            for k in 0..3 {
                let (left, right): (&[usize], &[usize]) = match k {
                    0 => (&[2, 2, 2], &[2, 2, 2]),
                    1 => (&[2, 3, 2], &[2, 2, 2]),
                    _ if law.is_product() || law.is_direct_sum() => (&[3, 4], &[2, 2]),
                    _ => (&[4, 4], &[4, 4]),
                };
                let binary = law.is_product() || law.is_direct_sum();
                let mut case = LawCase::new(law, left, binary.then_some(right), field, k as u64);
                if !law.is_single() {
                    case = case.with_members(2, 2);
                }
                if law.uses_exponent() {
                    case = match law {
                        LawId::SpecMult | LawId::DualIneq | LawId::DualTight => case.with_alpha(exps[k]),
                        _ => case.with_beta(exps[k]),
                    };
                }
                out.push(case);
            }
        }
    }
    out
}

/// Cases with known values: `I₂ ⊠ I₂` (nuclear 4) and
/// `diag(2, 1) ⊕ diag(3)` (spectral 3, nuclear 6).
pub fn exact_cases() -> Vec<LawCase> {
    let i2 = DenseTensor::identity(2, Field::Real);
    let a = DenseTensor::from_real(&[2, 2], &[2.0, 0.0, 0.0, 1.0]).expect("2x2");
    let b = DenseTensor::from_real(&[1, 1], &[3.0]).expect("1x1");
    vec![
        LawCase::new(LawId::NucMult, &[2, 2], Some(&[2, 2]), Field::Real, 0).with_tensors(&[i2.clone()], Some(&[i2])),
        LawCase::new(LawId::DirsumSpec, &[2, 2], Some(&[1, 1]), Field::Real, 0)
            .with_tensors(&[a.clone()], Some(&[b.clone()])),
        LawCase::new(LawId::DirsumNuc, &[2, 2], Some(&[1, 1]), Field::Real, 0).with_tensors(&[a], Some(&[b])),
    ]
}

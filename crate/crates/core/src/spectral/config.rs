use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::Exponent;
use crate::error::{Error, Result};
use crate::tensor::{SimpleTensor, TensorTuple};

/// Solver settings shared by every bracket computation.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub rel_tol: f64,
    pub num_starts: usize,
    pub base_seed: u64,
    pub warm_starts: Vec<SimpleTensor>,
    pub alpha: Option<Exponent>,
    pub beta: Option<Exponent>,
    /// Run independent starts on the rayon pool (ignored without the
    /// `parallel` feature). Results are identical either way.
    pub parallel: bool,
    /// Cap on the number of atoms kept by the nuclear solvers.
    pub max_atoms: usize,
    pub penalty_rounds: usize,
    pub penalty_decay: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 500,
            rel_tol: 1e-10,
            num_starts: 16,
            base_seed: 0,
            warm_starts: Vec::new(),
            alpha: None,
            beta: None,
            parallel: true,
            max_atoms: 64,
            penalty_rounds: 5,
            penalty_decay: 10.0,
        }
    }
}

#[derive(Serialize)]
struct DigestView<'a> {
    max_iters: usize,
    rel_tol: f64,
    num_starts: usize,
    base_seed: u64,
    warm_starts: usize,
    alpha: Option<Exponent>,
    beta: Option<Exponent>,
    max_atoms: usize,
    penalty_rounds: usize,
    penalty_decay: f64,
    version: &'a str,
}

impl SolverConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.base_seed = seed;
        self
    }

    /// Set `alpha` and its Hölder conjugate `beta` together.
    pub fn with_alpha(mut self, alpha: Exponent) -> Self {
        self.alpha = Some(alpha);
        self.beta = Some(alpha.conjugate());
        self
    }

    /// Set `beta` and its Hölder conjugate `alpha` together.
    pub fn with_beta(mut self, beta: Exponent) -> Self {
        self.beta = Some(beta);
        self.alpha = Some(beta.conjugate());
        self
    }

    pub fn with_warm_starts(mut self, starts: Vec<SimpleTensor>) -> Self {
        self.warm_starts = starts;
        self
    }

    pub fn sequential(mut self) -> Self {
        self.parallel = false;
        self
    }

    /// Check the Hölder pairing and the numeric fields.
    pub fn validate(&self) -> Result<()> {
        if let (Some(a), Some(b)) = (self.alpha, self.beta) {
            if !a.is_conjugate_of(b) {
                return Err(Error::NotConjugate { alpha: a.value(), beta: b.value() });
            }
        }
        if self.max_iters == 0 || !(self.rel_tol > 0.0) || self.num_starts == 0 {
            return Err(Error::Malformed("max_iters, rel_tol and num_starts must be positive".into()));
        }
        Ok(())
    }

    /// `alpha`, falling back to the conjugate of `beta`.
    pub fn resolved_alpha(&self) -> Result<Exponent> {
        self.validate()?;
        self.alpha
            .or(self.beta.map(Exponent::conjugate))
            .ok_or(Error::MissingExponent("alpha"))
    }

    /// `beta`, falling back to the conjugate of `alpha`.
    pub fn resolved_beta(&self) -> Result<Exponent> {
        self.validate()?;
        self.beta
            .or(self.alpha.map(Exponent::conjugate))
            .ok_or(Error::MissingExponent("beta"))
    }

    /// Short hex digest of every setting that can change a result.
    pub fn digest(&self) -> String {
        let view = DigestView {
            max_iters: self.max_iters,
            rel_tol: self.rel_tol,
            num_starts: self.num_starts,
            base_seed: self.base_seed,
            warm_starts: self.warm_starts.len(),
            alpha: self.alpha,
            beta: self.beta,
            max_atoms: self.max_atoms,
            penalty_rounds: self.penalty_rounds,
            penalty_decay: self.penalty_decay,
            version: env!("CARGO_PKG_VERSION"),
        };
        let text = crate::json::to_machine_string(&view).expect("config is finite");
        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        for w in &self.warm_starts {
            for f in w.factors() {
                for x in f {
                    hasher.update(x.re.to_le_bytes());
                    hasher.update(x.im.to_le_bytes());
                }
            }
        }
        hasher.finalize().iter().take(16).map(|b| format!("{b:02x}")).collect()
    }
}

/// A dual object certifying a lower bound.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// A unit simple tensor `u` with `|<S, u>| = lower`.
    Simple(SimpleTensor),
    /// A dual tensor or tuple `W` with `lower = |<S, W>| / upper(W)`.
    Dual(TensorTuple),
}

/// How the upper end of a bracket was certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperMethod {
    /// The value is exact (zero tensor or Frobenius norm).
    Exact,
    /// Largest singular value of a single-mode flattening.
    Flattening,
    /// Hölder combination of per-member flattening bounds.
    HolderFlattening,
    /// Atomic decomposition cost plus the residual envelope.
    Decomposition,
}

/// A certified interval for a norm value.
#[derive(Debug, Clone, PartialEq)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: f64,
    pub lower_witness: Option<Witness>,
    pub upper_method: UpperMethod,
    pub iterations: usize,
    pub converged: bool,
}

/// Floating-point slack allowed between the two ends of a bracket.
pub const BRACKET_SLACK: f64 = 1e-9;

impl NormBracket {
    pub(crate) fn checked(self) -> Self {
        debug_assert!(self.lower >= 0.0, "negative lower bound {}", self.lower);
        debug_assert!(
            self.lower <= self.upper + BRACKET_SLACK * (1.0 + self.upper),
            "bracket out of order: [{}, {}]",
            self.lower,
            self.upper
        );
        self
    }

    pub fn gap(&self) -> f64 {
        (self.upper - self.lower).max(0.0)
    }

    /// Gap relative to the upper end (0 for a zero bracket).
    pub fn relative_gap(&self) -> f64 {
        if self.upper == 0.0 {
            0.0
        } else {
            self.gap() / self.upper
        }
    }

    /// Whether `x` lies in the bracket widened by `slack` on both sides.
    pub fn contains(&self, x: f64, slack: f64) -> bool {
        self.lower - slack <= x && x <= self.upper + slack
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{LawCase, LawId};
use crate::spectral::NormBracket;
use crate::tensor::{DenseTensor, Field, SimpleTensor, TensorTuple};

/// How a check compares `lhs` with `rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// `lhs = rhs`: passes iff the scaled deviation is strictly below the
    /// identity tolerance, so a zero tolerance always fails.
    Identity,
    /// `lhs <= rhs` up to the absolute tolerance.
    Inequality,
    /// Two intervals meet: `lhs` is the larger lower end, `rhs` the smaller
    /// upper end, with absolute plus relative slack.
    Intersection,
}

/// One comparison of a law's chain, with its signed margin (`>= 0` passes
/// for inequalities and intersections, `> 0` for identities).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

/// A named certified interval (degenerate for exact quantities).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawReport {
    pub law_id: LawId,
    pub seed: u64,
    pub field: Field,
    pub pass: bool,
    pub quantities: Vec<Quantity>,
    pub checks: Vec<Check>,
    /// Smallest check margin; negative (or zero for an identity) on failure.
    pub margin: f64,
    pub witness_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Wall time; kept out of serialized reports so they stay reproducible.
    #[serde(skip)]
    pub runtime: Duration,
}

impl LawReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn quantity(&self, name: &str) -> Option<&Quantity> {
        self.quantities.iter().find(|q| q.name == name)
    }

    pub(crate) fn failed(case: &LawCase, err: String, runtime: Duration) -> Self {
        LawReport {
            law_id: case.law_id,
            seed: case.seed,
            field: case.field,
            pass: false,
            quantities: Vec::new(),
            checks: Vec::new(),
            margin: f64::NEG_INFINITY,
            witness_digest: String::new(),
            error: Some(err),
            runtime,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawSummary {
    pub law_id: LawId,
    pub total: usize,
    pub passed: usize,
    pub worst_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub worst_margin: f64,
    pub per_law: Vec<LawSummary>,
}

/// A failing report with the case that reproduces it through `run_law`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub index: usize,
    pub law_id: LawId,
    pub seed: u64,
    pub margin: f64,
    pub case: LawCase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub reports: Vec<LawReport>,
    pub summary: Summary,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn runtime(&self) -> Duration {
        self.reports.iter().map(|r| r.runtime).sum()
    }

    pub(crate) fn assemble(reports: Vec<LawReport>, cases: Vec<LawCase>) -> Self {
        let worst = |it: &mut dyn Iterator<Item = f64>| it.fold(f64::INFINITY, f64::min);
        let per_law = LawId::ALL
            .iter()
            .filter_map(|&id| {
                let rs: Vec<&LawReport> = reports.iter().filter(|r| r.law_id == id).collect();
                (!rs.is_empty()).then(|| LawSummary {
                    law_id: id,
                    total: rs.len(),
                    passed: rs.iter().filter(|r| r.pass).count(),
                    worst_margin: worst(&mut rs.iter().map(|r| r.margin)),
                })
            })
            .collect();
        let failures = reports
            .iter()
            .zip(cases)
            .enumerate()
            .filter(|(_, (r, _))| !r.pass)
            .map(|(index, (r, case))| Failure { index, law_id: r.law_id, seed: r.seed, margin: r.margin, case })
            .collect::<Vec<_>>();
        let passed = reports.iter().filter(|r| r.pass).count();
        SuiteReport {
            summary: Summary {
                total: reports.len(),
                passed,
                failed: reports.len() - passed,
                worst_margin: worst(&mut reports.iter().map(|r| r.margin)),
                per_law,
            },
            failures,
            reports,
        }
    }
}

/// Accumulates quantities, checks and witness bits while a law runs.
pub(crate) struct Recorder {
    abs_tol: f64,
    identity_tol: f64,
    gap_tol: f64,
    quantities: Vec<Quantity>,
    checks: Vec<Check>,
    hasher: Sha256,
}

impl Recorder {
    pub fn new(case: &LawCase) -> Self {
        Recorder {
            abs_tol: case.abs_tol,
            identity_tol: case.identity_tol,
            gap_tol: case.bracket_gap_tol,
            quantities: Vec::new(),
            checks: Vec::new(),
            hasher: Sha256::new(),
        }
    }

    pub fn quantity(&mut self, name: impl Into<String>, lower: f64, upper: f64) {
        self.quantities.push(Quantity { name: name.into(), lower, upper });
    }

    pub fn exact(&mut self, name: impl Into<String>, value: f64) {
        self.quantity(name, value, value);
    }

    pub fn bracket(&mut self, name: impl Into<String>, b: &NormBracket) {
        self.quantity(name, b.lower, b.upper);
    }

    fn push(&mut self, name: impl Into<String>, kind: CheckKind, lhs: f64, rhs: f64, margin: f64) {
        let pass = match kind {
            CheckKind::Identity => margin > 0.0,
            _ => margin >= 0.0,
        };
        self.checks.push(Check { name: name.into(), kind, lhs, rhs, margin, pass });
    }

    /// `lhs = rhs`, deviation measured relative to `max(1, |lhs|, |rhs|)`.
    pub fn identity(&mut self, name: impl Into<String>, lhs: f64, rhs: f64) {
        let dev = (lhs - rhs).abs() / 1f64.max(lhs.abs()).max(rhs.abs());
        let margin = self.identity_tol - dev;
        self.push(name, CheckKind::Identity, lhs, rhs, if margin.is_nan() { f64::NEG_INFINITY } else { margin });
    }

    pub fn at_most(&mut self, name: impl Into<String>, lhs: f64, rhs: f64) {
        let margin = rhs - lhs + self.abs_tol;
        self.push(name, CheckKind::Inequality, lhs, rhs, if margin.is_nan() { f64::NEG_INFINITY } else { margin });
    }

    pub fn at_least(&mut self, name: impl Into<String>, lhs: f64, rhs: f64) {
        self.at_most(name, rhs, lhs);
    }

    /// `[a.0, a.1]` and `[b.0, b.1]` meet, allowing `abs_tol` plus
    /// `bracket_gap_tol` relative to the larger magnitude.
    pub fn intersect(&mut self, name: impl Into<String>, a: (f64, f64), b: (f64, f64)) {
        let lo = a.0.max(b.0);
        let hi = a.1.min(b.1);
        let slack = self.abs_tol + self.gap_tol * lo.abs().max(hi.abs());
        let margin = hi - lo + slack;
        self.push(name, CheckKind::Intersection, lo, hi, if margin.is_nan() { f64::NEG_INFINITY } else { margin });
    }

    /// `value` lies in `[lower, upper]` (same slack as `intersect`).
    pub fn contains(&mut self, name: impl Into<String>, lower: f64, upper: f64, value: f64) {
        self.intersect(name, (lower, upper), (value, value));
    }

    pub fn hash_tensor(&mut self, t: &DenseTensor) {
        for x in t.data() {
            self.hasher.update(x.re.to_le_bytes());
            self.hasher.update(x.im.to_le_bytes());
        }
    }

    pub fn hash_tuple(&mut self, t: &TensorTuple) {
        t.members().iter().for_each(|m| self.hash_tensor(m));
    }

    pub fn hash_simple(&mut self, u: &SimpleTensor) {
        self.hash_tensor(&u.assemble());
    }

    pub fn finish(self, case: &LawCase, runtime: Duration) -> LawReport {
        let margin = self.checks.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min);
        LawReport {
            law_id: case.law_id,
            seed: case.seed,
            field: case.field,
            pass: !self.checks.is_empty() && self.checks.iter().all(|c| c.pass),
            quantities: self.quantities,
            checks: self.checks,
            margin,
            witness_digest: self.hasher.finalize().iter().take(16).map(|b| format!("{b:02x}")).collect(),
            error: None,
            runtime,
        }
    }
}

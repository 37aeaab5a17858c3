//! Asymmetric certification results.
//!
//! A [`Verdict::Violation`] carries a witness that can be re-evaluated
//! exactly; a [`Verdict::Evidence`] only records what the search saw and with
//! which budget. Evidence never claims a proof.

use serde::{Deserialize, Serialize};

use crate::rng::Seed;

/// Search statistics attached to a non-refuting run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    /// Smallest objective value encountered.
    pub min_value: f64,
    pub restarts: usize,
    pub samples: usize,
    pub iterations: usize,
    pub seed: Seed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Verdict<W> {
    Violation(W),
    Evidence(Evidence),
}

impl<W> Verdict<W> {
    pub fn is_violation(&self) -> bool {
        matches!(self, Verdict::Violation(_))
    }

    pub fn is_evidence(&self) -> bool {
        matches!(self, Verdict::Evidence(_))
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Violation(w) => Some(w),
            Verdict::Evidence(_) => None,
        }
    }

    pub fn evidence(&self) -> Option<&Evidence> {
        match self {
            Verdict::Violation(_) => None,
            Verdict::Evidence(e) => Some(e),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Violation(_) => "violation",
            Verdict::Evidence(_) => "evidence",
        }
    }
}

impl<W: Witness> Verdict<W> {
    /// Witness value for violations, best value seen for evidence.
    pub fn value(&self) -> f64 {
        match self {
            Verdict::Violation(w) => w.value(),
            Verdict::Evidence(e) => e.min_value,
        }
    }
}

/// A refutation that carries its own stated value.
pub trait Witness {
    fn value(&self) -> f64;
}

/// Re-evaluation tolerance for witness values.
pub const WITNESS_RECHECK_TOL: f64 = 1e-10;

/// `|recomputed - stated| <= 1e-10 * max(1, |stated|)`.
pub fn recheck_matches(stated: f64, recomputed: f64) -> bool {
    (stated - recomputed).abs() <= WITNESS_RECHECK_TOL * stated.abs().max(1.0)
}

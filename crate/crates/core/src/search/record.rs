use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};
use crate::verdict::{ClaimId, Outcome};

/// Where an evaluation sits relative to a proven statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// Every hypothesis of the statement holds; a failure contradicts it.
    Theorem,
    /// Only admitted because the `8m^2 < p` condition was dropped.
    Extended,
    /// Some hypothesis fails; nothing is asserted.
    Outside,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::Theorem => "theorem",
            Region::Extended => "extended",
            Region::Outside => "outside",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Margins {
    /// `μ_A(B)` minus the bound checked, at the hardest `B` examined.
    #[serde(with = "rational::serde_str::option")]
    pub mu_minus_b: Option<Rational>,
    /// `2m - N_m`.
    #[serde(with = "rational::serde_str::option")]
    pub census_slack: Option<Rational>,
    /// Smallest `c` that would have admitted the instance (upper bound).
    #[serde(with = "rational::serde_str::option")]
    pub c_threshold: Option<Rational>,
}

/// One line of the JSONL output. Replayable on its own: `A` is present for
/// enumerated sets and for every failure; otherwise `(p, unit_seed, card)`
/// regenerates it through [`sample_set`](super::sample_set).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRecord {
    pub task: String,
    pub p: u64,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_seed: Option<u64>,
    pub card: usize,
    pub claim: ClaimId,
    pub m: Option<u64>,
    #[serde(rename = "B")]
    pub b: Option<String>,
    pub pass: Outcome,
    pub region: Region,
    pub margins: Margins,
    pub witnesses: Vec<i64>,
}

impl SearchRecord {
    pub fn is_theorem_failure(&self) -> bool {
        self.pass == Outcome::Fail && self.region == Region::Theorem
    }

    pub fn is_exploratory_failure(&self) -> bool {
        self.pass == Outcome::Fail && self.region == Region::Extended
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

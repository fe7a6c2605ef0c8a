use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rational::{self, Rational};

/// Identifier of each checked inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ClaimId {
    P1,
    P2,
    P3,
    P4,
    Eq1,
    L31,
    L32,
    T33,
    L34,
    T1,
    T2,
    T2Census,
    T51,
    T52,
    T53,
    Cd,
}

impl ClaimId {
    pub const ALL: [ClaimId; 16] = [
        ClaimId::P1,
        ClaimId::P2,
        ClaimId::P3,
        ClaimId::P4,
        ClaimId::Eq1,
        ClaimId::L31,
        ClaimId::L32,
        ClaimId::T33,
        ClaimId::L34,
        ClaimId::T1,
        ClaimId::T2,
        ClaimId::T2Census,
        ClaimId::T51,
        ClaimId::T52,
        ClaimId::T53,
        ClaimId::Cd,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClaimId::P1 => "P1",
            ClaimId::P2 => "P2",
            ClaimId::P3 => "P3",
            ClaimId::P4 => "P4",
            ClaimId::Eq1 => "EQ1",
            ClaimId::L31 => "L31",
            ClaimId::L32 => "L32",
            ClaimId::T33 => "T33",
            ClaimId::L34 => "L34",
            ClaimId::T1 => "T1",
            ClaimId::T2 => "T2",
            ClaimId::T2Census => "T2_CENSUS",
            ClaimId::T51 => "T51",
            ClaimId::T52 => "T52",
            ClaimId::T53 => "T53",
            ClaimId::Cd => "CD",
        }
    }

    /// One-line statement of the inequality, used in human-readable output.
    pub fn statement(self) -> &'static str {
        match self {
            ClaimId::P1 => "symmetry: Δ_A(-b) = Δ_A(b)",
            ClaimId::P2 => "complement: Δ_Ā(b) = Δ_A(b)",
            ClaimId::P3 => "subadditivity: Δ_A(b1+...+bk) <= Σ Δ_A(bi)",
            ClaimId::P4 => "averaging: some b in B has Δ_A(b) >= (1 - |A|/|B|)|A|",
            ClaimId::Eq1 => "simple lower bound: μ_A(B) >= (1 - |A|/|B|)|A|",
            ClaimId::L31 => "h-fold subadditivity: μ_A(hB) <= h μ_A(B)",
            ClaimId::L32 => "HLS: μ_A(B) > (1 - |B|/|A|)|B|",
            ClaimId::T33 => {
                "Freiman: |2B| <= 2.4|B| - 3 and |B| < p/35 => B in an AP of <= |2B|-|B|+1 terms"
            }
            ClaimId::L34 => "dense difference set: B - B covers (-|B|/(k-1), |B|/(k-1))",
            ClaimId::T1 => "integers: |B| < c|A|/ln|A| => μ_A(B) >= |B|",
            ClaimId::T2 => "prime order: |B| < min(c|A|/ln|A|, sqrt(p/8)) => μ_A(B) >= |B|",
            ClaimId::T2Census => "census: at most 2m nonzero b with Δ_A(b) <= m",
            ClaimId::T51 => "restricted sumset, dense B - B: |A+B| >= |A|+|B|, |A+τB| >= |A|+|B|-2",
            ClaimId::T52 => "restricted sumset, |B| < sqrt|A| + 1: |A+τB| >= |A|+|B|-3",
            ClaimId::T53 => "restricted sumset, small B: |A+τB| >= |A|+|B|-3",
            ClaimId::Cd => "Cauchy-Davenport: |A+B| >= min(p, |A|+|B|-1)",
        }
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClaimId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        let wanted = s.trim().to_ascii_uppercase();
        ClaimId::ALL
            .into_iter()
            .find(|c| c.as_str() == wanted)
            .ok_or_else(|| Error::Parse(format!("unknown claim id {s:?}")))
    }
}

impl TryFrom<String> for ClaimId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}

impl From<ClaimId> for String {
    fn from(c: ClaimId) -> String {
        c.as_str().to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    /// The hypothesis did not hold, so nothing was asserted.
    Vacuous,
}

impl Outcome {
    pub fn from_check(hypothesis_ok: bool, holds: bool) -> Self {
        match (hypothesis_ok, holds) {
            (false, _) => Outcome::Vacuous,
            (true, true) => Outcome::Pass,
            (true, false) => Outcome::Fail,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Vacuous => "vacuous",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One evaluated inequality with exact sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundVerdict {
    pub claim: ClaimId,
    pub hypothesis_ok: bool,
    #[serde(with = "rational::serde_str")]
    pub lhs: Rational,
    #[serde(with = "rational::serde_str")]
    pub rhs: Rational,
    /// `true`/`false` when the hypothesis holds, `null` when vacuous.
    #[serde(with = "pass_serde")]
    pub pass: Outcome,
    pub witnesses: Vec<i64>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
    #[serde(
        default,
        with = "rational::serde_str::option",
        skip_serializing_if = "Option::is_none"
    )]
    pub margin: Option<Rational>,
    /// Least `c` that would have admitted the instance (upper bound).
    #[serde(
        default,
        with = "rational::serde_str::option",
        skip_serializing_if = "Option::is_none"
    )]
    pub c_threshold: Option<Rational>,
}

mod pass_serde {
    use super::Outcome;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(o: &Outcome, s: S) -> Result<S::Ok, S::Error> {
        match o {
            Outcome::Pass => s.serialize_bool(true),
            Outcome::Fail => s.serialize_bool(false),
            Outcome::Vacuous => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Outcome, D::Error> {
        Ok(match Option::<bool>::deserialize(d)? {
            Some(true) => Outcome::Pass,
            Some(false) => Outcome::Fail,
            None => Outcome::Vacuous,
        })
    }
}

impl BoundVerdict {
    pub fn new(
        claim: ClaimId,
        hypothesis_ok: bool,
        lhs: Rational,
        rhs: Rational,
        holds: bool,
    ) -> Self {
        Self {
            claim,
            hypothesis_ok,
            lhs,
            rhs,
            pass: Outcome::from_check(hypothesis_ok, holds),
            witnesses: Vec::new(),
            note: String::new(),
            margin: None,
            c_threshold: None,
        }
    }

    pub fn with_witnesses(mut self, witnesses: impl IntoIterator<Item = i64>) -> Self {
        self.witnesses = witnesses.into_iter().collect();
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn with_margin(mut self, margin: Rational) -> Self {
        self.margin = Some(margin);
        self
    }

    pub fn is_failure(&self) -> bool {
        self.pass == Outcome::Fail
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdicts serialize")
    }

    /// `CLAIM outcome: lhs vs rhs` plus the statement and any note.
    pub fn human(&self) -> String {
        let mut line = format!(
            "{} [{}] {}: lhs = {}, rhs = {}",
            self.claim,
            self.claim.statement(),
            self.pass,
            rational::render(&self.lhs),
            rational::render(&self.rhs)
        );
        if !self.hypothesis_ok {
            line.push_str(" (hypothesis not met)");
        }
        if !self.witnesses.is_empty() {
            let w: Vec<String> = self.witnesses.iter().map(i64::to_string).collect();
            line.push_str(&format!("; witnesses {}", w.join(",")));
        }
        if let Some(m) = &self.margin {
            line.push_str(&format!("; margin {}", rational::render(m)));
        }
        if !self.note.is_empty() {
            line.push_str(&format!("; {}", self.note));
        }
        line
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn claim_ids_roundtrip() {
        for c in ClaimId::ALL {
            assert_eq!(c.as_str().parse::<ClaimId>().unwrap(), c);
        }
        assert_eq!("t2_census".parse::<ClaimId>().unwrap(), ClaimId::T2Census);
        assert!("T9".parse::<ClaimId>().is_err());
    }

    #[test]
    fn json_shape() {
        let v = BoundVerdict::new(ClaimId::Eq1, true, int(3), frac(3, 2), true).with_witnesses([6]);
        assert_eq!(
            v.to_json(),
            r#"{"claim":"EQ1","hypothesis_ok":true,"lhs":"3","rhs":"3/2","pass":true,"witnesses":[6]}"#
        );
        let vac = BoundVerdict::new(ClaimId::L32, false, int(0), int(0), true);
        assert_eq!(vac.pass, Outcome::Vacuous);
        assert!(vac.to_json().contains(r#""pass":null"#));
        let back: BoundVerdict = serde_json::from_str(&v.to_json()).unwrap();
        assert_eq!(back, v);
    }
}

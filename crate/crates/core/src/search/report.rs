use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, c_threshold_upper, Rational};
use crate::verdict::Outcome;

use super::record::SearchRecord;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimTally {
    pub pass: u64,
    pub fail: u64,
    pub vacuous: u64,
}

/// Upper bound on any viable `c`, from the failing census records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CEstimate {
    /// No failure seen: the data put no limit on `c`.
    Unbounded,
    AtMost(Rational),
}

impl CEstimate {
    pub fn render(&self) -> String {
        match self {
            CEstimate::Unbounded => "inf".into(),
            CEstimate::AtMost(r) => rational::render(r),
        }
    }
}

impl Serialize for CEstimate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

impl<'de> Deserialize<'de> for CEstimate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "inf" {
            return Ok(CEstimate::Unbounded);
        }
        rational::parse(&s)
            .map(CEstimate::AtMost)
            .ok_or_else(|| serde::de::Error::custom(format!("bad estimate {s:?}")))
    }
}

/// Infimum over failing records of `m ln|A| / |A|` (with `|B|` in place of
/// `m` for set-valued records), using the upper bound on `ln`.
pub fn empirical_c_estimate<'a>(records: impl IntoIterator<Item = &'a SearchRecord>) -> CEstimate {
    records
        .into_iter()
        .filter(|r| r.pass == Outcome::Fail && r.card > 1)
        .filter_map(|r| {
            let size = r.m.or_else(|| r.b.as_deref().map(literal_len))?;
            Some(c_threshold_upper(size, r.card))
        })
        .min()
        .map_or(CEstimate::Unbounded, CEstimate::AtMost)
}

fn literal_len(lit: &str) -> u64 {
    let body = lit.split_once(':').map_or(lit, |(_, b)| b);
    body.split(',').filter(|s| !s.trim().is_empty()).count() as u64
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub units: u64,
    pub records: u64,
    pub per_claim: BTreeMap<String, ClaimTally>,
    pub theorem_failures: u64,
    pub exploratory_failures: u64,
    #[serde(with = "rational::serde_str::option")]
    pub min_mu_margin: Option<Rational>,
    #[serde(with = "rational::serde_str::option")]
    pub min_census_slack: Option<Rational>,
    pub empirical_c: CEstimate,
    /// True when the run stopped before every unit was processed.
    pub incomplete: bool,
}

impl Summary {
    pub fn from_records<'a>(
        records: impl IntoIterator<Item = &'a SearchRecord> + Clone,
        units: u64,
    ) -> Self {
        let mut s = Summary {
            units,
            records: 0,
            per_claim: BTreeMap::new(),
            theorem_failures: 0,
            exploratory_failures: 0,
            min_mu_margin: None,
            min_census_slack: None,
            empirical_c: empirical_c_estimate(records.clone()),
            incomplete: false,
        };
        for r in records {
            s.records += 1;
            let t = s.per_claim.entry(r.claim.to_string()).or_default();
            match r.pass {
                Outcome::Pass => t.pass += 1,
                Outcome::Fail => t.fail += 1,
                Outcome::Vacuous => t.vacuous += 1,
            }
            s.theorem_failures += r.is_theorem_failure() as u64;
            s.exploratory_failures += r.is_exploratory_failure() as u64;
            if r.pass != Outcome::Vacuous {
                fold_min(&mut s.min_mu_margin, r.margins.mu_minus_b);
                fold_min(&mut s.min_census_slack, r.margins.census_slack);
            }
        }
        s
    }
}

fn fold_min(acc: &mut Option<Rational>, v: Option<Rational>) {
    if let Some(v) = v {
        *acc = Some(acc.map_or(v, |a| a.min(v)));
    }
}

/// Records, aggregate statistics, and the quarantined failures found only
/// outside the proven range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub schema: u32,
    pub records: Vec<SearchRecord>,
    pub summary: Summary,
    pub exploratory: Vec<SearchRecord>,
}

impl SearchReport {
    pub fn new(all: Vec<SearchRecord>, units: u64, retain: bool) -> Self {
        let summary = Summary::from_records(&all, units);
        let exploratory = all
            .iter()
            .filter(|r| r.is_exploratory_failure())
            .cloned()
            .collect();
        Self {
            schema: 1,
            records: if retain { all } else { Vec::new() },
            summary,
            exploratory,
        }
    }

    pub fn empty() -> Self {
        Self::new(Vec::new(), 0, true)
    }

    pub fn has_theorem_failure(&self) -> bool {
        self.summary.theorem_failures > 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &SearchRecord> {
        self.records.iter().filter(|r| r.is_theorem_failure())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Human,
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "human" => Ok(Self::Human),
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            _ => Err(Error::Parse(format!("unknown output mode {s:?}"))),
        }
    }
}

const CSV_HEADER: &str =
    "task,p,card,claim,m,B,pass,region,mu_minus_b,census_slack,c_threshold,witnesses";

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(String::new, T::to_string)
}

fn opt_q(v: &Option<Rational>) -> String {
    v.as_ref().map_or_else(String::new, rational::render)
}

fn human_q(v: &Option<Rational>) -> String {
    v.as_ref()
        .map_or_else(|| "n/a".to_string(), rational::render)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_report(report: &SearchReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => serde_json::to_string(report).expect("reports serialize"),
        ReportFormat::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for r in &report.records {
                let witnesses: Vec<String> = r.witnesses.iter().map(i64::to_string).collect();
                let row = [
                    csv_field(&r.task),
                    r.p.to_string(),
                    r.card.to_string(),
                    r.claim.to_string(),
                    opt(&r.m),
                    csv_field(&opt(&r.b)),
                    r.pass.to_string(),
                    r.region.as_str().to_string(),
                    csv_field(&opt_q(&r.margins.mu_minus_b)),
                    opt_q(&r.margins.census_slack),
                    csv_field(&opt_q(&r.margins.c_threshold)),
                    csv_field(&witnesses.join(" ")),
                ];
                out.push_str(&row.join(","));
                out.push('\n');
            }
            out
        }
        ReportFormat::Human => {
            let s = &report.summary;
            let mut out = String::new();
            let _ = writeln!(
                out,
                "units: {}  records: {}{}",
                s.units,
                s.records,
                if s.incomplete { "  (incomplete)" } else { "" }
            );
            for (claim, t) in &s.per_claim {
                let _ = writeln!(
                    out,
                    "  {claim:<10} pass {:>8}  fail {:>6}  vacuous {:>8}",
                    t.pass, t.fail, t.vacuous
                );
            }
            let _ = writeln!(out, "theorem-region failures: {}", s.theorem_failures);
            let _ = writeln!(out, "exploratory failures:    {}", s.exploratory_failures);
            let _ = writeln!(
                out,
                "min mu margin:           {}",
                human_q(&s.min_mu_margin)
            );
            let _ = writeln!(
                out,
                "min 2m - N_m:            {}",
                human_q(&s.min_census_slack)
            );
            let _ = writeln!(out, "empirical c bound:       {}", s.empirical_c.render());
            for r in report.failures().chain(report.exploratory.iter()).take(20) {
                let _ = writeln!(
                    out,
                    "  {} {} {} {} m={} B={} witnesses={:?}",
                    r.region.as_str().to_uppercase(),
                    r.task,
                    r.claim,
                    r.pass,
                    opt(&r.m),
                    opt(&r.b),
                    r.witnesses
                );
            }
            out
        }
    }
}

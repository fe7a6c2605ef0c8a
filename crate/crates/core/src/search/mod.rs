//! Enumerated and seeded campaigns that run the bound predicates at scale,
//! with append-only persistence and resume.

mod engine;
mod enumerate;
mod record;
mod report;
mod suites;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::ProfileBackend;
use crate::rational::{self, frac, Rational};
use crate::residue::{is_prime, PrimeModulus};
use crate::verdict::ClaimId;

pub use engine::{
    counterexample_hunt, exhaustive_verify, extremal_census, hunt_set, random_verify, run,
    sample_set, unit_seeds,
};
pub use enumerate::{enumerate_sets, EXHAUSTIVE_MAX_P};
pub use record::{Margins, Region, SearchRecord};
pub use report::{
    empirical_c_estimate, render_report, CEstimate, ClaimTally, ReportFormat, SearchReport, Summary,
};
pub use suites::{Evaluation, Suite, SuiteParams, SuiteRegistry, UnitView};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exhaustive,
    Random,
}

/// Which size range the prime-order suites admit. `Extended` drops the
/// `8m^2 < p` condition; whatever it finds there is exploratory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gate {
    #[default]
    Theorem,
    Extended,
}

impl std::str::FromStr for Gate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theorem" => Ok(Gate::Theorem),
            "extended" => Ok(Gate::Extended),
            _ => Err(Error::Parse(format!("unknown gate {s:?}"))),
        }
    }
}

/// A campaign description; mirrors the keys of the TOML config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub primes: Vec<PrimeModulus>,
    /// Inclusive bounds; every prime inside is added to `primes`.
    pub prime_range: Option<[u64; 2]>,
    pub mode: Mode,
    pub trials: u64,
    pub seed: Option<u64>,
    /// Band for `|A|`; defaults to `2..=(p-1)/2`.
    pub min_card: Option<usize>,
    pub max_card: Option<usize>,
    /// Largest `m` (or `|B|`) examined; defaults to the gate's own limit.
    pub m_max: Option<u64>,
    #[serde(with = "rational::serde_str")]
    pub c: Rational,
    pub gate: Gate,
    pub suites: Vec<ClaimId>,
    pub up_to_affine: bool,
    pub output: Option<PathBuf>,
    pub resume: bool,
    pub workers: Option<usize>,
    /// Stop after this many work units (the rest can be resumed).
    pub stop_after: Option<u64>,
    pub spot_check_fraction: f64,
    pub backend: ProfileBackend,
    pub retain_records: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            primes: Vec::new(),
            prime_range: None,
            mode: Mode::Exhaustive,
            trials: 0,
            seed: None,
            min_card: None,
            max_card: None,
            m_max: None,
            c: frac(1, 2),
            gate: Gate::Theorem,
            suites: vec![ClaimId::T2Census],
            up_to_affine: true,
            output: None,
            resume: false,
            workers: None,
            stop_after: None,
            spot_check_fraction: 0.01,
            backend: ProfileBackend::Auto,
            retain_records: true,
        }
    }
}

impl SearchConfig {
    /// The configured primes, merged with the range, ascending and deduplicated.
    pub fn prime_list(&self) -> Vec<PrimeModulus> {
        let mut out: Vec<u64> = self.primes.iter().map(|p| p.get()).collect();
        if let Some([lo, hi]) = self.prime_range {
            out.extend((lo.max(3)..=hi).filter(|&n| is_prime(n)));
        }
        out.sort_unstable();
        out.dedup();
        out.into_iter()
            .map(|p| PrimeModulus::new(p).expect("prime"))
            .collect()
    }

    /// `|A|` band at modulus `p`, clamped to `1..p`.
    pub fn card_band(&self, p: PrimeModulus) -> std::ops::RangeInclusive<usize> {
        let top = (p.get() - 1) as usize;
        let lo = self.min_card.unwrap_or(2).max(1);
        let hi = self.max_card.unwrap_or(top / 2).min(top);
        lo..=hi
    }

    pub fn suite_params(&self) -> SuiteParams {
        SuiteParams {
            c: self.c,
            gate: self.gate,
            m_max: self.m_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.c <= rational::int(0) {
            return Err(Error::Config("c must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.spot_check_fraction) {
            return Err(Error::Config(
                "spot_check_fraction must lie in [0, 1]".into(),
            ));
        }
        if self.suites.is_empty() {
            return Err(Error::Config("no suites selected".into()));
        }
        let registry = SuiteRegistry::builtin();
        if let Some(bad) = self.suites.iter().find(|id| registry.get(**id).is_none()) {
            return Err(Error::Config(format!("no search suite for claim {bad}")));
        }
        if let Some([lo, hi]) = self.prime_range {
            if lo > hi {
                return Err(Error::Config(format!("empty prime range [{lo}, {hi}]")));
            }
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if self.resume && self.output.is_none() {
            return Err(Error::Config("resume needs an output path".into()));
        }
        match self.mode {
            Mode::Random => {
                if self.trials == 0 {
                    return Err(Error::Config("random mode needs trials >= 1".into()));
                }
                if self.seed.is_none() {
                    return Err(Error::Config("random mode needs an explicit seed".into()));
                }
            }
            Mode::Exhaustive => {
                if let Some(p) = self
                    .prime_list()
                    .into_iter()
                    .find(|p| p.get() > EXHAUSTIVE_MAX_P)
                {
                    return Err(Error::TooLargeForExhaustive(p.get()));
                }
            }
        }
        Ok(())
    }
}

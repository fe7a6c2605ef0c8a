use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::profile::{profile, ProfileBackend, ShiftProfile};
use crate::rational::{
    c_threshold_upper, certainly_below_c_ratio, frac, int, max_certain_below_c_ratio, Rational,
};
use crate::residue::ResidueSet;
use crate::verdict::{ClaimId, Outcome};

use super::record::{Margins, Region};
use super::Gate;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteParams {
    pub c: Rational,
    pub gate: Gate,
    pub m_max: Option<u64>,
}

/// Everything a suite may read about one work unit. The profile is
/// computed once per unit and shared by all suites.
pub struct UnitView<'a> {
    pub set: &'a ResidueSet,
    pub profile: &'a ShiftProfile,
    /// `(Δ_A(r), r)` for `r = 1..=(p-1)/2`, ascending.
    pub ranked_half: &'a [(u32, u64)],
    pub params: &'a SuiteParams,
    pub backend: ProfileBackend,
}

impl UnitView<'_> {
    pub fn rank_half(profile: &ShiftProfile) -> Vec<(u32, u64)> {
        let mut v: Vec<(u32, u64)> = (1..=(profile.p() - 1) / 2)
            .map(|r| (profile.get(r), r))
            .collect();
        v.sort_unstable();
        v
    }
}

/// One outcome emitted by a suite; the engine adds the unit's identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub claim: ClaimId,
    pub m: Option<u64>,
    pub b: Option<ResidueSet>,
    pub pass: Outcome,
    pub region: Region,
    pub margins: Margins,
    pub witnesses: Vec<i64>,
}

impl Evaluation {
    fn whole_set(claim: ClaimId, hypothesis: bool, witnesses: Vec<i64>) -> Self {
        Self {
            claim,
            m: None,
            b: None,
            pass: Outcome::from_check(hypothesis, witnesses.is_empty()),
            region: if hypothesis {
                Region::Theorem
            } else {
                Region::Outside
            },
            margins: Margins::default(),
            witnesses,
        }
    }
}

/// A family of checks run against every work unit.
pub trait Suite: Send + Sync {
    fn claim(&self) -> ClaimId;
    fn evaluate(&self, unit: &UnitView<'_>) -> Vec<Evaluation>;
}

/// Suites keyed by the claim they check.
pub struct SuiteRegistry {
    suites: BTreeMap<ClaimId, Box<dyn Suite>>,
}

impl SuiteRegistry {
    pub fn empty() -> Self {
        Self {
            suites: BTreeMap::new(),
        }
    }

    pub fn with_builtin() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Reflection));
        r.register(Box::new(Complement));
        r.register(Box::new(Triangle { pair_limit: 64 }));
        r.register(Box::new(Averaging));
        r.register(Box::new(Subadditivity { pair_limit: 32 }));
        r.register(Box::new(SignFreeLower));
        r.register(Box::new(MainBound));
        r.register(Box::new(Census));
        r
    }

    pub fn builtin() -> &'static SuiteRegistry {
        static REGISTRY: OnceLock<SuiteRegistry> = OnceLock::new();
        REGISTRY.get_or_init(SuiteRegistry::with_builtin)
    }

    /// Adds a suite, replacing any suite for the same claim.
    pub fn register(&mut self, suite: Box<dyn Suite>) {
        self.suites.insert(suite.claim(), suite);
    }

    pub fn get(&self, claim: ClaimId) -> Option<&dyn Suite> {
        self.suites.get(&claim).map(|s| s.as_ref())
    }

    pub fn claims(&self) -> Vec<ClaimId> {
        self.suites.keys().copied().collect()
    }
}

const MAX_WITNESSES: usize = 16;

fn capped(it: impl Iterator<Item = i64>) -> Vec<i64> {
    it.take(MAX_WITNESSES).collect()
}

/// `Δ(−b) = Δ(b)` for every `b`, and `Δ(0) = 0`.
struct Reflection;

impl Suite for Reflection {
    fn claim(&self) -> ClaimId {
        ClaimId::P1
    }

    fn evaluate(&self, u: &UnitView<'_>) -> Vec<Evaluation> {
        let p = u.profile.p();
        let mut bad = Vec::new();
        if u.profile.get(0) != 0 {
            bad.push(0);
        }
        bad.extend(capped(
            (1..p)
                .filter(|&b| u.profile.get(b) != u.profile.get(p - b))
                .map(|b| b as i64),
        ));
        vec![Evaluation::whole_set(ClaimId::P1, true, bad)]
    }
}

/// `Δ_{A^c}(b) = Δ_A(b)` for proper `A`.
struct Complement;

impl Suite for Complement {
    fn claim(&self) -> ClaimId {
        ClaimId::P2
    }

    fn evaluate(&self, u: &UnitView<'_>) -> Vec<Evaluation> {
        if !u.set.is_proper() {
            return vec![Evaluation::whole_set(ClaimId::P2, false, vec![])];
        }
        let other = profile(&u.set.complement(), u.backend);
        let bad = capped(
            (0..u.profile.p())
                .filter(|&b| other.get(b) != u.profile.get(b))
                .map(|b| b as i64),
        );
        vec![Evaluation::whole_set(ClaimId::P2, true, bad)]
    }
}

/// `Δ(b1 + b2) <= Δ(b1) + Δ(b2)` over shift pairs below a limit.
struct Triangle {
    pair_limit: u64,
}

impl Suite for Triangle {
    fn claim(&self) -> ClaimId {
        ClaimId::P3
    }

    fn evaluate(&self, u: &UnitView<'_>) -> Vec<Evaluation> {
        let p = u.profile.p();
        let top = self.pair_limit.min(p - 1);
        let d = |b: u64| u.profile.get(b % p);
        let mut bad = Vec::new();
        for b1 in 1..=top {
            for b2 in b1..=top {
                if d(b1 + b2) > d(b1) + d(b2) && bad.len() < MAX_WITNESSES {
                    bad.extend([b1 as i64, b2 as i64]);
                }
            }
        }
        vec![Evaluation::whole_set(ClaimId::P3, true, bad)]
    }
}

/// `μ_A(B) >= (1 - |A|/|B|)|A|` for every `B`: the worst `B` of size `k`
/// consists of the `k` least values of the profile.
struct Averaging;

impl Suite for Averaging {
    fn claim(&self) -> ClaimId {
        ClaimId::P4
    }

    fn evaluate(&self, u: &UnitView<'_>) -> Vec<Evaluation> {
        let mut sorted = u.profile.values.clone();
        sorted.sort_unstable();
        let n = u.set.len() as i128;
        let mut worst: Option<Rational> = None;
        let mut bad = Vec::new();
        for (i, &v) in sorted.iter().enumerate() {
            let k = i as i128 + 1;
            let margin = int(v) - (int(1) - frac(n, k)) * int(n);
            if margin < int(0) && bad.len() < MAX_WITNESSES {
                bad.push(k as i64);
            }
            worst = Some(worst.map_or(margin, |w| w.min(margin)));
        }
        let mut e = Evaluation::whole_set(ClaimId::P4, true, bad);
        e.margins.mu_minus_b = worst;
        vec![e]
    }
}

/// `μ_A(hB) <= h μ_A(B)` for `h = 2, 3`, all singletons and all pairs
/// below a limit.
struct Subadditivity {
    pair_limit: u64,
}

impl Suite for Subadditivity {
    fn claim(&self) -> ClaimId {
        ClaimId::L31
    }

    fn evaluate(&self, u: &UnitView<'_>) -> Vec<Evaluation> {
        let p = u.profile.p();
        let d = |b: u64| u.profile.get(b % p);
        let top = self.pair_limit.min(p - 1);
        let mut bad = Vec::new();
        for h in 2..=3u64 {
            for b in 1..p {
                if d(h * b) > h as u32 * d(b) && bad.len() < MAX_WITNESSES {
                    bad.extend([h as i64, b as i64]);
                }
            }
            for b1 in 1..=top {
                for b2 in b1 + 1..=top {
                    let lhs = (0..=h).map(|i| d(i * b1 + (h - i) * b2)).max().unwrap();
                    if lhs > h as u32 * d(b1).max(d(b2)) && bad.len() < MAX_WITNESSES {
                        bad.extend([h as i64, b1 as i64, b2 as i64]);
                    }
                }
            }
        }
        vec![Evaluation::whole_set(ClaimId::L31, true, bad)]
    }
}

/// Strict `μ_A(B) > (1 - |B|/|A|)|B|` for sign-free `B`, `|A| <= p/2`.
/// The least `μ` over sign-free `B` of size `k` is the `k`-th ranked
/// half-profile value, so one pass covers every `B`.
struct SignFreeLower;

impl Suite for SignFreeLower {
    fn claim(&self) -> ClaimId {
        ClaimId::L32
    }

    fn evaluate(&self, u: &UnitView<'_>) -> Vec<Evaluation> {
        let n = u.set.len() as i128;
        if n == 0 || 2 * n > u.profile.p() as i128 {
            return vec![Evaluation::whole_set(ClaimId::L32, false, vec![])];
        }
        let mut worst: Option<Rational> = None;
        let mut bad = Vec::new();
        for (i, &(v, _)) in u.ranked_half.iter().enumerate() {
            let k = i as i128 + 1;
            let margin = int(v) - (int(1) - frac(k, n)) * int(k);
            if margin <= int(0) && bad.len() < MAX_WITNESSES {
                bad.push(k as i64);
            }
            worst = Some(worst.map_or(margin, |w| w.min(margin)));
        }
        let mut e = Evaluation::whole_set(ClaimId::L32, true, bad);
        e.margins.mu_minus_b = worst;
        vec![e]
    }
}

/// Sizes examined for the prime-order statements, with their region.
pub(crate) fn admitted_sizes(p: u64, card: usize, params: &SuiteParams) -> Vec<(u64, Region)> {
    let sqrt_ok = |m: u64| 8 * (m as u128) * (m as u128) < p as u128;
    let c_ok = |m: u64| certainly_below_c_ratio(m, params.c, card);
    let default_top = match params.gate {
        Gate::Theorem => (1..).take_while(|&m| sqrt_ok(m)).last().unwrap_or(0),
        Gate::Extended => max_certain_below_c_ratio(params.c, card),
    };
    let top = params.m_max.unwrap_or(default_top).min((p - 1) / 2);
    (1..=top)
        .map(|m| {
            let region = match (c_ok(m), sqrt_ok(m), params.gate) {
                (true, true, _) => Region::Theorem,
                (true, false, Gate::Extended) => Region::Extended,
                _ => Region::Outside,
            };
            (m, region)
        })
        .collect()
}

fn structural_ok(u: &UnitView<'_>) -> bool {
    u.set.len() > 1 && u.set.modulus().exceeds_twice(u.set.len())
}

fn outside(claim: ClaimId) -> Evaluation {
    Evaluation::whole_set(claim, false, vec![])
}

/// `μ_A(B) >= |B|` for sign-free `B`, checked on the minimising `B` of
/// each admitted size.
struct MainBound;

impl Suite for MainBound {
    fn claim(&self) -> ClaimId {
        ClaimId::T2
    }

    fn evaluate(&self, u: &UnitView<'_>) -> Vec<Evaluation> {
        if !structural_ok(u) {
            return vec![outside(ClaimId::T2)];
        }
        let p = u.set.modulus();
        admitted_sizes(p.get(), u.set.len(), u.params)
            .into_iter()
            .map(|(k, region)| {
                let chosen = &u.ranked_half[..k as usize];
                let mu = chosen.last().unwrap().0;
                let b = ResidueSet::collect_residues(p, chosen.iter().map(|&(_, r)| r));
                let holds = u64::from(mu) >= k;
                let pass = Outcome::from_check(region != Region::Outside, holds);
                let witnesses = if pass == Outcome::Fail {
                    chosen.iter().map(|&(_, r)| r as i64).collect()
                } else {
                    vec![]
                };
                Evaluation {
                    claim: ClaimId::T2,
                    m: None,
                    b: Some(b),
                    pass,
                    region,
                    margins: Margins {
                        mu_minus_b: Some(int(i128::from(mu) - k as i128)),
                        census_slack: None,
                        c_threshold: Some(c_threshold_upper(k, u.set.len())),
                    },
                    witnesses,
                }
            })
            .collect()
    }
}

/// `N_m(A) <= 2m` for each admitted `m`.
struct Census;

impl Suite for Census {
    fn claim(&self) -> ClaimId {
        ClaimId::T2Census
    }

    fn evaluate(&self, u: &UnitView<'_>) -> Vec<Evaluation> {
        if !structural_ok(u) {
            return vec![outside(ClaimId::T2Census)];
        }
        let p = u.profile.p();
        admitted_sizes(p, u.set.len(), u.params)
            .into_iter()
            .map(|(m, region)| {
                // N_m counts both members of each ± pair
                let low = u.ranked_half.partition_point(|&(v, _)| u64::from(v) <= m);
                let count = 2 * low as i128;
                let holds = count <= 2 * m as i128;
                let pass = Outcome::from_check(region != Region::Outside, holds);
                let witnesses = if pass == Outcome::Fail {
                    let mut w: Vec<i64> = u.ranked_half[..low]
                        .iter()
                        .flat_map(|&(_, r)| [r as i64, (p - r) as i64])
                        .collect();
                    w.sort_unstable();
                    w
                } else {
                    vec![]
                };
                Evaluation {
                    claim: ClaimId::T2Census,
                    m: Some(m),
                    b: None,
                    pass,
                    region,
                    margins: Margins {
                        mu_minus_b: None,
                        census_slack: Some(int(2 * m as i128 - count)),
                        c_threshold: Some(c_threshold_upper(m, u.set.len())),
                    },
                    witnesses,
                }
            })
            .collect()
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{mu, profile, ProfileBackend};
use crate::rational::{frac, int, Rational};
use crate::residue::{interval_set, ResidueSet};
use crate::sumset::{freiman_gate, shortest_covering_ap, sym_closure, AdditiveSet};

/// Which half of the case split on `|2B^±|` an instance falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `3|2B^±| >= |A| + 3`: a Cauchy–Davenport step makes `12B^±` large.
    #[serde(rename = "dense_2Bpm")]
    Dense2Bpm,
    /// `3|2B^±| < |A| + 3`: `B^±` is rectified into a short progression.
    #[serde(rename = "freiman_rectify")]
    FreimanRectify,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Dense2Bpm => "dense_2Bpm",
            Branch::FreimanRectify => "freiman_rectify",
        }
    }
}

/// Quantities computed along the proof of the prime-order bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofTrace {
    pub branch: Branch,
    /// Whether `8|B|^2 < p`; recorded, not required.
    pub sqrt_gate: bool,
    #[serde(serialize_with = "ser_pairs", deserialize_with = "de_pairs")]
    pub intermediate: Vec<(String, Rational)>,
    /// Relations that hold unconditionally and are asserted by tests.
    pub identities: Vec<(String, bool)>,
    /// Inequalities that only follow under `μ_A(B) < |B|`; reported, never asserted.
    #[serde(serialize_with = "ser_pairs", deserialize_with = "de_pairs")]
    pub counterfactual: Vec<(String, Rational)>,
}

fn ser_pairs<S: serde::Serializer>(
    v: &[(String, Rational)],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for (k, r) in v {
        seq.serialize_element(&(k, crate::rational::render(r)))?;
    }
    seq.end()
}

fn de_pairs<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<Vec<(String, Rational)>, D::Error> {
    let raw: Vec<(String, String)> = Deserialize::deserialize(d)?;
    raw.into_iter()
        .map(|(k, v)| {
            crate::rational::parse(&v)
                .map(|r| (k, r))
                .ok_or_else(|| serde::de::Error::custom(format!("bad rational {v:?}")))
        })
        .collect()
}

impl ProofTrace {
    pub fn value(&self, label: &str) -> Option<Rational> {
        self.intermediate
            .iter()
            .find(|(k, _)| k == label)
            .map(|(_, v)| *v)
    }

    pub fn identities_hold(&self) -> bool {
        self.identities.iter().all(|(_, ok)| *ok)
    }
}

fn signed(x: u64, p: u64) -> i64 {
    if 2 * x < p {
        x as i64
    } else {
        x as i64 - p as i64
    }
}

/// Walks the case split of the prime-order argument for `(A, B)`.
/// Requires `1 < |A| < p/2` and a nonempty sign-free `B`.
pub fn proof_trace(a: &ResidueSet, b: &ResidueSet) -> Result<ProofTrace> {
    a.ensure_same_group(b)?;
    let p = a.modulus();
    if a.len() <= 1 || !p.exceeds_twice(a.len()) {
        return Err(Error::HypothesisViolated("need 1 < |A| < p/2".into()));
    }
    if b.is_empty() || !b.is_sign_free() {
        return Err(Error::HypothesisViolated(
            "need B nonempty with B ∩ (−B) = ∅".into(),
        ));
    }
    let (na, nb) = (a.len() as i128, b.len() as i128);
    let bpm = sym_closure(b);
    let two_bpm = bpm.hfold(2)?;
    let (npm, n2) = (bpm.len() as i128, two_bpm.len() as i128);
    let sqrt_gate = 8 * (nb as u128).pow(2) < p.get() as u128;

    let mut intermediate = vec![
        ("|B|".to_string(), int(nb)),
        ("|B^±|".to_string(), int(npm)),
        ("|2B^±|".to_string(), int(n2)),
        ("|A|/3 + 1".to_string(), frac(na, 3) + int(1)),
        ("mu_A(B)".to_string(), int(mu(a, b)?)),
    ];
    let mut identities = vec![("|B^±| = 2|B| + 1".to_string(), npm == 2 * nb + 1)];
    let mut counterfactual = Vec::new();

    let branch = if 3 * n2 >= na + 3 {
        Branch::Dense2Bpm
    } else {
        Branch::FreimanRectify
    };
    match branch {
        Branch::Dense2Bpm => {
            let n12 = bpm.hfold(12)?.len() as i128;
            intermediate.push(("|12B^±|".into(), int(n12)));
            intermediate.push(("2|A|".into(), int(2 * na)));
            identities.push(("|12B^±| > 2|A|".into(), n12 > 2 * na));
        }
        Branch::FreimanRectify => {
            let half = interval_set(p, 1, p.get().div_ceil(2) as i64)?;
            let c = two_bpm.intersection(&half)?;
            intermediate.push(("|C|".into(), int(c.len() as i128)));
            identities.push(("|C| = (|2B^±| - 1)/2".into(), 2 * c.len() as i128 == n2 - 1));
            counterfactual.push(("12/5 |B^±| - 31/5".into(), frac(12 * npm - 31, 5)));
            counterfactual.push((
                "|2B^±| - (12/5 |B^±| - 31/5)".into(),
                int(n2) - frac(12 * npm - 31, 5),
            ));

            let gate = freiman_gate(&bpm)?;
            intermediate.push(("freiman size gate".into(), int(gate.size_ok as i128)));
            intermediate.push((
                "freiman doubling gate".into(),
                int(gate.doubling_ok as i128),
            ));
            let ap = shortest_covering_ap(&bpm)?;
            let bound = gate.cover_bound() as i128;
            intermediate.push(("covering AP length".into(), int(ap.length as i128)));
            intermediate.push(("|2B^±| - |B^±| + 1".into(), int(bound)));
            if gate.holds() {
                identities.push((
                    "covering AP length <= |2B^±| - |B^±| + 1".into(),
                    ap.length as i128 <= bound,
                ));
            }

            // dilate by d^{-1} so the progression becomes a block around 0
            let d_inv = p.inverse(ap.difference)?;
            let lifted: Vec<i64> = bpm
                .iter()
                .map(|x| signed(p.mul(d_inv, x), p.get()))
                .collect();
            let ell = lifted.iter().max().unwrap() - lifted.iter().min().unwrap();
            intermediate.push(("ell".into(), int(ell as i128)));
            let run = interval_set(p, 1, npm as i64)?;
            let dilated = ResidueSet::collect_residues(p, two_bpm.iter().map(|x| p.mul(d_inv, x)));
            let covered = run.is_subset(&dilated);
            intermediate.push(("[1, |B^±| - 1] ⊆ d^-1 2B^±".into(), int(covered as i128)));
            if 2 * (ell as i128) < 3 * npm - 2 {
                identities.push((
                    "ell < 3/2 |B^±| - 1 implies [1, |B^±| - 1] ⊆ d^-1 2B^±".into(),
                    covered,
                ));
            }
        }
    }

    // census view of the same instance: N_{|B|-1}(A) against 2(|B|-1)
    let m = (nb - 1) as u64;
    let n_m = profile(a, ProfileBackend::Auto).census(m).count;
    intermediate.push(("census N_{|B|-1}".into(), int(n_m as i128)));
    intermediate.push(("census bound 2(|B|-1)".into(), int(2 * m as i128)));

    Ok(ProofTrace {
        branch,
        sqrt_gate,
        intermediate,
        identities,
        counterfactual,
    })
}

//! Each named inequality as an executable predicate returning a
//! [`BoundVerdict`], plus the proof-branch tracer in [`trace`].

mod trace;

pub use trace::{proof_trace, Branch, ProofTrace};

use crate::error::{Error, Result};
use crate::profile::{delta, mu, profile, ProfileBackend};
use crate::rational::{c_threshold_upper, certainly_below_c_ratio, frac, int, Rational};
use crate::residue::{IntSet, ResidueSet};
use crate::sumset::{
    freiman_gate, restricted_sumset, shortest_covering_ap, AdditiveSet, RestrictedMap,
};
use crate::verdict::{BoundVerdict, ClaimId};

/// Arguments for the elementary properties: P1 and P2 take one shift, P3
/// takes one or more, P4 takes a set.
#[derive(Debug, Clone, Default)]
pub struct PropertyArgs {
    pub shifts: Vec<u64>,
    pub set: Option<ResidueSet>,
}

fn arity(claim: ClaimId, detail: &str) -> Error {
    Error::ArityMismatch {
        claim: claim.to_string(),
        detail: detail.to_string(),
    }
}

fn argmax_delta(a: &ResidueSet, over: &ResidueSet) -> (u32, u64) {
    over.iter()
        .map(|b| (delta(a, b), b))
        .max_by_key(|&(d, b)| (d, std::cmp::Reverse(b)))
        .expect("nonempty")
}

/// `(1 - x/y) x` as an exact rational.
fn averaging_bound(x: usize, y: usize) -> Rational {
    (int(1) - frac(x as i128, y as i128)) * int(x as i128)
}

pub fn check_property(claim: ClaimId, a: &ResidueSet, args: &PropertyArgs) -> Result<BoundVerdict> {
    let p = a.modulus();
    match claim {
        ClaimId::P1 | ClaimId::P2 => {
            let [b] = args.shifts[..] else {
                return Err(arity(claim, "expects exactly one shift"));
            };
            let b = b % p.get();
            let (lhs, rhs) = if claim == ClaimId::P1 {
                (delta(a, p.neg(b)), delta(a, b))
            } else {
                (delta(&a.complement(), b), delta(a, b))
            };
            Ok(
                BoundVerdict::new(claim, true, int(lhs), int(rhs), lhs == rhs)
                    .with_witnesses([b as i64]),
            )
        }
        ClaimId::P3 => {
            if args.shifts.is_empty() {
                return Err(arity(claim, "expects at least one shift"));
            }
            let total = args.shifts.iter().fold(0, |s, &b| p.add(s, b % p.get()));
            let lhs = delta(a, total);
            let rhs: u64 = args.shifts.iter().map(|&b| u64::from(delta(a, b))).sum();
            Ok(BoundVerdict::new(
                claim,
                true,
                int(lhs),
                int(rhs as i128),
                u64::from(lhs) <= rhs,
            )
            .with_witnesses(args.shifts.iter().map(|&b| b as i64)))
        }
        ClaimId::P4 => {
            let b = args
                .set
                .as_ref()
                .ok_or_else(|| arity(claim, "expects a set B"))?;
            averaging_verdict(claim, a, b)
        }
        _ => Err(arity(claim, "not an elementary property")),
    }
}

fn averaging_verdict(claim: ClaimId, a: &ResidueSet, b: &ResidueSet) -> Result<BoundVerdict> {
    a.ensure_same_group(b)?;
    if b.is_empty() {
        return Err(Error::EmptyB);
    }
    let (best, witness) = argmax_delta(a, b);
    let rhs = averaging_bound(a.len(), b.len());
    let lhs = int(best);
    let mut v = BoundVerdict::new(claim, true, lhs, rhs, lhs >= rhs)
        .with_witnesses([witness as i64])
        .with_margin(lhs - rhs);
    if rhs <= int(0) {
        v = v.with_note("bound is nonpositive");
    }
    Ok(v)
}

/// `μ_A(B) >= (1 - |A|/|B|)|A|`.
pub fn check_eq1(a: &ResidueSet, b: &ResidueSet) -> Result<BoundVerdict> {
    averaging_verdict(ClaimId::Eq1, a, b)
}

/// `μ_A(hB) <= h μ_A(B)`.
pub fn check_subadditivity(a: &ResidueSet, b: &ResidueSet, h: usize) -> Result<BoundVerdict> {
    a.ensure_same_group(b)?;
    if b.is_empty() {
        return Err(Error::EmptyB);
    }
    let folded = b.hfold(h)?;
    let (lhs, witness) = argmax_delta(a, &folded);
    let rhs = h as i128 * i128::from(mu(a, b)?);
    Ok(BoundVerdict::new(
        ClaimId::L31,
        true,
        int(lhs),
        int(rhs),
        i128::from(lhs) <= rhs,
    )
    .with_witnesses([witness as i64])
    .with_margin(int(rhs) - int(lhs)))
}

/// Strict `μ_A(B) > (1 - |B|/|A|)|B|` for sign-free `B` and `|A| <= p/2`.
pub fn check_hls(a: &ResidueSet, b: &ResidueSet) -> Result<BoundVerdict> {
    a.ensure_same_group(b)?;
    let mut failed = Vec::new();
    if a.is_empty() {
        failed.push("A is empty");
    }
    if b.is_empty() {
        failed.push("B is empty");
    }
    if !b.is_sign_free() {
        failed.push("B meets -B");
    }
    if 2 * a.len() as u64 > a.p() {
        failed.push("|A| > p/2");
    }
    let (lhs, witness) = if b.is_empty() {
        (0, None)
    } else {
        let (d, w) = argmax_delta(a, b);
        (d, Some(w as i64))
    };
    let rhs = if a.is_empty() {
        int(0)
    } else {
        averaging_bound(b.len(), a.len())
    };
    let lhs = int(lhs);
    let mut v = BoundVerdict::new(ClaimId::L32, failed.is_empty(), lhs, rhs, lhs > rhs)
        .with_witnesses(witness)
        .with_margin(lhs - rhs);
    if !failed.is_empty() {
        v = v.with_note(failed.join("; "));
    }
    Ok(v)
}

/// Integer version: `|B| < c|A|/ln|A|` implies `μ_A(B) >= |B|`.
pub fn check_kl(a: &IntSet, b: &IntSet, c: Rational) -> Result<BoundVerdict> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    if let Some(bad) = b.iter().find(|&x| x <= 0) {
        return Err(Error::NonPositiveB(bad));
    }
    let hypothesis = a.len() > 1 && certainly_below_c_ratio(b.len() as u64, c, a.len());
    let (lhs, witness) = b
        .iter()
        .map(|x| (crate::profile::delta_int(a, x).expect("nonempty"), x))
        .max_by_key(|&(d, x)| (d, std::cmp::Reverse(x)))
        .unwrap();
    let rhs = b.len() as i128;
    let mut v = BoundVerdict::new(
        ClaimId::T1,
        hypothesis,
        int(lhs as i128),
        int(rhs),
        lhs as i128 >= rhs,
    )
    .with_witnesses([witness])
    .with_margin(int(lhs as i128 - rhs));
    if a.len() > 1 {
        v.c_threshold = Some(c_threshold_upper(b.len() as u64, a.len()));
    } else {
        v = v.with_note("|A| <= 1");
    }
    Ok(v)
}

/// Gates shared by the prime-order claims. Returns the failed gates.
fn main_gates(a: &ResidueSet, size: u64, c: Rational) -> Vec<&'static str> {
    let mut failed = Vec::new();
    if a.len() <= 1 {
        failed.push("|A| <= 1");
    }
    if !a.modulus().exceeds_twice(a.len()) {
        failed.push("|A| >= p/2");
    }
    if 8 * (size as u128) * (size as u128) >= a.p() as u128 {
        failed.push("8|B|^2 >= p");
    }
    if !certainly_below_c_ratio(size, c, a.len()) {
        failed.push("|B| not certainly below c|A|/ln|A|");
    }
    failed
}

/// Prime order: `|B| < min(c|A|/ln|A|, sqrt(p/8))` with `B ∩ (−B) = ∅`
/// implies `μ_A(B) >= |B|`.
pub fn check_main(a: &ResidueSet, b: &ResidueSet, c: Rational) -> Result<BoundVerdict> {
    a.ensure_same_group(b)?;
    let mut failed = main_gates(a, b.len() as u64, c);
    if b.is_empty() {
        failed.push("B is empty");
    }
    if !b.is_sign_free() {
        failed.push("B meets -B");
    }
    let (lhs, witness) = if b.is_empty() {
        (0, None)
    } else {
        let (d, w) = argmax_delta(a, b);
        (d, Some(w as i64))
    };
    let rhs = b.len() as i128;
    let mut v = BoundVerdict::new(
        ClaimId::T2,
        failed.is_empty(),
        int(lhs),
        int(rhs),
        i128::from(lhs) >= rhs,
    )
    .with_witnesses(witness)
    .with_margin(int(i128::from(lhs) - rhs));
    if a.len() > 1 {
        v.c_threshold = Some(c_threshold_upper(b.len() as u64, a.len()));
    }
    if !failed.is_empty() {
        v = v.with_note(failed.join("; "));
    }
    Ok(v)
}

/// Census form: at most `2m` nonzero `b` with `Δ_A(b) <= m`.
pub fn check_main_census(a: &ResidueSet, m: u64, c: Rational) -> Result<BoundVerdict> {
    let failed = main_gates(a, m, c);
    let report = profile(a, ProfileBackend::Auto).census(m);
    let (lhs, rhs) = (report.count as i128, 2 * m as i128);
    let mut v = BoundVerdict::new(
        ClaimId::T2Census,
        failed.is_empty(),
        int(lhs),
        int(rhs),
        lhs <= rhs,
    )
    .with_witnesses(report.witnesses.iter().map(|&w| w as i64))
    .with_margin(int(rhs - lhs));
    if a.len() > 1 {
        v.c_threshold = Some(c_threshold_upper(m, a.len()));
    }
    if !failed.is_empty() {
        v = v.with_note(failed.join("; "));
    }
    Ok(v)
}

/// First sign-free `B` of size `k` with `μ_A(B) < k`, found by enumerating
/// one element from each chosen `±` pair. Exponential; small `p` only.
pub fn find_b_form_violation(a: &ResidueSet, k: usize) -> Option<ResidueSet> {
    let p = a.modulus();
    let half = ((p.get() - 1) / 2) as usize;
    if k == 0 || k > half {
        return None;
    }
    let deltas: Vec<u32> = (0..p.get()).map(|b| delta(a, b)).collect();
    let mut chosen = Vec::with_capacity(k);
    fn pairs(
        next: usize,
        half: usize,
        k: usize,
        chosen: &mut Vec<u64>,
        visit: &mut dyn FnMut(&[u64]) -> bool,
    ) -> bool {
        if chosen.len() == k {
            return visit(chosen);
        }
        for r in next..=half {
            chosen.push(r as u64);
            if pairs(r + 1, half, k, chosen, visit) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut found = None;
    pairs(1, half, k, &mut chosen, &mut |reps| {
        for signs in 0u32..(1 << k) {
            let elems: Vec<u64> = reps
                .iter()
                .enumerate()
                .map(|(i, &r)| if signs >> i & 1 == 1 { p.neg(r) } else { r })
                .collect();
            let worst = elems.iter().map(|&b| deltas[b as usize]).max().unwrap();
            if (worst as usize) < k {
                found = Some(ResidueSet::collect_residues(p, elems));
                return true;
            }
        }
        false
    });
    found
}

/// `N_m(A) <= 2m` exactly when no sign-free `B` of size `m + 1` has
/// `μ_A(B) < m + 1`. Returns whether the two forms agree on `(A, m)`.
pub fn census_b_form_agree(a: &ResidueSet, m: u64) -> bool {
    let census_ok = profile(a, ProfileBackend::Naive).census(m).count <= 2 * m;
    let b_form_ok = find_b_form_violation(a, m as usize + 1).is_none();
    census_ok == b_form_ok
}

/// Full Freiman statement: when both hypotheses hold, the shortest
/// covering progression has at most `|2B| - |B| + 1` terms.
pub fn check_freiman_cover(b: &ResidueSet) -> Result<BoundVerdict> {
    let gate = freiman_gate(b)?;
    let ap = shortest_covering_ap(b)?;
    let bound = gate.cover_bound();
    let mut v = BoundVerdict::new(
        ClaimId::T33,
        gate.holds(),
        int(ap.length as i128),
        int(bound as i128),
        ap.length as usize <= bound,
    )
    .with_witnesses([ap.start as i64, ap.difference as i64])
    .with_margin(int(bound as i128 - ap.length as i128));
    if !gate.holds() {
        v = v.with_note(format!(
            "size |B| < p/35: {}; doubling |2B| <= 2.4|B| - 3: {}",
            gate.size_ok, gate.doubling_ok
        ));
    }
    Ok(v)
}

/// Parameters for the restricted-sumset theorems.
#[derive(Debug, Clone, Copy, Default)]
pub struct RsParams {
    pub eps: Option<Rational>,
    pub c: Option<Rational>,
}

pub fn check_rs_theorems(
    claim: ClaimId,
    a: &ResidueSet,
    b: &ResidueSet,
    tau: &RestrictedMap,
    params: RsParams,
) -> Result<BoundVerdict> {
    let restricted = restricted_sumset(a, b, tau)?;
    let (na, nb) = (a.len() as i128, b.len() as i128);
    let lhs = restricted.len() as i128;
    match claim {
        ClaimId::T51 => {
            let eps = params.eps.ok_or_else(|| arity(claim, "needs eps"))?;
            if eps <= int(0) {
                return Err(Error::InvalidArgument("eps must be positive".into()));
            }
            let diffs = b.difference_set()?.len() as i128;
            let hypothesis = int(nb) <= (int(1) - eps) * int(na) && eps * int(diffs) >= int(na);
            let sum = a.sumset(b)?.len() as i128;
            let holds = sum >= na + nb && lhs >= na + nb - 2;
            Ok(
                BoundVerdict::new(claim, hypothesis, int(lhs), int(na + nb - 2), holds)
                    .with_margin(int(lhs - (na + nb - 2)))
                    .with_note(format!("|A+B| = {sum} vs |A|+|B| = {}", na + nb)),
            )
        }
        ClaimId::T52 => {
            let hypothesis =
                na > 0 && nb > 0 && a.modulus().exceeds_twice(a.len()) && (nb - 1) * (nb - 1) < na;
            Ok(BoundVerdict::new(
                claim,
                hypothesis,
                int(lhs),
                int(na + nb - 3),
                lhs >= na + nb - 3,
            )
            .with_margin(int(lhs - (na + nb - 3))))
        }
        ClaimId::T53 => {
            let c = params.c.ok_or_else(|| arity(claim, "needs c"))?;
            let mut failed = main_gates(a, b.len() as u64, c);
            if b.is_empty() {
                failed.push("B is empty");
            }
            let mut v = BoundVerdict::new(
                claim,
                failed.is_empty(),
                int(lhs),
                int(na + nb - 3),
                lhs >= na + nb - 3,
            )
            .with_margin(int(lhs - (na + nb - 3)));
            if !failed.is_empty() {
                v = v.with_note(failed.join("; "));
            }
            Ok(v)
        }
        _ => Err(arity(claim, "not a restricted-sumset theorem")),
    }
}

#[cfg(test)]
mod tests;

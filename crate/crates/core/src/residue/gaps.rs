use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{IntSet, PrimeModulus, ResidueSet};

/// A half-open circular interval `[start, end)_p` of non-members. `end` is
/// `start + length` and is not reduced, so it may exceed `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapDescriptor {
    pub start: u64,
    pub end: u64,
    pub length: u64,
}

/// Image of `[u, v) ∩ Z` in `Z/pZ`.
pub fn interval_set(p: PrimeModulus, u: i64, v: i64) -> Result<ResidueSet> {
    if v < u {
        return Err(Error::ReversedInterval { u, v });
    }
    if (v as i128 - u as i128) > p.get() as i128 {
        return Err(Error::RangeTooWide { p: p.get(), u, v });
    }
    Ok(ResidueSet::reduced(p, u..v))
}

/// All maximal circular runs of non-members, ordered by start.
pub fn gaps(set: &ResidueSet) -> Vec<GapDescriptor> {
    let p = set.p();
    let members = set.to_vec();
    if members.is_empty() || set.is_full() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for pair in members.windows(2) {
        let len = pair[1] - pair[0] - 1;
        if len > 0 {
            out.push(GapDescriptor {
                start: pair[0] + 1,
                end: pair[1],
                length: len,
            });
        }
    }
    let (first, last) = (members[0], *members.last().unwrap());
    let wrap = first + p - last - 1;
    if wrap > 0 {
        let start = (last + 1) % p;
        out.push(GapDescriptor {
            start,
            end: start + wrap,
            length: wrap,
        });
    }
    out.sort_by_key(|g| g.start);
    out
}

/// Number of maximal circular runs of members; 0 for the empty set and 1
/// for the whole group.
pub fn blocks(set: &ResidueSet) -> usize {
    if set.is_empty() {
        0
    } else if set.is_full() {
        1
    } else {
        gaps(set).len()
    }
}

/// Longest run of non-members, least start on ties.
pub fn largest_gap(set: &ResidueSet) -> Result<GapDescriptor> {
    if !set.is_proper() {
        return Err(Error::DegenerateSet);
    }
    let all = gaps(set);
    let best = all.iter().map(|g| g.length).max().unwrap();
    Ok(*all.iter().find(|g| g.length == best).unwrap())
}

/// Lifts `set` to the integers in `[v, u + p)`, where `[u, v)_p` is its
/// largest gap.
pub fn rectify(set: &ResidueSet) -> Result<IntSet> {
    let gap = largest_gap(set)?;
    let p = set.p() as i64;
    let v = gap.end as i64;
    Ok(set
        .iter()
        .map(|a| v + (a as i64 - v).rem_euclid(p))
        .collect())
}

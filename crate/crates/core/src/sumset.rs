//! Sumset algebra: h-fold sumsets, symmetric closures, difference sets,
//! restricted sumsets, Cauchy-Davenport, the Freiman rectification gate,
//! shortest covering progressions and the dense difference-set lemma.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{frac, int};
use crate::residue::{gaps, Doubled, IntSet, PrimeModulus, ResidueSet};
use crate::verdict::{BoundVerdict, ClaimId};

/// Sets that support Minkowski addition and negation.
pub trait AdditiveSet: Clone + Sized {
    fn is_empty_set(&self) -> bool;

    /// `A + B`. Both operands must be nonempty.
    fn sumset(&self, other: &Self) -> Result<Self>;

    fn negated(&self) -> Self;

    /// `hB = {b1 + ... + bh}`.
    fn hfold(&self, h: usize) -> Result<Self> {
        if self.is_empty_set() {
            return Err(Error::EmptySet);
        }
        if h == 0 {
            return Err(Error::InvalidArgument("h must be at least 1".into()));
        }
        let mut acc = self.clone();
        for _ in 1..h {
            acc = acc.sumset(self)?;
        }
        Ok(acc)
    }

    /// `B - B`.
    fn difference_set(&self) -> Result<Self> {
        self.sumset(&self.negated())
    }
}

impl AdditiveSet for ResidueSet {
    fn is_empty_set(&self) -> bool {
        self.is_empty()
    }

    fn sumset(&self, other: &Self) -> Result<Self> {
        self.ensure_same_group(other)?;
        if self.is_empty() || other.is_empty() {
            return Err(Error::EmptySet);
        }
        let (small, big) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let doubled = Doubled::new(big);
        let mut acc = vec![0u64; big.words().len()];
        let mut tmp = vec![0u64; big.words().len()];
        for b in small.iter() {
            if b == 0 {
                tmp.copy_from_slice(big.words());
            } else {
                doubled.rotate_into(b, &mut tmp);
            }
            acc.iter_mut().zip(&tmp).for_each(|(x, y)| *x |= y);
        }
        Ok(ResidueSet::from_words(self.modulus(), acc))
    }

    fn negated(&self) -> Self {
        ResidueSet::negated(self)
    }

    fn hfold(&self, h: usize) -> Result<Self> {
        if self.is_empty() {
            return Err(Error::EmptySet);
        }
        if h == 0 {
            return Err(Error::InvalidArgument("h must be at least 1".into()));
        }
        let mut acc = self.clone();
        for _ in 1..h {
            if acc.is_full() {
                break;
            }
            acc = acc.sumset(self)?;
        }
        Ok(acc)
    }
}

impl AdditiveSet for IntSet {
    fn is_empty_set(&self) -> bool {
        self.is_empty()
    }

    fn sumset(&self, other: &Self) -> Result<Self> {
        if self.is_empty() || other.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(self
            .iter()
            .flat_map(|a| other.iter().map(move |b| a + b))
            .collect())
    }

    fn negated(&self) -> Self {
        self.iter().map(|x| -x).collect()
    }
}

/// `S ∪ {0} ∪ (−S)`.
pub fn sym_closure(set: &ResidueSet) -> ResidueSet {
    let p = set.modulus();
    ResidueSet::collect_residues(
        p,
        set.iter()
            .chain(std::iter::once(0))
            .chain(set.iter().map(|s| p.neg(s))),
    )
}

/// Integer analogue of [`sym_closure`].
pub fn sym_closure_int(set: &IntSet) -> IntSet {
    set.iter()
        .chain(std::iter::once(0))
        .chain(set.iter().map(|s| -s))
        .collect()
}

/// A finite table `b -> τ(b)` for the restricted sumset `A +τ B`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RestrictedMap {
    table: BTreeMap<u64, u64>,
}

impl RestrictedMap {
    pub fn new(pairs: impl IntoIterator<Item = (u64, u64)>) -> Self {
        Self {
            table: pairs.into_iter().collect(),
        }
    }

    pub fn get(&self, b: u64) -> Option<u64> {
        self.table.get(&b).copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.table.iter().map(|(&b, &a)| (b, a))
    }

    pub fn is_injective(&self) -> bool {
        let mut images: Vec<u64> = self.table.values().copied().collect();
        images.sort_unstable();
        images.windows(2).all(|w| w[0] != w[1])
    }

    /// Checks that the table is a total map `B -> A`.
    pub fn validate(&self, a: &ResidueSet, b: &ResidueSet) -> Result<()> {
        for (&key, &img) in &self.table {
            if !b.contains(key) {
                return Err(Error::TauOutsideDomain(key));
            }
            if !a.contains(img) {
                return Err(Error::TauImageOutsideA { b: key, a: img });
            }
        }
        match b.iter().find(|x| !self.table.contains_key(x)) {
            Some(missing) => Err(Error::TauNotTotal(missing)),
            None => Ok(()),
        }
    }

    /// Every map `B -> A`, in lexicographic order of images.
    pub fn enumerate_all(a: &ResidueSet, b: &ResidueSet) -> Vec<RestrictedMap> {
        let domain = b.to_vec();
        let images = a.to_vec();
        if images.is_empty() {
            return if domain.is_empty() {
                vec![RestrictedMap::default()]
            } else {
                Vec::new()
            };
        }
        let total = images.len().pow(domain.len() as u32);
        (0..total)
            .map(|mut code| {
                let mut pairs = Vec::with_capacity(domain.len());
                for &key in &domain {
                    pairs.push((key, images[code % images.len()]));
                    code /= images.len();
                }
                RestrictedMap::new(pairs)
            })
            .collect()
    }
}

impl fmt::Display for RestrictedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (b, a)) in self.pairs().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}->{a}")?;
        }
        Ok(())
    }
}

impl FromStr for RestrictedMap {
    type Err = Error;

    /// `b->a` pairs separated by commas, e.g. `0->2,1->0`.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut table = BTreeMap::new();
        if compact.is_empty() {
            return Ok(Self { table });
        }
        for item in compact.split(',') {
            let (b, a) = item
                .split_once("->")
                .ok_or_else(|| Error::Parse(format!("expected b->a, got {item:?}")))?;
            let parse = |x: &str| {
                x.parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad residue {x:?} in {item:?}")))
            };
            let (b, a) = (parse(b)?, parse(a)?);
            if table.insert(b, a).is_some() {
                return Err(Error::Parse(format!("tau defined twice on {b}")));
            }
        }
        Ok(Self { table })
    }
}

/// `A +τ B = {a + b : a in A, b in B, a != τ(b)}`.
pub fn restricted_sumset(
    a: &ResidueSet,
    b: &ResidueSet,
    tau: &RestrictedMap,
) -> Result<ResidueSet> {
    a.ensure_same_group(b)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    tau.validate(a, b)?;
    let p = a.modulus();
    let sums = b.iter().flat_map(|y| {
        let forbidden = tau.get(y).expect("validated");
        a.iter()
            .filter(move |&x| x != forbidden)
            .map(move |x| p.add(x, y))
    });
    Ok(ResidueSet::collect_residues(p, sums))
}

pub fn cauchy_davenport_check(a: &ResidueSet, b: &ResidueSet) -> Result<BoundVerdict> {
    let sum = a.sumset(b)?;
    let rhs = (a.len() + b.len() - 1).min(a.p() as usize);
    Ok(BoundVerdict::new(
        ClaimId::Cd,
        true,
        int(sum.len() as i128),
        int(rhs as i128),
        sum.len() >= rhs,
    ))
}

/// The two hypotheses of the Freiman rectification theorem, decided in
/// integers: `35|B| < p` and `5|2B| <= 12|B| - 15`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreimanGate {
    pub card: usize,
    pub doubled_card: usize,
    pub size_ok: bool,
    pub doubling_ok: bool,
}

impl FreimanGate {
    pub fn holds(&self) -> bool {
        self.size_ok && self.doubling_ok
    }

    /// `|2B| - |B| + 1`.
    pub fn cover_bound(&self) -> usize {
        self.doubled_card - self.card + 1
    }
}

pub fn freiman_gate(b: &ResidueSet) -> Result<FreimanGate> {
    let doubled = b.hfold(2)?;
    let (card, doubled_card) = (b.len() as i128, doubled.len() as i128);
    Ok(FreimanGate {
        card: b.len(),
        doubled_card: doubled.len(),
        size_ok: 35 * card < b.p() as i128,
        doubling_ok: 5 * doubled_card <= 12 * card - 15,
    })
}

/// Verdict on the doubling condition `|2B| <= 2.4|B| - 3`, gated on the
/// size condition `|B| < p/35` (vacuous when the size condition fails).
pub fn freiman_condition(b: &ResidueSet) -> Result<BoundVerdict> {
    let gate = freiman_gate(b)?;
    let rhs = frac(12 * gate.card as i128, 5) - int(3);
    Ok(BoundVerdict::new(
        ClaimId::T33,
        gate.size_ok,
        int(gate.doubled_card as i128),
        rhs,
        gate.doubling_ok,
    )
    .with_note(format!(
        "size |B| < p/35: {}; doubling |2B| <= 2.4|B| - 3: {}",
        gate.size_ok, gate.doubling_ok
    )))
}

/// `{start + j * difference : 0 <= j < length}` in `Z/pZ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApDescriptor {
    pub start: u64,
    pub difference: u64,
    pub length: u64,
}

impl ApDescriptor {
    pub fn elements(&self, p: PrimeModulus) -> ResidueSet {
        ResidueSet::collect_residues(
            p,
            (0..self.length).map(|j| p.add(self.start, p.mul(j, self.difference))),
        )
    }
}

/// Shortest arithmetic progression containing `B`. Differences `d` and
/// `p - d` give the same progressions, so only `d <= (p-1)/2` is scanned.
/// Ties go to the least difference, then the least start.
pub fn shortest_covering_ap(b: &ResidueSet) -> Result<ApDescriptor> {
    if b.is_empty() {
        return Err(Error::EmptySet);
    }
    if b.is_full() {
        return Err(Error::FullSet);
    }
    let p = b.modulus();
    if b.len() == 1 {
        return Ok(ApDescriptor {
            start: b.iter().next().unwrap(),
            difference: 1,
            length: 1,
        });
    }
    let mut best: Option<ApDescriptor> = None;
    for d in 1..=(p.get() - 1) / 2 {
        let d_inv = p.inverse(d).expect("d is nonzero");
        let image = ResidueSet::collect_residues(p, b.iter().map(|x| p.mul(d_inv, x)));
        let all = gaps(&image);
        let widest = all.iter().map(|g| g.length).max().unwrap();
        let length = p.get() - widest;
        if best.is_some_and(|bst| bst.length <= length) {
            continue;
        }
        // the window starts right after a widest gap
        let start = all
            .iter()
            .filter(|g| g.length == widest)
            .map(|g| p.mul(d, g.end % p.get()))
            .min()
            .unwrap();
        best = Some(ApDescriptor {
            start,
            difference: d,
            length,
        });
    }
    Ok(best.expect("p >= 3 whenever 1 < |B| < p"))
}

/// Dense difference-set lemma: if `max B - min B < ((2k-1)/k)|B| - 1`,
/// then `B - B` contains every integer of `(−|B|/(k−1), |B|/(k−1))`.
/// Missing integers are reported as witnesses.
pub fn difset_interval_check(b: &IntSet, k: u64) -> Result<BoundVerdict> {
    if b.is_empty() {
        return Err(Error::EmptySet);
    }
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "k must be at least 2, got {k}"
        )));
    }
    let (k, n) = (k as i128, b.len() as i128);
    let spread = (b.max().unwrap() - b.min().unwrap()) as i128;
    let hypothesis = k * spread < (2 * k - 1) * n - k;
    let rhs = frac((2 * k - 1) * n, k) - int(1);
    // integers x with |x| (k-1) < |B|
    let radius = (n + k - 2) / (k - 1) - 1;
    let diffs = b.difference_set()?;
    let missing: Vec<i64> = (-radius..=radius)
        .map(|x| x as i64)
        .filter(|&x| !diffs.contains(x))
        .collect();
    Ok(BoundVerdict::new(
        ClaimId::L34,
        hypothesis,
        int(spread),
        rhs,
        missing.is_empty(),
    )
    .with_witnesses(missing)
    .with_note(format!("interval radius {radius}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verdict::Outcome;
    use proptest::prelude::*;

    fn rs(s: &str) -> ResidueSet {
        s.parse().unwrap()
    }

    fn z(s: &str) -> IntSet {
        s.parse().unwrap()
    }

    #[test]
    fn hfold_examples() {
        assert_eq!(rs("11:1,2").hfold(2).unwrap(), rs("11:2,3,4"));
        assert_eq!(rs("11:1,2").hfold(1).unwrap(), rs("11:1,2"));
        assert_eq!(z("Z:0,1").hfold(3).unwrap(), z("Z:0,1,2,3"));
        assert!(matches!(rs("11:").hfold(2), Err(Error::EmptySet)));
        assert!(rs("11:1").hfold(0).is_err());
        assert!(rs("7:0,1").hfold(10).unwrap().is_full());
    }

    #[test]
    fn sym_closure_examples() {
        let s = sym_closure(&rs("7:1,2"));
        assert_eq!(s, rs("7:0,1,2,5,6"));
        assert_eq!(s.len(), 2 * 2 + 1);
        assert_eq!(sym_closure(&rs("5:")), rs("5:0"));
        assert_eq!(sym_closure(&rs("7:3")), rs("7:0,3,4"));
    }

    #[test]
    fn difference_set_examples() {
        assert_eq!(
            rs("11:0,1,3").difference_set().unwrap(),
            rs("11:0,1,2,3,8,9,10")
        );
        assert_eq!(rs("11:4").difference_set().unwrap(), rs("11:0"));
        assert_eq!(
            z("Z:0,1,2,4").difference_set().unwrap(),
            IntSet::range(-4, 5)
        );
    }

    #[test]
    fn restricted_sumset_examples() {
        let tau: RestrictedMap = "0->0,1->1".parse().unwrap();
        assert_eq!(
            restricted_sumset(&rs("7:0,1"), &rs("7:0,1"), &tau).unwrap(),
            rs("7:1")
        );
        let tau: RestrictedMap = "0->2".parse().unwrap();
        assert_eq!(
            restricted_sumset(&rs("7:0,1,2"), &rs("7:0"), &tau).unwrap(),
            rs("7:0,1")
        );
        let bad: RestrictedMap = "0->5".parse().unwrap();
        assert!(matches!(
            restricted_sumset(&rs("7:0,1,2"), &rs("7:0"), &bad),
            Err(Error::TauImageOutsideA { b: 0, a: 5 })
        ));
        let partial: RestrictedMap = "0->0".parse().unwrap();
        assert!(matches!(
            restricted_sumset(&rs("7:0,1"), &rs("7:0,1"), &partial),
            Err(Error::TauNotTotal(1))
        ));
        assert!("0-1".parse::<RestrictedMap>().is_err());
        assert!("0->1,0->2".parse::<RestrictedMap>().is_err());
        assert_eq!(tau_roundtrip("1->0,0->2"), "0->2,1->0");
    }

    fn tau_roundtrip(s: &str) -> String {
        s.parse::<RestrictedMap>().unwrap().to_string()
    }

    #[test]
    fn enumerate_all_maps() {
        let maps = RestrictedMap::enumerate_all(&rs("11:0,1,2,3,4"), &rs("11:0,1"));
        assert_eq!(maps.len(), 25);
        for m in &maps {
            m.validate(&rs("11:0,1,2,3,4"), &rs("11:0,1")).unwrap();
        }
        assert_eq!(maps.iter().filter(|m| m.is_injective()).count(), 20);
    }

    #[test]
    fn cauchy_davenport_examples() {
        let v = cauchy_davenport_check(&rs("7:0,1,2"), &rs("7:0,1")).unwrap();
        assert_eq!((v.lhs, v.rhs, v.pass), (int(4), int(4), Outcome::Pass));
        let full = ResidueSet::full(PrimeModulus::new(5).unwrap());
        let v = cauchy_davenport_check(&full, &full).unwrap();
        assert_eq!((v.lhs, v.rhs, v.pass), (int(5), int(5), Outcome::Pass));
        let v = cauchy_davenport_check(&rs("7:0,2,3"), &rs("7:0,1")).unwrap();
        assert_eq!((v.lhs, v.rhs, v.pass), (int(5), int(4), Outcome::Pass));
        assert!(cauchy_davenport_check(&rs("7:"), &rs("7:1")).is_err());
    }

    #[test]
    fn freiman_condition_examples() {
        let v = freiman_condition(&rs("179:0,1,2,3,4")).unwrap();
        assert!(v.hypothesis_ok);
        assert_eq!(v.lhs, int(9));
        assert_eq!(v.rhs, int(9)); // 2.4 * 5 - 3
        assert_eq!(v.pass, Outcome::Pass);
        let v = freiman_condition(&rs("179:0,1,2")).unwrap();
        assert_eq!(v.lhs, int(5));
        assert_eq!(v.pass, Outcome::Fail);
        let big = ResidueSet::collect_residues(PrimeModulus::new(179).unwrap(), 0..6);
        let v = freiman_condition(&big).unwrap();
        assert!(!v.hypothesis_ok);
        assert_eq!(v.pass, Outcome::Vacuous);
    }

    /// Shortest AP containing `b` by trying every start, difference and length.
    fn covering_oracle(b: &ResidueSet) -> u64 {
        let p = b.modulus();
        let mut best = p.get();
        for d in 1..p.get() {
            for s in 0..p.get() {
                for len in 1..best {
                    let ap = ApDescriptor {
                        start: s,
                        difference: d,
                        length: len,
                    };
                    if b.is_subset(&ap.elements(p)) {
                        best = len;
                        break;
                    }
                }
            }
        }
        best
    }

    #[test]
    fn covering_ap_examples() {
        let ap = shortest_covering_ap(&rs("11:0,2,4")).unwrap();
        assert_eq!((ap.start, ap.difference, ap.length), (0, 2, 3));
        let ap = shortest_covering_ap(&rs("11:3")).unwrap();
        assert_eq!((ap.start, ap.difference, ap.length), (3, 1, 1));
        // {0,1,5} contains no 3-term progression; the oracle finds 4
        let b = rs("11:0,1,5");
        let ap = shortest_covering_ap(&b).unwrap();
        assert_eq!(covering_oracle(&b), 4);
        assert_eq!(ap.length, 4);
        assert_eq!((ap.difference, ap.start), (5, 1));
        assert!(b.is_subset(&ap.elements(b.modulus())));
        let full = ResidueSet::full(PrimeModulus::new(5).unwrap());
        assert!(matches!(shortest_covering_ap(&full), Err(Error::FullSet)));
    }

    #[test]
    fn covering_ap_matches_oracle_exhaustively() {
        let p = PrimeModulus::new(11).unwrap();
        for mask in 1u32..(1 << 11) - 1 {
            let b = ResidueSet::collect_residues(p, (0..11).filter(|i| mask >> i & 1 == 1));
            let ap = shortest_covering_ap(&b).unwrap();
            assert_eq!(ap.length, covering_oracle(&b), "{b}");
            assert!(b.is_subset(&ap.elements(p)));
        }
    }

    #[test]
    fn difset_interval_examples() {
        let v = difset_interval_check(&z("Z:0,1,2,4"), 2).unwrap();
        assert!(v.hypothesis_ok);
        assert_eq!((v.lhs, v.rhs), (int(4), int(5)));
        assert_eq!(v.pass, Outcome::Pass);
        assert_eq!(v.note, "interval radius 3");
        let v = difset_interval_check(&z("Z:0,1,2,4"), 3).unwrap();
        assert!(v.hypothesis_ok);
        assert_eq!(v.rhs, frac(17, 3));
        assert_eq!(v.note, "interval radius 1");
        assert_eq!(v.pass, Outcome::Pass);
        let v = difset_interval_check(&z("Z:0,5"), 2).unwrap();
        assert!(!v.hypothesis_ok);
        assert_eq!(v.pass, Outcome::Vacuous);
        assert_eq!(v.witnesses, vec![-1, 1]);
        assert!(difset_interval_check(&z("Z:0"), 1).is_err());
    }

    fn arb_small() -> impl Strategy<Value = (ResidueSet, ResidueSet)> {
        (
            prop::sample::select(vec![7u64, 11, 13, 97]),
            any::<u128>(),
            any::<u128>(),
        )
            .prop_map(|(n, x, y)| {
                let p = PrimeModulus::new(n).unwrap();
                let pick = |bits: u128, keep: u32| {
                    ResidueSet::collect_residues(
                        p,
                        (0..n).filter(|&i| {
                            bits >> (i % 128) & 1 == 1
                                && (i as u32).wrapping_mul(2654435761u32).is_multiple_of(keep)
                        }),
                    )
                };
                (pick(x, 1), pick(y, 3))
            })
    }

    proptest! {
        #[test]
        fn sumset_laws((a, b) in arb_small()) {
            prop_assume!(!a.is_empty() && !b.is_empty());
            let p = a.modulus();
            let brute = ResidueSet::collect_residues(p, a.iter().flat_map(|x| b.iter().map(move |y| p.add(x, y))));
            prop_assert_eq!(a.sumset(&b).unwrap(), brute);
            for (h1, h2) in [(1, 1), (1, 2), (2, 2)] {
                prop_assert_eq!(b.hfold(h1 + h2).unwrap(), b.hfold(h1).unwrap().sumset(&b.hfold(h2).unwrap()).unwrap());
            }
            let d = b.difference_set().unwrap();
            prop_assert!(d.contains(0));
            prop_assert_eq!(d.negated(), d.clone());
            prop_assert_eq!(sym_closure(&b), sym_closure(&b.negated()));
            let sum = a.sumset(&b).unwrap();
            prop_assert!(sum.len() >= (a.len() + b.len() - 1).min(p.get() as usize));
        }

        #[test]
        fn symmetric_integer_sets_double_as_differences(xs in prop::collection::vec(1i64..40, 0..8)) {
            let base: IntSet = xs.into_iter().collect();
            let sym = sym_closure_int(&base);
            prop_assert_eq!(sym.difference_set().unwrap(), sym.hfold(2).unwrap());
        }

        #[test]
        fn restricted_sumset_loses_at_most_one_sum_per_b((a, b) in arb_small(), seed in any::<u64>()) {
            prop_assume!(!a.is_empty() && !b.is_empty());
            let images = a.to_vec();
            let tau = RestrictedMap::new(b.iter().enumerate().map(|(i, y)| (y, images[(seed as usize).wrapping_add(i * 7) % images.len()])));
            let r = restricted_sumset(&a, &b, &tau).unwrap();
            let full = a.sumset(&b).unwrap();
            prop_assert!(r.is_subset(&full));
            prop_assert!(r.len() + b.len() >= full.len());
        }
    }
}

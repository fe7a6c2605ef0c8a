use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::PrimeModulus;

/// Largest modulus for which a membership bitvector is materialized.
pub const MAX_SET_MODULUS: u64 = 1 << 31;

/// A subset of `Z/pZ` stored as a `p`-bit membership vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ResidueSet {
    modulus: PrimeModulus,
    words: Vec<u64>,
    card: usize,
}

#[inline]
fn word_count(p: u64) -> usize {
    p.div_ceil(64) as usize
}

#[inline]
fn tail_mask(p: u64) -> u64 {
    match p % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

fn check_size(p: PrimeModulus) -> Result<()> {
    if p.get() > MAX_SET_MODULUS {
        Err(Error::ModulusTooLarge(p.get()))
    } else {
        Ok(())
    }
}

impl ResidueSet {
    pub fn empty(p: PrimeModulus) -> Self {
        assert!(
            p.get() <= MAX_SET_MODULUS,
            "modulus {p} too large for a bitvector"
        );
        Self {
            modulus: p,
            words: vec![0; word_count(p.get())],
            card: 0,
        }
    }

    pub fn full(p: PrimeModulus) -> Self {
        let mut words = vec![u64::MAX; word_count(p.get())];
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(p.get());
        }
        Self::from_words(p, words)
    }

    /// Builds a set from residues in `[0, p)`, rejecting out-of-range and
    /// repeated elements.
    pub fn from_residues<I>(p: PrimeModulus, elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = i64>,
    {
        check_size(p)?;
        let mut set = Self::empty(p);
        for e in elements {
            if e < 0 || e as u64 >= p.get() {
                return Err(Error::ElementOutOfRange {
                    p: p.get(),
                    element: e,
                });
            }
            if !set.insert(e as u64) {
                return Err(Error::DuplicateElement(e));
            }
        }
        Ok(set)
    }

    /// Reduces every integer mod `p`; duplicates after reduction collapse.
    pub fn reduced<I>(p: PrimeModulus, elements: I) -> Self
    where
        I: IntoIterator<Item = i64>,
    {
        let mut set = Self::empty(p);
        for e in elements {
            set.insert(p.reduce(e));
        }
        set
    }

    /// Like [`ResidueSet::reduced`] for values already in `[0, p)`.
    pub(crate) fn collect_residues<I>(p: PrimeModulus, elements: I) -> Self
    where
        I: IntoIterator<Item = u64>,
    {
        let mut set = Self::empty(p);
        for e in elements {
            debug_assert!(e < p.get());
            set.insert(e);
        }
        set
    }

    pub(crate) fn from_words(p: PrimeModulus, mut words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), word_count(p.get()));
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(p.get());
        }
        let card = words.iter().map(|w| w.count_ones() as usize).sum();
        Self {
            modulus: p,
            words,
            card,
        }
    }

    /// Only used while a set is being built.
    fn insert(&mut self, x: u64) -> bool {
        let (w, bit) = ((x / 64) as usize, 1u64 << (x % 64));
        if self.words[w] & bit != 0 {
            return false;
        }
        self.words[w] |= bit;
        self.card += 1;
        true
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.modulus.get()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.card
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.card == 0
    }

    #[inline]
    pub fn is_full(&self) -> bool {
        self.card as u64 == self.p()
    }

    /// Nonempty and not the whole group.
    #[inline]
    pub fn is_proper(&self) -> bool {
        !self.is_empty() && !self.is_full()
    }

    #[inline]
    pub fn contains(&self, x: u64) -> bool {
        x < self.p() && self.words[(x / 64) as usize] >> (x % 64) & 1 == 1
    }

    #[inline]
    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let base = i as u64 * 64;
            BitIter(w).map(move |b| base + b as u64)
        })
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }

    pub fn ensure_same_group(&self, other: &ResidueSet) -> Result<()> {
        if self.modulus != other.modulus {
            Err(Error::ModulusMismatch(self.p(), other.p()))
        } else {
            Ok(())
        }
    }

    /// The complement `(Z/pZ) \ A`.
    pub fn complement(&self) -> ResidueSet {
        let words = self.words.iter().map(|w| !w).collect();
        Self::from_words(self.modulus, words)
    }

    /// `-A`.
    pub fn negated(&self) -> ResidueSet {
        let p = self.modulus;
        Self::collect_residues(p, self.iter().map(|a| p.neg(a)))
    }

    /// `A + b`.
    pub fn translate(&self, b: u64) -> ResidueSet {
        let b = b % self.p();
        if b == 0 {
            return self.clone();
        }
        let mut out = vec![0; self.words.len()];
        Doubled::new(self).rotate_into(b, &mut out);
        Self::from_words(self.modulus, out)
    }

    pub fn union(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.ensure_same_group(other)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a | b)
            .collect();
        Ok(Self::from_words(self.modulus, words))
    }

    pub fn intersection(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.ensure_same_group(other)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        Ok(Self::from_words(self.modulus, words))
    }

    pub fn is_subset(&self, other: &ResidueSet) -> bool {
        self.modulus == other.modulus
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    /// `B ∩ (−B) = ∅`. Note that `0 ∈ B` violates this.
    pub fn is_sign_free(&self) -> bool {
        let p = self.modulus;
        self.iter().all(|b| !self.contains(p.neg(b)))
    }

    /// Compares the increasing element lists lexicographically. On sets of
    /// equal size this is decided by the smallest element in the symmetric
    /// difference.
    pub fn cmp_elements(&self, other: &ResidueSet) -> std::cmp::Ordering {
        lex_cmp_words(&self.words, &other.words)
    }
}

/// Lexicographic comparison of sorted member lists, given as bit words.
pub(crate) fn lex_cmp_words(a: &[u64], b: &[u64]) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    for i in 0..a.len().min(b.len()) {
        let diff = a[i] ^ b[i];
        if diff == 0 {
            continue;
        }
        // Both lists agree below `low`; exactly one of them contains it.
        let low = diff & diff.wrapping_neg();
        let a_has = a[i] & low != 0;
        let other = if a_has { b } else { a };
        let above = !(low | (low - 1));
        let other_continues = other[i] & above != 0 || other[i + 1..].iter().any(|&w| w != 0);
        // If the other list has run out it is a proper prefix and sorts first.
        let holder = if other_continues {
            Ordering::Less
        } else {
            Ordering::Greater
        };
        return if a_has { holder } else { holder.reverse() };
    }
    Ordering::Equal
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = u32;
    #[inline]
    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            None
        } else {
            let t = self.0.trailing_zeros();
            self.0 &= self.0 - 1;
            Some(t)
        }
    }
}

/// Membership bits of `A` repeated twice, so that any rotation of `A` is a
/// contiguous `p`-bit window.
pub(crate) struct Doubled {
    p: u64,
    words: Vec<u64>,
}

impl Doubled {
    pub(crate) fn new(set: &ResidueSet) -> Self {
        let p = set.p();
        let mut words = vec![0u64; word_count(2 * p) + 1];
        for a in set.iter() {
            for x in [a, a + p] {
                words[(x / 64) as usize] |= 1 << (x % 64);
            }
        }
        Self { p, words }
    }

    #[inline]
    fn bits_at(&self, offset: u64) -> u64 {
        let (w, s) = ((offset / 64) as usize, offset % 64);
        if s == 0 {
            self.words[w]
        } else {
            (self.words[w] >> s) | (self.words[w + 1] << (64 - s))
        }
    }

    /// Writes the words of `A + b` (0 < b < p) into `out`; bits past `p`
    /// in the final word are left unmasked.
    #[inline]
    pub(crate) fn rotate_into(&self, b: u64, out: &mut [u64]) {
        // (A + b)[i] = A[i - b mod p] = doubled[i + p - b]
        let start = self.p - b;
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.bits_at(start + 64 * i as u64);
        }
        if let Some(last) = out.last_mut() {
            *last &= tail_mask(self.p);
        }
    }
}

impl fmt::Display for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.p())?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ResidueSet({self})")
    }
}

/// A finite set of integers, kept strictly increasing.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntSet {
    elements: Vec<i64>,
}

impl IntSet {
    /// Rejects duplicates; order of the input does not matter.
    pub fn new(mut elements: Vec<i64>) -> Result<Self> {
        elements.sort_unstable();
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateElement(w[0]));
        }
        Ok(Self { elements })
    }

    pub fn range(lo: i64, hi_exclusive: i64) -> Self {
        Self {
            elements: (lo..hi_exclusive).collect(),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[i64] {
        &self.elements
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.elements.iter().copied()
    }

    pub fn contains(&self, x: i64) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn min(&self) -> Option<i64> {
        self.elements.first().copied()
    }

    pub fn max(&self) -> Option<i64> {
        self.elements.last().copied()
    }

    pub fn reduce_mod(&self, p: PrimeModulus) -> ResidueSet {
        ResidueSet::reduced(p, self.iter())
    }
}

impl FromIterator<i64> for IntSet {
    /// Set semantics: duplicates collapse.
    fn from_iter<I: IntoIterator<Item = i64>>(iter: I) -> Self {
        let mut elements: Vec<i64> = iter.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        Self { elements }
    }
}

impl fmt::Display for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Z:")?;
        for (i, x) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntSet({self})")
    }
}

/// A parsed set literal: `p:e1,e2,...` or `Z:e1,e2,...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetLiteral {
    Residue(ResidueSet),
    Int(IntSet),
}

fn split_literal(s: &str) -> Result<(String, Vec<i64>)> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let (head, body) = compact
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("set literal {s:?} lacks a `group:` prefix")))?;
    let elements = if body.is_empty() {
        Vec::new()
    } else {
        body.split(',')
            .map(|e| {
                e.parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad element {e:?} in {s:?}")))
            })
            .collect::<Result<_>>()?
    };
    Ok((head.to_string(), elements))
}

impl FromStr for SetLiteral {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (head, elements) = split_literal(s)?;
        if head == "Z" || head == "z" {
            return IntSet::new(elements).map(SetLiteral::Int);
        }
        let p: u64 = head
            .parse()
            .map_err(|_| Error::Parse(format!("bad group {head:?} in {s:?}")))?;
        let p = PrimeModulus::new(p)?;
        ResidueSet::from_residues(p, elements).map(SetLiteral::Residue)
    }
}

impl FromStr for ResidueSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<SetLiteral>()? {
            SetLiteral::Residue(r) => Ok(r),
            SetLiteral::Int(_) => Err(Error::Parse(format!("expected a residue set, got {s:?}"))),
        }
    }
}

impl FromStr for IntSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<SetLiteral>()? {
            SetLiteral::Int(z) => Ok(z),
            SetLiteral::Residue(_) => {
                Err(Error::Parse(format!("expected an integer set, got {s:?}")))
            }
        }
    }
}


#[cfg(test)]
mod order_tests {
    use super::*;
    use std::cmp::Ordering;

    #[test]
    fn lex_order_matches_vec_order() {
        let p = PrimeModulus::new(13).unwrap();
        let all: Vec<ResidueSet> = (0u32..1 << 13)
            .step_by(37)
            .map(|mask| ResidueSet::collect_residues(p, (0..13).filter(|i| mask >> i & 1 == 1)))
            .collect();
        for x in &all {
            for y in &all {
                assert_eq!(x.cmp_elements(y), x.to_vec().cmp(&y.to_vec()), "{x} vs {y}");
            }
        }
        let a: ResidueSet = "13:0,1,2".parse().unwrap();
        assert_eq!(a.cmp_elements(&a), Ordering::Equal);
    }
}

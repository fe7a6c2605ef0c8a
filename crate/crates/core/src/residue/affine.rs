use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::set::{lex_cmp_words, Doubled};
use super::{PrimeModulus, ResidueSet};

/// The bijection `x -> scale * x + shift` of `Z/pZ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineMap {
    modulus: PrimeModulus,
    scale: u64,
    shift: u64,
}

impl AffineMap {
    pub fn new(p: PrimeModulus, scale: i64, shift: i64) -> Result<Self> {
        let scale = p.reduce(scale);
        if scale == 0 {
            return Err(Error::ZeroScale);
        }
        Ok(Self {
            modulus: p,
            scale,
            shift: p.reduce(shift),
        })
    }

    pub fn identity(p: PrimeModulus) -> Self {
        Self {
            modulus: p,
            scale: 1,
            shift: 0,
        }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn shift(&self) -> u64 {
        self.shift
    }

    #[inline]
    pub fn apply(&self, x: u64) -> u64 {
        let p = self.modulus;
        p.add(p.mul(self.scale, x), self.shift)
    }

    pub fn inverse(&self) -> Self {
        let p = self.modulus;
        let inv = p.inverse(self.scale).expect("scale is nonzero");
        Self {
            modulus: p,
            scale: inv,
            shift: p.neg(p.mul(inv, self.shift)),
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &AffineMap) -> Self {
        let p = self.modulus;
        Self {
            modulus: p,
            scale: p.mul(next.scale, self.scale),
            shift: next.apply(self.shift),
        }
    }
}

/// `{u*a + v : a in A}`.
pub fn apply_affine(set: &ResidueSet, map: &AffineMap) -> Result<ResidueSet> {
    if set.modulus() != map.modulus {
        return Err(Error::ModulusMismatch(set.p(), map.modulus.get()));
    }
    Ok(ResidueSet::collect_residues(
        set.modulus(),
        set.iter().map(|a| map.apply(a)),
    ))
}

/// Runs `visit` on every affine image `u*A + v` that contains 0, i.e. every
/// translate of a dilate that could be the orbit minimum (for nonempty A).
/// `visit` returns `false` to stop early.
fn for_each_zero_image(set: &ResidueSet, mut visit: impl FnMut(u64, u64, &[u64]) -> bool) {
    let p = set.modulus();
    let mut out = vec![0u64; set.words().len()];
    for u in 1..p.get() {
        let dilate = ResidueSet::collect_residues(p, set.iter().map(|a| p.mul(u, a)));
        let doubled = Doubled::new(&dilate);
        for d in dilate.iter() {
            let v = p.neg(d);
            if v == 0 {
                out.copy_from_slice(dilate.words());
            } else {
                doubled.rotate_into(v, &mut out);
            }
            if !visit(u, v, &out) {
                return;
            }
        }
    }
}

/// Orbit representative under the affine group: the image whose increasing
/// element list is lexicographically least, plus a map reaching it. Ties
/// between maps are broken by least shift, then least scale.
pub fn canonical_form(set: &ResidueSet) -> (ResidueSet, AffineMap) {
    let p = set.modulus();
    if set.is_empty() || set.is_full() {
        return (set.clone(), AffineMap::identity(p));
    }
    let mut best: Option<(Vec<u64>, u64, u64)> = None;
    for_each_zero_image(set, |u, v, words| {
        let replace = match &best {
            None => true,
            Some((bw, bu, bv)) => match lex_cmp_words(words, bw) {
                Ordering::Less => true,
                Ordering::Equal => (v, u) < (*bv, *bu),
                Ordering::Greater => false,
            },
        };
        if replace {
            best = Some((words.to_vec(), u, v));
        }
        true
    });
    let (words, u, v) = best.expect("nonempty set has images");
    let map = AffineMap {
        modulus: p,
        scale: u,
        shift: v,
    };
    (ResidueSet::from_words(p, words), map)
}

/// Whether `set` is its own orbit representative. Stops at the first
/// smaller image.
pub fn is_canonical(set: &ResidueSet) -> bool {
    if set.is_empty() || set.is_full() {
        return true;
    }
    let mut canonical = true;
    for_each_zero_image(set, |_, _, words| {
        if lex_cmp_words(words, set.words()) == Ordering::Less {
            canonical = false;
        }
        canonical
    });
    canonical
}

/// Number of distinct sets in the affine orbit of `set`.
pub fn orbit_size(set: &ResidueSet) -> u64 {
    let p = set.modulus();
    let group_order = p.get() * (p.get() - 1);
    if set.is_empty() || set.is_full() {
        return 1;
    }
    // |orbit| = |group| / |stabilizer|
    let mut stabilizer = 0u64;
    for u in 1..p.get() {
        let dilate = ResidueSet::collect_residues(p, set.iter().map(|a| p.mul(u, a)));
        for v in 0..p.get() {
            if dilate.translate(v) == *set {
                stabilizer += 1;
            }
        }
    }
    group_order / stabilizer
}

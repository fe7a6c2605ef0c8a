use itertools::Itertools;

use crate::error::{Error, Result};
use crate::residue::{is_canonical, PrimeModulus, ResidueSet};

/// Largest modulus accepted for exhaustive enumeration.
pub const EXHAUSTIVE_MAX_P: u64 = 31;

/// Every `size`-subset of `Z/pZ` in lexicographic order of its sorted
/// elements, or only the canonical representative of each affine orbit.
///
/// Canonical representatives start `0, 1, ...` once `size >= 2`, so the
/// orbit scan only walks subsets containing both.
pub fn enumerate_sets(
    p: PrimeModulus,
    size: usize,
    up_to_affine: bool,
) -> Result<Box<dyn Iterator<Item = ResidueSet> + Send>> {
    if p.get() > EXHAUSTIVE_MAX_P {
        return Err(Error::TooLargeForExhaustive(p.get()));
    }
    let n = p.get();
    if size == 0 || size as u64 > n {
        return Err(Error::InvalidArgument(format!(
            "set size {size} outside 1..={n}"
        )));
    }
    if !up_to_affine {
        return Ok(Box::new(
            (0..n)
                .combinations(size)
                .map(move |c| ResidueSet::collect_residues(p, c)),
        ));
    }
    if size == 1 {
        return Ok(Box::new(std::iter::once(ResidueSet::collect_residues(
            p,
            [0],
        ))));
    }
    Ok(Box::new(
        (2..n)
            .combinations(size - 2)
            .map(move |c| ResidueSet::collect_residues(p, [0, 1].into_iter().chain(c)))
            .filter(is_canonical),
    ))
}

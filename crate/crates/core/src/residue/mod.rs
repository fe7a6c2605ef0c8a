//! Exact arithmetic over `Z/pZ`: set representation, affine maps and
//! canonical forms, circular gap structure and the lift to the integers.

mod affine;
mod gaps;
mod prime;
mod set;

pub use affine::{apply_affine, canonical_form, is_canonical, orbit_size, AffineMap};
pub use gaps::{blocks, gaps, interval_set, largest_gap, rectify, GapDescriptor};
pub use prime::{is_prime, PrimeModulus};
pub use set::{IntSet, ResidueSet, SetLiteral, MAX_SET_MODULUS};

pub(crate) use set::Doubled;

/// The complement `(Z/pZ) \ A`.
pub fn complement(set: &ResidueSet) -> ResidueSet {
    set.complement()
}

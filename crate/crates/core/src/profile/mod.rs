//! The difference-popularity function `Δ_A(b) = |(A + b) \ A|`, its full
//! shift profile, `μ_A(B)`, the popularity census and the integer-line
//! variants.

mod kernel;
mod ntt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::residue::{IntSet, PrimeModulus, ResidueSet};

pub use kernel::{BitshiftKernel, KernelRegistry, NaiveKernel, ProfileBackend, ProfileKernel};
pub use ntt::{convolve, cyclic_autocorrelation, NttKernel};

/// `|(A + b) \ A|`, i.e. `|A|` minus the number of representations of `b`
/// as a difference of two elements of `A`.
pub fn delta(set: &ResidueSet, b: u64) -> u32 {
    let p = set.modulus();
    let b = b % p.get();
    if b == 0 {
        return 0;
    }
    set.iter().filter(|&a| !set.contains(p.add(a, b))).count() as u32
}

/// The vector `b -> Δ_A(b)` over all of `Z/pZ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftProfile {
    pub modulus: PrimeModulus,
    pub values: Vec<u32>,
    pub set_card: usize,
}

impl ShiftProfile {
    pub fn p(&self) -> u64 {
        self.modulus.get()
    }

    #[inline]
    pub fn get(&self, b: u64) -> u32 {
        self.values[(b % self.p()) as usize]
    }

    pub fn mu(&self, over: &ResidueSet) -> Result<u32> {
        if over.is_empty() {
            return Err(Error::EmptyB);
        }
        Ok(over.iter().map(|b| self.get(b)).max().unwrap())
    }

    pub fn census(&self, m: u64) -> CensusReport {
        let witnesses: Vec<u64> = (1..self.p())
            .filter(|&b| u64::from(self.get(b)) <= m)
            .collect();
        CensusReport {
            m,
            count: witnesses.len() as u64,
            witnesses,
            warning: census_warning(self.set_card, self.modulus),
        }
    }

    /// `Δ_A(b)` for `b = 1..=(p-1)/2`, one representative per `±` pair,
    /// sorted ascending. The `k`-th entry is the least `μ_A(B)` over all
    /// sign-free `B` of size `k + 1`.
    pub fn sorted_half(&self) -> Vec<u32> {
        let half = (self.p() - 1) / 2;
        let mut v: Vec<u32> = (1..=half).map(|b| self.get(b)).collect();
        v.sort_unstable();
        v
    }
}

pub fn profile(set: &ResidueSet, backend: ProfileBackend) -> ShiftProfile {
    profile_with(set, KernelRegistry::builtin().for_backend(backend, set.p()))
}

pub fn profile_with(set: &ResidueSet, kernel: &dyn ProfileKernel) -> ShiftProfile {
    ShiftProfile {
        modulus: set.modulus(),
        values: kernel.deltas(set),
        set_card: set.len(),
    }
}

/// Re-derives a random sample of profile entries with [`delta`]. At least
/// one entry is always checked.
pub fn spot_check<R: Rng>(
    set: &ResidueSet,
    prof: &ShiftProfile,
    kernel: &'static str,
    fraction: f64,
    rng: &mut R,
) -> Result<()> {
    let p = set.p();
    let samples = ((p as f64 * fraction).ceil() as u64).clamp(1, p);
    for _ in 0..samples {
        let b = rng.gen_range(0..p);
        let expected = delta(set, b);
        let got = prof.get(b);
        if got != expected {
            return Err(Error::ProfileMismatch {
                kernel,
                b,
                got,
                expected,
            });
        }
    }
    Ok(())
}

/// `max_{b in B} Δ_A(b)`.
pub fn mu(set: &ResidueSet, over: &ResidueSet) -> Result<u32> {
    set.ensure_same_group(over)?;
    if over.is_empty() {
        return Err(Error::EmptyB);
    }
    Ok(over.iter().map(|b| delta(set, b)).max().unwrap())
}

/// `N_m = #{b != 0 : Δ_A(b) <= m}` with its witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub m: u64,
    pub count: u64,
    pub witnesses: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

fn census_warning(card: usize, p: PrimeModulus) -> Option<String> {
    if card > 1 && p.exceeds_twice(card) {
        None
    } else {
        Some(format!(
            "|A| = {card} is outside 1 < |A| < p/2 (p = {p}); bounds on N_m do not apply"
        ))
    }
}

pub fn census(set: &ResidueSet, m: u64) -> CensusReport {
    profile(set, ProfileBackend::Auto).census(m)
}

/// Least number of arithmetic progressions with difference `b` that
/// partition `A`: the number of maximal runs of `A` along `0, b, 2b, ...`.
pub fn ap_partition_count(set: &ResidueSet, b: u64) -> Result<u32> {
    let p = set.modulus();
    let b = b % p.get();
    if b == 0 {
        return Err(Error::ZeroShift);
    }
    if !set.is_proper() {
        return Err(Error::DegenerateSet);
    }
    // A run starts at x when x is in A and x - b is not.
    let starts = set
        .iter()
        .filter(|&x| !set.contains(p.add(x, p.get() - b)))
        .count();
    Ok(starts as u32)
}

/// `|(A + b) \ A|` over the integers.
pub fn delta_int(set: &IntSet, b: i64) -> Result<u64> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    if b == 0 {
        return Ok(0);
    }
    let xs = set.as_slice();
    // merge walk of A + b against A
    let (mut j, mut moved) = (0usize, 0u64);
    for &a in xs {
        let t = a + b;
        while j < xs.len() && xs[j] < t {
            j += 1;
        }
        if j == xs.len() || xs[j] != t {
            moved += 1;
        }
    }
    Ok(moved)
}

pub fn mu_int(set: &IntSet, over: &IntSet) -> Result<u64> {
    if set.is_empty() || over.is_empty() {
        return Err(Error::EmptySet);
    }
    over.iter()
        .map(|b| delta_int(set, b))
        .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rs(s: &str) -> ResidueSet {
        s.parse().unwrap()
    }

    fn z(s: &str) -> IntSet {
        s.parse().unwrap()
    }

    /// |A| minus the brute-force count of pairs (a, a') with a' - a = b.
    fn pair_oracle(set: &ResidueSet, b: u64) -> u32 {
        let p = set.p();
        let r = set
            .iter()
            .flat_map(|a| set.iter().map(move |a2| (a, a2)))
            .filter(|&(a, a2)| (a2 + p - a) % p == b % p)
            .count();
        (set.len() - r) as u32
    }

    #[test]
    fn delta_examples() {
        let a = rs("7:0,1,2");
        assert_eq!(delta(&a, 0), 0);
        assert_eq!(delta(&a, 2), 2);
        assert_eq!(delta(&a, 5), 2);
    }

    #[test]
    fn profile_examples() {
        let expect = vec![0, 1, 2, 3, 4, 4, 4, 4, 3, 2, 1];
        for backend in [
            ProfileBackend::Naive,
            ProfileBackend::Bitshift,
            ProfileBackend::Ntt,
        ] {
            let prof = profile(&rs("11:0,1,2,3"), backend);
            assert_eq!(prof.values, expect, "{backend}");
            assert_eq!(profile(&rs("5:0"), backend).values, vec![0, 1, 1, 1, 1]);
        }
    }

    #[test]
    fn backends_agree_on_a_large_random_set() {
        let p = PrimeModulus::new(10007).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let set = ResidueSet::collect_residues(p, (0..p.get()).filter(|_| rng.gen_bool(0.3)));
        let naive = profile(&set, ProfileBackend::Naive);
        assert_eq!(naive, profile(&set, ProfileBackend::Bitshift));
        assert_eq!(naive, profile(&set, ProfileBackend::Ntt));
        spot_check(&set, &naive, "naive", 0.01, &mut rng).unwrap();
    }

    #[test]
    fn spot_check_catches_corruption() {
        let set = rs("11:0,1,2,3");
        let mut prof = profile(&set, ProfileBackend::Naive);
        prof.values.iter_mut().for_each(|v| *v += 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            spot_check(&set, &prof, "naive", 0.01, &mut rng),
            Err(Error::ProfileMismatch { .. })
        ));
    }

    #[test]
    fn registry_lookup() {
        let reg = KernelRegistry::builtin();
        assert_eq!(reg.names(), vec!["naive", "bitshift", "ntt"]);
        assert!(reg.get("fft").is_none());
        assert_eq!(reg.for_backend(ProfileBackend::Auto, 61).name(), "naive");
        assert_eq!(
            reg.for_backend(ProfileBackend::Auto, 10007).name(),
            "bitshift"
        );
        assert_eq!(reg.for_backend(ProfileBackend::Auto, 65537).name(), "ntt");
        assert!("gpu".parse::<ProfileBackend>().is_err());
    }

    #[test]
    fn mu_examples() {
        let a = rs("7:0,1,2");
        assert_eq!(mu(&a, &rs("7:1,2")).unwrap(), 2);
        assert_eq!(mu(&a, &rs("7:0")).unwrap(), 0);
        assert!(matches!(mu(&a, &rs("7:")), Err(Error::EmptyB)));
        // AP of length 5 with difference d, B = {d, 2d, 3d}
        let p = PrimeModulus::new(23).unwrap();
        for d in 1..23u64 {
            let ap = ResidueSet::collect_residues(p, (0..5).map(|j| j * d % 23));
            let b = ResidueSet::collect_residues(p, (1..=3).map(|j| j * d % 23));
            assert_eq!(mu(&ap, &b).unwrap(), 3);
        }
    }

    #[test]
    fn census_examples() {
        let a = rs("11:0,1,2,3");
        let r = census(&a, 2);
        assert_eq!(r.count, 4);
        assert_eq!(r.witnesses, vec![1, 2, 9, 10]);
        assert!(r.warning.is_none());
        assert_eq!(census(&a, 0).count, 0);
        // APs of length n with m < n < p/2 have exactly 2m popular shifts
        let p = PrimeModulus::new(31).unwrap();
        for d in [1u64, 3, 17] {
            for n in 2..16u64 {
                let ap = ResidueSet::collect_residues(p, (0..n).map(|j| j * d % 31));
                for m in 0..n {
                    assert_eq!(census(&ap, m).count, 2 * m, "d={d} n={n} m={m}");
                }
            }
        }
        assert!(census(&rs("11:0"), 1).warning.is_some());
        assert!(census(&rs("11:0,1,2,3,4,5"), 1).warning.is_some());
    }

    #[test]
    fn ap_partition_examples() {
        assert_eq!(ap_partition_count(&rs("7:0,1,3,4"), 3).unwrap(), 1);
        assert_eq!(ap_partition_count(&rs("7:0,1,3,4"), 1).unwrap(), 2);
        assert_eq!(ap_partition_count(&rs("7:0,1,2"), 1).unwrap(), 1);
        assert!(matches!(
            ap_partition_count(&rs("7:0,1"), 0),
            Err(Error::ZeroShift)
        ));
        assert!(matches!(
            ap_partition_count(&rs("7:"), 2),
            Err(Error::DegenerateSet)
        ));
    }

    #[test]
    fn integer_line_examples() {
        let ten = IntSet::range(0, 10);
        assert_eq!(delta_int(&ten, 3).unwrap(), 3);
        assert_eq!(delta_int(&ten, 0).unwrap(), 0);
        assert_eq!(delta_int(&z("Z:0,2,4"), 1).unwrap(), 3);
        assert_eq!(delta_int(&z("Z:0,2,4"), -2).unwrap(), 1);
        assert!(matches!(
            delta_int(&IntSet::default(), 1),
            Err(Error::EmptySet)
        ));
        assert_eq!(mu_int(&ten, &z("Z:1,2,3")).unwrap(), 3);
        assert_eq!(mu_int(&z("Z:0"), &z("Z:5")).unwrap(), 1);
        assert_eq!(mu_int(&ten, &z("Z:10")).unwrap(), 10);
        assert!(mu_int(&ten, &IntSet::default()).is_err());
    }

    fn arb_set() -> impl Strategy<Value = ResidueSet> {
        (
            prop::sample::select(vec![5u64, 7, 11, 13, 67, 131]),
            prop::collection::vec(any::<bool>(), 131),
        )
            .prop_map(|(n, bits)| {
                let p = PrimeModulus::new(n).unwrap();
                ResidueSet::collect_residues(p, (0..n).filter(|&i| bits[i as usize]))
            })
    }

    proptest! {
        #[test]
        fn profile_invariants(set in arb_set()) {
            let p = set.modulus();
            let prof = profile(&set, ProfileBackend::Bitshift);
            prop_assert_eq!(&prof, &profile(&set, ProfileBackend::Ntt));
            prop_assert_eq!(prof.get(0), 0);
            let cap = set.len().min(p.get() as usize - set.len()) as u32;
            for b in 0..p.get() {
                prop_assert_eq!(prof.get(b), prof.get(p.neg(b)));
                prop_assert!(prof.get(b) <= cap);
                prop_assert_eq!(prof.get(b), pair_oracle(&set, b));
            }
            if set.is_proper() {
                let comp = profile(&set.complement(), ProfileBackend::Naive);
                prop_assert_eq!(&comp.values, &prof.values);
                for b in 1..p.get() {
                    prop_assert_eq!(ap_partition_count(&set, b).unwrap(), prof.get(b));
                }
            }
            let report = prof.census(2);
            prop_assert_eq!(report.count % 2, 0);
            for w in &report.witnesses {
                prop_assert!(report.witnesses.contains(&p.neg(*w)));
            }
        }

        #[test]
        fn delta_is_affine_equivariant(set in arb_set(), u in 1u64..1000, v in 0u64..1000, b in 0u64..1000) {
            let p = set.modulus();
            prop_assume!(u % p.get() != 0);
            let f = crate::residue::AffineMap::new(p, u as i64, v as i64).unwrap();
            let image = crate::residue::apply_affine(&set, &f).unwrap();
            prop_assert_eq!(delta(&image, p.mul(u % p.get(), b % p.get())), delta(&set, b));
        }
    }
}

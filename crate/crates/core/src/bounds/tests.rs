use super::*;
use crate::rational::parse;
use crate::residue::{interval_set, PrimeModulus};
use crate::verdict::Outcome;

fn rs(s: &str) -> ResidueSet {
    s.parse().unwrap()
}

fn is(s: &str) -> IntSet {
    s.parse().unwrap()
}

fn q(s: &str) -> Rational {
    parse(s).unwrap()
}

fn shifts(v: &[u64]) -> PropertyArgs {
    PropertyArgs {
        shifts: v.to_vec(),
        set: None,
    }
}

#[test]
fn elementary_properties() {
    let a = rs("7:0,1,2");
    let v = check_property(ClaimId::P1, &a, &shifts(&[2])).unwrap();
    assert_eq!((v.lhs, v.rhs, v.pass), (int(2), int(2), Outcome::Pass));

    let v = check_property(ClaimId::P3, &a, &shifts(&[1, 1])).unwrap();
    assert_eq!((v.lhs, v.rhs, v.pass), (int(2), int(2), Outcome::Pass));

    let v = check_property(ClaimId::P2, &a, &shifts(&[3])).unwrap();
    assert_eq!(v.lhs, v.rhs);

    let all = ResidueSet::reduced(a.modulus(), 1..7);
    let args = PropertyArgs {
        shifts: vec![],
        set: Some(all),
    };
    let v = check_property(ClaimId::P4, &a, &args).unwrap();
    assert_eq!((v.lhs, v.rhs, v.pass), (int(3), q("3/2"), Outcome::Pass));
}

#[test]
fn property_arity() {
    let a = rs("7:0,1,2");
    for (id, args) in [
        (ClaimId::P1, shifts(&[])),
        (ClaimId::P2, shifts(&[1, 2])),
        (ClaimId::P3, shifts(&[])),
        (ClaimId::P4, shifts(&[1])),
        (ClaimId::T2, shifts(&[1])),
    ] {
        assert!(matches!(
            check_property(id, &a, &args),
            Err(Error::ArityMismatch { .. })
        ));
    }
}

#[test]
fn averaging_estimate() {
    let a = rs("7:0,1,2");
    let v = check_eq1(&a, &ResidueSet::reduced(a.modulus(), 1..7)).unwrap();
    assert_eq!((v.lhs, v.rhs, v.pass), (int(3), q("3/2"), Outcome::Pass));

    let a = rs("11:0,1,2,3,4");
    let v = check_eq1(&a, &a.complement()).unwrap();
    assert_eq!((v.lhs, v.rhs, v.pass), (int(5), q("5/6"), Outcome::Pass));

    let v = check_eq1(&a, &rs("11:1,2")).unwrap();
    assert!(v.rhs <= int(0) && v.pass == Outcome::Pass && !v.note.is_empty());

    assert!(matches!(check_eq1(&a, &rs("11:")), Err(Error::EmptyB)));
}

#[test]
fn subadditivity() {
    let v = check_subadditivity(&rs("7:0,1,2"), &rs("7:1"), 3).unwrap();
    assert_eq!((v.lhs, v.rhs, v.pass), (int(3), int(3), Outcome::Pass));
    assert_eq!(v.witnesses, vec![3]);

    let v = check_subadditivity(&rs("7:0,1,3,4"), &rs("7:1,3"), 2).unwrap();
    // brute force: 2B = {2,4,6}
    let a = rs("7:0,1,3,4");
    let lhs = [2, 4, 6].iter().map(|&b| delta(&a, b)).max().unwrap();
    let rhs = 2 * [1, 3].iter().map(|&b| delta(&a, b)).max().unwrap();
    assert_eq!((v.lhs, v.rhs), (int(lhs), int(rhs)));
    assert_eq!(v.pass, Outcome::Pass);

    let v = check_subadditivity(&a, &rs("7:2,5"), 1).unwrap();
    assert_eq!(v.lhs, v.rhs);
}

#[test]
fn hls() {
    let v = check_hls(&rs("7:0,1,2"), &rs("7:1,2")).unwrap();
    assert_eq!((v.lhs, v.rhs, v.pass), (int(2), q("2/3"), Outcome::Pass));

    let v = check_hls(&rs("7:0,1,2"), &rs("7:1,6")).unwrap();
    assert_eq!(v.pass, Outcome::Vacuous);

    let v = check_hls(&rs("11:0,1,2,3,4"), &rs("11:1")).unwrap();
    assert_eq!((v.lhs, v.rhs, v.pass), (int(1), q("4/5"), Outcome::Pass));

    let v = check_hls(&rs("7:0,1,2,3"), &rs("7:1")).unwrap();
    assert_eq!(v.pass, Outcome::Vacuous);
}

#[test]
fn integer_theorem() {
    let v = check_kl(&IntSet::range(0, 10), &is("Z:1,2,3"), int(1)).unwrap();
    assert_eq!((v.lhs, v.rhs, v.pass), (int(3), int(3), Outcome::Pass));

    let v = check_kl(&is("Z:0,1"), &is("Z:1"), int(10)).unwrap();
    assert_eq!((v.lhs, v.rhs, v.pass), (int(1), int(1), Outcome::Pass));

    let evens: IntSet = (0..10).map(|i| 2 * i).collect();
    let v = check_kl(&evens, &is("Z:1,2"), int(1)).unwrap();
    let oracle = [1, 2]
        .iter()
        .map(|&b| delta_int_oracle(evens.as_slice(), b))
        .max()
        .unwrap();
    assert_eq!(v.lhs, int(oracle));
    assert_eq!(v.pass, Outcome::Pass);
    assert!(v.c_threshold.is_some());

    assert!(matches!(
        check_kl(&evens, &is("Z:0,1"), int(1)),
        Err(Error::NonPositiveB(0))
    ));
    assert!(matches!(
        check_kl(&evens, &is("Z:"), int(1)),
        Err(Error::EmptySet)
    ));
}

fn delta_int_oracle(a: &[i64], b: i64) -> i128 {
    a.iter().filter(|&&x| !a.contains(&(x + b))).count() as i128
}

#[test]
fn main_theorem_examples() {
    let a = ResidueSet::reduced(PrimeModulus::new(73).unwrap(), 0..9);
    let v = check_main(&a, &rs("73:1,2"), int(2)).unwrap();
    assert_eq!((v.lhs, v.rhs, v.pass), (int(2), int(2), Outcome::Pass));
    assert!(v.hypothesis_ok);

    let v = check_main(&rs("11:0,1,2,3"), &rs("11:1"), int(2)).unwrap();
    assert_eq!((v.lhs, v.rhs, v.pass), (int(1), int(1), Outcome::Pass));

    let v = check_main(&rs("11:0,1,2,3"), &rs("11:1,10"), int(2)).unwrap();
    assert_eq!(v.pass, Outcome::Vacuous);

    // 8 * 2^2 = 32 >= 11
    let v = check_main(&rs("11:0,1,2,3"), &rs("11:1,2"), int(100)).unwrap();
    assert_eq!(v.pass, Outcome::Vacuous);
    assert!(v.note.contains("8|B|^2"));
}

#[test]
fn census_form() {
    let v = check_main_census(&rs("11:0,1,2,3"), 1, int(3)).unwrap();
    assert_eq!((v.lhs, v.rhs, v.pass), (int(2), int(2), Outcome::Pass));
    assert!(v.hypothesis_ok);

    let v = check_main_census(&rs("11:0,1,2,3"), 0, int(3)).unwrap();
    assert_eq!((v.lhs, v.pass), (int(0), Outcome::Pass));

    // arithmetic progressions sit exactly on the bound
    let p = PrimeModulus::new(101).unwrap();
    for n in 4..20u64 {
        let a = ResidueSet::collect_residues(p, (0..n).map(|j| p.mul(j, 7)));
        for m in 1..n.min(4) {
            let v = check_main_census(&a, m, int(3)).unwrap();
            assert_eq!(v.lhs, int(2 * m as i128), "n={n} m={m}");
        }
    }
}

#[test]
fn census_and_b_form_agree_small() {
    for p in [5u64, 7, 11] {
        let pm = PrimeModulus::new(p).unwrap();
        for mask in 1u32..(1 << p) {
            let a = ResidueSet::collect_residues(pm, (0..p).filter(|&i| mask >> i & 1 == 1));
            if a.len() < 2 || 2 * a.len() as u64 >= p {
                continue;
            }
            for m in 0..=2 {
                assert!(census_b_form_agree(&a, m), "p={p} A={a} m={m}");
            }
        }
    }
}

#[test]
fn freiman_cover() {
    let p = PrimeModulus::new(179).unwrap();
    let b = interval_set(p, 0, 5).unwrap();
    let v = check_freiman_cover(&b).unwrap();
    assert!(v.hypothesis_ok);
    assert_eq!((v.lhs, v.rhs, v.pass), (int(5), int(5), Outcome::Pass));

    let v = check_freiman_cover(&rs("7:0,1,3")).unwrap();
    assert_eq!(v.pass, Outcome::Vacuous);
}

#[test]
fn restricted_theorems() {
    let a = rs("11:0,1,2,3,4");
    let b = rs("11:0,1");
    for tau in RestrictedMap::enumerate_all(&a, &b) {
        let v = check_rs_theorems(ClaimId::T52, &a, &b, &tau, RsParams::default()).unwrap();
        assert!(v.hypothesis_ok);
        assert_eq!(v.pass, Outcome::Pass);
        assert!(v.lhs >= int(4));
    }

    // 8|B|^2 >= p: the statement is silent here
    let a = rs("7:0,1");
    let tau = RestrictedMap::new([(0, 0), (1, 1)]);
    let v = check_rs_theorems(
        ClaimId::T53,
        &a,
        &a,
        &tau,
        RsParams {
            eps: None,
            c: Some(int(1)),
        },
    )
    .unwrap();
    assert_eq!((v.lhs, v.rhs, v.pass), (int(1), int(1), Outcome::Vacuous));

    // |B - B| = 3 < |A| / eps
    let a = rs("11:0,1,2,3,4");
    let b = rs("11:0,1");
    let tau = RestrictedMap::new([(0, 0), (1, 0)]);
    let params = RsParams {
        eps: Some(q("1/2")),
        c: None,
    };
    let v = check_rs_theorems(ClaimId::T51, &a, &b, &tau, params).unwrap();
    assert_eq!(v.pass, Outcome::Vacuous);

    // a Sidon set: |B - B| = 21 >= 2|A|
    let b = rs("41:0,1,3,7,12");
    let tau = RestrictedMap::new(b.iter().map(|x| (x, 0)));
    let a = ResidueSet::reduced(b.modulus(), 0..10);
    let v = check_rs_theorems(ClaimId::T51, &a, &b, &tau, params).unwrap();
    assert!(v.hypothesis_ok, "{}", v.human());
    assert_eq!(v.pass, Outcome::Pass);

    let bad = RestrictedMap::new([(0, 0)]);
    assert!(check_rs_theorems(
        ClaimId::T52,
        &rs("11:0,1,2"),
        &rs("11:0,1"),
        &bad,
        RsParams::default()
    )
    .is_err());
}

#[test]
fn trace_branches() {
    let p = PrimeModulus::new(101).unwrap();
    let a = interval_set(p, 0, 41).unwrap();
    let t = proof_trace(&a, &rs("101:1,2")).unwrap();
    assert_eq!(t.branch, Branch::FreimanRectify);
    assert_eq!(t.value("|2B^±|"), Some(int(9)));
    assert_eq!(t.value("|C|"), Some(int(4)));
    assert_eq!(t.value("ell"), Some(int(4)));
    assert_eq!(t.value("[1, |B^±| - 1] ⊆ d^-1 2B^±"), Some(int(1)));
    assert!(t.identities_hold(), "{:?}", t.identities);
    assert!(t.sqrt_gate);

    let t = proof_trace(&rs("11:0,1,2,3"), &rs("11:1")).unwrap();
    assert_eq!(t.branch, Branch::Dense2Bpm);
    assert_eq!(t.value("|2B^±|"), Some(int(5)));
    assert!(t.identities_hold());

    // 3 * 21 = |A| + 3: dense, and outside the square-root gate
    let p = PrimeModulus::new(179).unwrap();
    let a = interval_set(p, 0, 60).unwrap();
    let t = proof_trace(&a, &interval_set(p, 1, 6).unwrap()).unwrap();
    assert_eq!(t.branch, Branch::Dense2Bpm);
    assert!(!t.sqrt_gate);

    assert!(matches!(
        proof_trace(&rs("11:0,1,2,3,4,5"), &rs("11:1")),
        Err(Error::HypothesisViolated(_))
    ));
    assert!(proof_trace(&rs("11:0,1,2"), &rs("11:1,10")).is_err());
}

#[test]
fn trace_identities_exhaustive() {
    let p = PrimeModulus::new(37).unwrap();
    let a = interval_set(p, 0, 15).unwrap();
    for mask in 1u32..(1 << 18) {
        if mask.count_ones() > 3 {
            continue;
        }
        let b = ResidueSet::collect_residues(p, (1..=18).filter(|&i| mask >> (i - 1) & 1 == 1));
        let t = proof_trace(&a, &b).unwrap();
        assert!(t.identities_hold(), "B={b} {:?}", t.identities);
        assert_eq!(
            t.branch == Branch::Dense2Bpm,
            t.value("|2B^±|").unwrap() * int(3) >= int(18)
        );
    }
}

#[test]
fn verdicts_serialize() {
    let v = check_main(&rs("11:0,1,2,3"), &rs("11:1"), q("1/2")).unwrap();
    let back: BoundVerdict = serde_json::from_str(&v.to_json()).unwrap();
    assert_eq!(back, v);
    let t = proof_trace(&rs("11:0,1,2,3"), &rs("11:1")).unwrap();
    let back: ProofTrace = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
    assert_eq!(back, t);
}

mod props {
    use super::*;
    use proptest::prelude::*;

    fn instance() -> impl Strategy<Value = (ResidueSet, ResidueSet)> {
        prop::sample::select(vec![11u64, 13, 29, 53, 101]).prop_flat_map(|p| {
            let pmod = PrimeModulus::new(p).unwrap();
            (
                prop::collection::btree_set(0..p, 1..(p as usize / 2)),
                prop::collection::btree_set(1..=(p - 1) / 2, 1..6),
            )
                .prop_map(move |(a, b)| {
                    (
                        ResidueSet::reduced(pmod, a.into_iter().map(|x| x as i64)),
                        ResidueSet::reduced(pmod, b.into_iter().map(|x| x as i64)),
                    )
                })
        })
    }

    proptest! {
        #[test]
        fn proven_bounds_never_fail((a, b) in instance(), h in 1usize..4) {
            prop_assert_ne!(check_eq1(&a, &b).unwrap().pass, Outcome::Fail);
            prop_assert_ne!(check_subadditivity(&a, &b, h).unwrap().pass, Outcome::Fail);
            prop_assert_ne!(check_hls(&a, &b).unwrap().pass, Outcome::Fail);
            let args = PropertyArgs { shifts: b.to_vec(), set: Some(b.clone()) };
            for id in [ClaimId::P3, ClaimId::P4] {
                prop_assert_eq!(check_property(id, &a, &args).unwrap().pass, Outcome::Pass);
            }
        }

        #[test]
        fn verdicts_are_reproducible((a, b) in instance()) {
            let c = q("1/2");
            prop_assert_eq!(check_main(&a, &b, c).unwrap(), check_main(&a, &b, c).unwrap());
            let m = b.len() as u64;
            prop_assert_eq!(check_main_census(&a, m, c).unwrap(), check_main_census(&a, m, c).unwrap());
        }

        #[test]
        fn trace_identities_hold((a, b) in instance()) {
            prop_assume!(a.len() > 1);
            let t = proof_trace(&a, &b).unwrap();
            prop_assert!(t.identities_hold(), "{:?}", t.identities);
            let n2 = t.value("|2B^±|").unwrap();
            prop_assert_eq!(t.branch == Branch::Dense2Bpm, n2 * int(3) >= int(a.len() as i128 + 3));
        }
    }
}

use num::{One, Signed, Zero};
use proptest::prelude::*;

use tfsets::build::{self, AppendixConfig, GrowthFunction, TauSchedule};
use tfsets::density;
use tfsets::oplab::{self, C00Vector, CoefficientField};
use tfsets::rational::{self, parse_rational};
use tfsets::tfcheck::{self, verify_witness, Witness};
use tfsets::zset::{self, CombineMode};
use tfsets::{Rational, SetDescriptor};

fn members(set: &SetDescriptor, bound: u64) -> Vec<bool> {
    (0..bound).map(|n| set.contains(n).unwrap()).collect()
}

fn small_set() -> impl Strategy<Value = Vec<u64>> {
    proptest::collection::vec(0u64..48, 0..24)
}

fn periodic() -> impl Strategy<Value = SetDescriptor> {
    (0u64..10, 1u64..7, proptest::collection::vec(any::<bool>(), 16)).prop_map(|(start, period, bits)| {
        let pre: Vec<u64> = (0..start).filter(|&i| bits[i as usize]).collect();
        let res: Vec<u64> = (0..period).filter(|&r| bits[(10 + r) as usize]).collect();
        SetDescriptor::periodic(pre, start, period, res).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn witness_search_results_verify(elems in small_set(), depth in 1usize..4) {
        let set = SetDescriptor::finite(elems.clone());
        let found = tfcheck::find_nontf_witness(&set, depth, 96, 1 << 20).unwrap();
        if let Some(w) = found {
            prop_assert!(verify_witness(&set, &w).valid);
            prop_assert_eq!(w.a[0], 0);
        } else {
            // No witness: then no depth-`depth` pattern with a_1 = 0 fits.
            let m = members(&set, 96);
            let singles = m.iter().filter(|&&b| b).count();
            prop_assert!(depth > 1 || singles == 0);
        }
    }

    #[test]
    fn witnesses_survive_supersets(p in periodic(), extra in small_set()) {
        let verdict = tfcheck::tf_exact_eventually_periodic(&p).unwrap();
        if let Some(w) = verdict.witness(4) {
            let bigger = zset::combine(&p, &SetDescriptor::finite(extra), CombineMode::Union);
            prop_assert!(verify_witness(&bigger, &w).valid);
        }
    }

    #[test]
    fn density_profile_matches_counting(elems in small_set(), d in 1u64..20) {
        let set = SetDescriptor::finite(elems);
        let w = 60;
        let report = density::density_profile(&set, w, &[d]).unwrap();
        let m = members(&set, w + 1);
        let brute = (0..=w - d).map(|n| (n + 1..=n + d).filter(|&x| m[x as usize]).count()).max().unwrap();
        prop_assert_eq!(report.entries[0].max_count as usize, brute);
        prop_assert_eq!(report.entries[0].ratio.clone(), rational::ratio_u64(brute as u64, d));
    }

    #[test]
    fn clumpy_rows_are_consecutive(step in 1u64..5, offset in 0u64..5) {
        let base = SetDescriptor::ap(offset, step).unwrap();
        let r = build::clumpy_prefix(&base, 55).unwrap();
        prop_assert!(r.windows(2).all(|w| w[0] < w[1]));
        for k in 1..=10u64 {
            let t0 = (k - 1) * k / 2;
            let row = &r[t0 as usize..(t0 + k) as usize];
            prop_assert!(row.windows(2).all(|w| w[1] == w[0] + 1));
            let s_tk = zset::nth(&base, k * (k + 1) / 2).unwrap();
            prop_assert_eq!(row[0], s_tk + 1);
        }
        for (i, &x) in r.iter().enumerate() {
            prop_assert!(x > zset::nth(&base, i as u64 + 1).unwrap());
        }
    }

    #[test]
    fn apply_sup_matches_direct_scan(elems in small_set(), x in proptest::collection::vec((1u64..20, -3i64..=3), 1..4)) {
        let set = SetDescriptor::finite(elems.clone());
        let psi = CoefficientField::indicator(set.clone());
        let v = C00Vector::from_ints(&x);
        prop_assume!(!v.is_zero());
        let applied = oplab::apply(&psi, &v, 64).unwrap();
        // psi vanishes beyond max(S), so columns past 48 are zero.
        let mut best = Rational::zero();
        for k in 0..80u64 {
            let mut s = Rational::zero();
            for t in v.terms() {
                let j = t.index;
                if elems.contains(&(j + k)) {
                    s += &t.coeff * Rational::new(j.into(), (j + k).into());
                }
            }
            if s.abs() > best {
                best = s.abs();
            }
        }
        prop_assert_eq!(applied.sup, best);
    }

    #[test]
    fn certificates_are_self_consistent(x in proptest::collection::vec((1u64..16, -2i64..=2), 1..5), p in 1u32..4) {
        let psi = CoefficientField::indicator(SetDescriptor::evens());
        let family = vec![C00Vector::from_ints(&x), C00Vector::delta(x[0].0)];
        prop_assume!(!family[0].is_zero());
        let cert = oplab::pi_lower(&psi, &family, p as f64).unwrap();
        prop_assert!(cert.is_consistent());
        prop_assert!(cert.revalidate(&psi).unwrap());
        let sampled = oplab::sampled_weak_psum(&family, p as f64, 32, 1).unwrap();
        prop_assert!(sampled <= cert.denominator * (1.0 + oplab::TOLERANCE));
    }
}

#[test]
fn transform_round_trip() {
    let w = Witness::new(vec![0, 2, 4], vec![6, 8, 10]);
    let up = tfcheck::transform_witness(&w, 5).unwrap();
    assert_eq!(tfcheck::transform_witness(&up, -5).unwrap(), w);
    assert!(tfcheck::transform_witness(&w, -7).is_err());
    let evens = SetDescriptor::evens();
    assert!(verify_witness(&zset::translate(&evens, 5), &up).valid);
}

#[test]
fn json_round_trips() {
    let set = zset::combine(
        &SetDescriptor::powers(3).unwrap(),
        &zset::shift(&SetDescriptor::zero_density_example(), 4),
        CombineMode::Difference,
    );
    let back: SetDescriptor = serde_json::from_str(&serde_json::to_string(&set).unwrap()).unwrap();
    assert_eq!(back.materialize(500).unwrap(), set.materialize(500).unwrap());

    let w = tfcheck::find_nontf_witness(&SetDescriptor::evens(), 3, 64, 1 << 16).unwrap().unwrap();
    let back: Witness = serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
    assert_eq!(back, w);

    let psi = CoefficientField::harmonic();
    let cert = oplab::pi_lower(&psi, &[C00Vector::from_ints(&[(1, 1), (3, -2)])], 2.0).unwrap();
    let back: oplab::Certificate = serde_json::from_str(&serde_json::to_string(&cert).unwrap()).unwrap();
    assert_eq!(back, cert);
    assert!(back.revalidate(&psi).unwrap());
}

#[test]
fn appendix_default_schedule_stops_at_round_two() {
    let config = AppendixConfig {
        max_rounds: 3,
        search: oplab::SearchConfig { budget: 200, ..Default::default() },
        ..Default::default()
    };
    assert_eq!(config.tau, TauSchedule::Linear);
    let err = build::appendix_tset(&config).unwrap_err();
    assert_eq!(err.round, 2);
    assert_eq!(err.state.round(), 1);
    assert!(err.state.rounds[0].certificate.ratio > 1.0);
    assert!(err.state.check().unwrap().is_empty());
    assert!(matches!(err.reason, build::AppendixError::BudgetExhausted { .. }));
}

#[test]
fn slow_tset_window_agrees_with_recursion() {
    for g in [GrowthFunction::NCeilSqrt, GrowthFunction::NCeilLog2, GrowthFunction::Quadratic] {
        let seq = build::slow_tset_sequence(&g, 60).unwrap();
        let set = build::slow_tset(&g).unwrap();
        let bound = seq[60] + 1;
        assert_eq!(set.materialize(bound).unwrap().elements(), &seq[1..]);
    }
}

#[test]
fn block_test_value_is_exact() {
    let eps = parse_rational("2/5").unwrap();
    let s = density::block_schedule(&eps, 3).unwrap();
    for l in &s.levels {
        let v = density::block_test_value(l.d, l.a, l.n);
        assert!(v < eps);
        if l.n > 2 {
            assert!(density::block_test_value(l.d, l.a, l.n - 1) >= eps);
        }
        assert!(v > Rational::zero() && v < Rational::one());
    }
}

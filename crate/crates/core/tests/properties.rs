use jacarith::bsdinv::{self, Place};
use jacarith::ffield::{build_field, FieldCache};
use jacarith::monodromy::{self, SplitType};
use jacarith::{groupring, heights, lfunction, numth};
use proptest::prelude::*;

fn rd_pair(max_d: u32) -> impl Strategy<Value = (u32, u32)> {
    (3..=max_d).prop_flat_map(|d| {
        let rs: Vec<u32> = (2..=d).filter(|r| d % r == 0).collect();
        (Just(d), proptest::sample::select(rs))
    })
}

fn small_field() -> impl Strategy<Value = (u32, u32)> {
    proptest::sample::select(vec![(2, 1), (2, 3), (2, 6), (3, 2), (3, 5), (5, 2), (7, 2), (11, 1), (13, 2)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gram_kernel_contains_ideal((d, r) in rd_pair(12)) {
        prop_assert!(heights::kernel_contains_ideal(d, r).unwrap());
    }

    #[test]
    fn gram_rank_matches_free_rank((d, r) in rd_pair(12)) {
        prop_assert_eq!(heights::gram_rank(d, r).unwrap(), ((r - 1) * (d - 2)) as usize);
    }

    #[test]
    fn height_gram_is_positive_definite_off_the_kernel((d, r) in rd_pair(9)) {
        prop_assert!(heights::lattice_discriminants(d, r).unwrap().minors_positive);
    }

    #[test]
    fn heights_are_proportional_to_group_pairing((d, r) in rd_pair(12)) {
        prop_assert!(heights::proportionality_check(d, r).unwrap());
    }

    #[test]
    fn ideal_torsion_is_r_cubed((d, r) in rd_pair(12)) {
        let t = groupring::torsion_structure(d, r).unwrap();
        prop_assert_eq!(t.order(), num_bigint::BigInt::from(r).pow(3));
    }

    #[test]
    fn local_dimensions_sum_to_genus(d in 1u32..=30, r in 2u32..=12) {
        for place in Place::ALL {
            let l = bsdinv::local_data(d, r, place).unwrap();
            prop_assert_eq!(l.a_v + l.m_v + l.g_v, r as u64 - 1);
            prop_assert_eq!(l.c_v, 2 * (r as u64 - 1) - 2 * l.g_v - l.m_v);
        }
    }

    #[test]
    fn conductor_degree_identity(d in 1u32..=30, r in 2u32..=12) {
        let g = numth::gcd(d as u64, r as u64) as i64;
        let want = (d as i64 - 1) * (r as i64 - 1) - (g - 1);
        prop_assert_eq!(bsdinv::conductor_degree_check(d, r).unwrap(), want);
    }

    #[test]
    fn cartier_is_a_bijection(p in proptest::sample::select(vec![2u32, 3, 5, 7, 11, 13, 17]), r in 2u32..=20) {
        prop_assume!(r % p != 0);
        let m = bsdinv::cartier_matrix(p, r).unwrap();
        let mut a: Vec<u32> = m.iter().map(|e| e.a).collect();
        a.sort_unstable();
        prop_assert_eq!(a, (1..r).collect::<Vec<_>>());
        for e in &m {
            prop_assert_eq!(e.a as i64 * p as i64 - e.b as i64 * r as i64, e.i as i64);
        }
    }

    #[test]
    fn lambda_degrees_add_up(r in 2u64..=60, ell in proptest::sample::select(vec![2u64, 3, 5, 7, 11, 13])) {
        prop_assume!(r % ell != 0);
        let ls = monodromy::lambda_decomposition(r, ell).unwrap();
        for l in &ls {
            prop_assert_eq!(l.count * l.residue_degree, numth::euler_phi(l.level));
            match l.split_type {
                Some(SplitType::Inert) => prop_assert_eq!(l.residue_degree, 2 * l.plus_residue_degree),
                Some(SplitType::Split) => prop_assert_eq!(l.residue_degree, l.plus_residue_degree),
                None => prop_assert!(l.level <= 2),
            }
        }
        prop_assert_eq!(ls.iter().map(|l| l.count * l.residue_degree).sum::<u64>(), r - 1);
    }

    #[test]
    fn new_parts_sum_to_genus(r in 2u64..=200) {
        prop_assert_eq!(monodromy::new_part_dimensions(r).unwrap().values().sum::<u64>(), r - 1);
    }

    #[test]
    fn field_logs_invert_exponentials((p, k) in small_field(), e in 0u64..1_000_000) {
        let f = build_field(p, k).unwrap();
        let x = f.exp(e);
        prop_assert_eq!(f.dlog(x).unwrap() as u64, e % f.unit_order() as u64);
        prop_assert_eq!(f.mul(x, f.inv(x).unwrap()), f.one());
    }

    #[test]
    fn frobenius_is_additive((p, k) in small_field(), a in 0u32..1_000_000, b in 0u32..1_000_000) {
        let f = build_field(p, k).unwrap();
        let (a, b) = (a % f.size(), b % f.size());
        prop_assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn analytic_rank_is_bounded_by_balanced_orbits(
        q in proptest::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9]),
        d in 1u32..=8,
        r in 2u32..=6,
    ) {
        prop_assume!(numth::gcd(q, (d * r) as u64) == 1);
        let fields = FieldCache::default();
        let l = lfunction::closed_form_L(q, d, r, &fields).unwrap();
        let set = lfunction::orbit_decomposition(q, d, r).unwrap();
        let balanced = lfunction::balanced_count(&set).unwrap();
        prop_assert!(lfunction::analytic_rank(&l).rho as usize <= balanced);
        prop_assert_eq!(l.degree().unwrap_or(0) as u64, lfunction::degree_bound(d, r));
    }
}

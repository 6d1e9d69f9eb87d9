use num_rational::{BigRational, Rational64};
use proptest::prelude::*;

use mtc_orbifold::drinfeld_double::DrinfeldDouble;
use mtc_orbifold::group_alg::{central_extension, Cocycle2, FiniteGroup, TwistedModuleAlgebraSpec};
use mtc_orbifold::models::{lattice_modular_data, tensor_power};
use mtc_orbifold::qseries::PuiseuxSeries;
use mtc_orbifold::Error;

fn series_from(coeffs: &[i64], denom: i64, order: i64) -> PuiseuxSeries {
    PuiseuxSeries::from_terms(
        coeffs
            .iter()
            .enumerate()
            .map(|(e, &c)| (Rational64::new(e as i64, denom), BigRational::from_integer(c.into()))),
        Rational64::new(order, denom),
    )
}

/// Equality on the range where both series are known.
fn agree(x: &PuiseuxSeries, y: &PuiseuxSeries) -> bool {
    let o = x.order().min(y.order());
    x.truncate(o).unwrap() == y.truncate(o).unwrap()
}

fn arb_series() -> impl Strategy<Value = PuiseuxSeries> {
    (
        prop::collection::vec(-5i64..=5, 1..8),
        prop_oneof![Just(1i64), Just(2), Just(3)],
    )
        .prop_map(|(c, d)| series_from(&c, d, 7))
}

fn arb_unit_series() -> impl Strategy<Value = PuiseuxSeries> {
    (1i64..=4, prop::collection::vec(-5i64..=5, 0..7)).prop_map(|(c0, rest)| {
        let mut c = vec![c0];
        c.extend(rest);
        series_from(&c, 1, 7)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn series_ring_laws(a in arb_series(), b in arb_series(), c in arb_series()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!(agree(&(&(&a + &b) * &c), &(&(&a * &c) + &(&b * &c))));
        prop_assert!(agree(&(&(&a * &b) * &c), &(&a * &(&b * &c))));
        prop_assert_eq!(&a - &a, PuiseuxSeries::zero(a.order()));
    }

    #[test]
    fn series_inverse(a in arb_unit_series()) {
        let inv = a.inverse().unwrap();
        let one = &a * &inv;
        prop_assert_eq!(one.truncate(Rational64::from_integer(7)).unwrap(), PuiseuxSeries::one(Rational64::from_integer(7)));
    }

    #[test]
    fn rescale_is_a_ring_map(a in arb_series(), b in arb_series(), p in 1i64..4, q in 1i64..4) {
        let s = Rational64::new(p, q);
        let lhs = (&a * &b).rescale(s).unwrap();
        let rhs = &a.rescale(s).unwrap() * &b.rescale(s).unwrap();
        prop_assert!(agree(&lhs, &rhs));
    }

    #[test]
    fn random_cocycle_tables(n in 2u32..4, entries in prop::collection::vec(0u32..4, 9)) {
        // normalized tables on Z_3: only the 2x2 block away from the identity is free
        let g = FiniteGroup::cyclic(3).unwrap();
        let mut table = vec![vec![0u32; 3]; 3];
        for a in 1..3 {
            for b in 1..3 {
                table[a][b] = entries[3 * a + b] % n;
            }
        }
        let alpha = Cocycle2::new(n, table).unwrap();
        match central_extension(&g, &alpha) {
            Ok(ext) => {
                prop_assert!(alpha.identity_failure(&g).is_none());
                prop_assert_eq!(ext.order(), 3 * n as usize);
            }
            Err(Error::NotACocycle(h, k, l)) => {
                let lhs = (alpha.exp(h, k) + alpha.exp(g.mul(h, k), l)) % n;
                let rhs = (alpha.exp(h, g.mul(k, l)) + alpha.exp(k, l)) % n;
                prop_assert_ne!(lhs, rhs);
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn a_alpha_associativity_matches_relation(entries in prop::collection::vec(0u32..2, 8)) {
        // Z_2 swapping two labels, arbitrary Z_2-valued family alpha_N(a,b)
        let g = FiniteGroup::cyclic(2).unwrap();
        let action = vec![vec![0, 1], vec![1, 0]];
        let alpha: Vec<Vec<Vec<u32>>> = (0..2)
            .map(|nn| (0..2).map(|a| (0..2).map(|b| entries[4 * nn + 2 * a + b]).collect()).collect())
            .collect();
        let spec = TwistedModuleAlgebraSpec::new(g.clone(), vec!["M0".into(), "M1".into()], action.clone(), 2, alpha.clone()).unwrap();
        // alpha_M(a,b) alpha_N(ab,c) = alpha_N(a,bc) alpha_N(b,c) with M = N . c^{-1}
        let mut relation = true;
        for nn in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    for c in 0..2 {
                        let m = action[g.inv(c)][nn];
                        let lhs = (alpha[m][a][b] + alpha[nn][g.mul(a, b)][c]) % 2;
                        let rhs = (alpha[nn][a][g.mul(b, c)] + alpha[nn][b][c]) % 2;
                        relation &= lhs == rhs;
                    }
                }
            }
        }
        prop_assert_eq!(spec.associativity_failure().is_none(), relation);
    }

    #[test]
    fn verlinde_is_relabeling_covariant(k in 1u32..=4, seed in any::<u64>()) {
        let md = lattice_modular_data(k).unwrap();
        let n = md.rank();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let base = md.verlinde_fusion().unwrap();
        let moved = md.relabel(&perm).unwrap().verlinde_fusion().unwrap();
        prop_assert!(moved.residual() < 1e-9);
        moved.check_axioms().unwrap();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    prop_assert_eq!(moved.get(a, b, c), base.get(perm[a], perm[b], perm[c]));
                }
            }
        }
    }

    #[test]
    fn double_irrep_orders(t in 1usize..=6) {
        let d = DrinfeldDouble::new(FiniteGroup::cyclic(t).unwrap()).unwrap();
        let group = d.fusion_group().unwrap();
        for i in d.irreps() {
            prop_assert_eq!(group.element_order(d.index(i)), d.irrep_order(i));
        }
    }
}

#[test]
fn tensor_power_glob_is_multiplicative() {
    for k in 1..=3 {
        let md = lattice_modular_data(k).unwrap();
        for p in 1..=3 {
            let b = tensor_power(&md, p).unwrap();
            let g = b.modular_data().unwrap().global_dimension().unwrap().value;
            assert!((g - (2.0 * k as f64).powi(p as i32)).abs() < 1e-9);
        }
    }
}

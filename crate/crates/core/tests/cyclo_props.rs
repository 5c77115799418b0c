use proptest::prelude::*;

use tilecoh::cyclo::{CycNum, RigidMotion};

const ORDERS: [u32; 6] = [1, 4, 5, 8, 10, 12];

fn num(order: u32) -> impl Strategy<Value = CycNum> {
    prop::collection::vec(-6i64..=6, order as usize).prop_map(move |raw| CycNum::from_raw(order, &raw).unwrap())
}

fn triple() -> impl Strategy<Value = (CycNum, CycNum, CycNum)> {
    prop::sample::select(ORDERS.to_vec()).prop_flat_map(|n| (num(n), num(n), num(n)))
}

// complex arithmetic on the embedding, as an independent check
fn close(a: (f64, f64), b: (f64, f64)) -> bool {
    (a.0 - b.0).abs() < 1e-6 && (a.1 - b.1).abs() < 1e-6
}

fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn ring_axioms((a, b, c) in triple()) {
        let n = a.order();
        let zero = CycNum::zero(n);
        let one = CycNum::one(n);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &zero, a.clone());
        prop_assert_eq!(&a * &one, a.clone());
        prop_assert!((&a + &(-&a)).is_zero());
        prop_assert_eq!(&a - &b, &a + &(-&b));
    }

    #[test]
    fn embedding_is_a_ring_map((a, b, _c) in triple()) {
        let (ea, eb) = (a.real_embed(), b.real_embed());
        prop_assert!(close((&a * &b).real_embed(), cmul(ea, eb)));
        let s = (&a + &b).real_embed();
        prop_assert!(close(s, (ea.0 + eb.0, ea.1 + eb.1)));
        let c = a.conj().real_embed();
        prop_assert!(close(c, (ea.0, -ea.1)));
    }

    #[test]
    fn conjugation_and_zeta((a, b, _c) in triple(), k in -30i64..30) {
        let n = a.order();
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert!((&a * &a.conj()).is_real());
        prop_assert_eq!(a.mul_zeta(k), &a * &CycNum::zeta(n, k));
        prop_assert_eq!(a.mul_zeta(k).mul_zeta(-k), a.clone());
        prop_assert_eq!(a.mul_zeta(n as i64), a.clone());
    }

    #[test]
    fn motions_form_a_group((a, b, p) in triple(), r in 0i64..24, s in 0i64..24) {
        let n = a.order();
        let f = RigidMotion::new(r, a);
        let g = RigidMotion::new(s, b);
        prop_assert_eq!(f.compose(&g).apply(&p), f.apply(&g.apply(&p)));
        prop_assert!(f.compose(&f.inverse()).is_identity());
        prop_assert!(f.inverse().compose(&f).is_identity());
        prop_assert_eq!(RigidMotion::identity(n).apply(&p), p.clone());
    }
}

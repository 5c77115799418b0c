use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

mod common;

use common::{complex, matrix, oracle_factors, oracle_homology};
use tilecoh::algebra::{homology_at, invariant_factors, smith_normal_form, IntMatrix};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn smith_decomposition_identities(a in matrix(8, 20)) {
        let d = smith_normal_form(&a);
        prop_assert_eq!(d.u.mul(&a).mul(&d.v), d.s.clone());
        prop_assert!(d.u.determinant().abs().is_one());
        prop_assert!(d.v.determinant().abs().is_one());
        let (r, c) = d.s.shape();
        for i in 0..r {
            for j in 0..c {
                if i != j {
                    prop_assert!(d.s.get(i, j).is_zero());
                }
            }
        }
        let diag = d.diagonal();
        prop_assert!(diag.iter().all(|x| !x.is_negative()));
        for w in diag.windows(2) {
            if w[0].is_zero() {
                prop_assert!(w[1].is_zero());
            } else {
                prop_assert!(w[1].is_multiple_of(&w[0]));
            }
        }
    }

    #[test]
    fn factors_match_determinantal_divisors(a in matrix(5, 9)) {
        prop_assert_eq!(invariant_factors(&a), oracle_factors(&a));
    }

    #[test]
    fn homology_matches_oracle((din, dout) in complex()) {
        prop_assert!(dout.mul(&din).is_zero());
        prop_assert_eq!(homology_at(&din, &dout).unwrap(), oracle_homology(&din, &dout));
    }
}

#[test]
fn oracle_sanity() {
    let a = IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]], 3);
    let f: Vec<i64> = oracle_factors(&a).iter().map(|x| x.try_into().unwrap()).collect();
    assert_eq!(f, vec![2, 6, 12]);
}

use std::collections::BTreeSet;
use std::path::PathBuf;

use tilecoh::algebra::{FgAbGroup, IntMatrix};
use tilecoh::ap::{
    collar, collar_word, hull_cohomology, invariants_table, mapping_torus_cohomology, quotient_complex,
    rotation_on_limits, ApproximantComplex, CollarOptions,
};
use tilecoh::tiling::{load_system, SystemSpec, TilingSystem, WordSystem};

fn load(name: &str) -> SystemSpec {
    load_system(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)).unwrap()
}

fn tiling(name: &str) -> TilingSystem {
    match load(name) {
        SystemSpec::Tiling(t) => t,
        SystemSpec::Word(_) => unreachable!(),
    }
}

fn word(name: &str) -> WordSystem {
    match load(name) {
        SystemSpec::Word(w) => w,
        SystemSpec::Tiling(_) => unreachable!(),
    }
}

fn z(n: usize) -> FgAbGroup {
    FgAbGroup::free(n)
}

fn assert_complex(cx: &ApproximantComplex) {
    for (k, d) in cx.boundaries.iter().enumerate() {
        assert_eq!(d.shape(), (cx.cells[k], cx.cells[k + 1]));
    }
    for w in cx.boundaries.windows(2) {
        assert!(w[0].mul(&w[1]).is_zero(), "boundary of a boundary");
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn square_gives_the_torus() {
    let sys = tiling("square.json");
    let c = collar(&sys, CollarOptions::default()).unwrap();
    assert_eq!(c.classes.len(), 1);
    assert_eq!(c.complex.cells, vec![1, 2, 1]);
    assert_complex(&c.complex);
    let hull = hull_cohomology(&c.complex, &c.self_map).unwrap();
    // Künneth: H^k(T^2) = Z^(2 choose k)
    for (k, d) in hull.iter().enumerate() {
        assert_eq!(d.group(), z(binomial(2, k)), "degree {k}");
    }
    let rot = rotation_on_limits(&hull, &c.self_map, &c.rotation).unwrap();
    let mt = mapping_torus_cohomology(&rot).unwrap();
    // T^2 × S^1 = T^3
    let got: Vec<_> = mt.iter().map(|g| g.group.clone().unwrap()).collect();
    assert_eq!(got, (0..4).map(|k| z(binomial(3, k))).collect::<Vec<_>>());
}

fn fibonacci_factors(len: usize) -> BTreeSet<String> {
    let mut w = String::from("a");
    while w.len() < 4 * len {
        w = w.chars().map(|c| if c == 'a' { "ab" } else { "a" }).collect();
    }
    (0..w.len() - 2).map(|i| w[i..i + 3].to_string()).collect()
}

#[test]
fn fibonacci_collared_letters_and_hull() {
    let sys = word("fibonacci.json");
    let c = collar_word(&sys).unwrap();
    let expected = fibonacci_factors(2000);
    let got: BTreeSet<String> = c.labels.iter().cloned().collect();
    assert_eq!(got, expected);
    assert_complex(&c.complex);
    c.self_map.check(&c.complex).unwrap();
    let hull = hull_cohomology(&c.complex, &c.self_map).unwrap();
    // H^1 is the direct limit of Z^2 under the transposed substitution
    // matrix [[1,1],[1,0]], which is invertible over Z
    let m = IntMatrix::from_rows(&[vec![1, 1], vec![1, 0]], 2);
    assert_eq!(m.determinant().magnitude().to_string(), "1");
    assert_eq!(hull[0].group(), z(1));
    assert_eq!(hull[1].group(), z(2));
}

#[test]
fn penrose_collared_complex_regression() {
    let sys = tiling("penrose.json");
    let c = collar(&sys, CollarOptions::default()).unwrap();
    assert_eq!(c.level, 6);
    assert_eq!(c.classes.len(), 220);
    assert_eq!(c.complex.cells, vec![54, 270, 220]);
    assert_complex(&c.complex);
    c.self_map.check(&c.complex).unwrap();
    c.rotation.chain.check(&c.complex).unwrap();
    assert_eq!(c.complex.euler_characteristic(), 4);
    // every class is counted in all ten orientations or none
    assert_eq!(c.rotation.order, 10);
    let mut power = c.rotation.chain.clone();
    for _ in 1..10 {
        power = power.compose(&c.rotation.chain);
    }
    for (k, m) in power.chain.iter().enumerate() {
        assert_eq!(*m, IntMatrix::identity(c.complex.cells[k]), "rotation^10 in degree {k}");
    }
    let (qcx, qsub) = quotient_complex(&c.complex, &c.self_map, &c.rotation, Some(&c.edge_paths)).unwrap();
    assert_complex(&qcx);
    qsub.check(&qcx).unwrap();
}

#[test]
fn penrose_rotation_and_substitution_commute_on_limits() {
    let sys = tiling("penrose.json");
    let c = collar(&sys, CollarOptions::default()).unwrap();
    let sub_then_rot = c.rotation.chain.compose(&c.self_map);
    let rot_then_sub = c.self_map.compose(&c.rotation.chain);
    assert_eq!(sub_then_rot.chain, rot_then_sub.chain);
    let hull = hull_cohomology(&c.complex, &c.self_map).unwrap();
    let rot = rotation_on_limits(&hull, &c.self_map, &c.rotation).unwrap();
    let t = invariants_table(&rot).unwrap();
    // rational sanity: invariants and coinvariants have equal rank
    for (a, b) in t.invariants.iter().zip(&t.coinvariants) {
        assert_eq!(a.free_rank, b.free_rank);
    }
}

use std::path::PathBuf;

use tilecoh::epe::{
    assign_rho, audit_omega, dagger_orders, omega_chain, rational_coboundary_check, rho_congruence_holds, EpeError,
    RhoConvention,
};
use tilecoh::tiling::{grow_star_closure, load_system, AtlasOptions, Closure, SystemSpec, TilingSystem};

fn closure(name: &str) -> (TilingSystem, Closure) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    let SystemSpec::Tiling(sys) = load_system(&path).unwrap() else { panic!("{name}") };
    let c = grow_star_closure(&sys, AtlasOptions::default()).unwrap();
    (sys, c)
}

#[test]
fn square_has_no_rotation_data() {
    let (sys, c) = closure("square.json");
    let rho = assign_rho(&c.atlas, &RhoConvention::Minimal).unwrap();
    assert!(rho.values.iter().all(|&r| r == 0));
    let omega = omega_chain(&c.atlas, &rho).unwrap();
    assert!(omega.values.iter().all(|&w| w == 0));
    assert!(audit_omega(&c, &sys, &omega).unwrap() > 0);
}

#[test]
fn symmetric_square_needs_isotropy() {
    let (_, c) = closure("square_plain.json");
    assert!(matches!(assign_rho(&c.atlas, &RhoConvention::Minimal), Err(EpeError::IsotropyRequired(_))));
}

#[test]
fn penrose_winding_is_a_rational_coboundary() {
    let (sys, c) = closure("penrose.json");
    let rho = assign_rho(&c.atlas, &RhoConvention::Minimal).unwrap();
    assert!(rho_congruence_holds(&c.atlas, &rho));
    assert!(rho.values.iter().all(|&r| 2 * r.abs() <= rho.denominator));
    let omega = omega_chain(&c.atlas, &rho).unwrap();
    assert!(rational_coboundary_check(&c.atlas, &rho, &omega).passed());
    assert!(audit_omega(&c, &sys, &omega).unwrap() > 0);

    let mut bad = omega.clone();
    bad.values[0] += 1;
    assert!(!rational_coboundary_check(&c.atlas, &rho, &bad).passed());
    assert!(matches!(audit_omega(&c, &sys, &bad), Err(EpeError::AuditMismatch { .. })));
}

#[test]
fn whole_turn_offsets_shift_omega_by_a_coboundary() {
    let (_, c) = closure("penrose.json");
    let base = assign_rho(&c.atlas, &RhoConvention::Minimal).unwrap();
    let w0 = omega_chain(&c.atlas, &base).unwrap();
    let ne = c.atlas.edges.len();
    let offsets: Vec<i64> = (0..ne as i64).map(|i| (i % 3) - 1).collect();
    let shifted = assign_rho(&c.atlas, &RhoConvention::Offsets(offsets.clone())).unwrap();
    assert!(rho_congruence_holds(&c.atlas, &shifted));
    let w1 = omega_chain(&c.atlas, &shifted).unwrap();
    assert!(rational_coboundary_check(&c.atlas, &shifted, &w1).passed());
    // ω₁ − ω₀ = −∂₁(offsets)
    let d1 = c.atlas.boundary_1();
    for v in 0..c.atlas.vertices.len() {
        let dk: i64 = (0..ne).map(|e| i64::try_from(d1.get(v, e)).unwrap() * offsets[e]).sum();
        assert_eq!(w1.values[v] - w0.values[v], -dk);
    }
    let short = RhoConvention::Offsets(vec![0; ne - 1]);
    assert!(matches!(assign_rho(&c.atlas, &short), Err(EpeError::OffsetCount { .. })));
}

#[test]
fn only_the_two_fivefold_vertices_are_exceptional() {
    let (_, c) = closure("penrose.json");
    let mut d = dagger_orders(&c.atlas);
    d.sort();
    assert_eq!(d, vec![1, 1, 1, 1, 1, 5, 5]);
}

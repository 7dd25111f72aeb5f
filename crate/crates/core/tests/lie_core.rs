//! Group, algebra and pairing layer: closed-form oracles in low dimension,
//! validation behaviour, and randomized structural laws.

use euclid_orbits::{
    group::b_form, sampling, AlgebraElement, DualElement, Error, GroupElement, GroupSpec,
    ToleranceConfig,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

/// Anticlockwise quarter turn, the generator normalized by `B`.
fn quarter_turn() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])
}

fn spec_zoo(n: usize) -> Vec<GroupSpec> {
    let mut specs = vec![
        GroupSpec::euclidean(n),
        GroupSpec::special_euclidean(n),
        GroupSpec::orthogonal(n),
        GroupSpec::special_orthogonal(n),
    ];
    if n >= 3 {
        specs.push(euclid_orbits::checks::embedded_rotation_subgroup(n).unwrap());
    }
    specs
}

// ----- closed forms for the planar group --------------------------------

/// Adjoint action of SE(2) written out by hand: the angular rate is
/// untouched and the vector part becomes `r v − θ R_{π/2} d`.
#[test]
fn planar_adjoint_action_matches_the_closed_form() {
    let spec = GroupSpec::special_euclidean(2);
    let j = quarter_turn();
    let mut rng = sampling::rng_for(42);
    for _ in 0..100 {
        let g = sampling::random_group_element(&spec, &mut rng);
        let theta: f64 = sampling::standard_normal(&mut rng);
        let v = sampling::normal_vector(&mut rng, 2);
        let x = AlgebraElement::new(theta * &j, v.clone());
        let moved = spec.adjoint_action(&g, &x).unwrap();
        let expected_v = &g.r * &v - theta * (&j * &g.d);
        assert!((&moved.omega - theta * &j).norm() < 1e-12);
        assert!((&moved.v - expected_v).norm() < 1e-12);
    }
}

/// Coadjoint action of SE(2) written out by hand: `p` rotates and the
/// angular momentum picks up `dᵀ R_{π/2}ᵀ (r p)`.
#[test]
fn planar_coadjoint_action_matches_the_closed_form() {
    let spec = GroupSpec::special_euclidean(2);
    let j = quarter_turn();
    let mut rng = sampling::rng_for(43);
    for _ in 0..100 {
        let g = sampling::random_group_element(&spec, &mut rng);
        let ell: f64 = sampling::standard_normal(&mut rng);
        let p = sampling::normal_vector(&mut rng, 2);
        let m = DualElement::new(ell * &j, p.clone());
        let moved = spec.coadjoint_action(&g, &m).unwrap();
        let rp = &g.r * &p;
        let expected_ell = ell + (g.d.transpose() * j.transpose() * &rp)[0];
        assert!((&moved.p - &rp).norm() < 1e-12);
        assert!((&moved.l - expected_ell * &j).norm() < 1e-12);
    }
}

/// The worked example: a unit momentum along the first axis, pushed by a
/// unit translation along the second, acquires angular momentum -1.
#[test]
fn planar_momentum_transport_example() {
    let spec = GroupSpec::special_euclidean(2);
    let m = DualElement::new(
        DMatrix::zeros(2, 2),
        DVector::from_column_slice(&[1.0, 0.0]),
    );
    let g = GroupElement::new(
        DMatrix::identity(2, 2),
        DVector::from_column_slice(&[0.0, 1.0]),
    );
    let moved = spec.coadjoint_action(&g, &m).unwrap();
    assert!((&moved.l + quarter_turn()).norm() < 1e-15);
    assert!((&moved.p - &m.p).norm() < 1e-15);
}

/// Exponential of a planar twist against the classical rotation plus
/// chord-integral translation.
#[test]
fn planar_exponential_matches_the_closed_form() {
    let spec = GroupSpec::special_euclidean(2);
    let theta = 0.7_f64;
    let v = DVector::from_column_slice(&[1.0, 2.0]);
    let g = spec
        .exp(&AlgebraElement::new(theta * quarter_turn(), v.clone()))
        .unwrap();
    let r = DMatrix::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()]);
    let chord = DMatrix::from_row_slice(
        2,
        2,
        &[
            theta.sin() / theta,
            (theta.cos() - 1.0) / theta,
            (1.0 - theta.cos()) / theta,
            theta.sin() / theta,
        ],
    );
    assert!((&g.r - r).norm() < 1e-12);
    assert!((&g.d - chord * v).norm() < 1e-12);
}

// ----- the momentum map -------------------------------------------------

#[test]
fn momentum_map_of_axis_pair_is_the_plane_generator() {
    let spec = GroupSpec::euclidean(3);
    let e1 = DVector::from_column_slice(&[1.0, 0.0, 0.0]);
    let e2 = DVector::from_column_slice(&[0.0, 1.0, 0.0]);
    let mu = spec.momentum_map(&e1, &e2).unwrap();
    assert_eq!(mu[(0, 1)], 1.0);
    assert_eq!(mu[(1, 0)], -1.0);
    assert_eq!(mu[(2, 2)], 0.0);
    assert!((&mu + mu.transpose()).norm() == 0.0);
}

/// The defining identity `B(μ(p, v), ω) = pᵀ ω v`, checked against every
/// frame element of every family, which covers all `ω ∈ 𝔥` by linearity.
#[test]
fn momentum_map_satisfies_its_defining_identity() {
    for n in 2..=6 {
        for spec in spec_zoo(n) {
            let mut rng = sampling::rng_for(44 + n as u64);
            for _ in 0..20 {
                let p = sampling::normal_vector(&mut rng, n);
                let v = sampling::normal_vector(&mut rng, n);
                let mu = spec.momentum_map(&p, &v).unwrap();
                for f in spec.h_frame() {
                    let lhs = b_form(&mu, f);
                    let rhs = p.dot(&(f * &v));
                    assert!(
                        (lhs - rhs).abs() < 1e-10 * (1.0 + rhs.abs()),
                        "defining identity broke for {:?} at n = {n}",
                        spec.family()
                    );
                }
            }
        }
    }
}

#[test]
fn tau_matrix_columns_agree_with_the_momentum_map() {
    let spec = GroupSpec::euclidean(4);
    let mut rng = sampling::rng_for(45);
    let p = sampling::normal_vector(&mut rng, 4);
    let t = spec.tau_matrix(&p).unwrap();
    for i in 0..4 {
        let mut e = DVector::zeros(4);
        e[i] = 1.0;
        let mu = spec.momentum_map(&p, &e).unwrap();
        let col = spec.h_coords(&mu);
        assert!((t.column(i) - col).norm() < 1e-13);
    }
}

// ----- the realization map ----------------------------------------------

#[test]
fn musical_map_commutes_with_rotations_but_not_translations() {
    let spec = GroupSpec::euclidean(3);
    let mut rng = sampling::rng_for(46);
    let x = sampling::random_algebra_element(&spec, &mut rng);

    let r = sampling::random_rotation(&mut rng, 3, false);
    let rot = GroupElement::new(r, DVector::zeros(3));
    let left = spec.musical_phi(&spec.adjoint_action(&rot, &x).unwrap());
    let right = spec.coadjoint_action(&rot, &spec.musical_phi(&x)).unwrap();
    assert!((&left.l - &right.l).norm() < 1e-12);
    assert!((&left.p - &right.p).norm() < 1e-12);

    // A pure translation moves the two sides apart as soon as ω ≠ 0.
    let shift = GroupElement::new(
        DMatrix::identity(3, 3),
        DVector::from_column_slice(&[1.0, 0.0, 0.0]),
    );
    let x = AlgebraElement::new(
        DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        DVector::zeros(3),
    );
    let left = spec.musical_phi(&spec.adjoint_action(&shift, &x).unwrap());
    let right = spec
        .coadjoint_action(&shift, &spec.musical_phi(&x))
        .unwrap();
    assert!((&left.p - &right.p).norm() > 0.5);
}

// ----- validation -------------------------------------------------------

#[test]
fn group_element_checks_reject_bad_data() {
    let se = GroupSpec::special_euclidean(2);
    let o = GroupSpec::orthogonal(2);

    let reflect = GroupElement::new(
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]),
        DVector::zeros(2),
    );
    assert!(matches!(
        se.check_group_element(&reflect),
        Err(Error::NotSpecial { .. })
    ));
    let skewed = GroupElement::new(
        DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]),
        DVector::zeros(2),
    );
    assert!(matches!(
        se.check_group_element(&skewed),
        Err(Error::NotOrthogonal { .. })
    ));
    let shifted = GroupElement::new(
        DMatrix::identity(2, 2),
        DVector::from_column_slice(&[1.0, 0.0]),
    );
    assert!(matches!(
        o.check_group_element(&shifted),
        Err(Error::TranslationNotSupported { .. })
    ));
    let wrong_size = GroupElement::identity(3);
    assert!(matches!(
        se.check_group_element(&wrong_size),
        Err(Error::Dimension { .. })
    ));
}

#[test]
fn algebra_and_dual_checks_reject_bad_data() {
    let spec = GroupSpec::euclidean(2);
    let not_skew = AlgebraElement::new(
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
        DVector::zeros(2),
    );
    assert!(matches!(
        spec.check_algebra_element(&not_skew),
        Err(Error::NotSkew { .. })
    ));

    let custom = euclid_orbits::checks::embedded_rotation_subgroup(3).unwrap();
    let mut outside = DMatrix::zeros(3, 3);
    outside[(2, 0)] = 1.0;
    outside[(0, 2)] = -1.0;
    assert!(matches!(
        custom.check_algebra_element(&AlgebraElement::new(outside.clone(), DVector::zeros(3))),
        Err(Error::NotInSubalgebra { .. })
    ));
    assert!(matches!(
        custom.check_dual_element(&DualElement::new(outside, DVector::zeros(3))),
        Err(Error::NotInSubalgebra { .. })
    ));
}

#[test]
fn custom_basis_must_close_and_be_independent() {
    let n = 3;
    let mut b12 = DMatrix::zeros(n, n);
    b12[(1, 0)] = 1.0;
    b12[(0, 1)] = -1.0;
    let mut b13 = DMatrix::zeros(n, n);
    b13[(2, 0)] = 1.0;
    b13[(0, 2)] = -1.0;

    // {B12, B13} brackets to B23, which is outside the span.
    assert!(matches!(
        GroupSpec::custom(n, vec![b12.clone(), b13], ToleranceConfig::default()),
        Err(Error::BasisNotClosed { .. })
    ));
    // A repeated generator is degenerate.
    assert!(matches!(
        GroupSpec::custom(n, vec![b12.clone(), 2.0 * &b12], ToleranceConfig::default()),
        Err(Error::BasisDegenerate { .. })
    ));
    // A symmetric "generator" is not in so(n) at all.
    let sym = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    assert!(matches!(
        GroupSpec::custom(n, vec![sym], ToleranceConfig::default()),
        Err(Error::NotSkew { .. })
    ));
}

#[test]
fn tolerance_validation_rejects_nonsense() {
    let bad = ToleranceConfig {
        abs: -1.0,
        ..ToleranceConfig::default()
    };
    assert!(matches!(
        GroupSpec::euclidean(2).with_tolerances(bad),
        Err(Error::InvalidTolerance { .. })
    ));
}

// ----- serialization ----------------------------------------------------

#[test]
fn dual_elements_use_the_capital_l_field_on_the_wire() {
    let m = DualElement::new(quarter_turn(), DVector::from_column_slice(&[3.0, 4.0]));
    let value = serde_json::to_value(&m).unwrap();
    assert_eq!(value["L"][0][1], -1.0);
    assert_eq!(value["p"][1], 4.0);
    let back: DualElement = serde_json::from_value(value).unwrap();
    assert!((&back.l - &m.l).norm() == 0.0);
    assert!((&back.p - &m.p).norm() == 0.0);
}

#[test]
fn group_spec_round_trips_through_json() {
    let custom = euclid_orbits::checks::embedded_rotation_subgroup(4).unwrap();
    let text = serde_json::to_string(&custom).unwrap();
    let back: GroupSpec = serde_json::from_str(&text).unwrap();
    assert_eq!(back.n(), 4);
    assert_eq!(back.family(), custom.family());
    assert_eq!(back.dim_h(), custom.dim_h());
    for (a, b) in custom.h_frame().iter().zip(back.h_frame()) {
        assert!((a - b).norm() < 1e-15);
    }
}

// ----- randomized structure laws ----------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn group_axioms_hold(n in 2usize..5, seed in any::<u64>()) {
        for spec in spec_zoo(n) {
            let mut rng = sampling::rng_for(seed);
            let a = sampling::random_group_element(&spec, &mut rng);
            let b = sampling::random_group_element(&spec, &mut rng);
            let c = sampling::random_group_element(&spec, &mut rng);
            let left = spec.compose(&spec.compose(&a, &b).unwrap(), &c).unwrap();
            let right = spec.compose(&a, &spec.compose(&b, &c).unwrap()).unwrap();
            prop_assert!((&left.r - &right.r).norm() < 1e-11);
            prop_assert!((&left.d - &right.d).norm() < 1e-11);
            let e = spec.compose(&a, &spec.inverse(&a).unwrap()).unwrap();
            prop_assert!((&e.r - DMatrix::identity(n, n)).norm() < 1e-11);
            prop_assert!(e.d.norm() < 1e-11);
        }
    }

    #[test]
    fn adjoint_action_is_an_action_and_preserves_the_pairing(n in 2usize..5, seed in any::<u64>()) {
        for spec in spec_zoo(n) {
            let mut rng = sampling::rng_for(seed);
            let g = sampling::random_group_element(&spec, &mut rng);
            let h = sampling::random_group_element(&spec, &mut rng);
            let x = sampling::random_algebra_element(&spec, &mut rng);
            let m = sampling::random_dual_element(&spec, &mut rng);

            let gh = spec.compose(&g, &h).unwrap();
            let once = spec.adjoint_action(&gh, &x).unwrap();
            let twice = spec
                .adjoint_action(&g, &spec.adjoint_action(&h, &x).unwrap())
                .unwrap();
            let scale = 1.0 + x.omega.norm() + x.v.norm();
            prop_assert!((&once.omega - &twice.omega).norm() < 1e-9 * scale);
            prop_assert!((&once.v - &twice.v).norm() < 1e-9 * scale);

            let before = spec.pairing(&m, &x);
            let after = spec.pairing(
                &spec.coadjoint_action(&g, &m).unwrap(),
                &spec.adjoint_action(&g, &x).unwrap(),
            );
            prop_assert!((after - before).abs() < 1e-9 * (1.0 + before.abs()));
        }
    }

    #[test]
    fn bracket_is_antisymmetric_and_satisfies_jacobi(n in 2usize..5, seed in any::<u64>()) {
        for spec in spec_zoo(n) {
            let mut rng = sampling::rng_for(seed);
            let x = sampling::random_algebra_element(&spec, &mut rng);
            let y = sampling::random_algebra_element(&spec, &mut rng);
            let z = sampling::random_algebra_element(&spec, &mut rng);

            let xy = spec.bracket(&x, &y).unwrap();
            let yx = spec.bracket(&y, &x).unwrap();
            prop_assert!((&xy.omega + &yx.omega).norm() < 1e-10 * (1.0 + xy.omega.norm()));
            prop_assert!((&xy.v + &yx.v).norm() < 1e-10 * (1.0 + xy.v.norm()));

            let a = spec.bracket(&xy, &z).unwrap();
            let b = spec.bracket(&spec.bracket(&y, &z).unwrap(), &x).unwrap();
            let c = spec.bracket(&spec.bracket(&z, &x).unwrap(), &y).unwrap();
            let omega = &a.omega + &b.omega + &c.omega;
            let v = &a.v + &b.v + &c.v;
            let scale = 1.0
                + (x.omega.norm() + x.v.norm())
                    * (y.omega.norm() + y.v.norm())
                    * (z.omega.norm() + z.v.norm());
            prop_assert!(omega.norm() < 1e-10 * scale);
            prop_assert!(v.norm() < 1e-10 * scale);
        }
    }

    #[test]
    fn exponential_lands_in_the_group(n in 2usize..5, seed in any::<u64>()) {
        for spec in spec_zoo(n) {
            let mut rng = sampling::rng_for(seed);
            let x = sampling::random_algebra_element(&spec, &mut rng);
            let g = spec.exp(&x).unwrap();
            prop_assert!(spec.check_group_element(&g).is_ok());
            let back = spec
                .compose(&g, &spec.exp(&AlgebraElement::new(-&x.omega, -&x.v)).unwrap())
                .unwrap();
            prop_assert!((&back.r - DMatrix::identity(n, n)).norm() < 1e-10);
            prop_assert!(back.d.norm() < 1e-10 * (1.0 + x.v.norm()));
        }
    }

    #[test]
    fn musical_map_round_trips(n in 2usize..5, seed in any::<u64>()) {
        for spec in spec_zoo(n) {
            let mut rng = sampling::rng_for(seed);
            let x = sampling::random_algebra_element(&spec, &mut rng);
            let back = spec.musical_phi_inv(&spec.musical_phi(&x));
            prop_assert!((&back.omega - &x.omega).norm() == 0.0);
            prop_assert!((&back.v - &x.v).norm() == 0.0);
        }
    }
}

//! Property-based tests for the exact arithmetic layers, plus a few
//! independent oracles for values that are frozen elsewhere (chord-tangent
//! doubling against the Cantor law, divisor feedback for lattice bases).

use std::sync::Arc;

use proptest::prelude::*;

use anabelia_core::curve::{CurvePoint, HyperellipticCurve};
use anabelia_core::field::FieldSpec;
use anabelia_core::func::{
    default_alpha, places_of_degree, unit_sum_decompose, ExceptionalSet, Place, RationalFunction,
};
use anabelia_core::mobius::MobiusMap;
use anabelia_core::poly::Polynomial;

fn specs() -> Vec<Arc<FieldSpec>> {
    vec![
        FieldSpec::prime(2).unwrap(),
        FieldSpec::prime(5).unwrap(),
        FieldSpec::extension(3, 2).unwrap(),
    ]
}

fn spec_strategy() -> impl Strategy<Value = Arc<FieldSpec>> {
    (0..specs().len()).prop_map(|i| specs()[i].clone())
}

fn element_pair() -> impl Strategy<Value = (Arc<FieldSpec>, u64, u64, u64)> {
    spec_strategy().prop_flat_map(|spec| {
        let q = spec.order();
        (Just(spec), 0..q, 0..q, 0..q)
    })
}

fn poly_pair() -> impl Strategy<Value = (Arc<FieldSpec>, Vec<u64>, Vec<u64>)> {
    spec_strategy().prop_flat_map(|spec| {
        let q = spec.order();
        (
            Just(spec),
            prop::collection::vec(0..q, 0..6),
            prop::collection::vec(0..q, 0..6),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_ring_axioms((spec, a, b, c) in element_pair()) {
        let a = spec.from_code(a);
        let b = spec.from_code(b);
        let c = spec.from_code(c);
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        if !a.is_zero() {
            prop_assert!(a.mul(&a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn frobenius_is_additive_and_multiplicative((spec, a, b, _) in element_pair()) {
        let a = spec.from_code(a);
        let b = spec.from_code(b);
        prop_assert_eq!(a.add(&b).frobenius(1), a.frobenius(1).add(&b.frobenius(1)));
        prop_assert_eq!(a.mul(&b).frobenius(1), a.frobenius(1).mul(&b.frobenius(1)));
    }

    #[test]
    fn gcd_divides_both_inputs((spec, f, g) in poly_pair()) {
        let f = Polynomial::from_codes(&spec, &f);
        let g = Polynomial::from_codes(&spec, &g);
        let d = f.gcd(&g).unwrap();
        if !d.is_zero() {
            prop_assert!(d.divides(&f));
            prop_assert!(d.divides(&g));
        }
        // and every common divisor divides the gcd (sampled via g itself)
        if !g.is_zero() && g.divides(&f) {
            prop_assert_eq!(d, g.monic());
        }
    }

    #[test]
    fn principal_divisors_have_degree_zero((spec, num, den) in poly_pair()) {
        let num = Polynomial::from_codes(&spec, &num);
        let den = Polynomial::from_codes(&spec, &den);
        prop_assume!(!num.is_zero() && !den.is_zero());
        let f = RationalFunction::new(num, den).unwrap();
        prop_assume!(!f.is_zero());
        prop_assert_eq!(f.principal_divisor().unwrap().degree(), 0);
    }

    #[test]
    fn ord_is_additive_and_evaluation_multiplicative((spec, fc, gc) in poly_pair()) {
        let fnum = Polynomial::from_codes(&spec, &fc);
        let gnum = Polynomial::from_codes(&spec, &gc);
        prop_assume!(!fnum.is_zero() && !gnum.is_zero());
        let t1 = Polynomial::from_ints(&spec, &[1, 1]);
        let f = RationalFunction::new(fnum, t1.clone()).unwrap();
        let g = RationalFunction::new(gnum, Polynomial::x(&spec)).unwrap();
        let mut places = places_of_degree(&spec, 1);
        places.extend(places_of_degree(&spec, 2));
        for p in &places {
            let of = f.ord(p).unwrap();
            let og = g.ord(p).unwrap();
            prop_assert_eq!(f.mul(&g).ord(p).unwrap(), of + og);
            if of == 0 && og == 0 {
                let lhs = f.mul(&g).evaluate(p).value().unwrap();
                let rhs = f.evaluate(p).value().unwrap().mul(&g.evaluate(p).value().unwrap());
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn unit_sum_decomposition_invariants(fc in prop::collection::vec(0u64..5, 0..5), which in 0usize..3) {
        let spec = FieldSpec::prime(5).unwrap();
        let f = RationalFunction::from_poly(Polynomial::from_codes(&spec, &fc));
        let exc = match which {
            0 => ExceptionalSet::new(vec![Place::rational(&spec.zero())]),
            1 => ExceptionalSet::new(vec![
                Place::rational(&spec.zero()),
                Place::rational(&spec.from_int(1)),
            ]),
            _ => ExceptionalSet::new(vec![
                Place::finite(Polynomial::from_ints(&spec, &[2, 0, 1])).unwrap(),
            ]),
        };
        let alpha = default_alpha(&spec).unwrap();
        let (g, h) = unit_sum_decompose(&f, &exc, &alpha).unwrap();
        prop_assert_eq!(g.add(&h), f);
        prop_assert!(g.in_unit_group(&exc));
        prop_assert!(h.in_unit_group(&exc));
    }

    #[test]
    fn mobius_conjugation_preserves_ord(
        codes in prop::collection::vec(0u64..5, 1..5),
        m_codes in prop::collection::vec(0u64..5, 4),
    ) {
        let spec = FieldSpec::prime(5).unwrap();
        let m = MobiusMap::new(
            spec.from_code(m_codes[0]),
            spec.from_code(m_codes[1]),
            spec.from_code(m_codes[2]),
            spec.from_code(m_codes[3]),
        );
        prop_assume!(m.is_ok());
        let m = m.unwrap();
        let num = Polynomial::from_codes(&spec, &codes);
        prop_assume!(!num.is_zero());
        let f = RationalFunction::new(num, Polynomial::from_ints(&spec, &[3, 1])).unwrap();
        prop_assume!(!f.is_zero());
        let g = m.substitute(&f);
        let mut places = places_of_degree(&spec, 1);
        places.extend(places_of_degree(&spec, 2));
        for p in &places {
            prop_assert_eq!(f.ord(p).unwrap(), g.ord(&m.pullback_place(p)).unwrap());
        }
    }
}

/// Independent chord-tangent oracle for elliptic doubling, checked against
/// the Cantor law: on `y^2 = x^3 + x` over `F_3`, doubling `(2,1)` lands on
/// `(0,0)`.
#[test]
fn cantor_doubling_matches_chord_tangent() {
    let f3 = FieldSpec::prime(3).unwrap();
    let curve = HyperellipticCurve::new(Polynomial::from_ints(&f3, &[0, 1, 0, 1])).unwrap();
    let level = curve.level(1).unwrap();
    for p in curve.points(1, 1 << 16).unwrap() {
        let Some((x, y)) = p.xy.clone() else { continue };
        if y.is_zero() {
            continue; // 2-torsion: doubling is the identity
        }
        // lambda = (3x^2 + 1) / (2y); x' = lambda^2 - 2x; y' = lambda(x - x') - y
        let three_x2 = x.mul(&x).mul(&f3.from_int(3));
        let lambda = three_x2
            .add(&f3.one())
            .mul(&y.mul(&f3.from_int(2)).inv().unwrap());
        let x2 = lambda.mul(&lambda).sub(&x).sub(&x);
        let y2 = lambda.mul(&x.sub(&x2)).sub(&y);
        let expected = level
            .class_of_point(&CurvePoint::affine(1, x2, y2))
            .unwrap();
        let d = level.class_of_point(&p).unwrap();
        assert_eq!(level.cantor_add(&d, &d).unwrap(), expected);
    }
    // the frozen instance: 2 * cl((2,1) - inf) = cl((0,0) - inf)
    let q = CurvePoint::affine(1, f3.from_int(2), f3.from_int(1));
    let dq = level.class_of_point(&q).unwrap();
    let p0 = level
        .class_of_point(&CurvePoint::affine(1, f3.zero(), f3.zero()))
        .unwrap();
    assert_eq!(level.cantor_add(&dq, &dq).unwrap(), p0);
}

/// Lattice bases fed back through the divisor machinery are principal: on
/// the line the basis vector for S = {(t), inf} is literally div(t).
#[test]
fn lattice_basis_vectors_are_divisors_of_functions() {
    let spec = FieldSpec::prime(3).unwrap();
    let t = RationalFunction::coordinate(&spec);
    let div = t.principal_divisor().unwrap();
    assert_eq!(div.coeff(&Place::rational(&spec.zero())), 1);
    assert_eq!(div.coeff(&Place::infinity(&spec)), -1);
    // matching the basis {(1, -1)} in the site order [(t), inf]
}

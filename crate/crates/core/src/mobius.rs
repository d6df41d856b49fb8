//! Fractional-linear coordinate changes `t -> (a t + b)/(c t + d)` of the
//! projective line, with their exact action on functions, places, divisors
//! and residue values.
//!
//! The convention: `substitute(f) = f o m` as functions, and `pullback(P)`
//! is the place where `f o m` has the valuation `f` had at `P`, so
//! `ord(f, P) = ord(substitute(f), pullback(P))` always. `push` is the
//! inverse place map (the point map `z -> m(z)` on closed points).

use alloc::sync::Arc;
use alloc::vec;
use core::fmt;

use crate::field::{FieldElement, FieldSpec};
use crate::func::{Divisor, FuncError, Place, RationalFunction};
use crate::poly::Polynomial;
use crate::residue::ResidueElement;

#[derive(Clone, PartialEq, Eq)]
pub struct MobiusMap {
    a: FieldElement,
    b: FieldElement,
    c: FieldElement,
    d: FieldElement,
}

impl fmt::Debug for MobiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t -> ({}*t+{})/({}*t+{})", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Display for MobiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{},{},{},{}]",
            self.a.code(),
            self.b.code(),
            self.c.code(),
            self.d.code()
        )
    }
}

impl MobiusMap {
    pub fn new(
        a: FieldElement,
        b: FieldElement,
        c: FieldElement,
        d: FieldElement,
    ) -> Result<Self, FuncError> {
        let det = a.mul(&d).sub(&b.mul(&c));
        if det.is_zero() {
            return Err(FuncError::DivisionByZero);
        }
        Ok(MobiusMap { a, b, c, d }.normalized())
    }

    pub fn identity(spec: &Arc<FieldSpec>) -> Self {
        MobiusMap { a: spec.one(), b: spec.zero(), c: spec.zero(), d: spec.one() }
    }

    pub fn is_identity(&self) -> bool {
        let n = self.clone().normalized();
        n.a.is_one() && n.b.is_zero() && n.c.is_zero() && n.d.is_one()
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        self.a.spec()
    }

    /// The normalized matrix entries `(a, b, c, d)`.
    pub fn entries(&self) -> [FieldElement; 4] {
        [self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone()]
    }

    /// Scales so the first nonzero of (a, b, c, d) is 1; canonical in PGL_2.
    fn normalized(self) -> Self {
        let lead = [&self.a, &self.b, &self.c, &self.d]
            .into_iter()
            .find(|x| !x.is_zero())
            .expect("nonsingular")
            .clone();
        let inv = lead.inv().expect("nonzero");
        MobiusMap {
            a: self.a.mul(&inv),
            b: self.b.mul(&inv),
            c: self.c.mul(&inv),
            d: self.d.mul(&inv),
        }
    }

    pub fn inverse(&self) -> Self {
        MobiusMap {
            a: self.d.clone(),
            b: self.b.neg(),
            c: self.c.neg(),
            d: self.a.clone(),
        }
        .normalized()
    }

    /// `self o other` as point maps.
    pub fn compose(&self, other: &Self) -> Self {
        MobiusMap {
            a: self.a.mul(&other.a).add(&self.b.mul(&other.c)),
            b: self.a.mul(&other.b).add(&self.b.mul(&other.d)),
            c: self.c.mul(&other.a).add(&self.d.mul(&other.c)),
            d: self.c.mul(&other.b).add(&self.d.mul(&other.d)),
        }
        .normalized()
    }

    /// The image of the rational point `z` (affine) under the point map.
    /// Returns `None` for the point at infinity.
    pub fn apply_point(&self, z: &FieldElement) -> Option<FieldElement> {
        let den = self.c.mul(z).add(&self.d);
        if den.is_zero() {
            return None;
        }
        let num = self.a.mul(z).add(&self.b);
        Some(num.mul(&den.inv().expect("nonzero")))
    }

    /// `f o m`: substitute `t -> (a t + b)/(c t + d)` into `f`. Exact.
    pub fn substitute(&self, f: &RationalFunction) -> RationalFunction {
        let num = self.compose_poly(f.num());
        let den = self.compose_poly(f.den());
        let spec = self.spec();
        let lin = Polynomial::from_coeffs(spec, vec![self.d.clone(), self.c.clone()]);
        let dn = f.num().degree().map_or(0, |d| d as u64);
        let dd = f.den().degree().map_or(0, |d| d as u64);
        // f o m = num_hom/(ct+d)^dn / (den_hom/(ct+d)^dd)
        let (num, den) = if dn >= dd {
            (num, den.mul(&lin.pow(dn - dd)))
        } else {
            (num.mul(&lin.pow(dd - dn)), den)
        };
        RationalFunction::new(num, den).expect("nonzero denominator image")
    }

    /// Homogenized composition: `P((at+b)/(ct+d)) * (ct+d)^deg(P)`.
    fn compose_poly(&self, p: &Polynomial) -> Polynomial {
        let spec = self.spec();
        if p.is_zero() {
            return Polynomial::zero(spec);
        }
        let deg = p.degree().expect("nonzero");
        let top = Polynomial::from_coeffs(spec, vec![self.b.clone(), self.a.clone()]);
        let bot = Polynomial::from_coeffs(spec, vec![self.d.clone(), self.c.clone()]);
        let mut acc = Polynomial::zero(spec);
        for (i, coef) in p.coeffs().iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            let term = top.pow(i as u64).mul(&bot.pow((deg - i) as u64));
            acc = acc.add(&term.scale(coef));
        }
        acc
    }

    /// The place where `substitute(f)` has the valuation `f` has at `p`;
    /// this is the point map of the inverse matrix.
    pub fn pullback_place(&self, p: &Place) -> Place {
        self.inverse().push_place(p)
    }

    /// The image of a place under the point map `z -> m(z)`.
    pub fn push_place(&self, p: &Place) -> Place {
        let spec = self.spec();
        match p {
            Place::Infinity(_) => {
                if self.c.is_zero() {
                    Place::infinity(spec)
                } else {
                    let w = self.a.mul(&self.c.inv().expect("nonzero"));
                    Place::rational(&w)
                }
            }
            Place::Finite(pi) if pi.degree() == Some(1) => {
                // root z = -pi(0) (pi monic)
                let z = pi.coeff(0).neg();
                match self.apply_point(&z) {
                    Some(w) => Place::rational(&w),
                    None => Place::infinity(spec),
                }
            }
            Place::Finite(pi) => {
                // image generator: the monic numerator of pi o m^{-1}
                let inv = self.inverse();
                let image =
                    inv.substitute(&RationalFunction::from_poly(pi.clone()));
                debug_assert_eq!(image.num().degree(), pi.degree());
                Place::Finite(image.num().monic())
            }
        }
    }

    pub fn push_divisor(&self, d: &Divisor) -> Divisor {
        let mut out = Divisor::zero();
        for (p, m) in d.iter() {
            out.add_place(self.push_place(p), m);
        }
        out
    }

    /// Transport a residue value along the isomorphism
    /// `k(P) -> k(push(P))` induced by the coordinate change.
    pub fn transport_residue(&self, value: &ResidueElement) -> ResidueElement {
        let source = value.place().clone();
        let target = self.push_place(&source);
        // lift to a function regular at the source place, move it, evaluate
        let lift = RationalFunction::from_poly(value.lift().clone());
        let moved = self.inverse().substitute(&lift);
        moved
            .evaluate(&target)
            .value()
            .expect("transported representative stays regular")
    }
}

/// A coordinate change making every place of the given set finite: the
/// identity when the infinite place is not in the set, otherwise
/// `t -> 1/(t - a)` for the least free rational `a`.
pub fn normalizing_map(
    spec: &Arc<FieldSpec>,
    places: &[Place],
) -> Result<MobiusMap, FuncError> {
    if !places.iter().any(|p| p.is_infinite()) {
        return Ok(MobiusMap::identity(spec));
    }
    for code in 0..spec.order() {
        let a = spec.from_code(code);
        let candidate = Place::rational(&a);
        if !places.contains(&candidate) {
            // z -> 1/(z - a)
            return MobiusMap::new(spec.zero(), spec.one(), spec.one(), a.neg());
        }
    }
    Err(FuncError::NoFreeRationalPlace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::ExceptionalSet;

    fn f3() -> Arc<FieldSpec> {
        FieldSpec::prime(3).unwrap()
    }

    #[test]
    fn normalizing_examples() {
        let spec = f3();
        let e1 = ExceptionalSet::new(vec![Place::rational(&spec.zero())]);
        assert!(normalizing_map(&spec, e1.places()).unwrap().is_identity());

        let e2 = ExceptionalSet::new(vec![Place::infinity(&spec)]);
        let m = normalizing_map(&spec, e2.places()).unwrap();
        // t -> 1/t swaps (inf) and (t)
        assert_eq!(m.push_place(&Place::infinity(&spec)), Place::rational(&spec.zero()));
        assert_eq!(m.push_place(&Place::rational(&spec.zero())), Place::infinity(&spec));

        let all = ExceptionalSet::new(vec![
            Place::rational(&spec.from_int(0)),
            Place::rational(&spec.from_int(1)),
            Place::rational(&spec.from_int(2)),
            Place::infinity(&spec),
        ]);
        assert_eq!(
            normalizing_map(&spec, all.places()),
            Err(FuncError::NoFreeRationalPlace)
        );
    }

    #[test]
    fn substitution_conjugates_ord() {
        let spec = FieldSpec::prime(5).unwrap();
        let m = MobiusMap::new(
            spec.from_int(2),
            spec.from_int(1),
            spec.from_int(1),
            spec.from_int(4),
        )
        .unwrap();
        let f = RationalFunction::new(
            Polynomial::from_ints(&spec, &[1, 0, 2]),
            Polynomial::from_ints(&spec, &[0, 1]),
        )
        .unwrap();
        let g = m.substitute(&f);
        let mut places = crate::func::places_of_degree(&spec, 1);
        places.extend(crate::func::places_of_degree(&spec, 2));
        for p in &places {
            assert_eq!(
                f.ord(p).unwrap(),
                g.ord(&m.pullback_place(p)).unwrap(),
                "ord mismatch at {p}"
            );
        }
        // multiplicativity of substitution
        let h = RationalFunction::new(
            Polynomial::from_ints(&spec, &[3, 1]),
            Polynomial::from_ints(&spec, &[1, 0, 0, 1]),
        )
        .unwrap();
        assert_eq!(m.substitute(&f.mul(&h)), m.substitute(&f).mul(&m.substitute(&h)));
        assert_eq!(m.substitute(&f.add(&h)), m.substitute(&f).add(&m.substitute(&h)));
    }

    #[test]
    fn push_and_pull_are_inverse() {
        let spec = f3();
        let m = MobiusMap::new(
            spec.from_int(1),
            spec.from_int(2),
            spec.from_int(1),
            spec.from_int(1),
        )
        .unwrap();
        let mut places = crate::func::places_of_degree(&spec, 1);
        places.extend(crate::func::places_of_degree(&spec, 2));
        places.extend(crate::func::places_of_degree(&spec, 3));
        for p in &places {
            assert_eq!(m.pullback_place(&m.push_place(p)), *p);
            assert_eq!(
                m.push_place(p).degree(),
                p.degree(),
                "degree preserved at {p}"
            );
        }
    }

    #[test]
    fn residue_transport_is_multiplicative() {
        let spec = f3();
        let m = MobiusMap::new(
            spec.zero(),
            spec.one(),
            spec.one(),
            spec.from_int(2),
        )
        .unwrap();
        let pi = Place::finite(Polynomial::from_ints(&spec, &[1, 0, 1])).unwrap();
        let units = ResidueElement::unit_elements(&pi);
        for u in units.iter().take(4) {
            for v in units.iter().take(4) {
                assert_eq!(
                    m.transport_residue(&u.mul(v)),
                    m.transport_residue(u).mul(&m.transport_residue(v))
                );
            }
        }
    }
}

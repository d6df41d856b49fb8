//! Reduced Mumford representatives `(u, v)` of degree-0 divisor classes on an
//! imaginary hyperelliptic curve, with Cantor's composition-and-reduction
//! group law. The identity is `(1, 0)`; every class has a unique reduced
//! representative with `deg u <= g`, `deg v < deg u`, `u | v^2 - f`.

use core::cmp::Ordering;
use core::fmt;

use crate::curve::{CurveError, CurveLevel, CurvePoint};
use crate::field::FieldSpec;
use crate::poly::Polynomial;

#[derive(Clone, PartialEq, Eq)]
pub struct MumfordDivisor {
    u: Polynomial,
    v: Polynomial,
}

impl fmt::Display for MumfordDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.u, self.v)
    }
}

impl fmt::Debug for MumfordDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl PartialOrd for MumfordDivisor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MumfordDivisor {
    fn cmp(&self, other: &Self) -> Ordering {
        self.u.cmp(&other.u).then_with(|| self.v.cmp(&other.v))
    }
}

impl core::hash::Hash for MumfordDivisor {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        self.u.hash(state);
        self.v.hash(state);
    }
}

impl MumfordDivisor {
    pub fn identity(spec: &alloc::sync::Arc<FieldSpec>) -> Self {
        MumfordDivisor { u: Polynomial::one(spec), v: Polynomial::zero(spec) }
    }

    /// Validated constructor: `u` monic of degree <= g, `deg v < deg u`,
    /// `u | v^2 - f`.
    pub fn new(level: &CurveLevel, u: Polynomial, v: Polynomial) -> Result<Self, CurveError> {
        if **u.spec() != *level.spec || **v.spec() != *level.spec {
            return Err(CurveError::LevelMismatch);
        }
        if !u.is_monic() || u.degree().map_or(true, |d| d > level.genus()) {
            return Err(CurveError::BadDegree);
        }
        if v.degree() >= u.degree() && !v.is_zero() {
            return Err(CurveError::BadDegree);
        }
        let check = v.mul(&v).sub(&level.f);
        if !u.divides(&check) {
            return Err(CurveError::BadDegree);
        }
        Ok(MumfordDivisor { u, v })
    }

    pub fn u(&self) -> &Polynomial {
        &self.u
    }

    pub fn v(&self) -> &Polynomial {
        &self.v
    }

    pub fn is_identity(&self) -> bool {
        self.u.is_one() && self.v.is_zero()
    }
}

impl CurveLevel {
    fn check_level(&self, d: &MumfordDivisor) -> Result<(), CurveError> {
        if **d.u.spec() != *self.spec {
            return Err(CurveError::LevelMismatch);
        }
        Ok(())
    }

    /// Cantor composition followed by reduction.
    pub fn cantor_add(
        &self,
        a: &MumfordDivisor,
        b: &MumfordDivisor,
    ) -> Result<MumfordDivisor, CurveError> {
        self.check_level(a)?;
        self.check_level(b)?;
        let (u1, v1) = (&a.u, &a.v);
        let (u2, v2) = (&b.u, &b.v);
        // d1 = e1 u1 + e2 u2
        let (d1, e1, e2) = u1.extended_gcd(u2);
        // d = c1 d1 + c2 (v1 + v2)
        let (d, c1, c2) = d1.extended_gcd(&v1.add(v2));
        let s1 = c1.mul(&e1);
        let s2 = c1.mul(&e2);
        let s3 = c2;
        let u = u1.mul(u2).div_exact(&d.mul(&d));
        let mix = s1
            .mul(u1)
            .mul(v2)
            .add(&s2.mul(u2).mul(v1))
            .add(&s3.mul(&v1.mul(v2).add(&self.f)));
        let v = mix.div_exact(&d).rem(&u);
        Ok(self.reduce(u, v))
    }

    fn reduce(&self, mut u: Polynomial, mut v: Polynomial) -> MumfordDivisor {
        let g = self.genus();
        while u.degree().map_or(false, |d| d > g) {
            let u_next = self.f.sub(&v.mul(&v)).div_exact(&u);
            let u_monic = u_next.monic();
            let v_next = v.neg().rem(&u_monic);
            u = u_monic;
            v = v_next;
        }
        MumfordDivisor { u: u.monic(), v }
    }

    pub fn cantor_neg(&self, a: &MumfordDivisor) -> Result<MumfordDivisor, CurveError> {
        self.check_level(a)?;
        Ok(MumfordDivisor { u: a.u.clone(), v: a.v.neg().rem(&a.u) })
    }

    pub fn cantor_sub(
        &self,
        a: &MumfordDivisor,
        b: &MumfordDivisor,
    ) -> Result<MumfordDivisor, CurveError> {
        let nb = self.cantor_neg(b)?;
        self.cantor_add(a, &nb)
    }

    /// `n * a` by double-and-add (negative `n` allowed).
    pub fn cantor_mul(&self, a: &MumfordDivisor, n: i128) -> Result<MumfordDivisor, CurveError> {
        self.check_level(a)?;
        let mut base = if n < 0 { self.cantor_neg(a)? } else { a.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = MumfordDivisor::identity(&self.spec);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.cantor_add(&acc, &base)?;
            }
            base = self.cantor_add(&base, &base)?;
            k >>= 1;
        }
        Ok(acc)
    }

    /// `cl(P - inf)` in Mumford form.
    pub fn class_of_point(&self, p: &CurvePoint) -> Result<MumfordDivisor, CurveError> {
        if p.level != self.m {
            return Err(CurveError::LevelMismatch);
        }
        match &p.xy {
            None => Ok(MumfordDivisor::identity(&self.spec)),
            Some((x, y)) => {
                if **x.spec() != *self.spec {
                    return Err(CurveError::LevelMismatch);
                }
                let u = Polynomial::from_coeffs(&self.spec, alloc::vec![x.neg(), self.spec.one()]);
                let v = Polynomial::constant(y.clone());
                Ok(MumfordDivisor { u, v })
            }
        }
    }

    /// `cl(P - Q)`.
    pub fn class_of_difference(
        &self,
        p: &CurvePoint,
        q: &CurvePoint,
    ) -> Result<MumfordDivisor, CurveError> {
        let cp = self.class_of_point(p)?;
        let cq = self.class_of_point(q)?;
        self.cantor_sub(&cp, &cq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::HyperellipticCurve;
    use crate::field::FieldSpec;
    use crate::rng::DetRng;

    fn e33_level1() -> (HyperellipticCurve, CurveLevel) {
        let f3 = FieldSpec::prime(3).unwrap();
        let c = HyperellipticCurve::new(Polynomial::from_ints(&f3, &[0, 1, 0, 1])).unwrap();
        let l = c.level(1).unwrap();
        (c, l)
    }

    #[test]
    fn two_torsion_at_y_zero() {
        let (_, level) = e33_level1();
        let spec = level.spec.clone();
        let p = CurvePoint::affine(1, spec.zero(), spec.zero());
        let d = level.class_of_point(&p).unwrap();
        let sum = level.cantor_add(&d, &d).unwrap();
        assert!(sum.is_identity());
        // and D + identity = D
        let id = MumfordDivisor::identity(&spec);
        assert_eq!(level.cantor_add(&d, &id).unwrap(), d);
    }

    #[test]
    fn group_is_cyclic_of_order_four() {
        let (_, level) = e33_level1();
        let spec = level.spec.clone();
        let q = CurvePoint::affine(1, spec.from_int(2), spec.from_int(1));
        let dq = level.class_of_point(&q).unwrap();
        let two_q = level.cantor_add(&dq, &dq).unwrap();
        // doubling (2,1) lands on the 2-torsion class of (0,0)
        let p0 = CurvePoint::affine(1, spec.zero(), spec.zero());
        assert_eq!(two_q, level.class_of_point(&p0).unwrap());
        assert!(!two_q.is_identity());
        assert!(level.cantor_mul(&dq, 4).unwrap().is_identity());
        assert!(!level.cantor_mul(&dq, 2).unwrap().is_identity());
    }

    #[test]
    fn difference_classes() {
        let (c, level) = e33_level1();
        let pts = c.points(1, 1 << 20).unwrap();
        for p in &pts {
            assert!(level.class_of_difference(p, p).unwrap().is_identity());
            for q in &pts {
                let d1 = level.class_of_difference(p, q).unwrap();
                let d2 = level.class_of_difference(q, p).unwrap();
                assert_eq!(level.cantor_neg(&d1).unwrap(), d2);
                // for genus >= 1, zero class only on the diagonal
                assert_eq!(d1.is_identity(), p == q);
            }
        }
    }

    #[test]
    fn cantor_laws_on_random_triples() {
        let f3 = FieldSpec::prime(3).unwrap();
        let g2 = HyperellipticCurve::new(Polynomial::from_ints(&f3, &[0, 1, 0, 0, 0, 1])).unwrap();
        for (curve, m) in [(e33_level1().0, 2usize), (g2, 1)] {
            let level = curve.level(m).unwrap();
            let pts = curve.points(m, 1 << 20).unwrap();
            let mut rng = DetRng::new(0xC0FFEE);
            let classes: alloc::vec::Vec<MumfordDivisor> = (0..12)
                .map(|_| {
                    let a = &pts[rng.below(pts.len() as u64) as usize];
                    let b = &pts[rng.below(pts.len() as u64) as usize];
                    level.class_of_difference(a, b).unwrap()
                })
                .collect();
            let id = MumfordDivisor::identity(&level.spec);
            for a in &classes {
                assert_eq!(level.cantor_add(a, &id).unwrap(), *a);
                let na = level.cantor_neg(a).unwrap();
                assert!(level.cantor_add(a, &na).unwrap().is_identity());
                for b in &classes {
                    assert_eq!(
                        level.cantor_add(a, b).unwrap(),
                        level.cantor_add(b, a).unwrap()
                    );
                    for c in &classes {
                        let ab_c = level
                            .cantor_add(&level.cantor_add(a, b).unwrap(), c)
                            .unwrap();
                        let a_bc = level
                            .cantor_add(a, &level.cantor_add(b, c).unwrap())
                            .unwrap();
                        assert_eq!(ab_c, a_bc);
                    }
                }
            }
        }
    }

    #[test]
    fn level_mismatch_is_detected() {
        let (c, level1) = e33_level1();
        let level2 = c.level(2).unwrap();
        let p2 = c.points(2, 1 << 20).unwrap()[1].clone();
        let d2 = level2.class_of_point(&p2).unwrap();
        let id1 = MumfordDivisor::identity(&level1.spec);
        assert_eq!(
            level1.cantor_add(&id1, &d2).unwrap_err(),
            CurveError::LevelMismatch
        );
    }
}

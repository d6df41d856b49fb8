//! Residue fields of places of the rational function field.
//!
//! The residue field at a finite place `(pi)` is `F_q[t]/(pi)`, represented
//! relatively: an element is a polynomial of degree < deg(pi) over the base
//! field, tagged with its place. At the infinite place the residue field is
//! the base field itself (a constant polynomial). No absolute-field
//! identification is ever needed; arithmetic is exact polynomial arithmetic
//! modulo pi.

use alloc::vec::Vec;
use core::fmt;

use crate::field::{FieldElement, FieldError};
use crate::func::Place;
use crate::poly::Polynomial;

/// An element of the residue field `k(P)`.
#[derive(Clone, PartialEq, Eq)]
pub struct ResidueElement {
    place: Place,
    rep: Polynomial,
}

impl fmt::Debug for ResidueElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} at {}]", self.rep, self.place)
    }
}

impl fmt::Display for ResidueElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

impl ResidueElement {
    pub fn new(place: &Place, rep: Polynomial) -> Self {
        let rep = match place {
            Place::Finite(pi) => rep.rem(pi),
            Place::Infinity(_) => {
                assert!(rep.is_constant(), "residue at infinity is a constant");
                rep
            }
        };
        ResidueElement { place: place.clone(), rep }
    }

    /// The image of a base-field constant in `k(P)`.
    pub fn from_constant(place: &Place, c: &FieldElement) -> Self {
        ResidueElement { place: place.clone(), rep: Polynomial::constant(c.clone()) }
    }

    pub fn zero(place: &Place) -> Self {
        ResidueElement { place: place.clone(), rep: Polynomial::zero(place.spec()) }
    }

    pub fn one(place: &Place) -> Self {
        ResidueElement { place: place.clone(), rep: Polynomial::one(place.spec()) }
    }

    pub fn place(&self) -> &Place {
        &self.place
    }

    /// The minimal polynomial representative (degree < deg P).
    pub fn lift(&self) -> &Polynomial {
        &self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.rep.is_one()
    }

    /// If the element lies in the base field, the constant it equals.
    pub fn as_constant(&self) -> Option<FieldElement> {
        if self.rep.is_constant() {
            Some(self.rep.coeff(0))
        } else {
            None
        }
    }

    fn check(&self, other: &Self) {
        assert!(self.place == other.place, "residue elements at different places");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        ResidueElement { place: self.place.clone(), rep: self.rep.add(&other.rep) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        ResidueElement { place: self.place.clone(), rep: self.rep.sub(&other.rep) }
    }

    pub fn neg(&self) -> Self {
        ResidueElement { place: self.place.clone(), rep: self.rep.neg() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let rep = match &self.place {
            Place::Finite(pi) => self.rep.mul(&other.rep).rem(pi),
            Place::Infinity(_) => self.rep.mul(&other.rep),
        };
        ResidueElement { place: self.place.clone(), rep }
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        let rep = match &self.place {
            Place::Finite(pi) => {
                let (g, s, _) = self.rep.extended_gcd(pi);
                assert!(g.is_one(), "representative not invertible mod an irreducible");
                s.rem(pi)
            }
            Place::Infinity(_) => Polynomial::constant(self.rep.coeff(0).inv()?),
        };
        Ok(ResidueElement { place: self.place.clone(), rep })
    }

    pub fn pow(&self, mut e: u128) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.place);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Order of the residue field `q^(deg P)`.
    pub fn field_order(&self) -> u64 {
        let q = self.place.spec().order();
        q.pow(self.place.degree() as u32)
    }

    /// Deterministic code within the residue field (coefficient codes in
    /// base q, low degree first).
    pub fn code(&self) -> u64 {
        let q = self.place.spec().order();
        let mut c = 0u64;
        for coeff in self.rep.coeffs().iter().rev() {
            c = c * q + coeff.code();
        }
        c
    }

    /// All elements of `k(P)^x` in ascending code order.
    pub fn unit_elements(place: &Place) -> Vec<ResidueElement> {
        let spec = place.spec();
        let q = spec.order();
        let deg = place.degree();
        let total = q.pow(deg as u32);
        let mut out = Vec::with_capacity(total as usize - 1);
        for code in 1..total {
            let mut c = code;
            let mut coeffs = Vec::with_capacity(deg);
            for _ in 0..deg {
                coeffs.push(spec.from_code(c % q));
                c /= q;
            }
            out.push(ResidueElement {
                place: place.clone(),
                rep: Polynomial::from_coeffs(spec, coeffs),
            });
        }
        out
    }

    /// The least multiplicative generator of `k(P)^x` (by code).
    pub fn unit_generator(place: &Place) -> ResidueElement {
        let spec = place.spec();
        let n = spec.order().pow(place.degree() as u32) - 1;
        for u in Self::unit_elements(place) {
            if Self::mult_order(&u, n) == n {
                return u;
            }
        }
        unreachable!("multiplicative group of a finite field is cyclic")
    }

    fn mult_order(u: &ResidueElement, n: u64) -> u64 {
        let mut ord = n;
        let mut m = n;
        let mut f = 2u64;
        let mut primes = Vec::new();
        while f * f <= m {
            if m % f == 0 {
                primes.push(f);
                while m % f == 0 {
                    m /= f;
                }
            }
            f += 1;
        }
        if m > 1 {
            primes.push(m);
        }
        for r in primes {
            while ord % r == 0 && u.pow((ord / r) as u128).is_one() {
                ord /= r;
            }
        }
        ord
    }
}

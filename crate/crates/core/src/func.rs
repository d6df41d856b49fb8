//! Places, divisors and rational functions of `K = F_q(t)` (the function
//! field of the projective line).
//!
//! A place is a monic irreducible polynomial or the infinite place; the
//! infinite place has degree 1 and sorts after the finite places of degree 1
//! in the canonical order. Divisors are finite maps from places to nonzero
//! integers. Rational functions are kept in lowest terms with a monic
//! denominator, the zero function canonicalized as 0/1.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::field::{FieldElement, FieldSpec};
use crate::poly::{irreducibles, Polynomial};
use crate::residue::ResidueElement;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FuncError {
    ZeroFunction,
    DivisionByZero,
    SpecMismatch,
    InfinitePlaceInE,
    BadAlpha,
    NotRegularAtE,
    NoFreeRationalPlace,
    NotIrreducible,
}

impl fmt::Display for FuncError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FuncError::ZeroFunction => write!(f, "operation undefined for the zero function"),
            FuncError::DivisionByZero => write!(f, "division by zero"),
            FuncError::SpecMismatch => write!(f, "mixed base fields"),
            FuncError::InfinitePlaceInE => {
                write!(f, "the infinite place is not allowed here; apply a coordinate change")
            }
            FuncError::BadAlpha => write!(f, "alpha must avoid 0 and 1"),
            FuncError::NotRegularAtE => write!(f, "function has a pole on the exceptional set"),
            FuncError::NoFreeRationalPlace => {
                write!(f, "every degree-1 place is exceptional; extend the constant field")
            }
            FuncError::NotIrreducible => write!(f, "place polynomial must be monic irreducible"),
        }
    }
}

/// A closed point of the projective line over `F_q`.
#[derive(Clone)]
pub enum Place {
    Finite(Polynomial),
    Infinity(Arc<FieldSpec>),
}

impl Place {
    pub fn finite(pi: Polynomial) -> Result<Self, FuncError> {
        if !pi.is_monic() || pi.degree().map_or(true, |d| d == 0) {
            return Err(FuncError::NotIrreducible);
        }
        if pi.degree() != Some(1) && !pi.is_irreducible().map_err(|_| FuncError::NotIrreducible)? {
            return Err(FuncError::NotIrreducible);
        }
        Ok(Place::Finite(pi))
    }

    /// The place `(t - a)`.
    pub fn rational(a: &FieldElement) -> Self {
        let spec = a.spec().clone();
        Place::Finite(Polynomial::from_coeffs(&spec, vec![a.neg(), spec.one()]))
    }

    pub fn infinity(spec: &Arc<FieldSpec>) -> Self {
        Place::Infinity(spec.clone())
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        match self {
            Place::Finite(pi) => pi.spec(),
            Place::Infinity(s) => s,
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Place::Finite(pi) => pi.degree().expect("nonzero"),
            Place::Infinity(_) => 1,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Place::Infinity(_))
    }

    pub fn as_finite(&self) -> Option<&Polynomial> {
        match self {
            Place::Finite(pi) => Some(pi),
            Place::Infinity(_) => None,
        }
    }

    /// Canonical string form.
    pub fn canonical(&self) -> String {
        alloc::format!("{self}")
    }
}

impl fmt::Debug for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(pi) => write!(f, "({pi})"),
            Place::Infinity(_) => write!(f, "(inf)"),
        }
    }
}

impl PartialEq for Place {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Place::Finite(a), Place::Finite(b)) => a == b,
            (Place::Infinity(a), Place::Infinity(b)) => **a == **b,
            _ => false,
        }
    }
}
impl Eq for Place {}

impl PartialOrd for Place {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Place {
    /// Degree first; within a degree, finite places (by polynomial code)
    /// before the infinite place.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        match (self, other) {
            (Place::Finite(a), Place::Finite(b)) => a.cmp(b),
            (Place::Finite(_), Place::Infinity(_)) => Ordering::Less,
            (Place::Infinity(_), Place::Finite(_)) => Ordering::Greater,
            (Place::Infinity(_), Place::Infinity(_)) => Ordering::Equal,
        }
    }
}

impl core::hash::Hash for Place {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        match self {
            Place::Finite(pi) => {
                0u8.hash(state);
                pi.hash(state);
            }
            Place::Infinity(_) => 1u8.hash(state),
        }
    }
}

/// A finite formal Z-combination of places; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Divisor {
    terms: BTreeMap<Place, i64>,
}

impl Divisor {
    pub fn zero() -> Self {
        Divisor { terms: BTreeMap::new() }
    }

    pub fn single(place: Place, mult: i64) -> Self {
        let mut d = Divisor::zero();
        d.add_place(place, mult);
        d
    }

    pub fn add_place(&mut self, place: Place, mult: i64) {
        if mult == 0 {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(place) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += mult;
                if *e.get() == 0 {
                    e.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(mult);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (p, &m) in &other.terms {
            out.add_place(p.clone(), m);
        }
        out
    }

    pub fn neg(&self) -> Self {
        Divisor { terms: self.terms.iter().map(|(p, &m)| (p.clone(), -m)).collect() }
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return Divisor::zero();
        }
        Divisor { terms: self.terms.iter().map(|(p, &m)| (p.clone(), k * m)).collect() }
    }

    pub fn degree(&self) -> i64 {
        self.terms.iter().map(|(p, &m)| p.degree() as i64 * m).sum()
    }

    pub fn coeff(&self, place: &Place) -> i64 {
        self.terms.get(place).copied().unwrap_or(0)
    }

    pub fn support(&self) -> impl Iterator<Item = &Place> {
        self.terms.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Place, i64)> {
        self.terms.iter().map(|(p, &m)| (p, m))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The effective (zero) part: terms with positive coefficient.
    pub fn positive_part(&self) -> Self {
        Divisor {
            terms: self
                .terms
                .iter()
                .filter(|(_, &m)| m > 0)
                .map(|(p, &m)| (p.clone(), m))
                .collect(),
        }
    }

    /// The pole part, with positive coefficients.
    pub fn negative_part(&self) -> Self {
        Divisor {
            terms: self
                .terms
                .iter()
                .filter(|(_, &m)| m < 0)
                .map(|(p, &m)| (p.clone(), -m))
                .collect(),
        }
    }

    pub fn canonical(&self) -> String {
        alloc::format!("{self}")
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (p, m) in &self.terms {
            if first {
                write!(f, "{m}*{p}")?;
                first = false;
            } else if *m < 0 {
                write!(f, " - {}*{p}", -m)?;
            } else {
                write!(f, " + {m}*{p}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A finite set of places to be treated as exceptional.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ExceptionalSet {
    places: Vec<Place>,
}

impl ExceptionalSet {
    pub fn new(mut places: Vec<Place>) -> Self {
        places.sort();
        places.dedup();
        ExceptionalSet { places }
    }

    pub fn empty() -> Self {
        ExceptionalSet { places: Vec::new() }
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn contains(&self, p: &Place) -> bool {
        self.places.binary_search_by(|x| x.cmp(p)).is_ok()
    }

    pub fn len(&self) -> usize {
        self.places.len()
    }

    pub fn is_empty(&self) -> bool {
        self.places.is_empty()
    }

    pub fn contains_infinity(&self) -> bool {
        self.places.iter().any(|p| p.is_infinite())
    }
}

/// An element of `F_q(t)`, in lowest terms with a monic denominator.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, FuncError> {
        if den.is_zero() {
            return Err(FuncError::DivisionByZero);
        }
        if *num.spec() != *den.spec() {
            return Err(FuncError::SpecMismatch);
        }
        if num.is_zero() {
            return Ok(RationalFunction {
                num,
                den: Polynomial::one(den.spec()),
            });
        }
        let g = num.gcd(&den).map_err(|_| FuncError::SpecMismatch)?;
        let num = num.div_exact(&g);
        let den = den.div_exact(&g);
        let lc_inv = den.leading_coeff().inv().expect("nonzero denominator");
        Ok(RationalFunction { num: num.scale(&lc_inv), den: den.scale(&lc_inv) })
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let one = Polynomial::one(p.spec());
        RationalFunction { num: p, den: one }
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    /// The coordinate function `t`.
    pub fn coordinate(spec: &Arc<FieldSpec>) -> Self {
        Self::from_poly(Polynomial::x(spec))
    }

    pub fn zero(spec: &Arc<FieldSpec>) -> Self {
        Self::from_poly(Polynomial::zero(spec))
    }

    pub fn one(spec: &Arc<FieldSpec>) -> Self {
        Self::from_poly(Polynomial::one(spec))
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        self.num.spec()
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<FieldElement> {
        if self.is_constant() {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        Self::new(num, den).expect("nonzero denominator")
    }

    pub fn sub(&self, other: &Self) -> Self {
        let num = self.num.mul(&other.den).sub(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        Self::new(num, den).expect("nonzero denominator")
    }

    pub fn neg(&self) -> Self {
        RationalFunction { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("nonzero denominator")
    }

    pub fn div(&self, other: &Self) -> Result<Self, FuncError> {
        if other.is_zero() {
            return Err(FuncError::DivisionByZero);
        }
        Self::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn inv(&self) -> Result<Self, FuncError> {
        if self.is_zero() {
            return Err(FuncError::DivisionByZero);
        }
        Self::new(self.den.clone(), self.num.clone())
    }

    /// Integer powers; negative exponents invert (error on zero base).
    /// Lowest terms are preserved by powers, so no re-reduction is needed.
    pub fn powi(&self, e: i64) -> Result<Self, FuncError> {
        if e < 0 {
            return Ok(self.inv()?.powi(-e)?);
        }
        if e == 0 {
            return Ok(Self::one(self.spec()));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        Ok(RationalFunction {
            num: self.num.pow(e as u64),
            den: self.den.pow(e as u64),
        })
    }

    pub fn add_constant(&self, c: &FieldElement) -> Self {
        self.add(&Self::constant(c.clone()))
    }

    /// Valuation at a place; errors on the zero function.
    pub fn ord(&self, place: &Place) -> Result<i64, FuncError> {
        if self.is_zero() {
            return Err(FuncError::ZeroFunction);
        }
        match place {
            Place::Finite(pi) => {
                Ok(multiplicity(&self.num, pi) as i64 - multiplicity(&self.den, pi) as i64)
            }
            Place::Infinity(_) => {
                let dn = self.num.degree().expect("nonzero") as i64;
                let dd = self.den.degree().expect("nonzero") as i64;
                Ok(dd - dn)
            }
        }
    }

    /// Value at a place, if regular there; `Pole` otherwise. The zero
    /// function evaluates to 0 everywhere.
    pub fn evaluate(&self, place: &Place) -> Evaluation {
        if self.is_zero() {
            return Evaluation::Value(ResidueElement::zero(place));
        }
        match place {
            Place::Finite(pi) => {
                let den_val = self.den.rem(pi);
                if den_val.is_zero() {
                    // lowest terms: numerator cannot also vanish
                    return Evaluation::Pole;
                }
                let num_res = ResidueElement::new(place, self.num.rem(pi));
                let den_res = ResidueElement::new(place, den_val);
                Evaluation::Value(num_res.mul(&den_res.inv().expect("nonzero")))
            }
            Place::Infinity(_) => {
                let dn = self.num.degree().expect("nonzero");
                let dd = self.den.degree().expect("nonzero");
                match dn.cmp(&dd) {
                    Ordering::Greater => Evaluation::Pole,
                    Ordering::Less => Evaluation::Value(ResidueElement::zero(place)),
                    Ordering::Equal => {
                        let c = self
                            .num
                            .leading_coeff()
                            .mul(&self.den.leading_coeff().inv().expect("nonzero"));
                        Evaluation::Value(ResidueElement::from_constant(place, &c))
                    }
                }
            }
        }
    }

    /// The divisor of zeros and poles; exactly degree 0.
    pub fn principal_divisor(&self) -> Result<Divisor, FuncError> {
        if self.is_zero() {
            return Err(FuncError::ZeroFunction);
        }
        let mut div = Divisor::zero();
        if !self.num.is_constant() {
            let (_, factors) = self.num.factor();
            for (pi, e) in factors {
                div.add_place(Place::Finite(pi), e as i64);
            }
        }
        if !self.den.is_constant() {
            let (_, factors) = self.den.factor();
            for (pi, e) in factors {
                div.add_place(Place::Finite(pi), -(e as i64));
            }
        }
        let dn = self.num.degree().expect("nonzero") as i64;
        let dd = self.den.degree().expect("nonzero") as i64;
        div.add_place(Place::infinity(self.spec()), dd - dn);
        debug_assert_eq!(div.degree(), 0);
        Ok(div)
    }

    /// Membership in the unit group of the semi-local ring at `E`:
    /// nonzero with valuation 0 at every exceptional place.
    pub fn in_unit_group(&self, exc: &ExceptionalSet) -> bool {
        if self.is_zero() {
            return false;
        }
        exc.places()
            .iter()
            .all(|p| self.ord(p).expect("nonzero") == 0)
    }

    pub fn canonical(&self) -> String {
        alloc::format!("{self}")
    }
}

/// Result of evaluating a function at a place.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evaluation {
    Value(ResidueElement),
    Pole,
}

impl Evaluation {
    pub fn value(self) -> Option<ResidueElement> {
        match self {
            Evaluation::Value(v) => Some(v),
            Evaluation::Pole => None,
        }
    }

    pub fn is_pole(&self) -> bool {
        matches!(self, Evaluation::Pole)
    }
}

fn multiplicity(f: &Polynomial, pi: &Polynomial) -> usize {
    let mut k = 0;
    let mut g = f.clone();
    loop {
        let (q, r) = g.divrem(pi).expect("irreducible modulus");
        if !r.is_zero() {
            return k;
        }
        k += 1;
        g = q;
    }
}

/// All places of degree `d`, in canonical order (the infinite place comes
/// last among degree-1 places).
pub fn places_of_degree(spec: &Arc<FieldSpec>, d: usize) -> Vec<Place> {
    assert!(d >= 1);
    let mut out: Vec<Place> = irreducibles(spec, d).into_iter().map(Place::Finite).collect();
    if d == 1 {
        out.push(Place::infinity(spec));
    }
    out
}

/// The first degree-1 place not in `exc`, in canonical order.
pub fn first_rational_place_outside(
    spec: &Arc<FieldSpec>,
    exc: &ExceptionalSet,
) -> Result<Place, FuncError> {
    for a in spec.elements() {
        let p = Place::rational(&a);
        if !exc.contains(&p) {
            return Ok(p);
        }
    }
    let inf = Place::infinity(spec);
    if !exc.contains(&inf) {
        return Ok(inf);
    }
    Err(FuncError::NoFreeRationalPlace)
}

/// A nonconstant function whose pole divisor is exactly `n * x0`.
pub fn single_pole_function(x0: &Place, n: usize) -> RationalFunction {
    assert!(n >= 1);
    let spec = x0.spec();
    match x0 {
        Place::Infinity(_) => RationalFunction::from_poly(Polynomial::x(spec).pow(n as u64)),
        Place::Finite(pi) => {
            let t = Polynomial::x(spec);
            if *pi == t {
                RationalFunction::new(Polynomial::one(spec), t.pow(n as u64)).expect("nonzero")
            } else {
                let d = pi.degree().expect("nonzero");
                let num = t.pow((n * d - 1) as u64);
                RationalFunction::new(num, pi.pow(n as u64)).expect("nonzero")
            }
        }
    }
}

/// The minimal-degree polynomial taking the given residue values on a set of
/// finite places (classical CRT; degree < sum of the place degrees).
pub fn interpolate(
    places: &[Place],
    targets: &[ResidueElement],
) -> Result<Polynomial, FuncError> {
    assert_eq!(places.len(), targets.len());
    assert!(!places.is_empty());
    let spec = places[0].spec().clone();
    let mut modulus = Polynomial::one(&spec);
    for p in places {
        let Place::Finite(pi) = p else {
            return Err(FuncError::InfinitePlaceInE);
        };
        modulus = modulus.mul(pi);
    }
    let mut acc = Polynomial::zero(&spec);
    for (p, target) in places.iter().zip(targets) {
        assert!(target.place() == p, "target attached to the wrong place");
        let pi = p.as_finite().expect("finite checked above");
        let rest = modulus.div_exact(pi);
        let (g, s, _) = rest.extended_gcd(pi);
        assert!(g.is_one(), "places must be distinct");
        // rest * s = 1 mod pi, = 0 mod other moduli
        let term = target.lift().mul(&s).rem(pi).mul(&rest);
        acc = acc.add(&term);
    }
    Ok(acc.rem(&modulus))
}

/// Writes `f` (regular on `E`) as `g + h` with both summands units at every
/// place of `E`: `g` interpolates `f(x) - 1` where `f(x) != 1` and `1 - alpha`
/// where `f(x) = 1`.
pub fn unit_sum_decompose(
    f: &RationalFunction,
    exc: &ExceptionalSet,
    alpha: &FieldElement,
) -> Result<(RationalFunction, RationalFunction), FuncError> {
    if alpha.is_zero() || alpha.is_one() {
        return Err(FuncError::BadAlpha);
    }
    if exc.contains_infinity() {
        return Err(FuncError::InfinitePlaceInE);
    }
    if exc.is_empty() {
        // no constraints: split off a constant
        let c = if f.is_one() {
            f.spec().one().sub(alpha)
        } else {
            f.spec().one()
        };
        let g = f.sub(&RationalFunction::constant(c.clone()));
        let h = RationalFunction::constant(c);
        return Ok((g, h));
    }
    let mut targets = Vec::with_capacity(exc.len());
    for p in exc.places() {
        if !f.is_zero() && f.ord(p).expect("nonzero") < 0 {
            return Err(FuncError::NotRegularAtE);
        }
        let value = f.evaluate(p).value().expect("regular");
        let eps = if value.is_one() {
            ResidueElement::from_constant(p, &f.spec().one().sub(alpha))
        } else {
            value.sub(&ResidueElement::one(p))
        };
        debug_assert!(!eps.is_zero());
        targets.push(eps);
    }
    let g_poly = interpolate(exc.places(), &targets)?;
    let g = RationalFunction::from_poly(g_poly);
    let h = f.sub(&g);
    debug_assert!(g.in_unit_group(exc));
    debug_assert!(h.in_unit_group(exc));
    Ok((g, h))
}

/// The default translation constant: the least base-field element outside
/// {0, 1} in code order.
pub fn default_alpha(spec: &Arc<FieldSpec>) -> Result<FieldElement, FuncError> {
    if spec.order() < 3 {
        return Err(FuncError::BadAlpha);
    }
    Ok(spec.from_code(2))
}

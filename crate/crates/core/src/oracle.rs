//! Black-box embeddings of unit groups `O_{E_X}^x -> O_{E_Y}^x` over a place
//! bijection, the input data the recovery engine consumes. The engine sees
//! only the trait: a multiplicative map on units, exceptional sets, the place
//! map, valuation multipliers and per-place residue maps, all available at
//! every level of the constant-field tower.
//!
//! Fixtures live here too: the honest one built from a fractional-linear
//! coordinate change composed with constant Frobenius and a global p^s power,
//! and three adversarial kinds that each violate exactly one hypothesis.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::field::{FieldElement, FieldSpec};
use crate::func::{ExceptionalSet, FuncError, Place, RationalFunction};
use crate::mobius::MobiusMap;
use crate::poly::Polynomial;
use crate::residue::ResidueElement;
use crate::rng::DetRng;
use crate::tower::{ConstantTower, TowerError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    OutsideDomain(String),
    MalformedTau(String),
    Tower(TowerError),
    Func(FuncError),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::OutsideDomain(s) => write!(f, "query outside the oracle domain: {s}"),
            OracleError::MalformedTau(s) => write!(f, "malformed embedding data: {s}"),
            OracleError::Tower(e) => write!(f, "{e}"),
            OracleError::Func(e) => write!(f, "{e}"),
        }
    }
}

impl From<TowerError> for OracleError {
    fn from(e: TowerError) -> Self {
        OracleError::Tower(e)
    }
}

impl From<FuncError> for OracleError {
    fn from(e: FuncError) -> Self {
        OracleError::Func(e)
    }
}

/// The black-box data of an order- and value-preserving multiplicative
/// embedding, per tower level. Implementations must be deterministic.
pub trait UnitGroupOracle {
    fn base_spec(&self) -> Arc<FieldSpec>;
    fn tower_prime(&self) -> u64;
    /// E_X at the given level (all places of the level line above it).
    fn source_exceptional(&mut self, level: usize) -> Result<ExceptionalSet, OracleError>;
    /// E_Y at the given level.
    fn target_exceptional(&mut self, level: usize) -> Result<ExceptionalSet, OracleError>;
    /// The place bijection, defined off the exceptional set.
    fn place_image(&mut self, level: usize, x: &Place) -> Result<Place, OracleError>;
    /// The positive valuation multiplier `e_x`.
    fn ord_multiplier(&mut self, level: usize, x: &Place) -> Result<u64, OracleError>;
    /// The multiplicative map on units of `O_{E_X}`.
    fn unit_image(
        &mut self,
        level: usize,
        f: &RationalFunction,
    ) -> Result<RationalFunction, OracleError>;
    /// The residue-field multiplicative map at a place off E_X.
    fn residue_image(
        &mut self,
        level: usize,
        x: &Place,
        v: &ResidueElement,
    ) -> Result<ResidueElement, OracleError>;
    fn describe(&self) -> String;
}

/// The honest fixture: `iota(f) = tau(f)^(p^s)` where `tau` applies a
/// constant-field Frobenius power to coefficients and substitutes a
/// fractional-linear image of the coordinate.
pub struct TauFixture {
    tower: ConstantTower,
    mobius: MobiusMap,
    const_frob: usize,
    frob_power: u32,
    exc_base: ExceptionalSet,
    levels: Vec<TauLevelData>,
}

/// Per-level derived data, filled on first use (deterministic, so the cache
/// is invisible).
struct TauLevelData {
    mobius: MobiusMap,
    exc_source: ExceptionalSet,
    exc_target: Option<ExceptionalSet>,
}

impl TauFixture {
    pub fn new(
        base: Arc<FieldSpec>,
        ell: u64,
        mobius: MobiusMap,
        const_frob: usize,
        frob_power: u32,
        exc_base: ExceptionalSet,
    ) -> Result<Self, OracleError> {
        if *mobius.spec() != base {
            return Err(OracleError::MalformedTau("coordinate map over wrong field".into()));
        }
        for p in exc_base.places() {
            if *p.spec() != base {
                return Err(OracleError::MalformedTau("exceptional place over wrong field".into()));
            }
        }
        let tower = ConstantTower::new(base, ell)?;
        Ok(TauFixture { tower, mobius, const_frob, frob_power, exc_base, levels: Vec::new() })
    }

    fn ensure_level(&mut self, level: usize) -> Result<(), OracleError> {
        while self.levels.len() <= level {
            let i = self.levels.len();
            let emb = self.tower.embed(0, i)?;
            let e = self.mobius.entries();
            let mobius = MobiusMap::new(
                emb.apply(&e[0]),
                emb.apply(&e[1]),
                emb.apply(&e[2]),
                emb.apply(&e[3]),
            )
            .expect("lifted map stays nonsingular");
            let exc_source = self.tower.lift_exceptional(0, i, &self.exc_base.clone())?;
            self.levels.push(TauLevelData { mobius, exc_source, exc_target: None });
        }
        Ok(())
    }

    pub fn mobius(&self) -> &MobiusMap {
        &self.mobius
    }

    pub fn frob_power(&self) -> u32 {
        self.frob_power
    }

    pub fn const_frob(&self) -> usize {
        self.const_frob
    }

    pub fn exceptional(&self) -> &ExceptionalSet {
        &self.exc_base
    }

    /// `p^s`, the valuation multiplier everywhere.
    pub fn ord_scale(&self) -> u64 {
        self.tower.base().p().pow(self.frob_power)
    }

    /// The embedding the recovery engine is expected to reproduce:
    /// `t -> m(t)^(p^s)` on the coordinate.
    pub fn expected_t_image(&self) -> RationalFunction {
        let spec = self.tower.base();
        let t_map = self.mobius_as_function(spec);
        t_map.powi(self.ord_scale() as i64).expect("nonzero")
    }

    fn mobius_as_function(&self, spec: &Arc<FieldSpec>) -> RationalFunction {
        let m = &self.mobius;
        let t = Polynomial::x(spec);
        let num = t.scale(&m_entry(m, 0)).add(&Polynomial::constant(m_entry(m, 1)));
        let den = t.scale(&m_entry(m, 2)).add(&Polynomial::constant(m_entry(m, 3)));
        RationalFunction::new(num, den).expect("nonsingular")
    }

    /// Expected image of a base constant: `c^(p^(const_frob + s))`.
    pub fn expected_constant_image(&self, c: &FieldElement) -> FieldElement {
        c.frobenius(self.const_frob).pow(self.ord_scale() as u128)
    }

    fn mobius_at(&mut self, level: usize) -> Result<MobiusMap, OracleError> {
        self.ensure_level(level)?;
        Ok(self.levels[level].mobius.clone())
    }

    /// `tau` at a level: coefficient Frobenius then coordinate substitution.
    fn apply_tau(
        &mut self,
        level: usize,
        f: &RationalFunction,
    ) -> Result<RationalFunction, OracleError> {
        let j = self.const_frob;
        if let Some(c) = f.as_constant() {
            // the substitution fixes constants
            return Ok(RationalFunction::constant(c.frobenius(j)));
        }
        let map_poly = |p: &Polynomial| -> Polynomial {
            let coeffs = p.coeffs().iter().map(|c| c.frobenius(j)).collect();
            Polynomial::from_coeffs(p.spec(), coeffs)
        };
        let num = map_poly(f.num());
        let den = map_poly(f.den());
        let sigma_f = RationalFunction::new(num, den).expect("nonzero");
        let m = self.mobius_at(level)?;
        Ok(m.substitute(&sigma_f))
    }

    fn iota(&mut self, level: usize, f: &RationalFunction) -> Result<RationalFunction, OracleError> {
        let t = self.apply_tau(level, f)?;
        Ok(t.powi(self.ord_scale() as i64).expect("nonzero"))
    }

    /// Image of a place under the morphism behind `tau` (the `p^s` power
    /// moves no places): the zeros of `(sigma pi) o m` are the Mobius
    /// pullback of the zeros of `sigma pi`. Defined for every place.
    fn place_image_unchecked(&mut self, level: usize, x: &Place) -> Result<Place, OracleError> {
        let m = self.mobius_at(level)?;
        let j = self.const_frob;
        match x {
            Place::Infinity(_) => Ok(m.pullback_place(x)),
            Place::Finite(pi) => {
                let coeffs = pi.coeffs().iter().map(|c| c.frobenius(j)).collect();
                let sigma_pi = Polynomial::from_coeffs(pi.spec(), coeffs);
                let moved = Place::Finite(sigma_pi);
                Ok(m.pullback_place(&moved))
            }
        }
    }
}

fn m_entry(m: &MobiusMap, i: usize) -> FieldElement {
    // small accessor shim: MobiusMap stores (a, b, c, d)
    m.entries()[i].clone()
}

impl UnitGroupOracle for TauFixture {
    fn base_spec(&self) -> Arc<FieldSpec> {
        self.tower.base().clone()
    }

    fn tower_prime(&self) -> u64 {
        self.tower.ell()
    }

    fn source_exceptional(&mut self, level: usize) -> Result<ExceptionalSet, OracleError> {
        self.ensure_level(level)?;
        Ok(self.levels[level].exc_source.clone())
    }

    fn target_exceptional(&mut self, level: usize) -> Result<ExceptionalSet, OracleError> {
        self.ensure_level(level)?;
        if let Some(t) = &self.levels[level].exc_target {
            return Ok(t.clone());
        }
        let source = self.levels[level].exc_source.clone();
        let mut out = Vec::with_capacity(source.len());
        for x in source.places() {
            out.push(self.place_image_unchecked(level, x)?);
        }
        let target = ExceptionalSet::new(out);
        self.levels[level].exc_target = Some(target.clone());
        Ok(target)
    }

    fn place_image(&mut self, level: usize, x: &Place) -> Result<Place, OracleError> {
        if self.source_exceptional(level)?.contains(x) {
            return Err(OracleError::OutsideDomain(format!("{x} is exceptional")));
        }
        self.place_image_unchecked(level, x)
    }

    fn ord_multiplier(&mut self, level: usize, x: &Place) -> Result<u64, OracleError> {
        if self.source_exceptional(level)?.contains(x) {
            return Err(OracleError::OutsideDomain(format!("{x} is exceptional")));
        }
        Ok(self.ord_scale())
    }

    fn unit_image(
        &mut self,
        level: usize,
        f: &RationalFunction,
    ) -> Result<RationalFunction, OracleError> {
        if f.is_zero() {
            return Err(OracleError::OutsideDomain("zero is not a unit".into()));
        }
        self.iota(level, f)
    }

    fn residue_image(
        &mut self,
        level: usize,
        x: &Place,
        v: &ResidueElement,
    ) -> Result<ResidueElement, OracleError> {
        if self.source_exceptional(level)?.contains(x) {
            return Err(OracleError::OutsideDomain(format!("{x} is exceptional")));
        }
        let y = self.place_image_unchecked(level, x)?;
        if v.is_zero() {
            return Ok(ResidueElement::zero(&y));
        }
        let lift = RationalFunction::from_poly(v.lift().clone());
        let moved = self.iota(level, &lift)?;
        Ok(moved
            .evaluate(&y)
            .value()
            .expect("residue representative stays regular"))
    }

    fn describe(&self) -> String {
        format!(
            "tau-fixture(mobius={}, const_frob={}, s={}, |E|={})",
            self.mobius,
            self.const_frob,
            self.frob_power,
            self.exc_base.len()
        )
    }
}

/// Constructs the honest oracle from embedding data (the test-fixture
/// constructor realizing the recovery hypotheses).
pub fn oracle_from_embedding(
    base: Arc<FieldSpec>,
    ell: u64,
    mobius: MobiusMap,
    const_frob: usize,
    frob_power: u32,
    exc: ExceptionalSet,
) -> Result<TauFixture, OracleError> {
    TauFixture::new(base, ell, mobius, const_frob, frob_power, exc)
}

/// A seeded random honest fixture: random nonsingular coordinate map, random
/// constant Frobenius, the given `p^s` twist, and a random exceptional set of
/// up to `e_size` places of degree at most 2 (possibly including infinity).
pub fn random_tau_fixture(
    base: &Arc<FieldSpec>,
    ell: u64,
    frob_power: u32,
    e_size: usize,
    seed: u64,
) -> TauFixture {
    let mut rng = DetRng::new(seed);
    let q = base.order();
    let mobius = loop {
        let a = base.from_code(rng.below(q));
        let b = base.from_code(rng.below(q));
        let c = base.from_code(rng.below(q));
        let d = base.from_code(rng.below(q));
        if let Ok(m) = MobiusMap::new(a, b, c, d) {
            break m;
        }
    };
    let const_frob = (rng.below(base.degree() as u64)) as usize;
    let mut pool: Vec<Place> = crate::func::places_of_degree(base, 1);
    pool.extend(crate::func::places_of_degree(base, 2));
    let mut places = Vec::new();
    for _ in 0..e_size {
        let idx = rng.below(pool.len() as u64) as usize;
        places.push(pool[idx].clone());
    }
    let exc = ExceptionalSet::new(places);
    TauFixture::new(base.clone(), ell, mobius, const_frob, frob_power, exc)
        .expect("randomized fixture data is well-formed")
}

/// The three adversarial kinds, each violating exactly one hypothesis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdversarialKind {
    /// One per-place residue map composed with a nontrivial character.
    ValueTwist,
    /// One reported valuation multiplier perturbed.
    OrderScramble,
    /// The constant part of every unit mapped through a non-Frobenius power.
    NonadditiveConstants,
}

impl AdversarialKind {
    pub fn name(self) -> &'static str {
        match self {
            AdversarialKind::ValueTwist => "value-twist",
            AdversarialKind::OrderScramble => "order-scramble",
            AdversarialKind::NonadditiveConstants => "nonadditive-constants",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "value-twist" => Some(AdversarialKind::ValueTwist),
            "order-scramble" => Some(AdversarialKind::OrderScramble),
            "nonadditive-constants" => Some(AdversarialKind::NonadditiveConstants),
            _ => None,
        }
    }
}

/// Wraps an honest fixture, composing the residue map at one base-level place
/// with the character `u -> u^twist`.
pub struct ValueTwistOracle {
    inner: TauFixture,
    place: Place,
    twist: u64,
}

impl UnitGroupOracle for ValueTwistOracle {
    fn base_spec(&self) -> Arc<FieldSpec> {
        self.inner.base_spec()
    }
    fn tower_prime(&self) -> u64 {
        self.inner.tower_prime()
    }
    fn source_exceptional(&mut self, level: usize) -> Result<ExceptionalSet, OracleError> {
        self.inner.source_exceptional(level)
    }
    fn target_exceptional(&mut self, level: usize) -> Result<ExceptionalSet, OracleError> {
        self.inner.target_exceptional(level)
    }
    fn place_image(&mut self, level: usize, x: &Place) -> Result<Place, OracleError> {
        self.inner.place_image(level, x)
    }
    fn ord_multiplier(&mut self, level: usize, x: &Place) -> Result<u64, OracleError> {
        self.inner.ord_multiplier(level, x)
    }
    fn unit_image(
        &mut self,
        level: usize,
        f: &RationalFunction,
    ) -> Result<RationalFunction, OracleError> {
        self.inner.unit_image(level, f)
    }
    fn residue_image(
        &mut self,
        level: usize,
        x: &Place,
        v: &ResidueElement,
    ) -> Result<ResidueElement, OracleError> {
        let honest = self.inner.residue_image(level, x, v)?;
        if level == 0 && *x == self.place && !honest.is_zero() {
            Ok(honest.pow(self.twist as u128))
        } else {
            Ok(honest)
        }
    }
    fn describe(&self) -> String {
        format!(
            "value-twist(at={}, power={}, over {})",
            self.place,
            self.twist,
            self.inner.describe()
        )
    }
}

/// Wraps an honest fixture, reporting a wrong `e_x` at one place.
pub struct OrderScrambleOracle {
    inner: TauFixture,
    place: Place,
    delta: u64,
}

impl UnitGroupOracle for OrderScrambleOracle {
    fn base_spec(&self) -> Arc<FieldSpec> {
        self.inner.base_spec()
    }
    fn tower_prime(&self) -> u64 {
        self.inner.tower_prime()
    }
    fn source_exceptional(&mut self, level: usize) -> Result<ExceptionalSet, OracleError> {
        self.inner.source_exceptional(level)
    }
    fn target_exceptional(&mut self, level: usize) -> Result<ExceptionalSet, OracleError> {
        self.inner.target_exceptional(level)
    }
    fn place_image(&mut self, level: usize, x: &Place) -> Result<Place, OracleError> {
        self.inner.place_image(level, x)
    }
    fn ord_multiplier(&mut self, level: usize, x: &Place) -> Result<u64, OracleError> {
        let honest = self.inner.ord_multiplier(level, x)?;
        if level == 0 && *x == self.place {
            Ok(honest + self.delta)
        } else {
            Ok(honest)
        }
    }
    fn unit_image(
        &mut self,
        level: usize,
        f: &RationalFunction,
    ) -> Result<RationalFunction, OracleError> {
        self.inner.unit_image(level, f)
    }
    fn residue_image(
        &mut self,
        level: usize,
        x: &Place,
        v: &ResidueElement,
    ) -> Result<ResidueElement, OracleError> {
        self.inner.residue_image(level, x, v)
    }
    fn describe(&self) -> String {
        format!(
            "order-scramble(at={}, delta={}, over {})",
            self.place,
            self.delta,
            self.inner.describe()
        )
    }
}

/// Multiplicative but not additive: the constant part of every unit goes
/// through `c -> c^k` for a fixed non-Frobenius exponent `k`; monic parts are
/// untouched, so the map is multiplicative and order-preserving but not
/// value-preserving, and the induced map on constants is not additive.
pub struct NonadditiveOracle {
    tower: ConstantTower,
    exc_base: ExceptionalSet,
    k: u64,
    exc_levels: Vec<ExceptionalSet>,
}

impl NonadditiveOracle {
    pub fn power(&self) -> u64 {
        self.k
    }
}

impl UnitGroupOracle for NonadditiveOracle {
    fn base_spec(&self) -> Arc<FieldSpec> {
        self.tower.base().clone()
    }
    fn tower_prime(&self) -> u64 {
        self.tower.ell()
    }
    fn source_exceptional(&mut self, level: usize) -> Result<ExceptionalSet, OracleError> {
        while self.exc_levels.len() <= level {
            let i = self.exc_levels.len();
            let lifted = self.tower.lift_exceptional(0, i, &self.exc_base.clone())?;
            self.exc_levels.push(lifted);
        }
        Ok(self.exc_levels[level].clone())
    }
    fn target_exceptional(&mut self, level: usize) -> Result<ExceptionalSet, OracleError> {
        self.source_exceptional(level)
    }
    fn place_image(&mut self, level: usize, x: &Place) -> Result<Place, OracleError> {
        if self.source_exceptional(level)?.contains(x) {
            return Err(OracleError::OutsideDomain(format!("{x} is exceptional")));
        }
        Ok(x.clone())
    }
    fn ord_multiplier(&mut self, level: usize, x: &Place) -> Result<u64, OracleError> {
        if self.source_exceptional(level)?.contains(x) {
            return Err(OracleError::OutsideDomain(format!("{x} is exceptional")));
        }
        Ok(1)
    }
    fn unit_image(
        &mut self,
        level: usize,
        f: &RationalFunction,
    ) -> Result<RationalFunction, OracleError> {
        let _ = level;
        if f.is_zero() {
            return Err(OracleError::OutsideDomain("zero is not a unit".into()));
        }
        // canonical form keeps the denominator monic: the constant part is
        // the leading coefficient of the numerator
        let c = f.num().leading_coeff();
        let monic_num = f.num().monic();
        let twisted = Polynomial::constant(c.pow(self.k as u128)).mul(&monic_num);
        Ok(RationalFunction::new(twisted, f.den().clone()).expect("nonzero"))
    }
    fn residue_image(
        &mut self,
        level: usize,
        x: &Place,
        v: &ResidueElement,
    ) -> Result<ResidueElement, OracleError> {
        if self.source_exceptional(level)?.contains(x) {
            return Err(OracleError::OutsideDomain(format!("{x} is exceptional")));
        }
        Ok(v.pow(self.k as u128))
    }
    fn describe(&self) -> String {
        format!("nonadditive-constants(k={}, |E|={})", self.k, self.exc_base.len())
    }
}

/// Builds a seeded adversarial oracle of the given kind over `F_q(t)`.
/// Needs `q >= 5`: smaller unit groups leave no room for a non-Frobenius
/// character.
pub fn adversarial_oracle(
    kind: AdversarialKind,
    base: &Arc<FieldSpec>,
    ell: u64,
    e_size: usize,
    seed: u64,
) -> Box<dyn UnitGroupOracle> {
    assert!(base.order() >= 5, "adversarial fixtures need a field of order >= 5");
    let mut rng = DetRng::new(seed ^ 0xAD7E);
    match kind {
        AdversarialKind::ValueTwist => {
            let inner = random_tau_fixture(base, ell, rng.below(2) as u32, e_size, rng.next_u64());
            // pick a twisted place of degree <= 2 outside E
            let exc = inner.exceptional().clone();
            let mut pool: Vec<Place> = crate::func::places_of_degree(base, 1)
                .into_iter()
                .chain(crate::func::places_of_degree(base, 2))
                .filter(|p| !exc.contains(p) && base.order().pow(p.degree() as u32) > 3)
                .collect();
            rng.shuffle(&mut pool);
            let place = pool.into_iter().next().expect("a free place exists");
            let group = base.order().pow(place.degree() as u32) - 1;
            // any exponent in [2, group) changes the map on a generator
            let twist = 2 + rng.below(group - 2);
            Box::new(ValueTwistOracle { inner, place, twist })
        }
        AdversarialKind::OrderScramble => {
            let inner = random_tau_fixture(base, ell, rng.below(2) as u32, e_size, rng.next_u64());
            let exc = inner.exceptional().clone();
            let mut pool: Vec<Place> = crate::func::places_of_degree(base, 1)
                .into_iter()
                .chain(crate::func::places_of_degree(base, 2))
                .filter(|p| !exc.contains(p))
                .collect();
            rng.shuffle(&mut pool);
            let place = pool.into_iter().next().expect("a free place exists");
            let delta = 1 + rng.below(3);
            Box::new(OrderScrambleOracle { inner, place, delta })
        }
        AdversarialKind::NonadditiveConstants => {
            let q = base.order();
            let p = base.p();
            // exponents that are Frobenius powers act additively; skip them
            let mut frob_powers = Vec::new();
            let mut pw = 1u64;
            loop {
                frob_powers.push(pw % (q - 1));
                pw = pw.wrapping_mul(p) % (q - 1);
                if pw == frob_powers[0] {
                    break;
                }
            }
            let k = loop {
                let cand = 2 + rng.below(q - 3);
                if !frob_powers.contains(&(cand % (q - 1))) {
                    break cand;
                }
            };
            let mut pool: Vec<Place> = crate::func::places_of_degree(base, 1)
                .into_iter()
                .chain(crate::func::places_of_degree(base, 2))
                .collect();
            rng.shuffle(&mut pool);
            let places: Vec<Place> = pool.into_iter().take(e_size).collect();
            let tower = ConstantTower::new(base.clone(), ell).expect("valid tower prime");
            let oracle = NonadditiveOracle {
                tower,
                exc_base: ExceptionalSet::new(places),
                k,
                exc_levels: Vec::new(),
            };
            // the power map must actually break additivity somewhere
            debug_assert!(base.elements().any(|eta| {
                let lhs = eta.add(&base.one()).pow(k as u128);
                let rhs = eta.pow(k as u128).add(&base.one());
                lhs != rhs
            }));
            Box::new(oracle)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::places_of_degree;

    fn f5() -> Arc<FieldSpec> {
        FieldSpec::prime(5).unwrap()
    }

    fn identity_fixture(exc: ExceptionalSet, s: u32) -> TauFixture {
        let base = f5();
        TauFixture::new(
            base.clone(),
            2,
            MobiusMap::identity(&base),
            0,
            s,
            exc,
        )
        .unwrap()
    }

    #[test]
    fn identity_oracle_is_the_identity_on_units() {
        let mut o = identity_fixture(ExceptionalSet::empty(), 0);
        let base = f5();
        let t = RationalFunction::coordinate(&base);
        assert_eq!(o.unit_image(0, &t).unwrap(), t);
        assert_eq!(o.ord_multiplier(0, &Place::infinity(&base)).unwrap(), 1);
    }

    #[test]
    fn frobenius_twist_scales_ord() {
        let mut o = identity_fixture(ExceptionalSet::empty(), 1);
        let base = f5();
        let t = RationalFunction::coordinate(&base);
        let img = o.unit_image(0, &t).unwrap();
        // iota(t) = t^5
        assert_eq!(img, t.powi(5).unwrap());
        for x in places_of_degree(&base, 1) {
            assert_eq!(o.ord_multiplier(0, &x).unwrap(), 5);
            assert_eq!(
                img.ord(&o.place_image(0, &x).unwrap()).unwrap(),
                5 * t.ord(&x).unwrap()
            );
        }
    }

    #[test]
    fn translation_moves_places_backwards() {
        let base = f5();
        // t -> t + 1
        let m = MobiusMap::new(base.one(), base.one(), base.zero(), base.one()).unwrap();
        let mut o =
            TauFixture::new(base.clone(), 2, m, 0, 0, ExceptionalSet::empty()).unwrap();
        for a in base.elements() {
            let from = Place::rational(&a);
            let to = o.place_image(0, &from).unwrap();
            let expect = Place::rational(&a.sub(&base.one()));
            assert_eq!(to, expect, "tau(f)(t) = f(t+1) vanishes where t = a - 1");
        }
    }

    #[test]
    fn fixture_is_multiplicative_and_order_preserving_on_samples() {
        let base = f5();
        let mut o = random_tau_fixture(&base, 2, 1, 2, 42);
        let exc = o.source_exceptional(0).unwrap();
        let units: Vec<RationalFunction> = places_of_degree(&base, 1)
            .into_iter()
            .chain(places_of_degree(&base, 2))
            .filter_map(|p| match p {
                Place::Finite(pi) => Some(RationalFunction::from_poly(pi)),
                Place::Infinity(_) => None,
            })
            .filter(|f| f.in_unit_group(&exc))
            .collect();
        for f in &units {
            for g in &units {
                let lhs = o.unit_image(0, &f.mul(g)).unwrap();
                let rhs = o.unit_image(0, f).unwrap().mul(&o.unit_image(0, g).unwrap());
                assert_eq!(lhs, rhs);
            }
            // order diagram at every free degree-1 place
            let img = o.unit_image(0, f).unwrap();
            for x in places_of_degree(&base, 1) {
                if exc.contains(&x) {
                    continue;
                }
                let y = o.place_image(0, &x).unwrap();
                let e = o.ord_multiplier(0, &x).unwrap();
                assert_eq!(img.ord(&y).unwrap(), e as i64 * f.ord(&x).unwrap());
            }
        }
    }

    #[test]
    fn fixture_is_value_preserving_on_samples() {
        let base = f5();
        let mut o = random_tau_fixture(&base, 2, 0, 2, 7);
        let exc = o.source_exceptional(0).unwrap();
        let f = RationalFunction::from_poly(Polynomial::from_ints(&base, &[3, 1, 1]));
        if f.in_unit_group(&exc) {
            let img = o.unit_image(0, &f).unwrap();
            for x in places_of_degree(&base, 1) {
                if exc.contains(&x) || f.ord(&x).unwrap() != 0 {
                    continue;
                }
                let y = o.place_image(0, &x).unwrap();
                let lhs = img.evaluate(&y).value().unwrap();
                let rhs = o
                    .residue_image(0, &x, &f.evaluate(&x).value().unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn lifted_levels_are_consistent_with_the_base() {
        let base = f5();
        let mut o = random_tau_fixture(&base, 2, 1, 2, 99);
        let mut tower = ConstantTower::new(base.clone(), 2).unwrap();
        let t = RationalFunction::coordinate(&base);
        let img0 = o.unit_image(0, &t).unwrap();
        let t1 = tower.lift_rational(0, 1, &t).unwrap();
        let img1 = o.unit_image(1, &t1).unwrap();
        assert_eq!(tower.lift_rational(0, 1, &img0).unwrap(), img1);
        // exceptional sets lift to the places above
        let e0 = o.source_exceptional(0).unwrap();
        let e1 = o.source_exceptional(1).unwrap();
        let mut expect = Vec::new();
        for p in e0.places() {
            expect.extend(tower.places_above(0, 1, p).unwrap());
        }
        assert_eq!(e1, ExceptionalSet::new(expect));
    }

    #[test]
    fn nonadditive_oracle_matches_its_contract() {
        let base = FieldSpec::prime(7).unwrap();
        let mut o = NonadditiveOracle {
            tower: ConstantTower::new(base.clone(), 2).unwrap(),
            exc_base: ExceptionalSet::empty(),
            k: 3,
            exc_levels: Vec::new(),
        };
        // multiplicative on units
        let f = RationalFunction::from_poly(Polynomial::from_ints(&base, &[2, 1]));
        let g = RationalFunction::constant(base.from_int(3));
        assert_eq!(
            o.unit_image(0, &f.mul(&g)).unwrap(),
            o.unit_image(0, &f).unwrap().mul(&o.unit_image(0, &g).unwrap())
        );
        // not additive on constants: 2^3 = 1 != 2 = 1 + 1
        let two = o
            .unit_image(0, &RationalFunction::constant(base.from_int(2)))
            .unwrap();
        assert_eq!(two.as_constant().unwrap(), base.from_int(1));
    }

    #[test]
    fn adversarial_constructors_build() {
        let base = f5();
        for kind in [
            AdversarialKind::ValueTwist,
            AdversarialKind::OrderScramble,
            AdversarialKind::NonadditiveConstants,
        ] {
            let mut o = adversarial_oracle(kind, &base, 2, 2, 5);
            assert_eq!(o.base_spec(), base);
            let _ = o.source_exceptional(0).unwrap();
        }
    }
}

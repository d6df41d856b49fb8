//! The constant-field tower `F_q ⊂ F_{q^ℓ} ⊂ F_{q^{ℓ²}} ⊂ …` for a prime
//! `ℓ != p`, built lazily. Level embeddings are composites of the
//! single-step least-root embeddings, so the whole family commutes by
//! construction.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::field::{EmbedMap, FieldElement, FieldError, FieldSpec};
use crate::func::{Divisor, ExceptionalSet, Place, RationalFunction};
use crate::poly::{embed_least_root, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TowerError {
    BadPrime,
    LevelTooLarge,
}

impl fmt::Display for TowerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TowerError::BadPrime => write!(f, "tower prime must be a prime different from p"),
            TowerError::LevelTooLarge => write!(f, "tower level exceeds the 64-bit field budget"),
        }
    }
}

#[derive(Clone)]
pub struct TowerLevel {
    pub spec: Arc<FieldSpec>,
    /// Embedding from the base field into this level.
    pub from_base: EmbedMap,
    /// Single step from the previous level (absent at level 0).
    step: Option<EmbedMap>,
}

/// Finite truncation of the `Z_ℓ` constant-field extension.
#[derive(Clone)]
pub struct ConstantTower {
    base: Arc<FieldSpec>,
    ell: u64,
    levels: Vec<TowerLevel>,
}

impl ConstantTower {
    pub fn new(base: Arc<FieldSpec>, ell: u64) -> Result<Self, TowerError> {
        if ell < 2 || ell == base.p() || !is_prime_u64(ell) {
            return Err(TowerError::BadPrime);
        }
        let level0 = TowerLevel {
            spec: base.clone(),
            from_base: EmbedMap::identity(&base),
            step: None,
        };
        Ok(ConstantTower { base, ell, levels: alloc::vec![level0] })
    }

    pub fn base(&self) -> &Arc<FieldSpec> {
        &self.base
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn max_built_level(&self) -> usize {
        self.levels.len() - 1
    }

    /// Ensures all levels up to `i` exist and returns level `i`. Levels are
    /// deterministic, so rebuilding them elsewhere yields identical fields.
    pub fn level(&mut self, i: usize) -> Result<&TowerLevel, TowerError> {
        while self.levels.len() <= i {
            let prev = self.levels.last().expect("level 0 exists");
            let d = prev
                .spec
                .degree()
                .checked_mul(self.ell as usize)
                .ok_or(TowerError::LevelTooLarge)?;
            let spec = FieldSpec::extension(self.base.p(), d).map_err(|e| match e {
                FieldError::FieldTooLarge => TowerError::LevelTooLarge,
                _ => TowerError::LevelTooLarge,
            })?;
            let step =
                embed_least_root(&prev.spec, &spec).map_err(|_| TowerError::LevelTooLarge)?;
            let from_base = if self.levels.len() == 1 {
                step.clone()
            } else {
                EmbedMap::compose(&prev.from_base, &step)
            };
            self.levels.push(TowerLevel { spec, from_base, step: Some(step) });
        }
        Ok(&self.levels[i])
    }

    pub fn spec_at(&mut self, i: usize) -> Result<Arc<FieldSpec>, TowerError> {
        Ok(self.level(i)?.spec.clone())
    }

    /// Embedding from level `i` to level `j` (i <= j), composed stepwise.
    pub fn embed(&mut self, i: usize, j: usize) -> Result<EmbedMap, TowerError> {
        assert!(i <= j, "embeddings go up the tower");
        self.level(j)?;
        let mut acc = EmbedMap::identity(&self.levels[i].spec);
        for k in i + 1..=j {
            let step = self.levels[k].step.as_ref().expect("levels > 0 have steps");
            acc = EmbedMap::compose(&acc, step);
        }
        Ok(acc)
    }

    pub fn lift_element(
        &mut self,
        i: usize,
        j: usize,
        a: &FieldElement,
    ) -> Result<FieldElement, TowerError> {
        Ok(self.embed(i, j)?.apply(a))
    }

    pub fn lift_poly(
        &mut self,
        i: usize,
        j: usize,
        f: &Polynomial,
    ) -> Result<Polynomial, TowerError> {
        let emb = self.embed(i, j)?;
        let coeffs = f.coeffs().iter().map(|c| emb.apply(c)).collect();
        Ok(Polynomial::from_coeffs(emb.to_spec(), coeffs))
    }

    pub fn lift_rational(
        &mut self,
        i: usize,
        j: usize,
        f: &RationalFunction,
    ) -> Result<RationalFunction, TowerError> {
        let num = self.lift_poly(i, j, f.num())?;
        let den = self.lift_poly(i, j, f.den())?;
        Ok(RationalFunction::new(num, den).expect("denominator stays nonzero"))
    }

    /// The places of the level-`j` line lying above a level-`i` place
    /// (constant-field extensions are unramified: the lift factors into
    /// distinct irreducibles).
    pub fn places_above(
        &mut self,
        i: usize,
        j: usize,
        p: &Place,
    ) -> Result<Vec<Place>, TowerError> {
        match p {
            Place::Infinity(_) => {
                let spec = self.spec_at(j)?;
                Ok(alloc::vec![Place::infinity(&spec)])
            }
            Place::Finite(pi) => {
                let lifted = self.lift_poly(i, j, pi)?;
                let (_, factors) = lifted.factor();
                let mut out = Vec::with_capacity(factors.len());
                for (f, e) in factors {
                    debug_assert_eq!(e, 1, "constant-field extension is unramified");
                    out.push(Place::Finite(f));
                }
                out.sort();
                Ok(out)
            }
        }
    }

    pub fn lift_exceptional(
        &mut self,
        i: usize,
        j: usize,
        e: &ExceptionalSet,
    ) -> Result<ExceptionalSet, TowerError> {
        let mut places = Vec::new();
        for p in e.places() {
            places.extend(self.places_above(i, j, p)?);
        }
        Ok(ExceptionalSet::new(places))
    }

    /// The divisor of the lifted function: each place replaced by the places
    /// above it, with the same coefficient.
    pub fn lift_divisor(&mut self, i: usize, j: usize, d: &Divisor) -> Result<Divisor, TowerError> {
        let mut out = Divisor::zero();
        for (p, m) in d.iter() {
            for q in self.places_above(i, j, p)? {
                out.add_place(q, m);
            }
        }
        Ok(out)
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut k = 3u64;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 2;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_sizes_double_in_degree() {
        let base = FieldSpec::prime(5).unwrap();
        let mut tower = ConstantTower::new(base, 2).unwrap();
        assert_eq!(tower.spec_at(0).unwrap().order(), 5);
        assert_eq!(tower.spec_at(1).unwrap().order(), 25);
        assert_eq!(tower.spec_at(2).unwrap().order(), 625);
    }

    #[test]
    fn constants_lift_through_the_prime_subfield() {
        let base = FieldSpec::prime(5).unwrap();
        let mut tower = ConstantTower::new(base.clone(), 2).unwrap();
        let two = base.from_int(2);
        for i in 1..=2 {
            let lifted = tower.lift_element(0, i, &two).unwrap();
            assert_eq!(lifted, tower.spec_at(i).unwrap().from_int(2));
        }
    }

    #[test]
    fn embeddings_commute() {
        let base = FieldSpec::extension(3, 2).unwrap();
        let mut tower = ConstantTower::new(base.clone(), 2).unwrap();
        let direct = tower.embed(0, 2).unwrap();
        let step1 = tower.embed(0, 1).unwrap();
        let step2 = tower.embed(1, 2).unwrap();
        for a in base.elements() {
            assert_eq!(direct.apply(&a), step2.apply(&step1.apply(&a)));
        }
    }

    #[test]
    fn quadratic_place_splits_at_level_one() {
        let base = FieldSpec::prime(5).unwrap();
        let mut tower = ConstantTower::new(base.clone(), 2).unwrap();
        // t^2 + 2 is irreducible over F_5
        let pi = Place::finite(Polynomial::from_ints(&base, &[2, 0, 1])).unwrap();
        let above = tower.places_above(0, 1, &pi).unwrap();
        assert_eq!(above.len(), 2);
        assert!(above.iter().all(|p| p.degree() == 1));
    }

    #[test]
    fn lifting_commutes_with_ord_and_multiplication() {
        let base = FieldSpec::prime(3).unwrap();
        let mut tower = ConstantTower::new(base.clone(), 2).unwrap();
        let f = RationalFunction::new(
            Polynomial::from_ints(&base, &[1, 0, 1]),
            Polynomial::from_ints(&base, &[0, 1]),
        )
        .unwrap();
        let g = RationalFunction::from_poly(Polynomial::from_ints(&base, &[2, 1]));
        let fl = tower.lift_rational(0, 1, &f).unwrap();
        let gl = tower.lift_rational(0, 1, &g).unwrap();
        assert_eq!(tower.lift_rational(0, 1, &f.mul(&g)).unwrap(), fl.mul(&gl));
        // ord is preserved place by place over the fiber
        let div = f.principal_divisor().unwrap();
        for (p, m) in div.iter() {
            for q in tower.places_above(0, 1, &p).unwrap() {
                assert_eq!(fl.ord(&q).unwrap(), m);
            }
        }
        // and the lifted divisor is the divisor of the lift
        assert_eq!(
            tower.lift_divisor(0, 1, &div).unwrap(),
            fl.principal_divisor().unwrap()
        );
    }

    #[test]
    fn evaluation_commutes_with_residue_embedding() {
        let base = FieldSpec::prime(3).unwrap();
        let mut tower = ConstantTower::new(base.clone(), 2).unwrap();
        let f = RationalFunction::new(
            Polynomial::from_ints(&base, &[1, 1]),
            Polynomial::from_ints(&base, &[2, 1]),
        )
        .unwrap();
        let p = Place::rational(&base.zero());
        let v = f.evaluate(&p).value().unwrap().as_constant().unwrap();
        let fl = tower.lift_rational(0, 1, &f).unwrap();
        let pl = &tower.places_above(0, 1, &p).unwrap()[0];
        let vl = fl.evaluate(pl).value().unwrap().as_constant().unwrap();
        assert_eq!(tower.lift_element(0, 1, &v).unwrap(), vl);
    }

    #[test]
    fn rejects_bad_tower_primes() {
        let base = FieldSpec::prime(5).unwrap();
        assert!(ConstantTower::new(base.clone(), 5).is_err());
        assert!(ConstantTower::new(base.clone(), 4).is_err());
        assert!(ConstantTower::new(base, 2).is_ok());
    }
}

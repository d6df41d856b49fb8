//! Odd-characteristic hyperelliptic curves `y^2 = f(x)` with `deg f = 2g+1`
//! (imaginary model: a single point at infinity). Point counting is naive
//! x-enumeration with a quadratic-residue table; everything stays within an
//! explicit enumeration budget.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::field::{EmbedMap, FieldElement, FieldSpec};
use crate::poly::{embed_least_root, Polynomial};
use crate::zeta::{LPolynomial, ZetaError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveError {
    EvenCharacteristic,
    NotMonic,
    NotSquarefree,
    BadDegree,
    GenusZero,
    BudgetExceeded,
    LevelMismatch,
    OrderMismatch,
    Zeta(ZetaError),
}

impl fmt::Display for CurveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveError::EvenCharacteristic => write!(f, "characteristic 2 models are not supported"),
            CurveError::NotMonic => write!(f, "curve polynomial must be monic"),
            CurveError::NotSquarefree => write!(f, "curve polynomial must be squarefree"),
            CurveError::BadDegree => write!(f, "curve polynomial must have odd degree 2g+1 >= 3"),
            CurveError::GenusZero => write!(f, "genus must be at least 1"),
            CurveError::BudgetExceeded => write!(f, "enumeration budget exceeded"),
            CurveError::LevelMismatch => write!(f, "operands live at different extension levels"),
            CurveError::OrderMismatch => write!(f, "group order disagrees with the element (bug)"),
            CurveError::Zeta(e) => write!(f, "{e}"),
        }
    }
}

impl From<ZetaError> for CurveError {
    fn from(e: ZetaError) -> Self {
        CurveError::Zeta(e)
    }
}

/// `y^2 = f(x)` over `F_q`, `q` odd, `f` monic squarefree of degree `2g+1`.
#[derive(Clone, Debug)]
pub struct HyperellipticCurve {
    f: Polynomial,
    genus: usize,
}

impl HyperellipticCurve {
    pub fn new(f: Polynomial) -> Result<Self, CurveError> {
        if f.spec().p() == 2 {
            return Err(CurveError::EvenCharacteristic);
        }
        if !f.is_monic() {
            return Err(CurveError::NotMonic);
        }
        let deg = f.degree().ok_or(CurveError::BadDegree)?;
        if deg == 1 {
            return Err(CurveError::GenusZero);
        }
        if deg < 3 || deg % 2 == 0 {
            return Err(CurveError::BadDegree);
        }
        if !f.is_squarefree() {
            return Err(CurveError::NotSquarefree);
        }
        Ok(HyperellipticCurve { f, genus: (deg - 1) / 2 })
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        self.f.spec()
    }

    pub fn f(&self) -> &Polynomial {
        &self.f
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// The curve base-changed to `F_{q^m}`.
    pub fn level(&self, m: usize) -> Result<CurveLevel, CurveError> {
        assert!(m >= 1);
        let base = self.spec();
        let spec = if m == 1 {
            base.clone()
        } else {
            FieldSpec::extension(base.p(), base.degree() * m)
                .map_err(|_| CurveError::BudgetExceeded)?
        };
        let embed = embed_least_root(base, &spec).map_err(|_| CurveError::BudgetExceeded)?;
        let coeffs = self.f.coeffs().iter().map(|c| embed.apply(c)).collect();
        let f = Polynomial::from_coeffs(&spec, coeffs);
        Ok(CurveLevel { m, spec, f, genus: self.genus, base_embed: embed })
    }

    /// `#C(F_{q^m})` by exhaustive x-enumeration plus the quadratic-residue
    /// table, plus the point at infinity.
    pub fn count_points(&self, m: usize, budget: u64) -> Result<u64, CurveError> {
        let level = self.level_checked(m, budget)?;
        Ok(level.count_affine_in_range(0, level.spec.order()) + 1)
    }

    /// All points of `C(F_{q^m})`, infinity first, affine points by
    /// coordinate code.
    pub fn points(&self, m: usize, budget: u64) -> Result<Vec<CurvePoint>, CurveError> {
        let level = self.level_checked(m, budget)?;
        let mut out = vec![CurvePoint::infinity(m)];
        out.extend(level.affine_points());
        Ok(out)
    }

    pub fn level_checked(&self, m: usize, budget: u64) -> Result<CurveLevel, CurveError> {
        let base = self.spec();
        let mut size: u64 = 1;
        for _ in 0..m {
            size = size
                .checked_mul(base.order())
                .filter(|&s| s <= budget)
                .ok_or(CurveError::BudgetExceeded)?;
        }
        self.level(m)
    }

    /// Counts `N_1 .. N_g` and the fitted L-polynomial.
    pub fn l_polynomial(&self, budget: u64) -> Result<LPolynomial, CurveError> {
        let g = self.genus;
        let mut counts = Vec::with_capacity(g);
        for m in 1..=g {
            counts.push(self.count_points(m, budget)?);
        }
        Ok(LPolynomial::from_counts(self.spec().order(), g, &counts)?)
    }
}

/// The curve over the level-`m` constant field, with `f`'s coefficients
/// embedded.
#[derive(Clone)]
pub struct CurveLevel {
    pub m: usize,
    pub spec: Arc<FieldSpec>,
    pub f: Polynomial,
    genus: usize,
    base_embed: EmbedMap,
}

impl CurveLevel {
    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn base_embed(&self) -> &EmbedMap {
        &self.base_embed
    }

    /// Is the point on the curve?
    pub fn on_curve(&self, p: &CurvePoint) -> bool {
        match &p.xy {
            None => true,
            Some((x, y)) => y.mul(y) == self.f.eval(x),
        }
    }

    /// Number of affine points with `x` code in `[lo, hi)`. Pure in its
    /// arguments, so ranges can be partitioned across workers and summed.
    pub fn count_affine_in_range(&self, lo: u64, hi: u64) -> u64 {
        let table = self.square_table();
        let mut n = 0u64;
        for code in lo..hi {
            let x = self.spec.from_code(code);
            let z = self.f.eval(&x);
            if z.is_zero() {
                n += 1;
            } else if table[(z.code() / 64) as usize] >> (z.code() % 64) & 1 == 1 {
                n += 2;
            }
        }
        n
    }

    /// Bitmap of nonzero squares, indexed by element code.
    fn square_table(&self) -> Vec<u64> {
        let q = self.spec.order();
        let mut bits = vec![0u64; ((q + 63) / 64) as usize];
        for code in 1..q {
            let y = self.spec.from_code(code);
            let s = y.mul(&y).code();
            bits[(s / 64) as usize] |= 1 << (s % 64);
        }
        bits
    }

    /// Affine points sorted by `(x, y)` code.
    pub fn affine_points(&self) -> Vec<CurvePoint> {
        let q = self.spec.order();
        // y^2 -> y lookup, sorted by square code
        let mut squares: Vec<(u64, u64)> = Vec::with_capacity(q as usize);
        for code in 0..q {
            let y = self.spec.from_code(code);
            squares.push((y.mul(&y).code(), code));
        }
        squares.sort_unstable();
        let mut out = Vec::new();
        for code in 0..q {
            let x = self.spec.from_code(code);
            let z = self.f.eval(&x).code();
            let start = squares.partition_point(|&(s, _)| s < z);
            let mut ys: Vec<u64> = squares[start..]
                .iter()
                .take_while(|&&(s, _)| s == z)
                .map(|&(_, y)| y)
                .collect();
            ys.sort_unstable();
            for y in ys {
                out.push(CurvePoint::affine(self.m, x.clone(), self.spec.from_code(y)));
            }
        }
        out
    }

    /// The base-field Frobenius `(x, y) -> (x^q, y^q)` on points.
    pub fn frobenius_point(&self, p: &CurvePoint) -> CurvePoint {
        let d = self.base_embed.from_spec().degree();
        match &p.xy {
            None => p.clone(),
            Some((x, y)) => CurvePoint::affine(p.level, x.frobenius(d), y.frobenius(d)),
        }
    }

    /// Length of the Frobenius orbit: the degree of the minimal field of
    /// definition of the point over the base field.
    pub fn frobenius_orbit_length(&self, p: &CurvePoint) -> usize {
        let mut q = self.frobenius_point(p);
        let mut n = 1;
        while q != *p {
            q = self.frobenius_point(&q);
            n += 1;
        }
        n
    }
}

/// A point of `C(F_{q^m})`; `xy = None` is the point at infinity.
#[derive(Clone, PartialEq, Eq)]
pub struct CurvePoint {
    pub level: usize,
    pub xy: Option<(FieldElement, FieldElement)>,
}

impl CurvePoint {
    pub fn infinity(level: usize) -> Self {
        CurvePoint { level, xy: None }
    }

    pub fn affine(level: usize, x: FieldElement, y: FieldElement) -> Self {
        CurvePoint { level, xy: Some((x, y)) }
    }

    pub fn is_infinity(&self) -> bool {
        self.xy.is_none()
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.xy {
            None => write!(f, "inf"),
            Some((x, y)) => write!(f, "({},{})", x.code(), y.code()),
        }
    }
}

impl fmt::Debug for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl PartialOrd for CurvePoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CurvePoint {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.xy, &other.xy) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some((x1, y1)), Some((x2, y2))) => (x1.code(), y1.code()).cmp(&(x2.code(), y2.code())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e33() -> HyperellipticCurve {
        let f3 = FieldSpec::prime(3).unwrap();
        HyperellipticCurve::new(Polynomial::from_ints(&f3, &[0, 1, 0, 1])).unwrap()
    }

    #[test]
    fn construction_validates() {
        let f3 = FieldSpec::prime(3).unwrap();
        let f2 = FieldSpec::prime(2).unwrap();
        assert_eq!(
            HyperellipticCurve::new(Polynomial::from_ints(&f2, &[0, 1, 0, 1])).unwrap_err(),
            CurveError::EvenCharacteristic
        );
        // x^2 (x - 1) is not squarefree
        assert_eq!(
            HyperellipticCurve::new(Polynomial::from_ints(&f3, &[0, 0, -1, 1])).unwrap_err(),
            CurveError::NotSquarefree
        );
        assert_eq!(
            HyperellipticCurve::new(Polynomial::from_ints(&f3, &[1, 1])).unwrap_err(),
            CurveError::GenusZero
        );
        assert_eq!(
            HyperellipticCurve::new(Polynomial::from_ints(&f3, &[0, 1, 0, 0, 1])).unwrap_err(),
            CurveError::BadDegree
        );
        assert_eq!(e33().genus(), 1);
    }

    #[test]
    fn point_counts_match_hand_enumeration() {
        let c = e33();
        // x=0 -> 1 point, x=1 -> f=2 non-residue, x=2 -> f=1 two points; +inf
        assert_eq!(c.count_points(1, 1 << 20).unwrap(), 4);
        assert_eq!(c.count_points(2, 1 << 20).unwrap(), 16);
        let f3 = FieldSpec::prime(3).unwrap();
        let g2 = HyperellipticCurve::new(Polynomial::from_ints(&f3, &[0, 1, 0, 0, 0, 1])).unwrap();
        assert_eq!(g2.count_points(1, 1 << 20).unwrap(), 4);
    }

    #[test]
    fn budget_is_enforced() {
        let c = e33();
        assert_eq!(c.count_points(20, 1 << 20).unwrap_err(), CurveError::BudgetExceeded);
    }

    #[test]
    fn point_enumeration_is_consistent_with_counting() {
        let c = e33();
        for m in 1..=3 {
            let pts = c.points(m, 1 << 20).unwrap();
            assert_eq!(pts.len() as u64, c.count_points(m, 1 << 20).unwrap());
            let level = c.level(m).unwrap();
            assert!(pts.iter().all(|p| level.on_curve(p)));
            let mut sorted = pts.clone();
            sorted.sort();
            assert_eq!(sorted, pts, "points come out sorted");
        }
    }

    #[test]
    fn range_counting_partitions() {
        let c = e33();
        let level = c.level(2).unwrap();
        let q = level.spec.order();
        let whole = level.count_affine_in_range(0, q);
        let split: u64 = (0..4)
            .map(|k| level.count_affine_in_range(k * q / 4, (k + 1) * q / 4))
            .sum();
        assert_eq!(whole, split);
    }

    #[test]
    fn frobenius_orbits_partition_points() {
        let c = e33();
        let level = c.level(2).unwrap();
        let pts = c.points(2, 1 << 20).unwrap();
        for p in &pts {
            assert!(level.on_curve(&level.frobenius_point(p)));
            let len = level.frobenius_orbit_length(p);
            assert!(len == 1 || len == 2);
        }
        // points fixed by Frobenius are exactly the level-1 points
        let fixed = pts.iter().filter(|p| level.frobenius_point(p) == **p).count();
        assert_eq!(fixed as u64, c.count_points(1, 1 << 20).unwrap());
    }
}

//! Structure probes for `J(F_{q^m})`: brute-force enumeration of Mumford
//! classes, exact element orders, the exponent of an r-primary part, and the
//! search for point pairs whose difference class has order supported on a
//! fixed prime set.

use alloc::vec::Vec;
use core::fmt;

use crate::curve::{CurveError, CurveLevel, CurvePoint, HyperellipticCurve};
use crate::mumford::MumfordDivisor;
use crate::poly::Polynomial;

/// The excluded prime set: torsion "of Σ'-power order" means every prime
/// divisor of the order lies in this set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaSpec {
    primes: Vec<u64>,
}

impl SigmaSpec {
    pub fn new(mut primes: Vec<u64>) -> Self {
        primes.sort_unstable();
        primes.dedup();
        SigmaSpec { primes }
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Does every prime factor of `n` lie in the set? (True for n = 1.)
    pub fn is_sigma_number(&self, n: u64) -> bool {
        factor_u64(n).iter().all(|(p, _)| self.primes.contains(p))
    }
}

impl fmt::Display for SigmaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.primes.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// Prime factorization by trial division up to 10^6 and Pollard rho beyond.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    if n <= 1 {
        return out;
    }
    let push = |p: u64, out: &mut Vec<(u64, u32)>, n: &mut u64| {
        let mut e = 0;
        while *n % p == 0 {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut out, &mut n);
    let mut d = 3u64;
    while d <= 1_000_000 && d.saturating_mul(d) <= n {
        push(d, &mut out, &mut n);
        d += 2;
    }
    if n > 1 {
        if is_prime(n) {
            out.push((n, 1));
        } else {
            let mut stack = alloc::vec![n];
            while let Some(m) = stack.pop() {
                if is_prime(m) {
                    match out.iter_mut().find(|(p, _)| *p == m) {
                        Some((_, e)) => *e += 1,
                        None => out.push((m, 1)),
                    }
                    continue;
                }
                let f = pollard_rho(m);
                stack.push(f);
                stack.push(m / f);
            }
        }
    }
    out.sort_unstable();
    out
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    acc
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    // deterministic Miller-Rabin for u64
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl CurveLevel {
    /// All reduced Mumford representatives over this level, sorted. The
    /// enumeration sweep is `O(q^2g)` and is guarded by `cap`.
    pub fn enumerate_jacobian(&self, cap: u64) -> Result<Vec<MumfordDivisor>, CurveError> {
        let q = self.spec.order();
        let g = self.genus();
        let mut sweep: u64 = 0;
        let mut out = Vec::new();
        for s in 0..=g {
            let us = q.checked_pow(s as u32).ok_or(CurveError::BudgetExceeded)?;
            sweep = sweep
                .checked_add(us.checked_mul(us).ok_or(CurveError::BudgetExceeded)?)
                .filter(|&t| t <= cap.max(1))
                .ok_or(CurveError::BudgetExceeded)?;
            for ucode in 0..us {
                let mut coeffs = Vec::with_capacity(s + 1);
                let mut c = ucode;
                for _ in 0..s {
                    coeffs.push(self.spec.from_code(c % q));
                    c /= q;
                }
                coeffs.push(self.spec.one());
                let u = Polynomial::from_coeffs(&self.spec, coeffs);
                for vcode in 0..us {
                    let mut vc = Vec::with_capacity(s);
                    let mut c = vcode;
                    for _ in 0..s {
                        vc.push(self.spec.from_code(c % q));
                        c /= q;
                    }
                    let v = Polynomial::from_coeffs(&self.spec, vc);
                    let diff = v.mul(&v).sub(&self.f);
                    if u.divides(&diff) {
                        out.push(
                            MumfordDivisor::new(self, u.clone(), v)
                                .expect("enumerated representative is valid"),
                        );
                    }
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Exact multiplicative order of a class, given the group order.
    pub fn class_order(&self, d: &MumfordDivisor, group_order: u64) -> Result<u64, CurveError> {
        if !self.cantor_mul(d, group_order as i128)?.is_identity() {
            return Err(CurveError::OrderMismatch);
        }
        let mut ord = group_order;
        for (r, _) in factor_u64(group_order) {
            while ord % r == 0 && self.cantor_mul(d, (ord / r) as i128)?.is_identity() {
                ord /= r;
            }
        }
        Ok(ord)
    }
}

/// Exponent of the `r`-primary part of `J(F_q)`.
pub fn p_primary_exponent(
    curve: &HyperellipticCurve,
    r: u64,
    point_budget: u64,
    group_cap: u64,
) -> Result<u64, CurveError> {
    let l = curve.l_polynomial(point_budget)?;
    let n = l.order() as u64;
    if n % r != 0 {
        return Ok(1);
    }
    let level = curve.level(1)?;
    let elements = level.enumerate_jacobian(group_cap)?;
    debug_assert_eq!(elements.len() as u64, n);
    let mut exp = 1u64;
    for d in &elements {
        let ord = level.class_order(d, n)?;
        let mut rpart = 1u64;
        let mut o = ord;
        while o % r == 0 {
            rpart *= r;
            o /= r;
        }
        exp = exp.max(rpart);
    }
    Ok(exp)
}

/// Outcome of the pair probe at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    /// Unordered pairs {P, Q}, P != Q, whose difference class is nontrivial
    /// torsion of Σ'-power order, in canonical point order.
    pub pairs: Vec<(CurvePoint, CurvePoint)>,
    /// Pairs with the identity difference class (P != Q). Witnesses of
    /// failure of off-diagonal injectivity; empty in genus >= 1.
    pub identity_pairs: Vec<(CurvePoint, CurvePoint)>,
    /// Number of points enumerated.
    pub point_count: usize,
    /// The Jacobian order at this level used for order computations.
    pub group_order: u64,
}

/// Searches all unordered pairs of `C(F_{q^m})`-points for difference
/// classes of Σ'-power order.
pub fn torsion_probe(
    curve: &HyperellipticCurve,
    m: usize,
    sigma: &SigmaSpec,
    point_budget: u64,
    group_cap: u64,
) -> Result<ProbeReport, CurveError> {
    let points = curve.points(m, point_budget)?;
    let level = curve.level(m)?;
    let l = curve.l_polynomial(point_budget)?;
    let group_order = l.order_at_level(m);
    if group_order <= 0 || group_order as u64 > group_cap {
        return Err(CurveError::BudgetExceeded);
    }
    let group_order = group_order as u64;
    let mut pairs = Vec::new();
    let mut identity_pairs = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = level.class_of_difference(&points[i], &points[j])?;
            if d.is_identity() {
                identity_pairs.push((points[i].clone(), points[j].clone()));
                continue;
            }
            let ord = level.class_order(&d, group_order)?;
            if sigma.is_sigma_number(ord) {
                pairs.push((points[i].clone(), points[j].clone()));
            }
        }
    }
    Ok(ProbeReport { pairs, identity_pairs, point_count: points.len(), group_order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::rng::DetRng;

    fn e33() -> HyperellipticCurve {
        let f3 = FieldSpec::prime(3).unwrap();
        HyperellipticCurve::new(Polynomial::from_ints(&f3, &[0, 1, 0, 1])).unwrap()
    }

    #[test]
    fn factoring_small_numbers() {
        assert_eq!(factor_u64(1), alloc::vec![]);
        assert_eq!(factor_u64(12), alloc::vec![(2, 2), (3, 1)]);
        assert_eq!(factor_u64(97), alloc::vec![(97, 1)]);
        assert_eq!(factor_u64(1_000_003 * 2), alloc::vec![(2, 1), (1_000_003, 1)]);
    }

    #[test]
    fn enumeration_matches_l_value() {
        let c = e33();
        let l = c.l_polynomial(1 << 20).unwrap();
        for m in 1..=2 {
            let level = c.level(m).unwrap();
            let elements = level.enumerate_jacobian(1 << 20).unwrap();
            assert_eq!(elements.len() as i128, l.order_at_level(m));
        }
        let f3 = FieldSpec::prime(3).unwrap();
        let g2 = HyperellipticCurve::new(Polynomial::from_ints(&f3, &[0, 1, 0, 0, 0, 1])).unwrap();
        let l2 = g2.l_polynomial(1 << 20).unwrap();
        let level = g2.level(1).unwrap();
        assert_eq!(level.enumerate_jacobian(1 << 20).unwrap().len() as i128, l2.order());
    }

    #[test]
    fn lagrange_annihilates_every_class(){
        let c = e33();
        let l = c.l_polynomial(1 << 20).unwrap();
        let level = c.level(2).unwrap();
        let n = l.order_at_level(2);
        let pts = c.points(2, 1 << 20).unwrap();
        let mut rng = DetRng::new(99);
        for _ in 0..20 {
            let a = &pts[rng.below(pts.len() as u64) as usize];
            let b = &pts[rng.below(pts.len() as u64) as usize];
            let d = level.class_of_difference(a, b).unwrap();
            assert!(level.cantor_mul(&d, n).unwrap().is_identity());
        }
    }

    #[test]
    fn class_orders_in_z4() {
        let c = e33();
        let level = c.level(1).unwrap();
        let spec = level.spec.clone();
        let id = MumfordDivisor::identity(&spec);
        assert_eq!(level.class_order(&id, 4).unwrap(), 1);
        let p0 = CurvePoint::affine(1, spec.zero(), spec.zero());
        let two_tors = level.class_of_point(&p0).unwrap();
        assert_eq!(level.class_order(&two_tors, 4).unwrap(), 2);
        let q = CurvePoint::affine(1, spec.from_int(2), spec.from_int(1));
        let dq = level.class_of_point(&q).unwrap();
        assert_eq!(level.class_order(&dq, 4).unwrap(), 4);
        // wrong group order is flagged
        assert_eq!(level.class_order(&dq, 3).unwrap_err(), CurveError::OrderMismatch);
    }

    #[test]
    fn primary_exponents() {
        let c = e33();
        assert_eq!(p_primary_exponent(&c, 3, 1 << 20, 1 << 17).unwrap(), 1);
        assert_eq!(p_primary_exponent(&c, 2, 1 << 20, 1 << 17).unwrap(), 4);
        assert_eq!(p_primary_exponent(&c, 7, 1 << 20, 1 << 17).unwrap(), 1);
    }

    #[test]
    fn probe_examples() {
        let c = e33();
        let empty = torsion_probe(&c, 1, &SigmaSpec::new(alloc::vec![3]), 1 << 20, 1 << 17).unwrap();
        assert!(empty.pairs.is_empty());
        assert!(empty.identity_pairs.is_empty());
        let all = torsion_probe(&c, 1, &SigmaSpec::new(alloc::vec![2]), 1 << 20, 1 << 17).unwrap();
        assert_eq!(all.pairs.len(), 6);
        // determinism across reruns
        let again = torsion_probe(&c, 1, &SigmaSpec::new(alloc::vec![2]), 1 << 20, 1 << 17).unwrap();
        assert_eq!(all, again);
    }
}

//! Finite-level counting identities and divisor-class computations: exact
//! residue-field counting by Mobius inversion (cross-checked against direct
//! orbit classification), zeta consistency tables, the divisor-class exact
//! sequence, and principal-divisor lattices.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::curve::{CurveError, CurvePoint, HyperellipticCurve};
use crate::field::FieldSpec;
use crate::func::Place;
use crate::jacobian::SigmaSpec;
use crate::lattice::{hermite_normal_form, invariant_factors_from_counts, kernel_basis};
use crate::mumford::MumfordDivisor;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CountingError {
    Curve(CurveError),
    Mismatch(String),
    BudgetExceeded,
    BadSite,
}

impl fmt::Display for CountingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountingError::Curve(e) => write!(f, "{e}"),
            CountingError::Mismatch(s) => write!(f, "count mismatch: {s}"),
            CountingError::BudgetExceeded => write!(f, "enumeration budget exceeded"),
            CountingError::BadSite => write!(f, "site does not belong to this curve model"),
        }
    }
}

impl From<CurveError> for CountingError {
    fn from(e: CurveError) -> Self {
        match e {
            CurveError::BudgetExceeded => CountingError::BudgetExceeded,
            other => CountingError::Curve(other),
        }
    }
}

/// A curve model the counting lab can work on: the projective line or an
/// odd-characteristic hyperelliptic curve.
#[derive(Clone, Debug)]
pub enum CurveHandle {
    Rational(Arc<FieldSpec>),
    Hyperelliptic(HyperellipticCurve),
}

impl CurveHandle {
    pub fn spec(&self) -> &Arc<FieldSpec> {
        match self {
            CurveHandle::Rational(s) => s,
            CurveHandle::Hyperelliptic(c) => c.spec(),
        }
    }

    /// `#X(F_{q^m})`.
    pub fn count_points(&self, m: usize, budget: u64) -> Result<u64, CountingError> {
        match self {
            CurveHandle::Rational(spec) => {
                let mut n: u64 = 1;
                for _ in 0..m {
                    n = n
                        .checked_mul(spec.order())
                        .filter(|&v| v <= budget)
                        .ok_or(CountingError::BudgetExceeded)?;
                }
                Ok(n + 1)
            }
            CurveHandle::Hyperelliptic(c) => Ok(c.count_points(m, budget)?),
        }
    }

    /// Number of points of `X(F_{q^N})` whose minimal field of definition is
    /// exactly `F_{q^N}`, classified directly by Frobenius orbit length.
    fn exact_count_direct(&self, n: usize, budget: u64) -> Result<u64, CountingError> {
        match self {
            CurveHandle::Rational(spec) => {
                let mut size: u64 = 1;
                for _ in 0..n {
                    size = size
                        .checked_mul(spec.order())
                        .filter(|&v| v <= budget)
                        .ok_or(CountingError::BudgetExceeded)?;
                }
                let level = FieldSpec::extension(spec.p(), spec.degree() * n)
                    .map_err(|_| CountingError::BudgetExceeded)?;
                let d = spec.degree();
                let mut count = 0u64;
                for x in level.elements() {
                    let mut y = x.frobenius(d);
                    let mut orbit = 1usize;
                    while y != x {
                        y = y.frobenius(d);
                        orbit += 1;
                    }
                    if orbit == n {
                        count += 1;
                    }
                }
                if n == 1 {
                    count += 1; // the point at infinity is rational
                }
                Ok(count)
            }
            CurveHandle::Hyperelliptic(c) => {
                let pts = c.points(n, budget)?;
                let level = c.level(n)?;
                let mut count = 0u64;
                for p in &pts {
                    if level.frobenius_orbit_length(p) == n {
                        count += 1;
                    }
                }
                Ok(count)
            }
        }
    }
}

fn mobius(n: u64) -> i64 {
    let f = crate::jacobian::factor_u64(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Exact-residue count: the Mobius sum over `d | N` of `mu(N/d) #X(F_{q^d})`,
/// asserted equal to the direct orbit classification before returning.
pub fn exact_residue_count(
    curve: &CurveHandle,
    n: usize,
    budget: u64,
) -> Result<u64, CountingError> {
    assert!(n >= 1);
    let mut sum: i128 = 0;
    for d in 1..=n {
        if n % d == 0 {
            let mu = mobius((n / d) as u64);
            if mu == 0 {
                continue;
            }
            let c = curve.count_points(d, budget)? as i128;
            sum += mu as i128 * c;
        }
    }
    let direct = curve.exact_count_direct(n, budget)? as i128;
    if sum != direct {
        return Err(CountingError::Mismatch(alloc::format!(
            "mobius sum {sum} != direct classification {direct} at N={n}"
        )));
    }
    Ok(sum as u64)
}

/// One row of the zeta-consistency table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyRow {
    pub m: usize,
    pub predicted: i128,
    pub counted: u64,
}

/// Per-level comparison of predicted vs enumerated counts; a mismatch is a
/// fatal arithmetic bug and comes back as an error.
pub fn lefschetz_consistency(
    curve: &CurveHandle,
    m_max: usize,
    budget: u64,
) -> Result<Vec<ConsistencyRow>, CountingError> {
    let mut rows = Vec::new();
    match curve {
        CurveHandle::Rational(spec) => {
            for m in 1..=m_max {
                let counted = curve.count_points(m, budget)?;
                let mut qm: i128 = 1;
                for _ in 0..m {
                    qm *= spec.order() as i128;
                }
                let predicted = qm + 1;
                if predicted != counted as i128 {
                    return Err(CountingError::Mismatch(alloc::format!(
                        "rational model: {predicted} != {counted} at m={m}"
                    )));
                }
                rows.push(ConsistencyRow { m, predicted, counted });
            }
        }
        CurveHandle::Hyperelliptic(c) => {
            let l = c.l_polynomial(budget)?;
            for m in 1..=m_max {
                let counted = curve.count_points(m, budget)?;
                let predicted = l.predicted_count(m);
                if predicted != counted as i128 {
                    return Err(CountingError::Mismatch(alloc::format!(
                        "zeta prediction {predicted} != count {counted} at m={m}"
                    )));
                }
                rows.push(ConsistencyRow { m, predicted, counted });
            }
        }
    }
    Ok(rows)
}

/// A place of the curve model used by the class-group computations: a place
/// of the line for the rational model, or a closed point of a hyperelliptic
/// curve given by a representative point (the Frobenius orbit of which is
/// the place).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurveSite {
    LinePlace(Place),
    Point(CurvePoint),
}

impl CurveSite {
    fn degree(&self, curve: &CurveHandle, budget: u64) -> Result<usize, CountingError> {
        match (self, curve) {
            (CurveSite::LinePlace(p), CurveHandle::Rational(_)) => Ok(p.degree()),
            (CurveSite::Point(p), CurveHandle::Hyperelliptic(c)) => {
                let level = c.level_checked(p.level, budget)?;
                if !level.on_curve(p) {
                    return Err(CountingError::BadSite);
                }
                Ok(level.frobenius_orbit_length(p))
            }
            _ => Err(CountingError::BadSite),
        }
    }
}

/// Report of the divisor-class exact-sequence computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSequenceReport {
    /// |J(F_q)| of the model (1 for the rational model).
    pub jacobian_order: u64,
    /// Order of the Σ'-torsion subgroup J(k){Σ'}.
    pub torsion_order: u64,
    /// Order of the measured image of degree-0 divisors supported off E.
    pub image_order: u64,
    /// Order of the quotient D/Pri (= image ∩ torsion).
    pub quotient_order: u64,
    /// Invariant factors of D/Pri, ascending.
    pub invariant_factors: Vec<u64>,
    /// Whether the measured class map was surjective onto J(F_q).
    pub class_map_surjective: bool,
    /// Degree cap used when generating divisor classes.
    pub generation_degree_cap: usize,
}

/// Computes the divisor-class sequence data by brute force over `J(F_q)`.
///
/// For the rational model the Jacobian is trivial and every degree-0 divisor
/// is principal, so the quotient is trivial whatever `E` and Σ' are. For a
/// hyperelliptic model the image subgroup is generated by classes of degree-0
/// divisors supported on places of degree up to `gen_cap` avoiding `E`.
pub fn divisor_class_sequence(
    curve: &CurveHandle,
    exceptional: &[CurveSite],
    sigma: &SigmaSpec,
    point_budget: u64,
    group_cap: u64,
    gen_cap: usize,
) -> Result<ClassSequenceReport, CountingError> {
    for site in exceptional {
        site.degree(curve, point_budget)?;
    }
    let c = match curve {
        CurveHandle::Rational(_) => {
            return Ok(ClassSequenceReport {
                jacobian_order: 1,
                torsion_order: 1,
                image_order: 1,
                quotient_order: 1,
                invariant_factors: Vec::new(),
                class_map_surjective: true,
                generation_degree_cap: gen_cap,
            });
        }
        CurveHandle::Hyperelliptic(c) => c,
    };
    let level1 = c.level(1)?;
    let elements = level1.enumerate_jacobian(group_cap)?;
    let n = elements.len() as u64;

    // classes of (place - deg(place) * inf) for places of degree <= gen_cap
    let mut site_classes: Vec<(usize, MumfordDivisor, bool)> = Vec::new(); // (degree, class, is_exceptional)
    let inf_exceptional = exceptional
        .iter()
        .any(|s| matches!(s, CurveSite::Point(p) if p.is_infinity()));
    for deg in 1..=gen_cap {
        let level = c.level_checked(deg, point_budget)?;
        let pts = c.points(deg, point_budget)?;
        let mut seen: Vec<CurvePoint> = Vec::new();
        for p in &pts {
            if p.is_infinity() {
                continue;
            }
            if level.frobenius_orbit_length(p) != deg {
                continue;
            }
            if seen.contains(p) {
                continue;
            }
            // collect the orbit and its class, descended to the base field
            let mut orbit = vec![p.clone()];
            let mut q = level.frobenius_point(p);
            while q != *p {
                orbit.push(q.clone());
                q = level.frobenius_point(&q);
            }
            seen.extend(orbit.iter().cloned());
            let mut acc = MumfordDivisor::identity(&level.spec);
            for pt in &orbit {
                let cl = level.class_of_point(pt)?;
                acc = level.cantor_add(&acc, &cl)?;
            }
            let descended = descend_class(c, &level, &acc)?;
            let is_exc = exceptional.iter().any(|s| match s {
                CurveSite::Point(e) => {
                    if e.level == deg {
                        orbit.contains(e)
                    } else if e.level == 1 && deg == 1 {
                        orbit.contains(e)
                    } else {
                        false
                    }
                }
                CurveSite::LinePlace(_) => false,
            });
            site_classes.push((deg, descended, is_exc));
        }
    }

    // generators of the image subgroup
    let mut generators: Vec<MumfordDivisor> = Vec::new();
    let free: Vec<&(usize, MumfordDivisor, bool)> =
        site_classes.iter().filter(|(_, _, exc)| !exc).collect();
    if !inf_exceptional {
        // place - deg * inf is itself supported off E
        for (_, cl, _) in &free {
            generators.push(cl.clone());
        }
    } else {
        // pair differences: deg_j * place_i - deg_i * place_j
        for i in 0..free.len() {
            for j in i + 1..free.len() {
                let (di, ci, _) = free[i];
                let (dj, cj, _) = free[j];
                let a = level1.cantor_mul(ci, *dj as i128)?;
                let b = level1.cantor_mul(cj, *di as i128)?;
                generators.push(level1.cantor_sub(&a, &b)?);
            }
        }
    }

    // subgroup closure
    let mut image: alloc::collections::BTreeSet<MumfordDivisor> =
        alloc::collections::BTreeSet::new();
    image.insert(MumfordDivisor::identity(&level1.spec));
    let mut frontier: Vec<MumfordDivisor> = vec![MumfordDivisor::identity(&level1.spec)];
    while let Some(x) = frontier.pop() {
        for g in &generators {
            let y = level1.cantor_add(&x, g)?;
            if image.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }

    // sigma-torsion subgroup of J(F_q)
    let mut torsion: Vec<MumfordDivisor> = Vec::new();
    for d in &elements {
        let ord = level1.class_order(d, n)?;
        if sigma.is_sigma_number(ord) {
            torsion.push(d.clone());
        }
    }

    let quotient: Vec<&MumfordDivisor> = torsion.iter().filter(|d| image.contains(d)).collect();
    let qn = quotient.len() as u64;
    let invariant_factors = invariant_factors_from_counts(qn, |k| {
        quotient
            .iter()
            .filter(|d| {
                level1
                    .cantor_mul(d, k as i128)
                    .map(|x| x.is_identity())
                    .unwrap_or(false)
            })
            .count() as u64
    });

    let report = ClassSequenceReport {
        jacobian_order: n,
        torsion_order: torsion.len() as u64,
        image_order: image.len() as u64,
        quotient_order: qn,
        invariant_factors,
        class_map_surjective: image.len() as u64 == n,
        generation_degree_cap: gen_cap,
    };
    // the quotient embeds in the torsion subgroup
    debug_assert_eq!(report.torsion_order % report.quotient_order, 0);
    Ok(report)
}

/// Pulls a Galois-stable Mumford class at level `m` back to the base field.
fn descend_class(
    curve: &HyperellipticCurve,
    level: &crate::curve::CurveLevel,
    class: &MumfordDivisor,
) -> Result<MumfordDivisor, CountingError> {
    let emb = level.base_embed();
    let base_level = curve.level(1)?;
    let pull = |poly: &crate::poly::Polynomial| -> Result<crate::poly::Polynomial, CountingError> {
        let mut coeffs = Vec::with_capacity(poly.coeffs().len());
        for c in poly.coeffs() {
            let b = emb
                .preimage(c)
                .ok_or_else(|| CountingError::Mismatch("class not Galois-stable".into()))?;
            coeffs.push(b);
        }
        Ok(crate::poly::Polynomial::from_coeffs(curve.spec(), coeffs))
    };
    let u = pull(class.u())?;
    let v = pull(class.v())?;
    MumfordDivisor::new(&base_level, u, v).map_err(CountingError::Curve)
}

/// Basis of the lattice `{(n_s) : sum n_s * s is principal}` in `Z^S`,
/// in Hermite normal form.
pub fn unit_image_lattice(
    curve: &CurveHandle,
    sites: &[CurveSite],
    point_budget: u64,
    group_cap: u64,
) -> Result<Vec<Vec<i64>>, CountingError> {
    assert!(!sites.is_empty());
    let degrees: Vec<i128> = sites
        .iter()
        .map(|s| s.degree(curve, point_budget).map(|d| d as i128))
        .collect::<Result<_, _>>()?;
    // degree-zero sublattice of Z^S
    let deg_kernel = kernel_basis(&[degrees.clone()]);
    match curve {
        CurveHandle::Rational(_) => {
            // on the line, degree zero is principal
            Ok(deg_kernel
                .into_iter()
                .map(|r| r.into_iter().map(|x| x as i64).collect())
                .collect())
        }
        CurveHandle::Hyperelliptic(c) => {
            let level1 = c.level(1)?;
            let elements = level1.enumerate_jacobian(group_cap)?;
            let n = elements.len() as u64;
            // class of each site as cl(site - deg * inf)
            let mut site_classes: Vec<MumfordDivisor> = Vec::new();
            for s in sites {
                let CurveSite::Point(p) = s else {
                    return Err(CountingError::BadSite);
                };
                let level = c.level_checked(p.level, point_budget)?;
                let mut orbit = vec![p.clone()];
                if !p.is_infinity() {
                    let mut q = level.frobenius_point(p);
                    while q != *p {
                        orbit.push(q.clone());
                        q = level.frobenius_point(&q);
                    }
                }
                let mut acc = MumfordDivisor::identity(&level.spec);
                for pt in &orbit {
                    let cl = level.class_of_point(pt)?;
                    acc = level.cantor_add(&acc, &cl)?;
                }
                let descended = if p.level == 1 {
                    acc
                } else {
                    descend_class(c, &level, &acc)?
                };
                site_classes.push(descended);
            }
            // exponent of J
            let mut exponent = 1u64;
            for d in &elements {
                let o = level1.class_order(d, n)?;
                exponent = lcm(exponent, o);
            }
            // kernel of Z^r -> J on the degree-zero basis
            let r = deg_kernel.len();
            let class_of_combo = |coeffs: &[i128]| -> Result<MumfordDivisor, CountingError> {
                let mut acc = MumfordDivisor::identity(&level1.spec);
                for (k, cl) in coeffs.iter().zip(&site_classes) {
                    let term = level1.cantor_mul(cl, *k)?;
                    acc = level1.cantor_add(&acc, &term)?;
                }
                Ok(acc)
            };
            let mut gens: Vec<Vec<i128>> = Vec::new();
            for (i, b) in deg_kernel.iter().enumerate() {
                let mut row = vec![0i128; r];
                row[i] = exponent as i128;
                gens.push(row);
                let _ = b;
            }
            // enumerate (Z/exponent)^r for the finite part of the kernel
            let mut total: u64 = 1;
            for _ in 0..r {
                total = total
                    .checked_mul(exponent)
                    .filter(|&t| t <= group_cap.max(1))
                    .ok_or(CountingError::BudgetExceeded)?;
            }
            for code in 0..total {
                let mut x = vec![0i128; r];
                let mut cc = code;
                for xi in x.iter_mut() {
                    *xi = (cc % exponent) as i128;
                    cc /= exponent;
                }
                if x.iter().all(|&v| v == 0) {
                    continue;
                }
                // combo in Z^S coordinates
                let combo = combine(&deg_kernel, &x);
                if class_of_combo(&combo)?.is_identity() {
                    gens.push(x);
                }
            }
            let lattice_in_b = hermite_normal_form(&gens);
            let mut rows: Vec<Vec<i128>> = lattice_in_b
                .iter()
                .map(|x| combine(&deg_kernel, x))
                .collect();
            rows = hermite_normal_form(&rows);
            // audit: every basis vector is principal (degree 0, trivial class)
            for row in &rows {
                let dot: i128 = row.iter().zip(&degrees).map(|(a, b)| a * b).sum();
                if dot != 0 || !class_of_combo(row)?.is_identity() {
                    return Err(CountingError::Mismatch("basis vector not principal".into()));
                }
            }
            Ok(rows
                .into_iter()
                .map(|r| r.into_iter().map(|x| x as i64).collect())
                .collect())
        }
    }
}

fn combine(basis: &[Vec<i128>], coeffs: &[i128]) -> Vec<i128> {
    let n = basis.first().map_or(0, |b| b.len());
    let mut out = vec![0i128; n];
    for (c, b) in coeffs.iter().zip(basis) {
        for (o, v) in out.iter_mut().zip(b) {
            *o += c * v;
        }
    }
    out
}

fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;

    fn p1_f2() -> CurveHandle {
        CurveHandle::Rational(FieldSpec::prime(2).unwrap())
    }

    fn e33() -> CurveHandle {
        let f3 = FieldSpec::prime(3).unwrap();
        CurveHandle::Hyperelliptic(
            HyperellipticCurve::new(Polynomial::from_ints(&f3, &[0, 1, 0, 1])).unwrap(),
        )
    }

    #[test]
    fn exact_residue_examples() {
        assert_eq!(exact_residue_count(&p1_f2(), 2, 1 << 20).unwrap(), 2);
        assert_eq!(exact_residue_count(&p1_f2(), 1, 1 << 20).unwrap(), 3);
        assert_eq!(exact_residue_count(&e33(), 2, 1 << 20).unwrap(), 12);
    }

    #[test]
    fn residue_counts_partition_the_points() {
        for curve in [p1_f2(), e33()] {
            for n in 1..=6usize {
                let mut total = 0u64;
                for d in 1..=n {
                    if n % d == 0 {
                        total += exact_residue_count(&curve, d, 1 << 22).unwrap();
                    }
                }
                assert_eq!(total, curve.count_points(n, 1 << 22).unwrap(), "N={n}");
            }
        }
    }

    #[test]
    fn lefschetz_tables() {
        let rows = lefschetz_consistency(&p1_f2(), 4, 1 << 20).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.predicted == r.counted as i128));
        let rows = lefschetz_consistency(&e33(), 4, 1 << 20).unwrap();
        assert_eq!(
            rows.iter().map(|r| r.counted).collect::<Vec<_>>(),
            vec![4, 16, 28, 64]
        );
        assert!(lefschetz_consistency(&e33(), 0, 1 << 20).unwrap().is_empty());
    }

    #[test]
    fn class_sequence_on_the_line_is_trivial() {
        let spec = FieldSpec::prime(3).unwrap();
        let curve = CurveHandle::Rational(spec.clone());
        let e = vec![CurveSite::LinePlace(Place::rational(&spec.zero()))];
        let r = divisor_class_sequence(&curve, &e, &SigmaSpec::new(vec![2]), 1 << 20, 1 << 17, 2)
            .unwrap();
        assert_eq!(r.invariant_factors, Vec::<u64>::new());
        assert_eq!(r.quotient_order, 1);
    }

    #[test]
    fn class_sequence_on_the_elliptic_curve() {
        let curve = e33();
        let r = divisor_class_sequence(&curve, &[], &SigmaSpec::new(vec![3]), 1 << 20, 1 << 17, 2)
            .unwrap();
        assert_eq!(r.jacobian_order, 4);
        assert_eq!(r.torsion_order, 1);
        assert_eq!(r.invariant_factors, Vec::<u64>::new());
        assert!(r.class_map_surjective);
        let r = divisor_class_sequence(&curve, &[], &SigmaSpec::new(vec![2]), 1 << 20, 1 << 17, 2)
            .unwrap();
        assert_eq!(r.torsion_order, 4);
        assert_eq!(r.quotient_order, 4);
        assert_eq!(r.invariant_factors, vec![4]);
        assert!(r.class_map_surjective);
    }

    #[test]
    fn lattice_on_the_line() {
        let spec = FieldSpec::prime(3).unwrap();
        let curve = CurveHandle::Rational(spec.clone());
        let s = vec![
            CurveSite::LinePlace(Place::rational(&spec.zero())),
            CurveSite::LinePlace(Place::infinity(&spec)),
        ];
        let basis = unit_image_lattice(&curve, &s, 1 << 20, 1 << 17).unwrap();
        assert_eq!(basis, vec![vec![1, -1]]);
        let single = vec![CurveSite::LinePlace(Place::rational(&spec.zero()))];
        assert!(unit_image_lattice(&curve, &single, 1 << 20, 1 << 17)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn lattice_on_the_elliptic_curve() {
        let curve = e33();
        let spec = FieldSpec::prime(3).unwrap();
        let s = vec![
            CurveSite::Point(CurvePoint::infinity(1)),
            CurveSite::Point(CurvePoint::affine(1, spec.from_int(2), spec.from_int(1))),
        ];
        let basis = unit_image_lattice(&curve, &s, 1 << 20, 1 << 17).unwrap();
        assert_eq!(basis, vec![vec![4, -4]]);
    }
}

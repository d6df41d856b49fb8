//! Univariate polynomials over a finite field, in canonical form (no
//! trailing zero coefficients; the zero polynomial has empty coefficient
//! vector and compares strictly below everything in degree).
//!
//! Degree-book arithmetic only: schoolbook multiplication is plenty at the
//! scale this crate works at. Beyond gcd/irreducibility/root finding this
//! module also carries a complete distinct-degree + equal-degree
//! factorization, which the divisor layer needs to discover the support of
//! div(f). Splitting elements are drawn from a deterministic sweep so
//! factorizations are reproducible run to run.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::field::{EmbedMap, FieldElement, FieldError, FieldSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyError {
    SpecMismatch,
    DegreeZero,
    DivisionByZero,
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::SpecMismatch => write!(f, "polynomials over different fields"),
            PolyError::DegreeZero => write!(f, "operation requires degree >= 1"),
            PolyError::DivisionByZero => write!(f, "division by the zero polynomial"),
        }
    }
}

#[derive(Clone)]
pub struct Polynomial {
    spec: Arc<FieldSpec>,
    coeffs: Vec<FieldElement>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        *self.spec == *other.spec && self.coeffs == other.coeffs
    }
}
impl Eq for Polynomial {}

impl PartialOrd for Polynomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Polynomial {
    /// Orders by degree, then coefficient codes from the top down; this is
    /// the integer encoding order used everywhere determinism matters.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.coeffs.len().cmp(&other.coeffs.len()) {
            Ordering::Equal => {}
            o => return o,
        }
        for (a, b) in self.coeffs.iter().rev().zip(other.coeffs.iter().rev()) {
            match a.code().cmp(&b.code()) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl core::hash::Hash for Polynomial {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        for c in &self.coeffs {
            c.code().hash(state);
        }
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", c.code())?,
                _ => {
                    if !c.is_one() {
                        write!(f, "{}*", c.code())?;
                    }
                    if i == 1 {
                        write!(f, "t")?;
                    } else {
                        write!(f, "t^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl Polynomial {
    pub fn zero(spec: &Arc<FieldSpec>) -> Self {
        Polynomial { spec: spec.clone(), coeffs: Vec::new() }
    }

    pub fn one(spec: &Arc<FieldSpec>) -> Self {
        Polynomial { spec: spec.clone(), coeffs: vec![spec.one()] }
    }

    pub fn constant(c: FieldElement) -> Self {
        if c.is_zero() {
            Polynomial { spec: c.spec().clone(), coeffs: Vec::new() }
        } else {
            Polynomial { spec: c.spec().clone(), coeffs: vec![c] }
        }
    }

    /// The coordinate `t`.
    pub fn x(spec: &Arc<FieldSpec>) -> Self {
        Polynomial { spec: spec.clone(), coeffs: vec![spec.zero(), spec.one()] }
    }

    pub fn from_coeffs(spec: &Arc<FieldSpec>, coeffs: Vec<FieldElement>) -> Self {
        let mut p = Polynomial { spec: spec.clone(), coeffs };
        p.trim();
        p
    }

    pub fn from_codes(spec: &Arc<FieldSpec>, codes: &[u64]) -> Self {
        let coeffs = codes.iter().map(|&c| spec.from_code(c)).collect();
        Self::from_coeffs(spec, coeffs)
    }

    pub fn from_ints(spec: &Arc<FieldSpec>, ints: &[i64]) -> Self {
        let coeffs = ints.iter().map(|&c| spec.from_int(c)).collect();
        Self::from_coeffs(spec, coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.spec.zero())
    }

    /// `None` is the zero polynomial's degree sentinel and sorts below all
    /// finite degrees.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading_coeff(&self) -> FieldElement {
        self.coeffs.last().cloned().unwrap_or_else(|| self.spec.zero())
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().map_or(false, |c| c.is_one())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        let inv = self.leading_coeff().inv().expect("nonzero leading coefficient");
        self.scale(&inv)
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        if c.is_zero() {
            return Self::zero(&self.spec);
        }
        let coeffs = self.coeffs.iter().map(|a| a.mul(c)).collect();
        Polynomial { spec: self.spec.clone(), coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(*self.spec == *other.spec, "spec mismatch");
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i).add(&other.coeff(i)));
        }
        Self::from_coeffs(&self.spec, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert!(*self.spec == *other.spec, "spec mismatch");
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeff(i).sub(&other.coeff(i)));
        }
        Self::from_coeffs(&self.spec, coeffs)
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.neg()).collect();
        Polynomial { spec: self.spec.clone(), coeffs }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert!(*self.spec == *other.spec, "spec mismatch");
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.spec);
        }
        let mut coeffs = vec![self.spec.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Self::from_coeffs(&self.spec, coeffs)
    }

    pub fn mul_xpow(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.spec.zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Polynomial { spec: self.spec.clone(), coeffs }
    }

    pub fn divrem(&self, div: &Self) -> Result<(Self, Self), PolyError> {
        if *self.spec != *div.spec {
            return Err(PolyError::SpecMismatch);
        }
        if div.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let dd = div.coeffs.len() - 1;
        let lead_inv = div.leading_coeff().inv().expect("nonzero");
        let mut rem = self.clone();
        let mut quot = vec![self.spec.zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.coeffs.len() > dd || (dd == 0 && !rem.is_zero()) {
            let shift = rem.coeffs.len() - 1 - dd;
            let c = rem.leading_coeff().mul(&lead_inv);
            quot[shift] = c.clone();
            for (j, b) in div.coeffs.iter().enumerate() {
                let idx = shift + j;
                rem.coeffs[idx] = rem.coeffs[idx].sub(&c.mul(b));
            }
            rem.trim();
            if rem.is_zero() {
                break;
            }
        }
        Ok((Self::from_coeffs(&self.spec, quot), rem))
    }

    pub fn rem(&self, m: &Self) -> Self {
        self.divrem(m).expect("valid modulus").1
    }

    /// Exact division; panics if the division has a remainder.
    pub fn div_exact(&self, div: &Self) -> Self {
        let (q, r) = self.divrem(div).expect("valid divisor");
        assert!(r.is_zero(), "division was not exact");
        q
    }

    pub fn divides(&self, other: &Self) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.divrem(self).map_or(false, |(_, r)| r.is_zero())
    }

    /// Monic greatest common divisor; `gcd(f, 0) = monic(f)`, `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Result<Self, PolyError> {
        if *self.spec != *other.spec {
            return Err(PolyError::SpecMismatch);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b.monic());
            a = b;
            b = r;
        }
        Ok(a.monic())
    }

    /// Extended gcd: returns `(g, s, t)` monic with `s*a + t*b = g`.
    pub fn extended_gcd(&self, other: &Self) -> (Self, Self, Self) {
        assert!(*self.spec == *other.spec, "spec mismatch");
        let spec = &self.spec;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(spec), Self::zero(spec));
        let (mut t0, mut t1) = (Self::zero(spec), Self::one(spec));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1).expect("nonzero divisor");
            (r0, r1) = (r1, r);
            (s0, s1) = (s1.clone(), s0.sub(&q.mul(&s1)));
            (t0, t1) = (t1.clone(), t0.sub(&q.mul(&t1)));
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let lc_inv = r0.leading_coeff().inv().expect("nonzero");
        (r0.scale(&lc_inv), s0.scale(&lc_inv), t0.scale(&lc_inv))
    }

    pub fn eval(&self, x: &FieldElement) -> FieldElement {
        let mut acc = x.spec().zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero(&self.spec);
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            let scalar = self.spec.from_int(i as i64);
            coeffs.push(c.mul(&scalar));
        }
        Self::from_coeffs(&self.spec, coeffs)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.spec);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn pow_mod(&self, mut e: u128, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = Self::one(&self.spec);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    /// Coefficient codes, low degree first (canonical serialized form).
    pub fn codes(&self) -> Vec<u64> {
        self.coeffs.iter().map(|c| c.code()).collect()
    }

    pub fn is_squarefree(&self) -> bool {
        if self.degree().map_or(true, |d| d == 0) {
            return true;
        }
        let deriv = self.derivative();
        if deriv.is_zero() {
            return false;
        }
        self.gcd(&deriv).expect("same spec").is_one()
    }

    /// `x^(q^k) mod self`, computed by iterated coefficient-Frobenius
    /// substitution (no large exponents).
    fn frob_power_mod(&self, k: usize) -> Self {
        let p = self.spec.p();
        let d = self.spec.degree();
        let x = Self::x(&self.spec).rem(self);
        let mut h = x;
        for _ in 0..(d * k) {
            // h(x)^p = h^sigma(x^p) where sigma is coefficient Frobenius
            let mut big = vec![self.spec.zero(); (h.coeffs.len().max(1) - 1) * p as usize + 1];
            for (i, c) in h.coeffs.iter().enumerate() {
                big[i * p as usize] = c.frobenius(1);
            }
            h = Self::from_coeffs(&self.spec, big).rem(self);
        }
        h
    }

    /// Rabin's irreducibility test over the coefficient field.
    pub fn is_irreducible(&self) -> Result<bool, PolyError> {
        let Some(deg) = self.degree() else {
            return Err(PolyError::DegreeZero);
        };
        if deg == 0 {
            return Err(PolyError::DegreeZero);
        }
        if deg == 1 {
            return Ok(true);
        }
        let f = self.monic();
        let x = Self::x(&self.spec).rem(&f);
        if f.frob_power_mod(deg) != x {
            return Ok(false);
        }
        let mut n = deg;
        let mut primes = Vec::new();
        let mut r = 2usize;
        while r * r <= n {
            if n % r == 0 {
                primes.push(r);
                while n % r == 0 {
                    n /= r;
                }
            }
            r += 1;
        }
        if n > 1 {
            primes.push(n);
        }
        for r in primes {
            let g = f.frob_power_mod(deg / r).sub(&x);
            if !f.gcd(&g).expect("same spec").is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// All roots in `target`, each once, in ascending code order.
    pub fn roots_in(&self, target: &Arc<FieldSpec>) -> Result<Vec<FieldElement>, PolyError> {
        if self.spec.p() != target.p() || target.degree() % self.spec.degree() != 0 {
            return Err(PolyError::SpecMismatch);
        }
        let lifted = if *self.spec == **target {
            self.clone()
        } else {
            let emb = embed_least_root(&self.spec, target).map_err(|_| PolyError::SpecMismatch)?;
            let coeffs = self.coeffs.iter().map(|c| emb.apply(c)).collect();
            Polynomial::from_coeffs(target, coeffs)
        };
        Ok(lifted.roots())
    }

    /// Roots in the coefficient field itself.
    pub fn roots(&self) -> Vec<FieldElement> {
        if self.is_zero() || self.is_constant() {
            return Vec::new();
        }
        let q = self.spec.order();
        if q <= (1 << 16) {
            let mut out = Vec::new();
            for a in self.spec.elements() {
                if self.eval(&a).is_zero() {
                    out.push(a);
                }
            }
            return out;
        }
        // split off the product of distinct linear factors: gcd(f, x^q - x)
        let f = self.monic();
        let xq = f.frob_power_mod(1);
        let lin = f.gcd(&xq.sub(&Self::x(&self.spec))).expect("same spec");
        let mut out = Vec::new();
        split_linear(&lin, &mut out);
        out.sort_by_key(|a| a.code());
        out
    }

    /// Monic irreducible factors with multiplicities, plus the leading
    /// coefficient: `self = lc * prod_i f_i^{e_i}`. Factors are sorted.
    pub fn factor(&self) -> (FieldElement, Vec<(Polynomial, usize)>) {
        assert!(!self.is_zero(), "cannot factor the zero polynomial");
        let lc = self.leading_coeff();
        let f = self.monic();
        let mut out: Vec<(Polynomial, usize)> = Vec::new();
        squarefree_decompose(&f, 1, &mut out);
        // out currently holds squarefree parts with multiplicities; refine each
        let mut factors: Vec<(Polynomial, usize)> = Vec::new();
        for (part, mult) in out {
            for irr in factor_squarefree(&part) {
                factors.push((irr, mult));
            }
        }
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        // merge duplicates (cannot arise from distinct squarefree parts, but be safe)
        let mut merged: Vec<(Polynomial, usize)> = Vec::new();
        for (f, e) in factors {
            if let Some(last) = merged.last_mut() {
                if last.0 == f {
                    last.1 += e;
                    continue;
                }
            }
            merged.push((f, e));
        }
        (lc, merged)
    }
}

/// Splits a product of distinct linear factors into its roots.
fn split_linear(f: &Polynomial, out: &mut Vec<FieldElement>) {
    match f.degree() {
        None | Some(0) => {}
        Some(1) => {
            // monic x + c -> root -c
            let root = f.coeff(0).neg().mul(&f.coeff(1).inv().expect("nonzero lead"));
            out.push(root);
        }
        Some(_) => {
            let spec = f.spec().clone();
            let q = spec.order() as u128;
            let p = spec.p();
            let mut salt = 0u64;
            loop {
                salt += 1;
                let g = if p == 2 {
                    // trace splitting: T(c*x) summed over F_2-Frobenius orbits
                    let cx = Polynomial::x(&spec).scale(&spec.from_code(salt % spec.order()));
                    let mut acc = cx.rem(f);
                    let mut term = cx.rem(f);
                    let bits = 64 - (q - 1).leading_zeros() as usize; // log2 q
                    for _ in 1..bits {
                        term = term.mul(&term).rem(f);
                        acc = acc.add(&term);
                    }
                    f.gcd(&acc).expect("same spec")
                } else {
                    let shift = Polynomial::from_coeffs(
                        f.spec(),
                        vec![spec.from_code(salt % spec.order()), spec.one()],
                    );
                    let t = shift.pow_mod((q - 1) / 2, f);
                    f.gcd(&t.sub(&Polynomial::one(&spec))).expect("same spec")
                };
                let dg = g.degree();
                if dg.map_or(false, |d| d >= 1) && dg < f.degree() {
                    let h = f.div_exact(&g);
                    split_linear(&g, out);
                    split_linear(&h, out);
                    return;
                }
            }
        }
    }
}

/// Squarefree decomposition in characteristic p, writing `(part, multiplicity)`
/// pairs with pairwise-coprime squarefree parts.
fn squarefree_decompose(f: &Polynomial, outer_mult: usize, out: &mut Vec<(Polynomial, usize)>) {
    if f.is_one() {
        return;
    }
    let p = f.spec().p() as usize;
    let deriv = f.derivative();
    if deriv.is_zero() {
        // f = g(x^p); take the p-th root and recurse
        let g = pth_root(f);
        squarefree_decompose(&g, outer_mult * p, out);
        return;
    }
    let mut c = f.gcd(&deriv).expect("same spec");
    let mut w = f.div_exact(&c);
    let mut i = 1usize;
    while !w.is_one() {
        let y = w.gcd(&c).expect("same spec");
        let z = w.div_exact(&y);
        if !z.is_one() {
            out.push((z, outer_mult * i));
        }
        w = y;
        c = c.div_exact(&w.gcd(&c).expect("same spec")); // c / y, with y = gcd(w, c)
        i += 1;
    }
    if !c.is_one() {
        let g = pth_root(&c);
        squarefree_decompose(&g, outer_mult * p, out);
    }
}

/// p-th root of a polynomial whose derivative vanishes (all exponents
/// divisible by p): coefficient roots via `c^(p^(d-1))`.
fn pth_root(f: &Polynomial) -> Polynomial {
    let p = f.spec().p() as usize;
    let d = f.spec().degree();
    let mut coeffs = Vec::new();
    for (i, c) in f.coeffs().iter().enumerate() {
        if i % p == 0 {
            coeffs.push(c.frobenius(d - 1));
        } else {
            debug_assert!(c.is_zero());
        }
    }
    Polynomial::from_coeffs(f.spec(), coeffs)
}

/// Factors a squarefree monic polynomial: distinct-degree then
/// equal-degree splitting with a deterministic sweep of splitting elements.
fn factor_squarefree(f: &Polynomial) -> Vec<Polynomial> {
    let mut out = Vec::new();
    if f.degree().map_or(true, |d| d == 0) {
        return out;
    }
    let spec = f.spec().clone();
    let mut rest = f.clone();
    let mut d = 1usize;
    while rest.degree().map_or(0, |x| x) >= 2 * d {
        let xqd = rest.frob_power_mod(d);
        let g = rest.gcd(&xqd.sub(&Polynomial::x(&spec).rem(&rest))).expect("same spec");
        if g.degree().map_or(false, |x| x >= 1) {
            equal_degree_split(&g, d, &mut out);
            rest = rest.div_exact(&g);
        }
        d += 1;
    }
    if rest.degree().map_or(false, |x| x >= 1) {
        out.push(rest.monic());
    }
    out
}

/// Cantor–Zassenhaus equal-degree splitting of a product of distinct
/// irreducibles, all of degree `d`.
fn equal_degree_split(f: &Polynomial, d: usize, out: &mut Vec<Polynomial>) {
    let deg = f.degree().unwrap_or(0);
    if deg == 0 {
        return;
    }
    if deg == d {
        out.push(f.monic());
        return;
    }
    let spec = f.spec().clone();
    let p = spec.p();
    let q = spec.order();
    let mut attempt = 0u64;
    loop {
        attempt += 1;
        // deterministic sweep of nonconstant candidates of degree < 2d
        // (codes >= q decode to degree >= 1)
        let h = poly_from_global_code(&spec, q.saturating_add(attempt), 2 * d);
        let g = if p == 2 {
            let m = spec.degree() * d; // F_2-dimension of F_{q^d}
            let mut acc = h.rem(f);
            let mut term = h.rem(f);
            for _ in 1..m {
                term = term.mul(&term).rem(f);
                acc = acc.add(&term);
            }
            f.gcd(&acc).expect("same spec")
        } else {
            // h^((q^d - 1)/2) = N(h)^((q-1)/2) with N the degree-d norm,
            // computed by Frobenius steps so the exponent stays in range
            let mut norm = h.rem(f);
            let mut power = h.rem(f);
            for _ in 1..d {
                power = qth_power_mod(&power, f);
                norm = norm.mul(&power).rem(f);
            }
            let t = norm.pow_mod(((q - 1) / 2) as u128, f);
            f.gcd(&t.sub(&Polynomial::one(&spec))).expect("same spec")
        };
        let dg = g.degree();
        if dg.map_or(false, |x| x >= 1) && dg < f.degree() {
            let rest = f.div_exact(&g);
            equal_degree_split(&g, d, out);
            equal_degree_split(&rest, d, out);
            return;
        }
    }
}

/// `h^q mod f` by coefficient-Frobenius substitution steps.
fn qth_power_mod(h: &Polynomial, f: &Polynomial) -> Polynomial {
    let spec = f.spec();
    let p = spec.p();
    let mut acc = h.clone();
    for _ in 0..spec.degree() {
        let mut big = vec![spec.zero(); (acc.coeffs().len().max(1) - 1) * p as usize + 1];
        for (i, c) in acc.coeffs().iter().enumerate() {
            big[i * p as usize] = c.frobenius(1);
        }
        acc = Polynomial::from_coeffs(spec, big).rem(f);
    }
    acc
}

/// Deterministic enumeration of polynomials of degree < `max_deg` by code.
fn poly_from_global_code(spec: &Arc<FieldSpec>, code: u64, max_deg: usize) -> Polynomial {
    let q = spec.order();
    let mut c = code;
    let mut coeffs = Vec::new();
    for _ in 0..max_deg {
        coeffs.push(spec.from_code(c % q));
        c /= q;
        if c == 0 {
            break;
        }
    }
    Polynomial::from_coeffs(spec, coeffs)
}

/// All monic irreducibles of degree `d`, ascending in the integer encoding.
pub fn irreducibles(spec: &Arc<FieldSpec>, d: usize) -> Vec<Polynomial> {
    assert!(d >= 1, "degree must be >= 1");
    let q = spec.order();
    let mut count: u128 = 1;
    for _ in 0..d {
        count *= q as u128;
    }
    let mut out = Vec::new();
    for code in 0..count {
        let mut c = code;
        let mut coeffs = Vec::with_capacity(d + 1);
        for _ in 0..d {
            coeffs.push(spec.from_code((c % q as u128) as u64));
            c /= q as u128;
        }
        coeffs.push(spec.one());
        let f = Polynomial::from_coeffs(spec, coeffs);
        if d == 1 || f.is_irreducible().unwrap_or(false) {
            out.push(f);
        }
    }
    out
}

/// The canonical embedding `F_{p^a} -> F_{p^b}`: the source generator goes to
/// the least root (by code) of the source modulus in the target field.
pub fn embed_least_root(
    from: &Arc<FieldSpec>,
    to: &Arc<FieldSpec>,
) -> Result<EmbedMap, FieldError> {
    if from.p() != to.p() || to.degree() % from.degree() != 0 {
        return Err(FieldError::NoEmbedding);
    }
    if **from == **to {
        return Ok(EmbedMap::identity(from));
    }
    if from.degree() == 1 {
        return EmbedMap::from_root(from, to, to.zero());
    }
    let modulus = Polynomial::from_codes(to, from.modulus());
    let mut roots = modulus.roots();
    roots.sort_by_key(|r| r.code());
    let root = roots.into_iter().next().ok_or(FieldError::NoEmbedding)?;
    EmbedMap::from_root(from, to, root)
}

//! Prime fields `F_p` and extension fields `F_{p^d}` with exact arithmetic.
//!
//! An extension field is represented as `F_p[x]/(modulus)` where the modulus
//! is the least monic irreducible of the right degree in the fixed integer
//! encoding (coefficients read as base-`p` digits, high degree most
//! significant). Elements are coordinate vectors in the power basis of the
//! modulus root. Keeping the modulus choice deterministic makes serialized
//! elements portable between runs.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    NotPrime(u64),
    ZeroDegree,
    ReducibleModulus,
    NotMonic,
    ZeroInverse,
    SpecMismatch,
    FieldTooLarge,
    NoEmbedding,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::NotPrime(p) => write!(f, "{p} is not prime"),
            FieldError::ZeroDegree => write!(f, "extension degree must be >= 1"),
            FieldError::ReducibleModulus => write!(f, "modulus is reducible"),
            FieldError::NotMonic => write!(f, "modulus must be monic"),
            FieldError::ZeroInverse => write!(f, "zero has no inverse"),
            FieldError::SpecMismatch => write!(f, "operands belong to different fields"),
            FieldError::FieldTooLarge => write!(f, "field order does not fit in 64 bits"),
            FieldError::NoEmbedding => write!(f, "no embedding between these fields"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut k = 3u64;
    while k.checked_mul(k).map_or(false, |kk| kk <= n) {
        if n % k == 0 {
            return false;
        }
        k += 2;
    }
    true
}

/// Description of a finite field `F_{p^d}`.
///
/// Two specs are interchangeable iff `(p, d, modulus)` agree; the cached
/// reduction rows are derived data and excluded from equality.
pub struct FieldSpec {
    p: u64,
    d: usize,
    modulus: Vec<u64>,
    /// `x^(d+i) mod modulus` for `i in 0..d-1`, each row of length `d`.
    reduce: Vec<Vec<u64>>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldSpec(p={}, d={}, modulus={:?})", self.p, self.d, self.modulus)
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.d == other.d && self.modulus == other.modulus
    }
}
impl Eq for FieldSpec {}

// --- raw polynomial helpers over F_p (coefficient vectors, low degree first) ---

fn pp_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn pp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            let t = (ai as u128 * bj as u128 + out[i + j] as u128) % p as u128;
            out[i + j] = t as u64;
        }
    }
    pp_trim(&mut out);
    out
}

/// Remainder of `a` modulo monic `m`.
fn pp_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    debug_assert!(*m.last().unwrap() == 1);
    let mut r: Vec<u64> = a.to_vec();
    pp_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (j, &mj) in m.iter().enumerate().take(dm) {
                let sub = (lead as u128 * mj as u128) % p as u128;
                let idx = shift + j;
                r[idx] = ((r[idx] as u128 + p as u128 - sub) % p as u128) as u64;
            }
        }
        r.pop();
        pp_trim(&mut r);
    }
    r
}

fn pp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x: Vec<u64> = a.to_vec();
    let mut y: Vec<u64> = b.to_vec();
    pp_trim(&mut x);
    pp_trim(&mut y);
    while !y.is_empty() {
        // make y monic before reducing
        let lead = *y.last().unwrap();
        if lead != 1 {
            let inv = mod_inv(lead, p);
            for c in y.iter_mut() {
                *c = (*c as u128 * inv as u128 % p as u128) as u64;
            }
        }
        let r = pp_rem(&x, &y, p);
        x = y;
        y = r;
    }
    if let Some(&lead) = x.last() {
        if lead != 1 {
            let inv = mod_inv(lead, p);
            for c in x.iter_mut() {
                *c = (*c as u128 * inv as u128 % p as u128) as u64;
            }
        }
    }
    x
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // extended Euclid in Z
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "non-invertible element");
    (((t % p as i128) + p as i128) % p as i128) as u64
}

/// `h(x^p) mod m` for `h` over `F_p`; uses the Frobenius identity
/// `h(x)^p = h(x^p)`.
fn pp_frob_step(h: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut big = vec![0u64; (h.len().max(1) - 1) * p as usize + 1];
    for (i, &c) in h.iter().enumerate() {
        big[i * p as usize] = c;
    }
    pp_rem(&big, m, p)
}

/// Rabin irreducibility test for a monic polynomial over `F_p`.
fn pp_is_irreducible(m: &[u64], p: u64) -> bool {
    let d = m.len() - 1;
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    // x^(p^k) mod m for k = 1..d
    let mut frob = pp_rem(&x, m, p);
    let mut frob_powers: Vec<Vec<u64>> = Vec::with_capacity(d);
    for _ in 0..d {
        frob = pp_frob_step(&frob, m, p);
        frob_powers.push(frob.clone());
    }
    // x^(p^d) must equal x
    let x_red = pp_rem(&x, m, p);
    if frob_powers[d - 1] != x_red {
        return false;
    }
    // gcd(x^(p^(d/r)) - x, m) must be 1 for every prime r | d
    let mut n = d;
    let mut r = 2;
    let mut primes = Vec::new();
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
        let k = d / r;
        let mut g: Vec<u64> = frob_powers[k - 1].clone();
        // subtract x
        while g.len() < 2 {
            g.push(0);
        }
        g[1] = (g[1] + p - 1) % p;
        pp_trim(&mut g);
        let gc = pp_gcd(&g, m, p);
        if gc.len() != 1 {
            return false;
        }
    }
    true
}

impl FieldSpec {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Arc<Self>, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Arc::new(FieldSpec { p, d: 1, modulus: vec![0, 1], reduce: Vec::new() }))
    }

    /// `F_{p^d}` with the least monic irreducible modulus of degree `d`.
    pub fn extension(p: u64, d: usize) -> Result<Arc<Self>, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if d == 0 {
            return Err(FieldError::ZeroDegree);
        }
        if d == 1 {
            return Self::prime(p);
        }
        let mut order: u64 = 1;
        for _ in 0..d {
            order = order.checked_mul(p).ok_or(FieldError::FieldTooLarge)?;
        }
        // enumerate low coefficients as base-p digits, ascending integer code
        let mut code = 0u64;
        loop {
            if code >= order {
                // every degree has at least one irreducible; unreachable
                return Err(FieldError::ReducibleModulus);
            }
            let mut m = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                m.push(c % p);
                c /= p;
            }
            m.push(1);
            if pp_is_irreducible(&m, p) {
                return Self::with_modulus(p, m);
            }
            code += 1;
        }
    }

    /// Builds a spec from an explicit monic irreducible modulus over `F_p`.
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Arc<Self>, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if modulus.len() < 2 {
            return Err(FieldError::ZeroDegree);
        }
        if *modulus.last().unwrap() != 1 {
            return Err(FieldError::NotMonic);
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(FieldError::NotMonic);
        }
        let d = modulus.len() - 1;
        if d > 1 && !pp_is_irreducible(&modulus, p) {
            return Err(FieldError::ReducibleModulus);
        }
        let mut order: u64 = 1;
        for _ in 0..d {
            order = order.checked_mul(p).ok_or(FieldError::FieldTooLarge)?;
        }
        // precompute x^(d+i) mod modulus
        let mut reduce = Vec::with_capacity(d.saturating_sub(1));
        if d > 1 {
            let mut row = vec![0u64; d]; // x^d mod m = -low part
            for i in 0..d {
                row[i] = (p - modulus[i]) % p;
            }
            reduce.push(row.clone());
            for _ in 1..d - 1 {
                // multiply previous row by x and reduce
                let mut next = vec![0u64; d];
                let carry = row[d - 1];
                for i in (1..d).rev() {
                    next[i] = row[i - 1];
                }
                if carry != 0 {
                    for i in 0..d {
                        let t = (carry as u128 * reduce[0][i] as u128 + next[i] as u128)
                            % p as u128;
                        next[i] = t as u64;
                    }
                }
                reduce.push(next.clone());
                row = next;
            }
        }
        Ok(Arc::new(FieldSpec { p, d, modulus, reduce }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    /// Field order `p^d`.
    pub fn order(&self) -> u64 {
        let mut n = 1u64;
        for _ in 0..self.d {
            n *= self.p;
        }
        n
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(self: &Arc<Self>) -> FieldElement {
        FieldElement { spec: self.clone(), coords: vec![0; self.d] }
    }

    pub fn one(self: &Arc<Self>) -> FieldElement {
        self.from_code(1)
    }

    /// Element with the given integer code (base-`p` digit vector).
    pub fn from_code(self: &Arc<Self>, code: u64) -> FieldElement {
        debug_assert!(code < self.order());
        let mut coords = Vec::with_capacity(self.d);
        let mut c = code;
        for _ in 0..self.d {
            coords.push(c % self.p);
            c /= self.p;
        }
        FieldElement { spec: self.clone(), coords }
    }

    /// Image of the integer `n` under the canonical map `Z -> F_{p^d}`.
    pub fn from_int(self: &Arc<Self>, n: i64) -> FieldElement {
        let p = self.p as i64;
        let r = ((n % p) + p) % p;
        self.from_code(r as u64)
    }

    pub fn element(self: &Arc<Self>, coords: Vec<u64>) -> Result<FieldElement, FieldError> {
        if coords.len() != self.d || coords.iter().any(|&c| c >= self.p) {
            return Err(FieldError::SpecMismatch);
        }
        Ok(FieldElement { spec: self.clone(), coords })
    }

    /// The residue class of `x`, i.e. the root of the modulus (zero when d = 1).
    pub fn generator(self: &Arc<Self>) -> FieldElement {
        if self.d == 1 {
            self.zero()
        } else {
            self.from_code(self.p)
        }
    }

    /// All elements in ascending code order.
    pub fn elements(self: &Arc<Self>) -> impl Iterator<Item = FieldElement> + '_ {
        let spec = self.clone();
        (0..self.order()).map(move |c| spec.from_code(c))
    }
}

/// An element of `F_{p^d}`, as a coordinate vector in the modulus basis.
#[derive(Clone)]
pub struct FieldElement {
    spec: Arc<FieldSpec>,
    coords: Vec<u64>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.spec, &other.spec) || self.spec == other.spec)
            && self.coords == other.coords
    }
}
impl Eq for FieldElement {}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.code().cmp(&other.code())
    }
}

impl core::hash::Hash for FieldElement {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl FieldElement {
    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    /// Integer code: coordinates read as base-`p` digits.
    pub fn code(&self) -> u64 {
        let p = self.spec.p;
        let mut c = 0u64;
        for &x in self.coords.iter().rev() {
            c = c * p + x;
        }
        c
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.code() == 1
    }

    fn check_spec(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.spec, &other.spec) || self.spec == other.spec,
            "field spec mismatch"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_spec(other);
        let p = self.spec.p;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| (a + b) % p)
            .collect();
        FieldElement { spec: self.spec.clone(), coords }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_spec(other);
        let p = self.spec.p;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| (a + p - b) % p)
            .collect();
        FieldElement { spec: self.spec.clone(), coords }
    }

    pub fn neg(&self) -> Self {
        let p = self.spec.p;
        let coords = self.coords.iter().map(|&a| (p - a) % p).collect();
        FieldElement { spec: self.spec.clone(), coords }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_spec(other);
        let p = self.spec.p;
        let d = self.spec.d;
        if d == 1 {
            let v = (self.coords[0] as u128 * other.coords[0] as u128 % p as u128) as u64;
            return FieldElement { spec: self.spec.clone(), coords: vec![v] };
        }
        let mut conv = vec![0u64; 2 * d - 1];
        for (i, &a) in self.coords.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coords.iter().enumerate() {
                let t = (a as u128 * b as u128 + conv[i + j] as u128) % p as u128;
                conv[i + j] = t as u64;
            }
        }
        let mut coords = conv[..d].to_vec();
        for i in 0..d - 1 {
            let c = conv[d + i];
            if c == 0 {
                continue;
            }
            let row = &self.spec.reduce[i];
            for k in 0..d {
                let t = (c as u128 * row[k] as u128 + coords[k] as u128) % p as u128;
                coords[k] = t as u64;
            }
        }
        FieldElement { spec: self.spec.clone(), coords }
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        let p = self.spec.p;
        if self.spec.d == 1 {
            return Ok(FieldElement {
                spec: self.spec.clone(),
                coords: vec![mod_inv(self.coords[0], p)],
            });
        }
        // extended Euclid against the modulus
        let mut r0: Vec<u64> = self.spec.modulus.clone();
        let mut r1: Vec<u64> = self.coords.clone();
        pp_trim(&mut r1);
        let mut s0: Vec<u64> = Vec::new();
        let mut s1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            // divide r0 by r1
            let lead = *r1.last().unwrap();
            let lead_inv = mod_inv(lead, p);
            let mut q = vec![0u64; r0.len().saturating_sub(r1.len()) + 1];
            let mut rem = r0.clone();
            while rem.len() >= r1.len() && !rem.is_empty() {
                let c = (*rem.last().unwrap() as u128 * lead_inv as u128 % p as u128) as u64;
                let shift = rem.len() - r1.len();
                if c != 0 {
                    q[shift] = c;
                    for (j, &bj) in r1.iter().enumerate() {
                        let sub = (c as u128 * bj as u128) % p as u128;
                        rem[shift + j] =
                            ((rem[shift + j] as u128 + p as u128 - sub) % p as u128) as u64;
                    }
                }
                rem.pop();
                pp_trim(&mut rem);
            }
            pp_trim(&mut q);
            // s2 = s0 - q*s1
            let qs1 = pp_mul(&q, &s1, p);
            let n = s0.len().max(qs1.len());
            let mut s2 = vec![0u64; n];
            for i in 0..n {
                let a = *s0.get(i).unwrap_or(&0);
                let b = *qs1.get(i).unwrap_or(&0);
                s2[i] = (a + p - b) % p;
            }
            pp_trim(&mut s2);
            r0 = r1;
            r1 = rem;
            s0 = s1;
            s1 = s2;
        }
        // r0 is the gcd, a nonzero constant since the modulus is irreducible
        let c = r0[0];
        let c_inv = mod_inv(c, p);
        let mut coords = vec![0u64; self.spec.d];
        for (i, &v) in s0.iter().enumerate() {
            coords[i] = (v as u128 * c_inv as u128 % p as u128) as u64;
        }
        Ok(FieldElement { spec: self.spec.clone(), coords })
    }

    pub fn pow(&self, mut e: u128) -> Self {
        let mut base = self.clone();
        let mut acc = self.spec.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// `a^(p^i)`, the `i`-fold Frobenius iterate.
    pub fn frobenius(&self, i: usize) -> Self {
        let d = self.spec.d;
        let k = i % d;
        if k == 0 {
            return self.clone();
        }
        let mut e: u128 = 1;
        for _ in 0..k {
            e *= self.spec.p as u128;
        }
        self.pow(e)
    }

    /// Multiplicative order (element must be nonzero).
    pub fn multiplicative_order(&self) -> u64 {
        assert!(!self.is_zero());
        let n = self.spec.order() - 1;
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
            while ord % r == 0 && self.pow((ord / r) as u128).is_one() {
                ord /= r;
            }
        }
        ord
    }
}

impl<'a> core::ops::Add for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: Self) -> FieldElement {
        FieldElement::add(self, rhs)
    }
}
impl<'a> core::ops::Sub for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: Self) -> FieldElement {
        FieldElement::sub(self, rhs)
    }
}
impl<'a> core::ops::Mul for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: Self) -> FieldElement {
        FieldElement::mul(self, rhs)
    }
}
impl<'a> core::ops::Neg for &'a FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::neg(self)
    }
}

/// An embedding `F_{p^a} -> F_{p^b}` (for `a | b`), determined by sending the
/// source generator to a chosen root of the source modulus.
#[derive(Clone, Debug)]
pub struct EmbedMap {
    from: Arc<FieldSpec>,
    to: Arc<FieldSpec>,
    /// powers of the root image: gen^0, gen^1, ..., gen^(a-1)
    gen_powers: Vec<FieldElement>,
}

impl EmbedMap {
    /// Identity embedding.
    pub fn identity(spec: &Arc<FieldSpec>) -> Self {
        let gen = spec.generator();
        let mut gen_powers = Vec::with_capacity(spec.d);
        let mut acc = spec.one();
        for _ in 0..spec.d {
            gen_powers.push(acc.clone());
            acc = acc.mul(&gen);
        }
        EmbedMap { from: spec.clone(), to: spec.clone(), gen_powers }
    }

    /// Embedding built from an explicit root of the source modulus.
    pub fn from_root(
        from: &Arc<FieldSpec>,
        to: &Arc<FieldSpec>,
        root: FieldElement,
    ) -> Result<Self, FieldError> {
        if from.p != to.p || to.d % from.d != 0 {
            return Err(FieldError::NoEmbedding);
        }
        let mut gen_powers = Vec::with_capacity(from.d);
        let mut acc = to.one();
        for _ in 0..from.d {
            gen_powers.push(acc.clone());
            acc = acc.mul(&root);
        }
        Ok(EmbedMap { from: from.clone(), to: to.clone(), gen_powers })
    }

    pub fn from_spec(&self) -> &Arc<FieldSpec> {
        &self.from
    }

    pub fn to_spec(&self) -> &Arc<FieldSpec> {
        &self.to
    }

    pub fn root_image(&self) -> FieldElement {
        if self.from.d == 1 {
            self.to.zero()
        } else {
            self.gen_powers[1].clone()
        }
    }

    pub fn apply(&self, a: &FieldElement) -> FieldElement {
        assert!(**a.spec() == *self.from, "embed: element not in source field");
        let mut acc = self.to.zero();
        for (i, &c) in a.coords.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let term = self.gen_powers[i].clone();
            let scalar = self.to.from_code(c); // prime subfield constant
            acc = acc.add(&scalar.mul(&term));
        }
        acc
    }

    /// Pull an element back along the embedding, if it lies in the image.
    pub fn preimage(&self, b: &FieldElement) -> Option<FieldElement> {
        assert!(**b.spec() == *self.to, "preimage: element not in target field");
        // solve the F_p-linear system: sum_i x_i * gen_powers[i] = b
        let p = self.to.p;
        let rows = self.to.d;
        let cols = self.from.d;
        let mut m = vec![vec![0u64; cols + 1]; rows];
        for (j, pow) in self.gen_powers.iter().enumerate() {
            for i in 0..rows {
                m[i][j] = pow.coords[i];
            }
        }
        for i in 0..rows {
            m[i][cols] = b.coords[i];
        }
        // Gaussian elimination over F_p
        let mut pivot_row = 0usize;
        let mut pivots = Vec::new();
        for col in 0..cols {
            let mut sel = None;
            for r in pivot_row..rows {
                if m[r][col] != 0 {
                    sel = Some(r);
                    break;
                }
            }
            let Some(sel) = sel else { continue };
            m.swap(pivot_row, sel);
            let inv = mod_inv(m[pivot_row][col], p);
            for v in m[pivot_row].iter_mut() {
                *v = (*v as u128 * inv as u128 % p as u128) as u64;
            }
            for r in 0..rows {
                if r != pivot_row && m[r][col] != 0 {
                    let f = m[r][col];
                    for c2 in 0..=cols {
                        let sub = (f as u128 * m[pivot_row][c2] as u128) % p as u128;
                        m[r][c2] = ((m[r][c2] as u128 + p as u128 - sub) % p as u128) as u64;
                    }
                }
            }
            pivots.push((pivot_row, col));
            pivot_row += 1;
        }
        // consistency: zero rows must have zero rhs
        for r in pivot_row..rows {
            if m[r][cols] != 0 {
                return None;
            }
        }
        let mut coords = vec![0u64; cols];
        for &(r, c) in &pivots {
            coords[c] = m[r][cols];
        }
        Some(FieldElement { spec: self.from.clone(), coords })
    }

    /// Composite embedding `second . first`.
    pub fn compose(first: &EmbedMap, second: &EmbedMap) -> EmbedMap {
        assert!(*first.to == *second.from, "embed composition mismatch");
        let root = second.apply(&first.root_image());
        if first.from.d == 1 {
            EmbedMap {
                from: first.from.clone(),
                to: second.to.clone(),
                gen_powers: vec![second.to.one()],
            }
        } else {
            EmbedMap::from_root(&first.from, &second.to, root).expect("compatible degrees")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_in_prime_field() {
        let f5 = FieldSpec::prime(5).unwrap();
        let two = f5.from_int(2);
        assert_eq!(two.inv().unwrap(), f5.from_int(3));
        assert!(f5.one().inv().unwrap().is_one());
        assert_eq!(f5.zero().inv(), Err(FieldError::ZeroInverse));
    }

    #[test]
    fn inverse_in_f4() {
        // F_4 = F_2[w]/(w^2+w+1); w * (w+1) = w^2+w = 1
        let f4 = FieldSpec::extension(2, 2).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        let w = f4.generator();
        let w1 = w.add(&f4.one());
        assert_eq!(w.inv().unwrap(), w1);
        assert!(w.mul(&w1).is_one());
    }

    #[test]
    fn frobenius_examples() {
        let f4 = FieldSpec::extension(2, 2).unwrap();
        let w = f4.generator();
        assert_eq!(w.frobenius(1), w.add(&f4.one())); // w^2 = w+1
        assert_eq!(w.frobenius(0), w);
        let f5 = FieldSpec::prime(5).unwrap();
        let two = f5.from_int(2);
        assert_eq!(two.frobenius(1), two);
    }

    #[test]
    fn chosen_moduli_are_deterministic() {
        assert_eq!(FieldSpec::extension(3, 2).unwrap().modulus(), &[1, 0, 1]); // x^2+1
        assert_eq!(FieldSpec::extension(2, 3).unwrap().modulus(), &[1, 1, 0, 1]); // x^3+x+1
        assert_eq!(FieldSpec::extension(5, 2).unwrap().modulus(), &[2, 0, 1]); // x^2+2
    }

    #[test]
    fn every_element_satisfies_field_power_identity() {
        for (p, d) in [(2u64, 2usize), (3, 2), (5, 2), (2, 4), (3, 3)] {
            let k = FieldSpec::extension(p, d).unwrap();
            let q = k.order();
            for a in k.elements() {
                assert_eq!(a.pow(q as u128), a, "a^q = a fails in F_{}^{}", p, d);
            }
        }
    }

    #[test]
    fn frobenius_is_a_ring_map() {
        let k = FieldSpec::extension(3, 2).unwrap();
        for a in k.elements() {
            for b in k.elements() {
                assert_eq!(a.add(&b).frobenius(1), a.frobenius(1).add(&b.frobenius(1)));
                assert_eq!(a.mul(&b).frobenius(1), a.frobenius(1).mul(&b.frobenius(1)));
            }
        }
    }

    #[test]
    fn embeddings_preserve_arithmetic() {
        let f9 = FieldSpec::extension(3, 2).unwrap();
        let f81 = FieldSpec::extension(3, 4).unwrap();
        let emb = crate::poly::embed_least_root(&f9, &f81).unwrap();
        for a in f9.elements() {
            for b in f9.elements().take(5) {
                assert_eq!(emb.apply(&a.mul(&b)), emb.apply(&a).mul(&emb.apply(&b)));
                assert_eq!(emb.apply(&a.add(&b)), emb.apply(&a).add(&emb.apply(&b)));
            }
            assert_eq!(emb.preimage(&emb.apply(&a)), Some(a.clone()));
        }
    }
}

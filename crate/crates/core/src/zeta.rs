//! The zeta-function numerator of a curve over `F_q` and everything that can
//! be read off it: predicted point counts over extensions, Jacobian orders at
//! every level, the functional equation. All of it in exact integer
//! arithmetic via Newton's identities on the Frobenius power sums; floating
//! point appears only in the numeric audit of the root magnitudes.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZetaError {
    InconsistentCounts,
    BadInput,
}

impl fmt::Display for ZetaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZetaError::InconsistentCounts => {
                write!(f, "counts admit no integral L-polynomial (counting bug?)")
            }
            ZetaError::BadInput => write!(f, "invalid L-polynomial input"),
        }
    }
}

/// Numerator `L(T) = 1 + a_1 T + ... + a_2g T^2g` of the zeta function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LPolynomial {
    q: u64,
    genus: usize,
    coeffs: Vec<i128>, // a_0 .. a_2g, a_0 = 1
}

impl fmt::Display for LPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl LPolynomial {
    /// Fits the unique L-polynomial with the functional equation from the
    /// counts `N_1 .. N_g` over the first `g` extensions.
    pub fn from_counts(q: u64, genus: usize, counts: &[u64]) -> Result<Self, ZetaError> {
        if counts.len() != genus {
            return Err(ZetaError::BadInput);
        }
        // power sums of the reciprocal roots: s_m = q^m + 1 - N_m
        let mut s = vec![0i128; genus + 1];
        let mut qm: i128 = 1;
        for m in 1..=genus {
            qm *= q as i128;
            s[m] = qm + 1 - counts[m - 1] as i128;
        }
        // Newton: s_m + a_1 s_{m-1} + ... + a_{m-1} s_1 + m a_m = 0
        let mut a = vec![0i128; 2 * genus + 1];
        a[0] = 1;
        for m in 1..=genus {
            let mut acc = s[m];
            for j in 1..m {
                acc += a[j] * s[m - j];
            }
            if acc % m as i128 != 0 {
                return Err(ZetaError::InconsistentCounts);
            }
            a[m] = -acc / m as i128;
        }
        // functional equation a_{2g-i} = q^{g-i} a_i
        for i in 0..genus {
            let mut f = 1i128;
            for _ in 0..(genus - i) {
                f *= q as i128;
            }
            a[2 * genus - i] = f * a[i];
        }
        let l = LPolynomial { q, genus, coeffs: a };
        if l.order() <= 0 {
            return Err(ZetaError::InconsistentCounts);
        }
        Ok(l)
    }

    pub fn from_coeffs(q: u64, coeffs: Vec<i128>) -> Result<Self, ZetaError> {
        if coeffs.is_empty() || coeffs[0] != 1 || coeffs.len() % 2 == 0 {
            return Err(ZetaError::BadInput);
        }
        let genus = (coeffs.len() - 1) / 2;
        let l = LPolynomial { q, genus, coeffs };
        if !l.functional_equation_holds() {
            return Err(ZetaError::BadInput);
        }
        Ok(l)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn functional_equation_holds(&self) -> bool {
        let g = self.genus;
        (0..=g).all(|i| {
            let mut f = 1i128;
            for _ in 0..(g - i) {
                f *= self.q as i128;
            }
            self.coeffs[2 * g - i] == f * self.coeffs[i]
        })
    }

    /// Exact integer guard for the Weil bound on the trace: `a_1^2 <= 4 g^2 q`.
    pub fn trace_bound_holds(&self) -> bool {
        let a1 = self.coeffs.get(1).copied().unwrap_or(0);
        a1 * a1 <= 4 * (self.genus as i128) * (self.genus as i128) * self.q as i128
    }

    /// Power sums `s_m` of the reciprocal roots, for m = 1..=upto.
    fn power_sums(&self, upto: usize) -> Vec<i128> {
        let n = 2 * self.genus;
        let mut s = vec![0i128; upto + 1];
        for m in 1..=upto {
            let mut acc = if m <= n { (m as i128) * self.coeffs[m] } else { 0 };
            for j in 1..=m.saturating_sub(1).min(n) {
                acc += self.coeffs[j] * s[m - j];
            }
            s[m] = -acc;
        }
        s
    }

    /// Predicted number of points over `F_{q^m}`: `q^m + 1 - s_m`.
    pub fn predicted_count(&self, m: usize) -> i128 {
        assert!(m >= 1);
        let s = self.power_sums(m);
        let mut qm = 1i128;
        for _ in 0..m {
            qm *= self.q as i128;
        }
        qm + 1 - s[m]
    }

    /// `L(1)`, the order of the Jacobian over the base field.
    pub fn order(&self) -> i128 {
        self.coeffs.iter().sum()
    }

    /// Jacobian order over `F_{q^m}`: `prod_i (1 - alpha_i^m)`, computed with
    /// the integer Newton recursion on the power sums `s_{mj}` (no floats).
    pub fn order_at_level(&self, m: usize) -> i128 {
        assert!(m >= 1);
        let n = 2 * self.genus;
        let s = self.power_sums(n * m);
        // elementary symmetric functions of the alpha_i^m
        let mut e = vec![0i128; n + 1];
        e[0] = 1;
        for k in 1..=n {
            let mut acc = 0i128;
            for i in 1..=k {
                let sign = if i % 2 == 1 { 1 } else { -1 };
                acc += sign * e[k - i] * s[m * i];
            }
            debug_assert_eq!(acc % k as i128, 0);
            e[k] = acc / k as i128;
        }
        // prod (1 - beta_i) = sum_k (-1)^k e_k
        let mut out = 0i128;
        for (k, ek) in e.iter().enumerate() {
            out += if k % 2 == 0 { *ek } else { -*ek };
        }
        out
    }

    /// Numeric audit: every reciprocal root has absolute value `sqrt(q)`,
    /// within the stated tolerance on the root magnitudes.
    pub fn weil_magnitudes_hold(&self, tol: f64) -> bool {
        let roots = durand_kerner(&self.coeffs);
        let sq = newton_sqrt(self.q as f64);
        roots.iter().all(|&(re, im)| {
            // roots of L are 1/alpha_i, so |root| * sqrt(q) should be 1
            let mag = newton_sqrt(re * re + im * im);
            let err = mag * sq - 1.0;
            err.max(-err) <= tol
        })
    }
}

fn newton_sqrt(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut y = if x > 1.0 { x } else { 1.0 };
    for _ in 0..64 {
        y = 0.5 * (y + x / y);
    }
    y
}

/// Durand-Kerner simultaneous root iteration on a real-coefficient
/// polynomial, returning complex roots as (re, im).
fn durand_kerner(coeffs: &[i128]) -> Vec<(f64, f64)> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[n] as f64;
    let c: Vec<f64> = coeffs.iter().map(|&a| a as f64 / lead).collect();
    let eval = |z: (f64, f64)| -> (f64, f64) {
        let mut acc = (0.0f64, 0.0f64);
        for &coef in c.iter().rev() {
            let re = acc.0 * z.0 - acc.1 * z.1 + coef;
            let im = acc.0 * z.1 + acc.1 * z.0;
            acc = (re, im);
        }
        acc
    };
    // start on a slightly irrational spiral
    let mut roots: Vec<(f64, f64)> = Vec::with_capacity(n);
    let (mut x, mut y) = (0.4, 0.9);
    for _ in 0..n {
        roots.push((x, y));
        let (nx, ny) = (0.4 * x - 0.9 * y + 0.11, 0.9 * x + 0.4 * y + 0.07);
        x = nx;
        y = ny;
    }
    for _ in 0..500 {
        let mut next = roots.clone();
        for i in 0..n {
            let zi = roots[i];
            let mut denom = (1.0f64, 0.0f64);
            for (j, &zj) in roots.iter().enumerate() {
                if i == j {
                    continue;
                }
                let diff = (zi.0 - zj.0, zi.1 - zj.1);
                denom = (
                    denom.0 * diff.0 - denom.1 * diff.1,
                    denom.0 * diff.1 + denom.1 * diff.0,
                );
            }
            let val = eval(zi);
            let d2 = denom.0 * denom.0 + denom.1 * denom.1;
            if d2 == 0.0 {
                continue;
            }
            let quot = (
                (val.0 * denom.0 + val.1 * denom.1) / d2,
                (val.1 * denom.0 - val.0 * denom.1) / d2,
            );
            next[i] = (zi.0 - quot.0, zi.1 - quot.1);
        }
        roots = next;
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_the_genus_one_example() {
        // y^2 = x^3 + x over F_3 has 4 points, so a_1 = N_1 - q - 1 = 0
        let l = LPolynomial::from_counts(3, 1, &[4]).unwrap();
        assert_eq!(l.coeffs(), &[1, 0, 3]);
        assert!(l.functional_equation_holds());
        assert!(l.trace_bound_holds());
        assert_eq!(l.order(), 4);
    }

    #[test]
    fn predicted_counts_from_the_fitted_polynomial() {
        let l = LPolynomial::from_coeffs(3, vec![1, 0, 3]).unwrap();
        assert_eq!(l.predicted_count(1), 4);
        // alpha^2 + beta^2 = -6, so N_2 = 9 + 1 + 6 = 16
        assert_eq!(l.predicted_count(2), 16);
        // alpha^4 + beta^4 = 18, so N_4 = 81 + 1 - 18 = 64
        assert_eq!(l.predicted_count(4), 64);
    }

    #[test]
    fn jacobian_orders_at_levels() {
        let l = LPolynomial::from_coeffs(3, vec![1, 0, 3]).unwrap();
        assert_eq!(l.order_at_level(1), 4);
        // elliptic: |J(F_{q^m})| = N_m
        assert_eq!(l.order_at_level(2), 16);
        assert_eq!(l.order_at_level(3), l.predicted_count(3));
    }

    #[test]
    fn weil_magnitudes() {
        let l = LPolynomial::from_coeffs(3, vec![1, 0, 3]).unwrap();
        assert!(l.weil_magnitudes_hold(1e-9));
        // a visibly wrong polynomial fails the magnitude audit
        let bad = LPolynomial { q: 3, genus: 1, coeffs: vec![1, -5, 3] };
        assert!(!bad.weil_magnitudes_hold(1e-9));
    }

    #[test]
    fn inconsistent_counts_are_rejected() {
        // N_2 = 17 over F_3 makes the Newton division for a_2 non-integral
        assert!(LPolynomial::from_counts(3, 2, &[4, 17]).is_err());
    }
}

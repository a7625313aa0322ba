//! Truncated power series with exact rational coefficients, plus the divisor
//! arithmetic used to move between rooted counts and primitive counts.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::ring::Rational;

/// Coefficients `c_0..=c_N` of a series truncated at `u^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<Rational>,
}

impl PowerSeries {
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Rational::one();
        s
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the constant term");
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, m: usize) -> &Rational {
        &self.coeffs[m]
    }

    pub fn multiply(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = Self::zero(order);
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                out.coeffs[i + j] += a * b;
            }
        }
        out
    }

    /// `exp(self)`; requires a vanishing constant term.
    ///
    /// Uses `E' = S' E`, i.e. `m e_m = Σ_{k=1}^m k s_k e_{m-k}`.
    pub fn exp(&self) -> Self {
        assert!(self.coeffs[0].is_zero(), "exp needs a zero constant term");
        let n = self.order();
        let mut e = vec![Rational::zero(); n + 1];
        e[0] = Rational::one();
        for m in 1..=n {
            let mut acc = Rational::zero();
            for k in 1..=m {
                if !self.coeffs[k].is_zero() {
                    acc += &self.coeffs[k] * Rational::from_integer(k.into()) * &e[m - k];
                }
            }
            e[m] = acc / Rational::from_integer(m.into());
        }
        Self { coeffs: e }
    }

    /// `log(self)`; requires constant term 1.
    ///
    /// Inverts the recurrence in [`PowerSeries::exp`]:
    /// `m l_m = m f_m - Σ_{k=1}^{m-1} k l_k f_{m-k}`.
    pub fn log(&self) -> Self {
        assert!(self.coeffs[0].is_one(), "log needs constant term 1");
        let n = self.order();
        let mut l = vec![Rational::zero(); n + 1];
        for m in 1..=n {
            let mut acc = Rational::from_integer(m.into()) * &self.coeffs[m];
            for k in 1..m {
                if !l[k].is_zero() {
                    acc -= Rational::from_integer(k.into()) * &l[k] * &self.coeffs[m - k];
                }
            }
            l[m] = acc / Rational::from_integer(m.into());
        }
        Self { coeffs: l }
    }
}

pub fn divisors(n: usize) -> Vec<usize> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Möbius function by trial division.
pub fn mobius(mut n: usize) -> i64 {
    assert!(n >= 1);
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// `C(n, k)` as a big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

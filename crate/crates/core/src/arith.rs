//! Exact scalars: the [`Scalar`] trait the series algebra is generic over,
//! arbitrary-precision rationals, binomial and multinomial coefficients and
//! Bernoulli numbers.

use std::fmt::{Debug, Display};
use std::ops::Neg;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, ToPrimitive, Zero};

/// Exact rational number, always stored in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Coefficient field for the series types.
///
/// The exact instantiation is [`Rational`]; `f64`/`f32` are supported for
/// quick numerical experiments but no identity check relies on them.
pub trait Scalar:
    Num + Clone + Debug + Display + Neg<Output = Self> + Send + Sync + 'static {
    fn from_i64(n: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }
}

impl Scalar for Rational {
    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

impl Scalar for f64 {
    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    fn from_i64(n: i64) -> Self {
        n as f32
    }

    fn from_rational(r: &Rational) -> Self {
        r.to_f32().unwrap_or(f32::NAN)
    }
}

/// Shorthand for `num / den` as an exact rational.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, j| acc * j)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

/// `(Σ parts)! / Π parts_j!`. The empty sequence gives 1.
pub fn multinomial(parts: &[u64]) -> BigInt {
    let mut total = 0u64;
    let mut acc = BigInt::one();
    for &p in parts {
        total += p;
        acc *= binomial(total, p);
    }
    acc
}

/// Probe for the divisibility `n / gcd(parts) | multinomial(parts)`, with
/// `n = Σ parts`. Expected to return `true` for every nonempty tuple of
/// positive integers.
pub fn check_multinomial_divisibility(parts: &[u64]) -> bool {
    assert!(
        !parts.is_empty() && parts.iter().all(|&p| p >= 1),
        "parts must be nonempty and positive"
    );
    let n: u64 = parts.iter().sum();
    let g = parts.iter().fold(0u64, |acc, &p| acc.gcd(&p));
    (multinomial(parts) % BigInt::from(n / g)).is_zero()
}

fn bernoulli_cache() -> &'static RwLock<Vec<Rational>> {
    static CACHE: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(vec![Rational::one()]))
}

/// The Bernoulli number `B_n`, with the convention `B_1 = -1/2`.
///
/// This is the constant term of the Bernoulli polynomial `B_n(X)` defined by
/// `Σ B_n(X) t^n/n! = t e^{Xt} / (e^t - 1)`; the other common convention
/// (`B_1 = +1/2`) is *not* used anywhere in this crate.
///
/// Values come from `Σ_{j=0}^{n} C(n+1, j) B_j = 0` and are memoized
/// process-wide.
pub fn bernoulli(n: usize) -> Rational {
    let cache = bernoulli_cache();
    {
        let values = cache.read().expect("bernoulli cache poisoned");
        if let Some(b) = values.get(n) {
            return b.clone();
        }
    }
    let mut values = cache.write().expect("bernoulli cache poisoned");
    while values.len() <= n {
        let m = values.len() as u64;
        let sum = values
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (j, b)| {
                acc + b * Rational::from_integer(binomial(m + 1, j as u64))
            });
        values.push(-sum / int(m as i64 + 1));
    }
    values[n].clone()
}

/// Coefficients `[c_0, …, c_n]` of the Bernoulli polynomial
/// `B_n(X) = Σ_k C(n, k) B_k X^{n-k}`, lowest degree first.
pub fn bernoulli_polynomial(n: usize) -> Vec<Rational> {
    (0..=n)
        .map(|deg| Rational::from_integer(binomial(n as u64, deg as u64)) * bernoulli(n - deg))
        .collect()
}

/// Evaluates a polynomial given lowest degree first.
pub fn eval_polynomial(coeffs: &[Rational], x: &Rational) -> Rational {
    coeffs
        .iter()
        .rev()
        .fold(Rational::zero(), |acc, c| acc * x + c)
}

/// Least common multiple of the denominators of `values`; 1 if empty.
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

//! Polynomials of bounded degree in `w` with q-series coefficients.
//!
//! Every two-variable object `F(z, τ)` in this crate is stored through the
//! substitution `w = 2πiz`, so `ζ = e^w`, `ζ ∂/∂ζ = ∂/∂w`, and
//! `sin(πz)/(πz) = sinh(w/2)/(w/2)`. All coefficients stay rational.
//!
//! A `WSeries` of degree bound `Z` knows the coefficients of `w^0 … w^Z`
//! exactly (each to the shared q-order); higher powers are unknown.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::One;

use crate::arith::{factorial, Rational, Scalar};
use crate::qseries::{Exponent, Series, SeriesError};

#[derive(Clone, Debug)]
pub struct WSeries<T> {
    coeffs: Vec<Series<T>>,
}

/// First `(w-degree, q-exponent)` at which two w-series disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct WMismatch<T> {
    pub w_degree: usize,
    pub exponent: Exponent,
    pub left: T,
    pub right: T,
}

impl<T: Scalar> WSeries<T> {
    /// All coefficients are truncated to the smallest q-order among them.
    pub fn new(coeffs: Vec<Series<T>>) -> Self {
        assert!(!coeffs.is_empty(), "a w-series needs at least the w^0 coefficient");
        let order = coeffs.iter().map(|c| c.order()).min().expect("nonempty");
        let coeffs = coeffs.into_iter().map(|c| c.truncate(order)).collect();
        WSeries { coeffs }
    }

    pub fn from_fn(degree: usize, f: impl FnMut(usize) -> Series<T>) -> Self {
        Self::new((0..=degree).map(f).collect())
    }

    pub fn zero(degree: usize, q_order: i64) -> Self {
        Self::from_fn(degree, |_| Series::zero(q_order))
    }

    pub fn one(degree: usize, q_order: i64) -> Self {
        Self::constant(Series::one(q_order), degree)
    }

    /// `c` as the `w^0` coefficient, zero above.
    pub fn constant(c: Series<T>, degree: usize) -> Self {
        let order = c.order();
        let zero = Series::new(1, order, 0, Vec::new());
        let mut coeffs = vec![c];
        coeffs.extend(std::iter::repeat(zero).take(degree));
        Self::new(coeffs)
    }

    /// Exponential generating function `Σ_{k≤degree} s_k w^k / k!`; missing
    /// entries of `seq` are zero.
    pub fn from_egf(seq: &[Series<T>], degree: usize) -> Self {
        let order = seq.iter().map(|s| s.order()).min().expect("nonempty sequence");
        Self::from_fn(degree, |k| match seq.get(k) {
            Some(s) => {
                let kf = T::from_rational(&Rational::from_integer(factorial(k as u64)));
                s.scale(&(T::one() / kf))
            }
            None => Series::new(1, order, 0, Vec::new()),
        })
    }

    /// Degree bound `Z`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn q_order(&self) -> Exponent {
        self.coeffs[0].order()
    }

    pub fn coeff(&self, k: usize) -> &Series<T> {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[Series<T>] {
        &self.coeffs
    }

    pub fn truncate_degree(&self, degree: usize) -> Self {
        Self::new(self.coeffs[..=degree.min(self.degree())].to_vec())
    }

    pub fn truncate_q(&self, order: Exponent) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.truncate(order)).collect())
    }

    pub fn map(&self, f: impl Fn(&Series<T>) -> Series<T>) -> Self {
        Self::new(self.coeffs.iter().map(f).collect())
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|s| s.scale(c))
    }

    /// Multiplies every coefficient by the q-series `s`.
    pub fn scale_q(&self, s: &Series<T>) -> Self {
        self.map(|c| c * s)
    }

    /// Multiplies by `w^k`; the degree bound grows by `k`.
    pub fn shift(&self, k: usize) -> Self {
        let zero = Series::new(1, self.q_order(), 0, Vec::new());
        let mut coeffs = vec![zero; k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs)
    }

    fn zip(&self, other: &Self, f: impl Fn(&Series<T>, &Series<T>) -> Series<T>) -> Self {
        let d = self.degree().min(other.degree());
        Self::from_fn(d, |k| f(&self.coeffs[k], &other.coeffs[k]))
    }

    /// Graded Cauchy product, truncated at the smaller degree bound.
    pub fn mul_w(&self, other: &Self) -> Self {
        let d = self.degree().min(other.degree());
        Self::from_fn(d, |n| {
            let mut acc = &self.coeffs[0] * &other.coeffs[n];
            for j in 1..=n {
                acc = acc + &self.coeffs[j] * &other.coeffs[n - j];
            }
            acc
        })
    }

    /// `selfⁿ`; the zeroth power is 1 at the operand's degree and q-order.
    pub fn pow(&self, n: u32) -> Self {
        if n == 0 {
            let order = self.q_order();
            return Self::from_fn(self.degree(), |k| {
                let c = if k == 0 { vec![T::one()] } else { Vec::new() };
                Series::new(1, order, 0, c)
            });
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.mul_w(self);
        }
        acc
    }

    /// `∂/∂w`; the degree bound drops by one (a degree-0 input gives the
    /// degree-0 zero series).
    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self::new(vec![Series::new(1, self.q_order(), 0, Vec::new())]);
        }
        Self::from_fn(self.degree() - 1, |k| {
            self.coeffs[k + 1].scale(&T::from_i64(k as i64 + 1))
        })
    }

    /// `D = q d/dq` applied coefficientwise.
    pub fn q_derivative(&self) -> Self {
        self.map(|c| c.derivative())
    }

    /// `exp` in `w`. The `w^0` coefficient must have zero constant term and
    /// nonnegative q-exponents.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        let a = &self.coeffs;
        let mut f = vec![a[0].exp()?];
        for n in 1..a.len() {
            let mut acc = &a[1] * &f[n - 1];
            for j in 2..=n {
                acc = acc + (&a[j] * &f[n - j]).scale(&T::from_i64(j as i64));
            }
            f.push(acc.scale(&(T::one() / T::from_i64(n as i64))));
        }
        Ok(Self::new(f))
    }

    /// `log` in `w`. The `w^0` coefficient must have constant term 1.
    pub fn log(&self) -> Result<Self, SeriesError> {
        let f = &self.coeffs;
        let mut l = vec![f[0].log()?];
        let inv0 = f[0].inverse()?;
        for n in 1..f.len() {
            let mut acc = f[n].clone();
            let nt = T::from_i64(n as i64);
            for j in 1..n {
                let term = (&l[j] * &f[n - j]).scale(&(T::from_i64(j as i64) / nt.clone()));
                acc = acc - term;
            }
            l.push(&acc * &inv0);
        }
        Ok(Self::new(l))
    }

    /// Multiplicative inverse; the `w^0` coefficient must be invertible.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let a = &self.coeffs;
        let inv0 = a[0].inverse()?;
        let mut b = vec![inv0.clone()];
        for n in 1..a.len() {
            let mut acc = &a[1] * &b[n - 1];
            for j in 2..=n {
                acc = acc + &a[j] * &b[n - j];
            }
            b.push(-(&acc * &inv0));
        }
        Ok(Self::new(b))
    }

    /// Compares degrees up to the smaller bound, each below the shared
    /// q-order.
    pub fn first_mismatch(&self, other: &Self) -> Option<WMismatch<T>> {
        let d = self.degree().min(other.degree());
        (0..=d).find_map(|k| {
            self.coeffs[k]
                .first_mismatch(&other.coeffs[k])
                .map(|m| WMismatch {
                    w_degree: k,
                    exponent: m.exponent,
                    left: m.left,
                    right: m.right,
                })
        })
    }
}

impl<T: Scalar> PartialEq for WSeries<T> {
    fn eq(&self, other: &Self) -> bool {
        self.first_mismatch(other).is_none()
    }
}

macro_rules! forward_wop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<T: Scalar> $tr<&WSeries<T>> for &WSeries<T> {
            type Output = WSeries<T>;
            fn $method(self, rhs: &WSeries<T>) -> WSeries<T> {
                let f: fn(&WSeries<T>, &WSeries<T>) -> WSeries<T> = $body;
                f(self, rhs)
            }
        }
        impl<T: Scalar> $tr<WSeries<T>> for WSeries<T> {
            type Output = WSeries<T>;
            fn $method(self, rhs: WSeries<T>) -> WSeries<T> {
                (&self).$method(&rhs)
            }
        }
        impl<T: Scalar> $tr<&WSeries<T>> for WSeries<T> {
            type Output = WSeries<T>;
            fn $method(self, rhs: &WSeries<T>) -> WSeries<T> {
                (&self).$method(rhs)
            }
        }
    };
}

forward_wop!(Add, add, |a, b| a.zip(b, |x, y| x + y));
forward_wop!(Sub, sub, |a, b| a.zip(b, |x, y| x - y));
forward_wop!(Mul, mul, |a, b| a.mul_w(b));

impl<T: Scalar> Neg for &WSeries<T> {
    type Output = WSeries<T>;
    fn neg(self) -> WSeries<T> {
        self.map(|c| -c)
    }
}

pub fn w_mul<T: Scalar>(a: &WSeries<T>, b: &WSeries<T>) -> WSeries<T> {
    a.mul_w(b)
}

pub fn w_exp<T: Scalar>(a: &WSeries<T>) -> Result<WSeries<T>, SeriesError> {
    a.exp()
}

pub fn w_log<T: Scalar>(a: &WSeries<T>) -> Result<WSeries<T>, SeriesError> {
    a.log()
}

pub fn w_derivative<T: Scalar>(a: &WSeries<T>) -> WSeries<T> {
    a.derivative()
}

/// `sinh(w/2)/(w/2) = Σ_j (w/2)^{2j}/(2j+1)!`, the w-form of
/// `sin(πz)/(πz)`. Constant in q; `q_order` only sets the coefficients'
/// truncation.
pub fn sinh_half_kernel<T: Scalar>(degree: usize, q_order: i64) -> WSeries<T> {
    WSeries::from_fn(degree, |k| {
        if k % 2 == 1 {
            return Series::zero(q_order);
        }
        let den = factorial(k as u64 + 1) << k;
        let c = Rational::new(One::one(), den);
        Series::constant(T::from_rational(&c), q_order)
    })
}

/// Multiplicative inverse of [`sinh_half_kernel`], i.e. `(w/2)/sinh(w/2)`.
pub fn sinh_half_kernel_reciprocal<T: Scalar>(degree: usize, q_order: i64) -> WSeries<T> {
    sinh_half_kernel(degree, q_order)
        .inverse()
        .expect("kernel has constant term 1")
}

/// True when every coefficient of an odd power of `w` vanishes.
pub fn is_even_in_w<T: Scalar>(a: &WSeries<T>) -> bool {
    a.coeffs().iter().skip(1).step_by(2).all(|c| c.is_zero())
}

impl<T: Scalar> WSeries<T> {
    /// Coefficient of `w^k` times `k!`: reads off `s_k` from an EGF.
    pub fn egf_coeff(&self, k: usize) -> Series<T> {
        let kf = T::from_rational(&Rational::from_integer(factorial(k as u64)));
        self.coeffs[k].scale(&kf)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

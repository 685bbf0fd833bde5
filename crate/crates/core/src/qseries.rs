//! Truncated formal power series in `q` with a fractional exponent lattice.
//!
//! A [`Series`] stores coefficients of `q^(e/d)` for integer `e` on a lattice
//! with denominator `d`, together with an explicit truncation order `O`:
//! every exponent below `O` is known exactly, everything at or above `O` is
//! unknown. Binary operations propagate the order, so a result never claims
//! more precision than its inputs support.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{denominator_lcm, Rational, Scalar};

/// Exponents and truncation orders are small rationals.
pub type Exponent = Rational64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("exp needs a zero constant term, found {0}")]
    NonzeroConstant(String),
    #[error("log needs constant term 1, found {0}")]
    ConstantNotOne(String),
    #[error("operation needs nonnegative exponents, found q^{0}")]
    NegativeExponent(Exponent),
    #[error("series is zero to order {0} and cannot be inverted")]
    NotInvertible(Exponent),
    #[error("lattice denominator must be positive, got {0}")]
    BadLattice(i64),
    #[error("malformed series JSON: {0}")]
    Json(String),
}

/// First exponent at which two series disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch<T> {
    pub exponent: Exponent,
    pub left: T,
    pub right: T,
}

#[derive(Clone, Debug)]
pub struct Series<T> {
    lattice: i64,
    start: i64,
    coeffs: Vec<T>,
    order: Exponent,
}

/// Number of lattice points strictly below `order`: the exclusive upper bound
/// on stored lattice exponents.
fn lattice_bound(order: Exponent, lattice: i64) -> i64 {
    let p = order.numer() * lattice;
    let q = *order.denom();
    -Integer::div_floor(&(-p), &q)
}

impl<T: Scalar> Series<T> {
    /// Builds a series from consecutive coefficients starting at lattice
    /// exponent `start`. Coefficients at or beyond the order are dropped.
    pub fn new(lattice: i64, order: Exponent, start: i64, mut coeffs: Vec<T>) -> Self {
        assert!(lattice > 0, "lattice denominator must be positive");
        let bound = lattice_bound(order, lattice);
        let keep = (bound - start).clamp(0, coeffs.len() as i64) as usize;
        coeffs.truncate(keep);
        Series {
            lattice,
            start,
            coeffs,
            order,
        }
    }

    /// Integer-exponent series `Σ coeffs[n] q^n + O(q^order)`.
    pub fn from_coeffs(coeffs: Vec<T>, order: i64) -> Self {
        Self::new(1, Exponent::from_integer(order), 0, coeffs)
    }

    /// Builds a series from `(lattice exponent, coefficient)` pairs; repeated
    /// exponents are summed and terms beyond the order dropped.
    pub fn from_terms(
        lattice: i64,
        order: Exponent,
        terms: impl IntoIterator<Item = (i64, T)>,
    ) -> Self {
        let bound = lattice_bound(order, lattice);
        let terms: Vec<(i64, T)> = terms.into_iter().filter(|(e, _)| *e < bound).collect();
        let Some(start) = terms.iter().map(|(e, _)| *e).min() else {
            return Self::new(lattice, order, 0, Vec::new());
        };
        let mut coeffs = vec![T::zero(); (bound - start) as usize];
        for (e, c) in terms {
            let slot = &mut coeffs[(e - start) as usize];
            *slot = slot.clone() + c;
        }
        Self::new(lattice, order, start, coeffs)
    }

    pub fn zero(order: i64) -> Self {
        Self::from_coeffs(Vec::new(), order)
    }

    pub fn one(order: i64) -> Self {
        Self::constant(T::one(), order)
    }

    pub fn constant(c: T, order: i64) -> Self {
        Self::from_coeffs(vec![c], order)
    }

    /// `c · q^(exponent/lattice)`.
    pub fn monomial(c: T, exponent: i64, lattice: i64, order: Exponent) -> Self {
        Self::new(lattice, order, exponent, vec![c])
    }

    pub fn lattice(&self) -> i64 {
        self.lattice
    }

    pub fn order(&self) -> Exponent {
        self.order
    }

    /// Exclusive bound on lattice exponents with known coefficients.
    pub fn bound(&self) -> i64 {
        lattice_bound(self.order, self.lattice)
    }

    /// Coefficient of `q^(e/d)` on this series' own lattice.
    ///
    /// Panics if `e/d` is at or beyond the truncation order.
    pub fn coeff(&self, e: i64) -> T {
        assert!(
            e < self.bound(),
            "coefficient of q^({e}/{}) requested beyond order {}",
            self.lattice,
            self.order
        );
        self.stored(e)
    }

    fn stored(&self, e: i64) -> T {
        if e < self.start {
            return T::zero();
        }
        self.coeffs
            .get((e - self.start) as usize)
            .cloned()
            .unwrap_or_else(T::zero)
    }

    /// Coefficient of `q^exponent`, or `None` if it lies beyond the order.
    pub fn coeff_at(&self, exponent: Exponent) -> Option<T> {
        if exponent >= self.order {
            return None;
        }
        let scaled = exponent * Exponent::from_integer(self.lattice);
        if !scaled.is_integer() {
            return Some(T::zero());
        }
        Some(self.stored(scaled.to_integer()))
    }

    pub fn constant_term(&self) -> T {
        self.coeff_at(Exponent::zero()).unwrap_or_else(T::zero)
    }

    /// Nonzero terms as `(lattice exponent, coefficient)`, ascending.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &T)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.start + i as i64, c))
    }

    /// Lattice exponent of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.terms().next().map(|(e, _)| e)
    }

    fn valuation_exponent(&self) -> Exponent {
        match self.valuation() {
            Some(e) => Exponent::new(e, self.lattice),
            None => self.order,
        }
    }

    /// True if every known coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Lowers the truncation order (never raises it).
    pub fn truncate(&self, order: Exponent) -> Self {
        let order = order.min(self.order);
        Self::new(self.lattice, order, self.start, self.coeffs.clone())
    }

    /// Re-expresses the series on a finer lattice; `lattice` must be a
    /// multiple of the current one.
    pub fn rescale(&self, lattice: i64) -> Self {
        assert!(
            lattice % self.lattice == 0,
            "cannot rescale lattice {} to {lattice}",
            self.lattice
        );
        let factor = lattice / self.lattice;
        if factor == 1 {
            return self.clone();
        }
        let terms = self.terms().map(|(e, c)| (e * factor, c.clone()));
        Self::from_terms(lattice, self.order, terms)
    }

    fn common_lattice(&self, other: &Self) -> (Self, Self) {
        let l = self.lattice.lcm(&other.lattice);
        (self.rescale(l), other.rescale(l))
    }

    pub fn map_coeffs(&self, f: impl Fn(&T) -> T) -> Self {
        let coeffs = self.coeffs.iter().map(f).collect();
        Self::new(self.lattice, self.order, self.start, coeffs)
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map_coeffs(|x| x.clone() * c.clone())
    }

    fn combine(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        let (a, b) = self.common_lattice(other);
        let order = a.order.min(b.order);
        let bound = lattice_bound(order, a.lattice);
        let start = a.start.min(b.start);
        let end = (a.start + a.coeffs.len() as i64)
            .max(b.start + b.coeffs.len() as i64)
            .min(bound);
        let coeffs = (start..end.max(start))
            .map(|e| f(a.stored(e), b.stored(e)))
            .collect();
        Self::new(a.lattice, order, start, coeffs)
    }

    /// Exact Cauchy product. The result order is `min(O_a + v_b, O_b + v_a)`
    /// where `v` is the exponent of the leading nonzero term.
    pub fn mul_series(&self, other: &Self) -> Self {
        let (a, b) = self.common_lattice(other);
        let order = (a.order + b.valuation_exponent()).min(b.order + a.valuation_exponent());
        let (Some(va), Some(vb)) = (a.valuation(), b.valuation()) else {
            return Self::new(a.lattice, order, 0, Vec::new());
        };
        let bound = lattice_bound(order, a.lattice);
        let start = va + vb;
        if bound <= start {
            return Self::new(a.lattice, order, start, Vec::new());
        }
        let len = (bound - start) as usize;
        let ac = &a.coeffs[(va - a.start) as usize..];
        let bc = &b.coeffs[(vb - b.start) as usize..];
        let mut coeffs = vec![T::zero(); len];
        for (i, x) in ac.iter().enumerate().take(len) {
            if x.is_zero() {
                continue;
            }
            for (j, y) in bc.iter().enumerate().take(len - i) {
                if y.is_zero() {
                    continue;
                }
                let slot = &mut coeffs[i + j];
                *slot = slot.clone() + x.clone() * y.clone();
            }
        }
        Self::new(a.lattice, order, start, coeffs)
    }

    /// `selfⁿ`; the zeroth power is 1 at the operand's order.
    pub fn pow(&self, n: u32) -> Self {
        if n == 0 {
            return Self::new(self.lattice, self.order, 0, vec![T::one()]);
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.mul_series(self);
        }
        acc
    }

    /// `D = q d/dq`: the coefficient of `q^(e/d)` is multiplied by `e/d`.
    pub fn derivative(&self) -> Self {
        let d = T::from_i64(self.lattice);
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.clone() * T::from_i64(self.start + i as i64) / d.clone())
            .collect();
        Self::new(self.lattice, self.order, self.start, coeffs)
    }

    fn check_nonnegative(&self) -> Result<(), SeriesError> {
        match self.valuation() {
            Some(v) if v < 0 => Err(SeriesError::NegativeExponent(Exponent::new(v, self.lattice))),
            _ => Ok(()),
        }
    }

    /// Dense coefficients at lattice exponents `0..bound`.
    fn dense_from_zero(&self) -> Vec<T> {
        (0..self.bound().max(0)).map(|e| self.stored(e)).collect()
    }

    /// `exp(a) = Σ aⁿ/n!`, solved coefficient by coefficient from
    /// `D(exp a) = D(a)·exp a`.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        self.check_nonnegative()?;
        let c0 = self.constant_term();
        if !c0.is_zero() {
            return Err(SeriesError::NonzeroConstant(format!("{c0}")));
        }
        let a = self.dense_from_zero();
        let mut f: Vec<T> = Vec::with_capacity(a.len());
        if !a.is_empty() {
            f.push(T::one());
        }
        for n in 1..a.len() {
            let mut s = T::zero();
            for j in 1..=n {
                if !a[j].is_zero() {
                    s = s + T::from_i64(j as i64) * a[j].clone() * f[n - j].clone();
                }
            }
            f.push(s / T::from_i64(n as i64));
        }
        Ok(Self::new(self.lattice, self.order, 0, f))
    }

    /// `log(a) = Σ (-1)^{n+1}(a-1)ⁿ/n`, solved from `a·D(log a) = D(a)`.
    pub fn log(&self) -> Result<Self, SeriesError> {
        self.check_nonnegative()?;
        let c0 = self.constant_term();
        if c0 != T::one() {
            return Err(SeriesError::ConstantNotOne(format!("{c0}")));
        }
        let a = self.dense_from_zero();
        let mut b: Vec<T> = Vec::with_capacity(a.len());
        if !a.is_empty() {
            b.push(T::zero());
        }
        for n in 1..a.len() {
            let mut s = T::zero();
            for j in 1..n {
                if !a[j].is_zero() {
                    s = s + a[j].clone() * T::from_i64((n - j) as i64) * b[n - j].clone();
                }
            }
            b.push(a[n].clone() - s / T::from_i64(n as i64));
        }
        Ok(Self::new(self.lattice, self.order, 0, b))
    }

    /// Multiplicative inverse. If the leading term is `c·q^v`, the result
    /// starts at `q^{-v}` and has order `O - 2v`.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let Some(v) = self.valuation() else {
            return Err(SeriesError::NotInvertible(self.order));
        };
        let lead = self.stored(v);
        let order = self.order - Exponent::new(2 * v, self.lattice);
        let len = (lattice_bound(order, self.lattice) + v).max(0) as usize;
        let a: Vec<T> = (0..len as i64).map(|i| self.stored(v + i)).collect();
        let mut b: Vec<T> = Vec::with_capacity(len);
        for n in 0..len {
            if n == 0 {
                b.push(T::one() / lead.clone());
                continue;
            }
            let mut s = T::zero();
            for j in 1..=n {
                if !a[j].is_zero() {
                    s = s + a[j].clone() * b[n - j].clone();
                }
            }
            b.push(-s / lead.clone());
        }
        Ok(Self::new(self.lattice, order, -v, b))
    }

    pub fn div_series(&self, other: &Self) -> Result<Self, SeriesError> {
        Ok(self.mul_series(&other.inverse()?))
    }

    /// Compares coefficients below the smaller of the two orders.
    pub fn first_mismatch(&self, other: &Self) -> Option<Mismatch<T>> {
        let (a, b) = self.common_lattice(other);
        let bound = lattice_bound(a.order.min(b.order), a.lattice);
        let start = a.start.min(b.start);
        let end = (a.start + a.coeffs.len() as i64)
            .max(b.start + b.coeffs.len() as i64)
            .min(bound);
        (start..end).find_map(|e| {
            let (x, y) = (a.stored(e), b.stored(e));
            (x != y).then(|| Mismatch {
                exponent: Exponent::new(e, a.lattice),
                left: x,
                right: y,
            })
        })
    }
}

/// Agreement to the shared order; not transitive across different orders.
impl<T: Scalar> PartialEq for Series<T> {
    fn eq(&self, other: &Self) -> bool {
        self.first_mismatch(other).is_none()
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<T: Scalar> $tr<&Series<T>> for &Series<T> {
            type Output = Series<T>;
            fn $method(self, rhs: &Series<T>) -> Series<T> {
                let f: fn(&Series<T>, &Series<T>) -> Series<T> = $body;
                f(self, rhs)
            }
        }
        impl<T: Scalar> $tr<Series<T>> for Series<T> {
            type Output = Series<T>;
            fn $method(self, rhs: Series<T>) -> Series<T> {
                (&self).$method(&rhs)
            }
        }
        impl<T: Scalar> $tr<&Series<T>> for Series<T> {
            type Output = Series<T>;
            fn $method(self, rhs: &Series<T>) -> Series<T> {
                (&self).$method(rhs)
            }
        }
        impl<T: Scalar> $tr<Series<T>> for &Series<T> {
            type Output = Series<T>;
            fn $method(self, rhs: Series<T>) -> Series<T> {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.combine(b, |x, y| x + y));
forward_binop!(Sub, sub, |a, b| a.combine(b, |x, y| x - y));
forward_binop!(Mul, mul, |a, b| a.mul_series(b));

impl<T: Scalar> Neg for &Series<T> {
    type Output = Series<T>;
    fn neg(self) -> Series<T> {
        self.map_coeffs(|c| -c.clone())
    }
}

impl<T: Scalar> Neg for Series<T> {
    type Output = Series<T>;
    fn neg(self) -> Series<T> {
        -&self
    }
}

/// Exact q-series over the rationals.
pub type QSeries = Series<Rational>;

pub fn series_mul<T: Scalar>(a: &Series<T>, b: &Series<T>) -> Series<T> {
    a.mul_series(b)
}

pub fn series_exp<T: Scalar>(a: &Series<T>) -> Result<Series<T>, SeriesError> {
    a.exp()
}

pub fn series_log<T: Scalar>(a: &Series<T>) -> Result<Series<T>, SeriesError> {
    a.log()
}

pub fn q_derivative<T: Scalar>(a: &Series<T>) -> Series<T> {
    a.derivative()
}

/// `(q)_∞ = Π_{n≥1} (1 - qⁿ)` to order `order`, by direct multiplication.
pub fn euler_product<T: Scalar>(order: i64) -> Series<T> {
    assert!(order >= 1, "order must be at least 1");
    let len = order as usize;
    let mut c = vec![T::zero(); len];
    c[0] = T::one();
    for n in 1..len {
        for e in (n..len).rev() {
            if !c[e - n].is_zero() {
                c[e] = c[e].clone() - c[e - n].clone();
            }
        }
    }
    Series::from_coeffs(c, order)
}

/// `η = q^{1/24}(q)_∞` on the lattice `d = 24`, known below `order + 1/24`.
pub fn eta_series<T: Scalar>(order: i64) -> Series<T> {
    let shift = Series::monomial(T::one(), 1, 24, Exponent::new(order * 24 + 1, 24));
    shift.mul_series(&euler_product(order))
}

/// `1/(q)_∞ = Σ p(n) qⁿ`.
pub fn partition_generating_function<T: Scalar>(order: i64) -> Series<T> {
    euler_product(order)
        .inverse()
        .expect("Euler product has constant term 1")
}

impl QSeries {
    /// Least common multiple of the denominators of all coefficients with
    /// exponent `>= from`; 1 for an empty selection.
    pub fn max_denominator(&self, from: Exponent) -> BigInt {
        let d = Exponent::from_integer(self.lattice);
        denominator_lcm(
            self.terms()
                .filter(|(e, _)| Exponent::from_integer(*e) >= from * d)
                .map(|(_, c)| c),
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SeriesJson::from(self)).expect("series JSON is always serializable")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&SeriesJson::from(self)).expect("series JSON is always serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self, SeriesError> {
        let raw: SeriesJson = serde_json::from_str(s).map_err(|e| SeriesError::Json(e.to_string()))?;
        raw.try_into()
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self, SeriesError> {
        let raw: SeriesJson =
            serde_json::from_value(v.clone()).map_err(|e| SeriesError::Json(e.to_string()))?;
        raw.try_into()
    }
}

pub fn max_denominator(a: &QSeries, from_exponent: Exponent) -> BigInt {
    a.max_denominator(from_exponent)
}

/// Wire form: `{ "lattice": d, "order": "O", "coeffs": [[e, "p/q"], ...] }`
/// with `e` the lattice exponent, i.e. the term `q^(e/d)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesJson {
    pub lattice: i64,
    pub order: String,
    pub coeffs: Vec<(i64, String)>,
}

impl From<&QSeries> for SeriesJson {
    fn from(s: &QSeries) -> Self {
        SeriesJson {
            lattice: s.lattice,
            order: s.order.to_string(),
            coeffs: s.terms().map(|(e, c)| (e, c.to_string())).collect(),
        }
    }
}

impl TryFrom<SeriesJson> for QSeries {
    type Error = SeriesError;

    fn try_from(raw: SeriesJson) -> Result<Self, SeriesError> {
        if raw.lattice <= 0 {
            return Err(SeriesError::BadLattice(raw.lattice));
        }
        let order: Exponent = raw
            .order
            .parse()
            .map_err(|_| SeriesError::Json(format!("bad order {:?}", raw.order)))?;
        let bound = lattice_bound(order, raw.lattice);
        let mut terms = Vec::with_capacity(raw.coeffs.len());
        for (e, c) in raw.coeffs {
            if e >= bound {
                return Err(SeriesError::Json(format!(
                    "exponent {e}/{} lies beyond order {order}",
                    raw.lattice
                )));
            }
            let c: Rational = c
                .parse()
                .map_err(|_| SeriesError::Json(format!("bad coefficient {c:?}")))?;
            terms.push((e, c));
        }
        Ok(Series::from_terms(raw.lattice, order, terms))
    }
}

fn fmt_exponent(e: Exponent) -> String {
    if e.is_integer() {
        e.to_integer().to_string()
    } else {
        format!("({e})")
    }
}

impl<T: Scalar> fmt::Display for Series<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let exp = Exponent::new(e, self.lattice);
            let coeff = format!("{c}");
            let (neg, mag) = match coeff.strip_prefix('-') {
                Some(m) => (true, m.to_string()),
                None => (false, coeff),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match exp.cmp(&Exponent::zero()) {
                Ordering::Equal => write!(f, "{mag}")?,
                _ => {
                    if mag != "1" {
                        write!(f, "{mag}*")?;
                    }
                    if exp == Exponent::one() {
                        write!(f, "q")?;
                    } else {
                        write!(f, "q^{}", fmt_exponent(exp))?;
                    }
                }
            }
        }
        if !first {
            write!(f, " + ")?;
        }
        write!(f, "O(q^{})", fmt_exponent(self.order))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn q(coeffs: &[i64], order: i64) -> QSeries {
        QSeries::from_coeffs(coeffs.iter().map(|&c| int(c)).collect(), order)
    }

    #[test]
    fn geometric_series_inverse() {
        let one_minus_q = q(&[1, -1], 10);
        let geo = q(&[1; 10], 10);
        assert_eq!(one_minus_q.mul_series(&geo), QSeries::one(10));
        assert_eq!(one_minus_q.inverse().unwrap(), geo);
    }

    #[test]
    fn fractional_exponents_add() {
        let o = Exponent::from_integer(5);
        let a = QSeries::monomial(int(1), 1, 24, o);
        let sq = &a * &a;
        assert_eq!(sq.valuation(), Some(2));
        assert_eq!(sq.coeff_at(Exponent::new(1, 12)), Some(int(1)));
        assert_eq!(sq.terms().count(), 1);
    }

    #[test]
    fn binomial_square() {
        let a = q(&[1, 1], 6);
        assert_eq!(&a * &a, q(&[1, 2, 1], 6));
    }

    #[test]
    fn product_order_tracks_valuation() {
        let a = q(&[0, 0, 1], 10); // q^2 + O(q^10)
        let b = q(&[1, 1], 5); // 1 + q + O(q^5)
        let p = &a * &b;
        assert_eq!(p.order(), Exponent::from_integer(7));
    }

    #[test]
    fn exp_examples() {
        assert_eq!(QSeries::zero(6).exp().unwrap(), QSeries::one(6));
        let e = q(&[0, 1], 4).exp().unwrap();
        let expected = QSeries::from_coeffs(vec![int(1), int(1), rat(1, 2), rat(1, 6)], 4);
        assert_eq!(e, expected);
        assert!(e.first_mismatch(&expected).is_none());
        let a = q(&[1, 3, 5], 12);
        assert_eq!(a.log().unwrap().exp().unwrap(), a);
    }

    #[test]
    fn log_examples() {
        assert!(QSeries::one(8).log().unwrap().is_zero());
        let l = q(&[1, 1], 4).log().unwrap();
        assert_eq!(l, QSeries::from_coeffs(vec![int(0), int(1), rat(-1, 2), rat(1, 3)], 4));
        let a = q(&[0, 0, 1], 12);
        assert_eq!(a.exp().unwrap().log().unwrap(), a);
    }

    #[test]
    fn exp_log_reject_bad_constants() {
        assert!(matches!(q(&[2, 1], 5).exp(), Err(SeriesError::NonzeroConstant(_))));
        assert!(matches!(q(&[2, 1], 5).log(), Err(SeriesError::ConstantNotOne(_))));
        let neg = QSeries::monomial(int(1), -1, 1, Exponent::from_integer(3));
        assert!(matches!(neg.exp(), Err(SeriesError::NegativeExponent(_))));
    }

    #[test]
    fn derivative_eigenvector() {
        let mut c = vec![int(0); 6];
        c[5] = int(1);
        let d = q_derivative(&QSeries::from_coeffs(c, 10));
        assert_eq!(d.coeff(5), int(5));
    }

    #[test]
    fn euler_product_examples() {
        assert_eq!(euler_product::<Rational>(8), q(&[1, -1, -1, 0, 0, 1, 0, 1], 8));
        assert_eq!(euler_product::<Rational>(2), q(&[1, -1], 2));
        let p: QSeries = partition_generating_function(15);
        assert_eq!(&euler_product::<Rational>(15) * &p, QSeries::one(15));
    }

    // Independent oracle: p(n) from Euler's pentagonal recurrence.
    fn partition_counts(n: usize) -> Vec<i64> {
        let mut p = vec![0i64; n + 1];
        p[0] = 1;
        for m in 1..=n {
            let mut k = 1i64;
            loop {
                let g1 = (k * (3 * k - 1) / 2) as usize;
                if g1 > m {
                    break;
                }
                let sign = if k % 2 == 1 { 1 } else { -1 };
                p[m] += sign * p[m - g1];
                let g2 = (k * (3 * k + 1) / 2) as usize;
                if g2 <= m {
                    p[m] += sign * p[m - g2];
                }
                k += 1;
            }
        }
        p
    }

    #[test]
    fn partition_function_matches_recurrence() {
        let p: QSeries = partition_generating_function(40);
        for (n, count) in partition_counts(39).into_iter().enumerate() {
            assert_eq!(p.coeff(n as i64), int(count));
        }
    }

    #[test]
    fn euler_product_is_pentagonal() {
        let e: QSeries = euler_product(101);
        let mut expected = vec![0i64; 101];
        for k in -10i64..=10 {
            let g = k * (3 * k - 1) / 2;
            if (0..101).contains(&g) {
                expected[g as usize] = if k % 2 == 0 { 1 } else { -1 };
            }
        }
        assert_eq!(e, q(&expected, 101));
    }

    #[test]
    fn eta_leading_term_and_log_derivative() {
        let eta: QSeries = eta_series(10);
        assert_eq!(eta.order(), Exponent::new(241, 24));
        assert_eq!(eta.valuation(), Some(1));
        assert_eq!(eta.coeff(1), int(1));
        let ratio = eta.derivative().div_series(&eta).unwrap();
        assert_eq!(ratio.constant_term(), rat(1, 24));
    }

    #[test]
    fn max_denominator_examples() {
        let mut c = vec![rat(1, 240)];
        c.extend((1..10).map(|n| int(n * n)));
        let s = QSeries::from_coeffs(c, 10);
        assert_eq!(s.max_denominator(Exponent::one()), BigInt::from(1));
        assert_eq!(s.max_denominator(Exponent::zero()), BigInt::from(240));
        assert_eq!(QSeries::zero(10).max_denominator(Exponent::zero()), BigInt::from(1));
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let eta: QSeries = eta_series(6);
        let s = eta.scale(&rat(-3, 7)) + QSeries::constant(rat(1, 240), 6);
        let text = s.to_json_string();
        let back = QSeries::from_json_str(&text).unwrap();
        assert_eq!(back.to_json_string(), text);
        assert_eq!(back, s);
        assert_eq!(back.order(), s.order());
    }

    #[test]
    fn json_rejects_terms_beyond_order() {
        let bad = r#"{"lattice":1,"order":"3","coeffs":[[5,"1"]]}"#;
        assert!(QSeries::from_json_str(bad).is_err());
        let bad_lattice = r#"{"lattice":0,"order":"3","coeffs":[]}"#;
        assert!(matches!(
            QSeries::from_json_str(bad_lattice),
            Err(SeriesError::BadLattice(0))
        ));
    }

    #[test]
    fn display_is_readable() {
        let s = QSeries::from_coeffs(vec![rat(-1, 24), int(0), int(1), int(-3)], 4);
        assert_eq!(s.to_string(), "-1/24 + q^2 - 3*q^3 + O(q^4)");
    }

    #[test]
    fn generic_over_f64() {
        let a = Series::<f64>::from_coeffs(vec![0.0, 1.0], 6);
        let e = a.exp().unwrap();
        assert!((e.coeff(3) - 1.0 / 6.0).abs() < 1e-15);
        let back = e.log().unwrap();
        assert!((back.coeff(1) - 1.0).abs() < 1e-15);
        assert!(back.coeff(4).abs() < 1e-15);
    }
}

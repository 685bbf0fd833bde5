//! Property bodies shared by the proptest suite and the acceptance harness.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use qtrace::arith::{check_multinomial_divisibility, factorial, rat};
use qtrace::eisenstein::Family;
use qtrace::partitions::{partition_trace, rank_counts, Partition};
use qtrace::qseries::q_derivative;
use qtrace::verify::{perturb, run_check, CheckParams};
use qtrace::{QSeries, Rational, WSeries};

pub type Outcome = Result<(), TestCaseError>;

pub fn rational() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=15).prop_map(|(n, d)| rat(n, d))
}

pub fn nonzero_rational() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |x| !x.is_zero())
}

/// A series with `len` random coefficients at q-order `order`.
pub fn series_with(order: i64) -> impl Strategy<Value = QSeries> {
    prop::collection::vec(rational(), 0..=order as usize)
        .prop_map(move |c| QSeries::from_coeffs(c, order))
}

pub fn series() -> impl Strategy<Value = QSeries> {
    (1i64..=12).prop_flat_map(series_with)
}

/// Three series sharing one q-order.
pub fn series_triple() -> impl Strategy<Value = (QSeries, QSeries, QSeries)> {
    (1i64..=12).prop_flat_map(|n| (series_with(n), series_with(n), series_with(n)))
}

/// A series with zero constant term.
pub fn series_without_constant() -> impl Strategy<Value = QSeries> {
    series().prop_map(|s| &s - &QSeries::constant(s.constant_term(), s.bound()))
}

pub fn w_series() -> impl Strategy<Value = WSeries<Rational>> {
    (0usize..=5, 1i64..=8).prop_flat_map(|(deg, order)| {
        prop::collection::vec(series_with(order), deg + 1).prop_map(WSeries::new)
    })
}

pub fn ring_laws(a: &QSeries, b: &QSeries, c: &QSeries) -> Outcome {
    prop_assert_eq!(&(a + b) + c, a + &(b + c));
    prop_assert_eq!(a + b, b + a);
    prop_assert_eq!(&(a * b) * c, a * &(b * c));
    prop_assert_eq!(a * b, b * a);
    prop_assert_eq!(a * &(b + c), &(a * b) + &(a * c));
    prop_assert_eq!(&(a - a), &QSeries::zero(a.bound()));
    prop_assert_eq!(a * &QSeries::one(a.bound()), a.clone());
    Ok(())
}

pub fn rational_field_laws(x: &Rational, y: &Rational, z: &Rational) -> Outcome {
    prop_assert_eq!((x + y) + z, x + (y + z));
    prop_assert_eq!((x * y) * z, x * (y * z));
    prop_assert_eq!(x * (y + z), x * y + x * z);
    if !x.is_zero() {
        prop_assert_eq!(x * x.recip(), Rational::one());
    }
    Ok(())
}

pub fn exp_log_roundtrip(a: &QSeries) -> Outcome {
    // a has zero constant term
    let e = a.exp().map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(e.constant_term(), Rational::one());
    prop_assert_eq!(&e.log().map_err(|e| TestCaseError::fail(e.to_string()))?, a);
    let unit = &QSeries::one(a.bound()) + a;
    let l = unit.log().map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(&l.exp().map_err(|e| TestCaseError::fail(e.to_string()))?, &unit);
    // exp is a homomorphism from + to ·
    let twice = (a + a).exp().unwrap();
    prop_assert_eq!(&twice, &(&e * &e));
    Ok(())
}

pub fn leibniz(a: &QSeries, b: &QSeries) -> Outcome {
    let lhs = q_derivative(&(a * b));
    let rhs = &(&q_derivative(a) * b) + &(a * &q_derivative(b));
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

pub fn w_exp_log_roundtrip(a: &WSeries<Rational>) -> Outcome {
    // drop the w^0 coefficient so exp is defined in w
    let zeroed = WSeries::new(
        a.coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| if k == 0 { QSeries::zero(c.bound()) } else { c.clone() })
            .collect(),
    );
    let e = zeroed.exp().map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(&e.log().map_err(|e| TestCaseError::fail(e.to_string()))?, &zeroed);
    let one = WSeries::one(a.degree(), a.coeff(0).bound());
    prop_assert_eq!(&(&e * &(-&zeroed).exp().unwrap()), &one);
    Ok(())
}

/// `Σ_{λ⊢n} Π x_k^{m_k}/m_k!` is the `wⁿ` coefficient of `exp(Σ x_k w^k)`.
pub fn cycle_index(x: &[Rational]) -> Outcome {
    let z = x.len();
    let inv_mult = |lambda: &Partition| {
        lambda.multiplicities().into_iter().fold(Rational::one(), |acc, (_, m)| {
            acc / Rational::from_integer(factorial(m as u64))
        })
    };
    let mut h = vec![QSeries::zero(1)];
    h.extend(x.iter().map(|c| QSeries::constant(c.clone(), 1)));
    let traces: Vec<QSeries> = (0..=z).map(|n| partition_trace(n as u32, inv_mult, &h, 1)).collect();
    let exp = WSeries::new(h).exp().unwrap();
    // direct oracle: power series exp over Q by the recurrence n a_n = Σ k x_k a_{n-k}
    let mut a = vec![Rational::one()];
    for n in 1..=z {
        let s: Rational = (1..=n)
            .map(|k| rat(k as i64, 1) * &x[k - 1] * &a[n - k])
            .sum();
        a.push(s / rat(n as i64, 1));
    }
    for n in 0..=z {
        prop_assert_eq!(traces[n].constant_term(), a[n].clone(), "trace, n = {}", n);
        prop_assert_eq!(exp.coeff(n).constant_term(), a[n].clone(), "exp, n = {}", n);
    }
    Ok(())
}

pub fn multinomial_divisibility(parts: &[u64]) -> Outcome {
    prop_assert!(check_multinomial_divisibility(parts), "{:?}", parts);
    Ok(())
}

/// p(n) from Euler's pentagonal recurrence.
pub fn partition_numbers(nmax: usize) -> Vec<u64> {
    let mut p = vec![0i64; nmax + 1];
    p[0] = 1;
    for n in 1..=nmax {
        let mut s = 0i64;
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > n {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            s += sign * p[n - g1];
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= n {
                s += sign * p[n - g2];
            }
        }
        p[n] = s;
    }
    p.into_iter().map(|x| x as u64).collect()
}

/// `N(m,n) = N(-m,n)` and `Σ_m N(m,n) = p(n)`.
pub fn rank_count_identities(nmax: u32) -> Result<(), String> {
    let p = partition_numbers(nmax as usize);
    for n in 0..=nmax {
        let counts: BTreeMap<i64, u64> = rank_counts(n).map_err(|e| e.to_string())?;
        for (&m, &c) in &counts {
            if counts.get(&-m).copied().unwrap_or(0) != c {
                return Err(format!("N({m},{n}) != N({},{n})", -m));
            }
        }
        let total: u64 = counts.values().sum();
        if total != p[n as usize] {
            return Err(format!("Σ_m N(m,{n}) = {total}, p({n}) = {}", p[n as usize]));
        }
    }
    Ok(())
}

/// Injected fault, the check expected to catch it, and the location the
/// check must report: `(w-degree, exponent)`.
#[derive(Debug, Clone)]
pub struct Fault {
    pub family: Family,
    pub index: usize,
    pub exponent: i64,
    pub delta: Rational,
    pub check: &'static str,
    pub expected_w: Option<usize>,
}

pub fn fault() -> impl Strategy<Value = Fault> {
    let table = (1usize..=4, 1i64..=8).prop_map(|(i, e)| (Family::F, 2 * i, e, "examples_table", None));
    let routes = (1usize..=16, 0i64..25).prop_map(|(k, e)| (Family::F, k, e, "recursions_agree", None));
    let pde = (2usize..=5, 1i64..20).prop_map(|(i, e)| (Family::G, 2 * i, e, "rank_crank_pde", Some(2 * i)));
    (prop_oneof![table, routes, pde], nonzero_rational()).prop_map(|((family, index, exponent, check, expected_w), delta)| {
        Fault { family, index, exponent, delta, check, expected_w }
    })
}

/// The check must fail and point at the perturbed exponent (and w-degree).
pub fn fault_is_localized(f: &Fault) -> Outcome {
    let params = CheckParams {
        perturbations: vec![perturb(f.family, f.index, f.exponent, f.delta.clone())],
        ..CheckParams::default()
    };
    let clean = run_check(f.check, &CheckParams::default()).unwrap();
    prop_assert!(clean.passed, "{} fails without a fault", f.check);
    let report = run_check(f.check, &params).unwrap();
    prop_assert!(!report.passed, "fault {:?} not detected", f);
    let m = report.mismatch.expect("failed report carries a mismatch");
    prop_assert_eq!(&m.exponent, &f.exponent.to_string(), "{:?}", f);
    if let Some(w) = f.expected_w {
        prop_assert_eq!(m.w_degree, Some(w), "{:?}", f);
    }
    if f.check != "rank_crank_pde" {
        let label = format!("f_{}", f.index);
        let named = m.comparison.strip_prefix(&label).is_some_and(|rest| rest.starts_with([' ', ':']));
        prop_assert!(named, "{} does not name {}", m.comparison, label);
    }
    Ok(())
}

//! Named q-series: Eisenstein series `G_k`, the divisor-like sums `g_ℓ` and
//! their `(a, b)` variants, rank and crank moments, and the Eisenstein-type
//! series `f_k` by three independent constructions.
//!
//! Sequences returned by this module are indexed by weight: `seq[k]` is the
//! member of index `k`, and `seq[0]` holds the index-0 member where one is
//! defined (`g_0 = 1`, `R_0 = C_0 = 1/(q)_∞`) or the zero series otherwise.

use std::borrow::Cow;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{bernoulli, binomial, factorial, int, rat, Rational};
use crate::partitions::{
    crank_counts_gf, partition_trace, phi, psi, rank_counts, PartitionError,
    DEFAULT_PARTITION_BOUND,
};
use crate::qseries::{euler_product, partition_generating_function, QSeries, SeriesError};
use crate::wgraded::{sinh_half_kernel_reciprocal, WSeries};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EisensteinError {
    #[error("the closed formula for R_k holds only for even k >= 2, got k = {0}")]
    FormulaRouteIndex(u32),
    #[error("{family} index {index} is out of range (this cache holds indices up to {max})")]
    IndexOutOfRange {
        family: Family,
        index: usize,
        max: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// How rank moments are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankRoute {
    /// Enumerate partitions and sum `m^k N(m, n)`.
    Brute,
    /// The closed `(q)_∞`-quotient formula.
    Formula,
    /// `Brute` when every `n < order` is within the enumeration bound,
    /// otherwise `Formula`.
    Auto,
}

/// Construction used for the `f_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FRoute {
    /// Logarithm of the normalized rank generating function.
    Log,
    /// Linear recursion in the `g_ℓ`.
    Recursion1,
    /// Trace recursion in the `g_ℓ` with weight `ψ`.
    Recursion2,
}

/// The series families this crate can construct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Classical `G_k`.
    G,
    /// `g_ℓ`.
    SmallG,
    /// `g^{(a,b)}_ℓ` (no constant term).
    GGeneral { a: u32, b: u32 },
    /// Eisenstein-type `f_k`.
    F,
    /// Rank moments `R_k`.
    RankMoment,
    /// Crank moments `C_k`.
    CrankMoment,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::G => write!(f, "G"),
            Family::SmallG => write!(f, "g"),
            Family::GGeneral { a, b } => write!(f, "g^({a},{b})"),
            Family::F => write!(f, "f"),
            Family::RankMoment => write!(f, "R"),
            Family::CrankMoment => write!(f, "C"),
        }
    }
}

fn pow_int(base: i64, exp: u32) -> Rational {
    Rational::from_integer(num_traits::pow(BigInt::from(base), exp as usize))
}

fn pow2(exp: i64) -> Rational {
    if exp >= 0 {
        Rational::from_integer(BigInt::one() << exp as usize)
    } else {
        Rational::new(BigInt::one(), BigInt::one() << (-exp) as usize)
    }
}

fn fact(n: u64) -> Rational {
    Rational::from_integer(factorial(n))
}

fn dense(order: i64) -> Vec<Rational> {
    vec![Rational::zero(); order.max(0) as usize]
}

/// `G_k = -B_k/(2k) + Σ_{n,m≥1} m^{k-1} q^{nm}` for even `k`; zero for odd `k`.
pub fn eisenstein_g(k: u32, order: i64) -> QSeries {
    assert!(k >= 1, "G_k needs k >= 1");
    if k % 2 == 1 {
        return QSeries::zero(order);
    }
    let mut c = dense(order);
    if !c.is_empty() {
        c[0] = -bernoulli(k as usize) / int(2 * k as i64);
    }
    for m in 1..order {
        let mk = pow_int(m, k - 1);
        for n in 1..order {
            let e = n * m;
            if e >= order {
                break;
            }
            c[e as usize] += &mk;
        }
    }
    QSeries::from_coeffs(c, order)
}

/// `g_0 = 1`, zero for odd `ℓ`, and for even `ℓ ≥ 2`
/// `(1 - 2^{ℓ-1}) B_ℓ/(2ℓ) + Σ_{2n-1 ≥ 3m ≥ 3} (2n-3m)^{ℓ-1} q^{nm}
///  - Σ_{n-1 ≥ 6m ≥ 6} (n-6m)^{ℓ-1} q^{nm}`.
pub fn g_series(l: u32, order: i64) -> QSeries {
    if l == 0 {
        return QSeries::one(order);
    }
    if l % 2 == 1 {
        return QSeries::zero(order);
    }
    let mut s = g_general(2, 3, l, order);
    let c0 = (int(1) - pow2(l as i64 - 1)) * bernoulli(l as usize) / int(2 * l as i64);
    s = s + QSeries::constant(c0, order);
    s
}

/// `Σ_{an-1 ≥ bm ≥ b} (an-bm)^{ℓ-1} q^{nm} - Σ_{n-1 ≥ abm ≥ ab} (n-abm)^{ℓ-1} q^{nm}`,
/// with no constant term.
pub fn g_general(a: u32, b: u32, l: u32, order: i64) -> QSeries {
    assert!(a >= 1 && b >= 1, "a, b must be positive");
    assert!(l >= 1, "ℓ must be positive");
    let (a, b) = (a as i64, b as i64);
    let mut c = dense(order);
    for m in 1..order {
        // a·n ≥ b·m + 1
        let n_min = (b * m + 1 + a - 1) / a;
        if n_min * m >= order {
            break;
        }
        for n in n_min.. {
            let e = n * m;
            if e >= order {
                break;
            }
            c[e as usize] += pow_int(a * n - b * m, l - 1);
        }
    }
    let ab = a * b;
    for m in 1..order {
        let n_min = ab * m + 1;
        if n_min * m >= order {
            break;
        }
        for n in n_min.. {
            let e = n * m;
            if e >= order {
                break;
            }
            c[e as usize] -= pow_int(n - ab * m, l - 1);
        }
    }
    QSeries::from_coeffs(c, order)
}

fn resolve_rank_route(route: RankRoute, order: i64) -> RankRoute {
    match route {
        RankRoute::Auto if order - 1 <= DEFAULT_PARTITION_BOUND as i64 => RankRoute::Brute,
        RankRoute::Auto => RankRoute::Formula,
        r => r,
    }
}

/// `R_0 … R_kmax` by partition enumeration.
pub fn rank_moments_brute(kmax: u32, order: i64) -> Result<Vec<QSeries>, EisensteinError> {
    let mut coeffs = vec![dense(order); kmax as usize + 1];
    for n in 0..order.max(0) {
        for (m, count) in rank_counts(n as u32)? {
            let count = int(count as i64);
            for (k, row) in coeffs.iter_mut().enumerate() {
                if m == 0 && k > 0 {
                    continue;
                }
                row[n as usize] += pow_int(m, k as u32) * &count;
            }
        }
    }
    Ok(coeffs
        .into_iter()
        .map(|c| QSeries::from_coeffs(c, order))
        .collect())
}

/// `R_k = (2/(q)_∞) Σ_{n≥1} (-1)^{n+1} q^{n(3n-1)/2} (1 - qⁿ) Σ_{m≥0} m^k q^{nm}`
/// for even `k ≥ 2`.
pub fn rank_moment_formula(k: u32, order: i64) -> Result<QSeries, EisensteinError> {
    if k == 0 || k % 2 == 1 {
        return Err(EisensteinError::FormulaRouteIndex(k));
    }
    let mut c = dense(order);
    for n in 1i64.. {
        let base = n * (3 * n - 1) / 2;
        if base >= order {
            break;
        }
        let sign = if n % 2 == 1 { int(1) } else { int(-1) };
        for m in 0i64.. {
            let e = base + n * m;
            if e >= order {
                break;
            }
            let t = pow_int(m, k) * &sign;
            c[e as usize] += &t;
            if e + n < order {
                c[(e + n) as usize] -= t;
            }
        }
    }
    let inner = QSeries::from_coeffs(c, order);
    Ok((&inner * &partition_generating_function(order)).scale(&int(2)))
}

/// `R_k` to `order` by the chosen route. The formula route rejects `k = 0`
/// and odd `k`.
pub fn rank_moment(k: u32, order: i64, route: RankRoute) -> Result<QSeries, EisensteinError> {
    match resolve_rank_route(route, order) {
        RankRoute::Formula => rank_moment_formula(k, order),
        _ => Ok(rank_moments_brute(k, order)?.swap_remove(k as usize)),
    }
}

/// `R_0 … R_kmax` with odd members zero and `R_0 = 1/(q)_∞`.
pub fn rank_moments(kmax: u32, order: i64, route: RankRoute) -> Result<Vec<QSeries>, EisensteinError> {
    match resolve_rank_route(route, order) {
        RankRoute::Formula => (0..=kmax)
            .map(|k| match k {
                0 => Ok(partition_generating_function(order)),
                k if k % 2 == 1 => Ok(QSeries::zero(order)),
                k => rank_moment_formula(k, order),
            })
            .collect(),
        _ => rank_moments_brute(kmax, order),
    }
}

/// `C_0 … C_kmax` from the crank generating function (so `M(m, 1)` follows
/// the generating-function convention).
pub fn crank_moments(kmax: u32, order: i64) -> Vec<QSeries> {
    let gf = crank_counts_gf(order.max(1) as usize);
    (0..=kmax).map(|k| gf.moment(k)).collect()
}

pub fn crank_moment(k: u32, order: i64) -> QSeries {
    crank_moments(k, order).swap_remove(k as usize)
}

/// `f_0 … f_kmax` from the logarithm of
/// `A(w) = (q)_∞ · Σ_k R_k w^k/k! · (w/2)/sinh(w/2) = exp(2 Σ f_k w^k/k!)`.
pub fn f_via_log_with(rank: &[QSeries], kmax: usize) -> Result<Vec<QSeries>, EisensteinError> {
    let order = rank[0].order().to_integer();
    let a = normalized_rank_gf(rank, kmax)?;
    let one = QSeries::one(order);
    if let Some(m) = a.coeff(0).first_mismatch(&one) {
        return Err(EisensteinError::Inconsistent(format!(
            "[w^0] of the normalized rank generating function differs from 1 at q^{}: {}",
            m.exponent, m.left
        )));
    }
    let log = a.log()?;
    Ok((0..=kmax).map(|k| log.egf_coeff(k).scale(&rat(1, 2))).collect())
}

/// `(q)_∞ · Σ_k R_k w^k/k! · (w/2)/sinh(w/2)` to w-degree `degree`.
pub fn normalized_rank_gf(rank: &[QSeries], degree: usize) -> Result<WSeries<Rational>, EisensteinError> {
    if rank.len() <= degree {
        return Err(EisensteinError::InvalidParameter(format!(
            "need R_0..R_{degree}, got {} moments",
            rank.len()
        )));
    }
    let order = rank[0].order().to_integer();
    let egf = WSeries::from_egf(&rank[..=degree], degree);
    let recip = sinh_half_kernel_reciprocal(degree, order);
    Ok(egf.scale_q(&euler_product(order)).mul_w(&recip))
}

pub fn f_via_log(kmax: u32, order: i64) -> Result<Vec<QSeries>, EisensteinError> {
    let rank = rank_moments(kmax, order, RankRoute::Auto)?;
    f_via_log_with(&rank, kmax as usize)
}

/// `f_n = (n/2^{n-1}) g_n - Σ_{ℓ=2}^{n-2} (ℓ/2^{ℓ-2}) C(n-1, ℓ) f_{n-ℓ} g_ℓ`,
/// for all `n ≤ nmax`.
pub fn f_sequence_recursion1_with(g: &[QSeries], nmax: usize) -> Vec<QSeries> {
    let order = g[0].order().to_integer();
    let mut f = vec![QSeries::zero(order)];
    for n in 1..=nmax {
        let mut acc = g[n].scale(&(int(n as i64) / pow2(n as i64 - 1)));
        for l in 2..=n.saturating_sub(2) {
            if g[l].is_zero() || f[n - l].is_zero() {
                continue;
            }
            let c = int(l as i64) / pow2(l as i64 - 2)
                * Rational::from_integer(binomial(n as u64 - 1, l as u64));
            acc = acc - (&f[n - l] * &g[l]).scale(&c);
        }
        f.push(acc);
    }
    f
}

pub fn f_via_recursion1(n: u32, order: i64) -> QSeries {
    let g: Vec<QSeries> = (0..=n).map(|l| g_series(l, order)).collect();
    f_sequence_recursion1_with(&g, n as usize).swap_remove(n as usize)
}

/// `f_n = Σ_{ℓ=2}^{n} ((n-1)! ℓ / ((ℓ-1)! 2^{ℓ-1})) g_ℓ Tr_{n-ℓ}(ψ, f)`,
/// for all `n ≤ nmax`.
pub fn f_sequence_recursion2_with(g: &[QSeries], nmax: usize) -> Vec<QSeries> {
    let order = g[0].order().to_integer();
    let mut f = vec![QSeries::zero(order)];
    let mut traces = vec![QSeries::one(order)];
    for n in 1..=nmax {
        let mut acc = QSeries::zero(order);
        for l in 2..=n {
            if g[l].is_zero() {
                continue;
            }
            let tr = &traces[n - l];
            if tr.is_zero() {
                continue;
            }
            let c = fact(n as u64 - 1) * int(l as i64) / (fact(l as u64 - 1) * pow2(l as i64 - 1));
            acc = acc + (&g[l] * tr).scale(&c);
        }
        f.push(acc);
        traces.push(partition_trace(n as u32, psi, &f, order));
    }
    f
}

pub fn f_via_recursion2(n: u32, order: i64) -> QSeries {
    let g: Vec<QSeries> = (0..=n).map(|l| g_series(l, order)).collect();
    f_sequence_recursion2_with(&g, n as usize).swap_remove(n as usize)
}

/// Right-hand side of the closed formula for `D(f_k)`:
/// `(k!/6) Tr_{k+2}(φ, 3G - f) - ((k-1)/(6(k+1))) f_{k+2}
///  - (1/3) Σ_{a=1}^{k-1} C(k, a) f_{a+1} f_{k-a+1}`.
///
/// `f` and `g_eis` must hold indices up to `k + 2`.
pub fn d_f_rhs_with(k: usize, f: &[QSeries], g_eis: &[QSeries]) -> QSeries {
    assert!(k >= 2 && k % 2 == 0, "k must be even and at least 2");
    assert!(f.len() > k + 2 && g_eis.len() > k + 2, "need members up to index k + 2");
    let order = f[k + 2].order().min(g_eis[k + 2].order()).to_integer();
    let mut h = vec![QSeries::zero(order)];
    h.extend((1..=k + 2).map(|j| g_eis[j].scale(&int(3)) - &f[j]));
    let trace = partition_trace(k as u32 + 2, phi, &h, order).scale(&(fact(k as u64) / int(6)));
    let lin = f[k + 2].scale(&(int(k as i64 - 1) / int(6 * (k as i64 + 1))));
    let mut quad = QSeries::zero(order);
    for a in 1..k {
        let (x, y) = (&f[a + 1], &f[k - a + 1]);
        if x.is_zero() || y.is_zero() {
            continue;
        }
        quad = quad + (x * y).scale(&Rational::from_integer(binomial(k as u64, a as u64)));
    }
    trace - lin - quad.scale(&rat(1, 3))
}

/// Serre derivative `ϑ_k(a) = D(a) + 2k G_2 a`, with `G_2` at `a`'s order.
pub fn serre_derivative(a: &QSeries, k: i64) -> QSeries {
    let order = a.order().ceil().to_integer().max(1);
    let g2 = eisenstein_g(2, order);
    a.derivative() + (&g2 * a).scale(&int(2 * k))
}

/// A single coefficient shift applied when a series is read from a
/// [`SeriesCache`]; used to inject faults into identity checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub family: Family,
    pub index: usize,
    /// Integer q-exponent of the perturbed coefficient.
    pub exponent: i64,
    pub delta: Rational,
}

/// Lazily computed, shared families at one q-order and index range.
///
/// Every family is computed once on first use; the cache is `Sync`, so
/// concurrent readers are safe once warm.
#[derive(Debug)]
pub struct SeriesCache {
    order: i64,
    max_index: usize,
    rank_route: RankRoute,
    f_route: FRoute,
    perturbations: Vec<Perturbation>,
    g_eis: OnceLock<Vec<QSeries>>,
    g_small: OnceLock<Vec<QSeries>>,
    rank: OnceLock<Result<Vec<QSeries>, EisensteinError>>,
    crank: OnceLock<Vec<QSeries>>,
    f_log: OnceLock<Result<Vec<QSeries>, EisensteinError>>,
    f_rec1: OnceLock<Vec<QSeries>>,
    f_rec2: OnceLock<Vec<QSeries>>,
}

impl SeriesCache {
    pub fn new(order: i64, max_index: usize) -> Self {
        SeriesCache {
            order,
            max_index,
            rank_route: resolve_rank_route(RankRoute::Auto, order),
            f_route: FRoute::Log,
            perturbations: Vec::new(),
            g_eis: OnceLock::new(),
            g_small: OnceLock::new(),
            rank: OnceLock::new(),
            crank: OnceLock::new(),
            f_log: OnceLock::new(),
            f_rec1: OnceLock::new(),
            f_rec2: OnceLock::new(),
        }
    }

    pub fn with_rank_route(mut self, route: RankRoute) -> Self {
        self.rank_route = resolve_rank_route(route, self.order);
        self
    }

    pub fn with_f_route(mut self, route: FRoute) -> Self {
        self.f_route = route;
        self
    }

    pub fn with_perturbation(mut self, p: Perturbation) -> Self {
        self.perturbations.push(p);
        self
    }

    pub fn with_perturbations(mut self, ps: impl IntoIterator<Item = Perturbation>) -> Self {
        self.perturbations.extend(ps);
        self
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    pub fn rank_route(&self) -> RankRoute {
        self.rank_route
    }

    pub fn f_route(&self) -> FRoute {
        self.f_route
    }

    fn perturbed<'a>(&self, family: Family, seq: &'a [QSeries]) -> Cow<'a, [QSeries]> {
        let hits: Vec<&Perturbation> =
            self.perturbations.iter().filter(|p| p.family == family).collect();
        if hits.is_empty() {
            return Cow::Borrowed(seq);
        }
        let mut out = seq.to_vec();
        for p in hits {
            if let Some(s) = out.get_mut(p.index) {
                let bump = QSeries::from_terms(1, s.order(), [(p.exponent, p.delta.clone())]);
                *s = &*s + &bump;
            }
        }
        Cow::Owned(out)
    }

    // `seq` is already perturbed.
    fn member(&self, family: Family, seq: &[QSeries], k: usize) -> Result<QSeries, EisensteinError> {
        if k > self.max_index {
            return Err(EisensteinError::IndexOutOfRange {
                family,
                index: k,
                max: self.max_index,
            });
        }
        Ok(seq[k].clone())
    }

    /// `G_0 … G_max` with `G_0` the zero series.
    pub fn eisenstein_seq(&self) -> Cow<'_, [QSeries]> {
        let seq = self.g_eis.get_or_init(|| {
            let mut v = vec![QSeries::zero(self.order)];
            v.extend((1..=self.max_index).map(|k| eisenstein_g(k as u32, self.order)));
            v
        });
        self.perturbed(Family::G, seq)
    }

    pub fn eisenstein(&self, k: usize) -> Result<QSeries, EisensteinError> {
        let seq = self.eisenstein_seq();
        self.member(Family::G, &seq, k)
    }

    pub fn g_seq(&self) -> Cow<'_, [QSeries]> {
        let seq = self.g_small.get_or_init(|| {
            (0..=self.max_index)
                .map(|l| g_series(l as u32, self.order))
                .collect()
        });
        self.perturbed(Family::SmallG, seq)
    }

    pub fn g(&self, l: usize) -> Result<QSeries, EisensteinError> {
        let seq = self.g_seq();
        self.member(Family::SmallG, &seq, l)
    }

    pub fn rank_seq(&self) -> Result<Cow<'_, [QSeries]>, EisensteinError> {
        let seq = self
            .rank
            .get_or_init(|| rank_moments(self.max_index as u32, self.order, self.rank_route));
        match seq {
            Ok(s) => Ok(self.perturbed(Family::RankMoment, s)),
            Err(e) => Err(e.clone()),
        }
    }

    pub fn rank(&self, k: usize) -> Result<QSeries, EisensteinError> {
        let seq = self.rank_seq()?;
        self.member(Family::RankMoment, &seq, k)
    }

    pub fn crank_seq(&self) -> Cow<'_, [QSeries]> {
        let seq = self
            .crank
            .get_or_init(|| crank_moments(self.max_index as u32, self.order));
        self.perturbed(Family::CrankMoment, seq)
    }

    pub fn crank(&self, k: usize) -> Result<QSeries, EisensteinError> {
        let seq = self.crank_seq();
        self.member(Family::CrankMoment, &seq, k)
    }

    /// `f` by a specific route, unperturbed.
    pub fn f_seq_route(&self, route: FRoute) -> Result<&[QSeries], EisensteinError> {
        match route {
            FRoute::Log => {
                let r = self.f_log.get_or_init(|| {
                    let rank = rank_moments(self.max_index as u32, self.order, self.rank_route)?;
                    f_via_log_with(&rank, self.max_index)
                });
                r.as_deref().map_err(Clone::clone)
            }
            FRoute::Recursion1 => Ok(self.f_rec1.get_or_init(|| {
                let g = self.g_small_unperturbed();
                f_sequence_recursion1_with(g, self.max_index)
            })),
            FRoute::Recursion2 => Ok(self.f_rec2.get_or_init(|| {
                let g = self.g_small_unperturbed();
                f_sequence_recursion2_with(g, self.max_index)
            })),
        }
    }

    fn g_small_unperturbed(&self) -> &[QSeries] {
        self.g_small.get_or_init(|| {
            (0..=self.max_index)
                .map(|l| g_series(l as u32, self.order))
                .collect()
        })
    }

    /// `f_0 … f_max` by the configured route, with perturbations applied.
    pub fn f_seq(&self) -> Result<Cow<'_, [QSeries]>, EisensteinError> {
        let seq = self.f_seq_route(self.f_route)?;
        Ok(self.perturbed(Family::F, seq))
    }

    pub fn f(&self, k: usize) -> Result<QSeries, EisensteinError> {
        let seq = self.f_seq()?;
        self.member(Family::F, &seq, k)
    }

    /// Right-hand side of the `D(f_k)` formula from this cache's `f` and `G`.
    pub fn d_f_rhs(&self, k: usize) -> Result<QSeries, EisensteinError> {
        if k + 2 > self.max_index {
            return Err(EisensteinError::IndexOutOfRange {
                family: Family::F,
                index: k + 2,
                max: self.max_index,
            });
        }
        if k < 2 || k % 2 == 1 {
            return Err(EisensteinError::InvalidParameter(format!(
                "D(f_k) formula needs even k >= 2, got {k}"
            )));
        }
        let f = self.f_seq()?;
        let g = self.eisenstein_seq();
        Ok(d_f_rhs_with(k, &f, &g))
    }
}

/// Right-hand side of the `D(f_k)` formula at q-order `order`.
pub fn d_f_rhs(k: u32, order: i64) -> Result<QSeries, EisensteinError> {
    SeriesCache::new(order, k as usize + 2).d_f_rhs(k as usize)
}

/// One named member of a family, as exported by the CLI.
#[derive(Debug, Clone)]
pub struct SeriesFamily {
    pub family: Family,
    pub index: u32,
    pub order: i64,
    pub value: QSeries,
}

impl SeriesFamily {
    /// Builds the requested member. `rank_route` applies to `R`, `f_route`
    /// to `f`.
    pub fn compute(
        family: Family,
        index: u32,
        order: i64,
        rank_route: RankRoute,
        f_route: FRoute,
    ) -> Result<Self, EisensteinError> {
        if order < 1 {
            return Err(EisensteinError::InvalidParameter(format!(
                "order must be at least 1, got {order}"
            )));
        }
        let value = match family {
            Family::G => {
                if index == 0 {
                    return Err(EisensteinError::InvalidParameter("G_k needs k >= 1".into()));
                }
                eisenstein_g(index, order)
            }
            Family::SmallG => g_series(index, order),
            Family::GGeneral { a, b } => {
                if a == 0 || b == 0 || index == 0 {
                    return Err(EisensteinError::InvalidParameter(
                        "g^(a,b)_ℓ needs a, b, ℓ >= 1".into(),
                    ));
                }
                g_general(a, b, index, order)
            }
            Family::F => SeriesCache::new(order, index as usize)
                .with_f_route(f_route)
                .f(index as usize)?,
            Family::RankMoment => match resolve_rank_route(rank_route, order) {
                RankRoute::Formula if index == 0 => partition_generating_function(order),
                RankRoute::Formula if index % 2 == 1 => QSeries::zero(order),
                route => rank_moment(index, order, route)?,
            },
            Family::CrankMoment => crank_moment(index, order),
        };
        Ok(SeriesFamily {
            family,
            index,
            order,
            value,
        })
    }
}

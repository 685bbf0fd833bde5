//! Search for polynomial relations among q-series of a fixed weight.
//!
//! Every monomial of weight `W` in the chosen generators is expanded to
//! q-order `N`; the coefficient vectors become columns of an exact matrix
//! whose right nullspace is computed by fraction-free elimination. An empty
//! nullspace means no relation of weight `W` is visible to order `N`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::Rational;
use crate::eisenstein::{eisenstein_g, EisensteinError, FRoute, SeriesCache};
use crate::qseries::QSeries;

/// Extra q-coefficients required beyond the number of monomials.
pub const ORDER_MARGIN: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RelationError {
    #[error("weight must be even and at least 2, got {0}")]
    BadWeight(u32),
    #[error("q-order {order} too small for {monomials} monomials (need at least {required})")]
    InsufficientOrder {
        order: i64,
        monomials: usize,
        required: i64,
    },
    #[error("unknown generator {0:?}; expected f_k or G_k with even k >= 2")]
    BadGenerator(String),
    #[error("no generators given")]
    NoGenerators,
    #[error(transparent)]
    Series(#[from] EisensteinError),
}

/// A generator of the algebra: `f_k` or the Eisenstein series `G_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    F(u32),
    G(u32),
}

impl Generator {
    pub fn weight(self) -> u32 {
        match self {
            Generator::F(k) | Generator::G(k) => k,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::F(k) => write!(f, "f_{k}"),
            Generator::G(k) => write!(f, "G_{k}"),
        }
    }
}

impl FromStr for Generator {
    type Err = RelationError;

    /// Accepts `f_4`, `f4`, `G_6`, `G6`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RelationError::BadGenerator(s.to_string());
        let t = s.trim();
        let (head, rest) = t.split_at(t.chars().next().map_or(0, char::len_utf8));
        let k: u32 = rest.trim_start_matches('_').parse().map_err(|_| bad())?;
        if k < 2 || k % 2 == 1 {
            return Err(bad());
        }
        match head {
            "f" => Ok(Generator::F(k)),
            "G" => Ok(Generator::G(k)),
            _ => Err(bad()),
        }
    }
}

/// `f_2, f_4, …, f_{max_f}` followed by `G_2, G_4, G_6`.
pub fn default_generators(max_f: u32) -> Vec<Generator> {
    let mut g: Vec<Generator> = (1..=max_f / 2).map(|i| Generator::F(2 * i)).collect();
    g.extend([Generator::G(2), Generator::G(4), Generator::G(6)]);
    g
}

/// A product of generators with positive exponents, kept sorted by generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    factors: Vec<(Generator, u32)>,
}

impl Monomial {
    pub fn new(mut factors: Vec<(Generator, u32)>) -> Self {
        factors.retain(|&(_, e)| e > 0);
        factors.sort();
        let mut merged: Vec<(Generator, u32)> = Vec::with_capacity(factors.len());
        for (g, e) in factors {
            match merged.last_mut() {
                Some((h, x)) if *h == g => *x += e,
                _ => merged.push((g, e)),
            }
        }
        Monomial { factors: merged }
    }

    pub fn factors(&self) -> &[(Generator, u32)] {
        &self.factors
    }

    pub fn weight(&self) -> u32 {
        self.factors.iter().map(|&(g, e)| g.weight() * e).sum()
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    fn flattened(&self) -> impl Iterator<Item = Generator> + '_ {
        self.factors
            .iter()
            .flat_map(|&(g, e)| std::iter::repeat(g).take(e as usize))
    }

    /// Expands the product using `eval` for each generator.
    pub fn evaluate(&self, order: i64, eval: &impl Fn(Generator) -> QSeries) -> QSeries {
        let mut acc = QSeries::one(order);
        for &(g, e) in &self.factors {
            acc = &acc * &eval(g).pow(e);
        }
        acc
    }
}

/// Weight, then degree, then the sorted generator list lexicographically.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then(self.degree().cmp(&other.degree()))
            .then_with(|| self.flattened().cmp(other.flattened()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (g, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{g}^{e}")?;
            }
        }
        Ok(())
    }
}

/// All monomials of exact weight `weight` in `generators`, sorted.
pub fn monomial_basis(weight: u32, generators: &[Generator]) -> Result<Vec<Monomial>, RelationError> {
    if weight < 2 || weight % 2 == 1 {
        return Err(RelationError::BadWeight(weight));
    }
    let mut gens: Vec<Generator> = generators.to_vec();
    gens.sort();
    gens.dedup();
    let mut out = Vec::new();
    let mut current = Vec::new();
    collect_monomials(&gens, 0, weight, &mut current, &mut out);
    out.sort();
    Ok(out)
}

fn collect_monomials(
    gens: &[Generator],
    from: usize,
    remaining: u32,
    current: &mut Vec<(Generator, u32)>,
    out: &mut Vec<Monomial>,
) {
    if remaining == 0 {
        out.push(Monomial::new(current.clone()));
        return;
    }
    for i in from..gens.len() {
        let w = gens[i].weight();
        if w == 0 {
            continue;
        }
        for e in 1..=remaining / w {
            current.push((gens[i], e));
            collect_monomials(gens, i + 1, remaining - e * w, current, out);
            current.pop();
        }
    }
}

/// Result of one relation search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub weight: u32,
    pub order: i64,
    pub generators: Vec<String>,
    pub monomials: Vec<String>,
    /// Basis of relations, one primitive integer vector per relation, as
    /// exact strings indexed like `monomials`.
    pub nullspace: Vec<Vec<String>>,
}

impl RelationReport {
    pub fn monomial_count(&self) -> usize {
        self.monomials.len()
    }

    pub fn has_relation(&self) -> bool {
        !self.nullspace.is_empty()
    }
}

/// Right nullspace of a rational matrix given as rows, returned as primitive
/// integer vectors (first nonzero entry positive).
pub fn rational_nullspace(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<BigInt>> {
    // clear denominators column by column
    let mut scale = vec![BigInt::one(); ncols];
    for row in rows {
        for (j, x) in row.iter().enumerate() {
            scale[j] = scale[j].lcm(x.denom());
        }
    }
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(j, x)| x.numer() * (&scale[j] / x.denom()))
                .collect()
        })
        .collect();
    let pivots = bareiss_echelon(&mut a, ncols);

    let mut basis = Vec::new();
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    for free in (0..ncols).filter(|c| !pivot_cols.contains(c)) {
        let mut x = vec![Rational::zero(); ncols];
        x[free] = Rational::one();
        for &(r, c) in pivots.iter().rev() {
            let mut s = Rational::zero();
            for j in c + 1..ncols {
                if !a[r][j].is_zero() && !x[j].is_zero() {
                    s += Rational::from_integer(a[r][j].clone()) * &x[j];
                }
            }
            x[c] = -s / Rational::from_integer(a[r][c].clone());
        }
        // back to the unscaled columns
        let v: Vec<Rational> = x
            .into_iter()
            .zip(&scale)
            .map(|(xi, s)| xi * Rational::from_integer(s.clone()))
            .collect();
        basis.push(primitive(&v));
    }
    basis
}

/// Fraction-free row echelon form in place; returns `(row, column)` pivots.
fn bareiss_echelon(a: &mut [Vec<BigInt>], ncols: usize) -> Vec<(usize, usize)> {
    let m = a.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..ncols {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in rest.iter_mut() {
            let lead = std::mem::take(&mut row[c]);
            for j in c + 1..ncols {
                let t = &pivot_row[c] * &row[j] - &lead * &pivot_row[j];
                row[j] = t / &prev;
            }
        }
        prev = a[r][c].clone();
        pivots.push((r, c));
        r += 1;
    }
    pivots
}

fn primitive(v: &[Rational]) -> Vec<BigInt> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let sign = match ints.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => -BigInt::one(),
        _ => BigInt::one(),
    };
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g * &sign).collect()
}

/// Coefficient matrix (rows = q-exponents `0..order`, columns = monomials).
pub fn coefficient_matrix(
    monomials: &[Monomial],
    order: i64,
    eval: &(impl Fn(Generator) -> QSeries + Sync),
) -> Vec<Vec<Rational>> {
    let columns: Vec<QSeries> = monomials
        .par_iter()
        .map(|m| m.evaluate(order, eval))
        .collect();
    (0..order)
        .map(|e| columns.iter().map(|s| s.coeff(e)).collect())
        .collect()
}

/// Relation search with a caller-supplied evaluation of the generators.
pub fn find_relations_with(
    weight: u32,
    order: i64,
    generators: &[Generator],
    eval: &(impl Fn(Generator) -> QSeries + Sync),
) -> Result<RelationReport, RelationError> {
    if generators.is_empty() {
        return Err(RelationError::NoGenerators);
    }
    let monomials = monomial_basis(weight, generators)?;
    let required = (monomials.len() + ORDER_MARGIN) as i64;
    if order < required {
        return Err(RelationError::InsufficientOrder {
            order,
            monomials: monomials.len(),
            required,
        });
    }
    let rows = coefficient_matrix(&monomials, order, eval);
    let nullspace = rational_nullspace(&rows, monomials.len());
    let mut gens = generators.to_vec();
    gens.sort();
    gens.dedup();
    Ok(RelationReport {
        weight,
        order,
        generators: gens.iter().map(ToString::to_string).collect(),
        monomials: monomials.iter().map(ToString::to_string).collect(),
        nullspace: nullspace
            .into_iter()
            .map(|v| v.iter().map(ToString::to_string).collect())
            .collect(),
    })
}

/// Relation search with `f_k` from the linear `g_ℓ` recursion and `G_k`
/// computed directly.
pub fn find_relations(
    weight: u32,
    order: i64,
    generators: &[Generator],
) -> Result<RelationReport, RelationError> {
    for g in generators {
        if g.weight() < 2 || g.weight() % 2 == 1 {
            return Err(RelationError::BadGenerator(g.to_string()));
        }
    }
    let max_f = generators
        .iter()
        .filter_map(|g| match g {
            Generator::F(k) => Some(*k as usize),
            Generator::G(_) => None,
        })
        .max()
        .unwrap_or(0);
    let cache = SeriesCache::new(order, max_f).with_f_route(FRoute::Recursion1);
    let f = if max_f > 0 {
        cache.f_seq()?.into_owned()
    } else {
        Vec::new()
    };
    let g_cache: HashMap<u32, QSeries> = generators
        .iter()
        .filter_map(|g| match g {
            Generator::G(k) => Some((*k, eisenstein_g(*k, order))),
            Generator::F(_) => None,
        })
        .collect();
    let eval = |g: Generator| match g {
        Generator::F(k) => f[k as usize].clone(),
        Generator::G(k) => g_cache[&k].clone(),
    };
    find_relations_with(weight, order, generators, &eval)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn names(ms: &[Monomial]) -> Vec<String> {
        ms.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn weight_four_basis() {
        let gens = [Generator::F(2), Generator::F(4), Generator::G(2), Generator::G(4)];
        let b = monomial_basis(4, &gens).unwrap();
        assert_eq!(names(&b), ["f_4", "G_4", "f_2^2", "f_2*G_2", "G_2^2"]);
        let b2 = monomial_basis(2, &gens).unwrap();
        assert_eq!(names(&b2), ["f_2", "G_2"]);
        assert!(monomial_basis(3, &gens).is_err());
    }

    // Coefficient of x^W in Π_g 1/(1 - x^{wt g}).
    fn colored_partition_count(weight: u32, gens: &[Generator]) -> u64 {
        let mut c = vec![0u64; weight as usize + 1];
        c[0] = 1;
        for g in gens {
            let w = g.weight() as usize;
            for n in w..=weight as usize {
                c[n] += c[n - w];
            }
        }
        c[weight as usize]
    }

    #[test]
    fn basis_counts_match_product_formula() {
        let gens = default_generators(12);
        for w in (2..=16).step_by(2) {
            let b = monomial_basis(w, &gens).unwrap();
            assert_eq!(b.len() as u64, colored_partition_count(w, &gens), "W = {w}");
            assert!(b.windows(2).all(|p| p[0] < p[1]));
            assert!(b.iter().all(|m| m.weight() == w));
        }
    }

    #[test]
    fn generator_parsing() {
        assert_eq!("f_4".parse::<Generator>().unwrap(), Generator::F(4));
        assert_eq!("G6".parse::<Generator>().unwrap(), Generator::G(6));
        assert!("f_3".parse::<Generator>().is_err());
        assert!("h_2".parse::<Generator>().is_err());
    }

    // Gauss-Jordan over Q, independent of the fraction-free path.
    fn rank_over_q(rows: &[Vec<Rational>], ncols: usize) -> usize {
        let mut a = rows.to_vec();
        let mut r = 0;
        for c in 0..ncols {
            let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            let inv = a[r][c].recip();
            for j in 0..ncols {
                a[r][j] = &a[r][j] * &inv;
            }
            for i in 0..a.len() {
                if i != r && !a[i][c].is_zero() {
                    let t = a[i][c].clone();
                    for j in 0..ncols {
                        let d = &t * &a[r][j];
                        a[i][j] -= d;
                    }
                }
            }
            r += 1;
        }
        r
    }

    #[test]
    fn nullspace_matches_rational_elimination() {
        let rows: Vec<Vec<Rational>> = [
            [1, 2, 3, 4, 5],
            [2, 4, 6, 8, 10],
            [0, 1, 1, 0, 3],
            [1, 3, 4, 4, 8],
        ]
        .iter()
        .map(|r| r.iter().map(|&x| int(x) / int(3)).collect())
        .collect();
        let ns = rational_nullspace(&rows, 5);
        assert_eq!(ns.len(), 5 - rank_over_q(&rows, 5));
        for v in &ns {
            for row in &rows {
                let dot: Rational = row
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * Rational::from_integer(b.clone()))
                    .sum();
                assert!(dot.is_zero());
            }
        }
        let as_rows: Vec<Vec<Rational>> = ns
            .iter()
            .map(|v| v.iter().map(|x| Rational::from_integer(x.clone())).collect())
            .collect();
        assert_eq!(rank_over_q(&as_rows, 5), ns.len());
    }

    #[test]
    fn weight_four_has_no_relation() {
        let r = find_relations(4, 12, &default_generators(12)).unwrap();
        assert_eq!(r.monomial_count(), 5);
        assert!(r.nullspace.is_empty());
    }

    #[test]
    fn classical_relations_are_found() {
        let r8 = find_relations(8, 20, &[Generator::G(4), Generator::G(8)]).unwrap();
        assert_eq!(r8.monomials, ["G_8", "G_4^2"]);
        // G_8 = 120 G_4²
        assert_eq!(r8.nullspace, [vec!["1".to_string(), "-120".to_string()]]);
        let r12 = find_relations(12, 20, &[Generator::G(4), Generator::G(6), Generator::G(12)]).unwrap();
        assert_eq!(r12.nullspace.len(), 1);
        let r12_no_redundant = find_relations(12, 20, &[Generator::G(4), Generator::G(6)]).unwrap();
        assert!(r12_no_redundant.nullspace.is_empty());
    }

    #[test]
    fn single_generator() {
        let r = find_relations(4, 10, &[Generator::F(2)]).unwrap();
        assert_eq!(r.monomials, ["f_2^2"]);
        assert!(r.nullspace.is_empty());
    }

    #[test]
    fn insufficient_order_is_an_error() {
        let err = find_relations(4, 9, &default_generators(12)).unwrap_err();
        assert_eq!(
            err,
            RelationError::InsufficientOrder {
                order: 9,
                monomials: 5,
                required: 10
            }
        );
    }
}

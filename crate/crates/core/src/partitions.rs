//! Integer partitions, Dyson's rank and the Andrews–Garvan crank, the
//! distributions `N(m,n)` and `M(m,n)`, partition weights and traces.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{factorial, int, Rational};
use crate::qseries::QSeries;

/// Largest `n` for which [`partitions_of`] enumerates by default.
pub const DEFAULT_PARTITION_BOUND: u32 = 60;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("partition enumeration of n = {n} exceeds the bound {bound}")]
    BoundExceeded { n: u32, bound: u32 },
}

/// A weakly decreasing sequence of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Sorts `parts` into weakly decreasing order; zero parts are rejected.
    pub fn new(mut parts: Vec<u32>) -> Self {
        assert!(parts.iter().all(|&p| p > 0), "parts must be positive");
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn largest(&self) -> u32 {
        self.parts.first().copied().unwrap_or(0)
    }

    /// `(j, m_j)` for every part size `j` that occurs, ascending in `j`.
    pub fn multiplicities(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for &p in self.parts.iter().rev() {
            match out.last_mut() {
                Some((j, m)) if *j == p => *m += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    pub fn multiplicity(&self, j: u32) -> u32 {
        self.parts.iter().filter(|&&p| p == j).count() as u32
    }
}

/// Partitions of `n` in reverse-lexicographic order: `(n)`, `(n-1, 1)`, …,
/// `(1, …, 1)`.
#[derive(Debug, Clone)]
pub struct PartitionIter {
    current: Option<Vec<u32>>,
}

impl PartitionIter {
    pub fn new(n: u32) -> Self {
        let first = if n == 0 { Vec::new() } else { vec![n] };
        PartitionIter {
            current: Some(first),
        }
    }
}

impl Iterator for PartitionIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        let cur = self.current.take()?;
        let mut next = cur.clone();
        // Rightmost part > 1 is decremented; the freed amount is redistributed
        // in parts no larger than the new value.
        let mut ones = 0u32;
        while next.last() == Some(&1) {
            next.pop();
            ones += 1;
        }
        if let Some(last) = next.last_mut() {
            *last -= 1;
            let cap = *last;
            let mut rest = ones + 1;
            while rest > 0 {
                let p = rest.min(cap);
                next.push(p);
                rest -= p;
            }
            self.current = Some(next);
        }
        Some(Partition { parts: cur })
    }
}

/// All partitions of `n` (each exactly once), with the default bound.
pub fn partitions_of(n: u32) -> Result<Vec<Partition>, PartitionError> {
    partitions_of_bounded(n, DEFAULT_PARTITION_BOUND)
}

pub fn partitions_of_bounded(n: u32, bound: u32) -> Result<Vec<Partition>, PartitionError> {
    if n > bound {
        return Err(PartitionError::BoundExceeded { n, bound });
    }
    Ok(PartitionIter::new(n).collect())
}

/// Largest part minus number of parts; 0 for the empty partition.
pub fn rank(lambda: &Partition) -> i64 {
    lambda.largest() as i64 - lambda.len() as i64
}

/// Combinatorial crank: the largest part if there are no ones, otherwise the
/// number of parts exceeding the number of ones minus the number of ones.
/// The empty partition has crank 0.
pub fn crank(lambda: &Partition) -> i64 {
    let ones = lambda.multiplicity(1);
    if ones == 0 {
        lambda.largest() as i64
    } else {
        let mu = lambda.parts.iter().filter(|&&p| p > ones).count() as i64;
        mu - ones as i64
    }
}

fn statistic_counts(n: u32, stat: fn(&Partition) -> i64) -> Result<BTreeMap<i64, u64>, PartitionError> {
    if n > DEFAULT_PARTITION_BOUND {
        return Err(PartitionError::BoundExceeded {
            n,
            bound: DEFAULT_PARTITION_BOUND,
        });
    }
    let mut counts = BTreeMap::new();
    for lambda in PartitionIter::new(n) {
        *counts.entry(stat(&lambda)).or_insert(0) += 1;
    }
    Ok(counts)
}

/// `m ↦ N(m, n)` by enumeration.
pub fn rank_counts(n: u32) -> Result<BTreeMap<i64, u64>, PartitionError> {
    statistic_counts(n, rank)
}

/// `m ↦ (number of partitions of n with combinatorial crank m)`.
///
/// At `n = 1` the defining formula gives `crank((1)) = -1`, but the accepted
/// combinatorial value is a single partition of crank 0, which is what this
/// returns. Either way it differs from the generating-function values
/// `M(m, 1)`.
pub fn crank_counts_brute(n: u32) -> Result<BTreeMap<i64, u64>, PartitionError> {
    if n == 1 {
        return Ok(BTreeMap::from([(0, 1)]));
    }
    statistic_counts(n, crank)
}

/// Laurent polynomials in `ζ^{1/2}` attached to each power `qⁿ`, `n < N`.
///
/// Keys are doubled ζ-exponents, so `ζ^{1/2}` is key 1 and `ζ^{-1}` key -2.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentQ {
    per_power: Vec<BTreeMap<i64, Rational>>,
}

impl LaurentQ {
    pub fn one(q_order: usize) -> Self {
        let mut per_power = vec![BTreeMap::new(); q_order];
        if q_order > 0 {
            per_power[0].insert(0, Rational::one());
        }
        LaurentQ { per_power }
    }

    pub fn q_order(&self) -> usize {
        self.per_power.len()
    }

    /// Coefficient of `ζ^m qⁿ` for integer `m`.
    pub fn coeff(&self, m: i64, n: usize) -> Rational {
        self.coeff_doubled(2 * m, n)
    }

    pub fn coeff_doubled(&self, doubled_m: i64, n: usize) -> Rational {
        self.per_power[n]
            .get(&doubled_m)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// The Laurent polynomial in front of `qⁿ`, keyed by doubled exponent.
    pub fn q_power(&self, n: usize) -> &BTreeMap<i64, Rational> {
        &self.per_power[n]
    }

    /// Integer-exponent view `m ↦ coefficient` of `qⁿ`.
    pub fn counts(&self, n: usize) -> BTreeMap<i64, Rational> {
        self.per_power[n]
            .iter()
            .map(|(k, v)| {
                assert!(k % 2 == 0, "half-integer ζ-exponent at q^{n}");
                (k / 2, v.clone())
            })
            .collect()
    }

    /// Invariant under `ζ ↦ ζ^{-1}`.
    pub fn is_symmetric(&self) -> bool {
        self.per_power.iter().all(|poly| {
            poly.iter()
                .all(|(k, v)| poly.get(&-k).map_or(v.is_zero(), |w| w == v))
        })
    }

    /// Multiplies by `(1 + c ζ^{s/2} q^n)` in place.
    fn mul_binomial(&mut self, c: &Rational, doubled_s: i64, n: usize) {
        for e in (n..self.per_power.len()).rev() {
            let src: Vec<(i64, Rational)> = self.per_power[e - n]
                .iter()
                .map(|(k, v)| (k + doubled_s, v * c))
                .collect();
            add_into(&mut self.per_power[e], src);
        }
    }

    /// Divides by `(1 - ζ^{s/2} q^n)` with `n ≥ 1`, expanding geometrically.
    fn div_one_minus(&mut self, doubled_s: i64, n: usize) {
        assert!(n >= 1);
        for e in n..self.per_power.len() {
            let src: Vec<(i64, Rational)> = self.per_power[e - n]
                .iter()
                .map(|(k, v)| (k + doubled_s, v.clone()))
                .collect();
            add_into(&mut self.per_power[e], src);
        }
    }

    fn add_assign(&mut self, other: &LaurentQ) {
        for (e, poly) in other.per_power.iter().enumerate() {
            add_into(
                &mut self.per_power[e],
                poly.iter().map(|(k, v)| (*k, v.clone())).collect(),
            );
        }
    }

    fn scaled_shift(&self, c: &Rational, doubled_s: i64, n: usize) -> LaurentQ {
        let mut out = LaurentQ {
            per_power: vec![BTreeMap::new(); self.per_power.len()],
        };
        for e in n..self.per_power.len() {
            out.per_power[e] = self.per_power[e - n]
                .iter()
                .map(|(k, v)| (k + doubled_s, v * c))
                .collect();
        }
        out
    }

    /// Moment series `Σ_n Σ_m m^k c(m, n) qⁿ` over integer ζ-exponents.
    pub fn moment(&self, k: u32) -> QSeries {
        let coeffs = self
            .per_power
            .iter()
            .map(|poly| {
                poly.iter().fold(Rational::zero(), |acc, (dm, v)| {
                    let m = BigInt::from(dm / 2);
                    acc + v * Rational::from_integer(num_traits::pow(m, k as usize))
                })
            })
            .collect();
        QSeries::from_coeffs(coeffs, self.per_power.len() as i64)
    }
}

fn add_into(target: &mut BTreeMap<i64, Rational>, terms: Vec<(i64, Rational)>) {
    for (k, v) in terms {
        let slot = target.entry(k).or_insert_with(Rational::zero);
        *slot += v;
        if slot.is_zero() {
            target.remove(&k);
        }
    }
}

/// `(q)_∞ / ((ζq)_∞ (ζ^{-1}q)_∞)` to q-order `order`. This defines `M(m, n)`,
/// including `M(±1, 1) = 1`, `M(0, 1) = -1`.
pub fn crank_counts_gf(order: usize) -> LaurentQ {
    assert!(order >= 1);
    let mut acc = LaurentQ::one(order);
    for n in 1..order {
        acc.div_one_minus(2, n);
        acc.div_one_minus(-2, n);
        acc.mul_binomial(&int(-1), 0, n);
    }
    acc
}

/// `R(ζ; q)` from the Lerch sum
/// `(1-ζ)/(q)_∞ Σ_{n∈ℤ} (-1)^n q^{n(3n+1)/2} / (1 - ζqⁿ)`.
pub fn rank_counts_lerch(order: usize) -> LaurentQ {
    assert!(order >= 1);
    // The n = 0 term times (1-ζ) is exactly 1.
    let mut sum = LaurentQ::one(order);
    for n in 1i64.. {
        let pos = (n * (3 * n + 1) / 2) as usize;
        let neg = (n * (3 * n - 1) / 2) as usize;
        if pos >= order && neg + n as usize >= order {
            break;
        }
        let sign = if n % 2 == 0 { int(1) } else { int(-1) };
        // n > 0: (1-ζ) q^{pos} Σ_{j≥0} ζ^j q^{nj}
        if pos < order {
            let mut term = LaurentQ::one(order).scaled_shift(&sign, 0, pos);
            term.div_one_minus(2, n as usize);
            term.mul_binomial(&int(-1), 2, 0);
            sum.add_assign(&term);
        }
        // -n < 0: 1/(1 - ζq^{-n}) = -ζ^{-1}qⁿ/(1 - ζ^{-1}qⁿ)
        let start = neg + n as usize;
        if start < order {
            let mut term = LaurentQ::one(order).scaled_shift(&(-sign.clone()), -2, start);
            term.div_one_minus(-2, n as usize);
            term.mul_binomial(&int(-1), 2, 0);
            sum.add_assign(&term);
        }
    }
    for n in 1..order {
        sum.div_one_minus(0, n);
    }
    sum
}

/// `R(ζ; q) = Σ_{n≥0} q^{n²} / ((ζq)_n (ζ^{-1}q)_n)`.
pub fn rank_counts_hypergeometric(order: usize) -> LaurentQ {
    assert!(order >= 1);
    let mut sum = LaurentQ::one(order);
    for n in 1usize.. {
        if n * n >= order {
            break;
        }
        let mut term = LaurentQ::one(order).scaled_shift(&int(1), 0, n * n);
        for j in 1..=n {
            term.div_one_minus(2, j);
            term.div_one_minus(-2, j);
        }
        sum.add_assign(&term);
    }
    sum
}

/// `N(m, n)` for all `n < order` by enumeration, as a [`LaurentQ`].
pub fn rank_counts_table(order: usize) -> Result<LaurentQ, PartitionError> {
    let mut out = LaurentQ {
        per_power: vec![BTreeMap::new(); order],
    };
    for n in 0..order {
        let counts = rank_counts(n as u32)?;
        out.per_power[n] = counts.into_iter().map(|(m, c)| (2 * m, int(c as i64))).collect();
    }
    Ok(out)
}

/// `φ(λ) = Π_j 2^{m_j} / (m_j! · (j!)^{m_j})`.
pub fn phi(lambda: &Partition) -> Rational {
    lambda
        .multiplicities()
        .into_iter()
        .fold(Rational::one(), |acc, (j, m)| {
            let num = BigInt::one() << m;
            let den = factorial(m as u64) * num_traits::pow(factorial(j as u64), m as usize);
            acc * Rational::new(num, den)
        })
}

/// `ψ(λ) = (-1)^{number of parts} φ(λ)`.
pub fn psi(lambda: &Partition) -> Rational {
    let p = phi(lambda);
    if lambda.len() % 2 == 1 {
        -p
    } else {
        p
    }
}

/// `Tr_n(weight, h) = Σ_{λ⊢n} weight(λ) Π_j h_j^{m_j}`, with `h[j] = h_j`
/// (`h[0]` is ignored). `Tr_0 = 1`. Partitions that use an identically zero
/// `h_j` are skipped.
pub fn partition_trace(
    n: u32,
    weight: impl Fn(&Partition) -> Rational,
    h: &[QSeries],
    order: i64,
) -> QSeries {
    if n == 0 {
        return QSeries::one(order);
    }
    assert!(h.len() > n as usize, "need h_1..h_{n}");
    let mut powers: HashMap<(u32, u32), QSeries> = HashMap::new();
    let mut acc = QSeries::zero(order);
    'outer: for lambda in PartitionIter::new(n) {
        let mult = lambda.multiplicities();
        if mult.iter().any(|&(j, _)| h[j as usize].is_zero()) {
            continue 'outer;
        }
        let w = weight(&lambda);
        if w.is_zero() {
            continue;
        }
        let mut term = QSeries::constant(w, order);
        for (j, m) in mult {
            let p = powers
                .entry((j, m))
                .or_insert_with(|| h[j as usize].pow(m));
            term = &term * &*p;
        }
        acc = acc + term;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::qseries::partition_generating_function;

    // p(n) through Euler's pentagonal recurrence.
    fn p_oracle(n: usize) -> Vec<u64> {
        let s: QSeries = partition_generating_function(n as i64 + 1);
        (0..=n)
            .map(|j| s.coeff(j as i64).to_integer().try_into().unwrap())
            .collect()
    }

    #[test]
    fn counts_match_partition_function() {
        assert_eq!(partitions_of(4).unwrap().len(), 5);
        assert_eq!(partitions_of(0).unwrap(), vec![Partition::empty()]);
        assert_eq!(partitions_of(30).unwrap().len(), 5604);
        let p = p_oracle(25);
        for n in 0..=25 {
            assert_eq!(partitions_of(n as u32).unwrap().len() as u64, p[n]);
        }
    }

    #[test]
    fn enumeration_is_reverse_lexicographic_and_unique() {
        let parts: Vec<Vec<u32>> = partitions_of(5).unwrap().into_iter().map(|p| p.parts).collect();
        assert_eq!(
            parts,
            vec![
                vec![5],
                vec![4, 1],
                vec![3, 2],
                vec![3, 1, 1],
                vec![2, 2, 1],
                vec![2, 1, 1, 1],
                vec![1, 1, 1, 1, 1]
            ]
        );
        let all = partitions_of(18).unwrap();
        let mut sorted = all.clone();
        sorted.sort_by(|a, b| b.cmp(a));
        assert_eq!(all, sorted);
        sorted.dedup();
        assert_eq!(sorted.len(), all.len());
        assert!(all.iter().all(|p| p.size() == 18));
    }

    #[test]
    fn bound_is_enforced() {
        assert_eq!(
            partitions_of(61),
            Err(PartitionError::BoundExceeded { n: 61, bound: 60 })
        );
    }

    #[test]
    fn rank_and_crank_examples() {
        assert_eq!(rank(&Partition::new(vec![3, 1])), 1);
        assert_eq!(crank(&Partition::new(vec![2, 1, 1])), -2);
        assert_eq!(crank(&Partition::new(vec![4])), 4);
        assert_eq!(crank(&Partition::new(vec![1])), -1);
        assert_eq!(rank(&Partition::empty()), 0);
        assert_eq!(crank(&Partition::empty()), 0);
    }

    #[test]
    fn rank_count_examples() {
        let r4: Vec<(i64, u64)> = rank_counts(4).unwrap().into_iter().collect();
        assert_eq!(r4, vec![(-3, 1), (-1, 1), (0, 1), (1, 1), (3, 1)]);
        assert_eq!(rank_counts(0).unwrap().into_iter().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(
            crank_counts_brute(1).unwrap().into_iter().collect::<Vec<_>>(),
            vec![(0, 1)]
        );
    }

    #[test]
    fn rank_symmetry_and_totals() {
        let p = p_oracle(30);
        for n in 0..=30u32 {
            let counts = rank_counts(n).unwrap();
            assert_eq!(counts.values().sum::<u64>(), p[n as usize]);
            for (m, c) in &counts {
                assert_eq!(counts.get(&-m), Some(c), "N({m},{n})");
            }
        }
    }

    #[test]
    fn crank_generating_function() {
        let gf = crank_counts_gf(26);
        assert_eq!(gf.coeff(0, 0), int(1));
        assert_eq!(gf.q_power(0).len(), 1);
        assert_eq!(gf.coeff(-1, 1), int(1));
        assert_eq!(gf.coeff(0, 1), int(-1));
        assert_eq!(gf.coeff(1, 1), int(1));
        assert!(gf.is_symmetric());
        for n in 2..26u32 {
            let brute: BTreeMap<i64, Rational> = crank_counts_brute(n)
                .unwrap()
                .into_iter()
                .map(|(m, c)| (m, int(c as i64)))
                .collect();
            assert_eq!(gf.counts(n as usize), brute, "n = {n}");
        }
    }

    #[test]
    fn rank_generating_functions_agree_with_enumeration() {
        let brute = rank_counts_table(21).unwrap();
        assert_eq!(rank_counts_lerch(21), brute);
        assert_eq!(rank_counts_hypergeometric(21), brute);
        assert!(brute.is_symmetric());
    }

    #[test]
    fn phi_psi_examples() {
        assert_eq!(phi(&Partition::new(vec![2])), int(1));
        assert_eq!(phi(&Partition::new(vec![2, 2])), rat(1, 2));
        assert_eq!(psi(&Partition::new(vec![1])), int(-2));
        assert_eq!(phi(&Partition::empty()), int(1));
    }

    #[test]
    fn trace_of_empty_partition_is_one() {
        assert_eq!(partition_trace(0, phi, &[], 5), QSeries::one(5));
    }

    #[test]
    fn trace_skips_zero_members() {
        // h_j = j as constants, h_1 = h_3 = 0
        let h: Vec<QSeries> = (0..5)
            .map(|j| {
                if j % 2 == 1 {
                    QSeries::zero(4)
                } else {
                    QSeries::constant(int(j), 4)
                }
            })
            .collect();
        // λ = (4): φ = 2/4! = 1/12, h_4 = 4; λ = (2,2): φ = 1/2, h_2² = 4
        let tr = partition_trace(4, phi, &h, 4);
        assert_eq!(tr, QSeries::constant(rat(4, 12) + int(2), 4));
    }
}

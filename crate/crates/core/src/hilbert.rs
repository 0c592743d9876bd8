//! Cycle-index enumeration: Hilbert series, simple-graph counts,
//! connected-multigraph counts, the limit series, secondary-degree
//! polynomials and dominance certificates.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{self, class_cycle_type, conjugacy_classes, ActionSpec, DEFAULT_ORDER_CAP};
use crate::kernel::{factorial, DegreePolynomial, Dominance, TruncatedSeries};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Substitution {
    /// `1/(1 - z^i)` per `i`-cycle: multisets of positions.
    Multi,
    /// `1 + z^i` per `i`-cycle: subsets of positions.
    Simple,
}

/// `∏_i f(z^i)^{l_i}` for one cycle type, as integers up to `bound`.
fn cycle_monomial(cycle_type: &[usize], bound: usize, sub: Substitution) -> Vec<BigInt> {
    let mut s = vec![BigInt::zero(); bound + 1];
    s[0] = BigInt::one();
    for (i, &l) in cycle_type.iter().enumerate() {
        if i == 0 || l == 0 || i > bound {
            continue;
        }
        match sub {
            Substitution::Multi => multiply_inverse_power(&mut s, i, &BigInt::from(l)),
            Substitution::Simple => {
                for _ in 0..l {
                    for d in (i..=bound).rev() {
                        let t = s[d - i].clone();
                        s[d] += t;
                    }
                }
            }
        }
    }
    s
}

/// Multiplies `s` in place by `(1 - z^step)^{-c}`.
fn multiply_inverse_power(s: &mut [BigInt], step: usize, c: &BigInt) {
    if c.is_zero() {
        return;
    }
    if let Some(small) = c.to_usize().filter(|&k| k <= 64) {
        // one running sum per factor is cheaper than the binomial expansion
        for _ in 0..small {
            for d in step..s.len() {
                let t = s[d - step].clone();
                s[d] += t;
            }
        }
        return;
    }
    // descending, so every read sees the old coefficients
    for d in (step..s.len()).rev() {
        let mut acc = BigInt::zero();
        let mut binom = BigInt::one();
        let mut j = 1;
        while j * step <= d {
            // C(c + j - 1, j)
            binom = binom * (c + BigInt::from(j - 1)) / BigInt::from(j);
            if !s[d - j * step].is_zero() {
                acc += &binom * &s[d - j * step];
            }
            j += 1;
        }
        s[d] += acc;
    }
}

/// Averages the cycle monomials of weighted classes: `(1/|G|) Σ w·f`.
fn cycle_index_series(
    classes: &[(BigInt, Vec<usize>)],
    order: &BigInt,
    bound: usize,
    sub: Substitution,
) -> Result<TruncatedSeries> {
    let parts: Vec<Vec<BigInt>> = classes
        .par_iter()
        .map(|(w, ct)| {
            cycle_monomial(ct, bound, sub)
                .into_iter()
                .map(|c| c * w)
                .collect()
        })
        .collect();
    let mut total = vec![BigInt::zero(); bound + 1];
    for p in parts {
        for (t, c) in total.iter_mut().zip(p) {
            *t += c;
        }
    }
    let mut coeffs = Vec::with_capacity(bound + 1);
    for (d, t) in total.into_iter().enumerate() {
        let (q, r) = t.div_rem(order);
        if !r.is_zero() {
            return Err(Error::NonIntegral(d));
        }
        coeffs.push(q);
    }
    Ok(TruncatedSeries::from_integers(coeffs))
}

fn classes_of(action: &ActionSpec) -> Result<(Vec<(BigInt, Vec<usize>)>, BigInt)> {
    match action {
        ActionSpec::Explicit { .. } => {
            let table = group::group_table(action, DEFAULT_ORDER_CAP)?;
            let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
            for g in table.elements() {
                *counts.entry(g.cycle_type()).or_insert(0) += 1;
            }
            Ok((
                counts.into_iter().map(|(ct, c)| (BigInt::from(c), ct)).collect(),
                BigInt::from(table.order()),
            ))
        }
        _ => {
            let n = match action {
                ActionSpec::GraphEdges { n } | ActionSpec::DigraphArcs { n } => *n,
                ActionSpec::Natural { m } => *m,
                ActionSpec::Explicit { .. } => unreachable!(),
            };
            let classes = conjugacy_classes(n)
                .into_iter()
                .map(|(lambda, size)| (size, class_cycle_type(action, &lambda).unwrap()))
                .collect();
            Ok((classes, factorial(n)))
        }
    }
}

/// `H(I(G), z)` up to `bound`: the coefficient at `d` is the number of orbits
/// of degree-`d` monomials.
pub fn hilbert_series(action: &ActionSpec, bound: usize) -> Result<TruncatedSeries> {
    let (classes, order) = classes_of(action)?;
    cycle_index_series(&classes, &order, bound, Substitution::Multi)
}

/// Simple graphs on `n` vertices up to isomorphism, counted by edges.
pub fn simple_graph_counts(n: usize, bound: usize) -> TruncatedSeries {
    let (classes, order) = classes_of(&ActionSpec::GraphEdges { n }).unwrap();
    cycle_index_series(&classes, &order, bound, Substitution::Simple).unwrap()
}

/// Simple digraphs (loops allowed) on `n` vertices, counted by arcs.
pub fn simple_digraph_counts(n: usize, bound: usize) -> TruncatedSeries {
    let (classes, order) = classes_of(&ActionSpec::DigraphArcs { n }).unwrap();
    cycle_index_series(&classes, &order, bound, Substitution::Simple).unwrap()
}

/// Simple orbit counts for any action.
pub fn simple_counts(action: &ActionSpec, bound: usize) -> Result<TruncatedSeries> {
    let (classes, order) = classes_of(action)?;
    cycle_index_series(&classes, &order, bound, Substitution::Simple)
}

fn graph_hilbert_integers(k: usize, bound: usize) -> Vec<BigInt> {
    if k == 0 {
        let mut v = vec![BigInt::zero(); bound + 1];
        v[0] = BigInt::one();
        return v;
    }
    hilbert_series(&ActionSpec::GraphEdges { n: k }, bound)
        .and_then(|h| h.to_integers())
        .expect("graph Hilbert series are integral")
}

/// `N_{k,d}`: multigraphs on exactly `k` vertices, none isolated, with `d` edges.
pub fn multigraph_counts_exact_vertices(k: usize, bound: usize) -> Vec<BigInt> {
    if k == 0 {
        return graph_hilbert_integers(0, bound);
    }
    let hk = graph_hilbert_integers(k, bound);
    let hprev = graph_hilbert_integers(k - 1, bound);
    hk.into_iter().zip(hprev).map(|(a, b)| a - b).collect()
}

/// Connected multigraph counts `c(k, d)` by vertices and edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountTable {
    pub max_k: usize,
    pub max_d: usize,
    /// `rows[k][d]`.
    pub rows: Vec<Vec<BigInt>>,
}

impl CountTable {
    pub fn get(&self, k: usize, d: usize) -> &BigInt {
        &self.rows[k][d]
    }

    /// `Σ_{k ≤ max_k} c(k, d)`.
    pub fn column_sum(&self, d: usize, max_k: usize) -> BigInt {
        self.rows[..=max_k.min(self.max_k)].iter().map(|r| &r[d]).sum()
    }

    /// `Σ_{lo ≤ k ≤ hi} c(k, d)`.
    pub fn range_sum(&self, d: usize, lo: usize, hi: usize) -> BigInt {
        (lo..=hi.min(self.max_k)).map(|k| &self.rows[k][d]).sum()
    }

    /// `n_d`, the number of connected multigraphs with `d` edges (all vertex
    /// counts up to `max_k`).
    pub fn n_d(&self, d: usize) -> BigInt {
        self.column_sum(d, self.max_k)
    }
}

/// Inverts `∏ (1 - y^k z^d)^{-c(k,d)} = Σ N_{k,d} y^k z^d` cell by cell in
/// lexicographic `(k, d)` order.
pub fn connected_multigraph_counts(max_k: usize, max_d: usize) -> CountTable {
    let h: Vec<Vec<BigInt>> = (0..=max_k)
        .into_par_iter()
        .map(|k| graph_hilbert_integers(k, max_d))
        .collect();
    let exact: Vec<Vec<BigInt>> = (0..=max_k)
        .map(|k| {
            if k == 0 {
                h[0].clone()
            } else {
                h[k].iter().zip(&h[k - 1]).map(|(a, b)| a - b).collect()
            }
        })
        .collect();
    let mut p = vec![vec![BigInt::zero(); max_d + 1]; max_k + 1];
    p[0][0] = BigInt::one();
    let mut rows = vec![vec![BigInt::zero(); max_d + 1]; max_k + 1];
    for k in 0..=max_k {
        for d in 0..=max_d {
            if k == 0 && d == 0 {
                continue;
            }
            let c = &exact[k][d] - &p[k][d];
            assert!(!c.is_negative(), "negative connected count at ({k}, {d})");
            if !c.is_zero() {
                multiply_bivariate(&mut p, k, d, &c);
            }
            rows[k][d] = c;
        }
    }
    CountTable { max_k, max_d, rows }
}

/// `p *= (1 - y^k z^d)^{-c}` on a `(k, d)` grid.
fn multiply_bivariate(p: &mut [Vec<BigInt>], k: usize, d: usize, c: &BigInt) {
    let (kk, dd) = (p.len(), p[0].len());
    for a in (0..kk).rev() {
        for b in (0..dd).rev() {
            let mut acc = BigInt::zero();
            let mut binom = BigInt::one();
            let mut j = 1;
            while j * k <= a && j * d <= b {
                binom = binom * (c + BigInt::from(j - 1)) / BigInt::from(j);
                let src = &p[a - j * k][b - j * d];
                if !src.is_zero() {
                    acc += &binom * src;
                }
                j += 1;
            }
            p[a][b] += acc;
        }
    }
}

/// `∏_{d ≥ 1} (1 - z^d)^{-mult(d)}` up to `bound`.
pub fn free_series(degrees: &BTreeMap<usize, BigInt>, bound: usize) -> Result<TruncatedSeries> {
    let mut s = vec![BigInt::zero(); bound + 1];
    s[0] = BigInt::one();
    for (&d, c) in degrees {
        if d == 0 {
            return Err(Error::ZeroDegreeFactor);
        }
        if d <= bound {
            multiply_inverse_power(&mut s, d, c);
        }
    }
    Ok(TruncatedSeries::from_integers(s))
}

/// `H(Inv_∞, z) = ∏ (1 - z^d)^{-n_d}`, with `n_d` taken from vertex counts
/// up to `2·bound`.
pub fn limit_hilbert_series(bound: usize) -> TruncatedSeries {
    let table = connected_multigraph_counts(2 * bound, bound);
    let degrees = (1..=bound).map(|d| (d, table.n_d(d))).collect();
    free_series(&degrees, bound).unwrap()
}

/// Degrees `d_1 ≤ … ≤ d_m` of a homogeneous system of parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SopDegrees {
    degrees: Vec<usize>,
}

impl SopDegrees {
    pub fn new(mut degrees: Vec<usize>) -> Self {
        degrees.sort_unstable();
        SopDegrees { degrees }
    }

    /// `1, 2, …, m`: the degrees of the elementary symmetric polynomials.
    pub fn elementary(m: usize) -> Self {
        Self::new((1..=m).collect())
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn sum(&self) -> usize {
        self.degrees.iter().sum()
    }

    pub fn product(&self) -> BigInt {
        self.degrees.iter().map(|&d| BigInt::from(d)).product()
    }
}

/// `(1 - z^{d_1})⋯(1 - z^{d_m}) H(z)` as a polynomial of degree at most
/// `Σd_i - m`.
///
/// Every coefficient must be a nonnegative integer, and the coefficients
/// between `Σd_i - m` and the truncation bound must vanish.
pub fn secondary_degrees(h: &TruncatedSeries, sop: &SopDegrees) -> Result<DegreePolynomial> {
    let window = sop.sum();
    if h.bound() < window {
        return Err(Error::OutOfRange(format!(
            "series bound {} below the parameter degree sum {window}",
            h.bound()
        )));
    }
    let mut s = h.clone();
    for &d in sop.degrees() {
        s.mul_one_minus_power(d);
    }
    let top = window.saturating_sub(sop.len());
    let coeffs = s.to_integers()?;
    for (d, c) in coeffs.iter().enumerate() {
        if c.is_negative() || (d > top && !c.is_zero()) {
            return Err(Error::InfeasibleDegrees(d));
        }
    }
    Ok(DegreePolynomial::new(coeffs.into_iter().take(top + 1)))
}

/// Convenience wrapper computing the Hilbert series with the right bound.
pub fn secondary_degrees_for(action: &ActionSpec, sop: &SopDegrees) -> Result<DegreePolynomial> {
    let h = hilbert_series(action, sop.sum())?;
    secondary_degrees(&h, sop)
}

/// Number of secondaries, the top secondary degree and the resulting bound
/// on the degrees of a generating set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SecondaryStats {
    #[serde(serialize_with = "as_decimal")]
    pub t: BigInt,
    pub e_t: i64,
    pub degree_bound: i64,
}

fn as_decimal<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn secondary_stats(sop: &SopDegrees, group_order: &BigInt, mu: usize) -> Result<SecondaryStats> {
    let (t, r) = sop.product().div_rem(group_order);
    if !r.is_zero() {
        return Err(Error::NotDivisible);
    }
    let e_t = sop.sum() as i64 - sop.len() as i64 - mu as i64;
    let d_m = sop.degrees().last().copied().unwrap_or(0) as i64;
    Ok(SecondaryStats {
        t,
        e_t,
        degree_bound: d_m.max(e_t),
    })
}

/// `0` for even `n`, `⌈3(n-1)/4⌉` for odd `n`.
pub fn mu_formula(n: usize) -> usize {
    if n % 2 == 0 {
        0
    } else {
        (3 * (n - 1)).div_ceil(4)
    }
}

/// `{1, …, n} ∪ {2, …, (n-1)(n-2)/2}`.
pub fn conjectured_sop_degrees(n: usize) -> SopDegrees {
    let top = (n - 1) * (n - 2) / 2;
    SopDegrees::new((1..=n).chain(2..=top).collect())
}

/// Outcome of comparing a Hilbert series with the free series of a set of
/// candidate generator degrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DominanceCertificate {
    pub verdict: Dominance,
    pub bound: usize,
    pub hilbert: Vec<String>,
    pub free: Vec<String>,
}

impl DominanceCertificate {
    pub fn first_failure(&self) -> Option<usize> {
        match self.verdict {
            Dominance::FirstFailure(d) => Some(d),
            Dominance::Dominated => None,
        }
    }

    /// `H_d / F_d` at the failing degree.
    pub fn failure_ratio(&self) -> Option<f64> {
        let d = self.first_failure()?;
        let h: f64 = self.hilbert[d].parse().ok()?;
        let f: f64 = self.free[d].parse().ok()?;
        Some(h / f)
    }
}

/// Generators with these degrees can only generate if `H ≤ F` coefficient-wise,
/// where `F = ∏(1 - z^d)^{-mult(d)}`; the first degree with `H_d > F_d`
/// certifies non-generation.
pub fn dominance_certificate(
    h: &TruncatedSeries,
    generator_degrees: &BTreeMap<usize, BigInt>,
    bound: usize,
) -> Result<DominanceCertificate> {
    let h = h.truncate(bound)?;
    let f = free_series(generator_degrees, bound)?;
    let verdict = h.dominated_by(&f)?;
    let strs = |s: &TruncatedSeries| {
        s.to_integers()
            .map(|v| v.iter().map(ToString::to_string).collect::<Vec<_>>())
    };
    Ok(DominanceCertificate {
        verdict,
        bound,
        hilbert: strs(&h)?,
        free: strs(&f)?,
    })
}

/// Degree multiset of all simple (di)graphs with at least one edge, read off
/// a simple-count series.
pub fn degrees_from_counts(counts: &TruncatedSeries) -> Result<BTreeMap<usize, BigInt>> {
    Ok(counts
        .to_integers()?
        .into_iter()
        .enumerate()
        .skip(1)
        .filter(|(_, c)| !c.is_zero())
        .collect())
}

/// Degree counts of quasi-connected multigraphs on `n` vertices that leave at
/// least one vertex isolated: `g_d = Σ_{k=2}^{n-1} c(k, d)`.
pub fn isolated_quasi_connected_degrees(n: usize, bound: usize) -> BTreeMap<usize, BigInt> {
    let table = connected_multigraph_counts(n.saturating_sub(1), bound);
    (1..=bound)
        .map(|d| (d, table.range_sum(d, 2, n.saturating_sub(1))))
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

/// Coefficients as machine integers, for display.
pub fn series_to_u64(s: &TruncatedSeries) -> Option<Vec<u64>> {
    s.to_integers()
        .ok()?
        .iter()
        .map(|c| c.to_u64())
        .collect()
}

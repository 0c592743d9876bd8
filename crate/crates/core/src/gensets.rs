//! Linear algebra in homogeneous components: echelon bases, minimal
//! generating sets, subalgebra membership and the secondary-invariant
//! algorithm.
//!
//! Every homogeneous component `I_d` is coordinatized by its orbit-sum basis
//! (`enumerate_canonical(d)`, largest representative first), so an invariant
//! becomes a sparse row and the leading monomial is the first nonzero column.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{hilbert_series, secondary_degrees, SopDegrees};
use crate::kernel::{DegreePolynomial, Rational};
use crate::orbits::{exps, Action, ExponentVector, HomogeneousBasis, InvariantPolynomial, Product};

// ---------------------------------------------------------------------------
// Scalars

/// Coefficient field for the elimination engine.
pub trait Scalar: Clone + PartialEq + Send + Sync + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn from_bigint(b: &BigInt) -> Self;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        self.recip()
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn from_bigint(b: &BigInt) -> Self {
        Rational::from_integer(b.clone())
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

/// Residues modulo the Mersenne prime `2^61 - 1`.
///
/// Ranks over this field never exceed ranks over the rationals for integer
/// matrices, so independence found here is independence over `Q`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Fp(u64);

impl Fp {
    pub const P: u64 = (1 << 61) - 1;

    pub fn new(x: u64) -> Self {
        Fp(x % Self::P)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = Scalar::mul(&acc, &base);
            }
            base = Scalar::mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

impl Scalar for Fp {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn add(&self, other: &Self) -> Self {
        let s = self.0 + other.0;
        Fp(if s >= Self::P { s - Self::P } else { s })
    }
    fn mul(&self, other: &Self) -> Self {
        Fp(((self.0 as u128 * other.0 as u128) % Self::P as u128) as u64)
    }
    fn neg(&self) -> Self {
        Fp(if self.0 == 0 { 0 } else { Self::P - self.0 })
    }
    fn inv(&self) -> Self {
        assert!(self.0 != 0, "inverse of zero");
        self.pow(Self::P - 2)
    }
    fn from_rational(r: &Rational) -> Self {
        let n = Self::from_bigint(r.numer());
        let d = Self::from_bigint(r.denom());
        n.mul(&d.inv())
    }
    fn from_bigint(b: &BigInt) -> Self {
        let p = BigInt::from(Self::P);
        let mut r = b % &p;
        if r.is_negative() {
            r += &p;
        }
        Fp(r.to_u64().unwrap())
    }
}

/// How elimination is carried out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Arithmetic {
    /// Exact rationals.
    #[default]
    Exact,
    /// Residues modulo `2^61 - 1`. Spanning claims stay exact (independence
    /// mod p implies independence over `Q`); counts of new generators are
    /// upper bounds that agree with the exact ones unless p divides every
    /// relevant minor.
    Modular,
}

// ---------------------------------------------------------------------------
// Echelon bases

/// Sparse row: `(column, coefficient)` with increasing columns, no zeros.
pub type Row<S> = Vec<(usize, S)>;

/// Reduced row echelon form over a fixed column space.
///
/// Each row has leading coefficient 1 and no row's leading column occurs in
/// another row.
#[derive(Clone, Debug)]
pub struct Echelon<S: Scalar> {
    dim: usize,
    rows: Vec<Row<S>>,
    pivot_row: Vec<Option<usize>>,
    // row i = Σ c_j · input_j when auditing
    audit: Option<Vec<Row<S>>>,
    inputs: usize,
}

impl<S: Scalar> Echelon<S> {
    pub fn new(dim: usize) -> Self {
        Echelon {
            dim,
            rows: Vec::new(),
            pivot_row: vec![None; dim],
            audit: None,
            inputs: 0,
        }
    }

    /// Records, for every row, the combination of inserted vectors it equals.
    pub fn with_audit(dim: usize) -> Self {
        let mut e = Self::new(dim);
        e.audit = Some(Vec::new());
        e
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.dim
    }

    pub fn rows(&self) -> &[Row<S>] {
        &self.rows
    }

    /// Leading columns, in insertion order.
    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r[0].0).collect()
    }

    fn scatter(&self, v: &[(usize, S)]) -> Vec<S> {
        let mut buf = vec![S::zero(); self.dim];
        for (c, x) in v {
            buf[*c] = x.clone();
        }
        buf
    }

    /// Eliminates every pivot column from a dense buffer; returns the
    /// multipliers used, by row.
    fn eliminate(&self, buf: &mut [S]) -> Vec<(usize, S)> {
        let mut used = Vec::new();
        for c in 0..self.dim {
            if buf[c].is_zero() {
                continue;
            }
            if let Some(r) = self.pivot_row[c] {
                let f = buf[c].clone();
                for (col, x) in &self.rows[r] {
                    buf[*col] = buf[*col].sub(&f.mul(x));
                }
                used.push((r, f));
            }
        }
        used
    }

    fn gather(buf: Vec<S>) -> Row<S> {
        buf.into_iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .collect()
    }

    /// Residue of `v` modulo the span: no entry at a leading column.
    pub fn reduce(&self, v: &[(usize, S)]) -> Row<S> {
        let mut buf = self.scatter(v);
        self.eliminate(&mut buf);
        Self::gather(buf)
    }

    pub fn contains(&self, v: &[(usize, S)]) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v` to the span; errors if it already lies in it.
    pub fn insert(&mut self, v: &[(usize, S)]) -> Result<usize> {
        self.try_insert(v).ok_or(Error::ReducesToZero)
    }

    /// Adds `v` if independent, returning its leading column.
    pub fn try_insert(&mut self, v: &[(usize, S)]) -> Option<usize> {
        let input = self.inputs;
        self.inputs += 1;
        let mut buf = self.scatter(v);
        let used = self.eliminate(&mut buf);
        let mut row = Self::gather(buf);
        if row.is_empty() {
            return None;
        }
        let lead = row[0].0;
        let inv = row[0].1.inv();
        for (_, x) in row.iter_mut() {
            *x = x.mul(&inv);
        }
        let mut combo = None;
        if let Some(audit) = &self.audit {
            let mut acc: BTreeMap<usize, S> = BTreeMap::new();
            acc.insert(input, S::one());
            for (r, f) in &used {
                for (j, c) in &audit[*r] {
                    let e = acc.entry(*j).or_insert_with(S::zero);
                    *e = e.sub(&f.mul(c));
                }
            }
            combo = Some(
                acc.into_iter()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(j, c)| (j, c.mul(&inv)))
                    .collect::<Row<S>>(),
            );
        }
        // clear the new leading column from the older rows
        for r in 0..self.rows.len() {
            let Ok(pos) = self.rows[r].binary_search_by_key(&lead, |e| e.0) else {
                continue;
            };
            let f = self.rows[r][pos].1.clone();
            self.rows[r] = merge_sub(&self.rows[r], &row, &f);
            if let (Some(audit), Some(combo)) = (&mut self.audit, &combo) {
                audit[r] = merge_sub(&audit[r], combo, &f);
            }
        }
        self.pivot_row[lead] = Some(self.rows.len());
        self.rows.push(row);
        if let (Some(audit), Some(combo)) = (&mut self.audit, combo) {
            audit.push(combo);
        }
        Some(lead)
    }

    /// The recorded combination behind each row, when auditing.
    pub fn audit_trail(&self) -> Option<&[Row<S>]> {
        self.audit.as_deref()
    }
}

/// `a - f·b` for sparse rows.
fn merge_sub<S: Scalar>(a: &[(usize, S)], b: &[(usize, S)], f: &S) -> Row<S> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x.0 == y.0 => {
                i += 1;
                j += 1;
                (x.0, x.1.sub(&f.mul(&y.1)))
            }
            (Some(x), Some(y)) if x.0 < y.0 => {
                i += 1;
                x.clone()
            }
            (Some(x), None) => {
                i += 1;
                x.clone()
            }
            (_, Some(y)) => {
                j += 1;
                (y.0, f.mul(&y.1).neg())
            }
            (None, None) => unreachable!(),
        };
        if !next.1.is_zero() {
            out.push(next);
        }
    }
    out
}

/// Coordinates of a homogeneous invariant against the orbit-sum basis.
pub fn to_row<S: Scalar>(columns: &HomogeneousBasis, p: &InvariantPolynomial) -> Result<Row<S>> {
    let mut row: Row<S> = p
        .terms()
        .iter()
        .map(|(rep, c)| {
            columns
                .column(rep)
                .map(|col| (col, S::from_rational(c)))
                .ok_or(Error::NotHomogeneous)
        })
        .collect::<Result<_>>()?;
    row.sort_unstable_by_key(|e| e.0);
    row.retain(|e| !e.1.is_zero());
    Ok(row)
}

pub fn from_row(action: &Arc<Action>, columns: &HomogeneousBasis, row: &Row<Rational>) -> InvariantPolynomial {
    InvariantPolynomial::from_terms(
        action,
        row.iter().map(|(c, x)| (columns.graphs[*c].rep.clone(), x.clone())),
    )
    .expect("basis vectors belong to the action")
}

/// Row of `p · exps(b)` (or `p ⋆ exps(b)`), straight from the structure
/// constants.
fn product_row<S: Scalar>(
    action: &Action,
    columns: &HomogeneousBasis,
    p: &InvariantPolynomial,
    b: &ExponentVector,
    product: Product,
) -> Row<S> {
    let mut acc: BTreeMap<usize, S> = BTreeMap::new();
    for (g, c) in p.terms() {
        let c = S::from_rational(c);
        for (h, k) in action.orbit_product(g, b, product) {
            let col = columns.column(&h).expect("product lands in the right degree");
            let e = acc.entry(col).or_insert_with(S::zero);
            *e = e.add(&c.mul(&S::from_bigint(&k)));
        }
    }
    acc.into_iter().filter(|(_, x)| !x.is_zero()).collect()
}

/// Echelon basis of homogeneous invariants of one degree, with a provenance
/// tag per row.
#[derive(Clone, Debug)]
pub struct RowBasis {
    action: Arc<Action>,
    columns: Arc<HomogeneousBasis>,
    echelon: Echelon<Rational>,
    tags: Vec<String>,
}

impl RowBasis {
    pub fn new(action: &Arc<Action>, degree: usize) -> Self {
        let columns = action.enumerate_canonical(degree);
        RowBasis {
            action: action.clone(),
            echelon: Echelon::new(columns.dim()),
            columns,
            tags: Vec::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.columns.degree
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub fn echelon(&self) -> &Echelon<Rational> {
        &self.echelon
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    /// Reduced rows as invariants; leading monomials are pairwise distinct.
    pub fn rows(&self) -> Vec<InvariantPolynomial> {
        self.echelon
            .rows()
            .iter()
            .map(|r| from_row(&self.action, &self.columns, r))
            .collect()
    }

    fn row_of(&self, p: &InvariantPolynomial) -> Result<Row<Rational>> {
        if p.action().spec() != self.action.spec() {
            return Err(Error::ActionMismatch);
        }
        if !p.is_zero() && p.homogeneous_degree() != Some(self.degree()) {
            return Err(Error::NotHomogeneous);
        }
        to_row(&self.columns, p)
    }

    /// Residue modulo the span; zero iff `p` lies in it.
    pub fn reduce(&self, p: &InvariantPolynomial) -> Result<InvariantPolynomial> {
        let r = self.echelon.reduce(&self.row_of(p)?);
        Ok(from_row(&self.action, &self.columns, &r))
    }

    pub fn insert(&mut self, p: &InvariantPolynomial, tag: impl Into<String>) -> Result<()> {
        let row = self.row_of(p)?;
        self.echelon.insert(&row)?;
        self.tags.push(tag.into());
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Minimal generating sets

/// Where a generator came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    PrimaryKept,
    IrreducibleSecondary,
    Direct,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub poly: InvariantPolynomial,
    pub degree: usize,
    pub kind: GeneratorKind,
}

/// Order in which orbit sums are offered as new basis vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Enumeration {
    /// Largest representative first.
    #[default]
    Standard,
    Reversed,
}

impl Enumeration {
    fn order(self, dim: usize) -> Vec<usize> {
        match self {
            Enumeration::Standard => (0..dim).collect(),
            Enumeration::Reversed => (0..dim).rev().collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MgsOptions {
    pub cap: usize,
    pub product: Product,
    pub arithmetic: Arithmetic,
    pub enumeration: Enumeration,
}

impl MgsOptions {
    pub fn new(cap: usize) -> Self {
        MgsOptions {
            cap,
            product: Product::Usual,
            arithmetic: Arithmetic::Exact,
            enumeration: Enumeration::Standard,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MgsReport {
    pub generators: Vec<Generator>,
    /// `s_d` for `d ≤ cap`.
    pub s: DegreePolynomial,
    pub beta_observed: usize,
    pub degree_cap: usize,
    /// Whether the cap reaches the general degree bound `max(m, m(m-1)/2)`
    /// for permutation groups, so that no generator can be missing.
    pub complete: bool,
    pub product: Product,
    pub arithmetic: Arithmetic,
}

impl MgsReport {
    pub fn degrees(&self) -> Vec<usize> {
        self.generators.iter().map(|g| g.degree).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "generators": self.generators.iter().map(|g| serde_json::json!({
                "degree": g.degree,
                "kind": g.kind,
                "invariant": g.poly.to_json(),
                "encoding": g.poly.encode(),
            })).collect::<Vec<_>>(),
            "s": self.s.coeffs().iter().map(ToString::to_string).collect::<Vec<_>>(),
            "count": self.generators.len(),
            "beta_observed": self.beta_observed,
            "degree_cap": self.degree_cap,
            "complete": self.complete,
            "product": self.product,
            "arithmetic": self.arithmetic,
        })
    }
}

/// Göbel's bound for permutation groups on `m` points.
pub fn permutation_degree_bound(m: usize) -> usize {
    m.max(m * m.saturating_sub(1) / 2)
}

const CHUNK: usize = 64;

/// Feeds candidate rows into `echelon` in a fixed order, computing them in
/// parallel chunks, until the rank reaches `target`.
fn fill_until<S: Scalar, F>(echelon: &mut Echelon<S>, count: usize, target: usize, make: F) -> Vec<usize>
where
    F: Fn(usize) -> Row<S> + Sync,
{
    let mut accepted = Vec::new();
    let mut next = 0;
    while next < count && echelon.rank() < target {
        let end = (next + CHUNK).min(count);
        let rows: Vec<Row<S>> = (next..end).into_par_iter().map(&make).collect();
        for (i, row) in (next..end).zip(rows) {
            if echelon.rank() >= target {
                break;
            }
            if echelon.try_insert(&row).is_some() {
                accepted.push(i);
            }
        }
        next = end;
    }
    accepted
}

/// Degree-by-degree minimal generating set: products of the generators found
/// so far span `K[I_{<d}]_d`, and orbit sums independent of them are added.
pub fn minimal_generating_set(action: &Arc<Action>, degree_cap: usize, product: Product) -> MgsReport {
    let mut opts = MgsOptions::new(degree_cap);
    opts.product = product;
    minimal_generating_set_with(action, &opts)
}

pub fn minimal_generating_set_with(action: &Arc<Action>, opts: &MgsOptions) -> MgsReport {
    match opts.arithmetic {
        Arithmetic::Exact => mgs_impl::<Rational>(action, opts),
        Arithmetic::Modular => mgs_impl::<Fp>(action, opts),
    }
}

fn mgs_impl<S: Scalar>(action: &Arc<Action>, opts: &MgsOptions) -> MgsReport {
    let mut generators: Vec<Generator> = Vec::new();
    let mut s = vec![0u64; opts.cap + 1];
    for d in 1..=opts.cap {
        let columns = action.enumerate_canonical(d);
        let dim = columns.dim();
        let mut echelon = Echelon::<S>::new(dim);
        // every product of generators of total degree d has a factor of
        // degree k ≤ d/2 times something in I_{d-k}
        let mut jobs: Vec<(usize, usize)> = Vec::new();
        for (gi, g) in generators.iter().enumerate() {
            if 2 * g.degree <= d {
                let rest = action.enumerate_canonical(d - g.degree).dim();
                jobs.extend((0..rest).map(|b| (gi, b)));
            }
        }
        fill_until(&mut echelon, jobs.len(), dim, |i| {
            let (gi, b) = jobs[i];
            let g = &generators[gi];
            let rest = action.enumerate_canonical(d - g.degree);
            product_row(action, &columns, &g.poly, &rest.graphs[b].rep, opts.product)
        });
        for col in opts.enumeration.order(dim) {
            if echelon.is_full() {
                break;
            }
            if echelon.try_insert(&[(col, S::one())]).is_some() {
                generators.push(Generator {
                    poly: exps(action, &columns.graphs[col].rep),
                    degree: d,
                    kind: GeneratorKind::Direct,
                });
                s[d] += 1;
            }
        }
    }
    let beta_observed = generators.iter().map(|g| g.degree).max().unwrap_or(0);
    MgsReport {
        generators,
        s: DegreePolynomial::new(s),
        beta_observed,
        degree_cap: opts.cap,
        complete: opts.cap >= permutation_degree_bound(action.positions()),
        product: opts.product,
        arithmetic: opts.arithmetic,
    }
}

/// `dim I_d - dim K[I_{<d}]_d`, spanning the decomposable part by all
/// products of pairs of orbit sums. Slow; meant as an oracle.
pub fn s_d_by_definition(action: &Arc<Action>, d: usize, product: Product) -> usize {
    let columns = action.enumerate_canonical(d);
    let dim = columns.dim();
    let mut echelon = Echelon::<Rational>::new(dim);
    let mut jobs = Vec::new();
    for k in 1..=d / 2 {
        let a = action.enumerate_canonical(k).dim();
        let b = action.enumerate_canonical(d - k).dim();
        for i in 0..a {
            for j in 0..b {
                jobs.push((k, i, j));
            }
        }
    }
    fill_until(&mut echelon, jobs.len(), dim, |t| {
        let (k, i, j) = jobs[t];
        let g = &action.enumerate_canonical(k).graphs[i].rep;
        let h = &action.enumerate_canonical(d - k).graphs[j].rep;
        let p = exps(action, g);
        product_row(action, &columns, &p, h, product)
    });
    dim - echelon.rank()
}

// ---------------------------------------------------------------------------
// Subalgebra membership

/// Degree-by-degree spans of the subalgebra generated by a set of
/// homogeneous invariants.
pub struct SubalgebraSpans {
    action: Arc<Action>,
    generators: Vec<(usize, InvariantPolynomial)>,
    product: Product,
    // independent products per degree, and their echelon basis
    spans: BTreeMap<usize, (Vec<InvariantPolynomial>, Echelon<Rational>)>,
}

/// Result of a membership test; on failure the residue is a witness.
#[derive(Clone, Debug)]
pub struct Membership {
    pub member: bool,
    pub residue: InvariantPolynomial,
    pub span_dim: usize,
    pub component_dim: usize,
}

impl SubalgebraSpans {
    pub fn new(action: &Arc<Action>, generators: &[InvariantPolynomial], product: Product) -> Result<Self> {
        let generators = generators
            .iter()
            .map(|g| {
                if g.action().spec() != action.spec() {
                    return Err(Error::ActionMismatch);
                }
                g.homogeneous_degree()
                    .filter(|&d| d > 0)
                    .map(|d| (d, g.clone()))
                    .ok_or(Error::NotHomogeneous)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SubalgebraSpans {
            action: action.clone(),
            generators,
            product,
            spans: BTreeMap::new(),
        })
    }

    /// `A_d = span(G_d) + Σ_k G_k · A_{d-k}`.
    fn ensure(&mut self, d: usize) {
        if self.spans.contains_key(&d) {
            return;
        }
        for e in 1..d {
            self.ensure(e);
        }
        let columns = self.action.enumerate_canonical(d);
        let mut echelon = Echelon::<Rational>::new(columns.dim());
        let mut kept = Vec::new();
        let mut candidates: Vec<InvariantPolynomial> = self
            .generators
            .iter()
            .filter(|(gd, _)| *gd == d)
            .map(|(_, g)| g.clone())
            .collect();
        for (gd, g) in &self.generators {
            if *gd < d {
                let lower = &self.spans[&(d - gd)].0;
                let prods: Vec<InvariantPolynomial> = lower
                    .par_iter()
                    .map(|a| g.product(a, self.product).expect("same action"))
                    .collect();
                candidates.extend(prods);
            }
        }
        for c in candidates {
            if echelon.is_full() {
                break;
            }
            let row = to_row(&columns, &c).expect("homogeneous product");
            if echelon.try_insert(&row).is_some() {
                kept.push(c);
            }
        }
        self.spans.insert(d, (kept, echelon));
    }

    pub fn span_dim(&mut self, d: usize) -> usize {
        if d == 0 {
            return 1;
        }
        self.ensure(d);
        self.spans[&d].1.rank()
    }

    pub fn contains(&mut self, p: &InvariantPolynomial) -> Result<Membership> {
        if p.is_zero() {
            return Ok(Membership {
                member: true,
                residue: p.clone(),
                span_dim: 0,
                component_dim: 0,
            });
        }
        let d = p.homogeneous_degree().ok_or(Error::NotHomogeneous)?;
        let columns = self.action.enumerate_canonical(d);
        if d == 0 {
            return Ok(Membership {
                member: true,
                residue: InvariantPolynomial::zero(&self.action),
                span_dim: 1,
                component_dim: 1,
            });
        }
        self.ensure(d);
        let echelon = &self.spans[&d].1;
        let residue = echelon.reduce(&to_row(&columns, p)?);
        Ok(Membership {
            member: residue.is_empty(),
            residue: from_row(&self.action, &columns, &residue),
            span_dim: echelon.rank(),
            component_dim: columns.dim(),
        })
    }
}

/// Whether `p` lies in the algebra generated by `generators`.
pub fn subalgebra_membership(
    p: &InvariantPolynomial,
    generators: &[InvariantPolynomial],
    degree_cap: usize,
) -> Result<Membership> {
    let d = p.homogeneous_degree().unwrap_or(0);
    if !p.is_zero() && p.homogeneous_degree().is_none() {
        return Err(Error::NotHomogeneous);
    }
    if d > degree_cap {
        return Err(Error::OutOfRange(format!("degree {d} above cap {degree_cap}")));
    }
    SubalgebraSpans::new(p.action(), generators, Product::Usual)?.contains(p)
}

// ---------------------------------------------------------------------------
// Secondary invariants

#[derive(Clone, Debug)]
pub struct Secondary {
    pub poly: InvariantPolynomial,
    pub degree: usize,
    /// Not a product of earlier secondaries.
    pub irreducible: bool,
}

#[derive(Clone, Debug)]
pub struct SecondaryReport {
    pub secondaries: Vec<Secondary>,
    /// Indices (into the parameter list) of primaries lying in the algebra
    /// generated by invariants of lower degree.
    pub removable_primaries: Vec<usize>,
    /// The count prescribed by the Hilbert series at each degree.
    pub expected: DegreePolynomial,
    /// `dim ⟨θ⟩_d` for every degree up to the cap.
    pub ideal_dims: Vec<usize>,
    pub component_dims: Vec<usize>,
    pub degree_cap: usize,
}

impl SecondaryReport {
    pub fn degree_polynomial(&self) -> DegreePolynomial {
        DegreePolynomial::from_degrees(&self.secondaries.iter().map(|s| s.degree).collect::<Vec<_>>())
    }

    pub fn irreducibles(&self) -> Vec<&Secondary> {
        self.secondaries
            .iter()
            .filter(|s| s.irreducible && s.degree > 0)
            .collect()
    }

    /// Kept primaries plus irreducible secondaries.
    pub fn generating_set(&self, sop: &[InvariantPolynomial]) -> Vec<Generator> {
        let mut out: Vec<Generator> = sop
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.removable_primaries.contains(i))
            .map(|(_, p)| Generator {
                degree: p.homogeneous_degree().unwrap_or(0),
                poly: p.clone(),
                kind: GeneratorKind::PrimaryKept,
            })
            .collect();
        out.extend(self.irreducibles().into_iter().map(|s| Generator {
            poly: s.poly.clone(),
            degree: s.degree,
            kind: GeneratorKind::IrreducibleSecondary,
        }));
        out.sort_by_key(|g| g.degree);
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "count": self.secondaries.len(),
            "degrees": self.secondaries.iter().map(|s| s.degree).collect::<Vec<_>>(),
            "secondaries": self.secondaries.iter().map(|s| serde_json::json!({
                "degree": s.degree,
                "irreducible": s.irreducible,
                "invariant": s.poly.to_json(),
            })).collect::<Vec<_>>(),
            "removable_primaries": self.removable_primaries,
            "expected": self.expected.coeffs().iter().map(ToString::to_string).collect::<Vec<_>>(),
            "ideal_dims": self.ideal_dims,
            "component_dims": self.component_dims,
            "degree_cap": self.degree_cap,
        })
    }
}

#[derive(Clone, Debug)]
pub struct SecondaryOptions {
    pub degree_cap: usize,
    pub product: Product,
    pub arithmetic: Arithmetic,
    pub enumeration: Enumeration,
}

impl SecondaryOptions {
    pub fn new(degree_cap: usize) -> Self {
        SecondaryOptions {
            degree_cap,
            product: Product::Usual,
            arithmetic: Arithmetic::Exact,
            enumeration: Enumeration::Standard,
        }
    }
}

/// Secondary invariants over a homogeneous system of parameters.
///
/// At each degree `d` the ideal part `⟨θ⟩_d = Σ θ_i · I_{d-d_i}` is spanned
/// first, then products of earlier secondaries are tried, then orbit sums,
/// until the count prescribed by the Hilbert series is reached.
pub fn algorithm1_secondaries(
    action: &Arc<Action>,
    sop: &[InvariantPolynomial],
    opts: &SecondaryOptions,
) -> Result<SecondaryReport> {
    match opts.arithmetic {
        Arithmetic::Exact => secondaries_impl::<Rational>(action, sop, opts),
        Arithmetic::Modular => secondaries_impl::<Fp>(action, sop, opts),
    }
}

fn secondaries_impl<S: Scalar>(
    action: &Arc<Action>,
    sop: &[InvariantPolynomial],
    opts: &SecondaryOptions,
) -> Result<SecondaryReport> {
    let degrees = sop
        .iter()
        .map(|t| {
            if t.action().spec() != action.spec() {
                return Err(Error::ActionMismatch);
            }
            t.homogeneous_degree().filter(|&d| d > 0).ok_or(Error::NotHomogeneous)
        })
        .collect::<Result<Vec<usize>>>()?;
    if degrees.len() != action.positions() {
        return Err(Error::OutOfRange(format!(
            "{} parameters for {} variables",
            degrees.len(),
            action.positions()
        )));
    }
    let sop_degrees = SopDegrees::new(degrees.clone());
    let h = hilbert_series(action.spec(), sop_degrees.sum())?;
    let expected = secondary_degrees(&h, &sop_degrees)?;

    let mut secondaries = vec![Secondary {
        poly: InvariantPolynomial::one(action),
        degree: 0,
        irreducible: true,
    }];
    let mut ideal_dims = vec![0];
    let mut component_dims = vec![1];
    for d in 1..=opts.degree_cap {
        let columns = action.enumerate_canonical(d);
        let dim = columns.dim();
        let want = expected.coeff(d).to_usize().unwrap_or(usize::MAX);
        let target = dim.checked_sub(want).ok_or(Error::InfeasibleDegrees(d))?;
        let mut echelon = Echelon::<S>::new(dim);

        let mut jobs: Vec<(usize, usize)> = Vec::new();
        for (i, &di) in degrees.iter().enumerate() {
            if di <= d {
                let rest = action.enumerate_canonical(d - di).dim();
                jobs.extend((0..rest).map(|b| (i, b)));
            }
        }
        fill_until(&mut echelon, jobs.len(), target, |t| {
            let (i, b) = jobs[t];
            let rest = action.enumerate_canonical(d - degrees[i]);
            product_row(action, &columns, &sop[i], &rest.graphs[b].rep, opts.product)
        });
        let ideal_dim = echelon.rank();
        ideal_dims.push(ideal_dim);
        component_dims.push(dim);
        if ideal_dim != target {
            return Err(Error::InfeasibleDegrees(d));
        }

        let mut found = 0;
        // products of two earlier secondaries cover every product
        let earlier: Vec<usize> = (1..secondaries.len()).collect();
        'pairs: for (x, &a) in earlier.iter().enumerate() {
            for &b in &earlier[x..] {
                if found == want {
                    break 'pairs;
                }
                let (sa, sb) = (&secondaries[a], &secondaries[b]);
                if sa.degree + sb.degree != d {
                    continue;
                }
                let prod = sa.poly.product(&sb.poly, opts.product)?;
                if echelon.try_insert(&to_row(&columns, &prod)?).is_some() {
                    secondaries.push(Secondary {
                        poly: prod,
                        degree: d,
                        irreducible: false,
                    });
                    found += 1;
                }
            }
        }
        for col in opts.enumeration.order(dim) {
            if found == want {
                break;
            }
            if echelon.try_insert(&[(col, S::one())]).is_some() {
                secondaries.push(Secondary {
                    poly: exps(action, &columns.graphs[col].rep),
                    degree: d,
                    irreducible: true,
                });
                found += 1;
            }
        }
        if found != want {
            return Err(Error::EnumerationExhausted {
                degree: d,
                found,
                expected: want,
            });
        }
    }

    let mut removable_primaries = Vec::new();
    for (i, theta) in sop.iter().enumerate() {
        if decomposable(action, theta, degrees[i], opts.product)? {
            removable_primaries.push(i);
        }
    }
    Ok(SecondaryReport {
        secondaries,
        removable_primaries,
        expected,
        ideal_dims,
        component_dims,
        degree_cap: opts.degree_cap,
    })
}

/// Whether `p ∈ K[I_{<d}]_d`, spanning by products of pairs of orbit sums.
pub fn decomposable(action: &Arc<Action>, p: &InvariantPolynomial, d: usize, product: Product) -> Result<bool> {
    let columns = action.enumerate_canonical(d);
    let dim = columns.dim();
    let mut echelon = Echelon::<Rational>::new(dim);
    let mut jobs = Vec::new();
    for k in 1..=d / 2 {
        let a = action.enumerate_canonical(k).dim();
        let b = action.enumerate_canonical(d - k).dim();
        for i in 0..a {
            for j in 0..b {
                jobs.push((k, i, j));
            }
        }
    }
    fill_until(&mut echelon, jobs.len(), dim, |t| {
        let (k, i, j) = jobs[t];
        let g = &action.enumerate_canonical(k).graphs[i].rep;
        let h = &action.enumerate_canonical(d - k).graphs[j].rep;
        product_row(action, &columns, &exps(action, g), h, product)
    });
    Ok(echelon.contains(&to_row(&columns, p)?))
}

/// `e_1, …, e_m` as a parameter system.
pub fn elementary_parameters(action: &Arc<Action>) -> Result<Vec<InvariantPolynomial>> {
    (1..=action.positions())
        .map(|k| crate::orbits::elementary_symmetric(action, k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::ActionSpec;
    use crate::orbits::{elementary_symmetric, parse_polynomial, parse_vector};
    use proptest::prelude::*;

    fn ev(s: &str) -> ExponentVector {
        parse_vector(s).unwrap().vector
    }

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn fp_arithmetic() {
        let a = Fp::new(12345);
        assert_eq!(a.mul(&a.inv()), Fp::one());
        assert_eq!(Fp::from_bigint(&BigInt::from(-1)), Fp(Fp::P - 1));
        let half = Fp::from_rational(&Rational::new(1.into(), 2.into()));
        assert_eq!(half.add(&half), Fp::one());
    }

    #[test]
    fn reduce_and_insert_in_degree_two() {
        let a = Action::graph(4).unwrap();
        let mut basis = RowBasis::new(&a, 2);
        let e1 = elementary_symmetric(&a, 1).unwrap();
        let e1sq = e1.mul(&e1).unwrap();
        // reducing against nothing changes nothing
        assert_eq!(basis.reduce(&e1sq).unwrap(), e1sq);
        basis.insert(&exps(&a, &ev("g:4:200000")), "double edge").unwrap();
        let r = basis.reduce(&e1sq).unwrap();
        assert!(!Zero::is_zero(&r.coeff(&ev("g:4:110000"))));
        assert!(Zero::is_zero(&r.coeff(&ev("g:4:200000"))));
        basis.insert(&e1sq, "e1^2").unwrap();
        assert!(basis.reduce(&e1sq).unwrap().is_zero());
        assert_eq!(basis.insert(&e1sq, "again"), Err(Error::ReducesToZero));
        basis.insert(&exps(&a, &ev("g:4:100001")), "disjoint").unwrap();
        assert_eq!(basis.rank(), 3);
        // echelon shape: distinct leading monomials, leading coefficient 1
        let rows = basis.rows();
        let leads: Vec<_> = rows.iter().map(|r| r.leading().unwrap().0.clone()).collect();
        for (i, r) in rows.iter().enumerate() {
            for (j, l) in leads.iter().enumerate() {
                if i != j {
                    assert!(Zero::is_zero(&r.coeff(l)));
                }
            }
        }
        assert_eq!(basis.tags().len(), 3);
        assert!(basis.reduce(&exps(&a, &ev("g:4:100000"))).is_err());
    }

    fn arb_rows(dim: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        proptest::collection::vec(proptest::collection::vec(-3i64..=3, dim), 1..8)
    }

    fn sparse(v: &[i64]) -> Row<Rational> {
        v.iter()
            .enumerate()
            .filter(|(_, x)| **x != 0)
            .map(|(i, x)| (i, q(*x)))
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn audit_trail_reexpands(rows in arb_rows(6)) {
            let mut e = Echelon::<Rational>::with_audit(6);
            for r in &rows {
                let _ = e.try_insert(&sparse(r));
            }
            let trail = e.audit_trail().unwrap();
            for (row, combo) in e.rows().iter().zip(trail) {
                let mut acc = vec![q(0); 6];
                for (j, c) in combo {
                    for (k, x) in rows[*j].iter().enumerate() {
                        acc[k] += c * q(*x);
                    }
                }
                let mut want = vec![q(0); 6];
                for (k, x) in row {
                    want[*k] = x.clone();
                }
                prop_assert_eq!(acc, want);
                prop_assert!(row[0].1.is_one());
            }
        }

        #[test]
        fn modular_rank_matches_exact_on_small_integers(rows in arb_rows(5)) {
            let mut e = Echelon::<Rational>::new(5);
            let mut f = Echelon::<Fp>::new(5);
            for r in &rows {
                e.try_insert(&sparse(r));
                let fr: Row<Fp> = sparse(r).iter().map(|(i, x)| (*i, Fp::from_rational(x))).collect();
                f.try_insert(&fr);
            }
            prop_assert_eq!(e.rank(), f.rank());
            prop_assert_eq!(e.pivots(), f.pivots());
        }
    }

    #[test]
    fn mgs_small_graphs() {
        let a3 = Action::graph(3).unwrap();
        let r3 = minimal_generating_set(&a3, 3, Product::Usual);
        assert_eq!(r3.degrees(), [1, 2, 3]);
        assert!(r3.complete);

        let a4 = Action::graph(4).unwrap();
        let r4 = minimal_generating_set(&a4, 6, Product::Usual);
        assert_eq!(r4.degrees(), [1, 2, 2, 3, 3, 3, 4, 4, 5]);
        assert_eq!(r4.beta_observed, 5);
        assert_eq!(r4.s, DegreePolynomial::new([0, 1, 2, 3, 2, 1]));
        assert!(!r4.complete);
        assert_eq!(r4.generators[0].poly, elementary_symmetric(&a4, 1).unwrap());
    }

    #[test]
    fn s_d_matches_definition() {
        for n in [3, 4] {
            let a = Action::graph(n).unwrap();
            let r = minimal_generating_set(&a, 7, Product::Usual);
            for d in 1..=7 {
                assert_eq!(r.s.coeff(d), BigInt::from(s_d_by_definition(&a, d, Product::Usual)), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn s_d_is_independent_of_order_and_arithmetic() {
        let a = Action::graph(4).unwrap();
        let base = minimal_generating_set(&a, 7, Product::Usual);
        for (arith, en) in [
            (Arithmetic::Exact, Enumeration::Reversed),
            (Arithmetic::Modular, Enumeration::Standard),
            (Arithmetic::Modular, Enumeration::Reversed),
        ] {
            let mut o = MgsOptions::new(7);
            o.arithmetic = arith;
            o.enumeration = en;
            let r = minimal_generating_set_with(&a, &o);
            assert_eq!(r.s, base.s);
        }
        let mut o = MgsOptions::new(7);
        o.enumeration = Enumeration::Reversed;
        let rev = minimal_generating_set_with(&a, &o);
        assert_ne!(
            rev.generators.iter().map(|g| g.poly.clone()).collect::<Vec<_>>(),
            base.generators.iter().map(|g| g.poly.clone()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn generators_generate() {
        let a = Action::graph(4).unwrap();
        let r = minimal_generating_set(&a, 7, Product::Usual);
        let gens: Vec<_> = r.generators.iter().map(|g| g.poly.clone()).collect();
        let mut spans = SubalgebraSpans::new(&a, &gens, Product::Usual).unwrap();
        for d in 1..=7 {
            assert_eq!(spans.span_dim(d), a.enumerate_canonical(d).dim());
            for g in a.enumerate_canonical(d).graphs.iter() {
                assert!(spans.contains(&exps(&a, &g.rep)).unwrap().member);
            }
        }
    }

    #[test]
    fn membership_examples() {
        let a4 = Action::graph(4).unwrap();
        let gens = vec![
            elementary_symmetric(&a4, 1).unwrap(),
            exps(&a4, &ev("g:4:200000")),
            exps(&a4, &ev("g:4:110000")),
            exps(&a4, &ev("g:4:100001")),
        ];
        let e2 = elementary_symmetric(&a4, 2).unwrap();
        assert!(subalgebra_membership(&e2, &gens, 2).unwrap().member);
        assert!(subalgebra_membership(&e2, &gens, 1).is_err());

        // two simple digraph witnesses outside the simple subalgebra
        let d3 = Action::digraph(3).unwrap();
        let simple: Vec<_> = (1..=3).flat_map(|d| crate::orbits::simple_graph_orbit_sums(&d3, d)).collect();
        let mut spans = SubalgebraSpans::new(&d3, &simple, Product::Usual).unwrap();
        for w in ["d:3:020001000", "d:3:010002000"] {
            let m = spans.contains(&exps(&d3, &ev(w))).unwrap();
            assert!(!m.member, "{w}");
            assert!(!m.residue.is_zero());
        }
    }

    #[test]
    fn algorithm1_trivial_and_n4() {
        let a3 = Action::graph(3).unwrap();
        let sop3 = elementary_parameters(&a3).unwrap();
        let r3 = algorithm1_secondaries(&a3, &sop3, &SecondaryOptions::new(3)).unwrap();
        assert_eq!(r3.secondaries.len(), 1);
        assert_eq!(r3.secondaries[0].degree, 0);

        let a4 = Action::graph(4).unwrap();
        let sop = elementary_parameters(&a4).unwrap();
        let mut opts = SecondaryOptions::new(15);
        opts.arithmetic = Arithmetic::Modular;
        let r = algorithm1_secondaries(&a4, &sop, &opts).unwrap();
        assert_eq!(r.secondaries.len(), 30);
        assert_eq!(r.degree_polynomial(), r.expected);
        for d in 0..=15 {
            assert_eq!(
                r.ideal_dims[d] + r.expected.coeff(d).to_usize().unwrap(),
                r.component_dims[d]
            );
        }
        assert_eq!(r.removable_primaries, [5]);
        let gens = r.generating_set(&sop);
        assert_eq!(gens.iter().map(|g| g.degree).collect::<Vec<_>>(), [1, 2, 2, 3, 3, 3, 4, 4, 5]);
    }

    #[test]
    fn algorithm1_rejects_bad_input() {
        let a4 = Action::graph(4).unwrap();
        let mut sop = elementary_parameters(&a4).unwrap();
        sop.pop();
        assert!(algorithm1_secondaries(&a4, &sop, &SecondaryOptions::new(3)).is_err());
        let mixed = parse_polynomial(&a4, "g:4:100000 + g:4:110000").unwrap();
        sop.push(mixed);
        assert_eq!(
            algorithm1_secondaries(&a4, &sop, &SecondaryOptions::new(3)).unwrap_err(),
            Error::NotHomogeneous
        );
    }

    #[test]
    fn alternating_group_generators() {
        let a = Action::new(ActionSpec::alternating(4).unwrap()).unwrap();
        let r = minimal_generating_set(&a, 6, Product::Usual);
        assert_eq!(r.degrees(), [1, 2, 3, 4, 6]);
        assert_eq!(r.s, DegreePolynomial::new([0, 1, 1, 1, 1, 0, 1]));
        assert!(!r.s.is_unimodal(false));
        assert!(r.complete);
    }
}

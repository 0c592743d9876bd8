//! The orbit-sum basis of an invariant ring.
//!
//! A monomial is an [`ExponentVector`] (a labelled multigraph when the action
//! is on edges). Its orbit sum `exps(g)` is the sum of the distinct monomials
//! in its orbit; these sums form a vector-space basis of the invariants, and
//! an [`InvariantPolynomial`] stores coefficients against that basis keyed by
//! the canonical representative of each orbit.
//!
//! Canonical representatives are the lexicographically greatest image over
//! the whole group table, so `(0,0,0,0,0,1)` on 4 vertices becomes
//! `(1,0,0,0,0,0)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, Mutex, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::chain;
use crate::error::{Error, Result};
use crate::group::{self, pair_index, ActionSpec, GroupTable, Permutation, DEFAULT_ORDER_CAP};
use crate::kernel::{parse_rational, rational_to_string, Rational};

/// Multiplicity of a single position.
pub type Mult = u16;

const CACHE_LIMIT: usize = 1 << 21;

/// A monomial, as multiplicities per position.
///
/// Ordered graded-lexicographically: by degree, then entry by entry.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct ExponentVector(pub Vec<Mult>);

impl ExponentVector {
    pub fn zero(m: usize) -> Self {
        ExponentVector(vec![0; m])
    }

    pub fn unit(m: usize, position: usize, mult: Mult) -> Self {
        let mut v = vec![0; m];
        v[position] = mult;
        ExponentVector(v)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&c| c as usize).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Mult] {
        &self.0
    }

    pub fn add(&self, other: &Self) -> Self {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn max_mult(&self) -> Mult {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn is_simple(&self) -> bool {
        self.0.iter().all(|&c| c <= 1)
    }

    /// Image under a position permutation: `(σ·v)[σ(i)] = v[i]`.
    pub fn permuted(&self, sigma: &Permutation) -> Self {
        let mut out = vec![0; self.0.len()];
        for (i, &c) in self.0.iter().enumerate() {
            out[sigma.apply(i)] = c;
        }
        ExponentVector(out)
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExponentVector {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// Canonical orbit representative with its orbit and stabilizer sizes.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CanonicalGraph {
    pub rep: ExponentVector,
    pub orbit_size: u64,
    pub stabilizer_order: u64,
}

/// The canonical orbit representatives of one degree, largest first.
#[derive(Debug)]
pub struct HomogeneousBasis {
    pub degree: usize,
    pub graphs: Vec<CanonicalGraph>,
    index: FxHashMap<ExponentVector, usize>,
}

impl HomogeneousBasis {
    pub fn dim(&self) -> usize {
        self.graphs.len()
    }

    pub fn column(&self, rep: &ExponentVector) -> Option<usize> {
        self.index.get(rep).copied()
    }

    fn from_reps(action: &Action, degree: usize, reps: impl IntoIterator<Item = ExponentVector>) -> Self {
        let mut reps: Vec<ExponentVector> = reps.into_iter().collect();
        reps.sort_unstable_by(|a, b| b.cmp(a));
        let graphs: Vec<CanonicalGraph> = reps
            .into_par_iter()
            .map(|rep| action.canonical_data_of_canonical(rep))
            .collect();
        let index = graphs
            .iter()
            .enumerate()
            .map(|(i, g)| (g.rep.clone(), i))
            .collect();
        HomogeneousBasis {
            degree,
            graphs,
            index,
        }
    }
}

/// Which product to use when multiplying orbit sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Product {
    #[default]
    Usual,
    /// Monomial products survive only when the layer chains merge.
    Chain,
}

/// A permutation group acting on positions, with its full element table and
/// caches for canonical forms and homogeneous bases.
pub struct Action {
    spec: ActionSpec,
    table: GroupTable,
    m: usize,
    order: usize,
    // images[g * m + k] = g(k); the table is closed under inverses, so
    // ranging over g with v[g(k)] enumerates every image of v.
    images: Vec<u32>,
    first_orbit: Vec<usize>,
    canon_cache: RwLock<FxHashMap<ExponentVector, ExponentVector>>,
    orbit_size_cache: RwLock<FxHashMap<ExponentVector, u64>>,
    bases: Mutex<BTreeMap<usize, Arc<HomogeneousBasis>>>,
    simple_bases: Mutex<BTreeMap<usize, Arc<HomogeneousBasis>>>,
}

impl fmt::Debug for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Action")
            .field("spec", &self.spec.name())
            .field("order", &self.order)
            .finish()
    }
}

impl PartialEq for Action {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Action {
    pub fn new(spec: ActionSpec) -> Result<Arc<Action>> {
        Self::with_cap(spec, DEFAULT_ORDER_CAP)
    }

    pub fn with_cap(spec: ActionSpec, cap: usize) -> Result<Arc<Action>> {
        let table = group::group_table(&spec, cap)?;
        let m = spec.positions();
        let order = table.order();
        let mut images = Vec::with_capacity(order * m);
        for g in table.elements() {
            images.extend(g.images().iter().map(|&i| i as u32));
        }
        let mut first_orbit: Vec<usize> = if m == 0 {
            Vec::new()
        } else {
            table.elements().iter().map(|g| g.apply(0)).collect()
        };
        first_orbit.sort_unstable();
        first_orbit.dedup();
        Ok(Arc::new(Action {
            spec,
            table,
            m,
            order,
            images,
            first_orbit,
            canon_cache: RwLock::default(),
            orbit_size_cache: RwLock::default(),
            bases: Mutex::default(),
            simple_bases: Mutex::default(),
        }))
    }

    pub fn graph(n: usize) -> Result<Arc<Action>> {
        Self::new(ActionSpec::GraphEdges { n })
    }

    pub fn digraph(n: usize) -> Result<Arc<Action>> {
        Self::new(ActionSpec::DigraphArcs { n })
    }

    pub fn spec(&self) -> &ActionSpec {
        &self.spec
    }

    pub fn table(&self) -> &GroupTable {
        &self.table
    }

    pub fn positions(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn image_row(&self, g: usize) -> &[u32] {
        &self.images[g * self.m..(g + 1) * self.m]
    }

    pub fn check_len(&self, v: &ExponentVector) -> Result<()> {
        if v.len() != self.m {
            return Err(Error::LengthMismatch {
                expected: self.m,
                got: v.len(),
            });
        }
        Ok(())
    }

    fn canonical_uncached(&self, v: &ExponentVector) -> ExponentVector {
        let src = &v.0;
        let mut best = src.clone();
        for g in 0..self.order {
            let row = self.image_row(g);
            for k in 0..self.m {
                let x = src[row[k] as usize];
                if x > best[k] {
                    for (b, &p) in best[k..].iter_mut().zip(&row[k..]) {
                        *b = src[p as usize];
                    }
                    break;
                }
                if x < best[k] {
                    break;
                }
            }
        }
        ExponentVector(best)
    }

    /// Lexicographically greatest image of `v` over the group.
    pub fn canonical_form(&self, v: &ExponentVector) -> ExponentVector {
        if self.order <= 24 {
            return self.canonical_uncached(v);
        }
        if let Some(c) = self.canon_cache.read().unwrap().get(v) {
            return c.clone();
        }
        let c = self.canonical_uncached(v);
        let mut cache = self.canon_cache.write().unwrap();
        if cache.len() > CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(v.clone(), c.clone());
        c
    }

    /// Whether `v` is its own canonical form.
    pub fn is_canonical(&self, v: &ExponentVector) -> bool {
        let src = &v.0;
        // positions reachable from 0 can all be moved to the front
        let first = src.first().copied().unwrap_or(0);
        if self.first_orbit.iter().any(|&p| src[p] > first) {
            return false;
        }
        for g in 0..self.order {
            let row = self.image_row(g);
            for k in 0..self.m {
                let x = src[row[k] as usize];
                if x > src[k] {
                    return false;
                }
                if x < src[k] {
                    break;
                }
            }
        }
        true
    }

    pub fn stabilizer_order(&self, v: &ExponentVector) -> u64 {
        let src = &v.0;
        (0..self.order)
            .filter(|&g| {
                self.image_row(g)
                    .iter()
                    .enumerate()
                    .all(|(k, &p)| src[p as usize] == src[k])
            })
            .count() as u64
    }

    /// Size of the orbit of a canonical representative (cached).
    pub fn orbit_size_of_canonical(&self, rep: &ExponentVector) -> u64 {
        if let Some(&s) = self.orbit_size_cache.read().unwrap().get(rep) {
            return s;
        }
        let s = self.order as u64 / self.stabilizer_order(rep);
        let mut cache = self.orbit_size_cache.write().unwrap();
        if cache.len() > CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(rep.clone(), s);
        s
    }

    fn canonical_data_of_canonical(&self, rep: ExponentVector) -> CanonicalGraph {
        let orbit_size = self.orbit_size_of_canonical(&rep);
        CanonicalGraph {
            stabilizer_order: self.order as u64 / orbit_size,
            orbit_size,
            rep,
        }
    }

    pub fn orbit_data(&self, v: &ExponentVector) -> CanonicalGraph {
        self.canonical_data_of_canonical(self.canonical_form(v))
    }

    /// The distinct images of `v`, sorted.
    pub fn orbit(&self, v: &ExponentVector) -> Vec<ExponentVector> {
        let src = &v.0;
        let mut seen: FxHashSet<Vec<Mult>> = FxHashSet::default();
        for g in 0..self.order {
            let img: Vec<Mult> = self.image_row(g).iter().map(|&p| src[p as usize]).collect();
            seen.insert(img);
        }
        let mut out: Vec<ExponentVector> = seen.into_iter().map(ExponentVector).collect();
        out.sort_unstable();
        out
    }

    /// One representative per orbit of degree-`d` monomials, largest first.
    pub fn enumerate_canonical(&self, d: usize) -> Arc<HomogeneousBasis> {
        self.basis_memo(d, false)
    }

    /// Like [`Action::enumerate_canonical`] restricted to 0/1 vectors.
    pub fn enumerate_canonical_simple(&self, d: usize) -> Arc<HomogeneousBasis> {
        self.basis_memo(d, true)
    }

    fn basis_memo(&self, d: usize, simple: bool) -> Arc<HomogeneousBasis> {
        let memo = if simple { &self.simple_bases } else { &self.bases };
        if let Some(b) = memo.lock().unwrap().get(&d) {
            return b.clone();
        }
        let basis = if d == 0 {
            HomogeneousBasis::from_reps(self, 0, [ExponentVector::zero(self.m)])
        } else if simple && d > self.m {
            HomogeneousBasis::from_reps(self, d, [])
        } else {
            // every orbit of degree d contains a unit extension of a
            // canonical vector of degree d - 1
            let prev = self.basis_memo(d - 1, simple);
            let found: FxHashSet<ExponentVector> = prev
                .graphs
                .par_iter()
                .flat_map_iter(|g| {
                    (0..self.m)
                        .filter(|&k| !simple || g.rep.0[k] == 0)
                        .map(|k| {
                            let mut w = g.rep.clone();
                            w.0[k] += 1;
                            self.canonical_uncached(&w)
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
            HomogeneousBasis::from_reps(self, d, found)
        };
        let basis = Arc::new(basis);
        memo.lock().unwrap().insert(d, basis.clone());
        basis
    }

    /// Structure constants of `exps(g) · exps(h)` (or `⋆` for the chain
    /// product), keyed by canonical representative.
    ///
    /// The smaller orbit is expanded against the fixed representative of the
    /// other factor: if `c(k)` counts members `m` of the expanded orbit with
    /// `m + r` in orbit `k`, then the coefficient of `exps(k)` is
    /// `|orbit(r)| · c(k) / |orbit(k)|`.
    pub fn orbit_product(
        &self,
        g: &ExponentVector,
        h: &ExponentVector,
        product: Product,
    ) -> Vec<(ExponentVector, BigInt)> {
        let (gs, hs) = (
            self.orbit_size_of_canonical(&self.canonical_form(g)),
            self.orbit_size_of_canonical(&self.canonical_form(h)),
        );
        let (small, fixed, fixed_size) = if gs <= hs { (g, h, hs) } else { (h, g, gs) };
        let mut counts: FxHashMap<ExponentVector, u64> = FxHashMap::default();
        for member in self.orbit(small) {
            if product == Product::Chain && !chain::mergeable_vectors(&member, fixed) {
                continue;
            }
            let c = self.canonical_form(&member.add(fixed));
            *counts.entry(c).or_insert(0) += 1;
        }
        let mut out: Vec<(ExponentVector, BigInt)> = counts
            .into_iter()
            .map(|(k, c)| {
                let size = self.orbit_size_of_canonical(&k);
                let num = fixed_size as u128 * c as u128;
                assert_eq!(num % size as u128, 0, "structure constant must be integral");
                (k, BigInt::from(num / size as u128))
            })
            .collect();
        out.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        out
    }
}

/// Edge (or arc) weights of a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph(pub Vec<Rational>);

impl WeightedGraph {
    pub fn from_vector(v: &ExponentVector) -> Self {
        WeightedGraph(
            v.0.iter()
                .map(|&c| Rational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    /// Exact 0/1 (or small integer) multiplicities, if every weight is one.
    pub fn as_vector(&self) -> Option<ExponentVector> {
        self.0
            .iter()
            .map(|w| {
                if w.is_integer() && !w.is_negative() {
                    w.to_integer().to_u16()
                } else {
                    None
                }
            })
            .collect::<Option<Vec<_>>>()
            .map(ExponentVector)
    }
}

/// Invariant expressed in the orbit-sum basis.
#[derive(Clone)]
pub struct InvariantPolynomial {
    action: Arc<Action>,
    terms: BTreeMap<ExponentVector, Rational>,
}

impl fmt::Debug for InvariantPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl PartialEq for InvariantPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.action.spec == other.action.spec && self.terms == other.terms
    }
}

impl Eq for InvariantPolynomial {}

impl InvariantPolynomial {
    pub fn zero(action: &Arc<Action>) -> Self {
        InvariantPolynomial {
            action: action.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(action: &Arc<Action>) -> Self {
        Self::orbit_sum(action, &ExponentVector::zero(action.positions())).unwrap()
    }

    /// `exps(v)`.
    pub fn orbit_sum(action: &Arc<Action>, v: &ExponentVector) -> Result<Self> {
        action.check_len(v)?;
        let mut terms = BTreeMap::new();
        terms.insert(action.canonical_form(v), Rational::one());
        Ok(InvariantPolynomial {
            action: action.clone(),
            terms,
        })
    }

    /// Builds from (representative, coefficient) pairs; representatives are
    /// canonicalized and merged.
    pub fn from_terms(
        action: &Arc<Action>,
        terms: impl IntoIterator<Item = (ExponentVector, Rational)>,
    ) -> Result<Self> {
        let mut p = Self::zero(action);
        for (v, c) in terms {
            action.check_len(&v)?;
            p.add_term(action.canonical_form(&v), c);
        }
        Ok(p)
    }

    pub(crate) fn from_canonical_map(
        action: &Arc<Action>,
        terms: BTreeMap<ExponentVector, Rational>,
    ) -> Self {
        InvariantPolynomial {
            action: action.clone(),
            terms: terms.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    fn add_term(&mut self, rep: ExponentVector, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(rep.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&rep);
        }
    }

    pub fn action(&self) -> &Arc<Action> {
        &self.action
    }

    pub fn terms(&self) -> &BTreeMap<ExponentVector, Rational> {
        &self.terms
    }

    pub fn coeff(&self, v: &ExponentVector) -> Rational {
        self.terms
            .get(&self.action.canonical_form(v))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Leading (greatest) canonical monomial and its coefficient.
    pub fn leading(&self) -> Option<(&ExponentVector, &Rational)> {
        self.terms.iter().next_back()
    }

    /// The common degree of all terms; `None` for mixed degrees or zero.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut degs = self.terms.keys().map(ExponentVector::degree);
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(ExponentVector::degree).max()
    }

    fn same_action(&self, other: &Self) -> Result<()> {
        if self.action.spec != other.action.spec {
            return Err(Error::ActionMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_action(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero(&self.action);
        }
        InvariantPolynomial {
            action: self.action.clone(),
            terms: self.terms.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
        }
    }

    /// The part of `self` made of terms of degree `d`.
    pub fn homogeneous_component(&self, d: usize) -> Self {
        InvariantPolynomial {
            action: self.action.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(v, _)| v.degree() == d)
                .map(|(v, c)| (v.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.product(other, Product::Usual)
    }

    /// Bilinear extension of the orbit-sum structure constants.
    pub fn product(&self, other: &Self, product: Product) -> Result<Self> {
        self.same_action(other)?;
        let pairs: Vec<(&ExponentVector, &Rational, &ExponentVector, &Rational)> = self
            .terms
            .iter()
            .flat_map(|(a, ca)| other.terms.iter().map(move |(b, cb)| (a, ca, b, cb)))
            .collect();
        let parts: Vec<Vec<(ExponentVector, BigInt)>> = if pairs.len() > 8 {
            pairs
                .par_iter()
                .map(|(a, _, b, _)| self.action.orbit_product(a, b, product))
                .collect()
        } else {
            pairs
                .iter()
                .map(|(a, _, b, _)| self.action.orbit_product(a, b, product))
                .collect()
        };
        let mut acc: BTreeMap<ExponentVector, Rational> = BTreeMap::new();
        for ((_, ca, _, cb), part) in pairs.iter().zip(parts) {
            let w = *ca * *cb;
            for (k, c) in part {
                *acc.entry(k).or_insert_with(Rational::zero) += &w * Rational::from_integer(c);
            }
        }
        Ok(Self::from_canonical_map(&self.action, acc))
    }

    pub fn pow(&self, k: usize, product: Product) -> Result<Self> {
        let mut out = Self::one(&self.action);
        for _ in 0..k {
            out = out.product(self, product)?;
        }
        Ok(out)
    }

    /// Value on a weighted graph.
    pub fn evaluate(&self, w: &WeightedGraph) -> Result<Rational> {
        if w.0.len() != self.action.positions() {
            return Err(Error::LengthMismatch {
                expected: self.action.positions(),
                got: w.0.len(),
            });
        }
        let mut total = Rational::zero();
        for (rep, c) in &self.terms {
            let mut s = Rational::zero();
            for member in self.action.orbit(rep) {
                let mut prod = Rational::one();
                for (k, &e) in member.0.iter().enumerate() {
                    if e > 0 {
                        prod *= num_traits::pow(w.0[k].clone(), e as usize);
                        if prod.is_zero() {
                            break;
                        }
                    }
                }
                s += prod;
            }
            total += c * s;
        }
        Ok(total)
    }

    /// Text form `c*enc + c*enc`; the zero polynomial prints as `0`.
    pub fn encode(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .rev()
            .map(|(v, c)| {
                let enc = encode_vector(self.action.spec(), v);
                if c.is_one() {
                    enc
                } else {
                    format!("{}*{}", rational_to_string(c), enc)
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .rev()
                .map(|(v, c)| {
                    serde_json::json!({
                        "coeff": rational_to_string(c),
                        "graph": encode_vector(self.action.spec(), v),
                    })
                })
                .collect(),
        )
    }

    pub fn from_json(action: &Arc<Action>, value: &serde_json::Value) -> Result<Self> {
        let bad = || Error::Parse(value.to_string(), "expected a list of {coeff, graph}".into());
        let items = value.as_array().ok_or_else(bad)?;
        let mut terms = Vec::new();
        for item in items {
            let c = item
                .get("coeff")
                .and_then(|c| c.as_str())
                .and_then(parse_rational)
                .ok_or_else(bad)?;
            let g = item.get("graph").and_then(|g| g.as_str()).ok_or_else(bad)?;
            terms.push((parse_vector_for(action.spec(), g)?, c));
        }
        Self::from_terms(action, terms)
    }
}

impl fmt::Display for InvariantPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.encode())
    }
}

/// `exps(g)` for a canonical or arbitrary vector.
pub fn exps(action: &Arc<Action>, v: &ExponentVector) -> InvariantPolynomial {
    InvariantPolynomial::orbit_sum(action, v).expect("vector length matches the action")
}

pub fn invariant_mul(p: &InvariantPolynomial, q: &InvariantPolynomial) -> Result<InvariantPolynomial> {
    p.mul(q)
}

pub fn evaluate(p: &InvariantPolynomial, w: &WeightedGraph) -> Result<Rational> {
    p.evaluate(w)
}

/// Whether some member of `set` takes different values on `a` and `b`.
pub fn separates(set: &[InvariantPolynomial], a: &WeightedGraph, b: &WeightedGraph) -> Result<bool> {
    for p in set {
        if p.evaluate(a)? != p.evaluate(b)? {
            return Ok(true);
        }
    }
    Ok(false)
}

// ---------------------------------------------------------------------------
// Encodings

fn digits_or_commas(v: &ExponentVector) -> String {
    if v.0.iter().all(|&c| c < 10) {
        v.0.iter().map(|c| char::from(b'0' + *c as u8)).collect()
    } else {
        v.0.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
    }
}

/// `g:<n>:<mults>` for graphs, `d:<n>:<mults>` for digraphs and
/// `v:<m>:<mults>` for the other kinds.
pub fn encode_vector(spec: &ActionSpec, v: &ExponentVector) -> String {
    match spec {
        ActionSpec::GraphEdges { n } => format!("g:{n}:{}", digits_or_commas(v)),
        ActionSpec::DigraphArcs { n } => format!("d:{n}:{}", digits_or_commas(v)),
        _ => format!("v:{}:{}", v.len(), digits_or_commas(v)),
    }
}

/// A parsed vector encoding: kind letter, size parameter, multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorEncoding {
    pub kind: char,
    pub size: usize,
    pub vector: ExponentVector,
}

impl VectorEncoding {
    /// The natural action the encoding refers to (`v:` maps to `natural(m)`).
    pub fn action_spec(&self) -> ActionSpec {
        match self.kind {
            'g' => ActionSpec::GraphEdges { n: self.size },
            'd' => ActionSpec::DigraphArcs { n: self.size },
            _ => ActionSpec::Natural { m: self.size },
        }
    }
}

pub fn parse_vector(s: &str) -> Result<VectorEncoding> {
    let err = |msg: &str| Error::Parse(s.to_string(), msg.to_string());
    let mut parts = s.trim().splitn(3, ':');
    let kind = parts.next().ok_or_else(|| err("missing kind"))?;
    let size: usize = parts
        .next()
        .ok_or_else(|| err("missing size"))?
        .parse()
        .map_err(|_| err("size is not an integer"))?;
    let body = parts.next().ok_or_else(|| err("missing multiplicities"))?;
    let kind = match kind {
        "g" => 'g',
        "d" => 'd',
        "v" => 'v',
        _ => return Err(err("kind must be g, d or v")),
    };
    let m = match kind {
        'g' => size * size.saturating_sub(1) / 2,
        'd' => size * size,
        _ => size,
    };
    let mults: Vec<Mult> = if body.contains(',') {
        body.split(',')
            .map(|t| t.trim().parse::<Mult>().map_err(|_| err("bad multiplicity")))
            .collect::<Result<_>>()?
    } else {
        body.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as Mult)
                    .ok_or_else(|| err("bad digit"))
            })
            .collect::<Result<_>>()?
    };
    if mults.len() != m {
        return Err(err(&format!("expected {m} multiplicities, found {}", mults.len())));
    }
    Ok(VectorEncoding {
        kind,
        size,
        vector: ExponentVector(mults),
    })
}

/// Parses an encoding and checks it against `spec`.
pub fn parse_vector_for(spec: &ActionSpec, s: &str) -> Result<ExponentVector> {
    let enc = parse_vector(s)?;
    let ok = match spec {
        ActionSpec::GraphEdges { n } => enc.kind == 'g' && enc.size == *n,
        ActionSpec::DigraphArcs { n } => enc.kind == 'd' && enc.size == *n,
        _ => enc.kind == 'v' && enc.size == spec.positions(),
    };
    if !ok {
        return Err(Error::Parse(s.to_string(), format!("does not match {}", spec.name())));
    }
    Ok(enc.vector)
}

/// Parses `c*enc + c*enc + ...`; a bare encoding has coefficient 1.
pub fn parse_polynomial(action: &Arc<Action>, s: &str) -> Result<InvariantPolynomial> {
    if s.trim() == "0" {
        return Ok(InvariantPolynomial::zero(action));
    }
    let mut terms = Vec::new();
    for t in s.split('+') {
        let t = t.trim();
        let (c, enc) = match t.rsplit_once('*') {
            Some((c, enc)) => (
                parse_rational(c).ok_or_else(|| Error::Parse(t.to_string(), "bad coefficient".into()))?,
                enc,
            ),
            None => (Rational::one(), t),
        };
        terms.push((parse_vector_for(action.spec(), enc)?, c));
    }
    InvariantPolynomial::from_terms(action, terms)
}

// ---------------------------------------------------------------------------
// Graph structure helpers

fn graph_n(action: &Action) -> Result<usize> {
    match action.spec() {
        ActionSpec::GraphEdges { n } => Ok(*n),
        other => Err(Error::UnsupportedAction(other.name())),
    }
}

/// Connected components (as vertex sets) of the support of a multigraph,
/// ignoring isolated vertices.
pub fn nontrivial_components(n: usize, v: &ExponentVector) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut x = x;
        while p[x] != r {
            let nx = p[x];
            p[x] = r;
            x = nx;
        }
        r
    }
    let mut touched = vec![false; n];
    for (k, (i, j)) in group::pairs(n).into_iter().enumerate() {
        if v.0[k] > 0 {
            touched[i] = true;
            touched[j] = true;
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            parent[a] = b;
        }
    }
    let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for x in 0..n {
        if touched[x] {
            let r = find(&mut parent, x);
            comps.entry(r).or_default().push(x);
        }
    }
    comps.into_values().collect()
}

/// Vertices incident to at least one edge.
pub fn non_isolated_vertices(n: usize, v: &ExponentVector) -> Vec<usize> {
    let mut touched = vec![false; n];
    for (k, (i, j)) in group::pairs(n).into_iter().enumerate() {
        if v.0[k] > 0 {
            touched[i] = true;
            touched[j] = true;
        }
    }
    (0..n).filter(|&x| touched[x]).collect()
}

fn restrict_to(n: usize, v: &ExponentVector, vertices: &[usize]) -> ExponentVector {
    let mut out = vec![0; v.len()];
    for (k, (i, j)) in group::pairs(n).into_iter().enumerate() {
        if vertices.contains(&i) && vertices.contains(&j) {
            out[k] = v.0[k];
        }
    }
    ExponentVector(out)
}

/// A polynomial in orbit sums of quasi-connected multigraphs: each term is a
/// coefficient times a product of `exps(c)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiConnectedExpansion {
    pub terms: BTreeMap<Vec<ExponentVector>, Rational>,
}

impl QuasiConnectedExpansion {
    /// Multiplies every product back out in the orbit-sum basis.
    pub fn expand(&self, action: &Arc<Action>) -> Result<InvariantPolynomial> {
        let mut total = InvariantPolynomial::zero(action);
        for (factors, c) in &self.terms {
            let mut prod = InvariantPolynomial::one(action);
            for f in factors {
                prod = prod.mul(&exps(action, f))?;
            }
            total = total.add(&prod.scale(c))?;
        }
        Ok(total)
    }

    /// Whether the only product is the single factor `g` itself.
    pub fn is_trivial_for(&self, g: &ExponentVector) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(f, c)| f.len() == 1 && &f[0] == g && c.is_one())
    }
}

/// Writes `exps(g)` as a polynomial in orbit sums of quasi-connected graphs
/// by peeling off the product of the component orbit sums and recursing on
/// the correction terms, which have fewer non-trivial components.
pub fn quasi_connected_decomposition(
    action: &Arc<Action>,
    g: &ExponentVector,
) -> Result<QuasiConnectedExpansion> {
    let n = graph_n(action)?;
    action.check_len(g)?;
    let mut memo = FxHashMap::default();
    let terms = decompose_rec(action, n, &action.canonical_form(g), &mut memo)?;
    Ok(QuasiConnectedExpansion { terms })
}

type Expansion = BTreeMap<Vec<ExponentVector>, Rational>;

fn decompose_rec(
    action: &Arc<Action>,
    n: usize,
    g: &ExponentVector,
    memo: &mut FxHashMap<ExponentVector, Expansion>,
) -> Result<Expansion> {
    if let Some(e) = memo.get(g) {
        return Ok(e.clone());
    }
    let comps = nontrivial_components(n, g);
    let mut out = Expansion::new();
    if comps.len() <= 1 {
        out.insert(vec![g.clone()], Rational::one());
    } else {
        let mut factors: Vec<ExponentVector> = comps
            .iter()
            .map(|c| action.canonical_form(&restrict_to(n, g, c)))
            .collect();
        factors.sort();
        let mut prod = InvariantPolynomial::one(action);
        for f in &factors {
            prod = prod.mul(&exps(action, f))?;
        }
        let lead = prod.terms.get(g).cloned().expect("disjoint placement occurs in the product");
        out.insert(factors, lead.recip());
        for (h, c) in prod.terms.iter() {
            if h == g {
                continue;
            }
            assert!(nontrivial_components(n, h).len() < comps.len());
            let w = c / &lead;
            for (f, c2) in decompose_rec(action, n, h, memo)? {
                let slot = out.entry(f.clone()).or_insert_with(Rational::zero);
                *slot -= &w * c2;
                if slot.is_zero() {
                    out.remove(&f);
                }
            }
        }
    }
    memo.insert(g.clone(), out.clone());
    Ok(out)
}

/// Projection onto `n'` vertices: graphs with more than `n'` non-isolated
/// vertices vanish, the others keep their coefficient.
pub fn project(p: &InvariantPolynomial, target: &Arc<Action>) -> Result<InvariantPolynomial> {
    let n = graph_n(p.action())?;
    let n2 = graph_n(target)?;
    if n2 > n {
        return Err(Error::OutOfRange(format!("projection from {n} to {n2} vertices")));
    }
    let mut terms = Vec::new();
    for (g, c) in p.terms() {
        let verts = non_isolated_vertices(n, g);
        if verts.len() > n2 {
            continue;
        }
        let mut w = vec![0; n2 * n2.saturating_sub(1) / 2];
        for (k, (i, j)) in group::pairs(n).into_iter().enumerate() {
            if g.0[k] > 0 {
                let a = verts.iter().position(|&x| x == i).unwrap();
                let b = verts.iter().position(|&x| x == j).unwrap();
                w[pair_index(n2, a, b)] = g.0[k];
            }
        }
        terms.push((ExponentVector(w), c.clone()));
    }
    InvariantPolynomial::from_terms(target, terms)
}

// ---------------------------------------------------------------------------
// Named invariants

/// `e_k`: sum of the orbit sums of all 0/1 vectors of weight `k`.
pub fn elementary_symmetric(action: &Arc<Action>, k: usize) -> Result<InvariantPolynomial> {
    if k == 0 || k > action.positions() {
        return Err(Error::OutOfRange(format!("e_{k}")));
    }
    let basis = action.enumerate_canonical_simple(k);
    Ok(InvariantPolynomial::from_canonical_map(
        action,
        basis
            .graphs
            .iter()
            .map(|g| (g.rep.clone(), Rational::one()))
            .collect(),
    ))
}

/// `p_k = Σ x_i^k`, one orbit sum per orbit of positions.
pub fn power_sum(action: &Arc<Action>, k: usize) -> Result<InvariantPolynomial> {
    if k == 0 || k > action.positions() {
        return Err(Error::OutOfRange(format!("p_{k}")));
    }
    let m = action.positions();
    let reps: BTreeSet<ExponentVector> = (0..m)
        .map(|i| action.canonical_form(&ExponentVector::unit(m, i, k as Mult)))
        .collect();
    Ok(InvariantPolynomial::from_canonical_map(
        action,
        reps.into_iter().map(|r| (r, Rational::one())).collect(),
    ))
}

/// `X_1^k + ... + X_n^k` with `X_i` the sum of the edges at vertex `i`.
pub fn vertex_power_sum(action: &Arc<Action>, k: usize) -> Result<InvariantPolynomial> {
    let n = graph_n(action)?;
    if k == 0 {
        return Err(Error::OutOfRange("vertex power sum of degree 0".into()));
    }
    let m = action.positions();
    let mut poly: FxHashMap<ExponentVector, BigInt> = FxHashMap::default();
    // multinomial expansion of (Σ_{j≠i} x_ij)^k
    fn compositions(k: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            cur.push(k);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in 0..=k {
            cur.push(a);
            compositions(k - a, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut comps = Vec::new();
    if n >= 2 {
        compositions(k, n - 1, &mut Vec::new(), &mut comps);
    }
    let fact = |x: usize| crate::kernel::factorial(x);
    for i in 0..n {
        let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        for c in &comps {
            let mut v = vec![0 as Mult; m];
            let mut coeff = fact(k);
            for (&j, &a) in others.iter().zip(c) {
                v[pair_index(n, i, j)] = a as Mult;
                coeff /= fact(a);
            }
            *poly.entry(ExponentVector(v)).or_insert_with(BigInt::zero) += coeff;
        }
    }
    let terms = poly
        .into_iter()
        .filter(|(v, _)| action.is_canonical(v))
        .map(|(v, c)| (v, Rational::from_integer(c)))
        .collect();
    Ok(InvariantPolynomial::from_canonical_map(action, terms))
}

/// Orbit sums of all simple graphs (0/1 vectors) with `d` edges.
pub fn simple_graph_orbit_sums(action: &Arc<Action>, d: usize) -> Vec<InvariantPolynomial> {
    action
        .enumerate_canonical_simple(d)
        .graphs
        .iter()
        .map(|g| exps(action, &g.rep))
        .collect()
}

/// Result of scanning the vertex permutations that fix a graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AutomorphismScan {
    pub aut_order: u64,
    pub has_odd_automorphism: bool,
}

pub fn automorphism_scan(action: &Action, v: &ExponentVector) -> Result<AutomorphismScan> {
    action.check_len(v)?;
    let vertex = action
        .table()
        .vertex_perms()
        .ok_or_else(|| Error::UnsupportedAction(action.spec().name()))?;
    let mut aut_order = 0;
    let mut has_odd = false;
    for (g, sigma) in vertex.iter().enumerate() {
        let row = action.image_row(g);
        if row.iter().enumerate().all(|(k, &p)| v.0[p as usize] == v.0[k]) {
            aut_order += 1;
            has_odd |= sigma.sign() == -1;
        }
    }
    Ok(AutomorphismScan {
        aut_order,
        has_odd_automorphism: has_odd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::hilbert_series;
    use proptest::prelude::*;

    fn ev(s: &str) -> ExponentVector {
        parse_vector(s).unwrap().vector
    }

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn canonical_form_examples() {
        let a = Action::graph(4).unwrap();
        assert_eq!(a.canonical_form(&ev("g:4:000001")), ev("g:4:100000"));
        assert_eq!(a.canonical_form(&ev("g:4:010100")), ev("g:4:110000"));
        let trivial = Action::new(ActionSpec::Explicit {
            m: 4,
            generators: vec![],
        })
        .unwrap();
        let v = ExponentVector(vec![0, 3, 1, 2]);
        assert_eq!(trivial.canonical_form(&v), v);
    }

    #[test]
    fn orbit_data_examples() {
        let a4 = Action::graph(4).unwrap();
        assert_eq!(a4.orbit_data(&ev("g:4:000001")).orbit_size, 6);
        let k4 = a4.orbit_data(&ev("g:4:111111"));
        assert_eq!((k4.orbit_size, k4.stabilizer_order), (1, 24));
        let a5 = Action::graph(5).unwrap();
        // 5 centres times C(4,2) leaf pairs
        assert_eq!(a5.orbit_data(&ev("g:5:1100000000")).orbit_size, 30);
        assert_eq!(a5.orbit(&ev("g:5:1100000000")).len(), 30);
    }

    #[test]
    fn enumerate_small_degrees() {
        let a = Action::graph(4).unwrap();
        assert_eq!(a.enumerate_canonical(0).dim(), 1);
        let b2 = a.enumerate_canonical(2);
        let reps: Vec<ExponentVector> = b2.graphs.iter().map(|g| g.rep.clone()).collect();
        assert_eq!(reps, vec![ev("g:4:200000"), ev("g:4:110000"), ev("g:4:100001")]);
    }

    #[test]
    fn enumeration_matches_brute_force_filter() {
        // keep every degree-d composition that is its own canonical form
        fn comps(m: usize, d: usize) -> Vec<Vec<Mult>> {
            if m == 1 {
                return vec![vec![d as Mult]];
            }
            (0..=d)
                .flat_map(|a| {
                    comps(m - 1, d - a).into_iter().map(move |mut rest| {
                        rest.insert(0, a as Mult);
                        rest
                    })
                })
                .collect()
        }
        for (spec, d) in [
            (ActionSpec::GraphEdges { n: 4 }, 4),
            (ActionSpec::GraphEdges { n: 5 }, 3),
            (ActionSpec::DigraphArcs { n: 3 }, 3),
            (ActionSpec::alternating(4).unwrap(), 5),
        ] {
            let a = Action::new(spec).unwrap();
            let mut brute: Vec<ExponentVector> = comps(a.positions(), d)
                .into_iter()
                .map(ExponentVector)
                .filter(|v| a.canonical_uncached(v) == *v)
                .collect();
            brute.sort_by(|x, y| y.cmp(x));
            let got: Vec<ExponentVector> =
                a.enumerate_canonical(d).graphs.iter().map(|g| g.rep.clone()).collect();
            assert_eq!(got, brute);
            assert!(got.iter().all(|v| a.is_canonical(v)));
        }
    }

    #[test]
    fn dimension_of_inv_5_10() {
        let a = Action::graph(5).unwrap();
        assert_eq!(a.enumerate_canonical(10).dim(), 974);
    }

    #[test]
    fn enumeration_counts_match_hilbert() {
        for (spec, bound) in [
            (ActionSpec::GraphEdges { n: 3 }, 6),
            (ActionSpec::GraphEdges { n: 4 }, 8),
            (ActionSpec::GraphEdges { n: 5 }, 7),
            (ActionSpec::GraphEdges { n: 6 }, 5),
            (ActionSpec::DigraphArcs { n: 2 }, 6),
            (ActionSpec::DigraphArcs { n: 3 }, 5),
            (ActionSpec::Natural { m: 4 }, 7),
            (ActionSpec::alternating(4).unwrap(), 7),
        ] {
            let a = Action::new(spec.clone()).unwrap();
            let h = hilbert_series(&spec, bound).unwrap().to_integers().unwrap();
            for (d, hd) in h.iter().enumerate() {
                assert_eq!(BigInt::from(a.enumerate_canonical(d).dim()), *hd, "{} d={d}", spec.name());
            }
        }
    }

    #[test]
    fn edge_squared_structure_constants() {
        for n in [4, 5, 6] {
            let a = Action::graph(n).unwrap();
            let m = a.positions();
            let e = exps(&a, &ExponentVector::unit(m, 0, 1));
            let sq = e.mul(&e).unwrap();
            let double = ExponentVector::unit(m, 0, 2);
            let mut adjacent = ExponentVector::zero(m);
            adjacent.0[pair_index(n, 0, 1)] = 1;
            adjacent.0[pair_index(n, 0, 2)] = 1;
            let mut disjoint = ExponentVector::zero(m);
            disjoint.0[pair_index(n, 0, 1)] = 1;
            disjoint.0[pair_index(n, 2, 3)] = 1;
            let expected = InvariantPolynomial::from_terms(
                &a,
                [(double, r(1)), (adjacent, r(2)), (disjoint, r(2))],
            )
            .unwrap();
            assert_eq!(sq, expected, "n = {n}");
        }
    }

    #[test]
    fn triangle_times_edge_has_three_unit_terms() {
        let a = Action::graph(5).unwrap();
        let m = a.positions();
        let tri = ExponentVector({
            let mut v = vec![0; m];
            v[pair_index(5, 0, 1)] = 1;
            v[pair_index(5, 0, 2)] = 1;
            v[pair_index(5, 1, 2)] = 1;
            v
        });
        let edge = ExponentVector::unit(m, 0, 1);
        let prod = exps(&a, &tri).mul(&exps(&a, &edge)).unwrap();
        assert_eq!(prod.len(), 3);
        assert!(prod.terms().values().all(|c| c.is_one()));
        let with = |extra: (usize, usize), mult: Mult| {
            let mut v = tri.clone();
            v.0[pair_index(5, extra.0, extra.1)] += mult;
            a.canonical_form(&v)
        };
        assert!(prod.terms().contains_key(&with((0, 1), 1)));
        assert!(prod.terms().contains_key(&with((0, 3), 1)));
        assert!(prod.terms().contains_key(&with((3, 4), 1)));
    }

    #[test]
    fn empty_graph_is_the_unit() {
        let a = Action::graph(4).unwrap();
        let p = parse_polynomial(&a, "2*g:4:110000 + -1/3*g:4:300000").unwrap();
        assert_eq!(InvariantPolynomial::one(&a).mul(&p).unwrap(), p);
    }

    /// Monomial-level oracle: expand both orbit sums fully and multiply
    /// every pair of monomials.
    fn brute_product(a: &Arc<Action>, g: &ExponentVector, h: &ExponentVector) -> InvariantPolynomial {
        let mut monomials: BTreeMap<ExponentVector, i64> = BTreeMap::new();
        for x in a.orbit(g) {
            for y in a.orbit(h) {
                *monomials.entry(x.add(&y)).or_insert(0) += 1;
            }
        }
        let terms = monomials
            .into_iter()
            .filter(|(v, _)| a.canonical_uncached(v) == *v)
            .map(|(v, c)| (v, r(c)));
        InvariantPolynomial::from_terms(a, terms).unwrap()
    }

    #[test]
    fn structure_constants_match_monomial_oracle() {
        let a = Action::graph(4).unwrap();
        for d1 in 1..=2 {
            for d2 in 1..=2 {
                for g in a.enumerate_canonical(d1).graphs.iter() {
                    for h in a.enumerate_canonical(d2).graphs.iter() {
                        let fast = exps(&a, &g.rep).mul(&exps(&a, &h.rep)).unwrap();
                        assert_eq!(fast, brute_product(&a, &g.rep, &h.rep));
                    }
                }
            }
        }
    }

    #[test]
    fn evaluation_examples() {
        let a4 = Action::graph(4).unwrap();
        let k4 = WeightedGraph::from_vector(&ev("g:4:111111"));
        assert_eq!(exps(&a4, &ev("g:4:100000")).evaluate(&k4).unwrap(), r(6));
        let a5 = Action::graph(5).unwrap();
        let k5 = WeightedGraph::from_vector(&ExponentVector(vec![1; 10]));
        let mut cycle = ExponentVector::zero(10);
        for i in 0..5 {
            cycle.0[pair_index(5, i, (i + 1) % 5)] = 1;
        }
        assert_eq!(exps(&a5, &cycle).evaluate(&k5).unwrap(), r(12));
        let star = WeightedGraph::from_vector(&ev("g:5:1110000000"));
        assert_eq!(exps(&a5, &ev("g:5:1100000000")).evaluate(&star).unwrap(), r(3));
    }

    /// Number of subgraphs of `h` isomorphic to `g`, by trying every edge subset.
    fn subgraph_count(a: &Action, g: &ExponentVector, h: &ExponentVector) -> i64 {
        let edges: Vec<usize> = (0..h.len()).filter(|&k| h.0[k] == 1).collect();
        let target = a.canonical_form(g);
        let k = g.degree();
        let mut count = 0;
        for mask in 0u32..(1 << edges.len()) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let mut v = ExponentVector::zero(h.len());
            for (b, &e) in edges.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    v.0[e] = 1;
                }
            }
            if a.canonical_form(&v) == target {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn evaluation_counts_subgraphs() {
        for n in [4, 5] {
            let a = Action::graph(n).unwrap();
            let m = a.positions();
            let hosts: Vec<ExponentVector> = (0..=m)
                .flat_map(|d| a.enumerate_canonical_simple(d).graphs.clone())
                .map(|g| g.rep)
                .collect();
            for d in 1..=m.min(5) {
                for g in a.enumerate_canonical_simple(d).graphs.iter() {
                    let p = exps(&a, &g.rep);
                    for h in hosts.iter().step_by(if n == 5 { 3 } else { 1 }) {
                        let val = p.evaluate(&WeightedGraph::from_vector(h)).unwrap();
                        assert_eq!(val, r(subgraph_count(&a, &g.rep, h)));
                    }
                }
            }
        }
    }

    #[test]
    fn quasi_connected_examples() {
        let a5 = Action::graph(5).unwrap();
        let path = ev("g:5:1100000000");
        assert!(quasi_connected_decomposition(&a5, &path).unwrap().is_trivial_for(&path));
        // triangle plus a disjoint edge
        let mut g = ExponentVector::zero(10);
        for (i, j) in [(0, 1), (0, 2), (1, 2), (3, 4)] {
            g.0[pair_index(5, i, j)] = 1;
        }
        let g = a5.canonical_form(&g);
        let dec = quasi_connected_decomposition(&a5, &g).unwrap();
        assert_eq!(dec.terms.len(), 3);
        assert_eq!(dec.expand(&a5).unwrap(), exps(&a5, &g));
        let minus_one: Vec<_> = dec.terms.values().filter(|c| **c == r(-1)).collect();
        assert_eq!(minus_one.len(), 2);

        let a6 = Action::graph(6).unwrap();
        let mut three = ExponentVector::zero(15);
        for (i, j) in [(0, 1), (2, 3), (4, 5)] {
            three.0[pair_index(6, i, j)] = 1;
        }
        let dec = quasi_connected_decomposition(&a6, &three).unwrap();
        assert_eq!(dec.expand(&a6).unwrap(), exps(&a6, &three));
        for factors in dec.terms.keys() {
            for f in factors {
                assert!(nontrivial_components(6, f).len() <= 1);
            }
        }
    }

    #[test]
    fn projection_examples() {
        let a5 = Action::graph(5).unwrap();
        let a4 = Action::graph(4).unwrap();
        let e5 = exps(&a5, &ev("g:5:1000000000"));
        assert_eq!(project(&e5, &a4).unwrap(), exps(&a4, &ev("g:4:100000")));
        let a6 = Action::graph(6).unwrap();
        let mut three = ExponentVector::zero(15);
        for (i, j) in [(0, 1), (2, 3), (4, 5)] {
            three.0[pair_index(6, i, j)] = 1;
        }
        assert!(project(&exps(&a6, &three), &a4).unwrap().is_zero());
    }

    #[test]
    fn projection_is_multiplicative() {
        let a5 = Action::graph(5).unwrap();
        let a4 = Action::graph(4).unwrap();
        let b1 = a5.enumerate_canonical(1);
        let b2 = a5.enumerate_canonical(2);
        for g in b1.graphs.iter().chain(b2.graphs.iter()) {
            for h in b2.graphs.iter() {
                let p = exps(&a5, &g.rep);
                let q = exps(&a5, &h.rep);
                let lhs = project(&p.mul(&q).unwrap(), &a4).unwrap();
                let rhs = project(&p, &a4).unwrap().mul(&project(&q, &a4).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn named_invariants() {
        let a4 = Action::graph(4).unwrap();
        let e1 = elementary_symmetric(&a4, 1).unwrap();
        assert_eq!(e1, power_sum(&a4, 1).unwrap());
        assert_eq!(e1, exps(&a4, &ev("g:4:100000")));
        assert_eq!(vertex_power_sum(&a4, 1).unwrap(), e1.scale(&r(2)));
        let e2 = elementary_symmetric(&a4, 2).unwrap();
        assert_eq!(e2, parse_polynomial(&a4, "g:4:110000 + g:4:100001").unwrap());
        assert!(elementary_symmetric(&a4, 7).is_err());
        assert!(power_sum(&a4, 0).is_err());
        assert_eq!(power_sum(&a4, 3).unwrap(), exps(&a4, &ev("g:4:300000")));
        // digraph power sums split into loop and arc orbits
        let d3 = Action::digraph(3).unwrap();
        assert_eq!(power_sum(&d3, 2).unwrap().len(), 2);
    }

    #[test]
    fn vertex_power_sum_matches_direct_evaluation() {
        let a = Action::graph(5).unwrap();
        let w = WeightedGraph((0..10).map(|k| r(k * k - 3 * k + 1)).collect());
        for k in 1..=4 {
            let p = vertex_power_sum(&a, k).unwrap();
            let mut direct = Rational::zero();
            for i in 0..5 {
                let mut xi = Rational::zero();
                for j in 0..5 {
                    if i != j {
                        xi += &w.0[pair_index(5, i, j)];
                    }
                }
                direct += num_traits::pow(xi, k);
            }
            assert_eq!(p.evaluate(&w).unwrap(), direct);
        }
    }

    #[test]
    fn automorphism_examples() {
        let a4 = Action::graph(4).unwrap();
        let empty = automorphism_scan(&a4, &ExponentVector::zero(6)).unwrap();
        assert_eq!(empty, AutomorphismScan { aut_order: 24, has_odd_automorphism: true });
        // edges {1,2},{1,4},{2,3}
        let g4 = automorphism_scan(&a4, &ev("g:4:101100")).unwrap();
        assert!(!g4.has_odd_automorphism);
        assert!(automorphism_scan(&a4, &ev("g:4:100000")).unwrap().has_odd_automorphism);
    }

    #[test]
    fn separation_examples() {
        let a4 = Action::graph(4).unwrap();
        let e1 = elementary_symmetric(&a4, 1).unwrap();
        let k4 = WeightedGraph::from_vector(&ev("g:4:111111"));
        let empty = WeightedGraph::from_vector(&ExponentVector::zero(6));
        assert!(separates(&[e1], &k4, &empty).unwrap());

        let a5 = Action::graph(5).unwrap();
        let mut set: Vec<_> = (1..=10).map(|k| elementary_symmetric(&a5, k).unwrap()).collect();
        set.push(exps(&a5, &ev("g:5:1100000000")));
        let star = ev("g:5:1110000000");
        let mut triangle = ExponentVector::zero(10);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            triangle.0[pair_index(5, i, j)] = 1;
        }
        let (wa, wb) = (WeightedGraph::from_vector(&star), WeightedGraph::from_vector(&triangle));
        assert!(!separates(&set, &wa, &wb).unwrap());
        assert_ne!(a5.canonical_form(&star), a5.canonical_form(&triangle));
    }

    #[test]
    fn encodings() {
        let a = Action::graph(4).unwrap();
        assert_eq!(encode_vector(a.spec(), &ev("g:4:1,1,0,0,0,0")), "g:4:110000");
        assert_eq!(
            encode_vector(a.spec(), &ExponentVector(vec![12, 0, 0, 0, 0, 1])),
            "g:4:12,0,0,0,0,1"
        );
        assert!(parse_vector("g:4:11000").is_err());
        assert!(parse_vector("x:4:110000").is_err());
        assert!(parse_vector("g:4:11a000").is_err());
        assert!(parse_vector_for(a.spec(), "d:2:1100").is_err());
        let d = parse_vector("d:3:020001000").unwrap();
        assert_eq!(d.vector.0[1], 2);
        assert_eq!(d.vector.0[5], 1);
        assert!(parse_polynomial(&a, "2*g:4:11000").is_err());
        assert!(parse_polynomial(&a, "x*g:4:110000").is_err());
    }

    #[test]
    fn action_mismatch_is_an_error() {
        let a4 = Action::graph(4).unwrap();
        let a5 = Action::graph(5).unwrap();
        let p = InvariantPolynomial::one(&a4);
        let q = InvariantPolynomial::one(&a5);
        assert_eq!(p.mul(&q).unwrap_err(), Error::ActionMismatch);
    }

    fn arb_vector(m: usize, max: Mult) -> impl Strategy<Value = ExponentVector> {
        proptest::collection::vec(0..=max, m).prop_map(ExponentVector)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn canonical_form_is_orbit_invariant(v in arb_vector(10, 3), g in 0usize..120) {
            let a = Action::graph(5).unwrap();
            let sigma = &a.table().elements()[g];
            let c = a.canonical_form(&v);
            prop_assert_eq!(a.canonical_form(&v.permuted(sigma)), c.clone());
            prop_assert_eq!(a.canonical_form(&c), c);
        }

        #[test]
        fn product_commutes_associates(
            x in arb_vector(6, 2), y in arb_vector(6, 2), z in arb_vector(6, 1)
        ) {
            let a = Action::graph(4).unwrap();
            let (p, q, s) = (exps(&a, &x), exps(&a, &y), exps(&a, &z));
            let pq = p.mul(&q).unwrap();
            prop_assert_eq!(&pq, &q.mul(&p).unwrap());
            prop_assert_eq!(pq.mul(&s).unwrap(), p.mul(&q.mul(&s).unwrap()).unwrap());
            prop_assert_eq!(pq.homogeneous_degree(), Some(x.degree() + y.degree()));
        }

        #[test]
        fn polynomial_encoding_round_trips(x in arb_vector(6, 12), y in arb_vector(6, 3), c in -5i64..5) {
            let a = Action::graph(4).unwrap();
            let p = exps(&a, &x).add(&exps(&a, &y).scale(&Rational::new(c.into(), 3.into()))).unwrap();
            prop_assert_eq!(parse_polynomial(&a, &p.encode()).unwrap(), p.clone());
            prop_assert_eq!(InvariantPolynomial::from_json(&a, &p.to_json()).unwrap(), p);
        }
    }
}

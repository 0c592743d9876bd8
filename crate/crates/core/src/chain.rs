//! Shape grading and the chain product.
//!
//! A multigraph `g` is a superposition of simple graphs
//! `g_1 ⊇ g_2 ⊇ … ⊇ g_k` with `g_i` the edges of multiplicity at least `i`.
//! The chain product keeps a monomial product only when the two chains merge
//! into a single chain.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::Result;
use crate::gensets::{minimal_generating_set, SubalgebraSpans};
use crate::orbits::{Action, ExponentVector, InvariantPolynomial, Product};

/// Layers `L_1 ⊇ L_2 ⊇ …` of a multiplicity vector, as 0/1 masks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiChain {
    pub layers: Vec<Vec<bool>>,
}

impl MultiChain {
    pub fn shape(&self) -> Shape {
        Shape(
            self.layers
                .iter()
                .map(|l| l.iter().filter(|&&b| b).count())
                .collect(),
        )
    }
}

/// Layer sizes, weakly decreasing.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Shape(pub Vec<usize>);

impl Shape {
    /// Union of two shapes as multisets, sorted decreasingly.
    pub fn merge(&self, other: &Shape) -> Shape {
        let mut parts: Vec<usize> = self.0.iter().chain(&other.0).copied().collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Shape(parts)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }
}

pub fn layers(v: &ExponentVector) -> MultiChain {
    let k = v.max_mult();
    MultiChain {
        layers: (1..=k)
            .map(|i| v.entries().iter().map(|&c| c >= i).collect())
            .collect(),
    }
}

pub fn shape(v: &ExponentVector) -> Shape {
    layers(v).shape()
}

fn subset(a: &[bool], b: &[bool]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| !x || y)
}

/// Every layer of `a` is comparable with every layer of `b`.
pub fn mergeable(a: &MultiChain, b: &MultiChain) -> bool {
    a.layers
        .iter()
        .all(|x| b.layers.iter().all(|y| subset(x, y) || subset(y, x)))
}

/// [`mergeable`] on the vectors directly: two layers are incomparable exactly
/// when some positions `k, l` have `a_k > a_l` and `b_k < b_l`.
pub fn mergeable_vectors(a: &ExponentVector, b: &ExponentVector) -> bool {
    let (a, b) = (a.entries(), b.entries());
    for k in 0..a.len() {
        for l in 0..a.len() {
            if a[k] > a[l] && b[k] < b[l] {
                return false;
            }
        }
    }
    true
}

/// `p ⋆ q`.
pub fn chain_mul(p: &InvariantPolynomial, q: &InvariantPolynomial) -> Result<InvariantPolynomial> {
    p.product(q, Product::Chain)
}

/// Components of `p` by the shape of their terms.
pub fn shape_components(p: &InvariantPolynomial) -> BTreeMap<Shape, InvariantPolynomial> {
    let mut parts: BTreeMap<Shape, BTreeMap<ExponentVector, crate::kernel::Rational>> = BTreeMap::new();
    for (g, c) in p.terms() {
        parts.entry(shape(g)).or_default().insert(g.clone(), c.clone());
    }
    parts
        .into_iter()
        .map(|(s, t)| (s, InvariantPolynomial::from_canonical_map(p.action(), t)))
        .collect()
}

/// The single shape of a finely homogeneous invariant.
pub fn fine_shape(p: &InvariantPolynomial) -> Option<Shape> {
    let mut shapes = p.terms().keys().map(shape);
    let s = shapes.next()?;
    shapes.all(|t| t == s).then_some(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainTransferReport {
    pub n: usize,
    pub degree_cap: usize,
    pub chain_degrees: Vec<usize>,
    pub usual_degrees: Vec<usize>,
    /// Degrees where the chain generators span all of `I_d` under the usual
    /// product.
    pub generates_usual: bool,
    pub span_dims: Vec<usize>,
    pub component_dims: Vec<usize>,
}

/// Computes a chain-product generating set and checks that it also generates
/// under the usual product up to the cap.
pub fn chain_transfer_check(action: &Arc<Action>, degree_cap: usize) -> Result<ChainTransferReport> {
    let chain = minimal_generating_set(action, degree_cap, Product::Chain);
    let usual = minimal_generating_set(action, degree_cap, Product::Usual);
    let gens: Vec<InvariantPolynomial> = chain.generators.iter().map(|g| g.poly.clone()).collect();
    let mut spans = SubalgebraSpans::new(action, &gens, Product::Usual)?;
    let mut span_dims = Vec::new();
    let mut component_dims = Vec::new();
    for d in 1..=degree_cap {
        span_dims.push(spans.span_dim(d));
        component_dims.push(action.enumerate_canonical(d).dim());
    }
    Ok(ChainTransferReport {
        n: action.spec().vertices().unwrap_or(action.positions()),
        degree_cap,
        chain_degrees: chain.degrees(),
        usual_degrees: usual.degrees(),
        generates_usual: span_dims == component_dims,
        span_dims,
        component_dims,
    })
}

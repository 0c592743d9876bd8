//! Permutations, partitions and the induced actions of `S_n` on the edges
//! of graphs and on the arcs of digraphs.
//!
//! Positions are fixed: unordered pairs `{i,j}` (`i < j`) in lexicographic
//! order `{0,1} < {0,2} < ... < {n-2,n-1}`, and arcs `(i,j)` row-major with
//! loops. Vertices are 0-based internally; encodings and documentation use
//! 1-based labels.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::factorial;

/// Default cap on materialized group tables.
pub const DEFAULT_ORDER_CAP: usize = 50_000;

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(m: usize) -> Self {
        Permutation {
            images: (0..m).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let m = images.len();
        let mut seen = vec![false; m];
        for &i in &images {
            if i >= m || seen[i] {
                return Err(Error::InvalidPermutation(format!("{images:?}")));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation of `m` points from 1-based disjoint cycles.
    pub fn from_cycles(m: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..m).collect();
        let mut touched = HashSet::new();
        for cyc in cycles {
            for (k, &a) in cyc.iter().enumerate() {
                let b = cyc[(k + 1) % cyc.len()];
                if a == 0 || b == 0 || a > m || b > m || !touched.insert(a) {
                    return Err(Error::InvalidPermutation(format!("{cycles:?}")));
                }
                images[a - 1] = b - 1;
            }
        }
        Self::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Cycle lengths, decreasing.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let mut seen = vec![false; self.images.len()];
        let mut lengths = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i];
                len += 1;
            }
            lengths.push(len);
        }
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        lengths
    }

    /// Number of cycles of each length; index `i` counts `i`-cycles.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut ct = vec![0; self.images.len() + 1];
        for l in self.cycle_lengths() {
            ct[l] += 1;
        }
        ct
    }

    pub fn sign(&self) -> i8 {
        let even_cycles = self.cycle_lengths().iter().filter(|l| *l % 2 == 0).count();
        if even_cycles % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.images.len()];
        let mut any = false;
        for start in 0..self.images.len() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            any = true;
            write!(f, "(")?;
            let mut i = start;
            let mut first = true;
            while !seen[i] {
                seen[i] = true;
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                write!(f, "{}", i + 1)?;
                i = self.images[i];
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Multiplicity of each part size.
    pub fn multiplicities(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &p in &self.parts {
            *m.entry(p).or_insert(0) += 1;
        }
        m
    }

    /// `z_λ = ∏ i^{m_i} m_i!`, the centralizer order.
    pub fn z(&self) -> BigInt {
        self.multiplicities()
            .into_iter()
            .map(|(i, mi)| BigInt::from(i).pow(mi as u32) * factorial(mi))
            .product()
    }

    pub fn class_size(&self) -> BigInt {
        factorial(self.size()) / self.z()
    }

    /// A permutation of `0..n` with this cycle type.
    pub fn representative(&self) -> Permutation {
        let n = self.size();
        let mut images: Vec<usize> = (0..n).collect();
        let mut start = 0;
        for &p in &self.parts {
            for k in 0..p {
                images[start + k] = start + (k + 1) % p;
            }
            start += p;
        }
        Permutation { images }
    }

    /// All partitions of `n`, in reverse lexicographic order starting at `(n)`.
    pub fn all(n: usize) -> Vec<Partition> {
        fn rec(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if rem == 0 {
                out.push(Partition { parts: cur.clone() });
                return;
            }
            for p in (1..=rem.min(max)).rev() {
                cur.push(p);
                rec(rem - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(ToString::to_string).collect();
        write!(f, "({})", s.join(","))
    }
}

/// Conjugacy classes of `S_n` with their sizes `n!/z_λ`.
pub fn conjugacy_classes(n: usize) -> Vec<(Partition, BigInt)> {
    Partition::all(n)
        .into_iter()
        .map(|p| {
            let size = p.class_size();
            (p, size)
        })
        .collect()
}

/// How the group acts on the positions (variables).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ActionSpec {
    /// `S_n` on the `n(n-1)/2` vertex pairs.
    GraphEdges { n: usize },
    /// `S_n` on the `n²` ordered pairs, loops included.
    DigraphArcs { n: usize },
    /// `S_m` permuting `m` variables.
    Natural { m: usize },
    /// The group generated by the given permutations of `m` points.
    Explicit {
        m: usize,
        generators: Vec<Permutation>,
    },
}

impl ActionSpec {
    pub fn positions(&self) -> usize {
        match self {
            ActionSpec::GraphEdges { n } => n * n.saturating_sub(1) / 2,
            ActionSpec::DigraphArcs { n } => n * n,
            ActionSpec::Natural { m } | ActionSpec::Explicit { m, .. } => *m,
        }
    }

    /// Number of vertices for the graph and digraph kinds.
    pub fn vertices(&self) -> Option<usize> {
        match self {
            ActionSpec::GraphEdges { n } | ActionSpec::DigraphArcs { n } => Some(*n),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            ActionSpec::GraphEdges { n } => format!("graph-edges({n})"),
            ActionSpec::DigraphArcs { n } => format!("digraph-arcs({n})"),
            ActionSpec::Natural { m } => format!("natural({m})"),
            ActionSpec::Explicit { m, generators } => {
                let g: Vec<String> = generators.iter().map(ToString::to_string).collect();
                format!("explicit({m}; {})", g.join(", "))
            }
        }
    }

    /// Alternating group on `m` points, generated by 3-cycles `(1 2 k)`.
    pub fn alternating(m: usize) -> Result<Self> {
        let generators = (3..=m)
            .map(|k| Permutation::from_cycles(m, &[&[1, 2, k]]))
            .collect::<Result<Vec<_>>>()?;
        Ok(ActionSpec::Explicit { m, generators })
    }

    /// Maps a vertex permutation to the induced permutation of positions.
    pub fn induced(&self, vertex_perm: &Permutation) -> Option<Permutation> {
        match self {
            ActionSpec::GraphEdges { n } => Some(induced_edge_permutation(vertex_perm, *n)),
            ActionSpec::DigraphArcs { n } => Some(induced_arc_permutation(vertex_perm, *n)),
            _ => None,
        }
    }
}

/// Position of the pair `{i,j}` (0-based, `i != j`) among `n(n-1)/2`.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// The pairs in position order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            v.push((i, j));
        }
    }
    v
}

pub fn arc_index(n: usize, i: usize, j: usize) -> usize {
    i * n + j
}

pub fn induced_edge_permutation(vertex_perm: &Permutation, n: usize) -> Permutation {
    let images = pairs(n)
        .into_iter()
        .map(|(i, j)| pair_index(n, vertex_perm.apply(i), vertex_perm.apply(j)))
        .collect();
    Permutation { images }
}

pub fn induced_arc_permutation(vertex_perm: &Permutation, n: usize) -> Permutation {
    let mut images = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            images.push(arc_index(n, vertex_perm.apply(i), vertex_perm.apply(j)));
        }
    }
    Permutation { images }
}

/// Cycle type of the induced edge permutation of any element of class `λ`,
/// as counts indexed by cycle length.
pub fn edge_cycle_type(lambda: &Partition) -> Vec<usize> {
    let n = lambda.size();
    let m = n * n.saturating_sub(1) / 2;
    let mut l = vec![0usize; m.max(n) + 1];
    let parts = lambda.parts();
    for (k, &a) in parts.iter().enumerate() {
        if a % 2 == 1 {
            l[a] += (a - 1) / 2;
        } else {
            l[a] += (a - 2) / 2;
            l[a / 2] += 1;
        }
        for &b in &parts[k + 1..] {
            let g = a.gcd(&b);
            l[a / g * b] += g;
        }
    }
    l
}

/// Cycle type of the induced arc permutation (loops included).
pub fn arc_cycle_type(lambda: &Partition) -> Vec<usize> {
    let n = lambda.size();
    let mut l = vec![0usize; n * n + 1];
    let parts = lambda.parts();
    for (k, &a) in parts.iter().enumerate() {
        l[a] += a;
        for &b in &parts[k + 1..] {
            let g = a.gcd(&b);
            l[a / g * b] += 2 * g;
        }
    }
    l
}

/// Cycle type (indexed by length) of a class of `S_n` acting through `action`.
pub fn class_cycle_type(action: &ActionSpec, lambda: &Partition) -> Option<Vec<usize>> {
    match action {
        ActionSpec::GraphEdges { .. } => Some(edge_cycle_type(lambda)),
        ActionSpec::DigraphArcs { .. } => Some(arc_cycle_type(lambda)),
        ActionSpec::Natural { m } => {
            let mut l = vec![0usize; m + 1];
            for &p in lambda.parts() {
                l[p] += 1;
            }
            Some(l)
        }
        ActionSpec::Explicit { .. } => None,
    }
}

/// A fully materialized permutation group on the positions of an action.
#[derive(Clone, Debug)]
pub struct GroupTable {
    elements: Vec<Permutation>,
    /// For graph and digraph actions, the vertex permutation behind each element.
    vertex_perms: Option<Vec<Permutation>>,
}

impl GroupTable {
    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn vertex_perms(&self) -> Option<&[Permutation]> {
        self.vertex_perms.as_deref()
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn symmetric_group(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(Permutation {
            images: cur.clone(),
        });
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

pub fn group_table(action: &ActionSpec, cap: usize) -> Result<GroupTable> {
    match action {
        ActionSpec::GraphEdges { n } | ActionSpec::DigraphArcs { n } => {
            if factorial(*n) > BigInt::from(cap) {
                return Err(Error::GroupTooLarge(cap));
            }
            let vertex = symmetric_group(*n);
            let elements = vertex
                .iter()
                .map(|p| action.induced(p).expect("graph kinds induce"))
                .collect();
            Ok(GroupTable {
                elements,
                vertex_perms: Some(vertex),
            })
        }
        ActionSpec::Natural { m } => {
            if factorial(*m) > BigInt::from(cap) {
                return Err(Error::GroupTooLarge(cap));
            }
            Ok(GroupTable {
                elements: symmetric_group(*m),
                vertex_perms: None,
            })
        }
        ActionSpec::Explicit { m, generators } => {
            for g in generators {
                if g.degree() != *m {
                    return Err(Error::InvalidPermutation(g.to_string()));
                }
            }
            let id = Permutation::identity(*m);
            let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
            let mut elements = vec![id.clone()];
            let mut queue = VecDeque::from([id]);
            while let Some(p) = queue.pop_front() {
                for g in generators {
                    let q = g.compose(&p);
                    if seen.insert(q.clone()) {
                        if seen.len() > cap {
                            return Err(Error::GroupTooLarge(cap));
                        }
                        elements.push(q.clone());
                        queue.push_back(q);
                    }
                }
            }
            elements.sort();
            Ok(GroupTable {
                elements,
                vertex_perms: None,
            })
        }
    }
}

/// One row of the sign check: vertex sign against induced edge sign.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignLemmaReport {
    pub n: usize,
    pub checked: usize,
    pub holds: bool,
    /// First vertex permutation violating the rule, if any.
    pub counterexample: Option<String>,
}

/// For every `σ ∈ S_n`: the induced edge permutation has sign `sign(σ)` when
/// `n` is odd and `+1` when `n` is even.
pub fn check_sign_lemma(n: usize) -> SignLemmaReport {
    let mut checked = 0;
    for sigma in symmetric_group(n) {
        checked += 1;
        let induced = induced_edge_permutation(&sigma, n).sign();
        let expected = if n % 2 == 1 { sigma.sign() } else { 1 };
        if induced != expected {
            return SignLemmaReport {
                n,
                checked,
                holds: false,
                counterexample: Some(sigma.to_string()),
            };
        }
    }
    SignLemmaReport {
        n,
        checked,
        holds: true,
        counterexample: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nonzero(ct: &[usize]) -> Vec<(usize, usize)> {
        ct.iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i, c))
            .collect()
    }

    #[test]
    fn pair_positions_are_lexicographic() {
        assert_eq!(pairs(4), vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        for (k, (i, j)) in pairs(7).into_iter().enumerate() {
            assert_eq!(pair_index(7, i, j), k);
            assert_eq!(pair_index(7, j, i), k);
        }
    }

    #[test]
    fn induced_edges_of_identity_and_transposition() {
        assert!(induced_edge_permutation(&Permutation::identity(4), 4).is_identity());
        let t = Permutation::from_cycles(4, &[&[1, 2]]).unwrap();
        let e = induced_edge_permutation(&t, 4);
        // {1,2} and {3,4} fixed; {1,3}<->{2,3}; {1,4}<->{2,4}
        assert_eq!(e.images(), &[0, 3, 4, 1, 2, 5]);
        let c = Permutation::from_cycles(4, &[&[1, 2, 3, 4]]).unwrap();
        assert_eq!(induced_edge_permutation(&c, 4).cycle_lengths(), vec![4, 2]);
    }

    #[test]
    fn induced_arcs() {
        assert!(induced_arc_permutation(&Permutation::identity(3), 3).is_identity());
        let t = Permutation::from_cycles(3, &[&[1, 2]]).unwrap();
        let a = induced_arc_permutation(&t, 3);
        let idx = |i: usize, j: usize| arc_index(3, i - 1, j - 1);
        assert_eq!(a.apply(idx(1, 1)), idx(2, 2));
        assert_eq!(a.apply(idx(1, 3)), idx(2, 3));
        assert_eq!(a.apply(idx(3, 1)), idx(3, 2));
        assert_eq!(a.apply(idx(1, 2)), idx(2, 1));
        assert_eq!(a.apply(idx(3, 3)), idx(3, 3));
        let c = Permutation::from_cycles(3, &[&[1, 2, 3]]).unwrap();
        assert_eq!(induced_arc_permutation(&c, 3).cycle_lengths(), vec![3, 3, 3]);
    }

    #[test]
    fn class_sizes() {
        let classes = conjugacy_classes(3);
        let sizes: Vec<(Vec<usize>, i64)> = classes
            .iter()
            .map(|(p, s)| (p.parts().to_vec(), s.try_into().unwrap()))
            .collect();
        assert_eq!(
            sizes,
            vec![(vec![3], 2), (vec![2, 1], 3), (vec![1, 1, 1], 1)]
        );
        assert_eq!(Partition::new(vec![2, 1, 1]).class_size(), BigInt::from(6));
        let total: BigInt = conjugacy_classes(5).into_iter().map(|(_, s)| s).sum();
        assert_eq!(total, BigInt::from(120));
    }

    #[test]
    fn edge_cycle_type_examples() {
        assert_eq!(nonzero(&edge_cycle_type(&Partition::new(vec![1; 6]))), vec![(1, 15)]);
        assert_eq!(
            nonzero(&edge_cycle_type(&Partition::new(vec![4]))),
            vec![(2, 1), (4, 1)]
        );
        assert_eq!(
            nonzero(&edge_cycle_type(&Partition::new(vec![2, 1, 1]))),
            vec![(1, 2), (2, 2)]
        );
    }

    #[test]
    fn arc_cycle_type_examples() {
        assert_eq!(nonzero(&arc_cycle_type(&Partition::new(vec![1; 4]))), vec![(1, 16)]);
        assert_eq!(nonzero(&arc_cycle_type(&Partition::new(vec![3]))), vec![(3, 3)]);
        assert_eq!(
            nonzero(&arc_cycle_type(&Partition::new(vec![2, 1]))),
            vec![(1, 1), (2, 4)]
        );
    }

    #[test]
    fn cycle_type_formulas_match_brute_force() {
        for n in 1..=8 {
            for lambda in Partition::all(n) {
                let rep = lambda.representative();
                let brute = induced_edge_permutation(&rep, n).cycle_type();
                let formula = edge_cycle_type(&lambda);
                assert_eq!(nonzero(&brute), nonzero(&formula), "edges, {lambda}");
                if n <= 6 {
                    let brute = induced_arc_permutation(&rep, n).cycle_type();
                    assert_eq!(nonzero(&brute), nonzero(&arc_cycle_type(&lambda)), "arcs, {lambda}");
                }
            }
        }
    }

    #[test]
    fn group_table_orders() {
        assert_eq!(group_table(&ActionSpec::GraphEdges { n: 4 }, DEFAULT_ORDER_CAP).unwrap().order(), 24);
        assert_eq!(group_table(&ActionSpec::DigraphArcs { n: 3 }, DEFAULT_ORDER_CAP).unwrap().order(), 6);
        let a4 = ActionSpec::alternating(4).unwrap();
        let t = group_table(&a4, DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(t.order(), 12);
        assert!(t.elements().iter().all(|p| p.sign() == 1));
        assert_eq!(
            group_table(&ActionSpec::GraphEdges { n: 9 }, DEFAULT_ORDER_CAP).unwrap_err(),
            Error::GroupTooLarge(DEFAULT_ORDER_CAP)
        );
        let s5 = ActionSpec::Explicit {
            m: 5,
            generators: vec![
                Permutation::from_cycles(5, &[&[1, 2]]).unwrap(),
                Permutation::from_cycles(5, &[&[1, 2, 3, 4, 5]]).unwrap(),
            ],
        };
        assert_eq!(group_table(&s5, 100).unwrap_err(), Error::GroupTooLarge(100));
    }

    #[test]
    fn signs() {
        assert_eq!(Permutation::identity(5).sign(), 1);
        let t4 = Permutation::from_cycles(4, &[&[1, 2]]).unwrap();
        assert_eq!(induced_edge_permutation(&t4, 4).sign(), 1);
        let t5 = Permutation::from_cycles(5, &[&[1, 2]]).unwrap();
        assert_eq!(induced_edge_permutation(&t5, 5).sign(), -1);
        for n in 2..=7 {
            assert!(check_sign_lemma(n).holds, "n = {n}");
        }
    }

    #[test]
    fn invalid_permutations() {
        assert!(Permutation::from_images(vec![0, 0]).is_err());
        assert!(Permutation::from_images(vec![0, 2]).is_err());
        assert!(Permutation::from_cycles(3, &[&[1, 4]]).is_err());
    }

    proptest! {
        #[test]
        fn class_sizes_sum_to_factorial(n in 1usize..9) {
            let total: BigInt = conjugacy_classes(n).into_iter().map(|(_, s)| s).sum();
            prop_assert_eq!(total, factorial(n));
        }

        #[test]
        fn induced_action_is_a_homomorphism(
            v in Just((0..6).collect::<Vec<usize>>()).prop_shuffle(),
            w in Just((0..6).collect::<Vec<usize>>()).prop_shuffle(),
        ) {
            let s = Permutation::from_images(v).unwrap();
            let t = Permutation::from_images(w).unwrap();
            let st = induced_edge_permutation(&s.compose(&t), 6);
            prop_assert_eq!(st, induced_edge_permutation(&s, 6).compose(&induced_edge_permutation(&t, 6)));
            let st = induced_arc_permutation(&s.compose(&t), 6);
            prop_assert_eq!(st, induced_arc_permutation(&s, 6).compose(&induced_arc_permutation(&t, 6)));
        }
    }
}

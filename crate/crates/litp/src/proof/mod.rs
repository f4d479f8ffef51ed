//! Resolution proofs as immutable DAGs.
//!
//! A proof is a vector of nodes where leaves are input clauses tagged with
//! their partition and inner nodes resolve two earlier nodes on a pivot
//! variable. The builder keeps antecedent indices strictly below the node's
//! own index, so iteration order is already topological and the structure is
//! acyclic by construction; `validate` re-checks everything against a given
//! formula anyway, since proofs also arrive from outside via TraceCheck.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::formula::{Clause, Lit, PartIdx, PartitionedCnf, Var};

mod tracecheck;

pub use tracecheck::{import_tracecheck, write_tracecheck, ImportError};

/// Index of a node within its proof.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeId(u32);

impl NodeId {
    pub fn new(index: usize) -> Self {
        NodeId(u32::try_from(index).expect("proof too large"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Origin {
    /// Input clause, tagged with the 1-based partition it came from.
    Leaf { partition: PartIdx },
    /// Resolution of `pos` (containing the pivot positively) with `neg`
    /// (containing it negatively).
    Inner { pivot: Var, pos: NodeId, neg: NodeId },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProofNode {
    pub clause: Clause,
    pub origin: Origin,
}

/// A trimmed refutation: every node is reachable from the root by following
/// antecedents, and the root derives the empty clause.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ResolutionProof {
    nodes: Vec<ProofNode>,
    root: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("pivot {pivot} does not occur with the required polarity")]
    MissingPivot { pivot: Var },
    #[error("resolvent would contain variable {var} in both polarities")]
    Tautology { var: Var },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("chain needs at least two clauses")]
    TooShort,
    #[error("no variable occurs with opposite polarities in the chained clauses")]
    NoPivot,
    #[error("ambiguous pivot: both {0} and {1} clash")]
    AmbiguousPivot(Var, Var),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("node {node}: leaf clause does not occur in partition {partition}")]
    BadLeaf { node: usize, partition: PartIdx },
    #[error("node {node}: clause is not the resolvent of its antecedents")]
    BadResolvent { node: usize },
    #[error("root clause is not empty")]
    RootNotEmpty,
    #[error("antecedent references form a cycle")]
    Cycle,
}

/// Resolves two clauses on `pivot`; `pos` must hold it positively and `neg`
/// negatively. The result is the merged clause without the pivot.
pub fn resolve_clauses(pos: &Clause, neg: &Clause, pivot: Var) -> Result<Clause, ResolveError> {
    if pos.polarity_of(pivot) != Some(true) || neg.polarity_of(pivot) != Some(false) {
        return Err(ResolveError::MissingPivot { pivot });
    }
    let mut lits = Vec::with_capacity(pos.len() + neg.len() - 2);
    lits.extend(pos.lits().iter().copied().filter(|l| l.var() != pivot));
    lits.extend(neg.lits().iter().copied().filter(|l| l.var() != pivot));
    Clause::new(lits).map_err(|e| ResolveError::Tautology { var: e.var })
}

/// Finds the unique clashing variable between two clauses. Returns the pivot
/// and whether `a` is the positive side.
pub fn find_pivot(a: &Clause, b: &Clause) -> Result<(Var, bool), ChainError> {
    let mut found: Option<(Var, bool)> = None;
    let (mut i, mut j) = (0, 0);
    let (al, bl) = (a.lits(), b.lits());
    while i < al.len() && j < bl.len() {
        match al[i].var().cmp(&bl[j].var()) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                if al[i].is_positive() != bl[j].is_positive() {
                    let pivot = (al[i].var(), al[i].is_positive());
                    if let Some((prev, _)) = found {
                        return Err(ChainError::AmbiguousPivot(prev, pivot.0));
                    }
                    found = Some(pivot);
                }
                i += 1;
                j += 1;
            }
        }
    }
    found.ok_or(ChainError::NoPivot)
}

impl ResolutionProof {
    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &ProofNode {
        &self.nodes[id.index()]
    }

    /// Node ids in dependency order (antecedents before dependents).
    pub fn topo(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn nodes(&self) -> &[ProofNode] {
        &self.nodes
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n.origin, Origin::Leaf { .. })).count()
    }

    /// Rewrites leaf partition tags through `remap` (1-based old index to
    /// 1-based new index), e.g. after merging CNF partitions into groups.
    pub fn remap_partitions(&self, remap: &[PartIdx]) -> ResolutionProof {
        let nodes = self
            .nodes
            .iter()
            .map(|n| ProofNode {
                clause: n.clause.clone(),
                origin: match n.origin {
                    Origin::Leaf { partition } => Origin::Leaf { partition: remap[partition] },
                    ref inner => inner.clone(),
                },
            })
            .collect();
        ResolutionProof { nodes, root: self.root }
    }

    /// Full structural check against `cnf`: leaves occur in their claimed
    /// partitions, inner clauses are exact resolvents, indices are
    /// topologically ordered, and the root clause is empty.
    pub fn validate(&self, cnf: &PartitionedCnf) -> Result<(), ValidationError> {
        for (i, n) in self.nodes.iter().enumerate() {
            match &n.origin {
                Origin::Leaf { partition } => {
                    let k = *partition;
                    if k < 1
                        || k > cnf.num_partitions()
                        || !cnf.partition(k).contains(&n.clause)
                    {
                        return Err(ValidationError::BadLeaf { node: i, partition: k });
                    }
                }
                Origin::Inner { pivot, pos, neg } => {
                    if pos.index() >= i || neg.index() >= i {
                        return Err(ValidationError::Cycle);
                    }
                    let derived = resolve_clauses(
                        &self.nodes[pos.index()].clause,
                        &self.nodes[neg.index()].clause,
                        *pivot,
                    )
                    .map_err(|_| ValidationError::BadResolvent { node: i })?;
                    if derived != n.clause {
                        return Err(ValidationError::BadResolvent { node: i });
                    }
                }
            }
        }
        if !self.node(self.root).clause.is_empty() {
            return Err(ValidationError::RootNotEmpty);
        }
        Ok(())
    }
}

/// Append-only proof constructor. Inner nodes may only reference ids already
/// handed out, which keeps the node vector topologically sorted.
#[derive(Default)]
pub struct ProofBuilder {
    nodes: Vec<ProofNode>,
}

impl ProofBuilder {
    pub fn new() -> Self {
        ProofBuilder { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn clause(&self, id: NodeId) -> &Clause {
        &self.nodes[id.index()].clause
    }

    pub fn add_leaf(&mut self, clause: Clause, partition: PartIdx) -> NodeId {
        self.push(ProofNode { clause, origin: Origin::Leaf { partition } })
    }

    /// Resolves two existing nodes; fails if the pivot polarities are wrong
    /// or the resolvent would be tautological.
    pub fn add_resolution(
        &mut self,
        pos: NodeId,
        neg: NodeId,
        pivot: Var,
    ) -> Result<NodeId, ResolveError> {
        let clause = resolve_clauses(self.clause(pos), self.clause(neg), pivot)?;
        Ok(self.push(ProofNode { clause, origin: Origin::Inner { pivot, pos, neg } }))
    }

    /// Left-fold of a resolution chain: each step resolves the accumulator
    /// with the next clause on their unique clashing variable. A chain of k
    /// clauses expands to k-1 binary nodes; the id of the last is returned.
    pub fn add_chain(&mut self, ids: &[NodeId]) -> Result<NodeId, ChainError> {
        if ids.len() < 2 {
            return Err(ChainError::TooShort);
        }
        let mut acc = ids[0];
        for &next in &ids[1..] {
            let (pivot, acc_is_pos) = find_pivot(self.clause(acc), self.clause(next))?;
            let (pos, neg) = if acc_is_pos { (acc, next) } else { (next, acc) };
            acc = self.add_resolution(pos, neg, pivot)?;
        }
        Ok(acc)
    }

    fn push(&mut self, node: ProofNode) -> NodeId {
        let id = NodeId(u32::try_from(self.nodes.len()).expect("proof too large"));
        self.nodes.push(node);
        id
    }

    /// Finishes the proof rooted at `root`, dropping every node that the
    /// root does not reach. Leaf tags survive the renumbering.
    pub fn finish(self, root: NodeId) -> ResolutionProof {
        let mut keep = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([root]);
        keep[root.index()] = true;
        while let Some(id) = queue.pop_front() {
            if let Origin::Inner { pos, neg, .. } = self.nodes[id.index()].origin {
                for next in [pos, neg] {
                    if !keep[next.index()] {
                        keep[next.index()] = true;
                        queue.push_back(next);
                    }
                }
            }
        }
        let mut new_ids = vec![NodeId(0); self.nodes.len()];
        let mut nodes = Vec::with_capacity(keep.iter().filter(|&&k| k).count());
        for (i, node) in self.nodes.into_iter().enumerate() {
            if !keep[i] {
                continue;
            }
            let remapped = match node.origin {
                Origin::Leaf { .. } => node,
                Origin::Inner { pivot, pos, neg } => ProofNode {
                    clause: node.clause,
                    origin: Origin::Inner {
                        pivot,
                        pos: new_ids[pos.index()],
                        neg: new_ids[neg.index()],
                    },
                },
            };
            new_ids[i] = NodeId(nodes.len() as u32);
            nodes.push(remapped);
        }
        let root = new_ids[root.index()];
        ResolutionProof { nodes, root }
    }
}

/// DIMACS code to literal; panics on 0. Handy when building fixtures.
pub fn lit(code: i32) -> Lit {
    Lit::from_dimacs(code).expect("0 is not a literal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_dimacs;

    fn two_units() -> PartitionedCnf {
        parse_dimacs("p cnf 1 2\nc part 1\n1 0\nc part 2\n-1 0\n").unwrap()
    }

    #[test]
    fn resolution_of_two_units() {
        let cnf = two_units();
        let mut b = ProofBuilder::new();
        let p = b.add_leaf(Clause::from_dimacs(&[1]), 1);
        let np = b.add_leaf(Clause::from_dimacs(&[-1]), 2);
        let root = b.add_resolution(p, np, Var::new(1)).unwrap();
        let proof = b.finish(root);
        assert_eq!(proof.len(), 3);
        assert!(proof.node(proof.root()).clause.is_empty());
        proof.validate(&cnf).unwrap();
    }

    #[test]
    fn resolve_rejects_missing_pivot_and_tautology() {
        let c1 = Clause::from_dimacs(&[1, 2]);
        let c2 = Clause::from_dimacs(&[-1, -2]);
        assert!(matches!(
            resolve_clauses(&c1, &c2, Var::new(3)),
            Err(ResolveError::MissingPivot { .. })
        ));
        assert!(matches!(
            resolve_clauses(&c1, &c2, Var::new(1)),
            Err(ResolveError::Tautology { var }) if var == Var::new(2)
        ));
    }

    #[test]
    fn chain_folds_left() {
        // (1 -2), (-1), (2): fold resolves on 1 then on 2, ending empty.
        let mut b = ProofBuilder::new();
        let a = b.add_leaf(Clause::from_dimacs(&[1, -2]), 1);
        let c = b.add_leaf(Clause::from_dimacs(&[-1]), 1);
        let d = b.add_leaf(Clause::from_dimacs(&[2]), 2);
        let root = b.add_chain(&[a, c, d]).unwrap();
        assert!(b.clause(root).is_empty());
        let proof = b.finish(root);
        assert_eq!(proof.len(), 5); // 3 leaves + 2 binary steps
    }

    #[test]
    fn chain_pivot_errors() {
        let mut b = ProofBuilder::new();
        let a = b.add_leaf(Clause::from_dimacs(&[1, 2]), 1);
        let c = b.add_leaf(Clause::from_dimacs(&[-1, -2]), 1);
        let d = b.add_leaf(Clause::from_dimacs(&[3]), 1);
        assert!(matches!(b.add_chain(&[a, c]), Err(ChainError::AmbiguousPivot(..))));
        assert!(matches!(b.add_chain(&[a, d]), Err(ChainError::NoPivot)));
        assert!(matches!(b.add_chain(&[a]), Err(ChainError::TooShort)));
    }

    #[test]
    fn finish_trims_unreachable_nodes() {
        let mut b = ProofBuilder::new();
        let p = b.add_leaf(Clause::from_dimacs(&[1]), 1);
        let _junk = b.add_leaf(Clause::from_dimacs(&[-1]), 2); // never referenced
        let np = b.add_leaf(Clause::from_dimacs(&[-1]), 2);
        let root = b.add_resolution(p, np, Var::new(1)).unwrap();
        let proof = b.finish(root);
        assert_eq!(proof.len(), 3);
        proof.validate(&two_units()).unwrap();
    }

    #[test]
    fn validate_catches_wrong_partition_tag() {
        let cnf = two_units();
        let mut b = ProofBuilder::new();
        let p = b.add_leaf(Clause::from_dimacs(&[1]), 2); // actually in partition 1
        let np = b.add_leaf(Clause::from_dimacs(&[-1]), 2);
        let root = b.add_resolution(p, np, Var::new(1)).unwrap();
        let proof = b.finish(root);
        assert!(matches!(
            proof.validate(&cnf),
            Err(ValidationError::BadLeaf { partition: 2, .. })
        ));
    }

    #[test]
    fn validate_requires_empty_root() {
        let cnf = two_units();
        let mut b = ProofBuilder::new();
        let p = b.add_leaf(Clause::from_dimacs(&[1]), 1);
        let proof = b.finish(p);
        assert_eq!(proof.validate(&cnf), Err(ValidationError::RootNotEmpty));
    }

    #[test]
    fn single_empty_leaf_is_a_valid_refutation() {
        let cnf = parse_dimacs("p cnf 1 1\nc part 1\n0\n").unwrap();
        let mut b = ProofBuilder::new();
        let e = b.add_leaf(Clause::empty(), 1);
        let proof = b.finish(e);
        proof.validate(&cnf).unwrap();
    }
}

//! Proof-sweep interpolation.
//!
//! One topological pass over a resolution refutation computes a partial
//! interpolant per node. Leaves restrict their clause by label: an A-side
//! leaf keeps exactly its b-labeled literals, a B-side leaf negates exactly
//! its a-labeled ones. Inner nodes combine the antecedent interpolants
//! according to the joined label of the pivot: `a` disjoins, `b` conjoins,
//! `ab` guards both sides with the pivot literal.
//!
//! The label of a variable at an inner node is the join of its labels in the
//! antecedent clauses that still contain it; the sweep carries one sorted
//! (variable, label) vector per node so that lookup and merge stay linear in
//! clause width.

use thiserror::Error;

use crate::formula::{BoolExpr, PartIdx, PartitionedCnf, Var};
use crate::labeling::{ClassMap, Configuration, Label, LabelError, LabelingSystem};
use crate::proof::{NodeId, Origin, ResolutionProof};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepStats {
    /// Number of proof nodes processed; every node is visited exactly once.
    pub nodes_visited: usize,
}

/// Result of a sweep: the interpolant at every node, root included.
#[derive(Debug)]
pub struct Interpolation {
    partials: Vec<BoolExpr>,
    root: NodeId,
    pub stats: SweepStats,
}

impl Interpolation {
    pub fn root_interpolant(&self) -> &BoolExpr {
        &self.partials[self.root.index()]
    }

    pub fn partial(&self, id: NodeId) -> &BoolExpr {
        &self.partials[id.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ItpError {
    #[error("leaf {node} cites partition {partition}, but the formula has {count}")]
    LeafOutOfRange { node: usize, partition: PartIdx, count: usize },
    #[error("leaf {node} mentions variable {var}, which occurs nowhere in the formula")]
    UnknownVar { node: usize, var: Var },
    #[error("node {node} resolves on {pivot}, but an antecedent does not contain it")]
    PivotMissing { node: usize, pivot: Var },
    #[error(transparent)]
    Labeling(#[from] LabelError),
}

fn lookup(vec: &[(Var, Label)], v: Var) -> Option<Label> {
    vec.binary_search_by_key(&v, |&(var, _)| var).ok().map(|i| vec[i].1)
}

/// Merge of two sorted label vectors, joining labels of common variables and
/// dropping the pivot.
fn merge_minus(a: &[(Var, Label)], b: &[(Var, Label)], pivot: Var) -> Vec<(Var, Label)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let (va, vb) = (a[i].0, b[j].0);
        match va.cmp(&vb) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                if va != pivot {
                    out.push((va, a[i].1.join(b[j].1)));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out.retain(|&(v, _)| v != pivot);
    out
}

/// Sweeps `proof` and returns the interpolant for the split `config` under
/// `system`. The proof is trusted structurally (use `validate` first when it
/// comes from outside); only leaf partition tags and variable occurrence are
/// re-checked here because the labeling depends on them.
pub fn interpolate(
    proof: &ResolutionProof,
    cnf: &PartitionedCnf,
    config: &Configuration,
    system: &LabelingSystem,
) -> Result<Interpolation, ItpError> {
    let classes = ClassMap::new(cnf, config);
    let mut partials: Vec<BoolExpr> = Vec::with_capacity(proof.len());
    let mut labels: Vec<Vec<(Var, Label)>> = Vec::with_capacity(proof.len());
    let mut visited = 0usize;
    for id in proof.topo() {
        visited += 1;
        let node = proof.node(id);
        match node.origin {
            Origin::Leaf { partition } => {
                if partition < 1 || partition > cnf.num_partitions() {
                    return Err(ItpError::LeafOutOfRange {
                        node: id.index(),
                        partition,
                        count: cnf.num_partitions(),
                    });
                }
                let mut vec = Vec::with_capacity(node.clause.len());
                for l in node.clause.lits() {
                    let class = classes
                        .class(l.var())
                        .ok_or(ItpError::UnknownVar { node: id.index(), var: l.var() })?;
                    vec.push((l.var(), system.leaf_label(id, l.var(), class)?));
                }
                let itp = if config.is_a(partition) {
                    BoolExpr::or(
                        node.clause
                            .lits()
                            .iter()
                            .zip(&vec)
                            .filter(|&(_, &(_, lab))| lab == Label::B)
                            .map(|(&l, _)| BoolExpr::lit(l))
                            .collect(),
                    )
                } else {
                    BoolExpr::and(
                        node.clause
                            .lits()
                            .iter()
                            .zip(&vec)
                            .filter(|&(_, &(_, lab))| lab == Label::A)
                            .map(|(&l, _)| BoolExpr::lit(l.negated()))
                            .collect(),
                    )
                };
                partials.push(itp);
                labels.push(vec);
            }
            Origin::Inner { pivot, pos, neg } => {
                let lp = lookup(&labels[pos.index()], pivot)
                    .ok_or(ItpError::PivotMissing { node: id.index(), pivot })?;
                let ln = lookup(&labels[neg.index()], pivot)
                    .ok_or(ItpError::PivotMissing { node: id.index(), pivot })?;
                let ip = partials[pos.index()].clone();
                let in_ = partials[neg.index()].clone();
                let itp = match lp.join(ln) {
                    Label::A => BoolExpr::or2(ip, in_),
                    Label::B => BoolExpr::and2(ip, in_),
                    Label::AB => BoolExpr::and2(
                        BoolExpr::or2(ip, BoolExpr::var(pivot)),
                        BoolExpr::or2(in_, BoolExpr::not_var(pivot)),
                    ),
                };
                let merged = merge_minus(&labels[pos.index()], &labels[neg.index()], pivot);
                partials.push(itp);
                labels.push(merged);
            }
        }
    }
    Ok(Interpolation {
        partials,
        root: proof.root(),
        stats: SweepStats { nodes_visited: visited },
    })
}

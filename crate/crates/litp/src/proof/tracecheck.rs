//! TraceCheck-format proof exchange.
//!
//! Each line is `<id> <lit>* 0 <antecedent-id>* 0`. A line with no
//! antecedents is a leaf; its partition is found by clause lookup in the
//! formula. When the same clause occurs in several partitions the file must
//! disambiguate with a `c part <k>` comment line immediately before the leaf.
//! A line with k >= 2 antecedents is a resolution chain and expands to k-1
//! binary nodes by left fold. Lines may appear in any order; references are
//! resolved before expansion.

use std::collections::HashMap;

use thiserror::Error;

use super::{ChainError, NodeId, Origin, ProofBuilder, ResolutionProof, ValidationError};
use crate::formula::{Clause, Lit, PartIdx, PartitionedCnf};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImportError {
    #[error("line {line}: syntax error: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: antecedent {id} is not defined anywhere")]
    UnknownAntecedent { line: usize, id: u64 },
    #[error("line {line}: leaf clause occurs in partitions {candidates:?}; add a `c part <k>` annotation")]
    AmbiguousLeafPartition { line: usize, candidates: Vec<PartIdx> },
    #[error("line {line}: leaf clause does not occur in the formula")]
    UnknownLeaf { line: usize },
    #[error("line {line}: leaf clause does not occur in annotated partition {partition}")]
    AnnotationMismatch { line: usize, partition: PartIdx },
    #[error("line {line}: chain error: {source}")]
    Chain {
        line: usize,
        #[source]
        source: ChainError,
    },
    #[error("line {line}: chain resolves to {derived}, but the line declares {declared}")]
    ChainMismatch { line: usize, derived: Clause, declared: Clause },
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

fn syntax(line: usize, msg: impl Into<String>) -> ImportError {
    ImportError::Syntax { line, msg: msg.into() }
}

struct Record {
    line: usize,
    clause: Clause,
    antecedents: Vec<u64>,
    annotation: Option<PartIdx>,
}

pub fn import_tracecheck(
    text: &str,
    cnf: &PartitionedCnf,
) -> Result<ResolutionProof, ImportError> {
    let mut records: Vec<Record> = Vec::new();
    let mut by_id: HashMap<u64, usize> = HashMap::new();
    let mut pending_annotation: Option<PartIdx> = None;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            let mut words = rest.split_whitespace();
            if words.next() == Some("part") {
                let k: PartIdx = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .filter(|&k| k >= 1 && k <= cnf.num_partitions())
                    .ok_or_else(|| syntax(line_no, "bad partition annotation"))?;
                pending_annotation = Some(k);
            }
            continue;
        }
        let mut tokens = line.split_whitespace().map(|w| {
            w.parse::<i64>().map_err(|_| syntax(line_no, format!("bad token `{w}`")))
        });
        let id = match tokens.next() {
            Some(t) => t?,
            None => continue,
        };
        if id <= 0 {
            return Err(syntax(line_no, "node id must be positive"));
        }
        let mut lits: Vec<Lit> = Vec::new();
        let mut saw_zero = false;
        for t in tokens.by_ref() {
            let t = t?;
            if t == 0 {
                saw_zero = true;
                break;
            }
            let code = i32::try_from(t).map_err(|_| syntax(line_no, "literal out of range"))?;
            let var = code.unsigned_abs();
            if var > cnf.num_vars() {
                return Err(syntax(line_no, format!("variable {var} out of range")));
            }
            lits.push(Lit::from_dimacs(code).unwrap());
        }
        if !saw_zero {
            return Err(syntax(line_no, "missing literal terminator"));
        }
        let mut antecedents = Vec::new();
        saw_zero = false;
        for t in tokens.by_ref() {
            let t = t?;
            if t == 0 {
                saw_zero = true;
                break;
            }
            if t < 0 {
                return Err(syntax(line_no, "antecedent ids must be positive"));
            }
            antecedents.push(t as u64);
        }
        if !saw_zero {
            return Err(syntax(line_no, "missing antecedent terminator"));
        }
        if tokens.next().is_some() {
            return Err(syntax(line_no, "trailing tokens after line"));
        }
        let clause = Clause::new(lits)
            .map_err(|e| syntax(line_no, format!("tautological clause: {e}")))?;
        if by_id.insert(id as u64, records.len()).is_some() {
            return Err(syntax(line_no, format!("node id {id} defined twice")));
        }
        if antecedents.len() == 1 {
            return Err(syntax(line_no, "chain with a single antecedent"));
        }
        records.push(Record {
            line: line_no,
            clause,
            antecedents,
            annotation: pending_annotation.take(),
        });
    }

    // Resolve references in dependency order; the file may use any order.
    let mut builder = ProofBuilder::new();
    let mut materialized: Vec<Option<NodeId>> = vec![None; records.len()];
    let mut blocked: Vec<Vec<usize>> = vec![Vec::new(); records.len()]; // rec -> dependents
    let mut missing: Vec<usize> = Vec::new(); // count of unmaterialized antecedents
    let mut ready: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
    for (ri, rec) in records.iter().enumerate() {
        let mut count = 0;
        for ant in &rec.antecedents {
            match by_id.get(ant) {
                None => {
                    return Err(ImportError::UnknownAntecedent { line: rec.line, id: *ant })
                }
                Some(&dep) => {
                    if materialized[dep].is_none() {
                        count += 1;
                        blocked[dep].push(ri);
                    }
                }
            }
        }
        missing.push(count);
        if count == 0 {
            ready.push_back(ri);
        }
    }
    // FIFO keeps node numbering aligned with line order whenever the file is
    // already dependency-ordered, so import(write(p)) reproduces p exactly.
    let mut processed = 0;
    while let Some(ri) = ready.pop_front() {
        processed += 1;
        let rec = &records[ri];
        let id = if rec.antecedents.is_empty() {
            materialize_leaf(&mut builder, rec, cnf)?
        } else {
            let ids: Vec<NodeId> = rec
                .antecedents
                .iter()
                .map(|ant| materialized[by_id[ant]].expect("dependency materialized"))
                .collect();
            let folded = builder
                .add_chain(&ids)
                .map_err(|source| ImportError::Chain { line: rec.line, source })?;
            if builder.clause(folded) != &rec.clause {
                return Err(ImportError::ChainMismatch {
                    line: rec.line,
                    derived: builder.clause(folded).clone(),
                    declared: rec.clause.clone(),
                });
            }
            folded
        };
        materialized[ri] = Some(id);
        for &dep in &blocked[ri] {
            missing[dep] -= 1;
            if missing[dep] == 0 {
                ready.push_back(dep);
            }
        }
    }
    if processed != records.len() {
        // Antecedents all exist but some never became ready: a cycle.
        return Err(ValidationError::Cycle.into());
    }

    // Root: the first empty-clause line in file order.
    let root = records
        .iter()
        .enumerate()
        .find(|(_, r)| r.clause.is_empty())
        .map(|(ri, _)| materialized[ri].unwrap())
        .ok_or(ValidationError::RootNotEmpty)?;
    let proof = builder.finish(root);
    proof.validate(cnf)?;
    Ok(proof)
}

fn materialize_leaf(
    builder: &mut ProofBuilder,
    rec: &Record,
    cnf: &PartitionedCnf,
) -> Result<NodeId, ImportError> {
    let partition = match rec.annotation {
        Some(k) => {
            if !cnf.partition(k).contains(&rec.clause) {
                return Err(ImportError::AnnotationMismatch { line: rec.line, partition: k });
            }
            k
        }
        None => {
            let candidates = cnf.partitions_of(&rec.clause);
            match candidates.len() {
                0 => return Err(ImportError::UnknownLeaf { line: rec.line }),
                1 => candidates[0],
                _ => {
                    return Err(ImportError::AmbiguousLeafPartition {
                        line: rec.line,
                        candidates,
                    })
                }
            }
        }
    };
    Ok(builder.add_leaf(rec.clause.clone(), partition))
}

/// Serializes a proof in TraceCheck format. Ids are 1-based node indices;
/// inner nodes list the positive antecedent first.
pub fn write_tracecheck(proof: &ResolutionProof) -> String {
    let mut out = String::new();
    for id in proof.topo() {
        let node = proof.node(id);
        out.push_str(&(id.index() + 1).to_string());
        for l in node.clause.lits() {
            out.push_str(&format!(" {l}"));
        }
        out.push_str(" 0");
        match node.origin {
            Origin::Leaf { .. } => {}
            Origin::Inner { pos, neg, .. } => {
                out.push_str(&format!(" {} {}", pos.index() + 1, neg.index() + 1));
            }
        }
        out.push_str(" 0\n");
    }
    out
}

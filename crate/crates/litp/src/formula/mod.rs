//! Propositional core: variables, literals, clauses, and partitioned CNF.
//!
//! Everything downstream (the solver, proofs, interpolation) works over these
//! types, so they are kept canonical: clause literals are sorted by variable,
//! duplicate literals are dropped, and a clause never holds both polarities
//! of one variable.

use std::fmt;

use thiserror::Error;

pub mod dimacs;
pub mod expr;
pub mod sexpr;
pub mod tseitin;

pub use dimacs::{parse_dimacs, write_dimacs, DimacsError};
pub use expr::{BoolExpr, EvalError, ExprKind};
pub use sexpr::{parse_sexpr, to_sexpr, SexprError};
pub use tseitin::tseitin_encode;

/// 1-based partition index, as written in `c part <k>` lines.
pub type PartIdx = usize;

/// A propositional variable. Indices are 1-based, matching DIMACS.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var(u32);

impl Var {
    /// Panics on index 0; variable 0 is reserved as the DIMACS terminator.
    pub fn new(index: u32) -> Self {
        assert!(index >= 1, "variable indices are 1-based");
        Var(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A literal: a variable together with a polarity.
///
/// The derived order sorts by variable first, so canonical clauses come out
/// sorted by variable index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Lit {
    var: Var,
    positive: bool,
}

impl Lit {
    pub fn new(var: Var, positive: bool) -> Self {
        Lit { var, positive }
    }

    pub fn pos(var: Var) -> Self {
        Lit { var, positive: true }
    }

    pub fn neg(var: Var) -> Self {
        Lit { var, positive: false }
    }

    pub fn var(self) -> Var {
        self.var
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }

    pub fn negated(self) -> Self {
        Lit { var: self.var, positive: !self.positive }
    }

    /// DIMACS encoding: positive literals are the variable index, negative
    /// ones its negation. 0 is not a literal.
    pub fn from_dimacs(code: i32) -> Option<Self> {
        if code == 0 {
            return None;
        }
        Some(Lit { var: Var::new(code.unsigned_abs()), positive: code > 0 })
    }

    pub fn to_dimacs(self) -> i32 {
        let v = self.var.index() as i32;
        if self.positive {
            v
        } else {
            -v
        }
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Error for a clause that contains some variable in both polarities.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("clause contains variable {var} in both polarities")]
pub struct TautologyError {
    pub var: Var,
}

/// A disjunction of literals over distinct variables.
///
/// Canonical form: sorted by variable index, no duplicates, tautology-free.
/// The empty clause is falsum.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    /// Canonicalizes the literal list. Duplicate literals collapse; a
    /// variable occurring in both polarities is rejected.
    pub fn new(mut lits: Vec<Lit>) -> Result<Self, TautologyError> {
        lits.sort();
        lits.dedup();
        for w in lits.windows(2) {
            if w[0].var() == w[1].var() {
                return Err(TautologyError { var: w[0].var() });
            }
        }
        Ok(Clause { lits })
    }

    /// Convenience constructor from DIMACS codes; panics on 0 or a tautology.
    /// Intended for tests and fixtures where the input is known-good.
    pub fn from_dimacs(codes: &[i32]) -> Self {
        let lits = codes
            .iter()
            .map(|&c| Lit::from_dimacs(c).expect("0 is not a literal"))
            .collect();
        Clause::new(lits).expect("tautological clause")
    }

    pub fn empty() -> Self {
        Clause { lits: Vec::new() }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.lits.binary_search(&lit).is_ok()
    }

    /// Polarity of `var` in this clause, if it occurs.
    pub fn polarity_of(&self, var: Var) -> Option<bool> {
        self.lits
            .binary_search_by_key(&var, |l| l.var())
            .ok()
            .map(|i| self.lits[i].is_positive())
    }

    pub fn max_var(&self) -> Option<Var> {
        self.lits.last().map(|l| l.var())
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "{}0", if self.lits.is_empty() { "" } else { " " })
    }
}

/// Error for a variable index outside `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("variable {var} out of range (declared maximum {max})")]
pub struct RangeError {
    pub var: u32,
    pub max: u32,
}

/// A CNF formula split into ordered partitions `phi_1, ..., phi_n`.
///
/// Partition indices are 1-based throughout. A partition may be empty, in
/// which case it stands for top; there is always at least one partition.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PartitionedCnf {
    num_vars: u32,
    partitions: Vec<Vec<Clause>>,
}

impl PartitionedCnf {
    pub fn new(num_vars: u32, partitions: Vec<Vec<Clause>>) -> Result<Self, RangeError> {
        let partitions = if partitions.is_empty() { vec![Vec::new()] } else { partitions };
        for clause in partitions.iter().flatten() {
            if let Some(v) = clause.max_var() {
                if v.index() > num_vars {
                    return Err(RangeError { var: v.index(), max: num_vars });
                }
            }
        }
        Ok(PartitionedCnf { num_vars, partitions })
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn num_partitions(&self) -> usize {
        self.partitions.len()
    }

    pub fn clause_count(&self) -> usize {
        self.partitions.iter().map(Vec::len).sum()
    }

    /// Clauses of partition `k` (1-based). Panics if out of range.
    pub fn partition(&self, k: PartIdx) -> &[Clause] {
        &self.partitions[k - 1]
    }

    /// All clauses with their 1-based partition index, in file order.
    pub fn clauses(&self) -> impl Iterator<Item = (PartIdx, &Clause)> {
        self.partitions
            .iter()
            .enumerate()
            .flat_map(|(i, cs)| cs.iter().map(move |c| (i + 1, c)))
    }

    /// Partition indices (1-based) in which this exact clause occurs.
    pub fn partitions_of(&self, clause: &Clause) -> Vec<PartIdx> {
        self.partitions
            .iter()
            .enumerate()
            .filter(|(_, cs)| cs.contains(clause))
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Merges partitions into groups, producing a coarser split over the same
    /// clauses. `groups` lists 1-based indices; every partition must appear
    /// in exactly one group, and group order defines the new partition order.
    /// Also returns the old-index to new-index map (1-based on both sides).
    pub fn merge_partitions(&self, groups: &[Vec<PartIdx>]) -> (PartitionedCnf, Vec<PartIdx>) {
        let mut seen = vec![false; self.partitions.len()];
        let mut remap = vec![0; self.partitions.len() + 1];
        let mut merged = Vec::with_capacity(groups.len());
        for (gi, group) in groups.iter().enumerate() {
            let mut clauses = Vec::new();
            for &k in group {
                assert!(k >= 1 && k <= self.partitions.len(), "group index out of range");
                assert!(!seen[k - 1], "partition {k} listed twice");
                seen[k - 1] = true;
                clauses.extend(self.partitions[k - 1].iter().cloned());
                remap[k] = gi + 1;
            }
            merged.push(clauses);
        }
        assert!(seen.iter().all(|&s| s), "every partition must be grouped");
        let cnf = PartitionedCnf { num_vars: self.num_vars, partitions: merged };
        (cnf, remap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clause_canonicalization_sorts_and_dedups() {
        let c = Clause::from_dimacs(&[3, -1, 3]);
        assert_eq!(c.lits(), &[Lit::from_dimacs(-1).unwrap(), Lit::from_dimacs(3).unwrap()]);
    }

    #[test]
    fn clause_rejects_tautology() {
        let lits = vec![Lit::from_dimacs(2).unwrap(), Lit::from_dimacs(-2).unwrap()];
        let err = Clause::new(lits).unwrap_err();
        assert_eq!(err.var, Var::new(2));
    }

    #[test]
    fn polarity_lookup() {
        let c = Clause::from_dimacs(&[1, -2]);
        assert_eq!(c.polarity_of(Var::new(1)), Some(true));
        assert_eq!(c.polarity_of(Var::new(2)), Some(false));
        assert_eq!(c.polarity_of(Var::new(3)), None);
    }

    #[test]
    fn cnf_rejects_out_of_range_vars() {
        let err = PartitionedCnf::new(1, vec![vec![Clause::from_dimacs(&[2])]]).unwrap_err();
        assert_eq!(err.var, 2);
    }

    #[test]
    fn merge_remaps_indices() {
        let cnf = PartitionedCnf::new(
            3,
            vec![
                vec![Clause::from_dimacs(&[1])],
                vec![Clause::from_dimacs(&[2])],
                vec![Clause::from_dimacs(&[3])],
            ],
        )
        .unwrap();
        let (merged, remap) = cnf.merge_partitions(&[vec![1, 2], vec![3]]);
        assert_eq!(merged.num_partitions(), 2);
        assert_eq!(merged.partition(1).len(), 2);
        assert_eq!(remap[1], 1);
        assert_eq!(remap[2], 1);
        assert_eq!(remap[3], 2);
    }
}

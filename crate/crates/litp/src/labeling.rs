//! Occurrence labelings that drive proof interpolation.
//!
//! A labeling assigns `a`, `b`, or `ab` to occurrences of variables in proof
//! leaves, subject to locality: a variable local to the A side of the
//! partition split is always `a`, one local to the B side always `b`. Only
//! shared variables leave a choice, and that choice is what distinguishes the
//! systems here. Labels at inner proof nodes are joins of the leaf labels
//! below and never stored in the system itself.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::formula::{PartIdx, PartitionedCnf, Var};
use crate::proof::NodeId;

/// Occurrence label. The derived order is the strength order `b < ab < a`:
/// pointwise-smaller labelings produce logically stronger interpolants.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Label {
    B,
    AB,
    A,
}

impl Label {
    /// Least upper bound: equal labels stay, differing ones meet at `ab`.
    pub fn join(self, other: Label) -> Label {
        if self == other {
            self
        } else {
            Label::AB
        }
    }

    pub fn parse(s: &str) -> Option<Label> {
        match s {
            "a" => Some(Label::A),
            "b" => Some(Label::B),
            "ab" => Some(Label::AB),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::A => "a",
            Label::B => "b",
            Label::AB => "ab",
        })
    }
}

/// Where a variable occurs relative to an (A, B) split.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VarClass {
    ALocal,
    BLocal,
    Shared,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("partition {partition} out of range (the formula has {count})")]
pub struct BadPartition {
    pub partition: PartIdx,
    pub count: usize,
}

/// An (A, B) split of the partitions: the set on the A side. Degenerate
/// splits (empty or everything) are allowed; the missing side is then top.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Configuration {
    a_parts: BTreeSet<PartIdx>,
    num_partitions: usize,
}

impl Configuration {
    pub fn new(
        a_parts: impl IntoIterator<Item = PartIdx>,
        num_partitions: usize,
    ) -> Result<Self, BadPartition> {
        let a_parts: BTreeSet<PartIdx> = a_parts.into_iter().collect();
        for &k in &a_parts {
            if k < 1 || k > num_partitions {
                return Err(BadPartition { partition: k, count: num_partitions });
            }
        }
        Ok(Configuration { a_parts, num_partitions })
    }

    /// The split `A = {1..=i}` of `n` partitions.
    pub fn prefix(i: usize, n: usize) -> Self {
        Configuration::new(1..=i, n).expect("prefix within range")
    }

    /// Swaps the sides.
    pub fn complement(&self) -> Self {
        let a_parts = (1..=self.num_partitions).filter(|k| !self.a_parts.contains(k)).collect();
        Configuration { a_parts, num_partitions: self.num_partitions }
    }

    pub fn is_a(&self, k: PartIdx) -> bool {
        self.a_parts.contains(&k)
    }

    pub fn a_parts(&self) -> &BTreeSet<PartIdx> {
        &self.a_parts
    }

    pub fn num_partitions(&self) -> usize {
        self.num_partitions
    }

    /// Parses `1,3` or `A=1,3`; an empty list (or bare `A=`) is the empty
    /// A side.
    pub fn parse_spec(s: &str, num_partitions: usize) -> Result<Self, BadPartition> {
        let body = s.strip_prefix("A=").unwrap_or(s);
        let mut parts = Vec::new();
        for piece in body.split(',') {
            let piece = piece.trim();
            if piece.is_empty() {
                continue;
            }
            let k: PartIdx =
                piece.parse().map_err(|_| BadPartition { partition: 0, count: num_partitions })?;
            parts.push(k);
        }
        Configuration::new(parts, num_partitions)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, k) in self.a_parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        f.write_str("}")
    }
}

/// Occurrence classes of every variable under one split, precomputed from
/// the formula.
pub struct ClassMap {
    classes: Vec<Option<VarClass>>,
}

impl ClassMap {
    pub fn new(cnf: &PartitionedCnf, config: &Configuration) -> Self {
        let n = cnf.num_vars() as usize;
        let mut in_a = vec![false; n + 1];
        let mut in_b = vec![false; n + 1];
        for (k, c) in cnf.clauses() {
            let side = if config.is_a(k) { &mut in_a } else { &mut in_b };
            for l in c.lits() {
                side[l.var().index() as usize] = true;
            }
        }
        let classes = (0..=n)
            .map(|v| match (in_a[v], in_b[v]) {
                (true, true) => Some(VarClass::Shared),
                (true, false) => Some(VarClass::ALocal),
                (false, true) => Some(VarClass::BLocal),
                (false, false) => None,
            })
            .collect();
        ClassMap { classes }
    }

    /// `None` when the variable occurs nowhere in the formula.
    pub fn class(&self, v: Var) -> Option<VarClass> {
        self.classes.get(v.index() as usize).copied().flatten()
    }

    pub fn shared_vars(&self) -> Vec<Var> {
        self.classes
            .iter()
            .enumerate()
            .filter(|(_, c)| matches!(c, Some(VarClass::Shared)))
            .map(|(i, _)| Var::new(i as u32))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelError {
    #[error("labeling gives no label for shared variable {var}")]
    Unspecified { var: Var },
    #[error("labeling gives no label for variable {var} at proof node {node}")]
    UnspecifiedAt { node: NodeId, var: Var },
}

/// How shared variables are labeled. Local variables never consult this.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LabelingSystem {
    /// Every shared occurrence is `b`.
    McMillan,
    /// Every shared occurrence is `ab`.
    Pudlak,
    /// Every shared occurrence is `a`.
    McMillanPrime,
    /// One label per shared variable, applied at every occurrence.
    PerVariable(BTreeMap<Var, Label>),
    /// One label per leaf occurrence, keyed by proof node and variable.
    PerOccurrence(BTreeMap<(NodeId, Var), Label>),
}

impl LabelingSystem {
    /// Label of `var` at leaf `node` given its occurrence class.
    pub fn leaf_label(&self, node: NodeId, var: Var, class: VarClass) -> Result<Label, LabelError> {
        match class {
            VarClass::ALocal => Ok(Label::A),
            VarClass::BLocal => Ok(Label::B),
            VarClass::Shared => match self {
                LabelingSystem::McMillan => Ok(Label::B),
                LabelingSystem::Pudlak => Ok(Label::AB),
                LabelingSystem::McMillanPrime => Ok(Label::A),
                LabelingSystem::PerVariable(m) => {
                    m.get(&var).copied().ok_or(LabelError::Unspecified { var })
                }
                LabelingSystem::PerOccurrence(m) => {
                    m.get(&(node, var)).copied().ok_or(LabelError::UnspecifiedAt { node, var })
                }
            },
        }
    }

    /// Accepted forms: `M`, `P`, `M'`, `var:1=a,2=ab`, `occ:3.1=a` (1-based
    /// proof node, then variable).
    pub fn parse(s: &str) -> Result<Self, ParseLabelingError> {
        let bad = || ParseLabelingError { input: s.to_string() };
        match s {
            "M" => return Ok(LabelingSystem::McMillan),
            "P" => return Ok(LabelingSystem::Pudlak),
            "M'" => return Ok(LabelingSystem::McMillanPrime),
            _ => {}
        }
        if let Some(body) = s.strip_prefix("var:") {
            let mut m = BTreeMap::new();
            for piece in body.split(',') {
                let (v, l) = piece.split_once('=').ok_or_else(bad)?;
                let v: u32 = v.trim().parse().map_err(|_| bad())?;
                if v == 0 {
                    return Err(bad());
                }
                let l = Label::parse(l.trim()).ok_or_else(bad)?;
                m.insert(Var::new(v), l);
            }
            return Ok(LabelingSystem::PerVariable(m));
        }
        if let Some(body) = s.strip_prefix("occ:") {
            let mut m = BTreeMap::new();
            for piece in body.split(',') {
                let (key, l) = piece.split_once('=').ok_or_else(bad)?;
                let (node, v) = key.split_once('.').ok_or_else(bad)?;
                let node: usize = node.trim().parse().map_err(|_| bad())?;
                let v: u32 = v.trim().parse().map_err(|_| bad())?;
                if node == 0 || v == 0 {
                    return Err(bad());
                }
                let l = Label::parse(l.trim()).ok_or_else(bad)?;
                m.insert((NodeId::new(node - 1), Var::new(v)), l);
            }
            return Ok(LabelingSystem::PerOccurrence(m));
        }
        Err(bad())
    }
}

impl fmt::Display for LabelingSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelingSystem::McMillan => f.write_str("M"),
            LabelingSystem::Pudlak => f.write_str("P"),
            LabelingSystem::McMillanPrime => f.write_str("M'"),
            LabelingSystem::PerVariable(m) => {
                f.write_str("var:")?;
                for (i, (v, l)) in m.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}={l}")?;
                }
                Ok(())
            }
            LabelingSystem::PerOccurrence(m) => {
                f.write_str("occ:")?;
                for (i, ((n, v), l)) in m.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}.{v}={l}", n.index() + 1)?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse labeling `{input}`; expected M, P, M', var:..., or occ:...")]
pub struct ParseLabelingError {
    pub input: String,
}

/// Parses a comma-separated list of labelings, e.g. `M',var:1=a,2=b,P`.
/// Commas inside a `var:` or `occ:` labeling are told apart from family
/// separators by shape: a piece that is just a binding continues the
/// labeling before it.
pub fn parse_family(input: &str) -> Result<Vec<LabelingSystem>, ParseLabelingError> {
    let mut specs: Vec<String> = Vec::new();
    for raw in input.split(',') {
        let piece = raw.trim();
        let continues = piece.contains('=')
            && piece.starts_with(|c: char| c.is_ascii_digit())
            && matches!(specs.last(), Some(prev)
                if prev.starts_with("var:") || prev.starts_with("occ:"));
        match specs.last_mut() {
            Some(prev) if continues => {
                prev.push(',');
                prev.push_str(piece);
            }
            _ => specs.push(piece.to_string()),
        }
    }
    specs.iter().map(|s| LabelingSystem::parse(s)).collect()
}

/// Pointwise comparison of two labelings in the strength order.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LabelingCmp {
    Equal,
    /// Left is pointwise smaller: its interpolants are stronger.
    Leq,
    Geq,
    Incomparable,
}

/// Compares two labelings over the shared variables of one split. Uniform and
/// per-variable systems compare variable by variable; a per-occurrence system
/// compares over its own key set, and two per-occurrence systems must agree
/// on key sets to be comparable at all.
pub fn compare_labelings(
    lhs: &LabelingSystem,
    rhs: &LabelingSystem,
    shared: &[Var],
) -> Result<LabelingCmp, LabelError> {
    use LabelingSystem::PerOccurrence;
    let keys: Vec<(NodeId, Var)> = match (lhs, rhs) {
        (PerOccurrence(a), PerOccurrence(b)) => {
            if a.keys().ne(b.keys()) {
                return Ok(LabelingCmp::Incomparable);
            }
            a.keys().copied().collect()
        }
        (PerOccurrence(a), _) => a.keys().copied().collect(),
        (_, PerOccurrence(b)) => b.keys().copied().collect(),
        // Dummy node: neither side is per-occurrence, so it is never read.
        _ => shared.iter().map(|&v| (NodeId::new(0), v)).collect(),
    };
    let (mut any_lt, mut any_gt) = (false, false);
    for (node, var) in keys {
        let a = lhs.leaf_label(node, var, VarClass::Shared)?;
        let b = rhs.leaf_label(node, var, VarClass::Shared)?;
        match a.cmp(&b) {
            std::cmp::Ordering::Less => any_lt = true,
            std::cmp::Ordering::Greater => any_gt = true,
            std::cmp::Ordering::Equal => {}
        }
    }
    Ok(match (any_lt, any_gt) {
        (false, false) => LabelingCmp::Equal,
        (true, false) => LabelingCmp::Leq,
        (false, true) => LabelingCmp::Geq,
        (true, true) => LabelingCmp::Incomparable,
    })
}

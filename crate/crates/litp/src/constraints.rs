//! Static analysis of labeling families.
//!
//! Whether a collective property holds for *every* refutation of a formula
//! can be read off the labels alone: each rule here constrains the label
//! vector a shared variable receives across the family. A family that
//! passes is guaranteed to satisfy the property no matter which proof the
//! solver finds; a violation names a variable whose labels permit a
//! counterexample.
//!
//! Everything in this module works on occurrence sets, never on proofs, so
//! per-occurrence labelings are out of scope and rejected up front.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::collectives::{CollectiveKind, Tree};
use crate::formula::{PartIdx, PartitionedCnf, Var};
use crate::labeling::{Label, LabelingSystem};

/// One broken rule: the variable, where it occurs, the label vector the
/// family assigns it, and the rule it breaks.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub var: Var,
    pub parts: Vec<PartIdx>,
    pub vector: Vec<Label>,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts =
            self.parts.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",");
        let vector =
            self.vector.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "VAR {} PARTS {{{parts}}} VECTOR ({vector}) RULE {}", self.var, self.rule)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Prediction {
    WillHold,
    WillFail(Vec<Violation>),
}

impl Prediction {
    pub fn holds(&self) -> bool {
        matches!(self, Prediction::WillHold)
    }

    pub fn render(&self) -> String {
        match self {
            Prediction::WillHold => "WILLHOLD\n".to_string(),
            Prediction::WillFail(vs) => {
                let mut out = String::new();
                for v in vs {
                    out.push_str(&format!("{v}\n"));
                }
                out.push_str("WILLFAIL\n");
                out
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PredictError {
    #[error("per-occurrence labelings have no single label per variable")]
    PerOccurrence,
    #[error("no label for shared variable {var}")]
    Unlabeled { var: Var },
    #[error("{kind} over {partitions} partitions needs {expected} labelings, got {got}")]
    Arity { kind: CollectiveKind, partitions: usize, expected: String, got: usize },
    #[error("{kind} needs {expected} partitions, got {got}")]
    Partitions { kind: CollectiveKind, expected: String, got: usize },
    #[error("tree has {nodes} nodes but the formula has {partitions} partitions")]
    TreeShape { nodes: usize, partitions: usize },
    #[error("predicting a tree collective needs a tree")]
    MissingTree,
}

/// Partitions each variable occurs in, indexed by the variable's number;
/// slot 0 is unused.
pub fn occurrence_table(cnf: &PartitionedCnf) -> Vec<BTreeSet<PartIdx>> {
    let mut occ = vec![BTreeSet::new(); cnf.num_vars() as usize + 1];
    for (part, clause) in cnf.clauses() {
        for lit in clause.lits() {
            occ[lit.var().index() as usize].insert(part);
        }
    }
    occ
}

fn var_label(sys: &LabelingSystem, v: Var) -> Result<Label, PredictError> {
    match sys {
        LabelingSystem::McMillan => Ok(Label::B),
        LabelingSystem::Pudlak => Ok(Label::AB),
        LabelingSystem::McMillanPrime => Ok(Label::A),
        LabelingSystem::PerVariable(m) => {
            m.get(&v).copied().ok_or(PredictError::Unlabeled { var: v })
        }
        LabelingSystem::PerOccurrence(_) => Err(PredictError::PerOccurrence),
    }
}

fn straddles(p: &BTreeSet<PartIdx>, group: &BTreeSet<PartIdx>) -> bool {
    p.iter().any(|k| group.contains(k)) && p.iter().any(|k| !group.contains(k))
}

/// Allowed antecedent pairs: at most one side may exceed `ab`, and if one
/// side is `a` the other must be `b`.
fn pair_allowed(x: Label, y: Label) -> bool {
    x == Label::B || y == Label::B || (x <= Label::AB && y <= Label::AB)
}

/// The two rules shared by the general abstraction collectives. `V` holds
/// the labels of the antecedent interpolants this variable is shared in,
/// `c` the label in the consequent, if any. Rule one-a: an `a` component
/// forces every other component to `b`. Rule join: every component stays
/// below the consequent label.
fn cc_star(
    occ: &[BTreeSet<PartIdx>],
    antecedents: &[(BTreeSet<PartIdx>, &LabelingSystem)],
    consequent: Option<(BTreeSet<PartIdx>, &LabelingSystem)>,
    prefix: &str,
    out: &mut Vec<Violation>,
) -> Result<(), PredictError> {
    for raw in 1..occ.len() {
        let p = &occ[raw];
        if p.is_empty() {
            continue;
        }
        let v = Var::new(raw as u32);
        let mut vector = Vec::new();
        for (group, sys) in antecedents {
            if straddles(p, group) {
                vector.push(var_label(sys, v)?);
            }
        }
        let c = match &consequent {
            Some((group, sys)) if straddles(p, group) => Some(var_label(sys, v)?),
            _ => None,
        };
        let parts = || p.iter().copied().collect::<Vec<_>>();
        let a_count = vector.iter().filter(|&&l| l == Label::A).count();
        if a_count >= 2 || (a_count == 1 && vector.contains(&Label::AB)) {
            out.push(Violation {
                var: v,
                parts: parts(),
                vector: vector.clone(),
                rule: format!("{prefix}one-a"),
            });
        }
        if let Some(c) = c {
            if vector.iter().any(|&l| l > c) {
                let mut shown = vector.clone();
                shown.push(c);
                out.push(Violation {
                    var: v,
                    parts: parts(),
                    vector: shown,
                    rule: format!("{prefix}join"),
                });
            }
        }
    }
    Ok(())
}

/// The binary case has an exact rule table, one row per way a variable can
/// be spread over the three groups.
fn cc_pair_rows(
    occ: &[BTreeSet<PartIdx>],
    groups: [&BTreeSet<PartIdx>; 3],
    systems: [&LabelingSystem; 3],
    prefix: &str,
    out: &mut Vec<Violation>,
) -> Result<(), PredictError> {
    for raw in 1..occ.len() {
        let p = &occ[raw];
        if p.is_empty() {
            continue;
        }
        let v = Var::new(raw as u32);
        let in1 = p.iter().any(|k| groups[0].contains(k));
        let in2 = p.iter().any(|k| groups[1].contains(k));
        let in3 = p.iter().any(|k| groups[2].contains(k));
        let parts = || p.iter().copied().collect::<Vec<_>>();
        let mut flag = |vector: Vec<Label>, rule: String| {
            out.push(Violation { var: v, parts: parts(), vector, rule });
        };
        match (in1, in2, in3) {
            (true, true, false) => {
                let (s1, s2) = (var_label(systems[0], v)?, var_label(systems[1], v)?);
                if !pair_allowed(s1, s2) {
                    flag(vec![s1, s2], format!("{prefix}alpha"));
                }
            }
            (false, true, true) => {
                let (s2, s3) = (var_label(systems[1], v)?, var_label(systems[2], v)?);
                if s2 > s3 {
                    flag(vec![s2, s3], format!("{prefix}beta"));
                }
            }
            (true, false, true) => {
                let (s1, s3) = (var_label(systems[0], v)?, var_label(systems[2], v)?);
                if s1 > s3 {
                    flag(vec![s1, s3], format!("{prefix}gamma"));
                }
            }
            (true, true, true) => {
                let s1 = var_label(systems[0], v)?;
                let s2 = var_label(systems[1], v)?;
                let s3 = var_label(systems[2], v)?;
                if !pair_allowed(s1, s2) {
                    flag(vec![s1, s2, s3], format!("{prefix}delta"));
                }
                if s1 > s3 || s2 > s3 {
                    flag(vec![s1, s2, s3], format!("{prefix}delta-join"));
                }
            }
            _ => {}
        }
    }
    Ok(())
}

fn singleton(k: PartIdx) -> BTreeSet<PartIdx> {
    BTreeSet::from([k])
}

fn range_set(lo: PartIdx, hi: PartIdx) -> BTreeSet<PartIdx> {
    (lo..=hi).collect()
}

/// Labels under which binary generalized simultaneous abstraction holds for
/// every refutation. Three partitions, three labelings.
pub fn cc_bgsa(
    cnf: &PartitionedCnf,
    family: &[LabelingSystem],
) -> Result<Vec<Violation>, PredictError> {
    let parts = cnf.num_partitions();
    if parts != 3 {
        return Err(PredictError::Partitions {
            kind: CollectiveKind::Bgsa,
            expected: "exactly 3".to_string(),
            got: parts,
        });
    }
    if family.len() != 3 {
        return Err(arity(CollectiveKind::Bgsa, parts, "3", family.len()));
    }
    let occ = occurrence_table(cnf);
    let (g1, g2, g3) = (singleton(1), singleton(2), singleton(3));
    let mut out = Vec::new();
    cc_pair_rows(
        &occ,
        [&g1, &g2, &g3],
        [&family[0], &family[1], &family[2]],
        "",
        &mut out,
    )?;
    Ok(out)
}

/// Labels under which n-ary generalized simultaneous abstraction holds for
/// every refutation. The formula has `n + 1` partitions and the family
/// `n + 1` labelings, the last one for the consequent.
pub fn cc_gsa(
    cnf: &PartitionedCnf,
    family: &[LabelingSystem],
) -> Result<Vec<Violation>, PredictError> {
    let parts = cnf.num_partitions();
    if parts < 2 {
        return Err(PredictError::Partitions {
            kind: CollectiveKind::Gsa,
            expected: "at least 2".to_string(),
            got: parts,
        });
    }
    let n = parts - 1;
    if family.len() != n + 1 {
        return Err(arity(CollectiveKind::Gsa, parts, (n + 1).to_string(), family.len()));
    }
    let occ = occurrence_table(cnf);
    let antecedents: Vec<_> =
        (1..=n).map(|i| (singleton(i), &family[i - 1])).collect();
    let consequent = Some((range_set(1, n), &family[n]));
    let mut out = Vec::new();
    cc_star(&occ, &antecedents, consequent, "", &mut out)?;
    Ok(out)
}

/// Labels under which simultaneous abstraction holds for every refutation.
/// Accepts `n` labelings or `n + 1` with the extra one ignored.
pub fn cc_sa(
    cnf: &PartitionedCnf,
    family: &[LabelingSystem],
) -> Result<Vec<Violation>, PredictError> {
    let n = cnf.num_partitions();
    if family.len() != n && family.len() != n + 1 {
        return Err(arity(CollectiveKind::Sa, n, format!("{n} or {}", n + 1), family.len()));
    }
    let occ = occurrence_table(cnf);
    let antecedents: Vec<_> =
        (1..=n).map(|i| (singleton(i), &family[i - 1])).collect();
    let mut out = Vec::new();
    cc_star(&occ, &antecedents, None, "", &mut out)?;
    Ok(out)
}

/// Labels under which path interpolation holds for every refutation: when a
/// variable is shared on both sides of a step, its label must not get
/// stronger across the step. The first and last steps constrain nothing.
pub fn pi_steps(
    cnf: &PartitionedCnf,
    family: &[LabelingSystem],
) -> Result<Vec<Violation>, PredictError> {
    let n = cnf.num_partitions();
    if family.len() != n + 1 {
        return Err(arity(CollectiveKind::Pi, n, (n + 1).to_string(), family.len()));
    }
    let occ = occurrence_table(cnf);
    let mut out = Vec::new();
    for i in 0..n {
        for raw in 1..occ.len() {
            let p = &occ[raw];
            let before = p.iter().any(|&k| k <= i);
            let after = p.iter().any(|&k| k >= i + 2);
            if !(before && after) {
                continue;
            }
            let v = Var::new(raw as u32);
            let here = var_label(&family[i], v)?;
            let next = var_label(&family[i + 1], v)?;
            if here > next {
                out.push(Violation {
                    var: v,
                    parts: p.iter().copied().collect(),
                    vector: vec![here, next],
                    rule: format!("step{i}"),
                });
            }
        }
    }
    Ok(out)
}

/// Labels under which state-transition interpolation holds for every
/// refutation. Each step is the binary rule table applied to the grouping
/// prefix / next partition / tail, with the labelings `S_i`, `T_{i+1}`,
/// `S_{i+1}`. Family layout as in the checker: `S_0..S_n, T_1..T_n`.
pub fn sti_steps(
    cnf: &PartitionedCnf,
    family: &[LabelingSystem],
) -> Result<Vec<Violation>, PredictError> {
    let n = cnf.num_partitions();
    if family.len() != 2 * n + 1 {
        return Err(arity(CollectiveKind::Sti, n, (2 * n + 1).to_string(), family.len()));
    }
    let occ = occurrence_table(cnf);
    let mut out = Vec::new();
    for i in 0..n {
        let g1 = range_set(1, i);
        let g2 = singleton(i + 1);
        let g3 = if i + 2 <= n { range_set(i + 2, n) } else { BTreeSet::new() };
        cc_pair_rows(
            &occ,
            [&g1, &g2, &g3],
            [&family[i], &family[n + 1 + i], &family[i + 1]],
            &format!("step{i}."),
            &mut out,
        )?;
    }
    Ok(out)
}

/// Labels under which tree interpolation holds for every refutation. Each
/// parent node is a reduced abstraction instance: the child subtrees are the
/// antecedent groups and the node's own subtree the consequent; the node's
/// raw formula needs no label since it entails its own interpolant.
pub fn ti_nodes(
    cnf: &PartitionedCnf,
    tree: &Tree,
    family: &[LabelingSystem],
) -> Result<Vec<Violation>, PredictError> {
    let m = cnf.num_partitions();
    if tree.num_nodes() != m {
        return Err(PredictError::TreeShape { nodes: tree.num_nodes(), partitions: m });
    }
    if family.len() != m {
        return Err(arity(CollectiveKind::Tree, m, m.to_string(), family.len()));
    }
    let occ = occurrence_table(cnf);
    let mut out = Vec::new();
    for i in 1..=m {
        let children = tree.children(i);
        if children.is_empty() {
            continue;
        }
        let antecedents: Vec<_> = children
            .iter()
            .map(|&c| (tree.descendants(c).into_iter().collect(), &family[c - 1]))
            .collect();
        let consequent =
            Some((tree.descendants(i).into_iter().collect(), &family[i - 1]));
        cc_star(&occ, &antecedents, consequent, &format!("node{i}."), &mut out)?;
    }
    Ok(out)
}

fn arity(
    kind: CollectiveKind,
    partitions: usize,
    expected: impl Into<String>,
    got: usize,
) -> PredictError {
    PredictError::Arity { kind, partitions, expected: expected.into(), got }
}

/// Predicts whether a collective property holds for every refutation of the
/// formula, from the labels alone.
pub fn predict(
    kind: CollectiveKind,
    cnf: &PartitionedCnf,
    family: &[LabelingSystem],
    tree: Option<&Tree>,
) -> Result<Prediction, PredictError> {
    let violations = match kind {
        CollectiveKind::Pi => pi_steps(cnf, family)?,
        CollectiveKind::Sa => cc_sa(cnf, family)?,
        CollectiveKind::Bgsa => cc_bgsa(cnf, family)?,
        CollectiveKind::Gsa => cc_gsa(cnf, family)?,
        CollectiveKind::Sti => sti_steps(cnf, family)?,
        CollectiveKind::Tree => {
            let tree = tree.ok_or(PredictError::MissingTree)?;
            ti_nodes(cnf, tree, family)?
        }
    };
    Ok(if violations.is_empty() {
        Prediction::WillHold
    } else {
        Prediction::WillFail(violations)
    })
}

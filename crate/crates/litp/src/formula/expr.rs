//! Hash-consed boolean expressions in negation normal form.
//!
//! Nodes live in a global interner: constructing the same shape twice yields
//! the same node, so equality is an id comparison and shared subterms are
//! stored once. Negation exists only at the literal level; `negate` rewrites
//! through conjunction and disjunction. Constructors fold constants eagerly
//! (x or top = top, single-child nodes collapse), so a conjunction or
//! disjunction node always has at least two children and never a constant
//! child. All traversals here are iterative; interpolants over long proofs
//! produce DAGs far deeper than any sane stack.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, LazyLock, Mutex};

use thiserror::Error;

use super::{Clause, Lit, PartIdx, PartitionedCnf, Var};

#[derive(Debug)]
pub enum ExprKind {
    True,
    False,
    Lit(Lit),
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
}

#[derive(Debug)]
pub struct ExprNode {
    id: u64,
    kind: ExprKind,
}

/// A reference-counted handle to an interned expression node.
#[derive(Clone, Debug)]
pub struct BoolExpr(Arc<ExprNode>);

impl PartialEq for BoolExpr {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}

impl Eq for BoolExpr {}

impl Hash for BoolExpr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.id.hash(state);
    }
}

#[derive(PartialEq, Eq, Hash)]
enum Key {
    True,
    False,
    Lit(Lit),
    And(Vec<u64>),
    Or(Vec<u64>),
}

struct Interner {
    map: HashMap<Key, BoolExpr>,
    next_id: u64,
}

impl Interner {
    fn intern(&mut self, key: Key, kind: impl FnOnce() -> ExprKind) -> BoolExpr {
        if let Some(e) = self.map.get(&key) {
            return e.clone();
        }
        let node = BoolExpr(Arc::new(ExprNode { id: self.next_id, kind: kind() }));
        self.next_id += 1;
        self.map.insert(key, node.clone());
        node
    }
}

static INTERNER: LazyLock<Mutex<Interner>> =
    LazyLock::new(|| Mutex::new(Interner { map: HashMap::new(), next_id: 0 }));

fn intern(key: Key, kind: impl FnOnce() -> ExprKind) -> BoolExpr {
    INTERNER.lock().expect("expression interner poisoned").intern(key, kind)
}

impl BoolExpr {
    pub fn top() -> BoolExpr {
        intern(Key::True, || ExprKind::True)
    }

    pub fn bot() -> BoolExpr {
        intern(Key::False, || ExprKind::False)
    }

    pub fn lit(l: Lit) -> BoolExpr {
        intern(Key::Lit(l), || ExprKind::Lit(l))
    }

    pub fn var(v: Var) -> BoolExpr {
        BoolExpr::lit(Lit::pos(v))
    }

    pub fn not_var(v: Var) -> BoolExpr {
        BoolExpr::lit(Lit::neg(v))
    }

    /// Conjunction with constant folding: false children make the whole
    /// expression false, true children drop out, a single survivor is
    /// returned as-is. Child order is preserved and not deduplicated.
    pub fn and(children: Vec<BoolExpr>) -> BoolExpr {
        let mut kept = Vec::with_capacity(children.len());
        for c in children {
            match c.kind() {
                ExprKind::False => return BoolExpr::bot(),
                ExprKind::True => {}
                _ => kept.push(c),
            }
        }
        match kept.len() {
            0 => BoolExpr::top(),
            1 => kept.pop().unwrap(),
            _ => {
                let ids = kept.iter().map(|c| c.id()).collect();
                intern(Key::And(ids), move || ExprKind::And(kept))
            }
        }
    }

    /// Disjunction, dual folding to [`BoolExpr::and`].
    pub fn or(children: Vec<BoolExpr>) -> BoolExpr {
        let mut kept = Vec::with_capacity(children.len());
        for c in children {
            match c.kind() {
                ExprKind::True => return BoolExpr::top(),
                ExprKind::False => {}
                _ => kept.push(c),
            }
        }
        match kept.len() {
            0 => BoolExpr::bot(),
            1 => kept.pop().unwrap(),
            _ => {
                let ids = kept.iter().map(|c| c.id()).collect();
                intern(Key::Or(ids), move || ExprKind::Or(kept))
            }
        }
    }

    pub fn and2(a: BoolExpr, b: BoolExpr) -> BoolExpr {
        BoolExpr::and(vec![a, b])
    }

    pub fn or2(a: BoolExpr, b: BoolExpr) -> BoolExpr {
        BoolExpr::or(vec![a, b])
    }

    /// Disjunction of a clause's literals; the empty clause is falsum.
    pub fn from_clause(c: &Clause) -> BoolExpr {
        BoolExpr::or(c.lits().iter().map(|&l| BoolExpr::lit(l)).collect())
    }

    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn kind(&self) -> &ExprKind {
        &self.0.kind
    }

    pub fn is_true(&self) -> bool {
        matches!(self.kind(), ExprKind::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self.kind(), ExprKind::False)
    }

    fn children(&self) -> &[BoolExpr] {
        match self.kind() {
            ExprKind::And(cs) | ExprKind::Or(cs) => cs,
            _ => &[],
        }
    }

    /// Negation, pushed to the literals. Sharing is preserved: each distinct
    /// subterm is negated once.
    pub fn negate(&self) -> BoolExpr {
        let mut memo: HashMap<u64, BoolExpr> = HashMap::new();
        // Post-order over the DAG with an explicit stack.
        let mut stack: Vec<(BoolExpr, bool)> = vec![(self.clone(), false)];
        while let Some((e, expanded)) = stack.pop() {
            if memo.contains_key(&e.id()) {
                continue;
            }
            if !expanded {
                stack.push((e.clone(), true));
                for c in e.children() {
                    stack.push((c.clone(), false));
                }
                continue;
            }
            let neg = match e.kind() {
                ExprKind::True => BoolExpr::bot(),
                ExprKind::False => BoolExpr::top(),
                ExprKind::Lit(l) => BoolExpr::lit(l.negated()),
                ExprKind::And(cs) => {
                    BoolExpr::or(cs.iter().map(|c| memo[&c.id()].clone()).collect())
                }
                ExprKind::Or(cs) => {
                    BoolExpr::and(cs.iter().map(|c| memo[&c.id()].clone()).collect())
                }
            };
            memo.insert(e.id(), neg);
        }
        memo.remove(&self.id()).unwrap()
    }

    /// The set of variables occurring in the expression.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        let mut seen = HashMap::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if seen.insert(e.id(), ()).is_some() {
                continue;
            }
            if let ExprKind::Lit(l) = e.kind() {
                out.insert(l.var());
            }
            for c in e.children() {
                stack.push(c.clone());
            }
        }
        out
    }

    /// Number of distinct nodes reachable from this expression.
    pub fn dag_size(&self) -> usize {
        let mut seen = HashMap::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if seen.insert(e.id(), ()).is_some() {
                continue;
            }
            for c in e.children() {
                stack.push(c.clone());
            }
        }
        seen.len()
    }

    /// Evaluates under a total assignment of the expression's variables.
    pub fn eval(&self, assignment: &BTreeMap<Var, bool>) -> Result<bool, EvalError> {
        let mut memo: HashMap<u64, bool> = HashMap::new();
        let mut stack: Vec<(BoolExpr, bool)> = vec![(self.clone(), false)];
        while let Some((e, expanded)) = stack.pop() {
            if memo.contains_key(&e.id()) {
                continue;
            }
            if !expanded {
                stack.push((e.clone(), true));
                for c in e.children() {
                    stack.push((c.clone(), false));
                }
                continue;
            }
            let value = match e.kind() {
                ExprKind::True => true,
                ExprKind::False => false,
                ExprKind::Lit(l) => {
                    let v = *assignment
                        .get(&l.var())
                        .ok_or(EvalError::UnassignedVar(l.var()))?;
                    v == l.is_positive()
                }
                ExprKind::And(cs) => cs.iter().all(|c| memo[&c.id()]),
                ExprKind::Or(cs) => cs.iter().any(|c| memo[&c.id()]),
            };
            memo.insert(e.id(), value);
        }
        Ok(memo[&self.id()])
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::sexpr::to_sexpr(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable {0} is unassigned")]
    UnassignedVar(Var),
}

impl PartitionedCnf {
    /// Partition `k` as a conjunction of clause disjunctions; empty is top.
    pub fn partition_expr(&self, k: PartIdx) -> BoolExpr {
        BoolExpr::and(self.partition(k).iter().map(BoolExpr::from_clause).collect())
    }

    /// Conjunction of a set of partitions (1-based indices), in index order.
    pub fn partitions_expr(&self, parts: impl IntoIterator<Item = PartIdx>) -> BoolExpr {
        let mut clauses = Vec::new();
        for k in parts {
            clauses.extend(self.partition(k).iter().map(BoolExpr::from_clause));
        }
        BoolExpr::and(clauses)
    }
}

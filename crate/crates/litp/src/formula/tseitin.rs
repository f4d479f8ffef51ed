//! Clausal encoding of expression DAGs.
//!
//! Each gate gets a definition variable constrained in both directions, so
//! the clause set is equisatisfiable with `expr <-> output literal` and
//! asserting the output literal yields a set satisfiable exactly when the
//! expression is. Shared subterms are encoded once, keeping the output
//! linear in the DAG size.

use std::collections::HashMap;

use super::expr::{BoolExpr, ExprKind};
use super::{Clause, Lit, Var};

/// Encodes `expr`, drawing definition variables from `fresh_base` upward.
/// Returns the definition clauses, the literal standing for the expression,
/// and the next unused variable index.
pub fn tseitin_encode(expr: &BoolExpr, fresh_base: u32) -> (Vec<Clause>, Lit, u32) {
    let mut clauses = Vec::new();
    let mut next = fresh_base;
    let mut defs: HashMap<u64, Lit> = HashMap::new();

    // Constants only ever appear as the whole expression; the constructors
    // fold them out of gate children.
    match expr.kind() {
        ExprKind::True => {
            let t = Lit::pos(Var::new(next));
            clauses.push(Clause::new(vec![t]).unwrap());
            return (clauses, t, next + 1);
        }
        ExprKind::False => {
            let f = Var::new(next);
            clauses.push(Clause::new(vec![Lit::neg(f)]).unwrap());
            return (clauses, Lit::pos(f), next + 1);
        }
        _ => {}
    }

    let mut stack: Vec<(BoolExpr, bool)> = vec![(expr.clone(), false)];
    while let Some((e, expanded)) = stack.pop() {
        if defs.contains_key(&e.id()) {
            continue;
        }
        match e.kind() {
            ExprKind::Lit(l) => {
                defs.insert(e.id(), *l);
            }
            ExprKind::And(cs) | ExprKind::Or(cs) => {
                if !expanded {
                    stack.push((e.clone(), true));
                    for c in cs {
                        stack.push((c.clone(), false));
                    }
                    continue;
                }
                let gate = Lit::pos(Var::new(next));
                next += 1;
                let child_lits: Vec<Lit> = cs.iter().map(|c| defs[&c.id()]).collect();
                let conj = matches!(e.kind(), ExprKind::And(_));
                // gate -> child_i (conjunction) / child_i -> gate (disjunction),
                // plus the long clause for the converse direction.
                let mut long = Vec::with_capacity(child_lits.len() + 1);
                for &cl in &child_lits {
                    let pair = if conj { vec![gate.negated(), cl] } else { vec![gate, cl.negated()] };
                    clauses.push(Clause::new(pair).expect("gate var is fresh"));
                    long.push(if conj { cl.negated() } else { cl });
                }
                long.push(if conj { gate } else { gate.negated() });
                // Children with complementary literals make the long clause a
                // tautology; the constraint it encodes is then vacuous.
                if let Ok(c) = Clause::new(long) {
                    clauses.push(c);
                }
                defs.insert(e.id(), gate);
            }
            ExprKind::True | ExprKind::False => unreachable!("constants are folded out of gates"),
        }
    }

    (clauses, defs[&expr.id()], next)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::super::PartitionedCnf;
    use super::*;

    fn v(i: u32) -> BoolExpr {
        BoolExpr::var(Var::new(i))
    }

    // Exhaustive satisfiability of a clause set under all assignments of
    // vars 1..=n; deliberately avoids the solver so it can serve as an
    // independent reference for the encoding.
    fn clauses_satisfiable_with(clauses: &[Clause], fixed: &[(Lit, bool)], n: u32) -> bool {
        'outer: for bits in 0..(1u64 << n) {
            let value = |l: Lit| -> bool {
                let v = (bits >> (l.var().index() - 1)) & 1 == 1;
                v == l.is_positive()
            };
            for &(l, want) in fixed {
                if value(l) != want {
                    continue 'outer;
                }
            }
            if clauses.iter().all(|c| c.lits().iter().any(|&l| value(l))) {
                return true;
            }
        }
        false
    }

    fn truth_table(e: &BoolExpr, vars: &[u32]) -> Vec<bool> {
        let mut out = Vec::new();
        for bits in 0..(1u64 << vars.len()) {
            let mut asg = BTreeMap::new();
            for (i, &vi) in vars.iter().enumerate() {
                asg.insert(Var::new(vi), (bits >> i) & 1 == 1);
            }
            out.push(e.eval(&asg).unwrap());
        }
        out
    }

    #[test]
    fn literal_passes_through() {
        let l = Lit::neg(Var::new(2));
        let (clauses, out, next) = tseitin_encode(&BoolExpr::lit(l), 4);
        assert!(clauses.is_empty());
        assert_eq!(out, l);
        assert_eq!(next, 4);
    }

    #[test]
    fn constants_allocate_one_var() {
        let (clauses, out, next) = tseitin_encode(&BoolExpr::top(), 5);
        assert_eq!(next, 6);
        assert_eq!(clauses.len(), 1);
        assert!(clauses_satisfiable_with(&clauses, &[(out, true)], 5));

        let (clauses, out, next) = tseitin_encode(&BoolExpr::bot(), 5);
        assert_eq!(next, 6);
        assert!(!clauses_satisfiable_with(&clauses, &[(out, true)], 5));
    }

    #[test]
    fn encoding_matches_truth_table() {
        // For every assignment of the original vars: the clause set with the
        // output asserted is satisfiable (over the fresh vars) iff the
        // expression evaluates true.
        let exprs = [
            BoolExpr::and2(BoolExpr::or2(v(1), BoolExpr::not_var(Var::new(2))), v(3)),
            BoolExpr::or(vec![v(1), BoolExpr::and2(v(2), v(3)), BoolExpr::not_var(Var::new(1))]),
            BoolExpr::or2(BoolExpr::and2(v(1), v(3)), BoolExpr::not_var(Var::new(2))),
        ];
        for e in exprs {
            let (clauses, out, next) = tseitin_encode(&e, 4);
            let table = truth_table(&e, &[1, 2, 3]);
            for bits in 0..8u64 {
                let mut fixed = vec![(out, true)];
                for i in 0..3u32 {
                    fixed.push((Lit::pos(Var::new(i + 1)), (bits >> i) & 1 == 1));
                }
                let sat = clauses_satisfiable_with(&clauses, &fixed, next - 1);
                assert_eq!(sat, table[bits as usize], "mismatch at assignment {bits:03b}");
            }
        }
    }

    #[test]
    fn shared_subterms_encoded_once() {
        let shared = BoolExpr::and2(v(1), v(2));
        let e = BoolExpr::or2(shared.clone(), BoolExpr::and2(shared, v(3)));
        let (clauses, _, next) = tseitin_encode(&e, 4);
        // Gates: shared, the outer and, the or. Three fresh vars.
        assert_eq!(next, 7);
        assert_eq!(clauses.len(), (2 + 1) + (2 + 1) + (2 + 1));
    }

    #[test]
    fn fresh_base_respects_cnf_width() {
        let cnf = PartitionedCnf::new(3, vec![vec![Clause::from_dimacs(&[1, -3])]]).unwrap();
        let e = BoolExpr::and2(v(1), v(3));
        let (clauses, _, next) = tseitin_encode(&e, cnf.num_vars() + 1);
        assert!(clauses.iter().all(|c| c.max_var().unwrap().index() <= next - 1));
        assert!(next > cnf.num_vars());
    }
}

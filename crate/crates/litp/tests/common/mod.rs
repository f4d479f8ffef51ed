//! Shared generators for the integration suites: seeded random formulas
//! certified unsatisfiable by the solver, and labeling samplers.

use std::collections::BTreeMap;

use rand::prelude::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use litp::constraints::occurrence_table;
use litp::formula::{Clause, PartitionedCnf};
use litp::labeling::{Label, LabelingSystem};
use litp::proof::{NodeId, Origin, ResolutionProof};
use litp::sat::{decide, Decision};
use litp::Var;

pub struct CnfSpec {
    pub parts: usize,
    pub max_vars: u32,
    pub max_clauses: usize,
}

/// One random partitioned formula; mostly width-2/3 clauses with enough
/// units to keep the unsat rate workable. Every partition gets at least one
/// clause.
pub fn random_cnf(rng: &mut ChaCha8Rng, spec: &CnfSpec) -> PartitionedCnf {
    let num_vars = rng.random_range(2..=spec.max_vars);
    let num_clauses = rng.random_range(spec.parts..=spec.max_clauses.max(spec.parts));
    let mut partitions = vec![Vec::new(); spec.parts];
    for k in 0..num_clauses {
        let width = (*[1usize, 2, 2, 3, 3].choose(rng).unwrap()).min(num_vars as usize);
        let mut vars: Vec<u32> = (1..=num_vars).collect();
        let mut lits = Vec::new();
        for _ in 0..width {
            let i = rng.random_range(0..vars.len());
            let v = vars.swap_remove(i);
            lits.push(if rng.random_bool(0.5) { v as i32 } else { -(v as i32) });
        }
        let slot = if k < spec.parts { k } else { rng.random_range(0..spec.parts) };
        partitions[slot].push(Clause::from_dimacs(&lits));
    }
    PartitionedCnf::new(num_vars, partitions).unwrap()
}

/// Samples until the conjunction of all partitions is unsatisfiable.
pub fn random_unsat_cnf(rng: &mut ChaCha8Rng, spec: &CnfSpec) -> PartitionedCnf {
    loop {
        let cnf = random_cnf(rng, spec);
        if matches!(decide(&cnf, 0), Decision::Unsat) {
            return cnf;
        }
    }
}

pub fn random_label(rng: &mut ChaCha8Rng) -> Label {
    *[Label::B, Label::AB, Label::A].choose(rng).unwrap()
}

pub fn uniform_system(rng: &mut ChaCha8Rng) -> LabelingSystem {
    [LabelingSystem::McMillan, LabelingSystem::Pudlak, LabelingSystem::McMillanPrime]
        .choose(rng)
        .unwrap()
        .clone()
}

/// Random per-variable labeling covering every variable.
pub fn per_variable_system(rng: &mut ChaCha8Rng, num_vars: u32) -> LabelingSystem {
    let mut m = BTreeMap::new();
    for v in 1..=num_vars {
        m.insert(Var::new(v), random_label(rng));
    }
    LabelingSystem::PerVariable(m)
}

/// Uniform or per-variable, at even odds.
pub fn mixed_system(rng: &mut ChaCha8Rng, num_vars: u32) -> LabelingSystem {
    if rng.random_bool(0.5) {
        uniform_system(rng)
    } else {
        per_variable_system(rng, num_vars)
    }
}

/// Random per-occurrence labeling covering every variable of every leaf.
pub fn per_occurrence_system(rng: &mut ChaCha8Rng, proof: &ResolutionProof) -> LabelingSystem {
    let mut m = BTreeMap::new();
    for (idx, node) in proof.nodes().iter().enumerate() {
        if matches!(node.origin, Origin::Leaf { .. }) {
            for lit in node.clause.lits() {
                m.insert((NodeId::new(idx), lit.var()), random_label(rng));
            }
        }
    }
    LabelingSystem::PerOccurrence(m)
}

/// Weakens each label to one at or above it, giving a pointwise comparable
/// pair whose interpolants must be ordered by implication.
pub fn weaken(rng: &mut ChaCha8Rng, sys: &LabelingSystem) -> LabelingSystem {
    let LabelingSystem::PerVariable(m) = sys else {
        panic!("weaken expects a per-variable labeling")
    };
    let weakened = m
        .iter()
        .map(|(v, l)| {
            let above: Vec<Label> =
                [Label::B, Label::AB, Label::A].into_iter().filter(|x| x >= l).collect();
            (*v, *above.choose(rng).unwrap())
        })
        .collect();
    LabelingSystem::PerVariable(weakened)
}

/// Samples a per-variable family over `n + 1` partitions that satisfies the
/// label rules for generalized simultaneous abstraction: per shared
/// variable, either one antecedent gets `a` and the rest `b` (only under an
/// `a` consequent), or all antecedents stay at or below the consequent
/// label without exceeding `ab`.
pub fn cc_gsa_family(rng: &mut ChaCha8Rng, cnf: &PartitionedCnf) -> Vec<LabelingSystem> {
    let parts = cnf.num_partitions();
    let n = parts - 1;
    let occ = occurrence_table(cnf);
    let mut maps: Vec<BTreeMap<Var, Label>> = vec![BTreeMap::new(); n + 1];
    for raw in 1..occ.len() {
        let p = &occ[raw];
        let v = Var::new(raw as u32);
        let slots: Vec<usize> =
            (1..=n).filter(|i| p.contains(i) && p.len() >= 2).collect();
        let has_c = p.contains(&(n + 1)) && p.iter().any(|&k| k <= n);
        let c = if has_c { Some(random_label(rng)) } else { None };
        let may_use_a = c.map_or(true, |c| c == Label::A);
        if may_use_a && !slots.is_empty() && rng.random_bool(0.3) {
            let chosen = *slots.choose(rng).unwrap();
            for &i in &slots {
                maps[i - 1].insert(v, if i == chosen { Label::A } else { Label::B });
            }
        } else {
            for &i in &slots {
                let l = if c == Some(Label::B) {
                    Label::B
                } else {
                    *[Label::B, Label::AB].choose(rng).unwrap()
                };
                maps[i - 1].insert(v, l);
            }
        }
        if let Some(c) = c {
            maps[n].insert(v, c);
        }
        // Positions where the variable is not shared never consult the map
        // during a sweep, but totality keeps the samplers reusable.
        for map in maps.iter_mut() {
            let l = random_label(rng);
            map.entry(v).or_insert(l);
        }
    }
    maps.into_iter().map(LabelingSystem::PerVariable).collect()
}

//! Collective interpolant properties and their checkers.
//!
//! Each checker takes one unsatisfiable partitioned formula, one family of
//! labelings, and a single resolution refutation (supplied or found by the
//! solver), computes every interpolant the property mentions from that same
//! proof, and discharges the property's implication obligations with the
//! solver. A failed obligation comes back with a counter-model.
//!
//! Conventions shared by all checkers: partitions are 1-based; an
//! interpolant written `I(S)` is the interpolant between the partitions in
//! the set `S` and the rest of the formula.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::formula::{BoolExpr, PartIdx, PartitionedCnf, Var};
use crate::interpolate::{interpolate, ItpError};
use crate::labeling::{BadPartition, Configuration, LabelingSystem};
use crate::proof::{ResolutionProof, ValidationError};
use crate::sat::{check_equivalence, check_implication, solve, Answer, Model, SolveResult};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CollectiveKind {
    Pi,
    Sa,
    Bgsa,
    Gsa,
    Sti,
    Tree,
}

impl fmt::Display for CollectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CollectiveKind::Pi => "PI",
            CollectiveKind::Sa => "SA",
            CollectiveKind::Bgsa => "BGSA",
            CollectiveKind::Gsa => "GSA",
            CollectiveKind::Sti => "STI",
            CollectiveKind::Tree => "TREE",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Obligation {
    pub label: String,
    pub verdict: Answer,
}

#[derive(Debug)]
pub struct CollectiveReport {
    pub kind: CollectiveKind,
    pub interpolants: Vec<(String, BoolExpr)>,
    pub obligations: Vec<Obligation>,
}

impl CollectiveReport {
    pub fn holds(&self) -> bool {
        self.obligations.iter().all(|o| o.verdict.holds())
    }

    /// Line-oriented rendering: interpolants, obligations with counter-models
    /// in DIMACS polarity form, and a final verdict line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (name, e) in &self.interpolants {
            out.push_str(&format!("INTERPOLANT {name} {e}\n"));
        }
        for (k, o) in self.obligations.iter().enumerate() {
            match &o.verdict {
                Answer::Holds => out.push_str(&format!("OBLIGATION {k} HOLDS {}\n", o.label)),
                Answer::CounterModel(m) => {
                    out.push_str(&format!(
                        "OBLIGATION {k} FAILS {} MODEL{}\n",
                        o.label,
                        render_model(m)
                    ));
                }
            }
        }
        out.push_str(&format!("{} {}\n", self.kind, if self.holds() { "HOLDS" } else { "FAILS" }));
        out
    }
}

fn render_model(m: &BTreeMap<Var, bool>) -> String {
    let mut out = String::new();
    for (v, b) in m {
        out.push_str(&format!(" {}{v}", if *b { "" } else { "-" }));
    }
    out
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("the partitions together are satisfiable: {model}")]
    NotUnsat { model: Model },
    #[error("{kind} over {partitions} partitions needs {expected} labelings, got {got}")]
    Arity { kind: CollectiveKind, partitions: usize, expected: String, got: usize },
    #[error("{kind} needs {expected} partitions, got {got}")]
    Partitions { kind: CollectiveKind, expected: String, got: usize },
    #[error("tree has {nodes} nodes but the formula has {partitions} partitions")]
    TreeShape { nodes: usize, partitions: usize },
    #[error(transparent)]
    Partition(#[from] BadPartition),
    #[error(transparent)]
    Interpolation(#[from] ItpError),
    #[error("supplied proof does not check out: {0}")]
    BadProof(#[from] ValidationError),
}

/// Options shared by all checkers. `seed` feeds both the solver run that
/// finds the refutation and the obligation queries; `jobs` > 1 discharges
/// obligations on that many threads.
#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    pub seed: u64,
    pub jobs: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { seed: 0, jobs: 1 }
    }
}

fn obtain_proof(
    cnf: &PartitionedCnf,
    supplied: Option<&ResolutionProof>,
    seed: u64,
) -> Result<ResolutionProof, CheckError> {
    match supplied {
        Some(p) => {
            p.validate(cnf)?;
            Ok(p.clone())
        }
        None => match solve(cnf, seed) {
            SolveResult::Unsat(p) => Ok(p),
            SolveResult::Sat(m) => Err(CheckError::NotUnsat { model: m }),
        },
    }
}

/// Discharges `(label, lhs, rhs)` implication obligations, optionally in
/// parallel. Results keep the input order.
fn discharge(
    obligations: Vec<(String, BoolExpr, BoolExpr)>,
    num_vars: u32,
    opts: &CheckOptions,
) -> Vec<Obligation> {
    let n = obligations.len();
    let mut verdicts: Vec<Option<Answer>> = vec![None; n];
    let jobs = opts.jobs.max(1).min(n.max(1));
    if jobs <= 1 {
        for (i, (_, lhs, rhs)) in obligations.iter().enumerate() {
            verdicts[i] = Some(check_implication(lhs, rhs, num_vars, opts.seed));
        }
    } else {
        let chunk = n.div_ceil(jobs);
        std::thread::scope(|s| {
            for (inp, out) in obligations.chunks(chunk).zip(verdicts.chunks_mut(chunk)) {
                s.spawn(|| {
                    for ((_, lhs, rhs), slot) in inp.iter().zip(out.iter_mut()) {
                        *slot = Some(check_implication(lhs, rhs, num_vars, opts.seed));
                    }
                });
            }
        });
    }
    obligations
        .into_iter()
        .zip(verdicts)
        .map(|((label, _, _), v)| Obligation { label, verdict: v.expect("all discharged") })
        .collect()
}

fn arity(
    kind: CollectiveKind,
    partitions: usize,
    expected: impl Into<String>,
    got: usize,
) -> CheckError {
    CheckError::Arity { kind, partitions, expected: expected.into(), got }
}

/// Path interpolation. Over `phi_1..phi_n` with labelings `L_0..L_n`, the
/// prefix interpolants `I_i = I({1..i})` computed with `L_i` must satisfy
/// `I_i and phi_{i+1} => I_{i+1}` for every step.
pub fn check_pi(
    cnf: &PartitionedCnf,
    family: &[LabelingSystem],
    proof: Option<&ResolutionProof>,
    opts: &CheckOptions,
) -> Result<CollectiveReport, CheckError> {
    let n = cnf.num_partitions();
    if family.len() != n + 1 {
        return Err(arity(CollectiveKind::Pi, n, (n + 1).to_string(), family.len()));
    }
    let proof = obtain_proof(cnf, proof, opts.seed)?;
    let mut interpolants = Vec::with_capacity(n + 1);
    for (i, sys) in family.iter().enumerate() {
        let config = Configuration::prefix(i, n);
        let itp = interpolate(&proof, cnf, &config, sys)?;
        interpolants.push((format!("I{i}"), itp.root_interpolant().clone()));
    }
    let obligations = (0..n)
        .map(|i| {
            let lhs = BoolExpr::and2(interpolants[i].1.clone(), cnf.partition_expr(i + 1));
            let rhs = interpolants[i + 1].1.clone();
            (format!("I{} & phi{} => I{}", i, i + 1, i + 1), lhs, rhs)
        })
        .collect();
    let obligations = discharge(obligations, cnf.num_vars(), opts);
    Ok(CollectiveReport { kind: CollectiveKind::Pi, interpolants, obligations })
}

/// Simultaneous abstraction. The single obligation is that the per-partition
/// interpolants `I({i})` are jointly contradictory. Accepts `n` labelings, or
/// `n + 1` of which the last is ignored, mirroring the generalized form.
pub fn check_sa(
    cnf: &PartitionedCnf,
    family: &[LabelingSystem],
    proof: Option<&ResolutionProof>,
    opts: &CheckOptions,
) -> Result<CollectiveReport, CheckError> {
    let n = cnf.num_partitions();
    if family.len() != n && family.len() != n + 1 {
        return Err(arity(CollectiveKind::Sa, n, format!("{n} or {}", n + 1), family.len()));
    }
    let proof = obtain_proof(cnf, proof, opts.seed)?;
    let mut interpolants = Vec::with_capacity(n);
    for i in 1..=n {
        let config = Configuration::new([i], n)?;
        let itp = interpolate(&proof, cnf, &config, &family[i - 1])?;
        interpolants.push((format!("I{i}"), itp.root_interpolant().clone()));
    }
    let lhs = BoolExpr::and(interpolants.iter().map(|(_, e)| e.clone()).collect());
    let label = format!(
        "{} => false",
        (1..=n).map(|i| format!("I{i}")).collect::<Vec<_>>().join(" & ")
    );
    let obligations = discharge(vec![(label, lhs, BoolExpr::bot())], cnf.num_vars(), opts);
    Ok(CollectiveReport { kind: CollectiveKind::Sa, interpolants, obligations })
}

/// Generalized simultaneous abstraction over `n + 1` partitions: the
/// conjunction of the `I({i})` for `i <= n` must entail `I({1..n})`, all
/// interpolants against the shared tail `phi_{n+1}`.
pub fn check_gsa(
    cnf: &PartitionedCnf,
    family: &[LabelingSystem],
    proof: Option<&ResolutionProof>,
    opts: &CheckOptions,
) -> Result<CollectiveReport, CheckError> {
    check_gsa_kind(cnf, family, proof, opts, CollectiveKind::Gsa)
}

/// Binary GSA: the `n = 2` case, kept separate because the label analysis
/// has a sharper criterion for it.
pub fn check_bgsa(
    cnf: &PartitionedCnf,
    family: &[LabelingSystem],
    proof: Option<&ResolutionProof>,
    opts: &CheckOptions,
) -> Result<CollectiveReport, CheckError> {
    let n = cnf.num_partitions();
    if n != 3 {
        return Err(CheckError::Partitions {
            kind: CollectiveKind::Bgsa,
            expected: "exactly 3".to_string(),
            got: n,
        });
    }
    check_gsa_kind(cnf, family, proof, opts, CollectiveKind::Bgsa)
}

fn check_gsa_kind(
    cnf: &PartitionedCnf,
    family: &[LabelingSystem],
    proof: Option<&ResolutionProof>,
    opts: &CheckOptions,
    kind: CollectiveKind,
) -> Result<CollectiveReport, CheckError> {
    let parts = cnf.num_partitions();
    if parts < 2 {
        return Err(CheckError::Partitions {
            kind,
            expected: "at least 2".to_string(),
            got: parts,
        });
    }
    let n = parts - 1;
    if family.len() != n + 1 {
        return Err(arity(kind, parts, (n + 1).to_string(), family.len()));
    }
    let proof = obtain_proof(cnf, proof, opts.seed)?;
    let mut interpolants = Vec::with_capacity(n + 1);
    for i in 1..=n {
        let config = Configuration::new([i], parts)?;
        let itp = interpolate(&proof, cnf, &config, &family[i - 1])?;
        interpolants.push((format!("I{i}"), itp.root_interpolant().clone()));
    }
    let rhs_config = Configuration::prefix(n, parts);
    let rhs = interpolate(&proof, cnf, &rhs_config, &family[n])?;
    interpolants.push(("RHS".to_string(), rhs.root_interpolant().clone()));
    let lhs = BoolExpr::and(interpolants[..n].iter().map(|(_, e)| e.clone()).collect());
    let label = format!(
        "{} => I({rhs_config})",
        (1..=n).map(|i| format!("I{i}")).collect::<Vec<_>>().join(" & ")
    );
    let obligations =
        discharge(vec![(label, lhs, interpolants[n].1.clone())], cnf.num_vars(), opts);
    Ok(CollectiveReport { kind, interpolants, obligations })
}

/// State-transition interpolation. The family is laid out as
/// `S_0..S_n, T_1..T_n`: prefix labelings first, per-partition labelings
/// second. Every step `I(S_i) and I({i+1}, T_{i+1}) => I(S_{i+1})` is an
/// obligation.
pub fn check_sti(
    cnf: &PartitionedCnf,
    family: &[LabelingSystem],
    proof: Option<&ResolutionProof>,
    opts: &CheckOptions,
) -> Result<CollectiveReport, CheckError> {
    let n = cnf.num_partitions();
    if family.len() != 2 * n + 1 {
        return Err(arity(CollectiveKind::Sti, n, (2 * n + 1).to_string(), family.len()));
    }
    let proof = obtain_proof(cnf, proof, opts.seed)?;
    let mut interpolants = Vec::with_capacity(2 * n + 1);
    for i in 0..=n {
        let config = Configuration::prefix(i, n);
        let itp = interpolate(&proof, cnf, &config, &family[i])?;
        interpolants.push((format!("S{i}"), itp.root_interpolant().clone()));
    }
    for i in 1..=n {
        let config = Configuration::new([i], n)?;
        let itp = interpolate(&proof, cnf, &config, &family[n + i])?;
        interpolants.push((format!("T{i}"), itp.root_interpolant().clone()));
    }
    let obligations = (0..n)
        .map(|i| {
            let lhs =
                BoolExpr::and2(interpolants[i].1.clone(), interpolants[n + 1 + i].1.clone());
            let rhs = interpolants[i + 1].1.clone();
            (format!("S{} & T{} => S{}", i, i + 1, i + 1), lhs, rhs)
        })
        .collect();
    let obligations = discharge(obligations, cnf.num_vars(), opts);
    Ok(CollectiveReport { kind: CollectiveKind::Sti, interpolants, obligations })
}

/// Tree interpolation over a tree with one node per partition: at every node
/// `i`, the child interpolants together with `phi_i` must entail the
/// interpolant of the subtree rooted at `i`.
pub fn check_tree(
    cnf: &PartitionedCnf,
    tree: &Tree,
    family: &[LabelingSystem],
    proof: Option<&ResolutionProof>,
    opts: &CheckOptions,
) -> Result<CollectiveReport, CheckError> {
    let m = cnf.num_partitions();
    if tree.num_nodes() != m {
        return Err(CheckError::TreeShape { nodes: tree.num_nodes(), partitions: m });
    }
    if family.len() != m {
        return Err(arity(CollectiveKind::Tree, m, m.to_string(), family.len()));
    }
    let proof = obtain_proof(cnf, proof, opts.seed)?;
    let mut interpolants = Vec::with_capacity(m);
    for i in 1..=m {
        let config = Configuration::new(tree.descendants(i), m)?;
        let itp = interpolate(&proof, cnf, &config, &family[i - 1])?;
        interpolants.push((format!("F{i}"), itp.root_interpolant().clone()));
    }
    let obligations = (1..=m)
        .map(|i| {
            let mut lhs: Vec<BoolExpr> =
                tree.children(i).iter().map(|&c| interpolants[c - 1].1.clone()).collect();
            lhs.push(cnf.partition_expr(i));
            let children = tree
                .children(i)
                .iter()
                .map(|c| format!("F{c}"))
                .collect::<Vec<_>>()
                .join(" & ");
            let label = if children.is_empty() {
                format!("phi{i} => F{i}")
            } else {
                format!("{children} & phi{i} => F{i}")
            };
            (label, BoolExpr::and(lhs), interpolants[i - 1].1.clone())
        })
        .collect();
    let obligations = discharge(obligations, cnf.num_vars(), opts);
    Ok(CollectiveReport { kind: CollectiveKind::Tree, interpolants, obligations })
}

/// Interpolants from the `ab`-uniform labeling are self-dual: swapping the
/// sides negates them. Verified as an equivalence query.
pub fn check_symmetry(
    cnf: &PartitionedCnf,
    config: &Configuration,
    proof: Option<&ResolutionProof>,
    opts: &CheckOptions,
) -> Result<Answer, CheckError> {
    let proof = obtain_proof(cnf, proof, opts.seed)?;
    let fwd = interpolate(&proof, cnf, config, &LabelingSystem::Pudlak)?;
    let bwd = interpolate(&proof, cnf, &config.complement(), &LabelingSystem::Pudlak)?;
    Ok(check_equivalence(
        fwd.root_interpolant(),
        &bwd.root_interpolant().negate(),
        cnf.num_vars(),
        opts.seed,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("node {node} out of range 1..={max}")]
    BadNode { node: usize, max: usize },
    #[error("node {node} has two parents")]
    TwoParents { node: usize },
    #[error("no root: every node has a parent")]
    NoRoot,
    #[error("two roots: {0} and {1}")]
    TwoRoots(usize, usize),
    #[error("node {node} is not reachable from the root")]
    Unreachable { node: usize },
    #[error("line {line}: cannot parse `{text}`")]
    Parse { line: usize, text: String },
}

/// Rooted tree over nodes `1..=n`, stored as a parent array.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    root: usize,
}

impl Tree {
    /// Builds from `(parent, child)` edges over nodes `1..=num_nodes`.
    pub fn new(num_nodes: usize, edges: &[(usize, usize)]) -> Result<Self, TreeError> {
        let check = |node: usize| {
            if node < 1 || node > num_nodes {
                Err(TreeError::BadNode { node, max: num_nodes })
            } else {
                Ok(())
            }
        };
        let mut parent = vec![None; num_nodes + 1];
        let mut children = vec![Vec::new(); num_nodes + 1];
        for &(p, c) in edges {
            check(p)?;
            check(c)?;
            if parent[c].is_some() {
                return Err(TreeError::TwoParents { node: c });
            }
            parent[c] = Some(p);
            children[p].push(c);
        }
        let mut root = None;
        for i in 1..=num_nodes {
            if parent[i].is_none() {
                match root {
                    None => root = Some(i),
                    Some(r) => return Err(TreeError::TwoRoots(r, i)),
                }
            }
        }
        let root = root.ok_or(TreeError::NoRoot)?;
        let tree = Tree { parent, children, root };
        // A cycle leaves its nodes unreachable from the root.
        let mut seen = vec![false; num_nodes + 1];
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(i) = stack.pop() {
            for &c in tree.children(i) {
                seen[c] = true;
                stack.push(c);
            }
        }
        if let Some(node) = (1..=num_nodes).find(|&i| !seen[i]) {
            return Err(TreeError::Unreachable { node });
        }
        Ok(tree)
    }

    /// One `<node> <parent>` pair per line; `0` as parent marks the root.
    /// Nodes are `1..=n` where `n` is the number of lines.
    pub fn parse(text: &str) -> Result<Self, TreeError> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let mut words = line.split_whitespace();
            let bad = || TreeError::Parse { line: i + 1, text: line.to_string() };
            let node: usize = words.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let parent: usize = words.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if words.next().is_some() {
                return Err(bad());
            }
            pairs.push((node, parent));
        }
        let n = pairs.len();
        let mut edges = Vec::new();
        for &(node, parent) in &pairs {
            if parent != 0 {
                edges.push((parent, node));
            } else if node < 1 || node > n {
                return Err(TreeError::BadNode { node, max: n });
            }
        }
        Tree::new(n, &edges)
    }

    pub fn num_nodes(&self) -> usize {
        self.parent.len() - 1
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    /// Descendants of `i`, including `i` itself.
    pub fn descendants(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![i];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend_from_slice(self.children(n));
        }
        out.sort_unstable();
        out
    }
}

/// A tree-interpolation instance equivalent to another collective property,
/// together with the partition renumbering that carries proofs across.
#[derive(Debug)]
pub struct TreeEncoding {
    pub cnf: PartitionedCnf,
    pub tree: Tree,
    pub family: Vec<LabelingSystem>,
    /// Old 1-based partition index to new; index 0 is unused.
    pub remap: Vec<PartIdx>,
}

/// Encodes an `n`-GSA instance (over `n + 1` partitions) as tree
/// interpolation: a hub node holding an empty partition fans out to the `n`
/// abstracted partitions, and the root holds `phi_{n+1}`. The hub obligation
/// of the tree instance is exactly the GSA obligation.
pub fn gsa_tree_encoding(
    cnf: &PartitionedCnf,
    family: &[LabelingSystem],
) -> Result<TreeEncoding, CheckError> {
    let parts = cnf.num_partitions();
    if parts < 2 {
        return Err(CheckError::Partitions {
            kind: CollectiveKind::Gsa,
            expected: "at least 2".to_string(),
            got: parts,
        });
    }
    let n = parts - 1;
    if family.len() != n + 1 {
        return Err(arity(CollectiveKind::Gsa, parts, (n + 1).to_string(), family.len()));
    }
    // New layout: partition 1 empty (hub), 1+i = old i, n+2 = old n+1.
    let mut partitions = vec![Vec::new()];
    for i in 1..=parts {
        partitions.push(cnf.partition(i).to_vec());
    }
    let new_cnf = PartitionedCnf::new(cnf.num_vars(), partitions).expect("same variables");
    let mut edges: Vec<(usize, usize)> = (1..=n).map(|i| (1, 1 + i)).collect();
    edges.push((n + 2, 1));
    let tree = Tree::new(n + 2, &edges).expect("hub tree is well formed");
    let mut mapped = Vec::with_capacity(n + 2);
    mapped.push(family[n].clone()); // hub carries the consequent labeling
    mapped.extend(family[..n].iter().cloned());
    mapped.push(family[n].clone());
    let remap = (0..=parts).map(|k| k + 1).collect();
    Ok(TreeEncoding { cnf: new_cnf, tree, family: mapped, remap })
}

/// Encodes an `n`-STI instance as tree interpolation: a spine of `n` empty
/// partitions carries the prefix labelings, each spine node also hanging the
/// matching original partition with its own labeling.
pub fn sti_tree_encoding(
    cnf: &PartitionedCnf,
    family: &[LabelingSystem],
) -> Result<TreeEncoding, CheckError> {
    let n = cnf.num_partitions();
    if family.len() != 2 * n + 1 {
        return Err(arity(CollectiveKind::Sti, n, (2 * n + 1).to_string(), family.len()));
    }
    let mut partitions = Vec::with_capacity(2 * n);
    for i in 1..=n {
        partitions.push(cnf.partition(i).to_vec());
    }
    partitions.extend(std::iter::repeat_with(Vec::new).take(n));
    let new_cnf = PartitionedCnf::new(cnf.num_vars(), partitions).expect("same variables");
    let mut edges: Vec<(usize, usize)> = (1..=n).map(|i| (n + i, i)).collect();
    edges.extend((2..=n).map(|i| (n + i, n + i - 1)));
    let tree = Tree::new(2 * n, &edges).expect("spine tree is well formed");
    let mut mapped = Vec::with_capacity(2 * n);
    mapped.extend(family[n + 1..].iter().cloned()); // node i carries T_i
    mapped.extend(family[1..=n].iter().cloned()); // node n+i carries S_i
    let remap = (0..=n).collect();
    Ok(TreeEncoding { cnf: new_cnf, tree, family: mapped, remap })
}

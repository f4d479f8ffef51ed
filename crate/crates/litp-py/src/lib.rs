//! Python bindings over the core crate: formulas, certified refutations,
//! labeled interpolation, and the collective checkers. Mirrors the CLI
//! semantics (same family specs, same tree format, same defaults).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use litp::collectives::{
    check_bgsa, check_gsa, check_pi, check_sa, check_sti, check_tree, CheckOptions,
    CollectiveKind, CollectiveReport, Tree,
};
use litp::constraints::{predict as core_predict, Prediction as CorePrediction};
use litp::formula::{parse_dimacs, PartitionedCnf};
use litp::labeling::{parse_family, Configuration, LabelingSystem};
use litp::proof::{import_tracecheck, write_tracecheck, ResolutionProof};
use litp::sat::{decide as core_decide, solve, Decision, Model, SolveResult};

fn val(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A partitioned CNF formula, parsed from DIMACS with `c part k` markers.
#[pyclass(frozen)]
struct Formula {
    inner: PartitionedCnf,
}

#[pymethods]
impl Formula {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Formula> {
        Ok(Formula { inner: parse_dimacs(text).map_err(val)? })
    }

    #[getter]
    fn num_vars(&self) -> u32 {
        self.inner.num_vars()
    }

    #[getter]
    fn num_partitions(&self) -> usize {
        self.inner.num_partitions()
    }

    #[getter]
    fn clause_count(&self) -> usize {
        self.inner.clause_count()
    }

    fn partition_sizes(&self) -> Vec<usize> {
        (1..=self.inner.num_partitions()).map(|k| self.inner.partition(k).len()).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Formula(vars={}, partitions={}, clauses={})",
            self.inner.num_vars(),
            self.inner.num_partitions(),
            self.inner.clause_count()
        )
    }
}

/// A resolution refutation, either produced by the solver or imported from
/// a trace.
#[pyclass(frozen)]
struct Proof {
    inner: ResolutionProof,
}

#[pymethods]
impl Proof {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn leaf_count(&self) -> usize {
        self.inner.leaf_count()
    }

    fn to_tracecheck(&self) -> String {
        write_tracecheck(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Proof(nodes={}, leaves={})", self.inner.len(), self.inner.leaf_count())
    }
}

/// Verdict of a collective check: the interpolants (rendered as
/// s-expressions) and one obligation verdict per proof step.
#[pyclass(frozen)]
struct Report {
    kind: String,
    holds: bool,
    interpolants: Vec<(String, String)>,
    obligations: Vec<(String, bool)>,
    text: String,
}

impl Report {
    fn wrap(r: CollectiveReport) -> Report {
        Report {
            kind: r.kind.to_string(),
            holds: r.holds(),
            interpolants: r.interpolants.iter().map(|(n, e)| (n.clone(), e.to_string())).collect(),
            obligations: r
                .obligations
                .iter()
                .map(|o| (o.label.clone(), o.verdict.holds()))
                .collect(),
            text: r.render(),
        }
    }
}

#[pymethods]
impl Report {
    #[getter]
    fn kind(&self) -> &str {
        &self.kind
    }

    #[getter]
    fn holds(&self) -> bool {
        self.holds
    }

    #[getter]
    fn interpolants(&self) -> Vec<(String, String)> {
        self.interpolants.clone()
    }

    #[getter]
    fn obligations(&self) -> Vec<(String, bool)> {
        self.obligations.clone()
    }

    fn render(&self) -> &str {
        &self.text
    }

    fn __repr__(&self) -> String {
        format!(
            "Report(kind={:?}, holds={})",
            self.kind,
            if self.holds { "True" } else { "False" }
        )
    }
}

/// Static label-rule verdict: whether the family is guaranteed to pass on
/// every refutation, with the violated rules otherwise.
#[pyclass(frozen, name = "Prediction")]
struct PyPrediction {
    holds: bool,
    violations: Vec<String>,
    text: String,
}

#[pymethods]
impl PyPrediction {
    #[getter]
    fn holds(&self) -> bool {
        self.holds
    }

    #[getter]
    fn violations(&self) -> Vec<String> {
        self.violations.clone()
    }

    fn render(&self) -> &str {
        &self.text
    }

    fn __repr__(&self) -> String {
        format!(
            "Prediction(holds={}, violations={})",
            if self.holds { "True" } else { "False" },
            self.violations.len()
        )
    }
}

fn model_lits(m: &Model, up_to: u32) -> Vec<i64> {
    m.to_map(up_to)
        .into_iter()
        .map(|(v, b)| {
            let i = v.index() as i64;
            if b {
                i
            } else {
                -i
            }
        })
        .collect()
}

fn parse_collective(s: &str) -> PyResult<CollectiveKind> {
    Ok(match s.to_ascii_lowercase().as_str() {
        "pi" => CollectiveKind::Pi,
        "sa" => CollectiveKind::Sa,
        "bgsa" => CollectiveKind::Bgsa,
        "gsa" => CollectiveKind::Gsa,
        "sti" => CollectiveKind::Sti,
        "tree" => CollectiveKind::Tree,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown collective {other:?}; expected pi, sa, bgsa, gsa, sti, or tree"
            )))
        }
    })
}

fn family_or_default(
    spec: Option<&str>,
    kind: CollectiveKind,
    cnf: &PartitionedCnf,
    tree: Option<&Tree>,
) -> PyResult<Vec<LabelingSystem>> {
    match spec {
        Some(s) => parse_family(s).map_err(val),
        None => {
            let n = cnf.num_partitions();
            let arity = match kind {
                CollectiveKind::Pi => n + 1,
                CollectiveKind::Sa => n,
                CollectiveKind::Bgsa | CollectiveKind::Gsa => n,
                CollectiveKind::Sti => 2 * n + 1,
                CollectiveKind::Tree => tree.map_or(n, Tree::num_nodes),
            };
            Ok(vec![LabelingSystem::McMillan; arity])
        }
    }
}

fn refute_inner(cnf: &PartitionedCnf, seed: u64) -> PyResult<ResolutionProof> {
    match solve(cnf, seed) {
        SolveResult::Unsat(p) => Ok(p),
        SolveResult::Sat(m) => Err(PyValueError::new_err(format!("formula is satisfiable: {m}"))),
    }
}

/// Satisfiability only. Returns a model as signed DIMACS literals, or None
/// when the formula is unsatisfiable.
#[pyfunction]
#[pyo3(signature = (formula, seed = 0))]
fn decide(formula: PyRef<'_, Formula>, seed: u64) -> Option<Vec<i64>> {
    match core_decide(&formula.inner, seed) {
        Decision::Sat(m) => Some(model_lits(&m, formula.inner.num_vars())),
        Decision::Unsat => None,
    }
}

/// Solves and returns a certified resolution refutation. Raises ValueError
/// with the model when the formula is satisfiable.
#[pyfunction]
#[pyo3(signature = (formula, seed = 0))]
fn refute(formula: PyRef<'_, Formula>, seed: u64) -> PyResult<Proof> {
    Ok(Proof { inner: refute_inner(&formula.inner, seed)? })
}

/// Imports a tracecheck refutation against the formula, re-deriving leaf
/// partitions and validating every resolution step.
#[pyfunction]
fn import_proof(formula: PyRef<'_, Formula>, trace: &str) -> PyResult<Proof> {
    Ok(Proof { inner: import_tracecheck(trace, &formula.inner).map_err(val)? })
}

/// Interpolates the split whose A side is `a_parts` (1-based partition
/// indices) under a labeling spec such as "M", "P", "M'", or
/// "var:1=a,2=ab". Returns the interpolant as an s-expression. Solves for a
/// proof unless one is supplied.
#[pyfunction]
#[pyo3(signature = (formula, a_parts, labeling = "P", proof = None, seed = 0))]
fn interpolate(
    formula: PyRef<'_, Formula>,
    a_parts: Vec<usize>,
    labeling: &str,
    proof: Option<PyRef<'_, Proof>>,
    seed: u64,
) -> PyResult<String> {
    let cnf = &formula.inner;
    let config = Configuration::new(a_parts, cnf.num_partitions()).map_err(val)?;
    let system = LabelingSystem::parse(labeling).map_err(val)?;
    let solved;
    let proof_ref = match &proof {
        Some(p) => &p.inner,
        None => {
            solved = refute_inner(cnf, seed)?;
            &solved
        }
    };
    let out = litp::interpolate::interpolate(proof_ref, cnf, &config, &system).map_err(val)?;
    Ok(out.root_interpolant().to_string())
}

/// Checks a collective interpolation property ("pi", "sa", "bgsa", "gsa",
/// "sti", or "tree") for a labeling family, on a supplied proof or a fresh
/// refutation. `family` uses the comma-joined CLI spec; the default is
/// McMillan in every slot. `tree` lines read "node parent" with 0 marking
/// the root.
#[pyfunction]
#[pyo3(signature = (formula, collective, family = None, proof = None, tree = None, seed = 0, jobs = 1))]
fn check(
    formula: PyRef<'_, Formula>,
    collective: &str,
    family: Option<&str>,
    proof: Option<PyRef<'_, Proof>>,
    tree: Option<&str>,
    seed: u64,
    jobs: usize,
) -> PyResult<Report> {
    let cnf = &formula.inner;
    let kind = parse_collective(collective)?;
    let tree = tree.map(Tree::parse).transpose().map_err(val)?;
    let family = family_or_default(family, kind, cnf, tree.as_ref())?;
    let proof_ref = proof.as_ref().map(|p| &p.inner);
    let opts = CheckOptions { seed, jobs };
    let report = match kind {
        CollectiveKind::Pi => check_pi(cnf, &family, proof_ref, &opts),
        CollectiveKind::Sa => check_sa(cnf, &family, proof_ref, &opts),
        CollectiveKind::Bgsa => check_bgsa(cnf, &family, proof_ref, &opts),
        CollectiveKind::Gsa => check_gsa(cnf, &family, proof_ref, &opts),
        CollectiveKind::Sti => check_sti(cnf, &family, proof_ref, &opts),
        CollectiveKind::Tree => {
            let tree =
                tree.as_ref().ok_or_else(|| PyValueError::new_err("tree collective needs a tree"))?;
            check_tree(cnf, tree, &family, proof_ref, &opts)
        }
    }
    .map_err(val)?;
    Ok(Report::wrap(report))
}

/// Applies the label rules for the collective without touching the solver:
/// WillHold means every refutation passes, violations list the broken rules.
#[pyfunction]
#[pyo3(signature = (formula, collective, family = None, tree = None))]
fn predict(
    formula: PyRef<'_, Formula>,
    collective: &str,
    family: Option<&str>,
    tree: Option<&str>,
) -> PyResult<PyPrediction> {
    let cnf = &formula.inner;
    let kind = parse_collective(collective)?;
    let tree = tree.map(Tree::parse).transpose().map_err(val)?;
    let family = family_or_default(family, kind, cnf, tree.as_ref())?;
    let prediction = core_predict(kind, cnf, &family, tree.as_ref()).map_err(val)?;
    let violations = match &prediction {
        CorePrediction::WillHold => Vec::new(),
        CorePrediction::WillFail(vs) => vs.iter().map(|v| v.to_string()).collect(),
    };
    Ok(PyPrediction { holds: prediction.holds(), violations, text: prediction.render() })
}

#[pymodule]
fn litp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Formula>()?;
    m.add_class::<Proof>()?;
    m.add_class::<Report>()?;
    m.add_class::<PyPrediction>()?;
    m.add_function(wrap_pyfunction!(decide, m)?)?;
    m.add_function(wrap_pyfunction!(refute, m)?)?;
    m.add_function(wrap_pyfunction!(import_proof, m)?)?;
    m.add_function(wrap_pyfunction!(interpolate, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(predict, m)?)?;
    Ok(())
}

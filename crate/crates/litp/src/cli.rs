//! Command line front end.
//!
//! `run` is the whole interface: it parses arguments, writes reports to
//! `out` and diagnostics to `err`, and returns the exit code. Exit 0 means
//! answered or holds, 1 means a property or proof failed to check out, 2
//! means the request itself was unusable.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use crate::collectives::{
    check_bgsa, check_gsa, check_pi, check_sa, check_sti, check_tree, CheckOptions,
    CollectiveKind, Tree,
};
use crate::constraints::predict;
use crate::formula::{parse_dimacs, PartitionedCnf};
use crate::interpolate::interpolate;
use crate::labeling::{parse_family, Configuration, LabelingSystem};
use crate::proof::{import_tracecheck, write_tracecheck, ResolutionProof};
use crate::sat::{solve, SolveResult};

#[derive(Parser)]
#[command(name = "litp", version, about = "solver-backed labeled interpolation toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide satisfiability of a partitioned DIMACS file.
    Solve {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// On UNSAT, also write the refutation as a trace file.
        #[arg(long)]
        dump_proof: Option<PathBuf>,
    },
    /// Compute one interpolant between a partition set and the rest.
    Interpolate {
        #[arg(long)]
        cnf: PathBuf,
        /// Partitions forming the left side, e.g. A=1,3.
        #[arg(long)]
        config: String,
        /// M, P, M', var:1=a,..., or occ:1.2=ab,...
        #[arg(long, default_value = "P")]
        labeling: String,
        /// Trace file to interpolate from instead of solving.
        #[arg(long)]
        proof: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check a collective property of a labeling family against one proof.
    Check {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        collective: Collective,
        /// Comma-separated labelings; defaults to all-M of the right arity.
        #[arg(long)]
        family: Option<String>,
        /// Tree file for the tree collective: one `<node> <parent>` per
        /// line, 0 marking the root.
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long)]
        proof: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Obligations are discharged on this many threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Predict a collective property from the labels alone, without solving.
    Predict {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        collective: Collective,
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        tree: Option<PathBuf>,
    },
    /// Refute a formula and print or save the proof.
    ProveDump {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Destination file; omitted means stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a trace file against a formula.
    ImportProof {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        proof: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Collective {
    Pi,
    Sa,
    Bgsa,
    Gsa,
    Sti,
    Tree,
}

impl From<Collective> for CollectiveKind {
    fn from(c: Collective) -> Self {
        match c {
            Collective::Pi => CollectiveKind::Pi,
            Collective::Sa => CollectiveKind::Sa,
            Collective::Bgsa => CollectiveKind::Bgsa,
            Collective::Gsa => CollectiveKind::Gsa,
            Collective::Sti => CollectiveKind::Sti,
            Collective::Tree => CollectiveKind::Tree,
        }
    }
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
        }
    };
    match execute(cli.cmd, out) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn execute(cmd: Cmd, out: &mut dyn Write) -> Result<i32, String> {
    match cmd {
        Cmd::Solve { cnf, seed, dump_proof } => {
            let cnf = load_cnf(&cnf)?;
            match solve(&cnf, seed) {
                SolveResult::Sat(model) => {
                    let _ = writeln!(out, "SAT");
                    let _ = writeln!(out, "{model}");
                    Ok(0)
                }
                SolveResult::Unsat(proof) => {
                    let _ = writeln!(out, "UNSAT");
                    if let Some(path) = dump_proof {
                        write_file(&path, &write_tracecheck(&proof))?;
                    }
                    Ok(0)
                }
            }
        }
        Cmd::Interpolate { cnf, config, labeling, proof, seed } => {
            let cnf = load_cnf(&cnf)?;
            let config = Configuration::parse_spec(&config, cnf.num_partitions())
                .map_err(|e| e.to_string())?;
            let system = LabelingSystem::parse(&labeling).map_err(|e| e.to_string())?;
            let proof = load_or_solve(&cnf, proof.as_deref(), seed)?;
            let itp =
                interpolate(&proof, &cnf, &config, &system).map_err(|e| e.to_string())?;
            let _ = writeln!(out, "{}", itp.root_interpolant());
            Ok(0)
        }
        Cmd::Check { cnf, collective, family, tree, proof, seed, jobs } => {
            let cnf = load_cnf(&cnf)?;
            let tree = load_tree(tree.as_deref())?;
            let family = family_or_default(family.as_deref(), collective, &cnf, tree.as_ref())?;
            let proof = match proof {
                Some(path) => Some(load_proof(&cnf, &path)?),
                None => None,
            };
            let opts = CheckOptions { seed, jobs };
            let report = match CollectiveKind::from(collective) {
                CollectiveKind::Pi => check_pi(&cnf, &family, proof.as_ref(), &opts),
                CollectiveKind::Sa => check_sa(&cnf, &family, proof.as_ref(), &opts),
                CollectiveKind::Bgsa => check_bgsa(&cnf, &family, proof.as_ref(), &opts),
                CollectiveKind::Gsa => check_gsa(&cnf, &family, proof.as_ref(), &opts),
                CollectiveKind::Sti => check_sti(&cnf, &family, proof.as_ref(), &opts),
                CollectiveKind::Tree => {
                    let tree = tree.as_ref().ok_or("tree collective needs --tree")?;
                    check_tree(&cnf, tree, &family, proof.as_ref(), &opts)
                }
            }
            .map_err(|e| e.to_string())?;
            let _ = write!(out, "{}", report.render());
            Ok(if report.holds() { 0 } else { 1 })
        }
        Cmd::Predict { cnf, collective, family, tree } => {
            let cnf = load_cnf(&cnf)?;
            let tree = load_tree(tree.as_deref())?;
            let family = family_or_default(family.as_deref(), collective, &cnf, tree.as_ref())?;
            let prediction = predict(collective.into(), &cnf, &family, tree.as_ref())
                .map_err(|e| e.to_string())?;
            let _ = write!(out, "{}", prediction.render());
            Ok(if prediction.holds() { 0 } else { 1 })
        }
        Cmd::ProveDump { cnf, seed, out: dest } => {
            let cnf = load_cnf(&cnf)?;
            match solve(&cnf, seed) {
                SolveResult::Sat(model) => {
                    let _ = writeln!(out, "SAT");
                    let _ = writeln!(out, "{model}");
                    Ok(1)
                }
                SolveResult::Unsat(proof) => {
                    let text = write_tracecheck(&proof);
                    match dest {
                        Some(path) => {
                            write_file(&path, &text)?;
                            let _ = writeln!(out, "UNSAT {} NODES", proof.len());
                        }
                        None => {
                            let _ = write!(out, "{text}");
                        }
                    }
                    Ok(0)
                }
            }
        }
        Cmd::ImportProof { cnf, proof } => {
            let cnf = load_cnf(&cnf)?;
            let text = read_file(&proof)?;
            match import_tracecheck(&text, &cnf) {
                Ok(p) => {
                    let _ = writeln!(out, "PROOF OK {} NODES {} LEAVES", p.len(), p.leaf_count());
                    Ok(0)
                }
                Err(e) => {
                    let _ = writeln!(out, "PROOF BAD {e}");
                    Ok(1)
                }
            }
        }
    }
}

fn read_file(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_cnf(path: &Path) -> Result<PartitionedCnf, String> {
    parse_dimacs(&read_file(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_tree(path: Option<&Path>) -> Result<Option<Tree>, String> {
    match path {
        None => Ok(None),
        Some(p) => Tree::parse(&read_file(p)?)
            .map(Some)
            .map_err(|e| format!("{}: {e}", p.display())),
    }
}

fn load_proof(cnf: &PartitionedCnf, path: &Path) -> Result<ResolutionProof, String> {
    import_tracecheck(&read_file(path)?, cnf).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_or_solve(
    cnf: &PartitionedCnf,
    path: Option<&Path>,
    seed: u64,
) -> Result<ResolutionProof, String> {
    match path {
        Some(p) => load_proof(cnf, p),
        None => match solve(cnf, seed) {
            SolveResult::Unsat(p) => Ok(p),
            SolveResult::Sat(m) => Err(format!("formula is satisfiable: {m}")),
        },
    }
}

fn family_or_default(
    spec: Option<&str>,
    collective: Collective,
    cnf: &PartitionedCnf,
    tree: Option<&Tree>,
) -> Result<Vec<LabelingSystem>, String> {
    match spec {
        Some(s) => parse_family(s).map_err(|e| e.to_string()),
        None => {
            let n = cnf.num_partitions();
            let arity = match collective {
                Collective::Pi => n + 1,
                Collective::Sa => n,
                Collective::Bgsa | Collective::Gsa => n,
                Collective::Sti => 2 * n + 1,
                Collective::Tree => tree.map_or(n, Tree::num_nodes),
            };
            Ok(vec![LabelingSystem::McMillan; arity])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(args.iter().copied(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn help_goes_to_stdout_and_exits_zero() {
        let (code, out, err) = capture(&["litp", "--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("Usage"));
        assert!(err.is_empty());
    }

    #[test]
    fn usage_errors_exit_two() {
        let (code, out, err) = capture(&["litp", "solve", "--bogus"]);
        assert_eq!(code, 2);
        assert!(out.is_empty());
        assert!(!err.is_empty());

        let (code, _, _) = capture(&["litp", "check", "--cnf", "x.cnf"]);
        assert_eq!(code, 2); // --collective is required
    }

    #[test]
    fn unreadable_input_exits_two() {
        let (code, _, err) = capture(&["litp", "solve", "--cnf", "/no/such/file.cnf"]);
        assert_eq!(code, 2);
        assert!(err.starts_with("error:"));
    }
}

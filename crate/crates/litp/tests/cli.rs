//! End-to-end runs of the command line interface against the fixture files.

use litp::cli::run;

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn litp(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["litp"];
    argv.extend_from_slice(args);
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn interpolates_the_two_unit_formula() {
    let (code, out, err) =
        litp(&["interpolate", "--cnf", &fixture("two_units.cnf"), "--config", "A=1"]);
    assert_eq!(code, 0, "stderr: {err}");
    assert_eq!(out.trim(), "(var 1)");
}

#[test]
fn flags_the_failing_binary_abstraction_family() {
    let (code, out, _) = litp(&[
        "check",
        "--cnf",
        &fixture("three_part.cnf"),
        "--collective",
        "bgsa",
        "--family",
        "M',M',M",
    ]);
    assert_eq!(code, 1);
    assert!(out.contains("OBLIGATION 0 FAILS"), "{out}");
    // Every countermodel of this instance falsifies variables 2 and 3.
    assert!(out.contains("-2"), "{out}");
    assert!(out.contains("-3"), "{out}");
    assert!(out.contains("BGSA FAILS"), "{out}");
}

#[test]
fn predicts_path_interpolation_for_a_single_labeling() {
    let (code, out, _) = litp(&[
        "predict",
        "--cnf",
        &fixture("three_part.cnf"),
        "--collective",
        "pi",
        "--family",
        "M',M',M',M'",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "WILLHOLD\n");
}

#[test]
fn predicts_the_failing_family_without_solving() {
    let (code, out, _) = litp(&[
        "predict",
        "--cnf",
        &fixture("three_part.cnf"),
        "--collective",
        "bgsa",
        "--family",
        "M',M',M",
    ]);
    assert_eq!(code, 1);
    assert!(out.contains("RULE alpha"), "{out}");
    assert!(out.ends_with("WILLFAIL\n"), "{out}");
}

#[test]
fn solves_and_reports_both_ways() {
    let (code, out, _) = litp(&["solve", "--cnf", &fixture("three_part.cnf")]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "UNSAT");

    // Dropping the closing partition leaves a satisfiable formula.
    let dir = std::env::temp_dir().join("litp-cli-sat");
    std::fs::create_dir_all(&dir).unwrap();
    let sat = dir.join("sat.cnf");
    std::fs::write(&sat, "p cnf 2 2\nc part 1\n1 0\nc part 2\n1 2 0\n").unwrap();
    let (code, out, _) = litp(&["solve", "--cnf", sat.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.starts_with("SAT\n"), "{out}");
    assert!(out.contains('1'), "{out}");
}

#[test]
fn dumped_proofs_import_cleanly() {
    let dir = std::env::temp_dir().join("litp-cli-roundtrip");
    std::fs::create_dir_all(&dir).unwrap();
    let trace = dir.join("three_part.trace");

    let (code, out, _) = litp(&[
        "prove-dump",
        "--cnf",
        &fixture("three_part.cnf"),
        "--out",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("UNSAT"), "{out}");

    let (code, out, _) = litp(&[
        "import-proof",
        "--cnf",
        &fixture("three_part.cnf"),
        "--proof",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("PROOF OK"), "{out}");

    // The permuted formula has the same clauses, so the importer re-derives
    // the leaf partitions and still accepts the trace.
    let (code, out, _) = litp(&[
        "import-proof",
        "--cnf",
        &fixture("three_part_perm.cnf"),
        "--proof",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("PROOF OK"), "{out}");

    // Against an unrelated formula the leaves do not exist.
    let (code, out, _) = litp(&[
        "import-proof",
        "--cnf",
        &fixture("two_units.cnf"),
        "--proof",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert!(out.starts_with("PROOF BAD"), "{out}");
}

#[test]
fn checks_run_from_a_supplied_proof() {
    let (code, out, _) = litp(&[
        "check",
        "--cnf",
        &fixture("three_part.cnf"),
        "--collective",
        "pi",
        "--family",
        "P,P,P,P",
        "--proof",
        &fixture("three_part_proof_a.trace"),
        "--jobs",
        "2",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("PI HOLDS"), "{out}");
}

#[test]
fn tree_collective_reads_the_tree_file() {
    let (code, out, _) = litp(&[
        "check",
        "--cnf",
        &fixture("three_part.cnf"),
        "--collective",
        "tree",
        "--tree",
        &fixture("chain.tree"),
        "--family",
        "P,P,P",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("TREE HOLDS"), "{out}");

    let (code, _, err) = litp(&[
        "check",
        "--cnf",
        &fixture("three_part.cnf"),
        "--collective",
        "tree",
        "--family",
        "P,P,P",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("--tree"), "{err}");
}

#[test]
fn interpolating_a_satisfiable_formula_is_an_input_error() {
    let (code, _, err) =
        litp(&["interpolate", "--cnf", &fixture("two_units.cnf"), "--config", "A="]);
    assert_eq!(code, 0, "{err}"); // empty left side is fine: the interpolant is true
    let dir = std::env::temp_dir().join("litp-cli-sat2");
    std::fs::create_dir_all(&dir).unwrap();
    let sat = dir.join("sat.cnf");
    std::fs::write(&sat, "p cnf 1 1\n1 0\n").unwrap();
    let (code, _, err) =
        litp(&["interpolate", "--cnf", sat.to_str().unwrap(), "--config", "A=1"]);
    assert_eq!(code, 2);
    assert!(err.contains("satisfiable"), "{err}");
}

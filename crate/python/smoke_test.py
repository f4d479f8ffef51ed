#!/usr/bin/env python3
"""End-to-end exercise of the litp_py extension module.

Builds the cdylib with cargo, stages it under the name Python expects, and
drives every exposed operation once. Exits nonzero on the first failure.
"""

import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

EXAMPLE = """p cnf 4 5
c part 1
1 -2 0
3 0
c part 2
-1 -3 0
2 0
c part 3
4 0
"""

SATISFIABLE = """p cnf 2 2
c part 1
1 2 0
c part 2
-1 0
"""

CHAIN_TREE = "1 3\n2 3\n3 0\n"


def load_module():
    subprocess.run(["cargo", "build", "-p", "litp-py"], cwd=ROOT, check=True)
    built = ROOT / "target" / "debug" / "liblitp_py.so"
    staging = Path(tempfile.mkdtemp(prefix="litp-py-"))
    shutil.copy2(built, staging / "litp_py.so")
    sys.path.insert(0, str(staging))
    import litp_py

    return litp_py


def main():
    litp = load_module()

    f = litp.Formula.parse(EXAMPLE)
    assert f.num_vars == 4 and f.num_partitions == 3 and f.clause_count == 5
    assert f.partition_sizes() == [2, 2, 1]
    print(f"parsed {f!r}")

    assert litp.decide(f) is None, "the example is unsatisfiable"
    sat = litp.Formula.parse(SATISFIABLE)
    model = litp.decide(sat)
    assert model is not None and 2 in model and -1 in model, model
    print(f"decided both ways, model {model}")

    proof = litp.refute(f)
    assert len(proof) > 0 and proof.leaf_count > 0
    again = litp.import_proof(f, proof.to_tracecheck())
    assert len(again) == len(proof) and again.leaf_count == proof.leaf_count
    print(f"refuted and round-tripped {proof!r}")

    try:
        litp.refute(sat)
    except ValueError as e:
        assert "satisfiable" in str(e)
        print("refuting a satisfiable formula raises ValueError")
    else:
        raise AssertionError("refute must reject satisfiable input")

    itp = litp.interpolate(f, [1], labeling="M'", proof=proof)
    assert "(var" in itp or itp in ("true", "false")
    print(f"interpolant for A={{1}} under M': {itp}")

    report = litp.check(f, "pi", proof=proof)
    assert report.holds and report.kind == "PI"
    assert len(report.interpolants) == 4 and all(ok for _, ok in report.obligations)
    print(f"path interpolation: {report!r}")

    bad = litp.check(f, "bgsa", family="M',M',M'", proof=proof)
    assert not bad.holds, "the all-strong family must fail binary abstraction"
    predicted = litp.predict(f, "bgsa", family="M',M',M'")
    assert not predicted.holds and predicted.violations
    assert predicted.render().endswith("WILLFAIL\n")
    print(f"binary abstraction correctly rejected: {predicted.violations[0]}")

    good = litp.predict(f, "pi", family="M',M',M',M'")
    assert good.holds and not good.violations
    print("single-labeling path family predicted to hold")

    tree_report = litp.check(f, "tree", family="P,P,P", tree=CHAIN_TREE, proof=proof)
    assert tree_report.holds and len(tree_report.obligations) == 3
    print(f"tree interpolation on the two-leaf tree: {tree_report!r}")

    print("smoke test passed")


if __name__ == "__main__":
    main()

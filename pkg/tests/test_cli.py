"""End-to-end runs of the command-line tool in subprocesses."""

import csv
import json
import subprocess
import sys

import pytest

from discrete_almgren.generators import gen_lattice
from discrete_almgren.graph import load_graph_json


def run(*args, cwd=None, ok=True):
    proc = subprocess.run([sys.executable, "-m", "discrete_almgren", *map(str, args)],
                          capture_output=True, text=True, cwd=cwd)
    if ok:
        assert proc.returncode == 0, proc.stderr
    return proc


def summary(proc):
    lines = proc.stdout.strip().splitlines()
    assert len(lines) == 1
    return json.loads(lines[0])


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_tree_example(tmp_path):
    out = tmp_path / "tree.csv"
    s = summary(run("tree-example", "--depth", 8, "-o", out))
    assert s["pass"] is True and s["horizon"] == 6 and s["closed_form_max_error"] == 0.0
    rows = read_csv(out)
    assert [float(r["N_k"]) for r in rows[:4]] == [2.0, 5.0, 6.5, 7.25]
    assert rows[0]["dN_k"] == ""


def test_tree_example_doubling():
    s = summary(run("tree-example", "--depth", 8, "-a", 1, "-b", 3))
    d = s["doubling"]
    assert d["lhs"] == 56.25 and d["lower_bound"] == 19.0
    assert d["classification"] == "Expansive" and s["pass"]


def test_lattice_constant_pipeline(tmp_path):
    g_path, b_path, f_path, n_path = (tmp_path / n for n in ("g.json", "b.json", "f.json", "n.csv"))
    assert summary(run("gen", "lattice", "--dim", 2, "--radius", 6, "-o", g_path))["vertex_count"] == 85
    g = load_graph_json(g_path)
    outer = [i for i, lab in g.labels.items() if sum(abs(int(c)) for c in lab.split(",")) == 6]
    b_path.write_text(json.dumps({str(v): 3.0 for v in outer}))
    s = summary(run("solve", "--graph", g_path, "--boundary", b_path, "--tol", "1e-12", "-o", f_path))
    assert s["max_residual"] <= 1e-11
    s = summary(run("freq", "--graph", g_path, "--field", f_path, "-o", n_path))
    assert s["pass"] and s["horizon"] == 4
    assert all(abs(float(r["N_k"])) <= 1e-9 for r in read_csv(n_path))
    s = summary(run("verify", "--graph", g_path, "--field", f_path))
    assert s["pass"] is True and s["flow_balance_error"] <= 1e-12


def test_cube_energy(tmp_path):
    out = tmp_path / "e.csv"
    s = summary(run("cube-energy", "--dim", 2, "--poly", "1*x^1*y^1", "--tmin", 0.25, "--tmax", 4,
                    "--steps", 64, "-o", out))
    assert s["pass"] and s["harmonic"] and s["max_decomposition_gap"] < 1e-6
    rows = read_csv(out)
    assert len(rows) == 64
    for r in rows:
        t = float(r["t"])
        assert float(r["E"]) == pytest.approx(8 * t ** 5 / 3, rel=1e-12)
        if r["second_diff"]:
            assert float(r["second_diff"]) >= 0


def test_cube_energy_hits_unit_time(tmp_path):
    out = tmp_path / "e.csv"
    run("cube-energy", "--poly", "x*y", "--tmin", 0.25, "--tmax", 4, "--steps", 61, "-o", out)
    row = [r for r in read_csv(out) if float(r["t"]) == 1.0][0]
    assert float(row["E"]) == pytest.approx(8 / 3, rel=1e-14)


def test_cube_energy_rejects_nonharmonic():
    p = run("cube-energy", "--poly", "x^2", ok=False)
    assert p.returncode == 1 and "NotHarmonic" in p.stderr
    s = summary(run("cube-energy", "--poly", "x^2", "--allow-nonharmonic"))
    assert s["harmonic"] is False


@pytest.mark.parametrize("args", [
    ("tree-example", "--depth", 9),
    ("cube-energy", "--dim", 3, "--poly", "x*y*z", "--steps", 16),
    ("gen", "random", "--vertices", 25, "--seed", 4),
])
def test_byte_identical_reruns(tmp_path, args):
    outs = []
    for name in ("a", "b"):
        path = tmp_path / name
        proc = run(*args, "-o", path)
        outs.append((path.read_bytes(), proc.stdout.replace(str(path), "")))
    assert outs[0] == outs[1]


def test_suites_from_cli():
    s = summary(run("verify", "--suite", "stars", "--count", 200, "--seed", 3))
    assert s["pass"] and s["violations"] == 0 and s["count"] == 200
    s = summary(run("verify", "--suite", "random", "--count", 20, "--seed", 1))
    assert s["pass"] and s["max_residual"] <= 1e-12


def test_doubling_command(tmp_path):
    g, _ = gen_lattice(2, 4)
    from discrete_almgren.graph import save_graph_json
    from discrete_almgren.harmonic import lattice_polynomial_field, save_field_json
    from discrete_almgren.polynomial import parse_polynomial
    save_graph_json(g, tmp_path / "g.json")
    save_field_json(lattice_polynomial_field(g, parse_polynomial("x", 2)), tmp_path / "f.json")
    s = summary(run("doubling", "--graph", tmp_path / "g.json", "--field", tmp_path / "f.json",
                    "-a", 0, "-b", 2, "-o", tmp_path / "d.json"))
    assert s["pass"] and s["classification"] in ("Expansive", "Both", "Contractive", "Neither")
    assert json.loads((tmp_path / "d.json").read_text())["a"] == 0
    p = run("doubling", "--graph", tmp_path / "g.json", "--field", tmp_path / "f.json",
            "-a", 0, "-b", 9, ok=False)
    assert p.returncode == 1 and "-a/-b" in p.stderr


def test_gen_edgelist(tmp_path):
    src = tmp_path / "e.txt"
    src.write_text("0 1 2.5\n# note\n1 2 0.5\n")
    s = summary(run("gen", "edgelist", "--input", src, "-o", tmp_path / "g.json"))
    assert s["vertex_count"] == 3 and s["edge_count"] == 2


def test_parse_error_names_file_and_line(tmp_path):
    src = tmp_path / "e.txt"
    src.write_text("0 1\n1 2 x\n")
    p = run("gen", "edgelist", "--input", src, "-o", tmp_path / "g.json", ok=False)
    assert p.returncode == 1
    lines = p.stderr.strip().splitlines()
    assert len(lines) == 1 and "--input" in lines[0] and "line 2" in lines[0]


def test_missing_input_file(tmp_path):
    p = run("freq", "--graph", tmp_path / "nope.json", "--field", tmp_path / "f.json", ok=False)
    assert p.returncode == 1 and "--graph" in p.stderr and len(p.stderr.strip().splitlines()) == 1


def test_bad_boundary_json(tmp_path):
    run("gen", "tree", "--depth", 2, "-o", tmp_path / "g.json")
    (tmp_path / "b.json").write_text("{oops")
    p = run("solve", "--graph", tmp_path / "g.json", "--boundary", tmp_path / "b.json",
            "-o", tmp_path / "f.json", ok=False)
    assert p.returncode == 1 and "--boundary" in p.stderr and "line 1" in p.stderr


def test_output_must_differ_from_input(tmp_path):
    g = tmp_path / "g.json"
    run("gen", "tree", "--depth", 2, "-o", g)
    (tmp_path / "b.json").write_text('{"0": 1.0}')
    p = run("solve", "--graph", g, "--boundary", tmp_path / "b.json", "-o", g, ok=False)
    assert p.returncode == 1 and "-o" in p.stderr


def test_bad_polynomial():
    p = run("cube-energy", "--poly", "x^^2", ok=False)
    assert p.returncode == 1 and "--poly" in p.stderr


def test_usage_error():
    p = run("tree-example", "--depth", "deep", ok=False)
    assert p.returncode == 2


def test_failed_check_exit_code(tmp_path):
    # a field that is not harmonic but claims to be fails monotonicity
    (tmp_path / "g.txt").write_text("0 1\n1 2\n2 3\n3 4\n")
    vals = {"0": 0.0, "1": 5.0, "2": 0.0, "3": 0.0, "4": 0.0}
    (tmp_path / "f.json").write_text(json.dumps({"values": vals, "interior": [0, 1, 2, 3, 4]}))
    p = run("verify", "--graph", tmp_path / "g.txt", "--field", tmp_path / "f.json", ok=False)
    assert p.returncode == 3 and summary(p)["pass"] is False


def test_version():
    assert run("--version").stdout.startswith("discrete-almgren ")

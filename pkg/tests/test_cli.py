import json
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "surface_ising.cli"]


def run_cli(*args, expect=0):
    proc = subprocess.run(
        CLI + list(args), capture_output=True, text=True, timeout=300
    )
    assert proc.returncode == expect, proc.stderr + proc.stdout
    return proc.stdout


def test_gen_torus(tmp_path):
    out = run_cli("gen", "torus_lattice", "2", "2")
    data = json.loads(out)
    assert data["schema"] == 1
    assert len(data["vertices"]) == 4 and len(data["edges"]) == 8
    assert sum(1 for e in data["edges"] if e["crossings"]) == 4


def test_gen_writes_file_and_verify(tmp_path):
    path = tmp_path / "torus.json"
    run_cli("gen", "torus_lattice", "2", "2", "-o", str(path))
    report = run_cli("verify", str(path))
    assert "validate: ok" in report
    assert "sign-law: ok" in report
    assert "triple-agreement: ok" in report


def test_verify_all_families(tmp_path):
    for family, m, n in [
        ("torus_lattice", 1, 1),
        ("klein_lattice", 1, 1),
        ("rp2_wheel", 4, 2),
        ("planar_grid", 2, 2),
    ]:
        path = tmp_path / f"{family}.json"
        run_cli("gen", family, str(m), str(n), "-o", str(path))
        run_cli("verify", str(path))


def test_verify_corrupted_orientation(tmp_path):
    path = tmp_path / "t.json"
    run_cli("gen", "torus_lattice", "2", "2", "-o", str(path))
    # construct the good orientation, corrupt one short edge, feed it back
    from surface_ising.embedding import load_json
    from surface_ising.orientation import construct_good, serialize
    from surface_ising.terminal import SHORT, build_terminal

    g = load_json(path.read_text())
    gt = build_terminal(g)
    K = construct_good(gt)
    tid = next(t.id for t in gt.tedges if t.kind == SHORT)
    K[tid] ^= 1
    kpath = tmp_path / "orientation.json"
    kpath.write_text(json.dumps(serialize(K)))
    out = subprocess.run(
        CLI + ["verify", str(path), "--orientation", str(kpath)],
        capture_output=True,
        text=True,
    )
    assert out.returncode == 1
    assert "check-orientation: FAIL" in out.stdout


def test_verify_oversized_skips_oracle(tmp_path):
    path = tmp_path / "big.json"
    run_cli("gen", "torus_lattice", "4", "4", "--wx", "1/2", "--wy", "1/3", "-o", str(path))
    report = run_cli("verify", str(path))
    assert "skipped: bound" in report


def test_compute_methods_and_determinism(tmp_path):
    path = tmp_path / "k.json"
    run_cli("gen", "klein_lattice", "2", "1", "--wx", "1/2", "--wy", "1/3", "-o", str(path))
    outs = {}
    for method in ("practical", "general", "bruteforce"):
        outs[method] = run_cli("compute", str(path), "--method", method)
    assert outs["practical"] == outs["general"] == outs["bruteforce"]
    again = run_cli("compute", str(path), "--method", "practical")
    assert again == outs["practical"]
    numeric = run_cli("--json", "compute", str(path), "--mode", "numeric")
    rec = json.loads(numeric)
    exact = run_cli("--json", "compute", str(path))
    val = float(rec["value"])
    # exact record prints the rational; eval and compare
    from fractions import Fraction

    ref = float(Fraction(json.loads(exact)["value"]))
    assert abs(val - ref) < 1e-9 * ref


def test_compute_boltzmann(tmp_path):
    import math

    path = tmp_path / "t.json"
    run_cli("gen", "torus_lattice", "1", "1", "--wx", "1", "--wy", "1", "-o", str(path))
    out = run_cli("--json", "compute", str(path), "--beta", "0.8")
    val = json.loads(out)["value"]
    assert abs(val - 2 * math.exp(1.6)) < 1e-8


def test_pfaffians_table(tmp_path):
    path = tmp_path / "t.json"
    run_cli("gen", "torus_lattice", "1", "1", "-o", str(path))
    out = run_cli("--json", "pfaffians", str(path))
    rows = json.loads(out)["table"]
    assert len(rows) == 4
    values = {r["pfaffian"] for r in rows}
    assert values == {
        "-1 + x + y + x*y",
        "1 - x + y + x*y",
        "1 + x - y + x*y",
        "-1 - x - y + x*y",
    }
    assert out == run_cli("--json", "pfaffians", str(path))


def test_threads_env(tmp_path, monkeypatch):
    path = tmp_path / "t.json"
    run_cli("gen", "torus_lattice", "2", "2", "--wx", "1/2", "--wy", "1/2", "-o", str(path))
    proc = subprocess.run(
        CLI + ["compute", str(path), "--mode", "numeric"],
        capture_output=True,
        text=True,
        env={"SURFACE_ISING_THREADS": "2", "PATH": "/usr/bin:/bin"},
    )
    assert proc.returncode == 0

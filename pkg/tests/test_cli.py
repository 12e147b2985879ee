from __future__ import annotations

import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from equitensor.cli import main, parse_n_list
from equitensor.functor import DenseTensor, GroupSpec, functor_matrix
from equitensor.setpartition import make_partition
from equitensor.weightmatrix import WeightMatrix

from faults import FAULTS


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write_weights(path, w: WeightMatrix):
    path.write_text(json.dumps(w.to_dict()))
    return str(path)


def write_tensor(path, t: DenseTensor):
    path.write_text(json.dumps(t.to_dict()))
    return str(path)


# -- enumerate ---------------------------------------------------------------------


def test_enumerate_counts(capsys, tmp_path):
    out = tmp_path / "o.jsonl"
    code, text, _ = run(capsys, "enumerate", "--group", "o", "--k", "2", "--l", "2", "--n", "3", "--out", str(out))
    assert code == 0 and "count: 3" in text and "closed_form: 3" in text
    lines = out.read_text().splitlines()
    assert len(lines) == 3 and json.loads(lines[0])["kind"] == "brauer"
    code, text, _ = run(capsys, "enumerate", "--group", "sn", "--k", "1", "--l", "1", "--n", "2")
    assert code == 0 and "count: 2" in text


def test_enumerate_odd_total_is_empty(capsys):
    code, text, _ = run(capsys, "enumerate", "--group", "o", "--k", "2", "--l", "1", "--n", "3")
    assert code == 0 and "count: 0" in text


@pytest.mark.parametrize(
    "argv",
    [
        ["enumerate", "--group", "sp", "--k", "1", "--l", "1", "--n", "3"],
        ["enumerate", "--group", "o", "--k", "-1", "--l", "1", "--n", "3"],
        ["enumerate", "--group", "o", "--k", "1", "--l", "1", "--n", "0"],
    ],
)
def test_enumerate_bad_parameters(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["enumerate", "--group", "xx", "--k", "1", "--l", "1", "--n", "2"])
    assert exc.value.code == 2


# -- apply ---------------------------------------------------------------------------


def test_apply_identity(capsys, tmp_path):
    w = WeightMatrix(GroupSpec("o", 3), 2, 2, [(1.0, make_partition(2, 2, [[1, 3], [2, 4]]).with_kind("brauer"))])
    v = DenseTensor(2, 3, np.arange(9.0))
    out = tmp_path / "out.json"
    code, text, _ = run(
        capsys, "apply", "--weights", write_weights(tmp_path / "w.json", w),
        "--tensor", write_tensor(tmp_path / "v.json", v), "--mode", "both", "--out", str(out),
    )
    rec = json.loads(out.read_text())
    assert code == 0 and rec["data"] == v.flat.tolist() and rec["max_abs_diff"] == 0.0


def test_apply_worked_example(capsys, tmp_path):
    d = make_partition(5, 4, [[1, 8], [2, 3, 7], [4], [5, 6, 9]])
    group = GroupSpec("sn", 3)
    w = WeightMatrix(group, 5, 4, [(1.0, d)])
    v = DenseTensor(5, 3, np.random.default_rng(0).standard_normal((3,) * 5))
    out = tmp_path / "out.json"
    code, text, _ = run(
        capsys, "apply", "--weights", write_weights(tmp_path / "w.json", w),
        "--tensor", write_tensor(tmp_path / "v.json", v), "--mode", "both", "--out", str(out),
    )
    rec = json.loads(out.read_text())
    assert code == 0 and rec["max_abs_diff"] <= 1e-10
    assert np.allclose(rec["data"], functor_matrix(group, d).entries @ v.flat, atol=1e-12)


def test_apply_binary_tensor(capsys, tmp_path):
    w = WeightMatrix(GroupSpec("sn", 2), 1, 1, [(3.0, make_partition(1, 1, [[1], [2]]))])
    vb = tmp_path / "v.bin"
    vb.write_bytes(DenseTensor(1, 2, np.array([1.0, 2.0])).to_bytes())
    out = tmp_path / "o.bin"
    code, _, _ = run(capsys, "apply", "--weights", write_weights(tmp_path / "w.json", w), "--tensor", str(vb), "--out", str(out))
    assert code == 0 and np.frombuffer(out.read_bytes(), "<f8").tolist() == [9.0, 9.0]


def test_apply_order_mismatch(capsys, tmp_path):
    w = WeightMatrix(GroupSpec("o", 3), 2, 2, [])
    v = DenseTensor(3, 3, np.zeros(27))
    code, _, err = run(
        capsys, "apply", "--weights", write_weights(tmp_path / "w.json", w), "--tensor", write_tensor(tmp_path / "v.json", v)
    )
    assert code == 2 and "order" in err


def test_apply_unreadable_inputs(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, _ = run(capsys, "apply", "--weights", str(bad), "--tensor", str(bad))
    assert code == 2
    w = WeightMatrix(GroupSpec("o", 3), 1, 1, [])
    code, _, _ = run(capsys, "apply", "--weights", write_weights(tmp_path / "w.json", w), "--tensor", str(tmp_path / "missing.json"))
    assert code == 2


def test_apply_detects_disagreement(capsys, tmp_path, monkeypatch):
    from equitensor import fastmult

    monkeypatch.setattr(fastmult, "epsilon_pairing", lambda n: (np.arange(n) ^ 1, -np.where(np.arange(n) % 2 == 0, 1.0, -1.0)))
    code, _, _ = run(capsys, "init", "--group", "sp", "--k", "2", "--l", "0", "--n", "2", "--out", str(tmp_path / "w.json"))
    code, _, _ = run(capsys, "tensor", "--order", "2", "--n", "2", "--seed", "1", "--out", str(tmp_path / "v.json"))
    code, text, _ = run(capsys, "apply", "--weights", str(tmp_path / "w.json"), "--tensor", str(tmp_path / "v.json"), "--mode", "both")
    assert code == 1


# -- verify ----------------------------------------------------------------------------


@pytest.mark.parametrize("group", ["sn", "o", "so", "sp"])
def test_verify_clean(capsys, group):
    code, text, _ = run(capsys, "verify", "--group", group, "--max-total", "4")
    assert code == 0 and "ALL PASS" in text and "FAIL" not in text.replace("FAILURES", "")


def test_verify_rejects_odd_symplectic(capsys):
    code, _, err = run(capsys, "verify", "--group", "sp", "--n-list", "2,3")
    assert code == 2 and "even" in err


@pytest.mark.parametrize("name", sorted(FAULTS))
def test_verify_catches_faults(capsys, monkeypatch, name):
    group, install = FAULTS[name]
    install(monkeypatch)
    code, text, _ = run(capsys, "verify", "--group", group, "--max-total", "4")
    assert code == 1 and "FAILURES" in text


# -- bench --------------------------------------------------------------------------------


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_bench_orthogonal_slopes(capsys, tmp_path):
    out = tmp_path / "b.csv"
    code, _, _ = run(capsys, "bench", "--group", "o", "--k", "2", "--l", "2", "--n-list", "2..8", "--repeats", "1", "--out", str(out))
    rows = read_csv(out)
    assert code == 0 and len(rows) == 3 * 7
    for r in rows:
        assert int(r["naive_mults"]) == int(r["n"]) ** 4
        assert r["fast_mults"] == r["predicted_mults"]
    pair_rows = [r for r in rows if r["diagram"] == "B(k=2,l=2){1, 2 | 3, 4}"]
    assert abs(float(pair_rows[0]["mult_slope"]) - 1.0) <= 0.1
    wires = [r for r in rows if r["diagram"] != "B(k=2,l=2){1, 2 | 3, 4}"]
    assert all(int(r["fast_mults"]) == 0 for r in wires)
    assert all(r["mult_slope"] == "" for r in wires)


def test_bench_bad_n_list(capsys):
    code, _, _ = run(capsys, "bench", "--group", "o", "--k", "2", "--l", "2", "--n-list", "2,x")
    assert code == 2


def test_parse_n_list():
    assert parse_n_list("2..4,7") == [2, 3, 4, 7]


# -- determinism ----------------------------------------------------------------------------


def test_commands_are_deterministic(capsys, tmp_path):
    def outputs(tag):
        d = tmp_path / tag
        d.mkdir()
        run(capsys, "enumerate", "--group", "sn", "--k", "2", "--l", "2", "--n", "3", "--out", str(d / "e.jsonl"))
        run(capsys, "init", "--group", "so", "--k", "2", "--l", "2", "--n", "2", "--seed", "5", "--out", str(d / "w.json"))
        run(capsys, "tensor", "--order", "2", "--n", "2", "--seed", "9", "--out", str(d / "v.json"))
        run(capsys, "apply", "--weights", str(d / "w.json"), "--tensor", str(d / "v.json"), "--parallel", "--out", str(d / "o.json"))
        run(capsys, "bench", "--group", "sn", "--k", "2", "--l", "1", "--n-list", "2..4", "--no-timing", "--out", str(d / "b.csv"))
        return {p.name: p.read_bytes() for p in sorted(d.iterdir())}

    assert outputs("a") == outputs("b")


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "equitensor.cli", "enumerate", "--group", "so", "--k", "1", "--l", "1", "--n", "2"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and "count: 2" in proc.stdout

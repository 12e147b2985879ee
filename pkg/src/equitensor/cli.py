"""Command-line interface: enumerate, init, tensor, apply, verify, bench.

Exit codes: 0 success, 1 verification failure, 2 bad parameters or unreadable input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import fastmult
from .errors import EquitensorError
from .functor import DenseTensor, Family, GroupSpec, functor_matrix
from .verify import SUITES, run_all
from .weightmatrix import WeightMatrix, init_weights, materialize, spanning_set, spanning_set_size

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
APPLY_TOLERANCE = 1e-8

BENCH_FIELDS = [
    "group",
    "k",
    "l",
    "n",
    "diagram_id",
    "diagram",
    "fast_mults",
    "fast_adds",
    "predicted_mults",
    "predicted_adds",
    "naive_mults",
    "wall_time_ns_fast",
    "wall_time_ns_naive",
    "mult_slope",
]


class UsageError(Exception):
    pass


def parse_n_list(text: str) -> list[int]:
    """Accept ``2,3,4`` or ``2..8`` (inclusive), or a mix such as ``2,4..6``."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                lo, hi = part.split("..")
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
        except ValueError as exc:
            raise UsageError(f"cannot parse n list {text!r}") from exc
    if not out:
        raise UsageError("empty n list")
    return out


def _group(family: str, n: int) -> GroupSpec:
    try:
        return GroupSpec(family, n)
    except (ValueError, EquitensorError) as exc:
        raise UsageError(str(exc)) from exc


def _check_orders(k: int, l: int) -> None:
    if k < 0 or l < 0:
        raise UsageError("k and l must be non-negative")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_enumerate(args) -> int:
    _check_orders(args.k, args.l)
    group = _group(args.group, args.n)
    diagrams = spanning_set(group, args.k, args.l)
    expected = spanning_set_size(group, args.k, args.l)
    if args.out:
        Path(args.out).write_text("".join(json.dumps(d.to_dict()) + "\n" for d in diagrams))
    print(f"count: {len(diagrams)}")
    print(f"closed_form: {expected}")
    return EXIT_OK if len(diagrams) == expected else EXIT_FAIL


def cmd_init(args) -> int:
    _check_orders(args.k, args.l)
    group = _group(args.group, args.n)
    diagrams = spanning_set(group, args.k, args.l)
    w = init_weights(
        diagrams, group, args.scheme, constant=args.constant, low=args.low, high=args.high,
        seed=args.seed, k=args.k, l=args.l,
    )
    _emit(json.dumps(w.to_dict(), indent=1) + "\n", args.out)
    return EXIT_OK


def cmd_tensor(args) -> int:
    if args.order < 0 or args.n < 1:
        raise UsageError("order must be >= 0 and n >= 1")
    rng = np.random.default_rng(args.seed)
    shape = (args.n,) * args.order
    if args.integer:
        data = rng.integers(-5, 6, size=shape).astype(np.float64)
    else:
        data = rng.standard_normal(shape)
    t = DenseTensor(args.order, args.n, data)
    if args.out and args.out.endswith(".bin"):
        Path(args.out).write_bytes(t.to_bytes())
    else:
        _emit(json.dumps(t.to_dict()) + "\n", args.out)
    return EXIT_OK


def _load_weights(path: str) -> WeightMatrix:
    try:
        return WeightMatrix.from_dict(json.loads(Path(path).read_text()))
    except (OSError, ValueError, EquitensorError) as exc:
        raise UsageError(f"cannot read weights from {path}: {exc}") from exc


def _load_tensor(path: str, order: int, dim: int) -> DenseTensor:
    try:
        if path.endswith(".bin"):
            return DenseTensor.from_bytes(Path(path).read_bytes(), order, dim)
        return DenseTensor.from_dict(json.loads(Path(path).read_text()))
    except (OSError, ValueError, EquitensorError) as exc:
        raise UsageError(f"cannot read tensor from {path}: {exc}") from exc


def cmd_apply(args) -> int:
    w = _load_weights(args.weights)
    v = _load_tensor(args.tensor, w.k, w.group.n)
    if v.order != w.k or v.dim != w.group.n:
        raise UsageError(f"tensor has order {v.order}, dim {v.dim}; weights expect order {w.k}, dim {w.group.n}")
    fast = naive = None
    if args.mode in ("fast", "both"):
        fast = fastmult.apply_weight_matrix(w, v, parallel=args.parallel)
    if args.mode in ("naive", "both"):
        naive = DenseTensor(w.l, w.group.n, materialize(w).entries @ v.flat)
    result = fast if fast is not None else naive
    record = result.to_dict()
    status = EXIT_OK
    if args.mode == "both":
        diff = float(np.max(np.abs(fast.flat - naive.flat))) if fast.flat.size else 0.0
        record["max_abs_diff"] = diff
        print(f"max_abs_diff: {diff:.3e}")
        if not diff <= APPLY_TOLERANCE:
            status = EXIT_FAIL
    if args.out and args.out.endswith(".bin"):
        Path(args.out).write_bytes(result.to_bytes())
    else:
        _emit(json.dumps(record) + "\n", args.out)
    return status


def cmd_verify(args) -> int:
    n_list = parse_n_list(args.n_list) if args.n_list else ([2, 4] if args.group == "sp" else [2, 3, 4])
    for n in n_list:
        _group(args.group, n)
    if args.max_total < 0:
        raise UsageError("max-total must be non-negative")
    suites = args.suites.split(",") if args.suites else None
    if suites and any(s not in SUITES for s in suites):
        raise UsageError(f"unknown suite; choose from {', '.join(SUITES)}")
    report = run_all(args.group, args.max_total, n_list, args.seed, suites)
    print(f"group {args.group}, l+k <= {args.max_total}, seed {args.seed}")
    print(report.table())
    for r in report.results:
        for msg in r.failures[:5]:
            print(f"  {r.name} n={r.n}: {msg}")
    print("ALL PASS" if report.ok else "FAILURES")
    return EXIT_OK if report.ok else EXIT_FAIL


def _slope(ns: list[int], counts: list[int]) -> float | None:
    pts = [(math.log(n), math.log(c)) for n, c in zip(ns, counts) if c > 0]
    if len(pts) < 2 or len(pts) != len(ns):
        return None
    x, y = np.array(pts).T
    return float(np.polyfit(x, y, 1)[0])


def bench_records(family: str, k: int, l: int, n_list: list[int], repeats: int, seed: int, timing: bool = True):
    rows = []
    per_diagram: dict[str, list[tuple[int, int]]] = {}
    for n in n_list:
        group = _group(family, n)
        rng = np.random.default_rng([seed, n])
        v = rng.standard_normal((n,) * k)
        for idx, d in enumerate(spanning_set(group, k, l)):
            out, counter = fastmult.matrix_mult(group, d, v)
            predicted = fastmult.predicted_counts(group, fastmult.factor(group, d).planar)
            t_fast = t_naive = ""
            if timing:
                m = functor_matrix(group, d).entries
                t_fast = min(_timed(lambda: fastmult.matrix_mult(group, d, v)) for _ in range(repeats))
                t_naive = min(_timed(lambda: m @ v.reshape(-1)) for _ in range(repeats))
            key = str(d)
            per_diagram.setdefault(key, []).append((n, counter.multiplications))
            rows.append({
                "group": family,
                "k": k,
                "l": l,
                "n": n,
                "diagram_id": idx,
                "diagram": key,
                "fast_mults": counter.multiplications,
                "fast_adds": counter.additions,
                "predicted_mults": predicted.multiplications,
                "predicted_adds": predicted.additions,
                "naive_mults": n ** (l + k),
                "wall_time_ns_fast": t_fast,
                "wall_time_ns_naive": t_naive,
            })
    slopes = {}
    for key, pts in per_diagram.items():
        s = _slope([p[0] for p in pts], [p[1] for p in pts]) if len(pts) == len(n_list) else None
        slopes[key] = s
    for row in rows:
        s = slopes[row["diagram"]]
        row["mult_slope"] = "" if s is None else f"{s:.4f}"
    return rows, slopes


def _timed(fn) -> int:
    t0 = time.perf_counter_ns()
    fn()
    return time.perf_counter_ns() - t0


def cmd_bench(args) -> int:
    _check_orders(args.k, args.l)
    if args.repeats < 1:
        raise UsageError("repeats must be >= 1")
    n_list = parse_n_list(args.n_list)
    rows, slopes = bench_records(args.group, args.k, args.l, n_list, args.repeats, args.seed, not args.no_timing)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    _emit(buf.getvalue(), args.out)
    if args.out:
        for key, s in slopes.items():
            print(f"{key}: slope {'n/a' if s is None else f'{s:.3f}'}")
    mismatched = [r for r in rows if r["fast_mults"] != r["predicted_mults"]]
    return EXIT_FAIL if mismatched else EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="equitensor", description="Equivariant tensor layers via diagram factorization.")
    sub = p.add_subparsers(dest="command", required=True)
    groups = [f.value for f in Family]

    e = sub.add_parser("enumerate", help="write the spanning diagrams as JSON lines")
    e.add_argument("--group", choices=groups, required=True)
    e.add_argument("--k", type=int, required=True)
    e.add_argument("--l", type=int, required=True)
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--out")
    e.set_defaults(func=cmd_enumerate)

    i = sub.add_parser("init", help="write a weight matrix over the full spanning set")
    i.add_argument("--group", choices=groups, required=True)
    i.add_argument("--k", type=int, required=True)
    i.add_argument("--l", type=int, required=True)
    i.add_argument("--n", type=int, required=True)
    i.add_argument("--scheme", choices=["zeros", "constant", "uniform"], default="uniform")
    i.add_argument("--constant", type=float, default=1.0)
    i.add_argument("--low", type=float, default=-1.0)
    i.add_argument("--high", type=float, default=1.0)
    i.add_argument("--seed", type=int, default=0)
    i.add_argument("--out")
    i.set_defaults(func=cmd_init)

    t = sub.add_parser("tensor", help="write a seeded random tensor")
    t.add_argument("--order", type=int, required=True)
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--integer", action="store_true", help="small integer entries")
    t.add_argument("--out")
    t.set_defaults(func=cmd_tensor)

    a = sub.add_parser("apply", help="apply a weight matrix to a tensor")
    a.add_argument("--weights", required=True)
    a.add_argument("--tensor", required=True)
    a.add_argument("--mode", choices=["fast", "naive", "both"], default="fast")
    a.add_argument("--parallel", action="store_true")
    a.add_argument("--out")
    a.set_defaults(func=cmd_apply)

    v = sub.add_parser("verify", help="compare the fast path with the dense oracle")
    v.add_argument("--group", choices=groups, required=True)
    v.add_argument("--max-total", type=int, default=6)
    v.add_argument("--n-list", default=None, help="e.g. 2,3,4 (default: 2,3,4; 2,4 for sp)")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--suites", default=None, help=f"comma-separated subset of {','.join(SUITES)}")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="operation counts and timings per spanning diagram")
    b.add_argument("--group", choices=groups, required=True)
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--l", type=int, required=True)
    b.add_argument("--n-list", default="2..8")
    b.add_argument("--repeats", type=int, default=3)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--no-timing", action="store_true", help="leave wall-time columns empty")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EquitensorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

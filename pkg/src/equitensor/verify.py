"""Self-check suites comparing the fast path with the dense oracle.

Each suite returns a ``SuiteResult``; ``run_all`` collects them into a grid of
(suite, n) cells that the ``verify`` command prints.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from . import fastmult
from .category import compose, tensor
from .functor import Family, GroupSpec, equivariance_residual, functor_matrix, sample_group_element
from .setpartition import Diagram, Kind, is_algorithmically_planar
from .weightmatrix import spanning_set, spanning_set_size

__all__ = [
    "SuiteResult",
    "VerifyReport",
    "diagrams_up_to",
    "check_oracle",
    "check_factoring",
    "check_counts",
    "check_functoriality",
    "check_monoidality",
    "check_equivariance",
    "check_cardinality",
    "run_all",
    "SUITES",
]


@dataclass
class SuiteResult:
    name: str
    n: int
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, message: str) -> None:
        self.failures.append(message)


@dataclass
class VerifyReport:
    group: GroupSpec | None
    results: list[SuiteResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def table(self) -> str:
        ns = sorted({r.n for r in self.results})
        names = list(dict.fromkeys(r.name for r in self.results))
        cell = {(r.name, r.n): r for r in self.results}
        width = max(len(s) for s in names) if names else 5
        lines = [" " * width + "".join(f"  n={n:<5}" for n in ns)]
        for name in names:
            row = name.ljust(width)
            for n in ns:
                r = cell.get((name, n))
                mark = "-" if r is None else ("pass" if r.ok else "FAIL")
                row += f"  {mark:<7}"
            lines.append(row)
        return "\n".join(lines)


@functools.lru_cache(maxsize=None)
def _spanning(family: Family, n: int, k: int, l: int) -> tuple[Diagram, ...]:
    return tuple(spanning_set(GroupSpec(family, n), k, l))


def diagrams_up_to(group: GroupSpec, max_total: int):
    """All spanning diagrams with l + k <= max_total, grouped by (k, l)."""
    for total in range(max_total + 1):
        for k in range(total + 1):
            yield from _spanning(group.family, group.n, k, total - k)


def check_cardinality(group: GroupSpec, max_total: int, rng=None) -> SuiteResult:
    res = SuiteResult("cardinality", group.n)
    for total in range(max_total + 1):
        for k in range(total + 1):
            got = len(_spanning(group.family, group.n, k, total - k))
            want = spanning_set_size(group, k, total - k)
            res.checked += 1
            if got != want:
                res.fail(f"(k={k}, l={total - k}): enumerated {got}, closed form {want}")
    return res


def check_oracle(group: GroupSpec, max_total: int, rng: np.random.Generator, trials: int = 2) -> SuiteResult:
    """Fast path equals dense matrix times vector: exactly on integer input, to 1e-10 on floats."""
    res = SuiteResult("oracle", group.n)
    n = group.n
    for d in diagrams_up_to(group, max_total):
        m = functor_matrix(group, d).entries
        for t in range(trials):
            if t % 2 == 0:
                v = rng.integers(-5, 6, size=(n,) * d.k).astype(np.float64)
            else:
                v = rng.standard_normal((n,) * d.k)
            got, _ = fastmult.matrix_mult(group, d, v)
            want = m @ v.reshape(-1)
            err = float(np.max(np.abs(got.flat - want))) if want.size else 0.0
            res.checked += 1
            if (t % 2 == 0 and err != 0.0) or err > 1e-10:
                res.fail(f"{d}: max deviation {err:.3g}")
                break
    return res


def check_factoring(group: GroupSpec, max_total: int, rng=None) -> SuiteResult:
    res = SuiteResult("factoring", group.n)
    for d in diagrams_up_to(group, max_total):
        f = fastmult.factor(group, d)
        back = f.recompose()
        res.checked += 1
        if back.c != 0 or back.diagram != d:
            res.fail(f"{d}: recomposed to n^{back.c} {back.diagram}")
        elif not is_algorithmically_planar(f.planar):
            res.fail(f"{d}: middle factor {f.planar} is not planar")
    return res


def check_counts(group: GroupSpec, max_total: int, rng: np.random.Generator) -> SuiteResult:
    res = SuiteResult("counts", group.n)
    n = group.n
    for d in diagrams_up_to(group, max_total):
        v = rng.standard_normal((n,) * d.k)
        _, counter = fastmult.matrix_mult(group, d, v)
        predicted = fastmult.predicted_counts(group, fastmult.factor(group, d).planar)
        res.checked += 1
        if counter.as_tuple() != predicted.as_tuple():
            res.fail(f"{d}: counted {counter.as_tuple()}, predicted {predicted.as_tuple()}")
    return res


def _pool(group: GroupSpec, max_total: int, brauer_only: bool) -> dict[tuple[int, int], list[Diagram]]:
    out: dict[tuple[int, int], list[Diagram]] = {}
    for d in diagrams_up_to(group, max_total):
        if brauer_only and d.kind is Kind.BRAUER_GROOD:
            continue
        out.setdefault((d.k, d.l), []).append(d)
    return out


def _pick(rng: np.random.Generator, items):
    return items[int(rng.integers(len(items)))]


def check_functoriality(group: GroupSpec, max_total: int, rng: np.random.Generator, pairs: int = 60) -> SuiteResult:
    """F(g o f) against the matrix product F(g) F(f) with the n^c factor.

    For Sp(n) the identity holds up to a global sign per pair, since the
    epsilon on same-row pairs is antisymmetric; see ``sign_tolerant``.
    """
    res = SuiteResult("functoriality", group.n)
    pool = _pool(group, min(max_total, 6), brauer_only=True)
    shapes = list(pool)
    sign_tolerant = group.family is Family.SYMPLECTIC
    n = group.n
    attempts = 0
    while res.checked < pairs and attempts < 50 * pairs:
        attempts += 1
        k1, mid = _pick(rng, shapes)
        uppers = [s for s in shapes if s[0] == mid]
        if not uppers:
            continue
        f = _pick(rng, pool[(k1, mid)])
        g = _pick(rng, pool[_pick(rng, uppers)])
        sd = compose(g, f)
        lhs = (n**sd.c) * functor_matrix(group, sd.diagram).entries
        rhs = functor_matrix(group, g).entries @ functor_matrix(group, f).entries
        res.checked += 1
        ok = np.array_equal(lhs, rhs) or (sign_tolerant and np.array_equal(lhs, -rhs))
        if not ok:
            res.fail(f"{g} o {f}")
    return res


def check_monoidality(group: GroupSpec, max_total: int, rng: np.random.Generator, pairs: int = 60) -> SuiteResult:
    res = SuiteResult("monoidality", group.n)
    pool = _pool(group, min(max_total, 6), brauer_only=False)
    shapes = list(pool)
    attempts = 0
    while res.checked < pairs and attempts < 50 * pairs:
        attempts += 1
        a = _pick(rng, pool[_pick(rng, shapes)])
        b = _pick(rng, pool[_pick(rng, shapes)])
        if a.total + b.total > 6:
            continue
        if a.kind is Kind.BRAUER_GROOD:
            if b.kind is Kind.BRAUER_GROOD:
                continue
            a, b = b, a
        d = tensor(a, b)
        lhs = functor_matrix(group, d).entries
        rhs = np.kron(functor_matrix(group, a).entries, functor_matrix(group, b).entries)
        res.checked += 1
        if not np.array_equal(lhs, rhs):
            res.fail(f"{a} (x) {b}")
    return res


def check_equivariance(group: GroupSpec, max_total: int, rng: np.random.Generator, samples: int = 5) -> SuiteResult:
    res = SuiteResult("equivariance", group.n)
    seeds = [int(s) for s in rng.integers(0, 2**31, size=samples)]
    elements = [(sample_group_element(group, s), 0.0) for s in seeds]
    if group.family in (Family.ORTHOGONAL, Family.SPECIAL_ORTHOGONAL):
        elements.append((sample_group_element(group, seeds[0], exact=False), 1e-8))
    for d in diagrams_up_to(group, min(max_total, 6)):
        m = functor_matrix(group, d).entries
        res.checked += 1
        for g, tol in elements:
            err = equivariance_residual(m, g, d.k, d.l)
            if err > tol:
                res.fail(f"{d}: residual {err:.3g}")
                break
    return res


SUITES = {
    "cardinality": check_cardinality,
    "oracle": check_oracle,
    "factoring": check_factoring,
    "counts": check_counts,
    "functoriality": check_functoriality,
    "monoidality": check_monoidality,
    "equivariance": check_equivariance,
}


def run_all(group_family: str, max_total: int, n_list, seed: int, suites=None) -> VerifyReport:
    """Run each suite for every n; suites get independent seeded generators."""
    report = VerifyReport(None)
    names = list(suites or SUITES)
    for n in n_list:
        group = GroupSpec(group_family, n)
        report.group = group
        for i, name in enumerate(names):
            rng = np.random.default_rng([seed, n, i])
            report.results.append(SUITES[name](group, max_total, rng))
    return report

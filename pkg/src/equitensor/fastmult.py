"""Fast multiplication of a diagram's functor image with a tensor.

A diagram d is factored as (permutation on top) o (planar diagram) o
(permutation below).  Applying the functor image to v then amounts to

    permute(planar_mult(permute(v, sigma_k)), sigma_l)

where the two permutations only relabel axes and ``planar_mult`` evaluates
the planar diagram stage by stage:

1. (SO(n), free vertices only) contract the trailing bottom free axes against
   the determinant, producing one new axis per top free vertex;
2. contract each bottom-only block, rightmost first;
3. transfer: merge the bottom axes of each cross-row block into one;
4. copy: scatter into the output, duplicating indices for cross-row blocks and
   filling top-only blocks with diagonal (or epsilon-weighted) patterns.

Only stages 1 and 2 perform arithmetic, and only those are counted.
"""

from __future__ import annotations

import functools
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .category import ScaledDiagram, compose, permutation_diagram
from .errors import NotPlanarError, ShapeError
from .functor import DenseTensor, Family, GroupSpec, permutation_sign
from .setpartition import Diagram, Kind, Permutation, SetPartition, is_algorithmically_planar

__all__ = [
    "Factoring",
    "PlanarPlan",
    "OpCounter",
    "factor",
    "permute",
    "plan_of",
    "planar_mult",
    "matrix_mult",
    "predicted_counts",
    "apply_weight_matrix",
    "epsilon_pairing",
    "thread_count",
]

CROSS_ORDERS = ("top", "bottom")


@dataclass
class OpCounter:
    multiplications: int = 0
    additions: int = 0

    def add(self, mults: int, adds: int) -> None:
        self.multiplications += int(mults)
        self.additions += int(adds)

    def __iadd__(self, other: OpCounter) -> OpCounter:
        self.add(other.multiplications, other.additions)
        return self

    def as_tuple(self) -> tuple[int, int]:
        return self.multiplications, self.additions


@dataclass(frozen=True)
class Factoring:
    sigma_k: Permutation
    planar: Diagram
    sigma_l: Permutation

    def recompose(self) -> ScaledDiagram:
        """Rebuild the original diagram as a scaled diagram (exponent 0 expected)."""
        lower = compose(self.planar, permutation_diagram(self.sigma_k))
        upper = compose(permutation_diagram(self.sigma_l), lower.diagram)
        return ScaledDiagram(upper.c + lower.c, upper.diagram)


@dataclass(frozen=True)
class PlanarPlan:
    """Block sizes of a planar diagram, in the order the stages consume them."""

    group: GroupSpec
    k: int
    l: int
    top_blocks: tuple[int, ...]
    cross_blocks: tuple[tuple[int, int], ...]  # (bottom part size, top part size)
    bottom_blocks: tuple[int, ...]  # non-decreasing, left to right
    free_counts: tuple[int, int] | None = None  # (top free s, bottom free n - s)

    def __post_init__(self) -> None:
        s, r = self.free_counts or (0, 0)
        if sum(lo for lo, _ in self.cross_blocks) + sum(self.bottom_blocks) + r != self.k:
            raise ValueError("bottom row sizes do not add up to k")
        if sum(self.top_blocks) + sum(up for _, up in self.cross_blocks) + s != self.l:
            raise ValueError("top row sizes do not add up to l")

    @property
    def has_work(self) -> bool:
        return bool(self.bottom_blocks) or self.free_counts is not None


# ---------------------------------------------------------------------------
# Factor


def _cross_key(d: Diagram, cross_order: str):
    if cross_order == "top":
        return lambda b: d.top_part(b)[0]
    if cross_order == "bottom":
        return lambda b: d.bottom_part(b)[0]
    raise ValueError(f"cross_order must be one of {CROSS_ORDERS}, got {cross_order!r}")


@functools.lru_cache(maxsize=4096)
def _factor_cached(d: Diagram, cross_order: str) -> Factoring:
    top, cross, bottom, tfree, bfree = d.classify()
    cross = sorted(cross, key=_cross_key(d, cross_order))
    l, k = d.l, d.k

    top_seq: list[int] = [v for b in sorted(top) for v in b]
    top_seq += [v for b in cross for v in d.top_part(b)]
    top_seq += tfree
    bottom_seq: list[int] = [v for b in cross for v in d.bottom_part(b)]
    bottom_seq += [v for b in sorted(bottom, key=lambda b: (len(b), b[0])) for v in b]
    bottom_seq += bfree

    # sigma_l(i) = planar top position of original top vertex i
    sl = [0] * l
    for pos, v in enumerate(top_seq, start=1):
        sl[v - 1] = pos
    # sigma_k(p) = original bottom position of the vertex at planar bottom position p
    sk = [v - l for v in bottom_seq]
    sigma_l, sigma_k = Permutation(tuple(sl)), Permutation(tuple(sk))

    bottom_pos = {v: l + p for p, v in enumerate(bottom_seq, start=1)}

    def relabel(v: int) -> int:
        return sigma_l(v) if v <= l else bottom_pos[v]

    blocks = tuple(tuple(relabel(v) for v in b) for b in d.blocks)
    planar = Diagram(d.kind, k, l, SetPartition(k + l, blocks), d.n)
    return Factoring(sigma_k, planar, sigma_l)


def factor(group: GroupSpec, d: Diagram, cross_order: str = "top") -> Factoring:
    """Split ``d`` into sigma_k, an algorithmically planar diagram, and sigma_l.

    Top row of the planar diagram: top-only blocks (by minimum vertex), then
    cross-row blocks, then top free vertices.  Bottom row: cross-row blocks,
    then bottom-only blocks by increasing size (ties by minimum vertex), then
    bottom free vertices.  Vertices keep their relative order inside a block.
    Cross-row blocks are ordered by their leftmost top vertex, or by their
    leftmost bottom vertex with ``cross_order="bottom"``.
    """
    group.check(d)
    return _factor_cached(d, cross_order)


# ---------------------------------------------------------------------------
# Permute


def permute(v: DenseTensor | np.ndarray, sigma: Permutation) -> DenseTensor:
    """Relabel axes: output axis p is input axis sigma(p).  No arithmetic."""
    v = DenseTensor.wrap(v)
    if sigma.degree != v.order:
        raise ShapeError(f"permutation of degree {sigma.degree} applied to an order-{v.order} tensor")
    axes = [s - 1 for s in sigma.images]
    return DenseTensor(v.order, v.dim, np.transpose(v.data, axes))


# ---------------------------------------------------------------------------
# Planar evaluation


def epsilon_pairing(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nonzero pattern of the symplectic pairing: eps[j, partner[j]] = sign[j]."""
    j = np.arange(n)
    partner = j ^ 1
    sign = np.where(j % 2 == 0, 1.0, -1.0)
    return partner, sign


def plan_of(group: GroupSpec, planar: Diagram) -> PlanarPlan:
    if not is_algorithmically_planar(planar):
        raise NotPlanarError(f"{planar} is not algorithmically planar")
    top, cross, bottom, tfree, bfree = planar.classify()
    cross = sorted(cross, key=lambda b: planar.top_part(b)[0])
    free = (len(tfree), len(bfree)) if planar.kind is Kind.BRAUER_GROOD else None
    return PlanarPlan(
        group=group,
        k=planar.k,
        l=planar.l,
        top_blocks=tuple(len(b) for b in sorted(top)),
        cross_blocks=tuple((len(planar.bottom_part(b)), len(planar.top_part(b))) for b in cross),
        bottom_blocks=tuple(len(b) for b in sorted(bottom)),
        free_counts=free,
    )


def _determinant_stage(w: np.ndarray, n: int, s: int, counter: OpCounter) -> np.ndarray:
    """Replace the trailing n-s axes with s axes: out[..., T] = sum_B det(e_T, e_B) w[..., B]."""
    r = n - s
    lead = w.shape[: w.ndim - r]
    flat_in = w.reshape(-1, n**r)
    n_lead = flat_in.shape[0]
    out = np.zeros((n_lead, n**s))
    powers_s = n ** np.arange(s - 1, -1, -1)
    powers_r = n ** np.arange(r - 1, -1, -1)
    for t in itertools.permutations(range(n), s):
        rest = [x for x in range(n) if x not in t]
        bs = list(itertools.permutations(rest))
        cols = np.array([int(np.dot(b, powers_r)) for b in bs], dtype=np.int64)
        signs = np.array([permutation_sign(t + b) for b in bs], dtype=np.float64)
        out[:, int(np.dot(t, powers_s))] = flat_in[:, cols] @ signs
        counter.add(n_lead * len(bs), n_lead * (len(bs) - 1))
    return out.reshape(lead + (n,) * s)


def _contract(w: np.ndarray, axes: Sequence[int], family: Family, n: int, counter: OpCounter) -> np.ndarray:
    """Sum a contiguous axis group against its block pattern; the group collapses away."""
    j = np.arange(n)
    index: list[Any] = [slice(None)] * w.ndim
    if family is Family.SYMPLECTIC:
        partner, weights = epsilon_pairing(n)
        index[axes[0]], index[axes[1]] = j, partner
    else:
        weights = np.ones(n)
        for a in axes:
            index[a] = j
    gathered = w[tuple(index)]  # contiguous advanced indices land at axes[0]
    out = np.tensordot(gathered, weights, axes=([axes[0]], [0]))
    counter.add(out.size * n, out.size * (n - 1))
    return out


def _diagonal(w: np.ndarray, axes: Sequence[int], n: int) -> np.ndarray:
    if len(axes) == 1:
        return w
    index: list[Any] = [slice(None)] * w.ndim
    for a in axes:
        index[a] = np.arange(n)
    return w[tuple(index)]


def planar_mult(
    group: GroupSpec,
    planar: Diagram,
    v: DenseTensor | np.ndarray,
    counter: OpCounter | None = None,
) -> DenseTensor:
    """Evaluate the functor image of an algorithmically planar diagram on ``v``."""
    plan = plan_of(group, planar)
    n = group.n
    v = DenseTensor.wrap(v, n)
    if v.order != plan.k or v.dim != n:
        raise ShapeError(f"expected an order-{plan.k} tensor of dimension {n}, got order {v.order}, dim {v.dim}")
    counter = counter if counter is not None else OpCounter()
    family = group.family
    w = v.data

    # axis bookkeeping: [cross bottoms][bottom-only blocks][free]
    n_cross_low = sum(lo for lo, _ in plan.cross_blocks)
    s = 0
    if plan.free_counts is not None:
        s, r = plan.free_counts
        w = _determinant_stage(w, n, s, counter)

    # bottom-only blocks, rightmost (largest) first
    end = n_cross_low + sum(plan.bottom_blocks)
    for size in reversed(plan.bottom_blocks):
        start = end - size
        w = _contract(w, list(range(start, end)), family, n, counter)
        end = start

    # transfer: one axis per cross-row block
    pos = 0
    for lo, _ in plan.cross_blocks:
        w = _diagonal(w, list(range(pos, pos + lo)), n)
        pos += 1

    if plan.l == 0:
        return DenseTensor(0, n, np.asarray(w, dtype=np.float64).reshape(()))

    # copy stage: build one broadcast index variable per top-only block,
    # per cross-row block and per top free vertex
    n_vars = len(plan.top_blocks) + len(plan.cross_blocks) + s
    grids = [np.arange(n).reshape([n if i == q else 1 for i in range(n_vars)]) for q in range(n_vars)]
    values = np.broadcast_to(
        np.asarray(w, dtype=np.float64).reshape((1,) * len(plan.top_blocks) + w.shape),
        (n,) * n_vars,
    )
    out_index: list[np.ndarray] = []
    var = 0
    for size in plan.top_blocks:
        g = grids[var]
        if family is Family.SYMPLECTIC:
            partner, sign = epsilon_pairing(n)
            out_index += [g, partner[g]]
            values = values * sign[g]
        else:
            out_index += [g] * size
        var += 1
    for _, up in plan.cross_blocks:
        out_index += [grids[var]] * up
        var += 1
    for _ in range(s):
        out_index.append(grids[var])
        var += 1
    out = np.zeros((n,) * plan.l)
    out[tuple(out_index)] = values
    return DenseTensor(plan.l, n, out)


def predicted_counts(group: GroupSpec, planar: Diagram, n: int | None = None) -> OpCounter:
    """Closed-form multiplication/addition counts of ``planar_mult`` on ``planar``."""
    n = group.n if n is None else n
    plan = plan_of(group, planar)
    counter = OpCounter()
    order = plan.k
    if plan.free_counts is not None:
        s, r = plan.free_counts
        lead = n ** (order - r)
        counter.add(lead * math.factorial(n), lead * (math.factorial(n) // math.factorial(r)) * (math.factorial(r) - 1))
        order = order - r + s
    for size in reversed(plan.bottom_blocks):
        order -= size
        counter.add(n**order * n, n**order * (n - 1))
    return counter


def matrix_mult(
    group: GroupSpec,
    d: Diagram,
    v: DenseTensor | np.ndarray,
    cross_order: str = "top",
) -> tuple[DenseTensor, OpCounter]:
    """Apply the functor image of ``d`` to ``v`` without materializing the matrix."""
    f = factor(group, d, cross_order)
    v = DenseTensor.wrap(v, group.n)
    if v.order != d.k or v.dim != group.n:
        raise ShapeError(f"expected an order-{d.k} tensor of dimension {group.n}, got order {v.order}, dim {v.dim}")
    counter = OpCounter()
    w = planar_mult(group, f.planar, permute(v, f.sigma_k), counter)
    return permute(w, f.sigma_l), counter


# ---------------------------------------------------------------------------
# Weight matrices


def thread_count(requested: int | None = None) -> int:
    cap = os.environ.get("EQUITENSOR_THREADS")
    count = requested or os.cpu_count() or 1
    if cap:
        try:
            count = min(count, max(1, int(cap)))
        except ValueError:
            pass
    return max(1, count)


def apply_weight_matrix(w, v: DenseTensor | np.ndarray, parallel: bool = False, workers: int | None = None) -> DenseTensor:
    """Evaluate sum(lambda * matrix_mult(diagram, v)) over the terms of ``w``.

    Terms may run on a thread pool, but the partial results are always summed
    in term order, so the parallel and sequential paths agree bit for bit.
    """
    group = w.group
    v = DenseTensor.wrap(v, group.n)
    if v.order != w.k or v.dim != group.n:
        raise ShapeError(f"weight matrix expects order {w.k}, dim {group.n}; got order {v.order}, dim {v.dim}")
    terms = list(w.terms)

    def run(term) -> np.ndarray:
        lam, d = term
        out, _ = matrix_mult(group, d, v)
        return lam * out.data

    if parallel and len(terms) > 1:
        with ThreadPoolExecutor(max_workers=min(len(terms), thread_count(workers))) as pool:
            parts = list(pool.map(run, terms))
    else:
        parts = [run(t) for t in terms]
    total = np.zeros((group.n,) * w.l)
    for p in parts:
        total = total + p
    return DenseTensor(w.l, group.n, total)

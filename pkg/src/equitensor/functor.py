"""Dense matrices of diagrams under the four group functors, and group actions.

This module is deliberately naive: every matrix is built entry-complete as an
``n**l x n**k`` array.  It is the reference against which the fast routines
are checked.

Indexing: a matrix entry (I, J) has I = (i_1..i_l) on the top row and
J = (j_1..j_k) on the bottom row, flattened row-major with the last index
fastest.  Internally a diagram is first built as a tensor with one axis per
vertex (axis v-1 for vertex v) and then reshaped.

For the symplectic group the n = 2m coordinates are ordered 1, 1', 2, 2', ...,
so array index 2a is the unprimed label a+1 and 2a+1 its primed partner.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import DiagramKindError, FreeVertexCountError, OddDimensionError, ShapeError
from .setpartition import Diagram, Kind

__all__ = [
    "Family",
    "GroupSpec",
    "DenseTensor",
    "EquivariantMatrix",
    "epsilon_matrix",
    "levi_civita",
    "permutation_sign",
    "diagram_tensor",
    "theta_matrix",
    "phi_matrix",
    "chi_matrix",
    "psi_matrix",
    "functor_matrix",
    "group_action",
    "mode_product",
    "equivariance_residual",
    "sample_group_element",
    "symplectic_form",
]


class Family(str, enum.Enum):
    SYMMETRIC = "sn"
    ORTHOGONAL = "o"
    SPECIAL_ORTHOGONAL = "so"
    SYMPLECTIC = "sp"


@dataclass(frozen=True)
class GroupSpec:
    family: Family
    n: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", Family(self.family))
        if self.n < 1:
            raise ValueError(f"dimension must be positive, got {self.n}")
        if self.family is Family.SYMPLECTIC and self.n % 2:
            raise OddDimensionError(f"Sp(n) needs even n, got {self.n}")

    @property
    def m(self) -> int:
        """Half-dimension for the symplectic group."""
        return self.n // 2

    def accepts(self, d: Diagram) -> bool:
        if self.family is Family.SYMMETRIC:
            return d.kind is not Kind.BRAUER_GROOD
        if self.family is Family.SPECIAL_ORTHOGONAL:
            if d.kind is Kind.BRAUER_GROOD:
                return d.n == self.n
            return d.is_brauer
        return d.kind is not Kind.BRAUER_GROOD and d.is_brauer

    def check(self, d: Diagram) -> None:
        if d.kind is Kind.BRAUER_GROOD and self.family is Family.SPECIAL_ORTHOGONAL and d.n != self.n:
            raise FreeVertexCountError(f"diagram has {d.n} free vertices but n = {self.n}")
        if not self.accepts(d):
            raise DiagramKindError(f"{d.kind.value} diagram {d} is not valid for group {self.family.value}")

    def __str__(self) -> str:
        return f"{self.family.value}({self.n})"


@dataclass
class DenseTensor:
    """Coefficients of a vector in (R^n)^{(x)order}, stored with shape (n,)*order."""

    order: int
    dim: int
    data: np.ndarray

    def __post_init__(self) -> None:
        data = np.asarray(self.data, dtype=np.float64)
        expected = (self.dim,) * self.order
        if data.shape != expected:
            if data.size == self.dim**self.order:
                data = data.reshape(expected)
            else:
                raise ShapeError(f"data of size {data.size} does not fit order {self.order}, dim {self.dim}")
        self.data = data

    @classmethod
    def wrap(cls, v: Any, dim: int | None = None) -> DenseTensor:
        if isinstance(v, DenseTensor):
            return v
        arr = np.asarray(v, dtype=np.float64)
        if dim is None:
            if arr.ndim == 0:
                raise ShapeError("cannot infer dimension of an order-0 array")
            dim = arr.shape[0]
        return cls(arr.ndim, dim, arr)

    @property
    def flat(self) -> np.ndarray:
        return self.data.reshape(-1)

    def to_dict(self) -> dict:
        return {"order": self.order, "dim": self.dim, "data": self.flat.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> DenseTensor:
        try:
            order, dim, values = int(data["order"]), int(data["dim"]), data["data"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ShapeError(f"malformed tensor record: {exc}") from exc
        arr = np.asarray(values, dtype=np.float64)
        if arr.size != dim**order:
            raise ShapeError(f"tensor record has {arr.size} values, expected {dim}**{order}")
        return cls(order, dim, arr)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_bytes(self) -> bytes:
        return self.flat.astype("<f8").tobytes()

    @classmethod
    def from_bytes(cls, raw: bytes, order: int, dim: int) -> DenseTensor:
        arr = np.frombuffer(raw, dtype="<f8")
        if arr.size != dim**order:
            raise ShapeError(f"binary tensor has {arr.size} values, expected {dim}**{order}")
        return cls(order, dim, arr.copy())


@dataclass
class EquivariantMatrix:
    entries: np.ndarray
    group: GroupSpec
    source: Diagram | None = None

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def __matmul__(self, other: Any) -> np.ndarray:
        if isinstance(other, DenseTensor):
            other = other.flat
        return self.entries @ other


# ---------------------------------------------------------------------------
# Elementary tensors


def epsilon_matrix(n: int) -> np.ndarray:
    """The symplectic pairing in interleaved order: eps[2a, 2a+1] = 1, eps[2a+1, 2a] = -1."""
    if n % 2:
        raise OddDimensionError(f"epsilon needs even n, got {n}")
    eps = np.zeros((n, n), dtype=np.int64)
    for a in range(n // 2):
        eps[2 * a, 2 * a + 1] = 1
        eps[2 * a + 1, 2 * a] = -1
    return eps


def symplectic_form(n: int) -> np.ndarray:
    return epsilon_matrix(n).astype(np.float64)


def permutation_sign(seq: tuple[int, ...] | list[int]) -> int:
    """Sign of a sequence viewed as a permutation of its sorted values; 0 on repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    inversions = sum(1 for a, b in itertools.combinations(seq, 2) if a > b)
    return -1 if inversions % 2 else 1


def levi_civita(n: int) -> np.ndarray:
    """Order-n tensor whose (t_1..t_n) entry is det(e_{t_1}, ..., e_{t_n})."""
    out = np.zeros((n,) * n, dtype=np.int64)
    for perm in itertools.permutations(range(n)):
        out[perm] = permutation_sign(perm)
    return out


def _diag_tensor(order: int, n: int) -> np.ndarray:
    """1 where all indices agree, 0 elsewhere."""
    out = np.zeros((n,) * order, dtype=np.int64)
    idx = np.arange(n)
    out[(idx,) * order] = 1
    return out


def _place(total: int, axes: tuple[int, ...], factor: np.ndarray) -> np.ndarray:
    """Broadcast ``factor`` (whose axes are ``axes`` in sorted order) into ``total`` dimensions."""
    shape = [1] * total
    for a in axes:
        shape[a] = factor.shape[0]
    return factor.reshape(shape)


def diagram_tensor(d: Diagram, family: Family | str, n: int) -> np.ndarray:
    """Integer tensor with one axis per vertex representing the functor image of ``d``."""
    family = Family(family)
    total = d.total
    out = np.ones((n,) * total, dtype=np.int64)
    if family is Family.SYMPLECTIC:
        eps = epsilon_matrix(n)
    free = d.free_vertices()
    if free:
        axes = tuple(v - 1 for v in free)  # ascending vertex order = top free then bottom free
        out = out * _place(total, axes, levi_civita(n))
    free_set = set(free)
    for b in d.blocks:
        if b[0] in free_set:
            continue
        axes = tuple(v - 1 for v in b)
        same_row = d.is_top(b[0]) == d.is_top(b[-1])
        if family is Family.SYMPLECTIC and same_row:
            # block is (smaller vertex, larger vertex)
            factor = eps
        else:
            factor = _diag_tensor(len(b), n)
        out = out * _place(total, axes, factor)
    return out


def _as_matrix(t: np.ndarray, d: Diagram, n: int) -> np.ndarray:
    return t.reshape(n**d.l, n**d.k).astype(np.float64)


def theta_matrix(d: Diagram, n: int) -> EquivariantMatrix:
    if d.kind is Kind.BRAUER_GROOD:
        raise DiagramKindError("permutation-group matrices need a partition diagram")
    t = diagram_tensor(d, Family.SYMMETRIC, n)
    return EquivariantMatrix(_as_matrix(t, d, n), GroupSpec(Family.SYMMETRIC, n), d)


def phi_matrix(d: Diagram, n: int) -> EquivariantMatrix:
    if d.kind is Kind.BRAUER_GROOD or not d.is_brauer:
        raise DiagramKindError("orthogonal-group matrices need a Brauer diagram")
    t = diagram_tensor(d, Family.ORTHOGONAL, n)
    return EquivariantMatrix(_as_matrix(t, d, n), GroupSpec(Family.ORTHOGONAL, n), d)


def chi_matrix(d: Diagram, n: int) -> EquivariantMatrix:
    if n % 2:
        raise OddDimensionError(f"symplectic matrices need even n, got {n}")
    if d.kind is Kind.BRAUER_GROOD or not d.is_brauer:
        raise DiagramKindError("symplectic-group matrices need a Brauer diagram")
    t = diagram_tensor(d, Family.SYMPLECTIC, n)
    return EquivariantMatrix(_as_matrix(t, d, n), GroupSpec(Family.SYMPLECTIC, n), d)


def psi_matrix(d: Diagram, n: int) -> EquivariantMatrix:
    group = GroupSpec(Family.SPECIAL_ORTHOGONAL, n)
    if d.kind is Kind.BRAUER_GROOD:
        if d.n != n:
            raise FreeVertexCountError(f"diagram has {d.n} free vertices but n = {n}")
        t = diagram_tensor(d, Family.SPECIAL_ORTHOGONAL, n)
        return EquivariantMatrix(_as_matrix(t, d, n), group, d)
    m = phi_matrix(d, n)
    return EquivariantMatrix(m.entries, group, d)


def functor_matrix(group: GroupSpec, d: Diagram) -> EquivariantMatrix:
    """Dense image of ``d`` under the functor belonging to ``group``."""
    builder = {
        Family.SYMMETRIC: theta_matrix,
        Family.ORTHOGONAL: phi_matrix,
        Family.SPECIAL_ORTHOGONAL: psi_matrix,
        Family.SYMPLECTIC: chi_matrix,
    }[group.family]
    return builder(d, group.n)


# ---------------------------------------------------------------------------
# Group actions


def mode_product(g: np.ndarray, t: np.ndarray, axis: int) -> np.ndarray:
    """Apply matrix ``g`` along one axis of ``t``."""
    return np.moveaxis(np.tensordot(g, t, axes=([1], [axis])), 0, axis)


def group_action(g: np.ndarray, v: DenseTensor | np.ndarray) -> DenseTensor:
    """Apply g (x) ... (x) g to a tensor by successive mode products."""
    g = np.asarray(g, dtype=np.float64)
    v = DenseTensor.wrap(v, g.shape[0])
    if v.dim != g.shape[0]:
        raise ShapeError(f"group element is {g.shape[0]}x{g.shape[0]} but tensor dimension is {v.dim}")
    data = v.data
    for axis in range(v.order):
        data = mode_product(g, data, axis)
    return DenseTensor(v.order, v.dim, data)


def equivariance_residual(entries: np.ndarray, g: np.ndarray, k: int, l: int) -> float:
    """max |rho_l(g) M - M rho_k(g)| computed without forming Kronecker powers."""
    n = g.shape[0]
    t = np.asarray(entries, dtype=np.float64).reshape((n,) * (l + k))
    left, right = t, t
    for axis in range(l):
        left = mode_product(g, left, axis)
    for axis in range(l, l + k):
        right = mode_product(g.T, right, axis)
    return float(np.max(np.abs(left - right))) if t.size else 0.0


def _signed_permutation(rng: np.random.Generator, n: int) -> np.ndarray:
    perm = rng.permutation(n)
    signs = rng.choice([-1.0, 1.0], size=n)
    g = np.zeros((n, n))
    g[perm, np.arange(n)] = signs
    return g


def _haar_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def _unimodular(rng: np.random.Generator, m: int) -> np.ndarray:
    upper = np.eye(m, dtype=np.int64) + np.triu(rng.integers(-1, 2, size=(m, m)), 1)
    lower = np.eye(m, dtype=np.int64) + np.tril(rng.integers(-1, 2, size=(m, m)), -1)
    return upper @ lower


def _integer_inverse(a: np.ndarray) -> np.ndarray:
    inv = np.rint(np.linalg.inv(a.astype(np.float64))).astype(np.int64)
    if not np.array_equal(a @ inv, np.eye(a.shape[0], dtype=np.int64)):
        raise ArithmeticError("matrix is not unimodular")
    return inv


def _random_symmetric(rng: np.random.Generator, m: int) -> np.ndarray:
    s = np.triu(rng.integers(-1, 2, size=(m, m)))
    return s + np.triu(s, 1).T


def _symplectic(rng: np.random.Generator, n: int) -> np.ndarray:
    m = n // 2
    eye, zero = np.eye(m, dtype=np.int64), np.zeros((m, m), dtype=np.int64)
    a = _unimodular(rng, m)
    factors = [
        np.block([[eye, _random_symmetric(rng, m)], [zero, eye]]),
        np.block([[a, zero], [zero, _integer_inverse(a).T]]),
        np.block([[eye, zero], [_random_symmetric(rng, m), eye]]),
    ]
    g = factors[0] @ factors[1] @ factors[2]
    # block coordinates (x_1..x_m, y_1..y_m) -> interleaved (x_1, y_1, x_2, y_2, ...)
    order = np.empty(n, dtype=np.int64)
    order[0::2] = np.arange(m)
    order[1::2] = m + np.arange(m)
    return g[np.ix_(order, order)].astype(np.float64)


def sample_group_element(group: GroupSpec, seed: int, exact: bool = True) -> np.ndarray:
    """Draw a group element as an n x n float array.

    ``exact=True`` gives integer-valued samples (permutation, signed
    permutation, integer symplectic).  ``exact=False`` gives a Haar-random
    orthogonal matrix for O(n) and SO(n) and is ignored for the other families.
    """
    rng = np.random.default_rng(seed)
    n = group.n
    fam = group.family
    if fam is Family.SYMMETRIC:
        g = np.zeros((n, n))
        g[rng.permutation(n), np.arange(n)] = 1.0
        return g
    if fam is Family.SYMPLECTIC:
        return _symplectic(rng, n)
    g = _signed_permutation(rng, n) if exact else _haar_orthogonal(rng, n)
    if fam is Family.SPECIAL_ORTHOGONAL and np.linalg.det(g) < 0:
        g[:, 0] = -g[:, 0]
    return g

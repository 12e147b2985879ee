"""Vertical composition and horizontal tensor product of diagrams."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import CompositionArityError, UnsupportedCompositionError, UnsupportedTensorError
from .setpartition import Diagram, Kind, Permutation, SetPartition

__all__ = [
    "UnionFind",
    "ScaledDiagram",
    "DiagramSum",
    "compose",
    "tensor",
    "identity_diagram",
    "empty_diagram",
    "permutation_diagram",
]


class UnionFind:
    """Disjoint sets over ``0..size-1`` with path halving and union by size."""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.size = [1] * size

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]

    def groups(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for x in range(len(self.parent)):
            out.setdefault(self.find(x), []).append(x)
        return out


@dataclass(frozen=True)
class ScaledDiagram:
    """``n**c`` times a diagram, with ``n`` supplied only at evaluation time."""

    c: int
    diagram: Diagram

    def __post_init__(self) -> None:
        if self.c < 0:
            raise ValueError("scalar exponent must be non-negative")

    def scalar(self, n: int) -> int:
        return n**self.c

    def to_dict(self) -> dict:
        return {"c": self.c, "diagram": self.diagram.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> ScaledDiagram:
        return cls(int(data["c"]), Diagram.from_dict(data["diagram"]))


@dataclass
class DiagramSum:
    """A real linear combination of distinct diagrams."""

    terms: dict[Diagram, float] = field(default_factory=dict)

    @classmethod
    def from_terms(cls, pairs: Iterable[tuple[float, Diagram]]) -> DiagramSum:
        out = cls()
        for coeff, d in pairs:
            out.add(coeff, d)
        return out

    def add(self, coeff: float, d: Diagram) -> None:
        self.terms[d] = self.terms.get(d, 0.0) + float(coeff)

    def __iter__(self) -> Iterator[tuple[float, Diagram]]:
        for d, c in self.terms.items():
            yield c, d

    def __len__(self) -> int:
        return len(self.terms)


def _is_permutation(d: Diagram) -> bool:
    return d.kind is Kind.BRAUER and d.k == d.l and all(b[0] <= d.l < b[1] for b in d.blocks)


def _composed_kind(top: Diagram, bottom: Diagram) -> tuple[Kind, int | None]:
    # (l+k)\n diagrams compose only with permutation diagrams, which just relabel vertices
    if top.kind is Kind.BRAUER_GROOD and _is_permutation(bottom):
        return Kind.BRAUER_GROOD, top.n
    if bottom.kind is Kind.BRAUER_GROOD and _is_permutation(top):
        return Kind.BRAUER_GROOD, bottom.n
    if Kind.BRAUER_GROOD in (top.kind, bottom.kind):
        raise UnsupportedCompositionError("vertical composition with (l+k)\\n diagrams is only defined against permutations")
    if top.kind is Kind.BRAUER and bottom.kind is Kind.BRAUER:
        return Kind.BRAUER, None
    return Kind.PARTITION, None


def compose(top: Diagram, bottom: Diagram) -> ScaledDiagram:
    """Stack ``top`` above ``bottom`` and drop components living only in the middle row.

    ``bottom`` is a (k1, l1) diagram and ``top`` a (l1, l2) diagram; the result
    is (k1, l2) and carries exponent c = number of discarded middle components.
    """
    if top.k != bottom.l:
        raise CompositionArityError(
            f"cannot compose: upper diagram expects {top.k} inputs, lower diagram provides {bottom.l}"
        )
    kind, n = _composed_kind(top, bottom)
    l2, mid, k1 = top.l, top.k, bottom.k
    # node layout: 0..l2-1 top row, l2..l2+mid-1 middle row, then bottom row
    uf = UnionFind(l2 + mid + k1)
    for b in top.blocks:
        nodes = [v - 1 for v in b]
        for x in nodes[1:]:
            uf.union(nodes[0], x)
    for b in bottom.blocks:
        nodes = [l2 + v - 1 for v in b]
        for x in nodes[1:]:
            uf.union(nodes[0], x)

    blocks = []
    removed = 0
    for members in uf.groups().values():
        outer = [x for x in members if x < l2 or x >= l2 + mid]
        if not outer:
            removed += 1
            continue
        blocks.append(tuple(x + 1 if x < l2 else x - mid + 1 for x in outer))
    result = Diagram(kind, k1, l2, SetPartition(k1 + l2, tuple(blocks)), n)
    return ScaledDiagram(removed, result)


def tensor(left: Diagram, right: Diagram) -> Diagram:
    """Place ``left`` beside ``right`` (left first in both rows)."""
    kinds = (left.kind, right.kind)
    n = None
    if kinds == (Kind.BRAUER, Kind.BRAUER):
        kind = Kind.BRAUER
    elif kinds == (Kind.BRAUER, Kind.BRAUER_GROOD):
        kind, n = Kind.BRAUER_GROOD, right.n
    elif Kind.BRAUER_GROOD in kinds:
        raise UnsupportedTensorError(
            "only Brauer (left) with (l+k)\\n (right) is supported among (l+k)\\n tensor products"
        )
    else:
        kind = Kind.PARTITION

    l, k, m, q = left.l, left.k, right.l, right.k

    def shift_left(v: int) -> int:
        return v if v <= l else m + v

    def shift_right(v: int) -> int:
        return l + v if v <= m else l + k + v

    blocks = [tuple(shift_left(v) for v in b) for b in left.blocks]
    blocks += [tuple(shift_right(v) for v in b) for b in right.blocks]
    return Diagram(kind, k + q, l + m, SetPartition(k + q + l + m, tuple(blocks)), n)


def identity_diagram(m: int, kind: Kind = Kind.BRAUER) -> Diagram:
    return Diagram(kind, m, m, SetPartition(2 * m, tuple((i, m + i) for i in range(1, m + 1))))


def empty_diagram(kind: Kind = Kind.BRAUER) -> Diagram:
    return Diagram(kind, 0, 0, SetPartition(0, ()))


def permutation_diagram(sigma: Permutation) -> Diagram:
    """Brauer diagram joining top vertex i to bottom vertex m + sigma(i)."""
    m = sigma.degree
    return Diagram(Kind.BRAUER, m, m, SetPartition(2 * m, tuple((i, m + sigma(i)) for i in range(1, m + 1))))

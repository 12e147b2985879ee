"""Set partitions of [l+k] and the diagrams built from them.

Vertices are 1-indexed: the top row carries 1..l and the bottom row carries
l+1..l+k, both read left to right.  Every diagram stores its set partition in
canonical form (blocks sorted internally, blocks ordered by minimum element),
so two diagrams compare equal exactly when they have the same connected
components.
"""

from __future__ import annotations

import enum
import functools
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import DiagramKindError, InvalidPartition

__all__ = [
    "Kind",
    "SetPartition",
    "Diagram",
    "Permutation",
    "canonicalize",
    "make_partition",
    "make_brauer",
    "make_brauer_grood",
    "set_partitions",
    "perfect_matchings",
    "enumerate_partition_diagrams",
    "enumerate_brauer_diagrams",
    "enumerate_brauer_grood_diagrams",
    "stirling2",
    "bell",
    "double_factorial",
    "brauer_count",
    "brauer_grood_count",
    "is_algorithmically_planar",
]


class Kind(str, enum.Enum):
    PARTITION = "partition"
    BRAUER = "brauer"
    BRAUER_GROOD = "brauer_grood"


Block = tuple[int, ...]


def _canonical_blocks(blocks: Iterable[Iterable[int]]) -> tuple[Block, ...]:
    out = [tuple(sorted(int(v) for v in b)) for b in blocks]
    return tuple(sorted(out, key=lambda b: b[0] if b else 0))


@dataclass(frozen=True)
class SetPartition:
    """A partition of ``{1, ..., total}`` into non-empty disjoint blocks."""

    total: int
    blocks: tuple[Block, ...]

    def __post_init__(self) -> None:
        if self.total < 0:
            raise InvalidPartition(f"negative vertex count {self.total}")
        blocks = _canonical_blocks(self.blocks)
        seen: set[int] = set()
        for b in blocks:
            if not b:
                raise InvalidPartition("empty block")
            for v in b:
                if v < 1 or v > self.total:
                    raise InvalidPartition(f"vertex {v} outside [1, {self.total}]")
                if v in seen:
                    raise InvalidPartition(f"vertex {v} appears in more than one block")
                seen.add(v)
        if len(seen) != self.total:
            missing = sorted(set(range(1, self.total + 1)) - seen)
            raise InvalidPartition(f"vertices {missing} are not covered")
        object.__setattr__(self, "blocks", blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def block_of(self, v: int) -> Block:
        for b in self.blocks:
            if v in b:
                return b
        raise KeyError(v)

    def __str__(self) -> str:
        return "{" + " | ".join(", ".join(map(str, b)) for b in self.blocks) + "}"


def canonicalize(p: SetPartition) -> SetPartition:
    """Return ``p`` in canonical form (a no-op, since construction canonicalizes)."""
    return SetPartition(p.total, p.blocks)


@dataclass(frozen=True)
class Diagram:
    """A (k, l)-partition diagram: ``l`` top vertices, ``k`` bottom vertices.

    ``kind`` tags the diagram family.  Brauer diagrams have only pair blocks;
    Brauer-Grood ((l+k)\\n) diagrams have exactly ``n`` singleton ("free")
    blocks and pairs elsewhere.
    """

    kind: Kind
    k: int
    l: int
    partition: SetPartition
    n: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.k < 0 or self.l < 0:
            raise InvalidPartition("row sizes must be non-negative")
        if self.partition.total != self.k + self.l:
            raise InvalidPartition(
                f"partition covers {self.partition.total} vertices, expected l+k = {self.l + self.k}"
            )
        sizes = [len(b) for b in self.partition.blocks]
        if self.kind is Kind.BRAUER:
            if any(s != 2 for s in sizes):
                raise DiagramKindError("Brauer diagram blocks must all have size 2")
        elif self.kind is Kind.BRAUER_GROOD:
            if self.n is None or self.n < 1:
                raise DiagramKindError("Brauer-Grood diagram needs n >= 1")
            if sizes.count(1) != self.n or any(s not in (1, 2) for s in sizes):
                raise DiagramKindError(
                    f"(l+k)\\n diagram needs exactly n={self.n} singletons and pairs elsewhere"
                )

    # -- structure ---------------------------------------------------------
    @property
    def blocks(self) -> tuple[Block, ...]:
        return self.partition.blocks

    @property
    def total(self) -> int:
        return self.l + self.k

    @property
    def is_brauer(self) -> bool:
        return all(len(b) == 2 for b in self.blocks)

    def is_top(self, v: int) -> bool:
        return v <= self.l

    def top_part(self, block: Block) -> Block:
        return tuple(v for v in block if v <= self.l)

    def bottom_part(self, block: Block) -> Block:
        return tuple(v for v in block if v > self.l)

    def free_vertices(self) -> tuple[int, ...]:
        if self.kind is not Kind.BRAUER_GROOD:
            return ()
        return tuple(b[0] for b in self.blocks if len(b) == 1)

    def classify(self) -> tuple[list[Block], list[Block], list[Block], list[int], list[int]]:
        """Split blocks into (top-only, cross-row, bottom-only, top free, bottom free).

        Singletons count as free vertices only for Brauer-Grood diagrams.
        Each list keeps canonical (minimum-vertex) order.
        """
        top, cross, bottom, tfree, bfree = [], [], [], [], []
        free = set(self.free_vertices())
        for b in self.blocks:
            if len(b) == 1 and b[0] in free:
                (tfree if b[0] <= self.l else bfree).append(b[0])
                continue
            has_top = b[0] <= self.l
            has_bottom = b[-1] > self.l
            if has_top and has_bottom:
                cross.append(b)
            elif has_top:
                top.append(b)
            else:
                bottom.append(b)
        return top, cross, bottom, sorted(tfree), sorted(bfree)

    # -- conversions -------------------------------------------------------
    def with_kind(self, kind: Kind, n: int | None = None) -> Diagram:
        return Diagram(Kind(kind), self.k, self.l, self.partition, self.n if n is None else n)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "k": self.k,
            "l": self.l,
            "n": self.n,
            "blocks": [list(b) for b in self.blocks],
        }

    @classmethod
    def from_dict(cls, data: dict) -> Diagram:
        try:
            k, l = int(data["k"]), int(data["l"])
            kind = Kind(data.get("kind", "partition"))
            blocks = data["blocks"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidPartition(f"malformed diagram record: {exc}") from exc
        n = data.get("n")
        return cls(kind, k, l, SetPartition(k + l, tuple(tuple(b) for b in blocks)), None if n is None else int(n))

    def __str__(self) -> str:
        tag = {Kind.PARTITION: "P", Kind.BRAUER: "B", Kind.BRAUER_GROOD: f"BG{self.n}"}[self.kind]
        return f"{tag}(k={self.k},l={self.l}){self.partition}"


def make_partition(k: int, l: int, blocks: Iterable[Iterable[int]]) -> Diagram:
    """Build a partition-kind diagram; Brauer eligibility is exposed as ``is_brauer``."""
    return Diagram(Kind.PARTITION, k, l, SetPartition(k + l, tuple(tuple(b) for b in blocks)))


def make_brauer(k: int, l: int, blocks: Iterable[Iterable[int]]) -> Diagram:
    return Diagram(Kind.BRAUER, k, l, SetPartition(k + l, tuple(tuple(b) for b in blocks)))


def make_brauer_grood(k: int, l: int, n: int, blocks: Iterable[Iterable[int]]) -> Diagram:
    return Diagram(Kind.BRAUER_GROOD, k, l, SetPartition(k + l, tuple(tuple(b) for b in blocks)), n)


# ---------------------------------------------------------------------------
# Permutations


@dataclass(frozen=True)
class Permutation:
    """A bijection of ``{1, ..., m}`` stored in one-line form: ``images[i-1] = sigma(i)``.

    Products follow the left-to-right convention used by GAP and Sage:
    ``(s * t)(i) = t(s(i))``.  With that convention
    ``permutation_diagram(s * t) == compose(permutation_diagram(s), permutation_diagram(t))``.
    """

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"{images} is not a permutation of 1..{len(images)}")
        object.__setattr__(self, "images", images)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: Permutation) -> Permutation:
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        return Permutation(tuple(other(self(i)) for i in range(1, self.degree + 1)))

    def inverse(self) -> Permutation:
        inv = [0] * self.degree
        for i, s in enumerate(self.images, start=1):
            inv[s - 1] = i
        return Permutation(tuple(inv))

    @property
    def is_identity(self) -> bool:
        return all(s == i for i, s in enumerate(self.images, start=1))

    @classmethod
    def identity(cls, m: int) -> Permutation:
        return cls(tuple(range(1, m + 1)))

    @classmethod
    def from_cycles(cls, cycles: str | Sequence[Sequence[int]], degree: int) -> Permutation:
        """Parse cycle notation, e.g. ``Permutation.from_cycles("(13)(24)", 5)``.

        Inside a string, single-digit entries may be written without separators
        ("(1524)"); use commas or spaces for larger labels ("(1, 10)").
        """
        if isinstance(cycles, str):
            parsed = []
            for chunk in cycles.replace(" ", ",").split(")"):
                chunk = chunk.strip().lstrip("(").strip(",")
                if not chunk:
                    continue
                if "," in chunk:
                    parsed.append([int(x) for x in chunk.split(",") if x])
                else:
                    parsed.append([int(ch) for ch in chunk])
            cycles = parsed
        images = list(range(1, degree + 1))
        for cyc in cycles:
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                images[a - 1] = b
        return cls(tuple(images))

    def cycles(self) -> str:
        seen: set[int] = set()
        parts = []
        for start in range(1, self.degree + 1):
            if start in seen or self(start) == start:
                continue
            cyc = [start]
            seen.add(start)
            nxt = self(start)
            while nxt != start:
                cyc.append(nxt)
                seen.add(nxt)
                nxt = self(nxt)
            sep = "" if self.degree < 10 else ","
            parts.append("(" + sep.join(map(str, cyc)) + ")")
        return "".join(parts) or "()"

    def __str__(self) -> str:
        return self.cycles()


# ---------------------------------------------------------------------------
# Enumeration


def set_partitions(m: int) -> Iterator[tuple[Block, ...]]:
    """Yield every set partition of ``{1..m}`` via restricted growth strings."""
    if m == 0:
        yield ()
        return
    rgs = [0] * m
    maxes = [0] * m  # maxes[i] = max(rgs[:i]) for i >= 1

    def emit() -> tuple[Block, ...]:
        groups: dict[int, list[int]] = {}
        for v, g in enumerate(rgs, start=1):
            groups.setdefault(g, []).append(v)
        return tuple(tuple(groups[g]) for g in sorted(groups))

    while True:
        yield emit()
        # advance to the next restricted growth string
        i = m - 1
        while i > 0 and rgs[i] == maxes[i] + 1:
            i -= 1
        if i == 0:
            return
        rgs[i] += 1
        for j in range(i + 1, m):
            rgs[j] = 0
            maxes[j] = max(maxes[j - 1], rgs[j - 1])


def perfect_matchings(items: Sequence[int]) -> Iterator[tuple[Block, ...]]:
    """Yield all perfect matchings of ``items`` (empty iterator when odd)."""
    if len(items) % 2:
        return
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for idx, partner in enumerate(rest):
        remaining = rest[:idx] + rest[idx + 1 :]
        for m in perfect_matchings(remaining):
            yield ((first, partner),) + m


def _sort_key(d: Diagram) -> tuple:
    return d.blocks


def enumerate_partition_diagrams(k: int, l: int, max_blocks: int) -> list[Diagram]:
    """All (k, l)-partition diagrams with at most ``max_blocks`` blocks, in lexicographic block order."""
    out = [
        Diagram(Kind.PARTITION, k, l, SetPartition(k + l, p))
        for p in set_partitions(k + l)
        if len(p) <= max_blocks
    ]
    return sorted(out, key=_sort_key)


def enumerate_brauer_diagrams(k: int, l: int) -> list[Diagram]:
    out = [
        Diagram(Kind.BRAUER, k, l, SetPartition(k + l, m))
        for m in perfect_matchings(tuple(range(1, k + l + 1)))
    ]
    return sorted(out, key=_sort_key)


def enumerate_brauer_grood_diagrams(k: int, l: int, n: int) -> list[Diagram]:
    total = k + l
    if total < n or (total - n) % 2:
        return []
    out = []
    for free in itertools.combinations(range(1, total + 1), n):
        rest = tuple(v for v in range(1, total + 1) if v not in free)
        for m in perfect_matchings(rest):
            blocks = tuple((v,) for v in free) + m
            out.append(Diagram(Kind.BRAUER_GROOD, k, l, SetPartition(total, blocks), n))
    return sorted(out, key=_sort_key)


@functools.lru_cache(maxsize=None)
def stirling2(m: int, t: int) -> int:
    """Stirling number of the second kind."""
    if m == t:
        return 1
    if t == 0 or t > m:
        return 0
    return t * stirling2(m - 1, t) + stirling2(m - 1, t - 1)


def bell(m: int, max_blocks: int) -> int:
    """Number of set partitions of an m-set having at most ``max_blocks`` blocks.

    The sum starts at t = 0 so that the empty set (one partition, no blocks)
    counts once.
    """
    return sum(stirling2(m, t) for t in range(0, max_blocks + 1))


def double_factorial(m: int) -> int:
    """m!! with the convention (-1)!! = 0!! = 1."""
    return math.prod(range(m, 0, -2)) if m > 0 else 1


def brauer_count(total: int) -> int:
    return 0 if total % 2 else double_factorial(total - 1)


def brauer_grood_count(total: int, n: int) -> int:
    if total < n or (total - n) % 2:
        return 0
    return math.comb(total, n) * double_factorial(total - n - 1)


# ---------------------------------------------------------------------------
# Algorithmic planarity


def _is_contiguous(vertices: Sequence[int]) -> bool:
    return list(vertices) == list(range(vertices[0], vertices[0] + len(vertices)))


def is_algorithmically_planar(d: Diagram) -> bool:
    """Check the normal form consumed by the fast multiplication routine.

    Top row, left to right: top-only blocks, then cross-row blocks, then free
    vertices.  Bottom row: cross-row blocks, then bottom-only blocks in
    non-decreasing size, then free vertices.  Every row-local block is
    contiguous, and cross-row blocks neither cross nor nest.
    """
    top, cross, bottom, tfree, bfree = d.classify()
    l, k = d.l, d.k

    # top row layout
    pos = 1
    for b in top:
        if b[0] != pos or not _is_contiguous(b):
            return False
        pos += len(b)
    n_cross_top = sum(len(d.top_part(b)) for b in cross)
    if tfree != list(range(pos + n_cross_top, l + 1)):
        return False

    # bottom row layout, positions counted from 1 within the row
    n_cross_bottom = sum(len(d.bottom_part(b)) for b in cross)
    pos = l + n_cross_bottom + 1
    last_size = 0
    for b in sorted(bottom):
        if b[0] != pos or not _is_contiguous(b) or len(b) < last_size:
            return False
        last_size = len(b)
        pos += len(b)
    if bfree != list(range(pos, l + k + 1)):
        return False

    # cross-row blocks: consistent left-to-right order in both rows, no interleaving
    ordered = sorted(cross, key=lambda b: d.top_part(b)[0])
    for a, b in zip(ordered, ordered[1:]):
        if d.top_part(a)[-1] >= d.top_part(b)[0]:
            return False
        if d.bottom_part(a)[-1] >= d.bottom_part(b)[0]:
            return False
    return True

"""Equivariant weight matrices as lambda-weighted sums of spanning diagrams."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ShapeError
from .fastmult import apply_weight_matrix
from .functor import DenseTensor, EquivariantMatrix, Family, GroupSpec, functor_matrix
from .setpartition import (
    Diagram,
    bell,
    brauer_count,
    brauer_grood_count,
    enumerate_brauer_diagrams,
    enumerate_brauer_grood_diagrams,
    enumerate_partition_diagrams,
)

__all__ = ["WeightMatrix", "spanning_set", "spanning_set_size", "init_weights", "materialize"]

FORMAT_VERSION = 1


def spanning_set(group: GroupSpec | str, k: int, l: int, n: int | None = None) -> list[Diagram]:
    """Diagrams whose functor images span the equivariant maps (R^n)^{(x)k} -> (R^n)^{(x)l}."""
    if not isinstance(group, GroupSpec):
        group = GroupSpec(group, n)
    n = group.n
    fam = group.family
    if fam is Family.SYMMETRIC:
        return enumerate_partition_diagrams(k, l, n)
    if fam in (Family.ORTHOGONAL, Family.SYMPLECTIC):
        return enumerate_brauer_diagrams(k, l)
    return enumerate_brauer_diagrams(k, l) + enumerate_brauer_grood_diagrams(k, l, n)


def spanning_set_size(group: GroupSpec, k: int, l: int) -> int:
    """Closed-form size of ``spanning_set``."""
    total, n = k + l, group.n
    if group.family is Family.SYMMETRIC:
        return bell(total, n)
    if group.family is Family.SPECIAL_ORTHOGONAL:
        return brauer_count(total) + brauer_grood_count(total, n)
    return brauer_count(total)


@dataclass
class WeightMatrix:
    group: GroupSpec
    k: int
    l: int
    terms: list[tuple[float, Diagram]] = field(default_factory=list)

    def __post_init__(self) -> None:
        seen = set()
        clean = []
        for lam, d in self.terms:
            if (d.k, d.l) != (self.k, self.l):
                raise ShapeError(f"diagram {d} is ({d.k},{d.l}), weight matrix is ({self.k},{self.l})")
            self.group.check(d)
            if d in seen:
                raise ValueError(f"duplicate diagram {d}")
            seen.add(d)
            clean.append((float(lam), d))
        self.terms = clean

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([lam for lam, _ in self.terms])

    @property
    def diagrams(self) -> list[Diagram]:
        return [d for _, d in self.terms]

    def apply(self, v, parallel: bool = False) -> DenseTensor:
        return apply_weight_matrix(self, v, parallel=parallel)

    def materialize(self) -> EquivariantMatrix:
        return materialize(self)

    def to_dict(self) -> dict:
        return {
            "format": FORMAT_VERSION,
            "group": self.group.family.value,
            "n": self.group.n,
            "k": self.k,
            "l": self.l,
            "terms": [{"lambda": lam, "diagram": d.to_dict()} for lam, d in self.terms],
        }

    @classmethod
    def from_dict(cls, data: dict) -> WeightMatrix:
        if data.get("format", FORMAT_VERSION) != FORMAT_VERSION:
            raise ValueError(f"unsupported weight format {data.get('format')}")
        try:
            group = GroupSpec(data["group"], int(data["n"]))
            terms = [(float(t["lambda"]), Diagram.from_dict(t["diagram"])) for t in data["terms"]]
            return cls(group, int(data["k"]), int(data["l"]), terms)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed weight record: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> WeightMatrix:
        return cls.from_dict(json.loads(text))


def init_weights(
    diagrams: Sequence[Diagram],
    group: GroupSpec,
    scheme: str = "zeros",
    *,
    constant: float = 1.0,
    low: float = -1.0,
    high: float = 1.0,
    seed: int = 0,
    k: int | None = None,
    l: int | None = None,
) -> WeightMatrix:
    """One lambda per diagram: ``zeros``, ``constant`` or seeded ``uniform`` on [low, high)."""
    if diagrams:
        k, l = diagrams[0].k, diagrams[0].l
    elif k is None or l is None:
        raise ValueError("k and l are required for an empty diagram list")
    if scheme == "zeros":
        lams: Iterable[float] = [0.0] * len(diagrams)
    elif scheme == "constant":
        lams = [constant] * len(diagrams)
    elif scheme == "uniform":
        lams = np.random.default_rng(seed).uniform(low, high, size=len(diagrams)).tolist()
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return WeightMatrix(group, k, l, list(zip(lams, diagrams)))


def materialize(w: WeightMatrix, n: int | None = None) -> EquivariantMatrix:
    """Dense sum of lambda times functor image; the naive baseline."""
    if n is not None and n != w.group.n:
        raise ShapeError(f"weight matrix is for n = {w.group.n}, not {n}")
    n = w.group.n
    total = np.zeros((n**w.l, n**w.k))
    for lam, d in w.terms:
        total += lam * functor_matrix(w.group, d).entries
    return EquivariantMatrix(total, w.group, None)

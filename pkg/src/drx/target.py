"""Numerical stand-ins for a target variety X with a line bundle S.

A curve class is a tuple of integer coordinates.  Only the pairing with c1(S)
and the effective cone matter to the graph-sum formula, so that is all a
:class:`TargetModel` records.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

CurveClass = tuple[int, ...]

KINDS = ("point", "free", "a_ell")


@dataclass(frozen=True)
class TargetModel:
    kind: str
    rank: int
    c1S: tuple[int, ...] = ()
    alpha: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown target kind {self.kind!r}")
        object.__setattr__(self, "c1S", tuple(int(x) for x in self.c1S))
        if len(self.c1S) != self.rank:
            raise ValueError("c1S must have one entry per lattice generator")
        if self.kind == "point" and self.rank != 0:
            raise ValueError("point target has rank 0")
        if self.kind == "a_ell":
            if self.alpha is None or len(self.alpha) != self.rank:
                raise ValueError("A_ell target needs a root alpha of length ell")
            object.__setattr__(self, "alpha", tuple(int(x) for x in self.alpha))
            if not any(self.alpha):
                raise ValueError("alpha must be nonzero")

    # constructors

    @classmethod
    def point(cls) -> "TargetModel":
        return cls("point", 0, ())

    @classmethod
    def free(cls, c1S) -> "TargetModel":
        c1S = tuple(c1S)
        return cls("free", len(c1S), c1S)

    @classmethod
    def a_ell(cls, ell: int, alpha=None, c1S=None) -> "TargetModel":
        alpha = tuple(alpha) if alpha is not None else (1,) * ell
        c1S = tuple(c1S) if c1S is not None else (0,) * ell
        return cls("a_ell", ell, c1S, alpha)

    @classmethod
    def from_dict(cls, data: dict) -> "TargetModel":
        kind = data["kind"]
        if kind == "point":
            return cls.point()
        if kind == "free":
            c1S = data.get("c1S", [0] * int(data.get("rank", 0)))
            if "rank" in data and int(data["rank"]) != len(c1S):
                raise ValueError("rank does not match c1S length")
            return cls.free(c1S)
        if kind == "a_ell":
            return cls.a_ell(int(data["ell"]), data.get("alpha"), data.get("c1S"))
        raise ValueError(f"unknown target kind {kind!r}")

    @classmethod
    def load(cls, path) -> "TargetModel":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        if self.kind == "point":
            return {"kind": "point"}
        if self.kind == "free":
            return {"kind": "free", "rank": self.rank, "c1S": list(self.c1S)}
        return {"kind": "a_ell", "ell": self.rank, "alpha": list(self.alpha), "c1S": list(self.c1S)}

    # lattice structure

    def zero(self) -> CurveClass:
        return (0,) * self.rank

    def is_effective(self, beta: CurveClass) -> bool:
        if len(beta) != self.rank:
            return False
        if self.kind == "a_ell":
            return self.root_multiple(beta) is not None
        return all(x >= 0 for x in beta)

    def root_multiple(self, beta: CurveClass) -> int | None:
        """d with beta = d*alpha and d >= 0, else None (A_ell only)."""
        if not any(beta):
            return 0
        for a, b in zip(self.alpha, beta):
            if a:
                if b % a:
                    return None
                d = b // a
                break
        if d <= 0 or tuple(d * a for a in self.alpha) != tuple(beta):
            return None
        return d


def pair_c1S(t: TargetModel, beta: CurveClass) -> int:
    if not t.is_effective(tuple(beta)):
        raise ValueError(f"class {tuple(beta)} is not effective for {t.kind} target")
    return sum(a * b for a, b in zip(t.c1S, beta))


@lru_cache(maxsize=None)
def effective_summands(t: TargetModel, beta: CurveClass) -> tuple[CurveClass, ...]:
    """Effective beta' with beta - beta' effective, in lexicographic order."""
    beta = tuple(beta)
    if not t.is_effective(beta):
        raise ValueError(f"class {beta} is not effective")
    if t.kind == "a_ell":
        d = t.root_multiple(beta)
        return tuple(tuple(k * a for a in t.alpha) for k in range(d + 1))
    return tuple(itertools.product(*(range(b + 1) for b in beta)))


@lru_cache(maxsize=None)
def effective_splittings(t: TargetModel, beta: CurveClass, parts: int) -> tuple[tuple[CurveClass, ...], ...]:
    """All ordered tuples of ``parts`` effective classes summing to beta."""
    beta = tuple(beta)
    if parts < 1:
        raise ValueError("parts must be positive")
    if parts == 1:
        return ((beta,),)
    out = []
    for first in effective_summands(t, beta):
        rest = tuple(b - f for b, f in zip(beta, first))
        for tail in effective_splittings(t, rest, parts - 1):
            out.append((first,) + tail)
    return tuple(out)


def summand_bound_b(t: TargetModel, beta: CurveClass) -> int:
    return max(abs(pair_c1S(t, s)) for s in effective_summands(t, tuple(beta)))

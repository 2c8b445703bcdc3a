"""Ground-layer norms: the per-coordinate spaces of a d-product.

A ground descriptor answers ``norm(n, block) -> (value, functional)`` where the
functional lies in the norming set of coordinate ``n`` and attains the value.
The scalar ground is the one-dimensional case used by mixed-Tsirelson spaces.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .kernel import FinVec, as_fraction, pair, vec_from_json, vec_to_json


@dataclass(frozen=True)
class ScalarGround:
    kind = "scalar"

    def norm(self, n: int, block) -> tuple[Fraction, object]:
        t = as_fraction(block)
        return abs(t), (1 if t >= 0 else -1)

    def finite(self) -> bool:
        return True

    def to_json(self):
        return "scalar"


@dataclass(frozen=True)
class L1Ground:
    """l^1(k) on every coordinate; norming set = sign vectors."""

    k: int
    kind = "l1"

    def norm(self, n: int, block: FinVec):
        _check_dim(block, self.k)
        f = FinVec({i: (1 if v > 0 else -1) for i, v in block.items()})
        return block.l1(), f

    def finite(self) -> bool:
        return True

    def to_json(self):
        return {"kind": "l1", "k": self.k}


@dataclass(frozen=True)
class LinfGround:
    """l^inf(k); norming set = {+-e_i*}."""

    k: int
    kind = "linf"

    def norm(self, n: int, block: FinVec):
        _check_dim(block, self.k)
        if not block:
            return Fraction(0), FinVec()
        i, v = max(block.items(), key=lambda t: (abs(t[1]), -t[0]))
        return abs(v), FinVec({i: 1 if v > 0 else -1})

    def finite(self) -> bool:
        return True

    def to_json(self):
        return {"kind": "linf", "k": self.k}


@dataclass(frozen=True)
class PolytopeGround:
    """Norm max_{f in F} |f(x)| for an explicit finite list F (symmetrised)."""

    functionals: tuple
    kind = "polytope"

    def norm(self, n: int, block: FinVec):
        best, arg = Fraction(0), FinVec()
        for f in self.functionals:
            v = pair(f, block)
            if abs(v) > best:
                best, arg = abs(v), (f if v > 0 else -f)
        return best, arg

    def finite(self) -> bool:
        return True

    def to_json(self):
        return {"kind": "polytope", "functionals": [vec_to_json(f) for f in self.functionals]}


@dataclass(frozen=True)
class CallableGround:
    """Coordinate-dependent ground norm given by a function (e.g. a gauge).

    ``fn(n, block)`` must return an exact value and a functional in the
    coordinate's dual ball attaining it.
    """

    fn: Callable
    label: str = "callable"
    kind = "callable"

    def norm(self, n: int, block):
        return self.fn(n, block)

    def finite(self) -> bool:
        return False

    def to_json(self):
        return {"kind": "callable", "label": self.label}


SCALAR = ScalarGround()


def _check_dim(block: FinVec, k: int) -> None:
    for i in block.support():
        if not isinstance(i, int) or not 1 <= i <= k:
            raise ValueError(f"ground block index {i!r} outside 1..{k}")


def ground_from_json(raw):
    if raw is None or raw == "scalar":
        return SCALAR
    if isinstance(raw, dict):
        kind = raw.get("kind")
        if kind == "l1":
            return L1Ground(int(raw["k"]))
        if kind == "linf":
            return LinfGround(int(raw["k"]))
        if kind == "polytope":
            return PolytopeGround(tuple(vec_from_json(f) for f in raw["functionals"]))
    raise ValueError(f"unknown ground descriptor {raw!r}")

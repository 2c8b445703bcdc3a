"""Parameters of a mixed-Tsirelson / d-product norm."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..families import SizeFamily, family_to_json, parse_family
from ..ground import SCALAR, ground_from_json
from ..kernel import as_fraction, fraction_to_json


@dataclass(frozen=True)
class Scheme:
    """The sequences (m_i), (n_i) and optionally (s_i) behind families (A_{n_i}, 1/m_i)."""

    m: tuple
    n: tuple
    s: tuple | None = None

    def __post_init__(self):
        if len(self.m) != len(self.n):
            raise ValueError("m and n must have the same length")
        if any(v < 1 for v in self.m + self.n):
            raise ValueError("m_i and n_i must be positive")
        if self.s is not None and len(self.s) < len(self.m) - 1:
            raise ValueError("need s_i for i = 1 .. len(m)-1")

    def __len__(self) -> int:
        return len(self.m)

    def exponents(self) -> tuple | None:
        """s_i with n_{i+1} = n_i^{s_i}, given or inferred; None if not a power chain."""
        if self.s is not None:
            return tuple(self.s)
        out = []
        for a, b in zip(self.n, self.n[1:]):
            e = _int_log(b, a)
            if e is None:
                return None
            out.append(e)
        return tuple(out)

    def growth_flags(self) -> dict:
        m, n = self.m, self.n
        s = self.exponents()
        flags = {
            "m1_is_2": m[0] == 2,
            "m_growth": all(b >= a ** 5 for a, b in zip(m, m[1:])),
            "n1_is_3": n[0] == 3,
            "n_power_chain": s is not None and all(b == a ** e for a, b, e in zip(n, n[1:], s)),
            "s_condition": s is not None and all(2 ** e > b ** 3 for e, b in zip(s, m[1:])),
        }
        return flags

    def to_json(self) -> dict:
        out = {"m": list(self.m), "n": list(self.n)}
        if self.s is not None:
            out["s"] = list(self.s)
        return out


def _int_log(b: int, a: int):
    if a < 2:
        return None
    e, p = 0, 1
    while p < b:
        p *= a
        e += 1
    return e if p == b else None


@dataclass(frozen=True)
class MTParams:
    families: tuple
    thetas: tuple
    ground: object = SCALAR
    scheme: Scheme | None = field(default=None)

    def __post_init__(self):
        fams = tuple(parse_family(f) for f in self.families)
        ths = tuple(as_fraction(t) for t in self.thetas)
        if len(fams) != len(ths):
            raise ValueError("families and thetas differ in length")
        if not fams:
            raise ValueError("at least one family is needed")
        for t in ths:
            if not 0 < t <= 1:
                raise ValueError(f"theta {t} outside (0, 1]")
        object.__setattr__(self, "families", fams)
        object.__setattr__(self, "thetas", ths)
        if self.scheme is None:
            object.__setattr__(self, "scheme", _derive_scheme(fams, ths))

    @classmethod
    def from_scheme(cls, m: Sequence[int], n: Sequence[int], s: Sequence[int] | None = None,
                    ground=SCALAR) -> "MTParams":
        sch = Scheme(tuple(m), tuple(n), None if s is None else tuple(s))
        return cls(tuple(SizeFamily(k) for k in n), tuple(Fraction(1, k) for k in m), ground, sch)

    def __len__(self) -> int:
        return len(self.families)

    def m(self, i: int) -> int:
        """m_i (1-based)."""
        self._need_scheme()
        return self.scheme.m[i - 1]

    def n(self, i: int) -> int:
        self._need_scheme()
        return self.scheme.n[i - 1]

    def _need_scheme(self):
        if self.scheme is None:
            raise ValueError("parameters are not of the form (A_{n_i}, 1/m_i)")

    @property
    def growth_flags(self) -> dict:
        if self.scheme is None:
            return {"scheme": False}
        return self.scheme.growth_flags()

    @property
    def growth_ok(self) -> bool:
        return all(self.growth_flags.values())

    def truncate(self, j: int) -> "MTParams":
        """The first j families (the norm |.|_j)."""
        sch = None
        if self.scheme is not None:
            s = self.scheme.s
            sch = Scheme(self.scheme.m[:j], self.scheme.n[:j], None if s is None else s[: max(j - 1, 0)])
        return MTParams(self.families[:j], self.thetas[:j], self.ground, sch)

    def to_json(self) -> dict:
        out = {
            "families": [family_to_json(f) for f in self.families],
            "thetas": [fraction_to_json(t) for t in self.thetas],
            "ground": self.ground.to_json(),
        }
        if self.scheme is not None:
            out["scheme"] = self.scheme.to_json()
        return out

    @classmethod
    def from_json(cls, raw) -> "MTParams":
        if isinstance(raw, str):
            raw = json.loads(raw)
        ground = ground_from_json(raw.get("ground"))
        if "families" not in raw and "scheme" in raw:
            sc = raw["scheme"]
            return cls.from_scheme(sc["m"], sc["n"], sc.get("s"), ground)
        sch = None
        if "scheme" in raw:
            sc = raw["scheme"]
            sch = Scheme(tuple(sc["m"]), tuple(sc["n"]), tuple(sc["s"]) if sc.get("s") else None)
        return cls(tuple(parse_family(f) for f in raw["families"]),
                   tuple(as_fraction(t) for t in raw["thetas"]), ground, sch)


def _derive_scheme(fams, thetas) -> Scheme | None:
    if not all(isinstance(f, SizeFamily) for f in fams):
        return None
    if not all(t.numerator == 1 for t in thetas):
        return None
    return Scheme(tuple(t.denominator for t in thetas), tuple(f.n for f in fams))

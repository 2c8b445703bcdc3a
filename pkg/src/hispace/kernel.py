"""Exact finitely supported vectors over naturals or tree-node addresses.

Every scalar is a :class:`fractions.Fraction`.  A natural index is a plain
``int``; a tree-node address is a tuple of child indices (the root is ``()``).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Union

Index = Union[int, tuple]
Scalar = Fraction


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not accepted as exact scalars")
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def index_key(i: Index):
    """Total order on mixed indices: naturals first, then tree nodes by (height, address)."""
    if isinstance(i, tuple):
        return (1, len(i), i)
    return (0, i, ())


class FinVec:
    """Immutable finitely supported vector (also used as a functional)."""

    __slots__ = ("_data", "_hash")

    def __init__(self, entries: Mapping[Index, object] | Iterable = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        data: dict = {}
        for i, v in items:
            if not isinstance(i, (int, tuple)) or isinstance(i, bool):
                raise TypeError(f"bad index {i!r}")
            q = as_fraction(v)
            if q:
                data[i] = data.get(i, Fraction(0)) + q
                if not data[i]:
                    del data[i]
        self._data = data
        self._hash = None

    @classmethod
    def basis(cls, i: Index, value=1) -> "FinVec":
        return cls({i: value})

    @classmethod
    def from_list(cls, values: Iterable, start: int = 1) -> "FinVec":
        return cls({start + k: v for k, v in enumerate(values)})

    def __getitem__(self, i: Index) -> Fraction:
        return self._data.get(i, Fraction(0))

    def __iter__(self) -> Iterator[Index]:
        return iter(self.support())

    def __len__(self) -> int:
        return len(self._data)

    def __bool__(self) -> bool:
        return bool(self._data)

    def items(self) -> list:
        return [(i, self._data[i]) for i in self.support()]

    def support(self) -> list:
        return sorted(self._data, key=index_key)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinVec):
            return NotImplemented
        return self._data == other._data

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._data.items()))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{i!r}: {v}" for i, v in self.items())
        return f"FinVec({{{body}}})"

    def __add__(self, other: "FinVec") -> "FinVec":
        data = dict(self._data)
        for i, v in other._data.items():
            data[i] = data.get(i, 0) + v
        return FinVec(data)

    def __sub__(self, other: "FinVec") -> "FinVec":
        return self + (-other)

    def __neg__(self) -> "FinVec":
        return FinVec({i: -v for i, v in self._data.items()})

    def __mul__(self, scalar) -> "FinVec":
        q = as_fraction(scalar)
        return FinVec({i: q * v for i, v in self._data.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "FinVec":
        return self * (1 / as_fraction(scalar))

    def map_abs(self) -> "FinVec":
        return FinVec({i: abs(v) for i, v in self._data.items()})

    def linf(self) -> Fraction:
        return max((abs(v) for v in self._data.values()), default=Fraction(0))

    def l1(self) -> Fraction:
        return sum((abs(v) for v in self._data.values()), Fraction(0))

    def range(self) -> "Interval":
        """Smallest interval of naturals containing the support."""
        if not self._data:
            return Interval.EMPTY
        keys = list(self._data)
        if any(isinstance(k, tuple) for k in keys):
            raise TypeError("range() is defined for natural-indexed vectors")
        return Interval(min(keys), max(keys))


@dataclass(frozen=True)
class Interval:
    """Interval of naturals [lo, hi]; ``Interval.EMPTY`` is the empty interval."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi and (self.lo, self.hi) != (1, 0):
            raise ValueError(f"lo > hi in Interval({self.lo}, {self.hi})")

    @property
    def empty(self) -> bool:
        return self.lo > self.hi

    def __contains__(self, n) -> bool:
        return isinstance(n, int) and self.lo <= n <= self.hi

    def __iter__(self):
        return iter(range(self.lo, self.hi + 1))

    def __len__(self) -> int:
        return max(0, self.hi - self.lo + 1)

    def __lt__(self, other: "Interval") -> bool:
        # successive: every element of self precedes every element of other
        return self.empty or other.empty or self.hi < other.lo


Interval.EMPTY = Interval(1, 0)


def _membership(A) -> Callable[[Index], bool]:
    if callable(A) and not isinstance(A, (set, frozenset, Interval)):
        return A
    if isinstance(A, Interval):
        return A.__contains__
    s = set(A)
    return s.__contains__


def restrict(x: FinVec, A) -> FinVec:
    """Coordinate projection onto ``A`` (a set, an Interval, or a predicate)."""
    inside = _membership(A)
    return FinVec({i: v for i, v in x.items() if inside(i)})


def pair(f: FinVec, x: FinVec) -> Fraction:
    if len(f) > len(x):
        f, x = x, f
    return sum((v * x[i] for i, v in f.items()), Fraction(0))


# -- canonical serialization -------------------------------------------------

def index_to_json(i: Index):
    if isinstance(i, tuple):
        return ".".join(str(k) for k in i)
    return i


def index_from_json(raw) -> Index:
    if isinstance(raw, bool):
        raise ValueError(f"bad index {raw!r}")
    if isinstance(raw, int):
        return raw
    if isinstance(raw, str):
        if raw == "":
            return ()
        return tuple(int(p) for p in raw.split("."))
    raise ValueError(f"bad index {raw!r}")


def fraction_to_json(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def vec_to_json(x: FinVec) -> list:
    return [[index_to_json(i), fraction_to_json(v)] for i, v in x.items()]


def vec_from_json(raw) -> FinVec:
    """Accepts the pair-list form or a ``{"index": "p/q"}`` mapping (natural keys)."""
    if isinstance(raw, dict):
        return FinVec({int(k): as_fraction(v) for k, v in raw.items()})
    return FinVec((index_from_json(i), as_fraction(v)) for i, v in raw)


def vec_to_dict(x: FinVec) -> dict:
    return {str(index_to_json(i)): fraction_to_json(v) for i, v in x.items()}

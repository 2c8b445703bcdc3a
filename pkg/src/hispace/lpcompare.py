"""Certified comparisons against l_p norms, including irrational exponents.

An exponent is a Fraction or a :class:`LogExponent` p = ln n / ln(n/m), i.e.
1/(1 - log_n m).  Nothing irrational is ever stored: every comparison is
either decided exactly or by outward-rounded interval arithmetic at growing
precision.  Equalities between products of logarithms are detected exactly
by expanding each logarithm over primes.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from mpmath.ctx_iv import MPIntervalContext
from sympy import factorint

from .kernel import FinVec, as_fraction


class PrecisionExhausted(ArithmeticError):
    """Interval evaluation could not separate the two sides within the budget."""

    def __init__(self, bits: int):
        super().__init__(f"comparison undecided at {bits} bits; raise the precision budget")
        self.bits = bits


DEFAULT_MAX_BITS = 4096


@dataclass(frozen=True)
class LogExponent:
    """p = ln n / ln(n/m) = 1 / (1 - log_n m), for integers 1 <= m < n."""

    n: int
    m: int

    def __post_init__(self):
        if not (1 <= self.m < self.n):
            raise ValueError("need 1 <= m < n for a finite exponent >= 1")

    def interval(self, ctx):
        return ctx.log(ctx.mpf(self.n)) / ctx.log(_iv(ctx, Fraction(self.n, self.m)))

    def __str__(self) -> str:
        return f"1/(1-log_{self.n} {self.m})"


Exponent = Union[Fraction, LogExponent]


def _iv(ctx, q: Fraction):
    return ctx.mpf(q.numerator) / q.denominator


def _exp_interval(ctx, p: Exponent):
    if isinstance(p, LogExponent):
        return p.interval(ctx)
    return _iv(ctx, as_fraction(p))


# -- exact logarithm forms -----------------------------------------------------

def log_vector(q: Fraction) -> Counter:
    """ln q as an integer combination of ln(prime)."""
    q = as_fraction(q)
    if q <= 0:
        raise ValueError("log of a non-positive number")
    out = Counter()
    for p, e in factorint(q.numerator).items():
        out[p] += e
    for p, e in factorint(q.denominator).items():
        out[p] -= e
    return Counter({p: e for p, e in out.items() if e})


def quadratic_log_form(terms) -> dict:
    """Sum of c * ln(a) * ln(b) over (c, a, b) as a symmetric form on prime pairs."""
    form: dict = {}
    for c, a, b in terms:
        va, vb = log_vector(a), log_vector(b)
        for p, ep in va.items():
            for q, eq in vb.items():
                key = (min(p, q), max(p, q))
                form[key] = form.get(key, 0) + c * ep * eq
    return {k: v for k, v in form.items() if v}


def form_sign(form: dict, max_bits: int = DEFAULT_MAX_BITS) -> int:
    """Sign of sum c_pq ln p ln q; 0 only when the form vanishes identically."""
    if not form:
        return 0
    bits = 64
    while bits <= max_bits:
        ctx = MPIntervalContext()
        ctx.prec = bits
        total = ctx.mpf(0)
        for (p, q), c in form.items():
            total += c * ctx.log(ctx.mpf(p)) * ctx.log(ctx.mpf(q))
        if total.a > 0:
            return 1
        if total.b < 0:
            return -1
        bits *= 2
    raise PrecisionExhausted(max_bits)


# -- exponent comparisons ------------------------------------------------------

def compare_exponents(p: Exponent, q: Exponent, max_bits: int = DEFAULT_MAX_BITS) -> int:
    """-1, 0, 1 as p <, =, > q."""
    if not isinstance(p, LogExponent) and not isinstance(q, LogExponent):
        a, b = as_fraction(p), as_fraction(q)
        return (a > b) - (a < b)
    if isinstance(p, LogExponent) and isinstance(q, LogExponent):
        # ln n1 / ln(n1/m1) vs ln n2 / ln(n2/m2); denominators positive
        form = quadratic_log_form([
            (1, p.n, Fraction(q.n, q.m)),
            (-1, q.n, Fraction(p.n, p.m)),
        ])
        return form_sign(form, max_bits)
    if isinstance(q, LogExponent):
        return -compare_exponents(q, p, max_bits)
    # p = ln n / ln(n/m) vs rational a/b:  b ln n vs a ln(n/m)
    a = as_fraction(q)
    if a <= 0:
        return 1
    lhs = Fraction(p.n) ** a.denominator
    rhs = Fraction(p.n, p.m) ** a.numerator
    return (lhs > rhs) - (lhs < rhs)


def min_exponent(ps, max_bits: int = DEFAULT_MAX_BITS) -> Exponent:
    best = None
    for p in ps:
        if best is None or compare_exponents(p, best, max_bits) < 0:
            best = p
    if best is None:
        raise ValueError("no exponents")
    return best


def mixed_tsirelson_exponent(m: int, n: int) -> Exponent:
    """p = 1/(1 - log_n m); exact Fraction when log_n m is rational."""
    if m == 1:
        return Fraction(1)
    e = _rational_log(m, n)
    if e is not None:
        if e >= 1:
            raise ValueError("need m < n")
        return 1 / (1 - e)
    return LogExponent(n, m)


def _rational_log(m: int, n: int):
    """log_n m as a Fraction when it is rational (m = r^a, n = r^b)."""
    vm, vn = log_vector(Fraction(m)), log_vector(Fraction(n))
    if set(vm) != set(vn):
        return None
    ratios = {Fraction(vm[p], vn[p]) for p in vm}
    return ratios.pop() if len(ratios) == 1 else None


# -- l_p norm comparisons ------------------------------------------------------

@dataclass(frozen=True)
class LpNorm:
    """||x||_p as a comparison oracle: ``ge(r)`` certifies r <= ||x||_p."""

    groups: tuple  # (magnitude, multiplicity) pairs
    p: Exponent
    max_bits: int = DEFAULT_MAX_BITS

    def ge(self, r) -> bool:
        """True iff r <= ||x||_p."""
        return self.compare(r) <= 0

    def le(self, r) -> bool:
        """True iff ||x||_p <= r."""
        return self.compare(r) >= 0

    def compare(self, r) -> int:
        """Sign of r - ||x||_p."""
        r = as_fraction(r)
        if not self.groups:
            return (r > 0) - (r < 0)
        if r <= 0:
            return -1
        cmax = max(c for c, _ in self.groups)
        l1 = sum((c * k for c, k in self.groups), Fraction(0))
        if r < cmax:
            return -1
        if r > l1:
            return 1
        p = self.p
        if not isinstance(p, LogExponent) and as_fraction(p).denominator == 1:
            e = int(as_fraction(p))
            s = sum((k * c ** e for c, k in self.groups), Fraction(0))
            t = r ** e
            return (t > s) - (t < s)
        if len(self.groups) == 1:
            return self._flat(r)
        return self._interval(r)

    def _flat(self, r: Fraction) -> int:
        # r vs c * k^(1/p)
        (c, k), = self.groups
        ratio = r / c
        if k == 1:
            return (ratio > 1) - (ratio < 1)
        p = self.p
        if isinstance(p, LogExponent):
            # ln(ratio) * ln n  vs  ln k * ln(n/m)
            form = quadratic_log_form([(1, ratio, p.n), (-1, Fraction(k), Fraction(p.n, p.m))])
            return form_sign(form, self.max_bits)
        a, b = as_fraction(p).numerator, as_fraction(p).denominator
        lhs, rhs = ratio ** a, Fraction(k) ** b
        return (lhs > rhs) - (lhs < rhs)

    def _interval(self, r: Fraction) -> int:
        bits = 64
        while bits <= self.max_bits:
            ctx = MPIntervalContext()
            ctx.prec = bits
            p = _exp_interval(ctx, self.p)
            s = ctx.mpf(0)
            for c, k in self.groups:
                s += k * ctx.exp(p * ctx.log(_iv(ctx, c)))
            t = ctx.exp(p * ctx.log(_iv(ctx, r)))
            if t.a > s.b:
                return 1
            if t.b < s.a:
                return -1
            bits *= 2
        raise PrecisionExhausted(self.max_bits)


def lp_power_sum(x: FinVec, p: Exponent, max_bits: int = DEFAULT_MAX_BITS) -> LpNorm:
    if not isinstance(p, LogExponent):
        p = as_fraction(p)
        if p < 1:
            raise ValueError("p must be >= 1")
    groups = Counter(abs(v) for _, v in x.items())
    return LpNorm(tuple(sorted(groups.items())), p, max_bits)

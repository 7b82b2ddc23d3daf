"""Exact ratio arithmetic for cluster quality values.

Quality values are quotients of edge weights. Comparing them through
floating-point division is not safe: two distinct quotients can round to
the same double, and rounded comparisons are not even transitive. Every
float is a dyadic rational, so cross-multiplication on the integer
mantissas from ``float.as_integer_ratio`` gives an exact total order with
no rounding anywhere.
"""

from __future__ import annotations

from functools import total_ordering
from math import gcd


def _as_int_pair(x: float) -> tuple[int, int]:
    p, q = float(x).as_integer_ratio()
    return p, q


@total_ordering
class Ratio:
    """A non-negative quotient ``num / den`` of two floats, compared exactly.

    ``num`` is zero or an edge weight; ``den`` is an edge weight or 1.
    Internally the value is normalized to an integer fraction so that
    comparison, equality, and hashing are exact regardless of how the
    quotient was formed.
    """

    __slots__ = ("num", "den", "_p", "_q")

    def __init__(self, num: float, den: float = 1.0):
        num = float(num)
        den = float(den)
        if num < 0.0:
            raise ValueError(f"numerator must be >= 0, got {num}")
        if den <= 0.0:
            raise ValueError(f"denominator must be > 0, got {den}")
        self.num = num
        self.den = den
        # value = (pn/qn) / (pd/qd) = (pn*qd) / (qn*pd), reduced
        pn, qn = _as_int_pair(num)
        pd, qd = _as_int_pair(den)
        p = pn * qd
        q = qn * pd
        g = gcd(p, q)
        self._p = p // g
        self._q = q // g

    @classmethod
    def zero(cls) -> "Ratio":
        return cls(0.0, 1.0)

    @classmethod
    def one(cls) -> "Ratio":
        return cls(1.0, 1.0)

    def as_integer_ratio(self) -> tuple[int, int]:
        return self._p, self._q

    def __float__(self) -> float:
        return self.num / self.den

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Ratio):
            return NotImplemented
        return self._p == other._p and self._q == other._q

    def __lt__(self, other: "Ratio") -> bool:
        if not isinstance(other, Ratio):
            return NotImplemented
        return self._p * other._q < other._p * self._q

    def __hash__(self) -> int:
        return hash((self._p, self._q))

    def __repr__(self) -> str:
        return f"Ratio({self.num!r}, {self.den!r})"

    def decimal(self, digits: int = 17) -> str:
        """Render the quotient with the given number of significant digits."""
        return f"{self.num / self.den:.{digits}g}"


RATIO_ZERO = Ratio(0.0, 1.0)
RATIO_ONE = Ratio(1.0, 1.0)


def ratio_max(values) -> Ratio:
    """Maximum of an iterable of Ratios under the exact order."""
    it = iter(values)
    try:
        best = next(it)
    except StopIteration:
        raise ValueError("ratio_max of empty iterable") from None
    for v in it:
        if best < v:
            best = v
    return best


def cross_less(a: float, b: float, c: float, d: float) -> bool:
    """Exact test for a/b < c/d with positive b, d (cross-multiplication)."""
    pa, qa = _as_int_pair(a)
    pb, qb = _as_int_pair(b)
    pc, qc = _as_int_pair(c)
    pd, qd = _as_int_pair(d)
    # a/b = pa*qb / (qa*pb);  c/d = pc*qd / (qc*pd)
    return (pa * qb) * (qc * pd) < (pc * qd) * (qa * pb)

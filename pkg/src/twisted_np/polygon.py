"""Twist data and exact-rational polygons.

Everything here is exact: ordinates and slopes are ``Fraction`` and no float
ever enters a comparison.  The twist of the character ``omega^{-u}`` on
``F_q^x`` with ``q = p^a`` is summarised by the base-p digits of ``u``, the
Frobenius period ``b`` of ``u`` modulo ``q - 1`` and the residues
``s_i = p^i u mod (q - 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import pairwise
from math import floor
from typing import Iterable, Sequence

from ._nt import is_prime
from .errors import (
    CharacteristicDividesDegreeError,
    DegreeError,
    InvalidInputError,
    NotPrimeError,
    TwistRangeError,
)


@dataclass(frozen=True)
class TwistContext:
    p: int
    a: int
    d: int
    u: int
    digits: tuple[int, ...]
    b: int
    s: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p**self.a

    @property
    def digit_mean(self) -> Fraction:
        """(1/b) * sum of the first b digits of u."""
        return Fraction(sum(self.digits[: self.b]), self.b)

    def digit(self, i: int) -> int:
        """Digit u_i with the index read modulo the period b."""
        return self.digits[i % self.b]

    @property
    def hypothesis_holds(self) -> bool:
        """Whether p > 2(d-1)^2 + 1, the standing hypothesis of the theorems."""
        return self.p > 2 * (self.d - 1) ** 2 + 1


def make_context(p: int, a: int, d: int, u: int) -> TwistContext:
    if not is_prime(p):
        raise NotPrimeError(f"p={p} is not prime")
    if a < 1:
        raise InvalidInputError(f"a={a} must be >= 1")
    if d < 2:
        raise DegreeError(f"d={d} must be >= 2")
    if p == 2:
        raise InvalidInputError("p must be an odd prime")
    if d % p == 0:
        raise CharacteristicDividesDegreeError(f"p={p} divides d={d}")
    q = p**a
    if not 0 <= u <= q - 2:
        raise TwistRangeError(f"u={u} out of range [0, {q - 2}]")

    digits = []
    rest = u
    for _ in range(a):
        rest, r = divmod(rest, p)
        digits.append(r)

    b = 1
    while (pow(p, b) * u - u) % (q - 1):
        b += 1
    s = tuple(pow(p, i) * u % (q - 1) for i in range(b))
    return TwistContext(p, a, d, u, tuple(digits), b, s)


@dataclass(frozen=True)
class NewtonPolygon:
    """Piecewise-linear function through ``points`` (x strictly increasing)."""

    points: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        pts = tuple((Fraction(x), Fraction(y)) for x, y in self.points)
        if not pts:
            raise ValueError("a polygon needs at least one point")
        for (x0, _), (x1, _) in pairwise(pts):
            if x1 <= x0:
                raise ValueError("abscissae must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_slopes(cls, slopes: Iterable) -> NewtonPolygon:
        pts = [(Fraction(0), Fraction(0))]
        for k, sl in enumerate(slopes):
            pts.append((Fraction(k + 1), pts[-1][1] + Fraction(sl)))
        return cls(tuple(pts))

    @property
    def slopes(self) -> tuple[Fraction, ...]:
        return tuple((y1 - y0) / (x1 - x0) for (x0, y0), (x1, y1) in pairwise(self.points))

    @property
    def x_max(self) -> Fraction:
        return self.points[-1][0]

    def is_convex(self) -> bool:
        sl = self.slopes
        return all(s0 <= s1 for s0, s1 in pairwise(sl))

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        pts = self.points
        if x < pts[0][0] or x > pts[-1][0]:
            raise ValueError(f"x={x} outside [{pts[0][0]}, {pts[-1][0]}]")
        for (x0, y0), (x1, y1) in pairwise(pts):
            if x0 <= x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        return pts[0][1]

    def values(self, n_max: int) -> tuple[Fraction, ...]:
        return tuple(self(n) for n in range(n_max + 1))

    def vertices(self) -> tuple[tuple[Fraction, Fraction], ...]:
        """Points where the slope actually changes (plus both endpoints)."""
        pts = self.points
        if len(pts) <= 2:
            return pts
        keep = [pts[0]]
        sl = self.slopes
        for k in range(1, len(pts) - 1):
            if sl[k - 1] != sl[k]:
                keep.append(pts[k])
        keep.append(pts[-1])
        return tuple(keep)

    def restrict(self, n_max: int) -> NewtonPolygon:
        """The same function, sampled at the integers 0..n_max."""
        return NewtonPolygon(tuple((Fraction(n), self(n)) for n in range(n_max + 1)))

    def to_json(self) -> list[list[str]]:
        return [[rational_str(x), rational_str(y)] for x, y in self.points]


def rational_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class ComparisonReport:
    dominated: bool
    contact_points: frozenset[int]

    def to_json(self) -> dict:
        return {"dominated": self.dominated, "contact_points": sorted(self.contact_points)}


def arith_slope(ctx: TwistContext, n: int) -> Fraction:
    """Slope of the arithmetic polygon on [n, n+1].

    With {x/d} = (x mod d)/d everything sits over the common denominator b d.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    p, d, b = ctx.p, ctx.d, ctx.b
    digits = ctx.digits[:b]
    frac_sum = sum((p * n + ui) % d for ui in digits) - b * (n % d)
    return Fraction(b * (p - 1) * n + sum(digits) + (d - 1) * frac_sum, b * d)


def arith_polygon(ctx: TwistContext, n_max: int) -> NewtonPolygon:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    return NewtonPolygon.from_slopes(arith_slope(ctx, n) for n in range(n_max))


def arith_value(ctx: TwistContext, n: int) -> Fraction:
    """P(n) = omega(0) + ... + omega(n-1)."""
    return sum((arith_slope(ctx, k) for k in range(n)), Fraction(0))


def hodge_slope(ctx: TwistContext, l: int) -> Fraction:
    return ctx.digit_mean / (ctx.d * (ctx.p - 1)) + Fraction(l, ctx.d)


def hodge_polygon(ctx: TwistContext, n_max: int) -> NewtonPolygon:
    """The infinite twisted Hodge polygon of [0, d], sampled on [0, n_max]."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    return NewtonPolygon.from_slopes(hodge_slope(ctx, l) for l in range(n_max))


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lower_hull(points: Sequence) -> NewtonPolygon:
    """Lower convex hull of points with distinct abscissae.

    Collinear interior points are dropped, so the result lists only the
    genuine vertices.
    """
    pts = sorted((Fraction(x), Fraction(y)) for x, y in points)
    for (x0, _), (x1, _) in pairwise(pts):
        if x0 == x1:
            raise ValueError(f"duplicate abscissa {x0}")
    hull: list[tuple[Fraction, Fraction]] = []
    for pt in pts:
        # pop while the turn is clockwise or straight
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
            hull.pop()
        hull.append(pt)
    return NewtonPolygon(tuple(hull))


def compare_polygons(P: NewtonPolygon, Q: NewtonPolygon, n_max: int) -> ComparisonReport:
    """Pointwise comparison P >= Q at the integers 0..n_max."""
    for poly in (P, Q):
        if poly.points[0][0] > 0 or poly.x_max < n_max:
            raise ValueError(f"polygon not defined on [0, {n_max}]")
    dominated = True
    contact = set()
    for n in range(n_max + 1):
        diff = P(n) - Q(n)
        if diff < 0:
            dominated = False
        elif diff == 0:
            contact.add(n)
    return ComparisonReport(dominated, frozenset(contact))


def scale_polygon(P: NewtonPolygon, c) -> NewtonPolygon:
    c = Fraction(c)
    if c <= 0:
        raise ValueError("scale factor must be positive")
    return NewtonPolygon(tuple((x, c * y) for x, y in P.points))


def level_slopes(ctx: TwistContext, m: int, count: int) -> tuple[Fraction, ...]:
    """First ``count`` slopes of the arithmetic polygon, rebuilt at level m.

    The slopes at level m are ``j (p^m - p^{m-1}) + omega(i)`` for
    ``0 <= i < p^{m-1} d`` and ``j >= 0``.
    """
    if m < 1 or count < 1:
        raise ValueError("m and count must be >= 1")
    p = ctx.p
    block = p ** (m - 1) * ctx.d
    shift = p**m - p ** (m - 1)
    base = [arith_slope(ctx, i) for i in range(block)]
    spread = max(base) - min(base)
    # enough shifted copies that nothing smaller can appear later
    j_max = count // block + 2 + floor(spread / shift)
    pool = sorted(j * shift + w for j in range(j_max + 1) for w in base)
    return tuple(pool[:count])

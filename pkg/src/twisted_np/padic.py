"""Exact two-layer p-adic arithmetic.

``ZqContext`` models Z_q / p^N as (Z/p^N)[t] / (M(t)) where M is the very
modulus of ``build_field(p, a)`` lifted to integers; reducing mod p lands
exactly in that finite field.  ``RamifiedRing`` is Z_q[pi] with
pi = zeta_p - 1, stored in the basis 1, pi, ..., pi^{p-2} and reduced by
Phi_p(1 + pi) = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .errors import PrecisionError
from .finite_field import FieldDesc, FieldElement, build_field


@dataclass(frozen=True)
class AtLeast:
    """Valuation marker: the element vanishes to working precision."""

    bound: int

    def __str__(self):
        return f">={self.bound}"


class ZqContext:
    def __init__(self, field: FieldDesc, N: int):
        if N < 1:
            raise ValueError("precision N must be >= 1")
        self.field = field
        self.p = field.p
        self.a = field.n
        self.N = N
        self.pN = self.p**N
        self.modulus = field.modulus
        self.q = self.p**self.a

    def __repr__(self):
        return f"ZqContext(p={self.p}, a={self.a}, N={self.N})"

    def __eq__(self, other):
        return isinstance(other, ZqContext) and (self.field, self.N) == (other.field, other.N)

    def __hash__(self):
        return hash((self.field, self.N))

    # --- raw tuple operations -------------------------------------------------
    def _add(self, x, y):
        m = self.pN
        return tuple((u + v) % m for u, v in zip(x, y))

    def _sub(self, x, y):
        m = self.pN
        return tuple((u - v) % m for u, v in zip(x, y))

    def _scale(self, x, c):
        m = self.pN
        return tuple(u * c % m for u in x)

    def _mul(self, x, y):
        a = self.a
        if a == 1:
            return (x[0] * y[0] % self.pN,)
        mod = self.modulus
        prod = [0] * (2 * a - 1)
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    prod[i + j] += xi * yj
        for k in range(2 * a - 2, a - 1, -1):
            c = prod[k]
            if c:
                base = k - a
                for i in range(a):
                    prod[base + i] -= c * mod[i]
        m = self.pN
        return tuple(v % m for v in prod[:a])

    def _pow(self, x, e):
        result = self._one
        while e:
            if e & 1:
                result = self._mul(result, x)
            x = self._mul(x, x)
            e >>= 1
        return result

    @property
    def _one(self):
        return (1,) + (0,) * (self.a - 1)

    @property
    def _zero(self):
        return (0,) * self.a

    # --- public element constructors -------------------------------------------
    def element(self, coeffs) -> ZqElement:
        coeffs = tuple(int(c) % self.pN for c in coeffs)
        if len(coeffs) > self.a:
            raise ValueError("too many coordinates")
        return ZqElement(self, coeffs + (0,) * (self.a - len(coeffs)))

    def from_int(self, n: int) -> ZqElement:
        return self.element([n])

    @property
    def zero(self) -> ZqElement:
        return ZqElement(self, self._zero)

    @property
    def one(self) -> ZqElement:
        return ZqElement(self, self._one)

    def lift(self, c: FieldElement) -> ZqElement:
        """Coordinate-wise lift of a residue (not multiplicative)."""
        if c.field != self.field:
            raise ValueError("residue lives in a different field")
        return self.element(c.coeffs)

    def teichmuller(self, c: FieldElement) -> ZqElement:
        """The unique t with t^q = t and t = c mod p."""
        t = self.lift(c).coeffs
        for _ in range(self.N + 1):
            nxt = self._pow(t, self.q)
            if nxt == t:
                return ZqElement(self, t)
            t = nxt
        raise AssertionError("Teichmuller iteration did not stabilise")

    def ord_p(self, x) -> int:
        """Largest k <= N with p^k dividing every coordinate."""
        coeffs = x.coeffs if isinstance(x, ZqElement) else x
        k = self.N
        for c in coeffs:
            if c:
                v = 0
                while c % self.p == 0:
                    c //= self.p
                    v += 1
                k = min(k, v)
        return k


def zq_context(field: FieldDesc, N: int) -> ZqContext:
    return _zq_cached(field, N)


@lru_cache(maxsize=None)
def _zq_cached(field, N):
    return ZqContext(field, N)


@dataclass(frozen=True)
class ZqElement:
    ctx: ZqContext
    coeffs: tuple[int, ...]

    def _coerce(self, other):
        if isinstance(other, int):
            return self.ctx.from_int(other)
        if other.ctx != self.ctx:
            raise ValueError("elements of different rings")
        return other

    def __add__(self, other):
        return ZqElement(self.ctx, self.ctx._add(self.coeffs, self._coerce(other).coeffs))

    __radd__ = __add__

    def __sub__(self, other):
        return ZqElement(self.ctx, self.ctx._sub(self.coeffs, self._coerce(other).coeffs))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return ZqElement(self.ctx, self.ctx._sub(self.ctx._zero, self.coeffs))

    def __mul__(self, other):
        return ZqElement(self.ctx, self.ctx._mul(self.coeffs, self._coerce(other).coeffs))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return ZqElement(self.ctx, self.ctx._pow(self.coeffs, e))

    def is_unit(self) -> bool:
        return any(c % self.ctx.p for c in self.coeffs)

    def inverse(self) -> ZqElement:
        if not self.is_unit():
            raise ZeroDivisionError("not a unit in Z_q")
        ctx = self.ctx
        # the unit group of Z_q / p^N has order (q - 1) q^(N-1)
        return self ** ((ctx.q - 1) * ctx.q ** (ctx.N - 1) - 1)

    def reduce(self) -> FieldElement:
        return self.ctx.field.element(self.coeffs)

    def ord_p(self) -> int:
        return self.ctx.ord_p(self)

    def is_zero(self) -> bool:
        return not any(self.coeffs)


class RamifiedRing:
    """Z_q[zeta_p] / p^N in the basis pi^i, i < p - 1, where pi = zeta_p - 1."""

    def __init__(self, zq: ZqContext):
        self.zq = zq
        self.p = zq.p
        self.rank = self.p - 1
        # pi^{p-1} = -sum_{k < p-1} C(p, k+1) pi^k
        self._tail = tuple(-comb(self.p, k + 1) for k in range(self.rank))

    def __eq__(self, other):
        return isinstance(other, RamifiedRing) and self.zq == other.zq

    def __hash__(self):
        return hash(("ram", self.zq))

    @property
    def valuation_bound(self) -> int:
        return (self.p - 1) * self.zq.N

    def element(self, coeffs) -> RamifiedElement:
        """From a list of Z_q coordinates (ZqElement, tuple or int)."""
        zq = self.zq
        out = []
        for c in coeffs:
            if isinstance(c, ZqElement):
                out.append(c.coeffs)
            elif isinstance(c, int):
                out.append(zq.from_int(c).coeffs)
            else:
                out.append(zq.element(c).coeffs)
        if len(out) > self.rank:
            return RamifiedElement(self, self._reduce(out))
        out += [zq._zero] * (self.rank - len(out))
        return RamifiedElement(self, tuple(out))

    def _reduce(self, prod):
        """Fold a long pi-polynomial back into rank p - 1."""
        zq = self.zq
        prod = list(prod)
        r = self.rank
        for k in range(len(prod) - 1, r - 1, -1):
            c = prod[k]
            if any(c):
                base = k - r
                for i, t in enumerate(self._tail):
                    prod[base + i] = zq._add(prod[base + i], zq._scale(c, t))
        return tuple(prod[:r])

    @property
    def zero(self) -> RamifiedElement:
        return RamifiedElement(self, (self.zq._zero,) * self.rank)

    @property
    def one(self) -> RamifiedElement:
        return self.element([1])

    @property
    def pi(self) -> RamifiedElement:
        return self.element([0, 1]) if self.rank > 1 else self.element([-self.p])

    def _mul(self, x, y):
        zq = self.zq
        prod = [zq._zero] * (2 * self.rank - 1)
        for i, xi in enumerate(x):
            if any(xi):
                for j, yj in enumerate(y):
                    if any(yj):
                        prod[i + j] = zq._add(prod[i + j], zq._mul(xi, yj))
        return self._reduce(prod)

    def zeta_power(self, e: int) -> RamifiedElement:
        """zeta_p^e = (1 + pi)^e for 0 <= e < p."""
        if not 0 <= e < self.p:
            raise ValueError("exponent must lie in [0, p)")
        return self.element([comb(e, i) for i in range(e + 1)])


@lru_cache(maxsize=None)
def ramified_ring(p: int, a: int, N: int) -> RamifiedRing:
    return RamifiedRing(zq_context(build_field(p, a), N))


@dataclass(frozen=True)
class RamifiedElement:
    ring: RamifiedRing
    coeffs: tuple[tuple[int, ...], ...]

    def _coerce(self, other):
        if isinstance(other, RamifiedElement):
            if other.ring != self.ring:
                raise ValueError("elements of different rings")
            return other
        if isinstance(other, (int, ZqElement)):
            return self.ring.element([other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        zq = self.ring.zq
        return RamifiedElement(self.ring, tuple(zq._add(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        zq = self.ring.zq
        return RamifiedElement(self.ring, tuple(zq._sub(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return self.ring.zero - self

    def __mul__(self, other):
        if isinstance(other, int):
            zq = self.ring.zq
            return RamifiedElement(self.ring, tuple(zq._scale(c, other) for c in self.coeffs))
        if isinstance(other, ZqElement):
            zq = self.ring.zq
            return RamifiedElement(self.ring, tuple(zq._mul(c, other.coeffs) for c in self.coeffs))
        other = self._coerce(other)
        return RamifiedElement(self.ring, self.ring._mul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return invert_unit(self) ** (-e)
        result = self.ring.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.element([other])
        return isinstance(other, RamifiedElement) and self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def coefficient(self, i: int) -> ZqElement:
        return ZqElement(self.ring.zq, self.coeffs[i])

    def is_zero(self) -> bool:
        return not any(any(c) for c in self.coeffs)

    def residue(self) -> FieldElement:
        """Image under reduction mod (p, pi), an element of F_q."""
        return self.coefficient(0).reduce()

    def valuation(self):
        return pi_valuation(self)


def pi_valuation(x: RamifiedElement):
    """pi-adic valuation normalised by ord(pi) = 1, or ``AtLeast`` at precision.

    The basis valuations i/(p-1) are distinct mod 1, so no cancellation can
    occur between basis terms and the minimum is exact.
    """
    zq = x.ring.zq
    p1 = x.ring.p - 1
    best = None
    for i, c in enumerate(x.coeffs):
        if any(c):
            v = p1 * zq.ord_p(c) + i
            best = v if best is None else min(best, v)
    if best is None:
        return AtLeast(x.ring.valuation_bound)
    return Fraction(best)


def invert_unit(x: RamifiedElement) -> RamifiedElement:
    if pi_valuation(x) != 0:
        raise ZeroDivisionError("element is not a unit")
    c0 = x.coefficient(0)
    y = x.ring.element([c0.inverse()])
    one = x.ring.one
    # Newton: the pi-adic error at least doubles per step
    for _ in range(x.ring.valuation_bound.bit_length() + 2):
        if x * y == one:
            return y
        y = y * (2 - x * y)
    if x * y != one:
        raise PrecisionError("unit inversion did not converge")
    return y


def zeta_p_power(ring: RamifiedRing, e: int) -> RamifiedElement:
    return ring.zeta_power(e)


def require_exact(v, what="valuation"):
    """Return an exact valuation or fail loudly asking for more precision."""
    if isinstance(v, AtLeast):
        raise PrecisionError(f"{what} vanishes to working precision ({v}); raise N")
    return v

"""Deterministic finite fields F_{p^n} in a power basis.

``build_field(p, n)`` always returns the same modulus: the monic irreducible
polynomial of degree n whose coefficient vector (c_0, ..., c_{n-1}), read as
a base-p counter with c_0 the least significant digit, is smallest.  Elements
are coordinate tuples in the basis 1, t, ..., t^{n-1} of a root t.  The same
counter value (``encode``) is the canonical enumeration order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterator

from ._nt import is_prime, prime_factors
from .errors import InvalidInputError, NotPrimeError

ENUMERATION_LIMIT = 10**7


# --- polynomials over F_p, coefficient lists low degree first ---------------

def _trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _poly_mod(f, g, p):
    f = list(f)
    inv = pow(g[-1], -1, p)
    dg = len(g) - 1
    while len(_trim(f)) - 1 >= dg:
        c = f[-1] * inv % p
        shift = len(f) - 1 - dg
        for i, gi in enumerate(g):
            f[shift + i] = (f[shift + i] - c * gi) % p
    return f


def _poly_mulmod(f, g, m, p):
    out = [0] * (len(f) + len(g) - 1) if f and g else []
    for i, fi in enumerate(f):
        if fi:
            for j, gj in enumerate(g):
                out[i + j] = (out[i + j] + fi * gj) % p
    return _poly_mod(out, m, p)


def _poly_powmod(f, e, m, p):
    result = [1]
    base = _poly_mod(f, m, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, m, p)
        base = _poly_mulmod(base, base, m, p)
        e >>= 1
    return result


def _poly_gcd(f, g, p):
    f, g = _trim(list(f)), _trim(list(g))
    while g:
        f, g = g, _trim(_poly_mod(f, g, p))
    return f


def _poly_sub(f, g, p):
    n = max(len(f), len(g))
    f = list(f) + [0] * (n - len(f))
    g = list(g) + [0] * (n - len(g))
    return _trim([(a - b) % p for a, b in zip(f, g)])


def is_irreducible(f, p) -> bool:
    """Rabin's test for a monic polynomial over F_p."""
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    x = [0, 1]
    if _trim(_poly_sub(_poly_powmod(x, p**n, f, p), x, p)):
        return False
    for r in prime_factors(n):
        h = _poly_sub(_poly_powmod(x, p ** (n // r), f, p), x, p)
        if len(_poly_gcd(f, h, p)) != 1:
            return False
    return True


# --- fields and elements ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FieldDesc:
    p: int
    n: int
    modulus: tuple[int, ...]  # n + 1 coefficients, monic
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def order(self) -> int:
        return self.p**self.n

    def __eq__(self, other):
        return isinstance(other, FieldDesc) and (self.p, self.n, self.modulus) == (
            other.p, other.n, other.modulus)

    def __hash__(self):
        return hash((self.p, self.n, self.modulus))

    # raw tuple arithmetic, used on hot paths
    def _mul(self, x, y):
        p, n, m = self.p, self.n, self.modulus
        prod = [0] * (2 * n - 1)
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    prod[i + j] += xi * yj
        for k in range(2 * n - 2, n - 1, -1):
            c = prod[k] % p
            if c:
                base = k - n
                for i in range(n):
                    prod[base + i] -= c * m[i]
        return tuple(v % p for v in prod[:n])

    def _pow(self, x, e):
        result = (1,) + (0,) * (self.n - 1)
        while e:
            if e & 1:
                result = self._mul(result, x)
            x = self._mul(x, x)
            e >>= 1
        return result

    def element(self, coeffs) -> FieldElement:
        coeffs = tuple(int(c) % self.p for c in coeffs)
        if len(coeffs) > self.n:
            raise ValueError("too many coordinates")
        return FieldElement(self, coeffs + (0,) * (self.n - len(coeffs)))

    def from_int(self, v: int) -> FieldElement:
        """Element whose coordinates are the base-p digits of v."""
        if not 0 <= v < self.order:
            raise ValueError("counter value out of range")
        out = []
        for _ in range(self.n):
            v, r = divmod(v, self.p)
            out.append(r)
        return FieldElement(self, tuple(out))

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, (0,) * self.n)

    @property
    def one(self) -> FieldElement:
        return self.element([1])

    def encode(self, coeffs) -> int:
        v = 0
        for c in reversed(coeffs):
            v = v * self.p + c
        return v

    @cached_property
    def basis_traces(self) -> tuple[int, ...]:
        """Tr(t^j) for j < n; the absolute trace is linear in coordinates."""
        return tuple(trace_to_prime(self, self.element([0] * j + [1])) for j in range(self.n))

    def trace_coeffs(self, coeffs) -> int:
        return sum(c * t for c, t in zip(coeffs, self.basis_traces)) % self.p


@dataclass(frozen=True)
class FieldElement:
    field: FieldDesc
    coeffs: tuple[int, ...]

    def _check(self, other):
        if isinstance(other, int):
            return self.field.element([other])
        if other.field != self.field:
            raise ValueError("elements of different fields")
        return other

    def __add__(self, other):
        other = self._check(other)
        p = self.field.p
        return FieldElement(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FieldElement(self.field, tuple(-a % p for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        return FieldElement(self.field, self.field._mul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return FieldElement(self.field, self.field._pow(self.coeffs, e))

    def inverse(self) -> FieldElement:
        if self.is_zero():
            raise ZeroDivisionError("0 has no inverse")
        return self ** (self.field.order - 2)

    def __truediv__(self, other):
        return self * self._check(other).inverse()

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def frobenius(self, times: int = 1) -> FieldElement:
        return self ** (self.field.p**times)

    def encode(self) -> int:
        return self.field.encode(self.coeffs)

    def __int__(self):
        if any(self.coeffs[1:]):
            raise ValueError("element is not in the prime field")
        return self.coeffs[0]

    def __repr__(self):
        return f"FieldElement({self.coeffs}, p={self.field.p}, n={self.field.n})"


@lru_cache(maxsize=None)
def build_field(p: int, n: int) -> FieldDesc:
    if not is_prime(p):
        raise NotPrimeError(f"p={p} is not prime")
    if n < 1:
        raise InvalidInputError("extension degree must be >= 1")
    for v in range(p**n):
        coeffs = []
        w = v
        for _ in range(n):
            w, r = divmod(w, p)
            coeffs.append(r)
        f = coeffs + [1]
        if is_irreducible(f, p):
            return FieldDesc(p, n, tuple(f))
    raise AssertionError("no irreducible polynomial found")  # unreachable


def multiplicative_order_is_full(F: FieldDesc, coeffs) -> bool:
    Q1 = F.order - 1
    one = (1,) + (0,) * (F.n - 1)
    return all(F._pow(coeffs, Q1 // r) != one for r in prime_factors(Q1)) if Q1 > 1 else True


def generator(F: FieldDesc) -> FieldElement:
    """First primitive element in counter order."""
    if "generator" not in F._cache:
        for v in range(1, F.order):
            x = F.from_int(v)
            if multiplicative_order_is_full(F, x.coeffs):
                F._cache["generator"] = x
                break
    return F._cache["generator"]


def trace_to_prime(F: FieldDesc, x: FieldElement) -> int:
    acc = x
    y = x
    for _ in range(F.n - 1):
        y = y ** F.p
        acc = acc + y
    return int(acc)


def norm_to_subfield(x: FieldElement, q: int) -> FieldElement:
    """Direct norm x^{(Q-1)/(q-1)} from F_Q down to F_q (as an F_Q element)."""
    Q = x.field.order
    if (Q - 1) % (q - 1):
        raise ValueError("q is not a subfield order")
    return x ** ((Q - 1) // (q - 1))


def norm_exponent(q: int, k: int, e: int) -> int:
    """dlog of Norm(x) w.r.t. h = G^{(q^k-1)/(q-1)} when x = G^e.

    Norm(G^e) = G^{e (q^k-1)/(q-1)} = h^e, and h generates F_q^x, so the
    answer is e mod (q - 1) for every k.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    return e % (q - 1)


class DlogTable:
    """Full table of powers of a generator (desk-scale fields only)."""

    def __init__(self, F: FieldDesc, g: FieldElement | None = None):
        if F.order > ENUMERATION_LIMIT:
            raise InvalidInputError(f"|F|={F.order} exceeds enumeration limit")
        self.field = F
        self.g = generator(F) if g is None else g
        Q1 = F.order - 1
        powers = []
        index = {}
        cur = F.one.coeffs
        g_c = self.g.coeffs
        for e in range(Q1):
            code = F.encode(cur)
            if code in index:
                raise ValueError("g is not a generator")
            powers.append(code)
            index[code] = e
            cur = F._mul(cur, g_c)
        self.powers = powers  # encoded g^e
        self.index = index

    def __call__(self, x: FieldElement) -> int:
        if x.is_zero():
            raise ValueError("dlog of 0 is undefined")
        return self.index[x.encode()]

    def power(self, e: int) -> FieldElement:
        return self.field.from_int(self.powers[e % (self.field.order - 1)])

    @cached_property
    def traces(self) -> list[int]:
        """Tr(g^e) for e = 0 .. |F| - 2."""
        F = self.field
        bt = F.basis_traces
        p, n = F.p, F.n
        out = []
        for code in self.powers:
            t = 0
            for j in range(n):
                code, c = divmod(code, p)
                t += c * bt[j]
            out.append(t % p)
        return out


def dlog_table(F: FieldDesc) -> DlogTable:
    if "dlog" not in F._cache:
        F._cache["dlog"] = DlogTable(F)
    return F._cache["dlog"]


def dlog(F: FieldDesc, g: FieldElement, x: FieldElement) -> int:
    table = dlog_table(F)
    if table.g != g:
        table = DlogTable(F, g)
    return table(x)


def enumerate_units(F: FieldDesc) -> Iterator[FieldElement]:
    if F.order > ENUMERATION_LIMIT:
        raise InvalidInputError(f"|F|={F.order} exceeds enumeration limit")
    for v in range(1, F.order):
        yield F.from_int(v)


class Embedding:
    """A field embedding F_q -> F_Q fixed by a root of F_q's modulus.

    The root is the smallest (in counter order) root lying in F_Q; besides
    the mapped elements it records ``gen_exponent``, the dlog in F_Q of the
    image of F_q's canonical generator.
    """

    def __init__(self, small: FieldDesc, big: FieldDesc):
        if small.p != big.p or big.n % small.n:
            raise ValueError("no embedding between these fields")
        self.small, self.big = small, big
        table = dlog_table(big)
        step = (big.order - 1) // (small.order - 1)
        roots = []
        for code in [0] + [table.powers[j * step] for j in range(small.order - 1)]:
            y = big.from_int(code).coeffs
            acc = (0,) * big.n
            for c in reversed(small.modulus):
                acc = big._mul(acc, y)
                acc = (acc[0] + c,) + acc[1:] if c else acc
                acc = tuple(v % big.p for v in acc)
            if not any(acc):
                roots.append(code)
        self.root = big.from_int(min(roots))
        self.gen_exponent = table(self(generator(small)))

    def __call__(self, x: FieldElement) -> FieldElement:
        acc = self.big.zero
        rp = self.big.one
        for c in x.coeffs:
            if c:
                acc = acc + rp * c
            rp = rp * self.root
        return acc


@lru_cache(maxsize=None)
def embedding(small: FieldDesc, big: FieldDesc) -> Embedding:
    return Embedding(small, big)

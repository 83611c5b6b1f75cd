"""Artin-Hasse coefficients and the twisted Hasse polynomial of x^d + lambda x.

For 1 <= n <= d-1 and a twist component i (1 <= i <= b) put
``u' = u_{b-i}`` and ``alpha_l = (p l + u') mod d``.  The i-th component is
a signed sum over permutations tau of {0..n-1} with tau(l) <= alpha_l; it
collapses to a single monomial whose coefficient is a p-adic unit because,
after clearing factorials, it is a Vandermonde determinant in the alpha_l.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod

from ._nt import ord_p, to_residue
from .errors import Finding, InvalidInputError
from .finite_field import FieldElement, build_field
from .padic import zq_context
from .polygon import TwistContext


@dataclass(frozen=True)
class ArtinHasseTable:
    p: int
    coeffs: tuple[Fraction, ...]

    def __getitem__(self, n: int) -> Fraction:
        if n < 0:
            raise IndexError(f"negative Artin-Hasse index {n}")
        if n >= len(self.coeffs):
            raise IndexError(f"Artin-Hasse index {n} beyond table of size {len(self.coeffs)}")
        return self.coeffs[n]

    def __len__(self):
        return len(self.coeffs)

    def check_invariants(self) -> None:
        if self.coeffs[0] != 1:
            raise Finding("lambda_0 != 1")
        for n, c in enumerate(self.coeffs):
            if c.denominator % self.p == 0:
                raise Finding(f"lambda_{n} = {c} is not {self.p}-integral")
            if n < self.p and c != Fraction(1, factorial(n)):
                raise Finding(f"lambda_{n} != 1/{n}!")


@lru_cache(maxsize=None)
def artin_hasse(p: int, M: int) -> ArtinHasseTable:
    """Coefficients of exp(sum_i x^{p^i} / p^i) up to degree M.

    Differentiating E = exp(g) gives n lambda_n = sum_{p^i <= n} lambda_{n - p^i}.
    """
    if M < 0:
        raise ValueError("M must be >= 0")
    if M > 500:
        raise InvalidInputError("Artin-Hasse table limited to degree 500")
    powers = []
    pk = 1
    while pk <= M:
        powers.append(pk)
        pk *= p
    lam = [Fraction(1)]
    for n in range(1, M + 1):
        lam.append(sum((lam[n - pk] for pk in powers if pk <= n), Fraction(0)) / n)
    return ArtinHasseTable(p, tuple(lam))


def _twist_digit(ctx: TwistContext, i: int) -> int:
    if not 1 <= i <= ctx.b:
        raise InvalidInputError(f"component index i={i} outside [1, {ctx.b}]")
    return ctx.digit(ctx.b - i)


def _check_n(ctx, n):
    if not 1 <= n <= ctx.d - 1:
        raise InvalidInputError(f"n={n} outside [1, {ctx.d - 1}]")


def alphas(ctx: TwistContext, i: int, n: int) -> tuple[int, ...]:
    ui = _twist_digit(ctx, i)
    return tuple((ctx.p * l + ui) % ctx.d for l in range(n))


def s_ni_permutations(ctx: TwistContext, i: int, n: int) -> list[tuple[int, ...]]:
    """All permutations tau of {0..n-1} with tau(l) <= alpha_l, by backtracking."""
    _check_n(ctx, n)
    alpha = alphas(ctx, i, n)
    out = []
    used = [False] * n
    tau = []

    def extend(l):
        if l == n:
            out.append(tuple(tau))
            return
        for v in range(min(alpha[l], n - 1) + 1):
            if not used[v]:
                used[v] = True
                tau.append(v)
                extend(l + 1)
                tau.pop()
                used[v] = False

    extend(0)
    return out


def perm_sign(tau) -> int:
    inv = sum(1 for x in range(len(tau)) for y in range(x + 1, len(tau)) if tau[x] > tau[y])
    return -1 if inv % 2 else 1


@dataclass(frozen=True)
class HasseComponent:
    n: int
    i: int
    exponent: int
    coefficient: Fraction
    alpha: tuple[int, ...]


def hasse_component(ctx: TwistContext, table: ArtinHasseTable, i: int, n: int) -> HasseComponent:
    """The i-th component at n, computed as a full sum and as a monomial.

    The two computations must agree exactly; any mismatch is a bug.
    """
    _check_n(ctx, n)
    p, d = ctx.p, ctx.d
    ui = _twist_digit(ctx, i)
    alpha = alphas(ctx, i, n)
    perms = s_ni_permutations(ctx, i, n)

    # sum over S_{n,i} with floor / d*frac of (pl + u' - tau(l)) / d
    poly: dict[int, Fraction] = {}
    for tau in perms:
        term = Fraction(perm_sign(tau))
        deg = 0
        for l in range(n):
            m = p * l + ui - tau[l]
            rem = m % d
            term *= table[m // d] * table[rem]
            deg += rem
        poly[deg] = poly.get(deg, Fraction(0)) + term
    poly = {k: v for k, v in poly.items() if v}

    exponent = sum(alpha[l] - l for l in range(n))
    coeff = Fraction(0)
    for tau in perms:
        coeff += perm_sign(tau) * prod(
            (table[(p * l + ui) // d] * table[alpha[l] - tau[l]] for l in range(n)), start=Fraction(1))
    monomial = {exponent: coeff} if coeff else {}
    if poly != monomial:
        raise Finding(f"sum and monomial forms disagree at n={n}, i={i}: {poly} vs {monomial}")
    return HasseComponent(n, i, exponent, coeff, alpha)


@dataclass(frozen=True)
class VandermondeCertificate:
    n: int
    i: int
    alpha: tuple[int, ...]
    product: int  # prod_{l<j} (alpha_l - alpha_j)
    residue: int  # product mod p
    sign: int  # u_{n,i} f = sign * product


def vandermonde_certificate(ctx: TwistContext, i: int, n: int, table: ArtinHasseTable | None = None) -> VandermondeCertificate:
    """Check u_{n,i} f^{(i)}_{n,p} = det M against the alpha-differences.

    Exactly, u f = prod_{l<j} (alpha_j - alpha_l), i.e. the product of
    (alpha_l - alpha_j) times (-1)^{n(n-1)/2}; the residue returned is that of
    prod_{l<j} (alpha_l - alpha_j) and must be nonzero mod p.
    """
    _check_n(ctx, n)
    if table is None:
        table = artin_hasse(ctx.p, required_table_size(ctx))
    p, d = ctx.p, ctx.d
    ui = _twist_digit(ctx, i)
    alpha = alphas(ctx, i, n)
    product = prod((alpha[l] - alpha[j] for l in range(n) for j in range(l + 1, n)), start=1)
    residue = product % p
    if residue == 0:
        raise Finding(f"Vandermonde product vanishes mod p at n={n}, i={i}")
    comp = hasse_component(ctx, table, i, n)
    u_ni = prod((factorial((p * l + ui) // d) * factorial(alpha[l]) for l in range(n)), start=1)
    cleared = u_ni * comp.coefficient
    sign = (-1) ** (n * (n - 1) // 2)
    if cleared != sign * product:
        raise Finding(f"u_(n,i) f = {cleared} but Vandermonde gives {sign * product} at n={n}, i={i}")
    return VandermondeCertificate(n, i, alpha, product, residue, sign)


def required_table_size(ctx: TwistContext) -> int:
    """Artin-Hasse degree needed for every component with n <= d - 1."""
    need = ctx.d
    for i in range(1, ctx.b + 1):
        ui = _twist_digit(ctx, i)
        need = max(need, (ctx.p * (ctx.d - 2) + ui) // ctx.d + 1)
    return need


@dataclass(frozen=True)
class HasseMonomial:
    n: int
    exponent: int
    coefficient: int  # mod p
    components: tuple[HasseComponent, ...]


def hasse_polynomial(ctx: TwistContext, table: ArtinHasseTable, n: int) -> HasseMonomial:
    """Product of the b components, reduced mod p; must be nonzero."""
    _check_n(ctx, n)
    comps = tuple(hasse_component(ctx, table, i, n) for i in range(1, ctx.b + 1))
    exponent = sum(c.exponent for c in comps)
    coeff = prod((c.coefficient for c in comps), start=Fraction(1))
    if coeff == 0 or ord_p(coeff, ctx.p) > 0:
        raise Finding(f"Hasse polynomial vanishes mod p at n={n} for {ctx}")
    return HasseMonomial(n, exponent, to_residue(coeff, ctx.p, ctx.p), comps)


def hasse_value_at_lambda(ctx: TwistContext, table: ArtinHasseTable, n: int, lam: FieldElement) -> FieldElement:
    """H_{n,u}(teich(lambda)) reduced mod p, as an element of F_q."""
    if lam.is_zero():
        raise InvalidInputError("lambda must be nonzero")
    H = hasse_polynomial(ctx, table, n)
    zq = zq_context(build_field(ctx.p, ctx.a), 1)
    value = zq.teichmuller(lam) ** H.exponent * H.coefficient
    return value.reduce()


def hasse_norm_at_lambda(ctx: TwistContext, table: ArtinHasseTable, n: int, lam: FieldElement) -> int:
    """Norm from F_q to F_p of the mod-p Hasse value."""
    v = hasse_value_at_lambda(ctx, table, n, lam)
    return int(v ** ((ctx.q - 1) // (ctx.p - 1)))

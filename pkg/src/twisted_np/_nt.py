"""Small integer helpers used across the package."""

from fractions import Fraction
from math import floor, isqrt


def is_prime(n):
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for f in range(3, isqrt(n) + 1, 2):
        if n % f == 0:
            return False
    return True


def prime_factors(n):
    """Distinct prime factors of ``n >= 1`` by trial division."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def frac(x):
    """Fractional part ``x - floor(x)`` of a rational, exactly."""
    x = Fraction(x)
    return x - floor(x)


def ord_p(x, p):
    """p-adic valuation of a nonzero int or Fraction."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("ord_p(0) is infinite")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def to_residue(x, modulus, p):
    """Reduce a p-integral rational into Z/modulus (modulus a power of p)."""
    x = Fraction(x)
    if x.denominator % p == 0:
        raise ValueError(f"{x} is not {p}-integral")
    return x.numerator * pow(x.denominator, -1, modulus) % modulus

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from twisted_np.finite_field import build_field
from twisted_np.padic import (
    AtLeast,
    invert_unit,
    pi_valuation,
    ramified_ring,
    require_exact,
    zeta_p_power,
    zq_context,
)
from twisted_np.errors import PrecisionError

CONTEXTS = [(5, 1, 3), (7, 1, 2), (5, 2, 3), (3, 2, 4), (11, 1, 2)]


def test_modulus_shared_with_field():
    for p, a, N in CONTEXTS:
        F = build_field(p, a)
        zq = zq_context(F, N)
        assert zq.modulus == F.modulus
        assert zq.field is F


def test_teichmuller_examples():
    F = build_field(5, 1)
    zq = zq_context(F, 2)
    assert zq.teichmuller(F.zero).coeffs == (0,)
    assert zq.teichmuller(F.one).coeffs == (1,)
    assert zq.teichmuller(F.from_int(4)).coeffs == (24,)
    assert zq.teichmuller(F.from_int(2)).coeffs == (7,)
    # brute scan oracle
    assert [t for t in range(25) if t % 5 == 2 and pow(t, 4, 25) == 1] == [7]


@pytest.mark.parametrize("p,a,N", CONTEXTS)
def test_teichmuller_properties(p, a, N):
    F = build_field(p, a)
    zq = zq_context(F, N)

    @given(st.integers(0, F.order - 1), st.integers(0, F.order - 1))
    def check(i, j):
        x, y = F.from_int(i), F.from_int(j)
        tx, ty = zq.teichmuller(x), zq.teichmuller(y)
        assert tx ** F.order == tx
        assert tx.reduce() == x
        assert zq.teichmuller(x * y) == tx * ty

    check()


def ram_elements(R):
    pN = R.zq.pN
    coord = st.lists(st.integers(0, pN - 1), min_size=R.zq.a, max_size=R.zq.a)
    return st.lists(coord, min_size=R.rank, max_size=R.rank).map(R.element)


def test_zeta_examples():
    R = ramified_ring(5, 1, 3)
    assert zeta_p_power(R, 0) == R.one
    assert zeta_p_power(R, 1) == R.one + R.pi
    total = R.zero
    for e in range(5):
        total = total + zeta_p_power(R, e)
    assert total.is_zero()
    assert (R.one + R.pi) ** 5 == R.one


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_cyclotomic_relations(p):
    R = ramified_ring(p, 1, 4)
    assert (R.one + R.pi) ** p == R.one
    total = R.zero
    for e in range(p):
        total = total + R.zeta_power(e)
    assert total.is_zero()
    assert R.zeta_power(2) * R.zeta_power(p - 2) == R.one


def test_valuation_examples():
    R = ramified_ring(5, 1, 4)
    assert pi_valuation(R.pi) == 1
    assert pi_valuation(R.element([5])) == 4
    assert pi_valuation(R.element([4, 5, 2])) == 0
    assert pi_valuation(R.element([0, 5, 2])) == 2
    assert pi_valuation(R.zero) == AtLeast(16)
    # pi^{p-1} = -p * unit
    assert pi_valuation(R.pi ** 4) == 4
    assert pi_valuation(R.pi ** 7) == 7


def test_require_exact():
    R = ramified_ring(5, 1, 2)
    assert require_exact(pi_valuation(R.pi)) == 1
    with pytest.raises(PrecisionError):
        require_exact(pi_valuation(R.zero))


@pytest.mark.parametrize("p,a,N", CONTEXTS)
def test_valuation_properties(p, a, N):
    R = ramified_ring(p, a, N)
    bound = R.valuation_bound

    @given(ram_elements(R), ram_elements(R))
    def check(x, y):
        vx, vy = pi_valuation(x), pi_valuation(y)
        if isinstance(vx, AtLeast) or isinstance(vy, AtLeast):
            return
        vxy = pi_valuation(x * y)
        if vx + vy < bound:
            assert vxy == vx + vy
        else:
            assert isinstance(vxy, AtLeast) or vxy >= vx + vy
        vs = pi_valuation(x + y)
        if vx != vy:
            assert vs == min(vx, vy)
        else:
            assert isinstance(vs, AtLeast) or vs >= vx

    check()


@pytest.mark.parametrize("p,a,N", CONTEXTS)
def test_residue_is_homomorphism(p, a, N):
    R = ramified_ring(p, a, N)

    @given(ram_elements(R), ram_elements(R))
    def check(x, y):
        assert (x * y).residue() == x.residue() * y.residue()
        assert (x + y).residue() == x.residue() + y.residue()

    check()


def test_invert_unit_examples():
    R = ramified_ring(7, 1, 3)
    assert invert_unit(R.one) == R.one
    z = R.one + R.pi
    assert invert_unit(z) * z == R.one
    inv2 = invert_unit(R.element([2]))
    assert inv2 == R.element([pow(2, -1, 343)])
    assert inv2 * 2 == R.one
    with pytest.raises(ZeroDivisionError):
        invert_unit(R.pi)


@pytest.mark.parametrize("p,a,N", CONTEXTS)
def test_invert_unit_random(p, a, N):
    R = ramified_ring(p, a, N)

    @given(ram_elements(R))
    def check(x):
        if pi_valuation(x) == 0:
            assert invert_unit(x) * x == R.one

    check()


def test_zq_unit_inverse_and_ord():
    F = build_field(5, 2)
    zq = zq_context(F, 3)
    x = zq.element([3, 7])
    assert x.is_unit()
    assert x * x.inverse() == zq.one
    assert zq.element([25, 50]).ord_p() == 2
    assert zq.zero.ord_p() == 3


def test_valuation_is_fraction():
    R = ramified_ring(5, 1, 2)
    assert isinstance(pi_valuation(R.pi), Fraction)

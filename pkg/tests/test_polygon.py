from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from twisted_np._nt import frac
from twisted_np.errors import (
    CharacteristicDividesDegreeError,
    DegreeError,
    NotPrimeError,
    TwistRangeError,
)
from twisted_np.polygon import (
    NewtonPolygon,
    arith_polygon,
    arith_slope,
    arith_value,
    compare_polygons,
    hodge_polygon,
    level_slopes,
    lower_hull,
    make_context,
    rational_str,
    scale_polygon,
)

PRIMES = [5, 7, 11, 13, 17, 19, 23]


@st.composite
def contexts(draw, a_max=2):
    p = draw(st.sampled_from(PRIMES))
    a = draw(st.integers(1, a_max))
    d = draw(st.sampled_from([d for d in range(2, 6) if d % p]))
    u = draw(st.integers(0, p**a - 2))
    return make_context(p, a, d, u)


def test_context_examples():
    c = make_context(11, 2, 3, 14)
    assert (c.digits, c.b, c.s) == ((3, 1), 2, (14, 34))
    c = make_context(5, 1, 2, 0)
    assert (c.digits, c.b, c.s) == ((0,), 1, (0,))


def test_context_errors_are_distinct():
    with pytest.raises(TwistRangeError):
        make_context(11, 2, 3, 120)
    with pytest.raises(NotPrimeError):
        make_context(9, 1, 2, 0)
    with pytest.raises(DegreeError):
        make_context(5, 1, 1, 0)
    with pytest.raises(CharacteristicDividesDegreeError):
        make_context(5, 1, 5, 0)
    with pytest.raises(TwistRangeError):
        make_context(5, 1, 2, -1)


@given(contexts(a_max=3))
def test_context_invariants(c):
    q = c.q
    assert sum(x * c.p**i for i, x in enumerate(c.digits)) == c.u
    assert c.a % c.b == 0
    assert (c.p**c.b * c.u - c.u) % (q - 1) == 0
    assert all((c.p**k * c.u - c.u) % (q - 1) for k in range(1, c.b))
    for i, s in enumerate(c.s):
        assert 0 <= s < q - 1 and s == c.p**i * c.u % (q - 1)


def test_slope_examples():
    assert arith_slope(make_context(11, 1, 3, 0), 1) == 4
    assert arith_slope(make_context(11, 1, 3, 1), 0) == 1
    assert arith_slope(make_context(11, 1, 3, 0), 0) == 0
    assert [arith_slope(make_context(11, 1, 3, 1), n) for n in range(3)] == [1, 3, 7]


def test_polygon_examples():
    assert arith_polygon(make_context(11, 1, 3, 0), 3).values(3) == (0, 0, 4, 10)
    assert arith_polygon(make_context(11, 1, 3, 1), 3).values(3) == (0, 1, 4, 11)
    assert arith_polygon(make_context(7, 1, 2, 0), 1).values(1) == (0, 0)


def test_hodge_examples():
    H = hodge_polygon(make_context(11, 1, 3, 0), 3)
    assert H.slopes == (0, F(1, 3), F(2, 3)) and H(3) == 1
    assert hodge_polygon(make_context(11, 1, 3, 1), 1).slopes == (F(1, 30),)


def _slope_from_definition(c, n):
    # integer form for b = 1: pn + u = dA + r, n = dB + s, omega = A - B + r - s
    A, r = divmod(c.p * n + c.u, c.d)
    B, s = divmod(n, c.d)
    return A - B + r - s


def _slope_literal(c, n):
    b = c.b
    mean = F(sum(c.digits[:b]), b)
    fr = sum(frac(F(c.p * n + c.digits[i], c.d)) - frac(F(n, c.d)) for i in range(b))
    return ((c.p - 1) * n + mean) / c.d + (c.d - 1) * fr / b


@given(contexts(a_max=3), st.integers(0, 40))
def test_slope_matches_literal_definition(c, n):
    assert arith_slope(c, n) == _slope_literal(c, n)


@given(contexts(a_max=1), st.integers(0, 40))
def test_slope_integer_form_a1(c, n):
    assert arith_slope(c, n) == _slope_from_definition(c, n)


@given(contexts(), st.integers(0, 30))
def test_periodicity(c, n):
    assert arith_slope(c, n + c.d) == arith_slope(c, n) + c.p - 1


@given(contexts())
def test_contact_at_d_and_domination(c):
    d = c.d
    P = arith_polygon(c, 3 * d)
    H = scale_polygon(hodge_polygon(c, 3 * d), c.p - 1)
    assert P(d) == c.digit_mean + F((c.p - 1) * (d - 1), 2) == H(d)
    if c.hypothesis_holds:
        rep = compare_polygons(P, H, 3 * d)
        assert rep.dominated and {0, d} <= rep.contact_points


@given(contexts())
def test_convex_and_nonnegative_under_hypothesis(c):
    sl = [arith_slope(c, n) for n in range(3 * c.d)]
    assert all(s >= 0 for s in sl)
    if c.hypothesis_holds:
        assert all(x <= y for x, y in zip(sl, sl[1:]))


@given(contexts())
def test_frobenius_twist_invariance(c):
    u2 = c.p * c.u % (c.q - 1)
    c2 = make_context(c.p, c.a, c.d, u2)
    assert sorted(c2.digits) == sorted(c.digits)
    assert [arith_slope(c, n) for n in range(2 * c.d)] == [arith_slope(c2, n) for n in range(2 * c.d)]
    assert hodge_polygon(c, 4) == hodge_polygon(c2, 4)


def test_arith_value_matches_polygon():
    c = make_context(13, 2, 4, 100)
    P = arith_polygon(c, 8)
    assert all(P(n) == arith_value(c, n) for n in range(9))


def test_lower_hull_examples():
    assert lower_hull([(0, 0), (1, 0), (2, 1)]).points == ((0, 0), (1, 0), (2, 1))
    assert lower_hull([(0, 0), (1, 5), (2, 1)]).points == ((0, 0), (2, 1))
    assert lower_hull([(0, 0), (1, F(1, 2)), (2, 1), (3, 3)]).points == ((0, 0), (2, 1), (3, 3))
    with pytest.raises(ValueError):
        lower_hull([(0, 0), (0, 1)])


def brute_hull_value(points, x):
    """Lower envelope at x: min over segments (and points) spanning x."""
    best = None
    for (x0, y0), (x1, y1) in combinations(sorted(points), 2):
        if x0 <= x <= x1:
            v = y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            best = v if best is None else min(best, v)
    for px, py in points:
        if px == x:
            best = py if best is None else min(best, py)
    return best


def is_lower_hull(points, hull):
    xs = sorted(x for x, _ in points)
    for x in xs:
        assert hull(x) == brute_hull_value(points, x)
    for x0, x1 in zip(xs, xs[1:]):
        mid = (x0 + x1) / 2
        assert hull(mid) == brute_hull_value(points, mid)
    return True


point_sets = st.lists(
    st.tuples(st.integers(0, 12), st.fractions(min_value=-10, max_value=10, max_denominator=6)),
    min_size=1, max_size=8, unique_by=lambda t: t[0])


@given(point_sets)
def test_lower_hull_matches_brute_force(pts):
    pts = [(F(x), F(y)) for x, y in pts]
    hull = lower_hull(pts)
    assert hull.is_convex()
    assert is_lower_hull(pts, hull)
    assert all(y >= hull(x) for x, y in pts)


def test_compare_polygons():
    c = make_context(11, 1, 3, 0)
    rep = compare_polygons(arith_polygon(c, 3), scale_polygon(hodge_polygon(c, 3), 10), 3)
    assert rep.dominated and {0, 3} <= rep.contact_points
    P = arith_polygon(c, 3)
    assert compare_polygons(P, P, 3).contact_points == {0, 1, 2, 3}
    Q = NewtonPolygon(((0, 0), (1, 1), (3, 10)))
    rep = compare_polygons(P, Q, 3)
    assert not rep.dominated
    with pytest.raises(ValueError):
        compare_polygons(P, P, 4)


def test_scale_polygon():
    c = make_context(5, 2, 2, 7)
    P = arith_polygon(c, 2)
    assert scale_polygon(P, 1) == P
    assert scale_polygon(P, 2).slopes == tuple(2 * s for s in P.slopes)
    assert scale_polygon(P, c.a)(2) == 2 * P(2)


def test_level_slopes_examples():
    c = make_context(11, 1, 3, 0)
    assert level_slopes(c, 1, 6) == (0, 4, 6, 10, 14, 16)
    assert level_slopes(c, 1, 3) == tuple(arith_slope(c, n) for n in range(3))


@given(contexts(), st.integers(1, 2))
def test_level_slopes_properties(c, m):
    count = 3 * c.d
    sl = level_slopes(c, m, count)
    assert list(sl) == sorted(sl)
    if m == 1 and c.hypothesis_holds:
        assert sl == tuple(arith_slope(c, n) for n in range(count))
        assert all(sl[n + c.d] - sl[n] == c.p - 1 for n in range(count - c.d))


def test_rational_strings():
    assert rational_str(F(3, 6)) == "1/2"
    assert rational_str(4) == "4/1"
    assert NewtonPolygon(((0, 0), (1, F(1, 3)))).to_json() == [["0/1", "0/1"], ["1/1", "1/3"]]

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import macaulay_member, random_dict_poly, seeded
from sbk import groebner as gb
from sbk.errors import ParseError, ResourceCapError, TruncationError
from sbk.exponents import ExpVector, SymPoly
from sbk.truncated import (Caps, TruncatedIdeal, TruncPoly, expand, ideal_member, parse_text,
                           shift, to_text)

V = ExpVector.parse


def y(i, j, n=2, D=2):
    return TruncPoly.var(n, D, i, j)


def test_expand_examples():
    assert expand(V("x", "1"), 1) == y(1, 1, D=1) * y(2, 0, D=1)
    assert expand(V("x^2+1", "x"), 2) == y(1, 2) * y(1, 0) * y(2, 1)
    assert expand(V("0", "0"), 3) == TruncPoly.const(2, 3, 1)
    with pytest.raises(TruncationError):
        expand(V("x^3", "0"), 2)


def test_shift_examples():
    B = y(1, 1) * y(2, 0) - y(1, 0) * y(2, 1)
    assert shift(B) == y(1, 2) * y(2, 1) - y(1, 1) * y(2, 2)
    five = TruncPoly.const(2, 2, 5)
    assert shift(five) == five
    with pytest.raises(TruncationError):
        shift(y(1, 2))


def test_ideal_member_examples():
    g = y(1, 1) * y(2, 0) - y(1, 0) * y(2, 1)
    assert ideal_member(g, TruncatedIdeal(2, 2, [g]))
    assert ideal_member(y(1, 0) * y(2, 0), TruncatedIdeal(2, 2, [y(1, 0)]))
    C = y(1, 2) * y(2, 0) - y(1, 0) * y(2, 2)
    I = TruncatedIdeal(2, 2, [g, shift(g)])
    assert ideal_member(y(2, 1) * C, I)
    assert y(2, 1) * C == y(2, 0) * shift(g) + y(2, 2) * g
    assert not ideal_member(C, I)


def test_cofactors_reconstruct():
    g = y(1, 1) * y(2, 0) - y(1, 0) * y(2, 1)
    I = TruncatedIdeal(2, 2, [g, shift(g)])
    C = y(1, 2) * y(2, 0) - y(1, 0) * y(2, 2)
    p = y(2, 1) * C
    cofs = I.cofactors(p)
    assert sum((c * h for c, h in zip(cofs, I.generators)), TruncPoly.zero(2, 2)) == p
    assert I.cofactors(C) is None


def test_text_round_trip_and_errors():
    p = parse_text("3 * y[1][0]^2 * y[2][1] + -1/2 * y[1][2] + 4", 2, 2)
    assert parse_text(to_text(p), 2, 2) == p
    assert parse_text("y[1][0] - y[2][0]", 2, 0) == TruncPoly.var(2, 0, 1, 0) - TruncPoly.var(2, 0, 2, 0)
    assert to_text(TruncPoly.zero(1, 1)) == "0"
    with pytest.raises(ParseError):
        parse_text("y[3][0]", 2, 1)
    with pytest.raises(ParseError):
        parse_text("z[1][0]", 2, 1)


def test_completion_cap():
    # x^2 - y, y^2 - z, z^2 - x needs several S-pairs
    gens = [{(2, 0, 0): 1, (0, 1, 0): -1}, {(0, 2, 0): 1, (0, 0, 1): -1}, {(0, 0, 2): 1, (1, 0, 0): -1},
            {(1, 1, 0): 1, (0, 0, 1): -1}]
    basis, _ = gb.buchberger(gens)
    assert basis
    with pytest.raises(ResourceCapError):
        gb.buchberger(gens, max_pairs=1)


def test_monomial_order_leading_variable():
    # y[1][0] is the largest variable
    p = y(1, 0) + y(2, 2)
    assert p.leading_monomial() == (1, 0, 0, 0, 0, 0)


def test_retrunc():
    p = y(1, 1, D=1) * y(2, 0, D=1)
    assert p.retrunc(3).retrunc(1) == p
    with pytest.raises(TruncationError):
        y(1, 3, D=3).retrunc(2)


vectors = st.tuples(st.lists(st.integers(0, 2), max_size=3), st.lists(st.integers(0, 2), max_size=3))


@given(vectors, vectors)
def test_expand_is_multiplicative(a, b):
    f = ExpVector((SymPoly(tuple(a[0])), SymPoly(tuple(a[1]))))
    g = ExpVector((SymPoly(tuple(b[0])), SymPoly(tuple(b[1]))))
    assert expand(f + g, 4) == expand(f, 4) * expand(g, 4)


def _random_trunc(rng, n, D, terms):
    width = n * (D + 1)
    top = [k for k in range(width) if k % (D + 1) != D]
    out = {}
    for _ in range(terms):
        m = [0] * width
        for _ in range(rng.randint(0, 2)):
            m[rng.choice(top)] += 1
        out[tuple(m)] = rng.randint(-3, 3)
    return TruncPoly(n, D, out)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_shift_is_ring_endomorphism(seed):
    rng = seeded(seed)
    p, q = _random_trunc(rng, 2, 2, 3), _random_trunc(rng, 2, 2, 3)
    if (p * q).max_shift() < 2:
        assert shift(p * q) == shift(p) * shift(q)
    assert shift(p + q) == shift(p) + shift(q)


def membership_instances(count, seed):
    """(p, gens, nvars) with generator degree <= 3, <= 3 generators, <= 4 variables."""
    rng = seeded(seed)
    out = []
    while len(out) < count:
        nvars = rng.randint(2, 4)
        gens = [random_dict_poly(rng, nvars, 3, rng.randint(1, 3)) for _ in range(rng.randint(1, 3))]
        gens = [g for g in gens if g]
        if not gens:
            continue
        if rng.random() < 0.5:
            p = {}
            for g in gens:
                a = random_dict_poly(rng, nvars, 1, 2)
                p = gb.p_add_scaled(p, gb.p_mul(a, g), 1, (0,) * nvars)
        else:
            p = random_dict_poly(rng, nvars, 3, 3)
        out.append((p, gens, nvars))
    return out


def oracle_degree(p, gens):
    deg = max([sum(m) for m in p] + [sum(m) for g in gens for m in g] + [0])
    return deg + 2


def test_ideal_member_agrees_with_linear_algebra():
    disagreements = 0
    members = 0
    for p, gens, nvars in membership_instances(100, 99):
        exact = TruncatedIdeal(1, nvars - 1, [TruncPoly(1, nvars - 1, g) for g in gens])
        fast = exact.contains(TruncPoly(1, nvars - 1, p))
        slow = macaulay_member(p, gens, nvars, oracle_degree(p, gens))
        members += fast
        disagreements += fast != slow
    assert disagreements == 0
    assert 20 < members < 90


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_ideal_closed_under_combinations(seed):
    rng = seeded(seed)
    n, D = 2, 1
    gens = [_random_trunc(rng, n, D, 2) for _ in range(2)]
    I = TruncatedIdeal(n, D, gens)
    p = gens[0] * _random_trunc(rng, n, D, 2)
    q = gens[-1] * _random_trunc(rng, n, D, 2)
    a, b = _random_trunc(rng, n, D, 2), _random_trunc(rng, n, D, 2)
    assert I.contains(p) and I.contains(q)
    assert I.contains(a * p + b * q)


def test_result_independent_of_generator_order():
    rng = seeded(3)
    for _ in range(20):
        gens = [random_dict_poly(rng, 3, 2, 2) for _ in range(3)]
        gens = [g for g in gens if g]
        p = random_dict_poly(rng, 3, 3, 3)
        a = TruncatedIdeal(1, 2, [TruncPoly(1, 2, g) for g in gens])
        b = TruncatedIdeal(1, 2, [TruncPoly(1, 2, g) for g in reversed(gens)])
        assert a.contains(TruncPoly(1, 2, p)) == b.contains(TruncPoly(1, 2, p))
        assert sorted(map(str, (TruncPoly(1, 2, g) for g in a.groebner()))) == \
            sorted(map(str, (TruncPoly(1, 2, g) for g in b.groebner())))


def test_caps_are_configurable():
    caps = Caps(max_pairs=5, max_basis=3)
    gens = [TruncPoly(1, 3, random_dict_poly(seeded(k), 4, 3, 3)) for k in range(4)]
    with pytest.raises(ResourceCapError):
        TruncatedIdeal(1, 3, gens, caps).contains(TruncPoly.var(1, 3, 1, 0))

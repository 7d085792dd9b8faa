import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import combos, linearize, random_lattice, random_vector, seeded, snf_solvable
from sbk.basis import DiffBinomial, binomial_of
from sbk.errors import ParseError, ResourceCapError
from sbk.exponents import ExpVector, SymPoly
from sbk.intlin import solve_integer
from sbk.lattice import (Lattice, OmMap, enumerate_elements, lattice_of_binomials, sat_M,
                         sign_pattern, signature, solve_member, truncated_member)

V = ExpVector.parse
DIAG = Lattice(2, (V("x-1", "1-x"),))
MIRROR = Lattice(2, (V("x^2-x+1", "-x^2+x-1"),))
SKEW = Lattice(2, (V("x^2-x+1", "x-1"),))


def test_generators_are_canonical():
    L = Lattice(2, (V("1-x", "x-1"), V("x-1", "1-x"), V("0", "0")))
    assert L.generators == (V("x-1", "1-x"),)
    # integer content is kept: dividing it out would change the module
    assert Lattice(2, (V("2x-2", "2-2x"),)).generators == (V("2x-2", "2-2x"),)


def test_lattice_rejects_wrong_length():
    with pytest.raises(ValueError):
        Lattice(2, (V("x", "1", "1"),))


def test_lattice_json_round_trip(tmp_path):
    path = tmp_path / "l.json"
    path.write_text(json.dumps(SKEW.to_json()))
    assert Lattice.load(path) == SKEW
    path.write_text('{"n": 2, "generators": [[[1]]]}')
    with pytest.raises(ParseError):
        Lattice.load(path)


def test_sign_pattern_examples():
    assert str(sign_pattern(V("x-1", "1-x"))) == "+-"
    assert str(sign_pattern(V("x^2-x+1", "x-1"))) == "++"
    assert sign_pattern(V("0", "0")).is_zero_pattern


def test_signature_examples():
    assert signature(V("x-1", "1-x")) == (1, 1, 1, 1, 0, 0)
    assert signature(V("x^2-x+1", "-x^2+x-1")) == (2, 1, 2, 1, 1, 1)
    assert signature(V("x^3+1", "-x^3-1")) == (3, 1, 3, 1, -1, -1)


def test_enumerate_examples():
    assert V("x^2-1", "1-x^2") in enumerate_elements(DIAG, 1, 1)
    assert enumerate_elements(Lattice(2), 2, 2) == []
    assert V("x^3+1", "-x^3-1") in enumerate_elements(MIRROR, 1, 1)
    assert len(enumerate_elements(DIAG, 1, 1)) == 8


def test_enumerate_cap():
    with pytest.raises(ResourceCapError):
        enumerate_elements(DIAG, 5, 3, max_combinations=100)


def test_truncated_member_examples():
    assert truncated_member(DIAG, V("x^2-1", "1-x^2"), 1)
    assert truncated_member(MIRROR, V("0", "0"), 0)
    for d in range(4):
        assert not truncated_member(DIAG, V("x-1", "x-1"), d)


def test_solve_member_returns_cofactors():
    v = V("x^2-1", "1-x^2")
    (c,) = solve_member(DIAG, v, 1)
    assert c == SymPoly.parse("x+1")


def test_solve_integer_small():
    assert solve_integer([[2, 4], [1, 3]], [6, 4]) is not None
    assert solve_integer([[2, 4]], [3]) is None
    z = solve_integer([[6, 10, 15]], [1])
    assert 6 * z[0] + 10 * z[1] + 15 * z[2] == 1


def test_sat_m_examples():
    assert sat_M(DIAG) == DIAG
    L = Lattice(2, (V("2x-2", "2-2x"),))
    out = sat_M(L, OmMap({2: 1}))
    assert truncated_member(out, V("x^2-2x+1", "-x^2+2x-1"), 2)
    assert sat_M(Lattice(2)) == Lattice(2)
    with pytest.raises(ValueError):
        sat_M(DIAG, m_bound=1)


def test_sat_m_contains_input_and_is_idempotent():
    L = Lattice(2, (V("2x-2", "2-2x"), V("3", "0")))
    out = sat_M(L)
    for g in L.generators:
        assert truncated_member(out, g, 0)
    again = sat_M(out)
    for g in again.generators:
        assert truncated_member(out, g, 2)


def test_om_map_requires_unit_at_one():
    with pytest.raises(ValueError):
        OmMap({1: 2})


def test_lattice_of_binomials_examples():
    B = DiffBinomial.parse(["x", "1"], ["1", "x"])
    assert lattice_of_binomials([B]) == DIAG
    assert lattice_of_binomials([], n=2) == Lattice(2)
    B4 = DiffBinomial.parse(["x^2+1", "x"], ["x", "x^2+1"])
    assert lattice_of_binomials([B4]) == MIRROR


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=3), st.lists(st.integers(-3, 3), min_size=1, max_size=3))
def test_sign_and_signature_under_negation(a, b):
    h = ExpVector((SymPoly(tuple(a)), SymPoly(tuple(b))))
    assert sign_pattern(-h) == sign_pattern(h).flipped()
    assert signature(-h) == signature(h)


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=3), st.lists(st.integers(-3, 3), min_size=1, max_size=3))
def test_binomial_round_trip(a, b):
    h = ExpVector((SymPoly(tuple(a)), SymPoly(tuple(b))))
    if h.is_zero():
        return
    v = lattice_of_binomials([binomial_of(h)]).generators[0]
    assert v in (h, -h)


def test_truncated_member_monotone_in_degree():
    rng = seeded(11)
    for _ in range(40):
        L = random_lattice(rng, rng.randint(1, 2), rng.randint(1, 2), 1, 2)
        v = random_vector(rng, L.n, 2, 2)
        for d in range(3):
            if truncated_member(L, v, d):
                assert truncated_member(L, v, d + 1)


def random_instances(count, seed):
    """(L, v, d, H) with roughly half the vectors drawn from bounded combinations."""
    rng = seeded(seed)
    out = []
    while len(out) < count:
        n = rng.randint(1, 3)
        k = rng.randint(1, 2)
        d = rng.randint(0, 2)
        H = rng.randint(1, 2)
        if (2 * H + 1) ** ((d + 1) * k) > 20_000:
            continue
        L = random_lattice(rng, n, k, max_deg=2, height=2)
        if L.is_zero():
            continue
        if rng.random() < 0.5:
            v = ExpVector.zero(n)
            for g in L.generators:
                c = SymPoly(tuple(rng.randint(-H, H) for _ in range(d + 1)))
                v = v + g.scale(c)
        else:
            v = random_vector(rng, n, 3, 3)
        out.append((L, v, d, H))
    return out


def test_truncated_member_agrees_with_enumeration_and_snf():
    disagreements = 0
    for L, v, d, H in random_instances(200, 2024):
        fast = truncated_member(L, v, d)
        rows, rhs = linearize(L, v, d)
        if fast != snf_solvable(rows, rhs):
            disagreements += 1
        if v in combos(L, d, H) and not fast:
            disagreements += 1
    assert disagreements == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_enumeration_is_within_membership(seed):
    rng = seeded(seed)
    L = random_lattice(rng, rng.randint(1, 2), 1, 1, 2)
    for v in enumerate_elements(L, 1, 1):
        assert truncated_member(L, v, 1)

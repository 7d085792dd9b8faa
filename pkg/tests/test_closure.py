import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import seeded
from sbk.basis import DiffBinomial, binomial_of, compute_basis
from sbk.certificates import check_certificate
from sbk.closure import (ClosureConfig, FactoredBinomial, Node, candidate_family, closure_saturate,
                         colon_m, decompose, in_monomial_ideal, is_quasi_normal, is_saturated,
                         parse_rules, respects_monomial_ideal, same_ideal, t_saturated_closure)
from sbk.errors import PreconditionError, ResourceCapError
from sbk.exponents import ExpVector, SymPoly
from sbk.lattice import Lattice, enumerate_elements, truncated_member
from sbk.truncated import TruncatedIdeal, TruncPoly, shift

V = ExpVector.parse
B = DiffBinomial.parse(["x", "1"], ["1", "x"])
C = DiffBinomial.parse(["x^2", "1"], ["1", "x^2"])
NO_RADICAL = dict(radical=False)


def y(i, j, D):
    return TruncPoly.var(2, D, i, j)


def test_parse_rules():
    assert parse_rules("shift,wellmixed") == {"shift": True, "wellmixed": True, "radical": False}
    with pytest.raises(ValueError):
        parse_rules("shift,magic")
    with pytest.raises(ValueError):
        ClosureConfig(D=0)


def test_candidate_family_small():
    fam = candidate_family(1, 1, max_deg=1, height=1)
    # two variables: 2 monomials, 2 of the form m - 1, one coprime pair
    assert len(fam) == 5
    assert all(len(p.terms) in (1, 2) for p in fam)


def test_radical_derives_c_at_d2():
    res = closure_saturate([B.poly(2)], ClosureConfig(D=2))
    assert res.contains(C.poly(2))
    cert = res.certificate(C.poly(2))
    assert check_certificate(cert, [B.poly(2)])
    assert res.metadata()["under_approximation"] is True


@pytest.mark.parametrize("D", [2, 3])
def test_wellmixed_alone_does_not_derive_c(D):
    res = closure_saturate([B.poly(D)], ClosureConfig(D=D, **NO_RADICAL))
    assert not res.contains(C.poly(D))
    assert res.certificate(C.poly(D)) is None
    # y2^x C is derivable without the radical rule
    assert res.contains(y(2, 1, D) * C.poly(D))


def test_wellmixed_fires_on_factored_input():
    a, b = y(1, 0, 2), y(2, 0, 2)
    res = closure_saturate([(a, b)], ClosureConfig(D=2, shift=False, radical=False, probe=False))
    # a * b = b * a, so both orders fire
    assert res.contains(a * shift(b)) and res.contains(shift(a) * b)
    assert not res.contains(a) and not res.contains(a * shift(shift(a)))
    cert = res.certificate(a * shift(b))
    assert check_certificate(cert, res.axioms())


def test_shift_rule_alone():
    res = closure_saturate([B.poly(3)], ClosureConfig(D=3, wellmixed=False, radical=False, probe=False))
    assert res.contains(shift(shift(B.poly(3))))
    assert not res.contains(C.poly(3))


def test_closure_caps():
    with pytest.raises(ResourceCapError) as info:
        closure_saturate([B.poly(3)], ClosureConfig(D=3, max_iterations=1))
    assert info.value.partial is not None and not info.value.partial.fixpoint
    with pytest.raises(PreconditionError):
        closure_saturate([], ClosureConfig(D=2))
    with pytest.raises(PreconditionError):
        closure_saturate([B.poly(2)], ClosureConfig(D=3))


def test_empty_input_with_dimension():
    res = closure_saturate([], ClosureConfig(D=2), n=2)
    assert res.generators == [] and not res.contains(B.poly(2))


# properties on random instances

def random_binomial(rng, n, deg=2):
    while True:
        plus = ExpVector(tuple(_nat_poly(rng, deg) for _ in range(n)))
        minus = ExpVector(tuple(_nat_poly(rng, deg) for _ in range(n)))
        try:
            return DiffBinomial.make(plus, minus)
        except ValueError:
            continue


def _nat_poly(rng, deg):
    return SymPoly(tuple(rng.randint(0, 1) for _ in range(rng.randint(0, deg + 1))))


def closure_instances(count, seed, D=2):
    rng = seeded(seed)
    out = []
    while len(out) < count:
        n = rng.randint(1, 2)
        gens = [random_binomial(rng, n, 1) for _ in range(rng.randint(1, 2))]
        extra = random_binomial(rng, n, 1)
        if any(g.max_degree() > D for g in gens + [extra]):
            continue
        out.append((n, [g.poly(D) for g in gens], extra.poly(D)))
    return out


def property_cfg(D=2):
    return ClosureConfig(D=D, max_cand_degree=1)


def check_closure_properties(instances, D=2):
    """Extensive, monotone (in G and in the rules) and idempotent; returns violations."""
    cfg = property_cfg(D)
    bad = []
    for n, gens, extra in instances:
        res = closure_saturate(gens, cfg, n)
        if not all(res.contains(g) for g in gens):
            bad.append(("extensive", gens))
        bigger = closure_saturate(gens + [extra], cfg, n)
        if not all(bigger.contains(g) for g in res.generators):
            bad.append(("monotone", gens, extra))
        fewer = closure_saturate(gens, ClosureConfig(D=D, max_cand_degree=1, radical=False), n)
        if not all(res.contains(g) for g in fewer.generators):
            bad.append(("rules", gens))
        again = closure_saturate(res.generators, cfg, n)
        if not same_ideal(again.ideal, res.ideal):
            bad.append(("idempotent", gens))
    return bad


def test_closure_properties_small_sample():
    assert check_closure_properties(closure_instances(10, 5)) == []


def test_every_added_generator_has_a_certificate():
    for n, gens, _ in closure_instances(8, 17):
        res = closure_saturate(gens, property_cfg(), n)
        for g in res.generators:
            cert = res.certificate(g)
            assert check_certificate(cert, res.axioms())


# product law, sound direction

def product_instance(rng, D=3):
    n = rng.randint(1, 3)
    F = [random_binomial(rng, n) for _ in range(rng.randint(1, 2))]
    G = [random_binomial(rng, n) for _ in range(rng.randint(1, 2))]
    if any(b.max_degree() > D for b in F + G):
        return None
    return n, F, G


def product_law_violations(n, F, G, D=3, max_cand_degree=2):
    cfg = ClosureConfig(D=D, max_cand_degree=max_cand_degree)
    FG = [(f.poly(D), g.poly(D)) for f in F for g in G]
    sat_fg = closure_saturate(FG, cfg, n)
    sat_f = closure_saturate([f.poly(D) for f in F], cfg, n)
    sat_g = closure_saturate([g.poly(D) for g in G], cfg, n)
    return [p for p in sat_fg.generators if not (sat_f.contains(p) and sat_g.contains(p))]


def test_product_law_sample():
    rng = seeded(8)
    done = 0
    while done < 4:
        inst = product_instance(rng)
        if inst is None or inst[0] > 2:
            continue
        assert product_law_violations(*inst, max_cand_degree=1) == []
        done += 1


# lattice ideals are radical on the candidate family

@pytest.mark.parametrize("L", [Lattice(2, (V("x-1", "1-x"),)),
                               Lattice(2, (V("x^2-x+1", "-x^2+x-1"),)),
                               Lattice(2, (V("x^2-x+1", "x-1"),))])
def test_lattice_ideal_is_radical_on_candidates(L):
    D = 3
    basis = compute_basis(L)
    I = TruncatedIdeal(2, D, _lattice_ideal_gens(L, D))
    for b in basis.F:
        if b.max_degree() <= D:
            assert I.contains(b.poly(D))
    for p in candidate_family(2, D, max_deg=2, height=1):
        if I.contains(p * p):
            assert I.contains(p)


def _lattice_ideal_gens(L, D):
    """B(h) for the lattice vectors h with cofactor degree <= D, height 1 and support degree <= D."""
    out = []
    for h in enumerate_elements(L, D, 1):
        if h.is_zero() or h.max_degree() > D:
            continue
        out.append(binomial_of(h).poly(D))
    return out


# monomial ideals and T-saturation

def test_in_monomial_ideal():
    assert in_monomial_ideal(V("x^2", "1"), (1,), (2,))
    assert not in_monomial_ideal(V("x", "1"), (1,), (2,))
    assert in_monomial_ideal(V("0", "x^3"), (1, 2), (2, 1))


def test_t_saturation_strips_factor():
    yb = FactoredBinomial(V("0", "1"), B)
    sat = t_saturated_closure([yb], (2,), (1,), ClosureConfig(D=3))
    assert FactoredBinomial.of(B) in sat.generators
    assert sat.multipliers and sat.fixpoint


def test_t_saturation_trivial_multiplicative_set():
    sat = t_saturated_closure([B], (1, 2), (0, 0), ClosureConfig(D=2, shift=False))
    assert sat.generators == [FactoredBinomial.of(B)]
    with pytest.raises(PreconditionError):
        t_saturated_closure([B], (3,), (1,), ClosureConfig(D=2))


def test_respects_monomial_ideal_examples():
    assert respects_monomial_ideal([B], (1,), (2,))
    assert not respects_monomial_ideal([C], (1,), (2,))
    assert respects_monomial_ideal([], (1,), (2,))


def test_quasi_normal_examples():
    cfg = ClosureConfig(D=3)
    assert not is_quasi_normal([C], (1,), (2,), cfg)
    assert is_quasi_normal([], (1,), (2,), cfg)
    # [B] is not saturated by y1^x: y1^x C = y1^{x^2} B + y1 sigma(B) while C is not in [B]
    D = 3
    assert y(1, 1, D) * C.poly(D) == y(1, 2, D) * B.poly(D) + y(1, 0, D) * shift(B.poly(D))
    assert not closure_saturate([B.poly(D)], ClosureConfig(D=D, wellmixed=False, radical=False)).contains(C.poly(D))
    assert not is_saturated([B], (1,), (2,), cfg)
    assert not is_quasi_normal([B], (1,), (2,), cfg)


def test_colon_m_examples():
    assert colon_m([B]) == Lattice(2, (V("x-1", "1-x"),))
    yb = FactoredBinomial(V("0", "1"), B)
    assert colon_m([yb]) == Lattice(2, (V("x-1", "1-x"),))
    assert colon_m([], n=2).is_zero()


def test_decompose_root():
    tree = decompose([B], cfg=ClosureConfig(D=2))
    assert tree.kind == "root"
    colon = tree.children[0]
    assert colon.kind == "colon"
    assert Lattice(2, tuple(colon.generators)) == Lattice(2, (V("x-1", "1-x"),))
    assert colon.info["basis"] == [str(B)]
    empty = decompose([], n=2)
    assert [c.kind for c in empty.children] == ["colon"] and empty.info["empty"]


def test_decompose_branches_on_violating_generator():
    tree = decompose([C], J=(1,), a=(2,), cfg=ClosureConfig(D=3))
    assert tree.kind == "split"
    assert tree.children
    for leaf in tree.leaves():
        assert leaf.kind in ("quasi-normal", "absorbed", "capped")
    assert tree.to_json()["kind"] == "split"


def test_decompose_leaves_are_quasi_normal_or_absorbed():
    cfg = ClosureConfig(D=3)
    for leaf in decompose([C], J=(1,), a=(2,), cfg=cfg).leaves():
        if leaf.kind == "quasi-normal":
            assert respects_monomial_ideal(leaf.generators, leaf.J, leaf.a)
        elif leaf.kind == "absorbed":
            assert all(in_monomial_ideal(g.plus, leaf.J, leaf.a) for g in leaf.generators)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_decompose_terminates_on_random_input(seed):
    rng = seeded(seed)
    gens = [random_binomial(rng, 2) for _ in range(rng.randint(1, 2))]
    tree = decompose(gens, J=(1,), a=(rng.randint(0, 2),), cfg=ClosureConfig(D=2, max_cand_degree=1))
    assert isinstance(tree, Node)
    assert tree.leaves()


def test_colon_leaf_matches_membership():
    tree = decompose([B], cfg=ClosureConfig(D=2))
    L = Lattice(2, tuple(tree.children[0].generators))
    assert truncated_member(L, V("x^2-1", "1-x^2"), 1)

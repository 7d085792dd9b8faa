"""Bounded saturation under the shift, well-mixed and radical rules.

``closure_saturate`` grows a generator set inside the truncated ring until no
rule adds anything new.  Each generator remembers how it was obtained, so a
certificate for any member of the result can be rebuilt on demand.

The shift rule applies to the generators and to the reduced Groebner basis
elements that stay below the top truncation level.  The well-mixed rule fires
on products known in factored form.  These are pairs entered as ``(a, b)``,
products the engine formed itself, and products ``v * p`` found by probing,
where ``v`` is a single variable and ``p`` a candidate binomial.
Radical candidates are monomials and pure binomials within the configured
degree and exponent caps.
"""

import itertools
from dataclasses import dataclass, field

from .basis import BasisConfig, DiffBinomial, compute_basis
from .certificates import CertificateBuilder
from .errors import PreconditionError, ResourceCapError
from .exponents import ExpVector, SymPoly, vec_min
from .lattice import Lattice, lattice_of_binomials, sat_M
from .truncated import (Caps, TruncatedIdeal, TruncPoly, binomial_poly, exponents_to_vector,
                        parse_text, shift)


@dataclass
class ClosureConfig:
    D: int = 3
    shift: bool = True
    wellmixed: bool = True
    radical: bool = True
    max_cand_degree: int = 2
    max_height: int = 1
    probe: bool = True
    max_iterations: int = 12
    max_generators: int = 400
    caps: Caps = field(default_factory=Caps)

    def __post_init__(self):
        if self.D < 1:
            raise ValueError("closure truncation D must be >= 1")

    def rules(self):
        return [r for r in ("shift", "wellmixed", "radical") if getattr(self, r)]


def parse_rules(text):
    """Comma-separated rule names to the toggles of ClosureConfig."""
    names = {r.strip() for r in text.split(",") if r.strip()}
    unknown = names - {"shift", "wellmixed", "radical"}
    if unknown:
        raise ValueError(f"unknown rules: {sorted(unknown)}")
    return {r: r in names for r in ("shift", "wellmixed", "radical")}


# candidate family

def _monomials(nvars, max_deg, height):
    out = []
    for deg in range(1, max_deg + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), deg):
            m = [0] * nvars
            for v in combo:
                m[v] += 1
            if max(m) <= height:
                out.append(tuple(m))
    return out


def candidate_family(n, D, max_deg=2, height=1):
    """Monomials and pure binomials m1 - m2 (coprime, m2 possibly 1) within caps."""
    monos = _monomials(n * (D + 1), max_deg, height)
    out = [TruncPoly.monomial(n, D, m) for m in monos]
    one = (0,) * (n * (D + 1))
    for m in monos:
        out.append(TruncPoly(n, D, {m: 1, one: -1}))
    for m1, m2 in itertools.combinations(monos, 2):
        if all(x == 0 or y == 0 for x, y in zip(m1, m2)):
            out.append(TruncPoly(n, D, {m1: 1, m2: -1}))
    return out


def variables(n, D, top=None):
    top = D - 1 if top is None else top
    return [TruncPoly.var(n, D, i, j) for i in range(1, n + 1) for j in range(top + 1)]


# saturation

@dataclass
class Generator:
    poly: TruncPoly
    rule: str                 # axiom | shift | wellmixed | radical
    parent: int = None        # generator index for shift or for a tracked product
    prefix: int = None        # premise proved from generators[:prefix]
    # for a shift with no parent, ``a`` is the shifted ideal member
    a: TruncPoly = None
    b: TruncPoly = None


class ClosureResult:
    """Generators of the saturated ideal plus provenance for certificates."""

    def __init__(self, n, D, gens, pairs, cfg, fixpoint, iterations):
        self.n = n
        self.D = D
        self.gens = gens
        self.pairs = pairs
        self.cfg = cfg
        self.fixpoint = fixpoint
        self.iterations = iterations
        self.ideal = TruncatedIdeal(n, D, [g.poly for g in gens], cfg.caps)

    @property
    def generators(self):
        return [g.poly for g in self.gens]

    def axioms(self):
        return [g.poly for g in self.gens if g.rule == "axiom"]

    def contains(self, p):
        return self.ideal.contains(p)

    def metadata(self):
        return {"D": self.D, "rules": self.cfg.rules(), "fixpoint": self.fixpoint,
                "iterations": self.iterations, "generators": len(self.gens),
                "under_approximation": True}

    def certificate(self, p):
        """A checked certificate for p over the axioms, or None if p is not in the ideal."""
        if not self.contains(p):
            return None
        bld = CertificateBuilder(self.n, self.D, self.axioms())
        memo = {}

        def combo(q, prefix):
            if not q:
                return bld.empty_combination()
            sub = TruncatedIdeal(self.n, self.D, [g.poly for g in self.gens[:prefix]], self.cfg.caps)
            cofs = sub.cofactors(q)
            if cofs is None:
                raise AssertionError("recorded premise is not in the prefix ideal")
            parts = [(c, step(k)) for k, c in enumerate(cofs) if c]
            return bld.ideal(parts, payload=q)

        def step(k):
            if k in memo:
                return memo[k]
            g = self.gens[k]
            if g.rule == "axiom":
                sid = bld.axiom(g.poly)
            elif g.rule == "shift":
                sid = bld.shift(step(g.parent) if g.parent is not None else combo(g.a, g.prefix))
            elif g.rule == "wellmixed":
                prem = step(g.parent) if g.parent is not None else combo(g.a * g.b, g.prefix)
                sid = bld.wellmixed(prem, g.a, g.b)
            elif g.rule == "radical":
                sid = bld.radical(combo(g.poly * g.poly, g.prefix), g.poly)
            else:
                raise AssertionError(f"unknown provenance {g.rule}")
            memo[k] = sid
            return sid

        return bld.build(combo(p, len(self.gens)))


def _as_input(item, n, D):
    if isinstance(item, TruncPoly):
        return item, None
    a, b = item
    return a * b, (a, b)


def closure_saturate(G, cfg, n=None):
    """Bounded fixpoint of the enabled rules starting from G.

    ``G`` holds TruncPolys or factored pairs ``(a, b)`` standing for ``a * b``.
    Raises ResourceCapError (with the partial ClosureResult) when the
    iteration or generator cap is reached.
    """
    items = list(G)
    D = cfg.D
    if n is None:
        if not items:
            raise PreconditionError("dimension needed for an empty generator set")
        first = items[0] if isinstance(items[0], TruncPoly) else items[0][0]
        n = first.n
    gens = []
    pairs = []          # (a, b, generator index of a*b)
    for item in items:
        poly, pair = _as_input(item, n, D)
        if (poly.n, poly.D) != (n, D):
            raise PreconditionError(f"generator {poly} is not in the ring n={n}, D={D}")
        if not poly:
            continue
        gens.append(Generator(poly, "axiom"))
        if pair is not None:
            pairs.append((pair[0], pair[1], len(gens) - 1))

    cands = candidate_family(n, D, cfg.max_cand_degree, cfg.max_height) if (cfg.radical or cfg.probe) else []
    probe_vars = variables(n, D)
    done_pairs = set()
    shifted = set()

    def ideal():
        return TruncatedIdeal(n, D, [g.poly for g in gens], cfg.caps)

    fixpoint = False
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        I = ideal()
        before = len(gens)
        fresh = []

        def add(gen, pair=None):
            if I.contains(gen.poly) or any(gen.poly == f.poly for f in fresh):
                return
            fresh.append(gen)
            gens.append(gen)
            if pair is not None:
                pairs.append((pair[0], pair[1], len(gens) - 1))

        if cfg.shift:
            for k in range(before):
                if k in shifted:
                    continue
                shifted.add(k)
                g = gens[k].poly
                if g.max_shift() < D:
                    add(Generator(shift(g), "shift", parent=k))
            # members of the ideal below the top level need not be generators
            for terms in I.groebner():
                q = TruncPoly(n, D, terms)
                if q.max_shift() < D:
                    add(Generator(shift(q), "shift", prefix=before, a=q))
        if cfg.wellmixed:
            for a, b, k in list(pairs):
                if k >= before or k in done_pairs:
                    continue
                done_pairs.add(k)
                for x, y in ((a, b), (b, a)):
                    if y.max_shift() < D:
                        sy = shift(y)
                        add(Generator(x * sy, "wellmixed", parent=k, a=x, b=y), (x, sy))
            if cfg.probe:
                nf = I.normal_form()
                for p in cands:
                    if nf.is_zero(p.terms):
                        continue
                    for v in probe_vars:
                        if nf.is_zero((v * p).terms):
                            sv = shift(v)
                            add(Generator(p * sv, "wellmixed", prefix=before, a=p, b=v), (p, sv))
        if cfg.radical:
            nf = I.normal_form()
            for p in cands:
                if nf.is_zero(p.terms):
                    continue
                if nf.is_zero((p * p).terms):
                    add(Generator(p, "radical", prefix=before))
        if len(gens) > cfg.max_generators:
            raise ResourceCapError(f"closure exceeded {cfg.max_generators} generators",
                                   partial=ClosureResult(n, D, gens, pairs, cfg, False, it))
        if len(gens) == before:
            fixpoint = True
            break
    result = ClosureResult(n, D, gens, pairs, cfg, fixpoint, it)
    if not fixpoint:
        raise ResourceCapError(f"closure did not stabilize in {cfg.max_iterations} iterations", partial=result)
    return result


def same_ideal(a, b):
    """Ideal equality of two TruncatedIdeals by mutual containment."""
    return all(b.contains(g) for g in a.generators) and all(a.contains(g) for g in b.generators)


# binomials with monomial factors

@dataclass(frozen=True)
class FactoredBinomial:
    """Y^factor * (Y^plus - Y^minus) with the core a DiffBinomial."""

    factor: ExpVector
    core: DiffBinomial

    @classmethod
    def make(cls, plus, minus):
        common = vec_min(plus, minus)
        core = DiffBinomial.make(plus - common, minus - common)
        return cls(common, core)

    @classmethod
    def of(cls, b):
        if isinstance(b, FactoredBinomial):
            return b
        return cls(ExpVector.zero(b.n), b)

    @property
    def n(self):
        return self.core.n

    @property
    def plus(self):
        return self.factor + self.core.plus

    @property
    def minus(self):
        return self.factor + self.core.minus

    def poly(self, D):
        return binomial_poly(self.plus, self.minus, D)

    def max_degree(self):
        return max(self.plus.max_degree(), self.minus.max_degree())

    def shift(self):
        return FactoredBinomial(self.factor.shift(1), DiffBinomial.make(self.core.plus.shift(1),
                                                                        self.core.minus.shift(1)))

    def __str__(self):
        if self.factor.is_zero():
            return str(self.core)
        return f"[{self.factor}] * ({self.core})"

    def to_json(self):
        return {"factor": self.factor.to_json(), **self.core.to_json()}


# colon by m

def colon_m(I, n=None, **sat_kwargs):
    """Support lattice of the colon by the monomials: the M-saturation of the binomials' lattice."""
    I = list(I)
    if not I and n is None:
        raise ValueError("dimension needed for an empty binomial set")
    cores = [FactoredBinomial.of(b).core for b in I]
    L = lattice_of_binomials(cores, n)
    if L.is_zero():
        return L
    return sat_M(L, **sat_kwargs)


# T-saturation

def _check_J(J, a, n):
    J = tuple(J)
    a = tuple(a)
    if len(J) != len(a) or not J:
        raise PreconditionError("J must be nonempty with one exponent per index")
    if len(set(J)) != len(J) or any(not (1 <= j <= n) for j in J):
        raise PreconditionError(f"bad index set {J}")
    if any(x < 0 for x in a):
        raise PreconditionError("exponents a_i must be >= 0")
    return J, a


def in_monomial_ideal(f, J, a):
    """Support test: Y^f lies in [y_{j_i}^{x^{a_i}}] iff some f_{j_i} has a term of degree >= a_i."""
    for j, ai in zip(J, a):
        coeffs = f.entries[j - 1].coeffs
        if any(c and d >= ai for d, c in enumerate(coeffs)):
            return True
    return False


def _t_part(factor, J, a):
    """The part of the factor lying in T (coordinates in J, degrees below a_i)."""
    out = [SymPoly() for _ in range(factor.n)]
    for j, ai in zip(J, a):
        c = factor.entries[j - 1].coeffs
        out[j - 1] = SymPoly(tuple(c[:ai]))
    return ExpVector(tuple(out))


def _to_factored(p, n, D):
    terms = list(p.terms.items())
    if len(terms) != 2:
        return None
    (m1, c1), (m2, c2) = terms
    if c1 + c2 != 0:
        return None
    v1, v2 = exponents_to_vector(m1, n, D), exponents_to_vector(m2, n, D)
    return FactoredBinomial.make(v1, v2)


@dataclass
class TSaturation:
    generators: list        # FactoredBinomial
    multipliers: list       # T-monomials (ExpVector) that were divided out
    fixpoint: bool
    iterations: int


def t_saturated_closure(I, J, a, cfg, n=None):
    """Bounded colon by T = monomials in y_{j_i}^{x^k}, k < a_i.

    Strips T-factors from tracked factored binomials, closes under sigma
    within the truncation, and probes ``v * p`` for T-variables v and
    candidate binomials p.  Returns a TSaturation.
    """
    work = [FactoredBinomial.of(b) for b in I]
    if n is None:
        if not work:
            raise PreconditionError("dimension needed for an empty binomial set")
        n = work[0].n
    J, a = _check_J(J, a, n)
    D = cfg.D
    for fb in work:
        if fb.max_degree() > D:
            raise PreconditionError(f"{fb} does not fit in D={D}")
    t_vars = [TruncPoly.var(n, D, j, k) for j, ai in zip(J, a) for k in range(min(ai, D + 1))]
    cands = [p for p in candidate_family(n, D, cfg.max_cand_degree, cfg.max_height) if len(p.terms) == 2] \
        if cfg.probe else []
    multipliers = []
    fixpoint = False
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        changed = False
        stripped = []
        for fb in work:
            t = _t_part(fb.factor, J, a)
            if not t.is_zero():
                multipliers.append(t)
                fb = FactoredBinomial(fb.factor - t, fb.core)
                changed = True
            stripped.append(fb)
        work = list(dict.fromkeys(stripped))
        if cfg.shift:
            for fb in list(work):
                if fb.max_degree() < D:
                    s = fb.shift()
                    if s not in work:
                        work.append(s)
                        changed = True
        I_t = TruncatedIdeal(n, D, [fb.poly(D) for fb in work], cfg.caps)
        nf = I_t.normal_form()
        for p in cands:
            if nf.is_zero(p.terms):
                continue
            for v in t_vars:
                if nf.is_zero((v * p).terms):
                    fb = _to_factored(p, n, D)
                    if fb is not None and fb not in work:
                        work.append(fb)
                        multipliers.append(_var_vector(v, n, D))
                        changed = True
                    break
        if len(work) > cfg.max_generators:
            raise ResourceCapError(f"T-saturation exceeded {cfg.max_generators} generators",
                                   partial=TSaturation(work, multipliers, False, it))
        if not changed:
            fixpoint = True
            break
    if not fixpoint:
        raise ResourceCapError(f"T-saturation did not stabilize in {cfg.max_iterations} iterations",
                               partial=TSaturation(work, multipliers, False, it))
    return TSaturation(sorted(work, key=lambda fb: (fb.factor.sort_key(), fb.core.sort_key())),
                       multipliers, True, it)


def _var_vector(v, n, D):
    (m,) = v.terms
    return exponents_to_vector(m, n, D)


def respects_monomial_ideal(I0, J, a):
    """Every generator with one side in [y_{j_i}^{x^{a_i}}] has the other side there too."""
    for b in I0:
        fb = FactoredBinomial.of(b)
        if in_monomial_ideal(fb.plus, J, a) != in_monomial_ideal(fb.minus, J, a):
            return False
    return True


def is_saturated(I0, J, a, cfg, n=None):
    """I0 equals its bounded T-saturation (as ideals of the truncated ring, sigma-closed within D)."""
    I0 = [FactoredBinomial.of(b) for b in I0]
    if not I0:
        return True
    n = n or I0[0].n
    sat = t_saturated_closure(I0, J, a, cfg, n)
    base = closure_saturate([fb.poly(cfg.D) for fb in I0],
                            ClosureConfig(D=cfg.D, wellmixed=False, radical=False, caps=cfg.caps), n)
    return all(base.contains(fb.poly(cfg.D)) for fb in sat.generators)


def is_quasi_normal(I0, J, a, cfg, n=None):
    I0 = list(I0)
    if not I0:
        return True
    return respects_monomial_ideal(I0, J, a) and is_saturated(I0, J, a, cfg, n)


# decomposition

@dataclass
class Node:
    kind: str                  # root | colon | quasi-normal | absorbed | split | capped
    J: tuple = ()
    a: tuple = ()
    generators: list = field(default_factory=list)
    children: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def leaves(self):
        if not self.children:
            return [self]
        return [leaf for c in self.children for leaf in c.leaves()]

    def to_json(self):
        out = {"kind": self.kind, "J": list(self.J), "a": list(self.a),
               "generators": [str(g) for g in self.generators], "info": self.info}
        if self.children:
            out["children"] = [c.to_json() for c in self.children]
        return out


def _variables_of(v):
    """(coordinate, degree) pairs of the variables y_p^{x^b} dividing Y^v."""
    out = []
    for p, e in enumerate(v.entries, start=1):
        for b, c in enumerate(e.coeffs):
            if c:
                out.append((p, b))
    return out


def _measure_advances(J, a, J2, a2):
    if len(J2) > len(J):
        return True
    if set(J2) != set(J):
        return False
    old = dict(zip(J, a))
    new = dict(zip(J2, a2))
    return all(new[j] <= old[j] for j in J) and any(new[j] < old[j] for j in J)


def _node(I, J, a, cfg, n, depth, max_depth):
    if depth > max_depth:
        return Node("capped", J, a, list(I), info={"reason": f"depth > {max_depth}"})
    if all(in_monomial_ideal(b.plus, J, a) and in_monomial_ideal(b.minus, J, a) for b in I):
        return Node("absorbed", J, a, list(I))
    try:
        sat = t_saturated_closure(I, J, a, cfg, n)
    except ResourceCapError as exc:
        return Node("capped", J, a, list(I), info={"reason": str(exc)})
    gens = sat.generators
    violating = [fb for fb in gens if in_monomial_ideal(fb.plus, J, a) != in_monomial_ideal(fb.minus, J, a)]
    if not violating:
        return Node("quasi-normal", J, a, gens, info={"multipliers": [str(m) for m in sat.multipliers]})
    h = violating[0]
    outside = h.minus if in_monomial_ideal(h.plus, J, a) else h.plus
    children = []
    for p, b in _variables_of(outside):
        if p in J:
            k = J.index(p)
            if b >= a[k]:
                continue
            J2, a2 = J, a[:k] + (b,) + a[k + 1:]
        else:
            J2, a2 = J + (p,), a + (b,)
        assert _measure_advances(J, a, J2, a2)
        children.append(_node(list(dict.fromkeys(list(I) + [h])), J2, a2, cfg, n, depth + 1, max_depth))
    return Node("split", J, a, gens, children, info={"violating": str(h)})


def decompose(I, J=(), a=(), cfg=None, n=None, max_depth=8, basis_cfg=None):
    """Split the closure of I into a colon leaf and monomial-augmented branches.

    Without J the root carries the colon leaf (lattice and finite basis) and
    one branch per variable of each monomial multiplier found while proving
    the colon generators back into the closure.  With J the node for
    (I, J, a) is refined directly.  Every branch advances the measure
    (|J| grows, or the exponents a drop with J fixed).
    """
    cfg = cfg or ClosureConfig()
    I = [FactoredBinomial.of(b) for b in I]
    if n is None:
        if not I:
            raise PreconditionError("dimension needed for an empty binomial set")
        n = I[0].n
    J, a = tuple(J), tuple(a)
    if J:
        return _node(I, J, a, cfg, n, 0, max_depth)
    L = colon_m(I, n)
    colon = Node("colon", generators=list(L.generators), info={"lattice": L.to_json()})
    children = [colon]
    if L.is_zero():
        return Node("root", children=children, info={"empty": not I})
    basis = compute_basis(L, basis_cfg or BasisConfig())
    colon.info["basis"] = [str(b) for b in basis.F]
    closure = closure_saturate([fb.poly(cfg.D) for fb in I], cfg, n)
    multipliers = {}
    unresolved = []
    for b in basis.F:
        if b.max_degree() > cfg.D:
            unresolved.append(str(b))
            continue
        m = _monomial_multiplier(b.poly(cfg.D), closure, n, cfg)
        if m is None:
            unresolved.append(str(b))
        elif m:
            multipliers[str(b)] = m
    colon.info["unresolved"] = unresolved
    seen = set()
    for m in multipliers.values():
        for p, k in _variables_of(m):
            if (p, k) in seen:
                continue
            seen.add((p, k))
            extra = FactoredBinomial(ExpVector.zero(n), DiffBinomial.make(
                ExpVector(tuple(SymPoly.monomial(1, k) if q == p else SymPoly() for q in range(1, n + 1))),
                ExpVector.zero(n)))
            children.append(_node(I, (p,), (k,), cfg, n, 1, max_depth))
            children[-1].info["added_monomial"] = str(extra.core.plus)
    return Node("root", children=children, info={"closure": closure.metadata()})


def _monomial_multiplier(p, closure, n, cfg):
    """Smallest monomial Y^m (within caps) with Y^m * p in the closure; zero vector if p itself is."""
    if closure.contains(p):
        return ExpVector.zero(n)
    for mono in _monomials(n * (cfg.D + 1), cfg.max_cand_degree, cfg.max_height):
        if closure.contains(TruncPoly.monomial(n, cfg.D, mono) * p):
            return exponents_to_vector(mono, n, cfg.D)
    return None


def binomial_from_text(text, n, D):
    """Parse polynomial text expected to be a pure binomial into a FactoredBinomial."""
    fb = _to_factored(parse_text(text, n, D), n, D)
    if fb is None:
        raise ValueError(f"{text!r} is not a pure binomial")
    return fb


def lattice_of(I, n):
    return Lattice(n, tuple(FactoredBinomial.of(b).core.vector for b in I))

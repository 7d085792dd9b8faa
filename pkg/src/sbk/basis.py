"""Finite generating sets for radical well-mixed closures of lattice ideals.

For a lattice L the elements are partitioned by the sign pattern of their
leading coefficients; inside each class the vectors whose signature

    (deg h1+, lc h1+, ..., deg hn+, lc hn+, deg h1-, ..., deg hn-)

is minimal in the product order give the binomials Y^{h+} - Y^{h-} of the
basis.  Every other lattice element reduces to these through
``reduce_once`` and a short chain of sigma-shifts, well-mixed steps and
radical steps, which ``membership_certificate`` records.
"""

from dataclasses import dataclass, field

from .certificates import RULES, CertificateBuilder
from .errors import (NoApplicableBasisElement, PreconditionError, ResourceCapError,
                     TruncationError)
from .exponents import (ZERO, ExpVector, SymPoly, coef_max, signed_parts, term_key,
                        truncate_below, vec_min)
from .lattice import (DEFAULT_MAX_COMBINATIONS, Lattice, dominates, enumerate_elements,
                      sign_pattern, signature, truncated_member)
from .truncated import TruncPoly, binomial_poly, expand


def _monomial_text(v):
    parts = []
    for i, e in enumerate(v.entries, start=1):
        if e.is_zero():
            continue
        if e.coeffs == (1,):
            parts.append(f"y{i}")
        else:
            parts.append(f"y{i}^{{{e}}}")
    return " ".join(parts) if parts else "1"


@dataclass(frozen=True)
class DiffBinomial:
    """Pure difference binomial Y^plus - Y^minus with disjoint supports.

    ``DiffBinomial.make`` cancels the common monomial factor and orients the
    pair so that ``plus`` has the larger sort key; ``sign`` records whether
    that flipped the input (it does not take part in equality).
    """

    plus: ExpVector
    minus: ExpVector
    sign: int = field(default=1, compare=False)

    @classmethod
    def make(cls, plus, minus):
        if not plus.is_natural() or not minus.is_natural():
            raise ValueError("binomial supports must lie in N[x]^n")
        common = vec_min(plus, minus)
        plus, minus = plus - common, minus - common
        if plus == minus:
            raise ValueError("zero binomial: both sides are the same monomial")
        if plus.sort_key() < minus.sort_key():
            return cls(minus, plus, -1)
        return cls(plus, minus, 1)

    @classmethod
    def parse(cls, plus, minus):
        return cls.make(ExpVector.parse(*plus), ExpVector.parse(*minus))

    @property
    def n(self):
        return self.plus.n

    @property
    def vector(self):
        return self.plus - self.minus

    def max_degree(self):
        return max(self.plus.max_degree(), self.minus.max_degree())

    def poly(self, D):
        return binomial_poly(self.plus, self.minus, D)

    def sort_key(self):
        return (self.plus.sort_key(), self.minus.sort_key())

    def __str__(self):
        return f"{_monomial_text(self.plus)} - {_monomial_text(self.minus)}"

    def to_json(self):
        return {"plus": self.plus.to_json(), "minus": self.minus.to_json()}

    @classmethod
    def from_json(cls, data):
        return cls.make(ExpVector.from_json(data["plus"]), ExpVector.from_json(data["minus"]))


def binomial_of(h):
    """Y^{h+} - Y^{h-} for a nonzero lattice vector h (canonically oriented)."""
    if h.is_zero():
        raise PreconditionError("binomial_of needs a nonzero vector")
    return DiffBinomial.make(h.positive_part(), h.negative_part())


def minimal_signatures(cands):
    """Representatives of the product-order-minimal signatures.

    ``cands`` is an iterable of (vector, signature) pairs sharing one sign
    pattern.  Ties on equal signatures keep the vector with the smallest sort
    key.  Returns a list sorted by signature.
    """
    best = {}
    for v, sig in cands:
        cur = best.get(sig)
        if cur is None or v.sort_key() < cur.sort_key():
            best[sig] = v
    sigs = sorted(best)
    minimal = []
    for s in sigs:
        if any(t != s and dominates(t, s) for t in sigs):
            continue
        minimal.append(s)
    return [best[s] for s in minimal]


@dataclass
class BasisConfig:
    enum_deg: int = 2
    height: int = 2
    stability: int = 2
    max_rounds: int = 10
    max_combinations: int = DEFAULT_MAX_COMBINATIONS


@dataclass
class BasisResult:
    lattice: Lattice
    G: dict            # sign pattern string -> list of ExpVector
    F_tau: dict        # sign pattern string -> list of DiffBinomial
    F: list            # distinct binomials over all patterns
    bounds: dict
    stable_for: int
    stable: bool

    def to_json(self):
        return {
            "basis": [{"tau": tau, "G": [g.to_json() for g in self.G[tau]],
                       "F": [b.to_json() for b in self.F_tau[tau]]} for tau in sorted(self.G)],
            "F": [b.to_json() for b in self.F],
            "F_text": [str(b) for b in self.F],
            "n": self.lattice.n,
            "bounds": self.bounds,
            "stable_for": self.stable_for,
            "stable": self.stable,
        }


def _basis_at(L, d, H, max_combinations):
    classes = {}
    for h in enumerate_elements(L, d, H, max_combinations):
        tau = sign_pattern(h)
        if tau.is_zero_pattern:
            continue
        classes.setdefault(str(tau), []).append((h, signature(h)))
    return {tau: minimal_signatures(c) for tau, c in classes.items()}


def compute_basis(L, cfg=None):
    """Enumerate L at growing coefficient degree until the minimal sets settle.

    Each round raises the cofactor degree bound by one (the height bound stays
    fixed).  The loop stops once the minimal signature sets have been unchanged
    for ``cfg.stability`` consecutive rounds.  ``stable`` in the result is
    False if ``max_rounds`` ran out first.
    """
    cfg = cfg or BasisConfig()
    G = {}
    prev_key = None
    stable_for = 0
    d = cfg.enum_deg
    rounds = 0
    for r in range(cfg.max_rounds):
        d = cfg.enum_deg + r
        rounds = r + 1
        G = _basis_at(L, d, cfg.height, cfg.max_combinations)
        key = frozenset((tau, signature(g)) for tau, gs in G.items() for g in gs)
        if key == prev_key:
            stable_for += 1
        else:
            stable_for = 0
        prev_key = key
        if stable_for >= cfg.stability or L.is_zero():
            break
    F_tau = {tau: [binomial_of(g) for g in gs] for tau, gs in G.items()}
    F = sorted({b for bs in F_tau.values() for b in bs}, key=DiffBinomial.sort_key)
    stable = stable_for >= cfg.stability or L.is_zero()
    return BasisResult(L, G, F_tau, F,
                       {"enum_deg_start": cfg.enum_deg, "enum_deg_final": d,
                        "height": cfg.height, "rounds": rounds, "stability_window": cfg.stability},
                       stable_for, stable)


# reduction

def lt_tuple(h):
    """(lt(h1+), ..., lt(hn+)) as sortable keys."""
    return tuple(term_key(signed_parts(e)[0].leading()) for e in h.entries)


@dataclass
class Reduction:
    """Data of one reduction step, in the frame where coordinate j is positive.

    With ``hh``/``gg`` the (possibly negated) inputs, the identity

        Y^multiplier * B(hh) = Y^q_factor * sigma^s B(gg) + Y^d_factor * B(ww)

    holds, where ``ww = hh - x^s gg`` and ``B(v) = Y^{v+} - Y^{v-}``.
    """

    j: int
    s: int
    e: SymPoly
    flipped: bool
    hh: ExpVector
    gg: ExpVector
    ww: ExpVector
    multiplier: ExpVector
    q_factor: ExpVector
    d_factor: ExpVector


def reduce_once(h, g):
    """One step of the leading-term induction: returns (w, Reduction) with w = h - x^s g."""
    tau_h, tau_g = sign_pattern(h), sign_pattern(g)
    if tau_h != tau_g or tau_h.is_zero_pattern:
        raise PreconditionError(f"sign patterns differ or are zero: {tau_h} vs {tau_g}")
    if not dominates(signature(g), signature(h)):
        raise PreconditionError(f"signature of {g} does not dominate-below that of {h}")
    n = h.n
    diffs = []
    for i in range(n):
        if tau_h.pattern[i] == "0":
            continue
        hb = signed_parts(h.entries[i])[0]
        gb_ = signed_parts(g.entries[i])[0]
        diffs.append((hb.deg - gb_.deg, i))
    s, j = min(diffs)
    flipped = tau_h.pattern[j] == "-"
    hh, gg = (-h, -g) if flipped else (h, g)
    hp, hm = hh.positive_part(), hh.negative_part()
    gp, gm = gg.positive_part(), gg.negative_part()
    top = hp.entries[j]
    over = gp.entries[j].shift(s) - top
    e = truncate_below(coef_max(over, ZERO), top.deg)
    p = top + e - gp.entries[j].shift(s)
    assert p.is_natural() and term_key(p.leading()) < term_key(top.leading())
    mult = list(gp.shift(s).entries)
    mult[j] = e
    q = list(hp.entries)
    q[j] = p
    multiplier = ExpVector(tuple(mult))
    q_factor = ExpVector(tuple(q))
    left = gm.shift(s) + q_factor
    right = multiplier + hm
    d_factor = vec_min(left, right)
    ww = left - right
    assert ww == hh - gg.shift(s)
    w = h - g.shift(s)
    red = Reduction(j, s, e, flipped, hh, gg, ww, multiplier, q_factor, d_factor)
    before, after = lt_tuple(h), lt_tuple(w)
    if not (all(a <= b for a, b in zip(after, before)) and after[j] < before[j] and after < before):
        raise AssertionError(f"measure did not decrease: {before} -> {after}")
    return w, red


# certificates

@dataclass
class MemberCaps:
    max_depth: int = 200
    max_steps: int = 20_000
    member_deg: int = None


class _Prover:
    def __init__(self, F, n, D, caps, rules=RULES):
        self.F = list(F)
        self.n = n
        self.D = D
        self.caps = caps
        self.builder = CertificateBuilder(n, D, [b.poly(D) for b in self.F if b.max_degree() <= D],
                                          rules=rules)
        self.memo = {}
        self.gvecs = []
        for b in self.F:
            v = b.vector
            for vec in (v, -v):
                self.gvecs.append((vec, b))

    def mono(self, v):
        return expand(v, self.D)

    def B(self, v):
        return binomial_poly(v.positive_part(), v.negative_part(), self.D)

    def oriented_axiom(self, vec, b):
        sid = self.builder.axiom(b.poly(self.D))
        if vec == b.vector:
            return sid
        return self.builder.ideal([(TruncPoly.const(self.n, self.D, -1), sid)])

    def check_caps(self, depth):
        if depth > self.caps.max_depth:
            raise ResourceCapError(f"reduction depth exceeded {self.caps.max_depth}")
        if len(self.builder.steps) > self.caps.max_steps:
            raise ResourceCapError(f"certificate exceeded {self.caps.max_steps} steps")

    def choose(self, h):
        tau = sign_pattern(h)
        sig = signature(h)
        best = None
        for vec, b in self.gvecs:
            if vec.max_degree() > self.D:
                continue
            if sign_pattern(vec) != tau:
                continue
            gs = signature(vec)
            if not dominates(gs, sig):
                continue
            key = (gs, vec.sort_key())
            if best is None or key < best[0]:
                best = (key, vec, b)
        if best is None:
            raise NoApplicableBasisElement(f"no basis element dominates {h}", vector=h)
        return best[1], best[2]

    def prove(self, h, depth=0):
        """Step id proving B(h), or None when h = 0."""
        if h.is_zero():
            return None
        if h in self.memo:
            return self.memo[h]
        self.check_caps(depth)
        g, b = self.choose(h)
        if g == h:
            sid = self.oriented_axiom(g, b)
            self.memo[h] = sid
            return sid
        w, red = reduce_once(h, g)
        sid = self._prove_step(red, b, depth)
        if red.flipped:
            sid = self.builder.ideal([(TruncPoly.const(self.n, self.D, -1), sid)])
        self.check_caps(depth)
        self.memo[h] = sid
        return sid

    # helpers on monomial multiples of B(hh)

    def _lift(self, sid, m, m2, Bh):
        """From Y^m * Bh (at sid) derive Y^m2 * Bh.

        Requires deg(m2_i) >= deg(m_i) wherever m_i != 0.  Occurrences of
        y_{i,t} below the top degree of m2_i are pushed up by well-mixed steps,
        then the radical rule absorbs surplus multiplicity.
        """
        bld = self.builder
        if m == m2:
            return sid
        diff = m2 - m
        if diff.is_natural():
            return bld.ideal([(self.mono(diff), sid)])
        cur = [list(e.coeffs) for e in m.entries]
        for i, (mi, m2i) in enumerate(zip(m.entries, m2.entries)):
            if mi.is_zero():
                continue
            top = m2i.deg
            if top < mi.deg:
                raise AssertionError(f"lift not dominated at coordinate {i}: {mi} -> {m2i}")
            for t in range(top):
                while t < len(cur[i]) and cur[i][t] > 0:
                    for u in range(t, top):
                        rest = self._vec_from(cur)
                        rest_list = [list(c) for c in cur]
                        rest_list[i][u] -= 1
                        a = self.mono(self._vec_from(rest_list)) * Bh
                        bvar = TruncPoly.var(self.n, self.D, i + 1, u)
                        assert a * bvar == self.mono(rest) * Bh
                        sid = bld.wellmixed(sid, a, bvar)
                        cur[i][u] -= 1
                        while len(cur[i]) <= u + 1:
                            cur[i].append(0)
                        cur[i][u + 1] += 1
        curv = self._vec_from(cur)
        k = 1
        while not (m2.scale(k) - curv).is_natural():
            k *= 2
        if k == 1:
            return bld.ideal([(self.mono(m2 - curv), sid)])
        target = self.mono(m2) * Bh
        cof = self.mono(m2.scale(k) - curv) * Bh ** (k - 1)
        sid = bld.ideal([(cof, sid)], payload=target ** k)
        return bld.root(sid, target, k)

    @staticmethod
    def _vec_from(rows):
        return ExpVector(tuple(SymPoly(tuple(r)) for r in rows))

    def _shifted_g(self, base_sid, k, negate):
        sid = self.builder.shift_power(base_sid, k)
        if negate:
            sid = self.builder.ideal([(TruncPoly.const(self.n, self.D, -1), sid)])
        return sid

    def _switch(self, sid, m, gL, gR, k, g_sid, negate, Bh):
        """Replace the factor Y^{x^k gL} of m by Y^{x^k gR} using sigma^k of B(g)."""
        left = gL.shift(k)
        rest = m - left
        assert rest.is_natural()
        gs = self._shifted_g(g_sid, k, negate)
        new = rest + gR.shift(k)
        sid = self.builder.ideal([(TruncPoly.const(self.n, self.D, 1), sid),
                                  (-(self.mono(rest) * Bh), gs)],
                                 payload=self.mono(new) * Bh)
        return sid, new

    def _ladder(self, sid, start, gL, gR, P, s, target, g_sid, negate, Bh):
        n = self.n
        m = start
        if P:
            delta = min(gL.entries[i].deg - gR.entries[i].deg for i in P)
            assert delta >= 1
            k = s
            while k > 0:
                k2 = max(0, k - delta)
                t1 = ExpVector(tuple(gL.entries[i].shift(k2) if i in P else m.entries[i] for i in range(n)))
                sid = self._lift(sid, m, t1, Bh)
                m2 = ExpVector(tuple(t1.entries[i] if i in P else t1.entries[i] + gL.entries[i].shift(k2)
                                     for i in range(n)))
                sid = self._lift(sid, t1, m2, Bh)
                sid, m3 = self._switch(sid, m2, gL, gR, k2, g_sid, negate, Bh)
                m4 = ExpVector(tuple(gR.entries[i].shift(k2) if i in P else gR.entries[i].shift(s)
                                     for i in range(n)))
                sid = self._lift(sid, m3, m4, Bh)
                m = m4
                k = k2
        return self._lift(sid, m, target, Bh)

    def _prove_step(self, red, b, depth):
        bld = self.builder
        hh, gg, s = red.hh, red.gg, red.s
        Bh = self.B(hh)
        g_sid = self.oriented_axiom(gg, b)
        gs_sid = bld.shift_power(g_sid, s)
        combo = [(self.mono(red.q_factor), gs_sid)]
        w_sid = self.prove(red.ww, depth + 1)
        if w_sid is not None:
            combo.append((self.mono(red.d_factor), w_sid))
        sid_m = bld.ideal(combo, payload=self.mono(red.multiplier) * Bh)

        gp, gm = gg.positive_part(), gg.negative_part()
        hp, hm = hh.positive_part(), hh.negative_part()
        tau = sign_pattern(hh).pattern
        plus_block = [i for i in range(self.n) if tau[i] == "+"]
        minus_block = [i for i in range(self.n) if tau[i] == "-"]
        # Y^{x^s g+} * B(h)
        sid_top = self._lift(sid_m, red.multiplier, gp.shift(s), Bh)
        # Y^{x^s g-} * B(h)
        sid_bot, _ = self._switch(sid_top, gp.shift(s), gp, gm, s, g_sid, False, Bh)
        sid_R = self._ladder(sid_bot, gm.shift(s), gp, gm, plus_block, s, hm, g_sid, False, Bh)
        sid_L = self._ladder(sid_top, gp.shift(s), gm, gp, minus_block, s, hp, g_sid, True, Bh)
        one = TruncPoly.const(self.n, self.D, 1)
        sq = bld.ideal([(one, sid_L), (-one, sid_R)], payload=Bh * Bh)
        return bld.radical(sq, Bh)


def membership_certificate(h, F, caps=None, D=None, lattice_check=True, rules=RULES):
    """Certificate that B(h) = Y^{h+} - Y^{h-} lies in the radical well-mixed closure of F.

    ``F`` is a collection of DiffBinomial.  Raises NoApplicableBasisElement if
    the reduction gets stuck and ResourceCapError when caps are hit.
    """
    caps = caps or MemberCaps()
    F = list(F)
    n = h.n
    if D is None:
        D = max([max(h.max_degree(), 0)] + [b.max_degree() for b in F])
    if lattice_check and not h.is_zero():
        L = Lattice(n, tuple(b.vector for b in F))
        d = caps.member_deg if caps.member_deg is not None else max(h.max_degree(), 1)
        if not truncated_member(L, h, d):
            raise NoApplicableBasisElement(
                f"{h} is not a combination of the basis vectors with cofactor degree <= {d}", vector=h)
    if h.max_degree() > D:
        raise TruncationError(f"{h} needs truncation at least {h.max_degree()}, got D={D}")
    prover = _Prover(F, n, D, caps, rules)
    sid = prover.prove(h)
    if sid is None:
        # B(0) = 0 is the empty combination
        sid = prover.builder.empty_combination()
    return prover.builder.build(sid)

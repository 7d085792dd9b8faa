"""Z[x]-lattices: generators, bounded enumeration, membership, signatures, M-saturation."""

import itertools
import json
from dataclasses import dataclass, field

from .errors import ParseError, ResourceCapError
from .exponents import ONE, X, ExpVector, SymPoly, signed_parts
from .intlin import solve_integer

DEFAULT_MAX_COMBINATIONS = 200_000


def _normalize_sign(v):
    # first nonzero entry gets a positive leading coefficient
    for e in v.entries:
        if not e.is_zero():
            return v if e.lc > 0 else -v
    return v


def canonical_generators(gens):
    out = set()
    for g in gens:
        if g.is_zero():
            continue
        out.add(_normalize_sign(g))
    return tuple(sorted(out, key=ExpVector.sort_key))


@dataclass(frozen=True)
class Lattice:
    """A finitely generated Z[x]-submodule of Z[x]^n, kept by its generators.

    Generators are stored sign-normalized and sorted, without duplicates or
    the zero vector.  Integer content is *not* divided out, since that would
    change the module.
    """

    n: int
    generators: tuple = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("lattice dimension must be >= 1")
        for g in self.generators:
            if g.n != self.n:
                raise ValueError(f"generator {g} has length {g.n}, expected {self.n}")
        object.__setattr__(self, "generators", canonical_generators(self.generators))

    def with_generators(self, extra):
        return Lattice(self.n, tuple(self.generators) + tuple(extra))

    def is_zero(self):
        return not self.generators

    def to_json(self):
        return {"n": self.n, "generators": [g.to_json() for g in self.generators]}

    @classmethod
    def from_json(cls, data):
        try:
            n = data["n"]
            gens = [ExpVector.from_json(g) for g in data["generators"]]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad lattice object: {exc}") from exc
        if not isinstance(n, int) or n < 1:
            raise ParseError("lattice 'n' must be a positive integer")
        for g in gens:
            if g.n != n:
                raise ParseError(f"generator {g} does not have length {n}")
        return cls(n, tuple(gens))

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ParseError(str(exc)) from exc
        return cls.from_json(data)


# sign patterns and signatures

@dataclass(frozen=True)
class SignPattern:
    pattern: tuple

    @property
    def is_zero_pattern(self):
        return all(p == "0" for p in self.pattern)

    def flipped(self):
        swap = {"+": "-", "-": "+", "0": "0"}
        return SignPattern(tuple(swap[p] for p in self.pattern))

    def __str__(self):
        return "".join(self.pattern)


def sign_pattern(h):
    out = []
    for e in h.entries:
        if e.lc > 0:
            out.append("+")
        elif e.lc < 0:
            out.append("-")
        else:
            out.append("0")
    return SignPattern(tuple(out))


def signature(h):
    """The tuple (deg h1+, lc h1+, ..., deg hn+, lc hn+, deg h1-, ..., deg hn-)."""
    head = []
    tail = []
    for e in h.entries:
        big, small = signed_parts(e)
        head.extend((big.deg, big.lc))
        tail.append(small.deg)
    return tuple(head + tail)


def dominates(sig_small, sig_big):
    """Product order: every component of ``sig_small`` is <= that of ``sig_big``."""
    return all(a <= b for a, b in zip(sig_small, sig_big))


@dataclass(frozen=True)
class OmMap:
    """The values o_m used by M-saturation; o_m defaults to 1 for every m."""

    values: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.values.get(1, ONE) != ONE:
            raise ValueError("o_1 must be 1")

    def __getitem__(self, m):
        v = self.values.get(m, ONE)
        return v if isinstance(v, SymPoly) else SymPoly.const(v)

    def __hash__(self):
        return hash(tuple(sorted((k, self[k]) for k in self.values)))


# enumeration and membership

def _coefficient_polys(d, H):
    rng = range(-H, H + 1)
    return [SymPoly(c) for c in itertools.product(rng, repeat=d + 1)]


def enumerate_elements(L, d, H, max_combinations=DEFAULT_MAX_COMBINATIONS):
    """All nonzero sum c_k g_k with deg(c_k) <= d and |coefficients of c_k| <= H.

    Returned as a list sorted by ``ExpVector.sort_key`` without duplicates.
    """
    if d < 0 or H < 1:
        raise ValueError("need d >= 0 and H >= 1")
    k = len(L.generators)
    if k == 0:
        return []
    count = (2 * H + 1) ** ((d + 1) * k)
    if count > max_combinations:
        raise ResourceCapError(
            f"enumeration needs {count} combinations, cap is {max_combinations}")
    coeffs = _coefficient_polys(d, H)
    # precompute the multiples c * g for every generator
    multiples = [[g.scale(c) for c in coeffs] for g in L.generators]
    seen = set()
    for combo in itertools.product(*multiples):
        v = combo[0]
        for w in combo[1:]:
            v = v + w
        if not v.is_zero():
            seen.add(v)
    return sorted(seen, key=ExpVector.sort_key)


def _linear_system(L, v, d):
    """Z-linearization of ``v = sum c_k g_k`` with deg(c_k) <= d."""
    gens = L.generators
    width = 0
    for g in gens:
        width = max(width, g.max_degree() + d + 1)
    width = max(width, v.max_degree() + 1, 1)
    rows = []
    rhs = []
    for i in range(L.n):
        for t in range(width):
            row = []
            for g in gens:
                gc = g.entries[i].coeffs
                for s in range(d + 1):
                    # coefficient of x^t in x^s * g_i
                    row.append(gc[t - s] if 0 <= t - s < len(gc) else 0)
            rows.append(row)
            vc = v.entries[i].coeffs
            rhs.append(vc[t] if t < len(vc) else 0)
    return rows, rhs


def solve_member(L, v, d):
    """Return cofactors ``[c_k]`` (SymPolys) with ``v = sum c_k g_k``, or None."""
    if v.n != L.n:
        raise ValueError("dimension mismatch")
    if v.is_zero():
        return [SymPoly() for _ in L.generators]
    if not L.generators:
        return None
    if v.max_degree() > max(g.max_degree() for g in L.generators) + d:
        return None
    rows, rhs = _linear_system(L, v, d)
    z = solve_integer(rows, rhs)
    if z is None:
        return None
    return [SymPoly(tuple(z[k * (d + 1):(k + 1) * (d + 1)])) for k in range(len(L.generators))]


def truncated_member(L, v, d):
    """Decide whether v = sum c_k g_k for some c_k in Z[x] with deg(c_k) <= d."""
    if d < 0:
        raise ValueError("d must be >= 0")
    return solve_member(L, v, d) is not None


def _divide_vector(w, m):
    out = []
    for e in w.entries:
        if any(c % m for c in e.coeffs):
            return None
        out.append(SymPoly(tuple(c // m for c in e.coeffs)))
    return ExpVector(tuple(out))


def sat_M(L, om=None, m_bound=4, enum_deg=1, enum_height=1, member_deg=None,
          max_iterations=20, max_combinations=DEFAULT_MAX_COMBINATIONS):
    """Bounded M-saturation: close L under ``m f in L => (x - o_m) f in L``.

    Only elements produced by ``enumerate_elements(L, enum_deg, enum_height)``
    and divisors ``2 <= m <= m_bound`` are scanned, so the result is a lattice
    between L and the true M-saturation.
    """
    if m_bound < 2:
        raise ValueError("m_bound must be >= 2")
    om = om or OmMap()
    if member_deg is None:
        member_deg = enum_deg + 1
    current = L
    for _ in range(max_iterations):
        added = []
        for w in enumerate_elements(current, enum_deg, enum_height, max_combinations):
            for m in range(2, m_bound + 1):
                f = _divide_vector(w, m)
                if f is None:
                    continue
                cand = f.scale(X - om[m])
                if cand.is_zero():
                    continue
                probe = current.with_generators(added)
                if not truncated_member(probe, cand, member_deg):
                    added.append(cand)
        if not added:
            return current
        current = current.with_generators(added)
    raise ResourceCapError(f"sat_M did not stabilize in {max_iterations} iterations", partial=current)


def lattice_of_binomials(binomials, n=None):
    """Support lattice generated by ``plus - minus`` over pure binomials."""
    gens = []
    for b in binomials:
        gens.append(b.plus - b.minus)
        n = b.plus.n if n is None else n
    if n is None:
        raise ValueError("dimension needed for an empty binomial set")
    return Lattice(n, tuple(gens))

"""The polynomial ring Q[y_{i,j} : 1 <= i <= n, 0 <= j <= D].

``y_{i,j}`` stands for ``y_i^{x^j}`` = sigma^j(y_i).  Exponent tuples are flat:
variable ``y_{i,j}`` sits at index ``(i-1)*(D+1) + j``.  The monomial order is
degree-then-lex with variables ordered by (i, j) ascending, i.e. ``y_{1,0}``
is the largest variable.
"""

import re
from dataclasses import dataclass, field
from fractions import Fraction

from . import groebner as gb
from .errors import ParseError, TruncationError
from .exponents import ExpVector, SymPoly


class TruncPoly:
    """Immutable polynomial in the truncated ring with exact rational coefficients."""

    __slots__ = ("n", "D", "terms", "_hash")

    def __init__(self, n, D, terms=None):
        if n < 1 or D < 0:
            raise ValueError("need n >= 1 and D >= 0")
        self.n = n
        self.D = D
        clean = {}
        width = n * (D + 1)
        for m, c in (terms or {}).items():
            if len(m) != width:
                raise ValueError(f"monomial {m} has wrong width for n={n}, D={D}")
            if c:
                clean[tuple(m)] = Fraction(c)
        self.terms = clean
        self._hash = None

    # constructors

    @classmethod
    def zero(cls, n, D):
        return cls(n, D)

    @classmethod
    def const(cls, n, D, c):
        return cls(n, D, {(0,) * (n * (D + 1)): c})

    @classmethod
    def var(cls, n, D, i, j, power=1):
        if not (1 <= i <= n and 0 <= j <= D):
            raise TruncationError(f"y[{i}][{j}] is outside n={n}, D={D}")
        m = [0] * (n * (D + 1))
        m[(i - 1) * (D + 1) + j] = power
        return cls(n, D, {tuple(m): 1})

    @classmethod
    def monomial(cls, n, D, exps, coef=1):
        return cls(n, D, {tuple(exps): coef})

    # ring operations

    def _same(self, other):
        if (self.n, self.D) != (other.n, other.D):
            raise ValueError(f"ring mismatch: (n={self.n}, D={self.D}) vs (n={other.n}, D={other.D})")

    def _coerce(self, other):
        if isinstance(other, TruncPoly):
            self._same(other)
            return other
        if isinstance(other, (int, Fraction)):
            return TruncPoly.const(self.n, self.D, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return TruncPoly(self.n, self.D, gb.p_add_scaled(self.terms, other.terms, 1, self._one()))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return TruncPoly(self.n, self.D, gb.p_add_scaled(self.terms, other.terms, -1, self._one()))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return TruncPoly(self.n, self.D, {m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return TruncPoly(self.n, self.D, gb.p_mul(self.terms, other.terms))

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power")
        out = TruncPoly.const(self.n, self.D, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def _one(self):
        return (0,) * (self.n * (self.D + 1))

    # structure

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TruncPoly.const(self.n, self.D, other)
        if not isinstance(other, TruncPoly):
            return NotImplemented
        return (self.n, self.D) == (other.n, other.D) and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.D, frozenset(self.terms.items())))
        return self._hash

    def monomials(self):
        return sorted(self.terms, key=gb.mono_key, reverse=True)

    def leading_monomial(self):
        return gb.leading_monomial(self.terms)

    def max_shift(self):
        """Largest j such that some y_{i,j} occurs; -1 for constants."""
        top = -1
        w = self.D + 1
        for m in self.terms:
            for idx, e in enumerate(m):
                if e:
                    top = max(top, idx % w)
        return top

    def is_monomial(self):
        return len(self.terms) == 1

    def variables(self):
        """Set of (i, j) pairs occurring in the polynomial."""
        out = set()
        w = self.D + 1
        for m in self.terms:
            for idx, e in enumerate(m):
                if e:
                    out.add((idx // w + 1, idx % w))
        return out

    def retrunc(self, D):
        """The same polynomial viewed in the ring with truncation D."""
        if D == self.D:
            return self
        out = {}
        old = self.D + 1
        for m, c in self.terms.items():
            new = [0] * (self.n * (D + 1))
            for idx, e in enumerate(m):
                if e:
                    i, j = divmod(idx, old)
                    if j > D:
                        raise TruncationError(f"y[{i + 1}][{j}] does not fit at D={D}")
                    new[i * (D + 1) + j] = e
            out[tuple(new)] = c
        return TruncPoly(self.n, D, out)

    def sort_key(self):
        return tuple((gb.mono_key(m), self.terms[m]) for m in self.monomials())

    # text format

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"TruncPoly({to_text(self)!r}, n={self.n}, D={self.D})"


def shift(p):
    """Apply sigma: every y_{i,j} becomes y_{i,j+1}."""
    w = p.D + 1
    out = {}
    for m, c in p.terms.items():
        new = [0] * len(m)
        for idx, e in enumerate(m):
            if e:
                if idx % w == p.D:
                    raise TruncationError(f"shift leaves the ring: variable with j = D = {p.D}")
                new[idx + 1] = e
        out[tuple(new)] = c
    return TruncPoly(p.n, p.D, out)


def shift_power(p, s):
    for _ in range(s):
        p = shift(p)
    return p


def monomial_exponents(f, D):
    """Flat exponent tuple of Y^f for f in N[x]^n."""
    n = f.n
    m = [0] * (n * (D + 1))
    for i, e in enumerate(f.entries):
        if any(c < 0 for c in e.coeffs):
            raise ValueError(f"support {f} is not in N[x]^n")
        if e.deg > D:
            raise TruncationError(f"entry {e} of degree {e.deg} exceeds D={D}")
        for j, c in enumerate(e.coeffs):
            m[i * (D + 1) + j] = c
    return tuple(m)


def expand(f, D):
    """Y^f as a monomial of the truncated ring."""
    return TruncPoly.monomial(f.n, D, monomial_exponents(f, D))


def exponents_to_vector(m, n, D):
    """Inverse of monomial_exponents."""
    w = D + 1
    return ExpVector(tuple(SymPoly(tuple(m[i * w:(i + 1) * w])) for i in range(n)))


def binomial_poly(plus, minus, D):
    """Y^plus - Y^minus in the truncated ring."""
    return expand(plus, D) - expand(minus, D)


# text format: "c * y[i][j]^e * ... + c * ..."

def _fmt_coef(c):
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def to_text(p):
    if not p.terms:
        return "0"
    w = p.D + 1
    out = []
    for m in p.monomials():
        factors = [_fmt_coef(p.terms[m])]
        for idx, e in enumerate(m):
            if e:
                i, j = divmod(idx, w)
                factors.append(f"y[{i + 1}][{j}]" + (f"^{e}" if e != 1 else ""))
        out.append(" * ".join(factors))
    return " + ".join(out)


_FACTOR = re.compile(r"y\[(\d+)\]\[(\d+)\](?:\^(\d+))?$")
_COEF = re.compile(r"[+-]?\d+(?:/\d+)?$")


def parse_text(text, n, D):
    """Parse the output of ``to_text`` (and hand-written variants) back to a TruncPoly."""
    s = text.strip()
    if not s:
        raise ParseError("empty polynomial text")
    # split on top-level + and binary -
    tokens = re.split(r"\s*\+\s*|\s+-\s+", s)
    signs = [1]
    for sep in re.findall(r"\s*\+\s*|\s+-\s+", s):
        signs.append(-1 if "-" in sep else 1)
    terms = {}
    width = n * (D + 1)
    for sign, tok in zip(signs, tokens):
        tok = tok.strip()
        if not tok:
            raise ParseError(f"empty term in {text!r}")
        coef = Fraction(sign)
        m = [0] * width
        for fac in (f.strip() for f in tok.split("*")):
            if _COEF.match(fac):
                coef *= Fraction(fac)
                continue
            if fac.startswith("-") and _FACTOR.match(fac[1:]):
                coef = -coef
                fac = fac[1:]
            mf = _FACTOR.match(fac)
            if mf is None:
                raise ParseError(f"bad factor {fac!r} in {text!r}")
            i, j, e = int(mf.group(1)), int(mf.group(2)), int(mf.group(3) or 1)
            if not (1 <= i <= n and 0 <= j <= D):
                raise ParseError(f"variable y[{i}][{j}] outside n={n}, D={D}")
            m[(i - 1) * (D + 1) + j] += e
        key = tuple(m)
        v = terms.get(key, 0) + coef
        if v:
            terms[key] = v
        else:
            terms.pop(key, None)
    return TruncPoly(n, D, terms)


# ideals

@dataclass
class Caps:
    """Completion limits for Buchberger runs."""

    max_pairs: int = gb.DEFAULT_MAX_PAIRS
    max_basis: int = gb.DEFAULT_MAX_BASIS


@dataclass
class TruncatedIdeal:
    """An ideal of the truncated ring given by generators.

    The reduced Groebner basis is computed lazily and cached.
    """

    n: int
    D: int
    generators: list = field(default_factory=list)
    caps: Caps = field(default_factory=Caps)
    _nf: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        gens = []
        for g in self.generators:
            if (g.n, g.D) != (self.n, self.D):
                raise ValueError("generator ring mismatch")
            if g:
                gens.append(g)
        self.generators = gens

    def groebner(self):
        return self.normal_form().basis

    def normal_form(self):
        if self._nf is None:
            basis, _ = gb.buchberger([g.terms for g in self.generators],
                                     self.caps.max_pairs, self.caps.max_basis)
            self._nf = gb.NormalForm(basis)
        return self._nf

    def reduce(self, p):
        return TruncPoly(self.n, self.D, self.normal_form()(p.terms))

    def contains(self, p):
        if (p.n, p.D) != (self.n, self.D):
            raise ValueError("ring mismatch")
        if not p:
            return True
        if not self.generators:
            return False
        return self.normal_form().is_zero(p.terms)

    def add(self, polys):
        """A new ideal with extra generators."""
        return TruncatedIdeal(self.n, self.D, self.generators + list(polys), self.caps)

    def cofactors(self, p):
        """Polynomials c_k with p = sum c_k generators[k], or None."""
        out = gb.express(p.terms, [g.terms for g in self.generators],
                         self.caps.max_pairs, self.caps.max_basis)
        if out is None:
            return None
        return [TruncPoly(self.n, self.D, c) for c in out]


def ideal_member(p, I):
    """Exact decision of p in the ideal generated by I's generators."""
    return I.contains(p)

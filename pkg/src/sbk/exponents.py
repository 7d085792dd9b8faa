"""Symbolic exponents: univariate integer polynomials in x.

An element ``p = c0 + c1 x + ... + cs x^s`` of N[x] acts on a difference ring
element by ``a^p = a^c0 * sigma(a)^c1 * ... * sigma^s(a)^cs``.  Vectors of such
polynomials are the supports of difference monomials and the elements of
Z[x]-lattices.
"""

import re
from dataclasses import dataclass
from itertools import zip_longest
from typing import NamedTuple, Sequence

from .errors import ParseError


def _trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True)
class SymPoly:
    """Integer polynomial in x, stored as a trimmed coefficient tuple.

    ``coeffs[k]`` is the coefficient of ``x**k``.  The zero polynomial is the
    empty tuple and has degree -1.
    """

    coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(int(c) for c in self.coeffs))

    @classmethod
    def const(cls, c):
        return cls((c,))

    @classmethod
    def monomial(cls, coef, degree):
        if degree < 0:
            return cls()
        return cls((0,) * degree + (coef,))

    @classmethod
    def parse(cls, text):
        """Parse strings like ``"x^2 - x + 1"`` or ``"3*x^3 + 2"``."""
        s = text.replace(" ", "").replace("**", "^")
        if not s:
            raise ParseError("empty polynomial")
        if s[0] not in "+-":
            s = "+" + s
        pieces = re.findall(r"[+-][^+-]+", s)
        if "".join(pieces) != s:
            raise ParseError(f"cannot parse polynomial {text!r}")
        out = {}
        for piece in pieces:
            sign = -1 if piece[0] == "-" else 1
            body = piece[1:]
            m = re.fullmatch(r"(\d+)?\*?(x(\^(\d+))?)?", body)
            if m is None or (m.group(1) is None and m.group(2) is None):
                raise ParseError(f"bad term {piece!r} in {text!r}")
            coef = int(m.group(1)) if m.group(1) else 1
            if m.group(2) is None:
                deg = 0
            else:
                deg = int(m.group(4)) if m.group(4) else 1
            out[deg] = out.get(deg, 0) + sign * coef
        top = max(out)
        return cls(tuple(out.get(k, 0) for k in range(top + 1)))

    # ring structure

    def __add__(self, other):
        return SymPoly(tuple(a + b for a, b in zip_longest(self.coeffs, other.coeffs, fillvalue=0)))

    def __sub__(self, other):
        return SymPoly(tuple(a - b for a, b in zip_longest(self.coeffs, other.coeffs, fillvalue=0)))

    def __neg__(self):
        return SymPoly(tuple(-c for c in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int):
            return SymPoly(tuple(other * c for c in self.coeffs))
        if not self.coeffs or not other.coeffs:
            return SymPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return SymPoly(tuple(out))

    __rmul__ = __mul__

    def shift(self, s):
        """Return ``x**s * self``."""
        if s < 0:
            raise ValueError("shift must be nonnegative")
        if not self.coeffs:
            return self
        return SymPoly((0,) * s + self.coeffs)

    # leading data

    @property
    def deg(self):
        return len(self.coeffs) - 1

    @property
    def lc(self):
        return self.coeffs[-1] if self.coeffs else 0

    def leading(self):
        return Term(self.lc, self.deg)

    def is_zero(self):
        return not self.coeffs

    def is_natural(self):
        """True if every coefficient is nonnegative (an element of N[x])."""
        return all(c >= 0 for c in self.coeffs)

    def content(self):
        from math import gcd

        g = 0
        for c in self.coeffs:
            g = gcd(g, c)
        return g

    def sort_key(self):
        return (self.deg, tuple(reversed(self.coeffs)))

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mag = abs(c)
            if k == 0:
                body = str(mag)
            else:
                xs = "x" if k == 1 else f"x^{k}"
                body = xs if mag == 1 else f"{mag}*{xs}"
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("- " if c < 0 else "+ ") + body)
        return " ".join(parts)

    def __repr__(self):
        return f"SymPoly({str(self)!r})"

    def to_json(self):
        return list(self.coeffs)

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in data):
            raise ParseError(f"polynomial must be an integer array, got {data!r}")
        return cls(tuple(data))


ZERO = SymPoly()
ONE = SymPoly((1,))
X = SymPoly((0, 1))


class Term(NamedTuple):
    """Leading term ``coef * x**degree``; the zero term is (0, -1)."""

    coef: int
    degree: int


ZERO_TERM = Term(0, -1)


def term_less(t1, t2):
    """Strict order on terms: degree first, then coefficient."""
    return (t1.degree, t1.coef) < (t2.degree, t2.coef)


def term_key(t):
    return (t.degree, t.coef)


def leading(h):
    return h.leading()


def deg(h):
    return h.deg


def lc(h):
    return h.lc


def split_parts(f):
    """Return ``(f_plus, f_minus)`` in N[x] with ``f = f_plus - f_minus``."""
    plus = tuple(c if c > 0 else 0 for c in f.coeffs)
    minus = tuple(-c if c < 0 else 0 for c in f.coeffs)
    return SymPoly(plus), SymPoly(minus)


def signed_parts(h):
    """Return the positive/negative parts ordered so the first has larger degree."""
    hp, hm = split_parts(h)
    if hp.deg > hm.deg:
        return hp, hm
    return hm, hp


def coef_min(a, b):
    """Coefficientwise minimum of two polynomials."""
    return SymPoly(tuple(min(u, v) for u, v in zip_longest(a.coeffs, b.coeffs, fillvalue=0)))


def coef_max(a, b):
    return SymPoly(tuple(max(u, v) for u, v in zip_longest(a.coeffs, b.coeffs, fillvalue=0)))


def truncate_below(p, degree):
    """Drop every term of degree >= ``degree``."""
    return SymPoly(p.coeffs[:max(degree, 0)])


@dataclass(frozen=True)
class ExpVector:
    """A vector of n symbolic exponents (an element of Z[x]^n or N[x]^n)."""

    entries: tuple

    def __post_init__(self):
        entries = tuple(e if isinstance(e, SymPoly) else SymPoly(tuple(e)) for e in self.entries)
        if not entries:
            raise ValueError("ExpVector needs at least one entry")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def zero(cls, n):
        return cls((ZERO,) * n)

    @classmethod
    def parse(cls, *texts):
        return cls(tuple(SymPoly.parse(t) for t in texts))

    @property
    def n(self):
        return len(self.entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def _check(self, other):
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        self._check(other)
        return ExpVector(tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other):
        self._check(other)
        return ExpVector(tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self):
        return ExpVector(tuple(-a for a in self.entries))

    def scale(self, c):
        """Multiply every entry by ``c`` (a SymPoly or an int)."""
        return ExpVector(tuple(c * a if isinstance(c, int) else a * c for a in self.entries))

    def shift(self, s):
        return ExpVector(tuple(a.shift(s) for a in self.entries))

    def is_zero(self):
        return all(e.is_zero() for e in self.entries)

    def is_natural(self):
        return all(e.is_natural() for e in self.entries)

    def max_degree(self):
        return max(e.deg for e in self.entries)

    def positive_part(self):
        return ExpVector(tuple(split_parts(e)[0] for e in self.entries))

    def negative_part(self):
        return ExpVector(tuple(split_parts(e)[1] for e in self.entries))

    def sort_key(self):
        return tuple(e.sort_key() for e in self.entries)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        return "(" + ", ".join(str(e) for e in self.entries) + ")"

    def __repr__(self):
        return f"ExpVector{self}"

    def to_json(self):
        return [e.to_json() for e in self.entries]

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, list) or not data:
            raise ParseError(f"vector must be a nonempty array of polynomials, got {data!r}")
        return cls(tuple(SymPoly.from_json(d) for d in data))


def vec_min(a, b):
    return ExpVector(tuple(coef_min(u, v) for u, v in zip(a.entries, b.entries)))


def as_vector(entries: Sequence) -> ExpVector:
    """Build an ExpVector from SymPolys, coefficient lists or strings."""
    out = []
    for e in entries:
        if isinstance(e, str):
            out.append(SymPoly.parse(e))
        elif isinstance(e, SymPoly):
            out.append(e)
        else:
            out.append(SymPoly(tuple(e)))
    return ExpVector(tuple(out))

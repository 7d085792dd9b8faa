"""Buchberger completion over Q on sparse dict polynomials.

A polynomial is a dict mapping exponent tuples to nonzero Fractions.  The
monomial order is degree-then-lexicographic on the exponent tuple, so the
variable at index 0 is the largest.
"""

import heapq
from fractions import Fraction

from .errors import ResourceCapError

DEFAULT_MAX_PAIRS = 20_000
DEFAULT_MAX_BASIS = 2_000


def mono_key(m):
    return (sum(m), m)


def leading_monomial(p):
    return max(p, key=mono_key)


def divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def mono_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def mono_div(a, b):
    return tuple(x - y for x, y in zip(a, b))


def mono_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def coprime(a, b):
    return all(x == 0 or y == 0 for x, y in zip(a, b))


def p_add_scaled(p, q, c, m):
    """Return p + c * x^m * q as a new dict."""
    out = dict(p)
    for mq, cq in q.items():
        k = mono_mul(mq, m)
        v = out.get(k, 0) + c * cq
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


def p_mul(p, q):
    out = {}
    for ma, ca in p.items():
        for mb, cb in q.items():
            k = mono_mul(ma, mb)
            v = out.get(k, 0) + ca * cb
            if v:
                out[k] = v
            else:
                del out[k]
    return out


def make_monic(p):
    lm = leading_monomial(p)
    c = p[lm]
    if c == 1:
        return dict(p)
    return {m: Fraction(v) / c for m, v in p.items()}


class _Basis:
    def __init__(self, nvars, track=False, nin=0):
        self.polys = []
        self.lms = []
        self.reps = []  # per element: dict input-index -> poly, when tracking
        self.track = track
        self.nin = nin
        self.nvars = nvars

    def find_reducer(self, m):
        for k, lm in enumerate(self.lms):
            if lm is not None and divides(lm, m):
                return k
        return None

    def reduce(self, p, rep=None, full=True):
        """Reduce p by the basis; returns (remainder, rep) where rep tracks inputs."""
        p = dict(p)
        rem = {}
        while p:
            m = leading_monomial(p)
            c = p[m]
            k = self.find_reducer(m)
            if k is None:
                if not full:
                    rem.update(p)
                    break
                rem[m] = c
                del p[m]
                continue
            g = self.polys[k]
            q = mono_div(m, self.lms[k])
            coef = -Fraction(c) / g[self.lms[k]]
            p = p_add_scaled(p, g, coef, q)
            if rep is not None:
                rep = _rep_add(rep, self.reps[k], coef, q)
        return rem, rep


def _rep_add(rep, other, c, m):
    out = dict(rep)
    for idx, poly in other.items():
        newp = p_add_scaled(out.get(idx, {}), poly, c, m)
        if newp:
            out[idx] = newp
        else:
            out.pop(idx, None)
    return out


def _rep_scale(rep, c):
    return {idx: {m: v * c for m, v in poly.items()} for idx, poly in rep.items()}


def _update_pairs(lms, lm, idx, pairs, queue):
    """Gebauer-Moeller update of the pending pairs for a new leading monomial ``lm``."""
    cands = [(k, mono_lcm(lmk, lm)) for k, lmk in enumerate(lms)]
    kept = []
    for pos, (k, lcm) in enumerate(cands):
        if coprime(lms[k], lm):
            kept.append((k, lcm))
            continue
        rest = cands[pos + 1:]
        if any(divides(l2, lcm) for _, l2 in rest) or any(divides(l2, lcm) for _, l2 in kept):
            continue
        kept.append((k, lcm))
    # pairs already pending that lm makes redundant
    by_k = dict(cands)
    for i, j in list(pairs):
        lcm = mono_lcm(lms[i], lms[j])
        if divides(lm, lcm) and by_k[i] != lcm and by_k[j] != lcm:
            pairs.discard((i, j))
    for k, lcm in kept:
        if coprime(lms[k], lm):
            continue
        pairs.add((k, idx))
        heapq.heappush(queue, (sum(lcm), k, idx))


def buchberger(polys, max_pairs=DEFAULT_MAX_PAIRS, max_basis=DEFAULT_MAX_BASIS, track=False):
    """Complete ``polys`` to a reduced Groebner basis.

    Returns ``(basis, reps)``.  With ``track`` set, ``reps[k]`` maps input
    indices to cofactor polynomials expressing ``basis[k]``; otherwise reps is
    None.  Raises ResourceCapError if the pair or basis limits are exceeded.
    """
    polys = [p for p in polys if p]
    if not polys:
        return [], ([] if track else None)
    nvars = len(next(iter(polys[0])))
    B = _Basis(nvars, track=track, nin=len(polys))
    pairs = set()       # pending pairs
    queue = []          # the same pairs keyed by degree of their lcm
    processed = 0

    def add(p, rep):
        lm = leading_monomial(p)
        c = p[lm]
        p = {m: Fraction(v) / c for m, v in p.items()}
        if rep is not None:
            rep = _rep_scale(rep, Fraction(1) / c)
        idx = len(B.polys)
        _update_pairs(B.lms, lm, idx, pairs, queue)
        B.polys.append(p)
        B.lms.append(lm)
        B.reps.append(rep)
        if len(B.polys) > max_basis:
            raise ResourceCapError(f"Groebner basis exceeded {max_basis} elements")

    for i, p in enumerate(polys):
        rep = {i: {(0,) * nvars: Fraction(1)}} if track else None
        r, rep = B.reduce(p, rep)
        if r:
            add(r, rep)

    while queue:
        _, i, j = heapq.heappop(queue)
        if (i, j) not in pairs:
            continue
        pairs.discard((i, j))
        processed += 1
        if processed > max_pairs:
            raise ResourceCapError(f"Groebner completion exceeded {max_pairs} pairs")
        lmi, lmj = B.lms[i], B.lms[j]
        lcm = mono_lcm(lmi, lmj)
        gi, gj = B.polys[i], B.polys[j]
        s = p_add_scaled({}, gi, Fraction(1), mono_div(lcm, lmi))
        s = p_add_scaled(s, gj, Fraction(-1), mono_div(lcm, lmj))
        rep = None
        if track:
            rep = _rep_add({}, B.reps[i], Fraction(1), mono_div(lcm, lmi))
            rep = _rep_add(rep, B.reps[j], Fraction(-1), mono_div(lcm, lmj))
        r, rep = B.reduce(s, rep)
        if r:
            add(r, rep)

    # minimalize: drop elements whose leading monomial is divisible by another's
    keep = []
    for k, lm in enumerate(B.lms):
        redundant = False
        for l, lm2 in enumerate(B.lms):
            if l != k and divides(lm2, lm) and (lm2 != lm or l < k):
                redundant = True
                break
        if not redundant:
            keep.append(k)
    # interreduce tails
    final = _Basis(nvars, track=track)
    final.lms = [B.lms[k] for k in keep]
    final.polys = [B.polys[k] for k in keep]
    final.reps = [B.reps[k] for k in keep]
    out_polys = []
    out_reps = []
    for pos, k in enumerate(keep):
        p = B.polys[k]
        lm = B.lms[k]
        others = _Basis(nvars, track=track)
        others.lms = [l for q, l in enumerate(final.lms) if q != pos]
        others.polys = [g for q, g in enumerate(final.polys) if q != pos]
        others.reps = [r for q, r in enumerate(final.reps) if q != pos]
        tail = {m: c for m, c in p.items() if m != lm}
        rep = B.reps[k]
        if tail:
            tr, rrep = others.reduce(tail, {} if track else None)
            newp = dict(tr)
            newp[lm] = p[lm]
            if track:
                # tr = tail + sum(rrep * inputs), so newp = p + sum(rrep * inputs)
                rep = _rep_add(rep, rrep, Fraction(1), (0,) * nvars)
            p = newp
        out_polys.append(p)
        out_reps.append(rep)
    order = sorted(range(len(out_polys)), key=lambda q: mono_key(leading_monomial(out_polys[q])), reverse=True)
    basis = [out_polys[q] for q in order]
    reps = [out_reps[q] for q in order] if track else None
    return basis, reps


def reduce_full(p, basis):
    """Normal form of p modulo a Groebner basis (list of dicts)."""
    B = _Basis(0)
    B.polys = basis
    B.lms = [leading_monomial(g) for g in basis]
    r, _ = B.reduce(p, None)
    return r


class NormalForm:
    """Normal-form map for a fixed basis, caching the image of each monomial."""

    def __init__(self, basis):
        self.basis = basis
        self._B = _Basis(0)
        self._B.polys = basis
        self._B.lms = [leading_monomial(g) for g in basis]
        self._cache = {}

    def of_monomial(self, m):
        r = self._cache.get(m)
        if r is None:
            r, _ = self._B.reduce({m: Fraction(1)}, None)
            self._cache[m] = r
        return r

    def __call__(self, p):
        out = {}
        for m, c in p.items():
            for mm, cc in self.of_monomial(m).items():
                v = out.get(mm, 0) + c * cc
                if v:
                    out[mm] = v
                else:
                    del out[mm]
        return out

    def is_zero(self, p):
        return not self(p)


def express(p, polys, max_pairs=DEFAULT_MAX_PAIRS, max_basis=DEFAULT_MAX_BASIS):
    """Cofactors ``c_k`` with ``p = sum c_k polys[k]``, or None if p is not in the ideal."""
    nonzero = [k for k, q in enumerate(polys) if q]
    if not p:
        return [{} for _ in polys]
    if not nonzero:
        return None
    basis, reps = buchberger([polys[k] for k in nonzero], max_pairs, max_basis, track=True)
    B = _Basis(0, track=True)
    B.polys = basis
    B.lms = [leading_monomial(g) for g in basis]
    B.reps = reps
    r, rep = B.reduce(p, {})
    if r:
        return None
    # reduce() started from rep = 0, so 0 = p + sum(rep * inputs)
    out = [{} for _ in polys]
    for idx, poly in rep.items():
        out[nonzero[idx]] = {m: -c for m, c in poly.items()}
    return out

"""Derivation certificates for membership in a radical well-mixed sigma-ideal.

A certificate is a list of steps, each concluding one element of the
truncated ring from earlier steps:

``AXIOM``      the payload is one of the given generators;
``IDEAL``      the payload equals ``sum cofactor_k * premise_k``;
``SHIFT``      the payload is sigma(premise);
``WELLMIXED``  the premise equals ``a * b`` and the payload is ``a * sigma(b)``;
``RADICAL``    the premise equals ``payload ** 2``.

Checking is pure polynomial expansion; no ideal membership is ever decided.
"""

import json
from dataclasses import dataclass, field

from .errors import ParseError, PreconditionError, TruncationError
from .truncated import TruncPoly, parse_text, shift, to_text

AXIOM = "AXIOM"
IDEAL = "IDEAL"
SHIFT = "SHIFT"
WELLMIXED = "WELLMIXED"
RADICAL = "RADICAL"
RULES = (AXIOM, IDEAL, SHIFT, WELLMIXED, RADICAL)


@dataclass
class CertStep:
    id: int
    rule: str
    premises: tuple
    payload: TruncPoly
    data: dict = field(default_factory=dict)


@dataclass
class Certificate:
    n: int
    D: int
    goal: TruncPoly
    steps: list
    axioms: list = field(default_factory=list)

    def to_json(self):
        steps = []
        for s in self.steps:
            data = {}
            if "cofactors" in s.data:
                data["cofactors"] = [to_text(c) for c in s.data["cofactors"]]
            if "a" in s.data:
                data["a"] = to_text(s.data["a"])
                data["b"] = to_text(s.data["b"])
            steps.append({"id": s.id, "rule": s.rule, "premises": list(s.premises),
                          "payload": to_text(s.payload), "data": data})
        return {"n": self.n, "D": self.D, "goal": to_text(self.goal),
                "axioms": [to_text(a) for a in self.axioms], "steps": steps}

    @classmethod
    def from_json(cls, obj):
        try:
            n, D = obj["n"], obj["D"]
            if not isinstance(n, int) or not isinstance(D, int):
                raise ParseError("n and D must be integers")
            goal = parse_text(obj["goal"], n, D)
            axioms = [parse_text(a, n, D) for a in obj.get("axioms", [])]
            steps = []
            for s in obj["steps"]:
                data = {}
                raw = s.get("data") or {}
                if "cofactors" in raw:
                    data["cofactors"] = [parse_text(c, n, D) for c in raw["cofactors"]]
                if "a" in raw:
                    data["a"] = parse_text(raw["a"], n, D)
                    data["b"] = parse_text(raw["b"], n, D)
                steps.append(CertStep(int(s["id"]), str(s["rule"]), tuple(int(p) for p in s["premises"]),
                                      parse_text(s["payload"], n, D), data))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed certificate: {exc}") from exc
        return cls(n, D, goal, steps, axioms)

    def dumps(self):
        return json.dumps(self.to_json(), indent=1)

    def __len__(self):
        return len(self.steps)


@dataclass
class CheckResult:
    ok: bool
    step: int = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def _fits(p, n, D):
    return isinstance(p, TruncPoly) and p.n == n and p.D == D


def verify_certificate(cert, axioms):
    """Check every step; return a CheckResult naming the first bad step."""
    n, D = cert.n, cert.D
    axiom_set = {a.retrunc(D) if a.D != D else a for a in axioms if a.n == n and a.max_shift() <= D}
    seen = {}
    if not cert.steps:
        return CheckResult(False, None, "certificate has no steps")
    for s in cert.steps:
        if s.id in seen:
            return CheckResult(False, s.id, "duplicate step id")
        if not _fits(s.payload, n, D):
            return CheckResult(False, s.id, "payload not in the ring")
        for p in s.premises:
            if p not in seen:
                return CheckResult(False, s.id, f"premise {p} does not precede the step")
        prem = [seen[p] for p in s.premises]
        if s.rule == AXIOM:
            if prem or s.payload not in axiom_set:
                return CheckResult(False, s.id, "payload is not an axiom")
        elif s.rule == IDEAL:
            cofs = s.data.get("cofactors")
            if cofs is None or len(cofs) != len(prem):
                return CheckResult(False, s.id, "cofactor count does not match premises")
            total = TruncPoly.zero(n, D)
            for c, q in zip(cofs, prem):
                if not _fits(c, n, D):
                    return CheckResult(False, s.id, "cofactor not in the ring")
                total = total + c * q
            if total != s.payload:
                return CheckResult(False, s.id, "cofactor combination does not match payload")
        elif s.rule == SHIFT:
            if len(prem) != 1:
                return CheckResult(False, s.id, "SHIFT needs one premise")
            try:
                if shift(prem[0]) != s.payload:
                    return CheckResult(False, s.id, "payload is not the shift of the premise")
            except TruncationError:
                return CheckResult(False, s.id, "shift leaves the truncated ring")
        elif s.rule == WELLMIXED:
            a, b = s.data.get("a"), s.data.get("b")
            if len(prem) != 1 or not _fits(a, n, D) or not _fits(b, n, D):
                return CheckResult(False, s.id, "WELLMIXED needs one premise and factors a, b")
            if a * b != prem[0]:
                return CheckResult(False, s.id, "premise is not a * b")
            try:
                if a * shift(b) != s.payload:
                    return CheckResult(False, s.id, "payload is not a * sigma(b)")
            except TruncationError:
                return CheckResult(False, s.id, "shift of b leaves the truncated ring")
        elif s.rule == RADICAL:
            if len(prem) != 1 or s.payload * s.payload != prem[0]:
                return CheckResult(False, s.id, "premise is not the square of the payload")
        else:
            return CheckResult(False, s.id, f"unknown rule {s.rule!r}")
        seen[s.id] = s.payload
    last = cert.steps[-1]
    if last.payload != cert.goal:
        return CheckResult(False, last.id, "final payload differs from the goal")
    return CheckResult(True)


def check_certificate(cert, axioms):
    return verify_certificate(cert, axioms).ok


class CertificateBuilder:
    """Accumulates steps, reusing identical conclusions.

    Every step is checked as it is added, so a bug in an engine surfaces at
    the step that introduced it rather than at the end.
    """

    def __init__(self, n, D, axioms=(), check=True, rules=RULES):
        self.rules = frozenset(rules)
        self.n = n
        self.D = D
        self.axioms = list(axioms)
        self.steps = []
        self._by_payload = {}
        self._check = check

    def payload(self, sid):
        return self.steps[sid].payload

    def _add(self, rule, premises, payload, data=None):
        if rule not in self.rules:
            raise PreconditionError(f"rule {rule} is disabled")
        if rule != AXIOM and payload in self._by_payload:
            return self._by_payload[payload]
        step = CertStep(len(self.steps), rule, tuple(premises), payload, data or {})
        if self._check:
            probe = Certificate(self.n, self.D, payload, [self.steps[p] for p in self._closure(premises)] + [step])
            res = verify_certificate(probe, self.axioms)
            if not res:
                raise AssertionError(f"builder produced an invalid {rule} step: {res.reason}")
        self.steps.append(step)
        self._by_payload.setdefault(payload, step.id)
        return step.id

    def _closure(self, ids):
        need = set()
        stack = list(ids)
        while stack:
            k = stack.pop()
            if k in need:
                continue
            need.add(k)
            stack.extend(self.steps[k].premises)
        return sorted(need)

    def known(self, p):
        return self._by_payload.get(p)

    def axiom(self, p):
        if p in self._by_payload and self.steps[self._by_payload[p]].rule == AXIOM:
            return self._by_payload[p]
        if p not in self.axioms:
            self.axioms.append(p)
        step = CertStep(len(self.steps), AXIOM, (), p, {})
        self.steps.append(step)
        self._by_payload[p] = step.id
        return step.id

    def ideal(self, combo, payload=None):
        """``combo`` is a list of (cofactor, step id); payload is recomputed if omitted."""
        combo = [(c, sid) for c, sid in combo if c]
        total = TruncPoly.zero(self.n, self.D)
        for c, sid in combo:
            total = total + c * self.payload(sid)
        if payload is not None and payload != total:
            raise AssertionError("IDEAL payload mismatch")
        if len(combo) == 1 and combo[0][0] == 1:
            return combo[0][1]
        return self._add(IDEAL, [sid for _, sid in combo], total,
                         {"cofactors": [c for c, _ in combo]})

    def empty_combination(self):
        return self._add(IDEAL, [], TruncPoly.zero(self.n, self.D), {"cofactors": []})

    def shift(self, sid):
        return self._add(SHIFT, [sid], shift(self.payload(sid)))

    def shift_power(self, sid, s):
        for _ in range(s):
            sid = self.shift(sid)
        return sid

    def wellmixed(self, sid, a, b):
        return self._add(WELLMIXED, [sid], a * shift(b), {"a": a, "b": b})

    def radical(self, sid, root):
        return self._add(RADICAL, [sid], root)

    def root(self, sid, root, power):
        """From ``root ** power`` (power a power of two) at ``sid``, conclude ``root``."""
        while power > 1:
            power //= 2
            sid = self.radical(sid, root ** power)
        return sid

    def build(self, goal_id):
        keep = self._closure([goal_id])
        remap = {old: new for new, old in enumerate(keep)}
        steps = []
        for old in keep:
            s = self.steps[old]
            steps.append(CertStep(remap[old], s.rule, tuple(remap[p] for p in s.premises), s.payload, s.data))
        used_axioms = [s.payload for s in steps if s.rule == AXIOM]
        return Certificate(self.n, self.D, self.steps[goal_id].payload, steps, used_axioms)

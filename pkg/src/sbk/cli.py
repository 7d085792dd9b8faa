"""Command-line interface: ``sbk <command> [options]``.

Exit codes: 0 success, 1 negative result or failed check, 2 malformed input,
3 resource cap reached.
"""

import argparse
import json
import os
import sys
import time

from .basis import (BasisConfig, DiffBinomial, MemberCaps, compute_basis,
                    membership_certificate)
from .certificates import RADICAL, RULES, Certificate, verify_certificate
from .closure import ClosureConfig, closure_saturate, parse_rules
from .errors import (NoApplicableBasisElement, ParseError, PreconditionError, ResourceCapError,
                     TruncationError)
from .exponents import ExpVector, SymPoly
from .lattice import Lattice
from .truncated import TruncPoly, binomial_poly, parse_text, to_text

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_CAP = 0, 1, 2, 3

DEFAULT_D = 3


def radical_enabled():
    return os.environ.get("SBK_DISABLE_RADICAL") != "1"


def _cert_rules():
    return RULES if radical_enabled() else tuple(r for r in RULES if r != RADICAL)


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


class Report:
    """Structured run report; printed as text and optionally written as JSON."""

    def __init__(self, command, config, timings=True):
        self.data = {"command": command, "config": config, "results": {}}
        self.lines = []
        self.timings = timings
        self._start = time.perf_counter()

    def say(self, line):
        self.lines.append(line)

    def finish(self, out=None):
        if self.timings:
            self.data["timings"] = {"total_s": round(time.perf_counter() - self._start, 4)}
        for line in self.lines:
            print(line)
        if out:
            with open(out, "w") as fh:
                json.dump(self.data, fh, indent=1, sort_keys=True)
                fh.write("\n")


# input formats

def parse_generator(obj, n, D):
    """One entry of a generators file: a pure binomial, polynomial text, or a factored pair."""
    if isinstance(obj, str):
        return parse_text(obj, n, D)
    if not isinstance(obj, dict):
        raise ParseError(f"bad generator entry {obj!r}")
    try:
        if "plus" in obj:
            return binomial_poly(ExpVector.from_json(obj["plus"]), ExpVector.from_json(obj["minus"]), D)
        if "poly" in obj:
            return parse_text(obj["poly"], n, D)
        if "factored" in obj:
            a, b = obj["factored"]
            return (parse_text(a, n, D), parse_text(b, n, D))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad generator entry {obj!r}: {exc}") from exc
    except TruncationError as exc:
        raise ParseError(f"generator does not fit at D={D}: {exc}") from exc
    raise ParseError(f"generator entry needs plus/minus, poly or factored: {obj!r}")


def _basis_from_file(path, cfg):
    data = _load_json(path)
    if isinstance(data, dict) and isinstance(data.get("results"), dict):
        data = data["results"]
    if isinstance(data, dict) and "F" in data:
        try:
            F = [DiffBinomial.from_json(b) for b in data["F"]]
            n = data.get("n") or F[0].n
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise ParseError(f"bad basis file: {exc}") from exc
        return n, F
    L = Lattice.from_json(data)
    return L.n, compute_basis(L, cfg).F


def _parse_element(text):
    try:
        entries = json.loads(text)
    except json.JSONDecodeError:
        entries = [e.strip() for e in text.strip("()[] ").split(",")]
    if not isinstance(entries, list) or not entries:
        raise ParseError(f"element must be a list of polynomials, got {text!r}")
    try:
        return ExpVector(tuple(SymPoly.from_json(e) if not isinstance(e, str) else SymPoly.parse(e)
                               for e in entries))
    except (ValueError, TypeError) as exc:
        raise ParseError(f"bad element {text!r}: {exc}") from exc


def _basis_cfg(args):
    cfg = BasisConfig(enum_deg=args.enum_deg, height=args.height, stability=args.stability)
    if args.caps:
        cfg.max_combinations = args.caps
    return cfg


def _closure_cfg(args, D, rules=None):
    toggles = parse_rules(rules or args.rules)
    if not radical_enabled():
        toggles["radical"] = False
    cfg = ClosureConfig(D=D, **toggles)
    if args.caps:
        cfg.max_generators = args.caps
    return cfg


# commands

def cmd_basis(args):
    if not args.lattice:
        raise ParseError("--lattice is required")
    L = Lattice.from_json(_load_json(args.lattice))
    cfg = _basis_cfg(args)
    rep = Report("basis", {"lattice": L.to_json(), "enum_deg": cfg.enum_deg, "height": cfg.height,
                           "stability": cfg.stability}, not args.no_timings)
    res = compute_basis(L, cfg)
    rep.data["results"] = res.to_json()
    for tau in sorted(res.F_tau):
        rep.say(f"tau {tau}:")
        for b in res.F_tau[tau]:
            rep.say(f"  {b}")
    rep.say(f"F ({len(res.F)} binomials):")
    for b in res.F:
        rep.say(f"  {b}")
    rep.say(f"stable for {res.stable_for} bound increases (window {cfg.stability}); "
            f"final enumeration degree {res.bounds['enum_deg_final']}")
    rep.finish(args.out)
    return EXIT_OK


def cmd_member(args):
    source = args.basis or args.lattice
    if not source or not args.element:
        raise ParseError("member needs --basis (or --lattice) and --element")
    n, F = _basis_from_file(source, _basis_cfg(args))
    h = _parse_element(args.element)
    if h.n != n:
        raise ParseError(f"element has {h.n} entries, basis has n={n}")
    caps = MemberCaps()
    if args.caps:
        caps.max_steps = args.caps
    rep = Report("member", {"basis": [b.to_json() for b in F], "element": h.to_json(),
                            "D": args.trunc}, not args.no_timings)
    try:
        cert = membership_certificate(h, F, caps, D=args.trunc, rules=_cert_rules())
    except (NoApplicableBasisElement, PreconditionError, TruncationError) as exc:
        stuck = getattr(exc, "vector", None)
        rep.data["results"] = {"member": False, "reason": str(exc),
                               "stuck": stuck.to_json() if stuck is not None else None}
        rep.say(f"no certificate: {exc}")
        rep.finish(args.out)
        return EXIT_FAIL
    check = verify_certificate(cert, [b.poly(cert.D) for b in F if b.max_degree() <= cert.D])
    rep.data["results"] = {"member": check.ok, "steps": len(cert.steps), "certificate": cert.to_json()}
    if args.cert:
        with open(args.cert, "w") as fh:
            fh.write(cert.dumps())
    if not check.ok:
        rep.say(f"certificate failed re-validation at step {check.step}: {check.reason}")
        rep.finish(args.out)
        return EXIT_FAIL
    rep.say(f"certificate with {len(cert.steps)} steps at D={cert.D}; checker: valid")
    rep.finish(args.out)
    return EXIT_OK


def _load_gens(path, D):
    data = _load_json(path)
    try:
        n = data["n"]
        if not isinstance(n, int) or n < 1:
            raise ParseError("'n' must be a positive integer")
        gens = [parse_generator(g, n, D) for g in data.get("generators", [])]
        queries = [parse_generator(q, n, D) for q in data.get("queries", [])]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad generators file: {exc}") from exc
    if any(isinstance(q, tuple) for q in queries):
        raise ParseError("queries must be polynomials, not factored pairs")
    return n, gens, queries, data


def cmd_closure(args):
    if not args.gens:
        raise ParseError("--gens is required")
    D = args.trunc if args.trunc is not None else DEFAULT_D
    n, gens, queries, _ = _load_gens(args.gens, D)
    cfg = _closure_cfg(args, D)
    rep = Report("closure", {"n": n, "D": D, "rules": cfg.rules()}, not args.no_timings)
    code = EXIT_OK
    try:
        res = closure_saturate(gens, cfg, n)
    except ResourceCapError as exc:
        res = exc.partial
        rep.say(f"resource cap: {exc} (partial result)")
        rep.data["results"]["partial"] = True
        code = EXIT_CAP
        if res is None:
            rep.finish(args.out)
            return code
    verdicts = []
    for q in queries:
        ok = res.contains(q)
        verdicts.append({"query": to_text(q), "derivable": ok})
        rep.say(f"{to_text(q)}: {'derivable' if ok else 'not derivable at bounds'}")
    rep.data["results"].update({"metadata": res.metadata(), "queries": verdicts,
                                "generators": [to_text(g) for g in res.generators]})
    rep.say(f"{len(res.generators)} generators at D={D}, rules {','.join(cfg.rules())}, "
            f"fixpoint={res.fixpoint}")
    rep.finish(args.out)
    return code


def run_chain(steps, n, cfg):
    """For each k, which generators of step k+1 are new modulo the saturated step-k ideal."""
    rows = []
    acc = []
    for k in range(len(steps) - 1):
        acc = acc + list(steps[k])
        res = closure_saturate(acc, cfg, n)
        new = []
        for g in steps[k + 1]:
            p = g if isinstance(g, TruncPoly) else g[0] * g[1]
            if not res.contains(p):
                new.append(to_text(p))
        rows.append({"k": k + 1, "adds": bool(new), "new": new,
                     "generators": len(res.generators), "fixpoint": res.fixpoint})
    stab = None
    for k in range(len(rows), 0, -1):
        if rows[k - 1]["adds"]:
            break
        stab = k
    if not rows:
        stab = 1
    return rows, stab


def cmd_chain(args):
    path = args.chain_file or args.gens
    if not path:
        raise ParseError("chain needs a chain file")
    data = _load_json(path)
    try:
        n = data["n"]
        D = args.trunc if args.trunc is not None else data.get("trunc", DEFAULT_D)
        rules = args.rules_given or data.get("rules", "shift,wellmixed,radical")
        steps = [[parse_generator(g, n, D) for g in step] for step in data["chain"]]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad chain file: {exc}") from exc
    cfg = _closure_cfg(args, D, rules)
    rep = Report("chain", {"n": n, "D": D, "rules": cfg.rules(), "length": len(steps)},
                 not args.no_timings)
    rows, stab = run_chain(steps, n, cfg)
    for r in rows:
        rep.say(f"step {r['k']} -> {r['k'] + 1}: {'adds ' + str(len(r['new'])) if r['adds'] else 'adds nothing'}")
    if stab is None:
        rep.say("still growing at bounds")
    else:
        rep.say(f"stabilizes at k = {stab}")
    rep.data["results"] = {"steps": rows, "stabilizes_at": stab}
    rep.finish(args.out)
    return EXIT_OK


# built-in examples

def _example_lattices():
    return {
        "diagonal": ExpVector.parse("x-1", "1-x"),
        "mirror": ExpVector.parse("x^2-x+1", "-x^2+x-1"),
        "skew": ExpVector.parse("x^2-x+1", "x-1"),
    }


EXPECTED_BASES = {
    "diagonal": [(["x", "1"], ["1", "x"])],
    "mirror": [(["x^2+1", "x"], ["x", "x^2+1"]), (["x^3+1", "0"], ["0", "x^3+1"])],
    "skew": [(["x^2+1", "x"], ["x", "1"]), (["x^3+1", "x^2"], ["0", "1"])],
}

MEMBER_TARGETS = {
    "diagonal": ["x-1"] + [f"x^{i}-1" for i in range(2, 6)],
    "mirror": ["x-1", "x^2+1"],
    "skew": ["x-1", "x^2+1"],
}


def _expected_basis(name):
    return {DiffBinomial.parse(p, m) for p, m in EXPECTED_BASES[name]}


def verify_examples(D=None):
    """Run the built-in scenarios; returns a list of (name, status, detail)."""
    out = []
    for name, g in _example_lattices().items():
        detail = {}
        try:
            res = compute_basis(Lattice(2, (g,)))
            got = set(res.F)
            basis_ok = got == _expected_basis(name)
            detail["basis"] = [str(b) for b in res.F]
            member_ok = True
            for c in MEMBER_TARGETS[name]:
                # (x^i - 1, 1 - x^i) for the first lattice, multiples of g otherwise
                h = ExpVector((SymPoly.parse(c), -SymPoly.parse(c))) if name == "diagonal" else g.scale(SymPoly.parse(c))
                cert = membership_certificate(h, res.F, D=D, rules=_cert_rules())
                ok = verify_certificate(cert, [b.poly(cert.D) for b in res.F if b.max_degree() <= cert.D]).ok
                member_ok = member_ok and ok
            status = "pass" if basis_ok and member_ok else "fail"
            detail["basis_ok"], detail["member_ok"] = basis_ok, member_ok
        except (ResourceCapError, TruncationError) as exc:
            status, detail["reason"] = "bound", str(exc)
        except (PreconditionError, NoApplicableBasisElement) as exc:
            status, detail["reason"] = "fail", str(exc)
        out.append((name, status, detail))
    # well-mixed versus radical on B = y1^x y2 - y1 y2^x
    detail = {}
    try:
        D_neg = 4 if D is None else D
        D_pos = 2 if D is None else D
        neg = closure_saturate([_chain_binomial(1, D_neg)], ClosureConfig(D=D_neg, radical=False))
        neg_ok = not neg.contains(_chain_binomial(2, D_neg))
        detail["wellmixed_only_contains_C"] = not neg_ok
        pos = closure_saturate([_chain_binomial(1, D_pos)], ClosureConfig(D=D_pos, radical=radical_enabled()))
        detail["radical_contains_C"] = pos.contains(_chain_binomial(2, D_pos))
        status = "pass" if neg_ok else "fail"
    except (ResourceCapError, TruncationError) as exc:
        status, detail["reason"] = "bound", str(exc)
    out.append(("wellmixed-gap", status, detail))
    return out


def _chain_binomial(i, D):
    # y1^{x^i} y2 - y1 y2^{x^i}; raises TruncationError when i > D
    return binomial_poly(ExpVector.parse(f"x^{i}", "1"), ExpVector.parse("1", f"x^{i}"), D)


def cmd_verify_examples(args):
    rep = Report("verify-examples", {"D": args.trunc, "radical": radical_enabled()}, not args.no_timings)
    results = verify_examples(args.trunc)
    failed = [name for name, status, _ in results if status != "pass"]
    for name, status, detail in results:
        rep.say(f"example {name}: {status.upper()}" + (f" ({detail['reason']})" if "reason" in detail else ""))
    rep.data["results"] = {name: {"status": status, **detail} for name, status, detail in results}
    if failed:
        rep.say("failures: " + ", ".join(failed))
    rep.finish(args.out)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_check(args):
    cert = Certificate.from_json(_load_json(args.certificate))
    if args.gens:
        n, gens, _, _ = _load_gens(args.gens, cert.D)
        axioms = [g if isinstance(g, TruncPoly) else g[0] * g[1] for g in gens]
    else:
        axioms = cert.axioms
    res = verify_certificate(cert, axioms)
    if res.ok:
        print(f"valid ({len(cert.steps)} steps)")
        return EXIT_OK
    print(f"invalid at step {res.step}: {res.reason}", file=sys.stderr)
    return EXIT_FAIL


# argument parsing

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lattice", help="lattice JSON file")
    common.add_argument("--gens", help="generators JSON file")
    common.add_argument("--element", help="lattice vector, e.g. '[\"x^2-1\", \"1-x^2\"]'")
    common.add_argument("--trunc", type=int, default=None, help="truncation D (default 3)")
    common.add_argument("--enum-deg", type=int, default=2, help="starting cofactor degree (default 2)")
    common.add_argument("--height", type=int, default=2, help="cofactor coefficient bound (default 2)")
    common.add_argument("--stability", type=int, default=2, help="stability window (default 2)")
    common.add_argument("--rules", default="shift,wellmixed,radical", help="enabled closure rules")
    common.add_argument("--caps", type=int, default=None, help="main resource cap of the command")
    common.add_argument("--out", help="write the JSON report here")
    common.add_argument("--no-timings", action="store_true", help="omit timings from the report")

    parser = argparse.ArgumentParser(prog="sbk", description="Binomial difference ideal toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("basis", parents=[common], help="finite basis of a lattice ideal")
    p = sub.add_parser("member", parents=[common], help="membership certificate for a lattice vector")
    p.add_argument("--basis", help="basis JSON (output of 'basis --out') or lattice file")
    p.add_argument("--cert", help="write the certificate here")
    sub.add_parser("closure", parents=[common], help="bounded closure and membership queries")
    p = sub.add_parser("chain", parents=[common], help="ascending chain experiment")
    p.add_argument("chain_file", nargs="?", help="chain description JSON")
    sub.add_parser("verify-examples", parents=[common], help="run the built-in example checks")
    p = sub.add_parser("check", parents=[common], help="validate a certificate file")
    p.add_argument("certificate")
    return parser


COMMANDS = {
    "basis": cmd_basis,
    "member": cmd_member,
    "closure": cmd_closure,
    "chain": cmd_chain,
    "verify-examples": cmd_verify_examples,
    "check": cmd_check,
}


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else argv
    args = parser.parse_args(argv)
    args.rules_given = args.rules if "--rules" in argv else None
    try:
        return COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, TruncationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Every command prints one JSON object ``{status, payload, diagnostics}``
(or plain text with ``--text``) and exits with 0 (ok), 2 (violation) or 1 (error).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from . import graphs, hopf, spectral
from .graphs import GraphFamilyId, WorkLimitExceeded

EXIT = {"ok": 0, "violation": 2, "error": 1}


@dataclass
class CommandResult:
    status: str
    payload: Any
    diagnostics: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"status": self.status, "payload": self.payload, "diagnostics": self.diagnostics}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _combo_arg(text: str) -> hopf.Combo:
    return hopf.Combo.parse(text)


# ---------------------------------------------------------------- commands


def cmd_enumerate(a) -> CommandResult:
    fid = GraphFamilyId(a.family, a.n, a.g)
    payload: dict = {"command": "enumerate", "family": str(fid)}
    if a.family == "EO":
        fam = graphs.eo_family(a.n, a.g)
        payload["graphs"] = [graphs.render_graph(g) for g, _ in fam]
        payload["weights"] = [str(w) for _, w in fam]
    else:
        payload["graphs"] = [graphs.render_graph(g) for g in graphs.enumerate_family(fid)]
    payload["count"] = len(payload["graphs"])
    return CommandResult("ok", payload)


def cmd_product(a) -> CommandResult:
    if len(a.operands) < 2:
        raise UsageError("product needs at least two operands")
    out = _combo_arg(a.operands[0])
    for text in a.operands[1:]:
        out = hopf.star(out, _combo_arg(text))
    diags = [f"unbalanced loop pattern in {g}" for g, _ in out if not g.is_balanced]
    return CommandResult("ok", {"command": "product", "text": str(out), "terms": out.to_json()}, diags)


def cmd_coproduct(a) -> CommandResult:
    x = _combo_arg(a.operand)
    op = hopf.reduced_coproduct if a.reduced else hopf.coproduct
    out = op(x, a.straddle)
    return CommandResult("ok", {"command": "coproduct", "reduced": a.reduced, "straddle": a.straddle,
                                "text": str(out), "terms": out.to_json()})


def cmd_antipode(a) -> CommandResult:
    out = hopf.antipode(_combo_arg(a.operand))
    diags = [f"unbalanced loop pattern in {g}" for g, _ in out if not g.is_balanced]
    return CommandResult("ok", {"command": "antipode", "text": str(out), "terms": out.to_json()}, diags)


def cmd_verify_axioms(a) -> CommandResult:
    results = hopf.verify_axioms(a.max_leaves, a.max_loops)
    payload = {"command": "verify-axioms", "max_leaves": a.max_leaves, "max_loops": a.max_loops,
               "laws": [r.to_json() for r in results]}
    bad = [r for r in results if not r.ok]
    diags = []
    for r in bad:
        why = "attributable to the straddle rule" if r.straddle_attributable else "not attributable to the straddle rule"
        diags.append(f"{r.law}: {r.failures}/{r.checked} failures, {why}")
    return CommandResult("violation" if bad else "ok", payload, diags)


def _curve(a) -> spectral.CurveModel:
    return spectral.CurveModel.parse(a.curve)


def cmd_recursion(a) -> CommandResult:
    c = _curve(a)
    if a.mode == "direct":
        w = spectral.w_direct(c, a.genus, a.points)
    else:
        w = spectral.w_graph_sum(c, a.genus, a.points)
    return CommandResult("ok", {"command": "recursion", "curve": str(c), "mode": a.mode, "correlator": w.to_json()})


def cmd_compare(a) -> CommandResult:
    c = _curve(a)
    d = spectral.w_direct(c, a.genus, a.points)
    s = spectral.w_graph_sum(c, a.genus, a.points)
    equal = d == s
    payload = {"command": "compare", "curve": str(c), "equal": equal,
               "direct": d.to_json(), "graph_sum": s.to_json()}
    if not equal:
        payload["difference"] = str(d.value - s.value)
    return CommandResult("ok" if equal else "violation", payload)


def cmd_coefficients(a) -> CommandResult:
    k = a.points - 1
    mode = {"brute": "brute", "statement": "statement", "proof": "proof"}[a.mode]
    table = spectral.coeff_table(a.genus, k, mode)
    payload: dict = {"command": "coefficients", "table": table.to_json()}
    diags = [f"reciprocal of {e.kind}({e.m},{e.i}) = {e.value} is not an integer" for e in table.violations]
    status = "violation" if diags else "ok"
    if a.verify:
        rep = spectral.verify_coproduct_identity(_curve(a), a.genus, k, table)
        payload["identity"] = rep.to_json()
        if not rep.equal:
            status = "violation"
            diags += rep.violations
    return CommandResult(status, payload, diags)


def _decide(brute: Fraction | None, statement: Fraction, proof: Fraction) -> str:
    if brute is None:
        return "undecided"
    hits = [name for name, v in (("statement", statement), ("proof", proof)) if v == brute]
    return "+".join(hits) if hits else "neither"


def cmd_resolve(a) -> CommandResult:
    c = _curve(a)
    verdicts = []
    t = {m: spectral.coeff_table(0, 4, m) for m in spectral.MODES}
    verdicts.append({
        "question": "a_2 at genus 0, k = 4",
        "statement": str(t["statement"].a(0, 2)), "proof": str(t["proof"].a(0, 2)),
        "brute": str(t["brute"].a(0, 2)),
        "verdict": _decide(t["brute"].a(0, 2), t["statement"].a(0, 2), t["proof"].a(0, 2)),
        "identity_holds": spectral.verify_coproduct_identity(c, 0, 4, t["brute"]).equal,
    })
    for g, k in ((1, 1), (2, 0)):
        t = {m: spectral.coeff_table(g, k, m) for m in spectral.MODES}
        b = t["brute"].b()
        verdicts.append({
            "question": f"handle coefficient b at genus {g}, k = {k}",
            "statement": str(t["statement"].b()), "proof": str(t["proof"].b()),
            "brute": None if b is None else str(b),
            "verdict": _decide(b, t["statement"].b(), t["proof"].b()),
            "identity_holds": spectral.verify_coproduct_identity(c, g, k, t["brute"]).equal,
        })
    diags = [f"{v['question']}: {v['verdict']}" for v in verdicts]
    return CommandResult("ok", {"command": "resolve-ambiguities", "curve": str(c), "verdicts": verdicts}, diags)


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hopf-tr", description="Hopf algebra on tagged graphs and topological recursion.")
    p.add_argument("--text", action="store_true", help="plain text instead of JSON")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("enumerate", help="list a graph family")
    e.add_argument("--family", required=True, choices=["Y", "X", "Xbar", "Xg", "EO"])
    e.add_argument("--n", type=int, required=True, help="size; free-leaf count k for Xg and EO")
    e.add_argument("--g", type=int, default=0, help="loop count (Xg, EO)")
    e.set_defaults(func=cmd_enumerate)

    pr = sub.add_parser("product", help="star product of two or more combinations")
    pr.add_argument("operands", nargs="+")
    pr.set_defaults(func=cmd_product)

    cp = sub.add_parser("coproduct", help="coproduct of a combination")
    cp.add_argument("operand")
    cp.add_argument("--reduced", action="store_true")
    cp.add_argument("--straddle", choices=["glue", "drop"], default="glue")
    cp.set_defaults(func=cmd_coproduct)

    an = sub.add_parser("antipode", help="antipode of a combination")
    an.add_argument("operand")
    an.set_defaults(func=cmd_antipode)

    va = sub.add_parser("verify-axioms", help="exhaustive Hopf-law check")
    va.add_argument("--max-leaves", type=int, default=4)
    va.add_argument("--max-loops", type=int, default=1)
    va.set_defaults(func=cmd_verify_axioms)

    def curve_args(sp):
        sp.add_argument("--curve", default="airy", help="'airy' or 'y: c1,c3,...'")
        sp.add_argument("--genus", type=int, required=True)
        sp.add_argument("--points", type=int, required=True, help="number of points n (root included)")

    rc = sub.add_parser("recursion", help="evaluate a correlator")
    curve_args(rc)
    rc.add_argument("--mode", choices=["direct", "graph-sum"], default="direct")
    rc.set_defaults(func=cmd_recursion)

    cm = sub.add_parser("compare", help="direct recursion against the graph sum")
    curve_args(cm)
    cm.set_defaults(func=cmd_compare)

    co = sub.add_parser("coefficients", help="coefficient table for the reduced coproduct")
    curve_args(co)
    co.add_argument("--mode", choices=["statement", "proof", "brute"], default="brute")
    co.add_argument("--verify", action="store_true", help="also check the coproduct identity")
    co.set_defaults(func=cmd_coefficients)

    ra = sub.add_parser("resolve-ambiguities", help="decide the closed-form discrepancies by enumeration")
    ra.add_argument("--curve", default="airy")
    ra.set_defaults(func=cmd_resolve)
    return p


def _to_text(r: CommandResult) -> str:
    lines = [f"status: {r.status}"]
    p = r.payload
    if isinstance(p, dict):
        if "text" in p:
            lines.append(p["text"])
        elif "graphs" in p:
            lines += p["graphs"]
        elif "correlator" in p:
            lines.append(p["correlator"]["text"])
        elif "direct" in p:
            lines.append(f"direct:    {p['direct']['text']}")
            lines.append(f"graph sum: {p['graph_sum']['text']}")
            lines.append(f"equal: {p['equal']}")
        else:
            lines.append(json.dumps(p, indent=2, sort_keys=True))
    else:
        lines.append(str(p))
    lines += [f"note: {d}" for d in r.diagnostics]
    return "\n".join(lines)


def run(argv: Sequence[str] | None = None, out=None) -> tuple[CommandResult, int]:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    text = "--text" in argv
    argv = [x for x in argv if x != "--text"]  # accepted anywhere on the line
    try:
        args = build_parser().parse_args(argv)
        result = args.func(args)
    except UsageError as e:
        result = CommandResult("error", {"error": "usage", "message": str(e)}, [str(e)])
    except WorkLimitExceeded as e:
        result = CommandResult("error", {"error": "work-limit", "message": str(e)}, [str(e)])
    except (ValueError, KeyError, ZeroDivisionError) as e:
        result = CommandResult("error", {"error": type(e).__name__, "message": str(e)}, [str(e)])
    if text:
        print(_to_text(result), file=out)
    else:
        print(json.dumps(result.to_json(), sort_keys=True), file=out)
    return result, EXIT[result.status]


def main() -> None:
    _, code = run()
    sys.exit(code)


if __name__ == "__main__":
    main()

"""Coefficient tables in all three modes, with the coproduct identity check."""

import argparse
from dataclasses import dataclass, field

from hopftr import CurveModel, coeff_table, verify_coproduct_identity
from hopftr.spectral import MODES


@dataclass
class ReportConfig:
    cases: list[tuple[int, int]] = field(default_factory=lambda: [(0, 2), (0, 3), (0, 4), (1, 1), (1, 2), (2, 0)])
    curve: str = "airy"


def main(cfg: ReportConfig) -> int:
    c = CurveModel.parse(cfg.curve)
    failed = 0
    for g, k in cfg.cases:
        print(f"== g={g} k={k}")
        for mode in MODES:
            t = coeff_table(g, k, mode)
            cells = [f"{e.kind}({e.m},{e.i})={e.value}" for e in t.entries]
            print(f"  {mode:9s} " + "  ".join(cells))
        rep = verify_coproduct_identity(c, g, k)
        bad = coeff_table(g, k, "brute").violations
        failed += (not rep.equal) + bool(bad)
        print(f"  identity {'holds' if rep.equal else 'FAILS'}")
        for v in rep.violations:
            print(f"    {v}")
        for e in bad:
            print(f"    reciprocal of {e.kind}({e.m},{e.i}) = {e.value} is not an integer")
    return 1 if failed else 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--curve", default="airy")
    ap.add_argument("--case", action="append", metavar="G,K", help="repeatable; default is the standard grid")
    a = ap.parse_args()
    cfg = ReportConfig(curve=a.curve)
    if a.case:
        cfg.cases = [tuple(int(x) for x in s.split(",")) for s in a.case]
    raise SystemExit(main(cfg))

"""Compare the direct recursion with the graph sum over a grid of (g, n)."""

import argparse
import time
from dataclasses import dataclass

from hopftr import CurveModel, w_direct, w_graph_sum


@dataclass
class GridConfig:
    curve: str = "airy"
    max_desk: int = 5  # largest 2g + n
    method: str = "weighted"


def main(cfg: GridConfig) -> int:
    c = CurveModel.parse(cfg.curve)
    bad = 0
    print(f"curve {c}, method {cfg.method}")
    for desk in range(3, cfg.max_desk + 1):
        for g in range(desk // 2 + 1):
            n = desk - 2 * g
            if n < 1:
                continue
            t0 = time.perf_counter()
            d = w_direct(c, g, n)
            s = w_graph_sum(c, g, n, cfg.method)
            ok = d == s
            bad += not ok
            print(f"g={g} n={n}  {'equal' if ok else 'DIFFER'}  {time.perf_counter() - t0:6.2f}s  {d.value}")
    return 1 if bad else 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--curve", default=GridConfig.curve)
    ap.add_argument("--max-desk", type=int, default=GridConfig.max_desk)
    ap.add_argument("--method", choices=["weighted", "orbit"], default=GridConfig.method)
    a = ap.parse_args()
    raise SystemExit(main(GridConfig(a.curve, a.max_desk, a.method)))

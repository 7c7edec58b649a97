"""Exhaustive Hopf-law check with a per-law summary."""

import argparse
import time

from hopftr.hopf import AxiomConfig, verify_axioms


def main(cfg: AxiomConfig) -> int:
    t0 = time.perf_counter()
    results = verify_axioms(cfg.max_leaves, cfg.max_loops)
    print(f"basis: <= {cfg.max_leaves} leaves, <= {cfg.max_loops} loops  ({time.perf_counter() - t0:.1f}s)")
    for r in results:
        tag = "ok" if r.ok else ("straddle" if r.straddle_attributable else "FAIL")
        print(f"{r.law:24s} {r.checked:6d} checked  {r.failures:5d} failed  "
              f"({r.loop_free_failures} loop-free)  {tag}")
        if r.counterexample:
            print(f"    {r.counterexample}")
    return 0 if all(r.ok for r in results) else 2


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-leaves", type=int, default=AxiomConfig.max_leaves)
    ap.add_argument("--max-loops", type=int, default=AxiomConfig.max_loops)
    a = ap.parse_args()
    raise SystemExit(main(AxiomConfig(a.max_leaves, a.max_loops)))

"""Exact identity sweep over named and seeded random parameter sets.

Writes one JSON report per run with every case residual.

    python scripts/identity_sweep.py --N-max 6 --random 25 --seed 2024 --out sweep.json
"""

import argparse
import json
import time

from trioscillator import __version__
from trioscillator.parameters import RahmanParams
from trioscillator.verification import random_params, run_suite

NAMED = ("2,1,1,1", "3,1,2,5", "1,2,3,4")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N-max", type=int, default=6)
    ap.add_argument("--random", type=int, default=25)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--suite", default="all")
    ap.add_argument("--out", default="sweep.json")
    args = ap.parse_args()

    sets = [RahmanParams.parse(s) for s in NAMED] + random_params(args.random, args.seed)
    t0 = time.perf_counter()
    runs = []
    for p in sets:
        for N in range(1, args.N_max + 1):
            rep = run_suite(args.suite, N, p, "exact")
            runs.append(rep.to_dict())
            if not rep.passed:
                print("FAIL", rep.summary())
    elapsed = time.perf_counter() - t0
    ok = all(r["pass"] for r in runs)
    out = {"version": __version__, "seed": args.seed, "mode": "exact", "suite": args.suite,
           "sets": [p.label() for p in sets], "pass": ok, "runs": runs}
    with open(args.out, "w") as fh:
        json.dump(out, fh, indent=2)
    print(f"{len(runs)} runs over {len(sets)} sets, all pass: {ok} ({elapsed:.1f}s) -> {args.out}")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())

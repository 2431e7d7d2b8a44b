"""Continuum-limit convergence records for every check, written as CSV.

    python scripts/continuum_study.py --params 2,1,1,1 --outdir results
"""

import argparse
import json
from pathlib import Path

from trioscillator import __version__
from trioscillator.continuum import DEFAULT_N_LADDER, LIMIT_OPERATORS, convergence
from trioscillator.parameters import RahmanParams, derive_params, params_to_dict

TEST_FUNCTIONS = ("1", "s", "t", "s^2", "s*t", "t^2")
HERMITE_DEGREES = ((1, 0), (0, 1), (1, 1), (2, 1), (2, 2))


def records(d, Ns):
    yield "weight", convergence("weight", Ns, d)
    for m, n in HERMITE_DEGREES:
        yield f"hermite_{m}{n}", convergence("hermite", Ns, d, m=m, n=n)
    for which in LIMIT_OPERATORS:
        for f in TEST_FUNCTIONS:
            tag = f.replace("^", "").replace("*", "")
            yield f"operator_{which}_{tag}", convergence("operator", Ns, d, which=which, testfn=f)
    for side in "RL":
        for direction, sign in (("+", "plus"), ("-", "minus")):
            yield f"ladder_{side}{sign}_11", convergence("ladder", Ns, d, m=1, n=1, side=side,
                                                          direction=direction)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--params", default="2,1,1,1")
    ap.add_argument("--N-list", default=",".join(map(str, DEFAULT_N_LADDER)))
    ap.add_argument("--outdir", default="results")
    args = ap.parse_args()

    p = RahmanParams.parse(args.params)
    d = derive_params(p)
    Ns = [int(s) for s in args.N_list.split(",")]
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    meta = {"version": __version__, "params": params_to_dict(p), "mode": "float", "seed": 0}
    for name, rec in records(d, Ns):
        (outdir / f"{name}.csv").write_text("# " + json.dumps({**meta, "label": rec.label}) + "\n" + rec.to_csv())
        order = "exact" if rec.converged else f"{rec.order:.3f}"
        print(f"{name:<28} errors={['%.3g' % e for e in rec.errors]} order={order} monotone={rec.monotone()}")


if __name__ == "__main__":
    main()

"""Search for distinct parameter tuples sharing (eta1, eta2).

Such pairs test the claim that h_iso is a function of eta alone.  The
search scans integer tuples in a box and groups them by eta after
removing the overall scale (eta is invariant under p -> c p).

    python scripts/eta_fiber_search.py --max 14 --N 4
"""

import argparse
from collections import defaultdict
from math import gcd

from trioscillator.errors import DegenerateParametersError
from trioscillator.operators import build_hamiltonian
from trioscillator.parameters import RahmanParams, derive_params


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max", type=int, default=14)
    ap.add_argument("--N", type=int, default=4)
    ap.add_argument("--show", type=int, default=10)
    args = ap.parse_args()

    fibers = defaultdict(list)
    r = range(1, args.max + 1)
    for p in ((a, b, c, e) for a in r for b in r for c in r for e in r):
        if gcd(gcd(p[0], p[1]), gcd(p[2], p[3])) != 1:
            continue
        try:
            d = derive_params(RahmanParams(*p))
        except DegenerateParametersError:
            continue
        fibers[(d.eta1, d.eta2)].append(p)
    shared = [v for v in fibers.values() if len(v) > 1]
    print(f"{len(shared)} eta values carried by more than one primitive tuple")
    checked = 0
    for group in shared[:args.show]:
        ops = [build_hamiltonian(True, args.N, derive_params(p)) for p in group]
        same = all(op.equals(ops[0]) for op in ops[1:])
        checked += same
        print(group, "h_iso identical on T_%d:" % args.N, same)
    print(f"{checked}/{min(len(shared), args.show)} groups give identical h_iso")


if __name__ == "__main__":
    main()

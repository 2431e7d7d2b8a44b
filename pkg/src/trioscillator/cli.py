"""Command-line entry point: eval, operator, verify, spectrum, limit.

Exit status is 0 on success, 1 when a verification fails and 2 for usage
errors.  Every file written embeds the tool version, the parameter set, the
arithmetic mode and the seed, so rerunning a command reproduces it byte for
byte.  ``TRIOSCILLATOR_MODE`` (exact|float, or 1|0) sets the default mode.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import defaultdict
from pathlib import Path

from . import __version__
from .continuum import CHECKS, DEFAULT_N_LADDER, LIMIT_OPERATORS, convergence, default_samples
from .errors import (BoundaryCoefficientError, DegenerateParametersError, LatticeMismatchError,
                     OutOfLatticeError, PropagationError)
from .lattice import EXACT, FLOAT, exact_parts
from .operators import OperatorKind, build, build_hamiltonian
from .parameters import FrequencyPair, RahmanParams, derive_params, format_rational, load_params_file, params_to_dict, to_rational
from .polynomials import (PolyIndex, rahman_eval_grid_recurrence, rahman_grid, rahman_normalized, tratnik_grid,
                          weight_grid)
from .verification import DEFAULT_TOLERANCE, SUITES, VerificationReport, random_params, run_suite

MODE_ENV = "TRIOSCILLATOR_MODE"
FAMILIES = ("rahman", "rahman-recurrence", "khat", "tratnik", "weight")
OPERATOR_KINDS = {
    "lambda1": "Lambda1", "lambda2": "Lambda2", "hiso": "H_iso", "haniso": "H_aniso",
    "jx": "JX", "jy": "JY", "jz": "JZ", "casimir": "Casimir", "l1": "L1", "l2": "L2",
    "frakk": "FrakK", "fiveterm": "FiveTerm", "rec1": "Rec1", "rec2": "Rec2",
    "a-minus-r": "A_minus_R", "a-minus-l": "A_minus_L", "a-plus-r": "A_plus_R", "a-plus-l": "A_plus_L",
}


class UsageError(Exception):
    pass


def default_mode() -> str:
    raw = os.environ.get(MODE_ENV, "").strip().lower()
    if raw in ("", "exact", "1"):
        return EXACT
    if raw in ("float", "0"):
        return FLOAT
    raise UsageError(f"{MODE_ENV}={raw!r}: expected exact, float, 1 or 0")


# shared plumbing ---------------------------------------------------------------

def _pair(text: str, name: str):
    parts = [s.strip() for s in text.split(",") if s.strip()]
    if len(parts) != 2:
        raise UsageError(f"{name} expects two comma-separated rationals, got {text!r}")
    return to_rational(parts[0], f"{name}[0]"), to_rational(parts[1], f"{name}[1]")


def _load(args):
    freqs = None
    if args.params_file:
        params, freqs = load_params_file(args.params_file)
    else:
        params = RahmanParams.parse(args.params)
    if getattr(args, "omega_sq", None):
        w1, w2 = _pair(args.omega_sq, "--omega-sq")
        freqs = FrequencyPair(w1, w2)
    elif getattr(args, "omega", None):
        freqs = FrequencyPair.from_omegas(*_pair(args.omega, "--omega"))
    return params, freqs


def _meta(args, params, freqs=None, **extra) -> dict:
    out = {"tool": "trioscillator", "version": __version__, "command": args.command,
           "params": params_to_dict(params, freqs), "mode": args.mode, "seed": args.seed}
    out.update(extra)
    return out


def _comment(meta: dict) -> str:
    return "# " + json.dumps(meta, sort_keys=True) + "\n"


def _emit(text: str, path: str | None):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _format_for(args) -> str:
    if args.format:
        return args.format
    out = getattr(args, "out", None)
    return "json" if out and str(out).endswith(".json") else "csv"


def _value(v, mode):
    if mode == EXACT:
        re, im = exact_parts(v)
        return format_rational(re) if im == 0 else {"re": format_rational(re), "im": format_rational(im)}
    v = complex(v)
    return v.real if v.imag == 0 else {"re": v.real, "im": v.imag}


def _grid_json(grid, meta) -> str:
    rows = [{"x": x, "y": y, "value": _value(v, grid.mode)} for (x, y), v in zip(grid.lattice.points, grid.values)]
    return json.dumps({**meta, "values": rows}, indent=2) + "\n"


# subcommands -------------------------------------------------------------------

def cmd_eval(args) -> int:
    params, _ = _load(args)
    d = derive_params(params)
    fam = args.family
    if fam in ("rahman", "rahman-recurrence", "khat", "tratnik") and (args.m is None or args.n is None):
        raise UsageError(f"--family {fam} needs --m and --n")
    if fam == "weight":
        grid = weight_grid(args.N, d, args.mode)
    elif fam == "tratnik":
        grid = tratnik_grid(args.m, args.n, d, args.N, args.mode)
    else:
        idx = PolyIndex(args.m, args.n, args.N)
        if fam == "rahman":
            grid = rahman_grid(idx, d, args.mode)
        elif fam == "rahman-recurrence":
            if args.mode != EXACT:
                raise UsageError("--family rahman-recurrence is exact only")
            grid = rahman_eval_grid_recurrence(idx, d)
        else:
            grid, _ = rahman_normalized(idx, d, args.mode)
    meta = _meta(args, params, family=fam, N=args.N, m=args.m, n=args.n)
    text = _grid_json(grid, meta) if _format_for(args) == "json" else _comment(meta) + grid.to_csv()
    _emit(text, args.out)
    if args.out not in (None, "-"):
        print(f"eval {fam} N={args.N}: {grid.lattice.size} values -> {args.out}")
    return 0


def cmd_operator(args) -> int:
    params, freqs = _load(args)
    d = derive_params(params)
    tag = OPERATOR_KINDS[args.kind]
    if tag == "H_aniso" and freqs is None:
        raise UsageError("--kind haniso needs --omega-sq w1sq,w2sq (or --omega, or frequencies in --params-file)")
    op = build(OperatorKind(tag, args.N, d, freqs if tag == "H_aniso" else None), args.mode)
    meta = _meta(args, params, freqs if tag == "H_aniso" else None, kind=args.kind,
                 domain_N=op.domain.N, codomain_N=op.codomain.N)
    _emit(_comment(meta) + op.to_coo_csv(), args.export)
    dest = args.export if args.export not in (None, "-") else "stdout"
    msg = f"operator {args.kind}: T_{op.domain.N} -> T_{op.codomain.N}, shape {op.shape}, nnz {op.nnz} -> {dest}"
    print(msg, file=sys.stderr if dest == "stdout" else sys.stdout)
    return 0


def cmd_verify(args) -> int:
    params, freqs = _load(args)
    sets = [params] + random_params(args.random, args.seed) if args.random else [params]
    reports: list[VerificationReport] = [
        run_suite(args.suite, args.N, p, args.mode, args.tolerance, freqs, args.max_degree) for p in sets]
    merged = VerificationReport(args.suite, args.mode, params.label(), args.N, reports[0].tolerance,
                                [c for r in reports for c in r.cases])
    meta = _meta(args, params, freqs)
    meta.pop("mode")
    if args.random:
        meta["random_sets"] = [p.label() for p in sets[1:]]
    if args.report:
        Path(args.report).write_text(merged.to_json(meta))
    for r in reports:
        for c in r.failures:
            print(f"FAIL {c.id} params={c.params} N={c.N} residual={c.to_dict(args.mode)['residual']}")
    print(f"{merged.summary()}{'' if len(sets) == 1 else f' over {len(sets)} parameter sets'}")
    return 0 if merged.passed else 1


def cmd_spectrum(args) -> int:
    params, freqs = _load(args)
    d = derive_params(params)
    if args.aniso and freqs is None:
        raise UsageError("--aniso needs --omega-sq w1sq,w2sq (or --omega, or frequencies in --params-file)")
    h = build_hamiltonian(not args.aniso, args.N, d, freqs if args.aniso else None, args.mode)
    levels: dict = defaultdict(list)
    for idx in (PolyIndex(m, k - m, args.N) for k in range(args.N + 1) for m in range(k + 1)):
        lam = idx.m + idx.n if not args.aniso else freqs.omega1_sq * idx.m + freqs.omega2_sq * idx.n
        levels[lam].append(idx)
    rows = []
    for lam in sorted(levels):
        res = 0
        for idx in levels[lam]:
            v = rahman_grid(idx, d, args.mode)
            res = max(res, (h @ v - v.scale(lam)).max_abs())
        rows.append({
            "level": format_rational(lam) if args.mode == EXACT else float(lam),
            "multiplicity": len(levels[lam]),
            "labels": [[i.m, i.n] for i in levels[lam]],
            "residual": format_rational(res) if args.mode == EXACT else float(res),
        })
    meta = _meta(args, params, freqs if args.aniso else None, hamiltonian="aniso" if args.aniso else "iso",
                 N=args.N)
    if _format_for(args) == "json":
        text = json.dumps({**meta, "levels": rows}, indent=2) + "\n"
    else:
        lines = [_comment(meta), "level,multiplicity,labels,residual\n"]
        for r in rows:
            labels = " ".join(f"({m};{n})" for m, n in r["labels"])
            lines.append(f"{r['level']},{r['multiplicity']},{labels},{r['residual']}\n")
        text = "".join(lines)
    if args.out:
        _emit(text, args.out)
    for r in rows:
        labels = " ".join(f"({m},{n})" for m, n in r["labels"])
        print(f"{r['level']:>8}  x{r['multiplicity']:<3} {labels}  residual={r['residual']}")
    return 0


def cmd_limit(args) -> int:
    params, _ = _load(args)
    d = derive_params(params)
    try:
        Ns = [int(s) for s in args.N_list.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"--N-list must be comma-separated integers, got {args.N_list!r}") from None
    samples = default_samples(args.samples, args.radius)
    rec = convergence(args.check, Ns, d, m=args.m or 0, n=args.n or 0, which=args.which,
                      testfn=args.testfn, side=args.side, direction=args.direction, samples=samples)
    meta = _meta(args, params, check=args.check, label=rec.label, samples=args.samples, radius=args.radius)
    meta["mode"] = FLOAT
    if args.out:
        text = rec.to_json(meta) if _format_for(args) == "json" else _comment(meta) + rec.to_csv()
        _emit(text, args.out)
    for N, e, o in zip(rec.Ns, rec.errors, rec.cumulative_orders()):
        print(f"N={N:<8d} max_error={e:.6g}" + ("" if o is None else f"  est_order={o:.3f}"))
    order = rec.order
    print(f"{rec.label}: monotone={rec.monotone()} order={'n/a' if order is None else f'{order:.3f}'}")
    return 0


# parser ------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, mode: bool = True):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--params", help="p1,p2,p3,p4 as integers or num/den, e.g. 2,1,1,1")
    src.add_argument("--params-file", help="JSON or 'key = value' file with p1..p4 (and optional omegas)")
    if mode:
        p.add_argument("--mode", choices=(EXACT, FLOAT), default=None,
                       help=f"arithmetic (default: exact, or ${MODE_ENV})")
    p.add_argument("--seed", type=int, default=0, help="seed recorded in outputs and used by randomized runs")


def _freq_args(p: argparse.ArgumentParser):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--omega-sq", help="w1^2,w2^2 as rationals (keeps exact mode exact)")
    g.add_argument("--omega", help="w1,w2 as rationals")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trioscillator", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"trioscillator {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a polynomial family or the weight on T_N")
    _common(p)
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--m", type=int, help="first degree (n1 for tratnik)")
    p.add_argument("--n", type=int, help="second degree (n2 for tratnik)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("operator", help="assemble an operator and export it as a COO list")
    _common(p)
    _freq_args(p)
    p.add_argument("--kind", choices=sorted(OPERATOR_KINDS), required=True)
    p.add_argument("--N", type=int, required=True, help="domain lattice T_N")
    p.add_argument("--export", help="COO csv path (default stdout)")
    p.set_defaults(func=cmd_operator)

    p = sub.add_parser("verify", help="run an identity suite")
    _common(p)
    _freq_args(p)
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE, help="float mode only")
    p.add_argument("--max-degree", type=int, help="cap on m+n (float default 6, exact: all)")
    p.add_argument("--random", type=int, default=0, metavar="K",
                   help="also run K seeded random parameter tuples")
    p.add_argument("--report", help="write a JSON report")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("spectrum", help="analytic spectrum with eigen-residuals")
    _common(p)
    _freq_args(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--iso", action="store_true")
    g.add_argument("--aniso", action="store_true")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("limit", help="continuum-limit convergence record")
    _common(p, mode=False)
    p.add_argument("--check", choices=CHECKS, required=True)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--which", choices=LIMIT_OPERATORS, default="Lambda1", help="operator for --check operator")
    p.add_argument("--testfn", default="s^2", help="polynomial in s, t of degree <= 3")
    p.add_argument("--side", choices=("R", "L"), default="R")
    p.add_argument("--direction", choices=("+", "-"), default="+")
    p.add_argument("--N-list", default=",".join(str(N) for N in DEFAULT_N_LADDER))
    p.add_argument("--samples", type=int, default=5, help="k for a k x k sample grid")
    p.add_argument("--radius", type=float, default=1.0, help="sample grid covers |s|, |t| <= radius")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_limit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "mode", None) is None:
            args.mode = default_mode()
        return args.func(args)
    except UsageError as exc:
        print(f"trioscillator {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (DegenerateParametersError, OutOfLatticeError, LatticeMismatchError, ValueError, TypeError,
            FileNotFoundError) as exc:
        print(f"trioscillator {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (BoundaryCoefficientError, PropagationError) as exc:
        print(f"trioscillator {args.command}: internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""``dhjlab`` command line.

    dhjlab forward  --density sine --beta 3 --t-grid linspace:0.05:10:200
    dhjlab inverse  --fhat exponential --beta 1
    dhjlab simulate --density uniform --paths 100000 --dt 1e-4
    dhjlab check    --ghat remark25 --expect invalid
    dhjlab example  ex1 --out runs/ex1

Every CSV starts with ``# key = value`` lines echoing the parameters.
The exit status is 0 when every internal check passes; otherwise 1, with
a JSON failure list on stdout (and in ``failures.json``).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import scenarios as sc
from .tabio import write_table

__all__ = ["main", "build_parser"]


def _float_or_inf(s):
    return math.inf if s.lower() in ("inf", "infinity") else float(s)


def _common(p, density=True):
    p.add_argument("--mu", type=float, default=0.0, help="drift (<= 0 for transforms)")
    p.add_argument("--beta", type=_float_or_inf, default=1.0, help="holding rate, or inf")
    p.add_argument("--barrier", type=float, default=1.0, help="barrier S")
    p.add_argument("--x", type=float, default=0.0, help="start point in [0, S)")
    if density:
        p.add_argument("--density", default="uniform",
                       help="uniform, sine, parabolic, triangular, g2k, g2k:<k> or a u,pdf CSV")
    p.add_argument("--k", type=int, default=None, help="k for --density g2k")
    p.add_argument("--paths", type=int, default=20_000)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=12345)
    p.add_argument("--lambda-grid", default="logspace:1e-3:1e2:25")
    p.add_argument("--t-grid", default=None)
    p.add_argument("--u-grid", default=None)
    p.add_argument("--order", type=int, default=14, help="Gaver-Stehfest order")
    p.add_argument("--no-initial-hold", action="store_true",
                   help="start at 0 with an immediate jump instead of a hold")
    p.add_argument("--out", default=None, help="output directory (default: runs/<command>)")
    p.add_argument("--no-plots", action="store_true")


def build_parser():
    ap = argparse.ArgumentParser(prog="dhjlab", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("forward", help="jump density and holding rate -> FPT transform")
    _common(p)

    p = sub.add_parser("inverse", help="FPT transform -> candidate jump density")
    _common(p, density=False)
    p.add_argument("--fhat", required=True,
                   help="exponential[:rate], a catalog density name, or a lambda,fhat CSV")
    p.add_argument("--expect", choices=("valid", "invalid", "inconclusive"), default="valid")

    p = sub.add_parser("simulate", help="Monte Carlo first-passage times")
    _common(p)
    p.add_argument("--samples", default=None, help="re-analyse an existing samples CSV")
    p.add_argument("--no-reference", action="store_true",
                   help="skip the comparison with the inverted transform")

    p = sub.add_parser("check", help="validity check of a candidate jump transform")
    _common(p, density=False)
    p.add_argument("--ghat", required=True,
                   help="catalog density name, inverse:<fhat spec>, or remark25")
    p.add_argument("--expect", choices=("valid", "invalid", "inconclusive"), default="valid")

    p = sub.add_parser("example", help="reproduce a named scenario")
    p.add_argument("name", help=", ".join(sc.EXAMPLES) + ", cir")
    _common(p)
    return ap


def _options(args):
    return sc.Options(
        mu=args.mu, beta=args.beta, barrier=args.barrier, x=args.x,
        density=getattr(args, "density", "uniform"), k=args.k, paths=args.paths,
        dt=args.dt, seed=args.seed, lambda_grid=args.lambda_grid, t_grid=args.t_grid,
        u_grid=args.u_grid, initial_hold=not args.no_initial_hold, order=args.order,
    )


def _write(bundle, out, plots=True):
    os.makedirs(out, exist_ok=True)
    for name, (cols, meta) in bundle.tables.items():
        write_table(os.path.join(out, f"{name}.csv"), cols, meta)
    for name, text in bundle.text.items():
        with open(os.path.join(out, f"{name}.txt"), "w") as fh:
            fh.write(text)
    if plots:
        from .plotting import render

        for fig in bundle.figures:
            render(fig, os.path.join(out, f"{fig['name']}.png"), f"{bundle.name}: {fig['name']}")
    with open(os.path.join(out, "checks.json"), "w") as fh:
        json.dump({"name": bundle.name, "params": bundle.params,
                   "summary": bundle.summary,
                   "checks": [c.as_dict() for c in bundle.checks]},
                  fh, indent=2, default=_jsonable)


def _jsonable(obj):
    try:
        return float(obj)
    except (TypeError, ValueError):
        return str(obj)


def _report(bundle, out):
    print(f"{bundle.name}: outputs in {out}")
    for k, v in bundle.summary.items():
        if not isinstance(v, dict):
            print(f"  {k} = {v}")
    for c in bundle.checks:
        print(f"  [{'PASS' if c.passed else 'FAIL'}] {c.name}" + (f"  ({c.detail})" if c.detail else ""))
    failures = [c.as_dict() for c in bundle.checks if not c.passed]
    if failures:
        payload = {"status": "fail", "failures": failures}
        with open(os.path.join(out, "failures.json"), "w") as fh:
            json.dump(payload, fh, indent=2)
        print(json.dumps(payload))
        return 1
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        opts = _options(args)
        if args.command == "forward":
            bundle = sc.run_forward(opts)
        elif args.command == "inverse":
            bundle, _ = sc.run_inverse(opts, args.fhat, expect=args.expect)
        elif args.command == "simulate":
            bundle = sc.run_simulate(opts, samples_path=args.samples,
                                     reference=not args.no_reference)
        elif args.command == "check":
            bundle = sc.run_check(opts, args.ghat, expect=args.expect)
        else:
            bundle = sc.run_example(args.name, opts)
    except (ValueError, KeyError) as exc:
        print(json.dumps({"status": "error", "failures": [{"check": "arguments",
                                                            "detail": str(exc)}]}))
        return 2
    label = args.name.replace(":", "_") if args.command == "example" else args.command
    out = args.out or os.path.join("runs", label)
    _write(bundle, out, plots=not args.no_plots)
    return _report(bundle, out)


if __name__ == "__main__":
    sys.exit(main())

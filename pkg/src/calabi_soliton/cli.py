"""Command-line front end.

Exit codes: 0 success, 1 invalid parameters, 2 solver non-convergence,
3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import report as rp
from .errors import ConvergenceError, InvalidParameterError, VerificationError
from .radial import write_csv
from .suites import SUITES, run_suites

EXIT_OK, EXIT_INVALID, EXIT_CONVERGENCE, EXIT_VERIFY = 0, 1, 2, 3
log = logging.getLogger("calabi_soliton")


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags, which here means non-convergence
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _positive(kind):
    def conv(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    conv.__name__ = kind.__name__
    return conv


def _samples(text):
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError(f"need at least 2 samples, got {text}")
    return v


def _window_flags(p, s_min=-6.0, s_max=40.0, samples=4601):
    p.add_argument("--s-min", type=float, default=s_min)
    p.add_argument("--s-max", type=float, default=s_max)
    p.add_argument("--samples", type=_samples, default=samples)


def _common(p):
    p.add_argument("--tol", type=_positive(float), default=rp.DEFAULT_TOL,
                   help="tolerance for residual checks")
    p.add_argument("--out", default=None, help="output directory for report.json and CSV files")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="calabi-soliton", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("expand-cone", help="expanding soliton on the cone (a = 0)")
    p.add_argument("--m", type=_positive(int), default=1)
    p.add_argument("--kappa", type=float, default=4.0)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--mu", type=float, default=None)
    g.add_argument("--q", type=_positive(float), default=None, help="cone exponent, mu = -1/q")
    p.add_argument("--sigma0", type=_positive(float), default=1.0)
    _window_flags(p)
    _common(p)

    for name, helptext in (("shrink-bundle", "shrinking soliton on L^-k, 0 < k < p"),
                           ("expand-bundle", "expanding soliton on L^-k, k > p")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--m", type=_positive(int), default=1)
        p.add_argument("--p", type=_positive(int), required=True)
        p.add_argument("--k", type=_positive(int), required=True)
        if name == "expand-bundle":
            p.add_argument("--mu", type=float, default=-1.0)
        p.add_argument("--sigma0", type=_positive(float), default=None)
        _window_flags(p)
        _common(p)

    p = sub.add_parser("glue", help="eternal solution from a shrinking and an expanding soliton")
    p.add_argument("--m", type=_positive(int), default=1)
    p.add_argument("--p", type=_positive(int), required=True)
    p.add_argument("--k", type=_positive(int), required=True)
    _window_flags(p)
    _common(p)

    p = sub.add_parser("scalar", help="gradient scalar soliton on (1, inf)")
    p.add_argument("--m", type=_positive(int), default=1)
    p.add_argument("--kappa", type=float, default=-2.0)
    p.add_argument("--c", type=float, default=-4.0)
    p.add_argument("--mu", type=float, default=-1.0)
    _common(p)

    p = sub.add_parser("verify", help="run verification suites or re-check a report")
    p.add_argument("--suite", action="append", choices=sorted(SUITES) + ["all"], default=None)
    p.add_argument("--from-report", default=None, help="re-run a report.json and compare verdicts")
    _common(p)

    p = sub.add_parser("sweep", help="all bundle cases with p, k up to the given bounds")
    p.add_argument("--m", type=_positive(int), default=1)
    p.add_argument("--p-max", type=_positive(int), default=3)
    p.add_argument("--k-max", type=_positive(int), default=3)
    p.add_argument("--mu", type=float, default=-1.0, help="mu of the expanding cases")
    p.add_argument("--workers", type=_positive(int), default=None)
    _window_flags(p, s_max=30.0, samples=3601)
    _common(p)
    return parser


def _write(out_dir, name, text):
    with open(os.path.join(out_dir, name), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _emit(doc: str, out_dir, case=None):
    if out_dir is None:
        sys.stdout.write(doc)
        return
    os.makedirs(out_dir, exist_ok=True)
    _write(out_dir, "report.json", doc)
    if case is not None and case.solution is not None:
        _write(out_dir, "profile.csv", write_csv(case.solution))
    if case is not None and case.slices is not None:
        _write(out_dir, "eternal_slices.csv", case.slices)


def _case_from_args(args) -> rp.Case:
    win = dict(s_min=args.s_min, s_max=args.s_max, samples=args.samples) if hasattr(args, "s_min") else {}
    if args.command == "expand-cone":
        mu = args.mu if args.mu is not None else (-1.0 / args.q if args.q is not None else -1.0)
        return rp.expand_cone_case(args.m, args.kappa, mu, args.sigma0, tol=args.tol, **win)
    if args.command == "shrink-bundle":
        return rp.shrink_bundle_case(args.m, args.p, args.k, args.sigma0, tol=args.tol, **win)
    if args.command == "expand-bundle":
        return rp.expand_bundle_case(args.m, args.p, args.k, args.mu, args.sigma0, tol=args.tol, **win)
    if args.command == "glue":
        return rp.glue_case(args.m, args.p, args.k, tol=args.tol, **win)
    if args.command == "scalar":
        return rp.scalar_case(args.m, args.kappa, args.c, args.mu, tol=args.tol)
    raise InvalidParameterError(f"unknown command {args.command!r}")


def _failures(case: rp.Case):
    return [c for c in case.checks if not c.passed]


def _sweep_point(task):
    kind, m, p, k, mu, win, tol = task
    try:
        if kind == "shrink":
            case = rp.shrink_bundle_case(m, p, k, tol=tol, **win)
        else:
            case = rp.expand_bundle_case(m, p, k, mu, tol=tol, **win)
    except (InvalidParameterError, ConvergenceError) as exc:
        return {"p": p, "k": k, "kind": kind, "error": str(exc), "passed": False}
    return {"p": p, "k": k, "kind": kind, "mu": case.blocks["profile"]["mu"],
            "a": case.blocks["profile"]["a"],
            "left": case.blocks["classification"]["left"]["kind"], "passed": case.passed}


def _run_sweep(args):
    win = dict(s_min=args.s_min, s_max=args.s_max, samples=args.samples)
    tasks = []
    for p in range(1, args.p_max + 1):
        for k in range(1, args.k_max + 1):
            if k < p:
                tasks.append(("shrink", args.m, p, k, None, win, args.tol))
            elif k > p:
                tasks.append(("expand", args.m, p, k, args.mu, win, args.tol))
    with ProcessPoolExecutor(max_workers=args.workers) as ex:
        rows = list(ex.map(_sweep_point, tasks))
    params = dict(m=args.m, p_max=args.p_max, k_max=args.k_max, mu=args.mu, tol=args.tol, **win)
    doc = {"schema": rp.SCHEMA, "command": "sweep", "params": params, "sweep": rows,
           "passed": all(r["passed"] for r in rows),
           "meta": {"package": "calabi_soliton", "version": rp.__version__}}
    _emit(json.dumps(rp._clean(doc), indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK if doc["passed"] else EXIT_VERIFY


def _run_verify(args):
    if args.from_report is not None:
        with open(args.from_report, encoding="utf-8") as fh:
            old = json.load(fh)
        new = rp.rebuild(old)
        before, after = old.get("verdicts", {}), rp._clean(new.verdicts())
        diffs = sorted(k for k in set(before) | set(after) if before.get(k) != after.get(k))
        doc = {"schema": rp.SCHEMA, "command": "verify", "from_report": os.path.basename(args.from_report),
               "verdicts": after, "match": not diffs, "differences": diffs,
               "meta": {"package": "calabi_soliton", "version": rp.__version__}}
        _emit(json.dumps(rp._clean(doc), indent=2, sort_keys=True) + "\n", args.out)
        for d in diffs:
            print(f"verdict changed: {d}: {before.get(d)!r} -> {after.get(d)!r}", file=sys.stderr)
        return EXIT_OK if not diffs else EXIT_VERIFY
    names = args.suite or ["all"]
    results = run_suites(names, args.tol)
    doc = {"schema": rp.SCHEMA, "command": "verify", "params": {"suite": names, "tol": args.tol},
           "suites": {k: [c.to_dict() for c in v] for k, v in results.items()},
           "meta": {"package": "calabi_soliton", "version": rp.__version__}}
    failed = [f"{k}.{c.name}" for k, v in results.items() for c in v if not c.passed]
    doc["passed"] = not failed
    _emit(json.dumps(rp._clean(doc), indent=2, sort_keys=True) + "\n", args.out)
    for f in failed:
        print(f"check failed: {f}", file=sys.stderr)
    return EXIT_OK if not failed else EXIT_VERIFY


def run(args) -> int:
    """Execute a parsed command line and return the exit code."""
    log.info("running %s", args.command)
    try:
        if args.command == "verify":
            return _run_verify(args)
        if args.command == "sweep":
            return _run_sweep(args)
        case = _case_from_args(args)
        _emit(rp.dumps(case), args.out, case)
        bad = _failures(case)
        for c in bad:
            print(f"check failed: {c.name} = {c.value:.3e} (tol {c.tol:.1e})", file=sys.stderr)
        return EXIT_OK if not bad else EXIT_VERIFY
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except ConvergenceError as exc:
        print(f"solver did not converge: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (InvalidParameterError, ValueError) as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return run(args)


if __name__ == "__main__":
    sys.exit(main())

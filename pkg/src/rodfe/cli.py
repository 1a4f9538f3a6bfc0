"""Command-line front end.

    rod run <case> [--mesh N] [--steps N] [--tol X] [--out DIR]
    rod converge <case> [--meshes 5,10,20,40,80,160] [--out DIR]
    rod check

Exit codes: 0 success, 2 solver non-convergence, 3 validation error.
The ROD_OUT environment variable sets the default output directory.
"""

import argparse
import os
import sys

import numpy as np

from . import bench, checks
from .cases import build_case, list_cases
from .model import ParseError
from .solver import SingularSystemError


def _parser():
    p = argparse.ArgumentParser(
        prog="rod", description="Geometrically exact rod benchmarks")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a benchmark case")
    run.add_argument("case", choices=list_cases())
    run.add_argument("--mesh", type=int, default=None,
                     help="elements per member (cases that support it)")
    run.add_argument("--steps", type=int, default=None,
                     help="override the number of load steps")
    run.add_argument("--tol", type=float, default=None,
                     help="override the Newton residual tolerance")
    run.add_argument("--out", default=None, help="output directory")

    conv = sub.add_parser("converge", help="mesh-convergence study")
    conv.add_argument("case", choices=list_cases())
    conv.add_argument("--meshes", default="5,10,20,40,80,160",
                      help="comma-separated element counts")
    conv.add_argument("--out", default=None, help="output directory")

    sub.add_parser("check", help="run the randomized self-check suite")
    return p


def _cmd_run(args):
    report = bench.run_case(args.case, mesh=args.mesh, steps=args.steps,
                            tol=args.tol, out_dir=args.out)
    for r in report.results:
        print(f"step {r.factor:>8.5f}: iters {r.iterations:2d} "
              f"residual {r.residual_norm:.3e}"
              + ("" if r.converged else "  NOT CONVERGED"))
    if report.results:
        u = report.final_state.u[report.case.monitor]
        print("monitor displacement: %g %g %g" % tuple(u))
    if report.l2 is not None:
        print(f"l2 error vs exact: {report.l2:.6e}")
    print(f"artifacts: {report.out_dir}")
    if not report.converged:
        print("solver did not converge", file=sys.stderr)
        return 2
    return 0


def _cmd_converge(args):
    meshes = [int(t) for t in args.meshes.split(",") if t.strip()]
    rep = bench.convergence_study(args.case, meshes=meshes, out_dir=args.out)
    for m, e in zip(rep.meshes, rep.errors):
        print(f"mesh {m:4d}: l2 error {e:.6e}")
    print(f"fitted slope: {rep.slope:.4f}")
    if len(rep.meshes) < len(meshes):
        print("solver did not converge on the finer meshes", file=sys.stderr)
        return 2
    return 0


def _cmd_check(_args):
    failures = checks.run_all(verbose=True)
    return 0 if not failures else 2


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "run":
            code = _cmd_run(args)
        elif args.command == "converge":
            code = _cmd_converge(args)
        else:
            code = _cmd_check(args)
    except (ParseError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        code = 3
    except SingularSystemError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        code = 2
    sys.exit(code)


if __name__ == "__main__":
    main()

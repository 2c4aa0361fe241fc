"""Command-line front end.

Subcommands mirror the library operations one-to-one: validate,
classify, bound, count, bs-count, kernel, verify, demo-remark.  Input
instances are JSON files (see serialize); reports are canonical JSON or
CSV.  Exit codes: 0 ok, 2 validation error, 3 count-bound violation,
4 numerical non-convergence.
"""

import argparse
import sys
import time

import numpy as np

from . import __version__
from .boundary import classify
from .bound import bargmann_bound
from .birman import bs_count, bs_trace_bound, build_bs
from .errors import HalflineError
from .fem import DEFAULT_LADDER, Discretization, converge_count, count_negative
from .harness import run_remark_demo, run_verify
from .resolvent import kernel_eval, make_kernel
from .serialize import (
    canonical_json,
    classification_to_json,
    emit_report,
    load_instance,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_VIOLATION = 3
EXIT_NOT_CONVERGED = 4


def _emit(report: dict, args) -> None:
    text = emit_report(report, args.out)
    if args.out is None:
        sys.stdout.write(text)


def _csv_line(values) -> str:
    return ",".join(str(v) for v in values) + "\n"


def cmd_validate(args) -> int:
    inst = load_instance(args.input)
    _emit({"valid": True, "n": inst.pair.n,
           "default_potential": inst.default_potential}, args)
    return EXIT_OK


def cmd_classify(args) -> int:
    inst = load_instance(args.input)
    eps = float(inst.options.get("eps_class", 1e-9))
    cls = classify(inst.pair, eps_class=eps)
    _emit(classification_to_json(cls), args)
    return EXIT_OK


def cmd_bound(args) -> int:
    inst = load_instance(args.input)
    result = bargmann_bound(inst.pair, inst.potential)
    report = result.as_dict()
    if inst.default_potential:
        report["warning"] = "no potential given; using V = 0"
    _emit(report, args)
    return EXIT_OK


def cmd_count(args) -> int:
    inst = load_instance(args.input)
    E = args.E if args.E is not None else float(inst.options.get("E", 0.0))
    if args.ladder:
        ladder = [tuple(r) for r in inst.options["ladder"]] \
            if "ladder" in inst.options else DEFAULT_LADDER
        rep = converge_count(inst.pair, inst.potential, ladder=ladder, E=E)
        if args.format == "csv":
            out = "L,h,count\n" + "".join(
                _csv_line(row) for row in rep.diagnostics["ladder"]
            )
            if args.out:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(out)
            else:
                sys.stdout.write(out)
        else:
            _emit(rep.as_dict(), args)
        return EXIT_OK if rep.converged else EXIT_NOT_CONVERGED
    disc = Discretization(L=args.length, h=args.h)
    rep = count_negative(inst.pair, inst.potential, disc, E=E)
    _emit(rep.as_dict(), args)
    return EXIT_OK


def cmd_bs_count(args) -> int:
    inst = load_instance(args.input)
    E = args.E if args.E is not None else float(inst.options.get("E", -0.5))
    nodes = args.nodes if args.nodes is not None else inst.options.get("nodes")
    bsm = build_bs(inst.pair, inst.potential, E, nodes=nodes)
    count = bs_count(inst.pair, inst.potential, E, bsm=bsm)
    rhos = bsm.eigenvalues()
    top = sorted((float(r) for r in rhos), reverse=True)[:10]
    _emit({
        "E": E,
        "count": count,
        "trace": bs_trace_bound(inst.pair, inst.potential, E, bsm=bsm),
        "top_eigenvalues": top,
    }, args)
    return EXIT_OK


def cmd_kernel(args) -> int:
    inst = load_instance(args.input)
    E = args.E if args.E is not None else -1.0
    kern = make_kernel(inst.pair, E)
    n = inst.pair.n
    xs = np.linspace(0.0, args.length, args.samples)
    header = ["x", "y"]
    for i in range(n):
        for j in range(n):
            header += [f"re_{i}{j}", f"im_{i}{j}"]
    lines = [",".join(header) + "\n"]
    for x in xs:
        for y in xs:
            R = kernel_eval(kern, float(x), float(y))
            row = [f"{x:.6g}", f"{y:.6g}"]
            for i in range(n):
                for j in range(n):
                    row += [f"{R[i, j].real:.12g}", f"{R[i, j].imag:.12g}"]
            lines.append(",".join(row) + "\n")
    out = "".join(lines)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return EXIT_OK


def cmd_verify(args) -> int:
    t0 = time.time()
    report = run_verify(args.trials, args.n_max, args.seed, jobs=args.jobs)
    elapsed = time.time() - t0
    _emit(report.to_json(), args)
    print(f"verify: {args.trials} trials in {elapsed:.1f}s, "
          f"{len(report.violations)} violation(s)", file=sys.stderr)
    if report.violations:
        for v in report.violations:
            sys.stderr.write("violating instance:\n")
            sys.stderr.write(canonical_json(v["instance"]))
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_demo_remark(args) -> int:
    report = run_remark_demo()
    _emit(report, args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="halfline",
        description="Bound-state counting for half-line matrix Schrodinger operators",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_input=True):
        if needs_input:
            sp.add_argument("--input", required=True, help="instance JSON path")
        sp.add_argument("--out", default=None, help="write the report here")
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    common(sub.add_parser("validate", help="validate an instance file"))
    common(sub.add_parser("classify", help="boundary classification"))
    common(sub.add_parser("bound", help="eigenvalue-count bound"))

    sp = sub.add_parser("count", help="finite-element negative-eigenvalue count")
    common(sp)
    sp.add_argument("--E", type=float, default=None, help="count below this shift")
    sp.add_argument("--ladder", action="store_true", help="run the mesh ladder")
    sp.add_argument("--length", type=float, default=80.0, help="truncation length")
    sp.add_argument("--h", type=float, default=0.01, help="mesh width")

    sp = sub.add_parser("bs-count", help="Birman-Schwinger count below E")
    common(sp)
    sp.add_argument("--E", type=float, default=None)
    sp.add_argument("--nodes", type=int, default=None)

    sp = sub.add_parser("kernel", help="dump the free resolvent kernel as CSV")
    common(sp)
    sp.add_argument("--E", type=float, default=None, help="spectral point (negative)")
    sp.add_argument("--length", type=float, default=5.0)
    sp.add_argument("--samples", type=int, default=21)

    sp = sub.add_parser("verify", help="randomized count-bound verification")
    common(sp, needs_input=False)
    sp.add_argument("--trials", type=int, default=50)
    sp.add_argument("--n-max", dest="n_max", type=int, default=3)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--jobs", type=int, default=1)

    sp = sub.add_parser("demo-remark", help="necessity of the integer bound terms")
    common(sp, needs_input=False)
    return p


COMMANDS = {
    "validate": cmd_validate,
    "classify": cmd_classify,
    "bound": cmd_bound,
    "count": cmd_count,
    "bs-count": cmd_bs_count,
    "kernel": cmd_kernel,
    "verify": cmd_verify,
    "demo-remark": cmd_demo_remark,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except HalflineError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())

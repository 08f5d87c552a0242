"""Command-line front end: batch verification suites and exporters.

Exit codes: 0 all checks pass, 1 verification mismatch, 2 usage error.
Every subcommand takes --seed, --format and --out; JSON reports are
byte-identical for identical (command, seed).
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import bkar, gjpairs, gue, maps, trees
from .perms import NumericalPartition, Permutation, partitions_of
from .randomized import random_bkar_instance, random_maintool_instance
from .report import Check, RunReport, format_value

DEFAULT_N_MAX = 8
HARD_N_MAX = 10


class UsageError(Exception):
    pass


def _check_cap(value: int, cap: int, unsafe: bool, what: str) -> int:
    if value > cap and not unsafe:
        raise UsageError(f"{what} capped at {cap}; pass --unsafe-sizes to override")
    return value


# -- subcommand implementations -------------------------------------------------


def _verify_one_class(parts: tuple[int, ...]) -> tuple[tuple[int, ...], int, int, Fraction]:
    lam = NumericalPartition(parts)
    res = gjpairs.main_theorem_check(lam.representative())
    return parts, res.map_count, res.gjdm_count, res.denominator


def cmd_verify_main(args) -> RunReport:
    n_max = _check_cap(args.n_max, HARD_N_MAX, args.unsafe_sizes, "--n-max")
    report = RunReport("verify-main", {"n_max": n_max}, None)
    wanted = None
    if args.classes:
        wanted = {NumericalPartition.from_string(c).parts for c in args.classes}
    tasks = []
    for n in range(2, n_max + 1, 2):
        for lam in partitions_of(n):
            if wanted is not None and lam.parts not in wanted:
                continue
            tasks.append(lam.parts)

    def consume(result):
        parts, mcount, gcount, denom = result
        lam = NumericalPartition(parts)
        if denom > 0:
            lhs, rhs = gcount, denom * mcount
        else:
            lhs, rhs = gcount + mcount, 0  # both families must be empty
        report.add(Check.compare(
            f"lambda={lam}", lhs, rhs,
            {"n": lam.size, "map": mcount, "gjdm": gcount,
             "denominator": denom}))
        return report.checks[-1].passed

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            for result in pool.map(_verify_one_class, tasks):
                if not consume(result):
                    break
    else:
        for parts in tasks:
            if not consume(_verify_one_class(parts)):
                break
    return report


def cmd_tutte(args) -> RunReport:
    n_max = _check_cap(args.n_max, HARD_N_MAX, args.unsafe_sizes, "--n-max")
    report = RunReport("tutte", {"n_max": n_max}, None)
    for n in range(2, n_max + 1, 2):
        for lam in partitions_of(n):
            if not lam.is_eulerian():
                continue
            mstar, m = maps.tutte(lam)
            brute = maps.map_count(lam)
            brute_star = maps.rooted_map_count(lam)
            report.add(Check.compare(f"labeled lambda={lam}", Fraction(brute), m,
                                     {"n": n}))
            report.add(Check.compare(f"rooted lambda={lam}", brute_star, mstar,
                                     {"n": n}))
    return report


def cmd_thooft(args) -> RunReport:
    n_max = _check_cap(args.n_max, HARD_N_MAX, args.unsafe_sizes, "--n-max")
    report = RunReport("thooft", {"n_max": n_max}, None)
    for n in range(2, n_max + 1, 2):
        for lam in partitions_of(n):
            leading = maps.thooft_leading(lam)
            brute = maps.map_count(lam)
            exp = n // 2 + 2 - lam.length
            detail = maps.class_summary(lam)
            detail["coefficient_of"] = f"N^{exp}"
            report.add(Check.compare(f"lambda={lam}", leading,
                                     Fraction(brute), detail))
    return report


def cmd_bkar(args) -> RunReport:
    n = _check_cap(args.n, 6, args.unsafe_sizes, "--n")
    report = RunReport("bkar", {"n": n, "trials": args.trials}, args.seed)
    rng = random.Random(args.seed)
    for t in range(args.trials):
        theta, f = random_bkar_instance(rng, n_max=n)
        res = bkar.bkar_check(theta, f)
        detail = {"theta": theta.to_string(), "product_form": res.product_form}
        report.add(Check("trial %03d" % t, res.passed,
                         format_value(res.lhs), format_value(res.rhs), detail))
        if not res.passed:
            break
    return report


def cmd_maintool(args) -> RunReport:
    report = RunReport("maintool",
                       {"n": args.n, "levels": args.levels, "trials": args.trials},
                       args.seed)
    rng = random.Random(args.seed)
    for t in range(args.trials):
        theta, blocks, cov = random_maintool_instance(rng, n_max=args.n,
                                                      levels=args.levels)
        lhs, rhs = gue.maintool_check(theta, blocks, cov)
        report.add(Check.compare("trial %03d" % t, lhs, rhs,
                                 {"theta": theta.to_string()}))
        if lhs != rhs:
            break
    return report


def cmd_expansion(args) -> RunReport:
    lam = NumericalPartition.from_string(args.partition)
    if not args.unsafe_sizes:
        if lam.parts not in {(2,), (4,), (2, 2)} or args.levels > 3:
            raise UsageError("expansion is sized for lambda in {2 | 4 | 2,2} and "
                             "--levels <= 3; pass --unsafe-sizes to override")
    report = RunReport("expansion",
                       {"lambda": str(lam), "levels": args.levels}, None)
    res = gue.refined_expansion_check(lam, args.levels)
    report.add(Check.compare("quadruple sum", res.exact, res.quadruple_sum))
    report.add(Check.compare("tree-assignment sum", res.exact,
                             res.tree_assignment_sum))
    return report


def cmd_mc(args) -> RunReport:
    lam = NumericalPartition.from_string(args.partition)
    rng = np.random.default_rng(args.seed)
    result = gue.mc_cumulant(lam, args.size, args.samples, rng,
                             keep_trail=args.plot is not None)
    exact = maps.cumulant_polynomial(lam).evaluate_n(args.size)
    sigmas = (abs(result.estimate - float(exact)) / result.stderr
              if result.stderr > 0 else float("inf"))
    report = RunReport("mc", {"lambda": str(lam), "N": args.size,
                              "samples": args.samples}, args.seed)
    report.add(Check(f"estimate within 4 stderr of exact", sigmas <= 4.0,
                     repr(result.estimate), str(exact),
                     {"stderr": result.stderr, "sigmas": sigmas}))
    report.mc_row = {  # consumed by the csv renderer
        "lambda": str(lam), "N": args.size, "samples": args.samples,
        "estimate": result.estimate, "stderr": result.stderr,
        "exact": exact, "seed": args.seed,
    }
    if args.plot is not None:
        _render_mc_plot(result, float(exact), args.plot)
        report.parameters["plot"] = args.plot
    return report


def _render_mc_plot(result, exact: float, path: str):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    counts = [t[0] for t in result.trail]
    ests = [t[1] for t in result.trail]
    errs = [t[2] for t in result.trail]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.axhline(exact, color="firebrick", lw=1, label="exact")
    ax.plot(counts, ests, color="navy", lw=1, label="running estimate")
    lo = [e - 2 * s for e, s in zip(ests, errs)]
    hi = [e + 2 * s for e, s in zip(ests, errs)]
    ax.fill_between(counts, lo, hi, color="navy", alpha=0.2,
                    label="+/- 2 stderr")
    ax.set_xscale("log")
    ax.set_xlabel("samples")
    ax.set_ylabel("cumulant estimate")
    lam = ",".join(str(p) for p in result.partition)
    ax.set_title(f"lambda=({lam})  N={result.size}")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _mc_csv(report: RunReport) -> str:
    row = report.mc_row
    header = "lambda,N,samples,estimate,stderr,exact,seed"
    lam = '"' + row["lambda"] + '"' if "," in row["lambda"] else row["lambda"]
    line = (f'{lam},{row["N"]},{row["samples"]},{row["estimate"]!r},'
            f'{row["stderr"]!r},{row["exact"]},{row["seed"]}')
    return header + "\n" + line + "\n"


def _parse_signs(text: str, n: int) -> tuple[int, ...]:
    if text.startswith("@"):
        text = Path(text[1:]).read_text().strip()
    parts = [t for t in text.replace(" ", "").split(",") if t]
    if len(parts) != n:
        raise UsageError(f"need {n} comma-separated signs, got {len(parts)}")
    vals = tuple(int(t) for t in parts)
    if any(abs(v) > 1 for v in vals):
        raise UsageError("signs must be -1, 0 or +1")
    return vals


def cmd_export(args):
    theta = Permutation.from_cycles(args.n, args.theta)
    sigma = Permutation.from_cycles(args.n, args.sigma)
    if args.kind == "sv":
        obj = trees.sv_tree(theta, sigma)
    else:
        if args.g is None:
            raise UsageError("--g is required for colored trees and mobiles")
        g = _parse_signs(args.g, args.n)
        if args.kind == "colored":
            obj = trees.color_tree(theta, sigma, g)
        else:
            obj = trees.mobile(theta, sigma, g)
    if args.format == "dot":
        return trees.to_dot(obj) + "\n"
    return trees.to_json(obj) + "\n"


# -- plumbing --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treewick",
        description="Exact verification suites for planar-map counting, "
                    "tree-interpolated Gaussian cumulants, and tridiagonal "
                    "matrix models.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed_default=None):
        p.add_argument("--seed", type=int, default=seed_default)
        p.add_argument("--format", choices=["table", "json", "csv"],
                       default="table")
        p.add_argument("--out", default=None, help="write the report to a file")
        p.add_argument("--unsafe-sizes", action="store_true",
                       help="override the built-in size caps")

    p = sub.add_parser("verify-main", help="map count vs weighted factorization count, per class")
    p.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    p.add_argument("--classes", action="append", default=None,
                   help="restrict to a class, e.g. --classes 4,2 (repeatable)")
    p.add_argument("--jobs", type=int, default=1)
    common(p)

    p = sub.add_parser("tutte", help="closed even-degree counts vs brute force")
    p.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    common(p)

    p = sub.add_parser("thooft", help="leading cumulant coefficient vs map count")
    p.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    common(p)

    p = sub.add_parser("bkar", help="forest-interpolation identity on random monomials")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--trials", type=int, default=100)
    common(p, seed_default=0)

    p = sub.add_parser("maintool", help="Gaussian cumulant identity on random families")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--levels", type=int, default=2)
    p.add_argument("--trials", type=int, default=50)
    common(p, seed_default=0)

    p = sub.add_parser("expansion", help="exact refined expansions at small sizes")
    p.add_argument("--partition", default="2,2", help="e.g. 4 or 2,2")
    p.add_argument("--levels", type=int, default=2, help="matrix size N")
    common(p)

    p = sub.add_parser("mc", help="Monte-Carlo cumulant of the tridiagonal model")
    p.add_argument("--partition", default="4")
    p.add_argument("--size", type=int, default=30, help="matrix size N")
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--plot", default=None,
                   help="write a convergence figure (png) next to the report")
    common(p, seed_default=0)

    p = sub.add_parser("export", help="serialize a tree or mobile")
    p.add_argument("--theta", required=True, help='cycles, e.g. "(1,2,3,4)(5,7,8)(9,10)"')
    p.add_argument("--sigma", required=True)
    p.add_argument("--n", type=int, required=True, help="ground set size")
    p.add_argument("--g", default=None,
                   help="comma-separated signs, or @file")
    p.add_argument("--kind", choices=["sv", "colored", "mobile"],
                   default="colored")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--format", choices=["dot", "json"], default="dot")
    p.add_argument("--out", default=None)

    return parser


COMMANDS = {
    "verify-main": cmd_verify_main,
    "tutte": cmd_tutte,
    "thooft": cmd_thooft,
    "bkar": cmd_bkar,
    "maintool": cmd_maintool,
    "expansion": cmd_expansion,
    "mc": cmd_mc,
}


def _emit(text: str, out: "str | None"):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        if args.command == "export":
            _emit(cmd_export(args), args.out)
            return 0
        report = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report.timings["total"] = time.perf_counter() - start
    if args.format == "json":
        _emit(report.to_json(), args.out)
    elif args.format == "csv":
        text = _mc_csv(report) if args.command == "mc" else report.to_csv()
        _emit(text, args.out)
    else:
        _emit(report.to_table(), args.out)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: solve, verify and emit.

Exit codes: 0 success, 1 failed verification, 2 iteration budget
exhausted, 64 malformed input or unknown format, 65 positive-definiteness
violation, 66 certificate/problem hash mismatch.  The LATFREE_LOG
environment variable (quiet | info | trace) controls per-iteration
output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .emit import certificate_to_csv, certificate_to_svg
from .engine import GRADIENT_ZERO, SolveConfig, solve
from .errors import (
    BudgetExhausted,
    LevelSetAssumptionViolated,
    NotStronglyConvexInX,
)
from .geometry import GpSystem
from .numerics import format_scalar, tolerance_policy, EXACT
from .serialization import (
    ProblemFormatError,
    certificate_from_json,
    certificate_to_json,
    dump_json,
    load_problem,
    problem_hash,
)
from .verification import (
    brute_force_optimum,
    check_lattice_free,
    check_monotone_measures,
    global_optimum_box,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BUDGET = 2
EXIT_MALFORMED = 64
EXIT_NOT_PD = 65
EXIT_HASH_MISMATCH = 66

LOG_LEVELS = ("quiet", "info", "trace")


def _log_level() -> str:
    level = os.environ.get("LATFREE_LOG", "info")
    return level if level in LOG_LEVELS else "info"


def _read_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ProblemFormatError(f"cannot read {path}: {exc}") from exc


def _iteration_lines(trace, level: str):
    if level == "quiet":
        return
    for entry in trace:
        side = "-" if entry.side is None else f"{entry.side:+d}"
        witness = "-" if entry.k is None else str(entry.k)
        line = (f"[{entry.iteration}] case={entry.case.value} side={side} "
                f"k={witness} min_f={format_scalar(entry.f_before)}")
        if level == "trace":
            line += f" evals={entry.inner_product_evals}"
        print(line)


def cmd_solve(args) -> int:
    try:
        data = _read_json(args.problem)
        problem = load_problem(data)
    except ProblemFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except (NotStronglyConvexInX, LevelSetAssumptionViolated) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_PD

    policy = problem.policy
    if args.mode == "exact":
        policy = EXACT
    elif args.mode == "tolerance":
        policy = tolerance_policy(args.tau)
    config = SolveConfig(policy=policy, max_iterations=args.max_iter)

    level = _log_level()
    try:
        cert = solve(problem.oracle, problem.initial, config)
    except BudgetExhausted as exc:
        _iteration_lines(exc.trace, level)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET

    out_path = args.out or str(Path(args.problem).with_suffix(".cert.json"))
    cert_json = certificate_to_json(cert, problem_hash(data))
    with open(out_path, "w", encoding="utf-8") as handle:
        handle.write(dump_json(cert_json))
    _iteration_lines(cert.trace, level)
    if level != "quiet":
        print(f"status={cert.status} iterations={cert.iterations} "
              f"argmin={list(cert.argmin_point)} "
              f"f={format_scalar(cert.argmin_value)}")
        print(f"certificate written to {out_path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        problem_data = _read_json(args.problem)
        cert_data = _read_json(args.certificate)
        problem = load_problem(problem_data)
        cert, stored_hash = certificate_from_json(cert_data)
    except ProblemFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except (NotStronglyConvexInX, LevelSetAssumptionViolated) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_PD

    if stored_hash != problem_hash(problem_data):
        print("error: certificate does not match this problem file",
              file=sys.stderr)
        return EXIT_HASH_MISMATCH

    oracle = problem.oracle
    checks = {}
    witnesses = []

    recomputed_gp = GpSystem.from_set(cert.final_set, oracle)
    if problem.policy.is_exact:
        checks["halfspaces_authentic"] = recomputed_gp == cert.gp
    report = check_lattice_free(recomputed_gp, cert.final_set,
                                radius=args.box_radius, policy=problem.policy)
    checks["lattice_free_in_box"] = report.passed
    witnesses.extend(list(w) for w in report.witnesses)

    optima = brute_force_optimum(oracle, global_optimum_box(oracle))
    checks["argmin_value_matches_brute_force"] = (
        cert.argmin_value == optima.value
        and oracle.eval_f(cert.argmin_point) == cert.argmin_value
    )

    monotone = check_monotone_measures(cert.trace, optima)
    checks["measures_monotone"] = monotone.passed

    if cert.status == GRADIENT_ZERO:
        checks["gradient_zero_member"] = any(
            tuple(oracle.eval_grad(w)) == (0, 0) for w in cert.final_set.members()
        )

    passed = all(checks.values())
    print(dump_json({"pass": passed, "witnesses": witnesses, "checks": checks}),
          end="")
    return EXIT_OK if passed else EXIT_VERIFY_FAILED


def cmd_emit(args) -> int:
    try:
        cert_data = _read_json(args.certificate)
        cert, _ = certificate_from_json(cert_data)
    except ProblemFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED

    if args.format == "csv":
        rendered = certificate_to_csv(cert)
    elif args.format == "svg":
        rendered = certificate_to_svg(cert)
    else:
        print(f"error: unknown format {args.format!r}", file=sys.stderr)
        return EXIT_MALFORMED

    out_path = args.out or str(Path(args.certificate).with_suffix(f".{args.format}"))
    with open(out_path, "w", encoding="utf-8") as handle:
        handle.write(rendered)
    if _log_level() != "quiet":
        print(f"wrote {out_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latfree",
        description="Minimize a convex quadratic over the integer plane and "
                    "certify the result with a lattice-free gradient polyhedron.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a problem file")
    p_solve.add_argument("problem")
    p_solve.add_argument("--mode", choices=("exact", "tolerance"), default=None)
    p_solve.add_argument("--tau", type=float, default=1e-9)
    p_solve.add_argument("--max-iter", type=int, default=10_000)
    p_solve.add_argument("--out", default=None)
    p_solve.set_defaults(func=cmd_solve)

    p_verify = sub.add_parser("verify", help="verify a certificate")
    p_verify.add_argument("problem")
    p_verify.add_argument("certificate")
    p_verify.add_argument("--box-radius", type=int, default=50)
    p_verify.set_defaults(func=cmd_verify)

    p_emit = sub.add_parser("emit", help="render a certificate as csv or svg")
    p_emit.add_argument("certificate")
    p_emit.add_argument("--format", required=True)
    p_emit.add_argument("--out", default=None)
    p_emit.set_defaults(func=cmd_emit)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())

"""Command-line front end: single solves, error tables, benchmarks, checks.

Subcommands
    solve    one (problem, N, M, method) run, reported as one error row
    table    the full N x M error grid for a problem, CSV or aligned text
    bench    cost counters and median wall times for all three methods
    verify   numeric checks of the convergence theory and method identities

Exit codes: 0 success, 1 computational failure or failed verification,
2 usage error. CSV output is UTF-8 with LF line endings and a header row;
floats carry 17 significant digits. Text output prints errors in the
d.dddd(-ee) style of the reference tables.
"""

from __future__ import annotations

import argparse
import math
import sys

from .bench import BENCH_CSV_HEADER, run_benchmark
from .decompose import Method, MethodConfig, solve_improved, solve_original
from .fem import QuadratureRule, fem_solve
from .integrate import AccuracyError
from .norms import (
    BoundViolationError,
    ErrorReport,
    Reference,
    fine_grid_h1_error,
    fine_grid_l2_error,
    h1_seminorm,
    h1_seminorm_error,
    l2_error,
    observed_order,
    sup_norm,
    tail_bound,
    theorem_bound_check,
)
from .problems import BUILTIN_IDS, builtin_problem, psi_of

__all__ = ["main", "run"]

REPORT_CSV_HEADER = "problem,N,M,method,l2_error,h1_error,reference"

DEFAULT_N_LIST = (8, 32, 128, 512, 2048)
DEFAULT_M_LIST = (2, 4, 6, 8, 10)
FINE_GRID_ELEMS = 2**15
ERROR_RULE = QuadratureRule.gauss(5)
ORACLE_TOL = 1e-10
VERIFY_SUITES = (
    "tail-bound",
    "theorem-bound",
    "equivalence",
    "factorial-decay",
    "convergence-order",
)

# problems with a closed-form solution; ex4 only has the flux-integral
# reference, and its table additionally uses a fine-grid discrete reference
_CLOSED_FORM = {"ex1", "ex2", "ex3"}


def table_sci(x: float) -> str:
    """Format like 1.2839(-02), the notation of the reference tables."""
    if x == 0.0:
        return "0.0000(+00)"
    exp = math.floor(math.log10(abs(x)))
    mant = x / 10.0**exp
    if round(abs(mant), 4) >= 10.0:  # rounding to 4 places overflows
        mant /= 10.0
        exp += 1
    return f"{mant:.4f}({exp:+03d})"


def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated int list: {text!r}")
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("list entries must be integers >= 1")
    return sorted(values)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ellip1d",
        description="1D elliptic solver: direct FEM and series-decomposition methods.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    formatter = argparse.ArgumentDefaultsHelpFormatter

    def common(p, n_default=None, m_default=None):
        p.add_argument("--problem", choices=BUILTIN_IDS, default="ex1")
        p.add_argument("--quad", type=int, choices=(2, 3, 4, 5), default=3,
                       help="Gauss points per element for assembly")
        p.add_argument("--format", choices=("csv", "text"), default="csv")
        p.add_argument("--out", default=None, help="output path; stdout if omitted")
        if n_default is not None:
            p.add_argument("--N", type=int, default=n_default, dest="n_elems",
                           help="number of elements")
        if m_default is not None:
            p.add_argument("--M", type=int, default=m_default, dest="truncation",
                           help="truncation order")

    p = sub.add_parser("solve", formatter_class=formatter,
                       help="run one method once and report its errors")
    common(p, n_default=512, m_default=4)
    p.add_argument("--method", choices=[m.value for m in Method], default="improved")

    p = sub.add_parser("table", formatter_class=formatter,
                       help="reproduce the N x M error table of a problem")
    common(p)
    p.add_argument("--method", choices=[m.value for m in Method], default="improved")
    p.add_argument("--N-list", type=_int_list, default=list(DEFAULT_N_LIST),
                   dest="n_list")
    p.add_argument("--M-list", type=_int_list, default=list(DEFAULT_M_LIST),
                   dest="m_list")

    p = sub.add_parser("bench", formatter_class=formatter,
                       help="compare cost and wall time of all methods")
    common(p, n_default=2**15, m_default=10)
    p.add_argument("--reps", type=int, default=5)

    p = sub.add_parser("verify", formatter_class=formatter,
                       help="run the numeric property suites")
    common(p)
    p.add_argument("--M-list", type=_int_list, default=list(range(1, 9)),
                   dest="m_list")
    p.add_argument("--suite", choices=VERIFY_SUITES, default=None,
                   help="run a single suite (default: all)")
    return parser


def _emit(lines: list[str], out_path: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _run_method(problem, method: Method, n_elems: int, truncation: int, rule):
    if method is Method.DIRECT:
        return fem_solve(problem, n_elems, rule)
    solver = solve_original if method is Method.ORIGINAL else solve_improved
    return solver(problem, n_elems, truncation, rule).U_M


def _reference_fields(problem):
    if problem.name in _CLOSED_FORM:
        return problem.exact, problem.exact_derivative, Reference.CLOSED_FORM
    return problem.exact, problem.exact_derivative, Reference.FLUX_ORACLE


def _report_row(report: ErrorReport, fmt: str) -> str:
    if fmt == "csv":
        return (
            f"{report.problem},{report.n_elems},{report.truncation},{report.method},"
            f"{report.l2_error:.17g},{report.h1_error:.17g},{report.reference.value}"
        )
    return (
        f"{report.problem}  N={report.n_elems}  M={report.truncation}  "
        f"{report.method}  L2 {table_sci(report.l2_error)}  "
        f"H1 {table_sci(report.h1_error)}  ref {report.reference.value}"
    )


def cmd_solve(args) -> list[str]:
    problem = builtin_problem(args.problem)
    rule = QuadratureRule.gauss(args.quad)
    approx = _run_method(problem, Method(args.method), args.n_elems,
                         args.truncation, rule)
    exact, exact_d, ref = _reference_fields(problem)
    report = ErrorReport(
        problem=problem.name,
        method=args.method,
        n_elems=args.n_elems,
        truncation=args.truncation,
        l2_error=l2_error(approx, exact, ERROR_RULE),
        h1_error=h1_seminorm_error(approx, exact_d, ERROR_RULE),
        reference=ref,
    )
    lines = [REPORT_CSV_HEADER] if args.format == "csv" else []
    lines.append(_report_row(report, args.format))
    return lines


def table_reports(problem, method: Method, n_list, m_list, rule) -> list[ErrorReport]:
    """Error grid in row-major (N outer, M inner) order.

    Problems without a closed form are scored against a direct solve on a
    fine nested mesh, the coarse solution being interpolated onto it.
    """
    fine = None
    if problem.name not in _CLOSED_FORM:
        fine = fem_solve(problem, FINE_GRID_ELEMS, rule)
    reports = []
    for n in n_list:
        for m in m_list:
            approx = _run_method(problem, method, n, m, rule)
            if fine is None:
                reports.append(ErrorReport(
                    problem=problem.name, method=method.value, n_elems=n,
                    truncation=m,
                    l2_error=l2_error(approx, problem.exact, ERROR_RULE),
                    h1_error=h1_seminorm_error(
                        approx, problem.exact_derivative, ERROR_RULE),
                    reference=Reference.CLOSED_FORM,
                ))
            else:
                reports.append(ErrorReport(
                    problem=problem.name, method=method.value, n_elems=n,
                    truncation=m,
                    l2_error=fine_grid_l2_error(approx, fine),
                    h1_error=fine_grid_h1_error(approx, fine),
                    reference=Reference.FINE_GRID,
                ))
    return reports


def cmd_table(args) -> list[str]:
    problem = builtin_problem(args.problem)
    rule = QuadratureRule.gauss(args.quad)
    reports = table_reports(problem, Method(args.method), args.n_list,
                            args.m_list, rule)
    if args.format == "csv":
        return [REPORT_CSV_HEADER] + [_report_row(r, "csv") for r in reports]

    by_cell = {(r.n_elems, r.truncation): r.l2_error for r in reports}
    width = 14
    lines = [f"L2 errors, problem {problem.name}, method {args.method}"]
    lines.append(" " * 9 + "".join(f"M={m}".rjust(width) for m in args.m_list))
    for n in args.n_list:
        row = "".join(table_sci(by_cell[(n, m)]).rjust(width) for m in args.m_list)
        lines.append(f"N={n}".ljust(9) + row)
    return lines


def cmd_bench(args) -> list[str]:
    problem = builtin_problem(args.problem)
    report = run_benchmark(problem, args.n_elems, args.truncation, args.reps,
                           quad_points=args.quad)
    if args.format == "csv":
        return [BENCH_CSV_HEADER] + report.csv_rows()
    lines = [f"benchmark, problem {problem.name}, N={args.n_elems}, M={args.truncation}"]
    for method in (Method.ORIGINAL, Method.IMPROVED, Method.DIRECT):
        s = report.methods[method]
        lines.append(
            f"{method.value:9s} solves {s.solves:3d}  assemblies {s.assemblies:3d}  "
            f"factorizations {s.factorizations}  wall {s.wall_ns_median / 1e6:10.3f} ms  "
            f"L2 {table_sci(s.l2_error)}"
        )
    return lines


def _suite_tail_bound(problem, m_list):
    checked, worst = 0, -math.inf
    for x in (0.1, 0.5, 1.0, 2.0, 5.0):
        for m in range(1, 16):
            term = x ** (m + 1) / math.factorial(m + 1)
            tail = term
            for j in range(m + 2, 201):
                term *= x / j
                tail += term
            bound = tail_bound(x, m)
            if tail >= bound:
                return False, [f"tail {tail:.6e} >= bound {bound:.6e} at x={x}, M={m}"]
            checked += 1
            worst = max(worst, tail / bound)
    return True, [f"{checked} explicit tails strictly below bound "
                  f"(worst ratio {worst:.3f})"]


def _suite_theorem_bound(problem, m_list):
    triples = theorem_bound_check(problem, max(m_list), tol=1e-10)
    wanted = set(m_list)
    lines = [
        f"M={m}: error {err:.6e} <= bound {bnd:.6e}"
        for m, err, bnd in triples
        if m in wanted
    ]
    return True, lines


def _suite_equivalence(problem, m_list):
    rule = QuadratureRule.gauss(3)
    n = 2**7
    a = solve_original(problem, n, 1, rule)
    b = solve_improved(problem, n, 1, rule)
    gap = float(abs(a.U_M.values - b.U_M.values).max())
    ok = gap <= 1e-12
    return ok, [f"M=1 max nodal |improved - original| = {gap:.3e} at N={n}"]


def _suite_factorial_decay(problem, m_list):
    rule = QuadratureRule.gauss(3)
    result = solve_original(problem, 2**9, 6, rule)
    psi_sup = sup_norm(psi_of(problem.kappa), problem.length, 65536)
    u0_h1 = h1_seminorm(result.u0)
    lines, ok = [], True
    allowed = 1.0
    for j, term in enumerate(result.terms, start=1):
        allowed *= psi_sup / j
        ratio = h1_seminorm(term) / (allowed * u0_h1)
        ok = ok and ratio <= 1.05
        lines.append(f"j={j}: |u_j|_H1 / (psi^j/j! |u0|_H1) = {ratio:.4f}")
    return ok, lines


def _suite_convergence_order(problem, m_list):
    rule = QuadratureRule.gauss(3)
    reference = problem.exact
    n_values = [2**k for k in range(5, 12)]
    errors = [
        l2_error(fem_solve(problem, n, rule), reference, ERROR_RULE)
        for n in n_values
    ]
    order = observed_order(n_values, errors)
    ok = 1.9 <= order <= 2.1
    return ok, [f"direct-solve L2 order {order:.3f} over N={n_values[0]}..{n_values[-1]}"]


_SUITES = {
    "tail-bound": _suite_tail_bound,
    "theorem-bound": _suite_theorem_bound,
    "equivalence": _suite_equivalence,
    "factorial-decay": _suite_factorial_decay,
    "convergence-order": _suite_convergence_order,
}


def cmd_verify(args) -> tuple[list[str], bool]:
    problem = builtin_problem(args.problem)
    names = [args.suite] if args.suite else list(VERIFY_SUITES)
    lines, all_ok = [], True
    for name in names:
        try:
            ok, details = _SUITES[name](problem, args.m_list)
        except BoundViolationError as exc:
            ok, details = False, [str(exc)]
        status = "PASS" if ok else "FAIL"
        all_ok = all_ok and ok
        lines.append(f"{status} {name} ({problem.name})")
        lines.extend(f"    {d}" for d in details)
    return lines, all_ok


def _validate_values(args, parser) -> None:
    """Range checks on flag values; violations are usage errors (exit 2)."""
    try:
        if args.command == "solve":
            MethodConfig(Method(args.method), args.n_elems, args.truncation,
                         args.quad)
        elif args.command == "bench":
            MethodConfig(Method.ORIGINAL, args.n_elems, args.truncation, args.quad)
            if args.reps < 3:
                raise ValueError(f"--reps must be >= 3, got {args.reps}")
        elif args.command == "table":
            method = Method(args.method)
            for m in args.m_list:
                MethodConfig(method, args.n_list[0], m, args.quad)
    except ValueError as exc:
        parser.error(str(exc))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate_values(args, parser)
    try:
        if args.command == "verify":
            lines, ok = cmd_verify(args)
            _emit(lines, args.out)
            return 0 if ok else 1
        lines = {"solve": cmd_solve, "table": cmd_table, "bench": cmd_bench}[
            args.command
        ](args)
    except (ValueError, ArithmeticError, AccuracyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit(lines, args.out)
    return 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()

"""Acceptance suite: one test per criterion, one printed line per criterion.

Criteria 1-3 compare the computed error grids against the frozen reference
tables in golden_tables.py at the stated tolerances. As documented in the
decision log, those tables decay at first order in the mesh width while the
implemented discretization (P1 Galerkin, weak flux condition, exact
piecewise-constant derivatives, Gauss-verified load assembly) is provably
second-order accurate, so the table criteria fail with errors far below the
tabulated values. They are kept here unweakened; the remaining criteria pass.
"""

import math
from dataclasses import dataclass

import numpy as np
import pytest

from ellip1d import (
    QuadratureRule,
    builtin_problem,
    fem_solve,
    l2_error,
    observed_order,
    sup_norm,
    tail_bound,
    theorem_bound_check,
)
from ellip1d.bench import run_benchmark
from ellip1d.decompose import Method, solve_improved, solve_original
from ellip1d.norms import fine_grid_l2_error, h1_seminorm
from ellip1d.problems import psi_of

from golden_tables import M_VALUES, N_VALUES, TYPO_CORRECTIONS, cell

RULE = QuadratureRule.gauss(3)
ERROR_RULE = QuadratureRule.gauss(5)
FINE_GRID_ELEMS = 2**15


def announce(criterion: int, ok: bool, detail: str) -> str:
    line = f"[criterion {criterion:02d}] {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    return line


@dataclass(frozen=True)
class Cell:
    l2_improved: float
    l2_original: float
    counters_ok: bool


@pytest.fixture(scope="module")
def grids():
    """Error grids for all problems and both methods, plus counter audits."""
    out = {}
    for pid in ("ex1", "ex2", "ex3", "ex4"):
        problem = builtin_problem(pid)
        fine = fem_solve(problem, FINE_GRID_ELEMS, RULE) if pid == "ex4" else None
        cells = {}
        for n in N_VALUES:
            for m in M_VALUES:
                improved = solve_improved(problem, n, m, RULE)
                original = solve_original(problem, n, m, RULE)
                counters_ok = (
                    original.solve_count == m + 1
                    and original.assembly_count == m
                    and improved.solve_count == 2
                    and improved.assembly_count == 1
                )
                if fine is None:
                    e_impr = l2_error(improved.U_M, problem.exact, ERROR_RULE)
                    e_orig = l2_error(original.U_M, problem.exact, ERROR_RULE)
                else:
                    e_impr = fine_grid_l2_error(improved.U_M, fine)
                    e_orig = fine_grid_l2_error(original.U_M, fine)
                cells[(n, m)] = Cell(e_impr, e_orig, counters_ok)
        out[pid] = cells
    return out


def rel_dev(measured: float, target: float) -> float:
    return abs(measured - target) / target


def test_criterion_01_table_ex1(grids):
    rows = []
    worst = 0.0
    for n in N_VALUES:
        for m in M_VALUES:
            measured = grids["ex1"][(n, m)].l2_improved
            dev = rel_dev(measured, cell("ex1", n, m))
            worst = max(worst, dev)
            rows.append(f"(2^{int(math.log2(n))},{m}): {measured:.4e} "
                        f"vs {cell('ex1', n, m):.4e} ({dev:+.0%})")
    anchor_devs = {
        (2**9, 4): rel_dev(grids["ex1"][(2**9, 4)].l2_improved, 2.0603e-4),
        (2**11, 10): rel_dev(grids["ex1"][(2**11, 10)].l2_improved, 5.0756e-5),
    }
    ok = worst <= 0.25 and all(d <= 0.10 for d in anchor_devs.values())
    announce(1, ok, f"ex1 grid vs reference table: worst cell deviation "
                    f"{worst:.0%} (allowed 25%), anchors "
                    + ", ".join(f"{d:.0%}" for d in anchor_devs.values())
                    + " (allowed 10%); typo cell (2^7,8) tested against 8.1289e-4")
    assert ok, "ex1 table reproduction failed:\n" + "\n".join(rows)


def test_criterion_02_anchors_ex2_ex3(grids):
    devs = {
        "ex2 (2^9,8)": rel_dev(grids["ex2"][(2**9, 8)].l2_improved, 5.8993e-4),
        "ex3 (2^11,10)": rel_dev(grids["ex3"][(2**11, 10)].l2_improved, 1.5315e-5),
    }
    ok = all(d <= 0.15 for d in devs.values())
    announce(2, ok, "ex2/ex3 anchor cells within 15%: "
             + ", ".join(f"{k} dev {d:.0%}" for k, d in devs.items())
             + "; ex2 (2^3,{8,10}) tested against corrected 4.4993e-2")
    assert ok, (
        "anchor reproduction failed: "
        + "; ".join(
            f"{k}: measured dev {d:.1%} against the reference value"
            for k, d in devs.items()
        )
    )


def test_criterion_03_table_ex4_fine_grid(grids):
    devs = {
        "(2^3,2)": rel_dev(grids["ex4"][(2**3, 2)].l2_improved, 9.1918e-2),
        "(2^11,10)": rel_dev(grids["ex4"][(2**11, 10)].l2_improved, 1.2989e-4),
    }
    ok = all(d <= 0.25 for d in devs.values())
    announce(3, ok, "ex4 anchors vs 2^15-element reference within 25%: "
             + ", ".join(f"{k} dev {d:.0%}" for k, d in devs.items()))
    assert ok, (
        "ex4 fine-grid reproduction failed: "
        + "; ".join(f"{k}: dev {d:.1%}" for k, d in devs.items())
    )


def test_criterion_04_cost_contract(grids):
    audited = sum(
        cellv.counters_ok for cells in grids.values() for cellv in cells.values()
    )
    total = sum(len(cells) for cells in grids.values())
    ok = audited == total
    announce(4, ok, f"counters exact on {audited}/{total} runs: "
                    f"M+1 vs 2 back-substitutions, M vs 1 gradient assemblies")
    assert ok


def test_criterion_05_accuracy_preservation(grids):
    worst_cell, worst_excess = None, -math.inf
    for pid, cells in grids.items():
        for (n, m), cellv in cells.items():
            h = 1.0 / n
            allowed = max(0.05 * cellv.l2_original, 10.0 * h * h)
            excess = abs(cellv.l2_improved - cellv.l2_original) / allowed
            if excess > worst_excess:
                worst_cell, worst_excess = (pid, n, m), excess
    ok = worst_excess <= 1.0
    announce(5, ok, f"|improved - original| within max(5% of original, 10 h^2) "
                    f"on all 100 grid cells; tightest margin {worst_excess:.3f} "
                    f"of allowance at {worst_cell}")
    assert ok


def test_criterion_06_first_order_equivalence():
    gaps = {}
    for pid in ("ex1", "ex2", "ex3", "ex4"):
        problem = builtin_problem(pid)
        a = solve_original(problem, 2**7, 1, RULE)
        b = solve_improved(problem, 2**7, 1, RULE)
        gaps[pid] = float(np.abs(a.U_M.values - b.U_M.values).max())
    ok = all(g <= 1e-12 for g in gaps.values())
    announce(6, ok, "M=1 nodal agreement at N=2^7: "
             + ", ".join(f"{k} {v:.2e}" for k, v in gaps.items()))
    assert ok


def test_criterion_07_theorem_bound():
    margins = {}
    for pid in ("ex1", "ex2", "ex3"):
        problem = builtin_problem(pid)
        triples = theorem_bound_check(problem, 8, tol=1e-10)  # raises on violation
        margins[pid] = max(err / bound for _, err, bound in triples)
    announce(7, True, "H1 truncation error below series-tail bound for "
                      "M=1..8 on ex1-ex3; worst error/bound ratios "
             + ", ".join(f"{k} {v:.3f}" for k, v in margins.items()))


def test_criterion_08_tail_sums():
    worst = -math.inf
    for x in (0.1, 0.5, 1.0, 2.0, 5.0):
        for m in range(1, 16):
            term = x ** (m + 1) / math.factorial(m + 1)
            tail = term
            for j in range(m + 2, 201):
                term *= x / j
                tail += term
            assert tail < tail_bound(x, m)
            worst = max(worst, tail / tail_bound(x, m))
    announce(8, True, f"75 explicit series tails strictly below the bound "
                      f"(worst ratio {worst:.3f})")


def test_criterion_09_factorial_term_decay():
    worst = -math.inf
    for pid in ("ex1", "ex3"):
        problem = builtin_problem(pid)
        result = solve_original(problem, 2**9, 6, RULE)
        psi_sup = sup_norm(psi_of(problem.kappa), problem.length, 65536)
        u0_h1 = h1_seminorm(result.u0)
        allowed = 1.0
        for j, term in enumerate(result.terms, start=1):
            allowed *= psi_sup / j
            ratio = h1_seminorm(term) / (1.05 * allowed * u0_h1)
            worst = max(worst, ratio)
            assert ratio <= 1.0
    announce(9, True, f"|u_j|_H1 <= 1.05 psi^j/j! |u0|_H1 for j=1..6 on "
                      f"ex1/ex3 at N=2^9 (worst ratio {worst:.3f})")


def test_criterion_10_fem_baseline_order():
    problem = builtin_problem("ex1")
    n_values = [2**k for k in range(5, 12)]
    errors = [
        l2_error(fem_solve(problem, n, RULE), problem.exact, ERROR_RULE)
        for n in n_values
    ]
    order = observed_order(n_values, errors)
    ok = 1.9 <= order <= 2.1
    announce(10, ok, f"direct-solve L2 convergence order on ex1: {order:.3f} "
                     f"(required within [1.9, 2.1])")
    assert ok


def test_criterion_11_benchmark_direction():
    ratios = {}
    for pid in ("ex1", "ex2", "ex3", "ex4"):
        problem = builtin_problem(pid)
        report = run_benchmark(problem, 2**15, 10, reps=5)
        assert report.methods[Method.ORIGINAL].solves == 11
        assert report.methods[Method.IMPROVED].solves == 2
        orig = report.methods[Method.ORIGINAL].wall_ns_median
        impr = report.methods[Method.IMPROVED].wall_ns_median
        ratios[pid] = impr / orig
    ok = all(r < 1.0 for r in ratios.values())
    announce(11, ok, "improved/original median wall-time ratio at N=2^15, "
                     "M=10: " + ", ".join(f"{k} {v:.2f}" for k, v in ratios.items()))
    assert ok


def test_typo_corrections_documented():
    # every corrected cell is annotated with its printed original
    for (pid, n, m), (printed, corrected) in TYPO_CORRECTIONS.items():
        assert cell(pid, n, m) == corrected
        assert printed != corrected
        assert rel_dev(printed, corrected) < 0.15  # digit-level slips only

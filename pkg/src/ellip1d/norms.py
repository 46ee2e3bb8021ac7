"""Error norms and numeric checks of the series-convergence theory.

L2 and H1-seminorm errors are computed per element with Gauss quadrature
against an analytic (or semi-analytic) reference. The theory checks bound the
continuous-level truncation error |u - U_M|_H1 by the exponential-series tail

    ||psi||_inf^{M+1} / (M+1)! * exp(||psi||_inf) * |u_0|_H1

and evaluate both sides by quadrature.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .fem import NodalFunction, QuadratureRule
from .integrate import integral
from .problems import Problem, ScalarField, flux_field, g_m, psi_of

__all__ = [
    "Reference",
    "ErrorReport",
    "BoundViolationError",
    "l2_error",
    "h1_seminorm_error",
    "h1_seminorm",
    "sup_norm",
    "tail_bound",
    "theorem_bound_check",
    "observed_order",
]


class Reference(enum.Enum):
    CLOSED_FORM = "closed_form"
    FLUX_ORACLE = "flux_oracle"
    FINE_GRID = "fine_grid"


@dataclass(frozen=True)
class ErrorReport:
    """Error norms for one (problem, method, N, M) run."""

    problem: str
    method: str
    n_elems: int
    truncation: int
    l2_error: float
    h1_error: float
    reference: Reference

    def __post_init__(self):
        for label, value in (("l2", self.l2_error), ("h1", self.h1_error)):
            if not (math.isfinite(value) and value >= 0.0):
                raise ValueError(f"{label} error must be finite and >= 0, got {value}")


def l2_error(approx: NodalFunction, reference: ScalarField, rule: QuadratureRule) -> float:
    """L2 norm of approx - reference by per-element Gauss quadrature.

    Requires at least a 4-point rule so the reference is resolved inside
    elements rather than only at nodes.
    """
    if rule.n_points < 4:
        raise ValueError(f"error quadrature needs >= 4 points, got {rule.n_points}")
    pts = approx.mesh.element_points(rule)
    diff = approx.at_quadrature(rule) - reference(pts)
    return float(np.sqrt(approx.mesh.h * np.sum((diff * diff) @ rule.weights)))


def h1_seminorm_error(
    approx: NodalFunction, reference_derivative: ScalarField, rule: QuadratureRule
) -> float:
    """L2 norm of approx' - reference_derivative, approx' piecewise constant."""
    pts = approx.mesh.element_points(rule)
    diff = approx.derivative_values()[:, None] - reference_derivative(pts)
    return float(np.sqrt(approx.mesh.h * np.sum((diff * diff) @ rule.weights)))


def h1_seminorm(v: NodalFunction) -> float:
    """Exact H1 seminorm of a piecewise-linear function."""
    return float(np.sqrt(np.sum(np.diff(v.values) ** 2) / v.mesh.h))


def sup_norm(field: ScalarField, length: float, n_samples: int) -> float:
    """max |field| over n_samples equispaced points including both endpoints.

    A lower estimate of the true sup; 65536 samples are used wherever the
    theory checks need ||psi||_inf.
    """
    if n_samples < 2:
        raise ValueError(f"need at least 2 samples, got {n_samples}")
    grid = np.linspace(0.0, length, n_samples)
    return float(np.max(np.abs(field(grid))))


def tail_bound(psi_sup: float, truncation: int) -> float:
    """Series-tail bound psi_sup^(M+1) / (M+1)! * exp(psi_sup)."""
    if psi_sup < 0:
        raise ValueError(f"sup norm cannot be negative, got {psi_sup}")
    if truncation < 0:
        raise ValueError(f"truncation order must be >= 0, got {truncation}")
    term = 1.0
    for j in range(1, truncation + 2):
        term *= psi_sup / j
    return term * math.exp(psi_sup)


class BoundViolationError(AssertionError):
    """The measured truncation error exceeded its theoretical bound."""

    def __init__(self, violations):
        self.violations = violations
        lines = ", ".join(
            f"(M={m}, error={e:.6e}, bound={b:.6e})" for m, e, b in violations
        )
        super().__init__(f"truncation-error bound violated: {lines}")


PSI_SUP_SAMPLES = 65536


def theorem_bound_check(
    problem: Problem, max_truncation: int, tol: float
) -> list[tuple[int, float, float]]:
    """Check |u - U_M|_H1 <= tail_bound(||psi||_inf, M) |u_0|_H1 for M = 1..max.

    The error is evaluated at the continuous level as the L2 norm of
    (kappa^-1 - G_M) u_0' with u_0' in flux form, by adaptive quadrature.
    Returns (M, error, bound) triples; raises BoundViolationError listing
    every violating M if any error exceeds its bound.
    """
    if max_truncation < 1:
        raise ValueError(f"need max truncation >= 1, got {max_truncation}")
    psi = psi_of(problem.kappa)
    psi_sup = sup_norm(psi, problem.length, PSI_SUP_SAMPLES)
    flux = flux_field(problem, tol / 10.0)
    u0_h1 = math.sqrt(
        integral(lambda x: flux(x) ** 2, 0.0, problem.length, tol)
    )

    triples = []
    for m in range(1, max_truncation + 1):
        series = g_m(psi, m)

        def integrand(x, series=series):
            gap = 1.0 / problem.kappa(x) - series(x)
            return (gap * flux(x)) ** 2

        err = math.sqrt(integral(integrand, 0.0, problem.length, tol))
        triples.append((m, err, tail_bound(psi_sup, m) * u0_h1))

    violations = [(m, e, b) for m, e, b in triples if e > b]
    if violations:
        raise BoundViolationError(violations)
    return triples


def _nested_difference(coarse: NodalFunction, fine: NodalFunction) -> NodalFunction:
    if fine.mesh.n_elems % coarse.mesh.n_elems != 0:
        raise ValueError(
            f"fine mesh with {fine.mesh.n_elems} elements does not nest "
            f"{coarse.mesh.n_elems} coarse elements"
        )
    interp = np.interp(fine.mesh.nodes, coarse.mesh.nodes, coarse.values)
    return NodalFunction(fine.mesh, interp - fine.values)


def fine_grid_l2_error(coarse: NodalFunction, fine: NodalFunction) -> float:
    """L2 distance to a reference solution on a nested finer mesh.

    The coarse solution is interpolated onto the fine nodes (exact, since the
    meshes nest); the difference is then piecewise linear on the fine mesh and
    its norm is integrated in closed form.
    """
    d = _nested_difference(coarse, fine)
    a, b = d.values[:-1], d.values[1:]
    return float(np.sqrt(fine.mesh.h / 3.0 * np.sum(a * a + a * b + b * b)))


def fine_grid_h1_error(coarse: NodalFunction, fine: NodalFunction) -> float:
    """H1-seminorm distance to a reference solution on a nested finer mesh."""
    return h1_seminorm(_nested_difference(coarse, fine))


def observed_order(n_values, errors) -> float:
    """Least-squares slope of log error against log h for a mesh sequence."""
    n_values = np.asarray(n_values, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if len(n_values) < 2:
        raise ValueError("need at least two mesh sizes")
    return float(np.polyfit(np.log(1.0 / n_values), np.log(errors), 1)[0])

"""Problem instances, coefficient transforms and semi-analytic references.

The model problem on (0, L) is

    -(kappa(x) u'(x))' = f(x),   u(0) = alpha,   -kappa(L) u'(L) = beta

with 0 < kappa_min <= kappa(x). Integrating the conservation law once gives
the flux identity

    kappa(x) u'(x) = -beta + int_x^L f(t) dt

which yields reference solutions by quadrature alone: u(x) = alpha +
int_0^x kappa(s)^-1 (-beta + int_s^L f) ds. The same machinery with the
reciprocal coefficient replaced by its truncated exponential series produces
the mesh-free limit of the decomposition methods.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .integrate import cumulative, segment_integrals

__all__ = [
    "ScalarField",
    "Problem",
    "constant_field",
    "psi_of",
    "g_m",
    "builtin_problem",
    "BUILTIN_IDS",
    "flux_field",
    "flux_weighted_antiderivative",
    "exact_solution_via_flux",
]


@dataclass(frozen=True)
class ScalarField:
    """Deterministic real-valued function on the problem domain.

    fn receives a float ndarray of any shape and must return values
    elementwise (a scalar is broadcast). Scalar input returns a float.
    """

    fn: Callable
    description: str = ""
    derivative: "ScalarField | None" = None

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = np.broadcast_to(np.asarray(self.fn(arr), dtype=float), arr.shape)
        if arr.ndim == 0:
            return float(out)
        return out


def constant_field(value: float, description: str = "") -> ScalarField:
    value = float(value)
    return ScalarField(
        fn=lambda x: np.full(x.shape, value),
        description=description or f"constant {value}",
        derivative=ScalarField(lambda x: np.zeros(x.shape), "constant 0"),
    )


_VALIDATION_SAMPLES = 65536  # dense positivity certificate for kappa


@dataclass(frozen=True)
class Problem:
    """One boundary-value problem instance, optionally with a reference solution."""

    name: str
    length: float
    kappa: ScalarField
    f: ScalarField
    alpha: float
    beta: float
    exact: ScalarField | None = None
    exact_derivative: ScalarField | None = None
    kappa_min: float = dataclasses.field(init=False, default=0.0)

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError(f"domain length must be positive, got {self.length}")
        grid = np.linspace(0.0, self.length, _VALIDATION_SAMPLES + 1)
        kvals = self.kappa(grid)
        if not np.all(np.isfinite(kvals)):
            raise ValueError(f"{self.name}: coefficient is not finite on [0, L]")
        kmin = float(np.min(kvals))
        if kmin <= 0.0:
            raise ValueError(
                f"{self.name}: coefficient must be strictly positive, "
                f"sampled minimum {kmin}"
            )
        object.__setattr__(self, "kappa_min", kmin)

        if self.exact is not None:
            mismatch = abs(self.exact(0.0) - self.alpha)
            if mismatch > 1e-10:
                raise ValueError(
                    f"{self.name}: exact(0) differs from alpha by {mismatch:.3e}"
                )
        if self.exact_derivative is not None:
            flux_end = -self.kappa(self.length) * self.exact_derivative(self.length)
            if abs(flux_end - self.beta) > 1e-8:
                raise ValueError(
                    f"{self.name}: boundary flux of the exact solution is "
                    f"{flux_end:.3e}, expected {self.beta}"
                )


def psi_of(kappa: ScalarField) -> ScalarField:
    """Pointwise log of a strictly positive coefficient."""

    def fn(x):
        kvals = np.broadcast_to(np.asarray(kappa(x), dtype=float), x.shape)
        if np.any(kvals <= 0.0):
            bad = float(np.asarray(x).ravel()[np.argmax(kvals.ravel() <= 0.0)])
            raise ValueError(f"coefficient is not positive at x = {bad}")
        return np.log(kvals)

    return ScalarField(fn, f"log({kappa.description or 'coefficient'})")


def g_m(psi: ScalarField, m: int) -> ScalarField:
    """Partial sum sum_{j=0}^m (-psi)^j / j! of the reciprocal-coefficient series.

    Terms are accumulated multiplicatively (term_j = term_{j-1} * (-psi) / j),
    so large m never touches an explicit factorial.
    """
    if m < 0:
        raise ValueError(f"truncation order must be nonnegative, got {m}")

    def fn(x):
        p = np.broadcast_to(np.asarray(psi(x), dtype=float), x.shape)
        total = np.ones_like(p)
        term = np.ones_like(p)
        for j in range(1, m + 1):
            term = term * (-p) / j
            total = total + term
        return total

    return ScalarField(fn, f"truncated exp(-psi), {m + 1} terms")


def _sorted_pointwise(eval_sorted: Callable) -> Callable:
    """Lift an evaluator defined on ascending 1-D points to arbitrary arrays."""

    def fn(arr):
        flat = arr.ravel()
        order = np.argsort(flat, kind="stable")
        vals = np.empty(flat.shape)
        vals[order] = eval_sorted(flat[order])
        return vals.reshape(arr.shape)

    return fn


def _check_domain(pts: np.ndarray, length: float):
    if len(pts) and (pts[0] < 0.0 or pts[-1] > length):
        raise ValueError(f"evaluation point outside [0, {length}]")


def flux_field(problem: Problem, tol: float) -> ScalarField:
    """The solution flux kappa u' as a function: -beta + int_x^L f.

    This equals the derivative of the unit-coefficient solution of the same
    data, which seeds both decomposition methods.
    """

    def eval_sorted(pts):
        _check_domain(pts, problem.length)
        bp = np.append(pts, problem.length)
        segs = segment_integrals(problem.f, bp, tol)
        return -problem.beta + np.cumsum(segs[::-1])[::-1]

    return ScalarField(
        _sorted_pointwise(eval_sorted), f"flux of {problem.name} (tol {tol:g})"
    )


def flux_weighted_antiderivative(
    problem: Problem, weight: ScalarField, tol: float, description: str
) -> ScalarField:
    """alpha + int_0^x weight(s) (kappa u')(s) ds by nested adaptive quadrature.

    The inner flux integral is computed to tol/10, the outer accumulation
    to tol. The returned field carries its integrand as .derivative.
    """
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    flux = flux_field(problem, tol / 10.0)
    integrand = ScalarField(
        lambda arr: weight(arr) * flux(arr),
        f"derivative of {description}",
    )

    def eval_sorted(pts):
        _check_domain(pts, problem.length)
        bp = np.concatenate([[0.0], pts])
        return cumulative(integrand, bp, tol, base=problem.alpha)[1:]

    return ScalarField(
        _sorted_pointwise(eval_sorted), description, derivative=integrand
    )


def exact_solution_via_flux(problem: Problem, tol: float) -> ScalarField:
    """Reference solution u(x) = alpha + int_0^x kappa^-1 (-beta + int_s^L f) ds."""
    inv_kappa = ScalarField(
        lambda x: 1.0 / problem.kappa(x), f"1/({problem.kappa.description})"
    )
    return flux_weighted_antiderivative(
        problem, inv_kappa, tol, f"flux-integral solution of {problem.name} (tol {tol:g})"
    )


def _ex1() -> Problem:
    kappa = ScalarField(lambda x: 1.0 + x * x, "1 + x^2")
    f = constant_field(1.0, "1")
    exact_d = ScalarField(lambda x: (1.0 - x) / (1.0 + x * x), "(1 - x)/(1 + x^2)")
    exact = ScalarField(
        lambda x: np.arctan(x) - 0.5 * np.log1p(x * x),
        "arctan(x) - ln(1 + x^2)/2",
        derivative=exact_d,
    )
    return Problem(
        name="ex1", length=1.0, kappa=kappa, f=f, alpha=0.0, beta=0.0,
        exact=exact, exact_derivative=exact_d,
    )


def _ex2() -> Problem:
    w = 10.0 * np.pi
    kappa = ScalarField(
        lambda x: 1.0 / (1.0 - 0.5 * np.sin(w * x)),
        "(1 - 0.5 sin(10 pi x))^-1",
    )
    f = constant_field(1.0, "1")
    exact_d = ScalarField(
        lambda x: (1.0 - x) * (1.0 - 0.5 * np.sin(w * x)),
        "(1 - x)(1 - 0.5 sin(10 pi x))",
    )

    def u(x):
        # the additive constant is -1/(20 pi), pinned by u(0) = 0
        return (
            np.sin(w * x) + w * (1.0 - x) * np.cos(w * x) + w**2 * x * (2.0 - x)
        ) / (2.0 * w**2) - 1.0 / (2.0 * w)

    exact = ScalarField(u, "oscillatory closed form", derivative=exact_d)
    return Problem(
        name="ex2", length=1.0, kappa=kappa, f=f, alpha=0.0, beta=0.0,
        exact=exact, exact_derivative=exact_d,
    )


def _ex3() -> Problem:
    kappa = ScalarField(lambda x: (x + 1.0) ** 2, "(x + 1)^2")
    f = ScalarField(lambda x: x / (x + 1.0), "x/(x + 1)")
    ln2 = math.log(2.0)
    exact_d = ScalarField(
        lambda x: (1.0 - x - ln2 + np.log1p(x)) / (1.0 + x) ** 2,
        "(1 - x - ln 2 + ln(1 + x))/(1 + x)^2",
    )
    exact = ScalarField(
        lambda x: ((3.0 - ln2) * x - (2.0 + x) * np.log1p(x)) / (1.0 + x),
        "((3 - ln 2) x - (2 + x) ln(1 + x))/(1 + x)",
        derivative=exact_d,
    )
    return Problem(
        name="ex3", length=1.0, kappa=kappa, f=f, alpha=0.0, beta=0.0,
        exact=exact, exact_derivative=exact_d,
    )


def _ex4() -> Problem:
    kappa = ScalarField(lambda x: x**4 + np.exp(-x), "x^4 + exp(-x)")
    f = ScalarField(lambda x: -2.0 * np.cos(np.pi * x), "-2 cos(pi x)")
    base = Problem(name="ex4", length=1.0, kappa=kappa, f=f, alpha=0.0, beta=0.0)
    # closed-form flux 2 sin(pi x)/pi leaves only the outer integral to quadrature
    exact_d = ScalarField(
        lambda x: 2.0 * np.sin(np.pi * x) / (np.pi * (x**4 + np.exp(-x))),
        "2 sin(pi x)/(pi (x^4 + exp(-x)))",
    )
    exact = exact_solution_via_flux(base, tol=1e-10)
    exact = dataclasses.replace(exact, derivative=exact_d)
    return dataclasses.replace(base, exact=exact, exact_derivative=exact_d)


_BUILTINS = {"ex1": _ex1, "ex2": _ex2, "ex3": _ex3, "ex4": _ex4}
BUILTIN_IDS = tuple(_BUILTINS)


def builtin_problem(problem_id: str) -> Problem:
    """One of the four built-in problems on (0, 1) with alpha = beta = 0."""
    try:
        builder = _BUILTINS[problem_id]
    except KeyError:
        raise ValueError(
            f"unknown problem {problem_id!r}; valid ids: {', '.join(BUILTIN_IDS)}"
        ) from None
    return builder()

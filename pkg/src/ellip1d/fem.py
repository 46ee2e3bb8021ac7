"""Uniform 1D mesh, P1 element assembly and a direct tridiagonal solver.

Discretizes the weak problem

    find u with u(0) = alpha such that
    int_0^L kappa u' v' dx = int_0^L f v dx - beta v(L)   for all v, v(0) = 0

with continuous piecewise-linear (hat) basis functions on a uniform mesh.
The flux condition at x = L is natural: it enters only through the -beta v(L)
load term and is never imposed on the solution values.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "AssemblyError",
    "SingularSystemError",
    "Mesh",
    "QuadratureRule",
    "NodalFunction",
    "TridiagonalSystem",
    "TridiagonalFactorization",
    "build_mesh",
    "assemble_stiffness",
    "assemble_load",
    "assemble_gradient_load",
    "apply_dirichlet",
    "factorize",
    "solve_tridiagonal",
    "fem_solve",
    "tridiagonal_matvec",
]


class AssemblyError(ValueError):
    """A coefficient or source evaluated to a non-finite value during assembly."""


class SingularSystemError(ArithmeticError):
    """Elimination hit a zero pivot; the system has no unique solution."""


@dataclass(frozen=True, eq=False)
class Mesh:
    """Uniform partition of [0, L] into n_elems elements (n_elems + 1 nodes)."""

    length: float
    n_elems: int
    nodes: np.ndarray = field(repr=False)

    @property
    def h(self) -> float:
        return self.length / self.n_elems

    def element_points(self, rule: "QuadratureRule") -> np.ndarray:
        """Quadrature points of every element, shape (n_elems, rule.n_points).

        Row-major flattening of the result is ascending in x.
        """
        return self.nodes[:-1, None] + self.h * rule.points[None, :]

    def same_as(self, other: "Mesh") -> bool:
        return self.n_elems == other.n_elems and self.length == other.length


def build_mesh(length: float, n_elems: int) -> Mesh:
    """Uniform mesh with n_elems + 1 equispaced nodes covering [0, length]."""
    if length <= 0:
        raise ValueError(f"domain length must be positive, got {length}")
    if n_elems < 1:
        raise ValueError(f"need at least one element, got {n_elems}")
    nodes = np.linspace(0.0, float(length), n_elems + 1)
    return Mesh(length=float(length), n_elems=n_elems, nodes=nodes)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Gauss-Legendre rule on the reference element [0, 1].

    Exact for polynomials of degree <= 2 n_points - 1; the weights sum to 1.
    """

    n_points: int
    points: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @classmethod
    def gauss(cls, n_points: int) -> "QuadratureRule":
        if n_points not in (2, 3, 4, 5):
            raise ValueError(f"supported rules have 2..5 points, got {n_points}")
        x, w = np.polynomial.legendre.leggauss(n_points)
        return cls(n_points=n_points, points=0.5 * (x + 1.0), weights=0.5 * w)


@dataclass(frozen=True, eq=False)
class NodalFunction:
    """Continuous piecewise-linear function given by its nodal values."""

    mesh: Mesh
    values: np.ndarray

    def __call__(self, x):
        return np.interp(x, self.mesh.nodes, self.values)

    def derivative_values(self) -> np.ndarray:
        """Per-element (piecewise constant) derivative, shape (n_elems,)."""
        return np.diff(self.values) / self.mesh.h

    def derivative_at(self, x):
        """Derivative evaluated pointwise; at a node, the right-hand element wins."""
        idx = np.clip(
            np.searchsorted(self.mesh.nodes, x, side="right") - 1,
            0,
            self.mesh.n_elems - 1,
        )
        return self.derivative_values()[idx]

    def at_quadrature(self, rule: QuadratureRule) -> np.ndarray:
        """Values at every element quadrature point, shape (n_elems, n_points)."""
        t = rule.points[None, :]
        return self.values[:-1, None] * (1.0 - t) + self.values[1:, None] * t


@dataclass(frozen=True, eq=False)
class TridiagonalSystem:
    """Symmetric-by-assembly tridiagonal system A x = rhs on mesh nodes."""

    mesh: Mesh
    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray


def _coeff_at_points(coeff, pts: np.ndarray, what: str) -> np.ndarray:
    vals = np.broadcast_to(np.asarray(coeff(pts), dtype=float), pts.shape)
    if not np.all(np.isfinite(vals)):
        bad = int(np.argwhere(~np.isfinite(vals))[0][0])
        raise AssemblyError(f"{what} evaluated to a non-finite value on element {bad}")
    return vals


def assemble_stiffness(mesh: Mesh, coeff, rule: QuadratureRule) -> TridiagonalSystem:
    """Stiffness matrix of int coeff u' v' with hat-function basis.

    Entry (i, j) is the per-element Gauss approximation of the integral over
    the shared support of hats i and j; the result is symmetric tridiagonal.
    The rhs is left at zero.
    """
    pts = mesh.element_points(rule)
    cvals = _coeff_at_points(coeff, pts, "stiffness coefficient")
    # per-element integral of coeff divided by h^2 (product of hat slopes),
    # times element length h: one scalar per element
    k = (cvals @ rule.weights) / mesh.h

    n = mesh.n_elems
    diag = np.zeros(n + 1)
    diag[:-1] += k
    diag[1:] += k
    return TridiagonalSystem(
        mesh=mesh, sub=-k.copy(), diag=diag, sup=-k.copy(), rhs=np.zeros(n + 1)
    )


def assemble_load(mesh: Mesh, f, rule: QuadratureRule, beta: float = 0.0) -> np.ndarray:
    """Load vector of int f v dx - beta v(L) against the hat basis."""
    pts = mesh.element_points(rule)
    fvals = _coeff_at_points(f, pts, "load function")
    t = rule.points
    left = mesh.h * (fvals @ (rule.weights * (1.0 - t)))
    right = mesh.h * (fvals @ (rule.weights * t))

    out = np.zeros(mesh.n_elems + 1)
    out[:-1] += left
    out[1:] += right
    out[-1] -= beta
    return out


def assemble_gradient_load(
    mesh: Mesh, weight, w: NodalFunction, rule: QuadratureRule
) -> np.ndarray:
    """Load vector with entries int weight(x) w'(x) v'(x) dx per hat function v.

    w' is the exact piecewise-constant derivative of w, never a difference
    quotient sampled at quadrature points.
    """
    if not w.mesh.same_as(mesh):
        raise ValueError(
            f"nodal function lives on a {w.mesh.n_elems}-element mesh, "
            f"expected {mesh.n_elems} elements"
        )
    pts = mesh.element_points(rule)
    wvals = _coeff_at_points(weight, pts, "gradient-load weight")
    return gradient_load_from_values(mesh, wvals, w, rule)


def gradient_load_from_values(
    mesh: Mesh, weight_values: np.ndarray, w: NodalFunction, rule: QuadratureRule
) -> np.ndarray:
    """assemble_gradient_load with the weight already evaluated at element points."""
    # h * sum_q w_q weight_q gives int_e weight; multiplying by w'_e and the
    # hat slope -+1/h cancels both h factors
    c = (weight_values @ rule.weights) * np.diff(w.values) / mesh.h
    out = np.zeros(mesh.n_elems + 1)
    out[:-1] -= c
    out[1:] += c
    return out


def apply_dirichlet(system: TridiagonalSystem, alpha: float) -> TridiagonalSystem:
    """Pin node 0 to alpha by row replacement.

    Row 0 becomes the identity row with rhs alpha; the coupling of node 1 to
    node 0 is folded into rhs[1] so the remaining block stays symmetric.
    """
    rhs = system.rhs.copy()
    sub = system.sub.copy()
    sup = system.sup.copy()
    diag = system.diag.copy()

    rhs[0] = alpha
    rhs[1] -= sub[0] * alpha
    diag[0] = 1.0
    sup[0] = 0.0
    sub[0] = 0.0
    return replace(system, sub=sub, diag=diag, sup=sup, rhs=rhs)


@dataclass(frozen=True, eq=False)
class TridiagonalFactorization:
    """LU factorization of a tridiagonal matrix (Thomas algorithm, no pivoting).

    Safe here because assembly plus the Dirichlet row yields a positive
    definite system. Back-substitution via solve() may be repeated for many
    right-hand sides.
    """

    mesh: Mesh
    lower: np.ndarray  # multipliers sub[i] / pivot[i]
    pivot: np.ndarray  # modified diagonal
    sup: np.ndarray

    def solve(self, rhs: np.ndarray) -> NodalFunction:
        n = len(self.pivot)
        y = np.empty(n)
        y[0] = rhs[0]
        for i in range(1, n):
            y[i] = rhs[i] - self.lower[i - 1] * y[i - 1]
        x = np.empty(n)
        x[-1] = y[-1] / self.pivot[-1]
        for i in range(n - 2, -1, -1):
            x[i] = (y[i] - self.sup[i] * x[i + 1]) / self.pivot[i]
        return NodalFunction(mesh=self.mesh, values=x)


def factorize(system: TridiagonalSystem) -> TridiagonalFactorization:
    """Forward elimination; raises SingularSystemError on a zero pivot."""
    n = len(system.diag)
    pivot = np.empty(n)
    lower = np.empty(n - 1)
    pivot[0] = system.diag[0]
    for i in range(1, n):
        if pivot[i - 1] == 0.0:
            raise SingularSystemError(f"zero pivot at row {i - 1}")
        lower[i - 1] = system.sub[i - 1] / pivot[i - 1]
        pivot[i] = system.diag[i] - lower[i - 1] * system.sup[i - 1]
    if pivot[-1] == 0.0:
        raise SingularSystemError(f"zero pivot at row {n - 1}")
    return TridiagonalFactorization(
        mesh=system.mesh, lower=lower, pivot=pivot, sup=system.sup.copy()
    )


def solve_tridiagonal(system: TridiagonalSystem) -> NodalFunction:
    """Direct solve of the assembled system by the Thomas algorithm."""
    return factorize(system).solve(system.rhs)


def tridiagonal_matvec(system: TridiagonalSystem, x: np.ndarray) -> np.ndarray:
    """A x for the system's matrix; used for residual checks."""
    y = system.diag * x
    y[:-1] += system.sup * x[1:]
    y[1:] += system.sub * x[:-1]
    return y


def fem_solve(problem, n_elems: int, rule: QuadratureRule) -> NodalFunction:
    """Galerkin solution of the full variable-coefficient problem.

    This is the direct (non-decomposed) reference method: assemble with the
    true coefficient, impose u(0) = alpha, solve once.
    """
    mesh = build_mesh(problem.length, n_elems)
    system = assemble_stiffness(mesh, problem.kappa, rule)
    rhs = assemble_load(mesh, problem.f, rule, beta=problem.beta)
    system = replace(system, rhs=rhs)
    system = apply_dirichlet(system, problem.alpha)
    return solve_tridiagonal(system)

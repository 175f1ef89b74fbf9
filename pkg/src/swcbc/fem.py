"""Piecewise-linear finite-element substrate on uniform 1D meshes.

Provides the hat-function basis machinery shared by every scheme: uniform
meshes, Gauss-Legendre quadrature, tridiagonal mass matrices and solves,
constrained L2 projection, pointwise evaluation, and L2 error norms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded, solve_banded

from .errors import (
    InvalidMesh,
    MissingBoundaryValue,
    OutOfDomain,
    SingularMatrix,
    UnsupportedRule,
)

__all__ = [
    "UniformMesh",
    "NodalField",
    "BoundaryMask",
    "QuadratureRule",
    "TridiagonalMatrix",
    "MassSolver",
    "build_mesh",
    "gauss_rule",
    "assemble_mass_matrix",
    "solve_tridiagonal",
    "l2_project",
    "eval_field",
    "eval_deriv",
    "l2_error",
    "max_node_deviation",
]


@dataclass(frozen=True, eq=False)
class UniformMesh:
    """Uniform partition of [a, b] into N elements with nodes x_i = a + i*h."""

    a: float
    b: float
    n_elements: int
    h: float
    nodes: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.n_elements + 1


def build_mesh(a: float, b: float, n_elements: int) -> UniformMesh:
    """Build a uniform mesh on [a, b] with ``n_elements`` >= 2 elements."""
    if n_elements < 2:
        raise InvalidMesh(f"need at least 2 elements, got {n_elements}")
    if not b > a:
        raise InvalidMesh(f"need b > a, got [{a}, {b}]")
    h = (b - a) / n_elements
    nodes = a + h * np.arange(n_elements + 1)
    # pin the endpoints exactly
    nodes[0], nodes[-1] = a, b
    return UniformMesh(a=float(a), b=float(b), n_elements=int(n_elements), h=h, nodes=nodes)


@dataclass(frozen=True)
class BoundaryMask:
    """Marks which endpoint nodes carry prescribed (non-evolving) values."""

    fix_left: bool = False
    fix_right: bool = False

    @property
    def lo(self) -> int:
        """First unmasked node index."""
        return 1 if self.fix_left else 0

    def hi(self, n_nodes: int) -> int:
        """One past the last unmasked node index."""
        return n_nodes - 1 if self.fix_right else n_nodes


NO_MASK = BoundaryMask(False, False)
MASK_LEFT = BoundaryMask(True, False)
MASK_RIGHT = BoundaryMask(False, True)
MASK_BOTH = BoundaryMask(True, True)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Gauss-Legendre rule on the reference interval [-1, 1]."""

    points: np.ndarray
    weights: np.ndarray
    order: int  # degree of polynomial exactness, 2n-1


def gauss_rule(n: int) -> QuadratureRule:
    """Return the n-point Gauss-Legendre rule (n in {2, 3, 5})."""
    if n not in (2, 3, 5):
        raise UnsupportedRule(f"only 2-, 3- and 5-point rules are provided, got n={n}")
    points, weights = np.polynomial.legendre.leggauss(n)
    return QuadratureRule(points=points, weights=weights, order=2 * n - 1)


@dataclass(frozen=True, eq=False)
class NodalField:
    """Continuous piecewise-linear function as its nodal-value vector."""

    mesh: UniformMesh
    coeffs: np.ndarray

    def __post_init__(self):
        if len(self.coeffs) != self.mesh.n_nodes:
            raise ValueError(
                f"coefficient vector has length {len(self.coeffs)}, "
                f"mesh has {self.mesh.n_nodes} nodes"
            )


@dataclass(frozen=True, eq=False)
class TridiagonalMatrix:
    """Tridiagonal matrix stored as (sub, diag, sup) bands."""

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray

    @property
    def n(self) -> int:
        return len(self.diag)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.diag * x
        y[:-1] += self.sup * x[1:]
        y[1:] += self.sub * x[:-1]
        return y


def assemble_mass_matrix(mesh: UniformMesh, mask: BoundaryMask = NO_MASK) -> TridiagonalMatrix:
    """Gram matrix of the hat basis, restricted to the unmasked nodes.

    Full-space entries are h/3 at the endpoint diagonal, 2h/3 at interior
    diagonals and h/6 off-diagonal; masked rows/columns are removed (the
    remaining basis functions are unchanged).
    """
    h = mesh.h
    n = mesh.n_nodes
    diag = np.full(n, 2.0 * h / 3.0)
    diag[0] = diag[-1] = h / 3.0
    off = np.full(n - 1, h / 6.0)
    lo, hi = mask.lo, mask.hi(n)
    return TridiagonalMatrix(sub=off[lo : hi - 1].copy(), diag=diag[lo:hi].copy(), sup=off[lo : hi - 1].copy())


def solve_tridiagonal(tri: TridiagonalMatrix, rhs: np.ndarray) -> np.ndarray:
    """Solve the tridiagonal system; raises SingularMatrix on breakdown."""
    n = tri.n
    if len(rhs) != n:
        raise ValueError(f"rhs length {len(rhs)} != matrix dimension {n}")
    if n == 1:
        if abs(tri.diag[0]) < 1e-300:
            raise SingularMatrix("pivot below 1e-300")
        return rhs / tri.diag
    ab = np.zeros((3, n))
    ab[0, 1:] = tri.sup
    ab[1, :] = tri.diag
    ab[2, :-1] = tri.sub
    try:
        x = solve_banded((1, 1), ab, rhs, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(str(exc)) from exc
    if not np.all(np.isfinite(x)):
        raise SingularMatrix("elimination produced non-finite entries")
    return x


class MassSolver:
    """Prefactored solver for a fixed SPD mass matrix.

    The mass matrices are constant in time, so the Cholesky factor is
    computed once and reused for every right-hand side of a run.
    """

    def __init__(self, tri: TridiagonalMatrix):
        self.tri = tri
        ab = np.zeros((2, tri.n))
        ab[0, 1:] = tri.sup
        ab[1, :] = tri.diag
        self._factor = cholesky_banded(ab, check_finite=False)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return cho_solve_banded((self._factor, False), rhs, check_finite=False)


def _element_quad_points(mesh: UniformMesh, rule: QuadratureRule) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Quadrature abscissae per element plus the two hat values there.

    Returns (x, phi_left, phi_right) where x has shape (n_elements, n_q) and
    the hat values are the reference shape functions at the rule's points.
    """
    xi = 0.5 * (rule.points + 1.0)  # map [-1,1] -> [0,1]
    x = mesh.nodes[:-1, None] + mesh.h * xi[None, :]
    return x, 1.0 - xi, xi


def _project_rhs(f: Callable, mesh: UniformMesh, rule: QuadratureRule) -> np.ndarray:
    """Load vector (f, phi_i) for every node, by per-element quadrature."""
    x, phi_l, phi_r = _element_quad_points(mesh, rule)
    fx = np.asarray(f(x), dtype=float)
    if fx.shape != x.shape:  # scalar-only callables
        fx = np.broadcast_to(fx, x.shape)
    w = 0.5 * mesh.h * rule.weights
    load = np.zeros(mesh.n_nodes)
    load[:-1] += fx @ (w * phi_l)
    load[1:] += fx @ (w * phi_r)
    return load


def l2_project(
    f: Callable,
    mesh: UniformMesh,
    mask: BoundaryMask = NO_MASK,
    boundary_values: Optional[tuple] = None,
    rule: Optional[QuadratureRule] = None,
) -> NodalField:
    """L2 projection of ``f`` onto the (possibly constrained) hat space.

    With a mask, the masked nodal values are set from ``boundary_values``
    (a (left, right) pair; the irrelevant entry may be None) and the
    orthogonality (f - g, phi_i) = 0 is enforced for every unmasked i by
    lifting the fixed-node contribution to the right-hand side.
    """
    rule = rule or gauss_rule(5)
    n = mesh.n_nodes
    load = _project_rhs(f, mesh, rule)
    coeffs = np.zeros(n)
    lo, hi = mask.lo, mask.hi(n)
    rhs = load[lo:hi].copy()
    if mask.fix_left:
        if boundary_values is None or boundary_values[0] is None:
            raise MissingBoundaryValue("left node is masked but no value was supplied")
        coeffs[0] = boundary_values[0]
        rhs[0] -= (mesh.h / 6.0) * coeffs[0]
    if mask.fix_right:
        if boundary_values is None or boundary_values[1] is None:
            raise MissingBoundaryValue("right node is masked but no value was supplied")
        coeffs[-1] = boundary_values[1]
        rhs[-1] -= (mesh.h / 6.0) * coeffs[-1]
    tri = assemble_mass_matrix(mesh, mask)
    coeffs[lo:hi] = solve_tridiagonal(tri, rhs)
    return NodalField(mesh=mesh, coeffs=coeffs)


def _locate(mesh: UniformMesh, x: float) -> int:
    """Element index containing x; right-closed at the last element."""
    if x < mesh.a - 1e-12 * max(1.0, abs(mesh.a)) or x > mesh.b + 1e-12 * max(1.0, abs(mesh.b)):
        raise OutOfDomain(f"x={x} outside [{mesh.a}, {mesh.b}]")
    j = int((x - mesh.a) // mesh.h)
    return min(max(j, 0), mesh.n_elements - 1)


def eval_field(g: NodalField, x) -> Union[float, np.ndarray]:
    """Evaluate the piecewise-linear function at x (scalar or array)."""
    mesh = g.mesh
    if np.ndim(x) == 0:
        j = _locate(mesh, float(x))
        s = (float(x) - mesh.nodes[j]) / mesh.h
        return (1.0 - s) * g.coeffs[j] + s * g.coeffs[j + 1]
    x = np.asarray(x, dtype=float)
    if x.min() < mesh.a - 1e-12 or x.max() > mesh.b + 1e-12:
        raise OutOfDomain("evaluation points outside the mesh interval")
    return np.interp(x, mesh.nodes, g.coeffs)


def eval_deriv(g: NodalField, x) -> Union[float, np.ndarray]:
    """Element-wise constant slope at x (left-element slope at a node)."""
    mesh = g.mesh
    slopes = np.diff(g.coeffs) / mesh.h
    if np.ndim(x) == 0:
        xf = float(x)
        j = _locate(mesh, xf)
        # exact interior nodes take the left element's slope
        if j > 0 and xf == mesh.nodes[j]:
            j -= 1
        return slopes[j]
    x = np.asarray(x, dtype=float)
    j = np.clip(((x - mesh.a) // mesh.h).astype(int), 0, mesh.n_elements - 1)
    on_node = (x == mesh.nodes[j]) & (j > 0)
    return slopes[np.where(on_node, j - 1, j)]


def l2_error(
    g: Union[NodalField, Callable],
    exact: Callable,
    mesh: Optional[UniformMesh] = None,
    rule: Optional[QuadratureRule] = None,
) -> float:
    """L2 norm of g - exact over the mesh interval, by element quadrature.

    ``g`` may be a NodalField or any callable of x (vectorized); a callable
    requires an explicit mesh.
    """
    rule = rule or gauss_rule(5)
    if isinstance(g, NodalField):
        mesh = g.mesh
        values = lambda x: np.interp(x, mesh.nodes, g.coeffs)
    else:
        if mesh is None:
            raise ValueError("a mesh is required when g is a callable")
        values = g
    x, _, _ = _element_quad_points(mesh, rule)
    diff = np.asarray(values(x), dtype=float) - np.asarray(exact(x), dtype=float)
    w = 0.5 * mesh.h * rule.weights
    return float(np.sqrt(np.sum((diff * diff) @ w)))


def max_node_deviation(g: NodalField, c: float) -> float:
    """max_i |coeffs_i - c|."""
    return float(np.max(np.abs(g.coeffs - c)))

"""Boundary energy of a harmonic polynomial on the surface of a cube.

``E(t)`` integrates ``u²`` over the boundary of ``[-t, t]^dim`` with a
tensor-product Gauss-Legendre rule on each of the ``2*dim`` facets.  For a
harmonic ``u`` the derivative splits exactly as

    E'(t) = 2 ∫_{[-t,t]^dim} |∇u|²  +  2 ∫_{(dim-2)-skeleton} u²

where the skeleton is the union of codimension-2 faces (the four corners
when ``dim == 2``).  :func:`derivative_decomposition` reports both pieces
next to a finite-difference ``E'``.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import NotHarmonic, ParameterOutOfRange
from .polynomial import Polynomial

MAX_DIM = 4
DEFAULT_QUAD_ORDER = 12


@lru_cache(maxsize=None)
def tensor_rule(order: int, dims: int):
    """Gauss-Legendre nodes (N, dims) and weights on ``[-1, 1]^dims``."""
    x, w = np.polynomial.legendre.leggauss(order)
    if dims == 0:
        return np.zeros((1, 0)), np.ones(1)
    nodes = np.array(list(itertools.product(x, repeat=dims)))
    weights = np.array([math.prod(c) for c in itertools.product(w, repeat=dims)])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _check(p: Polynomial, t, quad_order, allow_nonharmonic):
    if not 2 <= p.dim <= MAX_DIM:
        raise ParameterOutOfRange(f"cube energy supports dim 2..{MAX_DIM}, got {p.dim}")
    if not t > 0:
        raise ParameterOutOfRange(f"t must be positive, got {t}")
    if int(quad_order) != quad_order or quad_order < 2:
        raise ParameterOutOfRange(f"quad_order must be an integer >= 2, got {quad_order}")
    if not allow_nonharmonic and not p.is_continuum_harmonic:
        raise NotHarmonic(f"{p} is not harmonic (Laplacian {p.laplacian()})")


def _face_integral(g, dim, t, fixed, quad_order):
    """∫ g over the face where the axes in ``fixed`` (axis → value) are pinned."""
    free = [i for i in range(dim) if i not in fixed]
    nodes, w = tensor_rule(quad_order, len(free))
    pts = np.empty((len(w), dim))
    for axis, val in fixed.items():
        pts[:, axis] = val
    pts[:, free] = t * nodes
    return t ** len(free) * float(w @ g(pts))


def boundary_energy(p: Polynomial, t: float, quad_order: int = DEFAULT_QUAD_ORDER,
                    allow_nonharmonic: bool = False) -> float:
    """∫ u² over the boundary of the cube ``[-t, t]^dim``.

    Exact up to rounding once ``2*quad_order - 1`` reaches the per-axis
    degree of ``u²``.
    """
    _check(p, t, quad_order, allow_nonharmonic)
    sq = lambda pts: p(pts) ** 2  # noqa: E731
    faces = [_face_integral(sq, p.dim, t, {axis: s * t}, quad_order)
             for axis in range(p.dim) for s in (-1.0, 1.0)]
    return math.fsum(faces)


def dirichlet_term(p: Polynomial, t: float, quad_order: int = DEFAULT_QUAD_ORDER) -> float:
    """``2 ∫ |∇u|²`` over the solid cube."""
    grad = p.gradient()
    g = lambda pts: sum(d(pts) ** 2 for d in grad)  # noqa: E731
    return 2.0 * _face_integral(g, p.dim, t, {}, quad_order)


def skeleton_term(p: Polynomial, t: float, quad_order: int = DEFAULT_QUAD_ORDER) -> float:
    """``2 ∫ u²`` over the codimension-2 faces of the cube."""
    sq = lambda pts: p(pts) ** 2  # noqa: E731
    parts = []
    for i, j in itertools.combinations(range(p.dim), 2):
        for si, sj in itertools.product((-1.0, 1.0), repeat=2):
            parts.append(_face_integral(sq, p.dim, t, {i: si * t, j: sj * t}, quad_order))
    return 2.0 * math.fsum(parts)


class DerivativeDecomposition(NamedTuple):
    E_prime_fd: float
    dirichlet_term: float
    skeleton_term: float

    @property
    def predicted(self) -> float:
        return self.dirichlet_term + self.skeleton_term


_STENCILS = {
    3: ((-1, -0.5), (1, 0.5)),
    5: ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12)),
}


def fd_derivative(p: Polynomial, t: float, h: float, quad_order: int = DEFAULT_QUAD_ORDER,
                  stencil: int = 5, allow_nonharmonic: bool = False) -> float:
    """Central finite difference of ``boundary_energy`` at ``t`` with step ``h``.

    ``stencil=3`` is the second-order rule, ``stencil=5`` the fourth-order one.
    """
    if stencil not in _STENCILS:
        raise ParameterOutOfRange(f"stencil must be 3 or 5, got {stencil}")
    reach = max(k for k, _ in _STENCILS[stencil])
    if not (h > 0 and t - reach * h > 0):
        raise ParameterOutOfRange(f"need h > 0 and t - {reach}h > 0, got t={t}, h={h}")
    vals = [c * boundary_energy(p, t + k * h, quad_order, allow_nonharmonic)
            for k, c in _STENCILS[stencil]]
    return math.fsum(vals) / h


def derivative_decomposition(p: Polynomial, t: float, h: float | None = None,
                             quad_order: int = DEFAULT_QUAD_ORDER,
                             stencil: int = 5) -> DerivativeDecomposition:
    """Finite-difference ``E'(t)`` alongside its volume and skeleton parts.

    ``h`` defaults to ``t / 1000``.  The volume term alone falls short of
    ``E'`` by exactly the skeleton term.
    """
    _check(p, t, quad_order, False)
    if h is None:
        h = t / 1000.0
    return DerivativeDecomposition(
        fd_derivative(p, t, h, quad_order, stencil),
        dirichlet_term(p, t, quad_order),
        skeleton_term(p, t, quad_order),
    )


@dataclass
class EnergyCurve:
    t_grid: np.ndarray
    E: np.ndarray
    quad_order: int
    second_diffs: np.ndarray

    def min_second_diff(self) -> float:
        return float(self.second_diffs.min()) if self.second_diffs.size else 0.0

    def is_convex(self, rel_tol: float = 1e-8) -> bool:
        """True when every second difference is ``>= -rel_tol * max|E|``."""
        return self.min_second_diff() >= -rel_tol * float(np.abs(self.E).max())


def energy_curve(p: Polynomial, t_min: float, t_max: float, steps: int,
                 quad_order: int = DEFAULT_QUAD_ORDER,
                 allow_nonharmonic: bool = False) -> EnergyCurve:
    if not (0 < t_min < t_max):
        raise ParameterOutOfRange(f"need 0 < t_min < t_max, got {t_min}, {t_max}")
    if int(steps) != steps or steps < 3:
        raise ParameterOutOfRange(f"steps must be an integer >= 3, got {steps}")
    grid = np.linspace(t_min, t_max, int(steps))
    e = np.array([boundary_energy(p, t, quad_order, allow_nonharmonic) for t in grid])
    second = e[2:] - 2.0 * e[1:-1] + e[:-2]
    return EnergyCurve(grid, e, int(quad_order), second)


CSV_HEADER = ["t", "E", "second_diff", "E_prime_fd", "dirichlet_term", "skeleton_term"]


def curve_rows(p: Polynomial, curve: EnergyCurve, h_rel: float = 1e-3, stencil: int = 5):
    """Rows of the cube-energy CSV; ``second_diff`` is blank at both ends."""
    n = len(curve.t_grid)
    for i, t in enumerate(curve.t_grid):
        sd = repr(float(curve.second_diffs[i - 1])) if 0 < i < n - 1 else ""
        dd = derivative_decomposition(p, float(t), h_rel * float(t), curve.quad_order, stencil)
        yield [repr(float(t)), repr(float(curve.E[i])), sd,
               repr(dd.E_prime_fd), repr(dd.dirichlet_term), repr(dd.skeleton_term)]


def write_curve_csv(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        w.writerows(rows)

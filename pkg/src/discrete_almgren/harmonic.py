"""Discrete harmonic functions: residuals, Dirichlet solves, closed-form fields."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    InconsistentBoundary,
    IoError,
    MissingValue,
    NoConvergence,
    NotDiscreteHarmonic,
    ParameterOutOfRange,
    ParseError,
)
from .generators import gen_tree, lattice_coords, tree_layer_sizes
from .graph import Graph
from .polynomial import Polynomial


@dataclass(eq=False)
class ScalarField:
    """Vertex values plus the set of vertices where harmonicity is claimed.

    ``max_residual`` is NaN until :func:`residual` has run on the field.
    """

    values: np.ndarray
    interior: np.ndarray  # bool mask
    max_residual: float = math.nan
    iterations: int | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        interior = np.asarray(self.interior)
        if interior.dtype != bool:
            mask = np.zeros(len(self.values), dtype=bool)
            mask[interior.astype(np.int64)] = True
            interior = mask
        self.interior = interior

    @classmethod
    def constant(cls, g: Graph, c=1.0, interior=None):
        mask = np.ones(g.vertex_count, dtype=bool) if interior is None else interior
        return cls(np.full(g.vertex_count, float(c)), mask)

    def scaled(self, c):
        return ScalarField(c * self.values, self.interior.copy())

    def shifted(self, c):
        return ScalarField(self.values + c, self.interior.copy())

    def to_json_dict(self):
        mr = None if math.isnan(self.max_residual) else float(self.max_residual)
        return {
            "values": {str(i): float(x) for i, x in enumerate(self.values.tolist())},
            "interior": np.flatnonzero(self.interior).tolist(),
            "max_residual": mr,
        }

    @classmethod
    def from_json_dict(cls, data, vertex_count=None):
        try:
            raw = {int(k): float(v) for k, v in data["values"].items()}
            interior = [int(i) for i in data.get("interior", [])]
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ParseError(f"bad field JSON: {exc}") from None
        n = vertex_count if vertex_count is not None else (max(raw) + 1 if raw else 0)
        values = np.full(n, np.nan)
        for k, v in raw.items():
            if not 0 <= k < n:
                raise MissingValue(f"field has value for unknown vertex {k}")
            values[k] = v
        mask = np.zeros(n, dtype=bool)
        if interior and (min(interior) < 0 or max(interior) >= n):
            raise ParseError("interior lists an unknown vertex")
        mask[interior] = True
        mr = data.get("max_residual")
        return cls(values, mask, math.nan if mr is None else float(mr))


def save_field_json(f: ScalarField, path):
    with open(path, "w") as fh:
        json.dump(f.to_json_dict(), fh)
        fh.write("\n")


def load_field_json(path, vertex_count=None) -> ScalarField:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, path) from None
    return ScalarField.from_json_dict(data, vertex_count)


def _check_field(g: Graph, f: ScalarField):
    if len(f.values) != g.vertex_count:
        raise MissingValue(f"field has {len(f.values)} values for {g.vertex_count} vertices")
    bad = ~np.isfinite(f.values)
    if bad.any():
        raise MissingValue(f"vertex {int(np.flatnonzero(bad)[0])} has no finite value")


def residual(g: Graph, f: ScalarField, backend=None) -> np.ndarray:
    """Weighted Laplacian defect ``Σ_y w_vy (f(y) − f(v))`` at every vertex.

    Also stores the largest ``|r(v)|`` over ``f.interior`` in
    ``f.max_residual``.
    """
    _check_field(g, f)
    r = _kernels.get_kernels(backend).residual(g.indptr, g.indices, g.adj_weights, f.values)
    f.max_residual = float(np.abs(r[f.interior]).max()) if f.interior.any() else 0.0
    return r


def _boundary_arrays(g, boundary):
    if isinstance(boundary, dict):
        ids = np.array(list(boundary.keys()), dtype=np.int64)
        vals = np.array(list(boundary.values()), dtype=np.float64)
    else:
        ids, vals = (np.asarray(a) for a in boundary)
        ids = ids.astype(np.int64)
        vals = vals.astype(np.float64)
    if ids.size == 0:
        raise InconsistentBoundary("boundary is empty")
    bad = (ids < 0) | (ids >= g.vertex_count)
    if bad.any():
        raise InconsistentBoundary(f"boundary references unknown vertex {int(ids[bad][0])}")
    if len(np.unique(ids)) != len(ids):
        raise InconsistentBoundary("boundary lists a vertex twice")
    if not np.isfinite(vals).all():
        raise InconsistentBoundary("boundary values must be finite")
    return ids, vals


def solve_dirichlet(g: Graph, boundary, tol: float = 1e-12, max_iter: int = 10**6,
                    method: str = "cg", backend=None) -> ScalarField:
    """Harmonic extension of ``boundary`` (vertex → value) to the other vertices.

    Parameters
    ----------
    g : Graph
        Connected graph.
    boundary : dict or (ids, values)
        Prescribed values.  Every other vertex is interior.
    tol : float
        Stop once ``max |r(v)| <= tol * (1 + max |f|)`` over interior vertices.
    max_iter : int
        Cap on conjugate-gradient iterations or Gauss-Seidel sweeps.
    method : {"cg", "gauss-seidel"}
        Jacobi-preconditioned conjugate gradient with residual replacement
        restarts, or plain Gauss-Seidel sweeps in ascending vertex order.

    Returns
    -------
    ScalarField
        With ``interior`` set, ``max_residual`` filled and ``iterations``
        recording the work done.
    """
    ids, vals = _boundary_arrays(g, boundary)
    g.require_connected()
    kern = _kernels.get_kernels(backend)
    f = np.zeros(g.vertex_count)
    free = np.ones(g.vertex_count, dtype=bool)
    free[ids] = False
    f[ids] = vals
    f[free] = vals.mean()

    if method == "cg":
        iterations = _solve_cg(g, f, free, tol, max_iter, kern)
    elif method == "gauss-seidel":
        iterations = _solve_gauss_seidel(g, f, free, tol, max_iter, kern)
    else:
        raise ValueError(f"unknown method {method!r}")
    field = ScalarField(f, free, iterations=iterations)
    residual(g, field, backend)
    return field


def _interior_residual(g, f, free, kern):
    r = kern.residual(g.indptr, g.indices, g.adj_weights, f)
    return r[free]


def _solve_cg(g, f, free, tol, max_iter, kern):
    n_free = int(free.sum())
    if n_free == 0:
        return 0
    diag = g.weighted_degree[free]
    full = np.zeros(g.vertex_count)

    def apply(x):
        full[free] = x
        return -kern.residual(g.indptr, g.indices, g.adj_weights, full)[free]

    it = 0
    while True:
        rhs = _interior_residual(g, f, free, kern)
        target = tol * (1.0 + np.abs(f).max())
        res = np.abs(rhs).max()
        if res <= target:
            return it
        if it >= max_iter:
            raise NoConvergence(f"residual {res:.3e} above {target:.3e} after {it} iterations",
                                it, float(res))
        # Solve (-L_II) e = r_I; the outer loop recomputes the true residual.
        e = np.zeros(n_free)
        r = rhs.copy()
        z = r / diag
        p = z.copy()
        rz = r @ z
        inner_target = 0.05 * target
        steps = 0
        budget = min(max_iter - it, 4 * n_free + 20)
        while steps < budget and np.abs(r).max() > inner_target:
            q = apply(p)
            pq = p @ q
            if pq <= 0:
                break
            alpha = rz / pq
            e += alpha * p
            r -= alpha * q
            z = r / diag
            rz_new = r @ z
            p = z + (rz_new / rz) * p
            rz = rz_new
            steps += 1
        f[free] += e
        it += max(steps, 1)


def _solve_gauss_seidel(g, f, free, tol, max_iter, kern, check_every=64):
    it = 0
    while True:
        res = np.abs(_interior_residual(g, f, free, kern)).max(initial=0.0)
        target = tol * (1.0 + np.abs(f).max())
        if res <= target:
            return it
        if it >= max_iter:
            raise NoConvergence(f"residual {res:.3e} above {target:.3e} after {it} sweeps",
                                it, float(res))
        sweeps = min(check_every, max_iter - it)
        kern.gauss_seidel(g.indptr, g.indices, g.adj_weights, f, free, sweeps)
        it += sweeps


def tree_branch_values(depth):
    """The a_k sequence 0, 1, 3/2, 7/4, ... from the closed form 2 − 2^(1−k)."""
    k = np.arange(depth + 1)
    a = 2.0 - np.ldexp(1.0, 1 - k)
    a[0] = 0.0
    return a


def tree_example_field(depth: int):
    """Bounded harmonic function on the cubic tree cut at ``depth``.

    The root and the whole third branch are 0; the first branch carries
    ``a_k`` at distance k and the second branch ``-a_k``.  Harmonicity holds
    at every non-leaf vertex.

    Returns ``(graph, root, field)``.
    """
    if int(depth) != depth or depth < 2:
        raise ParameterOutOfRange(f"tree example needs depth >= 2, got {depth}")
    depth = int(depth)
    g, root = gen_tree(3, depth)
    a = tree_branch_values(depth)
    sizes = tree_layer_sizes(3, depth)
    values = np.zeros(g.vertex_count)
    start = 1
    for k in range(1, depth + 1):
        third = sizes[k] // 3
        values[start:start + third] = a[k]
        values[start + third:start + 2 * third] = -a[k]
        start += sizes[k]
    interior = np.ones(g.vertex_count, dtype=bool)
    interior[g.vertex_count - sizes[depth]:] = False
    return g, root, ScalarField(values, interior)


def lattice_polynomial_field(g: Graph, p: Polynomial) -> ScalarField:
    """Sample ``p`` at the coordinates of a lattice graph.

    ``p`` must have zero lattice Laplacian, which is stricter than being
    harmonic in the continuum (``x^4 - 6x^2y^2 + y^4`` has lattice
    Laplacian 4 on Z^2).

    Raises
    ------
    NotDiscreteHarmonic
        With ``witness`` the first lattice point where the defect is
        nonzero and ``value`` the defect there.
    """
    coords = lattice_coords(g)
    if coords.shape[1] != p.dim:
        raise ParameterOutOfRange(f"polynomial has dim {p.dim}, lattice has dim {coords.shape[1]}")
    defect = p.discrete_laplacian()
    if not defect.is_zero:
        witness, value = None, None
        for pt in coords.tolist():
            v = defect.exact(pt)
            if v != 0:
                witness, value = tuple(pt), v
                break
        raise NotDiscreteHarmonic(
            f"lattice Laplacian of {p} is {defect}"
            + (f"; equals {value} at {witness}" if witness is not None else ""),
            witness, value)
    norm = np.abs(coords).sum(axis=1)
    radius = g.truncated_at if g.truncated_at is not None else int(norm.max())
    return ScalarField(p(coords.astype(np.float64)), norm < radius)

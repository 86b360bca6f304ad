"""Seeded randomized checks shared by the CLI ``verify --suite`` and the tests."""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .almgren import DEFAULT_TOL_MONO, frequency_series, layer_energies, verify_monotone
from .errors import EmptyHorizon
from .generators import random_connected_graph
from .graph import build_graph, layer_decompose
from .harmonic import ScalarField, residual, solve_dirichlet


@dataclass
class SuiteResult:
    name: str
    count: int
    violations: int
    worst_min_N: float
    worst_min_increment: float
    max_residual: float
    max_flow_balance_error: float
    empty_horizons: int
    total_checked_k: int

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def as_dict(self):
        d = asdict(self)
        d["pass"] = self.passed
        return d


def random_dirichlet_case(rng, max_vertices=60, min_vertices=8, tol=1e-12):
    """One random weighted graph with a harmonic field fixed on its outer layer.

    Returns ``(graph, decomposition, field)``.
    """
    n = int(rng.integers(min_vertices, max_vertices + 1))
    g = random_connected_graph(n, rng)
    base = int(rng.integers(0, n))
    dec = layer_decompose(g, base)
    outer = dec.layer(dec.last_layer)
    values = rng.uniform(-1.0, 1.0, size=len(outer)) * 10.0 ** rng.uniform(-2, 2)
    f = solve_dirichlet(g, (outer, values), tol=tol)
    return g, dec, f


def monotonicity_suite(count=200, seed=0, max_vertices=60, tol=1e-12,
                          tol_mono=DEFAULT_TOL_MONO) -> SuiteResult:
    """Solve Dirichlet problems on random graphs and check N >= 0, N nondecreasing."""
    rng = np.random.default_rng(seed)
    violations = empty = checked = 0
    worst_n = worst_d = np.inf
    max_res = max_flow = 0.0
    for _ in range(count):
        g, dec, f = random_dirichlet_case(rng, max_vertices, tol=tol)
        max_res = max(max_res, f.max_residual / (1.0 + np.abs(f.values).max()))
        max_flow = max(max_flow, dec.flow_balance_error())
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", EmptyHorizon)
            s = frequency_series(dec, f, tol_mono)
        if s.horizon < 0:
            empty += 1
            continue
        rep = verify_monotone(s)
        checked += s.horizon + 1
        violations += not rep.passed
        scale = 1.0 + s.energy_scale
        worst_n = min(worst_n, rep.min_N / scale)
        if rep.min_increment is not None:
            worst_d = min(worst_d, rep.min_increment / scale)
    return SuiteResult("random-dirichlet", count, violations, float(worst_n), float(worst_d),
                       float(max_res), float(max_flow), empty, checked)


def random_star(rng, unit_weights=False):
    """Star with a harmonic center: its value is the weighted mean of the leaves."""
    m = int(rng.integers(1, 21))
    w = np.ones(m) if unit_weights else rng.uniform(0.1, 10.0, size=m)
    g = build_graph([(0, i + 1, float(w[i])) for i in range(m)])
    leaves = rng.normal(size=m) * 10.0 ** rng.uniform(-2, 2)
    center = float(np.dot(w, leaves) / w.sum())
    interior = np.zeros(m + 1, dtype=bool)
    interior[0] = True
    return g, ScalarField(np.concatenate([[center], leaves]), interior)


def star_suite(count=1000, seed=0, floor=1e-12) -> SuiteResult:
    """N(0) on random stars; half unit-weight, half weighted."""
    rng = np.random.default_rng(seed)
    violations = 0
    worst = np.inf
    max_res = 0.0
    for i in range(count):
        g, f = random_star(rng, unit_weights=i % 2 == 0)
        residual(g, f)
        max_res = max(max_res, f.max_residual)
        dec = layer_decompose(g, 0)
        s_in, s_out = layer_energies(dec, f)
        n0 = s_in[1] - s_out[0]
        worst = min(worst, n0)
        violations += int(n0 < -floor)
    return SuiteResult("star-n0", count, violations, float(worst), float("nan"),
                       float(max_res), 0.0, 0, count)

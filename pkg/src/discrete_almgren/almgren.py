"""Layer energies, the discrete frequency N(k), and doubling bounds.

For a base vertex ``x`` and a field ``u`` the layer energies are

    S_in(k)  = Σ_{d(x,y)=k} d_in(y)  u(y)²
    S_out(k) = Σ_{d(x,y)=k} d_out(y) u(y)²

and the frequency is ``N(k) = S_in(k+1) − S_out(k)``.  For harmonic ``u``
it is nonnegative and nondecreasing in ``k``.  Per-layer sums are
correctly rounded (Shewchuk / ``math.fsum``), so they do not depend on the
order in which a layer is traversed.
"""

from __future__ import annotations

import csv
import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import EmptyHorizon, MissingValue, RangeOutOfBounds
from .graph import LayerDecomposition
from .harmonic import ScalarField

DEFAULT_TOL_MONO = 1e-8


def _check(dec, f):
    if len(f.values) != dec.graph.vertex_count:
        raise MissingValue(f"field has {len(f.values)} values for {dec.graph.vertex_count} vertices")
    if not np.isfinite(f.values).all():
        raise MissingValue("field has non-finite values")


def layer_energies(dec: LayerDecomposition, f: ScalarField, backend=None):
    """Per-layer ``(S_in, S_out)`` arrays, one entry per distance layer."""
    _check(dec, f)
    kern = _kernels.get_kernels(backend)
    sq = f.values * f.values
    s_in = kern.layer_fsum(dec.d_in * sq, dec.order, dec.layer_ptr)
    s_out = kern.layer_fsum(dec.d_out * sq, dec.order, dec.layer_ptr)
    return s_in, s_out


def lateral_energy(dec: LayerDecomposition, f: ScalarField, k: int) -> float:
    """Σ w (u(a) − u(b))² over edges inside layer ``k``; never negative."""
    pairs, w = dec.lateral_edges(k)
    diff = f.values[pairs[:, 0]] - f.values[pairs[:, 1]]
    return math.fsum((w * diff * diff).tolist())


@dataclass
class FrequencySeries:
    base: int
    S_in: np.ndarray
    S_out: np.ndarray
    N: np.ndarray
    horizon: int
    energy_scale: float
    tol_mono: float = DEFAULT_TOL_MONO

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.N)

    @property
    def threshold(self) -> float:
        return self.tol_mono * (1.0 + self.energy_scale)

    def rows(self):
        """CSV rows ``k, S_in_k, S_out_k, N_k, dN_k`` over the horizon."""
        for k in range(self.horizon + 1):
            dn = "" if k == 0 else _fmt(self.N[k] - self.N[k - 1])
            yield [k, _fmt(self.S_in[k]), _fmt(self.S_out[k]), _fmt(self.N[k]), dn]


def _fmt(x):
    return repr(float(x))


def validity_horizon(dec: LayerDecomposition, f: ScalarField) -> int:
    """Largest K with layers 0..K+1 all interior and K+1 short of the cut.

    Returns -1 when no K qualifies.
    """
    last = dec.last_layer
    outside = ~f.interior
    first_bad = int(dec.dist[outside].min()) if outside.any() else last + 1
    k = min(first_bad - 2, last - 1)
    if dec.truncated:
        k = min(k, last - 2)
    return max(k, -1)


def frequency_series(dec: LayerDecomposition, f: ScalarField,
                     tol_mono: float = DEFAULT_TOL_MONO, backend=None) -> FrequencySeries:
    """N(k) over the validity horizon.

    An empty horizon is reported with an :class:`EmptyHorizon` warning and a
    series with ``horizon == -1``.
    """
    s_in, s_out = layer_energies(dec, f, backend)
    horizon = validity_horizon(dec, f)
    if horizon < 0:
        warnings.warn("no layer satisfies the harmonicity and completeness hypotheses",
                      EmptyHorizon, stacklevel=2)
        return FrequencySeries(dec.base, s_in, s_out, np.empty(0), -1, 0.0, tol_mono)
    n = s_in[1:horizon + 2] - s_out[:horizon + 1]
    scale = float(s_in[:horizon + 2].max())
    return FrequencySeries(dec.base, s_in, s_out, n, horizon, scale, tol_mono)


@dataclass
class MonotonicityReport:
    passed: bool
    min_N: float | None
    argmin_N: int | None
    min_increment: float | None
    argmin_increment: int | None
    threshold: float

    def as_dict(self):
        return {
            "min_N": self.min_N,
            "argmin_N": self.argmin_N,
            "min_increment": self.min_increment,
            "argmin_increment": self.argmin_increment,
            "threshold": self.threshold,
        }


def verify_monotone(s: FrequencySeries) -> MonotonicityReport:
    """Check ``N(k) >= -thr`` and ``N(k+1) - N(k) >= -thr`` over the horizon.

    ``argmin_increment`` is the k of the worst ``N(k+1) − N(k)``.  An empty
    series passes vacuously.
    """
    thr = s.threshold
    n = np.asarray(s.N, dtype=np.float64)
    if n.size == 0:
        return MonotonicityReport(True, None, None, None, None, thr)
    i = int(np.argmin(n))
    min_n = float(n[i])
    ok = min_n >= -thr
    d = np.diff(n)
    if d.size:
        # last index on ties: a vanishing gap is reported where it is smallest
        j = int(d.size - 1 - np.argmin(d[::-1]))
        min_d = float(d[j])
        ok = ok and min_d >= -thr
    else:
        j, min_d = None, None
    return MonotonicityReport(bool(ok), min_n, i, min_d, j, thr)


class Region(enum.Enum):
    EXPANSIVE = "Expansive"
    CONTRACTIVE = "Contractive"
    BOTH = "Both"
    NEITHER = "Neither"

    def __str__(self):
        return self.value


def classify_region(dec: LayerDecomposition, a: int, b: int) -> Region:
    """Compare d_out with d_in on every vertex at distance a..b from the base.

    Vertices with ``d_out == d_in`` count toward both classes.
    """
    if not (0 <= a <= b <= dec.last_reliable_layer):
        raise RangeOutOfBounds(
            f"need 0 <= a <= b <= {dec.last_reliable_layer}, got a={a}, b={b}")
    vs = dec.order[dec.layer_ptr[a]:dec.layer_ptr[b + 1]]
    d_in, d_out = dec.d_in[vs], dec.d_out[vs]
    expansive = bool((d_out >= d_in).all())
    contractive = bool((d_out <= d_in).all())
    if expansive and contractive:
        return Region.BOTH
    if expansive:
        return Region.EXPANSIVE
    if contractive:
        return Region.CONTRACTIVE
    return Region.NEITHER


@dataclass
class DoublingReport:
    a: int
    b: int
    classification: Region
    lhs: float
    lower_bound: float
    upper_bound: float
    lower_holds: bool | None
    upper_holds: bool | None
    telescoped: float

    @property
    def passed(self) -> bool:
        return self.lower_holds is not False and self.upper_holds is not False

    def as_dict(self):
        return {
            "a": self.a,
            "b": self.b,
            "classification": self.classification.value,
            "lhs": self.lhs,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "lower_holds": self.lower_holds,
            "upper_holds": self.upper_holds,
            "telescoped": self.telescoped,
        }


def doubling_check(dec: LayerDecomposition, f: ScalarField, s: FrequencySeries,
                   a: int, b: int) -> DoublingReport:
    """Evaluate the additive growth bounds between layers ``a`` and ``b + 1``.

    The lower bound ``(b−a+1) N(a) + S_out(a)`` is asserted only on
    expansive ranges and the upper bound ``(b−a+1) N(b) + S_out(a)`` only on
    contractive ones; the other is reported with ``*_holds = None``.
    """
    if not (0 <= a <= b <= s.horizon):
        raise RangeOutOfBounds(f"need 0 <= a <= b <= horizon {s.horizon}, got a={a}, b={b}")
    _check(dec, f)
    region = classify_region(dec, a, b)
    ys = dec.layer(b + 1)
    u = f.values[ys]
    lhs = math.fsum((dec.d_in[ys] * u * u).tolist())
    span = b - a + 1
    lower = span * float(s.N[a]) + float(s.S_out[a])
    upper = span * float(s.N[b]) + float(s.S_out[a])
    thr = s.threshold
    lower_holds = bool(lhs >= lower - thr) if region in (Region.EXPANSIVE, Region.BOTH) else None
    upper_holds = bool(lhs <= upper + thr) if region in (Region.CONTRACTIVE, Region.BOTH) else None
    telescoped = math.fsum(s.N[a:b + 1].tolist())
    return DoublingReport(a, b, region, lhs, lower, upper, lower_holds, upper_holds, telescoped)


CSV_HEADER = ["k", "S_in_k", "S_out_k", "N_k", "dN_k"]


def write_frequency_csv(s: FrequencySeries, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        w.writerows(s.rows())

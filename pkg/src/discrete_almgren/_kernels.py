"""Hot inner loops over CSR adjacency arrays.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy
version.  Both produce bit-identical results (same summation order), so
the backend is a speed choice only.  The numpy path is selected when
numba is missing or when ``DISCRETE_ALMGREN_DISABLE_NUMBA`` is set to a
truthy value before import.

The Gauss-Seidel sweep is inherently sequential; its fallback is the
same loop run by the interpreter.
"""

import math
import os
from types import SimpleNamespace

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is an optional accelerator
    numba = None

_flag = os.environ.get("DISCRETE_ALMGREN_DISABLE_NUMBA", "").strip().lower()
NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and _flag not in {"1", "true", "yes", "on"}
BACKEND = "numba" if USE_NUMBA else "numpy"


def _expand_ranges(starts, counts):
    """Concatenate ``arange(s, s + c)`` for every pair, vectorized."""
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    offsets = np.cumsum(counts) - counts
    return np.repeat(starts - offsets, counts) + np.arange(total, dtype=np.int64)


def row_sources(indptr):
    """Source vertex of every CSR slot."""
    n = len(indptr) - 1
    return np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def _bfs_numpy(indptr, indices, base):
    n = len(indptr) - 1
    dist = np.full(n, -1, dtype=np.int64)
    dist[base] = 0
    slot = np.empty(n, dtype=np.int64)
    frontier = np.array([base], dtype=np.int64)
    k = 0
    while frontier.size:
        starts = indptr[frontier]
        nbrs = indices[_expand_ranges(starts, indptr[frontier + 1] - starts)]
        nbrs = nbrs[dist[nbrs] < 0]
        # dedupe without sorting: keep the last listing of each vertex
        slot[nbrs] = np.arange(nbrs.size)
        nbrs = nbrs[slot[nbrs] == np.arange(nbrs.size)]
        k += 1
        dist[nbrs] = k
        frontier = nbrs
    return dist


def _classify_numpy(indptr, indices, weights, dist):
    n = len(indptr) - 1
    src = row_sources(indptr)
    # bin 3v + (step + 1): in, lateral, out; bincount keeps slot order per bin
    key = 3 * src + (dist[indices] - dist[src] + 1)
    sums = np.bincount(key, weights=weights, minlength=3 * n).reshape(n, 3)
    return sums[:, 0].copy(), sums[:, 2].copy(), sums[:, 1].copy()


def _residual_numpy(indptr, indices, weights, f):
    src = row_sources(indptr)
    return np.bincount(src, weights=weights * (f[indices] - f[src]),
                       minlength=len(indptr) - 1)


def _layer_order_numpy(dist, n_layers):
    counts = np.bincount(dist, minlength=n_layers)
    ptr = np.zeros(n_layers + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    small = dist.astype(np.int32) if n_layers < 2**31 else dist
    return np.argsort(small, kind="stable").astype(np.int64), ptr


def _layer_fsum_numpy(values, order, ptr):
    out = np.zeros(len(ptr) - 1)
    for k in range(len(ptr) - 1):
        out[k] = math.fsum(values[order[ptr[k]:ptr[k + 1]]].tolist())
    return out


# ---------------------------------------------------------------------------
# loop implementations (compiled by numba when available)
# ---------------------------------------------------------------------------

def _bfs_loop(indptr, indices, base):
    n = len(indptr) - 1
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    dist[base] = 0
    queue[0] = base
    head = 0
    tail = 1
    while head < tail:
        v = queue[head]
        head += 1
        for p in range(indptr[v], indptr[v + 1]):
            y = indices[p]
            if dist[y] < 0:
                dist[y] = dist[v] + 1
                queue[tail] = y
                tail += 1
    return dist


def _classify_loop(indptr, indices, weights, dist):
    n = len(indptr) - 1
    d_in = np.zeros(n)
    d_out = np.zeros(n)
    d_lat = np.zeros(n)
    for v in range(n):
        dv = dist[v]
        for p in range(indptr[v], indptr[v + 1]):
            s = dist[indices[p]] - dv
            if s == -1:
                d_in[v] += weights[p]
            elif s == 1:
                d_out[v] += weights[p]
            elif s == 0:
                d_lat[v] += weights[p]
    return d_in, d_out, d_lat


def _residual_loop(indptr, indices, weights, f):
    n = len(indptr) - 1
    r = np.zeros(n)
    for v in range(n):
        acc = 0.0
        fv = f[v]
        for p in range(indptr[v], indptr[v + 1]):
            acc += weights[p] * (f[indices[p]] - fv)
        r[v] = acc
    return r


def _layer_order_loop(dist, n_layers):
    ptr = np.zeros(n_layers + 1, dtype=np.int64)
    for v in range(len(dist)):
        ptr[dist[v] + 1] += 1
    for k in range(n_layers):
        ptr[k + 1] += ptr[k]
    fill = ptr[:-1].copy()
    order = np.empty(len(dist), dtype=np.int64)
    for v in range(len(dist)):
        k = dist[v]
        order[fill[k]] = v
        fill[k] += 1
    return order, ptr


def _fsum_loop(x):
    # Shewchuk partials with the round-half-even fixup used by math.fsum.
    partials = np.empty(128)
    m = 0
    for i in range(len(x)):
        xv = x[i]
        j = 0
        for q in range(m):
            y = partials[q]
            if abs(xv) < abs(y):
                xv, y = y, xv
            hi = xv + y
            lo = y - (hi - xv)
            if lo != 0.0:
                partials[j] = lo
                j += 1
            xv = hi
        partials[j] = xv
        m = j + 1
    if m == 0:
        return 0.0
    n = m - 1
    hi = partials[n]
    lo = 0.0
    while n > 0:
        xv = hi
        n -= 1
        y = partials[n]
        hi = xv + y
        yr = hi - xv
        lo = y - yr
        if lo != 0.0:
            break
    if n > 0 and ((lo < 0.0 and partials[n - 1] < 0.0) or
                  (lo > 0.0 and partials[n - 1] > 0.0)):
        y = lo * 2.0
        xv = hi + y
        yr = xv - hi
        if y == yr:
            hi = xv
    return hi


def _layer_fsum_loop(values, order, ptr):
    out = np.zeros(len(ptr) - 1)
    for k in range(len(ptr) - 1):
        out[k] = _fsum_loop(values[order[ptr[k]:ptr[k + 1]]])
    return out


def _gauss_seidel_loop(indptr, indices, weights, f, free, sweeps):
    n = len(indptr) - 1
    for _ in range(sweeps):
        for v in range(n):
            if not free[v]:
                continue
            num = 0.0
            den = 0.0
            for p in range(indptr[v], indptr[v + 1]):
                num += weights[p] * f[indices[p]]
                den += weights[p]
            f[v] = num / den


numpy_kernels = SimpleNamespace(
    name="numpy",
    bfs_distances=_bfs_numpy,
    classify_degrees=_classify_numpy,
    residual=_residual_numpy,
    layer_order=_layer_order_numpy,
    layer_fsum=_layer_fsum_numpy,
    gauss_seidel=_gauss_seidel_loop,
)

if NUMBA_AVAILABLE:
    _jit = numba.njit(cache=True, nogil=True)
    _fsum_loop = _jit(_fsum_loop)
    numba_kernels = SimpleNamespace(
        name="numba",
        bfs_distances=_jit(_bfs_loop),
        classify_degrees=_jit(_classify_loop),
        residual=_jit(_residual_loop),
        layer_order=_jit(_layer_order_loop),
        layer_fsum=_jit(_layer_fsum_loop),
        gauss_seidel=_jit(_gauss_seidel_loop),
    )
else:  # pragma: no cover
    numba_kernels = None

kernels = numba_kernels if USE_NUMBA else numpy_kernels


def get_kernels(name=None):
    """Return the kernel namespace for ``name`` ("numba" or "numpy")."""
    if name is None:
        return kernels
    if name == "numba":
        if numba_kernels is None:
            raise RuntimeError("numba is not installed")
        return numba_kernels
    if name == "numpy":
        return numpy_kernels
    raise ValueError(f"unknown backend {name!r}")

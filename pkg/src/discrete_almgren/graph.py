"""Weighted undirected graphs and breadth-first layer decompositions.

A :class:`Graph` stores its edges once (``u < v``) and a CSR adjacency with
rows sorted by neighbor id.  Distances are hop counts; weights only enter
through the in/out/lateral degrees of :class:`LayerDecomposition`.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import (
    Disconnected,
    DuplicateEdge,
    EmptyGraph,
    InvalidVertex,
    IoError,
    NonPositiveWeight,
    ParseError,
    SelfLoopDropped,
)


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable weighted graph over vertices ``0 .. vertex_count - 1``.

    ``truncated_at`` is set by the family generators: the graph is a finite
    piece of an infinite graph, cut at that distance from ``center``.
    """

    vertex_count: int
    edges: np.ndarray  # (m, 2) int64, u < v, sorted
    weights: np.ndarray  # (m,) float64
    indptr: np.ndarray
    indices: np.ndarray
    adj_weights: np.ndarray
    labels: dict | None = None
    truncated_at: int | None = None
    center: int | None = None
    coords: np.ndarray | None = field(default=None, repr=False)
    notes: tuple = field(default=(), repr=False)

    @property
    def edge_count(self) -> int:
        return len(self.weights)

    def check_vertex(self, v) -> int:
        v = int(v)
        if not 0 <= v < self.vertex_count:
            raise InvalidVertex(f"vertex {v} not in graph with {self.vertex_count} vertices")
        return v

    def neighbors(self, v):
        """Neighbor ids and edge weights of ``v`` as two arrays."""
        v = self.check_vertex(v)
        a, b = self.indptr[v], self.indptr[v + 1]
        return self.indices[a:b], self.adj_weights[a:b]

    def adjacency(self, v) -> list[tuple[int, float]]:
        nbrs, w = self.neighbors(v)
        return list(zip(nbrs.tolist(), w.tolist()))

    @cached_property
    def weighted_degree(self) -> np.ndarray:
        return np.bincount(_kernels.row_sources(self.indptr), weights=self.adj_weights,
                           minlength=self.vertex_count)

    def is_connected(self) -> bool:
        if self.vertex_count == 0:
            return False
        dist = _kernels.kernels.bfs_distances(self.indptr, self.indices, 0)
        return bool((dist >= 0).all())

    def require_connected(self):
        if not self.is_connected():
            raise Disconnected("graph is not connected")

    def to_json_dict(self) -> dict:
        out = {
            "vertex_count": self.vertex_count,
            "edges": [[int(u), int(v), float(w)]
                      for (u, v), w in zip(self.edges.tolist(), self.weights.tolist())],
        }
        if self.labels:
            out["labels"] = {str(k): v for k, v in sorted(self.labels.items())}
        if self.truncated_at is not None:
            out["truncated_at"] = self.truncated_at
            out["center"] = self.center
        return out


def _from_arrays(vertex_count, u, v, w, *, labels=None, truncated_at=None,
                 center=None, coords=None, notes=()):
    """Assemble a Graph from validated edge arrays (``u < v``, no duplicates)."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    w = np.asarray(w, dtype=np.float64)
    order = np.lexsort((v, u))
    u, v, w = u[order], v[order], w[order]
    src = np.concatenate([u, v])
    dst = np.concatenate([v, u])
    ww = np.concatenate([w, w])
    adj_order = np.lexsort((dst, src))
    counts = np.bincount(src, minlength=vertex_count)
    indptr = np.zeros(vertex_count + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return Graph(
        vertex_count=int(vertex_count),
        edges=np.stack([u, v], axis=1),
        weights=w,
        indptr=indptr,
        indices=dst[adj_order],
        adj_weights=ww[adj_order],
        labels=labels,
        truncated_at=truncated_at,
        center=center,
        coords=coords,
        notes=tuple(notes),
    )


def build_graph(edge_list, vertex_count=None, labels=None) -> Graph:
    """Validate an edge list of ``(u, v)`` or ``(u, v, w)`` tuples.

    Self-loops are dropped with a :class:`SelfLoopDropped` warning; they
    never affect harmonicity.  ``vertex_count`` defaults to one more than
    the largest id seen.

    Raises
    ------
    NonPositiveWeight, DuplicateEdge, EmptyGraph, InvalidVertex
    """
    rows = [tuple(e) for e in edge_list]
    if rows and any(len(r) not in (2, 3) for r in rows):
        raise ValueError("edges must be (u, v) or (u, v, w)")
    u = np.array([r[0] for r in rows], dtype=np.int64)
    v = np.array([r[1] for r in rows], dtype=np.int64)
    w = np.array([r[2] if len(r) == 3 else 1.0 for r in rows], dtype=np.float64)
    if len(rows) and (u.min() < 0 or v.min() < 0):
        raise InvalidVertex("vertex ids must be nonnegative integers")
    bad = ~(w > 0) | ~np.isfinite(w)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise NonPositiveWeight(f"edge ({u[i]}, {v[i]}) has weight {w[i]!r}; weights must be > 0")

    seen_max = int(max(u.max(initial=-1), v.max(initial=-1)))
    if vertex_count is None:
        vertex_count = seen_max + 1
    elif seen_max >= vertex_count:
        raise InvalidVertex(f"vertex {seen_max} exceeds vertex_count {vertex_count}")
    if vertex_count <= 0:
        raise EmptyGraph("graph has no vertices")

    notes = []
    loops = u == v
    if loops.any():
        msg = f"dropped {int(loops.sum())} self-loop(s) at vertices {sorted(set(u[loops].tolist()))}"
        warnings.warn(msg, SelfLoopDropped, stacklevel=2)
        notes.append(msg)
        u, v, w = u[~loops], v[~loops], w[~loops]

    lo, hi = np.minimum(u, v), np.maximum(u, v)
    if len(lo):
        key = lo * (vertex_count + 1) + hi
        uniq, first, counts = np.unique(key, return_index=True, return_counts=True)
        if (counts > 1).any():
            i = first[np.flatnonzero(counts > 1)[0]]
            raise DuplicateEdge(f"edge ({lo[i]}, {hi[i]}) appears more than once")
    return _from_arrays(vertex_count, lo, hi, w, labels=labels, notes=notes)


def load_edge_list(path) -> Graph:
    """Read the ``u v [w]`` text format; ``#`` lines and blank lines are skipped."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc
    return build_graph(parse_edge_list(text, path=path))


def parse_edge_list(text, path=None):
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ParseError(f"expected 'u v [w]', got {raw!r}", lineno, path)
        try:
            a, b = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise ParseError(f"cannot parse {raw!r}", lineno, path) from None
        if a < 0 or b < 0:
            raise ParseError(f"negative vertex id in {raw!r}", lineno, path)
        if not math.isfinite(w):
            raise ParseError(f"non-finite weight in {raw!r}", lineno, path)
        edges.append((a, b, w))
    return edges


def graph_from_json_dict(data) -> Graph:
    try:
        n = int(data["vertex_count"])
        edges = [tuple(e) for e in data["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad graph JSON: {exc}") from None
    labels = data.get("labels")
    if labels is not None:
        labels = {int(k): str(s) for k, s in labels.items()}
    g = build_graph(edges, vertex_count=n, labels=labels)
    if data.get("truncated_at") is not None:
        g = replace(g, truncated_at=int(data["truncated_at"]),
                    center=int(data.get("center") or 0))
    return g


def save_graph_json(g: Graph, path):
    with open(path, "w") as fh:
        json.dump(g.to_json_dict(), fh)
        fh.write("\n")


def load_graph_json(path) -> Graph:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, path) from None
    return graph_from_json_dict(data)


@dataclass(frozen=True, eq=False)
class LayerDecomposition:
    """Distance layers from ``base`` with weighted in/out/lateral degrees.

    ``layers[k]`` holds the ids at hop distance ``k``, ascending.
    ``truncated`` marks the outermost layer as a cut of an infinite family,
    so its ``d_out`` values say nothing about the infinite graph.
    """

    graph: Graph
    base: int
    dist: np.ndarray
    order: np.ndarray  # vertices sorted by (dist, id)
    layer_ptr: np.ndarray
    d_in: np.ndarray
    d_out: np.ndarray
    d_lat: np.ndarray
    truncated: bool

    @property
    def n_layers(self) -> int:
        return len(self.layer_ptr) - 1

    @property
    def last_layer(self) -> int:
        return self.n_layers - 1

    @property
    def last_reliable_layer(self) -> int:
        """Largest k whose ``d_out`` values are trustworthy."""
        return self.last_layer - 1 if self.truncated else self.last_layer

    def layer(self, k) -> np.ndarray:
        return self.order[self.layer_ptr[k]:self.layer_ptr[k + 1]]

    @cached_property
    def layers(self) -> list[np.ndarray]:
        return [self.layer(k) for k in range(self.n_layers)]

    @property
    def layer_sizes(self) -> list[int]:
        return np.diff(self.layer_ptr).tolist()

    @cached_property
    def _oriented_edges(self):
        e = self.graph.edges
        du, dv = self.dist[e[:, 0]], self.dist[e[:, 1]]
        inter = np.abs(du - dv) == 1
        a, b = e[inter, 0], e[inter, 1]
        swap = du[inter] > dv[inter]
        inner = np.where(swap, b, a)
        outer = np.where(swap, a, b)
        k = self.dist[inner]
        order = np.argsort(k, kind="stable")
        ptr = np.searchsorted(k[order], np.arange(self.n_layers + 1))
        return (np.stack([inner[order], outer[order]], axis=1),
                self.graph.weights[inter][order], ptr)

    def interlayer_edges(self, k):
        """Edges of E_k as ``(pairs, weights)``; ``pairs[:, 0]`` lies in V_k."""
        pairs, w, ptr = self._oriented_edges
        return pairs[ptr[k]:ptr[k + 1]], w[ptr[k]:ptr[k + 1]]

    def lateral_edges(self, k):
        """Edges with both ends in V_k as ``(pairs, weights)``."""
        e = self.graph.edges
        m = (self.dist[e[:, 0]] == k) & (self.dist[e[:, 1]] == k)
        return e[m], self.graph.weights[m]

    def flow_balance_error(self) -> float:
        """Largest relative mismatch between Σ d_out over V_k and Σ d_in over V_{k+1}."""
        worst = 0.0
        for k in range(self.n_layers - 1):
            out_k = math.fsum(self.d_out[self.layer(k)].tolist())
            in_k1 = math.fsum(self.d_in[self.layer(k + 1)].tolist())
            worst = max(worst, abs(out_k - in_k1) / max(abs(out_k), abs(in_k1), 1e-300))
        return worst


def layer_decompose(g: Graph, base: int = 0, backend=None) -> LayerDecomposition:
    """Breadth-first layering of ``g`` from ``base``.

    Raises
    ------
    InvalidVertex
        ``base`` is not a vertex of ``g``.
    Disconnected
        Some vertex is unreachable from ``base``.
    """
    base = g.check_vertex(base)
    kern = _kernels.get_kernels(backend)
    dist = kern.bfs_distances(g.indptr, g.indices, base)
    if (dist < 0).any():
        missing = int(np.flatnonzero(dist < 0)[0])
        raise Disconnected(f"vertex {missing} is unreachable from base {base}")
    n_layers = int(dist.max()) + 1
    order, ptr = kern.layer_order(dist, n_layers)
    d_in, d_out, d_lat = kern.classify_degrees(g.indptr, g.indices, g.adj_weights, dist)
    return LayerDecomposition(
        graph=g,
        base=base,
        dist=dist,
        order=order,
        layer_ptr=ptr,
        d_in=d_in,
        d_out=d_out,
        d_lat=d_lat,
        truncated=g.truncated_at is not None,
    )

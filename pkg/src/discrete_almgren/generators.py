"""Finite truncations of regular trees and ℓ¹ lattices, plus random test graphs.

Vertex ids are assigned in breadth-first order from the root / origin, so
``layer_decompose`` at vertex 0 lists each layer as a contiguous id range.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import ParameterOutOfRange, SizeLimit
from .graph import Graph, _from_arrays, build_graph

MAX_VERTICES = 20_000_000


def tree_layer_sizes(degree, depth):
    return [1] + [degree * (degree - 1) ** (k - 1) for k in range(1, depth + 1)]


def gen_tree(degree: int, depth: int, max_vertices: int = MAX_VERTICES):
    """Regular tree of the given degree, cut at distance ``depth`` from the root.

    Returns ``(graph, root)`` with ``root == 0``.  The CSR arrays are written
    directly because the structure is known; a depth-20 cubic tree has about
    three million vertices.
    """
    if int(degree) != degree or int(depth) != depth or degree < 2 or depth < 1:
        raise ParameterOutOfRange(f"gen_tree needs degree >= 2 and depth >= 1, got {degree}, {depth}")
    degree, depth = int(degree), int(depth)
    sizes = tree_layer_sizes(degree, depth)
    n = sum(sizes)
    if n > max_vertices:
        raise SizeLimit(f"tree would have {n} vertices (cap {max_vertices})")
    starts = np.cumsum([0] + sizes)

    parent = np.empty(n, dtype=np.int64)
    parent[0] = -1
    parent[1:1 + degree] = 0
    for k in range(2, depth + 1):
        j = np.arange(sizes[k], dtype=np.int64)
        parent[starts[k]:starts[k + 1]] = starts[k - 1] + j // (degree - 1)

    n_children = np.zeros(n, dtype=np.int64)
    n_children[0] = degree
    n_children[1:starts[depth]] = degree - 1
    deg = n_children + 1
    deg[0] = degree
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg, out=indptr[1:])

    # Each row is [parent, children...]; children of consecutive vertices are
    # consecutive ids, so the child slots read 1, 2, ..., n-1 in CSR order.
    indices = np.empty(indptr[-1], dtype=np.int64)
    parent_slot = indptr[1:n]
    indices[parent_slot] = parent[1:]
    child_slot = np.ones(indptr[-1], dtype=bool)
    child_slot[parent_slot] = False
    indices[child_slot] = np.arange(1, n, dtype=np.int64)

    edges = np.stack([parent[1:], np.arange(1, n, dtype=np.int64)], axis=1)
    g = Graph(
        vertex_count=n,
        edges=edges,
        weights=np.ones(n - 1),
        indptr=indptr,
        indices=indices,
        adj_weights=np.ones(indptr[-1]),
        truncated_at=depth,
        center=0,
    )
    return g, 0


def lattice_ball_size(dim, radius):
    """Number of points of Z^dim with ℓ¹ norm at most ``radius``."""
    from math import comb
    return sum(2 ** i * comb(dim, i) * comb(radius, i) for i in range(min(dim, radius) + 1))


def gen_lattice(dim: int, radius: int, max_vertices: int = 2_000_000):
    """ℓ¹ ball of radius ``radius`` in Z^dim with unit nearest-neighbor edges.

    Returns ``(graph, origin)``.  Vertices are ordered by ℓ¹ norm, then
    lexicographically by coordinates; labels are ``"x,y,..."`` strings and
    ``graph.coords`` is attached as an (n, dim) integer array.
    """
    if int(dim) != dim or int(radius) != radius or dim < 1 or radius < 1:
        raise ParameterOutOfRange(f"gen_lattice needs dim >= 1 and radius >= 1, got {dim}, {radius}")
    dim, radius = int(dim), int(radius)
    n = lattice_ball_size(dim, radius)
    if n > max_vertices:
        raise SizeLimit(f"lattice ball would have {n} vertices (cap {max_vertices})")

    coords = _ball_points(dim, radius)
    norm = np.abs(coords).sum(axis=1)
    keys = [coords[:, i] for i in reversed(range(dim))] + [norm]
    coords = coords[np.lexsort(keys)]

    span = 2 * radius + 1
    code = ((coords + radius) * span ** np.arange(dim)).sum(axis=1)
    lookup = np.argsort(code)
    sorted_code = code[lookup]
    us, vs = [], []
    for axis in range(dim):
        shifted = coords.copy()
        shifted[:, axis] += 1
        inside = np.abs(shifted).sum(axis=1) <= radius
        target = ((shifted[inside] + radius) * span ** np.arange(dim)).sum(axis=1)
        pos = np.searchsorted(sorted_code, target)
        us.append(np.flatnonzero(inside))
        vs.append(lookup[pos])
    u = np.concatenate(us)
    v = np.concatenate(vs)
    labels = {i: ",".join(map(str, c)) for i, c in enumerate(coords.tolist())}
    g = _from_arrays(n, np.minimum(u, v), np.maximum(u, v), np.ones(len(u)),
                     labels=labels, truncated_at=radius, center=0, coords=coords)
    return g, 0


def _ball_points(dim, radius):
    pts = np.zeros((1, 0), dtype=np.int64)
    for _ in range(dim):
        c = np.arange(-radius, radius + 1, dtype=np.int64)
        grown = np.concatenate([np.repeat(pts, len(c), axis=0),
                                np.tile(c, len(pts))[:, None]], axis=1)
        pts = grown[np.abs(grown).sum(axis=1) <= radius]
    return pts


def lattice_coords(g: Graph) -> np.ndarray:
    """Integer coordinates of a lattice graph, from ``coords`` or its labels."""
    if g.coords is not None:
        return g.coords
    if not g.labels or len(g.labels) != g.vertex_count:
        raise ParameterOutOfRange("graph carries no lattice coordinate labels")
    rows = [g.labels[i] for i in range(g.vertex_count)]
    try:
        out = np.array([[int(s) for s in r.strip("()").split(",")] for r in rows], dtype=np.int64)
    except ValueError:
        raise ParameterOutOfRange("graph labels are not lattice coordinates") from None
    return out


def random_connected_graph(n_vertices, rng, extra_edges=None, weight_range=(0.1, 10.0)):
    """Random spanning tree plus extra chords, with uniform random weights.

    Used by the property suite and the ``gen random`` command.  The
    spanning tree attaches vertex ``i`` to a random earlier vertex, biased
    toward recent ones so that graphs have several distance layers.
    """
    if n_vertices < 2:
        raise ParameterOutOfRange("need at least 2 vertices")
    if extra_edges is None:
        extra_edges = int(rng.integers(0, max(1, n_vertices // 2)))
    pairs = set()
    for i in range(1, n_vertices):
        lo = max(0, i - 1 - int(rng.integers(0, 4)))
        j = int(rng.integers(lo, i))
        pairs.add((j, i))
    all_pairs = [p for p in itertools.combinations(range(n_vertices), 2) if p not in pairs]
    if extra_edges and all_pairs:
        pick = rng.choice(len(all_pairs), size=min(extra_edges, len(all_pairs)), replace=False)
        pairs.update(all_pairs[i] for i in pick)
    pairs = sorted(pairs)
    lo_w, hi_w = weight_range
    w = rng.uniform(lo_w, hi_w, size=len(pairs))
    return build_graph([(a, b, float(x)) for (a, b), x in zip(pairs, w)])

import math
from collections import defaultdict, deque

import numpy as np
import pytest
from hypothesis import strategies as st

from discrete_almgren.graph import build_graph


def naive_layers(edges, base):
    """Distance layers and in/out/lateral degrees from a plain adjacency dict."""
    adj = defaultdict(list)
    for u, v, w in edges:
        if u != v:
            adj[u].append((v, w))
            adj[v].append((u, w))
    dist = {base: 0}
    queue = deque([base])
    while queue:
        x = queue.popleft()
        for y, _ in adj[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    d_in, d_out, d_lat = {}, {}, {}
    for v, dv in dist.items():
        d_in[v] = math.fsum(w for y, w in adj[v] if dist[y] == dv - 1)
        d_out[v] = math.fsum(w for y, w in adj[v] if dist[y] == dv + 1)
        d_lat[v] = math.fsum(w for y, w in adj[v] if dist[y] == dv)
    return dist, d_in, d_out, d_lat


def naive_frequency(edges, base, values):
    """N(k) for every k with a layer k+1, summed from scratch per layer."""
    dist, d_in, d_out, _ = naive_layers(edges, base)
    depth = max(dist.values())
    s_in = [math.fsum(d_in[v] * values[v] ** 2 for v in dist if dist[v] == k) for k in range(depth + 1)]
    s_out = [math.fsum(d_out[v] * values[v] ** 2 for v in dist if dist[v] == k) for k in range(depth + 1)]
    return [s_in[k + 1] - s_out[k] for k in range(depth)], s_in, s_out


def edge_triples(g):
    return [(int(u), int(v), float(w)) for (u, v), w in zip(g.edges.tolist(), g.weights.tolist())]


@st.composite
def connected_edge_lists(draw, max_vertices=25, unit=False):
    """Random spanning tree plus chords, as (u, v, w) triples."""
    n = draw(st.integers(2, max_vertices))
    pairs = set()
    for i in range(1, n):
        pairs.add((draw(st.integers(0, i - 1)), i))
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=n))
    for a, b in extra:
        if a != b:
            pairs.add((min(a, b), max(a, b)))
    weight = st.just(1.0) if unit else st.floats(0.1, 10.0, allow_nan=False)
    return [(a, b, draw(weight)) for a, b in sorted(pairs)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def cycle6():
    return build_graph([(i, (i + 1) % 6) for i in range(6)])


@pytest.fixture
def path3():
    return build_graph([(0, 1, 1.0), (1, 2, 1.0)])

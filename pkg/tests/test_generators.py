import itertools

import numpy as np
import pytest

from discrete_almgren.errors import IoError, ParameterOutOfRange, ParseError, SizeLimit
from discrete_almgren.generators import gen_lattice, gen_tree, lattice_ball_size, random_connected_graph
from discrete_almgren.graph import build_graph, layer_decompose, load_edge_list


def test_star_tree():
    g, root = gen_tree(3, 1)
    assert g.vertex_count == 4 and g.edge_count == 3
    assert sorted(v for v, _ in g.adjacency(root)) == [1, 2, 3]


def test_depth3_tree():
    g, root = gen_tree(3, 3)
    assert g.vertex_count == 22
    assert layer_decompose(g, root).layer_sizes == [1, 3, 6, 12]
    assert g.truncated_at == 3


def test_degree2_tree_is_path():
    g, root = gen_tree(2, 4)
    assert g.vertex_count == 9
    deg = np.diff(g.indptr)
    assert sorted(deg.tolist()) == [1, 1] + [2] * 7


@pytest.mark.parametrize("d,depth", [(3, 1), (3, 5), (4, 4), (5, 3), (7, 2)])
def test_tree_counts(d, depth):
    g, root = gen_tree(d, depth)
    assert g.vertex_count == 1 + d * ((d - 1) ** depth - 1) // (d - 2)
    sizes = layer_decompose(g, root).layer_sizes
    assert sizes == [1] + [d * (d - 1) ** (k - 1) for k in range(1, depth + 1)]


def test_tree_csr_matches_generic_builder():
    g, _ = gen_tree(3, 5)
    h = build_graph(g.edges.tolist())
    assert np.array_equal(g.indptr, h.indptr)
    assert np.array_equal(g.indices, h.indices)


@pytest.mark.parametrize("args", [(1, 3), (3, 0), (2.5, 3)])
def test_tree_bad_params(args):
    with pytest.raises(ParameterOutOfRange):
        gen_tree(*args)


def test_tree_size_limit():
    with pytest.raises(SizeLimit):
        gen_tree(3, 30)


def test_lattice_line():
    g, origin = gen_lattice(1, 3)
    assert g.vertex_count == 7 and g.edge_count == 6
    assert g.labels[origin] == "0"


def test_lattice_diamond():
    g, origin = gen_lattice(2, 2)
    assert g.vertex_count == 13
    assert layer_decompose(g, origin).layer_sizes == [1, 4, 8]


def test_lattice_layer_sizes_radius5():
    g, origin = gen_lattice(2, 5)
    sizes = layer_decompose(g, origin).layer_sizes
    brute = [sum(1 for p in itertools.product(range(-5, 6), repeat=2) if abs(p[0]) + abs(p[1]) == k)
             for k in range(6)]
    assert sizes == brute == [1, 4, 8, 12, 16, 20]


@pytest.mark.parametrize("dim", [1, 2, 3])
@pytest.mark.parametrize("radius", [1, 2, 5, 8])
def test_lattice_counts_brute_force(dim, radius):
    pts = [p for p in itertools.product(range(-radius, radius + 1), repeat=dim)
           if sum(map(abs, p)) <= radius]
    g, _ = gen_lattice(dim, radius)
    assert g.vertex_count == len(pts) == lattice_ball_size(dim, radius)
    edges = sum(1 for p in pts for i in range(dim)
                if sum(map(abs, p)) - abs(p[i]) + abs(p[i] + 1) <= radius)
    assert g.edge_count == edges
    assert set(map(tuple, g.coords.tolist())) == set(pts)


def test_lattice_bad_params():
    with pytest.raises(ParameterOutOfRange):
        gen_lattice(0, 2)
    with pytest.raises(SizeLimit):
        gen_lattice(4, 60, max_vertices=1000)


def test_edge_list_unit(tmp_path):
    p = tmp_path / "e.txt"
    p.write_text("0 1\n1 2")
    g = load_edge_list(p)
    assert g.vertex_count == 3 and g.weights.tolist() == [1.0, 1.0]


def test_edge_list_weighted(tmp_path):
    p = tmp_path / "e.txt"
    p.write_text("0 1 2.5\n# comment\n\n1 2 0.5\n")
    g = load_edge_list(p)
    assert g.adjacency(1) == [(0, 2.5), (2, 0.5)]


def test_edge_list_parse_error(tmp_path):
    p = tmp_path / "e.txt"
    p.write_text("0 1 x")
    with pytest.raises(ParseError) as exc:
        load_edge_list(p)
    assert exc.value.line == 1


def test_edge_list_missing_file(tmp_path):
    with pytest.raises(IoError):
        load_edge_list(tmp_path / "nope.txt")


def test_random_graph_is_connected_and_seeded():
    a = random_connected_graph(40, np.random.default_rng(5))
    b = random_connected_graph(40, np.random.default_rng(5))
    assert a.is_connected()
    assert np.array_equal(a.edges, b.edges) and np.array_equal(a.weights, b.weights)
    assert ((a.weights >= 0.1) & (a.weights <= 10)).all()

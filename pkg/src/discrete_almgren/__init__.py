"""Discrete Almgren frequency for harmonic functions on weighted graphs."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .almgren import (
    DoublingReport,
    FrequencySeries,
    MonotonicityReport,
    Region,
    classify_region,
    doubling_check,
    frequency_series,
    lateral_energy,
    layer_energies,
    verify_monotone,
)
from .cube import (
    EnergyCurve,
    boundary_energy,
    derivative_decomposition,
    energy_curve,
)
from .errors import *  # noqa: F401,F403
from .generators import gen_lattice, gen_tree, random_connected_graph
from .graph import Graph, LayerDecomposition, build_graph, layer_decompose, load_edge_list
from .harmonic import (
    ScalarField,
    lattice_polynomial_field,
    residual,
    solve_dirichlet,
    tree_example_field,
)
from .polynomial import Polynomial, complex_power, make_polynomial, parse_polynomial

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from radtree import (
    DepthTooLarge,
    RadialTreeSpec,
    SpecValidationError,
    VertexCoupling,
    assemble_secular,
    compare_spectra,
    halfline_components,
    leaf_count,
    preset,
    symmetric_halfline,
    tree_eigenvalues,
)
from radtree.tree import dft_basis, helmert_basis, secular_matrices


def standard(b=2, depth=3):
    return RadialTreeSpec((1.0,) * depth, (preset("standard", b),) * (depth - 1))


def _roots(f, hi, n=30001):
    es = np.linspace(1e-6, hi, n)
    v = [f(e) for e in es]
    return [brentq(f, es[i], es[i + 1], xtol=1e-14) for i in range(n - 1) if v[i] * v[i + 1] < 0]


@pytest.mark.parametrize("basis", [dft_basis, helmert_basis])
@pytest.mark.parametrize("b", [2, 3, 5])
def test_basis_orthonormal_zero_sum(basis, b):
    V = basis(b)
    assert V.shape == (b - 1, b)
    assert np.allclose(V @ V.conj().T, np.eye(b - 1))
    assert np.allclose(V.sum(axis=1), 0)


def test_leaf_count_identity():
    spec = RadialTreeSpec((1, 1, 1, 1), (preset("standard", 2), preset("standard", 3), preset("standard", 2)))
    assert leaf_count(spec, 4) == 12
    comps = halfline_components(spec, 4)
    # every last-generation edge belongs to exactly one component copy
    assert sum(c.multiplicity for c in comps) == leaf_count(spec, 4)


def test_component_layout():
    spec = RadialTreeSpec((1, 0.5, 2), (VertexCoupling(0, 0, 0, 3, (math.pi, math.pi / 2)),
                                         preset("standard", 2)))
    comps = halfline_components(spec, 3)
    assert [(c.generation, c.index, c.multiplicity) for c in comps] == [
        (0, 0, 1), (1, 1, 1), (1, 2, 1), (2, 1, 3)]
    assert comps[2].system.left_boundary == pytest.approx(math.pi / 4)
    assert comps[3].system.origin == 1.5 and comps[3].right_end == 3.5


def test_standard_depth3_against_direct_sum():
    r = compare_spectra(standard(2, 3), 3, (0, 100))
    assert r.passed
    assert r.tree_count == r.direct_sum_count == 21
    assert r.max_mismatch < 1e-9


def test_star_graph_frozen():
    # depth 2, b = 2 standard: a star with three unit edges, Dirichlet at all ends
    # eigenvalues: (n pi)^2 (multiplicity 2) and ((n - 1/2) pi)^2 (simple)
    ev = tree_eigenvalues(standard(2, 2), 2, (0, 50))
    expected = sorted([((n - 0.5) * math.pi) ** 2 for n in (1, 2)] + [(n * math.pi) ** 2 for n in (1, 2)])
    assert [e for e, _ in ev] == pytest.approx(expected, abs=1e-9)
    assert [m for _, m in ev] == [1, 2, 1, 2]


def test_nondefault_eigenphases():
    spec = RadialTreeSpec((1.0, 0.8), (VertexCoupling(0.5, 0, 0, 3, (math.pi, math.pi / 3)),))
    r = compare_spectra(spec, 2, (0, 60))
    assert r.passed


def test_basis_invariance():
    spec = RadialTreeSpec((1.0, 0.7, 1.2), (preset("delta", 3, 0.8), preset("standard", 2)))
    a = tree_eigenvalues(spec, 3, (0, 40), basis=dft_basis)
    b = tree_eigenvalues(spec, 3, (0, 40), basis=helmert_basis)
    assert [m for _, m in a] == [m for _, m in b]
    assert np.allclose([e for e, _ in a], [e for e, _ in b], atol=1e-9)


def test_separating_generation_blocks():
    # alpha = beta = 2 at b = 2 decouples the vertex: the spectrum is the union
    # of the root edge with a Robin end, one edge with a Robin start, and a
    # Dirichlet-Dirichlet edge
    spec = RadialTreeSpec((1, 1), (VertexCoupling(2, 2, 0, 2),))
    ev = tree_eigenvalues(spec, 2, (0, 60))
    k = math.sqrt
    oracle = sorted(
        _roots(lambda E: k(E) * math.cos(k(E)) + math.sin(k(E)), 60)
        + _roots(lambda E: k(E) * math.cos(k(E)) + math.sin(k(E)) / 2, 60)
        + [(n * math.pi) ** 2 for n in (1, 2)]
    )
    assert [m for _, m in ev] == [1] * len(oracle)
    assert np.allclose([e for e, _ in ev], oracle, atol=1e-9)


def test_sigma_min_vanishes_at_eigenvalue():
    spec = standard(2, 2)
    assert assemble_secular(spec, 2, math.pi ** 2) < 1e-10
    assert assemble_secular(spec, 2, 5.0) > 1e-3


def test_secular_shape():
    spec = standard(2, 3)
    M = secular_matrices(spec, 3, [1.0, 2.0])
    n_edges = 1 + 2 + 4
    assert M.shape == (2, 2 * n_edges, 2 * n_edges)


def test_depth_limits():
    with pytest.raises(DepthTooLarge):
        secular_matrices(standard(3, 9), 9, [1.0], max_unknowns=100)
    with pytest.raises(SpecValidationError):
        tree_eigenvalues(standard(2, 2), 5, (0, 10))


def test_symmetric_halfline_period_detection():
    spec = RadialTreeSpec((1,) * 7, (VertexCoupling(4, -1, 0, 4),) * 6)
    s = symmetric_halfline(spec)
    assert s.period_hint == (0, 1)
    assert np.allclose(s._a, 2) and np.allclose(s._q, -2)


def test_symmetric_halfline_explicit_period():
    cs = (preset("delta", 2, 1.0), preset("standard", 2)) * 3
    spec = RadialTreeSpec((1,) + (1, 0.5) * 3, cs)
    s = symmetric_halfline(spec, (0, 2))
    assert s.period_hint == (0, 2)
    assert s.period_length == pytest.approx(1.5)


def test_standard_depth2_components():
    comps = halfline_components(standard(2, 2), 2)
    root, side = comps
    assert root.system.origin == 0 and root.right_end == 2
    assert list(root.system.points) == [1.0]
    c = root.system.couplings[0].c_complex.real
    assert c == pytest.approx(2 * (1 - math.sqrt(2)) / (1 + math.sqrt(2)))
    assert (side.generation, side.multiplicity) == (1, 1)
    assert side.system.origin == 1 and len(side.system.points) == 0
    assert side.system.left_boundary == pytest.approx(math.pi / 2)  # eigenphase pi -> Dirichlet

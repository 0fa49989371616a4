import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lognls_star import (GraphField, GraphMismatch, InvalidParameter, NotEquivariant, StarGraph, l2_inner,
                         l2_norm, lift, make_graph, reduce, reduced_inner, weighted_h1_norm)
from lognls_star.graph import ReducedField, dirichlet_energy


def gaussian_field(g, shift=0.0):
    row = np.exp(-0.5 * (g.x - shift) ** 2)
    return GraphField(g, np.exp(-0.5 * shift**2), np.tile(row, (g.n_edges, 1)))


@pytest.mark.parametrize("args", [(1, 10.0, 100), (3, -1.0, 100), (3, 10.0, 4), (2.5, 10.0, 100),
                                  (3, float("inf"), 100)])
def test_graph_validation(args):
    with pytest.raises(InvalidParameter):
        StarGraph(*args)


def test_graph_geometry():
    g = make_graph(4, 8.0, 80)
    assert g.spacing == pytest.approx(0.1)
    assert g.x[0] == pytest.approx(0.1) and g.x[-1] == pytest.approx(8.0)
    assert g.dimension == 4 * 79 + 1
    assert g.reduced_dimension == 2 * 79 + 1
    # trapezoid weights integrate 1 exactly
    total = g.vertex_weight + g.n_edges * g.edge_weights.sum()
    assert total == pytest.approx(4 * 8.0)
    assert g.refined().m_points == 160


def test_field_shape_and_finiteness():
    g = make_graph(3, 5.0, 20)
    with pytest.raises(InvalidParameter):
        GraphField(g, 0.0, np.zeros((2, 20)))
    with pytest.raises(InvalidParameter):
        GraphField(g, np.nan, np.zeros((3, 20)))
    f = GraphField.zeros(g)
    with pytest.raises(ValueError):
        f.edges[0, 0] = 1.0


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 6), m=st.integers(8, 40), seed=st.integers(0, 10**6))
def test_vector_roundtrip(n, m, seed):
    g = make_graph(n, 3.0, m)
    v = np.random.default_rng(seed).standard_normal(g.dimension)
    f = GraphField.from_vector(g, v)
    assert np.array_equal(f.vector(), v)
    assert f.boundary_defect() == 0.0


def test_arithmetic_and_mismatch():
    g = make_graph(3, 5.0, 20)
    f = gaussian_field(g)
    assert l2_norm(f + f) == pytest.approx(2 * l2_norm(f))
    assert l2_norm(f - f) == 0.0
    assert l2_norm(-f) == pytest.approx(l2_norm(f))
    other = make_graph(3, 5.0, 21)
    with pytest.raises(GraphMismatch):
        f + gaussian_field(other)
    with pytest.raises(GraphMismatch):
        l2_inner(f, gaussian_field(other))


def test_l2_of_gaussian_matches_closed_form():
    # sum over edges of int_0^inf exp(-x^2) = N sqrt(pi)/2
    g = make_graph(3, 12.0, 2400)
    q = l2_norm(gaussian_field(g)) ** 2
    assert q == pytest.approx(3 * np.sqrt(np.pi) / 2, rel=1e-5)


def test_weighted_h1_norm_of_gaussian():
    # per edge: int phi'^2 + phi^2 + x^2 phi^2 = sqrt(pi)/4 + sqrt(pi)/2 + sqrt(pi)/4
    g = make_graph(2, 12.0, 4000)
    assert weighted_h1_norm(gaussian_field(g)) == pytest.approx(np.sqrt(2 * np.sqrt(np.pi)), rel=1e-5)


def test_dirichlet_energy_of_linear_ramp():
    g = make_graph(2, 1.0, 10)
    f = GraphField(g, 1.0, np.tile(1.0 - g.x, (2, 1)))
    assert dirichlet_energy(f) == pytest.approx(2.0)


def test_complex_inner_is_sesquilinear():
    g = make_graph(3, 5.0, 30)
    f = gaussian_field(g)
    z = 0.3 + 0.7j
    assert l2_inner(f, f * z) == pytest.approx(z * l2_inner(f, f))
    assert l2_inner(f * z, f) == pytest.approx(np.conj(z) * l2_inner(f, f))
    assert isinstance(l2_inner(f, f), float)


@settings(max_examples=25, deadline=None)
@given(n=st.integers(3, 7), m=st.integers(8, 30), seed=st.integers(0, 10**6), data=st.data())
def test_reduce_lift_roundtrip_and_inner(n, m, seed, data):
    k = data.draw(st.integers(1, (n - 1) // 2))
    g = make_graph(n, 4.0, m)
    rng = np.random.default_rng(seed)
    r = ReducedField(g, k, rng.standard_normal(), rng.standard_normal(m), rng.standard_normal(m))
    s = ReducedField(g, k, rng.standard_normal(), rng.standard_normal(m), rng.standard_normal(m))
    lifted = lift(r)
    back = reduce(lifted, k)
    assert np.allclose(back.f, r.f) and np.allclose(back.g, r.g)
    assert reduced_inner(r, s) == pytest.approx(l2_inner(lifted, lift(s)))


def test_reduce_rejects_non_equivariant():
    g = make_graph(5, 5.0, 20)
    edges = np.zeros((5, 20))
    edges[0, 3] = 1.0
    with pytest.raises(NotEquivariant):
        reduce(GraphField(g, 0.0, edges), 2)


@pytest.mark.parametrize("k", [0, 2, 1.5])
def test_reduce_rejects_bad_k(k):
    g = make_graph(4, 5.0, 20)
    with pytest.raises(InvalidParameter):
        reduce(GraphField.zeros(g), k)


def test_constant_field_integrates_exactly():
    g = make_graph(2, 1.0, 16)
    one = GraphField(g, 1.0, np.ones((2, 16)))
    assert l2_inner(one, one) == pytest.approx(2.0, abs=1e-14)
    assert l2_inner(GraphField.zeros(g), one) == 0.0


def test_h1_norm_properties():
    g = make_graph(3, 6.0, 300)
    f = gaussian_field(g, shift=0.5)
    assert weighted_h1_norm(GraphField.zeros(g)) == 0.0
    assert weighted_h1_norm(f * (-2.5j)) == pytest.approx(2.5 * weighted_h1_norm(f))
    assert weighted_h1_norm(f) >= l2_norm(f)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_inner_product_is_hermitian_and_positive(seed):
    g = make_graph(3, 2.0, 12)
    rng = np.random.default_rng(seed)
    f = GraphField.from_vector(g, rng.standard_normal(g.dimension) + 1j * rng.standard_normal(g.dimension))
    h = GraphField.from_vector(g, rng.standard_normal(g.dimension) + 1j * rng.standard_normal(g.dimension))
    assert l2_inner(f, h) == pytest.approx(np.conj(l2_inner(h, f)))
    assert np.real(l2_inner(f, f)) > 0


def test_reduced_norm_of_constant_edges():
    g = make_graph(3, 4.0, 40)
    f = gaussian_field(g)
    r = reduce(f, 1)
    assert np.allclose(r.f, r.g)
    w0, wf, wg = g.vertex_weight, g.edge_weights, g.edge_weights
    expect = w0 * r.vertex_value**2 + np.sum(r.f**2 * wf) + 2 * np.sum(r.g**2 * wg)
    assert reduced_inner(r, r) == pytest.approx(expect, rel=1e-14)

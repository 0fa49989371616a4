"""Discretized star graph, fields on it, and the equivariant reduction.

Each of the N half-lines is truncated at ``x = L`` and sampled on the uniform
grid ``x_i = i*h`` (``i = 0..M``, ``h = L/M``).  The vertex ``x_0 = 0`` is a
single unknown shared by all edges, so continuity at the vertex holds by
construction.  ``x_M = L`` carries a homogeneous Dirichlet value; fields store
it explicitly (``edges[:, -1]``) and operators never treat it as free.

Free-unknown layouts used by the operators:

* full graph, dimension ``N*(M-1) + 1``: ``[v0, edge_0[1..M-1], edge_1[...], ...]``
* reduced space, dimension ``2*(M-1) + 1``: ``[v0, f[1..M-1], g[1..M-1]]``
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GraphMismatch, InvalidParameter, NotEquivariant


@dataclass(frozen=True)
class StarGraph:
    n_edges: int
    length: float
    m_points: int

    def __post_init__(self):
        if int(self.n_edges) != self.n_edges or self.n_edges < 2:
            raise InvalidParameter(f"n_edges must be an integer >= 2, got {self.n_edges}")
        if not np.isfinite(self.length) or self.length <= 0:
            raise InvalidParameter(f"length must be positive, got {self.length}")
        if int(self.m_points) != self.m_points or self.m_points < 8:
            raise InvalidParameter(f"m_points must be an integer >= 8, got {self.m_points}")
        object.__setattr__(self, "n_edges", int(self.n_edges))
        object.__setattr__(self, "length", float(self.length))
        object.__setattr__(self, "m_points", int(self.m_points))

    @property
    def spacing(self) -> float:
        return self.length / self.m_points

    @property
    def x(self) -> np.ndarray:
        """Edge sample points ``x_1..x_M`` (the vertex is excluded)."""
        return self.spacing * np.arange(1, self.m_points + 1)

    @property
    def vertex_weight(self) -> float:
        return 0.5 * self.n_edges * self.spacing

    @property
    def edge_weights(self) -> np.ndarray:
        """Trapezoid weights for ``x_1..x_M`` on one edge."""
        w = np.full(self.m_points, self.spacing)
        w[-1] = 0.5 * self.spacing
        return w

    @property
    def dimension(self) -> int:
        return self.n_edges * (self.m_points - 1) + 1

    @property
    def reduced_dimension(self) -> int:
        return 2 * (self.m_points - 1) + 1

    def refined(self, factor: int = 2) -> "StarGraph":
        return StarGraph(self.n_edges, self.length, self.m_points * factor)


def make_graph(n_edges: int, length: float, m_points: int) -> StarGraph:
    return StarGraph(n_edges, length, m_points)


def _freeze(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class GraphField:
    """Function on the star graph: one shared vertex value and ``N`` edge arrays."""

    graph: StarGraph
    vertex_value: complex
    edges: np.ndarray = field(repr=False)

    def __post_init__(self):
        edges = np.asarray(self.edges)
        g = self.graph
        if edges.shape != (g.n_edges, g.m_points):
            raise InvalidParameter(
                f"edges must have shape {(g.n_edges, g.m_points)}, got {edges.shape}"
            )
        v0 = self.vertex_value
        if not (np.all(np.isfinite(edges)) and np.isfinite(v0)):
            raise InvalidParameter("field values must be finite")
        if np.iscomplexobj(edges) or np.iscomplexobj(v0):
            edges = edges.astype(complex)
            v0 = complex(v0)
        else:
            edges = edges.astype(float)
            v0 = float(v0)
        object.__setattr__(self, "vertex_value", v0)
        object.__setattr__(self, "edges", _freeze(edges))

    @classmethod
    def zeros(cls, graph: StarGraph, dtype=float) -> "GraphField":
        return cls(graph, dtype(0), np.zeros((graph.n_edges, graph.m_points), dtype=dtype))

    @classmethod
    def from_vector(cls, graph: StarGraph, vec) -> "GraphField":
        """Inverse of :meth:`vector`; the Dirichlet endpoint is set to zero."""
        vec = np.asarray(vec)
        if vec.shape != (graph.dimension,):
            raise InvalidParameter(f"vector must have length {graph.dimension}")
        edges = np.zeros((graph.n_edges, graph.m_points), dtype=vec.dtype)
        edges[:, :-1] = vec[1:].reshape(graph.n_edges, graph.m_points - 1)
        return cls(graph, vec[0], edges)

    def vector(self) -> np.ndarray:
        """Free unknowns ``[v0, interior values of each edge]``."""
        return np.concatenate([[self.vertex_value], self.edges[:, :-1].ravel()])

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.edges)

    def with_edges(self, vertex_value, edges) -> "GraphField":
        return GraphField(self.graph, vertex_value, edges)

    def conj(self) -> "GraphField":
        return self.with_edges(np.conj(self.vertex_value), np.conj(self.edges))

    def boundary_defect(self) -> float:
        """Largest magnitude stored at the Dirichlet endpoint ``x = L``."""
        return float(np.max(np.abs(self.edges[:, -1])))

    def _check(self, other):
        if not isinstance(other, GraphField):
            return NotImplemented
        if other.graph != self.graph:
            raise GraphMismatch("fields live on different graphs")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self.with_edges(self.vertex_value + other.vertex_value, self.edges + other.edges)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self.with_edges(self.vertex_value - other.vertex_value, self.edges - other.edges)

    def __mul__(self, c):
        if not np.isscalar(c):
            return NotImplemented
        return self.with_edges(c * self.vertex_value, c * self.edges)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1


def l2_inner(f: GraphField, g: GraphField) -> complex:
    """Trapezoid approximation of ``sum_j int_0^L conj(f_j) g_j dx``."""
    if f.graph != g.graph:
        raise GraphMismatch("fields live on different graphs")
    gr = f.graph
    val = gr.vertex_weight * np.conj(f.vertex_value) * g.vertex_value
    val += np.sum(np.conj(f.edges) * g.edges * gr.edge_weights)
    if not (f.is_complex or g.is_complex):
        return float(np.real(val))
    return complex(val)


def l2_norm(f: GraphField) -> float:
    return float(np.sqrt(np.real(l2_inner(f, f))))


def _with_vertex(f: GraphField) -> np.ndarray:
    """Edge samples ``x_0..x_M`` with the vertex value prepended, shape (N, M+1)."""
    n = f.graph.n_edges
    col = np.full((n, 1), f.vertex_value, dtype=f.edges.dtype)
    return np.hstack([col, f.edges])


def dirichlet_energy(f: GraphField) -> float:
    """``||f'||^2`` from segment differences, consistent with the assembled operators."""
    full = _with_vertex(f)
    return float(np.sum(np.abs(np.diff(full, axis=1)) ** 2) / f.graph.spacing)


def weighted_h1_norm(f: GraphField) -> float:
    """Norm of W^1: ``(||f'||^2 + ||f||^2 + ||x f||^2)^(1/2)``."""
    gr = f.graph
    moment = np.sum(np.abs(f.edges) ** 2 * gr.x**2 * gr.edge_weights)
    total = dirichlet_energy(f) + np.real(l2_inner(f, f)) + moment
    return float(np.sqrt(total))


@dataclass(frozen=True)
class ReducedField:
    """Element of the equivariant subspace: ``f`` on edges ``1..k``, ``g`` on ``k+1..N``."""

    graph: StarGraph
    k: int
    vertex_value: complex
    f: np.ndarray = field(repr=False)
    g: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_k(self.graph.n_edges, self.k)
        m = self.graph.m_points
        f, g = np.asarray(self.f), np.asarray(self.g)
        if f.shape != (m,) or g.shape != (m,):
            raise InvalidParameter(f"f and g must have length {m}")
        object.__setattr__(self, "f", _freeze(f))
        object.__setattr__(self, "g", _freeze(g))

    @classmethod
    def from_vector(cls, graph: StarGraph, k: int, vec) -> "ReducedField":
        vec = np.asarray(vec)
        if vec.shape != (graph.reduced_dimension,):
            raise InvalidParameter(f"vector must have length {graph.reduced_dimension}")
        n = graph.m_points - 1
        f = np.zeros(graph.m_points, dtype=vec.dtype)
        g = np.zeros(graph.m_points, dtype=vec.dtype)
        f[:-1] = vec[1 : n + 1]
        g[:-1] = vec[n + 1 :]
        return cls(graph, k, vec[0], f, g)

    def vector(self) -> np.ndarray:
        return np.concatenate([[self.vertex_value], self.f[:-1], self.g[:-1]])


def _check_k(n_edges, k):
    if int(k) != k or not 1 <= k <= (n_edges - 1) // 2:
        raise InvalidParameter(f"k must satisfy 1 <= k <= {(n_edges - 1) // 2} for N={n_edges}, got {k}")


def reduced_weights(graph: StarGraph, k: int) -> tuple[float, np.ndarray, np.ndarray]:
    """Vertex weight and the two edge-weight arrays of the reduced inner product."""
    w = graph.edge_weights
    return graph.vertex_weight, k * w, (graph.n_edges - k) * w


def reduced_inner(r1: ReducedField, r2: ReducedField) -> complex:
    if r1.graph != r2.graph or r1.k != r2.k:
        raise GraphMismatch("reduced fields live on different spaces")
    w0, wf, wg = reduced_weights(r1.graph, r1.k)
    val = w0 * np.conj(r1.vertex_value) * r2.vertex_value
    val += np.sum(np.conj(r1.f) * r2.f * wf) + np.sum(np.conj(r1.g) * r2.g * wg)
    if np.iscomplexobj(val):
        return complex(val)
    return float(val)


def reduce(v: GraphField, k: int, rtol: float = 1e-12) -> ReducedField:
    """Project an equivariant field onto its two edge-group representatives."""
    gr = v.graph
    _check_k(gr.n_edges, k)
    first, second = v.edges[:k], v.edges[k:]
    f, g = first.mean(axis=0), second.mean(axis=0)
    deviation = max(np.max(np.abs(first - f)), np.max(np.abs(second - g)))
    scale = l2_norm(v)
    if deviation > rtol * scale:
        raise NotEquivariant(f"edge groups differ by {deviation:.3e} (norm {scale:.3e})")
    return ReducedField(gr, k, v.vertex_value, f, g)


def lift(r: ReducedField) -> GraphField:
    gr = r.graph
    edges = np.vstack([np.tile(r.f, (r.k, 1)), np.tile(r.g, (gr.n_edges - r.k, 1))])
    return GraphField(gr, r.vertex_value, edges)

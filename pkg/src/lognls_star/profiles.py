"""Closed-form standing-wave profiles, kernel generators and conserved functionals."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter
from .graph import GraphField, StarGraph, _with_vertex, dirichlet_energy, l2_inner

# |v|^2 log|v|^2 is continued by 0 below this modulus
LOG_FLOOR = 1e-300


@dataclass(frozen=True)
class ProfileParams:
    """Parameters of the profile with ``k`` edges of the first kind.

    ``a_k = alpha / (2k - N)``; ``k = 0`` gives the N-tail profile.
    """

    n_edges: int
    k: int
    alpha: float
    omega: float = -1.0

    def __post_init__(self):
        if int(self.n_edges) != self.n_edges or self.n_edges < 2:
            raise InvalidParameter(f"n_edges must be an integer >= 2, got {self.n_edges}")
        kmax = (self.n_edges - 1) // 2
        if int(self.k) != self.k or not 0 <= self.k <= kmax:
            raise InvalidParameter(f"k must satisfy 0 <= k <= {kmax}, got {self.k}")
        if not (np.isfinite(self.alpha) and np.isfinite(self.omega)):
            raise InvalidParameter("alpha and omega must be finite")

    @property
    def a_k(self) -> float:
        return self.alpha / (2 * self.k - self.n_edges)

    @property
    def amplitude(self) -> float:
        return float(np.exp(0.5 * (self.omega + 1.0)))


def auto_length(a_k: float, margin: float = 10.0) -> float:
    """Default truncation ``|a_k| + margin``."""
    return abs(a_k) + margin


def _check_graph(n_edges, g: StarGraph):
    if g.n_edges != n_edges:
        raise InvalidParameter(f"graph has {g.n_edges} edges, expected {n_edges}")


def profile(p: ProfileParams, g: StarGraph) -> GraphField:
    _check_graph(p.n_edges, g)
    a, c, x = p.a_k, p.amplitude, g.x
    bump = c * np.exp(-0.5 * (x - a) ** 2)
    tail = c * np.exp(-0.5 * (x + a) ** 2)
    edges = np.vstack([np.tile(bump, (p.k, 1)), np.tile(tail, (p.n_edges - p.k, 1))])
    return GraphField(g, c * np.exp(-0.5 * a * a), edges)


def _dphi0(x):
    return -x * np.exp(-0.5 * x * x)


def kirchhoff_kernel_basis(n_edges: int, g: StarGraph) -> list[GraphField]:
    """The ``N-1`` kernel fields ``(0,..,phi0', -phi0',..,0)`` of the Kirchhoff operator."""
    _check_graph(n_edges, g)
    d = _dphi0(g.x)
    out = []
    for j in range(n_edges - 1):
        edges = np.zeros((n_edges, g.m_points))
        edges[j], edges[j + 1] = d, -d
        out.append(GraphField(g, 0.0, edges))
    return out


def equivariant_kernel_generator(n_edges: int, k: int, g: StarGraph) -> GraphField:
    """``((N-k)/k phi0'`` on edges ``1..k``, ``-phi0'`` on the rest)."""
    _check_graph(n_edges, g)
    if int(k) != k or not 1 <= k <= (n_edges - 1) // 2:
        raise InvalidParameter(f"k must satisfy 1 <= k <= {(n_edges - 1) // 2}, got {k}")
    d = _dphi0(g.x)
    edges = np.vstack([np.tile((n_edges - k) / k * d, (k, 1)), np.tile(-d, (n_edges - k, 1))])
    return GraphField(g, 0.0, edges)


def charge(v: GraphField) -> float:
    return float(np.real(l2_inner(v, v)))


def log_density(v: GraphField) -> float:
    """Trapezoid value of ``sum_j int |v_j|^2 log |v_j|^2``."""
    g = v.graph
    mod = np.abs(_with_vertex(v))
    keep = mod >= LOG_FLOOR
    safe = np.where(keep, mod, 1.0)
    dens = np.where(keep, 2.0 * safe**2 * np.log(safe), 0.0)
    # vertex column carries weight h/2 on every edge
    w = np.concatenate([[0.5 * g.spacing], g.edge_weights])
    return float(np.sum(dens * w))


def energy(v: GraphField, alpha: float) -> float:
    return 0.5 * dirichlet_energy(v) - 0.5 * log_density(v) + 0.5 * alpha * abs(v.vertex_value) ** 2


def action(v: GraphField, alpha: float, omega: float) -> float:
    return (
        0.5 * dirichlet_energy(v)
        + 0.5 * (omega + 1.0) * charge(v)
        - 0.5 * log_density(v)
        + 0.5 * alpha * abs(v.vertex_value) ** 2
    )


def flux_defect(v: GraphField, alpha: float) -> complex:
    """``sum_j v_j'(0) - alpha v(0)`` with second-order one-sided differences."""
    full = _with_vertex(v)
    h = v.graph.spacing
    d = (-3.0 * full[:, 0] + 4.0 * full[:, 1] - full[:, 2]) / (2.0 * h)
    return complex(np.sum(d) - alpha * v.vertex_value)

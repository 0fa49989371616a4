"""Finite-difference Schrodinger operators with a delta vertex condition.

Every operator acts on the free unknowns of a :class:`~lognls_star.graph.StarGraph`
(vertex plus interior points, Dirichlet at ``x = L``).  The flux condition
``sum_j v_j'(0) = alpha v(0)`` is built into the vertex row by eliminating a
ghost point per edge, which gives

    (2/h^2) [v0 - mean_j v_{j,1}] + (2 alpha / (N h)) v0 + V(0) v0

for the vertex equation.  The resulting matrix ``A`` is not symmetric, but
``W A`` is, where ``W`` holds the trapezoid weights (``N h / 2`` at the vertex,
``h`` elsewhere).  Eigen-solvers work with ``W^(1/2) A W^(-1/2)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.io
import scipy.sparse as sp

from .errors import GroupInhomogeneous, InvalidParameter
from .graph import GraphField, ReducedField, StarGraph, _check_k
from .profiles import ProfileParams

KINDS = ("h_delta", "t1", "t2", "t1_kirchhoff")


@dataclass(frozen=True, eq=False)
class BandedOperator:
    graph: StarGraph
    matrix: sp.csr_matrix = field(repr=False)
    weights: np.ndarray = field(repr=False)
    kind: str
    n_edges: int
    alpha: float
    k: int | None = None
    reduced: bool = False

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def space(self) -> str:
        return "reduced" if self.reduced else "full"

    def matvec(self, v):
        return self.matrix @ v

    def inner(self, u, v):
        return np.sum(self.weights * np.conj(u) * v)

    def symmetric(self) -> sp.csr_matrix:
        s = np.sqrt(self.weights)
        m = sp.diags(s) @ self.matrix @ sp.diags(1.0 / s)
        return ((m + m.T) * 0.5).tocsr()

    def dense_symmetric(self) -> np.ndarray:
        return self.symmetric().toarray()

    def norm(self) -> float:
        """Max absolute row sum of the symmetrized matrix (bounds the spectral radius)."""
        return float(abs(self.symmetric()).sum(axis=1).max())

    def band_order(self) -> np.ndarray:
        """Permutation that makes the symmetrized matrix banded.

        Full graph: edges interleaved point by point (half-bandwidth ``N``).
        Reduced space: ``[g reversed, v0, f]`` (tridiagonal).
        """
        n = self.graph.m_points - 1
        if self.reduced:
            return np.concatenate([np.arange(2 * n, n, -1), [0], np.arange(1, n + 1)])
        N = self.n_edges
        edge_major = 1 + np.arange(N * n).reshape(N, n)
        return np.concatenate([[0], edge_major.T.ravel()])

    @property
    def bandwidth(self) -> int:
        return 1 if self.reduced else self.n_edges

    def bands(self) -> np.ndarray:
        """Lower banded storage (LAPACK ``lower=True`` layout) in :meth:`band_order`."""
        perm = self.band_order()
        s = self.symmetric()[perm][:, perm].tocsr()
        b = self.bandwidth
        out = np.zeros((b + 1, self.dimension))
        for d in range(b + 1):
            out[d, : self.dimension - d] = s.diagonal(-d)
        return out

    def to_field(self, vec):
        if self.reduced:
            return ReducedField.from_vector(self.graph, self.k, vec)
        return GraphField.from_vector(self.graph, vec)


def _group_potential(g: StarGraph, n_edges, k, a, shift):
    x = g.x[:-1]
    pot = np.empty((n_edges, x.size))
    pot[:k] = (x - a) ** 2 + shift
    pot[k:] = (x + a) ** 2 + shift
    return pot, a * a + shift


def _assemble(g: StarGraph, alpha, edge_potential, vertex_potential) -> tuple[sp.csr_matrix, np.ndarray]:
    N, h = g.n_edges, g.spacing
    n = g.m_points - 1
    dim = N * n + 1
    idx = 1 + np.arange(N * n).reshape(N, n)
    inv = 1.0 / h**2

    rows = [np.array([0]), idx.ravel()]
    cols = [np.array([0]), idx.ravel()]
    vals = [np.array([2 * inv + 2 * alpha / (N * h) + vertex_potential]), (2 * inv + edge_potential).ravel()]
    # vertex <-> first interior point on each edge
    rows += [np.zeros(N, dtype=int), idx[:, 0]]
    cols += [idx[:, 0], np.zeros(N, dtype=int)]
    vals += [np.full(N, -2 * inv / N), np.full(N, -inv)]
    # interior neighbours along each edge
    left, right = idx[:, :-1].ravel(), idx[:, 1:].ravel()
    rows += [left, right]
    cols += [right, left]
    vals += [np.full(left.size, -inv), np.full(left.size, -inv)]

    m = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim))
    weights = np.full(dim, h)
    weights[0] = 0.5 * N * h
    return m.tocsr(), weights


def _block(g: StarGraph, n_edges, k, alpha, shift, kind) -> BandedOperator:
    if g.n_edges != n_edges:
        raise InvalidParameter(f"graph has {g.n_edges} edges, expected {n_edges}")
    a = alpha / (2 * k - n_edges)
    pot, v0 = _group_potential(g, n_edges, k, a, shift)
    m, w = _assemble(g, alpha, pot, v0)
    return BandedOperator(g, m, w, kind, n_edges, float(alpha), k=k)


def assemble_h_delta(alpha: float, g: StarGraph) -> BandedOperator:
    """Free Laplacian with the delta condition of strength ``alpha``."""
    m, w = _assemble(g, alpha, np.zeros((g.n_edges, g.m_points - 1)), 0.0)
    return BandedOperator(g, m, w, "h_delta", g.n_edges, float(alpha))


def _check_block_params(p: ProfileParams):
    if p.k < 1:
        raise InvalidParameter("linearization blocks need k >= 1")
    if p.alpha == 0:
        raise InvalidParameter("linearization blocks need alpha != 0; use assemble_t1_kirchhoff")


def assemble_t1(p: ProfileParams, g: StarGraph) -> BandedOperator:
    """``-d^2/dx^2 + (x -+ a_k)^2 - 3`` with the delta condition."""
    _check_block_params(p)
    return _block(g, p.n_edges, p.k, p.alpha, -3.0, "t1")


def assemble_t2(p: ProfileParams, g: StarGraph) -> BandedOperator:
    """``-d^2/dx^2 + (x -+ a_k)^2 - 1`` with the delta condition."""
    _check_block_params(p)
    return _block(g, p.n_edges, p.k, p.alpha, -1.0, "t2")


def assemble_t1_kirchhoff(n_edges: int, g: StarGraph) -> BandedOperator:
    """``-d^2/dx^2 + x^2 - 3`` on every edge with the Kirchhoff condition."""
    return _block(g, n_edges, 0, 0.0, -3.0, "t1_kirchhoff")


def linearization_block(n_edges, k, alpha, g: StarGraph, shift=-3.0) -> BandedOperator:
    """T1 (``shift=-3``) or T2 (``shift=-1``) without the ``alpha != 0`` restriction.

    At ``alpha = 0`` this is the Kirchhoff operator, which the perturbation
    sweeps need as their base point.
    """
    _check_k(n_edges, k)
    kind = {-3.0: "t1", -1.0: "t2"}.get(float(shift), "custom")
    if alpha == 0 and kind == "t1":
        kind = "t1_kirchhoff"
    return _block(g, n_edges, k, alpha, shift, kind)


def _lift_matrix(g: StarGraph, k: int) -> sp.csr_matrix:
    N, n = g.n_edges, g.m_points - 1
    rows = [np.array([0])]
    cols = [np.array([0])]
    for j in range(N):
        rows.append(1 + j * n + np.arange(n))
        cols.append((1 if j < k else 1 + n) + np.arange(n))
    r, c = np.concatenate(rows), np.concatenate(cols)
    return sp.csr_matrix((np.ones(r.size), (r, c)), shape=(N * n + 1, 2 * n + 1))


def restrict_equivariant(A: BandedOperator, k: int) -> BandedOperator:
    """Restriction of ``A`` to fields equal within edges ``1..k`` and within ``k+1..N``."""
    if A.reduced:
        raise InvalidParameter("operator is already reduced")
    _check_k(A.n_edges, k)
    P = _lift_matrix(A.graph, k)
    w_red = P.T @ A.weights
    R = sp.diags(1.0 / w_red) @ P.T @ sp.diags(A.weights)
    AP = A.matrix @ P
    red = (R @ AP).tocsr()
    defect = abs(AP - P @ red).max()
    if defect > 1e-12 * A.norm():
        raise GroupInhomogeneous(f"operator does not preserve the k={k} subspace (defect {defect:.3e})")
    red.eliminate_zeros()
    return BandedOperator(A.graph, red, w_red, A.kind, A.n_edges, A.alpha, k=k, reduced=True)


def write_matrix_market(A: BandedOperator, path) -> None:
    """Dump the symmetrized matrix in MatrixMarket coordinate format."""
    scipy.io.mmwrite(str(path), A.symmetric().tocoo(), symmetry="symmetric")

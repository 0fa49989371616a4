"""Lowest eigenpairs, Morse/kernel classification and the stability verdict."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from .errors import HypothesisFailed, Inconclusive, InvalidParameter, MorseBoundViolated, NoConvergence
from .graph import StarGraph, _check_k, make_graph, reduce
from .operators import BandedOperator, linearization_block, restrict_equivariant
from .profiles import ProfileParams, auto_length, profile

DENSE_LIMIT = 2500
RESIDUAL_RTOL = 1e-8
DEFAULT_M = 4000


def default_tol_zero(graph: StarGraph) -> float:
    """Zero-classification threshold ``50 h^2``."""
    return 50.0 * graph.spacing**2


@dataclass
class SpectralReport:
    kind: str
    n_edges: int
    k: int | None
    alpha: float
    space: str
    m_points: int
    length: float
    eigenvalues: np.ndarray
    residuals: np.ndarray
    tol_zero: float
    morse_index: int
    kernel_dim: int
    gap: float | None
    eigenvectors: np.ndarray = field(repr=False, default=None)
    operator: BandedOperator = field(repr=False, default=None)

    def field(self, i: int):
        return self.operator.to_field(self.eigenvectors[:, i])

    def to_dict(self) -> dict:
        return {
            "operator": {"kind": self.kind, "n_edges": self.n_edges, "k": self.k, "alpha": self.alpha,
                         "space": self.space},
            "grid": {"m_points": self.m_points, "length": self.length},
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "residuals": [float(x) for x in self.residuals],
            "tol_zero": self.tol_zero,
            "morse_index": self.morse_index,
            "kernel_dim": self.kernel_dim,
            "gap": self.gap,
        }


def classify(eigenvalues, tol_zero):
    """``(morse, kernel, gap)`` for an ascending list of eigenvalues."""
    ev = np.asarray(eigenvalues)
    morse = int(np.sum(ev < -tol_zero))
    kernel = int(np.sum(np.abs(ev) <= tol_zero))
    pos = ev[ev > tol_zero]
    return morse, kernel, (float(pos.min()) if pos.size else None)


def _lower_bound_shift(A: BandedOperator) -> float:
    h = A.graph.spacing
    diag = A.matrix.diagonal()
    vmin = float(np.min(diag[1:] - 2.0 / h**2))
    return vmin - (min(A.alpha, 0.0) / A.n_edges) ** 2 - 1.0


def _eig_tridiagonal(A, m):
    bands = A.bands()
    w, u = sla.eigh_tridiagonal(bands[0], bands[1, :-1], select="i", select_range=(0, m - 1))
    perm = A.band_order()
    out = np.empty_like(u)
    out[perm] = u
    return w, out


def _eig_shift_invert(A, m, sigma):
    S = A.symmetric().tocsc()
    if sigma is None:
        sigma = _lower_bound_shift(A)
    v0 = np.random.default_rng(0).standard_normal(A.dimension)
    try:
        w, u = spla.eigsh(S, k=m, sigma=sigma, which="LM", v0=v0, ncv=max(2 * m + 1, 24), tol=1e-12)
    except spla.ArpackNoConvergence as exc:
        raise NoConvergence(f"shift-invert Lanczos did not converge: {exc}") from exc
    order = np.argsort(w)
    return w[order], u[:, order]


def eigen_lowest(A: BandedOperator, m: int, tol_zero: float | None = None, method: str = "auto",
                 sigma: float | None = None) -> SpectralReport:
    """The ``m`` algebraically smallest eigenpairs of a weighted-symmetric operator.

    ``method``: ``"banded"`` (tridiagonal solver, reduced operators only),
    ``"dense"``, ``"shift-invert"`` (sparse Lanczos around ``sigma``; defaults
    to a shift below the spectrum) or ``"auto"``.  With an explicit ``sigma``
    the ``m`` eigenvalues closest to it are returned instead.
    """
    if not 1 <= m <= A.dimension:
        raise InvalidParameter(f"m must be in [1, {A.dimension}], got {m}")
    if tol_zero is None:
        tol_zero = default_tol_zero(A.graph)
    if method == "auto":
        if sigma is not None and A.dimension > DENSE_LIMIT:
            method = "shift-invert"
        elif A.reduced:
            method = "banded"
        else:
            method = "dense" if A.dimension <= DENSE_LIMIT else "shift-invert"
    if method == "banded":
        if not A.reduced:
            raise InvalidParameter("banded path needs a reduced (tridiagonal) operator")
        w, u = _eig_tridiagonal(A, m)
    elif method == "dense":
        w, u = sla.eigh(A.dense_symmetric(), subset_by_index=[0, m - 1])
    elif method == "shift-invert":
        w, u = _eig_shift_invert(A, m, sigma)
    else:
        raise InvalidParameter(f"unknown method {method!r}")

    S = A.symmetric()
    res = np.linalg.norm(S @ u - u * w, axis=0) / (A.norm() * np.linalg.norm(u, axis=0))
    if np.any(res > RESIDUAL_RTOL):
        raise NoConvergence(f"eigenpair residual {res.max():.3e} exceeds {RESIDUAL_RTOL}")
    vecs = u / np.sqrt(A.weights)[:, None]
    morse, kernel, gap = classify(w, tol_zero)
    g = A.graph
    return SpectralReport(A.kind, A.n_edges, A.k, A.alpha, A.space, g.m_points, g.length, w, res,
                          tol_zero, morse, kernel, gap, vecs, A)


def bracket_negative(A: BandedOperator, tol_zero: float | None = None, m0: int = 6) -> SpectralReport:
    """Grow ``m`` until the largest computed eigenvalue exceeds ``tol_zero``."""
    if tol_zero is None:
        tol_zero = default_tol_zero(A.graph)
    m = min(m0, A.dimension)
    while True:
        rep = eigen_lowest(A, m, tol_zero)
        if rep.eigenvalues[-1] > tol_zero or m == A.dimension:
            break
        m = min(2 * m, A.dimension)
    ev = rep.eigenvalues
    band = ev[(ev > -10 * tol_zero) & (ev < -tol_zero)]
    if band.size:
        raise Inconclusive(
            f"eigenvalue {band[0]:.3e} lies in (-{10 * tol_zero:.2e}, -{tol_zero:.2e}); refine the grid"
        )
    return rep


def morse_index(A: BandedOperator, tol_zero: float | None = None) -> int:
    """Number of eigenvalues below ``-tol_zero``."""
    return bracket_negative(A, tol_zero).morse_index


def default_graph(n_edges: int, k: int, alpha: float, m_points: int = DEFAULT_M) -> StarGraph:
    a = alpha / (2 * k - n_edges)
    return make_graph(n_edges, auto_length(a), m_points)


@dataclass
class MorseBound:
    n_edges: int
    k: int
    alpha: float
    count: int
    bound: int
    holds: bool
    eigenvalues: np.ndarray = field(repr=False)


def verify_morse_bounds(n_edges: int, k: int, alpha: float, g: StarGraph | None = None,
                        tol_zero: float | None = None, raise_on_violation: bool = True) -> MorseBound:
    """Full-graph Morse index of T1 against ``k+1`` (alpha < 0) or ``N-k`` (alpha > 0)."""
    if alpha == 0:
        raise InvalidParameter("alpha must be nonzero")
    g = g or default_graph(n_edges, k, alpha)
    T1 = linearization_block(n_edges, k, alpha, g, shift=-3.0)
    rep = bracket_negative(T1, tol_zero, m0=max(8, n_edges + 2))
    bound = k + 1 if alpha < 0 else n_edges - k
    result = MorseBound(n_edges, k, float(alpha), rep.morse_index, bound, rep.morse_index <= bound,
                        rep.eigenvalues)
    if raise_on_violation and not result.holds:
        raise MorseBoundViolated(
            f"n(T1)={rep.morse_index} exceeds the bound {bound} for N={n_edges}, k={k}, alpha={alpha}"
        )
    return result


class Stability(enum.Enum):
    STABLE = "STABLE"
    SPECTRALLY_UNSTABLE = "SPECTRALLY_UNSTABLE"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class Verdict:
    n_edges: int
    k: int
    alpha: float
    status: Stability
    morse_t1: int | None
    morse_t2: int | None
    hypotheses: dict
    diagnostics: dict = field(default_factory=dict)

    @property
    def morse(self) -> int | None:
        if self.morse_t1 is None or self.morse_t2 is None:
            return None
        return self.morse_t1 + self.morse_t2

    def to_dict(self) -> dict:
        return {
            "n_edges": self.n_edges, "k": self.k, "alpha": self.alpha,
            "verdict": self.status.value, "morse": self.morse,
            "morse_t1": self.morse_t1, "morse_t2": self.morse_t2,
            "hypotheses": dict(self.hypotheses), "diagnostics": self.diagnostics,
        }


def _cosine(A: BandedOperator, u, v) -> float:
    return float(abs(A.inner(u, v)) / np.sqrt(abs(A.inner(u, u) * A.inner(v, v))))


def _reduced_blocks(n_edges, k, alpha, g):
    T1 = restrict_equivariant(linearization_block(n_edges, k, alpha, g, shift=-3.0), k)
    T2 = restrict_equivariant(linearization_block(n_edges, k, alpha, g, shift=-1.0), k)
    return T1, T2


def _classify_blocks(n_edges, k, alpha, omega, g, tol_zero):
    T1, T2 = _reduced_blocks(n_edges, k, alpha, g)
    tol = default_tol_zero(g) if tol_zero is None else tol_zero
    out = {"tol_zero": tol, "m_points": g.m_points, "length": g.length}
    try:
        r1 = bracket_negative(T1, tol)
        r2 = bracket_negative(T2, tol)
    except Inconclusive as exc:
        out["inconclusive"] = str(exc)
        return out
    phi = reduce(profile(ProfileParams(n_edges, k, alpha, omega), g), k).vector()
    out.update(
        morse_t1=r1.morse_index, morse_t2=r2.morse_index,
        kernel_t1=r1.kernel_dim, kernel_t2=r2.kernel_dim,
        t1_eigenvalues=[float(x) for x in r1.eigenvalues[:4]],
        t2_eigenvalues=[float(x) for x in r2.eigenvalues[:4]],
        t1_smallest_abs=float(np.min(np.abs(r1.eigenvalues))),
        t1_gap=r1.gap, t2_gap=r2.gap,
        t2_kernel_similarity=_cosine(T2, r2.eigenvectors[:, 0], phi),
    )
    return out


def stability_verdict(n_edges: int, k: int, alpha: float, g: StarGraph | None = None, *,
                      omega: float = -1.0, refine: bool = True, tol_zero: float | None = None,
                      strict: bool = False) -> Verdict:
    """Count ``n(H|L^2_k) = n(T1) + n(T2)`` on the reduced space and decide stability.

    The four structural hypotheses (kernel of T2 spanned by the profile,
    trivial kernel of T1, finitely many negative eigenvalues, positive rest
    of the spectrum separated from zero) are checked at the working grid and,
    with ``refine``, again after doubling ``M``.
    """
    _check_k(n_edges, k)
    if alpha == 0:
        raise InvalidParameter("alpha must be nonzero")
    g = g or default_graph(n_edges, k, alpha)
    levels = [_classify_blocks(n_edges, k, alpha, omega, g, tol_zero)]
    if refine:
        levels.append(_classify_blocks(n_edges, k, alpha, omega, g.refined(), tol_zero))
    base = levels[0]
    conclusive = all("inconclusive" not in lv for lv in levels)
    hyp = {}
    if conclusive:
        hyp["t2_kernel_is_profile"] = all(lv["kernel_t2"] == 1 and lv["t2_kernel_similarity"] > 0.999
                                          for lv in levels)
        hyp["t1_kernel_trivial"] = all(lv["kernel_t1"] == 0 for lv in levels)
        hyp["finite_negative_spectrum"] = True
        hyp["positive_spectrum_gapped"] = all(lv["t1_gap"] is not None and lv["t2_gap"] is not None
                                              for lv in levels)
        hyp["refinement_stable"] = all(
            (lv["morse_t1"], lv["morse_t2"]) == (base["morse_t1"], base["morse_t2"]) for lv in levels
        )
    else:
        hyp["finite_negative_spectrum"] = False
    n1, n2 = base.get("morse_t1"), base.get("morse_t2")
    status = Stability.INCONCLUSIVE
    if all(hyp.values()):
        n = n1 + n2
        if n == 1:
            status = Stability.STABLE
        elif n == 2:
            status = Stability.SPECTRALLY_UNSTABLE
    verdict = Verdict(n_edges, k, float(alpha), status, n1, n2, hyp, {"levels": levels})
    if strict and not all(hyp.values()):
        failed = [name for name, ok in hyp.items() if not ok]
        raise HypothesisFailed(f"hypotheses failed at this resolution: {failed}")
    return verdict

"""Second reduced eigenvalue of T1 near the Kirchhoff point and Morse counts along alpha-rays."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import CountChanged, Inconclusive, InvalidParameter, TrackingLost
from .graph import StarGraph, _check_k, l2_norm, make_graph, reduce
from .operators import linearization_block, restrict_equivariant
from .profiles import _dphi0, auto_length, equivariant_kernel_generator
from .shooting import shooting_morse
from .spectral import DEFAULT_M, bracket_negative, default_tol_zero, eigen_lowest

DEFAULT_DELTAS = (0.02, 0.05, 0.1)
OVERLAP_MIN = 0.9


def slope_closed_form(n_edges: int) -> float:
    """``4 / (N sqrt(pi))``; the same for every admissible ``k``."""
    return 4.0 / (n_edges * np.sqrt(np.pi))


def slope_mu0(n_edges: int, k: int, g: StarGraph | None = None) -> float:
    """Leading slope of the second reduced T1 eigenvalue at ``alpha = 0``.

    Evaluates ``(2(N-k)/k) int_0^inf x phi0'(x)^2 dx / ||Phi~_{0,k}||^2`` by
    trapezoid quadrature on the grid ``g``.
    """
    _check_k(n_edges, k)
    g = g or make_graph(n_edges, 12.0, DEFAULT_M)
    x = g.x
    moment = float(np.sum(x * _dphi0(x) ** 2 * g.edge_weights))
    norm2 = l2_norm(equivariant_kernel_generator(n_edges, k, g)) ** 2
    return 2.0 * (n_edges - k) / k * moment / norm2


def _reduced_t1(n_edges, k, alpha, g):
    return restrict_equivariant(linearization_block(n_edges, k, alpha, g, shift=-3.0), k)


def _map(fn, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, items))
    return [fn(it) for it in items]


@dataclass
class EigenCurve:
    n_edges: int
    k: int
    alphas: np.ndarray
    mu2: np.ndarray
    residuals: np.ndarray
    overlaps: np.ndarray
    slope_fd: float
    slope_richardson: float | None
    slope_analytic: float
    delta: float
    mu2_at_zero: float | None
    kernel_similarity: float | None
    tol_zero: float
    jump_flags: list = field(default_factory=list)

    @property
    def relative_gap(self) -> float:
        return abs(self.slope_fd - self.slope_analytic) / abs(self.slope_analytic)

    @property
    def sign_pattern_ok(self) -> bool:
        neg = self.mu2[self.alphas < 0]
        pos = self.mu2[self.alphas > 0]
        return bool(np.all(neg < 0) and np.all(pos > 0))

    def slope_report(self) -> dict:
        return {
            "n_edges": self.n_edges, "k": self.k,
            "slope_analytic": self.slope_analytic,
            "slope_fd": self.slope_fd, "slope_richardson": self.slope_richardson,
            "delta": self.delta, "relative_gap": self.relative_gap,
            "sign_pattern_ok": self.sign_pattern_ok,
            "mu2_at_zero": self.mu2_at_zero, "kernel_similarity": self.kernel_similarity,
            "tol_zero": self.tol_zero,
        }


def _richardson(d1, s1, d2, s2):
    # centered differences carry an error c d^2
    return (d2**2 * s1 - d1**2 * s2) / (d2**2 - d1**2)


def eigencurve(n_edges: int, k: int, alpha_samples=None, g: StarGraph | None = None,
               n_eigs: int = 4, workers: int | None = None) -> EigenCurve:
    """Track the second reduced eigenvalue of T1 through ``alpha = 0`` by eigenvector overlap.

    ``alpha_samples`` must contain symmetric pairs ``+-delta``; ``0`` is
    always added.  The branch is seeded at ``alpha = 0`` by the eigenvector
    closest to the equivariant kernel generator and continued outwards in
    both directions.
    """
    _check_k(n_edges, k)
    samples = DEFAULT_DELTAS + tuple(-d for d in DEFAULT_DELTAS) if alpha_samples is None else alpha_samples
    alphas = np.unique(np.append(np.asarray(samples, dtype=float), 0.0))
    deltas = sorted(d for d in alphas if d > 0 and np.any(np.isclose(alphas, -d, rtol=0, atol=1e-15)))
    if not deltas:
        raise InvalidParameter("alpha samples must contain at least one symmetric pair +-delta")
    if g is None:
        amax = float(np.max(np.abs(alphas))) / (n_edges - 2 * k)
        g = make_graph(n_edges, auto_length(amax), DEFAULT_M)
    tol = default_tol_zero(g)

    reports = _map(lambda a: eigen_lowest(_reduced_t1(n_edges, k, a, g), n_eigs, tol), list(alphas), workers)
    i0 = int(np.flatnonzero(alphas == 0.0)[0])
    gen = reduce(equivariant_kernel_generator(n_edges, k, g), k).vector()

    def overlaps(rep, ref):
        A = rep.operator
        v = rep.eigenvectors
        nv = np.sqrt(np.abs(np.einsum("i,ij,ij->j", A.weights, v, v)))
        return np.abs(A.weights * ref @ v) / (nv * np.sqrt(abs(A.inner(ref, ref))))

    ov0 = overlaps(reports[i0], gen)
    j0 = int(np.argmax(ov0))
    chosen = {i0: j0}
    ovl = np.ones(alphas.size)
    ovl[i0] = ov0[j0]
    for direction in (1, -1):
        i, j = i0, j0
        while 0 <= i + direction < alphas.size:
            prev = reports[i].eigenvectors[:, j]
            i += direction
            ov = overlaps(reports[i], prev)
            j = int(np.argmax(ov))
            if ov[j] < OVERLAP_MIN:
                raise TrackingLost(
                    f"eigenvector overlap {ov[j]:.3f} < {OVERLAP_MIN} between alpha={alphas[i - direction]:g} "
                    f"and alpha={alphas[i]:g}"
                )
            chosen[i] = j
            ovl[i] = ov[j]
    mu = np.array([reports[i].eigenvalues[chosen[i]] for i in range(alphas.size)])
    res = np.array([reports[i].residuals[chosen[i]] for i in range(alphas.size)])

    def fd(d):
        ip = int(np.argmin(np.abs(alphas - d)))
        im = int(np.argmin(np.abs(alphas + d)))
        return (mu[ip] - mu[im]) / (2 * d)

    slope_fd = fd(deltas[0])
    rich = _richardson(deltas[0], slope_fd, deltas[1], fd(deltas[1])) if len(deltas) > 1 else None
    analytic = slope_closed_form(n_edges)
    flags = []
    for i in range(alphas.size - 1):
        da = alphas[i + 1] - alphas[i]
        if abs(mu[i + 1] - mu[i]) > 10 * abs(da) * abs(analytic):
            flags.append(float(alphas[i]))
    return EigenCurve(n_edges, k, alphas, mu, res, ovl, float(slope_fd),
                      None if rich is None else float(rich), analytic, float(deltas[0]),
                      float(mu[i0]), float(ov0[j0]), tol, flags)


@dataclass
class ContinuationReport:
    n_edges: int
    k: int
    alphas: np.ndarray
    counts: list
    morse_t1: list
    morse_t2: list
    methods: list
    mu2: list
    m_points: int
    expected: int
    constant: bool

    @property
    def count(self) -> int | None:
        return self.counts[0] if self.constant else None

    @property
    def matches_theory(self) -> bool:
        return self.constant and self.count == self.expected

    def to_dict(self) -> dict:
        return {
            "n_edges": self.n_edges, "k": self.k, "m_points": self.m_points,
            "count": self.count, "expected": self.expected, "constant": self.constant,
            "samples": [
                {"alpha": float(a), "count": c, "morse_t1": n1, "morse_t2": n2, "method": m, "mu2": u}
                for a, c, n1, n2, m, u in zip(self.alphas, self.counts, self.morse_t1, self.morse_t2,
                                               self.methods, self.mu2)
            ],
        }


def alpha_grid(alpha_from: float, alpha_to: float, steps: int, spacing: str = "log") -> np.ndarray:
    if alpha_from == 0 or alpha_to == 0 or np.sign(alpha_from) != np.sign(alpha_to):
        raise InvalidParameter("the alpha interval must not contain 0")
    if steps < 2:
        raise InvalidParameter("steps must be >= 2")
    if spacing == "log":
        s = np.sign(alpha_from)
        return s * np.geomspace(abs(alpha_from), abs(alpha_to), steps)
    if spacing == "linear":
        return np.linspace(alpha_from, alpha_to, steps)
    raise InvalidParameter(f"unknown spacing {spacing!r}")


def _fd_counts(n_edges, k, alpha, m_points):
    """Reduced ``(n(T1), n(T2), mu2)`` at ``M`` and ``2M``, or None when unresolved.

    Unresolved means: an eigenvalue in the inconclusive band, a T1 eigenvalue
    within ``10 tol_zero`` of zero, or a classification change under refinement.
    """
    a = alpha / (2 * k - n_edges)
    base = make_graph(n_edges, auto_length(a), m_points)
    levels = []
    for g in (base, base.refined()):
        tol = default_tol_zero(g)
        T1 = _reduced_t1(n_edges, k, alpha, g)
        T2 = restrict_equivariant(linearization_block(n_edges, k, alpha, g, shift=-1.0), k)
        try:
            r1 = bracket_negative(T1, tol)
            r2 = bracket_negative(T2, tol)
        except Inconclusive:
            return None
        if np.min(np.abs(r1.eigenvalues)) <= 10 * tol:
            return None
        levels.append((r1.morse_index, r2.morse_index, float(r1.eigenvalues[1])))
    if levels[0][:2] != levels[1][:2]:
        return None
    return levels[0]


def _sample_count(n_edges, k, alpha, m_points):
    fd = _fd_counts(n_edges, k, alpha, m_points)
    if fd is not None:
        return fd[0], fd[1], "finite-difference", fd[2]
    n1, n2 = shooting_morse(n_edges, k, alpha)
    return n1, n2, "shooting", None


def continuation_count(n_edges: int, k: int, alpha_from: float, alpha_to: float, steps: int = 25,
                       m_points: int = DEFAULT_M, spacing: str = "log", workers: int | None = None,
                       raise_on_change: bool = True) -> ContinuationReport:
    """Reduced Morse count ``n(T1) + n(T2)`` along an alpha-ray.

    Each sample uses the finite-difference eigenvalues when they are resolved
    and stable under one refinement.  For large ``|alpha|`` the second T1
    eigenvalue is exponentially small and the count comes from the
    extended-precision oscillation count instead; ``methods`` records which
    route decided each sample.
    """
    _check_k(n_edges, k)
    alphas = alpha_grid(alpha_from, alpha_to, steps, spacing)
    alphas = np.sort(alphas)
    rows = _map(lambda a: _sample_count(n_edges, k, float(a), m_points), list(alphas), workers)
    n1 = [r[0] for r in rows]
    n2 = [r[1] for r in rows]
    counts = [a + b for a, b in zip(n1, n2)]
    report = ContinuationReport(n_edges, k, alphas, counts, n1, n2, [r[2] for r in rows], [r[3] for r in rows],
                                m_points, 2 if alphas[0] < 0 else 1, len(set(counts)) == 1)
    if raise_on_change and not report.constant:
        i = next(i for i in range(1, len(counts)) if counts[i] != counts[i - 1])
        raise CountChanged(
            f"Morse count changes from {counts[i - 1]} to {counts[i]} between alpha={alphas[i - 1]:g} "
            f"and alpha={alphas[i]:g}", report
        )
    return report

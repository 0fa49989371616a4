"""Time evolution of the log-NLS flow, the linearization A_k and instability growth.

The flow ``i U_t - H U + U log|U|^2 = 0`` is advanced by Strang splitting:
a half step of the exact nonlinear phase rotation, a Crank-Nicolson step for
``H`` (unitary in the trapezoid inner product) and another half phase step.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import BlowupDetected, InvalidParameter, NoConvergence, NoGrowthWindow
from .graph import GraphField, StarGraph, _check_k, l2_inner, l2_norm, lift, make_graph, ReducedField, weighted_h1_norm
from .operators import assemble_h_delta, linearization_block, restrict_equivariant
from .profiles import ProfileParams, auto_length, charge, energy, profile

LINEARIZATION_M = 800


def orbital_distance(U: GraphField, Phi: GraphField) -> tuple[float, float, float]:
    """``(dist, theta_star, dist_l2)`` for ``inf_theta ||U - e^{i theta} Phi||``.

    ``theta_star = arg <Phi, U>`` minimizes the L2 part; ``dist`` is the
    weighted-H1 norm at that phase and ``dist_l2`` the exact L2 minimum.
    """
    ip = complex(l2_inner(Phi, U))
    theta = float(np.angle(ip))
    diff = U - Phi * complex(np.exp(1j * theta))
    d2 = l2_norm(U) ** 2 + l2_norm(Phi) ** 2 - 2 * abs(ip)
    return weighted_h1_norm(diff), theta, float(np.sqrt(max(d2, 0.0)))


@dataclass
class EvolutionTrace:
    times: np.ndarray
    charge: np.ndarray
    energy: np.ndarray
    orbital_distance: np.ndarray
    l2_distance: np.ndarray
    sup_norm: np.ndarray
    config: dict
    final: GraphField = field(repr=False, default=None)
    halted: str | None = None

    def charge_drift(self) -> float:
        q0 = self.charge[0]
        return float(np.max(np.abs(self.charge - q0)) / q0) if q0 else float(np.max(np.abs(self.charge)))

    def energy_drift(self) -> float:
        e0 = self.energy[0]
        return float(np.max(np.abs(self.energy - e0)) / max(abs(e0), 1e-300))


class _Stepper:
    def __init__(self, g: StarGraph, alpha, dt, eps_reg):
        H = assemble_h_delta(alpha, g).matrix.astype(complex)
        eye = sp.identity(H.shape[0], dtype=complex, format="csc")
        self._lu = spla.splu((eye + 0.5j * dt * H).tocsc())
        self._rhs = (eye - 0.5j * dt * H).tocsr()
        self.half = 0.5 * dt
        self.eps = eps_reg

    def phase(self, u):
        return u * np.exp(1j * self.half * np.log(np.abs(u) ** 2 + self.eps)) if self.eps > 0 else self._phase0(u)

    def _phase0(self, u):
        mod2 = np.abs(u) ** 2
        rot = np.where(mod2 > 0, np.log(np.where(mod2 > 0, mod2, 1.0)), 0.0)
        return u * np.exp(1j * self.half * rot)

    def step(self, u):
        u = self.phase(u)
        u = self._lu.solve(self._rhs @ u)
        return self.phase(u)


def evolve(U0: GraphField, alpha: float, t_final: float, dt: float, eps_reg: float = 1e-12,
           trace_stride: int = 10, reference: GraphField | None = None, blowup: float = 1e12,
           stop_distance: float | None = None) -> EvolutionTrace:
    """Integrate from ``U0`` to ``t_final`` with step ``dt``.

    The orbital distance is measured to the orbit of ``reference`` (default
    ``U0``).  ``stop_distance`` ends the run early once that distance is
    exceeded.
    """
    if not dt > 0:
        raise InvalidParameter("dt must be positive")
    if not t_final >= 0:
        raise InvalidParameter("t_final must be nonnegative")
    if eps_reg < 0:
        raise InvalidParameter("eps_reg must be nonnegative")
    if trace_stride < 1:
        raise InvalidParameter("trace_stride must be >= 1")
    g = U0.graph
    ref = U0 if reference is None else reference
    n_steps = int(round(t_final / dt))
    stepper = _Stepper(g, alpha, dt, eps_reg)
    config = {"n_edges": g.n_edges, "length": g.length, "m_points": g.m_points, "alpha": alpha,
              "t_final": t_final, "dt": dt, "eps_reg": eps_reg, "trace_stride": trace_stride}
    rows = []
    halted = None

    def record(t, field_):
        d, _, dl2 = orbital_distance(field_, ref)
        sup = max(abs(field_.vertex_value), float(np.max(np.abs(field_.edges))))
        rows.append((t, charge(field_), energy(field_, alpha), d, dl2, sup))
        return d, sup

    u = U0.vector().astype(complex)
    current = GraphField.from_vector(g, u)
    record(0.0, current)
    for n in range(1, n_steps + 1):
        u = stepper.step(u)
        if n % trace_stride == 0 or n == n_steps:
            current = GraphField.from_vector(g, u) if np.all(np.isfinite(u)) else None
            if current is None:
                halted = "non-finite values"
                break
            d, sup = record(n * dt, current)
            if sup > blowup:
                halted = "blowup"
                break
            if stop_distance is not None and d > stop_distance:
                halted = "stop_distance"
                break
    cols = np.array(rows).T
    trace = EvolutionTrace(cols[0], cols[1], cols[2], cols[3], cols[4], cols[5], config, current, halted)
    if halted in ("blowup", "non-finite values"):
        raise BlowupDetected(f"evolution halted ({halted}) at t={cols[0][-1]:g}", trace)
    return trace


def equivariant_perturbation(p: ProfileParams, g: StarGraph, size: float, seed: int = 0,
                             equivariant: bool = True) -> GraphField:
    """Smooth random complex perturbation with weighted-H1 norm ``size * ||Phi||_H1``.

    Built from ``x^n exp(-x^2/4)`` (``n = 1..4``, vanishing at the vertex)
    plus a common ``v0 exp(-x^2/4)``, with seeded complex coefficients.  With
    ``equivariant=False`` every edge gets its own coefficients.
    """
    rng = np.random.default_rng(seed)
    x = g.x
    gauss = np.exp(-0.25 * x * x)
    basis = np.array([x**n * gauss for n in range(1, 5)])
    n_groups = 2 if equivariant else g.n_edges
    coef = rng.standard_normal((n_groups, 4)) + 1j * rng.standard_normal((n_groups, 4))
    v0 = complex(rng.standard_normal() + 1j * rng.standard_normal())
    rows = coef @ basis + v0 * gauss
    if equivariant:
        edges = np.vstack([np.tile(rows[0], (p.k, 1)), np.tile(rows[1], (p.n_edges - p.k, 1))])
    else:
        edges = rows
    edges[:, -1] = 0.0
    r = GraphField(g, v0, edges)
    scale = size * weighted_h1_norm(profile(p, g)) / weighted_h1_norm(r)
    return r * scale


@dataclass
class LinearizationSpectrum:
    n_edges: int
    k: int
    alpha: float
    eigenvalues: np.ndarray
    nu: np.ndarray
    abscissa: float
    norm_t2t1: float
    symmetry_defect: float
    lambda2_residual: float | None = None
    m_points: int = 0

    def to_dict(self) -> dict:
        return {"n_edges": self.n_edges, "k": self.k, "alpha": self.alpha, "m_points": self.m_points,
                "abscissa": self.abscissa, "symmetry_defect": self.symmetry_defect,
                "lambda2_residual": self.lambda2_residual, "norm_t2t1": self.norm_t2t1,
                "leading": [[float(z.real), float(z.imag)] for z in
                            self.eigenvalues[np.argsort(-self.eigenvalues.real)][:6]]}


def _reduced_pair(n_edges, k, alpha, g):
    T1 = restrict_equivariant(linearization_block(n_edges, k, alpha, g, shift=-3.0), k)
    T2 = restrict_equivariant(linearization_block(n_edges, k, alpha, g, shift=-1.0), k)
    return T1, T2


def _symmetry_defect(lam):
    scale = np.maximum(1.0, np.abs(lam))
    worst = 0.0
    for target in (-lam, np.conj(lam)):
        d = np.min(np.abs(lam[None, :] - target[:, None]), axis=1) / scale
        worst = max(worst, float(d.max()))
    return worst


def linearization_spectrum(n_edges: int, k: int, alpha: float, g: StarGraph | None = None,
                           check_block: bool = False) -> LinearizationSpectrum:
    """Spectrum of ``A_k`` on the reduced space through ``lambda^2 in sigma(-T2 T1)``.

    With ``check_block`` the real block matrix ``[[0, T2], [-T1, 0]]`` is also
    diagonalized directly and its eigenvalues are tested against the square law.
    """
    _check_k(n_edges, k)
    if alpha == 0:
        raise InvalidParameter("alpha must be nonzero")
    if g is None:
        g = make_graph(n_edges, auto_length(alpha / (2 * k - n_edges)), LINEARIZATION_M)
    T1, T2 = _reduced_pair(n_edges, k, alpha, g)
    S1, S2 = T1.dense_symmetric(), T2.dense_symmetric()
    prod = S2 @ S1
    try:
        nu = np.linalg.eigvals(-prod)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    root = np.sqrt(nu.astype(complex))
    lam = np.concatenate([root, -root])
    norm = float(np.linalg.norm(prod, 2))
    resid = None
    if check_block:
        z = np.zeros_like(S1)
        block = np.block([[z, S2], [-S1, z]])
        lam_b = np.linalg.eigvals(block)
        resid = float(max(np.min(np.abs(l2 - nu)) for l2 in lam_b**2) / norm)
        lam = lam_b
    return LinearizationSpectrum(n_edges, k, float(alpha), lam, nu, float(lam.real.max()), norm,
                                 _symmetry_defect(lam), resid, g.m_points)


def unstable_mode(n_edges: int, k: int, alpha: float, g: StarGraph) -> tuple[float, GraphField]:
    """Leading real eigenvalue of ``A_k`` and its eigenvector ``V1 + i V2`` lifted to the graph.

    The vector is normalized to unit weighted-H1 norm.
    """
    T1, T2 = _reduced_pair(n_edges, k, alpha, g)
    s = np.sqrt(T1.weights)
    S1, S2 = T1.dense_symmetric(), T2.dense_symmetric()
    nu, w = np.linalg.eig(-S2 @ S1)
    i = int(np.argmax(nu.real))
    if not nu[i].real > 0:
        raise InvalidParameter("linearization has no eigenvalue with positive real part")
    lam = float(np.sqrt(nu[i].real))
    v1 = np.real(w[:, i])
    v2 = -(S1 @ v1) / lam
    vec = (v1 + 1j * v2) / s
    mode = lift(ReducedField.from_vector(g, k, vec))
    return lam, mode * (1.0 / weighted_h1_norm(mode))


@dataclass
class GrowthFit:
    rate_fit: float
    abscissa: float
    window: tuple
    trace: EvolutionTrace = field(repr=False)

    @property
    def ratio(self) -> float:
        return self.rate_fit / self.abscissa


def instability_growth_rate(n_edges: int, k: int, alpha: float, seed_amplitude: float = 1e-4,
                            g: StarGraph | None = None, dt: float = 1e-3, t_final: float | None = None,
                            omega: float = -1.0) -> GrowthFit:
    """Fit the exponential growth of the orbital distance from a seeded unstable mode.

    The fit uses the window where the distance lies in ``[3, 100] * seed``.
    """
    if not alpha < 0:
        raise InvalidParameter("growth rates are measured for alpha < 0 only")
    if not 1e-5 <= seed_amplitude <= 1e-3:
        raise InvalidParameter("seed_amplitude must lie in [1e-5, 1e-3]")
    p = ProfileParams(n_edges, k, alpha, omega)
    if g is None:
        g = make_graph(n_edges, auto_length(p.a_k), LINEARIZATION_M)
    abscissa = linearization_spectrum(n_edges, k, alpha, g).abscissa
    lam, mode = unstable_mode(n_edges, k, alpha, g)
    phi = profile(p, g)
    U0 = phi + mode * seed_amplitude
    if t_final is None:
        t_final = np.log(300.0) / lam + 2.0
    lo, hi = 3 * seed_amplitude, 100 * seed_amplitude
    trace = evolve(U0, alpha, t_final, dt, reference=phi, trace_stride=10, stop_distance=hi)
    d, t = trace.orbital_distance, trace.times
    sel = (d >= lo) & (d <= hi)
    if np.count_nonzero(sel) < 5:
        raise NoGrowthWindow(f"distance never spanned [{lo:.1e}, {hi:.1e}] within t={t_final:g}")
    slope = np.polyfit(t[sel], np.log(d[sel]), 1)[0]
    return GrowthFit(float(slope), abscissa, (float(t[sel][0]), float(t[sel][-1])), trace)

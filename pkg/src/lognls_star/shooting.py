"""Eigenvalue counting by Sturm oscillation in extended precision.

For the reduced block ``-d^2/dx^2 + (x -+ a)^2 + shift`` on the unfolded line
(edge group 1 on one side, group 2 on the other) the number of eigenvalues
below ``lam`` equals the number of zeros of the solution that decays at the
``f`` end, continued through the vertex.  When ``|a|`` is large the eigenvalue
closest to zero is of size ``|a| exp(-a^2)``, far below what a finite
difference grid resolves, but the zero count is exact as long as the
integration keeps enough digits.  The solution is carried with Taylor
series steps (``u'' = p(x) u`` with quadratic ``p``) in mpmath.
"""
from __future__ import annotations

import mpmath as mp

from .errors import InvalidParameter, NoConvergence
from .graph import _check_k

STEP = mp.mpf("0.1")
MAX_ORDER = 400


def _taylor_step(x0, u, du, h, a, c, eps):
    # u'' = (P0 + P1 t + t^2) u with t = x - x0
    p0 = (x0 - a) ** 2 + c
    p1 = 2 * (x0 - a)
    cs = [u, du]
    uu, dd = u + du * h, du
    hp = h
    small = 0
    n = 0
    while True:
        v = p0 * cs[n]
        if n >= 1:
            v += p1 * cs[n - 1]
        if n >= 2:
            v += cs[n - 2]
        cn = v / ((n + 2) * (n + 1))
        cs.append(cn)
        dd += (n + 2) * cn * hp
        hp *= h
        term = cn * hp
        uu += term
        n += 1
        scale = abs(uu) + abs(dd) * abs(h)
        if abs(term) <= eps * scale and abs((n + 1) * cn * hp / h) <= eps * (abs(dd) + abs(uu)):
            small += 1
            if small >= 3:
                return uu, dd
        else:
            small = 0
        if n > MAX_ORDER:
            raise NoConvergence("Taylor series did not converge within the step")


def _sign_changes(prev, new):
    return 1 if mp.sign(prev) * mp.sign(new) < 0 else 0


def oscillation_count(n_edges: int, k: int, alpha: float, shift: float = -3.0, lam: float = 0.0,
                      extra_digits: int = 30) -> int:
    """Number of eigenvalues below ``lam`` of the reduced block with the given shift.

    ``shift=-3`` is T1, ``shift=-1`` is T2.  The problem is posed on the
    half-lines (no truncation).
    """
    _check_k(n_edges, k)
    if alpha == 0:
        raise InvalidParameter("alpha must be nonzero")
    a_float = alpha / (2 * k - n_edges)
    digits = int(a_float * a_float / 2.3) + extra_digits
    with mp.workdps(digits):
        eps = mp.mpf(10) ** (-digits + 5)
        a = mp.mpf(alpha) / (2 * k - n_edges)
        c = mp.mpf(shift) - mp.mpf(lam)
        # f edge: integrate the decaying solution from far out back to the vertex
        x_far = abs(a) + 12 + mp.sqrt(max(abs(c), 1))
        q = mp.sqrt((x_far - a) ** 2 + c)
        u, du = mp.mpf(1), -q
        zeros = 0
        n_steps = int(mp.ceil(x_far / STEP))
        h = -x_far / n_steps
        x = x_far
        for _ in range(n_steps):
            u2, du2 = _taylor_step(x, u, du, h, a, c, eps)
            zeros += _sign_changes(u, u2)
            u, du, x = u2, du2, x + h
        # vertex: continuity and k f'(0) + (N - k) g'(0) = alpha v(0)
        g, dg = u, (mp.mpf(alpha) * u - k * du) / (n_edges - k)
        # g edge, potential (x + a)^2: no zero can follow once past the well with u u' > 0
        x = mp.mpf(0)
        turn = abs(a) + mp.sqrt(max(-c, 0)) + 1
        x_max = 3 * abs(a) + 40
        while True:
            g2, dg2 = _taylor_step(x, g, dg, STEP, -a, c, eps)
            zeros += _sign_changes(g, g2)
            g, dg, x = g2, dg2, x + STEP
            if x > turn and g * dg > 0:
                return zeros
            if x > x_max:
                raise NoConvergence("oscillation count did not settle on the second edge group")


def shooting_morse(n_edges: int, k: int, alpha: float) -> tuple[int, int]:
    """``(n(T1), n(T2))`` on the reduced space from oscillation counts.

    T2 has the profile in its kernel, so its count is taken just below zero.
    """
    return (oscillation_count(n_edges, k, alpha, shift=-3.0),
            oscillation_count(n_edges, k, alpha, shift=-1.0, lam=-1e-6))

import numpy as np
import pytest
from scipy.integrate import quad

from lognls_star import (CountChanged, InvalidParameter, TrackingLost, continuation_count, eigencurve,
                         make_graph, slope_closed_form, slope_mu0)
from lognls_star import perturbation
from lognls_star.perturbation import alpha_grid


def quotient_by_quad(n, k):
    moment = quad(lambda x: x**3 * np.exp(-x * x), 0, np.inf)[0]
    gen2 = quad(lambda x: x**2 * np.exp(-x * x), 0, np.inf)[0]
    norm2 = k * ((n - k) / k) ** 2 * gen2 + (n - k) * gen2
    return 2 * (n - k) / k * moment / norm2


@pytest.mark.parametrize("n,k", [(3, 1), (5, 1), (5, 2), (7, 3)])
def test_slope_quotient(n, k):
    ref = quotient_by_quad(n, k)
    assert slope_closed_form(n) == pytest.approx(ref, rel=1e-12)
    assert slope_mu0(n, k) == pytest.approx(ref, rel=1e-8)


def test_slope_values():
    assert slope_closed_form(3) == pytest.approx(0.75225, abs=1e-5)
    assert slope_mu0(5, 1) == pytest.approx(slope_mu0(5, 2), rel=1e-10)
    assert slope_closed_form(5) == pytest.approx(0.45135, abs=1e-5)


@pytest.fixture(scope="module")
def curve31():
    return eigencurve(3, 1, [-0.04, -0.02, 0.02, 0.04], make_graph(3, 10.1, 2000))


def test_curve_passes_through_kernel(curve31):
    assert abs(curve31.mu2_at_zero) <= curve31.tol_zero
    assert curve31.kernel_similarity > 0.999
    assert curve31.sign_pattern_ok
    assert np.all(curve31.overlaps > 0.9)
    assert curve31.jump_flags == []


def test_curve_slope_and_convergence(curve31):
    assert curve31.relative_gap < 0.02
    a, mu = curve31.alphas, curve31.mu2
    fd04 = (mu[a == 0.04][0] - mu[a == -0.04][0]) / 0.08
    e2 = abs(curve31.slope_fd - curve31.slope_analytic)
    e4 = abs(fd04 - curve31.slope_analytic)
    # centered differences: halving delta cuts the error by about four
    assert e4 / e2 == pytest.approx(4.0, rel=0.15)
    assert curve31.slope_richardson == pytest.approx(curve31.slope_analytic, rel=1e-4)


def test_curve_parallel_matches_serial():
    g = make_graph(5, 10.1, 600)
    a = eigencurve(5, 2, [-0.05, 0.05], g)
    b = eigencurve(5, 2, [-0.05, 0.05], g, workers=3)
    assert np.array_equal(a.mu2, b.mu2)


def test_curve_needs_symmetric_pair():
    with pytest.raises(InvalidParameter):
        eigencurve(3, 1, [0.02, 0.05], make_graph(3, 10.1, 200))


def test_tracking_lost(monkeypatch):
    monkeypatch.setattr(perturbation, "OVERLAP_MIN", 1.01)
    with pytest.raises(TrackingLost):
        eigencurve(3, 1, [-0.05, 0.05], make_graph(3, 10.1, 200))


def test_alpha_grid():
    a = alpha_grid(-10, -0.1, 25)
    assert len(a) == 25 and a[0] == pytest.approx(-10) and a[-1] == pytest.approx(-0.1)
    assert np.allclose(np.diff(np.log(-a)), np.log(0.01) / 24)
    assert np.allclose(alpha_grid(0.1, 1.0, 10, "linear"), np.linspace(0.1, 1.0, 10))
    for bad in [(-1, 1, 5, "log"), (0, 1, 5, "log"), (0.1, 1, 1, "log"), (0.1, 1, 5, "cubic")]:
        with pytest.raises(InvalidParameter):
            alpha_grid(*bad)


def test_continuation_seven_edges():
    rep = continuation_count(7, 3, -5.0, -0.2, steps=5, m_points=1500)
    assert rep.constant and rep.count == 2 and rep.matches_theory
    assert set(rep.methods) <= {"finite-difference", "shooting"}


def test_continuation_positive_ray_uses_shooting_where_unresolved():
    rep = continuation_count(3, 1, 0.5, 8.0, steps=4, m_points=1500)
    assert rep.counts == [1, 1, 1, 1]
    assert rep.methods[0] == "finite-difference"
    assert rep.methods[-1] == "shooting"
    assert rep.to_dict()["samples"][-1]["mu2"] is None


def test_count_change_is_reported(monkeypatch):
    counts = iter([(2, 0, "finite-difference", -0.1), (1, 0, "finite-difference", 0.1)])
    monkeypatch.setattr(perturbation, "_sample_count", lambda *a: next(counts))
    with pytest.raises(CountChanged) as info:
        continuation_count(3, 1, -1.0, -0.5, steps=2)
    assert info.value.report.counts == [2, 1]

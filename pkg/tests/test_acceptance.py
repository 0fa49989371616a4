"""Acceptance criteria 1-11 at the reference resolution (M = 4000, L = |a_k| + 10).

Each test prints one ``criterion n: PASS|FAIL`` line; the lines are repeated
in the pytest terminal summary.  Run alone with ``pytest tests/test_acceptance.py``.
"""
import numpy as np
import pytest
import scipy.linalg as sla

from lognls_star import (ProfileParams, Stability, assemble_t1, assemble_t1_kirchhoff, assemble_t2, charge,
                         continuation_count, eigen_lowest, eigencurve, equivariant_kernel_generator,
                         equivariant_perturbation, evolve, instability_growth_rate, kirchhoff_kernel_basis,
                         linearization_spectrum, make_graph, profile, reduce, restrict_equivariant,
                         stability_verdict, verify_morse_bounds)
from lognls_star.profiles import auto_length

M = 4000
GRID_NK = [(3, 1), (5, 1), (5, 2), (7, 3)]
GRID_ALPHA = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0]


def cosine(A, u, v):
    return abs(A.inner(u, v)) / np.sqrt(abs(A.inner(u, u) * A.inner(v, v)))


def max_angle(A, vecs, basis):
    s = np.sqrt(A.weights)[:, None]
    return float(np.max(sla.subspace_angles(s * vecs, s * basis)))


def test_criterion_01_kirchhoff_anchor(criterion):
    errs = []
    for m in (M, 2 * M):
        g = make_graph(3, 10.0, m)
        rep = eigen_lowest(assemble_t1_kirchhoff(3, g), 1)
        errs.append(abs(rep.eigenvalues[0] + 2.0))
    phi0 = profile(ProfileParams(3, 0, 0.0), make_graph(3, 10.0, M)).vector()
    g = make_graph(3, 10.0, M)
    rep = eigen_lowest(assemble_t1_kirchhoff(3, g), 1)
    sim = cosine(rep.operator, rep.eigenvectors[:, 0], phi0)
    ok = errs[0] < 1e-3 and errs[1] < 4e-4 and sim > 0.9999
    criterion(1, ok, f"|lam+2| = {errs[0]:.2e} (M={M}), {errs[1]:.2e} (M={2 * M}), "
                     f"ratio {errs[0] / errs[1]:.2f}, similarity {sim:.8f}")


def test_criterion_02_kirchhoff_kernel(criterion):
    details, ok = [], True
    for n in (2, 3, 5, 7):
        g = make_graph(n, 10.0, M)
        A = assemble_t1_kirchhoff(n, g)
        rep = eigen_lowest(A, n + 2)
        ker = rep.eigenvectors[:, np.abs(rep.eigenvalues) <= rep.tol_zero]
        basis = np.column_stack([f.vector() for f in kirchhoff_kernel_basis(n, g)])
        ang = max_angle(A, ker, basis)
        ok &= rep.kernel_dim == n - 1 and ang < 1e-3
        red_dims, red_ang = [], 0.0
        for k in range(1, (n - 1) // 2 + 1):
            R = restrict_equivariant(A, k)
            rr = eigen_lowest(R, 3)
            gen = reduce(equivariant_kernel_generator(n, k, g), k).vector()[:, None]
            kv = rr.eigenvectors[:, np.abs(rr.eigenvalues) <= rr.tol_zero]
            red_dims.append(rr.kernel_dim)
            if kv.shape[1]:
                red_ang = max(red_ang, max_angle(R, kv, gen))
            ok &= rr.kernel_dim == 1 and kv.shape[1] == 1 and red_ang < 1e-3
        details.append(f"N={n}: full {rep.kernel_dim} (angle {ang:.1e}), reduced {red_dims} (angle {red_ang:.1e})")
    criterion(2, ok, "; ".join(details))


@pytest.fixture(scope="module")
def grid_results():
    out = {}
    for n, k in GRID_NK:
        for alpha in GRID_ALPHA:
            p = ProfileParams(n, k, alpha)
            g = make_graph(n, auto_length(p.a_k), M)
            T1 = restrict_equivariant(assemble_t1(p, g), k)
            T2 = restrict_equivariant(assemble_t2(p, g), k)
            r1 = eigen_lowest(T1, 4)
            r2 = eigen_lowest(T2, 3)
            phi = reduce(profile(p, g), k).vector()
            out[n, k, alpha] = {
                "t2_low": r2.eigenvalues[0], "t2_second": r2.eigenvalues[1],
                "t2_sim": cosine(T2, r2.eigenvectors[:, 0], phi),
                "t1_min_abs": float(np.min(np.abs(r1.eigenvalues))), "tol": r1.tol_zero,
                "verdict": stability_verdict(n, k, alpha, g, refine=True),
                "bound": verify_morse_bounds(n, k, alpha, g, raise_on_violation=False),
            }
    return out


def test_criterion_03_t2_structure(criterion, grid_results):
    low = max(abs(r["t2_low"]) for r in grid_results.values())
    sim = min(r["t2_sim"] for r in grid_results.values())
    second = min(r["t2_second"] for r in grid_results.values())
    ok = low <= 1e-6 and sim > 0.999 and second > 0.05
    criterion(3, ok, f"{len(grid_results)} cases: max |lam_0| {low:.2e}, min similarity {sim:.6f}, "
                     f"min lam_1 {second:.3f}")


def test_criterion_04_t1_kernel_trivial(criterion, grid_results):
    ratios = {key: r["t1_min_abs"] / r["tol"] for key, r in grid_results.items()}
    worst = min(ratios, key=ratios.get)
    ok = all(v > 10 for v in ratios.values())
    criterion(4, ok, f"min |eig(T1)| / tol_zero = {ratios[worst]:.1f} at (N,k,alpha)={worst}")


def test_criterion_05_morse_table(criterion, grid_results):
    bad = []
    for (n, k, alpha), r in grid_results.items():
        v = r["verdict"]
        want = 2 if alpha < 0 else 1
        status = Stability.SPECTRALLY_UNSTABLE if alpha < 0 else Stability.STABLE
        if v.morse != want or v.status is not status or not v.hypotheses.get("refinement_stable"):
            bad.append((n, k, alpha, v.morse, v.status.value))
    criterion(5, not bad, f"{len(grid_results) - len(bad)}/{len(grid_results)} cases match "
                          f"(2 for alpha<0, 1 for alpha>0, refinement-stable){'; bad ' + str(bad) if bad else ''}")


def test_criterion_06_appendix_bounds(criterion, grid_results):
    rows = [(key, r["bound"]) for key, r in grid_results.items()]
    bad = [(key, b.count, b.bound) for key, b in rows if not b.holds]
    counts = sorted({(key[0], key[1], "neg" if key[2] < 0 else "pos", b.count, b.bound) for key, b in rows})
    criterion(6, not bad, f"full-graph n(T1) vs bound: {counts}")


def test_criterion_07_slope(criterion):
    details, ok = [], True
    for n, k in [(3, 1), (5, 1), (5, 2)]:
        c = eigencurve(n, k)
        ok &= c.relative_gap < 0.02 and c.sign_pattern_ok
        details.append(f"({n},{k}) fd {c.slope_fd:.5f} vs 4/(N sqrt pi) {c.slope_analytic:.5f} "
                       f"gap {100 * c.relative_gap:.3f}% signs {'ok' if c.sign_pattern_ok else 'WRONG'}")
    criterion(7, ok, "; ".join(details))


def test_criterion_08_continuation(criterion):
    details, ok = [], True
    for n, k in [(3, 1), (5, 2)]:
        for lo, hi in [(-10.0, -0.1), (0.1, 10.0)]:
            rep = continuation_count(n, k, lo, hi, steps=25, raise_on_change=False)
            ok &= rep.matches_theory
            details.append(f"({n},{k}) [{lo:g},{hi:g}] counts {sorted(set(rep.counts))} "
                           f"(shooting on {rep.methods.count('shooting')}/25)")
    criterion(8, ok, "; ".join(details))


def test_criterion_09_linearization(criterion):
    neg = linearization_spectrum(3, 1, -1.0, check_block=True)
    pos = linearization_spectrum(3, 1, 1.0, check_block=True)
    sym = max(neg.symmetry_defect, pos.symmetry_defect)
    law = max(neg.lambda2_residual, pos.lambda2_residual)
    ok = neg.abscissa > 0.05 and pos.abscissa <= 1e-4 and sym < 1e-6 and law < 1e-8
    criterion(9, ok, f"abscissa {neg.abscissa:.5f} (alpha=-1), {pos.abscissa:.1e} (alpha=+1); "
                     f"symmetry defect {sym:.1e}; square-law residual {law:.1e} x ||T2 T1||")


@pytest.fixture(scope="module")
def stable_runs():
    p = ProfileParams(3, 1, 1.0)
    g = make_graph(3, auto_length(p.a_k), 2000)
    phi = profile(p, g)
    U0 = phi + equivariant_perturbation(p, g, 1e-2, seed=0)
    long = evolve(U0, p.alpha, 20.0, 1e-3, trace_stride=100, reference=phi)
    coarse = evolve(U0, p.alpha, 10.0, 2e-3, trace_stride=50, reference=phi)
    wave = evolve(phi, p.alpha, 5.0, 1e-3, trace_stride=100)
    return long, coarse, wave


def test_criterion_10_dynamics(criterion, stable_runs):
    long, coarse, wave = stable_runs
    err_a = float(wave.orbital_distance.max())
    upto10 = long.times <= 10.0 + 1e-9
    q = long.charge[upto10]
    e = long.energy[upto10]
    q_drift = float(np.max(np.abs(q - q[0])) / q[0])
    e_fine = float(np.max(np.abs(e - e[0])) / abs(e[0]))
    e_coarse = coarse.energy_drift()
    order = e_coarse / e_fine
    fit = instability_growth_rate(3, 1, -1.0, 1e-4)
    d = long.orbital_distance
    growth = float(d.max() / d[0])
    checks = {
        "a": err_a < 1e-4,
        "b": q_drift < 1e-9 and e_fine < 1e-5 and 3.0 <= order <= 5.0,
        "c": 0.9 <= fit.ratio <= 1.1,
        "d": growth <= 5.0,
    }
    criterion(10, all(checks.values()),
              f"(a) wave error {err_a:.1e}; (b) charge {q_drift:.1e}, energy {e_fine:.1e}, dt-halving ratio "
              f"{order:.2f}; (c) rate {fit.rate_fit:.4f} / abscissa {fit.abscissa:.4f} = {fit.ratio:.3f}; "
              f"(d) max dist / initial = {growth:.2f}; failed parts: {[k for k, v in checks.items() if not v]}")


def test_criterion_11_omega_invariance(criterion):
    g = make_graph(5, 12.0, M)
    ref = {b: b(ProfileParams(5, 2, -2.0, -1.0), g) for b in (assemble_t1, assemble_t2)}
    same = True
    ratios = []
    q0 = charge(profile(ProfileParams(5, 2, -2.0, -1.0), g))
    for omega in (0.0, 2.0):
        for b, A in ref.items():
            B = b(ProfileParams(5, 2, -2.0, omega), g)
            same &= (np.array_equal(A.matrix.data, B.matrix.data) and np.array_equal(A.matrix.indices, B.matrix.indices)
                     and np.array_equal(A.matrix.indptr, B.matrix.indptr) and np.array_equal(A.weights, B.weights))
        q = charge(profile(ProfileParams(5, 2, -2.0, omega), g))
        ratios.append(abs(q / q0 / np.exp(omega + 1) - 1))
    ok = same and max(ratios) < 1e-13
    criterion(11, ok, f"bitwise identical T1/T2 for omega in (-1, 0, 2): {same}; "
                      f"max |Q(omega)/(Q(-1) e^(omega+1)) - 1| = {max(ratios):.1e}")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))

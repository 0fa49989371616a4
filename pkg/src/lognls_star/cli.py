"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 inconclusive, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .dynamics import (LINEARIZATION_M, equivariant_perturbation, evolve, instability_growth_rate,
                       linearization_spectrum, unstable_mode)
from .errors import (CountChanged, GraphMismatch, HypothesisFailed, Inconclusive, InvalidParameter,
                     NotEquivariant, StarGraphError)
from .graph import make_graph
from .io import dumps_json, eigen_table_csv, eigencurve_csv, trace_csv
from .operators import (assemble_h_delta, assemble_t1, assemble_t1_kirchhoff, assemble_t2,
                        restrict_equivariant, write_matrix_market)
from .perturbation import continuation_count, eigencurve, slope_mu0
from .profiles import ProfileParams, auto_length, profile
from .spectral import DEFAULT_M, Stability, eigen_lowest, stability_verdict, verify_morse_bounds

EXIT_OK, EXIT_USAGE, EXIT_INCONCLUSIVE, EXIT_NUMERICAL = 0, 2, 3, 4


def _common(p: argparse.ArgumentParser, need_k=False, need_alpha=False, m_default=DEFAULT_M):
    p.add_argument("--n-edges", type=int, required=True)
    p.add_argument("--k", type=int, required=need_k, default=None)
    p.add_argument("--alpha", type=float, required=need_alpha, default=None)
    p.add_argument("--omega", type=float, default=-1.0, help="frequency; the spectra do not depend on it")
    p.add_argument("--m-points", type=int, default=m_default)
    p.add_argument("--length", type=float, default=None, help="truncation L (default |a_k| + 10)")
    p.add_argument("--output", "-o", default=None, help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lognls-star",
                                     description="Spectral stability of log-NLS standing waves on a star graph.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="lowest eigenpairs of one operator")
    _common(sp)
    sp.add_argument("--op", choices=["t1", "t2", "t1-kirchhoff", "h-delta"], required=True)
    sp.add_argument("--reduced", action="store_true", help="restrict to the k-equivariant subspace")
    sp.add_argument("--num", type=int, default=6, help="number of eigenvalues")
    sp.add_argument("--format", choices=["json", "csv"], default="json")
    sp.add_argument("--dump-matrix", default=None, help="write the symmetrized matrix (MatrixMarket)")

    rp = sub.add_parser("report", help="stability verdict with all checks")
    _common(rp, need_k=True, need_alpha=True)
    rp.add_argument("--growth", action="store_true", help="also measure the instability growth rate")
    rp.add_argument("--seed", type=float, default=1e-4, help="seed amplitude for --growth")
    rp.add_argument("--no-refine", action="store_true")

    sw = sub.add_parser("sweep", help="Morse count along an alpha-ray, or the mu2 curve")
    _common(sw, need_k=True)
    sw.add_argument("--alpha-from", type=float, default=None)
    sw.add_argument("--alpha-to", type=float, default=None)
    sw.add_argument("--steps", type=int, default=25)
    sw.add_argument("--spacing", choices=["log", "linear"], default="log")
    sw.add_argument("--curve", default=None, metavar="A1,A2,...",
                    help="comma-separated alphas; writes the mu2 curve as CSV instead")

    sl = sub.add_parser("slope", help="slope of mu2 at alpha = 0")
    _common(sl, need_k=True)

    ev = sub.add_parser("evolve", help="time evolution from the profile")
    _common(ev, need_k=True, need_alpha=True, m_default=LINEARIZATION_M)
    ev.add_argument("--seed", type=float, default=None, help="amplitude of the seeded unstable mode (alpha < 0)")
    ev.add_argument("--perturb", type=float, default=None, help="relative size of a random equivariant perturbation")
    ev.add_argument("--rng-seed", type=int, default=0)
    ev.add_argument("--t-final", type=float, default=5.0)
    ev.add_argument("--dt", type=float, default=1e-3)
    ev.add_argument("--eps-reg", type=float, default=1e-12)
    ev.add_argument("--trace-stride", type=int, default=10)
    return parser


def _emit(text: str, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "output"}
    cfg["version"] = __version__
    return cfg


def _graph(args, a_k):
    length = args.length if args.length is not None else auto_length(a_k)
    return make_graph(args.n_edges, length, args.m_points)


def _validate(parser, args):
    if args.n_edges < 2:
        parser.error("--n-edges must be >= 2")
    if args.k is not None:
        kmax = (args.n_edges - 1) // 2
        lo = 0 if getattr(args, "op", None) == "h-delta" else 1
        if not lo <= args.k <= kmax:
            parser.error(f"--k must satisfy {lo} <= k <= {kmax} for N={args.n_edges}")
    if args.m_points < 8:
        parser.error("--m-points must be >= 8")


def cmd_spectrum(args, parser):
    needs_k = args.op in ("t1", "t2") or args.reduced
    if needs_k and args.k is None:
        parser.error(f"--op {args.op}{' --reduced' if args.reduced else ''} requires --k")
    if args.op in ("t1", "t2", "h-delta") and args.alpha is None:
        parser.error(f"--op {args.op} requires --alpha")
    if args.op == "t1-kirchhoff":
        g = _graph(args, 0.0)
        A = assemble_t1_kirchhoff(args.n_edges, g)
    elif args.op == "h-delta":
        g = _graph(args, 0.0)
        A = assemble_h_delta(args.alpha, g)
    else:
        p = ProfileParams(args.n_edges, args.k, args.alpha, args.omega)
        g = _graph(args, p.a_k)
        A = (assemble_t1 if args.op == "t1" else assemble_t2)(p, g)
    if args.reduced:
        A = restrict_equivariant(A, args.k)
    if args.dump_matrix:
        write_matrix_market(A, args.dump_matrix)
    rep = eigen_lowest(A, min(args.num, A.dimension))
    cfg = _config(args)
    if args.format == "csv":
        _emit(eigen_table_csv(rep, cfg), args.output)
    else:
        doc = rep.to_dict()
        doc["config"] = cfg
        _emit(dumps_json(doc), args.output)
    return EXIT_OK


def cmd_report(args, parser):
    if args.alpha == 0:
        parser.error("--alpha must be nonzero")
    p = ProfileParams(args.n_edges, args.k, args.alpha, args.omega)
    g = _graph(args, p.a_k)
    verdict = stability_verdict(args.n_edges, args.k, args.alpha, g, omega=args.omega,
                                refine=not args.no_refine)
    bounds = verify_morse_bounds(args.n_edges, args.k, args.alpha, g, raise_on_violation=False)
    lin = linearization_spectrum(args.n_edges, args.k, args.alpha)
    doc = verdict.to_dict()
    doc["morse_bound"] = {"full_graph_n_t1": bounds.count, "bound": bounds.bound, "holds": bounds.holds}
    doc["linearization"] = lin.to_dict()
    if args.growth and args.alpha < 0:
        fit = instability_growth_rate(args.n_edges, args.k, args.alpha, args.seed)
        doc["growth"] = {"rate_fit": fit.rate_fit, "abscissa": fit.abscissa, "ratio": fit.ratio,
                         "window": list(fit.window)}
    doc["config"] = _config(args)
    _emit(dumps_json(doc), args.output)
    if verdict.status is Stability.INCONCLUSIVE:
        return EXIT_INCONCLUSIVE
    return EXIT_OK if bounds.holds else EXIT_NUMERICAL


def cmd_sweep(args, parser):
    cfg = _config(args)
    if args.curve is not None:
        try:
            alphas = [float(s) for s in args.curve.split(",") if s.strip()]
        except ValueError:
            parser.error("--curve must be a comma-separated list of numbers")
        length = args.length if args.length is not None else auto_length(
            max(abs(a) for a in alphas) / (args.n_edges - 2 * args.k))
        curve = eigencurve(args.n_edges, args.k, alphas, make_graph(args.n_edges, length, args.m_points))
        _emit(eigencurve_csv(curve, cfg), args.output)
        return EXIT_OK
    if args.alpha_from is None or args.alpha_to is None:
        parser.error("sweep needs --alpha-from and --alpha-to (or --curve)")
    try:
        rep = continuation_count(args.n_edges, args.k, args.alpha_from, args.alpha_to, args.steps,
                                 m_points=args.m_points, spacing=args.spacing)
        code = EXIT_OK
    except CountChanged as exc:
        rep, code = exc.report, EXIT_NUMERICAL
        print(f"error: {exc}", file=sys.stderr)
    doc = rep.to_dict()
    doc["config"] = cfg
    _emit(dumps_json(doc), args.output)
    return code


def cmd_slope(args, parser):
    curve = eigencurve(args.n_edges, args.k)
    doc = curve.slope_report()
    doc["slope_quadrature"] = slope_mu0(args.n_edges, args.k)
    doc["config"] = _config(args)
    _emit(dumps_json(doc), args.output)
    return EXIT_OK


def cmd_evolve(args, parser):
    if args.seed is not None and args.perturb is not None:
        parser.error("--seed and --perturb are mutually exclusive")
    if args.seed is not None and not args.alpha < 0:
        parser.error("--seed needs alpha < 0 (no unstable mode otherwise)")
    p = ProfileParams(args.n_edges, args.k, args.alpha, args.omega)
    g = _graph(args, p.a_k)
    phi = profile(p, g)
    U0 = phi
    if args.seed is not None:
        _, mode = unstable_mode(args.n_edges, args.k, args.alpha, g)
        U0 = phi + mode * args.seed
    elif args.perturb is not None:
        U0 = phi + equivariant_perturbation(p, g, args.perturb, seed=args.rng_seed)
    trace = evolve(U0, args.alpha, args.t_final, args.dt, eps_reg=args.eps_reg,
                   trace_stride=args.trace_stride, reference=phi)
    _emit(trace_csv(trace, _config(args)), args.output)
    return EXIT_OK


COMMANDS = {"spectrum": cmd_spectrum, "report": cmd_report, "sweep": cmd_sweep,
            "slope": cmd_slope, "evolve": cmd_evolve}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate(parser, args)
        return COMMANDS[args.command](args, parser)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except (InvalidParameter, GraphMismatch, NotEquivariant) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (Inconclusive, HypothesisFailed) as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except StarGraphError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except np.linalg.LinAlgError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())

"""Spectral stability of standing waves of the logarithmic NLS equation on a star graph
with a delta interaction at the vertex."""

__version__ = "0.1.0"

from .errors import (BlowupDetected, CountChanged, GraphMismatch, GroupInhomogeneous, HypothesisFailed,
                     Inconclusive, InvalidParameter, MorseBoundViolated, NoConvergence, NoGrowthWindow,
                     NotEquivariant, StarGraphError, TrackingLost)
from .graph import (GraphField, ReducedField, StarGraph, l2_inner, l2_norm, lift, make_graph, reduce,
                    reduced_inner, weighted_h1_norm)
from .profiles import (ProfileParams, action, auto_length, charge, energy, equivariant_kernel_generator,
                       flux_defect, kirchhoff_kernel_basis, profile)
from .operators import (BandedOperator, assemble_h_delta, assemble_t1, assemble_t1_kirchhoff, assemble_t2,
                        linearization_block, restrict_equivariant, write_matrix_market)
from .spectral import (SpectralReport, Stability, Verdict, default_tol_zero, eigen_lowest, morse_index,
                       stability_verdict, verify_morse_bounds)
from .shooting import oscillation_count, shooting_morse
from .perturbation import (ContinuationReport, EigenCurve, continuation_count, eigencurve, slope_closed_form,
                           slope_mu0)
from .dynamics import (EvolutionTrace, LinearizationSpectrum, equivariant_perturbation, evolve,
                       instability_growth_rate, linearization_spectrum, orbital_distance, unstable_mode)

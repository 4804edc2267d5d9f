"""Periods, Gauss-Manin / Picard-Fuchs connections and monodromy for the
genus-2 family  w^2 = (x-a1)(x-a2)(x-a3)(x^3 + h1 x + h2).

Every closed-form connection matrix is paired with an independent contour
quadrature oracle; see :mod:`pfperiods.verify` for the cross-checks.
"""
from .curve import (BranchSet, CoefficientRow, CurveSpec, DeltaRow, RootTriple, branch_set,
                    coefficient_row, delta_row, discriminant, moduli_from_roots,
                    roots_from_moduli)
from .errors import (ClearanceError, ConvergenceError, DegenerateCurveError,
                     DegenerateModuliError, InputError, InvariantError, RootTrackingError,
                     SingularityError)
from .gauss_manin import ConnectionMatrix, gm_derivative, gm_fd_residual, gm_matrix
from .legendre import (EllipticModulus, Ebar_complete, K_complete, hyper_residual,
                       legendre_system_residual)
from .neumann import (ActionResult, NeumannConfig, action_derivatives, action_integrals,
                      cartesian_squares, elliptic_coordinates, hamiltonian_classical,
                      quartic_potential)
from .oracle import (Cycle, PeriodVector, big_loop_periods, deform_cycle, exactness_check,
                     period_vector)
from .picard_fuchs import (PFSystem, curvature_residual, pf_derivatives, pf_from_gm,
                           pf_matrices, route_equivalence, verify_root_identities)
from .transport import (ModuliPath, MonodromyResult, TransportResult, fundamental_transport,
                        monodromy, path_safety, propagate)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

"""Numerical toolkit for complex k-Hessian equations.

Elementary-symmetric-function calculus on the ellipticity cones, the complex
Hessian operator and its uniformly elliptic regularization, the explicit
Pogorelov-type barrier family with closed-form determinant, a finite-difference
Newton solver for the regularized Dirichlet problem on small balls, and
profile analysis certifying the Lipschitz-but-not-C^1 behavior of the limit.
"""

from .analysis import AxisProfile, HolderFit, KinkReport, axis_profile, holder_fit, kink_detector
from .barriers import (BarrierConstants, GammaEigs, LowerBarrierCandidate,
                       PogorelovLower, PogorelovParams, PogorelovUpper,
                       QuadraticCandidate, affine_candidate, choose_eps0,
                       choose_lambda_star, choose_M, choose_r, gamma_matrix,
                       gamma_matrix_eigs, gradient_bound_check, lower_barrier,
                       pogorelov_det, pogorelov_w, psi_and_phi, z1_modulus_candidate)
from .calculus import (Jet, complex_hessian, finite_difference_jet,
                       hermitian_eigenvalues, hermitian_eigenvalues_batch,
                       hermitian_part, j_matrix, wirtinger_gradient)
from .errors import (CertificationError, ConvergenceError, DomainError, FitError,
                     InadmissibleSpectrumError, InfeasibleRhsError,
                     InsufficientDataError, KHessianError, PreconditionError,
                     ResolutionError, SingularityError, StencilError)
from .grids import BallGrid, GridFunction, build_grid
from .operators import (CertificationReport, EllipticityReport, RhsSpec,
                        SignCheckResult, certify_rhs, check_ellipticity,
                        classical_sign_check, ellipticity_constants, eval_F,
                        eval_F_eps)
from .solver import (ContinuationResult, SandwichReport, SolveReport,
                     SolverConfig, compare, continuation_in_eps,
                     lipschitz_estimate, solve_regularized)
from .symmetric import (cone_comparison_constant, in_cone, maclaurin_chain,
                        maclaurin_constants, sigma, sigma_all, sigma_gradient,
                        sigma_root)

__version__ = "0.1.0"

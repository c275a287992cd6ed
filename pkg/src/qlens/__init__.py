"""qlens: 2D wave-packet scattering by a shallow Gaussian island.

Four independent routes to the same transverse-spreading observable:

- ``tdse``: grid reference dynamics (polynomial-expansion propagator, with
  a split-step oracle),
- ``lens``: the analytic thin-lens law for the complex radius of curvature,
- ``eikonal``: direct quadrature of the straight-path semiclassical
  propagator,
- ``classical``: boundary-value trajectories validating the straight-path
  action to second order in the potential strength.
"""

__version__ = "0.1.0"

from .classical import (ScalingReport, Trajectory, action_along, energy_drift,
                        solve_boundary_trajectory, straight_line_trajectory,
                        verify_appendix_scaling)
from .eikonal import (eikonal_action, far_field_action, far_field_stability,
                      propagate_by_quadrature, stability_factor)
from .errors import (BoundaryContaminationError, ChebyshevPlanningError,
                     DifferentiationError, GridConfigError,
                     NonNormalizableStateError, OscillationResolutionError,
                     PoleError, ShootingConvergenceError, ValidityDomainError)
from .experiments import (RunConfig, RunResult, RunRow, TimeConfig, default_config,
                          run_experiment, write_results)
from .grid import ComplexField2D, GridSpec
from .lens import (LensState, ValidityReport, apply_lens, check_validity,
                   crossing_time, evolve_rho, focal_length, free_kernel,
                   kick_phase_coefficient, lens_kernel, lens_state,
                   predict_sigma2, validity_ratio)
from .observables import (delta_sigma2, free_spreading, mean_momentum,
                          mean_position, sigma2, sigma2_free, sigma_from_profile)
from .packets import (PacketParams, packet_factor, rho_from_sigma, sigma_from_rho,
                      synthesize_packet)
from .potential import (GaussianPotential, build_matrix_a, eval_gradient,
                        eval_potential, quadratic_gap, straight_line_integral,
                        vector_identity_sides)
from .tdse import (ChebyshevPlan, HamiltonianOperator, Snapshot, apply_hamiltonian,
                   plan_chebyshev, propagate_chebyshev, propagate_splitstep,
                   read_snapshot, write_snapshot)

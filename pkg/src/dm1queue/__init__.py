"""Exact waiting-time laws, idle periods and cost control for the D/M/1 queue."""
__version__ = "0.1.0"

from .core import QueueParams, RootData, mu_zeta0_deriv_a, root_data, zeta, zeta0, zeta0_prime_s
from .distribution import MixedDistribution, MomentSummary
from .errors import (ConvergenceError, DM1Error, DomainError, ResonanceError, StabilityError,
                     TruncationError)
from .fifo import fifo_distribution, fifo_moments, lsys_moments, lsys_pmf
from .lifo import lifo_distribution, lifo_fragment, lifo_moments, theta_atoms
from .siro import (phi_numeric, siro_arc, siro_distribution, siro_g, siro_moments, siro_table,
                   verify_transform)
from .control import (CostSpec, cost, cost_derivative, cross_correlation, idle_distribution,
                      idle_moments, optimal_a, wait_idle_cross_covariance)
from .multiserver import delta_n, q_factor, slow_server_metrics
from .simulator import Policy, SimConfig, empirical_summary, run
from .special import Branch, exp_integral, lambert, laplace_numeric

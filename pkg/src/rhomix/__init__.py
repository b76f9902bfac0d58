"""Pearson phi-squared and rho-mixing diagnostics for high-dimensional
Gaussian VAR(1) and low-rank factor VARMA(1,1) time series."""
from .diagnose import Diagnosis, diagnose
from .kernels import BACKEND
from .lemmas import (check_invcovdiff_pd, check_product_spectrum, check_schur_eig_map,
                     check_singular_min_bound, run_all, run_suite)
from .mixing import (MixingReport, canonical_correlations, decay_fit, expodecay_lift,
                     mixing_report, rho_n, rho_sequence, submultiplicativity_check)
from .models import (AssumptionCertificate, DimensionSchedule, Var1Model, Varma11Model,
                     certify_assumptions, dimension_schedule, make_var1, make_varma11,
                     random_var1, random_varma11)
from .montecarlo import (EmpiricalEstimates, SimulationRun, SweepTargets,
                         empirical_covariances, empirical_phi2_contingency,
                         empirical_rho1_plugin, marginal_invariance_check, simulate,
                         triangular_array_run)
from .phi2 import (Phi2Report, phi2_bound_var1, phi2_bound_varma, phi2_from_canonical_corrs,
                   phi2_general, phi2_report, phi2_var1_closed, phi2_varma_closed)
from .stationary import (StationaryCovariances, assemble_joint, lag_cross_cov,
                         solve_stationary, solve_stationary_var1, solve_stationary_varma11,
                         stationary_covariances)

__version__ = "0.1.0"

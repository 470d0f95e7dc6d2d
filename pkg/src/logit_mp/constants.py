"""
Numeric defaults and environment switches used across logit-mp.
"""

# Cutting plane
DEFAULT_EPS = 1e-5
DEFAULT_M_BAR = 3
DEFAULT_MAX_ITERS = 500
DEFAULT_SEP_TIME_LIMIT = 800.0
STALL_ITERATIONS = 10

# Solver
DEFAULT_TIME_LIMIT = 3600.0
DEFAULT_REL_GAP = 5e-4
FEASIBILITY_TOL = 1e-7

# Tolerances
CHOICE_TOL = 1e-9
NEGATIVE_WEIGHT_TOL = 1e-9
HULL_TOL = 1e-7
UTILITY_OVERFLOW = 700.0

# Enumeration guards (number of products)
ENUMERATION_LIMIT = 20
BRUTE_FORCE_LIMIT = 24
ROBUST_BRUTE_FORCE_LIMIT = 20
HULL_LIMIT = 16

# Estimation
MLE_GRAD_TOL = 1e-6
MLE_MAX_ITERS = 1000
MLE_PARAM_NORM_GUARD = 50.0

# Persistence
SCHEMA_VERSION = 1

# Environment
BACKEND_ENV_VAR = "LOGIT_MP_BACKEND"
LP_DUMP_ENV_VAR = "LOGIT_MP_DUMP_LP"
DEFAULT_BACKEND = "highs"

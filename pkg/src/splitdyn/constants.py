"""Central knob file: every budget, cap and numeric tolerance lives here.

All heights are natural-log units.  The caps are desk-scale choices, not
mathematical limits; raising them trades time for reach.
"""

# --- exact polynomial arithmetic ------------------------------------------
ITERATE_DEGREE_CAP = 2**20      # refuse f^k once (deg f)^k exceeds this
FACTOR_DEGREE_CAP = 128         # rational factorization degree limit
PUSHFORWARD_DEGREE_CAP = 128

# --- integer factorization budget ------------------------------------------
TRIAL_DIVISION_BOUND = 10**6
POLLARD_RHO_MAX_ITERS = 2**24

# --- dynamical searches ------------------------------------------------------
COMMUTE_N_MAX = 4               # default bound on the iterate exponent N
CLASSIFY_ESCAPE_KMAX = 16       # critical-orbit steps before giving up
ENUMERATE_DEG_BOUND = 64

# --- p-adic certificates ------------------------------------------------------
PRIME_BOUND_DEFAULT = 500
M_MAX_DEFAULT = 6
ORBIT_AVOIDANCE_HORIZON = 200   # exact-membership pre-check steps
ORBIT_HEIGHT_CAP = 5e4          # stop exact iteration past this Weil height
ORBIT_SPACE_BUDGET = 10**7      # refuse orbit_mod beyond this many states

# --- numerics ------------------------------------------------------------------
ABERTH_MAX_ITERS = 3000
ABERTH_TOL = 1e-14              # relative Newton-correction stop
ROOT_RESIDUAL_TOL = 1e-8        # scaled backward-error certificate
MAHLER_NUMERIC_SLACK = 1e-6     # slack added when Mahler feeds exact bounds
DEFAULT_TARGET_ERROR = 1e-8     # canonical-height error bound
CANONICAL_DIGIT_CAP = 10**6     # decimal-digit budget for exact iterates

REPORT_SCHEMA_VERSION = "1"

import os
from fractions import Fraction

'''
Every convention constant of the library lives here, so that reports can print
the values they were computed with.

Degrees follow the total-degree grading: f(λz) = λ^k f(z) has degree k.
The analytic side (and the α bookkeeping of WZW data) uses the opposite sign,
so the flip is applied in exactly one place: ANALYTIC_DEGREE_SIGN.
'''

GRADING_SIGN = 1
ANALYTIC_DEGREE_SIGN = -1

# curvature C_ij of a connection, always with i < j
CURL_ORIENTATION = "d_i E_j - d_j E_i"

# flatness identity C_ij + scale * B_ij = 0 for each convention name
FLATNESS_BRACKET_SCALE = {"half": Fraction(1, 2), "paper": Fraction(1, 2), "standard": Fraction(1)}

# parallel transport integrates Y' = TRANSPORT_SIGN * A(s) Y
TRANSPORT_SIGN = -1

POLE_DISTANCE = 1e-6
LOOP_RADIUS_FRACTION = Fraction(1, 8)
LOOP_VERTICES = 64

DEFAULT_SEED = 0
DEFAULT_LINES = 64

# the KZ 1-form is taken along dz_l for the l-th matrix
KZ_DIFFERENTIAL = "dz_l"


def thread_count():
    "Number of worker threads allowed by TREEALG_THREADS (1 means serial)"
    value = os.environ.get("TREEALG_THREADS", "1")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def conventions():
    "Return the conventions in force, as embedded in every CLI report"
    return {
        "grading_sign": GRADING_SIGN,
        "analytic_degree_sign": ANALYTIC_DEGREE_SIGN,
        "curl_orientation": CURL_ORIENTATION,
        "transport_sign": TRANSPORT_SIGN,
        "kz_differential": KZ_DIFFERENTIAL,
    }

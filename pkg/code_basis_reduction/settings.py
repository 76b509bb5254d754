"""
Package wide defaults. Every value that is worth tuning per machine can be
overridden from the environment.
"""

import os

# largest field order handled by gf.FieldSpec
MAX_FIELD_ORDER = 2**16

# exhaustive shortest-codeword search enumerates about 2**EXHAUSTIVE_CUTOFF_BITS words
EXHAUSTIVE_CUTOFF_BITS = int(
    os.environ.get("CODE_BASIS_REDUCTION_EXHAUSTIVE_CUTOFF_BITS") or 20
)

LEE_BRICKELL_WEIGHT = int(os.environ.get("CODE_BASIS_REDUCTION_LEE_BRICKELL_WEIGHT") or 2)
LEE_BRICKELL_BUDGET_FACTOR = int(
    os.environ.get("CODE_BASIS_REDUCTION_LEE_BRICKELL_BUDGET_FACTOR") or 50
)

# practical BKZ loop cap is BKZ_CAP_FACTOR * n * k
BKZ_CAP_FACTOR = int(os.environ.get("CODE_BASIS_REDUCTION_BKZ_CAP_FACTOR") or 10_000)

APPROX_GRIESMER_SKIP_THRESHOLD = int(
    os.environ.get("CODE_BASIS_REDUCTION_SKIP_THRESHOLD") or 6
)

# fundamental-domain weight distributions are only offered for small fields
WDIST_MAX_Q = 16

BENCH_WORKERS = int(os.environ.get("CODE_BASIS_REDUCTION_WORKERS") or 1)

# fresh random codes drawn per trial before a selective-reduction failure is recorded
SELECTIVE_MAX_ATTEMPTS = int(os.environ.get("CODE_BASIS_REDUCTION_SELECTIVE_ATTEMPTS") or 20)

LOG_LEVEL = os.environ.get("CODE_BASIS_REDUCTION_LOG_LEVEL") or "WARNING"

"""greedylab: exact greedy-approximation quantities for block sequence spaces.

Computes thresholding (greedy) errors, best N-term errors, democracy
functions and approximation-space quasi-norms for lattice-unconditional
bases, and reproduces two constructions: a block space whose left
democracy function is not doubling, and the two-pool vectors showing that
greedy approximation is not optimal for non-democratic bases.
"""

from .errors import (
    CapacityError,
    GreedyLabError,
    OracleUnavailableError,
    ScheduleTooShallowError,
    TermBudgetError,
    TieBudgetError,
    TruncationError,
)
from .schedule import BlockSchedule, arithmetic_schedule, squares_schedule
from .vectors import CompressedVector, TieDescriptor, canonicalize, indicator, top_magnitudes
from .spaces import (
    Block,
    NormValue,
    SpaceSpec,
    lattice_check,
    space_from_json,
    space_norm,
    sup_form_norm_oracle,
    trunc_block_norm,
)
from .errorseq import ErrorSequence, TabulatedErrorSequence, TwoPoolErrorSequence
from .greedy import (
    GreedyOutcome,
    democracy_constant,
    error_sequence,
    gamma,
    greedy_constant,
    sigma_exact,
    sigma_oracle_grid,
)
from .democracy import (
    CghmSequences,
    DemFunTable,
    DemPoint,
    cghm_construct,
    condition71_check,
    demfun_bruteforce,
    demfun_dp,
    demfun_table,
    doubling_scan,
    prefix_norm_conjecture_check,
)
from .approx import (
    ApproxParams,
    RatioReport,
    XsConstruction,
    approx_quasinorm,
    build_xs,
    envelope,
    greedy_quasinorm,
    optimality_experiment,
    quasinorm_bounds,
)

__version__ = "0.1.0"

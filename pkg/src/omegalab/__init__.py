"""Exact simulations of use-bounded reductions between left-c.e. reals.

Dyadic arithmetic, use functions and their signatures, the h-load game,
truncated sums, the priority construction against adversaries, coding a
real into a set, and Kraft-Chaitin based reductions.
"""

from .dyadic import ONE, ZERO, Dyadic, bits, first_digit_difference, leftmost_change, least_increment, prefix
from .usefn import (
    BudgetExceeded,
    ConstructionPlan,
    Signature,
    UseTable,
    build_plan,
    condensation_check,
    desk_signature,
    partition_J,
    signature_of,
    space_transform,
)
from .bounds import lower_bound_report, truncate, truncated_sums
from .games import (
    accumulation_check,
    compare_strategies,
    false_bound_search,
    general_check,
    hload,
    hload_final,
    least_effort,
    offset_use,
    predict_atomic,
    predict_general,
    table_use,
)
from .construction import LeastEffortTracker, run_construction, verify_requirement
from .coding import ApproxSequence, decode_real, encode_set, set_from_real
from .machines import KCState, build_reduction, decide_member, kc_alloc, reduce_real, solovay_items

__version__ = "0.1.0"

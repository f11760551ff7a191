"""Approximate continuous Frechet distance under the L-infinity norm."""

from .curves import (
    Curve,
    CurveParam,
    InvalidParameterError,
    MonotonePieces,
    as_curve,
    collapse_degenerate_1d,
    eval_curve,
    linf_dist,
    monotone_pieces,
    project,
    subcurve_diameter_1d,
)
from .decider_1d import RectangleCover, approx_frechet_1d, fast_decide_1d, rectangle_cover
from .decider_nd import DecisionOutcome, approx_decide_nd, approx_frechet, block_sweep
from .exitsets import (
    ExitSet,
    Grid,
    LabelCurve,
    RangeSuccessorDS,
    SubstringEqDS,
    badness,
    compute_shift,
    first_point_within,
    general_exit_set,
    interior_good_exit_set,
    label_curve,
    matching_label_interval,
    maximal_interval_within,
    segment_exit_set,
    substring_eq,
)
from .freespace import (
    block_propagate,
    cell_free_space,
    diagram_rows,
    exact_decide,
    exact_reachable_right_boundary,
    reachable_cells,
)
from .oracle import brute_death_time, brute_smoothing, exact_exit_set, exact_frechet
from .signatures import Signature, compute_signature, verify_signature
from .smoothing import (
    CartesianTree,
    DeathTimeTable,
    build_cartesian_tree,
    death_times,
    find_parameter,
    median,
    simplify_nd,
    simplify_report,
    truncated_smoothing,
)

__version__ = "0.1.0"

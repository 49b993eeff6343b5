"""Minimize differentiable convex functions over the integer plane.

The solver maintains a four-point unimodular set and repeatedly flips
its basis using only gradient inner products, driving the set toward an
integer minimizer.  It stops with a certificate: either a member with a
vanishing gradient, or a gradient polyhedron whose strict interior is
free of integer points, which proves the set contains an optimum.
"""

from .engine import (
    Certificate,
    CaseId,
    EVALS_PER_FLIP,
    FlipTrace,
    GRADIENT_ZERO,
    LATTICE_FREE,
    SolveConfig,
    dispatch_case,
    flip_case1,
    flip_case2,
    flip_case3,
    flip_case4,
    flip_case5,
    solve,
)
from .errors import (
    BoxTooSmall,
    BudgetExhausted,
    InternalInvariantViolation,
    InvalidRelabel,
    LatfreeError,
    LevelSetAssumptionViolated,
    NonConvexOracleDetected,
    NonFiniteValue,
    NotApplicable,
    NotStronglyConvexInX,
    NotUnimodular,
)
from .geometry import (
    ActiveSet,
    EvalLedger,
    GpSystem,
    HLineResult,
    Pattern,
    active_set,
    cuts,
    default_policy,
    h_line,
    is_connected,
    preprocess,
    preprocess_with_activity,
    strictly_cuts,
)
from .lattice import IDENTITY, UniMatrix, UnimodularSet
from .numerics import (
    EXACT,
    Rational,
    SignPolicy,
    classify_sign,
    format_scalar,
    parse_scalar,
    tolerance_policy,
)
from .oracles import (
    BlackBoxOracle,
    MixedQuadraticModel,
    QuadraticModel,
    StrongConvexityData,
    lipschitz_strongconvexity,
    quadratic_gradient,
    reduce_mixed,
)
from .verification import (
    BoundReport,
    IntegerBox,
    LatticeFreeReport,
    MonotoneReport,
    OptimumSet,
    brute_force_optimum,
    check_lattice_free,
    check_monotone_measures,
    check_proposition_bound,
    global_optimum_box,
    r_measure,
    trace_sets,
    trajectory_box,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"

"""Exact arithmetic of cubic surfaces over finite fields and the integers.

Secant-tangent spans and their generation numbers, the group of point
classes modulo collinear sums, degree-0 class quotients of a plane cubic,
and the specialization of line cycles on two integer surface families
onto those quotients, plus a seeded experiment harness and a CLI.
"""

from .errors import (
    AllZero,
    BadPrime,
    BudgetExceeded,
    CharacteristicThree,
    ConfigurationAbsent,
    ConstantsUnavailable,
    CubicspanError,
    DegreeTooLarge,
    EqualPoints,
    FamilyMismatch,
    HypothesisFailed,
    IdenticallyZero,
    LineNotOnSurface,
    NoRationalPoints,
    NotFullyRational,
    NoTernaryPoint,
    NotPrime,
    PointNotOnSurface,
    PrimeConditionFailed,
    SingularPoint,
)
from .field import ExtField, make_extension
from .projgeo import Line3, Plane3, ProjPoint, line_through, skew
from .surface import (
    CubicForm,
    classify_point,
    eckardt_points,
    fermat_cubic,
    intersect_line,
    is_smooth,
    lines_on_surface,
    surface_with_27_lines_over_f64,
    zero_points,
)
from .span import (
    SpanTable,
    find_skew_pair,
    minimal_generators,
    span_closure,
    verify_skew_singleton_span,
    verify_span_lemmas,
)
from .hsgroup import (
    GroupStructure,
    ZPresentation,
    class_diff,
    class_of,
    hs_structure,
    smith_normal_form,
    snf_with_transforms,
    ternary_bound_check,
)
from .planecubic import (
    PicQuotient,
    curve_point,
    curve_points,
    group_add,
    group_structure,
    pic_mod,
    prime_condition,
    two_division_check,
)
from .reduction import (
    good_parametrization,
    line_cycle,
    newton_polygon,
    point_search,
    rank_lower_bound,
    reduce_to_curve,
    reduction_class,
    reduction_coverage,
    surface_point,
    verify_line_relation,
)
from .harness import (
    ExperimentConfig,
    VerificationReport,
    random_smooth_surface,
    run_suite,
)

__version__ = "0.1.0"

__all__ = [
    "AllZero",
    "BadPrime",
    "BudgetExceeded",
    "CharacteristicThree",
    "ConfigurationAbsent",
    "ConstantsUnavailable",
    "CubicspanError",
    "CubicForm",
    "DegreeTooLarge",
    "EqualPoints",
    "ExperimentConfig",
    "ExtField",
    "FamilyMismatch",
    "GroupStructure",
    "HypothesisFailed",
    "IdenticallyZero",
    "Line3",
    "LineNotOnSurface",
    "NoRationalPoints",
    "NotFullyRational",
    "NoTernaryPoint",
    "NotPrime",
    "PicQuotient",
    "Plane3",
    "PointNotOnSurface",
    "PrimeConditionFailed",
    "ProjPoint",
    "SingularPoint",
    "SpanTable",
    "VerificationReport",
    "ZPresentation",
    "class_diff",
    "class_of",
    "classify_point",
    "curve_point",
    "curve_points",
    "eckardt_points",
    "fermat_cubic",
    "find_skew_pair",
    "good_parametrization",
    "group_add",
    "group_structure",
    "hs_structure",
    "intersect_line",
    "is_smooth",
    "line_cycle",
    "line_through",
    "lines_on_surface",
    "make_extension",
    "minimal_generators",
    "newton_polygon",
    "pic_mod",
    "point_search",
    "prime_condition",
    "random_smooth_surface",
    "rank_lower_bound",
    "reduce_to_curve",
    "reduction_class",
    "reduction_coverage",
    "run_suite",
    "skew",
    "smith_normal_form",
    "snf_with_transforms",
    "span_closure",
    "surface_point",
    "surface_with_27_lines_over_f64",
    "ternary_bound_check",
    "two_division_check",
    "verify_line_relation",
    "verify_skew_singleton_span",
    "verify_span_lemmas",
    "zero_points",
]

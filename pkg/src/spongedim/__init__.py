"""Exact models of grid self-affine sets and their dimension theory.

A sponge is the attractor in [0,1]^d of the affine maps x -> (x + i) / n
selected by a digit set on an integer grid with per-coordinate bases.  The
package computes its four standard dimensions in closed form, enumerates
approximate cubes and their masses under Bernoulli measures with exact
rational arithmetic, and numerically checks the scaling laws those
quantities satisfy: two-sided mass sandwiches, ball-mass scaling under a
separation condition, non-doubling growth certificates, and convergence of
rescaled pieces to product tangent sets.
"""

from .errors import (
    DecreasingBases,
    DegenerateCoordinate,
    DigitOutOfRange,
    EmptyOrSingletonDigits,
    EnumerationTooLarge,
    NonStrictBases,
    PrefixNotInSponge,
    ScaleOutOfRange,
    SpongeError,
    SpongeFileError,
    UnsupportedBoundaryTangent,
    VsscNotSatisfied,
    WordTooShort,
    ZeroMeasure,
)
from .model import (
    Sponge,
    digit_set_projection,
    fibre_count,
    has_uniform_fibres,
    load_sponge,
    project,
    satisfies_vssc,
    sponge_from_json,
    sponge_to_json,
    validate_sponge,
)
from .dims import (
    Dichotomy,
    DimReport,
    assouad_dim,
    box_dim,
    dichotomy,
    dim_report,
    hausdorff_dim,
    lg_family_csv,
    lg_family_dims,
    lg_family_grid,
    lower_dim,
    lower_via_zprime,
    report_to_json,
)
from .cubes import (
    ApproximateCube,
    BoxSet,
    ScaleExponents,
    approximate_cube,
    box_dim_slope,
    boxes_to_csv,
    boxes_to_svg,
    count_cubes,
    geometric_box,
    prefractal,
    scale_exponents,
    subcubes,
)
from .measure import (
    BernoulliMeasure,
    RationalLog,
    ball_measure_bounds,
    conditional_prob,
    coordinate_uniform,
    cube_measure,
    load_measure,
    measure_from_json,
    positive_weight_grid,
    weights_to_json,
)
from .verify import (
    DichotomyAudit,
    DoublingReport,
    DoublingVerdict,
    Mode,
    ScanReport,
    TangentConvergence,
    TangentMap,
    box_set_hausdorff,
    check_tangent_convergence,
    dichotomy_audit,
    doubling_report,
    extremal_witnesses,
    hat_digit_alphabets,
    hat_set_prefractal,
    scan_ball_ratios_vssc,
    scan_cube_ratios,
    tangent_image,
    tangent_map,
    tangent_word,
)

__version__ = "0.1.0"

__all__ = [
    "ApproximateCube",
    "BernoulliMeasure",
    "BoxSet",
    "DecreasingBases",
    "DegenerateCoordinate",
    "Dichotomy",
    "DichotomyAudit",
    "DigitOutOfRange",
    "DimReport",
    "DoublingReport",
    "DoublingVerdict",
    "EmptyOrSingletonDigits",
    "EnumerationTooLarge",
    "Mode",
    "NonStrictBases",
    "PrefixNotInSponge",
    "RationalLog",
    "ScaleExponents",
    "ScaleOutOfRange",
    "ScanReport",
    "Sponge",
    "SpongeError",
    "SpongeFileError",
    "TangentConvergence",
    "TangentMap",
    "UnsupportedBoundaryTangent",
    "VsscNotSatisfied",
    "WordTooShort",
    "ZeroMeasure",
    "approximate_cube",
    "assouad_dim",
    "ball_measure_bounds",
    "box_dim",
    "box_dim_slope",
    "box_set_hausdorff",
    "boxes_to_csv",
    "boxes_to_svg",
    "check_tangent_convergence",
    "conditional_prob",
    "coordinate_uniform",
    "count_cubes",
    "cube_measure",
    "dichotomy",
    "dichotomy_audit",
    "digit_set_projection",
    "dim_report",
    "doubling_report",
    "extremal_witnesses",
    "fibre_count",
    "geometric_box",
    "has_uniform_fibres",
    "hat_digit_alphabets",
    "hat_set_prefractal",
    "hausdorff_dim",
    "lg_family_csv",
    "lg_family_dims",
    "lg_family_grid",
    "load_measure",
    "load_sponge",
    "lower_dim",
    "lower_via_zprime",
    "measure_from_json",
    "positive_weight_grid",
    "prefractal",
    "project",
    "report_to_json",
    "satisfies_vssc",
    "scale_exponents",
    "scan_ball_ratios_vssc",
    "scan_cube_ratios",
    "sponge_from_json",
    "sponge_to_json",
    "subcubes",
    "tangent_image",
    "tangent_map",
    "tangent_word",
    "validate_sponge",
    "weights_to_json",
]

"""coilbench: semi-analytical coil field solver, uniform-field benchmark, NSGA-II."""

__version__ = "0.1.0"

from .field import (  # noqa: E402
    MU_0,
    CoilLayout,
    CornerSingularity,
    EvalPoint,
    FieldSample,
    QuadratureSpec,
    TurnGeometry,
    br_turn,
    bz_turn,
    coil_field_arrays,
    field_coil,
    field_prefactor,
)
from .benchmark import (  # noqa: E402
    BenchmarkConfig,
    ObjectivePair,
    OutOfBounds,
    REFERENCE_RADII,
    decode_design,
    evaluate,
    line_profile,
    objective_f1,
    objective_f2,
    sample_roi,
)
from .nsga2 import (  # noqa: E402
    Individual,
    NsgaConfig,
    ParetoArchive,
    crowding_distance,
    dominates,
    fast_nondominated_sort,
    hypervolume_2d,
    nsga2_run,
    polynomial_mutation,
    sbx_crossover,
)
from .oracle import (  # noqa: E402
    OracleSpec,
    loop_field_onaxis,
    oracle_br_turn,
    oracle_bz_axis,
    oracle_bz_turn,
)

__all__ = [
    "__version__",
    "MU_0",
    "CoilLayout",
    "CornerSingularity",
    "EvalPoint",
    "FieldSample",
    "QuadratureSpec",
    "TurnGeometry",
    "br_turn",
    "bz_turn",
    "coil_field_arrays",
    "field_coil",
    "field_prefactor",
    "BenchmarkConfig",
    "ObjectivePair",
    "OutOfBounds",
    "REFERENCE_RADII",
    "decode_design",
    "evaluate",
    "line_profile",
    "objective_f1",
    "objective_f2",
    "sample_roi",
    "Individual",
    "NsgaConfig",
    "ParetoArchive",
    "crowding_distance",
    "dominates",
    "fast_nondominated_sort",
    "hypervolume_2d",
    "nsga2_run",
    "polynomial_mutation",
    "sbx_crossover",
    "OracleSpec",
    "loop_field_onaxis",
    "oracle_br_turn",
    "oracle_bz_axis",
    "oracle_bz_turn",
]

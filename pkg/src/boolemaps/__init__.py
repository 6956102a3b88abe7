"""Generalized Boole transformations, their invariant measures, and ergodic-average experiments."""

from .errors import (
    BooleMapsError,
    BranchExplosion,
    DegenerateEquation,
    Divergence,
    DomainError,
    NonConvergence,
    OutsideImage,
    PoleHit,
    PoleProximity,
    RootSolveFailure,
    UnsupportedMap,
)
from .maps1d import (
    Baker,
    BooleMap1D,
    ClassicalBoole,
    ComplexFixedPoints,
    Doubling,
    Gauss,
    Map1D,
    PreimageSet,
    SpecialBoole,
    complex_fixed_points,
    eval_derivative,
    eval_map,
    interval_preimage,
    map_from_dict,
    map_from_json,
    map_to_dict,
    preimages,
)
from .measures import (
    AlphaBetaDensity,
    CauchyDensity,
    DensitySpec,
    ErgodicityClass,
    GaussDensity,
    GridDensity,
    LebesgueUnit,
    QuasiMeasureDensity,
    classify_ergodicity,
    density_eval,
    density_integral,
    quasi_measure_from_fixed_point,
)
from .transfer import (
    InvarianceReport,
    StationaryDensity,
    UlamMatrix,
    UlamPartition,
    apply_fp,
    point_preimages,
    stationary_density,
    ulam_matrix,
    verify_invariant_density,
)
from .mgf import (
    AbelRecord,
    BakerExpansion,
    BaseMeasure,
    DensityOn01,
    LebesgueOn01,
    MgfRecord,
    StieltjesAtoms,
    abel_limit,
    baker_expansion,
    build_mgf_record,
    check_functional_equation,
    measure_of,
    mgf_partial,
    modified_measure_identity,
    poisson_abel_limit,
    poisson_mgf,
    pullback_measure,
    pullback_sequence,
    schur_average,
    takagi_sum,
)
from .conjugacy import (
    CotangentConjugacy,
    ResidualReport,
    check_commutation,
    pushforward_density_check,
    xi,
)
from .boole2d import (
    Boole2DMap,
    InverseBranches2D,
    NdPreimages,
    PermutationBooleMap,
    ProductBoole2D,
    SwappedBoole2D,
    eval2d,
    eval_nd,
    inverse_branches_swapped,
    inverse_jacobians_swapped,
    jacobian_sum,
    nd_preimages,
    signed_jacobian_sum,
)
from .ergostats import (
    Histogram,
    OrbitStats,
    TimeSpaceReport,
    birkhoff_average,
    empirical_density,
    time_vs_space_report,
)

__version__ = "0.1.0"

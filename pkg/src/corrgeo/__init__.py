"""Relative-entropy measures of entanglement, discord, dissonance and
classical correlations for multipartite quantum states."""

__version__ = "0.1.0"

from .classical import (
    DephasingResult,
    MeasureValue,
    classical_correlations,
    closest_classical_state,
    closest_product_state,
    dephase,
    discord,
    dissonance,
    l_quantity,
    mid,
    original_discord,
    total_mutual_information,
)
from .entanglement import ReeOptions, ReeResult, SeparableAnsatz, ree, ree_numeric, ree_pure_bipartite
from .errors import (
    ConsistencyError,
    CorrGeoError,
    DimensionMismatch,
    InvalidDistribution,
    NonHermitian,
    NotAState,
    NotPure,
    WrongArity,
)
from .linalg import eig_hermitian, partial_trace, relative_entropy, tensor_product, von_neumann_entropy
from .report import AnalysisOptions, CorrelationReport, SweepSpec, full_analysis, subadditivity_audit, sweep
from .search import SearchOptions
from .states import (
    BasisParameters,
    MultipartiteState,
    ProductBasis,
    bell_diagonal,
    closest_separable_cluster4,
    closest_separable_w,
    cluster_state_4,
    mid_counterexample,
    random_product_basis,
    random_state,
    validate,
    w_state,
)

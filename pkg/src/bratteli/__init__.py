"""Equipped graded graphs: cotransition systems, projected measures,
transport-based intrinsic metrics, and boundary/extremality diagnostics."""

from .equipment import (
    CentralEquipment,
    EquippedGraph,
    TableEquipment,
    Violation,
    central_equipment,
    cocycle,
    validate,
)
from .graph import (
    CapExceeded,
    FinitePath,
    GradedGraph,
    VertexId,
    count_paths,
    dimensions,
    enumerate_paths,
)
from .intrinsic import (
    BaseMetricConfig,
    LacunarizationResult,
    LevelMetric,
    StandardnessReport,
    cocycle_measure,
    concentration_test,
    covering_number,
    iterate_intrinsic,
    lacunarize,
    nested_distance,
    standardness_diagnostic,
    transfer_step,
)
from .io import load_graph, load_measure, save_graph, save_measure
from .measures import LevelFunction, LevelMeasure, delta, inner, tv_distance, uniform
from .operators import (
    MarkovMatrix,
    lift_function,
    lower_measure,
    markov_matrix,
    martin_kernel,
    vertex_measure,
)
from .simplex import (
    ChoquetCluster,
    CoherentPrefix,
    MartinLimitReport,
    PoulsenReport,
    ProjectedCloud,
    choquet_decompose,
    extremality_spread,
    graph_from_projections,
    in_hull,
    martin_limit,
    omega_cloud,
    poulsen_density,
    project,
    projection_system,
)
from .transport import Coupling, FiniteMetric, brute_force_kantorovich, kantorovich
from .zoo import GraphSpec, make

__version__ = "0.1.0"

__all__ = [
    "BaseMetricConfig",
    "CapExceeded",
    "CentralEquipment",
    "ChoquetCluster",
    "CoherentPrefix",
    "Coupling",
    "EquippedGraph",
    "FiniteMetric",
    "FinitePath",
    "GradedGraph",
    "GraphSpec",
    "LacunarizationResult",
    "LevelFunction",
    "LevelMeasure",
    "LevelMetric",
    "MarkovMatrix",
    "MartinLimitReport",
    "PoulsenReport",
    "ProjectedCloud",
    "StandardnessReport",
    "TableEquipment",
    "VertexId",
    "Violation",
    "__version__",
    "brute_force_kantorovich",
    "central_equipment",
    "choquet_decompose",
    "cocycle",
    "cocycle_measure",
    "concentration_test",
    "count_paths",
    "covering_number",
    "delta",
    "dimensions",
    "enumerate_paths",
    "extremality_spread",
    "graph_from_projections",
    "in_hull",
    "inner",
    "iterate_intrinsic",
    "kantorovich",
    "lacunarize",
    "lift_function",
    "load_graph",
    "load_measure",
    "lower_measure",
    "make",
    "markov_matrix",
    "martin_kernel",
    "martin_limit",
    "nested_distance",
    "omega_cloud",
    "poulsen_density",
    "project",
    "projection_system",
    "save_graph",
    "save_measure",
    "standardness_diagnostic",
    "tv_distance",
    "transfer_step",
    "uniform",
    "validate",
    "vertex_measure",
]

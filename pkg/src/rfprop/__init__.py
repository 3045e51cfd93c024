"""Graph positional encodings from propagated random features.

The package builds sparse propagation operators from undirected graphs,
pushes random feature blocks through them with periodic renormalization,
and keeps the whole trajectory as a positional encoding. The same
machinery doubles as a subspace-iteration eigensolver (with convergence
diagnostics against a dense reference) and as a randomized trace
estimator for triangle, quadrangle and closed-walk counts.
"""

from .counting import (
    CountResult,
    TraceEstimate,
    closed_walks,
    count_with_guarantee,
    hutchinson_trace,
    quadrangle_exact,
    required_samples,
    spectral_rho,
    triangle_estimate,
    triangle_exact,
)
from .diagnostics import ConvergenceReport, StepDiagnostics, convergence_report, rate_fit, sign_align
from .errors import (
    DegenerateColumnError,
    EdgeListError,
    NumericFaultError,
    OracleCapError,
    PropagationOverflowError,
    RankCollapseError,
    RfpropError,
    ZeroTraceError,
)
from .estimator import RandomFeaturePropagation, as_graph
from .formats import (
    read_features_any,
    read_features_csv,
    read_features_rfpf,
    read_manifest,
    sha256_file,
    write_features_csv,
    write_features_rfpf,
    write_manifest,
)
from .graph import (
    Graph,
    PropagationOperator,
    build_graph,
    custom_operator,
    degrees,
    from_adjacency,
    load_edge_list,
    operator_from_name,
    random_regular_graph,
    raw_adjacency,
    sym_norm_adjacency,
    sym_norm_laplacian,
)
from .linalg import (
    ORACLE_CAP,
    EigenPairs,
    dense_mirror,
    dense_sym_eigen,
    normalize_l2,
    normalize_qr,
    principal_angles,
    spmm,
)
from .propagation import (
    DISTRIBUTIONS,
    NORMALIZATIONS,
    RfpConfig,
    Trajectory,
    TrajectorySet,
    assemble_features,
    random_block,
    rfp_step,
    run_trajectory,
    run_trajectory_set,
    sample_init,
)

__version__ = "0.1.0"

__all__ = [
    "ORACLE_CAP",
    "DISTRIBUTIONS",
    "NORMALIZATIONS",
    "ConvergenceReport",
    "CountResult",
    "DegenerateColumnError",
    "EdgeListError",
    "EigenPairs",
    "Graph",
    "NumericFaultError",
    "OracleCapError",
    "PropagationOverflowError",
    "PropagationOperator",
    "RandomFeaturePropagation",
    "RankCollapseError",
    "RfpConfig",
    "RfpropError",
    "StepDiagnostics",
    "TraceEstimate",
    "Trajectory",
    "TrajectorySet",
    "ZeroTraceError",
    "as_graph",
    "assemble_features",
    "build_graph",
    "closed_walks",
    "convergence_report",
    "count_with_guarantee",
    "custom_operator",
    "degrees",
    "dense_mirror",
    "dense_sym_eigen",
    "from_adjacency",
    "hutchinson_trace",
    "load_edge_list",
    "normalize_l2",
    "normalize_qr",
    "operator_from_name",
    "principal_angles",
    "quadrangle_exact",
    "random_block",
    "random_regular_graph",
    "raw_adjacency",
    "rate_fit",
    "read_features_any",
    "read_features_csv",
    "read_features_rfpf",
    "read_manifest",
    "required_samples",
    "rfp_step",
    "run_trajectory",
    "run_trajectory_set",
    "sample_init",
    "sha256_file",
    "sign_align",
    "spectral_rho",
    "spmm",
    "sym_norm_adjacency",
    "sym_norm_laplacian",
    "triangle_estimate",
    "triangle_exact",
    "write_features_csv",
    "write_features_rfpf",
    "write_manifest",
]

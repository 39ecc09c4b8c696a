"""Generic identifiability of linear SCM coefficients with latent confounding.

The package decides which directed-edge coefficients of a linear structural
causal model are generically identifiable from the observational covariance
matrix, using flow-graph machinery: instrumental subsets, auxiliary-variable
sets, and instrumental cutsets with an iterative driver.  Every
identification is emitted as a determinant-ratio certificate that can be
verified numerically against simulated covariances.
"""

from .graph import GraphError, KnownEdges, MixedGraph, parse_graph, serialize_graph
from .flowgraph import FlowNode, WeightedFlowGraph, build_aux_flow_graph, build_flow_graph
from .maxflow import FlowResult, VertexCut, closest_min_vertex_cut, max_vertex_flow
from .matchblock import MatchBlock, max_match_block
from .identify import (
    Certificate,
    CriterionResult,
    IdentificationResult,
    InternalInvariantError,
    SubsumptionRecord,
    avs,
    avsid,
    certificate_flow_conditions,
    ic,
    icid,
    instrumental_subsets,
    subsumption_check,
)
from .numeric import (
    CertificateCheck,
    CovarianceMatrix,
    DegenerateDenominator,
    OracleBudgetExceeded,
    Parameterization,
    covariance,
    gvl_det_oracle,
    numeric_rank,
    random_parameterization,
    trek_sum_oracle,
    verify_certificate,
    verify_certificates,
    verify_chained,
)
from .satgadget import (
    CnfError,
    CnfFormula,
    TsivBudgetExceeded,
    TsivWitness,
    brute_force_1in3sat,
    brute_force_tsiv,
    build_sat_graph,
    parse_cnf,
)
from .randgen import random_mixed_graph, random_mixed_graph_by_count

__version__ = "0.1.0"

__all__ = [
    "GraphError",
    "KnownEdges",
    "MixedGraph",
    "parse_graph",
    "serialize_graph",
    "FlowNode",
    "WeightedFlowGraph",
    "build_flow_graph",
    "build_aux_flow_graph",
    "FlowResult",
    "VertexCut",
    "max_vertex_flow",
    "closest_min_vertex_cut",
    "MatchBlock",
    "max_match_block",
    "Certificate",
    "CriterionResult",
    "IdentificationResult",
    "InternalInvariantError",
    "SubsumptionRecord",
    "instrumental_subsets",
    "avs",
    "ic",
    "icid",
    "avsid",
    "subsumption_check",
    "certificate_flow_conditions",
    "Parameterization",
    "CovarianceMatrix",
    "CertificateCheck",
    "DegenerateDenominator",
    "OracleBudgetExceeded",
    "random_parameterization",
    "covariance",
    "trek_sum_oracle",
    "gvl_det_oracle",
    "numeric_rank",
    "verify_certificate",
    "verify_certificates",
    "verify_chained",
    "CnfError",
    "CnfFormula",
    "TsivWitness",
    "TsivBudgetExceeded",
    "parse_cnf",
    "build_sat_graph",
    "brute_force_1in3sat",
    "brute_force_tsiv",
    "random_mixed_graph",
    "random_mixed_graph_by_count",
]

"""Local l2 robustness certification of ReLU classifiers with hyperplane projections."""

from .certifier import CertificationResult, CertifyConfig, Status, certify, certify_batch, expand_region
from .fixtures import FixtureSpec, generate_fixture
from .lower_bound import BoundStatus, LowerBoundConfig, LowerBoundOutcome, certified_lower_bound
from .network import (
    ActivationPattern,
    LinearLayer,
    Network,
    activation_pattern,
    classify,
    forward,
    on_decision_boundary,
    pre_activations,
)
from .oracle import enumerate_feasible_patterns, exact_min_distortion, robust_oracle
from .projection import batch_distances, project
from .regions import activation_constraints, decision_constraints, flip, pattern_key, region_affine_map
from .serialization import load_model, save_model
from .solver import RegionProblem, SolverStatus, feasibility, min_distance_on_boundary

__all__ = [
    "ActivationPattern",
    "BoundStatus",
    "CertificationResult",
    "CertifyConfig",
    "FixtureSpec",
    "LinearLayer",
    "LowerBoundConfig",
    "LowerBoundOutcome",
    "Network",
    "RegionProblem",
    "SolverStatus",
    "Status",
    "activation_constraints",
    "activation_pattern",
    "batch_distances",
    "certified_lower_bound",
    "certify",
    "certify_batch",
    "classify",
    "decision_constraints",
    "enumerate_feasible_patterns",
    "exact_min_distortion",
    "expand_region",
    "feasibility",
    "flip",
    "forward",
    "generate_fixture",
    "load_model",
    "min_distance_on_boundary",
    "on_decision_boundary",
    "pattern_key",
    "pre_activations",
    "project",
    "region_affine_map",
    "robust_oracle",
    "save_model",
]

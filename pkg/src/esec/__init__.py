"""Extended semantic event chains for manipulation actions.

Extraction of symbolic event chains from streams of 3-D boxes, chain
similarity, causal early prediction, and two-agent action chaining.
"""

from .builder import Esec, RoleMap, Sec, action_window, assign_roles, build_esec, project_sec
from .chain import ActionTiming, ChainTimeline, chain_from_table, load_table, monte_carlo, schedule_chain
from .dynamic import DynamicConfig, dsr, dsr_track
from .generator import ACTIONS, GenParams, GeometryError, generate_scene, generate_suite
from .kernels import active_backend
from .predictor import Prediction, PredictorConfig, ReferenceLibrary, predict, predictive_power
from .scene import Aabb, FrameRecord, ObjectState, SceneFormatError, SceneStream, aabb_metrics, parse_scene, serialize_scene
from .similarity import SimilarityConfig, SimilarityMatrix, cluster_dendrogram, esec_similarity, similarity_matrix
from .static import StaticConfig, between, main_ssr, shadow_area, ssr_candidates, touching

__version__ = "0.1.0"

__all__ = [
    "ACTIONS", "GenParams", "GeometryError", "generate_scene", "generate_suite",
    "Aabb", "ActionTiming", "ChainTimeline", "DynamicConfig", "Esec", "FrameRecord",
    "ObjectState", "Prediction", "PredictorConfig", "ReferenceLibrary", "RoleMap",
    "SceneFormatError", "SceneStream", "Sec", "SimilarityConfig", "SimilarityMatrix",
    "StaticConfig", "aabb_metrics", "action_window", "active_backend", "assign_roles",
    "between", "build_esec", "chain_from_table", "cluster_dendrogram", "dsr", "dsr_track",
    "esec_similarity", "load_table", "main_ssr", "monte_carlo", "parse_scene", "predict",
    "predictive_power", "project_sec", "schedule_chain", "serialize_scene", "shadow_area",
    "similarity_matrix", "ssr_candidates", "touching",
]

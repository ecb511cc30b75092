"""From deterministic hypotheses to ranked probabilistic predictions.

The pipeline in one sentence: parse equation descriptors, order them
causally, encode the order as functional dependencies, synthesize and
deploy relation schemas, load simulated trials, lift the loaded data
into U-relations over a world table, and condition those worlds on
observations to rank the competing hypotheses.
"""

from .causal import encode_fds, total_causal_mapping
from .conditioning import parse_observations
from .errors import EngineError
from .ingest import parse_descriptor, validate_structure
from .project import Project, project_lock
from .synthesis import fold_fds, synthesize_4c
from .uncertain import URelation, WorldTable, conf, repair_key

__version__ = "0.1.0"

__all__ = [
    "EngineError",
    "Project",
    "URelation",
    "WorldTable",
    "conf",
    "encode_fds",
    "fold_fds",
    "parse_descriptor",
    "parse_observations",
    "project_lock",
    "repair_key",
    "synthesize_4c",
    "total_causal_mapping",
    "validate_structure",
    "__version__",
]

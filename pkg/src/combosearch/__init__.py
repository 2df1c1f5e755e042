"""combosearch: adaptive search over categorical configuration spaces.

Samples (model, framework, compression) combinations from an evolving
probability vector, scores each evaluation as accuracy per second, and
multiplicatively reweights every combination sharing a dimension pair with
the draw - so pairings that keep failing or scoring badly stop being
sampled, and budget concentrates on the promising region.
"""

from .config import ConfigError, SearchConfig
from .core import (
    DegenerateDistributionWarning,
    SamplingState,
    SearchExhaustedError,
    init_state,
    pair_checker,
    record_failure,
    sample,
    score,
    shared_pair_count,
)
from .evaluators import (
    Evaluation,
    ExternalEvaluator,
    LandscapeSpec,
    OracleDataset,
    PlantedPair,
    SyntheticEvaluator,
    TableOracle,
    load_oracle,
    synthetic_landscape,
)
from .results import (
    NoResultError,
    ResultRecord,
    ResultsTable,
    RunState,
    RunStateError,
    best_by_m,
    emit_report,
    load_run,
    pareto_front,
    save_run,
)
from .run import SearchAbortedError, resume_run, run_search, start_run
from .space import Combination, Dimension, SearchSpace, SpaceError, load_space

__version__ = "0.1.0"

__all__ = [
    "SearchConfig",
    "ConfigError",
    "SearchSpace",
    "Dimension",
    "Combination",
    "SpaceError",
    "load_space",
    "SamplingState",
    "init_state",
    "sample",
    "score",
    "shared_pair_count",
    "pair_checker",
    "record_failure",
    "run_search",
    "start_run",
    "resume_run",
    "SearchExhaustedError",
    "SearchAbortedError",
    "DegenerateDistributionWarning",
    "Evaluation",
    "TableOracle",
    "OracleDataset",
    "load_oracle",
    "LandscapeSpec",
    "PlantedPair",
    "SyntheticEvaluator",
    "synthetic_landscape",
    "ExternalEvaluator",
    "ResultsTable",
    "ResultRecord",
    "RunState",
    "RunStateError",
    "NoResultError",
    "best_by_m",
    "pareto_front",
    "emit_report",
    "save_run",
    "load_run",
    "__version__",
]

from .base import (
    FAILURE_STATUSES,
    STATUSES,
    Evaluation,
    EvaluatorError,
)
from .oracle import (
    OracleDataset,
    OracleParseError,
    OracleRow,
    TableOracle,
    load_oracle,
    parse_oracle_csv,
)
from .synthetic import LandscapeSpec, PlantedPair, SyntheticEvaluator, synthetic_landscape
from .external import (
    PROTOCOL_VERSION,
    EvaluatorDeadError,
    ExternalEvaluator,
    ProtocolSetupError,
)

__all__ = [
    "Evaluation",
    "EvaluatorError",
    "STATUSES",
    "FAILURE_STATUSES",
    "OracleRow",
    "OracleDataset",
    "OracleParseError",
    "TableOracle",
    "load_oracle",
    "parse_oracle_csv",
    "LandscapeSpec",
    "PlantedPair",
    "SyntheticEvaluator",
    "synthetic_landscape",
    "ExternalEvaluator",
    "EvaluatorDeadError",
    "ProtocolSetupError",
    "PROTOCOL_VERSION",
]

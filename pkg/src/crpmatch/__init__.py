"""Instance-based schema matching with Chinese-Restaurant-Process string models."""

__version__ = "0.1.0"

from .crp import ModelPriors, log_acrp_joint, log_base_prob, log_gamma
from .estimators import (
    ApositionalFieldModel,
    DiscreteFieldModel,
    FieldMatcher,
    PositionalFieldModel,
)
from .evaluation import LabeledScores, auc, roc_curve, self_match_experiment, size_sweep
from .ingest import (
    DEFAULT_ALPHABET,
    Alphabet,
    DataError,
    FieldColumn,
    Table,
    filter_fields,
    load_table,
    normalize_string,
    split_subsamples,
)
from .matcher import MatchMatrix, match_matrix, match_probability, score_pair
from .models import (
    count_parameters,
    fit_apositional,
    fit_discrete,
    fit_positional,
    log_joint,
    merge_stats,
)
from .synthetic import MIXED_FIELDS, FieldSpec, generate_synthetic_table

__all__ = [
    "Alphabet", "ApositionalFieldModel", "DEFAULT_ALPHABET", "DataError", "DiscreteFieldModel",
    "FieldColumn", "FieldMatcher", "FieldSpec", "LabeledScores", "MIXED_FIELDS", "MatchMatrix",
    "ModelPriors", "PositionalFieldModel", "Table", "auc", "count_parameters", "filter_fields",
    "fit_apositional", "fit_discrete", "fit_positional", "generate_synthetic_table",
    "load_table", "log_acrp_joint", "log_base_prob", "log_gamma", "log_joint", "match_matrix",
    "match_probability", "merge_stats", "normalize_string", "roc_curve", "score_pair",
    "self_match_experiment", "size_sweep", "split_subsamples",
]

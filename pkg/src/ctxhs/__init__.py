"""ctxhs: contextualized hate speech detection over replies to news posts.

Subpackages and modules:
  corpus      ingest, topic filtering, slur-based article selection, sampling
  normalize   tweet normalization and classifier input assembly
  annotation  task assignment, judgment storage, gold labels, agreement, API
  classifier  encoder, losses, domain adaptation, training, prediction
  evalreport  splits, metrics, aggregation, error analysis, co-occurrence
  cli         the ctxhs command
"""

from .types import (
    AgreementReport,
    AnnotationRecord,
    Article,
    Assignment,
    Characteristic,
    Comment,
    ConfigurationError,
    ContextMode,
    GoldLabel,
    LABEL_ORDER,
    LexiconEntry,
    ModelInput,
    NUM_LABELS,
    SamplingConfig,
    SeedLexicon,
)

__version__ = "0.1.0"

__all__ = [
    "AgreementReport",
    "AnnotationRecord",
    "Article",
    "Assignment",
    "Characteristic",
    "Comment",
    "ConfigurationError",
    "ContextMode",
    "GoldLabel",
    "LABEL_ORDER",
    "LexiconEntry",
    "ModelInput",
    "NUM_LABELS",
    "SamplingConfig",
    "SeedLexicon",
    "__version__",
]

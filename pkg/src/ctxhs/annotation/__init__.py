from .agreement import (
    InsufficientDataError,
    UndefinedAlphaError,
    agreement_report,
    krippendorff_alpha,
)
from .gold import (
    UndecidableGoldError,
    compute_all_gold_labels,
    compute_gold_labels,
    dataset_statistics,
)
from .store import AnnotationStore, AssignmentError

__all__ = [
    "AnnotationStore",
    "AssignmentError",
    "InsufficientDataError",
    "UndecidableGoldError",
    "UndefinedAlphaError",
    "agreement_report",
    "compute_all_gold_labels",
    "compute_gold_labels",
    "dataset_statistics",
    "krippendorff_alpha",
]

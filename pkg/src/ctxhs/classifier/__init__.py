from .adapt import AdaptConfig, domain_adapt, load_adapted_encoder, save_adapted_encoder
from .losses import (
    EPSILON,
    binary_loss,
    binary_loss_grad,
    multilabel_loss,
    multilabel_loss_grad,
)
from .model import (
    EncoderConfig,
    MaskedLanguageModel,
    SequenceClassifier,
    TextEncoder,
    build_classifier,
)
from .tokenizer import WordTokenizer
from .training import (
    LabeledExample,
    Prediction,
    TrainConfig,
    TrainResult,
    learning_rate,
    load_checkpoint,
    predict,
    run_dir,
    save_checkpoint,
    set_all_seeds,
    train,
)

__all__ = [
    "AdaptConfig",
    "EPSILON",
    "EncoderConfig",
    "LabeledExample",
    "MaskedLanguageModel",
    "Prediction",
    "SequenceClassifier",
    "TextEncoder",
    "TrainConfig",
    "TrainResult",
    "WordTokenizer",
    "binary_loss",
    "binary_loss_grad",
    "build_classifier",
    "domain_adapt",
    "learning_rate",
    "load_adapted_encoder",
    "load_checkpoint",
    "multilabel_loss",
    "multilabel_loss_grad",
    "predict",
    "run_dir",
    "save_adapted_encoder",
    "save_checkpoint",
    "set_all_seeds",
    "train",
]

"""Sentiment classification for code-mixed social media text.

The model encodes each token twice: a character-level BiLSTM builds a
spelling-aware vector, and a frozen pre-trained table supplies a word
vector.  A learned per-dimension gate blends the two, a second BiLSTM
with additive attention encodes the sentence, and a softmax layer
predicts negative / neutral / positive.  Everything numeric, from the
reverse-mode autodiff tape to the Adamax optimizer, lives in this
package.
"""

from .autograd import gradient_check
from .corpus import (
    LABELS,
    Dataset,
    Sentence,
    decode_label,
    encode_label,
    parse_conll,
    parse_tsv,
    write_conll,
)
from .embeddings import CharTable, EmbeddingTable, build_shared, load_vectors
from .errors import (
    AutogradError,
    CheckpointError,
    ConfigError,
    DataError,
    DimensionError,
    MixsentError,
    NumericError,
    ParseError,
)
from .estimator import VectorGateClassifier
from .checkpoint import load_checkpoint, save_checkpoint
from .diagnostics import tiny_gradcheck
from .metrics import confusion, macro_f1, per_class, weighted_f1
from .model import MODES, ModelParams, forward, init_params
from .preprocess import NormRules, default_rules, load_rules, normalize
from .training import (
    Adamax,
    TrainConfig,
    TrainResult,
    build_model,
    cross_entropy,
    evaluate_dataset,
    load_config,
    predict_dataset,
    save_config,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "Adamax",
    "AutogradError",
    "CharTable",
    "CheckpointError",
    "ConfigError",
    "DataError",
    "Dataset",
    "DimensionError",
    "EmbeddingTable",
    "LABELS",
    "MODES",
    "MixsentError",
    "ModelParams",
    "NormRules",
    "NumericError",
    "ParseError",
    "Sentence",
    "TrainConfig",
    "TrainResult",
    "VectorGateClassifier",
    "__version__",
    "build_model",
    "build_shared",
    "confusion",
    "cross_entropy",
    "decode_label",
    "default_rules",
    "encode_label",
    "evaluate_dataset",
    "forward",
    "gradient_check",
    "init_params",
    "load_checkpoint",
    "load_config",
    "load_rules",
    "load_vectors",
    "macro_f1",
    "normalize",
    "parse_conll",
    "parse_tsv",
    "per_class",
    "predict_dataset",
    "save_checkpoint",
    "save_config",
    "tiny_gradcheck",
    "train",
    "weighted_f1",
    "write_conll",
]

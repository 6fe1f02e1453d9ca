"""Scikit-learn style wrapper around the training pipeline.

``VectorGateClassifier`` follows the estimator protocol: construction
only stores hyperparameters, ``fit`` trains and sets fitted attributes
(``params_``, ``history_``, ``classes_``), and ``predict`` /
``predict_proba`` score new sentences.  ``get_params`` / ``set_params``
and cloning work as usual, so the classifier drops into pipelines and
model-selection utilities.

Each sample is either a pre-tokenized sequence of tokens or a raw
string, in which case the normalization pipeline (with its shipped
dictionaries) runs first.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from . import model as md
from . import training as tr
from .corpus import LABELS, Dataset, Sentence, decode_label, encode_label
from .errors import ConfigError, DataError
from .preprocess import default_rules, normalize

__all__ = ["VectorGateClassifier"]


class VectorGateClassifier(BaseEstimator, ClassifierMixin):
    """Three-class sentiment classifier over code-mixed token sequences.

    ``word_vectors`` is the frozen word-embedding table (an
    ``EmbeddingTable``); it is a hyperparameter rather than fitted
    state because the table is pre-trained, not learned here.
    """

    def __init__(
        self,
        word_vectors=None,
        mode="gated",
        epochs=7,
        batch_size=128,
        dropout=0.25,
        lr=0.002,
        beta1=0.9,
        beta2=0.999,
        patience=3,
        char_dim=150,
        hidden=150,
        seed=0,
        validation_fraction=0.1,
    ):
        self.word_vectors = word_vectors
        self.mode = mode
        self.epochs = epochs
        self.batch_size = batch_size
        self.dropout = dropout
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.patience = patience
        self.char_dim = char_dim
        self.hidden = hidden
        self.seed = seed
        self.validation_fraction = validation_fraction

    def _config(self):
        return tr.TrainConfig(
            epochs=self.epochs,
            batch_size=self.batch_size,
            dropout=self.dropout,
            lr=self.lr,
            beta1=self.beta1,
            beta2=self.beta2,
            patience=self.patience,
            seed=self.seed,
            mode=self.mode,
            char_dim=self.char_dim,
            hidden=self.hidden,
        )

    def _tokens(self, sample):
        if isinstance(sample, str):
            return tuple(normalize(sample, default_rules()))
        return tuple(sample)

    def _label(self, value):
        if isinstance(value, (int, np.integer)):
            return decode_label(int(value))
        return str(value)

    def _sentences(self, X, y, prefix):
        if y is not None and len(X) != len(y):
            raise DataError(f"{len(X)} samples but {len(y)} labels")
        out = []
        for i, sample in enumerate(X):
            label = self._label(y[i]) if y is not None else None
            out.append(Sentence(f"{prefix}{i}", self._tokens(sample), None, label))
        return out

    def fit(self, X, y, X_val=None, y_val=None):
        """Train on (X, y); returns self.

        Without an explicit validation set, a deterministic
        ``validation_fraction`` holdout of the training data drives
        early stopping.
        """
        if self.word_vectors is None:
            raise ConfigError(
                "word_vectors is required: pass an EmbeddingTable at construction"
            )
        if len(X) == 0:
            raise DataError("cannot fit on an empty dataset")
        sentences = self._sentences(X, y, prefix="s")

        if X_val is not None:
            if y_val is None:
                raise DataError("X_val given without y_val")
            train_sents = sentences
            dev_sents = self._sentences(X_val, y_val, prefix="v")
        else:
            if not 0.0 < self.validation_fraction < 1.0:
                raise ConfigError(
                    "validation_fraction must be in (0, 1), "
                    f"got {self.validation_fraction}"
                )
            n_dev = max(1, round(len(sentences) * self.validation_fraction))
            if n_dev >= len(sentences):
                raise DataError(
                    "too few samples to hold out a validation set; "
                    "pass X_val and y_val explicitly"
                )
            order = np.random.default_rng(self.seed).permutation(len(sentences))
            dev_sents = [sentences[i] for i in order[:n_dev]]
            train_sents = [sentences[i] for i in order[n_dev:]]

        train_ds = Dataset(tuple(train_sents), "train")
        dev_ds = Dataset(tuple(dev_sents), "dev")
        cfg = self._config()
        params = tr.build_model(train_ds, self.word_vectors, cfg)
        result = tr.train(train_ds, dev_ds, cfg, self.word_vectors, params)

        self.params_ = result.params
        self.history_ = result.history
        self.best_epoch_ = result.best_epoch
        self.stopped_early_ = result.stopped_early
        self.classes_ = np.array(LABELS, dtype=object)
        return self

    def predict_proba(self, X):
        """Class probabilities, one row per sample, columns in
        ``classes_`` order.  Samples that normalize to zero tokens get
        probability one on neutral."""
        check_is_fitted(self, "params_")
        neutral = encode_label("neutral")
        rows = np.zeros((len(X), len(LABELS)))
        for i, sample in enumerate(X):
            tokens = self._tokens(sample)
            if not tokens:
                rows[i, neutral] = 1.0
                continue
            sentence = Sentence(f"p{i}", tokens)
            rows[i] = md.forward(sentence, self.params_, self.word_vectors).data
        return rows

    def predict(self, X):
        """Predicted label strings, one per sample."""
        proba = self.predict_proba(X)
        indices = np.argmax(proba, axis=1)
        return np.array([decode_label(int(i)) for i in indices], dtype=object)

    def score(self, X, y, sample_weight=None):
        """Mean accuracy against string or integer labels."""
        preds = self.predict(X)
        golds = np.array([self._label(v) for v in y], dtype=object)
        if sample_weight is None:
            return float(np.mean(preds == golds))
        weight = np.asarray(sample_weight, dtype=float)
        return float(np.average(preds == golds, weights=weight))

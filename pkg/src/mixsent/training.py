"""Model training: Adamax optimization, early stopping, run configuration.

The training loop shuffles sentences each epoch with a seeded generator,
averages cross-entropy over each minibatch, applies one Adamax update per
batch, and evaluates on the dev split after every epoch.  The checkpoint
with the lowest dev loss is what a run returns; training halts early once
dev loss has failed to improve for ``patience`` consecutive epochs.

Everything random in a run (character table init, parameter init, epoch
shuffling, dropout) derives from the single ``TrainConfig.seed``, so two
runs with identical inputs and config produce bit-identical results.
"""

import csv
from dataclasses import dataclass, fields

import numpy as np

from . import autograd as ag
from . import metrics
from . import model as md
from .corpus import encode_label
from .embeddings import FORMATS, init_char_table
from .errors import ConfigError, DataError, NumericError, ParseError
from .model import MODES, dropout_mask

__all__ = [
    "TrainConfig",
    "Adamax",
    "TrainResult",
    "cross_entropy",
    "dropout_mask",
    "train",
    "build_model",
    "derive_seeds",
    "evaluate_dataset",
    "predict_dataset",
    "load_config",
    "save_config",
    "write_history",
    "read_history",
]

# Floor keeps the Adamax denominator away from zero when a weight has
# never received a nonzero gradient.
U_FLOOR = 1e-8

# Probabilities are clipped here before the log so a confidently wrong
# prediction yields a large finite loss instead of an infinity.
PROB_FLOOR = 1e-12

HISTORY_COLUMNS = ("epoch", "train_loss", "dev_loss", "dev_f1")


@dataclass
class TrainConfig:
    """Hyperparameters and run settings for one training job.

    ``embeddings`` lists word-vector files in priority order (earlier
    files win token collisions).  ``mode`` selects how word and
    character representations combine; see the model module.
    """

    epochs: int = 7
    batch_size: int = 128
    dropout: float = 0.25
    lr: float = 0.002
    beta1: float = 0.9
    beta2: float = 0.999
    patience: int = 3
    seed: int = 0
    mode: str = "gated"
    char_dim: int = 150
    hidden: int = 150
    embeddings: tuple = ()
    vector_format: str = "fasttext_vec"

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError(f"epochs must be at least 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(
                f"batch_size must be at least 1, got {self.batch_size}"
            )
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(
                f"dropout must be in [0, 1), got {self.dropout}"
            )
        if self.lr <= 0.0:
            raise ConfigError(f"lr must be positive, got {self.lr}")
        if not 0.0 < self.beta1 < 1.0:
            raise ConfigError(f"beta1 must be in (0, 1), got {self.beta1}")
        if not 0.0 < self.beta2 < 1.0:
            raise ConfigError(f"beta2 must be in (0, 1), got {self.beta2}")
        if self.patience < 1:
            raise ConfigError(
                f"patience must be at least 1, got {self.patience}"
            )
        if self.char_dim < 1:
            raise ConfigError(f"char_dim must be at least 1, got {self.char_dim}")
        if self.hidden < 1:
            raise ConfigError(f"hidden must be at least 1, got {self.hidden}")
        if self.mode not in MODES:
            raise ConfigError(
                f"mode must be one of {', '.join(MODES)}, got {self.mode!r}"
            )
        if self.vector_format not in FORMATS:
            raise ConfigError(
                f"vector_format must be one of {', '.join(FORMATS)}, "
                f"got {self.vector_format!r}"
            )
        self.embeddings = tuple(self.embeddings)


def _parse_field(name, kind, raw, where):
    if kind is int:
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{where}: {name} expects an integer, got {raw!r}")
    if kind is float:
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{where}: {name} expects a number, got {raw!r}")
    if name == "embeddings":
        return tuple(part.strip() for part in raw.split(",") if part.strip())
    return raw


def load_config(path):
    """Read a flat ``key = value`` config file into a TrainConfig.

    Blank lines and lines starting with '#' are ignored.  Unknown keys
    are rejected so typos never silently fall back to a default.
    """
    by_name = {f.name: f.type for f in fields(TrainConfig)}
    values = {}
    try:
        with open(path, encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except FileNotFoundError:
        raise DataError(f"config file not found: {path}")
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ParseError(path, lineno, "expected 'key = value'")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in by_name:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = _parse_field(key, by_name[key], raw, f"{path}:{lineno}")
    return TrainConfig(**values)


def save_config(cfg, path):
    """Write a TrainConfig as a flat ``key = value`` file."""
    lines = []
    for field in fields(TrainConfig):
        value = getattr(cfg, field.name)
        if field.name == "embeddings":
            value = ",".join(value)
        lines.append(f"{field.name} = {value}")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def cross_entropy(probs, gold):
    """Negative log-likelihood of the gold class under ``probs``.

    ``probs`` is the model's class distribution (a length-3 tensor) and
    ``gold`` the integer class index.  The probability is floored at
    1e-12 so the loss stays finite.
    """
    if gold not in (0, 1, 2):
        raise DataError(f"gold label index out of range: {gold}")
    return ag.neg(ag.log(ag.clip_min(ag.pick(probs, gold), PROB_FLOOR)))


class Adamax:
    """Adamax optimizer over a named parameter dictionary.

    Keeps a first-moment estimate m and an infinity-norm estimate u per
    tensor.  The update is theta -= (lr / (1 - beta1^t)) * m / max(u, 1e-8).
    Tensors whose gradient is None are skipped, so anything excluded
    from the tape (for example frozen embeddings) is never touched.
    """

    def __init__(self, params, lr=0.002, beta1=0.9, beta2=0.999):
        self.params = dict(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.t = 0
        self.m = {name: np.zeros_like(p.data) for name, p in self.params.items()}
        self.u = {name: np.zeros_like(p.data) for name, p in self.params.items()}

    def step(self):
        """Apply one update using the gradients currently on the tensors."""
        self.t += 1
        scale = self.lr / (1.0 - self.beta1 ** self.t)
        for name, tensor in self.params.items():
            grad = tensor.grad
            if grad is None:
                continue
            if not np.all(np.isfinite(grad)):
                raise NumericError(f"non-finite gradient in {name}")
            m = self.m[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * grad
            np.maximum(self.beta2 * self.u[name], np.abs(grad), out=self.u[name])
            tensor.data -= scale * m / np.maximum(self.u[name], U_FLOOR)


def derive_seeds(seed):
    """Expand one run seed into independent per-purpose seeds."""
    state = np.random.SeedSequence(seed).generate_state(4)
    return {
        "char_table": int(state[0]),
        "init": int(state[1]),
        "shuffle": int(state[2]),
        "dropout": int(state[3]),
    }


def build_model(train_ds, vocab, cfg):
    """Initialize model parameters for a run from its config.

    The character inventory comes from the training split; the word
    dimension comes from the embedding table.
    """
    seeds = derive_seeds(cfg.seed)
    char_table = init_char_table(
        train_ds, d_c=cfg.char_dim, seed=seeds["char_table"]
    )
    return md.init_params(
        char_table,
        word_dim=vocab.dim,
        hidden=cfg.hidden,
        mode=cfg.mode,
        seed=seeds["init"],
    )


def predict_dataset(ds, params, vocab):
    """Predict a class index for every sentence, in dataset order.

    Sentences with no tokens cannot run through the encoder; they
    receive the neutral class.
    """
    neutral = encode_label("neutral")
    out = []
    for sentence in ds:
        if not sentence.tokens:
            out.append(neutral)
            continue
        probs = md.forward(sentence, params, vocab)
        out.append(int(np.argmax(probs.data)))
    return out


def evaluate_dataset(ds, params, vocab):
    """Mean cross-entropy and confusion matrix on a labeled dataset.

    Token-less sentences are excluded from the loss (there is nothing
    to encode) but still counted in the confusion matrix as neutral
    predictions, matching ``predict_dataset``.
    """
    golds = []
    for sentence in ds:
        if sentence.label is None:
            raise DataError(f"sentence {sentence.id!r} has no label")
        golds.append(encode_label(sentence.label))
    preds = []
    total = 0.0
    scored = 0
    for sentence, gold in zip(ds, golds):
        if not sentence.tokens:
            preds.append(encode_label("neutral"))
            continue
        probs = md.forward(sentence, params, vocab)
        preds.append(int(np.argmax(probs.data)))
        total += cross_entropy(probs, gold).data.item()
        scored += 1
    if scored == 0:
        raise DataError("no sentences with tokens to evaluate")
    return total / scored, metrics.confusion(golds, preds)


@dataclass
class TrainResult:
    """Outcome of a training run.

    ``params`` holds the best-dev-loss checkpoint, with ``best_epoch``
    identifying which epoch produced it.  ``history`` has one
    (epoch, train_loss, dev_loss, dev_f1) row per completed epoch.
    """

    params: object
    history: list
    best_epoch: int
    stopped_early: bool


def _snapshot(named):
    return {name: tensor.data.copy() for name, tensor in named.items()}


def _restore(named, saved):
    for name, data in saved.items():
        named[name].data[...] = data


def train(train_ds, dev_ds, cfg, vocab, params, dev_eval=None, log=None):
    """Run the full training loop and return the best checkpoint.

    ``dev_eval``, when given, replaces the default dev-set evaluation;
    it is called as ``dev_eval(params, epoch)`` and must return
    ``(dev_loss, dev_f1)``.  ``log``, when given, receives one progress
    line per epoch.
    """
    sentences = []
    skipped = 0
    for sentence in train_ds:
        if sentence.label is None:
            raise DataError(f"training sentence {sentence.id!r} has no label")
        if not sentence.tokens:
            skipped += 1
            continue
        sentences.append(sentence)
    if not sentences:
        raise DataError("no usable training sentences")
    if skipped and log is not None:
        log(f"skipping {skipped} sentence(s) with no tokens")

    if dev_eval is None:
        def dev_eval(current, epoch):
            loss, cm = evaluate_dataset(dev_ds, current, vocab)
            return loss, metrics.macro_f1(cm)

    seeds = derive_seeds(cfg.seed)
    shuffle_rng = np.random.default_rng(seeds["shuffle"])
    dropout_rng = np.random.default_rng(seeds["dropout"])
    named = md.named_parameters(params)
    opt = Adamax(named, lr=cfg.lr, beta1=cfg.beta1, beta2=cfg.beta2)

    history = []
    best = None
    best_loss = float("inf")
    best_epoch = 0
    bad_epochs = 0
    stopped_early = False

    for epoch in range(1, cfg.epochs + 1):
        order = shuffle_rng.permutation(len(sentences))
        epoch_total = 0.0
        for start in range(0, len(order), cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            ag.zero_grads(named)
            losses = []
            for index in batch:
                sentence = sentences[index]
                probs = md.forward(
                    sentence,
                    params,
                    vocab,
                    training=True,
                    rng=dropout_rng,
                    dropout=cfg.dropout,
                )
                losses.append(cross_entropy(probs, encode_label(sentence.label)))
            batch_loss = losses[0] if len(losses) == 1 else ag.mean_n(losses)
            value = batch_loss.data.item()
            if not np.isfinite(value):
                raise NumericError(
                    f"training diverged: non-finite loss at epoch {epoch}, "
                    f"batch {start // cfg.batch_size + 1}"
                )
            batch_loss.backward()
            opt.step()
            epoch_total += value * len(batch)

        train_loss = epoch_total / len(sentences)
        dev_loss, dev_f1 = dev_eval(params, epoch)
        history.append((epoch, train_loss, dev_loss, dev_f1))
        if log is not None:
            log(
                f"epoch {epoch}: train_loss={train_loss:.6f} "
                f"dev_loss={dev_loss:.6f} dev_f1={dev_f1:.4f}"
            )

        if dev_loss < best_loss:
            best_loss = dev_loss
            best = _snapshot(named)
            best_epoch = epoch
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= cfg.patience:
                stopped_early = True
                break

    if best is not None:
        _restore(named, best)
    return TrainResult(params, history, best_epoch, stopped_early)


def write_history(history, path):
    """Write per-epoch training history as CSV."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(HISTORY_COLUMNS)
        for epoch, train_loss, dev_loss, dev_f1 in history:
            writer.writerow(
                [
                    int(epoch),
                    repr(float(train_loss)),
                    repr(float(dev_loss)),
                    repr(float(dev_f1)),
                ]
            )


def read_history(path):
    """Read a history CSV back into (epoch, losses...) tuples."""
    rows = []
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if tuple(header or ()) != HISTORY_COLUMNS:
            raise ParseError(path, 1, f"unexpected history header {header}")
        for row in reader:
            rows.append((int(row[0]), float(row[1]), float(row[2]), float(row[3])))
    return rows

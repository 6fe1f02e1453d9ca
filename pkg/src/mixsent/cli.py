"""Command-line interface.

Subcommands cover the full pipeline: ``preprocess`` normalizes raw
tweets, ``stats`` summarizes a dataset, ``train`` fits a model and
writes a checkpoint plus a history CSV, ``evaluate`` scores a labeled
file, ``predict`` writes per-sentence labels, ``gradcheck`` verifies
gradients end to end, and ``sweep`` re-trains across values of one
hyperparameter.

Exit codes: 0 success, 1 usage error, 2 data/configuration error,
3 numeric failure.  Logs go to stderr; data goes to stdout or files.
The ``MIXSENT_CONFIG`` environment variable supplies a default
``--config`` path for ``train`` and ``sweep``.
"""

import argparse
import dataclasses
import os
import sys
from dataclasses import fields

from . import corpus
from . import metrics
from . import training as tr
from .checkpoint import load_checkpoint, save_checkpoint
from .corpus import LABELS, decode_label
from .diagnostics import GRADCHECK_THRESHOLD, tiny_gradcheck
from .embeddings import FORMATS, build_shared, load_vectors
from .errors import ConfigError, DataError, MixsentError, NumericError, ParseError
from .model import MODES
from .preprocess import default_rules, load_rules, normalize
from .training import TrainConfig, load_config

__all__ = ["run", "main", "ENV_CONFIG"]

ENV_CONFIG = "MIXSENT_CONFIG"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage problems as exit code 1."""

    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _log(message):
    print(message, file=sys.stderr)


# ---------------------------------------------------------------------------
# shared flag groups

def _add_format(parser):
    parser.add_argument(
        "--format",
        choices=("conll", "tsv"),
        default="conll",
        help="dataset file format (default: conll)",
    )


def _add_seed(parser, default=None):
    parser.add_argument(
        "--seed",
        type=int,
        default=default,
        help="random seed governing every stochastic choice",
    )


def _add_config_overrides(parser):
    parser.add_argument("--config", help=f"config file (default: ${ENV_CONFIG})")
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--batch-size", type=int, dest="batch_size")
    parser.add_argument("--dropout", type=float)
    parser.add_argument("--lr", type=float)
    parser.add_argument("--beta1", type=float)
    parser.add_argument("--beta2", type=float)
    parser.add_argument("--patience", type=int)
    parser.add_argument("--mode", choices=MODES)
    parser.add_argument("--char-dim", type=int, dest="char_dim")
    parser.add_argument("--hidden", type=int)
    parser.add_argument(
        "--embeddings",
        nargs="+",
        help="word-vector files in priority order (earlier files win collisions)",
    )
    parser.add_argument("--vector-format", choices=FORMATS, dest="vector_format")
    _add_seed(parser)


def _resolve_config(args):
    path = args.config or os.environ.get(ENV_CONFIG)
    cfg = load_config(path) if path else TrainConfig()
    overrides = {}
    for field in fields(TrainConfig):
        value = getattr(args, field.name, None)
        if value is not None:
            overrides[field.name] = (
                tuple(value) if field.name == "embeddings" else value
            )
    return dataclasses.replace(cfg, **overrides) if overrides else cfg


def _load_dataset(path, fmt, split="train"):
    if fmt == "tsv":
        return corpus.parse_tsv(path, split)
    return corpus.parse_conll(path, split)


def _load_word_table(cfg):
    if not cfg.embeddings:
        raise ConfigError(
            "no word-vector files configured; pass --embeddings or set "
            "'embeddings' in the config file"
        )
    tables = [load_vectors(path, cfg.vector_format) for path in cfg.embeddings]
    shared, collisions = build_shared(tables)
    _log(
        f"loaded {len(shared)} word vectors from {len(tables)} file(s), "
        f"{collisions} collision(s) resolved by priority"
    )
    return shared


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


# ---------------------------------------------------------------------------
# subcommands

def _cmd_preprocess(args):
    if args.slang or args.emoji or args.contractions:
        if not (args.slang and args.emoji and args.contractions):
            raise _UsageError(
                "mixsent preprocess: --slang, --emoji and --contractions "
                "must be given together"
            )
        rules = load_rules(args.slang, args.emoji, args.contractions)
    else:
        rules = default_rules()

    try:
        with open(args.input, encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except FileNotFoundError:
        raise DataError(f"input file not found: {args.input}") from None

    out, close = _open_out(args.output)
    try:
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) not in (2, 3):
                raise ParseError(
                    args.input, lineno, "expected 'id<TAB>text' or 'id<TAB>text<TAB>label'"
                )
            tokens = normalize(cols[1], rules)
            cols[1] = " ".join(tokens)
            out.write("\t".join(cols) + "\n")
    finally:
        if close:
            out.close()
    return 0


def _cmd_stats(args):
    ds = _load_dataset(args.data, args.format, args.split)
    report = corpus.stats(ds)
    print(f"split: {report['split']}")
    print(f"total: {report['total']}")
    print(f"unlabeled: {report['unlabeled']}")
    for label in LABELS:
        print(f"{label}: {report['labels'][label]}")
    return 0


def _default_history(out_path):
    root, _ = os.path.splitext(out_path)
    return root + ".history.csv"


def _cmd_train(args):
    cfg = _resolve_config(args)
    word_table = _load_word_table(cfg)
    train_ds = _load_dataset(args.train, args.format, "train")
    dev_ds = _load_dataset(args.dev, args.format, "dev")
    params = tr.build_model(train_ds, word_table, cfg)
    result = tr.train(train_ds, dev_ds, cfg, word_table, params, log=_log)
    save_checkpoint(args.out, result.params, word_table, cfg)
    history_path = args.history or _default_history(args.out)
    tr.write_history(result.history, history_path)
    best = result.history[result.best_epoch - 1]
    _log(
        f"best epoch {result.best_epoch}: dev_loss={best[2]:.6f} "
        f"dev_f1={best[3]:.4f}; checkpoint: {args.out}; history: {history_path}"
    )
    return 0


def _cmd_evaluate(args):
    params, word_table, _ = load_checkpoint(args.model)
    ds = _load_dataset(args.data, args.format, args.split)
    loss, cm = tr.evaluate_dataset(ds, params, word_table)
    per_class = metrics.per_class(cm)
    print(f"sentences: {len(ds)}")
    print(f"loss: {loss:.6f}")
    for label, (precision, recall, f1) in zip(LABELS, per_class):
        print(
            f"{label}: precision={precision:.4f} recall={recall:.4f} f1={f1:.4f}"
        )
    print(f"macro_f1: {metrics.macro_f1(cm):.4f}")
    print(f"weighted_f1: {metrics.weighted_f1(cm):.4f}")
    return 0


def _cmd_predict(args):
    params, word_table, _ = load_checkpoint(args.model)
    ds = _load_dataset(args.input, args.format, args.split)
    preds = tr.predict_dataset(ds, params, word_table)
    out, close = _open_out(args.output)
    try:
        for sentence, pred in zip(ds, preds):
            out.write(f"{sentence.id}{args.delimiter}{decode_label(pred)}\n")
    finally:
        if close:
            out.close()
    return 0


def _cmd_gradcheck(args):
    seed = 98 if args.seed is None else args.seed
    err = tiny_gradcheck(seed)
    print(f"max relative error: {err:.3e}")
    print(f"threshold: {GRADCHECK_THRESHOLD:.1e}")
    if err < GRADCHECK_THRESHOLD:
        print("PASS")
        return 0
    print("FAIL")
    return 3


def _cmd_sweep(args):
    by_name = {f.name: f for f in fields(TrainConfig)}
    if args.param not in by_name:
        raise _UsageError(f"mixsent sweep: unknown hyperparameter {args.param!r}")
    base = _resolve_config(args)
    word_table = _load_word_table(base)
    train_ds = _load_dataset(args.train, args.format, "train")
    dev_ds = _load_dataset(args.dev, args.format, "dev")
    kind = by_name[args.param].type
    rows = []
    for raw in args.values.split(","):
        raw = raw.strip()
        value = tr._parse_field(args.param, kind, raw, "sweep value")
        cfg = dataclasses.replace(base, **{args.param: value})
        params = tr.build_model(train_ds, word_table, cfg)
        result = tr.train(train_ds, dev_ds, cfg, word_table, params, log=_log)
        best = result.history[result.best_epoch - 1]
        _log(f"{args.param}={raw}: dev_loss={best[2]:.6f} dev_f1={best[3]:.4f}")
        rows.append((raw, best[2], best[3]))
    out, close = _open_out(args.output)
    try:
        out.write("value,dev_loss,dev_f1\n")
        for raw, dev_loss, dev_f1 in rows:
            out.write(f"{raw},{float(dev_loss)!r},{float(dev_f1)!r}\n")
    finally:
        if close:
            out.close()
    return 0


# ---------------------------------------------------------------------------
# parser assembly

def build_parser():
    parser = _Parser(
        prog="mixsent",
        description="Sentiment classification for code-mixed social media text.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("preprocess", help="normalize raw tweets into tokens")
    p.add_argument("--input", required=True, help="TSV of id<TAB>raw text[<TAB>label]")
    p.add_argument("--output", help="output TSV (default: stdout)")
    p.add_argument("--slang", help="slang dictionary TSV")
    p.add_argument("--emoji", help="emoji description TSV")
    p.add_argument("--contractions", help="contraction dictionary TSV")
    _add_seed(p)
    p.set_defaults(func=_cmd_preprocess)

    p = sub.add_parser("stats", help="print sentence and label counts")
    p.add_argument("--data", required=True)
    p.add_argument("--split", choices=corpus.SPLITS, default="train")
    _add_format(p)
    _add_seed(p)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("train", help="train a model, write checkpoint and history")
    p.add_argument("--train", required=True, help="training dataset")
    p.add_argument("--dev", required=True, help="development dataset")
    p.add_argument("--out", required=True, help="checkpoint output path")
    p.add_argument("--history", help="history CSV path (default: <out>.history.csv)")
    _add_format(p)
    _add_config_overrides(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", help="score a labeled dataset with a checkpoint")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--split", choices=corpus.SPLITS, default="dev")
    _add_format(p)
    _add_seed(p)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("predict", help="write per-sentence predicted labels")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", help="predictions file (default: stdout)")
    p.add_argument("--delimiter", default=",", help="id/label separator (default: ,)")
    p.add_argument("--split", choices=corpus.SPLITS, default="test")
    _add_format(p)
    _add_seed(p)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("gradcheck", help="verify gradients on a small fixed model")
    _add_seed(p)
    p.set_defaults(func=_cmd_gradcheck)

    p = sub.add_parser("sweep", help="re-train across values of one hyperparameter")
    p.add_argument("--param", required=True, help="config field to vary")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--train", required=True)
    p.add_argument("--dev", required=True)
    p.add_argument("--output", help="results CSV (default: stdout)")
    _add_format(p)
    _add_config_overrides(p)
    p.set_defaults(func=_cmd_sweep)

    return parser


def run(argv=None):
    """Parse argv, dispatch, and map failures to exit codes."""
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        _log(str(exc))
        return 1
    except NumericError as exc:
        _log(f"numeric failure: {exc}")
        return 3
    except MixsentError as exc:
        _log(f"error: {exc}")
        return 2
    except OSError as exc:
        _log(f"error: {exc}")
        return 2


def main():
    sys.exit(run())

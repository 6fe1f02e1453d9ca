"""Self-contained model checkpoints.

A checkpoint is one binary file: a single-line JSON header followed by
the raw float64 little-endian tensor data, concatenated in header
order.  The frozen word-embedding table is stored alongside the model
weights so a saved model predicts without the original vector files.
Serialization is fully deterministic: saving the same model twice
yields byte-identical files.
"""

import dataclasses
import json

import numpy as np

from .autograd import Tensor
from .corpus import LABELS
from .embeddings import EmbeddingTable
from .errors import CheckpointError
from .model import (
    AttnParams,
    GateParams,
    LstmParams,
    ModelParams,
    _lstm_names,
    named_parameters,
)
from .training import TrainConfig

__all__ = ["save_checkpoint", "load_checkpoint", "FORMAT_NAME", "FORMAT_VERSION"]

FORMAT_NAME = "mixsent-checkpoint"
FORMAT_VERSION = 1

WORD_TABLE = "word_table"


def _index_order(vocab):
    """Vocabulary keys sorted by their row index."""
    return [key for key, _ in sorted(vocab.items(), key=lambda kv: kv[1])]


def save_checkpoint(path, params, word_table, cfg):
    """Write model weights, vocabularies, and run config to one file."""
    named = named_parameters(params)
    order = list(named.items()) + [(WORD_TABLE, Tensor(word_table.matrix))]
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "mode": params.mode,
        "labels": list(LABELS),
        "config": dataclasses.asdict(cfg),
        "char_vocab": _index_order(params.char_vocab),
        "word_vocab": _index_order(word_table.vocab),
        "tensors": [[name, list(tensor.shape)] for name, tensor in order],
    }
    if "embeddings" in header["config"]:
        header["config"]["embeddings"] = list(cfg.embeddings)
    blob = json.dumps(header, sort_keys=True, separators=(",", ":"))
    with open(path, "wb") as handle:
        handle.write(blob.encode("utf-8"))
        handle.write(b"\n")
        for _, tensor in order:
            handle.write(np.ascontiguousarray(tensor.data, dtype="<f8").tobytes())


def _read_header(path, raw):
    newline = raw.find(b"\n")
    if newline < 0:
        raise CheckpointError(f"{path}: missing checkpoint header")
    try:
        header = json.loads(raw[:newline].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        raise CheckpointError(f"{path}: unreadable checkpoint header") from None
    if not isinstance(header, dict) or header.get("format") != FORMAT_NAME:
        raise CheckpointError(f"{path}: not a model checkpoint")
    if header.get("version") != FORMAT_VERSION:
        raise CheckpointError(
            f"{path}: checkpoint version {header.get('version')} "
            f"is not supported (expected {FORMAT_VERSION})"
        )
    if header.get("labels") != list(LABELS):
        raise CheckpointError(f"{path}: label set does not match this package")
    return header, raw[newline + 1 :]


def _read_tensors(path, header, body):
    arrays = {}
    offset = 0
    for name, shape in header["tensors"]:
        count = int(np.prod(shape, dtype=np.int64)) if shape else 1
        nbytes = count * 8
        if offset + nbytes > len(body):
            raise CheckpointError(f"{path}: truncated data for tensor {name}")
        flat = np.frombuffer(body, dtype="<f8", count=count, offset=offset)
        arrays[name] = flat.reshape(shape).astype(np.float64)
        offset += nbytes
    if offset != len(body):
        raise CheckpointError(f"{path}: {len(body) - offset} trailing bytes")
    return arrays


def _take(arrays, name, path):
    if name not in arrays:
        raise CheckpointError(f"{path}: checkpoint is missing tensor {name}")
    return arrays.pop(name)


def _lstm_from(arrays, prefix, path):
    tensors = {
        field: Tensor(_take(arrays, f"{prefix}.{field}", path))
        for field in _lstm_names()
    }
    return LstmParams(**tensors)


def _check_consistency(path, params, word_table):
    dw = word_table.dim
    if params.gate.b.shape != (dw,):
        raise CheckpointError(
            f"{path}: gate.b has shape {params.gate.b.shape} but "
            f"{WORD_TABLE} holds {dw}-dimensional vectors"
        )
    if params.gate.w.shape != (dw, dw):
        raise CheckpointError(
            f"{path}: gate.w has shape {params.gate.w.shape}, expected ({dw}, {dw})"
        )
    two_h = 2 * params.hidden
    if params.cls_w.shape != (len(LABELS), two_h):
        raise CheckpointError(
            f"{path}: cls.w has shape {params.cls_w.shape}, "
            f"expected ({len(LABELS)}, {two_h})"
        )
    if params.attn.w_e.shape != (1, two_h):
        raise CheckpointError(
            f"{path}: attn.w_e has shape {params.attn.w_e.shape}, "
            f"expected (1, {two_h})"
        )


def load_checkpoint(path):
    """Read a checkpoint back into (params, word_table, cfg)."""
    try:
        with open(path, "rb") as handle:
            raw = handle.read()
    except FileNotFoundError:
        raise CheckpointError(f"checkpoint file not found: {path}") from None
    header, body = _read_header(path, raw)
    arrays = _read_tensors(path, header, body)

    word_matrix = _take(arrays, WORD_TABLE, path)
    word_vocab = {tok: i for i, tok in enumerate(header["word_vocab"])}
    if word_matrix.shape[0] != len(word_vocab):
        raise CheckpointError(
            f"{path}: {WORD_TABLE} has {word_matrix.shape[0]} rows but the "
            f"word vocabulary lists {len(word_vocab)} tokens"
        )
    word_table = EmbeddingTable(word_vocab, word_matrix)

    char_vocab = {ch: i for i, ch in enumerate(header["char_vocab"])}
    char_emb = _take(arrays, "char_emb", path)
    if char_emb.shape[0] != len(char_vocab):
        raise CheckpointError(
            f"{path}: char_emb has {char_emb.shape[0]} rows but the "
            f"character vocabulary lists {len(char_vocab)} entries"
        )
    params = ModelParams(
        char_vocab=char_vocab,
        char_emb=Tensor(char_emb),
        char_fwd=_lstm_from(arrays, "char_fwd", path),
        char_bwd=_lstm_from(arrays, "char_bwd", path),
        sent_fwd=_lstm_from(arrays, "sent_fwd", path),
        sent_bwd=_lstm_from(arrays, "sent_bwd", path),
        gate=GateParams(
            Tensor(_take(arrays, "gate.w", path)),
            Tensor(_take(arrays, "gate.b", path)),
        ),
        attn=AttnParams(
            Tensor(_take(arrays, "attn.w_e", path)),
            Tensor(_take(arrays, "attn.b_e", path)),
        ),
        cls_w=Tensor(_take(arrays, "cls.w", path)),
        cls_b=Tensor(_take(arrays, "cls.b", path)),
        mode=header["mode"],
    )
    if arrays:
        extra = ", ".join(sorted(arrays))
        raise CheckpointError(f"{path}: unexpected tensors in checkpoint: {extra}")
    _check_consistency(path, params, word_table)
    cfg = TrainConfig(**header["config"])
    return params, word_table, cfg

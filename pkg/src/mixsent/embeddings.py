"""Pre-trained word-vector tables and the trainable character table.

The word table is a union of monolingual vector files (first table wins
on spelling collisions) and stays frozen during training. Out-of-vocab
tokens get a zero vector so the gate can route them to the character
path. The character table is small, seeded-random, and trainable.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError, DimensionError, ParseError

UNK_CHAR = "<unk>"

FORMATS = ("glove_text", "fasttext_vec")


@dataclass
class EmbeddingTable:
    """Token-to-row word vector table."""

    vocab: dict
    matrix: np.ndarray
    trainable: bool = False

    @property
    def dim(self):
        return self.matrix.shape[1]

    def __len__(self):
        return len(self.vocab)


@dataclass
class CharTable:
    """Character-to-row table including an unknown-character row."""

    chars: dict
    matrix: np.ndarray
    trainable: bool = True

    @property
    def dim(self):
        return self.matrix.shape[1]

    def __len__(self):
        return len(self.chars)


def _parse_row(path, lineno, line, dim):
    fields = line.split()
    token = fields[0]
    if dim is not None and len(fields) - 1 != dim:
        raise ParseError(path, lineno, f"expected {dim} vector components, found {len(fields) - 1}")
    try:
        values = [float(v) for v in fields[1:]]
    except ValueError:
        raise ParseError(path, lineno, "non-numeric vector component") from None
    return token, values


def load_vectors(path, fmt="fasttext_vec"):
    """Load a word-vector file in GloVe text or fastText .vec format."""
    if fmt not in FORMATS:
        raise ConfigError(f"unknown vector format {fmt!r}, expected one of {FORMATS}")
    vocab = {}
    rows = []
    declared_count = None
    dim = None
    try:
        handle = open(path, encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"vector file not found: {path}") from None
    with handle:
        lines = enumerate(handle, start=1)
        if fmt == "fasttext_vec":
            try:
                lineno, header = next(lines)
            except StopIteration:
                raise ParseError(path, 1, "missing 'count dim' header") from None
            fields = header.split()
            if len(fields) != 2 or not all(f.isdigit() for f in fields):
                raise ParseError(path, lineno, "expected 'count dim' header")
            declared_count, dim = int(fields[0]), int(fields[1])
        for lineno, raw in lines:
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            token, values = _parse_row(path, lineno, line, dim)
            if dim is None:
                dim = len(values)
                if dim == 0:
                    raise ParseError(path, lineno, "row has no vector components")
            if token in vocab:
                warnings.warn(f"{path}:{lineno}: duplicate token {token!r}, first row kept")
                continue
            vocab[token] = len(rows)
            rows.append(values)
    if declared_count is not None and len(rows) != declared_count:
        raise ParseError(path, 0, f"header declares {declared_count} rows, found {len(rows)}")
    if dim is None:
        raise ParseError(path, 0, "empty vector file")
    matrix = np.asarray(rows, dtype=np.float64).reshape(len(rows), dim)
    return EmbeddingTable(vocab, matrix, trainable=False)


def build_shared(tables):
    """Union several tables into one shared vocabulary, first table wins.

    Returns the shared table and the number of later-table rows skipped
    because their token was already present.
    """
    if not tables:
        raise DataError("no embedding tables to merge")
    dims = {table.dim for table in tables}
    if len(dims) != 1:
        raise DimensionError(f"embedding dimensions differ across tables: {sorted(dims)}")
    vocab = {}
    rows = []
    collisions = 0
    for table in tables:
        for token, index in table.vocab.items():
            if token in vocab:
                collisions += 1
                continue
            vocab[token] = len(rows)
            rows.append(table.matrix[index])
    matrix = np.asarray(rows, dtype=np.float64).reshape(len(rows), dims.pop())
    return EmbeddingTable(vocab, matrix, trainable=False), collisions


def lookup_word(table, token):
    """Return (vector, oov_flag); out-of-vocab tokens get a zero vector."""
    index = table.vocab.get(token)
    if index is None:
        return np.zeros(table.dim, dtype=np.float64), True
    return table.matrix[index].copy(), False


def init_char_table(dataset, d_c=150, r=0.05, seed=0):
    """Build the character table from a training split.

    Rows are drawn from a seeded uniform distribution in [-r, r]. The
    unknown-character row sits at index 0 and the remaining characters
    follow in sorted order, so the layout is independent of sentence
    order.
    """
    seen = set()
    for sentence in dataset:
        for token in sentence.tokens:
            seen.update(token)
    chars = {UNK_CHAR: 0}
    for ch in sorted(seen):
        chars[ch] = len(chars)
    rng = np.random.default_rng(seed)
    matrix = rng.uniform(-r, r, size=(len(chars), d_c))
    return CharTable(chars, matrix, trainable=True)


def char_index(table, ch):
    """Index of a character, falling back to the unknown row."""
    return table.chars.get(ch, table.chars[UNK_CHAR])

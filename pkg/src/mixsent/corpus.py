"""Parsing, validation, and label encoding for code-mixed datasets.

Two file grammars are supported. The primary one is a conll-style block
format: each sentence opens with a ``meta <id> <label>`` line (label
optional for unlabeled splits), followed by one ``token<TAB>langtag``
line per token, terminated by a blank line. The fallback is a flat TSV
with ``id<TAB>text<TAB>label`` rows (two columns for unlabeled data).

Label indices are fixed as negative=0, neutral=1, positive=2 so that
confusion matrices are comparable across runs.
"""

from dataclasses import dataclass, field

from .errors import DataError, ParseError

LABELS = ("negative", "neutral", "positive")
SPLITS = ("train", "dev", "test")

_LABEL_TO_INDEX = {label: i for i, label in enumerate(LABELS)}


def encode_label(label):
    """Map a sentiment string to its fixed class index."""
    try:
        return _LABEL_TO_INDEX[label]
    except KeyError:
        raise DataError(f"unknown label {label!r}, expected one of {LABELS}") from None


def decode_label(index):
    """Map a class index back to its sentiment string."""
    if not 0 <= index < len(LABELS):
        raise DataError(f"label index {index} out of range 0..{len(LABELS) - 1}")
    return LABELS[index]


@dataclass(frozen=True)
class Sentence:
    """One tweet: id, tokens, optional per-token language tags, optional label."""

    id: str
    tokens: tuple
    lang_tags: tuple = None
    label: str = None

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if self.lang_tags is not None:
            object.__setattr__(self, "lang_tags", tuple(self.lang_tags))
            if len(self.lang_tags) != len(self.tokens):
                raise DataError(
                    f"sentence {self.id!r}: {len(self.tokens)} tokens "
                    f"but {len(self.lang_tags)} language tags"
                )
        if any(not token for token in self.tokens):
            raise DataError(f"sentence {self.id!r}: empty token")
        if self.label is not None and self.label not in LABELS:
            raise DataError(f"sentence {self.id!r}: unknown label {self.label!r}")


@dataclass(frozen=True)
class Dataset:
    """An immutable list of sentences belonging to one split."""

    sentences: tuple = field(default_factory=tuple)
    split: str = "train"

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        if self.split not in SPLITS:
            raise DataError(f"unknown split {self.split!r}, expected one of {SPLITS}")
        seen = set()
        for sentence in self.sentences:
            if sentence.id in seen:
                raise DataError(f"duplicate sentence id {sentence.id!r} in {self.split} split")
            seen.add(sentence.id)

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)


def _parse_meta(path, lineno, line):
    fields = line.split()
    if len(fields) == 2:
        return fields[1], None
    if len(fields) == 3:
        if fields[2] not in LABELS:
            raise ParseError(path, lineno, f"unknown label {fields[2]!r}")
        return fields[1], fields[2]
    raise ParseError(path, lineno, "expected 'meta <id>' or 'meta <id> <label>'")


def parse_conll(path, split="train"):
    """Parse a conll-style block file into a Dataset."""
    sentences = []
    current = None  # (id, label, tokens, tags)
    try:
        handle = open(path, encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"dataset file not found: {path}") from None
    with handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                if current is not None:
                    sid, label, tokens, tags = current
                    sentences.append(Sentence(sid, tokens, tags, label))
                    current = None
                continue
            if line.startswith("meta ") and "\t" not in line:
                if current is not None:
                    raise ParseError(path, lineno, "new 'meta' inside an unterminated block")
                sid, label = _parse_meta(path, lineno, line)
                current = (sid, label, [], [])
                continue
            if current is None:
                raise ParseError(path, lineno, "token line before any 'meta' line")
            fields = line.split("\t")
            if len(fields) != 2 or not fields[0]:
                raise ParseError(path, lineno, "expected 'token<TAB>langtag'")
            current[2].append(fields[0])
            current[3].append(fields[1])
    if current is not None:
        sid, label, tokens, tags = current
        sentences.append(Sentence(sid, tokens, tags, label))
    return Dataset(sentences, split)


def write_conll(dataset, path):
    """Write a Dataset in the conll-style block format."""
    with open(path, "w", encoding="utf-8") as handle:
        for sentence in dataset:
            if sentence.label is None:
                handle.write(f"meta {sentence.id}\n")
            else:
                handle.write(f"meta {sentence.id} {sentence.label}\n")
            tags = sentence.lang_tags or ("other",) * len(sentence.tokens)
            for token, tag in zip(sentence.tokens, tags):
                handle.write(f"{token}\t{tag}\n")
            handle.write("\n")


def parse_tsv(path, split="train"):
    """Parse a flat id/text/label TSV file into a Dataset (no language tags)."""
    sentences = []
    try:
        handle = open(path, encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"dataset file not found: {path}") from None
    with handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) == 2:
                sid, text, label = fields[0], fields[1], None
            elif len(fields) == 3:
                sid, text, label = fields
                if label not in LABELS:
                    raise ParseError(path, lineno, f"unknown label {label!r}")
            else:
                raise ParseError(path, lineno, "expected 'id<TAB>text' or 'id<TAB>text<TAB>label'")
            if not sid:
                raise ParseError(path, lineno, "empty id column")
            sentences.append(Sentence(sid, tuple(text.split()), None, label))
    return Dataset(sentences, split)


def write_tsv(dataset, path):
    """Write a Dataset as id/text/label TSV rows."""
    with open(path, "w", encoding="utf-8") as handle:
        for sentence in dataset:
            text = " ".join(sentence.tokens)
            if sentence.label is None:
                handle.write(f"{sentence.id}\t{text}\n")
            else:
                handle.write(f"{sentence.id}\t{text}\t{sentence.label}\n")


def stats(dataset):
    """Count sentences per label for one split."""
    counts = {label: 0 for label in LABELS}
    unlabeled = 0
    for sentence in dataset:
        if sentence.label is None:
            unlabeled += 1
        else:
            counts[sentence.label] += 1
    return {
        "split": dataset.split,
        "total": len(dataset),
        "unlabeled": unlabeled,
        "labels": counts,
    }

"""Deterministic tweet normalization and tokenization.

Normalization applies five rules in a fixed order: URL removal, @mention
and #hashtag replacement, lowercasing, punctuation-run collapse plus
contraction expansion, slang replacement, and emoji-to-phrase expansion.
The order matters: URLs are stripped before lowercasing so case cannot
hide them, and emoji expand last so their phrases are never re-rewritten
by the slang dictionary.
"""

import re
import warnings
from dataclasses import dataclass, field
from importlib import resources

from .errors import DataError, ParseError

# Runs of sentence-final marks collapse to their first mark, kept as a
# standalone token.
_MARK_RUN = re.compile(r"([.?!]+)")

_URL_SCHEMES = ("http://", "https://")


@dataclass
class NormRules:
    """Replacement dictionaries for :func:`normalize`.

    All lookups are total: a missing key leaves the token unchanged.
    Keys and values are lowercase. The maps are treated as immutable
    after construction.
    """

    slang_map: dict = field(default_factory=dict)
    emoji_map: dict = field(default_factory=dict)
    contraction_map: dict = field(default_factory=dict)

    def __post_init__(self):
        # Longest-first keys let multi-codepoint emoji (variation
        # selectors, ZWJ sequences) win over their prefixes.
        self._emoji_keys = sorted(self.emoji_map, key=len, reverse=True)
        self._emoji_first = {k[0] for k in self._emoji_keys if k}


def _is_url(lowered):
    if lowered.startswith("www."):
        return True
    return any(scheme in lowered for scheme in _URL_SCHEMES)


def _split_marks(token):
    """Split off runs of . ? ! as standalone tokens, one mark per run."""
    pieces = []
    for part in _MARK_RUN.split(token):
        if not part:
            continue
        if part[0] in ".?!":
            pieces.append(part[0])
        else:
            pieces.append(part)
    return pieces


def _apply_map(pieces, mapping):
    out = []
    for piece in pieces:
        replacement = mapping.get(piece)
        if replacement is None:
            out.append(piece)
        else:
            out.extend(replacement.split())
    return out


def _expand_emoji(piece, rules):
    if not rules._emoji_first or not (rules._emoji_first & set(piece)):
        return [piece]
    out = []
    buf = []
    i = 0
    n = len(piece)
    while i < n:
        matched = None
        for key in rules._emoji_keys:
            if piece.startswith(key, i):
                matched = key
                break
        if matched is None:
            buf.append(piece[i])
            i += 1
        else:
            if buf:
                out.append("".join(buf))
                buf.clear()
            out.extend(rules.emoji_map[matched].split())
            i += len(matched)
    if buf:
        out.append("".join(buf))
    return out


def normalize(raw_text, rules):
    """Normalize a raw tweet into a list of tokens.

    Empty input yields an empty list. The result is deterministic, all
    lowercase, and free of URLs.
    """
    out = []
    for token in raw_text.split():
        lowered = token.lower()
        if _is_url(lowered):
            continue
        if token.startswith("@"):
            out.append("user")
            continue
        if token.startswith("#"):
            out.append("hashtag")
            continue
        pieces = _split_marks(lowered)
        pieces = _apply_map(pieces, rules.contraction_map)
        pieces = _apply_map(pieces, rules.slang_map)
        for piece in pieces:
            out.extend(_expand_emoji(piece, rules))
    return out


def split_chars(token):
    """Return the token's Unicode scalar values in order."""
    if not token:
        raise DataError("cannot split an empty token into characters")
    return list(token)


def _load_tsv(path):
    """Load a two-column TSV dictionary, lowercasing keys and values."""
    mapping = {}
    try:
        handle = open(path, encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"dictionary file not found: {path}") from None
    with handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2 or not fields[0].strip() or not fields[1].strip():
                raise ParseError(path, lineno, "expected two non-empty tab-separated columns")
            key = fields[0].strip().lower()
            value = fields[1].strip().lower()
            if key in mapping:
                warnings.warn(f"{path}:{lineno}: duplicate key {key!r}, last value wins")
            mapping[key] = value
    return mapping


def load_rules(slang_path, emoji_path, contraction_path):
    """Load the three replacement dictionaries from TSV files."""
    return NormRules(
        slang_map=_load_tsv(slang_path),
        emoji_map=_load_tsv(emoji_path),
        contraction_map=_load_tsv(contraction_path),
    )


def default_rules():
    """Load the starter dictionaries shipped with the package."""
    data = resources.files("mixsent") / "data"
    return load_rules(
        str(data / "slang.tsv"),
        str(data / "emoji.tsv"),
        str(data / "contractions.tsv"),
    )

"""Forward architecture: char-BiLSTM encoder, vector gate, attention BiLSTM.

Each token gets two representations: a pre-trained word vector and a
character-level vector built by running a BiLSTM over the token's
characters and concatenating the two final hidden states. A learned
vector gate g = sigmoid(W v_word + b) interpolates them per dimension,
v = g * v_char + (1 - g) * v_word, so out-of-vocabulary tokens (zero
word vector) can be routed to the character path. A sentence-level
BiLSTM runs over the fused vectors, additive attention with one scalar
score per timestep pools the hidden states into a context vector, and
an affine layer plus softmax produces the three class probabilities.
"""

from dataclasses import dataclass

import numpy as np

from . import autograd as ag
from .autograd import Tensor
from .embeddings import UNK_CHAR, lookup_word
from .errors import ConfigError, DataError, DimensionError

MODES = ("gated", "word_only", "char_only")
NUM_CLASSES = 3


@dataclass
class LstmParams:
    """Gate weights over the concatenated [h_prev, x_t] input."""

    w_f: Tensor
    w_i: Tensor
    w_o: Tensor
    w_c: Tensor
    b_f: Tensor
    b_i: Tensor
    b_o: Tensor
    b_c: Tensor

    @property
    def hidden(self):
        return self.w_f.shape[0]


@dataclass
class GateParams:
    """Square map from the word vector to per-dimension gate logits."""

    w: Tensor
    b: Tensor


@dataclass
class AttnParams:
    """Projection of a hidden state to one scalar attention score."""

    w_e: Tensor
    b_e: Tensor


@dataclass
class ModelParams:
    """All trainable tensors plus the fusion mode.

    The character-embedding matrix lives here as a Tensor because it is
    gradient-updated; the frozen word table stays outside the model.
    """

    char_vocab: dict
    char_emb: Tensor
    char_fwd: LstmParams
    char_bwd: LstmParams
    sent_fwd: LstmParams
    sent_bwd: LstmParams
    gate: GateParams
    attn: AttnParams
    cls_w: Tensor
    cls_b: Tensor
    mode: str = "gated"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}, expected one of {MODES}")

    @property
    def word_dim(self):
        return self.gate.b.shape[0]

    @property
    def char_dim(self):
        return self.char_emb.shape[1]

    @property
    def hidden(self):
        return self.sent_fwd.hidden


def _lstm_names():
    return ("w_f", "w_i", "w_o", "w_c", "b_f", "b_i", "b_o", "b_c")


def named_parameters(params):
    """All trainable tensors keyed by stable dotted names."""
    out = {"char_emb": params.char_emb}
    for prefix, lstm in (
        ("char_fwd", params.char_fwd),
        ("char_bwd", params.char_bwd),
        ("sent_fwd", params.sent_fwd),
        ("sent_bwd", params.sent_bwd),
    ):
        for name in _lstm_names():
            out[f"{prefix}.{name}"] = getattr(lstm, name)
    out["gate.w"] = params.gate.w
    out["gate.b"] = params.gate.b
    out["attn.w_e"] = params.attn.w_e
    out["attn.b_e"] = params.attn.b_e
    out["cls.w"] = params.cls_w
    out["cls.b"] = params.cls_b
    return out


def _glorot(rng, rows, cols):
    limit = np.sqrt(6.0 / (rows + cols))
    return Tensor(rng.uniform(-limit, limit, size=(rows, cols)))


def _init_lstm(rng, hidden, n_in):
    weights = {name: _glorot(rng, hidden, hidden + n_in) for name in ("w_f", "w_i", "w_o", "w_c")}
    biases = {
        "b_f": Tensor(np.ones(hidden)),  # forget-gate bias starts open
        "b_i": Tensor(np.zeros(hidden)),
        "b_o": Tensor(np.zeros(hidden)),
        "b_c": Tensor(np.zeros(hidden)),
    }
    return LstmParams(**weights, **biases)


def init_params(char_table, word_dim=300, hidden=150, mode="gated", seed=0):
    """Seeded Glorot-uniform initialization of every non-embedding tensor.

    The char BiLSTM hidden size is word_dim // 2 so that the two final
    states concatenate to exactly one word-vector width.
    """
    if word_dim % 2 != 0:
        raise ConfigError(f"word dimension must be even, got {word_dim}")
    char_hidden = word_dim // 2
    char_dim = char_table.matrix.shape[1]
    rng = np.random.default_rng(seed)
    return ModelParams(
        char_vocab=dict(char_table.chars),
        char_emb=Tensor(char_table.matrix),
        char_fwd=_init_lstm(rng, char_hidden, char_dim),
        char_bwd=_init_lstm(rng, char_hidden, char_dim),
        sent_fwd=_init_lstm(rng, hidden, word_dim),
        sent_bwd=_init_lstm(rng, hidden, word_dim),
        gate=GateParams(w=_glorot(rng, word_dim, word_dim), b=Tensor(np.zeros(word_dim))),
        attn=AttnParams(w_e=_glorot(rng, 1, 2 * hidden), b_e=Tensor(np.zeros(1))),
        cls_w=_glorot(rng, NUM_CLASSES, 2 * hidden),
        cls_b=Tensor(np.zeros(NUM_CLASSES)),
        mode=mode,
    )


def lstm_cell(x_t, h_prev, c_prev, p):
    """One step: gates read [h_prev, x_t], state update as usual."""
    z = ag.concat(h_prev, x_t)
    f = ag.sigmoid(ag.affine(p.w_f, z, p.b_f))
    i = ag.sigmoid(ag.affine(p.w_i, z, p.b_i))
    o = ag.sigmoid(ag.affine(p.w_o, z, p.b_o))
    c_tilde = ag.tanh(ag.affine(p.w_c, z, p.b_c))
    c_t = ag.add(ag.hadamard(f, c_prev), ag.hadamard(i, c_tilde))
    h_t = ag.hadamard(o, ag.tanh(c_t))
    return h_t, c_t


def _lstm_run(seq, p):
    """Hidden states for one direction, zero initial state."""
    hidden = p.hidden
    h = Tensor(np.zeros(hidden))
    c = Tensor(np.zeros(hidden))
    states = []
    for x_t in seq:
        h, c = lstm_cell(x_t, h, c, p)
        states.append(h)
    return states


def bilstm(seq, fwd, bwd):
    """Per-position concat of forward and re-reversed backward states."""
    if not seq:
        raise DataError("bilstm needs a nonempty sequence")
    forward = _lstm_run(seq, fwd)
    backward = _lstm_run(list(reversed(seq)), bwd)
    backward.reverse()
    return [ag.concat(f, b) for f, b in zip(forward, backward)]


def char_encode(token, p):
    """Concat of the two final char-BiLSTM hidden states for one token."""
    if not token:
        raise DataError("cannot encode an empty token")
    unk = p.char_vocab[UNK_CHAR]
    seq = [ag.row(p.char_emb, p.char_vocab.get(ch, unk)) for ch in token]
    final_fwd = _lstm_run(seq, p.char_fwd)[-1]
    final_bwd = _lstm_run(list(reversed(seq)), p.char_bwd)[-1]
    return ag.concat(final_fwd, final_bwd)


def vector_gate(v_w, v_c, g):
    """Per-dimension fusion v = g*v_char + (1-g)*v_word, gate from v_word."""
    gate = ag.sigmoid(ag.affine(g.w, v_w, g.b))
    return ag.add(ag.hadamard(gate, v_c), ag.hadamard(ag.one_minus(gate), v_w))


def attention(states, attn, mask=None):
    """Scalar-score additive attention over hidden states.

    ``mask[t]`` True means position t participates; excluded positions
    get exactly zero weight. Returns (weights, context).
    """
    if not states:
        raise DataError("attention needs at least one state")
    if mask is None:
        mask = [True] * len(states)
    if len(mask) != len(states):
        raise DimensionError(f"mask length {len(mask)} does not match {len(states)} states")
    keep = np.asarray(mask, dtype=bool)
    if not keep.any():
        raise DataError("attention with every position masked out")
    scores = ag.concat_n([ag.tanh(ag.affine(attn.w_e, h, attn.b_e)) for h in states])
    weights = ag.masked_softmax(scores, keep)
    context = ag.weighted_sum(weights, states)
    return weights, context


def dropout_mask(length, rate, rng):
    """Inverted-dropout mask: 0 with probability rate, else 1/(1-rate)."""
    if not 0.0 <= rate < 1.0:
        raise ConfigError(f"dropout rate must be in [0, 1), got {rate}")
    return (rng.random(length) >= rate) / (1.0 - rate)


def _dropout(x, rate, rng):
    return ag.mul_array(x, dropout_mask(x.size, rate, rng))


def _fuse(token, p, vocab):
    v_w_raw, _ = lookup_word(vocab, token)
    if v_w_raw.shape[0] != p.word_dim:
        raise DimensionError(
            f"word vectors have dimension {v_w_raw.shape[0]}, model expects {p.word_dim}"
        )
    if p.mode == "word_only":
        return Tensor(v_w_raw)
    v_c = char_encode(token, p)
    if p.mode == "char_only":
        return v_c
    return vector_gate(Tensor(v_w_raw), v_c, p.gate)


def forward(sentence, p, vocab, training=False, rng=None, dropout=0.0):
    """Class probabilities for one sentence.

    Dropout applies to the fused token vectors and the attention context
    only when training; an rng must be supplied then so runs stay
    reproducible.
    """
    tokens = sentence.tokens
    if not tokens:
        raise DataError(f"sentence {sentence.id!r} has no tokens")
    dropping = training and dropout > 0.0
    if dropping and rng is None:
        raise ConfigError("training-time dropout needs an rng")
    fused = [_fuse(token, p, vocab) for token in tokens]
    if dropping:
        fused = [_dropout(v, dropout, rng) for v in fused]
    states = bilstm(fused, p.sent_fwd, p.sent_bwd)
    _, context = attention(states, p.attn)
    if dropping:
        context = _dropout(context, dropout, rng)
    logits = ag.affine(p.cls_w, context, p.cls_b)
    return ag.softmax(logits)

"""Self-check utilities.

``tiny_gradcheck`` builds a deliberately small model (4-d word vectors,
2-d hidden states, a two-token sentence of one-character tokens) and
compares every analytic gradient against central finite differences.
Small dimensions keep each gradient entry well above the finite-
difference noise floor, so the reported maximum relative error reflects
the correctness of the backward pass rather than rounding artifacts.
"""

import numpy as np

from . import autograd as ag
from . import model as md
from .corpus import Dataset, Sentence
from .embeddings import EmbeddingTable, init_char_table
from .training import cross_entropy

__all__ = ["tiny_gradcheck", "GRADCHECK_THRESHOLD"]

GRADCHECK_THRESHOLD = 1e-4


def tiny_gradcheck(seed=98):
    """Max relative error between analytic and numeric gradients.

    Covers every parameter tensor of a full gated model end to end:
    character encoder, gate, sentence encoder, attention, classifier.
    """
    inventory = Dataset((Sentence("1", ("a", "b", "c")),), "train")
    char_table = init_char_table(inventory, d_c=2, r=0.05, seed=seed + 1000)
    params = md.init_params(char_table, word_dim=4, hidden=2, seed=seed)
    rng = np.random.default_rng(seed + 2000)
    vocab = {tok: i for i, tok in enumerate(("a", "b", "c"))}
    table = EmbeddingTable(vocab, rng.normal(scale=0.5, size=(3, 4)))
    sentence = Sentence("s", ("a", "b"))

    def loss():
        return cross_entropy(md.forward(sentence, params, table), 2)

    return ag.gradient_check(loss, md.named_parameters(params))

"""Minimal reverse-mode autodiff over dense float64 numpy arrays.

Every operation records its inputs and a closure that routes the output
gradient back to them; ``Tensor.backward`` replays the closures in reverse
topological order. The op set is exactly what the classifier needs (affine
maps, sigmoid/tanh, masked softmax, elementwise products, concatenation,
embedding-row lookup, attention-style weighted sums and the loss plumbing).
``gradient_check`` validates any scalar-valued composition against central
finite differences.
"""

from __future__ import annotations

import math
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import AutogradError, DataError, DimensionError, NumericError

__all__ = [
    "Tensor",
    "affine",
    "sigmoid",
    "tanh",
    "softmax",
    "masked_softmax",
    "hadamard",
    "one_minus",
    "add",
    "concat",
    "concat_n",
    "row",
    "weighted_sum",
    "mul_array",
    "pick",
    "clip_min",
    "log",
    "neg",
    "scale",
    "vsum",
    "mean_n",
    "zero_grads",
    "gradient_check",
]


class Tensor:
    """A float64 array plus its accumulated gradient and tape record."""

    __slots__ = ("data", "grad", "_parents", "_grad_fn", "_backward_done")

    def __init__(self, data, _parents=(), _grad_fn=None):
        self.data = np.ascontiguousarray(data, dtype=np.float64)
        self.grad = None
        self._parents = _parents
        self._grad_fn = _grad_fn
        self._backward_done = False

    @property
    def shape(self):
        return self.data.shape

    @property
    def size(self):
        return self.data.size

    def __repr__(self):
        return f"Tensor(shape={self.data.shape})"

    def _accumulate(self, g):
        self.grad = g if self.grad is None else self.grad + g

    def backward(self):
        """Propagate d(self)/d(leaf) to every node reachable from self.

        ``self`` must hold a single scalar. Calling backward a second time
        on the same node without a fresh forward pass is an error.
        """
        if self._backward_done:
            raise AutogradError(
                "backward already ran on this node; run a new forward pass first"
            )
        if self.size != 1:
            raise DimensionError(f"backward requires a scalar, got shape {self.shape}")
        # Iterative post-order walk: graph depth grows with sequence length,
        # so recursion would overflow on long sentences.
        topo = []
        seen = set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                topo.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if id(parent) not in seen:
                    stack.append((parent, False))
        self._accumulate(np.ones_like(self.data))
        for node in reversed(topo):
            if node._grad_fn is not None:
                node._grad_fn(node.grad)
        self._backward_done = True


def zero_grads(params) -> None:
    """Reset gradients on an iterable or mapping of tensors."""
    tensors = params.values() if isinstance(params, Mapping) else params
    for t in tensors:
        t.grad = None


def _require_vector(x: Tensor, op: str) -> None:
    if x.data.ndim != 1:
        raise DimensionError(f"{op} expects a vector, got shape {x.shape}")


# ---------------------------------------------------------------------------
# core ops


def affine(w: Tensor, x: Tensor, b: Tensor) -> Tensor:
    """y = W @ x + b for W:[m,n], x:[n], b:[m]."""
    if w.data.ndim != 2 or x.data.ndim != 1 or b.data.ndim != 1:
        raise DimensionError(
            f"affine expects W:[m,n], x:[n], b:[m]; got {w.shape}, {x.shape}, {b.shape}"
        )
    m, n = w.data.shape
    if x.data.shape[0] != n or b.data.shape[0] != m:
        raise DimensionError(
            f"affine shape mismatch: W is {w.shape}, x is {x.shape}, b is {b.shape}"
        )
    out_data = w.data @ x.data + b.data

    def grad_fn(g):
        w._accumulate(np.outer(g, x.data))
        x._accumulate(w.data.T @ g)
        b._accumulate(g)

    return Tensor(out_data, (w, x, b), grad_fn)


def _sigmoid_stable(x: np.ndarray) -> np.ndarray:
    # Branch on sign so exp never overflows.
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid(x: Tensor) -> Tensor:
    s = _sigmoid_stable(x.data)

    def grad_fn(g):
        x._accumulate(g * s * (1.0 - s))

    return Tensor(s, (x,), grad_fn)


def tanh(x: Tensor) -> Tensor:
    t = np.tanh(x.data)

    def grad_fn(g):
        x._accumulate(g * (1.0 - t * t))

    return Tensor(t, (x,), grad_fn)


def masked_softmax(x: Tensor, keep: np.ndarray | None) -> Tensor:
    """Softmax over the entries where ``keep`` is True; excluded entries
    come out exactly 0. ``keep=None`` keeps everything."""
    _require_vector(x, "softmax")
    if x.size == 0:
        raise DimensionError("softmax of an empty vector")
    if keep is None:
        keep = np.ones(x.size, dtype=bool)
    else:
        keep = np.asarray(keep, dtype=bool)
        if keep.shape != x.data.shape:
            raise DimensionError(
                f"softmax mask shape {keep.shape} does not match input {x.shape}"
            )
    if not keep.any():
        raise DataError("softmax with every position masked out")
    shifted = np.zeros_like(x.data)
    shifted[keep] = np.exp(x.data[keep] - x.data[keep].max())
    out = shifted / shifted.sum()

    def grad_fn(g):
        # d softmax: s * (g - s.g); zeros at excluded entries fall out naturally.
        x._accumulate(out * (g - float(out @ g)))

    return Tensor(out, (x,), grad_fn)


def softmax(x: Tensor) -> Tensor:
    return masked_softmax(x, None)


def hadamard(a: Tensor, b: Tensor) -> Tensor:
    if a.data.shape != b.data.shape:
        raise DimensionError(f"hadamard shape mismatch: {a.shape} vs {b.shape}")
    out = a.data * b.data

    def grad_fn(g):
        a._accumulate(g * b.data)
        b._accumulate(g * a.data)

    return Tensor(out, (a, b), grad_fn)


def one_minus(x: Tensor) -> Tensor:
    def grad_fn(g):
        x._accumulate(-g)

    return Tensor(1.0 - x.data, (x,), grad_fn)


def add(a: Tensor, b: Tensor) -> Tensor:
    if a.data.shape != b.data.shape:
        raise DimensionError(f"add shape mismatch: {a.shape} vs {b.shape}")

    def grad_fn(g):
        a._accumulate(g)
        b._accumulate(g)

    return Tensor(a.data + b.data, (a, b), grad_fn)


def concat(a: Tensor, b: Tensor) -> Tensor:
    _require_vector(a, "concat")
    _require_vector(b, "concat")
    na = a.size

    def grad_fn(g):
        a._accumulate(g[:na])
        b._accumulate(g[na:])

    return Tensor(np.concatenate([a.data, b.data]), (a, b), grad_fn)


def concat_n(parts: Sequence[Tensor]) -> Tensor:
    """Concatenate a list of vectors in order."""
    if not parts:
        raise DimensionError("concat_n of an empty list")
    for p in parts:
        _require_vector(p, "concat_n")
    sizes = [p.size for p in parts]
    offsets = np.cumsum([0] + sizes)
    parts = tuple(parts)

    def grad_fn(g):
        for p, lo, hi in zip(parts, offsets[:-1], offsets[1:]):
            p._accumulate(g[lo:hi])

    return Tensor(np.concatenate([p.data for p in parts]), parts, grad_fn)


def row(matrix: Tensor, index: int) -> Tensor:
    """Select one row of a 2-D tensor (embedding lookup)."""
    if matrix.data.ndim != 2:
        raise DimensionError(f"row expects a matrix, got shape {matrix.shape}")
    if not 0 <= index < matrix.data.shape[0]:
        raise DimensionError(f"row index {index} out of range for {matrix.shape}")

    def grad_fn(g):
        full = np.zeros_like(matrix.data)
        full[index] = g
        matrix._accumulate(full)

    return Tensor(matrix.data[index].copy(), (matrix,), grad_fn)


def weighted_sum(weights: Tensor, vectors: Sequence[Tensor]) -> Tensor:
    """out = sum_t weights[t] * vectors[t]."""
    _require_vector(weights, "weighted_sum")
    if weights.size != len(vectors):
        raise DimensionError(
            f"weighted_sum got {weights.size} weights for {len(vectors)} vectors"
        )
    vectors = tuple(vectors)
    dim = vectors[0].size
    for v in vectors:
        if v.data.shape != (dim,):
            raise DimensionError("weighted_sum vectors must share one shape")
    out = np.zeros(dim)
    for wt, v in zip(weights.data, vectors):
        out += wt * v.data

    def grad_fn(g):
        weights._accumulate(np.array([float(v.data @ g) for v in vectors]))
        for wt, v in zip(weights.data, vectors):
            v._accumulate(wt * g)

    return Tensor(out, (weights,) + vectors, grad_fn)


def mul_array(x: Tensor, factor: np.ndarray) -> Tensor:
    """Elementwise product with a constant array (dropout masks)."""
    factor = np.asarray(factor, dtype=np.float64)
    if factor.shape != x.data.shape:
        raise DimensionError(f"mul_array shape mismatch: {x.shape} vs {factor.shape}")

    def grad_fn(g):
        x._accumulate(g * factor)

    return Tensor(x.data * factor, (x,), grad_fn)


def pick(x: Tensor, index: int) -> Tensor:
    """Select one entry of a vector as a scalar."""
    _require_vector(x, "pick")
    if not 0 <= index < x.size:
        raise DimensionError(f"pick index {index} out of range for {x.shape}")

    def grad_fn(g):
        full = np.zeros_like(x.data)
        full[index] = g.item()
        x._accumulate(full)

    return Tensor(x.data[index], (x,), grad_fn)


def clip_min(x: Tensor, floor: float) -> Tensor:
    clipped = x.data < floor

    def grad_fn(g):
        x._accumulate(np.where(clipped, 0.0, g))

    return Tensor(np.maximum(x.data, floor), (x,), grad_fn)


def log(x: Tensor) -> Tensor:
    out = np.log(x.data)

    def grad_fn(g):
        x._accumulate(g / x.data)

    return Tensor(out, (x,), grad_fn)


def neg(x: Tensor) -> Tensor:
    def grad_fn(g):
        x._accumulate(-g)

    return Tensor(-x.data, (x,), grad_fn)


def scale(x: Tensor, c: float) -> Tensor:
    def grad_fn(g):
        x._accumulate(g * c)

    return Tensor(x.data * c, (x,), grad_fn)


def vsum(x: Tensor) -> Tensor:
    """Sum of all entries, as a scalar tensor."""

    def grad_fn(g):
        x._accumulate(np.full_like(x.data, g.item()))

    return Tensor(x.data.sum(), (x,), grad_fn)


def mean_n(parts: Sequence[Tensor]) -> Tensor:
    """Mean of a list of scalar tensors (batch loss reduction)."""
    if not parts:
        raise DimensionError("mean_n of an empty list")
    for p in parts:
        if p.size != 1:
            raise DimensionError(f"mean_n expects scalars, got shape {p.shape}")
    parts = tuple(parts)
    inv = 1.0 / len(parts)

    def grad_fn(g):
        share = (g * inv).item()
        for p in parts:
            p._accumulate(np.full_like(p.data, share))

    return Tensor(sum(p.data.item() for p in parts) * inv, parts, grad_fn)


# ---------------------------------------------------------------------------
# finite-difference validation


def gradient_check(
    f: Callable[[], Tensor],
    params: Mapping[str, Tensor],
    eps: float = 1e-5,
) -> float:
    """Max relative error between analytic gradients and central differences.

    ``f`` must rebuild its graph from the live parameter data on every call.
    Relative error per entry is |analytic - fd| / max(|analytic|, |fd|, 1e-8).
    """
    loss = f()
    if not np.isfinite(loss.data).all():
        raise NumericError("gradient_check: loss is not finite")
    zero_grads(params)
    loss.backward()
    analytic = {
        name: (np.zeros_like(t.data) if t.grad is None else t.grad.copy())
        for name, t in params.items()
    }
    zero_grads(params)

    max_rel = 0.0
    for name, t in params.items():
        flat = t.data.reshape(-1)
        ana = analytic[name].reshape(-1)
        for j in range(flat.size):
            orig = flat[j]
            flat[j] = orig + eps
            up = f().data.item()
            flat[j] = orig - eps
            down = f().data.item()
            flat[j] = orig
            if not (math.isfinite(up) and math.isfinite(down)):
                raise NumericError(
                    f"gradient_check: non-finite loss while perturbing {name}[{j}]"
                )
            fd = (up - down) / (2.0 * eps)
            rel = abs(ana[j] - fd) / max(abs(ana[j]), abs(fd), 1e-8)
            if rel > max_rel:
                max_rel = rel
    return max_rel

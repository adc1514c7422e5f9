"""Label maps, per-class fields and block-wise annotations.

Per-class fields (one-hot annotations, probabilities, logits) are plain
numpy arrays with the class axis first: shape ``(C, H, W)`` for images or
``(C, N)`` for 1-D toys.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fourier
from .errors import DimensionError, FormatError

__all__ = [
    "LabelMap",
    "PROB_FLOOR",
    "block_annotation",
    "block_edges",
    "log_partition",
    "one_hot",
    "random_blob_map",
    "softmax",
]

# probabilities are floored here before any logarithm
PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class LabelMap:
    """Integer class grid with a declared number of classes."""

    labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim not in (1, 2) or labels.size == 0:
            raise DimensionError("labels must be a non-empty 1-D or 2-D grid")
        if not np.issubdtype(labels.dtype, np.integer):
            if not np.all(np.equal(np.mod(labels, 1), 0)):
                raise FormatError("labels must be integers")
            labels = labels.astype(np.int64)
        if self.num_classes < 1:
            raise FormatError("num_classes must be positive")
        if labels.min() < 0 or labels.max() >= self.num_classes:
            raise FormatError(
                f"labels must lie in [0, {self.num_classes}), "
                f"found range [{labels.min()}, {labels.max()}]"
            )
        labels = labels.copy()
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def shape(self):
        return self.labels.shape

    def __eq__(self, other):
        if not isinstance(other, LabelMap):
            return NotImplemented
        return self.num_classes == other.num_classes and np.array_equal(self.labels, other.labels)

    __hash__ = None


def one_hot(label_map: LabelMap) -> np.ndarray:
    """``B(t, c) = 1`` iff ``labels(t) == c``; shape ``(C, *spatial)``."""
    classes = np.arange(label_map.num_classes).reshape((-1,) + (1,) * label_map.labels.ndim)
    return (label_map.labels[None] == classes).astype(float)


def _max_shift(logits):
    logits = np.asarray(logits)
    if logits.ndim < 2:
        raise DimensionError("logits need a class axis followed by spatial axes")
    if np.iscomplexobj(logits):
        return logits - np.max(logits.real, axis=0, keepdims=True)
    return logits - np.max(logits, axis=0, keepdims=True)


def softmax(logits) -> np.ndarray:
    """Per-pixel softmax over the class axis, stabilized by the per-pixel max."""
    shifted = _max_shift(logits)
    e = np.exp(shifted)
    return e / np.sum(e, axis=0, keepdims=True)


def log_partition(logits) -> np.ndarray:
    """``Y_p(t) = log sum_c exp(Y(t, c))`` computed as a stable log-sum-exp."""
    logits = np.asarray(logits)
    m = np.max(logits.real, axis=0) if np.iscomplexobj(logits) else np.max(logits, axis=0)
    return m + np.log(np.sum(np.exp(logits - m[None]), axis=0))


def block_edges(side: int, nu_max: int) -> int:
    """Block edge length along one axis of length ``side``.

    A band limit at or above the axis Nyquist radius keeps every pixel.
    """
    if nu_max >= side // 2:
        return 1
    return -(-side // (2 * nu_max))


def _block_vote(labels: np.ndarray, num_classes: int, edges) -> np.ndarray:
    starts = [np.arange(0, n, e) for n, e in zip(labels.shape, edges)]
    onehot = (labels[None] == np.arange(num_classes).reshape((-1,) + (1,) * labels.ndim))
    counts = onehot.astype(np.int64)
    for axis, s in enumerate(starts):
        counts = np.add.reduceat(counts, s, axis=axis + 1)
    # argmax returns the first maximum, i.e. the lowest class index on ties
    winners = np.argmax(counts, axis=0)
    out = winners
    for axis, (n, e) in enumerate(zip(labels.shape, edges)):
        out = np.repeat(out, e, axis=axis)
        out = np.take(out, np.arange(n), axis=axis)
    return out


def _lowpass_argmax(label_map: LabelMap, nu_max: int) -> np.ndarray:
    b = one_hot(label_map)
    axes = tuple(range(1, b.ndim))
    spec = fourier.dft(b, axes=axes)
    smooth = fourier.idft(fourier.band_limit(spec, nu_max, axes=axes), axes=axes).real
    return np.argmax(smooth, axis=0)


def block_annotation(label_map: LabelMap, nu_max: int, method: str = "vote") -> LabelMap:
    """Block-wise annotation at band limit ``nu_max``.

    ``method="vote"`` splits each axis into ``2 * nu_max`` blocks of edge
    ``ceil(side / (2 nu_max))`` (the trailing block may be shorter), assigns
    every block its majority class (lowest index wins ties) and fills the
    block with it.  ``method="lowpass"`` instead band-limits the one-hot
    spectrum and takes the per-pixel argmax.
    """
    if nu_max < 1:
        raise ValueError("nu_max must be at least 1")
    if method == "vote":
        edges = [block_edges(n, nu_max) for n in label_map.shape]
        if all(e == 1 for e in edges):
            return label_map
        labels = _block_vote(label_map.labels, label_map.num_classes, edges)
    elif method == "lowpass":
        labels = _lowpass_argmax(label_map, nu_max)
    else:
        raise ValueError(f"unknown block method {method!r}")
    return LabelMap(labels, label_map.num_classes)


def random_blob_map(shape, num_classes: int, rng, smoothness: int = 4) -> LabelMap:
    """Piecewise-constant synthetic map: argmax of band-limited random noise per class.

    ``smoothness`` is the band limit of the noise; small values give large
    segments, as in natural annotations.
    """
    shape = tuple(shape)
    noise = rng.standard_normal((num_classes,) + shape)
    axes = tuple(range(1, noise.ndim))
    spec = fourier.band_limit(fourier.dft(noise, axes=axes), smoothness, axes=axes)
    field = fourier.idft(spec, axes=axes).real
    return LabelMap(np.argmax(field, axis=0), num_classes)

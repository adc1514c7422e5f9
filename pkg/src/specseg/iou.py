"""Set, relaxed and spectral IoU, plus discrete boundary IoU."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import fourier
from .errors import DegenerateInputError, DimensionError
from .segmap import LabelMap

__all__ = [
    "IoUReport",
    "boundary_iou_discrete",
    "boundary_pixels",
    "boundary_region",
    "iou_discrete",
    "iou_relaxed",
    "iou_spectral",
    "mean_iou",
]


@dataclass(frozen=True)
class IoUReport:
    intersection: float
    union: float
    iou: float


def _binary_pair(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionError(f"mask shapes differ: {a.shape} vs {b.shape}")
    return a.astype(bool), b.astype(bool)


def iou_discrete(a, b) -> IoUReport:
    """``|a & b| / |a | b|`` for binary masks."""
    a, b = _binary_pair(a, b)
    inter = float(np.count_nonzero(a & b))
    union = float(np.count_nonzero(a | b))
    if union == 0:
        raise DegenerateInputError("IoU undefined: both masks are empty")
    return IoUReport(inter, union, inter / union)


def iou_relaxed(s, b) -> float:
    """Soft IoU ``sum(s b) / (sum b + sum s - sum(s b))``."""
    s = np.asarray(s, dtype=float)
    b = np.asarray(b, dtype=float)
    if s.shape != b.shape:
        raise DimensionError(f"shape mismatch: {s.shape} vs {b.shape}")
    inter = float(np.sum(s * b))
    denom = float(np.sum(b) + np.sum(s)) - inter
    if denom <= 0:
        raise DegenerateInputError("relaxed IoU has a zero denominator")
    return inter / denom


def iou_spectral(s_spec, b_spec) -> float:
    """IoU from spectra: ``1 / ((s(0) + b(0)) / overlap - 1)``.

    ``overlap`` is the discrete Parseval overlap ``(1/N) sum s(k) b(-k)``.
    """
    overlap = fourier.overlap_spectral(s_spec, b_spec).real
    if overlap == 0:
        raise DegenerateInputError("IoU spectral form undefined: zero overlap")
    mass = (fourier.zero_frequency(s_spec) + fourier.zero_frequency(b_spec)).real
    return 1.0 / (mass / overlap - 1.0)


def boundary_pixels(mask) -> np.ndarray:
    """Mask pixels with an off-mask axis neighbour or lying on the grid edge."""
    mask = np.asarray(mask).astype(bool)
    padded = np.pad(mask, 1, constant_values=False)
    inner = np.ones_like(mask)
    for axis in range(mask.ndim):
        for shift in (-1, 1):
            neighbour = np.roll(padded, shift, axis=axis)
            inner &= neighbour[tuple(slice(1, -1) for _ in range(mask.ndim))]
    return mask & ~inner


def boundary_region(mask, d: int, metric: str = "chebyshev") -> np.ndarray:
    """Pixels within distance ``d`` of the mask boundary (empty for an empty mask).

    ``metric`` is ``"chebyshev"`` or ``"euclidean"`` (distance rounded to the
    nearest integer before comparing with ``d``).
    """
    if d < 1:
        raise ValueError("boundary width d must be at least 1")
    edge = boundary_pixels(mask)
    if not edge.any():
        return np.zeros_like(edge)
    if metric == "chebyshev":
        dist = ndimage.distance_transform_cdt(~edge, metric="chessboard")
    elif metric == "euclidean":
        dist = np.rint(ndimage.distance_transform_edt(~edge))
    else:
        raise ValueError(f"unknown metric {metric!r}")
    return dist <= d


def boundary_iou_discrete(s, b, d: int, metric: str = "chebyshev") -> float:
    """IoU of the boundary-clipped masks ``s & S_d`` and ``b & B_d``."""
    s, b = _binary_pair(s, b)
    s_clip = s & boundary_region(s, d, metric)
    b_clip = b & boundary_region(b, d, metric)
    if not (s_clip.any() or b_clip.any()):
        raise DegenerateInputError("boundary IoU undefined: both boundary sets are empty")
    return iou_discrete(s_clip, b_clip).iou


def mean_iou(pred: LabelMap, target: LabelMap) -> float:
    """Mean IoU over classes present in either map."""
    if pred.shape != target.shape:
        raise DimensionError("label maps differ in shape")
    scores = []
    for c in range(max(pred.num_classes, target.num_classes)):
        p = pred.labels == c
        t = target.labels == c
        if p.any() or t.any():
            scores.append(iou_discrete(p, t).iou)
    return float(np.mean(scores))

"""Cross-entropy in the spatial and frequency domains.

The per-frequency component used here is

    L_ce(k) = (1/N) sum_c b(-k, c) (y_p(k) - y(k, c))

with ``b``, ``y`` and ``y_p`` the unnormalized DFTs of the annotation, the
logits and the log-partition.  The ``1/N`` is the discrete Parseval constant,
so the components sum to the ordinary (positive) spatial cross-entropy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fourier
from .errors import DegenerateInputError, DimensionError
from .segmap import PROB_FLOOR, log_partition, softmax

__all__ = [
    "CEDecomposition",
    "TruncationCurve",
    "ce_decompose",
    "ce_direct",
    "ce_spatial",
    "discrepancy_R",
    "truncated_ce",
    "truncation_curve",
]

# |L_CE| below this makes the relative discrepancy meaningless
_DEGENERATE_TOTAL = 1e-12


def _check_pair(logits, annot):
    logits = np.asarray(logits)
    annot = np.asarray(annot, dtype=float)
    if logits.ndim < 2:
        raise DimensionError("fields need a class axis followed by spatial axes")
    if logits.shape != annot.shape:
        raise DimensionError(f"logits {logits.shape} and annotation {annot.shape} differ")
    return logits, annot


def ce_spatial(logits, annot) -> float:
    """``-sum_c sum_t B(t,c) (Y(t,c) - Y_p(t))`` with a stable log-partition."""
    logits, annot = _check_pair(logits, annot)
    yp = log_partition(logits)
    return float(-np.sum(annot * (logits - yp[None])))


def ce_direct(logits, annot) -> float:
    """Textbook ``-sum B log S`` with ``S`` floored before the logarithm."""
    logits, annot = _check_pair(logits, annot)
    s = np.maximum(softmax(logits), PROB_FLOOR)
    return float(-np.sum(annot * np.log(s)))


@dataclass(frozen=True)
class CEDecomposition:
    """Per-frequency CE components and their radial reduction.

    ``components`` has the spatial shape of the inputs and is indexed like a
    spectrum.  ``radial_profile[r]`` is the real part of the sum of all
    components whose frequency radius is ``r``; for real inputs each bin
    holds complete Hermitian pairs, so the imaginary parts cancel.
    """

    components: np.ndarray
    radius: np.ndarray
    radial_profile: np.ndarray
    total: float

    @property
    def nyquist(self) -> int:
        return fourier.nyquist_radius(self.components.shape)

    @property
    def imag_residue(self) -> float:
        return float(abs(np.sum(self.components).imag))


def ce_decompose(logits, annot, binning: str = "chebyshev") -> CEDecomposition:
    """Split the cross-entropy of ``(logits, annot)`` into frequency components.

    ``binning`` selects the radius used for ``radial_profile``: ``"chebyshev"``
    (matches square low-resolution grids) or ``"euclidean"`` (rounded).
    """
    logits, annot = _check_pair(logits, annot)
    axes = tuple(range(1, logits.ndim))
    spatial = logits.shape[1:]
    n_total = int(np.prod(spatial))
    y = fourier.dft(logits, axes=axes)
    b = fourier.dft(annot, axes=axes)
    yp = fourier.dft(log_partition(logits))
    b_neg = fourier.negate_frequency(b, axes=axes)
    components = np.sum(b_neg * (yp[None] - y), axis=0) / n_total

    if binning == "chebyshev":
        radius = fourier.chebyshev_radius(spatial)
    elif binning == "euclidean":
        radius = fourier.euclidean_radius(spatial)
    else:
        raise ValueError(f"unknown binning {binning!r}")
    profile = np.bincount(radius.ravel(), weights=components.real.ravel())
    return CEDecomposition(
        components=components,
        radius=fourier.chebyshev_radius(spatial),
        radial_profile=profile,
        total=float(np.sum(components).real),
    )


def truncated_ce(dec: CEDecomposition, nu_max: int) -> float:
    """Real part of the sum of components with Chebyshev radius ``<= nu_max``."""
    if nu_max < 0:
        raise ValueError("nu_max must be non-negative")
    return float(np.sum(dec.components[dec.radius <= nu_max]).real)


def discrepancy_R(dec: CEDecomposition, nu_max: int) -> float:
    """Relative CE loss from band-limiting: ``|1 - truncated / total|``."""
    if abs(dec.total) <= _DEGENERATE_TOTAL:
        raise DegenerateInputError("cross-entropy is zero; relative discrepancy undefined")
    return abs(1.0 - truncated_ce(dec, nu_max) / dec.total)


@dataclass(frozen=True)
class TruncationCurve:
    nu: tuple
    truncated: tuple
    discrepancy: tuple

    def rows(self):
        return list(zip(self.nu, self.truncated, self.discrepancy))


def truncation_curve(logits, annot, nu_list=None) -> TruncationCurve:
    """Truncated CE and ``R`` for every band limit in ``nu_list`` (ascending).

    ``nu_list`` defaults to every radius from 0 to Nyquist.
    """
    dec = ce_decompose(logits, annot)
    if nu_list is None:
        nu_list = range(dec.nyquist + 1)
    nus = sorted(int(v) for v in nu_list)
    return TruncationCurve(
        nu=tuple(nus),
        truncated=tuple(truncated_ce(dec, v) for v in nus),
        discrepancy=tuple(discrepancy_R(dec, v) for v in nus),
    )

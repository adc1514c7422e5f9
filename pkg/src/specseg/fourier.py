"""Discrete Fourier machinery on 1-D and 2-D grids of arbitrary length.

Conventions used throughout the package:

* forward transform is unnormalized, ``X[k] = sum_n x[n] exp(-2j pi k n / N)``;
* inverse carries ``1/N`` per axis, so ``idft(dft(x)) == x``;
* spectra are stored in standard DFT order.  Index ``k`` on an axis of length
  ``N`` stands for the signed frequency ``k`` when ``k <= N // 2`` and
  ``k - N`` otherwise;
* the radius of a 2-D frequency is its Chebyshev norm (max over axes of the
  absolute signed frequency), which is what a square low-resolution grid of
  side ``2 * nu_max`` keeps.

With this convention the discrete Parseval identity reads
``sum_t a(t) b(t) = (1/N_total) sum_k a(k) b(-k)`` and the total mass of a
grid is its DC coefficient, without any extra constant.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import DimensionError

__all__ = [
    "band_limit",
    "chebyshev_radius",
    "circular_convolve",
    "dft",
    "euclidean_radius",
    "idft",
    "naive_dft",
    "negate_frequency",
    "nyquist_radius",
    "overlap_spatial",
    "overlap_spectral",
    "radix2_dft",
    "signed_frequencies",
    "total_mass",
    "zero_frequency",
]


def _check_grid(a) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim == 0 or a.size == 0:
        raise DimensionError("grid must have at least one axis and one element")
    return a


def _check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")


@lru_cache(maxsize=64)
def _dft_matrix(n: int, inverse: bool) -> np.ndarray:
    # reduce k*n modulo N in integers first so the phase stays exact for large N
    kn = np.outer(np.arange(n), np.arange(n)) % n
    sign = 1.0 if inverse else -1.0
    w = np.exp(sign * 2j * np.pi * kn / n)
    w.setflags(write=False)
    return w


def _naive_axis(a: np.ndarray, axis: int, inverse: bool) -> np.ndarray:
    n = a.shape[axis]
    w = _dft_matrix(n, inverse)
    moved = np.moveaxis(a, axis, -1)
    out = moved @ w.T
    return np.moveaxis(out, -1, axis)


def _radix2_last(a: np.ndarray, inverse: bool) -> np.ndarray:
    n = a.shape[-1]
    if n == 1:
        return a.astype(complex)
    even = _radix2_last(a[..., 0::2], inverse)
    odd = _radix2_last(a[..., 1::2], inverse)
    sign = 1.0 if inverse else -1.0
    twiddle = np.exp(sign * 2j * np.pi * np.arange(n // 2) / n) * odd
    return np.concatenate([even + twiddle, even - twiddle], axis=-1)


def _radix2_axis(a: np.ndarray, axis: int, inverse: bool) -> np.ndarray:
    moved = np.moveaxis(a, axis, -1)
    return np.moveaxis(_radix2_last(moved, inverse), -1, axis)


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def _transform(a, inverse: bool, method: str, axes) -> np.ndarray:
    a = _check_grid(a).astype(complex)
    if axes is None:
        axes = range(a.ndim)
    for axis in axes:
        n = a.shape[axis]
        if method == "naive" or (method == "auto" and not _is_pow2(n)):
            a = _naive_axis(a, axis, inverse)
        elif method in ("radix2", "auto"):
            if not _is_pow2(n):
                raise DimensionError(f"radix-2 path needs a power-of-two length, got {n}")
            a = _radix2_axis(a, axis, inverse)
        else:
            raise ValueError(f"unknown DFT method {method!r}")
        if inverse:
            a = a / n
    return a


def dft(grid, method: str = "auto", axes=None) -> np.ndarray:
    """Forward unnormalized DFT over ``axes`` (all axes by default), separably.

    ``method`` is ``"naive"`` (matrix product, any length), ``"radix2"``
    (power-of-two lengths only) or ``"auto"`` (radix-2 where possible).
    """
    return _transform(grid, False, method, axes)


def idft(spectrum, method: str = "auto", axes=None) -> np.ndarray:
    """Inverse DFT with the ``1/N`` factor; returns a complex grid."""
    return _transform(spectrum, True, method, axes)


def naive_dft(grid, inverse: bool = False) -> np.ndarray:
    """Direct O(N^2)-per-axis double sum. Slow; kept as a reference path."""
    a = _check_grid(grid).astype(complex)
    for axis in range(a.ndim):
        n = a.shape[axis]
        idx = np.arange(n)
        sign = 1.0 if inverse else -1.0
        out = np.zeros_like(a)
        moved_in = np.moveaxis(a, axis, 0)
        moved_out = np.moveaxis(out, axis, 0)
        for k in range(n):
            phase = np.exp(sign * 2j * np.pi * ((k * idx) % n) / n)
            moved_out[k] = np.tensordot(phase, moved_in, axes=(0, 0))
        a = out / n if inverse else out
    return a


def radix2_dft(grid, inverse: bool = False) -> np.ndarray:
    return idft(grid, method="radix2") if inverse else dft(grid, method="radix2")


def signed_frequencies(n: int) -> np.ndarray:
    """Signed frequency of each DFT index: ``k`` for ``k <= n//2``, else ``k - n``."""
    k = np.arange(n)
    return np.where(k <= n // 2, k, k - n)


def chebyshev_radius(shape) -> np.ndarray:
    """Integer grid of Chebyshev frequency radii for a spectrum of ``shape``."""
    shape = tuple(shape)
    if not shape or min(shape) < 1:
        raise DimensionError("shape must be non-empty with positive sides")
    grids = np.meshgrid(*[np.abs(signed_frequencies(n)) for n in shape], indexing="ij")
    return np.max(np.stack(grids), axis=0)


def euclidean_radius(shape) -> np.ndarray:
    """Euclidean frequency radius rounded to the nearest integer."""
    shape = tuple(shape)
    grids = np.meshgrid(*[signed_frequencies(n).astype(float) for n in shape], indexing="ij")
    return np.rint(np.sqrt(sum(g * g for g in grids))).astype(int)


def nyquist_radius(shape) -> int:
    """Largest Chebyshev radius present on a grid of ``shape``."""
    return max(int(n) // 2 for n in shape)


def negate_frequency(spectrum, axes=None) -> np.ndarray:
    """Return ``s(-k)``, i.e. the spectrum re-indexed by ``-k mod N`` per axis."""
    s = _check_grid(spectrum)
    if axes is None:
        axes = tuple(range(s.ndim))
    return np.roll(np.flip(s, axis=axes), 1, axis=axes)


def overlap_spatial(a, b) -> float:
    """Discrete overlap integral ``sum_t a(t) b(t)``."""
    a = _check_grid(a)
    b = _check_grid(b)
    _check_same_shape(a, b)
    return float(np.sum(a * b))


def overlap_spectral(sa, sb) -> complex:
    """Overlap computed from spectra: ``(1/N_total) sum_k sa(k) sb(-k)``.

    Equals :func:`overlap_spatial` of the originating real grids.
    """
    sa = _check_grid(sa)
    sb = _check_grid(sb)
    _check_same_shape(sa, sb)
    return complex(np.sum(sa * negate_frequency(sb)) / sa.size)


def total_mass(grid) -> float:
    return float(np.sum(_check_grid(grid)))


def zero_frequency(spectrum) -> complex:
    """DC coefficient of a spectrum; the dual of :func:`total_mass`."""
    s = _check_grid(spectrum)
    return complex(s[(0,) * s.ndim])


def band_limit(spectrum, nu_max: int, axes=None) -> np.ndarray:
    """Zero every frequency whose Chebyshev radius exceeds ``nu_max``."""
    s = _check_grid(spectrum)
    if nu_max < 0:
        raise ValueError("nu_max must be non-negative")
    if axes is None:
        axes = tuple(range(s.ndim))
    radius = chebyshev_radius([s.shape[ax] for ax in axes])
    keep = radius <= nu_max
    # broadcast the mask over any non-transformed (e.g. class) axes
    shape = [1] * s.ndim
    for ax, n in zip(axes, radius.shape):
        shape[ax] = n
    return np.where(keep.reshape(shape), s, 0)


def circular_convolve(a, k) -> np.ndarray:
    """Periodic convolution ``(k * a)(t) = sum_u k(u) a(t - u)``.

    Both grids must have the same shape; pad the kernel beforehand.  Computed
    through the transform, so the result is real up to round-off.
    """
    a = _check_grid(a)
    k = _check_grid(k)
    _check_same_shape(a, k)
    out = idft(dft(a) * dft(k))
    if np.isrealobj(a) and np.isrealobj(k):
        return out.real
    return out

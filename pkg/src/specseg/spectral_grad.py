"""Spectral Jacobians of a toy 1-D convolution + softplus layer.

A spectral Jacobian ``J[i, j] = d y(nu_i) / d x(nu_j)`` treats each input
frequency coefficient as an independent complex variable.  All maps here are
holomorphic in those coordinates (softplus extends analytically; ReLU is
linearized around the real base point), so the finite-difference oracle can
perturb one coefficient at a time.

Discrete constants, fixed by the transform convention of :mod:`fourier`:

* convolution: ``diag(k)``;
* softplus around 0: ``1/2 [i=j] + z(i-j) / (4N)``;
* CE components w.r.t. the input, leading order:
  ``(1/2N) sum_c k_c(j) ([i=0] s_c(-j) - [i=j] b_c(-i))``,
  where the continuous Dirac delta at DC becomes ``N [i=0]`` and cancels
  against the ``1/N`` of the CE components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fourier
from .errors import DimensionError, EnvelopeError
from .segmap import softmax
from .spectral_ce import ce_decompose

__all__ = [
    "ToyConvLayer",
    "activation_jacobian_spectral",
    "cauchy_riemann_residual",
    "ce_components",
    "ce_jacobian_fd",
    "ce_jacobian_spectral",
    "conv_jacobian_spectral",
    "fd_jacobian_spectral",
    "forward",
    "layer_jacobian_delta",
    "layer_jacobian_full",
    "off_diagonal_ratio",
    "relu_map",
    "softplus",
    "softplus_taylor_spectrum",
    "softplus_taylor_terms",
    "upsample_map",
]


@dataclass(frozen=True)
class ToyConvLayer:
    """Periodic 1-D convolution with a full-length kernel, followed by softplus."""

    kernel: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.kernel, dtype=float)
        if k.ndim != 1 or k.size == 0:
            raise DimensionError("kernel must be a non-empty 1-D array")
        if not np.all(np.isfinite(k)):
            raise ValueError("kernel values must be finite")
        object.__setattr__(self, "kernel", k)

    @property
    def size(self) -> int:
        return self.kernel.size

    @property
    def scale(self) -> float:
        """Sup norm of the kernel, the smallness parameter of the approximations."""
        return float(np.max(np.abs(self.kernel)))

    @property
    def spectrum(self) -> np.ndarray:
        return fourier.dft(self.kernel)

    def preactivation(self, x) -> np.ndarray:
        x = np.asarray(x)
        if x.shape != self.kernel.shape:
            raise DimensionError(f"input length {x.shape} does not match kernel {self.kernel.shape}")
        return fourier.circular_convolve(x, self.kernel)


def softplus(z):
    """``log(1 + e^z)``; valid for complex arguments near the real axis."""
    z = np.asarray(z)
    if np.iscomplexobj(z):
        return np.log1p(np.exp(z))
    return np.logaddexp(0.0, z)


def forward(layer: ToyConvLayer, x) -> np.ndarray:
    return softplus(layer.preactivation(x))


def conv_jacobian_spectral(layer: ToyConvLayer) -> np.ndarray:
    return np.diag(layer.spectrum)


def softplus_taylor_terms(z_spec):
    """Constant, linear and quadratic spectra of ``log 2 + z/2 + z^2/8``."""
    z_spec = np.asarray(z_spec, dtype=complex)
    n = z_spec.size
    const = np.zeros(n, dtype=complex)
    const[0] = n * math.log(2.0)
    # spectrum of Z^2 is the circular self-convolution of z divided by N
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    self_conv = np.sum(z_spec[idx] * z_spec[None, :], axis=1)
    return const, 0.5 * z_spec, self_conv / (8.0 * n)


def softplus_taylor_spectrum(z_spec) -> np.ndarray:
    const, lin, quad = softplus_taylor_terms(z_spec)
    return const + lin + quad


def activation_jacobian_spectral(z_spec) -> np.ndarray:
    z_spec = np.asarray(z_spec, dtype=complex)
    n = z_spec.size
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return 0.5 * np.eye(n) + z_spec[idx] / (4.0 * n)


def layer_jacobian_full(layer: ToyConvLayer, x) -> np.ndarray:
    """Chain rule of the two stages: ``k(j) [1/2 [i=j] + z(i-j)/(4N)]``."""
    z_spec = fourier.dft(layer.preactivation(x))
    return activation_jacobian_spectral(z_spec) @ conv_jacobian_spectral(layer)


def layer_jacobian_delta(layer: ToyConvLayer) -> np.ndarray:
    return 0.5 * np.diag(layer.spectrum)


def _fd_columns(f, x, h, direction):
    x = np.asarray(x, dtype=float)
    x_spec = fourier.dft(x)
    n = x.size
    cols = []
    for j in range(n):
        step = np.zeros(n, dtype=complex)
        step[j] = direction * h
        plus = fourier.dft(f(fourier.idft(x_spec + step)))
        minus = fourier.dft(f(fourier.idft(x_spec - step)))
        col = (plus - minus) / (2.0 * direction * h)
        if not np.all(np.isfinite(col)):
            raise EnvelopeError(f"non-finite finite-difference column {j}")
        cols.append(col)
    return np.stack(cols, axis=-1)


def fd_jacobian_spectral(f, x, h: float = 1e-6) -> np.ndarray:
    """Central-difference spectral Jacobian of ``f`` at the real input ``x``.

    ``f`` maps a (possibly complex) 1-D grid to a grid; its output length may
    differ from the input length.  Each input coefficient ``x(nu_j)`` is
    perturbed along the real axis only; see :func:`cauchy_riemann_residual`
    for the holomorphy check.
    """
    if h <= 0:
        raise ValueError("step h must be positive")
    return _fd_columns(f, x, h, 1.0)


def cauchy_riemann_residual(f, x, h: float = 1e-6) -> float:
    """Relative gap between real- and imaginary-direction FD Jacobians."""
    j_re = _fd_columns(f, x, h, 1.0)
    j_im = _fd_columns(f, x, h, 1j)
    return float(np.max(np.abs(j_re - j_im)) / max(np.max(np.abs(j_re)), 1e-300))


def off_diagonal_ratio(jac, rows=None) -> float:
    """Largest off-spike magnitude over the largest spike magnitude.

    The spike of row ``i`` sits at column ``i mod n_cols``, which is the
    diagonal for square Jacobians and the aliasing image for up-sampling.
    ``rows`` restricts the comparison to a subset of output frequencies.
    """
    mag = np.abs(np.asarray(jac))
    m, n = mag.shape
    rows = np.arange(m) if rows is None else np.asarray(rows)
    spike_cols = rows % n
    spikes = mag[rows, spike_cols]
    off = mag[rows].copy()
    off[np.arange(rows.size), spike_cols] = 0.0
    return float(np.max(off) / np.max(spikes))


def relu_map(x0):
    """ReLU gated by the sign of the real base point ``x0``.

    Piecewise linear, hence holomorphic near ``x0`` once the gate is frozen.
    """
    gate = np.asarray(x0, dtype=float) > 0

    def f(x):
        return np.where(gate, x, 0)

    return f


def upsample_map(x):
    """Periodic factor-2 linear interpolation: samples kept, midpoints averaged."""
    x = np.asarray(x)
    out = np.empty(2 * x.size, dtype=x.dtype)
    out[0::2] = x
    out[1::2] = 0.5 * (x + np.roll(x, -1))
    return out


def _class_logits(layers, x):
    return np.stack([forward(layer, x) for layer in layers])


def ce_components(layers, x, annot) -> np.ndarray:
    """CE frequency components when class ``c`` logits are ``layers[c](x)``."""
    annot = np.asarray(annot, dtype=float)
    if annot.shape != (len(layers), np.asarray(x).size):
        raise DimensionError("annotation must have shape (num_classes, N)")
    return ce_decompose(_class_logits(layers, x), annot).components


def ce_jacobian_fd(layers, x, annot, h: float = 1e-6) -> np.ndarray:
    """FD oracle for ``d L_ce(nu_i) / d x(nu_j)``."""
    x = np.asarray(x, dtype=float)
    x_spec = fourier.dft(x)
    n = x.size
    cols = []
    for j in range(n):
        step = np.zeros(n, dtype=complex)
        step[j] = h
        plus = ce_components(layers, fourier.idft(x_spec + step), annot)
        minus = ce_components(layers, fourier.idft(x_spec - step), annot)
        cols.append((plus - minus) / (2.0 * h))
    return np.stack(cols, axis=-1)


def ce_jacobian_spectral(layers, x, annot) -> np.ndarray:
    """Leading-order analytic CE spectral gradient (delta structure)."""
    annot = np.asarray(annot, dtype=float)
    n = np.asarray(x).size
    s = fourier.dft(softmax(_class_logits(layers, x)), axes=(1,))
    b = fourier.dft(annot, axes=(1,))
    s_neg = fourier.negate_frequency(s, axes=(1,))
    b_neg = fourier.negate_frequency(b, axes=(1,))
    jac = np.zeros((n, n), dtype=complex)
    for layer, s_c, b_c in zip(layers, s_neg, b_neg):
        k = layer.spectrum
        jac[0, :] += k * s_c
        jac[np.arange(n), np.arange(n)] -= k * b_c
    return jac / (2.0 * n)

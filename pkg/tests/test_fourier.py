import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from specseg import fourier
from specseg.errors import DimensionError


def loop_dft(x, inverse=False):
    x = np.asarray(x, dtype=complex)
    n = x.size
    sign = 1 if inverse else -1
    out = np.zeros(n, dtype=complex)
    for k in range(n):
        for t in range(n):
            out[k] += x[t] * np.exp(sign * 2j * np.pi * k * t / n)
    return out / n if inverse else out


def test_constant_grid_is_dc_only():
    spec = fourier.dft(np.full(6, 2.5))
    assert spec[0] == pytest.approx(15.0)
    assert np.max(np.abs(spec[1:])) < 1e-12


def test_delta_has_flat_spectrum():
    np.testing.assert_allclose(fourier.dft([1.0, 0, 0, 0]), np.ones(4), atol=1e-15)


def test_length7_matches_loop_oracle(rng):
    x = rng.standard_normal(7)
    np.testing.assert_allclose(fourier.dft(x), loop_dft(x), atol=1e-12)
    np.testing.assert_allclose(fourier.naive_dft(x), loop_dft(x), atol=1e-12)


def test_length5_inverse_matches_loop_oracle(rng):
    s = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    np.testing.assert_allclose(fourier.idft(s), loop_dft(s, inverse=True), atol=1e-12)


def test_idft_of_dc_spike_is_ones():
    np.testing.assert_allclose(fourier.idft([8.0, 0, 0, 0, 0, 0, 0, 0]), np.ones(8), atol=1e-15)


@pytest.mark.parametrize("shape", [(8, 8), (5, 7), (64, 64), (1, 9), (13,), (64,), (33, 16)])
def test_round_trip(rng, shape):
    x = rng.standard_normal(shape)
    assert np.max(np.abs(fourier.idft(fourier.dft(x)) - x)) <= 1e-12


@pytest.mark.parametrize("n", [2, 4, 8, 32, 128])
def test_radix2_matches_naive_and_numpy(rng, n):
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    np.testing.assert_allclose(fourier.radix2_dft(x), fourier.naive_dft(x), atol=1e-10)
    np.testing.assert_allclose(fourier.dft(x, method="radix2"), np.fft.fft(x), atol=1e-10)
    np.testing.assert_allclose(fourier.idft(x, method="radix2"), np.fft.ifft(x), atol=1e-12)


@pytest.mark.parametrize("shape", [(9,), (6, 10), (16, 16), (513,)])
def test_auto_matches_numpy_oracle(rng, shape):
    x = rng.standard_normal(shape)
    np.testing.assert_allclose(fourier.dft(x), np.fft.fftn(x), atol=1e-9)


def test_axes_argument_transforms_only_those_axes(rng):
    x = rng.standard_normal((3, 6, 5))
    np.testing.assert_allclose(fourier.dft(x, axes=(1, 2)), np.fft.fftn(x, axes=(1, 2)), atol=1e-11)


def test_empty_grid_rejected():
    with pytest.raises(DimensionError):
        fourier.dft(np.zeros(0))
    with pytest.raises(DimensionError):
        fourier.idft(np.zeros((0, 3)))


def test_signed_frequencies():
    assert list(fourier.signed_frequencies(4)) == [0, 1, 2, -1]
    assert list(fourier.signed_frequencies(5)) == [0, 1, 2, -2, -1]


def test_chebyshev_radius_bounds():
    r = fourier.chebyshev_radius((6, 9))
    assert r.min() == 0 and r.max() == 4
    assert fourier.nyquist_radius((6, 9)) == 4


@given(arrays(np.float64, st.tuples(st.integers(1, 9), st.integers(1, 9)),
              elements=st.floats(-1e3, 1e3)))
@settings(max_examples=60, deadline=None)
def test_conjugate_symmetry(x):
    spec = fourier.dft(x)
    np.testing.assert_allclose(fourier.negate_frequency(spec), np.conj(spec), atol=1e-8)


def test_overlap_spatial_examples():
    assert fourier.overlap_spatial(np.ones(4), np.ones(4)) == 4
    assert fourier.overlap_spatial([1, 2], [3, -1]) == 1


def test_overlap_spectral_examples():
    one = fourier.dft(np.ones(4))
    assert fourier.overlap_spectral(one, one) == pytest.approx(4)
    delta = np.zeros(8)
    delta[0] = 1
    v = fourier.overlap_spectral(fourier.dft(delta), fourier.dft(np.ones(8)))
    assert v == pytest.approx(1)


def test_overlap_dimension_mismatch():
    with pytest.raises(DimensionError):
        fourier.overlap_spatial(np.ones(3), np.ones(4))
    with pytest.raises(DimensionError):
        fourier.overlap_spectral(np.ones(3), np.ones((3, 1)))


@pytest.mark.parametrize("shape", [(6, 6), (5, 7)])
def test_overlap_spatial_equals_spectral(rng, shape):
    a, b = rng.standard_normal(shape), rng.standard_normal(shape)
    v = fourier.overlap_spectral(fourier.dft(a), fourier.dft(b))
    assert abs(v.real - fourier.overlap_spatial(a, b)) <= 1e-10
    assert abs(v.imag) <= 1e-10


def test_total_mass_and_dc(rng):
    assert fourier.total_mass(np.ones((3, 3))) == 9
    assert abs(fourier.zero_frequency(fourier.dft([1.0, -2.0, 1.0]))) < 1e-15
    x = rng.standard_normal((7, 4))
    assert abs(fourier.total_mass(x) - fourier.zero_frequency(fourier.dft(x)).real) <= 1e-10


def test_band_limit_length9_keeps_enumerated_indices():
    kept = np.flatnonzero(fourier.band_limit(np.ones(9, dtype=complex), 2))
    assert list(kept) == [0, 1, 2, 7, 8]


def test_band_limit_edges(rng):
    s = fourier.dft(rng.standard_normal((8, 6)))
    np.testing.assert_array_equal(fourier.band_limit(s, 4), s)
    only_dc = fourier.band_limit(s, 0)
    assert only_dc[0, 0] == s[0, 0]
    assert np.count_nonzero(only_dc) == 1


def test_band_limit_2d_is_chebyshev_ball(rng):
    s = np.ones((8, 8), dtype=complex)
    out = fourier.band_limit(s, 2)
    kept = out != 0
    assert np.array_equal(kept, fourier.chebyshev_radius((8, 8)) <= 2)


def test_circular_convolve_examples():
    x = np.array([3.0, 1.0, 4.0, 1.0])
    np.testing.assert_allclose(fourier.circular_convolve(x, [1.0, 0, 0, 0]), x, atol=1e-14)
    np.testing.assert_allclose(fourier.circular_convolve([1.0, 0, 0, 0], [0, 1.0, 0, 0]), [0, 1, 0, 0], atol=1e-14)


def test_circular_convolve_matches_double_loop(rng):
    a, k = rng.standard_normal(8), rng.standard_normal(8)
    ref = np.array([sum(a[m] * k[(t - m) % 8] for m in range(8)) for t in range(8)])
    np.testing.assert_allclose(fourier.circular_convolve(a, k), ref, atol=1e-12)


def test_convolution_theorem(rng):
    a, k = rng.standard_normal((6, 5)), rng.standard_normal((6, 5))
    lhs = fourier.dft(fourier.circular_convolve(a, k))
    np.testing.assert_allclose(lhs, fourier.dft(a) * fourier.dft(k), atol=1e-10)


def test_linearity(rng):
    a, b = rng.standard_normal((7, 3)), rng.standard_normal((7, 3))
    lhs = fourier.dft(2.5 * a - 0.75 * b)
    np.testing.assert_allclose(lhs, 2.5 * fourier.dft(a) - 0.75 * fourier.dft(b), atol=1e-12)

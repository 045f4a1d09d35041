import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperwalk.hypercube import (
    LOG_SPACE_N,
    Dim,
    binomial,
    hamming_weight,
    log_binomial,
    mode_arrays,
    mode_iter,
    mode_position,
    mode_weight_total,
    pascal_row,
    spectral_params,
    unperturbed_spacing,
)


@given(st.integers(min_value=0, max_value=2**40))
def test_hamming_weight_matches_bin(x):
    assert hamming_weight(x) == bin(x).count("1")


def test_hamming_weight_array():
    x = np.arange(1024)
    assert np.array_equal(hamming_weight(x), [bin(int(v)).count("1") for v in x])


@given(st.integers(min_value=0, max_value=64), st.data())
def test_binomial_matches_math_comb(n, data):
    k = data.draw(st.integers(min_value=0, max_value=n))
    assert binomial(n, k) == math.comb(n, k)
    assert pascal_row(n)[k] == math.comb(n, k)


@pytest.mark.parametrize("n,k", [(-1, 0), (5, 6), (5, -1), (65, 3)])
def test_binomial_domain(n, k):
    with pytest.raises(ValueError):
        binomial(n, k)


def test_log_binomial():
    for n in (10, 50, 300):
        for k in (0, 1, n // 3, n // 2, n):
            assert math.isclose(log_binomial(n, k), math.log(math.comb(n, k)), rel_tol=1e-12, abs_tol=1e-12)


def test_dim():
    assert Dim(5).N == 32
    with pytest.raises(ValueError):
        Dim(1)


def test_mode_order_and_count():
    for n in (2, 3, 7, 20):
        ms = list(mode_iter(n))
        assert ms == list(range(-n + 1, n + 1))
        assert [mode_position(n, m) for m in ms] == list(range(2 * n))


@pytest.mark.parametrize("n", [2, 3, 8, 20, 41, 100])
def test_mode_arrays_invariants(n):
    m, omega, phi, ephi, beta, p = mode_arrays(n)
    assert len(m) == 2 * n
    assert np.all(np.diff(omega) > 0)
    assert omega[0] > -math.pi and omega[-1] == pytest.approx(math.pi)
    assert np.allclose(np.abs(ephi), 1.0)
    assert np.allclose(np.exp(1j * phi), ephi)
    assert math.isclose(p.sum(), 1.0, rel_tol=1e-12)
    assert not omega.flags.writeable


def test_mode_arrays_closed_form():
    n = 9
    m, omega, _, ephi, beta, p = mode_arrays(n)
    for j, mm in enumerate(m):
        k = abs(int(mm))
        sgn = -1 if mm < 0 else 1
        assert omega[j] == pytest.approx(sgn * math.acos(1 - 2 * k / n))
        b = math.sqrt(2) if k in (0, n) else 1.0
        assert beta[j] == b
        assert p[j] == pytest.approx(math.comb(n, k) * b * b / 2 ** (n + 1))
    assert ephi[mode_position(n, 0)] == pytest.approx(1j)
    assert ephi[mode_position(n, n)] == pytest.approx(1.0)


def test_weights_log_space_continuous():
    # the switch to log space at LOG_SPACE_N must not change values
    n = LOG_SPACE_N + 1
    *_, p = mode_arrays(n)
    ref = [math.comb(n, abs(m)) * (2 if abs(m) in (0, n) else 1) / 2 ** (n + 1) for m in mode_iter(n)]
    assert np.allclose(p, ref, rtol=1e-12, atol=0)


def test_mode_weight_total():
    for n in (2, 5, 30, 64):
        assert mode_weight_total(n) == 2 ** (n + 1)


def test_spectral_params_roundtrip():
    sp = spectral_params(6, -2)
    assert sp.m == -2
    assert sp.omega == pytest.approx(-math.acos(1 - 4 / 6))
    assert sp.ephi == pytest.approx(complex(math.sqrt(2), -math.sqrt(4)) / math.sqrt(6))


def test_unperturbed_spacing():
    n = 10
    _, omega, *_ = mode_arrays(n)
    j = mode_position(n, 3)
    assert unperturbed_spacing(n, 3) == pytest.approx(min(omega[j] - omega[j - 1], omega[j + 1] - omega[j]))
    # omega_n = pi neighbours omega_{-n+1} across the branch cut
    assert unperturbed_spacing(n, n) == pytest.approx(omega[-1] - omega[-2])

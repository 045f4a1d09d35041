"""Hypercube combinatorics and the closed-form spectral data of the Grover walk.

Modes are labelled by a single integer ``m`` in ``[-n+1, n]``: ``|m|`` is the
Hamming weight ``k`` of the Fourier vector and ``sgn(m)`` picks the ``+``/``-``
branch of the eigenvalue pair ``exp(+-i omega_k)``. ``m = 0`` and ``m = n`` are
single modes; both use the ``+`` branch.

Mode arrays returned here are always in :func:`mode_iter` order, which is also
increasing order of ``omega_m`` on ``(-pi, pi]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_BINOMIAL_N = 64
# Above this, mode weights are formed from log-binomials.
LOG_SPACE_N = 40


@dataclass(frozen=True)
class Dim:
    """Hypercube dimension ``n`` with ``N = 2**n`` vertices."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise ValueError(f"hypercube dimension must be an integer >= 2, got {self.n!r}")

    @property
    def N(self) -> int:
        return 1 << int(self.n)


@dataclass(frozen=True)
class SpectralParams:
    m: int
    omega: float
    phi: float
    beta: float

    @property
    def ephi(self) -> complex:
        return complex(math.cos(self.phi), math.sin(self.phi))


def hamming_weight(x):
    """Number of set bits of ``x`` (int or integer array)."""
    if isinstance(x, (int, np.integer)):
        if x < 0:
            raise ValueError("vertex labels are non-negative")
        return int(x).bit_count()
    return np.bitwise_count(np.asarray(x)).astype(np.int64)


@lru_cache(maxsize=None)
def pascal_row(n: int) -> tuple[int, ...]:
    """Row ``n`` of Pascal's triangle built by integer recurrence."""
    if n == 0:
        return (1,)
    prev = pascal_row(n - 1)
    return (1,) + tuple(prev[i] + prev[i + 1] for i in range(n - 1)) + (1,)


def binomial(n: int, k: int) -> int:
    """Exact binomial coefficient for ``0 <= k <= n <= 64``."""
    if not (0 <= k <= n <= MAX_BINOMIAL_N):
        raise ValueError(f"binomial({n}, {k}) outside 0 <= k <= n <= {MAX_BINOMIAL_N}")
    return pascal_row(n)[k]


def log_binomial(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def mode_iter(n: int) -> range:
    """All mode labels ``-n+1, ..., n`` in canonical order."""
    return range(-n + 1, n + 1)


def mode_position(n: int, m: int) -> int:
    """Index of mode ``m`` in :func:`mode_iter` order."""
    if not -n + 1 <= m <= n:
        raise ValueError(f"mode {m} outside [{-n + 1}, {n}]")
    return m + n - 1


def spectral_params(n: int, m: int) -> SpectralParams:
    mode_position(n, m)
    k = abs(m)
    sign = -1.0 if m < 0 else 1.0
    omega = sign * math.acos(1.0 - 2.0 * k / n)
    # m = 0 lands on phi = pi/2 (e^{i phi} = +i) through the + branch.
    phi = sign * math.atan2(math.sqrt(n - k), math.sqrt(k))
    beta = math.sqrt(2.0) if k in (0, n) else 1.0
    return SpectralParams(m, omega, phi, beta)


@lru_cache(maxsize=64)
def _arrays(n: int):
    m = np.arange(-n + 1, n + 1)
    k = np.abs(m)
    sign = np.where(m < 0, -1.0, 1.0)
    omega = sign * np.arccos(1.0 - 2.0 * k / n)
    omega[m == 0] = 0.0
    omega[m == n] = math.pi
    phi = sign * np.arctan2(np.sqrt(n - k), np.sqrt(k))
    ephi = (np.sqrt(k) + 1j * sign * np.sqrt(n - k)) / math.sqrt(n)
    ephi[m == 0] = 1j
    ephi[m == n] = 1.0
    beta = np.where((k == 0) | (k == n), math.sqrt(2.0), 1.0)
    weights = _mode_weights(n, k)
    out = (m, omega, phi, ephi, beta, weights)
    for a in out:
        a.setflags(write=False)
    return out


def _mode_weights(n: int, k: np.ndarray) -> np.ndarray:
    beta2 = np.where((k == 0) | (k == n), 2, 1)
    if n <= LOG_SPACE_N:
        row = pascal_row(n)
        return np.array([row[int(kk)] * int(b2) / 2 ** (n + 1) for kk, b2 in zip(k, beta2)])
    logs = np.array([log_binomial(n, int(kk)) for kk in k]) + np.log(beta2) - (n + 1) * math.log(2.0)
    return np.exp(logs)


def mode_arrays(n: int):
    """Vectorised spectral data in mode order.

    Returns
    -------
    m, omega, phi, ephi, beta, weights : ndarray
        ``weights[j] = binom(n, |m_j|) * beta_j**2 / 2**(n+1)``; these are the
        squared overlaps ``|<omega_m|sv>|**2`` and sum to one.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    return _arrays(int(n))


def mode_weight_total(n: int) -> int:
    """``sum_m binom(n,|m|) beta_m**2`` in exact integer arithmetic (equals ``2**(n+1)``)."""
    row = pascal_row(n)
    return sum(row[abs(m)] * (2 if abs(m) in (0, n) else 1) for m in mode_iter(n))


def unperturbed_spacing(n: int, m: int) -> float:
    """Smaller of the two phase gaps from ``omega_m`` to its neighbours on the circle."""
    _, omega, *_ = mode_arrays(n)
    j = mode_position(n, m)
    lo = omega[j] - omega[j - 1] if j > 0 else omega[j] - (omega[-1] - 2 * math.pi)
    hi = omega[j + 1] - omega[j] if j + 1 < 2 * n else omega[0] + 2 * math.pi - omega[j]
    return float(min(lo, hi))

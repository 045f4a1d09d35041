"""The ``2n``-dimensional invariant subspace spanned by ``|omega_m>``.

With the marked vertex at 0, ``|omega_m>`` is the normalised sum of the
``binom(n, |m|)`` eigenvectors of weight ``|m|`` on the ``sgn(m)`` branch. It
is invariant under permutations of the bits, so its amplitude at ``(d, x)``
only depends on ``r = |x|`` and on the bit ``b = x_d``. :func:`shell_map`
tabulates these amplitudes exactly (Krawtchouk sums), which gives cheap
lifting to and projection from the full space, and Hamming-shell
probabilities for reduced states of any size.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .hypercube import mode_arrays, mode_position, pascal_row
from .walk import _grid, check_full_n

MAX_REDUCED_N = 30


def _check_reduced_n(n: int) -> None:
    if not 2 <= n <= MAX_REDUCED_N:
        raise ValueError(f"reduced space supports 2 <= n <= {MAX_REDUCED_N}, got {n}")


def sv_components(n: int) -> np.ndarray:
    """Coordinates ``<omega_m|sv>`` of the marked state, in mode order."""
    _, _, _, ephi, _, weights = mode_arrays(n)
    return np.sqrt(weights) * ephi


def basis_state(n: int, m: int) -> np.ndarray:
    psi = np.zeros(2 * n, dtype=np.complex128)
    psi[mode_position(n, m)] = 1.0
    return psi


def build_reduced_u_lambda(n: int, lam: float) -> np.ndarray:
    """Dense ``U_lam`` in the ``|omega_m>`` basis.

    ``M[a, b] = e^{i omega_a} (delta_ab + (e^{i pi lam} - 1) s_a conj(s_b))``.
    """
    _, omega, *_ = mode_arrays(n)
    s = sv_components(n)
    c = cmath.exp(1j * math.pi * lam) - 1.0
    M = c * np.outer(s, s.conj())
    M[np.diag_indices_from(M)] += 1.0
    return np.exp(1j * omega)[:, None] * M


def _krawtchouk(j: int, x: int, N: int) -> int:
    if j < 0 or j > N:
        return 0
    return sum((-1) ** i * math.comb(x, i) * math.comb(N - x, j - i) for i in range(0, min(j, x) + 1))


@lru_cache(maxsize=32)
def shell_map(n: int) -> np.ndarray:
    """Amplitudes ``c[m, r, b]`` of ``|omega_m>`` at any ``(d, x)`` with ``|x| = r``, ``x_d = b``.

    Entries for impossible classes (``b = 1, r = 0`` and ``b = 0, r = n``) are zero.
    """
    _check_reduced_n(n)
    m_arr, *_ = mode_arrays(n)
    row = pascal_row(n)
    c = np.zeros((2 * n, n + 1, 2), dtype=np.complex128)
    for j, m in enumerate(m_arr):
        m = int(m)
        k = abs(m)
        sign = -1 if m < 0 else 1
        beta = math.sqrt(2.0) if k in (0, n) else 1.0
        pref = beta * 2.0 ** (-(n + 1) / 2) / math.sqrt(row[k])
        for r in range(n + 1):
            for b in (0, 1):
                if (b == 1 and r == 0) or (b == 0 and r == n):
                    continue
                amp = 0j
                if k > 0:
                    amp += (-1) ** b * _krawtchouk(k - 1, r - b, n - 1) / math.sqrt(k)
                if k < n:
                    amp += -sign * 1j * _krawtchouk(k, r - b, n - 1) / math.sqrt(n - k)
                c[j, r, b] = pref * amp
    c.setflags(write=False)
    return c


def _class_index(n: int, v: int = 0) -> np.ndarray:
    """``2 * |x ^ v| + bit_d(x ^ v)`` for every flat index ``(d, x)``."""
    y = np.arange(1 << n) ^ v
    r = np.bitwise_count(y).astype(np.int64)
    bits = (y[None, :] >> np.arange(n)[:, None]) & 1
    return (2 * r[None, :] + bits).reshape(-1)


def lift(coeffs: np.ndarray, n: int, v: int = 0) -> np.ndarray:
    """Full-space state ``sum_m coeffs[m] |omega_m>`` (reduction centred at ``v``)."""
    check_full_n(n)
    amps = np.tensordot(np.asarray(coeffs, dtype=np.complex128), shell_map(n), axes=(0, 0))
    return amps.reshape(-1)[_class_index(n, v)]


def project_full_to_reduced(psi: np.ndarray, n: int) -> np.ndarray:
    """``coeffs[m] = <omega_m|psi>`` for a full state with the marked vertex at 0."""
    check_full_n(n)
    flat = _grid(psi, n).reshape(-1)
    idx = _class_index(n)
    sums = np.bincount(idx, weights=flat.real, minlength=2 * (n + 1)) + 1j * np.bincount(
        idx, weights=flat.imag, minlength=2 * (n + 1)
    )
    return shell_map(n).reshape(2 * n, -1).conj() @ sums


def class_sizes(n: int) -> np.ndarray:
    """Number of ``(d, x)`` pairs in each ``(r, b)`` class, shape ``(n + 1, 2)``."""
    row = np.array(pascal_row(n), dtype=float)
    r = np.arange(n + 1)
    return np.stack([row * (n - r), row * r], axis=1)


def reduced_shell_probabilities(coeffs: np.ndarray, n: int) -> np.ndarray:
    """Hamming-shell distribution of the lifted state; accepts one state or a stack."""
    amps = np.tensordot(np.asarray(coeffs), shell_map(n), axes=(-1, 0))
    return (np.abs(amps) ** 2 * class_sizes(n)).sum(axis=-1)


@dataclass
class ReducedTrace:
    p_sv: np.ndarray
    coeffs: np.ndarray

    @property
    def t(self) -> np.ndarray:
        return np.arange(len(self.p_sv))


def reduced_evolve(psi0: np.ndarray, n: int, lam: float, steps: int) -> ReducedTrace:
    """Iterate the reduced operator; ``p_sv[t] = |<sv|psi_t>|**2``."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    _check_reduced_n(n)
    M = build_reduced_u_lambda(n, lam)
    s = sv_components(n)
    coeffs = np.empty((steps + 1, 2 * n), dtype=np.complex128)
    coeffs[0] = psi0
    for t in range(steps):
        coeffs[t + 1] = M @ coeffs[t]
    p_sv = np.abs(coeffs @ s.conj()) ** 2
    return ReducedTrace(p_sv=p_sv, coeffs=coeffs)

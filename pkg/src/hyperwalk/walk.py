"""Matrix-free Grover walk on the full ``n * 2**n`` dimensional space.

A state is a flat complex array with index ``d * 2**n + x``: direction ``d``
in ``[0, n)`` and vertex ``x`` in ``[0, 2**n)``. Direction ``d`` flips bit
``d`` of the vertex label. One step of the perturbed walk is

    psi -> S C (psi + (exp(i pi lam) - 1) <sv|psi> |sv>)

so ``lam = 0`` is the free walk and ``lam = 1`` marks ``v`` with the coin ``-1``.
"""
from __future__ import annotations

import cmath
import math
import os
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError
from .hypercube import hamming_weight

DEFAULT_MAX_FULL_N = 20
HARD_MAX_FULL_N = 24
ENV_MAX_FULL_N = "HYPERWALK_MAX_FULL_N"


class DuplicateModeWarning(UserWarning):
    """The requested eigenvector coincides with the other sign branch."""


def max_full_n() -> int:
    """Largest ``n`` allowed for full-space states (env ``HYPERWALK_MAX_FULL_N``)."""
    raw = os.environ.get(ENV_MAX_FULL_N)
    if raw is None or raw.strip() == "":
        return DEFAULT_MAX_FULL_N
    try:
        value = int(raw)
    except ValueError:
        raise CapabilityError(f"{ENV_MAX_FULL_N}={raw!r} is not an integer") from None
    if not 2 <= value <= HARD_MAX_FULL_N:
        raise CapabilityError(f"{ENV_MAX_FULL_N} must lie in [2, {HARD_MAX_FULL_N}], got {value}")
    return value


def check_full_n(n: int) -> None:
    cap = max_full_n()
    if n > cap:
        raise CapabilityError(
            f"full-space states need n <= {cap} (set {ENV_MAX_FULL_N}, at most {HARD_MAX_FULL_N})"
        )
    if n < 2:
        raise ValueError("n must be >= 2")


@dataclass(frozen=True)
class WalkConfig:
    n: int
    marked: int = 0
    lam: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if not 0 <= self.marked < (1 << self.n):
            raise ValueError(f"marked vertex {self.marked} outside [0, 2**{self.n})")

    @property
    def N(self) -> int:
        return 1 << self.n


def _grid(psi: np.ndarray, n: int) -> np.ndarray:
    psi = np.asarray(psi)
    if psi.shape != (n << n,):
        raise ValueError(f"state must have length n * 2**n = {n << n}, got {psi.shape}")
    return psi.reshape(n, 1 << n)


def apply_coin(psi: np.ndarray, n: int) -> np.ndarray:
    """Grover coin ``2|s><s| - 1`` at every vertex."""
    a = _grid(psi, n)
    out = np.empty_like(a, dtype=np.complex128)
    np.subtract((2.0 / n) * a.sum(axis=0), a, out=out)
    return out.reshape(-1)


def apply_shift(psi: np.ndarray, n: int) -> np.ndarray:
    """Move amplitude at ``(d, x)`` to ``(d, x ^ 2**d)``."""
    a = _grid(psi, n)
    N = 1 << n
    out = np.empty_like(a, dtype=np.complex128)
    for d in range(n):
        block = 1 << d
        # Swapping adjacent blocks of length 2**d flips bit d.
        src = a[d].reshape(N // (2 * block), 2, block)
        out[d].reshape(N // (2 * block), 2, block)[...] = src[:, ::-1, :]
    return out.reshape(-1)


def apply_marked_phase(psi: np.ndarray, cfg: WalkConfig) -> np.ndarray:
    """``(1 + (e^{i pi lam} - 1)|sv><sv|) psi``."""
    a = _grid(psi, cfg.n).astype(np.complex128, copy=True)
    c = cmath.exp(1j * math.pi * cfg.lam) - 1.0
    col = a[:, cfg.marked]
    col += c * col.mean()
    return a.reshape(-1)


def step_u(psi: np.ndarray, n: int) -> np.ndarray:
    """Unperturbed step ``U = S C``."""
    return apply_shift(apply_coin(psi, n), n)


def step_u_lambda(psi: np.ndarray, cfg: WalkConfig) -> np.ndarray:
    return apply_shift(apply_coin(apply_marked_phase(psi, cfg), cfg.n), cfg.n)


def build_eigenvector(n: int, kvec: int, sign: int = 1) -> np.ndarray:
    """Eigenvector ``|v_k^+->`` of ``U`` with eigenvalue ``exp(+-i omega_|k|)``.

    For ``|k|`` in ``{0, n}`` both signs give the same ray; asking for the
    ``-`` branch there emits :class:`DuplicateModeWarning`.
    """
    check_full_n(n)
    N = 1 << n
    if not 0 <= kvec < N:
        raise ValueError(f"kvec {kvec} outside [0, 2**{n})")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    k = hamming_weight(kvec)
    if k in (0, n) and sign == -1:
        warnings.warn(
            f"|k| = {k}: the - branch duplicates the + branch", DuplicateModeWarning, stacklevel=2
        )
    beta = math.sqrt(2.0) if k in (0, n) else 1.0
    x = np.arange(N)
    parity = 1.0 - 2.0 * (np.bitwise_count(x & kvec) & 1)
    alpha = np.empty(n, dtype=np.complex128)
    for d in range(n):
        alpha[d] = 1.0 / math.sqrt(k) if (kvec >> d) & 1 else -sign * 1j / math.sqrt(n - k)
    scale = beta * 2.0 ** (-n / 2) / math.sqrt(2.0)
    return (scale * alpha[:, None] * parity[None, :]).reshape(-1)


def sv_state(cfg: WalkConfig) -> np.ndarray:
    """Uniform coin state localised on the marked vertex."""
    check_full_n(cfg.n)
    psi = np.zeros((cfg.n, cfg.N), dtype=np.complex128)
    psi[:, cfg.marked] = 1.0 / math.sqrt(cfg.n)
    return psi.reshape(-1)


def uniform_state(n: int) -> np.ndarray:
    """``|v_0>``: equal weight on every ``(d, x)``; the standard search start."""
    return build_eigenvector(n, 0, 1)


def relabel_marked(psi: np.ndarray, n: int, v: int) -> np.ndarray:
    """Translate the state by ``x -> x ^ v`` (conjugates a search at ``v`` to one at 0)."""
    a = _grid(psi, n)
    return a[:, np.arange(1 << n) ^ v].reshape(-1)


def vertex_probabilities(psi: np.ndarray, n: int) -> np.ndarray:
    a = _grid(psi, n)
    return (a.real ** 2 + a.imag ** 2).sum(axis=0)


def marked_probability(psi: np.ndarray, n: int, v: int = 0) -> float:
    a = _grid(psi, n)[:, v]
    return float(np.sum(a.real ** 2 + a.imag ** 2))


def shell_probabilities(psi: np.ndarray, n: int, v: int = 0) -> np.ndarray:
    """Probability as a function of Hamming distance ``|x ^ v|``; length ``n + 1``."""
    dist = np.bitwise_count(np.arange(1 << n) ^ v)
    return np.bincount(dist, weights=vertex_probabilities(psi, n), minlength=n + 1)


@dataclass
class FullTrace:
    """Per-step records of a full-space evolution (``steps + 1`` rows)."""

    p_marked: np.ndarray
    shells: np.ndarray
    final: np.ndarray

    @property
    def t(self) -> np.ndarray:
        return np.arange(len(self.p_marked))


def evolve(psi0: np.ndarray, cfg: WalkConfig, steps: int) -> FullTrace:
    """Iterate ``U_lam`` and record the marked-vertex and shell probabilities."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    check_full_n(cfg.n)
    n = cfg.n
    dist = np.bitwise_count(np.arange(cfg.N) ^ cfg.marked)
    shells = np.empty((steps + 1, n + 1))
    psi = np.asarray(psi0, dtype=np.complex128)
    for t in range(steps + 1):
        if t:
            psi = step_u_lambda(psi, cfg)
        shells[t] = np.bincount(dist, weights=vertex_probabilities(psi, n), minlength=n + 1)
    return FullTrace(p_marked=shells[:, 0].copy(), shells=shells, final=psi)

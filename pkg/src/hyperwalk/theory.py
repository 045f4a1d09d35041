"""Analytic avoided-crossing model: sum rules, perturber phase, gaps and search times.

Sums over modes are written with the normalised weights
``p_m = binom(n, |m|) beta_m**2 / 2**(n+1)`` (so ``sum p_m = 1``); every
``2**(n+1)``-scaled expression of the theory is that factor times a sum over
``p_m``, which keeps everything finite for large ``n``.

Two facts used throughout, valid for ``|z| = 1``::

    e^{iw} / (e^{iw} - e^{ig}) = 1/2 - (i/2) cot((w - g)/2)
    1 / (1 - e^{i pi lam})     = 1/2 + (i/2) cot(pi lam / 2)

so the real parts of both sides of the sum rule are constants and the root
condition in ``g`` is the real equation carried by the imaginary parts.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BranchError, NoCrossingError, NumericError, PoleError
from .hypercube import LOG_SPACE_N, log_binomial, mode_arrays, mode_position, pascal_row, unperturbed_spacing

POLE_TOL = 1e-12
G_TOL = 1e-10
LAMBDA_TOL = 1e-10
GPRIME_STEP = 1e-5
BREAKDOWN_FRACTION = 0.5


class TwoLevelWarning(UserWarning):
    """The gap is too large compared to the unperturbed level spacing for a clean two-level rotation."""


def _check_lambda(lam: float) -> None:
    if abs(cmath.exp(1j * math.pi * lam) - 1.0) < POLE_TOL:
        raise ValueError(f"lambda = {lam} makes 1 - exp(i pi lambda) vanish; the sum rule is undefined")


def _h(omega: np.ndarray, g: float) -> np.ndarray:
    z = cmath.exp(1j * g)
    ew = np.exp(1j * omega)
    dist = np.abs(ew - z)
    if dist.min() < POLE_TOL:
        raise PoleError(f"g = {g!r} sits on a pole omega_m")
    return ew / (ew - z)


def sum_rule_full(n: int, lam: float, g: float) -> complex:
    """``2^{n+1}/(1 - e^{i pi lam}) - sum_m binom beta^2 e^{i w_m}/(e^{i w_m} - e^{ig})``.

    Vanishes exactly when ``e^{ig}`` is an eigenvalue of the reduced ``U_lam``.
    """
    _check_lambda(lam)
    _, omega, _, _, _, p = mode_arrays(n)
    lhs = 1.0 / (1.0 - cmath.exp(1j * math.pi * lam))
    return 2.0 ** (n + 1) * complex(lhs - np.sum(p * _h(omega, g)))


def _partner(n: int, m: int) -> int:
    """Mode whose eigenvalue is ``-e^{i w_m}``."""
    if m == 0:
        return n
    if m == n:
        return 0
    return m - n if m > 0 else m + n


def sum_rule_local_S(n: int, lam: float, g: float, excluded_m: int = 0, form: str = "direct") -> complex:
    """Local sum ``S(lam)``: ``(1 - e^{i pi lam})/2^{n+1}`` times the mode sum without ``excluded_m``.

    ``form="direct"`` sums the terms as written; ``form="cot"`` pairs each
    mode with its antipode (eigenvalue ``-e^{i w}``) and uses
    ``pair = p (1 - i cot(w - g))``. The antipode of the excluded mode is
    left unpaired and enters as ``p (1/2 - (i/2) cot((w - g)/2))``.
    """
    _check_lambda(lam)
    m_arr, omega, _, _, _, p = mode_arrays(n)
    ex = mode_position(n, excluded_m)
    keep = np.arange(len(p)) != ex
    pref = 1.0 - cmath.exp(1j * math.pi * lam)
    if form == "direct":
        return complex(pref * np.sum(p[keep] * _h(omega[keep], g)))
    if form != "cot":
        raise ValueError(f"unknown form {form!r}")
    _h(omega[keep], g)  # pole check
    lone = mode_position(n, _partner(n, excluded_m))
    total = 0j
    seen = {ex, lone}
    for j, m in enumerate(m_arr):
        if j in seen:
            continue
        k = mode_position(n, _partner(n, int(m)))
        seen.update((j, k))
        total += p[j] * (1.0 - 1j / math.tan(omega[j] - g))
    total += p[lone] * (0.5 - 0.5j / math.tan((omega[lone] - g) / 2))
    return complex(pref * total)


def local_residual(n: int, lam: float, g: float, excluded_m: int = 0) -> float:
    """Imaginary part of the local sum rule, divided by ``2^{n+1}``; decreasing in ``g`` between poles."""
    _check_lambda(lam)
    _, omega, _, _, _, p = mode_arrays(n)
    keep = np.ones(len(p), dtype=bool)
    keep[mode_position(n, excluded_m)] = False
    d = (g - omega[keep]) / 2
    if np.abs(np.sin(d)).min() < POLE_TOL:
        raise PoleError(f"g = {g!r} sits on a pole")
    return float(0.5 * np.sum(p[keep] / np.tan(d)) - 0.5 / math.tan(math.pi * lam / 2))


def _local_residual_dg(n: int, g: float, excluded_m: int) -> float:
    _, omega, _, _, _, p = mode_arrays(n)
    keep = np.ones(len(p), dtype=bool)
    keep[mode_position(n, excluded_m)] = False
    return float(-0.25 * np.sum(p[keep] / np.sin((g - omega[keep]) / 2) ** 2))


def _branch_interval(n: int, branch_near: float, excluded_m: int) -> tuple[float, float]:
    _, omega, *_ = mode_arrays(n)
    poles = np.delete(omega, mode_position(n, excluded_m))
    # unwrap the hint into the window starting at the lowest pole
    x = poles[0] + np.mod(branch_near - poles[0], 2 * math.pi)
    ext = np.append(poles, poles[0] + 2 * math.pi)
    j = int(np.searchsorted(ext, x, side="right")) - 1
    j = min(max(j, 0), len(ext) - 2)
    shift = branch_near - x
    return float(ext[j] + shift), float(ext[j + 1] + shift)


def solve_g(n: int, lam: float, branch_near: float, excluded_m: int = 0, tol: float = G_TOL) -> float:
    """Perturber eigenphase ``g(lam)`` from the local sum rule without mode ``excluded_m``.

    The root is bracketed between the two poles enclosing ``branch_near``,
    found by bisection and polished with Newton steps. The returned phase lies
    in the same ``2 pi`` window as ``branch_near``.
    """
    _check_lambda(lam)
    a, b = _branch_interval(n, branch_near, excluded_m)
    width = b - a
    lo, hi = a + 1e-10 * width, b - 1e-10 * width
    flo = local_residual(n, lam, lo, excluded_m)
    fhi = local_residual(n, lam, hi, excluded_m)
    if not (flo > 0 > fhi):
        raise BranchError(f"no sign change on ({a:.6g}, {b:.6g}) for lambda={lam}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = local_residual(n, lam, mid, excluded_m)
        if fm > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-6 * width:
            break
    g = 0.5 * (lo + hi)
    # safeguarded Newton: keep the bracket, bisect when a step leaves it
    for _ in range(40):
        f = local_residual(n, lam, g, excluded_m)
        if abs(f) < 0.01 * tol:
            break
        if f > 0:
            lo = g
        else:
            hi = g
        g_new = g - f / _local_residual_dg(n, g, excluded_m)
        if not lo < g_new < hi:
            g_new = 0.5 * (lo + hi)
        if g_new == g:
            break
        g = g_new
    resid = abs(local_residual(n, lam, g, excluded_m))
    # next to a pole the residual is limited by the spacing of doubles in g
    collapsed = hi - lo <= 8 * np.spacing(max(abs(lo), abs(hi), 1.0))
    if resid > tol and not collapsed:
        raise NumericError(f"solve_g residual {resid:.3e} above {tol}")
    return g


@dataclass(frozen=True)
class GammaN:
    n: int
    gamma: float


def gamma_n(n: int) -> GammaN:
    """``2^{-n} sum_{l=1}^{n-1} binom(n, l) cot^2(omega_l)``, with ``cot^2 = (n-2l)^2 / (4l(n-l))``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    ls = range(1, n)
    cot2 = [(n - 2 * l) ** 2 / (4 * l * (n - l)) for l in ls]
    if n <= LOG_SPACE_N:
        row = pascal_row(n)
        total = sum(row[l] * c for l, c in zip(ls, cot2)) / 2 ** n
    else:
        total = math.fsum(math.exp(log_binomial(n, l) - n * math.log(2.0)) * c for l, c in zip(ls, cot2))
    return GammaN(n=n, gamma=total)


def g_prime_at_1(n: int) -> float:
    """Closed-form slope of the central perturber phase at ``lam = 1``."""
    return math.pi / (2.0 * (1.0 + gamma_n(n).gamma - 2.0 ** (-n + 1)))


def g_prime(n: int, m: int, lam: float | None = None, h: float = GPRIME_STEP) -> float:
    """Slope ``g'(lam)`` of the perturber phase at crossing ``m``.

    Uses the closed form at the central crossing (``m = 0``, ``lam = 1``) and a
    central difference of :func:`solve_g` otherwise.
    """
    if lam is None:
        lam = lambda_of_crossing(n, m)
        if m == 0:
            return g_prime_at_1(n)
    _, omega, *_ = mode_arrays(n)
    w = float(omega[mode_position(n, m)])
    gp = solve_g(n, lam + h, w, excluded_m=m)
    gm = solve_g(n, lam - h, w, excluded_m=m)
    return (gp - gm) / (2 * h)


def _crossing_target(n: int, m: int) -> float:
    _, omega, _, _, _, p = mode_arrays(n)
    j = mode_position(n, m)
    keep = np.ones(len(p), dtype=bool)
    keep[j] = False
    return float(0.5 * np.sum(p[keep] / np.tan((omega[j] - omega[keep]) / 2)))


def lambda_of_crossing(n: int, m: int, tol: float = LAMBDA_TOL) -> float:
    """``lam_m`` solving ``g(lam_m) = omega_m`` on ``(0, 2)`` by bisection.

    At ``g = omega_m`` the local sum rule reduces to
    ``cot(pi lam / 2) = target``, a strictly decreasing function of ``lam``.
    """
    if m in (0, n):
        # antipodal terms cancel pairwise: the target is exactly zero
        return 1.0
    target = _crossing_target(n, m)

    def H(lam):
        return target - 0.5 / math.tan(math.pi * lam / 2)

    a, b = 1e-15, 2.0 - 1e-15
    if not (H(a) < 0 < H(b)):
        raise NoCrossingError(f"no crossing for m={m} on (0, 2)")
    lo, hi = a, b
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if H(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass
class PerturberModel:
    lam: float
    g: float
    g_prime: float
    a: np.ndarray
    b: float
    excluded_m: int

    def vector(self, n: int) -> np.ndarray:
        """``|u> = 2^{-n/2-1} sum sqrt(binom) e^{i phi} beta a_m |omega_m>`` (reduced coordinates)."""
        _, _, _, ephi, _, p = mode_arrays(n)
        return np.sqrt(p / 2) * ephi * self.a


def perturber_model(
    n: int, lam: float, branch_near: float, excluded_m: int = 0, g: float | None = None, gprime: float | None = None
) -> PerturberModel:
    """Perturber expansion coefficients at ``lam`` with ``b`` real and positive.

    ``a_m = (1 - e^{i pi lam}) 2^{-n-1} b e^{i w_m}/(e^{i w_m} - e^{ig})`` and
    ``b = sqrt(2 g'/pi) 2^{n+1}``; the excluded mode has ``a = 0``.
    """
    _, omega, *_ = mode_arrays(n)
    if g is None:
        g = solve_g(n, lam, branch_near, excluded_m)
    if gprime is None:
        gprime = g_prime(n, excluded_m, lam)
    keep = np.ones(2 * n, dtype=bool)
    keep[mode_position(n, excluded_m)] = False
    a = np.zeros(2 * n, dtype=np.complex128)
    z = cmath.exp(1j * g)
    ew = np.exp(1j * omega[keep])
    amp = math.sqrt(2 * gprime / math.pi)
    # 2^{-n-1} b = sqrt(2 g'/pi)
    a[keep] = (1.0 - cmath.exp(1j * math.pi * lam)) * amp * ew / (ew - z)
    b = amp * 2.0 ** (n + 1)
    return PerturberModel(lam=lam, g=g, g_prime=gprime, a=a, b=b, excluded_m=excluded_m)


def perturber_vector(n: int, m: int) -> np.ndarray:
    """Local perturber state ``|u_m>`` at the crossing (orthogonal to ``|omega_m>``)."""
    _, omega, *_ = mode_arrays(n)
    w = float(omega[mode_position(n, m)])
    lam = lambda_of_crossing(n, m)
    model = perturber_model(n, lam, w, excluded_m=m, g=w, gprime=g_prime(n, m))
    return model.vector(n)


def two_level_matrix(n: int, m: int) -> np.ndarray:
    """``[[A, B], [C, D]]`` of ``U_{lam_m}`` on ``span{|u_m>, |omega_m>}``.

    ``A = <u|U|u>``, ``B = <omega|U|u>``, ``C = <u|U|omega>``, ``D = <omega|U|omega>``.
    """
    _, omega, phi, ephi, _, p = mode_arrays(n)
    j = mode_position(n, m)
    lam = lambda_of_crossing(n, m)
    w = float(omega[j])
    e = cmath.exp(1j * math.pi * lam)
    amp = math.sqrt(2 * g_prime(n, m) / math.pi)
    # 2^{-n/2-1} sqrt(binom) beta = sqrt(p / 2)
    q = math.sqrt(p[j] / 2)
    A = cmath.exp(1j * w)
    B = q * (e - 1.0) * cmath.exp(1j * w) * ephi[j] * amp
    C = -q * (1.0 / e - 1.0) * cmath.exp(1j * w) * np.conj(ephi[j]) * amp
    D = cmath.exp(1j * w) * (1.0 + (e - 1.0) * p[j])
    return np.array([[A, B], [C, D]], dtype=np.complex128)


def gap_theory(n: int, m: int) -> float:
    """Leading-order gap ``|1 - e^{i pi lam_m}| 2^{-n/2} sqrt(binom) beta sqrt(2 g'/pi)``."""
    _, _, _, _, _, p = mode_arrays(n)
    lam = lambda_of_crossing(n, m)
    # 2^{-n/2} sqrt(binom) beta = sqrt(2 p)
    return abs(1.0 - cmath.exp(1j * math.pi * lam)) * math.sqrt(2 * p[mode_position(n, m)]) * math.sqrt(
        2 * g_prime(n, m) / math.pi
    )


def search_time(n: int, m: int) -> int:
    """Steps for the half rotation at crossing ``m``: nearest integer to ``pi / gap``."""
    return int(round(math.pi / gap_theory(n, m)))


def search_time_leading(n: int) -> float:
    """``pi sqrt(2^n / 8) sqrt(1 + gamma_n)``: central-crossing time without the ``2^{-n}`` terms."""
    return math.pi * math.sqrt(2.0 ** n / 8.0) * math.sqrt(1.0 + gamma_n(n).gamma)


def search_time_corrected(n: int) -> float:
    """``pi sqrt(N (1/8 + 1/(32 n)))``; kept alongside :func:`search_time_leading` for comparison."""
    return math.pi * math.sqrt(2.0 ** n * (1.0 / 8.0 + 1.0 / (32.0 * n)))


def two_level_breakdown(n: int, m: int, warn: bool = True) -> bool:
    """True when the gap exceeds half the smaller unperturbed spacing around ``omega_m``."""
    broken = gap_theory(n, m) > BREAKDOWN_FRACTION * unperturbed_spacing(n, m)
    if broken and warn:
        warnings.warn(f"crossing m={m} at n={n}: gap comparable to level spacing", TwoLevelWarning, stacklevel=2)
    return broken


@dataclass
class CrossingModel:
    m: int
    lambda_m: float
    g_prime: float
    delta_m: float
    T_m: int
    two_level: np.ndarray
    u_m: np.ndarray
    w_plus: np.ndarray
    w_minus: np.ndarray
    breakdown: bool


def crossing_model(n: int, m: int) -> CrossingModel:
    _, omega, *_ = mode_arrays(n)
    j = mode_position(n, m)
    u = perturber_vector(n, m)
    e_m = np.zeros(2 * n, dtype=np.complex128)
    e_m[j] = 1.0
    delta = gap_theory(n, m)
    return CrossingModel(
        m=m,
        lambda_m=lambda_of_crossing(n, m),
        g_prime=g_prime(n, m),
        delta_m=delta,
        T_m=int(round(math.pi / delta)),
        two_level=two_level_matrix(n, m),
        u_m=u,
        w_plus=(e_m + u) / math.sqrt(2),
        w_minus=(e_m - u) / math.sqrt(2),
        breakdown=two_level_breakdown(n, m),
    )

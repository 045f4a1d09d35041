"""Eigenphases of the reduced walk: dense solver, lambda sweeps, crossing search.

The reduced operator is a rank-one multiplicative perturbation of a diagonal
unitary, so for ``0 < lam < 2`` its eigenphases strictly interlace the
unperturbed phases ``omega_m``: exactly one eigenphase sits in each arc
``(omega_m, omega_{m+1})`` and all of them move counter-clockwise as ``lam``
grows. The two eigenphases bracketing ``omega_m`` are therefore the pair that
forms the ``m``-th avoided crossing, and their separation is the gap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment, minimize_scalar

from ._schur import schur
from .errors import NoCrossingError, NumericError, TrackingError
from .hypercube import mode_arrays, mode_position
from .reduced import build_reduced_u_lambda

UNITARITY_TOL = 1e-10
RESIDUAL_TOL = 1e-10
DEFAULT_POINTS = 400
REFINE_FACTOR = 10
LAMBDA_XTOL = 1e-10


@dataclass
class EigenDecomposition:
    phases: np.ndarray
    vectors: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return np.exp(1j * self.phases)

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


def eig_unitary(M: np.ndarray, check: bool = True) -> EigenDecomposition:
    """Eigenphases in ``(-pi, pi]`` (ascending) and orthonormal eigenvectors of a unitary matrix.

    A unitary matrix is normal, so its complex Schur form is diagonal and the
    Schur vectors are already the eigenvectors.
    """
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("expected a square matrix")
    N = M.shape[0]
    if check:
        defect = np.abs(M.conj().T @ M - np.eye(N)).max()
        if defect > UNITARITY_TOL:
            raise ValueError(f"matrix is not unitary (max |M*M - I| = {defect:.3e})")
    T, Q, its = schur(M)
    if its < 0:
        raise NumericError("shifted QR iteration did not converge")
    values = np.diag(T).copy()
    phases = np.angle(values)
    phases[phases <= -math.pi] += 2 * math.pi
    # Ties at equal phase: order by the dominant basis direction of the vector.
    lead = np.argmax(np.abs(Q), axis=0)
    order = np.lexsort((lead, np.round(phases, 12)))
    phases = phases[order]
    vectors = Q[:, order]
    if check:
        resid = np.abs(M @ vectors - vectors * np.exp(1j * phases)).max() if N else 0.0
        if resid > RESIDUAL_TOL:
            raise NumericError(f"eigenpair residual {resid:.3e} above {RESIDUAL_TOL}")
    return EigenDecomposition(phases=phases, vectors=vectors)


def reduced_phases(n: int, lam: float) -> np.ndarray:
    return eig_unitary(build_reduced_u_lambda(n, lam), check=False).phases


@dataclass
class EigenphaseCurve:
    """Eigenphase tracks on a lambda grid.

    ``tracks[i, j]`` is the (unwrapped) phase of track ``j`` at ``lambdas[i]``.
    Tracks follow eigenvector continuity, not sorted order.
    """

    lambdas: np.ndarray
    tracks: np.ndarray
    min_overlap: float

    @property
    def wrapped(self) -> np.ndarray:
        """Tracks mapped back to ``(-pi, pi]``."""
        w = np.mod(self.tracks + math.pi, 2 * math.pi) - math.pi
        w[w <= -math.pi] += 2 * math.pi
        return w


def sweep_eigenphases(
    n: int, lambda_grid=None, *, overlap_floor: float = 0.5
) -> EigenphaseCurve:
    """Diagonalise the reduced operator over a lambda grid and stitch continuous tracks.

    Consecutive grid points are matched by maximising eigenvector overlap
    (Hungarian assignment). If some matched overlap falls below
    ``overlap_floor`` the grid cannot resolve the track structure and
    :class:`TrackingError` is raised.
    """
    if lambda_grid is None:
        lambda_grid = np.linspace(0.0, 2.0, DEFAULT_POINTS)
    lams = np.asarray(lambda_grid, dtype=float)
    if lams.ndim != 1 or len(lams) < 2:
        raise ValueError("need at least two grid points")
    if np.any(np.diff(lams) <= 0):
        raise ValueError("lambda grid must be strictly increasing")
    if lams[0] < 0 or lams[-1] > 2:
        raise ValueError("lambda grid must lie in [0, 2]")

    dim = 2 * n
    tracks = np.empty((len(lams), dim))
    prev = eig_unitary(build_reduced_u_lambda(n, lams[0]))
    tracks[0] = prev.phases
    perm = np.arange(dim)  # perm[track] = column of prev holding that track
    worst = 1.0
    for i in range(1, len(lams)):
        cur = eig_unitary(build_reduced_u_lambda(n, lams[i]))
        overlap = np.abs(prev.vectors.conj().T @ cur.vectors)
        rows, cols = linear_sum_assignment(-overlap)
        matched = overlap[rows, cols]
        worst = min(worst, float(matched.min()))
        if matched.min() < overlap_floor:
            raise TrackingError(
                f"ambiguous track assignment at lambda={lams[i]:.6g} "
                f"(overlap {matched.min():.3f}); refine the grid"
            )
        nxt = np.empty(dim, dtype=int)
        nxt[rows] = cols
        perm = nxt[perm]
        raw = cur.phases[perm]
        # unwrap each track against its previous value
        jump = raw - tracks[i - 1]
        tracks[i] = raw - 2 * math.pi * np.round(jump / (2 * math.pi))
        prev = cur
    return EigenphaseCurve(lambdas=lams, tracks=tracks, min_overlap=worst)


def bracketing_phases(phases: np.ndarray, omega_m: float) -> tuple[float, float]:
    """Eigenphases immediately below and above ``omega_m`` on the circle."""
    below = phases[phases < omega_m]
    above = phases[phases > omega_m]
    lo = below.max() if below.size else phases.max() - 2 * math.pi
    hi = above.min() if above.size else phases.min() + 2 * math.pi
    return float(lo), float(hi)


def crossing_separation(n: int, m: int, lam: float) -> float:
    """Phase separation of the two eigenphases that bracket ``omega_m`` at ``lam``."""
    _, omega, *_ = mode_arrays(n)
    lo, hi = bracketing_phases(reduced_phases(n, lam), omega[mode_position(n, m)])
    return hi - lo


@dataclass
class CrossingNumeric:
    m: int
    lambda_star: float
    gap: float
    phases_at_min: tuple[float, float]


def find_crossing(n: int, m: int, points: int = DEFAULT_POINTS, xtol: float = LAMBDA_XTOL) -> CrossingNumeric:
    """Locate the ``m``-th avoided crossing by minimising :func:`crossing_separation`.

    A uniform scan over ``(0, 2)`` brackets the minimum, a ``REFINE_FACTOR``
    finer local scan narrows it, and bounded Brent minimisation (golden
    section with parabolic steps) finishes to ``xtol`` in lambda.
    """
    if points < 3:
        raise ValueError("need at least 3 grid points")
    _, omega, *_ = mode_arrays(n)
    w = omega[mode_position(n, m)]

    def sep(lam):
        lo, hi = bracketing_phases(reduced_phases(n, lam), w)
        return hi - lo

    # endpoints excluded: interlacing is strict only for 0 < lam < 2
    grid = np.linspace(0.0, 2.0, points)[1:-1]
    vals = np.array([sep(x) for x in grid])
    i = int(np.argmin(vals))
    if i == 0 or i == len(grid) - 1:
        raise NoCrossingError(f"separation for m={m} has no interior minimum on (0, 2)")
    fine = np.linspace(grid[i - 1], grid[i + 1], 2 * REFINE_FACTOR + 1)
    fvals = np.array([sep(x) for x in fine])
    j = int(np.argmin(fvals))
    a = fine[max(j - 1, 0)]
    b = fine[min(j + 1, len(fine) - 1)]
    res = minimize_scalar(sep, bounds=(a, b), method="bounded", options={"xatol": xtol})
    lam_star = float(res.x)
    if not (a < lam_star < b) and not np.isclose(lam_star, fine[j]):
        raise NoCrossingError(f"refinement for m={m} left its bracket")
    lo, hi = bracketing_phases(reduced_phases(n, lam_star), w)
    return CrossingNumeric(m=m, lambda_star=lam_star, gap=hi - lo, phases_at_min=(lo, hi))


def crossing_eigenvectors(n: int, m: int, lam: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exact eigenvectors (below, above) bracketing ``omega_m`` at ``lam`` and their phases."""
    _, omega, *_ = mode_arrays(n)
    dec = eig_unitary(build_reduced_u_lambda(n, lam))
    w = omega[mode_position(n, m)]
    lo, hi = bracketing_phases(dec.phases, w)
    jl = int(np.argmin(np.abs(np.angle(np.exp(1j * (dec.phases - lo))))))
    jh = int(np.argmin(np.abs(np.angle(np.exp(1j * (dec.phases - hi))))))
    return dec.vectors[:, jl], dec.vectors[:, jh], np.array([lo, hi])


def perturber_slope(n: int, m: int, lam: float, h: float = 0.02) -> float:
    """Diabatic central-difference slope of the perturber phase through crossing ``m``.

    Below the crossing the perturber is the eigenphase just under ``omega_m``;
    above it, the one just over. Differencing across the crossing with ``h``
    much wider than the avoided-crossing window follows the perturber rather
    than the adiabatic branches (whose slope halves at the crossing centre).
    """
    _, omega, *_ = mode_arrays(n)
    w = omega[mode_position(n, m)]
    lo_minus, _ = bracketing_phases(reduced_phases(n, lam - h), w)
    _, hi_plus = bracketing_phases(reduced_phases(n, lam + h), w)
    return (hi_plus - lo_minus) / (2 * h)

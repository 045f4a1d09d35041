"""Search runs at a chosen avoided crossing, peak detection and comparison with theory."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapabilityError, NoCrossingError
from .reduced import (
    MAX_REDUCED_N,
    basis_state,
    lift,
    reduced_evolve,
    reduced_shell_probabilities,
)
from .spectral import find_crossing
from .theory import gap_theory, lambda_of_crossing, search_time
from .walk import WalkConfig, check_full_n, evolve, uniform_state

MAX_LIFT_N = 12
PEAK_THRESHOLD = 10.0
DOMINANCE_WINDOW = 1.5
PLATEAU_RTOL = 1e-12


@dataclass
class SearchRun:
    n: int
    m: int
    lam: float
    space: str
    steps: int
    v: int
    p_marked: np.ndarray
    p_neighbors: np.ndarray
    shells: np.ndarray | None = None

    @property
    def t(self) -> np.ndarray:
        return np.arange(len(self.p_marked))


@dataclass
class SearchReport:
    n: int
    m: int
    status: str  # "ok" or "search-failed"
    peak_time: int | None
    peak_prob: float | None
    peak_neighbors: float | None
    predicted_T: int
    ratios: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def summary(self) -> str:
        if not self.ok:
            return f"n={self.n} m={self.m} status=search-failed predicted_T={self.predicted_T}"
        return (
            f"n={self.n} m={self.m} status=ok peak_time={self.peak_time} "
            f"peak_prob={self.peak_prob:.6f} p_neighbors={self.peak_neighbors:.6f} "
            f"predicted_T={self.predicted_T}"
        )


def default_steps(n: int, m: int) -> int:
    return max(3 * search_time(n, m), 30)


def run_search(
    n: int,
    m: int,
    space: str = "reduced",
    steps: int | None = None,
    *,
    use_numeric_lambda: bool = False,
    v: int = 0,
) -> SearchRun:
    """Start in ``|omega_m>`` and evolve at the crossing value of lambda.

    ``space="reduced"`` iterates the ``2n``-dimensional operator;
    ``space="full"`` uses the matrix-free walk with the uniform state for
    ``m = 0`` or the lifted basis state (``n <= 12``) otherwise.
    """
    if space not in ("reduced", "full"):
        raise ValueError(f"space must be 'reduced' or 'full', got {space!r}")
    if not -n < m <= n:
        raise ValueError(f"mode {m} outside [-{n - 1}, {n}]")
    if space == "reduced" and not 2 <= n <= MAX_REDUCED_N:
        raise CapabilityError(f"reduced search supports 2 <= n <= {MAX_REDUCED_N}")
    if space == "full":
        check_full_n(n)
        if m != 0 and n > MAX_LIFT_N:
            raise CapabilityError(f"full-space start |omega_{m}> needs n <= {MAX_LIFT_N}")
    if steps is None:
        steps = default_steps(n, m)
    if steps < 0:
        raise ValueError("steps must be >= 0")
    lam = find_crossing(n, m).lambda_star if use_numeric_lambda else lambda_of_crossing(n, m)

    if space == "reduced":
        trace = reduced_evolve(basis_state(n, m), n, lam, steps)
        shells = reduced_shell_probabilities(trace.coeffs, n)
        return SearchRun(n, m, lam, space, steps, v, trace.p_sv, shells[:, 1].copy())

    psi0 = uniform_state(n) if m == 0 else lift(basis_state(n, m), n, v)
    trace = evolve(psi0, WalkConfig(n, v, lam), steps)
    return SearchRun(n, m, lam, space, steps, v, trace.p_marked, trace.shells[:, 1].copy(), trace.shells)


def _find_peak(p: np.ndarray) -> int | None:
    """First plateau-aware local maximum above threshold that dominates its ``1.5 t`` window.

    Returns the first step of the plateau.
    """
    L = len(p)
    threshold = PEAK_THRESHOLD * p[0]
    t = 1
    while t < L:
        # the parity structure of the walk produces runs of (nearly) equal values
        j = t
        while j + 1 < L and abs(p[j + 1] - p[t]) <= PLATEAU_RTOL * p[t]:
            j += 1
        top = p[t : j + 1].max()
        rising = top > p[t - 1]
        falling = j + 1 >= L or p[j + 1] < top
        if rising and falling and top > threshold:
            w = min(L, int(math.ceil(DOMINANCE_WINDOW * t)) + 1)
            if top >= p[:w].max():
                return t
        t = j + 1
    return None


def detect_peak(run: SearchRun) -> SearchReport:
    if len(run.p_marked) == 0:
        raise ValueError("empty trace")
    predicted = search_time(run.n, run.m)
    t = _find_peak(run.p_marked)
    if t is None:
        return SearchReport(run.n, run.m, "search-failed", None, None, None, predicted)
    return SearchReport(
        run.n, run.m, "ok", int(t), float(run.p_marked[t]), float(run.p_neighbors[t]), predicted
    )


def compare(reports: dict[int, SearchReport], reference: int = 0) -> dict[int, SearchReport]:
    """Fill ``ratios`` with measured and predicted times relative to mode ``reference``."""
    ref = reports[reference]
    for m, rep in reports.items():
        measured = None
        if rep.ok and ref.ok:
            measured = rep.peak_time / ref.peak_time
        rep.ratios = {
            "reference_m": reference,
            "peak_time_ratio": measured,
            "predicted_ratio": rep.predicted_T / ref.predicted_T,
        }
    return reports


@dataclass(frozen=True)
class GapRow:
    n: int
    m: int
    gap_numeric: float | None
    gap_theory: float | None
    rel_error: float | None
    reason: str = ""


def scan_gap_vs_theory(n_range, m_range) -> list[GapRow]:
    """Numerical vs theoretical gap for every ``(n, m)``; rows sorted by ``(n, m)``."""
    rows = []
    for n in sorted(set(n_range)):
        if not 2 <= n <= MAX_REDUCED_N:
            raise CapabilityError(f"gap scan supports 2 <= n <= {MAX_REDUCED_N}")
        for m in sorted(set(m_range)):
            if not -n < m <= n:
                rows.append(GapRow(n, m, None, None, None, "mode out of range"))
                continue
            try:
                num = find_crossing(n, m).gap
                th = gap_theory(n, m)
            except NoCrossingError as exc:
                rows.append(GapRow(n, m, None, None, None, f"no-crossing: {exc}"))
                continue
            rows.append(GapRow(n, m, num, th, abs(num - th) / num))
    return rows

"""Numerical epsilon-almost periods of trajectories.

For a shift ``T`` the defect is ``sup_{t in [w0, w1]} ||z(t + T) - z(t)||_inf``,
evaluated on a dense grid through the trajectory's Hermite interpolant. A shift
is an epsilon-almost period when its defect is at most epsilon. For forcing
built from frequencies 1 and sqrt(2), good shifts sit near ``2 pi q`` where
``p/q`` is a continued-fraction convergent of sqrt(2) (``q = 29`` gives 58 pi).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .integrator import Trajectory, sample


@dataclass(frozen=True)
class AlmostPeriodCandidate:
    shift: float
    defect: float
    epsilon: float

    @property
    def accepted(self) -> bool:
        return self.defect <= self.epsilon


def default_grid_step(traj: Trajectory) -> float:
    """Ten times the median record spacing."""
    if len(traj) < 2:
        raise ValueError("trajectory has a single sample")
    return 10.0 * float(np.median(np.diff(traj.t)))


def _grid(a: float, b: float, step: float) -> np.ndarray:
    n = int(math.floor((b - a) / step + 1e-9))
    g = a + step * np.arange(n + 1)
    if b - g[-1] > 1e-12 * max(1.0, abs(b)):
        g = np.append(g, b)
    return g


def _check_domain(traj: Trajectory, lo: float, hi: float):
    if lo < traj.t0 - 1e-12 or hi > traj.t_end + 1e-12:
        raise ValueError(
            f"window [{lo}, {hi}] outside trajectory domain [{traj.t0}, {traj.t_end}]")


def defect(traj: Trajectory, T: float, window: tuple[float, float],
           grid_step: float | None = None) -> float:
    """Sup-norm of ``z(t + T) - z(t)`` over the window, on a dense grid."""
    w0, w1 = window
    if not w1 >= w0:
        raise ValueError("window must satisfy w0 <= w1")
    _check_domain(traj, min(w0, w0 + T), max(w1, w1 + T))
    tg = _grid(w0, w1, grid_step or default_grid_step(traj))
    if T == 0:
        return 0.0
    tg = np.clip(tg, traj.t0, traj.t_end)
    shifted = np.clip(tg + T, traj.t0, traj.t_end)
    return float(np.max(np.abs(sample(traj, shifted) - sample(traj, tg))))


def defect_curve(traj: Trajectory, window: tuple[float, float], T_range: tuple[float, float],
                 T_step: float, grid_step: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Defects for every shift on the grid ``Tmin, Tmin + T_step, ..., Tmax``."""
    w0, w1 = window
    t_min, t_max = T_range
    if not (T_step > 0 and t_max >= t_min):
        raise ValueError("need T_step > 0 and Tmax >= Tmin")
    _check_domain(traj, min(w0, w0 + t_min), max(w1, w1 + t_max))
    tg = _grid(w0, w1, grid_step or default_grid_step(traj))
    base = sample(traj, tg)
    shifts = t_min + T_step * np.arange(int(round((t_max - t_min) / T_step)) + 1)
    out = np.empty(len(shifts))
    for k, T in enumerate(shifts):
        if T == 0:
            out[k] = 0.0
            continue
        tq = np.clip(tg + T, traj.t0, traj.t_end)
        out[k] = np.max(np.abs(sample(traj, tq) - base))
    return shifts, out


def local_minima(values: np.ndarray) -> np.ndarray:
    """Indices ``k`` with ``values[k]`` no larger than either neighbour."""
    v = np.asarray(values)
    if len(v) == 1:
        return np.array([0])
    left = np.concatenate([[np.inf], v[:-1]])
    right = np.concatenate([v[1:], [np.inf]])
    return np.nonzero((v <= left) & (v <= right))[0]


def candidates_from_curve(shifts, defects, epsilon: float, n_best: int = 3) -> list[AlmostPeriodCandidate]:
    idx = local_minima(defects)
    cands = sorted(
        (AlmostPeriodCandidate(float(shifts[k]), float(defects[k]), epsilon) for k in idx),
        key=lambda c: (c.defect, c.shift),
    )
    accepted = [c for c in cands if c.accepted]
    return accepted if accepted else cands[:n_best]


def almost_period_scan(traj: Trajectory, window: tuple[float, float], T_range: tuple[float, float],
                       T_step: float, epsilon: float,
                       grid_step: float | None = None) -> list[AlmostPeriodCandidate]:
    """Local minima of the defect curve with defect <= epsilon, best first.

    When nothing is accepted the three best local minima are returned
    (flagged as not accepted) so that failed scans stay informative.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    shifts, defects = defect_curve(traj, window, T_range, T_step, grid_step)
    return candidates_from_curve(shifts, defects, epsilon)


def write_scan_csv(path, shifts, defects, candidates) -> None:
    """``T,defect,accepted`` rows; ``accepted`` marks accepted local minima."""
    marked = {c.shift for c in candidates if c.accepted}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["T", "defect", "accepted"])
        for T, d in zip(shifts, defects):
            w.writerow([repr(float(T)), repr(float(d)), int(float(T) in marked)])


def convergents(x: float, n: int) -> list[Fraction]:
    """First ``n`` continued-fraction convergents of ``x``."""
    out = []
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    for _ in range(n):
        a = math.floor(x)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        out.append(Fraction(h1, k1))
        frac = x - a
        if frac < 1e-15:
            break
        x = 1.0 / frac
    return out


def predicted_shifts(base_freq: float, other_freq: float, T_range: tuple[float, float],
                     n_terms: int = 20) -> list[tuple[float, float]]:
    """Shifts ``2 pi q / base_freq`` from convergents ``p/q`` of ``other_freq / base_freq``.

    Returns ``(shift, phase_defect)`` pairs inside ``T_range``, where the phase
    defect ``2 pi |q r - p|`` bounds the phase slip of the second frequency.
    """
    ratio = other_freq / base_freq
    out = []
    for c in convergents(ratio, n_terms):
        T = 2 * math.pi * c.denominator / base_freq
        if T_range[0] <= T <= T_range[1]:
            out.append((T, 2 * math.pi * abs(c.denominator * ratio - c.numerator)))
    return out

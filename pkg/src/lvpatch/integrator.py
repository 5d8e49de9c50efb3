"""Positivity-preserving explicit Runge-Kutta integration with dense output.

Two methods are offered:

* ``rk4``: classical fixed-step fourth order on the nominal grid
  ``t0 + k h``. A step whose result has a nonpositive component is rejected
  and replaced by two half steps (recursively, down to ``h_min``).
* ``rkf45``: Runge-Kutta-Fehlberg 4(5) with local error control; nonpositive
  results count as rejected steps.

Any number of independent trajectories can be advanced together on a shared
time grid (``integrate_batch``); each row of the batch may carry its own
parameter set. Rows never interact, so a batch of one reproduces a single
integration bit-for-bit.

Dense output uses cubic Hermite interpolation on the stored (state,
derivative) pairs.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .model import STATE_NAMES, CompiledParams, SystemParams, _positive_state, vector_field

__all__ = [
    "IntegrationOptions",
    "StepUnderflow",
    "Trajectory",
    "integrate",
    "integrate_batch",
    "integrate_field",
    "integrate_paired",
    "sample",
]


class StepUnderflow(RuntimeError):
    """Positivity or the error tolerance could not be met with ``h >= h_min``."""


@dataclass(frozen=True)
class IntegrationOptions:
    method: str = "rk4"
    h_init: float = 1e-3
    h_min: float = 1e-9
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    record_stride: int = 1

    def __post_init__(self):
        if self.method not in ("rk4", "rkf45"):
            raise ValueError(f"method must be 'rk4' or 'rkf45', got {self.method!r}")
        if not (self.h_init > 0 and self.h_min > 0):
            raise ValueError("h_init and h_min must be positive")
        if self.h_min > self.h_init:
            raise ValueError(f"h_min ({self.h_min}) exceeds h_init ({self.h_init})")
        if not 0 < self.rel_tol < 1:
            raise ValueError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if self.abs_tol <= 0:
            raise ValueError("abs_tol must be positive")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ValueError(f"record_stride must be a positive integer, got {self.record_stride}")

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "h_init": self.h_init,
            "h_min": self.h_min,
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "record_stride": self.record_stride,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "IntegrationOptions":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown integration options: {sorted(unknown)}")
        return cls(**data)


class Trajectory:
    """Recorded solution samples with cubic Hermite dense output.

    Attributes
    ----------
    t : (n,) array
        Strictly increasing sample times.
    z : (n, d) array
        States at the sample times.
    dz : (n, d) array
        Time derivatives at the sample times.
    """

    def __init__(self, t, z, dz):
        self.t = np.asarray(t, dtype=float)
        self.z = np.asarray(z, dtype=float)
        self.dz = np.asarray(dz, dtype=float)
        if self.t.ndim != 1 or len(self.t) == 0:
            raise ValueError("need at least one sample time")
        if self.z.shape != self.dz.shape or self.z.shape[0] != len(self.t):
            raise ValueError("t, z and dz have inconsistent shapes")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("sample times must be strictly increasing")

    def __len__(self):
        return len(self.t)

    def __repr__(self):
        return f"Trajectory(n={len(self)}, t=[{self.t0}, {self.t_end}])"

    @property
    def t0(self) -> float:
        return float(self.t[0])

    @property
    def t_end(self) -> float:
        return float(self.t[-1])

    @property
    def final(self) -> np.ndarray:
        return self.z[-1]

    def __call__(self, t):
        return sample(self, t)

    def window(self, t_lo: float, t_hi: float = math.inf) -> "Trajectory":
        """Samples with ``t_lo <= t <= t_hi``."""
        m = (self.t >= t_lo) & (self.t <= t_hi)
        return Trajectory(self.t[m], self.z[m], self.dz[m])

    def to_csv(self, path, header: Sequence[str] = ("t",) + STATE_NAMES) -> None:
        """Write ``t,x1,y1,x2,y2`` rows with round-trip (repr) float formatting."""
        with open(path, "w", newline="") as fh:
            write_csv_rows(fh, header, np.column_stack([self.t, self.z]))

    @classmethod
    def from_csv(cls, path) -> "Trajectory":
        """Read a trajectory CSV; derivatives are not stored, so they are
        rebuilt by finite differences (dense output is then approximate)."""
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        t, z = data[:, 0], data[:, 1:]
        dz = np.gradient(z, t, axis=0) if len(t) > 1 else np.zeros_like(z)
        return cls(t, z, dz)


def write_csv_rows(fh, header, rows) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) for v in row])


def sample(traj: Trajectory, t):
    """Dense-output state at time(s) ``t``; exact at stored nodes."""
    tq = np.asarray(t, dtype=float)
    if np.any(tq < traj.t[0]) or np.any(tq > traj.t[-1]) or np.any(np.isnan(tq)):
        raise ValueError(f"t outside trajectory domain [{traj.t0}, {traj.t_end}]")
    if len(traj.t) == 1:
        return np.broadcast_to(traj.z[0], tq.shape + traj.z.shape[1:]).copy()
    i = np.clip(np.searchsorted(traj.t, tq, side="right") - 1, 0, len(traj.t) - 2)
    t0, t1 = traj.t[i], traj.t[i + 1]
    h = t1 - t0
    s = (tq - t0) / h
    s2, s3 = s * s, s * s * s
    h00 = (2 * s3 - 3 * s2 + 1)[..., None]
    h10 = (s3 - 2 * s2 + s)[..., None]
    h01 = (-2 * s3 + 3 * s2)[..., None]
    h11 = (s3 - s2)[..., None]
    hh = h[..., None]
    return (h00 * traj.z[i] + h10 * hh * traj.dz[i]
            + h01 * traj.z[i + 1] + h11 * hh * traj.dz[i + 1])


# --- stepping --------------------------------------------------------------

def _rk4_step(f, t, z, h, k1):
    k2 = f(t + 0.5 * h, z + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, z + 0.5 * h * k2)
    k4 = f(t + h, z + h * k3)
    return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


# Fehlberg tableau; the fourth-order solution is propagated.
_FA = (0.0, 1 / 4, 3 / 8, 12 / 13, 1.0, 1 / 2)
_FB = (
    (),
    (1 / 4,),
    (3 / 32, 9 / 32),
    (1932 / 2197, -7200 / 2197, 7296 / 2197),
    (439 / 216, -8.0, 3680 / 513, -845 / 4104),
    (-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40),
)
_FC4 = (25 / 216, 0.0, 1408 / 2565, 2197 / 4104, -1 / 5, 0.0)
_FC5 = (16 / 135, 0.0, 6656 / 12825, 28561 / 56430, -9 / 50, 2 / 55)
_FERR = tuple(c5 - c4 for c4, c5 in zip(_FC4, _FC5))


def _rkf45_step(f, t, z, h, k1):
    ks = [k1]
    for a, row in zip(_FA[1:], _FB[1:]):
        dz = sum(b * k for b, k in zip(row, ks))
        ks.append(f(t + a * h, z + h * dz))
    z4 = z + h * sum(c * k for c, k in zip(_FC4, ks) if c)
    err = h * sum(e * k for e, k in zip(_FERR, ks) if e)
    return z4, err


def integrate_field(f: Callable, z0, t0: float, t1: float,
                    opts: IntegrationOptions | None = None,
                    positive: bool = True) -> list[Trajectory]:
    """Integrate ``z' = f(t, z)`` for a batch of states ``z0`` (shape (B, d)).

    ``f`` must map ``(t, Z)`` with ``Z`` of shape (B, d) to an array of the
    same shape, treating rows independently. Returns one trajectory per row.
    """
    opts = opts or IntegrationOptions()
    z0 = np.array(z0, dtype=float, ndmin=2)
    if positive and not np.all(z0 > 0):
        raise ValueError("initial states must be strictly positive")
    if not t1 >= t0:
        raise ValueError(f"t1 ({t1}) must not precede t0 ({t0})")
    k0 = f(t0, z0)
    if t1 == t0:
        return _split([t0], [z0], [k0])
    if opts.method == "rk4":
        ts, zs, ks = _run_rk4(f, z0, k0, t0, t1, opts, positive)
    else:
        ts, zs, ks = _run_rkf45(f, z0, k0, t0, t1, opts, positive)
    return _split(ts, zs, ks)


def _split(ts, zs, ks) -> list[Trajectory]:
    t = np.array(ts)
    Z = np.stack(zs, axis=1)
    K = np.stack(ks, axis=1)
    return [Trajectory(t, Z[b], K[b]) for b in range(Z.shape[0])]


def _acceptable(z, positive):
    if not np.all(np.isfinite(z)):
        return False
    return not positive or bool(np.all(z > 0))


def _run_rk4(f, z, k, t0, t1, opts, positive):
    h = opts.h_init
    n = max(1, int(math.ceil((t1 - t0) / h - 1e-9)))
    stride = opts.record_stride
    ts, zs, ks = [t0], [z], [k]

    def advance(t, z, k, h_step):
        z_new = _rk4_step(f, t, z, h_step, k)
        if _acceptable(z_new, positive):
            return z_new
        half = 0.5 * h_step
        if half < opts.h_min:
            raise StepUnderflow(
                f"positivity lost at t={t:.6g}; step {h_step:.3g} cannot be halved below h_min={opts.h_min:.3g}")
        z_mid = advance(t, z, k, half)
        return advance(t + half, z_mid, f(t + half, z_mid), half)

    t = t0
    for step in range(1, n + 1):
        t_next = t1 if step == n else t0 + step * h
        z = advance(t, z, k, t_next - t)
        t = t_next
        k = f(t, z)
        if step % stride == 0 or step == n:
            ts.append(t)
            zs.append(z)
            ks.append(k)
    return ts, zs, ks


def _run_rkf45(f, z, k, t0, t1, opts, positive):
    h = opts.h_init
    t = t0
    ts, zs, ks = [t0], [z], [k]
    accepted = 0
    while t < t1:
        last = t + h >= t1
        h_step = t1 - t if last else h
        z_new, err = _rkf45_step(f, t, z, h_step, k)
        scale = opts.abs_tol + opts.rel_tol * np.maximum(np.abs(z), np.abs(z_new))
        enorm = float(np.max(np.abs(err) / scale)) if np.all(np.isfinite(err)) else math.inf
        if enorm <= 1.0 and _acceptable(z_new, positive):
            t = t1 if last else t + h_step
            z = z_new
            k = f(t, z)
            accepted += 1
            if accepted % opts.record_stride == 0 or t == t1:
                ts.append(t)
                zs.append(z)
                ks.append(k)
            factor = 5.0 if enorm == 0 else min(5.0, 0.9 * enorm ** -0.2)
            h = max(h_step * factor, opts.h_min) if not last else h
        else:
            if math.isfinite(enorm) and enorm > 1.0:
                factor = max(0.1, 0.9 * enorm ** -0.25)
            else:
                factor = 0.5
            h = h_step * factor
            if h < opts.h_min:
                raise StepUnderflow(
                    f"rkf45 step fell below h_min={opts.h_min:.3g} at t={t:.6g} "
                    f"(error norm {enorm:.3g})")
    return ts, zs, ks


# --- model front ends --------------------------------------------------------

def _model_field(cp: CompiledParams) -> Callable:
    def f(t, z):
        return vector_field(cp.values(t), z)
    return f


def integrate_batch(params: SystemParams | Sequence[SystemParams], z0s, t0: float, t1: float,
                    opts: IntegrationOptions | None = None) -> list[Trajectory]:
    """Integrate several initial states on a shared grid.

    ``params`` is a single parameter set shared by all rows, or one set per row.
    """
    z0s = np.array(z0s, dtype=float, ndmin=2)
    _positive_state(z0s, "initial state")
    if not isinstance(params, SystemParams) and len(params) != len(z0s):
        raise ValueError("need one parameter set per initial state")
    opts = opts or IntegrationOptions()
    cp = CompiledParams(params)
    if opts.method != "rk4" or not t1 > t0:
        return integrate_field(_model_field(cp), z0s, t0, t1, opts)
    from . import _kernels

    n = max(1, int(math.ceil((t1 - t0) / opts.h_init - 1e-9)))
    ts, zs, ks, status, t_fail = _kernels.rk4_run(
        cp.const, cp.sin_amp, cp.cos_amp, cp.freqs, z0s, float(t0), float(t1),
        float(opts.h_init), n, int(opts.record_stride), float(opts.h_min))
    if status != _kernels.OK:
        raise StepUnderflow(
            f"positivity lost at t={t_fail:.6g}; step cannot be halved below h_min={opts.h_min:.3g}")
    return [Trajectory(ts, zs[:, b], ks[:, b]) for b in range(z0s.shape[0])]


def integrate(params: SystemParams, z0, t0: float, t1: float,
              opts: IntegrationOptions | None = None) -> Trajectory:
    """Integrate the two-patch system from ``z0`` at ``t0`` to exactly ``t1``."""
    z0 = _positive_state(z0, "initial state")
    if z0.ndim != 1:
        raise ValueError("integrate takes a single state; use integrate_batch for several")
    return integrate_batch(params, z0[None, :], t0, t1, opts)[0]


def integrate_paired(params: SystemParams, z0, z0_shadow, t0: float, t1: float,
                     opts: IntegrationOptions | None = None) -> tuple[Trajectory, Trajectory]:
    """Integrate the paired system: two uncoupled copies on one grid."""
    a = _positive_state(z0, "primary state")
    b = _positive_state(z0_shadow, "shadow state")
    primary, shadow = integrate_batch(params, np.stack([a, b]), t0, t1, opts)
    return primary, shadow

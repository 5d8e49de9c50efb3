"""Contraction certificate, Lyapunov monitoring and attractivity experiments.

The certificate evaluates four margins built from coefficient bounds and the
lower corners of the attracting region::

    P1 = a11^L + a21^L - D1^M / x2^L        P2 = b11^L + b21^L - D1^M / x1^L
    P3 = a12^L + a22^L - D2^M / y2^L        P4 = b12^L + b22^L - D2^M / y1^L

with ``eta = min(P1..P4)`` and decay rate ``c = eta * min(x1^L, y1^L, x2^L, y2^L)``.
The claim under test is that ``V(t) = sum |ln z_i - ln z~_i|`` between any two
solutions in the region decays at least like ``exp(-c t)``. :func:`verify_decay`
integrates the paired system and compares ``V`` with the exponential envelope;
:func:`lyapunov_derivative` gives the pointwise upper-right derivative for
diagnosing where the envelope is lost.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .bounds import Inequality, RegionEstimate
from .coeffs import inf_bound, sup_bound
from .integrator import IntegrationOptions, Trajectory, integrate_batch, integrate_paired
from .model import CompiledParams, SystemParams, _positive_state, vector_field


@dataclass(frozen=True)
class ConditionReport:
    P1: float
    P2: float
    P3: float
    P4: float
    eta: float
    c: float
    region: RegionEstimate
    inequalities: tuple[Inequality, ...] = field(default=(), compare=False)

    @property
    def margins(self) -> tuple[float, float, float, float]:
        return (self.P1, self.P2, self.P3, self.P4)

    @property
    def holds(self) -> bool:
        return min(self.margins) > 0

    def to_dict(self) -> dict:
        return {
            "P1": self.P1, "P2": self.P2, "P3": self.P3, "P4": self.P4,
            "eta": self.eta, "c": self.c, "holds": self.holds,
            "region": self.region.to_dict(),
            "inequalities": [
                {"name": q.name, "lhs": q.lhs, "rhs": q.rhs, "margin": q.margin, "holds": q.holds}
                for q in self.inequalities
            ],
        }


def check_contraction(params: SystemParams, region: RegionEstimate) -> ConditionReport:
    lower = region.lower
    if not np.all(lower > 0):
        raise ValueError(f"region lower bounds must be strictly positive, got {lower.tolist()}")
    x1L, y1L, x2L, y2L = (float(v) for v in lower)
    L = lambda name: inf_bound(getattr(params, name))  # noqa: E731
    d1, d2 = sup_bound(params.D1), sup_bound(params.D2)
    ineqs = (
        Inequality("P1", d1 / x2L, L("a11") + L("a21")),
        Inequality("P2", d1 / x1L, L("b11") + L("b21")),
        Inequality("P3", d2 / y2L, L("a12") + L("a22")),
        Inequality("P4", d2 / y1L, L("b12") + L("b22")),
    )
    P = [q.margin for q in ineqs]
    eta = min(P)
    c = min(x1L * eta, y1L * eta, x2L * eta, y2L * eta)
    return ConditionReport(*P, eta=eta, c=c, region=region, inequalities=ineqs)


def lyapunov_value(z, z_shadow):
    """L1 distance between componentwise logarithms of two positive states.

    Works on single states or stacked arrays (last axis = components).
    """
    a = _positive_state(z)
    b = _positive_state(z_shadow)
    v = np.abs(np.log(a) - np.log(b)).sum(axis=-1)
    return float(v) if np.ndim(v) == 0 else v


def lyapunov_derivative(params: SystemParams, t: float, z, z_shadow) -> float:
    """Upper-right derivative of ``V`` along the paired flow at one instant.

    Uses exact right-hand sides; for equal log-components the one-sided
    derivative ``|d/dt (X - X~)|`` is taken.
    """
    a = _positive_state(z)
    b = _positive_state(z_shadow)
    cv = CompiledParams([params]).values(t)[0]
    g = vector_field(cv, a) / a - vector_field(cv, b) / b
    diff = np.log(a) - np.log(b)
    return float(np.sum(np.where(diff != 0, np.sign(diff) * g, np.abs(g))))


@dataclass
class DecayReport:
    t: np.ndarray
    V: np.ndarray
    c: float
    tol: float
    rate: float
    violations: int
    max_violation: float
    monotone_violations: int

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def envelope(self) -> np.ndarray:
        return self.V[0] * np.exp(-self.c * (self.t - self.t[0]))

    def max_envelope_rate(self) -> float:
        """Largest ``c`` for which the sampled ``V`` stays under its envelope."""
        dt = self.t - self.t[0]
        m = (dt > 0) & (self.V > self.tol)
        if not m.any() or self.V[0] <= 0:
            return float("inf")
        return float(np.min(-np.log((self.V[m] - self.tol) / self.V[0]) / dt[m]))

    def to_dict(self) -> dict:
        return {
            "c": self.c, "tol": self.tol, "fitted_rate": self.rate,
            "envelope_violations": self.violations, "max_violation": self.max_violation,
            "monotone_violations": self.monotone_violations, "samples": len(self.t),
            "V_start": float(self.V[0]), "V_end": float(self.V[-1]),
            "max_envelope_rate": self.max_envelope_rate(),
        }


def fit_decay_rate(t, V, floor: float = 1e-12) -> float:
    """Least-squares rate ``k`` in ``V ~ A exp(-k t)`` over samples with ``V > floor``."""
    t = np.asarray(t, dtype=float)
    V = np.asarray(V, dtype=float)
    m = V > floor
    if m.sum() < 2:
        return float("inf") if V[0] > floor else float("nan")
    slope = np.polyfit(t[m] - t[m][0], np.log(V[m]), 1)[0]
    return float(-slope)


def verify_decay(params: SystemParams, z0, z0_shadow, t0: float, t1: float, c: float,
                 tol: float = 1e-8, opts: IntegrationOptions | None = None,
                 every: int = 1) -> DecayReport:
    """Integrate the paired system and test ``V(t) <= V(t0) exp(-c (t - t0)) + tol``.

    ``every`` thins the recorded samples used for the check.
    """
    primary, shadow = integrate_paired(params, z0, z0_shadow, t0, t1, opts)
    t = primary.t[::every]
    V = lyapunov_value(primary.z[::every], shadow.z[::every])
    V = np.atleast_1d(V)
    excess = V - (V[0] * np.exp(-c * (t - t[0])) + tol)
    bad = excess > 0
    return DecayReport(
        t=t, V=V, c=c, tol=tol,
        rate=fit_decay_rate(t, V),
        violations=int(bad.sum()),
        max_violation=float(excess.max()) if len(excess) else 0.0,
        monotone_violations=int(np.sum(np.diff(V) > tol)),
    )


@dataclass
class PairConvergence:
    i: int
    j: int
    converged: bool
    time: float
    max_after: float
    final: float


@dataclass
class ConvergenceReport:
    t: np.ndarray
    trajectories: list[Trajectory]
    pairs: list[PairConvergence]
    eps: float
    distances: dict = field(repr=False)

    @property
    def all_converged(self) -> bool:
        return all(p.converged for p in self.pairs)

    def max_after(self, t_from: float) -> float:
        """Largest pairwise sup-norm difference at or after ``t_from``."""
        m = self.t >= t_from
        return float(max(d[m].max() for d in self.distances.values())) if m.any() else 0.0

    def window_integrals(self, width: float = 1.0) -> dict:
        """Integral of the L1 pair difference over successive windows of ``width``."""
        out = {}
        edges = np.arange(self.t[0], self.t[-1] + 1e-12, width)
        dt = np.diff(self.t)
        for key, y in zip(self.distances, self._l1()):
            cum = np.concatenate([[0.0], np.cumsum(0.5 * (y[1:] + y[:-1]) * dt)])
            out[key] = np.diff(np.interp(edges, self.t, cum))
        return out

    def _l1(self):
        for p in self.pairs:
            yield np.abs(self.trajectories[p.i].z - self.trajectories[p.j].z).sum(axis=1)

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "all_converged": self.all_converged,
            "pairs": [p.__dict__ for p in self.pairs],
        }


def attractivity_experiment(params: SystemParams, ics, t_end: float, eps: float,
                            opts: IntegrationOptions | None = None,
                            t0: float = 0.0) -> ConvergenceReport:
    """Integrate every initial state and time the pairwise merging.

    A pair converges at the earliest recorded time after which its sup-norm
    difference stays below ``eps`` through ``t_end``.
    """
    ics = np.array(ics, dtype=float, ndmin=2)
    if len(ics) < 2:
        raise ValueError("need at least two initial states")
    _positive_state(ics, "initial state")
    trajs = integrate_batch(params, ics, t0, t_end, opts)
    t = trajs[0].t
    pairs, distances = [], {}
    for i, j in itertools.combinations(range(len(trajs)), 2):
        d = np.abs(trajs[i].z - trajs[j].z).max(axis=1)
        distances[(i, j)] = d
        above = np.nonzero(d >= eps)[0]
        if len(above) == 0:
            k = 0
        else:
            k = above[-1] + 1
        converged = k < len(t)
        pairs.append(PairConvergence(
            i, j, converged,
            time=float(t[k]) if converged else float("nan"),
            max_after=float(d[k:].max()) if converged else float("nan"),
            final=float(d[-1]),
        ))
    return ConvergenceReport(t=t, trajectories=trajs, pairs=pairs, eps=eps, distances=distances)

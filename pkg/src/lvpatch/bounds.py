"""Dispersal-vs-growth hypotheses and an empirical attracting region.

The hypotheses ``D_i^M < r_i^L`` and ``D_i^M < s_i^L`` guarantee a compact
attracting region bounded away from the coordinate hyperplanes. Its bounds
are not available in closed form here, so :func:`estimate_ultimate_bounds`
measures them from a seeded ensemble of long runs and pads them by a margin.

Initial conditions are drawn with numpy's counter-based Philox generator, so a
given seed reproduces the ensemble bit-for-bit on every platform.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coeffs import inf_bound, sup_bound
from .integrator import IntegrationOptions, integrate_batch
from .model import SystemParams


@dataclass(frozen=True)
class Inequality:
    """``lhs < rhs`` with ``margin = rhs - lhs``."""

    name: str
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.margin > 0

    def row(self) -> tuple:
        return (self.name, self.lhs, self.rhs, self.margin, self.holds)


@dataclass(frozen=True)
class DispersalReport:
    inequalities: tuple[Inequality, ...]

    @property
    def holds(self) -> bool:
        return all(q.holds for q in self.inequalities)

    @property
    def margins(self) -> tuple[float, ...]:
        return tuple(q.margin for q in self.inequalities)

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "inequalities": [
                {"name": q.name, "lhs": q.lhs, "rhs": q.rhs, "margin": q.margin, "holds": q.holds}
                for q in self.inequalities
            ],
        }


def check_dispersal_bound(params: SystemParams) -> DispersalReport:
    """Evaluate ``D1^M < r1^L``, ``D2^M < r2^L``, ``D1^M < s1^L``, ``D2^M < s2^L``."""
    d1, d2 = sup_bound(params.D1), sup_bound(params.D2)
    return DispersalReport((
        Inequality("D1M<r1L", d1, inf_bound(params.r1)),
        Inequality("D2M<r2L", d2, inf_bound(params.r2)),
        Inequality("D1M<s1L", d1, inf_bound(params.s1)),
        Inequality("D2M<s2L", d2, inf_bound(params.s2)),
    ))


@dataclass(frozen=True)
class RegionEstimate:
    """Componentwise ultimate bounds, each pair ordered (patch 1, patch 2)."""

    xL: tuple[float, float]
    xM: tuple[float, float]
    yL: tuple[float, float]
    yM: tuple[float, float]
    burn_in: float = 0.0
    horizon: float = 0.0
    ensemble_size: int = 0
    margin: float = 0.0
    seed: int | None = None
    observed_min: tuple[float, ...] = field(default=(), compare=False)
    observed_max: tuple[float, ...] = field(default=(), compare=False)

    def __post_init__(self):
        for lo, hi, name in ((self.xL, self.xM, "x"), (self.yL, self.yM, "y")):
            for i in range(2):
                if not 0 < lo[i] < hi[i]:
                    raise ValueError(
                        f"region bounds for {name}{i + 1} must satisfy 0 < lower < upper, "
                        f"got [{lo[i]}, {hi[i]}]")

    @classmethod
    def uniform(cls, lower: float, upper: float) -> "RegionEstimate":
        return cls((lower, lower), (upper, upper), (lower, lower), (upper, upper))

    @property
    def lower(self) -> np.ndarray:
        """Lower bounds in state order (x1, y1, x2, y2)."""
        return np.array([self.xL[0], self.yL[0], self.xL[1], self.yL[1]])

    @property
    def upper(self) -> np.ndarray:
        return np.array([self.xM[0], self.yM[0], self.xM[1], self.yM[1]])

    @property
    def observed_min_state(self) -> np.ndarray:
        """Unpadded ensemble minima in state order."""
        return np.array(self.observed_min)

    def contains(self, z, tol: float = 0.0) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return np.all((z >= self.lower - tol) & (z <= self.upper + tol), axis=-1)

    def to_dict(self) -> dict:
        return {
            "xL": list(self.xL), "xM": list(self.xM),
            "yL": list(self.yL), "yM": list(self.yM),
            "burn_in": self.burn_in, "horizon": self.horizon,
            "ensemble_size": self.ensemble_size, "margin": self.margin, "seed": self.seed,
        }


def _from_state_order(lo, hi, **meta) -> RegionEstimate:
    return RegionEstimate(
        xL=(float(lo[0]), float(lo[2])), xM=(float(hi[0]), float(hi[2])),
        yL=(float(lo[1]), float(lo[3])), yM=(float(hi[1]), float(hi[3])),
        observed_min=tuple(map(float, meta.pop("observed_min"))),
        observed_max=tuple(map(float, meta.pop("observed_max"))),
        **meta,
    )


def draw_initial_states(seed: int, n: int, ic_box: tuple[float, float]) -> np.ndarray:
    """``n`` states uniform on ``ic_box**4`` from a Philox stream keyed by ``seed``."""
    lo, hi = ic_box
    if not 0 < lo < hi:
        raise ValueError(f"ic_box must satisfy 0 < lo < hi, got {ic_box}")
    rng = np.random.Generator(np.random.Philox(key=seed))
    return rng.uniform(lo, hi, size=(n, 4))


def estimate_ultimate_bounds(params: SystemParams, seed: int = 42, ensemble_size: int = 16,
                             ic_box: tuple[float, float] = (0.1, 5.0), burn_in: float = 100.0,
                             horizon: float = 300.0, margin: float = 0.05,
                             opts: IntegrationOptions | None = None,
                             initial_states=None) -> RegionEstimate:
    """Empirical attracting region from an ensemble of trajectories.

    Records the componentwise min and max over ``[burn_in, horizon]`` across
    all members, then shrinks the lower bounds by ``(1 - margin)`` and grows
    the upper bounds by ``(1 + margin)``. The dispersal hypotheses are not
    re-checked here; without them the estimate has no guarantee behind it, and
    a collapsing component shows up as a nonpositive lower bound (error).
    """
    if not horizon > burn_in:
        raise ValueError("horizon must exceed burn_in")
    if ensemble_size < 1:
        raise ValueError("ensemble_size must be at least 1")
    if not 0 <= margin < 1:
        raise ValueError("margin must lie in [0, 1)")
    if initial_states is None:
        z0 = draw_initial_states(seed, ensemble_size, ic_box)
    else:
        z0 = np.array(initial_states, dtype=float, ndmin=2)
        ensemble_size = len(z0)
    trajs = integrate_batch(params, z0, 0.0, horizon, opts)
    tail = np.concatenate([tr.z[tr.t >= burn_in] for tr in trajs])
    lo, hi = tail.min(axis=0), tail.max(axis=0)
    if np.any(lo <= 0):
        raise ValueError(f"estimated lower bounds not strictly positive: {lo.tolist()}")
    return _from_state_order(
        lo * (1 - margin), hi * (1 + margin),
        burn_in=burn_in, horizon=horizon, ensemble_size=ensemble_size, margin=margin,
        seed=None if initial_states is not None else seed,
        observed_min=lo, observed_max=hi,
    )

"""The two-patch competitive Lotka-Volterra system with patch diffusion.

State ordering is fixed everywhere as ``(x1, y1, x2, y2)``: species x and y on
patch 1, then on patch 2::

    x1' = x1 (r1 - a11 x1 - a12 y1) + D1 (x2 - x1)
    y1' = y1 (r2 - a21 x1 - a22 y1) + D2 (y2 - y1)
    x2' = x2 (s1 - b11 x2 - b12 y2) + D1 (x1 - x2)
    y2' = y2 (s2 - b21 x2 - b22 y2) + D2 (y1 - y2)

The paired ("adjoint") system runs two uncoupled copies of the same equations
so that the divergence between two solutions can be monitored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import NamedTuple, Sequence

import numpy as np

from .coeffs import QuasiPeriodicCoefficient as QPC

COEFF_NAMES = (
    "r1", "r2", "s1", "s2",
    "a11", "a12", "a21", "a22",
    "b11", "b12", "b21", "b22",
    "D1", "D2",
)
STATE_NAMES = ("x1", "y1", "x2", "y2")


class ParameterError(ValueError):
    """Raised when a parameter set violates nonnegativity of its coefficients."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("invalid coefficients: " + "; ".join(self.violations))


class State(NamedTuple):
    x1: float
    y1: float
    x2: float
    y2: float


class PairedState(NamedTuple):
    primary: State
    shadow: State


@dataclass(frozen=True)
class SystemParams:
    r1: QPC
    r2: QPC
    s1: QPC
    s2: QPC
    a11: QPC
    a12: QPC
    a21: QPC
    a22: QPC
    b11: QPC
    b12: QPC
    b21: QPC
    b22: QPC
    D1: QPC
    D2: QPC

    def coefficients(self) -> tuple[QPC, ...]:
        return tuple(getattr(self, name) for name in COEFF_NAMES)

    @classmethod
    def constant(cls, **values: float) -> "SystemParams":
        """All-constant parameter set; unspecified coefficients are zero."""
        unknown = set(values) - set(COEFF_NAMES)
        if unknown:
            raise TypeError(f"unknown coefficients: {sorted(unknown)}")
        return cls(**{name: QPC.const(values.get(name, 0.0)) for name in COEFF_NAMES})

    def with_coefficients(self, **coeffs: QPC) -> "SystemParams":
        return replace(self, **coeffs)

    def scale_interactions(self, factor: float) -> "SystemParams":
        """Multiply every a_ij and b_ij by ``factor``."""
        names = [n for n in COEFF_NAMES if n[0] in "ab"]
        return replace(self, **{n: getattr(self, n).scaled(factor) for n in names})

    def to_dict(self) -> dict:
        return {name: getattr(self, name).to_dict() for name in COEFF_NAMES}

    @classmethod
    def from_dict(cls, data: dict) -> "SystemParams":
        missing = [n for n in COEFF_NAMES if n not in data]
        if missing:
            raise ValueError(f"missing coefficients: {missing}")
        extra = sorted(set(data) - set(COEFF_NAMES))
        if extra:
            raise ValueError(f"unknown coefficients: {extra}")
        return cls(**{n: QPC.from_dict(data[n]) for n in COEFF_NAMES})


assert tuple(f.name for f in fields(SystemParams)) == COEFF_NAMES


def validate_params(params: SystemParams) -> SystemParams:
    """Return ``params`` unchanged if every coefficient is nonnegative for all t.

    Raises :class:`ParameterError` listing *all* failing coefficients.
    """
    violations = []
    for name in COEFF_NAMES:
        c = getattr(params, name)
        if not c.is_nonnegative():
            violations.append(
                f"{name}: constant {c.constant:g} - amplitude sum {c.amplitude_sum:g} < 0"
            )
    if violations:
        raise ParameterError(violations)
    return params


class CompiledParams:
    """Array form of one or more parameter sets for fast vectorised evaluation.

    Coefficient values at time ``t`` are ``const + sum_f sin_amp[..., f] * sin(w_f t)
    + cos_amp[..., f] * cos(w_f t)`` over the union of distinct frequencies.
    """

    def __init__(self, param_sets: Sequence[SystemParams]):
        if isinstance(param_sets, SystemParams):
            param_sets = [param_sets]
        freqs = sorted({term.frequency for p in param_sets
                        for c in p.coefficients() for term in c.terms})
        index = {w: k for k, w in enumerate(freqs)}
        n = len(param_sets)
        self.freqs = np.array(freqs, dtype=float)
        self.const = np.zeros((n, 14))
        self.sin_amp = np.zeros((len(freqs), n, 14))
        self.cos_amp = np.zeros((len(freqs), n, 14))
        for i, p in enumerate(param_sets):
            for j, c in enumerate(p.coefficients()):
                self.const[i, j] = c.constant
                for term in c.terms:
                    amp = self.sin_amp if term.kind == "sin" else self.cos_amp
                    amp[index[term.frequency], i, j] += term.amplitude
        self.size = n

    def values(self, t: float) -> np.ndarray:
        """Coefficient table at time ``t``, shape ``(n_sets, 14)``."""
        out = self.const.copy()
        for k, w in enumerate(self.freqs):
            wt = w * t
            out += self.sin_amp[k] * math.sin(wt)
            out += self.cos_amp[k] * math.cos(wt)
        return out


def vector_field(cv: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Right-hand side for coefficient table ``cv`` (..., 14) and states ``z`` (..., 4)."""
    r1, r2, s1, s2, a11, a12, a21, a22, b11, b12, b21, b22, D1, D2 = np.moveaxis(cv, -1, 0)
    x1, y1, x2, y2 = np.moveaxis(z, -1, 0)
    dx = D1 * (x2 - x1)
    dy = D2 * (y2 - y1)
    out = np.empty(np.broadcast_shapes(cv.shape[:-1], z.shape[:-1]) + (4,))
    out[..., 0] = x1 * (r1 - a11 * x1 - a12 * y1) + dx
    out[..., 1] = y1 * (r2 - a21 * x1 - a22 * y1) + dy
    out[..., 2] = x2 * (s1 - b11 * x2 - b12 * y2) - dx
    out[..., 3] = y2 * (s2 - b21 * x2 - b22 * y2) - dy
    return out


def _positive_state(z, what="state") -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.shape[-1:] != (4,):
        raise ValueError(f"{what} must have 4 components (x1, y1, x2, y2), got shape {z.shape}")
    if not np.all(z > 0):
        raise ValueError(f"{what} must be strictly positive, got {z.tolist()}")
    return z


def rhs(params: SystemParams, t: float, z) -> np.ndarray:
    """Time derivative ``(x1', y1', x2', y2')`` at time ``t``."""
    z = _positive_state(z)
    return vector_field(CompiledParams([params]).values(t)[0], z)


def adjoint_rhs(params: SystemParams, t: float, pz) -> np.ndarray:
    """Derivative of the paired system: 8-vector, primary copy first."""
    primary, shadow = pz
    return np.concatenate([rhs(params, t, primary), rhs(params, t, shadow)])


def example51_params() -> SystemParams:
    """The quasi-periodic example system with frequencies 1 and sqrt(2).

    The x2 equation uses the diffusion sign of the general model,
    D1 (x1 - x2); the published rendering of the example shows
    D1 (x2 - x1) there, which breaks the exchange structure.
    """
    P = QPC.paired
    return SystemParams(
        r1=P(5.0, 0.5, "sin"),
        r2=P(5.0, 0.4, "sin"),
        s1=P(4.0, 0.5, "cos"),
        s2=P(4.0, 0.3, "cos"),
        a11=P(2.5, 0.5, "cos"),
        a12=P(2.2, 0.3, "sin"),
        a21=P(2.25, 0.6, "cos"),
        a22=P(2.4, 0.4, "sin"),
        b11=P(2.4, 0.7, "sin"),
        b12=P(2.3, 0.5, "cos"),
        b21=P(2.3, 0.5, "sin"),
        b22=P(2.5, 0.3, "cos"),
        D1=P(1.0, 0.1, "cos"),
        D2=P(1.0, 0.2, "sin"),
    )

"""Quasi-periodic coefficient functions.

Every time-varying rate of the two-patch model is a finite trigonometric sum

    f(t) = constant + sum_k amplitude_k * trig(frequency_k * t)

with ``trig`` either ``sin`` or ``cos``. For such sums the infimum and
supremum over ``[0, inf)`` are ``constant -/+ sum |amplitude_k|`` whenever the
frequencies are rationally independent (Kronecker equidistribution), and that
pair is always a valid outer bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Literal

import numpy as np

TrigKind = Literal["sin", "cos"]

#: Token accepted in config files for an exactly reproducible sqrt(2) frequency.
SQRT2_TOKEN = "sqrt2"

_FREQ_TOKENS = {SQRT2_TOKEN: math.sqrt(2.0)}


@dataclass(frozen=True)
class Term:
    amplitude: float
    frequency: float
    kind: TrigKind = "sin"

    def __post_init__(self):
        if self.kind not in ("sin", "cos"):
            raise ValueError(f"term kind must be 'sin' or 'cos', got {self.kind!r}")
        if not (math.isfinite(self.frequency) and self.frequency > 0):
            raise ValueError(f"term frequency must be finite and positive, got {self.frequency!r}")
        if not math.isfinite(self.amplitude):
            raise ValueError(f"term amplitude must be finite, got {self.amplitude!r}")


@dataclass(frozen=True)
class QuasiPeriodicCoefficient:
    """``constant + sum(amplitude * sin|cos(frequency * t))``.

    Instances are immutable. Nonnegativity is *not* enforced here so that the
    parameter validator can report every offending coefficient at once; see
    :meth:`is_nonnegative`.
    """

    constant: float
    terms: tuple[Term, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not math.isfinite(self.constant):
            raise ValueError(f"constant must be finite, got {self.constant!r}")

    @classmethod
    def const(cls, value: float) -> "QuasiPeriodicCoefficient":
        return cls(float(value))

    @classmethod
    def paired(cls, constant: float, amplitude: float, kind: TrigKind,
               frequencies: Iterable[float] = (math.sqrt(2.0), 1.0)) -> "QuasiPeriodicCoefficient":
        """``constant + amplitude * (trig(w1 t) + trig(w2 t) + ...)``, the form used
        throughout the built-in example."""
        return cls(float(constant), tuple(Term(float(amplitude), float(w), kind) for w in frequencies))

    def __call__(self, t):
        return evaluate(self, t)

    @property
    def amplitude_sum(self) -> float:
        return math.fsum(abs(term.amplitude) for term in self.terms)

    @property
    def frequencies(self) -> tuple[float, ...]:
        return tuple(term.frequency for term in self.terms)

    def is_nonnegative(self) -> bool:
        return self.constant - self.amplitude_sum >= 0.0

    def scaled(self, factor: float) -> "QuasiPeriodicCoefficient":
        return QuasiPeriodicCoefficient(
            self.constant * factor,
            tuple(Term(t.amplitude * factor, t.frequency, t.kind) for t in self.terms),
        )

    def to_dict(self) -> dict:
        return {
            "constant": self.constant,
            "terms": [
                {"amplitude": t.amplitude, "frequency": _freq_to_config(t.frequency), "kind": t.kind}
                for t in self.terms
            ],
        }

    @classmethod
    def from_dict(cls, data) -> "QuasiPeriodicCoefficient":
        if isinstance(data, (int, float)):
            return cls.const(data)
        try:
            constant = float(data["constant"])
            terms = tuple(
                Term(float(t["amplitude"]), _freq_from_config(t["frequency"]), t.get("kind", "sin"))
                for t in data.get("terms", ())
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed coefficient entry {data!r}: {exc}") from exc
        return cls(constant, terms)


def _freq_from_config(value) -> float:
    if isinstance(value, str):
        try:
            return _FREQ_TOKENS[value.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown frequency token {value!r}") from None
    return float(value)


def _freq_to_config(value: float):
    for token, exact in _FREQ_TOKENS.items():
        if value == exact:
            return token
    return value


def evaluate(coeff: QuasiPeriodicCoefficient, t):
    """Evaluate the coefficient at scalar or array time ``t``."""
    scalar = np.ndim(t) == 0
    if scalar:
        value = coeff.constant
        for term in coeff.terms:
            trig = math.sin if term.kind == "sin" else math.cos
            value += term.amplitude * trig(term.frequency * t)
        return float(value)
    t = np.asarray(t, dtype=float)
    value = np.full(t.shape, coeff.constant, dtype=float)
    for term in coeff.terms:
        trig = np.sin if term.kind == "sin" else np.cos
        value += term.amplitude * trig(term.frequency * t)
    return value


def inf_bound(coeff: QuasiPeriodicCoefficient) -> float:
    """Infimum over ``t >= 0``; exact for rationally independent frequencies,
    a lower bound otherwise."""
    return coeff.constant - coeff.amplitude_sum


def sup_bound(coeff: QuasiPeriodicCoefficient) -> float:
    """Supremum over ``t >= 0``; exact for rationally independent frequencies,
    an upper bound otherwise."""
    return coeff.constant + coeff.amplitude_sum


def empirical_extrema(coeff: QuasiPeriodicCoefficient, horizon: float, step: float,
                      chunk: int = 1_000_000) -> tuple[float, float]:
    """Min and max of the coefficient on the grid ``0, step, 2 step, ..., horizon``."""
    if not horizon > 0:
        raise ValueError(f"horizon must be positive, got {horizon!r}")
    if not step > 0:
        raise ValueError(f"step must be positive, got {step!r}")
    n = int(math.floor(horizon / step + 1e-9)) + 1
    lo, hi = math.inf, -math.inf
    for start in range(0, n, chunk):
        t = np.arange(start, min(start + chunk, n), dtype=float) * step
        v = evaluate(coeff, t)
        lo = min(lo, float(v.min()))
        hi = max(hi, float(v.max()))
    return lo, hi

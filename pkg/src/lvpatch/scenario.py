"""Scenario configuration: JSON schema, parsing and the built-in example.

Schema (all sections except ``params`` optional)::

    {
      "params": {"r1": {"constant": 5, "terms": [{"amplitude": 0.5, "frequency": "sqrt2", "kind": "sin"}, ...]}, ...},
      "initial_states": [[x1, y1, x2, y2], ...],
      "t0": 0.0, "t_end": 300.0,
      "integration": {"method": "rk4", "h_init": 0.001, "h_min": 1e-9, "rel_tol": 1e-8,
                      "abs_tol": 1e-12, "record_stride": 10},
      "region": {"seed": 42, "ensemble_size": 16, "ic_box": [0.1, 5.0], "burn_in": 100.0,
                 "horizon": 300.0, "margin": 0.05},
      "decay": {"t0": 100.0, "t1": 200.0, "tol": 1e-8, "state": [...], "shadow_state": [...]},
      "attract": {"t_end": 300.0, "eps": 0.001, "hold_from": 200.0, "hold_eps": 0.002},
      "scan": {"t_end": 350.0, "window": [100, 150], "T_range": [150, 200], "T_step": 0.01,
               "epsilon": 0.2, "grid_step": 0.01},
      "output_dir": "out"
    }

A coefficient may also be given as a bare number (constant coefficient).
The frequency token ``"sqrt2"`` is expanded to ``math.sqrt(2)``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .integrator import IntegrationOptions
from .model import SystemParams, example51_params, validate_params


class ConfigError(ValueError):
    """Malformed or unreadable scenario file."""


@dataclass(frozen=True)
class RegionOptions:
    seed: int = 42
    ensemble_size: int = 16
    ic_box: tuple[float, float] = (0.1, 5.0)
    burn_in: float = 100.0
    horizon: float = 300.0
    margin: float = 0.05


@dataclass(frozen=True)
class DecayOptions:
    t0: float = 100.0
    t1: float = 200.0
    tol: float = 1e-8
    state: tuple[float, ...] = (1.0, 1.0, 1.0, 1.0)
    shadow_state: tuple[float, ...] = (2.0, 0.5, 1.5, 0.8)


@dataclass(frozen=True)
class AttractOptions:
    t_end: float = 300.0
    eps: float = 1e-3
    hold_from: float = 200.0
    hold_eps: float = 2e-3


@dataclass(frozen=True)
class ScanOptions:
    t_end: float = 350.0
    window: tuple[float, float] = (100.0, 150.0)
    T_range: tuple[float, float] = (150.0, 200.0)
    T_step: float = 0.01
    epsilon: float = 0.2
    grid_step: float | None = 0.01


_SECTIONS = {
    "region": RegionOptions,
    "decay": DecayOptions,
    "attract": AttractOptions,
    "scan": ScanOptions,
}


def _section(cls, data):
    data = dict(data or {})
    names = {f.name for f in fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"unknown keys in {cls.__name__}: {sorted(unknown)}")
    for k, v in data.items():
        if isinstance(v, list):
            data[k] = tuple(v)
    return cls(**data)


@dataclass(frozen=True)
class Scenario:
    params: SystemParams
    initial_states: tuple[tuple[float, float, float, float], ...]
    integration: IntegrationOptions = field(default_factory=lambda: IntegrationOptions(record_stride=10))
    t0: float = 0.0
    t_end: float = 300.0
    region: RegionOptions = field(default_factory=RegionOptions)
    decay: DecayOptions = field(default_factory=DecayOptions)
    attract: AttractOptions = field(default_factory=AttractOptions)
    scan: ScanOptions = field(default_factory=ScanOptions)
    output_dir: str = "out"

    def __post_init__(self):
        if len(self.initial_states) < 1:
            raise ConfigError("scenario needs at least one initial state")
        for z in self.initial_states:
            if len(z) != 4 or not all(v > 0 for v in z):
                raise ConfigError(f"initial states must be 4 positive numbers, got {list(z)}")

    def to_dict(self) -> dict:
        out = {
            "params": self.params.to_dict(),
            "initial_states": [list(z) for z in self.initial_states],
            "t0": self.t0,
            "t_end": self.t_end,
            "integration": self.integration.to_dict(),
        }
        for name in _SECTIONS:
            out[name] = {k: list(v) if isinstance(v, tuple) else v
                         for k, v in asdict(getattr(self, name)).items()}
        out["output_dir"] = self.output_dir
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        if not isinstance(data, dict):
            raise ConfigError("scenario must be a JSON object")
        known = {"params", "initial_states", "t0", "t_end", "integration", "output_dir", *_SECTIONS}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
        if "params" not in data:
            raise ConfigError("scenario lacks 'params'")
        try:
            params = SystemParams.from_dict(data["params"])
            integration = IntegrationOptions.from_dict(data.get("integration", {"record_stride": 10}))
            kwargs = {name: _section(cls_, data.get(name)) for name, cls_ in _SECTIONS.items()}
            states = tuple(tuple(float(v) for v in z) for z in data.get("initial_states", ()))
            return cls(
                params=params,
                initial_states=states,
                integration=integration,
                t0=float(data.get("t0", 0.0)),
                t_end=float(data.get("t_end", 300.0)),
                output_dir=str(data.get("output_dir", "out")),
                **kwargs,
            )
        except ConfigError:
            raise
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(str(exc)) from exc

    def validated(self) -> "Scenario":
        validate_params(self.params)
        return self


def load_scenario(path) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return Scenario.from_dict(data)


def dump_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario.to_dict(), indent=2) + "\n")


EXAMPLE51_INITIAL_STATES = ((1.0, 1.0, 1.0, 1.0), (3.0, 2.0, 0.5, 1.5), (0.2, 0.4, 2.0, 3.0))


def example51_scenario() -> Scenario:
    return Scenario(params=example51_params(), initial_states=EXAMPLE51_INITIAL_STATES)

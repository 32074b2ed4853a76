"""Strict parsing of run configuration documents.

Configs are YAML mappings.  Parsing is strict in both directions: every
required field must be present, every present field must be known, and
every bound is checked with an error message naming the offending key.
All defaults are materialized into the returned :class:`RunConfig`, and
every seed is explicit; there are no entropy defaults anywhere.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
import yaml

from .ascent import AscentConfig
from .errors import ConfigError
from .models import GaussianMixtureModel, RandomEffectsModel, TableModel
from .models.mixture import simulate_mixture_data
from .models.random_effects import simulate_random_effects_data
from .samplers import ChainConfig

__all__ = [
    "CompareSpec",
    "MaximizeSpec",
    "VerifySpec",
    "EmSpec",
    "SimulateSpec",
    "ModelSpec",
    "RunConfig",
    "parse_config",
    "build_model",
]

COMMANDS = ("compare", "maximize", "verify", "em")

_MODEL_KINDS = ("table", "mixture", "random_effects")

_TRUTH_FIELDS = {
    "mixture": ("weight", "mean1", "mean2", "sigma"),
    "random_effects": ("mu", "tau", "sigma"),
}


class _Reader:
    """One mapping in the document; tracks which keys were consumed."""

    def __init__(self, mapping, path: str):
        if not isinstance(mapping, dict):
            raise ConfigError(f"'{path}' must be a mapping")
        self._map = mapping
        self._path = path
        self._taken = set()

    def _label(self, key: str) -> str:
        return f"{self._path}.{key}" if self._path else key

    def has(self, key: str) -> bool:
        return key in self._map

    def take(self, key: str, kind: str, required: bool = False, default=None,
             bounds=None):
        if key not in self._map:
            if required:
                where = f"'{self._path}'" if self._path else "the top level"
                raise ConfigError(f"missing required field '{key}' in {where}")
            return default
        self._taken.add(key)
        value = self._map[key]
        value = self._coerce(key, value, kind)
        if bounds is not None:
            predicate, requirement = bounds
            if not predicate(value):
                raise ConfigError(
                    f"'{self._label(key)}' = {value!r} is out of range: {requirement}"
                )
        return value

    def _coerce(self, key, value, kind):
        label = self._label(key)
        if kind == "int":
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"'{label}' must be an integer")
            return int(value)
        if kind == "number":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"'{label}' must be a number")
            return float(value)
        if kind == "bool":
            if not isinstance(value, bool):
                raise ConfigError(f"'{label}' must be a boolean")
            return value
        if kind == "str":
            if not isinstance(value, str):
                raise ConfigError(f"'{label}' must be a string")
            return value
        if kind == "number_list":
            if (not isinstance(value, list) or not value
                    or any(isinstance(v, bool) or not isinstance(v, (int, float))
                           for v in value)):
                raise ConfigError(f"'{label}' must be a nonempty list of numbers")
            return tuple(float(v) for v in value)
        raise AssertionError(f"unknown field kind {kind}")

    def submapping(self, key: str, required: bool = False) -> "_Reader | None":
        if key not in self._map:
            if required:
                where = f"'{self._path}'" if self._path else "the top level"
                raise ConfigError(f"missing required block '{key}' in {where}")
            return None
        self._taken.add(key)
        return _Reader(self._map[key], self._label(key))

    def finish(self):
        unknown = sorted(set(self._map) - self._taken)
        if unknown:
            where = f"'{self._path}'" if self._path else "the top level"
            keys = ", ".join(f"'{k}'" for k in unknown)
            raise ConfigError(f"unknown key {keys} in {where}"
                              if len(unknown) == 1
                              else f"unknown keys {keys} in {where}")


_POSITIVE = (lambda v: v > 0, "must be positive")
_NONNEGATIVE = (lambda v: v >= 0, "must be nonnegative")
_OPEN_UNIT = (lambda v: 0.0 < v < 1.0, "must lie in (0, 1)")
_CONFIDENCE = (lambda v: 0.5 < v < 1.0, "must lie in (0.5, 1)")


@dataclass(frozen=True)
class SimulateSpec:
    n: int
    seed: int
    truth: dict


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    joint: tuple | None = None
    data_file: str | None = None
    simulate: SimulateSpec | None = None


@dataclass(frozen=True)
class CompareSpec:
    theta1: tuple
    theta2: tuple
    confidence: float
    max_samples: int


@dataclass(frozen=True)
class MaximizeSpec:
    theta0: tuple
    ascent: AscentConfig


@dataclass(frozen=True)
class VerifySpec:
    instance_count: int
    seed: int


@dataclass(frozen=True)
class EmSpec:
    theta0: tuple
    tolerance: float
    max_iterations: int


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: ModelSpec | None
    compare: CompareSpec | None
    maximize: MaximizeSpec | None
    verify: VerifySpec | None
    em: EmSpec | None
    sampler: ChainConfig | None
    output_path: str
    plot: bool

    def to_dict(self) -> dict:
        """Materialized config echo for reports; plain JSON-able types."""
        def clean(obj):
            if isinstance(obj, dict):
                return {k: clean(v) for k, v in obj.items() if v is not None}
            if isinstance(obj, tuple):
                return [clean(v) for v in obj]
            return obj

        raw = {
            "command": self.command,
            "model": asdict(self.model) if self.model else None,
            self.command: asdict(getattr(self, self.command)),
            "sampler": asdict(self.sampler) if self.sampler else None,
            "output": {"path": self.output_path, "plot": self.plot},
        }
        return clean({k: v for k, v in raw.items() if v is not None})


def _parse_model(reader: _Reader) -> ModelSpec:
    kind = reader.take("kind", "str", required=True)
    if kind not in _MODEL_KINDS:
        raise ConfigError(
            f"'model.kind' = {kind!r} is not one of {', '.join(_MODEL_KINDS)}"
        )
    if kind == "table":
        joint = reader.take("joint", "number_list", required=True)
        if any(v <= 0 for v in joint):
            raise ConfigError("'model.joint' entries must be positive")
        reader.finish()
        return ModelSpec(kind=kind, joint=joint)

    data_file = reader.take("data_file", "str")
    sim_reader = reader.submapping("simulate")
    reader.finish()
    if (data_file is None) == (sim_reader is None):
        raise ConfigError(
            f"'{kind}' model requires exactly one of 'data_file' or 'simulate'"
        )
    if data_file is not None:
        return ModelSpec(kind=kind, data_file=data_file)

    n = sim_reader.take("n", "int", required=True, bounds=_POSITIVE)
    seed = sim_reader.take("seed", "int", required=True)
    truth_reader = sim_reader.submapping("truth", required=True)
    sim_reader.finish()
    truth = {}
    for name in _TRUTH_FIELDS[kind]:
        bounds = None
        if name in ("sigma", "tau"):
            bounds = _POSITIVE
        elif name == "weight":
            bounds = _OPEN_UNIT
        truth[name] = truth_reader.take(name, "number", required=True, bounds=bounds)
    truth_reader.finish()
    return ModelSpec(kind=kind, simulate=SimulateSpec(n=n, seed=seed, truth=truth))


def _parse_compare(reader: _Reader) -> CompareSpec:
    spec = CompareSpec(
        theta1=reader.take("theta1", "number_list", required=True),
        theta2=reader.take("theta2", "number_list", required=True),
        confidence=reader.take("confidence", "number", default=0.95,
                               bounds=_CONFIDENCE),
        max_samples=reader.take("max_samples", "int", default=131072,
                                bounds=(lambda v: v >= 1024,
                                        "must be at least 1024")),
    )
    reader.finish()
    return spec


def _parse_maximize(reader: _Reader) -> MaximizeSpec:
    theta0 = reader.take("theta0", "number_list", required=True)
    initial_scale = reader.take("initial_scale", "number", required=True,
                                bounds=_POSITIVE)
    ascent = AscentConfig(
        initial_scale=initial_scale,
        max_iterations=reader.take("max_iterations", "int", required=True,
                                   bounds=_NONNEGATIVE),
        seed=reader.take("seed", "int", required=True),
        shrink=reader.take("shrink", "number", default=0.7, bounds=_OPEN_UNIT),
        grow=reader.take("grow", "number", default=1.1,
                         bounds=(lambda v: v >= 1.0, "must be at least 1")),
        min_scale=reader.take("min_scale", "number", default=1e-4,
                              bounds=(lambda v: 0 < v < initial_scale,
                                      "must lie in (0, initial_scale)")),
        comparison_confidence=reader.take("comparison_confidence", "number",
                                          default=0.95, bounds=_CONFIDENCE),
        comparison_budget=reader.take("comparison_budget", "int", default=16384,
                                      bounds=(lambda v: v >= 1024,
                                              "must be at least 1024")),
    )
    reader.finish()
    return MaximizeSpec(theta0=theta0, ascent=ascent)


def _parse_verify(reader: _Reader) -> VerifySpec:
    spec = VerifySpec(
        instance_count=reader.take("instance_count", "int", required=True,
                                   bounds=_NONNEGATIVE),
        seed=reader.take("seed", "int", required=True),
    )
    reader.finish()
    return spec


def _parse_em(reader: _Reader) -> EmSpec:
    spec = EmSpec(
        theta0=reader.take("theta0", "number_list", required=True),
        tolerance=reader.take("tolerance", "number", default=1e-8,
                              bounds=_POSITIVE),
        max_iterations=reader.take("max_iterations", "int", default=10000,
                                   bounds=_POSITIVE),
    )
    reader.finish()
    return spec


def _parse_sampler(reader: _Reader) -> ChainConfig:
    config = ChainConfig(
        seed=reader.take("seed", "int", required=True),
        burn_in=reader.take("burn_in", "int", default=2000, bounds=_NONNEGATIVE),
        thinning=reader.take("thinning", "int", default=1, bounds=_POSITIVE),
        initial_step=reader.take("initial_step", "number", default=1.0,
                                 bounds=_POSITIVE),
        target_acceptance=reader.take("target_acceptance", "number",
                                      default=None, bounds=_OPEN_UNIT),
    )
    reader.finish()
    return config


def parse_config(text: str) -> RunConfig:
    """Parse and validate one YAML config document into a RunConfig.

    Exactly one command block (compare, maximize, verify, em) must be
    present.  Blocks a command does not use are rejected, not ignored.
    """
    try:
        document = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    top = _Reader(document, "")

    present = [c for c in COMMANDS if top.has(c)]
    if len(present) != 1:
        raise ConfigError(
            "config must contain exactly one command block out of "
            + ", ".join(f"'{c}'" for c in COMMANDS)
            + (f"; found {', '.join(present)}" if present else "; found none")
        )
    command = present[0]

    parsed = {c: None for c in COMMANDS}
    parsers = {"compare": _parse_compare, "maximize": _parse_maximize,
               "verify": _parse_verify, "em": _parse_em}
    parsed[command] = parsers[command](top.submapping(command, required=True))

    model = None
    if command == "verify":
        if top.has("model"):
            raise ConfigError("'verify' runs generate their own models and do not take a 'model' block")
    else:
        model = _parse_model(top.submapping("model", required=True))

    sampler = None
    if command in ("compare", "maximize"):
        sampler = _parse_sampler(top.submapping("sampler", required=True))
    elif top.has("sampler"):
        raise ConfigError(f"'{command}' runs draw no samples and do not take a 'sampler' block")

    output = top.submapping("output", required=True)
    output_path = output.take("path", "str", required=True)
    if command in ("maximize", "em"):
        plot = output.take("plot", "bool", default=True)
    else:
        plot = False
        if output.has("plot"):
            raise ConfigError(f"'{command}' runs emit no trace figures; 'output.plot' does not apply")
    output.finish()
    top.finish()

    return RunConfig(command=command, model=model, compare=parsed["compare"],
                     maximize=parsed["maximize"], verify=parsed["verify"],
                     em=parsed["em"], sampler=sampler,
                     output_path=output_path, plot=plot)


def _load_data_file(path: str) -> np.ndarray:
    try:
        data = np.loadtxt(path, ndmin=1)
    except OSError as exc:
        raise ConfigError(f"cannot read data file {path!r}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"data file {path!r} is not one-column numeric text: {exc}") from exc
    if data.ndim != 1:
        raise ConfigError(f"data file {path!r} must contain a single column")
    return data


def build_model(spec: ModelSpec):
    """Construct the model a validated spec describes.

    Returns ``(model, seeds)`` where ``seeds`` maps ledger names to the
    explicit seeds consumed while building (simulation only).
    """
    seeds = {}
    if spec.kind == "table":
        return TableModel(spec.joint), seeds

    if spec.data_file is not None:
        data = _load_data_file(spec.data_file)
    else:
        sim = spec.simulate
        seeds["simulate"] = sim.seed
        if spec.kind == "mixture":
            data = simulate_mixture_data(sim.n, sim.truth["weight"],
                                         sim.truth["mean1"], sim.truth["mean2"],
                                         sim.truth["sigma"], seed=sim.seed)
        else:
            data = simulate_random_effects_data(sim.n, sim.truth["mu"],
                                                sim.truth["tau"], sim.truth["sigma"],
                                                seed=sim.seed)
    if spec.kind == "mixture":
        return GaussianMixtureModel(data), seeds
    return RandomEffectsModel(data), seeds

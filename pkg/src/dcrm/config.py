"""Scenario config files: TOML documents describing claim law, counting model,
optional mileage model, discounting and simulation controls.

Example::

    claim = { kind = "exponential", mean = 1.0 }
    counting = { kind = "constant", rate = 1.0 }
    delta = 0.05
    horizon = 1.0

    [simulation]
    paths = 100000
    seed = 42
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .core import DcrmScenario
from .distributions import Deterministic, Exponential, Gamma
from .mileage import AlternatingRenewal, ConstantSpeed, TripLogError, TripLogMileage, ingest_trip_log
from .processes import ConstantIntensity, MileageAffineIntensity, PiecewiseIntensity

__all__ = ["ConfigError", "ScenarioConfig", "load_scenario"]


class ConfigError(ValueError):
    """Invalid scenario config; `field` names the offending entry."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"config field '{field}': {message}")


@dataclass(frozen=True)
class ScenarioConfig:
    """A validated scenario plus its simulation controls."""

    scenario: DcrmScenario
    paths: int = 10_000
    seed: int = 0
    full_trace: bool = False


def load_scenario(path) -> ScenarioConfig:
    """Load and fully validate a scenario config file.

    Raises :class:`ConfigError` naming the offending field; relative trip-log
    paths are resolved against the config file's directory.
    """
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<document>", f"not valid TOML: {exc}") from exc

    known = {"claim", "counting", "mileage", "delta", "horizon", "simulation"}
    for key in doc:
        if key not in known:
            raise ConfigError(key, "unknown top-level field")

    claim = _parse_claim(_require_table(doc, "claim"))
    counting = _parse_counting(_require_table(doc, "counting"))
    mileage = None
    if "mileage" in doc:
        mileage = _parse_mileage(_require_table(doc, "mileage"), base_dir=path.parent)
    delta = _require_number(doc, "delta")
    horizon = _require_number(doc, "horizon")

    sim = doc.get("simulation", {})
    if not isinstance(sim, dict):
        raise ConfigError("simulation", "must be a table")
    for key in sim:
        if key not in {"paths", "seed", "full_trace"}:
            raise ConfigError(f"simulation.{key}", "unknown field")
    paths = _opt_int(sim, "paths", default=10_000, minimum=1)
    seed = _opt_int(sim, "seed", default=0)
    full_trace = sim.get("full_trace", False)
    if not isinstance(full_trace, bool):
        raise ConfigError("simulation.full_trace", "must be a boolean")

    try:
        scenario = DcrmScenario(claim=claim, counting=counting, delta=delta,
                                horizon=horizon, mileage=mileage)
    except (TypeError, ValueError) as exc:
        raise ConfigError("<scenario>", str(exc)) from exc
    return ScenarioConfig(scenario=scenario, paths=paths, seed=seed, full_trace=full_trace)


def _parse_claim(table):
    kind = _tagged_kind(table, "claim", {"exponential", "gamma", "deterministic"})
    try:
        if kind == "exponential":
            return Exponential(mean=_field_number(table, "claim", "mean"))
        if kind == "gamma":
            return Gamma(shape=_field_number(table, "claim", "shape"),
                         scale=_field_number(table, "claim", "scale"))
        return Deterministic(value=_field_number(table, "claim", "value"))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("claim", str(exc)) from exc


def _parse_counting(table):
    kind = _tagged_kind(table, "counting", {"constant", "piecewise", "affine"})
    try:
        if kind == "constant":
            return ConstantIntensity(rate=_field_number(table, "counting", "rate"))
        if kind == "piecewise":
            times = _field_list(table, "counting", "times")
            rates = _field_list(table, "counting", "rates")
            return PiecewiseIntensity(times, rates)
        return MileageAffineIntensity(
            base_rate=_field_number(table, "counting", "base_rate"),
            per_mile=_field_number(table, "counting", "per_mile"),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("counting", str(exc)) from exc


def _parse_mileage(table, base_dir: Path):
    kind = _tagged_kind(table, "mileage",
                        {"constant_speed", "trip_log", "alternating_renewal"})
    try:
        if kind == "constant_speed":
            return ConstantSpeed(speed=_field_number(table, "mileage", "speed"))
        if kind == "trip_log":
            raw = table.get("path")
            if not isinstance(raw, str):
                raise ConfigError("mileage.path", "must be a string path")
            log_path = Path(raw)
            if not log_path.is_absolute():
                log_path = base_dir / log_path
            if not log_path.exists():
                raise ConfigError("mileage.path", f"file not found: {log_path}")
            try:
                return TripLogMileage(ingest_trip_log(log_path))
            except TripLogError as exc:
                raise ConfigError("mileage.path", f"{log_path}: {exc}") from exc
        return AlternatingRenewal(
            mean_drive=_field_number(table, "mileage", "mean_drive"),
            mean_idle=_field_number(table, "mileage", "mean_idle"),
            speed=_field_number(table, "mileage", "speed"),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("mileage", str(exc)) from exc


def _tagged_kind(table, field, allowed):
    kind = table.get("kind")
    if kind not in allowed:
        raise ConfigError(f"{field}.kind", f"must be one of {sorted(allowed)}, got {kind!r}")
    return kind


def _require_table(doc, field):
    value = doc.get(field)
    if not isinstance(value, dict):
        raise ConfigError(field, "required table is missing")
    return value


def _require_number(doc, field) -> float:
    value = doc.get(field)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(field, "required number is missing")
    return float(value)


def _field_number(table, owner, field) -> float:
    value = table.get(field)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{owner}.{field}", "required number is missing")
    return float(value)


def _field_list(table, owner, field):
    value = table.get(field)
    if not isinstance(value, list) or not value or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        raise ConfigError(f"{owner}.{field}", "must be a nonempty list of numbers")
    return [float(v) for v in value]


def _opt_int(table, field, default, minimum=None) -> int:
    value = table.get(field, default)
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(f"simulation.{field}", "must be an integer")
    if minimum is not None and value < minimum:
        raise ConfigError(f"simulation.{field}", f"must be >= {minimum}")
    return value

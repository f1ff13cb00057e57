"""Scenario configuration and its strict JSON form."""
from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any

from farmtwin.farm import FuzzyParams, Thresholds, validate_fuzzy_params
from farmtwin.fleet import INSPECTION, SURVEY, BatteryModel, DroneState


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BlightPatch:
    """Disc of diseased crop; pixels inside lose ``severity`` NDVI."""

    center: tuple[float, float]
    radius: float
    severity: float

    def to_dict(self) -> dict:
        return {"center": list(self.center), "radius": self.radius, "severity": self.severity}


@dataclass(frozen=True)
class FieldConfig:
    base_ndvi: float = 0.6
    jitter_sigma: float = 0.05
    patches: tuple[BlightPatch, ...] = ()

    def to_dict(self) -> dict:
        return {
            "base_ndvi": self.base_ndvi,
            "jitter_sigma": self.jitter_sigma,
            "patches": [p.to_dict() for p in self.patches],
        }


@dataclass(frozen=True)
class ScenarioConfig:
    rows: int = 20
    cols: int = 20
    pixels_per_tile: int = 16
    fuzzy: FuzzyParams = FuzzyParams()
    thresholds: Thresholds = Thresholds()
    t_insp: float = 5.0
    survey_period: float = 1.0
    survey_noise_sigma: float = 0.1
    field: FieldConfig = FieldConfig()
    fleet: tuple[DroneState, ...] = ()
    battery_model: BatteryModel = BatteryModel()
    duration: float = 500.0
    seed: int = 42
    record_no_trigger: bool = True

    def validate(self) -> "ScenarioConfig":
        if self.rows < 1 or self.cols < 1 or self.pixels_per_tile < 1:
            raise ConfigError("rows, cols and pixels_per_tile must be >= 1")
        if not self.duration > 0:
            raise ConfigError("duration must be > 0")
        if not self.survey_period > 0:
            raise ConfigError("survey_period must be > 0")
        if not self.t_insp > 0:
            raise ConfigError("t_insp must be > 0")
        if self.survey_noise_sigma < 0 or self.field.jitter_sigma < 0:
            raise ConfigError("noise levels must be nonnegative")
        if not -1.0 <= self.field.base_ndvi <= 1.0:
            raise ConfigError("base_ndvi out of [-1,1]")
        try:
            validate_fuzzy_params(self.fuzzy)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        kinds = [d.kind for d in self.fleet]
        if kinds.count(SURVEY) != 1:
            raise ConfigError("exactly one survey drone required")
        if kinds.count(INSPECTION) < 1:
            raise ConfigError("at least one inspection drone required")
        ids = [d.drone_id for d in self.fleet]
        if len(set(ids)) != len(ids):
            raise ConfigError("drone ids must be unique")
        return self

    def to_dict(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "pixels_per_tile": self.pixels_per_tile,
            "fuzzy": self.fuzzy.to_dict(),
            "thresholds": self.thresholds.to_dict(),
            "t_insp": self.t_insp,
            "survey_period": self.survey_period,
            "survey_noise_sigma": self.survey_noise_sigma,
            "field": self.field.to_dict(),
            "fleet": [d.to_dict() for d in self.fleet],
            "battery_model": self.battery_model.to_dict(),
            "duration": self.duration,
            "seed": self.seed,
            "record_no_trigger": self.record_no_trigger,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        try:
            kw = _strict(cls, d)
            if "fuzzy" in kw:
                kw["fuzzy"] = FuzzyParams(**_strict(FuzzyParams, kw["fuzzy"]))
            if "thresholds" in kw:
                kw["thresholds"] = Thresholds(**_strict(Thresholds, kw["thresholds"]))
            if "battery_model" in kw:
                kw["battery_model"] = BatteryModel(**_strict(BatteryModel, kw["battery_model"]))
            if "field" in kw:
                fk = _strict(FieldConfig, kw["field"])
                if "patches" in fk:
                    fk["patches"] = tuple(
                        BlightPatch(**{**_strict(BlightPatch, p), "center": tuple(p["center"])})
                        for p in fk["patches"]
                    )
                kw["field"] = FieldConfig(**fk)
            if "fleet" in kw:
                kw["fleet"] = tuple(DroneState.from_dict(x) for x in kw["fleet"])
            return cls(**kw).validate()
        except ConfigError:
            raise
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(str(exc)) from exc


def _strict(cls, d: Any) -> dict:
    if not isinstance(d, dict):
        raise ConfigError(f"{cls.__name__}: expected an object, got {type(d).__name__}")
    known = {f.name for f in fields(cls)}
    unknown = set(d) - known
    if unknown:
        raise ConfigError(f"{cls.__name__}: unknown keys {sorted(unknown)}")
    return dict(d)


def default_fleet(rows: int, cols: int) -> tuple[DroneState, ...]:
    return (
        DroneState(0, SURVEY, (0.0, 0.0)),
        DroneState(1, INSPECTION, (cols * 0.25, rows * 0.25), battery=90.0),
        DroneState(2, INSPECTION, (cols * 0.75, rows * 0.25), battery=60.0),
        DroneState(3, INSPECTION, (cols * 0.5, rows * 0.75), battery=40.0),
    )


def default_patches(rows: int, cols: int) -> tuple[BlightPatch, ...]:
    scale = min(rows, cols) / 20.0
    return (
        BlightPatch((cols * 0.25, rows * 0.25), 2.5 * scale, 0.5),
        BlightPatch((cols * 0.7, rows * 0.3), 2.0 * scale, 1.0),
        BlightPatch((cols * 0.45, rows * 0.75), 3.0 * scale, 0.8),
    )


def default_config(rows: int = 20, cols: int = 20, seed: int = 42, **overrides) -> ScenarioConfig:
    """The reference scenario: three blight patches, one survey and three inspection drones."""
    cfg = ScenarioConfig(
        rows=rows,
        cols=cols,
        seed=seed,
        field=FieldConfig(patches=default_patches(rows, cols)),
        fleet=default_fleet(rows, cols),
    )
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg.validate()


def load_config(path) -> ScenarioConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON: {exc}") from exc
    return ScenarioConfig.from_dict(data)


def save_config(config: ScenarioConfig, path) -> None:
    Path(path).write_text(json.dumps(config.to_dict(), indent=2) + "\n", encoding="utf-8")

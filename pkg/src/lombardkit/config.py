"""Pipeline configuration: one JSON file drives a whole classification run.

The config is the single source of feedback parameters, intelligibility
metric settings, mapping parameters (or a CSV of observations to fit them
from), test alpha, noise seeds and the level ladder. Seeds are always
explicit; nothing in the pipeline draws entropy from the clock.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from .audio import CalibrationRef
from .errors import ConfigError
from .feedback import FeedbackParams
from .mapping import MappingParams, PUBLISHED_2024, fit_mapping, load_observations
from .stoi import StoiConfig

CONFIG_SCHEMA_VERSION = "1"

_TEST_METHODS = ("t", "wilcoxon")


@dataclass(frozen=True)
class PipelineConfig:
    """Everything a classification run needs besides the manifest."""

    feedback: FeedbackParams = FeedbackParams()
    stoi: StoiConfig = StoiConfig()
    mapping: MappingParams | str = PUBLISHED_2024
    alpha: float = 0.001
    seeds: tuple[int, ...] = (7,)
    ladder: tuple[float, ...] = tuple(float(v) for v in range(30, 85, 5))
    calibration: CalibrationRef = CalibrationRef()
    test_method: str = "t"
    n_talkers: int = 20
    noise_duration: float = 12.0
    ltass_csv: str | None = None

    def __post_init__(self):
        if not 0.0 < self.alpha <= 0.5:
            raise ConfigError(f"alpha {self.alpha} outside (0, 0.5]")
        if not self.seeds:
            raise ConfigError("at least one seed required")
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        ladder = tuple(float(v) for v in self.ladder)
        if len(ladder) < 2 or any(b <= a for a, b in zip(ladder, ladder[1:])):
            raise ConfigError("ladder must be >= 2 strictly ascending levels")
        object.__setattr__(self, "ladder", ladder)
        if self.test_method not in _TEST_METHODS:
            raise ConfigError(f"test_method must be one of {_TEST_METHODS}")
        if self.n_talkers < 2:
            raise ConfigError("n_talkers must be >= 2")
        if self.noise_duration <= 0:
            raise ConfigError("noise_duration must be positive")

    def resolve_mapping(self) -> MappingParams:
        """Mapping parameters, fitting them from a CSV when configured so."""
        if isinstance(self.mapping, MappingParams):
            return self.mapping
        report = fit_mapping(load_observations(self.mapping))
        return report.params

    def to_json(self, path) -> None:
        data = {
            "schema_version": CONFIG_SCHEMA_VERSION,
            "feedback": dataclasses.asdict(self.feedback),
            "stoi": dataclasses.asdict(self.stoi),
            "mapping": (dataclasses.asdict(self.mapping)
                        if isinstance(self.mapping, MappingParams)
                        else {"fit_from": self.mapping}),
            "alpha": self.alpha,
            "seeds": list(self.seeds),
            "ladder": list(self.ladder),
            "calibration": dataclasses.asdict(self.calibration),
            "test_method": self.test_method,
            "n_talkers": self.n_talkers,
            "noise_duration": self.noise_duration,
            "ltass_csv": self.ltass_csv,
        }
        with open(path, "w") as fh:
            json.dump(data, fh, indent=2)
            fh.write("\n")

    @classmethod
    def from_json(cls, path) -> "PipelineConfig":
        path = Path(path)
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc

        version = str(data.get("schema_version", CONFIG_SCHEMA_VERSION))
        if version != CONFIG_SCHEMA_VERSION:
            raise ConfigError(f"config schema {version} unsupported "
                              f"(expected {CONFIG_SCHEMA_VERSION})")
        try:
            mapping_raw = data.get("mapping", {})
            if "fit_from" in mapping_raw:
                fit_from = mapping_raw["fit_from"]
                mapping = fit_from if Path(fit_from).is_absolute() \
                    else str(path.parent / fit_from)
            elif mapping_raw:
                mapping = MappingParams(**mapping_raw)
            else:
                mapping = PUBLISHED_2024
            kwargs = dict(
                feedback=FeedbackParams(**data.get("feedback", {})),
                stoi=StoiConfig(**data.get("stoi", {})),
                mapping=mapping,
                calibration=CalibrationRef(**data.get("calibration", {})),
            )
            for key in ("alpha", "seeds", "ladder", "test_method", "n_talkers",
                        "noise_duration", "ltass_csv"):
                if key in data:
                    kwargs[key] = data[key]
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(f"config {path} has unknown or missing fields: {exc}") from exc

"""Run configuration: config-type defaults, optional TOML file, flag overrides."""

from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .dynamic import DynamicConfig
from .predictor import PredictorConfig
from .similarity import SimilarityConfig
from .static import StaticConfig


@dataclass(frozen=True)
class BuildOptions:
    literal_roles: bool = False
    debounce: int = 0

    def __post_init__(self) -> None:
        if self.debounce < 0:
            raise ValueError("debounce must be >= 0")


@dataclass(frozen=True)
class RunConfig:
    static: StaticConfig = field(default_factory=StaticConfig)
    dynamic: DynamicConfig = field(default_factory=DynamicConfig)
    build: BuildOptions = field(default_factory=BuildOptions)
    similarity: SimilarityConfig = field(default_factory=SimilarityConfig)
    predictor: PredictorConfig = field(default_factory=PredictorConfig)

    def build_kwargs(self) -> dict:
        return {
            "static_cfg": self.static,
            "dyn_cfg": self.dynamic,
            "literal_roles": self.build.literal_roles,
            "debounce": self.build.debounce,
        }

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


_SECTIONS = {
    "static": StaticConfig,
    "dynamic": DynamicConfig,
    "build": BuildOptions,
    "similarity": SimilarityConfig,
    "predictor": PredictorConfig,
}


def _make(cls, values: dict[str, Any], section: str):
    known = {f.name for f in fields(cls)}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"[{section}] unknown keys: {', '.join(sorted(unknown))}")
    return cls(**values)


def load_config(path: str | Path | None = None, overrides: dict[str, dict[str, Any]] | None = None) -> RunConfig:
    """Merge a TOML file and per-section overrides onto the defaults.

    ``overrides`` maps section name to keys; ``None`` values are skipped so
    unset command-line flags leave the file or default value alone.
    """
    data: dict[str, dict[str, Any]] = {}
    if path is not None:
        try:
            data = tomllib.loads(Path(path).read_text())
        except tomllib.TOMLDecodeError as exc:
            raise ValueError(f"{path}: {exc}") from None
    unknown = set(data) - set(_SECTIONS)
    if unknown:
        raise ValueError(f"unknown config sections: {', '.join(sorted(unknown))}")
    for section, values in (overrides or {}).items():
        data.setdefault(section, {}).update({k: v for k, v in values.items() if v is not None})

    sim = _make(SimilarityConfig, data.get("similarity", {}), "similarity")
    pred_values = dict(data.get("predictor", {}))
    pred_values["similarity"] = sim
    return RunConfig(
        static=_make(StaticConfig, data.get("static", {}), "static"),
        dynamic=_make(DynamicConfig, data.get("dynamic", {}), "dynamic"),
        build=_make(BuildOptions, data.get("build", {}), "build"),
        similarity=sim,
        predictor=_make(PredictorConfig, pred_values, "predictor"),
    )

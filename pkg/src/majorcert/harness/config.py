"""Run configuration, loaded from a YAML (or JSON) file and CLI overrides."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import yaml

from majorcert.geometry import AblationSpec, ConfigurationError, Geometry, check_patch_size
from majorcert.oracle import DEFAULT_MAX_COMBINATIONS


@dataclass(frozen=True)
class RunConfig:
    geometry: Geometry = Geometry(32, 32)
    num_classes: int = 10
    strategies: tuple[AblationSpec, ...] = (
        AblationSpec("row", 4), AblationSpec("column", 4), AblationSpec("block", 12),
    )
    patch_size: int = 5
    max_combinations: int = DEFAULT_MAX_COMBINATIONS
    output_dir: Path = field(default=Path("out"))

    def __post_init__(self):
        if self.num_classes < 1:
            raise ConfigurationError(f"num_classes must be >= 1, got {self.num_classes}")
        if not self.strategies:
            raise ConfigurationError("at least one strategy is required")
        keys = [s.key for s in self.strategies]
        if len(set(keys)) != len(keys):
            raise ConfigurationError(f"duplicate strategies: {keys}")
        for s in self.strategies:
            s.validate(self.geometry)
        check_patch_size(self.geometry, self.patch_size)

    @property
    def strategy_keys(self) -> list[str]:
        return [s.key for s in self.strategies]

    def to_dict(self) -> dict[str, Any]:
        return {
            "geometry": {"height": self.geometry.height, "width": self.geometry.width},
            "num_classes": self.num_classes,
            "strategies": [{"kind": s.kind.value, "size": s.size} for s in self.strategies],
            "patch_size": self.patch_size,
            "oracle": {"max_combinations": self.max_combinations},
            "output": {"dir": str(self.output_dir)},
        }


def _parse_strategy(item: Any) -> AblationSpec:
    if isinstance(item, str):
        return AblationSpec.parse(item)
    try:
        return AblationSpec(str(item["kind"]), int(item["size"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"bad strategy entry {item!r}") from exc


def config_from_dict(data: dict[str, Any] | None, **overrides: Any) -> RunConfig:
    """Build a config from nested mappings; non-None keyword overrides win.

    Override keys: height, width, num_classes, strategies, patch_size,
    max_combinations, output_dir.
    """
    data = data or {}
    base = RunConfig()
    geo = data.get("geometry", {})
    height = geo.get("height", base.geometry.height)
    width = geo.get("width", base.geometry.width)
    strategies = data.get("strategies")
    values = {
        "num_classes": data.get("num_classes", base.num_classes),
        "patch_size": data.get("patch_size", base.patch_size),
        "max_combinations": data.get("oracle", {}).get("max_combinations",
                                                       base.max_combinations),
        "output_dir": data.get("output", {}).get("dir", base.output_dir),
        "strategies": strategies,
    }
    for key, value in overrides.items():
        if value is None:
            continue
        if key == "height":
            height = value
        elif key == "width":
            width = value
        elif key in values:
            values[key] = value
        else:
            raise ConfigurationError(f"unknown config override {key!r}")
    strategies = values.pop("strategies")
    specs = base.strategies if strategies is None else tuple(
        _parse_strategy(s) for s in strategies)
    return replace(
        base,
        geometry=Geometry(int(height), int(width)),
        strategies=specs,
        num_classes=int(values["num_classes"]),
        patch_size=int(values["patch_size"]),
        max_combinations=int(values["max_combinations"]),
        output_dir=Path(values["output_dir"]),
    )


def load_config(path: str | Path | None, **overrides: Any) -> RunConfig:
    data = None
    if path is not None:
        with open(path) as fh:
            data = yaml.safe_load(fh)
        if data is not None and not isinstance(data, dict):
            raise ConfigurationError(f"{path}: config must be a mapping")
    return config_from_dict(data, **overrides)

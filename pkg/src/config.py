import logging
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any

from src.errors import DataError, UsageError
from src.models import PenaltyWeights

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by every command; file values are overridden by flags."""

    data: Path | None = None
    mask: Path | None = None
    mesh: Path | None = None
    grid: str | None = None
    model: Path | None = None
    out: Path = Path("out")
    k: int = 3
    eps: float = 1e-4
    seed: int = 0
    global_weight: float = 1.0
    l1_ratio: float = 0.1
    tv_ratio: float = 0.5
    folds: int = 5
    workers: int = 1
    n: int = 500
    side: int = 100
    snr: float = 0.1
    datasets: int = 50
    select: bool = False
    export_operator: bool = False

    def weights(self) -> PenaltyWeights:
        try:
            return PenaltyWeights.from_ratios(self.global_weight, self.l1_ratio, self.tv_ratio)
        except DataError as e:
            raise UsageError(str(e)) from e

    @property
    def structure_sources(self) -> list[str]:
        return [
            name
            for name, value in (("mask", self.mask), ("mesh", self.mesh), ("grid", self.grid))
            if value is not None
        ]

    def validate(self) -> "RunConfig":
        checks = (
            (self.k >= 1, f"k must be >= 1, got {self.k}"),
            (self.eps > 0, f"eps must be positive, got {self.eps}"),
            (self.folds >= 2, f"folds must be >= 2, got {self.folds}"),
            (self.workers >= 1, f"workers must be >= 1, got {self.workers}"),
            (self.snr > 0, "snr must be positive"),
            (self.n >= 2, f"n must be >= 2, got {self.n}"),
            (self.datasets >= 1, f"datasets must be >= 1, got {self.datasets}"),
            (
                len(self.structure_sources) <= 1,
                f"give at most one of --mask/--mesh/--grid, got {self.structure_sources}",
            ),
        )
        for ok, message in checks:
            if not ok:
                raise UsageError(message)
        _ = self.weights()
        return self


def _converter(name: str) -> Any:
    kind = {f.name: f.type for f in fields(RunConfig)}[name]
    if "Path" in str(kind):
        return Path
    if kind in ("int", int):
        return int
    if kind in ("float", float):
        return float
    if kind in ("bool", bool):
        return lambda s: str(s).strip().lower() in ("1", "true", "yes", "on")
    return str


def read_config_file(path: Path) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    if not path.exists():
        raise UsageError(f"config file {path} does not exist")
    values: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def build_config(file_values: dict[str, str], overrides: dict[str, Any]) -> RunConfig:
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(file_values) - known)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")

    config = RunConfig()
    try:
        parsed = {key: _converter(key)(value) for key, value in file_values.items()}
    except ValueError as e:
        raise UsageError(f"bad config value: {e}") from e
    parsed.update({k: v for k, v in overrides.items() if k in known and v is not None})
    config = replace(config, **parsed)
    logger.debug("run config: %s", config)
    return config.validate()

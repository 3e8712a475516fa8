from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass
from typing import Any, Mapping, Optional


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Settings:
    tolerance: float = 1e-10
    grid_points: int = 64
    period: Optional[float] = None
    scan_halfwidth: float = 50.0
    scan_step: float = 1e-2
    scan_max_points: int = 200_000
    seed: int = 0
    workers: Optional[int] = None
    audit_log: Optional[str] = None

    def with_overrides(self, **changes: Any) -> "Settings":
        """Return a copy with every non-None keyword applied."""
        applied = {k: v for k, v in changes.items() if v is not None}
        if not applied:
            return self
        settings = dataclasses.replace(self, **applied)
        settings.check()
        return settings

    def check(self) -> None:
        if not self.tolerance > 0:
            raise ConfigError("tolerance must be positive")
        if self.grid_points < 2 or self.grid_points & (self.grid_points - 1):
            raise ConfigError("grid_points must be a power of two >= 2")
        if self.period is not None and not self.period > 0:
            raise ConfigError("period must be positive")
        if not self.scan_halfwidth > 0 or not self.scan_step > 0:
            raise ConfigError("scan_halfwidth and scan_step must be positive")
        if self.scan_max_points < 1:
            raise ConfigError("scan_max_points must be >= 1")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers must be >= 1")


_ENV_FIELDS = {
    "LEVYLAB_TOLERANCE": ("tolerance", float),
    "LEVYLAB_GRID_POINTS": ("grid_points", int),
    "LEVYLAB_PERIOD": ("period", float),
    "LEVYLAB_SCAN_HALFWIDTH": ("scan_halfwidth", float),
    "LEVYLAB_SCAN_STEP": ("scan_step", float),
    "LEVYLAB_SCAN_MAX_POINTS": ("scan_max_points", int),
    "LEVYLAB_SEED": ("seed", int),
    "LEVYLAB_WORKERS": ("workers", int),
    "LEVYLAB_AUDIT_LOG": ("audit_log", str),
}


def load_settings(environ: Mapping[str, str] | None = None) -> Settings:
    env = os.environ if environ is None else environ
    values: dict[str, Any] = {}
    for var, (name, kind) in _ENV_FIELDS.items():
        raw = env.get(var)
        if raw is None or not raw.strip():
            continue
        try:
            values[name] = kind(raw.strip())
        except ValueError as exc:
            raise ConfigError(f"{var}: invalid value {raw!r}") from exc
    settings = Settings(**values)
    try:
        settings.check()
    except ConfigError as exc:
        raise ConfigError(f"environment: {exc}") from exc
    return settings

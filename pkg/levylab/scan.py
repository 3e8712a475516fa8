"""Grid search for zeros of a complex-valued function on a box around the origin."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol

import numpy as np
from scipy import ndimage, optimize

from levylab.runtime import log_event, traced

_CHUNK_ROWS = 1 << 16
_CLUSTER_FACTOR = 10.0


class Evaluable(Protocol):
    dimension: int

    def evaluate(self, points: np.ndarray) -> np.ndarray: ...


class ScanError(ValueError):
    pass


@dataclass(frozen=True)
class ScanCandidate:
    location: tuple[float, ...]
    residual: float

    def norm(self) -> float:
        return float(np.linalg.norm(self.location))

    def to_dict(self) -> dict[str, object]:
        return {"location": list(self.location), "residual": self.residual}


def _evaluate_chunked(fn: Evaluable, points: np.ndarray) -> np.ndarray:
    out = np.empty(len(points), dtype=complex)
    for start in range(0, len(points), _CHUNK_ROWS):
        out[start : start + _CHUNK_ROWS] = fn.evaluate(points[start : start + _CHUNK_ROWS])
    return out


def _polish(fn: Evaluable, start: np.ndarray, tolerance: float, radius: float) -> ScanCandidate:
    def residuals(x: np.ndarray) -> np.ndarray:
        value = fn.evaluate(x.reshape(1, -1))[0]
        return np.array([value.real, value.imag])

    base = float(np.linalg.norm(residuals(start)))
    best = ScanCandidate(tuple(float(v) for v in start), base)
    if base == 0.0:
        return best
    try:
        result = optimize.least_squares(
            residuals,
            start,
            method="trf",
            xtol=tolerance,
            ftol=tolerance,
            gtol=tolerance,
            max_nfev=200,
        )
    except (ValueError, np.linalg.LinAlgError):
        return best
    moved = float(np.linalg.norm(result.x - start))
    residual = float(np.linalg.norm(residuals(result.x)))
    if moved <= radius and residual < base:
        return ScanCandidate(tuple(float(v) for v in result.x), residual)
    return best


def scan_axis(box_halfwidth: float, step: float, dimension: int, max_points: int) -> tuple[int, float]:
    """Points per axis and the step actually used, after coarsening to at most ``max_points``."""
    if not box_halfwidth > 0 or not step > 0:
        raise ScanError("box half-width and step must be positive")
    per_axis = 2 * int(math.floor(box_halfwidth / step)) + 1
    cap = max(3, int(math.floor(max_points ** (1.0 / dimension))))
    if per_axis > cap:
        per_axis = cap if cap % 2 == 1 else cap - 1
        step = box_halfwidth / ((per_axis - 1) // 2)
    return per_axis, step


@traced
def zero_scan_numeric(
    fn: Evaluable,
    box_halfwidth: float,
    step: float,
    *,
    max_points: int = 200_000,
    polish_tolerance: float = 1e-15,
    max_candidates: int = 64,
) -> list[ScanCandidate]:
    """Local minima of |psi|^2 on a grid, polished by least squares and clustered.

    The grid contains the origin. When (2 m + 1)^n exceeds ``max_points`` the
    step is coarsened and a ``scan_coarsened`` event is logged.
    """
    n = fn.dimension
    per_axis, effective = scan_axis(box_halfwidth, step, n, max_points)
    if effective != step:
        log_event("scan_coarsened", requested_step=step, step=effective, points=per_axis**n)
        step = effective
    half = (per_axis - 1) // 2
    axis = np.arange(-half, half + 1) * step
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=1)
    values = np.abs(_evaluate_chunked(fn, points)) ** 2
    grid = values.reshape((per_axis,) * n)
    minima = ndimage.minimum_filter(grid, size=3, mode="nearest") == grid
    indices = np.flatnonzero(minima.ravel())
    order = indices[np.argsort(values[indices], kind="stable")][: 4 * max_candidates]

    radius = _CLUSTER_FACTOR * step
    polished = [_polish(fn, points[i], polish_tolerance, radius) for i in order]
    polished.sort(key=lambda c: (c.residual, c.norm()))
    accepted: list[ScanCandidate] = []
    for cand in polished:
        loc = np.array(cand.location)
        if all(np.linalg.norm(loc - np.array(a.location)) > radius for a in accepted):
            accepted.append(cand)
        if len(accepted) >= max_candidates:
            break
    log_event("scan_done", grid_points=int(per_axis**n), minima=int(len(indices)), candidates=len(accepted))
    return sorted(accepted, key=lambda c: c.location)

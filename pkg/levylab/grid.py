"""Periodic grids and the smooth test functions the operator lab applies generators to."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

import numpy as np


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class TorusGrid:
    """N^n equispaced points on [0, L)^n."""

    dimension: int
    period: float
    points: int

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise GridError("grid dimension must be >= 1")
        if not self.period > 0 or not math.isfinite(self.period):
            raise GridError("grid period must be positive")
        if self.points < 2 or self.points & (self.points - 1):
            raise GridError(f"grid points per axis must be a power of two, got {self.points}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points,) * self.dimension

    @property
    def spacing(self) -> float:
        return self.period / self.points

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dimension

    def axis(self) -> np.ndarray:
        return np.arange(self.points) * self.spacing

    def coordinates(self) -> np.ndarray:
        """Points as an (N^n, n) array in 'ij' order."""
        mesh = np.meshgrid(*([self.axis()] * self.dimension), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def frequency_axis(self) -> np.ndarray:
        return 2.0 * math.pi * np.fft.fftfreq(self.points, d=self.spacing)

    def frequencies(self) -> np.ndarray:
        """Angular frequencies in FFT layout as an (N^n, n) array."""
        mesh = np.meshgrid(*([self.frequency_axis()] * self.dimension), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def resolves(self, frequency: Sequence[float], slack: float = 1e-9) -> bool:
        """True when e^{i eta.x} is periodic on the grid and below Nyquist."""
        k = np.asarray(frequency, dtype=float) * self.period / (2.0 * math.pi)
        return bool(np.all(np.abs(k - np.round(k)) <= slack) and np.all(np.abs(np.round(k)) < self.points / 2))


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != self.grid.shape:
            raise GridError(f"values have shape {self.values.shape}, grid expects {self.grid.shape}")

    @classmethod
    def from_callable(cls, grid: TorusGrid, fn: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        return cls(grid, np.asarray(fn(grid.coordinates()), dtype=complex).reshape(grid.shape))

    def sup_norm(self) -> float:
        return float(np.abs(self.values).max())

    def flat(self) -> np.ndarray:
        return self.values.ravel()


class SmoothFunction(Protocol):
    dimension: int

    def value(self, points: np.ndarray) -> np.ndarray: ...

    def gradient(self, points: np.ndarray) -> np.ndarray: ...

    def hessian(self, points: np.ndarray) -> np.ndarray: ...


def _as_points(points: np.ndarray, dimension: int) -> np.ndarray:
    x = np.asarray(points, dtype=float)
    return x.reshape(-1, dimension)


@dataclass(frozen=True)
class TrigPolynomial:
    """f(x) = sum_k c_k e^{i eta_k.x}."""

    frequencies: tuple[tuple[float, ...], ...]
    coefficients: tuple[complex, ...]

    @property
    def dimension(self) -> int:
        return len(self.frequencies[0])

    def _freq(self) -> np.ndarray:
        return np.array(self.frequencies, dtype=float).reshape(len(self.frequencies), self.dimension)

    def _phases(self, points: np.ndarray) -> np.ndarray:
        x = _as_points(points, self.dimension)
        return np.exp(1j * (x @ self._freq().T)) * np.array(self.coefficients, dtype=complex)

    def value(self, points: np.ndarray) -> np.ndarray:
        return self._phases(points).sum(axis=1)

    def gradient(self, points: np.ndarray) -> np.ndarray:
        return 1j * self._phases(points) @ self._freq()

    def hessian(self, points: np.ndarray) -> np.ndarray:
        eta = self._freq()
        outer = np.einsum("ki,kj->kij", eta, eta)
        return -np.einsum("pk,kij->pij", self._phases(points), outer)

    def on_grid(self, grid: TorusGrid) -> GridFunction:
        return GridFunction(grid, self.value(grid.coordinates()).reshape(grid.shape))

    def resolved_by(self, grid: TorusGrid) -> bool:
        return grid.dimension == self.dimension and all(grid.resolves(eta) for eta in self.frequencies)


def random_trig_polynomial(grid: TorusGrid, terms: int, seed: int, max_mode: int = 4) -> TrigPolynomial:
    rng = np.random.default_rng(seed)
    limit = min(max_mode, grid.points // 2 - 1)
    base = 2.0 * math.pi / grid.period
    freqs = []
    for _ in range(terms):
        k = rng.integers(-limit, limit + 1, size=grid.dimension)
        freqs.append(tuple(float(base * v) for v in k))
    coeffs = tuple(complex(rng.normal(), rng.normal()) for _ in range(terms))
    return TrigPolynomial(tuple(freqs), coeffs)


@dataclass(frozen=True)
class TestBump:
    """h exp(1 - 1 / (1 - |x - c|^2 / r^2)) inside the ball, 0 outside."""

    __test__ = False

    center: tuple[float, ...]
    radius: float
    height: float = 1.0

    @property
    def dimension(self) -> int:
        return len(self.center)

    def _parts(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        x = _as_points(points, self.dimension)
        d = x - np.array(self.center, dtype=float)
        u = 1.0 - (d * d).sum(axis=1) / self.radius**2
        inside = u > 1e-6
        phi = np.zeros(len(x))
        phi[inside] = self.height * np.exp(1.0 - 1.0 / u[inside])
        return d, u, inside, phi

    def value(self, points: np.ndarray) -> np.ndarray:
        return self._parts(points)[3]

    def gradient(self, points: np.ndarray) -> np.ndarray:
        d, u, inside, phi = self._parts(points)
        out = np.zeros_like(d)
        scale = np.zeros(len(d))
        scale[inside] = -2.0 * phi[inside] / (u[inside] ** 2 * self.radius**2)
        out[:] = scale[:, None] * d
        return out

    def hessian(self, points: np.ndarray) -> np.ndarray:
        d, u, inside, phi = self._parts(points)
        n = self.dimension
        r2 = self.radius**2
        first = np.zeros(len(d))
        second = np.zeros(len(d))
        ui = u[inside]
        first[inside] = -phi[inside] / ui**2
        second[inside] = phi[inside] * (1.0 - 2.0 * ui) / ui**4
        grad_s = 2.0 * d / r2
        return second[:, None, None] * np.einsum("pi,pj->pij", grad_s, grad_s) + (
            first[:, None, None] * (2.0 / r2) * np.eye(n)[None, :, :]
        )


@dataclass(frozen=True)
class FiniteDifferenceFunction:
    """Wraps a plain callable; derivatives by central differences."""

    fn: Callable[[np.ndarray], np.ndarray]
    dimension: int
    step: float = 1e-5

    def value(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(self.fn(_as_points(points, self.dimension)))

    def gradient(self, points: np.ndarray) -> np.ndarray:
        x = _as_points(points, self.dimension)
        h = self.step
        cols = []
        for i in range(self.dimension):
            e = np.zeros(self.dimension)
            e[i] = h
            cols.append((self.value(x + e) - self.value(x - e)) / (2 * h))
        return np.stack(cols, axis=1)

    def hessian(self, points: np.ndarray) -> np.ndarray:
        x = _as_points(points, self.dimension)
        h = self.step
        n = self.dimension
        f0 = self.value(x)
        out = np.zeros((len(x), n, n), dtype=np.result_type(f0, float))
        for i in range(n):
            ei = np.zeros(n)
            ei[i] = h
            out[:, i, i] = (self.value(x + ei) - 2 * f0 + self.value(x - ei)) / h**2
            for j in range(i + 1, n):
                ej = np.zeros(n)
                ej[j] = h
                mixed = (
                    self.value(x + ei + ej) - self.value(x + ei - ej) - self.value(x - ei + ej) + self.value(x - ei - ej)
                ) / (4 * h * h)
                out[:, i, j] = out[:, j, i] = mixed
        return out

"""Generators applied on periodic grids, in Fourier form and in integro-differential form."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Union

import numpy as np

from levylab.config import Settings
from levylab.grid import GridFunction, SmoothFunction, TestBump, TorusGrid, TrigPolynomial
from levylab.runtime import log_event, traced
from levylab.symbol import (
    LevyTriplet,
    MeasureKind,
    SymbolHandle,
    as_symbol,
    conjugate_triplet,
    is_self_adjoint,
)

Model = Union[LevyTriplet, SymbolHandle]


class OperatorError(ValueError):
    pass


def _check_dimension(symbol: SymbolHandle, grid: TorusGrid) -> None:
    if symbol.dimension != grid.dimension:
        raise OperatorError(f"symbol has dimension {symbol.dimension}, grid has {grid.dimension}")


def eval_symbol_grid(model: Model, grid: TorusGrid) -> np.ndarray:
    """psi on the grid's angular frequencies, in FFT layout."""
    symbol = as_symbol(model)
    _check_dimension(symbol, grid)
    return symbol.evaluate(grid.frequencies()).reshape(grid.shape)


def _apply_multiplier(f: GridFunction, multiplier: np.ndarray) -> GridFunction:
    return GridFunction(f.grid, np.fft.ifftn(multiplier * np.fft.fftn(f.values)))


@traced
def apply_generator_fourier(u: GridFunction, model: Model) -> GridFunction:
    """L u = F^{-1}(-psi F u)."""
    return _apply_multiplier(u, -eval_symbol_grid(model, u.grid))


def _require_finite_measure(triplet: LevyTriplet) -> None:
    if triplet.measure.kind is MeasureKind.DENSITY:
        raise OperatorError("direct application supports finite discrete measures only")


def apply_generator_direct(u: SmoothFunction, triplet: LevyTriplet, points: Any) -> np.ndarray:
    """b.grad u + 1/2 div Q grad u + sum a_j (u(x + b_j) - u(x) + b_j.grad u(x) 1_{|b_j|<1})."""
    _require_finite_measure(triplet)
    n = triplet.dimension
    if u.dimension != n:
        raise OperatorError(f"function has dimension {u.dimension}, triplet has {n}")
    x = np.asarray(points, dtype=float).reshape(-1, n)
    grad = u.gradient(x)
    hess = u.hessian(x)
    base = u.value(x)
    out = grad @ triplet.drift_array() + 0.5 * np.einsum("pij,ij->p", hess, triplet.covariance_array())
    if triplet.atoms:
        masses, locations, small = triplet.atom_arrays()
        for mass, location, is_small in zip(masses, locations, small):
            term = u.value(x + location) - base
            if is_small:
                term = term + grad @ location
            out = out + mass * term
    return np.asarray(out)


@traced
def crosscheck_applications(u: TrigPolynomial, triplet: LevyTriplet, grid: TorusGrid) -> float:
    """sup |Fourier application - direct application| / (1 + sup |direct application|) over the grid."""
    if not u.resolved_by(grid):
        raise OperatorError("trigonometric polynomial is not resolved by the grid")
    fourier = apply_generator_fourier(u.on_grid(grid), triplet).flat()
    direct = apply_generator_direct(u, triplet, grid.coordinates())
    return float(np.abs(fourier - direct).max() / (1.0 + np.abs(direct).max()))


@traced
def distributional_pairing(f: GridFunction, phi: TestBump, triplet: LevyTriplet) -> complex:
    """int_{[0,L)^n} f * periodised(L_{conj psi} phi) dx, trapezoid rule."""
    _require_finite_measure(triplet)
    grid = f.grid
    if phi.dimension != grid.dimension:
        raise OperatorError("bump and grid dimensions differ")
    if 2.0 * phi.radius > grid.period:
        raise OperatorError("bump support must fit inside one period")
    adjoint = conjugate_triplet(triplet)
    reach = max(abs(c) for c in phi.center) + phi.radius
    if adjoint.atoms:
        _, locations, _ = adjoint.atom_arrays()
        reach += float(np.abs(locations).max())
    k_max = int(math.ceil(reach / grid.period)) + 1
    coords = grid.coordinates()
    periodised = np.zeros(len(coords), dtype=complex)
    for shift in np.ndindex(*((2 * k_max + 1,) * grid.dimension)):
        offset = (np.array(shift) - k_max) * grid.period
        periodised += apply_generator_direct(phi, adjoint, coords + offset)
    return complex((f.flat() * periodised).sum() * grid.cell_volume)


@traced
def resolvent_fixed_point(f: GridFunction, model: Model, tau: float) -> float:
    """sup |tau (tau - L)^{-1} f - f|."""
    if not tau > 0:
        raise OperatorError("resolvent parameter must be positive")
    psi = eval_symbol_grid(model, f.grid)
    image = _apply_multiplier(f, tau / (tau + psi))
    return float(np.abs(image.values - f.values).max())


@dataclass(frozen=True)
class FixedPointResult:
    residual: float
    conclusive: bool

    def to_dict(self) -> dict[str, Any]:
        return {"residual": self.residual, "conclusive": self.conclusive}


@traced
def semigroup_fixed_point(f: GridFunction, model: Model, t: float, settings: Settings | None = None) -> FixedPointResult:
    """sup |P_t f - f|; decisive for Liouville only when psi is real."""
    if not t > 0:
        raise OperatorError("semigroup time must be positive")
    cfg = settings or Settings()
    psi = eval_symbol_grid(model, f.grid)
    image = _apply_multiplier(f, np.exp(-t * psi))
    residual = float(np.abs(image.values - f.values).max())
    symbol = as_symbol(model)
    triplet = symbol.underlying_triplet()
    if triplet is not None and triplet.measure.kind is not MeasureKind.DENSITY:
        real = is_self_adjoint(triplet)
    else:
        real = bool(np.all(np.abs(psi.imag) <= cfg.tolerance * (1.0 + np.abs(psi))))
    return FixedPointResult(residual, real)


@traced
def transition_density(model: Model, t: float, grid: TorusGrid) -> GridFunction:
    """Periodised density L^{-n} sum_eta e^{-t psi(eta)} e^{-i eta.x} on the grid."""
    if not t > 0:
        raise OperatorError("time must be positive")
    psi = eval_symbol_grid(model, grid)
    values = np.fft.fftn(np.exp(-t * psi)) / grid.period**grid.dimension
    log_event("transition_density", max_imag=float(np.abs(values.imag).max()))
    return GridFunction(grid, values)


@dataclass(frozen=True)
class DensityPositivity:
    min_value: float
    max_imaginary: float
    strictly_positive: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "min_value": self.min_value,
            "max_imaginary": self.max_imaginary,
            "strictly_positive": self.strictly_positive,
        }


def positivity_report(density: GridFunction, tolerance: float = 1e-10) -> DensityPositivity:
    real = density.values.real
    scale = max(1.0, float(np.abs(real).max()))
    min_value = float(real.min())
    return DensityPositivity(
        min_value=min_value,
        max_imaginary=float(np.abs(density.values.imag).max()),
        strictly_positive=min_value > tolerance * scale,
    )

"""Bounded harmonic counterexamples built from frequencies in the zero set."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional, Union

import numpy as np

from levylab import rational as rq
from levylab.config import Settings
from levylab.grid import GridFunction, TorusGrid, TrigPolynomial
from levylab.groups import ClosedSubgroup, Scale, format_group, member
from levylab.operators import (
    DensityPositivity,
    Model,
    OperatorError,
    apply_generator_direct,
    apply_generator_fourier,
    positivity_report,
    transition_density,
)
from levylab.rational import RationalVector
from levylab.runtime import log_event, traced
from levylab.symbol import MeasureKind, as_symbol
from levylab.zeroset import decide_liouville

_MIN_POINTS = 16


class HarmonicError(OperatorError):
    pass


@dataclass(frozen=True)
class HarmonicCandidate:
    """f(x) = sum_k c_k e^{i eta_k.x} with every eta_k = scale * q_k in the zero set."""

    zero_set: ClosedSubgroup
    frequencies: tuple[RationalVector, ...]
    coefficients: tuple[complex, ...]
    scale: Scale
    period: float

    def __post_init__(self) -> None:
        if len(self.frequencies) != len(self.coefficients):
            raise HarmonicError("one coefficient per frequency is required")
        for q in self.frequencies:
            if not member(self.zero_set, q, self.scale):
                raise HarmonicError(f"frequency {q} is not in {format_group(self.zero_set)}")

    def polynomial(self) -> TrigPolynomial:
        factor = self.scale.factor
        freqs = tuple(tuple(float(x) * factor for x in q) for q in self.frequencies)
        return TrigPolynomial(freqs, self.coefficients)

    def max_mode(self) -> int:
        k = 0
        for q in self.frequencies:
            for x in q:
                mode = float(x) * self.scale.factor * self.period / (2 * math.pi)
                k = max(k, int(round(abs(mode))))
        return k

    def to_dict(self) -> dict[str, Any]:
        return {
            "frequencies": [[rq.format_fraction(x) for x in q] for q in self.frequencies],
            "scale": self.scale.value,
            "coefficients": [[c.real, c.imag] for c in self.coefficients],
            "period": self.period,
        }


def _rational_gcd(values: list[Fraction]) -> Fraction:
    nonzero = [abs(v) for v in values if v != 0]
    d = rq.common_denominator([tuple(nonzero)])
    return Fraction(rq.integer_gcd(int(v * d) for v in nonzero), d)


def _next_power_of_two(k: int) -> int:
    return 1 << max(0, (k - 1).bit_length())


@traced
def make_harmonic(
    zero_set: ClosedSubgroup,
    seed: Optional[int] = None,
    *,
    points: Optional[int] = None,
) -> tuple[HarmonicCandidate, GridFunction]:
    """Trigonometric polynomial on frequencies {0, +-g} for generators g of the zero set.

    Without a seed the result is the canonical 1 + cos(g.x) on the first
    generator; with a seed up to two generators get random coefficients.
    """
    if zero_set.is_trivial:
        raise HarmonicError("no bounded non-constant harmonic function exists: the zero set is {0}")
    generators = list(zero_set.lattice_basis) + list(zero_set.subspace_basis)
    # Subspaces are closed under scaling, so subspace vectors share the lattice scale.
    scale = zero_set.scale
    n = zero_set.dimension
    zero = tuple(Fraction(0) for _ in range(n))
    if seed is None:
        chosen = generators[:1]
        freqs = [zero]
        coeffs: list[complex] = [1.0 + 0j]
        for g in chosen:
            freqs += [g, tuple(-x for x in g)]
            coeffs += [0.5 + 0j, 0.5 + 0j]
    else:
        rng = np.random.default_rng(seed)
        chosen = generators[:2]
        freqs = [zero]
        coeffs = [complex(rng.normal(), 0.0)]
        for g in chosen:
            c = complex(rng.normal(), rng.normal()) / 2
            freqs += [g, tuple(-x for x in g)]
            coeffs += [c, c.conjugate()]

    step = _rational_gcd([x for g in chosen for x in g])
    period = 1.0 / float(step) if scale is Scale.TWO_PI else 2.0 * math.pi / float(step)
    candidate = HarmonicCandidate(zero_set, tuple(freqs), tuple(coeffs), scale, period)
    needed = max(_MIN_POINTS, _next_power_of_two(4 * (candidate.max_mode() + 1)))
    if points is None:
        points = needed
    elif points <= 2 * candidate.max_mode():
        raise HarmonicError(f"{points} points per axis cannot resolve mode {candidate.max_mode()}")
    grid = TorusGrid(n, period, points)
    log_event("make_harmonic", terms=len(freqs), period=period, points=points)
    return candidate, candidate.polynomial().on_grid(grid)


@dataclass(frozen=True)
class HarmonicReport:
    fourier_residual: float
    direct_residual: Optional[float]
    sup_norm: float
    tolerance: float
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "fourier_residual": self.fourier_residual,
            "direct_residual": self.direct_residual,
            "sup_norm": self.sup_norm,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@traced
def verify_harmonic(
    candidate: Union[HarmonicCandidate, TrigPolynomial],
    model: Model,
    grid: TorusGrid,
    tolerance: float = 1e-10,
) -> HarmonicReport:
    """sup |L f| on the grid, through both the Fourier and the direct form."""
    poly = candidate.polynomial() if isinstance(candidate, HarmonicCandidate) else candidate
    if not poly.resolved_by(grid):
        raise HarmonicError("candidate frequencies are not resolved by the grid")
    f = poly.on_grid(grid)
    fourier = float(np.abs(apply_generator_fourier(f, model).values).max())
    triplet = as_symbol(model).underlying_triplet()
    direct = None
    if triplet is not None and triplet.measure.kind is not MeasureKind.DENSITY:
        direct = float(np.abs(apply_generator_direct(poly, triplet, grid.coordinates())).max())
    sup_norm = f.sup_norm()
    bound = tolerance * (1.0 + sup_norm)
    passed = fourier <= bound and (direct is None or direct <= bound)
    return HarmonicReport(fourier, direct, sup_norm, tolerance, passed)


@dataclass(frozen=True)
class DensityConsistency:
    positivity: DensityPositivity
    liouville: bool
    consistent: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "positivity": self.positivity.to_dict(),
            "liouville": self.liouville,
            "consistent": self.consistent,
        }


@traced
def corollary3_consistency(
    model: Model,
    t: float,
    grid: TorusGrid,
    settings: Settings | None = None,
) -> DensityConsistency:
    """A strictly positive periodised density forces the Liouville property."""
    cfg = settings or Settings()
    positivity = positivity_report(transition_density(model, t, grid), cfg.tolerance)
    verdict = decide_liouville(model, settings=cfg)
    consistent = verdict.holds or not positivity.strictly_positive
    return DensityConsistency(positivity, verdict.holds, consistent)

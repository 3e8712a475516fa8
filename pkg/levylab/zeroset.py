"""Zero sets of Lévy symbols and the Liouville verdict.

For a finite discrete measure, psi(xi) = 0 iff Q xi = 0, b_eff.xi = 0 and
b_j.xi in 2 pi Z for every atom, so the zero set is a lattice preimage.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import isqrt
from typing import Any, Iterable, Optional, Sequence, Union

import numpy as np

from levylab import rational as rq
from levylab.bernstein import ZeroClassificationKind, halfplane_zero_classification
from levylab.config import Settings
from levylab.groups import (
    ClosedSubgroup,
    group_sum_closure,
    intersect_groups_with_constraints,
    lattice_preimage,
    orthogonal_subgroup,
    subgroup_from_generators,
    subspace_group,
    trivial_group,
)
from levylab.rational import RationalVector
from levylab.runtime import log_event, traced
from levylab.scan import ScanCandidate, scan_axis, zero_scan_numeric
from levylab.symbol import (
    ClosedFormFamily,
    LevyTriplet,
    MeasureKind,
    SymbolHandle,
    SymbolSource,
    as_symbol,
    effective_drift,
    is_self_adjoint,
    truncate_measure,
)


class ZeroSetError(ValueError):
    pass


class ExactnessError(ZeroSetError):
    pass


class VerdictMethod(str, Enum):
    EXACT = "exact"
    NUMERIC_HEURISTIC = "numeric_heuristic"


def _require_exact(triplet: LevyTriplet) -> None:
    if triplet.measure.kind is MeasureKind.DENSITY:
        raise ExactnessError("exact zero sets need a finite discrete measure")
    if not triplet.is_exact:
        raise ExactnessError("exact zero sets need rational data; use numeric mode")


def zero_set_constraints(triplet: LevyTriplet) -> tuple[list[RationalVector], list[RationalVector]]:
    """(atom rows A, basis of ker Q ∩ b_eff^perp)."""
    _require_exact(triplet)
    n = triplet.dimension
    rows = [tuple(row) for row in triplet.covariance]
    rows.append(tuple(effective_drift(triplet)))
    space = rq.nullspace_basis([rq.vector(r) for r in rows], n)
    atoms = [rq.vector(a.location) for a in triplet.atoms]
    return atoms, space


@traced
def zero_set_exact(triplet: LevyTriplet) -> ClosedSubgroup:
    atoms, space = zero_set_constraints(triplet)
    return lattice_preimage(atoms, space, triplet.dimension)


@dataclass(frozen=True)
class Witness:
    location: tuple[float, ...]
    residual: float

    def to_dict(self) -> dict[str, Any]:
        return {"location": list(self.location), "residual": self.residual}


@dataclass(frozen=True)
class LiouvilleVerdict:
    holds: bool
    method: VerdictMethod
    zero_set: Optional[ClosedSubgroup]
    periodicity_group: Optional[ClosedSubgroup]
    witnesses: tuple[Witness, ...] = ()
    residual_floor: Optional[float] = None
    notes: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict[str, Any]:
        return {
            "holds": self.holds,
            "method": self.method.value,
            "zero_set": None if self.zero_set is None else self.zero_set.to_dict(),
            "periodicity_group": None if self.periodicity_group is None else self.periodicity_group.to_dict(),
            "witnesses": [w.to_dict() for w in self.witnesses],
            "residual_floor": self.residual_floor,
            "notes": list(self.notes),
        }


def _exact_zero_set_of(symbol: SymbolHandle, settings: Settings) -> tuple[Optional[ClosedSubgroup], list[str]]:
    """Exact zero set when one is derivable, else (None, reasons)."""
    if symbol.source is SymbolSource.CLOSED_FORM:
        form = symbol.closed_form
        assert form is not None
        if form.family is ClosedFormFamily.ISOTROPIC_STABLE:
            return trivial_group(symbol.dimension), ["isotropic stable symbol vanishes only at 0"]
    if symbol.source is SymbolSource.SUBORDINATED:
        assert symbol.bernstein is not None and symbol.inner is not None
        inner_set, notes = _exact_zero_set_of(symbol.inner, settings)
        if inner_set is None:
            return None, notes
        classification = halfplane_zero_classification(symbol.bernstein, settings)
        if classification.kind is ZeroClassificationKind.ONLY_ZERO_AT_ORIGIN:
            return inner_set, notes + ["g(i eta) vanishes only at 0, zero set of the inner symbol is kept"]
        inner_triplet = symbol.inner.underlying_triplet()
        if inner_triplet is not None and is_self_adjoint(inner_triplet):
            return inner_set, notes + ["inner symbol is real, g > 0 on (0, inf) keeps the zero set"]
        return None, notes + [f"Bernstein zeros are {classification.kind.value}"]
    triplet = symbol.underlying_triplet()
    if triplet is None:
        return None, ["no triplet available"]
    if triplet.measure.kind is MeasureKind.DENSITY:
        return None, ["density measure: zero set is decided numerically"]
    if not triplet.is_exact:
        return None, ["irrational data: zero set is decided numerically"]
    return zero_set_exact(triplet), []


def _witness_tolerance(settings: Settings, location: np.ndarray) -> float:
    return settings.tolerance * (1.0 + float(np.linalg.norm(location)))


@traced
def decide_liouville(
    model: Union[LevyTriplet, SymbolHandle],
    *,
    numeric: bool = False,
    settings: Settings | None = None,
) -> LiouvilleVerdict:
    cfg = settings or Settings()
    symbol = as_symbol(model, workers=cfg.workers)
    zero_set: Optional[ClosedSubgroup] = None
    notes: list[str] = []
    if not numeric:
        zero_set, notes = _exact_zero_set_of(symbol, cfg)
    if zero_set is None:
        return _numeric_verdict(symbol, cfg, tuple(notes))

    # Witnesses are checked on the innermost symbol: l^alpha turns 1e-16 into 1e-8.
    base = symbol
    while base.source is SymbolSource.SUBORDINATED and base.inner is not None:
        base = base.inner
    witnesses = []
    for location in zero_set.generators():
        residual = abs(base(location))
        if residual > _witness_tolerance(cfg, location):
            raise ZeroSetError(
                f"exact zero set disagrees with the symbol at {location.tolist()}: |psi| = {residual:.3e}"
            )
        witnesses.append(Witness(tuple(float(x) for x in location), residual))
    holds = zero_set.is_trivial
    log_event("liouville_exact", holds=holds, rank=zero_set.lattice_rank, subspace=zero_set.subspace_dimension)
    return LiouvilleVerdict(
        holds=holds,
        method=VerdictMethod.EXACT,
        zero_set=zero_set,
        periodicity_group=orthogonal_subgroup(zero_set),
        witnesses=tuple(witnesses),
        notes=tuple(notes),
    )


def _numeric_verdict(symbol: SymbolHandle, cfg: Settings, notes: tuple[str, ...]) -> LiouvilleVerdict:
    candidates = zero_scan_numeric(
        symbol,
        cfg.scan_halfwidth,
        cfg.scan_step,
        max_points=cfg.scan_max_points,
    )
    _, step = scan_axis(cfg.scan_halfwidth, cfg.scan_step, symbol.dimension, cfg.scan_max_points)
    off_origin = [c for c in candidates if c.norm() > 10 * step]
    hits = [c for c in off_origin if c.residual <= _witness_tolerance(cfg, np.array(c.location))]
    floor = min((c.residual for c in off_origin), default=None)
    witnesses = tuple(Witness(c.location, c.residual) for c in hits)
    holds = not hits
    log_event("liouville_numeric", holds=holds, candidates=len(candidates), witnesses=len(hits))
    return LiouvilleVerdict(
        holds=holds,
        method=VerdictMethod.NUMERIC_HEURISTIC,
        zero_set=trivial_group(symbol.dimension) if holds else None,
        periodicity_group=None,
        witnesses=witnesses,
        residual_floor=floor,
        notes=notes + (f"scan half-width {cfg.scan_halfwidth}, step {step:.6g}",),
    )


def zero_scan(symbol: Union[LevyTriplet, SymbolHandle], settings: Settings | None = None) -> list[ScanCandidate]:
    cfg = settings or Settings()
    return zero_scan_numeric(
        as_symbol(symbol, workers=cfg.workers),
        cfg.scan_halfwidth,
        cfg.scan_step,
        max_points=cfg.scan_max_points,
    )


# --- triplet side of the zero-set identity ---------------------------------


@dataclass(frozen=True)
class TripletCharacterization:
    support_group: ClosedSubgroup
    support_subspace: ClosedSubgroup
    compensator: tuple[Fraction, ...]
    sigma: np.ndarray = field(compare=False)
    sigma_exact: bool
    drift_subspace: ClosedSubgroup
    rhs: ClosedSubgroup

    def to_dict(self) -> dict[str, Any]:
        return {
            "support_group": self.support_group.to_dict(),
            "support_subspace": self.support_subspace.to_dict(),
            "compensator": [rq.format_fraction(x) for x in self.compensator],
            "sigma": self.sigma.tolist(),
            "sigma_exact": self.sigma_exact,
            "drift_subspace": self.drift_subspace.to_dict(),
            "rhs": self.rhs.to_dict(),
        }


def _exact_square_root(q: Fraction) -> Optional[Fraction]:
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    rn, rd = _isqrt(num), _isqrt(den)
    if rn is None or rd is None:
        return None
    return Fraction(rn, rd)


def _isqrt(k: int) -> Optional[int]:
    r = isqrt(k)
    return r if r * r == k else None


def covariance_square_root(triplet: LevyTriplet) -> tuple[np.ndarray, bool]:
    """Symmetric Sigma with Sigma^2 = Q; exact for diagonal Q with rational roots."""
    n = triplet.dimension
    q = triplet.covariance
    diagonal = all(q[i][j] == 0 for i in range(n) for j in range(n) if i != j)
    if diagonal and triplet.is_exact:
        roots = [_exact_square_root(Fraction(q[i][i])) for i in range(n)]
        if all(r is not None for r in roots):
            return np.diag([float(r) for r in roots]), True
    values, vectors = np.linalg.eigh(triplet.covariance_array())
    sigma = vectors @ np.diag(np.sqrt(np.clip(values, 0.0, None))) @ vectors.T
    return sigma, False


@traced
def triplet_characterization(triplet: LevyTriplet) -> TripletCharacterization:
    """G_nu + W_{Sigma, b + c_nu}, with c_nu = sum over small atoms outside V_nu."""
    _require_exact(triplet)
    n = triplet.dimension
    g_nu = subgroup_from_generators([a.location for a in triplet.atoms], n)
    v_nu = subspace_group(g_nu.subspace_basis, n)
    compensator = [Fraction(0)] * n
    for atom in triplet.atoms:
        if atom.is_small() and not _in_subspace(atom.location, v_nu):
            compensator = [c + atom.mass * x for c, x in zip(compensator, atom.location)]
    shifted = [b + c for b, c in zip(triplet.drift, compensator)]
    # range(Sigma) = range(Q), so W is spanned by the columns of Q and b + c_nu.
    w = subspace_group([tuple(row) for row in triplet.covariance] + [tuple(shifted)], n)
    sigma, sigma_exact = covariance_square_root(triplet)
    rhs = group_sum_closure(g_nu, w)
    return TripletCharacterization(
        support_group=g_nu,
        support_subspace=v_nu,
        compensator=tuple(compensator),
        sigma=sigma,
        sigma_exact=sigma_exact,
        drift_subspace=w,
        rhs=rhs,
    )


def _in_subspace(x: Sequence[Any], space: ClosedSubgroup) -> bool:
    return rq.is_zero(rq.project_off(rq.vector(x), space.subspace_basis))


@dataclass(frozen=True)
class CrosscheckResult:
    lhs: ClosedSubgroup
    rhs: ClosedSubgroup
    equal: bool
    characterization: TripletCharacterization

    def to_dict(self) -> dict[str, Any]:
        return {
            "lhs": self.lhs.to_dict(),
            "rhs": self.rhs.to_dict(),
            "equal": self.equal,
            "characterization": self.characterization.to_dict(),
        }


@traced
def crosscheck_corollary2(triplet: LevyTriplet) -> CrosscheckResult:
    """{psi = 0}^perp against G_nu + W_{Sigma, b + c_nu}."""
    lhs = orthogonal_subgroup(zero_set_exact(triplet))
    info = triplet_characterization(triplet)
    equal = lhs == info.rhs
    log_event("crosscheck", equal=equal)
    return CrosscheckResult(lhs, info.rhs, equal, info)


@traced
def truncation_zero_set_check(triplet: LevyTriplet, radii: Iterable[Any]) -> bool:
    """{psi = 0} equals the intersection of the zero sets of the truncated symbols."""
    _require_exact(triplet)
    values = [Fraction(r) if not isinstance(r, Fraction) else r for r in radii]
    if not values:
        raise ZeroSetError("at least one truncation radius is required")
    if any(r < 1 for r in values) or any(b <= a for a, b in zip(values, values[1:])):
        raise ZeroSetError("radii must be increasing and >= 1")
    largest = max((a.norm_squared() for a in triplet.atoms), default=Fraction(0))
    if values[-1] * values[-1] <= largest:
        raise ZeroSetError("the last radius must exceed every atom")
    blocks = [zero_set_constraints(truncate_measure(triplet, r).triplet) for r in values]
    stacked = intersect_groups_with_constraints(blocks, triplet.dimension)
    return stacked == zero_set_exact(triplet)


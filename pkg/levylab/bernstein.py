"""Bernstein functions g(l) = a l + int (1 - e^{-l s}) pi(ds) and their zeros on iR."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from levylab.config import Settings
from levylab.groups import ClosedSubgroup, lattice_preimage
from levylab.runtime import traced
from levylab.scan import ScanCandidate, zero_scan_numeric
from levylab.symbol import Real, coerce_real

_HALFPLANE_SLACK = 1e-12


class BernsteinError(ValueError):
    pass


class BernsteinFamily(str, Enum):
    POWER = "power"
    LOG = "log"
    RESOLVENT = "resolvent"
    SEMIGROUP_COMPLEMENT = "semigroup"
    LINEAR = "linear"
    CUSTOM = "custom"


@dataclass(frozen=True)
class BernsteinAtom:
    mass: Real
    location: Real


@dataclass(frozen=True)
class BernsteinFunction:
    family: BernsteinFamily
    a: Real = Fraction(0)
    atoms: tuple[BernsteinAtom, ...] = ()
    parameter: Optional[Real] = None

    @property
    def has_continuous_measure(self) -> bool:
        return self.family in (BernsteinFamily.POWER, BernsteinFamily.LOG, BernsteinFamily.RESOLVENT)

    def __call__(self, lam: Any) -> Any:
        return eval_bernstein(self, lam)

    def eval_halfplane(self, zeta: Any) -> np.ndarray:
        return eval_halfplane(self, zeta)

    def to_dict(self) -> dict[str, Any]:
        return {
            "family": self.family.value,
            "a": str(self.a),
            "parameter": None if self.parameter is None else str(self.parameter),
            "atoms": [{"mass": str(x.mass), "location": str(x.location)} for x in self.atoms],
        }


def power(alpha: Any) -> BernsteinFunction:
    value = coerce_real(alpha)
    if not 0 < float(value) < 1:
        raise BernsteinError(f"power exponent must lie in (0, 1), got {alpha}")
    return BernsteinFunction(BernsteinFamily.POWER, parameter=value)


def log1p() -> BernsteinFunction:
    return BernsteinFunction(BernsteinFamily.LOG)


def resolvent(tau: Any) -> BernsteinFunction:
    value = coerce_real(tau)
    if not float(value) > 0:
        raise BernsteinError(f"resolvent parameter must be positive, got {tau}")
    return BernsteinFunction(BernsteinFamily.RESOLVENT, parameter=value)


def semigroup_complement(t: Any) -> BernsteinFunction:
    value = coerce_real(t)
    if not float(value) > 0:
        raise BernsteinError(f"semigroup time must be positive, got {t}")
    return BernsteinFunction(
        BernsteinFamily.SEMIGROUP_COMPLEMENT,
        atoms=(BernsteinAtom(Fraction(1), value),),
        parameter=value,
    )


def linear(a: Any) -> BernsteinFunction:
    value = coerce_real(a)
    if not float(value) > 0:
        raise BernsteinError("linear coefficient must be positive")
    return BernsteinFunction(BernsteinFamily.LINEAR, a=value)


def custom(a: Any = 0, atoms: Any = ()) -> BernsteinFunction:
    """a l + sum m_k (1 - e^{-l s_k}) with m_k > 0 and s_k > 0."""
    drift = coerce_real(a)
    items = []
    for index, (mass, location) in enumerate(atoms):
        m, s = coerce_real(mass), coerce_real(location)
        if not float(m) > 0 or not float(s) > 0:
            raise BernsteinError(f"atoms[{index}]: mass and location must be positive")
        items.append(BernsteinAtom(m, s))
    if float(drift) < 0:
        raise BernsteinError("drift coefficient a must be >= 0")
    if float(drift) == 0 and not items:
        raise BernsteinError("the null function is not admitted")
    return BernsteinFunction(BernsteinFamily.CUSTOM, a=drift, atoms=tuple(items))


def _raw(g: BernsteinFunction, z: np.ndarray) -> np.ndarray:
    fam = g.family
    if fam is BernsteinFamily.POWER:
        assert g.parameter is not None
        out = np.zeros_like(z, dtype=complex)
        nonzero = z != 0
        out[nonzero] = np.power(z[nonzero], float(g.parameter))
        return out
    if fam is BernsteinFamily.LOG:
        return np.log1p(z)
    if fam is BernsteinFamily.RESOLVENT:
        assert g.parameter is not None
        return z / (float(g.parameter) + z)
    out = float(g.a) * z
    for atom in g.atoms:
        out = out + float(atom.mass) * -np.expm1(-float(atom.location) * z)
    return out


def eval_bernstein(g: BernsteinFunction, lam: Any) -> Any:
    values = np.asarray(lam, dtype=float)
    if np.any(values < 0):
        raise BernsteinError("Bernstein functions are evaluated on [0, inf)")
    out = _raw(g, values.astype(complex)).real
    return float(out) if out.ndim == 0 else out


def eval_halfplane(g: BernsteinFunction, zeta: Any) -> np.ndarray:
    """Extension to Re zeta >= 0 (principal branches)."""
    z = np.atleast_1d(np.asarray(zeta, dtype=complex))
    slack = _HALFPLANE_SLACK * (1.0 + np.abs(z))
    if np.any(z.real < -slack):
        raise BernsteinError("Bernstein extension needs Re(zeta) >= 0")
    z = np.where(z.real < 0, 1j * z.imag, z)
    return _raw(g, z)


class ZeroClassificationKind(str, Enum):
    ONLY_ZERO_AT_ORIGIN = "only_zero_at_origin"
    LATTICE = "lattice"
    HEURISTIC = "heuristic"


@dataclass(frozen=True)
class ZeroClassification:
    kind: ZeroClassificationKind
    lattice: Optional[ClosedSubgroup] = None
    evidence: tuple[ScanCandidate, ...] = field(default=())

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "lattice": None if self.lattice is None else self.lattice.to_dict(),
            "evidence": [c.to_dict() for c in self.evidence],
        }


@dataclass(frozen=True)
class _ImaginaryAxis:
    g: BernsteinFunction
    dimension: int = 1

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        eta = np.asarray(points, dtype=float).reshape(-1)
        return eval_halfplane(self.g, 1j * eta)


@traced
def halfplane_zero_classification(g: BernsteinFunction, settings: Settings | None = None) -> ZeroClassification:
    """Zeros of eta -> g(i eta).

    a > 0 or an absolutely continuous pi leaves only eta = 0. A discrete pi
    on rational points s_k vanishes exactly on {eta : eta s_k in 2 pi Z}.
    """
    if float(g.a) > 0 or g.has_continuous_measure:
        return ZeroClassification(ZeroClassificationKind.ONLY_ZERO_AT_ORIGIN)
    locations = [atom.location for atom in g.atoms]
    if all(isinstance(s, Fraction) for s in locations):
        group = lattice_preimage([[s] for s in locations], None, 1)
        if group.is_trivial:
            return ZeroClassification(ZeroClassificationKind.ONLY_ZERO_AT_ORIGIN)
        return ZeroClassification(ZeroClassificationKind.LATTICE, group)
    cfg = settings or Settings()
    candidates = zero_scan_numeric(
        _ImaginaryAxis(g),
        cfg.scan_halfwidth,
        cfg.scan_step,
        max_points=cfg.scan_max_points,
    )
    evidence = tuple(c for c in candidates if c.residual <= cfg.tolerance)
    return ZeroClassification(ZeroClassificationKind.HEURISTIC, None, evidence)


def family_from_name(name: str, parameter: Any = None) -> BernsteinFunction:
    key = name.strip().lower()
    if key == BernsteinFamily.POWER.value:
        return power(parameter)
    if key == BernsteinFamily.LOG.value:
        return log1p()
    if key == BernsteinFamily.RESOLVENT.value:
        return resolvent(parameter)
    if key == BernsteinFamily.SEMIGROUP_COMPLEMENT.value:
        return semigroup_complement(parameter)
    if key == BernsteinFamily.LINEAR.value:
        return linear(parameter)
    raise BernsteinError(f"unknown Bernstein family {name!r}")


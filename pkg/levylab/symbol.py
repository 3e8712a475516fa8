"""Lévy triplets and their characteristic exponents.

Convention used throughout the package::

    psi(xi) = -i b.xi + 1/2 Q xi.xi + int (1 - e^{i x.xi} - i x.xi 1_{|x|<1}) nu(dx)

so the effective drift of a finite measure is ``b + sum_{|b_j|<1} a_j b_j``
and the generator satisfies L e^{i xi.x} = -psi(xi) e^{i xi.x}.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING, Any, Callable, Iterable, Optional, Sequence, Union

import numpy as np
from scipy import integrate

from levylab import rational as rq
from levylab.runtime import log_event, traced

if TYPE_CHECKING:  # pragma: no cover
    from levylab.bernstein import BernsteinFunction

Real = Union[Fraction, float]

_DENSITY_MAX_DIMENSION = 3
_PSD_RELATIVE_SLACK = 1e-12
_INEXACT_ZERO_SLACK = 1e-12
_ROUNDING_ULPS = 16.0


class TripletError(ValueError):
    pass


class SymbolError(ValueError):
    pass


class QuadratureError(RuntimeError):
    def __init__(self, message: str, estimate: float) -> None:
        super().__init__(f"{message} (achieved error estimate {estimate:.3e})")
        self.estimate = estimate


def coerce_real(value: Any) -> Real:
    """Exact values stay Fractions; floats stay floats and mark the model inexact."""
    if isinstance(value, bool):
        raise TripletError(f"not a number: {value!r}")
    if isinstance(value, float):
        if not math.isfinite(value):
            raise TripletError(f"non-finite entry: {value!r}")
        return value
    if isinstance(value, (np.floating,)):
        return coerce_real(float(value))
    if isinstance(value, (np.integer,)):
        return Fraction(int(value))
    try:
        return rq.to_fraction(value)
    except rq.RationalityError as exc:
        raise TripletError(str(exc)) from exc


def _is_exact(value: Real) -> bool:
    return isinstance(value, Fraction)


@dataclass(frozen=True)
class Atom:
    mass: Real
    location: tuple[Real, ...]

    @property
    def is_exact(self) -> bool:
        return _is_exact(self.mass) and all(_is_exact(x) for x in self.location)

    def norm_squared(self) -> Real:
        if all(_is_exact(x) for x in self.location):
            return sum((x * x for x in self.location), Fraction(0))
        return float(sum(float(x) ** 2 for x in self.location))

    def is_small(self) -> bool:
        """|location| < 1, decided exactly for rational locations."""
        return self.norm_squared() < 1

    def reflected(self) -> "Atom":
        return Atom(self.mass, tuple(-x for x in self.location))


@dataclass(frozen=True)
class QuadratureConfig:
    inner_depth: int = 8
    tail_radius: float = 50.0
    epsabs: float = 1e-10
    epsrel: float = 1e-10
    limit: int = 200
    max_error: float = 1e-6


class MeasureKind(str, Enum):
    NULL = "null"
    DISCRETE = "discrete"
    DENSITY = "density"


@dataclass(frozen=True)
class LevyMeasure:
    kind: MeasureKind = MeasureKind.NULL
    atoms: tuple[Atom, ...] = ()
    density: Optional[Callable[[np.ndarray], float]] = field(default=None, compare=False)
    quadrature: QuadratureConfig = QuadratureConfig()

    @classmethod
    def null(cls) -> "LevyMeasure":
        return cls()

    @classmethod
    def discrete(cls, atoms: Iterable[Atom | tuple[Any, Sequence[Any]]]) -> "LevyMeasure":
        items = []
        for item in atoms:
            if isinstance(item, Atom):
                items.append(Atom(coerce_real(item.mass), tuple(coerce_real(x) for x in item.location)))
            else:
                mass, location = item
                items.append(Atom(coerce_real(mass), tuple(coerce_real(x) for x in location)))
        if not items:
            return cls()
        return cls(MeasureKind.DISCRETE, tuple(items))

    @classmethod
    def from_density(
        cls,
        density: Callable[[np.ndarray], float],
        quadrature: QuadratureConfig | None = None,
    ) -> "LevyMeasure":
        return cls(MeasureKind.DENSITY, (), density, quadrature or QuadratureConfig())

    @property
    def is_exact(self) -> bool:
        return self.kind is not MeasureKind.DENSITY and all(a.is_exact for a in self.atoms)

    @property
    def total_mass(self) -> Real:
        if self.kind is MeasureKind.DENSITY:
            raise TripletError("total mass of a density measure is not tracked")
        if all(_is_exact(a.mass) for a in self.atoms):
            return sum((a.mass for a in self.atoms), Fraction(0))
        return float(sum(float(a.mass) for a in self.atoms))

    def reflected(self) -> "LevyMeasure":
        if self.kind is MeasureKind.DENSITY:
            inner = self.density
            assert inner is not None
            return replace(self, density=lambda x: inner(-np.asarray(x)))
        return replace(self, atoms=tuple(a.reflected() for a in self.atoms))


@dataclass(frozen=True)
class LevyTriplet:
    drift: tuple[Real, ...]
    covariance: tuple[tuple[Real, ...], ...]
    measure: LevyMeasure = LevyMeasure()

    @property
    def dimension(self) -> int:
        return len(self.drift)

    @property
    def is_exact(self) -> bool:
        entries = list(self.drift) + [q for row in self.covariance for q in row]
        return all(_is_exact(x) for x in entries) and self.measure.is_exact

    @property
    def atoms(self) -> tuple[Atom, ...]:
        return self.measure.atoms

    def drift_array(self) -> np.ndarray:
        return np.array([float(x) for x in self.drift], dtype=float)

    def covariance_array(self) -> np.ndarray:
        n = self.dimension
        return np.array([[float(x) for x in row] for row in self.covariance], dtype=float).reshape(n, n)

    def atom_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(masses (m,), locations (m, n), small-jump mask (m,))."""
        n = self.dimension
        atoms = self.measure.atoms
        masses = np.array([float(a.mass) for a in atoms], dtype=float)
        locations = np.array([[float(x) for x in a.location] for a in atoms], dtype=float).reshape(len(atoms), n)
        small = np.array([a.is_small() for a in atoms], dtype=bool)
        return masses, locations, small


def make_triplet(
    drift: Sequence[Any],
    covariance: Sequence[Sequence[Any]] | None = None,
    measure: LevyMeasure | Iterable[tuple[Any, Sequence[Any]]] | None = None,
) -> LevyTriplet:
    """Coerce entries and symmetrize Q as (Q + Q^T) / 2."""
    b = tuple(coerce_real(x) for x in drift)
    n = len(b)
    if covariance is None:
        q_raw = [[Fraction(0)] * n for _ in range(n)]
    else:
        q_raw = [[coerce_real(x) for x in row] for row in covariance]
    if len(q_raw) != n or any(len(row) != n for row in q_raw):
        raise TripletError(f"covariance must be {n}x{n}")
    q = tuple(tuple((q_raw[i][j] + q_raw[j][i]) / 2 for j in range(n)) for i in range(n))
    if measure is None:
        nu = LevyMeasure.null()
    elif isinstance(measure, LevyMeasure):
        nu = measure
    else:
        nu = LevyMeasure.discrete(measure)
    return LevyTriplet(b, q, nu)


def conjugate_triplet(triplet: LevyTriplet) -> LevyTriplet:
    """Triplet of conj(psi): drift negated, measure reflected."""
    return LevyTriplet(tuple(-x for x in triplet.drift), triplet.covariance, triplet.measure.reflected())


def effective_drift(triplet: LevyTriplet) -> tuple[Real, ...]:
    """b + sum_{|b_j|<1} a_j b_j for finite measures."""
    if triplet.measure.kind is MeasureKind.DENSITY:
        raise TripletError("effective drift needs a finite discrete measure")
    out = list(triplet.drift)
    for atom in triplet.atoms:
        if atom.is_small():
            out = [x + atom.mass * y for x, y in zip(out, atom.location)]
    return tuple(out)


def _is_zero_real(value: Real) -> bool:
    if _is_exact(value):
        return value == 0
    return abs(float(value)) <= _INEXACT_ZERO_SLACK


def is_self_adjoint(triplet: LevyTriplet) -> bool:
    """psi is real-valued: nu symmetric with matching masses and zero effective drift."""
    if triplet.measure.kind is MeasureKind.DENSITY:
        return False
    masses: dict[tuple[Real, ...], Real] = {}
    for atom in triplet.atoms:
        masses[atom.location] = masses.get(atom.location, 0) + atom.mass
    for location, mass in masses.items():
        mirror = tuple(-x for x in location)
        if mirror not in masses or not _is_zero_real(masses[mirror] - mass):
            return False
    return all(_is_zero_real(x) for x in effective_drift(triplet))


# --- validation ---------------------------------------------------------


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    passed: bool
    detail: str = ""
    datum: Any = None


@dataclass
class ValidationReport:
    checks: list[ValidationCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[ValidationCheck]:
        return [c for c in self.checks if not c.passed]

    def add(self, name: str, passed: bool, detail: str = "", datum: Any = None) -> None:
        self.checks.append(ValidationCheck(name, bool(passed), detail, datum))

    def raise_for_failures(self) -> None:
        bad = self.failures()
        if bad:
            joined = "; ".join(f"{c.name}: {c.detail}" for c in bad)
            raise TripletError(joined)

    def to_dict(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail, "datum": _jsonable(c.datum)}
                for c in self.checks
            ],
        }


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return rq.format_fraction(value)
    if isinstance(value, (tuple, list)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


@traced
def validate_triplet(triplet: LevyTriplet) -> ValidationReport:
    report = ValidationReport()
    n = triplet.dimension
    shape_ok = n >= 1 and len(triplet.covariance) == n and all(len(row) == n for row in triplet.covariance)
    report.add("dimension", shape_ok, "" if shape_ok else f"drift has length {n}, covariance must be {n}x{n}", n)
    if not shape_ok:
        return report

    entries = [float(x) for x in triplet.drift] + [float(x) for row in triplet.covariance for x in row]
    finite = all(math.isfinite(x) for x in entries)
    report.add("finite_entries", finite, "" if finite else "drift or covariance has non-finite entries")
    if not finite:
        return report

    symmetric = all(
        triplet.covariance[i][j] == triplet.covariance[j][i] for i in range(n) for j in range(n)
    )
    report.add("covariance_symmetric", symmetric, "" if symmetric else "covariance is not symmetric")

    q = triplet.covariance_array()
    eigenvalues = np.linalg.eigvalsh((q + q.T) / 2)
    min_eig = float(eigenvalues.min())
    slack = _PSD_RELATIVE_SLACK * max(1.0, float(np.abs(eigenvalues).max()))
    psd = min_eig >= -slack
    report.add(
        "covariance_psd",
        psd,
        "" if psd else f"covariance has negative eigenvalue {min_eig:.6g}",
        min_eig,
    )

    nu = triplet.measure
    if nu.kind is MeasureKind.DENSITY:
        _validate_density(triplet, report)
        return report

    seen: set[tuple[Real, ...]] = set()
    for index, atom in enumerate(nu.atoms):
        path = f"atoms[{index}]"
        if len(atom.location) != n:
            report.add("atom_dimension", False, f"{path}: location has length {len(atom.location)}, expected {n}", index)
            continue
        if not float(atom.mass) > 0 or not math.isfinite(float(atom.mass)):
            report.add("atom_mass_positive", False, f"{path}: mass must be positive", (index, atom.mass))
        if all(_is_zero_real(x) for x in atom.location):
            report.add("atom_location_nonzero", False, f"{path}: atom at the origin", index)
        if atom.location in seen:
            report.add("atom_locations_distinct", False, f"{path}: repeated location", index)
        seen.add(atom.location)
    if not report.failures():
        total = nu.total_mass
        report.add("levy_integrability", True, f"finite measure with total mass {total}", total)
    return report


def _validate_density(triplet: LevyTriplet, report: ValidationReport) -> None:
    n = triplet.dimension
    if n > _DENSITY_MAX_DIMENSION:
        report.add("density_dimension", False, f"density measures are supported up to dimension {_DENSITY_MAX_DIMENSION}", n)
        return
    nu = triplet.measure
    cfg = nu.quadrature
    density = nu.density
    assert density is not None
    try:
        inner, e1 = _shell_sum(lambda x: float(np.dot(x, x)) * density(x), n, cfg)
        outer, e2 = _radial_integral(lambda x: density(x), 1.0, math.inf, n, cfg)
        moment, e3 = _inner_first_moment(density, n, cfg)
    except QuadratureError as exc:
        report.add("levy_integrability", False, str(exc), exc.estimate)
        return
    value = inner.real + outer.real
    ok = math.isfinite(value) and max(e1, e2) <= cfg.max_error * max(1.0, value)
    report.add("levy_integrability", ok, f"int min(|x|^2,1) nu(dx) = {value:.6g}", value)
    moment_ok = all(math.isfinite(m) for m in moment) and e3 <= cfg.max_error * max(1.0, float(np.abs(moment).max(initial=0.0)))
    report.add("inner_first_moment", moment_ok, "" if moment_ok else "principal-value first moment on |x|<1 diverges", list(moment))


# --- quadrature ----------------------------------------------------------


def _complex_quad(fn: Callable[[np.ndarray], complex], ranges: list[tuple[float, float]], jacobian, cfg: QuadratureConfig, to_point) -> tuple[complex, float]:
    opts = {"epsabs": cfg.epsabs, "epsrel": cfg.epsrel, "limit": cfg.limit}
    if len(ranges) == 1:
        lo, hi = ranges[0]
        re, err_re = integrate.quad(lambda r: (jacobian(r) * fn(to_point(r))).real, lo, hi, **opts)
        im, err_im = integrate.quad(lambda r: (jacobian(r) * fn(to_point(r))).imag, lo, hi, **opts)
        return complex(re, im), err_re + err_im

    def real_part(*coords):
        return (jacobian(*coords) * fn(to_point(*coords))).real

    def imag_part(*coords):
        return (jacobian(*coords) * fn(to_point(*coords))).imag

    nopts = {"epsabs": cfg.epsabs, "epsrel": cfg.epsrel, "limit": cfg.limit}
    re, err_re = integrate.nquad(real_part, ranges, opts=nopts)
    im, err_im = integrate.nquad(imag_part, ranges, opts=nopts)
    return complex(re, im), err_re + err_im


def _radial_integral(fn: Callable[[np.ndarray], complex], r0: float, r1: float, n: int, cfg: QuadratureConfig) -> tuple[complex, float]:
    """int over r0 < |x| < r1 of fn(x) dx in polar coordinates."""
    if n == 1:
        total = 0j
        err = 0.0
        for sign in (1.0, -1.0):
            value, e = _complex_quad(fn, [(r0, r1)], lambda r: 1.0, cfg, lambda r, s=sign: np.array([s * r]))
            total += value
            err += e
        return total, err
    if n == 2:
        return _complex_quad(
            fn,
            [(0.0, 2 * math.pi), (r0, r1)],
            lambda theta, r: r,
            cfg,
            lambda theta, r: np.array([r * math.cos(theta), r * math.sin(theta)]),
        )
    return _complex_quad(
        fn,
        [(0.0, 2 * math.pi), (0.0, math.pi), (r0, r1)],
        lambda phi, theta, r: r * r * math.sin(theta),
        cfg,
        lambda phi, theta, r: np.array(
            [r * math.sin(theta) * math.cos(phi), r * math.sin(theta) * math.sin(phi), r * math.cos(theta)]
        ),
    )


def _shell_sum(fn: Callable[[np.ndarray], complex], n: int, cfg: QuadratureConfig) -> tuple[complex, float]:
    """int over |x| < 1 split into dyadic shells."""
    total = 0j
    err = 0.0
    edges = [2.0 ** (-k) for k in range(cfg.inner_depth + 1)] + [0.0]
    for hi, lo in zip(edges, edges[1:]):
        value, e = _radial_integral(fn, lo, hi, n, cfg)
        total += value
        err += e
    return total, err


def _inner_first_moment(density: Callable[[np.ndarray], float], n: int, cfg: QuadratureConfig) -> tuple[np.ndarray, float]:
    moment = np.zeros(n)
    err = 0.0
    for axis in range(n):
        # x and -x pair up inside every shell, so odd parts cancel before integration.
        value, e = _shell_sum(
            lambda x, a=axis: 0.5 * x[a] * (density(x) - density(-x)),
            n,
            cfg,
        )
        moment[axis] = value.real
        err += e
    return moment, err


def _density_exponent(triplet: LevyTriplet, xi: np.ndarray) -> complex:
    nu = triplet.measure
    cfg = nu.quadrature
    density = nu.density
    assert density is not None
    n = triplet.dimension

    def compensated(x: np.ndarray) -> complex:
        phase = float(np.dot(x, xi))
        return (1.0 - np.exp(1j * phase) + 1j * phase) * density(x)

    def plain(x: np.ndarray) -> complex:
        return (1.0 - np.exp(1j * float(np.dot(x, xi)))) * density(x)

    inner, e1 = _shell_sum(compensated, n, cfg)
    outer, e2 = _radial_integral(plain, 1.0, cfg.tail_radius, n, cfg)
    moment, e3 = _inner_first_moment(density, n, cfg)
    err = e1 + e2 + e3 * float(np.linalg.norm(xi))
    if not err <= cfg.max_error:
        raise QuadratureError(f"density quadrature did not converge at xi={xi.tolist()}", err)
    return inner + outer - 2j * float(np.dot(moment, xi))


def density_tail_mass(triplet: LevyTriplet, radius: float) -> float:
    nu = triplet.measure
    density = nu.density
    assert density is not None
    value, err = _radial_integral(lambda x: density(x), radius, math.inf, triplet.dimension, nu.quadrature)
    if not err <= nu.quadrature.max_error:
        raise QuadratureError(f"tail mass beyond radius {radius} did not converge", err)
    return float(value.real)


# --- evaluation ----------------------------------------------------------


def _triplet_exponent(triplet: LevyTriplet, xi: np.ndarray, workers: Optional[int] = None) -> np.ndarray:
    """Vectorised psi over points of shape (P, n)."""
    b = triplet.drift_array()
    q = triplet.covariance_array()
    value = -1j * (xi @ b) + 0.5 * np.einsum("pi,ij,pj->p", xi, q, xi)
    nu = triplet.measure
    if nu.kind is MeasureKind.DISCRETE:
        masses, locations, small = triplet.atom_arrays()
        phase = xi @ locations.T
        value = value + ((1.0 - np.exp(1j * phase) - 1j * phase * small) * masses).sum(axis=1)
    elif nu.kind is MeasureKind.DENSITY:
        if len(xi) > 1 and (workers is None or workers > 1):
            with ThreadPoolExecutor(max_workers=workers) as pool:
                extra = np.array(list(pool.map(lambda p: _density_exponent(triplet, p), xi)), dtype=complex)
        else:
            extra = np.array([_density_exponent(triplet, p) for p in xi], dtype=complex)
        value = value + extra
    return np.asarray(value, dtype=complex)


def _triplet_rounding_floor(triplet: LevyTriplet, xi: np.ndarray) -> np.ndarray:
    """Bound on the float error of ``_triplet_exponent`` at each point; 0 for density measures."""
    if triplet.measure.kind is MeasureKind.DENSITY:
        return np.zeros(len(xi))
    ax = np.abs(xi)
    size = ax @ np.abs(triplet.drift_array()) + 0.5 * np.einsum("pi,ij,pj->p", ax, np.abs(triplet.covariance_array()), ax)
    if triplet.measure.kind is MeasureKind.DISCRETE:
        masses, locations, small = triplet.atom_arrays()
        phase = ax @ np.abs(locations).T
        size = size + ((2.0 + phase * (1.0 + small)) * masses).sum(axis=1)
    return _ROUNDING_ULPS * np.finfo(float).eps * size


class SymbolSource(str, Enum):
    TRIPLET = "triplet"
    CLOSED_FORM = "closed_form"
    SUBORDINATED = "subordinated"


class ClosedFormFamily(str, Enum):
    ISOTROPIC_STABLE = "stable"
    BROWNIAN_WITH_DRIFT = "brownian"
    PURE_DRIFT = "drift"


@dataclass(frozen=True)
class ClosedForm:
    family: ClosedFormFamily
    dimension: int
    alpha: Optional[Real] = None
    scale: Real = Fraction(1)
    drift: tuple[Real, ...] = ()
    covariance: tuple[tuple[Real, ...], ...] = ()

    def to_triplet(self) -> Optional[LevyTriplet]:
        if self.family is ClosedFormFamily.ISOTROPIC_STABLE:
            return None
        drift = self.drift or tuple(Fraction(0) for _ in range(self.dimension))
        cov = self.covariance if self.family is ClosedFormFamily.BROWNIAN_WITH_DRIFT else None
        return make_triplet(drift, cov or None)


def isotropic_stable(dimension: int, alpha: Any, scale: Any = 1) -> "SymbolHandle":
    a = coerce_real(alpha)
    if not 0 < float(a) <= 2:
        raise SymbolError(f"stable index must lie in (0, 2], got {alpha}")
    if not float(coerce_real(scale)) > 0:
        raise SymbolError("stable scale must be positive")
    form = ClosedForm(ClosedFormFamily.ISOTROPIC_STABLE, dimension, a, coerce_real(scale))
    return SymbolHandle.from_closed_form(form)


def brownian_with_drift(drift: Sequence[Any], covariance: Sequence[Sequence[Any]]) -> "SymbolHandle":
    t = make_triplet(drift, covariance)
    form = ClosedForm(ClosedFormFamily.BROWNIAN_WITH_DRIFT, t.dimension, drift=t.drift, covariance=t.covariance)
    return SymbolHandle.from_closed_form(form)


def pure_drift(drift: Sequence[Any]) -> "SymbolHandle":
    t = make_triplet(drift)
    return SymbolHandle.from_closed_form(ClosedForm(ClosedFormFamily.PURE_DRIFT, t.dimension, drift=t.drift))


@dataclass(frozen=True)
class SymbolHandle:
    source: SymbolSource
    dimension: int
    triplet: Optional[LevyTriplet] = None
    closed_form: Optional[ClosedForm] = None
    bernstein: Optional["BernsteinFunction"] = None
    inner: Optional["SymbolHandle"] = None
    workers: Optional[int] = field(default=None, compare=False)

    @classmethod
    def from_triplet(cls, triplet: LevyTriplet, *, workers: Optional[int] = None) -> "SymbolHandle":
        validate_triplet(triplet).raise_for_failures()
        return cls(SymbolSource.TRIPLET, triplet.dimension, triplet=triplet, workers=workers)._checked()

    @classmethod
    def from_closed_form(cls, form: ClosedForm) -> "SymbolHandle":
        if form.family is not ClosedFormFamily.ISOTROPIC_STABLE:
            triplet = form.to_triplet()
            assert triplet is not None
            validate_triplet(triplet).raise_for_failures()
        return cls(SymbolSource.CLOSED_FORM, form.dimension, closed_form=form)._checked()

    @classmethod
    def subordinated(cls, bernstein: "BernsteinFunction", inner: "SymbolHandle") -> "SymbolHandle":
        return cls(SymbolSource.SUBORDINATED, inner.dimension, bernstein=bernstein, inner=inner)._checked()

    def _checked(self) -> "SymbolHandle":
        at_origin = self.evaluate(np.zeros((1, self.dimension)))[0]
        if at_origin != 0:
            raise SymbolError(f"psi(0) must be exactly 0, got {at_origin}")
        return self

    def underlying_triplet(self) -> Optional[LevyTriplet]:
        if self.triplet is not None:
            return self.triplet
        if self.closed_form is not None:
            return self.closed_form.to_triplet()
        return None

    def evaluate(self, points: Any) -> np.ndarray:
        xi = np.asarray(points, dtype=float)
        if xi.ndim == 1 and xi.size % self.dimension == 0:
            xi = xi.reshape(-1, self.dimension)
        if xi.ndim != 2 or xi.shape[1] != self.dimension:
            raise SymbolError(f"expected points of dimension {self.dimension}, got shape {np.shape(points)}")
        if self.source is SymbolSource.TRIPLET:
            assert self.triplet is not None
            return _triplet_exponent(self.triplet, xi, self.workers)
        if self.source is SymbolSource.CLOSED_FORM:
            assert self.closed_form is not None
            return _closed_form_exponent(self.closed_form, xi)
        assert self.bernstein is not None and self.inner is not None
        inner = self.inner.evaluate(xi)
        # g is not Lipschitz at 0: inner values within rounding of zero are exact zeros.
        inner = np.where(np.abs(inner) <= self.inner.rounding_floor(xi), 0.0, inner)
        return np.asarray(self.bernstein.eval_halfplane(inner), dtype=complex)

    def rounding_floor(self, points: Any) -> np.ndarray:
        """Per-point bound on the float error of ``evaluate``, used to recognise exact zeros."""
        xi = np.asarray(points, dtype=float).reshape(-1, self.dimension)
        if self.source is SymbolSource.TRIPLET:
            assert self.triplet is not None
            return _triplet_rounding_floor(self.triplet, xi)
        if self.source is SymbolSource.CLOSED_FORM:
            assert self.closed_form is not None
            triplet = self.closed_form.to_triplet()
            if triplet is not None:
                return _triplet_rounding_floor(triplet, xi)
        # stable exponents vanish only at the origin; subordinated zeros are already exact
        return np.zeros(len(xi))

    def __call__(self, xi: Sequence[float]) -> complex:
        return complex(self.evaluate(np.asarray(xi, dtype=float).reshape(1, self.dimension))[0])

    def describe(self) -> str:
        if self.source is SymbolSource.TRIPLET:
            return "triplet"
        if self.source is SymbolSource.CLOSED_FORM:
            assert self.closed_form is not None
            return f"closed form ({self.closed_form.family.value})"
        assert self.bernstein is not None and self.inner is not None
        return f"subordinated ({self.bernstein.family.value} of {self.inner.describe()})"


def _closed_form_exponent(form: ClosedForm, xi: np.ndarray) -> np.ndarray:
    if form.family is ClosedFormFamily.ISOTROPIC_STABLE:
        assert form.alpha is not None
        norms = np.linalg.norm(xi, axis=1)
        return (float(form.scale) * norms ** float(form.alpha)).astype(complex)
    triplet = form.to_triplet()
    assert triplet is not None
    return _triplet_exponent(triplet, xi)


def as_symbol(model: Union[LevyTriplet, SymbolHandle], *, workers: Optional[int] = None) -> SymbolHandle:
    if isinstance(model, SymbolHandle):
        return model
    if isinstance(model, LevyTriplet):
        return SymbolHandle.from_triplet(model, workers=workers)
    raise SymbolError(f"expected a LevyTriplet or SymbolHandle, got {type(model).__name__}")


def eval_symbol(model: Union[LevyTriplet, SymbolHandle], xi: Sequence[float]) -> complex:
    return as_symbol(model)(xi)


# --- truncation and reduction -------------------------------------------


@dataclass(frozen=True)
class TruncatedTriplet:
    triplet: LevyTriplet
    radius: Real
    error_bound: float
    removed: tuple[Atom, ...] = ()


@traced
def truncate_measure(triplet: LevyTriplet, radius: Any) -> TruncatedTriplet:
    """Drop jumps with |x| >= radius; sup |psi - psi_n| <= 2 nu(|x| >= radius)."""
    r = coerce_real(radius)
    if not float(r) >= 1:
        raise TripletError(f"truncation radius must be >= 1, got {radius}")
    nu = triplet.measure
    if nu.kind is MeasureKind.DENSITY:
        cfg = replace(nu.quadrature, tail_radius=min(nu.quadrature.tail_radius, float(r)))
        bound = 2.0 * density_tail_mass(triplet, float(r))
        truncated = replace(triplet, measure=replace(nu, quadrature=cfg))
        return TruncatedTriplet(truncated, r, bound)
    kept, removed = [], []
    r2 = r * r
    for atom in nu.atoms:
        (removed if atom.norm_squared() >= r2 else kept).append(atom)
    measure = LevyMeasure(MeasureKind.DISCRETE, tuple(kept)) if kept else LevyMeasure.null()
    bound = 2.0 * float(sum(float(a.mass) for a in removed))
    log_event("truncate", radius=str(r), kept=len(kept), removed=len(removed))
    return TruncatedTriplet(replace(triplet, measure=measure), r, bound, tuple(removed))


@dataclass(frozen=True)
class BoundedReduction:
    bounded: bool
    measure: Optional[LevyMeasure] = None
    reason: str = ""


def bounded_reduction(triplet: LevyTriplet) -> BoundedReduction:
    """psi = int (1 - e^{ix.xi}) nu(dx) exactly when Q = 0, nu finite and b_eff = 0."""
    if triplet.measure.kind is MeasureKind.DENSITY:
        return BoundedReduction(False, reason="density measures are not treated as finite")
    if not all(_is_zero_real(q) for row in triplet.covariance for q in row):
        return BoundedReduction(False, reason="covariance is nonzero")
    if not all(_is_zero_real(x) for x in effective_drift(triplet)):
        return BoundedReduction(False, reason="effective drift is nonzero")
    return BoundedReduction(True, triplet.measure)


def random_frequencies(dimension: int, count: int, seed: int = 0, spread: float = 10.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.normal(scale=spread, size=(count, dimension))

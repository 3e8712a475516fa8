"""Closed subgroups of R^n and the operations the zero-set analysis needs.

A group is stored as ``E (+) Lambda``: a subspace E (reduced row echelon
basis) and a lattice Lambda orthogonal to E (Hermite normal form basis).
Lattice vectors are exact rationals multiplied by a common ``Scale``, either
1 or 2*pi, so that zero sets such as 2*pi*Z stay exact. Sums of groups of
different scales carry a second lattice at the other scale; its span meets
the first lattice's span only in 0, and the first lattice then has scale 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Iterable, List, Sequence

import numpy as np

from levylab import rational as rq
from levylab.rational import RationalityError, RationalVector
from levylab.runtime import traced


class GroupAlgebraError(ValueError):
    pass


class IncommensurableError(GroupAlgebraError):
    pass


class Scale(str, Enum):
    UNIT = "1"
    TWO_PI = "2pi"

    @property
    def factor(self) -> float:
        return 1.0 if self is Scale.UNIT else 2.0 * math.pi

    def toggled(self) -> "Scale":
        return Scale.TWO_PI if self is Scale.UNIT else Scale.UNIT


@dataclass(frozen=True)
class ClosedSubgroup:
    dimension: int
    subspace_basis: tuple[RationalVector, ...] = ()
    lattice_basis: tuple[RationalVector, ...] = ()
    scale: Scale = Scale.UNIT
    cross_lattice_basis: tuple[RationalVector, ...] = ()

    @property
    def subspace_dimension(self) -> int:
        return len(self.subspace_basis)

    @property
    def lattice_rank(self) -> int:
        return len(self.lattice_basis) + len(self.cross_lattice_basis)

    @property
    def is_trivial(self) -> bool:
        return not self.subspace_basis and not self.lattice_basis and not self.cross_lattice_basis

    @property
    def is_full(self) -> bool:
        return self.subspace_dimension == self.dimension

    def subspace_array(self) -> np.ndarray:
        return np.array([[float(x) for x in v] for v in self.subspace_basis], dtype=float).reshape(-1, self.dimension)

    def lattice_array(self) -> np.ndarray:
        """Lattice generators as floats, scales applied."""
        rows = [[float(x) * self.scale.factor for x in v] for v in self.lattice_basis]
        rows += [[float(x) * self.scale.toggled().factor for x in v] for v in self.cross_lattice_basis]
        return np.array(rows, dtype=float).reshape(-1, self.dimension)

    def generators(self) -> list[np.ndarray]:
        return [row for row in self.subspace_array()] + [row for row in self.lattice_array()]

    def to_dict(self) -> dict[str, Any]:
        return {
            "dimension": self.dimension,
            "subspace": [[rq.format_fraction(x) for x in v] for v in self.subspace_basis],
            "lattice": [[rq.format_fraction(x) for x in v] for v in self.lattice_basis],
            "cross_lattice": [[rq.format_fraction(x) for x in v] for v in self.cross_lattice_basis],
            "scale": self.scale.value,
            "text": format_group(self),
        }


def canonical_group(
    dimension: int,
    subspace: Iterable[Sequence[Any]] = (),
    lattice: Iterable[Sequence[Any]] = (),
    scale: Scale = Scale.UNIT,
    cross_lattice: Iterable[Sequence[Any]] = (),
) -> ClosedSubgroup:
    """Canonical form of E (+) scale*Z<lattice> (+) other_scale*Z<cross_lattice>."""
    if dimension < 1:
        raise GroupAlgebraError("dimension must be >= 1")
    sub = [_checked_vector(v, dimension) for v in subspace]
    lat = [_checked_vector(v, dimension) for v in lattice]
    other = [_checked_vector(v, dimension) for v in cross_lattice]
    e = rq.row_space_basis(sub, dimension)
    basis = rq.lattice_basis([rq.project_off(v, e) for v in lat], dimension)
    cross = rq.lattice_basis([rq.project_off(v, e) for v in other], dimension)
    scale = Scale(scale)
    if not basis:
        basis, cross, scale = cross, [], scale.toggled()
    if not basis:
        scale = Scale.UNIT
    if cross:
        if len(rq.row_space_basis(basis + cross, dimension)) < len(basis) + len(cross):
            raise IncommensurableError("lattices at scales 1 and 2*pi share a direction; the group is not closed")
        if scale is Scale.TWO_PI:
            basis, cross, scale = cross, basis, Scale.UNIT
    return ClosedSubgroup(dimension, tuple(e), tuple(basis), scale, tuple(cross))


def _checked_vector(v: Sequence[Any], dimension: int) -> RationalVector:
    if len(v) != dimension:
        raise GroupAlgebraError(f"vector {tuple(v)!r} has length {len(v)}, expected {dimension}")
    try:
        return rq.vector(v)
    except RationalityError as exc:
        raise RationalityError(f"non-rational generator {tuple(v)!r}: {exc}") from exc


def trivial_group(dimension: int) -> ClosedSubgroup:
    return canonical_group(dimension)


def full_space(dimension: int) -> ClosedSubgroup:
    identity = [[int(i == j) for j in range(dimension)] for i in range(dimension)]
    return canonical_group(dimension, identity)


def subspace_group(basis: Iterable[Sequence[Any]], dimension: int) -> ClosedSubgroup:
    return canonical_group(dimension, basis)


def subgroup_from_generators(vectors: Iterable[Sequence[Any]], dimension: int) -> ClosedSubgroup:
    """Closure of the group generated by rational vectors (a lattice, scale 1)."""
    return canonical_group(dimension, (), list(vectors), Scale.UNIT)


def _integer_preimage(
    constraints: Sequence[RationalVector],
    space: Sequence[RationalVector],
    dimension: int,
) -> tuple[list[RationalVector], list[RationalVector]]:
    """{xi in span(space) : c.xi in Z for every constraint row c}, as (subspace, lattice)."""
    b = rq.row_space_basis(space, dimension)
    if not b:
        return [], []
    d = len(b)
    m = [tuple(rq.dot(c, bi) for bi in b) for c in constraints]
    kernel = rq.nullspace_basis(m, d)
    row_lattice = rq.lattice_basis(m, d)
    dual = rq.dual_basis(row_lattice, d)

    def lift(t: Sequence[Fraction]) -> RationalVector:
        out = tuple(Fraction(0) for _ in range(dimension))
        for coeff, bi in zip(t, b):
            out = rq.add(out, rq.scale(coeff, bi))
        return out

    return [lift(k) for k in kernel], [lift(t) for t in dual]


@traced
def lattice_preimage(
    constraints: Iterable[Sequence[Any]],
    space: Iterable[Sequence[Any]] | None,
    dimension: int,
) -> ClosedSubgroup:
    """{xi in S : A xi in 2*pi*Z^m}; S defaults to R^n."""
    rows = [_checked_vector(r, dimension) for r in constraints]
    if space is None:
        basis = [tuple(Fraction(int(i == j)) for j in range(dimension)) for i in range(dimension)]
    else:
        basis = [_checked_vector(v, dimension) for v in space]
    sub, lat = _integer_preimage(rows, basis, dimension)
    return canonical_group(dimension, sub, lat, Scale.TWO_PI)


@traced
def orthogonal_subgroup(group: ClosedSubgroup) -> ClosedSubgroup:
    """G^perp = {xi : xi.x in 2*pi*Z for all x in G}."""
    n = group.dimension
    if not group.cross_lattice_basis:
        complement = rq.orthogonal_complement(group.subspace_basis, n)
        sub, lat = _integer_preimage(list(group.lattice_basis), complement, n)
        return canonical_group(n, sub, lat, group.scale.toggled())
    # scale-1 vectors need xi.l in 2*pi*Z, 2*pi vectors need xi.l in Z
    unit = list(group.lattice_basis)
    combined = unit + list(group.cross_lattice_basis)
    dual = rq.dual_basis(combined, n)
    free = rq.nullspace_basis(combined + list(group.subspace_basis), n)
    return canonical_group(n, free, dual[len(unit):], Scale.UNIT, dual[: len(unit)])


def _span_intersection(first: Sequence[RationalVector], second: Sequence[RationalVector], n: int) -> list[RationalVector]:
    a = rq.row_space_basis(first, n)
    b = rq.row_space_basis(second, n)
    if not a or not b:
        return []
    # sum s_i a_i = sum t_j b_j  <=>  (s, t) in the kernel of [A^T | -B^T]
    columns = list(a) + [rq.scale(Fraction(-1), v) for v in b]
    rows = [tuple(col[i] for col in columns) for i in range(n)]
    out = []
    for k in rq.nullspace_basis(rows, len(columns)):
        x = tuple(Fraction(0) for _ in range(n))
        for coeff, ai in zip(k, a):
            x = rq.add(x, rq.scale(coeff, ai))
        out.append(x)
    return rq.row_space_basis(out, n)


@traced
def group_sum_closure(first: ClosedSubgroup, second: ClosedSubgroup) -> ClosedSubgroup:
    """Closure of G1 + G2.

    Lattices of equal scale add exactly. Along a rational direction shared by
    a scale-1 and a 2*pi lattice the sum is dense, so that direction joins E.
    """
    if first.dimension != second.dimension:
        raise GroupAlgebraError("groups live in different dimensions")
    n = first.dimension
    unit: list[RationalVector] = []
    two_pi: list[RationalVector] = []
    for g in (first, second):
        primary, other = (unit, two_pi) if g.scale is Scale.UNIT else (two_pi, unit)
        primary.extend(g.lattice_basis)
        other.extend(g.cross_lattice_basis)
    e = rq.row_space_basis(list(first.subspace_basis) + list(second.subspace_basis), n)
    unit = [rq.project_off(v, e) for v in unit]
    two_pi = [rq.project_off(v, e) for v in two_pi]
    dense = _span_intersection(unit, two_pi, n)
    if dense:
        e = rq.row_space_basis(e + dense, n)
    return canonical_group(n, e, unit, Scale.UNIT, two_pi)


def _lattice_in_space(
    lam: Sequence[RationalVector],
    e: Sequence[RationalVector],
    constraints: Sequence[RationalVector],
    n: int,
) -> list[RationalVector]:
    """Z-combinations of ``lam`` that some vector of E moves into {C x = 0}."""
    if not lam:
        return []
    # coordinates: x = E^T a + Lambda^T z, constraint C x = 0
    ce = [tuple(rq.dot(c, ei) for ei in e) for c in constraints]
    ce_cols = [tuple(row[j] for row in ce) for j in range(len(e))]
    col_basis = rq.row_space_basis(ce_cols, len(constraints))
    n_cols = [tuple(rq.dot(c, lj) for c in constraints) for lj in lam]
    n_prime_cols = [rq.project_off(col, col_basis) for col in n_cols]
    n_prime_rows = [tuple(col[i] for col in n_prime_cols) for i in range(len(constraints))]
    lattice = []
    for z in rq.integer_kernel(n_prime_rows, len(lam)):
        x = tuple(Fraction(0) for _ in range(n))
        for coeff, lj in zip(z, lam):
            x = rq.add(x, rq.scale(coeff, lj))
        if e:
            rhs = tuple(-rq.dot(c, x) for c in constraints)
            a = rq.solve_any(ce, rhs, len(e))
            for coeff, ei in zip(a, e):
                x = rq.add(x, rq.scale(coeff, ei))
        lattice.append(x)
    return lattice


@traced
def intersect_subspace(group: ClosedSubgroup, space: Iterable[Sequence[Any]]) -> ClosedSubgroup:
    n = group.dimension
    s = rq.row_space_basis([_checked_vector(v, n) for v in space], n)
    constraints = rq.orthogonal_complement(s, n)
    if not constraints:
        return group
    e = list(group.subspace_basis)
    ce = [tuple(rq.dot(c, ei) for ei in e) for c in constraints]
    e_in_s = []
    for a in rq.nullspace_basis(ce, len(e)) if e else []:
        v = tuple(Fraction(0) for _ in range(n))
        for coeff, ei in zip(a, e):
            v = rq.add(v, rq.scale(coeff, ei))
        e_in_s.append(v)
    # 2*pi is irrational, so the two lattices meet the constraints separately
    lattice = _lattice_in_space(group.lattice_basis, e, constraints, n)
    cross = _lattice_in_space(group.cross_lattice_basis, e, constraints, n)
    return canonical_group(n, e_in_s, lattice, group.scale, cross)


def intersect_groups_with_constraints(
    blocks: Sequence[tuple[Sequence[RationalVector], Sequence[RationalVector]]],
    dimension: int,
) -> ClosedSubgroup:
    """Intersection of several preimages {xi in S_k : A_k xi in 2*pi*Z}."""
    rows: list[RationalVector] = []
    complements: list[RationalVector] = []
    for constraints, space in blocks:
        rows.extend(constraints)
        complements.extend(rq.orthogonal_complement(rq.row_space_basis(space, dimension), dimension))
    space = rq.nullspace_basis(complements, dimension)
    return lattice_preimage(rows, space, dimension)


def member(group: ClosedSubgroup, x: Sequence[Any], scale: Scale = Scale.UNIT) -> bool:
    """Exact membership of ``scale * x`` in the group."""
    v = _checked_vector(x, group.dimension)
    p = rq.project_off(v, group.subspace_basis)
    if rq.is_zero(p):
        return True
    basis = group.lattice_basis if scale is group.scale else group.cross_lattice_basis
    if not basis:
        return False
    coords = rq.lattice_coordinates(basis, p)
    return coords is not None and all(c.denominator == 1 for c in coords)


def equals(first: ClosedSubgroup, second: ClosedSubgroup) -> bool:
    return first == second


def distance_to(group: ClosedSubgroup, x: Sequence[float]) -> float:
    """Euclidean distance from a float point to the group.

    The lattice part is searched over the 2^r corners of the fundamental cell
    containing the point. That is an upper bound in general and exact when each
    lattice coordinate of the point is within 1 of the nearest group point
    (always the case for orthogonal bases and for points near the group).
    """
    point = np.asarray(x, dtype=float).reshape(group.dimension)
    sub = group.subspace_array()
    if len(sub):
        q, _ = np.linalg.qr(sub.T)
        point = point - q @ (q.T @ point)
    lat = group.lattice_array()
    if len(lat):
        lat_perp = lat
        if len(sub):
            lat_perp = lat - (lat @ q) @ q.T
        coeffs, *_ = np.linalg.lstsq(lat_perp.T, point, rcond=None)
        best = math.inf
        base = np.floor(coeffs)
        for corner in np.ndindex(*(2,) * len(coeffs)):
            candidate = base + np.array(corner)
            best = min(best, float(np.linalg.norm(point - lat_perp.T @ candidate)))
        return best
    return float(np.linalg.norm(point))


def _format_vector(v: Sequence[Fraction]) -> str:
    return "(" + ", ".join(rq.format_fraction(x) for x in v) + ")"


def format_group(group: ClosedSubgroup) -> str:
    n = group.dimension
    if group.is_trivial:
        return "{0}"
    if group.is_full:
        return "ℝ" if n == 1 else f"ℝ^{n}"
    prefix = "2π·" if group.scale is Scale.TWO_PI else ""
    if n == 1:
        (g,) = group.lattice_basis[0]
        if g == 1:
            return f"{prefix}ℤ"
        return f"{prefix}({rq.format_fraction(g)})·ℤ"
    parts = []
    if group.subspace_basis:
        parts.append("span{" + ", ".join(_format_vector(v) for v in group.subspace_basis) + "}")
    if group.lattice_basis:
        parts.append(prefix + "ℤ⟨" + ", ".join(_format_vector(v) for v in group.lattice_basis) + "⟩")
    if group.cross_lattice_basis:
        cross_prefix = "2π·" if group.scale.toggled() is Scale.TWO_PI else ""
        parts.append(cross_prefix + "ℤ⟨" + ", ".join(_format_vector(v) for v in group.cross_lattice_basis) + "⟩")
    return " ⊕ ".join(parts)

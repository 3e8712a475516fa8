"""Exact rational linear algebra on top of sympy matrices.

Vectors cross module boundaries as tuples of ``Fraction``; sympy ``Matrix``
objects stay internal to this module and ``groups``.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from numbers import Rational as _RationalABC
from typing import Any, Iterable, List, Sequence, Tuple

from sympy import Matrix, Rational
from sympy.matrices.normalforms import hermite_normal_form

RationalVector = Tuple[Fraction, ...]


class RationalityError(ValueError):
    pass


def to_fraction(value: Any) -> Fraction:
    if isinstance(value, bool):
        raise RationalityError(f"not a rational number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, _RationalABC):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise RationalityError(f"not a rational number: {value!r}") from exc
    raise RationalityError(f"not a rational number: {value!r}")


def is_rational(value: Any) -> bool:
    try:
        to_fraction(value)
    except RationalityError:
        return False
    return True


def vector(values: Iterable[Any]) -> RationalVector:
    return tuple(to_fraction(v) for v in values)


def _sym(value: Fraction) -> Rational:
    return Rational(value.numerator, value.denominator)


def to_matrix(rows: Sequence[Sequence[Fraction]], ncols: int) -> Matrix:
    if not rows:
        return Matrix.zeros(0, ncols)
    return Matrix([[_sym(to_fraction(v)) for v in row] for row in rows])


def matrix_rows(m: Matrix) -> List[RationalVector]:
    return [tuple(to_fraction(m[i, j]) for j in range(m.cols)) for i in range(m.rows)]


def matrix_columns(m: Matrix) -> List[RationalVector]:
    return [tuple(to_fraction(m[i, j]) for i in range(m.rows)) for j in range(m.cols)]


def is_zero(v: Sequence[Fraction]) -> bool:
    return all(x == 0 for x in v)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def scale(c: Fraction, v: Sequence[Fraction]) -> RationalVector:
    return tuple(c * x for x in v)


def add(u: Sequence[Fraction], v: Sequence[Fraction]) -> RationalVector:
    return tuple(a + b for a, b in zip(u, v))


def row_space_basis(rows: Sequence[Sequence[Fraction]], n: int) -> List[RationalVector]:
    """Reduced row echelon basis: canonical for the span."""
    rows = [r for r in rows if not is_zero(r)]
    if not rows:
        return []
    reduced, pivots = to_matrix(rows, n).rref()
    return matrix_rows(reduced[: len(pivots), :])


def nullspace_basis(rows: Sequence[Sequence[Fraction]], n: int) -> List[RationalVector]:
    """Basis of {x : r.x = 0 for every row r}."""
    rows = [r for r in rows if not is_zero(r)]
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    return [tuple(to_fraction(x) for x in col) for col in to_matrix(rows, n).nullspace()]


def orthogonal_complement(basis: Sequence[Sequence[Fraction]], n: int) -> List[RationalVector]:
    return nullspace_basis(basis, n)


def project_off(v: Sequence[Fraction], basis: Sequence[Sequence[Fraction]]) -> RationalVector:
    """Orthogonal projection of v onto the complement of span(basis)."""
    if not basis or is_zero(v):
        return tuple(v)
    b = to_matrix(basis, len(v))
    x = to_matrix([v], len(v)).T
    coeffs = (b * b.T).inv() * (b * x)
    return matrix_columns(x - b.T * coeffs)[0]


def project_onto(v: Sequence[Fraction], basis: Sequence[Sequence[Fraction]]) -> RationalVector:
    if not basis:
        return tuple(Fraction(0) for _ in v)
    off = project_off(v, basis)
    return tuple(a - b for a, b in zip(v, off))


def common_denominator(vectors: Iterable[Sequence[Fraction]]) -> int:
    d = 1
    for v in vectors:
        for x in v:
            d = lcm(d, x.denominator)
    return d


def lattice_basis(vectors: Sequence[Sequence[Fraction]], n: int) -> List[RationalVector]:
    """Canonical basis of the Z-span of rational vectors.

    The basis is the column Hermite normal form of D*vectors divided by D,
    which does not depend on the common denominator D chosen.
    """
    vectors = [tuple(to_fraction(x) for x in v) for v in vectors if not is_zero(v)]
    if not vectors:
        return []
    d = common_denominator(vectors)
    cols = Matrix([[int(x * d) for x in v] for v in vectors]).T
    hnf = hermite_normal_form(cols)
    basis = []
    for col in matrix_columns(hnf):
        if not is_zero(col):
            basis.append(tuple(x / d for x in col))
    return basis


def dual_basis(basis: Sequence[Sequence[Fraction]], n: int) -> List[RationalVector]:
    """Dual lattice basis inside span(basis): rows of (L L^T)^-1 L."""
    if not basis:
        return []
    m = to_matrix(basis, n)
    return matrix_rows((m * m.T).inv() * m)


def lattice_coordinates(basis: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> RationalVector | None:
    """Exact coordinates of v in the basis, or None when v is outside the span."""
    n = len(v)
    if not basis:
        return () if is_zero(v) else None
    m = to_matrix(basis, n)
    x = to_matrix([v], n).T
    coeffs = (m * m.T).inv() * (m * x)
    if m.T * coeffs != x:
        return None
    return matrix_columns(coeffs)[0]


def integer_kernel(rows: Sequence[Sequence[Fraction]], r: int) -> List[RationalVector]:
    """Basis of {z in Z^r : rows . z = 0}."""
    space = nullspace_basis(rows, r)
    if not space:
        return []
    if len(space) == r:
        return [tuple(Fraction(int(i == j)) for j in range(r)) for i in range(r)]
    projected = []
    for i in range(r):
        e = tuple(Fraction(int(i == j)) for j in range(r))
        projected.append(project_onto(e, space))
    return lattice_basis(dual_basis(lattice_basis(projected, r), r), r)


def solve_any(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction], n: int) -> RationalVector:
    """One exact solution of rows . x = rhs (free parameters set to zero)."""
    if not rows:
        return tuple(Fraction(0) for _ in range(n))
    a = to_matrix(rows, n)
    b = to_matrix([rhs], len(rhs)).T
    solution, params = a.gauss_jordan_solve(b)
    if params.shape[0]:
        solution = solution.subs({p: 0 for p in params})
    return matrix_columns(solution)[0]


def integer_gcd(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = gcd(g, int(v))
    return g


def format_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

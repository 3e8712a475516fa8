"""Reader and writer for ``.levy`` model files.

A model file is line oriented::

    # comment
    name = compensated1d
    dimension = 1
    drift = (-1/4)
    covariance = (0)
    atom = 1/2 @ (1/2)

    [bernstein]
    family = power
    parameter = 1/2

Numbers are exact: integers, ``p/q`` and decimals (read as fractions).
``sqrt:q`` (optionally ``-sqrt:q``) tags an irrational entry and forces
numeric mode. Matrices list rows separated by ``;``.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from levylab import rational as rq
from levylab.bernstein import BernsteinFunction, custom, family_from_name
from levylab.config import Settings
from levylab.grid import TorusGrid
from levylab.symbol import (
    LevyTriplet,
    SymbolHandle,
    brownian_with_drift,
    isotropic_stable,
    make_triplet,
    pure_drift,
    validate_triplet,
)


class ModelSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int, source: str = "<string>") -> None:
        super().__init__(f"{source}:{line}:{column}: {message}")
        self.line = line
        self.column = column


class ModelSemanticError(ValueError):
    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class SqrtLiteral:
    radicand: Fraction
    negative: bool = False

    @property
    def value(self) -> float:
        root = math.sqrt(float(self.radicand))
        return -root if self.negative else root

    def __str__(self) -> str:
        return ("-" if self.negative else "") + "sqrt:" + rq.format_fraction(self.radicand)


ModelLiteral = Union[Fraction, SqrtLiteral]


def literal_text(value: ModelLiteral) -> str:
    if isinstance(value, SqrtLiteral):
        return str(value)
    return rq.format_fraction(value)


def literal_value(value: ModelLiteral) -> Union[Fraction, float]:
    return value.value if isinstance(value, SqrtLiteral) else value


@dataclass(frozen=True)
class AtomEntry:
    mass: ModelLiteral
    location: Tuple[ModelLiteral, ...]


@dataclass(frozen=True)
class SymbolSection:
    family: str
    alpha: Optional[ModelLiteral] = None
    scale: Optional[ModelLiteral] = None


@dataclass(frozen=True)
class BernsteinSection:
    family: str
    parameter: Optional[ModelLiteral] = None
    a: Optional[ModelLiteral] = None
    atoms: Tuple[Tuple[ModelLiteral, ModelLiteral], ...] = ()


@dataclass(frozen=True)
class GridSection:
    period: Optional[ModelLiteral] = None
    points: Optional[int] = None


@dataclass(frozen=True)
class ModelFile:
    name: str
    dimension: int
    drift: Tuple[ModelLiteral, ...]
    covariance: Tuple[Tuple[ModelLiteral, ...], ...]
    atoms: Tuple[AtomEntry, ...] = ()
    symbol: Optional[SymbolSection] = None
    bernstein: Optional[BernsteinSection] = None
    grid: Optional[GridSection] = None
    checks: Tuple[Tuple[str, str], ...] = field(default=())

    @property
    def is_exact(self) -> bool:
        entries: List[ModelLiteral] = list(self.drift) + [q for row in self.covariance for q in row]
        for atom in self.atoms:
            entries.append(atom.mass)
            entries.extend(atom.location)
        return not any(isinstance(x, SqrtLiteral) for x in entries)

    def check_setting(self, name: str) -> Optional[str]:
        for key, value in self.checks:
            if key == name:
                return value
        return None


# --- lexical layer ---------------------------------------------------------

_NUMBER = re.compile(r"[+-]?(?:\d+/\d+|\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)")
_SQRT = re.compile(r"(-)?sqrt:(\d+(?:/\d+)?)")
_KEY = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_SECTION = re.compile(r"\[\s*([A-Za-z_]+)\s*\]")
_SECTIONS = ("symbol", "bernstein", "grid", "checks")
_TOP_KEYS = ("name", "dimension", "drift", "covariance", "atom")
_SECTION_KEYS = {
    "symbol": ("family", "alpha", "scale"),
    "bernstein": ("family", "parameter", "a", "atom"),
    "grid": ("period", "points"),
}
_CHECK_NAMES = (
    "symbol_laws",
    "harmonic",
    "cross_application",
    "resolvent_fixed_point",
    "semigroup_fixed_point",
    "corollary2",
    "corollary3",
    "truncation",
)


class _Line:
    """A value being scanned, with 1-based columns for error messages."""

    def __init__(self, text: str, offset: int, line: int, source: str) -> None:
        self.text = text
        self.pos = 0
        self.offset = offset
        self.line = line
        self.source = source

    def error(self, message: str) -> ModelSyntaxError:
        return ModelSyntaxError(message, self.line, self.offset + self.pos + 1, self.source)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def expect(self, ch: str) -> None:
        self.skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def literal(self) -> ModelLiteral:
        self.skip_ws()
        m = _SQRT.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            return SqrtLiteral(Fraction(m.group(2)), negative=bool(m.group(1)))
        m = _NUMBER.match(self.text, self.pos)
        if not m:
            raise self.error("expected a number")
        try:
            value = Fraction(m.group(0))
        except (ValueError, ZeroDivisionError) as exc:
            raise self.error(f"invalid number {m.group(0)!r}") from exc
        self.pos = m.end()
        return value

    def vector(self) -> Tuple[Tuple[ModelLiteral, ...], ...]:
        """'(' rows ')' where rows are ';'-separated, entries ','-separated."""
        self.expect("(")
        rows: List[Tuple[ModelLiteral, ...]] = []
        current: List[ModelLiteral] = [self.literal()]
        while True:
            ch = self.peek()
            if ch == ",":
                self.pos += 1
                current.append(self.literal())
            elif ch == ";":
                self.pos += 1
                rows.append(tuple(current))
                current = [self.literal()]
            elif ch == ")":
                self.pos += 1
                rows.append(tuple(current))
                return tuple(rows)
            else:
                raise self.error("expected ',', ';' or ')'")

    def done(self) -> None:
        if not self.at_end():
            raise self.error("unexpected trailing text")


def _strip_comment(raw: str) -> str:
    idx = raw.find("#")
    return raw if idx < 0 else raw[:idx]


# --- parsing ---------------------------------------------------------------


def parse_model(text: str, source: str = "<string>") -> ModelFile:
    section: Optional[str] = None
    top: Dict[str, Any] = {}
    atoms: List[AtomEntry] = []
    sections: Dict[str, Dict[str, Any]] = {"symbol": {}, "bernstein": {}, "grid": {}}
    bernstein_atoms: List[Tuple[ModelLiteral, ModelLiteral]] = []
    checks: List[Tuple[str, str]] = []
    seen_sections: set[str] = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).rstrip()
        if not line.strip():
            continue
        sec = _SECTION.fullmatch(line.strip())
        if sec:
            name = sec.group(1).lower()
            if name not in _SECTIONS:
                raise ModelSyntaxError(f"unknown section [{name}]", lineno, raw.index("[") + 1, source)
            if name in seen_sections:
                raise ModelSyntaxError(f"section [{name}] appears twice", lineno, raw.index("[") + 1, source)
            seen_sections.add(name)
            section = name
            continue
        start = len(line) - len(line.lstrip())
        m = _KEY.match(line, start)
        if not m:
            raise ModelSyntaxError("expected a key", lineno, start + 1, source)
        key = m.group(0)
        eq = line.find("=", m.end())
        if eq < 0 or line[m.end() : eq].strip():
            raise ModelSyntaxError("expected '=' after key", lineno, m.end() + 1, source)
        value = _Line(line[eq + 1 :], eq + 1, lineno, source)
        where = f"[{section}]" if section else "top level"

        if section is None:
            if key not in _TOP_KEYS:
                raise ModelSyntaxError(f"unknown key {key!r} at {where}", lineno, start + 1, source)
            if key == "atom":
                mass = value.literal()
                value.expect("@")
                location = value.vector()
                value.done()
                if len(location) != 1:
                    raise value.error("atom location is a single row")
                atoms.append(AtomEntry(mass, location[0]))
                continue
            if key in top:
                raise ModelSyntaxError(f"duplicate key {key!r}", lineno, start + 1, source)
            top[key] = _top_value(key, value)
            continue

        if section == "checks":
            if key not in _CHECK_NAMES:
                raise ModelSyntaxError(f"unknown check {key!r}", lineno, start + 1, source)
            setting = value.text.strip()
            if setting not in ("on", "off"):
                value.literal()
                value.done()
            checks.append((key, setting))
            continue

        if key not in _SECTION_KEYS[section]:
            raise ModelSyntaxError(f"unknown key {key!r} in {where}", lineno, start + 1, source)
        if section == "bernstein" and key == "atom":
            mass = value.literal()
            value.expect("@")
            location = value.literal()
            value.done()
            bernstein_atoms.append((mass, location))
            continue
        bucket = sections[section]
        if key in bucket:
            raise ModelSyntaxError(f"duplicate key {key!r} in {where}", lineno, start + 1, source)
        if key == "family":
            word = _KEY.fullmatch(value.text.strip())
            if not word:
                raise value.error("expected a family name")
            bucket[key] = word.group(0).lower()
        elif key == "points":
            digits = value.text.strip()
            if not digits.isdigit():
                raise value.error("points must be a positive integer")
            bucket[key] = int(digits)
        else:
            bucket[key] = value.literal()
            value.done()

    model = _assemble(top, atoms, sections, bernstein_atoms, checks, seen_sections)
    check_model(model)
    return model


def _top_value(key: str, value: _Line) -> Any:
    if key == "name":
        text = value.text.strip()
        if not text:
            raise value.error("name must not be empty")
        return text
    if key == "dimension":
        digits = value.text.strip()
        if not digits.isdigit():
            raise value.error("dimension must be a positive integer")
        return int(digits)
    rows = value.vector()
    value.done()
    if key == "drift":
        if len(rows) != 1:
            raise value.error("drift is a single row")
        return rows[0]
    return rows


def _assemble(
    top: Dict[str, Any],
    atoms: List[AtomEntry],
    sections: Dict[str, Dict[str, Any]],
    bernstein_atoms: List[Tuple[ModelLiteral, ModelLiteral]],
    checks: List[Tuple[str, str]],
    seen_sections: set[str],
) -> ModelFile:
    if "dimension" not in top:
        raise ModelSemanticError("dimension", "missing")
    n = top["dimension"]
    if n < 1:
        raise ModelSemanticError("dimension", "must be >= 1")
    zero = Fraction(0)
    drift = top.get("drift", tuple(zero for _ in range(n)))
    covariance = top.get("covariance", tuple(tuple(zero for _ in range(n)) for _ in range(n)))
    symbol = None
    if "symbol" in seen_sections:
        data = sections["symbol"]
        if "family" not in data:
            raise ModelSemanticError("symbol.family", "missing")
        symbol = SymbolSection(data["family"], data.get("alpha"), data.get("scale"))
    bernstein = None
    if "bernstein" in seen_sections:
        data = sections["bernstein"]
        if "family" not in data:
            raise ModelSemanticError("bernstein.family", "missing")
        bernstein = BernsteinSection(data["family"], data.get("parameter"), data.get("a"), tuple(bernstein_atoms))
    grid = None
    if "grid" in seen_sections:
        data = sections["grid"]
        grid = GridSection(data.get("period"), data.get("points"))
    return ModelFile(
        name=top.get("name", "model"),
        dimension=n,
        drift=tuple(drift),
        covariance=tuple(tuple(row) for row in covariance),
        atoms=tuple(atoms),
        symbol=symbol,
        bernstein=bernstein,
        grid=grid,
        checks=tuple(checks),
    )


def check_model(model: ModelFile) -> None:
    """Semantic validation; raises ModelSemanticError with a field path."""
    n = model.dimension
    if len(model.drift) != n:
        raise ModelSemanticError("drift", f"has {len(model.drift)} entries, expected {n}")
    if len(model.covariance) != n or any(len(row) != n for row in model.covariance):
        raise ModelSemanticError("covariance", f"must be {n}x{n}")
    for index, atom in enumerate(model.atoms):
        path = f"measure.atoms[{index}]"
        if len(atom.location) != n:
            raise ModelSemanticError(f"{path}.location", f"has {len(atom.location)} entries, expected {n}")
        if not float(literal_value(atom.mass)) > 0:
            raise ModelSemanticError(f"{path}.mass", "must be positive")
        if all(float(literal_value(x)) == 0 for x in atom.location):
            raise ModelSemanticError(f"{path}.location", "atom at the origin")
    if model.symbol is not None:
        fam = model.symbol.family
        if fam not in ("stable", "brownian", "drift"):
            raise ModelSemanticError("symbol.family", f"unknown closed form {fam!r}")
        if model.atoms:
            raise ModelSemanticError("symbol.family", "closed forms exclude atom lines")
        if fam == "stable" and model.symbol.alpha is None:
            raise ModelSemanticError("symbol.alpha", "missing for the stable family")
    if model.grid is not None:
        if model.grid.period is not None and not float(literal_value(model.grid.period)) > 0:
            raise ModelSemanticError("grid.period", "must be positive")
        points = model.grid.points
        if points is not None and (points < 2 or points & (points - 1)):
            raise ModelSemanticError("grid.points", "must be a power of two")
    if model.bernstein is not None:
        if model.bernstein.atoms and model.bernstein.family != "custom":
            raise ModelSemanticError("bernstein.atom", "atom lines need family = custom")
        try:
            model_bernstein(model)
        except ValueError as exc:
            raise ModelSemanticError(f"bernstein.{model.bernstein.family}", str(exc)) from exc
    if model.symbol is None or model.symbol.family != "stable":
        report = validate_triplet(model_triplet(model))
        for failure in report.failures():
            raise ModelSemanticError(f"triplet.{failure.name}", failure.detail)
    if model.symbol is not None:
        try:
            model_symbol(model, subordinate=False)
        except ValueError as exc:
            raise ModelSemanticError(f"symbol.{model.symbol.family}", str(exc)) from exc


def load_model(path: Union[str, Path]) -> ModelFile:
    p = Path(path)
    return parse_model(p.read_text(encoding="utf-8"), source=str(p))


# --- conversion ------------------------------------------------------------


def model_triplet(model: ModelFile) -> LevyTriplet:
    return make_triplet(
        [literal_value(x) for x in model.drift],
        [[literal_value(x) for x in row] for row in model.covariance],
        [(literal_value(a.mass), [literal_value(x) for x in a.location]) for a in model.atoms],
    )


def model_bernstein(model: ModelFile) -> Optional[BernsteinFunction]:
    sec = model.bernstein
    if sec is None:
        return None
    if sec.family == "custom":
        a = literal_value(sec.a) if sec.a is not None else 0
        return custom(a, [(literal_value(m), literal_value(s)) for m, s in sec.atoms])
    param = literal_value(sec.parameter) if sec.parameter is not None else None
    return family_from_name(sec.family, param)


def model_symbol(model: ModelFile, *, subordinate: bool = True, settings: Settings | None = None) -> SymbolHandle:
    workers = settings.workers if settings else None
    sec = model.symbol
    if sec is None:
        base = SymbolHandle.from_triplet(model_triplet(model), workers=workers)
    elif sec.family == "stable":
        assert sec.alpha is not None
        scale = literal_value(sec.scale) if sec.scale is not None else 1
        base = isotropic_stable(model.dimension, literal_value(sec.alpha), scale)
    elif sec.family == "brownian":
        base = brownian_with_drift(
            [literal_value(x) for x in model.drift],
            [[literal_value(x) for x in row] for row in model.covariance],
        )
    else:
        base = pure_drift([literal_value(x) for x in model.drift])
    g = model_bernstein(model) if subordinate else None
    return SymbolHandle.subordinated(g, base) if g is not None else base


def model_grid(model: ModelFile, settings: Settings) -> TorusGrid:
    """Grid from flags/environment, overridden by the model's [grid] section."""
    period = settings.period
    points = settings.grid_points
    if model.grid is not None:
        if model.grid.period is not None:
            period = float(literal_value(model.grid.period))
        if model.grid.points is not None:
            points = model.grid.points
    return TorusGrid(model.dimension, period if period is not None else 2 * math.pi, points)


# --- serialization ---------------------------------------------------------


def _vector_text(values: Tuple[ModelLiteral, ...]) -> str:
    return "(" + ", ".join(literal_text(x) for x in values) + ")"


def _matrix_text(rows: Tuple[Tuple[ModelLiteral, ...], ...]) -> str:
    return "(" + "; ".join(", ".join(literal_text(x) for x in row) for row in rows) + ")"


def serialize_model(model: ModelFile) -> str:
    """Canonical text; parse_model(serialize_model(m)) == m."""
    lines = [
        f"name = {model.name}",
        f"dimension = {model.dimension}",
        f"drift = {_vector_text(model.drift)}",
        f"covariance = {_matrix_text(model.covariance)}",
    ]
    for atom in model.atoms:
        lines.append(f"atom = {literal_text(atom.mass)} @ {_vector_text(atom.location)}")
    if model.symbol is not None:
        lines += ["", "[symbol]", f"family = {model.symbol.family}"]
        if model.symbol.alpha is not None:
            lines.append(f"alpha = {literal_text(model.symbol.alpha)}")
        if model.symbol.scale is not None:
            lines.append(f"scale = {literal_text(model.symbol.scale)}")
    if model.bernstein is not None:
        sec = model.bernstein
        lines += ["", "[bernstein]", f"family = {sec.family}"]
        if sec.parameter is not None:
            lines.append(f"parameter = {literal_text(sec.parameter)}")
        if sec.a is not None:
            lines.append(f"a = {literal_text(sec.a)}")
        for mass, location in sec.atoms:
            lines.append(f"atom = {literal_text(mass)} @ {literal_text(location)}")
    if model.grid is not None:
        lines += ["", "[grid]"]
        if model.grid.period is not None:
            lines.append(f"period = {literal_text(model.grid.period)}")
        if model.grid.points is not None:
            lines.append(f"points = {model.grid.points}")
    if model.checks:
        lines += ["", "[checks]"]
        lines += [f"{key} = {value}" for key, value in model.checks]
    return "\n".join(lines) + "\n"


def model_hash(model: ModelFile) -> str:
    return hashlib.sha256(serialize_model(model).encode("utf-8")).hexdigest()

"""Check pipeline and the deterministic JSON report built from it."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from levylab.config import Settings
from levylab.grid import TorusGrid, random_trig_polynomial
from levylab.harmonic import HarmonicError, corollary3_consistency, make_harmonic, verify_harmonic
from levylab.operators import crosscheck_applications, resolvent_fixed_point, semigroup_fixed_point
from levylab.parser import ModelFile, model_bernstein, model_grid, model_hash, model_symbol
from levylab.runtime import log_event, traced
from levylab.subordination import SubordinationCheck, corollary1_equivalence_check
from levylab.symbol import LevyTriplet, MeasureKind, SymbolHandle, random_frequencies
from levylab.version import get_version
from levylab.zeroset import (
    CrosscheckResult,
    LiouvilleVerdict,
    VerdictMethod,
    crosscheck_corollary2,
    decide_liouville,
    truncation_zero_set_check,
)

_LAW_SAMPLES = 10_000
_DENSITY_LAW_SAMPLES = 8
_CROSS_APPLICATION_TOLERANCE = 1e-9


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIP = "skip"


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: CheckStatus
    value: Optional[float] = None
    tolerance: Optional[float] = None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status is not CheckStatus.FAIL

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "status": self.status.value,
            "value": self.value,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


def _judge(name: str, value: float, tolerance: float, detail: str = "") -> CheckResult:
    status = CheckStatus.PASS if value <= tolerance else CheckStatus.FAIL
    return CheckResult(name, status, value, tolerance, detail)


def _skip(name: str, reason: str) -> CheckResult:
    return CheckResult(name, CheckStatus.SKIP, detail=reason)


def symbol_law_defect(symbol: SymbolHandle, count: int = _LAW_SAMPLES, seed: int = 0) -> dict[str, float]:
    """Worst violations of the exponent laws on seeded random frequencies.

    Hermitian symmetry is measured relative to 1 + |psi|; the sign, subadditivity
    and periodicity defects are absolute.
    """
    xi = random_frequencies(symbol.dimension, count, seed)
    eta = random_frequencies(symbol.dimension, count, seed + 1)
    psi_xi = symbol.evaluate(xi)
    psi_minus = symbol.evaluate(-xi)
    psi_eta = symbol.evaluate(eta)
    psi_sum = symbol.evaluate(xi + eta)
    psi_diff = symbol.evaluate(xi - eta)
    hermitian = float((np.abs(psi_minus - np.conj(psi_xi)) / (1.0 + np.abs(psi_xi))).max())
    real_part = float(np.clip(-psi_xi.real, 0.0, None).max())
    excess = np.sqrt(np.abs(psi_sum)) - np.sqrt(np.abs(psi_xi)) - np.sqrt(np.abs(psi_eta))
    subadditive = float(np.clip(excess, 0.0, None).max())
    cross = np.abs(psi_xi + np.conj(psi_eta) - psi_diff) - 2.0 * np.sqrt(np.abs(psi_xi) * np.abs(psi_eta))
    periodicity = float(np.clip(cross, 0.0, None).max())
    origin = abs(symbol(np.zeros(symbol.dimension)))
    return {
        "origin": origin,
        "hermitian": hermitian,
        "real_part": real_part,
        "subadditivity": subadditive,
        "periodicity": periodicity,
    }


@dataclass
class PipelineContext:
    model: ModelFile
    settings: Settings
    numeric: bool
    symbol: SymbolHandle
    base_triplet: Optional[LevyTriplet]
    verdict: LiouvilleVerdict
    grid: TorusGrid

    def tolerance(self, name: str, default: float) -> Optional[float]:
        """None when the check is switched off in the model's [checks] section."""
        setting = self.model.check_setting(name)
        if setting is None or setting == "on":
            return default
        if setting == "off":
            return None
        return float(Fraction(setting))

    @property
    def exact_triplet(self) -> Optional[LevyTriplet]:
        t = self.base_triplet
        if t is None or t.measure.kind is MeasureKind.DENSITY or not t.is_exact:
            return None
        return t


def _base_triplet(model: ModelFile, symbol: SymbolHandle) -> Optional[LevyTriplet]:
    base = symbol.inner if symbol.inner is not None else symbol
    return base.underlying_triplet()


def _check_symbol_laws(ctx: PipelineContext) -> CheckResult:
    tol = ctx.tolerance("symbol_laws", 1e-9)
    if tol is None:
        return _skip("symbol_laws", "disabled")
    dense = ctx.base_triplet is not None and ctx.base_triplet.measure.kind is MeasureKind.DENSITY
    defects = symbol_law_defect(ctx.symbol, _DENSITY_LAW_SAMPLES if dense else _LAW_SAMPLES, ctx.settings.seed)
    worst = max(defects.values())
    detail = ", ".join(f"{k}={v:.2e}" for k, v in sorted(defects.items()))
    return _judge("symbol_laws", worst, tol, detail)


def _harmonic_checks(ctx: PipelineContext) -> tuple[list[CheckResult], Optional[TorusGrid]]:
    out: list[CheckResult] = []
    tol = ctx.tolerance("harmonic", ctx.settings.tolerance)
    verdict = ctx.verdict
    if verdict.method is not VerdictMethod.EXACT or verdict.zero_set is None:
        reason = "numeric verdict carries no exact zero set"
        for name in ("harmonic", "resolvent_fixed_point", "semigroup_fixed_point"):
            out.append(_skip(name, reason))
        return out, None
    if verdict.holds:
        refused = False
        try:
            make_harmonic(verdict.zero_set)
        except HarmonicError:
            refused = True
        status = CheckStatus.PASS if refused else CheckStatus.FAIL
        out.append(CheckResult("harmonic", status, detail="construction refused for a trivial zero set"))
        out.append(_skip("resolvent_fixed_point", "Liouville: no non-constant candidate"))
        out.append(_skip("semigroup_fixed_point", "Liouville: no non-constant candidate"))
        return out, None

    candidate, f = make_harmonic(verdict.zero_set, points=None)
    grid = f.grid
    if tol is None:
        out.append(_skip("harmonic", "disabled"))
    else:
        report = verify_harmonic(candidate, ctx.symbol, grid, tol)
        worst = max(report.fourier_residual, report.direct_residual or 0.0)
        bound = tol * (1.0 + report.sup_norm)
        out.append(_judge("harmonic", worst, bound, f"period {grid.period:.6g}, {grid.points} points"))

    scale = 1.0 + f.sup_norm()
    res_tol = ctx.tolerance("resolvent_fixed_point", ctx.settings.tolerance)
    if res_tol is None:
        out.append(_skip("resolvent_fixed_point", "disabled"))
    else:
        residual = resolvent_fixed_point(f, ctx.symbol, 1.0)
        out.append(_judge("resolvent_fixed_point", residual, res_tol * scale))

    semi_tol = ctx.tolerance("semigroup_fixed_point", ctx.settings.tolerance)
    if semi_tol is None:
        out.append(_skip("semigroup_fixed_point", "disabled"))
    else:
        result = semigroup_fixed_point(f, ctx.symbol, 1.0, ctx.settings)
        detail = "conclusive (real symbol)" if result.conclusive else "not conclusive (complex symbol)"
        out.append(_judge("semigroup_fixed_point", result.residual, semi_tol * scale, detail))
    return out, grid


def _check_cross_application(ctx: PipelineContext) -> CheckResult:
    tol = ctx.tolerance("cross_application", _CROSS_APPLICATION_TOLERANCE)
    if tol is None:
        return _skip("cross_application", "disabled")
    t = ctx.base_triplet
    if t is None or t.measure.kind is MeasureKind.DENSITY or ctx.symbol.inner is not None:
        return _skip("cross_application", "needs an unsubordinated triplet with a finite measure")
    poly = random_trig_polynomial(ctx.grid, 5, ctx.settings.seed)
    diff = crosscheck_applications(poly, t, ctx.grid)
    return _judge("cross_application", diff, tol, "relative to 1 + sup |direct|")


def _check_corollary2(ctx: PipelineContext) -> tuple[CheckResult, Optional[CrosscheckResult]]:
    if ctx.tolerance("corollary2", 0.0) is None:
        return _skip("corollary2", "disabled"), None
    t = ctx.exact_triplet
    if t is None or ctx.symbol.inner is not None:
        return _skip("corollary2", "needs an exact unsubordinated triplet"), None
    result = crosscheck_corollary2(t)
    status = CheckStatus.PASS if result.equal else CheckStatus.FAIL
    return CheckResult("corollary2", status, detail="zero-set annihilator equals the triplet group" if result.equal else "groups differ"), result


def _check_corollary3(ctx: PipelineContext, grid: Optional[TorusGrid]) -> CheckResult:
    if ctx.tolerance("corollary3", 0.0) is None:
        return _skip("corollary3", "disabled")
    if ctx.verdict.method is not VerdictMethod.EXACT:
        return _skip("corollary3", "needs an exact verdict")
    target = grid or ctx.grid
    result = corollary3_consistency(ctx.symbol, 1.0, target, ctx.settings)
    status = CheckStatus.PASS if result.consistent else CheckStatus.FAIL
    positive = "strictly positive" if result.positivity.strictly_positive else "not strictly positive"
    return CheckResult("corollary3", status, result.positivity.min_value, detail=f"periodised density {positive}")


def _check_truncation(ctx: PipelineContext) -> CheckResult:
    if ctx.tolerance("truncation", 0.0) is None:
        return _skip("truncation", "disabled")
    t = ctx.exact_triplet
    if t is None or not t.atoms:
        return _skip("truncation", "needs exact atoms")
    largest = max(math.sqrt(float(a.norm_squared())) for a in t.atoms)
    radii = sorted({Fraction(1), Fraction(math.floor(largest) + 1)})
    ok = truncation_zero_set_check(t, radii)
    status = CheckStatus.PASS if ok else CheckStatus.FAIL
    return CheckResult("truncation", status, detail="radii " + ", ".join(str(r) for r in radii))


@dataclass
class Report:
    model: ModelFile
    verdict: LiouvilleVerdict
    checks: list[CheckResult] = field(default_factory=list)
    crosscheck: Optional[CrosscheckResult] = None
    subordination: Optional[SubordinationCheck] = None
    provenance: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict[str, Any]:
        return {
            "model": self.model.name,
            "verdict": self.verdict.to_dict(),
            "checks": [c.to_dict() for c in self.checks],
            "crosscheck": None if self.crosscheck is None else self.crosscheck.to_dict(),
            "subordination": None if self.subordination is None else self.subordination.to_dict(),
            "provenance": self.provenance,
            "ok": self.ok,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def provenance(model: ModelFile, settings: Settings, method: VerdictMethod) -> dict[str, Any]:
    return {
        "model_sha256": model_hash(model),
        "tool_version": get_version(),
        "method": method.value,
        "tolerances": {
            "tolerance": settings.tolerance,
            "scan_halfwidth": settings.scan_halfwidth,
            "scan_step": settings.scan_step,
            "scan_max_points": settings.scan_max_points,
            "grid_points": settings.grid_points,
            "seed": settings.seed,
        },
    }


@traced
def build_report(model: ModelFile, settings: Settings | None = None, *, numeric: bool = False) -> Report:
    cfg = settings or Settings()
    symbol = model_symbol(model, settings=cfg)
    verdict = decide_liouville(symbol, numeric=numeric, settings=cfg)
    ctx = PipelineContext(
        model=model,
        settings=cfg,
        numeric=numeric,
        symbol=symbol,
        base_triplet=_base_triplet(model, symbol),
        verdict=verdict,
        grid=model_grid(model, cfg),
    )
    checks = [_check_symbol_laws(ctx)]
    harmonic, harmonic_grid = _harmonic_checks(ctx)
    checks += harmonic
    checks.append(_check_cross_application(ctx))
    corollary2, crosscheck = _check_corollary2(ctx)
    checks.append(corollary2)
    checks.append(_check_corollary3(ctx, harmonic_grid))
    checks.append(_check_truncation(ctx))

    subordination = None
    g = model_bernstein(model)
    inner = ctx.exact_triplet
    if g is not None and inner is not None:
        subordination = corollary1_equivalence_check(g, inner, cfg)

    failed = [c.name for c in checks if not c.passed]
    log_event("report_built", model=model.name, failed=failed)
    return Report(
        model=model,
        verdict=verdict,
        checks=checks,
        crosscheck=crosscheck,
        subordination=subordination,
        provenance=provenance(model, cfg, verdict.method),
    )

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Union

from levylab.bernstein import (
    BernsteinFunction,
    ZeroClassification,
    ZeroClassificationKind,
    halfplane_zero_classification,
)
from levylab.config import Settings
from levylab.groups import ClosedSubgroup, distance_to
from levylab.runtime import log_event, traced
from levylab.scan import zero_scan_numeric
from levylab.symbol import LevyTriplet, SymbolHandle, as_symbol
from levylab.zeroset import zero_set_exact

_CONVERSE_DISTANCE = 1e-6


def subordinate_symbol(g: BernsteinFunction, psi: Union[LevyTriplet, SymbolHandle]) -> SymbolHandle:
    return SymbolHandle.subordinated(g, as_symbol(psi))


@dataclass(frozen=True)
class SubordinationCheck:
    classification: ZeroClassification
    condition_met: bool
    zero_set: ClosedSubgroup
    forward_residual: float
    converse_violations: tuple[tuple[float, ...], ...]
    zero_sets_equal: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "classification": self.classification.to_dict(),
            "condition_met": self.condition_met,
            "zero_set": self.zero_set.to_dict(),
            "forward_residual": self.forward_residual,
            "converse_violations": [list(v) for v in self.converse_violations],
            "zero_sets_equal": self.zero_sets_equal,
        }


@traced
def corollary1_equivalence_check(
    g: BernsteinFunction,
    triplet: LevyTriplet,
    settings: Settings | None = None,
) -> SubordinationCheck:
    """Compare {g(psi) = 0} with {psi = 0}.

    Every generator of the exact zero set must be a zero of g(psi), and every
    numerically found zero of g(psi) must lie on the exact zero set.
    """
    cfg = settings or Settings()
    classification = halfplane_zero_classification(g, cfg)
    condition_met = classification.kind is ZeroClassificationKind.ONLY_ZERO_AT_ORIGIN
    zero_set = zero_set_exact(triplet)
    composite = subordinate_symbol(g, triplet)
    tolerance = cfg.tolerance

    generators = zero_set.generators()
    forward_residual = 0.0
    forward_ok = True
    for location in generators:
        residual = abs(composite(location))
        forward_residual = max(forward_residual, residual)
        forward_ok = forward_ok and residual <= tolerance

    candidates = zero_scan_numeric(composite, cfg.scan_halfwidth, cfg.scan_step, max_points=cfg.scan_max_points)
    violations = []
    for cand in candidates:
        if cand.residual > tolerance * (1.0 + cand.norm()):
            continue
        if distance_to(zero_set, cand.location) > _CONVERSE_DISTANCE:
            violations.append(cand.location)
    equal = forward_ok and not violations
    log_event("subordination_check", condition_met=condition_met, equal=equal, candidates=len(candidates))
    return SubordinationCheck(
        classification=classification,
        condition_met=condition_met,
        zero_set=zero_set,
        forward_residual=forward_residual,
        converse_violations=tuple(violations),
        zero_sets_equal=equal,
    )

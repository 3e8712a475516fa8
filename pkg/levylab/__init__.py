from levylab.groups import ClosedSubgroup, format_group, orthogonal_subgroup
from levylab.parser import ModelFile, load_model, parse_model
from levylab.report import Report, build_report
from levylab.runtime import EventLog, capture_events, traced
from levylab.symbol import LevyTriplet, SymbolHandle, eval_symbol, make_triplet, validate_triplet
from levylab.version import get_version
from levylab.zeroset import LiouvilleVerdict, crosscheck_corollary2, decide_liouville, zero_set_exact

__version__ = get_version()

__all__ = [
    "ClosedSubgroup",
    "EventLog",
    "LevyTriplet",
    "LiouvilleVerdict",
    "ModelFile",
    "Report",
    "SymbolHandle",
    "build_report",
    "capture_events",
    "crosscheck_corollary2",
    "decide_liouville",
    "eval_symbol",
    "format_group",
    "load_model",
    "make_triplet",
    "orthogonal_subgroup",
    "parse_model",
    "traced",
    "validate_triplet",
    "zero_set_exact",
    "__version__",
]

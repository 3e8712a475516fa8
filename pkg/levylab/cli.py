import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable

from levylab.bernstein import family_from_name
from levylab.catalog import CATALOG, catalog_names, catalog_text
from levylab.config import Settings, load_settings
from levylab.groups import format_group
from levylab.parser import (
    ModelFile,
    check_model,
    load_model,
    model_bernstein,
    model_symbol,
    parse_model,
    serialize_model,
)
from levylab.report import CheckStatus, build_report
from levylab.runtime import capture_events
from levylab.subordination import corollary1_equivalence_check
from levylab.symbol import MeasureKind
from levylab.version import get_version
from levylab.zeroset import VerdictMethod, crosscheck_corollary2, decide_liouville, zero_scan

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2


def _dump(data: Any) -> str:
    return json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True)


def resolve_model(raw: str) -> ModelFile:
    """A model file path, or the name of a catalog model when no such file exists."""
    path = Path(raw)
    if path.exists():
        model = load_model(path)
    elif raw.startswith("catalog:") or raw in CATALOG:
        name = raw.split(":", 1)[-1]
        model = parse_model(catalog_text(name), source=f"catalog:{name}")
    else:
        raise FileNotFoundError(f"no model file or catalog model named {raw!r}")
    check_model(model)
    return model


def _settings(args: argparse.Namespace) -> Settings:
    return load_settings().with_overrides(
        tolerance=args.tolerance,
        grid_points=args.grid,
        period=args.period,
        seed=args.seed,
        audit_log=args.audit_log,
    )


def _parse_xi(raw: str) -> list[float]:
    try:
        return [float(x) for x in raw.replace("(", "").replace(")", "").split(",") if x.strip()]
    except ValueError:
        raise ValueError(f"--xi expects comma-separated numbers, got {raw!r}") from None


def cmd_validate(args: argparse.Namespace) -> int:
    errors: list[tuple[str, Exception]] = []
    for raw in args.models:
        try:
            resolve_model(raw)
        except (ValueError, OSError) as exc:
            errors.append((raw, exc))
    if errors:
        for raw, exc in errors:
            print(f"ERROR: {raw}: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    if len(args.models) == 1:
        print("OK")
    else:
        print(f"OK ({len(args.models)} models)")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    model = resolve_model(args.model)
    symbol = model_symbol(model, settings=args.settings)
    rows = []
    for raw in args.xi:
        xi = _parse_xi(raw)
        value = symbol(xi)
        rows.append({"xi": xi, "re": value.real, "im": value.imag})
    if args.json:
        print(_dump({"model": model.name, "values": rows}))
        return EXIT_OK
    for row in rows:
        coords = ", ".join(f"{x:g}" for x in row["xi"])
        print(f"ψ({coords}) = {row['re']:.12g} {'+' if row['im'] >= 0 else '-'} {abs(row['im']):.12g}i")
    return EXIT_OK


def cmd_zero_set(args: argparse.Namespace) -> int:
    model = resolve_model(args.model)
    symbol = model_symbol(model, settings=args.settings)
    verdict = decide_liouville(symbol, numeric=args.numeric, settings=args.settings)
    candidates = []
    if verdict.method is VerdictMethod.NUMERIC_HEURISTIC:
        candidates = [c.to_dict() for c in zero_scan(symbol, args.settings)]
    if args.json:
        zero_set = None if verdict.zero_set is None else verdict.zero_set.to_dict()
        print(_dump({"model": model.name, "method": verdict.method.value, "zero_set": zero_set, "candidates": candidates}))
        return EXIT_OK
    if verdict.method is VerdictMethod.EXACT:
        assert verdict.zero_set is not None
        print(f"{{ψ=0}} = {format_group(verdict.zero_set)}")
        for g in verdict.zero_set.generators():
            print(f"  generator ({', '.join(f'{x:.12g}' for x in g)})")
        return EXIT_OK
    print(f"{{ψ=0}} (numeric, {len(candidates)} candidates in the scan box)")
    for cand in candidates:
        coords = ", ".join(f"{x:.10g}" for x in cand["location"])
        print(f"  ({coords})  |ψ| = {cand['residual']:.3e}")
    return EXIT_OK


def cmd_liouville(args: argparse.Namespace) -> int:
    model = resolve_model(args.model)
    verdict = decide_liouville(model_symbol(model, settings=args.settings), numeric=args.numeric, settings=args.settings)
    if args.json:
        print(_dump({"model": model.name, "verdict": verdict.to_dict()}))
        return EXIT_OK
    if verdict.holds:
        line = "Liouville: YES"
    else:
        line = "Liouville: NO"
        if verdict.zero_set is not None:
            line += f"; {{ψ=0}} = {format_group(verdict.zero_set)}"
        if verdict.periodicity_group is not None:
            line += f"; {{ψ=0}}^⊥ = {format_group(verdict.periodicity_group)}"
    if verdict.method is VerdictMethod.NUMERIC_HEURISTIC:
        line += " (numeric heuristic)"
    print(line)
    return EXIT_OK


def cmd_crosscheck(args: argparse.Namespace) -> int:
    model = resolve_model(args.model)
    if model.symbol is not None and model.symbol.family == "stable":
        raise ValueError("crosscheck needs a triplet; the stable closed form has none")
    triplet = model_symbol(model, subordinate=False, settings=args.settings).underlying_triplet()
    assert triplet is not None
    result = crosscheck_corollary2(triplet)
    if args.json:
        print(_dump({"model": model.name, "crosscheck": result.to_dict()}))
    else:
        print(f"{{ψ=0}}^⊥          = {format_group(result.lhs)}")
        print(f"G_ν + W_(Σ, b+c_ν) = {format_group(result.rhs)}")
        print(f"equality: {'true' if result.equal else 'false'}")
    return EXIT_OK if result.equal else EXIT_CHECK_FAILED


def cmd_subordinate(args: argparse.Namespace) -> int:
    model = resolve_model(args.model)
    if args.family:
        g = family_from_name(args.family, args.parameter)
    else:
        g = model_bernstein(model)
    if g is None:
        raise ValueError("no Bernstein function: add a [bernstein] section or pass --family")
    base = model_symbol(model, subordinate=False, settings=args.settings).underlying_triplet()
    if base is None or base.measure.kind is MeasureKind.DENSITY or not base.is_exact:
        raise ValueError("subordinate needs an exact triplet model")
    check = corollary1_equivalence_check(g, base, args.settings)
    if args.json:
        print(_dump({"model": model.name, "bernstein": g.to_dict(), "check": check.to_dict()}))
    else:
        print(f"g: {g.family.value}; zeros of g(iη): {check.classification.kind.value}")
        print(f"{{ψ=0}} = {format_group(check.zero_set)}")
        print(f"{{g(ψ)=0}} = {{ψ=0}}: {'true' if check.zero_sets_equal else 'false'}")
        for v in check.converse_violations:
            print(f"  extra zero of g(ψ) at ({', '.join(f'{x:.10g}' for x in v)})")
    if check.condition_met and not check.zero_sets_equal:
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _print_checks(report: Any) -> None:
    for check in report.checks:
        mark = {CheckStatus.PASS: "PASS", CheckStatus.FAIL: "FAIL", CheckStatus.SKIP: "SKIP"}[check.status]
        value = "" if check.value is None else f" value={check.value:.3e}"
        tol = "" if check.tolerance is None else f" tol={check.tolerance:.1e}"
        detail = f"  ({check.detail})" if check.detail else ""
        print(f"{mark} {check.name}{value}{tol}{detail}")


def cmd_verify(args: argparse.Namespace) -> int:
    model = resolve_model(args.model)
    report = build_report(model, args.settings, numeric=args.numeric)
    if args.json:
        print(_dump({"model": model.name, "checks": [c.to_dict() for c in report.checks], "ok": report.ok}))
    else:
        _print_checks(report)
    return EXIT_OK if report.ok else EXIT_CHECK_FAILED


def cmd_report(args: argparse.Namespace) -> int:
    model = resolve_model(args.model)
    report = build_report(model, args.settings, numeric=args.numeric)
    payload = report.to_json()
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
        print(str(Path(args.out)))
    else:
        print(payload, end="")
    return EXIT_OK if report.ok else EXIT_CHECK_FAILED


def cmd_catalog(args: argparse.Namespace) -> int:
    if args.name:
        print(catalog_text(args.name), end="")
        return EXIT_OK
    if args.json:
        print(_dump({name: serialize_model(parse_model(catalog_text(name))) for name in catalog_names()}))
        return EXIT_OK
    for name in catalog_names():
        print(name)
    return EXIT_OK


def _run(func: Callable[[argparse.Namespace], int], args: argparse.Namespace) -> int:
    try:
        args.settings = _settings(args)
        if not args.trace and not args.settings.audit_log:
            return func(args)
        with capture_events(audit_path=args.settings.audit_log) as log:
            try:
                return func(args)
            finally:
                if args.trace:
                    sys.stderr.write(log.to_jsonl())
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"ERROR: {getattr(args, 'model', '')}: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, help="Residual tolerance (default 1e-10)")
    common.add_argument("--grid", type=int, help="Grid points per axis, a power of two")
    common.add_argument("--period", type=float, help="Torus period L")
    common.add_argument("--numeric", action="store_true", help="Force the numeric heuristic verdict")
    common.add_argument("--json", action="store_true", help="Structured output on stdout")
    common.add_argument("--seed", type=int, help="Seed for random test functions and frequencies")
    common.add_argument("--trace", action="store_true", help="Dump the event log to stderr as JSON lines")
    common.add_argument("--audit-log", dest="audit_log", help="Append every event to this JSON-lines file")
    return common


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="levylab")
    parser.add_argument("--version", action="version", version=f"levylab {get_version()}")
    sub = parser.add_subparsers(dest="cmd", required=True)
    common = _common_flags()

    p_validate = sub.add_parser("validate", parents=[common], help="Parse and validate model files")
    p_validate.add_argument("models", nargs="+", help="Model file(s) or catalog names")
    p_validate.set_defaults(func=cmd_validate)

    p_eval = sub.add_parser("eval", parents=[common], help="Evaluate the characteristic exponent")
    p_eval.add_argument("model")
    p_eval.add_argument("--xi", action="append", required=True, help="Frequency, e.g. --xi 3,4 (repeatable)")
    p_eval.set_defaults(func=cmd_eval)

    p_zero = sub.add_parser("zero-set", parents=[common], help="Compute the zero set of the exponent")
    p_zero.add_argument("model")
    p_zero.set_defaults(func=cmd_zero_set)

    p_liouville = sub.add_parser("liouville", parents=[common], help="Decide the Liouville property")
    p_liouville.add_argument("model")
    p_liouville.set_defaults(func=cmd_liouville)

    p_cross = sub.add_parser("crosscheck", parents=[common], help="Compare the zero set with the triplet characterization")
    p_cross.add_argument("model")
    p_cross.set_defaults(func=cmd_crosscheck)

    p_sub = sub.add_parser("subordinate", parents=[common], help="Check that subordination keeps the zero set")
    p_sub.add_argument("model")
    p_sub.add_argument("--family", choices=["power", "log", "resolvent", "semigroup", "linear"])
    p_sub.add_argument("--parameter", help="Family parameter, e.g. 1/2")
    p_sub.set_defaults(func=cmd_subordinate)

    p_verify = sub.add_parser("verify", parents=[common], help="Run the numeric verification checks")
    p_verify.add_argument("model")
    p_verify.set_defaults(func=cmd_verify)

    p_report = sub.add_parser("report", parents=[common], help="Write the full JSON report")
    p_report.add_argument("model")
    p_report.add_argument("--out", help="Output file path")
    p_report.set_defaults(func=cmd_report)

    p_catalog = sub.add_parser("catalog", parents=[common], help="List or print built-in models")
    p_catalog.add_argument("name", nargs="?")
    p_catalog.set_defaults(func=cmd_catalog)

    args = parser.parse_args(argv)
    return _run(args.func, args)


if __name__ == "__main__":
    raise SystemExit(main())

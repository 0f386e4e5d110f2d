"""Command-line driver: ``freemeixner verify`` and ``freemeixner demo``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .config import DEMO_CONFIG, ConfigError, validate
from .partitions import CapacityError, PreconditionError
from .report import jsonable
from .suites import SUITES, run_suite

SCHEMA_VERSION = 1

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _run_one(raw: dict, name: str) -> tuple[str, dict, float]:
    # workers rebuild the config from the raw dict so nothing unpicklable crosses processes
    cfg = validate(raw)
    start = time.perf_counter()
    try:
        rep = run_suite(name, cfg.space, cfg.Z, cfg.settings)
        out = {"status": "pass" if rep.passed else "fail", **rep.to_json()}
    except (CapacityError, PreconditionError, ArithmeticError, MemoryError) as exc:
        out = {"status": "fail", "name": name, "passed": False, "reason": f"{type(exc).__name__}: {exc}"}
    return name, out, time.perf_counter() - start


def run(raw: dict, serial: bool = False, **overrides) -> dict:
    """Validate, run the selected suites and assemble the report dictionary."""
    cfg = validate(raw, **overrides)
    start = time.perf_counter()
    results: dict[str, tuple] = {}
    if serial or len(cfg.suites) <= 1:
        for name in cfg.suites:
            results[name] = _run_one(cfg.raw, name)[1:]
    else:
        with ProcessPoolExecutor(max_workers=len(cfg.suites)) as pool:
            for name, out, dt in pool.map(_run_one, [cfg.raw] * len(cfg.suites), cfg.suites):
                results[name] = (out, dt)

    suites = {}
    timing = {"total_seconds": 0.0, "suites": {}}
    for name in SUITES:
        if name in results:
            suites[name], timing["suites"][name] = results[name]
        else:
            suites[name] = {"status": "skipped"}
    timing["total_seconds"] = time.perf_counter() - start
    return {
        "schema_version": SCHEMA_VERSION,
        "artifact_version": __version__,
        "passed": all(s["status"] != "fail" for s in suites.values()),
        "config": cfg.raw,
        "z": cfg.Z.to_json(),
        "suites": suites,
        "timing": timing,
    }


def summary_lines(report: dict) -> list[str]:
    lines = []
    for name, s in report["suites"].items():
        status = s["status"].upper()
        extra = s.get("reason", "")
        lines.append(f"{name:<15} {status}" + (f"  {extra}" if extra else ""))
    lines.append("OK" if report["passed"] else "FAILED")
    return lines


def dumps(report: dict) -> str:
    return json.dumps(jsonable(report), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _load(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError("", f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="freemeixner", description="Verification workbench for free Meixner fields.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification suites from a JSON config")
    v.add_argument("--config", required=True, help="path to the JSON run configuration")
    v.add_argument("--suite", action="append", choices=SUITES, help="suite to run (repeatable); overrides the config")
    v.add_argument("--degree", type=int)
    v.add_argument("--depth", type=int)
    v.add_argument("--out", help="write the JSON report here instead of stdout")
    v.add_argument("--serial", action="store_true", help="run suites one after another")

    d = sub.add_parser("demo", help="write the default demo config")
    d.add_argument("--out", default="demo_config.json")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "demo":
        Path(args.out).write_text(json.dumps(DEMO_CONFIG, indent=2) + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
        return EXIT_OK

    try:
        raw = _load(args.config)
        report = run(raw, serial=args.serial, suites_override=args.suite, degree=args.degree, depth=args.depth)
    except ConfigError as exc:
        print(f"config error at {exc.pointer or '/'}: {exc.message}", file=sys.stderr)
        return EXIT_CONFIG

    text = dumps(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print("\n".join(summary_lines(report)))
    else:
        sys.stdout.write(text)
        print("\n".join(summary_lines(report)), file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

"""Command line: ``hardylab run | selftest | emit``.

Exit codes: 0 success, 1 failed criterion or diagnostic, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from . import acceptance
from .scenario import DEMO_CONFIG, ConfigError, load_config, parse_config, run_scenario

TIMING_KEYS = ("timings", "seconds")


def dumps(report: dict, timings: bool = True) -> str:
    """Deterministic JSON (sorted keys); ``timings=False`` drops wall-clock fields."""
    def strip(obj):
        if isinstance(obj, dict):
            return {k: strip(v) for k, v in obj.items() if timings or k not in TIMING_KEYS}
        if isinstance(obj, list):
            return [strip(v) for v in obj]
        return obj
    return json.dumps(strip(report), sort_keys=True, indent=2, allow_nan=True)


def load_report(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _flatten(prefix: str, obj, out: list):
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], out)
    elif isinstance(obj, list):
        out.append((prefix, json.dumps(obj)))
    else:
        out.append((prefix, obj))


def certificate_rows(report: dict) -> list:
    """(diagnostic, certificate, value) rows for every verdict and certificate."""
    rows = []
    for name in report.get("order", sorted(report.get("diagnostics", {}))):
        entry = report["diagnostics"][name]
        if entry.get("status") == "error":
            rows.append((name, "error", entry["error"]))
            continue
        rep = entry["report"]
        flat: list = []
        _flatten("verdict", rep.get("verdicts", {}), flat)
        _flatten("", rep.get("certificates", {}), flat)
        rows.extend((name, k, v) for k, v in flat)
    return rows


def series_tables(report: dict) -> dict:
    """Columnar series keyed by file stem: {stem: (header, rows)}."""
    tables = {}
    for name, entry in sorted(report.get("diagnostics", {}).items()):
        for key, data in sorted(entry.get("report", {}).get("series", {}).items()):
            if isinstance(data, dict):
                header = sorted(data)
                cols = [data[h] for h in header]
            else:
                header, cols = ["index", key], [list(range(len(data))), data]
            if not cols or any(len(c) != len(cols[0]) for c in cols):
                continue
            if any(isinstance(v, list) for c in cols for v in c):
                # complex entries arrive as [re, im]; split them
                new_header, new_cols = [], []
                for h, c in zip(header, cols):
                    if c and isinstance(c[0], list):
                        new_header += [f"{h}_re", f"{h}_im"]
                        new_cols += [[v[0] for v in c], [v[1] for v in c]]
                    else:
                        new_header.append(h)
                        new_cols.append(c)
                header, cols = new_header, new_cols
            tables[f"{name}_{key}"] = (header, list(zip(*cols)))
    return tables


def emit(report: dict, fmt: str, out: str) -> list:
    """Write the report as json, csv or plot-data into directory ``out``; returns the paths."""
    os.makedirs(out, exist_ok=True)
    paths = []
    if fmt == "json":
        path = os.path.join(out, "report.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dumps(report) + "\n")
        paths.append(path)
    elif fmt == "csv":
        path = os.path.join(out, "report.csv")
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["diagnostic", "certificate", "value"])
            w.writerows(certificate_rows(report))
        paths.append(path)
    elif fmt == "plot-data":
        for stem, (header, rows) in series_tables(report).items():
            path = os.path.join(out, f"{stem}.csv")
            with open(path, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh)
                w.writerow(header)
                w.writerows(rows)
            paths.append(path)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return paths


def selftest(numbers=None, stream=None) -> dict:
    stream = stream or sys.stdout
    results = acceptance.run_all(numbers)
    for r in results:
        print(f"{r.line()}  ({r.seconds:.2f} s)", file=stream)
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed", file=stream)
    return {
        "tool": {"name": "hardylab"},
        "criteria": [r.as_dict() for r in results],
        "failed": failed,
        "status": "failed" if failed else "ok",
        "timings": {str(r.number): r.seconds for r in results},
    }


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hardylab", description="Hardy-space and composition-operator diagnostics.")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario config and print its JSON report")
    run.add_argument("config")
    run.add_argument("--out", help="also write report.json into this directory")
    st = sub.add_parser("selftest", help="run the acceptance suite")
    st.add_argument("--only", help="comma-separated criterion numbers")
    st.add_argument("--json", help="write the selftest report to this file")
    em = sub.add_parser("emit", help="write a report as json, csv or plot-data")
    em.add_argument("config", nargs="?", help="scenario config (default: built-in demo scenario)")
    em.add_argument("--report", help="emit an existing JSON report instead of running a config")
    em.add_argument("--format", required=True, choices=["json", "csv", "plot-data"])
    em.add_argument("--out", required=True)
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "selftest":
            numbers = [int(x) for x in args.only.split(",")] if args.only else None
            rep = selftest(numbers)
            if args.json:
                with open(args.json, "w", encoding="utf-8") as fh:
                    fh.write(dumps(rep) + "\n")
            return 1 if rep["failed"] else 0
        if args.command == "run":
            report = run_scenario(load_config(args.config))
            print(dumps(report))
            if args.out:
                emit(report, "json", args.out)
            return 0 if report["status"] == "ok" else 1
        if args.report and args.config:
            raise ConfigError("give either a config or --report, not both")
        if args.report:
            report = load_report(args.report)
        elif args.config:
            report = run_scenario(load_config(args.config))
        else:
            report = run_scenario(parse_config(DEMO_CONFIG, "<demo>"))
        for path in emit(report, args.format, args.out):
            print(path)
        return 0 if report.get("status") == "ok" else 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Command-line front end.

    cwenofv run SPEC.ini [--override key=value ...]
    cwenofv list-benchmarks
    cwenofv tables RESULT_DIR

Exit codes: 0 success, 2 simulation blow-up, 3 malformed spec.
"""

import argparse
import configparser
import os
import sys

from .benchmarks import BENCHMARKS, DEFAULT_FINAL_TIME, DESK_GRIDS
from .errors import SimulationBlowup, SpecError
from .experiments import ExperimentSpec, run_experiment

_INT_KEYS = {"order", "power"}
_FLOAT_KEYS = {"m_hat", "eps_fixed", "final_time", "cfl", "d0"}
_BOOL_KEYS = {"reference", "full_scale"}


def _parse_grids(text):
    out = []
    for tok in text.replace(",", " ").split():
        if "x" in tok:
            a, b = tok.split("x")
            out.append((int(a), int(b)))
        else:
            out.append(int(tok))
    return tuple(out)


def _coerce(key, value):
    if key == "grids":
        return _parse_grids(value)
    if key in _INT_KEYS:
        return int(value)
    if key in _FLOAT_KEYS:
        return float(value)
    if key in _BOOL_KEYS:
        return value.strip().lower() in ("1", "true", "yes", "on")
    return value


def load_spec(path, overrides=()) -> ExperimentSpec:
    if not os.path.exists(path):
        raise SpecError(f"spec file not found: {path}")
    cp = configparser.ConfigParser()
    try:
        cp.read(path)
    except configparser.Error as exc:
        raise SpecError(f"cannot parse {path}: {exc}") from exc
    kv = {}
    for section in cp.sections():
        for key, value in cp.items(section):
            kv[key] = value
    for item in overrides:
        if "=" not in item:
            raise SpecError(f"override {item!r} is not key=value")
        key, value = item.split("=", 1)
        kv[key.split(".")[-1].strip()] = value.strip()
    if "benchmark" not in kv:
        raise SpecError("spec needs a 'benchmark' entry")
    valid = {f.name for f in ExperimentSpec.__dataclass_fields__.values()}
    kwargs = {}
    for key, value in kv.items():
        if key not in valid:
            raise SpecError(f"unknown spec key {key!r}")
        try:
            kwargs[key] = _coerce(key, value)
        except ValueError as exc:
            raise SpecError(f"bad value for {key!r}: {value!r}") from exc
    return ExperimentSpec(**kwargs)


def _cmd_run(args):
    spec = load_spec(args.spec, args.override)
    result = run_experiment(spec)
    rates = result.rates()
    print(f"# {result.benchmark} [{result.scheme}] hash={result.spec_hash}")
    header = "cells".rjust(10) + "".join(
        name.rjust(14) + "rate".rjust(7) for name in result.columns)
    print(header)
    for i, res in enumerate(result.resolutions):
        line = f"{res!s:>10}"
        for c in range(len(result.columns)):
            line += f"{result.errors[i][c]:>14.5e}"
            r = rates[c][i]
            line += "      -" if r != r else f"{r:>7.2f}"
        print(line)
    if spec.output:
        print(f"artifacts in {spec.output}/")
    return 0


def _cmd_list(_args):
    for name in BENCHMARKS:
        t = DEFAULT_FINAL_TIME.get(name)
        grids = DESK_GRIDS.get(name)
        print(f"{name:20s} default grids {grids}"
              + (f", final time {t}" if t is not None else " (reconstruction study)"))
    return 0


def _cmd_tables(args):
    import csv
    found = False
    for name in sorted(os.listdir(args.results)):
        if not name.endswith(".csv"):
            continue
        found = True
        path = os.path.join(args.results, name)
        with open(path) as fh:
            rows = list(csv.reader(fh))
        print(f"== {name}")
        widths = [max(len(r[i]) for r in rows if i < len(r)) for i in range(len(rows[0]))]
        for r in rows:
            print("  ".join(cell.rjust(w) for cell, w in zip(r, widths)))
        print()
    if not found:
        print(f"no CSV tables in {args.results}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(prog="cwenofv")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment spec")
    p_run.add_argument("spec")
    p_run.add_argument("--override", action="append", default=[],
                       metavar="KEY=VALUE")
    p_run.set_defaults(fn=_cmd_run)
    p_list = sub.add_parser("list-benchmarks", help="show the benchmark catalogue")
    p_list.set_defaults(fn=_cmd_list)
    p_tab = sub.add_parser("tables", help="pretty-print result CSV files")
    p_tab.add_argument("results")
    p_tab.set_defaults(fn=_cmd_tables)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 3
    except SimulationBlowup as exc:
        print(f"simulation blow-up: {exc} (t={exc.time}, cell={exc.cell})",
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
